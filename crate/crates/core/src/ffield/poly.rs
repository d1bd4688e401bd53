//! Univariate polynomials over an extension field, stored flat.
//!
//! Coefficient `i` occupies `c[i*n .. (i+1)*n]`. The representation is trimmed:
//! the zero polynomial has no blocks and the last block is nonzero.
//!
//! For small characteristic (`p < 2^15`) products and divisions accumulate raw
//! integer products in `i64` slots and reduce each coefficient once.

use num_bigint::BigUint;

use super::{FieldContext, FieldElement};

const LAZY_LIMIT: u64 = 1 << 15;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldPoly {
    n: usize,
    c: Vec<u64>,
}

impl std::fmt::Debug for FieldPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let blocks: Vec<&[u64]> = self.c.chunks(self.n).collect();
        write!(f, "FieldPoly{:?}", blocks)
    }
}

impl FieldPoly {
    pub fn zero(ctx: &FieldContext) -> Self {
        FieldPoly {
            n: ctx.degree(),
            c: Vec::new(),
        }
    }

    pub fn one(ctx: &FieldContext) -> Self {
        Self::constant(ctx, &ctx.one())
    }

    pub fn constant(ctx: &FieldContext, e: &FieldElement) -> Self {
        let mut p = FieldPoly {
            n: ctx.degree(),
            c: e.coeffs().to_vec(),
        };
        p.trim();
        p
    }

    /// `x - a`.
    pub fn linear(ctx: &FieldContext, a: &FieldElement) -> Self {
        Self::from_elements(ctx, &[ctx.neg(a), ctx.one()])
    }

    /// The monomial `x^k`.
    pub fn monomial(ctx: &FieldContext, k: usize) -> Self {
        let n = ctx.degree();
        let mut c = vec![0u64; (k + 1) * n];
        c[k * n] = 1;
        FieldPoly { n, c }
    }

    /// Polynomial with coefficients in the prime subfield, low degree first.
    pub fn from_prime_coeffs(ctx: &FieldContext, coeffs: &[u64]) -> Self {
        let n = ctx.degree();
        let m = ctx.prime_modulus();
        let mut c = vec![0u64; coeffs.len() * n];
        for (i, &x) in coeffs.iter().enumerate() {
            c[i * n] = m.reduce(x);
        }
        let mut p = FieldPoly { n, c };
        p.trim();
        p
    }

    pub fn from_elements(ctx: &FieldContext, coeffs: &[FieldElement]) -> Self {
        let n = ctx.degree();
        let mut c = Vec::with_capacity(coeffs.len() * n);
        for e in coeffs {
            c.extend_from_slice(e.coeffs());
        }
        let mut p = FieldPoly { n, c };
        p.trim();
        p
    }

    pub(crate) fn from_raw(n: usize, c: Vec<u64>) -> Self {
        debug_assert_eq!(c.len() % n, 0);
        let mut p = FieldPoly { n, c };
        p.trim();
        p
    }

    pub fn to_elements(&self, ctx: &FieldContext) -> Vec<FieldElement> {
        self.c.chunks(self.n).map(|b| ctx.from_coeffs(b)).collect()
    }

    fn trim(&mut self) {
        let n = self.n;
        while self.c.len() >= n && self.c[self.c.len() - n..].iter().all(|&x| x == 0) {
            self.c.truncate(self.c.len() - n);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Number of coefficient blocks (degree + 1; zero for the zero polynomial).
    pub fn len(&self) -> usize {
        self.c.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to `-1`.
    pub fn deg(&self) -> isize {
        self.len() as isize - 1
    }

    pub fn is_one(&self) -> bool {
        self.len() == 1 && self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }

    pub fn coeff_slice(&self, i: usize) -> &[u64] {
        &self.c[i * self.n..(i + 1) * self.n]
    }

    pub fn coeff(&self, ctx: &FieldContext, i: usize) -> FieldElement {
        if i < self.len() {
            ctx.from_coeffs(self.coeff_slice(i))
        } else {
            ctx.zero()
        }
    }

    pub fn lead(&self, ctx: &FieldContext) -> FieldElement {
        match self.degree() {
            Some(d) => self.coeff(ctx, d),
            None => ctx.zero(),
        }
    }

    pub fn raw(&self) -> &[u64] {
        &self.c
    }

    pub fn is_monic(&self) -> bool {
        match self.degree() {
            Some(d) => {
                let b = self.coeff_slice(d);
                b[0] == 1 && b[1..].iter().all(|&x| x == 0)
            }
            None => false,
        }
    }

    pub fn add(&self, ctx: &FieldContext, other: &Self) -> Self {
        let (long, short) = if self.c.len() >= other.c.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut c = long.c.clone();
        ctx.add_assign_slice(&mut c[..short.c.len()], &short.c);
        Self::from_raw(self.n, c)
    }

    pub fn sub(&self, ctx: &FieldContext, other: &Self) -> Self {
        let mut c = self.c.clone();
        if c.len() < other.c.len() {
            c.resize(other.c.len(), 0);
        }
        ctx.sub_assign_slice(&mut c[..other.c.len()], &other.c);
        Self::from_raw(self.n, c)
    }

    pub fn neg(&self, ctx: &FieldContext) -> Self {
        let m = ctx.prime_modulus();
        FieldPoly {
            n: self.n,
            c: self.c.iter().map(|&x| m.neg(x)).collect(),
        }
    }

    pub fn scale(&self, ctx: &FieldContext, e: &FieldElement) -> Self {
        let mut c = self.c.clone();
        ctx.scale_slice(&mut c, e.coeffs());
        Self::from_raw(self.n, c)
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![0u64; k * self.n];
        c.extend_from_slice(&self.c);
        FieldPoly { n: self.n, c }
    }

    pub fn monic(&self, ctx: &FieldContext) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = ctx.inv(&self.lead(ctx)).expect("nonzero leading coefficient");
        self.scale(ctx, &inv)
    }

    pub fn mul(&self, ctx: &FieldContext, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(ctx);
        }
        if ctx.characteristic() < LAZY_LIMIT {
            mul_lazy(ctx, self, other)
        } else {
            mul_direct(ctx, self, other)
        }
    }

    pub fn square(&self, ctx: &FieldContext) -> Self {
        self.mul(ctx, self)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, ctx: &FieldContext, b: &Self) -> (Self, Self) {
        assert!(!b.is_zero(), "polynomial division by zero");
        if self.len() < b.len() {
            return (Self::zero(ctx), self.clone());
        }
        if ctx.characteristic() < LAZY_LIMIT {
            divrem_lazy(ctx, self, b)
        } else {
            divrem_direct(ctx, self, b)
        }
    }

    pub fn rem(&self, ctx: &FieldContext, b: &Self) -> Self {
        if self.len() < b.len() {
            return self.clone();
        }
        self.divrem(ctx, b).1
    }

    /// Exact quotient; `None` if the division leaves a remainder.
    pub fn div_exact(&self, ctx: &FieldContext, b: &Self) -> Option<Self> {
        let (q, r) = self.divrem(ctx, b);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    pub fn mulmod(&self, ctx: &FieldContext, other: &Self, m: &Self) -> Self {
        self.mul(ctx, other).rem(ctx, m)
    }

    pub fn powmod(&self, ctx: &FieldContext, e: &BigUint, m: &Self) -> Self {
        let mut result = Self::one(ctx).rem(ctx, m);
        let base = self.rem(ctx, m);
        for i in (0..e.bits()).rev() {
            result = result.mulmod(ctx, &result, m);
            if e.bit(i) {
                result = result.mulmod(ctx, &base, m);
            }
        }
        result
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, ctx: &FieldContext, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(ctx, &b);
            a = b;
            b = r;
        }
        a.monic(ctx)
    }

    /// `(g, s, t)` with `g` monic, `g = gcd(self, other) = s*self + t*other`.
    pub fn xgcd(&self, ctx: &FieldContext, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(ctx), Self::zero(ctx));
        let (mut t0, mut t1) = (Self::zero(ctx), Self::one(ctx));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(ctx, &r1);
            let s = s0.sub(ctx, &q.mul(ctx, &s1));
            let t = t0.sub(ctx, &q.mul(ctx, &t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = ctx.inv(&r0.lead(ctx)).expect("nonzero leading coefficient");
        (
            r0.scale(ctx, &inv),
            s0.scale(ctx, &inv),
            t0.scale(ctx, &inv),
        )
    }

    /// Inverse of `self` modulo `m`, when coprime.
    pub fn inv_mod(&self, ctx: &FieldContext, m: &Self) -> Option<Self> {
        let (g, s, _) = self.rem(ctx, m).xgcd(ctx, m);
        if g.is_one() {
            Some(s.rem(ctx, m))
        } else {
            None
        }
    }

    pub fn derivative(&self, ctx: &FieldContext) -> Self {
        if self.len() <= 1 {
            return Self::zero(ctx);
        }
        let n = self.n;
        let m = ctx.prime_modulus();
        let mut c = vec![0u64; (self.len() - 1) * n];
        for i in 1..self.len() {
            let k = m.reduce(i as u64);
            for j in 0..n {
                c[(i - 1) * n + j] = m.mul(self.c[i * n + j], k);
            }
        }
        Self::from_raw(n, c)
    }

    pub fn eval(&self, ctx: &FieldContext, x: &FieldElement) -> FieldElement {
        let n = self.n;
        let mut acc = vec![0u64; n];
        let mut tmp = vec![0u64; n];
        for i in (0..self.len()).rev() {
            ctx.mul_slices(&acc, x.coeffs(), &mut tmp);
            ctx.add_assign_slice(&mut tmp, self.coeff_slice(i));
            std::mem::swap(&mut acc, &mut tmp);
        }
        ctx.from_coeffs(&acc)
    }

    /// Indices of nonzero coefficients, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.coeff_slice(i).iter().any(|&x| x != 0))
            .collect()
    }
}

fn mul_direct(ctx: &FieldContext, a: &FieldPoly, b: &FieldPoly) -> FieldPoly {
    let n = a.n;
    let mut c = vec![0u64; (a.len() + b.len() - 1) * n];
    let mut tmp = vec![0u64; n];
    for i in 0..a.len() {
        let ai = a.coeff_slice(i);
        if ai.iter().all(|&x| x == 0) {
            continue;
        }
        for j in 0..b.len() {
            ctx.mul_slices(ai, b.coeff_slice(j), &mut tmp);
            ctx.add_assign_slice(&mut c[(i + j) * n..(i + j + 1) * n], &tmp);
        }
    }
    FieldPoly::from_raw(n, c)
}

fn divrem_direct(ctx: &FieldContext, a: &FieldPoly, b: &FieldPoly) -> (FieldPoly, FieldPoly) {
    let n = a.n;
    let db = b.len() - 1;
    let lead_inv = ctx.inv(&b.lead(ctx)).expect("nonzero leading coefficient");
    let mut r = a.c.clone();
    let mut q = vec![0u64; (a.len() - db) * n];
    let mut qi = vec![0u64; n];
    let mut tmp = vec![0u64; n];
    for i in (db..a.len()).rev() {
        ctx.mul_slices(&r[i * n..(i + 1) * n], lead_inv.coeffs(), &mut qi);
        if qi.iter().all(|&x| x == 0) {
            continue;
        }
        q[(i - db) * n..(i - db + 1) * n].copy_from_slice(&qi);
        for j in 0..=db {
            ctx.mul_slices(&qi, b.coeff_slice(j), &mut tmp);
            let k = i - db + j;
            ctx.sub_assign_slice(&mut r[k * n..(k + 1) * n], &tmp);
        }
    }
    r.truncate(db * n);
    (FieldPoly::from_raw(n, q), FieldPoly::from_raw(n, r))
}

/// Reduce one coefficient held as `2n - 1` raw slots into `out` (length `n`).
#[inline]
fn fold_slots(p: i64, f: &[u64], slots: &mut [i64], out: &mut [u64]) {
    let n = out.len();
    for k in (n..slots.len()).rev() {
        let h = slots[k].rem_euclid(p);
        if h == 0 {
            continue;
        }
        for i in 0..n {
            slots[k - n + i] -= h * f[i] as i64;
        }
    }
    for i in 0..n {
        out[i] = slots[i].rem_euclid(p) as u64;
    }
}

fn mul_lazy(ctx: &FieldContext, a: &FieldPoly, b: &FieldPoly) -> FieldPoly {
    let n = a.n;
    let p = ctx.characteristic() as i64;
    let f = ctx.modulus();
    let len = a.len() + b.len() - 1;
    let w = 2 * n - 1;
    let ai: Vec<i64> = a.c.iter().map(|&x| x as i64).collect();
    let bi: Vec<i64> = b.c.iter().map(|&x| x as i64).collect();
    let mut out = vec![0u64; len * n];
    match n {
        1 => {
            // Periodic reduction keeps the i64 accumulators in range.
            let mut acc = vec![0i64; len];
            let chunk = (i64::MAX / ((p - 1) * (p - 1)).max(1)).min(1 << 20) as usize;
            for (start, block) in ai.chunks(chunk).enumerate() {
                let base = start * chunk;
                for (i0, &x) in block.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    let row = &mut acc[base + i0..base + i0 + bi.len()];
                    for (o, &y) in row.iter_mut().zip(&bi) {
                        *o += x * y;
                    }
                }
                for v in acc.iter_mut() {
                    *v %= p;
                }
            }
            for (o, v) in out.iter_mut().zip(acc) {
                *o = v.rem_euclid(p) as u64;
            }
        }
        2 => {
            let mut acc = vec![0i64; len * 3];
            for i in 0..a.len() {
                let (x0, x1) = (ai[2 * i], ai[2 * i + 1]);
                if x0 == 0 && x1 == 0 {
                    continue;
                }
                for j in 0..b.len() {
                    let (y0, y1) = (bi[2 * j], bi[2 * j + 1]);
                    let s = &mut acc[(i + j) * 3..(i + j) * 3 + 3];
                    s[0] += x0 * y0;
                    s[1] += x0 * y1 + x1 * y0;
                    s[2] += x1 * y1;
                }
            }
            let (f0, f1) = (f[0] as i64, f[1] as i64);
            for k in 0..len {
                let s = &acc[k * 3..k * 3 + 3];
                let h = s[2] % p;
                out[2 * k] = (s[0] - h * f0).rem_euclid(p) as u64;
                out[2 * k + 1] = (s[1] - h * f1).rem_euclid(p) as u64;
            }
        }
        _ => {
            let mut acc = vec![0i64; len * w];
            for i in 0..a.len() {
                let x = &ai[i * n..(i + 1) * n];
                if x.iter().all(|&v| v == 0) {
                    continue;
                }
                for j in 0..b.len() {
                    let y = &bi[j * n..(j + 1) * n];
                    let s = &mut acc[(i + j) * w..(i + j + 1) * w];
                    for (k, &xk) in x.iter().enumerate() {
                        if xk == 0 {
                            continue;
                        }
                        for (l, &yl) in y.iter().enumerate() {
                            s[k + l] += xk * yl;
                        }
                    }
                }
            }
            for k in 0..len {
                fold_slots(p, f, &mut acc[k * w..(k + 1) * w], &mut out[k * n..(k + 1) * n]);
            }
        }
    }
    FieldPoly::from_raw(n, out)
}

fn divrem_lazy(ctx: &FieldContext, a: &FieldPoly, b: &FieldPoly) -> (FieldPoly, FieldPoly) {
    let n = a.n;
    let p = ctx.characteristic() as i64;
    let f = ctx.modulus();
    let w = 2 * n - 1;
    let la = a.len();
    let db = b.len() - 1;
    let lead_inv = ctx.inv(&b.lead(ctx)).expect("nonzero leading coefficient");
    let monic = b.is_monic();
    let bi: Vec<i64> = b.c.iter().map(|&x| x as i64).collect();
    let mut acc = vec![0i64; la * w];
    for i in 0..la {
        for k in 0..n {
            acc[i * w + k] = a.c[i * n + k] as i64;
        }
    }
    let mut q = vec![0u64; (la - db) * n];
    let mut ri = vec![0u64; n];
    let mut qi = vec![0u64; n];
    // Bound on accumulated magnitude before a forced reduction of the whole buffer.
    let step = ((p - 1) * (p - 1) * n as i64).max(1);
    let budget_steps = (i64::MAX / 4 / step) as usize;
    let mut since_reduce = 0usize;
    for i in (db..la).rev() {
        fold_slots(p, f, &mut acc[i * w..(i + 1) * w], &mut ri);
        if monic {
            qi.copy_from_slice(&ri);
        } else {
            ctx.mul_slices(&ri, lead_inv.coeffs(), &mut qi);
        }
        if qi.iter().all(|&x| x == 0) {
            continue;
        }
        q[(i - db) * n..(i - db + 1) * n].copy_from_slice(&qi);
        let qv: Vec<i64> = qi.iter().map(|&x| x as i64).collect();
        for j in 0..db {
            let y = &bi[j * n..(j + 1) * n];
            let s = &mut acc[(i - db + j) * w..(i - db + j + 1) * w];
            if n == 1 {
                s[0] -= qv[0] * y[0];
            } else {
                for (k, &xk) in qv.iter().enumerate() {
                    if xk == 0 {
                        continue;
                    }
                    for (l, &yl) in y.iter().enumerate() {
                        s[k + l] -= xk * yl;
                    }
                }
            }
        }
        since_reduce += 1;
        if since_reduce >= budget_steps {
            for v in acc.iter_mut() {
                *v %= p;
            }
            since_reduce = 0;
        }
    }
    let mut r = vec![0u64; db * n];
    for k in 0..db {
        fold_slots(p, f, &mut acc[k * w..(k + 1) * w], &mut r[k * n..(k + 1) * n]);
    }
    (FieldPoly::from_raw(n, q), FieldPoly::from_raw(n, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_extension;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_poly(ctx: &FieldContext, deg: usize, rng: &mut ChaCha8Rng) -> FieldPoly {
        let p = ctx.characteristic();
        let c: Vec<u64> = (0..(deg + 1) * ctx.degree())
            .map(|_| rng.gen_range(0..p))
            .collect();
        FieldPoly::from_raw(ctx.degree(), c)
    }

    #[test]
    fn lazy_and_direct_kernels_agree() {
        for (p, n) in [(5u64, 1usize), (5, 2), (3, 3), (7, 2), (3, 4)] {
            let ctx = make_extension(p, n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(p + n as u64);
            for _ in 0..30 {
                let da = rng.gen_range(0..40);
                let db = rng.gen_range(0..20);
                let a = random_poly(&ctx, da, &mut rng);
                let mut b = random_poly(&ctx, db, &mut rng);
                if b.is_zero() {
                    b = FieldPoly::one(&ctx);
                }
                assert_eq!(mul_lazy(&ctx, &a, &b), mul_direct(&ctx, &a, &b));
                if a.len() >= b.len() {
                    assert_eq!(divrem_lazy(&ctx, &a, &b), divrem_direct(&ctx, &a, &b));
                }
            }
        }
    }

    #[test]
    fn division_identity() {
        let ctx = make_extension(5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_poly(&ctx, 30, &mut rng);
            let b = random_poly(&ctx, 11, &mut rng);
            if b.is_zero() {
                continue;
            }
            let (q, r) = a.divrem(&ctx, &b);
            assert!(r.deg() < b.deg());
            assert_eq!(q.mul(&ctx, &b).add(&ctx, &r), a);
        }
    }

    #[test]
    fn xgcd_bezout() {
        let ctx = make_extension(7, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let common = random_poly(&ctx, 3, &mut rng);
            let a = random_poly(&ctx, 9, &mut rng).mul(&ctx, &common);
            let b = random_poly(&ctx, 7, &mut rng).mul(&ctx, &common);
            let (g, s, t) = a.xgcd(&ctx, &b);
            assert_eq!(s.mul(&ctx, &a).add(&ctx, &t.mul(&ctx, &b)), g);
            assert!(a.rem(&ctx, &g).is_zero());
            assert!(b.rem(&ctx, &g).is_zero());
            assert!(g.is_monic());
        }
    }

    #[test]
    fn large_characteristic_path() {
        let ctx = make_extension(1_000_000_007, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_poly(&ctx, 12, &mut rng);
        let b = random_poly(&ctx, 5, &mut rng);
        let (q, r) = a.divrem(&ctx, &b);
        assert_eq!(q.mul(&ctx, &b).add(&ctx, &r), a);
    }

    #[test]
    fn eval_and_derivative() {
        let ctx = make_extension(5, 1).unwrap();
        // x^5 - x vanishes on F_5, derivative is -1.
        let f = FieldPoly::from_prime_coeffs(&ctx, &[0, 4, 0, 0, 0, 1]);
        for e in ctx.enumerate_elements(10).unwrap() {
            assert!(f.eval(&ctx, &e).is_zero());
        }
        assert_eq!(f.derivative(&ctx), FieldPoly::constant(&ctx, &ctx.from_i64(-1)));
    }
}
