//! Quotient rings `K[x]/(w)` for irreducible `w`, with square roots, plus
//! irreducibility testing over extension fields.

use std::sync::OnceLock;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ffield::poly::FieldPoly;
use crate::ffield::tonelli::{tonelli_shanks, SquareRootDomain, TonelliSetup};
use crate::ffield::FieldContext;

const NONRESIDUE_SEED: u64 = 0x6e6f_6e72_6573;

/// Ben-Or test: `f` is irreducible iff `gcd(x^(Q^i) - x, f) = 1` for `i <= deg/2`.
pub fn is_irreducible(ctx: &FieldContext, f: &FieldPoly) -> bool {
    let deg = match f.degree() {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    if deg == 1 {
        return true;
    }
    let f = f.monic(ctx);
    if f.coeff_slice(0).iter().all(|&c| c == 0) {
        return false;
    }
    let x = FieldPoly::monomial(ctx, 1);
    let q = ctx.cardinality().clone();
    let mut h = x.clone();
    for _ in 1..=deg / 2 {
        h = h.powmod(ctx, &q, &f);
        let g = h.sub(ctx, &x).gcd(ctx, &f);
        if !g.is_one() {
            return false;
        }
    }
    true
}

/// `K[x]/(w)` with `w` monic irreducible: a field with `|K|^deg(w)` elements.
pub struct ExtRing {
    pub ctx: FieldContext,
    pub w: FieldPoly,
    order: BigUint,
    tonelli: OnceLock<TonelliSetup<FieldPoly>>,
}

impl ExtRing {
    pub fn new(ctx: &FieldContext, w: FieldPoly) -> Self {
        let w = w.monic(ctx);
        let k = w.degree().expect("nonconstant modulus") as u32;
        let order = ctx.cardinality().pow(k);
        ExtRing {
            ctx: ctx.clone(),
            w,
            order,
            tonelli: OnceLock::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.w.degree().unwrap()
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn reduce(&self, a: &FieldPoly) -> FieldPoly {
        a.rem(&self.ctx, &self.w)
    }

    pub fn random(&self, rng: &mut ChaCha8Rng) -> FieldPoly {
        let p = self.ctx.characteristic();
        let c: Vec<u64> = (0..self.degree() * self.ctx.degree())
            .map(|_| rng.gen_range(0..p))
            .collect();
        FieldPoly::from_raw(self.ctx.degree(), c)
    }

    /// Euler's criterion: `a^((|L|-1)/2)` is `1` for nonzero squares.
    pub fn is_square(&self, a: &FieldPoly) -> bool {
        if a.is_zero() {
            return true;
        }
        let e = (&self.order - 1u32) >> 1;
        self.pow(a, &e).is_one()
    }

    fn setup(&self) -> &TonelliSetup<FieldPoly> {
        self.tonelli.get_or_init(|| {
            let e = (&self.order - 1u32) >> 1;
            let minus_one = FieldPoly::one(&self.ctx).neg(&self.ctx);
            let mut rng = ChaCha8Rng::seed_from_u64(NONRESIDUE_SEED);
            loop {
                let candidate = self.random(&mut rng);
                if !candidate.is_zero() && self.pow(&candidate, &e) == minus_one {
                    return TonelliSetup::new(self, &self.order, &candidate);
                }
            }
        })
    }

    /// Some square root of `a`, or `None` for a nonresidue.
    pub fn sqrt(&self, a: &FieldPoly) -> Option<FieldPoly> {
        let r = tonelli_shanks(self, self.setup(), a)?;
        if self.mul(&r, &r) == *a {
            Some(r)
        } else {
            None
        }
    }

    /// Evaluate a polynomial at a ring element, using powers for sparse input.
    pub fn eval(&self, f: &FieldPoly, x: &FieldPoly) -> FieldPoly {
        let ctx = &self.ctx;
        let support = f.support();
        if support.len() <= 8 {
            let mut acc = FieldPoly::zero(ctx);
            for i in support {
                let term = self.pow(x, &BigUint::from(i)).scale(ctx, &f.coeff(ctx, i));
                acc = acc.add(ctx, &term);
            }
            return acc;
        }
        let mut acc = FieldPoly::zero(ctx);
        for i in (0..f.len()).rev() {
            acc = self
                .mul(&acc, x)
                .add(ctx, &FieldPoly::constant(ctx, &f.coeff(ctx, i)));
        }
        acc
    }
}

impl SquareRootDomain for ExtRing {
    type Elem = FieldPoly;

    fn zero(&self) -> FieldPoly {
        FieldPoly::zero(&self.ctx)
    }

    fn one(&self) -> FieldPoly {
        FieldPoly::one(&self.ctx)
    }

    fn mul(&self, a: &FieldPoly, b: &FieldPoly) -> FieldPoly {
        a.mul(&self.ctx, b).rem(&self.ctx, &self.w)
    }
}

/// A random monic irreducible of degree `k` over `ctx`, from a seeded search.
pub fn find_irreducible(ctx: &FieldContext, k: usize, rng: &mut ChaCha8Rng) -> FieldPoly {
    let p = ctx.characteristic();
    let n = ctx.degree();
    loop {
        let mut c: Vec<u64> = (0..k * n).map(|_| rng.gen_range(0..p)).collect();
        c.push(1);
        c.extend(std::iter::repeat(0).take(n - 1));
        let f = FieldPoly::from_raw(n, c);
        if is_irreducible(ctx, &f) {
            return f;
        }
    }
}
