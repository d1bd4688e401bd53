//! Dense polynomials over a prime field, coefficients low degree first.
//!
//! Only what the extension-field layer needs: defining-polynomial search,
//! inversion and Frobenius tables.

use super::arith::PrimeModulus;

pub fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn sub(m: PrimeModulus, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = m.sub(x, y);
    }
    trim(&mut out);
    out
}

pub fn mul(m: PrimeModulus, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = m.add(out[i + j], m.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo nonzero `b`.
pub fn rem(m: PrimeModulus, a: &[u64], b: &[u64]) -> Vec<u64> {
    divrem(m, a, b).1
}

pub fn divrem(m: PrimeModulus, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let db = b.len() - 1;
    let lead_inv = m.inv(b[db]).expect("nonzero leading coefficient");
    let mut q = vec![0u64; r.len() - db];
    for i in (db..r.len()).rev() {
        let c = m.mul(r[i], lead_inv);
        if c == 0 {
            continue;
        }
        q[i - db] = c;
        for j in 0..=db {
            r[i - db + j] = m.sub(r[i - db + j], m.mul(c, b[j]));
        }
    }
    r.truncate(db);
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

pub fn make_monic(m: PrimeModulus, a: &mut [u64]) {
    if let Some(&lead) = a.last() {
        let inv = m.inv(lead).expect("nonzero leading coefficient");
        for c in a.iter_mut() {
            *c = m.mul(*c, inv);
        }
    }
}

pub fn gcd(m: PrimeModulus, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(m, &x, &y);
        x = y;
        y = r;
    }
    make_monic(m, &mut x);
    x
}

/// Inverse of `a` modulo `f`, if `gcd(a, f) = 1`.
pub fn inv_mod(m: PrimeModulus, a: &[u64], f: &[u64]) -> Option<Vec<u64>> {
    let mut r0 = f.to_vec();
    let mut r1 = rem(m, a, f);
    let mut s0: Vec<u64> = Vec::new();
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (q, r) = divrem(m, &r0, &r1);
        let s = sub(m, &s0, &mul(m, &q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    if r0.len() != 1 {
        return None;
    }
    let c = m.inv(r0[0])?;
    let mut out: Vec<u64> = s0.iter().map(|&x| m.mul(x, c)).collect();
    out = rem(m, &out, f);
    Some(out)
}

pub fn mulmod(m: PrimeModulus, a: &[u64], b: &[u64], f: &[u64]) -> Vec<u64> {
    rem(m, &mul(m, a, b), f)
}

/// `base^e mod f` for a word-sized exponent.
pub fn powmod(m: PrimeModulus, base: &[u64], mut e: u64, f: &[u64]) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = rem(m, base, f);
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(m, &result, &b, f);
        }
        e >>= 1;
        if e > 0 {
            b = mulmod(m, &b, &b, f);
        }
    }
    result
}

/// Matrix of the `p`-power map on `F_p[x]/(f)`: row `i` holds `x^(i p) mod f`.
pub fn frobenius_matrix(m: PrimeModulus, f: &[u64]) -> Vec<Vec<u64>> {
    let n = f.len() - 1;
    let xp = powmod(m, &[0, 1], m.value(), f);
    let mut rows = Vec::with_capacity(n);
    let mut cur = vec![1u64];
    for _ in 0..n {
        let mut row = cur.clone();
        row.resize(n, 0);
        rows.push(row);
        cur = mulmod(m, &cur, &xp, f);
    }
    rows
}

/// Apply a Frobenius matrix to a reduced residue of length `n`.
pub fn apply_matrix(m: PrimeModulus, rows: &[Vec<u64>], a: &[u64], out: &mut [u64]) {
    out.iter_mut().for_each(|o| *o = 0);
    for (i, &c) in a.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for (o, &r) in out.iter_mut().zip(rows[i].iter()) {
            *o = m.add(*o, m.mul(c, r));
        }
    }
}

/// Ben-Or irreducibility test for a monic `f` of degree `n >= 1`.
pub fn is_irreducible(m: PrimeModulus, f: &[u64]) -> bool {
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let rows = frobenius_matrix(m, f);
    let mut h = vec![0u64; n];
    h[1] = 1;
    let mut next = vec![0u64; n];
    for _ in 1..=n / 2 {
        apply_matrix(m, &rows, &h, &mut next);
        std::mem::swap(&mut h, &mut next);
        let mut diff = h.clone();
        diff[1] = m.sub(diff[1], 1);
        trim(&mut diff);
        if diff.is_empty() {
            return false;
        }
        if gcd(m, f, &diff).len() != 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducibility_over_f3() {
        let m = PrimeModulus::new(3);
        assert!(is_irreducible(m, &[1, 0, 1]));
        assert!(!is_irreducible(m, &[2, 0, 1]));
        // (x^2+1)^2 is reducible without linear factors
        let sq = mul(m, &[1, 0, 1], &[1, 0, 1]);
        assert!(!is_irreducible(m, &sq));
    }

    #[test]
    fn inverse_mod_defining_polynomial() {
        let m = PrimeModulus::new(5);
        let f = [1u64, 1, 1];
        for a0 in 0..5 {
            for a1 in 0..5 {
                let mut a = vec![a0, a1];
                trim(&mut a);
                if a.is_empty() {
                    continue;
                }
                let inv = inv_mod(m, &a, &f).unwrap();
                assert_eq!(mulmod(m, &a, &inv, &f), vec![1]);
            }
        }
    }
}
