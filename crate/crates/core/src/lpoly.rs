//! Integer characteristic polynomials of Frobenius.
//!
//! Over `F_q` the polynomial of `y^2 = x^q - x` is `(x^2 - q*)^g`. Over
//! `F_{q0}` it is a product of homogenized cyclotomic factors
//! `h_d(x) = p^phi(d) Phi_d(x / p)` with multiplicities `a_d`. Large instances
//! are kept in factored form; expansion is only done below a degree limit.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::counting::{qstar, CurveInstance};
use crate::cyclo::MultiplicityProfile;
use crate::ffield::arith::{divisors, euler_phi, moebius, valuation};
use crate::ffield::big_pow;

/// Largest degree expanded into dense coefficients by default.
pub const EXPANSION_LIMIT: usize = 2048;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpolyError {
    #[error("multiplicity profile is invalid: {0}")]
    ProfileInvalid(String),
    #[error("point counts are inconsistent at s = {0}")]
    InconsistentCounts(usize),
    #[error("need at least {need} counts, got {got}")]
    NotEnoughCounts { need: usize, got: usize },
    #[error("characteristic polynomial value at 1 is not positive: {0}")]
    NonPositive(BigInt),
    #[error("degree {degree} exceeds the expansion limit {limit}")]
    TooLarge { degree: BigUint, limit: usize },
}

/// Dense integer polynomial, low degree first.
pub type IntPoly = Vec<BigInt>;

fn trim(p: &mut IntPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn poly_mul(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(&mut out);
    out
}

pub fn poly_pow(a: &[BigInt], mut e: u64) -> IntPoly {
    let mut result = vec![BigInt::one()];
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mul(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = poly_mul(&base, &base);
        }
    }
    result
}

/// The `d`-th cyclotomic polynomial as `prod_{e | d} (x^e - 1)^mu(d/e)`,
/// each factor applied by exact multiplication or division by `x^e - 1`.
pub fn cyclotomic_polynomial(d: u64) -> Vec<i64> {
    assert!(d >= 1);
    let mut poly = vec![1i64];
    let mut divide = Vec::new();
    for e in divisors(d) {
        match moebius(d / e) {
            1 => poly = mul_binomial(&poly, e as usize),
            -1 => divide.push(e as usize),
            _ => {}
        }
    }
    for e in divide {
        poly = div_binomial(&poly, e);
    }
    poly
}

/// `a * (x^e - 1)`.
fn mul_binomial(a: &[i64], e: usize) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + e];
    for (i, &c) in a.iter().enumerate() {
        out[i + e] += c;
        out[i] -= c;
    }
    out
}

/// `a / (x^e - 1)`, asserting exactness.
fn div_binomial(a: &[i64], e: usize) -> Vec<i64> {
    let mut rem = a.to_vec();
    let dq = a.len() - 1 - e;
    let mut q = vec![0i64; dq + 1];
    for i in (0..=dq).rev() {
        let c = rem[i + e];
        q[i] = c;
        rem[i + e] = 0;
        rem[i] += c;
    }
    assert!(rem.iter().all(|&c| c == 0), "exact cyclotomic division");
    q
}

/// `p^phi(d) Phi_d(x / p)`: the monic polynomial whose roots are `p` times the
/// primitive `d`-th roots of unity.
pub fn homogenized_cyclotomic(d: u64, p: u64) -> IntPoly {
    let phi = cyclotomic_polynomial(d);
    let deg = phi.len() - 1;
    let pb = BigInt::from(p);
    phi.iter()
        .enumerate()
        .map(|(i, &c)| BigInt::from(c) * pb.pow((deg - i) as u32))
        .collect()
}

/// `R_d = h_d(1)`: `1 - p` for `d = 1`, `Phi_d(p)` otherwise.
pub fn unit_value(d: u64, p: u64) -> BigInt {
    if d == 1 {
        return BigInt::from(1) - BigInt::from(p);
    }
    let pb = BigInt::from(p);
    cyclotomic_polynomial(d)
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, &c| acc * &pb + c)
}

/// An exact, monic integer Frobenius polynomial, low degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPolyInt {
    pub coeffs: IntPoly,
    pub base: BigUint,
}

impl CharPolyInt {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn genus(&self) -> usize {
        self.degree() / 2
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    /// `c_i = B^(g - i) c_(2g - i)` for `i <= g`.
    pub fn functional_equation_holds(&self) -> bool {
        if self.degree() % 2 != 0 {
            return false;
        }
        let g = self.genus();
        let b = BigInt::from(self.base.clone());
        (0..=g).all(|i| self.coeffs[i] == b.pow((g - i) as u32) * &self.coeffs[2 * g - i])
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Coefficients reduced into `[0, ell)`.
    pub fn reduce_mod(&self, ell: u64) -> Vec<u64> {
        let l = BigInt::from(ell);
        self.coeffs
            .iter()
            .map(|c| c.mod_floor(&l).to_u64().expect("reduced"))
            .collect()
    }

    /// Power sums `S_1..S_k` of the roots, by Newton's identities.
    pub fn power_sums(&self, k: usize) -> Vec<BigInt> {
        let n = self.degree();
        // e_i = (-1)^i c_{n-i}.
        let e: Vec<BigInt> = (0..=n)
            .map(|i| {
                let c = self.coeffs[n - i].clone();
                if i % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .collect();
        let mut s: Vec<BigInt> = Vec::with_capacity(k);
        for j in 1..=k {
            // S_j = sum_{i=1}^{j-1} (-1)^(i-1) e_i S_(j-i) + (-1)^(j-1) j e_j.
            let mut acc = BigInt::zero();
            for i in 1..j.min(n + 1) {
                let term = &e[i] * &s[j - i - 1];
                if i % 2 == 1 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            if j <= n {
                let term = &e[j] * j;
                if j % 2 == 1 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            s.push(acc);
        }
        s
    }
}

/// `(x^2 - q*)^g` for `q = p^k` (any odd prime power).
pub fn charpoly_over_fq_small(q: &BigUint) -> CharPolyInt {
    let g: BigUint = (q - 1u32) >> 1;
    let g = g.to_u64().expect("small genus");
    let qs = qstar(q);
    let quad = vec![-qs, BigInt::zero(), BigInt::one()];
    CharPolyInt {
        coeffs: poly_pow(&quad, g),
        base: q.clone(),
    }
}

pub fn charpoly_over_fq(curve: &CurveInstance) -> CharPolyInt {
    charpoly_over_fq_small(&curve.q)
}

/// Frobenius polynomial over `F_{q0}` in factored form `prod_d h_d^(a_d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredCharPoly {
    pub p: u64,
    pub m: u64,
    pub multiplicities: BTreeMap<u64, BigUint>,
}

impl FactoredCharPoly {
    pub fn from_profile(profile: &MultiplicityProfile) -> Result<Self, LpolyError> {
        let n = 2 * profile.m;
        let mut multiplicities = BTreeMap::new();
        for d in divisors(n) {
            let a = profile
                .a
                .get(&d)
                .ok_or_else(|| LpolyError::ProfileInvalid(format!("missing a_{d}")))?;
            let a = a
                .to_biguint()
                .ok_or_else(|| LpolyError::ProfileInvalid(format!("a_{d} is negative")))?;
            multiplicities.insert(d, a);
        }
        if profile.a.len() != multiplicities.len() {
            return Err(LpolyError::ProfileInvalid("entries outside d | 2m".into()));
        }
        let fp = FactoredCharPoly {
            p: profile.p,
            m: profile.m,
            multiplicities,
        };
        if fp.degree() != big_pow(profile.p, 2 * profile.m) - 1u32 {
            return Err(LpolyError::ProfileInvalid("degree is not 2g".into()));
        }
        Ok(fp)
    }

    pub fn base(&self) -> BigUint {
        big_pow(self.p, 2)
    }

    pub fn degree(&self) -> BigUint {
        self.multiplicities
            .iter()
            .fold(BigUint::zero(), |acc, (&d, a)| acc + a * euler_phi(d))
    }

    /// Multiplicity of `(x - 1)` modulo `ell`, factor by factor.
    pub fn unity_multiplicity_mod_ell(&self, ell: u64) -> BigUint {
        self.multiplicities
            .iter()
            .fold(BigUint::zero(), |acc, (&d, a)| {
                let h = homogenized_cyclotomic(d, self.p);
                acc + a * unity_multiplicity_of(&h, ell)
            })
    }

    /// `v_ell` of the group order, as `sum_d a_d v_ell(R_d)`.
    pub fn order_valuation(&self, ell: u64) -> BigUint {
        self.multiplicities
            .iter()
            .fold(BigUint::zero(), |acc, (&d, a)| {
                let r = unit_value(d, self.p).magnitude().to_u64().expect("small R_d");
                acc + a * valuation(r, ell)
            })
    }

    /// The group order `prod_d R_d^(a_d)`, if the exponents fit in memory.
    pub fn group_order(&self, max_bits: u64) -> Option<BigUint> {
        let mut bits = 0f64;
        for (&d, a) in &self.multiplicities {
            let r = unit_value(d, self.p).magnitude().to_f64()?;
            bits += a.to_f64()? * r.log2();
        }
        if bits > max_bits as f64 {
            return None;
        }
        let mut n = BigInt::one();
        for (&d, a) in &self.multiplicities {
            n *= unit_value(d, self.p).pow(a.to_u32()?);
        }
        n.to_biguint()
    }

    pub fn expand(&self, limit: usize) -> Result<CharPolyInt, LpolyError> {
        let degree = self.degree();
        if degree > BigUint::from(limit) {
            return Err(LpolyError::TooLarge { degree, limit });
        }
        let mut coeffs = vec![BigInt::one()];
        for (&d, a) in &self.multiplicities {
            let h = homogenized_cyclotomic(d, self.p);
            coeffs = poly_mul(&coeffs, &poly_pow(&h, a.to_u64().expect("bounded by limit")));
        }
        Ok(CharPolyInt {
            coeffs,
            base: self.base(),
        })
    }

    /// Power sums `S_k = sum_d a_d p^k f(d, k)` of the roots.
    pub fn power_sum(&self, k: u64) -> BigInt {
        self.multiplicities
            .iter()
            .fold(BigInt::zero(), |acc, (&d, a)| {
                acc + BigInt::from(a.clone())
                    * crate::cyclo::f_value(d, k)
                    * BigInt::from(big_pow(self.p, k))
            })
    }
}

/// Expanded `prod_d h_d^(a_d)`; errors if the degree exceeds [`EXPANSION_LIMIT`].
pub fn charpoly_from_profile(profile: &MultiplicityProfile) -> Result<CharPolyInt, LpolyError> {
    FactoredCharPoly::from_profile(profile)?.expand(EXPANSION_LIMIT)
}

/// Frobenius polynomial of a genus-`g` curve over `F_B` from `#C(F_{B^s})`, `s = 1, 2, ...`.
///
/// Counts beyond the first `g` are checked against the recovered polynomial.
pub fn newton_from_counts(
    counts: &[BigUint],
    base: &BigUint,
    g: usize,
) -> Result<CharPolyInt, LpolyError> {
    if counts.len() < g {
        return Err(LpolyError::NotEnoughCounts {
            need: g,
            got: counts.len(),
        });
    }
    let b = BigInt::from(base.clone());
    let sums: Vec<BigInt> = counts
        .iter()
        .enumerate()
        .map(|(i, c)| b.pow(i as u32 + 1) + 1u32 - BigInt::from(c.clone()))
        .collect();
    // k e_k = sum_{i=1}^k (-1)^(i-1) e_(k-i) S_i.
    let mut e = vec![BigInt::one()];
    for k in 1..=g {
        let mut acc = BigInt::zero();
        for i in 1..=k {
            let term = &e[k - i] * &sums[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let (q, r) = acc.div_rem(&BigInt::from(k));
        if !r.is_zero() {
            return Err(LpolyError::InconsistentCounts(k));
        }
        e.push(q);
    }
    let n = 2 * g;
    let mut coeffs = vec![BigInt::zero(); n + 1];
    for k in 0..=g {
        let c = if k % 2 == 0 { e[k].clone() } else { -e[k].clone() };
        coeffs[n - k] = c;
    }
    for k in 0..g {
        // coefficient of x^k from that of x^(2g-k)
        coeffs[k] = b.pow((g - k) as u32) * &coeffs[n - k];
    }
    let poly = CharPolyInt {
        coeffs,
        base: base.clone(),
    };
    let check = poly.power_sums(counts.len());
    for (s, (a, b)) in check.iter().zip(&sums).enumerate() {
        if a != b {
            return Err(LpolyError::InconsistentCounts(s + 1));
        }
    }
    Ok(poly)
}

/// `|J(F_B)| = P(1)`.
pub fn group_order(poly: &CharPolyInt) -> Result<BigUint, LpolyError> {
    let v = poly.eval(&BigInt::one());
    if !v.is_positive() {
        return Err(LpolyError::NonPositive(v));
    }
    Ok(v.to_biguint().expect("positive"))
}

/// Largest `M` with `(x - 1)^M` dividing `poly` modulo `ell`.
pub fn unity_multiplicity_of(poly: &[BigInt], ell: u64) -> u64 {
    let l = BigInt::from(ell);
    let mut c: Vec<u64> = poly
        .iter()
        .map(|x| x.mod_floor(&l).to_u64().expect("reduced"))
        .collect();
    while c.last() == Some(&0) {
        c.pop();
    }
    let mut mult = 0;
    while c.len() > 1 {
        // Synthetic division by (x - 1).
        let n = c.len() - 1;
        let mut q = vec![0u64; n];
        let mut carry = 0u64;
        for i in (0..=n).rev() {
            let v = (c[i] + carry) % ell;
            if i == 0 {
                if v != 0 {
                    return mult;
                }
            } else {
                q[i - 1] = v;
                carry = v;
            }
        }
        c = q;
        mult += 1;
    }
    mult
}

pub fn unity_multiplicity_mod_ell(poly: &CharPolyInt, ell: u64) -> u64 {
    unity_multiplicity_of(&poly.coeffs, ell)
}
