//! Divisor class groups of odd-degree hyperelliptic curves `y^2 = F(x)`.
//!
//! Classes are reduced Mumford pairs `(u, v)`: `u` monic of degree at most
//! `g`, `deg v < deg u`, and `u | v^2 - F`. The group law is Cantor's
//! composition followed by continued-fraction reduction.

pub mod elliptic;
pub mod enumerate;
pub mod order;
pub mod ring;
pub mod sample;

use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use thiserror::Error;

use crate::ffield::poly::FieldPoly;
use crate::ffield::{FieldContext, FieldError};

pub use enumerate::{ell_torsion_census, enumerate_jacobian, model_point_counts, Census};
pub use order::{find_order_ell_element, FactoredOrder};
pub use sample::random_divisor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JacobianError {
    #[error("model polynomial must have odd degree, got {0}")]
    EvenDegree(isize),
    #[error("model polynomial is not squarefree")]
    NotSquarefree,
    #[error("invalid Mumford divisor: {0}")]
    InvalidDivisor(&'static str),
    #[error("enumeration needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: BigUint, budget: u64 },
    #[error("no square found after {0} sampling attempts")]
    SamplingExhausted(u32),
    #[error("{count} {ell}-torsion elements is not a power of {ell}")]
    NotAPowerOfEll { count: u64, ell: u64 },
    #[error("{ell} does not divide the group order")]
    EllDoesNotDivide { ell: u64 },
    #[error("no element of order {ell} found in {trials} trials")]
    NotFound { ell: u64, trials: u32 },
    #[error("model coefficients are not in the prime field")]
    NonPrimeCoefficients,
    #[error(transparent)]
    Field(#[from] FieldError),
}

struct ModelInner {
    ctx: FieldContext,
    f: FieldPoly,
    genus: usize,
    sampler: OnceLock<sample::PlaceSampler>,
}

/// `y^2 = F(x)` with `F` squarefree of odd degree `2g + 1`.
#[derive(Clone)]
pub struct HyperellipticModel {
    inner: Arc<ModelInner>,
}

impl std::fmt::Debug for HyperellipticModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HyperellipticModel")
            .field("field", &self.inner.ctx)
            .field("genus", &self.inner.genus)
            .finish()
    }
}

impl HyperellipticModel {
    pub fn new(ctx: &FieldContext, f: FieldPoly) -> Result<Self, JacobianError> {
        let deg = f.deg();
        if deg < 1 || deg % 2 == 0 {
            return Err(JacobianError::EvenDegree(deg));
        }
        if !f.gcd(ctx, &f.derivative(ctx)).is_one() {
            return Err(JacobianError::NotSquarefree);
        }
        Ok(HyperellipticModel {
            inner: Arc::new(ModelInner {
                ctx: ctx.clone(),
                f,
                genus: (deg as usize - 1) / 2,
                sampler: OnceLock::new(),
            }),
        })
    }

    /// `y^2 = c * h(x)` for `h` with coefficients in the prime field, low degree first.
    pub fn from_prime_coeffs(ctx: &FieldContext, h: &[u64], c: u64) -> Result<Self, JacobianError> {
        let scaled: Vec<u64> = h.iter().map(|&a| ctx.prime_modulus().mul(a % ctx.characteristic(), c % ctx.characteristic())).collect();
        Self::new(ctx, FieldPoly::from_prime_coeffs(ctx, &scaled))
    }

    /// `y^2 = x^q - x`.
    pub fn artin_schreier(ctx: &FieldContext, q: usize) -> Result<Self, JacobianError> {
        let mut c = vec![0u64; q + 1];
        c[1] = ctx.characteristic() - 1;
        c[q] = 1;
        Self::new(ctx, FieldPoly::from_prime_coeffs(ctx, &c))
    }

    pub fn field(&self) -> &FieldContext {
        &self.inner.ctx
    }

    pub fn f(&self) -> &FieldPoly {
        &self.inner.f
    }

    pub fn genus(&self) -> usize {
        self.inner.genus
    }

    /// Coefficients of `F` when they all lie in the prime field.
    pub fn prime_coefficients(&self) -> Option<Vec<u64>> {
        (0..self.f().len())
            .map(|i| {
                let c = self.f().coeff_slice(i);
                c[1..].iter().all(|&x| x == 0).then_some(c[0])
            })
            .collect()
    }

    pub fn identity(&self) -> MumfordDivisor {
        MumfordDivisor {
            u: FieldPoly::one(self.field()),
            v: FieldPoly::zero(self.field()),
        }
    }

    /// `(u, v)` after checking the reduced-form contract.
    pub fn divisor(&self, u: FieldPoly, v: FieldPoly) -> Result<MumfordDivisor, JacobianError> {
        let d = MumfordDivisor { u, v };
        self.validate(&d)?;
        Ok(d)
    }

    pub fn validate(&self, d: &MumfordDivisor) -> Result<(), JacobianError> {
        let ctx = self.field();
        if !d.u.is_monic() {
            return Err(JacobianError::InvalidDivisor("u is not monic"));
        }
        if d.u.deg() > self.genus() as isize {
            return Err(JacobianError::InvalidDivisor("deg u exceeds the genus"));
        }
        if d.v.deg() >= d.u.deg() {
            return Err(JacobianError::InvalidDivisor("deg v is not below deg u"));
        }
        if !d.v.square(ctx).sub(ctx, self.f()).rem(ctx, &d.u).is_zero() {
            return Err(JacobianError::InvalidDivisor("u does not divide v^2 - F"));
        }
        Ok(())
    }

    pub fn is_valid(&self, d: &MumfordDivisor) -> bool {
        self.validate(d).is_ok()
    }

    pub fn negate(&self, d: &MumfordDivisor) -> MumfordDivisor {
        MumfordDivisor {
            u: d.u.clone(),
            v: d.v.neg(self.field()),
        }
    }

    /// Class of `D1 + D2`.
    pub fn cantor_add(&self, a: &MumfordDivisor, b: &MumfordDivisor) -> MumfordDivisor {
        if a.is_identity() {
            return b.clone();
        }
        if b.is_identity() {
            return a.clone();
        }
        let (u, v) = self.compose(a, b);
        self.reduce(u, v)
    }

    /// Composition: a semi-reduced `(u, v)` in the class of `a + b`.
    fn compose(&self, a: &MumfordDivisor, b: &MumfordDivisor) -> (FieldPoly, FieldPoly) {
        let ctx = self.field();
        let f = self.f();
        let (d0, e1, e2) = a.u.xgcd(ctx, &b.u);
        if d0.is_one() {
            // u = u1 u2, v = e1 u1 v2 + e2 u2 v1 mod u.
            let u = a.u.mul(ctx, &b.u);
            let t1 = e1.mul(ctx, &a.u).mul(ctx, &b.v);
            let t2 = e2.mul(ctx, &b.u).mul(ctx, &a.v);
            let v = t1.add(ctx, &t2).rem(ctx, &u);
            return (u, v);
        }
        let sum = a.v.add(ctx, &b.v);
        let (d, c1, c2) = d0.xgcd(ctx, &sum);
        let s1 = c1.mul(ctx, &e1);
        let s2 = c1.mul(ctx, &e2);
        let u = a
            .u
            .mul(ctx, &b.u)
            .div_exact(ctx, &d.square(ctx))
            .expect("d^2 divides u1 u2");
        let t = s1
            .mul(ctx, &a.u)
            .mul(ctx, &b.v)
            .add(ctx, &s2.mul(ctx, &b.u).mul(ctx, &a.v))
            .add(ctx, &c2.mul(ctx, &a.v.mul(ctx, &b.v).add(ctx, f)));
        let v = t.div_exact(ctx, &d).expect("d divides the numerator").rem(ctx, &u);
        (u, v)
    }

    /// Reduction by partial quotients: with `-v_(i-1) = q_i u_i + v_i`,
    /// `u_(i+1) = u_(i-1) + q_i (v_i - v_(i-1))`.
    pub(crate) fn reduce(&self, u0: FieldPoly, v0: FieldPoly) -> MumfordDivisor {
        let ctx = self.field();
        let g = self.genus() as isize;
        if u0.deg() <= g {
            let u = u0.monic(ctx);
            let v = v0.rem(ctx, &u);
            return MumfordDivisor { u, v };
        }
        let mut u_prev = u0;
        let mut v_prev = v0;
        let mut u_cur = self
            .f()
            .sub(ctx, &v_prev.square(ctx))
            .div_exact(ctx, &u_prev)
            .expect("u divides F - v^2");
        let (mut q, mut v_cur) = v_prev.neg(ctx).divrem(ctx, &u_cur);
        while u_cur.deg() > g {
            let u_next = u_prev.add(ctx, &q.mul(ctx, &v_cur.sub(ctx, &v_prev)));
            let (q_next, v_next) = v_cur.neg(ctx).divrem(ctx, &u_next);
            u_prev = std::mem::replace(&mut u_cur, u_next);
            v_prev = std::mem::replace(&mut v_cur, v_next);
            q = q_next;
        }
        let u = u_cur.monic(ctx);
        MumfordDivisor { u, v: v_cur }
    }

    /// Reduction by the textbook step `u' = (F - v^2)/u`, `v' = -v mod u'`.
    pub fn reduce_naive(&self, u0: FieldPoly, v0: FieldPoly) -> MumfordDivisor {
        let ctx = self.field();
        let g = self.genus() as isize;
        let mut u = u0;
        let mut v = v0.rem(ctx, &u);
        while u.deg() > g {
            let next = self
                .f()
                .sub(ctx, &v.square(ctx))
                .div_exact(ctx, &u)
                .expect("u divides F - v^2");
            u = next;
            v = v.neg(ctx).rem(ctx, &u);
        }
        let u = u.monic(ctx);
        let v = v.rem(ctx, &u);
        MumfordDivisor { u, v }
    }

    /// Cantor addition with the textbook reduction; a test oracle.
    pub fn cantor_add_naive(&self, a: &MumfordDivisor, b: &MumfordDivisor) -> MumfordDivisor {
        let (u, v) = self.compose(a, b);
        self.reduce_naive(u, v)
    }

    pub fn double(&self, a: &MumfordDivisor) -> MumfordDivisor {
        self.cantor_add(a, a)
    }

    /// `n D` by left-to-right double-and-add.
    pub fn scalar_mul(&self, n: &BigUint, d: &MumfordDivisor) -> MumfordDivisor {
        let mut acc = self.identity();
        for i in (0..n.bits()).rev() {
            acc = self.double(&acc);
            if n.bit(i) {
                acc = self.cantor_add(&acc, d);
            }
        }
        acc
    }

    pub fn scalar_mul_u64(&self, n: u64, d: &MumfordDivisor) -> MumfordDivisor {
        self.scalar_mul(&BigUint::from(n), d)
    }

    /// `(x - a, 0)` for a root `a` of `F`.
    pub fn ramification_point(&self, a: &crate::ffield::FieldElement) -> Option<MumfordDivisor> {
        let ctx = self.field();
        if !self.f().eval(ctx, a).is_zero() {
            return None;
        }
        Some(MumfordDivisor {
            u: FieldPoly::linear(ctx, a),
            v: FieldPoly::zero(ctx),
        })
    }

    /// The affine point `(x, y)` as a degree-one divisor, if it lies on the curve.
    pub fn point(
        &self,
        x: &crate::ffield::FieldElement,
        y: &crate::ffield::FieldElement,
    ) -> Option<MumfordDivisor> {
        let ctx = self.field();
        if ctx.square(y) != self.f().eval(ctx, x) {
            return None;
        }
        Some(MumfordDivisor {
            u: FieldPoly::linear(ctx, x),
            v: FieldPoly::constant(ctx, y),
        })
    }
}

/// A reduced Mumford pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MumfordDivisor {
    pub u: FieldPoly,
    pub v: FieldPoly,
}

impl MumfordDivisor {
    pub fn is_identity(&self) -> bool {
        self.u.is_one()
    }

    /// Degree of `u`.
    pub fn weight(&self) -> usize {
        self.u.degree().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_extension;

    fn c3_over_f3() -> HyperellipticModel {
        let ctx = make_extension(3, 1).unwrap();
        HyperellipticModel::artin_schreier(&ctx, 3).unwrap()
    }

    #[test]
    fn model_validation() {
        let ctx = make_extension(5, 1).unwrap();
        assert!(matches!(
            HyperellipticModel::from_prime_coeffs(&ctx, &[0, 0, 1], 1),
            Err(JacobianError::EvenDegree(2))
        ));
        // x^3 (x - 1)^0 with a repeated root
        assert!(matches!(
            HyperellipticModel::from_prime_coeffs(&ctx, &[0, 0, 0, 1], 1),
            Err(JacobianError::NotSquarefree)
        ));
        let m = HyperellipticModel::from_prime_coeffs(&ctx, &[1, 1, 0, 0, 0, 1], 2).unwrap();
        assert_eq!(m.genus(), 2);
        assert_eq!(m.prime_coefficients(), Some(vec![2, 2, 0, 0, 0, 2]));
    }

    #[test]
    fn identity_and_ramification_two_torsion() {
        let m = c3_over_f3();
        let ctx = m.field().clone();
        for a in 0..3 {
            let d = m.ramification_point(&ctx.from_u64(a)).unwrap();
            assert!(m.is_valid(&d));
            assert_eq!(m.cantor_add(&d, &m.identity()), d);
            assert_eq!(m.cantor_add(&m.identity(), &d), d);
            assert!(m.cantor_add(&d, &d).is_identity());
        }
    }

    #[test]
    fn reductions_agree_on_random_sums() {
        let ctx = make_extension(7, 2).unwrap();
        let m = HyperellipticModel::from_prime_coeffs(&ctx, &[1, 3, 0, 0, 0, 0, 0, 1], 1).unwrap();
        for seed in 0..20u64 {
            let a = random_divisor(&m, seed).unwrap();
            let b = random_divisor(&m, seed + 100).unwrap();
            let fast = m.cantor_add(&a, &b);
            assert!(m.is_valid(&fast));
            assert_eq!(fast, m.cantor_add_naive(&a, &b));
            assert_eq!(m.cantor_add(&b, &a), fast);
            assert_eq!(m.double(&a), m.cantor_add_naive(&a, &a));
            assert!(m.cantor_add(&a, &m.negate(&a)).is_identity());
        }
    }

    #[test]
    fn scalar_mul_linear() {
        let ctx = make_extension(5, 2).unwrap();
        let m = HyperellipticModel::from_prime_coeffs(&ctx, &[1, 1, 0, 0, 0, 1], 1).unwrap();
        let d = random_divisor(&m, 7).unwrap();
        assert!(m.scalar_mul_u64(0, &d).is_identity());
        assert_eq!(m.scalar_mul_u64(1, &d), d);
        for (a, b) in [(3u64, 5u64), (17, 4), (100, 23)] {
            let lhs = m.scalar_mul_u64(a + b, &d);
            let rhs = m.cantor_add(&m.scalar_mul_u64(a, &d), &m.scalar_mul_u64(b, &d));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn twisted_model_group_law() {
        let ctx = make_extension(7, 1).unwrap();
        let m = HyperellipticModel::from_prime_coeffs(&ctx, &[1, 3, 0, 0, 0, 1], 3).unwrap();
        for seed in 0..10u64 {
            let a = random_divisor(&m, seed).unwrap();
            let b = random_divisor(&m, seed + 50).unwrap();
            let c = random_divisor(&m, seed + 99).unwrap();
            let ab_c = m.cantor_add(&m.cantor_add(&a, &b), &c);
            let a_bc = m.cantor_add(&a, &m.cantor_add(&b, &c));
            assert_eq!(ab_c, a_bc);
        }
    }
}
