//! Group orders in factored form and order-`ell` witnesses.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive};

use super::{random_divisor, HyperellipticModel, JacobianError, MumfordDivisor};
use crate::ffield::arith::factor;
use crate::lpoly::{unit_value, FactoredCharPoly};

/// `N = prod r^e` over primes `r`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FactoredOrder {
    pub factors: BTreeMap<u64, u64>,
}

impl FactoredOrder {
    /// `N = prod_d |h_d(1)|^(a_d)`, with each `h_d(1)` factored.
    ///
    /// `None` if some `h_d(1)` or exponent does not fit in 64 bits.
    pub fn from_charpoly(poly: &FactoredCharPoly) -> Option<Self> {
        let mut factors = BTreeMap::new();
        for (&d, a) in &poly.multiplicities {
            if a.bits() == 0 {
                continue;
            }
            let a = a.to_u64()?;
            let r = unit_value(d, poly.p).abs().to_u64()?;
            for (prime, e) in factor(r) {
                *factors.entry(prime).or_insert(0) += e as u64 * a;
            }
        }
        Some(FactoredOrder { factors })
    }

    pub fn value(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (&r, &e)| acc * BigUint::from(r).pow(e as u32))
    }

    pub fn valuation(&self, ell: u64) -> u64 {
        self.factors.get(&ell).copied().unwrap_or(0)
    }

    /// The order with the `ell`-part removed.
    pub fn without(&self, ell: u64) -> Self {
        let mut factors = self.factors.clone();
        factors.remove(&ell);
        FactoredOrder { factors }
    }

    pub fn bits(&self) -> f64 {
        self.factors
            .iter()
            .map(|(&r, &e)| e as f64 * (r as f64).log2())
            .sum()
    }
}

/// `N D`, one prime at a time in round-robin so that a small element order ends
/// the computation early.
pub fn mul_by_factored(
    model: &HyperellipticModel,
    order: &FactoredOrder,
    d: &MumfordDivisor,
) -> MumfordDivisor {
    let mut remaining: Vec<(u64, u64)> = order.factors.iter().map(|(&r, &e)| (r, e)).collect();
    let mut acc = d.clone();
    loop {
        let mut progressed = false;
        for (r, e) in remaining.iter_mut() {
            if *e == 0 {
                continue;
            }
            if acc.is_identity() {
                return acc;
            }
            acc = model.scalar_mul_u64(*r, &acc);
            *e -= 1;
            progressed = true;
        }
        if !progressed {
            return acc;
        }
    }
}

/// True if `N D` is the identity for each of `samples` seeded random divisors.
pub fn check_order_annihilates(
    model: &HyperellipticModel,
    order: &FactoredOrder,
    samples: u64,
    seed: u64,
) -> Result<bool, JacobianError> {
    use rayon::prelude::*;
    let results: Result<Vec<bool>, JacobianError> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let d = random_divisor(model, seed.wrapping_add(i))?;
            Ok(mul_by_factored(model, order, &d).is_identity())
        })
        .collect();
    Ok(results?.into_iter().all(|b| b))
}

/// An element of order exactly `ell`: `E = (N / ell^v) D` for random `D`, then
/// multiplied by `ell` until the next multiple is the identity.
pub fn find_order_ell_element(
    model: &HyperellipticModel,
    order: &FactoredOrder,
    ell: u64,
    trials: u32,
    seed: u64,
) -> Result<(MumfordDivisor, u32), JacobianError> {
    let v = order.valuation(ell);
    if v == 0 {
        return Err(JacobianError::EllDoesNotDivide { ell });
    }
    let cofactor = order.without(ell);
    for t in 0..trials {
        let d = random_divisor(model, seed.wrapping_add(t as u64))?;
        let mut e = mul_by_factored(model, &cofactor, &d);
        for _ in 0..v {
            if e.is_identity() {
                break;
            }
            let next = model.scalar_mul_u64(ell, &e);
            if next.is_identity() {
                return Ok((e, t + 1));
            }
            e = next;
        }
    }
    Err(JacobianError::NotFound { ell, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{make_curve, trace_profile, Strategy, TraceMode};
    use crate::cyclo::invert_multiplicities;
    use crate::ffield::make_extension;
    use crate::jacobian::enumerate_jacobian;

    fn small_order(n: u64) -> FactoredOrder {
        FactoredOrder {
            factors: factor(n).into_iter().map(|(r, e)| (r, e as u64)).collect(),
        }
    }

    #[test]
    fn factored_order_of_small_family_member() {
        // C_9 over F_9: profile (4, 4), N = (1 - 3)^4 (3 + 1)^4 = 4096.
        let curve = make_curve(3, 1).unwrap();
        let t = trace_profile(&curve, TraceMode::Force, Strategy::Auto, 1 << 20).unwrap();
        let poly = FactoredCharPoly::from_profile(&invert_multiplicities(&t).unwrap()).unwrap();
        let n = FactoredOrder::from_charpoly(&poly).unwrap();
        assert_eq!(n.value(), BigUint::from(4096u32));
        assert_eq!(n.factors, BTreeMap::from([(2, 12)]));
    }

    #[test]
    fn lagrange_and_witness_on_enumerated_model() {
        let f7 = make_extension(7, 1).unwrap();
        let m = HyperellipticModel::from_prime_coeffs(&f7, &[1, 3, 0, 0, 0, 1], 1).unwrap();
        let all = enumerate_jacobian(&m).unwrap();
        let n = small_order(all.len() as u64);
        for d in &all {
            assert!(mul_by_factored(&m, &n, d).is_identity());
        }
        for &(ell, _) in factor(all.len() as u64).iter() {
            let (e, trials) = find_order_ell_element(&m, &n, ell, 3, 0).unwrap();
            assert!(trials <= 3);
            assert!(!e.is_identity());
            assert!(m.scalar_mul_u64(ell, &e).is_identity());
        }
        let missing = (3..).step_by(2).find(|&l| crate::ffield::arith::is_prime(l) && all.len() as u64 % l != 0).unwrap();
        assert!(matches!(
            find_order_ell_element(&m, &n, missing, 3, 0),
            Err(JacobianError::EllDoesNotDivide { .. })
        ));
    }
}
