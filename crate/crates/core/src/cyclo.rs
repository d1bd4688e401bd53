//! Power sums of primitive roots of unity and the inversion that recovers
//! eigenvalue multiplicities from normalized traces.
//!
//! `f(d, s)` is the sum of `x^s` over the primitive `d`-th roots of unity.
//! For `n = 2m`, the traces satisfy `t_s = sum_{d | n} a_d f(d, s)` and the
//! coefficients `c_s(d)` invert this system up to a factor of `n`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::counting::TraceProfile;
use crate::ffield::arith::{divisors, euler_phi, factor, gcd, is_prime, moebius, valuation};
use crate::ffield::big_pow;

/// Largest `d` the Möbius oracle will process.
pub const ORACLE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{s} does not divide {n}")]
    NotDivisor { n: u64, s: u64 },
    #[error("oracle input {0} exceeds the divisor budget")]
    BudgetExceeded(u64),
    #[error("trace profile has no entry for s = {0}")]
    IncompleteProfile(u64),
    #[error("a_{d} is not an integer")]
    NonIntegral { d: u64 },
    #[error("a_{d} = {value} is negative")]
    Negative { d: u64, value: BigInt },
    #[error("sum of a_d phi(d) is {got}, expected {expected}")]
    SumMismatch { got: BigInt, expected: BigInt },
    #[error("trace system is singular")]
    SingularSystem,
    #[error("derived bound violated at d = {d}")]
    DerivedBoundViolated { d: u64 },
}

/// `f(r^a, r^b)` for a prime `r`.
pub fn f_prime_power(r: u64, a: u32, b: u32) -> Result<i64, CycloError> {
    if !is_prime(r) {
        return Err(CycloError::NotPrime(r));
    }
    Ok(f_prime_power_unchecked(r, a, b))
}

fn f_prime_power_unchecked(r: u64, a: u32, b: u32) -> i64 {
    if a == 0 {
        1
    } else if a > b + 1 {
        0
    } else if a == b + 1 {
        -(r.pow(a - 1) as i64)
    } else {
        ((r - 1) * r.pow(a - 1)) as i64
    }
}

/// `f(d, s)` assembled multiplicatively from the prime-power table.
pub fn f_value(d: u64, s: u64) -> i64 {
    assert!(d > 0 && s > 0);
    let mut acc = 1i64;
    for (r, a) in factor(d) {
        let b = valuation(s, r);
        let v = f_prime_power_unchecked(r, a, b);
        if v == 0 {
            return 0;
        }
        acc *= v;
    }
    acc
}

/// Independent evaluation by inclusion-exclusion over all roots of unity.
pub fn f_oracle(d: u64, s: u64) -> Result<i64, CycloError> {
    if d > ORACLE_LIMIT {
        return Err(CycloError::BudgetExceeded(d));
    }
    let mut total = 0i64;
    for e in 1..=d {
        if d % e != 0 || s % e != 0 {
            continue;
        }
        total += moebius(d / e) * e as i64;
    }
    Ok(total)
}

/// Left side of the prime-power orthogonality relation; equals `r^k` when
/// `d = e` and `0` otherwise.
pub fn pinversion_check(r: u64, k: u32, d: u32, e: u32) -> Result<i64, CycloError> {
    if !is_prime(r) {
        return Err(CycloError::NotPrime(r));
    }
    let mut sum = 0i64;
    for i in 0..=k {
        sum += f_prime_power_unchecked(r, d, i) * f_prime_power_unchecked(r, k - i, k - e);
    }
    Ok(sum)
}

/// Inversion coefficient `c_s(d)` for divisors `s, d` of `n`.
pub fn c_coeff(n: u64, s: u64, d: u64) -> Result<i64, CycloError> {
    for x in [s, d] {
        if x == 0 || n % x != 0 {
            return Err(CycloError::NotDivisor { n, s: x });
        }
    }
    let mut acc = 1i64;
    for (r, k) in factor(n) {
        let rk = r.pow(k);
        acc *= f_value(rk / gcd(s, rk), rk / gcd(d, rk));
        if acc == 0 {
            break;
        }
    }
    Ok(acc)
}

/// Precomputed `f(d, s)` and `c_s(d)` over the divisors of `n`.
#[derive(Clone, Debug)]
pub struct CyclotomicTable {
    pub n: u64,
    pub divisors: Vec<u64>,
    f: BTreeMap<(u64, u64), i64>,
    c: BTreeMap<(u64, u64), i64>,
}

impl CyclotomicTable {
    pub fn new(n: u64) -> Self {
        let divs = divisors(n);
        let mut f = BTreeMap::new();
        let mut c = BTreeMap::new();
        for &d in &divs {
            for &s in &divs {
                f.insert((d, s), f_value(d, s));
                c.insert((s, d), c_coeff(n, s, d).expect("divisors of n"));
            }
        }
        CyclotomicTable {
            n,
            divisors: divs,
            f,
            c,
        }
    }

    pub fn f(&self, d: u64, s: u64) -> i64 {
        self.f[&(d, s)]
    }

    pub fn c(&self, s: u64, d: u64) -> i64 {
        self.c[&(s, d)]
    }

    /// `t_s = sum_d a_d f(d, s)` for every `s | n`.
    pub fn forward(&self, a: &BTreeMap<u64, BigInt>) -> BTreeMap<u64, BigInt> {
        self.divisors
            .iter()
            .map(|&s| {
                let t = self
                    .divisors
                    .iter()
                    .fold(BigInt::zero(), |acc, &d| acc + &a[&d] * self.f(d, s));
                (s, t)
            })
            .collect()
    }

    /// Closed-form inversion `a_d = (1/n) sum_s c_s(d) t_s`, checking integrality.
    pub fn invert(&self, t: &BTreeMap<u64, BigInt>) -> Result<BTreeMap<u64, BigInt>, CycloError> {
        let n = BigInt::from(self.n);
        let mut out = BTreeMap::new();
        for &d in &self.divisors {
            let mut sum = BigInt::zero();
            for &s in &self.divisors {
                let ts = t.get(&s).ok_or(CycloError::IncompleteProfile(s))?;
                sum += ts * self.c(s, d);
            }
            let (quo, rem) = sum.div_rem(&n);
            if !rem.is_zero() {
                return Err(CycloError::NonIntegral { d });
            }
            out.insert(d, quo);
        }
        Ok(out)
    }

    /// Exact Gaussian elimination on the system `A[s][d] = f(d, s)`.
    pub fn solve(&self, t: &BTreeMap<u64, BigInt>) -> Result<BTreeMap<u64, BigInt>, CycloError> {
        let k = self.divisors.len();
        let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(k);
        for &s in &self.divisors {
            let ts = t.get(&s).ok_or(CycloError::IncompleteProfile(s))?;
            let mut row: Vec<BigRational> = self
                .divisors
                .iter()
                .map(|&d| BigRational::from_integer(BigInt::from(self.f(d, s))))
                .collect();
            row.push(BigRational::from_integer(ts.clone()));
            rows.push(row);
        }
        for col in 0..k {
            let pivot = (col..k)
                .find(|&r| !rows[r][col].is_zero())
                .ok_or(CycloError::SingularSystem)?;
            rows.swap(col, pivot);
            let inv = rows[col][col].recip();
            for x in rows[col].iter_mut() {
                *x = &*x * &inv;
            }
            for r in 0..k {
                if r == col || rows[r][col].is_zero() {
                    continue;
                }
                let factor = rows[r][col].clone();
                for j in col..=k {
                    let delta = &rows[col][j] * &factor;
                    rows[r][j] -= delta;
                }
            }
        }
        let mut out = BTreeMap::new();
        for (i, &d) in self.divisors.iter().enumerate() {
            let v = &rows[i][k];
            if !v.is_integer() {
                return Err(CycloError::NonIntegral { d });
            }
            out.insert(d, v.to_integer());
        }
        Ok(out)
    }
}

/// Eigenvalue multiplicities: `a_d` copies of `sqrt(q0)` times each primitive
/// `d`-th root of unity, for `d | 2m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityProfile {
    pub p: u64,
    pub m: u64,
    pub a: BTreeMap<u64, BigInt>,
}

impl MultiplicityProfile {
    pub fn q(&self) -> BigUint {
        big_pow(self.p, 2 * self.m)
    }

    pub fn get(&self, d: u64) -> Option<&BigInt> {
        self.a.get(&d)
    }

    /// `sum a_d phi(d)`, which equals `2g = q - 1`.
    pub fn weighted_sum(&self) -> BigInt {
        self.a
            .iter()
            .fold(BigInt::zero(), |acc, (&d, a)| acc + a * euler_phi(d))
    }
}

fn validate(p: u64, m: u64, a: BTreeMap<u64, BigInt>) -> Result<MultiplicityProfile, CycloError> {
    for (&d, v) in &a {
        if v.is_negative() {
            return Err(CycloError::Negative { d, value: v.clone() });
        }
    }
    let profile = MultiplicityProfile { p, m, a };
    let expected = BigInt::from(profile.q()) - 1u32;
    let got = profile.weighted_sum();
    if got != expected {
        return Err(CycloError::SumMismatch { got, expected });
    }
    Ok(profile)
}

/// Closed-form recovery of `a_d` from a complete trace profile.
pub fn invert_multiplicities(t: &TraceProfile) -> Result<MultiplicityProfile, CycloError> {
    let table = CyclotomicTable::new(2 * t.m);
    let a = table.invert(&t.values())?;
    validate(t.p, t.m, a)
}

/// Recovery by a direct rational linear solve, used as a cross-check.
pub fn solve_multiplicities_oracle(t: &TraceProfile) -> Result<MultiplicityProfile, CycloError> {
    let table = CyclotomicTable::new(2 * t.m);
    let a = table.solve(&t.values())?;
    validate(t.p, t.m, a)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundRow {
    pub d: u64,
    pub a_d: BigInt,
    pub derived_lhs: BigInt,
    pub derived_rhs: BigInt,
    pub derived_holds: bool,
    pub literal_lhs: BigInt,
    pub literal_rhs: BigInt,
    pub literal_holds: bool,
}

/// Ceiling of the square root.
pub fn ceil_sqrt(x: &BigUint) -> BigUint {
    let r = x.sqrt();
    if &r * &r == *x {
        r
    } else {
        r + 1u32
    }
}

/// Evaluate the distance of each `n a_d` from `q - 1`. The `2m`-normalized
/// bound is an error if violated; the `m`-normalized variant is only recorded.
pub fn adappears_check(profile: &MultiplicityProfile) -> Result<Vec<BoundRow>, CycloError> {
    let q = BigInt::from(profile.q());
    let root = BigInt::from(ceil_sqrt(&profile.q()));
    let m = BigInt::from(profile.m);
    let n = BigInt::from(2 * profile.m);
    let mut rows = Vec::new();
    for (&d, a) in &profile.a {
        let derived_lhs = (&n * a - (&q - 1u32)).abs();
        let derived_rhs = (&n - 1u32) * (&root + 1u32);
        let literal_lhs = (&m * a - (&q - 1u32)).abs();
        let literal_rhs = (&m - 1u32) * (&root + 1u32);
        let row = BoundRow {
            d,
            a_d: a.clone(),
            derived_holds: derived_lhs <= derived_rhs,
            literal_holds: literal_lhs <= literal_rhs,
            derived_lhs,
            derived_rhs,
            literal_lhs,
            literal_rhs,
        };
        if !row.derived_holds {
            return Err(CycloError::DerivedBoundViolated { d });
        }
        rows.push(row);
    }
    Ok(rows)
}

/// `r^k` as `i64`; convenience for checks.
pub fn int_pow(r: u64, k: u32) -> i64 {
    (BigInt::from(r).pow(k)).try_into().expect("fits in i64")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::TraceProfile;
    use proptest::prelude::*;

    fn profile(p: u64, m: u64, t: &[(u64, i64)]) -> TraceProfile {
        TraceProfile::from_values(p, m, t.iter().map(|&(s, v)| (s, BigInt::from(v))).collect())
    }

    #[test]
    fn prime_power_table() {
        assert_eq!(f_prime_power(2, 0, 5), Ok(1));
        assert_eq!(f_prime_power(2, 2, 1), Ok(-2));
        assert_eq!(f_prime_power(3, 1, 1), Ok(2));
        assert_eq!(f_prime_power(4, 1, 1), Err(CycloError::NotPrime(4)));
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_value(6, 3), -2);
        assert_eq!(f_value(4, 2), -2);
        assert_eq!(f_value(12, 12), 4);
        assert_eq!(f_oracle(1, 7), Ok(1));
        assert_eq!(f_oracle(4, 2), Ok(-2));
        assert_eq!(f_oracle(9, 3), Ok(-3));
    }

    #[test]
    fn f_matches_oracle_exhaustively() {
        for d in 1..=400u64 {
            for s in 1..=400u64 {
                assert_eq!(f_value(d, s), f_oracle(d, s).unwrap(), "d={d} s={s}");
            }
        }
    }

    #[test]
    fn table_invariants() {
        for n in [2u64, 4, 6, 8, 12, 20, 36] {
            let t = CyclotomicTable::new(n);
            for &d in &t.divisors {
                assert_eq!(t.f(d, n), euler_phi(d) as i64);
                assert_eq!(t.c(n, d), 1);
                for &s in &t.divisors {
                    assert!(t.f(d, s).unsigned_abs() <= euler_phi(d));
                    assert_eq!(t.f(1, s), 1);
                }
            }
        }
    }

    #[test]
    fn pinversion_examples_and_exhaustive() {
        assert_eq!(pinversion_check(2, 1, 0, 0), Ok(2));
        assert_eq!(pinversion_check(3, 2, 1, 2), Ok(0));
        assert_eq!(pinversion_check(5, 3, 2, 2), Ok(125));
        for r in [2u64, 3, 5, 7] {
            for k in 1..=4u32 {
                for d in 0..=k {
                    for e in 0..=k {
                        let expected = if d == e { int_pow(r, k) } else { 0 };
                        assert_eq!(pinversion_check(r, k, d, e), Ok(expected));
                    }
                }
            }
        }
    }

    #[test]
    fn c_examples() {
        for d in [1, 2, 4] {
            assert_eq!(c_coeff(4, 4, d), Ok(1));
        }
        assert_eq!(c_coeff(4, 2, 4), Ok(-1));
        assert_eq!(c_coeff(12, 6, 12), Ok(-1));
        assert!(matches!(c_coeff(12, 5, 1), Err(CycloError::NotDivisor { .. })));
    }

    #[test]
    fn orthogonality() {
        for n in [2u64, 4, 6, 8, 12, 20] {
            let t = CyclotomicTable::new(n);
            for &d in &t.divisors {
                for &d2 in &t.divisors {
                    let sum: i64 = t.divisors.iter().map(|&s| t.c(s, d) * t.f(d2, s)).sum();
                    assert_eq!(sum, if d == d2 { n as i64 } else { 0 });
                }
            }
        }
    }

    #[test]
    fn inversion_examples() {
        let cases = [
            (3u64, 1u64, vec![(1, 0), (2, 8)], vec![(1, 4), (2, 4)]),
            (3, 2, vec![(1, 0), (2, 0), (4, 80)], vec![(1, 20), (2, 20), (4, 20)]),
            (5, 2, vec![(1, 0), (2, 0), (4, 624)], vec![(1, 156), (2, 156), (4, 156)]),
        ];
        for (p, m, t, expected) in cases {
            let tp = profile(p, m, &t);
            let a = invert_multiplicities(&tp).unwrap();
            let expected: BTreeMap<u64, BigInt> =
                expected.into_iter().map(|(d, v)| (d, BigInt::from(v))).collect();
            assert_eq!(a.a, expected);
            assert_eq!(solve_multiplicities_oracle(&tp).unwrap(), a);
        }
    }

    #[test]
    fn bound_rows() {
        let tp = profile(3, 2, &[(1, 0), (2, 0), (4, 80)]);
        let a = invert_multiplicities(&tp).unwrap();
        let rows = adappears_check(&a).unwrap();
        let r4 = rows.iter().find(|r| r.d == 4).unwrap();
        assert_eq!(r4.derived_lhs, BigInt::zero());
        assert_eq!(r4.derived_rhs, BigInt::from(30));
        assert_eq!(r4.literal_lhs, BigInt::from(40));
        assert_eq!(r4.literal_rhs, BigInt::from(10));
        assert!(!r4.literal_holds);
    }

    #[test]
    fn invalid_profiles_rejected() {
        let tp = profile(3, 1, &[(1, 1), (2, 8)]);
        assert!(matches!(
            invert_multiplicities(&tp),
            Err(CycloError::NonIntegral { .. })
        ));
        let tp = profile(3, 1, &[(1, 10), (2, 0)]);
        assert!(matches!(invert_multiplicities(&tp), Err(CycloError::Negative { .. })));
    }

    proptest! {
        #[test]
        fn round_trip(n_idx in 0usize..5, seed in proptest::collection::vec(0u64..1_000_000, 12)) {
            let n = [2u64, 4, 8, 12, 20][n_idx];
            let t = CyclotomicTable::new(n);
            let a: BTreeMap<u64, BigInt> = t
                .divisors
                .iter()
                .zip(seed)
                .map(|(&d, v)| (d, BigInt::from(v)))
                .collect();
            let traces = t.forward(&a);
            prop_assert_eq!(t.invert(&traces).unwrap(), a.clone());
            prop_assert_eq!(t.solve(&traces).unwrap(), a);
        }
    }
}
