//! Point counts of `y^2 = x^q - x` by quadratic-character sums.
//!
//! Over a field `K` of characteristic `p` with `q = p^k`, the map
//! `L(x) = x^q - x` is `F_p`-linear, and
//! `#C(K) = 1 + |K| + sum_x chi(L(x))`.
//! The naive strategy visits every `x`; the linear strategy sums `chi` over the
//! image of `L` and multiplies by the kernel size.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::ffield::arith::{divisors, gcd, is_prime};
use crate::ffield::{big_pow, make_extension, FieldContext, FieldError, DEFAULT_ENUMERATION_BUDGET};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = 2 is not supported")]
    EvenPrime,
    #[error("m must be positive")]
    ZeroM,
    #[error("{}", budget_message(.s, .naive_cost, .linear_cost, .budget))]
    BudgetExceeded {
        s: Option<u64>,
        naive_cost: BigUint,
        linear_cost: BigUint,
        budget: u64,
    },
    #[error("t_2m = {got}, expected q - 1 = {expected}")]
    SignConventionViolated { got: BigInt, expected: BigInt },
    #[error("forced trace t_{s} = {forced} disagrees with counted value {counted}")]
    CrossCheckFailed { s: u64, forced: BigInt, counted: BigInt },
    #[error("field {field} does not have characteristic {p}")]
    CharacteristicMismatch { p: u64, field: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn budget_message(s: &Option<u64>, naive: &BigUint, linear: &BigUint, budget: &u64) -> String {
    let at = match s {
        Some(s) => format!(" at s = {s}"),
        None => String::new(),
    };
    format!("count{at} exceeds budget {budget} (naive cost {naive}, linear cost {linear})")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    Naive,
    Linear,
    #[default]
    Auto,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "naive" => Ok(Strategy::Naive),
            "linear" => Ok(Strategy::Linear),
            "auto" => Ok(Strategy::Auto),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Naive => "naive",
            Strategy::Linear => "linear",
            Strategy::Auto => "auto",
        })
    }
}

/// A member `y^2 = x^q - x`, `q = p^(2m)`, of the family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveInstance {
    pub p: u64,
    pub m: u64,
    pub q: BigUint,
    pub q0: BigUint,
    pub qstar: BigInt,
    pub genus: BigUint,
}

fn check_prime(p: u64) -> Result<(), CountError> {
    if p == 2 {
        return Err(CountError::EvenPrime);
    }
    if !is_prime(p) {
        return Err(CountError::NotPrime(p));
    }
    Ok(())
}

/// `(-1)^((q-1)/2) q`.
pub fn qstar(q: &BigUint) -> BigInt {
    if (q % 4u32) == BigUint::from(1u32) {
        BigInt::from(q.clone())
    } else {
        -BigInt::from(q.clone())
    }
}

pub fn make_curve(p: u64, m: u64) -> Result<CurveInstance, CountError> {
    check_prime(p)?;
    if m == 0 {
        return Err(CountError::ZeroM);
    }
    let q = big_pow(p, 2 * m);
    let q0 = big_pow(p, 2);
    assert_eq!(&q0 % 4u32, BigUint::from(1u32));
    let qs = qstar(&q);
    assert_eq!(qs, BigInt::from(q.clone()));
    let genus = (&q - 1u32) >> 1;
    Ok(CurveInstance {
        p,
        m,
        q,
        q0,
        qstar: qs,
        genus,
    })
}

impl CurveInstance {
    /// `p^s`, the square root of `q0^s`.
    pub fn sqrt_q0_pow(&self, s: u64) -> BigUint {
        big_pow(self.p, s)
    }

    /// The field `F_{q0^s}`.
    pub fn field(&self, s: u64) -> Result<FieldContext, CountError> {
        Ok(make_extension(self.p, 2 * s as usize)?)
    }

    /// `#C(F_{q0^s})`.
    pub fn count_over(&self, s: u64, strategy: Strategy, budget: u64) -> Result<BigUint, CountError> {
        let field = self.field(s)?;
        count_points(2 * self.m, &field, strategy, budget).map_err(|e| match e {
            CountError::BudgetExceeded {
                naive_cost,
                linear_cost,
                budget,
                ..
            } => CountError::BudgetExceeded {
                s: Some(s),
                naive_cost,
                linear_cost,
                budget,
            },
            other => other,
        })
    }
}

/// Rows `L(e_i)` of the linear map `x -> x^(p^k) - x` on the power basis.
fn linear_map_rows(field: &FieldContext, k: u64) -> Vec<Vec<u64>> {
    let n = field.degree();
    let m = field.prime_modulus();
    let mut rows = field.frobenius_power_matrix(k);
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = m.sub(row[i], 1);
    }
    debug_assert_eq!(rows.len(), n);
    rows
}

/// Row-reduced basis of the span of `rows` over `F_p`.
fn row_basis(field: &FieldContext, rows: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let m = field.prime_modulus();
    let n = field.degree();
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for (b, &piv) in basis.iter().zip(&pivots) {
            let c = v[piv];
            if c != 0 {
                for j in 0..n {
                    v[j] = m.sub(v[j], m.mul(c, b[j]));
                }
            }
        }
        if let Some(piv) = v.iter().position(|&x| x != 0) {
            let inv = m.inv(v[piv]).expect("nonzero pivot");
            v.iter_mut().for_each(|x| *x = m.mul(*x, inv));
            for (b, &bp) in basis.iter_mut().zip(&pivots) {
                let c = b[piv];
                if c != 0 {
                    for j in 0..n {
                        b[j] = m.sub(b[j], m.mul(c, v[j]));
                    }
                }
                debug_assert_eq!(b[bp], 1);
            }
            basis.push(v);
            pivots.push(piv);
        }
    }
    basis
}

/// `chi` on every element, indexed by lexicographic rank; built by marking squares.
pub(crate) fn character_table(field: &FieldContext) -> Vec<i8> {
    let card = field.cardinality_u64().expect("enumerable field") as usize;
    let n = field.degree();
    let p = field.characteristic();
    let mut table = vec![-1i8; card];
    table[0] = 0;
    let mut x = vec![0u64; n];
    let mut sq = vec![0u64; n];
    for _ in 1..card {
        advance(&mut x, p);
        field.mul_slices(&x, &x, &mut sq);
        table[field.index_of_slice(&sq) as usize] = 1;
    }
    table
}

/// Lexicographic successor in place (wraps to zero after the last element).
#[inline]
fn advance(x: &mut [u64], p: u64) {
    for k in (0..x.len()).rev() {
        x[k] += 1;
        if x[k] < p {
            return;
        }
        x[k] = 0;
    }
}

fn digits_of(mut index: u64, p: u64, n: usize) -> Vec<u64> {
    let mut v = vec![0; n];
    for i in (0..n).rev() {
        v[i] = index % p;
        index /= p;
    }
    v
}

fn chunk_ranges(total: u64) -> Vec<(u64, u64)> {
    let workers = rayon::current_num_threads() as u64;
    let pieces = (workers * 8).max(1);
    let size = total.div_ceil(pieces).max(4096);
    let mut out = Vec::new();
    let mut lo = 0;
    while lo < total {
        let hi = (lo + size).min(total);
        out.push((lo, hi));
        lo = hi;
    }
    out
}

/// `sum_{x in K} chi(L x)` by full enumeration. `gens[k]` is added to the
/// running image whenever digit `k` ticks, so `L x` is tracked incrementally.
fn enumerate_sum<F>(field: &FieldContext, gens: &[Vec<u64>], total: u64, chi: F) -> i64
where
    F: Fn(&[u64]) -> i64 + Sync,
{
    let p = field.characteristic();
    let n = field.degree();
    let r = gens.len();
    let m = field.prime_modulus();
    chunk_ranges(total)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut digits = digits_of(lo, p, r);
            let mut img = vec![0u64; n];
            for (i, &c) in digits.iter().enumerate() {
                for j in 0..n {
                    img[j] = m.add(img[j], m.mul(c, gens[i][j]));
                }
            }
            let mut sum = 0i64;
            for idx in lo..hi {
                sum += chi(&img);
                if idx + 1 == hi {
                    break;
                }
                let mut k = r - 1;
                loop {
                    digits[k] += 1;
                    for j in 0..n {
                        img[j] = m.add(img[j], gens[k][j]);
                    }
                    if digits[k] < p {
                        break;
                    }
                    digits[k] = 0;
                    k -= 1;
                }
            }
            sum
        })
        .sum()
}

/// Exact costs of the two strategies for `x -> x^(p^k) - x` on `field`.
pub fn strategy_costs(field: &FieldContext, k: u64) -> (BigUint, BigUint) {
    let n = field.degree() as u64;
    let p = field.characteristic();
    let linear_exp = n - gcd(k, n);
    (field.cardinality().clone(), big_pow(p, linear_exp))
}

/// `#C(K)` for `y^2 = x^(p^k) - x` over `field` (of characteristic `p`).
pub fn count_points(
    k: u64,
    field: &FieldContext,
    strategy: Strategy,
    budget: u64,
) -> Result<BigUint, CountError> {
    let card = field.cardinality().clone();
    let sum = character_sum(k, field, strategy, budget)?;
    let total = BigInt::from(card) + 1u32 + sum;
    Ok(total.to_biguint().expect("point count is nonnegative"))
}

/// `sum_{x in K} chi(x^(p^k) - x)`.
pub fn character_sum(
    k: u64,
    field: &FieldContext,
    strategy: Strategy,
    budget: u64,
) -> Result<BigInt, CountError> {
    let n = field.degree();
    let p = field.characteristic();
    let (naive_cost, linear_cost) = strategy_costs(field, k);
    let over = || CountError::BudgetExceeded {
        s: None,
        naive_cost: naive_cost.clone(),
        linear_cost: linear_cost.clone(),
        budget,
    };
    let budget_big = BigUint::from(budget);
    let naive_ok = naive_cost <= budget_big;
    let linear_ok = linear_cost <= budget_big;
    if k % n as u64 == 0 {
        // x^q = x on all of K.
        return Ok(BigInt::zero());
    }
    let use_linear = match strategy {
        Strategy::Naive if naive_ok => false,
        Strategy::Linear if linear_ok => true,
        Strategy::Auto if linear_ok && (!naive_ok || &linear_cost * n as u64 <= naive_cost) => true,
        Strategy::Auto if naive_ok => false,
        _ => return Err(over()),
    };
    let rows = linear_map_rows(field, k);
    if use_linear {
        let basis = row_basis(field, &rows);
        let r = basis.len();
        let image = big_pow(p, r as u64).to_u64().expect("within budget");
        let s = enumerate_sum(field, &basis, image, |h| field.chi_slice(h) as i64);
        let kernel = big_pow(p, (n - r) as u64);
        Ok(BigInt::from(kernel) * s)
    } else {
        let table = character_table(field);
        let total = naive_cost.to_u64().expect("within budget");
        let s = enumerate_sum(field, &rows, total, |h| table[field.index_of_slice(h) as usize] as i64);
        Ok(BigInt::from(s))
    }
}

/// Naive count with `chi` by exponentiation on every element; test oracle only.
pub fn count_points_by_exponentiation(k: u64, field: &FieldContext, budget: u64) -> Result<BigUint, CountError> {
    let mut sum = BigInt::zero();
    let j = k % field.degree() as u64;
    for x in field.enumerate_elements(budget)? {
        let v = field.sub(&field.frobenius_power(&x, j), &x);
        sum += field.quadratic_character(&v) as i64;
    }
    Ok((BigInt::from(field.cardinality().clone()) + 1u32 + sum)
        .to_biguint()
        .expect("nonnegative"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Forced,
    Counted,
    CrossChecked,
    Supplied,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Forced => "forced",
            Provenance::Counted => "counted",
            Provenance::CrossChecked => "cross_checked",
            Provenance::Supplied => "supplied",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum TraceMode {
    #[default]
    Force,
    Count,
    CrossCheck,
}

impl std::str::FromStr for TraceMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "force" => Ok(TraceMode::Force),
            "count" => Ok(TraceMode::Count),
            "cross_check" | "cross-check" => Ok(TraceMode::CrossCheck),
            other => Err(format!("unknown trace mode {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub value: BigInt,
    pub provenance: Provenance,
}

/// Normalized traces `t_s = (q0^s + 1 - #C(F_{q0^s})) / q0^(s/2)` for `s | 2m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceProfile {
    pub p: u64,
    pub m: u64,
    pub entries: BTreeMap<u64, TraceEntry>,
}

impl TraceProfile {
    /// A profile from explicit values (e.g. synthetic profiles in tests).
    pub fn from_values(p: u64, m: u64, values: BTreeMap<u64, BigInt>) -> Self {
        TraceProfile {
            p,
            m,
            entries: values
                .into_iter()
                .map(|(s, value)| {
                    (
                        s,
                        TraceEntry {
                            value,
                            provenance: Provenance::Supplied,
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn values(&self) -> BTreeMap<u64, BigInt> {
        self.entries.iter().map(|(&s, e)| (s, e.value.clone())).collect()
    }

    pub fn get(&self, s: u64) -> Option<&BigInt> {
        self.entries.get(&s).map(|e| &e.value)
    }

    /// Forced zeros, `t_2m = q - 1`, and `|t_s| < q0^(s/2) + 1` for `s != 2m`.
    pub fn invariants_hold(&self) -> bool {
        let n = 2 * self.m;
        let q = BigInt::from(big_pow(self.p, n));
        self.entries.iter().all(|(&s, e)| {
            if s == n {
                e.value == &q - 1u32
            } else if self.m % s == 0 {
                e.value.is_zero()
            } else {
                e.value.magnitude() < &(big_pow(self.p, s) + 1u32)
            }
        })
    }
}

/// `t_s` from a point count over `F_{q0^s}`.
pub fn normalized_trace(curve: &CurveInstance, s: u64, count: &BigUint) -> BigInt {
    let field_size = BigInt::from(big_pow(curve.p, 2 * s));
    let num = field_size + 1u32 - BigInt::from(count.clone());
    let den = BigInt::from(curve.sqrt_q0_pow(s));
    let (t, rem) = num.div_rem(&den);
    assert!(rem.is_zero(), "trace numerator divisible by q0^(s/2)");
    t
}

fn forced_value(curve: &CurveInstance, s: u64) -> Option<BigInt> {
    if s == 2 * curve.m {
        Some(BigInt::from(curve.q.clone()) - 1)
    } else if curve.m % s == 0 {
        Some(BigInt::zero())
    } else {
        None
    }
}

pub fn trace_profile(
    curve: &CurveInstance,
    mode: TraceMode,
    strategy: Strategy,
    budget: u64,
) -> Result<TraceProfile, CountError> {
    let n = 2 * curve.m;
    let mut entries = BTreeMap::new();
    for s in divisors(n) {
        let forced = forced_value(curve, s);
        let entry = match (mode, forced) {
            (TraceMode::Force, Some(value)) => TraceEntry {
                value,
                provenance: Provenance::Forced,
            },
            (TraceMode::CrossCheck, Some(value)) => match curve.count_over(s, strategy, budget) {
                Ok(count) => {
                    let counted = normalized_trace(curve, s, &count);
                    if counted != value {
                        return Err(CountError::CrossCheckFailed {
                            s,
                            forced: value,
                            counted,
                        });
                    }
                    TraceEntry {
                        value,
                        provenance: Provenance::CrossChecked,
                    }
                }
                Err(CountError::BudgetExceeded { .. }) => TraceEntry {
                    value,
                    provenance: Provenance::Forced,
                },
                Err(e) => return Err(e),
            },
            _ => {
                let count = curve.count_over(s, strategy, budget)?;
                TraceEntry {
                    value: normalized_trace(curve, s, &count),
                    provenance: Provenance::Counted,
                }
            }
        };
        entries.insert(s, entry);
    }
    let expected = BigInt::from(curve.q.clone()) - 1;
    let top = &entries[&n].value;
    if *top != expected {
        return Err(CountError::SignConventionViolated {
            got: top.clone(),
            expected,
        });
    }
    Ok(TraceProfile {
        p: curve.p,
        m: curve.m,
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityRow {
    pub s: u64,
    pub forced: bool,
    pub naive_cost: BigUint,
    pub linear_cost: BigUint,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityPlan {
    pub budget: u64,
    pub rows: Vec<FeasibilityRow>,
    /// All non-forced `s` are countable within budget.
    pub exact_feasible: bool,
}

impl FeasibilityPlan {
    pub fn infeasible(&self) -> Vec<u64> {
        self.rows.iter().filter(|r| !r.feasible).map(|r| r.s).collect()
    }
}

pub fn count_feasibility(curve: &CurveInstance, budget: u64) -> FeasibilityPlan {
    let n = 2 * curve.m;
    let b = BigUint::from(budget);
    let rows: Vec<FeasibilityRow> = divisors(n)
        .into_iter()
        .map(|s| {
            let forced = forced_value(curve, s).is_some();
            let naive_cost = big_pow(curve.p, 2 * s);
            let linear_cost = big_pow(curve.p, 2 * s - gcd(n, 2 * s));
            let feasible = forced || naive_cost <= b || linear_cost <= b;
            FeasibilityRow {
                s,
                forced,
                naive_cost,
                linear_cost,
                feasible,
            }
        })
        .collect();
    let exact_feasible = rows.iter().all(|r| r.feasible);
    FeasibilityPlan {
        budget,
        rows,
        exact_feasible,
    }
}

/// Counts of `y^2 = x^q - x`, `q = p^k`, over `F_{q^s}` for `s = 1..=max_s`.
pub fn small_instance_counts(
    p: u64,
    k: u64,
    max_s: u64,
    strategy: Strategy,
    budget: u64,
) -> Result<Vec<BigUint>, CountError> {
    check_prime(p)?;
    (1..=max_s)
        .map(|s| {
            let field = make_extension(p, (k * s) as usize)?;
            count_points(k, &field, strategy, budget)
        })
        .collect()
}

pub fn default_budget() -> u64 {
    DEFAULT_ENUMERATION_BUDGET
}

#[cfg(test)]
mod tests {
    use super::Strategy;
    use super::*;
    use proptest::prelude::*;

    const B: u64 = DEFAULT_ENUMERATION_BUDGET;

    #[test]
    fn curve_fields() {
        let c = make_curve(3, 1).unwrap();
        assert_eq!(c.q, BigUint::from(9u32));
        assert_eq!(c.q0, BigUint::from(9u32));
        assert_eq!(c.qstar, BigInt::from(9));
        assert_eq!(c.genus, BigUint::from(4u32));
        let c = make_curve(5, 2).unwrap();
        assert_eq!(c.q, BigUint::from(625u32));
        assert_eq!(c.genus, BigUint::from(312u32));
        let c = make_curve(5, 10).unwrap();
        assert_eq!(c.genus, (big_pow(5, 20) - 1u32) / 2u32);
        assert_eq!(make_curve(2, 1), Err(CountError::EvenPrime));
        assert_eq!(make_curve(9, 1), Err(CountError::NotPrime(9)));
    }

    #[test]
    fn small_count_examples() {
        let f3 = make_extension(3, 1).unwrap();
        let f9 = make_extension(3, 2).unwrap();
        let f25 = make_extension(5, 2).unwrap();
        for strategy in [Strategy::Naive, Strategy::Linear, Strategy::Auto] {
            assert_eq!(count_points(1, &f3, strategy, B).unwrap(), BigUint::from(4u32));
            assert_eq!(count_points(1, &f9, strategy, B).unwrap(), BigUint::from(16u32));
            assert_eq!(count_points(1, &f25, strategy, B).unwrap(), BigUint::from(6u32));
        }
    }

    #[test]
    fn strategies_agree_with_exponentiation_oracle() {
        for p in [3u64, 5, 7] {
            for k in 1..=6u64 {
                for n in 1..=10usize {
                    let field = make_extension(p, n).unwrap();
                    if field.cardinality_u64().unwrap() > 60_000 {
                        continue;
                    }
                    let naive = count_points(k, &field, Strategy::Naive, B).unwrap();
                    let linear = count_points(k, &field, Strategy::Linear, B).unwrap();
                    assert_eq!(naive, linear, "p={p} k={k} n={n}");
                    if field.cardinality_u64().unwrap() <= 3000 {
                        assert_eq!(naive, count_points_by_exponentiation(k, &field, B).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn character_table_matches_exponent() {
        let field = make_extension(3, 5).unwrap();
        let table = character_table(&field);
        for (i, e) in field.enumerate_elements(B).unwrap().enumerate() {
            assert_eq!(table[i], field.quadratic_character(&e));
        }
    }

    #[test]
    fn profile_examples() {
        let c = make_curve(3, 1).unwrap();
        let t = trace_profile(&c, TraceMode::Count, Strategy::Naive, B).unwrap();
        assert_eq!(t.get(1), Some(&BigInt::zero()));
        assert_eq!(t.get(2), Some(&BigInt::from(8)));
        assert!(t.invariants_hold());

        let c = make_curve(3, 2).unwrap();
        let t = trace_profile(&c, TraceMode::CrossCheck, Strategy::Auto, B).unwrap();
        assert_eq!(t.get(4), Some(&BigInt::from(80)));
        for s in [1, 2, 4] {
            assert_eq!(t.entries[&s].provenance, Provenance::CrossChecked);
        }
    }

    #[test]
    fn large_family_member_counts_only_one_divisor() {
        let c = make_curve(5, 10).unwrap();
        let t = trace_profile(&c, TraceMode::Force, Strategy::Linear, B).unwrap();
        let counted: Vec<u64> = t
            .entries
            .iter()
            .filter(|(_, e)| e.provenance == Provenance::Counted)
            .map(|(&s, _)| s)
            .collect();
        assert_eq!(counted, vec![4]);
        assert!(t.invariants_hold());
        let field = c.field(4).unwrap();
        let (naive, linear) = strategy_costs(&field, 20);
        assert_eq!(naive, BigUint::from(390625u32));
        assert_eq!(linear, BigUint::from(625u32));
    }

    #[test]
    fn feasibility_examples() {
        let plan = count_feasibility(&make_curve(5, 2).unwrap(), 10_000_000);
        assert!(plan.exact_feasible);
        let s4 = plan.rows.iter().find(|r| r.s == 4).unwrap();
        assert_eq!(s4.naive_cost, BigUint::from(390625u32));

        let plan = count_feasibility(&make_curve(5, 10).unwrap(), 10_000_000);
        assert!(plan.exact_feasible);
        let forced: Vec<u64> = plan.rows.iter().filter(|r| r.forced).map(|r| r.s).collect();
        assert_eq!(forced, vec![1, 2, 5, 10, 20]);
        let s4 = plan.rows.iter().find(|r| r.s == 4).unwrap();
        assert_eq!(s4.linear_cost, BigUint::from(625u32));

        // s = 8 for (7, 12) costs 7^8 by the linear route.
        let plan = count_feasibility(&make_curve(7, 12).unwrap(), 1_000_000);
        assert!(!plan.exact_feasible);
        assert_eq!(plan.infeasible(), vec![8]);
    }

    #[test]
    fn budget_error_names_s() {
        let c = make_curve(5, 2).unwrap();
        let err = trace_profile(&c, TraceMode::Count, Strategy::Naive, 1000).unwrap_err();
        assert!(matches!(err, CountError::BudgetExceeded { s: Some(_), .. }));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn weil_bound(p_idx in 0usize..3, k in 1u64..5, n in 1usize..7) {
            let p = [3u64, 5, 7][p_idx];
            let field = make_extension(p, n).unwrap();
            prop_assume!(field.cardinality_u64().unwrap() <= 200_000);
            let count = BigInt::from(count_points(k, &field, Strategy::Auto, B).unwrap());
            let card = BigInt::from(field.cardinality().clone());
            let g = (BigInt::from(big_pow(p, k)) - 1u32) / 2u32;
            let dev = (count - &card - 1i32).magnitude().clone();
            // (2g)^2 |K| bounds dev^2.
            let bound = BigUint::from(4u32) * g.magnitude() * g.magnitude() * card.magnitude();
            prop_assert!(&dev * &dev <= bound);
        }
    }
}
