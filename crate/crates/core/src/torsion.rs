//! ℓ-ranks of `J(F_{p^2})` for the family `y^2 = x^(p^(2m)) - x`, exact where
//! the trace profile is computable and as an interval otherwise, plus the
//! quadratic-twist decomposition check at enumerable sizes.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::counting::{
    count_feasibility, make_curve, trace_profile, CountError, CurveInstance, FeasibilityPlan, Strategy,
    TraceMode, TraceProfile,
};
use crate::cyclo::{invert_multiplicities, solve_multiplicities_oracle, CycloError, MultiplicityProfile};
use crate::ffield::arith::{is_prime, multiplicative_order};
use crate::ffield::{make_extension, FieldError};
use crate::jacobian::enumerate::census_with_budget;
use crate::jacobian::{Census, HyperellipticModel, JacobianError};
use crate::lpoly::FactoredCharPoly;

/// Group orders above this many bits are not materialized.
pub const GROUP_ORDER_MAX_BITS: u64 = 1 << 16;

#[derive(Debug, Error)]
pub enum TorsionError {
    #[error("inadmissible parameters (p={p}, ell={ell}, m={m}): {clause}")]
    Inadmissible { p: u64, ell: u64, m: u64, clause: &'static str },
    #[error("exact rank needs counts beyond the budget at s = {infeasible:?}")]
    BudgetExceeded { infeasible: Vec<u64>, plan: FeasibilityPlan },
    #[error("rank routes disagree: a_d = {a_d}, M = {unity}, interval [{lo}, {hi}]")]
    CrossCheckFailed { a_d: BigUint, unity: BigUint, lo: BigUint, hi: BigUint },
    #[error("closed-form inversion and linear solve disagree")]
    InversionMismatch,
    #[error("v_ell(N) = {valuation} is below the rank {rank}")]
    ValuationBelowRank { valuation: BigUint, rank: BigUint },
    #[error("rank {rank} violates |2m rank - (q - 1)| <= (2m - 1)(sqrt q + 1)")]
    RatioBoundViolated { rank: BigUint },
    #[error("{c} is a square modulo {p}")]
    NotANonsquare { c: u64, p: u64 },
    #[error("twist decomposition fails: {r_p2} != {r_base} + {r_twist}")]
    DecompositionFailed { r_p2: u32, r_base: u32, r_twist: u32 },
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error(transparent)]
    Lpoly(#[from] crate::lpoly::LpolyError),
    #[error(transparent)]
    Jacobian(#[from] JacobianError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl TorsionError {
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            TorsionError::BudgetExceeded { .. }
                | TorsionError::Count(CountError::BudgetExceeded { .. })
                | TorsionError::Jacobian(JacobianError::BudgetExceeded { .. })
                | TorsionError::Field(FieldError::BudgetExceeded { .. })
        )
    }
}

/// Admissible `(p, ell, m)`, with `q = p^(2m)` over `F_{p^2}` and `d = ord_ell(p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyParams {
    pub p: u64,
    pub ell: u64,
    pub m: u64,
    pub q: BigUint,
    pub q0: u64,
    pub genus: BigUint,
    pub d: u64,
}

impl FamilyParams {
    pub fn curve(&self) -> CurveInstance {
        make_curve(self.p, self.m).expect("validated")
    }
}

pub fn validate_family(p: u64, ell: u64, m: u64) -> Result<FamilyParams, TorsionError> {
    let bad = |clause| TorsionError::Inadmissible { p, ell, m, clause };
    if p == 2 || !is_prime(p) {
        return Err(bad("p must be an odd prime"));
    }
    if ell == 2 || !is_prime(ell) {
        return Err(bad("ell must be an odd prime"));
    }
    if p == ell {
        return Err(bad("p must differ from ell"));
    }
    if m == 0 || m % (ell - 1) != 0 {
        return Err(bad("ell - 1 must divide m"));
    }
    if m.gcd(&ell) != 1 {
        return Err(bad("m must be coprime to ell"));
    }
    let d = multiplicative_order(p, ell).expect("p is a unit mod ell");
    debug_assert_eq!(m % d, 0);
    let curve = make_curve(p, m)?;
    Ok(FamilyParams {
        p,
        ell,
        m,
        q0: p * p,
        q: curve.q,
        genus: curve.genus,
        d,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankMode {
    Exact,
    Interval,
}

impl RankMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RankMode::Exact => "exact",
            RankMode::Interval => "interval",
        }
    }
}

/// Report-only ratios of the rank against the asymptotic references.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoremRatios {
    /// `g log_ell(p) / log_p(g)`; the bracket is `[ref, 2 ref]`.
    pub main_ref: f64,
    pub ratio_main: f64,
    /// `(q - 1)/(2m) log_ell(p^2)`.
    pub realmain1_ref: f64,
    pub ratio_realmain1: f64,
    /// `(q - 1)/(2m)`.
    pub plain_ref: f64,
    pub ratio_plain: f64,
    /// `(2m - 1)(sqrt q + 1)(2m)/(q - 1)`.
    pub epsilon: f64,
}

#[derive(Clone, Debug)]
pub struct RankReport {
    pub params: FamilyParams,
    pub mode: RankMode,
    pub traces: Option<TraceProfile>,
    pub profile: Option<MultiplicityProfile>,
    pub rank: Option<BigUint>,
    pub rank_lo: BigUint,
    pub rank_hi: BigUint,
    pub unity_multiplicity: Option<BigUint>,
    pub group_order: Option<BigUint>,
    pub order_valuation: Option<BigUint>,
    pub max_rank_lower: Option<BigUint>,
    pub ratios: Option<TheoremRatios>,
    pub plan: FeasibilityPlan,
}

fn interval_bounds(params: &FamilyParams) -> (BigUint, BigUint) {
    let q = BigInt::from(params.q.clone());
    let n = BigInt::from(2 * params.m);
    let root = BigInt::from(crate::cyclo::ceil_sqrt(&params.q));
    let slack = (&n - 1u32) * (root + 1u32);
    let lo_num = &q - 1u32 - &slack;
    let lo = if lo_num.is_positive() {
        lo_num.div_ceil(&n)
    } else {
        BigInt::zero()
    };
    let hi = (&q - 1u32 + &slack).div_floor(&n);
    (lo.to_biguint().unwrap(), hi.to_biguint().unwrap())
}

/// Bracket for the rank from the derived bound on `a_d`; valid at any size.
pub fn rank_interval(params: &FamilyParams, budget: u64) -> RankReport {
    let (rank_lo, rank_hi) = interval_bounds(params);
    RankReport {
        params: params.clone(),
        mode: RankMode::Interval,
        traces: None,
        profile: None,
        rank: None,
        rank_lo,
        rank_hi,
        unity_multiplicity: None,
        group_order: None,
        order_valuation: None,
        max_rank_lower: None,
        ratios: None,
        plan: count_feasibility(&params.curve(), budget),
    }
}

/// Exact rank `a_d`, confirmed against the unity multiplicity `M` modulo `ell`
/// and the interval.
pub fn rank_exact(
    params: &FamilyParams,
    mode: TraceMode,
    strategy: Strategy,
    budget: u64,
) -> Result<RankReport, TorsionError> {
    let curve = params.curve();
    let plan = count_feasibility(&curve, budget);
    if !plan.exact_feasible {
        return Err(TorsionError::BudgetExceeded {
            infeasible: plan.infeasible(),
            plan,
        });
    }
    let traces = trace_profile(&curve, mode, strategy, budget)?;
    let profile = invert_multiplicities(&traces)?;
    if solve_multiplicities_oracle(&traces)? != profile {
        return Err(TorsionError::InversionMismatch);
    }
    let rank = profile
        .get(params.d)
        .and_then(|a| a.to_biguint())
        .expect("d divides 2m and profiles are nonnegative");
    let poly = FactoredCharPoly::from_profile(&profile)?;
    let unity = poly.unity_multiplicity_mod_ell(params.ell);
    let (rank_lo, rank_hi) = interval_bounds(params);
    if rank != unity || rank < rank_lo || rank > rank_hi {
        return Err(TorsionError::CrossCheckFailed {
            a_d: rank,
            unity,
            lo: rank_lo,
            hi: rank_hi,
        });
    }
    let valuation = poly.order_valuation(params.ell);
    if valuation < rank {
        return Err(TorsionError::ValuationBelowRank { valuation, rank });
    }
    let ratios = theorem_ratios(params, &rank)?;
    Ok(RankReport {
        params: params.clone(),
        mode: RankMode::Exact,
        traces: Some(traces),
        group_order: poly.group_order(GROUP_ORDER_MAX_BITS),
        profile: Some(profile),
        max_rank_lower: Some((&rank + 1u32) >> 1),
        rank: Some(rank),
        rank_lo,
        rank_hi,
        unity_multiplicity: Some(unity),
        order_valuation: Some(valuation),
        ratios: Some(ratios),
        plan,
    })
}

/// Exact when within budget, otherwise the interval.
pub fn rank(params: &FamilyParams, mode: TraceMode, strategy: Strategy, budget: u64) -> Result<RankReport, TorsionError> {
    match rank_exact(params, mode, strategy, budget) {
        Err(e) if e.is_budget() => Ok(rank_interval(params, budget)),
        other => other,
    }
}

/// Natural log of a big integer.
fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Report-only ratios, except that `|2m rank - (q-1)| <= (2m-1)(sqrt q + 1)` is
/// checked exactly.
pub fn theorem_ratios(params: &FamilyParams, rank: &BigUint) -> Result<TheoremRatios, TorsionError> {
    let q = &params.q;
    let n = BigInt::from(2 * params.m);
    let root = BigInt::from(q.sqrt());
    let dev = (&n * BigInt::from(rank.clone()) - BigInt::from(q.clone()) + 1u32).abs();
    if dev > (&n - 1u32) * (&root + 1u32) {
        return Err(TorsionError::RatioBoundViolated { rank: rank.clone() });
    }
    let ln_p = (params.p as f64).ln();
    let ln_ell = (params.ell as f64).ln();
    let ln_g = big_ln(&params.genus);
    let ln_rank = big_ln(rank);
    let ln_qm1 = big_ln(&(q - 1u32));
    let ln_n = ((2 * params.m) as f64).ln();
    // g log_ell p / log_p g = g (ln p)^2 / (ln ell ln g)
    let ln_main = ln_g + 2.0 * ln_p.ln() - ln_ell.ln() - ln_g.ln();
    let ln_plain = ln_qm1 - ln_n;
    let ln_real = ln_plain + (2.0 * ln_p / ln_ell).ln();
    let ln_sqrt = big_ln(&root.to_biguint().unwrap());
    let ln_eps = ((2 * params.m - 1) as f64).ln() + ln_sqrt + (-ln_sqrt).exp().ln_1p() + ln_n - ln_qm1;
    Ok(TheoremRatios {
        main_ref: ln_main.exp(),
        ratio_main: (ln_rank - ln_main).exp(),
        realmain1_ref: ln_real.exp(),
        ratio_realmain1: (ln_rank - ln_real).exp(),
        plain_ref: ln_plain.exp(),
        ratio_plain: (ln_rank - ln_plain).exp(),
        epsilon: ln_eps.exp(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistReport {
    pub p: u64,
    pub ell: u64,
    pub c: u64,
    pub h: Vec<u64>,
    pub genus: usize,
    pub base: Census,
    pub twist: Census,
    pub over_p2: Census,
    /// `max(r_base, r_twist) >= ceil(r_p2 / 2)`.
    pub max_rank_lower: u32,
}

/// Censuses of `y^2 = h` over `F_p` and `F_{p^2}` and of `y^2 = c h` over `F_p`,
/// with `rank(F_{p^2}) = rank(F_p) + rank_twist(F_p)` asserted.
pub fn twist_decomposition_check(
    h: &[u64],
    p: u64,
    ell: u64,
    c: u64,
    budget: u64,
) -> Result<TwistReport, TorsionError> {
    let fp = make_extension(p, 1)?;
    if fp.quadratic_character(&fp.from_u64(c)) != -1 {
        return Err(TorsionError::NotANonsquare { c, p });
    }
    let fp2 = make_extension(p, 2)?;
    let base_model = HyperellipticModel::from_prime_coeffs(&fp, h, 1)?;
    let twist_model = HyperellipticModel::from_prime_coeffs(&fp, h, c)?;
    let p2_model = HyperellipticModel::from_prime_coeffs(&fp2, h, 1)?;
    let base = census_with_budget(&base_model, ell, budget)?;
    let twist = census_with_budget(&twist_model, ell, budget)?;
    let over_p2 = census_with_budget(&p2_model, ell, budget)?;
    if over_p2.rank != base.rank + twist.rank {
        return Err(TorsionError::DecompositionFailed {
            r_p2: over_p2.rank,
            r_base: base.rank,
            r_twist: twist.rank,
        });
    }
    let max_rank_lower = over_p2.rank.div_ceil(2);
    assert!(base.rank.max(twist.rank) >= max_rank_lower);
    Ok(TwistReport {
        p,
        ell,
        c,
        h: h.to_vec(),
        genus: base_model.genus(),
        base,
        twist,
        over_p2,
        max_rank_lower,
    })
}
