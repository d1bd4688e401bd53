//! Exhaustive enumeration of reduced Mumford pairs at tiny sizes.
//!
//! For each monic `u = prod pi^e` of degree at most `g` the admissible `v` are
//! assembled by CRT from the local solutions of `v^2 = F mod pi^e`: two Hensel
//! lifts of `+-sqrt(F)` when `pi` does not divide `F`, and `v = 0` when it does
//! and `e = 1`.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::ring::{is_irreducible, ExtRing};
use super::{HyperellipticModel, JacobianError, MumfordDivisor};
use crate::ffield::poly::FieldPoly;
use crate::ffield::{make_extension, FieldContext};

/// Cap on `sum_{k <= g} |K|^k` for enumeration.
pub const ENUMERATION_BUDGET: u64 = 1_000_000;

fn candidate_count(ctx: &FieldContext, g: usize) -> BigUint {
    (0..=g as u32).map(|k| ctx.cardinality().pow(k)).sum()
}

fn check_budget(model: &HyperellipticModel, budget: u64) -> Result<(), JacobianError> {
    let needed = candidate_count(model.field(), model.genus());
    if needed > BigUint::from(budget) {
        return Err(JacobianError::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// All monic polynomials of degree `k`, in index order.
fn monic_of_degree(ctx: &FieldContext, k: usize) -> impl Iterator<Item = FieldPoly> + '_ {
    let size = ctx.cardinality_u64().expect("small field");
    let total = size.pow(k as u32);
    (0..total).map(move |mut idx| {
        let mut coeffs = Vec::with_capacity(k + 1);
        for _ in 0..k {
            coeffs.push(ctx.element_at(idx % size).expect("in range"));
            idx /= size;
        }
        coeffs.push(ctx.one());
        FieldPoly::from_elements(ctx, &coeffs)
    })
}

/// Monic irreducibles of degree at most `g`.
pub fn monic_irreducibles(ctx: &FieldContext, g: usize) -> Vec<FieldPoly> {
    (1..=g)
        .flat_map(|k| monic_of_degree(ctx, k).filter(|f| is_irreducible(ctx, f)).collect::<Vec<_>>())
        .collect()
}

/// Solutions `v mod pi^e` of `v^2 = F`.
fn local_solutions(model: &HyperellipticModel, pi: &FieldPoly, e: usize) -> Vec<FieldPoly> {
    let ctx = model.field();
    let f = model.f();
    let f_mod = f.rem(ctx, pi);
    if f_mod.is_zero() {
        return if e == 1 { vec![FieldPoly::zero(ctx)] } else { Vec::new() };
    }
    let ring = ExtRing::new(ctx, pi.clone());
    let Some(r) = ring.sqrt(&f_mod) else {
        return Vec::new();
    };
    let modulus = (1..e).fold(pi.clone(), |acc, _| acc.mul(ctx, pi));
    let two = ctx.from_u64(2);
    let lift = |mut v: FieldPoly| {
        // Newton: v <- v - (v^2 - F) / (2v) mod pi^e; precision doubles each step.
        let mut prec = 1;
        while prec < e {
            let num = v.square(ctx).sub(ctx, f).rem(ctx, &modulus);
            let den = v.scale(ctx, &two).inv_mod(ctx, &modulus).expect("v is a unit");
            v = v.sub(ctx, &num.mulmod(ctx, &den, &modulus)).rem(ctx, &modulus);
            prec *= 2;
        }
        v
    };
    let neg = r.neg(ctx);
    vec![lift(r), lift(neg)]
}

/// Every class of `J(K)`, each exactly once.
pub fn enumerate_jacobian(model: &HyperellipticModel) -> Result<Vec<MumfordDivisor>, JacobianError> {
    enumerate_with_budget(model, ENUMERATION_BUDGET)
}

pub fn enumerate_with_budget(
    model: &HyperellipticModel,
    budget: u64,
) -> Result<Vec<MumfordDivisor>, JacobianError> {
    check_budget(model, budget)?;
    let ctx = model.field();
    let g = model.genus();
    let irreducibles = monic_irreducibles(ctx, g);
    let mut out = vec![model.identity()];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    extend_multisets(model, &irreducibles, 0, g, &mut stack, &mut out);
    Ok(out)
}

/// Recurse over multisets `prod pi_i^e_i` (indices nondecreasing) of total degree `<= budget_deg`.
fn extend_multisets(
    model: &HyperellipticModel,
    irr: &[FieldPoly],
    start: usize,
    budget_deg: usize,
    stack: &mut Vec<(usize, usize)>,
    out: &mut Vec<MumfordDivisor>,
) {
    for i in start..irr.len() {
        let d = irr[i].degree().unwrap();
        let mut e = 1;
        while e * d <= budget_deg {
            stack.push((i, e));
            emit(model, irr, stack, out);
            extend_multisets(model, irr, i + 1, budget_deg - e * d, stack, out);
            stack.pop();
            e += 1;
        }
    }
}

fn emit(model: &HyperellipticModel, irr: &[FieldPoly], factors: &[(usize, usize)], out: &mut Vec<MumfordDivisor>) {
    let ctx = model.field();
    let mut partial = vec![(FieldPoly::one(ctx), FieldPoly::zero(ctx))];
    for &(i, e) in factors {
        let pi = &irr[i];
        let local = local_solutions(model, pi, e);
        if local.is_empty() {
            return;
        }
        let m = (1..e).fold(pi.clone(), |acc, _| acc.mul(ctx, pi));
        let mut next = Vec::with_capacity(partial.len() * local.len());
        for (u, v) in &partial {
            let inv = u.rem(ctx, &m).inv_mod(ctx, &m).expect("coprime factors");
            let u_new = u.mul(ctx, &m);
            for w in &local {
                // v' = v + u * ((w - v) u^(-1) mod m)
                let t = w.sub(ctx, v).mulmod(ctx, &inv, &m);
                let v_new = v.add(ctx, &u.mul(ctx, &t)).rem(ctx, &u_new);
                next.push((u_new.clone(), v_new));
            }
        }
        partial = next;
    }
    out.extend(partial.into_iter().map(|(u, v)| MumfordDivisor { u, v }));
}

/// Size of the `ell`-torsion subgroup and its rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    pub group_order: u64,
    pub count: u64,
    pub rank: u32,
}

pub fn ell_torsion_census(model: &HyperellipticModel, ell: u64) -> Result<Census, JacobianError> {
    census_with_budget(model, ell, ENUMERATION_BUDGET)
}

pub fn census_with_budget(
    model: &HyperellipticModel,
    ell: u64,
    budget: u64,
) -> Result<Census, JacobianError> {
    let all = enumerate_with_budget(model, budget)?;
    let l = BigUint::from(ell);
    let count = all.iter().filter(|d| model.scalar_mul(&l, d).is_identity()).count() as u64;
    let mut rank = 0;
    let mut c = count;
    while c % ell == 0 {
        c /= ell;
        rank += 1;
    }
    if c != 1 {
        return Err(JacobianError::NotAPowerOfEll { count, ell });
    }
    Ok(Census {
        group_order: all.len() as u64,
        count,
        rank,
    })
}

/// `#C(F_{|K|^s})` for `s = 1..=max_s` by evaluating `F` on every element.
pub fn model_point_counts(
    model: &HyperellipticModel,
    max_s: usize,
    budget: u64,
) -> Result<Vec<BigUint>, JacobianError> {
    let base = model.field();
    let h = model.prime_coefficients().ok_or(JacobianError::NonPrimeCoefficients)?;
    let p = base.characteristic();
    let mut counts = Vec::with_capacity(max_s);
    for s in 1..=max_s {
        let field = make_extension(p, base.degree() * s)?;
        let f = FieldPoly::from_prime_coeffs(&field, &h);
        let mut total: i64 = 0;
        for x in field.enumerate_elements(budget)? {
            total += 1 + field.quadratic_character(&f.eval(&field, &x)) as i64;
        }
        // one point at infinity
        counts.push(BigUint::from((total + 1).to_u64().expect("nonnegative")));
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpoly::{group_order, newton_from_counts};
    use std::collections::HashSet;

    #[test]
    fn irreducible_counts() {
        let ctx = make_extension(5, 1).unwrap();
        let irr = monic_irreducibles(&ctx, 3);
        let by_deg = |k| irr.iter().filter(|f| f.degree() == Some(k)).count();
        assert_eq!((by_deg(1), by_deg(2), by_deg(3)), (5, 10, 40));
    }

    #[test]
    fn small_group_sizes() {
        let f3 = make_extension(3, 1).unwrap();
        let c3 = HyperellipticModel::artin_schreier(&f3, 3).unwrap();
        assert_eq!(enumerate_jacobian(&c3).unwrap().len(), 4);
        let f5 = make_extension(5, 1).unwrap();
        let c5 = HyperellipticModel::artin_schreier(&f5, 5).unwrap();
        let all = enumerate_jacobian(&c5).unwrap();
        assert_eq!(all.len(), 16);
        let distinct: HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 16);
        assert!(all.iter().all(|d| c5.is_valid(d)));
    }

    #[test]
    fn size_matches_newton_order() {
        let f5 = make_extension(5, 1).unwrap();
        let m = HyperellipticModel::from_prime_coeffs(&f5, &[1, 1, 0, 0, 0, 1], 1).unwrap();
        let counts = model_point_counts(&m, 3, 1 << 20).unwrap();
        let poly = newton_from_counts(&counts, &BigUint::from(5u32), 2).unwrap();
        let n = group_order(&poly).unwrap();
        assert_eq!(BigUint::from(enumerate_jacobian(&m).unwrap().len()), n);
    }

    #[test]
    fn hensel_lift_at_higher_multiplicity() {
        // y^2 = x^3 + 1 over F_7: (x - 1)^2 needs F = 2 mod (x - 1) to be a square.
        let f7 = make_extension(7, 1).unwrap();
        let m = HyperellipticModel::from_prime_coeffs(&f7, &[1, 0, 0, 1], 1).unwrap();
        let all = enumerate_jacobian(&m).unwrap();
        assert!(all.iter().all(|d| m.is_valid(d)));
        let counts = model_point_counts(&m, 1, 1 << 20).unwrap();
        assert_eq!(BigUint::from(all.len()), counts[0]);
    }

    #[test]
    fn census_examples() {
        let f3 = make_extension(3, 1).unwrap();
        let c3 = HyperellipticModel::artin_schreier(&f3, 3).unwrap();
        assert_eq!(ell_torsion_census(&c3, 3).unwrap().count, 1);
        let f5 = make_extension(5, 1).unwrap();
        let c5 = HyperellipticModel::artin_schreier(&f5, 5).unwrap();
        assert_eq!(ell_torsion_census(&c5, 3).unwrap().rank, 0);
    }

    #[test]
    fn budget_is_enforced() {
        let f = make_extension(7, 3).unwrap();
        let m = HyperellipticModel::artin_schreier(&f, 7).unwrap();
        assert!(matches!(enumerate_jacobian(&m), Err(JacobianError::BudgetExceeded { .. })));
    }
}
