//! Seeded random divisor classes.
//!
//! A point `x0` of the degree-`g` extension `L = K[x]/(w)` with `F(x0)` a square
//! gives the place `(u, v)` with `u` the minimal polynomial of `x0` and
//! `v(x0) = sqrt(F(x0))`. Since some small curves have no places of a given
//! degree, a random signed sum of rational points is added on top.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ring::{find_irreducible, ExtRing};
use super::{HyperellipticModel, JacobianError, MumfordDivisor};
use crate::ffield::poly::FieldPoly;
use crate::ffield::FieldContext;

pub const MAX_ATTEMPTS: u32 = 256;
const MODULUS_SEED: u64 = 0x7761_726d_7570;
const RATIONAL_SUMMANDS: usize = 4;

pub(crate) struct PlaceSampler {
    ring: ExtRing,
}

impl PlaceSampler {
    fn new(model: &HyperellipticModel) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(MODULUS_SEED);
        let w = find_irreducible(model.field(), model.genus().max(1), &mut rng);
        PlaceSampler {
            ring: ExtRing::new(model.field(), w),
        }
    }
}

fn sampler(model: &HyperellipticModel) -> &PlaceSampler {
    model.inner.sampler.get_or_init(|| PlaceSampler::new(model))
}

/// Deterministic pseudo-random class for `seed`.
pub fn random_divisor(model: &HyperellipticModel, seed: u64) -> Result<MumfordDivisor, JacobianError> {
    let ring = &sampler(model).ring;
    let ctx = model.field();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        let x0 = ring.random(&mut rng);
        let fx = ring.eval(model.f(), &x0);
        let y0 = match ring.sqrt(&fx) {
            Some(y) if rng.gen::<bool>() => y.neg(ctx),
            Some(y) => y,
            None => continue,
        };
        let Some((u, v)) = place_through(ctx, ring, &x0, &y0) else {
            continue;
        };
        let mut d = MumfordDivisor { u, v };
        let k = rng.gen_range(0..=model.genus().min(RATIONAL_SUMMANDS));
        for _ in 0..k {
            if let Some(pt) = random_rational_point(model, &mut rng) {
                d = model.cantor_add(&d, &pt);
            }
        }
        debug_assert!(model.is_valid(&d));
        return Ok(d);
    }
    Err(JacobianError::SamplingExhausted(MAX_ATTEMPTS))
}

fn random_rational_point(model: &HyperellipticModel, rng: &mut ChaCha8Rng) -> Option<MumfordDivisor> {
    let ctx = model.field();
    let p = ctx.characteristic();
    let x = ctx.from_coeffs(&(0..ctx.degree()).map(|_| rng.gen_range(0..p)).collect::<Vec<_>>());
    let y = ctx.sqrt(&model.f().eval(ctx, &x)).ok()?;
    let y = if rng.gen::<bool>() { ctx.neg(&y) } else { y };
    model.point(&x, &y)
}

/// `(minpoly of x0, v)` with `deg v < deg u` and `v(x0) = y0`, or `None` if
/// `y0` is not in `K(x0)`.
fn place_through(
    ctx: &FieldContext,
    ring: &ExtRing,
    x0: &FieldPoly,
    y0: &FieldPoly,
) -> Option<(FieldPoly, FieldPoly)> {
    let n = ctx.degree();
    let g = ring.degree();
    let mut basis = Echelon::new(ctx);
    let mut power = FieldPoly::one(ctx);
    let mut minpoly = None;
    for i in 0..=g {
        let mut combo = vec![0u64; (g + 1) * n];
        combo[i * n] = 1;
        let mut vec = padded(&power, g * n);
        basis.reduce(&mut vec, &mut combo);
        if vec.iter().all(|&c| c == 0) {
            minpoly = Some(FieldPoly::from_raw(n, combo));
            break;
        }
        basis.push(vec, combo);
        power = ring.reduce(&power.mul(ctx, x0));
    }
    let u = minpoly.expect("g + 1 powers are dependent");
    let mut vec = padded(y0, g * n);
    let mut combo = vec![0u64; (g + 1) * n];
    basis.reduce(&mut vec, &mut combo);
    if vec.iter().any(|&c| c != 0) {
        return None;
    }
    // vec(y0) - sum c_j row_j = 0 and each row tracks its combination with a minus sign.
    let v = FieldPoly::from_raw(n, combo).neg(ctx);
    Some((u, v))
}

fn padded(a: &FieldPoly, len: usize) -> Vec<u64> {
    let mut v = a.raw().to_vec();
    v.resize(len, 0);
    v
}

/// Incremental row echelon form over `K`, with each row's combination of inputs.
struct Echelon<'a> {
    ctx: &'a FieldContext,
    n: usize,
    rows: Vec<(usize, Vec<u64>, Vec<u64>)>,
    scratch: Vec<u64>,
}

impl<'a> Echelon<'a> {
    fn new(ctx: &'a FieldContext) -> Self {
        Echelon {
            ctx,
            n: ctx.degree(),
            rows: Vec::new(),
            scratch: vec![0u64; ctx.degree()],
        }
    }

    /// `vec -= c * row.vec`, `combo -= c * row.combo` for every row, in order.
    fn reduce(&mut self, vec: &mut [u64], combo: &mut [u64]) {
        let n = self.n;
        for (pivot, rv, rc) in &self.rows {
            let c = vec[pivot * n..(pivot + 1) * n].to_vec();
            if c.iter().all(|&x| x == 0) {
                continue;
            }
            axpy(self.ctx, &mut self.scratch, vec, rv, &c);
            axpy(self.ctx, &mut self.scratch, combo, rc, &c);
        }
    }

    fn push(&mut self, mut vec: Vec<u64>, mut combo: Vec<u64>) {
        let n = self.n;
        let pivot = (0..vec.len() / n)
            .find(|&b| vec[b * n..(b + 1) * n].iter().any(|&x| x != 0))
            .expect("nonzero row");
        let mut inv = vec![0u64; n];
        assert!(self.ctx.inv_slice(&vec[pivot * n..(pivot + 1) * n], &mut inv));
        self.ctx.scale_slice(&mut vec, &inv);
        self.ctx.scale_slice(&mut combo, &inv);
        self.rows.push((pivot, vec, combo));
    }
}

fn axpy(ctx: &FieldContext, tmp: &mut [u64], a: &mut [u64], b: &[u64], c: &[u64]) {
    let n = ctx.degree();
    for (ab, bb) in a.chunks_mut(n).zip(b.chunks(n)) {
        if bb.iter().all(|&x| x == 0) {
            continue;
        }
        ctx.mul_slices(bb, c, tmp);
        ctx.sub_assign_slice(ab, tmp);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_extension;
    use std::collections::HashSet;

    #[test]
    fn deterministic_and_valid() {
        let ctx = make_extension(7, 1).unwrap();
        let m = HyperellipticModel::from_prime_coeffs(&ctx, &[1, 3, 0, 0, 0, 1], 1).unwrap();
        for seed in 0..30 {
            let a = random_divisor(&m, seed).unwrap();
            assert!(m.is_valid(&a));
            assert_eq!(a, random_divisor(&m, seed).unwrap());
        }
    }

    #[test]
    fn minimal_polynomial_in_subfield() {
        let ctx = make_extension(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ring = ExtRing::new(&ctx, find_irreducible(&ctx, 4, &mut rng));
        // x0 = 1 has minimal polynomial x - 1; y0 = 2 lies in K(x0).
        let one = FieldPoly::one(&ctx);
        let two = FieldPoly::constant(&ctx, &ctx.from_u64(2));
        let (u, v) = place_through(&ctx, &ring, &one, &two).unwrap();
        assert_eq!(u, FieldPoly::from_prime_coeffs(&ctx, &[2, 1]));
        assert_eq!(v, two);
        // a generator of L is not in K(1)
        let t = FieldPoly::monomial(&ctx, 1);
        assert!(place_through(&ctx, &ring, &one, &t).is_none());
        let (u, v) = place_through(&ctx, &ring, &t, &t).unwrap();
        assert_eq!(u, ring.w);
        assert_eq!(v, t);
    }

    #[test]
    fn covers_small_group() {
        let ctx = make_extension(5, 1).unwrap();
        let m = HyperellipticModel::artin_schreier(&ctx, 5).unwrap();
        let seen: HashSet<_> = (0..1000).map(|s| random_divisor(&m, s).unwrap()).collect();
        assert!(seen.len() * 10 >= 16 * 9, "covered {}", seen.len());
    }
}
