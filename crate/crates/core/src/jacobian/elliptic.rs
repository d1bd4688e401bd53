//! Chord-and-tangent addition on `y^2 = x^3 + a x + b` over `F_p`, used as an
//! oracle for the genus-one case of Cantor's algorithm.

use super::{HyperellipticModel, MumfordDivisor};
use crate::ffield::arith::PrimeModulus;
use crate::ffield::poly::FieldPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EcPoint {
    Infinity,
    Affine(u64, u64),
}

#[derive(Clone, Copy, Debug)]
pub struct ShortWeierstrass {
    pub md: PrimeModulus,
    pub a: u64,
    pub b: u64,
}

impl ShortWeierstrass {
    pub fn new(p: u64, a: u64, b: u64) -> Self {
        ShortWeierstrass {
            md: PrimeModulus::new(p),
            a: a % p,
            b: b % p,
        }
    }

    fn rhs(&self, x: u64) -> u64 {
        let m = self.md;
        m.add(m.add(m.mul(m.mul(x, x), x), m.mul(self.a, x)), self.b)
    }

    pub fn points(&self) -> Vec<EcPoint> {
        let p = self.md.value();
        let mut out = vec![EcPoint::Infinity];
        for x in 0..p {
            let r = self.rhs(x);
            for y in 0..p {
                if self.md.mul(y, y) == r {
                    out.push(EcPoint::Affine(x, y));
                }
            }
        }
        out
    }

    pub fn add(&self, s: EcPoint, t: EcPoint) -> EcPoint {
        let m = self.md;
        let (x1, y1, x2, y2) = match (s, t) {
            (EcPoint::Infinity, o) | (o, EcPoint::Infinity) => return o,
            (EcPoint::Affine(x1, y1), EcPoint::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if m.add(y1, y2) == 0 {
                return EcPoint::Infinity;
            }
            let num = m.add(m.mul(3, m.mul(x1, x1)), self.a);
            m.mul(num, m.inv(m.mul(2, y1)).unwrap())
        } else {
            m.mul(m.sub(y2, y1), m.inv(m.sub(x2, x1)).unwrap())
        };
        let x3 = m.sub(m.sub(m.mul(lambda, lambda), x1), x2);
        let y3 = m.sub(m.mul(lambda, m.sub(x1, x3)), y1);
        EcPoint::Affine(x3, y3)
    }

    /// `P - infinity` as a Mumford pair on the matching model.
    pub fn to_divisor(&self, model: &HyperellipticModel, pt: EcPoint) -> MumfordDivisor {
        let ctx = model.field();
        match pt {
            EcPoint::Infinity => model.identity(),
            EcPoint::Affine(x, y) => MumfordDivisor {
                u: FieldPoly::linear(ctx, &ctx.from_u64(x)),
                v: FieldPoly::constant(ctx, &ctx.from_u64(y)),
            },
        }
    }

    pub fn model(&self) -> HyperellipticModel {
        let ctx = crate::ffield::make_extension(self.md.value(), 1).expect("odd prime");
        HyperellipticModel::from_prime_coeffs(&ctx, &[self.b, self.a, 0, 1], 1).expect("nonsingular")
    }
}
