//! Tonelli-Shanks square roots over any finite commutative ring that is a
//! field, given a quadratic nonresidue.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

pub trait SquareRootDomain {
    type Elem: Clone + PartialEq;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }

    /// Left-to-right exponentiation with a width-4 odd-power window.
    fn pow(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        if e.is_zero() {
            return self.one();
        }
        let a2 = self.square(a);
        let mut odd = Vec::with_capacity(8);
        odd.push(a.clone());
        for i in 1..8 {
            let next = self.mul(&odd[i - 1], &a2);
            odd.push(next);
        }
        let bits = e.bits();
        let mut acc: Option<Self::Elem> = None;
        let mut i = bits as i64 - 1;
        while i >= 0 {
            if !e.bit(i as u64) {
                acc = acc.map(|x| self.square(&x));
                i -= 1;
                continue;
            }
            let mut j = (i - 3).max(0);
            while !e.bit(j as u64) {
                j += 1;
            }
            let mut window = 0usize;
            for k in (j..=i).rev() {
                window = (window << 1) | e.bit(k as u64) as usize;
            }
            let mut x = match acc {
                Some(x) => x,
                None => {
                    acc = Some(odd[window >> 1].clone());
                    i = j - 1;
                    continue;
                }
            };
            for _ in j..=i {
                x = self.square(&x);
            }
            acc = Some(self.mul(&x, &odd[window >> 1]));
            i = j - 1;
        }
        acc.unwrap_or_else(|| self.one())
    }
}

/// Precomputed data for square roots in a field of odd order `Q`:
/// `Q - 1 = 2^s * t` with `t` odd, and `c = z^t` for a nonresidue `z`.
#[derive(Clone, Debug)]
pub struct TonelliSetup<E> {
    pub s: u32,
    pub t: BigUint,
    pub c: E,
}

impl<E: Clone + PartialEq> TonelliSetup<E> {
    pub fn new<D: SquareRootDomain<Elem = E>>(d: &D, order: &BigUint, nonresidue: &E) -> Self {
        let mut t = order - 1u32;
        let mut s = 0u32;
        while t.is_even() {
            t >>= 1;
            s += 1;
        }
        let c = d.pow(nonresidue, &t);
        TonelliSetup { s, t, c }
    }
}

/// Some square root of `a`, or `None` if `a` is a nonresidue.
pub fn tonelli_shanks<D: SquareRootDomain>(
    d: &D,
    setup: &TonelliSetup<D::Elem>,
    a: &D::Elem,
) -> Option<D::Elem> {
    let zero = d.zero();
    if *a == zero {
        return Some(zero);
    }
    let one = d.one();
    let half = (&setup.t - 1u32) >> 1;
    let y = d.pow(a, &half);
    let mut x = d.mul(a, &y);
    let mut b = d.mul(&x, &y);
    let mut c = setup.c.clone();
    let mut m = setup.s;
    while b != one {
        let mut i = 0u32;
        let mut probe = b.clone();
        while probe != one {
            probe = d.square(&probe);
            i += 1;
            if i >= m {
                return None;
            }
        }
        let mut w = c;
        for _ in 0..(m - i - 1) {
            w = d.square(&w);
        }
        x = d.mul(&x, &w);
        c = d.square(&w);
        b = d.mul(&b, &c);
        m = i;
    }
    Some(x)
}
