//! Finite fields `F_{p^n}` for odd `p`, with a canonical defining polynomial.
//!
//! A [`FieldContext`] is immutable and cheap to clone. Elements are coefficient
//! vectors of length `n` in the power basis `1, t, ..., t^(n-1)`, where `t` is
//! the class of `x` modulo the defining polynomial. The defining polynomial of
//! `F_{p^n}` is the monic irreducible whose coefficient tuple `(c_0, ..., c_{n-1})`
//! is lexicographically smallest, so two contexts built from the same `(p, n)`
//! agree coefficient for coefficient.

pub mod arith;
pub mod poly;
pub mod primepoly;
pub mod tonelli;

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use self::arith::PrimeModulus;
use self::tonelli::{tonelli_shanks, SquareRootDomain, TonelliSetup};

/// Default cap on the number of field elements any enumeration may touch.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 26;

const MAX_CHARACTERISTIC: u64 = 1 << 61;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("characteristic {0} exceeds 2^61")]
    CharacteristicTooLarge(u64),
    #[error("extension degree must be positive")]
    DegreeZero,
    #[error("polynomial is not monic irreducible of degree {0}")]
    NotIrreducible(usize),
    #[error("element has no square root")]
    NoSquareRoot,
    #[error("field of cardinality {cardinality} exceeds the enumeration budget {budget}")]
    BudgetExceeded { cardinality: BigUint, budget: u64 },
}

static NEXT_CONTEXT_ID: AtomicU64 = AtomicU64::new(1);

struct Inner {
    id: u64,
    p: u64,
    n: usize,
    modp: PrimeModulus,
    /// Monic, length `n + 1`, low degree first.
    modulus: Vec<u64>,
    cardinality: BigUint,
    frobenius: OnceLock<Vec<Vec<u64>>>,
    tonelli: OnceLock<TonelliSetup<FieldElement>>,
}

/// Arithmetic context for one finite field.
#[derive(Clone)]
pub struct FieldContext {
    inner: Arc<Inner>,
}

/// An element of a particular [`FieldContext`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    ctx: u64,
    coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn context_id(&self) -> u64 {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldContext")
            .field("p", &self.inner.p)
            .field("n", &self.inner.n)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus
    }
}

impl Eq for FieldContext {}

/// Build the canonical context for `F_{p^n}`.
pub fn make_extension(p: u64, n: usize) -> Result<FieldContext, FieldError> {
    check_characteristic(p)?;
    if n == 0 {
        return Err(FieldError::DegreeZero);
    }
    let modulus = smallest_irreducible(PrimeModulus::new(p), n);
    Ok(FieldContext::from_parts(p, modulus))
}

fn check_characteristic(p: u64) -> Result<(), FieldError> {
    if p == 2 {
        return Err(FieldError::EvenCharacteristic);
    }
    if p > MAX_CHARACTERISTIC {
        return Err(FieldError::CharacteristicTooLarge(p));
    }
    if !arith::is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    Ok(())
}

/// Lexicographically smallest monic irreducible of degree `n`, `c_0` compared first.
fn smallest_irreducible(m: PrimeModulus, n: usize) -> Vec<u64> {
    let p = m.value();
    let mut digits = vec![0u64; n];
    if n > 1 {
        digits[0] = 1;
    }
    loop {
        let mut candidate = digits.clone();
        candidate.push(1);
        if primepoly::is_irreducible(m, &candidate) {
            return candidate;
        }
        let mut k = n - 1;
        loop {
            digits[k] += 1;
            if digits[k] < p {
                break;
            }
            digits[k] = 0;
            assert!(k > 0, "an irreducible of every degree exists");
            k -= 1;
        }
    }
}

impl FieldContext {
    /// Context for a caller-supplied monic defining polynomial (verified irreducible).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self, FieldError> {
        check_characteristic(p)?;
        let n = modulus.len().saturating_sub(1);
        if n == 0 {
            return Err(FieldError::DegreeZero);
        }
        let m = PrimeModulus::new(p);
        if modulus[n] != 1
            || modulus.iter().any(|&c| c >= p)
            || !primepoly::is_irreducible(m, &modulus)
        {
            return Err(FieldError::NotIrreducible(n));
        }
        Ok(Self::from_parts(p, modulus))
    }

    fn from_parts(p: u64, modulus: Vec<u64>) -> Self {
        let n = modulus.len() - 1;
        FieldContext {
            inner: Arc::new(Inner {
                id: NEXT_CONTEXT_ID.fetch_add(1, AtomicOrdering::Relaxed),
                p,
                n,
                modp: PrimeModulus::new(p),
                modulus,
                cardinality: BigUint::from(p).pow(n as u32),
                frobenius: OnceLock::new(),
                tonelli: OnceLock::new(),
            }),
        }
    }

    pub fn id(&self) -> u64 {
        self.inner.id
    }

    pub fn characteristic(&self) -> u64 {
        self.inner.p
    }

    pub fn degree(&self) -> usize {
        self.inner.n
    }

    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    pub fn prime_modulus(&self) -> PrimeModulus {
        self.inner.modp
    }

    pub fn cardinality(&self) -> &BigUint {
        &self.inner.cardinality
    }

    /// Cardinality as `u64`, when it fits.
    pub fn cardinality_u64(&self) -> Option<u64> {
        self.inner.cardinality.to_u64()
    }

    fn wrap(&self, coeffs: Vec<u64>) -> FieldElement {
        debug_assert_eq!(coeffs.len(), self.inner.n);
        FieldElement {
            ctx: self.inner.id,
            coeffs,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(vec![0; self.inner.n])
    }

    pub fn one(&self) -> FieldElement {
        self.from_u64(1)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_u64(&self, c: u64) -> FieldElement {
        let mut v = vec![0; self.inner.n];
        v[0] = self.inner.modp.reduce(c);
        self.wrap(v)
    }

    pub fn from_i64(&self, c: i64) -> FieldElement {
        let mut v = vec![0; self.inner.n];
        v[0] = self.inner.modp.reduce_i64(c);
        self.wrap(v)
    }

    /// Element with the given power-basis coefficients; missing entries are zero.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        assert!(coeffs.len() <= self.inner.n, "too many coefficients");
        let mut v = vec![0; self.inner.n];
        for (o, &c) in v.iter_mut().zip(coeffs) {
            *o = self.inner.modp.reduce(c);
        }
        self.wrap(v)
    }

    /// The class `t` of `x`; equals the constant root when `n = 1`.
    pub fn generator(&self) -> FieldElement {
        if self.inner.n == 1 {
            self.from_u64(self.inner.modp.neg(self.inner.modulus[0]))
        } else {
            let mut v = vec![0; self.inner.n];
            v[1] = 1;
            self.wrap(v)
        }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut out = a.coeffs.clone();
        self.add_assign_slice(&mut out, &b.coeffs);
        self.wrap(out)
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut out = a.coeffs.clone();
        self.sub_assign_slice(&mut out, &b.coeffs);
        self.wrap(out)
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let m = self.inner.modp;
        self.wrap(a.coeffs.iter().map(|&c| m.neg(c)).collect())
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut out = vec![0; self.inner.n];
        self.mul_slices(&a.coeffs, &b.coeffs, &mut out);
        self.wrap(out)
    }

    pub fn square(&self, a: &FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        let mut out = vec![0; self.inner.n];
        if self.inv_slice(&a.coeffs, &mut out) {
            Some(self.wrap(out))
        } else {
            None
        }
    }

    pub fn pow(&self, a: &FieldElement, e: &BigUint) -> FieldElement {
        SquareRootDomain::pow(self, a, e)
    }

    pub fn pow_u64(&self, a: &FieldElement, e: u64) -> FieldElement {
        self.pow(a, &BigUint::from(e))
    }

    /// `a^(p^(j mod n))`.
    pub fn frobenius_power(&self, a: &FieldElement, j: u64) -> FieldElement {
        let n = self.inner.n;
        let reps = (j % n as u64) as usize;
        let mut cur = a.coeffs.clone();
        if reps == 0 || n == 1 {
            return self.wrap(cur);
        }
        let mut next = vec![0; n];
        for _ in 0..reps {
            self.frobenius_slice(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        self.wrap(cur)
    }

    /// Quadratic character by exponentiation: `a^((|K|-1)/2)` read in `{-1, 0, 1}`.
    pub fn quadratic_character(&self, a: &FieldElement) -> i8 {
        if a.is_zero() {
            return 0;
        }
        let e = (self.cardinality() - 1u32) >> 1;
        let r = self.pow(a, &e);
        if r == self.one() {
            1
        } else {
            debug_assert_eq!(r, self.from_i64(-1));
            -1
        }
    }

    /// Norm to the prime field: the product of all Frobenius conjugates.
    pub fn norm(&self, a: &FieldElement) -> u64 {
        let mut out = vec![0; self.inner.n];
        self.norm_slice(&a.coeffs, &mut out);
        out[0]
    }

    /// Quadratic character through the norm map; agrees with [`Self::quadratic_character`].
    pub fn quadratic_character_by_norm(&self, a: &FieldElement) -> i8 {
        self.chi_slice(&a.coeffs)
    }

    /// Canonical square root: the lexicographically smaller of the two roots.
    pub fn sqrt(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        let setup = self.inner.tonelli.get_or_init(|| {
            let z = self.first_nonresidue();
            TonelliSetup::new(self, self.cardinality(), &z)
        });
        let r = tonelli_shanks(self, setup, a).ok_or(FieldError::NoSquareRoot)?;
        if self.mul(&r, &r) != *a {
            return Err(FieldError::NoSquareRoot);
        }
        let minus = self.neg(&r);
        Ok(if minus < r { minus } else { r })
    }

    fn first_nonresidue(&self) -> FieldElement {
        let mut index = 1u64;
        loop {
            let e = self.element_at_unchecked(index);
            if self.chi_slice(&e.coeffs) == -1 {
                return e;
            }
            index += 1;
        }
    }

    /// The element with the given lexicographic rank (`c_0` most significant).
    pub fn element_at(&self, index: u64) -> Option<FieldElement> {
        match self.cardinality_u64() {
            Some(card) if index < card => Some(self.element_at_unchecked(index)),
            _ => None,
        }
    }

    fn element_at_unchecked(&self, mut index: u64) -> FieldElement {
        let p = self.inner.p;
        let n = self.inner.n;
        let mut v = vec![0; n];
        for i in (0..n).rev() {
            v[i] = index % p;
            index /= p;
        }
        self.wrap(v)
    }

    /// Lexicographic rank of an element; requires the cardinality to fit in `u64`.
    pub fn index_of(&self, a: &FieldElement) -> u64 {
        self.index_of_slice(&a.coeffs)
    }

    pub(crate) fn index_of_slice(&self, a: &[u64]) -> u64 {
        let p = self.inner.p;
        a.iter().fold(0u64, |acc, &c| acc * p + c)
    }

    /// Every element once, in lexicographic coefficient order.
    pub fn enumerate_elements(
        &self,
        budget: u64,
    ) -> Result<impl Iterator<Item = FieldElement> + '_, FieldError> {
        let card = self.enumeration_size(budget)?;
        Ok((0..card).map(move |i| self.element_at_unchecked(i)))
    }

    /// Cardinality as `u64` if within `budget`, else `BudgetExceeded`.
    pub fn enumeration_size(&self, budget: u64) -> Result<u64, FieldError> {
        match self.cardinality_u64() {
            Some(c) if c <= budget => Ok(c),
            _ => Err(FieldError::BudgetExceeded {
                cardinality: self.cardinality().clone(),
                budget,
            }),
        }
    }

    // ---- slice kernels -------------------------------------------------

    #[inline]
    pub(crate) fn add_assign_slice(&self, a: &mut [u64], b: &[u64]) {
        let m = self.inner.modp;
        for (x, &y) in a.iter_mut().zip(b) {
            *x = m.add(*x, y);
        }
    }

    #[inline]
    pub(crate) fn sub_assign_slice(&self, a: &mut [u64], b: &[u64]) {
        let m = self.inner.modp;
        for (x, &y) in a.iter_mut().zip(b) {
            *x = m.sub(*x, y);
        }
    }

    #[inline]
    pub(crate) fn mul_slices(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        let m = self.inner.modp;
        let f = &self.inner.modulus;
        match self.inner.n {
            1 => out[0] = m.mul(a[0], b[0]),
            2 => {
                let t0 = m.mul(a[0], b[0]);
                let t1 = m.add(m.mul(a[0], b[1]), m.mul(a[1], b[0]));
                let t2 = m.mul(a[1], b[1]);
                out[0] = m.sub(t0, m.mul(t2, f[0]));
                out[1] = m.sub(t1, m.mul(t2, f[1]));
            }
            n => {
                let mut t = vec![0u64; 2 * n - 1];
                for (i, &x) in a.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (j, &y) in b.iter().enumerate() {
                        t[i + j] = m.add(t[i + j], m.mul(x, y));
                    }
                }
                for k in (n..2 * n - 1).rev() {
                    let h = t[k];
                    if h == 0 {
                        continue;
                    }
                    for i in 0..n {
                        t[k - n + i] = m.sub(t[k - n + i], m.mul(h, f[i]));
                    }
                }
                out.copy_from_slice(&t[..n]);
            }
        }
    }

    /// Multiply every coefficient-block of `a` (length a multiple of `n`) by `c`.
    pub(crate) fn scale_slice(&self, a: &mut [u64], c: &[u64]) {
        let n = self.inner.n;
        let mut tmp = vec![0u64; n];
        for chunk in a.chunks_mut(n) {
            self.mul_slices(chunk, c, &mut tmp);
            chunk.copy_from_slice(&tmp);
        }
    }

    pub(crate) fn inv_slice(&self, a: &[u64], out: &mut [u64]) -> bool {
        let m = self.inner.modp;
        if self.inner.n == 1 {
            return match m.inv(a[0]) {
                Some(x) => {
                    out[0] = x;
                    true
                }
                None => false,
            };
        }
        let mut v = a.to_vec();
        primepoly::trim(&mut v);
        if v.is_empty() {
            return false;
        }
        match primepoly::inv_mod(m, &v, &self.inner.modulus) {
            Some(inv) => {
                out.iter_mut().for_each(|o| *o = 0);
                out[..inv.len()].copy_from_slice(&inv);
                true
            }
            None => false,
        }
    }

    fn frobenius_rows(&self) -> &Vec<Vec<u64>> {
        self.inner
            .frobenius
            .get_or_init(|| primepoly::frobenius_matrix(self.inner.modp, &self.inner.modulus))
    }

    pub(crate) fn frobenius_slice(&self, a: &[u64], out: &mut [u64]) {
        if self.inner.n == 1 {
            out[0] = a[0];
            return;
        }
        primepoly::apply_matrix(self.inner.modp, self.frobenius_rows(), a, out);
    }

    /// Matrix (rows = images of basis vectors) of `x -> x^(p^j)` over `F_p`.
    pub(crate) fn frobenius_power_matrix(&self, j: u64) -> Vec<Vec<u64>> {
        let n = self.inner.n;
        (0..n)
            .map(|i| {
                let mut e = vec![0u64; n];
                e[i] = 1;
                self.frobenius_power(&self.wrap(e), j).coeffs
            })
            .collect()
    }

    pub(crate) fn norm_slice(&self, a: &[u64], out: &mut [u64]) {
        let n = self.inner.n;
        out.copy_from_slice(a);
        let mut conj = a.to_vec();
        let mut next = vec![0u64; n];
        let mut prod = vec![0u64; n];
        for _ in 1..n {
            self.frobenius_slice(&conj, &mut next);
            std::mem::swap(&mut conj, &mut next);
            self.mul_slices(out, &conj, &mut prod);
            out.copy_from_slice(&prod);
        }
    }

    pub(crate) fn chi_slice(&self, a: &[u64]) -> i8 {
        let mut nrm = vec![0u64; self.inner.n];
        self.norm_slice(a, &mut nrm);
        self.inner.modp.legendre(nrm[0])
    }
}

impl SquareRootDomain for FieldContext {
    type Elem = FieldElement;

    fn zero(&self) -> FieldElement {
        FieldContext::zero(self)
    }

    fn one(&self) -> FieldElement {
        FieldContext::one(self)
    }

    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldContext::mul(self, a, b)
    }
}

/// `p^k` as a big integer.
pub fn big_pow(p: u64, k: u64) -> BigUint {
    let mut r = BigUint::one();
    let mut b = BigUint::from(p);
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            r *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    r
}
