//! Word-sized modular arithmetic and small integer number theory.

use std::cmp::Ordering;

/// Arithmetic modulo an odd prime `p < 2^62`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeModulus {
    p: u64,
    small: bool,
}

impl PrimeModulus {
    pub fn new(p: u64) -> Self {
        debug_assert!(p >= 2 && p < (1 << 62));
        PrimeModulus {
            p,
            small: p < (1 << 32),
        }
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(self, a: u64) -> u64 {
        a % self.p
    }

    #[inline]
    pub fn reduce_i64(self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn reduce_u128(self, a: u128) -> u64 {
        (a % self.p as u128) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        if self.small {
            a * b % self.p
        } else {
            ((a as u128 * b as u128) % self.p as u128) as u64
        }
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Inverse by the extended Euclidean algorithm; `None` for zero.
    pub fn inv(self, a: u64) -> Option<u64> {
        let a = a % self.p;
        if a == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.p as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Some(s0.rem_euclid(self.p as i128) as u64)
    }

    /// Legendre symbol `(a / p)` in `{-1, 0, 1}`.
    pub fn legendre(self, a: u64) -> i8 {
        let a = a % self.p;
        if a == 0 {
            return 0;
        }
        jacobi(a, self.p)
    }
}

/// Jacobi symbol for odd positive `n`.
pub fn jacobi(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut t = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod_u64(r, a, m);
        }
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &sp in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod_u64(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization as sorted `(prime, exponent)` pairs. `factor(1)` is empty.
pub fn factor(n: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    let mut rest = n;
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while rest % sp == 0 {
            primes.push(sp);
            rest /= sp;
        }
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            primes.push(m);
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

/// All positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (prime, e) in factor(n) {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= prime;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .into_iter()
        .fold(n, |acc, (prime, _)| acc / prime * (prime - 1))
}

/// Möbius function.
pub fn moebius(n: u64) -> i64 {
    let f = factor(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Exponent of the prime `r` in `n` (`n > 0`).
pub fn valuation(mut n: u64, r: u64) -> u32 {
    let mut v = 0;
    while n % r == 0 {
        n /= r;
        v += 1;
    }
    v
}

/// Multiplicative order of `a` modulo the prime `ell`; `None` when `ell | a`.
pub fn multiplicative_order(a: u64, ell: u64) -> Option<u64> {
    if a % ell == 0 {
        return None;
    }
    let mut order = ell - 1;
    for (prime, _) in factor(ell - 1) {
        while order % prime == 0 && powmod_u64(a, order / prime, ell) == 1 {
            order /= prime;
        }
    }
    Some(order)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    gcd_u64(a, b)
}

/// Lexicographic comparison of coefficient sequences, first entry most significant.
pub fn lex_cmp(a: &[u64], b: &[u64]) -> Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_large() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            small,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime((1u64 << 61) + 1));
        assert!(!is_prime(3215031751));
    }

    #[test]
    fn factor_and_divisors() {
        assert_eq!(factor(1), vec![]);
        assert_eq!(factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(divisors(20), vec![1, 2, 4, 5, 10, 20]);
        let big = 1_000_000_007u64 * 998_244_353;
        assert_eq!(factor(big), vec![(998_244_353, 1), (1_000_000_007, 1)]);
    }

    #[test]
    fn phi_mu_order() {
        assert_eq!(euler_phi(12), 4);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(12), 0);
        assert_eq!(multiplicative_order(5, 3), Some(2));
        assert_eq!(multiplicative_order(3, 5), Some(4));
        assert_eq!(multiplicative_order(10, 5), None);
    }

    #[test]
    fn modulus_ops() {
        let m = PrimeModulus::new(5);
        assert_eq!(m.inv(2), Some(3));
        assert_eq!(m.inv(0), None);
        assert_eq!(m.legendre(2), -1);
        assert_eq!(m.legendre(4), 1);
        let big = PrimeModulus::new((1 << 61) - 1);
        let x = (1u64 << 60) + 12345;
        assert_eq!(big.mul(x, big.inv(x).unwrap()), 1);
    }
}
