//! Integer utilities: square roots, Kronecker symbols, discriminant
//! decomposition, factorization and small congruence solvers.
//!
//! Everything works on [`BigInt`]; unit coefficients overflow 64 bits long
//! before the sweeps reach their upper bounds.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with positive denominator.
pub type ExactRational = BigRational;

/// A quadratic discriminant written as `delta = d * f^2` with `d` fundamental.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiscriminantSplit {
    pub delta: BigInt,
    pub d: BigInt,
    pub f: BigInt,
}

/// Signed prime factorization. `factors` is sorted by prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub negative: bool,
    pub factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    pub fn value(&self) -> BigInt {
        let mut v = BigInt::one();
        for (p, e) in &self.factors {
            v *= num_traits::pow(p.clone(), *e as usize);
        }
        if self.negative {
            -v
        } else {
            v
        }
    }
}

impl fmt::Display for Factorization {
    /// `2^5·13` style; an empty factorization prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// `floor(sqrt(n))`.
pub fn isqrt(n: &BigInt) -> Result<BigInt> {
    if n.is_negative() {
        return Err(Error::Negative(n.to_string()));
    }
    Ok(n.sqrt())
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = n.sqrt();
    &s * &s == *n
}

/// Nonnegative residue of `a` modulo `m > 0`.
pub fn mod_floor(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

fn kronecker_two(a: &BigInt) -> i32 {
    // (a/2) for odd a depends on a mod 8
    match a.mod_floor(&big(8)).to_u8().unwrap_or(0) {
        1 | 7 => 1,
        _ => -1,
    }
}

/// Jacobi symbol `(a/n)` for odd `n > 0`.
fn jacobi(a: &BigInt, n: &BigInt) -> i32 {
    debug_assert!(n.is_positive() && n.is_odd());
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut result = 1;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            a >>= tz;
            if tz % 2 == 1 {
                let r = (&n % 8u32).to_u8().unwrap();
                if r == 3 || r == 5 {
                    result = -result;
                }
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u8() == Some(3) && (&n % 4u32).to_u8() == Some(3) {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// The Kronecker symbol `(a/n)` for arbitrary integers, including `n <= 0`
/// and even `n`.
pub fn kronecker(a: &BigInt, n: &BigInt) -> i32 {
    if n.is_zero() {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    let mut result = 1;
    let mut n = n.clone();
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            result = -result;
        }
    }
    let tz = n.trailing_zeros().unwrap_or(0);
    if tz > 0 {
        if a.is_even() {
            return 0;
        }
        if tz % 2 == 1 {
            result *= kronecker_two(a);
        }
        n >>= tz;
    }
    if n.is_one() {
        return result;
    }
    result * jacobi(a, &n)
}

/// `kronecker` on machine integers.
pub fn kronecker_i64(a: i64, n: i64) -> i32 {
    kronecker(&big(a), &big(n))
}

/// Non-square and congruent to 0 or 1 mod 4.
pub fn is_discriminant(delta: &BigInt) -> bool {
    let r = delta.mod_floor(&big(4));
    (r.is_zero() || r.is_one()) && !is_square(delta)
}

fn is_squarefree(n: &BigInt) -> bool {
    if n.is_zero() {
        return false;
    }
    factorize(n)
        .map(|f| f.factors.iter().all(|(_, e)| *e == 1))
        .unwrap_or(false)
}

/// Discriminant of a quadratic field.
pub fn is_fundamental(d: &BigInt) -> bool {
    if d.is_one() || d.is_zero() {
        return false;
    }
    let r = d.mod_floor(&big(4));
    if r.is_one() {
        return is_squarefree(d);
    }
    if r.is_zero() {
        let m: BigInt = d / 4;
        let rm = m.mod_floor(&big(4));
        return (rm == big(2) || rm == big(3)) && is_squarefree(&m);
    }
    false
}

/// Splits a quadratic discriminant into fundamental part and conductor.
pub fn discriminant_split(delta: &BigInt) -> Result<DiscriminantSplit> {
    if !is_discriminant(delta) {
        return Err(Error::NotDiscriminant(delta.to_string()));
    }
    let fac = factorize(delta)?;
    let mut core = if fac.negative { -BigInt::one() } else { BigInt::one() };
    let mut f = BigInt::one();
    for (p, e) in &fac.factors {
        if e % 2 == 1 {
            core *= p;
        }
        f *= num_traits::pow(p.clone(), (*e / 2) as usize);
    }
    let (d, f) = if core.mod_floor(&big(4)).is_one() {
        (core, f)
    } else {
        // core is 2 or 3 mod 4, so the square part carries the factor 4
        debug_assert!(f.is_even());
        (core * 4, f / 2)
    };
    debug_assert!(is_fundamental(&d));
    Ok(DiscriminantSplit {
        delta: delta.clone(),
        d,
        f,
    })
}

/// Prime discriminants `{-4, 8, -8} ∪ {(-1)^((q-1)/2) q}` whose product is `d`,
/// sorted ascending.
pub fn prime_discriminants(d: &BigInt) -> Result<Vec<BigInt>> {
    if !is_fundamental(d) {
        return Err(Error::NotFundamental(d.to_string()));
    }
    let fac = factorize(d)?;
    let mut out = Vec::new();
    let mut odd_product = BigInt::one();
    for (q, _) in &fac.factors {
        if q == &big(2) {
            continue;
        }
        let qs = if (q % 4u32).to_u8() == Some(1) {
            q.clone()
        } else {
            -q.clone()
        };
        odd_product *= &qs;
        out.push(qs);
    }
    if d.is_even() {
        let two_part = d / &odd_product;
        debug_assert!([-4, 8, -8].iter().any(|v| two_part == big(*v)));
        out.push(two_part);
    } else {
        debug_assert_eq!(&odd_product, d);
    }
    out.sort();
    Ok(out)
}

/// Prime factorization by trial division.
pub fn factorize(n: &BigInt) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::Zero);
    }
    let negative = n.is_negative();
    let mut m = n.abs();
    let mut factors = Vec::new();
    if let Some(mut small) = m.to_u64() {
        let mut push = |p: u64, e: u32| factors.push((BigInt::from(p), e));
        let mut p = 2u64;
        while p <= small / p {
            if small % p == 0 {
                let mut e = 0;
                while small % p == 0 {
                    small /= p;
                    e += 1;
                }
                push(p, e);
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if small > 1 {
            push(small, 1);
        }
        return Ok(Factorization { negative, factors });
    }
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        if (&m % &p).is_zero() {
            let mut e = 0;
            while (&m % &p).is_zero() {
                m /= &p;
                e += 1;
            }
            factors.push((p.clone(), e));
        }
        p += if p == big(2) { 1 } else { 2 };
    }
    if !m.is_one() {
        factors.push((m, 1));
    }
    Ok(Factorization { negative, factors })
}

/// `floor((b + sqrt(delta)) / (2a))` with integer arithmetic only.
///
/// Panics if `delta` is negative or `a` is zero.
pub fn floor_quad(a: &BigInt, b: &BigInt, delta: &BigInt) -> BigInt {
    assert!(!a.is_zero(), "floor_quad: zero denominator");
    let s = delta.sqrt();
    debug_assert!(&s * &s != *delta, "floor_quad: square discriminant");
    floor_with_root(a, b, &s)
}

/// `floor_quad` given `root = ⌊√Δ⌋` for a non-square `Δ`.
pub(crate) fn floor_with_root(a: &BigInt, b: &BigInt, root: &BigInt) -> BigInt {
    let num: BigInt = b + root;
    let den: BigInt = a * 2;
    if a.is_positive() {
        num.div_floor(&den)
    } else {
        // b + sqrt(delta) lies strictly between num and num + 1
        let m = -den;
        let q: BigInt = num.div_floor(&m);
        -(q + 1u32)
    }
}

/// Solves `a x ≡ b (mod m)`; returns `(x0, m')` meaning `x ≡ x0 (mod m')`.
pub fn solve_linear_congruence(a: &BigInt, b: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    debug_assert!(m.is_positive());
    let a = a.mod_floor(m);
    let g = a.gcd(m);
    if !(b.mod_floor(&g)).is_zero() {
        return None;
    }
    let m2 = m / &g;
    if m2.is_one() {
        return Some((BigInt::zero(), BigInt::one()));
    }
    let a2 = &a / &g;
    let b2 = b / &g;
    let inv = mod_inverse(&a2, &m2)?;
    Some(((b2 * inv).mod_floor(&m2), m2))
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Combines `x ≡ r1 (mod m1)` and `x ≡ r2 (mod m2)` for arbitrary moduli.
pub fn crt_pair(r1: &BigInt, m1: &BigInt, r2: &BigInt, m2: &BigInt) -> Option<(BigInt, BigInt)> {
    let g = m1.gcd(m2);
    let diff = r2 - r1;
    if !diff.mod_floor(&g).is_zero() {
        return None;
    }
    let m2g = m2 / &g;
    let lcm = m1 * &m2g;
    if m2g.is_one() {
        return Some((r1.mod_floor(&lcm), lcm));
    }
    let inv = mod_inverse(&(m1 / &g), &m2g)?;
    let t = ((diff / &g) * inv).mod_floor(&m2g);
    Some(((r1 + m1 * t).mod_floor(&lcm), lcm))
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}
