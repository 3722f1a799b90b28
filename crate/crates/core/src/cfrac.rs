//! Quadratic irrationals `(b + √Δ) / (2a)` and their continued fractions.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{floor_with_root, is_discriminant};
use crate::error::{Error, Result};

/// A primitive quadratic irrational `(b + √Δ) / (2a)` of positive discriminant.
///
/// `c = (b² − Δ) / (4a)` is carried along; `gcd(a, b, c) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadIrr {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    delta: BigInt,
    // ⌊√Δ⌋, cached for floor computations
    root: BigInt,
}

impl QuadIrr {
    /// Validating constructor. Primitivity is checked, never normalized away.
    pub fn new(a: BigInt, b: BigInt, delta: BigInt) -> Result<Self> {
        if !delta.is_positive() || !is_discriminant(&delta) {
            return Err(Error::NotDiscriminant(delta.to_string()));
        }
        if a.is_zero() {
            return Err(Error::NotIrrational(delta.to_string()));
        }
        let num: BigInt = &b * &b - &delta;
        let four_a: BigInt = &a * 4;
        if !(&num % &four_a).is_zero() {
            return Err(Error::NotIrrational(delta.to_string()));
        }
        let c = num / four_a;
        if !a.gcd(&b).gcd(&c).is_one() {
            return Err(Error::Imprimitive);
        }
        let root = delta.sqrt();
        Ok(QuadIrr { a, b, c, delta, root })
    }

    pub fn from_i64(a: i64, b: i64, delta: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), delta.into())
    }

    /// Converts `(p + q√m) / r` into canonical form. `q` and `r` must be
    /// nonzero and `m` a positive non-square.
    pub fn from_surd(p: i64, q: i64, r: i64, m: i64) -> Result<Self> {
        if q == 0 || r == 0 {
            return Err(Error::Invalid("surd with zero coefficient".into()));
        }
        let (p, q, r) = if r < 0 { (-p, -q, -r) } else { (p, q, r) };
        let (p, q, r, m) = (BigInt::from(p), BigInt::from(q), BigInt::from(r), BigInt::from(m));
        // minimal polynomial r²X² − 2prX + (p² − q²m), scaled to be primitive
        let mut a = &r * &r;
        let mut b = &p * &r * 2;
        let mut c = &p * &p - &q * &q * &m;
        let g = a.gcd(&b).gcd(&c);
        a /= &g;
        b /= &g;
        c /= &g;
        if q.is_negative() {
            // the smaller root (b − √Δ)/(2a) = (−b + √Δ)/(−2a)
            a = -a;
            b = -b;
            c = -c;
        }
        let delta = &b * &b - &a * &c * 4;
        Self::new(a, b, delta)
    }

    /// `ω_Δ = (σ_Δ + √Δ) / 2`.
    pub fn omega(delta: &BigInt) -> Result<Self> {
        let sigma = delta.mod_floor(&BigInt::from(2));
        Self::new(BigInt::one(), sigma, delta.clone())
    }

    /// A sibling of the same discriminant; the caller guarantees the invariants.
    pub(crate) fn sibling(&self, a: BigInt, b: BigInt, c: BigInt) -> Self {
        debug_assert_eq!(&b * &b - &a * &c * 4, self.delta);
        QuadIrr {
            a,
            b,
            c,
            delta: self.delta.clone(),
            root: self.root.clone(),
        }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn delta(&self) -> &BigInt {
        &self.delta
    }

    /// `⌊ξ⌋`.
    pub fn floor(&self) -> BigInt {
        floor_with_root(&self.a, &self.b, &self.root)
    }

    /// `ξ′ = (−b + √Δ) / (−2a)`.
    pub fn conjugate(&self) -> Self {
        self.sibling(-&self.a, -&self.b, -&self.c)
    }

    /// `−ξ′ = (−b + √Δ) / (2a)`, the inverse class.
    pub fn minus_conjugate(&self) -> Self {
        self.sibling(self.a.clone(), -&self.b, self.c.clone())
    }

    /// `−ξ = (b + √Δ) / (−2a)`.
    pub fn negate(&self) -> Self {
        self.sibling(-&self.a, self.b.clone(), -&self.c)
    }

    /// `ξ + n`.
    pub fn translate(&self, n: &BigInt) -> Self {
        let b = &self.b + &self.a * n * 2;
        let c = (&b * &b - &self.delta) / (&self.a * 4);
        self.sibling(self.a.clone(), b, c)
    }

    /// `−1/ξ`, which has leading coefficient `c`.
    pub fn s_transform(&self) -> Self {
        self.sibling(self.c.clone(), -&self.b, self.a.clone())
    }

    /// `ξ > 1` and `−1 < ξ′ < 0`.
    pub fn is_reduced(&self) -> bool {
        if !self.a.is_positive() || !self.b.is_positive() {
            return false;
        }
        self.floor() >= BigInt::one() && self.conjugate().floor() == -BigInt::one()
    }

    /// Sort key used to pick canonical class representatives.
    pub(crate) fn key(&self) -> (&BigInt, &BigInt) {
        (&self.a, &self.b)
    }
}

impl fmt::Display for QuadIrr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}+√{})/{}", self.b, self.delta, &self.a * 2)
    }
}

/// One continued-fraction step: `v = ⌊ξ⌋` and `1 / (ξ − v)`.
pub fn cf_step(xi: &QuadIrr) -> (BigInt, QuadIrr) {
    let v = xi.floor();
    let a_next = -(&xi.a * &v * &v - &xi.b * &v + &xi.c);
    let b_next = &xi.a * &v * 2 - &xi.b;
    let c_next = -xi.a.clone();
    (v, xi.sibling(a_next, b_next, c_next))
}

/// Preperiod and minimal period of a quadratic irrational's expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfExpansion {
    pub preperiod: Vec<BigInt>,
    pub period: Vec<BigInt>,
}

impl CfExpansion {
    pub fn k(&self) -> usize {
        self.preperiod.len()
    }
    pub fn l(&self) -> usize {
        self.period.len()
    }

    /// The same expansion with one period element moved into the preperiod.
    pub fn unrolled(&self) -> CfExpansion {
        let mut preperiod = self.preperiod.clone();
        preperiod.push(self.period[0].clone());
        let mut period = self.period.clone();
        period.rotate_left(1);
        CfExpansion { preperiod, period }
    }

    /// `Σ (−1)^(k+i) v_i` over the period, or 0 for odd period length.
    pub fn psi(&self) -> BigInt {
        if self.l() % 2 == 1 {
            return BigInt::zero();
        }
        let mut sum = BigInt::zero();
        for (i, v) in self.period.iter().enumerate() {
            if (self.k() + i) % 2 == 0 {
                sum += v;
            } else {
                sum -= v;
            }
        }
        sum
    }
}

fn fmt_list(f: &mut fmt::Formatter<'_>, xs: &[BigInt]) -> fmt::Result {
    f.write_str("[")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("]")
}

impl fmt::Display for CfExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("period=")?;
        fmt_list(f, &self.period)?;
        f.write_str(" preperiod=")?;
        fmt_list(f, &self.preperiod)
    }
}

/// Complete expansion data: digits plus the complete quotients that produced them.
#[derive(Debug, Clone)]
pub struct Orbit {
    /// `ξ_0, ξ_1, …` up to (excluding) the first repeated state.
    pub states: Vec<QuadIrr>,
    pub digits: Vec<BigInt>,
    /// Index of the first state on the cycle.
    pub cycle_start: usize,
}

impl Orbit {
    pub fn cycle_len(&self) -> usize {
        self.states.len() - self.cycle_start
    }
    pub fn cycle_states(&self) -> &[QuadIrr] {
        &self.states[self.cycle_start..]
    }
}

/// Runs `cf_step` until a state repeats.
pub fn orbit(xi: &QuadIrr) -> Orbit {
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut states = Vec::new();
    let mut digits = Vec::new();
    let mut cur = xi.clone();
    loop {
        let key = (cur.a.clone(), cur.b.clone());
        if let Some(&start) = seen.get(&key) {
            return Orbit {
                states,
                digits,
                cycle_start: start,
            };
        }
        seen.insert(key, states.len());
        let (v, next) = cf_step(&cur);
        states.push(cur);
        digits.push(v);
        cur = next;
    }
}

pub fn expand(xi: &QuadIrr) -> CfExpansion {
    let o = orbit(xi);
    CfExpansion {
        preperiod: o.digits[..o.cycle_start].to_vec(),
        period: o.digits[o.cycle_start..].to_vec(),
    }
}

/// The Hirzebruch sum `Ψ(ξ)`.
pub fn hirzebruch_psi(xi: &QuadIrr) -> BigInt {
    expand(xi).psi()
}

/// `ξ^op = ⌊ξ⌋ − ξ′`.
pub fn opposite(xi: &QuadIrr) -> QuadIrr {
    let v = xi.floor();
    let b = &xi.a * &v * 2 - &xi.b;
    let c = (&b * &b - &xi.delta) / (&xi.a * 4);
    xi.sibling(xi.a.clone(), b, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::big;
    use proptest::prelude::*;

    fn q(a: i64, b: i64, d: i64) -> QuadIrr {
        QuadIrr::from_i64(a, b, d).unwrap()
    }

    fn digits(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| big(x)).collect()
    }

    #[test]
    fn construction() {
        let x = q(1, 0, 96);
        assert_eq!(x.c(), &big(-24));
        let y = q(4, 4, 96);
        assert_eq!(y.c(), &big(-5));
        assert_eq!(QuadIrr::from_i64(2, 0, 96), Err(Error::Imprimitive));
        assert_eq!(
            QuadIrr::from_i64(1, 1, 12).unwrap_err().to_string(),
            "not a discriminant-12 irrational"
        );
        assert!(QuadIrr::from_i64(1, 0, 16).is_err());
        assert!(QuadIrr::from_i64(0, 0, 12).is_err());
    }

    #[test]
    fn surd_conversion() {
        assert_eq!(QuadIrr::from_surd(0, 2, 1, 6).unwrap(), q(1, 0, 96));
        assert_eq!(QuadIrr::from_surd(1, 1, 2, 6).unwrap(), q(4, 4, 96));
        assert_eq!(QuadIrr::from_surd(0, 1, 1, 3).unwrap(), q(1, 0, 12));
        assert_eq!(QuadIrr::from_surd(1, 1, 2, 5).unwrap(), q(1, 1, 5));
        // −√3 = (0 + √12)/(−2)
        assert_eq!(QuadIrr::from_surd(0, -1, 1, 3).unwrap(), q(-1, 0, 12));
    }

    #[test]
    fn conjugates() {
        assert_eq!(q(1, 0, 96).conjugate(), q(-1, 0, 96));
        assert_eq!(q(4, 4, 96).conjugate(), q(-4, -4, 96));
        assert_eq!(q(4, 4, 96).minus_conjugate(), q(4, -4, 96));
        let x = q(3, 5, 13);
        assert_eq!(x.conjugate().conjugate(), x);
        // −ξ′ numerically: (1+√6)/2 → (√6−1)/2 ≈ 0.7247
        let m = q(4, 4, 96).minus_conjugate();
        assert_eq!(m.floor(), big(0));
    }

    #[test]
    fn reduced_examples() {
        assert!(q(8, 8, 96).is_reduced());
        assert!(!q(1, 0, 96).is_reduced());
        assert!(q(4, 4, 96).is_reduced());
        assert!(q(1, 1, 5).is_reduced());
    }

    #[test]
    fn step_examples() {
        let (v, n) = cf_step(&q(1, 0, 96));
        assert_eq!((v, n), (big(4), q(8, 8, 96)));
        let (v, n) = cf_step(&q(8, 8, 96));
        assert_eq!((v, n), (big(1), q(1, 8, 96)));
        let (v, n) = cf_step(&q(4, 4, 96));
        assert_eq!((v, n), (big(1), q(5, 4, 96)));
    }

    #[test]
    fn expansion_examples() {
        let e = expand(&q(1, 0, 96));
        assert_eq!(e.preperiod, digits(&[4]));
        assert_eq!(e.period, digits(&[1, 8]));
        let e = expand(&q(4, 4, 96));
        assert!(e.preperiod.is_empty());
        assert_eq!(e.period, digits(&[1, 1, 2, 1]));
        let e = expand(&q(1, 0, 12));
        assert_eq!(e.preperiod, digits(&[1]));
        assert_eq!(e.period, digits(&[1, 2]));
        assert_eq!(e.to_string(), "period=[1,2] preperiod=[1]");
    }

    #[test]
    fn psi_examples() {
        assert_eq!(hirzebruch_psi(&q(1, 0, 96)), big(7));
        assert_eq!(hirzebruch_psi(&q(4, 4, 96)), big(1));
        assert_eq!(hirzebruch_psi(&q(1, 0, 32 * 163)), big(63));
        assert_eq!(hirzebruch_psi(&q(1, 0, 12)), big(1));
        // odd period: golden ratio
        assert_eq!(hirzebruch_psi(&q(1, 1, 5)), big(0));
    }

    #[test]
    fn opposite_examples() {
        assert_eq!(opposite(&q(8, 8, 96)), q(8, 8, 96));
        assert_eq!(opposite(&q(4, 4, 96)), q(4, 4, 96));
        let x = q(5, 4, 96);
        assert!(x.is_reduced());
        assert_eq!(opposite(&opposite(&x)), x);
    }

    /// Floating-point sanity check of the continued fraction digits; independent
    /// of the integer recurrence.
    fn float_digits(xi: &QuadIrr, n: usize) -> Vec<i64> {
        let a: f64 = xi.a().try_into().map(|v: i64| v as f64).unwrap();
        let b: f64 = xi.b().try_into().map(|v: i64| v as f64).unwrap();
        let d: f64 = xi.delta().try_into().map(|v: i64| v as f64).unwrap();
        let mut x = (b + d.sqrt()) / (2.0 * a);
        let mut out = Vec::new();
        for _ in 0..n {
            let v = x.floor();
            out.push(v as i64);
            x = 1.0 / (x - v);
        }
        out
    }

    #[test]
    fn digits_agree_with_floats_for_short_prefixes() {
        for (a, b, d) in [(1, 0, 96), (4, 4, 96), (1, 0, 12), (1, 1, 5), (3, 5, 13), (-2, 3, 17)] {
            let x = q(a, b, d);
            let o = orbit(&x);
            let got: Vec<i64> = o.digits.iter().take(5).map(|v| v.try_into().unwrap()).collect();
            assert_eq!(got, float_digits(&x, got.len()), "{x}");
        }
    }

    fn arbitrary_irrational() -> impl Strategy<Value = QuadIrr> {
        (2i64..3000, -40i64..40, 1i64..40).prop_filter_map("valid", |(d, b, a)| {
            if !is_discriminant(&big(d)) {
                return None;
            }
            let b = if (b - d).rem_euclid(2) == 0 { b } else { b + 1 };
            for aa in [a, -a] {
                if let Ok(x) = QuadIrr::from_i64(aa, b, d) {
                    return Some(x);
                }
            }
            None
        })
    }

    fn reduced_from(x: &QuadIrr) -> QuadIrr {
        let o = orbit(x);
        o.cycle_states()[0].clone()
    }

    proptest! {
        #[test]
        fn cycle_states_are_reduced(x in arbitrary_irrational()) {
            let o = orbit(&x);
            for s in o.cycle_states() {
                prop_assert!(s.is_reduced());
            }
            for s in &o.states[..o.cycle_start] {
                // a reduced state would already be periodic
                prop_assert!(!s.is_reduced() || o.cycle_start == 0);
            }
            prop_assert!(o.digits[o.cycle_start..].iter().all(|v| v >= &BigInt::one()));
        }

        #[test]
        fn psi_invariant_under_unrolling(x in arbitrary_irrational()) {
            let e = expand(&x);
            prop_assert_eq!(e.psi(), e.unrolled().psi());
            prop_assert_eq!(e.psi(), e.unrolled().unrolled().psi());
        }

        #[test]
        fn reversed_period_of_minus_inverse_conjugate(x in arbitrary_irrational()) {
            let r = reduced_from(&x);
            let e = expand(&r);
            prop_assert!(e.preperiod.is_empty());
            // −1/ξ′ = s_transform of the conjugate
            let y = r.conjugate().s_transform();
            prop_assert!(y.is_reduced());
            let ey = expand(&y);
            prop_assert!(ey.preperiod.is_empty());
            let mut rev = e.period.clone();
            rev.reverse();
            prop_assert_eq!(ey.period, rev);
        }

        #[test]
        fn opposite_is_an_involution_on_reduced(x in arbitrary_irrational()) {
            let r = reduced_from(&x);
            let op = opposite(&r);
            prop_assert!(op.is_reduced());
            prop_assert_eq!(opposite(&op), r);
        }

        #[test]
        fn conjugation_is_an_involution(x in arbitrary_irrational()) {
            prop_assert_eq!(x.conjugate().conjugate(), x.clone());
            prop_assert_eq!(x.minus_conjugate().minus_conjugate(), x);
        }
    }
}
