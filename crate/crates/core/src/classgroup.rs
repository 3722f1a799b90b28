//! Classes of quadratic irrationals of a positive discriminant: composition,
//! canonical representatives, genus characters and the identity relating
//! Hirzebruch sums to imaginary class numbers.
//!
//! An irrational `(b+√Δ)/(2a)` stands for the ideal `[a, (b+√Δ)/2]`. Proper
//! (narrow) equivalence is `SL₂(Z)`, wide equivalence is `GL₂(Z)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{
    crt_pair, factorize, is_fundamental, kronecker, prime_discriminants, solve_linear_congruence,
    ExactRational,
};
use crate::cfrac::{cf_step, orbit, QuadIrr};
use crate::error::{Error, Result};
use crate::orders::{class_number_imag, fundamental_unit, reduced_cycles, roots_of_unity_count};

fn same_delta(xi: &QuadIrr, eta: &QuadIrr) -> Result<()> {
    if xi.delta() != eta.delta() {
        return Err(Error::DiscriminantMismatch(xi.delta().to_string(), eta.delta().to_string()));
    }
    Ok(())
}

/// Product class `[ξ]·[η]`, returned as `(b₃+√Δ)/(2a₃)` with `0 ≤ b₃ < 2a₃`.
pub fn compose(xi: &QuadIrr, eta: &QuadIrr) -> Result<QuadIrr> {
    same_delta(xi, eta)?;
    for x in [xi, eta] {
        if !x.a().is_positive() {
            return Err(Error::NotPositive(x.a().to_string()));
        }
    }
    let delta = xi.delta();
    let (a1, b1, a2, b2) = (xi.a(), xi.b(), eta.a(), eta.b());
    let half_sum: BigInt = (b1 + b2) / 2;
    let e = a1.gcd(a2).gcd(&half_sum);
    let a3 = a1 * a2 / (&e * &e);
    let two_a3: BigInt = &a3 * 2;

    let m1: BigInt = a1 * 2 / &e;
    let m2: BigInt = a2 * 2 / &e;
    let (r, m) = crt_pair(b1, &m1, b2, &m2)
        .ok_or_else(|| Error::Internal(format!("composition of {xi} and {eta}: first pair inconsistent")))?;
    let lhs: BigInt = &half_sum / &e;
    let rhs: BigInt = (delta + b1 * b2) / (&e * 2);
    let (r3, m3) = solve_linear_congruence(&lhs, &rhs, &two_a3)
        .ok_or_else(|| Error::Internal(format!("composition of {xi} and {eta}: third congruence unsolvable")))?;
    let (b3, modulus) = crt_pair(&r, &m, &r3, &m3)
        .ok_or_else(|| Error::Internal(format!("composition of {xi} and {eta}: system inconsistent")))?;
    if !(&two_a3 % &modulus).is_zero() {
        return Err(Error::Internal(format!("composition of {xi} and {eta}: b₃ not unique mod 2a₃")));
    }
    let b3 = b3.mod_floor(&two_a3);
    QuadIrr::new(a3, b3, delta.clone())
        .map_err(|e| Error::Internal(format!("composition of {xi} and {eta}: {e}")))
}

/// Canonical representative of the proper class of `ξ`: the least `(a, b)`
/// among the even-index states of its continued fraction once periodic.
pub fn reduce_rep(xi: &QuadIrr) -> QuadIrr {
    let o = orbit(xi);
    let l = o.cycle_len();
    let start = o.cycle_start;
    let first_even = start + start % 2;
    (first_even..start + 2 * l)
        .step_by(2)
        .map(|j| &o.states[start + (j - start) % l])
        .min_by(|x, y| x.key().cmp(&y.key()))
        .expect("cycle is never empty")
        .clone()
}

pub fn properly_equivalent(xi: &QuadIrr, eta: &QuadIrr) -> Result<bool> {
    same_delta(xi, eta)?;
    Ok(reduce_rep(xi) == reduce_rep(eta))
}

/// Same continued-fraction cycle, so equivalent under `GL₂(Z)`.
pub fn widely_equivalent(xi: &QuadIrr, eta: &QuadIrr) -> Result<bool> {
    same_delta(xi, eta)?;
    let target = reduce_rep(eta);
    Ok(reduce_rep(xi) == target || reduce_rep(&cf_step(xi).1) == target)
}

/// The class of `ξ` in the form `(c, −b, a)`, i.e. `−1/ξ`, when `a` is even.
/// Used before lifting, which needs an odd leading coefficient.
pub fn odd_representative(xi: &QuadIrr) -> Result<QuadIrr> {
    if xi.a().is_odd() {
        return Ok(xi.clone());
    }
    let s = xi.s_transform();
    if s.a().is_even() {
        return Err(Error::EvenLeading(s.a().to_string()));
    }
    Ok(s)
}

/// `(a, b, c) ↦ (a, 2b, 4c)`: from discriminant `Δ` to `4Δ`.
pub fn lift_class(xi: &QuadIrr) -> Result<QuadIrr> {
    if xi.a().is_even() {
        return Err(Error::EvenLeading(xi.a().to_string()));
    }
    QuadIrr::new(xi.a().clone(), xi.b() * 2, xi.delta() * 4)
}

/// Narrow and wide classes of a positive discriminant with canonical
/// representatives.
#[derive(Debug, Clone)]
pub struct ClassTable {
    pub delta: BigInt,
    pub narrow_reps: Vec<QuadIrr>,
    pub wide_reps: Vec<QuadIrr>,
    pub principal: QuadIrr,
    /// Cycle length behind each wide representative.
    pub cycle_lens: Vec<usize>,
    index: HashMap<(BigInt, BigInt), usize>,
}

impl ClassTable {
    pub fn new(delta: &BigInt) -> Result<Self> {
        let cycles = reduced_cycles(delta)?;
        let mut narrow_reps = Vec::new();
        let mut wide_reps = Vec::new();
        let mut cycle_lens = Vec::new();
        for c in &cycles {
            let w = reduce_rep(&c.states[0]);
            wide_reps.push(w.clone());
            narrow_reps.push(w);
            if c.len() % 2 == 0 {
                narrow_reps.push(reduce_rep(&c.states[1]));
            }
            cycle_lens.push(c.len());
        }
        let index: HashMap<_, _> = narrow_reps
            .iter()
            .enumerate()
            .map(|(i, x)| ((x.a().clone(), x.b().clone()), i))
            .collect();
        if index.len() != narrow_reps.len() {
            return Err(Error::Internal(format!("duplicate narrow representatives for Δ={delta}")));
        }
        let principal = reduce_rep(&QuadIrr::omega(delta)?);
        Ok(ClassTable { delta: delta.clone(), narrow_reps, wide_reps, principal, cycle_lens, index })
    }

    pub fn h(&self) -> usize {
        self.wide_reps.len()
    }

    pub fn h_plus(&self) -> usize {
        self.narrow_reps.len()
    }

    /// Index into `narrow_reps` of the proper class of `ξ`.
    pub fn class_index(&self, xi: &QuadIrr) -> Option<usize> {
        if xi.delta() != &self.delta {
            return None;
        }
        let r = reduce_rep(xi);
        self.index.get(&(r.a().clone(), r.b().clone())).copied()
    }

    fn product(&self, i: usize, j: usize) -> Result<usize> {
        let c = compose(&self.narrow_reps[i], &self.narrow_reps[j])?;
        self.class_index(&c)
            .ok_or_else(|| Error::Internal(format!("product {c} outside the class table")))
    }

    /// Full multiplication table on narrow classes.
    pub fn multiplication_table(&self) -> Result<Vec<Vec<usize>>> {
        let n = self.h_plus();
        (0..n).map(|i| (0..n).map(|j| self.product(i, j)).collect()).collect()
    }

    /// Closure, identity, inverses `[ξ]·[−ξ′]`, commutativity and associativity.
    pub fn verify_group_laws(&self) -> Result<()> {
        let n = self.h_plus();
        let t = self.multiplication_table()?;
        let e = self
            .class_index(&self.principal)
            .ok_or_else(|| Error::Internal("principal class missing".into()))?;
        for i in 0..n {
            if t[i][e] != i || t[e][i] != i {
                return Err(Error::Internal(format!("identity fails on {}", self.narrow_reps[i])));
            }
            let inv = self
                .class_index(&self.narrow_reps[i].minus_conjugate())
                .ok_or_else(|| Error::Internal("inverse outside table".into()))?;
            if t[i][inv] != e {
                return Err(Error::Internal(format!("−ξ′ is not inverse to {}", self.narrow_reps[i])));
            }
            for j in 0..n {
                if t[i][j] != t[j][i] {
                    return Err(Error::Internal(format!("composition not commutative at ({i},{j})")));
                }
                for k in 0..n {
                    if t[t[i][j]][k] != t[i][t[j][k]] {
                        return Err(Error::Internal(format!("composition not associative at ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn class_table(delta: &BigInt) -> Result<ClassTable> {
    ClassTable::new(delta)
}

fn check_pair(d1: &BigInt, d2: &BigInt) -> Result<()> {
    for d in [d1, d2] {
        if !is_fundamental(d) {
            return Err(Error::NotFundamental(d.to_string()));
        }
    }
    if d1 == d2 {
        return Err(Error::Invalid(format!("d1 and d2 must differ, both are {d1}")));
    }
    Ok(())
}

/// `χ^{(Δ)}_{d₁,d₂}(ξ)` for `Δ = d₁d₂f²`.
pub fn genus_character(d1: &BigInt, d2: &BigInt, xi: &QuadIrr) -> Result<i32> {
    let d1d2 = d1 * d2;
    let ratio = xi.delta().div_rem(&d1d2);
    if !ratio.1.is_zero() || !ratio.0.is_positive() || !crate::arith::is_square(&ratio.0) {
        return Err(Error::DiscriminantMismatch(xi.delta().to_string(), d1d2.to_string()));
    }
    let mut value = 1;
    for q in prime_discriminants(d1)? {
        let on_a = if xi.a().gcd(&q).is_one() { Some(kronecker(&q, xi.a())) } else { None };
        let on_c = if xi.c().gcd(&q).is_one() { Some(kronecker(&q, xi.c())) } else { None };
        let v = match (on_a, on_c) {
            (Some(x), Some(y)) if x != y => {
                return Err(Error::Internal(format!("χ_{q} disagrees on a and c of {xi}")));
            }
            (Some(x), _) | (None, Some(x)) => x,
            (None, None) => return Err(Error::CharacterUndefined),
        };
        value *= v;
    }
    Ok(value)
}

/// The local factor product `θ(d₁, d₂, f)` over primes dividing the conductor.
pub fn theta(d1: &BigInt, d2: &BigInt, f: &BigInt) -> Result<ExactRational> {
    if !f.is_positive() {
        return Err(Error::NotPositive(f.to_string()));
    }
    let mut out = BigRational::one();
    for (p, m) in factorize(f)?.factors {
        let c1 = BigInt::from(kronecker(d1, &p));
        let c2 = BigInt::from(kronecker(d2, &p));
        let one = BigInt::one();
        let num = (&one - &c1) * (&one - &c2) - num_traits::pow(p.clone(), (m - 1) as usize) * (&p - &c1) * (&p - &c2);
        out *= BigRational::new(num, &one - &p);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KmzResult {
    #[serde(serialize_with = "crate::congruence::ser_display")]
    pub lhs: ExactRational,
    #[serde(serialize_with = "crate::congruence::ser_display")]
    pub rhs: BigInt,
    pub equal: bool,
}

/// Sum of `χ·Ψ` over the wide classes of `Δ`, one cycle head per class.
pub fn chi_psi_sum(d1: &BigInt, d2: &BigInt, delta: &BigInt) -> Result<BigInt> {
    let mut sum = BigInt::zero();
    for c in reduced_cycles(delta)? {
        if c.len() % 2 == 1 {
            return Err(Error::Internal(format!("odd cycle for Δ={delta} although N(ε)=1")));
        }
        let head = &c.states[0];
        sum += c.psi() * genus_character(d1, d2, head)?;
    }
    Ok(sum)
}

/// Both sides of `24 h(d₁)h(d₂)/(w₁w₂)·θ = Σ χΨ` for `Δ = d₁d₂f²`.
pub fn kmz_check(d1: &BigInt, d2: &BigInt, f: &BigInt) -> Result<KmzResult> {
    check_pair(d1, d2)?;
    if !d1.is_negative() || !d2.is_negative() {
        return Err(Error::Invalid(format!("d1={d1} and d2={d2} must both be negative")));
    }
    let th = theta(d1, d2, f)?;
    let delta = d1 * d2 * f * f;
    if fundamental_unit(&delta)?.norm == -1 {
        return Err(Error::Internal(format!("N(ε)=-1 for Δ={delta}")));
    }
    let h = BigInt::from(class_number_imag(d1)? * class_number_imag(d2)?);
    let w = BigInt::from(roots_of_unity_count(d1)? * roots_of_unity_count(d2)?);
    let lhs = BigRational::new(h * 24, w) * th;
    let rhs = chi_psi_sum(d1, d2, &delta)?;
    let equal = lhs == BigRational::from_integer(rhs.clone());
    Ok(KmzResult { lhs, rhs, equal })
}

/// Class of an ambiguous ideal of `O_{32p}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AmbiguousClass {
    Principal,
    Am,
}

#[derive(Debug, Clone)]
pub struct AmbiguousData {
    pub p: u64,
    /// `√(8p)` and `(2+√(8p))/4`.
    pub am_reps: [QuadIrr; 2],
    /// The eight ideals `(a, (b+√Δ)/2)` keyed by `(a, b)`.
    pub ideal_classes: Vec<((u64, u64), AmbiguousClass)>,
}

/// Ambiguous ideals of discriminant `32p` and the class each falls in,
/// checked against the expected split for `p mod 8`.
pub fn ambiguous_data(p: u64) -> Result<AmbiguousData> {
    if p % 4 != 3 || !crate::arith::is_prime_u64(p) {
        return Err(Error::BadPrime(p.to_string()));
    }
    let delta = BigInt::from(32) * p;
    let irr = |a: u64, b: u64| QuadIrr::new(BigInt::from(a), BigInt::from(b), delta.clone());
    let principal = irr(1, 0)?;
    let am = irr(4, 4)?;
    if widely_equivalent(&principal, &am)? {
        return Err(Error::Internal(format!("ω and ω^Am coincide for p={p}")));
    }
    let ideals = [(1, 0), (8, 0), (p, 0), (8 * p, 0), (4, 4), (8, 8), (4 * p, 4 * p), (8 * p, 8 * p)];
    let mut ideal_classes = Vec::new();
    for (a, b) in ideals {
        let x = irr(a, b)?;
        let class = if widely_equivalent(&x, &principal)? {
            AmbiguousClass::Principal
        } else if widely_equivalent(&x, &am)? {
            AmbiguousClass::Am
        } else {
            return Err(Error::Internal(format!("ideal ({a}, {b}) outside Am(32·{p})")));
        };
        ideal_classes.push(((a, b), class));
    }
    let expected_principal: [(u64, u64); 4] = if p % 8 == 3 {
        [(1, 0), (8, 8), (4 * p, 4 * p), (8 * p, 0)]
    } else {
        [(1, 0), (8, 0), (p, 0), (8 * p, 0)]
    };
    for (key, class) in &ideal_classes {
        let want = if expected_principal.contains(key) { AmbiguousClass::Principal } else { AmbiguousClass::Am };
        if *class != want {
            return Err(Error::Internal(format!("ideal {key:?} lands in {class:?} for p={p}")));
        }
    }
    Ok(AmbiguousData { p, am_reps: [principal, am], ideal_classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::big;

    fn q(a: i64, b: i64, d: i64) -> QuadIrr {
        QuadIrr::from_i64(a, b, d).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(big(n), big(d))
    }

    #[test]
    fn compose_examples() {
        assert_eq!(compose(&q(1, 0, 96), &q(4, 4, 96)).unwrap(), q(4, 4, 96));
        let x = q(4, 4, 96);
        let inv = compose(&x, &x.minus_conjugate()).unwrap();
        assert!(properly_equivalent(&inv, &q(1, 0, 96)).unwrap());
        let c = compose(&q(1, 0, 96), &q(4, 4, 96)).unwrap();
        assert_eq!(c.a(), &big(4));
        assert_eq!(c.b().mod_floor(&big(8)), big(4));
        assert!(compose(&q(1, 0, 96), &q(1, 0, 24)).is_err());
    }

    #[test]
    fn reduce_rep_properties() {
        let x = q(1, 0, 96);
        let r = reduce_rep(&x);
        assert!(r.is_reduced());
        assert_eq!(reduce_rep(&r), r);
        let y = q(4, 4, 96);
        let y2 = cf_step(&cf_step(&y).1).1;
        assert_eq!(reduce_rep(&y), reduce_rep(&y2));
        // √24 → (8,8) → (1,8) → (8,8) …; only (1,8) sits at even steps
        assert_eq!(r, q(1, 8, 96));
    }

    #[test]
    fn equivalence_examples() {
        let root = q(1, 0, 96);
        let am = q(4, 4, 96);
        assert!(!widely_equivalent(&root, &am).unwrap());
        assert!(widely_equivalent(&root, &cf_step(&root).1).unwrap());
        assert!(!properly_equivalent(&q(1, 0, 24), &q(2, 4, 24)).unwrap());
        assert!(widely_equivalent(&q(1, 0, 24), &q(2, 4, 24)).unwrap());
    }

    #[test]
    fn opposite_is_wide_inverse() {
        use crate::cfrac::opposite;
        for d in [96i64, 1304, 316, 221] {
            let t = class_table(&big(d)).unwrap();
            for x in &t.narrow_reps {
                let c = compose(x, &opposite(x)).unwrap();
                assert!(widely_equivalent(&c, &t.principal).unwrap(), "Δ={d} ξ={x}");
            }
        }
    }

    #[test]
    fn class_table_examples() {
        let t = class_table(&big(96)).unwrap();
        assert_eq!((t.h(), t.h_plus()), (2, 4));
        assert!(t.class_index(&q(1, 0, 96)).is_some());
        assert_ne!(t.class_index(&q(1, 0, 96)), t.class_index(&q(4, 4, 96)));
        let t = class_table(&big(1304)).unwrap();
        assert_eq!(t.h(), 3);
        let t = class_table(&big(24)).unwrap();
        assert_eq!((t.h(), t.h_plus()), (1, 2));
    }

    #[test]
    fn group_laws_small() {
        for d in [24i64, 96, 316, 1304, 5, 13, 60, 145, 221, 4 * 82] {
            class_table(&big(d)).unwrap().verify_group_laws().unwrap();
        }
    }

    #[test]
    fn genus_character_examples() {
        let (m4, m24) = (big(-4), big(-24));
        assert_eq!(genus_character(&m4, &m24, &q(4, 4, 96)).unwrap(), -1);
        assert_eq!(genus_character(&m4, &m24, &q(1, 0, 96)).unwrap(), 1);
        assert!(genus_character(&m4, &m24, &q(1, 0, 12)).is_err());
    }

    #[test]
    fn genus_character_multiplicative() {
        let (m4, m24) = (big(-4), big(-24));
        let t = class_table(&big(96)).unwrap();
        for x in &t.narrow_reps {
            for y in &t.narrow_reps {
                let xy = compose(x, y).unwrap();
                assert_eq!(
                    genus_character(&m4, &m24, &xy).unwrap(),
                    genus_character(&m4, &m24, x).unwrap() * genus_character(&m4, &m24, y).unwrap()
                );
            }
        }
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(&big(-4), &big(-24), &big(1)).unwrap(), rat(1, 1));
        assert_eq!(theta(&big(-4), &big(-3), &big(2)).unwrap(), rat(4, 1));
        assert_eq!(theta(&big(-3), &big(-4), &big(3)).unwrap(), rat(5, 1));
    }

    #[test]
    fn kmz_examples() {
        let r = kmz_check(&big(-4), &big(-24), &big(1)).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone(), r.equal), (rat(6, 1), big(6), true));
        let r = kmz_check(&big(-4), &big(-3), &big(1)).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone(), r.equal), (rat(1, 1), big(1), true));
        let r = kmz_check(&big(-4), &big(-1304), &big(1)).unwrap();
        assert_eq!(r.lhs, rat(66, 1));
        assert!(r.equal);
        assert!(kmz_check(&big(-4), &big(-4), &big(1)).is_err());
        assert!(kmz_check(&big(5), &big(-4), &big(1)).is_err());
    }

    #[test]
    fn kmz_with_conductor_two() {
        for (d1, d2) in [(-3, -7), (-3, -11), (-7, -11), (-4, -3), (-3, -8)] {
            let r = kmz_check(&big(d1), &big(d2), &big(2)).unwrap();
            assert!(r.equal, "({d1},{d2},2): {} vs {}", r.lhs, r.rhs);
        }
    }

    #[test]
    fn lift_examples() {
        let p24 = q(1, 0, 24);
        assert_eq!(lift_class(&p24).unwrap(), q(1, 0, 96));
        assert!(lift_class(&q(2, 4, 24)).is_err());
        let t8 = class_table(&big(1304)).unwrap();
        let t32 = class_table(&big(4 * 1304)).unwrap();
        let mut images = Vec::new();
        for x in &t8.wide_reps {
            let l = lift_class(&odd_representative(x).unwrap()).unwrap();
            assert!(!widely_equivalent(&l, &q(4, 4, 4 * 1304)).unwrap());
            images.push(reduce_rep(&l));
        }
        for i in 0..images.len() {
            for j in 0..i {
                assert!(!widely_equivalent(&images[i], &images[j]).unwrap());
            }
        }
        assert_eq!(t32.h(), 2 * t8.h());
    }

    #[test]
    fn ambiguous_examples() {
        for p in [3u64, 7, 11, 19, 23] {
            let d = ambiguous_data(p).unwrap();
            let class_of = |k: (u64, u64)| d.ideal_classes.iter().find(|(x, _)| *x == k).unwrap().1;
            let want = if p % 8 == 3 { AmbiguousClass::Am } else { AmbiguousClass::Principal };
            assert_eq!(class_of((8, 0)), want, "p={p}");
        }
        assert!(ambiguous_data(5).is_err());
        assert!(ambiguous_data(15).is_err());
    }
}
