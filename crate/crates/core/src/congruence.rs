//! 2-adic congruences between `h(−8p)` and Hirzebruch sums of discriminant
//! `32p`, for primes `p ≡ 3 (mod 4)`, plus the mod-16 congruence for pairs of
//! imaginary discriminants.
//!
//! A congruence `x ≡ y (mod 2^k)` between rationals holds when `x − y` has odd
//! denominator and numerator divisible by `2^k`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{factorize, is_prime_u64, kronecker_i64, primes_up_to, ExactRational};
use crate::cfrac::{hirzebruch_psi, QuadIrr};
use crate::classgroup::kmz_check;
use crate::error::{Error, Result};
use crate::orders::{class_number_imag, roots_of_unity_count, wide_class_number_real};

/// Serializes through `Display`, used for big integers and rationals.
pub fn ser_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// `v₂(x)`, or `None` for zero. Negative when the denominator is even.
pub fn two_adic_valuation(x: &ExactRational) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let v = |n: &BigInt| n.trailing_zeros().unwrap_or(0) as i64;
    Some(v(x.numer()) - v(x.denom()))
}

/// `x ≡ y (mod 2^k)` in the 2-adic sense.
pub fn congruent_mod_pow2(x: &ExactRational, y: &ExactRational, k: u32) -> bool {
    match two_adic_valuation(&(x - y)) {
        None => true,
        Some(v) => v >= k as i64,
    }
}

/// `2^3·3^-1` style factorization of a rational; zero prints as `0`.
pub fn factor_string(x: &ExactRational) -> Result<String> {
    if x.is_zero() {
        return Ok("0".into());
    }
    let mut parts: Vec<(BigInt, i64)> = Vec::new();
    for (p, e) in factorize(&x.numer().abs())?.factors {
        parts.push((p, e as i64));
    }
    for (p, e) in factorize(x.denom())?.factors {
        parts.push((p, -(e as i64)));
    }
    parts.sort();
    let body = if parts.is_empty() {
        "1".to_string()
    } else {
        parts
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect::<Vec<_>>()
            .join("·")
    };
    Ok(if x.is_negative() { format!("-{body}") } else { body })
}

fn check_prime(p: u64) -> Result<()> {
    if p % 4 != 3 || !is_prime_u64(p) {
        return Err(Error::BadPrime(p.to_string()));
    }
    Ok(())
}

/// `(Ψ(√(8p)), Ψ((1+√(2p))/2))`, computed at discriminant `32p`.
pub fn psi_pair(p: u64) -> Result<(BigInt, BigInt)> {
    check_prime(p)?;
    let delta = BigInt::from(32u64) * p;
    let x1 = QuadIrr::new(BigInt::from(1), BigInt::zero(), delta.clone())?;
    let x2 = QuadIrr::new(BigInt::from(4), BigInt::from(4), delta)?;
    Ok((hirzebruch_psi(&x1), hirzebruch_psi(&x2)))
}

/// Rédei matrix over `F₂` for discriminant `−8p` and the resulting 4-rank.
pub fn redei_4rank(p: u64) -> Result<(u8, [[u8; 2]; 2])> {
    check_prime(p)?;
    let pi = p as i64;
    let r1 = ((1 - kronecker_i64(2, pi)) / 2) as u8;
    let r2 = ((1 - kronecker_i64(-pi, 2)) / 2) as u8;
    let m = [[r1, r1], [r2, r2]];
    let rank = u8::from(r1 != 0 || r2 != 0);
    Ok((1 - rank, m))
}

/// One row of the congruence tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceRow {
    pub p: u64,
    pub p_mod8: u8,
    pub psi1: i64,
    pub psi2: i64,
    pub h8p: u64,
    pub hneg8p: u64,
    pub h32p: u64,
    #[serde(rename = "H1", serialize_with = "ser_display")]
    pub h1: ExactRational,
    #[serde(rename = "H2", serialize_with = "ser_display")]
    pub h2: ExactRational,
    pub thm12_ok: bool,
    pub thm13_ok: bool,
    pub conj_ok: bool,
    pub thm_redei_ok: bool,
    #[serde(rename = "H1_fact")]
    pub h1_fact: String,
    #[serde(rename = "H2_fact")]
    pub h2_fact: String,
}

impl CongruenceRow {
    pub const CSV_HEADER: &'static str = "p,p_mod8,psi1,psi2,h8p,hneg8p,H1,H2,H1_fact,H2_fact";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.p, self.p_mod8, self.psi1, self.psi2, self.h8p, self.hneg8p, self.h1, self.h2, self.h1_fact,
            self.h2_fact
        )
    }
}

fn to_i64(x: BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::GuardExceeded(format!("{x} does not fit in 64 bits")))
}

pub fn row(p: u64) -> Result<CongruenceRow> {
    check_prime(p)?;
    let (psi1, psi2) = psi_pair(p)?;
    let h8p = wide_class_number_real(&(BigInt::from(8u64) * p))?;
    let h32p = wide_class_number_real(&(BigInt::from(32u64) * p))?;
    let hneg8p = class_number_imag(&(BigInt::from(-8i64) * p))?;

    let h = BigInt::from(h8p);
    let hn = BigRational::from_integer(BigInt::from(hneg8p));
    let h1 = BigRational::new(&h * (&psi1 - &psi2), BigInt::from(3)) - &hn;
    let h2 = BigRational::new(&h * &psi1 * 2, BigInt::from(3)) - &hn;

    let zero = BigRational::zero();
    let p_mod8 = (p % 8) as u8;
    let target = BigRational::from_integer(BigInt::from(if p_mod8 == 3 { 0 } else { 4 }));
    let (four_rank, _) = redei_4rank(p)?;
    let thm_redei_ok = (four_rank == 0) == (hneg8p % 4 == 2) && (four_rank == 0) == (p_mod8 == 3);

    Ok(CongruenceRow {
        p,
        p_mod8,
        psi1: to_i64(psi1)?,
        psi2: to_i64(psi2)?,
        h8p,
        hneg8p,
        h32p,
        thm12_ok: congruent_mod_pow2(&h1, &zero, 4),
        thm13_ok: congruent_mod_pow2(&h2, &target, 3),
        conj_ok: congruent_mod_pow2(&h1, &zero, 5),
        thm_redei_ok,
        h1_fact: factor_string(&h1)?,
        h2_fact: factor_string(&h2)?,
        h1,
        h2,
    })
}

/// Primes `p ≡ 3 (mod 4)` with `pmin ≤ p ≤ pmax`.
pub fn primes_3_mod_4(pmin: u64, pmax: u64) -> Vec<u64> {
    primes_up_to(pmax).into_iter().filter(|p| *p >= pmin && p % 4 == 3).collect()
}

/// Runs `f` over `items` on `jobs` threads (0 = rayon default), keeping order.
pub fn par_map<T, R, F>(items: &[T], jobs: usize, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    pool.install(|| items.par_iter().map(&f).collect())
}

/// Rows for every prime `p ≡ 3 (mod 4)` in `[pmin, pmax]`, ordered by `p`.
pub fn sweep(pmin: u64, pmax: u64, jobs: usize) -> Result<Vec<CongruenceRow>> {
    if pmin > pmax {
        return Err(Error::Invalid(format!("pmin={pmin} exceeds pmax={pmax}")));
    }
    par_map(&primes_3_mod_4(pmin, pmax), jobs, |p| row(*p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    A1,
    A2,
    A3,
}

impl std::str::FromStr for Table {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A1" => Ok(Table::A1),
            "A2" => Ok(Table::A2),
            "A3" => Ok(Table::A3),
            _ => Err(Error::Invalid(format!("unknown table {s}"))),
        }
    }
}

/// Rows of the selected table.
///
/// A1: `h(8p) = 1`, `p ≤ 23`. A2 and A3: `h(8p) ≠ 1`, `p ≤ 1000`, with
/// `p ≡ 3` and `p ≡ 7 (mod 8)` respectively.
pub fn table(which: Table, jobs: usize) -> Result<Vec<CongruenceRow>> {
    let pmax = if which == Table::A1 { 23 } else { 1000 };
    let rows = sweep(3, pmax, jobs)?;
    Ok(rows
        .into_iter()
        .filter(|r| match which {
            Table::A1 => r.h8p == 1,
            Table::A2 => r.h8p != 1 && r.p_mod8 == 3,
            Table::A3 => r.h8p != 1 && r.p_mod8 == 7,
        })
        .collect())
}

/// `3·h(−8p) = Σ χΨ` over the wide classes of `32p`.
pub fn decomposition_holds(p: u64) -> Result<bool> {
    check_prime(p)?;
    let r = kmz_check(&BigInt::from(-4), &(BigInt::from(-8i64) * p), &BigInt::from(1))?;
    let hn = class_number_imag(&(BigInt::from(-8i64) * p))?;
    Ok(r.equal && r.rhs == BigInt::from(3 * hn))
}

/// The three families of discriminant pairs in the mod-16 congruence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Thm11Case {
    /// `(−4, −p)`, `p ≡ 3 (mod 4)`.
    I,
    /// `(−4, −4p)`, `p ≡ 1 (mod 4)`.
    II,
    /// `(−p₁, −p₂)`, `p₁ ≠ p₂ ≡ 3 (mod 4)`.
    III,
}

impl std::str::FromStr for Thm11Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1.1i" => Ok(Thm11Case::I),
            "ii" | "1.1ii" => Ok(Thm11Case::II),
            "iii" | "1.1iii" => Ok(Thm11Case::III),
            _ => Err(Error::Invalid(format!("unknown case {s}"))),
        }
    }
}

/// Both sides of `24 h(d₁)h(d₂)/(w₁w₂) ≡ h(Δ)Ψ(ω_Δ) (mod 16)`, `Δ = d₁d₂`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Thm11Row {
    pub d1: i64,
    pub d2: i64,
    #[serde(serialize_with = "ser_display")]
    pub lhs: ExactRational,
    pub h_delta: u64,
    #[serde(serialize_with = "ser_display")]
    pub psi: BigInt,
    pub ok: bool,
}

pub fn thm11_row(d1: i64, d2: i64) -> Result<Thm11Row> {
    let (b1, b2) = (BigInt::from(d1), BigInt::from(d2));
    let delta = &b1 * &b2;
    let h = BigInt::from(class_number_imag(&b1)? * class_number_imag(&b2)?);
    let w = BigInt::from(roots_of_unity_count(&b1)? * roots_of_unity_count(&b2)?);
    let lhs = BigRational::new(h * 24, w);
    let h_delta = wide_class_number_real(&delta)?;
    let psi = hirzebruch_psi(&QuadIrr::omega(&delta)?);
    let rhs = BigRational::from_integer(&psi * h_delta);
    let ok = congruent_mod_pow2(&lhs, &rhs, 4);
    Ok(Thm11Row { d1, d2, lhs, h_delta, psi, ok })
}

/// Discriminant pairs of the given case with `d₁d₂ ≤ dmax`.
pub fn thm11_pairs(case: Thm11Case, dmax: u64) -> Vec<(i64, i64)> {
    match case {
        Thm11Case::I => primes_up_to(dmax / 4)
            .into_iter()
            .filter(|p| p % 4 == 3)
            .map(|p| (-4, -(p as i64)))
            .collect(),
        Thm11Case::II => primes_up_to(dmax / 16)
            .into_iter()
            .filter(|p| p % 4 == 1)
            .map(|p| (-4, -4 * p as i64))
            .collect(),
        Thm11Case::III => {
            let ps: Vec<u64> = primes_up_to(dmax / 3).into_iter().filter(|p| p % 4 == 3).collect();
            let mut out = Vec::new();
            for (i, &p1) in ps.iter().enumerate() {
                for &p2 in &ps[i + 1..] {
                    if p1 * p2 > dmax {
                        break;
                    }
                    out.push((-(p1 as i64), -(p2 as i64)));
                }
            }
            out
        }
    }
}

/// Every pair of the case with `d₁d₂ ≤ dmax`, evaluated in parallel.
pub fn verify_thm11(case: Thm11Case, dmax: u64, jobs: usize) -> Result<Vec<Thm11Row>> {
    let pairs = thm11_pairs(case, dmax);
    par_map(&pairs, jobs, |(d1, d2)| thm11_row(*d1, *d2))
}

/// Same as [`verify_thm11`] but bounding the primes instead of `d₁d₂`.
pub fn verify_thm11_primes(case: Thm11Case, pmax: u64, jobs: usize) -> Result<Vec<Thm11Row>> {
    let dmax = match case {
        Thm11Case::I => 4 * pmax,
        Thm11Case::II => 16 * pmax,
        Thm11Case::III => pmax * pmax,
    };
    let pairs: Vec<_> = thm11_pairs(case, dmax)
        .into_iter()
        .filter(|(d1, d2)| {
            let p = |d: i64| if d.abs() % 4 == 0 { d.abs() / 4 } else { d.abs() };
            let ps = [p(*d1), p(*d2)];
            ps.iter().all(|x| *x == 1 || *x as u64 <= pmax)
        })
        .collect();
    par_map(&pairs, jobs, |(d1, d2)| thm11_row(*d1, *d2))
}

/// A failed `v₂(H₁) ≥ 5` check beyond `p = 1000`, reported rather than failed.
pub fn is_conjecture_finding(r: &CongruenceRow) -> bool {
    !r.conj_ok && r.p > 1000
}
