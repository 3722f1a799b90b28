//! Dedekind sums and the matrix invariant `n_M`, which gives a second,
//! independent route to Hirzebruch sums.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::ExactRational;
use crate::cfrac::QuadIrr;
use crate::error::{Error, Result};
use crate::orders::fundamental_unit;

/// Largest modulus accepted by [`dedekind_sum_naive`].
pub const NAIVE_GUARD: u64 = 1_000_000;

/// Integer 2×2 matrix `(x y; z w)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
    pub w: BigInt,
}

impl Mat2 {
    pub fn new(x: BigInt, y: BigInt, z: BigInt, w: BigInt) -> Self {
        Mat2 { x, y, z, w }
    }

    pub fn from_i64(x: i64, y: i64, z: i64, w: i64) -> Self {
        Mat2::new(x.into(), y.into(), z.into(), w.into())
    }

    pub fn identity() -> Self {
        Mat2::from_i64(1, 0, 0, 1)
    }

    /// `T = (1 1; 0 1)`.
    pub fn t() -> Self {
        Mat2::from_i64(1, 1, 0, 1)
    }

    /// `S = (0 −1; 1 0)`.
    pub fn s() -> Self {
        Mat2::from_i64(0, -1, 1, 0)
    }

    /// `(3 −1; 1 0)`.
    pub fn b() -> Self {
        Mat2::from_i64(3, -1, 1, 0)
    }

    pub fn det(&self) -> BigInt {
        &self.x * &self.w - &self.y * &self.z
    }

    pub fn trace(&self) -> BigInt {
        &self.x + &self.w
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse_unimodular(&self) -> Mat2 {
        debug_assert!(self.det().is_one());
        Mat2::new(self.w.clone(), -&self.y, -&self.z, self.x.clone())
    }

    /// `A · self · A⁻¹` for `A ∈ SL₂(Z)`.
    pub fn conjugate_by(&self, a: &Mat2) -> Mat2 {
        &(a * self) * &a.inverse_unimodular()
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, o: &Mat2) -> Mat2 {
        Mat2::new(
            &self.x * &o.x + &self.y * &o.z,
            &self.x * &o.y + &self.y * &o.w,
            &self.z * &o.x + &self.w * &o.z,
            &self.z * &o.y + &self.w * &o.w,
        )
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.x, self.y, self.z, self.w)
    }
}

/// `((y)) = y − ⌊y⌋ − 1/2` for non-integers, 0 on integers.
pub fn sawtooth(y: &ExactRational) -> ExactRational {
    if y.is_integer() {
        return BigRational::zero();
    }
    y - y.floor() - BigRational::new(BigInt::one(), BigInt::from(2))
}

/// `s(h, k)` by the reciprocity/Euclid recursion, O(log k) steps.
pub fn dedekind_sum(h: &BigInt, k: &BigInt) -> Result<ExactRational> {
    if !k.is_positive() {
        return Err(Error::Invalid(format!("dedekind_sum modulus {k} must be positive")));
    }
    if !h.gcd(k).is_one() {
        return Err(Error::NotCoprime(h.to_string(), k.to_string()));
    }
    // s(h,k) = Σ sign_j * [(h_j² + k_j² + 1)/(12 h_j k_j) − 1/4]
    // with (h_{j+1}, k_{j+1}) = (k_j mod h_j, h_j); accumulated over a common
    // denominator to avoid normalizing at each step.
    let mut h = h.mod_floor(k);
    let mut k = k.clone();
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    let mut positive = true;
    while !h.is_zero() {
        let tn: BigInt = &h * &h + &k * &k + 1 - &h * &k * 3;
        let td = &h * &k * 12;
        let t_num = if positive { tn } else { -tn };
        num = num * &td + t_num * &den;
        den *= td;
        let g = num.gcd(&den);
        if !g.is_one() {
            num /= &g;
            den /= &g;
        }
        let next = k.mod_floor(&h);
        k = h;
        h = next;
        positive = !positive;
    }
    Ok(BigRational::new(num, den))
}

/// Literal summation of the definition. Test oracle only.
pub fn dedekind_sum_naive(h: &BigInt, k: &BigInt) -> Result<ExactRational> {
    if !k.is_positive() {
        return Err(Error::Invalid(format!("dedekind_sum modulus {k} must be positive")));
    }
    if k.to_u64().map_or(true, |v| v > NAIVE_GUARD) {
        return Err(Error::GuardExceeded(format!("k = {k} > {NAIVE_GUARD}")));
    }
    if !h.gcd(k).is_one() {
        return Err(Error::NotCoprime(h.to_string(), k.to_string()));
    }
    let kk = k.to_u64().unwrap();
    let mut sum = BigRational::zero();
    for m in 1..=kk {
        let m = BigInt::from(m);
        let a = sawtooth(&BigRational::new(h * &m, k.clone()));
        let b = sawtooth(&BigRational::new(m, k.clone()));
        sum += a * b;
    }
    Ok(sum)
}

/// `n_M = (x + w)/z − sign(z) (3 + 12 s(w, |z|))` for `M ∈ SL₂(Z)`, `z ≠ 0`.
pub fn n_of_matrix(m: &Mat2) -> Result<ExactRational> {
    if m.z.is_zero() {
        return Err(Error::ZeroLowerLeft);
    }
    let det = m.det();
    if !det.is_one() {
        return Err(Error::NotUnimodular(det.to_string()));
    }
    let s = dedekind_sum(&m.w, &m.z.abs())?;
    let sign = BigRational::from_integer(m.z.signum());
    let tr = BigRational::new(m.trace(), m.z.clone());
    Ok(tr - sign * (BigRational::from_integer(BigInt::from(3)) + s * BigInt::from(12)))
}

/// `M_ξ`: the integral matrix with `εξ = xξ + y` and `ε = zξ + w`, for the unit
/// `ε = q + r ω_Δ`.
pub fn matrix_of(xi: &QuadIrr, q: &BigInt, r: &BigInt) -> Result<Mat2> {
    let delta = xi.delta();
    let sigma = delta.mod_floor(&BigInt::from(2));
    let a = xi.a();
    let u12: BigInt = (xi.b() - &sigma) / 2;
    let core = Mat2::new(
        q + r * &sigma,
        r * (delta - &sigma) / 4,
        r.clone(),
        q.clone(),
    );
    let u = Mat2::new(BigInt::one(), u12.clone(), BigInt::zero(), a.clone());
    // U⁻¹ = adj(U) / a
    let adj = Mat2::new(a.clone(), -u12, BigInt::zero(), BigInt::one());
    let scaled = &(&u * &core) * &adj;
    let entries = [&scaled.x, &scaled.y, &scaled.z, &scaled.w];
    if entries.iter().any(|e| !(*e % a).is_zero()) {
        return Err(Error::Internal(format!("M_ξ not integral for {xi}")));
    }
    Ok(Mat2::new(&scaled.x / a, &scaled.y / a, &scaled.z / a, &scaled.w / a))
}

/// `n(ξ) = n_{M_ξ}`; only defined here when the fundamental unit has norm +1.
pub fn n_of(xi: &QuadIrr) -> Result<ExactRational> {
    let unit = fundamental_unit(xi.delta())?;
    if unit.norm != 1 {
        return Err(Error::NormMinusOne(xi.delta().to_string()));
    }
    n_of_matrix(&matrix_of(xi, &unit.q, &unit.r)?)
}
