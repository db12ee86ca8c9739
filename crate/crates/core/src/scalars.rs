//! Exact coefficient rings.
//!
//! Everything downstream is computed over one of two rings and nothing else:
//! Gaussian rationals Q(i) for numeric work, and dense polynomials in a
//! formal real parameter `b` with Gaussian-rational coefficients for
//! verification that must hold identically in the coupling constant.
//! No floating point is used anywhere.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision rational number.
pub type Rational = num::BigRational;

/// Coefficient ring required by the operator algebra: a commutative ring
/// with conjugation, an embedded imaginary unit, and exact division test.
pub trait Scalar:
    Clone
    + PartialEq
    + Eq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Complex conjugate (the formal parameter is treated as real).
    fn conj(&self) -> Self;

    /// `i^k` for any integer `k`.
    fn i_pow(k: i64) -> Self;

    fn from_int(n: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Exact embedding of Q(i) into the ring.
    fn from_gaussian(g: &GaussianRational) -> Self;

    /// Exact quotient `self / rhs`, or `None` when it does not exist in the
    /// ring (division by zero, or a non-exact polynomial quotient).
    fn try_exact_div(&self, rhs: &Self) -> Option<Self>;

    /// `2^k` for any integer `k` (negative exponents give exact fractions).
    fn pow2(k: i64) -> Self {
        if k >= 0 {
            Self::from_int(1i64 << k.min(62))
                * if k > 62 { Self::pow2(k - 62) } else { Self::one() }
        } else {
            Self::from_ratio(1, 1i64 << (-k).min(62))
                * if -k > 62 { Self::pow2(k + 62) } else { Self::one() }
        }
    }
}

fn rational_from_i64(n: i64, d: i64) -> Rational {
    Rational::new(num::BigInt::from(n), num::BigInt::from(d))
}

/// Element of Q(i): `re + im*i` with arbitrary-precision rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GaussianRational {
    re: Rational,
    im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_rational(re: Rational) -> Self {
        GaussianRational { re, im: Rational::zero() }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational { re: Rational::zero(), im: Rational::one() }
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(GaussianRational { re: &self.re / &norm, im: -(&self.im) / &norm })
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational { re: Rational::zero(), im: Rational::zero() }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational { re: Rational::one(), im: Rational::zero() }
    }
}

impl Add for GaussianRational {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        GaussianRational { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for GaussianRational {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        GaussianRational { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Neg for GaussianRational {
    type Output = Self;

    fn neg(self) -> Self {
        GaussianRational { re: -self.re, im: -self.im }
    }
}

impl Mul for GaussianRational {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        GaussianRational { re, im }
    }
}

impl Scalar for GaussianRational {
    fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -self.im.clone() }
    }

    fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::i(),
            2 => -Self::one(),
            _ => -Self::i(),
        }
    }

    fn from_int(n: i64) -> Self {
        GaussianRational::from_rational(rational_from_i64(n, 1))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        GaussianRational::from_rational(rational_from_i64(num, den))
    }

    fn from_gaussian(g: &GaussianRational) -> Self {
        g.clone()
    }

    fn try_exact_div(&self, rhs: &Self) -> Option<Self> {
        rhs.inverse().map(|inv| self.clone() * inv)
    }
}

fn fmt_signed_part(f: &mut fmt::Formatter<'_>, r: &Rational, suffix: &str, leading: bool) -> fmt::Result {
    let (sign, abs) = if r < &Rational::zero() { ("-", -r.clone()) } else { ("+", r.clone()) };
    if leading {
        if sign == "-" {
            write!(f, "-")?;
        }
    } else {
        write!(f, "{}", sign)?;
    }
    if suffix.is_empty() || !abs.is_one() {
        write!(f, "{}", abs)?;
    }
    write!(f, "{}", suffix)
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return fmt_signed_part(f, &self.im, "i", true);
        }
        write!(f, "{}", self.re)?;
        fmt_signed_part(f, &self.im, "i", false)
    }
}

#[derive(Serialize, Deserialize)]
struct GaussianWire {
    re: String,
    im: String,
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GaussianWire { re: self.re.to_string(), im: self.im.to_string() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = GaussianWire::deserialize(deserializer)?;
        let re = Rational::from_str(&wire.re)
            .map_err(|e| D::Error::custom(format!("bad rational {:?}: {}", wire.re, e)))?;
        let im = Rational::from_str(&wire.im)
            .map_err(|e| D::Error::custom(format!("bad rational {:?}: {}", wire.im, e)))?;
        Ok(GaussianRational { re, im })
    }
}

/// Dense polynomial in the formal parameter `b` over Q(i); `coeffs[k]` is
/// the coefficient of `b^k` and trailing zeros are always trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BetaPoly {
    coeffs: Vec<GaussianRational>,
}

impl BetaPoly {
    pub fn from_coeffs(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        BetaPoly { coeffs }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The formal parameter itself.
    pub fn beta() -> Self {
        Self::from_coeffs(vec![GaussianRational::zero(), GaussianRational::one()])
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    /// Degree in `b`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `Some(c)` when the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.coeffs.len() {
            0 => Some(GaussianRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    /// Evaluate at a rational value of the formal parameter.
    pub fn eval(&self, beta: &Rational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * GaussianRational::from_rational(beta.clone()) + c.clone();
        }
        acc
    }
}

impl Zero for BetaPoly {
    fn zero() -> Self {
        BetaPoly { coeffs: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for BetaPoly {
    fn one() -> Self {
        BetaPoly::constant(GaussianRational::one())
    }
}

impl Add for BetaPoly {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let mut coeffs = self.coeffs;
        if coeffs.len() < rhs.coeffs.len() {
            coeffs.resize(rhs.coeffs.len(), GaussianRational::zero());
        }
        for (k, c) in rhs.coeffs.into_iter().enumerate() {
            coeffs[k] = coeffs[k].clone() + c;
        }
        Self::from_coeffs(coeffs)
    }
}

impl Sub for BetaPoly {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for BetaPoly {
    type Output = Self;

    fn neg(self) -> Self {
        BetaPoly { coeffs: self.coeffs.into_iter().map(Neg::neg).collect() }
    }
}

impl Mul for BetaPoly {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut coeffs =
            vec![GaussianRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (j, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in rhs.coeffs.iter().enumerate() {
                coeffs[j + k] = coeffs[j + k].clone() + a.clone() * b.clone();
            }
        }
        Self::from_coeffs(coeffs)
    }
}

impl Scalar for BetaPoly {
    fn conj(&self) -> Self {
        BetaPoly { coeffs: self.coeffs.iter().map(Scalar::conj).collect() }
    }

    fn i_pow(k: i64) -> Self {
        BetaPoly::constant(GaussianRational::i_pow(k))
    }

    fn from_int(n: i64) -> Self {
        BetaPoly::constant(GaussianRational::from_int(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BetaPoly::constant(GaussianRational::from_ratio(num, den))
    }

    fn from_gaussian(g: &GaussianRational) -> Self {
        BetaPoly::constant(g.clone())
    }

    /// Polynomial long division; `None` unless the remainder vanishes.
    fn try_exact_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.coeffs.len() < rhs.coeffs.len() {
            return None;
        }
        let lead_inv = rhs.coeffs.last().unwrap().inverse().unwrap();
        let mut rem = self.coeffs.clone();
        let qlen = self.coeffs.len() - rhs.coeffs.len() + 1;
        let mut quot = vec![GaussianRational::zero(); qlen];
        for j in (0..qlen).rev() {
            let q = rem[j + rhs.coeffs.len() - 1].clone() * lead_inv.clone();
            if !q.is_zero() {
                for (k, b) in rhs.coeffs.iter().enumerate() {
                    rem[j + k] = rem[j + k].clone() - q.clone() * b.clone();
                }
            }
            quot[j] = q;
        }
        if rem.iter().all(Zero::is_zero) {
            Some(Self::from_coeffs(quot))
        } else {
            None
        }
    }
}

impl From<GaussianRational> for BetaPoly {
    fn from(c: GaussianRational) -> Self {
        BetaPoly::constant(c)
    }
}

impl fmt::Display for BetaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let composite = !c.re.is_zero() && !c.im.is_zero();
            if k == 0 {
                write!(f, "{}", c)?;
            } else {
                if composite {
                    write!(f, "({})", c)?;
                } else if c == &GaussianRational::one() {
                    // bare power
                } else if c == &(-GaussianRational::one()) {
                    write!(f, "-")?;
                } else {
                    write!(f, "{}", c)?;
                }
                write!(f, "b")?;
                if k > 1 {
                    write!(f, "^{}", k)?;
                }
            }
        }
        Ok(())
    }
}

impl Serialize for BetaPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BetaPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(BetaPoly::from_coeffs(Vec::<GaussianRational>::deserialize(deserializer)?))
    }
}
