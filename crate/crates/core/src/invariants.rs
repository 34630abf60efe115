//! Exact invariants of a polarized family member.
//!
//! The Picard group of the resolved threefold is `Z^2`, written in the basis
//! (class of `z`, class of `w`) = `(1,0)`, `(0,1)` coming from the Cox grading
//! `deg a = deg c = deg z = (1,0)`, `deg b = deg d = (n,1)`, `deg w = (0,1)`.
//! A polarization is `L = l1·(1,0) + l2·(n,1) = (l1 + n·l2, l2)` with
//! `l1, l2 > 0`. Everything here is exact rational arithmetic: the case splits
//! compare `l1` against `l2` and `2·l2`, and equality matters.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Parses `"p/q"` or `"p"`. Decimal literals are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.contains(['.', 'e', 'E']) {
        return Err(Error::InvalidArgument(format!("'{s}' is not an exact rational literal (use p/q)")));
    }
    Rational::from_str(t).map_err(|_| Error::InvalidArgument(format!("cannot parse '{s}' as a rational")))
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Boundary divisor removed from the threefold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    /// The exceptional divisor `D_w` alone.
    #[serde(rename = "w")]
    Dw,
    /// `D_w + D_z`.
    #[serde(rename = "wz")]
    DwDz,
}

impl Boundary {
    /// Class of the boundary divisor in the Picard basis.
    pub fn class(self) -> PicClass {
        match self {
            Boundary::Dw => PicClass::new(Rational::zero(), Rational::one()),
            Boundary::DwDz => PicClass::new(Rational::one(), Rational::one()),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Dw => "w",
            Boundary::DwDz => "wz",
        }
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "w" => Ok(Boundary::Dw),
            "wz" => Ok(Boundary::DwDz),
            other => {
                Err(Error::InvalidArgument(format!("unknown boundary '{other}' (expected 'w' or 'wz')")))
            }
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A divisor class `d1·(1,0) + d2·(0,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PicClass {
    pub d1: Rational,
    pub d2: Rational,
}

impl PicClass {
    pub fn new(d1: Rational, d2: Rational) -> Self {
        PicClass { d1, d2 }
    }

    pub fn anticanonical(n: u32) -> Self {
        PicClass::new(Rational::from_integer(BigInt::from(n + 2)), Rational::from_integer(BigInt::from(2)))
    }

    pub fn is_zero(&self) -> bool {
        self.d1.is_zero() && self.d2.is_zero()
    }

    /// Both coordinates non-negative, i.e. inside the effective cone.
    pub fn is_effective(&self) -> bool {
        !self.d1.is_negative() && !self.d2.is_negative()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        PicClass::new(&self.d1 * k, &self.d2 * k)
    }
}

impl std::ops::Add for &PicClass {
    type Output = PicClass;
    fn add(self, rhs: &PicClass) -> PicClass {
        PicClass::new(&self.d1 + &rhs.d1, &self.d2 + &rhs.d2)
    }
}

impl std::ops::Sub for &PicClass {
    type Output = PicClass;
    fn sub(self, rhs: &PicClass) -> PicClass {
        PicClass::new(&self.d1 - &rhs.d1, &self.d2 - &rhs.d2)
    }
}

impl fmt::Display for PicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.d1, self.d2)
    }
}

/// Polarization parameters `(l1, l2)`, both strictly positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polarization {
    l1: Rational,
    l2: Rational,
}

impl Polarization {
    pub fn new(l1: Rational, l2: Rational) -> Result<Self> {
        if !l1.is_positive() || !l2.is_positive() {
            return Err(Error::InvalidSetup(format!(
                "polarization needs l1, l2 > 0 (got l1 = {l1}, l2 = {l2})"
            )));
        }
        Ok(Polarization { l1, l2 })
    }

    pub fn l1(&self) -> &Rational {
        &self.l1
    }

    pub fn l2(&self) -> &Rational {
        &self.l2
    }
}

/// One member of the family: degree parameter, boundary and polarization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Setup {
    n: u32,
    boundary: Boundary,
    polarization: Polarization,
}

impl Setup {
    pub fn new(n: u32, boundary: Boundary, polarization: Polarization) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSetup(format!("n must be at least 2 (got {n})")));
        }
        Ok(Setup { n, boundary, polarization })
    }

    /// Shorthand for integer or `p/q` literals, mostly for tests and examples.
    ///
    /// ```
    /// use spherical_points::{Boundary, Setup};
    /// let s = Setup::parse(2, Boundary::DwDz, "1", "1/2").unwrap();
    /// assert_eq!(s.l2().to_string(), "1/2");
    /// assert!(Setup::parse(1, Boundary::Dw, "1", "1").is_err());
    /// ```
    pub fn parse(n: u32, boundary: Boundary, l1: &str, l2: &str) -> Result<Self> {
        let pol = Polarization::new(parse_rational(l1)?, parse_rational(l2)?)?;
        Setup::new(n, boundary, pol)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn polarization(&self) -> &Polarization {
        &self.polarization
    }

    pub fn l1(&self) -> &Rational {
        &self.polarization.l1
    }

    pub fn l2(&self) -> &Rational {
        &self.polarization.l2
    }

    /// `l1 + n·l2`, the first coordinate of `L` and the weight of `max{|a|,|c|,|z|}`.
    pub fn weight(&self) -> Rational {
        self.l1() + self.l2() * BigInt::from(self.n)
    }

    /// `L = (l1 + n·l2, l2)`.
    pub fn line_bundle(&self) -> PicClass {
        PicClass::new(self.weight(), self.l2().clone())
    }

    /// Same family member with `(k·l1, k·l2)`.
    pub fn rescaled(&self, k: &Rational) -> Result<Self> {
        Setup::new(self.n, self.boundary, Polarization::new(self.l1() * k, self.l2() * k)?)
    }
}

impl fmt::Display for Setup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} D={} l1={} l2={}", self.n, self.boundary, self.l1(), self.l2())
    }
}

/// Shape of the adjoint class `K + D + a·L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AdjointType {
    /// The adjoint class vanishes.
    Trivial,
    /// A positive multiple of `(0,1)`, the exceptional divisor.
    Rigid,
    /// A positive multiple of `(1,0)`; induces the fibration `(a:c:z)`.
    Moving,
}

impl AdjointType {
    pub fn as_str(self) -> &'static str {
        match self {
            AdjointType::Trivial => "TRIVIAL",
            AdjointType::Rigid => "RIGID",
            AdjointType::Moving => "MOVING",
        }
    }
}

/// All invariants of a setup, in exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantBundle {
    pub a: Rational,
    /// Coefficient of `D_w` in the adjoint class; `None` in the moving case.
    pub e: Option<Rational>,
    pub b: u32,
    /// Effective-cone constant; `None` in the moving case, where it is per fiber.
    pub alpha: Option<Rational>,
    pub adjoint: PicClass,
    pub adjoint_type: AdjointType,
    pub delta: Option<Rational>,
}

pub fn a_invariant(s: &Setup) -> Rational {
    let inv_l2 = s.l2().recip();
    let extra = match s.boundary() {
        Boundary::Dw => 2,
        Boundary::DwDz => 1,
    };
    let other = Rational::from_integer(BigInt::from(s.n() + extra)) / s.weight();
    if inv_l2 >= other {
        inv_l2
    } else {
        other
    }
}

/// `K + D + a·L` with `K = -(n+2, 2)`.
pub fn adjoint_class(s: &Setup) -> PicClass {
    let k = PicClass::anticanonical(s.n()).scale(&-Rational::one());
    let with_d = &k + &s.boundary().class();
    &with_d + &s.line_bundle().scale(&a_invariant(s))
}

pub fn adjoint_type(s: &Setup) -> AdjointType {
    let adj = adjoint_class(s);
    if adj.is_zero() {
        AdjointType::Trivial
    } else if adj.d1.is_positive() {
        AdjointType::Moving
    } else {
        AdjointType::Rigid
    }
}

pub fn e_invariant(s: &Setup) -> Result<Rational> {
    if adjoint_type(s) == AdjointType::Moving {
        return Err(Error::MovingAdjoint("e undefined for moving adjoint divisor"));
    }
    Ok(adjoint_class(s).d2)
}

pub fn b_invariant(s: &Setup) -> u32 {
    if adjoint_class(s).is_zero() {
        2
    } else {
        1
    }
}

pub fn alpha_invariant(s: &Setup) -> Result<Rational> {
    match adjoint_type(s) {
        AdjointType::Moving => Err(Error::MovingAdjoint("α is per-fiber; use fiber_constant")),
        AdjointType::Trivial => Ok((s.weight() * s.l2()).recip()),
        AdjointType::Rigid => Ok(s.weight().recip()),
    }
}

/// Exponent saving of the error term relative to `B^a`, where one is known.
///
/// Rigid `D_w`: `min{l1, 2l2 - l1} / (l2 (l1 + n l2))`. Rigid `D_w + D_z`:
/// `a - 1/l2`. Moving: `(l1/l2 - 2)/(l1 + n l2)` resp. `(l1/l2 - 1)/(l1 + n l2)`.
/// Trivial adjoint class: none.
pub fn delta_saving(s: &Setup) -> Option<Rational> {
    let (l1, l2) = (s.l1(), s.l2());
    let w = s.weight();
    match (adjoint_type(s), s.boundary()) {
        (AdjointType::Trivial, _) => None,
        (AdjointType::Rigid, Boundary::Dw) => {
            let two_l2_minus_l1 = l2 * BigInt::from(2) - l1;
            let m = if *l1 <= two_l2_minus_l1 { l1.clone() } else { two_l2_minus_l1 };
            Some(m / (l2 * &w))
        }
        (AdjointType::Rigid, Boundary::DwDz) => Some(a_invariant(s) - l2.recip()),
        (AdjointType::Moving, Boundary::Dw) => Some((l1 / l2 - Rational::from_integer(BigInt::from(2))) / w),
        (AdjointType::Moving, Boundary::DwDz) => Some((l1 / l2 - Rational::one()) / w),
    }
}

pub fn invariants(s: &Setup) -> InvariantBundle {
    InvariantBundle {
        a: a_invariant(s),
        e: e_invariant(s).ok(),
        b: b_invariant(s),
        alpha: alpha_invariant(s).ok(),
        adjoint: adjoint_class(s),
        adjoint_type: adjoint_type(s),
        delta: delta_saving(s),
    }
}
