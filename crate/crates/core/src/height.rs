//! The height `H_L` on Cox coordinates.
//!
//! ```text
//! H_L(a,b,c,d,z,w) = max{ M^l1 · N^l2 , M^(l1+n·l2) · |w|^l2 },
//!     M = max{|a|,|c|,|z|},  N = max{|b|,|d|}
//! ```
//!
//! Exact comparisons `H_L(x) <= B` are done on the `k`-th power, where `k` is
//! the least positive integer making `k·l1` and `k·l2` integral, so no
//! floating point is involved and ties `H = B` are counted.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::arith::{checked_pow_product, integer_root, integer_root_u128};
use crate::error::{Error, Result};
use crate::invariants::{rational_to_f64, Boundary, Setup};

/// Integral torsor coordinates `(a, b, c, d, z, w)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoxTuple {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
    pub z: BigInt,
    pub w: BigInt,
}

impl CoxTuple {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
        z: impl Into<BigInt>,
        w: impl Into<BigInt>,
    ) -> Self {
        CoxTuple { a: a.into(), b: b.into(), c: c.into(), d: d.into(), z: z.into(), w: w.into() }
    }

    /// Whether `a·d - b·c = z^(n+1)·w`.
    pub fn satisfies_torsor_equation(&self, n: u32) -> bool {
        &self.a * &self.d - &self.b * &self.c == num_traits::pow(self.z.clone(), n as usize + 1) * &self.w
    }
}

/// Real coordinates, used by the volume integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealCoxTuple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub z: f64,
    pub w: f64,
}

impl RealCoxTuple {
    pub fn new(a: f64, b: f64, c: f64, d: f64, z: f64, w: f64) -> Self {
        RealCoxTuple { a, b, c, d, z, w }
    }
}

/// Least positive `k` with `k·l1` and `k·l2` integral.
pub fn height_scale_k(s: &Setup) -> BigInt {
    s.l1().denom().lcm(s.l2().denom())
}

/// Integral exponents of `H_{kL}`: `k·l1`, `k·l2` and `k·(l1 + n·l2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeightExponents {
    pub k: u32,
    pub e1: u32,
    pub e2: u32,
    pub e3: u32,
}

impl HeightExponents {
    pub fn new(s: &Setup) -> Result<Self> {
        let k = height_scale_k(s);
        let to_u32 = |r: num_rational::BigRational, what: &str| -> Result<u32> {
            let v = r * &k;
            debug_assert!(v.is_integer());
            v.to_integer()
                .to_u32()
                .ok_or_else(|| Error::Overflow(format!("height exponent {what} does not fit in 32 bits")))
        };
        Ok(HeightExponents {
            k: k.to_u32().ok_or_else(|| Error::Overflow("height scale k".into()))?,
            e1: to_u32(s.l1().clone(), "k·l1")?,
            e2: to_u32(s.l2().clone(), "k·l2")?,
            e3: to_u32(s.weight(), "k·(l1+n·l2)")?,
        })
    }
}

/// Precomputed `B^k` together with the exponents, for repeated exact tests.
#[derive(Debug, Clone)]
pub struct HeightBound {
    pub exps: HeightExponents,
    bound: BigUint,
    bound_u128: Option<u128>,
    b: u64,
}

impl HeightBound {
    pub fn new(s: &Setup, b: u64) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidArgument("height bound B must be positive".into()));
        }
        let exps = HeightExponents::new(s)?;
        let bound = num_traits::pow(BigUint::from(b), exps.k as usize);
        let bound_u128 = bound.to_u128();
        Ok(HeightBound { exps, bound, bound_u128, b })
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// `H_{kL} <= B^k` for `M = max{|a|,|c|,|z|}`, `N = max{|b|,|d|}` and `|w|`.
    pub fn admits(&self, m: u128, n: u128, w: u128) -> bool {
        let HeightExponents { e1, e2, e3, .. } = self.exps;
        if let Some(bk) = self.bound_u128 {
            // an overflowing product is larger than any u128 bound
            let first = checked_pow_product(m, e1, n, e2).is_some_and(|v| v <= bk);
            first && checked_pow_product(m, e3, w, e2).is_some_and(|v| v <= bk)
        } else {
            self.admits_big(&BigUint::from(m), &BigUint::from(n), &BigUint::from(w))
        }
    }

    pub fn admits_big(&self, m: &BigUint, n: &BigUint, w: &BigUint) -> bool {
        let HeightExponents { e1, e2, e3, .. } = self.exps;
        let p = |x: &BigUint, e: u32| num_traits::pow(x.clone(), e as usize);
        p(m, e1) * p(n, e2) <= self.bound && p(m, e3) * p(w, e2) <= self.bound
    }

    /// Largest `M` with `M^(k(l1+n l2)) <= B^k`: the radius of the `(a,c,z)` box
    /// once `w = ±1`.
    pub fn cell_radius(&self) -> Result<u128> {
        integer_root(&self.bound, self.exps.e3)
            .to_u128()
            .ok_or_else(|| Error::Overflow("cell radius exceeds 128 bits".into()))
    }

    /// Largest `T` with `m^(k l1) · T^(k l2) <= B^k`, the bound on `max{|b|,|d|}`
    /// for a cell with `max{|a|,|c|,|z|} = m >= 1`.
    pub fn fiber_radius(&self, m: u128) -> Result<u128> {
        debug_assert!(m >= 1);
        let HeightExponents { e1, e2, .. } = self.exps;
        if let Some(bk) = self.bound_u128 {
            return Ok(match m.checked_pow(e1) {
                Some(mp) => integer_root_u128(bk / mp, e2),
                None => 0,
            });
        }
        let mp = num_traits::pow(BigUint::from(m), e1 as usize);
        integer_root(&(&self.bound / mp), e2)
            .to_u128()
            .ok_or_else(|| Error::Overflow("fiber radius exceeds 128 bits".into()))
    }
}

/// Exact test `H_L(x) <= B`.
pub fn height_leq(s: &Setup, x: &CoxTuple, b: u64) -> Result<bool> {
    let hb = HeightBound::new(s, b)?;
    let m = x.a.abs().max(x.c.abs()).max(x.z.abs());
    let n = x.b.abs().max(x.d.abs());
    let mag = |v: BigInt| v.to_biguint().unwrap_or_default();
    Ok(hb.admits_big(&mag(m), &mag(n), &mag(x.w.abs())))
}

/// `H_L` in floating point, real exponents.
pub fn height_real(s: &Setup, x: &RealCoxTuple) -> f64 {
    let l1 = rational_to_f64(s.l1());
    let l2 = rational_to_f64(s.l2());
    let wt = rational_to_f64(&s.weight());
    height_real_with(l1, l2, wt, x)
}

pub(crate) fn height_real_with(l1: f64, l2: f64, weight: f64, x: &RealCoxTuple) -> f64 {
    let m = x.a.abs().max(x.c.abs()).max(x.z.abs());
    let n = x.b.abs().max(x.d.abs());
    let first = m.powf(l1) * n.powf(l2);
    let second = m.powf(weight) * x.w.abs().powf(l2);
    first.max(second)
}

fn is_unit(v: &BigInt) -> bool {
    v.abs().is_one()
}

/// Torsor equation, both coprimality conditions, and the unit conditions that
/// make the point integral off the boundary.
pub fn is_integral_point(s: &Setup, x: &CoxTuple) -> bool {
    if !x.satisfies_torsor_equation(s.n()) {
        return false;
    }
    if !x.a.gcd(&x.c).gcd(&x.z).is_one() || !x.b.gcd(&x.d).gcd(&x.w).is_one() {
        return false;
    }
    match s.boundary() {
        Boundary::Dw => is_unit(&x.w),
        Boundary::DwDz => is_unit(&x.w) && is_unit(&x.z),
    }
}

/// Fixed-width twin of [`is_integral_point`] for the scanning oracle.
pub(crate) fn is_integral_point_i128(n: u32, boundary: Boundary, x: [i128; 6]) -> bool {
    use crate::arith::gcd;
    let [a, b, c, d, z, w] = x;
    let lhs = a.checked_mul(d).zip(b.checked_mul(c)).and_then(|(p, q)| p.checked_sub(q));
    let rhs = z.checked_pow(n + 1).and_then(|v| v.checked_mul(w));
    match (lhs, rhs) {
        (Some(l), Some(r)) if l == r => {}
        (Some(_), Some(_)) => return false,
        // out of fixed-width range: fall back to the exact check
        _ => {
            let t = CoxTuple::new(a, b, c, d, z, w);
            if !t.satisfies_torsor_equation(n) {
                return false;
            }
        }
    }
    if gcd(gcd(a, c), z) != 1 || gcd(gcd(b, d), w) != 1 {
        return false;
    }
    match boundary {
        Boundary::Dw => w.abs() == 1,
        Boundary::DwDz => w.abs() == 1 && z.abs() == 1,
    }
}
