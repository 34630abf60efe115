//! Exact counts of integral points of bounded height.
//!
//! An integral point off `D_w` has Cox coordinates with `w = ±1`; off
//! `D_w + D_z` additionally `z = ±1`. Normalizing `w = 1` (and `z = 1` for the
//! second boundary) leaves the tuples
//!
//! ```text
//! D_w:        (a,b,c,d,z), ad - bc = z^(n+1), gcd(a,c) = 1   (two per point)
//! D_w + D_z:  (a,b,c,d),   ad - bc = 1                       (one per point)
//! ```
//!
//! of height at most `B`. [`enumerate_count`] walks the `(a,c,z)` cells and
//! counts the admissible `b` in closed form: for `a != 0`, `d = (bc + z^(n+1))/a`
//! is integral exactly on one residue class of `b` modulo `|a|`, and the height
//! confines `b` to an interval. [`naive_count`] is the independent scan.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::arith::{count_in_class, div_ceil, div_floor, gcd, mod_inverse};
use crate::error::{Error, Result};
use crate::height::{is_integral_point_i128, HeightBound};
use crate::invariants::{adjoint_type, rational_to_f64, AdjointType, Boundary, Setup};

pub const DEFAULT_WORK_BUDGET: u64 = 1_000_000_000;

/// Outcome of a count at height bound `bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    pub bound: u64,
    pub count: u64,
    /// Normalized torsor tuples found: twice `count` for `D_w`, equal to it
    /// for `D_w + D_z`.
    pub raw_tuple_count: u64,
    pub elapsed: Duration,
}

/// A point `(a : c : z)` of the projective plane, indexing a fiber of
/// `(a:b:c:d:z:w) ↦ (a:c:z)`. The sign is normalized so that the first
/// nonzero coordinate is positive; coordinates are otherwise kept as given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiberKey {
    a: i64,
    c: i64,
    z: i64,
}

impl FiberKey {
    pub fn new(a: i64, c: i64, z: i64) -> Result<Self> {
        let first = [a, c, z]
            .into_iter()
            .find(|&v| v != 0)
            .ok_or_else(|| Error::InvalidArgument("fiber key (0:0:0) is not a point".into()))?;
        let sign = first.signum();
        Ok(FiberKey { a: a * sign, c: c * sign, z: z * sign })
    }

    /// Parses `"a:c:z"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<_> = s.split(':').map(|p| p.trim().parse::<i64>()).collect();
        match parts.as_slice() {
            [Ok(a), Ok(c), Ok(z)] => FiberKey::new(*a, *c, *z),
            _ => Err(Error::InvalidArgument(format!("cannot parse fiber key '{s}' (expected a:c:z)"))),
        }
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn z(&self) -> i64 {
        self.z
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a.into(), self.c.into()), self.z.into()) == 1
    }

    /// Representative `(a, c, z)` of the cell carrying this fiber's points
    /// with `w = 1`, or `None` when the fiber has no integral points.
    fn cell(&self, boundary: Boundary) -> Option<(i128, i128, i128)> {
        let (a, c, z) = (i128::from(self.a), i128::from(self.c), i128::from(self.z));
        if gcd(a, c) != 1 {
            return None;
        }
        match boundary {
            Boundary::Dw => Some((a, c, z)),
            Boundary::DwDz if z.abs() == 1 => Some((a * z, c * z, 1)),
            Boundary::DwDz => None,
        }
    }

    pub fn is_empty_for(&self, boundary: Boundary) -> bool {
        self.cell(boundary).is_none()
    }
}

impl std::fmt::Display for FiberKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.a, self.c, self.z)
    }
}

/// Per-cell counting with the `b`-radius precomputed for every `M`.
struct CellCounter {
    n: u32,
    radius: i128,
    /// `fiber_radius[m]` for `1 <= m <= radius`.
    fiber_radius: Vec<i128>,
}

impl CellCounter {
    fn new(s: &Setup, hb: &HeightBound) -> Result<Self> {
        let radius = to_i128(hb.cell_radius()?)?;
        let mut fiber_radius = vec![0i128; radius as usize + 1];
        for m in 1..=radius {
            fiber_radius[m as usize] = to_i128(hb.fiber_radius(m as u128)?)?;
        }
        Ok(CellCounter { n: s.n(), radius, fiber_radius })
    }

    /// Number of `(b, d)` with `max{|b|,|d|} <= T(M)` and `ad - bc = z^(n+1)`.
    /// Requires `gcd(a, c) = 1`.
    fn count(&self, a: i128, c: i128, z: i128) -> Result<i128> {
        let m = a.abs().max(c.abs()).max(z.abs());
        if m > self.radius {
            return Ok(0);
        }
        let t = self.fiber_radius[m as usize];
        let zz =
            z.checked_pow(self.n + 1).ok_or_else(|| Error::Overflow("z^(n+1) exceeds 128 bits".into()))?;
        if a == 0 {
            // gcd(0, c) = 1 forces c = ±1; then b = -c·z^(n+1) and d is free
            debug_assert_eq!(c.abs(), 1);
            let b = -c * zz;
            return Ok(if b.abs() <= t { 2 * t + 1 } else { 0 });
        }
        let abs_a = a.abs();
        let span = t.checked_mul(abs_a).ok_or_else(|| Error::Overflow("T·|a| exceeds 128 bits".into()))?;
        // |b| <= T and |b·c + z^(n+1)| <= T·|a|
        let (lo, hi) = if c == 0 {
            if zz.abs() > span {
                return Ok(0);
            }
            (-t, t)
        } else if c > 0 {
            (div_ceil(-span - zz, c).max(-t), div_floor(span - zz, c).min(t))
        } else {
            (div_ceil(span - zz, c).max(-t), div_floor(-span - zz, c).min(t))
        };
        let inv = mod_inverse(c, abs_a)
            .ok_or_else(|| Error::Consistency(format!("cell ({a}, {c}, {z}) is not coprime in (a, c)")))?;
        let r = (-inv * zz.rem_euclid(abs_a)).rem_euclid(abs_a);
        Ok(count_in_class(lo, hi, r, abs_a))
    }
}

fn to_i128(v: u128) -> Result<i128> {
    i128::try_from(v).map_err(|_| Error::Overflow("bound exceeds 127 bits".into()))
}

fn z_range(boundary: Boundary, radius: i128) -> std::ops::RangeInclusive<i128> {
    match boundary {
        Boundary::Dw => -radius..=radius,
        Boundary::DwDz => 1..=1,
    }
}

fn finish(s: &Setup, bound: u64, raw: u128, start: Instant) -> Result<CountResult> {
    let raw = u64::try_from(raw).map_err(|_| Error::Overflow("count exceeds 64 bits".into()))?;
    let count = match s.boundary() {
        Boundary::Dw => {
            if raw % 2 != 0 {
                return Err(Error::Consistency(format!("odd tuple count {raw} for D_w")));
            }
            raw / 2
        }
        Boundary::DwDz => raw,
    };
    Ok(CountResult { bound, count, raw_tuple_count: raw, elapsed: start.elapsed() })
}

/// Exact number of integral points of height at most `bound`.
///
/// Work is `O(B^(3/(l1 + n·l2)))` for `D_w` and `O(B^(2/(l1 + n·l2)))` for
/// `D_w + D_z`; the `a` coordinate is split across the current rayon pool.
pub fn enumerate_count(s: &Setup, bound: u64) -> Result<CountResult> {
    let start = Instant::now();
    let hb = HeightBound::new(s, bound)?;
    let counter = CellCounter::new(s, &hb)?;
    let r = i64::try_from(counter.radius).map_err(|_| Error::Overflow("cell radius".into()))?;
    let zs = z_range(s.boundary(), counter.radius);
    let per_a: Vec<Result<u128>> = (-r..=r)
        .into_par_iter()
        .map(|a| {
            let a = i128::from(a);
            let mut acc = 0u128;
            for c in -counter.radius..=counter.radius {
                if gcd(a, c) != 1 {
                    continue;
                }
                for z in zs.clone() {
                    acc += counter.count(a, c, z)? as u128;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut raw = 0u128;
    for part in per_a {
        raw += part?;
    }
    finish(s, bound, raw, start)
}

/// Scan-based count used to check [`enumerate_count`].
///
/// Scans `|a|, |c|, |z| <= B^(1/(l1+n l2))` (with `z = 1` for `D_w + D_z`) and
/// every `b` with `|b| <= B^(1/l2)`, solves the torsor equation for `d`, and
/// tests [`is_integral_point`](crate::height::is_integral_point) and the
/// height directly. When `a = 0` the roles of `b` and `d` swap. Refuses to
/// start if the scan would exceed `work_budget` tuple tests.
pub fn naive_count(s: &Setup, bound: u64, work_budget: u64) -> Result<CountResult> {
    let start = Instant::now();
    let hb = HeightBound::new(s, bound)?;
    let radius = to_i128(hb.cell_radius()?)?;
    if radius == 0 {
        return finish(s, bound, 0, start);
    }
    let bmax = to_i128(hb.fiber_radius(1)?)?;
    let zs = z_range(s.boundary(), radius);
    let side = 2 * radius as u128 + 1;
    let required = side
        .saturating_mul(side)
        .saturating_mul(zs.clone().count() as u128)
        .saturating_mul(2 * bmax as u128 + 1);
    if required > u128::from(work_budget) {
        return Err(Error::WorkBudgetExceeded { required, budget: work_budget });
    }
    let (n, boundary) = (s.n(), s.boundary());
    let test = |t: [i128; 6]| -> bool {
        let m = t[0].abs().max(t[2].abs()).max(t[4].abs()) as u128;
        let nn = t[1].abs().max(t[3].abs()) as u128;
        is_integral_point_i128(n, boundary, t) && hb.admits(m, nn, t[5].unsigned_abs())
    };
    let r = radius as i64;
    let per_a: Vec<u128> = (-r..=r)
        .into_par_iter()
        .map(|a| {
            let a = i128::from(a);
            let mut acc = 0u128;
            for c in -radius..=radius {
                for z in zs.clone() {
                    let zz = z.pow(n + 1);
                    if a != 0 {
                        for b in -bmax..=bmax {
                            let num = b * c + zz;
                            if num % a == 0 && test([a, b, c, num / a, z, 1]) {
                                acc += 1;
                            }
                        }
                    } else if c != 0 {
                        // -b·c = z^(n+1): b is pinned, d runs
                        if zz % c == 0 {
                            let b = -zz / c;
                            for d in -bmax..=bmax {
                                if test([0, b, c, d, z, 1]) {
                                    acc += 1;
                                }
                            }
                        }
                    }
                    // a = c = 0 needs z = 0, which violates gcd(a, c, z) = 1
                }
            }
            acc
        })
        .collect();
    finish(s, bound, per_a.into_iter().sum(), start)
}

/// Integral points of height at most `bound` in the fiber over `t`.
/// Fibers with `gcd(a, c) != 1`, or `z != ±1` for `D_w + D_z`, are empty.
pub fn fiber_count(s: &Setup, t: &FiberKey, bound: u64) -> Result<u64> {
    let Some((a, c, z)) = t.cell(s.boundary()) else {
        return Ok(0);
    };
    let hb = HeightBound::new(s, bound)?;
    let radius = to_i128(hb.cell_radius()?)?;
    let m = a.abs().max(c.abs()).max(z.abs());
    if m > radius {
        return Ok(0);
    }
    let t_m = to_i128(hb.fiber_radius(m as u128)?)?;
    // a one-cell counter; the radius table only needs entry m
    let mut fiber_radius = vec![0; m as usize + 1];
    fiber_radius[m as usize] = t_m;
    let counter = CellCounter { n: s.n(), radius, fiber_radius };
    let v = counter.count(a, c, z)?;
    u64::try_from(v).map_err(|_| Error::Overflow("fiber count exceeds 64 bits".into()))
}

/// `(1/|a|) · length({|b| <= y} ∩ {|b·c + zz| <= y·|a|})`, `a != 0`.
pub(crate) fn interval_volume(a: f64, c: f64, zz: f64, y: f64) -> f64 {
    let span = y * a.abs();
    let (lo, hi) = if c == 0.0 {
        if zz.abs() > span {
            return 0.0;
        }
        (-y, y)
    } else {
        let p = (-span - zz) / c;
        let q = (span - zz) / c;
        (p.min(q).max(-y), p.max(q).min(y))
    };
    (hi - lo).max(0.0) / a.abs()
}

fn check_ac(a: f64, c: f64) -> Result<()> {
    if a == 0.0 && c == 0.0 {
        return Err(Error::InvalidArgument("volume needs (a, c) != (0, 0)".into()));
    }
    Ok(())
}

/// The one-dimensional volume `V(a, c, z; B) = ∫ db/|a|` over
/// `|b|, |(z^(n+1) + bc)/a| <= B^(1/l2) · max{|a|,|c|,|z|}^(-l1/l2)`,
/// with `V(0, c, z; B) = V(c, 0, z; B)`.
pub fn volume_v(s: &Setup, a: f64, c: f64, z: f64, bound: f64) -> Result<f64> {
    check_ac(a, c)?;
    let (a, c) = if a == 0.0 { (c, a) } else { (a, c) };
    let l1 = rational_to_f64(s.l1());
    let l2 = rational_to_f64(s.l2());
    let m = a.abs().max(c.abs()).max(z.abs());
    let y = bound.powf(1.0 / l2) * m.powf(-l1 / l2);
    Ok(interval_volume(a, c, z.powi(s.n() as i32 + 1), y))
}

/// The `B`-free volume `V'(a, c, z)`: the same integral with the
/// `z^(n+1)` shift dropped and `B = 1`. Equals
/// `2 · max{|a|,|c|,|z|}^(-l1/l2) / max{|a|,|c|}`.
pub fn volume_v_prime(s: &Setup, a: f64, c: f64, z: f64) -> Result<f64> {
    check_ac(a, c)?;
    let (a, c) = if a == 0.0 { (c, a) } else { (a, c) };
    let r = rational_to_f64(s.l1()) / rational_to_f64(s.l2());
    let m = a.abs().max(c.abs()).max(z.abs());
    Ok(interval_volume(a, c, 0.0, m.powf(-r)))
}

/// Leading coefficient `c'(X_t)` of the fiber count `c'·B^(1/l2) + O(1)`.
pub fn fiber_constant(s: &Setup, t: &FiberKey) -> Result<f64> {
    if adjoint_type(s) != AdjointType::Moving {
        return Err(Error::InvalidArgument(
            "fiber constants are defined for moving adjoint classes only".into(),
        ));
    }
    match t.cell(s.boundary()) {
        None => Ok(0.0),
        Some((a, c, z)) => volume_v_prime(s, a as f64, c as f64, z as f64),
    }
}
