//! Predicted leading terms and comparison with exact counts.
//!
//! Rigid or trivial adjoint class:
//! `N(B) ~ (alpha/a) · omega_inf · prod_p omega_p · B^a (log B)^(b-1)`, with
//! `prod_p omega_p = 6/pi^2`. Moving adjoint class: every fiber of
//! `(a:c:z)` contributes `c'(X_t) · B^(1/l2)` and the constant is
//! `sum_t c'(X_t)`.
//!
//! The fiber sum is evaluated in grouped form. With `r = l1/l2` and
//! `8 φ(k)` primitive pairs `(a, c)` of sup-norm `k`:
//!
//! ```text
//! D_w + D_z:  16 · sum_{k >= 1} φ(k) k^(-r-1)
//! D_w:         8 · sum_{k >= 1} (φ(k)/k) · sum_{z in Z} max(k, |z|)^(-r)
//! ```
//!
//! truncated at `max{|a|, |c|, |z|} <= M`.

use crate::archimedean::omega_inf;
use crate::arith::totients_up_to;
use crate::counting::{enumerate_count, fiber_constant, fiber_count, FiberKey};
use crate::error::{Error, Result};
use crate::invariants::{
    a_invariant, adjoint_type, alpha_invariant, b_invariant, rational_to_f64, AdjointType, Boundary,
    Rational, Setup,
};
use crate::local_densities::euler_product;

/// Relative size of the tail bound at which the fiber sum stops growing `M`.
pub const FIBER_SUM_REL_TAIL: f64 = 1e-3;
const FIRST_TRUNCATION: u64 = 64;
const MAX_TRUNCATION: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct Constituents {
    pub alpha: Option<Rational>,
    pub omega_inf: Option<f64>,
    pub omega_inf_error: Option<f64>,
    pub euler: f64,
    pub fiber_sum: Option<f64>,
    pub truncation_m: Option<u64>,
    /// Upper bound on the omitted part of the fiber sum.
    pub tail_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub a: Rational,
    pub b: u32,
    /// `None` exactly when the prediction is unsupported.
    pub c_leading: Option<f64>,
    pub constituents: Constituents,
    pub supported: bool,
}

/// One line of a comparison between an exact count and a prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub bound: u64,
    pub exact: u64,
    pub predicted: Option<f64>,
    pub ratio: Option<f64>,
}

/// Truncated fiber sum with its tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberSum {
    pub value: f64,
    pub truncation_m: u64,
    pub tail_bound: f64,
}

fn ratio_r(s: &Setup) -> f64 {
    rational_to_f64(&(s.l1() / s.l2()))
}

fn require_moving(s: &Setup) -> Result<()> {
    if adjoint_type(s) != AdjointType::Moving {
        return Err(Error::InvalidArgument("fiber sums are defined for moving adjoint classes only".into()));
    }
    Ok(())
}

/// Grouped fiber sum over `max{|a|, |c|, |z|} <= m`, in O(m).
pub fn fiber_sum_truncated(s: &Setup, m: u64) -> Result<FiberSum> {
    require_moving(s)?;
    if m == 0 {
        return Err(Error::InvalidArgument("truncation must be at least 1".into()));
    }
    let r = ratio_r(s);
    let phi = totients_up_to(m as usize);
    let mf = m as f64;
    match s.boundary() {
        Boundary::DwDz => {
            let value =
                16.0 * (1..=m as usize).map(|k| f64::from(phi[k]) * (k as f64).powf(-r - 1.0)).sum::<f64>();
            // sum_{k > m} φ(k) k^(-r-1) <= sum_{k > m} k^(-r) <= m^(1-r)/(r-1)
            let tail_bound = 16.0 * mf.powf(1.0 - r) / (r - 1.0);
            Ok(FiberSum { value, truncation_m: m, tail_bound })
        }
        Boundary::Dw => {
            // suffix[z] = sum_{z < j <= m} j^(-r)
            let mut suffix = vec![0.0; m as usize + 1];
            for j in (1..m as usize).rev() {
                suffix[j] = suffix[j + 1] + ((j + 1) as f64).powf(-r);
            }
            let value = 8.0
                * (1..=m as usize)
                    .map(|k| {
                        let kf = k as f64;
                        let g = (2.0 * kf + 1.0) * kf.powf(-r) + 2.0 * suffix[k];
                        f64::from(phi[k]) / kf * g
                    })
                    .sum::<f64>();
            // omitted |z| > m for k <= m, plus all k > m
            let z_tail = 16.0 * mf.powf(2.0 - r) / (r - 1.0);
            let k_tail = 8.0 * (3.0 + 2.0 / (r - 1.0)) * mf.powf(2.0 - r) / (r - 2.0);
            Ok(FiberSum { value, truncation_m: m, tail_bound: z_tail + k_tail })
        }
    }
}

/// Doubles `M` until the tail bound is below [`FIBER_SUM_REL_TAIL`] of the
/// partial sum and one more doubling moves the sum by less than the bound.
/// Stops at `M = 2^24` and reports whatever bound was reached.
pub fn fiber_sum(s: &Setup) -> Result<FiberSum> {
    let mut m = FIRST_TRUNCATION;
    let mut cur = fiber_sum_truncated(s, m)?;
    while m < MAX_TRUNCATION {
        let next = fiber_sum_truncated(s, 2 * m)?;
        let settled = cur.tail_bound <= FIBER_SUM_REL_TAIL * cur.value
            && (next.value - cur.value).abs() <= cur.tail_bound;
        if settled {
            break;
        }
        m *= 2;
        cur = next;
    }
    Ok(cur)
}

/// The same truncated sum, one [`FiberKey`] at a time, in sorted key order.
/// Quadratic or cubic in `m`; for cross-checking.
pub fn fiber_sum_by_keys(s: &Setup, m: i64) -> Result<f64> {
    require_moving(s)?;
    let mut keys = Vec::new();
    let zs: Vec<i64> = match s.boundary() {
        Boundary::Dw => (-m..=m).collect(),
        Boundary::DwDz => vec![-1, 1],
    };
    for a in -m..=m {
        for c in -m..=m {
            for &z in &zs {
                if (a, c, z) == (0, 0, 0) {
                    continue;
                }
                let key = FiberKey::new(a, c, z)?;
                // each point once: keep the representative that is its own key
                if (key.a(), key.c(), key.z()) == (a, c, z) && key.is_primitive() {
                    keys.push(key);
                }
            }
        }
    }
    keys.sort();
    let mut total = 0.0;
    for k in &keys {
        total += fiber_constant(s, k)?;
    }
    Ok(total)
}

/// Sum of `V'(a, c, z)` over the integer vectors carrying points
/// (`gcd(a, c) = 1`, and `z = ±1` for `D_w + D_z`), halved: every point has
/// two such vectors.
pub fn fiber_sum_by_vectors(s: &Setup, m: i64) -> Result<f64> {
    require_moving(s)?;
    let zs: Vec<i64> = match s.boundary() {
        Boundary::Dw => (-m..=m).collect(),
        Boundary::DwDz => vec![-1, 1],
    };
    let mut total = 0.0;
    for a in -m..=m {
        for c in -m..=m {
            if crate::arith::gcd(a.into(), c.into()) != 1 {
                continue;
            }
            for &z in &zs {
                total += crate::counting::volume_v_prime(s, a as f64, c as f64, z as f64)?;
            }
        }
    }
    Ok(total / 2.0)
}

/// The predicted leading constant. Never fails on a valid setup: the one
/// unsupported case (`D_w`, `l1 = 2 l2`) returns `supported = false`.
pub fn leading_constant(s: &Setup) -> Result<Prediction> {
    let a = a_invariant(s);
    let b = b_invariant(s);
    let euler = euler_product(s);
    let mut constituents = Constituents {
        alpha: None,
        omega_inf: None,
        omega_inf_error: None,
        euler,
        fiber_sum: None,
        truncation_m: None,
        tail_bound: None,
    };
    let c_leading = match adjoint_type(s) {
        AdjointType::Moving => {
            let fs = fiber_sum(s)?;
            constituents.fiber_sum = Some(fs.value);
            constituents.truncation_m = Some(fs.truncation_m);
            constituents.tail_bound = Some(fs.tail_bound);
            Some(fs.value)
        }
        AdjointType::Trivial if s.boundary() == Boundary::Dw => {
            constituents.alpha = alpha_invariant(s).ok();
            None
        }
        AdjointType::Rigid | AdjointType::Trivial => {
            let alpha = alpha_invariant(s)?;
            let omega = omega_inf(s)?;
            let c = rational_to_f64(&(&alpha / &a)) * omega.value * euler;
            constituents.alpha = Some(alpha);
            constituents.omega_inf = Some(omega.value);
            constituents.omega_inf_error = Some(omega.est_error);
            Some(c)
        }
    };
    Ok(Prediction { a, b, supported: c_leading.is_some(), c_leading, constituents })
}

impl Prediction {
    /// `c · B^a · (log B)^(b-1)`, natural logarithm, `B >= 2`.
    pub fn at(&self, bound: f64) -> Result<f64> {
        let c = self
            .c_leading
            .ok_or_else(|| Error::Unsupported("D_w with l1 = 2 l2 has no leading constant here".into()))?;
        if bound.is_nan() || bound < 2.0 {
            return Err(Error::InvalidArgument(format!("prediction needs B >= 2, got {bound}")));
        }
        let a = rational_to_f64(&self.a);
        Ok(c * bound.powf(a) * bound.ln().powi(self.b as i32 - 1))
    }
}

pub fn predicted_count(s: &Setup, bound: f64) -> Result<f64> {
    leading_constant(s)?.at(bound)
}

fn check_bounds(bounds: &[u64]) -> Result<()> {
    if bounds.is_empty() {
        return Err(Error::InvalidArgument("empty list of bounds".into()));
    }
    if bounds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("bounds must be strictly ascending".into()));
    }
    Ok(())
}

fn row(bound: u64, exact: u64, predicted: Option<f64>) -> CompareRow {
    let ratio = predicted.filter(|&p| p > 0.0).map(|p| exact as f64 / p);
    CompareRow { bound, exact, predicted, ratio }
}

/// Exact counts against the prediction. Unsupported setups and `B < 2`
/// give rows without a prediction.
pub fn compare(s: &Setup, bounds: &[u64]) -> Result<Vec<CompareRow>> {
    check_bounds(bounds)?;
    let prediction = leading_constant(s)?;
    bounds
        .iter()
        .map(|&b| {
            let exact = enumerate_count(s, b)?.count;
            let predicted =
                if prediction.supported && b >= 2 { Some(prediction.at(b as f64)?) } else { None };
            Ok(row(b, exact, predicted))
        })
        .collect()
}

/// Points on one fiber against `c'(X_t) · B^(1/l2)`.
pub fn fiber_report(s: &Setup, t: &FiberKey, bounds: &[u64]) -> Result<Vec<CompareRow>> {
    require_moving(s)?;
    check_bounds(bounds)?;
    if t.is_empty_for(s.boundary()) {
        return Err(Error::EmptyFiber(format!("{t} carries no integral points")));
    }
    let c = fiber_constant(s, t)?;
    let inv_l2 = rational_to_f64(&s.l2().recip());
    bounds.iter().map(|&b| Ok(row(b, fiber_count(s, t, b)?, Some(c * (b as f64).powf(inv_l2))))).collect()
}
