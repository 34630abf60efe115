//! The archimedean volume `omega_inf` and the model volume `W(B)`.
//!
//! `omega_inf` is integrated in the local chart
//! `(c0, z0, w0) ↦ (1 : 1 : c0 : c0 + z0^(n+1) w0 : z0 : w0)`:
//!
//! ```text
//! D_w, l1 < 2 l2:       ∫_{R^3} dc dz dw / (|w|^(1-e) H(1,1,c,c+z^(n+1)w,z,w)^a)
//! D_w + D_z, l1 < l2: 2 ∫_{R^2} dc dw    / (|w|^(1-e) H(1,1,c,c,0,w)^a)
//! D_w + D_z, l1 = l2: 4 ∫_R    dc       /  H(1,1,c,c,0,0)^a
//! ```
//!
//! The substitution `|w| = u^(1/e)` turns `dw/|w|^(1-e)` into `du/e`, so the
//! integrands are bounded at `w = 0`. Flipping the signs of `w` and `c`
//! together preserves the height, which halves the `w` range.
//!
//! `W(B)` is computed independently on a bounded domain: after rescaling,
//! `W(B) = B^a/2 ∫_{[-1,1]^3} V(a,c,z;1) da dc dz` for `D_w`, and similarly
//! for `D_w + D_z`, with the inner `b` integral done in closed form. The two
//! are tied by `W(B) = (alpha · omega_inf / a) · B^a (log B)^(b-1)`.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::counting::interval_volume;
use crate::error::{Error, Result};
use crate::invariants::{
    a_invariant, alpha_invariant, b_invariant, e_invariant, rational_to_f64, Boundary, Setup,
};
use crate::quadrature::{integrate, integrate_half_line, integrate_line, Estimate, Tolerance};

pub const DEFAULT_MC_SAMPLES: u64 = 10_000_000;
pub const DEFAULT_SEED: u64 = 0x5eed;
const MC_BATCH: u64 = 1 << 16;

/// Relative agreement required between the two routes.
pub const CROSSCHECK_TOLERANCE: f64 = 5e-3;
pub const CROSSCHECK_BOUND: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Adaptive,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Adaptive => "ADAPTIVE",
            Method::MonteCarlo => "MONTE_CARLO",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureReport {
    pub value: f64,
    /// Error estimate (adaptive) or standard error (Monte Carlo).
    pub est_error: f64,
    pub method: Method,
    /// Integrand evaluations (adaptive) or samples (Monte Carlo).
    pub samples_or_cells: u64,
    pub seed: Option<u64>,
}

/// Which boundary stratum carries the measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stratum {
    /// All of `X(R)`, for `D_w`.
    Open,
    /// `D_z(R)`, for `D_w + D_z` with `l1 < l2`.
    Dz,
    /// `(D_w ∩ D_z)(R)`, for `D_w + D_z` with `l1 = l2`.
    DwDz,
}

fn stratum(s: &Setup) -> Result<Stratum> {
    use std::cmp::Ordering::*;
    let two_l2 = s.l2() + s.l2();
    match s.boundary() {
        Boundary::Dw if *s.l1() < two_l2 => Ok(Stratum::Open),
        Boundary::Dw => Err(Error::InfiniteMeasure),
        Boundary::DwDz => match s.l1().cmp(s.l2()) {
            Less => Ok(Stratum::Dz),
            Equal => Ok(Stratum::DwDz),
            Greater => Err(Error::InfiniteMeasure),
        },
    }
}

#[derive(Debug, Clone, Copy)]
struct Params {
    n: i32,
    l1: f64,
    l2: f64,
    weight: f64,
    a: f64,
    /// `1/e`, or 0 when `e = 0`
    inv_e: f64,
}

impl Params {
    fn new(s: &Setup) -> Self {
        let e = e_invariant(s).map(|e| rational_to_f64(&e)).unwrap_or(0.0);
        Params {
            n: s.n() as i32,
            l1: rational_to_f64(s.l1()),
            l2: rational_to_f64(s.l2()),
            weight: rational_to_f64(&s.weight()),
            a: rational_to_f64(&a_invariant(s)),
            inv_e: if e > 0.0 { 1.0 / e } else { 0.0 },
        }
    }

    /// `H^(-a)` with `H = max{M^l1 N^l2, M^(l1+n l2) |w|^l2}`, in logs.
    #[inline]
    fn density(&self, m: f64, nn: f64, w: f64) -> f64 {
        let lm = m.ln();
        let first = self.l1 * lm + self.l2 * nn.ln();
        let second = self.weight * lm + self.l2 * w.abs().ln();
        (-self.a * first.max(second)).exp()
    }

    /// Integrand of the open-stratum form at `(c, z, w)`.
    #[inline]
    fn open(&self, c: f64, z: f64, w: f64) -> f64 {
        let m = 1f64.max(c.abs()).max(z.abs());
        let nn = 1f64.max((c + z.powi(self.n + 1) * w).abs());
        self.density(m, nn, w)
    }

    /// Integrand on `D_z`, at `(c, w)`.
    #[inline]
    fn dz(&self, c: f64, w: f64) -> f64 {
        let m = 1f64.max(c.abs());
        self.density(m, m, w)
    }

    #[inline]
    fn w_of_u(&self, u: f64) -> f64 {
        u.powf(self.inv_e)
    }
}

/// Default relative tolerance of the outer adaptive level.
pub const DEFAULT_REL_TOL: f64 = 1e-4;

/// Tolerances for nested integration: inner levels run tighter so that
/// their noise does not look like structure to the outer level.
#[derive(Debug, Clone, Copy)]
struct Nested {
    outer: Tolerance,
    middle: Tolerance,
    inner: Tolerance,
}

impl Nested {
    fn new(rel: f64) -> Self {
        let t = |rel: f64, abs: f64| Tolerance { abs, rel, max_evals: 20_000 };
        Nested { outer: t(rel, 0.0), middle: t(rel / 10.0, 1e-13), inner: t(rel / 100.0, 1e-14) }
    }
}

/// Runs a nested integral and accumulates evaluations and error estimates
/// of the inner levels.
struct Tally {
    evals: u64,
    inner_error: f64,
}

fn report(outer: Estimate, inner: &Tally, scale: f64) -> QuadratureReport {
    QuadratureReport {
        value: outer.value * scale,
        est_error: (outer.error + inner.inner_error) * scale.abs(),
        method: Method::Adaptive,
        samples_or_cells: outer.evals + inner.evals,
        seed: None,
    }
}

/// `omega_inf` by adaptive quadrature at [`DEFAULT_REL_TOL`].
pub fn omega_inf(s: &Setup) -> Result<QuadratureReport> {
    omega_inf_with_tolerance(s, DEFAULT_REL_TOL)
}

pub fn omega_inf_with_tolerance(s: &Setup, rel: f64) -> Result<QuadratureReport> {
    let st = stratum(s)?;
    let tol = Nested::new(rel);
    let p = Params::new(s);
    let n1 = p.n + 1;
    let mut tally = Tally { evals: 0, inner_error: 0.0 };
    Ok(match st {
        Stratum::DwDz => {
            let est = integrate_line(|c| p.dz(c, 0.0), &[-1.0, 1.0], tol.inner);
            report(est, &tally, 4.0)
        }
        Stratum::Dz => {
            let outer = integrate_half_line(
                |u| {
                    let w = p.w_of_u(u);
                    // the two height terms cross at |c| = w^(-1/(n-1))
                    let k = w.powf(-1.0 / f64::from(p.n - 1));
                    let inner = integrate_line(|c| p.dz(c, w), &[-k, -1.0, 1.0, k], tol.inner);
                    tally.evals += inner.evals;
                    tally.inner_error += inner.error * 1e-3;
                    inner.value
                },
                0.0,
                &[1.0],
                tol.outer,
            );
            // two signs of w, the prefactor 2, and du/e
            report(outer, &tally, 4.0 * p.inv_e)
        }
        Stratum::Open => {
            let outer = integrate_half_line(
                |u| {
                    let w = p.w_of_u(u);
                    let mut inner_evals = 0;
                    let middle = integrate_line(
                        |z| {
                            let shift = z.powi(n1) * w;
                            let za = z.abs();
                            let breaks = [-1.0, 1.0, -za, za, -shift - 1.0, -shift, -shift + 1.0];
                            let inner = integrate_line(|c| p.open(c, z, w), &breaks, tol.inner);
                            inner_evals += inner.evals;
                            inner.value
                        },
                        &[-1.0, 0.0, 1.0],
                        tol.middle,
                    );
                    tally.evals += inner_evals + middle.evals;
                    tally.inner_error += middle.error * 1e-3;
                    middle.value
                },
                0.0,
                &[1.0],
                tol.outer,
            );
            report(outer, &tally, 2.0 * p.inv_e)
        }
    })
}

/// `omega_inf` by Monte Carlo in the same coordinates, each axis mapped to a
/// bounded interval. Batch `i` draws from a ChaCha stream selected by `i`,
/// and batch sums are combined in batch order, so the result depends only
/// on `(samples, seed)`.
pub fn omega_inf_monte_carlo(s: &Setup, samples: u64, seed: u64) -> Result<QuadratureReport> {
    let st = stratum(s)?;
    if samples < 2 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least 2 samples".into()));
    }
    let p = Params::new(s);
    // x in (-1, 1) ↦ x/(1-|x|), Jacobian 1/(1-|x|)^2
    let line = |x: f64| {
        let r = 1.0 / (1.0 - x.abs());
        (x * r, r * r)
    };
    // t in (0, 1) ↦ t/(1-t)
    let half = |t: f64| {
        let r = 1.0 / (1.0 - t);
        (t * r, r * r)
    };
    let sample = |rng: &mut ChaCha8Rng| -> f64 {
        let mut draw = || -> f64 { rng.sample(Open01) };
        match st {
            Stratum::DwDz => {
                let (c, jc) = line(2.0 * draw() - 1.0);
                4.0 * 2.0 * p.dz(c, 0.0) * jc
            }
            Stratum::Dz => {
                let (u, ju) = half(draw());
                let (c, jc) = line(2.0 * draw() - 1.0);
                4.0 * p.inv_e * 2.0 * p.dz(c, p.w_of_u(u)) * ju * jc
            }
            Stratum::Open => {
                let (u, ju) = half(draw());
                let (z, jz) = line(2.0 * draw() - 1.0);
                let (c, jc) = line(2.0 * draw() - 1.0);
                2.0 * p.inv_e * 4.0 * p.open(c, z, p.w_of_u(u)) * ju * jz * jc
            }
        }
    };
    let batches = samples.div_ceil(MC_BATCH);
    let sums: Vec<(f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let len = MC_BATCH.min(samples - i * MC_BATCH);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                let v = sample(&mut rng);
                s1 += v;
                s2 += v * v;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = samples as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok(QuadratureReport {
        value: mean,
        est_error: (var / n).sqrt(),
        method: Method::MonteCarlo,
        samples_or_cells: samples,
        seed: Some(seed),
    })
}

/// `∫ V(a, c, z; 1)` over the unit box (`D_w`: three variables, halved;
/// `D_w + D_z`, `l1 < l2`: `z = 0`, two variables), or for `l1 = l2` the
/// area of `{(b, c) : H(1, b, c, bc, 0, 0) <= 1}`.
fn unit_volume(s: &Setup, st: Stratum, rel: f64) -> QuadratureReport {
    let tol = Nested::new(rel);
    let p = Params::new(s);
    let r = p.l1 / p.l2;
    let n1 = p.n + 1;
    // V(a, c, z; 1) with the (a, c) swap at a = 0
    let v = |a: f64, c: f64, z: f64| {
        let (a, c) = if a == 0.0 { (c, a) } else { (a, c) };
        let m = a.abs().max(c.abs()).max(z.abs());
        interval_volume(a, c, z.powi(n1), (-r * m.ln()).exp())
    };
    // kinks in a >= 0 for fixed c, z >= 0: M switches at a = max(c, z);
    // below it the b-interval ends cross ±Z at a = |s/Z ± c|
    let a_breaks = |c: f64, z: f64| {
        let m0 = c.max(z);
        let z0 = (-r * m0.ln()).exp();
        let s = z.powi(n1) / z0;
        [m0, (s - c).abs(), s + c]
    };
    let mut tally = Tally { evals: 0, inner_error: 0.0 };
    match st {
        // V is even in each of a, c, z separately (b ↦ -b absorbs the signs),
        // so the box integrals run over [0, 1]^k
        Stratum::Open => {
            let outer = integrate(
                |z| {
                    let mut inner_evals = 0;
                    let middle = integrate(
                        |c| {
                            let inner = integrate(|a| v(a, c, z), 0.0, 1.0, &a_breaks(c, z), tol.inner);
                            inner_evals += inner.evals;
                            inner.value
                        },
                        0.0,
                        1.0,
                        &[z],
                        tol.middle,
                    );
                    tally.evals += inner_evals + middle.evals;
                    tally.inner_error += middle.error * 1e-3;
                    middle.value
                },
                0.0,
                1.0,
                &[],
                tol.outer,
            );
            report(outer, &tally, 4.0)
        }
        Stratum::Dz => {
            let outer = integrate(
                |c| {
                    let inner = integrate(|a| v(a, c, 0.0), 0.0, 1.0, &a_breaks(c, 0.0), tol.inner);
                    tally.evals += inner.evals;
                    tally.inner_error += inner.error * 1e-3;
                    inner.value
                },
                0.0,
                1.0,
                &[],
                tol.outer,
            );
            report(outer, &tally, 4.0)
        }
        Stratum::DwDz => {
            // H(1, b, c, bc, 0, 0) = max(1,|c|)^l1 · (|b| max(1,|c|))^l2
            let est = integrate_line(
                |c| {
                    let m = 1f64.max(c.abs());
                    2.0 * (-(p.l1 * m.ln()) / p.l2).exp() / m
                },
                &[-1.0, 1.0],
                tol.inner,
            );
            report(est, &tally, 1.0)
        }
    }
}

/// The model volume `W(B)` from its bounded-domain form. For `D_w + D_z`
/// with `l1 = l2` only the `B^a log B` main term is returned.
pub fn w_volume(s: &Setup, bound: f64) -> Result<QuadratureReport> {
    w_volume_with_tolerance(s, bound, DEFAULT_REL_TOL)
}

pub fn w_volume_with_tolerance(s: &Setup, bound: f64, rel: f64) -> Result<QuadratureReport> {
    if alpha_invariant(s).is_err() {
        return Err(Error::MovingAdjoint("W(B) is defined for rigid or trivial adjoint classes"));
    }
    let st = stratum(s)?;
    if bound.is_nan() || bound <= 0.0 || (st == Stratum::DwDz && bound <= 1.0) {
        return Err(Error::InvalidArgument(format!("bound {bound} out of range for W(B)")));
    }
    let p = Params::new(s);
    let unit = unit_volume(s, st, rel);
    let scale = match st {
        Stratum::Open | Stratum::Dz => bound.powf(p.a),
        Stratum::DwDz => 2.0 * bound.powf(p.a) * bound.ln() / (p.l1 * f64::from(p.n + 1)),
    };
    Ok(QuadratureReport { value: unit.value * scale, est_error: unit.est_error * scale, ..unit })
}

/// Both sides of `W(B) / (B^a (log B)^(b-1)) = alpha · omega_inf / a`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub bound: f64,
    pub normalized_w: f64,
    pub tamagawa: f64,
    pub relative_difference: f64,
}

/// Compares the two routes at `B = 10^4`; a relative difference above
/// [`CROSSCHECK_TOLERANCE`] is reported as a consistency error.
pub fn omega_inf_crosscheck(s: &Setup) -> Result<CrossCheck> {
    let omega = omega_inf(s)?;
    let bound = CROSSCHECK_BOUND;
    let w = w_volume(s, bound)?;
    let a = rational_to_f64(&a_invariant(s));
    let alpha = rational_to_f64(&alpha_invariant(s)?);
    let b = b_invariant(s);
    let normalized_w = w.value / (bound.powf(a) * bound.ln().powi(b as i32 - 1));
    let tamagawa = alpha * omega.value / a;
    let relative_difference = (normalized_w - tamagawa).abs() / tamagawa;
    if relative_difference > CROSSCHECK_TOLERANCE {
        return Err(Error::Consistency(format!(
            "{s}: W(B)/(B^a log^(b-1) B) = {normalized_w} but alpha·omega/a = {tamagawa}"
        )));
    }
    Ok(CrossCheck { bound, normalized_w, tamagawa, relative_difference })
}
