//! Integral points of bounded height on a family of spherical threefolds
//! `X_n`, `n >= 2`, with Cox coordinates `(a, b, c, d, z, w)` subject to
//! `ad - bc = z^(n+1) w`, off the boundary `D_w` or `D_w + D_z`.
//!
//! The crate computes exact invariants of a polarization, exact point counts,
//! local densities, the archimedean measure, and the predicted leading term
//! `c · B^a · (log B)^(b-1)`.
//!
//! ```
//! use spherical_points::{enumerate_count, invariants, Boundary, Setup};
//!
//! let s = Setup::parse(2, Boundary::DwDz, "1", "1").unwrap();
//! assert_eq!(enumerate_count(&s, 1).unwrap().count, 20);
//! assert_eq!(invariants(&s).b, 2);
//! ```

pub mod archimedean;
pub mod arith;
pub mod counting;
pub mod error;
pub mod height;
pub mod invariants;
pub mod local_densities;
pub mod predict;
pub mod quadrature;

pub use archimedean::{omega_inf, omega_inf_crosscheck, omega_inf_monte_carlo, w_volume, QuadratureReport};
pub use counting::{
    enumerate_count, fiber_constant, fiber_count, naive_count, volume_v, volume_v_prime, CountResult,
    FiberKey, DEFAULT_WORK_BUDGET,
};
pub use error::{Error, Result};
pub use height::{height_leq, height_real, is_integral_point, CoxTuple, HeightBound, RealCoxTuple};
pub use invariants::{
    a_invariant, adjoint_class, adjoint_type, alpha_invariant, b_invariant, delta_saving, e_invariant,
    invariants, parse_rational, AdjointType, Boundary, InvariantBundle, PicClass, Polarization, Rational,
    Setup,
};
pub use local_densities::{
    euler_product, omega_p, torsor_count_fp, truncated_euler, u_count_fp, x_count_fp, LocalDensity,
};
pub use predict::{compare, fiber_report, leading_constant, predicted_count, CompareRow, Prediction};
