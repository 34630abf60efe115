//! Randomized properties of the invariants, the height, and the densities.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use spherical_points::archimedean::omega_inf_with_tolerance;
use spherical_points::invariants::rational;
use spherical_points::local_densities::{euler_product, truncated_euler};
use spherical_points::predict::predicted_count;
use spherical_points::{
    a_invariant, adjoint_class, adjoint_type, b_invariant, e_invariant, height_leq, height_real,
    is_integral_point, AdjointType, Boundary, CoxTuple, PicClass, Polarization, Rational, RealCoxTuple,
    Setup,
};

fn boundary() -> impl Strategy<Value = Boundary> {
    prop_oneof![Just(Boundary::Dw), Just(Boundary::DwDz)]
}

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..=12, 1i64..=6).prop_map(|(p, q)| rational(p, q))
}

fn any_setup() -> impl Strategy<Value = Setup> {
    (2u32..=6, boundary(), positive_rational(), positive_rational())
        .prop_map(|(n, b, l1, l2)| Setup::new(n, b, Polarization::new(l1, l2).unwrap()).unwrap())
}

fn integer_setup() -> impl Strategy<Value = Setup> {
    (2u32..=4, boundary(), 1i64..=4, 1i64..=3).prop_map(|(n, b, l1, l2)| {
        Setup::new(n, b, Polarization::new(rational(l1, 1), rational(l2, 1)).unwrap()).unwrap()
    })
}

fn int(v: i64) -> Rational {
    rational(v, 1)
}

fn scaled_line_bundle(s: &Setup) -> PicClass {
    s.line_bundle().scale(&a_invariant(s))
}

proptest! {
    #[test]
    fn adjoint_class_identity(s in any_setup()) {
        let d = match s.boundary() {
            Boundary::Dw => (int(0), int(1)),
            Boundary::DwDz => (int(1), int(1)),
        };
        let a = a_invariant(&s);
        let adj = adjoint_class(&s);
        let n = int(s.n() as i64);
        prop_assert_eq!(&adj.d1, &(-(&n + int(2)) + d.0 + &a * (s.l1() + &n * s.l2())));
        prop_assert_eq!(&adj.d2, &(int(-2) + d.1 + &a * s.l2()));
        prop_assert!(adj.is_effective());
    }

    #[test]
    fn rescaling_keeps_the_geometry(s in any_setup(), k in positive_rational()) {
        let t = s.rescaled(&k).unwrap();
        prop_assert_eq!(a_invariant(&t), a_invariant(&s) / &k);
        prop_assert_eq!(b_invariant(&t), b_invariant(&s));
        prop_assert_eq!(adjoint_type(&t), adjoint_type(&s));
        prop_assert_eq!(scaled_line_bundle(&t), scaled_line_bundle(&s));
    }

    #[test]
    fn b_detects_trivial_adjoint(s in any_setup()) {
        let trivial = adjoint_class(&s).is_zero();
        prop_assert_eq!(b_invariant(&s) == 2, trivial);
        prop_assert_eq!(adjoint_type(&s) == AdjointType::Trivial, trivial);
        if let Ok(e) = e_invariant(&s) {
            prop_assert_eq!(e.is_zero(), trivial);
        }
    }

    #[test]
    fn exact_height_agrees_with_floating_point(
        s in integer_setup(),
        t in prop::array::uniform6(-40i64..=40),
        bound in 1u64..=1_000_000,
    ) {
        let [a, b, c, d, z, w] = t;
        let h = height_real(&s, &RealCoxTuple::new(a as f64, b as f64, c as f64, d as f64, z as f64, w as f64));
        let x = CoxTuple::new(a, b, c, d, z, w);
        let exact = height_leq(&s, &x, bound).unwrap();
        if (h - bound as f64).abs() > 1e-6 * bound as f64 {
            prop_assert_eq!(exact, h <= bound as f64);
        }
    }

    #[test]
    fn height_symmetries(
        s in integer_setup(),
        a in -30i64..=30, c in -30i64..=30, z in -5i64..=5, k in -3i64..=3,
        bound in 1u64..=100_000,
    ) {
        // with w = 1, pick b in the residue class making a | z^(n+1) + bc
        prop_assume!(a != 0);
        let zn = BigInt::from(z).pow(s.n() + 1);
        let b0 = (0..a.abs()).find(|t| ((&zn + BigInt::from(t * c)) % BigInt::from(a)).is_zero());
        prop_assume!(b0.is_some());
        let b = b0.unwrap() + k * a;
        let d = (&zn + BigInt::from(b) * BigInt::from(c)) / BigInt::from(a);
        let x = CoxTuple::new(a, b, c, d.clone(), z, 1);
        prop_assert!(x.satisfies_torsor_equation(s.n()));
        let sign = if s.n() % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let inv = CoxTuple::new(-a, &sign * b, -c, &sign * &d, -z, 1);
        let swap = CoxTuple::new(c, d.clone(), a, b, z, -1);
        prop_assert!(inv.satisfies_torsor_equation(s.n()));
        prop_assert_eq!(is_integral_point(&s, &inv), is_integral_point(&s, &x));
        let h = height_leq(&s, &x, bound).unwrap();
        prop_assert_eq!(height_leq(&s, &inv, bound).unwrap(), h);
        prop_assert_eq!(height_leq(&s, &swap, bound).unwrap(), h);
    }

    #[test]
    fn height_is_homogeneous(
        s in integer_setup(),
        t in prop::array::uniform6(-20i64..=20),
        k in 1u32..=3,
        bound in 1u64..=300,
    ) {
        let [a, b, c, d, z, w] = t;
        let x = CoxTuple::new(a, b, c, d, z, w);
        let sk = s.rescaled(&int(k as i64)).unwrap();
        prop_assert_eq!(height_leq(&sk, &x, bound.pow(k)).unwrap(), height_leq(&s, &x, bound).unwrap());
    }

    #[test]
    fn prediction_increases(b1 in 2.0f64..1e9, step in 1.0f64..1e6) {
        let s = Setup::parse(2, Boundary::DwDz, "2", "1").unwrap();
        prop_assert!(predicted_count(&s, b1 + step).unwrap() > predicted_count(&s, b1).unwrap());
    }
}

#[test]
fn truncated_euler_decreases_to_the_limit() {
    let s = Setup::parse(2, Boundary::Dw, "1", "1").unwrap();
    let limit = euler_product(&s);
    let mut last = 1.0;
    for p in [2, 3, 10, 100, 1000, 10_000, 100_000] {
        let t = truncated_euler(&s, p).unwrap();
        assert!(t < last && t > limit, "P={p}: {t}");
        last = t;
    }
}

#[test]
fn rigid_predictions_increase() {
    for (n, b, l1, l2) in
        [(2, Boundary::DwDz, "1", "1"), (2, Boundary::DwDz, "1", "2"), (2, Boundary::Dw, "1", "1")]
    {
        let s = Setup::parse(n, b, l1, l2).unwrap();
        let mut last = 0.0;
        for bound in [2.0, 3.0, 10.0, 1e3, 1e6, 1e9] {
            let v = predicted_count(&s, bound).unwrap();
            assert!(v > last, "{s} B={bound}");
            last = v;
        }
    }
}

/// `omega_inf` depends on `L` only through `a·L`.
#[test]
fn omega_is_invariant_under_rescaling() {
    let rel = 1e-5;
    for (n, b, l1, l2) in
        [(2, Boundary::DwDz, "1", "1"), (2, Boundary::DwDz, "1", "2"), (2, Boundary::Dw, "1", "1")]
    {
        let s = Setup::parse(n, b, l1, l2).unwrap();
        let w = omega_inf_with_tolerance(&s, rel).unwrap();
        for k in [rational(2, 1), rational(1, 3), rational(5, 2)] {
            let wk = omega_inf_with_tolerance(&s.rescaled(&k).unwrap(), rel).unwrap();
            let tol = 2.0 * rel * w.value + w.est_error + wk.est_error;
            assert!((w.value - wk.value).abs() <= tol, "{s} k={k}: {} vs {}", w.value, wk.value);
        }
    }
}

#[test]
fn monte_carlo_agrees_with_adaptive() {
    use spherical_points::archimedean::{omega_inf, omega_inf_monte_carlo, DEFAULT_SEED};
    for (n, b, l1, l2) in
        [(2, Boundary::DwDz, "1", "1"), (2, Boundary::DwDz, "1", "2"), (2, Boundary::Dw, "1", "1")]
    {
        let s = Setup::parse(n, b, l1, l2).unwrap();
        let q = omega_inf(&s).unwrap();
        let mc = omega_inf_monte_carlo(&s, 1 << 21, DEFAULT_SEED).unwrap();
        assert!(q.value > 0.0 && mc.value > 0.0);
        let se = (q.est_error.powi(2) + mc.est_error.powi(2)).sqrt();
        assert!(
            (q.value - mc.value).abs() <= 3.0 * se,
            "{s}: {} vs {} ± {}",
            q.value,
            mc.value,
            mc.est_error
        );
    }
}

/// Over many seeds the standardized Monte Carlo errors look like N(0, 1).
#[test]
fn monte_carlo_error_bars_are_calibrated() {
    use spherical_points::archimedean::omega_inf_monte_carlo;
    let s = Setup::parse(2, Boundary::DwDz, "1", "1").unwrap();
    let zs: Vec<f64> = (0..32u64)
        .map(|seed| {
            let r = omega_inf_monte_carlo(&s, 1 << 16, seed).unwrap();
            (r.value - 16.0) / r.est_error
        })
        .collect();
    let mean = zs.iter().sum::<f64>() / zs.len() as f64;
    let var = zs.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (zs.len() - 1) as f64;
    assert!(mean.abs() < 0.75, "mean z = {mean}");
    assert!((0.4..2.0).contains(&var), "var z = {var}");
}
