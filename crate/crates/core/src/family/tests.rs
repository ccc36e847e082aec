use super::*;
use crate::montecarlo::ks::ks_one_sample;
use crate::numerics::quadrature::{integrate, QuadOptions};
use approx::assert_relative_eq;
use proptest::prelude::*;
use std::sync::Arc;

fn builtins() -> Vec<(Box<dyn Family>, f64)> {
    vec![
        (Box::new(PowerFunction), 1.7),
        (Box::new(Gumbel), -0.4),
        (Box::new(Frechet::new(2.0).unwrap()), 1.3),
        (Box::new(Frechet::new(0.7).unwrap()), 0.6),
    ]
}

#[test]
fn cdf_examples() {
    assert_relative_eq!(cdf(&PowerFunction, 1.0, 0.5).unwrap(), 0.5, max_relative = 1e-15);
    assert_relative_eq!(cdf(&PowerFunction, 2.0, 0.5).unwrap(), 0.25, max_relative = 1e-15);
    assert_relative_eq!(cdf(&Gumbel, 0.0, 0.0).unwrap(), (-1f64).exp(), max_relative = 1e-15);
}

#[test]
fn pdf_examples() {
    assert_relative_eq!(pdf(&PowerFunction, 2.0, 0.5).unwrap(), 1.0, max_relative = 1e-14);
    for x in [0.01, 0.3, 0.99] {
        assert_relative_eq!(pdf(&PowerFunction, 1.0, x).unwrap(), 1.0, max_relative = 1e-14);
    }
    let fr = Frechet::new(2.0).unwrap();
    assert_relative_eq!(pdf(&fr, 1.0, 1.0).unwrap(), 2.0 * (-1f64).exp(), max_relative = 1e-14);
}

#[test]
fn quantile_examples() {
    assert_relative_eq!(quantile(&PowerFunction, 2.0, 0.25).unwrap(), 0.5, max_relative = 1e-14);
    assert_relative_eq!(quantile(&PowerFunction, 1.0, 0.5).unwrap(), 0.5, max_relative = 1e-14);
    assert!(quantile(&Gumbel, 0.0, (-1f64).exp()).unwrap().abs() < 1e-15);
    for p in [0.0, 1.0, -0.1, f64::NAN] {
        assert!(matches!(quantile(&Gumbel, 0.0, p), Err(Error::Argument(_))), "p={p}");
    }
}

#[test]
fn domain_and_parameter_errors() {
    for x in [0.0, 1.0, -0.5, 2.0, f64::NAN] {
        assert!(matches!(cdf(&PowerFunction, 1.0, x), Err(Error::Domain { .. })), "x={x}");
        assert!(matches!(pdf(&PowerFunction, 1.0, x), Err(Error::Domain { .. })), "x={x}");
    }
    assert!(matches!(cdf(&PowerFunction, 0.0, 0.5), Err(Error::Parameter { .. })));
    assert!(matches!(cdf(&PowerFunction, -2.0, 0.5), Err(Error::Parameter { .. })));
    let fr = Frechet::new(2.0).unwrap();
    assert!(matches!(cdf(&fr, 1.0, 0.0), Err(Error::Domain { .. })));
    assert!(cdf(&Gumbel, 0.0, f64::INFINITY).is_err());
    assert!(Frechet::new(0.0).is_err());
    assert!(Frechet::new(f64::NAN).is_err());
}

/// `∫ pdf` over the support after mapping it onto `(0, 1)`.
fn total_mass(member: &dyn Family, theta: f64) -> f64 {
    let s = member.support();
    let jac = |u: f64| match (s.lo.is_finite(), s.hi.is_finite()) {
        (true, true) => s.hi - s.lo,
        (true, false) => 1.0 / ((1.0 - u) * (1.0 - u)),
        (false, true) => 1.0 / (u * u),
        (false, false) => 1.0 / (u * (1.0 - u)),
    };
    integrate(
        |u| {
            let x = s.from_unit(u);
            pdf(member, theta, x).map_or(0.0, |d| d * jac(u))
        },
        0.0,
        1.0,
        QuadOptions::default(),
    )
    .unwrap()
    .value
}

#[test]
fn densities_integrate_to_one() {
    for (member, theta) in builtins() {
        let mass = total_mass(member.as_ref(), theta);
        assert!((mass - 1.0).abs() < 1e-6, "{}: {mass}", member.label());
    }
}

#[test]
fn cdf_inverts_quantile() {
    for (member, theta) in builtins() {
        for k in 1..=99 {
            let p = k as f64 / 100.0;
            let x = quantile(member.as_ref(), theta, p).unwrap();
            let back = cdf(member.as_ref(), theta, x).unwrap();
            assert!((back - p).abs() < 1e-9, "{} p={p}: {back}", member.label());
        }
    }
}

#[test]
fn cdf_monotone_in_x() {
    for (member, theta) in builtins() {
        let xs = member.support().grid(200, 1e-3);
        let fs: Vec<f64> = xs.iter().map(|&x| cdf(member.as_ref(), theta, x).unwrap()).collect();
        assert!(fs.windows(2).all(|w| w[0] <= w[1]), "{}", member.label());
    }
}

proptest! {
    #[test]
    fn power_and_frechet_cdf_fall_in_theta(x in 0.01f64..0.99, t1 in 0.05f64..5.0, dt in 0.01f64..3.0) {
        let fr = Frechet::new(1.5).unwrap();
        prop_assert!(cdf(&PowerFunction, t1 + dt, x).unwrap() <= cdf(&PowerFunction, t1, x).unwrap());
        let y = x * 10.0;
        prop_assert!(cdf(&fr, t1 + dt, y).unwrap() <= cdf(&fr, t1, y).unwrap());
    }

    #[test]
    fn a_strictly_decreasing_on_random_pairs(u1 in 0.001f64..0.999, u2 in 0.001f64..0.999) {
        prop_assume!((u1 - u2).abs() > 1e-6);
        let (lo, hi) = if u1 < u2 { (u1, u2) } else { (u2, u1) };
        for (member, _) in builtins() {
            let s = member.support();
            prop_assert!(member.a(s.from_unit(lo)) > member.a(s.from_unit(hi)));
        }
    }
}

#[test]
fn sampling_is_deterministic_and_in_support() {
    for (member, theta) in builtins() {
        let a = sample_iid(member.as_ref(), theta, 1, 42).unwrap();
        let b = sample_iid(member.as_ref(), theta, 1, 42).unwrap();
        assert_eq!(a, b);
        let many = sample_iid(member.as_ref(), theta, 1000, 1).unwrap();
        assert!(many.iter().all(|&x| member.support().contains(x)));
    }
    assert!(matches!(sample_iid(&PowerFunction, 1.0, 0, 1), Err(Error::Argument(_))));
}

#[test]
fn uniform_sample_fits() {
    let xs = sample_iid(&PowerFunction, 1.0, 10_000, 2024).unwrap();
    let r = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
    assert!(r.p_value > 0.01, "{r:?}");
}

#[test]
fn a_of_sample_is_exponential() {
    for (member, theta) in builtins() {
        let rate = member.b(theta);
        let xs = sample_iid(member.as_ref(), theta, 10_000, 77).unwrap();
        let ys: Vec<f64> = xs.iter().map(|&x| member.a(x)).collect();
        let r = ks_one_sample(&ys, |t| 1.0 - (-rate * t).exp()).unwrap();
        assert!(r.p_value > 0.01, "{}: {r:?}", member.label());
    }
}

#[test]
fn builtins_validate() {
    for (member, _) in builtins() {
        let report = validate_member(member.as_ref(), 64).unwrap();
        let failed: Vec<_> = report.failed().collect();
        assert!(failed.is_empty(), "{}: {failed:?}", member.label());
    }
    assert!(validate_member(&PowerFunction, 2).is_err());
    assert!(validate_member(&PowerFunction, 3).unwrap().passed());
}

/// `A(x) = x` on `(0, 1)`: increasing, so not a member.
#[derive(Debug)]
struct Increasing;

impl Family for Increasing {
    fn name(&self) -> &str {
        "increasing"
    }
    fn support(&self) -> Interval {
        Interval::new(0.0, 1.0)
    }
    fn theta_domain(&self) -> Interval {
        Interval::positive()
    }
    fn a(&self, x: f64) -> f64 {
        x
    }
    fn a_prime(&self, _: f64) -> f64 {
        1.0
    }
    fn b(&self, theta: f64) -> f64 {
        theta
    }
}

#[test]
fn broken_member_fails_monotonicity() {
    let report = validate_member(&Increasing, 32).unwrap();
    assert!(!report.passed());
    assert!(!report.check("a_decreasing").unwrap().passed);
    let mut reg = FamilyRegistry::with_builtins();
    let err = reg.register_member(Arc::new(Increasing)).unwrap_err();
    assert!(matches!(err, Error::Validation { .. }), "{err:?}");
    assert!(!reg.contains("increasing"));
}

/// `A(x) = 1/x - 1` on `(0, 1)` and `B(θ) = θ³ + θ` on `(0, ∞)`, with no
/// closed-form inverses supplied.
#[derive(Debug)]
struct Reciprocal;

impl Family for Reciprocal {
    fn name(&self) -> &str {
        "reciprocal"
    }
    fn support(&self) -> Interval {
        Interval::new(0.0, 1.0)
    }
    fn theta_domain(&self) -> Interval {
        Interval::positive()
    }
    fn a(&self, x: f64) -> f64 {
        1.0 / x - 1.0
    }
    fn a_prime(&self, x: f64) -> f64 {
        -1.0 / (x * x)
    }
    fn b(&self, theta: f64) -> f64 {
        theta * theta * theta + theta
    }
}

#[test]
fn custom_member_uses_numeric_inverses() {
    let m = Reciprocal;
    for y in [1e-6, 0.3, 1.0, 42.0, 1e6] {
        let x = m.a_inv(y).unwrap();
        assert_relative_eq!(x, 1.0 / (1.0 + y), max_relative = 1e-10);
    }
    for theta in [1e-3, 0.5, 2.0, 10.0] {
        assert_relative_eq!(m.b_inv(m.b(theta)).unwrap(), theta, max_relative = 1e-10);
    }
    for p in [0.05, 0.5, 0.95] {
        let x = quantile(&m, 0.8, p).unwrap();
        assert!((cdf(&m, 0.8, x).unwrap() - p).abs() < 1e-9);
    }
    let mut reg = FamilyRegistry::empty();
    let report = reg.register_member(Arc::new(Reciprocal)).unwrap();
    assert!(report.passed());
    assert_eq!(reg.names(), vec!["reciprocal"]);
    let built = reg.build("reciprocal", &MemberParams::default()).unwrap();
    assert_eq!(built.name(), "reciprocal");
}

#[test]
fn registry_builds_builtins_by_name() {
    let reg = FamilyRegistry::default();
    assert_eq!(reg.names(), vec!["frechet", "gumbel", "power"]);
    let p = MemberParams::default();
    assert_eq!(reg.build("power", &p).unwrap().name(), "power");
    assert_eq!(reg.build("gumbel", &p).unwrap().name(), "gumbel");
    assert!(matches!(reg.build("frechet", &p), Err(Error::Argument(_))));
    let fr = reg.build("frechet", &MemberParams { alpha: Some(2.0) }).unwrap();
    assert_eq!(fr.label(), "frechet(alpha=2)");
    assert!(reg.build("frechet", &MemberParams { alpha: Some(-1.0) }).is_err());
    assert!(matches!(reg.build("weibull", &p), Err(Error::UnknownFamily(_))));
}

#[test]
fn members_are_shareable_across_threads() {
    let reg = FamilyRegistry::default();
    let member = reg.build("gumbel", &MemberParams::default()).unwrap();
    let handles: Vec<_> = (0..4)
        .map(|i| {
            let m = Arc::clone(&member);
            std::thread::spawn(move || cdf(m.as_ref(), 0.0, i as f64).unwrap())
        })
        .collect();
    let got: Vec<f64> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    assert!(got.windows(2).all(|w| w[0] < w[1]));
}
