//! Lower record values: extraction from observed sequences, direct
//! simulation, and their densities.
//!
//! An observation is a lower record when it is strictly smaller than every
//! observation before it; ties never create a record. The first
//! observation is always a record.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{check_theta, check_x, seeded_rng, std_exponential, Family};
use crate::numerics::special::ln_gamma;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordSequence {
    values: Vec<f64>,
    times: Vec<usize>,
    source_n: Option<usize>,
    synthetic_times: bool,
}

impl RecordSequence {
    /// Builds a sequence with observed record times, checking that values
    /// strictly decrease, times strictly increase from 1, and `m <= n`
    /// when the source size is known.
    pub fn new(values: Vec<f64>, times: Vec<usize>, source_n: Option<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("a record sequence needs at least one value".into()));
        }
        if values.len() != times.len() {
            return Err(Error::Argument(format!(
                "{} values but {} record times",
                values.len(),
                times.len()
            )));
        }
        if times[0] != 1 {
            return Err(Error::Argument(format!("first record time is {}, not 1", times[0])));
        }
        if let Some(w) = times.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Argument(format!(
                "record times must strictly increase ({} then {})",
                w[0], w[1]
            )));
        }
        check_decreasing(&values)?;
        if let Some(n) = source_n {
            let last = *times.last().expect("non-empty");
            if last > n {
                return Err(Error::Argument(format!(
                    "record time {last} exceeds source size {n}"
                )));
            }
        }
        Ok(Self {
            values,
            times,
            source_n,
            synthetic_times: false,
        })
    }

    /// A sequence whose times are placeholders `1..=m`; operations that need
    /// real inter-record times reject it.
    pub fn synthetic(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("a record sequence needs at least one value".into()));
        }
        check_decreasing(&values)?;
        let times = (1..=values.len()).collect();
        Ok(Self {
            values,
            times,
            source_n: None,
            synthetic_times: true,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Record times, if they were observed.
    pub fn times(&self) -> Result<&[usize]> {
        if self.synthetic_times {
            Err(Error::SyntheticTimes)
        } else {
            Ok(&self.times)
        }
    }

    /// Record times including placeholders for simulated sequences.
    pub fn raw_times(&self) -> &[usize] {
        &self.times
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn source_n(&self) -> Option<usize> {
        self.source_n
    }

    pub fn has_synthetic_times(&self) -> bool {
        self.synthetic_times
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("non-empty")
    }
}

fn check_decreasing(values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Argument(format!("record value {v} is not finite")));
    }
    match values.windows(2).position(|w| w[0] <= w[1]) {
        Some(i) => Err(Error::Argument(format!(
            "record values must strictly decrease (position {}: {} then {})",
            i + 1,
            values[i],
            values[i + 1]
        ))),
        None => Ok(()),
    }
}

/// Elements strictly smaller than everything before them, with 1-based
/// indices.
pub fn extract_lower_records(sequence: &[f64]) -> Result<RecordSequence> {
    let first = *sequence
        .first()
        .ok_or_else(|| Error::Argument("cannot extract records from an empty sequence".into()))?;
    let mut values = vec![first];
    let mut times = vec![1];
    let mut current = first;
    for (i, &x) in sequence.iter().enumerate().skip(1) {
        if x < current {
            current = x;
            values.push(x);
            times.push(i + 1);
        }
    }
    RecordSequence::new(values, times, Some(sequence.len()))
}

/// Simulates the first `m` lower records directly.
///
/// `A(R'_i)` is the i-th partial sum of i.i.d. exponentials with rate
/// `B(θ)`, so each record is `A⁻¹` of a running sum. Times are synthetic.
pub fn simulate_lower_records(
    member: &dyn Family,
    theta: f64,
    m: usize,
    seed: u64,
) -> Result<RecordSequence> {
    simulate_lower_records_with(member, theta, m, &mut seeded_rng(seed))
}

pub fn simulate_lower_records_with<R: Rng + ?Sized>(
    member: &dyn Family,
    theta: f64,
    m: usize,
    rng: &mut R,
) -> Result<RecordSequence> {
    check_theta(member, theta)?;
    if m == 0 {
        return Err(Error::Argument("number of records must be at least 1".into()));
    }
    let rate = member.b(theta);
    let mut values = Vec::with_capacity(m);
    let mut partial = 0.0;
    while values.len() < m {
        let step = std_exponential(rng) / rate;
        let candidate = partial + step;
        let x = member.a_inv(candidate)?;
        // Increments too small to move the record in floating point, or a
        // first record that rounds onto the upper end, are redrawn.
        let accept = member.support().contains(x) && values.last().is_none_or(|&prev| x < prev);
        if accept {
            partial = candidate;
            values.push(x);
        }
    }
    RecordSequence::synthetic(values)
}

/// `m ln B(θ) + Σ ln(-A'(r_i)) - B(θ) A(r_m)`.
pub fn record_joint_logdensity(member: &dyn Family, theta: f64, rec: &RecordSequence) -> Result<f64> {
    check_theta(member, theta)?;
    for &r in rec.values() {
        check_x(member, r)?;
    }
    let b = member.b(theta);
    let jac: f64 = rec.values().iter().map(|&r| (-member.a_prime(r)).ln()).sum();
    Ok(rec.m() as f64 * b.ln() + jac - b * member.a(rec.last()))
}

/// Log-density of the m-th lower record:
/// `ln(-A'(r)) + m ln B + (m-1) ln A(r) - B A(r) - ln Γ(m)`.
pub fn last_record_logdensity(member: &dyn Family, theta: f64, m: usize, r: f64) -> Result<f64> {
    check_theta(member, theta)?;
    check_x(member, r)?;
    if m == 0 {
        return Err(Error::Argument("record index must be at least 1".into()));
    }
    let b = member.b(theta);
    let a = member.a(r);
    let mf = m as f64;
    let power_term = if m == 1 { 0.0 } else { (mf - 1.0) * a.ln() };
    Ok((-member.a_prime(r)).ln() + mf * b.ln() + power_term - b * a - ln_gamma(mf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{pdf, Frechet, Gumbel, PowerFunction};
    use crate::montecarlo::ks::{ks_gamma_gof, ks_one_sample};
    use crate::numerics::quadrature::{integrate, QuadOptions};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn brute_force_records(seq: &[f64]) -> (Vec<f64>, Vec<usize>) {
        let mut values = Vec::new();
        let mut times = Vec::new();
        for (i, &x) in seq.iter().enumerate() {
            if seq[..i].iter().all(|&p| x < p) {
                values.push(x);
                times.push(i + 1);
            }
        }
        (values, times)
    }

    #[test]
    fn extraction_examples() {
        let r = extract_lower_records(&[5.0, 3.0, 4.0, 2.0, 2.0, 1.0]).unwrap();
        assert_eq!(r.values(), &[5.0, 3.0, 2.0, 1.0]);
        assert_eq!(r.times().unwrap(), &[1, 2, 4, 6]);
        assert_eq!(r.source_n(), Some(6));

        let r = extract_lower_records(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.values(), &[1.0]);
        assert_eq!(r.times().unwrap(), &[1]);

        let r = extract_lower_records(&[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(r.values(), &[3.0, 2.0, 1.0]);
        assert_eq!(r.times().unwrap(), &[1, 2, 3]);
    }

    #[test]
    fn extraction_rejects_empty() {
        assert!(matches!(extract_lower_records(&[]), Err(Error::Argument(_))));
    }

    #[test]
    fn extraction_matches_quadratic_rescan() {
        let mut rng = seeded_rng(11);
        for _ in 0..1000 {
            let n = rng.random_range(1..60);
            let seq: Vec<f64> = (0..n).map(|_| rng.random_range(0..20) as f64).collect();
            let got = extract_lower_records(&seq).unwrap();
            let (values, times) = brute_force_records(&seq);
            assert_eq!(got.values(), values.as_slice());
            assert_eq!(got.times().unwrap(), times.as_slice());
        }
    }

    proptest! {
        #[test]
        fn extraction_is_idempotent(seq in prop::collection::vec(-1e6f64..1e6, 1..200)) {
            let rec = extract_lower_records(&seq).unwrap();
            let again = extract_lower_records(rec.values()).unwrap();
            prop_assert_eq!(again.values(), rec.values());
            let expected: Vec<usize> = (1..=rec.m()).collect();
            prop_assert_eq!(again.times().unwrap(), expected.as_slice());
        }
    }

    #[test]
    fn constructor_rejects_broken_invariants() {
        assert!(RecordSequence::new(vec![2.0, 2.0], vec![1, 2], None).is_err());
        assert!(RecordSequence::new(vec![2.0, 1.0], vec![2, 3], None).is_err());
        assert!(RecordSequence::new(vec![2.0, 1.0], vec![1, 1], None).is_err());
        assert!(RecordSequence::new(vec![2.0, 1.0], vec![1, 5], Some(4)).is_err());
        assert!(RecordSequence::new(vec![2.0], vec![1, 2], None).is_err());
    }

    #[test]
    fn simulated_times_are_flagged() {
        let rec = simulate_lower_records(&PowerFunction, 1.0, 3, 5).unwrap();
        assert!(rec.has_synthetic_times());
        assert_eq!(rec.source_n(), None);
        assert!(matches!(rec.times(), Err(Error::SyntheticTimes)));
        assert_eq!(rec.raw_times(), &[1, 2, 3]);
    }

    #[test]
    fn simulated_a_values_increase() {
        let members: [&dyn Family; 3] = [&PowerFunction, &Gumbel, &Frechet::new(2.0).unwrap()];
        for member in members {
            for seed in 0..50 {
                let rec = simulate_lower_records(member, 1.0, 3, seed).unwrap();
                let a: Vec<f64> = rec.values().iter().map(|&x| member.a(x)).collect();
                assert!(a.windows(2).all(|w| w[0] < w[1]), "{a:?}");
            }
        }
    }

    #[test]
    fn simulation_rejects_zero_records() {
        assert!(matches!(
            simulate_lower_records(&PowerFunction, 1.0, 0, 1),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn first_record_of_uniform_is_uniform() {
        let mut rng = seeded_rng(2024);
        let first: Vec<f64> = (0..10_000)
            .map(|_| simulate_lower_records_with(&PowerFunction, 1.0, 1, &mut rng).unwrap().last())
            .collect();
        let ks = ks_one_sample(&first, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(ks.p_value > 0.01, "{ks:?}");
    }

    #[test]
    fn fifth_record_statistic_is_gamma() {
        let mut rng = seeded_rng(77);
        let t: Vec<f64> = (0..10_000)
            .map(|_| {
                let rec = simulate_lower_records_with(&PowerFunction, 2.0, 5, &mut rng).unwrap();
                PowerFunction.a(rec.last())
            })
            .collect();
        let ks = ks_gamma_gof(&t, 5, 2.0).unwrap();
        assert!(ks.p_value > 0.01, "{ks:?}");
    }

    #[test]
    fn joint_logdensity_examples() {
        let single = RecordSequence::synthetic(vec![(-1.0f64).exp()]).unwrap();
        let v = record_joint_logdensity(&PowerFunction, 1.0, &single).unwrap();
        assert!(v.abs() < 1e-14, "{v}");

        let two = RecordSequence::synthetic(vec![0.5, 0.25]).unwrap();
        let v = record_joint_logdensity(&PowerFunction, 2.0, &two).unwrap();
        assert_relative_eq!(v, 2f64.ln(), max_relative = 1e-13);

        let g = RecordSequence::synthetic(vec![1.0, -0.5, -2.0]).unwrap();
        assert!(record_joint_logdensity(&Gumbel, 0.3, &g).unwrap().is_finite());
    }

    #[test]
    fn joint_logdensity_checks_support() {
        let rec = RecordSequence::synthetic(vec![1.5, 0.5]).unwrap();
        assert!(matches!(
            record_joint_logdensity(&PowerFunction, 1.0, &rec),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn last_record_logdensity_examples() {
        for &r in &[0.1, 0.5, 0.9] {
            let l = last_record_logdensity(&PowerFunction, 1.7, 1, r).unwrap();
            assert_relative_eq!(l.exp(), pdf(&PowerFunction, 1.7, r).unwrap(), max_relative = 1e-13);
        }
        let l = last_record_logdensity(&PowerFunction, 1.0, 2, (-1.0f64).exp()).unwrap();
        assert!(l.abs() < 1e-14, "{l}");
        assert!(matches!(
            last_record_logdensity(&PowerFunction, 1.0, 2, 1.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn last_record_density_integrates_to_one() {
        let opts = QuadOptions::default();
        for m in [2usize, 5, 10] {
            let power = integrate(
                |x| last_record_logdensity(&PowerFunction, 1.3, m, x).map_or(0.0, f64::exp),
                0.0,
                1.0,
                opts,
            )
            .unwrap();
            assert!((power.value - 1.0).abs() < 1e-6, "power m={m}: {}", power.value);

            // Gumbel on the real line: substitute x = ln(u / (1 - u)).
            let gumbel = integrate(
                |u: f64| {
                    let x = (u / (1.0 - u)).ln();
                    let jac = 1.0 / (u * (1.0 - u));
                    last_record_logdensity(&Gumbel, 0.4, m, x).map_or(0.0, |l| l.exp() * jac)
                },
                0.0,
                1.0,
                opts,
            )
            .unwrap();
            assert!((gumbel.value - 1.0).abs() < 1e-6, "gumbel m={m}: {}", gumbel.value);
        }
    }
}
