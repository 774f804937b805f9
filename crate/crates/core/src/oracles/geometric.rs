//! Geometric tails and the lower-tail bound for sums of geometric variables.

use rand::Rng;

use super::{proportion, BoundReport, Verdict};
use crate::error::{Error, Result};
use crate::landscape::sample_geometric;

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::precondition(format!(
            "p must lie in (0, 1), got {p}"
        )))
    }
}

/// `P(D >= k) = (1-p)^(k-1)` on support `{1, 2, ...}`.
pub fn geometric_tail(p: f64, k: u64) -> Result<f64> {
    check_p(p)?;
    if k == 0 {
        return Err(Error::precondition("k must be at least 1"));
    }
    Ok((1.0 - p).powf((k - 1) as f64))
}

/// `P(D = k) = p (1-p)^(k-1)`.
pub fn geometric_pmf(p: f64, k: u64) -> Result<f64> {
    Ok(p * geometric_tail(p, k)?)
}

/// `exp(-delta^2 (t+1) / (2 - 4 delta / 3))`, bounding
/// `P(sum_{i=0}^t D_i <= (1 - delta)(t+1)/p)`.
pub fn geometric_sum_lower_tail_bound(t: u64, p: f64, delta: f64) -> Result<f64> {
    check_p(p)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::precondition(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let t1 = t as f64 + 1.0;
    Ok((-delta * delta * t1 / (2.0 - 4.0 * delta / 3.0)).exp())
}

/// Deviation used for RLS: `1/2 - t p / (2(t+1))`.
pub fn rls_delta(t: u64, p: f64) -> f64 {
    let t = t as f64;
    0.5 - t * p / (2.0 * (t + 1.0))
}

/// Deviation used for the (1+1) EA: `1/2 + t p / (2(t+1)) - t p ln n / (2(t+1))`.
pub fn ea_delta(t: u64, p: f64, n: usize) -> f64 {
    let t = t as f64;
    let scale = t * p / (2.0 * (t + 1.0));
    0.5 + scale - scale * (n as f64).ln()
}

/// Simulates `P(sum_{i=0}^t D_i <= (1 - delta)(t+1)/p)`. Passes when the
/// estimate minus two standard errors does not exceed the bound.
pub fn geometric_sum_mc<R: Rng + ?Sized>(
    t: u64,
    p: f64,
    delta: f64,
    trials: u64,
    rng: &mut R,
) -> Result<BoundReport> {
    let bound = geometric_sum_lower_tail_bound(t, p, delta)?;
    if trials == 0 {
        return Err(Error::precondition("need at least one trial"));
    }
    let threshold = (1.0 - delta) * (t as f64 + 1.0) / p;
    let mut hits = 0u64;
    for _ in 0..trials {
        let mut sum = 0u64;
        for _ in 0..=t {
            sum += sample_geometric(p, rng)?;
        }
        if sum as f64 <= threshold {
            hits += 1;
        }
    }
    let (est, se) = proportion(hits, trials);
    Ok(BoundReport {
        name: format!("tails t={t} p={p:.5} delta={delta:.5}"),
        analytic_value: bound,
        mc_estimate: est,
        mc_stderr: se,
        trials,
        verdict: Verdict::from_bool(est - 2.0 * se <= bound),
        note: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::geometric_p_for_variance;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn tail_is_a_survival_function() {
        for &p in &[0.1, 0.35826, 0.5, 0.9] {
            assert_eq!(geometric_tail(p, 1).unwrap(), 1.0);
            let mut mass = 0.0;
            for k in 1..2000 {
                let pmf = geometric_pmf(p, k).unwrap();
                let drop = geometric_tail(p, k).unwrap() - geometric_tail(p, k + 1).unwrap();
                assert!((pmf - drop).abs() < 1e-15);
                mass += pmf;
            }
            assert!((mass - 1.0).abs() < 1e-12, "p={p}: {mass}");
        }
    }

    #[test]
    fn range_checks() {
        assert!(geometric_tail(0.0, 1).is_err());
        assert!(geometric_tail(0.5, 0).is_err());
        assert!(geometric_sum_lower_tail_bound(10, 0.5, 1.0).is_err());
        assert!(geometric_sum_lower_tail_bound(10, 1.5, 0.5).is_err());
    }

    #[test]
    fn rls_delta_gives_the_3t_over_80_rate() {
        let n = 1000f64;
        let t = n.ln().powi(2).round() as u64;
        for &p in &[0.5, 0.3, 0.1] {
            let d = rls_delta(t, p);
            assert!(d >= 0.25);
            let b = geometric_sum_lower_tail_bound(t, p, d).unwrap();
            assert!(b <= (-3.0 * t as f64 / 80.0).exp());
        }
    }

    #[test]
    fn ea_delta_is_at_least_a_quarter() {
        let n = 1000;
        let p = 1.0 / (2.0 * (n as f64).ln());
        for t in [1, 10, 48, 1000] {
            let d = ea_delta(t, p, n);
            assert!(d >= 0.25, "t={t}: {d}");
            let b = geometric_sum_lower_tail_bound(t, p, d).unwrap();
            assert!(b <= (-3.0 * t as f64 / 80.0).exp());
        }
    }

    #[test]
    fn simulated_sum_stays_below_bound() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        let p = geometric_p_for_variance(5.0).unwrap();
        let r = geometric_sum_mc(400, p, rls_delta(400, p), 20_000, &mut rng).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        // a short sum where the event is common enough to estimate
        let r = geometric_sum_mc(5, 0.5, 0.3, 100_000, &mut rng).unwrap();
        assert!(r.mc_estimate > 0.01);
        assert!(r.mc_estimate <= r.analytic_value, "{r:?}");
    }
}
