//! Probability that a shifted Gaussian undercuts the minimum of `n` standard ones.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{proportion, BoundReport, Verdict};
use crate::error::{Error, Result};

/// `(1/(n+1)) (1 - c (1 + sqrt(2 ln(n+1)) + sqrt(2 ln(1/c)) + c/2))`.
///
/// At `c = 0` this is the limit `1/(n+1)`. Negative values are returned
/// unchanged. Above `c = 1` the `ln(1/c)` root is undefined.
pub fn min_gaussian_lower_bound(n: u64, c: f64) -> Result<f64> {
    if n == 0 || !(0.0..=1.0).contains(&c) {
        return Err(Error::precondition(format!(
            "need n >= 1 and 0 <= c <= 1, got n={n}, c={c}"
        )));
    }
    let base = 1.0 / (n as f64 + 1.0);
    if c == 0.0 {
        return Ok(base);
    }
    let spread =
        1.0 + (2.0 * (n as f64 + 1.0).ln()).sqrt() + (2.0 * (1.0 / c).ln()).sqrt() + c / 2.0;
    Ok(base * (1.0 - c * spread))
}

/// Direct simulation of `P(Y_c < min_i Z_i)` with `Y_c ~ N(c, 1)`.
///
/// For `c > 0` the check passes when the estimate minus two standard errors
/// stays above the closed form. At `c = 0` the closed form is exact and the
/// estimate must lie within three standard errors of it.
pub fn min_gaussian_mc<R: Rng + ?Sized>(
    n: u64,
    c: f64,
    trials: u64,
    rng: &mut R,
) -> Result<BoundReport> {
    if trials < 10_000 {
        return Err(Error::precondition(format!(
            "need at least 10^4 trials, got {trials}"
        )));
    }
    let bound = min_gaussian_lower_bound(n, c)?;
    let mut hits = 0u64;
    for _ in 0..trials {
        let y = c + rng.sample::<f64, _>(StandardNormal);
        // stop at the first Z that is not above Y
        if (0..n).all(|_| rng.sample::<f64, _>(StandardNormal) > y) {
            hits += 1;
        }
    }
    let (est, se) = proportion(hits, trials);
    let ok = if c == 0.0 {
        (est - bound).abs() <= 3.0 * se
    } else {
        est - 2.0 * se >= bound
    };
    Ok(BoundReport {
        name: format!("gaussmin n={n} c={c}"),
        analytic_value: bound,
        mc_estimate: est,
        mc_stderr: se,
        trials,
        verdict: Verdict::from_bool(ok),
        note: None,
    })
}
