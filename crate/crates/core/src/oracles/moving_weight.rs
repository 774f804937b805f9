//! The moving-weight inequality over `M_eps` and the duplicate-sample bound
//! built on it.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{proportion, BoundReport, Verdict};
use crate::error::{Error, Result};
use crate::landscape::BitString;

const LOWER: f64 = 0.25;
// Slack for float round-off in membership tests.
const MEMBERSHIP_TOL: f64 = 1e-9;

/// A marginal vector in `M_eps = { p in [0.25, 1]^n : sum p_i <= n(1 - eps) }`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalPoint {
    p: Vec<f64>,
    epsilon: f64,
}

impl MarginalPoint {
    pub fn new(p: Vec<f64>, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::precondition(format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        if p.is_empty() {
            return Err(Error::precondition("marginal vector is empty"));
        }
        if let Some((i, v)) = p
            .iter()
            .enumerate()
            .find(|(_, &v)| !(LOWER - MEMBERSHIP_TOL..=1.0 + MEMBERSHIP_TOL).contains(&v))
        {
            return Err(Error::precondition(format!(
                "p[{i}] = {v} is outside [0.25, 1]"
            )));
        }
        let cap = sum_cap(p.len(), epsilon);
        let sum: f64 = p.iter().sum();
        if sum > cap + MEMBERSHIP_TOL {
            return Err(Error::precondition(format!(
                "marginal sum {sum} exceeds n(1 - eps) = {cap}"
            )));
        }
        Ok(MarginalPoint { p, epsilon })
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

fn sum_cap(n: usize, epsilon: f64) -> f64 {
    n as f64 * (1.0 - epsilon)
}

fn same_len(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() == q.len() {
        Ok(())
    } else {
        Err(Error::precondition(format!(
            "length mismatch: {} vs {}",
            p.len(),
            q.len()
        )))
    }
}

/// `sum_i (2 p_i q_i - p_i - q_i)` with no membership check.
pub fn moving_weight_raw(p: &[f64], q: &[f64]) -> Result<f64> {
    same_len(p, q)?;
    Ok(p.iter().zip(q).map(|(&a, &b)| 2.0 * a * b - a - b).sum())
}

pub fn moving_weight_value(p: &MarginalPoint, q: &MarginalPoint) -> Result<f64> {
    moving_weight_raw(&p.p, &q.p)
}

/// The claimed upper bound `-n eps / 2`.
pub fn moving_weight_cap(n: usize, epsilon: f64) -> f64 {
    -(n as f64) * epsilon / 2.0
}

/// `P(x = y) = prod_i (p_i q_i + (1 - p_i)(1 - q_i))` for independent samples.
pub fn exact_collision_probability(p: &[f64], q: &[f64]) -> Result<f64> {
    same_len(p, q)?;
    Ok(p.iter()
        .zip(q)
        .map(|(&a, &b)| a * b + (1.0 - a) * (1.0 - b))
        .product())
}

/// `exp(moving_weight_value(p, q))`, an upper bound on the exact collision probability.
pub fn collision_probability_bound(p: &MarginalPoint, q: &MarginalPoint) -> Result<f64> {
    Ok(moving_weight_value(p, q)?.exp())
}

/// A random member of `M_eps`. Mixes interior points, points pushed onto the
/// sum constraint, and vertices, so the sample reaches near the maximizers.
pub fn sample_in_m_eps<R: Rng + ?Sized>(
    n: usize,
    epsilon: f64,
    rng: &mut R,
) -> Result<MarginalPoint> {
    if n == 0 || !(epsilon > 0.0 && epsilon <= 0.75) {
        return Err(Error::precondition(format!(
            "sampling M_eps needs n >= 1 and eps in (0, 0.75], got n={n}, eps={epsilon}"
        )));
    }
    let cap = sum_cap(n, epsilon);
    let mut p: Vec<f64> = match rng.random_range(0..3) {
        0 => (0..n).map(|_| rng.random_range(LOWER..=1.0)).collect(),
        1 => (0..n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { LOWER })
            .collect(),
        _ => random_vertex(n, cap, rng),
    };
    let sum: f64 = p.iter().sum();
    if sum > cap {
        let floor = LOWER * n as f64;
        let scale = (cap - floor) / (sum - floor);
        for v in &mut p {
            *v = LOWER + (*v - LOWER) * scale;
        }
    }
    MarginalPoint::new(p, epsilon)
}

// Fill positions in random order with 1 while the budget allows, then one
// fractional value, then 0.25.
fn random_vertex<R: Rng + ?Sized>(n: usize, cap: f64, rng: &mut R) -> Vec<f64> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut p = vec![LOWER; n];
    let mut slack = cap - LOWER * n as f64;
    for i in order {
        let raise = slack.min(1.0 - LOWER);
        if raise <= 0.0 {
            break;
        }
        p[i] += raise;
        slack -= raise;
    }
    p
}

// Vertices of M_eps up to permutation, each sorted descending: k entries at
// 0.25 with the rest at 1, or the same with one entry set so the sum hits the cap.
fn vertex_types(n: usize, epsilon: f64) -> Vec<Vec<f64>> {
    let cap = sum_cap(n, epsilon);
    let mut out = Vec::new();
    for k in 0..=n {
        let ones = n - k;
        if LOWER * k as f64 + ones as f64 <= cap + MEMBERSHIP_TOL {
            let mut v = vec![1.0; ones];
            v.resize(n, LOWER);
            out.push(v);
        }
        if ones >= 1 {
            let frac = cap - LOWER * k as f64 - (ones - 1) as f64;
            if frac > LOWER && frac < 1.0 {
                let mut v = vec![1.0; ones - 1];
                v.push(frac);
                v.resize(n, LOWER);
                out.push(v);
            }
        }
    }
    out
}

/// Exact maximum of the moving weight over `M_eps x M_eps`, with a maximizing pair.
///
/// The objective is bilinear, so the maximum sits at a pair of vertices; for
/// fixed vertex types the best pairing aligns both vectors in sorted order.
pub fn border_family_max(n: usize, epsilon: f64) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    if n == 0 || !(epsilon > 0.0 && epsilon <= 0.75) {
        return Err(Error::precondition(format!(
            "M_eps is empty or degenerate for n={n}, eps={epsilon}"
        )));
    }
    let types = vertex_types(n, epsilon);
    let mut best = (f64::NEG_INFINITY, Vec::new(), Vec::new());
    for p in &types {
        for q in &types {
            let v = moving_weight_raw(p, q)?;
            if v > best.0 {
                best = (v, p.clone(), q.clone());
            }
        }
    }
    Ok(best)
}

/// Samples `samples` pairs from `M_eps` and counts violations of the cap.
/// Passes when there are none and no sample beats the exact maximizer.
pub fn lemma1_check<R: Rng + ?Sized>(
    n: usize,
    epsilon: f64,
    samples: u64,
    rng: &mut R,
) -> Result<BoundReport> {
    let cap = moving_weight_cap(n, epsilon);
    let (exact_max, _, _) = border_family_max(n, epsilon)?;
    let mut violations = 0u64;
    let mut sampled_max = f64::NEG_INFINITY;
    for _ in 0..samples {
        let p = sample_in_m_eps(n, epsilon, rng)?;
        let q = if rng.random_range(0..4) == 0 {
            p.clone()
        } else {
            sample_in_m_eps(n, epsilon, rng)?
        };
        let v = moving_weight_value(&p, &q)?;
        if v > cap {
            violations += 1;
        }
        sampled_max = sampled_max.max(v);
    }
    let ok = violations == 0 && sampled_max <= exact_max + 1e-9 && exact_max <= cap + 1e-9;
    Ok(BoundReport {
        name: format!("lemma1 n={n} eps={epsilon}"),
        analytic_value: cap,
        mc_estimate: sampled_max,
        mc_stderr: 0.0,
        trials: samples,
        verdict: Verdict::from_bool(ok),
        note: Some(format!("violations={violations} exact_max={exact_max}")),
    })
}

/// Checks `exp(moving weight) >= P(x = y)` on `pairs` random pairs from `M_eps`.
/// The report carries the largest ratio exact / bound seen.
pub fn collision_bound_check<R: Rng + ?Sized>(
    n: usize,
    epsilon: f64,
    pairs: u64,
    rng: &mut R,
) -> Result<BoundReport> {
    if pairs == 0 {
        return Err(Error::precondition("need at least one pair"));
    }
    let mut violations = 0u64;
    let mut worst_ratio = 0.0f64;
    for _ in 0..pairs {
        let p = sample_in_m_eps(n, epsilon, rng)?;
        let q = sample_in_m_eps(n, epsilon, rng)?;
        let exact = exact_collision_probability(p.p(), q.p())?;
        let bound = collision_probability_bound(&p, &q)?;
        if exact > bound * (1.0 + 1e-12) {
            violations += 1;
        }
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(exact / bound);
        }
    }
    Ok(BoundReport {
        name: format!("collision-bound n={n} eps={epsilon}"),
        analytic_value: 1.0,
        mc_estimate: worst_ratio,
        mc_stderr: 0.0,
        trials: pairs,
        verdict: Verdict::from_bool(violations == 0),
        note: Some(format!("violations={violations}")),
    })
}

/// Draws `trials` multisets of `multiset_size` strings, the `i`-th string from
/// `family[i % family.len()]`, and reports how often a multiset holds a
/// duplicate against the union bound `C(S, 2) exp(-n eps / 2)`.
pub fn duplicate_mc<R: Rng + ?Sized>(
    family: &[Vec<f64>],
    epsilon: f64,
    multiset_size: usize,
    trials: u64,
    rng: &mut R,
) -> Result<BoundReport> {
    if family.is_empty() || trials == 0 {
        return Err(Error::precondition(
            "duplicate test needs a family and at least one trial",
        ));
    }
    let points = family
        .iter()
        .map(|p| MarginalPoint::new(p.clone(), epsilon))
        .collect::<Result<Vec<_>>>()?;
    let n = points[0].len();
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::precondition("family members differ in length"));
    }
    let mut with_duplicate = 0u64;
    let mut seen = HashSet::with_capacity(multiset_size);
    for _ in 0..trials {
        seen.clear();
        for i in 0..multiset_size {
            let x = BitString::sample_from_marginals(points[i % points.len()].p(), rng);
            if !seen.insert(x) {
                with_duplicate += 1;
                break;
            }
        }
    }
    let s = multiset_size as f64;
    let pairs = s * (s - 1.0) / 2.0;
    let union_bound = (pairs * moving_weight_cap(n, epsilon).exp()).min(1.0);
    let (est, se) = proportion(with_duplicate, trials);
    Ok(BoundReport {
        name: format!("collision n={n} eps={epsilon} S={multiset_size}"),
        analytic_value: union_bound,
        mc_estimate: est,
        mc_stderr: se,
        trials,
        verdict: Verdict::from_bool(est - 2.0 * se <= union_bound),
        note: Some(format!("multisets_with_duplicate={with_duplicate}")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn rng(seed: u64) -> Xoshiro256PlusPlus {
        Xoshiro256PlusPlus::seed_from_u64(seed)
    }

    #[test]
    fn quarter_vector_example() {
        let p = MarginalPoint::new(vec![0.25; 4], 0.5).unwrap();
        assert!((moving_weight_value(&p, &p).unwrap() + 1.5).abs() < 1e-15);
    }

    #[test]
    fn membership_is_enforced() {
        assert!(MarginalPoint::new(vec![0.2, 0.5], 0.5).is_err());
        assert!(MarginalPoint::new(vec![1.0, 1.0], 0.1).is_err());
        assert!(MarginalPoint::new(vec![0.5, 0.5], 0.0).is_err());
        assert!(MarginalPoint::new(vec![], 0.5).is_err());
        assert!(MarginalPoint::new(vec![0.5, 0.5], 0.5).is_ok());
        let p = MarginalPoint::new(vec![0.5; 3], 0.5).unwrap();
        let q = MarginalPoint::new(vec![0.5; 2], 0.5).unwrap();
        assert!(moving_weight_value(&p, &q).is_err());
    }

    #[test]
    fn all_ones_collides_surely() {
        let ones = vec![1.0; 8];
        assert_eq!(exact_collision_probability(&ones, &ones).unwrap(), 1.0);
        assert_eq!(moving_weight_raw(&ones, &ones).unwrap().exp(), 1.0);
    }

    #[test]
    fn half_vector_bound_chain() {
        // sum 4 = n(1 - eps) at eps = 0.5, the tightest eps this point satisfies
        let half = MarginalPoint::new(vec![0.5; 8], 0.5).unwrap();
        let exact = exact_collision_probability(half.p(), half.p()).unwrap();
        let bound = collision_probability_bound(&half, &half).unwrap();
        let cap = moving_weight_cap(8, 0.5).exp();
        assert!((exact - 0.5f64.powi(8)).abs() < 1e-15);
        assert!((bound - (-4f64).exp()).abs() < 1e-15);
        assert!((cap - (-2f64).exp()).abs() < 1e-15);
        assert!(exact <= bound && bound <= cap);
    }

    #[test]
    fn bound_dominates_exact_product() {
        let mut r = rng(1);
        for _ in 0..10_000 {
            let p = sample_in_m_eps(12, 0.3, &mut r).unwrap();
            let q = sample_in_m_eps(12, 0.3, &mut r).unwrap();
            let exact = exact_collision_probability(p.p(), q.p()).unwrap();
            assert!(collision_probability_bound(&p, &q).unwrap() >= exact);
        }
    }

    #[test]
    fn samples_are_members() {
        let mut r = rng(2);
        for &eps in &[0.1, 0.25, 0.5, 0.75] {
            for _ in 0..2000 {
                let p = sample_in_m_eps(16, eps, &mut r).unwrap();
                assert!(p.p().iter().sum::<f64>() <= 16.0 * (1.0 - eps) + 1e-9);
            }
        }
        assert!(sample_in_m_eps(4, 0.9, &mut r).is_err());
    }

    #[test]
    fn sampled_pairs_respect_cap_at_n10() {
        let mut r = rng(3);
        for _ in 0..20_000 {
            let p = sample_in_m_eps(10, 0.3, &mut r).unwrap();
            let q = sample_in_m_eps(10, 0.3, &mut r).unwrap();
            assert!(moving_weight_value(&p, &q).unwrap() <= -1.5);
        }
    }

    // Every vertex of M_eps at small n, with positions, for a brute-force
    // maximum over all vertex pairs.
    fn all_vertices(n: usize, eps: f64) -> Vec<Vec<f64>> {
        let cap = n as f64 * (1.0 - eps);
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            let v: Vec<f64> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { 1.0 } else { 0.25 })
                .collect();
            if v.iter().sum::<f64>() <= cap + 1e-12 {
                out.push(v.clone());
            }
            for free in 0..n {
                let mut w = v.clone();
                w[free] = 0.0;
                let frac = cap - w.iter().sum::<f64>();
                if frac > 0.25 && frac < 1.0 && mask >> free & 1 == 0 {
                    w[free] = frac;
                    out.push(w);
                }
            }
        }
        out
    }

    #[test]
    fn border_family_matches_brute_force_vertex_pairs() {
        for &eps in &[0.1, 0.25, 0.5] {
            let vs = all_vertices(8, eps);
            let mut brute = f64::NEG_INFINITY;
            for p in &vs {
                for q in &vs {
                    let v: f64 = p.iter().zip(q).map(|(a, b)| 2.0 * a * b - a - b).sum();
                    brute = brute.max(v);
                }
            }
            let (fast, p, q) = border_family_max(8, eps).unwrap();
            assert!((fast - brute).abs() < 1e-12, "eps {eps}: {fast} vs {brute}");
            assert!((moving_weight_raw(&p, &q).unwrap() - fast).abs() < 1e-12);
            assert!(fast <= moving_weight_cap(8, eps));
        }
    }

    #[test]
    fn border_max_examples() {
        // n = 8, eps = 0.25: three entries at 0.25 and five at 1 give -1.125
        let (v, p, _) = border_family_max(8, 0.25).unwrap();
        assert!((v + 1.125).abs() < 1e-12, "{v}");
        assert_eq!(p.iter().filter(|&&x| x == 0.25).count(), 3);
    }

    #[test]
    fn lemma1_report_passes() {
        let r = lemma1_check(8, 0.25, 100_000, &mut rng(4)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!(r.mc_estimate <= -1.0);
    }

    #[test]
    fn pigeonhole_forces_duplicates() {
        let r = duplicate_mc(&[vec![0.5; 4]], 0.25, 100, 20, &mut rng(5)).unwrap();
        assert_eq!(r.mc_estimate, 1.0);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn outside_family_is_rejected() {
        assert!(duplicate_mc(&[vec![1.0; 8]], 0.25, 10, 1, &mut rng(6)).is_err());
    }

    #[test]
    fn worst_vertex_rarely_duplicates() {
        let (_, p, q) = border_family_max(128, 0.25).unwrap();
        let r = duplicate_mc(&[p, q], 0.25, 1000, 20, &mut rng(7)).unwrap();
        assert_eq!(r.mc_estimate, 0.0);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn collision_bound_check_passes() {
        let r = collision_bound_check(16, 0.25, 2_000, &mut rng(40)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!(r.mc_estimate > 0.0 && r.mc_estimate <= 1.0);
    }
}
