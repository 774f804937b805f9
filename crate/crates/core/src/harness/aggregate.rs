//! Mean and spread of the report statistic per (algorithm, n).

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::config::Statistic;
use super::records::RunRecord;
use crate::error::{Error, Result};

pub const AGGREGATE_HEADER: [&str; 5] = ["algorithm", "n", "mean_pct", "std_pct", "reps"];

/// One row of the aggregate table. `algorithm` is a series label: a bare
/// algorithm name, or `name:noise` once several sweeps are combined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub algorithm: String,
    pub n: usize,
    pub mean_pct: f64,
    /// Sample standard deviation; 0 for a single repetition.
    pub std_pct: f64,
    pub reps: u64,
}

/// Groups by (algorithm, n) in canonical order. Values are sorted before
/// summing, so the result does not depend on record order.
pub fn aggregate(records: &[RunRecord], statistic: Statistic) -> Result<Vec<AggregateRow>> {
    if records.is_empty() {
        return Err(Error::config("cannot aggregate an empty record set"));
    }
    let mut groups: BTreeMap<_, Vec<f64>> = BTreeMap::new();
    for r in records {
        let ones = match statistic {
            Statistic::MaxOnesSampled => r.max_ones,
            Statistic::FinalOnes => r.final_ones,
        };
        groups
            .entry((r.algorithm, r.n))
            .or_default()
            .push(100.0 * ones as f64 / r.n as f64);
    }
    Ok(groups
        .into_iter()
        .map(|((algorithm, n), mut v)| {
            v.sort_by(f64::total_cmp);
            let k = v.len() as f64;
            let mean = v.iter().sum::<f64>() / k;
            let std = if v.len() > 1 {
                (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
            } else {
                0.0
            };
            AggregateRow {
                algorithm: algorithm.name().to_string(),
                n,
                mean_pct: mean,
                std_pct: std,
                reps: v.len() as u64,
            }
        })
        .collect())
}

pub fn write_aggregate_csv<W: Write>(rows: &[AggregateRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(AGGREGATE_HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an aggregate table; missing columns or an empty table are schema errors.
pub fn read_aggregate_csv<R: Read>(input: R) -> Result<Vec<AggregateRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    let missing: Vec<&str> = AGGREGATE_HEADER
        .iter()
        .copied()
        .filter(|c| !headers.iter().any(|h| h == *c))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Schema(format!(
            "aggregate CSV lacks columns: {}",
            missing.join(", ")
        )));
    }
    let rows: Vec<AggregateRow> = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
    if rows.is_empty() {
        return Err(Error::Schema("aggregate CSV has no rows".into()));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::Algorithm;
    use proptest::prelude::*;

    fn rec(algorithm: Algorithm, n: usize, rep: u64, max_ones: usize) -> RunRecord {
        RunRecord {
            algorithm,
            n,
            rep,
            run_seed: rep,
            landscape_seed: rep,
            budget: 1,
            iterations: 1,
            transitions: 0,
            max_ones,
            final_ones: max_ones / 2,
            wall_ms: 0,
        }
    }

    #[test]
    fn single_record() {
        let rows = aggregate(
            &[rec(Algorithm::Rls, 100, 0, 60)],
            Statistic::MaxOnesSampled,
        )
        .unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].mean_pct, 60.0);
        assert_eq!(rows[0].std_pct, 0.0);
        let rows = aggregate(&[rec(Algorithm::Rls, 100, 0, 60)], Statistic::FinalOnes).unwrap();
        assert_eq!(rows[0].mean_pct, 30.0);
    }

    #[test]
    fn mean_and_sample_std() {
        let recs = [
            rec(Algorithm::Ea, 10, 0, 4),
            rec(Algorithm::Ea, 10, 1, 6),
            rec(Algorithm::Rs, 10, 0, 7),
        ];
        let rows = aggregate(&recs, Statistic::MaxOnesSampled).unwrap();
        assert_eq!(rows[0].algorithm, "ea");
        assert!((rows[0].mean_pct - 50.0).abs() < 1e-12);
        assert!((rows[0].std_pct - 200f64.sqrt()).abs() < 1e-12);
        assert_eq!(rows[1].reps, 1);
    }

    #[test]
    fn empty_is_error() {
        assert!(aggregate(&[], Statistic::MaxOnesSampled).is_err());
        assert!(matches!(
            read_aggregate_csv("algorithm,n,mean_pct,std_pct,reps\n".as_bytes()),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            read_aggregate_csv("".as_bytes()),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            read_aggregate_csv("algorithm,n\nrls,10\n".as_bytes()),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let recs = [rec(Algorithm::Ea, 10, 0, 3), rec(Algorithm::Ea, 10, 1, 7)];
        let rows = aggregate(&recs, Statistic::MaxOnesSampled).unwrap();
        let mut buf = Vec::new();
        write_aggregate_csv(&rows, &mut buf).unwrap();
        assert!(buf.starts_with(b"algorithm,n,mean_pct,std_pct,reps\n"));
        assert_eq!(read_aggregate_csv(buf.as_slice()).unwrap(), rows);
    }

    proptest! {
        #[test]
        fn permutation_invariant(
            ones in prop::collection::vec(0usize..=50, 1..40),
            seed in any::<u64>(),
        ) {
            let recs: Vec<RunRecord> = ones
                .iter()
                .enumerate()
                .map(|(i, &m)| rec(Algorithm::ALL[i % 4], 50, i as u64, m))
                .collect();
            let mut shuffled = recs.clone();
            // deterministic Fisher-Yates from the proptest seed
            let mut s = seed;
            for i in (1..shuffled.len()).rev() {
                s = crate::seed::mix64(s);
                shuffled.swap(i, (s % (i as u64 + 1)) as usize);
            }
            let a = aggregate(&recs, Statistic::MaxOnesSampled).unwrap();
            let b = aggregate(&shuffled, Statistic::MaxOnesSampled).unwrap();
            prop_assert_eq!(&a, &b);
            for row in &a {
                prop_assert!((0.0..=100.0).contains(&row.mean_pct));
            }
        }
    }
}
