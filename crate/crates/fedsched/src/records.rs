//! Per-round run records and their CSV persistence.

use std::fs;
use std::path::Path;

use crate::error::{Result, SimError};

/// Everything the simulator logs about one global round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// Global round index k.
    pub round: usize,
    /// Scheduled user ids, including any that were later dropped.
    pub scheduled: Vec<usize>,
    /// Users dropped for infeasible energy; a subset of `scheduled`.
    pub dropped: Vec<usize>,
    /// Straggler completion time for the round, s.
    pub round_time_s: f64,
    /// Per-user total times aligned with `scheduled` (0 for dropped users).
    pub per_user_time_s: Vec<f64>,
    /// Per-user spent energy aligned with `scheduled` (0 for dropped users).
    pub per_user_energy_j: Vec<f64>,
    /// Held-out accuracy after this round's aggregation.
    pub accuracy: f64,
    /// Scheduler reward, the negated round time.
    pub reward: f64,
}

impl RoundRecord {
    /// Builds a record, deriving `round_time_s` as the max per-user time over
    /// scheduled, non-dropped users and `reward` as its negation.
    pub fn new(
        round: usize,
        scheduled: Vec<usize>,
        dropped: Vec<usize>,
        per_user_time_s: Vec<f64>,
        per_user_energy_j: Vec<f64>,
        accuracy: f64,
    ) -> Self {
        debug_assert_eq!(scheduled.len(), per_user_time_s.len());
        let round_time_s = scheduled
            .iter()
            .zip(&per_user_time_s)
            .filter(|(uid, _)| !dropped.contains(uid))
            .map(|(_, t)| *t)
            .fold(0.0f64, f64::max);
        RoundRecord {
            round,
            scheduled,
            dropped,
            round_time_s,
            per_user_time_s,
            per_user_energy_j,
            accuracy,
            reward: -round_time_s,
        }
    }
}

pub const ROUND_CSV_HEADER: &str = "round,scheduled,dropped,round_time_s,accuracy,reward";

fn join_ids(ids: &[usize]) -> String {
    ids.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_ids(field: &str) -> Result<Vec<usize>> {
    if field.is_empty() {
        return Ok(Vec::new());
    }
    field
        .split(';')
        .map(|s| {
            s.parse::<usize>()
                .map_err(|e| SimError::Domain(format!("bad user id `{s}`: {e}")))
        })
        .collect()
}

/// Renders records as CSV. Floats use Rust's shortest round-trip formatting,
/// so re-parsing reproduces every value exactly.
pub fn render_round_records(records: &[RoundRecord]) -> String {
    let mut out = String::from(ROUND_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.round,
            join_ids(&r.scheduled),
            join_ids(&r.dropped),
            r.round_time_s,
            r.accuracy,
            r.reward
        ));
    }
    out
}

/// Writes the round-record CSV, one row per round, ordered by round index.
pub fn write_round_records(records: &[RoundRecord], path: &Path) -> Result<()> {
    let mut sorted: Vec<&RoundRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.round);
    let owned: Vec<RoundRecord> = sorted.into_iter().cloned().collect();
    fs::write(path, render_round_records(&owned)).map_err(|e| SimError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Reads back a round-record CSV. Only the persisted columns are recovered;
/// the per-user lists are not part of the file format and come back empty.
pub fn read_round_records(path: &Path) -> Result<Vec<RoundRecord>> {
    let text = fs::read_to_string(path).map_err(|e| SimError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == ROUND_CSV_HEADER => {}
        other => {
            return Err(SimError::Parse {
                path: path.to_path_buf(),
                reason: format!("unexpected header {other:?}"),
            })
        }
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(SimError::Parse {
                path: path.to_path_buf(),
                reason: format!("line {}: expected 6 fields, got {}", lineno + 2, fields.len()),
            });
        }
        let parse_f = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| SimError::Domain(format!("bad {what} `{s}`: {e}")))
        };
        records.push(RoundRecord {
            round: fields[0]
                .parse()
                .map_err(|e| SimError::Domain(format!("bad round `{}`: {e}", fields[0])))?,
            scheduled: parse_ids(fields[1])?,
            dropped: parse_ids(fields[2])?,
            round_time_s: parse_f(fields[3], "round_time_s")?,
            per_user_time_s: Vec::new(),
            per_user_energy_j: Vec::new(),
            accuracy: parse_f(fields[4], "accuracy")?,
            reward: parse_f(fields[5], "reward")?,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(round: usize) -> RoundRecord {
        RoundRecord::new(
            round,
            vec![0, 3, 7],
            vec![3],
            vec![1.25, 0.0, 0.5 + round as f64 * 1e-3],
            vec![0.01, 0.0, 0.02],
            0.42,
        )
    }

    #[test]
    fn three_records_make_four_lines() {
        let recs: Vec<_> = (0..3).map(sample).collect();
        let text = render_round_records(&recs);
        assert_eq!(text.trim_end().lines().count(), 4);
    }

    #[test]
    fn empty_list_is_header_only() {
        let text = render_round_records(&[]);
        assert_eq!(text, format!("{ROUND_CSV_HEADER}\n"));
    }

    #[test]
    fn rewrite_is_byte_identical() {
        let recs: Vec<_> = (0..5).map(sample).collect();
        assert_eq!(render_round_records(&recs), render_round_records(&recs));
    }

    #[test]
    fn round_time_is_max_over_non_dropped() {
        let r = sample(0);
        assert_eq!(r.round_time_s, 1.25);
        assert_eq!(r.reward, -1.25);
    }

    #[test]
    fn roundtrip_recovers_numeric_fields_exactly() {
        let dir = std::env::temp_dir();
        let path = dir.join(format!("fedsched-rec-{}.csv", std::process::id()));
        let recs: Vec<_> = (0..4).map(sample).collect();
        write_round_records(&recs, &path).unwrap();
        let back = read_round_records(&path).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(back.len(), recs.len());
        for (a, b) in recs.iter().zip(&back) {
            assert_eq!(a.round, b.round);
            assert_eq!(a.scheduled, b.scheduled);
            assert_eq!(a.dropped, b.dropped);
            // bitwise equality: shortest round-trip formatting is lossless
            assert_eq!(a.round_time_s.to_bits(), b.round_time_s.to_bits());
            assert_eq!(a.accuracy.to_bits(), b.accuracy.to_bits());
            assert_eq!(a.reward.to_bits(), b.reward.to_bits());
        }
    }
}
