//! Per-goal run records, the CSV schema and cactus-plot curves.

use std::fmt::Write as _;

/// One solver run on one goal file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunRecord {
    pub file: String,
    pub calculus: String,
    /// One of `sat`, `unsat`, `unknown`, `timeout`, `error`.
    pub verdict: String,
    pub wall_ms: u64,
    pub decisions: u64,
    pub lemmas_total: u64,
}

pub const CSV_HEADER: &str = "file,calculus,verdict,wall_ms,decisions,lemmas_total";

pub fn to_csv(records: &[RunRecord]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.file, r.calculus, r.verdict, r.wall_ms, r.decisions, r.lemmas_total
        )
        .unwrap();
    }
    out
}

pub fn from_csv(text: &str) -> Result<Vec<RunRecord>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(format!("bad CSV header: {:?}", other)),
    }
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(format!("line {}: expected 6 columns, got {}", n + 2, cols.len()));
        }
        let num = |s: &str| s.trim().parse::<u64>().map_err(|e| format!("line {}: {e}", n + 2));
        out.push(RunRecord {
            file: cols[0].to_string(),
            calculus: cols[1].to_string(),
            verdict: cols[2].to_string(),
            wall_ms: num(cols[3])?,
            decisions: num(cols[4])?,
            lemmas_total: num(cols[5])?,
        });
    }
    Ok(out)
}

/// Accumulated-time curve for one configuration and verdict class:
/// after sorting the solved goals by wall time, point k is
/// (sum of the first k times in seconds, k).
pub fn cactus_curve(records: &[RunRecord], calculus: &str, verdict: &str) -> Vec<(f64, u64)> {
    let mut times: Vec<u64> = records
        .iter()
        .filter(|r| r.calculus == calculus && r.verdict == verdict)
        .map(|r| r.wall_ms)
        .collect();
    times.sort_unstable();
    let mut acc = 0u64;
    times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            acc += t;
            (acc as f64 / 1000.0, (k + 1) as u64)
        })
        .collect()
}

/// The full plot data: one sat curve and one unsat curve per calculus
/// present in the records; unknown/timeout/error runs never enter a curve.
pub fn cactus_data(records: &[RunRecord]) -> String {
    let mut calculi: Vec<&str> = records.iter().map(|r| r.calculus.as_str()).collect();
    calculi.sort_unstable();
    calculi.dedup();
    let mut out = String::new();
    for calc in calculi {
        for verdict in ["sat", "unsat"] {
            writeln!(out, "# {calc} {verdict}").unwrap();
            out.push_str("accumulated_s\tsolved\n");
            for (acc, solved) in cactus_curve(records, calc, verdict) {
                writeln!(out, "{acc:.3}\t{solved}").unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(file: &str, verdict: &str, wall_ms: u64) -> RunRecord {
        RunRecord {
            file: file.into(),
            calculus: "ext".into(),
            verdict: verdict.into(),
            wall_ms,
            decisions: 1,
            lemmas_total: 2,
        }
    }

    #[test]
    fn csv_round_trips() {
        let records = vec![rec("a.smt2", "sat", 10), rec("b.smt2", "unsat", 20)];
        let text = to_csv(&records);
        assert!(text.starts_with(CSV_HEADER));
        assert_eq!(from_csv(&text).unwrap(), records);
    }

    #[test]
    fn curve_is_the_cumulative_sum() {
        let records =
            vec![rec("a", "sat", 1000), rec("b", "sat", 2000), rec("c", "sat", 4000)];
        assert_eq!(
            cactus_curve(&records, "ext", "sat"),
            vec![(1.0, 1), (3.0, 2), (7.0, 3)]
        );
    }

    #[test]
    fn empty_records_give_empty_curves() {
        assert_eq!(cactus_curve(&[], "ext", "sat"), vec![]);
    }

    #[test]
    fn unsolved_runs_are_excluded() {
        let records = vec![
            rec("a", "sat", 1000),
            rec("b", "timeout", 5000),
            rec("c", "unknown", 100),
            rec("d", "error", 0),
        ];
        assert_eq!(cactus_curve(&records, "ext", "sat"), vec![(1.0, 1)]);
        assert_eq!(cactus_curve(&records, "ext", "unsat"), vec![]);
        let data = cactus_data(&records);
        assert!(data.contains("# ext sat"));
        assert!(data.contains("# ext unsat"));
    }
}
