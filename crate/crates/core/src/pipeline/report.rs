use std::fmt::Write;

use super::run::StageReport;

pub const PLOT_HEADER: &str = "combination,aggregated_total_time_s,sample_size";

/// Stage reports of one algorithm combination.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkEntry {
    pub combination: String,
    pub stages: Vec<StageReport>,
}

impl BenchmarkEntry {
    pub fn aggregated_time(&self) -> f64 {
        self.stages.last().map_or(0.0, |s| s.cumulative_s)
    }

    pub fn final_sample_size(&self) -> f64 {
        self.stages.last().map_or(0.0, |s| s.sample_size)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    /// Aligned text table, one row per stage.
    pub table: String,
    /// CSV with [`PLOT_HEADER`], one point per combination.
    pub plot_data: String,
}

/// Stage table and time-versus-sample-size plot data.
pub fn benchmark_report(entries: &[BenchmarkEntry]) -> BenchmarkReport {
    let header = [
        "Combination",
        "Stage",
        "Algorithm",
        "Sample Size",
        "Time (s)",
        "Cumulative (s)",
        "Aggregated Total (s)",
    ];
    let mut rows: Vec<[String; 7]> = Vec::new();
    for e in entries {
        for (i, s) in e.stages.iter().enumerate() {
            let last = i + 1 == e.stages.len();
            rows.push([
                if i == 0 { e.combination.clone() } else { String::new() },
                s.stage.to_string(),
                s.kind.name().to_string(),
                format!("{:.2}", s.sample_size),
                format!("{:.2}", s.time_s),
                format!("{:.2}", s.cumulative_s),
                if last {
                    format!("{:.2}", e.aggregated_time())
                } else {
                    String::new()
                },
            ]);
        }
    }
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut table = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| if i < 3 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(header.to_vec(), &mut table);
    let _ = writeln!(
        table,
        "{}",
        "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1))
    );
    for r in &rows {
        line(r.iter().map(String::as_str).collect(), &mut table);
    }

    let mut plot_data = format!("{PLOT_HEADER}\n");
    for e in entries {
        let name = if e.combination.contains([',', '"']) {
            format!("\"{}\"", e.combination.replace('"', "\"\""))
        } else {
            e.combination.clone()
        };
        let _ = writeln!(plot_data, "{name},{},{}", e.aggregated_time(), e.final_sample_size());
    }
    BenchmarkReport { table, plot_data }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::StageKind;

    fn stage(i: usize, kind: StageKind, size: f64, t: f64, cum: f64) -> StageReport {
        StageReport {
            stage: i,
            kind,
            sample_size: size,
            strata: 10,
            time_s: t,
            cumulative_s: cum,
        }
    }

    #[test]
    fn one_stage_one_point() {
        let r = benchmark_report(&[BenchmarkEntry {
            combination: "km".into(),
            stages: vec![stage(1, StageKind::KmScan, 246.9, 0.5, 0.5)],
        }]);
        assert_eq!(r.table.lines().count(), 3);
        assert_eq!(r.plot_data, format!("{PLOT_HEADER}\nkm,0.5,246.9\n"));
    }

    #[test]
    fn plot_times_match_table_cumulative() {
        let entries: Vec<BenchmarkEntry> = (0..3)
            .map(|i| BenchmarkEntry {
                combination: format!("c{i}"),
                stages: vec![
                    stage(1, StageKind::Em, 200.0 + i as f64, 1.25, 1.25),
                    stage(2, StageKind::HillClimb, 150.0, 2.0 + i as f64, 3.25 + i as f64),
                ],
            })
            .collect();
        let r = benchmark_report(&entries);
        for (line, e) in r.plot_data.lines().skip(1).zip(&entries) {
            let t: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!((t - e.stages[1].cumulative_s).abs() < 1e-6);
        }
        assert_eq!(r.plot_data.lines().count(), 4);
        assert!(r.table.contains("HILL_CLIMB"));
    }
}
