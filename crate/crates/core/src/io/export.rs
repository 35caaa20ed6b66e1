use std::collections::HashMap;
use std::path::Path;

use crate::allocation::{CostReport, PrecisionSpec};
use crate::local_search::TracePoint;
use crate::pipeline::{StageKind, StageReport, TrialRecord};
use crate::strata::{BasicStrata, Partition, Stratification};
use crate::{Error, Result};

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn finish(mut w: csv::Writer<std::fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// `id, domain, N, M_1.., S_1..`, one row per basic stratum.
pub fn write_basic_strata(path: &Path, strata: &BasicStrata) -> Result<()> {
    let mut w = writer(path)?;
    let g = strata.num_targets();
    let mut head = vec!["id".to_string(), "domain".into(), "N".into()];
    head.extend((1..=g).map(|i| format!("M_{i}")));
    head.extend((1..=g).map(|i| format!("S_{i}")));
    w.write_record(&head)?;
    for s in strata.iter() {
        let mut row = vec![s.id.to_string(), s.domain.clone(), s.count.to_string()];
        row.extend(s.mean.iter().map(f64::to_string));
        row.extend(s.sd.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    finish(w, path)
}

/// `domain, basic_stratum_id, stratum_label` with labels `1..=H` per domain.
pub fn write_solution(path: &Path, strata: &BasicStrata, s: &Stratification) -> Result<()> {
    s.validate(strata)?;
    let mut w = writer(path)?;
    w.write_record(["domain", "basic_stratum_id", "stratum_label"])?;
    for (d, p) in strata.domains.iter().zip(&s.domains) {
        for (b, &l) in d.strata.iter().zip(p.labels()) {
            w.write_record([d.label.as_str(), &b.id.to_string(), &(l + 1).to_string()])?;
        }
    }
    finish(w, path)
}

/// Read a solution file back against the same basic strata.
pub fn read_solution(path: &Path, strata: &BasicStrata) -> Result<Stratification> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut labels: HashMap<(String, usize), usize> = HashMap::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |c: usize, name: &str| -> Result<usize> {
            let raw = rec.get(c).unwrap_or("");
            raw.parse().map_err(|_| Error::Parse {
                row: i + 1,
                column: name.into(),
                value: raw.into(),
            })
        };
        let label = field(2, "stratum_label")?;
        if label == 0 {
            return Err(Error::Malformed {
                row: i + 1,
                message: "stratum labels start at 1".into(),
            });
        }
        labels.insert(
            (rec.get(0).unwrap_or("").to_string(), field(1, "basic_stratum_id")?),
            label - 1,
        );
    }
    let domains = strata
        .domains
        .iter()
        .map(|d| {
            let raw = d
                .strata
                .iter()
                .map(|b| {
                    labels.get(&(d.label.clone(), b.id)).copied().ok_or_else(|| {
                        Error::Invariant(format!(
                            "solution has no label for basic stratum {} of `{}`",
                            b.id, d.label
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let h = raw.iter().max().map_or(0, |m| m + 1);
            Partition::new(raw, h)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Stratification { domains })
}

/// `domain, stratum, N_h, n_h`.
pub fn write_allocation(path: &Path, strata: &BasicStrata, s: &Stratification, cost: &CostReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["domain", "stratum", "N_h", "n_h"])?;
    for ((d, p), a) in strata.domains.iter().zip(&s.domains).zip(&cost.per_domain) {
        let mut sizes = vec![0usize; p.num_groups()];
        for (b, &l) in d.strata.iter().zip(p.labels()) {
            sizes[l] += b.count;
        }
        for (h, (n_h, big)) in a.n.iter().zip(&sizes).enumerate() {
            w.write_record([
                d.label.as_str(),
                &(h + 1).to_string(),
                &big.to_string(),
                &n_h.to_string(),
            ])?;
        }
    }
    finish(w, path)
}

/// `domain, target, achieved_cv, epsilon`.
pub fn write_cv_summary(path: &Path, strata: &BasicStrata, spec: &PrecisionSpec, cost: &CostReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["domain", "target", "achieved_cv", "epsilon"])?;
    for (d, a) in strata.domains.iter().zip(&cost.per_domain) {
        for ((name, cv), eps) in spec.names().iter().zip(&a.achieved_cv).zip(spec.epsilon()) {
            w.write_record([d.label.as_str(), name, &cv.to_string(), &eps.to_string()])?;
        }
    }
    finish(w, path)
}

pub const STAGE_HEADER: [&str; 7] = [
    "combination",
    "stage",
    "algorithm",
    "sample_size",
    "strata",
    "time_s",
    "cumulative_s",
];

pub fn write_stage_report(path: &Path, combination: &str, reports: &[StageReport]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(STAGE_HEADER)?;
    for r in reports {
        w.write_record([
            combination,
            &r.stage.to_string(),
            r.kind.name(),
            &r.sample_size.to_string(),
            &r.strata.to_string(),
            &format!("{:.6}", r.time_s),
            &format!("{:.6}", r.cumulative_s),
        ])?;
    }
    finish(w, path)
}

/// Stage reports grouped by combination, in file order.
pub fn read_stage_reports(path: &Path) -> Result<Vec<(String, Vec<StageReport>)>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let header = r.headers()?.clone();
    if header.iter().ne(STAGE_HEADER) {
        return Err(Error::Config(format!("{} is not a stage report", path.display())));
    }
    let mut out: Vec<(String, Vec<StageReport>)> = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |c: usize| -> Result<f64> {
            let raw = rec.get(c).unwrap_or("");
            raw.parse().map_err(|_| Error::Parse {
                row: i + 1,
                column: STAGE_HEADER[c].into(),
                value: raw.into(),
            })
        };
        let report = StageReport {
            stage: num(1)? as usize,
            kind: rec.get(2).unwrap_or("").parse::<StageKind>()?,
            sample_size: num(3)?,
            strata: num(4)? as usize,
            time_s: num(5)?,
            cumulative_s: num(6)?,
        };
        let combo = rec.get(0).unwrap_or("").to_string();
        match out.last_mut() {
            Some((c, v)) if *c == combo => v.push(report),
            _ => out.push((combo, vec![report])),
        }
    }
    Ok(out)
}

/// `iteration, total_cost, accepted`.
pub fn write_trace(path: &Path, trace: &[TracePoint]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["iteration", "total_cost", "accepted"])?;
    for p in trace {
        w.write_record([
            p.iteration.to_string(),
            p.total_cost.to_string(),
            u8::from(p.accepted).to_string(),
        ])?;
    }
    finish(w, path)
}

/// One row per trial; parameter columns follow the fixed ones in name order.
pub fn write_trials(path: &Path, trials: &[TrialRecord]) -> Result<()> {
    let mut w = writer(path)?;
    let mut names: Vec<&String> = trials.iter().flat_map(|t| t.params.keys()).collect();
    names.sort();
    names.dedup();
    let mut head: Vec<String> = ["trial", "status", "sample_size", "total_time_s", "seed", "error"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    head.extend(names.iter().map(|n| n.to_string()));
    w.write_record(&head)?;
    for t in trials {
        let mut row = vec![
            t.index.to_string(),
            if t.error.is_some() {
                "failed".into()
            } else {
                "ok".into()
            },
            t.sample_size.map(|s| s.to_string()).unwrap_or_default(),
            format!("{:.6}", t.total_time),
            t.seed.to_string(),
            t.error.clone().unwrap_or_default(),
        ];
        row.extend(
            names
                .iter()
                .map(|n| t.params.get(*n).map(f64::to_string).unwrap_or_default()),
        );
        w.write_record(&row)?;
    }
    finish(w, path)
}
