use std::collections::BTreeMap;

use jointstrat::allocation::{bethel_allocate, evaluate_cost, AllocationOptions, PrecisionSpec};
use jointstrat::io::{cmd_optimize, load_config, read_solution, Overrides};
use jointstrat::strata::{build_atomic_strata, Frame, Partition, Record, Stratification, StratumSummary};
use proptest::prelude::*;

/// Summary of a set of records computed straight from the raw values.
fn raw_summary(frame: &Frame, rows: &[usize]) -> StratumSummary {
    let g = frame.num_targets();
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..g)
        .map(|j| rows.iter().map(|&i| frame.records[i].targets[j]).sum::<f64>() / n)
        .collect();
    let sd = (0..g)
        .map(|j| {
            let ss: f64 = rows
                .iter()
                .map(|&i| (frame.records[i].targets[j] - mean[j]).powi(2))
                .sum();
            (ss / n).sqrt()
        })
        .collect();
    StratumSummary::new(rows.len(), mean, sd)
}

fn frame_of(rows: &[(u8, u8, f64, f64)]) -> Frame {
    let records = rows
        .iter()
        .map(|&(d, x, y1, y2)| Record {
            domain: format!("d{}", d % 2),
            targets: vec![y1, y2],
            auxiliaries: vec![(x % 6).to_string()],
        })
        .collect();
    Frame::new("dom", vec!["Y1".into(), "Y2".into()], vec!["X".into()], records).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cost_matches_allocation_of_raw_strata(
        rows in prop::collection::vec((0u8..2, 0u8..6, 1.0f64..500.0, 1.0f64..50.0), 8..120),
        labels in prop::collection::vec(0usize..3, 12),
    ) {
        let frame = frame_of(&rows);
        let strata = build_atomic_strata(&frame).unwrap();
        let s = Stratification {
            domains: strata
                .domains
                .iter()
                .map(|d| Partition::from_labels(&labels[..d.len()]))
                .collect(),
        };
        let spec = PrecisionSpec::new(vec![0.05, 0.1]).unwrap();
        let opts = AllocationOptions::default();
        let cost = evaluate_cost(&strata, &s, &spec, &opts).unwrap();

        let mut raw_total = 0.0;
        for (d, p) in strata.domains.iter().zip(&s.domains) {
            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (b, &l) in d.strata.iter().zip(p.labels()) {
                groups.entry(l).or_default().extend(&b.members);
            }
            let summaries: Vec<StratumSummary> = groups.values().map(|rows| raw_summary(&frame, rows)).collect();
            raw_total += bethel_allocate(&summaries, &spec, &opts).unwrap().total;
        }
        prop_assert!((cost.total - raw_total).abs() <= 1e-9 * raw_total.max(1.0), "{} vs {raw_total}", cost.total);
    }
}

#[test]
fn exported_solution_rescores_to_the_reported_total() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("dom,X1,X2,Y1,Y2\n");
    for i in 0..400u64 {
        let x1 = i * 7 % 5;
        let x2 = i * 11 % 4;
        let y1 = 20.0 + 9.0 * x1 as f64 + (i * 37 % 17) as f64;
        let y2 = 5.0 + 3.0 * (x1 * x2) as f64 + (i * 13 % 7) as f64;
        csv.push_str(&format!("{},{x1},{x2},{y1},{y2}\n", ["N", "S", "E"][(i % 3) as usize]));
    }
    std::fs::write(dir.path().join("frame.csv"), csv).unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "[input]\npath = \"frame.csv\"\n\n[schema]\ndomain = \"dom\"\ntargets = [\"Y1\", \"Y2\"]\n\
         auxiliaries = [\"X1\", \"X2\"]\n\n[run]\nmode = \"atomic\"\nseed = 5\npreset = \"som+km+hc\"\n\n\
         [precision]\ncv = [0.03, 0.05]\n",
    )
    .unwrap();
    let c = load_config(&config, &Overrides::default()).unwrap();
    let summary = cmd_optimize(&c).unwrap();
    let strata = &summary.outcome.strata;

    let back = read_solution(&c.run.output.join("solution.csv"), strata).unwrap();
    assert_eq!(back, summary.outcome.last().stratification);
    let rescored = evaluate_cost(
        strata,
        &back,
        &c.precision_spec().unwrap(),
        &AllocationOptions::default(),
    )
    .unwrap();
    assert!((rescored.total - summary.total).abs() < 1e-6);

    let alloc = std::fs::read_to_string(c.run.output.join("allocation.csv")).unwrap();
    let n_sum: f64 = alloc
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((n_sum - summary.total).abs() < 1e-6);

    // labels are dense 1..H within each domain
    let sol = std::fs::read_to_string(c.run.output.join("solution.csv")).unwrap();
    let mut per_domain: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for line in sol.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        per_domain
            .entry(f[0].to_string())
            .or_default()
            .push(f[2].parse().unwrap());
    }
    for labels in per_domain.values() {
        let max = *labels.iter().max().unwrap();
        assert!((1..=max).all(|h| labels.contains(&h)));
    }
}
