//! The Swiss municipalities benchmark frame.
//!
//! The raw table (the `swissmunicipalities` data of the R `sampling`
//! package, exported to CSV with its original column names) is not bundled;
//! [`locate`] looks for it at `JOINTSTRAT_SWISS_CSV` or under
//! `tests/fixtures/swiss/swissmunicipalities.csv` of the core crate. The
//! categorical auxiliaries are derived from it by quantile binning.

use std::path::{Path, PathBuf};

use super::binning::BinnedColumn;
use super::config::{CvTargets, InputSection, PrecisionSection, RunConfig, RunSection};
use crate::pipeline::Mode;
use crate::strata::Schema;

pub const ENV_VAR: &str = "JOINTSTRAT_SWISS_CSV";
pub const ROWS: usize = 2896;
pub const DOMAINS: usize = 7;
pub const DOMAIN: &str = "REG";
pub const TARGETS: [&str; 2] = ["Surfacesbois", "Airbat"];
pub const AUXILIARIES: [&str; 2] = ["POPTOT.cat", "Hapoly.cat"];
pub const POPTOT_BINS: usize = 18;
pub const HAPOLY_BINS: usize = 3;

/// Path of the raw table, if present.
pub fn locate() -> Option<PathBuf> {
    if let Some(p) = std::env::var_os(ENV_VAR) {
        let p = PathBuf::from(p);
        return p.is_file().then_some(p);
    }
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/swiss/swissmunicipalities.csv");
    p.is_file().then_some(p)
}

/// Run config for the benchmark: domain `REG`, targets `Surfacesbois` and
/// `Airbat`, and in atomic mode the binned `POPTOT` and `HApoly` columns as
/// auxiliaries. CV target 0.05 on both variables.
pub fn config(path: &Path, mode: Mode, seed: u64, output: &Path) -> RunConfig {
    let atomic = mode == Mode::Atomic;
    RunConfig {
        input: InputSection {
            path: path.to_path_buf(),
            delimiter: ",".into(),
            derive: if atomic {
                vec![
                    BinnedColumn {
                        source: "POPTOT".into(),
                        name: AUXILIARIES[0].into(),
                        bins: POPTOT_BINS,
                    },
                    BinnedColumn {
                        source: "HApoly".into(),
                        name: AUXILIARIES[1].into(),
                        bins: HAPOLY_BINS,
                    },
                ]
            } else {
                Vec::new()
            },
        },
        schema: Schema::new(DOMAIN, &TARGETS, if atomic { &AUXILIARIES } else { &[] }),
        run: RunSection {
            mode,
            seed,
            workers: None,
            output: output.to_path_buf(),
            preset: None,
        },
        precision: PrecisionSection {
            cv: CvTargets::All(0.05),
        },
        stages: Vec::new(),
        tune: None,
        report: None,
        suite: None,
    }
}
