use super::spec::{Mode, StageKind, StageSpec};
use crate::{Error, Result};

/// Preset names, each a clustering stage followed by hill climbing.
pub const PRESETS: [&str; 9] = [
    "km+hc",
    "som+km+hc",
    "ng+km+hc",
    "em+hc",
    "som+em+hc",
    "ng+em+hc",
    "fc+hc",
    "som+fc+hc",
    "ng+fc+hc",
];

fn som(kind: StageKind, v: [f64; 4]) -> StageSpec {
    StageSpec::new(kind)
        .with("iterations", v[0])
        .with("alpha_hi", v[1])
        .with("alpha_lo", v[2])
        .with("radius", v[3])
}

fn ng(kind: StageKind, v: [f64; 4]) -> StageSpec {
    StageSpec::new(kind)
        .with("lambda_hi", v[0])
        .with("lambda_lo", v[1])
        .with("eps_hi", v[2])
        .with("eps_lo", v[3])
}

/// Stages of a named preset, with the tuned hyperparameters reported for the
/// Swiss municipalities data in each mode.
pub fn preset(name: &str, mode: Mode) -> Result<Vec<StageSpec>> {
    use StageKind::*;
    let atomic = mode == Mode::Atomic;
    let first = match name.trim().to_ascii_lowercase().as_str() {
        "km+hc" => StageSpec::new(KmScan).with("k_max", 30.0),
        "em+hc" => StageSpec::new(Em),
        "fc+hc" => StageSpec::new(Fc).with("m", if atomic { 3.0 } else { 2.0 }),
        "som+km+hc" if atomic => som(SomKm, [1081.0, 0.809753218616724, 0.031088352131124, 0.83249740019602]),
        "som+km+hc" => som(SomKm, [146.0, 0.955179772565607, 0.097093850745587, 0.648499123915099]),
        "ng+km+hc" if atomic => ng(
            NgKm,
            [
                10.6110575335055,
                0.959806751475908,
                0.499173569748991,
                0.016996916064339,
            ],
        ),
        "ng+km+hc" => ng(
            NgKm,
            [
                1.92036896656643,
                0.408302785790299,
                0.483817725175832,
                0.016913660635487,
            ],
        ),
        "som+em+hc" if atomic => som(SomEm, [7695.0, 0.113771222653394, 0.04425198940754, 0.061954274246033]),
        "som+em+hc" => som(SomEm, [5314.0, 0.860526216045479, 0.036380460266579, 0.266383153636882]),
        "ng+em+hc" if atomic => ng(
            NgEm,
            [8.23248667684384, 0.67836881950614, 0.146985992956907, 0.032059727899148],
        ),
        "ng+em+hc" => ng(
            NgEm,
            [1.02031964830343, 0.965802849282413, 0.49419928787723, 0.046602493289255],
        ),
        "som+fc+hc" if atomic => som(SomFc, [1462.0, 0.148577394044338, 0.030700312647367, 0.008935026169402]),
        "som+fc+hc" => som(SomFc, [361.0, 0.463767154766247, 0.003181504371105, 0.00137499391567]),
        "ng+fc+hc" if atomic => ng(
            NgFc,
            [8.23248667684384, 0.67836881950614, 0.146985992956907, 0.032059727899148],
        ),
        "ng+fc+hc" => ng(
            NgFc,
            [21.617934961514, 0.764578349819259, 0.133934543593412, 0.080908668275684],
        ),
        other => {
            return Err(Error::Config(format!(
                "unknown preset `{other}` (known: {})",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(vec![first, StageSpec::new(HillClimb)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::PrecisionSpec;
    use crate::pipeline::PipelineSpec;

    #[test]
    fn every_preset_is_a_valid_pipeline() {
        for mode in [Mode::Atomic, Mode::Continuous] {
            for name in PRESETS {
                let spec = PipelineSpec {
                    mode,
                    stages: preset(name, mode).unwrap(),
                    precision: PrecisionSpec::new(vec![0.05]).unwrap(),
                    seed: 1,
                };
                spec.validate().unwrap();
                assert_eq!(spec.stages.last().unwrap().kind, StageKind::HillClimb);
            }
        }
        assert!(preset("ga+hc", Mode::Atomic).is_err());
    }
}
