//! Experiment configuration: flat `key = value` lines grouped under
//! `[section]` headers. `#` starts a comment. Unknown sections or keys are
//! rejected.
//!
//! ```text
//! [experiment]
//! name = chern-lashof      # see Experiment::ALL for the accepted names
//! seed = 42
//! out = results            # HADAMARD_OUT overrides this
//!
//! [fixture]
//! model = hyperboloid      # euclidean | hyperboloid | klein | product_h2_r | sphere_fixture
//! radii = 0.5, 1, 2
//! genus = 1
//! amplitude = 0.15
//!
//! [resolution]
//! level = 4                # icosphere subdivision level
//! samples = 400            # samples per curve
//! grid = 100               # develop grid side
//! instances = 50           # random instances per suite
//!
//! [tolerance]
//! relative = 0.005         # overrides the experiment's main tolerance
//! flat = 1e-6              # flatness threshold for development
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::spaces::Model;

/// Environment variable that overrides the output directory.
pub const OUT_ENV: &str = "HADAMARD_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    SpacesSelftest,
    TransportHolonomy,
    CurveTau,
    ChordFit,
    TwoPoint,
    Majorize,
    SchurSuite,
    ChernLashof,
    ParallelFlow,
    KleinerChain,
    GaussMap,
    Develop,
    HullAperture,
    All,
}

impl Experiment {
    pub const ALL: [Experiment; 14] = [
        Experiment::SpacesSelftest,
        Experiment::TransportHolonomy,
        Experiment::CurveTau,
        Experiment::ChordFit,
        Experiment::TwoPoint,
        Experiment::Majorize,
        Experiment::SchurSuite,
        Experiment::ChernLashof,
        Experiment::ParallelFlow,
        Experiment::KleinerChain,
        Experiment::GaussMap,
        Experiment::Develop,
        Experiment::HullAperture,
        Experiment::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SpacesSelftest => "spaces-selftest",
            Experiment::TransportHolonomy => "transport-holonomy",
            Experiment::CurveTau => "curve-tau",
            Experiment::ChordFit => "chord-fit",
            Experiment::TwoPoint => "two-point",
            Experiment::Majorize => "majorize",
            Experiment::SchurSuite => "schur-suite",
            Experiment::ChernLashof => "chern-lashof",
            Experiment::ParallelFlow => "parallel-flow",
            Experiment::KleinerChain => "kleiner-chain",
            Experiment::GaussMap => "gauss-map",
            Experiment::Develop => "develop",
            Experiment::HullAperture => "hull-aperture",
            Experiment::All => "all",
        }
    }

    /// Stable identifier mixed into per-instance random streams.
    pub fn id(self) -> u64 {
        Self::ALL.iter().position(|&e| e == self).unwrap() as u64
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.iter().copied().find(|e| e.name() == s).ok_or_else(|| Error::Config(format!("unknown experiment {s}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub out: PathBuf,
    pub model: Option<Model>,
    pub radii: Option<Vec<f64>>,
    pub genus: Option<usize>,
    pub amplitude: Option<f64>,
    pub level: Option<usize>,
    pub samples: Option<usize>,
    pub grid: Option<usize>,
    pub instances: Option<usize>,
    pub relative_tol: Option<f64>,
    pub flat_tol: f64,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            seed: 0,
            out: PathBuf::from("results"),
            model: None,
            radii: None,
            genus: None,
            amplitude: None,
            level: None,
            samples: None,
            grid: None,
            instances: None,
            relative_tol: None,
            flat_tol: crate::develop::FLAT_TOL,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut name: Option<Experiment> = None;
        let mut cfg = ExperimentConfig::new(Experiment::All);
        let mut section = String::new();
        for (k, raw) in text.lines().enumerate() {
            let ln = k + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(s) = line.strip_prefix('[') {
                let s = s.strip_suffix(']').ok_or_else(|| Error::Config(format!("line {ln}: unterminated section header")))?;
                section = s.trim().to_string();
                if !["experiment", "fixture", "resolution", "tolerance"].contains(&section.as_str()) {
                    return Err(Error::Config(format!("line {ln}: unknown section [{section}]")));
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config(format!("line {ln}: expected key = value")))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Config(format!("line {ln}: bad {what} `{value}`"));
            match (section.as_str(), key) {
                ("experiment", "name") => name = Some(value.parse()?),
                ("experiment", "seed") => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                ("experiment", "out") => cfg.out = PathBuf::from(value),
                ("fixture", "model") => cfg.model = Some(Model::from_tag(value).ok_or_else(|| bad("model"))?),
                ("fixture", "radii") => {
                    let r: Vec<f64> = value.split(',').map(|s| s.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad("radii"))?;
                    if r.is_empty() || r.iter().any(|&x| !(x > 0.0)) {
                        return Err(bad("radii"));
                    }
                    cfg.radii = Some(r);
                }
                ("fixture", "genus") => cfg.genus = Some(value.parse().map_err(|_| bad("genus"))?),
                ("fixture", "amplitude") => cfg.amplitude = Some(positive(value).ok_or_else(|| bad("amplitude"))?),
                ("resolution", "level") => cfg.level = Some(value.parse().map_err(|_| bad("level"))?),
                ("resolution", "samples") => cfg.samples = Some(count(value).ok_or_else(|| bad("samples"))?),
                ("resolution", "grid") => cfg.grid = Some(count(value).ok_or_else(|| bad("grid"))?),
                ("resolution", "instances") => cfg.instances = Some(count(value).ok_or_else(|| bad("instances"))?),
                ("tolerance", "relative") => cfg.relative_tol = Some(positive(value).ok_or_else(|| bad("tolerance"))?),
                ("tolerance", "flat") => cfg.flat_tol = positive(value).ok_or_else(|| bad("tolerance"))?,
                ("", _) => return Err(Error::Config(format!("line {ln}: key `{key}` outside a section"))),
                (s, _) => return Err(Error::Config(format!("line {ln}: unknown key `{key}` in [{s}]"))),
            }
        }
        cfg.experiment = name.ok_or_else(|| Error::Config("missing [experiment] name".into()))?;
        Ok(cfg)
    }

    /// Output directory after applying the environment override.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUT_ENV) {
            Some(p) if !p.is_empty() => PathBuf::from(p),
            _ => self.out.clone(),
        }
    }
}

fn positive(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| *x > 0.0 && x.is_finite())
}

fn count(s: &str) -> Option<usize> {
    s.parse::<usize>().ok().filter(|&n| n > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_sections() {
        let cfg = ExperimentConfig::parse(
            "[experiment]\nname = gauss-map # cross-check\nseed = 7\n\n[fixture]\nmodel = klein\nradii = 0.5, 2\n[resolution]\nlevel = 3\n[tolerance]\nrelative = 0.02\n",
        )
        .unwrap();
        assert_eq!(cfg.experiment, Experiment::GaussMap);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.model, Some(Model::Klein));
        assert_eq!(cfg.radii, Some(vec![0.5, 2.0]));
        assert_eq!(cfg.level, Some(3));
        assert_eq!(cfg.relative_tol, Some(0.02));
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        for text in [
            "[experiment]\nname = all\ncolour = red\n",
            "[extra]\n",
            "name = all\n",
            "[experiment]\nname = nope\n",
            "[experiment]\nname = all\n[resolution]\ngrid = 0\n",
            "[experiment]\nseed = 1\n",
        ] {
            assert!(matches!(ExperimentConfig::parse(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
    }
}
