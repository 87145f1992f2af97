use std::fs;
use std::path::{Path, PathBuf};

use kac_spectral::solver::{InitialData, SchemeKind};
use kac_spectral::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Experiment description. Every field has a default, so a config file may
/// be partial; command-line flags override file values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub s: f64,
    pub n_v: usize,
    pub n_x: usize,
    /// The torus has circumference `2πL`.
    pub length: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub dt: f64,
    pub scheme: SchemeKind,
    pub initial: InitialData,
    pub diagnostics: Diagnostics,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Diagnostics {
    /// Keep every `snapshot_stride`-th step.
    pub snapshot_stride: usize,
    /// Include `Γ(g, g)`; off gives the linear equation.
    pub nonlinear: bool,
    /// Fixed weight rate `c` for `smoothing-fit`; bisected when absent.
    pub weight_rate: Option<f64>,
    /// Growth factor allowed in the weight-rate bisection.
    pub weight_factor: f64,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self {
            snapshot_stride: 10,
            nonlinear: true,
            weight_rate: None,
            weight_factor: 2.0,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            s: 0.5,
            n_v: 64,
            n_x: 128,
            length: 1.0,
            t_final: 1.0,
            dt: 0.01,
            scheme: SchemeKind::StrangSplit,
            initial: InitialData::Rough {
                a: 1.0,
                b: 1.0,
                amplitude: 1e-2,
                seed: 7,
            },
            diagnostics: Diagnostics::default(),
            out: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub s: Option<f64>,
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, o: &Overrides) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| Error::InvalidParameter(format!("cannot read config {}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::InvalidParameter(format!("config {}: {e}", p.display())))?
            }
            None => Self::default(),
        };
        if let Some(s) = o.s {
            cfg.s = s;
        }
        if let Some(t) = o.t_final {
            cfg.t_final = t;
        }
        if let Some(dt) = o.dt {
            cfg.dt = dt;
        }
        if let Some(out) = &o.out {
            cfg.out = out.clone();
        }
        if let Some(seed) = o.seed {
            if let InitialData::Rough { seed: ref mut sd, .. } = cfg.initial {
                *sd = seed;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.s > 0.0 && self.s < 1.0) {
            return bad(format!("s must lie in (0, 1), got {}", self.s));
        }
        if self.n_v == 0 {
            return bad("n_v must be positive".into());
        }
        if self.n_x == 0 || !self.n_x.is_power_of_two() {
            return bad(format!("n_x must be a power of two, got {}", self.n_x));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return bad(format!("length must be positive, got {}", self.length));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return bad(format!("T must be ≥ 0, got {}", self.t_final));
        }
        if self.diagnostics.snapshot_stride == 0 {
            return bad("snapshot_stride must be ≥ 1".into());
        }
        if !(self.diagnostics.weight_factor > 1.0) {
            return bad("weight_factor must exceed 1".into());
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, output directory excluded.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(m) = v.as_object_mut() {
            m.remove("out");
        }
        hex::encode(Sha256::digest(v.to_string().as_bytes()))
    }

    pub fn seed(&self) -> Option<u64> {
        match self.initial {
            InitialData::Rough { seed, .. } => Some(seed),
            InitialData::Modes { .. } => None,
        }
    }
}

/// The configured datum rescaled to `amplitude`.
pub fn with_amplitude(initial: &InitialData, amplitude: f64) -> InitialData {
    let mut d = initial.clone();
    match &mut d {
        InitialData::Modes { amplitude: a, .. } | InitialData::Rough { amplitude: a, .. } => *a = amplitude,
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_and_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        fs::write(
            &p,
            r#"{"n_x": 32, "T": 0.5, "initial": {"kind": "rough", "a": 2, "b": 1, "amplitude": 0.1, "seed": 3}}"#,
        )
        .unwrap();
        let o = Overrides {
            dt: Some(0.02),
            seed: Some(9),
            ..Default::default()
        };
        let c = RunConfig::load(Some(&p), &o).unwrap();
        assert_eq!((c.n_x, c.t_final, c.dt, c.seed()), (32, 0.5, 0.02, Some(9)));
    }

    #[test]
    fn rejects_out_of_range() {
        for o in [
            Overrides {
                s: Some(1.2),
                ..Default::default()
            },
            Overrides {
                dt: Some(0.0),
                ..Default::default()
            },
            Overrides {
                t_final: Some(-1.0),
                ..Default::default()
            },
        ] {
            assert!(matches!(RunConfig::load(None, &o), Err(Error::InvalidParameter(_))));
        }
        let c = RunConfig {
            n_x: 48,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn unknown_keys_are_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        fs::write(&p, r#"{"nx": 32}"#).unwrap();
        assert!(RunConfig::load(Some(&p), &Overrides::default()).is_err());
    }

    #[test]
    fn hash_ignores_output_directory() {
        let a = RunConfig::default();
        let b = RunConfig {
            out: "elsewhere".into(),
            ..Default::default()
        };
        let c = RunConfig {
            dt: 0.02,
            ..Default::default()
        };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }
}
