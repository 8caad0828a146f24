use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_CONFIG: &str = include_str!("../../config/construction.toml");

/// Constants of the construction. Every asymptotic constant of the argument
/// is a field here; defaults come from `config/construction.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionParams {
    /// Config format version.
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(rename = "C")]
    pub big_c: f64,
    pub alpha: f64,
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub q_window: f64,
    pub gamma: f64,
    pub eps: f64,
    pub delta: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
    pub retries: u32,
    /// Minimum acceptable per-claim frequency in claim-frequency studies.
    pub claim_floor: f64,
    pub seed: u64,
}

fn default_version() -> u32 {
    1
}

impl Default for ConstructionParams {
    fn default() -> Self {
        ConstructionParams::from_toml_str(DEFAULT_CONFIG).expect("bundled construction config is valid")
    }
}

impl ConstructionParams {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let p: ConstructionParams = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
            message: e.message().to_string(),
        })?;
        p.validate()?;
        Ok(p)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("C", self.big_c),
            ("alpha", self.alpha),
            ("c", self.c),
            ("c1", self.c1),
            ("c2", self.c2),
            ("q_window", self.q_window),
            ("gamma", self.gamma),
            ("eps", self.eps),
            ("delta", self.delta),
            ("k1", self.k1),
            ("k2", self.k2),
            ("k3", self.k3),
            ("k4", self.k4),
            ("k5", self.k5),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be a positive real, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.claim_floor) {
            return Err(Error::param("claim_floor", "must lie in [0, 1]"));
        }
        if self.alpha > 0.5 {
            return Err(Error::param("alpha", "must be <= 1/2 since f(m) <= sqrt(m)"));
        }
        if self.gamma >= 0.25 {
            return Err(Error::param("gamma", "must be < 1/4"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_defaults_load() {
        let p = ConstructionParams::default();
        assert_eq!(p.version, 1);
        assert!(p.delta <= p.alpha / 5.0 + 1e-12);
        assert!((p.eps - 4.0 * p.gamma).abs() < 1e-12);
        assert_eq!(p.retries, 20);
    }

    #[test]
    fn rejects_bad_values() {
        let text = DEFAULT_CONFIG.replace("c = 0.0006", "c = -1.0");
        assert!(matches!(
            ConstructionParams::from_toml_str(&text),
            Err(Error::InvalidParameter { name: "c", .. })
        ));
        assert!(ConstructionParams::from_toml_str("bogus = 1").is_err());
    }
}
