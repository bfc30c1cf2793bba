use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

/// Optional TOML configuration. Every key mirrors a CLI flag; the precedence
/// is CLI flag, then config value, then built-in default. Unknown keys are
/// rejected so typos surface instead of silently using defaults.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub linsim: LinsimSection,
    #[serde(default)]
    pub mech: MechSection,
    #[serde(default)]
    pub qa: QaSection,
    #[serde(default)]
    pub verify: VerifySection,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinsimSection {
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub lr: Option<f64>,
    pub steps: Option<usize>,
    pub record_every: Option<usize>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechSection {
    pub iterations: Option<usize>,
    pub tol: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaSection {
    pub format: Option<String>,
    pub metric: Option<String>,
    pub batch_size: Option<usize>,
    pub concurrency: Option<usize>,
    pub attempts: Option<u32>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub trials: Option<usize>,
}

/// Loads the config file when given, otherwise an all-default config.
pub fn load_config(path: Option<&Path>) -> anyhow::Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absent_config_is_default() {
        let cfg = load_config(None).unwrap();
        assert!(cfg.seed.is_none());
        assert!(cfg.linsim.n.is_none());
    }

    #[test]
    fn sections_parse() {
        let cfg: FileConfig = toml::from_str(
            "seed = 7\n[linsim]\nn = 50\nd = 500\n[verify]\ntrials = 25\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.linsim.n, Some(50));
        assert_eq!(cfg.verify.trials, Some(25));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("sead = 7\n").is_err());
        assert!(toml::from_str::<FileConfig>("[linsim]\nnn = 2\n").is_err());
    }
}
