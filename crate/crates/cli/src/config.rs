use std::path::Path;

use anyhow::Context;
use serde::Deserialize;

/// Optional TOML file. Any key may be omitted; command-line flags win.
#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub classes: Option<usize>,
    pub hidden: Option<usize>,
    pub cycles: Option<usize>,
    pub c: Option<f64>,
    pub gamma: Option<f64>,
    pub k: Option<usize>,
    pub c_values: Option<Vec<f64>>,
    pub gamma_values: Option<Vec<f64>>,
    pub kkt_tol: Option<f64>,
    pub max_passes: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// First of flag, file value, default.
pub fn pick<T: Clone>(flag: Option<T>, file: &Option<T>, default: T) -> T {
    flag.or_else(|| file.clone()).unwrap_or(default)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_default() {
        assert_eq!(pick(Some(3), &Some(2), 1), 3);
        assert_eq!(pick(None, &Some(2), 1), 2);
        assert_eq!(pick(None, &None, 1), 1);
    }

    #[test]
    fn parses_partial_file() {
        let c: FileConfig = toml::from_str("seed = 7\nc_values = [1.0, 2.0]\n").unwrap();
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.c_values, Some(vec![1.0, 2.0]));
        assert!(toml::from_str::<FileConfig>("sede = 7").is_err());
    }
}
