use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use scriptorium::learn::Gamma;
use scriptorium::EmbedMethod;

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub manifest_path: Option<PathBuf>,
    pub inventory_path: Option<PathBuf>,
    pub segment_size: usize,
    pub top_k: usize,
    pub pca_dims: usize,
    pub embed_method: EmbedMethod,
    pub nu: f64,
    #[serde(serialize_with = "display")]
    pub gamma: Gamma,
    pub n_trees: usize,
    pub min_segments: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
}

fn display<S: serde::Serializer>(g: &Gamma, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(g)
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            manifest_path: None,
            inventory_path: None,
            segment_size: 5000,
            top_k: 100,
            pca_dims: 25,
            embed_method: EmbedMethod::Pca2d,
            nu: 0.1,
            gamma: Gamma::Scale,
            n_trees: 200,
            min_segments: 10,
            seed: 42,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Settings as read from a JSON config file or the command line; unset
/// fields fall through to the next layer.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub manifest_path: Option<PathBuf>,
    pub inventory_path: Option<PathBuf>,
    pub segment_size: Option<usize>,
    pub top_k: Option<usize>,
    pub pca_dims: Option<usize>,
    pub embed_method: Option<String>,
    pub nu: Option<f64>,
    pub gamma: Option<String>,
    pub n_trees: Option<usize>,
    pub min_segments: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

impl PartialConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut cfg: Self = serde_json::from_str(&text)
            .map_err(|e| format!("invalid config {}: {e}", path.display()))?;
        // relative paths in a config file are relative to the file
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.manifest_path, &mut cfg.inventory_path, &mut cfg.output_dir]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Fields set in `self` win over `lower`.
    pub fn over(self, lower: Self) -> Self {
        Self {
            manifest_path: self.manifest_path.or(lower.manifest_path),
            inventory_path: self.inventory_path.or(lower.inventory_path),
            segment_size: self.segment_size.or(lower.segment_size),
            top_k: self.top_k.or(lower.top_k),
            pca_dims: self.pca_dims.or(lower.pca_dims),
            embed_method: self.embed_method.or(lower.embed_method),
            nu: self.nu.or(lower.nu),
            gamma: self.gamma.or(lower.gamma),
            n_trees: self.n_trees.or(lower.n_trees),
            min_segments: self.min_segments.or(lower.min_segments),
            seed: self.seed.or(lower.seed),
            output_dir: self.output_dir.or(lower.output_dir),
        }
    }

    pub fn resolve(self) -> Result<RunConfig, String> {
        let d = RunConfig::default();
        let cfg = RunConfig {
            manifest_path: self.manifest_path,
            inventory_path: self.inventory_path,
            segment_size: self.segment_size.unwrap_or(d.segment_size),
            top_k: self.top_k.unwrap_or(d.top_k),
            pca_dims: self.pca_dims.unwrap_or(d.pca_dims),
            embed_method: match self.embed_method {
                Some(m) => m.parse()?,
                None => d.embed_method,
            },
            nu: self.nu.unwrap_or(d.nu),
            gamma: match self.gamma {
                Some(g) => g.parse()?,
                None => d.gamma,
            },
            n_trees: self.n_trees.unwrap_or(d.n_trees),
            min_segments: self.min_segments.unwrap_or(d.min_segments),
            seed: self.seed.unwrap_or(d.seed),
            output_dir: self.output_dir.unwrap_or(d.output_dir),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    fn validate(&self) -> Result<(), String> {
        if self.segment_size == 0 {
            return Err("segment_size must be at least 1".into());
        }
        if self.top_k == 0 {
            return Err("top_k must be at least 1".into());
        }
        if self.pca_dims < 2 {
            return Err("pca_dims must be at least 2".into());
        }
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(format!("nu must lie in (0, 1], got {}", self.nu));
        }
        if let Gamma::Value(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(format!("gamma must be positive, got {g}"));
            }
        }
        if self.n_trees == 0 {
            return Err("n_trees must be at least 1".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = PartialConfig::default().resolve().unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!((c.segment_size, c.top_k, c.pca_dims, c.min_segments, c.seed), (5000, 100, 25, 10, 42));
    }

    #[test]
    fn flags_win() {
        let file = PartialConfig {
            top_k: Some(50),
            seed: Some(7),
            ..Default::default()
        };
        let flags = PartialConfig {
            seed: Some(9),
            ..Default::default()
        };
        let c = flags.over(file).resolve().unwrap();
        assert_eq!((c.top_k, c.seed), (50, 9));
    }

    #[test]
    fn rejects_bad_values() {
        let bad = PartialConfig {
            nu: Some(0.0),
            ..Default::default()
        };
        assert!(bad.resolve().is_err());
        let bad = PartialConfig {
            embed_method: Some("tsne".into()),
            ..Default::default()
        };
        assert!(bad.resolve().is_err());
    }
}
