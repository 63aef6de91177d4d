//! Pipeline configuration: flat `key = value` text with optional `[section]`
//! headers. A key inside a section is addressed as `section.key`; the same
//! dotted names are accepted as command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    Ombb,
    Exact,
}

impl std::str::FromStr for MatchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ombb" => Ok(MatchMode::Ombb),
            "exact" => Ok(MatchMode::Exact),
            other => Err(format!("expected ombb or exact, got {other}")),
        }
    }
}

impl std::fmt::Display for MatchMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MatchMode::Ombb => "ombb",
            MatchMode::Exact => "exact",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterConfig {
    /// Occupied connected components up to this many cells are erased.
    pub speckle_max_pixels: usize,
    /// Free cells added around the map so rooms never touch the frame.
    pub frame_margin: usize,
    /// Stroke width used to rasterize line-list maps, in pixels.
    pub line_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiographyConfig {
    pub angle_bins: usize,
    pub offset_bin_size: f64,
    pub peak_threshold_ratio: f64,
    pub nms_radius: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneConfig {
    pub thr_e: f64,
    pub band_radius: f64,
    /// Faces with a smaller share of free cells are not rooms.
    pub min_free_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingConfig {
    pub mode: MatchMode,
    /// Degrees.
    pub tol_angle: f64,
    pub tol_ratio: f64,
    /// Degrees.
    pub corner_eps: f64,
    pub thr_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OutputConfig {
    pub result: Option<PathBuf>,
    pub pool: Option<PathBuf>,
    pub overlay: Option<PathBuf>,
    pub arrangement: Option<PathBuf>,
    pub render: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub occupied_threshold: u8,
    pub raster: RasterConfig,
    pub radiography: RadiographyConfig,
    pub prune: PruneConfig,
    pub matching: MatchingConfig,
    pub output: OutputConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            occupied_threshold: 100,
            raster: RasterConfig {
                speckle_max_pixels: 10,
                frame_margin: 8,
                line_width: 2.0,
            },
            radiography: RadiographyConfig {
                angle_bins: 180,
                offset_bin_size: 1.0,
                peak_threshold_ratio: 0.3,
                nms_radius: 3,
            },
            prune: PruneConfig {
                thr_e: 0.075,
                band_radius: 3.0,
                min_free_fraction: 0.5,
            },
            matching: MatchingConfig {
                mode: MatchMode::Ombb,
                tol_angle: 10.0,
                tol_ratio: 0.1,
                corner_eps: 5.0,
                thr_s: 1.2,
            },
            output: OutputConfig::default(),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e: T::Err| ConfigError::InvalidValue {
            key: key.to_string(),
            value: value.to_string(),
            reason: e.to_string(),
        })
}

fn path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

impl PipelineConfig {
    /// Every accepted key, in file order.
    pub const KEYS: &'static [&'static str] = &[
        "occupied_threshold",
        "raster.speckle_max_pixels",
        "raster.frame_margin",
        "raster.line_width",
        "radiography.angle_bins",
        "radiography.offset_bin_size",
        "radiography.peak_threshold_ratio",
        "radiography.nms_radius",
        "prune.thr_e",
        "prune.band_radius",
        "prune.min_free_fraction",
        "matching.mode",
        "matching.tol_angle",
        "matching.tol_ratio",
        "matching.corner_eps",
        "matching.thr_s",
        "output.result",
        "output.pool",
        "output.overlay",
        "output.arrangement",
        "output.render",
    ];

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// Applies `key = value` lines on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut section = String::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: n + 1,
                    text: raw.to_string(),
                });
            };
            let key = if section.is_empty() {
                k.trim().to_string()
            } else {
                format!("{section}.{}", k.trim())
            };
            self.set(&key, v.trim().trim_matches('"'))?;
        }
        self.validate()
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "occupied_threshold" => self.occupied_threshold = parse(key, value)?,
            "raster.speckle_max_pixels" => self.raster.speckle_max_pixels = parse(key, value)?,
            "raster.frame_margin" => self.raster.frame_margin = parse(key, value)?,
            "raster.line_width" => self.raster.line_width = parse(key, value)?,
            "radiography.angle_bins" => self.radiography.angle_bins = parse(key, value)?,
            "radiography.offset_bin_size" => self.radiography.offset_bin_size = parse(key, value)?,
            "radiography.peak_threshold_ratio" => {
                self.radiography.peak_threshold_ratio = parse(key, value)?
            }
            "radiography.nms_radius" => self.radiography.nms_radius = parse(key, value)?,
            "prune.thr_e" => self.prune.thr_e = parse(key, value)?,
            "prune.band_radius" => self.prune.band_radius = parse(key, value)?,
            "prune.min_free_fraction" => self.prune.min_free_fraction = parse(key, value)?,
            "matching.mode" => self.matching.mode = parse(key, value)?,
            "matching.tol_angle" => self.matching.tol_angle = parse(key, value)?,
            "matching.tol_ratio" => self.matching.tol_ratio = parse(key, value)?,
            "matching.corner_eps" => self.matching.corner_eps = parse(key, value)?,
            "matching.thr_s" => self.matching.thr_s = parse(key, value)?,
            "output.result" => self.output.result = path(value),
            "output.pool" => self.output.pool = path(value),
            "output.overlay" => self.output.overlay = path(value),
            "output.arrangement" => self.output.arrangement = path(value),
            "output.render" => self.output.render = path(value),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Checks every numeric setting against its documented range.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, value: String, reason: &str| {
            Err(ConfigError::InvalidValue {
                key: key.to_string(),
                value,
                reason: reason.to_string(),
            })
        };
        let r = &self.radiography;
        if r.angle_bins < 2 {
            return bad(
                "radiography.angle_bins",
                r.angle_bins.to_string(),
                "must be at least 2",
            );
        }
        if !(r.offset_bin_size > 0.0 && r.offset_bin_size.is_finite()) {
            return bad(
                "radiography.offset_bin_size",
                r.offset_bin_size.to_string(),
                "must be positive",
            );
        }
        if !(r.peak_threshold_ratio > 0.0 && r.peak_threshold_ratio <= 1.0) {
            return bad(
                "radiography.peak_threshold_ratio",
                r.peak_threshold_ratio.to_string(),
                "must lie in (0, 1]",
            );
        }
        let p = &self.prune;
        if !(p.thr_e > 0.0 && p.thr_e < 1.0) {
            return bad("prune.thr_e", p.thr_e.to_string(), "must lie in (0, 1)");
        }
        if !(p.band_radius >= 0.0 && p.band_radius.is_finite()) {
            return bad(
                "prune.band_radius",
                p.band_radius.to_string(),
                "must be non-negative",
            );
        }
        if !(0.0..=1.0).contains(&p.min_free_fraction) {
            return bad(
                "prune.min_free_fraction",
                p.min_free_fraction.to_string(),
                "must lie in [0, 1]",
            );
        }
        if !(self.raster.line_width > 0.0 && self.raster.line_width.is_finite()) {
            return bad(
                "raster.line_width",
                self.raster.line_width.to_string(),
                "must be positive",
            );
        }
        let m = &self.matching;
        if !(m.tol_angle >= 0.0) {
            return bad(
                "matching.tol_angle",
                m.tol_angle.to_string(),
                "must be non-negative",
            );
        }
        if !(m.tol_ratio >= 0.0) {
            return bad(
                "matching.tol_ratio",
                m.tol_ratio.to_string(),
                "must be non-negative",
            );
        }
        if !(m.corner_eps >= 0.0 && m.corner_eps < 90.0) {
            return bad(
                "matching.corner_eps",
                m.corner_eps.to_string(),
                "must lie in [0, 90)",
            );
        }
        if !(m.thr_s > 1.0 && m.thr_s.is_finite()) {
            return bad(
                "matching.thr_s",
                m.thr_s.to_string(),
                "must be greater than 1",
            );
        }
        Ok(())
    }

    /// The configuration as a file `apply_text` reads back unchanged.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in Self::KEYS {
            out.push_str(&format!("{key} = {}\n", self.get(key).unwrap_or_default()));
        }
        out
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let p = |v: &Option<PathBuf>| {
            v.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        Some(match key {
            "occupied_threshold" => self.occupied_threshold.to_string(),
            "raster.speckle_max_pixels" => self.raster.speckle_max_pixels.to_string(),
            "raster.frame_margin" => self.raster.frame_margin.to_string(),
            "raster.line_width" => self.raster.line_width.to_string(),
            "radiography.angle_bins" => self.radiography.angle_bins.to_string(),
            "radiography.offset_bin_size" => self.radiography.offset_bin_size.to_string(),
            "radiography.peak_threshold_ratio" => self.radiography.peak_threshold_ratio.to_string(),
            "radiography.nms_radius" => self.radiography.nms_radius.to_string(),
            "prune.thr_e" => self.prune.thr_e.to_string(),
            "prune.band_radius" => self.prune.band_radius.to_string(),
            "prune.min_free_fraction" => self.prune.min_free_fraction.to_string(),
            "matching.mode" => self.matching.mode.to_string(),
            "matching.tol_angle" => self.matching.tol_angle.to_string(),
            "matching.tol_ratio" => self.matching.tol_ratio.to_string(),
            "matching.corner_eps" => self.matching.corner_eps.to_string(),
            "matching.thr_s" => self.matching.thr_s.to_string(),
            "output.result" => p(&self.output.result),
            "output.pool" => p(&self.output.pool),
            "output.overlay" => p(&self.output.overlay),
            "output.arrangement" => p(&self.output.arrangement),
            "output.render" => p(&self.output.render),
            _ => return None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let mut c = PipelineConfig::default();
        c.apply_text(
            "occupied_threshold = 90 # darker\n\n[prune]\nthr_e = 0.1\n[matching]\nmode = exact\n",
        )
        .unwrap();
        assert_eq!(c.occupied_threshold, 90);
        assert_eq!(c.prune.thr_e, 0.1);
        assert_eq!(c.matching.mode, MatchMode::Exact);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_ranges() {
        let mut c = PipelineConfig::default();
        assert_eq!(
            c.apply_text("[prune]\nthr = 0.1\n").unwrap_err(),
            ConfigError::UnknownKey("prune.thr".into())
        );
        assert!(matches!(
            c.apply_text("prune.thr_e = 1.5"),
            Err(ConfigError::InvalidValue { .. })
        ));
        let mut c = PipelineConfig::default();
        assert!(matches!(
            c.apply_text("matching.thr_s = 1"),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            c.apply_text("just words"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            c.set("matching.mode", "fuzzy"),
            Err(ConfigError::InvalidValue { .. })
        ));
    }

    #[test]
    fn text_roundtrip() {
        let mut c = PipelineConfig::default();
        c.set("output.pool", "/tmp/pool.jsonl").unwrap();
        c.set("radiography.nms_radius", "2").unwrap();
        let mut back = PipelineConfig::default();
        back.apply_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
        assert_eq!(c.to_text().lines().count(), PipelineConfig::KEYS.len());
    }
}
