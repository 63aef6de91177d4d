//! End-to-end map interpretation and alignment.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::alignment::{
    generate_hypotheses_exact, generate_hypotheses_ombb, is_plausible, Hypothesis, HypothesisKind,
    MatchTolerances,
};
use crate::arrangement::{
    build_arrangement, prune, restrict_to_interior, Arrangement, ArrangementError, PruneReport,
};
use crate::config::{ConfigError, MatchMode, PipelineConfig};
use crate::geometry::{Trait, Transform2};
use crate::raster::{
    detect_line_traits, distance_map, load_grid, radiography, CellState, DistanceMap,
    OccupancyGrid, RasterError,
};
use crate::scoring::{select_best, ScoringError, Selection};
use crate::vector::{load_line_list, rasterize_segments, segments_to_traits, Segment, VectorError};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Io(String),
    #[error("no traits detected in {0}")]
    NoTraits(String),
    #[error("no faces after pruning in {map}: {reason}")]
    NoFaces { map: String, reason: String },
    #[error("empty hypothesis pool: {0}")]
    EmptyPool(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl PipelineError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::InvalidParameter(_) => 1,
            PipelineError::Io(_) => 2,
            PipelineError::NoTraits(_) => 3,
            PipelineError::NoFaces { .. } => 4,
            PipelineError::EmptyPool(_) => 5,
        }
    }
}

/// A map ready for interpretation.
#[derive(Debug, Clone)]
pub enum MapSource {
    /// Occupancy bitmap; traits are detected.
    Raster(OccupancyGrid),
    /// Wall segments; traits are their supporting lines.
    Lines(Vec<Segment>),
}

/// Line-list files are recognized by a `.txt` or `.lines` extension; anything
/// else is decoded as an image.
pub fn load_map(path: impl AsRef<Path>, cfg: &PipelineConfig) -> Result<MapSource, PipelineError> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("txt") | Some("lines") => match load_line_list(path) {
            Ok(s) => Ok(MapSource::Lines(s)),
            Err(VectorError::Empty) => Err(PipelineError::NoTraits(path.display().to_string())),
            Err(e) => Err(PipelineError::Io(e.to_string())),
        },
        _ => load_grid(path, cfg.occupied_threshold)
            .map(MapSource::Raster)
            .map_err(|e| PipelineError::Io(e.to_string())),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphCounts {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
}

impl GraphCounts {
    fn of(arr: &Arrangement) -> Self {
        Self {
            vertices: arr.prime().vertices().len(),
            edges: arr.prime().edges().len(),
            faces: arr.faces().len(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MapStats {
    pub traits: usize,
    pub before_prune: GraphCounts,
    pub after_prune: GraphCounts,
    /// Faces kept as rooms after dropping the frame cells.
    pub rooms: usize,
}

#[derive(Debug, Clone)]
pub struct Interpretation {
    /// The map as interpreted, padded by the frame margin.
    pub grid: OccupancyGrid,
    pub dmap: DistanceMap,
    pub traits: Vec<Trait>,
    pub unpruned: Arrangement,
    pub pruned: Arrangement,
    /// The pruned faces that are rooms; alignment works on these.
    pub rooms: Arrangement,
    pub prune_report: PruneReport,
    pub stats: MapStats,
    pub seconds: f64,
}

fn no_faces(name: &str, e: ArrangementError) -> PipelineError {
    match e {
        ArrangementError::InvalidParameter(m) => PipelineError::InvalidParameter(m),
        e => PipelineError::NoFaces {
            map: name.to_string(),
            reason: e.to_string(),
        },
    }
}

/// Trait detection, arrangement, pruning, and room extraction for one map.
/// `name` only labels error messages.
pub fn interpret(
    source: &MapSource,
    cfg: &PipelineConfig,
    name: &str,
) -> Result<Interpretation, PipelineError> {
    cfg.validate()?;
    let start = Instant::now();
    let no_traits = || PipelineError::NoTraits(name.to_string());
    let (grid, traits) = match source {
        MapSource::Raster(g) => {
            let grid = g
                .despeckled(cfg.raster.speckle_max_pixels)
                .padded(cfg.raster.frame_margin, CellState::Free);
            if grid.occupied_count() == 0 {
                return Err(no_traits());
            }
            let r = &cfg.radiography;
            let acc = radiography(&grid, r.angle_bins, r.offset_bin_size)
                .map_err(|e| raster_error(e, name))?;
            let traits = detect_line_traits(&acc, r.peak_threshold_ratio, r.nms_radius)
                .map_err(|e| raster_error(e, name))?;
            (grid, traits)
        }
        MapSource::Lines(segs) => {
            let grid = rasterize_segments(segs, cfg.raster.line_width, cfg.raster.frame_margin);
            (grid, segments_to_traits(segs))
        }
    };
    if traits.is_empty() {
        return Err(no_traits());
    }
    let dmap = distance_map(&grid).map_err(|e| raster_error(e, name))?;
    let unpruned = build_arrangement(&traits, grid.bounds()).map_err(|e| no_faces(name, e))?;
    let (pruned, prune_report) = prune(&unpruned, &dmap, cfg.prune.thr_e, cfg.prune.band_radius)
        .map_err(|e| no_faces(name, e))?;
    let rooms = restrict_to_interior(&pruned, &grid, cfg.prune.min_free_fraction);
    let stats = MapStats {
        traits: traits.len(),
        before_prune: GraphCounts::of(&unpruned),
        after_prune: GraphCounts::of(&pruned),
        rooms: rooms.faces().len(),
    };
    if rooms.faces().is_empty() {
        return Err(PipelineError::NoFaces {
            map: name.to_string(),
            reason: "no enclosed room survives pruning".into(),
        });
    }
    Ok(Interpretation {
        grid,
        dmap,
        traits,
        unpruned,
        pruned,
        rooms,
        prune_report,
        stats,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn raster_error(e: RasterError, name: &str) -> PipelineError {
    match e {
        RasterError::EmptyAccumulator | RasterError::NoOccupiedCells => {
            PipelineError::NoTraits(name.to_string())
        }
        RasterError::InvalidParameter(m) => PipelineError::InvalidParameter(m),
        e => PipelineError::Io(format!("{name}: {e}")),
    }
}

pub fn interpret_path(
    path: impl AsRef<Path>,
    cfg: &PipelineConfig,
) -> Result<Interpretation, PipelineError> {
    let path = path.as_ref();
    let source = load_map(path, cfg)?;
    interpret(&source, cfg, &path.display().to_string())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub interpret_map1: f64,
    pub interpret_map2: f64,
    pub hypotheses: f64,
    pub rejection: f64,
    pub scoring: f64,
    pub total: f64,
}

/// One entry of the hypothesis pool, rejected or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub hypothesis: Hypothesis,
    pub kept: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub mode: MatchMode,
    pub map1: MapStats,
    pub map2: MapStats,
    pub initial_hypotheses: usize,
    pub kept_hypotheses: usize,
    /// Takes map 1 coordinates into map 2.
    pub transform: Transform2,
    pub score: f64,
    pub low_confidence: bool,
    pub winner_source_face: usize,
    pub winner_target_face: usize,
    pub winner_shift: usize,
    pub timings: Timings,
}

#[derive(Debug, Clone)]
pub struct AlignmentResult {
    pub report: AlignmentReport,
    pub pool: Vec<PoolEntry>,
    pub selection: Selection,
    pub map1: Interpretation,
    pub map2: Interpretation,
}

/// Interprets both maps concurrently and aligns map 1 onto map 2.
pub fn align(
    map1: &MapSource,
    map2: &MapSource,
    cfg: &PipelineConfig,
) -> Result<AlignmentResult, PipelineError> {
    cfg.validate()?;
    let start = Instant::now();
    let (i1, i2) = rayon::join(
        || interpret(map1, cfg, "map1"),
        || interpret(map2, cfg, "map2"),
    );
    let (i1, i2) = (i1?, i2?);
    align_interpreted(i1, i2, cfg, start)
}

pub fn align_paths(
    path1: impl AsRef<Path>,
    path2: impl AsRef<Path>,
    cfg: &PipelineConfig,
) -> Result<AlignmentResult, PipelineError> {
    cfg.validate()?;
    let start = Instant::now();
    let (p1, p2) = (path1.as_ref(), path2.as_ref());
    let (i1, i2) = rayon::join(|| interpret_path(p1, cfg), || interpret_path(p2, cfg));
    let (i1, i2) = (i1?, i2?);
    align_interpreted(i1, i2, cfg, start)
}

fn align_interpreted(
    i1: Interpretation,
    i2: Interpretation,
    cfg: &PipelineConfig,
    start: Instant,
) -> Result<AlignmentResult, PipelineError> {
    let m = &cfg.matching;
    let t = Instant::now();
    let hyps = match m.mode {
        MatchMode::Ombb => generate_hypotheses_ombb(&i1.rooms, &i2.rooms),
        MatchMode::Exact => {
            let tol = MatchTolerances {
                angle: m.tol_angle.to_radians(),
                ratio: m.tol_ratio,
                corner: m.corner_eps.to_radians(),
            };
            generate_hypotheses_exact(&i1.rooms, &i2.rooms, &tol)
        }
    };
    let hypotheses = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let kept_mask: Vec<bool> = hyps.iter().map(|h| is_plausible(h, m.thr_s)).collect();
    let kept: Vec<Hypothesis> = hyps
        .iter()
        .zip(&kept_mask)
        .filter(|(_, k)| **k)
        .map(|(h, _)| h.clone())
        .collect();
    let rejection = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let selection = select_best(&i1.rooms, &i2.rooms, &kept).map_err(|e| match e {
        ScoringError::EmptyPool => PipelineError::EmptyPool(format!(
            "{} of {} hypotheses rejected ({} and {} rooms)",
            hyps.len(),
            hyps.len(),
            i1.rooms.faces().len(),
            i2.rooms.faces().len()
        )),
    })?;
    let scoring = t.elapsed().as_secs_f64();

    let mut scored = selection.pool.iter();
    let pool: Vec<PoolEntry> = hyps
        .into_iter()
        .zip(&kept_mask)
        .map(|(h, &k)| PoolEntry {
            hypothesis: if k {
                scored
                    .next()
                    .expect("one score per kept hypothesis")
                    .clone()
            } else {
                h
            },
            kept: k,
        })
        .collect();

    let w = selection.winning_hypothesis();
    let report = AlignmentReport {
        mode: m.mode,
        map1: i1.stats,
        map2: i2.stats,
        initial_hypotheses: pool.len(),
        kept_hypotheses: kept.len(),
        transform: w.transform,
        score: selection.winner.score,
        low_confidence: selection.low_confidence,
        winner_source_face: w.source_face,
        winner_target_face: w.target_face,
        winner_shift: w.shift,
        timings: Timings {
            interpret_map1: i1.seconds,
            interpret_map2: i2.seconds,
            hypotheses,
            rejection,
            scoring,
            total: start.elapsed().as_secs_f64(),
        },
    };
    Ok(AlignmentResult {
        report,
        pool,
        selection,
        map1: i1,
        map2: i2,
    })
}

fn stats_lines(out: &mut String, prefix: &str, s: &MapStats) {
    let _ = writeln!(out, "{prefix}.traits = {}", s.traits);
    for (stage, c) in [
        ("before_prune", s.before_prune),
        ("after_prune", s.after_prune),
    ] {
        let _ = writeln!(out, "{prefix}.{stage}.vertices = {}", c.vertices);
        let _ = writeln!(out, "{prefix}.{stage}.edges = {}", c.edges);
        let _ = writeln!(out, "{prefix}.{stage}.faces = {}", c.faces);
    }
    let _ = writeln!(out, "{prefix}.rooms = {}", s.rooms);
}

impl AlignmentReport {
    /// `key = value` result document. Timings come last, under `timing.`.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        let t = &self.transform;
        let m = t.to_row_major();
        let tr = t.translation_part();
        let sc = crate::geometry::decompose_scales(t);
        let _ = writeln!(out, "status = ok");
        let _ = writeln!(out, "mode = {}", self.mode);
        let _ = writeln!(
            out,
            "transform = {}",
            m.iter()
                .map(|v| format!("{v:?}"))
                .collect::<Vec<_>>()
                .join(" ")
        );
        let _ = writeln!(out, "score = {:?}", self.score);
        let _ = writeln!(out, "low_confidence = {}", self.low_confidence);
        let _ = writeln!(out, "scale = {:?}", t.mean_scale());
        let _ = writeln!(out, "scale_x = {:?}", sc.s_x);
        let _ = writeln!(out, "scale_y = {:?}", sc.s_y);
        let _ = writeln!(out, "rotation_deg = {:?}", t.rotation_angle().to_degrees());
        let _ = writeln!(out, "translation = {:?} {:?}", tr.x, tr.y);
        let _ = writeln!(out, "winner.source_face = {}", self.winner_source_face);
        let _ = writeln!(out, "winner.target_face = {}", self.winner_target_face);
        let _ = writeln!(out, "winner.shift = {}", self.winner_shift);
        let _ = writeln!(out, "hypotheses.initial = {}", self.initial_hypotheses);
        let _ = writeln!(out, "hypotheses.after_rejection = {}", self.kept_hypotheses);
        stats_lines(&mut out, "map1", &self.map1);
        stats_lines(&mut out, "map2", &self.map2);
        let tm = &self.timings;
        for (k, v) in [
            ("interpret_map1", tm.interpret_map1),
            ("interpret_map2", tm.interpret_map2),
            ("hypotheses", tm.hypotheses),
            ("rejection", tm.rejection),
            ("scoring", tm.scoring),
            ("total", tm.total),
        ] {
            let _ = writeln!(out, "timing.{k}_s = {v:.6}");
        }
        out
    }
}

#[derive(Serialize)]
struct PoolRecord {
    source_face: usize,
    target_face: usize,
    shift: usize,
    kind: HypothesisKind,
    transform: [f64; 9],
    s_x: f64,
    s_y: f64,
    reflection: bool,
    kept: bool,
    score: Option<f64>,
}

/// Hypothesis pool as JSON lines, in generation order.
pub fn pool_to_jsonl(pool: &[PoolEntry]) -> String {
    let mut out = String::new();
    for e in pool {
        let h = &e.hypothesis;
        let rec = PoolRecord {
            source_face: h.source_face,
            target_face: h.target_face,
            shift: h.shift,
            kind: h.kind,
            transform: h.transform.to_row_major(),
            s_x: h.scales.s_x,
            s_y: h.scales.s_y,
            reflection: h.scales.reflection,
            kept: e.kept,
            score: h.score,
        };
        out.push_str(&serde_json::to_string(&rec).expect("pool records serialize"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::parse_line_list;

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            PipelineError::Io(String::new()).exit_code(),
            PipelineError::NoTraits(String::new()).exit_code(),
            PipelineError::NoFaces {
                map: String::new(),
                reason: String::new(),
            }
            .exit_code(),
            PipelineError::EmptyPool(String::new()).exit_code(),
        ];
        assert_eq!(codes, [2, 3, 4, 5]);
    }

    #[test]
    fn square_line_list_has_one_room() {
        let segs = parse_line_list("10 10 60 10\n60 10 60 50\n60 50 10 50\n10 50 10 10\n").unwrap();
        let i = interpret(
            &MapSource::Lines(segs),
            &PipelineConfig::default(),
            "square",
        )
        .unwrap();
        assert_eq!(i.stats.traits, 4);
        assert_eq!(i.stats.rooms, 1);
        assert!((i.rooms.face(0).area() - 2000.0).abs() < 1e-6);
    }

    #[test]
    fn blank_raster_has_no_traits() {
        let g = OccupancyGrid::filled(50, 40, CellState::Free).unwrap();
        let e = interpret(&MapSource::Raster(g), &PipelineConfig::default(), "blank").unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn pool_document_has_one_line_per_hypothesis() {
        let segs =
            parse_line_list("10 10 90 10\n90 10 90 50\n90 50 10 50\n10 50 10 10\n50 10 50 50\n")
                .unwrap();
        let src = MapSource::Lines(segs);
        let r = align(&src, &src, &PipelineConfig::default()).unwrap();
        assert_eq!(r.report.initial_hypotheses, 4 * 2 * 2);
        assert_eq!(
            pool_to_jsonl(&r.pool).lines().count(),
            r.report.initial_hypotheses
        );
        assert!(r.report.score > 0.999);
    }
}
