use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mapalign::arrangement::ArrangementDump;
use mapalign::config::{MatchMode, PipelineConfig};
use mapalign::pipeline::{self, MapStats, PipelineError};
use mapalign::render;

/// Align two 2D maps (occupancy bitmaps or wall line lists) by matching the
/// regions of their line arrangements.
#[derive(Parser)]
#[command(name = "mapalign", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the similarity transform taking map1 onto map2.
    Align(AlignArgs),
    /// Decompose one map into rooms and dump the arrangement.
    Interpret(InterpretArgs),
}

#[derive(Args)]
struct Common {
    /// Config file of `key = value` lines, optionally under `[section]`s.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pruning threshold on the normalized distance map.
    #[arg(long)]
    thr_e: Option<f64>,
    /// Override any config key, e.g. `--set radiography.nms_radius=4`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct AlignArgs {
    map1: PathBuf,
    map2: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Face matching: `ombb` (bounding boxes) or `exact` (shape descriptors).
    #[arg(long)]
    mode: Option<MatchMode>,
    /// Scale-ratio bound for rejecting hypotheses.
    #[arg(long)]
    thr_s: Option<f64>,
    /// Result document path; printed to stdout as well.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Hypothesis pool as JSON lines.
    #[arg(long)]
    dump_pool: Option<PathBuf>,
    /// PNG of map1 warped onto map2.
    #[arg(long)]
    overlay: Option<PathBuf>,
}

#[derive(Args)]
struct InterpretArgs {
    map: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Arrangement dump (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
    /// PNG of the map with its pruned faces colored.
    #[arg(long)]
    render: Option<PathBuf>,
}

fn load_config(c: &Common) -> Result<PipelineConfig, PipelineError> {
    let mut cfg = match &c.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(v) = c.thr_e {
        cfg.prune.thr_e = v;
    }
    for kv in &c.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| {
            PipelineError::InvalidParameter(format!("--set expects KEY=VALUE, got {kv:?}"))
        })?;
        cfg.set(k.trim(), v.trim())?;
    }
    Ok(cfg)
}

fn write(path: &Path, data: &[u8]) -> Result<(), PipelineError> {
    std::fs::write(path, data)
        .map_err(|e| PipelineError::Io(format!("cannot write {}: {e}", path.display())))
}

fn run_align(a: AlignArgs) -> Result<(), PipelineError> {
    let mut cfg = load_config(&a.common)?;
    if let Some(m) = a.mode {
        cfg.matching.mode = m;
    }
    if let Some(v) = a.thr_s {
        cfg.matching.thr_s = v;
    }
    cfg.output.result = a.out.or(cfg.output.result);
    cfg.output.pool = a.dump_pool.or(cfg.output.pool);
    cfg.output.overlay = a.overlay.or(cfg.output.overlay);
    cfg.validate()?;

    let r = pipeline::align_paths(&a.map1, &a.map2, &cfg)?;
    let doc = r.report.to_document();
    print!("{doc}");
    if r.report.low_confidence {
        log::warn!("every hypothesis scored zero; the winner is arbitrary");
    }
    if let Some(p) = &cfg.output.result {
        write(p, doc.as_bytes())?;
    }
    if let Some(p) = &cfg.output.pool {
        write(p, pipeline::pool_to_jsonl(&r.pool).as_bytes())?;
    }
    if let Some(p) = &cfg.output.overlay {
        let img = render::render_overlay(&r.map1.grid, &r.map2.grid, &r.report.transform)
            .map_err(|e| PipelineError::InvalidParameter(e.to_string()))?;
        render::save_png(&img, p).map_err(PipelineError::Io)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct InterpretDump {
    stats: MapStats,
    pruned: ArrangementDump,
    rooms: ArrangementDump,
}

fn run_interpret(a: InterpretArgs) -> Result<(), PipelineError> {
    let mut cfg = load_config(&a.common)?;
    cfg.output.arrangement = a.out.or(cfg.output.arrangement);
    cfg.output.render = a.render.or(cfg.output.render);
    cfg.validate()?;

    let i = pipeline::interpret_path(&a.map, &cfg)?;
    let s = &i.stats;
    println!("traits = {}", s.traits);
    println!(
        "before_prune = {} vertices, {} edges, {} faces",
        s.before_prune.vertices, s.before_prune.edges, s.before_prune.faces
    );
    println!(
        "after_prune = {} vertices, {} edges, {} faces",
        s.after_prune.vertices, s.after_prune.edges, s.after_prune.faces
    );
    println!("rooms = {}", s.rooms);
    for (k, f) in i.rooms.faces().iter().enumerate() {
        let c = f.centroid();
        println!(
            "room.{k} = area {:.1} centroid {:.2} {:.2}",
            f.area(),
            c.x,
            c.y
        );
    }
    if let Some(p) = &cfg.output.arrangement {
        let dump = InterpretDump {
            stats: i.stats,
            pruned: ArrangementDump::from(&i.pruned),
            rooms: ArrangementDump::from(&i.rooms),
        };
        let json = serde_json::to_string_pretty(&dump).expect("dump serializes");
        write(p, json.as_bytes())?;
    }
    if let Some(p) = &cfg.output.render {
        render::save_png(&render::render_faces(&i.grid, &i.pruned), p)
            .map_err(PipelineError::Io)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Align(a) => run_align(a),
        Command::Interpret(a) => run_interpret(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
