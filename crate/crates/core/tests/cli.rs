use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mapalign::geometry::{Point2, Rect, Transform2};
use mapalign::raster::save_grid;
use mapalign::synth::{generate_floor_plan, render_plan, FloorPlan, FloorPlanParams};
use mapalign::vector::Segment;
use rand::SeedableRng;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mapalign"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value<'a>(doc: &'a str, key: &str) -> &'a str {
    doc.lines()
        .find_map(|l| {
            l.strip_prefix(key)?
                .trim_start()
                .strip_prefix('=')
                .map(str::trim)
        })
        .unwrap_or_else(|| panic!("{key} missing from\n{doc}"))
}

/// Writes the plan, shifted to leave a 20 px margin, as a PNG with origin 0.
fn save_plan(plan: &FloorPlan, path: &Path) {
    let plan = plan.transformed(&Transform2::translation(Point2::new(
        20.0 - plan.bounds.min.x,
        20.0 - plan.bounds.min.y,
    )));
    let canvas = Rect::new(
        Point2::new(0.0, 0.0),
        plan.bounds.max + Point2::new(20.0, 20.0),
    );
    save_grid(&render_plan(&plan, canvas, 3.0), path).unwrap();
}

fn office(seed: u64, rows: usize, cols: usize) -> FloorPlan {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    generate_floor_plan(
        &mut rng,
        &FloorPlanParams {
            rows,
            cols,
            ..Default::default()
        },
    )
}

fn tmp(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn self_alignment_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let map = tmp(&dir, "office.png");
    save_plan(&office(3, 2, 2), &map);
    let out = tmp(&dir, "result.txt");
    let pool = tmp(&dir, "pool.jsonl");
    let overlay = tmp(&dir, "overlay.png");
    let o = run(&[
        "align",
        s(&map),
        s(&map),
        "--out",
        s(&out),
        "--dump-pool",
        s(&pool),
        "--overlay",
        s(&overlay),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = std::fs::read_to_string(&out).unwrap();
    assert_eq!(doc, stdout(&o));
    assert!(value(&doc, "score").parse::<f64>().unwrap() >= 0.99);
    let t: Vec<f64> = value(&doc, "transform")
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    let id = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
    for (a, b) in t.iter().zip(id) {
        assert!((a - b).abs() < 1e-6, "{t:?}");
    }
    let rooms: usize = value(&doc, "map1.rooms").parse().unwrap();
    let initial: usize = value(&doc, "hypotheses.initial").parse().unwrap();
    assert_eq!(initial, 4 * rooms * rooms);
    let pool = std::fs::read_to_string(&pool).unwrap();
    assert_eq!(pool.lines().count(), initial);
    let kept = pool
        .lines()
        .filter(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["kept"] == true)
        .count();
    assert_eq!(kept.to_string(), value(&doc, "hypotheses.after_rejection"));
    assert!(image::open(&overlay).is_ok());
}

#[test]
fn repeated_runs_give_identical_documents() {
    let dir = tempfile::tempdir().unwrap();
    let (m1, m2) = (tmp(&dir, "a.png"), tmp(&dir, "b.png"));
    let plan = office(11, 2, 3);
    save_plan(&plan, &m1);
    save_plan(
        &plan.transformed(&Transform2::similarity(1.2, 0.3, Point2::new(0.0, 0.0))),
        &m2,
    );
    let strip = |o: &Output| -> String {
        assert_eq!(code(o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        stdout(o)
            .lines()
            .filter(|l| !l.starts_with("timing."))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let serial = bin()
        .args(["align", s(&m1), s(&m2)])
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap();
    let wide = bin()
        .args(["align", s(&m1), s(&m2)])
        .env("RAYON_NUM_THREADS", "16")
        .output()
        .unwrap();
    let again = run(&["align", s(&m1), s(&m2)]);
    assert_eq!(strip(&serial), strip(&wide));
    assert_eq!(strip(&serial), strip(&again));
}

#[test]
fn corridor_against_offices_has_empty_pool() {
    let dir = tempfile::tempdir().unwrap();
    // one closed 160 x 50 corridor with a wide free surrounding
    let c = [(60.0, 60.0), (220.0, 60.0), (220.0, 110.0), (60.0, 110.0)];
    let walls = (0..4)
        .map(|k| {
            let (a, b) = (c[k], c[(k + 1) % 4]);
            Segment::new(Point2::new(a.0, a.1), Point2::new(b.0, b.1))
        })
        .collect();
    let plan = FloorPlan {
        rooms: Vec::new(),
        walls,
        bounds: Rect::new(Point2::new(60.0, 60.0), Point2::new(220.0, 110.0)),
    };
    let corridor = tmp(&dir, "corridor.png");
    save_grid(&render_plan(&plan, plan.canvas(60.0), 3.0), &corridor).unwrap();
    let o = run(&["interpret", s(&corridor)]);
    assert_eq!(value(&stdout(&o), "rooms"), "1");
    let offices = tmp(&dir, "offices.png");
    save_plan(&office(5, 2, 2), &offices);
    let o = run(&["align", s(&corridor), s(&offices)]);
    assert_eq!(code(&o), 5);
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty hypothesis pool"));
}

#[test]
fn interpret_two_rooms() {
    let dir = tempfile::tempdir().unwrap();
    let map = tmp(&dir, "two.png");
    save_plan(&office(2, 1, 2), &map);
    let dump = tmp(&dir, "dump.json");
    let png = tmp(&dir, "faces.png");
    let o = run(&["interpret", s(&map), "--out", s(&dump), "--render", s(&png)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(value(&stdout(&o), "rooms"), "2");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(json["rooms"]["faces"].as_array().unwrap().len(), 2);
    assert!(image::open(&png).is_ok());
}

#[test]
fn interpret_line_list_square() {
    let dir = tempfile::tempdir().unwrap();
    let square = tmp(&dir, "square.lines");
    std::fs::write(&square, "0 0 50 0\n50 0 50 50\n50 50 0 50\n0 50 0 0\n").unwrap();
    let o = run(&["interpret", s(&square)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(value(&out, "traits"), "4");
    assert_eq!(value(&out, "rooms"), "1");
    // the frame cells around the square are faces too
    assert!(value(&out, "before_prune").ends_with("9 faces"));
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let blank = tmp(&dir, "blank.pgm");
    let g =
        mapalign::raster::OccupancyGrid::filled(60, 40, mapalign::raster::CellState::Free).unwrap();
    save_grid(&g, &blank).unwrap();
    assert_eq!(code(&run(&["interpret", s(&blank)])), 3);

    let missing = tmp(&dir, "missing.png");
    let o = run(&["interpret", s(&missing)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.png"));

    let bad = tmp(&dir, "bad.png");
    std::fs::write(&bad, b"not an image").unwrap();
    assert_eq!(code(&run(&["interpret", s(&bad)])), 2);

    // two parallel walls bound no room
    let parallel = tmp(&dir, "parallel.txt");
    std::fs::write(&parallel, "0 0 100 0\n0 30 100 30\n").unwrap();
    assert_eq!(code(&run(&["interpret", s(&parallel)])), 4);

    let square = tmp(&dir, "square.txt");
    std::fs::write(&square, "0 0 50 0\n50 0 50 50\n50 50 0 50\n0 50 0 0\n").unwrap();
    assert_eq!(
        code(&run(&["interpret", s(&square), "--set", "prune.nope=1"])),
        1
    );
    assert_eq!(code(&run(&["interpret", s(&square), "--thr-e", "1.5"])), 1);
    assert_eq!(
        code(&run(&["align", s(&square), s(&square), "--thr-s", "0.5"])),
        1
    );
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tmp(&dir, "run.cfg");
    std::fs::write(&cfg, "[matching]\nmode = exact\n").unwrap();
    let square = tmp(&dir, "rooms.txt");
    std::fs::write(
        &square,
        "0 0 80 0\n80 0 80 40\n80 40 0 40\n0 40 0 0\n40 0 40 14\n40 26 40 40\n",
    )
    .unwrap();
    let o = run(&["align", s(&square), s(&square), "--config", s(&cfg)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(value(&stdout(&o), "mode"), "exact");
    let o = run(&[
        "align",
        s(&square),
        s(&square),
        "--config",
        s(&cfg),
        "--mode",
        "ombb",
    ]);
    assert_eq!(value(&stdout(&o), "mode"), "ombb");
}
