use std::ffi::{CStr, CString};
use std::ptr;

use mapalign_ffi::*;

fn two_rooms() -> Vec<f64> {
    vec![
        0.0, 0.0, 80.0, 0.0, //
        80.0, 0.0, 80.0, 40.0, //
        80.0, 40.0, 0.0, 40.0, //
        0.0, 40.0, 0.0, 0.0, //
        40.0, 0.0, 40.0, 17.0, //
        40.0, 23.0, 40.0, 40.0,
    ]
}

fn segments(coords: &[f64]) -> *mut MaMap {
    let mut map = ptr::null_mut();
    let st = unsafe { ma_map_from_segments(coords.as_ptr(), coords.len() / 4, &mut map) };
    assert_eq!(st, MaStatus::Ok);
    assert!(!map.is_null());
    map
}

fn last_error() -> Option<String> {
    let p = ma_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

#[test]
fn self_alignment_through_the_c_interface() {
    let map = segments(&two_rooms());
    let cfg = ma_config_new();
    let mut rooms = 0;
    assert_eq!(
        unsafe { ma_map_count_rooms(map, cfg, &mut rooms) },
        MaStatus::Ok
    );
    assert_eq!(rooms, 2);

    let mut a = ptr::null_mut();
    assert_eq!(unsafe { ma_align(map, map, cfg, &mut a) }, MaStatus::Ok);
    assert!(last_error().is_none());
    let mut t = [0.0; 9];
    assert_eq!(
        unsafe { ma_alignment_transform(a, t.as_mut_ptr()) },
        MaStatus::Ok
    );
    let id = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
    for (x, y) in t.iter().zip(id) {
        assert!((x - y).abs() < 1e-6, "{t:?}");
    }
    assert!(unsafe { ma_alignment_score(a) } > 0.99);
    assert!(!unsafe { ma_alignment_low_confidence(a) });

    let (mut initial, mut kept) = (0, 0);
    assert_eq!(
        unsafe { ma_alignment_hypotheses(a, &mut initial, &mut kept) },
        MaStatus::Ok
    );
    assert_eq!(initial, 16);
    assert!(kept >= 1 && kept <= initial);
    let (mut r1, mut r2) = (0, 0);
    unsafe { ma_alignment_rooms(a, &mut r1, &mut r2) };
    assert_eq!((r1, r2), (2, 2));

    let doc = unsafe { ma_alignment_document(a) };
    let text = unsafe { CStr::from_ptr(doc) }.to_str().unwrap().to_owned();
    assert!(text.starts_with("status = ok\n"));
    assert!(text.contains("hypotheses.initial = 16\n"));
    unsafe { ma_string_free(doc) };

    let pool = unsafe { ma_alignment_pool_jsonl(a) };
    let lines = unsafe { CStr::from_ptr(pool) }
        .to_str()
        .unwrap()
        .lines()
        .count();
    assert_eq!(lines, initial);
    unsafe {
        ma_string_free(pool);
        ma_alignment_free(a);
        ma_map_free(map);
        ma_config_free(cfg);
    }
}

#[test]
fn config_values_round_trip() {
    let cfg = ma_config_new();
    let key = CString::new("prune.thr_e").unwrap();
    let value = CString::new("0.2").unwrap();
    assert_eq!(
        unsafe { ma_config_set(cfg, key.as_ptr(), value.as_ptr()) },
        MaStatus::Ok
    );
    let got = unsafe { ma_config_get(cfg, key.as_ptr()) };
    assert_eq!(
        unsafe { CStr::from_ptr(got) }
            .to_str()
            .unwrap()
            .parse::<f64>()
            .unwrap(),
        0.2
    );
    unsafe { ma_string_free(got) };

    let bad = CString::new("prune.nope").unwrap();
    assert_eq!(
        unsafe { ma_config_set(cfg, bad.as_ptr(), value.as_ptr()) },
        MaStatus::Config
    );
    assert!(last_error().unwrap().contains("prune.nope"));
    assert!(unsafe { ma_config_get(cfg, bad.as_ptr()) }.is_null());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "[matching]\nmode = exact\n").unwrap();
    let p = CString::new(path.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { ma_config_load(cfg, p.as_ptr()) }, MaStatus::Ok);
    let mode = CString::new("matching.mode").unwrap();
    let got = unsafe { ma_config_get(cfg, mode.as_ptr()) };
    assert_eq!(unsafe { CStr::from_ptr(got) }.to_str().unwrap(), "exact");
    unsafe { ma_string_free(got) };

    let missing = CString::new(dir.path().join("none.cfg").to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { ma_config_load(cfg, missing.as_ptr()) },
        MaStatus::Io
    );
    unsafe { ma_config_free(cfg) };
}

#[test]
fn failures_report_status_and_message() {
    let mut map = ptr::null_mut();
    assert_eq!(
        unsafe { ma_map_from_segments(ptr::null(), 3, &mut map) },
        MaStatus::InvalidArgument
    );
    assert!(map.is_null());
    assert!(last_error().unwrap().contains("null"));

    // parallel walls enclose nothing
    let parallel = segments(&[0.0, 0.0, 100.0, 0.0, 0.0, 30.0, 100.0, 30.0]);
    let mut rooms = 0;
    assert_eq!(
        unsafe { ma_map_count_rooms(parallel, ptr::null(), &mut rooms) },
        MaStatus::NoFaces
    );
    assert!(last_error().is_some());

    let blank = vec![255u8; 60 * 40];
    let mut raster = ptr::null_mut();
    assert_eq!(
        unsafe { ma_map_from_gray(60, 40, blank.as_ptr(), 100, &mut raster) },
        MaStatus::Ok
    );
    let mut a = ptr::null_mut();
    assert_eq!(
        unsafe { ma_align(raster, parallel, ptr::null(), &mut a) },
        MaStatus::NoTraits
    );
    assert!(a.is_null());

    let path = CString::new("/nonexistent/map.png").unwrap();
    assert_eq!(
        unsafe { ma_map_load(path.as_ptr(), ptr::null(), &mut map) },
        MaStatus::Io
    );
    assert!(last_error().unwrap().contains("map.png"));

    // a successful call clears the message
    let ok = segments(&two_rooms());
    assert!(last_error().is_none());
    assert!(unsafe { ma_alignment_score(ptr::null()) }.is_nan());
    assert!(unsafe { ma_alignment_document(ptr::null()) }.is_null());
    unsafe {
        ma_map_free(ok);
        ma_map_free(raster);
        ma_map_free(parallel);
        ma_map_free(ptr::null_mut());
    }
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(ma_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
