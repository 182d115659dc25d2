use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use urbanlos_ffi::*;

fn small_config() -> UlGenConfig {
    UlGenConfig {
        area: 40_000.0,
        n_trees: 20,
        n_lights: 20,
        n_gu: 10,
        seed: 7,
        ..ul_gen_config_default()
    }
}

const URBAN: UlParams = UlParams {
    alpha: 0.3,
    beta: 500.0,
    gamma: 15.0,
};

fn last_error() -> String {
    unsafe { CStr::from_ptr(ul_last_error()) }.to_string_lossy().into_owned()
}

fn empty_fit() -> UlFit {
    UlFit {
        a: 0.0,
        b: 0.0,
        rmse: 0.0,
        n_points: 0,
    }
}

#[test]
fn layout_lifecycle_and_json_round_trip() {
    let cfg = small_config();
    let mut layout = ptr::null_mut();
    assert_eq!(unsafe { ul_layout_generate(URBAN, &cfg, 0, &mut layout) }, UlStatus::Ok);
    assert!(!layout.is_null());

    let mut counts = UlLayoutCounts {
        buildings: 0,
        trees: 0,
        lights: 0,
        users: 0,
    };
    assert_eq!(unsafe { ul_layout_counts(layout, &mut counts) }, UlStatus::Ok);
    assert_eq!(counts.buildings, 20);
    assert_eq!((counts.trees, counts.lights, counts.users), (20, 20, 10));

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { ul_layout_to_json(layout, &mut json) }, UlStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { ul_layout_from_json(json, &mut back) }, UlStatus::Ok);
    let mut json2 = ptr::null_mut();
    assert_eq!(unsafe { ul_layout_to_json(back, &mut json2) }, UlStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(json) }, unsafe { CStr::from_ptr(json2) });

    unsafe {
        ul_string_free(json);
        ul_string_free(json2);
        ul_layout_free(back);
        ul_layout_free(layout);
        ul_layout_free(ptr::null_mut());
    }
}

#[test]
fn bad_inputs_return_codes() {
    let cfg = small_config();
    let mut layout = ptr::null_mut();
    let bad = UlParams { alpha: 1.5, ..URBAN };
    assert_eq!(unsafe { ul_layout_generate(bad, &cfg, 0, &mut layout) }, UlStatus::Domain);
    assert!(layout.is_null());
    assert!(last_error().contains("alpha"));

    assert_eq!(
        unsafe { ul_layout_generate(URBAN, ptr::null(), 0, &mut layout) },
        UlStatus::NullPointer
    );

    let garbage = CString::new("{not json").unwrap();
    assert_eq!(unsafe { ul_layout_from_json(garbage.as_ptr(), &mut layout) }, UlStatus::Domain);

    let mut fit = empty_fit();
    let d = [10.0, 10.0];
    let pl = [80.0, 81.0];
    assert_eq!(
        unsafe { ul_fit_ab(d.as_ptr(), pl.as_ptr(), 2, &mut fit) },
        UlStatus::RankDeficient
    );
    assert_eq!(
        unsafe { ul_fit_ab(ptr::null(), pl.as_ptr(), 2, &mut fit) },
        UlStatus::NullPointer
    );
}

#[test]
fn link_classification_and_user_access() {
    let cfg = small_config();
    let mut layout = ptr::null_mut();
    assert_eq!(unsafe { ul_layout_generate(URBAN, &cfg, 0, &mut layout) }, UlStatus::Ok);
    let (mut x, mut y, mut h) = (0.0, 0.0, 0.0);
    assert_eq!(unsafe { ul_layout_user(layout, 0, &mut x, &mut y, &mut h) }, UlStatus::Ok);
    assert_eq!(h, 1.5);
    assert_eq!(unsafe { ul_layout_user(layout, 99, &mut x, &mut y, &mut h) }, UlStatus::Domain);

    let mut class = UlLinkClass::NlosBuilding;
    // ABS 10 cm away and 1 km up: nothing is taller than the line.
    let st = unsafe { ul_classify_link(layout, x + 0.1, y, 1000.0, x, y, h, &mut class) };
    assert_eq!(st, UlStatus::Ok);
    assert_eq!(class, UlLinkClass::Los);
    let st = unsafe { ul_classify_link(layout, x, y, 100.0, x, y, h, &mut class) };
    assert_eq!(st, UlStatus::DegenerateLink);
    unsafe { ul_layout_free(layout) };
}

#[test]
fn path_loss_values() {
    let mut v = 0.0;
    assert_eq!(unsafe { ul_fspl(100.0, &mut v) }, UlStatus::Ok);
    assert!((v - 101.4).abs() < 1e-12);
    assert_eq!(unsafe { ul_pl_nlos_building(100.0, &mut v) }, UlStatus::Ok);
    assert!((v - 130.4).abs() < 1e-12);
    let veg = ul_veg_params_default();
    assert_eq!(unsafe { ul_veg_attenuation(&veg, 100.0, 5.0, 2.0, 1.0, &mut v) }, UlStatus::Ok);
    assert!((v - 7.79187510131423).abs() < 1e-6);

    let d = [10.0_f64, 100.0, 1000.0];
    let pl: Vec<f64> = d.iter().map(|d| 40.0 + 30.0 * d.log10()).collect();
    let mut fit = empty_fit();
    assert_eq!(unsafe { ul_fit_ab(d.as_ptr(), pl.as_ptr(), 3, &mut fit) }, UlStatus::Ok);
    assert!((fit.a - 40.0).abs() < 1e-9);
    assert!((fit.b - 3.0).abs() < 1e-9);
    assert_eq!(fit.n_points, 3);
}

#[test]
fn plos_curve_matches_core() {
    let cfg = small_config();
    let angles = [10.0, 45.0, 90.0];
    let mut p = [0.0; 3];
    let st = unsafe {
        ul_plos_curve(URBAN, &cfg, 2, angles.as_ptr(), 3, UlScenario::Full, p.as_mut_ptr())
    };
    assert_eq!(st, UlStatus::Ok, "{}", last_error());
    let core = urbanlos::run_sweep(
        &urbanlos::BuiltUpParams::URBAN,
        &urbanlos::GenConfig {
            area: 40_000.0,
            n_trees: 20,
            n_lights: 20,
            n_gu: 10,
            seed: 7,
            ..Default::default()
        },
        &urbanlos::SweepConfig {
            n_cities: 2,
            angles: angles.to_vec(),
            scenarios: vec![urbanlos::Scenario::full()],
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(p.to_vec(), core.results[0].curve.p_los());
}

#[test]
fn header_is_current_and_compiles_as_c() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/urbanlos.h")).unwrap();
    for sym in [
        "ul_layout_generate",
        "ul_layout_free",
        "ul_classify_link",
        "ul_fit_ab",
        "ul_plos_curve",
        "UL_STATUS_INFEASIBLE",
        "typedef struct UlLayout UlLayout;",
        "size_t n_gu;",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
    let Some(cc) = find_cc() else {
        eprintln!("no C compiler found; skipping compile check");
        return;
    };
    let out = std::env::temp_dir().join(format!("urbanlos_smoke_{}.o", std::process::id()));
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-c"])
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg("-o")
        .arg(&out)
        .status()
        .unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(status.success());
}

fn find_cc() -> Option<&'static str> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
}
