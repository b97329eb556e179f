use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use multiclosure_ffi::*;

fn last_error() -> String {
    let p = mcl_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn example() -> *mut McNetwork {
    let counts = [10u64, 6, 5, 4, 8, 0];
    let mut net = ptr::null_mut();
    let status = unsafe { mcl_network_from_dyad_counts(4, counts.as_ptr(), counts.len(), &mut net) };
    assert_eq!(status, McStatus::Ok);
    net
}

#[test]
fn statistics_through_the_c_interface() {
    let net = example();
    unsafe {
        assert_eq!(mcl_network_node_count(net), 4);
        assert_eq!(mcl_network_edge_count(net), 33);
        let mut k = [0u64; 4];
        assert_eq!(mcl_network_degrees(net, k.as_mut_ptr(), 4), McStatus::Ok);
        assert_eq!(k, [21, 22, 10, 13]);

        let mut w = [0.0f64; 16];
        let name = CString::new("weighted_sp").unwrap();
        assert_eq!(mcl_statistic(net, name.as_ptr(), w.as_mut_ptr(), 16), McStatus::Ok);
        assert_eq!(&w[..4], &[0.0, 9.0, 4.0, 8.0]);
        assert_eq!(&w[12..], &[8.0, 5.0, 9.0, 0.0]);

        let mut r2 = 0.0;
        assert_eq!(mcl_variance_explained(net, name.as_ptr(), &mut r2), McStatus::Ok);
        assert!((r2 - 0.0414).abs() < 5e-4, "{r2}");

        let bad = CString::new("match:faction").unwrap();
        assert_eq!(mcl_statistic(net, bad.as_ptr(), w.as_mut_ptr(), 16), McStatus::UnknownAttribute);
        assert!(last_error().contains("faction"));
        assert_eq!(mcl_statistic(net, name.as_ptr(), w.as_mut_ptr(), 3), McStatus::BufferTooSmall);
        mcl_network_free(net);
    }
}

#[test]
fn null_handles_are_rejected() {
    unsafe {
        let name = CString::new("weighted_sp").unwrap();
        let mut buf = [0.0; 4];
        assert_eq!(mcl_statistic(ptr::null(), name.as_ptr(), buf.as_mut_ptr(), 4), McStatus::NullPointer);
        assert_eq!(mcl_network_node_count(ptr::null()), 0);
        assert!(mcl_fit_aic(ptr::null()).is_nan());
        assert!(mcl_fit_to_json(ptr::null()).is_null());
        mcl_network_free(ptr::null_mut());
        mcl_fit_free(ptr::null_mut());
        mcl_string_free(ptr::null_mut());
    }
}

#[test]
fn attributes_and_ghype_fit() {
    let net = example();
    unsafe {
        let name = CString::new("group").unwrap();
        let values: Vec<CString> = ["x", "x", "y", "y"].iter().map(|v| CString::new(*v).unwrap()).collect();
        let ptrs: Vec<*const std::ffi::c_char> = values.iter().map(|v| v.as_ptr()).collect();
        assert_eq!(mcl_network_set_attribute(net, name.as_ptr(), ptrs.as_ptr(), 3), McStatus::Input);
        assert_eq!(mcl_network_set_attribute(net, name.as_ptr(), ptrs.as_ptr(), 4), McStatus::Ok);

        let covs = CString::new("weighted_sp, match:group").unwrap();
        let mut fit = ptr::null_mut();
        let status = mcl_fit_ghype(net, covs.as_ptr(), McXi::Config, McLikelihood::Exact, &mut fit);
        assert_eq!(status, McStatus::Ok, "{}", last_error());
        assert_eq!(mcl_fit_coefficient_count(fit), 2);
        let second = CStr::from_ptr(mcl_fit_coefficient_name(fit, 1)).to_str().unwrap();
        assert_eq!(second, "match:group");
        assert!(mcl_fit_coefficient_name(fit, 2).is_null());
        let mut c = McCoefficient { estimate: 0.0, std_err: 0.0, p_value: 0.0, identified: false };
        assert_eq!(mcl_fit_coefficient(fit, 0, &mut c), McStatus::Ok);
        assert!(c.estimate.is_finite());
        assert_eq!(mcl_fit_coefficient(fit, 5, &mut c), McStatus::Input);

        let json = mcl_fit_to_json(fit);
        let text = CStr::from_ptr(json).to_str().unwrap().to_string();
        mcl_string_free(json);
        let parsed: multiclosure::FitResult = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.coefficients.len(), 2);
        assert_eq!(parsed.aic, mcl_fit_aic(fit));
        mcl_fit_free(fit);
        mcl_network_free(net);
    }
}

#[test]
fn count_fit_and_generator() {
    unsafe {
        let mut net = ptr::null_mut();
        assert_eq!(mcl_generate(McGenerator::Mixed, 34, 2000, 26, 11, &mut net), McStatus::Ok);
        assert_eq!(mcl_network_edge_count(net), 2000);
        let covs = CString::new("weighted_sp").unwrap();
        let mut fit = ptr::null_mut();
        assert_eq!(mcl_fit_count(net, covs.as_ptr(), true, &mut fit), McStatus::Ok, "{}", last_error());
        assert_eq!(mcl_fit_coefficient_count(fit), 3);
        assert!(mcl_fit_log_likelihood(fit).is_finite());
        mcl_fit_free(fit);

        let empty = CString::new("").unwrap();
        assert_eq!(mcl_fit_ghype(net, empty.as_ptr(), McXi::Config, McLikelihood::Auto, &mut fit), McStatus::Input);
        mcl_network_free(net);

        let mut tiny = ptr::null_mut();
        assert_eq!(mcl_generate(McGenerator::RandomComplete, 34, 10, 0, 1, &mut tiny), McStatus::Input);
        assert!(tiny.is_null());
    }
}

#[test]
fn reads_files() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data");
    unsafe {
        let edges = CString::new(data.join("karate_edges.csv").to_str().unwrap()).unwrap();
        let attrs = CString::new(data.join("karate_factions.csv").to_str().unwrap()).unwrap();
        let mut net = ptr::null_mut();
        assert_eq!(mcl_network_read_csv(edges.as_ptr(), &mut net), McStatus::Ok);
        assert_eq!(mcl_network_node_count(net), 34);
        assert_eq!(mcl_network_edge_count(net), 231);
        assert_eq!(mcl_network_read_attributes(net, attrs.as_ptr()), McStatus::Ok);
        let mut m = vec![0.0; 34 * 34];
        let name = CString::new("match:faction").unwrap();
        assert_eq!(mcl_statistic(net, name.as_ptr(), m.as_mut_ptr(), m.len()), McStatus::Ok);
        mcl_network_free(net);

        let missing = CString::new("/nonexistent/edges.csv").unwrap();
        let mut none = ptr::null_mut();
        assert_eq!(mcl_network_read_csv(missing.as_ptr(), &mut none), McStatus::Io);
        assert!(last_error().contains("/nonexistent/edges.csv"));
    }
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/multiclosure.h")).unwrap();
    for symbol in [
        "typedef struct McNetwork McNetwork;",
        "typedef struct McFitResult McFitResult;",
        "MC_STATUS_OK = 0",
        "mcl_network_from_dyad_counts(",
        "mcl_fit_ghype(",
        "mcl_fit_count(",
        "mcl_fit_to_json(",
        "mcl_last_error(void)",
        "mcl_generate(",
    ] {
        assert!(header.contains(symbol), "missing {symbol}");
    }
}

/// Compiles the C smoke test against the static library when a C compiler is present.
#[test]
fn c_program_links_and_runs() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let profile_dir: PathBuf = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libmulticlosure_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library at {} or no C compiler", lib.display());
        return;
    }
    let exe = Path::new(env!("CARGO_TARGET_TMPDIR")).join("mcl_smoke");
    let out = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "cc failed: {}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
