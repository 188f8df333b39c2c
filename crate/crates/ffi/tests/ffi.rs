use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use critgraph_ffi::*;

#[test]
fn graph_handles_roundtrip() {
    unsafe {
        let mut g: *mut CgGraph = ptr::null_mut();
        assert_eq!(cg_graph_er(500, 1.0, 3, &mut g), CgStatus::Ok);
        assert_eq!(cg_graph_n(g), 500);
        let m = cg_graph_edge_count(g);
        let (mut u, mut v) = (vec![0u64; m], vec![0u64; m]);
        assert_eq!(cg_graph_edges(g, u.as_mut_ptr(), v.as_mut_ptr(), m), CgStatus::Ok);
        assert!(u.iter().zip(&v).all(|(a, b)| a < b && *b < 500));
        if m > 0 {
            assert_eq!(cg_graph_edges(g, u.as_mut_ptr(), v.as_mut_ptr(), m - 1), CgStatus::BufferTooSmall);
        }
        let mut count = 0usize;
        let mut sizes = vec![0u64; 500];
        assert_eq!(cg_graph_component_sizes(g, sizes.as_mut_ptr(), 500, &mut count), CgStatus::Ok);
        assert_eq!(sizes[..count].iter().sum::<u64>(), 500);
        assert!(sizes[..count].windows(2).all(|w| w[0] >= w[1]));
        let mut s = CgSusceptibility::default();
        assert_eq!(cg_graph_susceptibility(g, &mut s), CgStatus::Ok);
        assert_eq!(s.largest, sizes[0]);
        assert_eq!(s.s1, 1.0);
        cg_graph_free(g);
        cg_graph_free(ptr::null_mut());
    }
}

#[test]
fn same_seed_same_graph() {
    unsafe {
        let x = [0.5, 1.0, 1.5, 2.0, 0.2];
        let (mut a, mut b): (*mut CgGraph, *mut CgGraph) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(cg_graph_gxq(x.as_ptr(), x.len(), 2.0, 9, &mut a), CgStatus::Ok);
        assert_eq!(cg_graph_gxq(x.as_ptr(), x.len(), 2.0, 9, &mut b), CgStatus::Ok);
        assert_eq!(cg_graph_edge_count(a), cg_graph_edge_count(b));
        cg_graph_free(a);
        cg_graph_free(b);
        let d = [3u32; 10];
        let mut c: *mut CgGraph = ptr::null_mut();
        assert_eq!(cg_graph_cm(d.as_ptr(), d.len(), 1, &mut c), CgStatus::Ok);
        assert_eq!(cg_graph_edge_count(c), 15);
        cg_graph_free(c);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut g: *mut CgGraph = ptr::null_mut();
        assert_eq!(cg_graph_er(10, -1.0, 0, &mut g), CgStatus::InvalidInput);
        assert!(g.is_null());
        let msg = CStr::from_ptr(cg_last_error()).to_str().unwrap();
        assert!(msg.contains("nonnegative"), "{msg}");
        assert_eq!(cg_graph_er(10, 1.0, 0, ptr::null_mut()), CgStatus::NullPointer);
        let d = [3u32; 3];
        assert_eq!(cg_graph_cm(d.as_ptr(), 3, 0, &mut g), CgStatus::InvalidInput);
        assert_eq!(cg_graph_gxq(ptr::null(), 3, 1.0, 0, &mut g), CgStatus::NullPointer);
        assert_eq!(cg_graph_n(ptr::null()), 0);
        assert_eq!(cg_space_len(ptr::null()), 0);
    }
}

#[test]
fn spaces_and_ghp() {
    unsafe {
        let two = [0.0, 1.0, 1.0, 0.0];
        let (mut a, mut b): (*mut CgSpace, *mut CgSpace) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(cg_space_new(2, two.as_ptr(), [0.5, 0.5].as_ptr(), &mut a), CgStatus::Ok);
        assert_eq!(cg_space_new(1, [0.0].as_ptr(), [1.0].as_ptr(), &mut b), CgStatus::Ok);
        assert_eq!(cg_space_len(a), 2);
        let mut d = 0.0;
        assert_eq!(cg_ghp_exact(a, b, &mut d), CgStatus::Ok);
        assert!((d - 0.5).abs() < 1e-12);
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(cg_ghp_bounds(a, b, &mut lo, &mut hi), CgStatus::Ok);
        assert!(lo <= d + 1e-12 && d <= hi + 1e-12);
        let bad = [0.0, 1.0, 2.0, 0.0];
        let mut c: *mut CgSpace = ptr::null_mut();
        assert_eq!(cg_space_new(2, bad.as_ptr(), [0.5, 0.5].as_ptr(), &mut c), CgStatus::InvalidInput);
        let big: Vec<f64> = (0..49).map(|i| if i % 8 == 0 { 0.0 } else { 1.0 }).collect();
        assert_eq!(cg_space_new(7, big.as_ptr(), [1.0 / 7.0; 7].as_ptr(), &mut c), CgStatus::Ok);
        assert_eq!(cg_ghp_exact(a, c, &mut d), CgStatus::Ok);
        let mut e: *mut CgSpace = ptr::null_mut();
        assert_eq!(cg_space_new(7, big.as_ptr(), [1.0 / 7.0; 7].as_ptr(), &mut e), CgStatus::Ok);
        assert_eq!(cg_ghp_exact(c, e, &mut d), CgStatus::SizeCap);
        for s in [a, b, c, e] {
            cg_space_free(s);
        }
    }
}

#[test]
fn constants() {
    unsafe {
        let mut bf = CgBfConstants::default();
        assert_eq!(cg_bf_constants(&mut bf), CgStatus::Ok);
        assert!((bf.alpha - 1.063).abs() < 0.01 && (bf.beta - 0.764).abs() < 0.01 && (bf.rho - 0.811).abs() < 0.01);
        let mut p = CgCmParams::default();
        let pmf = [0.0, 0.0, 0.0, 1.0];
        assert_eq!(cg_cm_params(pmf.as_ptr(), 4, &mut p), CgStatus::Ok);
        assert_eq!((p.mu, p.nu, p.beta), (3.0, 2.0, 6.0));
        assert!((p.t_c - 0.5 * 2f64.ln()).abs() < 1e-12);
        let v = CStr::from_ptr(cg_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/critgraph.h")).unwrap();
    for f in ["cg_graph_er", "cg_graph_free", "cg_space_new", "cg_ghp_exact", "cg_last_error", "CG_STATUS_OK"] {
        assert!(h.contains(f), "{f} missing from header");
    }
}

/// Compiles `smoke.c` against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    // Test builds refresh the copy next to the test binary.
    let lib: PathBuf = exe.parent().unwrap().join("libcritgraph_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler on PATH; C link test not run");
        return;
    }
    let dir = env!("CARGO_MANIFEST_DIR");
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("critgraph_smoke");
    let status = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-I"])
        .arg(format!("{dir}/include"))
        .arg(format!("{dir}/tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "smoke program exited with {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
