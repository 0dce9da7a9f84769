use std::ffi::{CStr, CString};
use std::ptr;

use hycolor::neural::{init_params, ModelConfig};
use hycolor_ffi::*;

fn last_error() -> String {
    let p = hc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn graph(n: usize, edges: &[(usize, usize)]) -> *mut HcGraph {
    let mut g = ptr::null_mut();
    assert_eq!(hc_graph_new(n, &mut g), HcStatus::Ok);
    for &(u, v) in edges {
        assert_eq!(hc_graph_add_edge(g, u, v), HcStatus::Ok);
    }
    g
}

#[test]
fn build_and_solve_k4() {
    unsafe {
        let g = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(hc_graph_node_count(g), 4);
        assert_eq!(hc_graph_edge_count(g), 6);
        let mut chi = 0;
        let mut colors = [0u32; 4];
        assert_eq!(hc_exact_chromatic(g, 1000, &mut chi, colors.as_mut_ptr()), HcStatus::Ok);
        assert_eq!(chi, 4);
        let mut sorted = colors;
        sorted.sort();
        assert_eq!(sorted, [1, 2, 3, 4]);
        assert_eq!(hc_dsatur(g, colors.as_mut_ptr()), HcStatus::Ok);
        hc_graph_free(g);
    }
}

#[test]
fn correction_matches_hand_trace() {
    unsafe {
        let g = graph(3, &[(0, 1), (0, 2), (1, 2)]);
        let mut colors = [1u32, 1, 1];
        let mut stats = HcCorrectionStats::default();
        assert_eq!(hc_color_correct(g, colors.as_mut_ptr(), &mut stats), HcStatus::Ok);
        assert_eq!(colors, [2, 3, 1]);
        assert_eq!(stats.fresh_colors_added, 2);
        assert_eq!(stats.final_colors_used, 3);
        let mut bad = [0u32, 1, 1];
        assert_eq!(hc_color_correct(g, bad.as_mut_ptr(), ptr::null_mut()), HcStatus::InvalidArgument);
        assert!(last_error().contains("color 0"));
        hc_graph_free(g);
    }
}

#[test]
fn dimacs_and_errors() {
    unsafe {
        let text = CString::new("c tiny\np edge 3 2\ne 1 2\ne 2 3\n").unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(hc_graph_from_dimacs(text.as_ptr(), &mut g), HcStatus::Ok);
        assert_eq!(hc_graph_edge_count(g), 2);
        assert_eq!(hc_graph_add_edge(g, 1, 1), HcStatus::InvalidArgument);
        assert_eq!(hc_graph_add_edge(g, 0, 9), HcStatus::InvalidArgument);
        hc_graph_free(g);

        let broken = CString::new("e 1 2\n").unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(hc_graph_from_dimacs(broken.as_ptr(), &mut g), HcStatus::Parse);
        assert!(g.is_null());
        assert_eq!(hc_graph_from_dimacs(ptr::null(), &mut g), HcStatus::NullPointer);
        assert_eq!(hc_graph_new(0, &mut g), HcStatus::InvalidArgument);
        assert_eq!(hc_dsatur(ptr::null(), ptr::null_mut()), HcStatus::NullPointer);
        hc_graph_free(ptr::null_mut());
        hc_model_free(ptr::null_mut());
    }
}

#[test]
fn model_round_trip_and_hybrid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.bin");
    init_params(ModelConfig::tiny(8, 3)).unwrap().save(&path).unwrap();
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(hc_model_load(cpath.as_ptr(), &mut m), HcStatus::Ok);
        let g = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let mut raw = [0u32; 5];
        assert_eq!(hc_model_predict(m, g, raw.as_mut_ptr()), HcStatus::Ok);
        assert!(raw.iter().all(|&c| (1..=5).contains(&c)));
        for bfs in [0, 1] {
            let mut colors = [0u32; 5];
            let mut stats = HcCorrectionStats::default();
            assert_eq!(hc_hybrid_color(m, g, bfs, colors.as_mut_ptr(), &mut stats), HcStatus::Ok);
            for i in 0..5 {
                assert_ne!(colors[i], colors[(i + 1) % 5]);
            }
            assert!(stats.final_colors_used >= 3);
        }
        hc_graph_free(g);
        hc_model_free(m);

        let missing = CString::new(dir.path().join("none.bin").to_str().unwrap()).unwrap();
        let mut m = ptr::null_mut();
        assert_eq!(hc_model_load(missing.as_ptr(), &mut m), HcStatus::Io);
        std::fs::write(&path, b"garbage").unwrap();
        assert_eq!(hc_model_load(cpath.as_ptr(), &mut m), HcStatus::ModelFormat);
        assert!(m.is_null());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hycolor.h")).unwrap();
    for name in [
        "hc_last_error",
        "hc_graph_new",
        "hc_graph_add_edge",
        "hc_graph_from_dimacs",
        "hc_graph_free",
        "hc_exact_chromatic",
        "hc_dsatur",
        "hc_color_correct",
        "hc_model_load",
        "hc_model_predict",
        "hc_hybrid_color",
        "HC_STATUS_TIMEOUT",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
