use std::ffi::{CStr, CString};
use std::io::Write;
use std::ptr;

use sharedp_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sdp_last_error()) }.to_string_lossy().into_owned()
}

fn diamond() -> *mut SdpGraph {
    let src = [0u32, 0, 1, 2];
    let dst = [1u32, 2, 3, 3];
    let mut g = ptr::null_mut();
    let st = unsafe { sdp_graph_from_edges(4, src.as_ptr(), dst.as_ptr(), 4, &mut g) };
    assert_eq!(st, SdpStatus::Ok);
    g
}

unsafe fn path(r: *const SdpResults, q: usize, p: usize) -> Vec<u32> {
    let mut len = 0;
    assert_eq!(sdp_results_path_len(r, q, p, &mut len), SdpStatus::Ok);
    let mut buf = vec![0u32; len];
    assert_eq!(sdp_results_path_copy(r, q, p, buf.as_mut_ptr(), len), SdpStatus::Ok);
    buf
}

#[test]
fn diamond_round_trip_for_every_engine() {
    let g = diamond();
    unsafe {
        assert_eq!(sdp_graph_vertex_count(g), 4);
        assert_eq!(sdp_graph_edge_count(g), 4);
        for engine in [SdpEngine::Sharedp, SdpEngine::Maxflow, SdpEngine::Oracle] {
            let (s, t) = ([0u32, 0], [3u32, 3]);
            let mut r = ptr::null_mut();
            assert_eq!(sdp_run(g, engine, 2, s.as_ptr(), t.as_ptr(), 2, 10.0, &mut r), SdpStatus::Ok);
            assert_eq!(last_error(), "");
            assert_eq!(sdp_results_len(r), 2);
            for q in 0..2 {
                let mut found = 0;
                assert_eq!(sdp_results_found(r, q, &mut found), SdpStatus::Ok);
                assert_eq!(found, 2);
                let mut timed_out = true;
                assert_eq!(sdp_results_timed_out(r, q, &mut timed_out), SdpStatus::Ok);
                assert!(!timed_out);
                let mut paths = vec![path(r, q, 0), path(r, q, 1)];
                paths.sort();
                assert_eq!(paths, vec![vec![0, 1, 3], vec![0, 2, 3]]);
            }
            let mut ok = false;
            assert_eq!(sdp_results_verified(r, &mut ok), SdpStatus::Ok);
            assert!(ok);
            let ratio = sdp_results_share_ratio(r);
            if engine == SdpEngine::Sharedp {
                assert_eq!(ratio, 1.0, "identical queries share every expansion");
            } else {
                assert!(ratio < 0.0);
            }
            sdp_results_free(r);
        }
        sdp_graph_free(g);
    }
}

#[test]
fn load_from_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# diamond\n0 1\n0 2\n1 3\n2 3").unwrap();
    let path = CString::new(f.path().to_str().unwrap()).unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(sdp_graph_load(path.as_ptr(), true, &mut g), SdpStatus::Ok);
        assert_eq!(sdp_graph_edge_count(g), 8);
        sdp_graph_free(g);
    }
}

#[test]
fn errors_are_reported_not_raised() {
    let g = diamond();
    unsafe {
        let mut out = ptr::null_mut();
        let missing = CString::new("/nonexistent/graph.txt").unwrap();
        assert_eq!(sdp_graph_load(missing.as_ptr(), false, &mut out), SdpStatus::LoadFailed);
        assert!(last_error().contains("cannot read"));
        assert_eq!(sdp_graph_load(ptr::null(), false, &mut out), SdpStatus::NullArgument);

        let bad = [7u32];
        assert_eq!(sdp_graph_from_edges(4, bad.as_ptr(), bad.as_ptr(), 1, &mut out), SdpStatus::InvalidArgument);
        assert!(out.is_null());

        let (s, t) = ([0u32], [0u32]);
        let mut r = ptr::null_mut();
        assert_eq!(
            sdp_run(g, SdpEngine::Sharedp, 2, s.as_ptr(), t.as_ptr(), 1, 1.0, &mut r),
            SdpStatus::InvalidArgument
        );
        assert!(last_error().contains("source and target"));
        let t = [3u32];
        assert_eq!(
            sdp_run(g, SdpEngine::Sharedp, 0, s.as_ptr(), t.as_ptr(), 1, 1.0, &mut r),
            SdpStatus::InvalidArgument
        );
        assert_eq!(
            sdp_run(g, SdpEngine::Sharedp, 2, s.as_ptr(), t.as_ptr(), 1, 0.0, &mut r),
            SdpStatus::InvalidArgument
        );
        assert_eq!(
            sdp_run(ptr::null(), SdpEngine::Sharedp, 2, s.as_ptr(), t.as_ptr(), 1, 1.0, &mut r),
            SdpStatus::NullArgument
        );
        assert!(r.is_null());

        assert_eq!(sdp_run(g, SdpEngine::Sharedp, 2, s.as_ptr(), t.as_ptr(), 1, 1.0, &mut r), SdpStatus::Ok);
        let mut found = 0;
        assert_eq!(sdp_results_found(r, 5, &mut found), SdpStatus::InvalidArgument);
        assert_eq!(sdp_results_found(r, 0, ptr::null_mut()), SdpStatus::NullArgument);
        let mut small = [0u32; 2];
        assert_eq!(sdp_results_path_copy(r, 0, 0, small.as_mut_ptr(), 2), SdpStatus::InvalidArgument);
        assert_eq!(small, [0, 0]);
        assert_eq!(sdp_results_path_len(r, 0, 9, &mut found), SdpStatus::InvalidArgument);
        sdp_results_free(r);

        sdp_results_free(ptr::null_mut());
        sdp_graph_free(ptr::null_mut());
        assert_eq!(sdp_results_len(ptr::null()), 0);
        assert_eq!(sdp_graph_vertex_count(ptr::null()), 0);
        sdp_graph_free(g);
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(sdp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
