//! Compiles and runs a C program against the generated header and the
//! static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "sharedp.h"

int main(void) {
    uint32_t src[] = {0, 0, 1, 2}, dst[] = {1, 2, 3, 3};
    SdpGraph *g = NULL;
    if (sdp_graph_from_edges(4, src, dst, 4, &g) != SDP_STATUS_OK) return 10;
    uint32_t s[] = {0}, t[] = {3};
    SdpResults *r = NULL;
    if (sdp_run(g, SDP_ENGINE_SHAREDP, 2, s, t, 1, 5.0, &r) != SDP_STATUS_OK) return 11;
    size_t found = 0;
    if (sdp_results_found(r, 0, &found) != SDP_STATUS_OK || found != 2) return 12;
    for (size_t p = 0; p < found; p++) {
        size_t len = 0;
        uint32_t buf[8];
        if (sdp_results_path_len(r, 0, p, &len) != SDP_STATUS_OK) return 13;
        if (sdp_results_path_copy(r, 0, p, buf, 8) != SDP_STATUS_OK) return 14;
        for (size_t i = 0; i < len; i++) printf("%s%u", i ? " " : "", buf[i]);
        printf("\n");
    }
    if (sdp_run(g, SDP_ENGINE_SHAREDP, 2, s, s, 1, 5.0, &r) != SDP_STATUS_INVALID_ARGUMENT) return 15;
    if (strlen(sdp_last_error()) == 0) return 16;
    sdp_results_free(r);
    sdp_graph_free(g);
    return 0;
}
"#;

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// `target/<profile>`, two levels above the test executable in `deps/`.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = profile_dir().join("libsharedp_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(manifest().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .expect("cc available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "0 1 3\n0 2 3\n");
}

#[test]
fn header_is_valid_cpp() {
    let status = Command::new("c++")
        .args(["-fsyntax-only", "-x", "c++", "-I"])
        .arg(manifest().join("include"))
        .arg("-")
        .stdin(std::process::Stdio::piped())
        .spawn()
        .and_then(|mut child| {
            use std::io::Write;
            child.stdin.take().unwrap().write_all(b"#include \"sharedp.h\"\nint main() { return SDP_STATUS_OK; }\n")?;
            child.wait()
        })
        .expect("c++ available");
    assert!(status.success());
}
