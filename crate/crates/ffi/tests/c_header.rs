//! Compiles and runs a small C program against the generated header and the
//! static library.

use std::env;
use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "mtkcs.h"

int main(void) {
    MtkcsConstants c;
    if (mtkcs_sharp_constants(4, 2, 0.0, NAN, &c) != MTKCS_STATUS_OK) return 1;
    if (fabs(c.zeta - 32.0 * M_PI * M_PI) > 1e-9) return 2;
    MtkcsGrid *grid = NULL;
    if (mtkcs_grid_new(1.0, 0, 1.05, &grid) != MTKCS_STATUS_INVALID_PARAMETER) return 3;
    char msg[128];
    if (mtkcs_last_error_message(msg, sizeof msg) == 0) return 4;
    MtkcsSolveOptions o = mtkcs_solve_options_default();
    if (o.max_iter != 10000) return 5;
    printf("ok\n");
    return 0;
}
"#;

/// Test builds leave the archive in `deps/`; regular builds copy it one level up.
fn static_library() -> PathBuf {
    let exe = env::current_exe().unwrap();
    let deps = exe.parent().unwrap();
    let candidates = [deps.join("libmtkcs_ffi.a"), deps.parent().unwrap().join("libmtkcs_ffi.a")];
    candidates.iter().find(|p| p.exists()).cloned().unwrap_or_else(|| candidates[0].clone())
}

#[test]
fn c_program_links_against_static_library() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = static_library();
    assert!(lib.exists(), "missing {}", lib.display());
    let work = tempfile::tempdir().unwrap();
    let src = work.path().join("smoke.c");
    let exe = work.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c11")
        .arg("-D_DEFAULT_SOURCE")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/mtkcs.h")).unwrap();
    for name in [
        "mtkcs_last_error_message",
        "mtkcs_sharp_constants",
        "mtkcs_threshold",
        "mtkcs_grid_new",
        "mtkcs_grid_free",
        "mtkcs_grid_len",
        "mtkcs_grid_nodes",
        "mtkcs_riesz_new",
        "mtkcs_riesz_free",
        "mtkcs_riesz_form",
        "mtkcs_problem_new",
        "mtkcs_problem_free",
        "mtkcs_problem_len",
        "mtkcs_problem_energy",
        "mtkcs_problem_level_bound",
        "mtkcs_solve_options_default",
        "mtkcs_solve",
        "mtkcs_solution_free",
        "mtkcs_solution_summary",
        "mtkcs_solution_values",
        "mtkcs_blowup_sweep",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}
