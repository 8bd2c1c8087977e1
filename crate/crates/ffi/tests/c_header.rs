//! Compiles and runs a small C program against the generated header and the
//! shared library, when a C compiler is on PATH.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "sta_tsp.h"

int main(int argc, char **argv) {
    StaInstance *inst = NULL;
    if (sta_instance_load(argv[1], &inst) != STA_STATUS_OK) return 2;
    StaStaConfig cfg = sta_sta_config_default();
    cfg.max_iters = 10;
    cfg.seed = 1;
    StaResult *res = NULL;
    if (sta_solve_sta(inst, &cfg, &res) != STA_STATUS_OK) return 3;
    uint32_t tour[52];
    if (sta_result_copy_tour(res, tour, 52) != STA_STATUS_OK) return 4;
    double len = 0.0;
    if (sta_tour_length(inst, tour, 52, &len) != STA_STATUS_OK) return 5;
    if (len != sta_result_best_length(res)) return 6;
    if (sta_instance_set_metric(inst, STA_METRIC_GEO) != STA_STATUS_METRIC_MISMATCH) return 7;
    if (sta_last_error() == NULL) return 8;
    printf("%zu %llu\n", sta_instance_dimension(inst), (unsigned long long)sta_result_eval_count(res));
    sta_result_free(res);
    sta_instance_free(inst);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler found, skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<this test> -> target/<profile>
    let lib_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    assert!(lib_dir.join("libsta_tsp_ffi.so").exists() || lib_dir.join("libsta_tsp_ffi.dylib").exists());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(&cc)
        .args(["-std=c11", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .arg("-lsta_tsp_ffi")
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");

    let out = Command::new(&exe).arg(manifest.join("../core/data/berlin52.tsp")).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "52 601");
}
