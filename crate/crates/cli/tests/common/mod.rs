#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn fixtures() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(golden_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    out.sort();
    out
}

/// Runs `qlat <group> <cmd> --in <input>` where the file is named `<group>-<cmd>.<case>.json`.
pub fn run_fixture(input: &Path, threads: usize) -> (Vec<u8>, i32) {
    let stem = input.file_stem().unwrap().to_str().unwrap();
    let cmd = stem.split('.').next().unwrap();
    let (group, sub) = cmd.split_once('-').unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qlat"))
        .args([group, sub, "--in"])
        .arg(input)
        .env("RAYON_NUM_THREADS", threads.to_string())
        .env_remove("QLAT_MAX_VERTICES")
        .output()
        .unwrap();
    (out.stdout, out.status.code().unwrap_or(-1))
}

pub fn expected(input: &Path) -> (Vec<u8>, i32) {
    let out = std::fs::read(input.with_extension("out")).unwrap();
    let code = std::fs::read_to_string(input.with_extension("code"))
        .map(|s| s.trim().parse().unwrap())
        .unwrap_or(0);
    (out, code)
}
