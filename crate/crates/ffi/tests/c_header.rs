//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

fn compiler() -> Option<String> {
    std::env::var("CC").ok().or_else(|| {
        ["cc", "gcc", "clang"]
            .iter()
            .find(|c| Command::new(c).arg("--version").output().is_ok())
            .map(|c| c.to_string())
    })
}

#[test]
fn header_compiles_and_links() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libstraight_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let Some(cc) = compiler() else {
        panic!("no C compiler found; set CC");
    };
    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "smoke program exit {:?}",
        run.status.code()
    );
    let stdout = String::from_utf8(run.stdout).unwrap();
    let first: Vec<f64> = stdout
        .lines()
        .next()
        .expect("at least one segment")
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    // a vertical line at x = 31 from y = 8 to y = 55
    assert!(first[0] >= 29.0 && first[0] <= 33.0);
    assert!(first[2] >= 29.0 && first[2] <= 33.0);
    assert!(first[4] >= 40.0);
}
