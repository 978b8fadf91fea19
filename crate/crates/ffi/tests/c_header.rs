//! Compiles a small C program against the generated header and the static
//! library. Skipped when no C compiler or static archive is available.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "freqcap.h"

int main(void) {
    double c = 0.0;
    if (freqcap_converse_bound(100.0, 40.0, &c) != FREQCAP_STATUS_OK) return 1;
    if (fabs(c - 0.5 * log(40.0)) > 1e-12) return 2;

    if (freqcap_converse_bound(-1.0, 1.0, &c) != FREQCAP_STATUS_DOMAIN) return 3;
    if (freqcap_last_error_message() == NULL) return 4;

    FreqcapChannel *ch = NULL;
    FreqcapRng *rng = NULL;
    if (freqcap_channel_new(4, 3.0, 2.5, &ch) != FREQCAP_STATUS_OK) return 5;
    if (freqcap_rng_new(7, 0, &rng) != FREQCAP_STATUS_OK) return 6;
    uint64_t x[4] = {1, 2, 3, 6};
    uint64_t y[4] = {0};
    if (freqcap_transmit(ch, rng, x, y, 4) != FREQCAP_STATUS_OK) return 7;
    if (y[0] + y[1] + y[2] + y[3] != 10) return 8;
    freqcap_rng_free(rng);
    freqcap_channel_free(ch);
    printf("ok\n");
    return 0;
}
"#;

fn profile_dir() -> PathBuf {
    // target/<profile>/deps/<test-binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_declares_the_api() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/freqcap.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build script");
    for name in [
        "FreqcapStatus",
        "typedef struct FreqcapRng FreqcapRng",
        "freqcap_last_error_message",
        "freqcap_transmit",
        "freqcap_mutual_information",
        "freqcap_dna_log_cardinality",
        "FREQCAP_STATUS_NULL_POINTER",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let archive = profile_dir().join("libfreqcap_ffi.a");
    if !archive.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static archive at {} or no C compiler", archive.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile/link failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C smoke test exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
