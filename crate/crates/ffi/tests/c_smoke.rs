//! Compiles and runs a small C program against the generated header and the
//! static library, proving the ABI end to end.

use std::path::PathBuf;
use std::process::Command;

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <math.h>
#include "stored_light.h"

int main(void) {
    SlConfig *cfg = NULL;
    SlResult *result = NULL;
    if (sl_config_preset("sqrt-not", &cfg) != SL_OK) return 1;
    if (sl_run_protocol(cfg, &result) != SL_OK) return 2;
    double fid = sl_result_fidelity(result);
    if (fid < 0.99) return 3;

    SlDiagnostics diag;
    if (sl_result_diagnostics(result, &diag) != SL_OK) return 4;
    if (diag.max_s_bbprime > 1e-10) return 5;

    double entries[8];
    if (sl_gate_matrix(M_PI, M_PI, entries) != SL_OK) return 6;
    if (fabs(entries[3] + 1.0) > 1e-12) return 7;

    sl_result_free(result);
    sl_config_free(cfg);

    /* error path: unknown preset must not return SL_OK */
    if (sl_config_preset("nope", &cfg) == SL_OK) return 8;
    printf("fidelity %.6f\n", fid);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    // target/<profile>/deps/<test-bin> -> target/<profile>/
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    let staticlib = profile_dir.join("libstored_light_ffi.a");
    assert!(staticlib.exists(), "staticlib missing at {}", staticlib.display());

    let include_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let work = std::env::temp_dir().join(format!("stored-light-c-{}", std::process::id()));
    std::fs::create_dir_all(&work).unwrap();
    let src = work.join("smoke.c");
    let bin = work.join("smoke");
    std::fs::write(&src, C_PROGRAM).unwrap();

    let compile = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include_dir)
        .arg(staticlib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .expect("cc is available");
    assert!(
        compile.status.success(),
        "compilation failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&bin).output().unwrap();
    assert!(
        run.status.success(),
        "C smoke test exited {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
    assert!(String::from_utf8_lossy(&run.stdout).contains("fidelity"));
}
