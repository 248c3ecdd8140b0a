//! Drive the batch front-end from code: parse a config, run it, print the
//! summary and the first lines of the CSV trace.
//!
//! `cargo run --example run_config -- examples/configs/annulus_inertial.conf`

use std::path::PathBuf;

use urep::cli::{emit, execute, parse_config, trace_csv};

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/unit_ball_proximal.conf"));
    let rc = match parse_config(&path) {
        Ok(rc) => rc,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    println!("--- normalized config\n{}", emit(&rc));
    let out = execute(&rc).expect("run");
    println!("--- summary (exit code {})\n{}", out.exit_code, serde_json::to_string_pretty(&out.summary).unwrap());
    println!("--- trace");
    for line in trace_csv(&out.trace).lines().take(5) {
        println!("{line}");
    }
}
