//! Records the source revision for the `meta.git_rev` field of stored parameters.

use std::process::Command;

fn main() {
    let rev = std::env::var("TWOCENTER_GIT_REV").ok().filter(|s| !s.is_empty()).or_else(|| {
        Command::new("git")
            .args(["rev-parse", "--short=12", "HEAD"])
            .output()
            .ok()
            .filter(|o| o.status.success())
            .and_then(|o| String::from_utf8(o.stdout).ok())
            .map(|s| s.trim().to_string())
    });
    println!("cargo:rustc-env=TWOCENTER_GIT_REV={}", rev.unwrap_or_else(|| "unknown".into()));
    println!("cargo:rerun-if-env-changed=TWOCENTER_GIT_REV");
    println!("cargo:rerun-if-changed=../../.git/HEAD");
}
