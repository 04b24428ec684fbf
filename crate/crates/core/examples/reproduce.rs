//! Run the whole pipeline through the command-line entry point, twice, and
//! check that the recorded output digests agree.
//!
//! cargo run --release --example reproduce [out-dir]

use citeburst::manifest::RunManifest;

fn main() {
    let out = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("citeburst-reproduce"));
    let run = |dir: &std::path::Path| {
        let code = citeburst::cli::run([
            "citeburst",
            "reproduce",
            "--out",
            dir.to_str().expect("utf-8 path"),
        ]);
        assert_eq!(code, 0, "reproduce failed");
        RunManifest::read(&dir.join("manifest.json")).expect("manifest")
    };
    let first = run(&out.join("a"));
    let second = run(&out.join("b"));
    println!("{} outputs under {}", first.outputs.len(), out.display());
    for f in first.outputs.iter().take(8) {
        println!("  {}  {}", &f.sha256[..16], f.path.display());
    }
    assert_eq!(first.outputs, second.outputs);
    println!("second run matched every digest");
}
