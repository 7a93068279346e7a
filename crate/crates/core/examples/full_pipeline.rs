//! Runs simulate → stabilize → learn → classify → metrics from the bundled
//! config and lists the files written.
//!
//! cargo run --example full_pipeline [-- <out dir>]

use std::path::{Path, PathBuf};

use gatestab::pipeline::{run_all, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/pipeline.json");
    let mut config = PipelineConfig::from_file(&config_path)?;
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("gatestab-pipeline"));
    config.out = Some(std::path::absolute(&out)?);

    for file in run_all(&config)? {
        println!("{}", file.display());
    }
    Ok(())
}
