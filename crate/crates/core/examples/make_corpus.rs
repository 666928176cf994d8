//! Writes the bundled synthetic corpus: PNG images plus `manifest.jsonl`.
//!
//! Usage: cargo run --example make_corpus -- [out_dir]

use std::path::PathBuf;

use facediv_core::manifest::{Manifest, ManifestLine};
use facediv_core::synth::corpus;

fn main() -> facediv_core::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/corpus"));
    std::fs::create_dir_all(&out)?;
    let faces = corpus(12, 2019);
    let mut lines = String::new();
    for f in &faces {
        f.image.save(out.join(&f.record.image_path)).map_err(|e| std::io::Error::other(e.to_string()))?;
        lines.push_str(&serde_json::to_string(&ManifestLine::from_record(&f.record))?);
        lines.push('\n');
    }
    let path = out.join("manifest.jsonl");
    std::fs::write(&path, lines)?;
    // fail early if the written manifest does not parse back
    let m = Manifest::load(&path)?;
    println!("wrote {} faces to {}", m.records.len(), out.display());
    Ok(())
}
