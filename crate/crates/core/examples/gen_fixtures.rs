//! Regenerates the datasets under `fixtures/`.
//!
//! ```text
//! cargo run --example gen_fixtures [-- OUT_DIR]
//! ```

use std::path::PathBuf;

use kgxir::fixtures;

fn main() -> std::io::Result<()> {
    let root = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    fixtures::demo().write_to(&root.join("demo"))?;
    fixtures::disambiguation().write_to(&root.join("disambiguation"))?;
    fixtures::rerank().write_to(&root.join("rerank"))?;
    println!("wrote fixtures to {}", root.display());
    Ok(())
}
