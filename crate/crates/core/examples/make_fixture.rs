//! Regenerates the bundled synthetic dataset under `data/fixture/`.
//!
//! The files are deterministic (fixed seed), so running this is only needed
//! after changing the fixture definition itself.

fn main() {
    let dir = std::path::Path::new("data/fixture");
    plantsis::fixtures::write_fixture_files(dir).expect("write fixture files");
    println!("wrote fixture dataset to {}", dir.display());
}
