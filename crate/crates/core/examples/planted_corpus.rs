//! Writes a seeded synthetic corpus as JSON lines.
//!
//!     cargo run --example planted_corpus -- corpus.jsonl [seed] [train] [test]

use std::path::PathBuf;

use knowtraj::ingest::records_to_jsonl;
use knowtraj::synth::{planted_corpus, PlantedConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(args.next().ok_or("usage: planted_corpus OUT [seed] [train] [test]")?);
    let mut cfg = PlantedConfig::default();
    if let Some(s) = args.next() {
        cfg.seed = s.parse()?;
    }
    if let Some(n) = args.next() {
        cfg.train_records = n.parse()?;
    }
    if let Some(n) = args.next() {
        cfg.test_records = n.parse()?;
    }
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let records = planted_corpus(&cfg);
    knowtraj::artifact::write_atomic(&path, records_to_jsonl(&records).as_bytes())?;
    eprintln!("{} records, cutoff year {}", records.len(), cfg.cutoff_year);
    Ok(())
}
