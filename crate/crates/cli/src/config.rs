//! Run configuration: a `key=value` file overlaid with command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use knowtraj::ingest::RecordFormat;
use sha2::{Digest, Sha256};

pub const KEYS: &[&str] = &[
    "input",
    "format",
    "cutoff_year",
    "method",
    "top_n",
    "top_k",
    "probe_size",
    "seed",
    "workers",
    "out",
    "vectors",
    "similarity_floor",
    "author_labels",
    "topic_labels",
    "recommendations",
];

/// Keys that do not affect artifact content and are left out of the hash.
const UNHASHED: &[&str] = &["workers", "out"];

pub const WORKERS_ENV: &str = "KNOWTRAJ_WORKERS";
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub format: RecordFormat,
    pub cutoff_year: Option<i32>,
    /// Empty means the command's default selection.
    pub methods: Vec<String>,
    pub top_n: usize,
    pub top_k: Vec<usize>,
    pub probe_size: usize,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
    pub vectors: Option<PathBuf>,
    pub similarity_floor: f64,
    pub author_labels: Option<PathBuf>,
    pub topic_labels: Option<PathBuf>,
    pub recommendations: Option<PathBuf>,
    /// The resolved settings as strings, for hashing.
    settings: BTreeMap<String, String>,
}

/// Parses a `key=value` file. Blank lines and `#` comments are ignored;
/// `-` in keys is read as `_`.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("{}:{}: expected key=value", path.display(), n + 1);
        };
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            bail!("{}:{}: unknown key `{key}`", path.display(), n + 1);
        }
        out.insert(key, v.trim().to_owned());
    }
    Ok(out)
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| anyhow::anyhow!("invalid {key} `{v}`: {e}"))
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl RunConfig {
    /// Resolves settings: `flags` override `file`; the worker count falls
    /// back to the environment, then to the number of CPUs.
    pub fn resolve(file: BTreeMap<String, String>, flags: BTreeMap<String, String>) -> Result<Self> {
        let mut s = file;
        s.extend(flags);
        let get = |k: &str| s.get(k).map(String::as_str).filter(|v| !v.is_empty());
        let path = |k: &str| get(k).map(PathBuf::from);

        let format = match get("format") {
            Some(v) => v.parse::<RecordFormat>().map_err(|e| anyhow::anyhow!("{e}"))?,
            None => RecordFormat::JsonLines,
        };
        let cutoff_year = get("cutoff_year").map(|v| parse::<i32>("cutoff_year", v)).transpose()?;
        let methods: Vec<String> = match get("method") {
            Some("all") | None => Vec::new(),
            Some(v) => list(v).map(str::to_lowercase).collect(),
        };
        let top_n = get("top_n").map_or(Ok(knowtraj::diffusion::DEFAULT_TOP_N), |v| parse("top_n", v))?;
        let top_k = match get("top_k") {
            Some(v) => list(v).map(|k| parse::<usize>("top_k", k)).collect::<Result<Vec<_>>>()?,
            None => vec![500, 1000, 1500],
        };
        if top_k.contains(&0) {
            bail!("invalid top_k: group sizes must be positive");
        }
        let probe_size = get("probe_size").map_or(Ok(20_000), |v| parse("probe_size", v))?;
        let seed = get("seed").map_or(Ok(DEFAULT_SEED), |v| parse("seed", v))?;
        let workers = match get("workers") {
            Some(v) => parse::<usize>("workers", v)?,
            None => match std::env::var(WORKERS_ENV) {
                Ok(v) if !v.trim().is_empty() => parse::<usize>(WORKERS_ENV, v.trim())?,
                _ => std::thread::available_parallelism().map_or(1, |n| n.get()),
            },
        };
        if workers == 0 {
            bail!("invalid workers: must be at least 1");
        }
        let similarity_floor = get("similarity_floor").map_or(Ok(0.0), |v| parse::<f64>("similarity_floor", v))?;
        if !(-1.0..=1.0).contains(&similarity_floor) {
            bail!("invalid similarity_floor {similarity_floor}: must lie in [-1, 1]");
        }

        let mut settings = BTreeMap::new();
        settings.insert("format".into(), format!("{format:?}"));
        settings.insert("method".into(), methods.join(","));
        settings.insert("top_n".into(), top_n.to_string());
        settings.insert(
            "top_k".into(),
            top_k.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
        );
        settings.insert("probe_size".into(), probe_size.to_string());
        settings.insert("seed".into(), seed.to_string());
        settings.insert("similarity_floor".into(), similarity_floor.to_string());
        if let Some(y) = cutoff_year {
            settings.insert("cutoff_year".into(), y.to_string());
        }
        debug_assert!(UNHASHED.iter().all(|k| !settings.contains_key(*k)));

        Ok(RunConfig {
            input: path("input"),
            format,
            cutoff_year,
            methods,
            top_n,
            top_k,
            probe_size,
            seed,
            workers,
            out: path("out").unwrap_or_else(|| PathBuf::from(".")),
            vectors: path("vectors"),
            similarity_floor,
            author_labels: path("author_labels"),
            topic_labels: path("topic_labels"),
            recommendations: path("recommendations"),
            settings,
        })
    }

    pub fn input(&self) -> Result<&Path> {
        self.input.as_deref().context("missing --input")
    }

    pub fn cutoff_year(&self) -> Result<i32> {
        self.cutoff_year.context("missing --cutoff-year")
    }

    /// SHA-256 over the command, the content-affecting settings and the
    /// contents of every input file, as 16 hex digits. Paths themselves do
    /// not enter the hash, so moving inputs keeps it stable.
    pub fn hash(&self, command: &str) -> Result<String> {
        let mut h = Sha256::new();
        h.update(format!("command={command}\n"));
        for (k, v) in &self.settings {
            h.update(format!("{k}={v}\n"));
        }
        let files = [
            ("input", &self.input),
            ("vectors", &self.vectors),
            ("author_labels", &self.author_labels),
            ("topic_labels", &self.topic_labels),
            ("recommendations", &self.recommendations),
        ];
        for (k, p) in files {
            if let Some(p) = p {
                let bytes = fs::read(p).with_context(|| format!("cannot read {}", p.display()))?;
                h.update(format!("{k}="));
                h.update(Sha256::digest(&bytes));
                h.update("\n");
            }
        }
        let digest = h.finalize();
        Ok(digest.iter().take(8).map(|b| format!("{b:02x}")).collect())
    }
}
