use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;

/// Where results go. With a directory, files are written there and the
/// human-readable report goes to stdout. Without one, CSV goes to stdout
/// and the report to stderr so the CSV stays pipeable.
pub struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(Output { dir })
    }

    /// A report line.
    pub fn say(&self, line: impl AsRef<str>) {
        if self.dir.is_some() {
            println!("{}", line.as_ref());
        } else {
            eprintln!("{}", line.as_ref());
        }
    }

    /// A report line that stays on stdout even without an output directory,
    /// for commands that emit no CSV.
    pub fn print(&self, line: impl AsRef<str>) {
        println!("{}", line.as_ref());
    }

    pub fn file(&self, name: &str, contents: &str) -> Result<()> {
        if let Some(d) = &self.dir {
            let path = d.join(name);
            fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.file(name, &text)
    }

    pub fn csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().context("flushing CSV")?;
        match &self.dir {
            Some(_) => self.file(name, std::str::from_utf8(&bytes)?),
            None => {
                io::stdout().write_all(&bytes)?;
                Ok(())
            }
        }
    }
}

/// Splitmix64 finalizer over `(root, trial, stream)`, so trials get
/// decorrelated seeds independent of scheduling.
pub fn derive_seed(root: u64, trial: u64, stream: u64) -> u64 {
    let mut z = root
        ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ stream.wrapping_add(1).wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
