//! Run directories, provenance and error classification.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use twocrystal_core::config::RunConfig;
use twocrystal_core::io;
use twocrystal_core::Error;

/// Failure of a command, split by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, unreadable or malformed input (exit 2).
    Input(String),
    /// A numerical routine failed on valid input (exit 3).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. }
            | Error::DegenerateParametrization
            | Error::NotInformationallyComplete => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub struct RunContext {
    pub config: RunConfig,
    /// Directory holding the configuration file, for resolving relative paths.
    pub base: PathBuf,
    pub seed: u64,
    pub config_sha256: String,
    dir: PathBuf,
}

impl RunContext {
    /// Loads the configuration and creates `<out>/<command>-<hash8>-seed<N>`.
    pub fn prepare(
        config: Option<&Path>,
        seed: u64,
        out: &Path,
        command: &str,
    ) -> Result<Self, CliError> {
        let (text, base) = match config {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
                let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
                (text, base)
            }
            None => (String::new(), PathBuf::from(".")),
        };
        let config = RunConfig::from_toml_str(&text)?;
        let config_sha256 = hex::encode(Sha256::digest(text.as_bytes()));
        let dir = out.join(format!("{command}-{}-seed{seed}", &config_sha256[..8]));
        fs::create_dir_all(&dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            config,
            base,
            seed,
            config_sha256,
            dir,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn provenance(&self) -> String {
        format!("config_sha256={} seed={}", self.config_sha256, self.seed)
    }

    fn create(&self, name: &str) -> Result<fs::File, CliError> {
        let path = self.dir.join(name);
        fs::File::create(&path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn write_table(
        &self,
        name: &str,
        headers: &[&str],
        rows: &[Vec<f64>],
    ) -> Result<(), CliError> {
        io::write_table(self.create(name)?, Some(&self.provenance()), headers, rows)?;
        Ok(())
    }

    pub fn write_counts(
        &self,
        name: &str,
        records: &[twocrystal_core::CountRecord],
    ) -> Result<(), CliError> {
        io::write_counts(self.create(name)?, records, Some(&self.provenance()))?;
        Ok(())
    }

    /// Writes `body` wrapped with the config hash and seed.
    pub fn write_json<T: Serialize>(&self, name: &str, body: &T) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Envelope<'a, T> {
            config_sha256: &'a str,
            seed: u64,
            #[serde(flatten)]
            body: &'a T,
        }
        let doc = Envelope {
            config_sha256: &self.config_sha256,
            seed: self.seed,
            body,
        };
        let mut text = serde_json::to_string_pretty(&doc)
            .map_err(|e| CliError::Numerical(format!("serialising {name}: {e}")))?;
        text.push('\n');
        fs::write(self.dir.join(name), text)?;
        Ok(())
    }
}
