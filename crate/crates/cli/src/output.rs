//! Report envelope, run manifest and number formatting.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: &str = "gme-report/v1";

/// Describes how an artifact was produced; replaying `subcommand` with
/// `config` reproduces the numeric payload byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config: Value,
    /// `None` for subcommands that draw no random numbers.
    pub seed: Option<u64>,
    /// Unix seconds; only set with `--timestamp`, since it breaks byte identity.
    pub timestamp: Option<u64>,
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: impl Serialize, seed: Option<u64>) -> Result<Self> {
        Ok(Self {
            tool: "gme",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            config: serde_json::to_value(config)?,
            seed,
            timestamp: None,
            notes: Vec::new(),
        })
    }

    pub fn stamp(&mut self) {
        self.timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// What a subcommand produced.
pub struct Artifact {
    pub manifest: RunManifest,
    pub report: Value,
    /// CSV rendering, for subcommands that have one.
    pub csv: Option<String>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: &'static str,
    manifest: &'a RunManifest,
    report: &'a Value,
}

/// Writes every float with 17 significant digits so doubles round-trip.
struct Precise;

impl Formatter for Precise {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// `d.dddddddddddddddde±x`
pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn to_json_bytes(value: &impl Serialize) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Precise);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

pub fn render_json(artifact: &Artifact) -> Result<Vec<u8>> {
    to_json_bytes(&Envelope {
        schema_version: SCHEMA_VERSION,
        manifest: &artifact.manifest,
        report: &artifact.report,
    })
}

fn write_to(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Emits the artifact to `out` (stdout when `None`). CSV output carries no
/// manifest in-band: it goes to `<out>.manifest.json`, or to stderr when
/// writing to stdout.
pub fn emit(artifact: &Artifact, format: Format, out: Option<&Path>) -> Result<()> {
    let (body, manifest) = match format {
        Format::Json => (render_json(artifact)?, None),
        Format::Csv => {
            let csv = artifact.csv.as_ref().ok_or_else(|| {
                CliError::Usage(format!(
                    "`{}` has no CSV output",
                    artifact.manifest.subcommand
                ))
            })?;
            (
                csv.as_bytes().to_vec(),
                Some(to_json_bytes(&artifact.manifest)?),
            )
        }
    };
    match out {
        Some(path) => {
            write_to(path, &body)?;
            if let Some(m) = manifest {
                let mut side = PathBuf::from(path).into_os_string();
                side.push(".manifest.json");
                write_to(Path::new(&side), &m)?;
            }
        }
        None => {
            let mut stdout = io::stdout().lock();
            let to_stdout = |e| CliError::Write {
                path: PathBuf::from("<stdout>"),
                source: e,
            };
            stdout.write_all(&body).map_err(to_stdout)?;
            stdout.flush().map_err(to_stdout)?;
            if let Some(m) = manifest {
                io::stderr().write_all(&m).map_err(|e| CliError::Write {
                    path: PathBuf::from("<stderr>"),
                    source: e,
                })?;
            }
        }
    }
    Ok(())
}
