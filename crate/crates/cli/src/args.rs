use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gme_core::protocols::DEFAULT_SEED;
use serde::Serialize;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "gme",
    version,
    about = "Simulate GME activation protocols and certify the results"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Qubit protocol: measurement step, residual pairs and their distillation.
    Prop1(Prop1Args),
    /// Two copies of the three-qutrit state, merged into a GHZ-type state.
    Prop2(Prop2Args),
    /// Three copies of the four-ququart state, merged into a four-party state.
    Prop3(Prop3Args),
    /// One seeded run of the adaptive protocol on copies of σ.
    Sigma(SigmaArgs),
    /// Success probability against copies for the adaptive σ protocol.
    SigmaScan(SigmaScanArgs),
    /// Negativity and Schmidt data across every bipartition.
    Certify(CertifyArgs),
    /// Svetlichny functional of a three-qubit pure state.
    Svetlichny(SvetlichnyArgs),
    /// Filter, twirl and recurrence rounds on a two-qubit state.
    Distill(DistillArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Output file (stdout when omitted).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Record the wall-clock time in the manifest (the output is then no
    /// longer byte-identical across runs).
    #[arg(long)]
    #[serde(skip)]
    pub timestamp: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeedArgs {
    /// Monte Carlo seed; falls back to GME_SEED, then to the default.
    #[arg(long, env = "GME_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Prop1Args {
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Recurrence rounds applied to each entangled residual.
    #[arg(long, default_value_t = 3)]
    pub rounds: usize,
    /// Which outcome of Charlie's measurement to follow.
    #[arg(long, default_value_t = 0)]
    pub charlie_outcome: usize,
    /// JSON file with `big_phi`, `phi`, `psi`, `big_psi` amplitude lists
    /// ([re, im] pairs) replacing the built-in example.
    #[arg(long, value_name = "PATH")]
    pub inputs: Option<PathBuf>,
    /// Attach a Monte Carlo block with this many shots.
    #[arg(long)]
    pub shots: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Prop2Args {
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Three Schmidt coefficients (normalized on input; uniform by default).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub schmidt: Option<Vec<f64>>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Prop3Args {
    /// Three mixing weights summing to one (uniform by default).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub weights: Option<Vec<f64>>,
    /// Four Schmidt coefficients (normalized on input; uniform by default).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub schmidt: Option<Vec<f64>>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    /// First copy conditioned on the A–B pair: success law 1 - (1 - p)^n.
    Conditioned,
    /// Both first outcomes followed.
    Unconditioned,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SigmaArgs {
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Two Schmidt coefficients of the pair inside σ′ (σ itself by default).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub schmidt: Option<Vec<f64>>,
    #[arg(long, default_value_t = 21)]
    pub max_copies: usize,
    #[arg(long, value_enum, default_value_t = ScanMode::Unconditioned)]
    pub mode: ScanMode,
    #[arg(long)]
    pub shots: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SigmaScanArgs {
    /// Comma-separated values of p.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub p: Vec<f64>,
    /// Rows run over n = 0..=n-max repeat copies.
    #[arg(long, default_value_t = 20)]
    pub n_max: usize,
    #[arg(long, default_value_t = gme_core::protocols::DEFAULT_SHOTS)]
    pub shots: u64,
    #[arg(long, value_enum, default_value_t = ScanMode::Conditioned)]
    pub mode: ScanMode,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    Sigma,
    Prop1,
    Prop2,
    Prop3,
    Ghz,
    /// Two |φ+⟩ pairs merged at B.
    MergedGhz,
    /// |000⟩
    Product,
}

#[derive(Debug, Clone, Args, Serialize)]
#[group(id = "source", required = true, multiple = false)]
pub struct StateSource {
    /// JSON state file.
    #[arg(long, value_name = "PATH")]
    pub state: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CertifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: StateSource,
    /// Mixing weight for the built-in mixed states.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SvetlichnyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: StateSource,
    /// Mixing weight for the built-in mixed states.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Six equatorial angles a,a',b,b',c,c' in radians (GHZ-optimal by default).
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    pub angles: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[group(id = "input", required = true, multiple = false)]
pub struct DistillInput {
    /// Start from the Werner-form state of this |φ+⟩ fidelity.
    #[arg(long)]
    pub fidelity: Option<f64>,
    /// Two-qubit JSON state file.
    #[arg(long, value_name = "PATH")]
    pub state: Option<PathBuf>,
    /// Start from the A–B residual of the qubit protocol at this p.
    #[arg(long, value_name = "P")]
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DistillArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: DistillInput,
    #[arg(long, default_value_t = 3)]
    pub rounds: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}
