use std::path::Path;

use gme_core::distill::{bell_fidelity, distill_pipeline, isotropic};
use gme_core::entanglement::{
    certify_entangled_all_cuts, certify_gme_pure, svetlichny_value, SvetlichnySettings,
    SVETLICHNY_CLASSICAL_BOUND, SVETLICHNY_QUANTUM_BOUND,
};
use gme_core::protocols::{
    analytic_pn, build_prop1_example, build_prop1_general, build_prop2_state, build_prop3_state,
    build_sigma, merge_chain_to_ghz, monte_carlo, run_prop1, run_prop1_step, run_prop1_with,
    run_prop2, run_prop3, run_sigma_adaptive, ProtocolConfig, SigmaMode,
};
use gme_core::qcore::states::{ghz, level, phi_plus};
use gme_core::qcore::{PartyDims, PureState, QuantumState};
use gme_core::{ProtocolConfigF64, C};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::{
    Builtin, CertifyArgs, DistillArgs, Prop1Args, Prop2Args, Prop3Args, ScanMode, SigmaArgs,
    SigmaScanArgs, StateSource, SvetlichnyArgs,
};
use crate::error::{CliError, Result};
use crate::output::{format_f64, Artifact, RunManifest};
use crate::state_file::{load_state, LoadedState};

/// Manifest config: the parsed flags plus the protocol configuration they
/// resolve to.
fn manifest(
    subcommand: &str,
    args: &impl Serialize,
    resolved: Option<&ProtocolConfigF64>,
    seed: Option<u64>,
) -> Result<RunManifest> {
    let config =
        json!({ "args": serde_json::to_value(args)?, "resolved": serde_json::to_value(resolved)? });
    RunManifest::new(subcommand, config, seed)
}

/// Uniform when absent; otherwise checked for length and scaled to unit norm.
fn schmidt_coeffs(given: &Option<Vec<f64>>, d: usize, notes: &mut Vec<String>) -> Result<Vec<f64>> {
    let Some(c) = given else {
        return Ok(vec![1.0 / (d as f64).sqrt(); d]);
    };
    if c.len() != d {
        return Err(CliError::Usage(format!(
            "--schmidt needs {d} values, got {}",
            c.len()
        )));
    }
    if c.iter().any(|x| *x <= 0.0 || !x.is_finite()) {
        return Err(CliError::Usage(
            "Schmidt coefficients must be positive and finite".into(),
        ));
    }
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        notes.push(format!(
            "Schmidt coefficients scaled to unit norm (input norm {norm})"
        ));
    }
    Ok(c.iter().map(|x| x / norm).collect())
}

fn attach_monte_carlo(
    report: &mut gme_core::ProtocolReportF64,
    protocol: &str,
    config: &ProtocolConfigF64,
    shots: Option<u64>,
) -> Result<()> {
    if let Some(shots) = shots {
        report.monte_carlo = Some(monte_carlo(protocol, config, shots, config.seed)?);
    }
    Ok(())
}

fn base_config(seed: u64, shots: Option<u64>) -> ProtocolConfigF64 {
    let config = ProtocolConfig::default().with_seed(seed);
    match shots {
        Some(s) => config.with_shots(s),
        None => config,
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Prop1Inputs {
    big_phi: Vec<[f64; 2]>,
    phi: Vec<[f64; 2]>,
    psi: Vec<[f64; 2]>,
    big_psi: Vec<[f64; 2]>,
}

fn ket_from(amps: &[[f64; 2]], qubits: usize, name: &str, path: &Path) -> Result<PureState<f64>> {
    let malformed = |reason: String| CliError::StateFile {
        path: path.to_path_buf(),
        reason: format!("{name}: {reason}"),
    };
    if amps.len() != 1 << qubits {
        return Err(malformed(format!("expected {} amplitudes", 1 << qubits)));
    }
    let dims = PartyDims::qubits(qubits).map_err(|e| malformed(e.to_string()))?;
    PureState::ket(amps.iter().map(|&[r, i]| C::new(r, i)).collect(), dims)
        .map_err(|e| malformed(e.to_string()))
}

pub fn prop1(args: &Prop1Args) -> Result<Artifact> {
    let config = base_config(args.seed.seed, args.shots)
        .with_p(args.p)
        .with_rounds(args.rounds);
    let mut m = manifest("prop1", args, Some(&config), Some(args.seed.seed))?;
    let mut report = match &args.inputs {
        None => run_prop1(&config, args.charlie_outcome)?,
        Some(path) => {
            if args.shots.is_some() {
                return Err(CliError::Usage(
                    "--shots samples the built-in example and cannot be combined with --inputs"
                        .into(),
                ));
            }
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
                path: path.clone(),
                source,
            })?;
            let inputs: Prop1Inputs =
                serde_json::from_str(&text).map_err(|e| CliError::StateFile {
                    path: path.clone(),
                    reason: e.to_string(),
                })?;
            let big_phi = ket_from(&inputs.big_phi, 2, "big_phi", path)?;
            let phi = ket_from(&inputs.phi, 1, "phi", path)?;
            let psi = ket_from(&inputs.psi, 1, "psi", path)?;
            let big_psi = ket_from(&inputs.big_psi, 2, "big_psi", path)?;
            let rho = build_prop1_general(&big_phi, &phi, &psi, &big_psi, args.p)?;
            m.notes.push(format!("state built from {}", path.display()));
            run_prop1_with(&config, &rho, &phi, &psi, args.charlie_outcome)?
        }
    };
    attach_monte_carlo(&mut report, "prop1", &config, args.shots)?;
    Ok(Artifact {
        manifest: m,
        report: serde_json::to_value(&report)?,
        csv: None,
    })
}

pub fn prop2(args: &Prop2Args) -> Result<Artifact> {
    let mut notes = Vec::new();
    let coeffs = schmidt_coeffs(&args.schmidt, 3, &mut notes)?;
    let config = base_config(args.seed.seed, args.shots)
        .with_p(args.p)
        .with_schmidt(coeffs);
    let mut m = manifest("prop2", args, Some(&config), Some(args.seed.seed))?;
    m.notes = notes;
    let mut report = run_prop2(&config)?;
    attach_monte_carlo(&mut report, "prop2", &config, args.shots)?;
    Ok(Artifact {
        manifest: m,
        report: serde_json::to_value(&report)?,
        csv: None,
    })
}

pub fn prop3(args: &Prop3Args) -> Result<Artifact> {
    let mut notes = Vec::new();
    let coeffs = schmidt_coeffs(&args.schmidt, 4, &mut notes)?;
    let mut config = base_config(args.seed.seed, args.shots).with_schmidt(coeffs);
    if let Some(w) = &args.weights {
        let w: [f64; 3] = w
            .as_slice()
            .try_into()
            .map_err(|_| CliError::Usage(format!("--weights needs 3 values, got {}", w.len())))?;
        config = config.with_weights(w);
    }
    let mut m = manifest("prop3", args, Some(&config), Some(args.seed.seed))?;
    m.notes = notes;
    let mut report = run_prop3(&config)?;
    attach_monte_carlo(&mut report, "prop3", &config, args.shots)?;
    Ok(Artifact {
        manifest: m,
        report: serde_json::to_value(&report)?,
        csv: None,
    })
}

fn sigma_mode(mode: ScanMode) -> SigmaMode {
    match mode {
        ScanMode::Conditioned => SigmaMode::ConditionedOnAb,
        ScanMode::Unconditioned => SigmaMode::Unconditioned,
    }
}

pub fn sigma(args: &SigmaArgs) -> Result<Artifact> {
    let mut notes = Vec::new();
    let coeffs = schmidt_coeffs(&args.schmidt, 2, &mut notes)?;
    let config = base_config(args.seed.seed, args.shots)
        .with_p(args.p)
        .with_schmidt(coeffs)
        .with_max_copies(args.max_copies)
        .with_sigma_mode(sigma_mode(args.mode));
    let mut m = manifest("sigma", args, Some(&config), Some(args.seed.seed))?;
    m.notes = notes;
    // the single reported run uses the stream past every Monte Carlo shot
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(u64::MAX);
    let mut report = run_sigma_adaptive(&config, &mut rng)?;
    attach_monte_carlo(&mut report, "sigma", &config, args.shots)?;
    Ok(Artifact {
        manifest: m,
        report: serde_json::to_value(&report)?,
        csv: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub p: f64,
    pub n: usize,
    pub analytic: f64,
    pub empirical: f64,
    pub abs_error: f64,
}

pub const SCAN_HEADER: &str = "p,n,analytic,empirical,abs_error";

pub fn sigma_scan_rows(
    ps: &[f64],
    n_max: usize,
    shots: u64,
    seed: u64,
    mode: ScanMode,
) -> Result<Vec<ScanRow>> {
    if ps.is_empty() {
        return Err(CliError::Usage("the p list is empty".into()));
    }
    let mut rows = Vec::new();
    for &p in ps {
        let config = ProtocolConfig::default()
            .with_p(p)
            .with_max_copies(n_max + 1)
            .with_sigma_mode(sigma_mode(mode))
            .with_shots(shots)
            .with_seed(seed);
        let summary = monte_carlo("sigma", &config, shots, seed)?;
        for n in 0..=n_max {
            let analytic = match mode {
                ScanMode::Conditioned => analytic_pn(p, n)?,
                ScanMode::Unconditioned => {
                    (1.0 - p) * analytic_pn(p, n)? + p * analytic_pn(1.0 - p, n)?
                }
            };
            let empirical = summary.success_within(n + 1);
            rows.push(ScanRow {
                p,
                n,
                analytic,
                empirical,
                abs_error: (empirical - analytic).abs(),
            });
        }
    }
    Ok(rows)
}

pub fn sigma_scan(args: &SigmaScanArgs) -> Result<Artifact> {
    let rows = sigma_scan_rows(&args.p, args.n_max, args.shots, args.seed.seed, args.mode)?;
    let mut csv = String::from(SCAN_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            format_f64(r.p),
            r.n,
            format_f64(r.analytic),
            format_f64(r.empirical),
            format_f64(r.abs_error)
        ));
    }
    let max_abs_error = rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
    let mut m = manifest("sigma-scan", args, None, Some(args.seed.seed))?;
    m.notes.push("n counts repeat copies after the first; empirical is the fraction of shots that succeeded within n".into());
    Ok(Artifact {
        manifest: m,
        report: json!({ "columns": SCAN_HEADER.split(',').collect::<Vec<_>>(), "rows": rows, "max_abs_error": max_abs_error }),
        csv: Some(csv),
    })
}

fn builtin_state(b: Builtin, p: f64) -> Result<LoadedState> {
    let third = [1.0 / 3.0f64.sqrt(); 3];
    Ok(match b {
        Builtin::Sigma => LoadedState::Density(build_sigma(p)?),
        Builtin::Prop1 => LoadedState::Density(build_prop1_example(p)?),
        Builtin::Prop2 => LoadedState::Density(build_prop2_state(&third, p)?),
        Builtin::Prop3 => LoadedState::Density(build_prop3_state(&[0.5; 4], [1.0 / 3.0; 3])?),
        Builtin::Ghz => LoadedState::Pure(ghz(3)?),
        Builtin::MergedGhz => {
            let merged = merge_chain_to_ghz(&[phi_plus(), phi_plus()])?;
            LoadedState::Pure(merged.branches[0].state.clone())
        }
        Builtin::Product => LoadedState::Pure(PureState::basis(PartyDims::qubits(3)?, &[0, 0, 0])?),
    })
}

fn load_source(src: &StateSource, p: f64, notes: &mut Vec<String>) -> Result<LoadedState> {
    match (&src.state, src.builtin) {
        (Some(path), None) => {
            let (state, note) = load_state(path)?;
            notes.extend(note);
            Ok(state)
        }
        (None, Some(b)) => builtin_state(b, p),
        _ => Err(CliError::Usage(
            "give exactly one of --state and --builtin".into(),
        )),
    }
}

pub fn certify(args: &CertifyArgs) -> Result<Artifact> {
    let mut notes = Vec::new();
    let state = load_source(&args.source, args.p, &mut notes)?;
    let (kind, report) = match &state {
        LoadedState::Pure(s) => ("pure", certify_gme_pure(s)?.1),
        LoadedState::Density(r) => {
            notes.push("mixed input: all-cut negativity is reported, no GME verdict".into());
            ("density", certify_entangled_all_cuts(r)?)
        }
    };
    let mut value = serde_json::to_value(&report)?;
    value["kind"] = json!(kind);
    value["dims"] = json!(state.dims());
    let mut m = manifest("certify", args, None, None)?;
    m.notes = notes;
    Ok(Artifact {
        manifest: m,
        report: value,
        csv: None,
    })
}

pub fn svetlichny(args: &SvetlichnyArgs) -> Result<Artifact> {
    let mut notes = Vec::new();
    let state = load_source(&args.source, args.p, &mut notes)?;
    if state.dims() != [2, 2, 2] {
        return Err(CliError::Usage(format!(
            "Svetlichny needs three qubits, got dims {:?}",
            state.dims()
        )));
    }
    let pure = match state {
        LoadedState::Pure(s) => s,
        LoadedState::Density(r) => r
            .to_pure()
            .map_err(|_| CliError::Usage("Svetlichny evaluation needs a pure state".into()))?,
    };
    let settings = match &args.angles {
        None => {
            notes.push("no settings given; GHZ-optimal settings applied".into());
            SvetlichnySettings::ghz_optimal()
        }
        Some(a) => {
            let a: [f64; 6] = a.as_slice().try_into().map_err(|_| {
                CliError::Usage(format!("--angles needs 6 values, got {}", a.len()))
            })?;
            SvetlichnySettings::from_equatorial_angles(a)
        }
    };
    let value = svetlichny_value(&pure, &settings)?;
    let mut m = manifest("svetlichny", args, None, None)?;
    m.notes = notes;
    Ok(Artifact {
        manifest: m,
        report: json!({
            "value": value,
            "classical_bound": SVETLICHNY_CLASSICAL_BOUND,
            "quantum_bound": SVETLICHNY_QUANTUM_BOUND,
            "exceeds_classical": value.abs() > SVETLICHNY_CLASSICAL_BOUND + 1e-9,
            "settings": settings,
        }),
        csv: None,
    })
}

pub fn distill(args: &DistillArgs) -> Result<Artifact> {
    let mut notes = Vec::new();
    let rho = match (args.input.fidelity, &args.input.state, args.input.residual) {
        (Some(f), None, None) => isotropic(f)?,
        (None, Some(path), None) => {
            let (state, note) = load_state(path)?;
            notes.extend(note);
            state.to_density()
        }
        (None, None, Some(p)) => {
            let outcomes = run_prop1_step(&build_prop1_example(p)?, 2, &level(2, 0)?)?;
            outcomes[0].post_state.clone().ok_or_else(|| {
                CliError::Usage(format!(
                    "Charlie's first outcome has zero probability at p = {p}"
                ))
            })?
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --fidelity, --state and --residual".into(),
            ))
        }
    };
    if rho.dims().as_slice() != [2, 2] {
        return Err(CliError::Usage(format!(
            "distillation needs two qubits, got dims {:?}",
            rho.dims().as_slice()
        )));
    }
    let trajectory = distill_pipeline(&rho, args.rounds)?;
    let mut m = manifest("distill", args, None, None)?;
    m.notes = notes;
    Ok(Artifact {
        manifest: m,
        report: json!({ "input_fidelity": bell_fidelity(&rho)?, "trajectory": trajectory }),
        csv: None,
    })
}
