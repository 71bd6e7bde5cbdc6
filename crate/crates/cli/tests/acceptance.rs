//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test -p gme-cli --test acceptance`; exits nonzero on any FAIL.

use std::process::Command;
use std::time::Instant;

use gme_cli::args::ScanMode;
use gme_cli::commands::sigma_scan_rows;
use gme_core::distill::{bell_fidelity, distill_pipeline, isotropic, recurrence_round};
use gme_core::entanglement::{
    certify_entangled_all_cuts, certify_gme_pure, enumerate_bipartitions, schmidt,
    svetlichny_value, SvetlichnySettings, SVETLICHNY_CLASSICAL_BOUND,
};
use gme_core::protocols::{
    build_prop1_example, build_prop1_general, build_prop2_state, build_prop3_state, build_sigma,
    build_sigma_prime, distribute_via_teleportation, merge_chain_to_ghz, monte_carlo,
    run_prop1_step, run_prop2, run_prop3, ProtocolConfig,
};
use gme_core::qcore::states::{ghz, ghz_type, level, phi_plus, schmidt_pair};
use gme_core::qcore::{
    fidelity_pure, measure, PartyDims, ProjectiveMeasurement, PureState, QuantumState,
};
use gme_core::{DensityOperatorF64, Result, C};

const SEED: u64 = 20_240_601;
const SHOTS: u64 = 100_000;

type Criterion = (&'static str, fn() -> Result<Check>);

struct Check {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Result<Check> {
    Ok(Check {
        pass,
        detail: detail.into(),
    })
}

fn ranks(state: &PureState<f64>) -> Result<Vec<usize>> {
    let n = state.dims().n_parties();
    enumerate_bipartitions(n)?
        .iter()
        .map(|cut| schmidt(state, cut).map(|s| s.rank))
        .collect()
}

fn success_law() -> Result<Check> {
    let start = Instant::now();
    let rows = sigma_scan_rows(
        &[0.1, 0.3, 0.5, 0.7],
        20,
        SHOTS,
        SEED,
        ScanMode::Conditioned,
    )
    .map_err(|e| gme_core::Error::Invariant(e.to_string()))?;
    let secs = start.elapsed().as_secs_f64();
    let worst = rows
        .iter()
        .filter(|r| r.n >= 1)
        .map(|r| r.abs_error)
        .fold(0.0, f64::max);
    let law = rows
        .iter()
        .all(|r| (r.analytic - (1.0 - (1.0 - r.p).powi(r.n as i32))).abs() < 1e-12);
    check(
        worst < 0.01 && secs < 60.0 && law,
        format!("max |emp - P_n| = {worst:.4} (< 0.01), runtime {secs:.1}s (< 60s)"),
    )
}

fn sigma_certainty() -> Result<Check> {
    let mut worst_p = 0.0f64;
    let mut worst_f = 0.0f64;
    for p in [0.1f64, 0.3, 0.5, 0.7, 0.9] {
        let rho = build_sigma(p)?;
        let m = ProjectiveMeasurement::level_groups(vec![0], 3, &[&[0, 1], &[2]])?;
        let out = measure(&rho, &m)?;
        worst_p = worst_p
            .max((out[0].probability - (1.0 - p)).abs())
            .max((out[1].probability - p).abs());
        // each outcome leaves a Bell pair on levels {0, 1} of the two kept parties
        for (o, keep) in [(&out[0], [0usize, 1usize]), (&out[1], [1, 2])] {
            let pair = o.post_state.as_ref().expect("post state").reduced(&keep)?;
            let d = pair.dims().as_slice().to_vec();
            let m = pair.matrix().as_slice();
            let f: f64 = (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .map(|(i, j)| m[(i * d[1] + i) * d[0] * d[1] + j * d[1] + j].re)
                .sum::<f64>()
                / 2.0;
            worst_f = worst_f.max((f - 1.0).abs());
        }
    }
    check(
        worst_p < 1e-9 && worst_f < 1e-9,
        format!("|P - (1-p, p)| = {worst_p:.1e}, |F - 1| = {worst_f:.1e} (both < 1e-9)"),
    )
}

fn prop2_end_to_end() -> Result<Check> {
    let third = 1.0 / 3.0f64.sqrt();
    let config = ProtocolConfig::default()
        .with_p(0.5)
        .with_schmidt(vec![third; 3]);
    let r = run_prop2(&config)?;
    let psi = r.final_pure().expect("accepted branch");
    let rank_ok = ranks(psi)?.iter().all(|&k| k == 2);
    let exact = r
        .steps
        .iter()
        .find(|s| s.copy_index == 1 && s.accepted)
        .map_or(f64::NAN, |s| s.probability);
    let mc = monte_carlo("prop2", &config, SHOTS, SEED)?;
    let (rate, _) = mc.frequency_where(|b| b.label.contains("copy1[C=1]"));
    let ok = rank_ok && (exact - 1.0 / 3.0).abs() < 1e-9 && (rate - 1.0 / 3.0).abs() < 0.01;
    check(
        ok,
        format!(
            "rank 2 in 3 cuts: {rank_ok}, exact {exact:.12} (1/3 ± 1e-9), empirical {rate:.4} (1/3 ± 0.01)"
        ),
    )
}

fn merge_identity() -> Result<Check> {
    let mut worst_f = 0.0f64;
    let mut worst_sum = 0.0f64;
    for (a, b) in [
        (0.8, 0.6),
        (0.6, 0.8),
        (0.95, (1.0 - 0.9025f64).sqrt()),
        (1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()),
    ] {
        let pair = schmidt_pair(a, b);
        let m = merge_chain_to_ghz(&[pair.clone(), pair])?;
        let [s0, s1] = m.alignments[0].schmidt;
        let target = ghz_type(3, s0 * s0, s1 * s1)?;
        for br in &m.branches {
            worst_f = worst_f.max((br.state.overlap(&target)? - 1.0).abs());
        }
        worst_sum = worst_sum.max((m.total_probability() - 1.0).abs());
    }
    check(
        worst_f < 1e-9 && worst_sum < 1e-9,
        format!("|F - 1| = {worst_f:.1e}, |sum P - 1| = {worst_sum:.1e} (both < 1e-9), a = b and a != b"),
    )
}

fn prop3_end_to_end() -> Result<Check> {
    let config = ProtocolConfig::default()
        .with_schmidt(vec![0.5; 4])
        .with_weights([1.0 / 3.0; 3]);
    let r = run_prop3(&config)?;
    let psi = r.final_pure().expect("accepted branch");
    let h = 0.5f64.sqrt();
    let target = ghz_type(4, h.powi(3), h.powi(3))?;
    let err = (psi.overlap(&target)? - 1.0).abs();
    let k = ranks(psi)?;
    let rank_ok = k.len() == 7 && k.iter().all(|&x| x == 2);
    check(
        err < 1e-9 && rank_ok,
        format!("|F - 1| = {err:.1e} (< 1e-9), rank 2 in all 7 cuts: {rank_ok}"),
    )
}

fn builder_premises() -> Result<Check> {
    let start = Instant::now();
    let grid: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let third = 1.0 / 3.0f64.sqrt();
    let phi = PureState::<f64>::ket(
        vec![C::new(0.6, 0.0), C::new(0.0, 0.8)],
        PartyDims::qubits(1)?,
    )?;
    let psi = PureState::<f64>::ket_real(&[0.8, -0.6], PartyDims::qubits(1)?)?;
    let mut states: Vec<DensityOperatorF64> = Vec::new();
    for &p in &grid {
        states.push(build_prop1_example(p)?);
        states.push(build_prop1_general(
            &schmidt_pair(0.8, 0.6),
            &phi,
            &psi,
            &phi_plus(),
            p,
        )?);
        states.push(build_prop2_state(&[third; 3], p)?);
        states.push(build_sigma(p)?);
        states.push(build_sigma_prime(&schmidt_pair(0.8, 0.6), p)?);
    }
    for &w0 in &grid {
        for &w1 in &grid {
            let w2 = 1.0 - w0 - w1;
            if w2 > 0.05 {
                states.push(build_prop3_state(&[0.5; 4], [w0, w1, w2])?);
            }
        }
    }
    let mut worst = f64::INFINITY;
    for rho in &states {
        worst = worst.min(certify_entangled_all_cuts(rho)?.min_negativity());
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst > 1e-6 && secs < 30.0,
        format!(
            "{} states, min negativity {worst:.3e} (> 1e-6), runtime {secs:.1}s (< 30s)",
            states.len()
        ),
    )
}

fn distillation() -> Result<Check> {
    let mut worst = 0.0f64;
    for k in 0..9 {
        let f = 0.55 + 0.05 * k as f64;
        let r = (1.0 - f) / 3.0;
        let expect = (f * f + r * r) / (f * f + 2.0 * f * r + 5.0 * r * r);
        let out = recurrence_round(&isotropic(f)?)?;
        worst = worst.max((bell_fidelity(&out.state)? - expect).abs());
    }
    let rho = build_prop1_example(0.5f64)?;
    let residual = run_prop1_step(&rho, 2, &level(2, 0)?)?[0]
        .post_state
        .clone()
        .expect("residual");
    let fids = distill_pipeline(&residual, 3)?.fidelities();
    let increasing = fids.len() == 4 && fids.windows(2).all(|w| w[1] > w[0]);
    let start_ok = (fids[0] - 2.0 / 3.0).abs() < 1e-9;
    let shown: Vec<String> = fids.iter().map(|f| format!("{f:.4}")).collect();
    check(
        worst < 1e-9 && increasing && start_ok,
        format!(
            "map error {worst:.1e} (< 1e-9), trajectory [{}] strictly increasing",
            shown.join(", ")
        ),
    )
}

fn nonlocality() -> Result<Check> {
    let m = merge_chain_to_ghz(&[phi_plus::<f64>(), phi_plus()])?;
    let settings = SvetlichnySettings::ghz_optimal();
    let mut worst = 0.0f64;
    let mut min_value = f64::INFINITY;
    for br in &m.branches {
        let v = svetlichny_value(&br.state, &settings)?;
        worst = worst.max((v - 4.0 * 2f64.sqrt()).abs());
        min_value = min_value.min(v);
    }
    check(
        worst < 1e-6 && min_value > SVETLICHNY_CLASSICAL_BOUND,
        format!("|S - 4√2| = {worst:.1e} (< 1e-6) in every merge branch, S > 4"),
    )
}

fn teleportation() -> Result<Check> {
    let g = ghz::<f64>(3)?;
    let branches = distribute_via_teleportation(&g, &phi_plus(), &phi_plus())?;
    let mut worst = 0.0f64;
    let mut gme = true;
    for b in &branches {
        worst = worst.max((fidelity_pure(&b.state.to_density(), &g)? - 1.0).abs());
        gme &= certify_gme_pure(&b.state)?.0;
    }
    check(
        branches.len() == 16 && worst < 1e-9 && gme,
        format!(
            "{} branches, |F - 1| = {worst:.1e} (< 1e-9), GME certified: {gme}",
            branches.len()
        ),
    )
}

fn determinism() -> Result<Check> {
    let runs: [&[&str]; 6] = [
        &["prop1", "--p", "0.5"],
        &["prop2", "--shots", "20000", "--seed", "5"],
        &["prop3", "--shots", "20000", "--seed", "5"],
        &["sigma", "--p", "0.3", "--shots", "20000", "--seed", "5"],
        &[
            "sigma-scan",
            "--p",
            "0.3,0.5",
            "--n-max",
            "10",
            "--shots",
            "20000",
            "--seed",
            "5",
        ],
        &["svetlichny", "--builtin", "merged-ghz"],
    ];
    let mut identical = 0;
    for args in runs {
        let out = || {
            Command::new(env!("CARGO_BIN_EXE_gme"))
                .args(args)
                .env_remove("GME_SEED")
                .output()
                .expect("spawn gme")
        };
        let (a, b) = (out(), out());
        if a.status.success() && !a.stdout.is_empty() && a.stdout == b.stdout {
            identical += 1;
        }
    }
    check(
        identical == runs.len(),
        format!(
            "{identical}/{} invocations byte-identical across two runs",
            runs.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("success law P_n = 1-(1-p)^n", success_law),
        ("sigma yields a Bell pair with certainty", sigma_certainty),
        ("qutrit two-copy protocol", prop2_end_to_end),
        (
            "merge of two pairs gives a^2|000> + b^2|111>",
            merge_identity,
        ),
        (
            "four-party chain gives a^3|0000> + b^3|1111>",
            prop3_end_to_end,
        ),
        ("builder states entangled in every cut", builder_premises),
        ("recurrence map and residual trajectory", distillation),
        ("Svetlichny value of merged GHZ", nonlocality),
        ("teleported GHZ distribution", teleportation),
        ("CLI determinism", determinism),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = match run() {
            Ok(c) => (c.pass, c.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {}: {name}: {detail}",
            if pass { "PASS" } else { "FAIL" },
            k + 1
        );
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
