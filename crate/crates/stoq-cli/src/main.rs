//! `stoq` — stoquastic Hamiltonian toolbox.
//!
//! Subcommands: `models`, `check`, `exact`, `walk`, `gadget`, `clock`,
//! `amproto`, `compare`. Every run emits a JSON document containing the
//! fully-resolved configuration and the result; identical configuration
//! and seed produce byte-identical output. Exit codes: 0 success, 2 for
//! precondition/promise violations (with a machine-readable error
//! object), 1 for internal errors.

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use stoq::amproto::protocol::{run_gs_protocol, ProverStrategy};
use stoq::amproto::{BinaryEnsemble, CountingInstance};
use stoq::clock::{build_clock_hamiltonian, ReversibleCircuit};
use stoq::exact;
use stoq::gadget;
use stoq::gmatrix::{GMatrix, GMode};
use stoq::ham::HamiltonianJson;
use stoq::models;
use stoq::walk;
use stoq::{LocalHamiltonian, StoqError};

#[derive(Parser)]
#[command(name = "stoq", version, about = "stoquastic local Hamiltonian toolbox")]
struct Cli {
    /// Optional JSON config file; explicit flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path for the result JSON (stdout when omitted).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a named model Hamiltonian.
    Models(ModelsArgs),
    /// Stoquasticity report for a Hamiltonian file.
    Check(CheckArgs),
    /// Dense spectral summary of a Hamiltonian file.
    Exact(ExactArgs),
    /// Post-selected random-walk estimate of mu(G).
    Walk(WalkArgs),
    /// Perturbative gadget compilation.
    Gadget(GadgetArgs),
    /// Clock Hamiltonian of a reversible verifier circuit.
    Clock(ClockArgs),
    /// Counting / hashing protocol simulation.
    Amproto(AmprotoArgs),
    /// Walk estimate vs exact oracle on the same instance.
    Compare(CompareArgs),
}

#[derive(Args, Serialize, Clone)]
struct ModelsArgs {
    /// transverse_ising | heisenberg_afm | ferro_xy | ising_3d_classical
    #[arg(long)]
    name: String,
    #[arg(long)]
    n: Option<usize>,
    /// Lattice side for ising_3d_classical.
    #[arg(long)]
    l: Option<usize>,
    /// ZZ coupling strength.
    #[arg(long)]
    j: Option<f64>,
    /// Transverse field strength.
    #[arg(long)]
    hx: Option<f64>,
    /// XX coupling (ferro_xy).
    #[arg(long)]
    p: Option<f64>,
    /// YY coupling (ferro_xy).
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Serialize, Clone)]
struct CheckArgs {
    /// Hamiltonian JSON file.
    #[arg(short, long)]
    input: PathBuf,
    /// Scan only the individual term matrices.
    #[arg(long)]
    termwise: bool,
}

#[derive(Args, Serialize, Clone)]
struct ExactArgs {
    #[arg(short, long)]
    input: PathBuf,
}

#[derive(Args, Serialize, Clone)]
struct WalkArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Walk length L; auto-sized from r_gap when omitted.
    #[arg(long)]
    steps: Option<usize>,
    /// Number of clean walks w; auto-sized when omitted.
    #[arg(long)]
    walks: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Assumed inverse log-gap r of G.
    #[arg(long)]
    r_gap: Option<f64>,
    /// Accuracy exponent c in w = 2 n^{2c} ln 6.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    max_restarts: Option<u64>,
}

#[derive(Args, Serialize, Clone)]
struct GadgetArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// subdivide | normalize | triplex | kkr | full
    #[arg(long)]
    stage: String,
    #[arg(long)]
    delta: Option<f64>,
    /// Mediator penalty for the subdivide stage (derived from delta when
    /// omitted).
    #[arg(long)]
    delta_gap: Option<f64>,
    /// Also write the compiled Hamiltonian alone to this path.
    #[arg(long)]
    emit_ham: Option<PathBuf>,
}

#[derive(Args, Serialize, Clone)]
struct ClockArgs {
    /// Circuit JSON file: {r, k_anc, s, q_out, gates: [[c1,c2,t],...]}.
    #[arg(short, long)]
    input: PathBuf,
    /// Also write the clock Hamiltonian alone to this path.
    #[arg(long)]
    emit_ham: Option<PathBuf>,
}

#[derive(Args, Serialize, Clone)]
struct AmprotoArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// norm_shift | walk_shift
    #[arg(long, default_value = "norm_shift")]
    mode: String,
    /// Binary digits per matrix element.
    #[arg(long)]
    m: Option<usize>,
    /// Cycle length L (even).
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    mu_plus: Option<f64>,
    #[arg(long)]
    mu_minus: Option<f64>,
    /// honest | always_claim | random_preimage
    #[arg(long)]
    prover: Option<String>,
    /// Monte-Carlo queries per run.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Include the full query transcript in the output.
    #[arg(long)]
    transcript: bool,
}

#[derive(Args, Serialize, Clone)]
struct CompareArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    walks: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    r_gap: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    /// Comparison tolerance on |mu_est - mu(G)|.
    #[arg(long)]
    tol: Option<f64>,
}

/// Optional config file: per-subcommand parameter blocks. Unknown keys
/// are rejected.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct FileConfig {
    models: serde_json::Value,
    check: serde_json::Value,
    exact: serde_json::Value,
    walk: serde_json::Value,
    gadget: serde_json::Value,
    clock: serde_json::Value,
    amproto: serde_json::Value,
    compare: serde_json::Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(doc) => {
            let text = format!("{:#}\n", doc);
            match &cli.output {
                Some(path) => {
                    if let Err(e) = fs::write(path, text) {
                        eprintln!("cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(RunError::Domain(e)) => {
            let doc = json!({"error": {"kind": error_kind(&e), "message": e.to_string()}});
            let text = format!("{:#}\n", doc);
            match &cli.output {
                Some(path) => {
                    let _ = fs::write(path, &text);
                }
                None => print!("{text}"),
            }
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(RunError::Internal(e)) => {
            eprintln!("internal error: {e}");
            ExitCode::from(1)
        }
    }
}

enum RunError {
    /// Precondition and promise violations: exit code 2.
    Domain(StoqError),
    /// I/O and malformed invocations: exit code 1.
    Internal(anyhow::Error),
}

impl From<StoqError> for RunError {
    fn from(e: StoqError) -> Self {
        RunError::Domain(e)
    }
}

fn error_kind(e: &StoqError) -> &'static str {
    match e {
        StoqError::DimensionMismatch { .. } => "dimension_mismatch",
        StoqError::QubitOutOfRange { .. } => "qubit_out_of_range",
        StoqError::NotHermitian { .. } => "not_hermitian",
        StoqError::LocalityExceeded { .. } => "locality_exceeded",
        StoqError::BadSupport { .. } => "bad_support",
        StoqError::CapacityExceeded { .. } => "capacity_exceeded",
        StoqError::NotStoquastic { .. } => "not_stoquastic",
        StoqError::NotTermwiseStoquastic { .. } => "not_termwise_stoquastic",
        StoqError::NoConvergence { .. } => "no_convergence",
        StoqError::RowSumOutOfRange { .. } => "row_sum_out_of_range",
        StoqError::PostSelectionFailure { .. } => "post_selection_failure",
        StoqError::Precondition(_) => "precondition",
        StoqError::UnknownModel(_) => "unknown_model",
        StoqError::ResolventSingularity { .. } => "resolvent_singularity",
        StoqError::InvalidCircuit(_) => "invalid_circuit",
        StoqError::BadInput(_) => "bad_input",
    }
}

fn load_config(cli: &Cli) -> Result<FileConfig, RunError> {
    match &cli.config {
        None => Ok(FileConfig::default()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| RunError::Internal(anyhow::anyhow!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| StoqError::BadInput(format!("config: {e}")).into())
        }
    }
}

/// Pull a field from a config block (used when the flag was omitted).
fn cfg_get<T: serde::de::DeserializeOwned>(block: &serde_json::Value, key: &str) -> Option<T> {
    block
        .as_object()
        .and_then(|o| o.get(key))
        .and_then(|v| serde_json::from_value(v.clone()).ok())
}

/// Read a Hamiltonian from a bare `{n, k, terms}` file or from a result
/// document produced by `models`, `clock`, or `gadget` (the Hamiltonian is
/// found under `result`, `result.hamiltonian`, or `result.compiled`).
fn read_hamiltonian(path: &PathBuf) -> Result<LocalHamiltonian, RunError> {
    let text = fs::read_to_string(path)
        .map_err(|e| RunError::Internal(anyhow::anyhow!("{}: {e}", path.display())))?;
    if let Ok(h) = LocalHamiltonian::from_json_str(&text) {
        return Ok(h);
    }
    let doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| StoqError::BadInput(e.to_string()))?;
    for inner in [
        doc.get("result"),
        doc.get("result").and_then(|r| r.get("hamiltonian")),
        doc.get("result").and_then(|r| r.get("compiled")),
    ]
    .into_iter()
    .flatten()
    {
        if let Ok(j) = serde_json::from_value::<HamiltonianJson>(inner.clone()) {
            return Ok(LocalHamiltonian::try_from(j)?);
        }
    }
    Err(StoqError::BadInput(format!(
        "{} holds neither a Hamiltonian file nor a result document containing one",
        path.display()
    ))
    .into())
}

fn run(cli: &Cli) -> Result<serde_json::Value, RunError> {
    let file_cfg = load_config(cli)?;
    match &cli.command {
        Command::Models(a) => {
            let block = &file_cfg.models;
            let params = models::ModelParams {
                n: a.n.or_else(|| cfg_get(block, "n")).unwrap_or(2),
                l: a.l.or_else(|| cfg_get(block, "l")).unwrap_or(2),
                j: a.j.or_else(|| cfg_get(block, "j")).unwrap_or(1.0),
                h: a.hx.or_else(|| cfg_get(block, "hx")).unwrap_or(1.0),
                p: a.p.or_else(|| cfg_get(block, "p")).unwrap_or(1.0),
                q: a.q.or_else(|| cfg_get(block, "q")).unwrap_or(1.0),
                seed: a.seed.or_else(|| cfg_get(block, "seed")).unwrap_or(0),
            };
            let h = models::model_builder(&a.name, &params)?;
            Ok(json!({
                "config": {
                    "subcommand": "models",
                    "name": a.name,
                    "n": params.n, "l": params.l, "j": params.j,
                    "hx": params.h, "p": params.p, "q": params.q,
                    "seed": params.seed,
                },
                "result": HamiltonianJson::from(&h),
            }))
        }

        Command::Check(a) => {
            let h = read_hamiltonian(&a.input)?;
            let report = h.check_stoquastic(a.termwise)?;
            Ok(json!({
                "config": {
                    "subcommand": "check",
                    "input": a.input,
                    "termwise": a.termwise,
                },
                "result": report,
            }))
        }

        Command::Exact(a) => {
            let h = read_hamiltonian(&a.input)?;
            let summary = exact::diagonalize_dense(&h)?;
            Ok(json!({
                "config": {"subcommand": "exact", "input": a.input},
                "result": summary,
            }))
        }

        Command::Walk(a) => {
            let block = &file_cfg.walk;
            let h = read_hamiltonian(&a.input)?;
            let g = GMatrix::from_hamiltonian(&h, GMode::WalkShift)?;
            let params = resolve_walk_params(
                h.n(),
                a.steps.or_else(|| cfg_get(block, "steps")),
                a.walks.or_else(|| cfg_get(block, "walks")),
                a.seed.or_else(|| cfg_get(block, "seed")).unwrap_or(0),
                a.r_gap.or_else(|| cfg_get(block, "r_gap")).unwrap_or(1.0),
                a.c.or_else(|| cfg_get(block, "c")).unwrap_or(1.0),
                a.max_restarts.or_else(|| cfg_get(block, "max_restarts")),
            );
            let outcome = walk::run_postselected(&g, &params)?;
            Ok(json!({
                "config": {
                    "subcommand": "walk",
                    "input": a.input,
                    "steps": params.steps,
                    "walks": params.walks,
                    "seed": params.seed,
                    "r_gap": params.r_gap,
                    "max_restarts": params.max_restarts,
                    "scale": g.scale(),
                },
                "result": outcome,
            }))
        }

        Command::Gadget(a) => run_gadget(a, &file_cfg),

        Command::Clock(a) => {
            let text = fs::read_to_string(&a.input)
                .map_err(|e| RunError::Internal(anyhow::anyhow!("{}: {e}", a.input.display())))?;
            let circuit: ReversibleCircuit = serde_json::from_str(&text)
                .map_err(|e| StoqError::BadInput(format!("circuit: {e}")))?;
            let instance = build_clock_hamiltonian(&circuit)?;
            let ham_json = HamiltonianJson::from(&instance.hamiltonian);
            if let Some(path) = &a.emit_ham {
                fs::write(path, format!("{}\n", instance.hamiltonian.to_json_string()))
                    .map_err(|e| RunError::Internal(e.into()))?;
            }
            Ok(json!({
                "config": {"subcommand": "clock", "input": a.input},
                "result": {
                    "t_gates": instance.t_gates,
                    "coin_range": [instance.coin_range.start, instance.coin_range.end],
                    "ancilla_range": [instance.ancilla_range.start, instance.ancilla_range.end],
                    "witness_range": [instance.witness_range.start, instance.witness_range.end],
                    "clock_range": [instance.clock_range.start, instance.clock_range.end],
                    "hamiltonian": ham_json,
                },
            }))
        }

        Command::Amproto(a) => {
            let block = &file_cfg.amproto;
            let h = read_hamiltonian(&a.input)?;
            let mode = match a.mode.as_str() {
                "norm_shift" => GMode::NormShift,
                "walk_shift" => GMode::WalkShift,
                other => {
                    return Err(StoqError::BadInput(format!("unknown mode {other}")).into())
                }
            };
            let m = a.m.or_else(|| cfg_get(block, "m")).unwrap_or(2);
            let l = a.l.or_else(|| cfg_get(block, "l")).unwrap_or(2);
            let mu_plus = a.mu_plus.or_else(|| cfg_get(block, "mu_plus")).unwrap_or(0.75);
            let mu_minus = a
                .mu_minus
                .or_else(|| cfg_get(block, "mu_minus"))
                .unwrap_or(0.5);
            let prover = match a
                .prover
                .clone()
                .or_else(|| cfg_get(block, "prover"))
                .unwrap_or_else(|| "honest".into())
                .as_str()
            {
                "honest" => ProverStrategy::Honest,
                "always_claim" => ProverStrategy::AlwaysClaim,
                "random_preimage" => ProverStrategy::RandomPreimage,
                other => {
                    return Err(StoqError::BadInput(format!("unknown prover {other}")).into())
                }
            };
            let trials = a.trials.or_else(|| cfg_get(block, "trials")).unwrap_or(400);
            let seed = a.seed.or_else(|| cfg_get(block, "seed")).unwrap_or(0);

            let g = GMatrix::from_hamiltonian(&h, mode)?;
            let ensemble = BinaryEnsemble::new(&g, m)?;
            let instance = CountingInstance::new(ensemble, l, mu_plus, mu_minus)?;
            let omega = instance.count_omega_bruteforce()?;
            let outcome = run_gs_protocol(&instance, prover, trials, seed)?;
            let mut result = json!({
                "instance": instance.summary(),
                "omega_size": omega,
                "accept": outcome.accept,
                "hits": outcome.hits,
                "trials": outcome.trials,
                "hit_fraction": outcome.hit_fraction,
                "threshold": outcome.threshold,
                "b": outcome.b,
                "compressed": outcome.compressed,
            });
            if a.transcript {
                result["queries"] = serde_json::to_value(&outcome.queries)
                    .map_err(|e| RunError::Internal(e.into()))?;
            }
            Ok(json!({
                "config": {
                    "subcommand": "amproto",
                    "input": a.input,
                    "mode": a.mode,
                    "m": m, "l": l,
                    "mu_plus": mu_plus, "mu_minus": mu_minus,
                    "prover": format!("{prover:?}"),
                    "trials": trials,
                    "seed": seed,
                },
                "result": result,
            }))
        }

        Command::Compare(a) => {
            let block = &file_cfg.compare;
            let h = read_hamiltonian(&a.input)?;
            let g = GMatrix::from_hamiltonian(&h, GMode::WalkShift)?;
            let params = resolve_walk_params(
                h.n(),
                a.steps.or_else(|| cfg_get(block, "steps")),
                a.walks.or_else(|| cfg_get(block, "walks")),
                a.seed.or_else(|| cfg_get(block, "seed")).unwrap_or(0),
                a.r_gap.or_else(|| cfg_get(block, "r_gap")).unwrap_or(1.0),
                a.c.or_else(|| cfg_get(block, "c")).unwrap_or(1.0),
                None,
            );
            let tol = a.tol.or_else(|| cfg_get(block, "tol")).unwrap_or(0.05);
            let outcome = walk::run_postselected(&g, &params)?;
            let summary = exact::diagonalize_dense(&h)?;
            let mu_exact = 0.5 * (1.0 - summary.lambda0 / g.scale());
            let diff = (outcome.mu_est - mu_exact).abs();
            Ok(json!({
                "config": {
                    "subcommand": "compare",
                    "input": a.input,
                    "steps": params.steps,
                    "walks": params.walks,
                    "seed": params.seed,
                    "r_gap": params.r_gap,
                    "tol": tol,
                },
                "result": {
                    "mu_est": outcome.mu_est,
                    "mu_exact": mu_exact,
                    "lambda0": summary.lambda0,
                    "scale": g.scale(),
                    "diff": diff,
                    "within_tol": diff <= tol,
                    "attempts": outcome.attempts,
                    "success_rate": outcome.success_rate,
                },
            }))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn resolve_walk_params(
    n: usize,
    steps: Option<usize>,
    walks: Option<usize>,
    seed: u64,
    r_gap: f64,
    c: f64,
    max_restarts: Option<u64>,
) -> walk::WalkParams {
    let mut params = walk::WalkParams::auto(n, r_gap, c, seed);
    if let Some(s) = steps {
        params.steps = s;
    }
    if let Some(w) = walks {
        params.walks = w;
    }
    if let Some(m) = max_restarts {
        params.max_restarts = m;
    }
    params
}

fn run_gadget(a: &GadgetArgs, file_cfg: &FileConfig) -> Result<serde_json::Value, RunError> {
    let block = &file_cfg.gadget;
    let h = read_hamiltonian(&a.input)?;
    let delta = a.delta.or_else(|| cfg_get(block, "delta")).unwrap_or(0.15);
    let delta_gap = a.delta_gap.or_else(|| cfg_get(block, "delta_gap"));

    let mut stages: Vec<serde_json::Value> = Vec::new();
    let n_data = h.n();
    let result = match a.stage.as_str() {
        "subdivide" => {
            let dg = delta_gap.unwrap_or_else(|| subdivide_auto_delta(&h, delta));
            gadget::subdivision_reduce(&h, dg)?
        }
        "normalize" => gadget::normalize_3local(&h, delta)?,
        "triplex" => gadget::triple_x_reduce(&h, delta)?,
        "kkr" => gadget::kkr_3to2_reduce(&h, delta)?,
        "full" => {
            let mut current = h.clone();
            let mut omega_total = 0.0;
            let mut map = Vec::new();
            while current.terms().iter().any(|t| t.arity() > 3) {
                let dg = delta_gap.unwrap_or_else(|| subdivide_auto_delta(&current, delta));
                let r = gadget::subdivision_reduce(&current, dg)?;
                stages.push(json!({"stage": "subdivide", "summary": r.summary(n_data)}));
                omega_total += r.omega_shift;
                map.extend(r.mediator_map.clone());
                current = r.compiled;
            }
            let r = gadget::normalize_3local(&current, delta)?;
            stages.push(json!({"stage": "normalize", "summary": r.summary(n_data)}));
            omega_total += r.omega_shift;
            map.extend(r.mediator_map.clone());
            current = r.compiled;

            let r = gadget::triple_x_reduce(&current, delta)?;
            stages.push(json!({"stage": "triplex", "summary": r.summary(n_data)}));
            omega_total += r.omega_shift;
            map.extend(r.mediator_map.clone());
            current = r.compiled;

            let r = gadget::kkr_3to2_reduce(&current, delta)?;
            stages.push(json!({"stage": "kkr", "summary": r.summary(n_data)}));
            omega_total += r.omega_shift;
            map.extend(r.mediator_map.clone());

            let mut full = gadget::GadgetResult {
                compiled: r.compiled,
                omega_shift: omega_total,
                mediator_map: map,
                verified_error: None,
            };
            if full.compiled.n() <= gadget::VERIFY_CAP && h.n() <= gadget::VERIFY_CAP {
                let _ = full.verify_against(&h);
            }
            full
        }
        other => return Err(StoqError::BadInput(format!("unknown stage {other}")).into()),
    };

    if let Some(path) = &a.emit_ham {
        fs::write(path, format!("{}\n", result.compiled.to_json_string()))
            .map_err(|e| RunError::Internal(e.into()))?;
    }
    Ok(json!({
        "config": {
            "subcommand": "gadget",
            "input": a.input,
            "stage": a.stage,
            "delta": delta,
            "delta_gap": delta_gap,
        },
        "result": {
            "summary": result.summary(n_data),
            "stages": stages,
            "compiled": HamiltonianJson::from(&result.compiled),
        },
    }))
}

/// Penalty for a standalone subdivide stage when none was given: solve
/// `Delta = (100/delta) (sqrt(Delta) s + w)` for the pair/bystander norms
/// of the pending decomposition.
fn subdivide_auto_delta(h: &LocalHamiltonian, delta: f64) -> f64 {
    let keep = h.k().div_ceil(2);
    let mut s = 0.0f64;
    let mut w = 0.0f64;
    for term in h.terms() {
        let norm = term.spectral_norm();
        if term.arity() <= keep {
            w += norm;
        } else {
            // each entry contributes pair norms ~ sqrt(weight)
            let m = term.matrix.map(|v| v.re);
            let dim = m.nrows();
            let max_diag = (0..dim)
                .map(|i| m[(i, i)])
                .fold(f64::NEG_INFINITY, f64::max)
                .max(0.0);
            for x in 0..dim {
                for y in x..dim {
                    let v = if x == y { m[(x, x)] - max_diag } else { m[(x, y)] };
                    if v == 0.0 {
                        continue;
                    }
                    let weight = if x == y { -v / 2.0 } else { -v };
                    s += 2.0 * weight.sqrt();
                    w += 2.0 * weight;
                }
            }
        }
    }
    let factor = 100.0 / delta;
    let sqrt_delta = 0.5 * (factor * s + ((factor * s).powi(2) + 4.0 * factor * w).sqrt());
    (sqrt_delta * sqrt_delta).max(1.0)
}
