// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Batch runner behind the `cavity-cnot` binary.
//!
//! Every subcommand reads an optional TOML file (one section per command),
//! applies flag overrides, validates, runs, and writes JSON (or CSV for
//! `sweep`) to `--out` or stdout. Exit codes: 0 pass, 1 usage or config
//! error, 2 acceptance failure, 3 numerical failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classical_drive::{full_solution, rabi_block, rotated_frame_counterpart, synthesize, RabiParams, SearchConfig};
use crate::closed_form::{compare_with_expm, ExpInteraction};
use crate::error::Error;
use crate::frame::FrameGenerator;
use crate::gates::{ccnot, ccnot_network, ccnot_network_with, pauli_x, v_gate, walsh};
use crate::linalg::{c, expm, ComplexMatrix};
use crate::model::{DriveTone, HilbertLayout, ModelParams};
use crate::pipeline::{run_gate, sweep, GateReport, GateRunConfig, DEFAULT_FOCK_CUTOFF};
use crate::propagator::{ground_sector_gate, integrate_ansatz, IntegratorConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_ACCEPTANCE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cavity-cnot", version, about = "Two-atom cavity CNOT/CCNOT construction and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with `[verify]`, `[gate]`, `[sweep]`, `[ccnot]`, `[rabi]`, `[integrator]` sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for parallel work.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub fock_cutoff: Option<usize>,
    /// Drive strength; `sweep` accepts a comma-separated list.
    #[arg(long, global = true, value_delimiter = ',')]
    pub h1: Option<Vec<f64>>,
    /// Acceptance tolerance of the selected command.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Closed-form exchange exponential against expm.
    VerifyClosedForm {
        /// Negate atomic block `i,j` of the closed form (negative control).
        #[arg(long, hide = true, value_delimiter = ',')]
        corrupt_block: Option<Vec<usize>>,
    },
    /// One simulated gate run converted to CNOT.
    Gate,
    /// Gate runs over a grid of drive strengths, as CSV.
    Sweep,
    /// Three-qubit network against the Toffoli matrix.
    Ccnot,
    /// Classical-drive closed forms and one-qubit gate synthesis.
    Rabi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub g: f64,
    pub fock_cutoff: usize,
    pub times: Vec<f64>,
    pub tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { g: 1.0, fock_cutoff: 16, times: vec![0.1, 0.5, 1.0, 2.0], tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GateSection {
    pub h1: f64,
    pub phi1: f64,
    pub fock_cutoff: usize,
    /// Max entry distance of the extracted gate from `diag(1, 1, 1, −1)`.
    pub tol: f64,
}

impl Default for GateSection {
    fn default() -> Self {
        Self { h1: 0.01, phi1: 0.0, fock_cutoff: DEFAULT_FOCK_CUTOFF, tol: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub h1: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { h1: vec![0.04, 0.02, 0.01, 0.005] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CcnotSection {
    pub tol: f64,
}

impl Default for CcnotSection {
    fn default() -> Self {
        Self { tol: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RabiSection {
    pub seed: u64,
    pub draws: usize,
    /// Bound for the closed-form block against expm.
    pub block_tol: f64,
    /// Bound for the closed-form solution against `g = 0` integration.
    pub integration_tol: f64,
    pub duration: f64,
    pub search: SearchConfig,
}

impl Default for RabiSection {
    fn default() -> Self {
        Self { seed: 7, draws: 50, block_tol: 1e-13, integration_tol: 1e-8, duration: 20.0, search: SearchConfig::default() }
    }
}

/// All command parameters; each section defaults independently.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub verify: VerifyConfig,
    pub gate: GateSection,
    pub sweep: SweepSection,
    pub ccnot: CcnotSection,
    pub rabi: RabiSection,
    pub integrator: IntegratorConfig,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Acceptance(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Acceptance(_) => EXIT_ACCEPTANCE,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Acceptance(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Stiffness { .. } | Error::Accuracy { .. } => Failure::Numerical(e.to_string()),
            Error::Infidelity { .. } => Failure::Acceptance(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
    }

    /// Applies flag overrides for `command`.
    pub fn apply(&mut self, command: &Command, args: &CommonArgs) -> Result<(), Failure> {
        if let Some(n) = args.fock_cutoff {
            self.verify.fock_cutoff = n;
            self.gate.fock_cutoff = n;
        }
        if let Some(h) = &args.h1 {
            match command {
                Command::Sweep => self.sweep.h1 = h.clone(),
                _ if h.len() == 1 => self.gate.h1 = h[0],
                _ => return Err(Failure::Config("--h1 takes a single value outside `sweep`".into())),
            }
        }
        if let Some(tol) = args.tol {
            match command {
                Command::VerifyClosedForm { .. } => self.verify.tol = tol,
                Command::Gate | Command::Sweep => self.gate.tol = tol,
                Command::Ccnot => self.ccnot.tol = tol,
                Command::Rabi => self.rabi.search.target_fidelity = 1.0 - tol,
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let bad = |m: String| Err(Failure::Config(m));
        HilbertLayout::new(2, self.verify.fock_cutoff)?;
        HilbertLayout::new(2, self.gate.fock_cutoff)?;
        self.integrator.validate()?;
        if !(self.verify.g > 0.0 && self.verify.g.is_finite()) {
            return bad(format!("verify.g must be positive, got {}", self.verify.g));
        }
        if self.verify.times.is_empty() || self.verify.times.iter().any(|t| !t.is_finite()) {
            return bad("verify.times must be a non-empty list of finite times".into());
        }
        for (name, tol) in [("verify.tol", self.verify.tol), ("gate.tol", self.gate.tol), ("ccnot.tol", self.ccnot.tol)] {
            if !(tol > 0.0 && tol.is_finite()) {
                return bad(format!("{name} must be positive, got {tol}"));
            }
        }
        if !(self.gate.h1 > 0.0 && self.gate.h1.is_finite()) || !self.gate.phi1.is_finite() {
            return bad(format!("gate.h1 must be positive, got {}", self.gate.h1));
        }
        if self.sweep.h1.is_empty() || self.sweep.h1.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return bad("sweep.h1 must be a non-empty list of positive values".into());
        }
        let r = &self.rabi;
        if r.draws == 0 || !(r.duration > 0.0) || !(r.block_tol > 0.0) || !(r.integration_tol > 0.0) {
            return bad("rabi section needs draws >= 1 and positive duration and tolerances".into());
        }
        if !(r.search.target_fidelity > 0.0 && r.search.target_fidelity <= 1.0) {
            return bad(format!("rabi target fidelity {} outside (0, 1]", r.search.target_fidelity));
        }
        Ok(())
    }

    fn gate_run(&self, h1: f64) -> GateRunConfig {
        GateRunConfig { h1, phi1: self.gate.phi1, fock_cutoff: self.gate.fock_cutoff, integrator: self.integrator.clone() }
    }
}

/// Result of one command: output text plus its acceptance verdict.
#[derive(Debug)]
pub struct Outcome {
    pub output: String,
    /// JSON written next to a CSV `--out` file as `<out>.json`.
    pub sidecar: Option<String>,
    pub failure: Option<Failure>,
}

impl Outcome {
    fn judged(output: String, pass: bool, what: &str) -> Self {
        Self { output, sidecar: None, failure: (!pass).then(|| Failure::Acceptance(what.to_string())) }
    }
}

/// `%.12e`-style formatting, e.g. `1.000000000000e+00`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent is always present");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

fn params_json(p: &ModelParams) -> Value {
    serde_json::to_value(p).expect("model parameters serialize")
}

fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

pub fn cmd_verify_closed_form(cfg: &ExperimentConfig, corrupt: Option<(usize, usize)>) -> Result<Outcome, Failure> {
    let v = &cfg.verify;
    let layout = HilbertLayout::new(2, v.fock_cutoff)?;
    if let Some((i, j)) = corrupt {
        if i > 3 || j > 3 {
            return Err(Failure::Config(format!("corrupt block ({i}, {j}) outside the 4×4 atomic blocks")));
        }
    }
    let mut rows = Vec::new();
    let mut worst: Option<crate::closed_form::ClosedFormComparison> = None;
    for &t in &v.times {
        let mut closed = ExpInteraction::new(t, v.g, &layout)?;
        if let Some((i, j)) = corrupt {
            closed = closed.with_block_negated(i, j);
        }
        let cmp = compare_with_expm(&closed, v.g)?;
        if worst.is_none_or(|w| cmp.max_err > w.max_err) {
            worst = Some(cmp);
        }
        rows.push(serde_json::to_value(cmp).expect("comparison serializes"));
    }
    let worst = worst.expect("times is non-empty");
    let pass = worst.max_err < v.tol;
    let report = json!({
        "command": "verify-closed-form",
        "g": v.g,
        "fock_cutoff": v.fock_cutoff,
        "interior_max_photons": v.fock_cutoff - 2,
        "corrupted_block": corrupt.map(|(i, j)| [i, j]),
        "comparisons": rows,
        "max_err": worst.max_err,
        "worst": serde_json::to_value(worst.worst).expect("location serializes"),
        "tol": v.tol,
        "pass": pass,
    });
    Ok(Outcome::judged(to_text(&report), pass, "closed form disagrees with expm"))
}

fn gate_json(r: &GateReport) -> Value {
    json!({
        "params": params_json(&r.params),
        "fock_cutoff": r.fock_cutoff,
        "t0": r.t0,
        "fidelity": r.fidelity,
        "infidelity": r.infidelity(),
        "cnot_fidelity": r.cnot_fidelity,
        "cz_distance": r.cz_distance,
        "leakage_max": r.leakage_max,
        "leakage_final": r.leakage_final,
        "drift_max": r.drift_max,
        "sector_unitarity_defect": r.sector_unitarity_defect,
        "accepted_steps": r.accepted_steps,
        "rejected_steps": r.rejected_steps,
        "sector": matrix_json(&r.sector),
        "predicted": matrix_json(&r.predicted),
        "controlled_z": matrix_json(&r.controlled_z),
        "cnot": matrix_json(&r.cnot),
    })
}

pub fn cmd_gate(cfg: &ExperimentConfig) -> Result<Outcome, Failure> {
    let r = run_gate(&cfg.gate_run(cfg.gate.h1))?;
    let pass = r.cz_distance <= cfg.gate.tol;
    let mut report = gate_json(&r);
    report["command"] = json!("gate");
    report["integrator"] = serde_json::to_value(&cfg.integrator).expect("config serializes");
    report["tol"] = json!(cfg.gate.tol);
    report["pass"] = json!(pass);
    let what = format!("extracted gate is {:.3e} from diag(1,1,1,-1) (tolerance {:.3e})", r.cz_distance, cfg.gate.tol);
    Ok(Outcome::judged(to_text(&report), pass, &what))
}

pub const SWEEP_HEADER: &str = "h1,fidelity,infidelity,leakage_max,t0,drift";

fn sweep_row(r: &GateReport, h1: f64) -> String {
    [h1, r.fidelity, r.infidelity(), r.leakage_max, r.t0, r.drift_max].map(format_sci).join(",")
}

/// Runs the sweep; rows come out sorted by decreasing `h1`, the weak-coupling direction.
pub fn cmd_sweep(cfg: &ExperimentConfig, jobs: usize) -> Result<Outcome, Failure> {
    let mut grid = cfg.sweep.h1.clone();
    grid.sort_by(|a, b| b.total_cmp(a));
    grid.dedup();
    let results = sweep(&cfg.gate_run(grid[0]), &grid, jobs)?;

    let mut csv = format!("{SWEEP_HEADER}\n");
    let mut reports = Vec::new();
    let mut points = Vec::new();
    let sidecar = |points: &Vec<Value>| {
        to_text(&json!({
            "command": "sweep",
            "fock_cutoff": cfg.gate.fock_cutoff,
            "integrator": serde_json::to_value(&cfg.integrator).expect("config serializes"),
            "points": points,
        }))
    };
    for (h1, res) in results {
        match res {
            Ok(r) => {
                csv.push_str(&sweep_row(&r, h1));
                csv.push('\n');
                points.push(json!({ "h1": h1, "params": params_json(&r.params), "cz_distance": r.cz_distance }));
                reports.push(r);
            }
            Err(e) => {
                let f = Failure::from(e);
                let msg = format!("sweep point h1 = {h1}: {}", f.message());
                let failure = match f {
                    Failure::Numerical(_) => Failure::Numerical(msg),
                    Failure::Acceptance(_) => Failure::Acceptance(msg),
                    Failure::Config(_) => Failure::Config(msg),
                };
                return Ok(Outcome { output: csv, sidecar: Some(sidecar(&points)), failure: Some(failure) });
            }
        }
    }
    let decreasing = reports.windows(2).all(|w| w[1].infidelity() < w[0].infidelity());
    let what = "infidelity is not strictly decreasing as h1 decreases";
    Ok(Outcome { sidecar: Some(sidecar(&points)), ..Outcome::judged(csv, decreasing, what) })
}

pub fn cmd_ccnot(cfg: &ExperimentConfig) -> Result<Outcome, Failure> {
    let net = ccnot_network()?;
    let err = net.matrix.max_abs_diff(&ccnot().matrix);
    let v = v_gate().matrix;
    let v2_err = v.matmul(&v).max_abs_diff(&pauli_x());
    let w = walsh().matrix;
    let w2_err = w.matmul(&w).max_abs_diff(&ComplexMatrix::identity(2));
    let control_err = ccnot_network_with(&pauli_x())?.matrix.max_abs_diff(&ccnot().matrix);
    let pass = err < cfg.ccnot.tol && v2_err < cfg.ccnot.tol && w2_err < cfg.ccnot.tol && control_err > 0.5;
    let report = json!({
        "command": "ccnot",
        "network": net.label,
        "max_error": err,
        "v_squared_error": v2_err,
        "w_squared_error": w2_err,
        "sigma_x_control_error": control_err,
        "unitarity_defect": net.unitarity_defect(),
        "matrix": matrix_json(&net.matrix),
        "tol": cfg.ccnot.tol,
        "pass": pass,
    });
    Ok(Outcome::judged(to_text(&report), pass, "network does not reproduce the Toffoli matrix"))
}

/// Worst gap between the classical closed form and `g = 0` frame integration.
pub fn classical_vs_integration(params: &ModelParams, t_final: f64, integrator: &IntegratorConfig) -> crate::error::Result<f64> {
    let layout = HilbertLayout::new(2, 4)?;
    let gen = FrameGenerator::new(params, &layout)?;
    let cfg = IntegratorConfig { max_step: integrator.max_step.min(0.1), ..integrator.clone() };
    let run = integrate_ansatz(&gen, t_final, &cfg)?;
    let counterpart = rotated_frame_counterpart(params);
    let mut worst = 0.0f64;
    for &t in &run.times {
        let block = ground_sector_gate(&run, t)?;
        worst = worst.max(block.matrix.max_abs_diff(&full_solution(&counterpart, t)?));
    }
    Ok(worst)
}

pub fn cmd_rabi(cfg: &ExperimentConfig) -> Result<Outcome, Failure> {
    let r = &cfg.rabi;
    let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
    let mut block_err = 0.0f64;
    for _ in 0..r.draws {
        let p = RabiParams {
            theta: rng.gen_range(-3.0..3.0),
            h: rng.gen_range(-2.0..2.0),
            t: rng.gen_range(0.0..r.duration),
            frequency: 0.0,
            phi: 0.0,
        };
        let gen = ComplexMatrix::from_real_rows(&[[p.theta / 2.0, p.h], [p.h, -p.theta / 2.0]]);
        let oracle = expm(&gen.scale(c(0.0, -p.t)))?;
        block_err = block_err.max(rabi_block(&p).max_abs_diff(&oracle));
    }

    let drives = (0..2)
        .map(|_| DriveTone { h: rng.gen_range(0.1..1.0), frequency: rng.gen_range(-2.0..2.0), phi: rng.gen_range(0.0..6.3) })
        .collect();
    let params = ModelParams { n_atoms: 2, omega: 1.0, delta: 1.0, g: 0.0, drives };
    let integration_err = classical_vs_integration(&params, r.duration, &cfg.integrator)?;

    let synth = synthesize(&walsh().matrix, &r.search)?;
    let pass = block_err < r.block_tol && integration_err < r.integration_tol && synth.fidelity >= r.search.target_fidelity;
    let report = json!({
        "command": "rabi",
        "seed": r.seed,
        "draws": r.draws,
        "block_vs_expm_max_err": block_err,
        "block_tol": r.block_tol,
        "integration_params": params_json(&params),
        "integration_duration": r.duration,
        "closed_form_vs_integration_max_err": integration_err,
        "integration_tol": r.integration_tol,
        "walsh_synthesis": {
            "theta": synth.params.theta,
            "h": synth.params.h,
            "t": synth.params.t,
            "frequency": synth.params.frequency,
            "phi": synth.params.phi,
            "fidelity": synth.fidelity,
            "target_fidelity": r.search.target_fidelity,
            "seeds": synth.seeds,
            "evaluations": synth.evaluations,
            "unitary": matrix_json(&synth.unitary),
        },
        "pass": pass,
    });
    Ok(Outcome::judged(to_text(&report), pass, "classical-drive checks failed"))
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    let mut cfg = match &cli.common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(&cli.command, &cli.common)?;
    cfg.validate()?;
    let jobs = cli.common.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(Failure::Config("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Config(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::VerifyClosedForm { corrupt_block } => {
            let corrupt = match corrupt_block.as_deref() {
                None => None,
                Some(&[i, j]) => Some((i, j)),
                Some(_) => return Err(Failure::Config("--corrupt-block takes `i,j`".into())),
            };
            cmd_verify_closed_form(&cfg, corrupt)
        }
        Command::Gate => cmd_gate(&cfg),
        Command::Sweep => cmd_sweep(&cfg, jobs),
        Command::Ccnot => cmd_ccnot(&cfg),
        Command::Rabi => cmd_rabi(&cfg),
    })
}

fn emit(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

/// Parses `args` and runs; usage errors exit with [`EXIT_CONFIG`].
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            code
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(outcome) => {
            let out = cli.common.out.as_deref();
            let mut written = emit(out, &outcome.output);
            if let (Some(path), Some(extra), Ok(())) = (out, &outcome.sidecar, &written) {
                let mut side = path.as_os_str().to_owned();
                side.push(".json");
                written = fs::write(PathBuf::from(side), extra);
            }
            if let Err(e) = written {
                eprintln!("error: writing output: {e}");
                return EXIT_CONFIG;
            }
            match outcome.failure {
                None => EXIT_PASS,
                Some(f) => {
                    eprintln!("FAIL: {}", f.message());
                    f.exit_code()
                }
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scientific_format_matches_c() {
        assert_eq!(format_sci(1.0), "1.000000000000e+00");
        assert_eq!(format_sci(0.005), "5.000000000000e-03");
        assert_eq!(format_sci(-7282.909151477732), "-7.282909151478e+03");
        assert_eq!(format_sci(0.0), "0.000000000000e+00");
        assert_eq!(format_sci(1.5e-120), "1.500000000000e-120");
    }

    #[test]
    fn config_sections_parse_and_reject_typos() {
        let cfg: ExperimentConfig = toml::from_str("[gate]\nh1 = 0.02\n[sweep]\nh1 = [0.1, 0.05]\n").unwrap();
        assert_eq!(cfg.gate.h1, 0.02);
        assert_eq!(cfg.sweep.h1, vec![0.1, 0.05]);
        assert_eq!(cfg.verify, VerifyConfig::default());
        assert!(toml::from_str::<ExperimentConfig>("[gate]\nh_1 = 0.02\n").is_err());
    }

    #[test]
    fn overrides_and_validation() {
        let mut cfg = ExperimentConfig::default();
        let args = CommonArgs { fock_cutoff: Some(4), h1: Some(vec![0.03]), tol: Some(1e-6), ..CommonArgs::default() };
        cfg.apply(&Command::Gate, &args).unwrap();
        assert_eq!((cfg.verify.fock_cutoff, cfg.gate.fock_cutoff, cfg.gate.h1, cfg.gate.tol), (4, 4, 0.03, 1e-6));
        cfg.validate().unwrap();

        let many = CommonArgs { h1: Some(vec![0.1, 0.2]), ..CommonArgs::default() };
        assert!(cfg.apply(&Command::Gate, &many).is_err());
        cfg.apply(&Command::Sweep, &many).unwrap();
        assert_eq!(cfg.sweep.h1, vec![0.1, 0.2]);

        cfg.verify.fock_cutoff = 3;
        assert!(matches!(cfg.validate(), Err(Failure::Config(_))));
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(Failure::from(Error::Stiffness { t: 1.0, step: 1e-20 }).exit_code(), EXIT_NUMERICAL);
        assert_eq!(Failure::from(Error::Infidelity { distance: 1.0, tolerance: 0.1 }).exit_code(), EXIT_ACCEPTANCE);
        assert_eq!(Failure::from(Error::NoGate("h1 = 0".into())).exit_code(), EXIT_CONFIG);
    }

    #[test]
    fn verify_passes_and_corruption_is_located() {
        let cfg = ExperimentConfig { verify: VerifyConfig { fock_cutoff: 4, ..VerifyConfig::default() }, ..Default::default() };
        let ok = cmd_verify_closed_form(&cfg, None).unwrap();
        assert!(ok.failure.is_none());
        let bad = cmd_verify_closed_form(&cfg, Some((1, 2))).unwrap();
        assert!(matches!(bad.failure, Some(Failure::Acceptance(_))));
        let v: Value = serde_json::from_str(&bad.output).unwrap();
        assert_eq!(v["worst"]["row_atomic"], 1);
        assert_eq!(v["worst"]["col_atomic"], 2);
    }

    #[test]
    fn ccnot_command_passes() {
        let out = cmd_ccnot(&ExperimentConfig::default()).unwrap();
        assert!(out.failure.is_none());
    }
}
