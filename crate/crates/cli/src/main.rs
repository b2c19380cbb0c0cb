//! `mfqec` command-line harness.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use mfqec::analytic;
use mfqec::ftcheck::verify_circuit;
use mfqec::gadgets::{build_default, export_circuit, gate_counts, GadgetId};
use mfqec::noise::NoiseModel;
use mfqec::steane::TestState;
use mfqec::tomography::{self, csv_rows, estimate_circuit_rates, sweep_and_fit};

use crate::config::{merge_section, ConfigError};
use crate::output::{write_csv, write_json, Provenance};

#[derive(Parser, Debug)]
#[command(
    name = "mfqec",
    version,
    about = "Measurement-free Steane-code gadget laboratory"
)]
struct Cli {
    /// TOML file with one table per subcommand; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for trajectory parallelism.
    #[arg(long, global = true, env = "MFQEC_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two- and multi-qubit gate counts against the tabulated values.
    Counts(CountsArgs),
    /// Exhaustive single-fault verification.
    Ftcheck(FtcheckArgs),
    /// Monte Carlo logical error rates at one noise point.
    Tomography(TomographyArgs),
    /// Rates over a grid of `p` with a break-even fit.
    Sweep(SweepArgs),
    /// Break-even points for several `α`.
    Breakeven(BreakevenArgs),
    /// Closed-form coefficients and predictions.
    Analytic(AnalyticArgs),
    /// Writes a gadget as a plain-text gate list.
    ExportCircuit(ExportArgs),
}

/// Noise flags shared by the simulation subcommands.
#[derive(Args, Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseArgs {
    #[arg(long)]
    p: Option<f64>,
    /// Single-qubit and initialization fault probability.
    #[arg(long)]
    p1: Option<f64>,
    /// `p1 = α·p`.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// `perfect` forces ε = 0.
    #[arg(long)]
    bias: Option<String>,
    /// Do not treat mid-circuit resets as initialization locations.
    #[arg(long)]
    #[serde(default)]
    no_reset_noise: bool,
}

impl NoiseArgs {
    fn model(&self, default_p: f64) -> Result<NoiseModel> {
        let p = self.p.unwrap_or(default_p);
        let epsilon = match self.bias.as_deref() {
            Some("perfect") => {
                if self.epsilon.is_some_and(|e| e != 0.0) {
                    bail!(ConfigError::new(
                        "`bias = perfect` conflicts with a nonzero epsilon"
                    ));
                }
                0.0
            }
            Some(other) => bail!(ConfigError::new(format!("unknown bias `{other}`"))),
            None => self.epsilon.unwrap_or(0.0),
        };
        let p1 = match (self.p1, self.alpha) {
            (Some(_), Some(_)) => bail!(ConfigError::new("give either p1 or alpha, not both")),
            (Some(p1), None) => p1,
            (None, Some(a)) => a * p,
            (None, None) => 0.0,
        };
        let mut m = NoiseModel::new(p, p1, epsilon).map_err(|e| ConfigError::new(e.to_string()))?;
        if self.no_reset_noise {
            m.reset_is_init = false;
        }
        Ok(m)
    }
}

fn parse_gadget(name: &str) -> Result<GadgetId> {
    name.parse::<GadgetId>()
        .map_err(|e| ConfigError::new(e.to_string()).into())
}

fn parse_test(name: Option<&str>, id: &GadgetId) -> Result<TestState> {
    match name {
        Some(n) => TestState::parse(n)
            .ok_or_else(|| ConfigError::new(format!("unknown test state `{n}`")).into()),
        None => Ok(build_default(id)?.default_test()),
    }
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CountsArgs {
    #[arg(long)]
    #[serde(default)]
    gadget: Vec<String>,
    #[arg(long)]
    #[serde(default)]
    all: bool,
    /// CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FtcheckArgs {
    #[arg(long)]
    #[serde(default)]
    gadget: Vec<String>,
    /// Every gadget claimed fault tolerant.
    #[arg(long)]
    #[serde(default)]
    all: bool,
    #[command(flatten)]
    #[serde(flatten)]
    noise: NoiseArgs,
    #[arg(long)]
    test: Option<String>,
    /// JSON report with every counterexample.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TomographyArgs {
    #[arg(long)]
    gadget: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    noise: NoiseArgs,
    #[arg(long)]
    kmin: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    test: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridArgs {
    /// `lo:hi` (6 points per decade) or a comma-separated list.
    #[arg(long = "p-grid", alias = "grid")]
    p_grid: Option<String>,
    #[arg(long)]
    kmin: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Also write the per-point totals and fitted curve for plotting.
    #[arg(long)]
    #[serde(default)]
    emit_plot_data: bool,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepArgs {
    #[arg(long)]
    gadget: Option<String>,
    /// Use the inner gadget of an extended rectangle.
    #[arg(long)]
    #[serde(default)]
    bare: bool,
    /// Same as `--p-grid`.
    #[arg(long = "p")]
    p: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BreakevenArgs {
    #[arg(long)]
    gadget: Option<String>,
    /// Comma-separated values of `α`.
    #[arg(long)]
    alpha: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalyticArgs {
    #[arg(long)]
    gadget: Option<String>,
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Print the extended-rectangle composition of the stored coefficients.
    #[arg(long)]
    #[serde(default)]
    composition: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExportArgs {
    #[arg(long)]
    gadget: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    noise: NoiseArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit status of a finished command.
enum Status {
    Ok,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<Status> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let file = match &cli.config {
        Some(path) => Some(config::load(path)?),
        None => None,
    };
    let file = file.as_ref();
    match cli.command {
        Command::Counts(a) => counts(merge_section(file, "counts", a)?),
        Command::Ftcheck(a) => ftcheck(merge_section(file, "ftcheck", a)?),
        Command::Tomography(a) => tomography_cmd(merge_section(file, "tomography", a)?),
        Command::Sweep(a) => sweep(merge_section(file, "sweep", a)?),
        Command::Breakeven(a) => breakeven(merge_section(file, "breakeven", a)?),
        Command::Analytic(a) => analytic_cmd(merge_section(file, "analytic", a)?),
        Command::ExportCircuit(a) => export(merge_section(file, "export-circuit", a)?),
    }
}

fn counts(a: CountsArgs) -> Result<Status> {
    let ids: Vec<GadgetId> = if a.all {
        GadgetId::all()
    } else if a.gadget.is_empty() {
        bail!(ConfigError::new("give --gadget or --all"));
    } else {
        a.gadget
            .iter()
            .map(|g| parse_gadget(g))
            .collect::<Result<_>>()?
    };
    let mut rows = Vec::new();
    let mut all_pass = true;
    for id in &ids {
        let got = gate_counts(&build_default(id)?);
        let status = match id.table_counts() {
            Some(t) if t == got => "PASS",
            Some(_) => {
                all_pass = false;
                "FAIL"
            }
            None => "n/a",
        };
        println!("{id}: {got}, {status}");
        rows.push(json!({
            "gadget": id.name(), "cz": got.cz, "ccz": got.ccz, "cccz": got.cccz,
            "cp": got.cp, "qubits": got.qubits, "status": status,
        }));
    }
    if let Some(out) = &a.out {
        let prov = Provenance::new("counts", &a, None);
        output::write_json_rows(out, &prov, &rows)?;
    }
    Ok(if all_pass {
        Status::Ok
    } else {
        Status::VerificationFailed
    })
}

fn ftcheck(a: FtcheckArgs) -> Result<Status> {
    let ids: Vec<GadgetId> = if a.all {
        GadgetId::fault_tolerant_set()
    } else if a.gadget.is_empty() {
        bail!(ConfigError::new("give --gadget or --all"));
    } else {
        a.gadget
            .iter()
            .map(|g| parse_gadget(g))
            .collect::<Result<_>>()?
    };
    let model = a.noise.model(1e-3)?;
    let mut reports = Vec::new();
    let mut all_pass = true;
    for id in &ids {
        let circuit = build_default(id)?;
        let test = parse_test(a.test.as_deref(), id)?;
        match verify_circuit(&circuit, &model, test) {
            Ok(r) => {
                println!(
                    "{id}: {} ({} locations, {} trajectories, {} malignant)",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.locations_checked,
                    r.trajectories,
                    r.failures.len()
                );
                for f in r.failures.iter().take(5) {
                    println!(
                        "  location {} {:?} on {:?}: {} -> {:?}",
                        f.location, f.class, f.qubits, f.pauli, f.labels
                    );
                }
                all_pass &= r.pass;
                reports.push(serde_json::to_value(&r)?);
            }
            Err(e) => {
                println!("{id}: ERROR {e}");
                all_pass = false;
                reports.push(json!({ "gadget": id.name(), "error": e.to_string() }));
            }
        }
    }
    if let Some(out) = &a.out {
        write_json(
            out,
            &Provenance::new("ftcheck", &a, None),
            &json!({ "reports": reports }),
        )?;
    }
    Ok(if all_pass {
        Status::Ok
    } else {
        Status::VerificationFailed
    })
}

fn default_kmin(model: &NoiseModel) -> usize {
    if model.epsilon > 0.0 {
        1
    } else {
        2
    }
}

fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| ConfigError::new("a seed is required for sampling runs").into())
}

fn analytic_predictions(gadget: &str, est: &tomography::RateEstimate) -> serde_json::Value {
    let mut out = serde_json::Map::new();
    for (label, rate) in &est.rates {
        if let Ok(pred) = analytic::predicted_rate(gadget, label, est.model.p, est.model.epsilon) {
            out.insert(
                label.clone(),
                json!({ "measured": rate, "predicted": pred.rate, "warning": pred.warning }),
            );
        }
    }
    if let Ok(pred) = analytic::predicted_rate(gadget, "total", est.model.p, est.model.epsilon) {
        out.insert(
            "total".into(),
            json!({ "measured": est.failure, "predicted": pred.rate }),
        );
    }
    serde_json::Value::Object(out)
}

fn tomography_cmd(a: TomographyArgs) -> Result<Status> {
    let name = a
        .gadget
        .as_deref()
        .ok_or_else(|| ConfigError::new("missing gadget"))?;
    let id = parse_gadget(name)?;
    let model = a.noise.model(1e-3)?;
    let seed = require_seed(a.seed)?;
    let k_min = a.kmin.unwrap_or_else(|| default_kmin(&model));
    let n = a.samples.unwrap_or(10_000);
    let test = parse_test(a.test.as_deref(), &id)?;
    let circuit = build_default(&id)?;
    let est = estimate_circuit_rates(&circuit, &model, k_min, n, test, seed)?;
    for (l, r) in &est.rates {
        println!("{l}: {r:.4e} ± {:.1e}", est.rate_stderr(l));
    }
    println!("total: {:.4e} ± {:.1e}", est.failure, est.failure_stderr);
    let mut summary = json!({
        "estimate": est,
        "analytic": analytic_predictions(&id.name(), &est),
    });
    if let Some((c1, err)) = est.linear_coefficient() {
        let stored = analytic::coefficient(&id.name(), "total")
            .ok()
            .map(|c| c.linear);
        println!(
            "linear coefficient: {c1:.2} ± {err:.2}{}",
            stored
                .map(|s| format!(" (tabulated {s})"))
                .unwrap_or_default()
        );
        summary["linear_coefficient"] =
            json!({ "measured": c1, "stderr": err, "tabulated": stored });
    }
    let prov = Provenance::new("tomography", &a, Some(seed));
    if let Some(out) = &a.out {
        write_csv(out, &prov, &csv_rows(&est))?;
    }
    if let Some(out) = &a.summary {
        write_json(out, &prov, &summary)?;
    }
    Ok(Status::Ok)
}

fn parse_grid(spec: Option<&str>) -> Result<Vec<f64>> {
    let Some(spec) = spec else {
        return Ok(tomography::default_grid());
    };
    let bad = || ConfigError::new(format!("cannot parse p grid `{spec}`"));
    if let Some((lo, hi)) = spec.split_once(':') {
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        return Ok(tomography::log_grid(lo, hi, 6));
    }
    spec.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| bad().into()))
        .collect()
}

fn run_sweep(
    id: &GadgetId,
    grid: &GridArgs,
    p_grid: Option<&str>,
    alpha: f64,
) -> Result<tomography::Sweep> {
    let epsilon = grid.epsilon.unwrap_or(0.0);
    let template =
        NoiseModel::new(1e-3, 0.0, epsilon).map_err(|e| ConfigError::new(e.to_string()))?;
    let seed = require_seed(grid.seed)?;
    let k_min = grid.kmin.unwrap_or_else(|| default_kmin(&template));
    let n = grid.samples.unwrap_or(2_000);
    let ps = parse_grid(p_grid)?;
    Ok(sweep_and_fit(id, &template, &ps, alpha, k_min, n, seed)?)
}

fn sweep_rows(sw: &tomography::Sweep) -> Vec<tomography::CsvRow> {
    let mut rows = Vec::new();
    for pt in &sw.points {
        for (state, est) in [("zero", &pt.zero), ("plus", &pt.plus)] {
            for mut r in csv_rows(est) {
                r.label = format!("{state}:{}", r.label);
                rows.push(r);
            }
        }
    }
    rows
}

#[derive(Serialize)]
struct PlotRow {
    alpha: f64,
    p: f64,
    total: f64,
    stderr: f64,
    fit: f64,
}

fn plot_rows(sw: &tomography::Sweep) -> Vec<PlotRow> {
    sw.points
        .iter()
        .map(|pt| PlotRow {
            alpha: sw.alpha,
            p: pt.p,
            total: pt.total,
            stderr: pt.total_stderr,
            fit: sw.fit.predict(pt.p),
        })
        .collect()
}

fn plot_path(out: &std::path::Path) -> PathBuf {
    out.with_extension("plot.csv")
}

fn sweep(a: SweepArgs) -> Result<Status> {
    let name = a
        .gadget
        .as_deref()
        .ok_or_else(|| ConfigError::new("missing gadget"))?;
    let mut id = parse_gadget(name)?;
    if a.bare {
        if let GadgetId::ExtRect { inner, .. } = id {
            id = *inner;
        }
    }
    let p_grid = a.p.as_deref().or(a.grid.p_grid.as_deref());
    let sw = run_sweep(&id, &a.grid, p_grid, a.alpha.unwrap_or(0.0))?;
    for pt in &sw.points {
        println!(
            "p={:.3e} total={:.4e} ± {:.1e}",
            pt.p, pt.total, pt.total_stderr
        );
    }
    print_fit(&sw);
    let prov = Provenance::new("sweep", &a, a.grid.seed);
    if let Some(out) = &a.grid.out {
        write_csv(out, &prov, &sweep_rows(&sw))?;
        if a.grid.emit_plot_data {
            write_csv(&plot_path(out), &prov, &plot_rows(&sw))?;
        }
    }
    if let Some(out) = &a.grid.summary {
        write_json(
            out,
            &prov,
            &json!({ "gadget": sw.gadget, "alpha": sw.alpha, "fit": sw.fit }),
        )?;
    }
    Ok(Status::Ok)
}

fn print_fit(sw: &tomography::Sweep) {
    let f = &sw.fit;
    println!(
        "fit: a={:.4} b={:.4} c={:.4} p_c={}",
        f.a,
        f.b,
        f.c,
        f.p_c
            .map(|p| format!("{p:.4e}"))
            .unwrap_or_else(|| "none".into())
    );
}

fn breakeven(a: BreakevenArgs) -> Result<Status> {
    let name = a
        .gadget
        .as_deref()
        .ok_or_else(|| ConfigError::new("missing gadget"))?;
    let id = parse_gadget(name)?;
    let alphas: Vec<f64> = match a.alpha.as_deref() {
        None => vec![0.0],
        Some(s) => s
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| anyhow!(ConfigError::new(format!("cannot parse alpha `{v}`"))))
            })
            .collect::<Result<_>>()?,
    };
    let mut sweeps = Vec::new();
    for &alpha in &alphas {
        let sw = run_sweep(&id, &a.grid, a.grid.p_grid.as_deref(), alpha)?;
        print!("alpha={alpha}: ");
        print_fit(&sw);
        sweeps.push(sw);
    }
    let mut summary = json!({
        "gadget": id.name(),
        "points": sweeps.iter().map(|s| json!({ "alpha": s.alpha, "fit": s.fit })).collect::<Vec<_>>(),
    });
    let pcs: Vec<f64> = sweeps.iter().filter_map(|s| s.fit.p_c).collect();
    if pcs.len() == alphas.len() && alphas.len() >= 3 {
        let (c11, c12, c22) = analytic::fit_break_even_model(&alphas, &pcs)?;
        println!("model: c11={c11:.2} c12={c12:.2} c22={c22:.2}");
        summary["model"] = json!({ "c11": c11, "c12": c12, "c22": c22 });
    }
    let prov = Provenance::new("breakeven", &a, a.grid.seed);
    if let Some(out) = &a.grid.out {
        let rows: Vec<_> = sweeps.iter().flat_map(sweep_rows).collect();
        write_csv(out, &prov, &rows)?;
        if a.grid.emit_plot_data {
            let rows: Vec<_> = sweeps.iter().flat_map(plot_rows).collect();
            write_csv(&plot_path(out), &prov, &rows)?;
        }
    }
    if let Some(out) = &a.grid.summary {
        write_json(out, &prov, &summary)?;
    }
    Ok(Status::Ok)
}

fn analytic_cmd(a: AnalyticArgs) -> Result<Status> {
    if a.composition {
        let ext = analytic::extended_rate_composition(&analytic::BareCoefficients::stored());
        println!("{}", serde_json::to_string_pretty(&ext)?);
        return Ok(Status::Ok);
    }
    match (&a.gadget, &a.label) {
        (Some(g), Some(l)) => {
            let pred =
                analytic::predicted_rate(g, l, a.p.unwrap_or(1e-3), a.epsilon.unwrap_or(0.0))?;
            println!("{:.6e}", pred.rate);
            if pred.warning {
                eprintln!(
                    "warning: p above {} where the expansion is unreliable",
                    analytic::VALIDITY_LIMIT
                );
            }
        }
        (None, None) => {
            let csv = analytic::coefficients_csv();
            match &a.out {
                Some(out) => {
                    let prov = Provenance::new("analytic", &a, None);
                    output::write_text(out, &prov, &csv)?;
                }
                None => print!("{csv}"),
            }
        }
        _ => bail!(ConfigError::new(
            "give both --gadget and --label, or neither"
        )),
    }
    Ok(Status::Ok)
}

fn export(a: ExportArgs) -> Result<Status> {
    let name = a
        .gadget
        .as_deref()
        .ok_or_else(|| ConfigError::new("missing gadget"))?;
    let id = parse_gadget(name)?;
    let model = a.noise.model(1e-3)?;
    let text = export_circuit(&build_default(&id)?, &model);
    match &a.out {
        Some(out) => {
            std::fs::write(out, text).with_context(|| format!("writing {}", out.display()))?
        }
        None => print!("{text}"),
    }
    Ok(Status::Ok)
}
