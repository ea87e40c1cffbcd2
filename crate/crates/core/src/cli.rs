//! Command-line front end. `run` is the whole program minus process exit.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{load_scenario, to_toml, ConfigError};
use crate::divergence::{
    classify, linear_grid, log_grid, sweep, DivergenceError, SweepParam, SweepResult, SweepSpec,
};
use crate::elements::{
    assemble_rho_with, compute_elements, compute_with, oracle_position_space, reduction_for,
    ElementError, ElementId, ElementSet, InnerDiagonal,
};
use crate::measures::{measure_report, mutual_information, negativity};
use crate::quadrature::Estimate;
use crate::scenario::{ModelKind, Scenario};
use crate::wick::{
    commutator_checks, random_point, wick_check_complex, wick_check_fourpoint, wick_check_real,
    TruncatedModeSet,
};
use crate::wightman::{kernel_power_eval, WightmanKernel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NONCONVERGED: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "udw",
    version,
    about = "Two-detector vacuum correlations: elements, measures, cutoff sweeps"
)]
struct Cli {
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the Monte Carlo seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Exit 0 even if some quadrature did not converge.
    #[arg(long, global = true)]
    allow_nonconverged: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate W_ε(Δt, r) or its n-th power.
    Wightman {
        #[arg(long, allow_hyphen_values = true)]
        dt: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        power: u32,
    },
    /// L_AA, L_BB, L_AB, M and measures as JSON.
    Elements {
        #[command(flatten)]
        config: ConfigArg,
        /// Also write a one-row CSV in the sweep schema.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// The assembled 4×4 density matrix and its measure report.
    Rho {
        #[command(flatten)]
        config: ConfigArg,
        /// Put L_BB at (2,2) and L_AA at (3,3).
        #[arg(long)]
        swap_inner: bool,
    },
    /// Sweep one parameter; CSV rows plus a verdict sidecar.
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        param: String,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        points: usize,
        /// Grid spacing; epsilon defaults to log, others to linear.
        #[arg(long, value_enum)]
        scale: Option<Scale>,
    },
    /// Model-equivalence checks: quadratic complex vs bilinear(2), real vs 2× complex, bilinear(1) vs linear.
    Compare {
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Independent oracles.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Ladder-operator checks of the contraction identities on random mode sets.
    Wick {
        #[arg(long)]
        modes: usize,
        #[arg(long = "mode-seed", default_value_t = 1)]
        mode_seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: u64,
    },
    /// Position-space Monte Carlo against the momentum-space elements.
    Position {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        samples: Option<u64>,
    },
}

#[derive(Args, Debug)]
struct ConfigArg {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Scale {
    Log,
    Linear,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Divergence(#[from] DivergenceError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Provenance record written next to every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    pub config: Option<String>,
    pub seeds: Vec<u64>,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<String>,
    pub fingerprints: Vec<String>,
}

struct Ctx {
    argv: Vec<String>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    allow_nonconverged: bool,
    started: u64,
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn sci(x: f64) -> String {
    format!("{x:.14e}")
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn verdicts_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".verdicts.json");
    PathBuf::from(s)
}

impl Ctx {
    fn scenario(&self, arg: &ConfigArg) -> Result<Scenario, CliError> {
        let mut scn = load_scenario(&arg.config)?;
        if let Some(seed) = self.seed {
            scn.mc.seed = seed;
        }
        Ok(scn)
    }

    /// Primary output to --out (with manifest) or stdout.
    fn emit(
        &self,
        text: &str,
        base: Option<&Scenario>,
        scenarios: &[&Scenario],
        extra: &[PathBuf],
    ) -> Result<(), CliError> {
        match &self.out {
            Some(path) => {
                write_file(path, text)?;
                let mut outputs = vec![path.display().to_string()];
                outputs.extend(extra.iter().map(|p| p.display().to_string()));
                let manifest = RunManifest {
                    tool: "udw".into(),
                    version: env!("CARGO_PKG_VERSION").into(),
                    command: self.argv.clone(),
                    config: base.map(to_toml),
                    seeds: scenarios.iter().map(|s| s.mc.seed).collect(),
                    started_unix: self.started,
                    finished_unix: now(),
                    outputs,
                    fingerprints: scenarios.iter().map(|s| s.fingerprint()).collect(),
                };
                let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
                write_file(&manifest_path(path), &(text + "\n"))
            }
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn manifest_ref(&self) -> Value {
        match &self.out {
            Some(p) => Value::String(manifest_path(p).display().to_string()),
            None => Value::Null,
        }
    }

    fn finish(&self, converged: bool) -> i32 {
        if converged || self.allow_nonconverged {
            EXIT_OK
        } else {
            eprintln!("error: quadrature did not converge (pass --allow-nonconverged to accept)");
            EXIT_NONCONVERGED
        }
    }
}

pub fn run<S: AsRef<str>>(argv: &[S]) -> i32 {
    let argv: Vec<String> = argv.iter().map(|s| s.as_ref().to_string()).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_OK,
                _ => EXIT_INVALID,
            };
            let _ = e.print();
            return code;
        }
    };
    let ctx = Ctx {
        argv,
        out: cli.out.clone(),
        seed: cli.seed,
        allow_nonconverged: cli.allow_nonconverged,
        started: now(),
    };
    match dispatch(&ctx, cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

fn dispatch(ctx: &Ctx, command: Command) -> Result<i32, CliError> {
    match command {
        Command::Wightman { dt, r, eps, power } => {
            let kernel = WightmanKernel::new(eps).map_err(|e| CliError::Usage(e.to_string()))?;
            let w = kernel_power_eval(&kernel, power, dt, r)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            ctx.emit(&format!("{} {}\n", sci(w.re), sci(w.im)), None, &[], &[])?;
            Ok(EXIT_OK)
        }
        Command::Elements { config, csv } => {
            let scn = ctx.scenario(&config)?;
            let set = compute_elements(&scn)?;
            let mut extra = Vec::new();
            if let Some(path) = &csv {
                write_file(path, &csv_text(&[CsvRow::new(scn.epsilon, &set)]))?;
                extra.push(path.clone());
            }
            let text = serde_json::to_string_pretty(&elements_json(&scn, &set, ctx.manifest_ref()))
                .expect("json");
            ctx.emit(&(text + "\n"), Some(&scn), &[&scn], &extra)?;
            Ok(ctx.finish(set.converged()))
        }
        Command::Rho { config, swap_inner } => {
            let scn = ctx.scenario(&config)?;
            let set = compute_elements(&scn)?;
            let inner = if swap_inner {
                InnerDiagonal::Swapped
            } else {
                InnerDiagonal::AsPrinted
            };
            let rho = assemble_rho_with(&set, inner)?;
            let report = measure_report(&set)?;
            let mut text = String::new();
            for i in 0..4 {
                let row: Vec<String> = (0..4)
                    .map(|j| {
                        let z = rho.get(i, j);
                        format!("{}{:+.14e}i", sci(z.re), z.im)
                    })
                    .collect();
                writeln!(text, "{}", row.join("  ")).expect("string write");
            }
            text.push_str(&serde_json::to_string_pretty(&report).expect("json"));
            text.push('\n');
            ctx.emit(&text, Some(&scn), &[&scn], &[])?;
            Ok(ctx.finish(set.converged()))
        }
        Command::Sweep {
            config,
            param,
            from,
            to,
            points,
            scale,
        } => {
            let scn = ctx.scenario(&config)?;
            let param = SweepParam::parse(&param).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown --param `{param}`, expected epsilon, gap_detuning or separation"
                ))
            })?;
            let scale = scale.unwrap_or(if param == SweepParam::Epsilon {
                Scale::Log
            } else {
                Scale::Linear
            });
            if matches!(scale, Scale::Log) && !(from > 0.0 && to > 0.0) {
                return Err(CliError::Usage(
                    "log-spaced grids need positive --from and --to".into(),
                ));
            }
            let grid = match scale {
                Scale::Log => log_grid(from, to, points),
                Scale::Linear => linear_grid(from, to, points),
            };
            let result = sweep(&SweepSpec::new(scn, param, grid))?;
            let csv = sweep_csv(&result);
            let verdicts = verdicts_json(&result, ctx.manifest_ref());
            let verdict_text = serde_json::to_string_pretty(&verdicts).expect("json") + "\n";
            let mut extra = Vec::new();
            match &ctx.out {
                Some(out) => {
                    let vp = verdicts_path(out);
                    write_file(&vp, &verdict_text)?;
                    extra.push(vp);
                }
                None => eprint!("{verdict_text}"),
            }
            let scenarios: Vec<&Scenario> = result.points.iter().map(|p| &p.scenario).collect();
            ctx.emit(&csv, Some(&result.spec.base), &scenarios, &extra)?;
            let converged = result.points.iter().all(|p| p.elements.converged());
            Ok(ctx.finish(converged))
        }
        Command::Compare { config } => {
            let scn = ctx.scenario(&config)?;
            let (text, converged) = compare_table(&scn)?;
            ctx.emit(&text, Some(&scn), &[&scn], &[])?;
            Ok(ctx.finish(converged))
        }
        Command::Oracle { which } => match which {
            OracleCommand::Wick {
                modes,
                mode_seed,
                trials,
            } => {
                let seed = ctx.seed.unwrap_or(mode_seed);
                let text = wick_table(modes, seed, trials)?;
                ctx.emit(&text, None, &[], &[])?;
                Ok(EXIT_OK)
            }
            OracleCommand::Position { config, samples } => {
                let mut scn = ctx.scenario(&config)?;
                if let Some(n) = samples {
                    scn.mc.samples = n;
                }
                let (text, converged) = position_table(&scn)?;
                ctx.emit(&text, Some(&scn), &[&scn], &[])?;
                Ok(ctx.finish(converged))
            }
        },
    }
}

fn estimate_json(e: &Estimate, complex: bool) -> Value {
    if complex {
        json!({"re": e.value.re, "im": e.value.im, "err": e.err, "converged": e.converged})
    } else {
        json!({"value": e.value.re, "err": e.err, "converged": e.converged})
    }
}

fn elements_json(scn: &Scenario, set: &ElementSet, manifest: Value) -> Value {
    let measures = measure_report(set).ok();
    json!({
        "model": scn.model.name(),
        "epsilon": scn.epsilon,
        "nascent_delta": scn.nascent_delta,
        "L_AA": estimate_json(&set.l_aa, false),
        "L_BB": estimate_json(&set.l_bb, false),
        "L_AB": estimate_json(&set.l_ab, true),
        "M": estimate_json(&set.m, true),
        "errors": {
            "L_AA": set.l_aa.err,
            "L_BB": set.l_bb.err,
            "L_AB": set.l_ab.err,
            "M": set.m.err,
        },
        "converged": set.converged(),
        "exploratory": set.exploratory,
        "negativity": measures.map(|m| m.negativity),
        "mutual_information": measures.map(|m| m.mutual_information),
        "settings_fingerprint": set.fingerprint,
        "manifest": manifest,
    })
}

pub const CSV_HEADER: &str =
    "param_value,model,L_AA,L_AA_err,L_BB,L_BB_err,L_AB_re,L_AB_im,L_AB_err,M_re,M_im,M_err,negativity,mutual_info,flags";

/// One CSV row of the sweep schema.
pub struct CsvRow<'a> {
    pub param_value: f64,
    pub elements: &'a ElementSet,
    pub flags: Vec<String>,
}

impl<'a> CsvRow<'a> {
    pub fn new(param_value: f64, elements: &'a ElementSet) -> Self {
        let mut flags = Vec::new();
        if !elements.converged() {
            flags.push("nonconverged".into());
        }
        if elements.exploratory {
            flags.push("exploratory".into());
        }
        CsvRow {
            param_value,
            elements,
            flags,
        }
    }
}

pub fn csv_text(rows: &[CsvRow<'_>]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let e = row.elements;
        let (neg, mi) = match (negativity(e), mutual_information(e)) {
            (Ok(n), Ok(m)) => (sci(n), sci(m.max(0.0))),
            _ => ("nan".into(), "nan".into()),
        };
        let c = |z: Complex64| (sci(z.re), sci(z.im));
        let (lab_re, lab_im) = c(e.l_ab());
        let (m_re, m_im) = c(e.m());
        let fields = [
            sci(row.param_value),
            e.model.name(),
            sci(e.l_aa()),
            sci(e.l_aa.err),
            sci(e.l_bb()),
            sci(e.l_bb.err),
            lab_re,
            lab_im,
            sci(e.l_ab.err),
            m_re,
            m_im,
            sci(e.m.err),
            neg,
            mi,
            row.flags.join(";"),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let rows: Vec<CsvRow<'_>> = result
        .points
        .iter()
        .map(|p| CsvRow {
            param_value: p.param_value,
            elements: &p.elements,
            flags: p.flags.clone(),
        })
        .collect();
    csv_text(&rows)
}

/// Writes the sweep CSV to `path`.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<(), std::io::Error> {
    if result.points.is_empty() {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "no sweep points",
        ));
    }
    fs::write(path, sweep_csv(result))
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn verdicts_json(result: &SweepResult, manifest: Value) -> Value {
    let mut verdicts = serde_json::Map::new();
    if result.spec.param == SweepParam::Epsilon {
        for id in ElementId::ALL {
            verdicts.insert(
                id.name().into(),
                serde_json::to_value(classify(result, id)).expect("json"),
            );
        }
    }
    json!({
        "param": result.spec.param,
        "model": result.spec.base.model.name(),
        "nascent_delta": result.spec.base.nascent_delta,
        "points": result.points.len(),
        "verdicts": verdicts,
        "manifest": manifest,
    })
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn compare_table(base: &Scenario) -> Result<(String, bool), CliError> {
    let complex = compute_elements(&base.with_model(ModelKind::QuadraticComplex))?;
    let bilinear = compute_elements(&base.with_model(ModelKind::Bilinear(2)))?;
    let real = compute_elements(&base.with_model(ModelKind::QuadraticReal))?;
    let linear = compute_elements(&base.with_model(ModelKind::Linear))?;
    let bilinear1 = compute_elements(&base.with_model(ModelKind::Bilinear(1)))?;
    let converged = [&complex, &bilinear, &real, &linear, &bilinear1]
        .iter()
        .all(|s| s.converged());
    let mut text = String::new();
    writeln!(
        text,
        "{:<28} {:<6} {:>12} {:>10}  result",
        "check", "elem", "rel_diff", "tol"
    )
    .expect("write");
    for id in ElementId::ALL {
        let rows = [
            (
                "quadratic_complex==bilinear2",
                rel(complex.get(id).value, bilinear.get(id).value),
                1e-12,
            ),
            (
                "quadratic_real==2*complex",
                rel(real.get(id).value, 2.0 * complex.get(id).value),
                1e-9,
            ),
        ];
        for (name, d, tol) in rows {
            let verdict = if d <= tol { "PASS" } else { "FAIL" };
            writeln!(
                text,
                "{name:<28} {:<6} {d:>12.3e} {tol:>10.1e}  {verdict}",
                id.name()
            )
            .expect("write");
        }
        let a = linear.get(id);
        let b = bilinear1.get(id);
        let tol = (a.err + b.err) / a.value.norm().max(f64::MIN_POSITIVE);
        let d = rel(a.value, b.value);
        let verdict = if d <= tol.max(1e-15) { "PASS" } else { "FAIL" };
        writeln!(
            text,
            "{:<28} {:<6} {d:>12.3e} {tol:>10.1e}  {verdict}",
            "bilinear1==linear",
            id.name()
        )
        .expect("write");
    }
    Ok((text, converged))
}

fn position_table(scn: &Scenario) -> Result<(String, bool), CliError> {
    let reduction = reduction_for(scn)?;
    let mut text = String::new();
    let mut converged = true;
    writeln!(
        text,
        "{:<5} {:>24} {:>24} {:>11} {:>7}  result",
        "elem", "production", "oracle", "stderr", "z"
    )
    .expect("write");
    for id in ElementId::ALL {
        let prod = compute_with(scn, id, reduction)?;
        let orc = oracle_position_space(scn, id)?;
        converged &= prod.converged;
        let sigma = orc.err.hypot(prod.err);
        let z = if sigma > 0.0 {
            (prod.value - orc.value).norm() / sigma
        } else {
            0.0
        };
        let verdict = if z <= 4.0 { "PASS" } else { "FAIL" };
        let fmt = |c: Complex64| format!("{:.5e}{:+.5e}i", c.re, c.im);
        writeln!(
            text,
            "{:<5} {:>24} {:>24} {:>11.3e} {:>7.2}  {verdict}",
            id.name(),
            fmt(prod.value),
            fmt(orc.value),
            orc.err,
            z
        )
        .expect("write");
    }
    Ok((text, converged))
}

fn wick_table(modes: usize, seed: u64, trials: u64) -> Result<String, CliError> {
    let mut worst: Vec<(String, f64, bool)> = Vec::new();
    for trial in 0..trials {
        let set = TruncatedModeSet::random(modes, seed.wrapping_add(trial))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let p1 = random_point(seed.wrapping_add(trial), 1);
        let p2 = random_point(seed.wrapping_add(trial), 2);
        let mut reports = vec![
            wick_check_real(&set, &p1, &p2),
            wick_check_complex(&set, &p1, &p2),
            wick_check_fourpoint(&set, &p1, &p2),
        ];
        reports.extend(commutator_checks(&set, &p1, &p2));
        for (i, r) in reports.into_iter().enumerate() {
            if worst.len() <= i {
                worst.push((r.identity.clone(), 0.0, true));
            }
            worst[i].1 = worst[i].1.max(r.abs_err);
            worst[i].2 &= r.pass;
        }
    }
    let mut text = String::new();
    for (name, err, pass) in worst {
        let verdict = if pass { "PASS" } else { "FAIL" };
        writeln!(
            text,
            "{verdict} {name} (max abs err {err:.3e} over {trials} trials, {modes} modes)"
        )
        .expect("write");
    }
    Ok(text)
}
