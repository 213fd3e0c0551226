use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mkdv_core::dynamics::{evolve, IntegratorConfig, Model, ModelKind};
use mkdv_core::harness::{
    build_infinite_momentum_data, config_hash, convolution_sweep, emit_csv, emit_json,
    run_dichotomy_experiment, run_lipschitz_probe, verify_divisor_lemma, write_csv, write_json,
    DivergenceRow, ExperimentConfig, Format, Metadata, Table,
};
use mkdv_core::kernels::sweep::{run_sweep, uniform_grid, KernelGrid, SweepConfig};
use mkdv_core::kernels::KernelKind;
use mkdv_core::nonlinearity::{verify_region_lemma, RegionConstants};
use mkdv_core::xsb::{cutoff_gain_check, integrated_cutoff, make_params};
use mkdv_core::{Complex64, FLParams, SpectralField};

#[derive(Parser)]
#[command(name = "mkdv", version, about = "Periodic complex mKdV experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one model and write the trajectory as JSON lines.
    Simulate(SimulateArgs),
    /// Truncation-limit experiment for the original and renormalized flows.
    Dichotomy(DichotomyArgs),
    /// Difference quotients of the solution map around one datum.
    Lipschitz(LipschitzArgs),
    /// Kernel evaluation against the pointwise bounds.
    #[command(subcommand)]
    Kernels(KernelsCommand),
    /// Frequency region checks.
    #[command(subcommand)]
    Regions(RegionsCommand),
    /// Numerical checks of the counting and convolution estimates.
    #[command(subcommand)]
    Lemmas(LemmasCommand),
}

#[derive(Args)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    /// Initial datum as a SpectralField JSON object.
    #[arg(long, conflicts_with = "mode")]
    input: Option<PathBuf>,
    /// Single-mode datum `amplitude·e^{i·mode·x}`.
    #[arg(long, default_value_t = 1)]
    mode: i64,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    #[arg(long, default_value = "mkdv")]
    model: Model,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    sign: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, default_value_t = 16)]
    nmax: usize,
    #[arg(long, default_value_t = 100)]
    record_every: usize,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DichotomyArgs {
    /// Full ExperimentConfig as JSON; other flags are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long)]
    big_t: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    record_every: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    random_phases: bool,
    #[arg(long)]
    real_data: bool,
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<Model>>,
    #[arg(long, allow_negative_numbers = true)]
    sign: Option<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct LipschitzArgs {
    #[arg(long, default_value = "mkdv2")]
    model: Model,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    sign: f64,
    /// Exponent of the log-corrected power-law datum and of the norm.
    #[arg(long, default_value_t = 6.0)]
    p: f64,
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    #[arg(long, default_value_t = 32)]
    nmax: usize,
    #[arg(long, default_value_t = 1e-5)]
    dt: f64,
    #[arg(long, default_value_t = 0.05)]
    t_end: f64,
    /// Perturbation sizes, relative to the datum norm.
    #[arg(long, value_delimiter = ',', default_value = "1e-2,3e-3,1e-3,3e-4")]
    scales: Vec<f64>,
    #[arg(long, default_value_t = 4)]
    directions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Subcommand)]
enum KernelsCommand {
    /// Compare each kernel with its bound on a coarse and a refined grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 50.0)]
    grid_extent: f64,
    #[arg(long, default_value_t = 1.0)]
    grid_step: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.25)]
    mu_step: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
          default_value = "-960,-96,-24,-6,6,24,96,960")]
    phi: Vec<i64>,
    /// Kernel written to the CSV grid output.
    #[arg(long, default_value = "kb")]
    kind: String,
    /// CSV of kernel values on the coarse grid.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// JSON sweep report.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RegionsCommand {
    /// Enumerate frequency triples and check the region implications.
    Verify {
        #[arg(long, default_value_t = 128)]
        bound: i64,
        /// JSON report.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LemmasCommand {
    /// Divisor counting bound on random samples; rows are the violations.
    Divisor {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Convolution estimate along `a = 0`, `b ∈ [0, extent]`.
    Convolution {
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 1000.0)]
        extent: f64,
        #[arg(long, default_value_t = 2.0)]
        step: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Gain from a time cutoff in the X^{s,b} norms.
    CutoffGain {
        #[arg(long, default_value_t = 0.025)]
        theta: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 1)]
        mode: i64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 8192)]
        samples: usize,
        /// Horizons `1, 1/2, …, 2^{1-levels}`.
        #[arg(long, default_value_t = 7)]
        levels: i32,
        #[command(flatten)]
        out: Output,
    },
}

/// Divergence row tagged with its model.
struct TaggedRow<'a>(Model, &'a DivergenceRow);

impl Table for TaggedRow<'_> {
    fn header() -> Vec<&'static str> {
        let mut h = vec!["model"];
        h.extend(DivergenceRow::header());
        h
    }

    fn record(&self) -> Vec<String> {
        let mut r = vec![self.0.to_string()];
        r.extend(self.1.record());
        r
    }
}

fn write_rows<R: Table>(rows: &[R], json: &impl serde::Serialize, out: &Output, meta: &Metadata) -> Result<()> {
    match (&out.output, out.format) {
        (Some(path), Format::Csv) => emit_csv(rows, path, meta)?,
        (Some(path), Format::Json) => emit_json(json, path, meta)?,
        (None, Format::Csv) => write_csv(rows, io::stdout().lock())?,
        (None, Format::Json) => write_json(json, meta, io::stdout().lock())?,
    }
    Ok(())
}

fn verdict(name: &str, pass: bool) -> bool {
    eprintln!("{name}: {}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn simulate(a: SimulateArgs) -> Result<bool> {
    let u0 = match &a.input {
        Some(path) => {
            let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            serde_json::from_reader::<_, SpectralField>(BufReader::new(f))?
        }
        None => {
            if a.mode.unsigned_abs() as usize > a.nmax {
                bail!("mode {} outside the band |n| <= {}", a.mode, a.nmax);
            }
            SpectralField::from_modes(a.nmax, &[(a.mode, Complex64::new(a.amplitude, 0.0))])?
        }
    };
    let kind = ModelKind::new(a.model, a.sign)?;
    let cfg = IntegratorConfig::new(a.dt, a.t_end, a.nmax).record_every(a.record_every);
    let tr = evolve(&u0, kind, &cfg)?;
    match &a.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            tr.write_jsonl(&mut w)?;
            w.flush()?;
        }
        None => tr.write_jsonl(io::stdout().lock())?,
    }
    Ok(true)
}

fn dichotomy(a: DichotomyArgs) -> Result<bool> {
    let cfg = match &a.config {
        Some(path) => serde_json::from_reader(BufReader::new(File::open(path)?))?,
        None => {
            let d = ExperimentConfig::default();
            ExperimentConfig {
                p: a.p.unwrap_or(d.p),
                s: a.s.unwrap_or(d.s),
                n_list: a.n_list.unwrap_or(d.n_list),
                big_t: a.big_t.unwrap_or(d.big_t),
                dt: a.dt.unwrap_or(d.dt),
                record_every: a.record_every.unwrap_or(d.record_every),
                seed: a.seed.unwrap_or(d.seed),
                random_phases: a.random_phases,
                real_data: a.real_data,
                models: a.models.unwrap_or(d.models),
                sign: a.sign.unwrap_or(d.sign),
            }
        }
    };
    let report = run_dichotomy_experiment(&cfg)?;
    let rows: Vec<TaggedRow> = report
        .tables
        .iter()
        .flat_map(|t| t.rows.iter().map(move |r| TaggedRow(t.model, r)))
        .collect();
    write_rows(&rows, &report, &a.out, &Metadata::new(cfg.hash(), cfg.seed))?;
    for (n, d) in &report.gauge_defects {
        eprintln!("gauge defect at N = {n}: {d:.3e}");
    }
    let mut ok = true;
    for v in &report.verdicts {
        eprintln!("{} = {:.4} (threshold {})", v.name, v.value, v.threshold);
        ok &= verdict(&v.name, v.pass);
    }
    Ok(ok)
}

fn lipschitz(a: LipschitzArgs) -> Result<bool> {
    let params = FLParams::new(a.s, a.p)?;
    let u0 = build_infinite_momentum_data(a.p, a.nmax, None)?;
    let size = mkdv_core::spectral::fl_norm(&u0, params);
    let scales: Vec<f64> = a.scales.iter().map(|s| s * size).collect();
    let cfg = IntegratorConfig::new(a.dt, a.t_end, a.nmax).record_every(usize::MAX);
    let kind = ModelKind::new(a.model, a.sign)?;
    let report = run_lipschitz_probe(&u0, &scales, a.directions, a.seed, kind, &cfg, params)?;
    let hash = config_hash(&(a.model.to_string(), a.sign, a.p, a.s, a.nmax, a.dt, a.t_end, &a.scales, a.directions));
    write_rows(&report.rows, &report, &a.out, &Metadata::new(hash, a.seed))?;
    eprintln!("variation {:.3}, constant {:.4}", report.variation, report.constant);
    Ok(verdict("lipschitz plateau", report.pass))
}

fn parse_kind(name: &str) -> Result<KernelKind> {
    KernelKind::ALL
        .into_iter()
        .find(|k| k.name() == name)
        .with_context(|| format!("unknown kernel {name}"))
}

fn kernels_sweep(a: SweepArgs) -> Result<bool> {
    let cfg = SweepConfig {
        extent: a.grid_extent,
        step: a.grid_step,
        phis: a.phi,
        alpha: a.alpha,
        mu_step: a.mu_step,
        ..SweepConfig::default()
    };
    let kind = parse_kind(&a.kind)?;
    let report = run_sweep(&cfg)?;
    let meta = Metadata::new(config_hash(&cfg), 0);
    if let Some(path) = &a.output {
        let grid = uniform_grid(cfg.extent, cfg.step);
        let mut w = BufWriter::new(File::create(path)?);
        for (i, &phi) in cfg.phis.iter().enumerate() {
            let mut buf = Vec::new();
            KernelGrid::compute(&grid, &grid, phi, cfg.mu_step)?.write_csv(kind, cfg.alpha, &mut buf)?;
            let text = String::from_utf8(buf)?;
            let body = if i == 0 { &text[..] } else { text.split_once('\n').map_or("", |x| x.1) };
            w.write_all(body.as_bytes())?;
        }
        w.flush()?;
        write_sidecar(path, &meta)?;
    }
    if let Some(path) = &a.report {
        emit_json(&report, path, &meta)?;
    }
    let mut ok = true;
    for e in &report.entries {
        let label = match e.phi {
            Some(phi) => format!("{} at {phi}", e.kind.name()),
            None => e.kind.name().to_string(),
        };
        eprintln!(
            "{label}: constant {:.4} -> {:.4}, change {:.3}",
            e.coarse.constant, e.fine.constant, e.relative_change
        );
        ok &= verdict(&label, e.pass);
    }
    Ok(ok)
}

fn write_sidecar(path: &Path, meta: &Metadata) -> Result<()> {
    let mut side = path.as_os_str().to_owned();
    side.push(".meta.json");
    let mut w = BufWriter::new(File::create(PathBuf::from(side))?);
    serde_json::to_writer_pretty(&mut w, meta)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn regions(bound: i64, output: Option<PathBuf>) -> Result<bool> {
    let constants = RegionConstants::default();
    let r = verify_region_lemma(bound, &constants)?;
    let meta = Metadata::new(config_hash(&(bound, &constants)), 0);
    match &output {
        Some(path) => emit_json(&r, path, &meta)?,
        None => write_json(&r, &meta, io::stdout().lock())?,
    }
    eprintln!(
        "{} triples, {} non-resonant, raw coverage {:.4}, violations {:?}",
        r.triples, r.nonresonant, r.coverage_fraction, r.violations
    );
    let finite = r.c5.is_finite() && r.c6.is_finite() && r.c6_prime.is_finite();
    Ok(verdict(
        "region implications",
        r.total_violations() == 0 && finite && r.assigned_coverage_fraction == 1.0,
    ))
}

fn lemmas(cmd: LemmasCommand) -> Result<bool> {
    match cmd {
        LemmasCommand::Divisor { samples, seed, out } => {
            let r = verify_divisor_lemma(samples, seed)?;
            write_rows(&r.violations, &r, &out, &Metadata::new(config_hash(&(samples, seed)), seed))?;
            eprintln!(
                "{} samples, {} mismatches, fitted constant {:.4}, {} violations",
                r.samples,
                r.mismatches,
                r.fitted_constant,
                r.violations.len()
            );
            Ok(verdict("divisor bound", r.pass))
        }
        LemmasCommand::Convolution { alpha, beta, eps, extent, step, out } => {
            let s = convolution_sweep(alpha, beta, eps, extent, step)?;
            let hash = config_hash(&(alpha, beta, eps, extent, step));
            write_rows(&s.fine.rows, &s, &out, &Metadata::new(hash, 0))?;
            eprintln!(
                "branch {}, gamma {:.4}, constant {:.4} -> {:.4}, change {:.4}, tail slope {:.4}",
                s.fine.branch, s.fine.gamma, s.coarse.constant, s.fine.constant, s.relative_change, s.tail_slope
            );
            Ok(verdict("convolution bound", s.pass))
        }
        LemmasCommand::CutoffGain { theta, delta, mode, p, samples, levels, out } => {
            let params = make_params(delta)?;
            let n_max = mode.unsigned_abs() as usize;
            let field = integrated_cutoff(n_max, samples, mode, Complex64::new(1.0, 0.0))?;
            let horizons: Vec<f64> = (0..levels).map(|j| 0.5f64.powi(j)).collect();
            let r = cutoff_gain_check(&field, &horizons, theta, &params, p)?;
            let hash = config_hash(&(theta, delta, mode, p, samples, levels));
            write_rows(&r.rows, &r, &out, &Metadata::new(hash, 0))?;
            for n in &r.notes {
                eprintln!("{n}");
            }
            eprintln!("constant {:.4}", r.constant);
            match r.pass {
                Some(pass) => Ok(verdict("cutoff gain", pass)),
                None => {
                    eprintln!("cutoff gain: not asserted (theta > delta/2)");
                    Ok(true)
                }
            }
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Dichotomy(a) => dichotomy(a),
        Command::Lipschitz(a) => lipschitz(a),
        Command::Kernels(KernelsCommand::Sweep(a)) => kernels_sweep(a),
        Command::Regions(RegionsCommand::Verify { bound, output }) => regions(bound, output),
        Command::Lemmas(cmd) => lemmas(cmd),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn kernel_names_parse() {
        for k in KernelKind::ALL {
            assert_eq!(parse_kind(k.name()).unwrap(), k);
        }
        assert!(parse_kind("kbb").is_err());
    }

    #[test]
    fn tagged_rows_lead_with_the_model() {
        let row = DivergenceRow {
            n: 16,
            n_prime: 32,
            distance: 0.5,
            predicted_phase_gap: 0.1,
            phase_drift: 0.2,
            window_end: 0.01,
        };
        let t = TaggedRow(Model::Mkdv2, &row);
        assert_eq!(TaggedRow::header()[..2], ["model", "n"]);
        assert_eq!(t.record()[0], "mkdv2");
        assert_eq!(t.record().len(), TaggedRow::header().len());
    }

    #[test]
    fn negative_phis_parse() {
        let cli = Cli::try_parse_from(["mkdv", "kernels", "sweep", "--phi", "-6,6"]).unwrap();
        match cli.command {
            Command::Kernels(KernelsCommand::Sweep(a)) => assert_eq!(a.phi, [-6, 6]),
            _ => unreachable!(),
        }
    }
}
