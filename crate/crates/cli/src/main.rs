use std::collections::BTreeMap;
use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};

use cliffdirac::clifford::kn_constant;
use cliffdirac::constants::{c1_crossover, c1_sweep, heat_decay_bound, omega_with, ConstantsTable, OmegaConvention};
use cliffdirac::dirac::SpectralPlan;
use cliffdirac::families::{FieldKind, TestFamily};
use cliffdirac::grid::GridSpec;
use cliffdirac::harness::{run_suite, Suite, SuiteConfig, HEAT_TIMES};
use cliffdirac::report::{write_plot_csv, VerificationReport};
use cliffdirac::zero_modes::{compare_thresholds_table, default_k_grid, write_threshold_csv};
use cliffdirac::{AlgebraSignature, ScalarField};

#[derive(Parser)]
#[command(name = "cliffdirac", version, about = "Explicit constants and numerical checks for Dirac-Sobolev inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print (and optionally write) the constants table.
    Constants {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and write the report.
    Verify(VerifyArgs),
    /// Turn a report into plot-ready CSV sorted by margin.
    Plotdata {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Heat flow of one seeded nonnegative field against the decay envelope.
    Heat {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Case index within the seeded family.
        #[arg(long, default_value_t = 0)]
        case: usize,
        /// Write the field at the final time as CSV.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Integrability thresholds of the weighted zero-mode integral.
    Thresholds {
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compare the two C₁ variants over a range of dimensions.
    Sweep {
        #[arg(long, default_value_t = 3)]
        from: usize,
        #[arg(long, default_value_t = 60)]
        to: usize,
        #[arg(long)]
        complex: bool,
        #[arg(long, default_value = "paper")]
        omega: OmegaConvention,
    },
}

#[derive(Args, Clone)]
struct AlgebraArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Generators of the value algebra; defaults to n.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    complex: bool,
    #[arg(long, default_value = "paper")]
    omega: OmegaConvention,
}

impl AlgebraArgs {
    fn signature(&self) -> cliffdirac::Result<AlgebraSignature> {
        let field = if self.complex { ScalarField::Complex } else { ScalarField::Real };
        AlgebraSignature::new(self.n, self.m.unwrap_or(self.n), field)
    }
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Points per axis.
    #[arg(long = "grid", default_value_t = 48)]
    points: usize,
    /// Half-width L of the box [-L, L)^n.
    #[arg(long, default_value_t = 10.0)]
    extent: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    cases: usize,
    #[arg(long, default_value = "all")]
    suite: String,
    /// Tolerance override `check=value`; repeatable. Keys match check ids or their prefixes.
    #[arg(long = "tol", value_parser = parse_tolerance)]
    tol: Vec<(String, f64)>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected check=value, got `{s}`"))?;
    let v: f64 = v.parse().map_err(|e| format!("bad tolerance `{v}`: {e}"))?;
    if k.is_empty() || !(v.is_finite() && v >= 0.0) {
        return Err(format!("bad tolerance override `{s}`"));
    }
    Ok((k.to_string(), v))
}

/// Verification outcome kept apart from configuration errors.
enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Constants { algebra, out } => cmd_constants(&algebra, out),
        Command::Verify(args) => cmd_verify(args),
        Command::Plotdata { report, out } => cmd_plotdata(report, out),
        Command::Heat { algebra, grid, seed, case, snapshot } => cmd_heat(&algebra, &grid, seed, case, snapshot),
        Command::Thresholds { points, csv } => cmd_thresholds(points, csv),
        Command::Sweep { from, to, complex, omega } => cmd_sweep(from, to, complex, omega),
    }
}

fn cmd_constants(algebra: &AlgebraArgs, out: Option<PathBuf>) -> anyhow::Result<Outcome> {
    let sig = algebra.signature()?;
    let table = match ConstantsTable::build(sig, algebra.omega) {
        Ok(t) => t,
        Err(e) => {
            // the algebra constants exist even when the Sobolev ones do not
            println!("K_{} ({}) = {}", sig.m(), sig.field(), kn_constant(sig.m(), sig.field()));
            if let Ok(w) = omega_with(sig.n(), algebra.omega) {
                println!("omega_{} ({}) = {}", sig.n(), algebra.omega, w);
            }
            return Err(e.into());
        }
    };
    println!("n = {}, m = {}, field = {}, omega = {}", table.n, table.m, table.field, algebra.omega);
    println!("K_{:<18} {:.10}", table.m, table.k);
    println!("omega_n             {:.10}", table.omega_n);
    println!("C1 plancherel       {:.10}", table.c1_plancherel);
    println!("C1 young            {:.10}", table.c1_young);
    let which = if table.c1_young <= table.c1_plancherel { "young" } else { "plancherel" };
    println!("C1 min              {:.10} ({which})", table.c1_min);
    println!("gaussian k          {:.10}", table.gaussian_k);
    for h in &table.hls {
        println!("HLS {:<8} lambda={:<5} p={:.4} q={:.4}  {:.10}", h.mode.to_string(), h.lambda, h.p, h.q, h.value);
    }
    for c in &table.sobolev_cl {
        println!("l={}  c_l={:+.10}  C_l={:+.10}", c.l, c.c_l, c.big_c_l);
    }
    if let Some(path) = out {
        std::fs::write(&path, cliffdirac::report::to_json_17(&table)?).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Outcome::Pass)
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<Outcome> {
    let suite: Suite = args.suite.parse()?;
    let sig = args.algebra.signature()?;
    let grid = GridSpec::new(args.algebra.n, args.grid.points, args.grid.extent)?;
    let mut cfg = SuiteConfig::new(suite, grid, sig, args.seed, args.cases);
    cfg.omega = args.algebra.omega;
    cfg.tolerances = args.tol.into_iter().collect::<BTreeMap<_, _>>();
    let report = run_suite(&cfg)?;

    print_summary(&report);
    if let Some(path) = &args.out {
        report.write_json(path).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.csv {
        report.write_csv(path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if report.all_pass() { Outcome::Pass } else { Outcome::Fail })
}

fn print_summary(report: &VerificationReport) {
    let mut groups: BTreeMap<&str, (usize, usize, f64)> = BTreeMap::new();
    for r in &report.results {
        let e = groups.entry(r.check_id.as_str()).or_insert((0, 0, f64::INFINITY));
        if r.pass {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
        e.2 = e.2.min(r.margin);
    }
    println!("{:<32} {:>6} {:>6} {:>14}", "check", "pass", "fail", "min margin");
    for (id, (p, f, m)) in groups {
        println!("{id:<32} {p:>6} {f:>6} {m:>14.6e}");
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    if let Some(sign) = report.conventions.kernel_sign {
        let omega = report.conventions.kernel_omega.map(|o| o.to_string()).unwrap_or_default();
        println!("kernel convention: omega={omega}, sign={sign}");
    }
    println!("total: {} pass, {} fail, min margin {:.6e}", report.summary.pass, report.summary.fail, report.summary.min_margin);
}

fn cmd_plotdata(report: PathBuf, out: PathBuf) -> anyhow::Result<Outcome> {
    let text = std::fs::read_to_string(&report).with_context(|| format!("reading {}", report.display()))?;
    let parsed = VerificationReport::from_json(&text).map_err(|e| anyhow!("malformed report {}: {e}", report.display()))?;
    let file = File::create(&out).with_context(|| format!("writing {}", out.display()))?;
    write_plot_csv(&parsed.results, file)?;
    Ok(Outcome::Pass)
}

fn cmd_heat(algebra: &AlgebraArgs, grid: &GridArgs, seed: u64, case: usize, snapshot: Option<PathBuf>) -> anyhow::Result<Outcome> {
    let sig = algebra.signature()?;
    let spec = GridSpec::new(algebra.n, grid.points, grid.extent)?;
    let table = ConstantsTable::build(sig, algebra.omega)?;
    let kind = FieldKind::for_case(case);
    let f0 = TestFamily::new(seed, kind, case + 1).nonnegative().generate(spec, sig, case)?;
    let plan = SpectralPlan::new(spec);
    let (l1, l2) = (f0.norm(1.0)?, f0.norm(2.0)?);
    println!("field {kind}#{case}: |f0|_1 = {l1:.10e}, |f0|_2 = {l2:.10e}");
    println!("{:>6} {:>18} {:>18} {:>12}", "t", "|f(t)|_2", "bound", "L1 ratio");
    let mut ok = true;
    let mut last = f0.clone();
    for t in HEAT_TIMES {
        let ft = plan.heat(&f0, t)?;
        let norm = ft.norm(2.0)?;
        let bound = heat_decay_bound(t, l1, l2, spec.n(), table.c1_min)?;
        let l1_ratio = ft.norm(1.0)? / l1;
        let sandwich = 2f64.powf(spec.n() as f64 / 2.0);
        ok &= norm <= bound * (1.0 + 1e-3) && l1_ratio <= sandwich && l1_ratio >= 1.0 / sandwich;
        println!("{t:>6} {norm:>18.10e} {bound:>18.10e} {l1_ratio:>12.6}");
        last = ft;
    }
    if let Some(path) = snapshot {
        last.write_snapshot_csv(&path)?;
    }
    Ok(if ok { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_thresholds(points: usize, csv: Option<PathBuf>) -> anyhow::Result<Outcome> {
    if points == 0 {
        bail!("need at least one k value");
    }
    let rows = compare_thresholds_table(&default_k_grid(points))?;
    println!("{:>10} {:>12} {:>12} {:>12}", "k", "3 + k/2", "6 - 11k/10", "improvement");
    for r in &rows {
        println!("{:>10.6} {:>12.6} {:>12.6} {:>12}", r.k, r.alpha_new, r.alpha_prior, r.improvement);
    }
    if let Some(path) = csv {
        write_threshold_csv(&rows, File::create(&path).with_context(|| format!("writing {}", path.display()))?)?;
    }
    Ok(if rows.iter().all(|r| r.improvement) { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_sweep(from: usize, to: usize, complex: bool, omega: OmegaConvention) -> anyhow::Result<Outcome> {
    if from > to {
        bail!("empty range {from}..={to}");
    }
    let field = if complex { ScalarField::Complex } else { ScalarField::Real };
    let rows = c1_sweep(from..=to, field, omega)?;
    println!("{:>4} {:>22} {:>22}", "n", "C1 plancherel", "C1 young");
    for r in &rows {
        println!("{:>4} {:>22.10e} {:>22.10e}", r.n, r.plancherel, r.young);
    }
    match c1_crossover(&rows) {
        Some(n) => println!("plancherel variant first smaller at n = {n}"),
        None => println!("no crossover in range"),
    }
    Ok(Outcome::Pass)
}
