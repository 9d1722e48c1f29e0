//! `ere`: scans, bound tables, verification suites and figure rendering for
//! elliptic relative equilibria.

mod config;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use config::{merge, Config};
use ere_core::cli_scanner::{
    bound_table, parse_csv, parse_json, region_curves, render_region, run_suite, scan, verify_kepler, write_csv,
    write_json, Axis, ScanFamily, ScanRequest, ScanRow, Suite, VerifyReport,
};
use ere_core::configurations::FamilySpec;
use ere_core::hill_index::{system_index, Omega, DEFAULT_NULL_TOL};
use ere_core::ode_engine::{monodromy_with, MonodromyOptions};
use ere_core::trace_engine::{trace_value, Half, PerturbationLabel, TraceMethod, E0_DEFAULT};
use ere_core::{Eccentricity, Error, Result};

#[derive(Parser)]
#[command(name = "ere", version, about = "Linear stability of elliptic relative equilibria")]
struct Cli {
    /// TOML file with defaults; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the closed-form Kepler solution with the integrator.
    KeplerVerify(KeplerVerifyArgs),
    /// Monodromy matrix, spectrum and class of one system.
    Monodromy(MonodromyArgs),
    /// Tabulate a region boundary against e.
    Bounds(BoundsArgs),
    /// One trace value Tr(F²) for a perturbation and half.
    Trace(TraceArgs),
    /// ω-Morse index and nullity by Hill's method.
    Index(IndexArgs),
    /// Classify every point of a parameter × e grid.
    Scan(ScanArgs),
    /// Draw a scan table as SVG.
    Render(RenderArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Deserialize, Default)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
struct KeplerVerifyArgs {
    /// Comma-separated eccentricities.
    #[arg(long, value_delimiter = ',')]
    e: Option<Vec<f64>>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    #[serde(skip)]
    json: bool,
}

#[derive(Args, Deserialize, Default)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
struct Tolerances {
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    class_tol: Option<f64>,
}

#[derive(Args, Deserialize, Default)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
struct MonodromyArgs {
    /// kepler, lagrange, euler, alphaeta or gon.
    #[arg(long)]
    family: Option<String>,
    /// Family parameters, e.g. `beta=0.5`, `alpha=1.2,eta=0.3`, `n=9,m=100[,l=1]`.
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    e: Option<f64>,
    #[arg(long)]
    #[serde(skip)]
    json: bool,
    #[command(flatten)]
    #[serde(flatten)]
    tol: Tolerances,
}

#[derive(Args, Deserialize, Default)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
struct BoundsArgs {
    /// lagrange, euler, alphaeta or gon (`gon` takes `--params n=9,rule=printed-reduction`).
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    e_min: Option<f64>,
    #[arg(long)]
    e_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Use the explicit g-bounds (the gon always does).
    #[arg(long)]
    use_g: bool,
    #[arg(long)]
    e0: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Deserialize, Default)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
struct TraceArgs {
    /// dl, de or dtilde.
    #[arg(long)]
    perturbation: Option<String>,
    #[arg(long)]
    e: Option<f64>,
    /// plus or minus.
    #[arg(long)]
    half: Option<String>,
    /// closed, quadrature or direct.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Args, Deserialize, Default)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
struct IndexArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    e: Option<f64>,
    /// 1 or -1.
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    /// Fourier truncation K; the result is checked against 2K.
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    null_tol: Option<f64>,
}

#[derive(Args, Deserialize, Default)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
struct ScanArgs {
    /// lagrange, euler, alphaeta or gon.
    #[arg(long)]
    family: Option<String>,
    /// `eta=…` for alphaeta; `n=…,rule=all-corners|printed-reduction` for gon.
    #[arg(long)]
    params: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    param_min: Option<f64>,
    #[arg(long)]
    param_max: Option<f64>,
    #[arg(long)]
    param_samples: Option<usize>,
    #[arg(long)]
    e_min: Option<f64>,
    #[arg(long)]
    e_max: Option<f64>,
    #[arg(long)]
    e_samples: Option<usize>,
    /// Also write an SVG with the region boundaries next to the table.
    #[arg(long)]
    overlay_bounds: bool,
    /// Region membership from the explicit g-bounds.
    #[arg(long)]
    use_g: bool,
    #[arg(long)]
    e0: Option<f64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Output table; `.json` selects JSON, anything else CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    tol: Tolerances,
}

#[derive(Args, Deserialize, Default)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
struct RenderArgs {
    /// Scan table (CSV, or JSON by extension).
    #[arg(long = "in")]
    #[serde(rename = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    e0: Option<f64>,
    /// Leave out the region boundaries.
    #[arg(long)]
    no_curves: bool,
}

#[derive(Args, Deserialize, Default)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
struct VerifyArgs {
    /// kepler, traces, indices, gon9 or all.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    #[serde(skip)]
    json: bool,
}

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_VERIFY: u8 = 3;

enum Failure {
    Core(Error),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| invalid(format!("--{flag} is required (on the command line or in the config file)")))
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    invalid(format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| io_error(path, e))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|x| x.eq_ignore_ascii_case("json"))
}

fn parse_kv(params: &str) -> Result<Vec<(String, f64)>> {
    params
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p.split_once('=').ok_or_else(|| invalid(format!("expected key=value, got {p:?}")))?;
            let v: f64 = v.trim().parse().map_err(|_| invalid(format!("{k} = {v:?} is not a number")))?;
            Ok((k.trim().to_ascii_lowercase(), v))
        })
        .collect()
}

fn family_spec(family: &str, params: &str) -> Result<FamilySpec> {
    let kv = parse_kv(params)?;
    let allowed: &[&str] = match family {
        "kepler" => &[],
        "lagrange" | "euler" => &["beta"],
        "alphaeta" => &["alpha", "eta"],
        "gon" => &["n", "m", "l"],
        other => return Err(invalid(format!("unknown family {other:?}"))),
    };
    if let Some((k, _)) = kv.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return Err(invalid(format!("{family} has no parameter {k:?} (expected {allowed:?})")));
    }
    let get = |k: &str| kv.iter().find(|(key, _)| key == k).map(|&(_, v)| v);
    let req = |k: &str| get(k).ok_or_else(|| invalid(format!("{family} needs {k}=…")));
    let whole = |k: &str| -> Result<usize> {
        let v = req(k)?;
        if v.fract() != 0.0 || v < 0.0 {
            return Err(invalid(format!("{k} must be a whole number, got {v}")));
        }
        Ok(v as usize)
    };
    match family {
        "kepler" => Ok(FamilySpec::Kepler),
        "lagrange" => FamilySpec::lagrange(req("beta")?),
        "euler" => FamilySpec::euler(req("beta")?),
        "alphaeta" => FamilySpec::alpha_eta(req("alpha")?, req("eta")?),
        _ => match get("l") {
            Some(_) => FamilySpec::gon_block(whole("n")?, req("m")?, whole("l")?),
            None => FamilySpec::gon(whole("n")?, req("m")?),
        },
    }
}

fn scan_family(family: &str, params: Option<&str>) -> Result<ScanFamily> {
    match params.filter(|p| !p.trim().is_empty()) {
        Some(p) => format!("{family}[{p}]").parse(),
        None => family.parse(),
    }
}

fn mono_opts(t: &Tolerances) -> MonodromyOptions {
    let d = MonodromyOptions::default();
    MonodromyOptions {
        rel_tol: t.rel_tol.unwrap_or(d.rel_tol),
        abs_tol: t.abs_tol.unwrap_or(d.abs_tol),
        class_tol: t.class_tol.unwrap_or(d.class_tol),
    }
}

fn print_report(report: &VerifyReport, as_json: bool) -> Outcome {
    if as_json {
        println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
    } else {
        print!("{report}");
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn kepler_verify(a: KeplerVerifyArgs) -> Outcome {
    let es = a.e.unwrap_or_else(|| vec![0.0, 0.3, 0.6, 0.9]);
    for &e in &es {
        Eccentricity::new(e)?;
    }
    print_report(&verify_kepler(&es, a.tol.unwrap_or(1e-8)), a.json)
}

fn monodromy(a: MonodromyArgs) -> Outcome {
    let family = need(a.family, "family")?;
    let spec = family_spec(&family, a.params.as_deref().unwrap_or(""))?;
    let e = Eccentricity::new(need(a.e, "e")?)?;
    let sys = spec.system(e)?;
    let m = monodromy_with(&sys, mono_opts(&a.tol))?;
    if a.json {
        let rows: Vec<Vec<f64>> = m.matrix.row_iter().map(|r| r.iter().copied().collect()).collect();
        let out = json!({
            "family": spec,
            "e": e.get(),
            "classification": m.classification,
            "linearly_stable": m.all_linearly_stable(),
            "blocks": m.blocks,
            "stats": m.stats,
            "matrix": rows,
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    } else {
        println!("family {} e={} dim={}", spec.name(), e.get(), sys.dim());
        for (i, b) in m.blocks.iter().enumerate() {
            let class = b.class.map_or("-", |c| c.as_str());
            println!(
                "block {i}: dim {} class {class} linearly_stable {} symplectic_defect {:.3e}",
                b.dim, b.linearly_stable, b.symplectic_defect
            );
            for (re, im) in &b.eigenvalues {
                println!("  {re:+.12e} {im:+.12e}i  |z|={:.12}", re.hypot(*im));
            }
        }
        println!("steps {} (rejected {})", m.stats.accepted, m.stats.rejected);
    }
    Ok(())
}

fn bounds(a: BoundsArgs) -> Outcome {
    let family = scan_family(&need(a.family, "family")?, a.params.as_deref())?;
    let axis = Axis::new(need(a.e_min, "e-min")?, need(a.e_max, "e-max")?, need(a.samples, "samples")?)?;
    let table = bound_table(family, axis, a.use_g, a.e0.unwrap_or(E0_DEFAULT))?;
    let out = need(a.out, "out")?;
    let mut w = create(&out)?;
    let label = family.to_string();
    let io = |e: std::io::Error| io_error(&out, e);
    writeln!(w, "family,e,bound").map_err(io)?;
    for s in &table {
        let v = s.value.map_or(String::new(), |v| format!("{v:.16e}"));
        writeln!(w, "\"{label}\",{:.16e},{v}", s.e).map_err(io)?;
    }
    w.flush().map_err(io)?;
    Ok(())
}

fn trace(a: TraceArgs) -> Outcome {
    let label: PerturbationLabel = need(a.perturbation, "perturbation")?.parse()?;
    let e = Eccentricity::new(need(a.e, "e")?)?;
    let half: Half = need(a.half, "half")?.parse()?;
    let method: TraceMethod = a.method.as_deref().unwrap_or("closed").parse()?;
    let v = trace_value(label, e, half, method)?;
    println!("{v:.16e}");
    Ok(())
}

fn index(a: IndexArgs) -> Outcome {
    let family = need(a.family, "family")?;
    let spec = family_spec(&family, a.params.as_deref().unwrap_or(""))?;
    let e = Eccentricity::new(need(a.e, "e")?)?;
    let omega: Omega = need(a.omega, "omega")?.parse()?;
    let k = a.modes.unwrap_or(64);
    let r = system_index(&spec.system(e)?, omega, k, a.null_tol.unwrap_or(DEFAULT_NULL_TOL))?;
    println!("morse {} nullity {} (K = {}, threshold {:.3e})", r.morse, r.nullity, r.truncation, r.tol);
    Ok(())
}

fn run_scan(a: ScanArgs, progress: bool) -> Outcome {
    let family = scan_family(&need(a.family, "family")?, a.params.as_deref())?;
    let param = Axis::new(need(a.param_min, "param-min")?, need(a.param_max, "param-max")?, need(a.param_samples, "param-samples")?)?;
    let e = Axis::new(need(a.e_min, "e-min")?, need(a.e_max, "e-max")?, need(a.e_samples, "e-samples")?)?;
    let out = need(a.out, "out")?;
    let opts = mono_opts(&a.tol);
    let mut req = ScanRequest::new(family, param, e);
    req.rel_tol = opts.rel_tol;
    req.abs_tol = opts.abs_tol;
    req.class_tol = opts.class_tol;
    req.use_g = a.use_g;
    req.e0 = a.e0.unwrap_or(E0_DEFAULT);
    req.overlay_bounds = a.overlay_bounds;
    req.workers = a.workers;
    let rows = scan(&req)?;
    let failed = rows.iter().filter(|r| r.failed()).count();
    if failed > 0 && progress {
        eprintln!("warning: {failed} of {} grid points failed to integrate", rows.len());
    }
    write_table(&rows, &out)?;
    if req.overlay_bounds {
        let svg = out.with_extension("svg");
        let curves = region_curves(family, &fine_e(&rows), req.e0)?;
        std::fs::write(&svg, render_region(&rows, &curves)).map_err(|e| io_error(&svg, e))?;
    }
    Ok(())
}

fn write_table(rows: &[ScanRow], out: &Path) -> Result<()> {
    let w = create(out)?;
    if is_json(out) {
        write_json(rows, w)
    } else {
        write_csv(rows, w)
    }
}

/// 201 eccentricities spanning the table, for smooth boundary curves.
fn fine_e(rows: &[ScanRow]) -> Vec<f64> {
    let lo = rows.iter().map(|r| r.e).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.e).fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) {
        return Vec::new();
    }
    (0..=200).map(|i| lo + (hi - lo) * i as f64 / 200.0).collect()
}

fn render(a: RenderArgs) -> Outcome {
    let input = need(a.input, "in")?;
    let out = need(a.out, "out")?;
    let reader = BufReader::new(File::open(&input).map_err(|e| io_error(&input, e))?);
    let rows = if is_json(&input) { parse_json(reader)? } else { parse_csv(reader)? };
    if rows.is_empty() {
        return Err(invalid(format!("{} holds no rows", input.display())).into());
    }
    let curves = match (a.no_curves, rows[0].family.parse::<ScanFamily>()) {
        (false, Ok(family)) => region_curves(family, &fine_e(&rows), a.e0.unwrap_or(E0_DEFAULT))?,
        _ => Vec::new(),
    };
    std::fs::write(&out, render_region(&rows, &curves)).map_err(|e| io_error(&out, e))?;
    Ok(())
}

fn verify(a: VerifyArgs) -> Outcome {
    let suite: Suite = a.suite.as_deref().unwrap_or("all").parse()?;
    print_report(&run_suite(suite), a.json)
}

const TOL_KEYS: [&str; 3] = ["rel-tol", "abs-tol", "class-tol"];

fn dispatch(cli: Cli) -> Outcome {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::empty(),
    };
    match cli.command {
        Command::KeplerVerify(mut a) => {
            let c: KeplerVerifyArgs = cfg.section("kepler-verify", &["e", "tol"])?;
            merge!(a, c; e, tol;);
            kepler_verify(a)
        }
        Command::Monodromy(mut a) => {
            let c: MonodromyArgs = cfg.section("monodromy", &TOL_KEYS)?;
            merge!(a, c; family, params, e;);
            merge!(a.tol, c.tol; rel_tol, abs_tol, class_tol;);
            monodromy(a)
        }
        Command::Bounds(mut a) => {
            let c: BoundsArgs = cfg.section("bounds", &["e0"])?;
            merge!(a, c; family, params, e_min, e_max, samples, e0, out; use_g);
            bounds(a)
        }
        Command::Trace(mut a) => {
            let c: TraceArgs = cfg.section("trace", &[])?;
            merge!(a, c; perturbation, e, half, method;);
            trace(a)
        }
        Command::Index(mut a) => {
            let c: IndexArgs = cfg.section("index", &["modes", "null-tol"])?;
            merge!(a, c; family, params, e, omega, modes, null_tol;);
            index(a)
        }
        Command::Scan(mut a) => {
            let c: ScanArgs = cfg.section("scan", &["workers", "e0", "rel-tol", "abs-tol", "class-tol"])?;
            merge!(a, c; family, params, param_min, param_max, param_samples, e_min, e_max, e_samples, e0, workers, out; overlay_bounds, use_g);
            merge!(a.tol, c.tol; rel_tol, abs_tol, class_tol;);
            run_scan(a, true)
        }
        Command::Render(mut a) => {
            let c: RenderArgs = cfg.section("render", &["e0"])?;
            merge!(a, c; input, out, e0; no_curves);
            render(a)
        }
        Command::Verify(mut a) => {
            let c: VerifyArgs = cfg.section("verify", &[])?;
            merge!(a, c; suite;);
            verify(a)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(EXIT_VALIDATION) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(EXIT_VERIFY),
        Err(Failure::Core(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_numeric() { EXIT_NUMERIC } else { EXIT_VALIDATION })
        }
    }
}
