//! Command-line front end: theta series, wiretap bounds, l1 minima,
//! packing search and coset-coding simulation.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use crosstheta::packing::{self, PackingOptions};
use crosstheta::sim::{self, Decoder, Receiver, SimConfig};
use crosstheta::{geometry, io, theta, wiretap, Error, Lattice};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;

use output::{g17, to_json, Csv, RunManifest};

#[derive(Parser, Serialize)]
#[command(name = "crosstheta", version, about = "l1 theta series, cross-polytope packings and wiretap coset codes")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Random seed for pack and simulate.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout if omitted); a manifest is written beside it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// l1 theta series of a lattice (or of its dual).
    Theta(ThetaArgs),
    /// F, G, Pce and Peb curves over a range of SNRs.
    Bounds(BoundsArgs),
    /// l1 minimum, minimal vectors and packing report.
    Svp(SvpArgs),
    /// Search for locally critical cross-polytope packings.
    Pack(PackArgs),
    /// Monte Carlo coset decoding over a Rayleigh fading channel.
    Simulate(SimulateArgs),
}

#[derive(Args, Serialize)]
struct ThetaArgs {
    /// Lattice file (JSON or plain-text basis).
    #[arg(long)]
    lattice: PathBuf,
    /// Truncation order in q.
    #[arg(long, default_value_t = 8)]
    order: usize,
    /// Series of the dual lattice.
    #[arg(long)]
    dual: bool,
    /// Also emit the closed form as a rational function.
    #[arg(long)]
    rational: bool,
}

#[derive(Args, Serialize)]
struct BoundsArgs {
    /// Legitimate receiver's lattice.
    #[arg(long)]
    lattice_b: PathBuf,
    /// Eavesdropper's sublattice.
    #[arg(long)]
    lattice_e: PathBuf,
    /// SNR grid in dB as lo:hi:step.
    #[arg(long, default_value = "-10:20:1")]
    gamma_db_range: String,
    /// Absolute tolerance on the truncated F sum.
    #[arg(long, default_value_t = 1e-6)]
    tail_tol: f64,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Norm {
    L1,
}

#[derive(Args, Serialize)]
struct SvpArgs {
    #[arg(long)]
    lattice: PathBuf,
    #[arg(long, value_enum, default_value_t = Norm::L1)]
    norm: Norm,
    /// Full packing report (density, kissing number, well-roundedness).
    #[arg(long)]
    report: bool,
}

#[derive(Args, Serialize)]
struct PackArgs {
    #[arg(long)]
    dim: usize,
    /// Bound on the coefficients of minimal vectors.
    #[arg(long, default_value_t = 2)]
    coeff_cap: i64,
    /// Restrict basis entries to |B_ij| <= 1/2.
    #[arg(long)]
    half_box: bool,
    /// Random starts per configuration.
    #[arg(long, default_value_t = 10)]
    multistarts: usize,
    /// Number of configurations to try.
    #[arg(long, default_value_t = 100)]
    count_target: usize,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Who {
    Eve,
    Bob,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum DecoderArg {
    Auto,
    Exhaustive,
    Sphere,
}

#[derive(Args, Serialize)]
struct SimulateArgs {
    /// Superlattice and sublattice files.
    #[arg(long, num_args = 2, value_names = ["LATTICE_B", "LATTICE_E"])]
    code: Vec<PathBuf>,
    /// PAM levels per dimension.
    #[arg(long, default_value_t = 16)]
    pam: usize,
    /// SNR grid in dB as lo:hi:step.
    #[arg(long, default_value = "0:20:5")]
    snr_db: String,
    #[arg(long, default_value_t = 100_000)]
    rounds: u64,
    #[arg(long, value_enum, default_value_t = Who::Eve)]
    who: Who,
    #[arg(long, value_enum, default_value_t = DecoderArg::Auto)]
    decoder: DecoderArg,
    /// Rayleigh parameter of the fading.
    #[arg(long, default_value_t = 1.0)]
    sigma_h: f64,
}

enum Failure {
    /// Bad flag value or input file: exit code 2.
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidLattice(_)
            | Error::NotIntegral
            | Error::NotSublattice
            | Error::InvalidArgument(_)
            | Error::Parse { .. }
            | Error::InsufficientConstellation { .. } => Failure::Usage(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

fn read_lattice(path: &Path, flag: &str) -> Outcome<Lattice> {
    io::read_lattice(path).map_err(|e| Failure::Usage(format!("--{flag}: {e}")))
}

fn parse_range(text: &str, flag: &str) -> Outcome<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let nums: Option<Vec<f64>> = parts.iter().map(|p| p.trim().parse().ok()).collect();
    let (lo, hi, step) = match nums.as_deref() {
        Some([x]) => (*x, *x, 1.0),
        Some([lo, hi, step]) => (*lo, *hi, *step),
        _ => return usage(format!("--{flag}: expected lo:hi:step, got {text:?}")),
    };
    if !(step > 0.0) || hi < lo || !lo.is_finite() || !hi.is_finite() {
        return usage(format!("--{flag}: need lo <= hi and step > 0, got {text:?}"));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return usage(format!("--{flag}: grid has {count} points"));
    }
    Ok((0..count).map(|k| lo + k as f64 * step).collect())
}

fn exponent_string(k: usize, root: u64) -> String {
    BigRational::new((k as i64).into(), (root as i64).into()).to_string()
}

fn run_theta(a: &ThetaArgs, format: Format) -> Outcome<String> {
    let lat = read_lattice(&a.lattice, "lattice")?;
    let target = if a.dual { lat.dual() } else { lat.clone() };
    let series = if a.dual { theta::theta_l1_dual_lattice(&lat, a.order)? } else { theta::theta_l1_lattice(&lat)?.expand_q(a.order) };
    let closed = if a.rational { Some(theta::theta_l1_lattice(&target)?.to_string()) } else { None };
    let terms: Vec<(String, String)> = series
        .coefficients()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.numer().bits() != 0)
        .map(|(k, c)| (exponent_string(k, series.root()), c.to_string()))
        .collect();
    Ok(match format {
        Format::Json => to_json(&json!({
            "order": a.order,
            "dual": a.dual,
            "terms": terms.iter().map(|(e, c)| json!({"exponent": e, "coefficient": c})).collect::<Vec<_>>(),
            "rational_function": closed,
        })),
        Format::Csv => {
            let mut csv = Csv::new(&["exponent", "coefficient"]);
            if let Some(c) = &closed {
                csv.comment(&format!("theta = {c}"));
            }
            for (e, c) in terms {
                csv.row(&[e, c]);
            }
            csv.finish()
        }
    })
}

fn run_bounds(a: &BoundsArgs, format: Format) -> Outcome<String> {
    let b = read_lattice(&a.lattice_b, "lattice-b")?;
    let e = read_lattice(&a.lattice_e, "lattice-e")?;
    if b.dim() != e.dim() {
        return usage("--lattice-e: dimension differs from --lattice-b");
    }
    if !(a.tail_tol > 0.0) {
        return usage("--tail-tol must be positive");
    }
    let grid = parse_range(&a.gamma_db_range, "gamma-db-range")?;
    let curves = wiretap::bound_curves(&b, &e, &grid, a.tail_tol)?;
    Ok(match format {
        Format::Json => to_json(&curves),
        Format::Csv => {
            let mut csv = Csv::new(&["gamma_db", "F_exact", "G_upper", "Pce_bound", "Peb_bound"]);
            let col = |kind: wiretap::BoundKind| curves.iter().find(|c| c.kind == kind).expect("all kinds present");
            let (f, g, pce, peb) = (
                col(wiretap::BoundKind::FExact),
                col(wiretap::BoundKind::GUpper),
                col(wiretap::BoundKind::PceBound),
                col(wiretap::BoundKind::PebBound),
            );
            for (k, db) in grid.iter().enumerate() {
                csv.row(&[g17(*db), g17(f.values[k]), g17(g.values[k]), g17(pce.values[k]), g17(peb.values[k])]);
            }
            csv.finish()
        }
    })
}

fn run_svp(a: &SvpArgs, format: Format) -> Outcome<String> {
    let lat = read_lattice(&a.lattice, "lattice")?;
    let Norm::L1 = a.norm;
    if a.report {
        let rep = geometry::packing_report(&lat)?;
        return Ok(match format {
            Format::Json => to_json(&rep),
            Format::Csv => {
                let mut csv = Csv::new(&["dimension", "lambda1", "volume", "density", "kissing", "well_rounded", "strongly_well_rounded"]);
                csv.row(&[
                    rep.dimension.to_string(),
                    g17(rep.lambda1),
                    g17(rep.volume),
                    g17(rep.density),
                    rep.kissing.to_string(),
                    rep.well_rounded.to_string(),
                    rep.strongly_well_rounded.to_string(),
                ]);
                csv.finish()
            }
        });
    }
    let mvs = geometry::l1_minimum(&lat)?;
    Ok(match format {
        Format::Json => to_json(&mvs),
        Format::Csv => {
            let n = lat.dim();
            let mut header: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
            header.extend((0..n).map(|i| format!("x{i}")));
            let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
            csv.comment(&format!(
                "lambda1 = {}, kissing = {}",
                mvs.lambda1_exact.as_ref().map_or_else(|| g17(mvs.lambda1), |r| r.to_string()),
                mvs.kissing()
            ));
            for (c, v) in mvs.coefficients.iter().zip(&mvs.vectors) {
                csv.row(&c.iter().map(|x| x.to_string()).chain(v.iter().map(|x| g17(*x))).collect::<Vec<_>>());
            }
            csv.finish()
        }
    })
}

#[derive(Serialize)]
struct PackEntry {
    rank: usize,
    solution: packing::PackingSolution,
    diagnostics: packing::CriticalityDiagnostics,
}

fn run_pack(a: &PackArgs, seed: u64, format: Format) -> Outcome<String> {
    if a.dim == 0 || a.dim > 8 {
        return usage("--dim must be between 1 and 8");
    }
    if a.coeff_cap < 1 {
        return usage("--coeff-cap must be at least 1");
    }
    if a.multistarts == 0 || a.count_target == 0 {
        return usage("--multistarts and --count-target must be positive");
    }
    let opts = PackingOptions {
        coeff_cap: a.coeff_cap,
        half_box: a.half_box,
        multistarts: a.multistarts,
        count_target: a.count_target,
        seed,
        ..Default::default()
    };
    let sols = packing::search(a.dim, &opts)?;
    let mut entries = Vec::with_capacity(sols.len());
    for (k, solution) in sols.into_iter().enumerate() {
        let diagnostics = packing::verify_local_criticality(&solution.basis, seed)?;
        entries.push(PackEntry { rank: k + 1, solution, diagnostics });
    }
    Ok(match format {
        Format::Json => to_json(&entries),
        Format::Csv => {
            let mut csv = Csv::new(&["rank", "density", "kissing", "kkt_residual", "locally_critical"]);
            for e in &entries {
                csv.row(&[
                    e.rank.to_string(),
                    g17(e.solution.density()),
                    e.solution.report.kissing.to_string(),
                    g17(e.solution.kkt_residual),
                    e.diagnostics.passed.to_string(),
                ]);
            }
            csv.finish()
        }
    })
}

fn run_simulate(a: &SimulateArgs, seed: u64, format: Format) -> Outcome<String> {
    let b = read_lattice(&a.code[0], "code")?;
    let e = read_lattice(&a.code[1], "code")?;
    if a.pam < 2 {
        return usage("--pam must be at least 2");
    }
    if a.rounds == 0 {
        return usage("--rounds must be positive");
    }
    if !(a.sigma_h > 0.0) {
        return usage("--sigma-h must be positive");
    }
    let grid = parse_range(&a.snr_db, "snr-db")?;
    let code = sim::build_coset_code(&b, &e, a.pam)?;
    let mut cfg = SimConfig::new(grid, a.rounds, seed);
    cfg.sigma_h = a.sigma_h;
    cfg.decoder = match a.decoder {
        DecoderArg::Auto => Decoder::Auto,
        DecoderArg::Exhaustive => Decoder::Exhaustive,
        DecoderArg::Sphere => Decoder::Sphere,
    };
    let who = match a.who {
        Who::Eve => Receiver::Eve,
        Who::Bob => Receiver::Bob,
    };
    let res = sim::simulate(&code, &cfg, who)?;
    Ok(match format {
        Format::Json => to_json(&res),
        Format::Csv => {
            let mut csv = Csv::new(&["snr_db", "estimate", "ci_halfwidth"]);
            for p in &res.points {
                csv.row(&[g17(p.snr_db), g17(p.estimate), g17(p.ci_halfwidth)]);
            }
            csv.finish()
        }
    })
}

fn input_files(cmd: &Command) -> Vec<&Path> {
    match cmd {
        Command::Theta(a) => vec![&a.lattice],
        Command::Bounds(a) => vec![&a.lattice_b, &a.lattice_e],
        Command::Svp(a) => vec![&a.lattice],
        Command::Pack(_) => vec![],
        Command::Simulate(a) => a.code.iter().map(PathBuf::as_path).collect(),
    }
}

fn dispatch(cli: &Cli) -> Outcome<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return usage("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| Failure::Run(e.to_string()))?;
    }
    for path in input_files(&cli.command) {
        if !path.is_file() {
            return usage(format!("input file not found: {}", path.display()));
        }
    }
    let text = match &cli.command {
        Command::Theta(a) => run_theta(a, cli.format)?,
        Command::Bounds(a) => run_bounds(a, cli.format)?,
        Command::Svp(a) => run_svp(a, cli.format)?,
        Command::Pack(a) => run_pack(a, cli.seed, cli.format)?,
        Command::Simulate(a) => run_simulate(a, cli.seed, cli.format)?,
    };
    let Some(out) = &cli.out else {
        print!("{text}");
        return Ok(());
    };
    let write = |path: &Path, body: &str| std::fs::write(path, body).map_err(|e| Failure::Usage(format!("--out {}: {e}", path.display())));
    write(out, &text)?;
    let flags = serde_json::to_value(cli).expect("serializable");
    let subcommand = flags["command"].as_object().and_then(|m| m.keys().next().cloned()).unwrap_or_default();
    let inputs = input_files(&cli.command)
        .into_iter()
        .map(|p| output::digest(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))))
        .collect::<Outcome<Vec<_>>>()?;
    let manifest = RunManifest { subcommand, flags, inputs, tool_version: env!("CARGO_PKG_VERSION").into(), seed: cli.seed };
    write(&output::manifest_path(out), &to_json(&manifest))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
