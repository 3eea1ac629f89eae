//! `polywalk generate|sample|benchmark|convert`
//!
//! Exit codes: 0 on success, 2 when a chain (or some sampler's sweep) failed
//! to mix, 1 on any error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use polywalk::baseline::{sample_baseline, BaselineConfig, ChordKind};
use polywalk::harness::{run_benchmark, BenchmarkSpec, SamplerId, Sweep};
use polywalk::io::{self, TransformFile};
use polywalk::{from_equality_form, generate, random_rotation, report, DensitySpec, Error, Family, HPolytope};
use polywalk::{rehmc, Chain, ReHmcConfig, Result, StepSize};

const EXIT_UNMIXED: u8 = 2;

#[derive(Parser)]
#[command(name = "polywalk", version, about = "Sample log-concave densities truncated to H-polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a standard polytope as JSON.
    Generate(GenerateArgs),
    /// Draw one chain and write samples plus a diagnostics report.
    Sample(SampleArgs),
    /// Sweep the walk length for each sampler and pick the best mixed row.
    Benchmark(BenchmarkArgs),
    /// Reduce an equality-form model to a full-dimensional polytope.
    Convert(ConvertArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// cube, simplex, cross, birkhoff, product_simplex or skinny_cube
    family: Family,
    /// Dimension.
    #[arg(long, conflicts_with = "n")]
    d: Option<usize>,
    /// Matrix order (birkhoff).
    #[arg(long)]
    n: Option<usize>,
    /// Apply a random rotation drawn with this seed.
    #[arg(long)]
    rotate: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ChainArgs {
    #[arg(long)]
    polytope: PathBuf,
    /// `gaussian:sigma2=<v>,center=cheby|origin|<csv>`, `uniform` or `exponential:c=<csv>`
    #[arg(long, default_value = "uniform")]
    density: DensitySpec,
    #[arg(long, default_value_t = 1000)]
    burnin: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial step size, or `auto` for a tenth of the Chebyshev radius.
    #[arg(long, default_value = "auto", value_parser = parse_step_size)]
    eta0: StepSize,
    #[arg(long)]
    max_reflections: Option<usize>,
    /// Keep the initial step size through burn-in.
    #[arg(long)]
    no_adapt: bool,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    chain: ChainArgs,
    #[arg(long, default_value = "rehmc")]
    sampler: SamplerId,
    #[arg(long, default_value_t = 1)]
    walk_length: usize,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Samples CSV.
    #[arg(long)]
    out: PathBuf,
    /// Diagnostics JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Map samples to original coordinates with a `convert` transform.
    #[arg(long)]
    transform: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    chain: ChainArgs,
    /// Comma-separated subset of rehmc, har, char.
    #[arg(long, value_delimiter = ',', default_value = "rehmc,har,char")]
    samplers: Vec<SamplerId>,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Walk-length sweep `start:step:end`; defaults to `1:max(1,d/10):d`.
    #[arg(long, value_parser = parse_sweep)]
    sweep: Option<Sweep>,
    /// Full sweep table as CSV.
    #[arg(long)]
    out: PathBuf,
    /// Rows, best rows and step-size traces as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    /// `{"A_eq", "b_eq", "l", "u"}` JSON.
    model: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// `{"W", "x_s"}` JSON.
    #[arg(long)]
    transform: PathBuf,
}

fn parse_step_size(s: &str) -> std::result::Result<StepSize, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(StepSize::Auto);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(StepSize::Fixed(v)),
        _ => Err(format!("expected `auto` or a positive number, got `{s}`")),
    }
}

fn parse_sweep(s: &str) -> std::result::Result<Sweep, String> {
    let parts: Vec<usize> = s
        .split(':')
        .map(|t| usize::from_str(t.trim()).map_err(|e| format!("bad sweep `{s}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [start, step, end] => Ok(Sweep { start, step, end }),
        _ => Err(format!("expected start:step:end, got `{s}`")),
    }
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    Unmixed,
}

fn cmd_generate(args: GenerateArgs) -> Result<Status> {
    let size = match (args.family, args.d, args.n) {
        (_, Some(d), None) => d,
        (Family::Birkhoff, None, Some(n)) => n,
        (_, None, Some(_)) => return Err(Error::InvalidArgument("--n is for birkhoff; use --d".into())),
        _ => return Err(Error::InvalidArgument("pass --d (or --n for birkhoff)".into())),
    };
    let mut p = generate(args.family, size)?;
    if let Some(seed) = args.rotate {
        p = random_rotation(&p, seed);
    }
    io::write_polytope(&args.out, &p)?;
    eprintln!("wrote {} (dim {}, {} facets)", args.out.display(), p.dim(), p.num_facets());
    Ok(Status::Ok)
}

fn load(args: &ChainArgs) -> Result<HPolytope> {
    io::read_polytope(&args.polytope)
}

fn cmd_sample(args: SampleArgs) -> Result<Status> {
    let p = load(&args.chain)?;
    let f = args.chain.density.build(&p)?;
    let c = &args.chain;
    let chain: Chain = match args.sampler {
        SamplerId::Rehmc => {
            let cfg = ReHmcConfig {
                eta0: c.eta0,
                walk_length: args.walk_length,
                max_reflections: c.max_reflections,
                burn_in: c.burnin,
                n_samples: args.n,
                seed: c.seed,
                stream: 0,
                adapt: !c.no_adapt,
                ..ReHmcConfig::default()
            };
            rehmc::sample(f.as_ref(), &p, &cfg)?
        }
        s => {
            let cfg = BaselineConfig {
                kind: if s == SamplerId::Har { ChordKind::Har } else { ChordKind::Char },
                walk_length: args.walk_length,
                burn_in: c.burnin,
                n_samples: args.n,
                seed: c.seed,
                stream: 0,
            };
            sample_baseline(f.as_ref(), &p, &cfg)?
        }
    };
    for w in &chain.warnings {
        eprintln!("warning: {w}");
    }

    match &args.transform {
        Some(path) => {
            let t: TransformFile = io::read_json(path)?;
            let mapped = chain.iter().map(|y| t.apply(y)).collect::<Result<Vec<_>>>()?;
            io::write_samples(&args.out, mapped.iter().map(Vec::as_slice))?;
        }
        None => io::write_chain(&args.out, &chain)?,
    }

    // too few draws for diagnostics is not a mixing failure; a constant chain is
    let (diagnostics, mixed) = match report(&chain) {
        Ok(r) => {
            let mixed = r.mixed();
            (Some(r), mixed)
        }
        Err(Error::Undefined(msg)) => {
            eprintln!("warning: diagnostics undefined: {msg}");
            (None, false)
        }
        Err(Error::TooFewSamples { .. }) => (None, true),
        Err(e) => return Err(e),
    };
    if let Some(path) = &args.report {
        let value = serde_json::json!({
            "sampler": args.sampler,
            "density": args.chain.density.to_string(),
            "walk_length": args.walk_length,
            "seed": c.seed,
            "acceptance_rate": chain.acceptance_rate(),
            "avg_reflections": chain.mean_reflections(),
            "final_eta": chain.final_eta,
            "warnings": chain.warnings,
            "diagnostics": diagnostics,
        });
        io::write_json(path, &value)?;
    }
    if let Some(r) = &diagnostics {
        eprintln!("n {} ess_min {:.1} psrf_max {:.4} t_is {:.2} us", r.n, r.ess_min, r.psrf_max, r.t_is_us);
    }
    Ok(if mixed { Status::Ok } else { Status::Unmixed })
}

fn write_rows(path: &Path, rows: &[polywalk::BenchmarkRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_benchmark(args: BenchmarkArgs) -> Result<Status> {
    let p = load(&args.chain)?;
    let f = args.chain.density.build(&p)?;
    let c = &args.chain;
    let mut spec = BenchmarkSpec::new(args.samplers.clone(), p.dim(), args.n, c.burnin, c.seed);
    if let Some(sweep) = args.sweep {
        spec.sweep = sweep;
    }
    spec.eta0 = c.eta0;
    spec.max_reflections = c.max_reflections;
    spec.adapt = !c.no_adapt;
    let result = run_benchmark(f.as_ref(), &p, &spec)?;

    write_rows(&args.out, &result.rows)?;
    if let Some(path) = &args.json {
        io::write_json(path, &result)?;
    }
    let mut all_mixed = true;
    for best in &result.best {
        match &best.row {
            Some(r) => eprintln!("{}: best w={} t_is {:.2} us", best.sampler, r.w, r.t_is_us.unwrap_or(f64::NAN)),
            None => {
                all_mixed = false;
                eprintln!("{}: {}", best.sampler, best.status);
            }
        }
    }
    Ok(if all_mixed { Status::Ok } else { Status::Unmixed })
}

fn cmd_convert(args: ConvertArgs) -> Result<Status> {
    let model = io::read_equality_model(&args.model)?;
    let e = from_equality_form(&model)?;
    io::write_polytope(&args.out, &e.polytope)?;
    io::write_json(&args.transform, &TransformFile::from_equality(&e))?;
    eprintln!("wrote {} (dim {})", args.out.display(), e.polytope.dim());
    Ok(Status::Ok)
}

fn main() -> ExitCode {
    // usage errors exit 1, leaving 2 for unmixed chains
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Benchmark(a) => cmd_benchmark(a),
        Command::Convert(a) => cmd_convert(a),
    };
    match outcome {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Unmixed) => ExitCode::from(EXIT_UNMIXED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
