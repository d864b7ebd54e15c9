use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qtopt::codec::{encode_jpeg, reconstruct, EncodeOptions, Subsampling};
use qtopt::harness::config::AlgorithmId;
use qtopt::harness::correlate::{correlate, read_energy_csv};
use qtopt::harness::pnm::read_pnm;
use qtopt::harness::report::{pareto_report, read_summary, stats};
use qtopt::harness::{run_experiment, write_atomic, write_csv, write_json, ExperimentConfig};
use qtopt::metrics::pf_selected_index;
use qtopt::objectives::{psnr, ImageProblem, ObjectiveOptions, ObjectivePoint, PsnrMode, SizeBasis, Weights};
use qtopt::pareto::{run_pareto, ParetoConfig};
use qtopt::qtable::{annex_k_baseline, decode, quality_scale, Genotype};
use qtopt::scalar::{run_scalar, RunBudget, ScalarConfig};
use qtopt::{Error, Result};

/// Search JPEG quantization tables for smaller files at higher PSNR.
#[derive(Parser)]
#[command(name = "qtopt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a PPM/PGM with the standard tables, optionally quality-scaled.
    Compress {
        input: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=100))]
        quality: Option<u32>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "444")]
        subsampling: Subsampling,
    },
    /// Run one algorithm on one image.
    Optimize(OptimizeArgs),
    /// Run a full experiment from a JSON config.
    Experiment {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        pop: Option<usize>,
        #[arg(long)]
        nfe: Option<usize>,
    },
    /// Hypervolume, merged fronts and selected solutions of an experiment's Pareto runs.
    ParetoReport {
        dir: PathBuf,
        /// Override the shared reference point, as `f1,f2`.
        #[arg(long, value_parser = parse_point)]
        reference: Option<ObjectivePoint>,
        /// Where to write CSVs; the experiment directory when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rank table and Wilcoxon tests from a summary CSV.
    Stats {
        summary: PathBuf,
        #[arg(long, default_value = "baseline")]
        reference: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Write the test results as CSV.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Pearson correlations from a level,ec,size,psnr CSV.
    Correlate {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OptimizeArgs {
    image: PathBuf,
    /// EnMOGA, EnMODE, EnMOPSO, EnMOES, EnMOPS, EnNSGAII or EnNSGAIII.
    #[arg(long)]
    alg: AlgorithmId,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    pop: usize,
    #[arg(long, default_value_t = 1000)]
    nfe: usize,
    #[arg(long, default_value_t = 1.0)]
    w1: f64,
    #[arg(long, default_value_t = 1.0)]
    w2: f64,
    #[arg(long, default_value = "444")]
    subsampling: Subsampling,
    #[arg(long, value_enum, default_value = "rgb")]
    psnr_mode: PsnrArg,
    #[arg(long, value_enum, default_value = "raw")]
    fs_basis: BasisArg,
    /// Convergence trace (scalar) or hypervolume trace (Pareto) CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// JSON with the best (or selected) tables.
    #[arg(long)]
    tables: Option<PathBuf>,
    /// JPEG encoded with the best (or selected) tables.
    #[arg(long)]
    jpeg: Option<PathBuf>,
    /// Final front CSV (Pareto only).
    #[arg(long)]
    front: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum PsnrArg {
    Rgb,
    Luma,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum BasisArg {
    Raw,
    SourceFile,
}

fn parse_point(s: &str) -> std::result::Result<ObjectivePoint, String> {
    let (a, b) = s.split_once(',').ok_or("expected f1,f2")?;
    let f = |t: &str| t.trim().parse::<f64>().map_err(|e| e.to_string());
    Ok(ObjectivePoint::new(f(a)?, f(b)?))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Compress {
            input,
            quality,
            output,
            subsampling,
        } => compress(&input, quality, output.as_deref(), subsampling),
        Command::Optimize(a) => optimize(&a),
        Command::Experiment {
            config,
            output_dir,
            runs,
            seed,
            workers,
            pop,
            nfe,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(d) = output_dir {
                cfg.output_dir = d;
            }
            if let Some(r) = runs {
                cfg.runs = r;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if workers.is_some() {
                cfg.workers = workers;
            }
            if let Some(p) = pop {
                cfg.budget.pop_size = p;
            }
            if let Some(n) = nfe {
                cfg.budget.nfe_max = n;
            }
            let s = run_experiment(&cfg)?;
            let text = std::fs::read_to_string(s.output_dir.join("ranks.txt"))
                .map_err(|e| Error::Invariant(format!("ranks.txt missing: {e}")))?;
            print!("{text}");
            println!("\n{} runs written to {}", s.runs.len(), s.output_dir.display());
            Ok(())
        }
        Command::ParetoReport {
            dir,
            reference,
            output,
        } => {
            let r = pareto_report(&dir, reference)?;
            let out = output.unwrap_or_else(|| dir.clone());
            r.write(&out)?;
            print!("{}", r.to_text()?);
            Ok(())
        }
        Command::Stats {
            summary,
            reference,
            alpha,
            output,
        } => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::InvalidArgument(format!("alpha {alpha} outside (0, 1)")));
            }
            let rows = read_summary(&summary)?;
            let s = stats(&rows, &reference, alpha)?;
            print!("{}", s.to_text());
            if let Some(o) = output {
                write_csv(&o, &s.tests)?;
            }
            Ok(())
        }
        Command::Correlate { input, output } => {
            let r = correlate(&read_energy_csv(&input)?)?;
            print!("{}", r.to_text());
            if let Some(o) = output {
                write_csv(&o, &r.entries)?;
            }
            Ok(())
        }
    }
}

fn compress(input: &Path, quality: Option<u32>, output: Option<&Path>, subsampling: Subsampling) -> Result<()> {
    let img = read_pnm(input)?;
    let tables = match quality {
        Some(q) => quality_scale(&annex_k_baseline(), q)?,
        None => annex_k_baseline(),
    };
    let opts = EncodeOptions { subsampling };
    let stream = encode_jpeg(&img, &tables, opts)?;
    let rec = reconstruct(&img, &tables, opts)?;
    let p = psnr(&img, &rec)?;
    if let Some(o) = output {
        write_atomic(o, stream.bytes())?;
    }
    println!(
        "size {} bytes  ratio {:.6}  psnr {:.4} dB",
        stream.size_bytes(),
        stream.size_bytes() as f64 / img.raw_len() as f64,
        p
    );
    Ok(())
}

fn optimize(a: &OptimizeArgs) -> Result<()> {
    let img = read_pnm(&a.image)?;
    let weights = Weights::new(a.w1, a.w2)?;
    let size_basis = match a.fs_basis {
        BasisArg::Raw => SizeBasis::Raw,
        BasisArg::SourceFile => SizeBasis::SourceFile(
            std::fs::metadata(&a.image)
                .map_err(|e| Error::Config(format!("{}: {e}", a.image.display())))?
                .len(),
        ),
    };
    let options = ObjectiveOptions {
        encode: EncodeOptions {
            subsampling: a.subsampling,
        },
        size_basis,
        psnr_mode: match a.psnr_mode {
            PsnrArg::Rgb => PsnrMode::Rgb,
            PsnrArg::Luma => PsnrMode::Luma,
        },
    };
    let problem = ImageProblem::new(img, weights, options);
    let budget = RunBudget {
        pop_size: a.pop,
        nfe_max: a.nfe,
        seed: a.seed,
    };
    let base = problem.evaluate_tables(&annex_k_baseline())?;
    println!(
        "baseline  scalar {:.8}  fs {:.8}  psnr {:.6}",
        base.scalar_value, base.fs_ratio, base.psnr_db
    );
    let best: Genotype = match a.alg {
        AlgorithmId::Baseline => Genotype::from_tables(&annex_k_baseline()),
        AlgorithmId::Scalar(alg) => {
            budget.validate(alg)?;
            let r = run_scalar(alg, &problem, &budget, &ScalarConfig::default())?;
            println!(
                "{alg}  scalar {:.8}  fs {:.8}  psnr {:.6}  nfe {}",
                r.record.scalar_value, r.record.fs_ratio, r.record.psnr_db, r.nfe
            );
            if let Some(t) = &a.trace {
                write_csv(t, &r.trace)?;
            }
            r.best
        }
        AlgorithmId::Pareto(alg) => {
            let r = run_pareto(alg, &problem, &budget, &ParetoConfig::default())?;
            let i = pf_selected_index(&r.front.points(), &weights)?;
            let sel = &r.front.members[i];
            println!(
                "{alg}  front {}  hv {:.8} -> {:.8}  nfe {}",
                r.front.len(),
                r.initial_hv(),
                r.final_hv(),
                r.nfe
            );
            println!(
                "selected  scalar {:.8}  fs {:.8}  psnr {:.6}",
                sel.record.scalar_value, sel.record.fs_ratio, sel.record.psnr_db
            );
            if let Some(t) = &a.trace {
                write_csv(t, &r.hv_trace)?;
            }
            if let Some(f) = &a.front {
                let rows: Vec<_> = r.front.members.iter().map(|m| m.record).collect();
                write_csv(f, &rows)?;
            }
            sel.genotype.clone()
        }
    };
    let tables = decode(&best);
    if let Some(t) = &a.tables {
        write_json(t, &tables)?;
    }
    if let Some(j) = &a.jpeg {
        write_atomic(j, problem.encode(&best)?.bytes())?;
    }
    Ok(())
}
