use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use concat_astar::analysis::{curves_csv, parse_source, predicted_curves};
use concat_astar::astar::{astar_decode, Constraint, DecoderConfig, StackPolicy, Stopping};
use concat_astar::channel::{parse_samples, ChannelParams};
use concat_astar::codes::{GeneratorMatrix, InnerCodeKind, Scheme};
use concat_astar::mrip::{mrip_error_stats, FrameBuilder, FrameKind};
use concat_astar::sim::{
    parse_campaign, results_csv, results_json_lines, run_campaign_with_progress, with_workers,
    ResultRecord, SCHEMA_VERSION,
};
use concat_astar::siso::SisoDecoder;

/// A* decoding experiments for short concatenated block codes.
#[derive(Parser, Debug)]
#[command(name = "concat-astar", version)]
struct Cli {
    /// Maximum number of worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every entry of a campaign file; writes <out>.jsonl and <out>.csv.
    Simulate {
        /// Campaign description (TOML).
        campaign: PathBuf,
        /// Output path prefix.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Ordered-LLR mean curves (model and Monte Carlo) as CSV.
    AnalyzeLlr {
        /// `uncoded`, an inner code name, or `all`.
        #[arg(long, default_value = "all")]
        kind: String,
        #[arg(long, allow_negative_numbers = true)]
        es_n0: f64,
        /// Code bits per trial.
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write to a file instead of standard output.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Histogram and CCDF of hard-decision errors among the MRIP bits.
    MripStats {
        #[arg(long)]
        scheme: Scheme,
        #[arg(long, default_value = "conventional")]
        frame: FrameKind,
        #[arg(long, allow_negative_numbers = true)]
        ebn0: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Decode one received vector and print the search trace as JSON.
    DecodeOne(DecodeOneArgs),
    /// Print a scheme's generator matrix in hex text form.
    ExportGenerator {
        #[arg(long)]
        scheme: Scheme,
    },
}

#[derive(Args, Debug)]
struct DecodeOneArgs {
    /// Received samples: reals separated by whitespace or commas.
    input: PathBuf,
    /// Named scheme; exclusive with --generator.
    #[arg(long, conflicts_with = "generator")]
    scheme: Option<Scheme>,
    /// Generator matrix file in hex text form.
    #[arg(long)]
    generator: Option<PathBuf>,
    #[arg(long, default_value = "conventional")]
    frame: FrameKind,
    /// Eb/N0 used for the inner SISO decoder of an improved frame.
    #[arg(long, allow_negative_numbers = true)]
    ebn0: Option<f64>,
    #[arg(long, default_value = "none")]
    constraint: Constraint,
    #[arg(long, default_value_t = 0)]
    lambda: usize,
    #[arg(long, default_value = "ordered")]
    stack: StackPolicy,
    #[arg(long)]
    stack_capacity: Option<usize>,
    /// Codeword-threshold stopping with this minimum distance.
    #[arg(long, conflicts_with = "alpha")]
    d_min: Option<usize>,
    /// Alpha-threshold stopping.
    #[arg(long)]
    alpha: Option<f64>,
    /// Record every goal node.
    #[arg(long)]
    trace_goals: bool,
}

fn main() {
    let cli = Cli::parse();
    let workers = cli.workers;
    let outcome = with_workers(workers, move || run(cli.command))
        .map_err(anyhow::Error::from)
        .and_then(|r| r);
    if let Err(e) = outcome {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate { campaign, out } => simulate(&campaign, &out),
        Command::AnalyzeLlr {
            kind,
            es_n0,
            n,
            trials,
            seed,
            out,
        } => {
            let kinds = if kind == "all" {
                std::iter::once(None)
                    .chain(InnerCodeKind::ALL.into_iter().map(Some))
                    .collect()
            } else {
                vec![parse_source(&kind)?]
            };
            if trials == 0 {
                bail!("--trials must be at least 1");
            }
            let curves = predicted_curves(&kinds, es_n0, n, trials, seed)?;
            emit(out.as_deref(), &curves_csv(&curves, es_n0))
        }
        Command::MripStats {
            scheme,
            frame,
            ebn0,
            trials,
            seed,
            out,
        } => {
            if trials == 0 {
                bail!("--trials must be at least 1");
            }
            let stats = mrip_error_stats(&scheme, frame, ebn0, trials, seed)?;
            let mut text = format!("# schema_version: {SCHEMA_VERSION}\n");
            text.push_str("scheme,frame,ebn0_db,trials,j,count,probability,ccdf\n");
            for (j, count) in stats.histogram.iter().enumerate() {
                text.push_str(&format!(
                    "{scheme},{frame},{ebn0},{},{j},{count},{:e},{:e}\n",
                    stats.trials,
                    stats.probability(j),
                    stats.ccdf(j)
                ));
            }
            emit(out.as_deref(), &text)
        }
        Command::DecodeOne(args) => decode_one(args),
        Command::ExportGenerator { scheme } => {
            print!("{}", scheme.generator()?.to_hex_text());
            Ok(())
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn simulate(campaign: &Path, out: &Path) -> Result<()> {
    let text = fs::read_to_string(campaign)
        .with_context(|| format!("reading {}", campaign.display()))?;
    let configs =
        parse_campaign(&text).with_context(|| format!("in {}", campaign.display()))?;
    let mut records = Vec::new();
    for (i, config) in configs.iter().enumerate() {
        eprintln!("[{}/{}] {}", i + 1, configs.len(), config.name);
        let stats = run_campaign_with_progress(config, |point, s| {
            eprint!(
                "\r  {} dB: {} trials, {} errors   ",
                config.ebn0_points[point], s.trials, s.block_errors
            );
        })?;
        eprintln!();
        records.extend(ResultRecord::from_stats(&stats));
    }
    let jsonl = out.with_extension("jsonl");
    let csv = out.with_extension("csv");
    fs::write(&jsonl, results_json_lines(&records))
        .with_context(|| format!("writing {}", jsonl.display()))?;
    fs::write(&csv, results_csv(&records)).with_context(|| format!("writing {}", csv.display()))?;
    Ok(())
}

fn decode_one(args: DecodeOneArgs) -> Result<()> {
    let (g, inner) = match (&args.scheme, &args.generator) {
        (Some(s), None) => (s.generator()?, s.inner()),
        (None, Some(path)) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let g = GeneratorMatrix::from_hex_text(&text)
                .with_context(|| format!("in {}", path.display()))?;
            (g, None)
        }
        _ => bail!("give exactly one of --scheme or --generator"),
    };
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let r = parse_samples(&text).with_context(|| format!("in {}", args.input.display()))?;
    if r.len() != g.n() {
        bail!("{} samples for a length-{} code", r.len(), g.n());
    }
    let reliability = match args.frame {
        FrameKind::Conventional => r.clone(),
        FrameKind::Improved => {
            let Some(inner) = inner else {
                bail!("an improved frame needs a scheme with an inner code");
            };
            let Some(ebn0) = args.ebn0 else {
                bail!("an improved frame needs --ebn0 for the SISO decoder");
            };
            let params = ChannelParams::from_ebn0(ebn0, g.k() as f64 / g.n() as f64, 0)?;
            SisoDecoder::new(Some(inner)).llr(&r, params.sigma_sq)?
        }
    };
    let stopping = match (args.d_min, args.alpha) {
        (Some(d_min), None) => Stopping::CodewordThreshold { d_min },
        (None, Some(alpha)) => Stopping::AlphaThreshold { alpha },
        _ => Stopping::None,
    };
    let config = DecoderConfig {
        lambda: args.lambda,
        constraint: args.constraint,
        stack_policy: args.stack,
        stack_capacity: args.stack_capacity.unwrap_or(usize::MAX),
        stopping,
        pruning: true,
        trace: args.trace_goals,
    };
    let frame = FrameBuilder::new(g.clone()).build(&reliability, &r)?;
    let result = astar_decode(&frame, &config)?;
    println!("{}", serde_json::to_string_pretty(&result.trace(g.n()))?);
    Ok(())
}
