use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use g2skein::classifier::DeltaMode;
use g2skein::diagram::{CrossingId, SkeinDiagram};
use g2skein::engine::{run_pipeline, run_pipeline_traced, Error, PipelineOptions};
use g2skein::oracle::{self, CheckKind};
use g2skein::trace::JsonLines;

#[derive(Parser)]
#[command(name = "g2skein", version, about = "Evaluate framed links in the genus-2 handlebody")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Delta {
    Standard,
    Paper,
    Symbolic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Confluence,
    Invariance,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a diagram file is well formed.
    Validate { file: PathBuf },
    /// Evaluate a diagram to a polynomial in x, y, z.
    Resolve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "standard")]
        delta: Delta,
        /// Replace recognized auxiliary curves by their known expansions.
        #[arg(long)]
        aux_substitute: bool,
        /// Crossing ids to resolve first, comma separated.
        #[arg(long, value_delimiter = ',')]
        order: Vec<u32>,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        threads: Option<usize>,
        /// Write one JSON record per algorithm step to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        output: Output,
    },
    /// Run randomized consistency checks.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        max_crossings: usize,
        #[arg(long, value_enum, default_value = "all")]
        check: Check,
        /// Directory for reproduction files of failures.
        #[arg(long, default_value = "fuzz-failures")]
        out: PathBuf,
    },
    /// Time the pipeline on a random diagram.
    Bench {
        #[arg(long)]
        crossings: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn read_diagram(path: &PathBuf) -> Result<SkeinDiagram, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    SkeinDiagram::parse(&oracle::strip_header(&text)).map_err(|e| e.to_string())
}

fn fail(msg: impl std::fmt::Display, code: u8) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { file } => match read_diagram(&file) {
            Ok(d) => {
                println!("valid: {} components, {} crossings", d.components.len(), d.crossing_count());
                ExitCode::SUCCESS
            }
            Err(e) => fail(e, 1),
        },
        Command::Resolve { file, delta, aux_substitute, order, max_steps, threads, trace, output } => {
            let d = match read_diagram(&file) {
                Ok(d) => d,
                Err(e) => return fail(e, 1),
            };
            let opts = PipelineOptions {
                delta: match delta {
                    Delta::Standard => DeltaMode::Standard,
                    Delta::Paper => DeltaMode::Paper,
                    Delta::Symbolic => DeltaMode::Symbolic,
                },
                aux_substitute,
                order: order.into_iter().map(CrossingId).collect(),
                max_steps,
                threads,
                ..Default::default()
            };
            let result = match &trace {
                None => run_pipeline(&d, &opts),
                Some(path) => {
                    let file = match File::create(path) {
                        Ok(f) => f,
                        Err(e) => return fail(format!("{}: {e}", path.display()), 1),
                    };
                    let sink = JsonLines::new(BufWriter::new(file));
                    let r = run_pipeline_traced(&d, &opts, Some(&sink));
                    if let Err(e) = sink.finish() {
                        return fail(format!("{}: {e}", path.display()), 1);
                    }
                    r
                }
            };
            match result {
                Ok(out) => {
                    match output {
                        Output::Text => println!("{}", out.polynomial),
                        Output::Json => println!("{}", out.polynomial.to_json()),
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e, exit_code(&e)),
            }
        }
        Command::Fuzz { seed, count, max_crossings, check, out } => {
            let kind = match check {
                Check::Confluence => CheckKind::Confluence,
                Check::Invariance => CheckKind::Invariance,
                Check::All => CheckKind::All,
            };
            let report = oracle::fuzz(seed, count, max_crossings, kind);
            for c in &report.failures {
                eprintln!("{c}");
                match c.write_reproduction(&out) {
                    Ok(path) => eprintln!("  reproduction: {}", path.display()),
                    Err(e) => eprintln!("  could not write reproduction: {e}"),
                }
            }
            println!("{} diagrams checked, {} failures", report.diagrams, report.failures.len());
            if report.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Command::Bench { crossings, seed, threads } => {
            let d = oracle::random_diagram_exact(seed, 2, crossings);
            let start = Instant::now();
            match run_pipeline(&d, &PipelineOptions { threads, ..Default::default() }) {
                Ok(out) => {
                    let s = out.stats;
                    println!("crossings: {crossings}");
                    println!("terms generated: {}", s.resolved_terms);
                    println!("terms after merge: {}", s.deduplicated_terms);
                    println!("terms after sorting: {}", s.sorted_terms);
                    println!("dedup ratio: {:.3}", s.dedup_ratio());
                    println!("wall time: {:.3} s", start.elapsed().as_secs_f64());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e, exit_code(&e)),
            }
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    e.exit_code() as u8
}
