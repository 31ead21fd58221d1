use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lstar::gapfill::{fill, validate_trace, FillPolicy, MismatchHandling};
use lstar::grammar::{expand, GrammarError};
use lstar::pipeline::{
    self, load_grammar, load_nucleotide_grammar, load_rules, load_sequences, read_file, stream_for, write_file,
    PipelineConfig, PipelineError, FILLED_FILE, TRACE_FILE,
};
use lstar::seqcheck::{identity_aligned, identity_hamming, internal_stops, scan_stops, translate, Scoring};
use lstar::seqio::{read_star, read_trace, write_sequences, write_star, FastaRecord};
use lstar::starmodel::{build_star, gap_stats};

#[derive(Parser)]
#[command(name = "lstar", version, about = "L-system gap filling for star-model consensus genes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a grammar N iterations and write the word as FASTA.
    Expand {
        #[arg(long)]
        grammar: PathBuf,
        #[arg(long)]
        iterations: usize,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the star model of aligned, equal-length sequences.
    Star {
        #[arg(long)]
        fasta: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fill a star model's gaps from a grammar's stream.
    Fill {
        #[arg(long)]
        star: PathBuf,
        #[arg(long)]
        grammar: PathBuf,
        #[command(flatten)]
        fill: FillArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Scan stop codons and translate; optionally validate a fill trace.
    Check {
        #[arg(long)]
        fasta: PathBuf,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
        frame: u8,
        #[arg(long, requires = "trace")]
        star: Option<PathBuf>,
        #[arg(long, requires = "star")]
        trace: Option<PathBuf>,
        #[arg(long)]
        rules: Option<PathBuf>,
    },
    /// Pairwise identity of all sequences in a FASTA file.
    Identity {
        #[arg(long)]
        fasta: PathBuf,
        #[arg(long = "match", default_value_t = 1, allow_negative_numbers = true)]
        match_score: i32,
        #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
        mismatch: i32,
        #[arg(long, default_value_t = -2, allow_negative_numbers = true)]
        gap: i32,
    },
    /// Star model, fill, validation and reports in one run.
    Pipeline {
        #[arg(long)]
        grammar: PathBuf,
        #[arg(long)]
        fasta: PathBuf,
        #[command(flatten)]
        fill: FillArgs,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
        frame: u8,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct FillArgs {
    /// skip | substitute | fail
    #[arg(long, default_value = "skip")]
    policy: MismatchHandling,
    /// Iteration to stream instead of the smallest one covering all gaps.
    #[arg(long)]
    iterations: Option<usize>,
    /// Rule table replacing the built-in one.
    #[arg(long)]
    rules: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_file(path, text).map_err(Failure::from),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure {
            code: 6,
            message: e.to_string(),
        }),
    }
}

fn run_expand(grammar: &Path, iterations: usize, out: Option<&Path>) -> Result<(), Failure> {
    let spec = load_grammar(grammar)?;
    let word = expand(&spec, iterations).map_err(|e| Failure {
        code: if matches!(e, GrammarError::LengthGuard { .. }) { 3 } else { 2 },
        message: e.to_string(),
    })?;
    let record = FastaRecord {
        header: format!("lsystem iteration={iterations} length={}", word.len()),
        bases: word,
    };
    let text = lstar::seqio::write_fasta(&[record]).expect("one record");
    emit(out, &text)
}

fn run_star(fasta: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let seqs = load_sequences(fasta)?;
    let model = build_star(&seqs).map_err(PipelineError::from)?;
    emit(out, &write_star(&model))?;
    if out.is_some() {
        print!("{}", gap_stats(&model));
    } else {
        eprint!("{}", gap_stats(&model));
    }
    Ok(())
}

fn run_fill(star: &Path, grammar: &Path, args: &FillArgs, out: &Path) -> Result<(), Failure> {
    let model = read_star(&read_file(star)?).map_err(|source| PipelineError::Fasta {
        path: star.to_path_buf(),
        source,
    })?;
    let spec = load_nucleotide_grammar(grammar)?;
    let table = load_rules(args.rules.as_deref())?;
    let policy = FillPolicy::new(args.policy);
    let (iteration, stream) =
        stream_for(&spec, model.gap_count(), args.iterations).map_err(PipelineError::Expansion)?;
    let (seq, trace) = fill(&model, stream.iter().copied(), &table, &policy).map_err(PipelineError::Fill)?;
    let seq = seq.with_id(format!("filled iteration={iteration} policy={}", args.policy));

    std::fs::create_dir_all(out).map_err(|source| PipelineError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    write_file(&out.join(FILLED_FILE), &write_sequences(&[seq]).expect("one record"))?;
    write_file(&out.join(TRACE_FILE), &lstar::seqio::write_trace(&trace))?;
    println!(
        "iteration {iteration}: filled {} columns in {} passes, read {} of {} stream symbols",
        trace.len(),
        trace.passes(),
        trace.symbols_read(),
        stream.len()
    );
    Ok(())
}

fn run_check(
    fasta: &Path,
    frame: usize,
    star: Option<&Path>,
    trace: Option<&Path>,
    rules: Option<&Path>,
) -> Result<bool, Failure> {
    let seqs = load_sequences(fasta)?;
    for seq in &seqs {
        let stops = scan_stops(seq, frame).map_err(PipelineError::from)?;
        let internal = internal_stops(seq, frame).map_err(PipelineError::from)?;
        let protein = translate(seq, frame).map_err(PipelineError::from)?;
        let listed: Vec<String> = stops.iter().map(|s| format!("{}:{}", s.codon_index, s.codon)).collect();
        println!("{}\tlength\t{}", seq.id(), seq.len());
        println!("{}\tframe\t{frame}", seq.id());
        println!(
            "{}\tstops\t{}",
            seq.id(),
            if listed.is_empty() { "none".to_string() } else { listed.join(",") }
        );
        println!("{}\tinternal_stops\t{}", seq.id(), internal.len());
        println!("{}\ttranslation\t{protein}", seq.id());
    }

    let (Some(star), Some(trace)) = (star, trace) else {
        return Ok(true);
    };
    let model = read_star(&read_file(star)?).map_err(|source| PipelineError::Fasta {
        path: star.to_path_buf(),
        source,
    })?;
    let trace = read_trace(&read_file(trace)?).map_err(|source| PipelineError::Fasta {
        path: trace.to_path_buf(),
        source,
    })?;
    let table = load_rules(rules)?;
    let mut clean = true;
    for seq in &seqs {
        let violations = validate_trace(&model, &trace, seq, &table);
        println!("{}\tviolations\t{}", seq.id(), violations.len());
        for v in &violations {
            println!("{}\tviolation\t{v}", seq.id());
        }
        clean &= violations.is_empty();
    }
    Ok(clean)
}

fn run_identity(fasta: &Path, scoring: Scoring) -> Result<(), Failure> {
    let seqs = load_sequences(fasta)?;
    for (i, a) in seqs.iter().enumerate() {
        for b in &seqs[i + 1..] {
            let hamming = match identity_hamming(a, b) {
                Ok(r) => r.to_string(),
                Err(_) => "n/a".to_string(),
            };
            let aligned = identity_aligned(a, b, &scoring);
            println!("{}\t{}\thamming\t{hamming}\taligned\t{aligned}", a.id(), b.id());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Expand {
            grammar,
            iterations,
            out,
        } => run_expand(&grammar, iterations, out.as_deref()).map(|_| 0),
        Command::Star { fasta, out } => run_star(&fasta, out.as_deref()).map(|_| 0),
        Command::Fill {
            star,
            grammar,
            fill,
            out,
        } => run_fill(&star, &grammar, &fill, &out).map(|_| 0),
        Command::Check {
            fasta,
            frame,
            star,
            trace,
            rules,
        } => run_check(&fasta, frame as usize, star.as_deref(), trace.as_deref(), rules.as_deref())
            .map(|clean| if clean { 0 } else { 1 }),
        Command::Identity {
            fasta,
            match_score,
            mismatch,
            gap,
        } => run_identity(
            &fasta,
            Scoring {
                match_score,
                mismatch,
                gap,
            },
        )
        .map(|_| 0),
        Command::Pipeline {
            grammar,
            fasta,
            fill,
            frame,
            out,
        } => {
            let config = PipelineConfig {
                grammar,
                fasta,
                policy: fill.policy,
                iterations: fill.iterations,
                out_dir: out,
                rules: fill.rules,
                frame: frame as usize,
            };
            let output = pipeline::run(&config)?;
            print!("{}", output.report.to_text());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
