//! End-to-end run: star model, L-system stream, fill, validation, artifacts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::gapfill::{
    fill, validate_stream_usage, validate_trace, ConstraintRuleTable, FillError, FillPolicy, FillTrace,
    MismatchHandling, RuleError,
};
use crate::grammar::{
    iteration_for_length, parse_spec, ExpansionStream, GrammarError, LSystemSpec, DEFAULT_LENGTH_LIMIT,
};
use crate::nucleotide::{Base, NucleotideSequence};
use crate::seqcheck::{
    identity_aligned, identity_hamming, internal_stops, scan_stops, IdentityReport, Scoring, SeqCheckError,
    StopCodon,
};
use crate::seqio::{read_sequences, write_sequences, write_star, write_trace, SeqIoError};
use crate::starmodel::{build_star, gap_stats, StarError, StarModel};

pub const STAR_FILE: &str = "star.txt";
pub const FILLED_FILE: &str = "filled.fasta";
pub const TRACE_FILE: &str = "trace.tsv";
pub const REPORT_FILE: &str = "report.txt";
pub const REPORT_JSON_FILE: &str = "report.json";

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub grammar: PathBuf,
    pub fasta: PathBuf,
    pub policy: MismatchHandling,
    pub iterations: Option<usize>,
    pub out_dir: PathBuf,
    /// Replaces the built-in rule table.
    pub rules: Option<PathBuf>,
    pub frame: usize,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Grammar { path: PathBuf, source: GrammarError },
    #[error("{path}: grammar symbol {symbol:?} is not a nucleotide")]
    NonNucleotideGrammar { path: PathBuf, symbol: char },
    #[error("{path}: {source}")]
    Fasta { path: PathBuf, source: SeqIoError },
    #[error("{path}: {source}")]
    Rules { path: PathBuf, source: RuleError },
    #[error(transparent)]
    Star(#[from] StarError),
    #[error(transparent)]
    Expansion(GrammarError),
    #[error(transparent)]
    Fill(FillError),
    #[error(transparent)]
    Check(#[from] SeqCheckError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl PipelineError {
    /// 2 parse, 3 star model, 4 stream, 5 policy failure, 6 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Grammar { .. }
            | PipelineError::NonNucleotideGrammar { .. }
            | PipelineError::Fasta { .. }
            | PipelineError::Rules { .. } => 2,
            PipelineError::Star(_) | PipelineError::Check(_) => 3,
            PipelineError::Expansion(_) => 4,
            PipelineError::Fill(FillError::Mismatch { .. }) => 5,
            PipelineError::Fill(_) => 4,
            PipelineError::Io { .. } => 6,
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), PipelineError> {
    fs::write(path, contents).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_grammar(path: &Path) -> Result<LSystemSpec, PipelineError> {
    parse_spec(&read_file(path)?).map_err(|source| PipelineError::Grammar {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a grammar that is usable as a fill stream.
pub fn load_nucleotide_grammar(path: &Path) -> Result<LSystemSpec, PipelineError> {
    let spec = load_grammar(path)?;
    if let Some(symbol) = spec.alphabet().find(|c| Base::from_char(*c).is_none()) {
        return Err(PipelineError::NonNucleotideGrammar {
            path: path.to_path_buf(),
            symbol,
        });
    }
    Ok(spec)
}

pub fn load_sequences(path: &Path) -> Result<Vec<NucleotideSequence>, PipelineError> {
    read_sequences(&read_file(path)?).map_err(|source| PipelineError::Fasta {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_rules(path: Option<&Path>) -> Result<ConstraintRuleTable, PipelineError> {
    match path {
        None => Ok(ConstraintRuleTable::builtin()),
        Some(p) => read_file(p)?.parse().map_err(|source| PipelineError::Rules {
            path: p.to_path_buf(),
            source,
        }),
    }
}

/// Picks the iteration (override or smallest covering `gaps`) and collects
/// its word.
pub fn stream_for(
    spec: &LSystemSpec,
    gaps: usize,
    iterations: Option<usize>,
) -> Result<(usize, Vec<u8>), GrammarError> {
    let n = match iterations {
        Some(n) => n,
        None => iteration_for_length(spec, gaps.max(1) as u64, DEFAULT_LENGTH_LIMIT)?.0,
    };
    let stream = ExpansionStream::at_iteration(spec, n, DEFAULT_LENGTH_LIMIT)?;
    Ok((n, stream.collect()))
}

#[derive(Debug, Clone, Serialize)]
pub struct InputIdentity {
    pub id: String,
    pub hamming: IdentityReport,
    pub aligned: IdentityReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub sources: usize,
    pub columns: usize,
    pub gap_columns: usize,
    pub gap_runs: BTreeMap<usize, usize>,
    pub iteration: usize,
    pub stream_length: usize,
    pub policy: String,
    pub passes: usize,
    pub fill_events: usize,
    pub symbols_read: usize,
    pub symbols_skipped: usize,
    pub frame: usize,
    pub stop_codons: Vec<StopCodon>,
    pub internal_stop_codons: usize,
    pub identities: Vec<InputIdentity>,
    pub violations: Vec<String>,
}

impl PipelineReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sources\t{}", self.sources);
        let _ = writeln!(out, "columns\t{}", self.columns);
        let _ = writeln!(out, "gap_columns\t{}", self.gap_columns);
        for (len, count) in &self.gap_runs {
            let _ = writeln!(out, "gap_runs_length_{len}\t{count}");
        }
        let _ = writeln!(out, "iteration\t{}", self.iteration);
        let _ = writeln!(out, "stream_length\t{}", self.stream_length);
        let _ = writeln!(out, "policy\t{}", self.policy);
        let _ = writeln!(out, "passes\t{}", self.passes);
        let _ = writeln!(out, "fill_events\t{}", self.fill_events);
        let _ = writeln!(out, "symbols_read\t{}", self.symbols_read);
        let _ = writeln!(out, "symbols_skipped\t{}", self.symbols_skipped);
        let _ = writeln!(out, "frame\t{}", self.frame);
        let stops: Vec<String> = self
            .stop_codons
            .iter()
            .map(|s| format!("{}:{}", s.codon_index, s.codon))
            .collect();
        let _ = writeln!(out, "stop_codons\t{}", if stops.is_empty() { "none".into() } else { stops.join(",") });
        let _ = writeln!(out, "internal_stop_codons\t{}", self.internal_stop_codons);
        for id in &self.identities {
            let _ = writeln!(out, "identity_hamming\t{}\t{}", id.id, id.hamming);
            let _ = writeln!(out, "identity_aligned\t{}\t{}", id.id, id.aligned);
        }
        let _ = writeln!(out, "violations\t{}", self.violations.len());
        for v in &self.violations {
            let _ = writeln!(out, "violation\t{v}");
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub star: StarModel,
    pub filled: NucleotideSequence,
    pub trace: FillTrace,
    pub report: PipelineReport,
}

/// Runs every stage in memory without touching the filesystem.
pub fn run_in_memory(
    spec: &LSystemSpec,
    inputs: &[NucleotideSequence],
    table: &ConstraintRuleTable,
    policy: &FillPolicy,
    iterations: Option<usize>,
    frame: usize,
) -> Result<PipelineOutput, PipelineError> {
    let star = build_star(inputs)?;
    let stats = gap_stats(&star);
    let (iteration, stream) =
        stream_for(spec, stats.total_gap_columns, iterations).map_err(PipelineError::Expansion)?;
    let (filled, trace) = fill(&star, stream.iter().copied(), table, policy).map_err(PipelineError::Fill)?;
    let filled = filled.with_id(format!(
        "filled n={} iteration={} policy={}",
        star.source_count(),
        iteration,
        policy.mismatch()
    ));

    let mut violations: Vec<String> = validate_trace(&star, &trace, &filled, table)
        .iter()
        .map(|v| v.to_string())
        .collect();
    violations.extend(
        validate_stream_usage(&trace, &stream, policy)
            .iter()
            .map(|v| v.to_string()),
    );

    let stop_codons = scan_stops(&filled, frame)?;
    let internal = internal_stops(&filled, frame)?.len();
    let scoring = Scoring::default();
    let identities = inputs
        .iter()
        .map(|seq| {
            Ok(InputIdentity {
                id: seq.id().to_string(),
                hamming: identity_hamming(&filled, seq)?,
                aligned: identity_aligned(&filled, seq, &scoring),
            })
        })
        .collect::<Result<Vec<_>, SeqCheckError>>()?;

    let report = PipelineReport {
        sources: star.source_count(),
        columns: star.len(),
        gap_columns: stats.total_gap_columns,
        gap_runs: stats.histogram,
        iteration,
        stream_length: stream.len(),
        policy: policy.mismatch().to_string(),
        passes: trace.passes(),
        fill_events: trace.len(),
        symbols_read: trace.symbols_read(),
        symbols_skipped: trace.total_skipped(),
        frame,
        stop_codons,
        internal_stop_codons: internal,
        identities,
        violations,
    };
    Ok(PipelineOutput {
        star,
        filled,
        trace,
        report,
    })
}

/// Reads the configured inputs, runs the pipeline and writes all artifacts.
pub fn run(config: &PipelineConfig) -> Result<PipelineOutput, PipelineError> {
    let spec = load_nucleotide_grammar(&config.grammar)?;
    let inputs = load_sequences(&config.fasta)?;
    let table = load_rules(config.rules.as_deref())?;
    let policy = FillPolicy::new(config.policy);
    let output = run_in_memory(&spec, &inputs, &table, &policy, config.iterations, config.frame)?;

    fs::create_dir_all(&config.out_dir).map_err(|source| PipelineError::Io {
        path: config.out_dir.clone(),
        source,
    })?;
    let out = |name: &str| config.out_dir.join(name);
    write_file(&out(STAR_FILE), &write_star(&output.star))?;
    let fasta = write_sequences(std::slice::from_ref(&output.filled)).expect("one record");
    write_file(&out(FILLED_FILE), &fasta)?;
    write_file(&out(TRACE_FILE), &write_trace(&output.trace))?;
    write_file(&out(REPORT_FILE), &output.report.to_text())?;
    let mut json = serde_json::to_string_pretty(&output.report).expect("report serializes");
    json.push('\n');
    write_file(&out(REPORT_JSON_FILE), &json)?;
    Ok(output)
}
