//! Text formats: FASTA, star-model files and fill-trace TSV.

use std::fmt::Write as _;

use thiserror::Error;

use crate::gapfill::{Context, FillEvent, FillTrace};
use crate::nucleotide::{Base, BaseSet, NucleotideSequence};
use crate::starmodel::{StarError, StarModel, GAP_CHAR};

/// Sequence lines are wrapped at this many characters.
pub const LINE_WIDTH: usize = 60;

pub const TRACE_HEADER: &str =
    "pass\trun_start\tcolumn\tprev2\tprev1\tnext1\tnext2\trule_id\tallowed\tstream_index\tskipped\tchosen";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqIoError {
    #[error("no FASTA records")]
    NoRecords,
    #[error("line {line}: sequence data before the first header")]
    DataBeforeHeader { line: usize },
    #[error("line {line}: empty header")]
    EmptyHeader { line: usize },
    #[error("record `{record}` has no sequence")]
    EmptySequence { record: String },
    #[error("record `{record}`: invalid character {ch:?} at position {position}")]
    InvalidBase {
        record: String,
        ch: char,
        position: usize,
    },
    #[error("star model: {0}")]
    StarHeader(String),
    #[error(transparent)]
    Star(#[from] StarError),
    #[error("trace line {line}: {message}")]
    Trace { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRecord {
    pub header: String,
    /// Uppercase A/C/G/T.
    pub bases: String,
}

impl FastaRecord {
    pub fn to_sequence(&self) -> NucleotideSequence {
        NucleotideSequence::parse(self.header.clone(), &self.bases)
            .expect("records are validated on construction")
    }
}

impl From<&NucleotideSequence> for FastaRecord {
    fn from(seq: &NucleotideSequence) -> Self {
        FastaRecord {
            header: seq.id().to_string(),
            bases: seq.to_string(),
        }
    }
}

pub fn read_fasta(text: &str) -> Result<Vec<FastaRecord>, SeqIoError> {
    let mut records: Vec<FastaRecord> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if let Some(header) = line.strip_prefix('>') {
            if let Some(prev) = records.last() {
                if prev.bases.is_empty() {
                    return Err(SeqIoError::EmptySequence {
                        record: prev.header.clone(),
                    });
                }
            }
            let header = header.trim();
            if header.is_empty() {
                return Err(SeqIoError::EmptyHeader { line: line_no });
            }
            records.push(FastaRecord {
                header: header.to_string(),
                bases: String::new(),
            });
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let record = records
            .last_mut()
            .ok_or(SeqIoError::DataBeforeHeader { line: line_no })?;
        for ch in line.chars().filter(|c| !c.is_whitespace()) {
            match Base::from_char(ch) {
                Some(b) => record.bases.push(b.as_char()),
                None => {
                    return Err(SeqIoError::InvalidBase {
                        record: record.header.clone(),
                        ch,
                        position: record.bases.len() + 1,
                    })
                }
            }
        }
    }
    match records.last() {
        None => Err(SeqIoError::NoRecords),
        Some(last) if last.bases.is_empty() => Err(SeqIoError::EmptySequence {
            record: last.header.clone(),
        }),
        Some(_) => Ok(records),
    }
}

pub fn read_sequences(text: &str) -> Result<Vec<NucleotideSequence>, SeqIoError> {
    Ok(read_fasta(text)?.iter().map(FastaRecord::to_sequence).collect())
}

fn push_wrapped(out: &mut String, body: &str) {
    let bytes = body.as_bytes();
    for chunk in bytes.chunks(LINE_WIDTH) {
        out.push_str(std::str::from_utf8(chunk).expect("ascii"));
        out.push('\n');
    }
}

pub fn write_fasta(records: &[FastaRecord]) -> Result<String, SeqIoError> {
    if records.is_empty() {
        return Err(SeqIoError::NoRecords);
    }
    let mut out = String::new();
    for r in records {
        out.push('>');
        out.push_str(&r.header);
        out.push('\n');
        push_wrapped(&mut out, &r.bases);
    }
    Ok(out)
}

pub fn write_sequences(seqs: &[NucleotideSequence]) -> Result<String, SeqIoError> {
    let records: Vec<FastaRecord> = seqs.iter().map(FastaRecord::from).collect();
    write_fasta(&records)
}

/// `>star n=<sources>` followed by the wrapped columns, `-` for gaps.
pub fn write_star(model: &StarModel) -> String {
    let mut out = format!(">star n={}\n", model.source_count());
    push_wrapped(&mut out, &model.columns_string());
    out
}

pub fn read_star(text: &str) -> Result<StarModel, SeqIoError> {
    let mut lines = text.lines().map(str::trim_end).filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| SeqIoError::StarHeader("empty file".into()))?;
    let count = header
        .strip_prefix(">star n=")
        .and_then(|n| n.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
        .ok_or_else(|| SeqIoError::StarHeader(format!("bad header `{header}`")))?;
    let mut columns = Vec::new();
    for line in lines {
        for ch in line.chars().filter(|c| !c.is_whitespace()) {
            let cell = if ch == GAP_CHAR {
                None
            } else {
                Some(Base::from_char(ch).ok_or_else(|| SeqIoError::InvalidBase {
                    record: "star".into(),
                    ch,
                    position: columns.len() + 1,
                })?)
            };
            columns.push(cell);
        }
    }
    Ok(StarModel::from_columns(columns, count)?)
}

fn cell(b: Option<Base>) -> char {
    b.map_or('.', Base::as_char)
}

pub fn write_trace(trace: &FillTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for e in &trace.events {
        let c = &e.context;
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            e.pass,
            e.run_start,
            e.column,
            cell(c.prev2),
            cell(c.prev1),
            cell(c.next1),
            cell(c.next2),
            e.rule_id,
            e.allowed.letters(),
            e.stream_index,
            e.skipped,
            e.chosen
        )
        .expect("writing to a String");
    }
    out
}

pub fn read_trace(text: &str) -> Result<FillTrace, SeqIoError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == TRACE_HEADER => {}
        _ => {
            return Err(SeqIoError::Trace {
                line: 1,
                message: "missing header".into(),
            })
        }
    }
    let mut trace = FillTrace::default();
    for (idx, raw) in lines {
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| SeqIoError::Trace {
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 12 {
            return Err(err(format!("expected 12 fields, found {}", fields.len())));
        }
        let number = |i: usize| {
            fields[i]
                .parse::<usize>()
                .map_err(|_| err(format!("field {} is not a number: `{}`", i + 1, fields[i])))
        };
        let context_cell = |i: usize| match fields[i] {
            "." => Ok(None),
            s => single_base(s)
                .map(Some)
                .ok_or_else(|| err(format!("bad context base `{s}`"))),
        };
        let allowed = BaseSet::from_letters(fields[8])
            .filter(|s| !s.is_empty())
            .ok_or_else(|| err(format!("bad allowed set `{}`", fields[8])))?;
        let chosen = single_base(fields[11]).ok_or_else(|| err(format!("bad base `{}`", fields[11])))?;
        trace.events.push(FillEvent {
            pass: number(0)?,
            run_start: number(1)?,
            column: number(2)?,
            context: Context::new(context_cell(3)?, context_cell(4)?, context_cell(5)?, context_cell(6)?),
            rule_id: fields[7].to_string(),
            allowed,
            stream_index: number(9)?,
            skipped: number(10)?,
            chosen,
        });
    }
    Ok(trace)
}

fn single_base(s: &str) -> Option<Base> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Base::from_char(c),
        _ => None,
    }
}
