//! Star-model consensus: columns where all aligned inputs agree keep their
//! base, every other column becomes a gap. Consecutive gaps form runs.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::nucleotide::{Base, NucleotideSequence};

/// Text rendering of a gap column.
pub const GAP_CHAR: char = '-';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StarError {
    #[error("need at least 2 sequences, got {0}")]
    TooFewSequences(usize),
    #[error("sequences differ in length (expected {expected}): {}", describe_offenders(.offenders))]
    UnequalLengths {
        expected: usize,
        /// (input index, length) of every sequence whose length differs from the first.
        offenders: Vec<(usize, usize)>,
    },
    #[error("star model has no columns")]
    Empty,
    #[error("source count must be positive")]
    ZeroSources,
}

fn describe_offenders(offenders: &[(usize, usize)]) -> String {
    offenders
        .iter()
        .map(|(i, len)| format!("#{i} has {len}"))
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GapRun {
    pub start: usize,
    pub length: usize,
}

impl GapRun {
    pub fn end(&self) -> usize {
        self.start + self.length
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarModel {
    columns: Vec<Option<Base>>,
    gap_runs: Vec<GapRun>,
    source_count: usize,
}

impl StarModel {
    /// Wraps raw columns (`None` = gap) and derives the gap runs.
    pub fn from_columns(columns: Vec<Option<Base>>, source_count: usize) -> Result<Self, StarError> {
        if columns.is_empty() {
            return Err(StarError::Empty);
        }
        if source_count == 0 {
            return Err(StarError::ZeroSources);
        }
        let gap_runs = gap_runs(&columns);
        Ok(StarModel {
            columns,
            gap_runs,
            source_count,
        })
    }

    pub fn columns(&self) -> &[Option<Base>] {
        &self.columns
    }

    pub fn gap_runs(&self) -> &[GapRun] {
        &self.gap_runs
    }

    pub fn source_count(&self) -> usize {
        self.source_count
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn gap_count(&self) -> usize {
        self.columns.iter().filter(|c| c.is_none()).count()
    }

    pub fn max_run_length(&self) -> usize {
        self.gap_runs.iter().map(|r| r.length).max().unwrap_or(0)
    }

    /// Columns as text with [`GAP_CHAR`] for gaps.
    pub fn columns_string(&self) -> String {
        self.columns
            .iter()
            .map(|c| c.map_or(GAP_CHAR, Base::as_char))
            .collect()
    }
}

impl fmt::Display for StarModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.columns_string())
    }
}

fn gap_runs(columns: &[Option<Base>]) -> Vec<GapRun> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < columns.len() {
        if columns[i].is_some() {
            i += 1;
            continue;
        }
        let start = i;
        while i < columns.len() && columns[i].is_none() {
            i += 1;
        }
        runs.push(GapRun {
            start,
            length: i - start,
        });
    }
    runs
}

pub fn build_star(seqs: &[NucleotideSequence]) -> Result<StarModel, StarError> {
    if seqs.len() < 2 {
        return Err(StarError::TooFewSequences(seqs.len()));
    }
    let expected = seqs[0].len();
    let offenders: Vec<(usize, usize)> = seqs
        .iter()
        .enumerate()
        .filter(|(_, s)| s.len() != expected)
        .map(|(i, s)| (i, s.len()))
        .collect();
    if !offenders.is_empty() {
        return Err(StarError::UnequalLengths { expected, offenders });
    }
    let columns = (0..expected)
        .map(|i| {
            let first = seqs[0].bases()[i];
            seqs[1..]
                .iter()
                .all(|s| s.bases()[i] == first)
                .then_some(first)
        })
        .collect();
    StarModel::from_columns(columns, seqs.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct GapStats {
    /// run length -> number of runs
    pub histogram: BTreeMap<usize, usize>,
    pub total_gap_columns: usize,
}

pub fn gap_stats(model: &StarModel) -> GapStats {
    let mut stats = GapStats::default();
    for run in model.gap_runs() {
        *stats.histogram.entry(run.length).or_default() += 1;
        stats.total_gap_columns += run.length;
    }
    stats
}

impl fmt::Display for GapStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "total gap columns: {}", self.total_gap_columns)?;
        for (len, count) in &self.histogram {
            writeln!(f, "runs of length {len}: {count}")?;
        }
        Ok(())
    }
}
