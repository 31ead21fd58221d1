//! Checks on synthesized sequences: stop codons, conceptual translation and
//! percent identity (positionwise and over a global alignment).

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::nucleotide::{Base, NucleotideSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqCheckError {
    #[error("frame must be 0, 1 or 2, got {0}")]
    InvalidFrame(usize),
    #[error("sequence of length {len} has no complete codon in frame {frame}")]
    TooShort { len: usize, frame: usize },
    #[error("sequences differ in length ({0} vs {1})")]
    UnequalLengths(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AminoAcid {
    Residue(char),
    Stop,
}

impl AminoAcid {
    pub fn letter(self) -> char {
        match self {
            AminoAcid::Residue(c) => c,
            AminoAcid::Stop => '*',
        }
    }
}

/// Maps each of the 64 codons to a residue or stop.
#[derive(Debug, Clone)]
pub struct CodonTable {
    entries: [AminoAcid; 64],
}

// Codons enumerated with T,C,A,G at each position, first base slowest.
const STANDARD_CODE: &[u8; 64] = b"FFLLSSSSYY**CC*WLLLLPPPPHHQQRRRRIIIMTTTTNNKKSSRRVVVVAAAADDEEGGGG";

impl CodonTable {
    pub fn standard() -> Self {
        let mut entries = [AminoAcid::Stop; 64];
        for (i, &aa) in STANDARD_CODE.iter().enumerate() {
            entries[i] = match aa {
                b'*' => AminoAcid::Stop,
                c => AminoAcid::Residue(c as char),
            };
        }
        CodonTable { entries }
    }

    fn index(codon: [Base; 3]) -> usize {
        let rank = |b: Base| match b {
            Base::T => 0,
            Base::C => 1,
            Base::A => 2,
            Base::G => 3,
        };
        rank(codon[0]) * 16 + rank(codon[1]) * 4 + rank(codon[2])
    }

    pub fn translate(&self, codon: [Base; 3]) -> AminoAcid {
        self.entries[CodonTable::index(codon)]
    }

    pub fn is_stop(&self, codon: [Base; 3]) -> bool {
        self.translate(codon) == AminoAcid::Stop
    }
}

impl Default for CodonTable {
    fn default() -> Self {
        CodonTable::standard()
    }
}

fn check_frame(seq: &NucleotideSequence, frame: usize) -> Result<(), SeqCheckError> {
    if frame > 2 {
        return Err(SeqCheckError::InvalidFrame(frame));
    }
    if seq.len() < frame + 3 {
        return Err(SeqCheckError::TooShort {
            len: seq.len(),
            frame,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StopCodon {
    /// 0-based codon index within the frame.
    pub codon_index: usize,
    pub codon: String,
}

/// Every in-frame TAA/TAG/TGA, in order.
pub fn scan_stops(seq: &NucleotideSequence, frame: usize) -> Result<Vec<StopCodon>, SeqCheckError> {
    check_frame(seq, frame)?;
    let table = CodonTable::standard();
    Ok(seq
        .codons(frame)
        .enumerate()
        .filter(|(_, c)| table.is_stop(*c))
        .map(|(codon_index, c)| StopCodon {
            codon_index,
            codon: c.iter().map(|b| b.as_char()).collect(),
        })
        .collect())
}

/// Stops other than one in the final complete codon of the frame.
pub fn internal_stops(seq: &NucleotideSequence, frame: usize) -> Result<Vec<StopCodon>, SeqCheckError> {
    let last = (seq.len() - frame.min(seq.len())) / 3;
    Ok(scan_stops(seq, frame)?
        .into_iter()
        .filter(|s| s.codon_index + 1 < last)
        .collect())
}

pub fn translate(seq: &NucleotideSequence, frame: usize) -> Result<String, SeqCheckError> {
    check_frame(seq, frame)?;
    let table = CodonTable::standard();
    Ok(seq.codons(frame).map(|c| table.translate(c).letter()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport {
    pub matches: usize,
    pub compared: usize,
    #[serde(serialize_with = "four_places")]
    pub fraction: f64,
}

fn four_places<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64((value * 10_000.0).round() / 10_000.0)
}

impl IdentityReport {
    fn new(matches: usize, compared: usize) -> Self {
        IdentityReport {
            matches,
            compared,
            fraction: matches as f64 / compared as f64,
        }
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} ({:.4})", self.matches, self.compared, self.fraction)
    }
}

pub fn identity_hamming(
    a: &NucleotideSequence,
    b: &NucleotideSequence,
) -> Result<IdentityReport, SeqCheckError> {
    if a.len() != b.len() {
        return Err(SeqCheckError::UnequalLengths(a.len(), b.len()));
    }
    let matches = a
        .bases()
        .iter()
        .zip(b.bases())
        .filter(|(x, y)| x == y)
        .count();
    Ok(IdentityReport::new(matches, a.len()))
}

/// Linear-gap global alignment scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scoring {
    pub match_score: i32,
    pub mismatch: i32,
    pub gap: i32,
}

impl Default for Scoring {
    fn default() -> Self {
        Scoring {
            match_score: 1,
            mismatch: -1,
            gap: -2,
        }
    }
}

impl Scoring {
    fn pair(&self, x: Base, y: Base) -> i32 {
        if x == y {
            self.match_score
        } else {
            self.mismatch
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlignOp {
    /// Both sequences advance.
    Pair,
    /// Base of `a` against a gap.
    GapInB,
    /// Base of `b` against a gap.
    GapInA,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub score: i32,
    /// Operations from the start of both sequences.
    pub ops: Vec<AlignOp>,
    pub matches: usize,
}

impl Alignment {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// Needleman-Wunsch with traceback preferring diagonal, then up (gap in b),
/// then left (gap in a).
pub fn align_global(a: &[Base], b: &[Base], scoring: &Scoring) -> Alignment {
    let (n, m) = (a.len(), b.len());
    let width = m + 1;
    let mut h = vec![0i32; (n + 1) * width];
    for i in 1..=n {
        h[i * width] = i as i32 * scoring.gap;
    }
    for (j, cell) in h.iter_mut().enumerate().take(m + 1).skip(1) {
        *cell = j as i32 * scoring.gap;
    }
    for i in 1..=n {
        for j in 1..=m {
            let diag = h[(i - 1) * width + j - 1] + scoring.pair(a[i - 1], b[j - 1]);
            let up = h[(i - 1) * width + j] + scoring.gap;
            let left = h[i * width + j - 1] + scoring.gap;
            h[i * width + j] = diag.max(up).max(left);
        }
    }

    let mut ops = Vec::with_capacity(n + m);
    let mut matches = 0;
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = h[i * width + j];
        if i > 0 && j > 0 && here == h[(i - 1) * width + j - 1] + scoring.pair(a[i - 1], b[j - 1]) {
            if a[i - 1] == b[j - 1] {
                matches += 1;
            }
            ops.push(AlignOp::Pair);
            i -= 1;
            j -= 1;
        } else if i > 0 && here == h[(i - 1) * width + j] + scoring.gap {
            ops.push(AlignOp::GapInB);
            i -= 1;
        } else {
            ops.push(AlignOp::GapInA);
            j -= 1;
        }
    }
    ops.reverse();
    Alignment {
        score: h[n * width + m],
        ops,
        matches,
    }
}

/// Matching aligned columns over alignment length, gap columns included.
pub fn identity_aligned(
    a: &NucleotideSequence,
    b: &NucleotideSequence,
    scoring: &Scoring,
) -> IdentityReport {
    let aln = align_global(a.bases(), b.bases(), scoring);
    IdentityReport::new(aln.matches, aln.len())
}
