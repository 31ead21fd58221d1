//! Test-only oracles, written independently of the library code paths.
#![allow(dead_code)]

use lstar::starmodel::StarModel;
use lstar::{Base, BaseSet, NucleotideSequence};
use rand::seq::index::sample;
use rand::Rng;

/// The nucleotide grammar word of iteration five, as printed in the source
/// material (four typeset lines).
pub const PRINTED_ITERATION_FIVE: [&str; 4] = [
    "CCACCACTGCCACCACTGCCATGCGACCCACCACTGCCACCACTGCCATGCGACCCACCACT",
    "GTGCGACCCAGACCTGCCACCACCACTGCCACCACTGCCATGCGACCCACCACTGCCACCAC",
    "TGCCATGCGACCCACCACTGTGCGACCCAGACCTGCCACCACCACTGCCACCACTGCCATGC",
    "GACTGCGACCCAGACCTGCCACCACCACTGGACCTGCCACCATGCGACCCACCACTG",
];

/// The published filled sequence, transcribed line by line.
pub const PRINTED_FILLED: [&str; 15] = [
    "ATGGATGGAGCCAACCAGAGTGAGTCCTCACAGTTCCTTCTCCTGGGGATGTCAGAGAGTCC",
    "TGAGCAGCAGCAGATCCTGTTTTGGATGTTCTGTCCATGTACCTGGTCACGGTGTGGGAA",
    "ATGTGCTCATCATCTGGCCATCAGCTCTGATTCCCCCTGCACACCCCCGTGTACTTCTTCC",
    "TGGCCAACCTCTCCTTCACTGACCTCTTCTTTGTACCAACACAATCCCCAAGATGCTGGTGA",
    "ACCTCCAGTCCCAGAACAAGCCATCTCCTATGCAGGGTGTCTGACACAGCTCTACTTCCTG",
    "GTCTCCTTGGTGACCCTGGACAACCTCATCCTGGCCGTGATGGCCTATGATCGCTATGTGGCC",
    "AGCTGCTGCCCCCTCCACTACGCCACAGCCATGAGCCCTGCGCTCTGTCTCTTCTCCTGTCC",
    "TTGTGTTGGGCGCTGTCAGTCCTCTATGGCCTCCTGCCACCGTCCTCATGACCAGCGTGACC",
    "TTCTGTGGGCCTCGAGACATCCACTACGTCTTCTGTGACATGTACCTGGTGCTGCGGTTGGCA",
    "TGTTCCAACAGCCACATGAATCACACAGCGCTGATTGCCACGGGCTGCTTCATCTTCTCACT",
    "CCCTTGGGATTCCTGACCAGGTCTATGTCCCCATTGTCAGACCCATCCTGGGAATACCCTCC",
    "GCCTCTAAGAAATACAAAGCCTTCTCCACCTGTGCCTCCCATTTGGGTGGAGTCTCCCTCTTA",
    "TATGGGACCTTCTCTATGGTTTACCTGGAGCCCCTCCATACCTACTCCCTGAAGGACTCAGTA",
    "GCCACAGTGATGTATGCTGTGGTGACACCCATGATGAACCCGTTTCATCTACAGCCTGAGGAA",
    "CAAGGACATGCATGGGGCTCAGGAAGACTCCTACGCAGACCCTTTGAGAGGCAAACA",
];

pub fn printed_iteration_five() -> String {
    PRINTED_ITERATION_FIVE.concat()
}

pub fn printed_filled() -> String {
    PRINTED_FILLED.concat()
}

/// Naive recursive D0L expansion straight from the definition.
pub fn naive_expand(rules: &[(char, &str)], axiom: &str, n: usize) -> String {
    if n == 0 {
        return axiom.to_string();
    }
    let mut out = String::new();
    for c in axiom.chars() {
        let rhs = rules.iter().find(|(l, _)| *l == c).expect("total rules").1;
        out.push_str(&naive_expand(rules, rhs, n - 1));
    }
    out
}

pub const NUCLEOTIDE_RULES: [(char, &str); 4] = [('A', "CTG"), ('C', "CCA"), ('T', "TGC"), ('G', "GAC")];

/// The gap-filling constraints as worded case by case, evaluated in the
/// order they are listed. `None` is a position with no known base.
pub fn worded_single(
    p2: Option<Base>,
    p1: Option<Base>,
    n1: Option<Base>,
    n2: Option<Base>,
) -> (&'static str, &'static str) {
    use Base::*;
    let is = |x: Option<Base>, b: Base| x == Some(b);
    let any_of = |x: Option<Base>, bs: &[Base]| x.is_some_and(|v| bs.contains(&v));

    if is(p2, T) && is(p1, A) && is(n1, A) && any_of(n2, &[A, G]) {
        return ("A1", "C");
    }
    if is(p2, T) && is(p1, A) && is(n1, G) && is(n2, A) {
        return ("A2", "C");
    }
    if is(p2, T) && is(p1, A) && any_of(n1, &[T, C]) {
        return ("A3", "CT");
    }
    if is(p2, T) && is(p1, G) && is(n1, A) && any_of(n2, &[A, G]) {
        return ("A4", "CG");
    }
    if is(p2, T) && is(p1, G) && is(n1, G) && is(n2, A) {
        return ("A5", "CG");
    }
    if is(p2, T) && is(p1, G) && any_of(n1, &[T, C]) {
        return ("A6", "CGT");
    }
    if is(p1, T) && is(n1, A) && any_of(n2, &[C, T]) {
        return ("A7", "TC");
    }
    if is(p1, T) && is(n1, A) && any_of(n2, &[A, G]) {
        return ("A8", "C");
    }
    if is(p1, T) && is(n1, G) && is(n2, A) {
        return ("A9", "GC");
    }
    if is(p1, T) && is(n1, G) && any_of(n2, &[C, T, G]) {
        return ("A10", "TCG");
    }
    if is(p1, C) && is(n1, A) && any_of(n2, &[A, G]) {
        return ("A11", "CGA");
    }
    if is(p1, C) && is(n1, G) && is(n2, A) {
        return ("A12", "CGA");
    }
    ("A13", "ACGT")
}

pub fn worded_multi(p2: Option<Base>, p1: Option<Base>) -> (&'static str, &'static str) {
    match (p2, p1) {
        (Some(Base::T), Some(Base::A)) => ("B1", "CT"),
        (Some(Base::T), Some(Base::G)) => ("B2", "CTG"),
        _ => ("B3", "ACGT"),
    }
}

pub fn letters(s: &str) -> BaseSet {
    BaseSet::from_letters(s).expect("letters")
}

/// Context of a column in a partially filled state, computed directly.
pub fn context_of(state: &[Option<Base>], col: usize) -> [Option<Base>; 4] {
    let at = |i: isize| -> Option<Base> {
        if i < 0 || i as usize >= state.len() {
            None
        } else {
            state[i as usize]
        }
    };
    let c = col as isize;
    [at(c - 2), at(c - 1), at(c + 1), at(c + 2)]
}

pub fn random_base<R: Rng>(rng: &mut R) -> Base {
    Base::ALL[rng.gen_range(0..4)]
}

/// Random star model: length ≤ `max_len`, gap runs 1..=`max_run`, runs
/// separated by at least one consensus column.
pub fn random_model<R: Rng>(rng: &mut R, max_len: usize, max_run: usize) -> StarModel {
    let len = rng.gen_range(1..=max_len);
    let mut cols: Vec<Option<Base>> = Vec::with_capacity(len);
    while cols.len() < len {
        let gap_here = cols.last().is_none_or(|c| c.is_some()) && rng.gen_bool(0.3);
        if gap_here {
            let run = rng.gen_range(1..=max_run).min(len - cols.len());
            cols.extend(std::iter::repeat_n(None, run));
        } else {
            cols.push(Some(random_base(rng)));
        }
    }
    StarModel::from_columns(cols, 3).expect("non-empty")
}

/// Three aligned sequences of length `len` disagreeing at exactly
/// `mismatches` columns.
pub fn synthetic_trio<R: Rng>(rng: &mut R, len: usize, mismatches: usize) -> Vec<NucleotideSequence> {
    let mismatch_cols: std::collections::BTreeSet<usize> = sample(rng, len, mismatches).into_iter().collect();
    let mut rows = vec![Vec::new(); 3];
    for col in 0..len {
        let base = random_base(rng);
        for row in rows.iter_mut() {
            row.push(base);
        }
        if mismatch_cols.contains(&col) {
            let which = rng.gen_range(0..3);
            let other = Base::ALL.iter().copied().filter(|b| *b != base).nth(rng.gen_range(0..3)).unwrap();
            rows[which][col] = other;
        }
    }
    rows.into_iter()
        .enumerate()
        .map(|(i, bases)| NucleotideSequence::from_bases(format!("synthetic_{}", i + 1), bases).unwrap())
        .collect()
}

/// Two sequences of length `len` differing at exactly `diffs` columns.
pub fn synthetic_pair<R: Rng>(rng: &mut R, len: usize, diffs: usize) -> (NucleotideSequence, NucleotideSequence) {
    let a: Vec<Base> = (0..len).map(|_| random_base(rng)).collect();
    let mut b = a.clone();
    for col in sample(rng, len, diffs) {
        let shift = rng.gen_range(1..4);
        let idx = Base::ALL.iter().position(|x| *x == a[col]).unwrap();
        b[col] = Base::ALL[(idx + shift) % 4];
    }
    (
        NucleotideSequence::from_bases("a", a).unwrap(),
        NucleotideSequence::from_bases("b", b).unwrap(),
    )
}

/// Exhaustive global alignment: enumerates every alignment, keeps the best
/// score, and breaks ties by preferring pair, then gap-in-b, then gap-in-a
/// when reading the alignment from its end. Returns (score, matches, length).
pub fn brute_force_alignment(a: &[Base], b: &[Base], m: i32, x: i32, g: i32) -> (i32, usize, usize) {
    // ops are stored end-first: 2 = pair, 1 = gap in b, 0 = gap in a, so
    // the lexicographically largest op list wins ties.
    let mut all: Vec<Vec<u8>> = Vec::new();
    collect_ops(a.len(), b.len(), &mut Vec::new(), &mut all);
    let mut best: Option<(i32, Vec<u8>, usize)> = None;
    for ops in all {
        let (mut i, mut j) = (a.len(), b.len());
        let mut score = 0;
        let mut matches = 0;
        for op in &ops {
            match op {
                2 => {
                    i -= 1;
                    j -= 1;
                    if a[i] == b[j] {
                        score += m;
                        matches += 1;
                    } else {
                        score += x;
                    }
                }
                1 => {
                    i -= 1;
                    score += g;
                }
                _ => {
                    j -= 1;
                    score += g;
                }
            }
        }
        let better = match &best {
            None => true,
            Some((bs, bops, _)) => score > *bs || (score == *bs && ops > *bops),
        };
        if better {
            best = Some((score, ops, matches));
        }
    }
    let (score, ops, matches) = best.expect("at least one alignment");
    (score, matches, ops.len())
}

fn collect_ops(i: usize, j: usize, ops: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if i == 0 && j == 0 {
        out.push(ops.clone());
        return;
    }
    if i > 0 && j > 0 {
        ops.push(2);
        collect_ops(i - 1, j - 1, ops, out);
        ops.pop();
    }
    if i > 0 {
        ops.push(1);
        collect_ops(i - 1, j, ops, out);
        ops.pop();
    }
    if j > 0 {
        ops.push(0);
        collect_ops(i, j - 1, ops, out);
        ops.pop();
    }
}
