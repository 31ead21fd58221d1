//! Deterministic context-free (D0L) L-systems: grammar files, bounded
//! expansion and lazy streaming of the output symbols.
//!
//! Every iteration rewrites all symbols of the current word simultaneously.
//! Symbols are single 7-bit printable characters; the alphabet is not fixed
//! here, callers that need nucleotides check that themselves.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Default cap on the length of any expanded word.
pub const DEFAULT_LENGTH_LIMIT: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: duplicate rule for symbol {symbol:?}")]
    DuplicateRule { symbol: char, line: usize },
    #[error("line {line}, column {column}: symbol {symbol:?} is not in the alphabet")]
    UnknownSymbol {
        symbol: char,
        line: usize,
        column: usize,
    },
    #[error("no rule for alphabet symbol {symbol:?}")]
    MissingRule { symbol: char },
    #[error("missing `alphabet:` line")]
    MissingAlphabet,
    #[error("missing `axiom:` line")]
    MissingAxiom,
    #[error("expansion at iteration {iteration} has {length} symbols, above the limit of {limit}")]
    LengthGuard {
        iteration: usize,
        length: u64,
        limit: u64,
    },
    #[error("expansion never reaches {min_length} symbols (stalls at {max_length})")]
    Unreachable { min_length: u64, max_length: u64 },
    #[error("minimum stream length must be at least 1")]
    ZeroLength,
}

/// A validated D0L-system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LSystemSpec {
    alphabet: Vec<u8>,
    axiom: Vec<u8>,
    // Indexed by symbol byte; `None` outside the alphabet.
    productions: Vec<Option<Vec<u8>>>,
}

impl LSystemSpec {
    /// Builds a spec from already-split parts, checking every invariant.
    pub fn new(
        alphabet: &str,
        axiom: &str,
        rules: &[(char, &str)],
    ) -> Result<LSystemSpec, GrammarError> {
        let mut text = format!("alphabet: {}\naxiom: {}\n", spaced(alphabet), axiom);
        for (lhs, rhs) in rules {
            text.push_str(&format!("{lhs} -> {rhs}\n"));
        }
        parse_spec(&text)
    }

    /// The system used throughout the OR1D subfamily pipeline:
    /// axiom `C`, rules A→CTG, C→CCA, T→TGC, G→GAC.
    pub fn nucleotide_default() -> LSystemSpec {
        LSystemSpec::new("ACGT", "C", &[('A', "CTG"), ('C', "CCA"), ('T', "TGC"), ('G', "GAC")])
            .expect("built-in grammar is valid")
    }

    pub fn alphabet(&self) -> impl Iterator<Item = char> + '_ {
        self.alphabet.iter().map(|b| *b as char)
    }

    pub fn axiom(&self) -> String {
        String::from_utf8_lossy(&self.axiom).into_owned()
    }

    pub fn production(&self, symbol: char) -> Option<&str> {
        let idx = symbol as usize;
        self.productions
            .get(idx)?
            .as_deref()
            .map(|p| std::str::from_utf8(p).expect("ascii"))
    }

    fn rule(&self, symbol: u8) -> &[u8] {
        self.productions[symbol as usize]
            .as_deref()
            .expect("productions are total over the alphabet")
    }

    /// Length of the word after `n` iterations, saturating at `u64::MAX`.
    pub fn expansion_length(&self, n: usize) -> u64 {
        let mut lengths = LengthTable::new(self);
        for _ in 0..n {
            if !lengths.step(self) {
                break;
            }
        }
        lengths.total(&self.axiom)
    }
}

fn spaced(symbols: &str) -> String {
    symbols
        .chars()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for LSystemSpec {
    /// Renders the spec in grammar-file form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alphabet: Vec<String> = self.alphabet().map(|c| c.to_string()).collect();
        writeln!(f, "alphabet: {}", alphabet.join(" "))?;
        writeln!(f, "axiom: {}", self.axiom())?;
        for sym in self.alphabet() {
            writeln!(f, "{} -> {}", sym, self.production(sym).unwrap_or_default())?;
        }
        Ok(())
    }
}

/// Per-symbol expansion lengths at some depth.
struct LengthTable {
    lengths: [u64; 128],
}

impl LengthTable {
    fn new(spec: &LSystemSpec) -> Self {
        let mut lengths = [0u64; 128];
        for &s in &spec.alphabet {
            lengths[s as usize] = 1;
        }
        LengthTable { lengths }
    }

    /// Advances one level. Returns false once lengths no longer change.
    fn step(&mut self, spec: &LSystemSpec) -> bool {
        let mut next = [0u64; 128];
        for &s in &spec.alphabet {
            next[s as usize] = spec
                .rule(s)
                .iter()
                .fold(0u64, |acc, c| acc.saturating_add(self.lengths[*c as usize]));
        }
        let changed = next != self.lengths;
        self.lengths = next;
        changed
    }

    fn total(&self, word: &[u8]) -> u64 {
        word.iter()
            .fold(0u64, |acc, c| acc.saturating_add(self.lengths[*c as usize]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpansionReport {
    pub iteration: usize,
    pub length: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<String>,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> GrammarError {
    GrammarError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Parses the line-oriented grammar format:
///
/// ```text
/// # comment
/// alphabet: A C G T
/// axiom: C
/// A -> CTG
/// ```
pub fn parse_spec(text: &str) -> Result<LSystemSpec, GrammarError> {
    let mut alphabet: Option<Vec<u8>> = None;
    let mut axiom: Option<(Vec<u8>, usize, usize)> = None;
    // symbol -> (replacement, line, lhs column, rhs column)
    let mut rules: BTreeMap<u8, (Vec<u8>, usize, usize, usize)> = BTreeMap::new();
    let mut rule_order = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if let Some((pos, ch)) = line
            .char_indices()
            .find(|(_, c)| !(c.is_ascii_graphic() || *c == ' ' || *c == '\t'))
        {
            return Err(syntax(
                line_no,
                pos + 1,
                format!("non-printable or non-ASCII character {ch:?}"),
            ));
        }
        if line.trim().is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        let body = line.trim();

        if let Some(rest) = body.strip_prefix("alphabet:") {
            if alphabet.is_some() {
                return Err(syntax(line_no, indent + 1, "duplicate `alphabet:` line"));
            }
            let base_col = indent + "alphabet:".len();
            let mut symbols = Vec::new();
            for (col, tok) in tokens(rest) {
                if tok.len() != 1 {
                    return Err(syntax(
                        line_no,
                        base_col + col + 1,
                        format!("alphabet symbol `{tok}` must be a single character"),
                    ));
                }
                let sym = tok.as_bytes()[0];
                if symbols.contains(&sym) {
                    return Err(syntax(
                        line_no,
                        base_col + col + 1,
                        format!("symbol {:?} listed twice", sym as char),
                    ));
                }
                symbols.push(sym);
            }
            if symbols.is_empty() {
                return Err(syntax(line_no, base_col + 1, "empty alphabet"));
            }
            alphabet = Some(symbols);
        } else if let Some(rest) = body.strip_prefix("axiom:") {
            if axiom.is_some() {
                return Err(syntax(line_no, indent + 1, "duplicate `axiom:` line"));
            }
            let base_col = indent + "axiom:".len();
            let toks = tokens(rest);
            match toks.as_slice() {
                [] => return Err(syntax(line_no, base_col + 1, "empty axiom")),
                [(col, tok)] => {
                    axiom = Some((tok.as_bytes().to_vec(), line_no, base_col + col + 1))
                }
                [_, (col, _), ..] => {
                    return Err(syntax(
                        line_no,
                        base_col + col + 1,
                        "axiom must not contain whitespace",
                    ))
                }
            }
        } else if let Some(arrow) = body.find("->") {
            let lhs = body[..arrow].trim();
            let rhs_raw = &body[arrow + 2..];
            let rhs = rhs_raw.trim();
            if lhs.len() != 1 {
                return Err(syntax(
                    line_no,
                    indent + 1,
                    "rule must have exactly one symbol before `->`",
                ));
            }
            let rhs_col = indent + arrow + 2 + (rhs_raw.len() - rhs_raw.trim_start().len()) + 1;
            if rhs.is_empty() {
                return Err(syntax(line_no, rhs_col, "empty replacement"));
            }
            if let Some(pos) = rhs.find(char::is_whitespace) {
                return Err(syntax(
                    line_no,
                    rhs_col + pos,
                    "replacement must not contain whitespace",
                ));
            }
            let sym = lhs.as_bytes()[0];
            if rules.contains_key(&sym) {
                return Err(GrammarError::DuplicateRule {
                    symbol: sym as char,
                    line: line_no,
                });
            }
            rules.insert(sym, (rhs.as_bytes().to_vec(), line_no, indent + 1, rhs_col));
            rule_order.push(sym);
        } else {
            return Err(syntax(
                line_no,
                indent + 1,
                "expected `alphabet:`, `axiom:` or a `X -> ...` rule",
            ));
        }
    }

    let alphabet = alphabet.ok_or(GrammarError::MissingAlphabet)?;
    let (axiom, axiom_line, axiom_col) = axiom.ok_or(GrammarError::MissingAxiom)?;
    let known = |s: u8| alphabet.contains(&s);

    if let Some(pos) = axiom.iter().position(|s| !known(*s)) {
        return Err(GrammarError::UnknownSymbol {
            symbol: axiom[pos] as char,
            line: axiom_line,
            column: axiom_col + pos,
        });
    }
    for sym in &rule_order {
        let (rhs, line, lhs_col, rhs_col) = &rules[sym];
        if !known(*sym) {
            return Err(GrammarError::UnknownSymbol {
                symbol: *sym as char,
                line: *line,
                column: *lhs_col,
            });
        }
        if let Some(pos) = rhs.iter().position(|s| !known(*s)) {
            return Err(GrammarError::UnknownSymbol {
                symbol: rhs[pos] as char,
                line: *line,
                column: rhs_col + pos,
            });
        }
    }

    let mut productions = vec![None; 128];
    for &sym in &alphabet {
        match rules.remove(&sym) {
            Some((rhs, ..)) => productions[sym as usize] = Some(rhs),
            None => return Err(GrammarError::MissingRule { symbol: sym as char }),
        }
    }

    Ok(LSystemSpec {
        alphabet,
        axiom,
        productions,
    })
}

/// Whitespace-separated tokens with their byte offsets.
fn tokens(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(st)) => {
                out.push((st, &s[st..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(st) = start {
        out.push((st, &s[st..]));
    }
    out
}

/// Expands `n` iterations under the default length limit.
pub fn expand(spec: &LSystemSpec, n: usize) -> Result<String, GrammarError> {
    expand_with_limit(spec, n, DEFAULT_LENGTH_LIMIT)
}

pub fn expand_with_limit(spec: &LSystemSpec, n: usize, limit: u64) -> Result<String, GrammarError> {
    let length = spec.expansion_length(n);
    if length > limit {
        return Err(GrammarError::LengthGuard {
            iteration: n,
            length,
            limit,
        });
    }
    let mut word = spec.axiom.clone();
    for _ in 0..n {
        let mut next = Vec::with_capacity(word.len() * 3);
        for &s in &word {
            next.extend_from_slice(spec.rule(s));
        }
        if next == word {
            break;
        }
        word = next;
    }
    Ok(String::from_utf8(word).expect("ascii symbols"))
}

pub fn expand_report(spec: &LSystemSpec, n: usize) -> Result<ExpansionReport, GrammarError> {
    let sequence = expand(spec, n)?;
    Ok(ExpansionReport {
        iteration: n,
        length: sequence.len() as u64,
        sequence: Some(sequence),
    })
}

/// Smallest iteration whose word has at least `min_length` symbols.
pub fn iteration_for_length(
    spec: &LSystemSpec,
    min_length: u64,
    limit: u64,
) -> Result<(usize, u64), GrammarError> {
    if min_length == 0 {
        return Err(GrammarError::ZeroLength);
    }
    let mut table = LengthTable::new(spec);
    let mut last = table.total(&spec.axiom);
    let mut iteration = 0;
    let mut stalled = 0;
    loop {
        if last > limit {
            return Err(GrammarError::LengthGuard {
                iteration,
                length: last,
                limit,
            });
        }
        if last >= min_length {
            return Ok((iteration, last));
        }
        // A word that does not grow for |alphabet| consecutive iterations
        // consists of symbols on unit-length cycles and never grows again.
        if stalled >= spec.alphabet.len() || !table.step(spec) {
            return Err(GrammarError::Unreachable {
                min_length,
                max_length: last,
            });
        }
        iteration += 1;
        let now = table.total(&spec.axiom);
        stalled = if now == last { stalled + 1 } else { 0 };
        last = now;
    }
}

/// Lazily yields the word of the smallest iteration reaching `min_length`.
pub fn expand_stream(spec: &LSystemSpec, min_length: u64) -> Result<ExpansionStream<'_>, GrammarError> {
    expand_stream_with_limit(spec, min_length, DEFAULT_LENGTH_LIMIT)
}

pub fn expand_stream_with_limit(
    spec: &LSystemSpec,
    min_length: u64,
    limit: u64,
) -> Result<ExpansionStream<'_>, GrammarError> {
    let (iteration, length) = iteration_for_length(spec, min_length, limit)?;
    Ok(ExpansionStream::new(spec, iteration, length))
}

/// Depth-first walk of the derivation tree; holds O(iteration × rule length)
/// state regardless of the output length.
#[derive(Debug, Clone)]
pub struct ExpansionStream<'a> {
    spec: &'a LSystemSpec,
    iteration: usize,
    length: u64,
    remaining: u64,
    stack: Vec<(u8, usize)>,
}

impl<'a> ExpansionStream<'a> {
    fn new(spec: &'a LSystemSpec, iteration: usize, length: u64) -> Self {
        let stack = spec.axiom.iter().rev().map(|s| (*s, iteration)).collect();
        ExpansionStream {
            spec,
            iteration,
            length,
            remaining: length,
            stack,
        }
    }

    /// Streams exactly the word of iteration `n`.
    pub fn at_iteration(spec: &'a LSystemSpec, n: usize, limit: u64) -> Result<Self, GrammarError> {
        let length = spec.expansion_length(n);
        if length > limit {
            return Err(GrammarError::LengthGuard {
                iteration: n,
                length,
                limit,
            });
        }
        Ok(ExpansionStream::new(spec, n, length))
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Total length of the streamed word.
    pub fn total_len(&self) -> u64 {
        self.length
    }

    pub fn report(&self) -> ExpansionReport {
        ExpansionReport {
            iteration: self.iteration,
            length: self.length,
            sequence: None,
        }
    }
}

impl Iterator for ExpansionStream<'_> {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        while let Some((sym, depth)) = self.stack.pop() {
            if depth == 0 {
                self.remaining -= 1;
                return Some(sym);
            }
            for &c in self.spec.rule(sym).iter().rev() {
                self.stack.push((c, depth - 1));
            }
        }
        None
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

impl ExactSizeIterator for ExpansionStream<'_> {}
