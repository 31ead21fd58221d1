mod common;

use common::*;
use lstar::gapfill::{
    allowed_set, fill, validate_stream_usage, validate_trace, ConstraintRuleTable, Context, FillError, FillPolicy,
    GapClass, MismatchHandling,
};
use lstar::grammar::{expand, expand_stream, ExpansionStream, LSystemSpec, DEFAULT_LENGTH_LIMIT};
use lstar::seqcheck::{identity_aligned, identity_hamming, scan_stops, translate, Scoring};
use lstar::seqio::{read_fasta, read_star, write_fasta, write_star, FastaRecord};
use lstar::starmodel::{build_star, StarModel};
use lstar::{Base, NucleotideSequence};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn base() -> impl Strategy<Value = Base> {
    prop::sample::select(Base::ALL.to_vec())
}

fn bases(max: usize) -> impl Strategy<Value = Vec<Base>> {
    prop::collection::vec(base(), 1..=max)
}

fn seq_of(id: &str, b: Vec<Base>) -> NucleotideSequence {
    NucleotideSequence::from_bases(id, b).unwrap()
}

/// Star model columns with runs ≤ `max_run`, runs separated by consensus.
fn model(max_len: usize, max_run: usize) -> impl Strategy<Value = StarModel> {
    prop::collection::vec((base(), 0..=max_run), 1..=max_len).prop_map(move |cells| {
        let mut cols = Vec::new();
        for (b, run) in cells {
            cols.push(Some(b));
            cols.extend(std::iter::repeat_n(None, run));
        }
        StarModel::from_columns(cols, 3).unwrap()
    })
}

/// Single-symbol-axiom D0L systems whose axiom rule starts with the axiom.
fn prefix_closed_spec() -> impl Strategy<Value = (Vec<(char, String)>, char)> {
    (1usize..=4).prop_flat_map(|k| {
        let alphabet: Vec<char> = "WXYZ".chars().take(k).collect();
        let sym = prop::sample::select(alphabet.clone());
        let rhs = prop::collection::vec(sym.clone(), 1..=3).prop_map(|v| v.into_iter().collect::<String>());
        (prop::collection::vec(rhs, k), sym).prop_map(move |(mut rules, axiom)| {
            let idx = alphabet.iter().position(|c| *c == axiom).unwrap();
            if !rules[idx].starts_with(axiom) {
                rules[idx].insert(0, axiom);
            }
            (alphabet.iter().copied().zip(rules).collect(), axiom)
        })
    })
}

proptest! {
    #[test]
    fn expansion_matches_naive_and_is_prefix_closed((rules, axiom) in prefix_closed_spec(), n in 0usize..6) {
        let refs: Vec<(char, &str)> = rules.iter().map(|(c, s)| (*c, s.as_str())).collect();
        let alphabet: String = rules.iter().map(|(c, _)| *c).collect();
        let spec = LSystemSpec::new(&alphabet, &axiom.to_string(), &refs).unwrap();
        let now = expand(&spec, n).unwrap();
        let next = expand(&spec, n + 1).unwrap();
        prop_assert_eq!(&now, &naive_expand(&refs, &axiom.to_string(), n));
        prop_assert!(next.starts_with(&now));
        prop_assert_eq!(spec.expansion_length(n), now.len() as u64);
        let streamed: Vec<u8> = ExpansionStream::at_iteration(&spec, n, DEFAULT_LENGTH_LIMIT).unwrap().collect();
        prop_assert_eq!(streamed, now.as_bytes().to_vec());
    }

    #[test]
    fn stream_prefix_agrees_with_deeper_expansion(min_len in 1u64..2000) {
        let spec = LSystemSpec::nucleotide_default();
        let stream = expand_stream(&spec, min_len).unwrap();
        let n = stream.iteration();
        prop_assert!(stream.len() as u64 >= min_len);
        if n > 0 {
            prop_assert!(spec.expansion_length(n - 1) < min_len);
        }
        let got: Vec<u8> = stream.collect();
        let deeper = expand(&spec, n + 1).unwrap();
        prop_assert!(deeper.as_bytes().starts_with(&got));
    }

    #[test]
    fn star_reconstructs_every_input(rows in (1usize..60).prop_flat_map(|len| prop::collection::vec(prop::collection::vec(base(), len), 2..5))) {
        let seqs: Vec<NucleotideSequence> = rows.iter().enumerate().map(|(i, r)| seq_of(&format!("s{i}"), r.clone())).collect();
        let star = build_star(&seqs).unwrap();
        for s in &seqs {
            let rebuilt: Vec<Base> = star.columns().iter().zip(s.bases()).map(|(c, b)| c.unwrap_or(*b)).collect();
            prop_assert_eq!(rebuilt.as_slice(), s.bases());
        }
        let mut reversed = seqs.clone();
        reversed.reverse();
        let rev_star = build_star(&reversed).unwrap();
        prop_assert_eq!(rev_star.columns(), star.columns());
        let run_total: usize = star.gap_runs().iter().map(|r| r.length).sum();
        let non_gap = star.columns().iter().filter(|c| c.is_some()).count();
        prop_assert_eq!(star.len(), non_gap + run_total);
        for w in star.gap_runs().windows(2) {
            prop_assert!(w[0].end() < w[1].start);
        }
        for r in star.gap_runs() {
            prop_assert!(r.start == 0 || star.columns()[r.start - 1].is_some());
            prop_assert!(r.end() == star.len() || star.columns()[r.end()].is_some());
        }
    }

    #[test]
    fn rule_table_agrees_with_worded_rules(p2 in prop::option::of(base()), p1 in prop::option::of(base()),
                                           n1 in prop::option::of(base()), n2 in prop::option::of(base())) {
        let table = ConstraintRuleTable::builtin();
        let ctx = Context::new(p2, p1, n1, n2);
        let (set, id) = allowed_set(&ctx, GapClass::Single, &table);
        let (oid, oset) = worded_single(p2, p1, n1, n2);
        prop_assert_eq!((id, set), (oid, letters(oset)));
        let (set, id) = allowed_set(&ctx, GapClass::Multi, &table);
        let (oid, oset) = worded_multi(p2, p1);
        prop_assert_eq!((id, set), (oid, letters(oset)));
    }

    #[test]
    fn fasta_round_trip(records in prop::collection::vec(("[A-Za-z0-9_][A-Za-z0-9_ =.-]{0,20}", bases(200)), 1..5)) {
        let records: Vec<FastaRecord> = records.into_iter().map(|(h, b)| FastaRecord {
            header: h.trim().to_string(),
            bases: b.iter().map(|x| x.as_char()).collect(),
        }).collect();
        let text = write_fasta(&records).unwrap();
        prop_assert!(text.lines().all(|l| l.starts_with('>') || l.len() <= 60));
        prop_assert_eq!(read_fasta(&text).unwrap(), records);
    }

    #[test]
    fn star_text_round_trip(m in model(120, 4)) {
        let text = write_star(&m);
        prop_assert_eq!(read_star(&text).unwrap(), m);
    }

    #[test]
    fn identity_laws(a in bases(80), b in bases(80)) {
        let sa = seq_of("a", a.clone());
        let self_id = identity_hamming(&sa, &sa).unwrap();
        prop_assert_eq!(self_id.fraction, 1.0);
        if a.len() == b.len() {
            let sb = seq_of("b", b);
            prop_assert_eq!(identity_hamming(&sa, &sb).unwrap(), identity_hamming(&sb, &sa).unwrap());
        }
    }

    #[test]
    fn aligned_equals_hamming_for_close_pairs(seed in any::<u64>(), len in 4usize..120) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // mismatches well below the point where a gap pair could pay off
        let diffs = len / 8;
        let (a, b) = synthetic_pair(&mut rng, len, diffs);
        let ham = identity_hamming(&a, &b).unwrap();
        let aligned = identity_aligned(&a, &b, &Scoring::default());
        let aln = lstar::seqcheck::align_global(a.bases(), b.bases(), &Scoring::default());
        if aln.len() == len {
            prop_assert_eq!(ham, aligned);
        }
    }

    #[test]
    fn stops_and_translation_agree(s in bases(90), frame in 0usize..3) {
        prop_assume!(s.len() >= frame + 3);
        let seq = seq_of("s", s.clone());
        let stops = scan_stops(&seq, frame).unwrap();
        let protein = translate(&seq, frame).unwrap();
        prop_assert_eq!(!stops.is_empty(), protein.contains('*'));
        prop_assert_eq!(protein.len(), (s.len() - frame) / 3);
        for st in &stops {
            prop_assert_eq!(protein.as_bytes()[st.codon_index], b'*');
        }
    }
}

fn check_fill(m: &StarModel, policy: &FillPolicy, stream: &[u8]) -> Result<(), TestCaseError> {
    let table = ConstraintRuleTable::builtin();
    let (out, trace) = match fill(m, stream.iter().copied(), &table, policy) {
        Ok(r) => r,
        Err(FillError::Mismatch { .. }) if policy.mismatch() == MismatchHandling::FailOnMismatch => return Ok(()),
        Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
    };
    prop_assert_eq!(out.len(), m.len());
    for (c, b) in m.columns().iter().zip(out.bases()) {
        if let Some(c) = c {
            prop_assert_eq!(c, b);
        }
    }
    prop_assert_eq!(trace.len(), m.gap_count());
    prop_assert_eq!(trace.passes(), m.max_run_length());

    // recompute each event's context and allowed set with the worded rules
    let mut state = m.columns().to_vec();
    let mut last: Option<usize> = None;
    for e in &trace.events {
        let run = m.gap_runs().iter().find(|r| r.start == e.run_start).unwrap();
        let open = run.end() - e.column;
        let [p2, p1, n1, n2] = context_of(&state, e.column);
        let (id, set) = if open > 1 { worded_multi(p2, p1) } else { worded_single(p2, p1, n1, n2) };
        prop_assert_eq!(e.rule_id.as_str(), id);
        prop_assert!(letters(set).contains(e.chosen));
        prop_assert!(last.is_none_or(|l| e.stream_index > l));
        last = Some(e.stream_index);
        state[e.column] = Some(e.chosen);
    }
    prop_assert!(trace.symbols_read() <= stream.len());
    prop_assert!(validate_trace(m, &trace, &out, &table).is_empty());
    prop_assert!(validate_stream_usage(&trace, stream, policy).is_empty());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn fill_properties(m in model(40, 4), policy in prop::sample::select(vec![
        MismatchHandling::SkipUntilAllowed,
        MismatchHandling::SubstituteFirstAllowed,
        MismatchHandling::FailOnMismatch,
    ])) {
        let spec = LSystemSpec::nucleotide_default();
        let stream = expand(&spec, 6).unwrap();
        check_fill(&m, &FillPolicy::new(policy), stream.as_bytes())?;
    }
}

#[test]
fn wide_model_fits_iteration_five() {
    let spec = LSystemSpec::nucleotide_default();
    let stream = expand(&spec, 5).unwrap();
    let table = ConstraintRuleTable::builtin();
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trio = synthetic_trio(&mut rng, 936, 108);
        let star = build_star(&trio).unwrap();
        assert_eq!(star.len(), 936);
        assert_eq!(star.gap_count(), 108);
        match fill(&star, stream.bytes(), &table, &FillPolicy::default()) {
            Ok((out, trace)) => {
                assert!(trace.symbols_read() <= 243);
                assert!(validate_trace(&star, &trace, &out, &table).is_empty());
            }
            Err(FillError::StreamExhausted { .. }) => {}
            Err(e) => panic!("seed {seed}: {e}"),
        }
    }
}
