//! Synthesizing olfactory-receptor-like genes from a D0L-system.
//!
//! The pipeline takes pre-aligned, equal-length subfamily genes, collapses
//! them to a star-model consensus (disagreeing columns become gaps), fills
//! the gaps from the symbol stream of a nucleotide L-system under context
//! rules, and checks the result for stop codons and identity to its inputs.
//!
//! ```
//! use lstar::grammar::{expand, LSystemSpec};
//!
//! let spec = LSystemSpec::nucleotide_default();
//! assert_eq!(expand(&spec, 2).unwrap(), "CCACCACTG");
//! ```

pub mod gapfill;
pub mod grammar;
pub mod nucleotide;
pub mod pipeline;
pub mod seqcheck;
pub mod seqio;
pub mod starmodel;

pub use nucleotide::{Base, BaseSet, NucleotideSequence};
