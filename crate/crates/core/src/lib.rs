//! Lexicostatistics toolkit: normalized edit distances between Swadesh word
//! lists, UPGMA trees calibrated to calendar dates, and the dialect-geography
//! analyses built on them (mean distances, reference-language ratios).

pub mod analysis;
pub mod distance;
pub mod error;
pub mod fixtures;
pub mod matrix;
pub mod phylogeny;
pub mod wordlist;

pub use distance::{build_matrix, language_distance, levenshtein, word_distance, LanguageDistance, WordDistance};
pub use error::{Error, ErrorKind, Result};
pub use matrix::{DistanceMatrix, MatrixFormat};
pub use phylogeny::{calibrate, to_separation_times, upgma, Calibration, DatedTree, PhyloTree};
pub use wordlist::{normalize_form, validate_corpus, Meaning, ParseOptions, WordForm, WordList};
