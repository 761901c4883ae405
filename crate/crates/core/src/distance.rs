//! Normalized Levenshtein word distance and the mean-over-meanings language
//! distance built on it.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::wordlist::{WordForm, WordList};

/// Edit distance over arbitrary symbols (unit-cost insert, delete, substitute).
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);
    // keep the row over the shorter input
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return long.len();
    }

    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, x) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in short.iter().enumerate() {
            let subst = diag + usize::from(x != y);
            diag = row[j + 1];
            row[j + 1] = subst.min(diag + 1).min(row[j] + 1);
        }
    }
    row[short.len()]
}

/// Distance between two normalized words: edit distance over the length of
/// the longer word. Lies in [0, 1] and is zero only for equal words.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct WordDistance(f64);

impl WordDistance {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn word_distance(a: &WordForm, b: &WordForm) -> WordDistance {
    let longest = a.len().max(b.len());
    // WordForm is never empty, so longest > 0
    WordDistance(levenshtein(a.scalars(), b.scalars()) as f64 / longest as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LanguageDistance {
    pub value: f64,
    /// Meanings filled in both lists; the effective M.
    pub slots_compared: usize,
}

/// Mean word distance over the meanings filled in both lists.
pub fn language_distance(a: &WordList, b: &WordList) -> Result<LanguageDistance> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (index, slot) in a.slots() {
        if let Some(other) = b.get(index) {
            sum += word_distance(&slot.form, other).value();
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::NoOverlap {
            a: a.language_id().to_owned(),
            b: b.language_id().to_owned(),
        });
    }
    Ok(LanguageDistance {
        value: sum / n as f64,
        slots_compared: n,
    })
}

/// Pairwise language distances, labelled in the order the lists are given.
///
/// Pairs are evaluated in parallel; every cell is a pure function of its two
/// lists, so the result does not depend on scheduling.
pub fn build_matrix(lists: &[WordList]) -> Result<DistanceMatrix> {
    if lists.len() < 2 {
        return Err(Error::TooFew {
            what: "word lists",
            needed: 2,
            got: lists.len(),
        });
    }
    let n = lists.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| language_distance(&lists[i], &lists[j]).map(|d| d.value))
        .collect::<Result<Vec<f64>>>()?;

    let labels = lists.iter().map(|l| l.language_id().to_owned()).collect();
    let mut m = DistanceMatrix::zeros(labels);
    for (&(i, j), v) in pairs.iter().zip(values) {
        m.set(i, j, v);
    }
    Ok(m)
}
