use serde::Serialize;

use crate::alphabet::Alphabet;
use crate::error::AnalysisError;

const ENGLISH_TABLE: &str = include_str!("../../data/freq_en.txt");
const ENGLISH_CORPUS: &str = include_str!("../../data/corpus_en.txt");

/// Bundled English sample text (public domain), about 10k words.
pub fn english_corpus() -> &'static str {
    ENGLISH_CORPUS
}

/// Relative letter frequencies over an alphabet, in alphabet order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyTable {
    entries: Vec<(char, f64)>,
}

impl FrequencyTable {
    /// Normalizes raw weights (counts, percentages) so they sum to 1.
    ///
    /// Symbols missing from `weights` get 0. All-zero weights give an empty
    /// (all-zero) table.
    pub fn from_weights(alphabet: &Alphabet, weights: &[(char, f64)]) -> Result<Self, AnalysisError> {
        let mut values = vec![0.0; alphabet.len()];
        for (line, &(c, w)) in weights.iter().enumerate() {
            let idx = alphabet.index_of(alphabet.normalize(c)).ok_or_else(|| {
                AnalysisError::BadTable {
                    line: line + 1,
                    reason: format!("symbol {c:?} is not in the alphabet"),
                }
            })?;
            if !(w.is_finite() && w >= 0.0) {
                return Err(AnalysisError::BadTable {
                    line: line + 1,
                    reason: format!("frequency {w} is not a non-negative number"),
                });
            }
            values[idx] += w;
        }
        let total: f64 = values.iter().sum();
        if total > 0.0 {
            values.iter_mut().for_each(|v| *v /= total);
        }
        Ok(Self {
            entries: alphabet.symbols().iter().copied().zip(values).collect(),
        })
    }

    /// Parses `symbol,frequency` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self, AnalysisError> {
        let mut weights = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| AnalysisError::BadTable {
                line: n + 1,
                reason: reason.to_string(),
            };
            let (sym, freq) = line.split_once(',').ok_or_else(|| bad("expected symbol,frequency"))?;
            let mut chars = sym.trim().chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(bad("symbol must be a single character"));
            };
            let c = alphabet.normalize(c);
            if !alphabet.contains(c) {
                return Err(bad("symbol is not in the alphabet"));
            }
            let f: f64 = freq.trim().parse().map_err(|_| bad("frequency is not a number"))?;
            weights.push((c, f));
        }
        Self::from_weights(alphabet, &weights)
    }

    /// Average English letter frequencies over A-Z.
    pub fn english() -> Self {
        Self::parse(ENGLISH_TABLE, &Alphabet::latin()).expect("bundled table parses")
    }

    pub fn entries(&self) -> &[(char, f64)] {
        &self.entries
    }

    pub fn get(&self, symbol: char) -> f64 {
        self.entries
            .iter()
            .find(|(c, _)| *c == symbol)
            .map_or(0.0, |&(_, f)| f)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(|&(_, f)| f == 0.0)
    }

    /// Writes the table back as `symbol,frequency` lines.
    pub fn to_data_file(&self) -> String {
        self.entries
            .iter()
            .map(|(c, f)| format!("{c},{f}\n"))
            .collect()
    }
}

/// Counts every alphabet symbol of `text` (after case normalization);
/// other characters are ignored.
pub fn letter_frequencies(text: &str, alphabet: &Alphabet) -> Result<FrequencyTable, AnalysisError> {
    let counts = letter_counts(text, alphabet);
    if counts.iter().all(|&c| c == 0) {
        return Err(AnalysisError::EmptySample);
    }
    let weights: Vec<(char, f64)> = alphabet
        .symbols()
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| (s, c as f64))
        .collect();
    FrequencyTable::from_weights(alphabet, &weights)
}

pub(crate) fn letter_counts(text: &str, alphabet: &Alphabet) -> Vec<u64> {
    let mut counts = vec![0u64; alphabet.len()];
    for c in text.chars() {
        if let Some(i) = alphabet.index_of(alphabet.normalize(c)) {
            counts[i] += 1;
        }
    }
    counts
}

/// Most frequent first; equal frequencies keep alphabet order.
pub fn sort_by_frequency(table: &FrequencyTable) -> Vec<(char, f64)> {
    let mut sorted = table.entries.clone();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1));
    sorted
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramRow {
    pub symbol: char,
    pub bar: usize,
    pub frequency: f64,
}

/// One bar per symbol, scaled so the most frequent symbol spans `width` cells.
pub fn histogram_rows(table: &FrequencyTable, width: usize) -> Vec<HistogramRow> {
    let max = table.entries.iter().map(|e| e.1).fold(0.0, f64::max);
    table
        .entries
        .iter()
        .map(|&(symbol, frequency)| HistogramRow {
            symbol,
            bar: if max > 0.0 {
                (frequency / max * width as f64).round() as usize
            } else {
                0
            },
            frequency,
        })
        .collect()
}

/// Text-art rendering: `E | ##########  12.70%`.
pub fn render_histogram(rows: &[HistogramRow]) -> String {
    let width = rows.iter().map(|r| r.bar).max().unwrap_or(0);
    rows.iter()
        .map(|r| {
            format!(
                "{} | {}{} {:6.2}%\n",
                r.symbol,
                "#".repeat(r.bar),
                " ".repeat(width - r.bar),
                r.frequency * 100.0
            )
        })
        .collect()
}
