//! BLEU and ROUGE between generated and reference explanation strings.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextMetricError {
    #[error("empty input")]
    EmptyInput,
}

/// Lowercased tokens. Whitespace separates words; leading and trailing
/// punctuation is split off into single-character tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSeq {
    pub tokens: Vec<String>,
}

impl TokenSeq {
    pub fn new(text: &str) -> Self {
        let mut tokens = Vec::new();
        for word in text.split_whitespace() {
            let word = word.to_lowercase();
            let chars: Vec<char> = word.chars().collect();
            let lead = chars.iter().take_while(|c| c.is_ascii_punctuation()).count();
            if lead == chars.len() {
                tokens.extend(chars.iter().map(|c| c.to_string()));
                continue;
            }
            let trail = chars.iter().rev().take_while(|c| c.is_ascii_punctuation()).count();
            tokens.extend(chars[..lead].iter().map(|c| c.to_string()));
            tokens.push(chars[lead..chars.len() - trail].iter().collect());
            tokens.extend(chars[chars.len() - trail..].iter().map(|c| c.to_string()));
        }
        TokenSeq { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    fn ngrams(&self, n: usize) -> HashMap<&[String], usize> {
        let mut counts = HashMap::new();
        if n > 0 && self.tokens.len() >= n {
            for w in self.tokens.windows(n) {
                *counts.entry(w).or_insert(0) += 1;
            }
        }
        counts
    }
}

impl From<&str> for TokenSeq {
    fn from(s: &str) -> Self {
        TokenSeq::new(s)
    }
}

const MAX_ORDER: usize = 4;

/// Sentence BLEU with clipped n-gram precision for n = 1..4, uniform
/// weights and the brevity penalty against the closest reference length.
/// Orders above one use add-one smoothing.
pub fn bleu(candidate: &TokenSeq, references: &[TokenSeq]) -> Result<f64, TextMetricError> {
    if candidate.is_empty() || references.is_empty() || references.iter().any(TokenSeq::is_empty) {
        return Err(TextMetricError::EmptyInput);
    }
    let mut log_sum = 0.0;
    for n in 1..=MAX_ORDER {
        let cand = candidate.ngrams(n);
        let total: usize = cand.values().sum();
        let mut max_ref: HashMap<&[String], usize> = HashMap::new();
        for r in references {
            for (g, c) in r.ngrams(n) {
                let e = max_ref.entry(g).or_insert(0);
                *e = (*e).max(c);
            }
        }
        let matched: usize = cand
            .iter()
            .map(|(g, &c)| c.min(max_ref.get(g).copied().unwrap_or(0)))
            .sum();
        let p = if n == 1 {
            if matched == 0 {
                return Ok(0.0);
            }
            matched as f64 / total as f64
        } else {
            (matched + 1) as f64 / (total + 1) as f64
        };
        log_sum += p.ln() / MAX_ORDER as f64;
    }
    let c = candidate.len();
    let r = references
        .iter()
        .map(TokenSeq::len)
        .min_by_key(|&len| (len.abs_diff(c), len))
        .unwrap_or(c);
    let bp = if c > r {
        1.0
    } else {
        (1.0 - r as f64 / c as f64).exp()
    };
    Ok(bp * log_sum.exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    fn from_counts(overlap: usize, cand: usize, reference: usize) -> Self {
        let precision = if cand == 0 { 0.0 } else { overlap as f64 / cand as f64 };
        let recall = if reference == 0 { 0.0 } else { overlap as f64 / reference as f64 };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        RougeScore { precision, recall, f1 }
    }
}

/// ROUGE-N overlap with clipped counts, `n` in {1, 2}.
pub fn rouge_n(candidate: &TokenSeq, reference: &TokenSeq, n: usize) -> Result<RougeScore, TextMetricError> {
    if candidate.is_empty() || reference.is_empty() || !(1..=2).contains(&n) {
        return Err(TextMetricError::EmptyInput);
    }
    let c = candidate.ngrams(n);
    let r = reference.ngrams(n);
    let overlap = c
        .iter()
        .map(|(g, &k)| k.min(r.get(g).copied().unwrap_or(0)))
        .sum();
    Ok(RougeScore::from_counts(
        overlap,
        c.values().sum(),
        r.values().sum(),
    ))
}

/// Length of the longest common subsequence, two-row dynamic program.
pub fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// ROUGE-L F1 from the longest common subsequence.
pub fn rouge_l(candidate: &TokenSeq, reference: &TokenSeq) -> Result<f64, TextMetricError> {
    if candidate.is_empty() || reference.is_empty() {
        return Err(TextMetricError::EmptyInput);
    }
    let l = lcs_len(&candidate.tokens, &reference.tokens);
    Ok(RougeScore::from_counts(l, candidate.len(), reference.len()).f1)
}
