use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ExplangError;

/// Hedging word attached to an explanation's label.
///
/// Each word maps to a fixed confidence. Variants are listed from the most to
/// the least confident, and [`Quantifier::ALL`] preserves that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    Always,
    Certainly,
    Definitely,
    Usually,
    Generally,
    Likely,
    Often,
    Frequently,
    Sometimes,
    Occasionally,
    Rarely,
    Seldom,
    Never,
}

impl Quantifier {
    /// Vocabulary ordered by non-increasing confidence.
    pub const ALL: [Quantifier; 13] = [
        Quantifier::Always,
        Quantifier::Certainly,
        Quantifier::Definitely,
        Quantifier::Usually,
        Quantifier::Generally,
        Quantifier::Likely,
        Quantifier::Often,
        Quantifier::Frequently,
        Quantifier::Sometimes,
        Quantifier::Occasionally,
        Quantifier::Rarely,
        Quantifier::Seldom,
        Quantifier::Never,
    ];

    pub fn word(self) -> &'static str {
        match self {
            Quantifier::Always => "always",
            Quantifier::Certainly => "certainly",
            Quantifier::Definitely => "definitely",
            Quantifier::Usually => "usually",
            Quantifier::Generally => "generally",
            Quantifier::Likely => "likely",
            Quantifier::Often => "often",
            Quantifier::Frequently => "frequently",
            Quantifier::Sometimes => "sometimes",
            Quantifier::Occasionally => "occasionally",
            Quantifier::Rarely => "rarely",
            Quantifier::Seldom => "seldom",
            Quantifier::Never => "never",
        }
    }

    /// Probability that the stated label holds when the clause fires.
    pub fn confidence(self) -> f64 {
        match self {
            Quantifier::Always => 1.00,
            Quantifier::Certainly => 0.95,
            Quantifier::Definitely => 0.95,
            Quantifier::Usually => 0.90,
            Quantifier::Generally => 0.85,
            Quantifier::Likely => 0.70,
            Quantifier::Often => 0.70,
            Quantifier::Frequently => 0.65,
            Quantifier::Sometimes => 0.50,
            Quantifier::Occasionally => 0.40,
            Quantifier::Rarely => 0.15,
            Quantifier::Seldom => 0.10,
            Quantifier::Never => 0.00,
        }
    }

    /// Case-insensitive lookup of a quantifier word.
    pub fn from_word(word: &str) -> Result<Self, ExplangError> {
        Quantifier::ALL
            .iter()
            .copied()
            .find(|q| q.word().eq_ignore_ascii_case(word))
            .ok_or_else(|| ExplangError::UnknownQuantifier(word.to_string()))
    }

    /// Quantifier whose confidence is closest to `p`; ties go to the more
    /// confident word, then to the earlier word in [`Quantifier::ALL`].
    pub fn nearest(p: f64) -> Self {
        let mut best = Quantifier::ALL[0];
        let mut best_dist = f64::INFINITY;
        for q in Quantifier::ALL {
            let dist = (q.confidence() - p).abs();
            // 1e-12 absorbs representation error so 0.95 vs 0.95 counts as a tie.
            if dist < best_dist - 1e-12
                || ((dist - best_dist).abs() <= 1e-12 && q.confidence() > best.confidence())
            {
                best = q;
                best_dist = dist;
            }
        }
        best
    }
}

/// Confidence value for a quantifier word.
pub fn quantifier_confidence(word: &str) -> Result<f64, ExplangError> {
    Quantifier::from_word(word).map(Quantifier::confidence)
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

impl FromStr for Quantifier {
    type Err = ExplangError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Quantifier::from_word(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchored_and_boundary_constants() {
        assert_eq!(quantifier_confidence("certainly").unwrap(), 0.95);
        assert_eq!(quantifier_confidence("always").unwrap(), 1.0);
        assert_eq!(quantifier_confidence("never").unwrap(), 0.0);
        assert_eq!(quantifier_confidence("Seldom").unwrap(), 0.10);
    }

    #[test]
    fn unknown_word() {
        assert!(matches!(
            quantifier_confidence("perhaps"),
            Err(ExplangError::UnknownQuantifier(w)) if w == "perhaps"
        ));
    }

    #[test]
    fn monotone_along_vocabulary() {
        for pair in Quantifier::ALL.windows(2) {
            assert!(pair[0].confidence() >= pair[1].confidence(), "{pair:?}");
        }
    }

    #[test]
    fn nearest_confidence() {
        assert_eq!(Quantifier::nearest(1.0), Quantifier::Always);
        assert_eq!(Quantifier::nearest(0.95), Quantifier::Certainly);
        assert_eq!(Quantifier::nearest(0.12), Quantifier::Seldom);
        assert_eq!(Quantifier::nearest(0.0), Quantifier::Never);
        // 0.675 sits halfway between frequently (0.65) and likely (0.70).
        assert_eq!(Quantifier::nearest(0.675), Quantifier::Likely);
    }
}
