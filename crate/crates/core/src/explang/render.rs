use std::fmt::Write;

use super::ast::Explanation;
use super::ExplangError;

/// Canonical surface form of an explanation.
pub fn render(expl: &Explanation) -> String {
    let mut out = format!("If {}, then ", expl.clause);
    let not = if expl.label_negated { "not " } else { "" };
    match (&expl.target_name, expl.quantifier) {
        (target, Some(q)) => {
            let subject = target.as_deref().unwrap_or("it");
            let _ = write!(out, "{subject} is {q} {not}{}", expl.label);
        }
        (Some(target), None) => {
            let _ = write!(out, "{target} is {not}{}", expl.label);
        }
        (None, None) => {
            let _ = write!(out, "{not}{}", expl.label);
        }
    }
    out
}

/// Reads the quantifier as a percentage:
/// "95% of the time, the Income is >50K if Education not equal to Dropout".
pub fn render_with_confidence(expl: &Explanation) -> Result<String, ExplangError> {
    let q = expl.quantifier.ok_or(ExplangError::MissingQuantifier)?;
    let pct = (q.confidence() * 100.0).round() as i64;
    let subject = match &expl.target_name {
        Some(t) => format!("the {t}"),
        None => "it".to_string(),
    };
    let not = if expl.label_negated { "not " } else { "" };
    Ok(format!(
        "{pct}% of the time, {subject} is {not}{} if {}",
        expl.label, expl.clause
    ))
}

impl std::fmt::Display for Explanation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&render(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explang::{parse, Comparator, Condition, Quantifier};

    #[test]
    fn quantified_template() {
        let e = Explanation::new(
            Condition::new("vpgu", Comparator::Eq, "antartica").unwrap(),
            "blicket",
        )
        .unwrap()
        .with_quantifier(Some(Quantifier::Definitely));
        assert_eq!(render(&e), "If vpgu equal to antartica, then it is definitely blicket");
    }

    #[test]
    fn ngt_keeps_its_surface_form() {
        let e = Explanation::new(Condition::new("pdsu", Comparator::Ngt, 1020.0).unwrap(), "no")
            .unwrap()
            .with_quantifier(Some(Quantifier::Certainly));
        assert_eq!(render(&e), "If pdsu not greater than 1020, then it is certainly no");
    }

    #[test]
    fn confidence_rendering() {
        let e = parse("If Education not equal to Dropout, then Income is certainly >50K").unwrap();
        assert_eq!(
            render_with_confidence(&e).unwrap(),
            "95% of the time, the Income is >50K if Education not equal to Dropout"
        );
        let e = parse("If a equal to b, then it is always yes").unwrap();
        assert!(render_with_confidence(&e).unwrap().starts_with("100% of the time"));
        let e = parse("If twqk equal to no, then it is seldom fem").unwrap();
        assert!(render_with_confidence(&e).unwrap().starts_with("10% of the time"));
        let e = parse("If twqk equal to no, then fem").unwrap();
        assert!(matches!(render_with_confidence(&e), Err(ExplangError::MissingQuantifier)));
    }

    #[test]
    fn quantifier_with_negated_label() {
        let e = parse("If a equal to b, then it is rarely not yes").unwrap();
        assert!(e.label_negated);
        assert_eq!(e.quantifier, Some(Quantifier::Rarely));
        assert_eq!(render(&e), "If a equal to b, then it is rarely not yes");
    }

    #[test]
    fn target_without_quantifier() {
        let e = parse("If age greater than 40, then patient is not yes").unwrap();
        assert_eq!(e.target_name.as_deref(), Some("patient"));
        assert!(e.label_negated);
        assert_eq!(render(&e), "If age greater than 40, then patient is not yes");
    }
}
