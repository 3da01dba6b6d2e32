//! Seeded stand-in for a census income table.

use std::io::Write;
use std::path::Path;

use faithex_core::rng::{substream, Purpose};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::{load_csv_reader, Dataset, HarnessError, LoadOptions};

pub const ADULT_COLUMNS: [&str; 12] = [
    "age",
    "workclass",
    "education",
    "education_num",
    "marital_status",
    "occupation",
    "relationship",
    "race",
    "sex",
    "capital_gain",
    "hours_per_week",
    "income",
];

pub const HIGH_INCOME: &str = ">50K";
pub const LOW_INCOME: &str = "<=50K";

fn weighted<'a>(rng: &mut impl Rng, items: &[(&'a str, f64)]) -> &'a str {
    items.choose_weighted(rng, |i| i.1).expect("positive weights").0
}

/// `n` rows of adult-like data, header first.
pub fn adult_like_rows(n: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = substream(seed, Purpose::Dataset, 0);
    let age_dist = Normal::new(39.0, 13.0).expect("valid");
    let hours_dist = Normal::new(40.0, 11.0).expect("valid");
    let noise = Normal::new(0.0, 1.0).expect("valid");
    let mut rows = vec![ADULT_COLUMNS.iter().map(|s| s.to_string()).collect()];
    for _ in 0..n {
        let age: f64 = age_dist.sample(&mut rng);
        let age = age.round().clamp(17.0, 90.0);
        let workclass = weighted(
            &mut rng,
            &[("Private", 0.7), ("Self-emp", 0.12), ("Government", 0.14), ("Without-pay", 0.04)],
        );
        let education = weighted(
            &mut rng,
            &[
                ("Dropout", 0.13),
                ("HS-grad", 0.32),
                ("Some-college", 0.27),
                ("Bachelors", 0.17),
                ("Masters", 0.08),
                ("Doctorate", 0.03),
            ],
        );
        let education_num = match education {
            "Dropout" => rng.random_range(4..=8),
            "HS-grad" => 9,
            "Some-college" => rng.random_range(10..=12),
            "Bachelors" => 13,
            "Masters" => 14,
            _ => 16,
        };
        let sex = if rng.random_bool(0.67) { "Male" } else { "Female" };
        let married_p = if age < 25.0 { 0.15 } else { 0.55 };
        let marital_status = if rng.random_bool(married_p) {
            "Married"
        } else {
            weighted(&mut rng, &[("Never-married", 0.6), ("Divorced", 0.3), ("Widowed", 0.1)])
        };
        let relationship = match (marital_status, sex) {
            ("Married", "Male") => "Husband",
            ("Married", _) => "Wife",
            _ if age < 25.0 && rng.random_bool(0.6) => "Own-child",
            _ => {
                if rng.random_bool(0.6) {
                    "Not-in-family"
                } else {
                    "Unmarried"
                }
            }
        };
        let skilled = education_num >= 13;
        let occupation = if skilled && rng.random_bool(0.6) {
            weighted(&mut rng, &[("Exec-managerial", 0.5), ("Prof-specialty", 0.5)])
        } else {
            weighted(
                &mut rng,
                &[
                    ("Exec-managerial", 0.08),
                    ("Prof-specialty", 0.08),
                    ("Craft-repair", 0.22),
                    ("Sales", 0.2),
                    ("Adm-clerical", 0.2),
                    ("Other-service", 0.22),
                ],
            )
        };
        let race = weighted(
            &mut rng,
            &[("White", 0.85), ("Black", 0.09), ("Asian-Pac-Islander", 0.03), ("Other", 0.03)],
        );
        let capital_gain = if rng.random_bool(0.08) {
            (rng.random_range(0.0f64..1.0).powi(2) * 20000.0 + 500.0).round()
        } else {
            0.0
        };
        let hours: f64 = hours_dist.sample(&mut rng);
        let hours = hours.round().clamp(1.0, 99.0);

        let score = -9.2
            + 0.05 * age.min(60.0)
            + 0.38 * education_num as f64
            + 2.0 * f64::from(u8::from(marital_status == "Married"))
            + 0.8 * f64::from(u8::from(matches!(occupation, "Exec-managerial" | "Prof-specialty")))
            + 0.03 * hours
            + 2.5 * f64::from(u8::from(capital_gain > 5000.0))
            + 0.3 * f64::from(u8::from(sex == "Male"))
            + 0.7 * noise.sample(&mut rng);
        let income = if score > 0.0 { HIGH_INCOME } else { LOW_INCOME };

        rows.push(vec![
            age.to_string(),
            workclass.into(),
            education.into(),
            education_num.to_string(),
            marital_status.into(),
            occupation.into(),
            relationship.into(),
            race.into(),
            sex.into(),
            capital_gain.to_string(),
            hours.to_string(),
            income.into(),
        ]);
    }
    rows
}

pub fn write_adult_like_csv(out: impl Write, n: usize, seed: u64) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for row in adult_like_rows(n, seed) {
        w.write_record(&row).map_err(|e| HarnessError::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_adult_like_file(path: impl AsRef<Path>, n: usize, seed: u64) -> Result<(), HarnessError> {
    write_adult_like_csv(std::fs::File::create(path)?, n, seed)
}

/// The synthetic table loaded as a dataset with `>50K` as label of interest.
pub fn adult_like_dataset(n: usize, seed: u64) -> Result<Dataset, HarnessError> {
    let mut buf = Vec::new();
    write_adult_like_csv(&mut buf, n, seed)?;
    load_csv_reader(
        buf.as_slice(),
        &LoadOptions {
            label_column: Some("income".into()),
            label_of_interest: Some(HIGH_INCOME.into()),
            seed,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_balance() {
        let d = adult_like_dataset(3000, 0).unwrap();
        assert_eq!(d.schema.len(), 11);
        assert_eq!(d.len(), 3000);
        let pos = d.labels.iter().filter(|l| *l == HIGH_INCOME).count() as f64 / 3000.0;
        assert!((0.15..0.4).contains(&pos), "{pos}");
        assert!(d.schema.get("age").unwrap().is_numeric());
        assert!(!d.schema.get("sex").unwrap().is_numeric());
    }

    #[test]
    fn seeded() {
        assert_eq!(adult_like_rows(50, 3), adult_like_rows(50, 3));
        assert_ne!(adult_like_rows(50, 3), adult_like_rows(50, 4));
    }
}
