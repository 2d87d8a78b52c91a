use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::bootstrap::mean;
use super::mann_whitney::{mann_whitney_u, TestResult};
use super::StatsError;

/// The four listening-test questions, rated on a 1-5 Likert scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SurveyQuestion {
    /// Overall quality.
    O,
    /// Impression.
    I,
    /// Structureness.
    S,
    /// Richness.
    R,
}

impl SurveyQuestion {
    pub const ALL: [SurveyQuestion; 4] = [SurveyQuestion::O, SurveyQuestion::I, SurveyQuestion::S, SurveyQuestion::R];
}

/// One row of the survey CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "PascalCase")]
pub struct SurveyResponse {
    #[serde(rename = "dataset")]
    pub dataset: String,
    #[serde(rename = "notation")]
    pub notation: String,
    pub o: u8,
    pub i: u8,
    pub s: u8,
    pub r: u8,
}

impl SurveyResponse {
    pub fn score(&self, q: SurveyQuestion) -> u8 {
        match q {
            SurveyQuestion::O => self.o,
            SurveyQuestion::I => self.i,
            SurveyQuestion::S => self.s,
            SurveyQuestion::R => self.r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyTest {
    pub dataset: String,
    pub question: SurveyQuestion,
    pub notation_a: String,
    pub notation_b: String,
    pub n_a: usize,
    pub n_b: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub result: TestResult,
}

/// Mann-Whitney test per dataset and question between every pair of
/// notations present for that dataset.
pub fn analyze_survey(responses: &[SurveyResponse]) -> Result<Vec<SurveyTest>, StatsError> {
    let mut groups: BTreeMap<&str, BTreeMap<&str, Vec<&SurveyResponse>>> = BTreeMap::new();
    for r in responses {
        groups
            .entry(r.dataset.as_str())
            .or_default()
            .entry(r.notation.as_str())
            .or_default()
            .push(r);
    }
    let mut out = Vec::new();
    for (dataset, by_notation) in &groups {
        let names: Vec<&&str> = by_notation.keys().collect();
        for (i, na) in names.iter().enumerate() {
            for nb in &names[i + 1..] {
                for q in SurveyQuestion::ALL {
                    let scores = |n: &str| -> Vec<f64> {
                        by_notation[n].iter().map(|r| f64::from(r.score(q))).collect()
                    };
                    let (a, b) = (scores(na), scores(nb));
                    out.push(SurveyTest {
                        dataset: dataset.to_string(),
                        question: q,
                        notation_a: na.to_string(),
                        notation_b: nb.to_string(),
                        n_a: a.len(),
                        n_b: b.len(),
                        mean_a: mean(&a),
                        mean_b: mean(&b),
                        result: mann_whitney_u(&a, &b)?,
                    });
                }
            }
        }
    }
    Ok(out)
}
