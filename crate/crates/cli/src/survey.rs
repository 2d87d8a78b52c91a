//! Listening-study analysis from a response CSV.
//!
//! The CSV has the columns `dataset, notation, O, I, S, R`, one row per
//! rated piece, scores on a 1-5 scale. Notation labels that name a known
//! representation are normalized (`original` becomes `onoff`).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use structok_core::stats::{analyze_survey, mean, SurveyQuestion, SurveyResponse, TestMethod};
use structok_core::tokenizer::RepresentationKind;

use crate::{io, tables, CliError};

pub const AVERAGE_GROUP: &str = "Average";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalformedRow {
    pub line: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NotationMeans {
    pub notation: String,
    pub n: usize,
    /// Means for O, I, S, R in that order.
    pub means: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurveyCellStatus {
    Ok,
    /// A group has fewer than two ratings; no test is run.
    InsufficientN,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyCell {
    pub question: SurveyQuestion,
    pub notation_a: String,
    pub notation_b: String,
    pub n_a: usize,
    pub n_b: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub u_statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub method: Option<TestMethod>,
    pub significant: bool,
    pub status: SurveyCellStatus,
}

impl SurveyCell {
    /// The notation with the higher mean when the difference is significant.
    pub fn winner(&self) -> Option<&str> {
        if !self.significant || self.mean_a == self.mean_b {
            return None;
        }
        Some(if self.mean_a > self.mean_b {
            &self.notation_a
        } else {
            &self.notation_b
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyGroup {
    pub dataset: String,
    pub notations: Vec<NotationMeans>,
    pub tests: Vec<SurveyCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyReport {
    pub rows: usize,
    pub malformed: Vec<MalformedRow>,
    /// One group per dataset, then the pooled `Average` group.
    pub groups: Vec<SurveyGroup>,
}

fn canonical_notation(label: &str) -> String {
    label
        .parse::<RepresentationKind>()
        .map_or_else(|_| label.trim().to_string(), |k| k.name().to_string())
}

/// Known notations first in their usual order, then the rest by name.
fn notation_order(name: &str) -> (usize, String) {
    let rank = RepresentationKind::ALL
        .iter()
        .position(|k| k.name() == name)
        .unwrap_or(RepresentationKind::ALL.len());
    (rank, name.to_string())
}

/// Reads responses, collecting rows that fail to parse or hold scores
/// outside 1-5. Line numbers count the header as line 1.
pub fn read_responses(text: &str) -> (Vec<SurveyResponse>, Vec<MalformedRow>) {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut ok = Vec::new();
    let mut bad = Vec::new();
    for result in reader.deserialize::<SurveyResponse>() {
        match result {
            Ok(mut r) => {
                let line = ok.len() as u64 + bad.len() as u64 + 2;
                if let Some(q) = SurveyQuestion::ALL.iter().find(|&&q| !(1..=5).contains(&r.score(q))) {
                    bad.push(MalformedRow {
                        line,
                        error: format!("{q:?} score {} outside 1-5", r.score(*q)),
                    });
                    continue;
                }
                r.notation = canonical_notation(&r.notation);
                ok.push(r);
            }
            Err(e) => {
                let line = e
                    .position()
                    .map_or(ok.len() as u64 + bad.len() as u64 + 2, |p| p.line());
                bad.push(MalformedRow {
                    line,
                    error: e.to_string(),
                });
            }
        }
    }
    (ok, bad)
}

fn group(dataset: &str, responses: &[SurveyResponse]) -> Result<SurveyGroup> {
    let mut by_notation: BTreeMap<(usize, String), Vec<&SurveyResponse>> = BTreeMap::new();
    for r in responses {
        by_notation.entry(notation_order(&r.notation)).or_default().push(r);
    }
    let notations: Vec<NotationMeans> = by_notation
        .iter()
        .map(|((_, name), rs)| {
            let m = |q: SurveyQuestion| mean(&rs.iter().map(|r| f64::from(r.score(q))).collect::<Vec<_>>());
            NotationMeans {
                notation: name.clone(),
                n: rs.len(),
                means: SurveyQuestion::ALL.map(m),
            }
        })
        .collect();
    let mut tests: Vec<SurveyCell> = analyze_survey(responses)?
        .into_iter()
        .map(|t| {
            let enough = t.n_a >= 2 && t.n_b >= 2;
            SurveyCell {
                question: t.question,
                notation_a: t.notation_a,
                notation_b: t.notation_b,
                n_a: t.n_a,
                n_b: t.n_b,
                mean_a: t.mean_a,
                mean_b: t.mean_b,
                u_statistic: enough.then_some(t.result.u_statistic),
                p_value: enough.then_some(t.result.p_value),
                method: enough.then_some(t.result.method),
                significant: enough && t.result.significant,
                status: if enough {
                    SurveyCellStatus::Ok
                } else {
                    SurveyCellStatus::InsufficientN
                },
            }
        })
        .collect();
    tests.sort_by(|x, y| {
        (notation_order(&x.notation_a), notation_order(&x.notation_b), x.question as usize).cmp(&(
            notation_order(&y.notation_a),
            notation_order(&y.notation_b),
            y.question as usize,
        ))
    });
    Ok(SurveyGroup {
        dataset: dataset.to_string(),
        notations,
        tests,
    })
}

pub fn survey_report(text: &str) -> Result<SurveyReport> {
    let (responses, malformed) = read_responses(text);
    if responses.is_empty() {
        return Err(CliError::EmptySurvey.into());
    }
    let mut datasets: BTreeMap<&str, Vec<SurveyResponse>> = BTreeMap::new();
    for r in &responses {
        datasets.entry(r.dataset.as_str()).or_default().push(r.clone());
    }
    let mut groups = datasets
        .iter()
        .map(|(d, rs)| group(d, rs))
        .collect::<Result<Vec<_>>>()?;
    groups.push(group(AVERAGE_GROUP, &responses)?);
    Ok(SurveyReport {
        rows: responses.len(),
        malformed,
        groups,
    })
}

pub const SURVEY_JSON: &str = "survey.json";
pub const TABLE5_TXT: &str = "table5.txt";

/// Table-5 analysis of a response CSV, written as JSON and text under `out`.
pub fn cmd_survey(csv_path: &Path, out: &Path, cfg: &crate::RunConfig) -> Result<SurveyReport> {
    let text = fs::read_to_string(csv_path).with_context(|| format!("reading {}", csv_path.display()))?;
    let report = survey_report(&text)?;
    io::write_json(&out.join(SURVEY_JSON), &report)?;
    io::write_bytes(&out.join(TABLE5_TXT), tables::table5(&report).as_bytes())?;
    cfg.write_to(out)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn malformed_rows_keep_line_numbers() {
        let csv = "dataset,notation,O,I,S,R\n\
                   pop,original,3,3,3,3\n\
                   pop,explicit,x,3,3,3\n\
                   pop,explicit,4,4,9,4\n\
                   pop,explicit,4,4,4,4\n";
        let (ok, bad) = read_responses(csv);
        assert_eq!(ok.len(), 2);
        assert_eq!(ok[0].notation, "onoff");
        assert_eq!(bad.iter().map(|b| b.line).collect::<Vec<_>>(), vec![3, 4]);
    }

    #[test]
    fn single_rows_are_insufficient() {
        let csv = "dataset,notation,O,I,S,R\npop,onoff,1,2,3,4\npop,explicit,5,4,3,2\n";
        let r = survey_report(csv).unwrap();
        let pop = &r.groups[0];
        assert_eq!(pop.notations[0].notation, "onoff");
        assert_eq!(pop.notations[0].means, [1.0, 2.0, 3.0, 4.0]);
        assert!(pop.tests.iter().all(|t| t.status == SurveyCellStatus::InsufficientN && t.p_value.is_none()));
        assert_eq!(r.groups.last().unwrap().dataset, AVERAGE_GROUP);
    }
}
