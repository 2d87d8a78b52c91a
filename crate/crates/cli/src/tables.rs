//! Plain-text tables laid out like the report tables of the study: 95% CI
//! pairs, improvement percentages, and a `Sig.` marker column naming the
//! cells that differ significantly. Those cells also carry a `*`.

use structok_core::metrics::MetricKind;
use structok_core::stats::{ComparisonCell, ComparisonTable, IntervalEstimate};
use structok_core::tokenizer::RepresentationKind;

use crate::commands::CorpusStatsReport;
use crate::experiment::ExperimentReport;
use crate::survey::SurveyReport;

/// Left-aligned first column, right-aligned others, two spaces apart.
fn render(title: &str, rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = format!("{title}\n");
    let total: usize = widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1);
    for (i, row) in rows.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if c == 0 {
                    format!("{s:<w$}", w = widths[c])
                } else {
                    format!("{s:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
        if i == 0 {
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
    }
    out
}

fn ci(ci: Option<&IntervalEstimate>) -> String {
    ci.map_or("n/a".into(), |c| format!("({:.2}, {:.2})", c.low, c.high))
}

fn pct(v: Option<f64>) -> String {
    v.map_or("n/a".into(), |v| format!("{v:.2}%"))
}

fn star(s: String, on: bool) -> String {
    if on {
        format!("{s}*")
    } else {
        s
    }
}

/// Which side of a significant cell is better (higher mean); `None` when not
/// significant.
fn better_b(c: &ComparisonCell) -> Option<bool> {
    match (&c.ci_a, &c.ci_b) {
        (Some(a), Some(b)) if c.significant => Some(b.estimate > a.estimate),
        _ => None,
    }
}

fn ci_pair(c: Option<&ComparisonCell>) -> (String, String) {
    let Some(c) = c else {
        return ("n/a".into(), "n/a".into());
    };
    let better = better_b(c);
    (
        star(ci(c.ci_a.as_ref()), better == Some(false)),
        star(ci(c.ci_b.as_ref()), better == Some(true)),
    )
}

fn heading(kind: RepresentationKind) -> &'static str {
    match kind {
        RepresentationKind::OnOff => "Original",
        RepresentationKind::ExplicitDuration => "Explicit",
    }
}

pub fn table1(r: &CorpusStatsReport) -> String {
    let mut rows = vec![std::iter::once(String::new())
        .chain(r.notations.iter().map(|n| format!("{} ({})", r.dataset, heading(n.kind))))
        .collect::<Vec<_>>()];
    let counts = [
        ("Total Files", r.files.total),
        ("Train Files", r.files.train),
        ("Val. Files", r.files.validation),
        ("Test Files", r.files.test),
    ];
    for (label, n) in counts {
        rows.push(
            std::iter::once(label.to_string())
                .chain(r.notations.iter().map(|_| n.to_string()))
                .collect(),
        );
    }
    rows.push(
        std::iter::once("Avg. Length".to_string())
            .chain(r.notations.iter().map(|n| format!("{:.0}", n.mean_length)))
            .collect(),
    );
    rows.push(
        std::iter::once("Avg. Uniques".to_string())
            .chain(r.notations.iter().map(|n| format!("{:.0}", n.mean_unique)))
            .collect(),
    );
    let mut out = render("Table 1. Corpus statistics (lengths in tokens)", &rows);
    for m in &r.missing {
        out.push_str(&format!("missing: {} ({})\n", m.path, m.error));
    }
    out
}

/// Structureness indicators of the generated pieces.
pub fn table2(dataset: &str, t: &ComparisonTable) -> String {
    let bands = [
        (MetricKind::SiShort, "Short"),
        (MetricKind::SiMedium, "Medium"),
        (MetricKind::SiLong, "Long"),
    ];
    let mut header = vec!["Dataset".to_string()];
    for side in ["Original", "Explicit", "Improvement"] {
        header.extend(bands.iter().map(|(_, b)| format!("{side} {b}")));
    }
    header.push("Sig.".into());
    let mut row = vec![dataset.to_string()];
    let pairs: Vec<(String, String)> = bands.iter().map(|(m, _)| ci_pair(t.cell(*m))).collect();
    row.extend(pairs.iter().map(|p| p.0.clone()));
    row.extend(pairs.iter().map(|p| p.1.clone()));
    let mut sig = Vec::new();
    for (m, name) in bands {
        let c = t.cell(m);
        let on = c.is_some_and(|c| c.significant);
        row.push(star(pct(c.and_then(|c| c.improvement_pct)), on));
        if on {
            sig.push(name);
        }
    }
    row.push(sig.join(" "));
    render(
        &format!("Table 2. Structureness indicators, {:.0}% CI", 100.0 * t.level),
        &[header, row],
    )
}

/// Pitch-class entropy and consistency of real and generated pieces.
pub fn table3(dataset: &str, real: &ComparisonTable, generated: &ComparisonTable) -> String {
    let header = [
        "Metric",
        "Dataset",
        "Original Real",
        "Original Generated",
        "Explicit Real",
        "Explicit Generated",
        "Sig.",
    ]
    .map(String::from)
    .to_vec();
    let mut rows = vec![header];
    for (m, name) in [(MetricKind::Entropy, "Entropy"), (MetricKind::Consistency, "Consistency")] {
        let (ra, rb) = ci_pair(real.cell(m));
        let (ga, gb) = ci_pair(generated.cell(m));
        let mut sig = Vec::new();
        if real.cell(m).is_some_and(|c| c.significant) {
            sig.push("Real");
        }
        if generated.cell(m).is_some_and(|c| c.significant) {
            sig.push("Generated");
        }
        rows.push(vec![name.into(), dataset.into(), ra, ga, rb, gb, sig.join(" ")]);
    }
    render(
        &format!("Table 3. Pitch class entropy and consistency, {:.0}% CI", 100.0 * generated.level),
        &rows,
    )
}

/// Compression ratios of the generated pieces.
pub fn table4(dataset: &str, t: &ComparisonTable) -> String {
    let c = t.cell(MetricKind::CompressionRatio);
    let (a, b) = ci_pair(c);
    let sig = if c.is_some_and(|c| c.significant) { "*" } else { "" };
    render(
        &format!("Table 4. Compression ratio, {:.0}% CI", 100.0 * t.level),
        &[
            ["Dataset", "Original", "Explicit", "Sig."].map(String::from).to_vec(),
            vec![dataset.into(), a, b, sig.into()],
        ],
    )
}

pub fn experiment(r: &ExperimentReport) -> String {
    [
        table1(&r.corpus),
        table2(&r.dataset, &r.generated),
        table3(&r.dataset, &r.real, &r.generated),
        table4(&r.dataset, &r.generated),
    ]
    .join("\n")
}

/// Every metric of a two-set comparison, one row each.
pub fn comparison(t: &ComparisonTable) -> String {
    let mut rows = vec![vec![
        "Metric".to_string(),
        t.label_a.clone(),
        t.label_b.clone(),
        "Improvement".into(),
        "Sig.".into(),
    ]];
    for c in &t.cells {
        let (a, b) = ci_pair(Some(c));
        rows.push(vec![
            c.metric.name().into(),
            a,
            b,
            star(pct(c.improvement_pct), c.significant),
            if c.significant { "*".into() } else { String::new() },
        ]);
    }
    render(
        &format!("Comparison, {:.0}% CI, {} resamples", 100.0 * t.level, t.resamples),
        &rows,
    )
}

/// Likert means per dataset and notation, marking the better notation of
/// every significant question.
pub fn table5(r: &SurveyReport) -> String {
    let qs = ["O", "I", "S", "R"];
    let mut notations: Vec<String> = Vec::new();
    for g in &r.groups {
        for n in &g.notations {
            if !notations.contains(&n.notation) {
                notations.push(n.notation.clone());
            }
        }
    }
    let label = |n: &str| {
        n.parse::<RepresentationKind>()
            .map_or_else(|_| n.to_string(), |k| heading(k).to_string())
    };
    let mut header = vec!["Dataset".to_string()];
    for n in &notations {
        header.extend(qs.iter().map(|q| format!("{} {q}", label(n))));
    }
    header.push("Sig.".into());
    let mut rows = vec![header];
    for g in &r.groups {
        let mut row = vec![g.dataset.clone()];
        let mut sig = Vec::new();
        for n in &notations {
            let means = g.notations.iter().find(|m| &m.notation == n);
            for (qi, q) in qs.iter().enumerate() {
                let wins = g.tests.iter().any(|t| t.question as usize == qi && t.winner() == Some(n.as_str()));
                if wins {
                    sig.push(format!("{}:{q}", label(n)));
                }
                row.push(star(means.map_or("n/a".into(), |m| format!("{:.2}", m.means[qi])), wins));
            }
        }
        row.push(sig.join(" "));
        rows.push(row);
    }
    let mut out = render("Table 5. Mean Likert-5 scores (Mann-Whitney U, p < 0.05)", &rows);
    let insufficient = r
        .groups
        .iter()
        .flat_map(|g| &g.tests)
        .filter(|t| t.p_value.is_none())
        .count();
    if insufficient > 0 {
        out.push_str(&format!("{insufficient} tests skipped: fewer than 2 ratings in a group\n"));
    }
    for m in &r.malformed {
        out.push_str(&format!("line {}: {}\n", m.line, m.error));
    }
    out
}
