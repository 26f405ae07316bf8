//! Benchmark score adjustment: ingest per-domain scores, weight them the
//! way deployment traffic actually lands, flag dispersion, and emit a
//! four-part report.
//!
//! A headline benchmark average weights domains by the benchmark's own mix.
//! The tools here reweight by deployment shares, quantify jaggedness (the
//! `1 + CV^2` penalty that separates experienced from benchmark
//! reliability), and fold in a separate tail-risk module score.

use serde::Deserialize;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("line {line}: {message}")]
    BadRow { line: usize, message: String },
    #[error("{0}")]
    BadTable(String),
    #[error("{which} weights must sum to one within 1e-9, got {sum}")]
    BadWeightSum { which: &'static str, sum: f64 },
    #[error("invalid JSON: {0}")]
    BadJson(String),
    #[error("invalid mixture: {0}")]
    BadMixture(String),
    #[error("could not read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One input row. Weight fields may be omitted; a column must then be
/// omitted in every row and defaults to uniform.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreRow {
    pub domain: String,
    pub score: f64,
    #[serde(default)]
    pub bench_weight: Option<f64>,
    #[serde(default)]
    pub dep_weight: Option<f64>,
}

/// A normalized row: weights resolved, table sorted by domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainRow {
    pub domain: String,
    pub score: f64,
    pub bench_weight: f64,
    pub dep_weight: f64,
}

/// Validated per-domain scores with benchmark and deployment weights.
/// Rows are kept sorted by domain id, so any input row order produces the
/// same table.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkTable {
    rows: Vec<DomainRow>,
}

pub const CSV_HEADER: &str = "domain,score,bench_weight,dep_weight";

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

fn resolve_weights(
    raw: &[Option<f64>],
    which: &'static str,
    n: usize,
) -> Result<Vec<f64>, BenchError> {
    let provided = raw.iter().filter(|w| w.is_some()).count();
    if provided == 0 {
        return Ok(vec![1.0 / n as f64; n]);
    }
    if provided != n {
        return Err(BenchError::BadTable(format!(
            "{which} weights given for {provided} of {n} rows; provide all or none"
        )));
    }
    let weights: Vec<f64> = raw.iter().map(|w| w.unwrap()).collect();
    if let Some(bad) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(BenchError::BadTable(format!(
            "{which} weights must be finite and nonnegative, got {bad}"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(BenchError::BadWeightSum { which, sum });
    }
    Ok(weights)
}

impl BenchmarkTable {
    pub fn new(rows: Vec<ScoreRow>) -> Result<Self, BenchError> {
        if rows.is_empty() {
            return Err(BenchError::BadTable("table must have at least one domain".to_string()));
        }
        for row in &rows {
            if row.domain.is_empty() {
                return Err(BenchError::BadTable("domain ids must be nonempty".to_string()));
            }
            if row.domain.contains([',', '"', '\n', '\r']) {
                return Err(BenchError::BadTable(format!(
                    "domain id {:?} contains CSV delimiter characters",
                    row.domain
                )));
            }
            if !(row.score.is_finite() && (0.0..=1.0).contains(&row.score)) {
                return Err(BenchError::BadTable(format!(
                    "score for {} must lie in [0, 1], got {}",
                    row.domain, row.score
                )));
            }
        }
        let n = rows.len();
        let bench_raw: Vec<Option<f64>> = rows.iter().map(|r| r.bench_weight).collect();
        let dep_raw: Vec<Option<f64>> = rows.iter().map(|r| r.dep_weight).collect();
        let bench = resolve_weights(&bench_raw, "benchmark", n)?;
        let dep = resolve_weights(&dep_raw, "deployment", n)?;
        let mut resolved: Vec<DomainRow> = rows
            .into_iter()
            .zip(bench)
            .zip(dep)
            .map(|((row, bench_weight), dep_weight)| DomainRow {
                domain: row.domain,
                score: row.score,
                bench_weight,
                dep_weight,
            })
            .collect();
        resolved.sort_by(|a, b| a.domain.cmp(&b.domain));
        if let Some(w) = resolved.windows(2).find(|w| w[0].domain == w[1].domain) {
            return Err(BenchError::BadTable(format!("duplicate domain id {:?}", w[0].domain)));
        }
        Ok(Self { rows: resolved })
    }

    /// Parse the canonical CSV schema. The header must be `domain,score`
    /// optionally extended by `bench_weight` and `dep_weight` columns;
    /// empty weight cells mean "not provided".
    pub fn from_csv_str(content: &str) -> Result<Self, BenchError> {
        let mut lines = content.lines().enumerate();
        let Some((_, header)) = lines.next() else {
            return Err(BenchError::BadTable("empty input".to_string()));
        };
        let header = header.trim_end_matches('\r');
        let columns: usize = match header {
            "domain,score" => 2,
            "domain,score,bench_weight" => 3,
            h if h == CSV_HEADER => 4,
            other => {
                return Err(BenchError::BadRow {
                    line: 1,
                    message: format!("header must be {CSV_HEADER:?} or a prefix, got {other:?}"),
                })
            }
        };
        let mut rows = Vec::new();
        for (idx, raw) in lines {
            let line = idx + 1;
            let text = raw.trim_end_matches('\r');
            if text.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = text.split(',').collect();
            if fields.len() != columns {
                return Err(BenchError::BadRow {
                    line,
                    message: format!("expected {columns} fields, got {}", fields.len()),
                });
            }
            let score: f64 = fields[1].parse().map_err(|_| BenchError::BadRow {
                line,
                message: format!("score {:?} is not a number", fields[1]),
            })?;
            let weight = |k: usize| -> Result<Option<f64>, BenchError> {
                match fields.get(k) {
                    None | Some(&"") => Ok(None),
                    Some(text) => text.parse().map(Some).map_err(|_| BenchError::BadRow {
                        line,
                        message: format!("weight {text:?} is not a number"),
                    }),
                }
            };
            rows.push(ScoreRow {
                domain: fields[0].to_string(),
                score,
                bench_weight: weight(2)?,
                dep_weight: weight(3)?,
            });
        }
        Self::new(rows)
    }

    /// Parse the JSON mirror: an array of objects with the same keys as the
    /// CSV columns.
    pub fn from_json_str(content: &str) -> Result<Self, BenchError> {
        let rows: Vec<ScoreRow> =
            serde_json::from_str(content).map_err(|e| BenchError::BadJson(e.to_string()))?;
        Self::new(rows)
    }

    /// Canonical CSV: full header, rows sorted by domain, shortest float
    /// representation. Ingesting the output reproduces it byte for byte.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.domain, row.score, row.bench_weight, row.dep_weight
            ));
        }
        out
    }

    pub fn rows(&self) -> &[DomainRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

/// Read and validate a score table from disk.
pub fn ingest_scores(path: &Path, format: TableFormat) -> Result<BenchmarkTable, BenchError> {
    let content = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })?;
    match format {
        TableFormat::Csv => BenchmarkTable::from_csv_str(&content),
        TableFormat::Json => BenchmarkTable::from_json_str(&content),
    }
}

/// `sum dep_weight * score`: the score under the deployment mix.
pub fn deployment_weighted_score(table: &BenchmarkTable) -> f64 {
    table.rows().iter().map(|r| r.dep_weight * r.score).sum()
}

/// `sum bench_weight * score`: the headline number the benchmark reports.
pub fn benchmark_weighted_score(table: &BenchmarkTable) -> f64 {
    table.rows().iter().map(|r| r.bench_weight * r.score).sum()
}

/// Dispersion summary of a nonnegative list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JaggednessReport {
    pub cv: f64,
    /// `1 + CV^2`, the experienced-over-benchmark reliability multiplier.
    pub penalty: f64,
    /// `n sum(x^2) / (sum x)^2`. For gap lengths this equals `penalty` as
    /// an arithmetic identity and is the exact user-vs-benchmark ratio.
    pub user_vs_benchmark: f64,
    /// Set when the inputs were error rates: without a size-error
    /// association the ratio is a dispersion diagnostic, not a wedge
    /// estimate.
    pub diagnostic_only: bool,
}

fn jaggedness(values: &[f64], diagnostic_only: bool) -> Result<JaggednessReport, BenchError> {
    if values.is_empty() {
        return Err(BenchError::BadTable("need at least one value".to_string()));
    }
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(BenchError::BadTable(format!(
            "values must be finite and nonnegative, got {bad}"
        )));
    }
    let n = values.len() as f64;
    let sum: f64 = values.iter().sum();
    if sum == 0.0 {
        return Err(BenchError::BadTable(
            "all values are zero; dispersion is undefined".to_string(),
        ));
    }
    let sum_sq: f64 = values.iter().map(|v| v * v).sum();
    let mean = sum / n;
    let variance = (sum_sq / n - mean * mean).max(0.0);
    let cv = variance.sqrt() / mean;
    Ok(JaggednessReport {
        cv,
        penalty: 1.0 + cv * cv,
        user_vs_benchmark: n * sum_sq / (sum * sum),
        diagnostic_only,
    })
}

/// Jaggedness of gap lengths: the ratio is the exact inspection wedge.
pub fn gap_jaggedness(gaps: &[f64]) -> Result<JaggednessReport, BenchError> {
    jaggedness(gaps, false)
}

/// Jaggedness of per-domain error rates: same arithmetic, diagnostic
/// semantics.
pub fn error_rate_jaggedness(rates: &[f64]) -> Result<JaggednessReport, BenchError> {
    jaggedness(rates, true)
}

/// Blend of a usage-weighted main score with a tail-risk module score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureSpec {
    tail_share: f64,
    main: f64,
    tail: f64,
}

impl MixtureSpec {
    pub fn new(tail_share: f64, main: f64, tail: f64) -> Result<Self, BenchError> {
        for (name, v) in [("tail share", tail_share), ("main score", main), ("tail score", tail)] {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(BenchError::BadMixture(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(Self { tail_share, main, tail })
    }

    pub fn tail_share(&self) -> f64 {
        self.tail_share
    }

    pub fn main(&self) -> f64 {
        self.main
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }
}

/// `(1 - share) * main + share * tail`.
pub fn mixture_score(spec: &MixtureSpec) -> f64 {
    (1.0 - spec.tail_share) * spec.main + spec.tail_share * spec.tail
}

/// The four-part adjusted-score report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub mean_score: f64,
    pub score_cv: f64,
    /// 10th-percentile domain score by the nearest-rank rule.
    pub p10_score: f64,
    /// The lowest-scoring domains, ascending.
    pub worst: Vec<(String, f64)>,
    pub deployment_score: f64,
    pub tail_deployment_score: Option<f64>,
    pub mixture: Option<f64>,
}

impl ReportDocument {
    /// Render the four sections as plain text.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("== mean score ==\n");
        out.push_str(&format!("benchmark-weighted mean: {}\n", self.mean_score));
        out.push_str("== dispersion and tails ==\n");
        out.push_str(&format!("score cv: {}\n", self.score_cv));
        out.push_str(&format!("p10 score: {}\n", self.p10_score));
        for (domain, score) in &self.worst {
            out.push_str(&format!("worst: {domain} {score}\n"));
        }
        out.push_str("== deployment-weighted score ==\n");
        out.push_str(&format!("deployment-weighted mean: {}\n", self.deployment_score));
        out.push_str("== tail-risk module ==\n");
        match self.tail_deployment_score {
            Some(score) => out.push_str(&format!("tail module score: {score}\n")),
            None => out.push_str("tail module score: not provided\n"),
        }
        if let Some(mix) = self.mixture {
            out.push_str(&format!("mixture score: {mix}\n"));
        }
        out
    }

    /// CSV sidecar: `section,metric,value` rows mirroring the text.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,metric,value\n");
        out.push_str(&format!("mean,benchmark_weighted,{}\n", self.mean_score));
        out.push_str(&format!("dispersion,score_cv,{}\n", self.score_cv));
        out.push_str(&format!("dispersion,p10,{}\n", self.p10_score));
        for (domain, score) in &self.worst {
            out.push_str(&format!("dispersion,worst:{domain},{score}\n"));
        }
        out.push_str(&format!("deployment,deployment_weighted,{}\n", self.deployment_score));
        match self.tail_deployment_score {
            Some(score) => out.push_str(&format!("tail,module_score,{score}\n")),
            None => out.push_str("tail,module_score,not_provided\n"),
        }
        if let Some(mix) = self.mixture {
            out.push_str(&format!("tail,mixture,{mix}\n"));
        }
        out
    }
}

/// Build the report: benchmark-weighted mean, dispersion and worst
/// domains, deployment-weighted score, and the optional tail module and
/// mixture. `worst_k` caps the worst-domain list.
pub fn report(
    table: &BenchmarkTable,
    tail_table: Option<&BenchmarkTable>,
    mixture: Option<&MixtureSpec>,
    worst_k: usize,
) -> Result<ReportDocument, BenchError> {
    let scores: Vec<f64> = table.rows().iter().map(|r| r.score).collect();
    let dispersion = error_rate_jaggedness(&scores)?;
    let mut ranked: Vec<(String, f64)> =
        table.rows().iter().map(|r| (r.domain.clone(), r.score)).collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let mut sorted_scores = scores;
    sorted_scores.sort_by(f64::total_cmp);
    let rank = ((sorted_scores.len() as f64) * 0.1).ceil() as usize;
    let p10_score = sorted_scores[rank.saturating_sub(1)];
    Ok(ReportDocument {
        mean_score: benchmark_weighted_score(table),
        score_cv: dispersion.cv,
        p10_score,
        worst: ranked.into_iter().take(worst_k).collect(),
        deployment_score: deployment_weighted_score(table),
        tail_deployment_score: tail_table.map(deployment_weighted_score),
        mixture: mixture.map(mixture_score),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand_distr::{Distribution, Exp};

    fn simple_rows() -> Vec<ScoreRow> {
        ["alpha", "bravo", "charlie"]
            .iter()
            .zip([0.9, 0.5, 0.7])
            .map(|(d, s)| ScoreRow {
                domain: d.to_string(),
                score: s,
                bench_weight: None,
                dep_weight: None,
            })
            .collect()
    }

    #[test]
    fn missing_weights_default_to_uniform() {
        let table = BenchmarkTable::new(simple_rows()).unwrap();
        for row in table.rows() {
            assert!((row.bench_weight - 1.0 / 3.0).abs() < 1e-15);
            assert!((row.dep_weight - 1.0 / 3.0).abs() < 1e-15);
        }
        let plain_mean = (0.9 + 0.5 + 0.7) / 3.0;
        assert!((deployment_weighted_score(&table) - plain_mean).abs() < 1e-15);
        assert!((benchmark_weighted_score(&table) - plain_mean).abs() < 1e-15);
    }

    #[test]
    fn weighted_score_examples() {
        let rows = vec![
            ScoreRow {
                domain: "a".into(),
                score: 0.9,
                bench_weight: Some(0.5),
                dep_weight: Some(0.2),
            },
            ScoreRow {
                domain: "b".into(),
                score: 0.5,
                bench_weight: Some(0.5),
                dep_weight: Some(0.8),
            },
        ];
        let table = BenchmarkTable::new(rows).unwrap();
        assert!((deployment_weighted_score(&table) - 0.58).abs() < 1e-15);

        let one_hot = BenchmarkTable::new(vec![
            ScoreRow { domain: "a".into(), score: 0.9, bench_weight: None, dep_weight: Some(0.0) },
            ScoreRow { domain: "b".into(), score: 0.5, bench_weight: None, dep_weight: Some(1.0) },
        ])
        .unwrap();
        assert_eq!(deployment_weighted_score(&one_hot), 0.5);
    }

    #[test]
    fn weighted_score_stays_within_score_range() {
        let table = BenchmarkTable::new(vec![
            ScoreRow { domain: "a".into(), score: 0.2, bench_weight: None, dep_weight: Some(0.7) },
            ScoreRow { domain: "b".into(), score: 0.9, bench_weight: None, dep_weight: Some(0.3) },
        ])
        .unwrap();
        let s = deployment_weighted_score(&table);
        assert!((0.2..=0.9).contains(&s));
    }

    #[test]
    fn bad_tables_are_rejected() {
        assert!(BenchmarkTable::new(vec![]).is_err());
        let mut rows = simple_rows();
        rows[0].score = 1.2;
        assert!(BenchmarkTable::new(rows).is_err());

        let mut rows = simple_rows();
        rows[1].domain = "alpha".into();
        assert!(matches!(BenchmarkTable::new(rows), Err(BenchError::BadTable(_))));

        let mut rows = simple_rows();
        for (row, w) in rows.iter_mut().zip([0.3, 0.3, 0.3]) {
            row.dep_weight = Some(w);
        }
        let got = BenchmarkTable::new(rows);
        assert!(
            matches!(got, Err(BenchError::BadWeightSum { which: "deployment", sum }) if (sum - 0.9).abs() < 1e-12)
        );

        let mut rows = simple_rows();
        rows[0].bench_weight = Some(0.5);
        assert!(
            matches!(BenchmarkTable::new(rows), Err(BenchError::BadTable(m)) if m.contains("all or none"))
        );
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let csv = "domain,score\ncharlie,0.7\nalpha,0.9\nbravo,0.5\n";
        let table = BenchmarkTable::from_csv_str(csv).unwrap();
        let exported = table.to_csv();
        assert!(exported.starts_with(CSV_HEADER));
        // Canonical order is by domain, regardless of input order.
        assert!(exported.find("alpha").unwrap() < exported.find("bravo").unwrap());
        let again = BenchmarkTable::from_csv_str(&exported).unwrap();
        assert_eq!(table, again);
        assert_eq!(exported, again.to_csv());
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let bad_header = BenchmarkTable::from_csv_str("name,value\na,0.5\n");
        assert!(matches!(bad_header, Err(BenchError::BadRow { line: 1, .. })));

        let bad_score = BenchmarkTable::from_csv_str("domain,score\na,0.5\nb,oops\n");
        assert!(matches!(bad_score, Err(BenchError::BadRow { line: 3, .. })));

        let bad_width =
            BenchmarkTable::from_csv_str("domain,score,bench_weight,dep_weight\na,0.5\n");
        assert!(matches!(bad_width, Err(BenchError::BadRow { line: 2, .. })));

        // Empty weight cells are allowed and mean "not provided".
        let sparse = BenchmarkTable::from_csv_str(
            "domain,score,bench_weight,dep_weight\na,0.5,,\nb,0.7,,\n",
        )
        .unwrap();
        assert!((sparse.rows()[0].dep_weight - 0.5).abs() < 1e-15);
    }

    #[test]
    fn json_mirror_parses_the_same_keys() {
        let json = r#"[
            {"domain": "a", "score": 0.9, "dep_weight": 0.2},
            {"domain": "b", "score": 0.5, "dep_weight": 0.8}
        ]"#;
        let table = BenchmarkTable::from_json_str(json).unwrap();
        assert!((deployment_weighted_score(&table) - 0.58).abs() < 1e-15);

        let unknown = BenchmarkTable::from_json_str(r#"[{"domain": "a", "points": 1}]"#);
        assert!(matches!(unknown, Err(BenchError::BadJson(_))));
    }

    #[test]
    fn row_order_never_matters() {
        let forward = BenchmarkTable::new(simple_rows()).unwrap();
        let mut rows = simple_rows();
        rows.reverse();
        let backward = BenchmarkTable::new(rows).unwrap();
        assert_eq!(forward, backward);
        assert_eq!(forward.to_csv(), backward.to_csv());
        assert_eq!(
            report(&forward, None, None, 3).unwrap(),
            report(&backward, None, None, 3).unwrap()
        );
    }

    #[test]
    fn gap_penalty_examples() {
        let two_eight = gap_jaggedness(&[2.0, 8.0]).unwrap();
        assert!((two_eight.penalty - 1.36).abs() < 1e-12);
        assert!((two_eight.user_vs_benchmark - 1.36).abs() < 1e-12);
        assert!(!two_eight.diagnostic_only);

        let equal = gap_jaggedness(&[3.0; 7]).unwrap();
        assert_eq!(equal.penalty, 1.0);
        assert_eq!(equal.user_vs_benchmark, 1.0);
        assert_eq!(equal.cv, 0.0);

        assert!(gap_jaggedness(&[]).is_err());
        assert!(gap_jaggedness(&[0.0, 0.0]).is_err());
        assert!(error_rate_jaggedness(&[0.1, 0.4]).unwrap().diagnostic_only);
    }

    #[test]
    fn poisson_gaps_show_the_factor_two_penalty() {
        // 20 batches of 5000 exponential gaps; the penalty estimator is
        // biased only at O(1/n), far below the batch spread.
        let exp = Exp::new(1.0).unwrap();
        let mut rng = crate::rng::seeded_rng(31);
        let penalties: Vec<f64> = (0..20)
            .map(|_| {
                let gaps: Vec<f64> = (0..5000).map(|_| exp.sample(&mut rng)).collect();
                gap_jaggedness(&gaps).unwrap().penalty
            })
            .collect();
        let est = crate::mc::estimate_from_samples(&penalties);
        assert!((est.mean - 2.0).abs() < 3.0 * est.se, "{est:?}");
    }

    #[test]
    fn mixture_examples() {
        assert_eq!(mixture_score(&MixtureSpec::new(0.0, 0.8, 0.4).unwrap()), 0.8);
        assert_eq!(mixture_score(&MixtureSpec::new(1.0, 0.8, 0.4).unwrap()), 0.4);
        let quarter = MixtureSpec::new(0.25, 0.8, 0.4).unwrap();
        assert!((mixture_score(&quarter) - 0.7).abs() < 1e-15);
        assert!(MixtureSpec::new(1.5, 0.8, 0.4).is_err());
        assert!(MixtureSpec::new(0.5, -0.1, 0.4).is_err());
    }

    #[test]
    fn report_has_exactly_four_sections() {
        let rows: Vec<ScoreRow> = (0..10)
            .map(|i| ScoreRow {
                domain: format!("domain{i:02}"),
                score: 0.5 + 0.04 * i as f64,
                bench_weight: None,
                dep_weight: None,
            })
            .collect();
        let table = BenchmarkTable::new(rows).unwrap();
        let doc = report(&table, None, None, 3).unwrap();
        let text = doc.render();
        assert_eq!(text.matches("== ").count(), 4, "template sections:\n{text}");
        assert!(text.contains("not provided"));

        // Worst-3 ascending by score.
        assert_eq!(doc.worst.len(), 3);
        assert_eq!(doc.worst[0].0, "domain00");
        assert!(doc.worst[0].1 <= doc.worst[1].1 && doc.worst[1].1 <= doc.worst[2].1);
        // p10 by nearest rank on 10 items is the lowest score.
        assert_eq!(doc.p10_score, 0.5);

        let tail = BenchmarkTable::new(vec![ScoreRow {
            domain: "tail".into(),
            score: 0.3,
            bench_weight: None,
            dep_weight: None,
        }])
        .unwrap();
        let spec = MixtureSpec::new(0.25, 0.8, 0.4).unwrap();
        let full = report(&table, Some(&tail), Some(&spec), 3).unwrap();
        assert_eq!(full.tail_deployment_score, Some(0.3));
        assert!((full.mixture.unwrap() - 0.7).abs() < 1e-15);
        assert!(full.render().contains("tail module score: 0.3"));
        assert!(full.to_csv().starts_with("section,metric,value\n"));
    }

    proptest! {
        /// The wedge ratio and the dispersion penalty are the same number
        /// computed two ways.
        #[test]
        fn penalty_identity_is_exact(
            gaps in proptest::collection::vec(0.01f64..100.0, 1..40),
        ) {
            let r = gap_jaggedness(&gaps).unwrap();
            prop_assert!(
                (r.user_vs_benchmark - r.penalty).abs() <= 1e-12 * r.penalty,
                "ratio {} vs penalty {}", r.user_vs_benchmark, r.penalty
            );
        }
    }
}
