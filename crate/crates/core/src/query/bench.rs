use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};
use thiserror::Error;

use super::{execute, Query};
use crate::store::Graph;

/// Dataset id used for the union of all datasets.
pub const COMBINED: &str = "combined";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BenchError {
    #[error("at least 5 repetitions are required, got {0}")]
    TooFewRepetitions(usize),
}

fn millis<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub query: String,
    pub dataset: String,
    #[serde(rename = "median_ms", serialize_with = "millis")]
    pub median: Duration,
    pub reps: usize,
    /// Solutions returned, as a sanity check that the query did work.
    pub solutions: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuerySummary {
    pub query: String,
    #[serde(rename = "separate_sum_ms", serialize_with = "millis")]
    pub separate_sum: Duration,
    #[serde(rename = "combined_ms", serialize_with = "millis")]
    pub combined: Duration,
}

impl QuerySummary {
    /// `combined <= separate_sum * (1 + slack)`.
    pub fn combined_within(&self, slack: f64) -> bool {
        self.combined.as_secs_f64() <= self.separate_sum.as_secs_f64() * (1.0 + slack)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub reps: usize,
    pub rows: Vec<BenchRow>,
    pub summaries: Vec<QuerySummary>,
}

impl BenchReport {
    /// Tab-separated rows (`query dataset median_ms reps solutions`), per
    /// dataset and combined, followed by one `sum` row per query.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("query\tdataset\tmedian_ms\treps\tsolutions\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{:.4}\t{}\t{}\n",
                r.query,
                r.dataset,
                r.median.as_secs_f64() * 1e3,
                r.reps,
                r.solutions
            ));
        }
        for s in &self.summaries {
            out.push_str(&format!("{}\tsum\t{:.4}\t{}\t\n", s.query, s.separate_sum.as_secs_f64() * 1e3, self.reps));
        }
        out
    }
}

fn median_time(query: &Query, graph: &Graph, reps: usize) -> (Duration, usize) {
    let solutions = execute(query, graph).len();
    let mut times: Vec<Duration> = (0..reps)
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(execute(query, graph));
            start.elapsed()
        })
        .collect();
    times.sort();
    let mid = times.len() / 2;
    let median = if times.len() % 2 == 1 { times[mid] } else { (times[mid - 1] + times[mid]) / 2 };
    (median, solutions)
}

/// Median execution time of every query on every dataset and on their union.
///
/// Runs on the calling thread. Each measurement is preceded by one untimed
/// warm-up run; parsing is not timed.
pub fn bench(
    queries: &[(String, Query)],
    datasets: &[(String, Graph)],
    reps: usize,
) -> Result<BenchReport, BenchError> {
    if reps < 5 {
        return Err(BenchError::TooFewRepetitions(reps));
    }
    let mut union = Graph::new();
    for (_, g) in datasets {
        union.extend_from(g);
    }
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (qid, query) in queries {
        let mut sum = Duration::ZERO;
        for (did, graph) in datasets {
            let (median, solutions) = median_time(query, graph, reps);
            sum += median;
            rows.push(BenchRow { query: qid.clone(), dataset: did.clone(), median, reps, solutions });
        }
        let (combined, solutions) = median_time(query, &union, reps);
        rows.push(BenchRow { query: qid.clone(), dataset: COMBINED.to_string(), median: combined, reps, solutions });
        summaries.push(QuerySummary { query: qid.clone(), separate_sum: sum, combined });
    }
    Ok(BenchReport { reps, rows, summaries })
}
