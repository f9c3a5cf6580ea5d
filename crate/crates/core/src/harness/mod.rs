//! Inequality checks run over a corpus of classes, producing sorted,
//! fingerprinted verdict reports.

mod checks;
pub mod corpus;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::{ClassFile, MetricFile};
use crate::model::{FunctionClass, Metric};
use crate::par;

pub use checks::registry;
pub use corpus::{Corpus, CorpusEntry, CorpusFile, Instance};

/// Additive slack for comparisons evaluated in floating point.
pub const FLOAT_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictReport {
    pub theorem_id: String,
    pub instance: String,
    pub instance_fingerprint: String,
    pub params: BTreeMap<String, String>,
    pub lhs: String,
    pub relation: String,
    pub rhs: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<String>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

/// Identity of one checked instance; every report it produces is
/// fingerprinted from the theorem id, class, metric and parameters.
#[derive(Clone, Debug)]
pub struct Check {
    theorem_id: &'static str,
    instance: String,
    class: Value,
    metric: Value,
    params: BTreeMap<String, String>,
}

impl Check {
    pub fn new(theorem_id: &'static str, instance: &str, class: Option<&FunctionClass>, metric: Option<&Metric>) -> Self {
        Self {
            theorem_id,
            instance: instance.to_string(),
            class: class.map_or(Value::Null, |c| json!(ClassFile::from_class(c))),
            metric: metric.map_or(Value::Null, |m| json!(MetricFile::from_metric(m))),
            params: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Same instance with the class replaced (after refinement).
    pub fn with_class(mut self, class: &FunctionClass) -> Self {
        self.class = json!(ClassFile::from_class(class));
        self
    }

    pub fn fingerprint(&self) -> String {
        let canonical = json!({
            "theorem_id": self.theorem_id,
            "instance": self.instance,
            "class": self.class,
            "metric": self.metric,
            "params": self.params,
        });
        let digest = Sha256::digest(canonical.to_string().as_bytes());
        hex::encode(&digest[..8])
    }

    fn report(&self, lhs: String, relation: &str, rhs: String, verdict: Verdict) -> VerdictReport {
        VerdictReport {
            theorem_id: self.theorem_id.to_string(),
            instance: self.instance.clone(),
            instance_fingerprint: self.fingerprint(),
            params: self.params.clone(),
            lhs,
            relation: relation.to_string(),
            rhs,
            slack: None,
            verdict,
            note: None,
            runtime_ms: None,
        }
    }

    /// Exact comparison decided by the caller.
    pub fn exact(&self, lhs: impl ToString, relation: &str, rhs: impl ToString, holds: bool) -> VerdictReport {
        let v = if holds { Verdict::Pass } else { Verdict::Fail };
        self.report(lhs.to_string(), relation, rhs.to_string(), v)
    }

    /// lhs <= rhs + FLOAT_SLACK, both sides recorded.
    pub fn guarded_le(&self, lhs: f64, rhs: f64) -> VerdictReport {
        let holds = lhs.is_finite() && rhs.is_finite() && lhs <= rhs + FLOAT_SLACK;
        let mut r = self.exact(format!("{lhs}"), "<=", format!("{rhs}"), holds);
        r.slack = Some(format!("{FLOAT_SLACK:e}"));
        r
    }

    pub fn skipped(&self, reason: impl Into<String>) -> VerdictReport {
        self.report(
            "-".into(),
            "-",
            "-".into(),
            Verdict::Skipped { reason: reason.into() },
        )
    }

    pub fn error(&self, e: &Error) -> VerdictReport {
        let mut r = self.report("-".into(), "-", "-".into(), Verdict::Fail);
        r.note = Some(format!("error: {e}"));
        r
    }
}

impl VerdictReport {
    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

type JobFn = dyn Fn(&Check) -> Result<Vec<VerdictReport>> + Send + Sync;

/// One unit of parallel work inside a checker.
pub struct Job {
    check: Check,
    run: Box<JobFn>,
}

impl Job {
    pub fn new(check: Check, run: impl Fn(&Check) -> Result<Vec<VerdictReport>> + Send + Sync + 'static) -> Self {
        Self {
            check,
            run: Box::new(run),
        }
    }
}

/// A registered statement and the jobs checking it on a corpus.
pub struct Theorem {
    pub id: &'static str,
    pub statement: &'static str,
    pub(crate) jobs: fn(&Corpus) -> Vec<Job>,
}

fn run_jobs(jobs: Vec<Job>, timings: bool) -> Vec<VerdictReport> {
    let out = par::map_slice(&jobs, |job| {
        let start = Instant::now();
        let mut reports = (job.run)(&job.check).unwrap_or_else(|e| vec![job.check.error(&e)]);
        if timings {
            let ms = start.elapsed().as_millis() as u64;
            for r in &mut reports {
                r.runtime_ms = Some(ms);
            }
        }
        reports
    });
    out.into_iter().flatten().collect()
}

fn sort_reports(reports: &mut [VerdictReport]) {
    reports.sort_by(|a, b| {
        (&a.theorem_id, &a.instance_fingerprint, &a.instance).cmp(&(&b.theorem_id, &b.instance_fingerprint, &b.instance))
    });
}

pub fn find(id: &str) -> Result<&'static Theorem> {
    registry()
        .iter()
        .find(|t| t.id == id)
        .ok_or_else(|| Error::UnknownTheorem(id.to_string()))
}

/// Runs one registered checker over the corpus.
pub fn verify(id: &str, corpus: &Corpus, timings: bool) -> Result<Vec<VerdictReport>> {
    let theorem = find(id)?;
    let mut reports = run_jobs((theorem.jobs)(corpus), timings);
    sort_reports(&mut reports);
    Ok(reports)
}

/// Runs every registered checker.
pub fn verify_all(corpus: &Corpus, timings: bool) -> Vec<VerdictReport> {
    let jobs = registry().iter().flat_map(|t| (t.jobs)(corpus)).collect();
    let mut reports = run_jobs(jobs, timings);
    sort_reports(&mut reports);
    reports
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

pub fn summarize(reports: &[VerdictReport]) -> Summary {
    let mut s = Summary::default();
    for r in reports {
        match r.verdict {
            Verdict::Pass => s.pass += 1,
            Verdict::Fail => s.fail += 1,
            Verdict::Skipped { .. } => s.skipped += 1,
        }
    }
    s
}
