//! Sense accuracy, macro-averaged precision/recall/F1 and the
//! method × window sweep.
//!
//! Precision and recall are macro-averaged twice: over the senses of a word
//! (a sense that is never predicted has no precision and is left out of that
//! mean) and then over words. F1 is always recomputed from the averaged P and R.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io;

use rayon::prelude::*;
use thiserror::Error;

use crate::classifier::{ClassifierError, NaiveBayesModel};
use crate::corpus::{self, Corpus, CorpusError, Instance};
use crate::features::{Method, MethodSpec, Resources, WindowSize};
use crate::text::Token;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no test instances to score")]
    NoTestData,
    #[error("nothing to aggregate")]
    NoWords,
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
}

/// Counts keyed by (target, gold label, predicted label).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub cells: BTreeMap<(Token, String, String), u64>,
}

impl ConfusionCounts {
    pub fn record(&mut self, target: &Token, gold: &str, predicted: &str) {
        *self
            .cells
            .entry((target.clone(), gold.to_string(), predicted.to_string()))
            .or_insert(0) += 1;
    }

    pub fn total(&self) -> u64 {
        self.cells.values().sum()
    }

    pub fn correct(&self) -> u64 {
        self.cells
            .iter()
            .filter(|((_, g, p), _)| g == p)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn accuracy(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| self.correct() as f64 / total as f64)
    }
}

/// Precision, recall, F1 and accuracy of one word or one aggregate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub n_test: u64,
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Runs the model over `test` and tallies gold against predicted sense.
pub fn score_word(
    model: &NaiveBayesModel,
    test: &[&Instance],
    resources: &Resources,
) -> Result<ConfusionCounts, EvalError> {
    let mut counts = ConfusionCounts::default();
    for inst in test {
        let p = model.predict(inst, resources)?;
        counts.record(&inst.target, &inst.sense.label, &p.sense.label);
    }
    Ok(counts)
}

/// Macro-averaged metrics over the senses present in `counts`.
pub fn word_metrics(counts: &ConfusionCounts) -> Result<Scores, EvalError> {
    let total = counts.total();
    if total == 0 {
        return Err(EvalError::NoTestData);
    }
    let mut row: BTreeMap<(&Token, &str), u64> = BTreeMap::new();
    let mut col: BTreeMap<(&Token, &str), u64> = BTreeMap::new();
    let mut diag: BTreeMap<(&Token, &str), u64> = BTreeMap::new();
    for ((t, g, p), &c) in &counts.cells {
        *row.entry((t, g)).or_insert(0) += c;
        *col.entry((t, p)).or_insert(0) += c;
        if g == p {
            *diag.entry((t, g)).or_insert(0) += c;
        }
    }
    let senses: BTreeSet<_> = row.keys().chain(col.keys()).copied().collect();
    let hits = |s| diag.get(&s).copied().unwrap_or(0) as f64;
    let precisions: Vec<f64> = senses
        .iter()
        .filter_map(|s| col.get(s).filter(|c| **c > 0).map(|c| hits(*s) / *c as f64))
        .collect();
    let recalls: Vec<f64> = senses
        .iter()
        .filter_map(|s| row.get(s).filter(|r| **r > 0).map(|r| hits(*s) / *r as f64))
        .collect();
    let precision = mean(&precisions);
    let recall = mean(&recalls);
    Ok(Scores {
        precision,
        recall,
        f1: f1(precision, recall),
        accuracy: counts.correct() as f64 / total as f64,
        n_test: total,
    })
}

/// Unweighted mean over words; F1 from the mean P and R.
pub fn aggregate<'a, I>(per_word: I) -> Result<Scores, EvalError>
where
    I: IntoIterator<Item = &'a Scores>,
{
    let all: Vec<&Scores> = per_word.into_iter().collect();
    if all.is_empty() {
        return Err(EvalError::NoWords);
    }
    let pick = |f: fn(&Scores) -> f64| mean(&all.iter().map(|s| f(s)).collect::<Vec<_>>());
    let precision = pick(|s| s.precision);
    let recall = pick(|s| s.recall);
    Ok(Scores {
        precision,
        recall,
        f1: f1(precision, recall),
        accuracy: pick(|s| s.accuracy),
        n_test: all.iter().map(|s| s.n_test).sum(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub spec: MethodSpec,
    /// `None` when no target had test data.
    pub overall: Option<Scores>,
    pub per_word: BTreeMap<Token, Scores>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvaluationReport {
    pub rows: Vec<MethodResult>,
    pub warnings: Vec<String>,
}

impl EvaluationReport {
    pub fn row(&self, method: Method, window: usize) -> Option<&MethodResult> {
        self.rows
            .iter()
            .find(|r| r.spec.method == method && r.spec.window.get() == window)
    }

    /// Row with the highest overall F1; earlier rows win ties.
    pub fn best_by_f1(&self) -> Option<&MethodResult> {
        self.rows.iter().filter(|r| r.overall.is_some()).fold(
            None,
            |best: Option<&MethodResult>, r| match best {
                Some(b) if b.overall.unwrap().f1 >= r.overall.unwrap().f1 => Some(b),
                _ => Some(r),
            },
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub methods: Vec<Method>,
    pub windows: Vec<WindowSize>,
    pub train_fraction: f64,
    pub seed: u64,
    pub alpha: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            methods: Method::SWEEP_DEFAULT.to_vec(),
            windows: (2..=5).map(|j| WindowSize::new(j).unwrap()).collect(),
            train_fraction: 0.75,
            seed: 42,
            alpha: crate::classifier::DEFAULT_ALPHA,
        }
    }
}

/// The (method, window) grid in report order: windows descending, methods
/// in the order first requested.
pub fn grid(methods: &[Method], windows: &[WindowSize]) -> Vec<MethodSpec> {
    let mut ws: Vec<WindowSize> = windows.to_vec();
    ws.sort_by(|a, b| b.cmp(a));
    ws.dedup();
    let mut ms: Vec<Method> = Vec::new();
    for m in methods {
        if !ms.contains(m) {
            ms.push(*m);
        }
    }
    ws.iter()
        .flat_map(|w| ms.iter().map(move |m| MethodSpec::new(*m, *w)))
        .collect()
}

/// Trains on `train` and scores on `test` for every cell of the grid.
/// Targets without test instances are skipped with a warning.
pub fn evaluate(
    train: &Corpus,
    test: &Corpus,
    methods: &[Method],
    windows: &[WindowSize],
    alpha: f64,
    resources: &Resources,
) -> Result<EvaluationReport, EvalError> {
    let train_by = train.by_target();
    let test_by = test.by_target();
    let mut warnings = Vec::new();
    let mut words: Vec<(&Token, &Vec<&Instance>, &Vec<&Instance>)> = Vec::new();
    for (target, train_insts) in &train_by {
        match test_by.get(target) {
            Some(test_insts) => words.push((target, train_insts, test_insts)),
            None => warnings.push(format!(
                "target {:?} has no test instances; skipped",
                target.as_str()
            )),
        }
    }
    for target in test_by.keys().filter(|t| !train_by.contains_key(*t)) {
        warnings.push(format!(
            "target {:?} has no training instances; skipped",
            target.as_str()
        ));
    }

    let cells = grid(methods, windows);
    let rows = cells
        .par_iter()
        .map(|spec| -> Result<MethodResult, EvalError> {
            let mut per_word = BTreeMap::new();
            for (target, tr, te) in &words {
                let model = NaiveBayesModel::train(tr, *spec, resources, alpha)?;
                let counts = score_word(&model, te, resources)?;
                per_word.insert((*target).clone(), word_metrics(&counts)?);
            }
            let overall = aggregate(per_word.values()).ok();
            Ok(MethodResult {
                spec: *spec,
                overall,
                per_word,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EvaluationReport { rows, warnings })
}

/// Splits the corpus once with the configured seed and evaluates the grid.
pub fn sweep(
    corpus: &Corpus,
    config: &SweepConfig,
    resources: &Resources,
) -> Result<EvaluationReport, EvalError> {
    let split = corpus::split(corpus, config.train_fraction, config.seed)?;
    let mut report = evaluate(
        &split.train,
        &split.test,
        &config.methods,
        &config.windows,
        config.alpha,
        resources,
    )?;
    let mut warnings = split.warnings;
    warnings.append(&mut report.warnings);
    report.warnings = warnings;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

/// Two decimals, halves rounded away from zero.
pub fn round2(x: f64) -> String {
    format!("{:.2}", (x * 100.0).round() / 100.0)
}

fn render_text(r: &EvaluationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<8} {:>6} {:>5} {:>5} {:>5}",
        "Method", "Window", "P", "R", "F"
    );
    for row in &r.rows {
        let (p, rc, f) = match &row.overall {
            Some(s) => (round2(s.precision), round2(s.recall), round2(s.f1)),
            None => ("-".into(), "-".into(), "-".into()),
        };
        let _ = writeln!(
            out,
            "{:<8} {:>6} {:>5} {:>5} {:>5}",
            row.spec.method.name(),
            row.spec.window.get(),
            p,
            rc,
            f
        );
    }
    if !r.warnings.is_empty() {
        out.push_str("\nWarnings:\n");
        for w in &r.warnings {
            let _ = writeln!(out, "  {w}");
        }
    }
    out
}

fn render_csv(r: &EvaluationReport) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "scope",
        "method",
        "window",
        "target",
        "precision",
        "recall",
        "f1",
        "accuracy",
        "n_test",
    ])?;
    let fields = |s: &Scores| {
        [
            s.precision.to_string(),
            s.recall.to_string(),
            s.f1.to_string(),
            s.accuracy.to_string(),
            s.n_test.to_string(),
        ]
    };
    for row in &r.rows {
        let method = row.spec.method.name();
        let window = row.spec.window.get().to_string();
        if let Some(s) = &row.overall {
            let mut rec = vec![
                "overall".to_string(),
                method.into(),
                window.clone(),
                String::new(),
            ];
            rec.extend(fields(s));
            w.write_record(&rec)?;
        }
        for (target, s) in &row.per_word {
            let mut rec = vec![
                "word".to_string(),
                method.into(),
                window.clone(),
                target.to_string(),
            ];
            rec.extend(fields(s));
            w.write_record(&rec)?;
        }
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

pub fn render_report(r: &EvaluationReport, format: ReportFormat) -> io::Result<Vec<u8>> {
    match format {
        ReportFormat::Text => Ok(render_text(r).into_bytes()),
        ReportFormat::Csv => render_csv(r).map_err(io::Error::other),
    }
}
