//! Per-target-word multinomial Naive Bayes over feature multisets.
//!
//! Scoring uses add-alpha smoothed likelihoods in log space:
//!
//! ```text
//! score(s) = ln P(s) + Σ_f n_f · ln((count(s, f) + α) / (total(s) + α·|V|))
//! ```
//!
//! where the sum runs over atoms of the query that occur in the training
//! vocabulary `V`. Unknown atoms are skipped. Priors are unsmoothed.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Instance, SenseId};
use crate::features::{
    extract, FeatureAtom, FeatureSet, Method, MethodSpec, Resources, WindowSize,
};
use crate::text::Token;

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("cannot train on an empty instance list")]
    EmptyTraining,
    #[error("smoothing alpha must be positive and finite, got {0}")]
    Alpha(f64),
    #[error("training instances mix targets {0:?} and {1:?}")]
    MixedTargets(String, String),
    #[error("model for {model:?} cannot classify an instance of {instance:?}")]
    TargetMismatch { model: String, instance: String },
    #[error("invalid model file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub const DEFAULT_ALPHA: f64 = 1.0;

/// Relative gap below which two log scores count as tied.
pub const TIE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    pub target: Token,
    pub spec: MethodSpec,
    pub alpha: f64,
    /// Sense labels, sorted.
    pub senses: Vec<String>,
    pub prior: BTreeMap<String, f64>,
    pub feature_count: BTreeMap<String, BTreeMap<FeatureAtom, u64>>,
    pub sense_total: BTreeMap<String, u64>,
    pub vocabulary: BTreeSet<FeatureAtom>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub sense: SenseId,
    pub log_scores: BTreeMap<String, f64>,
}

impl Prediction {
    /// The predicted sense first, then the others by descending score.
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut v: Vec<(&str, f64)> = self
            .log_scores
            .iter()
            .map(|(k, s)| (k.as_str(), *s))
            .collect();
        v.sort_by(|a, b| {
            (b.0 == self.sense.label)
                .cmp(&(a.0 == self.sense.label))
                .then(b.1.total_cmp(&a.1))
                .then(a.0.cmp(b.0))
        });
        v
    }
}

fn check_alpha(alpha: f64) -> Result<(), ClassifierError> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(ClassifierError::Alpha(alpha))
    }
}

impl NaiveBayesModel {
    /// Fits a model from instances that all share one target word.
    pub fn train(
        instances: &[&Instance],
        spec: MethodSpec,
        resources: &Resources,
        alpha: f64,
    ) -> Result<Self, ClassifierError> {
        check_alpha(alpha)?;
        let first = instances.first().ok_or(ClassifierError::EmptyTraining)?;
        let target = first.target.clone();

        let mut sense_instances: BTreeMap<String, usize> = BTreeMap::new();
        let mut feature_count: BTreeMap<String, BTreeMap<FeatureAtom, u64>> = BTreeMap::new();
        for inst in instances {
            if inst.target != target {
                return Err(ClassifierError::MixedTargets(
                    target.to_string(),
                    inst.target.to_string(),
                ));
            }
            let label = &inst.sense.label;
            *sense_instances.entry(label.clone()).or_insert(0) += 1;
            let counts = feature_count.entry(label.clone()).or_default();
            for atom in extract(inst, spec, resources).atoms {
                *counts.entry(atom).or_insert(0) += 1;
            }
        }

        let n = instances.len() as f64;
        let prior = sense_instances
            .iter()
            .map(|(s, c)| (s.clone(), *c as f64 / n))
            .collect();
        Ok(Self::assemble(target, spec, alpha, prior, feature_count))
    }

    fn assemble(
        target: Token,
        spec: MethodSpec,
        alpha: f64,
        prior: BTreeMap<String, f64>,
        mut feature_count: BTreeMap<String, BTreeMap<FeatureAtom, u64>>,
    ) -> Self {
        let senses: Vec<String> = prior.keys().cloned().collect();
        for s in &senses {
            let counts = feature_count.entry(s.clone()).or_default();
            counts.retain(|_, c| *c > 0);
        }
        let sense_total = feature_count
            .iter()
            .map(|(s, m)| (s.clone(), m.values().sum()))
            .collect();
        let vocabulary = feature_count
            .values()
            .flat_map(|m| m.keys().cloned())
            .collect();
        NaiveBayesModel {
            target,
            spec,
            alpha,
            senses,
            prior,
            feature_count,
            sense_total,
            vocabulary,
        }
    }

    pub fn count(&self, sense: &str, atom: &FeatureAtom) -> u64 {
        self.feature_count
            .get(sense)
            .and_then(|m| m.get(atom))
            .copied()
            .unwrap_or(0)
    }

    /// Smoothed P(atom | sense).
    pub fn likelihood(&self, sense: &str, atom: &FeatureAtom) -> f64 {
        let total = self.sense_total.get(sense).copied().unwrap_or(0) as f64;
        let v = self.vocabulary.len() as f64;
        (self.count(sense, atom) as f64 + self.alpha) / (total + self.alpha * v)
    }

    /// Unnormalized natural-log posterior of each sense.
    pub fn log_posterior(&self, fs: &FeatureSet) -> BTreeMap<String, f64> {
        // grouping by atom makes the sum independent of atom order
        let evidence: Vec<(&FeatureAtom, f64)> = fs
            .counts()
            .into_iter()
            .filter(|(a, _)| self.vocabulary.contains(*a))
            .map(|(a, n)| (a, n as f64))
            .collect();
        let v = self.vocabulary.len() as f64;
        self.senses
            .iter()
            .map(|s| {
                let counts = &self.feature_count[s];
                let log_denom = (self.sense_total[s] as f64 + self.alpha * v).ln();
                let mut score = self.prior[s].ln();
                for (atom, n) in &evidence {
                    let c = counts.get(*atom).copied().unwrap_or(0) as f64;
                    score += n * ((c + self.alpha).ln() - log_denom);
                }
                (s.clone(), score)
            })
            .collect()
    }

    /// Highest score wins. Scores within [`TIE_TOLERANCE`] (relative) of the
    /// best are tied; ties go to the higher prior, then the smaller label.
    pub fn decide(&self, log_scores: &BTreeMap<String, f64>) -> String {
        let best = log_scores
            .values()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let slack = TIE_TOLERANCE * best.abs().max(1.0);
        log_scores
            .iter()
            .filter(|(_, s)| **s >= best - slack)
            .max_by(|(a, _), (b, _)| {
                self.prior[*a]
                    .total_cmp(&self.prior[*b])
                    .then_with(|| b.cmp(a))
            })
            .map(|(k, _)| k.clone())
            .expect("model has at least one sense")
    }

    pub fn predict_features(&self, fs: &FeatureSet) -> Prediction {
        let log_scores = self.log_posterior(fs);
        let label = self.decide(&log_scores);
        Prediction {
            sense: SenseId::new(self.target.clone(), label),
            log_scores,
        }
    }

    pub fn predict(
        &self,
        inst: &Instance,
        resources: &Resources,
    ) -> Result<Prediction, ClassifierError> {
        if inst.target != self.target {
            return Err(ClassifierError::TargetMismatch {
                model: self.target.to_string(),
                instance: inst.target.to_string(),
            });
        }
        Ok(self.predict_features(&extract(inst, self.spec, resources)))
    }

    pub fn to_json(&self) -> Result<String, ClassifierError> {
        let doc = ModelDoc {
            target: self.target.to_string(),
            method: self.spec.method.name().to_string(),
            window: self.spec.window.get(),
            alpha: self.alpha,
            senses: self.senses.clone(),
            priors: self.prior.clone(),
            counts: self
                .feature_count
                .iter()
                .map(|(s, m)| (s.clone(), m.iter().map(|(a, c)| (a.encode(), *c)).collect()))
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(json: &str) -> Result<Self, ClassifierError> {
        let doc: ModelDoc = serde_json::from_str(json)?;
        let bad = |m: String| ClassifierError::Format(m);
        let target = Token::new(&doc.target).map_err(|e| bad(e.to_string()))?;
        let method: Method = doc
            .method
            .parse()
            .map_err(|e: crate::features::ConfigError| bad(e.to_string()))?;
        let window = WindowSize::new(doc.window).map_err(|e| bad(e.to_string()))?;
        check_alpha(doc.alpha).map_err(|e| bad(e.to_string()))?;

        let listed: BTreeSet<&String> = doc.senses.iter().collect();
        let priored: BTreeSet<&String> = doc.priors.keys().collect();
        if listed.is_empty() || listed != priored || listed.len() != doc.senses.len() {
            return Err(bad("senses and priors disagree".into()));
        }
        let total: f64 = doc.priors.values().sum();
        if (total - 1.0).abs() > 1e-9 || doc.priors.values().any(|p| p.is_nan() || *p <= 0.0) {
            return Err(bad(format!("priors sum to {total}")));
        }
        if let Some(s) = doc.counts.keys().find(|s| !doc.priors.contains_key(*s)) {
            return Err(bad(format!("counts for unknown sense {s:?}")));
        }

        let mut feature_count = BTreeMap::new();
        for (sense, atoms) in doc.counts {
            let mut m = BTreeMap::new();
            for (enc, c) in atoms {
                let atom = FeatureAtom::decode(&enc).map_err(|e| bad(e.to_string()))?;
                m.insert(atom, c);
            }
            feature_count.insert(sense, m);
        }
        Ok(Self::assemble(
            target,
            MethodSpec::new(method, window),
            doc.alpha,
            doc.priors,
            feature_count,
        ))
    }

    pub fn load(path: &Path) -> Result<Self, ClassifierError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelDoc {
    target: String,
    method: String,
    window: usize,
    alpha: f64,
    senses: Vec<String>,
    priors: BTreeMap<String, f64>,
    counts: BTreeMap<String, BTreeMap<String, u64>>,
}
