use std::collections::{BTreeMap, BTreeSet};

use hindi_wsd::classifier::NaiveBayesModel;
use hindi_wsd::features::{extract, FeatureSet, Method, MethodSpec, Resources, WindowSize};
use hindi_wsd::{Instance, Token};
use proptest::prelude::*;

const ALPHABET: [&str; 6] = ["क", "ख", "ग", "घ", "च", "छ"];

fn spec() -> MethodSpec {
    MethodSpec::new(Method::Local, WindowSize::new(2).unwrap())
}

fn arb_instance(labels: usize) -> impl Strategy<Value = Instance> {
    (1..8usize)
        .prop_flat_map(move |len| {
            (
                prop::collection::vec(prop::sample::select(ALPHABET.to_vec()), len),
                0..len,
                0..labels,
            )
        })
        .prop_map(|(mut words, idx, label)| {
            words[idx] = "T";
            let toks = words.iter().map(|w| Token::new(w).unwrap()).collect();
            Instance::new(toks, idx, &format!("s{label}")).unwrap()
        })
}

/// Window words by direct slicing, independent of the extractor code.
fn window_words(inst: &Instance) -> Vec<String> {
    let t = inst.target_index as i64;
    (t - 2..=t + 2)
        .filter(|i| *i >= 0 && (*i as usize) < inst.tokens.len())
        .map(|i| inst.tokens[i as usize].to_string())
        .collect()
}

/// Unnormalized posteriors by plain multiplication, then one logarithm.
fn oracle(train: &[Instance], query: &Instance, alpha: f64) -> BTreeMap<String, f64> {
    let mut per_sense: BTreeMap<String, (usize, BTreeMap<String, f64>)> = BTreeMap::new();
    let mut vocab = BTreeSet::new();
    for inst in train {
        let e = per_sense.entry(inst.sense.label.clone()).or_default();
        e.0 += 1;
        for w in window_words(inst) {
            *e.1.entry(w.clone()).or_insert(0.0) += 1.0;
            vocab.insert(w);
        }
    }
    let n = train.len() as f64;
    let v = vocab.len() as f64;
    per_sense
        .iter()
        .map(|(s, (k, counts))| {
            let total: f64 = counts.values().sum();
            let mut p = *k as f64 / n;
            for w in window_words(query) {
                if vocab.contains(&w) {
                    p *= (counts.get(&w).copied().unwrap_or(0.0) + alpha) / (total + alpha * v);
                }
            }
            (s.clone(), p.ln())
        })
        .collect()
}

fn refs(v: &[Instance]) -> Vec<&Instance> {
    v.iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn log_posterior_matches_oracle(
        train in prop::collection::vec(arb_instance(3), 1..12),
        query in arb_instance(1),
        alpha in 0.1f64..3.0,
    ) {
        let res = Resources::default();
        let model = NaiveBayesModel::train(&refs(&train), spec(), &res, alpha).unwrap();
        let got = model.log_posterior(&extract(&query, spec(), &res));
        let want = oracle(&train, &query, alpha);
        prop_assert_eq!(got.len(), want.len());
        for (s, w) in &want {
            prop_assert!((got[s] - w).abs() <= 1e-12, "{}: {} vs {}", s, got[s], w);
        }
    }

    #[test]
    fn model_invariants_hold(train in prop::collection::vec(arb_instance(3), 1..12), alpha in 0.1f64..3.0) {
        let model = NaiveBayesModel::train(&refs(&train), spec(), &Resources::default(), alpha).unwrap();
        let prior_sum: f64 = model.prior.values().sum();
        prop_assert!((prior_sum - 1.0).abs() < 1e-12);
        for s in &model.senses {
            let total: u64 = model.feature_count[s].values().sum();
            prop_assert_eq!(model.sense_total[s], total);
            let mass: f64 = model.vocabulary.iter().map(|a| model.likelihood(s, a)).sum();
            prop_assert!((mass - 1.0).abs() < 1e-9);
        }
        let seen: BTreeSet<_> = model.feature_count.values().flat_map(|m| m.keys().cloned()).collect();
        prop_assert_eq!(&seen, &model.vocabulary);
    }

    #[test]
    fn atom_order_is_irrelevant(train in prop::collection::vec(arb_instance(3), 1..12), query in arb_instance(1)) {
        let res = Resources::default();
        let model = NaiveBayesModel::train(&refs(&train), spec(), &res, 1.0).unwrap();
        let fs = extract(&query, spec(), &res);
        let mut reversed = fs.clone();
        reversed.atoms.reverse();
        prop_assert_eq!(model.log_posterior(&fs), model.log_posterior(&reversed));
    }

    #[test]
    fn argmax_is_shift_invariant(train in prop::collection::vec(arb_instance(3), 1..12), query in arb_instance(1), shift in -50.0f64..50.0) {
        let res = Resources::default();
        let model = NaiveBayesModel::train(&refs(&train), spec(), &res, 1.0).unwrap();
        let scores = model.log_posterior(&extract(&query, spec(), &res));
        let shifted: BTreeMap<String, f64> = scores.iter().map(|(s, v)| (s.clone(), v + shift)).collect();
        let unshifted = model.decide(&scores);
        prop_assert_eq!(model.decide(&shifted), unshifted);
    }

    #[test]
    fn json_round_trip_predicts_identically(train in prop::collection::vec(arb_instance(3), 1..12), query in arb_instance(1), alpha in 0.1f64..3.0) {
        let res = Resources::default();
        let model = NaiveBayesModel::train(&refs(&train), spec(), &res, alpha).unwrap();
        let back = NaiveBayesModel::from_json(&model.to_json().unwrap()).unwrap();
        let a = model.predict(&query, &res).unwrap();
        let b = back.predict(&query, &res).unwrap();
        prop_assert_eq!(a.sense, b.sense);
        for (s, v) in &a.log_scores {
            prop_assert_eq!(v.to_bits(), b.log_scores[s].to_bits());
        }
    }
}

#[test]
fn separable_toy_corpus_is_learned_perfectly() {
    // disjoint vocabularies per sense, equal priors
    let mut data = Vec::new();
    for (label, words) in [("A", ["क", "ख", "ग"]), ("B", ["घ", "च", "छ"])] {
        for i in 0..6 {
            let toks: Vec<Token> = [words[i % 3], "T", words[(i + 1) % 3]]
                .iter()
                .map(|w| Token::new(w).unwrap())
                .collect();
            data.push(Instance::new(toks, 1, label).unwrap());
        }
    }
    let res = Resources::default();
    for method in [
        Method::Local,
        Method::Collocation,
        Method::BagNoStop,
        Method::LocalCollocation,
    ] {
        let spec = MethodSpec::new(method, WindowSize::new(1).unwrap());
        let model = NaiveBayesModel::train(&refs(&data), spec, &res, 1.0).unwrap();
        for inst in &data {
            assert_eq!(
                model.predict(inst, &res).unwrap().sense,
                inst.sense,
                "{method}"
            );
        }
    }
}

#[test]
fn empty_feature_set_scores_are_log_priors() {
    let data: Vec<Instance> = ["A", "A", "A", "B"]
        .iter()
        .map(|l| Instance::new(vec![Token::new("T").unwrap()], 0, l).unwrap())
        .collect();
    let model = NaiveBayesModel::train(&refs(&data), spec(), &Resources::default(), 1.0).unwrap();
    let scores = model.log_posterior(&FeatureSet::default());
    assert_eq!(scores["A"], 0.75f64.ln());
    assert_eq!(scores["B"], 0.25f64.ln());
}
