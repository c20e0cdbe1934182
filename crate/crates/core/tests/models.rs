use proptest::prelude::*;
use sentikit::corpus::{Dataset, Document, Label};
use sentikit::eval::{cross_validate, evaluate, ConfusionMatrix, EvaluationReport, Predictor, Trainer};
use sentikit::features::{
    information_gain, select_features, Column, Extractor, FeatureSpace, FeatureVector, ManualFeature, SpaceOptions,
};
use sentikit::learn::{
    cost_sensitive_predict, labels_to_instance_weights, predict_nb, predict_svm, predict_tree, train_nb, train_svm,
    train_tree, ClassifierKind, CostMatrix, SvmParams, TreeParams,
};
use sentikit::lexicon::Lexicon;
use sentikit::pipeline::{PipelineTrainer, TrainSpec};
use sentikit::{Error, PipelineConfig};

use Label::{Negative as Neg, Neutral as Neu, Positive as Pos};

fn fv(cols: &[usize]) -> FeatureVector {
    FeatureVector::from_pairs(cols.iter().map(|&c| (c, 1.0)).collect())
}

fn lex() -> Lexicon {
    Lexicon::from_entries("t", 1, [("good", 1.0), ("happy", 0.8), ("bad", -1.0)]).unwrap()
}

fn extractor() -> Extractor {
    Extractor::new(PipelineConfig::default(), lex())
}

#[test]
fn nb_query_equal_to_training_doc_wins() {
    let vectors = vec![fv(&[0]), fv(&[1]), fv(&[2])];
    let labels = vec![Neg, Neu, Pos];
    let m = train_nb(&vectors, &labels, 3, 1.0).unwrap();
    for (v, l) in vectors.iter().zip(&labels) {
        assert_eq!(predict_nb(&m, v).unwrap().0, *l);
    }
}

#[test]
fn nb_smoothing_keeps_unseen_features_possible() {
    // Feature 1 never occurs with Positive: P(present | pos) = 1 / (2 + 2).
    let vectors = vec![fv(&[0]), fv(&[0]), fv(&[1])];
    let labels = vec![Pos, Pos, Neg];
    let m = train_nb(&vectors, &labels, 2, 1.0).unwrap();
    let (_, post) = predict_nb(&m, &fv(&[1])).unwrap();
    assert!(post[Pos.index()] > 0.0);
    // pos: 2/3 * (1 - 3/4) * 1/4; neg: 1/3 * (1 - 1/3) * 2/3
    let jp = 2.0 / 3.0 * 0.25 * 0.25;
    let jn = 1.0 / 3.0 * (2.0 / 3.0) * (2.0 / 3.0);
    assert!((post[Pos.index()] - jp / (jp + jn)).abs() < 1e-12);
}

#[test]
fn nb_uniform_model_ties_to_negative() {
    let vectors = vec![fv(&[0]), fv(&[0]), fv(&[0])];
    let m = train_nb(&vectors, &[Pos, Neu, Neg], 1, 1.0).unwrap();
    assert_eq!(predict_nb(&m, &fv(&[0])).unwrap().0, Neg);
    assert_eq!(predict_nb(&m, &fv(&[])).unwrap().0, Neg);
}

#[test]
fn nb_empty_vector_uses_priors_and_absences() {
    let vectors = vec![fv(&[0]), fv(&[]), fv(&[])];
    let labels = vec![Pos, Neg, Neg];
    let m = train_nb(&vectors, &labels, 1, 1.0).unwrap();
    let (label, post) = predict_nb(&m, &fv(&[])).unwrap();
    // pos: 1/3 * (1 - 2/3); neg: 2/3 * (1 - 1/4)
    let jp = 1.0 / 3.0 / 3.0;
    let jn = 2.0 / 3.0 * 0.75;
    assert_eq!(label, Neg);
    assert!((post[Neg.index()] - jn / (jp + jn)).abs() < 1e-12);
}

fn separable_toy() -> (Vec<FeatureVector>, Vec<Label>) {
    // Two real-valued features; positives have x0 - x1 >= 1, negatives <= -1.
    let mut vectors = Vec::new();
    let mut labels = Vec::new();
    for i in 0..10 {
        let t = i as f64 * 0.1;
        vectors.push(FeatureVector::from_pairs(vec![(0, 1.5 + t), (1, 0.2 + t)]));
        labels.push(Pos);
        vectors.push(FeatureVector::from_pairs(vec![(0, 0.2 + t), (1, 1.5 + t)]));
        labels.push(Neg);
    }
    (vectors, labels)
}

#[test]
fn svm_fits_separable_toy() {
    let (vectors, labels) = separable_toy();
    let params = SvmParams {
        lambda: 0.01,
        epochs: 50,
        seed: 3,
    };
    let m = train_svm(&vectors, &labels, 2, None, &params).unwrap();
    for (v, l) in vectors.iter().zip(&labels) {
        assert_eq!(predict_svm(&m, v).unwrap(), *l);
    }
}

#[test]
fn svm_unit_weights_equal_no_weights() {
    let (vectors, labels) = separable_toy();
    let params = SvmParams::default();
    let ones = vec![1.0; labels.len()];
    let a = train_svm(&vectors, &labels, 2, None, &params).unwrap();
    let b = train_svm(&vectors, &labels, 2, Some(&ones), &params).unwrap();
    assert_eq!(a, b);
}

#[test]
fn svm_rejects_single_class() {
    let (vectors, _) = separable_toy();
    let labels = vec![Neu; vectors.len()];
    assert!(matches!(
        train_svm(&vectors, &labels, 2, None, &SvmParams::default()),
        Err(Error::SingleClassData)
    ));
}

#[test]
fn tree_single_predictive_feature_is_a_stump() {
    let vectors = vec![fv(&[0, 1]), fv(&[0]), fv(&[1]), fv(&[])];
    let labels = vec![Pos, Pos, Neg, Neg];
    let m = train_tree(&vectors, &labels, 2, &TreeParams::default()).unwrap();
    assert_eq!(m.depth(), 1);
    for (v, l) in vectors.iter().zip(&labels) {
        assert_eq!(predict_tree(&m, v).unwrap(), *l);
    }
}

#[test]
fn tree_pure_input_is_one_leaf() {
    let vectors = vec![fv(&[0]), fv(&[1]), fv(&[])];
    let m = train_tree(&vectors, &[Neu; 3], 2, &TreeParams::default()).unwrap();
    assert_eq!(m.nodes().len(), 1);
    assert_eq!(predict_tree(&m, &fv(&[0, 1])).unwrap(), Neu);
}

#[test]
fn expected_cost_example() {
    let mut rows = CostMatrix::uniform().rows();
    rows[Pos.index()][Neu.index()] = 5.0;
    let c = CostMatrix::new(rows).unwrap();
    // [neg, neu, pos] posterior. Expected costs:
    // pos .35 + .25 = .6, neu .4 * 5 + .25 = 2.25, neg .4 + .35 = .75.
    let post = [0.25, 0.35, 0.4];
    let e = c.expected_costs(&post);
    assert!((e[Pos.index()] - 0.6).abs() < 1e-12);
    assert!((e[Neu.index()] - 2.25).abs() < 1e-12);
    assert!((e[Neg.index()] - 0.75).abs() < 1e-12);
    assert_eq!(cost_sensitive_predict(&post, &c).unwrap(), Pos);
}

#[test]
fn degenerate_posterior_picks_its_class() {
    for label in Label::ALL {
        let mut post = [0.0; 3];
        post[label.index()] = 1.0;
        assert_eq!(cost_sensitive_predict(&post, &CostMatrix::default()).unwrap(), label);
    }
}

#[test]
fn instance_weight_examples() {
    let mut rows = CostMatrix::uniform().rows();
    rows[Pos.index()] = [3.0, 3.0, 0.0];
    let c = CostMatrix::new(rows).unwrap();
    assert_eq!(labels_to_instance_weights(&[Pos, Neg, Neu], &c), vec![3.0, 1.0, 1.0]);
    assert!(labels_to_instance_weights(&[], &c).is_empty());
}

#[test]
fn feature_space_examples() {
    let docs = [Document::new("1", "good day", Some(Pos)), Document::new("2", "bad day", Some(Neg))];
    let refs: Vec<&Document> = docs.iter().collect();
    let opts = SpaceOptions {
        manual_features: false,
        ..SpaceOptions::default()
    };
    let space = FeatureSpace::build(&refs, &extractor(), &opts).unwrap();
    let names: Vec<String> = space.columns().iter().map(|c| c.to_string()).collect();
    assert_eq!(names, ["good", "day", "bad"]);
    assert_eq!(space, FeatureSpace::build(&refs, &extractor(), &opts).unwrap());
    assert!(matches!(FeatureSpace::build(&[], &extractor(), &opts), Err(Error::EmptyTrainingData)));
}

#[test]
fn vectorize_examples() {
    let docs = [Document::new("1", "good good soooo happy", Some(Pos))];
    let refs: Vec<&Document> = docs.iter().collect();
    let ex = extractor();
    let space = FeatureSpace::build(&refs, &ex, &SpaceOptions::default()).unwrap();
    let v = space.vectorize_with("good good soooo happy", &ex);
    let good = space.column_of(&Column::Ngram("good".into())).unwrap();
    assert_eq!(v.get(good), 1.0);
    let elong = space.column_of(&Column::Manual(ManualFeature::ElongatedCount)).unwrap();
    assert_eq!(v.get(elong), 1.0);
    assert!(space.vectorize_with("", &ex).is_empty());
}

#[test]
fn information_gain_examples() {
    let space = FeatureSpace::from_columns(Default::default(), vec![Column::Ngram("f".into())]);
    // Balanced binary task, feature present iff positive.
    let ig = information_gain(&space, &[fv(&[0]), fv(&[0]), fv(&[]), fv(&[])], &[Pos, Pos, Neg, Neg]).unwrap();
    assert!((ig[0] - 1.0).abs() < 1e-12);
    // Present in 2/2 positives and 1/2 negatives.
    let ig = information_gain(&space, &[fv(&[0]), fv(&[0]), fv(&[0]), fv(&[])], &[Pos, Pos, Neg, Neg]).unwrap();
    assert!((ig[0] - 0.311_278_124_459_132_8).abs() < 1e-12);
    let zero = vec![0.0];
    assert!(matches!(select_features(&space, &zero, 0.0), Err(Error::NoFeaturesSurvive { .. })));
    assert!(select_features(&space, &zero, -1.0).is_err());
}

#[test]
fn eval_examples() {
    let r = evaluate(&[Pos, Neg, Neu], &[Pos, Neg, Neu]).unwrap();
    assert_eq!(r.accuracy, 1.0);
    assert_eq!((r.positive.f1, r.negative.f1, r.neutral.f1), (1.0, 1.0, 1.0));
    // Positive: P = 1/2, R = 1.
    let r = evaluate(&[Pos, Pos], &[Pos, Neg]).unwrap();
    assert!((r.positive.f1 - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(r.neutral.f1, 0.0);
}

struct Majority;
struct Always(Label);

impl Trainer for Majority {
    type Model = Always;

    fn fit(&self, train: &[&Document]) -> sentikit::Result<Always> {
        let pos = train.iter().filter(|d| d.label == Some(Pos)).count();
        Ok(Always(if 2 * pos >= train.len() { Pos } else { Neg }))
    }
}

impl Predictor for Always {
    fn predict(&self, _: &Document) -> sentikit::Result<Label> {
        Ok(self.0)
    }
}

#[test]
fn majority_dummy_on_sixty_forty() {
    let docs = (0..50)
        .map(|i| Document::new(i.to_string(), "x", Some(if i < 30 { Pos } else { Neg })))
        .collect();
    let d = Dataset::new(docs).unwrap();
    let r = cross_validate(&d, &Majority, 5, 0).unwrap();
    assert!((r.pooled.accuracy - 0.6).abs() < 1e-12);
    assert_eq!(r.predictions.len(), 50);
}

fn separable_corpus() -> Dataset {
    let mut docs = Vec::new();
    for i in 0..15 {
        docs.push(Document::new(format!("p{i}"), "good happy good", Some(Pos)));
        docs.push(Document::new(format!("n{i}"), "bad awful bad", Some(Neg)));
        docs.push(Document::new(format!("u{i}"), "bus friday", Some(Neu)));
    }
    Dataset::new(docs).unwrap()
}

#[test]
fn separable_corpus_cross_validates_perfectly() {
    let d = separable_corpus();
    for kind in [ClassifierKind::Nb, ClassifierKind::Svm, ClassifierKind::Tree] {
        let trainer = PipelineTrainer {
            lexicon: lex(),
            config: PipelineConfig::default(),
            spec: TrainSpec {
                classifier: kind,
                ..TrainSpec::default()
            },
        };
        let r = cross_validate(&d, &trainer, 5, 1).unwrap();
        assert_eq!(r.pooled.accuracy, 1.0, "{kind:?}");
        assert_eq!(r.pooled.confusion.total(), d.len());
    }
}

fn word_docs() -> impl Strategy<Value = Vec<(Vec<usize>, usize)>> {
    prop::collection::vec((prop::collection::vec(0usize..8, 0..6), 0usize..3), 2..25)
}

const WORDS: [&str; 8] = ["good", "bad", "happy", "bus", "not", "!", ":-)", "soooo"];

fn corpus_from(spec: &[(Vec<usize>, usize)]) -> Vec<Document> {
    spec.iter()
        .enumerate()
        .map(|(i, (ws, l))| {
            let text: Vec<&str> = ws.iter().map(|&w| WORDS[w]).collect();
            Document::new(i.to_string(), text.join(" "), Some(Label::ALL[*l]))
        })
        .collect()
}

proptest! {
    #[test]
    fn vectors_stay_in_space_and_features_in_range(spec in word_docs()) {
        let docs = corpus_from(&spec);
        let refs: Vec<&Document> = docs.iter().collect();
        let ex = extractor();
        let space = FeatureSpace::build(&refs, &ex, &SpaceOptions::default()).unwrap();
        let score = space.column_of(&Column::Manual(ManualFeature::LexiconScore)).unwrap();
        for d in &docs {
            let v = space.vectorize_with(&d.text, &ex);
            prop_assert!(v.max_column().is_none_or(|c| c < space.len()));
            for &(c, x) in v.entries() {
                match &space.columns()[c] {
                    _ if c == score => prop_assert!((-1.0..=1.0).contains(&x)),
                    Column::Manual(ManualFeature::LastTokenEmoticonSign)
                    | Column::Manual(ManualFeature::MaxScore)
                    | Column::Manual(ManualFeature::MinScore) => prop_assert!((-1.0..=1.0).contains(&x)),
                    _ => prop_assert!(x >= 0.0 && x.fract() == 0.0, "{} = {}", space.columns()[c], x),
                }
            }
        }
    }

    #[test]
    fn ig_bounded_by_class_entropy(spec in word_docs()) {
        let docs = corpus_from(&spec);
        let labels: Vec<Label> = docs.iter().map(|d| d.label.unwrap()).collect();
        prop_assume!(labels.iter().any(|&l| l != labels[0]));
        let refs: Vec<&Document> = docs.iter().collect();
        let ex = extractor();
        let space = FeatureSpace::build(&refs, &ex, &SpaceOptions::default()).unwrap();
        let vectors: Vec<_> = docs.iter().map(|d| space.vectorize_with(&d.text, &ex)).collect();
        let mut counts = [0usize; 3];
        for l in &labels {
            counts[l.index()] += 1;
        }
        let h = sentikit::features::entropy(&counts);
        for g in information_gain(&space, &vectors, &labels).unwrap() {
            prop_assert!((0.0..=h + 1e-12).contains(&g));
        }
    }

    #[test]
    fn selection_commutes_with_projection(spec in word_docs(), threshold in 0.0f64..0.3) {
        let docs = corpus_from(&spec);
        let labels: Vec<Label> = docs.iter().map(|d| d.label.unwrap()).collect();
        prop_assume!(labels.iter().any(|&l| l != labels[0]));
        let refs: Vec<&Document> = docs.iter().collect();
        let ex = extractor();
        let space = FeatureSpace::build(&refs, &ex, &SpaceOptions::default()).unwrap();
        let vectors: Vec<_> = docs.iter().map(|d| space.vectorize_with(&d.text, &ex)).collect();
        let ig = information_gain(&space, &vectors, &labels).unwrap();
        let Ok(selected) = select_features(&space, &ig, threshold) else { return Ok(()); };
        for (d, v) in docs.iter().zip(&vectors) {
            prop_assert_eq!(selected.vectorize_with(&d.text, &ex), selected.project(v, &space));
        }
    }

    #[test]
    fn tree_fits_consistent_data(rows in prop::collection::btree_map(prop::collection::btree_set(0usize..4, 0..=4), 0usize..3, 1..16)) {
        let vectors: Vec<_> = rows.keys().map(|s| fv(&s.iter().copied().collect::<Vec<_>>())).collect();
        let labels: Vec<_> = rows.values().map(|&l| Label::ALL[l]).collect();
        let m = train_tree(&vectors, &labels, 4, &TreeParams { max_depth: 4, min_leaf: 1 }).unwrap();
        for (v, l) in vectors.iter().zip(&labels) {
            prop_assert_eq!(predict_tree(&m, v).unwrap(), *l);
        }
    }

    #[test]
    fn uniform_costs_are_argmax_on_grid(a in 0u32..=20, b in 0u32..=20) {
        prop_assume!(a + b <= 20);
        let post = [a as f64 / 20.0, b as f64 / 20.0, (20 - a - b) as f64 / 20.0];
        prop_assert_eq!(
            cost_sensitive_predict(&post, &CostMatrix::uniform()).unwrap(),
            sentikit::learn::argmax_label(&post)
        );
    }

    #[test]
    fn f1_between_precision_and_recall(m in prop::array::uniform3(prop::array::uniform3(0usize..20))) {
        let r = EvaluationReport::from_confusion(ConfusionMatrix(m));
        for l in Label::ALL {
            let c = r.class(l);
            if c.precision > 0.0 && c.recall > 0.0 {
                prop_assert!(c.f1 >= c.precision.min(c.recall) - 1e-12);
                prop_assert!(c.f1 <= c.precision.max(c.recall) + 1e-12);
            }
        }
    }

    #[test]
    fn semeval_f_ignores_neutral_cell(m in prop::array::uniform3(prop::array::uniform3(0usize..20)), x in 0usize..50) {
        let base = EvaluationReport::from_confusion(ConfusionMatrix(m));
        let mut changed = m;
        changed[Neu.index()][Neu.index()] = x;
        let other = EvaluationReport::from_confusion(ConfusionMatrix(changed));
        prop_assert_eq!(base.semeval_f, other.semeval_f);
    }

    #[test]
    fn cv_partitions_the_dataset(spec in prop::collection::vec((prop::collection::vec(0usize..8, 0..6), 0usize..3), 30..50), k in 2usize..5) {
        let d = Dataset::new(corpus_from(&spec)).unwrap();
        prop_assume!(Label::ALL.iter().all(|&l| d.count(l) == 0 || d.count(l) >= k));
        let r = cross_validate(&d, &Majority, k, 0).unwrap();
        prop_assert_eq!(r.pooled.confusion.total(), d.len());
        let ids: Vec<usize> = r.predictions.iter().map(|&(i, _)| i).collect();
        prop_assert_eq!(ids, (0..d.len()).collect::<Vec<_>>());
    }
}
