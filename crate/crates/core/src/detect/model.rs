//! The unified classifier interface over the five model families, plus
//! dataset-level training/evaluation and per-station compromise flags.

use serde::{Deserialize, Serialize};

use super::boost::{BoostParams, GradientBoostModel};
use super::dataset::{Dataset, LabeledSample};
use super::forest::{ForestParams, RandomForestModel};
use super::metrics::{ConfusionMatrix, MetricsReport};
use super::mlp::{MlpModel, MlpParams};
use super::svm::{LinearSvmModel, SvmParams};
use super::tree::{DecisionTreeModel, TreeParams};
use super::DetectError;
use crate::agent::Normalizer;
use crate::scalar::Scalar;
use crate::util::derive_seed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The five supported classifier families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    DecisionTree,
    RandomForest,
    GradientBoostedTrees,
    LinearSvm,
    Mlp,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 5] = [
        ClassifierKind::DecisionTree,
        ClassifierKind::RandomForest,
        ClassifierKind::GradientBoostedTrees,
        ClassifierKind::LinearSvm,
        ClassifierKind::Mlp,
    ];

    /// Stable name used in report files.
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierKind::DecisionTree => "decision_tree",
            ClassifierKind::RandomForest => "random_forest",
            ClassifierKind::GradientBoostedTrees => "gradient_boosted_trees",
            ClassifierKind::LinearSvm => "linear_svm",
            ClassifierKind::Mlp => "mlp",
        }
    }
}

/// Hyperparameters for every family, with the calibrated defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DetectParams {
    pub tree: TreeParams,
    pub forest: ForestParams,
    pub boost: BoostParams,
    pub svm: SvmParams,
    pub mlp: MlpParams,
}

/// A trained classifier of any family. Tree families consume raw features;
/// the SVM and MLP carry their normalization constants internally, so
/// `predict` always takes raw features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierModel<T> {
    DecisionTree(DecisionTreeModel<T>),
    RandomForest(RandomForestModel<T>),
    GradientBoostedTrees(GradientBoostModel<T>),
    LinearSvm(LinearSvmModel<T>),
    Mlp(MlpModel<T>),
}

impl<T: Scalar> ClassifierModel<T> {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierModel::DecisionTree(_) => ClassifierKind::DecisionTree,
            ClassifierModel::RandomForest(_) => ClassifierKind::RandomForest,
            ClassifierModel::GradientBoostedTrees(_) => ClassifierKind::GradientBoostedTrees,
            ClassifierModel::LinearSvm(_) => ClassifierKind::LinearSvm,
            ClassifierModel::Mlp(_) => ClassifierKind::Mlp,
        }
    }

    pub fn predict(&self, features: &[T]) -> Result<usize, DetectError> {
        match self {
            ClassifierModel::DecisionTree(m) => m.predict(features),
            ClassifierModel::RandomForest(m) => m.predict(features),
            ClassifierModel::GradientBoostedTrees(m) => m.predict(features),
            ClassifierModel::LinearSvm(m) => m.predict(features),
            ClassifierModel::Mlp(m) => m.predict(features),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, DetectError> {
        serde_json::from_str(json).map_err(|e| DetectError::Csv(e.to_string()))
    }
}

/// Trains one classifier on the dataset's training split.
///
/// `normalizer` feeds the margin/gradient families (SVM, MLP); tree families
/// split on raw physical values.
pub fn train<T: Scalar>(
    kind: ClassifierKind,
    dataset: &Dataset<T>,
    params: &DetectParams,
    normalizer: &Normalizer<T>,
    seed: u64,
) -> Result<ClassifierModel<T>, DetectError> {
    let train = dataset.train_samples()?;
    if train.is_empty() {
        return Err(DetectError::EmptyTrainingSet);
    }
    let mut present = vec![false; dataset.n_classes()];
    for s in &train {
        present[s.label] = true;
    }
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(DetectError::SingleClass);
    }
    let dim = dataset.dim();
    let n_classes = dataset.n_classes();
    Ok(match kind {
        ClassifierKind::DecisionTree => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            ClassifierModel::DecisionTree(DecisionTreeModel::fit(
                &train,
                dim,
                n_classes,
                &params.tree,
                None,
                &mut rng,
            )?)
        }
        ClassifierKind::RandomForest => ClassifierModel::RandomForest(RandomForestModel::fit(
            &train,
            dim,
            n_classes,
            &params.forest,
            seed,
        )?),
        ClassifierKind::GradientBoostedTrees => ClassifierModel::GradientBoostedTrees(
            GradientBoostModel::fit(&train, dim, n_classes, &params.boost)?,
        ),
        ClassifierKind::LinearSvm => ClassifierModel::LinearSvm(LinearSvmModel::fit(
            &train,
            dim,
            n_classes,
            &params.svm,
            normalizer,
            seed,
        )?),
        ClassifierKind::Mlp => ClassifierModel::Mlp(MlpModel::fit(
            &train,
            dim,
            n_classes,
            &params.mlp,
            normalizer,
            seed,
        )?),
    })
}

/// Evaluates a model on explicit samples.
pub fn evaluate_on<T: Scalar>(
    model: &ClassifierModel<T>,
    samples: &[&LabeledSample<T>],
    n_classes: usize,
) -> Result<(ConfusionMatrix, MetricsReport), DetectError> {
    if samples.is_empty() {
        return Err(DetectError::EmptySplit);
    }
    let mut matrix = ConfusionMatrix::new(n_classes);
    for s in samples {
        matrix.record(s.label, model.predict(&s.features)?);
    }
    let report = MetricsReport::from_confusion(&matrix);
    Ok((matrix, report))
}

/// Evaluates on the dataset's held-out test split.
pub fn evaluate<T: Scalar>(
    model: &ClassifierModel<T>,
    dataset: &Dataset<T>,
) -> Result<(ConfusionMatrix, MetricsReport), DetectError> {
    evaluate_on(model, &dataset.test_samples()?, dataset.n_classes())
}

/// Trains K one-vs-rest binary forests from a fine-grained dataset: model
/// `k` flags whether station `k`'s features look compromised. This covers
/// multi-target attacks, where multiclass labels are undefined.
pub fn train_per_station<T: Scalar>(
    dataset: &Dataset<T>,
    params: &DetectParams,
    seed: u64,
) -> Result<Vec<ClassifierModel<T>>, DetectError> {
    let stations = dataset.n_classes() - 1;
    let mut models = Vec::with_capacity(stations);
    for k in 0..stations {
        let samples: Vec<LabeledSample<T>> = dataset
            .samples()
            .iter()
            .map(|s| LabeledSample {
                features: s.features.clone(),
                label: usize::from(s.label == k + 1),
            })
            .collect();
        let mut binary = Dataset::from_samples(samples, 2)?;
        binary.stratified_split(0.8, derive_seed(seed, &format!("per-station-split-{k}")));
        let model = train(
            ClassifierKind::RandomForest,
            &binary,
            params,
            &Normalizer::identity(dataset.dim()),
            derive_seed(seed, &format!("per-station-{k}")),
        )?;
        models.push(model);
    }
    Ok(models)
}

/// Independent per-station compromise flags from K one-vs-rest models.
pub fn per_station_scores<T: Scalar>(
    models: &[ClassifierModel<T>],
    features: &[T],
) -> Result<Vec<bool>, DetectError> {
    models
        .iter()
        .map(|m| Ok(m.predict(features)? == 1))
        .collect()
}
