use crate::config::TrainConfig;
use crate::corpus::Dataset;
use crate::error::{Error, Result};
use crate::label::StanceLabel;
use crate::nn::{predict_from_logits, Logits, MlpParams};
use crate::text::{FeatureExtractor, FeatureVector};

/// Everything needed to classify new headline/body pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub features: FeatureExtractor,
    pub params: MlpParams,
    pub config: TrainConfig,
}

impl ModelBundle {
    /// Checks that the network input matches the feature layout.
    pub fn new(features: FeatureExtractor, params: MlpParams, config: TrainConfig) -> Result<Self> {
        if params.input_dim() != features.input_dim() {
            return Err(Error::DimensionMismatch { expected: features.input_dim(), found: params.input_dim() });
        }
        Ok(ModelBundle { features, params, config })
    }

    pub fn featurize(&self, dataset: &Dataset) -> Vec<FeatureVector> {
        self.features.featurize(dataset)
    }

    pub fn logits(&self, dataset: &Dataset) -> Result<Vec<Logits>> {
        dataset.validate()?;
        self.featurize(dataset).iter().map(|x| self.params.logits(x)).collect()
    }

    pub fn predict(&self, dataset: &Dataset) -> Result<Vec<StanceLabel>> {
        Ok(self.logits(dataset)?.iter().map(predict_from_logits).collect())
    }

    pub fn predict_pair(&self, headline: &str, body: &str) -> Result<StanceLabel> {
        self.params.predict(&self.features.features(headline, body))
    }
}
