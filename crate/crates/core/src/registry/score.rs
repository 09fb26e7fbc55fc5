use super::LanguageRecord;
use crate::error::RegistryError;

/// Prioritization policy. Editing these re-weights the registry; the
/// monotonicity tests guard the signs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreWeights {
    pub online_evidence: f64,
    pub formal_publications: f64,
    pub smartphone_trend: f64,
    pub speakers: f64,
    /// Speakers are scored as `log10(1 + speakers / speaker_unit)`.
    pub speaker_unit: f64,
    pub feature_request: f64,
    pub feature_request_cap: u32,
    pub official_status: f64,
    pub usable_alternative: f64,
}

pub const DEFAULT_WEIGHTS: ScoreWeights = ScoreWeights {
    online_evidence: 3.0,
    formal_publications: 2.0,
    smartphone_trend: 2.0,
    speakers: 2.0,
    speaker_unit: 1e5,
    feature_request: 0.3,
    feature_request_cap: 10,
    official_status: 2.0,
    usable_alternative: -1.0,
};

/// Lower score bounds of buckets 1, 2 and 3; anything lower is bucket 4.
pub const BUCKET_THRESHOLDS: [f64; 3] = [8.0, 5.0, 2.0];

/// Bucket 1 is the most urgent. Languages not ready for
/// internationalization never rank above bucket 3.
pub fn bucket_for(score: f64, i18n_ready: bool) -> u8 {
    let b = BUCKET_THRESHOLDS
        .iter()
        .position(|&t| score >= t)
        .map_or(4, |i| i as u8 + 1);
    if i18n_ready {
        b
    } else {
        b.max(3)
    }
}

pub fn priority_score(record: &LanguageRecord) -> Result<(f64, u8), RegistryError> {
    record.validate()?;
    let w = DEFAULT_WEIGHTS;
    let f = &record.factors;
    let score = w.online_evidence * f64::from(f.online_evidence)
        + w.formal_publications * f64::from(f.formal_publications)
        + w.smartphone_trend * f64::from(f.smartphone_trend)
        + w.speakers * (1.0 + record.speaker_estimate as f64 / w.speaker_unit).log10()
        + w.feature_request * f64::from(f.feature_requests.min(w.feature_request_cap))
        + w.official_status * f64::from(u8::from(f.official_status))
        + w.usable_alternative * f64::from(u8::from(f.usable_alternative_exists));
    Ok((score, bucket_for(score, f.i18n_ready)))
}
