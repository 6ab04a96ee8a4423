//! Analysis layer for experiment batches: sample-mean grouping, one-way
//! ANOVA, and confidence intervals based on the pooled standard deviation.

mod student_t;

pub use student_t::{incomplete_beta, ln_gamma, t_cdf, t_quantile};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("group size must be positive")]
    ZeroGroupSize,
    #[error("{len} observations cannot be grouped into chunks of {group_size}")]
    NonDivisibleLength { len: usize, group_size: usize },
    #[error("ANOVA needs at least 2 groups, got {0}")]
    TooFewGroups(usize),
    #[error("group '{0}' has fewer than 2 observations")]
    GroupTooSmall(String),
    #[error("pooled intervals need equal group sizes (found {0} and {1})")]
    UnequalGroupSizes(usize, usize),
    #[error("confidence must lie strictly between 0 and 1 (got {0})")]
    InvalidConfidence(f64),
}

/// Named observation groups, one per treatment.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSamples {
    groups: Vec<(String, Vec<f64>)>,
}

impl GroupedSamples {
    pub fn new(groups: Vec<(String, Vec<f64>)>) -> Self {
        Self { groups }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.groups.iter().map(|(name, _)| name.as_str())
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn observations(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.groups
            .iter()
            .map(|(name, values)| (name.as_str(), values.as_slice()))
    }
}

/// One-way ANOVA decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct AnovaResult {
    pub f_statistic: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub group_means: Vec<f64>,
    pub grand_mean: f64,
    pub ss_between: f64,
    pub ss_within: f64,
    pub ms_between: f64,
    pub ms_within: f64,
}

/// Per-group confidence interval around the group mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub mean: f64,
    pub half_width: f64,
}

/// Reduces consecutive chunks of `group_size` raw observations to their
/// arithmetic means. The input length must divide evenly.
pub fn group_sample_means(raw: &[f64], group_size: usize) -> Result<Vec<f64>, StatsError> {
    if group_size == 0 {
        return Err(StatsError::ZeroGroupSize);
    }
    if !raw.len().is_multiple_of(group_size) {
        return Err(StatsError::NonDivisibleLength {
            len: raw.len(),
            group_size,
        });
    }
    Ok(raw
        .chunks_exact(group_size)
        .map(|chunk| chunk.iter().sum::<f64>() / group_size as f64)
        .collect())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Standard one-way decomposition: `F = MS_between / MS_within`.
///
/// A zero within-group mean square yields `F = +inf` when the groups still
/// differ and `F = 0` when they do not.
pub fn anova_oneway(groups: &GroupedSamples) -> Result<AnovaResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups(groups.len()));
    }
    for (name, values) in groups.observations() {
        if values.len() < 2 {
            return Err(StatsError::GroupTooSmall(name.to_string()));
        }
    }
    let total_count: usize = groups.observations().map(|(_, v)| v.len()).sum();
    let grand_mean = groups
        .observations()
        .flat_map(|(_, v)| v.iter())
        .sum::<f64>()
        / total_count as f64;

    let group_means: Vec<f64> = groups.observations().map(|(_, v)| mean(v)).collect();
    let ss_between: f64 = groups
        .observations()
        .zip(&group_means)
        .map(|((_, v), &m)| v.len() as f64 * (m - grand_mean) * (m - grand_mean))
        .sum();
    let ss_within: f64 = groups
        .observations()
        .zip(&group_means)
        .map(|((_, v), &m)| v.iter().map(|&x| (x - m) * (x - m)).sum::<f64>())
        .sum();

    let df_between = groups.len() - 1;
    let df_within = total_count - groups.len();
    let ms_between = ss_between / df_between as f64;
    let ms_within = ss_within / df_within as f64;
    let f_statistic = if ms_within > 0.0 {
        ms_between / ms_within
    } else if ms_between > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(AnovaResult {
        f_statistic,
        df_between,
        df_within,
        group_means,
        grand_mean,
        ss_between,
        ss_within,
        ms_between,
        ms_within,
    })
}

/// Per-group `mean ± t * s_pooled / sqrt(m)` intervals, where `s_pooled`
/// is the square root of the ANOVA within-group mean square and `t` is the
/// two-sided critical value at the requested confidence.
pub fn pooled_confidence_intervals(
    groups: &GroupedSamples,
    confidence: f64,
) -> Result<Vec<ConfidenceInterval>, StatsError> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(StatsError::InvalidConfidence(confidence));
    }
    let mut sizes = groups.observations().map(|(_, v)| v.len());
    let first = sizes.next().unwrap_or(0);
    if let Some(other) = sizes.find(|&s| s != first) {
        return Err(StatsError::UnequalGroupSizes(first, other));
    }
    let anova = anova_oneway(groups)?;
    let t = t_quantile((1.0 + confidence) / 2.0, anova.df_within as f64);
    let s_pooled = anova.ms_within.sqrt();
    let half_width = t * s_pooled / (first as f64).sqrt();
    Ok(anova
        .group_means
        .iter()
        .map(|&mean| ConfidenceInterval { mean, half_width })
        .collect())
}
