//! Reductions over ingested model outputs and crowd votes: expected age from
//! a 101-way softmax, continuous gender score, weighted-vote labels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const AGE_SOFTMAX_LEN: usize = 101;
/// Allowed deviation of a softmax sum from 1.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-6;
/// Group boundaries in years, half-open: `[0,4) [4,13) ... [61,120]`.
pub const AGE_GROUP_EDGES: [f64; 8] = [0.0, 4.0, 13.0, 20.0, 31.0, 46.0, 61.0, 120.0];

/// Summed weights closer than this (relative) count as a tie.
const TIE_RELATIVE: f64 = 1e-12;

/// Declaration order is the tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenderLabel {
    Female,
    Male,
}

impl GenderLabel {
    pub const ALL: [GenderLabel; 2] = [GenderLabel::Female, GenderLabel::Male];

    /// Numeric coding used in feature tables: male 1, female 0.
    pub fn code(self) -> f64 {
        match self {
            GenderLabel::Female => 0.0,
            GenderLabel::Male => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AgeGroup {
    #[serde(rename = "0-3")]
    Infant,
    #[serde(rename = "4-12")]
    Child,
    #[serde(rename = "13-19")]
    Teen,
    #[serde(rename = "20-30")]
    YoungAdult,
    #[serde(rename = "31-45")]
    Adult,
    #[serde(rename = "46-60")]
    MiddleAged,
    #[serde(rename = "61-")]
    Senior,
}

impl AgeGroup {
    pub const ALL: [AgeGroup; 7] = [
        AgeGroup::Infant,
        AgeGroup::Child,
        AgeGroup::Teen,
        AgeGroup::YoungAdult,
        AgeGroup::Adult,
        AgeGroup::MiddleAged,
        AgeGroup::Senior,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_years(years: f64) -> AgeGroup {
        let i = AGE_GROUP_EDGES[1..7].iter().take_while(|&&e| years >= e).count();
        AgeGroup::ALL[i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vote {
    pub annotator_id: String,
    pub gender_label: GenderLabel,
    pub age_group: AgeGroup,
    pub age_value: f64,
    pub annotator_weight: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuxAnnotations {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub age_softmax: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gender_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub votes: Option<Vec<Vote>>,
}

impl AuxAnnotations {
    pub fn validate(&self) -> Result<()> {
        if let Some(p) = &self.age_softmax {
            check_distribution(p)?;
        }
        if let Some(g) = self.gender_score {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::InvalidRecord(format!("gender_score {g} outside [0, 1]")));
            }
        }
        for v in self.votes.iter().flatten() {
            if !(0.0..=1.0).contains(&v.annotator_weight) {
                return Err(Error::InvalidRecord(format!(
                    "annotator {} weight {} outside [0, 1]",
                    v.annotator_id, v.annotator_weight
                )));
            }
            if !v.age_value.is_finite() || v.age_value < 0.0 {
                return Err(Error::InvalidRecord(format!("annotator {} age {}", v.annotator_id, v.age_value)));
            }
        }
        Ok(())
    }
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.len() != AGE_SOFTMAX_LEN {
        return Err(Error::InvalidDistribution(format!("expected {AGE_SOFTMAX_LEN} probabilities, got {}", p.len())));
    }
    if let Some(i) = p.iter().position(|&v| !v.is_finite() || v < 0.0) {
        return Err(Error::InvalidDistribution(format!("entry {i} is {}", p[i])));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("sums to {sum}")));
    }
    Ok(())
}

/// `E(P) = sum_i p_i * i` over years 0..=100.
pub fn expected_age(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    Ok(p.iter().enumerate().map(|(i, &pi)| pi * i as f64).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoteOutcome {
    pub gender_label: GenderLabel,
    pub gender_tie: bool,
    pub age_group: AgeGroup,
    pub age_group_tie: bool,
    pub age_value: f64,
    /// Whether `age_value` falls inside `age_group`.
    pub age_consistent: bool,
}

/// Index of the largest score (first in order on ties) and whether it tied.
fn argmax_with_tie(scores: &[f64]) -> (usize, bool) {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_RELATIVE * max.abs();
    let mut winners = scores.iter().enumerate().filter(|(_, &s)| max - s <= tol);
    let (best, _) = winners.next().expect("non-empty scores");
    (best, winners.next().is_some())
}

pub fn weighted_vote(votes: &[Vote]) -> Result<VoteOutcome> {
    if votes.is_empty() {
        return Err(Error::NoVotes);
    }
    let total: f64 = votes.iter().map(|v| v.annotator_weight).sum();
    if total <= 0.0 {
        return Err(Error::InvalidDistribution("all annotator weights are zero".into()));
    }
    let mut gender = [0.0; 2];
    let mut age = [0.0; 7];
    let mut age_sum = 0.0;
    for v in votes {
        gender[v.gender_label as usize] += v.annotator_weight;
        age[v.age_group.index()] += v.annotator_weight;
        age_sum += v.annotator_weight * v.age_value;
    }
    let (g, gender_tie) = argmax_with_tie(&gender);
    let (a, age_group_tie) = argmax_with_tie(&age);
    let age_value = age_sum / total;
    let age_group = AgeGroup::ALL[a];
    Ok(VoteOutcome {
        gender_label: GenderLabel::ALL[g],
        gender_tie,
        age_group,
        age_group_tie,
        age_value,
        age_consistent: AgeGroup::from_years(age_value) == age_group,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregatedAnnotations {
    pub age_pred: Option<f64>,
    pub gender_pred: Option<f64>,
    pub votes: Option<VoteOutcome>,
}

pub fn aggregate(aux: &AuxAnnotations) -> Result<AggregatedAnnotations> {
    Ok(AggregatedAnnotations {
        age_pred: aux.age_softmax.as_deref().map(expected_age).transpose()?,
        gender_pred: aux.gender_score,
        votes: aux.votes.as_deref().map(weighted_vote).transpose()?,
    })
}
