//! Shannon entropy and transmission (mutual information) over binary
//! presence/absence axes.
//!
//! Every quantity is computed in bits. Outcomes of a `k`-axis distribution
//! are indexed with axis 0 as the most significant bit, so for three axes
//! `(u, i, g)` lives at `u << 2 | i << 1 | g`.
//!
//! The trivariate transmission is available in two algebraically equivalent
//! forms:
//!
//! ```text
//! T(xyz) = H(x) + H(y) + H(z) - H(xy) - H(xz) - H(yz) + H(xyz)
//! T(xyz) = Σ P(xyz) log2 [ P(xy) P(xz) P(yz) / (P(x) P(y) P(z) P(xyz)) ]
//! ```
//!
//! Unlike its bivariate counterpart, `T(xyz)` is signed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `Σ p = 1` accepted by [`JointDistribution::new`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Bit,
    Millibit,
    Nat,
}

impl Unit {
    /// Number of this unit in one bit.
    pub fn per_bit(self) -> f64 {
        match self {
            Unit::Bit => 1.0,
            Unit::Millibit => 1000.0,
            Unit::Nat => std::f64::consts::LN_2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Unit::Bit => "bit",
            Unit::Millibit => "millibit",
            Unit::Nat => "nat",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Unit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bit" | "bits" => Ok(Unit::Bit),
            "millibit" | "millibits" | "mbit" => Ok(Unit::Millibit),
            "nat" | "nats" => Ok(Unit::Nat),
            other => Err(format!(
                "unknown unit '{other}' (expected bit, millibit or nat)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmissionValue {
    pub value: f64,
    pub unit: Unit,
}

impl TransmissionValue {
    pub fn bits(value: f64) -> Self {
        TransmissionValue {
            value,
            unit: Unit::Bit,
        }
    }

    pub fn to_unit(self, target: Unit) -> Self {
        convert_units(self, target)
    }
}

impl fmt::Display for TransmissionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit)
    }
}

/// Normalised probabilities over the `2^k` outcomes of `k` binary axes,
/// `k ∈ {1, 2, 3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    axis_count: usize,
    probabilities: Vec<f64>,
}

impl JointDistribution {
    pub fn new(axis_count: usize, probabilities: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&axis_count) {
            return Err(Error::InvalidAxes(format!(
                "axis count must be 1, 2 or 3, got {axis_count}"
            )));
        }
        let expected = 1usize << axis_count;
        if probabilities.len() != expected {
            return Err(Error::InvalidDistribution(format!(
                "{axis_count} axes need {expected} probabilities, got {}",
                probabilities.len()
            )));
        }
        if let Some((idx, p)) = probabilities
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "probability at outcome {idx} is {p}"
            )));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(JointDistribution {
            axis_count,
            probabilities,
        })
    }

    /// Independent binary axes with `P(axis k present) = marginals[k]`.
    pub fn product(marginals: &[f64]) -> Result<Self> {
        if marginals.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidDistribution(format!(
                "marginals must lie in [0, 1]: {marginals:?}"
            )));
        }
        let k = marginals.len();
        let probabilities = (0..1usize << k.min(3))
            .map(|outcome| {
                marginals
                    .iter()
                    .enumerate()
                    .map(|(axis, &p)| {
                        if bit(outcome, axis, k) == 1 {
                            p
                        } else {
                            1.0 - p
                        }
                    })
                    .product()
            })
            .collect();
        JointDistribution::new(k, probabilities)
    }

    pub fn axis_count(&self) -> usize {
        self.axis_count
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Probability of one outcome, `states[a] ∈ {0, 1}` per axis.
    pub fn p(&self, states: &[u8]) -> f64 {
        debug_assert_eq!(states.len(), self.axis_count);
        let idx = states
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | usize::from(s != 0));
        self.probabilities[idx]
    }
}

#[inline]
fn bit(outcome: usize, axis: usize, axis_count: usize) -> usize {
    (outcome >> (axis_count - 1 - axis)) & 1
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

pub fn entropy(dist: &JointDistribution) -> TransmissionValue {
    let h = -dist.probabilities.iter().map(|&p| plogp(p)).sum::<f64>();
    // -0.0 and rounding residue on point masses
    TransmissionValue::bits(h.max(0.0))
}

/// Sum out every axis not in `kept_axes`. The result keeps the surviving
/// axes in ascending order.
pub fn marginalize(dist: &JointDistribution, kept_axes: &[usize]) -> Result<JointDistribution> {
    if kept_axes.is_empty() {
        return Err(Error::InvalidAxes("kept axis set is empty".into()));
    }
    let mut kept = kept_axes.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != kept_axes.len() {
        return Err(Error::InvalidAxes(format!(
            "duplicate axes in {kept_axes:?}"
        )));
    }
    if let Some(&bad) = kept.iter().find(|&&a| a >= dist.axis_count) {
        return Err(Error::InvalidAxes(format!(
            "axis {bad} out of range for a {}-axis distribution",
            dist.axis_count
        )));
    }

    let k = dist.axis_count;
    let out_k = kept.len();
    let mut out = vec![0.0; 1 << out_k];
    for (outcome, &p) in dist.probabilities.iter().enumerate() {
        let idx = kept
            .iter()
            .fold(0usize, |acc, &axis| (acc << 1) | bit(outcome, axis, k));
        out[idx] += p;
    }
    Ok(JointDistribution {
        axis_count: out_k,
        probabilities: out,
    })
}

fn require_axes(dist: &JointDistribution, n: usize) -> Result<()> {
    if dist.axis_count != n {
        return Err(Error::InvalidAxes(format!(
            "expected a {n}-axis distribution, got {} axes",
            dist.axis_count
        )));
    }
    Ok(())
}

fn marginal_entropy(dist: &JointDistribution, axes: &[usize]) -> f64 {
    // axes are validated by the callers
    entropy(&marginalize(dist, axes).expect("valid axes")).value
}

/// `H(x) + H(y) - H(xy)`; nonnegative.
pub fn transmission2(dist: &JointDistribution) -> Result<TransmissionValue> {
    require_axes(dist, 2)?;
    let t = marginal_entropy(dist, &[0]) + marginal_entropy(dist, &[1]) - entropy(dist).value;
    Ok(TransmissionValue::bits(t.max(0.0)))
}

/// Pairwise transmission between two axes of a 3-axis distribution.
pub fn pairwise_transmission(
    dist: &JointDistribution,
    a: usize,
    b: usize,
) -> Result<TransmissionValue> {
    transmission2(&marginalize(dist, &[a, b])?)
}

pub fn transmission3_entropy_form(dist: &JointDistribution) -> Result<TransmissionValue> {
    require_axes(dist, 3)?;
    let h = |axes: &[usize]| marginal_entropy(dist, axes);
    let t =
        h(&[0]) + h(&[1]) + h(&[2]) - h(&[0, 1]) - h(&[1, 2]) - h(&[0, 2]) + entropy(dist).value;
    Ok(TransmissionValue::bits(t))
}

/// Cells with `P(xyz) = 0` contribute nothing, whatever their pairwise
/// marginals.
pub fn transmission3_direct_form(dist: &JointDistribution) -> Result<TransmissionValue> {
    require_axes(dist, 3)?;
    let singles: Vec<JointDistribution> = (0..3)
        .map(|a| marginalize(dist, &[a]))
        .collect::<Result<_>>()?;
    let xy = marginalize(dist, &[0, 1])?;
    let xz = marginalize(dist, &[0, 2])?;
    let yz = marginalize(dist, &[1, 2])?;

    let mut t = 0.0;
    for (outcome, &pxyz) in dist.probabilities.iter().enumerate() {
        if pxyz <= 0.0 {
            continue;
        }
        let (x, y, z) = (
            bit(outcome, 0, 3) as u8,
            bit(outcome, 1, 3) as u8,
            bit(outcome, 2, 3) as u8,
        );
        let numerator = xy.p(&[x, y]).log2() + xz.p(&[x, z]).log2() + yz.p(&[y, z]).log2();
        let denominator = singles[0].p(&[x]).log2()
            + singles[1].p(&[y]).log2()
            + singles[2].p(&[z]).log2()
            + pxyz.log2();
        t += pxyz * (numerator - denominator);
    }
    Ok(TransmissionValue::bits(t))
}

pub fn convert_units(v: TransmissionValue, target: Unit) -> TransmissionValue {
    if v.unit == target {
        return v;
    }
    let bits = v.value / v.unit.per_bit();
    TransmissionValue {
        value: bits * target.per_bit(),
        unit: target,
    }
}
