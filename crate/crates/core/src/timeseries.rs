//! Year-indexed transmission series, moving averages and trend summaries.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::contingency::{
    contingency_from_counts, distribution_from_table, CountRecord, NonePolicy,
};
use crate::error::{Error, Result};
use crate::infotheory::{convert_units, transmission3_entropy_form, TransmissionValue, Unit};

/// Differences in mean below this are reported as [`Direction::Flat`].
pub const FLAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionSeries {
    points: Vec<(i32, f64)>,
    unit: Unit,
    pub none_policy: NonePolicy,
    pub source: String,
}

impl TransmissionSeries {
    /// Years must be strictly increasing.
    pub fn new(
        points: Vec<(i32, f64)>,
        unit: Unit,
        none_policy: NonePolicy,
        source: impl Into<String>,
    ) -> Result<Self> {
        if let Some(w) = points.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(if w[1].0 == w[0].0 {
                Error::DuplicateYear {
                    year: w[1].0,
                    line: None,
                }
            } else {
                Error::InvalidWindow(format!(
                    "years not increasing: {} follows {}",
                    w[1].0, w[0].0
                ))
            });
        }
        Ok(TransmissionSeries {
            points,
            unit,
            none_policy,
            source: source.into(),
        })
    }

    pub fn points(&self) -> &[(i32, f64)] {
        &self.points
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.points.iter().map(|&(y, _)| y)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|&(_, v)| v)
    }

    pub fn to_unit(&self, unit: Unit) -> TransmissionSeries {
        let points = self
            .points
            .iter()
            .map(|&(y, v)| {
                let tv = TransmissionValue {
                    value: v,
                    unit: self.unit,
                };
                (y, convert_units(tv, unit).value)
            })
            .collect();
        TransmissionSeries {
            points,
            unit,
            none_policy: self.none_policy,
            source: self.source.clone(),
        }
    }
}

/// Trivariate transmission for one year of counts, in bits.
pub fn yearly_transmission(rec: &CountRecord, policy: NonePolicy) -> Result<TransmissionValue> {
    let table = contingency_from_counts(rec)?;
    let dist = distribution_from_table(&table, policy)?;
    transmission3_entropy_form(&dist)
}

/// Runs counts → table → distribution → `T(uig)` for every record.
/// The output is ordered by year whatever the input order.
pub fn transmission_series(
    records: &[CountRecord],
    policy: NonePolicy,
    unit: Unit,
    source: &str,
) -> Result<TransmissionSeries> {
    let mut points = records
        .iter()
        .map(|r| {
            let t = yearly_transmission(r, policy)?;
            Ok((r.year, convert_units(t, unit).value))
        })
        .collect::<Result<Vec<_>>>()?;
    points.sort_by_key(|&(y, _)| y);
    TransmissionSeries::new(points, unit, policy, source)
}

/// Trailing moving average. Each output point is labelled with the last
/// year of its window, so a 1993-1994 window becomes 1994.
pub fn moving_average(series: &TransmissionSeries, window: usize) -> Result<TransmissionSeries> {
    if window == 0 {
        return Err(Error::InvalidWindow("window must be at least 1".into()));
    }
    if window > series.len() {
        return Err(Error::WindowTooLarge {
            window,
            len: series.len(),
        });
    }
    let points = series
        .points
        .windows(window)
        .map(|w| {
            let mean = w.iter().map(|&(_, v)| v).sum::<f64>() / window as f64;
            (w[window - 1].0, mean)
        })
        .collect();
    Ok(TransmissionSeries {
        points,
        unit: series.unit,
        none_policy: series.none_policy,
        source: series.source.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Rising,
    Falling,
    Flat,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Rising => "rising",
            Direction::Falling => "falling",
            Direction::Flat => "flat",
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Rising => Direction::Falling,
            Direction::Falling => Direction::Rising,
            Direction::Flat => Direction::Flat,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub k: usize,
    pub early_mean: f64,
    pub late_mean: f64,
    pub direction: Direction,
    pub unit: Unit,
}

/// Compares the mean of the first `k` values against the mean of the last `k`.
pub fn trend_summary(series: &TransmissionSeries, k: usize) -> Result<TrendReport> {
    let n = series.len();
    if k == 0 || k > n / 2 {
        return Err(Error::InvalidWindow(format!(
            "trend k must satisfy 1 <= k <= {} for a series of length {n}, got {k}",
            n / 2
        )));
    }
    let mean = |s: &[(i32, f64)]| s.iter().map(|&(_, v)| v).sum::<f64>() / s.len() as f64;
    let early_mean = mean(&series.points[..k]);
    let late_mean = mean(&series.points[n - k..]);
    let diff = late_mean - early_mean;
    let direction = if diff.abs() < FLAT_TOLERANCE {
        Direction::Flat
    } else if diff > 0.0 {
        Direction::Rising
    } else {
        Direction::Falling
    };
    Ok(TrendReport {
        k,
        early_mean,
        late_mean,
        direction,
        unit: series.unit,
    })
}
