//! Triple Helix indicator: the signed trivariate transmission `T(uig)`
//! among university, industry and government presence, computed from
//! overlapping Boolean hit counts.
//!
//! The pipeline for one year of counts is
//!
//! ```
//! use triple_helix::contingency::{contingency_from_counts, distribution_from_table, CountRecord, NonePolicy};
//! use triple_helix::infotheory::transmission3_entropy_form;
//!
//! let rec = CountRecord::from_counts(1993, [3063, 9716, 2619, 401, 588, 334, 63, 110540]);
//! let table = contingency_from_counts(&rec).unwrap();
//! let dist = distribution_from_table(&table, NonePolicy::ExcludeNone).unwrap();
//! let t = transmission3_entropy_form(&dist).unwrap();
//! assert!(t.value < 0.0);
//! ```
//!
//! Modules:
//!
//! - [`infotheory`]: entropy and transmission in one to three dimensions
//! - [`contingency`]: hit counts to disjoint cells and probabilities
//! - [`timeseries`]: yearly series, moving averages, trend summaries
//! - [`ingest`]: count CSV format and the built-in datasets
//! - [`scanner`]: hit counting over a local document corpus
//! - [`synth`]: synthetic coupling regimes, sampling and an independent oracle

pub mod contingency;
pub mod error;
pub mod infotheory;
pub mod ingest;
pub mod scanner;
pub mod synth;
pub mod timeseries;

pub use contingency::{ContingencyTable, CountField, CountRecord, NonePolicy};
pub use error::{Error, Result};
pub use infotheory::{JointDistribution, TransmissionValue, Unit};
pub use timeseries::{Direction, TransmissionSeries, TrendReport};
