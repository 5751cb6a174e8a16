//! Overlapping Boolean hit counts and the disjoint 2×2×2 table behind them.
//!
//! A search for `a AND b` retrieves every document containing both terms,
//! including those that also contain the third, so pairwise counts include
//! the triple count. Inclusion-exclusion recovers the eight disjoint cells:
//!
//! ```text
//! only-U = u - ui - ug + uig      UI-only = ui - uig
//! only-I = i - ui - ig + uig      UG-only = ug - uig
//! only-G = g - ug - ig + uig      IG-only = ig - uig
//! UIG    = uig                    none    = total - |U ∪ I ∪ G|
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infotheory::JointDistribution;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AxisLabels(pub [String; 3]);

impl AxisLabels {
    pub fn new(a: &str, b: &str, c: &str) -> Self {
        AxisLabels([a.to_string(), b.to_string(), c.to_string()])
    }

    pub fn get(&self, axis: usize) -> &str {
        &self.0[axis]
    }
}

impl Default for AxisLabels {
    fn default() -> Self {
        AxisLabels::new("university", "industry", "government")
    }
}

/// One year of overlapping hit counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub year: i32,
    pub u: u64,
    pub i: u64,
    pub g: u64,
    pub ui: u64,
    pub ug: u64,
    pub ig: u64,
    pub uig: u64,
    pub total: u64,
    #[serde(default)]
    pub labels: AxisLabels,
}

impl CountRecord {
    /// Counts in column order `u, i, g, ui, ug, ig, uig, total`.
    pub fn from_counts(year: i32, counts: [u64; 8]) -> Self {
        let [u, i, g, ui, ug, ig, uig, total] = counts;
        CountRecord {
            year,
            u,
            i,
            g,
            ui,
            ug,
            ig,
            uig,
            total,
            labels: AxisLabels::default(),
        }
    }

    pub fn with_labels(mut self, labels: AxisLabels) -> Self {
        self.labels = labels;
        self
    }

    pub fn counts(&self) -> [u64; 8] {
        [
            self.u, self.i, self.g, self.ui, self.ug, self.ig, self.uig, self.total,
        ]
    }

    pub fn field(&self, field: CountField) -> u64 {
        match field {
            CountField::U => self.u,
            CountField::I => self.i,
            CountField::G => self.g,
            CountField::UI => self.ui,
            CountField::UG => self.ug,
            CountField::IG => self.ig,
            CountField::UIG => self.uig,
        }
    }

    /// `|U ∪ I ∪ G|`, signed so that inconsistent records stay representable.
    pub fn union_size(&self) -> i128 {
        let c = |v: u64| v as i128;
        c(self.u) + c(self.i) + c(self.g) - c(self.ui) - c(self.ug) - c(self.ig) + c(self.uig)
    }

    /// Field-wise sum of two records for the same year, as when merging
    /// shards of one corpus.
    pub fn merged(&self, other: &CountRecord) -> CountRecord {
        let a = self.counts();
        let b = other.counts();
        let mut sum = [0u64; 8];
        for k in 0..8 {
            sum[k] = a[k] + b[k];
        }
        CountRecord::from_counts(self.year, sum).with_labels(self.labels.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CountField {
    U,
    I,
    G,
    UI,
    UG,
    IG,
    UIG,
}

impl CountField {
    pub const ALL: [CountField; 7] = [
        CountField::U,
        CountField::I,
        CountField::G,
        CountField::UI,
        CountField::UG,
        CountField::IG,
        CountField::UIG,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CountField::U => "u",
            CountField::I => "i",
            CountField::G => "g",
            CountField::UI => "ui",
            CountField::UG => "ug",
            CountField::IG => "ig",
            CountField::UIG => "uig",
        }
    }
}

impl fmt::Display for CountField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CountField {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        CountField::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown count field '{s}'"))
    }
}

/// One of the eight disjoint presence/absence cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    OnlyU,
    OnlyI,
    OnlyG,
    UIOnly,
    UGOnly,
    IGOnly,
    UIG,
    None,
}

impl Cell {
    /// Display order used throughout: the three singletons, the three pairs,
    /// the triple, then the empty cell.
    pub const ALL: [Cell; 8] = [
        Cell::OnlyU,
        Cell::OnlyI,
        Cell::OnlyG,
        Cell::UIOnly,
        Cell::UGOnly,
        Cell::IGOnly,
        Cell::UIG,
        Cell::None,
    ];

    /// Presence bits `(u, i, g)`.
    pub fn presence(self) -> (u8, u8, u8) {
        match self {
            Cell::OnlyU => (1, 0, 0),
            Cell::OnlyI => (0, 1, 0),
            Cell::OnlyG => (0, 0, 1),
            Cell::UIOnly => (1, 1, 0),
            Cell::UGOnly => (1, 0, 1),
            Cell::IGOnly => (0, 1, 1),
            Cell::UIG => (1, 1, 1),
            Cell::None => (0, 0, 0),
        }
    }

    /// Index into a 3-axis outcome vector (`u << 2 | i << 1 | g`).
    pub fn index(self) -> usize {
        let (u, i, g) = self.presence();
        (usize::from(u) << 2) | (usize::from(i) << 1) | usize::from(g)
    }

    pub fn from_presence(u: bool, i: bool, g: bool) -> Cell {
        match (u, i, g) {
            (true, false, false) => Cell::OnlyU,
            (false, true, false) => Cell::OnlyI,
            (false, false, true) => Cell::OnlyG,
            (true, true, false) => Cell::UIOnly,
            (true, false, true) => Cell::UGOnly,
            (false, true, true) => Cell::IGOnly,
            (true, true, true) => Cell::UIG,
            (false, false, false) => Cell::None,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Cell::OnlyU => "only-U",
            Cell::OnlyI => "only-I",
            Cell::OnlyG => "only-G",
            Cell::UIOnly => "UI-only",
            Cell::UGOnly => "UG-only",
            Cell::IGOnly => "IG-only",
            Cell::UIG => "UIG",
            Cell::None => "none",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    TripleExceedsPair {
        pair: CountField,
    },
    PairExceedsSingleton {
        pair: CountField,
        singleton: CountField,
    },
    UnionExceedsTotal {
        union: i128,
        total: u64,
    },
    NegativeCell {
        cell: Cell,
        value: i128,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TripleExceedsPair { pair } => write!(f, "uig exceeds {pair}"),
            Violation::PairExceedsSingleton { pair, singleton } => {
                write!(
                    f,
                    "pairwise count {pair} exceeds singleton count {singleton}"
                )
            }
            Violation::UnionExceedsTotal { union, total } => {
                write!(f, "union size {union} exceeds total {total}")
            }
            Violation::NegativeCell { cell, value } => {
                write!(f, "cell {cell} would be {value}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub year: i32,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "{}: ok", self.year);
        }
        write!(f, "{}: ", self.year)?;
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Signed inclusion-exclusion cells in [`Cell::ALL`] order.
fn signed_cells(rec: &CountRecord) -> [i128; 8] {
    let c = |v: u64| v as i128;
    let (u, i, g) = (c(rec.u), c(rec.i), c(rec.g));
    let (ui, ug, ig, uig) = (c(rec.ui), c(rec.ug), c(rec.ig), c(rec.uig));
    [
        u - ui - ug + uig,
        i - ui - ig + uig,
        g - ug - ig + uig,
        ui - uig,
        ug - uig,
        ig - uig,
        uig,
        c(rec.total) - rec.union_size(),
    ]
}

pub fn validate_counts(rec: &CountRecord) -> ValidationReport {
    use CountField::*;

    let mut violations = Vec::new();
    for pair in [UI, UG, IG] {
        if rec.uig > rec.field(pair) {
            violations.push(Violation::TripleExceedsPair { pair });
        }
    }
    for (pair, a, b) in [(UI, U, I), (UG, U, G), (IG, I, G)] {
        for singleton in [a, b] {
            if rec.field(pair) > rec.field(singleton) {
                violations.push(Violation::PairExceedsSingleton { pair, singleton });
            }
        }
    }
    let union = rec.union_size();
    if union > rec.total as i128 {
        violations.push(Violation::UnionExceedsTotal {
            union,
            total: rec.total,
        });
    }
    for (cell, value) in Cell::ALL.into_iter().zip(signed_cells(rec)) {
        // the none cell is already covered by the union check
        if value < 0 && cell != Cell::None {
            violations.push(Violation::NegativeCell { cell, value });
        }
    }
    ValidationReport {
        year: rec.year,
        violations,
    }
}

/// The eight disjoint cell counts for one year.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub year: i32,
    /// Indexed by `u << 2 | i << 1 | g`.
    pub cells: [u64; 8],
    pub labels: AxisLabels,
}

impl ContingencyTable {
    pub fn get(&self, cell: Cell) -> u64 {
        self.cells[cell.index()]
    }

    pub fn cell(&self, u: bool, i: bool, g: bool) -> u64 {
        self.get(Cell::from_presence(u, i, g))
    }

    /// Cells in [`Cell::ALL`] order.
    pub fn named_cells(&self) -> [u64; 8] {
        Cell::ALL.map(|c| self.get(c))
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().sum()
    }

    /// Re-aggregate the disjoint cells into overlapping hit counts.
    pub fn to_counts(&self) -> CountRecord {
        let mut counts = [0u64; 8];
        for (idx, &n) in self.cells.iter().enumerate() {
            let (u, i, g) = (idx & 4 != 0, idx & 2 != 0, idx & 1 != 0);
            let present = [u, i, g, u && i, u && g, i && g, u && i && g, true];
            for (slot, hit) in counts.iter_mut().zip(present) {
                if hit {
                    *slot += n;
                }
            }
        }
        CountRecord::from_counts(self.year, counts).with_labels(self.labels.clone())
    }
}

pub fn contingency_from_counts(rec: &CountRecord) -> Result<ContingencyTable> {
    let signed = signed_cells(rec);
    let mut cells = [0u64; 8];
    for (cell, value) in Cell::ALL.into_iter().zip(signed) {
        if value < 0 {
            return Err(Error::InconsistentCounts {
                year: rec.year,
                cell,
                value,
            });
        }
        cells[cell.index()] = value as u64;
    }
    Ok(ContingencyTable {
        year: rec.year,
        cells,
        labels: rec.labels.clone(),
    })
}

/// Whether the "mentions none of the three terms" cell is part of the event
/// space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonePolicy {
    /// Probabilities are cell / total over the whole population.
    IncludeNone,
    /// The none cell is dropped and the seven remaining cells are
    /// renormalised over the union.
    ExcludeNone,
}

impl Default for NonePolicy {
    /// Normalising over the union keeps the built-in patent series negative
    /// and the two web series trending in opposite directions.
    fn default() -> Self {
        NonePolicy::ExcludeNone
    }
}

impl NonePolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            NonePolicy::IncludeNone => "include_none",
            NonePolicy::ExcludeNone => "exclude_none",
        }
    }
}

impl fmt::Display for NonePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NonePolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "include" | "include_none" => Ok(NonePolicy::IncludeNone),
            "exclude" | "exclude_none" => Ok(NonePolicy::ExcludeNone),
            other => Err(format!(
                "unknown none policy '{other}' (expected include or exclude)"
            )),
        }
    }
}

pub fn distribution_from_table(
    table: &ContingencyTable,
    policy: NonePolicy,
) -> Result<JointDistribution> {
    let mut cells = table.cells;
    if policy == NonePolicy::ExcludeNone {
        cells[Cell::None.index()] = 0;
    }
    let denominator: u64 = cells.iter().sum();
    if denominator == 0 {
        return Err(Error::EmptyPopulation {
            year: Some(table.year),
        });
    }
    let d = denominator as f64;
    JointDistribution::new(3, cells.iter().map(|&n| n as f64 / d).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentSeries {
    pub field: CountField,
    pub points: Vec<(i32, f64)>,
}

/// `100 × count / total` per year, years ascending.
pub fn share_series(records: &[CountRecord], field: CountField) -> Result<PercentSeries> {
    let mut points = records
        .iter()
        .map(|r| {
            if r.total == 0 {
                Err(Error::EmptyPopulation { year: Some(r.year) })
            } else {
                Ok((r.year, 100.0 * r.field(field) as f64 / r.total as f64))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    points.sort_by_key(|&(year, _)| year);
    Ok(PercentSeries { field, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1_1993() -> CountRecord {
        CountRecord::from_counts(1993, [3063, 9716, 2619, 401, 588, 334, 63, 110540])
    }

    #[test]
    fn validate_examples() {
        let web_links_1993 = CountRecord::from_counts(1993, [721, 753, 26, 32, 16, 21, 13, 140631]);
        assert!(validate_counts(&web_links_1993).is_valid());

        let bad = CountRecord::from_counts(2000, [5, 0, 0, 10, 0, 0, 0, 0]);
        let report = validate_counts(&bad);
        assert!(!report.is_valid());
        assert!(report
            .violations
            .contains(&Violation::PairExceedsSingleton {
                pair: CountField::UI,
                singleton: CountField::U,
            }));

        let empty = CountRecord::from_counts(2000, [0; 8]);
        assert!(validate_counts(&empty).is_valid());
    }

    #[test]
    fn validate_reports_union_and_triple() {
        let rec = CountRecord::from_counts(1, [5, 5, 5, 1, 1, 1, 2, 3]);
        let v = validate_counts(&rec).violations;
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::TripleExceedsPair { .. })));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::UnionExceedsTotal { .. })));
    }

    #[test]
    fn validate_catches_negative_singleton_cell() {
        // pairs fit inside singletons but only-U = 10 - 6 - 6 + 0 < 0
        let rec = CountRecord::from_counts(1, [10, 10, 10, 6, 6, 0, 0, 100]);
        let v = validate_counts(&rec).violations;
        assert_eq!(
            v,
            vec![Violation::NegativeCell {
                cell: Cell::OnlyU,
                value: -2
            }]
        );
    }

    #[test]
    fn table1_1993_cells() {
        let t = contingency_from_counts(&table1_1993()).unwrap();
        assert_eq!(
            t.named_cells(),
            [2137, 9044, 1760, 338, 525, 271, 63, 96402]
        );
        assert_eq!(t.total(), 110540);
        assert_eq!(t.to_counts(), table1_1993());
    }

    #[test]
    fn zero_record_is_all_none() {
        let t = contingency_from_counts(&CountRecord::from_counts(5, [0, 0, 0, 0, 0, 0, 0, 42]))
            .unwrap();
        assert_eq!(t.named_cells(), [0, 0, 0, 0, 0, 0, 0, 42]);
    }

    #[test]
    fn full_bilateral_overlap() {
        let t = contingency_from_counts(&CountRecord::from_counts(1, [10, 10, 0, 10, 0, 0, 0, 10]))
            .unwrap();
        assert_eq!(t.named_cells(), [0, 0, 0, 10, 0, 0, 0, 0]);
    }

    #[test]
    fn inconsistent_counts_name_the_cell() {
        let err = contingency_from_counts(&CountRecord::from_counts(7, [5, 0, 0, 10, 0, 0, 0, 20]))
            .unwrap_err();
        assert_eq!(
            err,
            Error::InconsistentCounts {
                year: 7,
                cell: Cell::OnlyU,
                value: -5
            }
        );
    }

    #[test]
    fn distribution_policies() {
        let t = contingency_from_counts(&table1_1993()).unwrap();
        let inc = distribution_from_table(&t, NonePolicy::IncludeNone).unwrap();
        assert!((inc.p(&[1, 1, 1]) - 5.699_294_373_077_619e-4).abs() < 1e-15);
        assert!((inc.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let exc = distribution_from_table(&t, NonePolicy::ExcludeNone).unwrap();
        assert_eq!(exc.p(&[0, 0, 0]), 0.0);
        assert!((exc.p(&[1, 1, 1]) - 63.0 / 14138.0).abs() < 1e-15);
    }

    #[test]
    fn empty_union_under_exclude() {
        let t = contingency_from_counts(&CountRecord::from_counts(3, [0, 0, 0, 0, 0, 0, 0, 9]))
            .unwrap();
        assert!(distribution_from_table(&t, NonePolicy::IncludeNone).is_ok());
        assert_eq!(
            distribution_from_table(&t, NonePolicy::ExcludeNone),
            Err(Error::EmptyPopulation { year: Some(3) })
        );
        let zero = contingency_from_counts(&CountRecord::from_counts(4, [0; 8])).unwrap();
        assert_eq!(
            distribution_from_table(&zero, NonePolicy::IncludeNone),
            Err(Error::EmptyPopulation { year: Some(4) })
        );
    }

    #[test]
    fn shares() {
        let recs = vec![
            CountRecord::from_counts(2002, [9228, 21089, 5242, 1619, 1928, 1047, 352, 184531]),
            table1_1993(),
        ];
        let s = share_series(&recs, CountField::U).unwrap();
        assert_eq!(s.points[0].0, 1993);
        assert!((s.points[0].1 - 2.77).abs() < 0.01);
        assert!((s.points[1].1 - 5.00).abs() < 0.01);

        let all = CountRecord::from_counts(1, [7, 0, 0, 0, 0, 0, 0, 7]);
        assert_eq!(
            share_series(&[all], CountField::U).unwrap().points,
            vec![(1, 100.0)]
        );

        let zero = CountRecord::from_counts(9, [0; 8]);
        assert_eq!(
            share_series(&[zero], CountField::U),
            Err(Error::EmptyPopulation { year: Some(9) })
        );
    }

    #[test]
    fn parse_enums() {
        assert_eq!("include".parse::<NonePolicy>(), Ok(NonePolicy::IncludeNone));
        assert_eq!(
            "exclude-none".parse::<NonePolicy>(),
            Ok(NonePolicy::ExcludeNone)
        );
        assert_eq!("UIG".parse::<CountField>(), Ok(CountField::UIG));
        assert!("x".parse::<CountField>().is_err());
    }
}
