//! Synthetic three-axis populations for the three coupling regimes, seeded
//! Monte Carlo sampling, and a from-scratch oracle for `T(xyz)`.
//!
//! Every regime is a mixture `(1 - c)·product + c·component`, where the
//! component has the same three marginals as the product:
//!
//! * **uncoupled**: no component, so the distribution is the product itself
//!   and `T = 0`.
//! * **coordinated**: a fair latent switch moves all three presence
//!   probabilities up or down together (`p_k ± d_k/2`). Its third central
//!   moment vanishes, so the negative second-order term of `T` near
//!   independence is zero and the shared variation dominates: `T > 0`.
//!   At `p = 1/2` the component is the all-present / none-present split.
//! * **bilateral**: the component lives on the even-parity cells
//!   `{000, 110, 101, 011}`, so any two axes determine the third (the XOR
//!   structure). Pairwise links without a shared centre give `T < 0`.

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;
use serde::{Deserialize, Serialize};

use crate::contingency::{contingency_from_counts, ContingencyTable, CountRecord, NonePolicy};
use crate::error::{Error, Result};
use crate::infotheory::{JointDistribution, TransmissionValue};
use crate::timeseries::yearly_transmission;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Coordinated,
    Uncoupled,
    Bilateral,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Coordinated, Regime::Uncoupled, Regime::Bilateral];

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Coordinated => "coordinated",
            Regime::Uncoupled => "uncoupled",
            Regime::Bilateral => "bilateral",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Regime::ALL
            .into_iter()
            .find(|r| r.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!("unknown regime '{s}' (expected coordinated, uncoupled or bilateral)")
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub regime: Regime,
    /// `P(present)` for the three axes, each in the open interval (0, 1).
    pub marginals: [f64; 3],
    /// Mixture weight of the coupling component, in [0, 1].
    pub coupling: f64,
    pub n: u64,
    pub seed: u64,
}

impl RegimeSpec {
    pub fn new(
        regime: Regime,
        marginals: [f64; 3],
        coupling: f64,
        n: u64,
        seed: u64,
    ) -> Result<Self> {
        let spec = RegimeSpec {
            regime,
            marginals,
            coupling,
            n,
            seed,
        };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        if let Some(p) = self.marginals.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(Error::InfeasibleSpec(format!(
                "marginal {p} is outside (0, 1)"
            )));
        }
        if !(0.0..=1.0).contains(&self.coupling) {
            return Err(Error::InfeasibleSpec(format!(
                "coupling {} is outside [0, 1]",
                self.coupling
            )));
        }
        if self.regime == Regime::Bilateral && self.coupling > 0.0 {
            even_parity_component(self.marginals)?;
        }
        Ok(())
    }
}

fn product_cells(p: [f64; 3]) -> [f64; 8] {
    let mut cells = [0.0; 8];
    for (idx, cell) in cells.iter_mut().enumerate() {
        *cell = (0..3)
            .map(|a| {
                if idx >> (2 - a) & 1 == 1 {
                    p[a]
                } else {
                    1.0 - p[a]
                }
            })
            .product();
    }
    cells
}

fn coordinated_component(p: [f64; 3]) -> [f64; 8] {
    let swing = p.map(|pk| 4.0 * pk.min(1.0 - pk) * (pk * (1.0 - pk)).sqrt());
    let high = [0, 1, 2].map(|k| p[k] + swing[k] / 2.0);
    let low = [0, 1, 2].map(|k| p[k] - swing[k] / 2.0);
    let (h, l) = (product_cells(high), product_cells(low));
    let mut cells = [0.0; 8];
    for k in 0..8 {
        cells[k] = 0.5 * h[k] + 0.5 * l[k];
    }
    cells
}

fn even_parity_component([pu, pi, pg]: [f64; 3]) -> Result<[f64; 8]> {
    let ui = (pu + pi - pg) / 2.0;
    let ug = (pu + pg - pi) / 2.0;
    let ig = (pi + pg - pu) / 2.0;
    let none = 1.0 - ui - ug - ig;
    if ui < 0.0 || ug < 0.0 || ig < 0.0 || none < -1e-15 {
        return Err(Error::InfeasibleSpec(format!(
            "bilateral coupling needs each marginal <= the sum of the other two and \
             pU + pI + pG <= 2, got ({pu}, {pi}, {pg})"
        )));
    }
    let mut cells = [0.0; 8];
    cells[0b000] = none.max(0.0);
    cells[0b110] = ui;
    cells[0b101] = ug;
    cells[0b011] = ig;
    Ok(cells)
}

pub fn regime_distribution(spec: &RegimeSpec) -> Result<JointDistribution> {
    spec.check()?;
    let product = product_cells(spec.marginals);
    let component = match spec.regime {
        Regime::Uncoupled => product,
        Regime::Coordinated => coordinated_component(spec.marginals),
        Regime::Bilateral if spec.coupling > 0.0 => even_parity_component(spec.marginals)?,
        Regime::Bilateral => product,
    };
    let c = spec.coupling;
    let cells = (0..8)
        .map(|k| ((1.0 - c) * product[k] + c * component[k]).max(0.0))
        .collect();
    JointDistribution::new(3, cells)
}

/// `n` independent categorical draws over the eight cells, aggregated into
/// overlapping counts (year 0, total `n`). Same inputs, same counts.
pub fn sample_population(dist: &JointDistribution, n: u64, seed: u64) -> Result<CountRecord> {
    if dist.axis_count() != 3 {
        return Err(Error::InvalidAxes(format!(
            "sampling needs a 3-axis distribution, got {}",
            dist.axis_count()
        )));
    }
    let mut cells = [0u64; 8];
    if n > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let index = WeightedIndex::new(dist.probabilities())
            .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
        for _ in 0..n {
            cells[index.sample(&mut rng)] += 1;
        }
    }
    Ok(table_to_record(cells))
}

fn table_to_record(cells: [u64; 8]) -> CountRecord {
    ContingencyTable {
        year: 0,
        cells,
        labels: Default::default(),
    }
    .to_counts()
}

/// Plug-in `T(uig)` of a sampled population, in bits. Every draw is a real
/// outcome, so the none cell stays in the event space.
pub fn empirical_transmission(rec: &CountRecord) -> Result<f64> {
    Ok(yearly_transmission(rec, NonePolicy::IncludeNone)?.value)
}

/// Multinomial draw by a chain of conditional binomials.
fn multinomial(rng: &mut ChaCha8Rng, n: u64, probs: &[f64; 8]) -> [u64; 8] {
    let mut out = [0u64; 8];
    let mut remaining = n;
    let mut mass = 1.0;
    for k in 0..7 {
        if remaining == 0 {
            break;
        }
        let q = if mass > 0.0 {
            (probs[k] / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let draw = Binomial::new(remaining, q)
            .expect("probability clamped to [0, 1]")
            .sample(rng);
        out[k] = draw;
        remaining -= draw;
        mass -= probs[k];
    }
    out[7] += remaining;
    out
}

/// Nonparametric bootstrap standard error of [`empirical_transmission`]:
/// resampling `n` documents with replacement is a multinomial draw from the
/// observed cell frequencies.
pub fn bootstrap_standard_error(rec: &CountRecord, replicates: usize, seed: u64) -> Result<f64> {
    if replicates < 2 {
        return Err(Error::InvalidWindow(
            "bootstrap needs at least 2 replicates".into(),
        ));
    }
    let table = contingency_from_counts(rec)?;
    let n = table.total();
    if n == 0 {
        return Err(Error::EmptyPopulation {
            year: Some(rec.year),
        });
    }
    let freqs = table.cells.map(|c| c as f64 / n as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..replicates)
        .map(|_| empirical_transmission(&table_to_record(multinomial(&mut rng, n, &freqs))))
        .collect::<Result<Vec<f64>>>()?;
    let mean = values.iter().sum::<f64>() / replicates as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (replicates - 1) as f64;
    Ok(var.sqrt())
}

/// Direct-form `T(xyz)` by brute-force enumeration of the 2×2×2 grid with
/// all marginals recomputed from the raw cells. Kept deliberately separate
/// from [`crate::infotheory`] so the two can check each other.
pub fn oracle_transmission3(dist: &JointDistribution) -> Result<TransmissionValue> {
    if dist.axis_count() != 3 {
        return Err(Error::InvalidAxes(format!(
            "oracle needs a 3-axis distribution, got {}",
            dist.axis_count()
        )));
    }
    let raw = dist.probabilities();
    let mut p = [[[0.0f64; 2]; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                p[x][y][z] = raw[x * 4 + y * 2 + z];
            }
        }
    }

    let mut px = [0.0; 2];
    let mut py = [0.0; 2];
    let mut pz = [0.0; 2];
    let mut pxy = [[0.0; 2]; 2];
    let mut pxz = [[0.0; 2]; 2];
    let mut pyz = [[0.0; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                let v = p[x][y][z];
                px[x] += v;
                py[y] += v;
                pz[z] += v;
                pxy[x][y] += v;
                pxz[x][z] += v;
                pyz[y][z] += v;
            }
        }
    }

    let mut nats = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                let v = p[x][y][z];
                if v == 0.0 {
                    continue;
                }
                let num = pxy[x][y].ln() + pxz[x][z].ln() + pyz[y][z].ln();
                let den = px[x].ln() + py[y].ln() + pz[z].ln() + v.ln();
                nats += v * (num - den);
            }
        }
    }
    Ok(TransmissionValue::bits(nats / std::f64::consts::LN_2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infotheory::{marginalize, transmission3_entropy_form};

    fn t3(d: &JointDistribution) -> f64 {
        transmission3_entropy_form(d).unwrap().value
    }

    #[test]
    fn uncoupled_is_independent() {
        for (p, c) in [([0.2, 0.5, 0.9], 0.7), ([0.01, 0.3, 0.6], 1.0)] {
            let spec = RegimeSpec::new(Regime::Uncoupled, p, c, 10, 1).unwrap();
            let d = regime_distribution(&spec).unwrap();
            assert!(t3(&d).abs() < 1e-12);
        }
    }

    #[test]
    fn bilateral_half_full_coupling_is_xor() {
        let spec = RegimeSpec::new(Regime::Bilateral, [0.5; 3], 1.0, 10, 1).unwrap();
        let d = regime_distribution(&spec).unwrap();
        let mut expected = vec![0.0; 8];
        for idx in [0b000, 0b011, 0b101, 0b110] {
            expected[idx] = 0.25;
        }
        assert_eq!(d.probabilities(), expected.as_slice());
        assert!((t3(&d) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn coordinated_half_full_coupling_is_copy() {
        let spec = RegimeSpec::new(Regime::Coordinated, [0.5; 3], 1.0, 10, 1).unwrap();
        let d = regime_distribution(&spec).unwrap();
        assert!((d.p(&[1, 1, 1]) - 0.5).abs() < 1e-15);
        assert!((d.p(&[0, 0, 0]) - 0.5).abs() < 1e-15);
        assert!((t3(&d) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn marginals_preserved() {
        let p = [0.15, 0.4, 0.35];
        for regime in Regime::ALL {
            for c in [0.0, 0.3, 1.0] {
                let d = regime_distribution(&RegimeSpec::new(regime, p, c, 0, 0).unwrap()).unwrap();
                for (axis, want) in p.into_iter().enumerate() {
                    let m = marginalize(&d, &[axis]).unwrap();
                    assert!((m.probabilities()[1] - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn infeasible_specs() {
        assert!(matches!(
            RegimeSpec::new(Regime::Coordinated, [0.0, 0.5, 0.5], 0.5, 1, 1),
            Err(Error::InfeasibleSpec(_))
        ));
        assert!(matches!(
            RegimeSpec::new(Regime::Coordinated, [0.3, 0.5, 0.5], 1.5, 1, 1),
            Err(Error::InfeasibleSpec(_))
        ));
        // triangle violation: pG > pU + pI
        assert!(matches!(
            RegimeSpec::new(Regime::Bilateral, [0.1, 0.1, 0.5], 0.5, 1, 1),
            Err(Error::InfeasibleSpec(_))
        ));
        // pU + pI + pG > 2
        assert!(matches!(
            RegimeSpec::new(Regime::Bilateral, [0.9, 0.9, 0.9], 0.5, 1, 1),
            Err(Error::InfeasibleSpec(_))
        ));
        assert!(RegimeSpec::new(Regime::Bilateral, [0.9, 0.9, 0.9], 0.0, 1, 1).is_ok());
    }

    #[test]
    fn sample_edge_cases() {
        let d = JointDistribution::new(3, vec![0.125; 8]).unwrap();
        let zero = sample_population(&d, 0, 7).unwrap();
        assert_eq!(zero.counts(), [0; 8]);

        let mut point = vec![0.0; 8];
        point[0b111] = 1.0;
        let d = JointDistribution::new(3, point).unwrap();
        let rec = sample_population(&d, 100, 3).unwrap();
        assert_eq!(rec.counts(), [100; 8]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = regime_distribution(
            &RegimeSpec::new(Regime::Bilateral, [0.3, 0.4, 0.5], 0.5, 0, 0).unwrap(),
        )
        .unwrap();
        let a = sample_population(&d, 5000, 42).unwrap();
        let b = sample_population(&d, 5000, 42).unwrap();
        let c = sample_population(&d, 5000, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.total, 5000);
    }

    #[test]
    fn multinomial_conserves_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let probs = [0.1, 0.0, 0.2, 0.05, 0.05, 0.3, 0.2, 0.1];
        for _ in 0..50 {
            let draw = multinomial(&mut rng, 1234, &probs);
            assert_eq!(draw.iter().sum::<u64>(), 1234);
            assert_eq!(draw[1], 0);
        }
    }

    #[test]
    fn oracle_examples() {
        let prod = JointDistribution::product(&[0.2, 0.7, 0.45]).unwrap();
        assert!(oracle_transmission3(&prod).unwrap().value.abs() < 1e-12);

        let xor =
            regime_distribution(&RegimeSpec::new(Regime::Bilateral, [0.5; 3], 1.0, 0, 0).unwrap())
                .unwrap();
        assert!((oracle_transmission3(&xor).unwrap().value + 1.0).abs() < 1e-12);

        let two = JointDistribution::product(&[0.5, 0.5]).unwrap();
        assert!(matches!(
            oracle_transmission3(&two),
            Err(Error::InvalidAxes(_))
        ));
    }

    #[test]
    fn bootstrap_se_is_positive_and_reproducible() {
        let d = regime_distribution(
            &RegimeSpec::new(Regime::Coordinated, [0.3, 0.4, 0.5], 0.5, 0, 0).unwrap(),
        )
        .unwrap();
        let rec = sample_population(&d, 20_000, 1).unwrap();
        let a = bootstrap_standard_error(&rec, 50, 2).unwrap();
        let b = bootstrap_standard_error(&rec, 50, 2).unwrap();
        assert_eq!(a, b);
        assert!(a > 0.0 && a < 0.05);
        assert!(bootstrap_standard_error(&rec, 1, 2).is_err());
        let empty = CountRecord::from_counts(0, [0; 8]);
        assert!(matches!(
            bootstrap_standard_error(&empty, 10, 2),
            Err(Error::EmptyPopulation { .. })
        ));
    }
}
