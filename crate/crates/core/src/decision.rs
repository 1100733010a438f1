//! TOPSIS ranking with signed weights: the sign marks a benefit (+) or cost
//! (-) criterion, the magnitude its importance. Magnitudes are used as given,
//! without normalizing them to sum to one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exergy::ExergyReport;
use crate::performance::CyclePerformance;

/// Criteria extracted from an analyzed cycle, in matrix column order.
pub const CYCLE_CRITERIA: [&str; 5] = ["etaThermal", "etaExergetic", "tsfc", "entropyGeneration", "noxRate"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionMatrix {
    pub alternatives: Vec<String>,
    pub criteria: Vec<String>,
    /// One row per alternative.
    pub values: Vec<Vec<f64>>,
}

impl DecisionMatrix {
    pub fn new(alternatives: Vec<String>, criteria: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        let m = DecisionMatrix {
            alternatives,
            criteria,
            values,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alternatives.is_empty() || self.criteria.is_empty() {
            return Err(Error::DimensionMismatch(
                "decision matrix needs at least one alternative and one criterion".into(),
            ));
        }
        if self.values.len() != self.alternatives.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} alternatives but {} rows",
                self.alternatives.len(),
                self.values.len()
            )));
        }
        for (label, row) in self.alternatives.iter().zip(&self.values) {
            if row.len() != self.criteria.len() {
                return Err(Error::DimensionMismatch(format!(
                    "row '{label}' has {} values for {} criteria",
                    row.len(),
                    self.criteria.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("row '{label}' contains a non-finite value")));
            }
        }
        Ok(())
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(move |row| row[j])
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> DecisionMatrix {
        DecisionMatrix {
            alternatives: self.alternatives.clone(),
            criteria: columns.iter().map(|&j| self.criteria[j].clone()).collect(),
            values: self
                .values
                .iter()
                .map(|row| columns.iter().map(|&j| row[j]).collect())
                .collect(),
        }
    }

    /// Cycle results as alternatives over [`CYCLE_CRITERIA`].
    pub fn from_cycles<'a>(
        rows: impl IntoIterator<Item = (String, &'a CyclePerformance, &'a ExergyReport)>,
    ) -> Result<Self> {
        let (mut alternatives, mut values) = (Vec::new(), Vec::new());
        for (label, perf, ex) in rows {
            alternatives.push(label);
            values.push(vec![
                perf.eta_thermal,
                perf.eta_exergetic,
                perf.tsfc,
                ex.entropy_generation,
                perf.nox_rate,
            ]);
        }
        DecisionMatrix::new(
            alternatives,
            CYCLE_CRITERIA.iter().map(|s| s.to_string()).collect(),
            values,
        )
    }

    /// Published optimized cycles (thrust, thermal and propulsive
    /// efficiency maximization) over [`CYCLE_CRITERIA`], efficiencies in %.
    pub fn reference_cycles() -> Self {
        DecisionMatrix {
            alternatives: vec!["case1".into(), "case2".into(), "case3".into()],
            criteria: CYCLE_CRITERIA.iter().map(|s| s.to_string()).collect(),
            values: vec![
                vec![57.91, 28.761, 6.58, 247.3, 5.186],
                vec![58.06, 23.64, 7.996, 301.5, 5.961],
                vec![54.85, 30.85, 8.008, 95.6, 2.733],
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    /// Thermal efficiency as benefit, TSFC as cost.
    pub fn economic() -> Self {
        WeightVector(vec![0.99, 0.0, -0.95, 0.0, 0.0])
    }

    /// Exergetic efficiency as benefit, entropy generation and NOx as costs.
    pub fn exero_environmental() -> Self {
        WeightVector(vec![0.0, 0.99, 0.0, -0.95, -0.90])
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "economic" => Ok(Self::economic()),
            "exero-environmental" | "environmental" => Ok(Self::exero_environmental()),
            other => Err(Error::Config(format!(
                "unknown weight preset '{other}' (available: economic, exero-environmental)"
            ))),
        }
    }

    pub fn active(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&j| self.0[j] != 0.0).collect()
    }
}

/// Weighted matrix restricted to the nonzero-weight criteria.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WeightedMatrix {
    /// Column indices of the original matrix that were kept.
    pub active: Vec<usize>,
    pub values: Vec<Vec<f64>>,
    pub ideal_plus: Vec<f64>,
    pub ideal_minus: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TopsisResult {
    pub alternatives: Vec<String>,
    /// Closeness per alternative, in input order.
    pub closeness: Vec<f64>,
    /// Alternatives sorted by descending closeness.
    pub ranking: Vec<String>,
}

impl TopsisResult {
    pub fn score(&self, alternative: &str) -> Option<f64> {
        self.alternatives
            .iter()
            .position(|a| a == alternative)
            .map(|i| self.closeness[i])
    }
}

/// Divides each column by its Euclidean norm.
pub fn normalize_matrix(m: &DecisionMatrix) -> Result<DecisionMatrix> {
    m.validate()?;
    let norms: Vec<f64> = (0..m.criteria.len())
        .map(|j| m.column(j).map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if let Some(j) = norms.iter().position(|&n| n == 0.0) {
        return Err(Error::DegenerateColumn {
            criterion: m.criteria[j].clone(),
        });
    }
    Ok(DecisionMatrix {
        alternatives: m.alternatives.clone(),
        criteria: m.criteria.clone(),
        values: m
            .values
            .iter()
            .map(|row| row.iter().zip(&norms).map(|(v, n)| v / n).collect())
            .collect(),
    })
}

fn check_weights(m: &DecisionMatrix, w: &WeightVector) -> Result<()> {
    if w.0.len() != m.criteria.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} criteria",
            w.0.len(),
            m.criteria.len()
        )));
    }
    if w.0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("weights must be finite".into()));
    }
    if w.active().is_empty() {
        return Err(Error::Config("at least one weight must be nonzero".into()));
    }
    Ok(())
}

/// Scales normalized columns by weight magnitude and finds both ideals.
pub fn weight_and_ideal(normalized: &DecisionMatrix, w: &WeightVector) -> Result<WeightedMatrix> {
    check_weights(normalized, w)?;
    let active = w.active();
    let values: Vec<Vec<f64>> = normalized
        .values
        .iter()
        .map(|row| active.iter().map(|&j| w.0[j].abs() * row[j]).collect())
        .collect();
    let (mut ideal_plus, mut ideal_minus) = (Vec::new(), Vec::new());
    for (k, &j) in active.iter().enumerate() {
        let col = values.iter().map(|row| row[k]);
        let hi = col.clone().fold(f64::NEG_INFINITY, f64::max);
        let lo = col.fold(f64::INFINITY, f64::min);
        if w.0[j] > 0.0 {
            ideal_plus.push(hi);
            ideal_minus.push(lo);
        } else {
            ideal_plus.push(lo);
            ideal_minus.push(hi);
        }
    }
    Ok(WeightedMatrix {
        active,
        values,
        ideal_plus,
        ideal_minus,
    })
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Closeness to the positive ideal; ties keep input order.
pub fn topsis_rank(m: &DecisionMatrix, w: &WeightVector) -> Result<TopsisResult> {
    m.validate()?;
    check_weights(m, w)?;
    // Zero-weight criteria play no part, so they may hold degenerate columns.
    let active = w.active();
    let reduced = m.select_columns(&active);
    let reduced_w = WeightVector(active.iter().map(|&j| w.0[j]).collect());
    let weighted = weight_and_ideal(&normalize_matrix(&reduced)?, &reduced_w)?;
    let closeness: Vec<f64> = weighted
        .values
        .iter()
        .map(|row| {
            let d_plus = distance(row, &weighted.ideal_plus);
            let d_minus = distance(row, &weighted.ideal_minus);
            if d_plus + d_minus == 0.0 {
                0.5
            } else {
                d_minus / (d_minus + d_plus)
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..closeness.len()).collect();
    order.sort_by(|&a, &b| closeness[b].total_cmp(&closeness[a]));
    Ok(TopsisResult {
        alternatives: m.alternatives.clone(),
        ranking: order.iter().map(|&i| m.alternatives[i].clone()).collect(),
        closeness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn matrix(values: Vec<Vec<f64>>) -> DecisionMatrix {
        let m = values.len();
        let n = values[0].len();
        DecisionMatrix::new(
            (0..m).map(|i| format!("a{i}")).collect(),
            (0..n).map(|j| format!("c{j}")).collect(),
            values,
        )
        .unwrap()
    }

    #[test]
    fn normalize_three_four_five() {
        let n = normalize_matrix(&matrix(vec![vec![3.0], vec![4.0]])).unwrap();
        assert_relative_eq!(n.values[0][0], 0.6);
        assert_relative_eq!(n.values[1][0], 0.8);
        let n = normalize_matrix(&matrix(vec![vec![1.0], vec![0.0], vec![0.0]])).unwrap();
        assert_eq!(n.values, vec![vec![1.0], vec![0.0], vec![0.0]]);
        match normalize_matrix(&matrix(vec![vec![1.0, 0.0], vec![2.0, 0.0]])) {
            Err(Error::DegenerateColumn { criterion }) => assert_eq!(criterion, "c1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ideals_swap_with_sign() {
        let n = normalize_matrix(&matrix(vec![vec![1.0], vec![0.0]])).unwrap();
        let b = weight_and_ideal(&n, &WeightVector(vec![1.0])).unwrap();
        assert_eq!((b.ideal_plus[0], b.ideal_minus[0]), (1.0, 0.0));
        let c = weight_and_ideal(&n, &WeightVector(vec![-1.0])).unwrap();
        assert_eq!((c.ideal_plus[0], c.ideal_minus[0]), (0.0, 1.0));
    }

    #[test]
    fn economic_weights_drop_unused_criteria() {
        let n = normalize_matrix(&DecisionMatrix::reference_cycles()).unwrap();
        let w = weight_and_ideal(&n, &WeightVector::economic()).unwrap();
        assert_eq!(w.active, vec![0, 2]);
        assert_eq!(w.values[0].len(), 2);
    }

    #[test]
    fn endpoints_and_ties() {
        let r = topsis_rank(&matrix(vec![vec![1.0], vec![0.0]]), &WeightVector(vec![1.0])).unwrap();
        assert_eq!(r.closeness, vec![1.0, 0.0]);
        let r = topsis_rank(
            &matrix(vec![vec![2.0, 5.0], vec![2.0, 5.0]]),
            &WeightVector(vec![1.0, -1.0]),
        )
        .unwrap();
        assert_eq!(r.closeness[0], r.closeness[1]);
        assert_eq!(r.ranking, vec!["a0", "a1"]);
        let single = topsis_rank(&matrix(vec![vec![2.0, 5.0]]), &WeightVector(vec![1.0, -1.0])).unwrap();
        assert_eq!(single.closeness, vec![0.5]);
    }

    #[test]
    fn weight_errors() {
        let m = matrix(vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(matches!(
            topsis_rank(&m, &WeightVector(vec![1.0])),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(topsis_rank(&m, &WeightVector(vec![0.0, 0.0])).is_err());
        assert!(WeightVector::preset("economic").is_ok());
        assert!(WeightVector::preset("Exero_Environmental").is_ok());
        assert!(WeightVector::preset("cheap").is_err());
    }

    #[test]
    fn published_rankings() {
        let m = DecisionMatrix::reference_cycles();
        let eco = topsis_rank(&m, &WeightVector::economic()).unwrap();
        assert_eq!(eco.ranking, vec!["case1", "case2", "case3"]);
        let env = topsis_rank(&m, &WeightVector::exero_environmental()).unwrap();
        assert_eq!(env.ranking, vec!["case3", "case1", "case2"]);
    }

    fn matrices() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
        (2usize..6, 1usize..5).prop_flat_map(|(m, n)| {
            (
                proptest::collection::vec(proptest::collection::vec(0.1f64..100.0, n), m),
                proptest::collection::vec(prop_oneof![-1.0f64..-0.05, 0.05f64..1.0], n),
            )
        })
    }

    proptest! {
        #[test]
        fn scale_invariance((values, w) in matrices(), c in 0.01f64..100.0, col in 0usize..5) {
            let m = matrix(values.clone());
            let col = col % m.criteria.len();
            let mut scaled = values;
            for row in &mut scaled {
                row[col] *= c;
            }
            let a = topsis_rank(&m, &WeightVector(w.clone())).unwrap();
            let b = topsis_rank(&matrix(scaled), &WeightVector(w)).unwrap();
            for (x, y) in a.closeness.iter().zip(&b.closeness) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }

        #[test]
        fn closeness_bounded_and_permutation((values, w) in matrices()) {
            let m = matrix(values.clone());
            let r = topsis_rank(&m, &WeightVector(w.clone())).unwrap();
            for c in &r.closeness {
                prop_assert!((0.0..=1.0).contains(c));
            }
            let mut rev = values;
            rev.reverse();
            let r2 = topsis_rank(&matrix(rev), &WeightVector(w)).unwrap();
            let n = r.closeness.len();
            for i in 0..n {
                prop_assert!((r.closeness[i] - r2.closeness[n - 1 - i]).abs() < 1e-12);
            }
        }

        #[test]
        fn improving_benefit_never_hurts((values, w) in matrices(), who in 0usize..6, bump in 0.0f64..50.0) {
            let mut w = w;
            w[0] = w[0].abs();
            let who = who % values.len();
            let before = topsis_rank(&matrix(values.clone()), &WeightVector(w.clone())).unwrap();
            let mut better = values;
            better[who][0] += bump;
            let after = topsis_rank(&matrix(better), &WeightVector(w)).unwrap();
            prop_assert!(after.closeness[who] >= before.closeness[who] - 1e-12);
        }
    }
}
