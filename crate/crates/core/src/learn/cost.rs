use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ClassScores;
use crate::corpus::Label;
use crate::error::{Error, Result};

/// Misclassification costs. `cost(truth, predicted)`; rows and columns are
/// in `Negative, Neutral, Positive` order and the diagonal is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct CostMatrix([[f64; 3]; 3]);

impl CostMatrix {
    pub fn new(rows: [[f64; 3]; 3]) -> Result<Self> {
        for (t, row) in rows.iter().enumerate() {
            for (p, &c) in row.iter().enumerate() {
                if !c.is_finite() || c < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "cost[{t}][{p}] = {c} must be finite and non-negative"
                    )));
                }
                if t == p && c != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "diagonal cost[{t}][{t}] must be 0, got {c}"
                    )));
                }
            }
        }
        Ok(CostMatrix(rows))
    }

    /// Every mistake costs 1.
    pub fn uniform() -> Self {
        CostMatrix([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
    }

    pub fn get(&self, truth: Label, predicted: Label) -> f64 {
        self.0[truth.index()][predicted.index()]
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        self.0
    }

    /// Parses three rows of three numbers separated by whitespace or commas.
    /// `#` starts a comment; blank lines are ignored.
    pub fn parse(input: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let values: Vec<f64> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::MalformedLine {
                    line: i + 1,
                    reason: e.to_string(),
                })?;
            let row: [f64; 3] = values.try_into().map_err(|v: Vec<f64>| Error::MalformedLine {
                line: i + 1,
                reason: format!("expected 3 costs, found {}", v.len()),
            })?;
            rows.push(row);
        }
        let rows: [[f64; 3]; 3] = rows
            .try_into()
            .map_err(|r: Vec<[f64; 3]>| Error::InvalidParameter(format!("cost matrix needs 3 rows, found {}", r.len())))?;
        CostMatrix::new(rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        CostMatrix::parse(&text)
    }

    /// Expected cost of predicting each label under `posterior`.
    pub fn expected_costs(&self, posterior: &ClassScores) -> ClassScores {
        let mut out = [0.0; 3];
        for (p, slot) in out.iter_mut().enumerate() {
            *slot = (0..3).map(|t| posterior[t] * self.0[t][p]).sum();
        }
        out
    }
}

/// Mistaking a polar tweet for a neutral one costs 2.5; every other mistake
/// costs 1.
impl Default for CostMatrix {
    fn default() -> Self {
        let mut m = CostMatrix::uniform();
        m.0[Label::Positive.index()][Label::Neutral.index()] = 2.5;
        m.0[Label::Negative.index()][Label::Neutral.index()] = 2.5;
        m
    }
}

impl TryFrom<[[f64; 3]; 3]> for CostMatrix {
    type Error = Error;

    fn try_from(rows: [[f64; 3]; 3]) -> Result<Self> {
        CostMatrix::new(rows)
    }
}

impl From<CostMatrix> for [[f64; 3]; 3] {
    fn from(m: CostMatrix) -> Self {
        m.0
    }
}

impl fmt::Display for CostMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0 {
            writeln!(f, "{} {} {}", row[0], row[1], row[2])?;
        }
        Ok(())
    }
}

/// Label of least expected cost, ties going to the earliest label.
pub fn cost_sensitive_predict(posterior: &ClassScores, costs: &CostMatrix) -> Result<Label> {
    if posterior.iter().any(|p| !p.is_finite() || *p < -1e-12) {
        return Err(Error::InvalidDistribution(format!("{posterior:?}")));
    }
    let total: f64 = posterior.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidDistribution(format!("{posterior:?} sums to {total}")));
    }
    let expected = costs.expected_costs(posterior);
    let mut best = 0;
    for i in 1..3 {
        if expected[i] < expected[best] {
            best = i;
        }
    }
    Ok(Label::ALL[best])
}

/// Weight of each training instance: the total cost of misclassifying its
/// true class, halved so the uniform matrix gives weight 1.
pub fn labels_to_instance_weights(labels: &[Label], costs: &CostMatrix) -> Vec<f64> {
    labels
        .iter()
        .map(|&t| Label::ALL.iter().map(|&p| costs.get(t, p)).sum::<f64>() / 2.0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::argmax_label;
    use proptest::prelude::*;

    #[test]
    fn default_matrix_shifts_borderline_neutral() {
        // Expected costs: neg 0.6, neu 0.3*2.5 + 0.2*2.5 = 1.25, pos 0.5.
        let post = [0.2, 0.5, 0.3];
        assert_eq!(argmax_label(&post), Label::Neutral);
        assert_eq!(cost_sensitive_predict(&post, &CostMatrix::default()).unwrap(), Label::Positive);
    }

    #[test]
    fn rejects_bad_distributions() {
        let c = CostMatrix::uniform();
        assert!(cost_sensitive_predict(&[0.5, 0.5, 0.5], &c).is_err());
        assert!(cost_sensitive_predict(&[f64::NAN, 0.5, 0.5], &c).is_err());
        assert!(cost_sensitive_predict(&[-0.5, 0.5, 1.0], &c).is_err());
    }

    #[test]
    fn instance_weights() {
        let w = labels_to_instance_weights(&Label::ALL, &CostMatrix::default());
        assert_eq!(w, vec![1.75, 1.0, 1.75]);
        let u = labels_to_instance_weights(&Label::ALL, &CostMatrix::uniform());
        assert_eq!(u, vec![1.0; 3]);
    }

    #[test]
    fn parse_and_validate() {
        let m = CostMatrix::parse("# truth rows\n0 1 1\n1 0 1\n1 2.5 0\n").unwrap();
        let commented = CostMatrix::parse("0, 1, 1 # neg\n1 0 1\n1 2.5 0 # pos\n").unwrap();
        assert_eq!(commented, m);
        assert_eq!(m.get(Label::Positive, Label::Neutral), 2.5);
        assert!(CostMatrix::parse("0 1 1\n1 0 1\n").is_err());
        assert!(CostMatrix::parse("0 1\n1 0 1\n1 1 0").is_err());
        assert!(CostMatrix::parse("1 1 1\n1 0 1\n1 1 0").is_err());
        assert!(CostMatrix::parse("0 -1 1\n1 0 1\n1 1 0").is_err());
    }

    #[test]
    fn serde_round_trip() {
        let m = CostMatrix::default();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<CostMatrix>(&json).unwrap(), m);
        assert!(serde_json::from_str::<CostMatrix>("[[1,0,0],[0,0,0],[0,0,0]]").is_err());
    }

    proptest! {
        #[test]
        fn uniform_costs_match_argmax(a in 0u32..=100, b in 0u32..=100) {
            prop_assume!(a + b <= 100);
            let post = [a as f64 / 100.0, b as f64 / 100.0, (100 - a - b) as f64 / 100.0];
            prop_assert_eq!(
                cost_sensitive_predict(&post, &CostMatrix::uniform()).unwrap(),
                argmax_label(&post)
            );
        }
    }
}
