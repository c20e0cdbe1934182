use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{argmax_label, check_dim, check_training, class_counts, ClassScores};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::{split_gain, FeatureVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeParams {
    pub max_depth: usize,
    /// Smallest number of training instances allowed in a leaf.
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 20,
            min_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    Leaf {
        label: Label,
        /// Training instances per class reaching this leaf.
        counts: [usize; 3],
    },
    /// Instances with `value > threshold` go right.
    Split {
        column: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Binary decision tree grown greedily on information gain. Node 0 is the
/// root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTreeModel {
    dim: usize,
    params: TreeParams,
    nodes: Vec<Node>,
}

impl DecisionTreeModel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    fn leaf(&self, v: &FeatureVector) -> Result<(Label, [usize; 3])> {
        check_dim(v, self.dim)?;
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { label, counts } => return Ok((label, counts)),
                Node::Split {
                    column,
                    threshold,
                    left,
                    right,
                } => i = if v.get(column) > threshold { right } else { left },
            }
        }
    }

    /// Class distribution of the training instances in the leaf `v` reaches.
    pub fn distribution(&self, v: &FeatureVector) -> Result<ClassScores> {
        let (_, counts) = self.leaf(v)?;
        let total: usize = counts.iter().sum();
        Ok(counts.map(|c| c as f64 / total as f64))
    }
}

struct Candidate {
    gain: f64,
    column: usize,
    threshold: f64,
}

struct Builder<'a> {
    vectors: &'a [FeatureVector],
    labels: &'a [Label],
    params: TreeParams,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let counts = class_counts(&idx.iter().map(|&i| self.labels[i]).collect::<Vec<_>>());
        let at = self.nodes.len();
        let label = argmax_label(&counts.map(|c| c as f64));
        self.nodes.push(Node::Leaf { label, counts });

        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.params.max_depth || idx.len() < 2 * self.params.min_leaf {
            return at;
        }
        let Some(best) = self.best_split(&idx, &counts) else {
            return at;
        };
        let (right, left): (Vec<usize>, Vec<usize>) = idx
            .into_iter()
            .partition(|&i| self.vectors[i].get(best.column) > best.threshold);
        let l = self.grow(left, depth + 1);
        let r = self.grow(right, depth + 1);
        self.nodes[at] = Node::Split {
            column: best.column,
            threshold: best.threshold,
            left: l,
            right: r,
        };
        at
    }

    /// Highest-gain split leaving at least `min_leaf` instances on each
    /// side. Ties go to the lower column, then the lower threshold. A split
    /// of zero gain is still taken when nothing better exists, since a later
    /// split may separate the classes (as with XOR).
    fn best_split(&self, idx: &[usize], parent: &[usize; 3]) -> Option<Candidate> {
        let mut by_column: BTreeMap<usize, Vec<(f64, Label)>> = BTreeMap::new();
        for &i in idx {
            for &(j, x) in self.vectors[i].entries() {
                by_column.entry(j).or_default().push((x, self.labels[i]));
            }
        }
        let n = idx.len();
        let min_leaf = self.params.min_leaf.max(1);
        let mut best: Option<Candidate> = None;
        for (column, mut values) in by_column {
            // Implicit zeros form one block at value 0.
            let mut zero = *parent;
            for &(_, l) in &values {
                zero[l.index()] -= 1;
            }
            let zeros = n - values.len();
            if zeros > 0 {
                values.extend(
                    Label::ALL
                        .iter()
                        .flat_map(|&l| std::iter::repeat_n((0.0, l), zero[l.index()])),
                );
            }
            values.sort_by(|a, b| a.0.total_cmp(&b.0));

            // Sweep from the top: `right` holds everything above the cut.
            let mut right = [0usize; 3];
            let mut right_n = 0;
            let mut k = values.len();
            while k > 0 {
                let v = values[k - 1].0;
                while k > 0 && values[k - 1].0 == v {
                    right[values[k - 1].1.index()] += 1;
                    right_n += 1;
                    k -= 1;
                }
                if k == 0 {
                    break;
                }
                if right_n < min_leaf || n - right_n < min_leaf {
                    continue;
                }
                let threshold = (values[k - 1].0 + v) / 2.0;
                let gain = split_gain(parent, &right);
                let better = match &best {
                    None => true,
                    Some(b) => gain > b.gain || (gain == b.gain && column == b.column && threshold < b.threshold),
                };
                if better {
                    best = Some(Candidate {
                        gain,
                        column,
                        threshold,
                    });
                }
            }
        }
        best
    }
}

/// Grows a tree. Nodes stop splitting when pure, at `max_depth`, when too
/// small to give two leaves of `min_leaf`, or when no column separates the
/// instances at all.
pub fn train_tree(vectors: &[FeatureVector], labels: &[Label], dim: usize, params: &TreeParams) -> Result<DecisionTreeModel> {
    check_training(vectors, labels, dim)?;
    if vectors.is_empty() {
        return Err(Error::EmptyTrainingData);
    }
    if params.min_leaf == 0 {
        return Err(Error::InvalidParameter("min_leaf must be at least 1".into()));
    }
    let mut b = Builder {
        vectors,
        labels,
        params: *params,
        nodes: Vec::new(),
    };
    b.grow((0..vectors.len()).collect(), 0);
    Ok(DecisionTreeModel {
        dim,
        params: *params,
        nodes: b.nodes,
    })
}

pub fn predict_tree(model: &DecisionTreeModel, v: &FeatureVector) -> Result<Label> {
    Ok(model.leaf(v)?.0)
}
