//! Random forest of Gini-impurity decision trees.
//!
//! Each tree sees a bootstrap resample and considers a random subset of
//! features at every node. Trees draw from independent RNG streams derived
//! from the forest seed and the tree index, so the fitted forest does not
//! depend on how many threads built it.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_examples, Example};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::textfeat::SparseVector;

/// How many features a node examines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// `max(1, floor(sqrt(V)))`
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> usize {
        let k = match self {
            MaxFeatures::Sqrt => (n_features as f64).sqrt() as usize,
            MaxFeatures::All => n_features,
            MaxFeatures::Count(k) => k,
        };
        k.clamp(1, n_features.max(1))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// `None` grows trees until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: Some(40),
            min_samples_split: 2,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::Config("a forest needs at least one tree".into()));
        }
        if self.max_depth == Some(0) {
            return Err(Error::Config("max_depth must be positive".into()));
        }
        if self.min_samples_split < 2 {
            return Err(Error::Config("min_samples_split must be at least 2".into()));
        }
        if self.max_features == MaxFeatures::Count(0) {
            return Err(Error::Config("max_features must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    /// Samples with `x[feature] <= threshold` go left.
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        label: Label,
    },
}

/// Nodes stored in an arena; index 0 is the root and children always come
/// after their parent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn predict(&self, x: &SparseVector) -> Label {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { label } => return *label,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x.get(*feature as usize) <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + walk(nodes, *left as usize).max(walk(nodes, *right as usize))
                }
            }
        }
        walk(&self.nodes, 0)
    }

    pub(crate) fn validate(&self, n_features: usize) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("tree has no nodes".into());
        }
        let n = self.nodes.len();
        for (at, node) in self.nodes.iter().enumerate() {
            if let Node::Split {
                feature,
                threshold,
                left,
                right,
            } = node
            {
                if *feature as usize >= n_features {
                    return Err(format!(
                        "node {at} splits on feature {feature} >= {n_features}"
                    ));
                }
                if !threshold.is_finite() {
                    return Err(format!("node {at} has a non-finite threshold"));
                }
                for child in [*left as usize, *right as usize] {
                    if child <= at || child >= n {
                        return Err(format!("node {at} has invalid child {child}"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Majority vote; a split vote goes to the positive class.
    pub fn predict(&self, x: &SparseVector) -> Label {
        let positive = self
            .trees
            .iter()
            .filter(|t| t.predict(x) == Label::Positive)
            .count();
        Label::from(2 * positive >= self.trees.len())
    }
}

/// Gini impurity `1 − Σ p_c²` of a two-class count pair.
pub fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p0 = counts[0] as f64 / n;
    let p1 = counts[1] as f64 / n;
    1.0 - (p0 * p0 + p1 * p1)
}

/// `n · gini(counts)`, computed without dividing twice.
fn weighted_gini(counts: [usize; 2]) -> f64 {
    let n = counts[0] + counts[1];
    if n == 0 {
        return 0.0;
    }
    let sq = (counts[0] * counts[0] + counts[1] * counts[1]) as f64;
    n as f64 - sq / n as f64
}

fn majority(counts: [usize; 2]) -> Label {
    Label::from(counts[1] >= counts[0])
}

/// SplitMix64 finalizer over the forest seed and tree index.
pub fn tree_seed(seed: u64, tree: usize) -> u64 {
    let mut z = seed.wrapping_add((tree as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Trains `cfg.n_trees` trees. `threads == 0` uses the global rayon pool;
/// the result is identical for every thread count.
pub fn train(
    data: &[Example],
    n_features: usize,
    cfg: &ForestConfig,
    seed: u64,
    threads: usize,
) -> Result<RandomForest> {
    cfg.validate()?;
    check_examples(data, n_features)?;

    let grow = |t: usize| TreeBuilder::new(data, n_features, cfg, tree_seed(seed, t)).grow();
    let trees = match threads {
        1 => (0..cfg.n_trees).map(grow).collect(),
        0 => (0..cfg.n_trees).into_par_iter().map(grow).collect(),
        n => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?
            .install(|| (0..cfg.n_trees).into_par_iter().map(grow).collect()),
    };
    Ok(RandomForest { trees })
}

struct Candidate {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

struct TreeBuilder<'a> {
    data: &'a [Example],
    n_features: usize,
    cfg: &'a ForestConfig,
    per_node: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

impl<'a> TreeBuilder<'a> {
    fn new(data: &'a [Example], n_features: usize, cfg: &'a ForestConfig, seed: u64) -> Self {
        TreeBuilder {
            data,
            n_features,
            cfg,
            per_node: cfg.max_features.resolve(n_features),
            rng: ChaCha8Rng::seed_from_u64(seed),
            nodes: Vec::new(),
        }
    }

    fn grow(mut self) -> DecisionTree {
        let n = self.data.len();
        let root: Vec<u32> = if self.cfg.bootstrap {
            (0..n).map(|_| self.rng.gen_range(0..n) as u32).collect()
        } else {
            (0..n as u32).collect()
        };

        self.nodes.push(Node::Leaf {
            label: Label::Positive,
        });
        let mut pending = vec![(root, 0usize, 0usize)];
        while let Some((samples, depth, slot)) = pending.pop() {
            let counts = self.label_counts(&samples);
            let stop = counts[0] == 0
                || counts[1] == 0
                || self.cfg.max_depth.is_some_and(|d| depth >= d)
                || samples.len() < self.cfg.min_samples_split;
            let split = if stop {
                None
            } else {
                self.best_split(&samples, counts)
            };
            let Some(split) = split else {
                self.nodes[slot] = Node::Leaf {
                    label: majority(counts),
                };
                continue;
            };

            let (left, right): (Vec<u32>, Vec<u32>) = samples
                .iter()
                .partition(|&&s| self.data[s as usize].0.get(split.feature) <= split.threshold);
            let l = self.nodes.len();
            self.nodes.push(Node::Leaf {
                label: Label::Positive,
            });
            self.nodes.push(Node::Leaf {
                label: Label::Positive,
            });
            self.nodes[slot] = Node::Split {
                feature: split.feature as u32,
                threshold: split.threshold,
                left: l as u32,
                right: (l + 1) as u32,
            };
            pending.push((right, depth + 1, l + 1));
            pending.push((left, depth + 1, l));
        }
        DecisionTree { nodes: self.nodes }
    }

    fn label_counts(&self, samples: &[u32]) -> [usize; 2] {
        let mut counts = [0; 2];
        for &s in samples {
            counts[self.data[s as usize].1.index()] += 1;
        }
        counts
    }

    /// Examines `per_node` random features. If every one of them is constant
    /// on this node, falls back to one feature drawn uniformly from those
    /// that vary, so a splittable node is never turned into a leaf.
    fn best_split(&mut self, samples: &[u32], counts: [usize; 2]) -> Option<Candidate> {
        let drawn = index::sample(&mut self.rng, self.n_features, self.per_node);
        let mut best: Option<Candidate> = None;
        for f in drawn.iter() {
            if let Some(c) = self.evaluate(f, samples, counts) {
                if best.as_ref().is_none_or(|b| c.impurity < b.impurity) {
                    best = Some(c);
                }
            }
        }
        if best.is_some() {
            return best;
        }

        let mut present: Vec<usize> = samples
            .iter()
            .flat_map(|&s| self.data[s as usize].0.iter().map(|(i, _)| i))
            .collect();
        present.sort_unstable();
        present.dedup();
        let mut varying: Vec<Candidate> = present
            .into_iter()
            .filter_map(|f| self.evaluate(f, samples, counts))
            .collect();
        if varying.is_empty() {
            return None;
        }
        let pick = self.rng.gen_range(0..varying.len());
        Some(varying.swap_remove(pick))
    }

    /// Best midpoint threshold for one feature, or `None` when the feature
    /// takes a single value on this node.
    fn evaluate(&self, feature: usize, samples: &[u32], counts: [usize; 2]) -> Option<Candidate> {
        let mut nonzero: Vec<(f64, Label)> = samples
            .iter()
            .filter_map(|&s| {
                let (x, y) = &self.data[s as usize];
                let v = x.get(feature);
                (v != 0.0).then_some((v, *y))
            })
            .collect();
        if nonzero.is_empty() {
            return None;
        }
        nonzero.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

        let mut left = [0usize; 2];
        let mut prev = None;
        if nonzero.len() < samples.len() {
            for (_, y) in &nonzero {
                left[y.index()] += 1;
            }
            left = [counts[0] - left[0], counts[1] - left[1]];
            prev = Some(0.0);
        }

        let n = samples.len() as f64;
        let mut best: Option<Candidate> = None;
        for &(v, y) in &nonzero {
            if let Some(p) = prev {
                if v > p {
                    let right = [counts[0] - left[0], counts[1] - left[1]];
                    let impurity = (weighted_gini(left) + weighted_gini(right)) / n;
                    if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                        let mut threshold = p + (v - p) / 2.0;
                        if threshold >= v {
                            threshold = p;
                        }
                        best = Some(Candidate {
                            feature,
                            threshold,
                            impurity,
                        });
                    }
                }
            }
            left[y.index()] += 1;
            prev = Some(v);
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example(values: &[f64], label: u8) -> Example {
        (
            SparseVector::from_dense(values).unwrap(),
            Label::from_u8(label).unwrap(),
        )
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini([0, 3]), 0.0);
        assert_eq!(gini([1, 1]), 0.5);
        assert!((gini([1, 2]) - 4.0 / 9.0).abs() < 1e-15);
        assert_eq!(gini([0, 0]), 0.0);
        for a in 0..20 {
            for b in 0..20 {
                let g = gini([a, b]);
                assert!((0.0..=0.5).contains(&g));
                assert!((weighted_gini([a, b]) - (a + b) as f64 * g).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn max_features_rule() {
        assert_eq!(MaxFeatures::Sqrt.resolve(100), 10);
        assert_eq!(MaxFeatures::Sqrt.resolve(99), 9);
        assert_eq!(MaxFeatures::Sqrt.resolve(1), 1);
        assert_eq!(MaxFeatures::All.resolve(7), 7);
        assert_eq!(MaxFeatures::Count(50).resolve(7), 7);
    }

    #[test]
    fn single_tree_fits_training_set() {
        // XOR-like layout over three features; needs more than one split.
        let data = vec![
            example(&[0.0, 0.0, 0.3], 0),
            example(&[1.0, 0.0, 0.0], 1),
            example(&[0.0, 1.0, 0.0], 1),
            example(&[1.0, 1.0, 0.0], 0),
            example(&[0.5, 0.0, 0.9], 1),
            example(&[0.0, 0.2, 0.9], 0),
        ];
        let cfg = ForestConfig {
            n_trees: 1,
            max_depth: None,
            bootstrap: false,
            ..Default::default()
        };
        let forest = train(&data, 3, &cfg, 9, 1).unwrap();
        for (x, y) in &data {
            assert_eq!(forest.predict(x), *y);
        }
        forest.trees[0].validate(3).unwrap();
    }

    #[test]
    fn depth_cap() {
        let data: Vec<Example> = (0..32)
            .map(|i| example(&[(i + 1) as f64], (i % 2) as u8))
            .collect();
        let cfg = ForestConfig {
            n_trees: 1,
            max_depth: Some(3),
            bootstrap: false,
            ..Default::default()
        };
        let forest = train(&data, 1, &cfg, 0, 1).unwrap();
        assert!(forest.trees[0].depth() <= 3);
    }

    #[test]
    fn vote_ties_go_positive() {
        let leaf = |l: u8| DecisionTree {
            nodes: vec![Node::Leaf {
                label: Label::from_u8(l).unwrap(),
            }],
        };
        let forest = RandomForest {
            trees: vec![leaf(0), leaf(1)],
        };
        assert_eq!(forest.predict(&SparseVector::default()), Label::Positive);
        let forest = RandomForest {
            trees: vec![leaf(0), leaf(0), leaf(1)],
        };
        assert_eq!(forest.predict(&SparseVector::default()), Label::Negative);
    }

    #[test]
    fn identical_trees_vote_like_one() {
        let data = vec![
            example(&[0.1, 0.0], 1),
            example(&[0.0, 0.7], 0),
            example(&[0.4, 0.2], 1),
        ];
        let cfg = ForestConfig {
            n_trees: 1,
            bootstrap: false,
            max_features: MaxFeatures::All,
            ..Default::default()
        };
        let single = train(&data, 2, &cfg, 5, 1).unwrap();
        let copies = RandomForest {
            trees: vec![single.trees[0].clone(); 5],
        };
        for probe in [[0.0, 0.0], [0.3, 0.0], [0.0, 0.5], [0.2, 0.2]] {
            let x = SparseVector::from_dense(&probe).unwrap();
            assert_eq!(copies.predict(&x), single.trees[0].predict(&x));
        }
    }

    #[test]
    fn thread_count_does_not_matter() {
        let data: Vec<Example> = (0..60)
            .map(|i| {
                let a = ((i * 7) % 11) as f64 / 10.0;
                let b = ((i * 3) % 5) as f64 / 4.0;
                example(&[a, b, (i % 3) as f64], ((i * 7 % 11 + i % 3) % 2) as u8)
            })
            .collect();
        let cfg = ForestConfig {
            n_trees: 12,
            ..Default::default()
        };
        let serial = train(&data, 3, &cfg, 77, 1).unwrap();
        for threads in [0, 2, 8] {
            assert_eq!(train(&data, 3, &cfg, 77, threads).unwrap(), serial);
        }
        assert_ne!(train(&data, 3, &cfg, 78, 1).unwrap(), serial);
    }

    #[test]
    fn rejects_bad_config() {
        let data = vec![example(&[1.0], 1), example(&[0.0], 0)];
        for cfg in [
            ForestConfig {
                n_trees: 0,
                ..Default::default()
            },
            ForestConfig {
                max_depth: Some(0),
                ..Default::default()
            },
            ForestConfig {
                min_samples_split: 1,
                ..Default::default()
            },
            ForestConfig {
                max_features: MaxFeatures::Count(0),
                ..Default::default()
            },
        ] {
            assert!(matches!(train(&data, 1, &cfg, 0, 1), Err(Error::Config(_))));
        }
        let single = vec![example(&[1.0], 1)];
        assert!(matches!(
            train(&single, 1, &ForestConfig::default(), 0, 1),
            Err(Error::TrainingData(_))
        ));
    }

    #[test]
    fn tree_validation() {
        let bad = DecisionTree {
            nodes: vec![Node::Split {
                feature: 0,
                threshold: 0.5,
                left: 0,
                right: 1,
            }],
        };
        assert!(bad.validate(1).is_err());
        let out_of_range = DecisionTree {
            nodes: vec![
                Node::Split {
                    feature: 4,
                    threshold: 0.5,
                    left: 1,
                    right: 2,
                },
                Node::Leaf {
                    label: Label::Positive,
                },
                Node::Leaf {
                    label: Label::Negative,
                },
            ],
        };
        assert!(out_of_range.validate(3).is_err());
        assert!(out_of_range.validate(5).is_ok());
    }
}
