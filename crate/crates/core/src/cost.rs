//! Abstract hardware cost model.
//!
//! Assigns latency and resource estimates to a trained model by statically
//! counting the primitive operations of one worst-case inference and
//! pricing them through a [`CostTable`]. The numbers are calibration-based
//! estimates for comparing datapaths, not synthesis results.
//!
//! Counting model (primitives to produce the model's raw decision value;
//! the shared final label threshold is not counted):
//!
//! - knn: n squared distances (d multiplies, 2d-1 adds each under the
//!   Euclidean metric; 2d-1 adds under Manhattan), n * ceil(log2(k+1))
//!   compares for bounded-heap selection, k adds for the vote.
//! - mlp: h*(d+1) multiplies, h*(d+1) adds, h+1 tanh for a d-h-1 net.
//! - decision tree: one compare per level of the worst-case path.
//! - bagged trees: the sum over member trees plus T-1 adds for the vote.
//! - linear (svm / logistic): d multiplies, d adds, then the sigmoid as
//!   one exp, one add, one divide.
//! - rule list: one compare per base case plus ceil(log2(intervals + 1))
//!   compares for the interval binary search.
//!
//! Every stored parameter word is counted as one `memory_word`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knn::DistanceMetric;
use crate::model::TrainedModel;
use crate::rules::RuleListModel;
use crate::tree::TreeNode;

/// Cost of one primitive operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PrimitiveCost {
    pub cycles: u64,
    pub bram: u64,
    pub dsp: u64,
    pub ff: u64,
    pub lut: u64,
}

/// Per-primitive prices and the clock period used to convert cycles to
/// nanoseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTable {
    pub compare: PrimitiveCost,
    pub add: PrimitiveCost,
    pub multiply: PrimitiveCost,
    pub divide: PrimitiveCost,
    pub exp_eval: PrimitiveCost,
    pub tanh_eval: PrimitiveCost,
    pub memory_word: PrimitiveCost,
    pub clock_period_ns: f64,
}

const fn pc(cycles: u64, bram: u64, dsp: u64, ff: u64, lut: u64) -> PrimitiveCost {
    PrimitiveCost {
        cycles,
        bram,
        dsp,
        ff,
        lut,
    }
}

impl Default for CostTable {
    /// Default calibration: a four-feature linear model with a sigmoid
    /// costs 4*3 + 4*1 + (25 + 1 + 10) = 52 cycles, or 1300 ns at the
    /// 25 ns clock. Memory words price storage (resources), not cycles.
    fn default() -> Self {
        CostTable {
            compare: pc(1, 0, 0, 8, 16),
            add: pc(1, 0, 0, 16, 32),
            multiply: pc(3, 0, 3, 32, 64),
            divide: pc(10, 0, 8, 64, 128),
            exp_eval: pc(25, 0, 12, 96, 200),
            tanh_eval: pc(30, 0, 14, 112, 240),
            memory_word: pc(0, 1, 0, 0, 0),
            clock_period_ns: 25.0,
        }
    }
}

impl CostTable {
    /// Unit table: every compute primitive costs one cycle and nothing
    /// else; memory words are free. Latency then equals the raw
    /// primitive count.
    pub fn unit() -> Self {
        CostTable {
            compare: pc(1, 0, 0, 0, 0),
            add: pc(1, 0, 0, 0, 0),
            multiply: pc(1, 0, 0, 0, 0),
            divide: pc(1, 0, 0, 0, 0),
            exp_eval: pc(1, 0, 0, 0, 0),
            tanh_eval: pc(1, 0, 0, 0, 0),
            memory_word: pc(0, 0, 0, 0, 0),
            clock_period_ns: 1.0,
        }
    }
}

/// Static primitive counts for one worst-case inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PrimitiveCounts {
    pub compare: u64,
    pub add: u64,
    pub multiply: u64,
    pub divide: u64,
    pub exp_eval: u64,
    pub tanh_eval: u64,
    pub memory_word: u64,
}

impl PrimitiveCounts {
    fn accumulate(&mut self, other: &PrimitiveCounts) {
        self.compare += other.compare;
        self.add += other.add;
        self.multiply += other.multiply;
        self.divide += other.divide;
        self.exp_eval += other.exp_eval;
        self.tanh_eval += other.tanh_eval;
        self.memory_word += other.memory_word;
    }
}

/// Latency and resource estimate for one model under one cost table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub latency_cycles: u64,
    pub latency_ns: f64,
    /// Cycles before the next input can be accepted: latency + 1.
    pub interval_cycles: u64,
    pub bram: u64,
    pub dsp: u64,
    pub ff: u64,
    pub lut: u64,
    /// Model resource estimate: the sum of the four categories.
    pub rme: u64,
}

fn ceil_log2(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros() as u64
    }
}

fn tree_words(node: &TreeNode) -> u64 {
    match node {
        TreeNode::Leaf { .. } => 2,
        TreeNode::Internal { left, right, .. } => 2 + tree_words(left) + tree_words(right),
    }
}

fn rules_counts(m: &RuleListModel) -> PrimitiveCounts {
    PrimitiveCounts {
        compare: m.base_cases.len() as u64 + ceil_log2(m.intervals.len() as u64 + 1),
        memory_word: 2 * m.base_cases.len() as u64 + 4 * m.intervals.len() as u64,
        ..Default::default()
    }
}

/// Counts the primitives of one worst-case inference.
pub fn primitive_counts(model: &TrainedModel) -> Result<PrimitiveCounts> {
    let counts = match model {
        TrainedModel::Knn(m) => {
            let n = m.features.len() as u64;
            if n == 0 {
                return Err(Error::Model("knn model stores no samples".into()));
            }
            let d = m.n_features() as u64;
            let per_distance_adds = 2 * d - 1;
            PrimitiveCounts {
                multiply: if m.metric == DistanceMetric::Euclidean {
                    n * d
                } else {
                    0
                },
                add: n * per_distance_adds + m.k as u64,
                compare: n * ceil_log2(m.k as u64 + 1),
                memory_word: n * d + n,
                ..Default::default()
            }
        }
        TrainedModel::Mlp(m) => {
            let d = m.input_dim as u64;
            let h = m.hidden_dim as u64;
            PrimitiveCounts {
                multiply: h * (d + 1),
                add: h * (d + 1),
                tanh_eval: h + 1,
                memory_word: h * d + h + h + 1,
                ..Default::default()
            }
        }
        TrainedModel::DecisionTree(m) => PrimitiveCounts {
            compare: m.depth() as u64,
            memory_word: tree_words(&m.root),
            ..Default::default()
        },
        TrainedModel::BaggedTrees(m) => {
            let mut counts = PrimitiveCounts::default();
            for tree in &m.trees {
                counts.accumulate(&PrimitiveCounts {
                    compare: tree.depth() as u64,
                    memory_word: tree_words(&tree.root),
                    ..Default::default()
                });
            }
            counts.add += m.trees.len() as u64 - 1;
            counts
        }
        TrainedModel::Svm(m) | TrainedModel::LogisticRegression(m) => {
            let d = m.weights.len() as u64;
            PrimitiveCounts {
                multiply: d,
                add: d + 1,
                exp_eval: 1,
                divide: 1,
                memory_word: d + 1,
                ..Default::default()
            }
        }
        TrainedModel::OneR(m) | TrainedModel::ManyRulesOneR(m) => {
            if m.intervals.is_empty() && m.base_cases.is_empty() {
                return Err(Error::Model("rule model holds no rules".into()));
            }
            rules_counts(m)
        }
    };
    Ok(counts)
}

/// Prices a model's primitive counts through a cost table.
pub fn estimate_cost(model: &TrainedModel, table: &CostTable) -> Result<CostReport> {
    let counts = primitive_counts(model)?;
    let priced: [(u64, &PrimitiveCost); 7] = [
        (counts.compare, &table.compare),
        (counts.add, &table.add),
        (counts.multiply, &table.multiply),
        (counts.divide, &table.divide),
        (counts.exp_eval, &table.exp_eval),
        (counts.tanh_eval, &table.tanh_eval),
        (counts.memory_word, &table.memory_word),
    ];
    let mut latency_cycles = 0;
    let (mut bram, mut dsp, mut ff, mut lut) = (0, 0, 0, 0);
    for (count, cost) in priced {
        latency_cycles += count * cost.cycles;
        bram += count * cost.bram;
        dsp += count * cost.dsp;
        ff += count * cost.ff;
        lut += count * cost.lut;
    }
    Ok(CostReport {
        latency_cycles,
        latency_ns: latency_cycles as f64 * table.clock_period_ns,
        interval_cycles: latency_cycles + 1,
        bram,
        dsp,
        ff,
        lut,
        rme: bram + dsp + ff + lut,
    })
}

/// Stable comparison ordering: highest RME first, then highest latency,
/// then name.
pub fn rank_models(reports: &[(String, CostReport)]) -> Vec<(String, CostReport)> {
    let mut ranked = reports.to_vec();
    ranked.sort_by(|a, b| {
        b.1.rme
            .cmp(&a.1.rme)
            .then(b.1.latency_cycles.cmp(&a.1.latency_cycles))
            .then(a.0.cmp(&b.0))
    });
    ranked
}

/// Cost summary CSV:
/// `model,latency_cycles,latency_ns,interval,bram,dsp,ff,lut,rme`.
pub fn cost_csv_string(reports: &[(String, CostReport)]) -> String {
    let mut out = String::from("model,latency_cycles,latency_ns,interval,bram,dsp,ff,lut,rme\n");
    for (name, r) in reports {
        out.push_str(&format!(
            "{name},{},{},{},{},{},{},{},{}\n",
            r.latency_cycles, r.latency_ns, r.interval_cycles, r.bram, r.dsp, r.ff, r.lut, r.rme
        ));
    }
    out
}
