//! Log-space inference over a linear chain.
//!
//! A lattice holds `T x L` state scores and an `L x L` transition matrix.
//! The score of a labeling `y` is
//!
//! ```text
//! score(y) = sum_t state[t][y_t] + sum_{t>=1} trans[y_{t-1}][y_t]
//! ```
//!
//! There is no virtual start label: the first position contributes its state
//! score only.

use super::ModelError;

/// `log(sum(exp(x)))`, stabilized by the maximum.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    len: usize,
    num_labels: usize,
    state: Vec<f64>,
    trans: Vec<f64>,
}

/// Posterior node and edge marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    len: usize,
    num_labels: usize,
    log_z: f64,
    node: Vec<f64>,
    edge: Vec<f64>,
}

impl Marginals {
    pub fn log_partition(&self) -> f64 {
        self.log_z
    }

    /// `P(y_t = y | x)`.
    pub fn node(&self, t: usize, y: usize) -> f64 {
        self.node[t * self.num_labels + y]
    }

    /// `P(y_{t-1} = from, y_t = to | x)` for `1 <= t < T`.
    pub fn edge(&self, t: usize, from: usize, to: usize) -> f64 {
        assert!(t >= 1 && t < self.len, "edge marginals start at position 1");
        let l = self.num_labels;
        self.edge[((t - 1) * l + from) * l + to]
    }

    pub fn node_row(&self, t: usize) -> &[f64] {
        &self.node[t * self.num_labels..(t + 1) * self.num_labels]
    }

    /// Node marginals, row-major `T x L`.
    pub fn nodes(&self) -> &[f64] {
        &self.node
    }

    /// Edge marginals summed over all positions, row-major `L x L`.
    pub fn edge_totals(&self) -> Vec<f64> {
        let ll = self.num_labels * self.num_labels;
        let mut out = vec![0.0; ll];
        for slice in self.edge.chunks_exact(ll) {
            for (o, e) in out.iter_mut().zip(slice) {
                *o += e;
            }
        }
        out
    }
}

impl Lattice {
    pub fn new(
        len: usize,
        num_labels: usize,
        state: Vec<f64>,
        trans: Vec<f64>,
    ) -> Result<Self, ModelError> {
        if len == 0 || num_labels == 0 {
            return Err(ModelError::EmptyLattice);
        }
        if state.len() != len * num_labels || trans.len() != num_labels * num_labels {
            return Err(ModelError::LatticeShape);
        }
        if !state.iter().chain(&trans).all(|v| v.is_finite()) {
            return Err(ModelError::NonFiniteScore);
        }
        Ok(Self {
            len,
            num_labels,
            state,
            trans,
        })
    }

    pub fn zeros(len: usize, num_labels: usize) -> Result<Self, ModelError> {
        Self::new(
            len,
            num_labels,
            vec![0.0; len * num_labels],
            vec![0.0; num_labels * num_labels],
        )
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn state(&self, t: usize, y: usize) -> f64 {
        self.state[t * self.num_labels + y]
    }

    pub fn trans(&self, from: usize, to: usize) -> f64 {
        self.trans[from * self.num_labels + to]
    }

    fn state_row(&self, t: usize) -> &[f64] {
        &self.state[t * self.num_labels..(t + 1) * self.num_labels]
    }

    /// Unnormalized score of a labeling, summed left to right.
    pub fn path_score(&self, labels: &[usize]) -> f64 {
        debug_assert_eq!(labels.len(), self.len);
        let mut score = self.state(0, labels[0]);
        for t in 1..self.len {
            score += self.trans(labels[t - 1], labels[t]) + self.state(t, labels[t]);
        }
        score
    }

    /// Forward log-scores `alpha[t][y]`, row-major.
    fn forward(&self) -> Vec<f64> {
        let l = self.num_labels;
        let mut alpha = vec![0.0; self.len * l];
        alpha[..l].copy_from_slice(self.state_row(0));
        let mut buf = vec![0.0; l];
        for t in 1..self.len {
            for y in 0..l {
                for (prev, b) in buf.iter_mut().enumerate() {
                    *b = alpha[(t - 1) * l + prev] + self.trans(prev, y);
                }
                alpha[t * l + y] = log_sum_exp(&buf) + self.state(t, y);
            }
        }
        alpha
    }

    /// Backward log-scores `beta[t][y]` (excluding the state score at `t`).
    fn backward(&self) -> Vec<f64> {
        let l = self.num_labels;
        let mut beta = vec![0.0; self.len * l];
        let mut buf = vec![0.0; l];
        for t in (0..self.len - 1).rev() {
            for y in 0..l {
                for (next, b) in buf.iter_mut().enumerate() {
                    *b = self.trans(y, next) + self.state(t + 1, next) + beta[(t + 1) * l + next];
                }
                beta[t * l + y] = log_sum_exp(&buf);
            }
        }
        beta
    }

    /// `log Z(x)` by the forward recursion.
    pub fn log_partition(&self) -> f64 {
        let alpha = self.forward();
        let l = self.num_labels;
        log_sum_exp(&alpha[(self.len - 1) * l..])
    }

    /// Forward-backward posterior marginals.
    pub fn marginals(&self) -> Marginals {
        let l = self.num_labels;
        let alpha = self.forward();
        let beta = self.backward();
        let log_z = log_sum_exp(&alpha[(self.len - 1) * l..]);

        let node = alpha
            .iter()
            .zip(&beta)
            .map(|(a, b)| (a + b - log_z).exp())
            .collect();

        let mut edge = vec![0.0; (self.len - 1) * l * l];
        for t in 1..self.len {
            for from in 0..l {
                let a = alpha[(t - 1) * l + from];
                for to in 0..l {
                    let s = a + self.trans(from, to) + self.state(t, to) + beta[t * l + to];
                    edge[((t - 1) * l + from) * l + to] = (s - log_z).exp();
                }
            }
        }

        Marginals {
            len: self.len,
            num_labels: l,
            log_z,
            node,
            edge,
        }
    }

    /// Best labeling and its score.
    ///
    /// Among equally scoring labelings the lexicographically least index
    /// sequence wins: best suffix scores are computed right to left, then the
    /// path is read left to right taking the lowest label index that attains
    /// the maximum at every step. The returned score is the path score of
    /// the returned labeling.
    pub fn viterbi(&self) -> (Vec<usize>, f64) {
        let l = self.num_labels;
        // suffix[t][y]: best score of positions t.. given y_t = y
        let mut suffix = vec![0.0; self.len * l];
        let last = self.len - 1;
        suffix[last * l..].copy_from_slice(self.state_row(last));
        for t in (0..last).rev() {
            for y in 0..l {
                let best = (0..l)
                    .map(|next| self.trans(y, next) + suffix[(t + 1) * l + next])
                    .fold(f64::NEG_INFINITY, f64::max);
                suffix[t * l + y] = self.state(t, y) + best;
            }
        }

        let argmax_first = |scores: &mut dyn Iterator<Item = f64>| -> usize {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for (i, s) in scores.enumerate() {
                if s > best {
                    best = s;
                    arg = i;
                }
            }
            arg
        };

        let mut labels = Vec::with_capacity(self.len);
        labels.push(argmax_first(&mut suffix[..l].iter().copied()));
        for t in 1..self.len {
            let prev = labels[t - 1];
            let next = argmax_first(&mut (0..l).map(|y| self.trans(prev, y) + suffix[t * l + y]));
            labels.push(next);
        }
        let score = self.path_score(&labels);
        (labels, score)
    }
}
