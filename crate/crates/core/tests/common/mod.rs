//! Brute-force oracles shared by the integration tests.
//!
//! Everything here enumerates all `L^T` label sequences directly from the raw
//! score arrays and never calls into the dynamic programs under test.

#![allow(dead_code)]

use mixtag::Lattice;
use rand::Rng;

/// Row-major score arrays: `state[t * l + y]`, `trans[from * l + to]`.
#[derive(Debug, Clone)]
pub struct RawLattice {
    pub len: usize,
    pub labels: usize,
    pub state: Vec<f64>,
    pub trans: Vec<f64>,
}

impl RawLattice {
    pub fn random<R: Rng>(rng: &mut R, len: usize, labels: usize, scale: f64) -> Self {
        let state = (0..len * labels)
            .map(|_| rng.gen_range(-scale..scale))
            .collect();
        let trans = (0..labels * labels)
            .map(|_| rng.gen_range(-scale..scale))
            .collect();
        Self {
            len,
            labels,
            state,
            trans,
        }
    }

    /// Small integer scores, so that many sequences tie exactly.
    pub fn random_integer<R: Rng>(rng: &mut R, len: usize, labels: usize) -> Self {
        let state = (0..len * labels)
            .map(|_| rng.gen_range(0..2) as f64)
            .collect();
        let trans = (0..labels * labels)
            .map(|_| rng.gen_range(0..2) as f64)
            .collect();
        Self {
            len,
            labels,
            state,
            trans,
        }
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(
            self.len,
            self.labels,
            self.state.clone(),
            self.trans.clone(),
        )
        .unwrap()
    }

    pub fn score(&self, ys: &[usize]) -> f64 {
        let mut s = 0.0;
        for (t, &y) in ys.iter().enumerate() {
            s += self.state[t * self.labels + y];
            if t > 0 {
                s += self.trans[ys[t - 1] * self.labels + y];
            }
        }
        s
    }

    /// Every label sequence, in lexicographic order.
    pub fn sequences(&self) -> Vec<Vec<usize>> {
        let total = self.labels.pow(self.len as u32);
        (0..total)
            .map(|mut k| {
                let mut ys = vec![0; self.len];
                for t in (0..self.len).rev() {
                    ys[t] = k % self.labels;
                    k /= self.labels;
                }
                ys
            })
            .collect()
    }

    pub fn log_z(&self) -> f64 {
        let scores: Vec<f64> = self.sequences().iter().map(|ys| self.score(ys)).collect();
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln()
    }

    /// Highest-scoring sequence; the first one found in lexicographic order
    /// wins ties.
    pub fn best(&self) -> (Vec<usize>, f64) {
        let mut best = (Vec::new(), f64::NEG_INFINITY);
        for ys in self.sequences() {
            let s = self.score(&ys);
            if s > best.1 {
                best = (ys, s);
            }
        }
        best
    }

    /// Node marginals `[t * l + y]` and edge marginals `[(t * l + from) * l + to]`.
    pub fn marginals(&self) -> (Vec<f64>, Vec<f64>) {
        let (t_len, l) = (self.len, self.labels);
        let log_z = self.log_z();
        let mut node = vec![0.0; t_len * l];
        let mut edge = vec![0.0; t_len * l * l];
        for ys in self.sequences() {
            let p = (self.score(&ys) - log_z).exp();
            for t in 0..t_len {
                node[t * l + ys[t]] += p;
                if t > 0 {
                    edge[(t * l + ys[t - 1]) * l + ys[t]] += p;
                }
            }
        }
        (node, edge)
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
