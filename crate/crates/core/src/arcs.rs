//! Prefix sums over cyclic node arcs and the O(N²) arc sweeps built on them.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::geometry::NodeArc;

/// Prefix sums over two laps of a cyclic sequence, so every arc of length ≤ n
/// is a single difference.
#[derive(Debug, Clone)]
pub struct CyclicPrefix {
    sums: Vec<f64>,
    n: usize,
}

impl CyclicPrefix {
    pub fn new(values: &[f64]) -> Self {
        let n = values.len();
        let mut sums = Vec::with_capacity(2 * n + 1);
        sums.push(0.0);
        let mut acc = 0.0;
        for i in 0..2 * n {
            acc += values[i % n];
            sums.push(acc);
        }
        Self { sums, n }
    }

    pub fn total(&self) -> f64 {
        self.sums[self.n]
    }

    /// Sum over nodes start, …, start+len−1 (cyclic), len ≤ n.
    pub fn sum(&self, start: usize, len: usize) -> f64 {
        let s = start % self.n;
        self.sums[s + len] - self.sums[s]
    }

    pub fn arc_sum(&self, arc: &NodeArc) -> f64 {
        if arc.is_full() {
            self.total()
        } else {
            self.sum(arc.start, arc.len)
        }
    }
}

/// For every node j, the maximum over all node arcs containing j of
/// Σ_arc num / Σ_arc den. Lengths are swept in parallel, each with a
/// monotone-deque sliding-window maximum.
pub fn sweep_max_ratio(num: &[f64], den: &[f64]) -> Vec<f64> {
    let n = num.len();
    assert_eq!(n, den.len());
    let pn = CyclicPrefix::new(num);
    let pd = CyclicPrefix::new(den);
    let full = pn.total() / pd.total();
    (1..n)
        .into_par_iter()
        .fold(
            || vec![full; n],
            |mut best, len| {
                let avg: Vec<f64> = (0..n).map(|s| pn.sum(s, len) / pd.sum(s, len)).collect();
                sliding_max_into(&avg, len, &mut best);
                best
            },
        )
        .reduce(
            || vec![full; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    if y > *x {
                        *x = y;
                    }
                }
                a
            },
        )
}

/// best[j] ← max(best[j], max_{s ∈ [j−len+1, j]} avg[s mod n]).
fn sliding_max_into(avg: &[f64], len: usize, best: &mut [f64]) {
    let n = avg.len();
    let mut dq: VecDeque<usize> = VecDeque::with_capacity(len + 1);
    for k in 0..2 * n {
        let v = avg[k % n];
        while let Some(&b) = dq.back() {
            if avg[b % n] <= v {
                dq.pop_back();
            } else {
                break;
            }
        }
        dq.push_back(k);
        while let Some(&f) = dq.front() {
            if f + len <= k {
                dq.pop_front();
            } else {
                break;
            }
        }
        if k >= n {
            let m = avg[dq[0] % n];
            let j = k - n;
            if m > best[j] {
                best[j] = m;
            }
        }
    }
}
