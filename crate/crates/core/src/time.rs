//! Uniform partition of the time interval into slabs, and the 1D Lagrange
//! bases used for everything polynomial in time.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Uniform subdivision of `[t0, t_end]` into `n_slabs` slabs. Slab `n`
/// (0-based) covers `[node(n), node(n+1)]`. Node times are always computed
/// through [`TimePartition::node`] so that adjacent slabs agree bitwise on
/// their shared boundary.
#[derive(Clone, Copy, Debug)]
pub struct TimePartition {
    pub t0: f64,
    pub t_end: f64,
    pub n_slabs: usize,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TimeError {
    EmptyInterval,
    SlabOutOfRange(usize),
}

impl fmt::Display for TimeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeError::EmptyInterval => write!(f, "empty time interval"),
            TimeError::SlabOutOfRange(n) => write!(f, "slab {n} out of range"),
        }
    }
}

impl TimePartition {
    pub fn new(t0: f64, t_end: f64, n_slabs: usize) -> Result<Self, TimeError> {
        if !(t_end > t0) || n_slabs == 0 {
            return Err(TimeError::EmptyInterval);
        }
        Ok(Self {
            t0,
            t_end,
            n_slabs,
            dt: (t_end - t0) / n_slabs as f64,
        })
    }

    /// Time of slab boundary `m`, `m = 0..=n_slabs`.
    #[inline]
    pub fn node(&self, m: usize) -> f64 {
        self.t0 + m as f64 * self.dt
    }

    /// Bounds of slab `n` (0-based).
    #[inline]
    pub fn slab(&self, n: usize) -> (f64, f64) {
        (self.node(n), self.node(n + 1))
    }

    /// Slab containing `t`; boundary times resolve to the earlier slab except
    /// at `t0`.
    pub fn slab_containing(&self, t: f64) -> Option<usize> {
        if t < self.t0 || t > self.node(self.n_slabs) {
            return None;
        }
        let raw = crate::math::floor((t - self.t0) / self.dt) as usize;
        let n = raw.min(self.n_slabs - 1);
        if n > 0 && t <= self.node(n) {
            Some(n - 1)
        } else {
            Some(n)
        }
    }
}

/// Lagrange basis on an arbitrary strictly increasing node set.
#[derive(Clone, Debug)]
pub struct Lagrange1d {
    pub nodes: Vec<f64>,
    /// Barycentric-style denominators Π_{m≠i}(τ_i − τ_m).
    denoms: Vec<f64>,
}

impl Lagrange1d {
    pub fn new(nodes: Vec<f64>) -> Self {
        let n = nodes.len();
        let mut denoms = vec![1.0; n];
        for i in 0..n {
            for m in 0..n {
                if m != i {
                    denoms[i] *= nodes[i] - nodes[m];
                }
            }
        }
        Self { nodes, denoms }
    }

    /// `order + 1` uniform nodes on `[a, b]`, endpoints included and taken
    /// verbatim so shared slab boundaries stay bitwise identical.
    pub fn uniform(a: f64, b: f64, order: usize) -> Self {
        assert!(order >= 1);
        let mut nodes = Vec::with_capacity(order + 1);
        for j in 0..=order {
            let t = if j == 0 {
                a
            } else if j == order {
                b
            } else {
                a + (b - a) * (j as f64 / order as f64)
            };
            nodes.push(t);
        }
        Self::new(nodes)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let n = self.nodes.len();
        for i in 0..n {
            let mut p = 1.0;
            for m in 0..n {
                if m != i {
                    p *= t - self.nodes[m];
                }
            }
            out[i] = p / self.denoms[i];
        }
    }

    pub fn eval_deriv_into(&self, t: f64, out: &mut [f64]) {
        let n = self.nodes.len();
        for i in 0..n {
            let mut s = 0.0;
            for m in 0..n {
                if m == i {
                    continue;
                }
                let mut p = 1.0;
                for l in 0..n {
                    if l != i && l != m {
                        p *= t - self.nodes[l];
                    }
                }
                s += p;
            }
            out[i] = s / self.denoms[i];
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(t, &mut out);
        out
    }
}
