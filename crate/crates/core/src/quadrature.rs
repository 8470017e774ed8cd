//! Box domains, tensor-product sampling grids and the discrete `L2`
//! inner product used by every cost evaluation.
//!
//! Grids are closed and equispaced per axis, with trapezoidal quadrature
//! weights (endpoint weights halved per axis). The resulting discrete
//! inner product is exact for piecewise-linear integrands whose
//! breakpoints fall on grid nodes, and its weights always sum to the
//! volume of the box.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Axis-aligned open box in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Config(
                "domain bounds must be non-empty and of equal length".into(),
            ));
        }
        for (i, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::Config(format!(
                    "axis {i}: invalid bounds [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Box `(lo_1, hi_1) x (lo_2, hi_2) x ...` from per-axis pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .product()
    }
}

/// Closed equispaced tensor grid over a [`Domain`] with trapezoidal
/// quadrature weights.
///
/// Nodes are stored per axis; the flat node index is row-major with the
/// last axis fastest.
#[derive(Debug, Clone)]
pub struct TensorGrid {
    domain: Domain,
    points_per_axis: Vec<usize>,
    axis_nodes: Vec<Vec<f64>>,
    axis_weights: Vec<Vec<f64>>,
    strides: Vec<usize>,
    weights: Vec<f64>,
    len: usize,
}

impl PartialEq for TensorGrid {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.points_per_axis == other.points_per_axis
    }
}

impl TensorGrid {
    /// Builds the grid; every axis needs at least two points.
    pub fn new(domain: Domain, points_per_axis: Vec<usize>) -> Result<Self> {
        if points_per_axis.len() != domain.dim() {
            return Err(Error::Config(format!(
                "expected {} axis counts, got {}",
                domain.dim(),
                points_per_axis.len()
            )));
        }
        if let Some((i, &n)) = points_per_axis.iter().enumerate().find(|(_, &n)| n < 2) {
            return Err(Error::Config(format!("axis {i}: need >= 2 points, got {n}")));
        }
        let mut len = 1usize;
        for &n in &points_per_axis {
            len = len
                .checked_mul(n)
                .ok_or_else(|| Error::Config("grid size overflows".into()))?;
        }

        let mut axis_nodes = Vec::with_capacity(domain.dim());
        let mut axis_weights = Vec::with_capacity(domain.dim());
        for a in 0..domain.dim() {
            let n = points_per_axis[a];
            let (lo, hi) = (domain.lower[a], domain.upper[a]);
            let h = (hi - lo) / (n - 1) as f64;
            let mut nodes: Vec<f64> = (0..n).map(|s| lo + s as f64 * h).collect();
            nodes[n - 1] = hi;
            let mut w = vec![h; n];
            w[0] = 0.5 * h;
            w[n - 1] = 0.5 * h;
            axis_nodes.push(nodes);
            axis_weights.push(w);
        }

        let mut strides = vec![1usize; domain.dim()];
        for a in (0..domain.dim().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * points_per_axis[a + 1];
        }

        // Flat tensor weights, last axis fastest.
        let mut weights = vec![1.0f64];
        for aw in &axis_weights {
            let mut next = Vec::with_capacity(weights.len() * aw.len());
            for &wo in &weights {
                for &wa in aw {
                    next.push(wo * wa);
                }
            }
            weights = next;
        }
        debug_assert_eq!(weights.len(), len);

        Ok(Self {
            domain,
            points_per_axis,
            axis_nodes,
            axis_weights,
            strides,
            weights,
            len,
        })
    }

    pub fn shared(domain: Domain, points_per_axis: Vec<usize>) -> Result<Arc<Self>> {
        Ok(Arc::new(Self::new(domain, points_per_axis)?))
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn points_per_axis(&self) -> &[usize] {
        &self.points_per_axis
    }

    pub fn axis_nodes(&self, axis: usize) -> &[f64] {
        &self.axis_nodes[axis]
    }

    pub fn axis_weights(&self, axis: usize) -> &[f64] {
        &self.axis_weights[axis]
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Flat tensor quadrature weights, one per node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Writes the coordinates of flat node `index` into `out`.
    pub fn node_into(&self, index: usize, out: &mut [f64]) {
        let mut rem = index;
        for a in 0..self.dim() {
            let idx = rem / self.strides[a];
            rem %= self.strides[a];
            out[a] = self.axis_nodes[a][idx];
        }
    }

    pub fn node(&self, index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.node_into(index, &mut out);
        out
    }
}

/// A scalar function realized by its values on a [`TensorGrid`].
#[derive(Debug, Clone)]
pub struct SampledFunction {
    grid: Arc<TensorGrid>,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Arc<TensorGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Usage(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Evaluation(format!(
                "non-finite value {} at node {k}",
                values[k]
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Arc<TensorGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::Usage("functions live on different grids".into()))
        }
    }

    /// Discrete inner product `sum_k w_k f_k g_k`.
    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        let w = self.grid.weights();
        let mut acc = 0.0;
        for k in 0..w.len() {
            acc += w[k] * self.values[k] * other.values[k];
        }
        Ok(acc)
    }

    /// Discrete `L2` norm, `sqrt((f, f))`.
    pub fn norm(&self) -> f64 {
        let w = self.grid.weights();
        let mut acc = 0.0;
        for k in 0..w.len() {
            acc += w[k] * self.values[k] * self.values[k];
        }
        acc.max(0.0).sqrt()
    }
}

/// Evaluates a scalar field at every grid node.
pub fn sample<F>(field: F, grid: &Arc<TensorGrid>) -> Result<SampledFunction>
where
    F: Fn(&[f64]) -> f64,
{
    let mut values = Vec::with_capacity(grid.len());
    let mut x = vec![0.0; grid.dim()];
    for k in 0..grid.len() {
        grid.node_into(k, &mut x);
        let v = field(&x);
        if !v.is_finite() {
            return Err(Error::Evaluation(format!(
                "field produced non-finite value {v} at node {x:?}"
            )));
        }
        values.push(v);
    }
    Ok(SampledFunction { grid: grid.clone(), values })
}
