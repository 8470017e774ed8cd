//! Optimal coefficients for fixed directions and offsets.
//!
//! With the directions and offsets frozen, the best coefficients of a
//! linear/ridge expansion solve a symmetric positive-semidefinite block
//! system built from discrete inner products:
//!
//! ```text
//! [ A  B ] [ alpha ]   [ f ]      A = (phi_i, phi_i')     f = (u, phi_i)
//! [ B' C ] [   c   ] = [ g ]      C = (ridge_j, ridge_j') g = (u, ridge_j)
//! ```
//!
//! The system may be singular by design (identical profiles, dependent
//! bases), so it is solved by symmetric eigendecomposition with a relative
//! cutoff, returning the minimum-norm solution. Eliminating the
//! coefficients this way turns the fit into a reduced cost function of the
//! directions and offsets alone; [`ReducedCostEvaluator`] evaluates that
//! reduced cost from a particle through the component maps, caching
//! everything that does not depend on the particle.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expansion::{Expansion, LinearBasis};
use crate::particle_grid::CostFunction;
use crate::pmap::{total_input_dim, ParticleMap};
use crate::profile::{Profile, ProfileKind, ProfileSet};
use crate::quadrature::{sample, SampledFunction, TensorGrid};

/// Relative eigenvalue cutoff for the minimum-norm solve.
pub const EIGEN_CUTOFF_REL: f64 = 1e-12;

/// The assembled block system of discrete inner products.
#[derive(Debug, Clone)]
pub struct GramSystem {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub f: DVector<f64>,
    pub g: DVector<f64>,
    /// `||u||^2`, needed for the algebraic residual of the solve.
    pub target_norm_sq: f64,
}

impl GramSystem {
    /// The full `(N+M) x (N+M)` block matrix `[A B; B' C]`.
    pub fn block_matrix(&self) -> DMatrix<f64> {
        let (n, m) = (self.f.len(), self.g.len());
        let mut gm = DMatrix::zeros(n + m, n + m);
        gm.view_mut((0, 0), (n, n)).copy_from(&self.a);
        gm.view_mut((0, n), (n, m)).copy_from(&self.b);
        gm.view_mut((n, 0), (m, n)).copy_from(&self.b.transpose());
        gm.view_mut((n, n), (m, m)).copy_from(&self.c);
        gm
    }

    pub fn rhs(&self) -> DVector<f64> {
        let mut h = DVector::zeros(self.f.len() + self.g.len());
        h.rows_mut(0, self.f.len()).copy_from(&self.f);
        h.rows_mut(self.f.len(), self.g.len()).copy_from(&self.g);
        h
    }
}

/// Minimum-norm coefficients and the algebraic residual of the solve.
#[derive(Debug, Clone)]
pub struct CoefficientSolution {
    pub alpha: Vec<f64>,
    pub ridge_coeffs: Vec<f64>,
    /// `max(0, ||u||^2 - h . xi)`; cancellation-limited near zero.
    pub residual_cost: f64,
    /// True when the block system is singular beyond the relative cutoff.
    pub rank_deficient: bool,
}

/// Samples a single ridge term `v(a . x + b)` on the grid.
pub fn sample_ridge(
    profile: &Profile,
    direction: &[f64],
    offset: f64,
    grid: &Arc<TensorGrid>,
) -> Result<SampledFunction> {
    if direction.len() != grid.dim() {
        return Err(Error::Usage(format!(
            "direction dimension {} does not match grid dimension {}",
            direction.len(),
            grid.dim()
        )));
    }
    sample(
        |x| {
            let mut xi = offset;
            for (ai, xv) in direction.iter().zip(x) {
                xi += ai * xv;
            }
            profile.eval(xi)
        },
        grid,
    )
}

/// Assembles the Gram system for the given directions and offsets.
///
/// `A` and `C` are symmetric by construction: the upper triangle is
/// computed and mirrored.
pub fn assemble(
    u: &SampledFunction,
    basis: &LinearBasis,
    profiles: &ProfileSet,
    directions: &[Vec<f64>],
    offsets: &[f64],
    grid: &Arc<TensorGrid>,
) -> Result<GramSystem> {
    if u.grid().as_ref() != grid.as_ref() {
        return Err(Error::Usage("target is sampled on a different grid".into()));
    }
    let m = profiles.len();
    if directions.len() != m || offsets.len() != m {
        return Err(Error::Usage(format!(
            "got {} directions and {} offsets for {m} profiles",
            directions.len(),
            offsets.len()
        )));
    }
    let n = basis.len();
    let phi = basis.sample_all(grid)?;
    let ridges = (0..m)
        .map(|j| sample_ridge(profiles.get(j), &directions[j], offsets[j], grid))
        .collect::<Result<Vec<_>>>()?;

    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for i2 in i..n {
            let v = phi[i].inner_product(&phi[i2])?;
            a[(i, i2)] = v;
            a[(i2, i)] = v;
        }
    }
    let mut c = DMatrix::zeros(m, m);
    for j in 0..m {
        for j2 in j..m {
            let v = ridges[j].inner_product(&ridges[j2])?;
            c[(j, j2)] = v;
            c[(j2, j)] = v;
        }
    }
    let mut b = DMatrix::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            b[(i, j)] = phi[i].inner_product(&ridges[j])?;
        }
    }
    let mut f = DVector::zeros(n);
    for i in 0..n {
        f[i] = u.inner_product(&phi[i])?;
    }
    let mut g = DVector::zeros(m);
    for j in 0..m {
        g[j] = u.inner_product(&ridges[j])?;
    }
    Ok(GramSystem { a, b, c, f, g, target_norm_sq: u.norm().powi(2) })
}

/// Minimum-norm least-squares solution of `gram * xi = rhs` for a
/// symmetric PSD `gram`, with eigenvalues below
/// `EIGEN_CUTOFF_REL * lambda_max` treated as null directions.
fn min_norm_solve(gram: DMatrix<f64>, rhs: &DVector<f64>) -> Result<(DVector<f64>, bool)> {
    let n = gram.nrows();
    if n == 0 {
        return Ok((DVector::zeros(0), false));
    }
    if gram.iter().any(|v| !v.is_finite()) || rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite entries in the coefficient system".into()));
    }
    let eig = gram.symmetric_eigen();
    let lam_max = eig.eigenvalues.iter().fold(0.0f64, |acc, &l| acc.max(l.abs()));
    let cutoff = EIGEN_CUTOFF_REL * lam_max;
    let mut xi = DVector::zeros(n);
    let mut kept = 0usize;
    if lam_max > 0.0 {
        for (i, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > cutoff {
                let q = eig.eigenvectors.column(i);
                let coef = q.dot(rhs) / lam;
                xi.axpy(coef, &q, 1.0);
                kept += 1;
            }
        }
    }
    Ok((xi, kept < n))
}

/// Solves the assembled system for the optimal coefficients.
pub fn solve(sys: &GramSystem) -> Result<CoefficientSolution> {
    let (n, m) = (sys.f.len(), sys.g.len());
    let rhs = sys.rhs();
    let (xi, rank_deficient) = min_norm_solve(sys.block_matrix(), &rhs)?;
    let fitted = rhs.dot(&xi);
    Ok(CoefficientSolution {
        alpha: xi.as_slice()[..n].to_vec(),
        ridge_coeffs: xi.as_slice()[n..n + m].to_vec(),
        residual_cost: (sys.target_norm_sq - fitted).max(0.0),
        rank_deficient,
    })
}

/// Reduced cost at fixed directions and offsets: assemble, solve, then
/// evaluate the cost of the resulting expansion on the grid.
pub fn reduced_cost(
    u: &SampledFunction,
    basis: &Arc<LinearBasis>,
    profiles: &Arc<ProfileSet>,
    directions: &[Vec<f64>],
    offsets: &[f64],
    grid: &Arc<TensorGrid>,
) -> Result<f64> {
    let sys = assemble(u, basis, profiles, directions, offsets, grid)?;
    let sol = solve(&sys)?;
    let e = Expansion::new(
        sol.alpha,
        directions.to_vec(),
        offsets.to_vec(),
        sol.ridge_coeffs,
        basis.clone(),
        profiles.clone(),
    )?;
    crate::expansion::cost(u, &e)
}

/// The full fit at one particle: mapped directions/offsets, coefficients
/// and the node-wise cost.
#[derive(Debug, Clone)]
pub struct ParticleFit {
    pub directions: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
    pub solution: CoefficientSolution,
    /// Node-wise cost `||u - u_delta||^2`; this is the value the
    /// optimizer sees.
    pub cost: f64,
}

/// Reduced-cost evaluator bound to one `(target, basis, profiles, maps)`
/// tuple.
///
/// Basis samples, the `A` block and `f` are computed once and shared by
/// every evaluation; only `B`, `C` and `g` depend on the particle. Ridge
/// sampling picks an algebraically equivalent fast path when the profile
/// structure allows one (separable sine/cosine recombination, threshold
/// sums for step profiles); every path agrees with the plain
/// assemble-solve-cost route up to floating-point reassociation.
pub struct ReducedCostEvaluator {
    grid: Arc<TensorGrid>,
    u: SampledFunction,
    basis: Arc<LinearBasis>,
    profiles: Arc<ProfileSet>,
    maps: Vec<ParticleMap>,
    particle_dim: usize,
    u_norm_sq: f64,
    uw: Vec<f64>,
    phi: Vec<Vec<f64>>,
    phiw: Vec<Vec<f64>>,
    a_mat: DMatrix<f64>,
    f_vec: DVector<f64>,
    indicator: Option<IndicatorTables>,
}

/// Suffix tables for the step－profile path (`d == 2`, `N == 0`, all
/// profiles Heaviside): the ridge value per grid column is a suffix
/// indicator over the last axis, so inner products reduce to table
/// lookups at per-column threshold rows.
struct IndicatorTables {
    /// `sum_{r' >= r} w1[r']`, length `n1 + 1`.
    suf_w: Vec<f64>,
    /// Per column `c`: `sum_{r' >= r} w1[r'] * u[c, r']`, layout
    /// `[c * (n1 + 1) + r]`.
    suf_wu: Vec<f64>,
}

/// Per-thread scratch for [`ReducedCostEvaluator`].
pub struct EvalScratch {
    dirs: Vec<f64>,
    offs: Vec<f64>,
    ridge: Vec<f64>,
    resid: Vec<f64>,
    axis_sin: Vec<Vec<f64>>,
    axis_cos: Vec<Vec<f64>>,
    comb: [Vec<f64>; 4],
    thresholds: Vec<usize>,
    seg: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
struct EvalOut {
    cost: f64,
    alpha: Vec<f64>,
    ridge_coeffs: Vec<f64>,
    rank_deficient: bool,
    algebraic_residual: f64,
}

impl ReducedCostEvaluator {
    pub fn new(
        u: SampledFunction,
        basis: Arc<LinearBasis>,
        profiles: Arc<ProfileSet>,
        maps: Vec<ParticleMap>,
    ) -> Result<Self> {
        if maps.len() != profiles.len() {
            return Err(Error::Usage(format!(
                "{} maps for {} profiles",
                maps.len(),
                profiles.len()
            )));
        }
        let grid = u.grid().clone();
        for (j, m) in maps.iter().enumerate() {
            if m.space_dim() != grid.dim() {
                return Err(Error::Usage(format!(
                    "map {j} produces directions in R^{}, grid lives in R^{}",
                    m.space_dim(),
                    grid.dim()
                )));
            }
        }
        let particle_dim = total_input_dim(&maps);
        let w = grid.weights();
        let uw: Vec<f64> = w.iter().zip(u.values()).map(|(wi, ui)| wi * ui).collect();
        let u_norm_sq = u.values().iter().zip(w).map(|(ui, wi)| wi * ui * ui).sum();

        let phi_samples = basis.sample_all(&grid)?;
        let phi: Vec<Vec<f64>> = phi_samples.iter().map(|s| s.values().to_vec()).collect();
        let phiw: Vec<Vec<f64>> = phi
            .iter()
            .map(|p| p.iter().zip(w).map(|(pi, wi)| pi * wi).collect())
            .collect();
        let n = basis.len();
        let mut a_mat = DMatrix::zeros(n, n);
        for i in 0..n {
            for i2 in i..n {
                let v = dot(&phiw[i], &phi[i2]);
                a_mat[(i, i2)] = v;
                a_mat[(i2, i)] = v;
            }
        }
        let mut f_vec = DVector::zeros(n);
        for i in 0..n {
            f_vec[i] = dot(&uw, &phi[i]);
        }

        let indicator = if n == 0
            && grid.dim() == 2
            && !profiles.is_empty()
            && profiles
                .profiles()
                .iter()
                .all(|p| *p.kind() == ProfileKind::Heaviside)
        {
            Some(IndicatorTables::build(&u))
        } else {
            None
        };

        Ok(Self {
            grid,
            u,
            basis,
            profiles,
            maps,
            particle_dim,
            u_norm_sq,
            uw,
            phi,
            phiw,
            a_mat,
            f_vec,
            indicator,
        })
    }

    /// Optimization dimension `P = sum_j D_j`.
    pub fn particle_dim(&self) -> usize {
        self.particle_dim
    }

    pub fn grid(&self) -> &Arc<TensorGrid> {
        &self.grid
    }

    pub fn target(&self) -> &SampledFunction {
        &self.u
    }

    pub fn basis(&self) -> &Arc<LinearBasis> {
        &self.basis
    }

    pub fn profiles(&self) -> &Arc<ProfileSet> {
        &self.profiles
    }

    pub fn maps(&self) -> &[ParticleMap] {
        &self.maps
    }

    pub fn target_norm_sq(&self) -> f64 {
        self.u_norm_sq
    }

    pub fn make_scratch(&self) -> EvalScratch {
        let d = self.grid.dim();
        let m = self.profiles.len();
        let n_nodes = self.grid.len();
        let n_last = *self.grid.points_per_axis().last().unwrap();
        let comb_len = n_nodes / n_last;
        EvalScratch {
            dirs: vec![0.0; m * d],
            offs: vec![0.0; m],
            ridge: vec![0.0; m * n_nodes],
            resid: vec![0.0; n_nodes],
            axis_sin: self.grid.points_per_axis().iter().map(|&n| vec![0.0; n]).collect(),
            axis_cos: self.grid.points_per_axis().iter().map(|&n| vec![0.0; n]).collect(),
            comb: [
                vec![0.0; comb_len],
                vec![0.0; comb_len],
                vec![0.0; comb_len],
                vec![0.0; comb_len],
            ],
            thresholds: vec![0; m * self.grid.points_per_axis()[0]],
            seg: vec![(0, 0.0); m],
        }
    }

    /// Reduced cost at particle `p`.
    pub fn cost(&self, p: &[f64], scratch: &mut EvalScratch) -> Result<f64> {
        self.eval(p, scratch).map(|o| o.cost)
    }

    /// Full fit at particle `p`: mapped directions, coefficients, cost.
    pub fn fit_at(&self, p: &[f64]) -> Result<ParticleFit> {
        let mut scratch = self.make_scratch();
        let out = self.eval(p, &mut scratch)?;
        let (directions, offsets) = crate::pmap::map_all(&self.maps, p)?;
        Ok(ParticleFit {
            directions,
            offsets,
            solution: CoefficientSolution {
                alpha: out.alpha,
                ridge_coeffs: out.ridge_coeffs,
                residual_cost: out.algebraic_residual,
                rank_deficient: out.rank_deficient,
            },
            cost: out.cost,
        })
    }

    /// Builds the expansion fitted at particle `p`.
    pub fn expansion_at(&self, p: &[f64]) -> Result<(Expansion, ParticleFit)> {
        let fit = self.fit_at(p)?;
        let e = Expansion::new(
            fit.solution.alpha.clone(),
            fit.directions.clone(),
            fit.offsets.clone(),
            fit.solution.ridge_coeffs.clone(),
            self.basis.clone(),
            self.profiles.clone(),
        )?;
        Ok((e, fit))
    }

    fn map_particle(&self, p: &[f64], s: &mut EvalScratch) -> Result<()> {
        if p.len() != self.particle_dim {
            return Err(Error::Usage(format!(
                "particle has {} components, expected {}",
                p.len(),
                self.particle_dim
            )));
        }
        let d = self.grid.dim();
        let mut at = 0;
        for (j, m) in self.maps.iter().enumerate() {
            let block = &p[at..at + m.input_dim()];
            at += m.input_dim();
            s.offs[j] = m.map_into(block, &mut s.dirs[j * d..(j + 1) * d])?;
        }
        Ok(())
    }

    fn eval(&self, p: &[f64], s: &mut EvalScratch) -> Result<EvalOut> {
        self.map_particle(p, s)?;
        if self.indicator.is_some() {
            let d = self.grid.dim();
            let monotone = (0..self.profiles.len()).all(|j| s.dirs[j * d + d - 1] > 0.0);
            if monotone {
                return self.eval_indicator(s);
            }
        }
        self.eval_dense(s)
    }

    fn eval_dense(&self, s: &mut EvalScratch) -> Result<EvalOut> {
        let d = self.grid.dim();
        let n = self.basis.len();
        let m = self.profiles.len();
        let nodes = self.grid.len();

        for j in 0..m {
            let a = &s.dirs[j * d..(j + 1) * d];
            let b = s.offs[j];
            // split the borrows: ridge row j vs trig scratch
            let (ridge, axis_sin, axis_cos, comb) =
                (&mut s.ridge, &mut s.axis_sin, &mut s.axis_cos, &mut s.comb);
            let row = &mut ridge[j * nodes..(j + 1) * nodes];
            match self.profiles.get(j).kind() {
                ProfileKind::Sin { freq } if d >= 2 => {
                    fill_trig_row(true, *freq, a, b, &self.grid, row, axis_sin, axis_cos, comb)
                }
                ProfileKind::Cos { freq } if d >= 2 => {
                    fill_trig_row(false, *freq, a, b, &self.grid, row, axis_sin, axis_cos, comb)
                }
                _ => fill_generic_row(self.profiles.get(j), a, b, &self.grid, row),
            }
        }

        // Gram blocks: cached A, fresh B, C, g.
        let w = self.grid.weights();
        let mut gram = DMatrix::zeros(n + m, n + m);
        gram.view_mut((0, 0), (n, n)).copy_from(&self.a_mat);
        let mut rhs = DVector::zeros(n + m);
        rhs.rows_mut(0, n).copy_from(&self.f_vec);
        for j in 0..m {
            let rj = &s.ridge[j * nodes..(j + 1) * nodes];
            for i in 0..n {
                let v = dot(&self.phiw[i], rj);
                gram[(i, n + j)] = v;
                gram[(n + j, i)] = v;
            }
            for j2 in j..m {
                let r2 = &s.ridge[j2 * nodes..(j2 + 1) * nodes];
                let v = dot3(w, rj, r2);
                gram[(n + j, n + j2)] = v;
                gram[(n + j2, n + j)] = v;
            }
            rhs[n + j] = dot(&self.uw, rj);
        }

        let (xi, rank_deficient) = min_norm_solve(gram, &rhs)?;

        // Node-wise residual in fixed order: target, minus linear part,
        // minus ridge terms.
        s.resid.copy_from_slice(self.u.values());
        for i in 0..n {
            axpy(-xi[i], &self.phi[i], &mut s.resid);
        }
        for j in 0..m {
            axpy(-xi[n + j], &s.ridge[j * nodes..(j + 1) * nodes], &mut s.resid);
        }
        let mut cost = 0.0;
        for k in 0..nodes {
            cost += w[k] * s.resid[k] * s.resid[k];
        }
        if !cost.is_finite() {
            return Err(Error::Numeric("reduced cost is non-finite".into()));
        }
        let fitted = rhs.dot(&xi);
        Ok(EvalOut {
            cost,
            alpha: xi.as_slice()[..n].to_vec(),
            ridge_coeffs: xi.as_slice()[n..n + m].to_vec(),
            rank_deficient,
            algebraic_residual: (self.u_norm_sq - fitted).max(0.0),
        })
    }

    /// Step-profile path: each ridge is a per-column suffix indicator over
    /// the last axis, so `C` and `g` come from threshold lookups and the
    /// cost from one node-wise sweep with a segment-constant model value.
    fn eval_indicator(&self, s: &mut EvalScratch) -> Result<EvalOut> {
        let tabs = self.indicator.as_ref().unwrap();
        let m = self.profiles.len();
        let n0 = self.grid.points_per_axis()[0];
        let n1 = self.grid.points_per_axis()[1];
        let x0 = self.grid.axis_nodes(0);
        let x1 = self.grid.axis_nodes(1);
        let w0 = self.grid.axis_weights(0);
        let lo1 = x1[0];
        let h1 = x1[1] - x1[0];

        // Threshold rows: smallest r with (b + a0 x0[c]) + a1 x1[r] >= 0.
        for j in 0..m {
            let a0 = s.dirs[2 * j];
            let a1 = s.dirs[2 * j + 1];
            let b = s.offs[j];
            for c in 0..n0 {
                let base = b + a0 * x0[c];
                // float guess, then an exact local fixup
                let guess = ((-base / a1 - lo1) / h1).ceil();
                let mut t = if guess.is_finite() {
                    guess.max(0.0).min(n1 as f64) as usize
                } else {
                    0
                };
                while t > 0 && base + a1 * x1[t - 1] >= 0.0 {
                    t -= 1;
                }
                while t < n1 && base + a1 * x1[t] < 0.0 {
                    t += 1;
                }
                s.thresholds[j * n0 + c] = t;
            }
        }

        // C and g from suffix tables.
        let stride = n1 + 1;
        let mut gram = DMatrix::zeros(m, m);
        let mut rhs = DVector::zeros(m);
        for j in 0..m {
            let tj = &s.thresholds[j * n0..(j + 1) * n0];
            let mut gj = 0.0;
            for c in 0..n0 {
                gj += w0[c] * tabs.suf_wu[c * stride + tj[c]];
            }
            rhs[j] = gj;
            for j2 in j..m {
                let t2 = &s.thresholds[j2 * n0..(j2 + 1) * n0];
                let mut cjj = 0.0;
                for c in 0..n0 {
                    cjj += w0[c] * tabs.suf_w[tj[c].max(t2[c])];
                }
                gram[(j, j2)] = cjj;
                gram[(j2, j)] = cjj;
            }
        }

        let (xi, rank_deficient) = min_norm_solve(gram, &rhs)?;

        // Node-wise cost; within a column the model is constant between
        // thresholds, so one sweep with a running coefficient sum suffices.
        let w1 = self.grid.axis_weights(1);
        let uv = self.u.values();
        let mut cost = 0.0;
        for c in 0..n0 {
            for j in 0..m {
                s.seg[j] = (s.thresholds[j * n0 + c], xi[j]);
            }
            s.seg.sort_unstable_by_key(|e| e.0);
            let col = &uv[c * n1..(c + 1) * n1];
            let mut acc = 0.0;
            let mut model = 0.0;
            let mut next = 0usize;
            for (r, (&u, &wr)) in col.iter().zip(w1).enumerate() {
                while next < m && s.seg[next].0 == r {
                    model += s.seg[next].1;
                    next += 1;
                }
                let res = u - model;
                acc += wr * res * res;
            }
            cost += w0[c] * acc;
        }
        if !cost.is_finite() {
            return Err(Error::Numeric("reduced cost is non-finite".into()));
        }
        let fitted = rhs.dot(&xi);
        Ok(EvalOut {
            cost,
            alpha: Vec::new(),
            ridge_coeffs: xi.as_slice().to_vec(),
            rank_deficient,
            algebraic_residual: (self.u_norm_sq - fitted).max(0.0),
        })
    }
}

impl IndicatorTables {
    fn build(u: &SampledFunction) -> Self {
        let grid = u.grid();
        let n0 = grid.points_per_axis()[0];
        let n1 = grid.points_per_axis()[1];
        let w1 = grid.axis_weights(1);
        let mut suf_w = vec![0.0; n1 + 1];
        for r in (0..n1).rev() {
            suf_w[r] = suf_w[r + 1] + w1[r];
        }
        let mut suf_wu = vec![0.0; n0 * (n1 + 1)];
        let uv = u.values();
        for c in 0..n0 {
            let col = &uv[c * n1..(c + 1) * n1];
            let out = &mut suf_wu[c * (n1 + 1)..(c + 1) * (n1 + 1)];
            for r in (0..n1).rev() {
                out[r] = out[r + 1] + w1[r] * col[r];
            }
        }
        Self { suf_w, suf_wu }
    }
}

impl CostFunction for ReducedCostEvaluator {
    type Scratch = EvalScratch;

    fn make_scratch(&self) -> EvalScratch {
        ReducedCostEvaluator::make_scratch(self)
    }

    fn evaluate(&self, particle: &[f64], scratch: &mut EvalScratch) -> Result<f64> {
        self.cost(particle, scratch)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for k in 0..a.len() {
        acc += a[k] * b[k];
    }
    acc
}

#[inline]
fn dot3(w: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for k in 0..w.len() {
        acc += w[k] * a[k] * b[k];
    }
    acc
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for k in 0..y.len() {
        y[k] += alpha * x[k];
    }
}

/// Fills one ridge row for an arbitrary profile by direct evaluation.
fn fill_generic_row(
    profile: &Profile,
    a: &[f64],
    b: f64,
    grid: &TensorGrid,
    out: &mut [f64],
) {
    match grid.dim() {
        1 => {
            let x0 = grid.axis_nodes(0);
            for (o, &x) in out.iter_mut().zip(x0) {
                *o = profile.eval(b + a[0] * x);
            }
        }
        2 => {
            let x0 = grid.axis_nodes(0);
            let x1 = grid.axis_nodes(1);
            let n1 = x1.len();
            for (c, &xc) in x0.iter().enumerate() {
                let base = b + a[0] * xc;
                let row = &mut out[c * n1..(c + 1) * n1];
                for (o, &xr) in row.iter_mut().zip(x1) {
                    *o = profile.eval(base + a[1] * xr);
                }
            }
        }
        3 => {
            let x0 = grid.axis_nodes(0);
            let x1 = grid.axis_nodes(1);
            let x2 = grid.axis_nodes(2);
            let (n1, n2) = (x1.len(), x2.len());
            for (c0, &v0) in x0.iter().enumerate() {
                let b0 = b + a[0] * v0;
                for (c1, &v1) in x1.iter().enumerate() {
                    let b1 = b0 + a[1] * v1;
                    let row = &mut out[(c0 * n1 + c1) * n2..(c0 * n1 + c1 + 1) * n2];
                    for (o, &v2) in row.iter_mut().zip(x2) {
                        *o = profile.eval(b1 + a[2] * v2);
                    }
                }
            }
        }
        d => {
            let mut x = vec![0.0; d];
            for (k, o) in out.iter_mut().enumerate() {
                grid.node_into(k, &mut x);
                let mut xi = b;
                for (ai, xv) in a.iter().zip(&x) {
                    xi += ai * xv;
                }
                *o = profile.eval(xi);
            }
        }
    }
}

/// Fills one ridge row for `sin`/`cos` profiles via per-axis angle
/// recombination: the argument `freq (a . x + b)` splits across axes, so
/// only `sum_a n_a` transcendentals are needed instead of one per node.
#[allow(clippy::too_many_arguments)]
fn fill_trig_row(
    is_sin: bool,
    freq: f64,
    a: &[f64],
    b: f64,
    grid: &TensorGrid,
    out: &mut [f64],
    axis_sin: &mut [Vec<f64>],
    axis_cos: &mut [Vec<f64>],
    comb: &mut [Vec<f64>; 4],
) {
    let d = grid.dim();
    debug_assert!(d >= 2);
    for ax in 0..d {
        let nodes = grid.axis_nodes(ax);
        let (sv, cv) = (&mut axis_sin[ax], &mut axis_cos[ax]);
        for (i, &x) in nodes.iter().enumerate() {
            let ang = if ax == 0 { freq * (b + a[0] * x) } else { freq * (a[ax] * x) };
            let (s, c) = ang.sin_cos();
            sv[i] = s;
            cv[i] = c;
        }
    }

    // Fold axes 0..d-1 into combined (sin, cos) arrays, then write the
    // requested function against the last axis.
    let [cur_s, cur_c, next_s, next_c] = comb;
    let mut len = grid.points_per_axis()[0];
    cur_s[..len].copy_from_slice(&axis_sin[0]);
    cur_c[..len].copy_from_slice(&axis_cos[0]);
    for ax in 1..d - 1 {
        let n_ax = grid.points_per_axis()[ax];
        let (sa, ca) = (&axis_sin[ax], &axis_cos[ax]);
        for i in 0..len {
            let (si, ci) = (cur_s[i], cur_c[i]);
            let base = i * n_ax;
            for r in 0..n_ax {
                next_s[base + r] = si * ca[r] + ci * sa[r];
                next_c[base + r] = ci * ca[r] - si * sa[r];
            }
        }
        len *= n_ax;
        std::mem::swap(cur_s, next_s);
        std::mem::swap(cur_c, next_c);
    }
    let n_last = grid.points_per_axis()[d - 1];
    let (sl, cl) = (&axis_sin[d - 1], &axis_cos[d - 1]);
    for i in 0..len {
        let (si, ci) = (cur_s[i], cur_c[i]);
        let row = &mut out[i * n_last..(i + 1) * n_last];
        if is_sin {
            for (o, (&s, &c)) in row.iter_mut().zip(sl.iter().zip(cl)) {
                *o = si * c + ci * s;
            }
        } else {
            for (o, (&s, &c)) in row.iter_mut().zip(sl.iter().zip(cl)) {
                *o = ci * c - si * s;
            }
        }
    }
}
