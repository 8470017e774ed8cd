//! Linear bases, ridge terms, the full expansion `u_delta` and its
//! fitting cost.
//!
//! An expansion is `sum_i alpha_i phi_i(x) + sum_j c_j v_j(a_j^T x + b_j)`:
//! a linear combination of fixed basis fields plus ridge terms. Evaluation
//! order is fixed (linear part first, ridge terms in index order) so runs
//! are bit-reproducible.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::profile::ProfileSet;
use crate::quadrature::{sample, SampledFunction, TensorGrid};

/// Shared scalar field on `R^d`.
pub type Field = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Ordered list of basis fields; linear independence is not required.
#[derive(Clone, Default)]
pub struct LinearBasis {
    ids: Vec<String>,
    fields: Vec<Field>,
}

impl std::fmt::Debug for LinearBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearBasis").field("ids", &self.ids).finish()
    }
}

impl LinearBasis {
    pub fn new(ids: Vec<String>, fields: Vec<Field>) -> Result<Self> {
        if ids.len() != fields.len() {
            return Err(Error::Usage("basis ids and fields differ in length".into()));
        }
        Ok(Self { ids, fields })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn field(&self, i: usize) -> &Field {
        &self.fields[i]
    }

    /// Samples every basis field once on `grid`.
    pub fn sample_all(&self, grid: &Arc<TensorGrid>) -> Result<Vec<SampledFunction>> {
        self.fields.iter().map(|f| sample(|x| f(x), grid)).collect()
    }
}

/// The full coefficient tuple of a linear/ridge expansion together with
/// references to its basis and profile set.
#[derive(Debug, Clone)]
pub struct Expansion {
    alpha: Vec<f64>,
    directions: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    ridge_coeffs: Vec<f64>,
    basis: Arc<LinearBasis>,
    profiles: Arc<ProfileSet>,
}

impl Expansion {
    pub fn new(
        alpha: Vec<f64>,
        directions: Vec<Vec<f64>>,
        offsets: Vec<f64>,
        ridge_coeffs: Vec<f64>,
        basis: Arc<LinearBasis>,
        profiles: Arc<ProfileSet>,
    ) -> Result<Self> {
        if alpha.len() != basis.len() {
            return Err(Error::Usage(format!(
                "alpha has {} entries for a basis of {}",
                alpha.len(),
                basis.len()
            )));
        }
        let m = profiles.len();
        if directions.len() != m || offsets.len() != m || ridge_coeffs.len() != m {
            return Err(Error::Usage(format!(
                "ridge data lengths ({}, {}, {}) do not match {m} profiles",
                directions.len(),
                offsets.len(),
                ridge_coeffs.len()
            )));
        }
        if m > 0 {
            let d = directions[0].len();
            if d == 0 || directions.iter().any(|a| a.len() != d) {
                return Err(Error::Usage("directions must share a positive dimension".into()));
            }
        }
        Ok(Self { alpha, directions, offsets, ridge_coeffs, basis, profiles })
    }

    /// The empty expansion (`N = M = 0`), identically zero.
    pub fn zero() -> Self {
        Self {
            alpha: Vec::new(),
            directions: Vec::new(),
            offsets: Vec::new(),
            ridge_coeffs: Vec::new(),
            basis: Arc::new(LinearBasis::empty()),
            profiles: Arc::new(ProfileSet::empty()),
        }
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn ridge_coeffs(&self) -> &[f64] {
        &self.ridge_coeffs
    }

    pub fn basis(&self) -> &Arc<LinearBasis> {
        &self.basis
    }

    pub fn profiles(&self) -> &Arc<ProfileSet> {
        &self.profiles
    }

    /// Evaluates the expansion at every node of `grid`.
    pub fn evaluate(&self, grid: &Arc<TensorGrid>) -> Result<SampledFunction> {
        let d = grid.dim();
        if self.profiles.len() > 0 && self.directions[0].len() != d {
            return Err(Error::Usage(format!(
                "directions have dimension {}, grid has {d}",
                self.directions[0].len()
            )));
        }
        let mut values = vec![0.0; grid.len()];
        let mut x = vec![0.0; d];
        for (k, out) in values.iter_mut().enumerate() {
            grid.node_into(k, &mut x);
            let mut acc = 0.0;
            for (i, &a) in self.alpha.iter().enumerate() {
                acc += a * (self.basis.field(i))(&x);
            }
            for j in 0..self.profiles.len() {
                let mut xi = self.offsets[j];
                for (ai, xv) in self.directions[j].iter().zip(&x) {
                    xi += ai * xv;
                }
                let v = self.profiles.get(j).eval(xi);
                if !v.is_finite() {
                    return Err(Error::Evaluation(format!(
                        "profile '{}' returned {v} at xi = {xi}",
                        self.profiles.get(j).id()
                    )));
                }
                acc += self.ridge_coeffs[j] * v;
            }
            if !acc.is_finite() {
                return Err(Error::Evaluation(format!("expansion non-finite at node {k}")));
            }
            *out = acc;
        }
        SampledFunction::new(grid.clone(), values)
    }
}

/// Fitting cost `J_u = || u - u_delta ||^2` on the grid of `u`.
pub fn cost(u: &SampledFunction, e: &Expansion) -> Result<f64> {
    let ud = e.evaluate(u.grid())?;
    let w = u.grid().weights();
    let (uv, dv) = (u.values(), ud.values());
    let mut acc = 0.0;
    for k in 0..w.len() {
        let r = uv[k] - dv[k];
        acc += w[k] * r * r;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{by_name, by_name_scaled, Profile};
    use crate::quadrature::Domain;
    use std::f64::consts::PI;

    fn time_space_grid(n: usize) -> Arc<TensorGrid> {
        TensorGrid::shared(
            Domain::new(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap(),
            vec![n, n],
        )
        .unwrap()
    }

    fn ridge_only(
        profiles: Vec<Profile>,
        directions: Vec<Vec<f64>>,
        coeffs: Vec<f64>,
    ) -> Expansion {
        let m = profiles.len();
        Expansion::new(
            vec![],
            directions,
            vec![0.0; m],
            coeffs,
            Arc::new(LinearBasis::empty()),
            Arc::new(ProfileSet::new(profiles)),
        )
        .unwrap()
    }

    #[test]
    fn empty_expansion_is_zero() {
        let g = time_space_grid(9);
        let e = Expansion::zero();
        assert!(e.evaluate(&g).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_ridge_reproduces_transport_solution() {
        let mu = 0.7;
        let g = time_space_grid(33);
        let e = ridge_only(vec![by_name("sin").unwrap()], vec![vec![-mu, 1.0]], vec![1.0]);
        let ud = e.evaluate(&g).unwrap();
        let exact = sample(|x| (x[1] - mu * x[0]).sin(), &g).unwrap();
        for (a, b) in ud.values().iter().zip(exact.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn two_identical_profiles_build_the_standing_wave() {
        let mu = 1.3;
        let g = time_space_grid(33);
        let u0 = by_name("sin").unwrap();
        let e = ridge_only(
            vec![u0.clone(), u0],
            vec![vec![-mu, 1.0], vec![mu, 1.0]],
            vec![0.5, 0.5],
        );
        let ud = e.evaluate(&g).unwrap();
        let exact = sample(
            |x| 0.5 * ((x[1] - mu * x[0]).sin() + (x[1] + mu * x[0]).sin()),
            &g,
        )
        .unwrap();
        for (a, b) in ud.values().iter().zip(exact.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn cost_of_own_evaluation_is_zero() {
        let g = time_space_grid(17);
        let e = ridge_only(
            vec![by_name_scaled("cos", 10.0).unwrap()],
            vec![vec![1.0, 1.0 / 3.0]],
            vec![1.6],
        );
        let u = e.evaluate(&g).unwrap();
        assert_eq!(cost(&u, &e).unwrap(), 0.0);
    }

    #[test]
    fn cost_of_zero_expansion_is_squared_norm() {
        let g = time_space_grid(17);
        let u = sample(|_| 1.0, &g).unwrap();
        assert!((cost(&u, &Expansion::zero()).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn exactly_representable_cosine_pair_has_vanishing_cost() {
        // two cos(.) ridges at their true directions
        let g = TensorGrid::shared(
            Domain::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
            vec![65, 65],
        )
        .unwrap();
        let u = sample(|x| (x[0] + 2.0 * x[1]).cos() + (x[0] - 0.5 * x[1]).cos(), &g).unwrap();
        let e = ridge_only(
            vec![by_name("cos").unwrap(), by_name("cos").unwrap()],
            vec![vec![1.0, 2.0], vec![1.0, -0.5]],
            vec![1.0, 1.0],
        );
        assert!(cost(&u, &e).unwrap() <= 1e-20);
    }

    #[test]
    fn cost_matches_norm_squared_of_difference() {
        let g = time_space_grid(21);
        let u = sample(|x| (PI * x[0]).sin() + x[1], &g).unwrap();
        let e = ridge_only(vec![by_name("sin").unwrap()], vec![vec![0.4, 1.0]], vec![0.9]);
        let c = cost(&u, &e).unwrap();
        let ud = e.evaluate(&g).unwrap();
        let diff = SampledFunction::new(
            g.clone(),
            u.values().iter().zip(ud.values()).map(|(a, b)| a - b).collect(),
        )
        .unwrap();
        let n2 = diff.norm().powi(2);
        assert!((c - n2).abs() <= 1e-12 * c.abs().max(n2.abs()).max(1e-300));
    }

    #[test]
    fn permuting_ridge_terms_is_harmless() {
        let g = time_space_grid(21);
        let p1 = by_name_scaled("cos", 10.0).unwrap();
        let p2 = by_name("square").unwrap();
        let p3 = by_name("hockeystick").unwrap();
        let e = ridge_only(
            vec![p1.clone(), p2.clone(), p3.clone()],
            vec![vec![1.0, 0.3], vec![0.5, 1.0], vec![-0.2, 1.0]],
            vec![1.5, -0.7, 2.0],
        );
        let ep = ridge_only(
            vec![p3, p1, p2],
            vec![vec![-0.2, 1.0], vec![1.0, 0.3], vec![0.5, 1.0]],
            vec![2.0, 1.5, -0.7],
        );
        let a = e.evaluate(&g).unwrap();
        let b = ep.evaluate(&g).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            let scale = x.abs().max(y.abs()).max(1.0);
            assert!((x - y).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn profile_scaling_cancels_against_coefficient() {
        let g = time_space_grid(21);
        let s = 37.5;
        let base = by_name("morlet").unwrap();
        let scaled = Profile::new("morlet-scaled", {
            let f = base.clone();
            Arc::new(move |xi| s * f.eval(xi))
        });
        let e1 = ridge_only(vec![base], vec![vec![0.8, 1.0]], vec![2.0]);
        let e2 = ridge_only(vec![scaled], vec![vec![0.8, 1.0]], vec![2.0 / s]);
        let a = e1.evaluate(&g).unwrap();
        let b = e2.evaluate(&g).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            let scale = x.abs().max(y.abs()).max(1.0);
            assert!((x - y).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn dimension_mismatch_is_usage_error() {
        let g = time_space_grid(5);
        let e = ridge_only(vec![by_name("sin").unwrap()], vec![vec![1.0, 1.0, 1.0]], vec![1.0]);
        assert!(matches!(e.evaluate(&g), Err(Error::Usage(_))));
        assert!(Expansion::new(
            vec![1.0],
            vec![],
            vec![],
            vec![],
            Arc::new(LinearBasis::empty()),
            Arc::new(ProfileSet::empty()),
        )
        .is_err());
    }
}
