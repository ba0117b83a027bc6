//! Discrete intrinsic calculus on tensor-product grids over a chart:
//! gradient, divergence, Laplace-Beltrami, covariant Hessian, Cheng-Yau
//! operator, and quadrature over the closed hypersurface.
//!
//! Periodic axes carry uniform nodes with wraparound; polar axes carry
//! half-cell-offset nodes on (0, pi) and take their ghost values from the
//! chart's pole-crossing identification, so every axis uses the same
//! fourth-order centered stencils.

use crate::charts::{AxisKind, Chart};
use crate::error::{GeomError, Result};
use crate::extrinsic::{point_geometry, PointGeometry};
use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::Arc;

pub const MIN_RESOLUTION: usize = 8;

/// Tensor grid over a chart with cached pointwise geometry at every node.
pub struct Grid {
    pub chart: Arc<dyn Chart>,
    pub shape: Vec<usize>,
    pub spacing: Vec<f64>,
    pub axes: Vec<AxisKind>,
    /// Axes transformed when crossing the pole of a given polar axis:
    /// for each axis, the list of (axis, is_azimuth) pairs downstream of it
    /// in its spherical factor.
    pole_tails: Vec<Vec<(usize, bool)>>,
    strides: Vec<usize>,
    pub nnodes: usize,
    pub geoms: Vec<PointGeometry>,
    /// Product of the per-axis spacings (uniform quadrature weight).
    cell_weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Scalar,
    /// Contravariant components in the chart basis.
    TangentVector,
    /// Covariant rank-2 components (row-major).
    CovariantTensor2,
}

/// Sampled field on a grid; component arrays are node-major per component.
#[derive(Debug, Clone)]
pub struct GridField {
    pub rank: Rank,
    pub comps: Vec<Vec<f64>>,
}

impl GridField {
    pub fn scalar(values: Vec<f64>) -> Self {
        GridField {
            rank: Rank::Scalar,
            comps: vec![values],
        }
    }

    pub fn values(&self) -> &[f64] {
        assert_eq!(self.rank, Rank::Scalar);
        &self.comps[0]
    }
}

impl Grid {
    /// Builds a grid with `res` nodes per axis and caches the geometry.
    pub fn new(chart: Arc<dyn Chart>, res: usize) -> Result<Grid> {
        let n = chart.param_dim();
        let axes = chart.axes();
        let domain = chart.domain();
        let shape = vec![res; n];
        for (a, &m) in shape.iter().enumerate() {
            if m < MIN_RESOLUTION {
                return Err(GeomError::ResolutionTooLow {
                    axis: a,
                    got: m,
                    min: MIN_RESOLUTION,
                });
            }
            if m % 2 != 0 {
                return Err(GeomError::Config(format!(
                    "axis {a}: odd resolution {m} breaks the half-period pole shift"
                )));
            }
        }
        let spacing: Vec<f64> = (0..n)
            .map(|a| (domain[a].1 - domain[a].0) / shape[a] as f64)
            .collect();
        let mut strides = vec![1usize; n];
        for a in (0..n.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * shape[a + 1];
        }
        let nnodes: usize = shape.iter().product();

        let mut pole_tails = vec![Vec::new(); n];
        for factor in chart.factors() {
            for (pos, &a) in factor.iter().enumerate() {
                pole_tails[a] = factor[pos + 1..]
                    .iter()
                    .map(|&b| (b, b == *factor.last().unwrap()))
                    .collect();
            }
        }

        let cell_weight: f64 = spacing.iter().product();
        let node_u = |flat: usize| -> Vec<f64> {
            let mut u = vec![0.0; n];
            let mut rem = flat;
            for a in 0..n {
                let k = rem / strides[a];
                rem %= strides[a];
                u[a] = match axes[a] {
                    AxisKind::Periodic => domain[a].0 + k as f64 * spacing[a],
                    AxisKind::Polar => domain[a].0 + (k as f64 + 0.5) * spacing[a],
                };
            }
            u
        };

        let geoms: Vec<PointGeometry> = (0..nnodes)
            .into_par_iter()
            .map(|flat| point_geometry(chart.as_ref(), &node_u(flat)))
            .collect::<Result<Vec<_>>>()?;

        Ok(Grid {
            chart,
            shape,
            spacing,
            axes,
            pole_tails,
            strides,
            nnodes,
            geoms,
            cell_weight,
        })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn node_u(&self, flat: usize) -> Vec<f64> {
        self.geoms[flat].u.clone()
    }

    pub fn resolution(&self) -> usize {
        self.shape[0]
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.strides)
            .map(|(i, s)| i * s)
            .sum()
    }

    /// Value of a component array at `idx` displaced by `off` along `axis`,
    /// following the pole identification where the displacement leaves the
    /// box. `character` lists the tensor indices carried by this component;
    /// each reflected index contributes a sign flip.
    fn fetch(&self, vals: &[f64], idx: &[usize], axis: usize, off: isize, character: &[usize]) -> f64 {
        let m = self.shape[axis] as isize;
        let j = idx[axis] as isize + off;
        match self.axes[axis] {
            AxisKind::Periodic => {
                let jj = j.rem_euclid(m) as usize;
                let mut nidx = idx.to_vec();
                nidx[axis] = jj;
                vals[self.flat(&nidx)]
            }
            AxisKind::Polar => {
                if (0..m).contains(&j) {
                    let mut nidx = idx.to_vec();
                    nidx[axis] = j as usize;
                    return vals[self.flat(&nidx)];
                }
                let jj = if j < 0 { -1 - j } else { 2 * m - 1 - j } as usize;
                let mut nidx = idx.to_vec();
                let mut sign_axis = vec![1.0f64; self.dim()];
                nidx[axis] = jj;
                sign_axis[axis] = -1.0;
                for &(b, is_azimuth) in &self.pole_tails[axis] {
                    if is_azimuth {
                        nidx[b] = (nidx[b] + self.shape[b] / 2) % self.shape[b];
                    } else {
                        nidx[b] = self.shape[b] - 1 - nidx[b];
                        sign_axis[b] = -1.0;
                    }
                }
                let sign: f64 = character.iter().map(|&c| sign_axis[c]).product();
                sign * vals[self.flat(&nidx)]
            }
        }
    }

    /// Fourth-order centered first derivative along an axis.
    fn axis_deriv(&self, vals: &[f64], character: &[usize], axis: usize) -> Vec<f64> {
        let h = self.spacing[axis];
        let n = self.dim();
        let mut out = vec![0.0; self.nnodes];
        let mut idx = vec![0usize; n];
        for flat in 0..self.nnodes {
            let p2 = self.fetch(vals, &idx, axis, 2, character);
            let p1 = self.fetch(vals, &idx, axis, 1, character);
            let m1 = self.fetch(vals, &idx, axis, -1, character);
            let m2 = self.fetch(vals, &idx, axis, -2, character);
            out[flat] = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
            advance(&mut idx, &self.shape);
        }
        out
    }

    /// Fourth-order centered second derivative along one axis.
    fn axis_deriv2(&self, vals: &[f64], character: &[usize], axis: usize) -> Vec<f64> {
        let h = self.spacing[axis];
        let n = self.dim();
        let mut out = vec![0.0; self.nnodes];
        let mut idx = vec![0usize; n];
        for flat in 0..self.nnodes {
            let p2 = self.fetch(vals, &idx, axis, 2, character);
            let p1 = self.fetch(vals, &idx, axis, 1, character);
            let c0 = vals[flat];
            let m1 = self.fetch(vals, &idx, axis, -1, character);
            let m2 = self.fetch(vals, &idx, axis, -2, character);
            out[flat] = (-p2 + 16.0 * p1 - 30.0 * c0 + 16.0 * m1 - m2) / (12.0 * h * h);
            advance(&mut idx, &self.shape);
        }
        out
    }

    pub fn scalar_from_geometry(&self, f: impl Fn(&PointGeometry) -> f64) -> GridField {
        GridField::scalar(self.geoms.iter().map(f).collect())
    }

    pub fn vector_from_geometry(
        &self,
        f: impl Fn(&PointGeometry) -> DVector<f64>,
    ) -> GridField {
        let n = self.dim();
        let per_node: Vec<DVector<f64>> = self.geoms.iter().map(f).collect();
        let comps = (0..n)
            .map(|i| per_node.iter().map(|v| v[i]).collect())
            .collect();
        GridField {
            rank: Rank::TangentVector,
            comps,
        }
    }

    /// (∇f)^i = g^{ij} ∂_j f.
    pub fn gradient(&self, f: &GridField) -> GridField {
        assert_eq!(f.rank, Rank::Scalar);
        let n = self.dim();
        let partials: Vec<Vec<f64>> = (0..n)
            .map(|j| self.axis_deriv(f.values(), &[], j))
            .collect();
        let mut comps = vec![vec![0.0; self.nnodes]; n];
        for (flat, pg) in self.geoms.iter().enumerate() {
            for i in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    s += pg.metric_inv[(i, j)] * partials[j][flat];
                }
                comps[i][flat] = s;
            }
        }
        GridField {
            rank: Rank::TangentVector,
            comps,
        }
    }

    /// div V = (1/√det g) ∂_i (√det g · V^i).
    pub fn divergence(&self, v: &GridField) -> GridField {
        assert_eq!(v.rank, Rank::TangentVector);
        let n = self.dim();
        let mut acc = vec![0.0; self.nnodes];
        for i in 0..n {
            let weighted: Vec<f64> = v.comps[i]
                .iter()
                .zip(&self.geoms)
                .map(|(vi, pg)| vi * pg.sqrt_det_g)
                .collect();
            let d = self.axis_deriv(&weighted, &[i], i);
            for (a, di) in acc.iter_mut().zip(d) {
                *a += di;
            }
        }
        for (a, pg) in acc.iter_mut().zip(&self.geoms) {
            *a /= pg.sqrt_det_g;
        }
        GridField::scalar(acc)
    }

    pub fn laplace_beltrami(&self, f: &GridField) -> GridField {
        self.divergence(&self.gradient(f))
    }

    /// Covariant Hessian (∇²f)_{ij} = ∂_i ∂_j f − Γ^k_{ij} ∂_k f, symmetrized.
    pub fn hessian(&self, f: &GridField) -> GridField {
        assert_eq!(f.rank, Rank::Scalar);
        let n = self.dim();
        let partials: Vec<Vec<f64>> = (0..n)
            .map(|j| self.axis_deriv(f.values(), &[], j))
            .collect();
        let mut second = vec![vec![0.0; self.nnodes]; n * n];
        for i in 0..n {
            second[i * n + i] = self.axis_deriv2(f.values(), &[], i);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let dij = self.axis_deriv(&partials[j], &[j], i);
                let dji = self.axis_deriv(&partials[i], &[i], j);
                let avg: Vec<f64> = dij
                    .iter()
                    .zip(&dji)
                    .map(|(a, b)| 0.5 * (a + b))
                    .collect();
                second[i * n + j] = avg.clone();
                second[j * n + i] = avg;
            }
        }
        let mut comps = vec![vec![0.0; self.nnodes]; n * n];
        for (flat, pg) in self.geoms.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let mut s = second[i * n + j][flat];
                    for k in 0..n {
                        s -= pg.christoffel[(k * n + i) * n + j] * partials[k][flat];
                    }
                    comps[i * n + j][flat] = s;
                }
            }
        }
        GridField {
            rank: Rank::CovariantTensor2,
            comps,
        }
    }

    /// tr_g of a covariant rank-2 field.
    pub fn tensor_trace(&self, t: &GridField) -> GridField {
        assert_eq!(t.rank, Rank::CovariantTensor2);
        let n = self.dim();
        let mut out = vec![0.0; self.nnodes];
        for (flat, pg) in self.geoms.iter().enumerate() {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += pg.metric_inv[(i, j)] * t.comps[i * n + j][flat];
                }
            }
            out[flat] = s;
        }
        GridField::scalar(out)
    }

    /// |T|² = g^{ik} g^{jl} T_ij T_kl of a covariant rank-2 field.
    pub fn tensor_norm_sq(&self, t: &GridField) -> GridField {
        assert_eq!(t.rank, Rank::CovariantTensor2);
        let n = self.dim();
        let mut out = vec![0.0; self.nnodes];
        for (flat, pg) in self.geoms.iter().enumerate() {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            s += pg.metric_inv[(i, k)]
                                * pg.metric_inv[(j, l)]
                                * t.comps[i * n + j][flat]
                                * t.comps[k * n + l][flat];
                        }
                    }
                }
            }
            out[flat] = s;
        }
        GridField::scalar(out)
    }

    /// g_{ij} V^i W^j per node.
    pub fn vector_inner(&self, v: &GridField, w: &GridField) -> GridField {
        assert_eq!(v.rank, Rank::TangentVector);
        assert_eq!(w.rank, Rank::TangentVector);
        let n = self.dim();
        let mut out = vec![0.0; self.nnodes];
        for (flat, pg) in self.geoms.iter().enumerate() {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += pg.metric[(i, j)] * v.comps[i][flat] * w.comps[j][flat];
                }
            }
            out[flat] = s;
        }
        GridField::scalar(out)
    }

    /// Pointwise application of the shape operator to a tangent field.
    pub fn apply_shape(&self, v: &GridField) -> GridField {
        self.apply_mixed(v, |pg| &pg.shape)
    }

    /// Pointwise application of the Newton operator P1.
    pub fn apply_newton(&self, v: &GridField) -> GridField {
        self.apply_mixed(v, |pg| &pg.newton_p1)
    }

    fn apply_mixed<'a>(
        &'a self,
        v: &GridField,
        op: impl Fn(&'a PointGeometry) -> &'a nalgebra::DMatrix<f64>,
    ) -> GridField {
        assert_eq!(v.rank, Rank::TangentVector);
        let n = self.dim();
        let mut comps = vec![vec![0.0; self.nnodes]; n];
        for (flat, pg) in self.geoms.iter().enumerate() {
            let mat = op(pg);
            for i in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    s += mat[(i, j)] * v.comps[j][flat];
                }
                comps[i][flat] = s;
            }
        }
        GridField {
            rank: Rank::TangentVector,
            comps,
        }
    }

    /// L1 f = div(P1 ∇f).
    pub fn cheng_yau(&self, f: &GridField) -> GridField {
        self.divergence(&self.apply_newton(&self.gradient(f)))
    }

    /// ∫_M f dM by the uniform product rule (trapezoid on periodic axes,
    /// midpoint across the poles), summed pairwise for reproducibility.
    pub fn integrate(&self, f: &GridField) -> f64 {
        assert_eq!(f.rank, Rank::Scalar);
        let weighted: Vec<f64> = f
            .values()
            .iter()
            .zip(&self.geoms)
            .map(|(v, pg)| v * pg.sqrt_det_g)
            .collect();
        pairwise_sum(&weighted) * self.cell_weight
    }

    pub fn total_measure(&self) -> f64 {
        let ones: Vec<f64> = self.geoms.iter().map(|pg| pg.sqrt_det_g).collect();
        pairwise_sum(&ones) * self.cell_weight
    }

    /// Seeded trigonometric-polynomial test field: a degree-`modes`
    /// polynomial in the ambient coordinates restricted to the surface,
    /// which respects periodicity and the pole identification by
    /// construction. `modes = 0` gives a constant field.
    pub fn random_band_limited(&self, seed: u64, modes: usize, zero_mean: bool) -> Result<GridField> {
        let m_min = *self.shape.iter().min().unwrap();
        if modes > m_min / 4 {
            return Err(GeomError::BandLimit {
                modes,
                nodes: m_min,
            });
        }
        let dim = self.chart.model().embed_dim;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = self
            .geoms
            .iter()
            .map(|pg| pg.p.norm())
            .fold(0.0f64, f64::max)
            .max(1e-30);
        let constant: f64 = rng.gen_range(-1.0..1.0);
        let mut terms: Vec<(f64, DVector<f64>)> = Vec::new();
        for _ in 1..=modes {
            let mut dir = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0_f64..1.0));
            let nrm = dir.norm();
            if nrm < 1e-9 {
                dir[0] = 1.0;
            } else {
                dir /= nrm;
            }
            terms.push((rng.gen_range(-1.0..1.0), dir));
        }
        let mut vals: Vec<f64> = self
            .geoms
            .iter()
            .map(|pg| {
                let mut s = constant;
                for (k, (coeff, dir)) in terms.iter().enumerate() {
                    s += coeff * (pg.p.dot(dir) / scale).powi(k as i32 + 1);
                }
                s
            })
            .collect();
        if zero_mean {
            let field = GridField::scalar(vals.clone());
            let mean = self.integrate(&field) / self.total_measure();
            vals.iter_mut().for_each(|v| *v -= mean);
        }
        Ok(GridField::scalar(vals))
    }
}

fn advance(idx: &mut [usize], shape: &[usize]) {
    for a in (0..idx.len()).rev() {
        idx[a] += 1;
        if idx[a] < shape[a] {
            return;
        }
        idx[a] = 0;
    }
}

/// Deterministic pairwise reduction; independent of thread count because it
/// is single-threaded and order-stable.
pub fn pairwise_sum(vals: &[f64]) -> f64 {
    if vals.len() <= 16 {
        let mut s = 0.0;
        for v in vals {
            s += v;
        }
        s
    } else {
        let mid = vals.len() / 2;
        pairwise_sum(&vals[..mid]) + pairwise_sum(&vals[mid..])
    }
}

/// L∞ norm of a scalar field's values.
pub fn linf(vals: &[f64]) -> f64 {
    vals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Discrete L² norm weighted by the surface measure.
pub fn l2(grid: &Grid, vals: &[f64]) -> f64 {
    let sq: Vec<f64> = vals.iter().map(|v| v * v).collect();
    let f = GridField::scalar(sq);
    (grid.integrate(&f) / grid.total_measure()).max(0.0).sqrt()
}
