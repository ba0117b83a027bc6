//! Pointwise extrinsic and intrinsic geometry of an immersed hypersurface:
//! first and second fundamental forms, shape operator, mean curvature,
//! scalar and Ricci curvature, support function, tangential position part,
//! and the Newton operator P1.

use crate::charts::Chart;
use crate::error::{GeomError, Result};
use crate::spaceform::{self, AmbientVector, Signature};
use nalgebra::{DMatrix, DVector};

const METRIC_CONDITION_LIMIT: f64 = 1e12;

/// All pointwise geometric quantities at one parameter point.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub u: Vec<f64>,
    pub p: AmbientVector,
    pub tangent_basis: Vec<AmbientVector>,
    pub metric: DMatrix<f64>,
    pub metric_inv: DMatrix<f64>,
    pub sqrt_det_g: f64,
    pub normal: AmbientVector,
    /// Second fundamental form h_ij = ⟨∂i∂j p, N⟩.
    pub second_form: DMatrix<f64>,
    /// Shape operator in mixed components, A^i_j = g^{ik} h_kj.
    pub shape: DMatrix<f64>,
    pub mean_curvature: f64,
    pub shape_norm_sq: f64,
    /// Normalized scalar curvature from the Gauss relation
    /// S = c + (n^2 H^2 - |A|^2) / (n(n-1)).
    pub scalar_curvature: f64,
    /// Support function rho = ⟨X, N⟩.
    pub rho: f64,
    /// Tangential part of the position vector, components in the chart basis.
    pub x_tangent: DVector<f64>,
    /// theta_c at the geodesic distance from the base point.
    pub theta: f64,
    /// Newton operator P1 = nH I - A, mixed components.
    pub newton_p1: DMatrix<f64>,
    /// Christoffel symbols of the induced metric, Γ^k_ij at [k][i][j],
    /// flattened as k*n*n + i*n + j.
    pub christoffel: Vec<f64>,
}

impl PointGeometry {
    pub fn dim(&self) -> usize {
        self.tangent_basis.len()
    }

    /// Ambient representation of a tangent vector given in chart components.
    pub fn push_forward(&self, v: &DVector<f64>) -> AmbientVector {
        let mut out = AmbientVector::zeros(self.p.len());
        for (i, t) in self.tangent_basis.iter().enumerate() {
            out += t * v[i];
        }
        out
    }

    /// Induced inner product of tangent vectors in chart components.
    pub fn g_inner(&self, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        (v.transpose() * &self.metric * w)[(0, 0)]
    }

    /// Extrinsic Ricci tensor Ric(v, w) = (n-1)c⟨v,w⟩ + nH⟨Av,w⟩ - ⟨Av,Aw⟩.
    pub fn ricci_extrinsic(&self, c: f64, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let n = self.dim() as f64;
        let av = &self.shape * v;
        let aw = &self.shape * w;
        (n - 1.0) * c * self.g_inner(v, w) + n * self.mean_curvature * self.g_inner(&av, w)
            - self.g_inner(&av, &aw)
    }

    /// Covariant components of the extrinsic Ricci tensor.
    pub fn ricci_extrinsic_matrix(&self, c: f64) -> DMatrix<f64> {
        let n = self.dim() as f64;
        let ga = &self.metric * &self.shape;
        let ata = self.shape.transpose() * &ga;
        &self.metric * ((n - 1.0) * c) + &ga * (n * self.mean_curvature) - ata
    }
}

/// Computes every pointwise quantity at parameter point `u`.
pub fn point_geometry(chart: &dyn Chart, u: &[f64]) -> Result<PointGeometry> {
    let model = chart.model();
    let n = chart.param_dim();
    let jet = chart.eval(u);
    let p = jet.position();
    let tangent_basis: Vec<AmbientVector> = (0..n).map(|i| jet.d1(i)).collect();

    let metric = DMatrix::from_fn(n, n, |i, j| {
        model.inner(&tangent_basis[i], &tangent_basis[j])
    });
    let eigen = metric.clone().symmetric_eigen();
    let (mut emin, mut emax) = (f64::INFINITY, 0.0f64);
    for &ev in eigen.eigenvalues.iter() {
        emin = emin.min(ev);
        emax = emax.max(ev);
    }
    if !(emin > 0.0) || emax / emin > METRIC_CONDITION_LIMIT {
        return Err(GeomError::DegenerateMetric(emax / emin.max(f64::MIN_POSITIVE)));
    }
    let metric_inv = metric
        .clone()
        .try_inverse()
        .ok_or(GeomError::DegenerateMetric(f64::INFINITY))?;
    let sqrt_det_g = metric.determinant().sqrt();

    let normal = unit_normal(chart, &p, &tangent_basis, &chart.normal_hint(u))?;

    let second_form = DMatrix::from_fn(n, n, |i, j| model.inner(&jet.d2(i, j), &normal));
    let shape = &metric_inv * &second_form;
    let nf = n as f64;
    let mean_curvature = shape.trace() / nf;
    let shape_norm_sq = (&shape * &shape).trace();
    let scalar_curvature = model.c
        + (nf * nf * mean_curvature * mean_curvature - shape_norm_sq) / (nf * (nf - 1.0));
    let newton_p1 = DMatrix::identity(n, n) * (nf * mean_curvature) - &shape;

    // Position-vector quantities relative to the model base point.
    let x = spaceform::position_vector(model, &p)?;
    let rho = model.inner(&x, &normal);
    let rhs = DVector::from_fn(n, |i, _| model.inner(&x, &tangent_basis[i]));
    let x_tangent = &metric_inv * rhs;
    let dist = spaceform::geodesic_distance(model, &model.base_point, &p)?;
    let theta = spaceform::theta(model.c, dist)?;

    let christoffel = christoffel_symbols(model.signature, &jet, &tangent_basis, &metric_inv);

    Ok(PointGeometry {
        u: u.to_vec(),
        p,
        tangent_basis,
        metric,
        metric_inv,
        sqrt_det_g,
        normal,
        second_form,
        shape,
        mean_curvature,
        shape_norm_sq,
        scalar_curvature,
        rho,
        x_tangent,
        theta,
        newton_p1,
        christoffel,
    })
}

/// Unit normal: the hint vector orthogonalized against the model normal
/// (for c ≠ 0) and the tangent basis, with respect to the ambient metric.
fn unit_normal(
    chart: &dyn Chart,
    p: &AmbientVector,
    tangent_basis: &[AmbientVector],
    hint: &AmbientVector,
) -> Result<AmbientVector> {
    let model = chart.model();
    let sig = model.signature;
    let j_apply = |v: &AmbientVector| -> AmbientVector {
        match sig {
            Signature::Euclidean => v.clone(),
            Signature::Lorentzian => {
                let mut w = v.clone();
                let m = w.len();
                w[m - 1] = -w[m - 1];
                w
            }
        }
    };
    // Euclidean-orthonormal basis of the space N must be orthogonal to,
    // namely span{J p (c != 0), J ∂i p}.
    let mut rows: Vec<AmbientVector> = Vec::new();
    if model.c != 0.0 {
        rows.push(j_apply(p));
    }
    for t in tangent_basis {
        rows.push(j_apply(t));
    }
    let mut ortho: Vec<AmbientVector> = Vec::new();
    for mut r in rows {
        for _ in 0..2 {
            for b in &ortho {
                let c = r.dot(b);
                r -= b * c;
            }
        }
        let nrm = r.norm();
        if nrm < 1e-12 {
            return Err(GeomError::NormalConstruction(
                "tangent space degenerate during orthogonalization".into(),
            ));
        }
        ortho.push(r / nrm);
    }
    let mut nvec = hint.clone();
    for _ in 0..2 {
        for b in &ortho {
            let c = nvec.dot(b);
            nvec -= b * c;
        }
    }
    let q = model.inner(&nvec, &nvec);
    if q <= 1e-16 {
        return Err(GeomError::NormalConstruction(format!(
            "hint projects to a vector of squared norm {q:.3e}"
        )));
    }
    Ok(nvec / q.sqrt())
}

/// Christoffel symbols Γ^k_ij of the induced metric from analytic second
/// derivatives: ∂i g_jl = ⟨∂i∂j p, ∂l p⟩ + ⟨∂j p, ∂i∂l p⟩.
fn christoffel_symbols(
    sig: Signature,
    jet: &crate::charts::ChartJet,
    tangent: &[AmbientVector],
    g_inv: &DMatrix<f64>,
) -> Vec<f64> {
    let n = tangent.len();
    let mut dg = vec![0.0; n * n * n]; // [i][j][l] = ∂i g_jl
    for i in 0..n {
        for j in 0..n {
            let dij = jet.d2(i, j);
            for l in 0..n {
                let dil = jet.d2(i, l);
                dg[(i * n + j) * n + l] = spaceform::ambient_inner(sig, &dij, &tangent[l])
                    + spaceform::ambient_inner(sig, &tangent[j], &dil);
            }
        }
    }
    let mut gamma = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += g_inv[(k, l)]
                        * (dg[(i * n + j) * n + l] + dg[(j * n + i) * n + l]
                            - dg[(l * n + i) * n + j]);
                }
                gamma[(k * n + i) * n + j] = 0.5 * s;
            }
        }
    }
    gamma
}

/// Christoffel symbols at an arbitrary parameter point (used by the
/// finite-difference intrinsic-curvature path).
pub fn christoffel_at(chart: &dyn Chart, u: &[f64]) -> Result<Vec<f64>> {
    let model = chart.model();
    let n = chart.param_dim();
    let jet = chart.eval(u);
    let tangent: Vec<AmbientVector> = (0..n).map(|i| jet.d1(i)).collect();
    let metric = DMatrix::from_fn(n, n, |i, j| model.inner(&tangent[i], &tangent[j]));
    let metric_inv = metric
        .try_inverse()
        .ok_or(GeomError::DegenerateMetric(f64::INFINITY))?;
    Ok(christoffel_symbols(
        model.signature,
        &jet,
        &tangent,
        &metric_inv,
    ))
}

/// Intrinsic Ricci tensor (covariant components) by differentiating the
/// Christoffel symbols with fourth-order central differences of per-axis
/// step `steps[a]`. This is the curvature route independent of the Gauss
/// relation.
pub fn ricci_intrinsic(chart: &dyn Chart, u: &[f64], steps: &[f64]) -> Result<DMatrix<f64>> {
    let n = chart.param_dim();
    let gamma = christoffel_at(chart, u)?;
    // dgamma[a][k][i][j] = ∂a Γ^k_ij
    let mut dgamma = vec![0.0; n * n * n * n];
    for a in 0..n {
        let h = steps[a];
        let eval = |offset: f64| -> Result<Vec<f64>> {
            let mut v = u.to_vec();
            v[a] += offset;
            christoffel_at(chart, &v)
        };
        let g_p2 = eval(2.0 * h)?;
        let g_p1 = eval(h)?;
        let g_m1 = eval(-h)?;
        let g_m2 = eval(-2.0 * h)?;
        for t in 0..n * n * n {
            dgamma[a * n * n * n + t] =
                (-g_p2[t] + 8.0 * g_p1[t] - 8.0 * g_m1[t] + g_m2[t]) / (12.0 * h);
        }
    }
    let gam = |k: usize, i: usize, j: usize| gamma[(k * n + i) * n + j];
    let dgam = |a: usize, k: usize, i: usize, j: usize| dgamma[((a * n + k) * n + i) * n + j];
    // Ric_jk = ∂i Γ^i_jk - ∂j Γ^i_ik + Γ^i_im Γ^m_jk - Γ^i_jm Γ^m_ik
    let mut ric = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                s += dgam(i, i, j, k) - dgam(j, i, i, k);
                for m in 0..n {
                    s += gam(i, i, m) * gam(m, j, k) - gam(i, j, m) * gam(m, i, k);
                }
            }
            ric[(j, k)] = s;
        }
    }
    Ok(ric)
}

/// Normalized intrinsic scalar curvature: g^{jk} Ric_jk / (n(n-1)).
pub fn scalar_curvature_intrinsic(chart: &dyn Chart, u: &[f64], steps: &[f64]) -> Result<f64> {
    let n = chart.param_dim();
    let model = chart.model();
    let jet = chart.eval(u);
    let tangent: Vec<AmbientVector> = (0..n).map(|i| jet.d1(i)).collect();
    let metric = DMatrix::from_fn(n, n, |i, j| model.inner(&tangent[i], &tangent[j]));
    let metric_inv = metric
        .try_inverse()
        .ok_or(GeomError::DegenerateMetric(f64::INFINITY))?;
    let ric = ricci_intrinsic(chart, u, steps)?;
    let scal = (metric_inv * ric).trace();
    Ok(scal / (n as f64 * (n as f64 - 1.0)))
}

/// Default per-axis step for the intrinsic-curvature differences when no
/// grid spacing applies: the standard optimum for first derivatives of
/// smooth data.
pub fn default_fd_steps(n: usize) -> Vec<f64> {
    vec![f64::EPSILON.powf(1.0 / 3.0); n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::{
        self, default_catalog, ellipsoid, equator, euclidean_sphere, perturbed_equator,
        product_sphere, small_hypersphere, FlippedChart,
    };
    use std::f64::consts::FRAC_1_SQRT_2;
    use std::sync::Arc;

    fn probe_points(chart: &dyn Chart, per_axis: usize) -> Vec<Vec<f64>> {
        let n = chart.param_dim();
        let domain = chart.domain();
        let total = per_axis.pow(n as u32);
        (0..total)
            .map(|flat| {
                let mut idx = flat;
                (0..n)
                    .map(|a| {
                        let k = idx % per_axis;
                        idx /= per_axis;
                        let (lo, hi) = domain[a];
                        lo + (hi - lo) * (k as f64 + 0.5) / per_axis as f64
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn normal_is_unit_tangent_to_model_and_orthogonal() {
        for entry in default_catalog() {
            let chart = entry.chart.as_ref();
            let model = chart.model();
            for u in probe_points(chart, 4) {
                let pg = point_geometry(chart, &u).unwrap();
                assert!((model.inner(&pg.normal, &pg.normal) - 1.0).abs() < 1e-10);
                for t in &pg.tangent_basis {
                    assert!(model.inner(&pg.normal, t).abs() < 1e-10 * t.norm());
                }
                if model.c != 0.0 {
                    assert!(
                        model.inner(&pg.normal, &pg.p).abs() < 1e-10 / model.c.abs(),
                        "{}",
                        entry.name
                    );
                }
                // g A symmetric
                let ga = &pg.metric * &pg.shape;
                assert!((ga.clone() - ga.transpose()).norm() < 1e-9);
                // |A|^2 >= n H^2
                let n = pg.dim() as f64;
                assert!(pg.shape_norm_sq - n * pg.mean_curvature.powi(2) > -1e-10);
            }
        }
    }

    #[test]
    fn known_curvatures_reproduced() {
        for entry in default_catalog() {
            let chart = entry.chart.as_ref();
            let (Some(h), Some(a_sq)) = (entry.known_h, entry.known_a_sq) else {
                continue;
            };
            let mut hs = Vec::new();
            for u in probe_points(chart, 4) {
                let pg = point_geometry(chart, &u).unwrap();
                assert!(
                    (pg.mean_curvature - h).abs() < 1e-9,
                    "{}: H {} vs {}",
                    entry.name,
                    pg.mean_curvature,
                    h
                );
                assert!((pg.shape_norm_sq - a_sq).abs() < 1e-9, "{}", entry.name);
                hs.push(pg.mean_curvature);
            }
            // CMC entries have zero spread of H
            let mean = hs.iter().sum::<f64>() / hs.len() as f64;
            let sd = (hs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / hs.len() as f64).sqrt();
            assert!(sd < 1e-10, "{}", entry.name);
        }
    }

    #[test]
    fn small_sphere_curvatures() {
        let entry = small_hypersphere(2, FRAC_1_SQRT_2, 1.0).unwrap();
        let pg = point_geometry(entry.chart.as_ref(), &[1.1, 0.4]).unwrap();
        assert!((pg.mean_curvature - 1.0).abs() < 1e-12);
        assert!((pg.shape_norm_sq - 2.0).abs() < 1e-12);
        assert!((pg.scalar_curvature - 2.0).abs() < 1e-12);
        assert!(entry.is_biharmonic);
        // off-tune radius is not biharmonic: H|A|^2 - ncH != 0
        let off = small_hypersphere(2, 0.9, 1.0).unwrap();
        let pg = point_geometry(off.chart.as_ref(), &[1.1, 0.4]).unwrap();
        let res = pg.mean_curvature * pg.shape_norm_sq - 2.0 * pg.mean_curvature;
        assert!((res - (2.0 * (0.4843f64).powi(3) - 2.0 * 0.4843)).abs() < 1e-3);
        assert!(!off.is_biharmonic);
    }

    #[test]
    fn equator_scalar_curvature_matches_ambient() {
        let entry = equator(3, 2.0).unwrap();
        let pg = point_geometry(entry.chart.as_ref(), &[0.9, 1.2, 2.0]).unwrap();
        assert!(pg.mean_curvature.abs() < 1e-11);
        assert!(pg.shape_norm_sq.abs() < 1e-11);
        assert!((pg.scalar_curvature - 2.0).abs() < 1e-11);
    }

    #[test]
    fn clifford_principal_curvatures() {
        let entry = product_sphere(1, 2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 1.0).unwrap();
        let pg = point_geometry(entry.chart.as_ref(), &[2.0, 1.0, 0.7]).unwrap();
        assert!((pg.mean_curvature - (-1.0 / 3.0)).abs() < 1e-12);
        assert!((pg.shape_norm_sq - 3.0).abs() < 1e-12);
        let eig = pg.shape.complex_eigenvalues();
        let mut kappas: Vec<f64> = eig.iter().map(|z| z.re).collect();
        kappas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((kappas[0] - (-1.0)).abs() < 1e-9);
        assert!((kappas[1] - (-1.0)).abs() < 1e-9);
        assert!((kappas[2] - 1.0).abs() < 1e-9);

        // swapped factors: congruent geometry, same multiset up to global sign
        let swapped = product_sphere(2, 1, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 1.0).unwrap();
        let pg2 = point_geometry(swapped.chart.as_ref(), &[1.0, 0.7, 2.0]).unwrap();
        let mut k2: Vec<f64> = pg2
            .shape
            .complex_eigenvalues()
            .iter()
            .map(|z| -z.re)
            .collect();
        k2.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in kappas.iter().zip(&k2) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn support_function_on_euclidean_sphere() {
        let entry = euclidean_sphere(2, 2.0).unwrap();
        for u in probe_points(entry.chart.as_ref(), 4) {
            let pg = point_geometry(entry.chart.as_ref(), &u).unwrap();
            // Inward orientation: H = 1/r, rho = -r, so theta + H rho = 0.
            assert!((pg.mean_curvature - 0.5).abs() < 1e-12);
            assert!((pg.rho + 2.0).abs() < 1e-12);
            assert!((pg.theta + pg.mean_curvature * pg.rho).abs() < 1e-12);
            assert!(pg.x_tangent.norm() < 1e-12);
        }
    }

    #[test]
    fn equator_support_quantities() {
        let entry = equator(2, 1.0).unwrap();
        for u in probe_points(entry.chart.as_ref(), 4) {
            let pg = point_geometry(entry.chart.as_ref(), &u).unwrap();
            assert!(pg.theta.abs() < 1e-14);
            assert!((pg.rho.abs() - 1.0).abs() < 1e-12);
            assert!(pg.x_tangent.norm() < 1e-10);
        }
    }

    #[test]
    fn position_decomposition_reconstructs_x() {
        for entry in default_catalog() {
            let chart = entry.chart.as_ref();
            let model = chart.model();
            for u in probe_points(chart, 3) {
                let pg = point_geometry(chart, &u).unwrap();
                let x = spaceform::position_vector(model, &pg.p).unwrap();
                let rebuilt = pg.push_forward(&pg.x_tangent) + &pg.normal * pg.rho;
                assert!((x.clone() - rebuilt).norm() < 1e-9, "{}", entry.name);
                // |X|^2 = |x^T|_g^2 + rho^2
                let xt_sq = pg.g_inner(&pg.x_tangent, &pg.x_tangent);
                assert!(
                    (model.norm_sq(&x) - xt_sq - pg.rho * pg.rho).abs() < 1e-9,
                    "{}",
                    entry.name
                );
            }
        }
    }

    #[test]
    fn newton_operator() {
        let entry = small_hypersphere(3, FRAC_1_SQRT_2, 1.0).unwrap();
        let pg = point_geometry(entry.chart.as_ref(), &[0.8, 1.3, 2.9]).unwrap();
        // umbilical with kappa = 1: P1 = (nH - kappa) I = 2 I
        let expected = DMatrix::identity(3, 3) * 2.0;
        assert!((pg.newton_p1.clone() - expected).norm() < 1e-10);

        let eq = equator(2, 1.0).unwrap();
        let pg = point_geometry(eq.chart.as_ref(), &[0.8, 1.3]).unwrap();
        assert!(pg.newton_p1.norm() < 1e-11);

        // trace identity on the ellipsoid
        let ell = ellipsoid(&[2.0, 1.0, 1.0]).unwrap();
        for u in probe_points(ell.chart.as_ref(), 5) {
            let pg = point_geometry(ell.chart.as_ref(), &u).unwrap();
            let n = pg.dim() as f64;
            assert!(
                (pg.newton_p1.trace() - n * (n - 1.0) * pg.mean_curvature).abs() < 1e-10
            );
        }
    }

    #[test]
    fn extrinsic_ricci_against_closed_forms() {
        // Equator: A = 0, so Ric(v,v) = (n-1) c |v|^2.
        let eq = equator(2, 1.0).unwrap();
        let pg = point_geometry(eq.chart.as_ref(), &[1.0, 2.0]).unwrap();
        let mut v = DVector::zeros(2);
        v[0] = 1.0 / pg.metric[(0, 0)].sqrt();
        assert!((pg.ricci_extrinsic(1.0, &v, &v) - 1.0).abs() < 1e-10);

        // Umbilical small sphere, n = 3, kappa = 1: Ric(v,v) = 2 + 3 - 1 = 4,
        // matching the intrinsic Ricci (n-1)/r^2 of the round S^3(1/sqrt2).
        let entry = small_hypersphere(3, FRAC_1_SQRT_2, 1.0).unwrap();
        let pg = point_geometry(entry.chart.as_ref(), &[0.9, 1.4, 2.5]).unwrap();
        let mut v = DVector::zeros(3);
        v[1] = 1.0;
        let vn = pg.g_inner(&v, &v).sqrt();
        let v = v / vn;
        assert!((pg.ricci_extrinsic(1.0, &v, &v) - 4.0).abs() < 1e-9);
    }

    #[test]
    fn extrinsic_ricci_matches_intrinsic_contraction() {
        for entry in default_catalog() {
            let chart = entry.chart.as_ref();
            let c = chart.model().c;
            let steps = default_fd_steps(chart.param_dim());
            for u in probe_points(chart, 3) {
                let pg = point_geometry(chart, &u).unwrap();
                let ric_i = ricci_intrinsic(chart, &u, &steps).unwrap();
                let ric_e = pg.ricci_extrinsic_matrix(c);
                let scale = ric_e.norm().max(1.0);
                assert!(
                    (ric_i.clone() - ric_e).norm() / scale < 1e-6,
                    "{} at {u:?}",
                    entry.name
                );
            }
        }
    }

    #[test]
    fn gauss_relation_closure_against_intrinsic_scalar() {
        for entry in default_catalog() {
            let chart = entry.chart.as_ref();
            let c = chart.model().c;
            let steps = default_fd_steps(chart.param_dim());
            for u in probe_points(chart, 3) {
                let pg = point_geometry(chart, &u).unwrap();
                let s_int = scalar_curvature_intrinsic(chart, &u, &steps).unwrap();
                let n = pg.dim() as f64;
                let residual = n * (n - 1.0) * (s_int - c)
                    - n * n * pg.mean_curvature.powi(2)
                    + pg.shape_norm_sq;
                assert!(residual.abs() < 1e-6, "{}: {residual}", entry.name);
                assert!((s_int - pg.scalar_curvature).abs() < 1e-6, "{}", entry.name);
            }
        }
    }

    #[test]
    fn orientation_flip_covariance() {
        let entry = ellipsoid(&[1.5, 1.0, 0.8]).unwrap();
        let flipped = FlippedChart(Arc::clone(&entry.chart));
        for u in probe_points(entry.chart.as_ref(), 4) {
            let a = point_geometry(entry.chart.as_ref(), &u).unwrap();
            let b = point_geometry(&flipped, &u).unwrap();
            assert!((a.normal.clone() + &b.normal).norm() < 1e-12);
            assert!((a.mean_curvature + b.mean_curvature).abs() < 1e-12);
            assert!((a.rho + b.rho).abs() < 1e-12);
            assert!((a.second_form.clone() + &b.second_form).norm() < 1e-12);
            assert!((a.metric.clone() - &b.metric).norm() < 1e-14);
            assert!((a.shape_norm_sq - b.shape_norm_sq).abs() < 1e-12);
            assert!((a.scalar_curvature - b.scalar_curvature).abs() < 1e-12);
            assert!((a.theta - b.theta).abs() < 1e-14);
        }
    }

    #[test]
    fn umbilicity_characterizes_geodesic_spheres() {
        for entry in default_catalog() {
            let chart = entry.chart.as_ref();
            let mut max_defect = 0.0f64;
            for u in probe_points(chart, 4) {
                let pg = point_geometry(chart, &u).unwrap();
                let n = pg.dim() as f64;
                max_defect = max_defect.max(pg.shape_norm_sq - n * pg.mean_curvature.powi(2));
            }
            let is_round = entry.name.starts_with("equator")
                || entry.name.starts_with("small-sphere")
                || entry.name.starts_with("euclidean-sphere");
            if is_round {
                assert!(max_defect < 1e-10, "{}", entry.name);
            } else if !entry.name.contains("amp=0") {
                assert!(max_defect > 1e-4, "{}", entry.name);
            }
        }

        // the degenerate ellipsoid reduces to the round sphere
        let round = ellipsoid(&[1.0, 1.0, 1.0]).unwrap();
        let sphere = euclidean_sphere(2, 1.0).unwrap();
        for u in probe_points(round.chart.as_ref(), 4) {
            let a = point_geometry(round.chart.as_ref(), &u).unwrap();
            let b = point_geometry(sphere.chart.as_ref(), &u).unwrap();
            assert!((a.mean_curvature - b.mean_curvature).abs() < 1e-10);
            assert!((a.shape_norm_sq - b.shape_norm_sq).abs() < 1e-10);
            assert!((a.rho - b.rho).abs() < 1e-10);
        }
    }
}
