//! Parametric immersions of n-dimensional parameter boxes into the ambient
//! embedding space, with analytic derivatives through third order, and a
//! catalog of canonical closed hypersurfaces: great and small hyperspheres,
//! generalized Clifford tori, Euclidean spheres, ellipsoids, and seeded
//! normal-graph perturbations of the equator.

use crate::error::{GeomError, Result};
use crate::jet::{dot, Jet};
use crate::spaceform::{AmbientVector, SpaceFormModel};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;

/// Per-axis behavior of a chart's parameter box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisKind {
    /// Identified endpoints; period equal to the domain length.
    Periodic,
    /// Polar angle on (0, pi): the coordinate degenerates at both ends and
    /// continues across the pole into the antipodal leaf of the remaining
    /// angles of the same spherical factor.
    Polar,
}

/// Position and derivatives of the immersion at one parameter point,
/// one jet per ambient coordinate.
#[derive(Debug, Clone)]
pub struct ChartJet {
    pub coords: Vec<Jet>,
}

impl ChartJet {
    pub fn position(&self) -> DVector<f64> {
        DVector::from_iterator(self.coords.len(), self.coords.iter().map(|j| j.v))
    }

    pub fn d1(&self, i: usize) -> DVector<f64> {
        DVector::from_iterator(self.coords.len(), self.coords.iter().map(|j| j.d1[i]))
    }

    pub fn d2(&self, i: usize, j: usize) -> DVector<f64> {
        DVector::from_iterator(self.coords.len(), self.coords.iter().map(|c| c.d2(i, j)))
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> DVector<f64> {
        DVector::from_iterator(self.coords.len(), self.coords.iter().map(|c| c.d3(i, j, k)))
    }
}

/// A parametric immersion of a closed hypersurface into a space form.
pub trait Chart: Send + Sync {
    fn model(&self) -> &SpaceFormModel;
    fn param_dim(&self) -> usize;
    fn domain(&self) -> Vec<(f64, f64)>;
    fn axes(&self) -> Vec<AxisKind>;
    /// Spherical factor structure: each inner vector lists the axes of one
    /// factor in hyperspherical order (polar angles first, azimuth last).
    /// Grid ghost exchange across poles is derived from this.
    fn factors(&self) -> Vec<Vec<usize>>;
    fn eval(&self, u: &[f64]) -> ChartJet;
    /// Rough ambient direction used only to fix the sign of the unit normal;
    /// it must have a nonzero, sign-consistent projection on the true normal.
    fn normal_hint(&self, u: &[f64]) -> AmbientVector;
}

/// Unit-sphere coordinate jets in hyperspherical angles: the first k-1 angles
/// are polar on (0, pi), the last is the azimuth on (0, 2pi). Returns k+1
/// coordinates with the cosine of the first polar angle last.
pub fn unit_sphere_jets(angles: &[Jet]) -> Vec<Jet> {
    match angles.len() {
        0 => panic!("a spherical factor needs at least one angle"),
        1 => vec![angles[0].cos(), angles[0].sin()],
        _ => {
            let theta = &angles[0];
            let (s, c) = (theta.sin(), theta.cos());
            let mut out: Vec<Jet> = unit_sphere_jets(&angles[1..])
                .iter()
                .map(|w| s.mul(w))
                .collect();
            out.push(c);
            out
        }
    }
}

fn angle_jets(u: &[f64]) -> Vec<Jet> {
    (0..u.len()).map(|i| Jet::variable(u.len(), i, u[i])).collect()
}

/// Hyperspherical axis kinds for a k-angle factor.
fn sphere_axis_kinds(k: usize) -> Vec<AxisKind> {
    let mut kinds = vec![AxisKind::Polar; k.saturating_sub(1)];
    kinds.push(AxisKind::Periodic);
    kinds
}

fn sphere_domains(k: usize) -> Vec<(f64, f64)> {
    let mut d = vec![(0.0, PI); k.saturating_sub(1)];
    d.push((0.0, 2.0 * PI));
    d
}

/// Unit-sphere coordinates at angle values (no derivatives).
pub fn unit_sphere_point(u: &[f64]) -> DVector<f64> {
    let jets = unit_sphere_jets(&angle_jets(u));
    DVector::from_iterator(jets.len(), jets.iter().map(|j| j.v))
}

// ---------------------------------------------------------------------------
// Catalog charts
// ---------------------------------------------------------------------------

/// Great hypersphere S^n(R) inside S^{n+1}(R), R = 1/sqrt(c): the ambient
/// sphere sliced by the hyperplane orthogonal to the base axis.
pub struct EquatorChart {
    model: SpaceFormModel,
    radius: f64,
}

impl Chart for EquatorChart {
    fn model(&self) -> &SpaceFormModel {
        &self.model
    }
    fn param_dim(&self) -> usize {
        self.model.n
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        sphere_domains(self.model.n)
    }
    fn axes(&self) -> Vec<AxisKind> {
        sphere_axis_kinds(self.model.n)
    }
    fn factors(&self) -> Vec<Vec<usize>> {
        vec![(0..self.model.n).collect()]
    }
    fn eval(&self, u: &[f64]) -> ChartJet {
        let n = self.model.n;
        let mut coords: Vec<Jet> = unit_sphere_jets(&angle_jets(u))
            .iter()
            .map(|j| j.scale(self.radius))
            .collect();
        coords.push(Jet::constant(n, 0.0));
        ChartJet { coords }
    }
    fn normal_hint(&self, _u: &[f64]) -> AmbientVector {
        let mut h = DVector::zeros(self.model.embed_dim);
        h[self.model.embed_dim - 1] = 1.0;
        h
    }
}

/// Geodesic hypersphere of Euclidean radius r inside S^{n+1}(R).
pub struct SmallSphereChart {
    model: SpaceFormModel,
    r: f64,
    /// Height of the slice above the center of the ambient sphere.
    h: f64,
}

impl Chart for SmallSphereChart {
    fn model(&self) -> &SpaceFormModel {
        &self.model
    }
    fn param_dim(&self) -> usize {
        self.model.n
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        sphere_domains(self.model.n)
    }
    fn axes(&self) -> Vec<AxisKind> {
        sphere_axis_kinds(self.model.n)
    }
    fn factors(&self) -> Vec<Vec<usize>> {
        vec![(0..self.model.n).collect()]
    }
    fn eval(&self, u: &[f64]) -> ChartJet {
        let n = self.model.n;
        let mut coords: Vec<Jet> = unit_sphere_jets(&angle_jets(u))
            .iter()
            .map(|j| j.scale(self.r))
            .collect();
        coords.push(Jet::constant(n, self.h));
        ChartJet { coords }
    }
    fn normal_hint(&self, u: &[f64]) -> AmbientVector {
        // Normal pointing up toward the pole axis gives positive principal
        // curvatures: N = (-(h/R) omega, r/R).
        let radius = 1.0 / self.model.c.sqrt();
        let omega = unit_sphere_point(u);
        let m = self.model.embed_dim;
        let mut hint = DVector::zeros(m);
        for k in 0..m - 1 {
            hint[k] = -(self.h / radius) * omega[k];
        }
        hint[m - 1] = self.r / radius;
        hint
    }
}

/// Generalized Clifford torus S^{n1}(r1) x S^{n2}(r2) in S^{n+1}(R),
/// r1^2 + r2^2 = R^2.
pub struct ProductSphereChart {
    model: SpaceFormModel,
    n1: usize,
    n2: usize,
    r1: f64,
    r2: f64,
}

impl Chart for ProductSphereChart {
    fn model(&self) -> &SpaceFormModel {
        &self.model
    }
    fn param_dim(&self) -> usize {
        self.n1 + self.n2
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        let mut d = sphere_domains(self.n1);
        d.extend(sphere_domains(self.n2));
        d
    }
    fn axes(&self) -> Vec<AxisKind> {
        let mut a = sphere_axis_kinds(self.n1);
        a.extend(sphere_axis_kinds(self.n2));
        a
    }
    fn factors(&self) -> Vec<Vec<usize>> {
        vec![
            (0..self.n1).collect(),
            (self.n1..self.n1 + self.n2).collect(),
        ]
    }
    fn eval(&self, u: &[f64]) -> ChartJet {
        let n = self.param_dim();
        let jets = angle_jets(u);
        let w1 = unit_sphere_jets(&jets[..self.n1]);
        let w2 = unit_sphere_jets(&jets[self.n1..]);
        let mut coords: Vec<Jet> = w1.iter().map(|j| j.scale(self.r1)).collect();
        coords.extend(w2.iter().map(|j| j.scale(self.r2)));
        debug_assert_eq!(coords.len(), n + 2);
        ChartJet { coords }
    }
    fn normal_hint(&self, u: &[f64]) -> AmbientVector {
        // N = (-(r2/R) omega1, (r1/R) omega2) gives principal curvatures
        // r2/(r1 R) on the first factor and -r1/(r2 R) on the second.
        let radius = (self.r1 * self.r1 + self.r2 * self.r2).sqrt();
        let w1 = unit_sphere_point(&u[..self.n1]);
        let w2 = unit_sphere_point(&u[self.n1..]);
        let mut hint = DVector::zeros(self.model.embed_dim);
        for k in 0..w1.len() {
            hint[k] = -(self.r2 / radius) * w1[k];
        }
        for k in 0..w2.len() {
            hint[w1.len() + k] = (self.r1 / radius) * w2[k];
        }
        hint
    }
}

/// Round sphere S^n(r) in Euclidean space, possibly with distinct semiaxes
/// (the ellipsoid); the round case is semiaxes all equal.
pub struct EllipsoidChart {
    model: SpaceFormModel,
    semiaxes: Vec<f64>,
}

impl Chart for EllipsoidChart {
    fn model(&self) -> &SpaceFormModel {
        &self.model
    }
    fn param_dim(&self) -> usize {
        self.model.n
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        sphere_domains(self.model.n)
    }
    fn axes(&self) -> Vec<AxisKind> {
        sphere_axis_kinds(self.model.n)
    }
    fn factors(&self) -> Vec<Vec<usize>> {
        vec![(0..self.model.n).collect()]
    }
    fn eval(&self, u: &[f64]) -> ChartJet {
        let coords = unit_sphere_jets(&angle_jets(u))
            .iter()
            .enumerate()
            .map(|(k, j)| j.scale(self.semiaxes[k]))
            .collect();
        ChartJet { coords }
    }
    fn normal_hint(&self, u: &[f64]) -> AmbientVector {
        // Inward normal (H > 0): minus the gradient of sum (x_k/a_k)^2.
        let omega = unit_sphere_point(u);
        let mut hint = DVector::zeros(self.model.embed_dim);
        for k in 0..omega.len() {
            hint[k] = -omega[k] / self.semiaxes[k];
        }
        hint
    }
}

/// Normal graph over the equator: the equator pushed along ambient-sphere
/// geodesics by a seeded height function built from low-degree polynomials
/// in the equator coordinates (hence smooth across the poles).
pub struct PerturbedEquatorChart {
    model: SpaceFormModel,
    radius: f64,
    amplitude: f64,
    /// (coefficient, direction, degree) triples of the height function.
    terms: Vec<(f64, Vec<f64>, u32)>,
}

impl PerturbedEquatorChart {
    fn height_jet(&self, omega: &[Jet]) -> Jet {
        let n = omega[0].n;
        let mut f = Jet::constant(n, 0.0);
        for (coeff, dir, degree) in &self.terms {
            let dir_jets: Vec<Jet> = dir.iter().map(|&d| Jet::constant(n, d)).collect();
            f = f.add(&dot(omega, &dir_jets).powi(*degree).scale(*coeff));
        }
        f.scale(self.amplitude)
    }
}

impl Chart for PerturbedEquatorChart {
    fn model(&self) -> &SpaceFormModel {
        &self.model
    }
    fn param_dim(&self) -> usize {
        self.model.n
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        sphere_domains(self.model.n)
    }
    fn axes(&self) -> Vec<AxisKind> {
        sphere_axis_kinds(self.model.n)
    }
    fn factors(&self) -> Vec<Vec<usize>> {
        vec![(0..self.model.n).collect()]
    }
    fn eval(&self, u: &[f64]) -> ChartJet {
        let n = self.model.n;
        let omega = unit_sphere_jets(&angle_jets(u));
        let f = self.height_jet(&omega);
        // Geodesic flow off the equator: cos(f/R) q + R sin(f/R) e_last.
        let arg = f.scale(1.0 / self.radius);
        let (ca, sa) = (arg.cos(), arg.sin());
        let mut coords: Vec<Jet> = omega
            .iter()
            .map(|w| ca.mul(w).scale(self.radius))
            .collect();
        coords.push(sa.scale(self.radius));
        debug_assert_eq!(coords.len(), n + 2);
        ChartJet { coords }
    }
    fn normal_hint(&self, _u: &[f64]) -> AmbientVector {
        let mut h = DVector::zeros(self.model.embed_dim);
        h[self.model.embed_dim - 1] = 1.0;
        h
    }
}

// ---------------------------------------------------------------------------
// Orientation and isometry wrappers
// ---------------------------------------------------------------------------

/// Same chart with the normal orientation reversed.
pub struct FlippedChart(pub Arc<dyn Chart>);

impl Chart for FlippedChart {
    fn model(&self) -> &SpaceFormModel {
        self.0.model()
    }
    fn param_dim(&self) -> usize {
        self.0.param_dim()
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        self.0.domain()
    }
    fn axes(&self) -> Vec<AxisKind> {
        self.0.axes()
    }
    fn factors(&self) -> Vec<Vec<usize>> {
        self.0.factors()
    }
    fn eval(&self, u: &[f64]) -> ChartJet {
        self.0.eval(u)
    }
    fn normal_hint(&self, u: &[f64]) -> AmbientVector {
        -self.0.normal_hint(u)
    }
}

/// Chart composed with an ambient linear isometry; the base point moves with
/// the surface.
pub struct RotatedChart {
    inner: Arc<dyn Chart>,
    rotation: DMatrix<f64>,
    model: SpaceFormModel,
}

impl RotatedChart {
    pub fn new(inner: Arc<dyn Chart>, rotation: DMatrix<f64>) -> Self {
        let mut model = inner.model().clone();
        model.base_point = &rotation * &model.base_point;
        RotatedChart {
            inner,
            rotation,
            model,
        }
    }

    /// Seeded random rotation of the ambient space (QR of a Gaussian matrix).
    pub fn random(inner: Arc<dyn Chart>, seed: u64) -> Self {
        let dim = inner.model().embed_dim;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(dim, dim, |_, _| {
            // Box-Muller from uniform draws keeps the dependency footprint small.
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
        });
        let qr = a.qr();
        let mut q = qr.q();
        let r = qr.r();
        // Fix the sign ambiguity so Q is a deterministic function of A.
        for j in 0..dim {
            if r[(j, j)] < 0.0 {
                for i in 0..dim {
                    q[(i, j)] = -q[(i, j)];
                }
            }
        }
        RotatedChart::new(inner, q)
    }
}

impl Chart for RotatedChart {
    fn model(&self) -> &SpaceFormModel {
        &self.model
    }
    fn param_dim(&self) -> usize {
        self.inner.param_dim()
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        self.inner.domain()
    }
    fn axes(&self) -> Vec<AxisKind> {
        self.inner.axes()
    }
    fn factors(&self) -> Vec<Vec<usize>> {
        self.inner.factors()
    }
    fn eval(&self, u: &[f64]) -> ChartJet {
        let inner = self.inner.eval(u);
        let m = inner.coords.len();
        let n = self.param_dim();
        let mut coords = vec![Jet::constant(n, 0.0); m];
        for (row, out) in coords.iter_mut().enumerate() {
            for col in 0..m {
                let w = self.rotation[(row, col)];
                if w != 0.0 {
                    *out = out.add(&inner.coords[col].scale(w));
                }
            }
        }
        ChartJet { coords }
    }
    fn normal_hint(&self, u: &[f64]) -> AmbientVector {
        &self.rotation * self.inner.normal_hint(u)
    }
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

#[derive(Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub chart: Arc<dyn Chart>,
    pub known_h: Option<f64>,
    pub known_a_sq: Option<f64>,
    pub is_biharmonic: bool,
    pub is_minimal: bool,
    pub is_cmc: bool,
}

pub fn equator(n: usize, c: f64) -> Result<CatalogEntry> {
    if n < 2 {
        return Err(GeomError::Config("equator needs n >= 2".into()));
    }
    if c <= 0.0 {
        return Err(GeomError::Config("equator needs c > 0".into()));
    }
    let model = SpaceFormModel::new(c, n);
    let radius = 1.0 / c.sqrt();
    Ok(CatalogEntry {
        name: format!("equator:n={n},c={c}"),
        chart: Arc::new(EquatorChart { model, radius }),
        known_h: Some(0.0),
        known_a_sq: Some(0.0),
        is_biharmonic: true,
        is_minimal: true,
        is_cmc: true,
    })
}

pub fn small_hypersphere(n: usize, r: f64, c: f64) -> Result<CatalogEntry> {
    if c <= 0.0 {
        return Err(GeomError::Config("small hypersphere needs c > 0".into()));
    }
    let radius = 1.0 / c.sqrt();
    if !(r > 0.0 && r < radius) {
        return Err(GeomError::Config(format!(
            "small hypersphere radius {r} out of range (0, {radius})"
        )));
    }
    let model = SpaceFormModel::new(c, n);
    let h = (radius * radius - r * r).sqrt();
    let kappa = h / (r * radius);
    let biharmonic = (kappa * kappa - c).abs() < 1e-12 * c;
    Ok(CatalogEntry {
        name: format!("small-sphere:n={n},r={r},c={c}"),
        chart: Arc::new(SmallSphereChart { model, r, h }),
        known_h: Some(kappa),
        known_a_sq: Some(n as f64 * kappa * kappa),
        is_biharmonic: biharmonic,
        is_minimal: false,
        is_cmc: true,
    })
}

pub fn product_sphere(n1: usize, n2: usize, r1: f64, r2: f64, c: f64) -> Result<CatalogEntry> {
    if n1 < 1 || n2 < 1 {
        return Err(GeomError::Config("product sphere needs n1, n2 >= 1".into()));
    }
    if c <= 0.0 {
        return Err(GeomError::Config("product sphere needs c > 0".into()));
    }
    let radius = 1.0 / c.sqrt();
    if (r1 * r1 + r2 * r2 - radius * radius).abs() > 1e-12 * radius * radius {
        return Err(GeomError::Config(format!(
            "product sphere radii violate r1^2 + r2^2 = 1/c: {} vs {}",
            r1 * r1 + r2 * r2,
            radius * radius
        )));
    }
    let model = SpaceFormModel::new(c, n1 + n2);
    let n = (n1 + n2) as f64;
    let k1 = r2 / (r1 * radius);
    let k2 = -r1 / (r2 * radius);
    let h = (n1 as f64 * k1 + n2 as f64 * k2) / n;
    let a_sq = n1 as f64 * k1 * k1 + n2 as f64 * k2 * k2;
    let minimal = h.abs() < 1e-12;
    let biharmonic = minimal || (a_sq - n * c).abs() < 1e-12 * n * c;
    Ok(CatalogEntry {
        name: format!("clifford:{n1}x{n2},r1={r1},r2={r2},c={c}"),
        chart: Arc::new(ProductSphereChart {
            model,
            n1,
            n2,
            r1,
            r2,
        }),
        known_h: Some(h),
        known_a_sq: Some(a_sq),
        is_biharmonic: biharmonic,
        is_minimal: minimal,
        is_cmc: true,
    })
}

pub fn euclidean_sphere(n: usize, r: f64) -> Result<CatalogEntry> {
    if r <= 0.0 {
        return Err(GeomError::Config("sphere radius must be positive".into()));
    }
    let model = SpaceFormModel::new(0.0, n);
    Ok(CatalogEntry {
        name: format!("euclidean-sphere:n={n},r={r}"),
        chart: Arc::new(EllipsoidChart {
            model,
            semiaxes: vec![r; n + 1],
        }),
        known_h: Some(1.0 / r),
        known_a_sq: Some(n as f64 / (r * r)),
        is_biharmonic: false,
        is_minimal: false,
        is_cmc: true,
    })
}

pub fn ellipsoid(semiaxes: &[f64]) -> Result<CatalogEntry> {
    if semiaxes.len() < 3 {
        return Err(GeomError::Config(
            "ellipsoid needs at least 3 semiaxes (n >= 2)".into(),
        ));
    }
    if semiaxes.iter().any(|&a| a <= 0.0) {
        return Err(GeomError::Config("semiaxes must be positive".into()));
    }
    let n = semiaxes.len() - 1;
    let model = SpaceFormModel::new(0.0, n);
    let round = semiaxes.iter().all(|&a| (a - semiaxes[0]).abs() < 1e-15);
    let axes_label = semiaxes
        .iter()
        .map(|a| format!("{a}"))
        .collect::<Vec<_>>()
        .join("x");
    Ok(CatalogEntry {
        name: format!("ellipsoid:{axes_label}"),
        chart: Arc::new(EllipsoidChart {
            model,
            semiaxes: semiaxes.to_vec(),
        }),
        known_h: round.then(|| 1.0 / semiaxes[0]),
        known_a_sq: round.then(|| n as f64 / (semiaxes[0] * semiaxes[0])),
        is_biharmonic: false,
        is_minimal: false,
        is_cmc: round,
    })
}

pub fn perturbed_equator(n: usize, c: f64, amplitude: f64, seed: u64) -> Result<CatalogEntry> {
    if n < 2 || c <= 0.0 {
        return Err(GeomError::Config(
            "perturbed equator needs n >= 2 and c > 0".into(),
        ));
    }
    let model = SpaceFormModel::new(c, n);
    let radius = 1.0 / c.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for degree in 1..=3u32 {
        let mut dir: Vec<f64> = (0..n + 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        dir.iter_mut().for_each(|d| *d /= norm);
        let coeff: f64 = rng.gen_range(0.3..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        terms.push((coeff / 3.0, dir, degree));
    }
    let chart = Arc::new(PerturbedEquatorChart {
        model,
        radius,
        amplitude,
        terms,
    });
    if amplitude != 0.0 {
        validate_immersion(chart.as_ref(), 9)?;
    }
    Ok(CatalogEntry {
        name: format!("perturbed-equator:n={n},amp={amplitude},seed={seed},c={c}"),
        chart,
        known_h: if amplitude == 0.0 { Some(0.0) } else { None },
        known_a_sq: if amplitude == 0.0 { Some(0.0) } else { None },
        is_biharmonic: amplitude == 0.0,
        is_minimal: amplitude == 0.0,
        is_cmc: amplitude == 0.0,
    })
}

/// Checks the immersion condition on a coarse sample grid: the smallest
/// singular value of the Jacobian must stay above 1e-8 away from the poles.
pub fn validate_immersion(chart: &dyn Chart, samples_per_axis: usize) -> Result<()> {
    let n = chart.param_dim();
    let domain = chart.domain();
    let mut worst = f64::INFINITY;
    let total = samples_per_axis.pow(n as u32);
    for flat in 0..total {
        let mut idx = flat;
        let mut u = vec![0.0; n];
        for a in 0..n {
            let k = idx % samples_per_axis;
            idx /= samples_per_axis;
            let (lo, hi) = domain[a];
            u[a] = lo + (hi - lo) * (k as f64 + 0.5) / samples_per_axis as f64;
        }
        let jet = chart.eval(&u);
        let m = jet.coords.len();
        let jac = DMatrix::from_fn(m, n, |r, c| jet.coords[r].d1[c]);
        let sv = jac.svd(false, false).singular_values;
        let smin = sv[sv.len() - 1];
        worst = worst.min(smin);
    }
    if worst <= 1e-8 {
        return Err(GeomError::ImmersionFailure(worst));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Catalog addressing
// ---------------------------------------------------------------------------

fn inv_sqrt2() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2
}

/// The default catalog used by the CLI and the verification suite.
pub fn default_catalog() -> Vec<CatalogEntry> {
    let mut entries = vec![
        equator(2, 1.0).unwrap(),
        small_hypersphere(2, inv_sqrt2(), 1.0).unwrap(),
        small_hypersphere(3, inv_sqrt2(), 1.0).unwrap(),
        product_sphere(1, 2, inv_sqrt2(), inv_sqrt2(), 1.0).unwrap(),
        product_sphere(1, 1, inv_sqrt2(), inv_sqrt2(), 1.0).unwrap(),
        euclidean_sphere(2, 1.0).unwrap(),
        ellipsoid(&[2.0, 1.0, 1.0]).unwrap(),
        perturbed_equator(2, 1.0, 0.05, 7).unwrap(),
    ];
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    entries
}

/// Parses a catalog entry name of the form `family` or `family:key=val,...`.
///
/// Families: equator, small-sphere, clifford (`clifford:1x2` shorthand),
/// euclidean-sphere, ellipsoid (`ellipsoid:2x1x1` shorthand),
/// perturbed-equator.
pub fn parse_entry(spec: &str) -> Result<CatalogEntry> {
    let (family, rest) = match spec.split_once(':') {
        Some((f, r)) => (f.trim(), Some(r.trim())),
        None => (spec.trim(), None),
    };
    let kv = |rest: Option<&str>| -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        if let Some(r) = rest {
            for part in r.split(',').filter(|s| !s.is_empty()) {
                let (k, v) = part.split_once('=').ok_or_else(|| {
                    GeomError::Config(format!("expected key=value in entry spec, got '{part}'"))
                })?;
                out.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
        Ok(out)
    };
    let getf = |kvs: &[(String, String)], key: &str, default: f64| -> Result<f64> {
        match kvs.iter().find(|(k, _)| k == key) {
            Some((_, v)) => v
                .parse()
                .map_err(|_| GeomError::Config(format!("bad numeric value for {key}: '{v}'"))),
            None => Ok(default),
        }
    };
    let getu = |kvs: &[(String, String)], key: &str, default: usize| -> Result<usize> {
        match kvs.iter().find(|(k, _)| k == key) {
            Some((_, v)) => v
                .parse()
                .map_err(|_| GeomError::Config(format!("bad integer value for {key}: '{v}'"))),
            None => Ok(default),
        }
    };
    match family {
        "equator" => {
            let kvs = kv(rest)?;
            equator(getu(&kvs, "n", 2)?, getf(&kvs, "c", 1.0)?)
        }
        "small-sphere" => {
            let kvs = kv(rest)?;
            let c = getf(&kvs, "c", 1.0)?;
            let r = getf(&kvs, "r", inv_sqrt2() / c.sqrt())?;
            small_hypersphere(getu(&kvs, "n", 2)?, r, c)
        }
        "clifford" => {
            // Accept "clifford:1x2" or key=value form.
            if let Some(r) = rest {
                if r.contains('x') && !r.contains('=') {
                    let dims: Vec<usize> = r
                        .split('x')
                        .map(|s| {
                            s.trim().parse().map_err(|_| {
                                GeomError::Config(format!("bad clifford dimensions '{r}'"))
                            })
                        })
                        .collect::<Result<_>>()?;
                    if dims.len() != 2 {
                        return Err(GeomError::Config(format!(
                            "clifford shorthand needs two factors, got '{r}'"
                        )));
                    }
                    return product_sphere(dims[0], dims[1], inv_sqrt2(), inv_sqrt2(), 1.0);
                }
            }
            let kvs = kv(rest)?;
            let c = getf(&kvs, "c", 1.0)?;
            let r1 = getf(&kvs, "r1", inv_sqrt2() / c.sqrt())?;
            let r2 = getf(&kvs, "r2", inv_sqrt2() / c.sqrt())?;
            product_sphere(getu(&kvs, "n1", 1)?, getu(&kvs, "n2", 2)?, r1, r2, c)
        }
        "euclidean-sphere" => {
            let kvs = kv(rest)?;
            euclidean_sphere(getu(&kvs, "n", 2)?, getf(&kvs, "r", 1.0)?)
        }
        "ellipsoid" => {
            let r = rest.unwrap_or("2x1x1");
            let semiaxes: Vec<f64> = r
                .split('x')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| GeomError::Config(format!("bad semiaxes '{r}'")))
                })
                .collect::<Result<_>>()?;
            ellipsoid(&semiaxes)
        }
        "perturbed-equator" => {
            let kvs = kv(rest)?;
            perturbed_equator(
                getu(&kvs, "n", 2)?,
                getf(&kvs, "c", 1.0)?,
                getf(&kvs, "amp", 0.05)?,
                getu(&kvs, "seed", 7)? as u64,
            )
        }
        other => Err(GeomError::UnknownEntry(other.to_string())),
    }
}
