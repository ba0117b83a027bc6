//! Ambient space forms of constant curvature c, modeled by their standard
//! embeddings: the round sphere in Euclidean space for c > 0, Euclidean space
//! itself for c = 0, and the upper-sheet hyperboloid in Lorentzian space for
//! c < 0. Provides the radial functions psi_c / theta_c, geodesic distance,
//! and the position vector field relative to a base point.

use crate::error::{GeomError, Result};
use nalgebra::DVector;

pub type AmbientVector = DVector<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Euclidean,
    Lorentzian,
}

/// The simply connected space form M^{n+1}(c), with its embedding data.
#[derive(Debug, Clone)]
pub struct SpaceFormModel {
    pub c: f64,
    /// Hypersurface dimension n ≥ 2 (the model itself has dimension n+1).
    pub n: usize,
    /// n+2 for c ≠ 0, n+1 for c = 0.
    pub embed_dim: usize,
    pub signature: Signature,
    pub base_point: AmbientVector,
}

impl SpaceFormModel {
    /// Model with the default base point: the last coordinate axis point for
    /// c ≠ 0 (e.g. e_{n+2} scaled to the model radius), the origin for c = 0.
    pub fn new(c: f64, n: usize) -> Self {
        assert!(n >= 2, "hypersurface dimension must be at least 2");
        let embed_dim = if c == 0.0 { n + 1 } else { n + 2 };
        let signature = if c < 0.0 {
            Signature::Lorentzian
        } else {
            Signature::Euclidean
        };
        let mut base_point = DVector::zeros(embed_dim);
        if c != 0.0 {
            base_point[embed_dim - 1] = 1.0 / c.abs().sqrt();
        }
        SpaceFormModel {
            c,
            n,
            embed_dim,
            signature,
            base_point,
        }
    }

    pub fn with_base_point(mut self, x0: AmbientVector) -> Result<Self> {
        if x0.len() != self.embed_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.embed_dim,
                got: x0.len(),
            });
        }
        self.check_model_point(&x0, 1e-8)?;
        self.base_point = x0;
        Ok(self)
    }

    /// Signed inner product of the declared signature.
    pub fn inner(&self, v: &AmbientVector, w: &AmbientVector) -> f64 {
        assert_eq!(v.len(), self.embed_dim);
        assert_eq!(w.len(), self.embed_dim);
        ambient_inner(self.signature, v, w)
    }

    pub fn norm_sq(&self, v: &AmbientVector) -> f64 {
        self.inner(v, v)
    }

    /// Verifies ⟨p,p⟩ = 1/c (and the upper-sheet condition for c < 0).
    pub fn check_model_point(&self, p: &AmbientVector, tol: f64) -> Result<()> {
        if p.len() != self.embed_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.embed_dim,
                got: p.len(),
            });
        }
        if self.c == 0.0 {
            return Ok(());
        }
        let r = self.inner(p, p) - 1.0 / self.c;
        if r.abs() > tol * (1.0 / self.c.abs()).max(1.0) {
            return Err(GeomError::Domain(format!(
                "point off the model quadric: residual {r:.3e}"
            )));
        }
        if self.c < 0.0 && p[self.embed_dim - 1] <= 0.0 {
            return Err(GeomError::Domain(
                "hyperboloid point not on the upper sheet".into(),
            ));
        }
        Ok(())
    }

    pub fn geodesic_distance(&self, p: &AmbientVector, q: &AmbientVector) -> Result<f64> {
        geodesic_distance(self, p, q)
    }

    pub fn position_vector(&self, p: &AmbientVector) -> Result<AmbientVector> {
        position_vector(self, p)
    }
}

pub fn ambient_inner(sig: Signature, v: &AmbientVector, w: &AmbientVector) -> f64 {
    assert_eq!(v.len(), w.len(), "ambient vector dimension mismatch");
    match sig {
        Signature::Euclidean => v.dot(w),
        Signature::Lorentzian => {
            let m = v.len();
            v.rows(0, m - 1).dot(&w.rows(0, m - 1)) - v[m - 1] * w[m - 1]
        }
    }
}

// Below this the Taylor expansions of psi/theta are used instead of the
// closed forms, which lose accuracy to cancellation as c -> 0.
const SERIES_THRESHOLD: f64 = 1e-8;

/// Solution of y'' + c y = 0 with y(0) = 0, y'(0) = 1:
/// sin(√c t)/√c, t, or sinh(√-c t)/√-c depending on the sign of c.
pub fn psi(c: f64, t: f64) -> Result<f64> {
    check_radial_domain(c, t)?;
    let z = c * t * t;
    if z.abs() < SERIES_THRESHOLD {
        // t (1 - z/6 + z^2/120 - ...)
        Ok(t * (1.0 - z / 6.0 + z * z / 120.0))
    } else if c > 0.0 {
        let s = c.sqrt();
        Ok((s * t).sin() / s)
    } else {
        let s = (-c).sqrt();
        Ok((s * t).sinh() / s)
    }
}

/// theta_c = psi_c'.
pub fn theta(c: f64, t: f64) -> Result<f64> {
    check_radial_domain(c, t)?;
    let z = c * t * t;
    if z.abs() < SERIES_THRESHOLD {
        Ok(1.0 - z / 2.0 + z * z / 24.0)
    } else if c > 0.0 {
        Ok((c.sqrt() * t).cos())
    } else {
        Ok(((-c).sqrt() * t).cosh())
    }
}

fn check_radial_domain(c: f64, t: f64) -> Result<()> {
    if t < 0.0 {
        return Err(GeomError::Domain(format!("negative radial argument {t}")));
    }
    if c > 0.0 && t >= std::f64::consts::PI / c.sqrt() {
        return Err(GeomError::Domain(format!(
            "radial argument {t} at or beyond the injectivity radius {}",
            std::f64::consts::PI / c.sqrt()
        )));
    }
    Ok(())
}

// How far beyond the arccos/arccosh domain boundary an inner product may
// stray before it is treated as genuinely invalid geometry rather than
// roundoff.
const CLAMP_SLACK: f64 = 1e-12;

pub fn geodesic_distance(
    model: &SpaceFormModel,
    p: &AmbientVector,
    q: &AmbientVector,
) -> Result<f64> {
    let c = model.c;
    if c == 0.0 {
        return Ok((q - p).norm());
    }
    // cos(√c d) = c⟨p,q⟩ on the sphere; cosh(√-c d) = c⟨p,q⟩_L on the
    // hyperboloid (both sides of the latter are ≥ 1).
    let a = c * model.inner(p, q);
    if c > 0.0 {
        if a < -1.0 + CLAMP_SLACK {
            return Err(GeomError::Antipodal);
        }
        if a > 1.0 + CLAMP_SLACK {
            return Err(GeomError::Domain(format!(
                "inner product {a} outside arccos domain"
            )));
        }
        Ok(a.clamp(-1.0, 1.0).acos() / c.sqrt())
    } else {
        if a < 1.0 - CLAMP_SLACK {
            return Err(GeomError::Domain(format!(
                "inner product {a} outside arccosh domain"
            )));
        }
        Ok(a.max(1.0).acosh() / (-c).sqrt())
    }
}

/// Position vector X = psi_c(d) ∇̄d at p, relative to the model's base point.
///
/// Closed form used for c ≠ 0: X = theta_c(d)·p − x0, which is tangent to the
/// model at p and has ambient norm psi_c(d).
pub fn position_vector(model: &SpaceFormModel, p: &AmbientVector) -> Result<AmbientVector> {
    let x0 = &model.base_point;
    if model.c == 0.0 {
        let x = p - x0;
        if x.norm() == 0.0 {
            return Err(GeomError::BasePointCoincidence);
        }
        return Ok(x);
    }
    let d = geodesic_distance(model, p, x0)?;
    if d == 0.0 {
        return Err(GeomError::BasePointCoincidence);
    }
    let th = theta(model.c, d)?;
    Ok(p * th - x0)
}
