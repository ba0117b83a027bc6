//! Third-order jets: value plus partial derivatives up to order three with
//! respect to a fixed set of parameters. Charts build their immersion maps
//! out of jet arithmetic so every catalog surface carries analytic
//! derivatives through order three.

/// Value and derivatives of a scalar quantity with respect to `n` parameters.
///
/// `d2` and `d3` are stored dense and kept symmetric; `n` is small (≤ 3 for
/// the catalog) so the redundancy is irrelevant.
#[derive(Debug, Clone)]
pub struct Jet {
    pub n: usize,
    pub v: f64,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub d3: Vec<f64>,
}

impl Jet {
    pub fn constant(n: usize, v: f64) -> Self {
        Jet {
            n,
            v,
            d1: vec![0.0; n],
            d2: vec![0.0; n * n],
            d3: vec![0.0; n * n * n],
        }
    }

    /// The jet of the i-th parameter itself.
    pub fn variable(n: usize, i: usize, value: f64) -> Self {
        let mut j = Jet::constant(n, value);
        j.d1[i] = 1.0;
        j
    }

    #[inline]
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        self.d2[i * self.n + j]
    }

    #[inline]
    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.d3[(i * self.n + j) * self.n + k]
    }

    pub fn add(&self, other: &Jet) -> Jet {
        debug_assert_eq!(self.n, other.n);
        Jet {
            n: self.n,
            v: self.v + other.v,
            d1: zip(&self.d1, &other.d1, |a, b| a + b),
            d2: zip(&self.d2, &other.d2, |a, b| a + b),
            d3: zip(&self.d3, &other.d3, |a, b| a + b),
        }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        debug_assert_eq!(self.n, other.n);
        Jet {
            n: self.n,
            v: self.v - other.v,
            d1: zip(&self.d1, &other.d1, |a, b| a - b),
            d2: zip(&self.d2, &other.d2, |a, b| a - b),
            d3: zip(&self.d3, &other.d3, |a, b| a - b),
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            n: self.n,
            v: self.v * s,
            d1: self.d1.iter().map(|a| a * s).collect(),
            d2: self.d2.iter().map(|a| a * s).collect(),
            d3: self.d3.iter().map(|a| a * s).collect(),
        }
    }

    /// Leibniz product through third order.
    pub fn mul(&self, g: &Jet) -> Jet {
        let n = self.n;
        debug_assert_eq!(n, g.n);
        let f = self;
        let mut out = Jet::constant(n, f.v * g.v);
        for i in 0..n {
            out.d1[i] = f.d1[i] * g.v + f.v * g.d1[i];
        }
        for i in 0..n {
            for j in 0..n {
                out.d2[i * n + j] =
                    f.d2(i, j) * g.v + f.d1[i] * g.d1[j] + f.d1[j] * g.d1[i] + f.v * g.d2(i, j);
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.d3[(i * n + j) * n + k] = f.d3(i, j, k) * g.v
                        + f.d2(i, j) * g.d1[k]
                        + f.d2(i, k) * g.d1[j]
                        + f.d2(j, k) * g.d1[i]
                        + f.d1[i] * g.d2(j, k)
                        + f.d1[j] * g.d2(i, k)
                        + f.d1[k] * g.d2(i, j)
                        + f.v * g.d3(i, j, k);
                }
            }
        }
        out
    }

    /// Compose with a univariate function given by its value and first three
    /// derivatives at `self.v`.
    pub fn compose(&self, phi: f64, dphi: f64, d2phi: f64, d3phi: f64) -> Jet {
        let n = self.n;
        let f = self;
        let mut out = Jet::constant(n, phi);
        for i in 0..n {
            out.d1[i] = dphi * f.d1[i];
        }
        for i in 0..n {
            for j in 0..n {
                out.d2[i * n + j] = d2phi * f.d1[i] * f.d1[j] + dphi * f.d2(i, j);
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.d3[(i * n + j) * n + k] = d3phi * f.d1[i] * f.d1[j] * f.d1[k]
                        + d2phi
                            * (f.d2(i, j) * f.d1[k] + f.d2(i, k) * f.d1[j] + f.d2(j, k) * f.d1[i])
                        + dphi * f.d3(i, j, k);
                }
            }
        }
        out
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.compose(s, c, -s, -c)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.compose(c, -s, -c, s)
    }

    pub fn powi(&self, k: u32) -> Jet {
        match k {
            0 => Jet::constant(self.n, 1.0),
            _ => {
                let mut acc = self.clone();
                for _ in 1..k {
                    acc = acc.mul(self);
                }
                acc
            }
        }
    }
}

fn zip(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
}

/// Dot product of two jet vectors (componentwise jets of ambient coordinates).
pub fn dot(a: &[Jet], b: &[Jet]) -> Jet {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Jet::constant(a[0].n, 0.0);
    for (x, y) in a.iter().zip(b) {
        acc = acc.add(&x.mul(y));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    // Finite-difference oracle for jet derivatives of a composite expression.
    fn sample(u: &[f64]) -> f64 {
        (u[0].sin() * (2.0 * u[1]).cos() + u[0] * u[1]).powi(3)
    }

    fn sample_jet(u: &[f64]) -> Jet {
        let x = Jet::variable(2, 0, u[0]);
        let y = Jet::variable(2, 1, u[1]);
        x.sin().mul(&y.scale(2.0).cos()).add(&x.mul(&y)).powi(3)
    }

    #[test]
    fn jet_matches_central_differences() {
        let u = [0.7, -0.4];
        let j = sample_jet(&u);
        assert!((j.v - sample(&u)).abs() < 1e-14);

        let h = 1e-5;
        for i in 0..2 {
            let mut up = u;
            let mut dn = u;
            up[i] += h;
            dn[i] -= h;
            let fd = (sample(&up) - sample(&dn)) / (2.0 * h);
            assert!((j.d1[i] - fd).abs() < 1e-8, "d1[{i}]: {} vs {}", j.d1[i], fd);
        }
        for i in 0..2 {
            for k in 0..2 {
                let mut pp = u;
                let mut pm = u;
                let mut mp = u;
                let mut mm = u;
                pp[i] += h;
                pp[k] += h;
                pm[i] += h;
                pm[k] -= h;
                mp[i] -= h;
                mp[k] += h;
                mm[i] -= h;
                mm[k] -= h;
                let fd = (sample(&pp) - sample(&pm) - sample(&mp) + sample(&mm)) / (4.0 * h * h);
                assert!((j.d2(i, k) - fd).abs() < 1e-5);
            }
        }
        // Third derivatives: difference the jet's own second derivatives.
        let h3 = 1e-5;
        for i in 0..2 {
            let mut up = u;
            let mut dn = u;
            up[i] += h3;
            dn[i] -= h3;
            let jp = sample_jet(&up);
            let jn = sample_jet(&dn);
            for a in 0..2 {
                for b in 0..2 {
                    let fd = (jp.d2(a, b) - jn.d2(a, b)) / (2.0 * h3);
                    assert!((j.d3(i, a, b) - fd).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn symmetry_of_higher_derivatives() {
        let j = sample_jet(&[1.1, 0.3]);
        for i in 0..2 {
            for k in 0..2 {
                assert_eq!(j.d2(i, k), j.d2(k, i));
            }
        }
        for i in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    assert!((j.d3(i, a, b) - j.d3(a, i, b)).abs() < 1e-12);
                    assert!((j.d3(i, a, b) - j.d3(b, a, i)).abs() < 1e-12);
                }
            }
        }
    }
}
