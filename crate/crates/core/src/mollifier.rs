//! Regularising kernels: unit-mass compactly supported densities plus the
//! measure-valued uniform circle. Each family provides
//!   * discrete quadrature rules (renormalised to mass exactly one) used by
//!     the singular covariance quadrature, and
//!   * spectral multipliers `m(j,k)` such that convolving a sine mode with
//!     the mollifier at scale `eps` multiplies it by `m(j,k)`.

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierFamily {
    /// Uniform density on the square `[-r, r]^2`.
    Box,
    /// Smooth compactly supported bump `exp(-1/(1 - (|u|/r)^2))` on the disk.
    Bump,
    /// Gaussian with sigma `r/2`, truncated to the disk `|u| <= r`.
    TruncatedGaussian,
    /// Uniform distribution on the circle of radius `r` (measure-valued).
    Circle,
}

impl MollifierFamily {
    pub fn name(&self) -> &'static str {
        match self {
            MollifierFamily::Box => "box",
            MollifierFamily::Bump => "bump",
            MollifierFamily::TruncatedGaussian => "truncated_gaussian",
            MollifierFamily::Circle => "circle",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub family: MollifierFamily,
    /// Support radius at `eps = 1`; the radius at scale `eps` is `eps * base_radius`.
    pub base_radius: f64,
}

impl MollifierSpec {
    pub fn new(family: MollifierFamily, base_radius: f64) -> Result<Self> {
        if !(base_radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "base_radius must be positive, got {base_radius}"
            )));
        }
        Ok(MollifierSpec {
            family,
            base_radius,
        })
    }

    pub fn boxcar() -> Self {
        MollifierSpec {
            family: MollifierFamily::Box,
            base_radius: 1.0,
        }
    }

    pub fn bump() -> Self {
        MollifierSpec {
            family: MollifierFamily::Bump,
            base_radius: 1.0,
        }
    }

    pub fn truncated_gaussian() -> Self {
        MollifierSpec {
            family: MollifierFamily::TruncatedGaussian,
            base_radius: 1.0,
        }
    }

    pub fn circle() -> Self {
        MollifierSpec {
            family: MollifierFamily::Circle,
            base_radius: 1.0,
        }
    }

    pub fn support_radius(&self, eps: f64) -> f64 {
        self.base_radius * eps
    }

    /// Quadrature rule at refinement `level` (node counts double per level).
    pub fn rule(&self, eps: f64, level: usize) -> MollifierRule {
        self.rule_with_count(eps, self.node_count(level))
    }

    /// Staggered partner rule: one extra node per axis, so the node sets of a
    /// rule/staggered-rule pair never coincide even for identical centres and
    /// scales, keeping singular kernels off the quadrature diagonal.
    pub fn rule_staggered(&self, eps: f64, level: usize) -> MollifierRule {
        self.rule_with_count(eps, self.node_count(level) + 1)
    }

    fn node_count(&self, level: usize) -> usize {
        match self.family {
            MollifierFamily::Circle => {
                // angular node floor, scaling with the circumference-to-scale ratio
                let base = 64usize.max((16.0 * std::f64::consts::PI * self.base_radius).ceil() as usize);
                base << level
            }
            _ => 4 << level,
        }
    }

    fn rule_with_count(&self, eps: f64, n: usize) -> MollifierRule {
        let r = self.support_radius(eps);
        match self.family {
            MollifierFamily::Circle => {
                let pts = (0..n)
                    .map(|i| {
                        let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
                        (r * th.cos(), r * th.sin())
                    })
                    .collect();
                MollifierRule::Ring {
                    pts,
                    weight: 1.0 / n as f64,
                }
            }
            MollifierFamily::Box => {
                let (xs, w) = midpoints(r, n);
                MollifierRule::Tensor {
                    xs: xs.clone(),
                    ys: xs,
                    weights: TensorWeights::Separable(w.clone(), w),
                }
            }
            MollifierFamily::Bump | MollifierFamily::TruncatedGaussian => {
                let (xs, _) = midpoints(r, n);
                let mut w = Array2::zeros((n, n));
                let mut total = 0.0;
                for i in 0..n {
                    for l in 0..n {
                        let rho = xs[i].hypot(xs[l]);
                        let d = self.density(rho, r);
                        w[[i, l]] = d;
                        total += d;
                    }
                }
                w.mapv_inplace(|v| v / total);
                MollifierRule::Tensor {
                    xs: xs.clone(),
                    ys: xs,
                    weights: TensorWeights::Full(w),
                }
            }
        }
    }

    /// Unnormalised radial density profile of the smooth families; zero
    /// outside the support. Box and circle do not route through here.
    fn density(&self, rho: f64, r: f64) -> f64 {
        match self.family {
            MollifierFamily::Bump => {
                let t = rho / r;
                if t < 1.0 {
                    (-1.0 / (1.0 - t * t)).exp()
                } else {
                    0.0
                }
            }
            MollifierFamily::TruncatedGaussian => {
                if rho <= r {
                    let sigma = r / 2.0;
                    (-0.5 * (rho / sigma) * (rho / sigma)).exp()
                } else {
                    0.0
                }
            }
            MollifierFamily::Box | MollifierFamily::Circle => unreachable!(),
        }
    }

    /// Spectral multipliers against the sine modes of the unit square:
    /// `(phi_jk * theta_eps)(x) = m(j,k) phi_jk(x)`, as an `(m, m)` array.
    ///
    /// Box averages factor through one-dimensional sincs; the circle average
    /// of a Laplacian eigenfunction is a Bessel-J0 factor; radial densities
    /// reduce to a one-dimensional Hankel-type integral over the support.
    pub fn multipliers(&self, eps: f64, cutoff: usize) -> Array2<f64> {
        let r = self.support_radius(eps);
        let pi = std::f64::consts::PI;
        match self.family {
            MollifierFamily::Box => {
                let sinc = |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t };
                let s: Vec<f64> = (1..=cutoff).map(|j| sinc(j as f64 * pi * r)).collect();
                Array2::from_shape_fn((cutoff, cutoff), |(j, k)| s[j] * s[k])
            }
            MollifierFamily::Circle => Array2::from_shape_fn((cutoff, cutoff), |(j, k)| {
                let jj = (j + 1) as f64;
                let kk = (k + 1) as f64;
                libm::j0(pi * r * (jj * jj + kk * kk).sqrt())
            }),
            MollifierFamily::Bump | MollifierFamily::TruncatedGaussian => {
                // cache on the integer mode radius j^2 + k^2
                let mut cache: HashMap<u64, f64> = HashMap::new();
                let mut out = Array2::zeros((cutoff, cutoff));
                for j in 0..cutoff {
                    for k in 0..cutoff {
                        let key = ((j + 1) * (j + 1) + (k + 1) * (k + 1)) as u64;
                        let m = *cache
                            .entry(key)
                            .or_insert_with(|| self.radial_multiplier((key as f64).sqrt() * pi, r));
                        out[[j, k]] = m;
                    }
                }
                out
            }
        }
    }

    /// `int_0^r theta(rho) J0(s rho) 2 pi rho drho`, self-normalised so the
    /// value at `s = 0` is exactly one.
    fn radial_multiplier(&self, s: f64, r: f64) -> f64 {
        // composite Simpson; the integrand oscillates on scale 2*pi/s, and
        // s*r stays below ~300 for the configured cutoffs and scales
        let intervals = 1024usize;
        let h = r / intervals as f64;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..=intervals {
            let rho = i as f64 * h;
            let coeff = if i == 0 || i == intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let w = self.density(rho, r) * rho * coeff;
            num += w * libm::j0(s * rho);
            den += w;
        }
        num / den
    }
}

/// Discretised mollifier: node offsets (relative to the centre) and weights
/// with total mass exactly one.
#[derive(Clone, Debug)]
pub enum MollifierRule {
    Tensor {
        xs: Vec<f64>,
        ys: Vec<f64>,
        weights: TensorWeights,
    },
    Ring {
        pts: Vec<(f64, f64)>,
        weight: f64,
    },
}

#[derive(Clone, Debug)]
pub enum TensorWeights {
    Separable(Vec<f64>, Vec<f64>),
    Full(Array2<f64>),
}

impl MollifierRule {
    /// All `(offset, weight)` pairs, materialised.
    pub fn nodes(&self) -> Vec<((f64, f64), f64)> {
        match self {
            MollifierRule::Ring { pts, weight } => {
                pts.iter().map(|&p| (p, *weight)).collect()
            }
            MollifierRule::Tensor { xs, ys, weights } => {
                let mut out = Vec::with_capacity(xs.len() * ys.len());
                for (i, &x) in xs.iter().enumerate() {
                    for (l, &y) in ys.iter().enumerate() {
                        let w = match weights {
                            TensorWeights::Separable(wx, wy) => wx[i] * wy[l],
                            TensorWeights::Full(w) => w[[i, l]],
                        };
                        out.push(((x, y), w));
                    }
                }
                out
            }
        }
    }

    pub fn mass(&self) -> f64 {
        self.nodes().iter().map(|(_, w)| w).sum()
    }
}

fn midpoints(r: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let step = 2.0 * r / n as f64;
    let xs = (0..n).map(|i| -r + (i as f64 + 0.5) * step).collect();
    let ws = vec![1.0 / n as f64; n];
    (xs, ws)
}
