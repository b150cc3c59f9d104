//! Mollified two-point covariances by adaptive singular quadrature.
//!
//! `Cov(h^a_{eps_a}(x), h^b_{eps_b}(y))` is the double integral of the kernel
//! against both mollifiers. Both mollifiers are discretised by midpoint-type
//! rules (tensor grids on their supports, angular nodes on circles); the two
//! sides use staggered node counts (`n` vs `n+1`) so node sets never touch
//! the kernel diagonal. Node counts double per refinement level until the
//! value stabilises within a relative tolerance.
//!
//! For the sine-series kernel the node-pair double sum is reordered through
//! the mode square: with `P_jk = sum_i w_i phi_jk(p_i)` the quadrature equals
//! `sum_jk lambda_jk P_jk Q_jk` exactly, which turns an `O(n^4)` pair sum
//! into three dense matrix products.

use ndarray::{Array1, Array2};

use crate::domain::Point;
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::mollifier::{MollifierRule, MollifierSpec, TensorWeights};
use crate::spectral::{mode_weights, sine_matrix};

#[derive(Clone, Copy, Debug)]
pub struct QuadratureParams {
    pub rel_tol: f64,
    pub max_levels: usize,
}

impl Default for QuadratureParams {
    fn default() -> Self {
        QuadratureParams {
            rel_tol: 1e-3,
            max_levels: 5,
        }
    }
}

/// Covariance of the mollified field between two (mollifier, scale, centre)
/// atoms, with adaptive refinement at the default tolerance.
pub fn mollified_cov(
    kernel: &KernelSpec,
    a: &MollifierSpec,
    eps_a: f64,
    b: &MollifierSpec,
    eps_b: f64,
    x: &Point,
    y: &Point,
) -> Result<f64> {
    mollified_cov_with(kernel, a, eps_a, b, eps_b, x, y, QuadratureParams::default())
}

pub fn mollified_cov_with(
    kernel: &KernelSpec,
    a: &MollifierSpec,
    eps_a: f64,
    b: &MollifierSpec,
    eps_b: f64,
    x: &Point,
    y: &Point,
    params: QuadratureParams,
) -> Result<f64> {
    let domain = kernel.domain();
    for (spec, eps, c) in [(a, eps_a, x), (b, eps_b, y)] {
        if !domain.contains_with_margin(c, spec.support_radius(eps)) {
            return Err(Error::OutOfDomain(c.x, c.y));
        }
    }
    // canonical atom order: a swapped call then performs the identical
    // floating-point computation, making the symmetry in (x, y) exact
    let (first, second) = if atom_key(b, eps_b, y) < atom_key(a, eps_a, x) {
        ((b, eps_b, y), (a, eps_a, x))
    } else {
        ((a, eps_a, x), (b, eps_b, y))
    };
    let mut prev: Option<f64> = None;
    let mut last_change = f64::INFINITY;
    for level in 0..params.max_levels {
        let rule_a = first.0.rule(first.1, level);
        let rule_b = second.0.rule_staggered(second.1, level);
        let v = cross_quadrature(kernel, &rule_a, first.2, &rule_b, second.2)?;
        if let Some(p) = prev {
            last_change = (v - p).abs() / v.abs().max(1e-6);
            if last_change <= params.rel_tol {
                return Ok(v);
            }
        }
        prev = Some(v);
    }
    Err(Error::QuadratureNotConverged {
        levels: params.max_levels,
        last_change,
        tol: params.rel_tol,
    })
}

fn atom_key(m: &MollifierSpec, eps: f64, c: &Point) -> (u8, u64, u64, u64, u64) {
    let fam = match m.family {
        crate::mollifier::MollifierFamily::Box => 0u8,
        crate::mollifier::MollifierFamily::Bump => 1,
        crate::mollifier::MollifierFamily::TruncatedGaussian => 2,
        crate::mollifier::MollifierFamily::Circle => 3,
    };
    (
        fam,
        m.base_radius.to_bits(),
        eps.to_bits(),
        c.x.to_bits(),
        c.y.to_bits(),
    )
}

/// The node-pair quadrature sum for two fixed rules (no refinement).
pub fn cross_quadrature(
    kernel: &KernelSpec,
    rule_a: &MollifierRule,
    x: &Point,
    rule_b: &MollifierRule,
    y: &Point,
) -> Result<f64> {
    match kernel {
        KernelSpec::GffSquare {
            mode_cutoff,
            amplitude,
        } => {
            let p = mode_projection(rule_a, x, *mode_cutoff);
            let q = mode_projection(rule_b, y, *mode_cutoff);
            let lam = mode_weights(*mode_cutoff, *amplitude);
            Ok((&lam * &p * &q).sum())
        }
        KernelSpec::PureLog => {
            let na = rule_a.nodes();
            let nb = rule_b.nodes();
            let mut total = 0.0;
            for &((ax, ay), wa) in &na {
                let px = x.x + ax;
                let py = x.y + ay;
                for &((bx, by), wb) in &nb {
                    let d = (px - (y.x + bx)).hypot(py - (y.y + by));
                    if d < 1e-14 {
                        return Err(Error::CoincidentQuadratureNodes(px, py));
                    }
                    total -= wa * wb * d.ln();
                }
            }
            Ok(total)
        }
        KernelSpec::ExplicitMatrix { .. } => Err(Error::UnsupportedKernel(
            "mollified covariance needs a kernel evaluable off the tabulated points",
        )),
    }
}

/// `P_jk = sum_i w_i phi_jk(centre + offset_i)` for a discretised mollifier.
pub fn mode_projection(rule: &MollifierRule, center: &Point, cutoff: usize) -> Array2<f64> {
    match rule {
        MollifierRule::Tensor { xs, ys, weights } => {
            let ax: Vec<f64> = xs.iter().map(|o| center.x + o).collect();
            let ay: Vec<f64> = ys.iter().map(|o| center.y + o).collect();
            let s1 = sine_matrix(&ax, cutoff);
            let s2 = sine_matrix(&ay, cutoff);
            match weights {
                TensorWeights::Separable(wx, wy) => {
                    let u = s1.t().dot(&Array1::from_vec(wx.clone()));
                    let v = s2.t().dot(&Array1::from_vec(wy.clone()));
                    let mut out = Array2::zeros((cutoff, cutoff));
                    for j in 0..cutoff {
                        for k in 0..cutoff {
                            out[[j, k]] = 2.0 * u[j] * v[k];
                        }
                    }
                    out
                }
                TensorWeights::Full(w) => {
                    let mut p = s1.t().dot(w).dot(&s2);
                    p.mapv_inplace(|v| 2.0 * v);
                    p
                }
            }
        }
        MollifierRule::Ring { pts, weight } => {
            let ax: Vec<f64> = pts.iter().map(|p| center.x + p.0).collect();
            let ay: Vec<f64> = pts.iter().map(|p| center.y + p.1).collect();
            let s1 = sine_matrix(&ax, cutoff);
            let s2 = sine_matrix(&ay, cutoff);
            // P = 2 * S1^T diag(w) S2 with equal weights
            let mut p = s1.t().dot(&s2);
            p.mapv_inplace(|v| 2.0 * *weight * v);
            p
        }
    }
}

/// `Var(h_{eps_j}(x))` for every ladder scale.
pub fn variance_profile(
    kernel: &KernelSpec,
    m: &MollifierSpec,
    ladder: &crate::domain::ScaleLadder,
    x: &Point,
) -> Result<Vec<f64>> {
    ladder
        .scales()
        .iter()
        .map(|&eps| mollified_cov(kernel, m, eps, m, eps, x, x))
        .collect()
}
