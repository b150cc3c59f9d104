//! Separable sine-series machinery shared by the kernel, the spectral field
//! evaluator and the pairwise covariance tables.
//!
//! Everything here exploits that the field modes factor as products of
//! one-dimensional sines, so sums over the full mode square reduce to dense
//! matrix products against precomputed trigonometric matrices.

use ndarray::{Array1, Array2};

/// `sin((j+1) * pi * v)` for each value and mode column, shape `(values, m)`.
pub fn sine_matrix(vals: &[f64], m: usize) -> Array2<f64> {
    let mut out = Array2::zeros((vals.len(), m));
    for (r, &v) in vals.iter().enumerate() {
        let base = std::f64::consts::PI * v;
        for j in 0..m {
            out[[r, j]] = ((j + 1) as f64 * base).sin();
        }
    }
    out
}

/// `cos((j+1) * pi * v)` for each value and mode column, shape `(values, m)`.
pub fn cos_matrix(vals: &[f64], m: usize) -> Array2<f64> {
    let mut out = Array2::zeros((vals.len(), m));
    for (r, &v) in vals.iter().enumerate() {
        let base = std::f64::consts::PI * v;
        for j in 0..m {
            out[[r, j]] = ((j + 1) as f64 * base).cos();
        }
    }
    out
}

pub fn sine_vec(v: f64, m: usize) -> Array1<f64> {
    let base = std::f64::consts::PI * v;
    Array1::from_iter((1..=m).map(|j| (j as f64 * base).sin()))
}

/// Covariance-operator eigenvalues on the mode square:
/// `lambda_{jk} = amplitude / (pi^2 (j^2 + k^2))`, shape `(m, m)`.
pub fn mode_weights(m: usize, amplitude: f64) -> Array2<f64> {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    Array2::from_shape_fn((m, m), |(j, k)| {
        let jj = (j + 1) as f64;
        let kk = (k + 1) as f64;
        amplitude / (pi2 * (jj * jj + kk * kk))
    })
}

/// Pairwise covariances of a weighted sine-mode expansion, reduced to four
/// cosine tables over coordinate differences and sums:
///
/// `Cov(u, w) = T(d1,d2) - T(d1,s2) - T(s1,d2) + T(s1,s2)`
///
/// with `d = u_axis - w_axis`, `s = u_axis + w_axis` and
/// `T(a,b) = sum_{jk} W_{jk} cos(j pi a) cos(k pi b)`. When the points live on
/// a lattice the difference/sum values form small finite sets, so a handful of
/// dense matrix products yields every pairwise covariance exactly.
pub struct PairCov {
    tdd: Array2<f64>,
    tds: Array2<f64>,
    tsd: Array2<f64>,
    tss: Array2<f64>,
}

impl PairCov {
    /// `dx`/`sx` are the admissible difference/sum values on the first axis,
    /// `dy`/`sy` on the second; `w` is the `(m, m)` mode weight matrix
    /// (eigenvalues times any squared mollifier multipliers).
    pub fn build(dx: &[f64], sx: &[f64], dy: &[f64], sy: &[f64], w: &Array2<f64>) -> Self {
        let m = w.nrows();
        let cdx = cos_matrix(dx, m);
        let csx = cos_matrix(sx, m);
        let cdy = cos_matrix(dy, m);
        let csy = cos_matrix(sy, m);
        let wd = w.dot(&cdy.t());
        let ws = w.dot(&csy.t());
        PairCov {
            tdd: cdx.dot(&wd),
            tds: cdx.dot(&ws),
            tsd: csx.dot(&wd),
            tss: csx.dot(&ws),
        }
    }

    /// Covariance for the pair with axis-1 difference/sum indices `(di1, si1)`
    /// and axis-2 indices `(di2, si2)` into the value lists passed to `build`.
    #[inline]
    pub fn cov(&self, di1: usize, si1: usize, di2: usize, si2: usize) -> f64 {
        self.tdd[[di1, di2]] - self.tds[[di1, si2]] - self.tsd[[si1, di2]]
            + self.tss[[si1, si2]]
    }
}

/// Direct evaluation of `sum_{jk} W_{jk} phi_jk(u) phi_jk(w)` with
/// `phi_jk(x) = 2 sin(j pi x1) sin(k pi x2)`. O(m^2) per pair; the table
/// route above is preferred whenever many lattice pairs are needed.
pub fn weighted_mode_sum(
    w: &Array2<f64>,
    u: (f64, f64),
    v: (f64, f64),
) -> f64 {
    let m = w.nrows();
    let su1 = sine_vec(u.0, m);
    let su2 = sine_vec(u.1, m);
    let sv1 = sine_vec(v.0, m);
    let sv2 = sine_vec(v.1, m);
    let mut total = 0.0;
    for j in 0..m {
        let a = su1[j] * sv1[j];
        let row = w.row(j);
        let mut inner = 0.0;
        for k in 0..m {
            inner += row[k] * su2[k] * sv2[k];
        }
        total += a * inner;
    }
    4.0 * total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_cov_matches_direct_mode_sum() {
        let m = 32;
        let w = mode_weights(m, 2.0 * std::f64::consts::PI);
        // four lattice points on a toy grid
        let xs = [0.3, 0.45, 0.6];
        let n = xs.len();
        let mut dvals = Vec::new();
        let mut svals = Vec::new();
        for i in 0..n {
            for l in 0..n {
                dvals.push(xs[i] - xs[l]);
                svals.push(xs[i] + xs[l]);
            }
        }
        let pc = PairCov::build(&dvals, &svals, &dvals, &svals, &w);
        let idx = |i: usize, l: usize| i * n + l;
        for (i1, i2, l1, l2) in [(0, 1, 2, 0), (1, 1, 1, 1), (2, 0, 0, 2)] {
            let via_table = pc.cov(idx(i1, l1), idx(i1, l1), idx(i2, l2), idx(i2, l2));
            let direct = weighted_mode_sum(&w, (xs[i1], xs[i2]), (xs[l1], xs[l2]));
            assert!(
                (via_table - direct).abs() < 1e-12,
                "table {via_table} vs direct {direct}"
            );
        }
    }
}
