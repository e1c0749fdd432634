//! Conic-hull checks for polyhedral generator sets.
//!
//! `coni(W)` is a linear subspace exactly when every `-w_i` is itself a
//! nonnegative combination of `W`; that subspace is then `span(W)`. Each test
//! is one nonnegative least-squares solve.

use nalgebra::{DMatrix, DVector};

use crate::consts::CONIC_TOL;

/// Lawson–Hanson active-set NNLS: `argmin ‖A a - b‖` subject to `a >= 0`.
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-12 * (1.0 + a.amax() * b.amax());
    let mut outer = 0;

    loop {
        let w = a.transpose() * (b - a * &x);
        let next = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = next else { break };
        passive[j] = true;

        for _ in 0..3 * n + 3 {
            let s = solve_passive(a, b, &passive);
            if (0..n).all(|k| !passive[k] || s[k] > 0.0) {
                x = s;
                break;
            }
            let mut alpha = f64::INFINITY;
            for k in 0..n {
                if passive[k] && s[k] <= 0.0 {
                    let denom = x[k] - s[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[k] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            x += (s - &x) * alpha;
            for k in 0..n {
                if passive[k] && x[k] <= tol {
                    passive[k] = false;
                    x[k] = 0.0;
                }
            }
        }

        outer += 1;
        if outer > 3 * n + 3 {
            break;
        }
    }
    x
}

/// Unconstrained least squares restricted to the passive columns.
fn solve_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..a.ncols()).filter(|&k| passive[k]).collect();
    let sub = a.select_columns(&cols);
    let sol = sub
        .svd(true, true)
        .solve(b, 1e-12)
        .unwrap_or_else(|_| DVector::zeros(cols.len()));
    let mut full = DVector::zeros(a.ncols());
    for (i, &k) in cols.iter().enumerate() {
        full[k] = sol[i];
    }
    full
}

/// Generator matrix with one column per generator.
pub(crate) fn generator_matrix(generators: &[Vec<f64>]) -> DMatrix<f64> {
    let dim = generators[0].len();
    DMatrix::from_fn(dim, generators.len(), |r, c| generators[c][r])
}

/// True iff `coni(W) = span(W)`.
pub(crate) fn cone_is_subspace(generators: &[Vec<f64>]) -> bool {
    let a = generator_matrix(generators);
    generators.iter().all(|w| {
        let target = -DVector::from_column_slice(w);
        let coeffs = nnls(&a, &target);
        let residual = (&a * coeffs - &target).norm();
        residual <= CONIC_TOL * (1.0 + target.norm())
    })
}

/// Orthonormal basis of `span(W)`, one vector per nonzero singular value.
pub(crate) fn span_basis(generators: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let a = generator_matrix(generators);
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let cut = 1e-10 * smax.max(1e-300);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > cut)
        .map(|(k, _)| u.column(k).iter().copied().collect())
        .collect()
}
