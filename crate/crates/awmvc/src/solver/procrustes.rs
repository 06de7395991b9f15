//! Trace maximization over row-orthonormal matrices, the kernel shared by
//! the consensus, rotation, and coefficient updates.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Maximum implicit-QL iterations granted to the SVD before reporting a
/// numeric failure. The bidiagonal problems here are tiny (at most the
/// largest embedding dimension), so convergence takes far fewer.
const SVD_MAX_ITERS: usize = 2048;

/// Solves `max trace(Q * a)` subject to `Q Qᵀ = I`, where `a` is
/// `n_rows × n_cols` with `n_cols <= n_rows` and `Q` is `n_cols × n_rows`.
///
/// With the thin SVD `a = U Σ Vᵀ` the maximizer is `Q = V Uᵀ`, and the
/// attained value `trace(Q a) = trace(V Σ Vᵀ)` is the nuclear norm of `a`.
/// Rank-deficient inputs are accepted; the SVD-derived solution is one of
/// the (then non-unique) maximizers.
pub fn procrustes_max_trace_rows(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.ncols() > a.nrows() {
        return Err(Error::validation(format!(
            "trace maximization needs a tall input, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if !a.iter().all(|x| x.is_finite()) {
        return Err(Error::numeric("non-finite entries in trace-maximization input"));
    }
    let svd = nalgebra::linalg::SVD::try_new(a.clone(), true, true, f64::EPSILON, SVD_MAX_ITERS)
        .ok_or_else(|| Error::numeric("svd did not converge"))?;
    let u = svd.u.expect("svd computed with u");
    let v_t = svd.v_t.expect("svd computed with v_t");
    debug_assert_eq!(u.ncols(), a.ncols(), "thin svd expected");
    Ok(v_t.transpose() * u.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn trace_product(q: &DMatrix<f64>, a: &DMatrix<f64>) -> f64 {
        (q * a).trace()
    }

    fn assert_row_orthonormal(q: &DMatrix<f64>, tol: f64) {
        let gram = q * q.transpose();
        let eye = DMatrix::identity(q.nrows(), q.nrows());
        let err = (gram - eye).norm();
        assert!(err <= tol, "rows are not orthonormal: deviation {err}");
    }

    #[test]
    fn identity_input_returns_identity() {
        let a = DMatrix::identity(3, 3);
        let q = procrustes_max_trace_rows(&a).unwrap();
        assert!((&q - DMatrix::identity(3, 3)).norm() <= 1e-12);
        assert!((trace_product(&q, &a) - 3.0).abs() <= 1e-12);
    }

    #[test]
    fn positive_diagonal_input_returns_identity() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.5]));
        let q = procrustes_max_trace_rows(&a).unwrap();
        assert!((&q - DMatrix::identity(2, 2)).norm() <= 1e-12);
        assert!((trace_product(&q, &a) - 2.5).abs() <= 1e-12);
    }

    #[test]
    fn attains_nuclear_norm_and_dominates_sampled_feasible_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let a = oracles::random_matrix(6, 2, &mut rng);
        let q = procrustes_max_trace_rows(&a).unwrap();
        assert_row_orthonormal(&q, 1e-10);
        let best = trace_product(&q, &a);
        let nuclear = oracles::jacobi_singular_values(&a).iter().sum::<f64>();
        assert!(
            (best - nuclear).abs() <= 1e-10,
            "trace {best} vs nuclear norm {nuclear}"
        );
        for _ in 0..1000 {
            let r = oracles::random_row_orthonormal(2, 6, &mut rng);
            assert!(trace_product(&r, &a) <= best + 1e-10);
        }
    }

    #[test]
    fn zero_matrix_still_yields_orthonormal_rows() {
        let a = DMatrix::zeros(5, 3);
        let q = procrustes_max_trace_rows(&a).unwrap();
        assert_eq!(q.shape(), (3, 5));
        assert_row_orthonormal(&q, 1e-12);
    }

    #[test]
    fn wide_input_is_rejected() {
        let a = DMatrix::zeros(2, 4);
        assert!(matches!(
            procrustes_max_trace_rows(&a),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut a = DMatrix::zeros(3, 2);
        a[(0, 0)] = f64::INFINITY;
        assert!(matches!(
            procrustes_max_trace_rows(&a),
            Err(Error::Numeric(_))
        ));
    }
}
