//! One-sided Jacobi singular value decomposition for the small dense
//! matrices this crate works with (at most a handful of columns).
//! Jacobi rotations orthogonalize column pairs until convergence, which
//! keeps the factorization backward stable and the small singular
//! values accurate enough for rank decisions at tight relative cutoffs.

use nalgebra::{DMatrix, DVector};

/// Thin SVD of a tall matrix: `a = u * diag(singular_values) * vᵀ`
/// with `u` m×k column-orthonormal, `v` k×k orthogonal, and the
/// singular values sorted in decreasing order.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
}

const MAX_SWEEPS: usize = 64;

/// Compute the thin SVD of `a` (requires rows >= columns).
pub fn thin_svd(a: &DMatrix<f64>) -> ThinSvd {
    let (m, k) = (a.nrows(), a.ncols());
    assert!(m >= k, "thin_svd expects a tall matrix, got {m}x{k}");
    let mut w = a.clone();
    let mut v = DMatrix::<f64>::identity(k, k);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let col_p = w.column(p);
                let col_q = w.column(q);
                let app = col_p.dot(&col_p);
                let aqq = col_q.dot(&col_q);
                let apq = col_p.dot(&col_q);
                if apq == 0.0 || apq.abs() <= f64::EPSILON * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = c * wp - s * wq;
                    w[(i, q)] = s * wp + c * wq;
                }
                for i in 0..k {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..k).collect();
    let norms: Vec<f64> = (0..k).map(|j| w.column(j).norm()).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).expect("finite norms"));

    let mut u = DMatrix::zeros(m, k);
    let mut v_sorted = DMatrix::zeros(k, k);
    let mut singular_values = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        singular_values.push(sigma);
        if sigma > 0.0 {
            let scaled = w.column(src) / sigma;
            u.column_mut(dst).copy_from(&scaled);
        }
        v_sorted.column_mut(dst).copy_from(&v.column(src));
    }
    ThinSvd {
        u,
        singular_values,
        v: v_sorted,
    }
}

/// Singular values of any matrix, sorted in decreasing order. Wide
/// matrices are handled through their transpose.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() >= a.ncols() {
        thin_svd(a).singular_values
    } else {
        thin_svd(&a.transpose()).singular_values
    }
}

/// Minimum-norm least squares via the pseudo-inverse: singular values
/// at or below `rel_cutoff * sigma_max` are treated as zero. Returns
/// the solution and the residual norm `|a·x - b|`.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>, rel_cutoff: f64) -> (DVector<f64>, f64) {
    let svd = thin_svd(a);
    let sigma_max = svd.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = rel_cutoff * sigma_max;
    let k = svd.singular_values.len();
    let uty = svd.u.transpose() * b;
    let mut y = DVector::zeros(k);
    for i in 0..k {
        if svd.singular_values[i] > cutoff {
            y[i] = uty[i] / svd.singular_values[i];
        }
    }
    let x = &svd.v * y;
    let residual = (a * &x - b).norm();
    (x, residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn factorization_error(a: &DMatrix<f64>, svd: &ThinSvd) -> f64 {
        let k = svd.singular_values.len();
        let mut s = DMatrix::zeros(k, k);
        for i in 0..k {
            s[(i, i)] = svd.singular_values[i];
        }
        (&svd.u * s * svd.v.transpose() - a).norm()
    }

    #[test]
    fn diagonal_matrix_has_its_entries_as_singular_values() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 2.0, 0.5]));
        let sv = singular_values(&a);
        assert_eq!(sv, vec![3.0, 2.0, 1.0, 0.5]);
    }

    #[test]
    fn zero_matrix_has_zero_singular_values() {
        let a = DMatrix::<f64>::zeros(6, 3);
        let sv = singular_values(&a);
        assert_eq!(sv, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn factorization_is_backward_stable_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..200 {
            let m = 4 + trial % 9;
            let a: DMatrix<f64> = DMatrix::from_fn(m, 4, |_, _| rng.random_range(-1.0..=1.0));
            let svd = thin_svd(&a);
            let err = factorization_error(&a, &svd);
            assert!(err <= 1e-13 * a.norm().max(1.0), "trial {trial}: {err:.3e}");
            let gram_u = svd.u.transpose() * &svd.u;
            let gram_v = svd.v.transpose() * &svd.v;
            assert!((gram_u - DMatrix::<f64>::identity(4, 4)).amax() < 1e-13);
            assert!((gram_v - DMatrix::<f64>::identity(4, 4)).amax() < 1e-13);
        }
    }

    #[test]
    fn spread_spectra_are_recovered_accurately() {
        // Matrices with singular values spanning six orders of
        // magnitude, built from exact rotations.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..50 {
            let spectrum = [1.4e3, 5.0, 1.7, 2.0e-3];
            let left: DMatrix<f64> = random_orthogonal(&mut rng, 8);
            let right: DMatrix<f64> = random_orthogonal(&mut rng, 4);
            let mut core = DMatrix::zeros(8, 4);
            for i in 0..4 {
                core[(i, i)] = spectrum[i];
            }
            let a = &left * core * right.transpose();
            let sv = singular_values(&a);
            for (got, want) in sv.iter().zip(spectrum.iter()) {
                assert_relative_eq!(got, want, max_relative = 1e-9);
                // Rank decisions only need accuracy relative to the
                // largest singular value.
                assert!((got - want).abs() <= 1e-12 * spectrum[0]);
            }
            let svd = thin_svd(&a);
            let err = factorization_error(&a, &svd);
            assert!(err <= 1e-12 * a.norm(), "trial {trial}: {err:.3e}");
        }
    }

    #[test]
    fn least_squares_solves_consistent_systems_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let a: DMatrix<f64> = DMatrix::from_fn(7, 4, |_, _| rng.random_range(-1.0..=1.0));
            let x_true: DVector<f64> = DVector::from_fn(4, |_, _| rng.random_range(-1.0..=1.0));
            let b = &a * &x_true;
            let (x, residual) = least_squares(&a, &b, 1e-12);
            assert!(residual <= 1e-12 * b.norm());
            assert!((x - x_true).norm() < 1e-10);
        }
    }

    #[test]
    fn least_squares_handles_rank_deficiency() {
        // Two identical columns: the minimum-norm solution splits the
        // weight between them and the residual stays zero.
        let a = DMatrix::from_row_slice(
            4,
            2,
            &[
                1.0, 1.0, //
                2.0, 2.0, //
                3.0, 3.0, //
                4.0, 4.0,
            ],
        );
        let b = DVector::from_vec(vec![2.0, 4.0, 6.0, 8.0]);
        let (x, residual) = least_squares(&a, &b, 1e-9);
        assert!(residual < 1e-12);
        assert_relative_eq!(x[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(x[1], 1.0, max_relative = 1e-12);
    }

    fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        // QR of a random matrix gives a Haar-ish orthogonal factor.
        let a: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0));
        let qr = a.qr();
        qr.q()
    }
}
