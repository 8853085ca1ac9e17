//! LSQR: iterative least squares via Golub-Kahan bidiagonalization.

use crate::matrix::{norm2, LinearOperator};

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsqrTermination {
    ToleranceMet,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct LsqrResult {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub final_relative_residual: f64,
    pub termination: LsqrTermination,
}

/// Approximately minimize ||A y - b||_2. Stops when the standard residual
/// tests with atol = btol = eta pass, or after `max_iter` iterations.
pub fn lsqr<A: LinearOperator>(a: &A, b: &[f64], eta: f64, max_iter: usize) -> LsqrResult {
    assert!(eta > 0.0, "eta must be positive");
    assert_eq!(b.len(), a.rows(), "rhs length must match operator rows");
    let m = a.rows();
    let n = a.cols();
    let atol = eta;
    let btol = eta;

    let mut x = vec![0.0; n];
    let beta0 = norm2(b);
    if beta0 == 0.0 {
        return LsqrResult {
            solution: x,
            iterations: 0,
            final_relative_residual: 0.0,
            termination: LsqrTermination::ToleranceMet,
        };
    }

    let mut u: Vec<f64> = b.iter().map(|v| v / beta0).collect();
    let mut v = vec![0.0; n];
    a.apply_transpose(&u, &mut v);
    let mut alpha = norm2(&v);
    if alpha > 0.0 {
        v.iter_mut().for_each(|t| *t /= alpha);
    }
    let mut w = v.clone();
    let mut phibar = beta0;
    let mut rhobar = alpha;
    let mut norm_a_sq = alpha * alpha;
    let mut scratch_m = vec![0.0; m];
    let mut scratch_n = vec![0.0; n];

    let mut iterations = 0;
    let mut termination = LsqrTermination::MaxIterations;
    let mut norm_r = beta0;

    // Rhs orthogonal to range(A): x = 0 already optimal.
    if alpha == 0.0 {
        return LsqrResult {
            solution: x,
            iterations: 0,
            final_relative_residual: 1.0,
            termination: LsqrTermination::ToleranceMet,
        };
    }

    for it in 1..=max_iter {
        iterations = it;

        // u <- A v - alpha u, beta = ||u||
        a.apply(&v, &mut scratch_m);
        for i in 0..m {
            u[i] = scratch_m[i] - alpha * u[i];
        }
        let beta = norm2(&u);
        if beta > 0.0 {
            u.iter_mut().for_each(|t| *t /= beta);
        }

        // v <- A^T u - beta v, alpha = ||v||
        a.apply_transpose(&u, &mut scratch_n);
        for i in 0..n {
            v[i] = scratch_n[i] - beta * v[i];
        }
        alpha = norm2(&v);
        if alpha > 0.0 {
            v.iter_mut().for_each(|t| *t /= alpha);
        }

        norm_a_sq += alpha * alpha + beta * beta;

        // Plane rotation to eliminate beta from the bidiagonal factor.
        let rho = (rhobar * rhobar + beta * beta).sqrt();
        let c = rhobar / rho;
        let s = beta / rho;
        let theta = s * alpha;
        rhobar = -c * alpha;
        let phi = c * phibar;
        phibar *= s;

        let t1 = phi / rho;
        let t2 = -theta / rho;
        for i in 0..n {
            x[i] += t1 * w[i];
            w[i] = v[i] + t2 * w[i];
        }

        norm_r = phibar;
        let norm_ar = phibar * alpha * c.abs();
        let norm_a = norm_a_sq.sqrt();
        let norm_x = norm2(&x);

        let test1 = norm_r <= btol * beta0 + atol * norm_a * norm_x;
        let test2 = if norm_r > 0.0 { norm_ar / (norm_a * norm_r) <= atol } else { true };
        if test1 || test2 || alpha == 0.0 || beta == 0.0 {
            termination = LsqrTermination::ToleranceMet;
            break;
        }
    }

    LsqrResult {
        solution: x,
        iterations,
        final_relative_residual: norm_r / beta0,
        termination,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;
    use crate::qr::householder_ls_solve;

    #[test]
    fn identity_system() {
        let a = DenseMatrix::identity(3);
        let r = lsqr(&a, &[1.0, 2.0, 3.0], 1e-12, 10);
        assert!(r.iterations <= 2);
        for (got, want) in r.solution.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-10);
        }
        assert_eq!(r.termination, LsqrTermination::ToleranceMet);
    }

    // Oracle: normal equations by hand give y = (2/3, 2/3).
    #[test]
    fn overdetermined_hand_case() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]);
        let r = lsqr(&a, &[1.0, 1.0, 1.0], 1e-12, 20);
        assert!((r.solution[0] - 2.0 / 3.0).abs() < 1e-10);
        assert!((r.solution[1] - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn zero_rhs_stops_immediately() {
        let a = DenseMatrix::identity(4);
        let r = lsqr(&a, &[0.0; 4], 1e-10, 10);
        assert_eq!(r.iterations, 0);
        assert!(r.solution.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn max_iterations_is_reported() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 0.9],
            vec![0.9, 1.0],
            vec![0.5, 0.1],
        ]);
        let r = lsqr(&a, &[1.0, -1.0, 0.3], 1e-15, 1);
        assert_eq!(r.termination, LsqrTermination::MaxIterations);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn agrees_with_qr_least_squares() {
        let m = 50;
        let n = 8;
        let mut data = vec![0.0; m * n];
        for (i, v) in data.iter_mut().enumerate() {
            *v = crate::rng::symmetric_f64(4, i as u64, 1.0);
        }
        let a = DenseMatrix::from_vec(m, n, data);
        let b: Vec<f64> = (0..m).map(|i| crate::rng::symmetric_f64(5, i as u64, 1.0)).collect();
        let direct = householder_ls_solve(&a, &b).unwrap();
        let iter = lsqr(&a, &b, 1e-13, 2 * n);
        let scale = norm2(&direct).max(1e-30);
        let mut diff = 0.0f64;
        for i in 0..n {
            diff += (direct[i] - iter.solution[i]).powi(2);
        }
        assert!(diff.sqrt() / scale < 1e-8, "relative diff {}", diff.sqrt() / scale);
    }
}
