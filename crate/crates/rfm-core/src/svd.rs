//! Singular values via one-sided Jacobi rotations. Test-scale utility for
//! measuring condition numbers; not on any hot path.

use crate::error::LinalgError;
use crate::matrix::DenseMatrix;

/// Full set of singular values of a tall matrix (rows >= cols).
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>, LinalgError> {
    let m = a.rows();
    let n = a.cols();
    if m < n {
        return Err(LinalgError::DimensionMismatch(format!(
            "singular_values expects rows >= cols, got {m} x {n}"
        )));
    }
    // Work on the transpose so each column of A is a contiguous row.
    let mut w = a.transpose();
    let tol = 1e-15;
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (app, aqq, apq) = {
                    let (cp, cq) = column_pair(&w, p, q, m);
                    let mut app = 0.0;
                    let mut aqq = 0.0;
                    let mut apq = 0.0;
                    for i in 0..m {
                        app += cp[i] * cp[i];
                        aqq += cq[i] * cq[i];
                        apq += cp[i] * cq[i];
                    }
                    (app, aqq, apq)
                };
                if apq.abs() <= tol * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (cp, cq) = column_pair_mut(&mut w, p, q, m);
                for i in 0..m {
                    let xp = cp[i];
                    let xq = cq[i];
                    cp[i] = c * xp - s * xq;
                    cq[i] = s * xp + c * xq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n)
        .map(|p| {
            let row = w.row(p);
            row.iter().map(|x| x * x).sum::<f64>().sqrt()
        })
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(sv)
}

fn column_pair<'a>(w: &'a DenseMatrix, p: usize, q: usize, m: usize) -> (&'a [f64], &'a [f64]) {
    debug_assert!(p < q);
    let (head, tail) = w.data().split_at(q * m);
    (&head[p * m..p * m + m], &tail[..m])
}

fn column_pair_mut<'a>(
    w: &'a mut DenseMatrix,
    p: usize,
    q: usize,
    m: usize,
) -> (&'a mut [f64], &'a mut [f64]) {
    debug_assert!(p < q);
    let (head, tail) = w.data_mut().split_at_mut(q * m);
    (&mut head[p * m..p * m + m], &mut tail[..m])
}

/// Condition number sigma_max / sigma_min of a full-column-rank tall matrix.
pub fn estimate_condition(a: &DenseMatrix) -> Result<f64, LinalgError> {
    let sv = singular_values(a)?;
    let smax = sv[0];
    let smin = *sv.last().unwrap();
    if smin <= 0.0 || smin < 1e-300 * smax {
        return Err(LinalgError::RankDeficient { index: sv.len() - 1, value: smin });
    }
    Ok(smax / smin)
}
