//! Row rescaling of the linearized least-squares system: each row of the
//! Jacobian and its residual entry are multiplied by c / max_j |J_ij| so that
//! every nonzero row has max-abs entry c. Rows that are identically zero keep
//! a factor of 1 and are logged; a collocation point can fall outside every
//! feature support, and robustness beats erroring there.

use crate::matrix::DenseMatrix;
use crate::par;

pub const DEFAULT_ROW_SCALE: f64 = 100.0;

/// Scale J and F in place; returns the per-row factors.
pub fn row_scale_in_place(j: &mut DenseMatrix, f: &mut [f64], c: f64) -> Vec<f64> {
    assert_eq!(j.rows(), f.len(), "residual length must match Jacobian rows");
    assert!(c > 0.0, "scale target must be positive");
    let n = j.cols();
    let mut lambda = vec![0.0; j.rows()];
    {
        let jr = &*j;
        par::fill_records(&mut lambda, 1, |i, out| {
            let max = jr.row(i).iter().fold(0.0f64, |a, &x| a.max(x.abs()));
            out[0] = if max > 0.0 { c / max } else { -1.0 };
        });
    }
    let zero_rows = lambda.iter().filter(|&&l| l < 0.0).count();
    if zero_rows > 0 {
        log::warn!("row_scale: {zero_rows} identically zero rows kept at lambda = 1");
        lambda.iter_mut().filter(|l| **l < 0.0).for_each(|l| *l = 1.0);
    }
    let lam = &lambda;
    par::for_each_chunk_mut(j.data_mut(), n, |i, row| {
        let l = lam[i];
        if l != 1.0 {
            row.iter_mut().for_each(|x| *x *= l);
        }
    });
    for (fi, &l) in f.iter_mut().zip(&lambda) {
        *fi *= l;
    }
    lambda
}

/// Non-destructive variant used in tests and diagnostics.
pub fn row_scale(j: &DenseMatrix, f: &[f64], c: f64) -> (DenseMatrix, Vec<f64>, Vec<f64>) {
    let mut jj = j.clone();
    let mut ff = f.to_vec();
    let lambda = row_scale_in_place(&mut jj, &mut ff, c);
    (jj, ff, lambda)
}
