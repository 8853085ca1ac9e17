//! Householder QR factorizations and triangular solves.

use crate::error::LinalgError;
use crate::matrix::{dot, DenseMatrix};
use crate::par;

/// Relative tolerance on the R diagonal below which a factor is declared
/// rank deficient.
pub const RANK_TOL: f64 = 1e-12;

/// Packed upper-triangular n x n factor with positive diagonal.
#[derive(Debug, Clone)]
pub struct UpperTriangular {
    order: usize,
    data: Vec<f64>, // row-major packed: row i holds entries (i, i..n)
}

impl UpperTriangular {
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    fn offset(&self, i: usize) -> usize {
        // start of packed row i
        i * self.order - i * (i + 1) / 2 + i
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        debug_assert!(j >= i);
        self.data[self.offset(i) + (j - i)]
    }

    /// Packed row i: entries (i, i), (i, i+1), ..., (i, n-1).
    #[inline]
    pub fn packed_row(&self, i: usize) -> &[f64] {
        let o = self.offset(i);
        &self.data[o..o + (self.order - i)]
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.order;
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                *m.at_mut(i, j) = self.at(i, j);
            }
        }
        m
    }

    fn check_rank(&self) -> Result<(), LinalgError> {
        let n = self.order;
        let mut max_d: f64 = 0.0;
        for i in 0..n {
            max_d = max_d.max(self.at(i, i).abs());
        }
        for i in 0..n {
            let d = self.at(i, i).abs();
            if d < RANK_TOL * max_d || d == 0.0 {
                return Err(LinalgError::RankDeficient { index: i, value: d });
            }
        }
        Ok(())
    }

    /// Solve R x = b by back substitution.
    pub fn solve_upper(&self, b: &[f64]) -> Vec<f64> {
        let n = self.order;
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            let row = self.packed_row(i);
            let mut s = x[i];
            for (k, &r) in row.iter().enumerate().skip(1) {
                s -= r * x[i + k];
            }
            x[i] = s / row[0];
        }
        x
    }

    /// Overwrite `row` with the solution x of x^T R = row (equivalently
    /// R^T x = row^T), written as a contiguous scatter pass.
    #[inline]
    pub fn solve_transposed_row(&self, row: &mut [f64]) {
        let n = self.order;
        debug_assert_eq!(row.len(), n);
        for i in 0..n {
            let r = self.packed_row(i);
            let xi = row[i] / r[0];
            row[i] = xi;
            if xi != 0.0 {
                for (k, &rk) in r.iter().enumerate().skip(1) {
                    row[i + k] -= rk * xi;
                }
            }
        }
    }
}

/// Thin QR of a tall matrix B (s x n, s >= n), returning R with positive
/// diagonal. Householder reflections run on the transposed storage so every
/// inner loop is contiguous; the trailing update parallelizes over columns.
pub fn thin_qr(b: &DenseMatrix) -> Result<UpperTriangular, LinalgError> {
    let s = b.rows();
    let n = b.cols();
    if s < n {
        return Err(LinalgError::DimensionMismatch(format!(
            "thin QR needs rows >= cols, got {s} x {n}"
        )));
    }
    // t holds B^T: row j of t is column j of the working matrix.
    let mut t = b.transpose();
    let mut r_packed = Vec::with_capacity(n * (n + 1) / 2 + n);
    let mut v = vec![0.0; s];

    for k in 0..n {
        // Householder vector from column k (= row k of t), entries k..s.
        let col = &t.row(k)[k..];
        let sigma = dot(col, col).sqrt();
        let alpha = if col[0] >= 0.0 { -sigma } else { sigma };
        let mut beta = 0.0;
        if sigma > 0.0 {
            let v0 = col[0] - alpha;
            v[k] = 1.0;
            let inv = 1.0 / v0;
            for (i, &c) in col.iter().enumerate().skip(1) {
                v[k + i] = c * inv;
            }
            // beta = 2 / (v^T v) with v normalized to v[k] = 1
            let vtv = 1.0 + dot(&v[k + 1..s], &v[k + 1..s]);
            beta = 2.0 / vtv;
        } else {
            v[k..s].fill(0.0);
        }

        // Apply reflector to trailing columns k+1..n (rows of t), each
        // independent, contiguous and deterministic.
        if beta != 0.0 {
            let vk = &v[k..s];
            let start = (k + 1) * s;
            par::for_each_chunk_mut(&mut t.data_mut()[start..n * s], s, |_, trow| {
                let seg = &mut trow[k..];
                let w = dot(seg, vk);
                if w != 0.0 {
                    let bw = beta * w;
                    for (x, &vv) in seg.iter_mut().zip(vk) {
                        *x -= bw * vv;
                    }
                }
            });
        }

        // Diagonal entry of R is alpha (or 0 for a zero column).
        t.row_mut(k)[k] = alpha;

        // Row k of R with the sign fixed so the diagonal is positive; the
        // flip is a diag(+-1) factor absorbed into Q.
        let flip = if alpha < 0.0 { -1.0 } else { 1.0 };
        r_packed.push(flip * alpha);
        for j in k + 1..n {
            r_packed.push(flip * t.at(j, k));
        }
    }

    let r = UpperTriangular { order: n, data: r_packed };
    r.check_rank()?;
    Ok(r)
}

/// Replace each row j of J by the solution x of x^T R = j. No second
/// m x n buffer is allocated; rows transform independently in parallel.
pub fn right_precondition_in_place(
    j: &mut DenseMatrix,
    r: &UpperTriangular,
) -> Result<(), LinalgError> {
    if j.cols() != r.order() {
        return Err(LinalgError::DimensionMismatch(format!(
            "matrix has {} cols, preconditioner order {}",
            j.cols(),
            r.order()
        )));
    }
    r.check_rank()?;
    let n = r.order();
    par::for_each_chunk_mut(j.data_mut(), n, |_, row| {
        r.solve_transposed_row(row);
    });
    Ok(())
}

/// Dense least squares min ||A x - b|| by Householder QR with implicit Q
/// application. A is consumed as a working copy.
pub fn householder_ls_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let m = a.rows();
    let n = a.cols();
    if b.len() != m {
        return Err(LinalgError::DimensionMismatch(format!(
            "rhs length {} vs {} rows",
            b.len(),
            m
        )));
    }
    if m < n {
        return Err(LinalgError::DimensionMismatch(format!(
            "least squares needs rows >= cols, got {m} x {n}"
        )));
    }
    let mut t = a.transpose(); // rows of t are columns of A
    let mut rhs = b.to_vec();
    let mut v = vec![0.0; m];
    let mut rdata = Vec::with_capacity(n * (n + 1) / 2 + n);

    for k in 0..n {
        let col = &t.row(k)[k..];
        let sigma = dot(col, col).sqrt();
        let alpha = if col[0] >= 0.0 { -sigma } else { sigma };
        let mut beta = 0.0;
        if sigma > 0.0 {
            let v0 = col[0] - alpha;
            v[k] = 1.0;
            let inv = 1.0 / v0;
            for (i, &c) in col.iter().enumerate().skip(1) {
                v[k + i] = c * inv;
            }
            beta = 2.0 / (1.0 + dot(&v[k + 1..m], &v[k + 1..m]));
        } else {
            v[k..m].fill(0.0);
        }
        if beta != 0.0 {
            let vk = &v[k..m];
            let start = (k + 1) * m;
            par::for_each_chunk_mut(&mut t.data_mut()[start..n * m], m, |_, trow| {
                let seg = &mut trow[k..];
                let w = dot(seg, vk);
                if w != 0.0 {
                    let bw = beta * w;
                    for (x, &vv) in seg.iter_mut().zip(vk) {
                        *x -= bw * vv;
                    }
                }
            });
            // rhs <- (I - beta v v^T) rhs
            let seg = &mut rhs[k..];
            let w = dot(seg, vk);
            if w != 0.0 {
                let bw = beta * w;
                for (x, &vv) in seg.iter_mut().zip(vk) {
                    *x -= bw * vv;
                }
            }
        }
        t.row_mut(k)[k] = alpha;
        rdata.push(alpha);
        for j in k + 1..n {
            rdata.push(t.at(j, k));
        }
    }
    let r = UpperTriangular { order: n, data: rdata };
    r.check_rank()?;
    Ok(r.solve_upper(&rhs[..n]))
}

/// Solve the symmetric positive definite system (G + damp I) x = rhs by
/// Cholesky factorization. G is given as a full dense symmetric matrix.
pub fn cholesky_solve(
    g: &DenseMatrix,
    damp: f64,
    rhs: &[f64],
) -> Result<Vec<f64>, LinalgError> {
    let n = g.rows();
    if g.cols() != n || rhs.len() != n {
        return Err(LinalgError::DimensionMismatch("cholesky expects square system".into()));
    }
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = g.at(i, j) + if i == j { damp } else { 0.0 };
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return Err(LinalgError::FactorizationFailure(format!(
                        "non-positive pivot {s:.3e} at {i}"
                    )));
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    // forward then backward substitution
    let mut y = rhs.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct_q(b: &DenseMatrix, r: &UpperTriangular) -> DenseMatrix {
        let mut q = b.clone();
        right_precondition_in_place(&mut q, r).unwrap();
        q
    }

    fn max_offdiag_gram_error(q: &DenseMatrix) -> f64 {
        let n = q.cols();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..q.rows() {
                    s += q.at(k, i) * q.at(k, j);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    #[test]
    fn identity_factors_to_identity() {
        let r = thin_qr(&DenseMatrix::identity(3)).unwrap();
        for i in 0..3 {
            for j in i..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((r.at(i, j) - e).abs() < 1e-15);
            }
        }
    }

    // Oracle: Gram-Schmidt by hand on the two columns gives R = [[5,0],[0,1]].
    #[test]
    fn hand_gram_schmidt_case() {
        let b = DenseMatrix::from_rows(&[vec![3.0, 0.0], vec![4.0, 0.0], vec![0.0, 1.0]]);
        let r = thin_qr(&b).unwrap();
        assert!((r.at(0, 0) - 5.0).abs() < 1e-14);
        assert!(r.at(0, 1).abs() < 1e-14);
        assert!((r.at(1, 1) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn duplicated_column_is_rank_deficient() {
        let b = DenseMatrix::from_rows(&[
            vec![1.0, 1.0, 2.0],
            vec![2.0, 2.0, -1.0],
            vec![3.0, 3.0, 0.5],
            vec![-1.0, -1.0, 4.0],
        ]);
        match thin_qr(&b) {
            Err(LinalgError::RankDeficient { .. }) => {}
            other => panic!("expected RankDeficient, got {other:?}"),
        }
    }

    #[test]
    fn qr_reconstruction_and_orthonormality() {
        let m = 80;
        let n = 12;
        let mut data = vec![0.0; m * n];
        for (i, v) in data.iter_mut().enumerate() {
            *v = crate::rng::symmetric_f64(99, i as u64, 1.0);
        }
        let b = DenseMatrix::from_vec(m, n, data);
        let r = thin_qr(&b).unwrap();
        for i in 0..n {
            assert!(r.at(i, i) > 0.0, "diagonal must be positive");
        }
        let q = reconstruct_q(&b, &r);
        assert!(max_offdiag_gram_error(&q) <= 1e-12);
        // Q R must reproduce B.
        let scale = b.max_abs();
        for i in 0..m {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..=j {
                    s += q.at(i, k) * r.at(k, j);
                }
                assert!((s - b.at(i, j)).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn right_precondition_identity_and_diagonal() {
        let mut j = DenseMatrix::from_rows(&[vec![2.0, 2.0]]);
        let r = thin_qr(&DenseMatrix::identity(2)).unwrap();
        right_precondition_in_place(&mut j, &r).unwrap();
        assert_eq!(j.row(0), &[2.0, 2.0]);

        let diag = UpperTriangular { order: 2, data: vec![2.0, 0.0, 1.0] };
        let mut j = DenseMatrix::from_rows(&[vec![2.0, 2.0]]);
        right_precondition_in_place(&mut j, &diag).unwrap();
        assert_eq!(j.row(0), &[1.0, 2.0]);
    }

    #[test]
    fn upper_solve_matches_substitution() {
        let r = UpperTriangular { order: 3, data: vec![2.0, 1.0, -1.0, 4.0, 0.5, 3.0] };
        // R = [[2,1,-1],[0,4,0.5],[0,0,3]]
        let x = r.solve_upper(&[1.0, 2.0, 3.0]);
        let b0 = 2.0 * x[0] + x[1] - x[2];
        let b1 = 4.0 * x[1] + 0.5 * x[2];
        let b2 = 3.0 * x[2];
        assert!((b0 - 1.0).abs() < 1e-14);
        assert!((b1 - 2.0).abs() < 1e-14);
        assert!((b2 - 3.0).abs() < 1e-14);
    }

    #[test]
    fn ls_solve_matches_normal_equations() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ]);
        let x = householder_ls_solve(&a, &[1.0, 1.0, 1.0]).unwrap();
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((x[1] - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn cholesky_solves_spd() {
        // G = A^T A for A = [[2,1],[0,3]], G = [[4,2],[2,10]]
        let g = DenseMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 10.0]]);
        let x = cholesky_solve(&g, 0.0, &[6.0, 12.0]).unwrap();
        assert!((4.0 * x[0] + 2.0 * x[1] - 6.0).abs() < 1e-12);
        assert!((2.0 * x[0] + 10.0 * x[1] - 12.0).abs() < 1e-12);
        let bad = DenseMatrix::from_rows(&[vec![1.0, 4.0], vec![4.0, 1.0]]);
        assert!(matches!(
            cholesky_solve(&bad, 0.0, &[1.0, 1.0]),
            Err(LinalgError::FactorizationFailure(_))
        ));
    }
}
