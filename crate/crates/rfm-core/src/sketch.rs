//! Count-sketch compression of tall matrices.
//!
//! A count sketch maps m rows to s buckets with random signs; applying it to
//! a matrix costs one pass over the entries and the sketch matrix itself is
//! never materialized. Bucket and sign assignments come from the
//! counter-based generator in [`crate::rng`], so a plan is a pure function of
//! `(seed, m, s)`.

use crate::error::LinalgError;
use crate::matrix::DenseMatrix;
use crate::{par, rng};

/// Signed bucket assignment for compressing m rows down to s.
#[derive(Debug, Clone)]
pub struct SketchPlan {
    input_rows: usize,
    output_rows: usize,
    bucket: Vec<u32>,
    sign: Vec<f64>,
    seed: u64,
    // rows grouped by bucket (ascending within each bucket) so the scatter
    // can run bucket-parallel with a fixed reduction order
    bucket_starts: Vec<u32>,
    bucket_rows: Vec<u32>,
}

impl SketchPlan {
    /// Draw a fresh plan with `s = ceil(gamma * n)` output rows.
    pub fn new(m: usize, n: usize, gamma: f64, seed: u64) -> Result<Self, LinalgError> {
        assert!(m >= 1 && n >= 1, "empty sketch dimensions");
        assert!(gamma > 1.0, "oversampling factor must exceed 1");
        let s = (gamma * n as f64).ceil() as usize;
        if m < s {
            return Err(LinalgError::SketchTooWide { m, s });
        }
        let key = rng::derive_key(seed, SKETCH_TAG);
        let mut bucket = Vec::with_capacity(m);
        let mut sign = Vec::with_capacity(m);
        for i in 0..m {
            let w = rng::word(key, i as u64);
            bucket.push((w % s as u64) as u32);
            sign.push(if rng::word(key, (m + i) as u64) & 1 == 0 { 1.0 } else { -1.0 });
        }
        Ok(Self::from_parts(m, s, bucket, sign, seed))
    }

    /// Build a plan from explicit bucket/sign assignments (tests, fixtures).
    pub fn from_parts(m: usize, s: usize, bucket: Vec<u32>, sign: Vec<f64>, seed: u64) -> Self {
        assert_eq!(bucket.len(), m);
        assert_eq!(sign.len(), m);
        assert!(bucket.iter().all(|&b| (b as usize) < s));
        let mut counts = vec![0u32; s + 1];
        for &b in &bucket {
            counts[b as usize + 1] += 1;
        }
        for b in 0..s {
            counts[b + 1] += counts[b];
        }
        let bucket_starts = counts.clone();
        let mut cursor = counts;
        let mut bucket_rows = vec![0u32; m];
        for (i, &b) in bucket.iter().enumerate() {
            bucket_rows[cursor[b as usize] as usize] = i as u32;
            cursor[b as usize] += 1;
        }
        Self { input_rows: m, output_rows: s, bucket, sign, seed, bucket_starts, bucket_rows }
    }

    pub fn input_rows(&self) -> usize {
        self.input_rows
    }

    pub fn output_rows(&self) -> usize {
        self.output_rows
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bucket(&self) -> &[u32] {
        &self.bucket
    }

    pub fn sign(&self) -> &[f64] {
        &self.sign
    }

    /// B = S J: each output row b is the signed sum of the input rows hashed
    /// to bucket b, accumulated in ascending row order.
    pub fn apply(&self, j: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        if j.rows() != self.input_rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "sketch expects {} rows, matrix has {}",
                self.input_rows,
                j.rows()
            )));
        }
        let n = j.cols();
        let mut out = DenseMatrix::zeros(self.output_rows, n);
        let starts = &self.bucket_starts;
        let rows = &self.bucket_rows;
        let sign = &self.sign;
        par::fill_records(out.data_mut(), n, |b, dst| {
            let lo = starts[b] as usize;
            let hi = starts[b + 1] as usize;
            for &i in &rows[lo..hi] {
                let s = sign[i as usize];
                let src = j.row(i as usize);
                for (d, &v) in dst.iter_mut().zip(src) {
                    *d += s * v;
                }
            }
        });
        Ok(out)
    }

    /// Sketch a single vector (a one-column matrix without the wrapping).
    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.input_rows);
        let mut out = vec![0.0; self.output_rows];
        for b in 0..self.output_rows {
            let lo = self.bucket_starts[b] as usize;
            let hi = self.bucket_starts[b + 1] as usize;
            for &i in &self.bucket_rows[lo..hi] {
                out[b] += self.sign[i as usize] * x[i as usize];
            }
        }
        out
    }
}

const SKETCH_TAG: u64 = 0x736b_6574_6368; // ascii "sketch"

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_dimensions_and_determinism() {
        let p = SketchPlan::new(100, 10, 3.0, 7).unwrap();
        assert_eq!(p.output_rows(), 30);
        let q = SketchPlan::new(100, 10, 3.0, 7).unwrap();
        assert_eq!(p.bucket(), q.bucket());
        assert_eq!(p.sign(), q.sign());
        let r = SketchPlan::new(100, 10, 3.0, 8).unwrap();
        assert_ne!(p.bucket(), r.bucket());
    }

    #[test]
    fn tiny_plan_ranges() {
        let p = SketchPlan::new(4, 1, 2.0, 0).unwrap();
        assert_eq!(p.output_rows(), 2);
        assert!(p.bucket().iter().all(|&b| b < 2));
        assert!(p.sign().iter().all(|&s| s == 1.0 || s == -1.0));
    }

    #[test]
    fn too_wide_is_an_error() {
        match SketchPlan::new(5, 3, 3.0, 0) {
            Err(LinalgError::SketchTooWide { m: 5, s: 9 }) => {}
            other => panic!("expected SketchTooWide, got {other:?}"),
        }
    }

    #[test]
    fn identity_sketch_passes_through() {
        let m = 6;
        let plan =
            SketchPlan::from_parts(m, m, (0..m as u32).collect(), vec![1.0; m], 0);
        let j = DenseMatrix::from_rows(&[
            vec![1.0, 2.0],
            vec![3.0, 4.0],
            vec![5.0, 6.0],
            vec![7.0, 8.0],
            vec![-1.0, 0.5],
            vec![0.0, 9.0],
        ]);
        assert_eq!(plan.apply(&j).unwrap(), j);
    }

    // Oracle: explicit 2x4 sign matrix times the 4x4 identity.
    #[test]
    fn explicit_scatter_matches_dense_sketch() {
        let plan = SketchPlan::from_parts(
            4,
            2,
            vec![0, 1, 0, 1],
            vec![1.0, -1.0, 1.0, 1.0],
            0,
        );
        let b = plan.apply(&DenseMatrix::identity(4)).unwrap();
        let expect = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 1.0, 0.0],
            vec![0.0, -1.0, 0.0, 1.0],
        ]);
        assert_eq!(b, expect);
    }

    #[test]
    fn isometry_in_expectation() {
        // Fixed vector, 200 fixed seeds: mean of ||Sx||^2 within 5% of ||x||^2.
        let m = 60;
        let x: Vec<f64> = (0..m).map(|i| ((i * 37 + 11) % 19) as f64 / 7.0 - 1.0).collect();
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let mut mean = 0.0;
        for seed in 0..200u64 {
            let plan = SketchPlan::new(m, 10, 2.0, seed).unwrap();
            let sx = plan.apply_vec(&x);
            mean += sx.iter().map(|v| v * v).sum::<f64>();
        }
        mean /= 200.0;
        assert!(
            (mean - xx).abs() <= 0.05 * xx,
            "mean {mean} vs ||x||^2 {xx}"
        );
    }

    #[test]
    fn sketch_is_linear() {
        let m = 40;
        let n = 6;
        let mk = |key: u64| {
            let mut d = vec![0.0; m * n];
            for (i, v) in d.iter_mut().enumerate() {
                *v = crate::rng::symmetric_f64(key, i as u64, 1.0);
            }
            DenseMatrix::from_vec(m, n, d)
        };
        let j1 = mk(1);
        let j2 = mk(2);
        let (a, b) = (0.7, -1.3);
        let mut combo = DenseMatrix::zeros(m, n);
        for i in 0..m * n {
            combo.data_mut()[i] = a * j1.data()[i] + b * j2.data()[i];
        }
        let plan = SketchPlan::new(m, n, 2.0, 5).unwrap();
        let lhs = plan.apply(&combo).unwrap();
        let s1 = plan.apply(&j1).unwrap();
        let s2 = plan.apply(&j2).unwrap();
        let scale = lhs.max_abs().max(1.0);
        for i in 0..lhs.data().len() {
            let rhs = a * s1.data()[i] + b * s2.data()[i];
            assert!((lhs.data()[i] - rhs).abs() <= 1e-13 * scale);
        }
    }
}
