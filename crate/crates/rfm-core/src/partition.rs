//! Uniform tiling of a bounding box into hyperrectangular subdomains.

use crate::error::RfmError;

/// Maximum number of coordinates (space plus optional time).
pub const MAX_DIM: usize = 3;

/// One subdomain: a closed hyperrectangle described by center and half-width.
#[derive(Debug, Clone)]
pub struct Subdomain {
    pub center: [f64; MAX_DIM],
    pub half_width: [f64; MAX_DIM],
}

impl Subdomain {
    pub fn lo(&self, axis: usize) -> f64 {
        self.center[axis] - self.half_width[axis]
    }

    pub fn hi(&self, axis: usize) -> f64 {
        self.center[axis] + self.half_width[axis]
    }
}

/// Uniform partition of a box into `counts[0] * counts[1] * ...` subdomains,
/// adjacent tiles sharing endpoints exactly.
#[derive(Debug, Clone)]
pub struct Partition {
    dim: usize,
    bounds: [[f64; 2]; MAX_DIM],
    counts: [usize; MAX_DIM],
    subdomains: Vec<Subdomain>,
}

impl Partition {
    pub fn new(bounds: &[[f64; 2]], counts: &[usize]) -> Result<Self, RfmError> {
        let dim = bounds.len();
        assert!(dim >= 1 && dim <= MAX_DIM, "dimension must be 1..=3");
        assert_eq!(counts.len(), dim);
        let mut b = [[0.0, 1.0]; MAX_DIM];
        let mut c = [1usize; MAX_DIM];
        for (i, (bb, cc)) in bounds.iter().zip(counts).enumerate() {
            if !(bb[0] < bb[1]) {
                return Err(RfmError::EmptyInterval(i));
            }
            if *cc < 1 {
                return Err(RfmError::EmptyInterval(i));
            }
            b[i] = *bb;
            c[i] = *cc;
        }
        let total: usize = c[..dim].iter().product();
        let mut subdomains = Vec::with_capacity(total);
        for flat in 0..total {
            let idx = Self::unflatten(flat, &c, dim);
            let mut center = [0.0; MAX_DIM];
            let mut half = [0.0; MAX_DIM];
            for a in 0..dim {
                let w = (b[a][1] - b[a][0]) / c[a] as f64;
                let lo = b[a][0] + idx[a] as f64 * w;
                center[a] = lo + 0.5 * w;
                half[a] = 0.5 * w;
            }
            subdomains.push(Subdomain { center, half_width: half });
        }
        Ok(Self { dim, bounds: b, counts: c, subdomains })
    }

    fn unflatten(mut flat: usize, counts: &[usize; MAX_DIM], dim: usize) -> [usize; MAX_DIM] {
        let mut idx = [0usize; MAX_DIM];
        for a in (0..dim).rev() {
            idx[a] = flat % counts[a];
            flat /= counts[a];
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize; MAX_DIM]) -> usize {
        let mut flat = 0;
        for a in 0..self.dim {
            flat = flat * self.counts[a] + idx[a];
        }
        flat
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts[..self.dim]
    }

    pub fn bounds(&self) -> &[[f64; 2]] {
        &self.bounds[..self.dim]
    }

    pub fn len(&self) -> usize {
        self.subdomains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subdomains.is_empty()
    }

    pub fn subdomain(&self, i: usize) -> &Subdomain {
        &self.subdomains[i]
    }

    pub fn subdomains(&self) -> &[Subdomain] {
        &self.subdomains
    }

    /// Normalized coordinates (x - mu) / sigma; maps the subdomain onto
    /// [-1, 1]^d.
    pub fn affine_map(&self, sub: usize, x: &[f64; MAX_DIM]) -> [f64; MAX_DIM] {
        let s = &self.subdomains[sub];
        let mut l = [0.0; MAX_DIM];
        for a in 0..self.dim {
            l[a] = (x[a] - s.center[a]) / s.half_width[a];
        }
        l
    }

    /// Index of the subdomain containing x under the half-open convention
    /// (lower-closed intervals, last interval closed). This makes every point
    /// of the box belong to exactly one tile.
    pub fn containing_subdomain(&self, x: &[f64; MAX_DIM]) -> usize {
        let mut idx = [0usize; MAX_DIM];
        for a in 0..self.dim {
            let w = (self.bounds[a][1] - self.bounds[a][0]) / self.counts[a] as f64;
            let raw = ((x[a] - self.bounds[a][0]) / w).floor();
            idx[a] = (raw.max(0.0) as usize).min(self.counts[a] - 1);
        }
        self.flatten(&idx)
    }

    /// Per-axis index of a flat subdomain id.
    pub fn grid_index(&self, sub: usize) -> [usize; MAX_DIM] {
        Self::unflatten(sub, &self.counts, self.dim)
    }

    pub fn contains(&self, x: &[f64; MAX_DIM]) -> bool {
        (0..self.dim).all(|a| x[a] >= self.bounds[a][0] && x[a] <= self.bounds[a][1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cube_split_in_eight() {
        let p = Partition::new(&[[0.0, 1.0]; 3], &[2, 2, 2]).unwrap();
        assert_eq!(p.len(), 8);
        for s in p.subdomains() {
            assert_eq!(s.half_width, [0.25, 0.25, 0.25]);
        }
    }

    #[test]
    fn single_interval() {
        let p = Partition::new(&[[0.0, 1.0]], &[1]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.subdomain(0).center[0], 0.5);
        assert_eq!(p.subdomain(0).half_width[0], 0.5);
    }

    #[test]
    fn mixed_box() {
        let p = Partition::new(&[[-1.0, 1.0], [-1.0, 1.0], [0.0, 2.0]], &[2, 2, 2]).unwrap();
        for s in p.subdomains() {
            assert_eq!(s.half_width, [0.5, 0.5, 0.5]);
        }
    }

    #[test]
    fn empty_interval_rejected() {
        assert!(matches!(
            Partition::new(&[[1.0, 1.0]], &[2]),
            Err(RfmError::EmptyInterval(0))
        ));
    }

    #[test]
    fn affine_map_cases() {
        let p = Partition::new(&[[0.0, 0.5]; 3], &[1, 1, 1]).unwrap();
        assert_eq!(p.affine_map(0, &[0.25, 0.25, 0.25]), [0.0, 0.0, 0.0]);
        assert_eq!(p.affine_map(0, &[0.5, 0.0, 0.25]), [1.0, -1.0, 0.0]);
        let q = Partition::new(&[[-1.0, 1.0]], &[1]).unwrap();
        assert_eq!(q.affine_map(0, &[0.3, 0.0, 0.0])[0], 0.3);
    }

    #[test]
    fn tiles_share_endpoints_and_containment_is_unique() {
        let p = Partition::new(&[[0.0, 1.0], [0.0, 1.0]], &[4, 3]).unwrap();
        for ix in 0..3usize {
            let a = p.flatten(&[ix, 1, 0]);
            let b = p.flatten(&[ix + 1, 1, 0]);
            assert_eq!(p.subdomain(a).hi(0), p.subdomain(b).lo(0));
        }
        for i in 0..=20 {
            for j in 0..=20 {
                let x = [i as f64 / 20.0, j as f64 / 20.0, 0.0];
                let sub = p.containing_subdomain(&x);
                let s = p.subdomain(sub);
                assert!(x[0] >= s.lo(0) - 1e-12 && x[0] <= s.hi(0) + 1e-12);
                assert!(x[1] >= s.lo(1) - 1e-12 && x[1] <= s.hi(1) + 1e-12);
            }
        }
    }
}
