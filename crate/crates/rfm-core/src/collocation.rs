//! Collocation point generation: per-subdomain uniform grids including
//! endpoints, filtered against the domain geometry, plus interface and
//! boundary point sets.

use std::io::Write;
use std::path::Path;

use crate::error::RfmError;
use crate::geometry::{
    fibonacci_sphere, BoundarySampler, BoundaryTrajectory, Classification, Geometry,
};
use crate::partition::{Partition, MAX_DIM};

#[derive(Debug, Clone, Copy)]
pub struct InteriorPoint {
    pub x: [f64; MAX_DIM],
    pub sub: u32,
}

#[derive(Debug, Clone, Copy)]
pub struct InterfacePoint {
    pub x: [f64; MAX_DIM],
    pub left: u32,
    pub right: u32,
    pub axis: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTag {
    /// A bounding-box face.
    Face { axis: u8, side: u8 },
    /// Boundary of an excised region or inclusion.
    Curve { region: u32, inclusion: bool },
}

#[derive(Debug, Clone, Copy)]
pub struct BoundaryPoint {
    pub x: [f64; MAX_DIM],
    pub sub: u32,
    pub tag: BoundaryTag,
}

#[derive(Debug, Clone)]
pub struct CollocationSets {
    pub dim: usize,
    pub interior: Vec<InteriorPoint>,
    pub interface: Vec<InterfacePoint>,
    pub boundary: Vec<BoundaryPoint>,
}

/// Sampling density for curved internal boundaries.
#[derive(Debug, Clone, Copy)]
pub struct CurveSampling {
    pub points_per_slice: usize,
    pub time_slices: usize,
    pub sphere_points: usize,
}

impl Default for CurveSampling {
    fn default() -> Self {
        Self { points_per_slice: 2000, time_slices: 21, sphere_points: 30_000 }
    }
}

/// Uniform per-axis grid of a subdomain including both endpoints.
fn axis_grid(lo: f64, hi: f64, q: usize) -> Vec<f64> {
    assert!(q >= 2, "need at least two collocation points per axis");
    (0..q).map(|i| lo + (hi - lo) * i as f64 / (q - 1) as f64).collect()
}

pub fn generate_collocation(
    partition: &Partition,
    q: &[usize],
    geometry: &Geometry,
    face_active: &[[bool; 2]; MAX_DIM],
    curves: &CurveSampling,
) -> Result<CollocationSets, RfmError> {
    let dim = partition.dim();
    assert_eq!(q.len(), dim);

    let mut interior = Vec::new();
    for sub in 0..partition.len() {
        let s = partition.subdomain(sub);
        let grids: Vec<Vec<f64>> =
            (0..dim).map(|a| axis_grid(s.lo(a), s.hi(a), q[a])).collect();
        let before = interior.len();
        for_each_grid_point(&grids, |x| {
            if geometry.classify(&x) == Classification::Interior {
                interior.push(InteriorPoint { x, sub: sub as u32 });
            }
        });
        if interior.len() == before {
            return Err(RfmError::EmptyInterior(sub));
        }
    }

    // interfaces between adjacent subdomains
    let mut interface = Vec::new();
    let counts = partition.counts().to_vec();
    for axis in 0..dim {
        for sub in 0..partition.len() {
            let idx = partition.grid_index(sub);
            if idx[axis] + 1 >= counts[axis] {
                continue;
            }
            let mut ridx = idx;
            ridx[axis] += 1;
            let right = partition.flatten(&ridx);
            let s = partition.subdomain(sub);
            let plane = s.hi(axis);
            let grids: Vec<Vec<f64>> = (0..dim)
                .map(|a| {
                    if a == axis {
                        vec![plane]
                    } else {
                        axis_grid(s.lo(a), s.hi(a), q[a])
                    }
                })
                .collect();
            for_each_grid_point(&grids, |x| {
                if geometry.classify(&x) == Classification::Interior {
                    interface.push(InterfacePoint {
                        x,
                        left: sub as u32,
                        right: right as u32,
                        axis: axis as u8,
                    });
                }
            });
        }
    }

    // bounding-box faces
    let mut boundary = Vec::new();
    for axis in 0..dim {
        for side in 0..2usize {
            if !face_active[axis][side] {
                continue;
            }
            for sub in 0..partition.len() {
                let idx = partition.grid_index(sub);
                let touches =
                    (side == 0 && idx[axis] == 0) || (side == 1 && idx[axis] + 1 == counts[axis]);
                if !touches {
                    continue;
                }
                let s = partition.subdomain(sub);
                let plane = if side == 0 { s.lo(axis) } else { s.hi(axis) };
                let grids: Vec<Vec<f64>> = (0..dim)
                    .map(|a| {
                        if a == axis {
                            vec![plane]
                        } else {
                            axis_grid(s.lo(a), s.hi(a), q[a])
                        }
                    })
                    .collect();
                for_each_grid_point(&grids, |x| {
                    if geometry.classify(&x) != Classification::Excluded {
                        boundary.push(BoundaryPoint {
                            x,
                            sub: sub as u32,
                            tag: BoundaryTag::Face { axis: axis as u8, side: side as u8 },
                        });
                    }
                });
            }
        }
    }

    // curved internal boundaries
    let time_range = geometry.time_axis.map(|a| {
        let b = partition.bounds()[a];
        (a, b[0], b[1])
    });
    for (list, inclusion) in [(&geometry.excised, false), (&geometry.inclusions, true)] {
        for (ri, region) in list.iter().enumerate() {
            let pts = sample_region_boundary(region, time_range, curves)?;
            for x in pts {
                if !partition.contains(&x) {
                    continue;
                }
                if geometry.classify(&x) == Classification::Excluded {
                    continue;
                }
                let sub = partition.containing_subdomain(&x) as u32;
                boundary.push(BoundaryPoint {
                    x,
                    sub,
                    tag: BoundaryTag::Curve { region: ri as u32, inclusion },
                });
            }
        }
    }

    Ok(CollocationSets { dim, interior, interface, boundary })
}

/// Boundary points of one region, with time slices appended for space-time
/// domains.
pub fn sample_region_boundary(
    region: &crate::geometry::Region,
    time_range: Option<(usize, f64, f64)>,
    curves: &CurveSampling,
) -> Result<Vec<[f64; MAX_DIM]>, RfmError> {
    let mut out = Vec::new();
    match &region.sampler {
        BoundarySampler::FibonacciSphere { center, radius } => {
            out.extend(fibonacci_sphere(curves.sphere_points, *center, *radius));
        }
        BoundarySampler::PolarCurve { center, radius } => {
            let slices = slice_times(time_range, curves.time_slices);
            for (t, has_time) in slices {
                for p in crate::geometry::polar_curve_points(center, radius, t, curves.points_per_slice)
                {
                    let mut x = [p[0], p[1], 0.0];
                    if has_time {
                        x[2] = t;
                    }
                    out.push(x);
                }
            }
        }
        BoundarySampler::Advected { center0, radius0, velocity } => {
            let traj = BoundaryTrajectory {
                center0: *center0,
                radius0: *radius0,
                velocity,
                rtol: 1e-10,
                atol: 1e-10,
            };
            let slices = slice_times(time_range, curves.time_slices);
            for (t, has_time) in slices {
                for p in traj.advect_circle(curves.points_per_slice, t)? {
                    let mut x = [p[0], p[1], 0.0];
                    if has_time {
                        x[2] = t;
                    }
                    out.push(x);
                }
            }
        }
    }
    Ok(out)
}

fn slice_times(time_range: Option<(usize, f64, f64)>, n: usize) -> Vec<(f64, bool)> {
    match time_range {
        None => vec![(0.0, false)],
        Some((_, lo, hi)) => {
            let n = n.max(2);
            (0..n)
                .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64, true))
                .collect()
        }
    }
}

fn for_each_grid_point<F: FnMut([f64; MAX_DIM])>(grids: &[Vec<f64>], mut f: F) {
    let dim = grids.len();
    let mut idx = vec![0usize; dim];
    loop {
        let mut x = [0.0; MAX_DIM];
        for a in 0..dim {
            x[a] = grids[a][idx[a]];
        }
        f(x);
        // advance odometer, last axis fastest
        let mut a = dim;
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < grids[a].len() {
                break;
            }
            idx[a] = 0;
        }
    }
}

impl CollocationSets {
    /// Debug dump: one line per point with kind and tag columns.
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> std::io::Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        let coords = if self.dim == 2 { "x,y" } else { "x,y,z" };
        writeln!(f, "{coords},kind,tag")?;
        let fmt = |x: &[f64; MAX_DIM], dim: usize| {
            x[..dim].iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",")
        };
        for p in &self.interior {
            writeln!(f, "{},interior,sub{}", fmt(&p.x, self.dim), p.sub)?;
        }
        for p in &self.interface {
            writeln!(f, "{},interface,axis{}", fmt(&p.x, self.dim), p.axis)?;
        }
        for p in &self.boundary {
            let tag = match p.tag {
                BoundaryTag::Face { axis, side } => format!("face{axis}_{side}"),
                BoundaryTag::Curve { region, inclusion } => {
                    format!("{}{region}", if inclusion { "inclusion" } else { "hole" })
                }
            };
            writeln!(f, "{},boundary,{tag}", fmt(&p.x, self.dim), tag = tag)?;
        }
        Ok(())
    }
}
