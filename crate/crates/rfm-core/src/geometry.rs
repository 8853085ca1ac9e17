//! Domain geometry: excised regions and inclusions described by signed
//! functions, point classification, and boundary samplers for curved and
//! advected internal boundaries.

use crate::error::RfmError;
use crate::ode;
use crate::partition::MAX_DIM;

pub const BOUNDARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Interior,
    Excluded,
    OnBoundary,
}

use std::sync::Arc;

pub type SignedFn = Box<dyn Fn(&[f64; MAX_DIM]) -> f64 + Sync + Send>;
pub type CenterFn = Arc<dyn Fn(f64) -> [f64; 2] + Sync + Send>;
pub type RadiusFn = Arc<dyn Fn(f64) -> f64 + Sync + Send>;
pub type VelocityFn = Arc<dyn Fn(f64, [f64; 2]) -> [f64; 2] + Sync + Send>;

/// How to generate boundary points on a region's surface.
pub enum BoundarySampler {
    /// Planar curve c(t) + r(theta) (cos theta, sin theta); time slices are
    /// appended as the last coordinate for space-time domains.
    PolarCurve { center: CenterFn, radius: RadiusFn },
    /// Points on a sphere via the Fibonacci spiral.
    FibonacciSphere { center: [f64; 3], radius: f64 },
    /// Seed points on an initial circle advected by a velocity field.
    Advected { center0: [f64; 2], radius0: f64, velocity: VelocityFn },
}

/// A removed (or re-included) piece of the domain: `signed < 0` inside,
/// `signed = 0` on its surface.
pub struct Region {
    pub signed: SignedFn,
    pub sampler: BoundarySampler,
    /// Classification tolerance around the zero level set.
    pub tol: f64,
}

impl Region {
    pub fn new(signed: SignedFn, sampler: BoundarySampler) -> Self {
        Self { signed, sampler, tol: BOUNDARY_TOL }
    }
}

/// Geometry of the computational domain inside its bounding box: excised
/// regions are removed, inclusions are added back inside them.
pub struct Geometry {
    pub dim: usize,
    /// None for stationary domains; otherwise the index of the time axis.
    pub time_axis: Option<usize>,
    pub excised: Vec<Region>,
    pub inclusions: Vec<Region>,
}

impl Geometry {
    pub fn unobstructed(dim: usize, time_axis: Option<usize>) -> Self {
        Self { dim, time_axis, excised: Vec::new(), inclusions: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.excised.is_empty() && self.inclusions.is_empty()
    }

    /// Classify a point of the bounding box against the internal boundaries.
    pub fn classify(&self, p: &[f64; MAX_DIM]) -> Classification {
        for inc in &self.inclusions {
            let s = (inc.signed)(p);
            if s < -inc.tol {
                return Classification::Interior;
            }
            if s.abs() <= inc.tol {
                return Classification::OnBoundary;
            }
        }
        let mut on_boundary = false;
        for exc in &self.excised {
            let s = (exc.signed)(p);
            if s < -exc.tol {
                return Classification::Excluded;
            }
            if s.abs() <= exc.tol {
                on_boundary = true;
            }
        }
        if on_boundary {
            Classification::OnBoundary
        } else {
            Classification::Interior
        }
    }
}

/// Uniformly distributed points on the unit sphere scaled and shifted;
/// every point has unit distance from the center by construction.
pub fn fibonacci_sphere(n: usize, center: [f64; 3], radius: f64) -> Vec<[f64; 3]> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden_angle * i as f64;
            [
                center[0] + radius * r * phi.cos(),
                center[1] + radius * r * phi.sin(),
                center[2] + radius * z,
            ]
        })
        .collect()
}

/// Evenly spaced parameter samples of a polar curve at time t.
pub fn polar_curve_points(
    center: &CenterFn,
    radius: &RadiusFn,
    t: f64,
    n: usize,
) -> Vec<[f64; 2]> {
    let c = center(t);
    (0..n)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let r = radius(theta);
            [c[0] + r * theta.cos(), c[1] + r * theta.sin()]
        })
        .collect()
}

/// Trajectories X'(t) = w(X, t) for points seeded on an initial circle,
/// integrated by the adaptive Runge-Kutta 5(4) scheme.
pub struct BoundaryTrajectory<'a> {
    pub center0: [f64; 2],
    pub radius0: f64,
    pub velocity: &'a VelocityFn,
    pub rtol: f64,
    pub atol: f64,
}

impl<'a> BoundaryTrajectory<'a> {
    pub fn advect_seed(&self, seed: [f64; 2], t: f64) -> Result<[f64; 2], RfmError> {
        ode::integrate(
            |tt, y: &[f64; 2]| (self.velocity)(tt, [y[0], y[1]]),
            seed,
            0.0,
            t,
            self.rtol,
            self.atol,
        )
    }

    /// Positions at time t of n points seeded uniformly on the circle.
    pub fn advect_circle(&self, n: usize, t: f64) -> Result<Vec<[f64; 2]>, RfmError> {
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let seed = [
                self.center0[0] + self.radius0 * theta.cos(),
                self.center0[1] + self.radius0 * theta.sin(),
            ];
            out.push(self.advect_seed(seed, t)?);
        }
        Ok(out)
    }

    /// Signed distance proxy at (x, y, t): map the query point backward to
    /// t = 0 and compare against the seed circle. Negative inside the hole.
    pub fn signed_at(&self, x: f64, y: f64, t: f64) -> f64 {
        match ode::integrate(
            |tt, p: &[f64; 2]| (self.velocity)(tt, [p[0], p[1]]),
            [x, y],
            t,
            0.0,
            self.rtol,
            self.atol,
        ) {
            Ok(p0) => {
                let dx = p0[0] - self.center0[0];
                let dy = p0[1] - self.center0[1];
                (dx * dx + dy * dy).sqrt() - self.radius0
            }
            Err(_) => f64::INFINITY,
        }
    }
}

/// Build an advected-hole region: membership by backward integration of the
/// query point, boundary by forward advection of circle seeds.
pub fn advected_disk_region(center0: [f64; 2], radius0: f64, velocity: VelocityFn) -> Region {
    let vel = velocity.clone();
    let signed_traj = move |p: &[f64; MAX_DIM]| {
        let traj = BoundaryTrajectory {
            center0,
            radius0,
            velocity: &vel,
            rtol: 1e-10,
            atol: 1e-10,
        };
        traj.signed_at(p[0], p[1], p[2])
    };
    Region {
        signed: Box::new(signed_traj),
        sampler: BoundarySampler::Advected { center0, radius0, velocity },
        // backward integration carries integrator error; the band must
        // absorb it
        tol: 1e-8,
    }
}

/// Circle of fixed radius with a (possibly moving) center, as a region.
pub fn moving_disk_region(center: CenterFn, radius: f64, time_axis: Option<usize>) -> Region {
    let c2 = center.clone();
    let signed = move |p: &[f64; MAX_DIM]| {
        let t = time_axis.map_or(0.0, |a| p[a]);
        let c = c2(t);
        let dx = p[0] - c[0];
        let dy = p[1] - c[1];
        (dx * dx + dy * dy).sqrt() - radius
    };
    Region::new(
        Box::new(signed),
        BoundarySampler::PolarCurve { center, radius: Arc::new(move |_| radius) },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_points_sit_on_the_sphere() {
        for &n in &[1000usize, 30_000] {
            let pts = fibonacci_sphere(n, [0.0; 3], 1.0);
            assert_eq!(pts.len(), n);
            for p in pts {
                let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                assert!((r - 1.0).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn classification_with_hole_and_island() {
        // hole: unit disk at origin, island: disk radius 0.3 inside it
        let hole = Region::new(
            Box::new(|p: &[f64; MAX_DIM]| (p[0] * p[0] + p[1] * p[1]).sqrt() - 1.0),
            BoundarySampler::PolarCurve {
                center: Arc::new(|_| [0.0, 0.0]),
                radius: Arc::new(|_| 1.0),
            },
        );
        let island = Region::new(
            Box::new(|p: &[f64; MAX_DIM]| (p[0] * p[0] + p[1] * p[1]).sqrt() - 0.3),
            BoundarySampler::PolarCurve {
                center: Arc::new(|_| [0.0, 0.0]),
                radius: Arc::new(|_| 0.3),
            },
        );
        let g = Geometry {
            dim: 2,
            time_axis: None,
            excised: vec![hole],
            inclusions: vec![island],
        };
        assert_eq!(g.classify(&[0.0, 0.0, 0.0]), Classification::Interior);
        assert_eq!(g.classify(&[0.3, 0.0, 0.0]), Classification::OnBoundary);
        assert_eq!(g.classify(&[0.6, 0.0, 0.0]), Classification::Excluded);
        assert_eq!(g.classify(&[1.0, 0.0, 0.0]), Classification::OnBoundary);
        assert_eq!(g.classify(&[1.5, 0.0, 0.0]), Classification::Interior);
    }

    #[test]
    fn stationary_velocity_keeps_points_fixed() {
        let vel: VelocityFn = Arc::new(|_, _| [0.0, 0.0]);
        let traj =
            BoundaryTrajectory { center0: [0.5, 0.5], radius0: 0.2, velocity: &vel, rtol: 1e-10, atol: 1e-10 };
        let pts = traj.advect_circle(16, 1.0).unwrap();
        for (i, p) in pts.iter().enumerate() {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / 16.0;
            assert!((p[0] - (0.5 + 0.2 * theta.cos())).abs() < 1e-12);
            assert!((p[1] - (0.5 + 0.2 * theta.sin())).abs() < 1e-12);
        }
        assert!((traj.signed_at(0.5, 0.7, 0.8)).abs() < 1e-9);
    }

    #[test]
    fn advected_point_matches_fixed_step_oracle() {
        // single point under the swirl field vs a fine fixed-step RK4 run
        let w = |t: f64, p: [f64; 2]| {
            let c = (std::f64::consts::PI * t / 10.0).cos();
            [
                c * (std::f64::consts::PI * p[0]).sin().powi(2)
                    * (2.0 * std::f64::consts::PI * p[1]).sin(),
                -c * (std::f64::consts::PI * p[1]).sin().powi(2)
                    * (2.0 * std::f64::consts::PI * p[0]).sin(),
            ]
        };
        let vel: VelocityFn = Arc::new(w);
        let traj =
            BoundaryTrajectory { center0: [0.5, 0.75], radius0: 0.15, velocity: &vel, rtol: 1e-10, atol: 1e-10 };
        let got = traj.advect_seed([0.65, 0.75], 1.0).unwrap();

        // fixed-step RK4 oracle
        let mut y = [0.65, 0.75];
        let nsteps = 100_000;
        let h = 1.0 / nsteps as f64;
        for s in 0..nsteps {
            let t = s as f64 * h;
            let k1 = w(t, y);
            let k2 = w(t + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
            let k3 = w(t + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
            let k4 = w(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        }
        assert!((got[0] - y[0]).abs() < 1e-8, "{} vs {}", got[0], y[0]);
        assert!((got[1] - y[1]).abs() < 1e-8);
    }

    #[test]
    fn advected_circle_stays_inside_unit_square() {
        let w = |t: f64, p: [f64; 2]| {
            let c = (std::f64::consts::PI * t / 10.0).cos();
            [
                c * (std::f64::consts::PI * p[0]).sin().powi(2)
                    * (2.0 * std::f64::consts::PI * p[1]).sin(),
                -c * (std::f64::consts::PI * p[1]).sin().powi(2)
                    * (2.0 * std::f64::consts::PI * p[0]).sin(),
            ]
        };
        let vel: VelocityFn = Arc::new(w);
        let traj =
            BoundaryTrajectory { center0: [0.5, 0.75], radius0: 0.15, velocity: &vel, rtol: 1e-10, atol: 1e-10 };
        for &t in &[0.25, 0.5, 0.75, 1.0] {
            for p in traj.advect_circle(64, t).unwrap() {
                assert!(p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0);
            }
        }
    }
}
