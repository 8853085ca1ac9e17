//! Benchmark PDE catalog: operators with analytic partial derivatives with
//! respect to their slot values, manufactured exact solutions with analytic
//! derivatives, geometries, and boundary conditions.

mod appendix;
mod spacetime;
mod steady;

use crate::collocation::CurveSampling;
use crate::error::RfmError;
use crate::features::Deriv;
use crate::geometry::Geometry;
use crate::partition::MAX_DIM;

/// Maximum number of solution components.
pub const MAX_K: usize = 3;
/// Maximum number of derivative slots an operator may consume.
pub const MAX_SLOTS: usize = 12;

/// Slot values W[component][slot] at one point.
pub type SlotValues = [[f64; MAX_SLOTS]; MAX_K];
/// Operator output, one entry per component equation.
pub type OpOut = [f64; MAX_K];
/// grad[q][c][s] = d op_q / d W[c][s].
pub type OpGrad = [[[f64; MAX_SLOTS]; MAX_K]; MAX_K];

pub type OpFn = dyn Fn(&[f64; MAX_DIM], &SlotValues) -> OpOut + Sync + Send;
pub type OpGradFn = dyn Fn(&[f64; MAX_DIM], &SlotValues) -> OpGrad + Sync + Send;

/// One boundary condition: apply `deriv` of component `component` and match
/// it against data.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryCondition {
    pub component: usize,
    pub deriv: Deriv,
}

impl BoundaryCondition {
    pub fn value(component: usize) -> Self {
        Self { component, deriv: Deriv::VALUE }
    }
}

/// Exact solution of one component with analytic partial derivatives.
pub enum ExactFn {
    /// Sum of separable terms coef * f(x) g(y) h(t).
    Sep(Vec<SepTerm>),
    /// Hand-derived closure (deriv, point) -> value.
    Custom(Box<dyn Fn(Deriv, &[f64; MAX_DIM]) -> f64 + Sync + Send>),
}

impl ExactFn {
    pub fn eval(&self, d: Deriv, p: &[f64; MAX_DIM]) -> f64 {
        match self {
            ExactFn::Sep(terms) => terms
                .iter()
                .map(|t| {
                    let mut v = t.coef;
                    for a in 0..MAX_DIM {
                        v *= axis_factor_deriv(&t.factors[a], d.0[a] as usize, p[a]);
                    }
                    v
                })
                .sum(),
            ExactFn::Custom(f) => f(d, p),
        }
    }
}

/// coef * prod_a (factors[a].0 * factors[a].1) evaluated on axis a.
pub struct SepTerm {
    pub coef: f64,
    pub factors: [(F1, F1); MAX_DIM],
}

/// Primitive univariate factors with derivatives to third order.
#[derive(Debug, Clone, Copy)]
pub enum F1 {
    One,
    /// c0 + c1 x + c2 x^2 + c3 x^3
    Poly([f64; 4]),
    /// sin(a x)
    SinFreq(f64),
    /// cos(a x)
    CosFreq(f64),
    /// e^(a x)
    ExpAx(f64),
    /// sin(x (1 - x))
    SinXmX2,
    /// 1 / (x + a)
    RecipShift(f64),
}

/// k-th derivative of a primitive factor.
pub fn f1_deriv(f: F1, k: usize, x: f64) -> f64 {
    debug_assert!(k <= 3);
    match f {
        F1::One => {
            if k == 0 {
                1.0
            } else {
                0.0
            }
        }
        F1::Poly(c) => match k {
            0 => c[0] + x * (c[1] + x * (c[2] + x * c[3])),
            1 => c[1] + x * (2.0 * c[2] + 3.0 * c[3] * x),
            2 => 2.0 * c[2] + 6.0 * c[3] * x,
            _ => 6.0 * c[3],
        },
        F1::SinFreq(a) => a.powi(k as i32) * (a * x + k as f64 * std::f64::consts::FRAC_PI_2).sin(),
        F1::CosFreq(a) => a.powi(k as i32) * (a * x + k as f64 * std::f64::consts::FRAC_PI_2).cos(),
        F1::ExpAx(a) => a.powi(k as i32) * (a * x).exp(),
        F1::SinXmX2 => {
            let g = x * (1.0 - x);
            let g1 = 1.0 - 2.0 * x;
            match k {
                0 => g.sin(),
                1 => g1 * g.cos(),
                2 => -2.0 * g.cos() - g1 * g1 * g.sin(),
                _ => -g1.powi(3) * g.cos() + 6.0 * g1 * g.sin(),
            }
        }
        F1::RecipShift(a) => {
            let b = x + a;
            match k {
                0 => 1.0 / b,
                1 => -1.0 / (b * b),
                2 => 2.0 / (b * b * b),
                _ => -6.0 / (b * b * b * b),
            }
        }
    }
}

/// Derivative of a two-factor product by the Leibniz rule.
fn axis_factor_deriv(fs: &(F1, F1), k: usize, x: f64) -> f64 {
    if matches!(fs.1, F1::One) {
        return f1_deriv(fs.0, k, x);
    }
    const BINOM: [[f64; 4]; 4] =
        [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    let mut s = 0.0;
    for i in 0..=k {
        s += BINOM[k][i] * f1_deriv(fs.0, i, x) * f1_deriv(fs.1, k - i, x);
    }
    s
}

/// Convenience constructors for separable terms.
pub fn term1(coef: f64, fx: F1) -> SepTerm {
    SepTerm { coef, factors: [(fx, F1::One), (F1::One, F1::One), (F1::One, F1::One)] }
}

pub fn term2(coef: f64, fx: F1, fy: F1) -> SepTerm {
    SepTerm { coef, factors: [(fx, F1::One), (fy, F1::One), (F1::One, F1::One)] }
}

pub fn term3(coef: f64, fx: F1, fy: F1, fz: F1) -> SepTerm {
    SepTerm { coef, factors: [(fx, F1::One), (fy, F1::One), (fz, F1::One)] }
}

pub fn term3p(coef: f64, fx: (F1, F1), fy: (F1, F1), fz: (F1, F1)) -> SepTerm {
    SepTerm { coef, factors: [fx, fy, fz] }
}

/// A fully wired benchmark problem.
pub struct PdeProblem {
    pub name: String,
    pub dim: usize,
    pub components: usize,
    /// Index of the time coordinate for space-time problems.
    pub time_axis: Option<usize>,
    pub bounds: Vec<[f64; 2]>,
    /// Operator order per component per axis; axis order k yields
    /// C^0..C^(k-1) interface continuity rows.
    pub orders: Vec<[u8; MAX_DIM]>,
    /// Derivative slots consumed by the operator (shared by all components).
    pub slots: Vec<Deriv>,
    pub op: Box<OpFn>,
    pub op_grad: Box<OpGradFn>,
    /// Exact solution per component, when one exists.
    pub exact: Option<Vec<ExactFn>>,
    /// Right-hand side override for problems defined without an exact
    /// solution (the operator applied to the exact solution otherwise).
    pub source_override: Option<Box<dyn Fn(&[f64; MAX_DIM]) -> OpOut + Sync + Send>>,
    pub geometry: Geometry,
    /// Conditions on bounding-box faces, indexed [axis][side].
    pub face_bcs: [[Vec<BoundaryCondition>; 2]; MAX_DIM],
    /// Conditions on curved internal boundaries (holes and inclusions).
    pub curve_bcs: Vec<BoundaryCondition>,
    /// Boundary data override; the exact solution trace otherwise.
    pub bc_override: Option<Box<dyn Fn(usize, Deriv, &[f64; MAX_DIM]) -> f64 + Sync + Send>>,
    pub curve_sampling: CurveSampling,
    pub feature_range: f64,
}

impl PdeProblem {
    /// Evaluate every (component, slot) of the exact solution at a point.
    pub fn exact_slots(&self, p: &[f64; MAX_DIM]) -> Result<SlotValues, RfmError> {
        let exact = self.exact.as_ref().ok_or(RfmError::NoExactSolution)?;
        let mut w = [[0.0; MAX_SLOTS]; MAX_K];
        for (c, e) in exact.iter().enumerate() {
            for (si, d) in self.slots.iter().enumerate() {
                w[c][si] = e.eval(*d, p);
            }
        }
        Ok(w)
    }

    /// Manufactured source f(p): the operator applied to the exact solution
    /// through its analytic derivatives.
    pub fn source(&self, p: &[f64; MAX_DIM]) -> Result<OpOut, RfmError> {
        if let Some(s) = &self.source_override {
            return Ok(s(p));
        }
        let w = self.exact_slots(p)?;
        Ok((self.op)(p, &w))
    }

    /// Boundary data for one condition at one point.
    pub fn bc_data(&self, component: usize, deriv: Deriv, p: &[f64; MAX_DIM]) -> f64 {
        if let Some(f) = &self.bc_override {
            return f(component, deriv, p);
        }
        match &self.exact {
            Some(e) => e[component].eval(deriv, p),
            None => 0.0,
        }
    }

    pub fn exact_value(&self, component: usize, p: &[f64; MAX_DIM]) -> Option<f64> {
        self.exact.as_ref().map(|e| e[component].eval(Deriv::VALUE, p))
    }

    /// Which box faces carry boundary rows.
    pub fn face_active(&self) -> [[bool; 2]; MAX_DIM] {
        let mut out = [[false; 2]; MAX_DIM];
        for a in 0..MAX_DIM {
            for s in 0..2 {
                out[a][s] = !self.face_bcs[a][s].is_empty();
            }
        }
        out
    }

    pub fn max_order(&self) -> usize {
        self.orders.iter().flat_map(|o| o.iter()).map(|&o| o as usize).max().unwrap_or(0)
    }

    pub fn slot_index(&self, d: Deriv) -> Option<usize> {
        self.slots.iter().position(|s| *s == d)
    }
}

/// Dirichlet conditions for every component on every spatial face, plus the
/// initial-time face when a time axis is present (the final-time face stays
/// free).
pub fn dirichlet_faces(
    dim: usize,
    components: usize,
    time_axis: Option<usize>,
) -> [[Vec<BoundaryCondition>; 2]; MAX_DIM] {
    let mut out: [[Vec<BoundaryCondition>; 2]; MAX_DIM] = Default::default();
    for a in 0..dim {
        for side in 0..2 {
            if time_axis == Some(a) && side == 1 {
                continue;
            }
            out[a][side] = (0..components).map(BoundaryCondition::value).collect();
        }
    }
    out
}

pub fn dirichlet_curves(components: usize) -> Vec<BoundaryCondition> {
    (0..components).map(BoundaryCondition::value).collect()
}

/// Names accepted by [`make_problem`].
pub const CATALOG: &[&str] = &[
    "cubic_elliptic_2d",
    "cubic_elliptic_3d",
    "quasilinear_elliptic_3d",
    "strongly_nonlinear_elliptic_3d",
    "helmholtz_cosh_3d",
    "diffusion_reaction_ball",
    "gray_scott_3d",
    "allen_cahn_moving_hole",
    "klein_gordon_flowers",
    "rdc_advected_hole",
    "lotka_volterra_star",
    "nonlinear_diffusion_complex",
    "self_convergence_elliptic_3d",
    "kdv_2d",
    "schrodinger_2d",
    "burgers_2d",
    "navier_stokes_2d",
];

pub fn make_problem(name: &str) -> Result<PdeProblem, RfmError> {
    match name {
        "cubic_elliptic_2d" => Ok(steady::cubic_elliptic_2d()),
        "cubic_elliptic_3d" => Ok(steady::cubic_elliptic_3d()),
        "quasilinear_elliptic_3d" => Ok(steady::quasilinear_elliptic_3d()),
        "strongly_nonlinear_elliptic_3d" => Ok(steady::strongly_nonlinear_elliptic_3d()),
        "helmholtz_cosh_3d" => Ok(steady::helmholtz_cosh_3d()),
        "diffusion_reaction_ball" => Ok(steady::diffusion_reaction_ball()),
        "gray_scott_3d" => Ok(steady::gray_scott_3d()),
        "self_convergence_elliptic_3d" => Ok(steady::self_convergence_elliptic_3d()),
        "allen_cahn_moving_hole" => Ok(spacetime::allen_cahn_moving_hole()),
        "klein_gordon_flowers" => Ok(spacetime::klein_gordon_flowers()),
        "rdc_advected_hole" => Ok(spacetime::rdc_advected_hole()),
        "lotka_volterra_star" => Ok(spacetime::lotka_volterra_star()),
        "nonlinear_diffusion_complex" => {
            Ok(spacetime::nonlinear_diffusion_complex(&spacetime::DEFAULT_CIRCLES))
        }
        "kdv_2d" => Ok(appendix::kdv_2d()),
        "schrodinger_2d" => Ok(appendix::schrodinger_2d()),
        "burgers_2d" => Ok(appendix::burgers_2d()),
        "navier_stokes_2d" => Ok(appendix::navier_stokes_2d()),
        other => Err(RfmError::UnknownProblem(other.to_string())),
    }
}

pub use spacetime::{nonlinear_diffusion_complex, CircleSpec, DEFAULT_CIRCLES};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn unknown_name_is_an_error() {
        assert!(matches!(make_problem("zeta"), Err(RfmError::UnknownProblem(_))));
    }

    #[test]
    fn catalog_is_complete_and_consistent() {
        for name in CATALOG {
            let p = make_problem(name).unwrap();
            assert_eq!(p.name, *name);
            assert!(p.components <= MAX_K);
            assert!(p.slots.len() <= MAX_SLOTS);
            assert_eq!(p.bounds.len(), p.dim);
            assert_eq!(p.orders.len(), p.components);
        }
    }

    #[test]
    fn basic_shapes() {
        let p = make_problem("cubic_elliptic_3d").unwrap();
        assert_eq!(p.dim, 3);
        assert_eq!(p.components, 1);
        assert_eq!(p.orders[0], [2, 2, 2]);

        let gs = make_problem("gray_scott_3d").unwrap();
        assert_eq!(gs.components, 2);

        let sch = make_problem("schrodinger_2d").unwrap();
        assert_eq!(sch.components, 2);

        let ns = make_problem("navier_stokes_2d").unwrap();
        assert_eq!(ns.components, 3);
    }

    // Oracle: analytic substitution into -lap(u) + u^3 at the cube center.
    #[test]
    fn cubic_source_hand_value() {
        let p = make_problem("cubic_elliptic_3d").unwrap();
        let f = p.source(&[0.5, 0.5, 0.5]).unwrap();
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        assert!((f[0] - (3.0 * pi2 + 1.0)).abs() < 1e-12);
        // u = 0 on the x = 0 plane kills every term
        let f0 = p.source(&[0.0, 0.3, 0.8]).unwrap();
        assert!(f0[0].abs() < 1e-12);
    }

    #[test]
    fn self_convergence_source_is_one() {
        let p = make_problem("self_convergence_elliptic_3d").unwrap();
        for s in 0..5u64 {
            let x = [rng::unit_f64(1, s * 3), rng::unit_f64(1, s * 3 + 1), rng::unit_f64(1, s * 3 + 2)];
            assert_eq!(p.source(&x).unwrap()[0], 1.0);
        }
        assert!(matches!(p.exact_slots(&[0.5; 3]), Err(RfmError::NoExactSolution)));
    }

    /// Every slot derivative and boundary derivative of every exact solution
    /// must match central finite differences of the exact value.
    #[test]
    fn exact_derivatives_match_finite_differences() {
        for name in CATALOG {
            let p = make_problem(name).unwrap();
            let Some(exact) = &p.exact else { continue };
            let mut derivs: Vec<Deriv> = p.slots.clone();
            for fb in p.face_bcs.iter().flatten() {
                for bc in fb {
                    if !derivs.contains(&bc.deriv) {
                        derivs.push(bc.deriv);
                    }
                }
            }
            for (c, e) in exact.iter().enumerate() {
                for trial in 0..30u64 {
                    let mut x = [0.0; MAX_DIM];
                    for a in 0..p.dim {
                        let b = p.bounds[a];
                        // stay away from the box edge so FD stencils remain
                        // inside smooth territory
                        x[a] = b[0] + (0.1 + 0.8 * rng::unit_f64(7 + c as u64, trial * 3 + a as u64)) * (b[1] - b[0]);
                    }
                    for d in &derivs {
                        if d.total_order() == 0 {
                            continue;
                        }
                        // reduce one axis order and difference numerically
                        let mut lower = *d;
                        let mut axis = 0;
                        for a in 0..MAX_DIM {
                            if lower.0[a] > 0 {
                                lower.0[a] -= 1;
                                axis = a;
                                break;
                            }
                        }
                        let h = 1e-5;
                        let mut xp = x;
                        xp[axis] += h;
                        let mut xm = x;
                        xm[axis] -= h;
                        let fd = (e.eval(lower, &xp) - e.eval(lower, &xm)) / (2.0 * h);
                        let an = e.eval(*d, &x);
                        let scale = an.abs().max(1.0);
                        assert!(
                            (fd - an).abs() / scale < 2e-6,
                            "{name} comp {c} deriv {d:?} at {x:?}: fd {fd} vs {an}"
                        );
                    }
                }
            }
        }
    }

    /// Operator partials must match finite differences of the operator in
    /// every slot direction.
    #[test]
    fn op_partials_match_finite_differences() {
        for name in CATALOG {
            let p = make_problem(name).unwrap();
            let ns = p.slots.len();
            for trial in 0..20u64 {
                let mut x = [0.0; MAX_DIM];
                for a in 0..p.dim {
                    let b = p.bounds[a];
                    x[a] = b[0] + rng::unit_f64(13, trial * 3 + a as u64) * (b[1] - b[0]);
                }
                let mut w: SlotValues = [[0.0; MAX_SLOTS]; MAX_K];
                for c in 0..p.components {
                    for s in 0..ns {
                        w[c][s] = rng::symmetric_f64(17 + c as u64, trial * 16 + s as u64, 0.8);
                    }
                }
                let g = (p.op_grad)(&x, &w);
                for c in 0..p.components {
                    for s in 0..ns {
                        let h = 1e-6 * (1.0 + w[c][s].abs());
                        let mut wp = w;
                        wp[c][s] += h;
                        let mut wm = w;
                        wm[c][s] -= h;
                        let fp = (p.op)(&x, &wp);
                        let fm = (p.op)(&x, &wm);
                        for q in 0..p.components {
                            let fd = (fp[q] - fm[q]) / (2.0 * h);
                            let an = g[q][c][s];
                            assert!(
                                (fd - an).abs() / an.abs().max(1.0) < 1e-7,
                                "{name}: d op_{q} / d W[{c}][{s}] fd {fd} vs {an}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn divergence_free_navier_stokes_exact() {
        let p = make_problem("navier_stokes_2d").unwrap();
        let e = p.exact.as_ref().unwrap();
        for trial in 0..100u64 {
            let x = [
                rng::unit_f64(3, trial * 3),
                rng::unit_f64(3, trial * 3 + 1),
                rng::unit_f64(3, trial * 3 + 2),
            ];
            let ux = e[0].eval(Deriv::axis(0, 1), &x);
            let vy = e[1].eval(Deriv::axis(1, 1), &x);
            assert!((ux + vy).abs() <= 1e-12, "div = {}", ux + vy);
        }
    }

    #[test]
    fn klein_gordon_topology_over_time() {
        let p = make_problem("klein_gordon_flowers").unwrap();
        let overlap_at = |t: f64| {
            let mut both = 0usize;
            for i in 0..200 {
                for j in 0..200 {
                    let x = -1.0 + 2.0 * (i as f64 + 0.5) / 200.0;
                    let y = -1.0 + 2.0 * (j as f64 + 0.5) / 200.0;
                    let p1 = (p.geometry.excised[0].signed)(&[x, y, t]);
                    let p2 = (p.geometry.excised[1].signed)(&[x, y, t]);
                    if p1 < 0.0 && p2 < 0.0 {
                        both += 1;
                    }
                }
            }
            both
        };
        assert_eq!(overlap_at(0.0), 0, "obstacles must start disjoint");
        assert!(overlap_at(1.0) > 0, "obstacles must overlap at t = 1");
        assert_eq!(overlap_at(2.0), 0, "obstacles must split again by t = 2");
    }

    #[test]
    fn classification_examples() {
        use crate::geometry::Classification;
        let ac = make_problem("allen_cahn_moving_hole").unwrap();
        assert_eq!(ac.geometry.classify(&[0.7, 0.5, 0.0]), Classification::Excluded);
        assert_eq!(ac.geometry.classify(&[0.1, 0.1, 0.0]), Classification::Interior);

        let kg = make_problem("klein_gordon_flowers").unwrap();
        assert!((kg.geometry.excised[0].signed)(&[0.0, 0.0, 1.0]) < 0.0);
        assert!((kg.geometry.excised[1].signed)(&[0.0, 0.0, 1.0]) < 0.0);
    }

    #[test]
    fn star_boundary_parametrization() {
        let p = make_problem("lotka_volterra_star").unwrap();
        let c = 0.02 * 5.0f64.sqrt();
        // theta = 0: r = 0.4
        let s = (p.geometry.excised[0].signed)(&[c + 0.4, c, 0.3]);
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn allen_cahn_circle_point() {
        let p = make_problem("allen_cahn_moving_hole").unwrap();
        // center (0.7, 0.5) at t = 0, radius 0.1 upward
        let s = (p.geometry.excised[0].signed)(&[0.7, 0.6, 0.0]);
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn near_tangency_of_complex_domain() {
        let p = make_problem("nonlinear_diffusion_complex").unwrap();
        // the two closest removed disks almost touch at (1.935, 1.78)
        let c = &DEFAULT_CIRCLES;
        let (h1, h2) = (c.holes[0], c.holes[1]);
        let d = ((h2.0 - h1.0).powi(2) + (h2.1 - h1.1).powi(2)).sqrt();
        let gap = d - h1.2 - h2.2;
        assert!(gap > 0.0 && gap < 5e-3, "gap = {gap}");
        let dir = ((h2.0 - h1.0) / d, (h2.1 - h1.1) / d);
        let touch = (h1.0 + (h1.2 + gap / 2.0) * dir.0, h1.1 + (h1.2 + gap / 2.0) * dir.1);
        let err = ((touch.0 - 1.935f64).powi(2) + (touch.1 - 1.78f64).powi(2)).sqrt();
        assert!(err < 1e-3, "near-tangency point off by {err}");
        // inclusions sit inside holes
        for inc in &c.inclusions {
            let inside_some = c.holes.iter().any(|h| {
                ((inc.0 - h.0).powi(2) + (inc.1 - h.1).powi(2)).sqrt() + inc.2 <= h.2
            });
            assert!(inside_some);
        }
    }
}
