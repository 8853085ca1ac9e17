//! Steady elliptic benchmarks on the unit cube (and square), plus a
//! diffusion-reaction problem on the unit ball.

use std::f64::consts::PI;

use super::*;
use crate::geometry::{BoundarySampler, Geometry, Region};

fn cube(dim: usize) -> Vec<[f64; 2]> {
    vec![[0.0, 1.0]; dim]
}

fn sin_pi() -> F1 {
    F1::SinFreq(PI)
}

/// -lap(u) + u^3 = f, exact u = sin(pi x) sin(pi y) [sin(pi z)].
fn cubic_elliptic(dim: usize) -> PdeProblem {
    let mut slots = vec![Deriv::VALUE];
    for a in 0..dim {
        slots.push(Deriv::axis(a, 2));
    }
    let nd = dim;
    let op = move |_: &[f64; MAX_DIM], w: &SlotValues| -> OpOut {
        let v = w[0][0];
        let mut lap = 0.0;
        for s in 1..=nd {
            lap += w[0][s];
        }
        [-lap + v * v * v, 0.0, 0.0]
    };
    let op_grad = move |_: &[f64; MAX_DIM], w: &SlotValues| -> OpGrad {
        let mut g: OpGrad = [[[0.0; MAX_SLOTS]; MAX_K]; MAX_K];
        g[0][0][0] = 3.0 * w[0][0] * w[0][0];
        for s in 1..=nd {
            g[0][0][s] = -1.0;
        }
        g
    };
    let exact = if dim == 2 {
        ExactFn::Sep(vec![term2(1.0, sin_pi(), sin_pi())])
    } else {
        ExactFn::Sep(vec![term3(1.0, sin_pi(), sin_pi(), sin_pi())])
    };
    let mut orders = [0u8; MAX_DIM];
    orders[..dim].fill(2);
    PdeProblem {
        name: if dim == 2 { "cubic_elliptic_2d".into() } else { "cubic_elliptic_3d".into() },
        dim,
        components: 1,
        time_axis: None,
        bounds: cube(dim),
        orders: vec![orders],
        slots,
        op: Box::new(op),
        op_grad: Box::new(op_grad),
        exact: Some(vec![exact]),
        source_override: None,
        geometry: Geometry::unobstructed(dim, None),
        face_bcs: dirichlet_faces(dim, 1, None),
        curve_bcs: Vec::new(),
        bc_override: None,
        curve_sampling: CurveSampling::default(),
        feature_range: 1.0,
    }
}

pub fn cubic_elliptic_2d() -> PdeProblem {
    cubic_elliptic(2)
}

pub fn cubic_elliptic_3d() -> PdeProblem {
    cubic_elliptic(3)
}

// Slot layout shared by the quasilinear operators:
// [v, ux, uy, uz, uxx, uyy, uzz]
const QV: usize = 0;
const QD1: usize = 1;
const QD2: usize = 4;

fn quasilinear_op(w: &[f64; MAX_SLOTS]) -> f64 {
    let v = w[QV];
    let lap = w[QD2] + w[QD2 + 1] + w[QD2 + 2];
    let grad2 = w[QD1] * w[QD1] + w[QD1 + 1] * w[QD1 + 1] + w[QD1 + 2] * w[QD1 + 2];
    -(1.0 + v * v) * lap - 2.0 * v * grad2
}

fn quasilinear_grad(w: &[f64; MAX_SLOTS], g: &mut [f64; MAX_SLOTS]) {
    let v = w[QV];
    let lap = w[QD2] + w[QD2 + 1] + w[QD2 + 2];
    let grad2 = w[QD1] * w[QD1] + w[QD1 + 1] * w[QD1 + 1] + w[QD1 + 2] * w[QD1 + 2];
    g[QV] = -2.0 * v * lap - 2.0 * grad2;
    for a in 0..3 {
        g[QD1 + a] = -4.0 * v * w[QD1 + a];
        g[QD2 + a] = -(1.0 + v * v);
    }
}

fn quasilinear_slots() -> Vec<Deriv> {
    vec![
        Deriv::VALUE,
        Deriv::axis(0, 1),
        Deriv::axis(1, 1),
        Deriv::axis(2, 1),
        Deriv::axis(0, 2),
        Deriv::axis(1, 2),
        Deriv::axis(2, 2),
    ]
}

/// -div((1 + u^2) grad u) = f, exact u = (x+y+z) sin(pi x) sin(pi y) cos(pi z).
pub fn quasilinear_elliptic_3d() -> PdeProblem {
    let op = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpOut { [quasilinear_op(&w[0]), 0.0, 0.0] };
    let op_grad = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpGrad {
        let mut g: OpGrad = [[[0.0; MAX_SLOTS]; MAX_K]; MAX_K];
        quasilinear_grad(&w[0], &mut g[0][0]);
        g
    };
    let x = F1::Poly([0.0, 1.0, 0.0, 0.0]);
    let exact = ExactFn::Sep(vec![
        term3p(1.0, (x, sin_pi()), (sin_pi(), F1::One), (F1::CosFreq(PI), F1::One)),
        term3p(1.0, (sin_pi(), F1::One), (x, sin_pi()), (F1::CosFreq(PI), F1::One)),
        term3p(1.0, (sin_pi(), F1::One), (sin_pi(), F1::One), (x, F1::CosFreq(PI))),
    ]);
    PdeProblem {
        name: "quasilinear_elliptic_3d".into(),
        dim: 3,
        components: 1,
        time_axis: None,
        bounds: cube(3),
        orders: vec![[2, 2, 2]],
        slots: quasilinear_slots(),
        op: Box::new(op),
        op_grad: Box::new(op_grad),
        exact: Some(vec![exact]),
        source_override: None,
        geometry: Geometry::unobstructed(3, None),
        face_bcs: dirichlet_faces(3, 1, None),
        curve_bcs: Vec::new(),
        bc_override: None,
        curve_sampling: CurveSampling::default(),
        feature_range: 1.0,
    }
}

/// -div((1 + |grad u|^2) grad u) = f with the full mixed-derivative
/// expansion; exact u = sin(x(1-x)) sin(y(1-y)) e^(z + 1/2).
pub fn strongly_nonlinear_elliptic_3d() -> PdeProblem {
    // slots: [ux, uy, uz, uxx, uyy, uzz, uxy, uxz, uyz]
    let slots = vec![
        Deriv::axis(0, 1),
        Deriv::axis(1, 1),
        Deriv::axis(2, 1),
        Deriv::axis(0, 2),
        Deriv::axis(1, 2),
        Deriv::axis(2, 2),
        Deriv([1, 1, 0]),
        Deriv([1, 0, 1]),
        Deriv([0, 1, 1]),
    ];
    // symmetric Hessian slot lookup
    const H: [[usize; 3]; 3] = [[3, 6, 7], [6, 4, 8], [7, 8, 5]];
    let op = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpOut {
        let w = &w[0];
        let grad = [w[0], w[1], w[2]];
        let lam = 1.0 + grad.iter().map(|g| g * g).sum::<f64>();
        let lap = w[3] + w[4] + w[5];
        let mut t = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                t += grad[a] * grad[b] * w[H[a][b]];
            }
        }
        [-lam * lap - 2.0 * t, 0.0, 0.0]
    };
    let op_grad = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpGrad {
        let w = &w[0];
        let grad = [w[0], w[1], w[2]];
        let lam = 1.0 + grad.iter().map(|g| g * g).sum::<f64>();
        let lap = w[3] + w[4] + w[5];
        let mut g: OpGrad = [[[0.0; MAX_SLOTS]; MAX_K]; MAX_K];
        for c in 0..3 {
            let mut hrow = 0.0;
            for b in 0..3 {
                hrow += grad[b] * w[H[c][b]];
            }
            g[0][0][c] = -2.0 * grad[c] * lap - 4.0 * hrow;
        }
        for a in 0..3 {
            g[0][0][3 + a] = -lam - 2.0 * grad[a] * grad[a];
        }
        g[0][0][6] = -4.0 * grad[0] * grad[1];
        g[0][0][7] = -4.0 * grad[0] * grad[2];
        g[0][0][8] = -4.0 * grad[1] * grad[2];
        g
    };
    let exact = ExactFn::Sep(vec![term3(
        (0.5f64).exp(),
        F1::SinXmX2,
        F1::SinXmX2,
        F1::ExpAx(1.0),
    )]);
    PdeProblem {
        name: "strongly_nonlinear_elliptic_3d".into(),
        dim: 3,
        components: 1,
        time_axis: None,
        bounds: cube(3),
        orders: vec![[2, 2, 2]],
        slots,
        op: Box::new(op),
        op_grad: Box::new(op_grad),
        exact: Some(vec![exact]),
        source_override: None,
        geometry: Geometry::unobstructed(3, None),
        face_bcs: dirichlet_faces(3, 1, None),
        curve_bcs: Vec::new(),
        bc_override: None,
        curve_sampling: CurveSampling::default(),
        feature_range: 1.0,
    }
}

/// u_xx + u_yy + u_zz - 100 u + 10 cosh(u) = f,
/// exact u = (2 + x^2 + y^2 + z^2) sin(pi x) sin(pi y) sin(pi z).
pub fn helmholtz_cosh_3d() -> PdeProblem {
    let slots =
        vec![Deriv::VALUE, Deriv::axis(0, 2), Deriv::axis(1, 2), Deriv::axis(2, 2)];
    let op = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpOut {
        let v = w[0][0];
        let lap = w[0][1] + w[0][2] + w[0][3];
        [lap - 100.0 * v + 10.0 * v.cosh(), 0.0, 0.0]
    };
    let op_grad = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpGrad {
        let mut g: OpGrad = [[[0.0; MAX_SLOTS]; MAX_K]; MAX_K];
        g[0][0][0] = -100.0 + 10.0 * w[0][0].sinh();
        for s in 1..4 {
            g[0][0][s] = 1.0;
        }
        g
    };
    let x2 = F1::Poly([0.0, 0.0, 1.0, 0.0]);
    let exact = ExactFn::Sep(vec![
        term3(2.0, sin_pi(), sin_pi(), sin_pi()),
        term3p(1.0, (x2, sin_pi()), (sin_pi(), F1::One), (sin_pi(), F1::One)),
        term3p(1.0, (sin_pi(), F1::One), (x2, sin_pi()), (sin_pi(), F1::One)),
        term3p(1.0, (sin_pi(), F1::One), (sin_pi(), F1::One), (x2, sin_pi())),
    ]);
    PdeProblem {
        name: "helmholtz_cosh_3d".into(),
        dim: 3,
        components: 1,
        time_axis: None,
        bounds: cube(3),
        orders: vec![[2, 2, 2]],
        slots,
        op: Box::new(op),
        op_grad: Box::new(op_grad),
        exact: Some(vec![exact]),
        source_override: None,
        geometry: Geometry::unobstructed(3, None),
        face_bcs: dirichlet_faces(3, 1, None),
        curve_bcs: Vec::new(),
        bc_override: None,
        curve_sampling: CurveSampling::default(),
        feature_range: 1.0,
    }
}

/// -div((1 + u^2) grad u) + (u^3 - u) + e^u = f on the unit ball,
/// exact u = (x^2 + y^2 + z^2) sin(pi x) sin(pi y) sin(pi z).
pub fn diffusion_reaction_ball() -> PdeProblem {
    let op = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpOut {
        let v = w[0][QV];
        [quasilinear_op(&w[0]) + (v * v * v - v) + v.exp(), 0.0, 0.0]
    };
    let op_grad = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpGrad {
        let mut g: OpGrad = [[[0.0; MAX_SLOTS]; MAX_K]; MAX_K];
        quasilinear_grad(&w[0], &mut g[0][0]);
        let v = w[0][QV];
        g[0][0][QV] += 3.0 * v * v - 1.0 + v.exp();
        g
    };
    let x2 = F1::Poly([0.0, 0.0, 1.0, 0.0]);
    let exact = ExactFn::Sep(vec![
        term3p(1.0, (x2, sin_pi()), (sin_pi(), F1::One), (sin_pi(), F1::One)),
        term3p(1.0, (sin_pi(), F1::One), (x2, sin_pi()), (sin_pi(), F1::One)),
        term3p(1.0, (sin_pi(), F1::One), (sin_pi(), F1::One), (x2, sin_pi())),
    ]);
    // removed region: everything outside the unit sphere
    let outside = Region::new(
        Box::new(|p: &[f64; MAX_DIM]| 1.0 - (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()),
        BoundarySampler::FibonacciSphere { center: [0.0; 3], radius: 1.0 },
    );
    let geometry =
        Geometry { dim: 3, time_axis: None, excised: vec![outside], inclusions: Vec::new() };
    PdeProblem {
        name: "diffusion_reaction_ball".into(),
        dim: 3,
        components: 1,
        time_axis: None,
        bounds: vec![[-1.0, 1.0]; 3],
        orders: vec![[2, 2, 2]],
        slots: quasilinear_slots(),
        op: Box::new(op),
        op_grad: Box::new(op_grad),
        exact: Some(vec![exact]),
        source_override: None,
        geometry,
        face_bcs: Default::default(),
        curve_bcs: dirichlet_curves(1),
        bc_override: None,
        curve_sampling: CurveSampling::default(),
        feature_range: 1.0,
    }
}

/// Steady Gray-Scott system with solution-dependent diffusion, F = 0.060,
/// k = 0.062; exact u = sin(x(1-x)) sin(y(1-y)) e^z, v = product of sines.
pub fn gray_scott_3d() -> PdeProblem {
    const F: f64 = 0.060;
    const K: f64 = 0.062;
    let slots =
        vec![Deriv::VALUE, Deriv::axis(0, 2), Deriv::axis(1, 2), Deriv::axis(2, 2)];
    let op = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpOut {
        let (u, v) = (w[0][0], w[1][0]);
        let lap_u = w[0][1] + w[0][2] + w[0][3];
        let lap_v = w[1][1] + w[1][2] + w[1][3];
        [
            (1.0 + u * u) * lap_u - u * v * v + F * (1.0 - u),
            (1.0 + v * v) * lap_v + u * v * v - (F + K) * v,
            0.0,
        ]
    };
    let op_grad = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpGrad {
        let (u, v) = (w[0][0], w[1][0]);
        let lap_u = w[0][1] + w[0][2] + w[0][3];
        let lap_v = w[1][1] + w[1][2] + w[1][3];
        let mut g: OpGrad = [[[0.0; MAX_SLOTS]; MAX_K]; MAX_K];
        g[0][0][0] = 2.0 * u * lap_u - v * v - F;
        g[0][1][0] = -2.0 * u * v;
        g[1][0][0] = v * v;
        g[1][1][0] = 2.0 * v * lap_v + 2.0 * u * v - (F + K);
        for s in 1..4 {
            g[0][0][s] = 1.0 + u * u;
            g[1][1][s] = 1.0 + v * v;
        }
        g
    };
    let exact_u = ExactFn::Sep(vec![term3(1.0, F1::SinXmX2, F1::SinXmX2, F1::ExpAx(1.0))]);
    let exact_v = ExactFn::Sep(vec![term3(1.0, sin_pi(), sin_pi(), sin_pi())]);
    PdeProblem {
        name: "gray_scott_3d".into(),
        dim: 3,
        components: 2,
        time_axis: None,
        bounds: cube(3),
        orders: vec![[2, 2, 2], [2, 2, 2]],
        slots,
        op: Box::new(op),
        op_grad: Box::new(op_grad),
        exact: Some(vec![exact_u, exact_v]),
        source_override: None,
        geometry: Geometry::unobstructed(3, None),
        face_bcs: dirichlet_faces(3, 2, None),
        curve_bcs: Vec::new(),
        bc_override: None,
        curve_sampling: CurveSampling::default(),
        feature_range: 1.0,
    }
}

/// -div((1 + u^2) grad u) = 1 with zero Dirichlet data; no closed-form
/// solution, used for self-convergence studies.
pub fn self_convergence_elliptic_3d() -> PdeProblem {
    let op = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpOut { [quasilinear_op(&w[0]), 0.0, 0.0] };
    let op_grad = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpGrad {
        let mut g: OpGrad = [[[0.0; MAX_SLOTS]; MAX_K]; MAX_K];
        quasilinear_grad(&w[0], &mut g[0][0]);
        g
    };
    PdeProblem {
        name: "self_convergence_elliptic_3d".into(),
        dim: 3,
        components: 1,
        time_axis: None,
        bounds: cube(3),
        orders: vec![[2, 2, 2]],
        slots: quasilinear_slots(),
        op: Box::new(op),
        op_grad: Box::new(op_grad),
        exact: None,
        source_override: Some(Box::new(|_| [1.0, 0.0, 0.0])),
        geometry: Geometry::unobstructed(3, None),
        face_bcs: dirichlet_faces(3, 1, None),
        curve_bcs: Vec::new(),
        bc_override: Some(Box::new(|_, _, _| 0.0)),
        curve_sampling: CurveSampling::default(),
        feature_range: 1.0,
    }
}
