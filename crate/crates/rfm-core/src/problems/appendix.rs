//! Supplementary benchmarks: KdV, Schrodinger, Burgers and Navier-Stokes,
//! all on unit space-time boxes with time as the last coordinate.

use std::f64::consts::PI;

use super::*;
use crate::geometry::Geometry;

// slot layout [v, ux, uy, ut, uxx, uyy] as in the space-time problems
const SV: usize = 0;
const SX: usize = 1;
const SY: usize = 2;
const ST: usize = 3;
const SXX: usize = 4;
const SYY: usize = 5;

fn diffusion_slots() -> Vec<Deriv> {
    vec![
        Deriv::VALUE,
        Deriv::axis(0, 1),
        Deriv::axis(1, 1),
        Deriv::axis(2, 1),
        Deriv::axis(0, 2),
        Deriv::axis(1, 2),
    ]
}

fn unit_box3() -> Vec<[f64; 2]> {
    vec![[0.0, 1.0], [0.0, 1.0], [0.0, 1.0]]
}

/// u_t - u u_x - u u_y + u_xxx + u_yyy = f; exact u = 10 - (x^3 + y^3 + t^3).
/// The inflow faces x = 0 and y = 0 carry derivative conditions on top of
/// the Dirichlet data.
pub fn kdv_2d() -> PdeProblem {
    // slots: [v, ux, uy, ut, uxxx, uyyy]
    let slots = vec![
        Deriv::VALUE,
        Deriv::axis(0, 1),
        Deriv::axis(1, 1),
        Deriv::axis(2, 1),
        Deriv::axis(0, 3),
        Deriv::axis(1, 3),
    ];
    let op = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpOut {
        let v = w[0][0];
        [w[0][3] - v * w[0][1] - v * w[0][2] + w[0][4] + w[0][5], 0.0, 0.0]
    };
    let op_grad = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpGrad {
        let v = w[0][0];
        let mut g: OpGrad = [[[0.0; MAX_SLOTS]; MAX_K]; MAX_K];
        g[0][0][0] = -w[0][1] - w[0][2];
        g[0][0][1] = -v;
        g[0][0][2] = -v;
        g[0][0][3] = 1.0;
        g[0][0][4] = 1.0;
        g[0][0][5] = 1.0;
        g
    };
    let cube = F1::Poly([0.0, 0.0, 0.0, 1.0]);
    let exact = ExactFn::Sep(vec![
        term1(10.0, F1::One),
        term1(-1.0, cube),
        SepTerm { coef: -1.0, factors: [(F1::One, F1::One), (cube, F1::One), (F1::One, F1::One)] },
        SepTerm { coef: -1.0, factors: [(F1::One, F1::One), (F1::One, F1::One), (cube, F1::One)] },
    ]);
    let mut face_bcs = dirichlet_faces(3, 1, Some(2));
    face_bcs[0][0].push(BoundaryCondition { component: 0, deriv: Deriv::axis(0, 1) });
    face_bcs[1][0].push(BoundaryCondition { component: 0, deriv: Deriv::axis(1, 1) });
    PdeProblem {
        name: "kdv_2d".into(),
        dim: 3,
        components: 1,
        time_axis: Some(2),
        bounds: unit_box3(),
        orders: vec![[3, 3, 1]],
        slots,
        op: Box::new(op),
        op_grad: Box::new(op_grad),
        exact: Some(vec![exact]),
        source_override: None,
        geometry: Geometry::unobstructed(3, Some(2)),
        face_bcs,
        curve_bcs: Vec::new(),
        bc_override: None,
        curve_sampling: CurveSampling::default(),
        feature_range: 1.0,
    }
}

/// i h_t + (h_xx + h_yy)/2 + |h|^2 h = f split into real and imaginary
/// parts acting on (u, v); exact h = u + i v with polynomial u and a smooth
/// positive v.
pub fn schrodinger_2d() -> PdeProblem {
    let slots = vec![Deriv::VALUE, Deriv::axis(2, 1), Deriv::axis(0, 2), Deriv::axis(1, 2)];
    let op = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpOut {
        let (u, v) = (w[0][0], w[1][0]);
        let m2 = u * u + v * v;
        [
            -w[1][1] + 0.5 * (w[0][2] + w[0][3]) + m2 * u,
            w[0][1] + 0.5 * (w[1][2] + w[1][3]) + m2 * v,
            0.0,
        ]
    };
    let op_grad = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpGrad {
        let (u, v) = (w[0][0], w[1][0]);
        let mut g: OpGrad = [[[0.0; MAX_SLOTS]; MAX_K]; MAX_K];
        g[0][0][0] = 3.0 * u * u + v * v;
        g[0][1][0] = 2.0 * u * v;
        g[0][1][1] = -1.0;
        g[0][0][2] = 0.5;
        g[0][0][3] = 0.5;
        g[1][0][0] = 2.0 * u * v;
        g[1][1][0] = u * u + 3.0 * v * v;
        g[1][0][1] = 1.0;
        g[1][1][2] = 0.5;
        g[1][1][3] = 0.5;
        g
    };
    let shifted_cube = F1::Poly([-1.0, 3.0, -3.0, 1.0]); // (x - 1)^3
    let exact_u = ExactFn::Sep(vec![
        term1(1.0, shifted_cube),
        SepTerm {
            coef: 1.0,
            factors: [(F1::One, F1::One), (shifted_cube, F1::One), (F1::One, F1::One)],
        },
        SepTerm {
            coef: 1.0,
            factors: [(F1::One, F1::One), (F1::One, F1::One), (shifted_cube, F1::One)],
        },
    ]);
    let exact_v = ExactFn::Sep(vec![term3(2.0, F1::SinXmX2, F1::SinXmX2, F1::ExpAx(1.0))]);
    PdeProblem {
        name: "schrodinger_2d".into(),
        dim: 3,
        components: 2,
        time_axis: Some(2),
        bounds: unit_box3(),
        orders: vec![[2, 2, 1], [2, 2, 1]],
        slots,
        op: Box::new(op),
        op_grad: Box::new(op_grad),
        exact: Some(vec![exact_u, exact_v]),
        source_override: None,
        geometry: Geometry::unobstructed(3, Some(2)),
        face_bcs: dirichlet_faces(3, 2, Some(2)),
        curve_bcs: Vec::new(),
        bc_override: None,
        curve_sampling: CurveSampling::default(),
        feature_range: 1.0,
    }
}

/// Coupled viscous Burgers system at Re = 100 with the traveling-front
/// solution; the front satisfies the equations exactly, so the manufactured
/// source is numerically zero.
pub fn burgers_2d() -> PdeProblem {
    const RE: f64 = 100.0;
    let op = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpOut {
        let (u, v) = (w[0][SV], w[1][SV]);
        [
            w[0][ST] + u * w[0][SX] + v * w[0][SY] - (w[0][SXX] + w[0][SYY]) / RE,
            w[1][ST] + u * w[1][SX] + v * w[1][SY] - (w[1][SXX] + w[1][SYY]) / RE,
            0.0,
        ]
    };
    let op_grad = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpGrad {
        let (u, v) = (w[0][SV], w[1][SV]);
        let mut g: OpGrad = [[[0.0; MAX_SLOTS]; MAX_K]; MAX_K];
        for c in 0..2 {
            g[c][c][ST] = 1.0;
            g[c][c][SX] = u;
            g[c][c][SY] = v;
            g[c][c][SXX] = -1.0 / RE;
            g[c][c][SYY] = -1.0 / RE;
            g[c][0][SV] += w[c][SX];
            g[c][1][SV] += w[c][SY];
        }
        g
    };
    // u = 3/4 - phi/4 and v = 3/4 + phi/4 with the logistic
    // phi = 1 / (1 + exp(s theta)), theta = -4x + 4y - t, s = Re / 32.
    let front = |sign: f64| {
        ExactFn::Custom(Box::new(move |d: Deriv, p: &[f64; MAX_DIM]| {
            let s = RE / 32.0;
            let theta = -4.0 * p[0] + 4.0 * p[1] - p[2];
            let phi = 1.0 / (1.0 + (s * theta).exp());
            let phi1 = -s * phi * (1.0 - phi);
            let phi2 = -s * phi1 * (1.0 - 2.0 * phi);
            let dirs = [-4.0, 4.0, -1.0];
            let val = match d.0 {
                [0, 0, 0] => 0.75 + sign * phi / 4.0,
                [1, 0, 0] => sign * phi1 * dirs[0] / 4.0,
                [0, 1, 0] => sign * phi1 * dirs[1] / 4.0,
                [0, 0, 1] => sign * phi1 * dirs[2] / 4.0,
                [2, 0, 0] => sign * phi2 * dirs[0] * dirs[0] / 4.0,
                [0, 2, 0] => sign * phi2 * dirs[1] * dirs[1] / 4.0,
                other => unreachable!("derivative {other:?} not used by this problem"),
            };
            val
        }))
    };
    PdeProblem {
        name: "burgers_2d".into(),
        dim: 3,
        components: 2,
        time_axis: Some(2),
        bounds: unit_box3(),
        orders: vec![[2, 2, 1], [2, 2, 1]],
        slots: diffusion_slots(),
        op: Box::new(op),
        op_grad: Box::new(op_grad),
        exact: Some(vec![front(-1.0), front(1.0)]),
        source_override: None,
        geometry: Geometry::unobstructed(3, Some(2)),
        face_bcs: dirichlet_faces(3, 2, Some(2)),
        curve_bcs: Vec::new(),
        bc_override: None,
        curve_sampling: CurveSampling::default(),
        feature_range: 1.0,
    }
}

/// Incompressible Navier-Stokes in velocity-pressure form with the decaying
/// vortex solution; momentum residuals plus the divergence constraint give
/// three equations per interior point.
pub fn navier_stokes_2d() -> PdeProblem {
    let op = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpOut {
        let (u, v) = (w[0][SV], w[1][SV]);
        [
            w[0][ST] + u * w[0][SX] + v * w[0][SY] + w[2][SX] - w[0][SXX] - w[0][SYY],
            w[1][ST] + u * w[1][SX] + v * w[1][SY] + w[2][SY] - w[1][SXX] - w[1][SYY],
            w[0][SX] + w[1][SY],
        ]
    };
    let op_grad = |_: &[f64; MAX_DIM], w: &SlotValues| -> OpGrad {
        let (u, v) = (w[0][SV], w[1][SV]);
        let mut g: OpGrad = [[[0.0; MAX_SLOTS]; MAX_K]; MAX_K];
        for c in 0..2 {
            g[c][c][ST] = 1.0;
            g[c][c][SX] += u;
            g[c][c][SY] += v;
            g[c][c][SXX] = -1.0;
            g[c][c][SYY] = -1.0;
            g[c][0][SV] += w[c][SX];
            g[c][1][SV] += w[c][SY];
        }
        g[0][2][SX] = 1.0;
        g[1][2][SY] = 1.0;
        g[2][0][SX] = 1.0;
        g[2][1][SY] = 1.0;
        g
    };
    let decay = F1::ExpAx(-2.0 * PI * PI);
    let decay_p = F1::ExpAx(-4.0 * PI * PI);
    let exact_u = ExactFn::Sep(vec![term3(-1.0, F1::CosFreq(PI), F1::SinFreq(PI), decay)]);
    let exact_v = ExactFn::Sep(vec![term3(1.0, F1::SinFreq(PI), F1::CosFreq(PI), decay)]);
    let exact_p = ExactFn::Sep(vec![
        term3(-0.25, F1::CosFreq(2.0 * PI), F1::One, decay_p),
        term3(-0.25, F1::One, F1::CosFreq(2.0 * PI), decay_p),
    ]);
    PdeProblem {
        name: "navier_stokes_2d".into(),
        dim: 3,
        components: 3,
        time_axis: Some(2),
        bounds: unit_box3(),
        orders: vec![[2, 2, 1], [2, 2, 1], [1, 1, 0]],
        slots: diffusion_slots(),
        op: Box::new(op),
        op_grad: Box::new(op_grad),
        exact: Some(vec![exact_u, exact_v, exact_p]),
        source_override: None,
        geometry: Geometry::unobstructed(3, Some(2)),
        face_bcs: dirichlet_faces(3, 3, Some(2)),
        curve_bcs: Vec::new(),
        bc_override: None,
        curve_sampling: CurveSampling::default(),
        feature_range: 1.0,
    }
}
