//! Assembly of the collocation residual and Jacobian: interior operator
//! rows, interface continuity rows, and boundary rows, stacked in that fixed
//! order over a cached basis evaluation.

use crate::collocation::{BoundaryTag, CollocationSets, CurveSampling};
use crate::error::RfmError;
use crate::features::{Deriv, FeatureBank};
use crate::matrix::{dot, DenseMatrix};
use crate::partition::{Partition, MAX_DIM};
use crate::pou::{pou_b_deriv, support_radius, PouKind};
use crate::problems::{PdeProblem, SlotValues, MAX_K, MAX_SLOTS};
use crate::solvers::{NlsSystem, ScalingMode};
use crate::par;

/// PoU-weighted basis rows at a point: one (subdomain, per-deriv rows) entry
/// per contributing subdomain. With the indicator PoU there is exactly one.
pub struct WeightedRows {
    pub blocks: Vec<(usize, Vec<Vec<f64>>)>,
}

/// Evaluates PoU-weighted local expansions and their derivatives.
pub struct FieldEvaluator<'a> {
    pub partition: &'a Partition,
    pub bank: &'a FeatureBank,
    pub pou: PouKind,
}

impl<'a> FieldEvaluator<'a> {
    /// Rows of d^alpha (psi_i phi_ij) at x for every requested alpha.
    /// `anchor` names the subdomain whose grid generated the point; the
    /// indicator PoU uses it directly.
    pub fn weighted_rows(
        &self,
        anchor: usize,
        x: &[f64; MAX_DIM],
        derivs: &[Deriv],
    ) -> Result<WeightedRows, RfmError> {
        match self.pou {
            PouKind::A => {
                let e = self.bank.eval(self.partition, anchor, x, derivs)?;
                Ok(WeightedRows { blocks: vec![(anchor, e.partials)] })
            }
            PouKind::B => {
                for d in derivs {
                    if d.total_order() > 2 {
                        return Err(RfmError::UnsupportedPou(d.total_order()));
                    }
                }
                let dim = self.partition.dim();
                let radius = support_radius(PouKind::B);
                // candidate subdomains: per-axis indices whose normalized
                // coordinate magnitude stays under the support radius
                let counts = self.partition.counts().to_vec();
                let mut axis_cands: Vec<Vec<usize>> = Vec::with_capacity(dim);
                let center_idx = self.partition.grid_index(self.partition.containing_subdomain(x));
                for a in 0..dim {
                    let mut cands = Vec::new();
                    let lo = center_idx[a].saturating_sub(1);
                    let hi = (center_idx[a] + 1).min(counts[a] - 1);
                    for i in lo..=hi {
                        let mut idx = center_idx;
                        idx[a] = i;
                        let sub = self.partition.flatten(&idx);
                        let l = self.partition.affine_map(sub, x);
                        if l[a].abs() <= radius {
                            cands.push(i);
                        }
                    }
                    axis_cands.push(cands);
                }
                let mut blocks = Vec::new();
                let mut stack = vec![0usize; dim];
                enumerate_product(&axis_cands, &mut stack, 0, &mut |choice| {
                    let mut idx = [0usize; MAX_DIM];
                    idx[..dim].copy_from_slice(choice);
                    let sub = self.partition.flatten(&idx);
                    blocks.push(sub);
                });
                let mut out = Vec::with_capacity(blocks.len());
                for sub in blocks {
                    let rows = self.weighted_block(sub, x, derivs)?;
                    out.push((sub, rows));
                }
                Ok(WeightedRows { blocks: out })
            }
        }
    }

    /// d^alpha (psi phi) for one subdomain by the Leibniz rule over the
    /// tensor-product weight.
    fn weighted_block(
        &self,
        sub: usize,
        x: &[f64; MAX_DIM],
        derivs: &[Deriv],
    ) -> Result<Vec<Vec<f64>>, RfmError> {
        let dim = self.partition.dim();
        let l = self.partition.affine_map(sub, x);
        let hw = &self.partition.subdomain(sub).half_width;
        // psi axis factors and their scaled derivatives up to order 2
        let mut psi_d = [[0.0; 3]; MAX_DIM];
        for a in 0..dim {
            for o in 0..3 {
                psi_d[a][o] = pou_b_deriv(l[a], o) / hw[a].powi(o as i32);
            }
        }
        // collect every phi multi-index needed by any beta <= alpha
        let mut needed: Vec<Deriv> = Vec::new();
        for dalpha in derivs {
            for_each_sub_index(dalpha, dim, &mut |beta| {
                let mut rem = *dalpha;
                for a in 0..MAX_DIM {
                    rem.0[a] -= beta.0[a];
                }
                if !needed.contains(&rem) {
                    needed.push(rem);
                }
            });
        }
        let basis = self.bank.eval(self.partition, sub, x, &needed)?;
        let j = self.bank.features_per_subdomain();
        let mut rows = vec![vec![0.0; j]; derivs.len()];
        for (oi, dalpha) in derivs.iter().enumerate() {
            for_each_sub_index(dalpha, dim, &mut |beta| {
                // coefficient C(alpha, beta) * prod_a psi^(beta_a)
                let mut coef = 1.0;
                for a in 0..dim {
                    coef *= binom(dalpha.0[a] as usize, beta.0[a] as usize)
                        * psi_d[a][beta.0[a] as usize];
                }
                if coef == 0.0 {
                    return;
                }
                let mut rem = *dalpha;
                for a in 0..MAX_DIM {
                    rem.0[a] -= beta.0[a];
                }
                let src = needed.iter().position(|d| *d == rem).unwrap();
                for (dst, s) in rows[oi].iter_mut().zip(&basis.partials[src]) {
                    *dst += coef * s;
                }
            });
        }
        Ok(rows)
    }
}

fn binom(n: usize, k: usize) -> f64 {
    const B: [[f64; 4]; 4] =
        [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    B[n][k]
}

fn for_each_sub_index(alpha: &Deriv, dim: usize, f: &mut impl FnMut(Deriv)) {
    let mut beta = Deriv([0; MAX_DIM]);
    loop {
        f(beta);
        // odometer over beta <= alpha
        let mut a = 0;
        loop {
            if a == dim {
                return;
            }
            if beta.0[a] < alpha.0[a] {
                beta.0[a] += 1;
                break;
            }
            beta.0[a] = 0;
            a += 1;
        }
    }
}

fn enumerate_product(
    axis_cands: &[Vec<usize>],
    stack: &mut [usize],
    axis: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if axis == axis_cands.len() {
        f(stack);
        return;
    }
    for &c in &axis_cands[axis] {
        stack[axis] = c;
        enumerate_product(axis_cands, stack, axis + 1, f);
    }
}

struct InteriorCache {
    x: [f64; MAX_DIM],
    /// (subdomain, offset into slot_data) per contributing block
    blocks: Vec<(u32, usize)>,
    /// manufactured source for each component
    f: [f64; MAX_K],
}

struct LinRow {
    segs: Vec<(u32, Vec<f64>)>,
    rhs: f64,
}

/// The discretized nonlinear least-squares system F(u) with cached basis
/// evaluations at every collocation point.
pub struct RfmSystem {
    problem: PdeProblem,
    partition: Partition,
    bank: FeatureBank,
    pou: PouKind,
    scaling: ScalingMode,
    features: usize,
    n: usize,
    interior: Vec<InteriorCache>,
    slot_data: Vec<f64>,
    lin_rows: Vec<LinRow>,
    n_continuity: usize,
    n_boundary_rows: usize,
    colloc: CollocationSets,
}

impl RfmSystem {
    pub fn build(
        problem: PdeProblem,
        subdivisions: &[usize],
        q: &[usize],
        features: usize,
        seed: u64,
        pou: PouKind,
        scaling: ScalingMode,
        curve_override: Option<CurveSampling>,
    ) -> Result<Self, RfmError> {
        let partition = Partition::new(&problem.bounds, subdivisions)?;
        let bank = FeatureBank::sample(&partition, features, problem.feature_range, seed);
        let curves = curve_override.unwrap_or(problem.curve_sampling);
        let colloc = crate::collocation::generate_collocation(
            &partition,
            q,
            &problem.geometry,
            &problem.face_active(),
            &curves,
        )?;
        if pou == PouKind::B && problem.max_order() > 2 {
            return Err(RfmError::UnsupportedPou(problem.max_order()));
        }
        Self::from_collocation(problem, partition, bank, colloc, pou, scaling)
    }

    pub fn from_collocation(
        problem: PdeProblem,
        partition: Partition,
        bank: FeatureBank,
        colloc: CollocationSets,
        pou: PouKind,
        scaling: ScalingMode,
    ) -> Result<Self, RfmError> {
        let features = bank.features_per_subdomain();
        let k = problem.components;
        let n = partition.len() * features * k;
        let evaluator = FieldEvaluator { partition: &partition, bank: &bank, pou };
        let n_slots = problem.slots.len();

        // interior caches, chunk-parallel with ordered reassembly
        let pts = &colloc.interior;
        let chunks = par::ordered_chunk_fold(pts.len(), 64, |range| {
            let mut local: Vec<(InteriorCache, Vec<f64>)> = Vec::with_capacity(range.len());
            for i in range {
                let p = &pts[i];
                let rows = evaluator
                    .weighted_rows(p.sub as usize, &p.x, &problem.slots)
                    .expect("interior basis evaluation");
                let mut f = [0.0; MAX_K];
                let src = problem.source(&p.x).expect("source evaluation");
                f[..k].copy_from_slice(&src[..k]);
                let mut data = Vec::with_capacity(rows.blocks.len() * n_slots * features);
                let mut blocks = Vec::with_capacity(rows.blocks.len());
                for (sub, per_deriv) in rows.blocks {
                    blocks.push((sub as u32, data.len()));
                    for dr in per_deriv {
                        data.extend_from_slice(&dr);
                    }
                }
                local.push((InteriorCache { x: p.x, blocks, f }, data));
            }
            local
        });
        let mut interior = Vec::with_capacity(pts.len());
        let mut slot_data = Vec::new();
        for chunk in chunks {
            for (mut cache, data) in chunk {
                let base = slot_data.len();
                for b in &mut cache.blocks {
                    b.1 += base;
                }
                slot_data.extend_from_slice(&data);
                interior.push(cache);
            }
        }

        // continuity rows (indicator PoU only; the C^1 weight blends instead)
        let mut lin_rows = Vec::new();
        if pou == PouKind::A {
            for ip in &colloc.interface {
                let axis = ip.axis as usize;
                for c in 0..k {
                    let order = problem.orders[c][axis] as usize;
                    for s in 0..order {
                        let d = Deriv::axis(axis, s as u8);
                        let left =
                            bank.eval(&partition, ip.left as usize, &ip.x, &[d])?.partials.remove(0);
                        let right = bank
                            .eval(&partition, ip.right as usize, &ip.x, &[d])?
                            .partials
                            .remove(0);
                        let neg: Vec<f64> = right.iter().map(|v| -v).collect();
                        lin_rows.push(LinRow {
                            segs: vec![
                                (col_start(ip.left as usize, c, k, features), left),
                                (col_start(ip.right as usize, c, k, features), neg),
                            ],
                            rhs: 0.0,
                        });
                    }
                }
            }
        }
        let n_continuity = lin_rows.len();

        // boundary rows
        for bp in &colloc.boundary {
            let conditions: &[crate::problems::BoundaryCondition] = match bp.tag {
                BoundaryTag::Face { axis, side } => &problem.face_bcs[axis as usize][side as usize],
                BoundaryTag::Curve { .. } => &problem.curve_bcs,
            };
            for bc in conditions {
                let rows = evaluator.weighted_rows(bp.sub as usize, &bp.x, &[bc.deriv])?;
                let segs = rows
                    .blocks
                    .into_iter()
                    .map(|(sub, mut per_deriv)| {
                        (col_start(sub, bc.component, k, features), per_deriv.remove(0))
                    })
                    .collect();
                lin_rows.push(LinRow { segs, rhs: problem.bc_data(bc.component, bc.deriv, &bp.x) });
            }
        }
        let n_boundary_rows = lin_rows.len() - n_continuity;

        Ok(Self {
            problem,
            partition,
            bank,
            pou,
            scaling,
            features,
            n,
            interior,
            slot_data,
            lin_rows,
            n_continuity,
            n_boundary_rows,
            colloc,
        })
    }

    pub fn problem(&self) -> &PdeProblem {
        &self.problem
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn collocation(&self) -> &CollocationSets {
        &self.colloc
    }

    pub fn interior_rows(&self) -> usize {
        self.interior.len() * self.problem.components
    }

    pub fn continuity_rows(&self) -> usize {
        self.n_continuity
    }

    pub fn boundary_rows(&self) -> usize {
        self.n_boundary_rows
    }

    /// Slot values of every (component, slot) at interior point `i`.
    fn slot_values(&self, i: usize, u: &[f64]) -> SlotValues {
        let k = self.problem.components;
        let ns = self.problem.slots.len();
        let j = self.features;
        let cache = &self.interior[i];
        let mut w: SlotValues = [[0.0; MAX_SLOTS]; MAX_K];
        for (sub, off) in &cache.blocks {
            for s in 0..ns {
                let row = &self.slot_data[off + s * j..off + (s + 1) * j];
                for c in 0..k {
                    let cs = col_start(*sub as usize, c, k, j) as usize;
                    w[c][s] += dot(row, &u[cs..cs + j]);
                }
            }
        }
        w
    }

    /// Evaluate the discrete field (and derivatives) of one component at an
    /// arbitrary point of the bounding box.
    pub fn eval_field(
        &self,
        u: &[f64],
        component: usize,
        x: &[f64; MAX_DIM],
        derivs: &[Deriv],
    ) -> Result<Vec<f64>, RfmError> {
        if !self.partition.contains(x) {
            return Err(RfmError::OutsideDomain);
        }
        let evaluator =
            FieldEvaluator { partition: &self.partition, bank: &self.bank, pou: self.pou };
        let anchor = self.partition.containing_subdomain(x);
        let rows = evaluator.weighted_rows(anchor, x, derivs)?;
        let k = self.problem.components;
        let j = self.features;
        let mut out = vec![0.0; derivs.len()];
        for (sub, per_deriv) in rows.blocks {
            let cs = col_start(sub, component, k, j) as usize;
            for (o, row) in per_deriv.iter().enumerate() {
                out[o] += dot(row, &u[cs..cs + j]);
            }
        }
        Ok(out)
    }
}

#[inline]
fn col_start(sub: usize, component: usize, k: usize, j: usize) -> u32 {
    ((sub * k + component) * j) as u32
}

impl NlsSystem for RfmSystem {
    fn n_unknowns(&self) -> usize {
        self.n
    }

    fn m_residuals(&self) -> usize {
        self.interior_rows() + self.lin_rows.len()
    }

    fn residual(&self, u: &[f64], out: &mut [f64]) {
        assert_eq!(u.len(), self.n);
        assert_eq!(out.len(), self.m_residuals());
        let k = self.problem.components;
        let m_int = self.interior_rows();
        let (int_out, lin_out) = out.split_at_mut(m_int);
        par::fill_records(int_out, k, |i, rec| {
            let w = self.slot_values(i, u);
            let vals = (self.problem.op)(&self.interior[i].x, &w);
            for c in 0..k {
                rec[c] = vals[c] - self.interior[i].f[c];
            }
        });
        par::fill_records(lin_out, 1, |r, rec| {
            let row = &self.lin_rows[r];
            let mut s = -row.rhs;
            for (cs, seg) in &row.segs {
                s += dot(seg, &u[*cs as usize..*cs as usize + seg.len()]);
            }
            rec[0] = s;
        });
    }

    fn jacobian(&self, u: &[f64]) -> DenseMatrix {
        let k = self.problem.components;
        let ns = self.problem.slots.len();
        let j = self.features;
        let m = self.m_residuals();
        let mut out = DenseMatrix::zeros(m, self.n);
        let n = self.n;
        let m_int = self.interior_rows();
        let (int_part, lin_part) = out.data_mut().split_at_mut(m_int * n);
        // one interior point = k consecutive rows
        par::for_each_chunk_mut(int_part, k * n, |i, rows| {
            let cache = &self.interior[i];
            let w = self.slot_values(i, u);
            let grad = (self.problem.op_grad)(&cache.x, &w);
            for q in 0..k {
                let row = &mut rows[q * n..(q + 1) * n];
                for (sub, off) in &cache.blocks {
                    for c in 0..k {
                        let cs = col_start(*sub as usize, c, k, j) as usize;
                        for s in 0..ns {
                            let coef = grad[q][c][s];
                            if coef != 0.0 {
                                let src = &self.slot_data[off + s * j..off + (s + 1) * j];
                                for (d, v) in row[cs..cs + j].iter_mut().zip(src) {
                                    *d += coef * v;
                                }
                            }
                        }
                    }
                }
            }
        });
        par::for_each_chunk_mut(lin_part, n, |r, row| {
            for (cs, seg) in &self.lin_rows[r].segs {
                row[*cs as usize..*cs as usize + seg.len()].copy_from_slice(seg);
            }
        });
        out
    }

    fn scaling(&self) -> ScalingMode {
        self.scaling
    }
}
