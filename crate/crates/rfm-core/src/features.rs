//! Random feature bases: tanh ridge functions with frozen random weights on
//! normalized subdomain coordinates, with analytic derivatives up to third
//! order.

use crate::error::RfmError;
use crate::partition::{Partition, MAX_DIM};
use crate::rng;

/// Partial-derivative multi-index over up to three coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Deriv(pub [u8; MAX_DIM]);

impl Deriv {
    pub const VALUE: Deriv = Deriv([0, 0, 0]);

    pub fn axis(axis: usize, order: u8) -> Deriv {
        let mut d = [0u8; MAX_DIM];
        d[axis] = order;
        Deriv(d)
    }

    pub fn total_order(&self) -> usize {
        self.0.iter().map(|&o| o as usize).sum()
    }
}

/// Values and requested partial derivatives of the J features of one
/// subdomain at one point.
#[derive(Debug, Clone)]
pub struct BasisEval {
    pub values: Vec<f64>,
    /// Parallel to the requested order list.
    pub partials: Vec<Vec<f64>>,
}

/// Per-subdomain frozen random weights and biases for tanh features
/// phi_ij(x) = tanh(k_ij . l_i(x) + b_ij), with every component of k and b
/// drawn uniformly from [-R, R].
#[derive(Debug, Clone)]
pub struct FeatureBank {
    features_per_subdomain: usize,
    dim: usize,
    range: f64,
    seed: u64,
    /// weights[sub][j * dim + a]
    weights: Vec<Vec<f64>>,
    /// biases[sub][j]
    biases: Vec<Vec<f64>>,
}

impl FeatureBank {
    pub fn sample(partition: &Partition, j: usize, range: f64, seed: u64) -> Self {
        assert!(j >= 1, "need at least one feature per subdomain");
        assert!(range > 0.0, "weight range must be positive");
        let dim = partition.dim();
        let mut weights = Vec::with_capacity(partition.len());
        let mut biases = Vec::with_capacity(partition.len());
        for sub in 0..partition.len() {
            let key = rng::derive_key(seed, sub as u64);
            let mut w = Vec::with_capacity(j * dim);
            let mut b = Vec::with_capacity(j);
            let mut ctr = 0u64;
            for _ in 0..j {
                for _ in 0..dim {
                    w.push(rng::symmetric_f64(key, ctr, range));
                    ctr += 1;
                }
                b.push(rng::symmetric_f64(key, ctr, range));
                ctr += 1;
            }
            weights.push(w);
            biases.push(b);
        }
        Self { features_per_subdomain: j, dim, range, seed, weights, biases }
    }

    /// Construct from explicit weights (tests and mirrored-bank fixtures).
    pub fn from_raw(dim: usize, weights: Vec<Vec<f64>>, biases: Vec<Vec<f64>>) -> Self {
        let j = biases.first().map_or(0, |b| b.len());
        for (w, b) in weights.iter().zip(&biases) {
            assert_eq!(b.len(), j);
            assert_eq!(w.len(), j * dim);
        }
        Self { features_per_subdomain: j, dim, range: f64::NAN, seed: 0, weights, biases }
    }

    pub fn features_per_subdomain(&self) -> usize {
        self.features_per_subdomain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn weights(&self, sub: usize) -> &[f64] {
        &self.weights[sub]
    }

    pub fn biases(&self, sub: usize) -> &[f64] {
        &self.biases[sub]
    }

    /// Evaluate feature values and the requested partial derivatives at `x`
    /// for one subdomain. With z = k . l(x) + b the chain rule gives
    /// d^alpha phi = tanh^(|alpha|)(z) * prod_a (k_a / sigma_a)^alpha_a.
    pub fn eval(
        &self,
        partition: &Partition,
        sub: usize,
        x: &[f64; MAX_DIM],
        orders: &[Deriv],
    ) -> Result<BasisEval, RfmError> {
        for d in orders {
            if d.total_order() > 3 {
                return Err(RfmError::OrderTooHigh(d.total_order()));
            }
        }
        let j = self.features_per_subdomain;
        let dim = self.dim;
        let l = partition.affine_map(sub, x);
        let sd = partition.subdomain(sub);
        let w = &self.weights[sub];
        let b = &self.biases[sub];

        let mut values = vec![0.0; j];
        let mut partials = vec![vec![0.0; j]; orders.len()];
        // tanh derivative ladder per feature
        for f in 0..j {
            let mut z = b[f];
            for a in 0..dim {
                z += w[f * dim + a] * l[a];
            }
            let t0 = z.tanh();
            let t1 = 1.0 - t0 * t0;
            let t2 = -2.0 * t0 * t1;
            let t3 = -2.0 * (t1 * t1 + t0 * t2);
            let ladder = [t0, t1, t2, t3];
            values[f] = t0;
            for (oi, d) in orders.iter().enumerate() {
                let mut factor = 1.0;
                for a in 0..dim {
                    for _ in 0..d.0[a] {
                        factor *= w[f * dim + a] / sd.half_width[a];
                    }
                }
                partials[oi][f] = ladder[d.total_order()] * factor;
            }
        }
        Ok(BasisEval { values, partials })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Partition, FeatureBank) {
        let p = Partition::new(&[[0.0, 1.0]; 3], &[2, 2, 2]).unwrap();
        let bank = FeatureBank::sample(&p, 16, 1.0, 42);
        (p, bank)
    }

    #[test]
    fn sampling_is_deterministic_and_bounded() {
        let (p, bank) = setup();
        let again = FeatureBank::sample(&p, 16, 1.0, 42);
        for s in 0..p.len() {
            assert_eq!(bank.weights(s), again.weights(s));
            assert_eq!(bank.biases(s), again.biases(s));
            assert!(bank.weights(s).iter().all(|v| v.abs() <= 1.0));
            assert!(bank.biases(s).iter().all(|v| v.abs() <= 1.0));
        }
        let other = FeatureBank::sample(&p, 16, 1.0, 43);
        assert_ne!(bank.weights(0), other.weights(0));
    }

    #[test]
    fn empirical_support_check() {
        let p = Partition::new(&[[0.0, 1.0]], &[1]).unwrap();
        let bank = FeatureBank::sample(&p, 100_000, 0.7, 9);
        let max = bank.weights(0).iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        assert!(max <= 0.7);
        assert!(max > 0.69, "draws should fill the range, got {max}");
    }

    #[test]
    fn single_feature_hand_values() {
        // k = (1, 0, 0), b = 0 at the subdomain center: phi = tanh 0 = 0,
        // d phi / dx = 1 / sigma_x, and the second derivative vanishes by
        // odd symmetry.
        let p = Partition::new(&[[0.0, 0.5]; 3], &[1, 1, 1]).unwrap();
        let bank = FeatureBank::from_raw(
            3,
            vec![vec![1.0, 0.0, 0.0]],
            vec![vec![0.0]],
        );
        let center = [0.25, 0.25, 0.25];
        let e = bank
            .eval(&p, 0, &center, &[Deriv::axis(0, 1), Deriv::axis(0, 2)])
            .unwrap();
        assert_eq!(e.values[0], 0.0);
        assert!((e.partials[0][0] - 1.0 / 0.25).abs() < 1e-15);
        assert_eq!(e.partials[1][0], 0.0);
    }

    #[test]
    fn order_above_three_rejected() {
        let (p, bank) = setup();
        assert!(matches!(
            bank.eval(&p, 0, &[0.1, 0.1, 0.1], &[Deriv([2, 2, 0])]),
            Err(RfmError::OrderTooHigh(4))
        ));
    }

    #[test]
    fn partials_match_finite_differences() {
        let (p, bank) = setup();
        let orders = [
            Deriv::axis(0, 1),
            Deriv::axis(1, 1),
            Deriv::axis(2, 1),
            Deriv::axis(0, 2),
            Deriv([1, 1, 0]),
            Deriv::axis(1, 3),
        ];
        let mut worst1 = 0.0f64;
        let mut worst3 = 0.0f64;
        for trial in 0..50 {
            let x = [
                rng::unit_f64(100, trial * 3),
                rng::unit_f64(100, trial * 3 + 1),
                rng::unit_f64(100, trial * 3 + 2),
            ];
            let sub = p.containing_subdomain(&x);
            let e = bank.eval(&p, sub, &x, &orders).unwrap();
            let h = 1e-5;
            for (oi, d) in orders.iter().enumerate() {
                for f in 0..4 {
                    // central differences of the next-lower derivative
                    let (axis, lower) = {
                        let mut axis = 0;
                        let mut lower = *d;
                        for a in 0..3 {
                            if lower.0[a] > 0 {
                                axis = a;
                                lower.0[a] -= 1;
                                break;
                            }
                        }
                        (axis, lower)
                    };
                    let mut xp = x;
                    xp[axis] += h;
                    let mut xm = x;
                    xm[axis] -= h;
                    let ep = bank.eval(&p, sub, &xp, &[lower]).unwrap();
                    let em = bank.eval(&p, sub, &xm, &[lower]).unwrap();
                    let fd = (ep.partials[0][f] - em.partials[0][f]) / (2.0 * h);
                    let an = e.partials[oi][f];
                    let rel = (fd - an).abs() / an.abs().max(1.0);
                    if d.total_order() >= 3 {
                        worst3 = worst3.max(rel);
                    } else {
                        worst1 = worst1.max(rel);
                    }
                }
            }
        }
        assert!(worst1 < 1e-7, "low-order FD mismatch {worst1}");
        assert!(worst3 < 1e-5, "third-order FD mismatch {worst3}");
    }
}
