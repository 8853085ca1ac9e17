//! Derivative-free 1-D minimization by golden-section interval reduction.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

/// Minimize `phi` on [lo, hi] to bracket width `alpha_tol`, spending at most
/// `max_evals` evaluations. Returns the best evaluated point and its value.
pub fn golden_section<F: FnMut(f64) -> f64>(
    mut phi: F,
    lo: f64,
    hi: f64,
    alpha_tol: f64,
    max_evals: usize,
) -> (f64, f64) {
    assert!(lo < hi, "bracket must be nonempty");
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = phi(x1);
    let mut f2 = phi(x2);
    let mut evals = 2usize;
    let (mut best_x, mut best_f) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };

    while b - a > alpha_tol && evals < max_evals {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = phi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = phi(x2);
        }
        evals += 1;
        let (x, f) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
        if f < best_f {
            best_x = x;
            best_f = f;
        }
    }
    (best_x, best_f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_quadratic() {
        let (x, _) = golden_section(|a| (a - 1.0) * (a - 1.0), 0.0, 2.0, 1e-3, 40);
        assert!((x - 1.0).abs() <= 1e-3);
    }

    // Oracle: unimodal function with known minimizer 0.3.
    #[test]
    fn kinked_unimodal() {
        let (x, f) = golden_section(|a| (a - 0.3).abs() + 1.0, 0.0, 2.0, 1e-3, 40);
        assert!((x - 0.3).abs() <= 1e-3);
        assert!((f - 1.0).abs() <= 1e-3);
    }

    #[test]
    fn monotone_drives_to_left_endpoint() {
        let (x, _) = golden_section(|a| a, 0.0, 2.0, 1e-3, 60);
        assert!(x <= 1e-3);
    }

    #[test]
    fn eval_budget_is_respected() {
        let mut count = 0;
        let _ = golden_section(
            |a| {
                count += 1;
                (a - 0.5).powi(2)
            },
            0.0,
            2.0,
            1e-12,
            10,
        );
        assert!(count <= 10);
    }
}
