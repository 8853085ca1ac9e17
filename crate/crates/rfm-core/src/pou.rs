//! Partition-of-unity weight functions on normalized coordinates.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PouKind {
    /// Indicator of [-1, 1]: discontinuous, minimal support. Interface
    /// smoothness must then be enforced by explicit continuity rows.
    #[default]
    A,
    /// C^1 bump with support [-5/4, 5/4]; no continuity rows are needed for
    /// operators of order at most two.
    B,
}

/// Univariate weight phi^a or phi^b at normalized coordinate y.
pub fn pou_eval(kind: PouKind, y: f64) -> f64 {
    match kind {
        PouKind::A => {
            if y.abs() <= 1.0 {
                1.0
            } else {
                0.0
            }
        }
        PouKind::B => pou_b_deriv(y, 0),
    }
}

/// phi^b and its first two derivatives (0 <= order <= 2). The transition
/// band 3/4 <= |y| <= 5/4 carries (1 - sin(2 pi |y|)) / 2.
pub fn pou_b_deriv(y: f64, order: usize) -> f64 {
    let a = y.abs();
    if a < 0.75 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    if a > 1.25 {
        return 0.0;
    }
    let s = if y < 0.0 { -1.0 } else { 1.0 };
    match order {
        0 => (1.0 - (2.0 * PI * a).sin()) / 2.0,
        1 => -PI * (2.0 * PI * a).cos() * s,
        2 => 2.0 * PI * PI * (2.0 * PI * a).sin(),
        _ => panic!("phi^b is only C^1; derivatives above 2 are not defined"),
    }
}

/// Support half-width of the univariate weight in normalized coordinates.
pub fn support_radius(kind: PouKind) -> f64 {
    match kind {
        PouKind::A => 1.0,
        PouKind::B => 1.25,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pou_b_spot_values() {
        assert_eq!(pou_eval(PouKind::B, 0.0), 1.0);
        assert!((pou_eval(PouKind::B, 1.0) - 0.5).abs() < 1e-15);
        assert!(pou_eval(PouKind::B, 1.25).abs() < 1e-15);
        assert!((pou_eval(PouKind::B, 0.75) - 1.0).abs() < 1e-15);
        assert_eq!(pou_eval(PouKind::B, 2.0), 0.0);
    }

    #[test]
    fn pou_a_is_the_indicator() {
        assert_eq!(pou_eval(PouKind::A, 0.999), 1.0);
        assert_eq!(pou_eval(PouKind::A, 1.0), 1.0);
        assert_eq!(pou_eval(PouKind::A, 1.0001), 0.0);
    }

    #[test]
    fn pou_b_overlap_sums_to_one() {
        // phi^b(y) + phi^b(2 - y) = 1 on the shared transition band of a
        // uniform 1-D partition.
        for k in 0..=1000 {
            let y = 0.75 + 0.5 * k as f64 / 1000.0;
            let s = pou_eval(PouKind::B, y) + pou_eval(PouKind::B, 2.0 - y);
            assert!((s - 1.0).abs() <= 1e-15, "y = {y}, sum = {s}");
        }
    }

    #[test]
    fn pou_b_derivatives_match_finite_differences() {
        let h = 1e-6;
        for &y in &[0.8, 0.9, 1.0, 1.1, 1.2, -0.85, -1.15] {
            let d1 = (pou_b_deriv(y + h, 0) - pou_b_deriv(y - h, 0)) / (2.0 * h);
            assert!((d1 - pou_b_deriv(y, 1)).abs() < 1e-6);
            let d2 = (pou_b_deriv(y + h, 1) - pou_b_deriv(y - h, 1)) / (2.0 * h);
            assert!((d2 - pou_b_deriv(y, 2)).abs() < 1e-5);
        }
    }
}
