//! Closed-form brackets on `M(A)` and `P(A)` for the two families.

use crate::linalg::C64;

/// `√2(√5 − 1)/(1 + √5)^{3/2}`.
pub fn c0() -> f64 {
    let s5 = 5f64.sqrt();
    2f64.sqrt() * (s5 - 1.0) / (1.0 + s5).powf(1.5)
}

/// `|β|/√(1 − |β|²)`.
fn ratio(beta: C64) -> f64 {
    let b = beta.norm();
    b / (1.0 - b * b).sqrt()
}

/// Brackets for the conjugated backward shift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjShiftBrackets {
    pub m_lower: f64,
    pub m_upper: f64,
    pub p_lower: f64,
    /// The `P` upper bracket is the smaller of this and `M`.
    pub p_upper_const: f64,
}

pub fn conj_shift_brackets(beta: C64) -> ConjShiftBrackets {
    let r = ratio(beta);
    ConjShiftBrackets {
        m_lower: r.max(1.0),
        m_upper: 1.0 + r,
        p_lower: (c0() * r).max(1.0),
        p_upper_const: 1.0 + c0() * r,
    }
}

/// The lower expressions and upper bound on `M` for the real-part family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealPartBrackets {
    /// `|β − β̄(1 − |β|²)| / (2√(1 − |β|²))`.
    pub first: f64,
    /// Second expression with `2 + β̄²`.
    pub second_plus: f64,
    /// Second expression with `2 − β̄³`.
    pub second_minus: f64,
    /// `(1 + |β|)/(1 − |β|)`.
    pub upper: f64,
    /// `1 + 2|β|/(1 − |β|)`.
    pub proof_upper: f64,
}

impl RealPartBrackets {
    /// Largest lower bound on `M`, using the smaller second-expression variant
    /// and the trivial bound `M ≥ ‖A⁰‖ = 1`.
    pub fn m_floor(&self) -> f64 {
        self.first.max(self.second_plus.min(self.second_minus)).max(1.0)
    }
}

pub fn real_part_brackets(beta: C64) -> RealPartBrackets {
    let b = beta.norm();
    let d = 1.0 - b * b;
    let bc = beta.conj();
    let first = (beta - bc * d).norm() / (2.0 * d.sqrt());
    let second = |head: C64| d.sqrt() / 8.0 * (head / d - 2.0 * bc - bc.powi(3)).norm();
    RealPartBrackets {
        first,
        second_plus: second(2.0 + bc * bc),
        second_minus: second(2.0 - bc.powi(3)),
        upper: (1.0 + b) / (1.0 - b),
        proof_upper: 1.0 + 2.0 * b / (1.0 - b),
    }
}

/// `max{1, √(M/(2e))}`.
pub fn real_part_p_floor(m: f64) -> f64 {
    (m / (2.0 * std::f64::consts::E)).sqrt().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c0_value() {
        assert!((c0() - 0.30028).abs() < 5e-6, "{}", c0());
    }

    #[test]
    fn conj_shift_examples() {
        let b = conj_shift_brackets(C64::new(0.9, 0.0));
        assert!((b.m_lower - 2.0647).abs() < 1e-4);
        assert!((b.m_upper - 3.0647).abs() < 1e-4);
        assert_eq!(b.p_lower, 1.0);
        assert!((b.p_upper_const - 1.6200).abs() < 1e-4);
        let small = conj_shift_brackets(C64::new(0.1, 0.0));
        assert_eq!(small.m_lower, 1.0);
        assert!((small.m_upper - 1.1005).abs() < 1e-4);
        let half = conj_shift_brackets(C64::new(0.5, 0.0));
        assert!((half.m_upper - 1.5774).abs() < 1e-4);
    }

    #[test]
    fn brackets_depend_on_modulus_only() {
        assert_eq!(conj_shift_brackets(C64::new(0.6, 0.0)), conj_shift_brackets(C64::new(0.0, 0.6)));
        let a = real_part_brackets(C64::new(0.6, 0.0));
        let b = real_part_brackets(C64::new(0.0, 0.6));
        assert_eq!(a.upper, b.upper);
    }

    #[test]
    fn real_part_examples() {
        let imag = real_part_brackets(C64::new(0.0, 0.9));
        assert!((imag.first - 1.2285).abs() < 1e-4, "{}", imag.first);
        assert!((imag.upper - 19.0).abs() < 1e-12);
        assert!((imag.m_floor() - 1.2285).abs() < 1e-4);
        let real = real_part_brackets(C64::new(0.8, 0.0));
        assert!((real.first - 0.4267).abs() < 1e-4);
        assert!((real.second_plus - 0.3916).abs() < 1e-4, "{}", real.second_plus);
        assert_eq!(real.m_floor(), 1.0);
        // the two printed upper bounds coincide algebraically
        assert!((real.upper - real.proof_upper).abs() < 1e-12);
    }
}
