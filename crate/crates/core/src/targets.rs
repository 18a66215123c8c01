//! Closed-form reference behaviors.

use crate::behavior::{Behavior, Scenario};
use crate::scalar::{QSqrt2, Scalar};

fn sgn(bit: usize) -> i64 {
    if bit & 1 == 0 {
        1
    } else {
        -1
    }
}

fn delta(a: usize, b: usize) -> i64 {
    (a == b) as i64
}

/// `(2 + (−1)^{a⊕c⊕xz}√2)/8`: the Tsirelson-optimal correlations.
pub fn tsirelson_box() -> Behavior {
    Behavior::from_fn(Scenario::bipartite_binary(), |o, s| {
        Scalar::Exact(QSqrt2::from_parts(1, 4, sgn(o[0] ^ o[1] ^ (s[0] * s[1])), 8))
    })
    .expect("shape")
}

/// `δ_{a⊕c,xz}/2`.
pub fn pr_box() -> Behavior {
    Behavior::from_fn(Scenario::bipartite_binary(), |o, s| {
        Scalar::Exact(QSqrt2::from_ratio(delta(o[0] ^ o[1], s[0] * s[1]), 2))
    })
    .expect("shape")
}

/// Party order `(A, B, C)`, settings `(X, Y, Z)`.
///
/// * `Y = 0`: `(1 + (−1)^{A⊕B} δ_{X,0}) / 8`
/// * `Y = 1`: `δ_{B,1}/4 + ((−1)^B / 4) · (2 + (−1)^{A⊕C⊕XZ}√2) / 8`
pub fn theorem1_behavior() -> Behavior {
    Behavior::from_fn(Scenario::tripartite_binary(), |o, s| {
        let (a, b, c) = (o[0], o[1], o[2]);
        let (x, y, z) = (s[0], s[1], s[2]);
        if y == 0 {
            Scalar::Exact(QSqrt2::from_ratio(1 + sgn(a ^ b) * delta(x, 0), 8))
        } else {
            let chsh = QSqrt2::from_parts(1, 4, sgn(a ^ c ^ (x * z)), 8);
            Scalar::Exact(QSqrt2::from_ratio(delta(b, 1), 4) + QSqrt2::from_ratio(sgn(b), 4) * chsh)
        }
    })
    .expect("shape")
}

/// * `Y = 0`: `δ_{A,B} / 4`
/// * `Y = 1`: `δ_{B,1}/4 + ((−1)^B / 2) · δ_{A⊕C,XZ} / 2`
pub fn theorem2_behavior() -> Behavior {
    Behavior::from_fn(Scenario::tripartite_binary(), |o, s| {
        let (a, b, c) = (o[0], o[1], o[2]);
        let (x, y, z) = (s[0], s[1], s[2]);
        if y == 0 {
            Scalar::Exact(QSqrt2::from_ratio(delta(a, b), 4))
        } else {
            Scalar::Exact(QSqrt2::from_ratio(delta(b, 1), 4) + QSqrt2::from_ratio(sgn(b) * delta(a ^ c, x * z), 4))
        }
    })
    .expect("shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{chsh_value, theorem1_conditions_check, ChshThreshold};

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::Exact(QSqrt2::from_ratio(n, d))
    }

    #[test]
    fn closed_forms_are_valid_and_nonsignaling() {
        for b in [tsirelson_box(), pr_box(), theorem1_behavior(), theorem2_behavior()] {
            assert!(b.validate().passed);
            assert!(b.no_signaling_check().passed);
        }
    }

    #[test]
    fn theorem1_derived_values() {
        let b = theorem1_behavior();
        let r = theorem1_conditions_check(&b, ChshThreshold::Quantum).unwrap();
        assert!(r.passed);
        assert_eq!(r.p_b0_given_y1, q(1, 4));
        assert_eq!(r.p_a_eq_b_given_x0_y0, q(1, 1));
        assert_eq!(b.event_probability(&[1, 0, 0], |o| o[0] == o[1]), q(1, 2));
        let c = b.condition(1, 1, 0).unwrap();
        assert_eq!(c.behavior, tsirelson_box());
        let ac = b.marginalize(&[0, 2]).unwrap();
        assert!(ac.entries().iter().all(|e| *e == q(1, 4)));
    }

    #[test]
    fn theorem2_derived_values() {
        let b = theorem2_behavior();
        let c = b.condition(1, 1, 0).unwrap();
        assert_eq!(c.behavior, pr_box());
        assert_eq!(chsh_value(&c.behavior).unwrap(), q(4, 1));
        // Summing the Y = 1 formula over A, C gives 1/2 for B = 0.
        assert_eq!(c.event_probability, q(1, 2));
        let r = theorem1_conditions_check(&b, ChshThreshold::NoSignaling).unwrap();
        assert!(r.passed);
        assert!(!theorem1_conditions_check(&b, ChshThreshold::Quantum).unwrap().passed);
        for x in 0..2 {
            assert_eq!(b.event_probability(&[x, 0, 0], |o| o[0] == o[1]), q(1, 1));
        }
    }
}
