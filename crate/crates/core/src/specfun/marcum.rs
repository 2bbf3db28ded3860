use super::gamma::erfc;
use crate::error::{domain, Result};
use std::f64::consts::SQRT_2;

/// Marcum Q-function of order one half.
///
/// Closed form `½[erfc((b−a)/√2) + erfc((b+a)/√2)]`, which is the survival
/// function of a noncentral χ² variable with one degree of freedom and
/// noncentrality `a²`, evaluated at `b²`.
pub fn marcum_q_half(a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0) || !(b >= 0.0) {
        return Err(domain("marcum_q_half", format!("a = {a}, b = {b}")));
    }
    if b == 0.0 {
        return Ok(1.0);
    }
    let q = 0.5 * (erfc((b - a) / SQRT_2) + erfc((b + a) / SQRT_2));
    Ok(q.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn survival_at_zero_is_one() {
        for a in [0.0, 0.3, 5.0, 40.0] {
            assert_eq!(marcum_q_half(a, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn central_case_is_chi_square_tail() {
        // Q_{1/2}(0, b) = erfc(b/√2)
        let q = marcum_q_half(0.0, 1.0).unwrap();
        assert!((q - 0.317_310_507_862_914_1).abs() < 1e-14);
    }

    #[test]
    fn rejects_negative_arguments() {
        assert!(marcum_q_half(-0.1, 1.0).is_err());
        assert!(marcum_q_half(1.0, -0.1).is_err());
    }

    proptest! {
        #[test]
        fn monotone_in_both_arguments(a in 0.0f64..20.0, b in 0.0f64..25.0, da in 0.0f64..2.0, db in 0.0f64..2.0) {
            let base = marcum_q_half(a, b).unwrap();
            prop_assert!((0.0..=1.0).contains(&base));
            prop_assert!(marcum_q_half(a, b + db).unwrap() <= base + 1e-15);
            prop_assert!(marcum_q_half(a + da, b).unwrap() >= base - 1e-15);
        }
    }
}
