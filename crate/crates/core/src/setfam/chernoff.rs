use num_traits::Signed;

use super::SetFamError;
use crate::rational::{to_f64, Rational};

/// Tail bound `e^{-2 t δ²} (1 + 1/(2δ²))` on the measure of a prefix-dense family.
pub fn chernoff_bound(t: u64, delta: f64) -> f64 {
    let two_d2 = 2.0 * delta * delta;
    (-(t as f64) * two_d2).exp() * (1.0 + 1.0 / two_d2)
}

/// Smallest `t >= 1` with `chernoff_bound(t, delta) < eps`.
pub fn chernoff_t(eps: &Rational, delta: &Rational) -> Result<u64, SetFamError> {
    if !eps.is_positive() || !delta.is_positive() {
        return Err(SetFamError::NonPositive);
    }
    let (e, d) = (to_f64(eps), to_f64(delta));
    let two_d2 = 2.0 * d * d;
    let c = ((1.0 + 1.0 / two_d2) / e).ln() / two_d2;
    let mut t = if c < 1.0 { 1 } else { c.floor() as u64 + 1 };
    // settle the float estimate against the bound itself
    while t > 1 && chernoff_bound(t - 1, d) < e {
        t -= 1;
    }
    while chernoff_bound(t, d) >= e {
        t += 1;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn half_and_tenth_gives_232() {
        let t = chernoff_t(&ratio(1, 2), &ratio(1, 10)).unwrap();
        assert_eq!(t, 232);
        assert!(chernoff_bound(232, 0.1) < 0.5);
        assert!(chernoff_bound(231, 0.1) >= 0.5);
    }

    #[test]
    fn large_eps_gives_one() {
        // 1 + 1/(2δ²) = 3 at δ = 1/2; any eps above e^{-1/2}·3 is met at t = 1
        assert_eq!(chernoff_t(&int(3), &ratio(1, 2)).unwrap(), 1);
        assert_eq!(chernoff_t(&int(100), &ratio(1, 10)).unwrap(), 1);
    }

    #[test]
    fn monotone_in_both_arguments() {
        let mut prev = u64::MAX;
        for den in [2, 4, 8, 16, 32] {
            let d = ratio(1, den);
            let t = chernoff_t(&ratio(1, 4), &d).unwrap();
            assert!(t >= 1);
            assert!(prev == u64::MAX || t >= prev, "halving delta must not lower t");
            prev = t;
        }
        for den in [2, 3, 10, 100] {
            let a = chernoff_t(&ratio(1, den), &ratio(1, 5)).unwrap();
            let b = chernoff_t(&ratio(1, den * 2), &ratio(1, 5)).unwrap();
            assert!(a <= b);
            let wide = chernoff_t(&ratio(1, den), &ratio(2, 5)).unwrap();
            assert!(wide <= a, "doubling delta never increases t");
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(chernoff_t(&int(0), &ratio(1, 2)).is_err());
        assert!(chernoff_t(&ratio(1, 2), &ratio(-1, 2)).is_err());
    }
}
