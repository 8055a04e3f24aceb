//! Log-Gamma with sign, via the Lanczos approximation (g = 7, 9 terms) and
//! the reflection formula for x < 1/2.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln|Γ(x)| together with the sign of Γ(x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnGamma {
    pub ln_abs: f64,
    pub sign: f64,
}

impl LnGamma {
    pub fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

/// sin(πx) with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let k = x.round();
    let r = x - k;
    let s = (PI * r).sin();
    if (k as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

fn lanczos_ln(x: f64) -> f64 {
    // valid for x >= 1/2
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn stirling_ln(x: f64) -> f64 {
    // x >= 10: asymptotic series, error below 1e-17 relative
    let x2 = x * x;
    let series = 1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0 - 1.0 / (1188.0 * x2)) / x2) / x2) / x2;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series / x
}

/// log|Γ(x)| with separate sign. Fails at the poles x ∈ {0, −1, −2, …}.
pub fn ln_gamma(x: f64) -> Result<LnGamma> {
    if x.is_nan() {
        return Err(Error::Domain("ln_gamma of NaN".into()));
    }
    if x <= 0.0 && x == x.round() {
        return Err(Error::Domain(format!("Gamma has a pole at x = {x}")));
    }
    if x >= 10.0 {
        return Ok(LnGamma { ln_abs: stirling_ln(x), sign: 1.0 });
    }
    if x >= 0.5 {
        return Ok(LnGamma { ln_abs: lanczos_ln(x), sign: 1.0 });
    }
    // Γ(x)Γ(1−x) = π / sin(πx), with Γ(1−x) > 0 here
    let s = sin_pi(x);
    let rest = ln_gamma(1.0 - x)?;
    Ok(LnGamma {
        ln_abs: PI.ln() - s.abs().ln() - rest.ln_abs,
        sign: s.signum(),
    })
}

/// ln Γ(x) for x > 0. NaN outside that range.
pub fn ln_gamma_pos(x: f64) -> f64 {
    if x <= 0.0 || x.is_nan() {
        return f64::NAN;
    }
    if x >= 10.0 {
        stirling_ln(x)
    } else if x >= 0.5 {
        lanczos_ln(x)
    } else {
        // Γ(x) = Γ(x+1)/x keeps the argument inside the Lanczos range
        lanczos_ln(x + 1.0) - x.ln()
    }
}

pub fn gamma(x: f64) -> Result<f64> {
    ln_gamma(x).map(|g| g.value())
}

/// ln n!
pub fn ln_factorial(n: usize) -> f64 {
    ln_gamma_pos(n as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integer_arguments() {
        assert_relative_eq!(ln_gamma(5.0).unwrap().ln_abs, 24f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(ln_gamma(1.0).unwrap().ln_abs, 0.0, epsilon = 1e-15);
        assert_relative_eq!(ln_gamma(2.0).unwrap().ln_abs, 0.0, epsilon = 1e-15);
        let mut lf = 0.0;
        for n in 1..=170 {
            lf += (n as f64).ln();
            assert_relative_eq!(ln_factorial(n), lf, max_relative = 1e-14);
        }
    }

    #[test]
    fn half_integer() {
        // Γ(1/2) = √π
        assert_relative_eq!(ln_gamma(0.5).unwrap().ln_abs, 0.5 * PI.ln(), max_relative = 1e-14);
        assert_relative_eq!(ln_gamma(0.5).unwrap().ln_abs, 0.572_364_942_924_700_1, max_relative = 1e-14);
    }

    #[test]
    fn negative_non_integer_uses_reflection() {
        // Γ(−2.5) = −8√π/15
        let g = ln_gamma(-2.5).unwrap();
        assert_eq!(g.sign, -1.0);
        let expected = (8.0 * PI.sqrt() / 15.0).ln();
        assert_relative_eq!(g.ln_abs, expected, max_relative = 1e-13);
        assert_relative_eq!(g.ln_abs, -0.056_243_716_497_674_05, max_relative = 1e-12);
        assert!(ln_gamma(-1.5).unwrap().sign > 0.0);
    }

    #[test]
    fn poles_are_errors() {
        for x in [0.0, -1.0, -7.0] {
            assert!(matches!(ln_gamma(x), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn duplication_formula() {
        // Γ(2x) = Γ(x)Γ(x+1/2)2^{2x−1}/√π
        for x in [0.5, 1.3, 2.7, 11.2, 40.1] {
            let lhs = ln_gamma_pos(2.0 * x);
            let rhs = ln_gamma_pos(x) + ln_gamma_pos(x + 0.5) + (2.0 * x - 1.0) * 2f64.ln() - 0.5 * PI.ln();
            assert_relative_eq!(lhs.exp(), rhs.exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn recurrence_across_branch_switch() {
        for x in [0.3, 0.7, 4.5, 9.5, 9.99, 10.0, 25.25] {
            let lhs = ln_gamma_pos(x + 1.0);
            let rhs = ln_gamma_pos(x) + f64::ln(x);
            assert!((lhs - rhs).abs() < 2e-14 * lhs.abs().max(1.0), "x={x}");
        }
    }
}
