//! q-shifted factorials and the q-exponential family E_q^{(μ)}.

use crate::error::{Error, Result};

/// (p;q)ₙ = Π_{j<n} (1 − p qʲ), direct product.
pub fn q_poch(p: f64, q: f64, n: usize) -> f64 {
    let mut prod = 1.0;
    let mut pq = p;
    for _ in 0..n {
        prod *= 1.0 - pq;
        pq *= q;
    }
    prod
}

/// ln|(p;q)ₙ| and its sign; any q > 0 (including q > 1).
pub fn ln_q_poch(p: f64, q: f64, n: usize) -> (f64, f64) {
    let mut ln_abs = 0.0;
    let mut sign = 1.0;
    let mut pq = p;
    for _ in 0..n {
        let f = 1.0 - pq;
        if f == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        if f < 0.0 {
            sign = -sign;
        }
        ln_abs += if pq.abs() < 0.5 { (-pq).ln_1p() } else { f.abs().ln() };
        pq *= q;
    }
    (ln_abs, sign)
}

/// (p;q)_∞ for 0 < q < 1, accumulated in log space.
pub fn q_poch_inf(p: f64, q: f64) -> Result<f64> {
    let (l, s) = ln_q_poch_inf(p, q)?;
    Ok(s * l.exp())
}

/// ln|(p;q)_∞| and sign.
pub fn ln_q_poch_inf(p: f64, q: f64) -> Result<(f64, f64)> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("(p;q)_inf needs 0 < q < 1, got q = {q}")));
    }
    let mut ln_abs = 0.0;
    let mut sign = 1.0;
    let mut pq = p;
    while pq.abs() >= 1e-17 {
        let f = 1.0 - pq;
        if f == 0.0 {
            return Ok((f64::NEG_INFINITY, 0.0));
        }
        if f < 0.0 {
            sign = -sign;
        }
        ln_abs += if pq.abs() < 0.5 { (-pq).ln_1p() } else { f.abs().ln() };
        pq *= q;
    }
    Ok((ln_abs, sign))
}

/// E_q^{(μ)}(x) = Σ q^{μn²} xⁿ / (q;q)ₙ.
pub fn q_exp(mu: f64, q: f64, x: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q-exponential needs 0 < q < 1, got q = {q}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if mu < 0.0 || (mu == 0.0 && x.abs() >= 1.0) {
        return Err(Error::NoConvergence(format!("E_q^(mu) series diverges for mu = {mu}, x = {x}")));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut quiet = 0;
    for n in 1..1_000_000usize {
        let nf = n as f64;
        // term ratio q^{μ(2n−1)} x / (1 − qⁿ)
        term *= q.powf(mu * (2.0 * nf - 1.0)) * x / (1.0 - q.powi(n as i32));
        sum += term;
        let ratio = q.powf(mu * (2.0 * nf + 1.0)) * x.abs() / (1.0 - q);
        // geometric bound on the remaining tail once the ratio is below 1
        let tail = if ratio < 1.0 { term.abs() * ratio / (1.0 - ratio) } else { f64::INFINITY };
        if tail < 1e-16 * sum.abs() || term == 0.0 {
            quiet += 1;
            if quiet >= 3 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
        if !sum.is_finite() {
            break;
        }
    }
    Err(Error::NoConvergence(format!("E_q^(mu)({x}) did not converge")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn finite_products() {
        assert_eq!(q_poch(0.7, 0.5, 0), 1.0);
        assert_relative_eq!(q_poch(0.5, 0.5, 3), 0.328_125, max_relative = 1e-15);
        assert_eq!(q_poch(1.0, 0.3, 4), 0.0);
        let (l, s) = ln_q_poch(0.5, 0.5, 3);
        assert_eq!(s, 1.0);
        assert_relative_eq!(l.exp(), 0.328_125, max_relative = 1e-14);
        // base above one: (0.3; 2)_3 = 0.7·0.4·(−0.2)
        let (l, s) = ln_q_poch(0.3, 2.0, 3);
        assert_eq!(s, -1.0);
        assert_relative_eq!(l.exp(), 0.056, max_relative = 1e-13);
    }

    #[test]
    fn infinite_products() {
        assert_eq!(q_poch_inf(0.0, 0.5).unwrap(), 1.0);
        assert_relative_eq!(q_poch_inf(0.5, 0.5).unwrap(), 0.288_788_095_086_602_4, max_relative = 1e-13);
        // mpmath qp(-1, 0.5)
        assert_relative_eq!(q_poch_inf(-1.0, 0.5).unwrap(), 4.768_462_058_062_743, max_relative = 1e-13);
        assert!(q_poch_inf(0.5, 1.0).is_err());
    }

    #[test]
    fn q_exponential() {
        assert_eq!(q_exp(0.5, 0.5, 0.0).unwrap(), 1.0);
        assert_relative_eq!(q_exp(0.5, 0.5, 1.0).unwrap(), 3.228_858_096_247_560_3, max_relative = 1e-13);
        let q = 0.5f64;
        assert!(q_exp(0.5, q, -1.0 / q.sqrt()).unwrap().abs() < 1e-14);
        assert!(q_exp(-0.1, q, 0.5).is_err());
        assert!(q_exp(0.0, q, 1.5).is_err());
        // μ = 0 is the geometric-type series 1/(x;q)_∞
        assert_relative_eq!(q_exp(0.0, q, 0.4).unwrap(), 1.0 / q_poch_inf(0.4, q).unwrap(), max_relative = 1e-13);
    }

    #[test]
    fn euler_identity_grid() {
        for q in [0.3, 0.5, 0.8] {
            for i in 0..=8 {
                let x = 0.5 * i as f64;
                let lhs = q_exp(0.5, q, x).unwrap();
                let rhs = q_poch_inf(-q.sqrt() * x, q).unwrap();
                assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
            }
        }
    }
}
