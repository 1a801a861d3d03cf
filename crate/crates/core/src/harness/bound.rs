//! The reduction's success bound: with N = q_C + q_E + q_S + n,
//!
//! ```text
//! max over delta of (1 - delta)^N * delta^2  >=  4 / (e^2 (N + 2)^2)
//! ```
//!
//! The left side is attained at delta* = 2 / (N + 2). The check is done in
//! exact rational arithmetic: e is replaced by a truncated series, which is
//! strictly smaller than e, so the right side only grows and a pass is a
//! proof of the real inequality.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

const E_SERIES_TERMS: u32 = 40;
const GRID_STEPS: u32 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub q_c: u64,
    pub q_e: u64,
    pub q_s: u64,
    pub n: u64,
    /// Coin bias to evaluate at; defaults to delta*.
    pub delta: Option<f64>,
    /// The forger's advantage, used only to scale the reported epsilon'.
    pub epsilon: f64,
}

impl BoundParams {
    pub fn new(q_c: u64, q_e: u64, q_s: u64, n: u64) -> Self {
        BoundParams { q_c, q_e, q_s, n, delta: None, epsilon: 1.0 }
    }

    pub fn total(&self) -> u64 {
        self.q_c + self.q_e + self.q_s + self.n
    }

    /// 2 / (N + 2).
    pub fn default_delta(&self) -> f64 {
        2.0 / (self.total() as f64 + 2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub total: u64,
    pub delta_star: f64,
    pub f_at_delta_star: f64,
    pub delta: f64,
    pub f_at_delta: f64,
    pub grid_max: f64,
    pub grid_argmax: f64,
    /// 4 / (e^2 (N + 2)^2).
    pub rhs: f64,
    /// rhs * epsilon.
    pub epsilon_prime_lower: f64,
    /// The inequality, decided exactly.
    pub holds: bool,
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// sum_{k=0}^{40} 1/k!, a rational strictly below e.
pub fn e_lower() -> BigRational {
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    for k in 1..=E_SERIES_TERMS + 1 {
        sum += &term;
        term /= BigRational::from_integer(BigInt::from(k));
    }
    sum
}

/// (1 - delta)^N * delta^2, exactly.
pub fn f_exact(total: u64, delta: &BigRational) -> BigRational {
    let one_minus = BigRational::one() - delta;
    num_traits::pow(one_minus, total as usize) * delta * delta
}

/// f at delta* = 2 / (N + 2), i.e. (N / (N + 2))^N * 4 / (N + 2)^2.
pub fn f_at_optimum(total: u64) -> BigRational {
    f_exact(total, &ratio(2, total + 2))
}

/// 4 / (e_lower^2 (N + 2)^2), an upper bound on the right side.
pub fn rhs_upper(total: u64) -> BigRational {
    let e = e_lower();
    let m = BigRational::from_integer(BigInt::from(total + 2));
    BigRational::from_integer(BigInt::from(4)) / (&e * &e * &m * &m)
}

fn f64_f(total: u64, delta: f64) -> f64 {
    (1.0 - delta).powf(total as f64) * delta * delta
}

pub fn bound_check(p: &BoundParams) -> BoundReport {
    let total = p.total();
    let delta_star = p.default_delta();
    let delta = p.delta.unwrap_or(delta_star);
    let (mut grid_max, mut grid_argmax) = (f64_f(total, delta_star), delta_star);
    for k in 1..GRID_STEPS {
        let d = k as f64 / GRID_STEPS as f64;
        let v = f64_f(total, d);
        if v > grid_max {
            (grid_max, grid_argmax) = (v, d);
        }
    }
    let rhs = 4.0 / (std::f64::consts::E.powi(2) * ((total + 2) as f64).powi(2));
    BoundReport {
        total,
        delta_star,
        f_at_delta_star: f_at_optimum(total).to_f64().unwrap_or(f64::NAN),
        delta,
        f_at_delta: f64_f(total, delta),
        grid_max,
        grid_argmax,
        rhs,
        epsilon_prime_lower: rhs * p.epsilon,
        holds: f_at_optimum(total) >= rhs_upper(total),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e_lower_is_below_e_and_close() {
        let e = e_lower().to_f64().unwrap();
        assert!((e - std::f64::consts::E).abs() < 1e-15);
        // Tail after the last term is below 2/41!, so e - e_lower > 0.
        assert!(e_lower() < ratio(271_828_182_845_904_524, 100_000_000_000_000_000));
    }

    #[test]
    fn worked_point() {
        let r = bound_check(&BoundParams::new(10, 10, 10, 5));
        assert_eq!(r.total, 35);
        assert!((r.delta_star - 2.0 / 37.0).abs() < 1e-15);
        // (35/37)^35 * 4/37^2, recomputed independently in f64 via logs.
        let ln = 35.0 * (35.0f64 / 37.0).ln() + (4.0f64 / 1369.0).ln();
        assert!((r.f_at_delta_star - ln.exp()).abs() < 1e-15);
        assert!((r.f_at_delta_star - 4.18e-4).abs() < 5e-6);
        assert!((r.rhs - 3.95e-4).abs() < 5e-6);
        assert!(r.holds);
        assert!(r.grid_max >= r.f_at_delta_star);
    }

    #[test]
    fn empty_game() {
        let r = bound_check(&BoundParams::new(0, 0, 0, 0));
        assert_eq!(f_at_optimum(0), BigRational::one());
        assert!((r.rhs - 0.1353352832366127).abs() < 1e-15);
        assert!(r.holds);
    }

    #[test]
    fn rhs_decreases_in_every_count() {
        let base = bound_check(&BoundParams::new(3, 3, 3, 3)).rhs;
        for p in [
            BoundParams::new(4, 3, 3, 3),
            BoundParams::new(3, 4, 3, 3),
            BoundParams::new(3, 3, 4, 3),
            BoundParams::new(3, 3, 3, 4),
        ] {
            assert!(bound_check(&p).rhs < base);
        }
    }

    #[test]
    fn optimum_is_the_stationary_point() {
        for total in [1u64, 7, 35, 200] {
            let fs = f_at_optimum(total);
            let star = ratio(2, total + 2);
            let eps = ratio(1, 1_000_000);
            assert!(f_exact(total, &(&star + &eps)) < fs);
            assert!(f_exact(total, &(&star - &eps)) < fs);
        }
    }
}
