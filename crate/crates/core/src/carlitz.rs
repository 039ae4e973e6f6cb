//! Classical Bernoulli numbers, Carlitz q-Bernoulli numbers and the
//! q-Bernoulli polynomials.
//!
//! The umbral relation `q (q beta + 1)^n - beta_n = [n == 1]` contains
//! `beta_n` on both sides (the `l = n` term of the expansion carries
//! `q^{n+1}`), so it solves to
//!
//! ```text
//! beta_n = ([n == 1] - q * sum_{l<n} C(n,l) q^l beta_l) / (q^{n+1} - 1)
//! ```
//!
//! and `q^{n+1} != 1` is exactly what [`QParam`] guarantees.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qcalc::QParam;
use crate::rational::{binomial, int, BigRational};

/// Memoized `beta_{0,q}, beta_{1,q}, ...` for one `q`.
#[derive(Clone, Debug)]
pub struct BetaCache {
    q: QParam,
    values: Vec<BigRational>,
}

impl BetaCache {
    pub fn new(q: QParam) -> Self {
        Self {
            q,
            values: vec![BigRational::one()],
        }
    }

    pub fn q(&self) -> &QParam {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `beta_{n,q}`, extending the table as needed.
    pub fn get(&mut self, n: usize) -> BigRational {
        self.extend_to(n);
        self.values[n].clone()
    }

    /// `beta_{0,q} ..= beta_{n,q}`.
    pub fn prefix(&mut self, n: usize) -> &[BigRational] {
        self.extend_to(n);
        &self.values[..=n]
    }

    fn extend_to(&mut self, n: usize) {
        while self.values.len() <= n {
            let next = self.values.len();
            let value = solve_next(&self.q, &self.values);
            self.values.push(value);
            let residual = recurrence_residual(&self.q, &self.values, next);
            assert_eq!(
                residual,
                delta_one(next),
                "recurrence check failed at n = {next}"
            );
        }
    }
}

fn delta_one(n: usize) -> BigRational {
    if n == 1 {
        BigRational::one()
    } else {
        BigRational::zero()
    }
}

fn solve_next(q: &QParam, known: &[BigRational]) -> BigRational {
    let n = known.len();
    let mut sum = BigRational::zero();
    let mut q_pow = BigRational::one();
    for (l, beta) in known.iter().enumerate() {
        sum += BigRational::from_integer(binomial(n as u64, l as u64)) * &q_pow * beta;
        q_pow *= q.value();
    }
    let denom = q.pow(n as i64 + 1) - BigRational::one();
    (delta_one(n) - q.value() * sum) / denom
}

/// Left side of the umbral relation at order `n`:
/// `q * sum_{l<=n} C(n,l) q^l beta_l - beta_n`. Equals `[n == 1]` for `n >= 1`.
pub fn recurrence_residual(q: &QParam, betas: &[BigRational], n: usize) -> BigRational {
    let mut sum = BigRational::zero();
    let mut q_pow = BigRational::one();
    for (l, beta) in betas.iter().take(n + 1).enumerate() {
        sum += BigRational::from_integer(binomial(n as u64, l as u64)) * &q_pow * beta;
        q_pow *= q.value();
    }
    q.value() * sum - &betas[n]
}

fn shared_cache(q: &QParam) -> Arc<Mutex<BetaCache>> {
    static STORE: OnceLock<Mutex<HashMap<QParam, Arc<Mutex<BetaCache>>>>> = OnceLock::new();
    let store = STORE.get_or_init(Default::default);
    let mut map = store.lock().expect("beta cache poisoned");
    map.entry(q.clone())
        .or_insert_with(|| Arc::new(Mutex::new(BetaCache::new(q.clone()))))
        .clone()
}

/// `beta_{n,q}` from the process-wide cache keyed by `q`.
pub fn carlitz_beta(n: usize, q: &QParam) -> BigRational {
    shared_cache(q).lock().expect("beta cache poisoned").get(n)
}

/// `beta_{0,q} ..= beta_{n,q}` from the shared cache.
pub fn carlitz_betas(n: usize, q: &QParam) -> Vec<BigRational> {
    shared_cache(q)
        .lock()
        .expect("beta cache poisoned")
        .prefix(n)
        .to_vec()
}

/// Recomputes `beta_{n,q}` from scratch without touching the shared cache.
pub fn carlitz_beta_uncached(n: usize, q: &QParam) -> BigRational {
    BetaCache::new(q.clone()).get(n)
}

/// Classical Bernoulli numbers `B_0, B_1, ...` with `B_1 = -1/2`.
#[derive(Clone, Debug)]
pub struct ClassicalBernoulli {
    values: Vec<BigRational>,
}

impl Default for ClassicalBernoulli {
    fn default() -> Self {
        Self {
            values: vec![BigRational::one()],
        }
    }
}

impl ClassicalBernoulli {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, n: usize) -> BigRational {
        // (B + 1)^{m+1} - B_{m+1} = 0 for m >= 1 gives
        // B_m = -(1 / (m + 1)) sum_{k<m} C(m+1, k) B_k.
        while self.values.len() <= n {
            let m = self.values.len();
            let sum = self
                .values
                .iter()
                .enumerate()
                .map(|(k, b)| BigRational::from_integer(binomial(m as u64 + 1, k as u64)) * b)
                .fold(BigRational::zero(), |acc, t| acc + t);
            self.values.push(-sum / int(m as i64 + 1));
        }
        self.values[n].clone()
    }
}

pub fn classical_bernoulli(n: usize) -> BigRational {
    ClassicalBernoulli::new().get(n)
}

fn poly_from_parts(
    n: usize,
    betas: &[BigRational],
    qx: &BigRational,
    bracket: &BigRational,
) -> BigRational {
    // sum_l C(n,l) (q^x)^l [x]^{n-l} beta_l
    let mut bracket_pows = Vec::with_capacity(n + 1);
    let mut acc = BigRational::one();
    for _ in 0..=n {
        bracket_pows.push(acc.clone());
        acc *= bracket;
    }
    let mut total = BigRational::zero();
    let mut qx_pow = BigRational::one();
    for (l, beta) in betas.iter().enumerate().take(n + 1) {
        let c = BigRational::from_integer(binomial(n as u64, l as u64));
        total += c * &qx_pow * &bracket_pows[n - l] * beta;
        qx_pow *= qx;
    }
    total
}

/// `beta_{n,q}(x) = sum_l C(n,l) q^{lx} [x]_q^{n-l} beta_{l,q}` for integer `x`.
pub fn beta_poly(n: usize, q: &QParam, x: i64) -> BigRational {
    let betas = carlitz_betas(n, q);
    poly_from_parts(n, &betas, &q.pow(x), &q.bracket(x))
}

/// The q-Bernoulli polynomial with its argument `y` supplied only through
/// `qy = Q^y`; `[y]_Q = (1 - qy) / (1 - Q)`.
pub fn beta_poly_at_power(n: usize, big_q: &QParam, qy: &BigRational) -> Result<BigRational> {
    if qy.is_zero() {
        return Err(Error::ZeroPowerArgument);
    }
    let betas = carlitz_betas(n, big_q);
    let bracket = (BigRational::one() - qy) / (BigRational::one() - big_q.value());
    Ok(poly_from_parts(n, &betas, qy, &bracket))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn q(n: i64, d: i64) -> QParam {
        QParam::new(ratio(n, d)).unwrap()
    }

    #[test]
    fn classical_values() {
        let mut b = ClassicalBernoulli::new();
        assert_eq!(b.get(0), int(1));
        assert_eq!(b.get(1), ratio(-1, 2));
        assert_eq!(b.get(2), ratio(1, 6));
        assert_eq!(b.get(3), int(0));
        assert_eq!(b.get(4), ratio(-1, 30));
        assert_eq!(b.get(12), ratio(-691, 2730));
        // (B + 1)^n - B_n = 0 for n >= 2
        for n in 2..20u64 {
            let s: BigRational = (0..n)
                .map(|k| BigRational::from_integer(binomial(n, k)) * b.get(k as usize))
                .sum();
            assert!(s.is_zero(), "n = {n}");
        }
    }

    #[test]
    fn carlitz_examples() {
        assert_eq!(carlitz_beta(0, &q(7, 3)), int(1));
        assert_eq!(carlitz_beta(1, &q(2, 1)), ratio(-1, 3));
        assert_eq!(carlitz_beta(2, &q(2, 1)), ratio(2, 21));
    }

    #[test]
    fn residual_is_delta() {
        for qq in [q(2, 1), q(-3, 7), q(5, 2)] {
            let betas = carlitz_betas(32, &qq);
            for n in 1..=32 {
                assert_eq!(recurrence_residual(&qq, &betas, n), delta_one(n));
            }
        }
    }

    #[test]
    fn cached_matches_uncached() {
        let qq = q(-4, 9);
        for n in [7, 3, 11, 0, 5] {
            assert_eq!(carlitz_beta(n, &qq), carlitz_beta_uncached(n, &qq));
        }
    }

    #[test]
    fn beta_poly_examples() {
        for n in 0..6 {
            assert_eq!(beta_poly(n, &q(3, 5), 0), carlitz_beta(n, &q(3, 5)));
        }
        assert_eq!(beta_poly(1, &q(2, 1), 1), ratio(1, 3));
        for qq in [q(2, 1), q(1, 2), q(-2, 1)] {
            for n in 1..=10 {
                let lhs = qq.value() * beta_poly(n, &qq, 1) - carlitz_beta(n, &qq);
                assert_eq!(lhs, delta_one(n));
            }
            // n = 0 is the q - 1 row, not part of the delta relation.
            let lhs = qq.value() * beta_poly(0, &qq, 1) - carlitz_beta(0, &qq);
            assert_eq!(lhs, qq.value() - int(1));
        }
    }

    #[test]
    fn beta_poly_at_power_examples() {
        let big_q = q(4, 1);
        for n in 0..5 {
            assert_eq!(
                beta_poly_at_power(n, &big_q, &int(1)).unwrap(),
                carlitz_beta(n, &big_q)
            );
            assert_eq!(
                beta_poly_at_power(n, &big_q, big_q.value()).unwrap(),
                beta_poly(n, &big_q, 1)
            );
        }
        assert_eq!(carlitz_beta(1, &big_q), ratio(-1, 5));
        assert_eq!(
            beta_poly_at_power(1, &big_q, &int(2)).unwrap(),
            ratio(-1, 15)
        );
        assert_eq!(
            beta_poly_at_power(2, &big_q, &int(0)),
            Err(Error::ZeroPowerArgument)
        );
    }

    #[test]
    fn negative_argument() {
        // beta_n(x) is a polynomial in q^x; check x = -1 against the
        // translation rule beta_n(x + 1) = ([1] + q beta(x))^n expanded.
        let qq = q(3, 1);
        let lhs = beta_poly(1, &qq, -1);
        let expected = qq.bracket(-1) + qq.pow(-1) * carlitz_beta(1, &qq);
        assert_eq!(lhs, expected);
    }
}
