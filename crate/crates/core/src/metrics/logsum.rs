//! Exact accumulation of integer-weighted logarithms.
//!
//! A sum Σ wᵢ·ln nᵢ is kept as exponents over primes, Σ_p E_p·ln p. Logs of
//! distinct primes are linearly independent over the rationals, so two sums
//! are mathematically equal iff their exponent vectors are equal, and
//! [`LogSum::value`] maps equal vectors (and equal ratios E/k) to the same
//! float bits.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct LogSum {
    exps: BTreeMap<u64, i128>,
}

impl LogSum {
    /// Adds `weight · ln n`; `n ≤ 1` contributes nothing.
    pub fn add(&mut self, n: u64, weight: i128) {
        if weight == 0 {
            return;
        }
        for (p, e) in factorize(n) {
            self.add_prime(p, weight * e as i128);
        }
    }

    /// Adds `n · ln n`, with 0·ln 0 = 0.
    pub fn add_xlnx(&mut self, n: u64) {
        self.add(n, n as i128);
    }

    /// Subtracts `n · ln n`.
    pub fn sub_xlnx(&mut self, n: u64) {
        self.add(n, -(n as i128));
    }

    fn add_prime(&mut self, p: u64, exponent: i128) {
        let slot = self.exps.entry(p).or_insert(0);
        *slot += exponent;
        if *slot == 0 {
            self.exps.remove(&p);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.exps.is_empty()
    }

    /// Σ_p (E_p / divisor) · ln p, summed in ascending prime order.
    pub fn value<S: Scalar>(&self, divisor: u64) -> S {
        let d = S::from_count(divisor);
        self.exps
            .iter()
            .map(|(&p, &e)| {
                let e = S::from_i128(e).expect("finite exponent");
                e / d * S::from_count(p).ln()
            })
            .fold(S::zero(), |acc, x| acc + x)
    }
}

/// Prime factorization by trial division, primes ascending.
fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    let mut p = 3;
    while p * p <= n {
        push(p, &mut n);
        p += 2;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorizations() {
        assert_eq!(factorize(1), []);
        assert_eq!(factorize(360), [(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1_000_000_007), [(1_000_000_007, 1)]);
        assert_eq!(factorize(2 * 999_983), [(2, 1), (999_983, 1)]);
    }

    #[test]
    fn equal_by_factorization_gives_equal_bits() {
        // 3ln3 + 6ln6 + 8ln8 + 2ln2 = 8ln8 + 9ln3 + 4ln4
        let mut a = LogSum::default();
        for n in [3, 6, 8, 2] {
            a.add_xlnx(n);
        }
        let mut b = LogSum::default();
        for n in [8, 3, 3, 3, 4] {
            b.add_xlnx(n);
        }
        assert_eq!(a, b);
        assert_eq!(a.value::<f64>(7).to_bits(), b.value::<f64>(7).to_bits());
    }

    #[test]
    fn cancellation_is_exact() {
        let mut s = LogSum::default();
        s.add(12, 5);
        s.add(3, -5);
        s.add(4, -5);
        assert!(s.is_zero());
        assert_eq!(s.value::<f64>(3), 0.0);
    }

    #[test]
    fn value_matches_direct_logs() {
        let mut s = LogSum::default();
        s.add_xlnx(10);
        s.sub_xlnx(4);
        let want = (10.0f64 * 10f64.ln() - 4.0 * 4f64.ln()) / 6.0;
        assert!((s.value::<f64>(6) - want).abs() < 1e-14);
    }
}
