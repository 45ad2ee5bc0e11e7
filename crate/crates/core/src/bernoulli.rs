//! Exact even-index Bernoulli numbers, computed once via tangent numbers.

use std::sync::OnceLock;

use rug::{Integer, Rational};

/// Largest `k` with `B_{2k}` available.
pub const MAX_HALF_INDEX: usize = 200;

static EVEN_BERNOULLI: OnceLock<Vec<Rational>> = OnceLock::new();

/// `B_{2k}` for `1 ≤ k ≤ MAX_HALF_INDEX`; `None` beyond the table.
pub fn even(k: usize) -> Option<&'static Rational> {
    if k == 0 || k > MAX_HALF_INDEX {
        return None;
    }
    Some(&table()[k])
}

fn table() -> &'static [Rational] {
    EVEN_BERNOULLI.get_or_init(|| {
        let n = MAX_HALF_INDEX;
        // Brent–Harvey tangent-number recurrence, integer-only.
        let mut t: Vec<Integer> = vec![Integer::new(); n + 1];
        t[1] = Integer::from(1);
        for k in 2..=n {
            t[k] = Integer::from(&t[k - 1] * (k as u64 - 1));
        }
        for k in 2..=n {
            for j in k..=n {
                let a = Integer::from(&t[j - 1] * (j - k) as u64);
                let b = Integer::from(&t[j] * (j - k + 2) as u64);
                t[j] = a + b;
            }
        }
        let mut out = vec![Rational::new(); n + 1];
        for k in 1..=n {
            let four_k = Integer::from(1) << (2 * k as u32);
            let denom = &four_k * Integer::from(&four_k - 1u32);
            let numer = Integer::from(&t[k] * (2 * k) as u64);
            let mut b = Rational::from((numer, denom));
            if k % 2 == 0 {
                b = -b;
            }
            out[k] = b;
        }
        out
    })
}
