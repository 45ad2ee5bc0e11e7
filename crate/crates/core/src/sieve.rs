//! Smallest-prime-factor sieve and the arithmetic functions built on it.

/// Smallest prime factor of every n ≤ limit (spf[0] = spf[1] = 0).
#[derive(Clone, Debug)]
pub struct Sieve {
    spf: Vec<u32>,
}

impl Sieve {
    pub fn new(limit: usize) -> Sieve {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Sieve { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn smallest_factor(&self, n: usize) -> usize {
        self.spf[n] as usize
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && self.spf[n] as usize == n
    }

    /// Prime factorization as (p, k) pairs in increasing p.
    pub fn factorize(&self, mut n: usize) -> Vec<(usize, u32)> {
        let mut out: Vec<(usize, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        out
    }

    /// Ω(n), prime factors counted with multiplicity.
    pub fn big_omega(&self, n: usize) -> u32 {
        self.factorize(n).iter().map(|&(_, k)| k).sum()
    }
}

/// d(n) for 0 ≤ n ≤ limit (d(0) = 0) by the additive divisor sieve.
pub fn divisor_counts(limit: usize) -> Vec<u32> {
    let mut d = vec![0u32; limit + 1];
    for i in 1..=limit {
        let mut j = i;
        while j <= limit {
            d[j] += 1;
            j += i;
        }
    }
    d
}

/// Integer square root ⌊√n⌋.
pub fn isqrt(n: u64) -> u64 {
    n.isqrt()
}
