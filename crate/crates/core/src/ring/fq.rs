//! Arithmetic in the finite residue fields `F_{p^m}`.
//!
//! Elements are coefficient vectors of length `m` over `F_p` (constant term
//! first), reduced modulo a fixed monic irreducible polynomial of degree `m`.
//! The modulus is chosen deterministically as the lexicographically smallest
//! irreducible (by the integer encoding of its low coefficients), so two
//! rings built from the same `(p, m)` share their residue field on the nose.

use alloc::vec;
use alloc::vec::Vec;

/// The field `F_{p^m}` with a fixed monic modulus `x^m + low(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fq {
    pub p: u64,
    pub m: usize,
    /// Low coefficients of the modulus (length `m`); empty rule for `m = 1`.
    pub modulus_low: Vec<u64>,
}

pub type FqElem = Vec<u64>;

impl Fq {
    pub fn new(p: u64, m: usize) -> Fq {
        let modulus_low = if m == 1 {
            vec![0]
        } else {
            smallest_irreducible_low(p, m)
        };
        Fq { p, m, modulus_low }
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.m as u32)
    }

    pub fn zero(&self) -> FqElem {
        vec![0; self.m]
    }

    pub fn one(&self) -> FqElem {
        let mut e = vec![0; self.m];
        e[0] = 1;
        e
    }

    pub fn from_int(&self, n: u64) -> FqElem {
        let mut e = vec![0; self.m];
        e[0] = n % self.p;
        e
    }

    pub fn is_zero(&self, a: &FqElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        a.iter().map(|&x| (self.p - x) % self.p).collect()
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        // Schoolbook convolution, then fold x^{m+k} = -low(x)·x^k downward.
        let m = self.m;
        let mut conv = vec![0u64; 2 * m - 1];
        for i in 0..m {
            if a[i] == 0 {
                continue;
            }
            for j in 0..m {
                conv[i + j] = (conv[i + j] + a[i] * b[j]) % self.p;
            }
        }
        for k in (m..2 * m - 1).rev() {
            let c = conv[k];
            if c == 0 {
                continue;
            }
            conv[k] = 0;
            for (i, &low) in self.modulus_low.iter().enumerate() {
                let t = (c * (self.p - low % self.p)) % self.p;
                conv[k - m + i] = (conv[k - m + i] + t) % self.p;
            }
        }
        conv.truncate(m);
        conv
    }

    pub fn pow(&self, a: &FqElem, mut n: u64) -> FqElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FqElem) -> Option<FqElem> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, self.order() - 2))
    }

    /// All `q` elements in canonical (mixed-radix, constant digit fastest)
    /// order.
    pub fn elements(&self) -> Vec<FqElem> {
        let q = self.order();
        (0..q).map(|i| self.elem_from_index(i)).collect()
    }

    pub fn elem_from_index(&self, mut i: u64) -> FqElem {
        let mut e = vec![0; self.m];
        for c in e.iter_mut() {
            *c = i % self.p;
            i /= self.p;
        }
        e
    }

    pub fn index_of(&self, a: &FqElem) -> u64 {
        let mut i = 0;
        for &c in a.iter().rev() {
            i = i * self.p + c;
        }
        i
    }

    /// A fixed multiplicative generator (smallest by index).
    pub fn generator(&self) -> FqElem {
        let q = self.order();
        'cand: for i in 1..q {
            let g = self.elem_from_index(i);
            // Order test: g^((q-1)/r) != 1 for every prime r | q-1.
            let mut n = q - 1;
            let mut primes = Vec::new();
            let mut d = 2;
            while d * d <= n {
                if n % d == 0 {
                    primes.push(d);
                    while n % d == 0 {
                        n /= d;
                    }
                }
                d += 1;
            }
            if n > 1 {
                primes.push(n);
            }
            for r in primes {
                if self.pow(&g, (q - 1) / r) == self.one() {
                    continue 'cand;
                }
            }
            return g;
        }
        unreachable!("multiplicative group of a finite field is cyclic")
    }
}

/// Finds the low coefficients of the lexicographically smallest monic
/// irreducible of degree `m` over `F_p`, by trial division against every
/// monic polynomial of degree `1..=m/2`.
fn smallest_irreducible_low(p: u64, m: usize) -> Vec<u64> {
    let total = p.pow(m as u32);
    for enc in 0..total {
        let mut low = vec![0u64; m];
        let mut x = enc;
        for c in low.iter_mut() {
            *c = x % p;
            x /= p;
        }
        if is_irreducible(p, m, &low) {
            return low;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn is_irreducible(p: u64, m: usize, low: &[u64]) -> bool {
    if low[0] == 0 {
        return false; // divisible by x
    }
    // Full polynomial, degree m, monic.
    let mut f = low.to_vec();
    f.push(1);
    for d in 1..=m / 2 {
        let count = p.pow(d as u32);
        for enc in 0..count {
            let mut g = vec![0u64; d + 1];
            let mut x = enc;
            for c in g.iter_mut().take(d) {
                *c = x % p;
                x /= p;
            }
            g[d] = 1;
            if poly_rem_is_zero(p, &f, &g) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(p: u64, f: &[u64], g: &[u64]) -> bool {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().unwrap() % p;
        let k = r.len() - 1 - dg;
        if lead != 0 {
            for i in 0..=dg {
                let idx = k + i;
                r[idx] = (r[idx] + (p - (lead * g[i]) % p)) % p;
            }
        }
        r.pop();
    }
    r.iter().all(|&c| c % p == 0)
}
