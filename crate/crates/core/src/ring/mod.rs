//! Truncated valuation rings of depth `h` over finite residue fields.
//!
//! Three kinds are supported, each with a canonical coefficient form:
//!
//! * `equichar(p,m,h)` — `F_{p^m}[t]/(t^h)`: `h` residue-field coefficients
//!   (powers of `t`, constant first).
//! * `unram(p,m,h)` — the Galois ring `GR(p^h, m) = (Z/p^h)[x]/(f)`: one
//!   polynomial of degree `< m` with coefficients mod `p^h`.
//! * `ram(p,e,c,h)` — `O/p^h` for `O` the ring of integers of the Eisenstein
//!   extension by `x^e − p·c` (tame: `gcd(e,p) = 1`): `e` coefficients
//!   (powers of `ϖ`), the `i`-th taken mod `p^{⌈(h−i)/e⌉}`.
//!
//! Elements are always kept reduced (canonical form); equality is
//! coefficient equality. The element count is `q^h` with `q = p^m` in every
//! kind. Operations never mutate; rings and elements are plain immutable
//! data, safe to share across tasks.

pub mod fq;
pub mod iso;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use fq::{Fq, FqElem};

/// Errors from ring construction and element operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingError {
    /// p = 2, p not prime, c not a unit mod p, wild ramification, h < 1, …
    InvalidSpec(String),
    /// Operands owned by different rings.
    MixedRings,
    /// Inversion (or sqrt) of a non-unit.
    NotAUnit,
    /// No valuation-1 element exists (h = 1).
    DepthOne,
    /// Quotient depth out of range.
    BadDepth,
    /// An enumeration cap was exceeded.
    TooLarge,
    /// Unparsable ring spec text.
    ParseError(String),
}

/// The value of the truncated valuation: `0..h-1` or `∞` (for zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// Numeric comparison with `∞` as the top element.
    pub fn at_least(self, bound: u32) -> bool {
        match self {
            Valuation::Finite(v) => v >= bound,
            Valuation::Infinite => true,
        }
    }
}

/// What a ring is, structurally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RingSpec {
    /// `F_{p^m}[t]/t^h`.
    EquiChar { p: u64, m: u32, h: u32 },
    /// The Galois ring `GR(p^h, m)`.
    Unramified { p: u64, m: u32, h: u32 },
    /// `O/p^h`, `O = Z_p[x]/(x^e − p·c)`, tame.
    Ramified { p: u64, e: u32, c: u64, h: u32 },
}

impl RingSpec {
    pub fn depth(&self) -> u32 {
        match *self {
            RingSpec::EquiChar { h, .. }
            | RingSpec::Unramified { h, .. }
            | RingSpec::Ramified { h, .. } => h,
        }
    }

    pub fn prime(&self) -> u64 {
        match *self {
            RingSpec::EquiChar { p, .. }
            | RingSpec::Unramified { p, .. }
            | RingSpec::Ramified { p, .. } => p,
        }
    }

    /// Residue-field extension degree.
    pub fn residue_degree(&self) -> u32 {
        match *self {
            RingSpec::EquiChar { m, .. } | RingSpec::Unramified { m, .. } => m,
            RingSpec::Ramified { .. } => 1,
        }
    }

    /// Canonical text form, e.g. `ram(p=3,e=2,c=2,h=3)`.
    pub fn canonical_text(&self) -> String {
        match *self {
            RingSpec::EquiChar { p, m, h } => format!("equichar(p={},m={},h={})", p, m, h),
            RingSpec::Unramified { p, m, h } => format!("unram(p={},m={},h={})", p, m, h),
            RingSpec::Ramified { p, e, c, h } => format!("ram(p={},e={},c={},h={})", p, e, c, h),
        }
    }

    /// Parses the canonical text grammar.
    pub fn parse(s: &str) -> Result<RingSpec, RingError> {
        let s = s.trim();
        let (name, rest) = s
            .split_once('(')
            .ok_or_else(|| RingError::ParseError(String::from(s)))?;
        let rest = rest
            .strip_suffix(')')
            .ok_or_else(|| RingError::ParseError(String::from(s)))?;
        let mut kv = alloc::collections::BTreeMap::new();
        for part in rest.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| RingError::ParseError(String::from(part)))?;
            let v: u64 = v
                .trim()
                .parse()
                .map_err(|_| RingError::ParseError(String::from(part)))?;
            kv.insert(k.trim(), v);
        }
        let get = |k: &str| -> Result<u64, RingError> {
            kv.get(k)
                .copied()
                .ok_or_else(|| RingError::ParseError(format!("missing {}", k)))
        };
        let spec = match name.trim() {
            "equichar" => RingSpec::EquiChar {
                p: get("p")?,
                m: get("m")? as u32,
                h: get("h")? as u32,
            },
            "unram" => RingSpec::Unramified {
                p: get("p")?,
                m: get("m")? as u32,
                h: get("h")? as u32,
            },
            "ram" => RingSpec::Ramified {
                p: get("p")?,
                e: get("e")? as u32,
                c: get("c")?,
                h: get("h")? as u32,
            },
            other => return Err(RingError::ParseError(String::from(other))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), RingError> {
        let p = self.prime();
        if p < 3 || !is_prime(p) {
            return Err(RingError::InvalidSpec(format!("p = {} must be an odd prime", p)));
        }
        match *self {
            RingSpec::EquiChar { m, h, .. } | RingSpec::Unramified { m, h, .. } => {
                if m < 1 {
                    return Err(RingError::InvalidSpec(String::from("m must be ≥ 1")));
                }
                if h < 1 {
                    return Err(RingError::InvalidSpec(String::from("h must be ≥ 1")));
                }
            }
            RingSpec::Ramified { p, e, c, h } => {
                if e < 2 {
                    return Err(RingError::InvalidSpec(String::from("e must be ≥ 2")));
                }
                if h < 2 {
                    return Err(RingError::InvalidSpec(String::from("ramified depth must be ≥ 2")));
                }
                if e as u64 % p == 0 {
                    return Err(RingError::InvalidSpec(String::from(
                        "wild ramification (p | e) is out of scope",
                    )));
                }
                if c % p == 0 {
                    return Err(RingError::InvalidSpec(String::from("c must be a unit mod p")));
                }
            }
        }
        Ok(())
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A ring element in canonical coefficient form. Carries a cheap owner tag
/// so mixed-ring operations can be rejected.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem {
    owner: u64,
    coeffs: Vec<u64>,
}

impl Elem {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff_text(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(|c| format!("{}", c)).collect();
        format!("({})", parts.join(","))
    }
}

/// A constructed truncated valuation ring.
#[derive(Debug, Clone)]
pub struct Ring {
    spec: RingSpec,
    id: u64,
    /// Residue field `F_{p^m}` (shared modulus per `(p, m)`).
    fq: Fq,
    /// Per-coefficient moduli, in the canonical layout.
    moduli: Vec<u64>,
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn pow_u64(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).expect("prime-power overflow at desk scale")
}

fn ceil_div(a: u32, b: u32) -> u32 {
    a.div_ceil(b)
}

/// Builds a ring handle from a validated spec.
pub fn make_ring(spec: RingSpec) -> Result<Ring, RingError> {
    spec.validate()?;
    let p = spec.prime();
    let m = spec.residue_degree();
    let fq = Fq::new(p, m as usize);
    let moduli = match spec {
        RingSpec::EquiChar { p, m, h } => vec![p; (m * h) as usize],
        RingSpec::Unramified { p, m, h } => vec![pow_u64(p, h); m as usize],
        RingSpec::Ramified { p, e, h, .. } => (0..e)
            .map(|i| pow_u64(p, ceil_div(h.saturating_sub(i), e)))
            .collect(),
    };
    let id = fnv1a(&spec.canonical_text());
    Ok(Ring { spec, id, fq, moduli })
}

impl Ring {
    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn depth(&self) -> u32 {
        self.spec.depth()
    }

    pub fn prime(&self) -> u64 {
        self.spec.prime()
    }

    /// Residue field size `q = p^m`.
    pub fn residue_order(&self) -> u64 {
        self.fq.order()
    }

    pub fn residue_field(&self) -> &Fq {
        &self.fq
    }

    /// Total number of elements, `q^h`.
    pub fn order(&self) -> u64 {
        self.moduli.iter().product()
    }

    /// Additive order of 1: `p`, `p^h`, or `p^{⌈h/e⌉}`.
    pub fn characteristic(&self) -> u64 {
        match self.spec {
            RingSpec::EquiChar { p, .. } => p,
            RingSpec::Unramified { p, h, .. } => pow_u64(p, h),
            RingSpec::Ramified { p, e, h, .. } => pow_u64(p, ceil_div(h, e)),
        }
    }

    fn own(&self, coeffs: Vec<u64>) -> Elem {
        Elem { owner: self.id, coeffs }
    }

    pub fn owns(&self, x: &Elem) -> bool {
        x.owner == self.id
    }

    fn check_owned(&self, x: &Elem) -> Result<(), RingError> {
        if self.owns(x) {
            Ok(())
        } else {
            Err(RingError::MixedRings)
        }
    }

    pub fn zero(&self) -> Elem {
        self.own(vec![0; self.moduli.len()])
    }

    pub fn one(&self) -> Elem {
        self.from_int(1)
    }

    /// The image of the integer `n` (i.e. `n·1`).
    pub fn from_int(&self, n: i64) -> Elem {
        let mut coeffs = vec![0; self.moduli.len()];
        match self.spec {
            RingSpec::EquiChar { p, .. } => {
                coeffs[0] = n.rem_euclid(p as i64) as u64;
            }
            RingSpec::Unramified { .. } | RingSpec::Ramified { .. } => {
                coeffs[0] = n.rem_euclid(self.moduli[0] as i64) as u64;
            }
        }
        self.own(coeffs)
    }

    pub fn is_zero(&self, x: &Elem) -> bool {
        x.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, x: &Elem, y: &Elem) -> Elem {
        debug_assert!(self.owns(x) && self.owns(y));
        let coeffs = x
            .coeffs
            .iter()
            .zip(&y.coeffs)
            .zip(&self.moduli)
            .map(|((&a, &b), &md)| (a + b) % md)
            .collect();
        self.own(coeffs)
    }

    pub fn neg(&self, x: &Elem) -> Elem {
        let coeffs = x
            .coeffs
            .iter()
            .zip(&self.moduli)
            .map(|(&a, &md)| (md - a) % md)
            .collect();
        self.own(coeffs)
    }

    pub fn sub(&self, x: &Elem, y: &Elem) -> Elem {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Elem {
        debug_assert!(self.owns(x) && self.owns(y));
        match self.spec {
            RingSpec::EquiChar { m, h, .. } => {
                let m = m as usize;
                let h = h as usize;
                let mut out = vec![0u64; m * h];
                for i in 0..h {
                    let a = &x.coeffs[i * m..(i + 1) * m];
                    if a.iter().all(|&c| c == 0) {
                        continue;
                    }
                    for j in 0..h - i {
                        let b = &y.coeffs[j * m..(j + 1) * m];
                        let prod = self.fq.mul(&a.to_vec(), &b.to_vec());
                        let dst = &mut out[(i + j) * m..(i + j + 1) * m];
                        for (d, &pc) in dst.iter_mut().zip(&prod) {
                            *d = (*d + pc) % self.fq.p;
                        }
                    }
                }
                self.own(out)
            }
            RingSpec::Unramified { m, .. } => {
                let m = m as usize;
                let md = self.moduli[0];
                let mut conv = vec![0u64; 2 * m - 1];
                for i in 0..m {
                    if x.coeffs[i] == 0 {
                        continue;
                    }
                    for j in 0..m {
                        conv[i + j] =
                            (conv[i + j] + mulmod(x.coeffs[i], y.coeffs[j], md)) % md;
                    }
                }
                // Fold by the monic lift of the residue modulus.
                for k in (m..2 * m - 1).rev() {
                    let c = conv[k];
                    if c == 0 {
                        continue;
                    }
                    conv[k] = 0;
                    for (i, &low) in self.fq.modulus_low.iter().enumerate() {
                        let t = mulmod(c, (md - low % md) % md, md);
                        conv[k - m + i] = (conv[k - m + i] + t) % md;
                    }
                }
                conv.truncate(m);
                self.own(conv)
            }
            RingSpec::Ramified { p, e, c, .. } => {
                let e = e as usize;
                // Accumulate the convolution over ϖ-powers 0..2e-2, then
                // fold ϖ^{e+k} = p·c·ϖ^k. Intermediate values can exceed the
                // final moduli, so work mod the largest modulus and reduce
                // at the end.
                let big = self.moduli[0].max(p * c * self.moduli[0]);
                let mut conv = vec![0u64; 2 * e - 1];
                for i in 0..e {
                    if x.coeffs[i] == 0 {
                        continue;
                    }
                    for j in 0..e {
                        conv[i + j] = (conv[i + j] + mulmod(x.coeffs[i], y.coeffs[j], big)) % big;
                    }
                }
                for k in (e..2 * e - 1).rev() {
                    let v = conv[k];
                    if v == 0 {
                        continue;
                    }
                    conv[k] = 0;
                    conv[k - e] = (conv[k - e] + mulmod(v, p * c, big)) % big;
                }
                conv.truncate(e);
                for (cf, &md) in conv.iter_mut().zip(&self.moduli) {
                    *cf %= md;
                }
                self.own(conv)
            }
        }
    }

    /// Convenience for `{add, sub, mul, neg}` with owner checking.
    pub fn arith(&self, x: &Elem, y: &Elem, op: ArithOp) -> Result<Elem, RingError> {
        self.check_owned(x)?;
        if op != ArithOp::Neg {
            self.check_owned(y)?;
        }
        Ok(match op {
            ArithOp::Add => self.add(x, y),
            ArithOp::Sub => self.sub(x, y),
            ArithOp::Mul => self.mul(x, y),
            ArithOp::Neg => self.neg(x),
        })
    }

    /// Largest `i` with `x ∈ R_i = {v ≥ i}`; `∞` iff `x = 0`.
    pub fn valuation(&self, x: &Elem) -> Valuation {
        if self.is_zero(x) {
            return Valuation::Infinite;
        }
        let v = match self.spec {
            RingSpec::EquiChar { m, h, .. } => {
                let m = m as usize;
                (0..h as usize)
                    .find(|&i| x.coeffs[i * m..(i + 1) * m].iter().any(|&c| c != 0))
                    .unwrap() as u32
            }
            RingSpec::Unramified { p, h, .. } => x
                .coeffs
                .iter()
                .filter(|&&c| c != 0)
                .map(|&c| padic_val(c, p).min(h))
                .min()
                .unwrap(),
            RingSpec::Ramified { p, e, h, .. } => x
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (i as u32 + e * padic_val(c, p)).min(h))
                .min()
                .unwrap(),
        };
        Valuation::Finite(v)
    }

    pub fn is_unit(&self, x: &Elem) -> bool {
        self.valuation(x) == Valuation::Finite(0)
    }

    /// Two-sided inverse of a unit, by lifting the residue-field inverse
    /// with Newton iteration.
    pub fn invert(&self, x: &Elem) -> Result<Elem, RingError> {
        self.check_owned(x)?;
        if !self.is_unit(x) {
            return Err(RingError::NotAUnit);
        }
        let r = self.residue_of(x);
        let rinv = self.fq.inv(&r).expect("unit has nonzero residue");
        let mut y = self.lift_residue(&rinv);
        let two = self.from_int(2);
        // Quadratic convergence; depth ≤ h·e ≤ 24 needs few rounds.
        for _ in 0..16 {
            let xy = self.mul(x, &y);
            if xy == self.one() {
                return Ok(y);
            }
            y = self.mul(&y, &self.sub(&two, &xy));
        }
        debug_assert_eq!(self.mul(x, &y), self.one());
        Ok(y)
    }

    /// Residue of `x` in `F_{p^m}`.
    pub fn residue_of(&self, x: &Elem) -> FqElem {
        match self.spec {
            RingSpec::EquiChar { m, .. } => x.coeffs[..m as usize].to_vec(),
            RingSpec::Unramified { p, .. } => x.coeffs.iter().map(|&c| c % p).collect(),
            RingSpec::Ramified { p, .. } => vec![x.coeffs[0] % p],
        }
    }

    /// The canonical (coefficient-wise) lift of a residue element.
    pub fn lift_residue(&self, r: &FqElem) -> Elem {
        let mut coeffs = vec![0; self.moduli.len()];
        match self.spec {
            RingSpec::EquiChar { m, .. } => coeffs[..m as usize].copy_from_slice(r),
            RingSpec::Unramified { .. } => coeffs.copy_from_slice(r),
            RingSpec::Ramified { .. } => coeffs[0] = r[0],
        }
        self.own(coeffs)
    }

    /// Both square roots `(r, −r)` of a unit whose residue is a square;
    /// `None` when the residue is a non-square. Hensel lifting from an
    /// exhaustive residue-field root (`k` has ≤ 81 elements at desk scale).
    pub fn sqrt(&self, x: &Elem) -> Result<Option<(Elem, Elem)>, RingError> {
        self.check_owned(x)?;
        if !self.is_unit(x) {
            return Err(RingError::NotAUnit);
        }
        let res = self.residue_of(x);
        let root = self
            .fq
            .elements()
            .into_iter()
            .find(|r| self.fq.mul(r, r) == res);
        let root = match root {
            Some(r) => r,
            None => return Ok(None),
        };
        let mut y = self.lift_residue(&root);
        let half = self.invert(&self.from_int(2)).expect("2 is a unit, p odd");
        for _ in 0..16 {
            if self.mul(&y, &y) == *x {
                break;
            }
            // y ← (y + x/y)/2
            let yinv = self.invert(&y)?;
            y = self.mul(&half, &self.add(&y, &self.mul(x, &yinv)));
        }
        debug_assert_eq!(self.mul(&y, &y), *x);
        let neg = self.neg(&y);
        // Deterministic order: smaller canonical index first.
        if self.index_of(&y) <= self.index_of(&neg) {
            Ok(Some((y, neg)))
        } else {
            Ok(Some((neg, y)))
        }
    }

    /// The fixed canonical uniformizer: `t`, `p`, or `ϖ` by kind.
    pub fn uniformizer(&self) -> Result<Elem, RingError> {
        if self.depth() < 2 {
            return Err(RingError::DepthOne);
        }
        let mut coeffs = vec![0; self.moduli.len()];
        match self.spec {
            RingSpec::EquiChar { m, .. } => coeffs[m as usize] = 1,
            RingSpec::Unramified { p, .. } => coeffs[0] = p,
            RingSpec::Ramified { .. } => coeffs[1] = 1,
        }
        Ok(self.own(coeffs))
    }

    /// `x·ϖ^k` (uses the canonical uniformizer; `k = 0` is the identity).
    pub fn mul_uniformizer_pow(&self, x: &Elem, k: u32) -> Elem {
        if k == 0 {
            return x.clone();
        }
        let w = match self.uniformizer() {
            Ok(w) => w,
            Err(_) => return self.zero(), // depth 1: ϖ^k = 0 for k ≥ 1
        };
        let mut y = x.clone();
        for _ in 0..k {
            y = self.mul(&y, &w);
        }
        y
    }

    /// Exact division by `ϖ^k`: a canonical `y` with `ϖ^k·y = x`, provided
    /// `v(x) ≥ k`. The answer is well defined modulo `R_{h−k}`; the canonical
    /// choice has its top digits zero.
    pub fn div_uniformizer_pow(&self, x: &Elem, k: u32) -> Option<Elem> {
        if k == 0 {
            return Some(x.clone());
        }
        if !self.valuation(x).at_least(k) {
            return None;
        }
        let mut y = x.clone();
        for _ in 0..k {
            y = self.div_uniformizer_once(&y)?;
        }
        Some(y)
    }

    fn div_uniformizer_once(&self, x: &Elem) -> Option<Elem> {
        if !self.valuation(x).at_least(1) {
            return None;
        }
        match self.spec {
            RingSpec::EquiChar { m, h, .. } => {
                let m = m as usize;
                let mut coeffs = vec![0; m * h as usize];
                for i in 1..h as usize {
                    let src = x.coeffs[i * m..(i + 1) * m].to_vec();
                    coeffs[(i - 1) * m..i * m].copy_from_slice(&src);
                }
                Some(self.own(coeffs))
            }
            RingSpec::Unramified { p, .. } => {
                let coeffs = x.coeffs.iter().map(|&c| c / p).collect();
                Some(self.own(coeffs))
            }
            RingSpec::Ramified { p, e, c, .. } => {
                let e = e as usize;
                if x.coeffs[0] % p != 0 {
                    return None;
                }
                let mut coeffs = vec![0u64; e];
                for i in 1..e {
                    coeffs[i - 1] = x.coeffs[i] % self.moduli[i - 1];
                }
                // c_0·ϖ^{-1} = (c_0/p)·c^{-1}·ϖ^{e-1}
                let md = self.moduli[e - 1];
                let cinv = modular_inverse(c % md, md).expect("c is a unit");
                coeffs[e - 1] = (coeffs[e - 1] + mulmod(x.coeffs[0] / p, cinv, md)) % md;
                Some(self.own(coeffs))
            }
        }
    }

    /// Canonical representative of `x` modulo `R_d` (valuation-`≥ d` parts
    /// zeroed). `d ≥ h` is the identity; `d = 0` gives zero.
    pub fn truncate_val(&self, x: &Elem, d: u32) -> Elem {
        if d >= self.depth() {
            return x.clone();
        }
        match self.spec {
            RingSpec::EquiChar { m, h, .. } => {
                let m = m as usize;
                let mut coeffs = x.coeffs.clone();
                for i in d as usize..h as usize {
                    for c in &mut coeffs[i * m..(i + 1) * m] {
                        *c = 0;
                    }
                }
                self.own(coeffs)
            }
            RingSpec::Unramified { p, .. } => {
                let md = pow_u64(p, d);
                self.own(x.coeffs.iter().map(|&c| c % md).collect())
            }
            RingSpec::Ramified { p, e, .. } => {
                let coeffs = x
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| {
                        let keep = ceil_div(d.saturating_sub(i as u32), e);
                        c % pow_u64(p, keep)
                    })
                    .collect();
                self.own(coeffs)
            }
        }
    }

    /// The multiplicatively closed Teichmüller system of representatives of
    /// the residue field: constants for equal characteristic; the `q`
    /// solutions of `x^q = x` otherwise.
    pub fn teichmuller_reps(&self) -> Vec<Elem> {
        let q = self.residue_order();
        self.fq
            .elements()
            .into_iter()
            .map(|r| {
                let mut x = self.lift_residue(&r);
                match self.spec {
                    RingSpec::EquiChar { .. } => x,
                    _ => {
                        // x ↦ x^q converges to the Teichmüller representative.
                        for _ in 0..self.depth() * self.spec_abs_e() + 2 {
                            let next = self.pow(&x, q);
                            if next == x {
                                break;
                            }
                            x = next;
                        }
                        debug_assert_eq!(self.pow(&x, q), x);
                        x
                    }
                }
            })
            .collect()
    }

    fn spec_abs_e(&self) -> u32 {
        match self.spec {
            RingSpec::Ramified { e, .. } => e,
            _ => 1,
        }
    }

    pub fn pow(&self, x: &Elem, mut n: u64) -> Elem {
        let mut base = x.clone();
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

    /// The unique `(s_0,…,s_{h−1})` from `teichmuller_reps` with
    /// `x = Σ s_i ϖ^i` (the single residue representative when `h = 1`).
    pub fn decompose(&self, x: &Elem) -> Vec<Elem> {
        let h = self.depth();
        let reps = self.teichmuller_reps();
        let mut digits = Vec::with_capacity(h as usize);
        let mut rest = x.clone();
        for i in 0..h {
            let r = self.residue_of(&rest);
            let idx = self.fq.index_of(&r);
            let s = reps[idx as usize].clone();
            digits.push(s.clone());
            if i + 1 < h {
                let diff = self.sub(&rest, &s);
                rest = self
                    .div_uniformizer_pow(&diff, 1)
                    .expect("x − teich(x) has positive valuation");
            }
        }
        digits
    }

    /// Inverse of [`Ring::decompose`].
    pub fn recompose(&self, digits: &[Elem]) -> Elem {
        let mut acc = self.zero();
        for (i, s) in digits.iter().enumerate() {
            acc = self.add(&acc, &self.mul_uniformizer_pow(s, i as u32));
        }
        acc
    }

    /// The depth-`i` quotient `R/R_i` with its canonical projection
    /// (`i = 1` yields the residue field as an `equichar` ring).
    pub fn quotient_ring(&self, i: u32) -> Result<Ring, RingError> {
        let h = self.depth();
        if i < 1 || i > h {
            return Err(RingError::BadDepth);
        }
        let spec = match self.spec {
            RingSpec::EquiChar { p, m, .. } => RingSpec::EquiChar { p, m, h: i },
            RingSpec::Unramified { p, m, .. } => {
                if i == 1 {
                    RingSpec::EquiChar { p, m, h: 1 }
                } else {
                    RingSpec::Unramified { p, m, h: i }
                }
            }
            RingSpec::Ramified { p, e, c, .. } => {
                if i == 1 {
                    RingSpec::EquiChar { p, m: 1, h: 1 }
                } else {
                    RingSpec::Ramified { p, e, c, h: i }
                }
            }
        };
        make_ring(spec)
    }

    /// The canonical projection onto a quotient built by
    /// [`Ring::quotient_ring`].
    pub fn project(&self, x: &Elem, target: &Ring) -> Elem {
        debug_assert!(self.owns(x));
        let i = target.depth();
        match (self.spec, target.spec) {
            (RingSpec::EquiChar { m, .. }, RingSpec::EquiChar { .. }) => {
                target.own(x.coeffs[..(m * i) as usize].to_vec())
            }
            (RingSpec::Unramified { .. }, RingSpec::Unramified { .. }) => {
                let md = target.moduli[0];
                target.own(x.coeffs.iter().map(|&c| c % md).collect())
            }
            (RingSpec::Unramified { .. }, RingSpec::EquiChar { .. }) => {
                target.own(self.residue_of(x))
            }
            (RingSpec::Ramified { .. }, RingSpec::Ramified { .. }) => target.own(
                x.coeffs
                    .iter()
                    .zip(&target.moduli)
                    .map(|(&c, &md)| c % md)
                    .collect(),
            ),
            (RingSpec::Ramified { .. }, RingSpec::EquiChar { .. }) => {
                target.own(self.residue_of(x))
            }
            _ => panic!("project: target is not a quotient of this ring"),
        }
    }

    /// A symbolic description of a henselian local field `F` with
    /// `O_F/p^h ≅ R`. No field arithmetic is performed, and the choice is
    /// one canonical option among several.
    pub fn lift_field_description(&self) -> String {
        match self.spec {
            RingSpec::EquiChar { p, m, .. } => format!("F_{}((X))", pow_u64(p, m)),
            RingSpec::Unramified { p, m, .. } => {
                if m == 1 {
                    format!("Q_{}", p)
                } else {
                    format!(
                        "the unramified extension of Q_{} of degree {} (complete, residue field F_{})",
                        p,
                        m,
                        pow_u64(p, m)
                    )
                }
            }
            RingSpec::Ramified { p, e, c, .. } => {
                format!("Q_{} adjoined a root of x^{} - {}", p, e, p * c)
            }
        }
    }

    // ----- canonical indexing (mixed radix over the coefficient moduli) ---

    pub fn index_of(&self, x: &Elem) -> u64 {
        let mut i = 0u64;
        for (&c, &md) in x.coeffs.iter().zip(&self.moduli).rev() {
            i = i * md + c;
        }
        i
    }

    pub fn elem_from_index(&self, mut i: u64) -> Elem {
        let mut coeffs = vec![0; self.moduli.len()];
        for (c, &md) in coeffs.iter_mut().zip(&self.moduli) {
            *c = i % md;
            i /= md;
        }
        self.own(coeffs)
    }

    /// Builds an element from raw coefficients in the canonical layout,
    /// reducing modulo the coefficient moduli. Shorter slices are padded
    /// with zeros (the canonical section of a quotient).
    pub fn elem_from_coeffs(&self, coeffs: &[u64]) -> Elem {
        let mut out = vec![0; self.moduli.len()];
        for (k, (o, &md)) in out.iter_mut().zip(&self.moduli).enumerate() {
            if k < coeffs.len() {
                *o = coeffs[k] % md;
            }
        }
        self.own(out)
    }

    /// All elements in canonical index order.
    pub fn all_elements(&self) -> Vec<Elem> {
        (0..self.order()).map(|i| self.elem_from_index(i)).collect()
    }

    /// All units in canonical index order.
    pub fn units(&self) -> Vec<Elem> {
        self.all_elements()
            .into_iter()
            .filter(|x| self.is_unit(x))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
}

fn mulmod(a: u64, b: u64, md: u64) -> u64 {
    ((a as u128 * b as u128) % md as u128) as u64
}

fn padic_val(mut c: u64, p: u64) -> u32 {
    let mut v = 0;
    while c % p == 0 {
        c /= p;
        v += 1;
    }
    v
}

pub(crate) fn modular_inverse(a: u64, md: u64) -> Option<u64> {
    if md == 1 {
        return Some(0);
    }
    // Extended Euclid.
    let (mut r0, mut r1) = (md as i128, (a % md) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(md as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> Ring {
        make_ring(RingSpec::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn make_ring_orders() {
        assert_eq!(ring("equichar(p=3,m=1,h=3)").order(), 27);
        assert_eq!(ring("ram(p=3,e=2,c=1,h=3)").order(), 27);
        assert_eq!(ring("unram(p=3,m=2,h=2)").order(), 81);
        assert_eq!(ring("equichar(p=5,m=1,h=2)").order(), 25);
    }

    #[test]
    fn ramified_coefficient_moduli() {
        let r = ring("ram(p=3,e=2,c=1,h=3)");
        assert_eq!(r.moduli, vec![9, 3]);
    }

    #[test]
    fn reject_even_characteristic() {
        assert!(matches!(
            RingSpec::parse("equichar(p=2,m=1,h=2)"),
            Err(RingError::InvalidSpec(_))
        ));
        assert!(matches!(
            RingSpec::parse("ram(p=3,e=2,c=3,h=3)"),
            Err(RingError::InvalidSpec(_))
        ));
        assert!(matches!(
            RingSpec::parse("ram(p=3,e=3,c=1,h=3)"),
            Err(RingError::InvalidSpec(_))
        ));
        assert!(matches!(
            RingSpec::parse("equichar(p=9,m=1,h=1)"),
            Err(RingError::InvalidSpec(_))
        ));
    }

    #[test]
    fn spec_text_round_trip() {
        for s in [
            "equichar(p=3,m=1,h=3)",
            "unram(p=3,m=2,h=2)",
            "ram(p=3,e=2,c=2,h=3)",
        ] {
            assert_eq!(RingSpec::parse(s).unwrap().canonical_text(), s);
        }
    }

    #[test]
    fn z9_addition() {
        // Z/9 = unram(p=3,m=1,h=2): 5 + 7 = 3.
        let r = ring("unram(p=3,m=1,h=2)");
        assert_eq!(r.add(&r.from_int(5), &r.from_int(7)), r.from_int(3));
    }

    #[test]
    fn nilpotent_product_in_equichar() {
        // F_3[t]/t^2: t·t = 0.
        let r = ring("equichar(p=3,m=1,h=2)");
        let t = r.uniformizer().unwrap();
        assert!(r.is_zero(&r.mul(&t, &t)));
    }

    #[test]
    fn eisenstein_relation() {
        // ram(3,2,1,3): ϖ·ϖ = 3.
        let r = ring("ram(p=3,e=2,c=1,h=3)");
        let w = r.uniformizer().unwrap();
        assert_eq!(r.mul(&w, &w), r.from_int(3));
        // ram(3,2,2,3): ϖ·ϖ = 6.
        let r2 = ring("ram(p=3,e=2,c=2,h=3)");
        let w2 = r2.uniformizer().unwrap();
        assert_eq!(r2.mul(&w2, &w2), r2.from_int(6));
    }

    #[test]
    fn valuations() {
        let z27 = ring("unram(p=3,m=1,h=3)");
        assert_eq!(z27.valuation(&z27.from_int(6)), Valuation::Finite(1));
        assert_eq!(
            z27.valuation(&z27.mul(&z27.from_int(3), &z27.from_int(3))),
            Valuation::Finite(2)
        );
        assert_eq!(z27.valuation(&z27.zero()), Valuation::Infinite);
    }

    #[test]
    fn inversion() {
        let z9 = ring("unram(p=3,m=1,h=2)");
        assert_eq!(r_invert(&z9, 2), z9.from_int(5));
        assert_eq!(z9.invert(&z9.from_int(3)), Err(RingError::NotAUnit));
        let f3t3 = ring("equichar(p=3,m=1,h=3)");
        let t = f3t3.uniformizer().unwrap();
        let x = f3t3.add(&f3t3.one(), &t);
        let inv = f3t3.invert(&x).unwrap();
        // 1/(1+t) = 1 + 2t + t^2.
        let expect = f3t3.recompose(&[
            f3t3.one(),
            f3t3.from_int(2),
            f3t3.one(),
        ]);
        assert_eq!(inv, expect);
    }

    fn r_invert(r: &Ring, n: i64) -> Elem {
        r.invert(&r.from_int(n)).unwrap()
    }

    #[test]
    fn square_roots() {
        let z9 = ring("unram(p=3,m=1,h=2)");
        let (a, b) = z9.sqrt(&z9.from_int(7)).unwrap().unwrap();
        assert_eq!((a, b), (z9.from_int(4), z9.from_int(5)));
        let (a, b) = z9.sqrt(&z9.one()).unwrap().unwrap();
        assert_eq!((a, b), (z9.from_int(1), z9.from_int(8)));
        assert!(z9.sqrt(&z9.from_int(2)).unwrap().is_none());
        assert_eq!(z9.sqrt(&z9.from_int(3)), Err(RingError::NotAUnit));
    }

    #[test]
    fn uniformizers() {
        let f3t3 = ring("equichar(p=3,m=1,h=3)");
        assert_eq!(f3t3.valuation(&f3t3.uniformizer().unwrap()), Valuation::Finite(1));
        let z9 = ring("unram(p=3,m=1,h=2)");
        assert_eq!(z9.uniformizer().unwrap(), z9.from_int(3));
        let f3 = ring("equichar(p=3,m=1,h=1)");
        assert_eq!(f3.uniformizer(), Err(RingError::DepthOne));
    }

    #[test]
    fn teichmuller_z9() {
        let z9 = ring("unram(p=3,m=1,h=2)");
        let reps = z9.teichmuller_reps();
        let set: alloc::collections::BTreeSet<u64> =
            reps.iter().map(|x| z9.index_of(x)).collect();
        let expect: alloc::collections::BTreeSet<u64> = [0u64, 1, 8].into_iter().collect();
        assert_eq!(set, expect);
    }

    #[test]
    fn teichmuller_gr92() {
        let gr = ring("unram(p=3,m=2,h=2)");
        let reps = gr.teichmuller_reps();
        assert_eq!(reps.len(), 9);
        let q = gr.residue_order();
        for x in &reps {
            assert_eq!(gr.pow(x, q), *x);
        }
        // Exhaustive cross-check: exactly 9 solutions of x^9 = x among all
        // 81 elements.
        let count = gr
            .all_elements()
            .iter()
            .filter(|x| gr.pow(x, 9) == **x)
            .count();
        assert_eq!(count, 9);
    }

    #[test]
    fn decompose_examples() {
        let z9 = ring("unram(p=3,m=1,h=2)");
        let five = z9.from_int(5);
        let d = z9.decompose(&five);
        assert_eq!(d, vec![z9.from_int(8), z9.from_int(8)]);
        assert_eq!(z9.recompose(&d), five);

        let z = z9.decompose(&z9.zero());
        assert!(z.iter().all(|s| z9.is_zero(s)));

        let f3t3 = ring("equichar(p=3,m=1,h=3)");
        let t = f3t3.uniformizer().unwrap();
        let x = f3t3.add(&t, &f3t3.mul(&t, &t));
        assert_eq!(
            f3t3.decompose(&x),
            vec![f3t3.zero(), f3t3.one(), f3t3.one()]
        );
    }

    #[test]
    fn quotients() {
        let z27 = ring("unram(p=3,m=1,h=3)");
        let q = z27.quotient_ring(2).unwrap();
        assert_eq!(q.spec(), RingSpec::parse("unram(p=3,m=1,h=2)").unwrap());
        assert_eq!(q.order(), 9);

        let ram = ring("ram(p=3,e=2,c=1,h=3)");
        let q = ram.quotient_ring(2).unwrap();
        assert_eq!(q.spec(), RingSpec::parse("ram(p=3,e=2,c=1,h=2)").unwrap());
        assert_eq!(q.order(), 9);

        let z9 = ring("unram(p=3,m=1,h=2)");
        let f3 = z9.quotient_ring(1).unwrap();
        assert_eq!(f3.spec(), RingSpec::parse("equichar(p=3,m=1,h=1)").unwrap());
        assert!(z9.quotient_ring(0).is_err());
        assert!(z9.quotient_ring(3).is_err());
    }

    #[test]
    fn projection_is_morphism() {
        for s in ["unram(p=3,m=1,h=3)", "ram(p=3,e=2,c=2,h=3)", "equichar(p=3,m=1,h=3)"] {
            let r = ring(s);
            for i in 1..=r.depth() {
                let q = r.quotient_ring(i).unwrap();
                for a in r.all_elements() {
                    for b in r.all_elements() {
                        let pa = r.project(&a, &q);
                        let pb = r.project(&b, &q);
                        assert_eq!(r.project(&r.add(&a, &b), &q), q.add(&pa, &pb));
                        assert_eq!(r.project(&r.mul(&a, &b), &q), q.mul(&pa, &pb));
                    }
                }
                assert_eq!(r.project(&r.one(), &q), q.one());
            }
        }
    }

    #[test]
    fn lift_field_descriptions() {
        assert_eq!(ring("equichar(p=3,m=1,h=3)").lift_field_description(), "F_3((X))");
        assert_eq!(ring("unram(p=3,m=1,h=3)").lift_field_description(), "Q_3");
        assert_eq!(
            ring("ram(p=3,e=2,c=1,h=3)").lift_field_description(),
            "Q_3 adjoined a root of x^2 - 3"
        );
    }

    #[test]
    fn mixed_ring_rejection() {
        let a = ring("unram(p=3,m=1,h=2)");
        let b = ring("equichar(p=3,m=1,h=2)");
        assert_eq!(
            a.arith(&a.one(), &b.one(), ArithOp::Add),
            Err(RingError::MixedRings)
        );
    }

    #[test]
    fn truncate_val_is_projection_section() {
        for s in ["unram(p=3,m=1,h=3)", "ram(p=3,e=2,c=2,h=3)", "equichar(p=3,m=1,h=3)"] {
            let r = ring(s);
            for x in r.all_elements() {
                for d in 0..=r.depth() {
                    let t = r.truncate_val(&x, d);
                    let diff = r.sub(&x, &t);
                    assert!(r.valuation(&diff).at_least(d), "{} {:?} d={}", s, x, d);
                    // Idempotent.
                    assert_eq!(r.truncate_val(&t, d), t);
                }
            }
        }
    }

    #[test]
    fn div_uniformizer_round_trip() {
        for s in ["unram(p=3,m=1,h=3)", "ram(p=3,e=2,c=2,h=3)", "equichar(p=3,m=2,h=2)"] {
            let r = ring(s);
            for x in r.all_elements() {
                for k in 0..r.depth() {
                    if r.valuation(&x).at_least(k) {
                        let y = r.div_uniformizer_pow(&x, k).unwrap();
                        assert_eq!(r.mul_uniformizer_pow(&y, k), x);
                    } else {
                        assert!(r.div_uniformizer_pow(&x, k).is_none());
                    }
                }
            }
        }
    }

    #[test]
    fn characteristic_distinguishes_kinds() {
        assert_eq!(ring("equichar(p=3,m=1,h=2)").characteristic(), 3);
        assert_eq!(ring("unram(p=3,m=1,h=2)").characteristic(), 9);
        assert_eq!(ring("ram(p=3,e=2,c=1,h=3)").characteristic(), 9);
    }
}
