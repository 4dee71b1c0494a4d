//! Brute-force unital ring isomorphism search.
//!
//! An isomorphism out of a canonical ring is determined by the images of its
//! presentation generators (the uniformizer, and the residue-field generator
//! when `m > 1`). Candidate images are enumerated in canonical index order,
//! filtered by valuation and the defining relations (`t^h = 0`, `f(θ) = 0`,
//! `ϖ^e = p·c`), the induced map is built from the coefficient
//! decomposition, and surviving maps are verified to preserve `+`, `·`, `1`
//! on all pairs. The first candidate in enumeration order wins, so the
//! result is deterministic.
//!
//! The target side is abstracted as [`FiniteRingView`] so the same search
//! identifies rings given only by raw operation tables (the induced rings on
//! root subgroups).

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::{Ring, RingError, RingSpec, Valuation};

/// Default element bound for the search (3^8).
pub const DEFAULT_ISO_CAP: u64 = 6561;

/// A finite unital commutative ring presented by indexed operations.
pub trait FiniteRingView {
    fn order(&self) -> u64;
    fn zero(&self) -> u64;
    fn one(&self) -> u64;
    fn add(&self, i: u64, j: u64) -> u64;
    fn mul(&self, i: u64, j: u64) -> u64;

    /// Exact valuation when the implementor knows it; `None` means "compute
    /// it from the radical filtration".
    fn valuation_hint(&self, _i: u64) -> Option<Option<u32>> {
        None
    }
}

/// View of a canonical ring through its element indexing.
pub struct CanonicalView<'a> {
    pub ring: &'a Ring,
}

impl<'a> FiniteRingView for CanonicalView<'a> {
    fn order(&self) -> u64 {
        self.ring.order()
    }
    fn zero(&self) -> u64 {
        self.ring.index_of(&self.ring.zero())
    }
    fn one(&self) -> u64 {
        self.ring.index_of(&self.ring.one())
    }
    fn add(&self, i: u64, j: u64) -> u64 {
        let a = self.ring.elem_from_index(i);
        let b = self.ring.elem_from_index(j);
        self.ring.index_of(&self.ring.add(&a, &b))
    }
    fn mul(&self, i: u64, j: u64) -> u64 {
        let a = self.ring.elem_from_index(i);
        let b = self.ring.elem_from_index(j);
        self.ring.index_of(&self.ring.mul(&a, &b))
    }
    fn valuation_hint(&self, i: u64) -> Option<Option<u32>> {
        let x = self.ring.elem_from_index(i);
        Some(match self.ring.valuation(&x) {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        })
    }
}

/// A ring given by explicit operation tables (used for induced rings).
#[derive(Debug, Clone)]
pub struct TableRing {
    pub order: u64,
    pub zero: u64,
    pub one: u64,
    pub add: Vec<Vec<u64>>,
    pub mul: Vec<Vec<u64>>,
}

impl FiniteRingView for TableRing {
    fn order(&self) -> u64 {
        self.order
    }
    fn zero(&self) -> u64 {
        self.zero
    }
    fn one(&self) -> u64 {
        self.one
    }
    fn add(&self, i: u64, j: u64) -> u64 {
        self.add[i as usize][j as usize]
    }
    fn mul(&self, i: u64, j: u64) -> u64 {
        self.mul[i as usize][j as usize]
    }
}

impl TableRing {
    /// Checks every commutative-unital-ring axiom by enumeration.
    pub fn verify_ring_axioms(&self) -> bool {
        let n = self.order;
        for a in 0..n {
            if self.add(a, self.zero) != a || self.mul(a, self.one) != a {
                return false;
            }
            // Additive inverse exists.
            if !(0..n).any(|b| self.add(a, b) == self.zero) {
                return false;
            }
            for b in 0..n {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return false;
                }
                for c in 0..n {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                        return false;
                    }
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return false;
                    }
                    if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// A verified unital isomorphism `source → target`, as an index map.
#[derive(Debug, Clone)]
pub struct RingIso {
    pub map: Vec<u64>,
}

fn int_action(view: &dyn FiniteRingView, n: u64) -> u64 {
    // n·1 by binary addition chains.
    let mut acc = view.zero();
    let mut base = view.one();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc = view.add(acc, base);
        }
        base = view.add(base, base);
        n >>= 1;
    }
    acc
}

fn view_pow(view: &dyn FiniteRingView, x: u64, n: u32) -> u64 {
    let mut acc = view.one();
    for _ in 0..n {
        acc = view.mul(acc, x);
    }
    acc
}

fn additive_order_of_one(view: &dyn FiniteRingView) -> u64 {
    let mut x = view.one();
    let mut n = 1;
    while x != view.zero() {
        x = view.add(x, view.one());
        n += 1;
        debug_assert!(n <= view.order() + 1);
    }
    n
}

/// Valuations of every target element, from the hint or from the radical
/// filtration (`v(x) = max k with x ∈ J^k`). `None` encodes `∞` (zero).
fn target_valuations(view: &dyn FiniteRingView) -> Vec<Option<u32>> {
    let n = view.order();
    if let Some(first) = view.valuation_hint(0) {
        let mut out = vec![first];
        for i in 1..n {
            out.push(view.valuation_hint(i).expect("hint must be total"));
        }
        return out;
    }
    // Units: x with some y, x·y = 1.
    let mut is_unit = vec![false; n as usize];
    for x in 0..n {
        for y in 0..n {
            if view.mul(x, y) == view.one() {
                is_unit[x as usize] = true;
                break;
            }
        }
    }
    // Radical powers by additive span of products.
    let mut val: Vec<Option<u32>> = (0..n)
        .map(|x| if is_unit[x as usize] { Some(0) } else { None })
        .collect();
    let mut level: BTreeSet<u64> = (0..n).filter(|&x| !is_unit[x as usize]).collect();
    let mut k = 1;
    loop {
        for &x in &level {
            if x != view.zero() {
                val[x as usize] = Some(k);
            }
        }
        if level.len() == 1 {
            break; // only zero remains
        }
        // J^{k+1} = additive span of J^1 · J^k.
        let products: BTreeSet<u64> = level
            .iter()
            .flat_map(|&a| {
                (0..n)
                    .filter(|&j| !is_unit[j as usize])
                    .map(move |j| (a, j))
            })
            .map(|(a, j)| view.mul(a, j))
            .collect();
        let mut span: BTreeSet<u64> = BTreeSet::new();
        span.insert(view.zero());
        let mut frontier: Vec<u64> = vec![view.zero()];
        while let Some(s) = frontier.pop() {
            for &p in &products {
                let t = view.add(s, p);
                if span.insert(t) {
                    frontier.push(t);
                }
            }
        }
        if span == level {
            // Filtration stalled before reaching {0}: not a truncated
            // valuation ring; tag everything non-unit as ∞-like failure.
            break;
        }
        level = span;
        k += 1;
        if k > 64 {
            break;
        }
    }
    val[view.zero() as usize] = None;
    val
}

/// The generators whose images determine an isomorphism, with their
/// relation checks.
struct Presentation {
    /// Candidate filter: (required valuation, relation predicate).
    gens: Vec<GenSpec>,
}

enum GenSpec {
    /// The uniformizer image: `v = 1`, `u^h = 0`, plus `u^e = p·c` for
    /// ramified sources.
    Uniformizer { h: u32, eisenstein: Option<(u32, u64)> },
    /// Residue-field generator image: `v = 0` and `f(w) = 0` for the given
    /// integer polynomial (constant term first, monic lift included).
    ResidueGen { poly: Vec<u64> },
}

fn presentation_of(spec: RingSpec, source: &Ring) -> Presentation {
    let mut gens = Vec::new();
    match spec {
        RingSpec::EquiChar { p, m, h } => {
            if m > 1 {
                // Minimal polynomial of the residue-field generator over F_p,
                // with integer coefficients: built from the F_q modulus.
                let g = source.residue_field().generator();
                gens.push(GenSpec::ResidueGen { poly: minpoly_over_fp(source, &g, p, m) });
            }
            if h > 1 {
                gens.push(GenSpec::Uniformizer { h, eisenstein: None });
            }
        }
        RingSpec::Unramified { m, h, .. } => {
            if m > 1 {
                // θ satisfies the lifted modulus f (integer coefficients).
                let mut poly: Vec<u64> = source.residue_field().modulus_low.clone();
                poly.push(1);
                gens.push(GenSpec::ResidueGen { poly });
            }
            let _ = h; // uniformizer is p·1: forced, no free generator
        }
        RingSpec::Ramified { p, e, c, h } => {
            gens.push(GenSpec::Uniformizer { h, eisenstein: Some((e, p * c)) });
        }
    }
    Presentation { gens }
}

/// Integer-coefficient polynomial satisfied by the residue generator `g`
/// (its minimal polynomial over `F_p`, coefficients in `[0, p)`).
fn minpoly_over_fp(source: &Ring, g: &[u64], p: u64, m: u32) -> Vec<u64> {
    // The powers 1, g, …, g^{m-1} are an F_p-basis; solve g^m = Σ a_j g^j by
    // linear algebra over F_p.
    let fq = source.residue_field();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut pw = fq.one();
    for _ in 0..m {
        rows.push(pw.clone());
        pw = fq.mul(&pw, &g.to_vec());
    }
    let target = pw; // g^m
    // Gaussian elimination for coefficients a with Σ a_j·rows[j] = target.
    let m = m as usize;
    let mut aug: Vec<Vec<u64>> = (0..m)
        .map(|i| {
            let mut row: Vec<u64> = (0..m).map(|j| rows[j][i]).collect();
            row.push(target[i]);
            row
        })
        .collect();
    let mut piv_col_of_row = vec![usize::MAX; m];
    let mut r = 0;
    for c in 0..m {
        if let Some(pr) = (r..m).find(|&i| aug[i][c] % p != 0) {
            aug.swap(r, pr);
            let inv = super::modular_inverse(aug[r][c] % p, p).unwrap();
            for x in aug[r].iter_mut() {
                *x = (*x * inv) % p;
            }
            for i in 0..m {
                if i != r && aug[i][c] % p != 0 {
                    let f = aug[i][c] % p;
                    for j in 0..=m {
                        let sub = (f * aug[r][j]) % p;
                        aug[i][j] = (aug[i][j] + p - sub) % p;
                    }
                }
            }
            piv_col_of_row[r] = c;
            r += 1;
        }
    }
    let mut a = vec![0u64; m];
    for i in 0..m {
        if piv_col_of_row[i] != usize::MAX {
            a[piv_col_of_row[i]] = aug[i][m];
        }
    }
    // minpoly(x) = x^m − Σ a_j x^j, as nonnegative residues.
    let mut poly: Vec<u64> = a.iter().map(|&c| (p - c % p) % p).collect();
    poly.push(1);
    poly
}

fn poly_eval(view: &dyn FiniteRingView, poly: &[u64], x: u64) -> u64 {
    // Horner, integer coefficients acting through n·1.
    let mut acc = view.zero();
    for &c in poly.iter().rev() {
        acc = view.mul(acc, x);
        acc = view.add(acc, int_action(view, c));
    }
    acc
}

/// Builds the map induced by chosen generator images. Returns the image of
/// every source element (by canonical index).
fn build_map(source: &Ring, view: &dyn FiniteRingView, images: &[u64]) -> Vec<u64> {
    let n = source.order();
    let mut img_of = Vec::with_capacity(n as usize);
    match source.spec() {
        RingSpec::EquiChar { p, m, h } => {
            let fq = source.residue_field();
            let g = fq.generator();
            // For m = 1 the residue generator lies in the prime field, so
            // its image is forced to be the integer action.
            let (w, u) = match (m > 1, h > 1) {
                (true, true) => (images[0], images[1]),
                (true, false) => (images[0], view.zero()),
                (false, true) => (int_action(view, fq.index_of(&g)), images[0]),
                (false, false) => (int_action(view, fq.index_of(&g)), view.zero()),
            };
            let q = fq.order();
            let mut log = vec![u64::MAX; q as usize];
            let mut pw = fq.one();
            for k in 0..q - 1 {
                log[fq.index_of(&pw) as usize] = k;
                pw = fq.mul(&pw, &g);
            }
            let w_pows: Vec<u64> = {
                let mut v = Vec::with_capacity(q as usize);
                let mut acc = view.one();
                for _ in 0..q.max(1) {
                    v.push(acc);
                    acc = view.mul(acc, w);
                }
                v
            };
            let u_pows: Vec<u64> = {
                let mut v = Vec::with_capacity(h as usize);
                let mut acc = view.one();
                for _ in 0..h {
                    v.push(acc);
                    acc = view.mul(acc, u);
                }
                v
            };
            for i in 0..n {
                let x = source.elem_from_index(i);
                let digits = source.decompose(&x);
                let mut acc = view.zero();
                for (t_pow, s) in digits.iter().enumerate() {
                    if source.is_zero(s) {
                        continue;
                    }
                    let ridx = fq.index_of(&source.residue_of(s));
                    let k = log[ridx as usize];
                    debug_assert_ne!(k, u64::MAX);
                    let term = view.mul(w_pows[k as usize], u_pows[t_pow]);
                    acc = view.add(acc, term);
                }
                let _ = p;
                img_of.push(acc);
            }
        }
        RingSpec::Unramified { m, .. } => {
            let theta = if m > 1 { images[0] } else { view.one() };
            let m = m as usize;
            let mut theta_pows = Vec::with_capacity(m);
            let mut acc = view.one();
            for _ in 0..m {
                theta_pows.push(acc);
                acc = view.mul(acc, theta);
            }
            for i in 0..n {
                let x = source.elem_from_index(i);
                let mut img = view.zero();
                for (j, &c) in x.coeffs().iter().enumerate() {
                    img = view.add(img, view.mul(int_action(view, c), theta_pows[j]));
                }
                img_of.push(img);
            }
        }
        RingSpec::Ramified { e, .. } => {
            let w = images[0];
            let e = e as usize;
            let mut w_pows = Vec::with_capacity(e);
            let mut acc = view.one();
            for _ in 0..e {
                w_pows.push(acc);
                acc = view.mul(acc, w);
            }
            for i in 0..n {
                let x = source.elem_from_index(i);
                let mut img = view.zero();
                for (j, &c) in x.coeffs().iter().enumerate() {
                    img = view.add(img, view.mul(int_action(view, c), w_pows[j]));
                }
                img_of.push(img);
            }
        }
    }
    img_of
}

fn is_bijection(map: &[u64], n: u64) -> bool {
    let mut seen = vec![false; n as usize];
    for &y in map {
        if y >= n || seen[y as usize] {
            return false;
        }
        seen[y as usize] = true;
    }
    true
}

fn verify_total(source: &Ring, view: &dyn FiniteRingView, map: &[u64]) -> bool {
    let n = source.order();
    if map[source.index_of(&source.one()) as usize] != view.one() {
        return false;
    }
    for i in 0..n {
        let a = source.elem_from_index(i);
        for j in i..n {
            let b = source.elem_from_index(j);
            let s = source.index_of(&source.add(&a, &b));
            if view.add(map[i as usize], map[j as usize]) != map[s as usize] {
                return false;
            }
            let p = source.index_of(&source.mul(&a, &b));
            if view.mul(map[i as usize], map[j as usize]) != map[p as usize] {
                return false;
            }
        }
    }
    true
}

/// Searches for a unital ring isomorphism from a canonical ring onto any
/// finite ring view. Deterministic: first candidate in canonical
/// enumeration order wins.
pub fn identify(
    source: &Ring,
    view: &dyn FiniteRingView,
    cap: u64,
) -> Result<Option<RingIso>, RingError> {
    let n = source.order();
    if n > cap || view.order() > cap {
        return Err(RingError::TooLarge);
    }
    if n != view.order() {
        return Ok(None);
    }
    if additive_order_of_one(view) != source.characteristic() {
        return Ok(None);
    }
    let vals = target_valuations(view);
    let pres = presentation_of(source.spec(), source);

    // Candidate lists per generator.
    let mut candidate_sets: Vec<Vec<u64>> = Vec::new();
    for gen in &pres.gens {
        let mut cands = Vec::new();
        for y in 0..n {
            match gen {
                GenSpec::Uniformizer { h, eisenstein } => {
                    if vals[y as usize] != Some(1) {
                        continue;
                    }
                    if view_pow(view, y, *h) != view.zero() {
                        continue;
                    }
                    if let Some((e, pc)) = eisenstein {
                        if view_pow(view, y, *e) != int_action(view, *pc) {
                            continue;
                        }
                    }
                    cands.push(y);
                }
                GenSpec::ResidueGen { poly } => {
                    if vals[y as usize] != Some(0) {
                        continue;
                    }
                    if poly_eval(view, poly, y) != view.zero() {
                        continue;
                    }
                    cands.push(y);
                }
            }
        }
        if cands.is_empty() {
            return Ok(None);
        }
        candidate_sets.push(cands);
    }

    // No free generators (e.g. Z/p^h): the map is forced.
    if candidate_sets.is_empty() {
        let map = build_map(source, view, &[]);
        if is_bijection(&map, n) && verify_total(source, view, &map) {
            return Ok(Some(RingIso { map }));
        }
        return Ok(None);
    }

    let mut idx = vec![0usize; candidate_sets.len()];
    loop {
        let images: Vec<u64> = idx
            .iter()
            .zip(&candidate_sets)
            .map(|(&i, set)| set[i])
            .collect();
        let map = build_map(source, view, &images);
        if is_bijection(&map, n) && verify_total(source, view, &map) {
            return Ok(Some(RingIso { map }));
        }
        // Advance the mixed-radix candidate counter.
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < candidate_sets[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == candidate_sets.len() {
                return Ok(None);
            }
        }
    }
}

/// Isomorphism search between two canonical rings.
pub fn iso_search(r1: &Ring, r2: &Ring, cap: u64) -> Result<Option<RingIso>, RingError> {
    identify(r1, &CanonicalView { ring: r2 }, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::make_ring;

    fn ring(s: &str) -> Ring {
        make_ring(RingSpec::parse(s).unwrap()).unwrap()
    }

    fn found(a: &str, b: &str) -> bool {
        iso_search(&ring(a), &ring(b), DEFAULT_ISO_CAP)
            .unwrap()
            .is_some()
    }

    #[test]
    fn depth_three_ramified_pair_is_nonisomorphic() {
        assert!(!found("ram(p=3,e=2,c=1,h=3)", "ram(p=3,e=2,c=2,h=3)"));
        assert!(!found("ram(p=3,e=2,c=2,h=3)", "ram(p=3,e=2,c=1,h=3)"));
    }

    #[test]
    fn depth_two_quotients_are_isomorphic() {
        assert!(found("ram(p=3,e=2,c=1,h=2)", "ram(p=3,e=2,c=2,h=2)"));
        assert!(found("ram(p=3,e=2,c=2,h=2)", "ram(p=3,e=2,c=1,h=2)"));
    }

    #[test]
    fn characteristic_mismatch_is_rejected() {
        assert!(!found("equichar(p=3,m=1,h=2)", "unram(p=3,m=1,h=2)"));
    }

    #[test]
    fn self_isomorphisms_exist() {
        for s in [
            "equichar(p=3,m=1,h=3)",
            "equichar(p=3,m=2,h=2)",
            "unram(p=3,m=1,h=3)",
            "unram(p=3,m=2,h=2)",
            "ram(p=3,e=2,c=1,h=3)",
            "equichar(p=5,m=1,h=2)",
        ] {
            assert!(found(s, s), "{} not isomorphic to itself", s);
        }
    }

    #[test]
    fn ramified_depth_two_matches_equichar() {
        // At depth 2 the Eisenstein relation is invisible: O/p^2 ≅ F_3[t]/t^2.
        assert!(found("ram(p=3,e=2,c=1,h=2)", "equichar(p=3,m=1,h=2)"));
        assert!(found("equichar(p=3,m=1,h=2)", "ram(p=3,e=2,c=1,h=2)"));
    }

    #[test]
    fn verified_map_preserves_structure() {
        let r1 = ring("ram(p=3,e=2,c=1,h=2)");
        let r2 = ring("ram(p=3,e=2,c=2,h=2)");
        let iso = iso_search(&r1, &r2, DEFAULT_ISO_CAP).unwrap().unwrap();
        for a in r1.all_elements() {
            for b in r1.all_elements() {
                let ia = iso.map[r1.index_of(&a) as usize];
                let ib = iso.map[r1.index_of(&b) as usize];
                let ea = r2.elem_from_index(ia);
                let eb = r2.elem_from_index(ib);
                assert_eq!(
                    iso.map[r1.index_of(&r1.mul(&a, &b)) as usize],
                    r2.index_of(&r2.mul(&ea, &eb))
                );
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let r = ring("unram(p=3,m=1,h=2)");
        assert!(matches!(iso_search(&r, &r, 5), Err(RingError::TooLarge)));
    }

    #[test]
    fn galois_ring_self_iso_uses_residue_generator() {
        // GR(9, 2): the free generator is θ; the search must succeed.
        assert!(found("unram(p=3,m=2,h=2)", "unram(p=3,m=2,h=2)"));
    }
}
