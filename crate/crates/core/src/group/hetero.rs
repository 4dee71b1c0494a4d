//! The heterogeneous two-ring block group: matrices
//!
//! ```text
//!   [ A  B ]   A ∈ GL_n(R₁),  B ∈ M_n(R′),
//!   [ C  D ]   C ∈ M_n(I),    D ∈ GL_n(R₂),
//! ```
//!
//! where `R₁`, `R₂` are ramified depth-`h` rings sharing `(p, e)` whose
//! depth-`(h−1)` quotients are identified through the canonical coordinate
//! map (`R′`), and `I` is the maximal-ideal module with coordinates
//! `x ↦ x/ϖ ∈ R′` (so the identification sends `ϖ₁ ↦ ϖ₂` and
//! `ϖ₁² ↦ ϖ₂²`). The mixed products are computed in `R′` and re-embedded,
//! which is exactly what makes the group law well defined — and the group
//! of parahoric type with `Ψ` of type `A_{n−1}×A_{n−1}` whose two diagonal
//! blocks remember the *different* rings `R₁` and `R₂`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::rational::Rational;
use crate::report::VerificationReport;
use crate::ring::iso::{identify, iso_search, TableRing, DEFAULT_ISO_CAP};
use crate::ring::{make_ring, Elem, Ring, RingSpec, Valuation};
use crate::rootsystem::{
    build_root_system, extend_concave, psi_of, ConcaveFunction, PsiSubsystem, Root, RootSystem,
    TypeLabel,
};

use super::axioms::{axiom_report, AxiomGroup};
use super::GroupError;

/// Which of the four block sectors a matrix entry lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// Diagonal block over `R₁`.
    TopLeft,
    /// Off-diagonal over `R′`.
    TopRight,
    /// Off-diagonal with `I`-coordinates (`x/ϖ ∈ R′`).
    BottomLeft,
    /// Diagonal block over `R₂`.
    BottomRight,
}

/// An element: `2n × 2n` with sector-typed entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HMat {
    n: usize,
    entries: Vec<Elem>,
}

impl HMat {
    pub fn entry(&self, i: usize, j: usize) -> &Elem {
        &self.entries[i * 2 * self.n + j]
    }
}

pub struct HeteroGroup {
    pub n: usize,
    pub ring1: Ring,
    pub ring2: Ring,
    /// The identified depth-`(h−1)` quotient, in `R₁`-canonical form.
    pub rp: Ring,
    pub system: RootSystem,
    pub f0: ConcaveFunction,
    pub psi: PsiSubsystem,
}

pub fn counterexample_rings() -> (RingSpec, RingSpec) {
    (
        RingSpec::parse("ram(p=3,e=2,c=1,h=3)").unwrap(),
        RingSpec::parse("ram(p=3,e=2,c=2,h=3)").unwrap(),
    )
}

impl HeteroGroup {
    /// Builds the block group, verifying that the two rings are compatible:
    /// same `(p, e, h)`, isomorphic depth-`(h−1)` quotients (via the
    /// isomorphism search), and — what the block arithmetic actually needs —
    /// that the canonical coordinate identification is itself a ring
    /// isomorphism and acts consistently on the ideal module.
    pub fn new(n: usize, spec1: RingSpec, spec2: RingSpec) -> Result<HeteroGroup, GroupError> {
        if n < 1 || n > 2 {
            return Err(GroupError::TooLarge);
        }
        let (RingSpec::Ramified { p: p1, e: e1, h: h1, .. }, RingSpec::Ramified { p: p2, e: e2, h: h2, .. }) =
            (spec1, spec2)
        else {
            return Err(GroupError::IncompatibleRings(String::from(
                "both rings must be ramified",
            )));
        };
        if (p1, e1, h1) != (p2, e2, h2) {
            return Err(GroupError::IncompatibleRings(String::from(
                "rings must share p, e, h",
            )));
        }
        let ring1 = make_ring(spec1)?;
        let ring2 = make_ring(spec2)?;
        let h = ring1.depth();
        let rp = ring1.quotient_ring(h - 1)?;
        let rp2 = ring2.quotient_ring(h - 1)?;
        if iso_search(&rp, &rp2, DEFAULT_ISO_CAP)?.is_none() {
            return Err(GroupError::IncompatibleRings(String::from(
                "depth-(h−1) quotients are not isomorphic",
            )));
        }
        // The canonical coordinate map rp → rp2 must itself be the
        // isomorphism, or the identified block arithmetic is ill defined.
        for x in rp.all_elements() {
            for y in rp.all_elements() {
                let m1 = rp.mul(&x, &y);
                let m2 = rp2.mul(
                    &rp2.elem_from_coeffs(x.coeffs()),
                    &rp2.elem_from_coeffs(y.coeffs()),
                );
                if m2.coeffs() != m1.coeffs() {
                    return Err(GroupError::IncompatibleRings(String::from(
                        "coordinate identification of the quotients is not multiplicative",
                    )));
                }
            }
        }
        // Module agreement: ι_k(w·y) = lift_k(w)·ι_k(y) in both rings.
        for k in [1u8, 2] {
            let ring = if k == 1 { &ring1 } else { &ring2 };
            for w in rp.all_elements() {
                for y in rp.all_elements() {
                    let lhs = iota(ring, &rp.mul(&w, &y));
                    let rhs = ring.mul(&lift(ring, &w), &iota(ring, &y));
                    if lhs != rhs {
                        return Err(GroupError::IncompatibleRings(String::from(
                            "ideal-module structures disagree",
                        )));
                    }
                }
            }
        }
        let system = build_root_system(TypeLabel::A, 2 * n - 1)
            .map_err(|e| GroupError::UnsupportedFamily(format!("{:?}", e)))?;
        // Crossing roots get the asymmetric window: B free, C shifted.
        let mut r = vec![Rational::from_integer(0); 2 * n - 1];
        r[n - 1] = Rational::new(-1, 2);
        let f0 = extend_concave(&system, &r);
        let psi = psi_of(&system, &f0)
            .map_err(|e| GroupError::IllFormedWindows(format!("{:?}", e)))?;
        Ok(HeteroGroup {
            n,
            ring1,
            ring2,
            rp,
            system,
            f0,
            psi,
        })
    }

    pub fn size(&self) -> usize {
        2 * self.n
    }

    pub fn depth(&self) -> u32 {
        self.ring1.depth()
    }

    pub fn sector(&self, i: usize, j: usize) -> Sector {
        match (i < self.n, j < self.n) {
            (true, true) => Sector::TopLeft,
            (true, false) => Sector::TopRight,
            (false, true) => Sector::BottomLeft,
            (false, false) => Sector::BottomRight,
        }
    }

    fn sector_ring(&self, s: Sector) -> &Ring {
        match s {
            Sector::TopLeft => &self.ring1,
            Sector::BottomRight => &self.ring2,
            Sector::TopRight | Sector::BottomLeft => &self.rp,
        }
    }

    fn proj1(&self, x: &Elem) -> Elem {
        self.rp.elem_from_coeffs(self.ring1.project(x, &self.rp).coeffs())
    }

    fn proj2(&self, x: &Elem) -> Elem {
        // Project in R₂ coordinates, then read through the identification.
        let q2 = self
            .ring2
            .quotient_ring(self.depth() - 1)
            .expect("depth ≥ 2");
        self.rp.elem_from_coeffs(self.ring2.project(x, &q2).coeffs())
    }

    /// The product of entries `(i,j)·(j,k)`, landing in sector `(i,k)`.
    fn entry_mul(&self, i: usize, j: usize, k: usize, a: &Elem, b: &Elem) -> Elem {
        use Sector::*;
        match (self.sector(i, j), self.sector(j, k)) {
            (TopLeft, TopLeft) => self.ring1.mul(a, b),
            (BottomRight, BottomRight) => self.ring2.mul(a, b),
            (TopLeft, TopRight) => self.rp.mul(&self.proj1(a), b),
            (TopRight, BottomRight) => self.rp.mul(a, &self.proj2(b)),
            (TopRight, BottomLeft) => iota(&self.ring1, &self.rp.mul(a, b)),
            (BottomLeft, TopRight) => iota(&self.ring2, &self.rp.mul(a, b)),
            (BottomLeft, TopLeft) => self.rp.mul(a, &self.proj1(b)),
            (BottomRight, BottomLeft) => self.rp.mul(&self.proj2(a), b),
            _ => unreachable!("sector composition"),
        }
    }

    pub fn identity(&self) -> HMat {
        let nn = self.size();
        let mut entries = Vec::with_capacity(nn * nn);
        for i in 0..nn {
            for j in 0..nn {
                let ring = self.sector_ring(self.sector(i, j));
                entries.push(if i == j { ring.one() } else { ring.zero() });
            }
        }
        HMat { n: self.n, entries }
    }

    pub fn mul(&self, a: &HMat, b: &HMat) -> HMat {
        let nn = self.size();
        let mut entries = Vec::with_capacity(nn * nn);
        for i in 0..nn {
            for k in 0..nn {
                let ring = self.sector_ring(self.sector(i, k));
                let mut acc = ring.zero();
                for j in 0..nn {
                    let term = self.entry_mul(i, j, k, a.entry(i, j), b.entry(j, k));
                    acc = ring.add(&acc, &term);
                }
                entries.push(acc);
            }
        }
        HMat { n: self.n, entries }
    }

    /// Blockwise inverse through the Schur complements.
    pub fn inv(&self, m: &HMat) -> HMat {
        let n = self.n;
        let get = |i: usize, j: usize| m.entry(i, j).clone();
        // Work with n×n blocks as flat vectors.
        let block = |bi: usize, bj: usize| -> Vec<Elem> {
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    out.push(get(bi * n + i, bj * n + j));
                }
            }
            out
        };
        let a = block(0, 0);
        let b = block(0, 1);
        let c = block(1, 0);
        let d = block(1, 1);
        let a_inv = super::mat_inverse(&self.ring1, n, &a).expect("A invertible");
        let d_inv = super::mat_inverse(&self.ring2, n, &d).expect("D invertible");

        // Generic block products in the sector calculus: the sector of a
        // block product is determined by the block row/column.
        let bmul = |bi: usize, bk: usize, bj: usize, x: &[Elem], y: &[Elem]| -> Vec<Elem> {
            let ring = self.sector_ring(self.sector(bi * n, bj * n));
            let mut out = vec![ring.zero(); n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut acc = ring.zero();
                    for k in 0..n {
                        let term = self.entry_mul(
                            bi * n + i,
                            bk * n + k,
                            bj * n + j,
                            &x[i * n + k],
                            &y[k * n + j],
                        );
                        acc = ring.add(&acc, &term);
                    }
                    out[i * n + j] = acc;
                }
            }
            out
        };
        let bsub = |ring: &Ring, x: &[Elem], y: &[Elem]| -> Vec<Elem> {
            x.iter().zip(y).map(|(p, q)| ring.sub(p, q)).collect()
        };
        let bneg = |ring: &Ring, x: &[Elem]| -> Vec<Elem> {
            x.iter().map(|p| ring.neg(p)).collect()
        };

        // S_A = A − B·D⁻¹·C over R₁; S_D = D − C·A⁻¹·B over R₂.
        let bd_inv = bmul(0, 1, 1, &b, &d_inv); // TopRight
        let bdc = bmul(0, 1, 0, &bd_inv, &c); // TopLeft
        let s_a = bsub(&self.ring1, &a, &bdc);
        let s_a_inv = super::mat_inverse(&self.ring1, n, &s_a).expect("Schur A invertible");

        let a_inv_b = bmul(0, 0, 1, &a_inv, &b); // TopRight
        let cab = bmul(1, 0, 1, &c, &a_inv_b); // BottomRight
        let s_d = bsub(&self.ring2, &d, &cab);
        let s_d_inv = super::mat_inverse(&self.ring2, n, &s_d).expect("Schur D invertible");

        let top_right = bneg(&self.rp, &bmul(0, 1, 1, &a_inv_b, &s_d_inv));
        let d_inv_c = bmul(1, 1, 0, &d_inv, &c); // BottomLeft
        let bottom_left = bneg(&self.rp, &bmul(1, 0, 0, &d_inv_c, &s_a_inv));

        let nn = self.size();
        let mut entries = Vec::with_capacity(nn * nn);
        for i in 0..nn {
            for j in 0..nn {
                let (bi, bj) = (i / n, j / n);
                let (li, lj) = (i % n, j % n);
                let v = match (bi, bj) {
                    (0, 0) => s_a_inv[li * n + lj].clone(),
                    (0, 1) => top_right[li * n + lj].clone(),
                    (1, 0) => bottom_left[li * n + lj].clone(),
                    (1, 1) => s_d_inv[li * n + lj].clone(),
                    _ => unreachable!(),
                };
                entries.push(v);
            }
        }
        let out = HMat { n: self.n, entries };
        debug_assert_eq!(self.mul(m, &out), self.identity());
        out
    }

    /// Membership: both diagonal blocks invertible (the sector typing
    /// enforces the B/C shapes).
    pub fn contains(&self, m: &HMat) -> bool {
        let n = self.n;
        let a: Vec<Elem> = (0..n * n)
            .map(|k| m.entry(k / n, k % n).clone())
            .collect();
        let d: Vec<Elem> = (0..n * n)
            .map(|k| m.entry(n + k / n, n + k % n).clone())
            .collect();
        self.ring1.is_unit(&super::det_expansion(&self.ring1, n, &a))
            && self.ring2.is_unit(&super::det_expansion(&self.ring2, n, &d))
    }

    pub fn key(&self, m: &HMat) -> Vec<u64> {
        let nn = self.size();
        (0..nn * nn)
            .map(|k| {
                let (i, j) = (k / nn, k % nn);
                self.sector_ring(self.sector(i, j)).index_of(m.entry(i, j))
            })
            .collect()
    }

    /// `u_r(x)`: `x` lives in the sector ring of the root's position.
    pub fn root_element(&self, r: &Root, x: &Elem) -> HMat {
        let (i, j) = self.position_of(r);
        let mut m = self.identity();
        m.entries[i * self.size() + j] = x.clone();
        m
    }

    fn position_of(&self, r: &Root) -> (usize, usize) {
        let pat = super::root_pattern(super::Family::Gl, self.size(), r);
        (pat[0].0, pat[0].1)
    }

    /// All elements of the whole group, for `n = 1` (order 26 244 at the
    /// counterexample parameters).
    pub fn enumerate(&self) -> Result<Vec<HMat>, GroupError> {
        if self.n != 1 {
            return Err(GroupError::TooLarge);
        }
        let mut out = Vec::new();
        for a in self.ring1.units() {
            for b in self.rp.all_elements() {
                for c in self.rp.all_elements() {
                    for d in self.ring2.units() {
                        out.push(HMat {
                            n: 1,
                            entries: vec![a.clone(), b.clone(), c.clone(), d.clone()],
                        });
                    }
                }
            }
        }
        Ok(out)
    }

    /// The torus elements: diagonal units of both blocks.
    pub fn torus_elements(&self) -> Vec<HMat> {
        let u1 = self.ring1.units();
        let u2 = self.ring2.units();
        let n = self.n;
        let mut out = Vec::new();
        let mut idx = vec![0usize; 2 * n];
        loop {
            let mut m = self.identity();
            for (k, &sel) in idx.iter().enumerate() {
                let v = if k < n { u1[sel].clone() } else { u2[sel].clone() };
                m.entries[k * self.size() + k] = v;
            }
            out.push(m);
            // Mixed-radix advance (u1 and u2 have equal size: same p,e,h).
            let mut k = 0;
            loop {
                idx[k] += 1;
                let cap = if k < n { u1.len() } else { u2.len() };
                if idx[k] < cap {
                    break;
                }
                idx[k] = 0;
                k += 1;
                if k == 2 * n {
                    return out;
                }
            }
        }
    }

    /// The induced §3.2 ring on a within-block root subgroup, as raw
    /// tables (zero = group identity).
    pub fn induced_ring_block(&self, r: &Root) -> Result<(Vec<HMat>, TableRing), GroupError> {
        let (i, j) = self.position_of(r);
        let s = self.sector(i, j);
        let ring = self.sector_ring(s).clone();
        if s != Sector::TopLeft && s != Sector::BottomRight {
            return Err(GroupError::NotTransitive);
        }
        let mut values = ring.all_elements();
        values.sort_by_key(|x| ring.index_of(x));
        let elements: Vec<HMat> = values.iter().map(|x| self.root_element(r, x)).collect();
        let index_of = |m: &HMat| elements.iter().position(|e| e == m).expect("closed");
        let u1 = self.root_element(r, &ring.one());
        let one_index = index_of(&u1);
        let nn = values.len();

        let scaling = |ratio: &Elem| -> HMat {
            let mut m = self.identity();
            m.entries[i * self.size() + i] = ratio.clone();
            m
        };
        let conj = |h: &HMat, g: &HMat| self.mul(&self.mul(h, g), &self.inv(h));
        let mut add = vec![vec![0u64; nn]; nn];
        let mut mul = vec![vec![0u64; nn]; nn];
        for k in 0..nn {
            for l in 0..nn {
                add[k][l] = index_of(&self.mul(&elements[k], &elements[l])) as u64;
                let u = &values[k];
                mul[k][l] = if ring.is_unit(u) {
                    index_of(&conj(&scaling(u), &elements[l])) as u64
                } else {
                    // (u + u1)·u′ − u′ through the group operations.
                    let shifted = ring.add(u, &ring.one());
                    let prod = conj(&scaling(&shifted), &elements[l]);
                    index_of(&self.mul(&prod, &self.inv(&elements[l]))) as u64
                };
            }
        }
        let table = TableRing {
            order: nn as u64,
            zero: 0,
            one: one_index as u64,
            add,
            mul,
        };
        if !table.verify_ring_axioms() {
            return Err(GroupError::FactorizationFailed(String::from(
                "induced multiplication is not a ring",
            )));
        }
        Ok((elements, table))
    }
}

/// `lift`: the canonical section `R′ → R_k` (same coefficients, top digit
/// zero); `iota`: the ideal embedding `y ↦ ϖ·lift(y)`.
fn lift(ring: &Ring, y: &Elem) -> Elem {
    ring.elem_from_coeffs(y.coeffs())
}

fn iota(ring: &Ring, y: &Elem) -> Elem {
    ring.mul_uniformizer_pow(&lift(ring, y), 1)
}

impl AxiomGroup for HeteroGroup {
    type El = HMat;

    fn system(&self) -> &RootSystem {
        &self.system
    }
    fn depth(&self) -> u32 {
        HeteroGroup::depth(self)
    }
    fn residue_q(&self) -> u64 {
        self.ring1.residue_order()
    }
    fn reductive_rank(&self) -> u32 {
        2 * self.n as u32
    }
    fn f0_value(&self, r: &Root) -> i64 {
        self.f0.value(r)
    }
    fn psi_contains(&self, r: &Root) -> bool {
        self.psi.contains(r)
    }
    fn identity(&self) -> HMat {
        HeteroGroup::identity(self)
    }
    fn mul(&self, a: &HMat, b: &HMat) -> HMat {
        HeteroGroup::mul(self, a, b)
    }
    fn inv(&self, a: &HMat) -> HMat {
        HeteroGroup::inv(self, a)
    }
    fn key(&self, a: &HMat) -> Vec<u64> {
        HeteroGroup::key(self, a)
    }
    fn torus(&self) -> Vec<HMat> {
        self.torus_elements()
    }
    fn u_filt(&self, r: &Root, idx: i64) -> Vec<HMat> {
        let (i, j) = self.position_of(r);
        let s = self.sector(i, j);
        let ring = self.sector_ring(s);
        // Entry-valuation floor for the abstract index: I-coordinates sit
        // one level below their embedded valuation.
        let floor = match s {
            Sector::BottomLeft => idx - 1,
            _ => idx,
        }
        .max(0) as u32;
        ring.all_elements()
            .into_iter()
            .filter(|x| match ring.valuation(x) {
                Valuation::Finite(v) => v >= floor,
                Valuation::Infinite => true,
            })
            .map(|x| self.root_element(r, &x))
            .collect()
    }
    fn project_root(&self, g: &HMat, r: &Root) -> Option<HMat> {
        let (i, j) = self.position_of(r);
        Some(self.root_element(r, g.entry(i, j)))
    }
    fn h_proj(&self, r: &Root, g: &HMat) -> Option<HMat> {
        // g = u_r(a)·diag(d₁ at i, d₂ at j)·u_{−r}(c): solve from the cell.
        let (i, j) = self.position_of(r);
        let s_jj = self.sector(j, j);
        let ring_jj = self.sector_ring(s_jj);
        let d2 = g.entry(j, j);
        if !ring_jj.is_unit(d2) {
            return None;
        }
        let d2_inv = ring_jj.invert(d2).ok()?;
        // a = m_ij·d₂⁻¹ (in the (i,j)-sector), c = d₂⁻¹·m_ji.
        let a = self.entry_mul(i, j, j, g.entry(i, j), &d2_inv);
        let c = self.entry_mul(j, j, i, &d2_inv, g.entry(j, i));
        // d₁ = m_ii − a·d₂·c = m_ii − m_ij·d₂⁻¹·m_ji.
        let ml = self.entry_mul(i, j, i, g.entry(i, j), &self.entry_mul(j, j, i, &d2_inv, g.entry(j, i)));
        let ring_ii = self.sector_ring(self.sector(i, i));
        let d1 = ring_ii.sub(g.entry(i, i), &ml);
        if !ring_ii.is_unit(&d1) {
            return None;
        }
        let mut h = self.identity();
        h.entries[i * self.size() + i] = d1;
        h.entries[j * self.size() + j] = d2.clone();
        // Verify by refactoring.
        let rhs = self.mul(
            &self.mul(&self.root_element(r, &a), &h),
            &self.root_element(&r.neg(), &c),
        );
        if rhs == *g {
            Some(h)
        } else {
            None
        }
    }
}

/// The full counterexample analysis.
pub struct CounterexampleAnalysis {
    pub closed: bool,
    pub closure_pairs_checked: u64,
    pub associativity_ok: bool,
    pub axioms: VerificationReport,
    /// `Some((block1 ≅ R₁, block2 ≅ R₂, block1 ≅ block2))` for `n ≥ 2`.
    pub induced: Option<(bool, bool, bool)>,
}

impl HeteroGroup {
    /// Exhaustive closure check over *all* element pairs for `n = 1`
    /// (≈ 6.9·10⁸ products at the counterexample parameters), run over
    /// precomputed index tables. Returns `(closed, pairs_checked)`.
    pub fn closure_exhaustive_n1(&self) -> Result<(bool, u64), GroupError> {
        if self.n != 1 {
            return Err(GroupError::TooLarge);
        }
        let n1 = self.ring1.order() as usize;
        let n2 = self.ring2.order() as usize;
        let np = self.rp.order() as usize;
        let tab = |ring: &Ring, f: &dyn Fn(&Elem, &Elem) -> Elem, m: usize| -> Vec<u16> {
            let els: Vec<Elem> = (0..m as u64).map(|i| ring.elem_from_index(i)).collect();
            let mut t = Vec::with_capacity(m * m);
            for a in &els {
                for b in &els {
                    t.push(ring.index_of(&f(a, b)) as u16);
                }
            }
            t
        };
        let mul1 = tab(&self.ring1, &|a, b| self.ring1.mul(a, b), n1);
        let add1 = tab(&self.ring1, &|a, b| self.ring1.add(a, b), n1);
        let mul2 = tab(&self.ring2, &|a, b| self.ring2.mul(a, b), n2);
        let add2 = tab(&self.ring2, &|a, b| self.ring2.add(a, b), n2);
        let mulp = tab(&self.rp, &|a, b| self.rp.mul(a, b), np);
        let addp = tab(&self.rp, &|a, b| self.rp.add(a, b), np);
        let unit1: Vec<bool> = (0..n1 as u64)
            .map(|i| self.ring1.is_unit(&self.ring1.elem_from_index(i)))
            .collect();
        let unit2: Vec<bool> = (0..n2 as u64)
            .map(|i| self.ring2.is_unit(&self.ring2.elem_from_index(i)))
            .collect();
        let proj1: Vec<u16> = (0..n1 as u64)
            .map(|i| self.rp.index_of(&self.proj1(&self.ring1.elem_from_index(i))) as u16)
            .collect();
        let proj2: Vec<u16> = (0..n2 as u64)
            .map(|i| self.rp.index_of(&self.proj2(&self.ring2.elem_from_index(i))) as u16)
            .collect();
        let iota1: Vec<u16> = (0..np as u64)
            .map(|i| self.ring1.index_of(&iota(&self.ring1, &self.rp.elem_from_index(i))) as u16)
            .collect();
        let iota2: Vec<u16> = (0..np as u64)
            .map(|i| self.ring2.index_of(&iota(&self.ring2, &self.rp.elem_from_index(i))) as u16)
            .collect();
        let units1: Vec<u16> = (0..n1).filter(|&i| unit1[i]).map(|i| i as u16).collect();
        let units2: Vec<u16> = (0..n2).filter(|&i| unit2[i]).map(|i| i as u16).collect();
        let rp_all: Vec<u16> = (0..np as u16).collect();

        let mut pairs = 0u64;
        for &a in &units1 {
            for &b in &rp_all {
                for &c in &rp_all {
                    for &d in &units2 {
                        // Fixed left factor (a,b,c,d); run all right factors.
                        for &a2 in &units1 {
                            for &b2 in &rp_all {
                                for &c2 in &rp_all {
                                    for &d2 in &units2 {
                                        let ta = add1[mul1[a as usize * n1 + a2 as usize]
                                            as usize
                                            * n1
                                            + iota1[mulp[b as usize * np + c2 as usize] as usize]
                                                as usize];
                                        let td = add2[mul2[d as usize * n2 + d2 as usize]
                                            as usize
                                            * n2
                                            + iota2[mulp[c as usize * np + b2 as usize] as usize]
                                                as usize];
                                        pairs += 1;
                                        if !unit1[ta as usize] || !unit2[td as usize] {
                                            return Ok((false, pairs));
                                        }
                                        // The off-diagonal sectors are closed
                                        // by typing; recompute anyway to
                                        // exercise the arithmetic.
                                        let tb = addp[mulp
                                            [proj1[a as usize] as usize * np + b2 as usize]
                                            as usize
                                            * np
                                            + mulp[b as usize * np + proj2[d2 as usize] as usize]
                                                as usize];
                                        let tc = addp[mulp
                                            [c as usize * np + proj1[a2 as usize] as usize]
                                            as usize
                                            * np
                                            + mulp[proj2[d as usize] as usize * np + c2 as usize]
                                                as usize];
                                        core::hint::black_box((tb, tc));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok((true, pairs))
    }
}

/// Builds the §7 group and verifies: closure on sampled pairs (use
/// [`HeteroGroup::closure_exhaustive_n1`] for the exhaustive `n = 1`
/// sweep), associativity on samples, the parahoric-type axioms, and — for
/// `n = 2` — that the induced rings of the two diagonal-block roots are
/// the two *nonisomorphic* base rings.
pub fn counterexample_group(
    n: usize,
    spec1: RingSpec,
    spec2: RingSpec,
    sample_pairs: u64,
) -> Result<(HeteroGroup, CounterexampleAnalysis), GroupError> {
    let g = HeteroGroup::new(n, spec1, spec2)?;
    let mut closed = true;
    let mut pairs_checked = 0u64;
    let mut associativity_ok = true;

    if n == 1 {
        let all = g.enumerate()?;
        let mut state = 0x5851f42d4c957f2du64;
        let mut rnd = |m: usize| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) as usize % m
        };
        for _ in 0..sample_pairs {
            let (a, b) = (&all[rnd(all.len())], &all[rnd(all.len())]);
            pairs_checked += 1;
            if !g.contains(&g.mul(a, b)) {
                closed = false;
                break;
            }
        }
        for _ in 0..2_000 {
            let (a, b, c) = (&all[rnd(all.len())], &all[rnd(all.len())], &all[rnd(all.len())]);
            if g.mul(&g.mul(a, b), c) != g.mul(a, &g.mul(b, c)) {
                associativity_ok = false;
                break;
            }
        }
    } else {
        // Sampled closure: random elements from the block decomposition.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rnd = |m: usize| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) as usize % m
        };
        let u1 = g.ring1.units();
        let u2 = g.ring2.units();
        let r1_all = g.ring1.all_elements();
        let r2_all = g.ring2.all_elements();
        let rp_all = g.rp.all_elements();
        let mut sample = |rnd: &mut dyn FnMut(usize) -> usize| -> HMat {
            let mut m = g.identity();
            let nn = g.size();
            for i in 0..nn {
                for j in 0..nn {
                    let v = match g.sector(i, j) {
                        Sector::TopLeft => {
                            if i == j {
                                u1[rnd(u1.len())].clone()
                            } else {
                                r1_all[rnd(r1_all.len())].clone()
                            }
                        }
                        Sector::BottomRight => {
                            if i == j {
                                u2[rnd(u2.len())].clone()
                            } else {
                                r2_all[rnd(r2_all.len())].clone()
                            }
                        }
                        _ => rp_all[rnd(rp_all.len())].clone(),
                    };
                    m.entries[i * nn + j] = v;
                }
            }
            m
        };
        let mut elems = Vec::new();
        while elems.len() < 200 {
            let m = sample(&mut rnd);
            if g.contains(&m) {
                elems.push(m);
            }
        }
        for _ in 0..sample_pairs {
            let a = &elems[rnd(elems.len())];
            let b = &elems[rnd(elems.len())];
            pairs_checked += 1;
            if !g.contains(&g.mul(a, b)) {
                closed = false;
                break;
            }
        }
        for _ in 0..2_000 {
            let (a, b, c) = (
                &elems[rnd(elems.len())],
                &elems[rnd(elems.len())],
                &elems[rnd(elems.len())],
            );
            if g.mul(&g.mul(a, b), c) != g.mul(a, &g.mul(b, c)) {
                associativity_ok = false;
                break;
            }
        }
    }

    let axioms = axiom_report(&g);

    let induced = if n >= 2 {
        // Roots inside the two diagonal blocks: e₁−e₂ and e₃−e₄.
        let mut c1 = vec![0i64; 2 * n - 1];
        c1[0] = 1;
        let mut c2 = vec![0i64; 2 * n - 1];
        c2[2 * n - 2] = 1;
        let (_, t1) = g.induced_ring_block(&Root(c1))?;
        let (_, t2) = g.induced_ring_block(&Root(c2))?;
        let b1_is_r1 = identify(&g.ring1, &t1, DEFAULT_ISO_CAP)?.is_some();
        let b2_is_r2 = identify(&g.ring2, &t2, DEFAULT_ISO_CAP)?.is_some();
        let cross = identify(&g.ring1, &t2, DEFAULT_ISO_CAP)?.is_some()
            || identify(&g.ring2, &t1, DEFAULT_ISO_CAP)?.is_some();
        Some((b1_is_r1, b2_is_r2, cross))
    } else {
        None
    };

    Ok((
        g,
        CounterexampleAnalysis {
            closed,
            closure_pairs_checked: pairs_checked,
            associativity_ok,
            axioms,
            induced,
        },
    ))
}
