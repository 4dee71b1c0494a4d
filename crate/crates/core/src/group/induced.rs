//! The ring structure induced on a root subgroup, and torus-orbit reports.
//!
//! Writing `U = U_α` additively, fix a valuation-0 element `u₁`. For
//! `v(u) = 0` the product is `u·u′ = Ad(h_u)u′` where `h_u` is any torus
//! element with `Ad(h_u)u₁ = u`; for `v(u) > 0` it is
//! `u·u′ = (u+u₁)·u′ − u′`. The result is a commutative local ring with
//! `u₁` as identity and the filtration valuation as a truncated valuation;
//! its isomorphism class does not depend on `u₁`.
//!
//! Everything here works with the group operations only — the point is to
//! *discover* the ring and then identify it against a canonical candidate
//! by brute-force isomorphism search.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::ring::iso::{identify, RingIso, TableRing, DEFAULT_ISO_CAP};
use crate::ring::{Elem, Ring, Valuation};
use crate::rootsystem::Root;

use super::{Group, GroupError, Mat};

/// The induced ring on `U_α`, as raw operation tables over the listed
/// elements (index 0 is the group identity = ring zero).
pub struct InducedRing {
    pub elements: Vec<Mat>,
    pub table: TableRing,
    /// Index of `u₁` (the ring identity).
    pub one_index: usize,
}

impl Group {
    /// A torus element scaling the `α`-parameter by the unit `r`:
    /// `Ad(h)u_α(x) = u_α(r·x)`. `NotTransitive` when the family's torus
    /// cannot realize the ratio (`SL_2` and the `Sp_4` long roots need a
    /// square root).
    pub fn torus_scaling(&self, alpha: &Root, r: &Elem) -> Result<Mat, GroupError> {
        if !self.ring.is_unit(r) {
            return Err(GroupError::NoSuchH);
        }
        match self.family {
            super::Family::Gl => {
                // Put the whole ratio on the row index of the leading entry.
                let (i, _, _) = super::root_pattern(self.family, self.n, alpha)[0];
                let mut m = self.identity();
                m.entries[i * self.n + i] = r.clone();
                Ok(self.truncate(m.entries))
            }
            super::Family::Sl => {
                if self.n == 2 {
                    // diag(s, s⁻¹) scales by s²: needs a square root.
                    match self.ring.sqrt(r)? {
                        Some((s, _)) => self.cochar(alpha, &s),
                        None => Err(GroupError::NotTransitive),
                    }
                } else {
                    // Fix the determinant on a coordinate outside the root.
                    let (i, j, _) = super::root_pattern(self.family, self.n, alpha)[0];
                    let k = (0..self.n).find(|k| *k != i && *k != j).expect("n ≥ 3");
                    let mut m = self.identity();
                    m.entries[i * self.n + i] = r.clone();
                    m.entries[k * self.n + k] = self.ring.invert(r)?;
                    Ok(self.truncate(m.entries))
                }
            }
            super::Family::Sp4 => {
                // diag(a,b,b⁻¹,a⁻¹): the scaling weight per root.
                let rinv = self.ring.invert(r)?;
                let (w_a, w_b): (i64, i64) = match (alpha.0[0], alpha.0[1]) {
                    (1, 0) => (1, -1),  // a/b
                    (-1, 0) => (-1, 1),
                    (1, 1) => (1, 1),   // a·b
                    (-1, -1) => (-1, -1),
                    (0, 1) | (0, -1) | (2, 1) | (-2, -1) => {
                        // b² or a²: needs a square root of r.
                        match self.ring.sqrt(r)? {
                            Some((s, _)) => {
                                let e = if alpha.0[1] > 0 || alpha.0[0] > 0 { s } else { self.ring.invert(&s)? };
                                let (pa, pb) = match (alpha.0[0], alpha.0[1]) {
                                    (0, 1) => (self.ring.one(), e),
                                    (0, -1) => (self.ring.one(), self.ring.invert(&e)?),
                                    (2, 1) => (e, self.ring.one()),
                                    (-2, -1) => (self.ring.invert(&e)?, self.ring.one()),
                                    _ => unreachable!(),
                                };
                                return Ok(self.sp4_diag(&pa, &pb));
                            }
                            None => return Err(GroupError::NotTransitive),
                        }
                    }
                    _ => unreachable!("not a C2 root"),
                };
                let a = if w_a >= 0 { r.clone() } else { rinv.clone() };
                let b = if w_b >= 0 { r.clone() } else { rinv.clone() };
                let (a, b) = match (w_a, w_b) {
                    (1, -1) | (-1, 1) => (a, self.ring.one()),
                    (1, 1) | (-1, -1) => (a, self.ring.one()),
                    _ => (a, b),
                };
                Ok(self.sp4_diag(&a, &b))
            }
        }
    }

    fn sp4_diag(&self, a: &Elem, b: &Elem) -> Mat {
        let mut m = self.identity();
        m.entries[0] = a.clone();
        m.entries[5] = b.clone();
        m.entries[10] = self.ring.invert(b).expect("unit");
        m.entries[15] = self.ring.invert(a).expect("unit");
        self.truncate(m.entries)
    }

    /// The abstract `U_α`-valuation of a root element (filtration level
    /// above `lo(α)`); `None` for the identity.
    pub fn u_valuation(&self, alpha: &Root, u: &Mat) -> Option<u32> {
        let x = self.read_param(u, alpha);
        match self.ring.valuation(&x) {
            Valuation::Finite(v) => Some(v - self.lo_of(alpha)),
            Valuation::Infinite => None,
        }
    }

    /// Builds the induced ring on `U_α` from the valuation-0 element `u1`,
    /// verifying every commutative-ring axiom by enumeration.
    pub fn induced_ring(&self, alpha: &Root, u1: &Mat) -> Result<InducedRing, GroupError> {
        if self.u_valuation(alpha, u1) != Some(0) {
            return Err(GroupError::NoSuchH);
        }
        let elements: Vec<Mat> = {
            // Identity (= ring zero) first, deterministic order after.
            let mut v = self.u_filtration(alpha, self.f0.value(alpha));
            v.sort_by_key(|m| self.key(m));
            let id = self.identity();
            let mut out = alloc::vec![id.clone()];
            out.extend(v.into_iter().filter(|m| *m != id));
            out
        };
        let n = elements.len();
        let index_of = |m: &Mat| -> usize {
            elements
                .iter()
                .position(|e| e == m)
                .expect("closed under the operations")
        };
        let one_index = index_of(u1);
        let x1 = self.read_param(u1, alpha);

        // h_u per valuation-0 element (closed form through the torus).
        let mut h_of: BTreeMap<usize, Mat> = BTreeMap::new();
        for (k, u) in elements.iter().enumerate() {
            if self.u_valuation(alpha, u) == Some(0) {
                let x = self.read_param(u, alpha);
                let ratio = self.ring.mul(&x, &self.ring.invert(&x1)?);
                let h = self.torus_scaling(alpha, &ratio)?;
                debug_assert_eq!(self.conjugate(&h, u1), *u);
                h_of.insert(k, h);
            }
        }

        let mul_pair = |k: usize, l: usize| -> usize {
            let u = &elements[k];
            let up = &elements[l];
            if let Some(h) = h_of.get(&k) {
                index_of(&self.conjugate(h, up))
            } else {
                // u·u′ = (u + u₁)·u′ − u′ with + the group law.
                let shifted = self.mul(u, u1);
                let hk = h_of
                    .get(&index_of(&shifted))
                    .expect("u + u1 has valuation 0");
                let prod = self.conjugate(hk, up);
                index_of(&self.mul(&prod, &self.inv(up)))
            }
        };

        let mut add = alloc::vec![alloc::vec![0u64; n]; n];
        let mut mul = alloc::vec![alloc::vec![0u64; n]; n];
        for k in 0..n {
            for l in 0..n {
                add[k][l] = index_of(&self.mul(&elements[k], &elements[l])) as u64;
                mul[k][l] = mul_pair(k, l) as u64;
            }
        }
        let table = TableRing {
            order: n as u64,
            zero: 0,
            one: one_index as u64,
            add,
            mul,
        };
        if !table.verify_ring_axioms() {
            return Err(GroupError::FactorizationFailed(alloc::string::String::from(
                "induced multiplication is not a ring",
            )));
        }
        Ok(InducedRing {
            elements,
            table,
            one_index,
        })
    }

    /// Identifies the induced ring against a canonical candidate.
    pub fn identify_induced(
        &self,
        induced: &InducedRing,
        candidate: &Ring,
    ) -> Result<Option<RingIso>, GroupError> {
        identify(candidate, &induced.table, DEFAULT_ISO_CAP).map_err(GroupError::from)
    }

    /// Partitions `{u ∈ U_α : v(u) = level}` into orbits under conjugation
    /// by the full diagonal subgroup; returns the orbits as element lists.
    pub fn orbit_report(&self, alpha: &Root, level: u32) -> Vec<Vec<Mat>> {
        let stratum: Vec<Mat> = self
            .u_filtration(alpha, self.f0.value(alpha))
            .into_iter()
            .filter(|u| self.u_valuation(alpha, u) == Some(level))
            .collect();
        let torus = self.torus_elements();
        let mut orbits: Vec<Vec<Mat>> = Vec::new();
        let mut assigned: alloc::collections::BTreeSet<Vec<u64>> =
            alloc::collections::BTreeSet::new();
        for u in &stratum {
            if assigned.contains(&self.key(u)) {
                continue;
            }
            let mut orbit = Vec::new();
            for h in &torus {
                let v = self.conjugate(h, u);
                if assigned.insert(self.key(&v)) {
                    orbit.push(v);
                }
            }
            orbits.push(orbit);
        }
        orbits
    }
}
