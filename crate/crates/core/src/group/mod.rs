//! Parahoric quotient groups `K/K^h` as windowed matrix groups.
//!
//! An element is an `N×N` matrix over a truncated valuation ring whose
//! `(i,j)` entry lives in the valuation window `[lo_{ij}, h − lo_{ji})`:
//! entries are kept truncated to their window, so equality is entry
//! equality. The window matrix is derived from a concave function `f_0` on
//! the associated root system; when `f_0` takes negative values the windows
//! are normalized by the diagonal offsets `a_i = f_0(w_1 − w_i)` (an inner
//! conjugation of the model), which preserves every window size, dimension
//! count, and precision tag.
//!
//! Families: `GL_n`, `SL_n` (type `A_{n−1}`), `Sp_4` (type `B_2`/`C_2`,
//! antidiagonal form with signs `(+,+,−,−)`, maximal window only), and the
//! heterogeneous two-ring block group of [`hetero`].

pub mod axioms;
pub mod extract;
pub mod hetero;
pub mod induced;
pub mod rank1;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::rational::Rational;
use crate::ring::{make_ring, Elem, Ring, RingError, RingSpec, Valuation};
use crate::rootsystem::{
    build_root_system, extend_concave, psi_of, ConcaveFunction, PsiSubsystem, Root, RootSystem,
    TypeLabel,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    IllFormedWindows(String),
    UnsupportedFamily(String),
    MixedGroups,
    OutOfWindow,
    NotAUnit,
    NotAvailable,
    SingularLambda,
    NoFactorization,
    FactorizationFailed(String),
    NotInProduct,
    NonCommutingInputs,
    NotTransitive,
    NoSuchH,
    TooLarge,
    IncompatibleRings(String),
    Ring(RingError),
}

impl From<RingError> for GroupError {
    fn from(e: RingError) -> Self {
        GroupError::Ring(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Gl,
    Sl,
    Sp4,
}

/// Construction data for a windowed matrix group.
#[derive(Debug, Clone)]
pub struct WindowedGroupSpec {
    pub family: Family,
    /// Matrix size (`4` for `Sp_4`).
    pub n: usize,
    pub ring: RingSpec,
    /// Rational apartment point; one value per simple root. Empty means the
    /// maximal window `f ≡ 0`.
    pub f: Vec<Rational>,
}

/// A group element: a matrix with window-truncated entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Mat {
    owner: u64,
    n: usize,
    entries: Vec<Elem>,
}

impl Mat {
    pub fn entry(&self, i: usize, j: usize) -> &Elem {
        &self.entries[i * self.n + j]
    }

    pub fn size(&self) -> usize {
        self.n
    }
}

/// A constructed group handle. Immutable; all operations are pure.
#[derive(Debug, Clone)]
pub struct Group {
    pub family: Family,
    pub n: usize,
    pub ring: Ring,
    pub system: RootSystem,
    pub f0: ConcaveFunction,
    pub psi: PsiSubsystem,
    id: u64,
    /// Normalized window lower bounds per entry (`lo[i][j] ≥ 0`).
    lo: Vec<Vec<u32>>,
    /// `lo(α) − f_0(α)` per root: the offset between entry valuations and
    /// the abstract filtration index.
    delta: alloc::collections::BTreeMap<Root, i64>,
}

/// Element-count cap for exhaustive enumeration.
pub const ENUM_CAP: u64 = 10_000_000;

pub fn make_group(spec: &WindowedGroupSpec) -> Result<Group, GroupError> {
    let ring = make_ring(spec.ring)?;
    let system = match spec.family {
        Family::Gl | Family::Sl => {
            if spec.n < 2 {
                return Err(GroupError::UnsupportedFamily(String::from("need n ≥ 2")));
            }
            build_root_system(TypeLabel::A, spec.n - 1)
                .map_err(|e| GroupError::UnsupportedFamily(format!("{:?}", e)))?
        }
        Family::Sp4 => {
            if spec.n != 4 {
                return Err(GroupError::UnsupportedFamily(String::from("Sp_4 needs n = 4")));
            }
            build_root_system(TypeLabel::B, 2)
                .map_err(|e| GroupError::UnsupportedFamily(format!("{:?}", e)))?
        }
    };

    let f0 = if spec.f.is_empty() {
        extend_concave(&system, &vec![Rational::from_integer(0); system.rank])
    } else {
        if spec.f.len() != system.rank {
            return Err(GroupError::UnsupportedFamily(format!(
                "f needs {} values",
                system.rank
            )));
        }
        extend_concave(&system, &spec.f)
    };
    if spec.family == Family::Sp4 && f0.values.values().any(|&v| v != 0) {
        // The symplectic form condition is only maintained at the maximal
        // window; nontrivial windows would twist the form by ϖ-powers.
        return Err(GroupError::UnsupportedFamily(String::from(
            "Sp_4 supports the maximal window f ≡ 0 only",
        )));
    }
    Group::from_parts(spec.family, spec.n, ring, system, f0)
}

impl Group {
    fn from_parts(
        family: Family,
        n: usize,
        ring: Ring,
        system: RootSystem,
        f0: ConcaveFunction,
    ) -> Result<Group, GroupError> {
        // Raw per-entry bounds from f_0 on position weights.
        let mut raw = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let r = position_root(family, n, i, j);
                raw[i][j] = f0.value(&r);
            }
        }
        // Diagonal offsets a_i = raw[0][i] normalize all bounds to ≥ 0.
        let offsets: Vec<i64> = (0..n).map(|i| if i == 0 { 0 } else { raw[0][i] }).collect();
        let mut lo = vec![vec![0u32; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let v = raw[i][j] + offsets[i] - offsets[j];
                if v < 0 {
                    return Err(GroupError::IllFormedWindows(format!(
                        "window [{},{}] has negative lower bound {}",
                        i, j, v
                    )));
                }
                lo[i][j] = v as u32;
            }
        }
        // Concavity restated on entries: lo[i][j] + lo[j][k] ≥ lo[i][k],
        // which makes windowed multiplication well defined.
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if (lo[i][j] + lo[j][k]) < lo[i][k] {
                        return Err(GroupError::IllFormedWindows(format!(
                            "concavity fails at ({},{},{})",
                            i, j, k
                        )));
                    }
                }
            }
        }
        let psi = psi_of(&system, &f0)
            .map_err(|e| GroupError::IllFormedWindows(format!("{:?}", e)))?;
        let mut delta = alloc::collections::BTreeMap::new();
        for r in &system.roots {
            let (i, j, _) = root_pattern(family, n, r)[0];
            delta.insert(r.clone(), lo[i][j] as i64 - f0.value(r));
        }
        let id = fnv_mix(ring.id(), family, n, &lo);
        Ok(Group {
            family,
            n,
            ring,
            system,
            f0,
            psi,
            id,
            lo,
            delta,
        })
    }

    pub fn depth(&self) -> u32 {
        self.ring.depth()
    }

    /// Residue field size `q`.
    pub fn residue_q(&self) -> u64 {
        self.ring.residue_order()
    }

    /// Reductive rank: `n` for `GL_n`, `n−1` for `SL_n`, 2 for `Sp_4`.
    pub fn reductive_rank(&self) -> u32 {
        match self.family {
            Family::Gl => self.n as u32,
            Family::Sl => self.n as u32 - 1,
            Family::Sp4 => 2,
        }
    }

    /// Entry-window lower bound of the root's leading position.
    pub fn lo_of(&self, r: &Root) -> u32 {
        let (i, j, _) = root_pattern(self.family, self.n, r)[0];
        self.lo[i][j]
    }

    /// Entry-window upper bound (exclusive) of the root's leading position.
    pub fn hi_of(&self, r: &Root) -> u32 {
        let (i, j, _) = root_pattern(self.family, self.n, r)[0];
        self.depth() - self.lo[j][i]
    }

    /// Offset between entry valuation and the abstract filtration index:
    /// `entry_val = abstract_index + delta`.
    pub fn delta_of(&self, r: &Root) -> i64 {
        self.delta[r]
    }

    pub fn window_lo(&self) -> &[Vec<u32>] {
        &self.lo
    }

    // ----- element plumbing ------------------------------------------------

    pub(crate) fn truncate(&self, mut entries: Vec<Elem>) -> Mat {
        let h = self.depth();
        for i in 0..self.n {
            for j in 0..self.n {
                let cap = h - self.lo[j][i];
                entries[i * self.n + j] = self.ring.truncate_val(&entries[i * self.n + j], cap);
            }
        }
        Mat {
            owner: self.id,
            n: self.n,
            entries,
        }
    }

    pub fn identity(&self) -> Mat {
        let mut entries = vec![self.ring.zero(); self.n * self.n];
        for i in 0..self.n {
            entries[i * self.n + i] = self.ring.one();
        }
        self.truncate(entries)
    }

    pub fn owns(&self, m: &Mat) -> bool {
        m.owner == self.id
    }

    pub fn mul(&self, a: &Mat, b: &Mat) -> Mat {
        debug_assert!(self.owns(a) && self.owns(b));
        let n = self.n;
        let mut entries = vec![self.ring.zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let mut acc = self.ring.zero();
                for j in 0..n {
                    if self.ring.is_zero(a.entry(i, j)) {
                        continue;
                    }
                    acc = self
                        .ring
                        .add(&acc, &self.ring.mul(a.entry(i, j), b.entry(j, k)));
                }
                entries[i * n + k] = acc;
            }
        }
        self.truncate(entries)
    }

    pub fn inv(&self, a: &Mat) -> Mat {
        let entries = mat_inverse(&self.ring, self.n, &a.entries)
            .expect("group elements are invertible");
        self.truncate(entries)
    }

    pub fn group_arith(&self, a: &Mat, b: &Mat, op: GroupOp) -> Result<Mat, GroupError> {
        if !self.owns(a) || (op == GroupOp::Mul && !self.owns(b)) {
            return Err(GroupError::MixedGroups);
        }
        Ok(match op {
            GroupOp::Mul => self.mul(a, b),
            GroupOp::Inv => self.inv(a),
        })
    }

    /// `[a, b] = a·b·a⁻¹·b⁻¹`.
    pub fn commutator(&self, a: &Mat, b: &Mat) -> Mat {
        self.mul(&self.mul(a, b), &self.mul(&self.inv(a), &self.inv(b)))
    }

    pub fn conjugate(&self, h: &Mat, g: &Mat) -> Mat {
        self.mul(&self.mul(h, g), &self.inv(h))
    }

    /// Canonical enumeration key.
    pub fn key(&self, m: &Mat) -> Vec<u64> {
        m.entries.iter().map(|e| self.ring.index_of(e)).collect()
    }

    /// Membership: windows plus the family constraint (determinant a unit
    /// for `GL`, `= 1` for `SL`, `gᵀJg = J` for `Sp_4`).
    pub fn contains(&self, m: &Mat) -> bool {
        if !self.owns(m) {
            return false;
        }
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && !window_ok(&self.ring, m.entry(i, j), self.lo[i][j]) {
                    return false;
                }
            }
        }
        match self.family {
            Family::Gl => self.ring.is_unit(&self.det(m)),
            Family::Sl => self.det(m) == self.ring.one(),
            Family::Sp4 => {
                let j = self.symplectic_form();
                let mt = self.transpose(m);
                self.mul(&self.mul(&mt, &j), m) == j
            }
        }
    }

    pub fn det(&self, m: &Mat) -> Elem {
        det_expansion(&self.ring, self.n, &m.entries)
    }

    pub fn transpose(&self, m: &Mat) -> Mat {
        let n = self.n;
        let mut entries = vec![self.ring.zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = m.entry(i, j).clone();
            }
        }
        self.truncate(entries)
    }

    /// The fixed symplectic form: antidiagonal with signs `(+,+,−,−)`.
    pub fn symplectic_form(&self) -> Mat {
        debug_assert_eq!(self.family, Family::Sp4);
        let mut entries = vec![self.ring.zero(); 16];
        entries[3] = self.ring.one(); // (0,3)
        entries[6] = self.ring.one(); // (1,2)
        entries[9] = self.ring.neg(&self.ring.one()); // (2,1)
        entries[12] = self.ring.neg(&self.ring.one()); // (3,0)
        Mat {
            owner: self.id,
            n: 4,
            entries,
        }
    }

    // ----- generators ------------------------------------------------------

    /// `u_α(x)` with `x` the entry value; requires `v(x) ≥ lo(α)`.
    pub fn root_element(&self, r: &Root, x: &Elem) -> Result<Mat, GroupError> {
        if !window_ok(&self.ring, x, self.lo_of(r)) {
            return Err(GroupError::OutOfWindow);
        }
        let mut m = self.identity();
        for (i, j, sign) in root_pattern(self.family, self.n, r) {
            let v = if sign >= 0 { x.clone() } else { self.ring.neg(x) };
            m.entries[i * self.n + j] = v;
        }
        Ok(self.truncate(m.entries))
    }

    /// `u_{α,ϖ^{lo(α)}·t}`: the parameter form of §5.1, with `t` ranging
    /// over the quotient ring attached to the root.
    pub fn root_element_param(&self, r: &Root, t: &Elem) -> Result<Mat, GroupError> {
        let x = self.ring.mul_uniformizer_pow(t, self.lo_of(r));
        self.root_element(r, &x)
    }

    /// Reads the parameter (entry value) of a product of root elements at
    /// the position of `r`.
    pub fn read_param(&self, m: &Mat, r: &Root) -> Elem {
        let (i, j, sign) = root_pattern(self.family, self.n, r)[0];
        let e = m.entry(i, j).clone();
        if sign >= 0 {
            e
        } else {
            self.ring.neg(&e)
        }
    }

    /// `h_{α∨,λ}`: the cocharacter value, `diag(λ^{e_1}, …)` with the
    /// coroot's diagonal exponents.
    pub fn cochar(&self, r: &Root, lambda: &Elem) -> Result<Mat, GroupError> {
        if !self.ring.is_unit(lambda) {
            return Err(GroupError::NotAUnit);
        }
        let inv = self.ring.invert(lambda)?;
        let mut m = self.identity();
        for (i, e) in coroot_exponents(self.family, self.n, r).into_iter().enumerate() {
            let v = match e {
                0 => self.ring.one(),
                1 => lambda.clone(),
                -1 => inv.clone(),
                2 => self.ring.mul(lambda, lambda),
                -2 => self.ring.mul(&inv, &inv),
                _ => unreachable!("coroot exponents are small"),
            };
            m.entries[i * self.n + i] = v;
        }
        Ok(self.truncate(m.entries))
    }

    /// All entry values of the window of `r`, i.e. the parameters of `U_r`.
    pub fn window_values(&self, r: &Root) -> Vec<Elem> {
        let lo = self.lo_of(r);
        let hi = self.hi_of(r);
        self.ring
            .all_elements()
            .into_iter()
            .filter(|x| self.ring.truncate_val(x, hi) == *x)
            .filter(|x| window_ok(&self.ring, x, lo))
            .collect()
    }

    /// The elements of `U_{r}` at abstract filtration index ≥ `idx`
    /// (`idx = f_0(r)` gives the whole root subgroup).
    pub fn u_filtration(&self, r: &Root, idx: i64) -> Vec<Mat> {
        let floor = (idx + self.delta_of(r)).max(self.lo_of(r) as i64);
        self.window_values(r)
            .into_iter()
            .filter(|x| floor <= 0 || self.ring.valuation(x).at_least(floor as u32))
            .map(|x| self.root_element(r, &x).expect("window value"))
            .collect()
    }

    /// The full diagonal subgroup (the Cartan subgroup `H` of the model).
    pub fn torus_elements(&self) -> Vec<Mat> {
        let units = self.ring.units();
        let mut out = Vec::new();
        match self.family {
            Family::Gl => {
                let mut idx = vec![0usize; self.n];
                loop {
                    let mut m = self.identity();
                    for (i, &k) in idx.iter().enumerate() {
                        m.entries[i * self.n + i] = units[k].clone();
                    }
                    out.push(self.truncate(m.entries));
                    if !advance(&mut idx, units.len()) {
                        break;
                    }
                }
            }
            Family::Sl => {
                let mut idx = vec![0usize; self.n - 1];
                loop {
                    let mut m = self.identity();
                    let mut prod = self.ring.one();
                    for (i, &k) in idx.iter().enumerate() {
                        m.entries[i * self.n + i] = units[k].clone();
                        prod = self.ring.mul(&prod, &units[k]);
                    }
                    let last = self.ring.invert(&prod).expect("unit product");
                    m.entries[(self.n - 1) * self.n + (self.n - 1)] = last;
                    out.push(self.truncate(m.entries));
                    if !advance(&mut idx, units.len()) {
                        break;
                    }
                }
            }
            Family::Sp4 => {
                for a in &units {
                    for b in &units {
                        let mut m = self.identity();
                        m.entries[0] = a.clone();
                        m.entries[5] = b.clone();
                        m.entries[10] = self.ring.invert(b).expect("unit");
                        m.entries[15] = self.ring.invert(a).expect("unit");
                        out.push(self.truncate(m.entries));
                    }
                }
            }
        }
        out
    }

    /// Exhaustive element count by closure over the root and torus
    /// generators; `TooLarge` beyond the cap.
    pub fn order(&self, cap: u64) -> Result<u64, GroupError> {
        if cap > ENUM_CAP {
            return Err(GroupError::TooLarge);
        }
        let mut gens: Vec<Mat> = Vec::new();
        for r in &self.system.roots {
            for x in self.window_values(r) {
                if !self.ring.is_zero(&x) {
                    gens.push(self.root_element(r, &x).expect("window value"));
                }
            }
        }
        gens.extend(self.torus_elements());
        let mut seen = alloc::collections::BTreeSet::new();
        let id = self.identity();
        seen.insert(self.key(&id));
        let mut frontier = vec![id];
        while let Some(g) = frontier.pop() {
            for gen in &gens {
                let next = self.mul(&g, gen);
                debug_assert!(self.contains(&next));
                if seen.insert(self.key(&next)) {
                    if seen.len() as u64 > cap {
                        return Err(GroupError::TooLarge);
                    }
                    frontier.push(next);
                }
            }
        }
        Ok(seen.len() as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupOp {
    Mul,
    Inv,
}

fn advance(idx: &mut [usize], base: usize) -> bool {
    for k in idx.iter_mut() {
        *k += 1;
        if *k < base {
            return true;
        }
        *k = 0;
    }
    false
}

pub(crate) fn window_ok(ring: &Ring, x: &Elem, lo: u32) -> bool {
    match ring.valuation(x) {
        Valuation::Finite(v) => v >= lo,
        Valuation::Infinite => true,
    }
}

fn fnv_mix(ring_id: u64, family: Family, n: usize, lo: &[Vec<u32>]) -> u64 {
    let mut h = ring_id ^ 0x9e3779b97f4a7c15;
    h = h.wrapping_mul(31).wrapping_add(match family {
        Family::Gl => 1,
        Family::Sl => 2,
        Family::Sp4 => 3,
    });
    h = h.wrapping_mul(31).wrapping_add(n as u64);
    for row in lo {
        for &v in row {
            h = h.wrapping_mul(1099511628211).wrapping_add(v as u64 + 1);
        }
    }
    h
}

/// The root attached to matrix position `(i, j)`: `e_i − e_j` in type `A`
/// (coefficient vector over simple roots), and the `C_2` root of the weight
/// difference for `Sp_4` (weights `ε_1, ε_2, −ε_2, −ε_1`).
pub fn position_root(family: Family, n: usize, i: usize, j: usize) -> Root {
    match family {
        Family::Gl | Family::Sl => {
            let rank = n - 1;
            let mut c = vec![0i64; rank];
            if i < j {
                for ck in c.iter_mut().take(j).skip(i) {
                    *ck = 1;
                }
            } else {
                for ck in c.iter_mut().take(i).skip(j) {
                    *ck = -1;
                }
            }
            Root(c)
        }
        Family::Sp4 => {
            // ε-coordinates of the four weights.
            let eps = [(1i64, 0i64), (0, 1), (0, -1), (-1, 0)];
            let (e1, e2) = (eps[i].0 - eps[j].0, eps[i].1 - eps[j].1);
            // Simple roots: α = ε1−ε2, β = 2ε2 ⟹ c1·α + c2·β has
            // ε-coordinates (c1, 2c2 − c1).
            let c1 = e1;
            debug_assert_eq!((e2 + c1) % 2, 0);
            let c2 = (e2 + c1) / 2;
            Root(vec![c1, c2])
        }
    }
}

/// The entry pattern of `u_r(x)`: positions `(i, j)` carrying `±x`.
pub fn root_pattern(family: Family, n: usize, r: &Root) -> Vec<(usize, usize, i64)> {
    match family {
        Family::Gl | Family::Sl => {
            let _ = n;
            if r.is_positive() {
                let i = r.0.iter().position(|&c| c == 1).expect("positive A root");
                let j = r.0.iter().rposition(|&c| c == 1).expect("positive A root") + 1;
                vec![(i, j, 1)]
            } else {
                let neg = r.neg();
                let i = neg.0.iter().position(|&c| c == 1).expect("negative A root");
                let j = neg.0.iter().rposition(|&c| c == 1).expect("negative A root") + 1;
                vec![(j, i, 1)]
            }
        }
        Family::Sp4 => match (r.0[0], r.0[1]) {
            (1, 0) => vec![(0, 1, 1), (2, 3, -1)],
            (-1, 0) => vec![(1, 0, 1), (3, 2, -1)],
            (0, 1) => vec![(1, 2, 1)],
            (0, -1) => vec![(2, 1, 1)],
            (1, 1) => vec![(0, 2, 1), (1, 3, 1)],
            (-1, -1) => vec![(2, 0, 1), (3, 1, 1)],
            (2, 1) => vec![(0, 3, 1)],
            (-2, -1) => vec![(3, 0, 1)],
            _ => unreachable!("not a C2 root"),
        },
    }
}

/// Diagonal exponents of `h_{r∨,λ}`.
pub fn coroot_exponents(family: Family, n: usize, r: &Root) -> Vec<i64> {
    match family {
        Family::Gl | Family::Sl => {
            // The root at entry (i,j) is e_i − e_j; its coroot is
            // e_i∨ − e_j∨ regardless of sign (the pattern position already
            // carries the orientation).
            let mut e = vec![0i64; n];
            let pat = root_pattern(family, n, r)[0];
            e[pat.0] = 1;
            e[pat.1] = -1;
            e
        }
        Family::Sp4 => {
            // Coroots in (ε1∨, ε2∨) coordinates; torus diag(a,b,b⁻¹,a⁻¹).
            let (a, b): (i64, i64) = match (r.0[0], r.0[1]) {
                (1, 0) => (1, -1),
                (-1, 0) => (-1, 1),
                (0, 1) => (0, 1),
                (0, -1) => (0, -1),
                (1, 1) => (1, 1),
                (-1, -1) => (-1, -1),
                (2, 1) => (1, 0),
                (-2, -1) => (-1, 0),
                _ => unreachable!("not a C2 root"),
            };
            vec![a, b, -b, -a]
        }
    }
}

/// Exact inverse over the local ring by Gauss–Jordan with unit pivots;
/// `None` when the matrix is singular.
pub fn mat_inverse(ring: &Ring, n: usize, entries: &[Elem]) -> Option<Vec<Elem>> {
    let mut a: Vec<Elem> = entries.to_vec();
    let mut b: Vec<Elem> = {
        let mut id = vec![ring.zero(); n * n];
        for i in 0..n {
            id[i * n + i] = ring.one();
        }
        id
    };
    for col in 0..n {
        // A matrix over a local ring is invertible iff elimination always
        // finds a unit pivot.
        let pivot = (col..n).find(|&r| ring.is_unit(&a[r * n + col]))?;
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
                b.swap(col * n + j, pivot * n + j);
            }
        }
        let inv = ring.invert(&a[col * n + col]).ok()?;
        for j in 0..n {
            a[col * n + j] = ring.mul(&a[col * n + j], &inv);
            b[col * n + j] = ring.mul(&b[col * n + j], &inv);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[r * n + col].clone();
            if ring.is_zero(&factor) {
                continue;
            }
            for j in 0..n {
                let sub_a = ring.mul(&factor, &a[col * n + j]);
                a[r * n + j] = ring.sub(&a[r * n + j], &sub_a);
                let sub_b = ring.mul(&factor, &b[col * n + j]);
                b[r * n + j] = ring.sub(&b[r * n + j], &sub_b);
            }
        }
    }
    Some(b)
}

/// Determinant by signed permutation expansion (exact; `n ≤ 4` here).
pub fn det_expansion(ring: &Ring, n: usize, entries: &[Elem]) -> Elem {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut acc = ring.zero();
    permute(&mut perm, 0, &mut |p, sign| {
        let mut term = ring.one();
        for (i, &j) in p.iter().enumerate() {
            term = ring.mul(&term, &entries[i * n + j]);
        }
        if sign < 0 {
            term = ring.neg(&term);
        }
        acc = ring.add(&acc, &term);
    });
    acc
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize], i64)) {
    let n = p.len();
    if k == n {
        let mut inv = 0;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        f(p, if inv % 2 == 0 { 1 } else { -1 });
        return;
    }
    for i in k..n {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

#[cfg(test)]
pub(crate) fn test_group(family: Family, n: usize, ring: &str, f: &[Rational]) -> Group {
    make_group(&WindowedGroupSpec {
        family,
        n,
        ring: RingSpec::parse(ring).unwrap(),
        f: f.to_vec(),
    })
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::test_group as group;

    fn half() -> Rational {
        Rational::new(1, 2)
    }

    #[test]
    fn sl2_z9_order_is_648() {
        let g = group(Family::Sl, 2, "unram(p=3,m=1,h=2)", &[]);
        assert_eq!(g.order(10_000).unwrap(), 648);
    }

    #[test]
    fn iwahori_gl2_is_closed_exhaustively() {
        let g = group(Family::Gl, 2, "equichar(p=3,m=1,h=2)", &[half()]);
        // Collect the whole group from the product decomposition U⁻·H·U⁺.
        let alpha = Root(vec![1]);
        let mut all = Vec::new();
        for u in g.u_filtration(&alpha.neg(), g.f0.value(&alpha.neg())) {
            for t in g.torus_elements() {
                for v in g.u_filtration(&alpha, g.f0.value(&alpha)) {
                    all.push(g.mul(&g.mul(&u, &t), &v));
                }
            }
        }
        let keys: alloc::collections::BTreeSet<Vec<u64>> =
            all.iter().map(|m| g.key(m)).collect();
        assert_eq!(keys.len(), all.len(), "Iwahori decomposition is exact");
        for a in all.iter().take(150) {
            for b in all.iter().take(150) {
                let ab = g.mul(a, b);
                assert!(g.contains(&ab));
                assert!(keys.contains(&g.key(&ab)));
            }
        }
        // Full closure via the order computation.
        assert_eq!(g.order(100_000).unwrap() as usize, all.len());
    }

    #[test]
    fn mul_inverse_identity() {
        let g = group(Family::Sl, 2, "unram(p=3,m=1,h=3)", &[]);
        let alpha = Root(vec![1]);
        let u = g.root_element(&alpha, &g.ring.from_int(5)).unwrap();
        let t = g.cochar(&alpha, &g.ring.from_int(2)).unwrap();
        let x = g.mul(&u, &t);
        assert_eq!(g.mul(&x, &g.inv(&x)), g.identity());
        assert_eq!(g.mul(&g.inv(&x), &x), g.identity());
    }

    #[test]
    fn root_element_additivity() {
        for (fam, n, ring) in [
            (Family::Sl, 3, "unram(p=3,m=1,h=2)"),
            (Family::Sp4, 4, "unram(p=3,m=1,h=2)"),
        ] {
            let g = group(fam, n, ring, &[]);
            for r in g.system.roots.clone() {
                for x in g.window_values(&r) {
                    for y in g.window_values(&r) {
                        let ux = g.root_element(&r, &x).unwrap();
                        let uy = g.root_element(&r, &y).unwrap();
                        let sum = g.root_element(&r, &g.ring.add(&x, &y)).unwrap();
                        assert_eq!(g.mul(&ux, &uy), sum);
                    }
                }
            }
        }
    }

    #[test]
    fn sl3_elementary_product() {
        let g = group(Family::Sl, 3, "unram(p=3,m=1,h=2)", &[]);
        let a = Root(vec![1, 0]);
        let b = Root(vec![0, 1]);
        let e12 = g.root_element(&a, &g.ring.one()).unwrap();
        let e23 = g.root_element(&b, &g.ring.one()).unwrap();
        let prod = g.mul(&e12, &e23);
        // (I+E12)(I+E23) has (1,3) entry 1.
        assert_eq!(*prod.entry(0, 2), g.ring.one());
    }

    #[test]
    fn sp4_membership_and_commutator() {
        let g = group(Family::Sp4, 4, "unram(p=3,m=1,h=2)", &[]);
        for r in g.system.roots.clone() {
            let u = g.root_element(&r, &g.ring.one()).unwrap();
            assert!(g.contains(&u), "{}", r.short_name());
        }
        for t in g.torus_elements() {
            assert!(g.contains(&t));
        }
        // [u_β(1), u_α(1)] lands in U_{α+β}·U_{2α+β}.
        let a = Root(vec![1, 0]);
        let b = Root(vec![0, 1]);
        let com = g.commutator(
            &g.root_element(&b, &g.ring.one()).unwrap(),
            &g.root_element(&a, &g.ring.one()).unwrap(),
        );
        assert!(g.contains(&com));
        // No component on ±α, ±β.
        assert!(g.ring.is_zero(&g.read_param(&com, &a)));
        assert!(g.ring.is_zero(&g.read_param(&com, &b.neg())));
    }

    #[test]
    fn cochar_acts_by_the_pairing() {
        for (fam, n, ring) in [
            (Family::Gl, 3, "unram(p=3,m=1,h=2)"),
            (Family::Sp4, 4, "unram(p=3,m=1,h=2)"),
        ] {
            let g = group(fam, n, ring, &[]);
            for rv in g.system.roots.clone() {
                for beta in g.system.roots.clone() {
                    let k = g.system.cartan_pairing(&beta, &rv);
                    for lam in g.ring.units().into_iter().take(6) {
                        let h = g.cochar(&rv, &lam).unwrap();
                        let x = g.ring.from_int(1);
                        let u = g.root_element(&beta, &x).unwrap();
                        let conj = g.conjugate(&h, &u);
                        // λ^{⟨β,r∨⟩}·x
                        let lam_inv = g.ring.invert(&lam).unwrap();
                        let mut scale = g.ring.one();
                        for _ in 0..k.unsigned_abs() {
                            scale = g.ring.mul(&scale, if k >= 0 { &lam } else { &lam_inv });
                        }
                        let expect = g.root_element(&beta, &scale).unwrap();
                        assert_eq!(conj, expect, "{} {}", rv.short_name(), beta.short_name());
                    }
                }
            }
        }
    }

    #[test]
    fn iwahori_window_shape_matches_the_convention() {
        // r = 1/2 on A1: the lower-left entry carries the shift.
        let g = group(Family::Sl, 2, "equichar(p=3,m=1,h=3)", &[half()]);
        assert_eq!(g.window_lo()[0][1], 0);
        assert_eq!(g.window_lo()[1][0], 1);
        let alpha = Root(vec![1]);
        // u_{−α,λ} in parameter form is [[1,0],[ϖλ,1]].
        let lam = g.ring.from_int(2);
        let u = g.root_element_param(&alpha.neg(), &lam).unwrap();
        let w = g.ring.uniformizer().unwrap();
        assert_eq!(*u.entry(1, 0), g.ring.mul(&w, &lam));
        assert_eq!(*u.entry(0, 1), g.ring.zero());
    }

    #[test]
    fn negative_f0_values_are_normalized_by_offsets() {
        // A2 with r = (1/2, 1/2): f_0(−α−β) = −1, yet all windows ≥ 0 and
        // |U_{α+β}| = q^h.
        let g = group(Family::Gl, 3, "unram(p=3,m=1,h=2)", &[half(), half()]);
        let ab = Root(vec![1, 1]);
        assert_eq!(g.f0.value(&ab.neg()), -1);
        assert_eq!(g.u_filtration(&ab, g.f0.value(&ab)).len(), 9); // q^h
        let a = Root(vec![1, 0]);
        assert_eq!(g.u_filtration(&a, g.f0.value(&a)).len(), 3); // q^{h−1}
        assert!(g.psi.contains(&ab));
        assert!(!g.psi.contains(&a));
    }

    #[test]
    fn window_sizes_match_psi_membership() {
        for f in [
            alloc::vec::Vec::new(),
            alloc::vec![half(), half()],
            alloc::vec![Rational::new(1, 3), Rational::new(1, 3)],
        ] {
            let g = group(Family::Gl, 3, "unram(p=3,m=1,h=2)", &f);
            let q = g.residue_q();
            let h = g.depth();
            for r in g.system.roots.clone() {
                let size = g.u_filtration(&r, g.f0.value(&r)).len() as u64;
                let expect = if g.psi.contains(&r) {
                    q.pow(h)
                } else {
                    q.pow(h - 1)
                };
                assert_eq!(size, expect, "{} {:?}", r.short_name(), f);
            }
        }
    }

    #[test]
    fn associativity_randomized() {
        let g = group(Family::Gl, 2, "ram(p=3,e=2,c=1,h=3)", &[half()]);
        let alpha = Root(vec![1]);
        let mut elems = Vec::new();
        for u in g.u_filtration(&alpha.neg(), 1).iter().take(6) {
            for t in g.torus_elements().iter().take(6) {
                for v in g.u_filtration(&alpha, 0).iter().take(6) {
                    elems.push(g.mul(&g.mul(u, t), v));
                }
            }
        }
        let mut state = 0x243f6a8885a308d3u64;
        let mut rnd = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) as usize % elems.len()
        };
        for _ in 0..10_000 {
            let (a, b, c) = (&elems[rnd()], &elems[rnd()], &elems[rnd()]);
            assert_eq!(g.mul(&g.mul(a, b), c), g.mul(a, &g.mul(b, c)));
        }
    }

    #[test]
    fn mixed_group_rejection() {
        let g1 = group(Family::Sl, 2, "unram(p=3,m=1,h=2)", &[]);
        let g2 = group(Family::Sl, 2, "equichar(p=3,m=1,h=2)", &[]);
        assert_eq!(
            g1.group_arith(&g1.identity(), &g2.identity(), GroupOp::Mul),
            Err(GroupError::MixedGroups)
        );
    }
}
