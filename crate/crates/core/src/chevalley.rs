//! Structure-constant families over the exact rationals.
//!
//! A family assigns to every ordered additive pair `(α, β)` the constant
//! `c_{α,β}` appearing in the commutator expansion
//! `[u_{α,λ}, u_{β,μ}] = ∏ u_{iα+jβ}(c_{α,β,i,j} λ^i μ^j)`. Families are
//! generated by the extraspecial-pair method: fix the total order on
//! positive roots (height, then lexicographic), give each non-simple
//! positive root its extraspecial pair, choose a sign there (default `+`),
//! and propagate everything else through the Jacobi identity and the
//! length-weighted cyclic relations. Generated families satisfy
//! `|c_{α,β}| = p(α,β)` (the root-string exit index).
//!
//! Higher constants (`i + j ≥ 3`, and `(2,1)`-type terms) are derived data,
//! computed from the `(1,1)` constants by the closed formulas.
//!
//! Constants here are characteristic-zero rationals; the `group` module
//! reduces them into truncated rings (2, and 3 for `G_2`, must be
//! invertible there) and compares against empirically extracted families.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, Rational};
use crate::report::VerificationReport;
use crate::rootsystem::{Root, RootSystem, RootSystemError, TypeLabel};

/// The `(1,1)` structure constants for every ordered additive pair.
#[derive(Debug, Clone)]
pub struct ConstantFamily {
    pub c: BTreeMap<(Root, Root), Rational>,
}

impl ConstantFamily {
    pub fn get(&self, a: &Root, b: &Root) -> Rational {
        *self
            .c
            .get(&(a.clone(), b.clone()))
            .unwrap_or_else(|| panic!("constant for ({}, {})", a.short_name(), b.short_name()))
    }

    pub fn try_get(&self, a: &Root, b: &Root) -> Option<Rational> {
        self.c.get(&(a.clone(), b.clone())).copied()
    }

    /// Serializes as the documented JSON-map text: keys `"(a,b)"`, values
    /// rationals as strings.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        self.c
            .iter()
            .map(|((a, b), v)| {
                (
                    format!("({},{})", a.short_name(), b.short_name()),
                    format_rational(*v),
                )
            })
            .collect()
    }
}

/// Indexed higher constants `c_{α,β,i,j}` for `i + j ≥ 3` and the `B_2`
/// `(2,1)` case — everything beyond `(1,1)` that can appear in a commutator
/// expansion for the supported types.
#[derive(Debug, Clone)]
pub struct HigherConstants {
    pub values: BTreeMap<(Root, Root, u32, u32), Rational>,
}

impl HigherConstants {
    pub fn get(&self, a: &Root, b: &Root, i: u32, j: u32) -> Option<Rational> {
        self.values.get(&(a.clone(), b.clone(), i, j)).copied()
    }
}

/// A root-indexed rescaling `N` with `N_{−α} = N_α^{−1}`.
#[derive(Debug, Clone)]
pub struct Rescaling {
    pub n: BTreeMap<Root, Rational>,
}

impl Rescaling {
    pub fn identity(system: &RootSystem) -> Rescaling {
        Rescaling {
            n: system
                .roots
                .iter()
                .map(|r| (r.clone(), Rational::one()))
                .collect(),
        }
    }

    pub fn get(&self, r: &Root) -> Rational {
        self.n[r]
    }

    pub fn is_valid(&self, system: &RootSystem) -> bool {
        system.roots.iter().all(|r| {
            let v = match self.n.get(r) {
                Some(v) => *v,
                None => return false,
            };
            !v.is_zero() && self.n.get(&r.neg()).map(|w| v * *w) == Some(Rational::one())
        })
    }

    pub fn inverse(&self) -> Rescaling {
        Rescaling {
            n: self
                .n
                .iter()
                .map(|(r, v)| (r.clone(), Rational::one() / *v))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChevalleyError {
    UnsupportedType(String),
    NotComparable,
}

impl From<RootSystemError> for ChevalleyError {
    fn from(e: RootSystemError) -> Self {
        ChevalleyError::UnsupportedType(format!("{:?}", e))
    }
}

/// Generates a consistent family with `|c_{α,β}| = p(α,β)`, signs resolved
/// by the extraspecial-pair method (default `+` on every extraspecial pair;
/// `signs` overrides them in the height-lex order of the non-simple positive
/// roots).
pub fn generate_family(
    system: &RootSystem,
    signs: Option<&[i64]>,
) -> Result<ConstantFamily, ChevalleyError> {
    match system.type_label {
        TypeLabel::A | TypeLabel::B | TypeLabel::C | TypeLabel::G => {}
    }
    let pos = system.positive_roots(); // height-lex order
    let non_simple: Vec<Root> = pos.iter().filter(|r| r.height() > 1).cloned().collect();

    // Table on positive special pairs, filled by increasing height of the sum.
    let mut table: BTreeMap<(Root, Root), Rational> = BTreeMap::new();

    for (k, rho) in non_simple.iter().enumerate() {
        // Extraspecial pair: minimal first member in the positive-root order.
        let (a1, b1) = pos
            .iter()
            .find_map(|x| {
                let y = rho.minus(x);
                if y.is_positive() && system.is_root(&y) {
                    Some((x.clone(), y))
                } else {
                    None
                }
            })
            .expect("every non-simple positive root decomposes");
        let sign = signs
            .and_then(|s| s.get(k))
            .copied()
            .unwrap_or(1);
        let p = system.p_int(&a1, &b1).expect("additive pair");
        table.insert(
            (a1.clone(), b1.clone()),
            Rational::from_integer(sign.signum().max(-1) * p),
        );

        // Remaining special pairs for ρ, via the Jacobi identity against the
        // extraspecial pair.
        let mut specials: Vec<(Root, Root)> = Vec::new();
        for x in &pos {
            let y = rho.minus(x);
            if y.is_positive()
                && system.is_root(&y)
                && RootSystem::root_key(x) < RootSystem::root_key(&y)
            {
                specials.push((x.clone(), y));
            }
        }
        for (a, b) in specials {
            if a == a1 {
                continue;
            }
            // N(α,β)·N(−ρ,α₁) = N(α₁,−α)N(α₁−α,−β) + N(−β,α₁)N(α₁−β,−α)
            let lhs_coeff = eval_pair(system, &table, &rho.neg(), &a1);
            debug_assert!(!lhs_coeff.is_zero());
            let t1 = eval_pair(system, &table, &a1, &a.neg())
                * eval_pair(system, &table, &a1.minus(&a), &b.neg());
            let t2 = eval_pair(system, &table, &b.neg(), &a1)
                * eval_pair(system, &table, &a1.minus(&b), &a.neg());
            table.insert((a, b), (t1 + t2) / lhs_coeff);
        }
    }

    // Materialize the full map over all ordered additive pairs.
    let mut c = BTreeMap::new();
    for (a, b) in system.additive_pairs() {
        let v = eval_pair(system, &table, &a, &b);
        debug_assert!(!v.is_zero());
        c.insert((a, b), v);
    }
    Ok(ConstantFamily { c })
}

/// Evaluates `N(a, b)` for arbitrary root pairs from the positive-pair
/// table, through antisymmetry, negation, and the length-weighted cyclic
/// reductions. Returns 0 when `a + b` is not a root (the Jacobi-identity
/// convention).
fn eval_pair(
    system: &RootSystem,
    table: &BTreeMap<(Root, Root), Rational>,
    a: &Root,
    b: &Root,
) -> Rational {
    let sum = a.plus(b);
    if !system.is_root(a) || !system.is_root(b) || !system.is_root(&sum) {
        return Rational::zero();
    }
    match (a.is_positive(), b.is_positive()) {
        (true, true) => {
            if let Some(v) = table.get(&(a.clone(), b.clone())) {
                *v
            } else {
                -*table
                    .get(&(b.clone(), a.clone()))
                    .expect("positive special pairs are tabled")
            }
        }
        (false, false) => -eval_pair(system, table, &a.neg(), &b.neg()),
        (true, false) => {
            // a > 0, b < 0. Let w = −b.
            let w = b.neg();
            if sum.is_positive() {
                // s = a − w > 0: pair (s, w) sums to a.
                // N(a, −w) = N(s, w)·(s,s)/(a,a).
                let s = sum;
                let num = system.form(&s, &s);
                let den = system.form(a, a);
                eval_pair(system, table, &s, &w) * Rational::new(num, den)
            } else {
                // d = w − a > 0: pair (a, d) sums to w.
                // N(a, −w) = −N(a, d)·(d,d)/(w,w).
                let d = sum.neg();
                let num = system.form(&d, &d);
                let den = system.form(&w, &w);
                -eval_pair(system, table, a, &d) * Rational::new(num, den)
            }
        }
        (false, true) => -eval_pair(system, table, b, a),
    }
}

/// Derives every higher constant from the `(1,1)` family:
///
/// * `B_2`/`G_2`: `c_{α,β,2} = ½ c_{α,β} c_{α,α+β}` and `c_{β,α,2} = −c_{α,β,2}`;
/// * `G_2`: `c_{α,α+β,2,1} = ½ c_{α,α+β} c_{α,2α+β}`,
///   `c_{α,α+β,1,2} = ½ c_{α,α+β} c_{2α+β,α+β}`,
///   `c_{α,β,3} = ⅙ c_{α,β} c_{α,α+β} c_{α,2α+β}`,
///   `c_{α,β,3,2} = ⅓ c_{α,β}² c_{α,α+β} c_{α+β,2α+β}`,
///   `c_{β,α,3} = −c_{α,β,3}`,
///   `c_{β,α,2,3} = −c_{α,β,3,2} − ½ c_{α,β}² c_{α,α+β} c_{α+β,2α+β}`.
///
/// Keys are `(α, β, i, j)` with the constant attached to the root
/// `iα + jβ`. Pairs whose string only contains `α + β` have no entries.
pub fn higher_constants(system: &RootSystem, fam: &ConstantFamily) -> HigherConstants {
    let mut values = BTreeMap::new();
    let half = Rational::new(1, 2);
    let third = Rational::new(1, 3);
    let sixth = Rational::new(1, 6);
    for (a, b) in system.additive_pairs() {
        let ab = a.plus(&b);
        let c11 = fam.get(&a, &b);
        // (2,1): needs 2α+β a root.
        let a2b = ab.plus(&a);
        if system.is_root(&a2b) {
            let c_a_ab = fam.get(&a, &ab);
            let c2 = half * c11 * c_a_ab;
            values.insert((a.clone(), b.clone(), 2, 1), c2);
            // (3,1): needs 3α+β a root (G_2).
            let a3b = a2b.plus(&a);
            if system.is_root(&a3b) {
                let c_a_a2b = fam.get(&a, &a2b);
                let c3 = sixth * c11 * c_a_ab * c_a_a2b;
                values.insert((a.clone(), b.clone(), 3, 1), c3);
            }
            // (3,2): needs 3α+2β a root (G_2).
            let a3b2 = a3b.plus(&b);
            if system.is_root(&a3b) && system.is_root(&a3b2) {
                let c_ab_a2b = fam.get(&ab, &a2b);
                let c32 = third * c11 * c11 * c_a_ab * c_ab_a2b;
                values.insert((a.clone(), b.clone(), 3, 2), c32);
            }
        }
        // (1,2): needs α+2β a root.
        let ab2 = ab.plus(&b);
        if system.is_root(&ab2) {
            let c_b_ab = fam.get(&b, &ab);
            let c12 = half * (-c11) * c_b_ab;
            // [u_β, u_α] seen from the other side: c_{β,α,2} with the roles
            // of the pair swapped is −c_{α,β,2} computed there; recorded
            // under (α, β, 1, 2) so both orientations are available.
            values.insert((a.clone(), b.clone(), 1, 2), -c12);
        }
        // (2,3): G_2 long relation for the swapped pair.
        let a2b3 = ab2.plus(&ab);
        if system.is_root(&a2b3) && system.is_root(&ab.plus(&a)) {
            // Only triggered when {α,β} spans G_2 with α short: 2α+3β never
            // occurs in our realizations with this orientation, so nothing
            // to record here; the (β,α,2,3) value is derived in
            // `expansion_exponents` from (α,β,3,2).
        }
    }
    HigherConstants { values }
}

/// `c'_{α,β} = N_α N_β / N_{α+β} · c_{α,β}`.
pub fn apply_rescaling(
    system: &RootSystem,
    fam: &ConstantFamily,
    resc: &Rescaling,
) -> ConstantFamily {
    let mut c = BTreeMap::new();
    for ((a, b), v) in &fam.c {
        let sum = a.plus(b);
        let factor = resc.get(a) * resc.get(b) / resc.get(&sum);
        c.insert((a.clone(), b.clone()), factor * *v);
    }
    let _ = system;
    ConstantFamily { c }
}

/// Solves for a rescaling taking `fam` to `fam2`, by the height induction:
/// `N = 1` on simple roots; for `ρ = β+γ` (γ simple when height > 2),
/// `N_ρ = c_{β,γ} N_β N_γ / c'_{β,γ}`; negatives by inversion. Returns the
/// rescaling only when the full check `apply_rescaling(fam, N) = fam2`
/// passes; both inputs must pass `verify_identities` first.
pub fn find_rescaling(
    system: &RootSystem,
    fam: &ConstantFamily,
    fam2: &ConstantFamily,
) -> Result<Option<Rescaling>, ChevalleyError> {
    if fam.c.len() != fam2.c.len() || fam.c.keys().ne(fam2.c.keys()) {
        return Err(ChevalleyError::NotComparable);
    }
    if !verify_identities(system, fam).all_pass() || !verify_identities(system, fam2).all_pass() {
        return Ok(None);
    }
    let mut n: BTreeMap<Root, Rational> = BTreeMap::new();
    for s in system.simple_roots() {
        n.insert(s, Rational::one());
    }
    let mut pos = system.positive_roots();
    pos.sort_by_key(|r| r.height());
    for rho in pos.iter().filter(|r| r.height() > 1) {
        // Decompose ρ = β + γ with γ simple.
        let (beta, gamma) = system
            .simple_roots()
            .into_iter()
            .find_map(|g| {
                let beta = rho.minus(&g);
                if system.is_root(&beta) && beta.is_positive() {
                    Some((beta, g))
                } else {
                    None
                }
            })
            .expect("positive non-simple roots split off a simple root");
        let c = fam.get(&beta, &gamma);
        let c2 = fam2.get(&beta, &gamma);
        if c2.is_zero() {
            return Ok(None);
        }
        let val = c * n[&beta] * n[&gamma] / c2;
        n.insert(rho.clone(), val);
    }
    for rho in pos {
        let inv = Rational::one() / n[&rho];
        n.insert(rho.neg(), inv);
    }
    let resc = Rescaling { n };
    let rescaled = apply_rescaling(system, fam, &resc);
    if rescaled
        .c
        .iter()
        .all(|(k, v)| fam2.c.get(k) == Some(v))
    {
        Ok(Some(resc))
    } else {
        Ok(None)
    }
}

fn name2(a: &Root, b: &Root) -> String {
    format!("({},{})", a.short_name(), b.short_name())
}

/// Evaluates every §5 identity that applies to the system, over exact
/// rationals, and reports each with its proposition tag.
pub fn verify_identities(system: &RootSystem, fam: &ConstantFamily) -> VerificationReport {
    let mut rep = VerificationReport::new();
    let pairs = system.additive_pairs();

    // Antisymmetry: c_{β,α} = −c_{α,β}.
    for (a, b) in &pairs {
        let ok = fam.get(b, a) == -fam.get(a, b);
        rep.record("antisym", "prop 5.2", ok, name2(a, b));
    }

    // com3: for α,β,γ with α+β, α+γ, α+β+γ roots and β+γ neither root nor 0:
    // c_{α,β} c_{γ,α+β} = c_{γ,α} c_{α+γ,β}.
    for a in &system.roots {
        for b in &system.roots {
            for g in &system.roots {
                let ab = match system.sum_root(a, b) {
                    Some(r) => r,
                    None => continue,
                };
                let ag = match system.sum_root(a, g) {
                    Some(r) => r,
                    None => continue,
                };
                let abg = b.plus(g).plus(a);
                if !system.is_root(&abg) {
                    continue;
                }
                let bg = b.plus(g);
                if bg.0.iter().all(|&c| c == 0) || system.is_root(&bg) {
                    continue;
                }
                let lhs = fam.get(a, b) * fam.get(g, &ab);
                let rhs = fam.get(g, a) * fam.get(&ag, b);
                rep.record(
                    "com3",
                    "prop 5.6",
                    lhs == rhs,
                    format!("({},{},{})", a.short_name(), b.short_name(), g.short_name()),
                );
            }
        }
    }

    // Rank-2 subsystem relations, instantiated on every conforming pair
    // (α, β linearly independent, α+β a root, α−β not, α short when lengths
    // differ — §5.1's normalization).
    for (a, b) in &pairs {
        if system.is_root(&a.minus(b)) {
            continue;
        }
        if system.form(a, a) > system.form(b, b) {
            continue;
        }
        let ab = a.plus(b);
        let len_a = system.form(a, a);
        let len_b = system.form(b, b);
        let a2b = ab.plus(a);
        let string_len = if !system.is_root(&a2b) {
            2
        } else if !system.is_root(&a2b.plus(a)) {
            3
        } else {
            4
        };
        match (string_len, len_a == len_b) {
            (2, true) => {
                // A2: com2, cyclic, and the −1 product.
                rep.record(
                    "a2.com2",
                    "prop 5.8",
                    fam.get(a, b) * fam.get(&ab, &b.neg()) == Rational::one(),
                    name2(a, b),
                );
                let c = fam.get(a, b);
                let cyc1 = fam.get(b, &ab.neg());
                let cyc2 = fam.get(&ab.neg(), a);
                rep.record(
                    "a2.cyclic",
                    "prop 5.9",
                    c == cyc1 && c == cyc2,
                    name2(a, b),
                );
                rep.record(
                    "a2.pab",
                    "cor 5.10",
                    fam.get(a, b) * fam.get(&a.neg(), &b.neg()) == -Rational::one(),
                    name2(a, b),
                );
            }
            (3, false) => {
                // B2: α short, β long, string α+β, 2α+β.
                rep.record(
                    "b2.com2",
                    "prop 5.12",
                    fam.get(a, b) * fam.get(&ab, &b.neg()) == Rational::one(),
                    name2(a, b),
                );
                rep.record(
                    "b2.com2b2",
                    "prop 5.13",
                    fam.get(b, a) * fam.get(&ab, &a.neg()) == Rational::from_integer(2),
                    name2(a, b),
                );
                let c = fam.get(a, b);
                let ok = c == fam.get(b, &ab.neg())
                    && c == Rational::new(1, 2) * fam.get(&ab.neg(), a);
                rep.record("b2.cyclic", "prop 5.14", ok, name2(a, b));
                rep.record(
                    "b2.pab.short",
                    "cor 5.15",
                    fam.get(a, b) * fam.get(&a.neg(), &b.neg()) == -Rational::one(),
                    name2(a, b),
                );
                rep.record(
                    "b2.pab.minus4",
                    "cor 5.15",
                    fam.get(a, &ab) * fam.get(&a.neg(), &ab.neg())
                        == Rational::from_integer(-4),
                    name2(a, &ab),
                );
            }
            (4, false) => {
                // G2: α short, β long; string α+β, 2α+β, 3α+β, (3α+2β).
                let a3b = a2b.plus(a);
                let a3b2 = a3b.plus(b);
                rep.record(
                    "g2.long_a2.cyclic",
                    "prop 5.19",
                    {
                        let c = fam.get(b, &a3b);
                        c == fam.get(&a3b, &a3b2.neg()) && c == fam.get(&a3b2.neg(), b)
                    },
                    name2(b, &a3b),
                );
                rep.record(
                    "g2.long_a2.com2",
                    "prop 5.19",
                    fam.get(b, &a3b) * fam.get(&a3b2, &a3b.neg()) == Rational::one(),
                    name2(b, &a3b),
                );
                rep.record(
                    "g2.long_a2.pab",
                    "prop 5.19",
                    fam.get(b, &a3b) * fam.get(&b.neg(), &a3b.neg()) == -Rational::one(),
                    name2(b, &a3b),
                );
                rep.record(
                    "g2.com2",
                    "prop 5.20 context",
                    fam.get(a, b) * fam.get(&ab, &b.neg()) == Rational::one(),
                    name2(a, b),
                );
                rep.record(
                    "g2.three",
                    "prop 5.21 context",
                    fam.get(b, a) * fam.get(&ab, &a.neg()) == Rational::from_integer(3),
                    name2(b, a),
                );
                rep.record(
                    "g2.four",
                    "prop 5.22 context",
                    fam.get(&ab, a) * fam.get(&a2b, &a.neg()) == Rational::from_integer(4),
                    name2(&ab, a),
                );
                let c = fam.get(a, b);
                rep.record(
                    "g2.cyclic.short",
                    "prop 5.20",
                    c == fam.get(b, &ab.neg()) && c == Rational::new(1, 3) * fam.get(&ab.neg(), a),
                    name2(a, b),
                );
                let c2 = fam.get(a, &ab);
                rep.record(
                    "g2.cyclic.mid",
                    "prop 5.20",
                    c2 == fam.get(&ab, &a2b.neg()) && c2 == fam.get(&a2b.neg(), a),
                    name2(a, &ab),
                );
                rep.record(
                    "g2.pab.minus1",
                    "cor 5.21",
                    fam.get(a, b) * fam.get(&a.neg(), &b.neg()) == -Rational::one(),
                    name2(a, b),
                );
                rep.record(
                    "g2.pab.minus4",
                    "cor 5.21",
                    fam.get(a, &ab) * fam.get(&a.neg(), &ab.neg()) == Rational::from_integer(-4),
                    name2(a, &ab),
                );
                rep.record(
                    "g2.pab.minus9",
                    "cor 5.21",
                    fam.get(a, &a2b) * fam.get(&a.neg(), &a2b.neg()) == Rational::from_integer(-9),
                    name2(a, &a2b),
                );
            }
            _ => {}
        }
    }

    // Unified p-statements over every additive pair.
    for (a, b) in &pairs {
        if *b == a.neg() {
            continue;
        }
        let p = match system.p_int(a, b) {
            Ok(p) => Rational::from_integer(p),
            Err(_) => continue,
        };
        rep.record(
            "pab.square",
            "prop 5.22",
            fam.get(a, b) * fam.get(&a.neg(), &b.neg()) == -p * p,
            name2(a, b),
        );
        let ab = a.plus(b);
        let p2 = Rational::from_integer(system.p_int(b, &ab.neg()).expect("string pair"));
        let p3 = Rational::from_integer(system.p_int(&ab.neg(), a).expect("string pair"));
        let v = fam.get(a, b) / p;
        let ok = v == fam.get(b, &ab.neg()) / p2 && v == fam.get(&ab.neg(), a) / p3;
        rep.record("pab.cyclic", "prop 5.22", ok, name2(a, b));
    }

    rep
}

/// Normalization properties of *generated* families (not rescaling
/// invariant, so kept out of [`verify_identities`]): `|c_{α,β}| = p(α,β)`
/// on every pair, and higher-constant denominators dividing 2 in `B_2`,
/// 6 in `G_2`, 1 otherwise.
pub fn check_generated_normalization(
    system: &RootSystem,
    fam: &ConstantFamily,
) -> VerificationReport {
    let mut rep = VerificationReport::new();
    for (a, b) in system.additive_pairs() {
        if b == a.neg() {
            continue;
        }
        if let Ok(p) = system.p_int(&a, &b) {
            rep.record(
                "norm.abs",
                "prop 5.1 + prop 5.22 remark",
                fam.get(&a, &b).abs() == Rational::from_integer(p),
                name2(&a, &b),
            );
        }
    }
    let higher = higher_constants(system, fam);
    let bound = match system.type_label {
        TypeLabel::A => 1,
        TypeLabel::B | TypeLabel::C => 2,
        TypeLabel::G => 6,
    };
    for ((a, b, i, j), v) in &higher.values {
        rep.record(
            "higher.denominator",
            "props 5.10-5.11, 5.16-5.18",
            bound % *v.denom() == 0,
            format!("({},{},{},{})", a.short_name(), b.short_name(), i, j),
        );
    }
    rep
}
