//! Reduced root systems of types `A_n`, `B_2`/`C_2`, `G_2`, with coroots,
//! Weyl reflections, root strings, extended simple roots, and integer-valued
//! concave functions.
//!
//! Roots are integer coefficient vectors over the simple roots, in a fixed
//! standard realization; lengths and Cartan pairings come from the
//! symmetrized Cartan form. `B_2` and `C_2` are the same implementation,
//! with the short simple root listed first. Root equality is coefficient
//! equality. Everything is immutable and pure.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::rational::{ceil_int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeLabel {
    A,
    B,
    C,
    G,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootSystemError {
    UnsupportedType(String),
    Reducible,
    NotAdditivePair,
    InvalidConcave(String),
    UnknownRoot,
}

/// A root as a coefficient vector over the simple roots.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Root(pub Vec<i64>);

impl Root {
    pub fn neg(&self) -> Root {
        Root(self.0.iter().map(|c| -c).collect())
    }

    pub fn plus(&self, other: &Root) -> Root {
        Root(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn minus(&self, other: &Root) -> Root {
        Root(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Root {
        Root(self.0.iter().map(|c| k * c).collect())
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().sum::<i64>() > 0
    }

    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Prints coefficients over simple roots named `a`, `b`, `c`, …,
    /// e.g. `2a+b` or `-a-b`.
    pub fn short_name(&self) -> String {
        let letters = ["a", "b", "c", "d", "e", "f"];
        let mut out = String::new();
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if c > 0 && !out.is_empty() {
                out.push('+');
            }
            if c == -1 {
                out.push('-');
            } else if c != 1 {
                out.push_str(&format!("{}", c));
            }
            out.push_str(letters[i]);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// A reduced root system in its standard realization.
#[derive(Debug, Clone)]
pub struct RootSystem {
    pub type_label: TypeLabel,
    pub rank: usize,
    /// All roots; positive roots first, by height then lexicographically,
    /// then their negatives in the same order.
    pub roots: Vec<Root>,
    /// Symmetrized Cartan form on simple-root coefficients.
    gram: Vec<Vec<i64>>,
    root_set: BTreeSet<Root>,
}

impl RootSystem {
    pub fn simple_roots(&self) -> Vec<Root> {
        (0..self.rank)
            .map(|i| {
                let mut c = vec![0; self.rank];
                c[i] = 1;
                Root(c)
            })
            .collect()
    }

    pub fn is_root(&self, r: &Root) -> bool {
        self.root_set.contains(r)
    }

    /// Positive roots in the canonical total order: by height, then by the
    /// reversed coefficient vector, so the first simple root sorts first.
    pub fn positive_roots(&self) -> Vec<Root> {
        self.roots.iter().filter(|r| r.is_positive()).cloned().collect()
    }

    /// The canonical total order on roots (used for extraspecial pairs and
    /// deterministic decompositions).
    pub fn root_key(r: &Root) -> (i64, Vec<i64>) {
        let mut rev = r.0.clone();
        rev.reverse();
        (r.height(), rev)
    }

    /// Symmetrized Cartan pairing `(x, y)`.
    pub fn form(&self, x: &Root, y: &Root) -> i64 {
        let mut s = 0;
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += x.0[i] * self.gram[i][j] * y.0[j];
            }
        }
        s
    }

    /// Cartan integer `⟨β, α∨⟩ = 2(β,α)/(α,α)`.
    pub fn cartan_pairing(&self, beta: &Root, alpha: &Root) -> i64 {
        let num = 2 * self.form(beta, alpha);
        let den = self.form(alpha, alpha);
        debug_assert_eq!(num % den, 0);
        num / den
    }

    /// `α + β` when it is a root, absent otherwise.
    pub fn sum_root(&self, alpha: &Root, beta: &Root) -> Option<Root> {
        let s = alpha.plus(beta);
        if self.is_root(&s) {
            Some(s)
        } else {
            None
        }
    }

    /// Ordered additive pairs: `(α, β)` with `α + β` a root.
    pub fn additive_pairs(&self) -> Vec<(Root, Root)> {
        let mut out = Vec::new();
        for a in &self.roots {
            for b in &self.roots {
                if a != b && self.sum_root(a, b).is_some() {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
        out
    }

    /// The smallest positive integer `c` such that `β − cα` is not a root;
    /// always in `{1, 2, 3}` for the supported types.
    pub fn p_int(&self, alpha: &Root, beta: &Root) -> Result<i64, RootSystemError> {
        if self.sum_root(alpha, beta).is_none() || *beta == alpha.neg() || beta == alpha {
            return Err(RootSystemError::NotAdditivePair);
        }
        let mut c = 1;
        while self.is_root(&beta.minus(&alpha.scale(c))) {
            c += 1;
            debug_assert!(c <= 4);
        }
        Ok(c)
    }

    /// `s_α(β) = β − ⟨β, α∨⟩ α`.
    pub fn weyl_reflect(&self, alpha: &Root, beta: &Root) -> Root {
        let k = self.cartan_pairing(beta, alpha);
        let r = beta.minus(&alpha.scale(k));
        debug_assert!(self.is_root(&r));
        r
    }

    /// The positive root of maximal height.
    pub fn highest_root(&self) -> Root {
        self.positive_roots()
            .into_iter()
            .max_by_key(|r| r.height())
            .expect("nonempty root system")
    }

    /// Simple roots plus the negative of the highest root.
    pub fn extended_simple_roots(&self) -> Result<Vec<Root>, RootSystemError> {
        if !self.is_irreducible() {
            return Err(RootSystemError::Reducible);
        }
        let mut out = self.simple_roots();
        out.push(self.highest_root().neg());
        Ok(out)
    }

    fn is_irreducible(&self) -> bool {
        // Connectivity of the simple-root Dynkin graph.
        let n = self.rank;
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && self.gram[i][j] != 0 {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Builds the standard realization.
pub fn build_root_system(label: TypeLabel, rank: usize) -> Result<RootSystem, RootSystemError> {
    let gram: Vec<Vec<i64>> = match (label, rank) {
        (TypeLabel::A, n) if n >= 1 => (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            2
                        } else if i.abs_diff(j) == 1 {
                            -1
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect(),
        // Short simple root first (§5.1 convention: α is the shortest).
        (TypeLabel::B, 2) | (TypeLabel::C, 2) => vec![vec![2, -2], vec![-2, 4]],
        (TypeLabel::G, 2) => vec![vec![2, -3], vec![-3, 6]],
        _ => {
            return Err(RootSystemError::UnsupportedType(format!(
                "{:?}{} is not supported",
                label, rank
            )))
        }
    };

    // Generate all roots by closing the simple roots under reflections.
    let simple: Vec<Root> = (0..rank)
        .map(|i| {
            let mut c = vec![0; rank];
            c[i] = 1;
            Root(c)
        })
        .collect();
    let proto = RootSystem {
        type_label: label,
        rank,
        roots: Vec::new(),
        gram: gram.clone(),
        root_set: BTreeSet::new(),
    };
    let mut set: BTreeSet<Root> = simple.iter().cloned().collect();
    loop {
        let mut next = set.clone();
        for r in &set {
            next.insert(r.neg());
            for s in &simple {
                let k = 2 * proto.form(r, s);
                let d = proto.form(s, s);
                debug_assert_eq!(k % d, 0);
                next.insert(r.minus(&s.scale(k / d)));
            }
        }
        next.remove(&Root(vec![0; rank]));
        if next == set {
            break;
        }
        set = next;
    }

    let mut pos: Vec<Root> = set.iter().filter(|r| r.is_positive()).cloned().collect();
    pos.sort_by_key(RootSystem::root_key);
    let mut roots = pos.clone();
    roots.extend(pos.iter().map(|r| r.neg()));
    let root_set: BTreeSet<Root> = roots.iter().cloned().collect();
    Ok(RootSystem {
        type_label: label,
        rank,
        roots,
        gram,
        root_set,
    })
}

/// Parses `A2`, `B2`, `G2`, `A3`, … into a root system.
pub fn parse_root_system(s: &str) -> Result<RootSystem, RootSystemError> {
    let s = s.trim();
    let (label, rank) = s.split_at(1);
    let rank: usize = rank
        .parse()
        .map_err(|_| RootSystemError::UnsupportedType(String::from(s)))?;
    let label = match label {
        "A" | "a" => TypeLabel::A,
        "B" | "b" => TypeLabel::B,
        "C" | "c" => TypeLabel::C,
        "G" | "g" => TypeLabel::G,
        _ => return Err(RootSystemError::UnsupportedType(String::from(s))),
    };
    build_root_system(label, rank)
}

/// An integer-valued concave function `f_0 : Φ → Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcaveFunction {
    pub values: BTreeMap<Root, i64>,
}

impl ConcaveFunction {
    pub fn value(&self, r: &Root) -> i64 {
        *self.values.get(r).expect("value defined on every root")
    }
}

/// Builds `f_0` from rational values on the simple roots: for
/// `±α = ±Σ n_i α_i` positive, `f_0(±α) = ⌈±Σ n_i r_i⌉`. The result
/// satisfies both concavity axioms and the `{0,1}` sum rule by construction.
pub fn extend_concave(system: &RootSystem, r: &[Rational]) -> ConcaveFunction {
    assert_eq!(r.len(), system.rank, "one rational per simple root");
    let mut values = BTreeMap::new();
    for root in &system.roots {
        let mut s = Rational::from_integer(0);
        for (i, &ni) in root.0.iter().enumerate() {
            s += Rational::from_integer(ni) * r[i];
        }
        values.insert(root.clone(), ceil_int(s));
    }
    ConcaveFunction { values }
}

/// One concavity violation, as `(roots involved, lhs, rhs)` description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcaveViolation {
    pub description: String,
}

/// Checks both concavity axioms on a candidate value map.
pub fn check_concave(
    system: &RootSystem,
    values: &BTreeMap<Root, i64>,
) -> (bool, Vec<ConcaveViolation>) {
    let mut violations = Vec::new();
    for root in &system.roots {
        let f = match values.get(root) {
            Some(v) => *v,
            None => {
                violations.push(ConcaveViolation {
                    description: format!("no value on {}", root.short_name()),
                });
                continue;
            }
        };
        let fneg = match values.get(&root.neg()) {
            Some(v) => *v,
            None => continue,
        };
        if f + fneg < 0 {
            violations.push(ConcaveViolation {
                description: format!(
                    "f({a}) + f(-{a}) = {s} < 0",
                    a = root.short_name(),
                    s = f + fneg
                ),
            });
        }
    }
    for a in &system.roots {
        for b in &system.roots {
            if let Some(sum) = system.sum_root(a, b) {
                let (fa, fb, fs) = (values.get(a), values.get(b), values.get(&sum));
                if let (Some(&fa), Some(&fb), Some(&fs)) = (fa, fb, fs) {
                    if fs > fa + fb {
                        violations.push(ConcaveViolation {
                            description: format!(
                                "f({}) > f({}) + f({})",
                                sum.short_name(),
                                a.short_name(),
                                b.short_name()
                            ),
                        });
                    }
                }
            }
        }
    }
    (violations.is_empty(), violations)
}

/// The subsystem `Ψ = {α : f(α) + f(−α) = 0}` (the reductive part).
#[derive(Debug, Clone)]
pub struct PsiSubsystem {
    pub members: BTreeSet<Root>,
}

impl PsiSubsystem {
    pub fn contains(&self, r: &Root) -> bool {
        self.members.contains(r)
    }
}

pub fn psi_of(system: &RootSystem, f: &ConcaveFunction) -> Result<PsiSubsystem, RootSystemError> {
    let (ok, violations) = check_concave(system, &f.values);
    if !ok {
        return Err(RootSystemError::InvalidConcave(
            violations[0].description.clone(),
        ));
    }
    let mut members = BTreeSet::new();
    for root in &system.roots {
        let s = f.value(root) + f.value(&root.neg());
        debug_assert!(s == 0 || s == 1, "Prop 2.3 sum rule");
        if s == 0 {
            members.insert(root.clone());
        }
    }
    // Ψ is stable under negation and closed as a root subsystem.
    for r in &members {
        debug_assert!(members.contains(&r.neg()));
        for s in &members {
            if let Some(sum) = system.sum_root(r, s) {
                debug_assert!(members.contains(&sum));
            }
        }
    }
    Ok(PsiSubsystem { members })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(s: &str) -> RootSystem {
        parse_root_system(s).unwrap()
    }

    fn root(system: &RootSystem, coeffs: &[i64]) -> Root {
        let r = Root(coeffs.to_vec());
        assert!(system.is_root(&r));
        r
    }

    #[test]
    fn root_counts() {
        assert_eq!(rs("A1").roots.len(), 2);
        assert_eq!(rs("A2").roots.len(), 6);
        assert_eq!(rs("A3").roots.len(), 12);
        assert_eq!(rs("B2").roots.len(), 8);
        assert_eq!(rs("C2").roots.len(), 8);
        assert_eq!(rs("G2").roots.len(), 12);
        assert!(parse_root_system("D4").is_err());
        assert!(parse_root_system("B3").is_err());
    }

    #[test]
    fn g2_has_the_twelve_expected_roots() {
        let g2 = rs("G2");
        for coeffs in [
            [1, 0],
            [0, 1],
            [1, 1],
            [2, 1],
            [3, 1],
            [3, 2],
        ] {
            let r = Root(coeffs.to_vec());
            assert!(g2.is_root(&r), "{:?}", coeffs);
            assert!(g2.is_root(&r.neg()));
        }
    }

    #[test]
    fn b2_has_the_eight_expected_roots() {
        let b2 = rs("B2");
        for coeffs in [[1, 0], [0, 1], [1, 1], [2, 1]] {
            let r = Root(coeffs.to_vec());
            assert!(b2.is_root(&r));
            assert!(b2.is_root(&r.neg()));
        }
        // α (first simple) is short.
        let a = Root(vec![1, 0]);
        let b = Root(vec![0, 1]);
        assert!(b2.form(&a, &a) < b2.form(&b, &b));
    }

    #[test]
    fn sum_root_cases() {
        let a2 = rs("A2");
        let (a, b) = (root(&a2, &[1, 0]), root(&a2, &[0, 1]));
        assert_eq!(a2.sum_root(&a, &b), Some(Root(vec![1, 1])));
        assert_eq!(a2.sum_root(&a, &a), None);
        let g2 = rs("G2");
        let (a, ab) = (root(&g2, &[1, 0]), root(&g2, &[1, 1]));
        assert_eq!(g2.sum_root(&a, &ab), Some(Root(vec![2, 1])));
    }

    #[test]
    fn p_int_cases() {
        let a2 = rs("A2");
        assert_eq!(a2.p_int(&root(&a2, &[1, 0]), &root(&a2, &[0, 1])), Ok(1));
        let b2 = rs("B2");
        assert_eq!(b2.p_int(&root(&b2, &[1, 0]), &root(&b2, &[1, 1])), Ok(2));
        let g2 = rs("G2");
        assert_eq!(g2.p_int(&root(&g2, &[1, 0]), &root(&g2, &[2, 1])), Ok(3));
        assert!(a2.p_int(&root(&a2, &[1, 0]), &root(&a2, &[1, 1])).is_err());
    }

    #[test]
    fn p_int_range_and_weyl_invariance() {
        for name in ["A2", "A3", "B2", "G2"] {
            let sys = rs(name);
            for (a, b) in sys.additive_pairs() {
                if b == a.neg() || b == a {
                    continue;
                }
                let p = sys.p_int(&a, &b).unwrap();
                assert!((1..=3).contains(&p));
                for w in &sys.roots {
                    let (wa, wb) = (sys.weyl_reflect(w, &a), sys.weyl_reflect(w, &b));
                    assert_eq!(sys.p_int(&wa, &wb).unwrap(), p);
                }
            }
        }
    }

    #[test]
    fn weyl_reflection_cases() {
        let a2 = rs("A2");
        let (a, b) = (root(&a2, &[1, 0]), root(&a2, &[0, 1]));
        assert_eq!(a2.weyl_reflect(&a, &a), a.neg());
        assert_eq!(a2.weyl_reflect(&a, &b), Root(vec![1, 1]));
        let b2 = rs("B2");
        let (a, b) = (root(&b2, &[1, 0]), root(&b2, &[0, 1]));
        assert_eq!(b2.weyl_reflect(&a, &b), Root(vec![2, 1]));
    }

    #[test]
    fn weyl_reflection_is_involutive_permutation() {
        for name in ["A2", "A3", "B2", "G2"] {
            let sys = rs(name);
            for a in &sys.roots {
                let mut image: BTreeSet<Root> = BTreeSet::new();
                for b in &sys.roots {
                    let r = sys.weyl_reflect(a, b);
                    assert!(sys.is_root(&r));
                    assert_eq!(sys.weyl_reflect(a, &r), *b);
                    image.insert(r);
                }
                assert_eq!(image.len(), sys.roots.len());
            }
        }
    }

    #[test]
    fn extended_simple_roots_cases() {
        let a2 = rs("A2");
        assert_eq!(
            a2.extended_simple_roots().unwrap(),
            vec![Root(vec![1, 0]), Root(vec![0, 1]), Root(vec![-1, -1])]
        );
        let b2 = rs("B2");
        assert_eq!(b2.extended_simple_roots().unwrap().pop(), Some(Root(vec![-2, -1])));
        let g2 = rs("G2");
        assert_eq!(g2.extended_simple_roots().unwrap().pop(), Some(Root(vec![-3, -2])));
    }

    #[test]
    fn extended_simple_roots_reach_every_root() {
        // Cor 3.14's property: every root outside Δ' differs from some
        // member by a root.
        for name in ["A2", "A3", "B2", "G2"] {
            let sys = rs(name);
            let delta = sys.extended_simple_roots().unwrap();
            for r in &sys.roots {
                if delta.contains(r) {
                    continue;
                }
                assert!(
                    delta.iter().any(|d| sys.is_root(&r.minus(d))),
                    "{} unreachable in {}",
                    r.short_name(),
                    name
                );
            }
        }
    }

    #[test]
    fn extend_concave_cases() {
        let a1 = rs("A1");
        let f = extend_concave(&a1, &[Rational::from_integer(0)]);
        assert_eq!(f.value(&Root(vec![1])), 0);
        assert_eq!(f.value(&Root(vec![-1])), 0);
        let psi = psi_of(&a1, &f).unwrap();
        assert_eq!(psi.members.len(), 2);

        let f = extend_concave(&a1, &[Rational::new(1, 2)]);
        assert_eq!(f.value(&Root(vec![1])), 1);
        assert_eq!(f.value(&Root(vec![-1])), 0);
        assert!(psi_of(&a1, &f).unwrap().members.is_empty());

        let a2 = rs("A2");
        let f = extend_concave(&a2, &[Rational::new(1, 2), Rational::new(1, 2)]);
        assert_eq!(f.value(&Root(vec![1, 1])), 1);
        assert_eq!(f.value(&Root(vec![-1, -1])), -1);
        let psi = psi_of(&a2, &f).unwrap();
        assert_eq!(psi.members.len(), 2);
        assert!(psi.contains(&Root(vec![1, 1])));
        assert!(psi.contains(&Root(vec![-1, -1])));
    }

    #[test]
    fn check_concave_cases() {
        let a1 = rs("A1");
        let zero: BTreeMap<Root, i64> =
            a1.roots.iter().map(|r| (r.clone(), 0)).collect();
        assert!(check_concave(&a1, &zero).0);

        let bad: BTreeMap<Root, i64> =
            a1.roots.iter().map(|r| (r.clone(), -1)).collect();
        let (ok, violations) = check_concave(&a1, &bad);
        assert!(!ok);
        assert!(!violations.is_empty());
    }

    #[test]
    fn exhaustive_concavity_of_extended_functions() {
        // Every output of extend_concave passes check_concave, for all
        // rationals with denominators dividing 6 and small numerators.
        let mut grid = Vec::new();
        for num in -6..=6 {
            for den in [1, 2, 3, 6] {
                grid.push(Rational::new(num, den));
            }
        }
        for name in ["A1", "A2", "A3", "B2", "G2"] {
            let sys = rs(name);
            for &r0 in &grid {
                for &r1 in &grid {
                    let mut params = alloc::vec![r0; sys.rank];
                    if sys.rank > 1 {
                        params[1] = r1;
                    }
                    let f = extend_concave(&sys, &params);
                    assert!(check_concave(&sys, &f.values).0);
                    psi_of(&sys, &f).unwrap();
                    if sys.rank == 1 {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn root_short_names() {
        let b2 = rs("B2");
        assert_eq!(root(&b2, &[2, 1]).short_name(), "2a+b");
        assert_eq!(root(&b2, &[-1, -1]).short_name(), "-a-b");
        assert_eq!(root(&b2, &[1, 0]).short_name(), "a");
    }
}
