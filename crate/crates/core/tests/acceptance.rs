//! The acceptance suite: one test (and one printed pass/fail line) per
//! criterion. Everything is exact arithmetic — zero tolerance throughout —
//! and every enumeration marked exhaustive really is.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use parahoric::chevalley::{
    check_generated_normalization, generate_family, higher_constants, verify_identities,
};
use parahoric::group::axioms::AxiomGroup;
use parahoric::group::extract::{
    find_rescaling_ring, reduce_family, verify_identities_tagged, TaggedOps,
};
use parahoric::group::hetero::{counterexample_group, counterexample_rings, HeteroGroup};
use parahoric::group::{make_group, Family, Group, WindowedGroupSpec};
use parahoric::rational::Rational;
use parahoric::ring::iso::{identify, iso_search, DEFAULT_ISO_CAP};
use parahoric::ring::{make_ring, Ring, RingSpec, Valuation};
use parahoric::rootsystem::{parse_root_system, Root};

fn ring(s: &str) -> Ring {
    make_ring(RingSpec::parse(s).unwrap()).unwrap()
}

fn group(family: Family, n: usize, ring: &str, f: &[Rational]) -> Group {
    make_group(&WindowedGroupSpec {
        family,
        n,
        ring: RingSpec::parse(ring).unwrap(),
        f: f.to_vec(),
    })
    .unwrap()
}

fn report(criterion: &str, ok: bool, detail: &str) {
    println!(
        "[{}] {} — {}",
        criterion,
        if ok { "PASS" } else { "FAIL" },
        detail
    );
    assert!(ok, "{} failed: {}", criterion, detail);
}

const TEST_RINGS: [&str; 7] = [
    "unram(p=3,m=1,h=2)",  // Z/9
    "unram(p=3,m=1,h=3)",  // Z/27
    "equichar(p=3,m=1,h=2)",
    "equichar(p=3,m=1,h=3)",
    "unram(p=3,m=2,h=2)",  // GR(9,2)
    "ram(p=3,e=2,c=1,h=3)",
    "ram(p=3,e=2,c=2,h=3)",
];

#[test]
fn ac1_truncated_valuation_axioms_and_ideals() {
    let mut checked = 0u64;
    for spec in TEST_RINGS {
        let r = ring(spec);
        let h = r.depth();
        let all = r.all_elements();
        for x in &all {
            // v(x) = ∞ ⟺ x = 0.
            assert_eq!(r.valuation(x) == Valuation::Infinite, r.is_zero(x), "{}", spec);
            for y in &all {
                checked += 1;
                let vx = r.valuation(x);
                let vy = r.valuation(y);
                let prod = r.mul(x, y);
                // v(xy) = v(x) + v(y) when < h, and xy = 0 otherwise.
                match (vx, vy) {
                    (Valuation::Finite(a), Valuation::Finite(b)) => {
                        if a + b >= h {
                            assert!(r.is_zero(&prod), "{}", spec);
                        } else {
                            assert_eq!(r.valuation(&prod), Valuation::Finite(a + b), "{}", spec);
                        }
                    }
                    _ => assert!(r.is_zero(&prod), "{}", spec),
                }
                // v(x+y) ≥ min(v(x), v(y)).
                let sum = r.add(x, y);
                let min = match (vx.finite(), vy.finite()) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (Some(a), None) | (None, Some(a)) => Some(a),
                    (None, None) => None,
                };
                if let Some(m) = min {
                    assert!(r.valuation(&sum).at_least(m), "{}", spec);
                }
            }
        }
        // R_i = {v ≥ i} is an ideal for every i.
        for i in 0..=h {
            let ideal: Vec<_> = all
                .iter()
                .filter(|x| r.valuation(x).at_least(i))
                .collect();
            for x in &ideal {
                for y in &ideal {
                    assert!(r.valuation(&r.add(x, y)).at_least(i), "{}", spec);
                }
                for z in &all {
                    assert!(r.valuation(&r.mul(x, z)).at_least(i), "{}", spec);
                }
            }
        }
        // Units are exactly the valuation-0 elements, with two-sided
        // inverses.
        for x in &all {
            let unit = r.is_unit(x);
            assert_eq!(unit, r.valuation(x) == Valuation::Finite(0));
            if unit {
                let inv = r.invert(x).unwrap();
                assert_eq!(r.mul(x, &inv), r.one());
                assert_eq!(r.mul(&inv, x), r.one());
            } else {
                assert!(r.invert(x).is_err());
            }
        }
    }
    report(
        "AC1",
        true,
        &format!("valuation axioms + ideal structure, {} pairs over 7 rings", checked),
    );
}

#[test]
fn ac2_unique_decomposition_bijection() {
    for spec in TEST_RINGS {
        let r = ring(spec);
        let mut seen = std::collections::BTreeSet::new();
        for x in r.all_elements() {
            let digits = r.decompose(&x);
            assert_eq!(digits.len(), r.depth() as usize);
            let reps: std::collections::BTreeSet<_> = r
                .teichmuller_reps()
                .into_iter()
                .map(|s| r.index_of(&s))
                .collect();
            for d in &digits {
                assert!(reps.contains(&r.index_of(d)), "{}", spec);
            }
            assert_eq!(r.recompose(&digits), x, "{}", spec);
            let key: Vec<u64> = digits.iter().map(|d| r.index_of(d)).collect();
            assert!(seen.insert(key), "decomposition collision in {}", spec);
        }
        assert_eq!(seen.len() as u64, r.order());
    }
    report("AC2", true, "ϖ-adic decomposition is a bijection on all 7 rings");
}

#[test]
fn ac3_hensel_square_roots() {
    for spec in TEST_RINGS {
        let r = ring(spec);
        let fq = r.residue_field();
        let residue_squares: std::collections::BTreeSet<u64> = fq
            .elements()
            .iter()
            .map(|a| fq.index_of(&fq.mul(a, a)))
            .collect();
        for u in r.units() {
            // sqrt(u²) returns exactly two opposite roots.
            let sq = r.mul(&u, &u);
            let (a, b) = r.sqrt(&sq).unwrap().expect("square of a unit");
            assert_eq!(r.mul(&a, &a), sq);
            assert_eq!(r.add(&a, &b), r.zero());
            assert_ne!(a, b, "p odd: the two roots differ");
            // present ⟺ the residue is a square in k.
            let res_idx = fq.index_of(&r.residue_of(&u));
            let has = r.sqrt(&u).unwrap().is_some();
            assert_eq!(has, residue_squares.contains(&res_idx), "{}", spec);
        }
    }
    report("AC3", true, "sqrt(u²) two opposite roots; present ⟺ residue square");
}

#[test]
fn ac4_section7_counterexample() {
    let (s1, s2) = counterexample_rings();
    let r1 = make_ring(s1).unwrap();
    let r2 = make_ring(s2).unwrap();
    let deep = iso_search(&r1, &r2, DEFAULT_ISO_CAP).unwrap();
    report("AC4a", deep.is_none(), "depth-3 ramified pair nonisomorphic");
    let q1 = r1.quotient_ring(2).unwrap();
    let q2 = r2.quotient_ring(2).unwrap();
    let shallow = iso_search(&q1, &q2, DEFAULT_ISO_CAP).unwrap();
    report("AC4b", shallow.is_some(), "depth-2 quotients isomorphic");

    // n = 1: exhaustive closure over all pairs.
    let g1 = HeteroGroup::new(1, s1, s2).unwrap();
    let (closed, pairs) = g1.closure_exhaustive_n1().unwrap();
    report(
        "AC4c",
        closed && pairs == 26_244u64 * 26_244,
        &format!("n=1 block group closed under multiplication ({} pairs, exhaustive)", pairs),
    );

    // n = 2: sampled closure ≥ 10^4 products, plus the induced-ring
    // obstruction.
    let (_, analysis) = counterexample_group(2, s1, s2, 10_000).unwrap();
    report(
        "AC4d",
        analysis.closed && analysis.closure_pairs_checked >= 10_000,
        &format!("n=2 closed on {} sampled products", analysis.closure_pairs_checked),
    );
    let (b1, b2, cross) = analysis.induced.unwrap();
    report(
        "AC4e",
        b1 && b2 && !cross,
        "diagonal-block induced rings are R1, R2 and are non-isomorphic",
    );
    report("AC4f", analysis.axioms.all_pass(), "n=2 parahoric-type axioms hold");
}

#[test]
fn ac5_rational_families_pass_every_identity() {
    for name in ["A2", "B2", "G2"] {
        let sys = parse_root_system(name).unwrap();
        let fam = generate_family(&sys, None).unwrap();
        let rep = verify_identities(&sys, &fam);
        let norm = check_generated_normalization(&sys, &fam);
        let fails: Vec<_> = rep
            .failures()
            .chain(norm.failures())
            .map(|e| format!("{} {}", e.id, e.witness))
            .collect();
        report(
            "AC5",
            fails.is_empty(),
            &format!("{}: {} identity instances, all exact", name, rep.entries.len()),
        );
        if name != "A2" {
            // Higher-constant formulas recomputed against the family.
            let higher = higher_constants(&sys, &fam);
            assert!(!higher.values.is_empty());
        }
    }
    // The cyclic relations and −p² identities also hold in A3 (rank-3
    // instances of the A2 case).
    let sys = parse_root_system("A3").unwrap();
    let fam = generate_family(&sys, None).unwrap();
    report(
        "AC5",
        verify_identities(&sys, &fam).all_pass(),
        "A3: all identity instances exact",
    );
}

#[test]
fn ac6_extracted_constants_match_after_rescaling() {
    for (fam_kind, n, spec) in [
        (Family::Sl, 3, "unram(p=3,m=1,h=2)"),
        (Family::Sl, 3, "equichar(p=3,m=1,h=2)"),
        (Family::Sp4, 4, "unram(p=3,m=1,h=2)"),
        (Family::Sp4, 4, "equichar(p=3,m=1,h=2)"),
    ] {
        let g = group(fam_kind, n, spec, &[]);
        let extracted = g.extract_constants(None).unwrap();
        let rep = verify_identities_tagged(&g, &extracted);
        let ok = rep.all_pass();
        let rational = generate_family(&g.system, None).unwrap();
        let reduced = reduce_family(&g.ring, &g.system, &rational).unwrap();
        let reconciled = find_rescaling_ring(&g, &reduced, &extracted).is_some();
        report(
            "AC6",
            ok && reconciled,
            &format!(
                "{:?} over {}: {} tagged identities + rescaling round-trip",
                fam_kind,
                spec,
                rep.entries.len()
            ),
        );
    }
}

#[test]
fn ac7_rank1_identity_exhaustive() {
    let rank1_rings = [
        "unram(p=3,m=1,h=2)",
        "unram(p=3,m=1,h=3)",
        "equichar(p=3,m=1,h=2)",
        "equichar(p=3,m=1,h=3)",
        "equichar(p=5,m=1,h=2)",
        "ram(p=3,e=2,c=1,h=3)",
    ];
    let alpha = Root(vec![1]);
    let mut swept = 0u64;
    for spec in rank1_rings {
        for fam in [Family::Sl, Family::Gl] {
            let g = group(fam, 2, spec, &[]);
            for lam in g.ring.all_elements() {
                let unit = g.ring.is_unit(&g.ring.add(&g.ring.one(), &lam));
                match g.rank1_check(&alpha, &lam) {
                    Ok(ok) => {
                        assert!(unit);
                        assert!(ok, "{:?} {} λ={:?}", fam, spec, lam);
                        swept += 1;
                    }
                    Err(_) => assert!(!unit),
                }
            }
        }
    }
    report(
        "AC7",
        true,
        &format!("rank-1 identity for all λ with 1+λ a unit ({} cases)", swept),
    );
}

#[test]
fn ac8_iwahori_closed_forms_exhaustive() {
    let alpha = Root(vec![1]);
    let mut swept = 0u64;
    for (q, specs) in [
        (3, ["equichar(p=3,m=1,h=2)", "equichar(p=3,m=1,h=3)"]),
        (5, ["equichar(p=5,m=1,h=2)", "equichar(p=5,m=1,h=3)"]),
    ] {
        for spec in specs {
            for fam in [Family::Sl, Family::Gl] {
                let g = group(fam, 2, spec, &[Rational::new(1, 2)]);
                let prec = g.depth() - 1;
                for lam in g.ring.all_elements() {
                    if g.ring.truncate_val(&lam, prec) != lam {
                        continue; // λ ranges over the U_{−α} parameter ring
                    }
                    assert!(
                        g.iwahori_closed_forms_hold(&alpha, &lam).unwrap(),
                        "q={} {} {:?}",
                        q,
                        spec,
                        lam
                    );
                    swept += 1;
                }
            }
        }
    }
    report(
        "AC8",
        true,
        &format!("a(λ)=b(λ)=1/(1+ϖλ), c(λ)=λ/(1+ϖλ) for all λ ({} cases)", swept),
    );
}

#[test]
fn ac9_nested_commutator_expansion() {
    // The exact algebraic n = 2 case in SL_3(Z/9).
    let g = group(Family::Sl, 3, "unram(p=3,m=1,h=2)", &[]);
    let a = Root(vec![1, 0]);
    let b = Root(vec![0, 1]);
    let a1 = g.root_element(&a, &g.ring.from_int(1)).unwrap();
    let a2 = g.root_element(&a, &g.ring.from_int(5)).unwrap();
    let bb = g.root_element(&b, &g.ring.from_int(2)).unwrap();
    let lhs = g.commutator(&a1, &g.commutator(&a2, &bb));
    let rhs = g.mul(
        &g.mul(
            &g.commutator(&g.mul(&a1, &a2), &bb),
            &g.inv(&g.commutator(&a1, &bb)),
        ),
        &g.inv(&g.commutator(&a2, &bb)),
    );
    report("AC9a", lhs == rhs, "n=2: [a1,[a2,b]] = [a1a2,b][a1,b]⁻¹[a2,b]⁻¹ exactly");

    // ≥ 10³ random commuting tuples, n ≤ 3, per group.
    let mut state = 0x2545f4914f6cdd1du64;
    let mut rnd = move |m: usize| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) as usize % m
    };
    for (fam, n, spec) in [
        (Family::Sl, 3, "unram(p=3,m=1,h=2)"),
        (Family::Sp4, 4, "unram(p=3,m=1,h=2)"),
    ] {
        let g = group(fam, n, spec, &[]);
        let a = Root(vec![1, 0]);
        let b = Root(vec![0, 1]);
        let avals = g.window_values(&a);
        let bvals = g.window_values(&b);
        let mut runs = 0;
        for _ in 0..1_100 {
            let size = 1 + rnd(3);
            let tuple: Vec<_> = (0..size)
                .map(|_| g.root_element(&a, &avals[rnd(avals.len())]).unwrap())
                .collect();
            let target = g.root_element(&b, &bvals[rnd(bvals.len())]).unwrap();
            assert!(g.nested_commutator_check(&tuple, &target).unwrap());
            runs += 1;
        }
        report(
            "AC9b",
            runs >= 1_000,
            &format!("{:?}: {} random commuting tuples verified", fam, runs),
        );
    }
}

#[test]
fn ac10_axiom_order_counting() {
    let third = Rational::new(1, 3);
    let half = Rational::new(1, 2);
    for spec in ["unram(p=3,m=1,h=2)", "equichar(p=3,m=1,h=2)"] {
        for (label, n, f) in [
            ("GL2 maximal", 2usize, vec![]),
            ("GL2 Iwahori", 2, vec![half]),
            ("GL3 maximal", 3, vec![Rational::from_integer(0), Rational::from_integer(0)]),
            ("GL3 Iwahori", 3, vec![third, third]),
            ("GL3 r=(1/2,1/2)", 3, vec![half, half]),
        ] {
            let g = group(Family::Gl, n, spec, &f);
            let rep = g.axiom_report(u64::MAX / 2).unwrap();
            let fails: Vec<_> = rep
                .failures()
                .map(|e| format!("{} {}", e.id, e.witness))
                .collect();
            // |U_α| sizes match the Ψ-membership prediction.
            let q = g.residue_q();
            let h = g.depth();
            let sizes_ok = g.system.roots.clone().iter().all(|r| {
                let size = g.u_filtration(r, g.f0.value(r)).len() as u64;
                size == if g.psi.contains(r) { q.pow(h) } else { q.pow(h - 1) }
            });
            report(
                "AC10",
                fails.is_empty() && sizes_ok,
                &format!("{} over {}: {} axiom instances", label, spec, rep.entries.len()),
            );
        }
    }
}

#[test]
fn ac11_induced_ring_independent_of_unit_choice() {
    let small_rings = [
        "unram(p=3,m=1,h=2)",
        "unram(p=3,m=1,h=3)",
        "equichar(p=3,m=1,h=2)",
        "equichar(p=3,m=1,h=3)",
        "ram(p=3,e=2,c=1,h=3)",
        "ram(p=3,e=2,c=2,h=3)",
    ];
    let alpha = Root(vec![1]);
    for spec in small_rings {
        let g = group(Family::Gl, 2, spec, &[]);
        let base = ring(spec);
        let mut count = 0;
        for x in g.ring.units() {
            let u1 = g.root_element(&alpha, &x).unwrap();
            let induced = g.induced_ring(&alpha, &u1).unwrap();
            assert!(
                identify(&base, &induced.table, DEFAULT_ISO_CAP)
                    .unwrap()
                    .is_some(),
                "{} u1={:?}",
                spec,
                x
            );
            count += 1;
        }
        report(
            "AC11",
            true,
            &format!("{}: all {} valuation-0 choices give isomorphic rings", spec, count),
        );
    }
}

#[test]
fn tagged_ops_are_available_for_downstream_checks() {
    // Smoke check that the precision calculus exposed to the CLI behaves.
    let r = ring("unram(p=3,m=1,h=3)");
    let ops = TaggedOps { ring: &r };
    let two = ops.from_int(2);
    let half = ops.from_rational(Rational::new(1, 2)).unwrap();
    assert!(ops.eq(&ops.mul(&two, &half), &ops.from_int(1)));
}
