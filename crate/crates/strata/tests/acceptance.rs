//! Acceptance gate: one test (and one printed pass/fail line) per
//! top-level criterion. Run with `--nocapture` to see the lines on
//! success; the harness's own per-test ok/FAILED output mirrors them.

use num_rational::Ratio;
use strata::connectivity::{
    build_boundary_complex, genus1_index_walk, is_connected, path_vertical_to_dhirr,
    verify_certificate, Mode,
};
use strata::ends::count_ends;
use strata::enumerate::{enumerate_horizontal_divisors, enumerate_vertical_divisors, Caps};
use strata::graph::{DivisorKind, LevelGraph};
use strata::stratum::{
    cusp_count_formula, cusp_count_oracle, ComponentLabel, CuspQuery, IndexClass, Signature,
};

fn sig(g: u32, m: &[i64]) -> Signature {
    Signature::new(g, m.to_vec()).unwrap()
}

/// All genus-0 signatures with n parts, entries in [-bound, bound] \ {0},
/// summing to -2 (non-decreasing to avoid label permutations).
fn genus0_signatures(n: usize, bound: i64) -> Vec<Signature> {
    let mut out = Vec::new();
    let mut parts = vec![0i64; n];
    fn rec(parts: &mut Vec<i64>, i: usize, min: i64, bound: i64, out: &mut Vec<Signature>) {
        if i == parts.len() {
            if parts.iter().sum::<i64>() == -2 {
                if let Ok(s) = Signature::new(0, parts.clone()) {
                    out.push(s);
                }
            }
            return;
        }
        for v in min..=bound {
            if v == 0 {
                continue;
            }
            parts[i] = v;
            rec(parts, i + 1, v, bound, out);
        }
    }
    rec(&mut parts, 0, -bound, bound, &mut out);
    out
}

#[test]
fn criterion_1_low_dimensional_ends() {
    for n in 1..=3 {
        for s in genus0_signatures(n, 6) {
            let r = count_ends(&s, &ComponentLabel::Genus0, false).unwrap();
            assert_eq!(r.count, 0, "expected 0 ends for {:?}", s.orders());
        }
    }
    let four_pointed = genus0_signatures(4, 6);
    assert!(!four_pointed.is_empty());
    for s in four_pointed {
        let r = count_ends(&s, &ComponentLabel::Genus0, false).unwrap();
        assert_eq!(r.count, 3, "expected 3 ends for {:?}", s.orders());
    }
    println!("PASS [1] genus-0 ends: 0 for n <= 3, 3 for n = 4");
}

#[test]
fn criterion_2_modular_curve_ends() {
    for m in 1..=12i64 {
        for r in (1..m).filter(|r| m % r == 0) {
            let s = sig(1, &[m, -m]);
            let report = count_ends(&s, &ComponentLabel::Genus1Rotation(r), false).unwrap();
            let oracle = cusp_count_oracle(CuspQuery::new(m / r).unwrap());
            assert_eq!(report.count, oracle, "ends mismatch for H_1({m},-{m}) r={r}");
        }
    }
    let mut exceptions = Vec::new();
    for level in 2..=48i64 {
        let f = cusp_count_formula(level, 1).unwrap();
        let o = cusp_count_oracle(CuspQuery::new(level).unwrap());
        if f != Ratio::from_integer(o) {
            exceptions.push(level);
        } else if level >= 5 {
            assert!(f.is_integer());
        }
    }
    assert_eq!(exceptions, vec![2, 4], "formula exceptions differ");
    println!("PASS [2] modular-curve ends match the orbit oracle; formula exceptions only at levels 2 and 4");
}

const CONNECTIVITY_STRATA: &[(u32, &[i64])] = &[
    (2, &[2]),
    (2, &[1, 1]),
    (1, &[2, -1, -1]),
    (1, &[3, -1, -2]),
    (0, &[2, -1, -1, -1, -1]),
    (0, &[1, 1, -1, -1, -1, -1]),
];

#[test]
fn criterion_3_certified_complexes_connected() {
    for &(g, m) in CONNECTIVITY_STRATA {
        let s = sig(g, m);
        let c = build_boundary_complex(&s, &Caps::default(), Mode::Certified).unwrap();
        let report = is_connected(&c);
        assert!(
            report.connected,
            "H_{g}({m:?}) complex disconnected: {} components",
            report.components
        );
    }
    println!("PASS [3] certified coarse boundary complexes connected for all six sample strata");
}

#[test]
fn criterion_4_certificate_soundness() {
    let mut checked = 0;
    for &(g, m) in CONNECTIVITY_STRATA.iter().filter(|&&(g, _)| g >= 1) {
        let s = sig(g, m);
        for d in &enumerate_vertical_divisors(&s, &Caps::default()).divisors {
            let cert = path_vertical_to_dhirr(&s, d).unwrap();
            assert!(
                cert.move_count() <= 4,
                "H_{g}({m:?}): certificate uses {} moves",
                cert.move_count()
            );
            let report = verify_certificate(&s, &cert);
            assert!(report.ok, "H_{g}({m:?}): {:?}", report.first_failure);
            checked += 1;
        }
    }
    assert!(checked > 0);
    println!("PASS [4] all {checked} vertical divisors reach the irreducible horizontal divisor in <= 4 verified moves");
}

const HOLOMORPHIC_STRATA: &[(u32, &[i64])] =
    &[(2, &[1, 1]), (2, &[2]), (3, &[4]), (3, &[2, 2])];

#[test]
fn criterion_5_no_separating_horizontal_in_holomorphic_samples() {
    for &(g, m) in HOLOMORPHIC_STRATA {
        let s = sig(g, m);
        let horiz = enumerate_horizontal_divisors(&s);
        assert!(
            horiz.iter().all(|d| d.kind != DivisorKind::HorizontalSeparating),
            "H_{g}({m:?}) has a separating horizontal divisor"
        );
        assert!(
            horiz.iter().any(|d| d.kind == DivisorKind::HorizontalIrreducible),
            "H_{g}({m:?}) lacks the irreducible horizontal divisor"
        );
    }
    println!("PASS [5] holomorphic samples: zero separating horizontal divisors, irreducible one present");
}

fn structural_invariants(s: &Signature, graph: &LevelGraph) {
    let ctx = format!("H_{}({:?}) graph {}", s.genus(), s.orders(), graph.canonical_form());
    // per-vertex degree identity
    for v in 0..graph.vertices.len() {
        let deg: i64 = graph.incident_orders(v).iter().sum();
        assert_eq!(deg, 2 * graph.vertices[v].genus as i64 - 2, "degree at v{v} in {ctx}");
    }
    // genus identity: total genus (vertex genera plus h1) equals g
    assert_eq!(s.genus() as i64, graph.genus_total(), "genus identity in {ctx}");
    // edge-order pairing
    for e in &graph.edges {
        assert_eq!(e.order_a + e.order_b, -2, "pairing in {ctx}");
    }
    // genus-0 top vertices carry a pole leg
    let top = *graph.levels().iter().max().unwrap();
    for (v, vert) in graph.vertices.iter().enumerate() {
        if vert.level == top && vert.genus == 0 {
            assert!(
                graph.legs.iter().any(|l| l.vertex == v && l.order < 0),
                "genus-0 top vertex v{v} without pole leg in {ctx}"
            );
        }
    }
}

#[test]
fn criterion_6_structural_invariants_exhaustive() {
    let mut strata: Vec<(u32, Vec<i64>)> = CONNECTIVITY_STRATA
        .iter()
        .chain(HOLOMORPHIC_STRATA)
        .map(|&(g, m)| (g, m.to_vec()))
        .collect();
    strata.dedup();
    let mut graphs = 0;
    for (g, m) in strata {
        let s = sig(g, &m);
        let vert = enumerate_vertical_divisors(&s, &Caps::default());
        assert!(vert.exhaustive);
        let dim_ge_2 = s.projective_dimension() >= 2;
        for d in vert.divisors.iter().chain(enumerate_horizontal_divisors(&s).iter()) {
            structural_invariants(&s, &d.graph);
            // a two-vertex vertical divisor with both vertices of genus
            // zero has positive dimension, so some vertex supports at
            // least four special points
            if dim_ge_2
                && d.kind == DivisorKind::Vertical
                && d.graph.vertices.len() == 2
                && d.graph.vertices.iter().all(|v| v.genus == 0)
            {
                assert!(
                    (0..2).any(|v| d.graph.valence(v) >= 4),
                    "genus-0 two-vertex divisor without valence->=4 vertex in H_{g}({m:?})"
                );
            }
            graphs += 1;
        }
    }
    println!("PASS [6] structural invariants hold for all {graphs} enumerated boundary graphs");
}

#[test]
fn criterion_7_oracle_dominance() {
    for &(g, m) in &[(1u32, &[2i64, -1, -1][..]), (0, &[2, -1, -1, -1, -1])] {
        let s = sig(g, m);
        let certified = build_boundary_complex(&s, &Caps::default(), Mode::Certified).unwrap();
        let oracle = build_boundary_complex(&s, &Caps::default(), Mode::Oracle).unwrap();
        assert!(oracle.exhaustive);
        for key in certified.edges.keys() {
            assert!(
                oracle.edges.contains_key(key),
                "certified edge {key:?} missing from oracle in H_{g}({m:?})"
            );
        }
        assert!(is_connected(&certified).connected);
        assert!(is_connected(&oracle).connected);
    }
    println!("PASS [7] certified edges are a subset of the exhaustive oracle edges; both complexes connected");
}

#[test]
fn criterion_8_index_walks() {
    for &(m, from, to) in &[([4i64, 4, -8], 3i64, 1i64), ([6, 6, -12], 5, 1)] {
        let s = sig(1, &m);
        let d = s.order_gcd();
        let cert = genus1_index_walk(
            &s,
            IndexClass::new(from, d).unwrap(),
            IndexClass::new(to, d).unwrap(),
        )
        .unwrap();
        for step in &cert.steps {
            step.divisor.graph.validate(&s).unwrap();
        }
        let (first, last) = cert.endpoints().unwrap();
        assert_eq!(first.decoration, last.decoration, "endpoint decorations differ");
        assert!(verify_certificate(&s, &cert).ok);
    }
    // rotation mismatch: I=2 has rotation 2, I=1 has rotation 1
    let s = sig(1, &[4, 4, -8]);
    assert!(genus1_index_walk(
        &s,
        IndexClass::new(2, 4).unwrap(),
        IndexClass::new(1, 4).unwrap()
    )
    .is_err());
    println!("PASS [8] index walks verified on H_1(4,4,-8) and H_1(6,6,-12); rotation mismatch rejected");
}

#[test]
fn criterion_9_coarse_markers() {
    let s = sig(1, &[2, -1, -1]);
    let c = build_boundary_complex(&s, &Caps::default(), Mode::Certified).unwrap();
    assert!(c.coarse, "complex not flagged coarse");

    let s = sig(2, &[2]);
    let r = count_ends(&s, &ComponentLabel::HigherGenusOpaque("any".into()), false).unwrap();
    assert!(r.method.contains("coarse"), "ends report not flagged coarse: {}", r.method);
    println!("PASS [9] reports carry explicit coarse markers; refined census out of scope by design");
}
