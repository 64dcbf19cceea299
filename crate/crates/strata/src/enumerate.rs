//! Exhaustive enumeration of boundary graphs for a stratum.
//!
//! The engine searches over leg partitions, genus assignments, level
//! placements and integer solutions of the per-vertex degree
//! equations, deduplicating through canonical forms. Vertical
//! divisors use two levels and no horizontal edges; the codimension-2
//! oracle graphs use up to three levels and up to two horizontal
//! edges.

use crate::graph::{
    BoundaryDivisor, Classification, DivisorKind, Edge, Leg, LevelGraph, Vertex,
};
use crate::stratum::Signature;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_vertices: usize,
    pub max_edges: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_vertices: 6, max_edges: 10 }
    }
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub graphs: Vec<LevelGraph>,
    /// False when the caps clipped the search space; partial results
    /// are still returned.
    pub exhaustive: bool,
}

#[derive(Debug, Clone)]
pub struct DivisorEnumeration {
    pub divisors: Vec<BoundaryDivisor>,
    pub exhaustive: bool,
}

/// Stability plus the genus identity bound the vertex count by
/// n + 2g - 2; edges follow from the Betti number.
fn vertex_bound(sig: &Signature, num_levels: usize) -> usize {
    let b = sig.n() as i64 + 2 * sig.genus() as i64 - 2;
    (b.max(0) as usize).max(num_levels)
}

fn edge_bound(sig: &Signature, v_bound: usize) -> usize {
    v_bound - 1 + sig.genus() as usize
}

/// All validated connected level graphs for `sig` with exactly
/// `num_levels` occupied levels and exactly `num_horizontal`
/// horizontal edges, up to canonical form, sorted by encoding.
pub fn enumerate_level_graphs(
    sig: &Signature,
    num_levels: usize,
    num_horizontal: usize,
    caps: &Caps,
) -> Enumeration {
    let g = sig.genus() as i64;
    let n = sig.n();
    let v_bound = vertex_bound(sig, num_levels);
    let e_bound = edge_bound(sig, v_bound);
    let exhaustive = caps.max_vertices >= v_bound && caps.max_edges >= e_bound;

    let mut found: BTreeMap<String, LevelGraph> = BTreeMap::new();

    for v_count in num_levels.max(1)..=caps.max_vertices.min(v_bound) {
        for level_counts in compositions(v_count, num_levels) {
            // vertices 0..c0 at level 0, next c1 at level -1, ...
            let mut levels = Vec::with_capacity(v_count);
            for (li, &c) in level_counts.iter().enumerate() {
                for _ in 0..c {
                    levels.push(-(li as i32));
                }
            }
            for leg_assignment in counter(v_count, n) {
                let mut legsum = vec![0i64; v_count];
                for (i, &v) in leg_assignment.iter().enumerate() {
                    legsum[v] += sig.orders()[i];
                }
                for genus_vec in genus_vectors(v_count, g) {
                    let sum_g: i64 = genus_vec.iter().sum();
                    let e_total = v_count as i64 - 1 + (g - sum_g);
                    if e_total < num_horizontal as i64
                        || e_total > caps.max_edges as i64
                    {
                        continue;
                    }
                    let e_vert = (e_total as usize) - num_horizontal;
                    let t_base: Vec<i64> = (0..v_count)
                        .map(|v| 2 * genus_vec[v] - 2 - legsum[v])
                        .collect();
                    let bottom_level = -(num_levels as i32 - 1);
                    let slack = 2 * num_horizontal as i64;
                    let infeasible = (0..v_count).any(|v| {
                        (levels[v] == 0 && t_base[v] + slack < 0)
                            || (levels[v] == bottom_level && t_base[v] > 0)
                    });
                    if infeasible {
                        continue;
                    }
                    emit_edge_configs(
                        sig,
                        &levels,
                        &genus_vec,
                        &leg_assignment,
                        &t_base,
                        e_vert,
                        num_horizontal,
                        &mut found,
                    );
                }
            }
        }
    }
    Enumeration { graphs: found.into_values().collect(), exhaustive }
}

#[allow(clippy::too_many_arguments)]
fn emit_edge_configs(
    sig: &Signature,
    levels: &[i32],
    genus_vec: &[i64],
    leg_assignment: &[usize],
    t_base: &[i64],
    e_vert: usize,
    num_horizontal: usize,
    found: &mut BTreeMap<String, LevelGraph>,
) {
    let v_count = levels.len();
    let vert_slots: Vec<(usize, usize)> = (0..v_count)
        .flat_map(|i| (0..v_count).map(move |j| (i, j)))
        .filter(|&(i, j)| levels[i] > levels[j])
        .collect();
    let horiz_slots: Vec<(usize, usize)> = (0..v_count)
        .flat_map(|i| (i..v_count).map(move |j| (i, j)))
        .filter(|&(i, j)| levels[i] == levels[j])
        .collect();

    // horizontal edges first (at most two of them)
    for h_multiset in multisets(horiz_slots.len(), num_horizontal) {
        let mut h_edges: Vec<(usize, usize)> = Vec::new();
        for (si, &count) in h_multiset.iter().enumerate() {
            for _ in 0..count {
                h_edges.push(horiz_slots[si]);
            }
        }
        let mut targets = t_base.to_vec();
        for &(i, j) in &h_edges {
            targets[i] += 1;
            targets[j] += 1;
        }
        // lower-end degree cap for bottom-most vertices
        let bottom_level = *levels.iter().min().unwrap();
        let deg_cap: Vec<usize> = (0..v_count)
            .map(|v| {
                if levels[v] == bottom_level {
                    if targets[v] > 0 {
                        0
                    } else {
                        ((-targets[v]) / 2) as usize
                    }
                } else {
                    e_vert
                }
            })
            .collect();
        let mut deg = vec![0usize; v_count];
        let mut chosen: Vec<usize> = vec![0; vert_slots.len()];
        distribute_vertical(
            &vert_slots,
            0,
            e_vert,
            &mut deg,
            &deg_cap,
            &mut chosen,
            &mut |counts| {
                let mut v_edges: Vec<(usize, usize)> = Vec::new();
                for (si, &count) in counts.iter().enumerate() {
                    for _ in 0..count {
                        v_edges.push(vert_slots[si]);
                    }
                }
                if !edges_connect(v_count, &v_edges, &h_edges) {
                    return;
                }
                solve_and_emit(
                    sig,
                    levels,
                    genus_vec,
                    leg_assignment,
                    &targets,
                    &v_edges,
                    &h_edges,
                    found,
                );
            },
        );
    }
}

fn distribute_vertical(
    slots: &[(usize, usize)],
    idx: usize,
    remaining: usize,
    deg: &mut Vec<usize>,
    deg_cap: &[usize],
    chosen: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if idx == slots.len() {
        if remaining == 0 {
            emit(chosen);
        }
        return;
    }
    let (i, j) = slots[idx];
    let max_here = remaining
        .min(deg_cap[i].saturating_sub(deg[i]))
        .min(deg_cap[j].saturating_sub(deg[j]));
    for c in 0..=max_here {
        chosen[idx] = c;
        deg[i] += c;
        deg[j] += c;
        distribute_vertical(slots, idx + 1, remaining - c, deg, deg_cap, chosen, emit);
        deg[i] -= c;
        deg[j] -= c;
    }
    chosen[idx] = 0;
}

fn edges_connect(
    v_count: usize,
    v_edges: &[(usize, usize)],
    h_edges: &[(usize, usize)],
) -> bool {
    if v_count == 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..v_count).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for &(a, b) in v_edges.iter().chain(h_edges) {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let root = find(&mut parent, 0);
    (1..v_count).all(|v| find(&mut parent, v) == root)
}

/// Backtracks over the upper-end orders of the vertical edges,
/// processing edges from the highest upper level down so that each
/// upper vertex has all of its lower contributions settled before
/// its own budget is spent.
#[allow(clippy::too_many_arguments)]
fn solve_and_emit(
    sig: &Signature,
    levels: &[i32],
    genus_vec: &[i64],
    leg_assignment: &[usize],
    targets: &[i64],
    v_edges: &[(usize, usize)],
    h_edges: &[(usize, usize)],
    found: &mut BTreeMap<String, LevelGraph>,
) {
    let v_count = levels.len();
    let mut order: Vec<usize> = (0..v_edges.len()).collect();
    order.sort_by_key(|&e| -levels[v_edges[e].0]);

    let mut rem_upper = vec![0usize; v_count];
    let mut rem_lower = vec![0usize; v_count];
    for &(i, j) in v_edges {
        rem_upper[i] += 1;
        rem_lower[j] += 1;
    }
    let mut residual: Vec<i64> = targets.to_vec();
    let mut orders = vec![0i64; v_edges.len()];

    fn feasible(residual: i64, ru: usize, rl: usize) -> bool {
        match (ru, rl) {
            (0, 0) => residual == 0,
            (_, 0) => residual >= 0,
            (0, _) => residual <= -2 * rl as i64,
            _ => true,
        }
    }

    fn rec(
        pos: usize,
        order: &[usize],
        v_edges: &[(usize, usize)],
        rem_upper: &mut Vec<usize>,
        rem_lower: &mut Vec<usize>,
        residual: &mut Vec<i64>,
        orders: &mut Vec<i64>,
        done: &mut dyn FnMut(&[i64]),
    ) {
        if pos == order.len() {
            if residual.iter().all(|&r| r == 0) {
                done(orders);
            }
            return;
        }
        let e = order[pos];
        let (i, j) = v_edges[e];
        // all lower ends at i are settled by the processing order
        debug_assert_eq!(rem_lower[i], 0);
        if residual[i] < 0 {
            return;
        }
        rem_upper[i] -= 1;
        rem_lower[j] -= 1;
        for u in 0..=residual[i] {
            orders[e] = u;
            residual[i] -= u;
            residual[j] += 2 + u;
            if feasible(residual[i], rem_upper[i], rem_lower[i])
                && feasible(residual[j], rem_upper[j], rem_lower[j])
            {
                rec(pos + 1, order, v_edges, rem_upper, rem_lower, residual, orders, done);
            }
            residual[i] += u;
            residual[j] -= 2 + u;
        }
        rem_upper[i] += 1;
        rem_lower[j] += 1;
    }

    let vertices: Vec<Vertex> = (0..v_count)
        .map(|v| Vertex { genus: genus_vec[v] as u32, level: levels[v] })
        .collect();
    let legs: Vec<Leg> = leg_assignment
        .iter()
        .enumerate()
        .map(|(p, &v)| Leg { point: p as u32 + 1, order: sig.orders()[p], vertex: v })
        .collect();

    rec(
        0,
        &order,
        v_edges,
        &mut rem_upper,
        &mut rem_lower,
        &mut residual,
        &mut orders,
        &mut |solution| {
            let mut edges: Vec<Edge> = v_edges
                .iter()
                .zip(solution)
                .map(|(&(i, j), &u)| Edge { a: i, order_a: u, b: j, order_b: -2 - u })
                .collect();
            edges.extend(
                h_edges
                    .iter()
                    .map(|&(i, j)| Edge { a: i, order_a: -1, b: j, order_b: -1 }),
            );
            let graph = LevelGraph { vertices: vertices.clone(), legs: legs.clone(), edges };
            if graph.validate(sig).is_ok() {
                let canon = graph.canonicalized();
                found.entry(canon.canonical_form()).or_insert(canon);
            }
        },
    );
}

/// All two-level no-horizontal-edge boundary divisors, sorted by
/// canonical encoding.
pub fn enumerate_vertical_divisors(sig: &Signature, caps: &Caps) -> DivisorEnumeration {
    let enumeration = enumerate_level_graphs(sig, 2, 0, caps);
    let divisors = enumeration
        .graphs
        .into_iter()
        .filter(|g| g.classify() == Classification::Divisor(DivisorKind::Vertical))
        .map(|graph| BoundaryDivisor { graph, kind: DivisorKind::Vertical, decoration: None })
        .collect();
    DivisorEnumeration { divisors, exhaustive: enumeration.exhaustive }
}

/// The single-vertex loop graph of the irreducible type horizontal
/// divisor, when it exists (g >= 1 and the vertex is stable).
pub fn irreducible_horizontal_graph(sig: &Signature) -> Option<LevelGraph> {
    if sig.genus() == 0 {
        return None;
    }
    let graph = LevelGraph {
        vertices: vec![Vertex { genus: sig.genus() - 1, level: 0 }],
        legs: sig
            .orders()
            .iter()
            .enumerate()
            .map(|(i, &m)| Leg { point: i as u32 + 1, order: m, vertex: 0 })
            .collect(),
        edges: vec![Edge { a: 0, order_a: -1, b: 0, order_b: -1 }],
    };
    if graph.validate(sig).is_ok() {
        Some(graph.canonicalized())
    } else {
        None
    }
}

/// Horizontal boundary divisors: the unique irreducible loop graph
/// (iff g >= 1) and every separating split (g_1, mu_1 | g_2, mu_2)
/// with sum(mu_1) = 2 g_1 - 1 that passes validation.
pub fn enumerate_horizontal_divisors(sig: &Signature) -> Vec<BoundaryDivisor> {
    let mut found: BTreeMap<String, BoundaryDivisor> = BTreeMap::new();
    if let Some(graph) = irreducible_horizontal_graph(sig) {
        found.insert(
            graph.canonical_form(),
            BoundaryDivisor {
                graph,
                kind: DivisorKind::HorizontalIrreducible,
                decoration: None,
            },
        );
    }
    let n = sig.n();
    let g = sig.genus() as i64;
    // subsets of legs for side 1, paired with a genus split
    for mask in 1..(1u64 << n) - 1 {
        let side1: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let sum1: i64 = side1.iter().map(|&i| sig.orders()[i]).sum();
        // parity constraint: sum(mu_1) = 2 g_1 - 1
        if (sum1 + 1) % 2 != 0 {
            continue;
        }
        let g1 = (sum1 + 1) / 2;
        if g1 < 0 || g1 > g {
            continue;
        }
        let g2 = g - g1;
        let graph = LevelGraph {
            vertices: vec![
                Vertex { genus: g1 as u32, level: 0 },
                Vertex { genus: g2 as u32, level: 0 },
            ],
            legs: sig
                .orders()
                .iter()
                .enumerate()
                .map(|(i, &m)| Leg {
                    point: i as u32 + 1,
                    order: m,
                    vertex: if mask >> i & 1 == 1 { 0 } else { 1 },
                })
                .collect(),
            edges: vec![Edge { a: 0, order_a: -1, b: 1, order_b: -1 }],
        };
        if graph.validate(sig).is_ok() {
            let canon = graph.canonicalized();
            found.entry(canon.canonical_form()).or_insert(BoundaryDivisor {
                graph: canon,
                kind: DivisorKind::HorizontalSeparating,
                decoration: None,
            });
        }
    }
    found.into_values().collect()
}

// --- small combinatorial iterators ---

/// Compositions of `total` into `parts` positive parts.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            if total >= 1 {
                prefix.push(total);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        for first in 1..=total.saturating_sub(parts - 1) {
            prefix.push(first);
            rec(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts >= 1 && total >= parts {
        rec(total, parts, &mut Vec::new(), &mut out);
    }
    out
}

/// All functions {0..len-1} -> {0..base-1}, as vectors.
fn counter(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; len];
    loop {
        out.push(current.clone());
        let mut i = 0;
        loop {
            if i == len {
                return out;
            }
            current[i] += 1;
            if current[i] < base {
                break;
            }
            current[i] = 0;
            i += 1;
        }
    }
}

/// Non-negative integer vectors of length `len` with sum at most `max_sum`.
fn genus_vectors(len: usize, max_sum: i64) -> Vec<Vec<i64>> {
    fn rec(len: usize, budget: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if len == 0 {
            out.push(prefix.clone());
            return;
        }
        for v in 0..=budget {
            prefix.push(v);
            rec(len - 1, budget - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, max_sum, &mut Vec::new(), &mut out);
    out
}

/// Multisets of size `count` over `slots` items, as per-slot counts.
fn multisets(slots: usize, count: usize) -> Vec<Vec<usize>> {
    fn rec(slots: usize, count: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 0 {
            if count == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for c in 0..=count {
            prefix.push(c);
            rec(slots - 1, count - c, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if slots == 0 && count == 0 {
        out.push(Vec::new());
    } else {
        rec(slots, count, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Classification;

    fn sig(g: u32, m: &[i64]) -> Signature {
        Signature::new(g, m.to_vec()).unwrap()
    }

    fn contains_graph(div: &DivisorEnumeration, g: &LevelGraph) -> bool {
        let key = g.canonical_form();
        div.divisors.iter().any(|d| d.graph.canonical_form() == key)
    }

    #[test]
    fn vertical_h2_11_contains_merge_zeroes_shape() {
        let s = sig(2, &[1, 1]);
        let result = enumerate_vertical_divisors(&s, &Caps::default());
        assert!(result.exhaustive);
        let expected = LevelGraph {
            vertices: vec![
                Vertex { genus: 2, level: 0 },
                Vertex { genus: 0, level: -1 },
            ],
            legs: vec![
                Leg { point: 1, order: 1, vertex: 1 },
                Leg { point: 2, order: 1, vertex: 1 },
            ],
            edges: vec![Edge { a: 0, order_a: 2, b: 1, order_b: -4 }],
        };
        assert!(contains_graph(&result, &expected));
    }

    #[test]
    fn vertical_h1_2m1m1() {
        let s = sig(1, &[2, -1, -1]);
        let result = enumerate_vertical_divisors(&s, &Caps::default());
        assert!(result.exhaustive);
        // {top g=0 legs(-1,-1); bottom g=0 legs(2); two edges (0,-2)}
        let two_edge = LevelGraph {
            vertices: vec![
                Vertex { genus: 0, level: 0 },
                Vertex { genus: 0, level: -1 },
            ],
            legs: vec![
                Leg { point: 1, order: 2, vertex: 1 },
                Leg { point: 2, order: -1, vertex: 0 },
                Leg { point: 3, order: -1, vertex: 0 },
            ],
            edges: vec![
                Edge { a: 0, order_a: 0, b: 1, order_b: -2 },
                Edge { a: 0, order_a: 0, b: 1, order_b: -2 },
            ],
        };
        assert!(contains_graph(&result, &two_edge));
        // the genus-1-bottom degeneration of the same stratum
        let one_edge = LevelGraph {
            vertices: vec![
                Vertex { genus: 0, level: 0 },
                Vertex { genus: 1, level: -1 },
            ],
            legs: vec![
                Leg { point: 1, order: 2, vertex: 1 },
                Leg { point: 2, order: -1, vertex: 0 },
                Leg { point: 3, order: -1, vertex: 0 },
            ],
            edges: vec![Edge { a: 0, order_a: 0, b: 1, order_b: -2 }],
        };
        assert!(contains_graph(&result, &one_edge));
        // besides these two there are exactly two more: a genus-1 top
        // vertex carrying no legs joined by an order-(0,-2) edge to the
        // bottom, and its three-vertex variant with the poles split off
        // onto a second top vertex
        assert_eq!(result.divisors.len(), 4);
    }

    #[test]
    fn every_enumerated_graph_validates_and_is_unique() {
        for (g, m) in [
            (2u32, vec![1i64, 1]),
            (2, vec![2]),
            (1, vec![2, -1, -1]),
            (1, vec![3, -1, -2]),
            (0, vec![2, -1, -1, -1, -1]),
        ] {
            let s = sig(g, &m);
            let result = enumerate_vertical_divisors(&s, &Caps::default());
            let mut seen = std::collections::HashSet::new();
            for d in &result.divisors {
                d.graph.validate(&s).unwrap();
                assert!(seen.insert(d.graph.canonical_form()), "duplicate in {m:?}");
                assert_eq!(d.graph.classify(), Classification::Divisor(DivisorKind::Vertical));
            }
        }
    }

    #[test]
    fn holomorphic_strata_have_no_genus0_top_vertices() {
        for (g, m) in [(2u32, vec![1i64, 1]), (2, vec![2]), (3, vec![4])] {
            let s = sig(g, &m);
            let result = enumerate_vertical_divisors(&s, &Caps::default());
            for d in &result.divisors {
                for (v, vert) in d.graph.vertices.iter().enumerate() {
                    if vert.level == 0 && vert.genus == 0 {
                        // must carry a pole leg
                        let has_pole_leg = d
                            .graph
                            .legs
                            .iter()
                            .any(|l| l.vertex == v && l.order < 0);
                        assert!(has_pole_leg, "genus-0 top vertex without pole");
                    }
                }
            }
        }
    }

    #[test]
    fn horizontal_h2_11_irreducible_only() {
        let s = sig(2, &[1, 1]);
        let divisors = enumerate_horizontal_divisors(&s);
        assert_eq!(divisors.len(), 1);
        assert_eq!(divisors[0].kind, DivisorKind::HorizontalIrreducible);
    }

    #[test]
    fn horizontal_h1_3_m1_m2() {
        let s = sig(1, &[3, -1, -2]);
        let divisors = enumerate_horizontal_divisors(&s);
        let irr: Vec<_> = divisors
            .iter()
            .filter(|d| d.kind == DivisorKind::HorizontalIrreducible)
            .collect();
        let sep: Vec<_> = divisors
            .iter()
            .filter(|d| d.kind == DivisorKind::HorizontalSeparating)
            .collect();
        assert_eq!(irr.len(), 1);
        assert_eq!(irr[0].graph.vertices[0].genus, 0);
        // exactly one separating split: {g=0, (-1)} | {g=1, (3, -2)}
        assert_eq!(sep.len(), 1);
        let genera: Vec<u32> = sep[0].graph.vertices.iter().map(|v| v.genus).collect();
        assert!(genera.contains(&0) && genera.contains(&1));
    }

    #[test]
    fn horizontal_genus0_has_no_irreducible() {
        let s = sig(0, &[2, -1, -1, -1, -1]);
        let divisors = enumerate_horizontal_divisors(&s);
        assert!(divisors
            .iter()
            .all(|d| d.kind != DivisorKind::HorizontalIrreducible));
    }

    #[test]
    fn determinism() {
        let s = sig(1, &[3, -1, -2]);
        let a = enumerate_vertical_divisors(&s, &Caps::default());
        let b = enumerate_vertical_divisors(&s, &Caps::default());
        let keys = |e: &DivisorEnumeration| {
            e.divisors.iter().map(|d| d.graph.canonical_form()).collect::<Vec<_>>()
        };
        assert_eq!(keys(&a), keys(&b));
    }

    #[test]
    fn caps_flag_non_exhaustive() {
        let s = sig(2, &[1, 1]);
        let result =
            enumerate_vertical_divisors(&s, &Caps { max_vertices: 2, max_edges: 2 });
        assert!(!result.exhaustive);
    }
}
