//! Degeneration and undegeneration moves as validated graph rewrites.
//!
//! Each move returns the rewritten graph, and where relevant the
//! deeper (codimension-2) witness certifying that two divisors
//! intersect. Undegenerations come in two flavours: collapsing a
//! level transition (contracting the edges between two adjacent
//! levels) and smoothing a horizontal edge.

use crate::enumerate::irreducible_horizontal_graph;
use crate::graph::{
    BoundaryDivisor, Classification, DivisorKind, Edge, LevelGraph, ValidationError, Vertex,
};
use crate::stratum::Signature;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("signature has fewer than two zeroes")]
    TooFewZeroes,
    #[error("genus-0 dual graphs cannot contain loops")]
    GenusZero,
    #[error("vertex {0} has genus 0, cannot lose a handle")]
    GenusTooSmall(usize),
    #[error("cannot rule out residue conditions at vertex {0}; move refused")]
    ResidueConditionsPossible(usize),
    #[error("graph is not a divisor of the expected kind")]
    NotADivisor,
    #[error("vertex is alone at its level")]
    LoneVertexAtLevel,
    #[error("no level transition below level {0}")]
    NoSuchTransition(i32),
    #[error("precondition failed: {0}")]
    PreconditionFail(String),
    #[error("rewritten graph failed validation: {0}")]
    Validation(#[from] ValidationError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveAudit {
    pub name: String,
    pub params: String,
}

/// The outcome of a move: the rewritten graph, an optional
/// codimension-2 witness, and when the witness links two divisors,
/// the pair it links.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveResult {
    pub result: LevelGraph,
    pub witness: Option<LevelGraph>,
    pub links: Option<(LevelGraph, LevelGraph)>,
    pub audit: MoveAudit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

/// The vertical divisor that merges all zeroes to a genus-0 bottom
/// vertex, keeping poles and marked points on the genus-g top vertex.
pub fn merge_zeroes(sig: &Signature) -> Result<MoveResult, MoveError> {
    let zero_sum: i64 = sig.orders().iter().filter(|&&m| m > 0).sum();
    let zero_count = sig.orders().iter().filter(|&&m| m > 0).count();
    if zero_count < 2 {
        return Err(MoveError::TooFewZeroes);
    }
    let graph = LevelGraph {
        vertices: vec![
            Vertex { genus: sig.genus(), level: 0 },
            Vertex { genus: 0, level: -1 },
        ],
        legs: sig
            .orders()
            .iter()
            .enumerate()
            .map(|(i, &m)| crate::graph::Leg {
                point: i as u32 + 1,
                order: m,
                vertex: if m > 0 { 1 } else { 0 },
            })
            .collect(),
        edges: vec![Edge { a: 0, order_a: zero_sum, b: 1, order_b: -2 - zero_sum }],
    };
    graph.validate(sig)?;
    Ok(MoveResult {
        result: graph.canonicalized(),
        witness: None,
        links: None,
        audit: MoveAudit { name: "merge_zeroes".into(), params: String::new() },
    })
}

/// The irreducible type horizontal divisor: one vertex of genus g-1
/// with all legs and a loop with simple poles at both ends.
pub fn construct_dhirr(sig: &Signature) -> Result<BoundaryDivisor, MoveError> {
    if sig.genus() == 0 {
        return Err(MoveError::GenusZero);
    }
    let graph = irreducible_horizontal_graph(sig).ok_or(MoveError::NotADivisor)?;
    Ok(BoundaryDivisor {
        graph,
        kind: DivisorKind::HorizontalIrreducible,
        decoration: None,
    })
}

/// Degenerates vertex v by bubbling off a handle: genus drops by one
/// and a horizontal loop appears. Refused unless v is at top level or
/// every top-level vertex has genus 0 (the no-residue-conditions
/// predicate).
pub fn insert_horizontal_loop(
    graph: &LevelGraph,
    sig: &Signature,
    v: usize,
) -> Result<MoveResult, MoveError> {
    if v >= graph.vertices.len() {
        return Err(MoveError::PreconditionFail(format!("no vertex {v}")));
    }
    if graph.vertices[v].genus == 0 {
        return Err(MoveError::GenusTooSmall(v));
    }
    let at_top = graph.vertices[v].level == 0;
    let all_top_genus0 = graph
        .vertices
        .iter()
        .filter(|w| w.level == 0)
        .all(|w| w.genus == 0);
    if !at_top && !all_top_genus0 {
        return Err(MoveError::ResidueConditionsPossible(v));
    }
    let mut result = graph.clone();
    result.vertices[v].genus -= 1;
    result.edges.push(Edge { a: v, order_a: -1, b: v, order_b: -1 });
    result.validate(sig)?;
    let links = if graph.classify() == Classification::Divisor(DivisorKind::Vertical) {
        let dhirr = collapse_level_transition(&result, sig, 0)?;
        Some((graph.canonicalized(), dhirr))
    } else {
        None
    };
    Ok(MoveResult {
        result: result.canonicalized(),
        witness: links.as_ref().map(|_| result.canonicalized()),
        links,
        audit: MoveAudit {
            name: "insert_horizontal_loop".into(),
            params: format!("v={v}"),
        },
    })
}

/// Moves a vertex of a two-level divisor to a new extremal level,
/// leaving the dual graph, orders and enhancements untouched.
pub fn pull_vertex(
    graph: &LevelGraph,
    sig: &Signature,
    v: usize,
    direction: Direction,
) -> Result<LevelGraph, MoveError> {
    if graph.classify() != Classification::Divisor(DivisorKind::Vertical) {
        return Err(MoveError::NotADivisor);
    }
    if v >= graph.vertices.len() {
        return Err(MoveError::PreconditionFail(format!("no vertex {v}")));
    }
    let (required_level, new_level) = match direction {
        Direction::Up => (0, 1),
        Direction::Down => (-1, -2),
    };
    if graph.vertices[v].level != required_level {
        return Err(MoveError::PreconditionFail(format!(
            "vertex {v} is not at level {required_level}"
        )));
    }
    let peers = graph
        .vertices
        .iter()
        .filter(|w| w.level == required_level)
        .count();
    if peers < 2 {
        return Err(MoveError::LoneVertexAtLevel);
    }
    let mut result = graph.clone();
    result.vertices[v].level = new_level;
    result.normalize_levels();
    result.validate(sig)?;
    Ok(result)
}

/// Collapses the level transition between `upper` and `upper - 1`:
/// the edges joining those two levels are contracted, merged clusters
/// gain the first Betti number of the contracted subgraph, everything
/// else persists, levels renormalize.
pub fn collapse_level_transition(
    graph: &LevelGraph,
    sig: &Signature,
    upper: i32,
) -> Result<LevelGraph, MoveError> {
    let levels = graph.levels();
    if levels.len() < 2 || !levels.contains(&upper) || !levels.contains(&(upper - 1)) {
        return Err(MoveError::NoSuchTransition(upper));
    }
    let n = graph.vertices.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    let contracted: Vec<bool> = graph
        .edges
        .iter()
        .map(|e| {
            let (la, lb) = (graph.vertices[e.a].level, graph.vertices[e.b].level);
            (la == upper && lb == upper - 1) || (lb == upper && la == upper - 1)
        })
        .collect();
    for (e, &c) in graph.edges.iter().zip(&contracted) {
        if c {
            let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
            parent[ra] = rb;
        }
    }
    // cluster bookkeeping: genus sum plus h1 of the contracted subgraph
    let mut cluster_index: Vec<Option<usize>> = vec![None; n];
    let mut new_vertices: Vec<Vertex> = Vec::new();
    let mut cluster_sizes: Vec<usize> = Vec::new();
    let mut cluster_edges: Vec<usize> = Vec::new();
    for v in 0..n {
        let root = find(&mut parent, v);
        let idx = *cluster_index[root].get_or_insert_with(|| {
            let level = graph.vertices[v].level;
            let level = if level <= upper - 1 { level + 1 } else { level };
            new_vertices.push(Vertex { genus: 0, level });
            cluster_sizes.push(0);
            cluster_edges.push(0);
            new_vertices.len() - 1
        });
        new_vertices[idx].genus += graph.vertices[v].genus;
        cluster_sizes[idx] += 1;
        cluster_index[v] = Some(idx);
    }
    for (e, &c) in graph.edges.iter().zip(&contracted) {
        if c {
            let idx = cluster_index[find(&mut parent, e.a)].unwrap();
            cluster_edges[idx] += 1;
        }
    }
    for idx in 0..new_vertices.len() {
        let h1 = cluster_edges[idx] as i64 - cluster_sizes[idx] as i64 + 1;
        new_vertices[idx].genus += h1 as u32;
    }
    let map = |v: usize| cluster_index[v].unwrap();
    let mut result = LevelGraph {
        vertices: new_vertices,
        legs: graph
            .legs
            .iter()
            .map(|l| crate::graph::Leg { vertex: map(l.vertex), ..*l })
            .collect(),
        edges: graph
            .edges
            .iter()
            .zip(&contracted)
            .filter(|(_, &c)| !c)
            .map(|(e, _)| Edge { a: map(e.a), b: map(e.b), ..*e })
            .collect(),
    };
    result.normalize_levels();
    result.validate(sig)?;
    Ok(result)
}

/// Smooths a horizontal edge: a loop disappears into a handle (the
/// vertex gains genus one); a separating horizontal edge contracts,
/// merging its two vertices.
pub fn smooth_horizontal_edge(
    graph: &LevelGraph,
    sig: &Signature,
    edge: usize,
) -> Result<LevelGraph, MoveError> {
    let e = *graph
        .edges
        .get(edge)
        .ok_or_else(|| MoveError::PreconditionFail(format!("no edge {edge}")))?;
    if !e.is_horizontal() {
        return Err(MoveError::PreconditionFail(format!("edge {edge} is not horizontal")));
    }
    let mut result = graph.clone();
    result.edges.remove(edge);
    if e.is_loop() {
        result.vertices[e.a].genus += 1;
    } else {
        let (keep, gone) = (e.a.min(e.b), e.a.max(e.b));
        result.vertices[keep].genus += graph.vertices[gone].genus;
        result.vertices.remove(gone);
        let map = |v: usize| {
            if v == gone {
                keep
            } else if v > gone {
                v - 1
            } else {
                v
            }
        };
        for l in &mut result.legs {
            l.vertex = map(l.vertex);
        }
        for ed in &mut result.edges {
            ed.a = map(ed.a);
            ed.b = map(ed.b);
        }
    }
    result.normalize_levels();
    result.validate(sig)?;
    Ok(result)
}

/// All codimension-1 coarsenings of a graph: one per collapsible
/// level transition and one per smoothable horizontal edge. Results
/// are canonicalized; rewrites that fail validation are dropped.
pub fn undegenerations(graph: &LevelGraph, sig: &Signature) -> Vec<LevelGraph> {
    let mut out = Vec::new();
    for upper in graph.levels() {
        if let Ok(g) = collapse_level_transition(graph, sig, upper) {
            out.push(g.canonicalized());
        }
    }
    for (i, e) in graph.edges.iter().enumerate() {
        if e.is_horizontal() {
            if let Ok(g) = smooth_horizontal_edge(graph, sig, i) {
                out.push(g.canonicalized());
            }
        }
    }
    out
}

/// Collides two edge-ends at vertex v of a two-vertex all-genus-0
/// vertical divisor, producing a three-level witness and, after
/// collapsing the transition at the far vertex, a two-vertex divisor
/// with one genus-1 vertex.
pub fn collide_points(
    graph: &LevelGraph,
    sig: &Signature,
    v: usize,
    targets: (usize, usize),
) -> Result<MoveResult, MoveError> {
    if graph.classify() != Classification::Divisor(DivisorKind::Vertical)
        || graph.vertices.len() != 2
    {
        return Err(MoveError::PreconditionFail(
            "collide_points needs a two-vertex vertical divisor".into(),
        ));
    }
    if graph.vertices.iter().any(|w| w.genus != 0) {
        return Err(MoveError::PreconditionFail("both vertices must have genus 0".into()));
    }
    if v >= 2 {
        return Err(MoveError::PreconditionFail(format!("no vertex {v}")));
    }
    if graph.valence(v) < 4 {
        return Err(MoveError::PreconditionFail(format!(
            "vertex {v} has valence {} < 4",
            graph.valence(v)
        )));
    }
    let (ei, fi) = targets;
    if ei == fi || ei >= graph.edges.len() || fi >= graph.edges.len() {
        return Err(MoveError::PreconditionFail("targets must be two distinct edges".into()));
    }
    let w = 1 - v;
    let end_at = |e: &Edge| -> Option<i64> {
        if e.a == v && e.b == w {
            Some(e.order_a)
        } else if e.b == v && e.a == w {
            Some(e.order_b)
        } else {
            None
        }
    };
    let oe = end_at(&graph.edges[ei])
        .ok_or_else(|| MoveError::PreconditionFail("target edge not between v and w".into()))?;
    let of = end_at(&graph.edges[fi])
        .ok_or_else(|| MoveError::PreconditionFail("target edge not between v and w".into()))?;

    // the new vertex sits between the two original levels
    let v_at_top = graph.vertices[v].level == 0;
    let mut witness = graph.clone();
    witness.vertices[v].level = if v_at_top { 0 } else { -2 };
    witness.vertices[w].level = if v_at_top { -2 } else { 0 };
    let vp = witness.vertices.len();
    witness.vertices.push(Vertex { genus: 0, level: -1 });
    // move the two target ends from v to the new vertex
    for idx in [ei, fi] {
        let e = &mut witness.edges[idx];
        if e.a == v {
            e.a = vp;
        } else {
            e.b = vp;
        }
    }
    let h_vp = -2 - (oe + of);
    let h_v = oe + of;
    if v_at_top {
        // moved ends are zeroes, the new edge is a pole for v'
        witness.edges.push(Edge { a: v, order_a: h_v, b: vp, order_b: h_vp });
    } else {
        witness.edges.push(Edge { a: vp, order_a: h_vp, b: v, order_b: h_v });
    }
    witness.validate(sig)?;
    // merge v' with its two-edge partner w
    let transition = if v_at_top { -1 } else { 0 };
    let result = collapse_level_transition(&witness, sig, transition)?;
    Ok(MoveResult {
        result: result.clone(),
        witness: Some(witness.canonicalized()),
        links: Some((graph.canonicalized(), result)),
        audit: MoveAudit {
            name: "collide_points".into(),
            params: format!("v={v}, e={ei}, f={fi}"),
        },
    })
}

/// Tries every admissible vertex/edge-pair choice and keeps the one
/// whose result has the smallest canonical encoding.
pub fn collide_points_auto(
    graph: &LevelGraph,
    sig: &Signature,
) -> Result<MoveResult, MoveError> {
    let mut best: Option<MoveResult> = None;
    for v in 0..graph.vertices.len().min(2) {
        for ei in 0..graph.edges.len() {
            for fi in ei + 1..graph.edges.len() {
                if let Ok(mr) = collide_points(graph, sig, v, (ei, fi)) {
                    let better = match &best {
                        None => true,
                        Some(b) => {
                            mr.result.canonical_form() < b.result.canonical_form()
                        }
                    };
                    if better {
                        best = Some(mr);
                    }
                }
            }
        }
    }
    best.ok_or_else(|| MoveError::PreconditionFail("no admissible target pair".into()))
}
