//! Certificate-producing connectivity algorithms for the boundary
//! complex of a stratum: paths from divisors to the irreducible
//! horizontal divisor, the genus-1 index walk, the complex builder
//! (certified and oracle modes) and an independent certificate
//! verifier.

use crate::enumerate::{
    enumerate_horizontal_divisors, enumerate_level_graphs, enumerate_vertical_divisors,
    irreducible_horizontal_graph, Caps,
};
use crate::graph::{
    BoundaryDivisor, Classification, Decoration, DivisorKind, Edge, Leg, LevelGraph, Vertex,
};
use crate::moves::{
    collapse_level_transition, collide_points_auto, insert_horizontal_loop, pull_vertex,
    undegenerations, Direction, MoveAudit, MoveError,
};
use crate::stratum::{index_classes, rotation_of_index, IndexClass, Signature};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConnectError {
    #[error("index classes have different rotation numbers: {from} vs {to}")]
    RotationMismatch { from: i64, to: i64 },
    #[error("degenerate signature: {0}")]
    DegenerateSignature(String),
    #[error("precondition failed: {0}")]
    PreconditionFail(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("enumeration caps exceeded; result would not be exhaustive")]
    CapExceeded,
    #[error(transparent)]
    Move(#[from] MoveError),
}

/// One node of a certificate path, with the witness linking it to the
/// next node (absent on the final node).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertStep {
    pub divisor: BoundaryDivisor,
    pub witness: Option<LevelGraph>,
    pub audit: MoveAudit,
}

/// A path of divisors in which every consecutive pair shares a
/// validated codimension-2 common degeneration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub steps: Vec<CertStep>,
}

impl Certificate {
    pub fn endpoints(&self) -> Option<(&BoundaryDivisor, &BoundaryDivisor)> {
        Some((&self.steps.first()?.divisor, &self.steps.last()?.divisor))
    }

    /// Number of moves, i.e. consecutive divisor pairs.
    pub fn move_count(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub first_failure: Option<String>,
}

/// The canonical irreducible horizontal divisor of the stratum, with
/// the default decoration: the irreducibility flag for g >= 2, the
/// index class I = d for g = 1.
pub fn dhirr_divisor(sig: &Signature) -> Result<BoundaryDivisor, ConnectError> {
    let graph = irreducible_horizontal_graph(sig).ok_or_else(|| {
        ConnectError::PreconditionFail("no irreducible horizontal divisor (genus 0)".into())
    })?;
    Ok(BoundaryDivisor {
        graph,
        kind: DivisorKind::HorizontalIrreducible,
        decoration: Some(default_dhirr_decoration(sig)),
    })
}

fn default_dhirr_decoration(sig: &Signature) -> Decoration {
    if sig.genus() == 1 {
        let d = sig.order_gcd();
        Decoration::Index(IndexClass::new(d, d).expect("d >= 1"))
    } else {
        Decoration::Irreducible
    }
}

/// Canonical representative of an index class as a class value.
fn canon(c: IndexClass) -> IndexClass {
    IndexClass::new(c.canonical(), c.modulus()).expect("canonical representative is in range")
}

fn vertical(graph: LevelGraph) -> BoundaryDivisor {
    BoundaryDivisor {
        graph: graph.canonicalized(),
        kind: DivisorKind::Vertical,
        decoration: None,
    }
}

/// Links a separating horizontal divisor to the irreducible one by
/// inserting a loop on a positive-genus side; the resulting
/// two-horizontal-edge graph is the codimension-2 witness.
pub fn connect_horizontal_separating(
    sig: &Signature,
    d: &BoundaryDivisor,
) -> Result<Certificate, ConnectError> {
    if d.kind != DivisorKind::HorizontalSeparating {
        return Err(ConnectError::PreconditionFail(
            "divisor is not of separating horizontal kind".into(),
        ));
    }
    if sig.genus() == 0 {
        return Err(ConnectError::PreconditionFail(
            "no irreducible horizontal divisor exists in genus 0".into(),
        ));
    }
    // side choice: larger genus; tie broken by the smallest leg label
    let g = &d.graph;
    let mut side = None;
    for v in 0..g.vertices.len() {
        if g.vertices[v].genus == 0 {
            continue;
        }
        side = match side {
            None => Some(v),
            Some(s) => {
                use std::cmp::Ordering::*;
                match g.vertices[v].genus.cmp(&g.vertices[s].genus) {
                    Greater => Some(v),
                    Less => Some(s),
                    Equal => {
                        let min_leg = |w: usize| {
                            g.legs
                                .iter()
                                .filter(|l| l.vertex == w)
                                .map(|l| l.point)
                                .min()
                                .unwrap_or(u32::MAX)
                        };
                        if min_leg(v) < min_leg(s) {
                            Some(v)
                        } else {
                            Some(s)
                        }
                    }
                }
            }
        };
    }
    let side = side.ok_or_else(|| {
        ConnectError::PreconditionFail("no positive-genus side on the separating divisor".into())
    })?;
    let mr = insert_horizontal_loop(g, sig, side)?;
    Ok(Certificate {
        steps: vec![
            CertStep {
                divisor: d.clone(),
                witness: Some(mr.result.clone()),
                audit: mr.audit,
            },
            CertStep {
                divisor: dhirr_divisor(sig)?,
                witness: None,
                audit: MoveAudit { name: "endpoint".into(), params: String::new() },
            },
        ],
    })
}

/// Picks the vertex at which a loop can be inserted: a positive-genus
/// top vertex if one exists, otherwise (all-genus-0 top) any
/// positive-genus vertex.
fn loop_vertex(graph: &LevelGraph) -> Option<usize> {
    let top_positive = (0..graph.vertices.len())
        .find(|&v| graph.vertices[v].level == 0 && graph.vertices[v].genus > 0);
    if top_positive.is_some() {
        return top_positive;
    }
    if graph
        .vertices
        .iter()
        .filter(|v| v.level == 0)
        .all(|v| v.genus == 0)
    {
        return (0..graph.vertices.len()).find(|&v| graph.vertices[v].genus > 0);
    }
    None
}

/// One pull/collapse reduction of a two-level vertical divisor:
/// returns the three-level witness and the reduced divisor (fewer
/// vertices). Tries top vertices first, then bottom, in index order.
fn reduce_step(
    graph: &LevelGraph,
    sig: &Signature,
) -> Result<(LevelGraph, LevelGraph, MoveAudit), ConnectError> {
    let candidates: Vec<(usize, Direction, i32)> = (0..graph.vertices.len())
        .filter(|&v| graph.vertices[v].level == 0)
        .map(|v| (v, Direction::Up, -1))
        .chain(
            (0..graph.vertices.len())
                .filter(|&v| graph.vertices[v].level == -1)
                .map(|v| (v, Direction::Down, 0)),
        )
        .collect();
    for (v, dir, collapse_at) in candidates {
        let pulled = match pull_vertex(graph, sig, v, dir) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let reduced = match collapse_level_transition(&pulled, sig, collapse_at) {
            Ok(r) => r,
            Err(_) => continue,
        };
        if reduced.vertices.len() < graph.vertices.len() {
            let audit = MoveAudit {
                name: "pull_and_collapse".into(),
                params: format!("v={v}, dir={dir:?}"),
            };
            return Ok((pulled, reduced.canonicalized(), audit));
        }
    }
    Err(ConnectError::InternalInconsistency(
        "no admissible pull/collapse reduction".into(),
    ))
}

/// A certificate path from a vertical divisor to the irreducible
/// horizontal divisor, per the case analysis: loop insertion at a
/// positive-genus vertex when possible, otherwise pull/collapse
/// reductions to a two-vertex all-genus-0 divisor followed by a
/// collide-points step that manufactures genus.
pub fn path_vertical_to_dhirr(
    sig: &Signature,
    d: &BoundaryDivisor,
) -> Result<Certificate, ConnectError> {
    if sig.genus() == 0 {
        return Err(ConnectError::PreconditionFail("ambient genus must be positive".into()));
    }
    if sig.projective_dimension() < 2 {
        return Err(ConnectError::PreconditionFail(
            "projective dimension must be at least 2".into(),
        ));
    }
    if d.kind != DivisorKind::Vertical {
        return Err(ConnectError::PreconditionFail("divisor is not vertical".into()));
    }
    let mut steps: Vec<CertStep> = Vec::new();
    let mut current = d.graph.canonicalized();
    loop {
        if let Some(v) = loop_vertex(&current) {
            let mr = insert_horizontal_loop(&current, sig, v)?;
            let witness = mr.witness.ok_or_else(|| {
                ConnectError::InternalInconsistency("loop insertion produced no witness".into())
            })?;
            steps.push(CertStep {
                divisor: vertical(current),
                witness: Some(witness),
                audit: mr.audit,
            });
            steps.push(CertStep {
                divisor: dhirr_divisor(sig)?,
                witness: None,
                audit: MoveAudit { name: "endpoint".into(), params: String::new() },
            });
            return Ok(Certificate { steps });
        }
        if current.vertices.len() == 2 {
            // all genus 0 with two vertices: collide points
            let mr = collide_points_auto(&current, sig)?;
            steps.push(CertStep {
                divisor: vertical(current),
                witness: mr.witness.clone(),
                audit: mr.audit,
            });
            current = mr.result;
            continue;
        }
        let (witness, reduced, audit) = reduce_step(&current, sig)?;
        steps.push(CertStep {
            divisor: vertical(current),
            witness: Some(witness),
            audit,
        });
        current = reduced;
    }
}

/// The two-level walk divisor through marked point i: a genus-1
/// vertex in H_1(m_i, -m_i) joined to a genus-0 vertex carrying the
/// other legs; placed at the bottom for m_i > 1 and at the top for
/// m_i < -1. `class` decorates the genus-1 vertex's component.
fn walk_divisor(
    sig: &Signature,
    i: usize,
    class: IndexClass,
) -> Result<BoundaryDivisor, ConnectError> {
    let m = sig.orders()[i];
    if m.abs() <= 1 {
        return Err(ConnectError::DegenerateSignature(format!(
            "order m_{} = {m} admits no torus vertex",
            i + 1
        )));
    }
    let (g1_level, g0_level) = if m > 1 { (-1, 0) } else { (0, -1) };
    let vertices = vec![
        Vertex { genus: 1, level: g1_level },
        Vertex { genus: 0, level: g0_level },
    ];
    let legs: Vec<Leg> = sig
        .orders()
        .iter()
        .enumerate()
        .map(|(j, &o)| Leg {
            point: j as u32 + 1,
            order: o,
            vertex: if j == i { 0 } else { 1 },
        })
        .collect();
    let edges = if m > 1 {
        // genus-0 top with upper end m - 2, genus-1 bottom with -m
        vec![Edge { a: 1, order_a: m - 2, b: 0, order_b: -m }]
    } else {
        // genus-1 top with upper end -m, genus-0 bottom with m - 2
        vec![Edge { a: 0, order_a: -m, b: 1, order_b: m - 2 }]
    };
    let graph = LevelGraph { vertices, legs, edges };
    graph
        .validate(sig)
        .map_err(|e| ConnectError::InternalInconsistency(format!("walk divisor invalid: {e}")))?;
    Ok(BoundaryDivisor {
        graph: graph.canonicalized(),
        kind: DivisorKind::Vertical,
        decoration: Some(Decoration::Index(class)),
    })
}

fn dhirr_with_class(sig: &Signature, index: i64) -> Result<BoundaryDivisor, ConnectError> {
    let graph = irreducible_horizontal_graph(sig).ok_or_else(|| {
        ConnectError::PreconditionFail("no irreducible horizontal divisor".into())
    })?;
    let d = sig.order_gcd();
    Ok(BoundaryDivisor {
        graph,
        kind: DivisorKind::HorizontalIrreducible,
        decoration: Some(Decoration::Index(canon(
            IndexClass::new(index, d).map_err(|e| ConnectError::PreconditionFail(e.to_string()))?,
        ))),
    })
}

/// gcd chain from class `start` down to the rotation number r: each
/// entry is (leg index, gcd reached through that leg).
fn gcd_chain(sig: &Signature, start: i64) -> Vec<(usize, i64)> {
    let mut chain = Vec::new();
    let mut c = start;
    for (i, &m) in sig.orders().iter().enumerate() {
        let g = c.gcd(&m.abs());
        if g < c {
            chain.push((i, g));
            c = g;
        }
    }
    chain
}

/// Walk between two index classes of the irreducible horizontal
/// divisor in a genus-1 stratum, via gcd-chain step divisors whose
/// genus-1 vertex lies in a rotation-classified component of
/// H_1(m_i, -m_i). Both classes must have the same rotation number.
pub fn genus1_index_walk(
    sig: &Signature,
    from: IndexClass,
    to: IndexClass,
) -> Result<Certificate, ConnectError> {
    if sig.genus() != 1 {
        return Err(ConnectError::PreconditionFail("index walk requires genus 1".into()));
    }
    let d = sig.order_gcd();
    if from.modulus() != d || to.modulus() != d {
        return Err(ConnectError::PreconditionFail(format!(
            "index classes must have modulus d = {d}"
        )));
    }
    let (rf, rt) = (rotation_of_index(&from), rotation_of_index(&to));
    if rf != rt {
        return Err(ConnectError::RotationMismatch { from: rf, to: rt });
    }
    // chains run from the literal representatives; only the divisor
    // decorations are canonicalized
    if from.index() == to.index() || d == 1 {
        return Ok(Certificate {
            steps: vec![CertStep {
                divisor: dhirr_with_class(sig, from.index())?,
                witness: None,
                audit: MoveAudit { name: "endpoint".into(), params: String::new() },
            }],
        });
    }
    if sig.n() < 3 {
        return Err(ConnectError::PreconditionFail(
            "index walk requires at least three marked points".into(),
        ));
    }
    let r = rf;

    // node path: Dhirr_from, V, Dhirr_c1, V, ..., Dhirr_r, ...,
    // Dhirr_to; the second half is the reversed chain for `to`
    let mut classes_and_steps: Vec<(i64, Option<(usize, i64)>)> = Vec::new();
    let mut c = from.index();
    classes_and_steps.push((c, None));
    for (i, g) in gcd_chain(sig, from.index()) {
        classes_and_steps.push((g, Some((i, g))));
        c = g;
        if c == r {
            break;
        }
    }
    if c != r {
        return Err(ConnectError::InternalInconsistency(format!(
            "gcd chain from {} stalled at {c}, rotation {r}",
            from.index()
        )));
    }
    let mut back: Vec<(i64, Option<(usize, i64)>)> = Vec::new();
    let mut cb = to.index();
    for (i, g) in gcd_chain(sig, to.index()) {
        back.push((cb, Some((i, g))));
        cb = g;
        if cb == r {
            break;
        }
    }
    if cb != r {
        return Err(ConnectError::InternalInconsistency(format!(
            "gcd chain from {} stalled at {cb}, rotation {r}",
            to.index()
        )));
    }
    // reversed: from r up to `to`
    for (cls, step) in back.into_iter().rev() {
        classes_and_steps.push((cls, step));
    }

    let mut steps: Vec<CertStep> = Vec::new();
    for k in 0..classes_and_steps.len() {
        let (cls, _) = classes_and_steps[k];
        let next_step = classes_and_steps.get(k + 1).and_then(|(_, s)| *s);
        let dh = dhirr_with_class(sig, cls)?;
        match next_step {
            None => {
                steps.push(CertStep {
                    divisor: dh,
                    witness: None,
                    audit: MoveAudit { name: "endpoint".into(), params: String::new() },
                });
            }
            Some((i, g)) => {
                let m = sig.orders()[i];
                let v = walk_divisor(
                    sig,
                    i,
                    canon(IndexClass::new(g, m.abs()).map_err(|e| {
                        ConnectError::InternalInconsistency(e.to_string())
                    })?),
                )?;
                // the loop degeneration of the genus-1 vertex links the
                // walk divisor to both neighbouring Dhirr classes
                let g1_vertex = (0..v.graph.vertices.len())
                    .find(|&w| v.graph.vertices[w].genus == 1)
                    .ok_or_else(|| {
                        ConnectError::InternalInconsistency("walk divisor lost its torus".into())
                    })?;
                let mr = insert_horizontal_loop(&v.graph, sig, g1_vertex)?;
                let witness = mr.witness.ok_or_else(|| {
                    ConnectError::InternalInconsistency("loop insertion gave no witness".into())
                })?;
                steps.push(CertStep {
                    divisor: dh,
                    witness: Some(witness.clone()),
                    audit: MoveAudit {
                        name: "index_walk_step".into(),
                        params: format!("leg={}, gcd={g}", i + 1),
                    },
                });
                steps.push(CertStep {
                    divisor: v,
                    witness: Some(witness),
                    audit: mr.audit,
                });
            }
        }
    }
    Ok(Certificate { steps })
}

/// Re-validates every divisor and witness of a certificate and checks
/// that each witness undegenerates to both adjacent divisors; runs
/// independently of the code that produced the certificate.
pub fn verify_certificate(sig: &Signature, cert: &Certificate) -> VerifyReport {
    let fail = |msg: String| VerifyReport { ok: false, first_failure: Some(msg) };
    for (k, step) in cert.steps.iter().enumerate() {
        if let Err(e) = step.divisor.graph.validate(sig) {
            return fail(format!("step {k}: divisor invalid: {e}"));
        }
        if let Some(Decoration::Index(c)) = &step.divisor.decoration {
            if c.index() != c.canonical() {
                return fail(format!("step {k}: non-canonical index decoration"));
            }
        }
    }
    for k in 0..cert.steps.len().saturating_sub(1) {
        let witness = match &cert.steps[k].witness {
            Some(w) => w,
            None => return fail(format!("step {k}: missing witness")),
        };
        if let Err(e) = witness.validate(sig) {
            return fail(format!("step {k}: witness invalid: {e}"));
        }
        if witness.codimension() < 2 {
            return fail(format!("step {k}: witness is not a deeper degeneration"));
        }
        let undeg: BTreeSet<String> = undegenerations(witness, sig)
            .iter()
            .map(|g| g.canonical_form())
            .collect();
        for (label, g) in [
            ("current", &cert.steps[k].divisor.graph),
            ("next", &cert.steps[k + 1].divisor.graph),
        ] {
            if !undeg.contains(&g.canonical_form()) {
                return fail(format!(
                    "step {k}: witness does not undegenerate to the {label} divisor"
                ));
            }
        }
    }
    VerifyReport { ok: true, first_failure: None }
}

// --- boundary complex ---

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Certified,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryComplex {
    /// Node key -> divisor; keys are canonical encodings plus
    /// decoration tags.
    pub nodes: BTreeMap<String, BoundaryDivisor>,
    /// Sorted key pair -> linking witness.
    pub edges: BTreeMap<(String, String), LevelGraph>,
    pub exhaustive: bool,
    /// Always true: connectivity is established at the level of
    /// decorated graphs, without prong-matching data.
    pub coarse: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub connected: bool,
    pub components: usize,
    pub representatives: Vec<String>,
    pub note: Option<String>,
}

pub fn node_key_string(d: &BoundaryDivisor) -> String {
    let tag = match &d.decoration {
        None => String::new(),
        Some(Decoration::Irreducible) => "|IRR".into(),
        Some(Decoration::Index(c)) => format!("|I{}/{}", c.index(), c.modulus()),
    };
    format!("{}{}", d.graph.canonical_form(), tag)
}

/// Node identity used by the complex: irreducible horizontal nodes
/// keep their decoration; all others are identified by graph alone.
fn complex_node(sig: &Signature, d: &BoundaryDivisor) -> BoundaryDivisor {
    match d.kind {
        DivisorKind::HorizontalIrreducible => {
            let mut out = d.clone();
            if out.decoration.is_none() {
                out.decoration = Some(default_dhirr_decoration(sig));
            }
            out
        }
        _ => BoundaryDivisor { decoration: None, ..d.clone() },
    }
}

struct EdgeAccum {
    edges: BTreeMap<(String, String), LevelGraph>,
}

impl EdgeAccum {
    fn add(&mut self, a: &str, b: &str, witness: &LevelGraph) {
        if a == b {
            return;
        }
        let key = if a < b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        self.edges.entry(key).or_insert_with(|| witness.clone());
    }

    fn add_certificate(&mut self, sig: &Signature, cert: &Certificate) {
        for k in 0..cert.steps.len().saturating_sub(1) {
            if let Some(w) = &cert.steps[k].witness {
                let a = node_key_string(&complex_node(sig, &cert.steps[k].divisor));
                let b = node_key_string(&complex_node(sig, &cert.steps[k + 1].divisor));
                self.add(&a, &b, w);
            }
        }
    }
}

/// Two-vertex genus-0 vertical divisor determined by the set of legs
/// placed on the top vertex; orders are degree-forced.
fn genus0_two_vertex(sig: &Signature, top: &BTreeSet<usize>) -> Option<LevelGraph> {
    let sum_top: i64 = top.iter().map(|&i| sig.orders()[i]).sum();
    let u = -2 - sum_top;
    if u < 0 {
        return None;
    }
    let graph = LevelGraph {
        vertices: vec![Vertex { genus: 0, level: 0 }, Vertex { genus: 0, level: -1 }],
        legs: sig
            .orders()
            .iter()
            .enumerate()
            .map(|(i, &o)| Leg {
                point: i as u32 + 1,
                order: o,
                vertex: if top.contains(&i) { 0 } else { 1 },
            })
            .collect(),
        edges: vec![Edge { a: 0, order_a: u, b: 1, order_b: -2 - u }],
    };
    graph.validate(sig).ok()?;
    Some(graph)
}

/// Three-level chain witness linking the two-vertex divisors with top
/// leg sets `large` and `small` (small being a proper subset).
fn containment_witness(
    sig: &Signature,
    small: &BTreeSet<usize>,
    large: &BTreeSet<usize>,
) -> Option<LevelGraph> {
    let mid: BTreeSet<usize> = large.difference(small).copied().collect();
    if mid.is_empty() || !small.is_subset(large) {
        return None;
    }
    let sum = |s: &BTreeSet<usize>| -> i64 { s.iter().map(|&i| sig.orders()[i]).sum() };
    let u1 = -2 - sum(small);
    let u2 = -2 - sum(large);
    if u1 < 0 || u2 < 0 {
        return None;
    }
    let level_of = |i: usize| -> i32 {
        if small.contains(&i) {
            0
        } else if mid.contains(&i) {
            -1
        } else {
            -2
        }
    };
    let vertex_of = |i: usize| -> usize { (-level_of(i)) as usize };
    let graph = LevelGraph {
        vertices: vec![
            Vertex { genus: 0, level: 0 },
            Vertex { genus: 0, level: -1 },
            Vertex { genus: 0, level: -2 },
        ],
        legs: sig
            .orders()
            .iter()
            .enumerate()
            .map(|(i, &o)| Leg { point: i as u32 + 1, order: o, vertex: vertex_of(i) })
            .collect(),
        edges: vec![
            Edge { a: 0, order_a: u1, b: 1, order_b: -2 - u1 },
            Edge { a: 1, order_a: u2, b: 2, order_b: -2 - u2 },
        ],
    };
    graph.validate(sig).ok()?;
    Some(graph)
}

/// Witness attaching a genus-0 separating horizontal divisor to the
/// vertical layer: one side is degenerated into two levels; smoothing
/// the horizontal edge then yields a two-vertex vertical divisor.
fn horizontal_attach_witness(sig: &Signature, d: &LevelGraph) -> Option<LevelGraph> {
    if d.vertices.len() != 2 || d.edges.len() != 1 || !d.edges[0].is_horizontal() {
        return None;
    }
    for side in 0..2 {
        let other = 1 - side;
        let side_legs: Vec<usize> = d
            .legs
            .iter()
            .enumerate()
            .filter(|(_, l)| l.vertex == side)
            .map(|(i, _)| i)
            .collect();
        // proper nonempty subsets of the side's legs move down a level
        for mask in 1..(1u64 << side_legs.len()) - 1 {
            let down: BTreeSet<usize> = side_legs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &li)| li)
                .collect();
            let sum_down: i64 = down.iter().map(|&li| d.legs[*&li].order).sum();
            let u = sum_down;
            if u < 0 {
                continue;
            }
            // vertices: 0 = other side, 1 = side top, 2 = side bottom
            let graph = LevelGraph {
                vertices: vec![
                    Vertex { genus: d.vertices[other].genus, level: 0 },
                    Vertex { genus: 0, level: 0 },
                    Vertex { genus: 0, level: -1 },
                ],
                legs: d
                    .legs
                    .iter()
                    .enumerate()
                    .map(|(i, l)| Leg {
                        point: l.point,
                        order: l.order,
                        vertex: if l.vertex == other {
                            0
                        } else if down.contains(&i) {
                            2
                        } else {
                            1
                        },
                    })
                    .collect(),
                edges: vec![
                    Edge { a: 0, order_a: -1, b: 1, order_b: -1 },
                    Edge { a: 1, order_a: u, b: 2, order_b: -2 - u },
                ],
            };
            if graph.validate(sig).is_ok() {
                return Some(graph);
            }
        }
    }
    None
}

/// Builds the coarse boundary complex: nodes from the divisor
/// enumerators, edges from certified move-based constructions or from
/// an exhaustive codimension-2 oracle.
pub fn build_boundary_complex(
    sig: &Signature,
    caps: &Caps,
    mode: Mode,
) -> Result<BoundaryComplex, ConnectError> {
    let vert = enumerate_vertical_divisors(sig, caps);
    let horiz = enumerate_horizontal_divisors(sig);
    let mut nodes: BTreeMap<String, BoundaryDivisor> = BTreeMap::new();
    let mut exhaustive = vert.exhaustive;

    for d in &vert.divisors {
        let n = complex_node(sig, d);
        nodes.insert(node_key_string(&n), n);
    }
    for d in &horiz {
        if d.kind == DivisorKind::HorizontalIrreducible && sig.genus() == 1 {
            // one node per index class
            for c in index_classes(sig.order_gcd()) {
                let n = BoundaryDivisor {
                    graph: d.graph.clone(),
                    kind: d.kind,
                    decoration: Some(Decoration::Index(c)),
                };
                nodes.insert(node_key_string(&n), n);
            }
        } else {
            let n = complex_node(sig, d);
            nodes.insert(node_key_string(&n), n);
        }
    }

    let mut acc = EdgeAccum { edges: BTreeMap::new() };
    match mode {
        Mode::Certified => {
            if sig.genus() >= 1 {
                for d in &horiz {
                    if d.kind == DivisorKind::HorizontalSeparating {
                        let cert = connect_horizontal_separating(sig, d)?;
                        acc.add_certificate(sig, &cert);
                    }
                }
                if sig.projective_dimension() >= 2 {
                    for d in &vert.divisors {
                        let cert = path_vertical_to_dhirr(sig, d)?;
                        acc.add_certificate(sig, &cert);
                    }
                }
                if sig.genus() == 1 {
                    let classes = index_classes(sig.order_gcd());
                    for a in &classes {
                        for b in &classes {
                            if a.index() < b.index() && rotation_of_index(a) == rotation_of_index(b) {
                                let cert = genus1_index_walk(sig, *a, *b)?;
                                acc.add_certificate(sig, &cert);
                            }
                        }
                    }
                }
            } else {
                // genus 0: pull/collapse reductions, containment chains
                // between two-vertex divisors, and horizontal attachment
                for d in &vert.divisors {
                    let mut current = d.graph.canonicalized();
                    while current.vertices.len() > 2 {
                        let (witness, reduced, _) = reduce_step(&current, sig)?;
                        let a = node_key_string(&vertical(current));
                        let b = node_key_string(&vertical(reduced.clone()));
                        acc.add(&a, &b, &witness);
                        current = reduced;
                    }
                }
                // two-vertex divisors by top leg set
                let mut top_sets: Vec<BTreeSet<usize>> = Vec::new();
                for d in &vert.divisors {
                    if d.graph.vertices.len() == 2 {
                        let top = (0..2)
                            .find(|&v| d.graph.vertices[v].level == 0)
                            .expect("two-level graph has a top");
                        let set: BTreeSet<usize> = d
                            .graph
                            .legs
                            .iter()
                            .filter(|l| l.vertex == top)
                            .map(|l| l.point as usize - 1)
                            .collect();
                        top_sets.push(set);
                    }
                }
                for s in &top_sets {
                    for t in &top_sets {
                        if t.len() < s.len() && t.is_subset(s) {
                            if let Some(w) = containment_witness(sig, t, s) {
                                let ds = genus0_two_vertex(sig, s).map(vertical);
                                let dt = genus0_two_vertex(sig, t).map(vertical);
                                if let (Some(ds), Some(dt)) = (ds, dt) {
                                    acc.add(
                                        &node_key_string(&ds),
                                        &node_key_string(&dt),
                                        &w,
                                    );
                                }
                            }
                        }
                    }
                }
                for d in &horiz {
                    if d.kind == DivisorKind::HorizontalSeparating {
                        if let Some(w) = horizontal_attach_witness(sig, &d.graph) {
                            // the witness undegenerates to d and to a
                            // two-vertex vertical divisor
                            for u in undegenerations(&w, sig) {
                                if u.classify()
                                    == Classification::Divisor(DivisorKind::Vertical)
                                {
                                    let a = node_key_string(&complex_node(sig, d));
                                    let b = node_key_string(&vertical(u));
                                    acc.add(&a, &b, &w);
                                }
                            }
                        }
                    }
                }
            }
        }
        Mode::Oracle => {
            for (levels, h) in [(3usize, 0usize), (2, 1), (1, 2)] {
                let enumeration = enumerate_level_graphs(sig, levels, h, caps);
                exhaustive = exhaustive && enumeration.exhaustive;
                for w in &enumeration.graphs {
                    if w.codimension() != 2 {
                        continue;
                    }
                    let mut keys: Vec<String> = Vec::new();
                    for u in undegenerations(w, sig) {
                        let key = match u.classify() {
                            Classification::Divisor(DivisorKind::Vertical) => {
                                node_key_string(&vertical(u))
                            }
                            Classification::Divisor(DivisorKind::HorizontalIrreducible) => {
                                node_key_string(&BoundaryDivisor {
                                    graph: u.canonicalized(),
                                    kind: DivisorKind::HorizontalIrreducible,
                                    decoration: Some(default_dhirr_decoration(sig)),
                                })
                            }
                            Classification::Divisor(DivisorKind::HorizontalSeparating) => {
                                node_key_string(&BoundaryDivisor {
                                    graph: u.canonicalized(),
                                    kind: DivisorKind::HorizontalSeparating,
                                    decoration: None,
                                })
                            }
                            _ => continue,
                        };
                        if nodes.contains_key(&key) && !keys.contains(&key) {
                            keys.push(key);
                        }
                    }
                    for a in 0..keys.len() {
                        for b in a + 1..keys.len() {
                            acc.add(&keys[a], &keys[b], w);
                        }
                    }
                }
            }
        }
    }

    // drop edges whose endpoints fell outside the node set (caps)
    let edges: BTreeMap<(String, String), LevelGraph> = acc
        .edges
        .into_iter()
        .filter(|((a, b), _)| nodes.contains_key(a) && nodes.contains_key(b))
        .collect();

    Ok(BoundaryComplex { nodes, edges, exhaustive, coarse: true })
}

/// Union-find connectivity over the complex.
pub fn is_connected(c: &BoundaryComplex) -> ConnectivityReport {
    if c.nodes.is_empty() {
        return ConnectivityReport {
            connected: false,
            components: 0,
            representatives: Vec::new(),
            note: Some("no boundary".into()),
        };
    }
    let keys: Vec<&String> = c.nodes.keys().collect();
    let index: BTreeMap<&String, usize> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let mut parent: Vec<usize> = (0..keys.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for (a, b) in c.edges.keys() {
        if let (Some(&ia), Some(&ib)) = (index.get(a), index.get(b)) {
            let (ra, rb) = (find(&mut parent, ia), find(&mut parent, ib));
            parent[ra] = rb;
        }
    }
    let mut reps: BTreeMap<usize, String> = BTreeMap::new();
    for (i, &k) in keys.iter().enumerate() {
        let r = find(&mut parent, i);
        reps.entry(r).or_insert_with(|| k.clone());
    }
    let mut representatives: Vec<String> = reps.into_values().collect();
    representatives.sort();
    ConnectivityReport {
        connected: representatives.len() == 1,
        components: representatives.len(),
        representatives,
        note: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::{construct_dhirr, merge_zeroes};

    fn sig(g: u32, m: &[i64]) -> Signature {
        Signature::new(g, m.to_vec()).unwrap()
    }

    #[test]
    fn merge_zeroes_path_is_one_step() {
        let s = sig(2, &[1, 1]);
        let d = vertical(merge_zeroes(&s).unwrap().result);
        let cert = path_vertical_to_dhirr(&s, &d).unwrap();
        assert_eq!(cert.move_count(), 1);
        let report = verify_certificate(&s, &cert);
        assert!(report.ok, "{:?}", report.first_failure);
        let (from, to) = cert.endpoints().unwrap();
        assert_eq!(from.graph.canonical_form(), d.graph.canonical_form());
        assert_eq!(to.kind, DivisorKind::HorizontalIrreducible);
    }

    #[test]
    fn all_genus0_divisor_path_uses_collide() {
        let s = sig(1, &[2, -1, -1]);
        let vert = enumerate_vertical_divisors(&s, &Caps::default());
        let two_edge = vert
            .divisors
            .iter()
            .find(|d| d.graph.edges.len() == 2 && d.graph.vertices.iter().all(|v| v.genus == 0))
            .expect("two-edge all-genus-0 divisor");
        let cert = path_vertical_to_dhirr(&s, two_edge).unwrap();
        assert_eq!(cert.move_count(), 2);
        assert!(verify_certificate(&s, &cert).ok);
    }

    #[test]
    fn separating_divisor_connects_to_dhirr() {
        let s = sig(1, &[3, -1, -2]);
        let seps: Vec<_> = enumerate_horizontal_divisors(&s)
            .into_iter()
            .filter(|d| d.kind == DivisorKind::HorizontalSeparating)
            .collect();
        assert!(!seps.is_empty());
        for d in &seps {
            let cert = connect_horizontal_separating(&s, d).unwrap();
            assert_eq!(cert.move_count(), 1);
            let report = verify_certificate(&s, &cert);
            assert!(report.ok, "{:?}", report.first_failure);
        }
    }

    #[test]
    fn tampered_witness_fails_verification() {
        let s = sig(2, &[1, 1]);
        let d = vertical(merge_zeroes(&s).unwrap().result);
        let mut cert = path_vertical_to_dhirr(&s, &d).unwrap();
        let w = cert.steps[0].witness.as_mut().unwrap();
        w.edges[0].order_a += 1;
        assert!(!verify_certificate(&s, &cert).ok);
    }

    #[test]
    fn empty_certificate_with_single_node_verifies() {
        let s = sig(2, &[1, 1]);
        let cert = Certificate {
            steps: vec![CertStep {
                divisor: construct_dhirr(&s).unwrap(),
                witness: None,
                audit: MoveAudit { name: "endpoint".into(), params: String::new() },
            }],
        };
        assert!(verify_certificate(&s, &cert).ok);
        assert_eq!(cert.move_count(), 0);
    }

    #[test]
    fn walk_h1_44_m8() {
        let s = sig(1, &[4, 4, -8]);
        let d = s.order_gcd();
        assert_eq!(d, 4);
        let from = IndexClass::new(3, d).unwrap();
        let to = IndexClass::new(1, d).unwrap();
        let cert = genus1_index_walk(&s, from, to).unwrap();
        let report = verify_certificate(&s, &cert);
        assert!(report.ok, "{:?}", report.first_failure);
        let (a, b) = cert.endpoints().unwrap();
        assert_eq!(
            a.decoration,
            Some(Decoration::Index(super::canon(from)))
        );
        assert_eq!(b.decoration, Some(Decoration::Index(super::canon(to))));
        // one chain step via m_1 = 4 (gcd(3,4) = 1), nothing on the J side
        assert!(cert.move_count() <= 2 * s.n());
        // the step divisor: genus-0 top in H_0(2,4,-8), genus-1 bottom
        let step = cert
            .steps
            .iter()
            .find(|st| st.divisor.kind == DivisorKind::Vertical)
            .expect("walk has a vertical step divisor");
        let g = &step.divisor.graph;
        let top = (0..2).find(|&v| g.vertices[v].level == 0).unwrap();
        assert_eq!(g.vertices[top].genus, 0);
        assert_eq!(g.vertices[1 - top].genus, 1);
        let mut top_orders = g.incident_orders(top);
        top_orders.sort();
        assert_eq!(top_orders, vec![-8, 2, 4]);
    }

    #[test]
    fn walk_rejects_rotation_mismatch() {
        let s = sig(1, &[4, 4, -8]);
        let from = IndexClass::new(2, 4).unwrap();
        let to = IndexClass::new(1, 4).unwrap();
        assert!(matches!(
            genus1_index_walk(&s, from, to),
            Err(ConnectError::RotationMismatch { .. })
        ));
    }

    #[test]
    fn walk_trivial_cases() {
        let s = sig(1, &[2, -1, -1]);
        let c = IndexClass::new(1, 1).unwrap();
        let cert = genus1_index_walk(&s, c, c).unwrap();
        assert_eq!(cert.move_count(), 0);
        assert!(verify_certificate(&s, &cert).ok);
    }

    #[test]
    fn complex_h0_n4_three_isolated_nodes() {
        let s = sig(0, &[1, -1, -1, -1]);
        for mode in [Mode::Certified, Mode::Oracle] {
            let c = build_boundary_complex(&s, &Caps::default(), mode).unwrap();
            assert_eq!(c.nodes.len(), 3);
            assert!(c.edges.is_empty());
            let report = is_connected(&c);
            assert_eq!(report.components, 3);
            assert!(!report.connected);
        }
    }

    #[test]
    fn complex_empty_for_compact_stratum() {
        let s = sig(0, &[-1, -1]);
        let c = build_boundary_complex(&s, &Caps::default(), Mode::Certified).unwrap();
        assert!(c.nodes.is_empty());
        let report = is_connected(&c);
        assert!(!report.connected);
        assert_eq!(report.components, 0);
        assert_eq!(report.note.as_deref(), Some("no boundary"));
    }

    #[test]
    fn complex_h1_2m1m1_connected_and_dominated() {
        let s = sig(1, &[2, -1, -1]);
        let certified = build_boundary_complex(&s, &Caps::default(), Mode::Certified).unwrap();
        let oracle = build_boundary_complex(&s, &Caps::default(), Mode::Oracle).unwrap();
        assert!(is_connected(&certified).connected);
        assert!(is_connected(&oracle).connected);
        assert!(oracle.exhaustive);
        for key in certified.edges.keys() {
            assert!(
                oracle.edges.contains_key(key),
                "certified edge missing from oracle: {key:?}"
            );
        }
    }

    #[test]
    fn complex_h0_genus0_connected() {
        let s = sig(0, &[2, -1, -1, -1, -1]);
        let certified = build_boundary_complex(&s, &Caps::default(), Mode::Certified).unwrap();
        assert!(
            is_connected(&certified).connected,
            "components: {:?}",
            is_connected(&certified).representatives
        );
        let oracle = build_boundary_complex(&s, &Caps::default(), Mode::Oracle).unwrap();
        assert!(is_connected(&oracle).connected);
        for key in certified.edges.keys() {
            assert!(oracle.edges.contains_key(key));
        }
    }
}
