//! Decorated level graphs: vertices with genus and level, labeled
//! legs with orders, edges with an order at each end.
//!
//! An edge stores the orders at its two ends; they always sum to -2.
//! A horizontal edge has orders (-1, -1) and joins vertices at the
//! same level; a vertical edge has its non-negative end at the
//! strictly higher level (the enhancement is kappa = upper order + 1).

use crate::stratum::{IndexClass, Signature};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("edge {0} has bad end orders (pairing or level rule violated)")]
    BadEdgeOrders(usize),
    #[error("levels are not normalized to {{0,-1,...,-k}}")]
    BadLevels,
    #[error("vertex {0} violates the degree identity")]
    DegreeViolation(usize),
    #[error("sum of vertex genera plus h1 does not match the signature genus")]
    GenusMismatch,
    #[error("underlying multigraph is disconnected")]
    Disconnected,
    #[error("vertex {0} is unstable")]
    Unstable(usize),
    #[error("vertex {0} carries a lone simple pole (residue theorem violation)")]
    LoneSimplePole(usize),
    #[error("legs do not match the signature's labeled orders")]
    LegMismatch,
    #[error("vertex index {0} out of range")]
    BadVertexIndex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub genus: u32,
    pub level: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Leg {
    /// 1-based point label; fixed by isomorphisms.
    pub point: u32,
    pub order: i64,
    pub vertex: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub order_a: i64,
    pub b: usize,
    pub order_b: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelGraph {
    pub vertices: Vec<Vertex>,
    pub legs: Vec<Leg>,
    pub edges: Vec<Edge>,
}

/// How a validated graph sits in the boundary stratification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DivisorKind {
    Vertical,
    HorizontalIrreducible,
    HorizontalSeparating,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    /// Codimension 0: the smooth interior graph.
    Smooth,
    Divisor(DivisorKind),
    /// Codimension >= 2.
    NotADivisor(u32),
}

/// Extra component data attached to a divisor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decoration {
    /// Genus-1 ambient: the index class of the irreducible horizontal
    /// component.
    Index(IndexClass),
    /// g >= 2: the divisor is irreducible; recorded as an input fact
    /// rather than computed here.
    Irreducible,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryDivisor {
    pub graph: LevelGraph,
    pub kind: DivisorKind,
    pub decoration: Option<Decoration>,
}

impl BoundaryDivisor {
    /// Node identity in the boundary complex: canonical graph
    /// encoding plus decoration.
    pub fn node_key(&self) -> (String, Option<Decoration>) {
        (self.graph.canonical_form(), self.decoration.clone())
    }
}

impl Edge {
    pub fn is_horizontal(&self) -> bool {
        self.order_a == -1 && self.order_b == -1
    }

    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }

    /// (vertex, order) of the upper and lower ends of a vertical edge.
    pub fn upper_lower(&self) -> ((usize, i64), (usize, i64)) {
        if self.order_a >= 0 {
            ((self.a, self.order_a), (self.b, self.order_b))
        } else {
            ((self.b, self.order_b), (self.a, self.order_a))
        }
    }
}

impl LevelGraph {
    pub fn levels(&self) -> Vec<i32> {
        let set: BTreeSet<i32> = self.vertices.iter().map(|v| v.level).collect();
        set.into_iter().rev().collect()
    }

    pub fn num_levels(&self) -> usize {
        self.vertices.iter().map(|v| v.level).collect::<HashSet<_>>().len()
    }

    pub fn horizontal_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_horizontal()).count()
    }

    /// First Betti number of the underlying multigraph (assumes
    /// connected).
    pub fn h1(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    pub fn genus_total(&self) -> i64 {
        self.vertices.iter().map(|v| v.genus as i64).sum::<i64>() + self.h1()
    }

    /// Legs plus edge-ends at vertex v.
    pub fn valence(&self, v: usize) -> usize {
        let legs = self.legs.iter().filter(|l| l.vertex == v).count();
        let ends = self
            .edges
            .iter()
            .map(|e| (e.a == v) as usize + (e.b == v) as usize)
            .sum::<usize>();
        legs + ends
    }

    /// All orders incident to v: its leg orders and edge-end orders.
    pub fn incident_orders(&self, v: usize) -> Vec<i64> {
        let mut orders: Vec<i64> = self
            .legs
            .iter()
            .filter(|l| l.vertex == v)
            .map(|l| l.order)
            .collect();
        for e in &self.edges {
            if e.a == v {
                orders.push(e.order_a);
            }
            if e.b == v {
                orders.push(e.order_b);
            }
        }
        orders
    }

    /// Shift levels so that the occupied set becomes {0,-1,...,-k}.
    /// Returns an error if the occupied levels are not consecutive
    /// after shifting.
    pub fn normalize_levels(&mut self) {
        let occupied: BTreeSet<i32> = self.vertices.iter().map(|v| v.level).collect();
        let sorted: Vec<i32> = occupied.into_iter().rev().collect();
        let remap: HashMap<i32, i32> = sorted
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, -(i as i32)))
            .collect();
        for v in &mut self.vertices {
            v.level = remap[&v.level];
        }
    }

    fn levels_normalized(&self) -> bool {
        let occupied: BTreeSet<i32> = self.vertices.iter().map(|v| v.level).collect();
        occupied
            .iter()
            .rev()
            .enumerate()
            .all(|(i, &l)| l == -(i as i32))
    }

    fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            stack.extend(adj[v].iter().copied());
        }
        seen.into_iter().all(|s| s)
    }

    /// Checks every structural invariant against the signature.
    /// Reports the first violation found.
    pub fn validate(&self, sig: &Signature) -> Result<(), ValidationError> {
        let vcount = self.vertices.len();
        for l in &self.legs {
            if l.vertex >= vcount {
                return Err(ValidationError::BadVertexIndex(l.vertex));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.a >= vcount || e.b >= vcount {
                return Err(ValidationError::BadVertexIndex(e.a.max(e.b)));
            }
            if e.order_a + e.order_b != -2 {
                return Err(ValidationError::BadEdgeOrders(i));
            }
            let la = self.vertices[e.a].level;
            let lb = self.vertices[e.b].level;
            if e.is_horizontal() {
                if la != lb {
                    return Err(ValidationError::BadEdgeOrders(i));
                }
            } else {
                // vertical: the end with order >= 0 sits strictly higher
                let ((u, uo), (_w, wo)) = e.upper_lower();
                if uo < 0 || wo > -2 {
                    return Err(ValidationError::BadEdgeOrders(i));
                }
                let lu = self.vertices[u].level;
                let lw = if u == e.a { lb } else { la };
                if lu <= lw {
                    return Err(ValidationError::BadEdgeOrders(i));
                }
            }
        }
        if !self.levels_normalized() {
            return Err(ValidationError::BadLevels);
        }
        for v in 0..vcount {
            let sum: i64 = self.incident_orders(v).iter().sum();
            if sum != 2 * self.vertices[v].genus as i64 - 2 {
                return Err(ValidationError::DegreeViolation(v));
            }
        }
        if !self.is_connected() {
            return Err(ValidationError::Disconnected);
        }
        if self.genus_total() != sig.genus() as i64 {
            return Err(ValidationError::GenusMismatch);
        }
        for v in 0..vcount {
            let val = self.valence(v);
            let needed = if self.vertices[v].genus == 0 { 3 } else { 1 };
            if val < needed {
                // exception: in positive ambient genus, a genus-0
                // vertex whose two special points both carry order -1
                // supports the dz/z form and is a legitimate side of a
                // separating horizontal divisor; in genus 0 the
                // underlying curve would be contracted, so no exception
                let orders = self.incident_orders(v);
                if !(sig.genus() >= 1 && val == 2 && orders == vec![-1, -1]) {
                    return Err(ValidationError::Unstable(v));
                }
            }
        }
        for v in 0..vcount {
            let orders = self.incident_orders(v);
            let simple_poles = orders.iter().filter(|&&o| o == -1).count();
            let other_negative = orders.iter().filter(|&&o| o < -1).count();
            if simple_poles == 1 && other_negative == 0 {
                return Err(ValidationError::LoneSimplePole(v));
            }
        }
        let mut expected: Vec<(u32, i64)> = sig
            .orders()
            .iter()
            .enumerate()
            .map(|(i, &m)| (i as u32 + 1, m))
            .collect();
        let mut actual: Vec<(u32, i64)> = self.legs.iter().map(|l| (l.point, l.order)).collect();
        expected.sort_unstable();
        actual.sort_unstable();
        if expected != actual {
            return Err(ValidationError::LegMismatch);
        }
        Ok(())
    }

    /// Codimension of the boundary stratum: (#levels - 1) + #horizontal
    /// edges.
    pub fn codimension(&self) -> u32 {
        (self.num_levels() as u32 - 1) + self.horizontal_edge_count() as u32
    }

    pub fn classify(&self) -> Classification {
        match self.codimension() {
            0 => Classification::Smooth,
            1 => {
                if self.horizontal_edge_count() == 0 {
                    Classification::Divisor(DivisorKind::Vertical)
                } else if self.edges[0].is_loop() {
                    Classification::Divisor(DivisorKind::HorizontalIrreducible)
                } else {
                    Classification::Divisor(DivisorKind::HorizontalSeparating)
                }
            }
            c => Classification::NotADivisor(c),
        }
    }

    fn vertex_key(&self, v: usize) -> (i32, u32, Vec<(u32, i64)>) {
        let mut legs: Vec<(u32, i64)> = self
            .legs
            .iter()
            .filter(|l| l.vertex == v)
            .map(|l| (l.point, l.order))
            .collect();
        legs.sort_unstable();
        (-self.vertices[v].level, self.vertices[v].genus, legs)
    }

    fn encode_with(&self, perm: &[usize]) -> String {
        // perm[old] = new position
        let mut inv = vec![0usize; perm.len()];
        for (old, &new) in perm.iter().enumerate() {
            inv[new] = old;
        }
        let mut out = String::new();
        for &old in &inv {
            let (nl, g, legs) = self.vertex_key(old);
            out.push_str(&format!("V{},{}", -(nl as i64), g));
            for (p, o) in legs {
                out.push_str(&format!(",{p}:{o}"));
            }
            out.push(';');
        }
        let mut enc_edges: Vec<(usize, i64, usize, i64)> = self
            .edges
            .iter()
            .map(|e| {
                let ea = (perm[e.a], e.order_a);
                let eb = (perm[e.b], e.order_b);
                let (x, y) = if ea <= eb { (ea, eb) } else { (eb, ea) };
                (x.0, x.1, y.0, y.1)
            })
            .collect();
        enc_edges.sort_unstable();
        for (a, oa, b, ob) in enc_edges {
            out.push_str(&format!("E{a}:{oa},{b}:{ob};"));
        }
        out
    }

    /// Canonical byte encoding: identical for two graphs related by a
    /// decoration-preserving isomorphism fixing all legs, distinct
    /// otherwise. Brute-forces permutations within groups of vertices
    /// sharing (level, genus, legs).
    pub fn canonical_form(&self) -> String {
        self.canonical_perm_and_encoding().1
    }

    fn canonical_perm_and_encoding(&self) -> (Vec<usize>, String) {
        let n = self.vertices.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| self.vertex_key(v));
        // group boundaries among equal keys
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &v in &order {
            if let Some(last) = groups.last_mut() {
                if self.vertex_key(last[0]) == self.vertex_key(v) {
                    last.push(v);
                    continue;
                }
            }
            groups.push(vec![v]);
        }
        let mut best: Option<(Vec<usize>, String)> = None;
        let mut perm = vec![0usize; n];
        permute_groups(&groups, 0, &mut Vec::new(), &mut |arrangement| {
            for (new, &old) in arrangement.iter().enumerate() {
                perm[old] = new;
            }
            let enc = self.encode_with(&perm);
            if best.as_ref().map_or(true, |(_, b)| enc < *b) {
                best = Some((perm.clone(), enc));
            }
        });
        best.expect("graph has at least one vertex")
    }

    /// Returns the graph with vertices re-indexed into canonical
    /// order, so that deterministic algorithms can pick vertices by
    /// index.
    pub fn canonicalized(&self) -> LevelGraph {
        let (perm, _) = self.canonical_perm_and_encoding();
        let mut inv = vec![0usize; perm.len()];
        for (old, &new) in perm.iter().enumerate() {
            inv[new] = old;
        }
        let vertices = inv.iter().map(|&old| self.vertices[old]).collect();
        let mut legs: Vec<Leg> = self
            .legs
            .iter()
            .map(|l| Leg { vertex: perm[l.vertex], ..*l })
            .collect();
        legs.sort_unstable_by_key(|l| l.point);
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| {
                let ea = (perm[e.a], e.order_a);
                let eb = (perm[e.b], e.order_b);
                let (x, y) = if ea <= eb { (ea, eb) } else { (eb, ea) };
                Edge { a: x.0, order_a: x.1, b: y.0, order_b: y.1 }
            })
            .collect();
        edges.sort_unstable_by_key(|e| (e.a, e.order_a, e.b, e.order_b));
        LevelGraph { vertices, legs, edges }
    }

    /// The codimension-0 graph of the open stratum: one vertex
    /// carrying everything.
    pub fn smooth(sig: &Signature) -> LevelGraph {
        LevelGraph {
            vertices: vec![Vertex { genus: sig.genus(), level: 0 }],
            legs: sig
                .orders()
                .iter()
                .enumerate()
                .map(|(i, &m)| Leg { point: i as u32 + 1, order: m, vertex: 0 })
                .collect(),
            edges: vec![],
        }
    }
}

fn permute_groups(
    groups: &[Vec<usize>],
    idx: usize,
    prefix: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if idx == groups.len() {
        visit(prefix);
        return;
    }
    let mut group = groups[idx].clone();
    heap_permutations(&mut group, &mut |p| {
        let len = prefix.len();
        prefix.extend_from_slice(p);
        permute_groups(groups, idx + 1, prefix, visit);
        prefix.truncate(len);
    });
}

fn heap_permutations(items: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    let n = items.len();
    fn rec(k: usize, items: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if k <= 1 {
            visit(items);
            return;
        }
        for i in 0..k {
            rec(k - 1, items, visit);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    rec(n, items, visit);
}
