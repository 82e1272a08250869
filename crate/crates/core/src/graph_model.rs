//! Fundamental graphs of Z^2-periodic graphs.
//!
//! Vertices are 1-based ids `1..=nu`. Edges are stored unoriented; the
//! oriented pair `(tail, head, tau)` / `(head, tail, -tau)` is always
//! machine-generated, so an index and its negation can never get out of
//! sync. Oriented edges with `tau != (0, 0)` are called bridges: they are
//! what ties neighbouring cells of the periodic graph together.

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

/// Integer edge index: the lattice cell offset crossed by the edge.
pub type Index = [i64; 2];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex id {0} out of range 1..={1}")]
    InvalidVertexId(usize, usize),
    #[error("vertex {0} is isolated (degree 0)")]
    IsolatedVertex(usize),
    #[error("unknown lattice family `{0}`")]
    UnknownFamily(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
}

/// One unoriented edge of the fundamental graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub tail: usize,
    pub head: usize,
    pub index: Index,
}

impl EdgeSpec {
    pub fn new(tail: usize, head: usize, index: Index) -> Self {
        EdgeSpec { tail, head, index }
    }

    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// An oriented edge, one of the two orientations of an [`EdgeSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedEdge {
    pub tail: usize,
    pub head: usize,
    pub index: Index,
}

/// Counts of oriented bridges between vertex pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BridgeTable {
    nu: usize,
    b: Vec<u32>,
}

impl BridgeTable {
    /// Number of oriented edges (v_j, v_k) with nonzero index; 1-based ids.
    pub fn count(&self, j: usize, k: usize) -> u32 {
        self.b[(j - 1) * self.nu + (k - 1)]
    }

    pub fn total(&self) -> u32 {
        self.b.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.b.iter().all(|&c| c == 0)
    }
}

/// A fundamental graph: `nu` vertices, unoriented indexed edges, per-vertex
/// degrees (loops count twice: both orientations start at the vertex).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalGraph {
    nu: usize,
    edges: Vec<EdgeSpec>,
    degrees: Vec<usize>,
    name: Option<String>,
}

impl FundamentalGraph {
    pub fn new(nu: usize, edges: Vec<EdgeSpec>) -> Result<Self, GraphError> {
        if nu < 1 {
            return Err(GraphError::BadParams("nu must be >= 1".into()));
        }
        let mut degrees = vec![0usize; nu];
        for e in &edges {
            for v in [e.tail, e.head] {
                if v < 1 || v > nu {
                    return Err(GraphError::InvalidVertexId(v, nu));
                }
            }
            degrees[e.tail - 1] += 1;
            degrees[e.head - 1] += 1;
        }
        if let Some(j) = degrees.iter().position(|&d| d == 0) {
            return Err(GraphError::IsolatedVertex(j + 1));
        }
        Ok(FundamentalGraph {
            nu,
            edges,
            degrees,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn edge_specs(&self) -> &[EdgeSpec] {
        &self.edges
    }

    /// Degree of vertex `j` (1-based).
    pub fn degree(&self, j: usize) -> usize {
        self.degrees[j - 1]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Both orientations of every edge spec: exactly `2 * |edges|` entries.
    pub fn oriented_edges(&self) -> Vec<OrientedEdge> {
        let mut out = Vec::with_capacity(2 * self.edges.len());
        for e in &self.edges {
            out.push(OrientedEdge {
                tail: e.tail,
                head: e.head,
                index: e.index,
            });
            out.push(OrientedEdge {
                tail: e.head,
                head: e.tail,
                index: [-e.index[0], -e.index[1]],
            });
        }
        out
    }

    /// Oriented-bridge counts b_jk.
    pub fn bridges(&self) -> BridgeTable {
        let mut b = vec![0u32; self.nu * self.nu];
        for e in self.oriented_edges() {
            if e.index != [0, 0] {
                b[(e.tail - 1) * self.nu + (e.head - 1)] += 1;
            }
        }
        BridgeTable { nu: self.nu, b }
    }

    /// True iff all bridges are loops (no nonzero index between distinct vertices).
    pub fn bridges_are_loops(&self) -> bool {
        self.edges
            .iter()
            .all(|e| e.is_loop() || e.index == [0, 0])
    }

    /// 2-colorability of the fundamental graph itself (indices ignored).
    /// Any loop makes it non-bipartite.
    pub fn is_bipartite_fundamental(&self) -> bool {
        if self.edges.iter().any(|e| e.is_loop()) {
            return false;
        }
        two_colorable(self.nu, self.edges.iter().map(|e| (e.tail - 1, e.head - 1)))
    }

    /// Bipartiteness of the periodic graph, tested on the quotient by the
    /// doubled lattice: vertex copies (j, p) with p in (Z/2Z)^2, an edge
    /// spec (j, k, tau) joining (j, p) to (k, p + tau mod 2).
    pub fn is_bipartite_periodic(&self) -> bool {
        let n = self.nu * 4;
        let id = |j: usize, p: [i64; 2]| -> usize {
            (j - 1) * 4 + (p[0].rem_euclid(2) * 2 + p[1].rem_euclid(2)) as usize
        };
        let mut pairs = Vec::with_capacity(self.edges.len() * 4);
        for e in &self.edges {
            for p0 in 0..2i64 {
                for p1 in 0..2i64 {
                    let p = [p0, p1];
                    let q = [p0 + e.index[0], p1 + e.index[1]];
                    pairs.push((id(e.tail, p), id(e.head, q)));
                }
            }
        }
        two_colorable(n, pairs.into_iter())
    }

    /// Connectivity of the periodic graph: the fundamental graph must be
    /// connected as a multigraph and the cycle-index subgroup of Z^2
    /// (non-tree oriented edges plus their tree-path index sums) must be
    /// all of Z^2, checked via integer Hermite reduction.
    pub fn is_connected_periodic(&self) -> bool {
        // BFS spanning tree over the multigraph, tracking the accumulated
        // index from the root to each vertex.
        let mut adj: Vec<Vec<(usize, Index)>> = vec![Vec::new(); self.nu];
        for e in self.oriented_edges() {
            adj[e.tail - 1].push((e.head - 1, e.index));
        }
        let mut pos: Vec<Option<Index>> = vec![None; self.nu];
        pos[0] = Some([0, 0]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            let pu = pos[u].unwrap();
            for &(v, tau) in &adj[u] {
                if pos[v].is_none() {
                    pos[v] = Some([pu[0] + tau[0], pu[1] + tau[1]]);
                    queue.push_back(v);
                }
            }
        }
        if pos.iter().any(|p| p.is_none()) {
            return false;
        }
        // Every oriented edge contributes the cycle index pos[u] + tau - pos[v];
        // tree edges contribute zero.
        let mut gens = Vec::new();
        for e in self.oriented_edges() {
            let pu = pos[e.tail - 1].unwrap();
            let pv = pos[e.head - 1].unwrap();
            let g = [pu[0] + e.index[0] - pv[0], pu[1] + e.index[1] - pv[1]];
            if g != [0, 0] {
                gens.push(g);
            }
        }
        hermite_full_lattice(&gens)
    }

    /// Re-gauge indices by per-vertex integer offsets: (j, k, tau) becomes
    /// (j, k, tau + p_k - p_j). The Floquet spectrum is invariant pointwise
    /// in quasimomentum (diagonal-phase conjugation).
    pub fn gauge_shift(&self, offsets: &[Index]) -> Result<Self, GraphError> {
        if offsets.len() != self.nu {
            return Err(GraphError::BadParams(format!(
                "expected {} offsets, got {}",
                self.nu,
                offsets.len()
            )));
        }
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let pk = offsets[e.head - 1];
                let pj = offsets[e.tail - 1];
                EdgeSpec::new(
                    e.tail,
                    e.head,
                    [e.index[0] + pk[0] - pj[0], e.index[1] + pk[1] - pj[1]],
                )
            })
            .collect();
        let mut g = FundamentalGraph::new(self.nu, edges)?;
        g.name = self.name.clone();
        Ok(g)
    }

    /// Multiply every edge index by `n >= 1`. The resulting Laplacian is
    /// unitarily equivalent: its fiber at `n * theta` equals the original
    /// fiber at `theta`.
    pub fn scale_indices(&self, n: i64) -> Result<Self, GraphError> {
        if n < 1 {
            return Err(GraphError::BadParams("scale factor must be >= 1".into()));
        }
        let edges = self
            .edges
            .iter()
            .map(|e| EdgeSpec::new(e.tail, e.head, [n * e.index[0], n * e.index[1]]))
            .collect();
        let mut g = FundamentalGraph::new(self.nu, edges)?;
        g.name = self.name.clone();
        Ok(g)
    }

    pub fn add_edge(&self, tail: usize, head: usize, index: Index) -> Result<Self, GraphError> {
        for v in [tail, head] {
            if v < 1 || v > self.nu {
                return Err(GraphError::InvalidVertexId(v, self.nu));
            }
        }
        let mut edges = self.edges.clone();
        edges.push(EdgeSpec::new(tail, head, index));
        let mut g = FundamentalGraph::new(self.nu, edges)?;
        g.name = self.name.clone();
        Ok(g)
    }

    /// Replace every edge spec (j, k, tau) by a path through `n` fresh
    /// degree-2 vertices; the inherited index sits on the last segment,
    /// all other segments get index zero.
    pub fn subdivide_all_edges(&self, n: usize) -> Result<Self, GraphError> {
        if n < 1 {
            return Err(GraphError::BadParams(
                "subdivision count must be >= 1".into(),
            ));
        }
        let mut edges = Vec::with_capacity(self.edges.len() * (n + 1));
        let mut next = self.nu + 1;
        for e in &self.edges {
            let mut prev = e.tail;
            for _ in 0..n {
                edges.push(EdgeSpec::new(prev, next, [0, 0]));
                prev = next;
                next += 1;
            }
            edges.push(EdgeSpec::new(prev, e.head, e.index));
        }
        FundamentalGraph::new(next - 1, edges)
    }
}

fn two_colorable(n: usize, edges: impl Iterator<Item = (usize, usize)> + Clone) -> bool {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, v) in edges {
        if u == v {
            return false;
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut color = vec![-1i8; n];
    for start in 0..n {
        if color[start] >= 0 {
            continue;
        }
        color[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if color[v] < 0 {
                    color[v] = 1 - color[u];
                    queue.push_back(v);
                } else if color[v] == color[u] {
                    return false;
                }
            }
        }
    }
    true
}

/// True iff the given integer vectors generate all of Z^2. Row-reduces the
/// generator list to Hermite form and checks the index of the lattice is 1.
fn hermite_full_lattice(gens: &[Index]) -> bool {
    // Reduce to at most two rows (a, b; 0, d) with a = gcd of first
    // coordinates achieved by extended-gcd row combinations.
    let mut rows: Vec<Index> = gens.to_vec();
    // eliminate first column down to a single pivot
    let mut pivot: Option<Index> = None;
    let mut rest: Vec<i64> = Vec::new();
    for r in rows.drain(..) {
        match pivot {
            None => {
                if r != [0, 0] {
                    pivot = Some(r);
                }
            }
            Some(p) => {
                let (combined, leftover) = gcd_rows(p, r);
                pivot = Some(combined);
                if leftover != 0 {
                    rest.push(leftover);
                }
            }
        }
    }
    let p = match pivot {
        None => return false,
        Some(p) => p,
    };
    if p[0] == 0 {
        // all generators lie in {0} x Z
        return false;
    }
    let d = rest.iter().fold(0i64, |acc, &x| gcd(acc, x));
    if d == 0 {
        return false;
    }
    (p[0] * d).abs() == 1
}

/// Combine rows (a1, b1), (a2, b2) so the first has gcd(a1, a2) in its
/// first slot; returns it plus the zero-first-column remainder's second slot.
fn gcd_rows(r1: Index, r2: Index) -> (Index, i64) {
    let (mut a, mut b) = (r1, r2);
    // Euclidean algorithm on the first coordinates, applied to whole rows.
    while b[0] != 0 {
        let q = a[0].div_euclid(b[0]);
        let t = [a[0] - q * b[0], a[1] - q * b[1]];
        a = b;
        b = t;
    }
    (a, b[1])
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// ------------------------------------------------------------------
// Catalog constructions
// ------------------------------------------------------------------

/// Square lattice: one vertex, loops with indices (1,0) and (0,1).
pub fn square_lattice() -> FundamentalGraph {
    FundamentalGraph::new(
        1,
        vec![EdgeSpec::new(1, 1, [1, 0]), EdgeSpec::new(1, 1, [0, 1])],
    )
    .unwrap()
    .with_name("square")
}

/// Triangular lattice: square lattice plus the diagonal loop (1,1).
pub fn triangular_lattice() -> FundamentalGraph {
    square_lattice()
        .add_edge(1, 1, [1, 1])
        .unwrap()
        .with_name("triangular")
}

/// Hexagonal lattice (graphene): two vertices, triple edge with indices
/// (0,0), (1,0), (0,1).
pub fn graphene() -> FundamentalGraph {
    FundamentalGraph::new(
        2,
        vec![
            EdgeSpec::new(1, 2, [0, 0]),
            EdgeSpec::new(1, 2, [1, 0]),
            EdgeSpec::new(1, 2, [0, 1]),
        ],
    )
    .unwrap()
    .with_name("graphene")
}

/// Kagome lattice: three vertices of degree 4, double edges between each pair.
pub fn kagome() -> FundamentalGraph {
    FundamentalGraph::new(
        3,
        vec![
            EdgeSpec::new(1, 2, [0, 0]),
            EdgeSpec::new(1, 2, [-1, 0]),
            EdgeSpec::new(1, 3, [0, 0]),
            EdgeSpec::new(1, 3, [0, -1]),
            EdgeSpec::new(2, 3, [0, 0]),
            EdgeSpec::new(2, 3, [1, -1]),
        ],
    )
    .unwrap()
    .with_name("kagome")
}

/// Decorated square lattice: the square-lattice vertex v_nu plus `nu - 1`
/// pendant vertices attached by zero-index edges. The measure bound
/// 2 * sum b_jk / sqrt(k_j k_k) is attained with equality on this family.
pub fn decorated_square(nu: usize) -> Result<FundamentalGraph, GraphError> {
    if nu < 2 {
        return Err(GraphError::BadParams("decorated square needs nu >= 2".into()));
    }
    let mut edges = vec![
        EdgeSpec::new(nu, nu, [1, 0]),
        EdgeSpec::new(nu, nu, [0, 1]),
    ];
    for j in 1..nu {
        edges.push(EdgeSpec::new(j, nu, [0, 0]));
    }
    Ok(FundamentalGraph::new(nu, edges)?.with_name(format!("decorated_square_{nu}")))
}

/// Square lattice with `n` extra vertices on every edge.
pub fn subdivided_square(n: usize) -> Result<FundamentalGraph, GraphError> {
    Ok(square_lattice()
        .subdivide_all_edges(n)?
        .with_name(format!("subdivided_square_{n}")))
}

/// Square lattice plus one extra loop with index `tau`.
pub fn perturbed_square(tau: Index) -> FundamentalGraph {
    square_lattice()
        .add_edge(1, 1, tau)
        .unwrap()
        .with_name(format!("perturbed_square_{}_{}", tau[0], tau[1]))
}

/// Graphene plus one extra (v1, v2) edge with index `tau` (stays bipartite).
pub fn graphene_plus_edge(tau: Index) -> FundamentalGraph {
    graphene()
        .add_edge(1, 2, tau)
        .unwrap()
        .with_name(format!("graphene_edge_{}_{}", tau[0], tau[1]))
}

/// Graphene plus a loop with index `tau` at vertex 2 (breaks bipartiteness).
pub fn graphene_plus_loop(tau: Index) -> FundamentalGraph {
    graphene()
        .add_edge(2, 2, tau)
        .unwrap()
        .with_name(format!("graphene_loop_{}_{}", tau[0], tau[1]))
}

/// Two vertices joined by |d1| * |d2| edges whose indices run over the
/// product set d1 x d2.
pub fn product_two_vertex(d1: &[i64], d2: &[i64]) -> Result<FundamentalGraph, GraphError> {
    if d1.is_empty() || d2.is_empty() {
        return Err(GraphError::BadParams("index sets must be nonempty".into()));
    }
    let mut edges = Vec::with_capacity(d1.len() * d2.len());
    for &t1 in d1 {
        for &t2 in d2 {
            edges.push(EdgeSpec::new(1, 2, [t1, t2]));
        }
    }
    Ok(FundamentalGraph::new(2, edges)?.with_name("product_two_vertex"))
}

/// Look up a catalog family by name with `key=value` parameters.
pub fn catalog(name: &str, params: &[(String, String)]) -> Result<FundamentalGraph, GraphError> {
    let get = |key: &str| -> Option<&str> {
        params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    };
    let int = |key: &str| -> Result<i64, GraphError> {
        get(key)
            .ok_or_else(|| GraphError::BadParams(format!("missing parameter `{key}`")))?
            .parse()
            .map_err(|_| GraphError::BadParams(format!("parameter `{key}` must be an integer")))
    };
    let int_list = |key: &str| -> Result<Vec<i64>, GraphError> {
        get(key)
            .ok_or_else(|| GraphError::BadParams(format!("missing parameter `{key}`")))?
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| GraphError::BadParams(format!("bad integer in `{key}`")))
            })
            .collect()
    };
    match name {
        "square" => Ok(square_lattice()),
        "triangular" => Ok(triangular_lattice()),
        "graphene" | "hexagonal" => Ok(graphene()),
        "kagome" => Ok(kagome()),
        "decorated_square" => {
            let nu = int("nu")?;
            if nu < 2 {
                return Err(GraphError::BadParams("nu must be >= 2".into()));
            }
            decorated_square(nu as usize)
        }
        "subdivided_square" => {
            let n = int("n")?;
            if n < 1 {
                return Err(GraphError::BadParams("n must be >= 1".into()));
            }
            subdivided_square(n as usize)
        }
        "perturbed_square" => Ok(perturbed_square([int("t1")?, int("t2")?])),
        "graphene_edge" => Ok(graphene_plus_edge([int("t1")?, int("t2")?])),
        "graphene_loop" => Ok(graphene_plus_loop([int("t1")?, int("t2")?])),
        "product_two_vertex" => product_two_vertex(&int_list("d1")?, &int_list("d2")?),
        other => Err(GraphError::UnknownFamily(other.to_string())),
    }
}

// ------------------------------------------------------------------
// Graph file format
// ------------------------------------------------------------------

/// On-disk document: `name`, `nu`, and `edges` as `[tail, head, t1, t2]`
/// quadruples. Field names are part of the format contract.
#[derive(Debug, Serialize, Deserialize)]
struct GraphDocument {
    name: String,
    nu: usize,
    edges: Vec<[i64; 4]>,
}

impl FundamentalGraph {
    pub fn to_json(&self) -> String {
        let doc = GraphDocument {
            name: self.name.clone().unwrap_or_default(),
            nu: self.nu,
            edges: self
                .edges
                .iter()
                .map(|e| [e.tail as i64, e.head as i64, e.index[0], e.index[1]])
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("graph document serialization")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphDocument = serde_json::from_str(text)
            .map_err(|e| GraphError::BadParams(format!("invalid graph document: {e}")))?;
        let edges = doc
            .edges
            .iter()
            .map(|&[t, h, t1, t2]| {
                if t < 1 || h < 1 {
                    return Err(GraphError::InvalidVertexId(0, doc.nu));
                }
                Ok(EdgeSpec::new(t as usize, h as usize, [t1, t2]))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let g = FundamentalGraph::new(doc.nu, edges)?;
        Ok(if doc.name.is_empty() {
            g
        } else {
            g.with_name(doc.name)
        })
    }
}
