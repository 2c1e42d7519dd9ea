//! Weighted directed graphs, their Laplacians and structural queries.
//!
//! An edge `(i, j)` points from the tail `i` to the head `j` and means that
//! agent `i` measures agent `j`: row `i` of the Laplacian carries `-w_ij` in
//! column `j` and the out-degree `d⁺_i` on the diagonal.

mod delaunay;
mod family;
mod io;
mod random;

use std::collections::{BTreeMap, VecDeque};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use family::Family;
pub use io::{read_graph, write_graph};
pub use random::random_connected;

/// Tolerance for structural predicates (balance, normality, symmetry).
pub const STRUCT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub weight: f64,
}

/// A weighted graph on nodes `0..node_count`.
///
/// Edges are kept sorted by `(tail, head)` with at most one edge per ordered
/// pair. Undirected graphs store both orientations with equal weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<Edge>,
    directed: bool,
    w_max: f64,
}

impl Graph {
    /// Builds a directed graph from `(tail, head, weight)` triples.
    pub fn directed(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, j, w) in edges {
            check_edge(node_count, i, j, w)?;
            if map.insert((i, j), w).is_some() {
                return Err(Error::domain(format!("duplicate edge ({}, {})", i, j)));
            }
        }
        Ok(Self::from_map(node_count, map, true))
    }

    /// Builds an undirected graph; each pair is listed once, in either order.
    pub fn undirected(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, j, w) in edges {
            check_edge(node_count, i, j, w)?;
            if map.insert((i, j), w).is_some() || map.insert((j, i), w).is_some() {
                return Err(Error::domain(format!("duplicate edge {{{}, {}}}", i, j)));
            }
        }
        Ok(Self::from_map(node_count, map, false))
    }

    fn from_map(node_count: usize, map: BTreeMap<(usize, usize), f64>, directed: bool) -> Self {
        let edges: Vec<Edge> = map
            .into_iter()
            .map(|((tail, head), weight)| Edge { tail, head, weight })
            .collect();
        let w_max = edges.iter().map(|e| e.weight).fold(0.0, f64::max);
        Graph {
            node_count,
            edges,
            directed,
            w_max,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// All stored edges. Undirected graphs report both orientations.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Largest edge weight (0 for an edgeless graph).
    pub fn w_max(&self) -> f64 {
        self.w_max
    }

    pub fn weight(&self, tail: usize, head: usize) -> f64 {
        self.edges
            .binary_search_by(|e| (e.tail, e.head).cmp(&(tail, head)))
            .map(|k| self.edges[k].weight)
            .unwrap_or(0.0)
    }

    /// Outgoing edges of `node`, i.e. the agents it measures.
    pub fn out_edges(&self, node: usize) -> &[Edge] {
        let lo = self.edges.partition_point(|e| e.tail < node);
        let hi = self.edges.partition_point(|e| e.tail <= node);
        &self.edges[lo..hi]
    }

    pub fn out_degree(&self, node: usize) -> f64 {
        self.out_edges(node).iter().map(|e| e.weight).sum()
    }

    pub fn in_degree(&self, node: usize) -> f64 {
        self.edges
            .iter()
            .filter(|e| e.head == node)
            .map(|e| e.weight)
            .sum()
    }

    /// Returns a copy with one additional edge (both orientations when undirected).
    pub fn with_edge(&self, tail: usize, head: usize, weight: f64) -> Result<Self> {
        let mut list: Vec<(usize, usize, f64)> = self.unique_edges().collect();
        list.push((tail, head, weight));
        if self.directed {
            Graph::directed(self.node_count, list)
        } else {
            Graph::undirected(self.node_count, list)
        }
    }

    /// Returns a copy where the weight of an existing edge is replaced.
    pub fn with_weight(&self, tail: usize, head: usize, weight: f64) -> Result<Self> {
        check_edge(self.node_count, tail, head, weight)?;
        let mut found = false;
        let mut out = self.clone();
        for e in &mut out.edges {
            let hit = (e.tail == tail && e.head == head)
                || (!self.directed && e.tail == head && e.head == tail);
            if hit {
                e.weight = weight;
                found = true;
            }
        }
        if !found {
            return Err(Error::domain(format!("no edge ({}, {})", tail, head)));
        }
        out.w_max = out.edges.iter().map(|e| e.weight).fold(0.0, f64::max);
        Ok(out)
    }

    /// Edges as triples, listing each undirected pair once with `tail < head`.
    pub fn unique_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let directed = self.directed;
        self.edges
            .iter()
            .filter(move |e| directed || e.tail < e.head)
            .map(|e| (e.tail, e.head, e.weight))
    }

    /// Number of distinct neighbors of each node, counting both directions.
    pub fn neighborhood_sizes(&self) -> Vec<usize> {
        let adj = self.undirected_adjacency();
        adj.iter().map(Vec::len).collect()
    }

    fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Nodes that have a directed path (along edge orientation) to `root`.
    fn nodes_reaching(&self, root: usize) -> Vec<bool> {
        let mut incoming = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            if e.weight > 0.0 {
                incoming[e.head].push(e.tail);
            }
        }
        bfs(&incoming, root)
    }

    /// Nodes reachable from `root` along edge orientation.
    fn nodes_reached_from(&self, root: usize) -> Vec<bool> {
        let mut outgoing = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            if e.weight > 0.0 {
                outgoing[e.tail].push(e.head);
            }
        }
        bfs(&outgoing, root)
    }

    /// True when every node has a directed path to `root`, so that information
    /// from `root` propagates to all agents.
    pub fn is_root(&self, root: usize) -> bool {
        root < self.node_count && self.nodes_reaching(root).iter().all(|&v| v)
    }

    /// Dense adjacency matrix with `A[i][j] = w_ij`.
    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.node_count, self.node_count);
        for e in &self.edges {
            a[(e.tail, e.head)] = e.weight;
        }
        a
    }

    /// Computes `y = L x` from the edge list without forming `L`.
    pub fn laplacian_apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for e in &self.edges {
            y[e.tail] += e.weight * (x[e.tail] - x[e.head]);
        }
    }
}

fn check_edge(node_count: usize, i: usize, j: usize, w: f64) -> Result<()> {
    if i >= node_count || j >= node_count {
        return Err(Error::domain(format!(
            "edge ({}, {}) out of range for {} nodes",
            i, j, node_count
        )));
    }
    if i == j {
        return Err(Error::domain(format!("self-loop at node {}", i)));
    }
    if !(w.is_finite() && w >= 0.0) {
        return Err(Error::domain(format!(
            "edge ({}, {}) has invalid weight {}",
            i, j, w
        )));
    }
    Ok(())
}

fn bfs(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    seen
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianKind {
    Full,
    /// Leader row and column removed.
    Grounded {
        leader: usize,
    },
    /// Symmetric part `(L + Lᵀ)/2`.
    Mirror,
}

/// A dense Laplacian together with the variant it represents.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    pub matrix: DMatrix<f64>,
    pub kind: LaplacianKind,
}

impl Laplacian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        let m = &self.matrix;
        (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= STRUCT_TOL))
    }
}

/// `L = D − A` and its grounded and mirror variants.
pub fn build_laplacian(g: &Graph, kind: LaplacianKind) -> Result<Laplacian> {
    let n = g.node_count();
    let mut full = DMatrix::zeros(n, n);
    for e in g.edges() {
        full[(e.tail, e.head)] -= e.weight;
        full[(e.tail, e.tail)] += e.weight;
    }
    let matrix = match kind {
        LaplacianKind::Full => full,
        LaplacianKind::Grounded { leader } => {
            if leader >= n {
                return Err(Error::domain(format!(
                    "leader index {} out of range for {} nodes",
                    leader, n
                )));
            }
            full.remove_row(leader).remove_column(leader)
        }
        LaplacianKind::Mirror => (&full + full.transpose()) * 0.5,
    };
    Ok(Laplacian { matrix, kind })
}

/// Undirected graph with weights `(w_ij + w_ji) / 2`.
pub fn mirror_graph(g: &Graph) -> Graph {
    if !g.is_directed() {
        return g.clone();
    }
    let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for e in g.edges() {
        let key = (e.tail.min(e.head), e.tail.max(e.head));
        *map.entry(key).or_insert(0.0) += 0.5 * e.weight;
    }
    let mut both = BTreeMap::new();
    for ((i, j), w) in map {
        both.insert((i, j), w);
        both.insert((j, i), w);
    }
    Graph::from_map(g.node_count(), both, false)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuralFacts {
    pub balanced: bool,
    pub normal: bool,
    /// Some node is reached (through the measurement graph) by every agent.
    pub has_spanning_tree: bool,
    pub strongly_connected: bool,
    pub max_neighborhood: usize,
    /// Hop diameter of the mirror graph; `None` when it is disconnected.
    pub diameter: Option<usize>,
}

pub fn structural_facts(g: &Graph) -> StructuralFacts {
    let n = g.node_count();
    let balanced = (0..n).all(|i| (g.out_degree(i) - g.in_degree(i)).abs() <= STRUCT_TOL);

    let l = build_laplacian(g, LaplacianKind::Full)
        .expect("full Laplacian has no failure mode")
        .matrix;
    let lt = l.transpose();
    let commutator = &lt * &l - &l * &lt;
    let normal = commutator.amax() <= STRUCT_TOL;

    let has_spanning_tree = (0..n).any(|r| g.is_root(r));
    let strongly_connected = n > 0
        && g.nodes_reaching(0).iter().all(|&v| v)
        && g.nodes_reached_from(0).iter().all(|&v| v);

    let sizes = g.neighborhood_sizes();
    let max_neighborhood = sizes.iter().copied().max().unwrap_or(0);

    StructuralFacts {
        balanced,
        normal,
        has_spanning_tree,
        strongly_connected,
        max_neighborhood,
        diameter: hop_diameter(g),
    }
}

fn hop_diameter(g: &Graph) -> Option<usize> {
    let adj = g.undirected_adjacency();
    let n = g.node_count();
    let mut diameter = 0;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        let far = *dist.iter().max()?;
        if far == usize::MAX {
            return None;
        }
        diameter = diameter.max(far);
    }
    Some(diameter)
}

/// True when the mirror graph is connected and has exactly `N − 1` edges.
pub fn is_tree(g: &Graph) -> bool {
    let m = mirror_graph(g);
    let pairs = m.unique_edges().filter(|e| e.2 > 0.0).count();
    pairs + 1 == g.node_count() && hop_diameter(&m).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn path(n: usize) -> Graph {
        Graph::undirected(n, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap()
    }

    fn directed_cycle(n: usize) -> Graph {
        Graph::directed(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    #[test]
    fn two_node_laplacian() {
        let g = Graph::undirected(2, [(0, 1, 1.0)]).unwrap();
        let l = build_laplacian(&g, LaplacianKind::Full).unwrap();
        assert_eq!(l.matrix, dmatrix![1.0, -1.0; -1.0, 1.0]);
    }

    #[test]
    fn directed_cycle_rows() {
        let l = build_laplacian(&directed_cycle(3), LaplacianKind::Full).unwrap();
        for i in 0..3 {
            assert_eq!(l.matrix[(i, i)], 1.0);
            assert_eq!(l.matrix[(i, (i + 1) % 3)], -1.0);
            assert_eq!(l.matrix.row(i).sum(), 0.0);
        }
    }

    #[test]
    fn grounded_path() {
        // L = [[1,-1,0],[-1,2,-1],[0,-1,1]]; dropping node 0 leaves [[2,-1],[-1,1]].
        let l = build_laplacian(&path(3), LaplacianKind::Grounded { leader: 0 }).unwrap();
        assert_eq!(l.matrix, dmatrix![2.0, -1.0; -1.0, 1.0]);
        let err = build_laplacian(&path(3), LaplacianKind::Grounded { leader: 3 });
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn mirror_of_single_arc() {
        let g = Graph::directed(2, [(0, 1, 1.0)]).unwrap();
        let m = mirror_graph(&g);
        assert!(!m.is_directed());
        assert_eq!(m.weight(0, 1), 0.5);
        assert_eq!(m.weight(1, 0), 0.5);
    }

    #[test]
    fn mirror_of_undirected_is_identity() {
        let g = path(5);
        assert_eq!(mirror_graph(&g), g);
    }

    #[test]
    fn mirror_laplacian_is_symmetric_part() {
        let g = directed_cycle(4);
        let m = mirror_graph(&g);
        let lm = build_laplacian(&m, LaplacianKind::Full).unwrap().matrix;
        let ls = build_laplacian(&g, LaplacianKind::Mirror).unwrap().matrix;
        assert!((lm - ls).amax() < 1e-15);
        assert!(m.unique_edges().all(|(_, _, w)| w == 0.5));
        assert_eq!(m.unique_edges().count(), 4);
    }

    #[test]
    fn facts_directed_cycle() {
        let f = structural_facts(&directed_cycle(5));
        assert!(f.balanced && f.normal && f.strongly_connected && f.has_spanning_tree);
        assert_eq!(f.max_neighborhood, 2);
    }

    #[test]
    fn facts_one_way_chain() {
        let g = Graph::directed(4, (0..3).map(|i| (i, i + 1, 1.0))).unwrap();
        let f = structural_facts(&g);
        assert!(!f.balanced);
        assert!(!f.strongly_connected);
        // Every agent reaches node 3 along its measurements.
        assert!(f.has_spanning_tree);
        assert!(g.is_root(3));
        assert!(!g.is_root(0));
    }

    #[test]
    fn facts_path_diameter() {
        let f = structural_facts(&path(5));
        assert_eq!(f.diameter, Some(4));
        assert!(f.normal && f.balanced);
    }

    #[test]
    fn disconnected_has_no_spanning_tree() {
        let g = Graph::undirected(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let f = structural_facts(&g);
        assert!(!f.has_spanning_tree);
        assert_eq!(f.diameter, None);
    }

    #[test]
    fn rejects_invalid_edges() {
        assert!(Graph::directed(3, [(0, 0, 1.0)]).is_err());
        assert!(Graph::directed(3, [(0, 1, -1.0)]).is_err());
        assert!(Graph::directed(3, [(0, 5, 1.0)]).is_err());
        assert!(Graph::directed(3, [(0, 1, 1.0), (0, 1, 2.0)]).is_err());
        assert!(Graph::undirected(3, [(0, 1, 1.0), (1, 0, 1.0)]).is_err());
        assert!(Graph::directed(3, [(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn sparse_apply_matches_dense() {
        let g = Graph::directed(4, [(0, 1, 2.0), (1, 2, 0.5), (2, 0, 1.0), (3, 2, 3.0)]).unwrap();
        let l = build_laplacian(&g, LaplacianKind::Full).unwrap().matrix;
        let x = [1.0, -2.0, 0.5, 4.0];
        let mut y = [0.0; 4];
        g.laplacian_apply(&x, &mut y);
        let dense = &l * nalgebra::DVector::from_column_slice(&x);
        for i in 0..4 {
            assert!((dense[i] - y[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn tree_detection() {
        assert!(is_tree(&path(6)));
        let cyc = Graph::undirected(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        assert!(!is_tree(&cyc));
    }

    #[test]
    fn with_weight_updates_both_orientations() {
        let g = path(3).with_weight(1, 0, 2.5).unwrap();
        assert_eq!(g.weight(0, 1), 2.5);
        assert_eq!(g.weight(1, 0), 2.5);
        assert_eq!(g.w_max(), 2.5);
        assert!(path(3).with_weight(0, 2, 1.0).is_err());
    }
}
