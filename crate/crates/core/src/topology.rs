//! Game boards: simple connected undirected graphs, grids, and trees.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::game::Assignment;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopologyError {
    #[error("graph has no nodes")]
    Empty,
    #[error("edge ({0}, {1}) refers to a node outside the graph")]
    NodeOutOfRange(NodeId, NodeId),
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("graph is not connected")]
    Disconnected,
    #[error("{0} is too small")]
    TooSmall(String),
    #[error("graph is not a tree")]
    NotATree,
}

/// Shape of a topology built by [`grid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridShape {
    pub rows: usize,
    pub cols: usize,
}

impl GridShape {
    /// Id of the 1-based cell `(i, j)`.
    pub fn node(&self, i: usize, j: usize) -> NodeId {
        debug_assert!((1..=self.rows).contains(&i) && (1..=self.cols).contains(&j));
        (i - 1) * self.cols + (j - 1)
    }

    /// 1-based `(row, col)` of a node.
    pub fn coords(&self, node: NodeId) -> (usize, usize) {
        (node / self.cols + 1, node % self.cols + 1)
    }
}

/// A simple connected undirected graph with dense node ids `0..node_count`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Topology {
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
    grid: Option<GridShape>,
}

impl Topology {
    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbour list.
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    pub fn are_adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn grid_shape(&self) -> Option<GridShape> {
        self.grid
    }

    /// Edges `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn is_tree(&self) -> bool {
        self.edge_count + 1 == self.node_count()
    }

    /// Attaches grid metadata to a graph that is already the `rows × cols`
    /// grid under the row-major id convention.
    pub fn with_grid_shape(mut self, shape: GridShape) -> Result<Self, TopologyError> {
        let reference = grid(shape.rows, shape.cols)?;
        if reference.adjacency != self.adjacency {
            return Err(TopologyError::TooSmall(format!(
                "graph does not match a {}x{} grid",
                shape.rows, shape.cols
            )));
        }
        self.grid = Some(shape);
        Ok(self)
    }

    /// Component sizes left after deleting `removed`.
    pub fn component_sizes_without(&self, removed: NodeId) -> Vec<usize> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        seen[removed] = true;
        let mut sizes = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut size = 0;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                size += 1;
                for &v in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            sizes.push(size);
        }
        sizes
    }

    /// Graphviz rendering, optionally colouring nodes by the type they host.
    pub fn to_dot(&self, assignment: Option<&Assignment>) -> String {
        const PALETTE: [&str; 12] = [
            "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#ffff33", "#a65628",
            "#f781bf", "#999999", "#66c2a5", "#fc8d62", "#8da0cb",
        ];
        let mut out = String::from("graph schelling {\n  node [style=filled];\n");
        for node in 0..self.node_count() {
            let ty = assignment.map_or(0, |a| a.type_at(node));
            let (label, fill) = if ty == 0 {
                (format!("{node}"), "#ffffff")
            } else {
                (format!("{node}:T{ty}"), PALETTE[(ty as usize - 1) % PALETTE.len()])
            };
            let _ = writeln!(out, "  {node} [label=\"{label}\", fillcolor=\"{fill}\"];");
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}

pub fn build_graph(node_count: usize, edges: &[(NodeId, NodeId)]) -> Result<Topology, TopologyError> {
    if node_count == 0 {
        return Err(TopologyError::Empty);
    }
    let mut adjacency = vec![Vec::new(); node_count];
    for &(u, v) in edges {
        if u >= node_count || v >= node_count {
            return Err(TopologyError::NodeOutOfRange(u, v));
        }
        if u == v {
            return Err(TopologyError::SelfLoop(u));
        }
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    for (u, ns) in adjacency.iter_mut().enumerate() {
        ns.sort_unstable();
        if let Some(w) = ns.windows(2).find(|w| w[0] == w[1]) {
            return Err(TopologyError::DuplicateEdge(u.min(w[0]), u.max(w[0])));
        }
    }
    let topology = Topology { adjacency, edge_count: edges.len(), grid: None };
    if node_count > 1 && topology.reachable_from_zero() != node_count {
        return Err(TopologyError::Disconnected);
    }
    Ok(topology)
}

impl Topology {
    fn reachable_from_zero(&self) -> usize {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 0;
        while let Some(u) = stack.pop() {
            count += 1;
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        count
    }
}

/// The `rows × cols` 4-neighbourhood grid; cell `(i, j)` is node
/// `(i-1)·cols + (j-1)`.
pub fn grid(rows: usize, cols: usize) -> Result<Topology, TopologyError> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(TopologyError::TooSmall(format!("{rows}x{cols} grid")));
    }
    let shape = GridShape { rows, cols };
    let mut edges = Vec::with_capacity(rows * (cols - 1) + cols * (rows - 1));
    for i in 1..=rows {
        for j in 1..=cols {
            if j < cols {
                edges.push((shape.node(i, j), shape.node(i, j + 1)));
            }
            if i < rows {
                edges.push((shape.node(i, j), shape.node(i + 1, j)));
            }
        }
    }
    let mut topology = build_graph(rows * cols, &edges)?;
    topology.grid = Some(shape);
    Ok(topology)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphKind {
    Path,
    Cycle,
    Clique,
    /// Node 0 is the centre.
    Star,
}

pub fn standard_graph(kind: GraphKind, size: usize) -> Result<Topology, TopologyError> {
    let min = if kind == GraphKind::Cycle { 3 } else { 2 };
    if size < min {
        return Err(TopologyError::TooSmall(format!("{kind:?} of size {size}")));
    }
    let edges: Vec<_> = match kind {
        GraphKind::Path => (1..size).map(|v| (v - 1, v)).collect(),
        GraphKind::Cycle => (0..size).map(|v| (v, (v + 1) % size)).collect(),
        GraphKind::Clique => (0..size).flat_map(|u| (u + 1..size).map(move |v| (u, v))).collect(),
        GraphKind::Star => (1..size).map(|v| (0, v)).collect(),
    };
    build_graph(size, &edges)
}

/// A node whose removal leaves components of at most `⌊n/2⌋` nodes; the
/// smallest such id.
pub fn centroid(tree: &Topology) -> Result<NodeId, TopologyError> {
    if !tree.is_tree() {
        return Err(TopologyError::NotATree);
    }
    let n = tree.node_count();
    if n < 3 {
        return Err(TopologyError::TooSmall(format!("tree with {n} nodes")));
    }
    let rooted = RootedTree::new(tree, 0)?;
    let size = rooted.subtree_sizes();
    (0..n)
        .find(|&v| {
            let above = n - size[v];
            let below = rooted.children(v).iter().map(|&c| size[c]).max().unwrap_or(0);
            above.max(below) <= n / 2
        })
        .ok_or(TopologyError::NotATree)
}

/// A tree topology hung from a chosen root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    root: NodeId,
    parent: Vec<Option<NodeId>>,
    depth: Vec<usize>,
    children: Vec<Vec<NodeId>>,
    /// Breadth-first order from the root.
    order: Vec<NodeId>,
}

impl RootedTree {
    pub fn new(tree: &Topology, root: NodeId) -> Result<Self, TopologyError> {
        if !tree.is_tree() {
            return Err(TopologyError::NotATree);
        }
        let n = tree.node_count();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut children = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        let mut visited = vec![false; n];
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in tree.neighbors(u) {
                if !visited[v] {
                    visited[v] = true;
                    parent[v] = Some(u);
                    depth[v] = depth[u] + 1;
                    children[u].push(v);
                    queue.push_back(v);
                }
            }
        }
        Ok(Self { root, parent, depth, children, order })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.parent[node]
    }

    pub fn depth(&self, node: NodeId) -> usize {
        self.depth[node]
    }

    /// Children in ascending id order.
    pub fn children(&self, node: NodeId) -> &[NodeId] {
        &self.children[node]
    }

    pub fn bfs_order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1; self.parent.len()];
        for &v in self.order.iter().rev() {
            if let Some(p) = self.parent[v] {
                size[p] += size[v];
            }
        }
        size
    }

    /// Nodes of the subtree rooted at `top`, breadth-first.
    pub fn descendants(&self, top: NodeId) -> Vec<NodeId> {
        let mut out = vec![top];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.children[out[i]]);
            i += 1;
        }
        out
    }
}

/// Every connected graph on `nodes` vertices up to isomorphism, each in a
/// canonical labelling. Intended for exhaustive checks on small boards
/// (`nodes ≤ 8`).
pub fn connected_graphs(nodes: usize) -> Vec<Topology> {
    assert!((1..=8).contains(&nodes), "connected_graphs supports 1..=8 nodes");
    // Every connected graph has a non-cut vertex, so growing connected graphs
    // one vertex at a time reaches all of them.
    let mut layer: BTreeSet<u64> = BTreeSet::from([0]);
    for k in 1..nodes {
        let mut next = BTreeSet::new();
        for &code in &layer {
            let adjacency = decode(code, k);
            for mask in 1u32..(1 << k) {
                let mut grown: Vec<u32> = adjacency.clone();
                grown.push(mask);
                for (v, row) in grown.iter_mut().enumerate().take(k) {
                    if mask & (1 << v) != 0 {
                        *row |= 1 << k;
                    }
                }
                next.insert(canonical_code(&grown));
            }
        }
        layer = next;
    }
    layer
        .into_iter()
        .map(|code| {
            let adjacency = decode(code, nodes);
            let edges: Vec<_> = (0..nodes)
                .flat_map(|u| (u + 1..nodes).map(move |v| (u, v)))
                .filter(|&(u, v)| adjacency[u] & (1 << v) != 0)
                .collect();
            build_graph(nodes, &edges).expect("generated graphs are connected")
        })
        .collect()
}

fn pair_index(u: usize, v: usize) -> usize {
    // Position of (u, v), u < v, in the order (0,1), (0,2), (1,2), (0,3), ...
    v * (v - 1) / 2 + u
}

fn encode(adjacency: &[u32], perm: &[usize]) -> u64 {
    let n = adjacency.len();
    let mut code = 0u64;
    for u in 0..n {
        for v in u + 1..n {
            if adjacency[u] & (1 << v) != 0 {
                let (a, b) = (perm[u].min(perm[v]), perm[u].max(perm[v]));
                code |= 1 << pair_index(a, b);
            }
        }
    }
    code
}

fn decode(code: u64, n: usize) -> Vec<u32> {
    let mut adjacency = vec![0u32; n];
    for v in 1..n {
        for u in 0..v {
            if code & (1 << pair_index(u, v)) != 0 {
                adjacency[u] |= 1 << v;
                adjacency[v] |= 1 << u;
            }
        }
    }
    adjacency
}

/// Minimum code over relabellings that order vertices by degree.
fn canonical_code(adjacency: &[u32]) -> u64 {
    let n = adjacency.len();
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (adjacency[v].count_ones(), v));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &by_degree {
        match classes.last_mut() {
            Some(class) if adjacency[class[0]].count_ones() == adjacency[v].count_ones() => class.push(v),
            _ => classes.push(vec![v]),
        }
    }
    let mut best = u64::MAX;
    let mut perm = vec![0; n];
    permute_classes(adjacency, &mut classes, 0, 0, &mut perm, &mut best);
    best
}

fn permute_classes(
    adjacency: &[u32],
    classes: &mut [Vec<usize>],
    class: usize,
    offset: usize,
    perm: &mut [usize],
    best: &mut u64,
) {
    if class == classes.len() {
        *best = (*best).min(encode(adjacency, perm));
        return;
    }
    let len = classes[class].len();
    heap_permutations(classes, class, len, offset, adjacency, perm, best);
}

fn heap_permutations(
    classes: &mut [Vec<usize>],
    class: usize,
    k: usize,
    offset: usize,
    adjacency: &[u32],
    perm: &mut [usize],
    best: &mut u64,
) {
    if k <= 1 {
        let len = classes[class].len();
        for (slot, &v) in classes[class].iter().enumerate() {
            perm[v] = offset + slot;
        }
        permute_classes(adjacency, classes, class + 1, offset + len, perm, best);
        return;
    }
    for i in 0..k {
        heap_permutations(classes, class, k - 1, offset, adjacency, perm, best);
        let swap = if k % 2 == 0 { i } else { 0 };
        classes[class].swap(swap, k - 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_graph_errors() {
        let p3 = build_graph(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(p3.edge_count(), 2);
        assert_eq!(p3.neighbors(1), &[0, 2]);
        assert_eq!(build_graph(2, &[]), Err(TopologyError::Disconnected));
        assert_eq!(build_graph(1, &[(0, 0)]), Err(TopologyError::SelfLoop(0)));
        assert_eq!(build_graph(3, &[(0, 1), (1, 0), (1, 2)]), Err(TopologyError::DuplicateEdge(0, 1)));
        assert_eq!(build_graph(2, &[(0, 5)]), Err(TopologyError::NodeOutOfRange(0, 5)));
    }

    #[test]
    fn grids() {
        let g = grid(2, 3).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (6, 7));
        let g = grid(4, 4).unwrap();
        let shape = g.grid_shape().unwrap();
        assert_eq!(g.degree(shape.node(1, 1)), 2);
        assert_eq!(g.degree(shape.node(4, 4)), 2);
        assert_eq!(g.degree(shape.node(2, 3)), 4);
        assert_eq!(shape.coords(shape.node(3, 2)), (3, 2));
        let line = grid(1, 5).unwrap();
        assert_eq!(line.edge_count(), 4);
        assert!(line.is_tree());
        assert!(grid(1, 1).is_err());
    }

    #[test]
    fn standard_graphs() {
        let k3 = standard_graph(GraphKind::Clique, 3).unwrap();
        assert!((0..3).all(|v| k3.degree(v) == 2));
        let star = standard_graph(GraphKind::Star, 4).unwrap();
        assert_eq!(star.degree(0), 3);
        assert_eq!(standard_graph(GraphKind::Path, 5).unwrap().edge_count(), 4);
        assert!(standard_graph(GraphKind::Cycle, 2).is_err());
    }

    #[test]
    fn centroids() {
        assert_eq!(centroid(&standard_graph(GraphKind::Path, 5).unwrap()), Ok(2));
        assert_eq!(centroid(&standard_graph(GraphKind::Star, 6).unwrap()), Ok(0));
        // Balanced binary tree, root 0, children 2i+1 and 2i+2.
        let edges: Vec<_> = (1..7).map(|v| ((v - 1) / 2, v)).collect();
        let tree = build_graph(7, &edges).unwrap();
        assert_eq!(centroid(&tree), Ok(0));
        assert_eq!(centroid(&standard_graph(GraphKind::Cycle, 4).unwrap()), Err(TopologyError::NotATree));
        assert!(matches!(centroid(&standard_graph(GraphKind::Path, 2).unwrap()), Err(TopologyError::TooSmall(_))));
    }

    #[test]
    fn connected_graph_counts() {
        let counts: Vec<_> = (1..=7).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112, 853]);
    }

    #[test]
    fn dot_export_lists_every_edge() {
        let g = grid(2, 2).unwrap();
        let dot = g.to_dot(None);
        assert_eq!(dot.matches(" -- ").count(), 4);
        assert!(dot.starts_with("graph schelling {"));
    }
}
