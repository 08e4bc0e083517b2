//! Generators for every graph family used by the strategies and the test suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphError, GraphKind, GridWindow, TreeDecomposition, Vertex};

pub fn grid_window(xmin: i64, xmax: i64, ymin: i64, ymax: i64) -> Result<Graph, GraphError> {
    if xmin > xmax || ymin > ymax {
        return Err(GraphError::Malformed(format!("empty window [{},{}]x[{},{}]", xmin, xmax, ymin, ymax)));
    }
    let w = GridWindow { xmin, xmax, ymin, ymax };
    let mut edges = Vec::new();
    let mut boundary = Vec::new();
    for y in ymin..=ymax {
        for x in xmin..=xmax {
            let v = w.encode(x, y).unwrap();
            if x == xmin || x == xmax || y == ymin || y == ymax {
                boundary.push(v);
            }
            if x < xmax {
                edges.push((v, w.encode(x + 1, y).unwrap()));
            }
            if y < ymax {
                edges.push((v, w.encode(x, y + 1).unwrap()));
            }
        }
    }
    Graph::with_kind(w.width() * w.height(), &edges, GraphKind::Grid(w), boundary)
}

/// Finite `rows x cols` grid graph; vertex `r * cols + c`.
pub fn square_grid(rows: usize, cols: usize) -> Result<Graph, GraphError> {
    if rows == 0 || cols == 0 {
        return Err(GraphError::Malformed("grid needs at least one row and column".into()));
    }
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Graph::from_edges(rows * cols, &edges)
}

pub fn cycle(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::Malformed(format!("cycle needs n >= 3, got {}", n)));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::with_kind(n, &edges, GraphKind::Cycle, Vec::new())
}

pub fn path(n: usize) -> Result<Graph, GraphError> {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges)
}

pub fn complete(t: usize) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    for u in 0..t {
        for v in u + 1..t {
            edges.push((u, v));
        }
    }
    Graph::from_edges(t, &edges)
}

/// The `degree`-regular tree cut at `depth`; vertex 0 is the root, ids grow level by level.
pub fn regular_tree(degree: usize, depth: usize) -> Result<Graph, GraphError> {
    if degree < 2 {
        return Err(GraphError::Malformed(format!("regular tree needs degree >= 2, got {}", degree)));
    }
    let (parent, level) = tree_shape(degree, depth);
    let edges: Vec<_> = parent.iter().enumerate().filter_map(|(v, p)| p.map(|p| (p, v))).collect();
    let boundary: Vec<_> = (0..parent.len()).filter(|&v| level[v] == depth && depth > 0).collect();
    Graph::with_kind(parent.len(), &edges, GraphKind::Tree { degree, depth }, boundary)
}

fn tree_shape(degree: usize, depth: usize) -> (Vec<Option<usize>>, Vec<usize>) {
    let mut parent = vec![None];
    let mut level = vec![0];
    let mut frontier = vec![0usize];
    for d in 1..=depth {
        let mut next = Vec::new();
        for &p in &frontier {
            let children = if parent[p].is_none() { degree } else { degree - 1 };
            for _ in 0..children {
                parent.push(Some(p));
                level.push(d);
                next.push(parent.len() - 1);
            }
        }
        frontier = next;
    }
    (parent, level)
}

/// Graph with every edge replaced by a path of length `times + 1`.
/// Original vertices keep their ids; subdivision vertices follow.
pub fn subdivide(g: &Graph, times: usize) -> Graph {
    let mut edges = Vec::new();
    let mut next = g.n();
    for (u, v) in g.edges() {
        let mut prev = u;
        for _ in 0..times {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
        edges.push((prev, v));
    }
    Graph::with_kind(next, &edges, GraphKind::Composed, Vec::new()).expect("subdivision of a connected graph")
}

/// One materialized branch `G_i` of the hub graph.
#[derive(Debug, Clone)]
pub struct HubBranch {
    /// Tree degree `i`; every edge of `T_i + z_i` became a path of length `i`.
    pub degree: usize,
    /// Tree vertices of `T_i`; index 0 is the root.
    pub nodes: Vec<Vertex>,
    pub parent: Vec<Option<usize>>,
    pub level: Vec<usize>,
    /// Path (length `degree`) from each tree node's parent to the node, indexed by child.
    pub up_paths: Vec<Vec<Vertex>>,
    /// Path (length `degree`) from each tree node to the hub.
    pub hub_paths: Vec<Vec<Vertex>>,
}

impl HubBranch {
    pub fn children(&self, t: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&c| self.parent[c] == Some(t)).collect()
    }

    /// Tree neighbours of node `t` (parent first, then children).
    pub fn tree_neighbors(&self, t: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.parent[t].into_iter().collect();
        out.extend(self.children(t));
        out
    }

    /// Path from tree node `a` to adjacent tree node `b`.
    pub fn edge_path(&self, a: usize, b: usize) -> Option<Vec<Vertex>> {
        if self.parent[b] == Some(a) {
            Some(self.up_paths[b].clone())
        } else if self.parent[a] == Some(b) {
            let mut p = self.up_paths[a].clone();
            p.reverse();
            Some(p)
        } else {
            None
        }
    }

    pub fn node_of(&self, v: Vertex) -> Option<usize> {
        self.nodes.iter().position(|&x| x == v)
    }

    /// Whether all tree neighbours of `t` are materialized.
    pub fn is_interior(&self, t: usize, depth: usize) -> bool {
        self.level[t] < depth
    }
}

#[derive(Debug, Clone)]
pub struct HubGraph {
    pub graph: Graph,
    pub hub: Vertex,
    pub branches: Vec<HubBranch>,
    pub depth: usize,
}

impl HubGraph {
    pub fn branch(&self, i: usize) -> Option<&HubBranch> {
        self.branches.iter().find(|b| b.degree == i)
    }
}

/// Branches `i = 2..=i_max` of the hub graph: the `i`-regular tree plus a
/// universal vertex, every edge subdivided `i - 1` times, all universal
/// vertices identified into the hub (vertex 0). Trees are cut at `depth`.
pub fn hub_graph(i_max: usize, depth: usize) -> Result<HubGraph, GraphError> {
    if i_max < 2 {
        return Err(GraphError::Malformed(format!("hub graph needs i_max >= 2, got {}", i_max)));
    }
    let hub = 0;
    let mut next = 1;
    let mut edges = Vec::new();
    let mut boundary = vec![hub];
    let mut branches = Vec::new();
    let chain = |from: Vertex, to: Vertex, len: usize, next: &mut usize, edges: &mut Vec<(Vertex, Vertex)>| {
        let mut path = vec![from];
        for _ in 1..len {
            path.push(*next);
            *next += 1;
        }
        path.push(to);
        for w in path.windows(2) {
            edges.push((w[0], w[1]));
        }
        path
    };
    for i in 2..=i_max {
        let (parent, level) = tree_shape(i, depth);
        let nodes: Vec<Vertex> = (0..parent.len()).map(|k| next + k).collect();
        next += parent.len();
        for (k, &v) in nodes.iter().enumerate() {
            if level[k] == depth && depth > 0 {
                boundary.push(v);
            }
        }
        let mut up_paths = vec![Vec::new(); nodes.len()];
        for k in 0..nodes.len() {
            if let Some(p) = parent[k] {
                up_paths[k] = chain(nodes[p], nodes[k], i, &mut next, &mut edges);
            }
        }
        let hub_paths = nodes.iter().map(|&v| chain(v, hub, i, &mut next, &mut edges)).collect();
        branches.push(HubBranch { degree: i, nodes, parent, level, up_paths, hub_paths });
    }
    let graph = Graph::with_kind(next, &edges, GraphKind::Hub { i_max, depth }, boundary)?;
    Ok(HubGraph { graph, hub, branches, depth })
}

#[derive(Debug, Clone)]
pub struct Multitriangle {
    pub graph: Graph,
    /// The three vertices of the underlying triangle.
    pub corners: [Vertex; 3],
}

/// The triangle with every edge doubled and subdivided once, then every
/// resulting edge subdivided `i` more times.
pub fn subdivided_multitriangle(i: usize) -> Result<Multitriangle, GraphError> {
    let mut edges = Vec::new();
    let mut next = 3;
    for (a, b) in [(0, 1), (1, 2), (0, 2)] {
        for _ in 0..2 {
            edges.push((a, next));
            edges.push((next, b));
            next += 1;
        }
    }
    let base = Graph::with_kind(next, &edges, GraphKind::Multitriangle { subdivisions: 0 }, Vec::new())?;
    let mut graph = subdivide(&base, i);
    graph.kind = GraphKind::Multitriangle { subdivisions: i };
    Ok(Multitriangle { graph, corners: [0, 1, 2] })
}

/// Random connected partial 2-tree on `size` vertices with a width-2 decomposition.
/// Each new vertex attaches to one or both vertices of a pair inside an existing bag.
pub fn series_parallel(seed: u64, size: usize) -> Result<(Graph, TreeDecomposition), GraphError> {
    if size < 2 {
        return Err(GraphError::Malformed(format!("series-parallel graph needs size >= 2, got {}", size)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = vec![(0, 1)];
    let mut bags = vec![vec![0, 1]];
    let mut tree = Vec::new();
    for v in 2..size {
        let b = rng.gen_range(0..bags.len());
        let bag = &bags[b];
        let (a, c) = if bag.len() == 2 {
            (bag[0], bag[1])
        } else {
            let skip = rng.gen_range(0..3);
            let rest: Vec<_> = (0..3).filter(|&k| k != skip).map(|k| bag[k]).collect();
            (rest[0], rest[1])
        };
        edges.push((a, v));
        if rng.gen_bool(0.7) {
            edges.push((c, v));
        }
        let mut nb = vec![a, c, v];
        nb.sort_unstable();
        bags.push(nb);
        tree.push((b, bags.len() - 1));
    }
    let g = Graph::with_kind(size, &edges, GraphKind::SeriesParallel, Vec::new())?;
    Ok((g, TreeDecomposition { bags, edges: tree }))
}

/// Uniform random recursive tree: vertex `v` attaches to a random earlier vertex.
pub fn random_tree(n: usize, seed: u64) -> Result<Graph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    Graph::from_edges(n, &edges)
}

/// Random tree plus each remaining pair independently with probability `p`.
pub fn random_connected(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// All connected graphs on `n` vertices, one per isomorphism class, ordered by canonical code.
/// Exhaustive over edge subsets, so only practical for `n <= 7`.
pub fn connected_graphs(n: usize) -> Result<Vec<Graph>, GraphError> {
    if n == 0 || n > 7 {
        return Err(GraphError::Malformed(format!("connected graph enumeration supports 1..=7 vertices, got {}", n)));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut index = vec![vec![0usize; n]; n];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        index[u][v] = i;
        index[v][u] = i;
    }
    let perms = permutations(n);
    let mut seen = std::collections::BTreeSet::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        if !mask_connected(n, &pairs, mask) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                pairs.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).fold(0u64, |acc, (_, &(u, v))| acc | 1 << index[p[u]][p[v]])
            })
            .min()
            .unwrap();
        seen.insert(canon);
    }
    seen.into_iter()
        .map(|m| {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|&(i, _)| m >> i & 1 == 1).map(|(_, &e)| e).collect();
            Graph::from_edges(n, &edges)
        })
        .collect()
}

fn mask_connected(n: usize, pairs: &[(usize, usize)], mask: u64) -> bool {
    let mut reached = 1u64;
    loop {
        let before = reached;
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 && (reached >> u & 1 == 1 || reached >> v & 1 == 1) {
                reached |= 1 << u | 1 << v;
            }
        }
        if reached == before {
            return reached.count_ones() as usize == n;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for k in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=k).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    q
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connected_graph_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| connected_graphs(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn cycle_and_trees() {
        let g = cycle(12).unwrap();
        assert_eq!(g.n(), 12);
        assert!((0..12).all(|v| g.degree(v) == 2));
        assert_eq!(g.neighbors(0).unwrap(), &[1, 11]);
        let c4 = cycle(4).unwrap();
        assert_eq!(c4.neighbors(0).unwrap(), &[1, 3]);
        let t = regular_tree(3, 4).unwrap();
        assert_eq!(t.n(), 1 + 3 + 6 + 12 + 24);
        assert_eq!(t.degree(0), 3);
        assert!(t.is_boundary(t.n() - 1) && !t.is_boundary(0));
    }

    #[test]
    fn hub_neighbors_of_hub() {
        let hg = hub_graph(3, 2).unwrap();
        let g = &hg.graph;
        // count from the construction: 2-regular tree cut at depth 2 has 5 vertices, 3-regular has 1+3+6
        assert_eq!(g.degree(hg.hub), 5 + 10);
        let mut expected: Vec<Vertex> = hg.branches.iter().flat_map(|b| b.hub_paths.iter().map(|p| p[p.len() - 2])).collect();
        expected.sort_unstable();
        assert_eq!(g.neighbors(hg.hub).unwrap(), expected.as_slice());
        // hand construction for i = 2: edges become paths of length 2, so the hub's neighbours are
        // the midpoints, each adjacent to exactly one tree vertex
        let b2 = hg.branch(2).unwrap();
        for (k, p) in b2.hub_paths.iter().enumerate() {
            assert_eq!(p.len(), 3);
            assert_eq!(g.neighbors(p[1]).unwrap(), &{
                let mut s = [hg.hub, b2.nodes[k]];
                s.sort_unstable();
                s
            });
        }
    }

    #[test]
    fn hub_structure() {
        let hg = hub_graph(4, 2).unwrap();
        let g = &hg.graph;
        for b in &hg.branches {
            for k in 0..b.nodes.len() {
                let p = &b.hub_paths[k];
                assert_eq!(p.len(), b.degree + 1);
                assert!(g.is_walk(p));
                if b.parent[k].is_some() {
                    assert_eq!(b.up_paths[k].len(), b.degree + 1);
                    assert!(g.is_walk(&b.up_paths[k]));
                }
                let expected = b.tree_neighbors(k).len() + 1;
                assert_eq!(g.degree(b.nodes[k]), expected);
            }
            assert_eq!(b.tree_neighbors(0).len(), b.degree);
        }
        // G - hub is a forest: edges = vertices - components
        let n = g.n() - 1;
        let m = g.edge_count() - g.degree(hg.hub);
        assert_eq!(n - m, hg.branches.len());
    }

    #[test]
    fn multitriangle_counts() {
        let h = subdivided_multitriangle(0).unwrap();
        assert_eq!(h.graph.n(), 9);
        assert_eq!(h.graph.edge_count(), 12);
        assert_eq!((0..3).filter(|&v| h.graph.degree(v) == 4).count(), 3);
        assert_eq!((3..9).filter(|&v| h.graph.degree(v) == 2).count(), 6);
        let h1 = subdivided_multitriangle(1).unwrap();
        assert_eq!(h1.graph.n(), 9 + 12);
        assert_eq!(h1.graph.edge_count(), 24);
        assert!((3..h1.graph.n()).all(|v| h1.graph.degree(v) == 2));
        assert_eq!(h1.graph.dist_capped(0, 1, 10).unwrap().finite(), Some(4));
    }

    #[test]
    fn series_parallel_has_width_two() {
        for seed in 0..10 {
            let (g, td) = series_parallel(seed, 40).unwrap();
            assert_eq!(g.n(), 40);
            assert_eq!(td.width(), 2);
            td.validate(&g).unwrap();
            for &(a, b) in &td.edges {
                assert_ne!(td.bags[a], td.bags[b]);
            }
        }
    }

    #[test]
    fn subdivision_lengths() {
        let k4 = complete(4).unwrap();
        let s = subdivide(&k4, 2);
        assert_eq!(s.n(), 4 + 6 * 2);
        for u in 0..4 {
            for v in u + 1..4 {
                assert_eq!(s.dist_capped(u, v, 10).unwrap().finite(), Some(3));
            }
        }
    }

    #[test]
    fn grid_codec_round_trip() {
        let g = grid_window(-3, 4, -2, 5).unwrap();
        let w = g.grid().unwrap();
        for v in 0..g.n() {
            let (x, y) = w.decode(v);
            assert_eq!(w.encode(x, y), Some(v));
        }
        assert_eq!(w.encode(5, 0), None);
    }
}
