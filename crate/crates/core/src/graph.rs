//! Mixed graphs, chain-graph validation and the chain-component
//! decomposition.
//!
//! Vertices are identified by label and indexed by their insertion order;
//! every matrix downstream uses that order.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::cliques::{self, Adjacency};
use crate::error::{CycleStep, GraphError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedGraph {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    directed: BTreeSet<(usize, usize)>,
    /// Stored with the smaller index first.
    undirected: BTreeSet<(usize, usize)>,
}

impl MixedGraph {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, GraphError> {
        let mut g = MixedGraph {
            labels: Vec::new(),
            index: BTreeMap::new(),
            directed: BTreeSet::new(),
            undirected: BTreeSet::new(),
        };
        for l in labels {
            g.add_vertex(l)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) -> Result<usize, GraphError> {
        let label = label.into();
        if self.index.contains_key(&label) {
            return Err(GraphError::DuplicateVertex(label));
        }
        let id = self.labels.len();
        self.index.insert(label.clone(), id);
        self.labels.push(label);
        Ok(id)
    }

    pub fn add_directed(&mut self, from: &str, to: &str) -> Result<(), GraphError> {
        let (u, v) = (self.lookup(from)?, self.lookup(to)?);
        self.check_new_pair(u, v)?;
        self.directed.insert((u, v));
        Ok(())
    }

    pub fn add_undirected(&mut self, a: &str, b: &str) -> Result<(), GraphError> {
        let (u, v) = (self.lookup(a)?, self.lookup(b)?);
        self.check_new_pair(u, v)?;
        self.undirected.insert((u.min(v), u.max(v)));
        Ok(())
    }

    fn lookup(&self, label: &str) -> Result<usize, GraphError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(label.into()))
    }

    fn check_new_pair(&self, u: usize, v: usize) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(self.labels[u].clone()));
        }
        let (a, b) = (self.labels[u].clone(), self.labels[v].clone());
        let undirected = self.undirected.contains(&(u.min(v), u.max(v)));
        if self.directed.contains(&(u, v)) {
            return Err(GraphError::DuplicateEdge(a, b));
        }
        if self.directed.contains(&(v, u)) || undirected {
            return Err(GraphError::ConflictingEdge(a, b));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.directed.iter().copied()
    }

    pub fn undirected_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.undirected.iter().copied()
    }

    pub fn has_directed(&self, from: usize, to: usize) -> bool {
        self.directed.contains(&(from, to))
    }

    pub fn has_undirected(&self, a: usize, b: usize) -> bool {
        self.undirected.contains(&(a.min(b), a.max(b)))
    }

    /// Parents of `v`, ascending by vertex index.
    pub fn parents(&self, v: usize) -> Vec<usize> {
        self.directed
            .iter()
            .filter(|&&(_, to)| to == v)
            .map(|&(from, _)| from)
            .collect()
    }

    fn undirected_neighbours(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.len()];
        for &(a, b) in &self.undirected {
            nb[a].push(b);
            nb[b].push(a);
        }
        nb
    }

    /// Undirected adjacency restricted to `vertices` (local indices follow
    /// the slice order).
    pub fn induced_undirected(&self, vertices: &[usize]) -> Adjacency {
        let k = vertices.len();
        let mut adj = vec![vec![false; k]; k];
        for i in 0..k {
            for j in 0..k {
                if i != j && self.has_undirected(vertices[i], vertices[j]) {
                    adj[i][j] = true;
                }
            }
        }
        adj
    }
}

/// A chain component with its parent set. Both lists are ascending by
/// vertex index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub parents: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainDecomposition {
    /// Components in topological order.
    pub components: Vec<Component>,
    /// `component_of[v]` is the position of v's component in `components`.
    pub component_of: Vec<usize>,
}

impl ChainDecomposition {
    pub fn find(&self, tau: &[usize]) -> Option<usize> {
        let mut sorted = tau.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        self.components.iter().position(|c| c.vertices == sorted)
    }
}

/// Connected components of the undirected part, each ascending.
fn undirected_blocks(g: &MixedGraph) -> (Vec<Vec<usize>>, Vec<usize>) {
    let nb = g.undirected_neighbours();
    let mut block_of = vec![usize::MAX; g.len()];
    let mut blocks = Vec::new();
    for start in 0..g.len() {
        if block_of[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut members = vec![start];
        block_of[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &nb[v] {
                if block_of[w] == usize::MAX {
                    block_of[w] = id;
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    (blocks, block_of)
}

/// Checks the chain-graph property: no semi-directed cycle. Undirected
/// blocks are contracted and the resulting directed graph is tested for
/// cycles; a violation is reported as an explicit vertex-level cycle.
pub fn validate_chain_graph(g: &MixedGraph) -> Result<(), GraphError> {
    let (blocks, block_of) = undirected_blocks(g);
    let nb = g.undirected_neighbours();

    // block-level successor lists, remembering one witnessing edge each
    let mut succ: Vec<BTreeMap<usize, (usize, usize)>> = vec![BTreeMap::new(); blocks.len()];
    for (u, v) in g.directed_edges() {
        let (bu, bv) = (block_of[u], block_of[v]);
        if bu == bv {
            let mut steps = vec![step(g, u, v, true)];
            steps.extend(undirected_path(g, &nb, v, u));
            return Err(GraphError::SemiDirectedCycle(steps));
        }
        succ[bu].entry(bv).or_insert((u, v));
    }

    // iterative DFS with colours
    let m = blocks.len();
    let mut colour = vec![0u8; m];
    let mut parent_edge: Vec<Option<(usize, (usize, usize))>> = vec![None; m];
    for root in 0..m {
        if colour[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, Vec<(usize, (usize, usize))>)> =
            vec![(root, succ[root].iter().map(|(&b, &e)| (b, e)).collect())];
        colour[root] = 1;
        while let Some((b, pending)) = stack.last_mut() {
            let b = *b;
            match pending.pop() {
                Some((next, edge)) => match colour[next] {
                    0 => {
                        colour[next] = 1;
                        parent_edge[next] = Some((b, edge));
                        let out = succ[next].iter().map(|(&c, &e)| (c, e)).collect();
                        stack.push((next, out));
                    }
                    1 => {
                        // back edge b -> next closes a cycle next -> ... -> b -> next
                        let mut edges = vec![edge];
                        let mut cur = b;
                        while cur != next {
                            let (prev, e) = parent_edge[cur].expect("on the DFS stack");
                            edges.push(e);
                            cur = prev;
                        }
                        edges.reverse();
                        return Err(GraphError::SemiDirectedCycle(expand_cycle(g, &nb, &edges)));
                    }
                    _ => {}
                },
                None => {
                    colour[b] = 2;
                    stack.pop();
                }
            }
        }
    }
    Ok(())
}

fn step(g: &MixedGraph, from: usize, to: usize, directed: bool) -> CycleStep {
    CycleStep {
        from: g.label(from).into(),
        to: g.label(to).into(),
        directed,
    }
}

fn undirected_path(g: &MixedGraph, nb: &[Vec<usize>], from: usize, to: usize) -> Vec<CycleStep> {
    if from == to {
        return Vec::new();
    }
    let mut prev = vec![usize::MAX; g.len()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &w in &nb[v] {
            if prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    path.windows(2).map(|w| step(g, w[0], w[1], false)).collect()
}

/// Joins consecutive directed edges through undirected paths inside blocks.
fn expand_cycle(g: &MixedGraph, nb: &[Vec<usize>], edges: &[(usize, usize)]) -> Vec<CycleStep> {
    let mut steps = Vec::new();
    for (i, &(u, v)) in edges.iter().enumerate() {
        steps.push(step(g, u, v, true));
        let next_tail = edges[(i + 1) % edges.len()].0;
        steps.extend(undirected_path(g, nb, v, next_tail));
    }
    steps
}

/// Chain components in topological order, ties broken by the smallest
/// member label.
pub fn chain_components(g: &MixedGraph) -> Result<ChainDecomposition, GraphError> {
    validate_chain_graph(g)?;
    let (blocks, block_of) = undirected_blocks(g);
    let m = blocks.len();
    let mut indeg = vec![0usize; m];
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    for (u, v) in g.directed_edges() {
        if succ[block_of[u]].insert(block_of[v]) {
            indeg[block_of[v]] += 1;
        }
    }
    let key = |b: usize| -> &str {
        blocks[b]
            .iter()
            .map(|&v| g.label(v))
            .min()
            .unwrap_or_default()
    };
    let mut ready: BTreeSet<(&str, usize)> = (0..m).filter(|&b| indeg[b] == 0).map(|b| (key(b), b)).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(first) = ready.pop_first() {
        let b = first.1;
        order.push(b);
        for &c in &succ[b] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.insert((key(c), c));
            }
        }
    }
    debug_assert_eq!(order.len(), m);

    let mut component_of = vec![0; g.len()];
    let components = order
        .iter()
        .enumerate()
        .map(|(pos, &b)| {
            let vertices = blocks[b].clone();
            for &v in &vertices {
                component_of[v] = pos;
            }
            let parents: BTreeSet<usize> = vertices.iter().flat_map(|&v| g.parents(v)).collect();
            Component {
                vertices,
                parents: parents.into_iter().collect(),
            }
        })
        .collect();
    Ok(ChainDecomposition {
        components,
        component_of,
    })
}

/// Maximal cliques of the undirected subgraph induced by the chain
/// component `tau`. Members are sorted by label and the list is ordered
/// lexicographically by those label lists.
pub fn maximal_cliques(g: &MixedGraph, tau: &[usize]) -> Result<Vec<Vec<usize>>, GraphError> {
    let dec = chain_components(g)?;
    let idx = dec.find(tau).ok_or(GraphError::NotAComponent)?;
    Ok(component_cliques(g, &dec.components[idx].vertices))
}

pub(crate) fn component_cliques(g: &MixedGraph, vertices: &[usize]) -> Vec<Vec<usize>> {
    let adj = g.induced_undirected(vertices);
    let mut out: Vec<Vec<usize>> = cliques::maximal_cliques(&adj)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|i| vertices[i]).collect();
            c.sort_by(|&a, &b| g.label(a).cmp(g.label(b)));
            c
        })
        .collect();
    out.sort_by(|a, b| {
        a.iter()
            .map(|&v| g.label(v))
            .cmp(b.iter().map(|&v| g.label(v)))
    });
    out
}

/// Whether the undirected subgraph induced by the chain component `tau`
/// is chordal.
pub fn is_decomposable(g: &MixedGraph, tau: &[usize]) -> Result<bool, GraphError> {
    let dec = chain_components(g)?;
    let idx = dec.find(tau).ok_or(GraphError::NotAComponent)?;
    Ok(cliques::is_chordal(
        &g.induced_undirected(&dec.components[idx].vertices),
    ))
}
