//! Clique enumeration and chordality on small undirected graphs given as
//! dense adjacency matrices over local indices `0..n`.

use alloc::vec;
use alloc::vec::Vec;

pub type Adjacency = Vec<Vec<bool>>;

pub fn adjacency_from_edges(n: usize, edges: &[(usize, usize)]) -> Adjacency {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        if a != b {
            adj[a][b] = true;
            adj[b][a] = true;
        }
    }
    adj
}

/// Adjacency whose edges are all pairs sharing some clique.
pub fn adjacency_from_cliques(n: usize, cliques: &[Vec<usize>]) -> Adjacency {
    let mut adj = vec![vec![false; n]; n];
    for c in cliques {
        for &a in c {
            for &b in c {
                if a != b {
                    adj[a][b] = true;
                }
            }
        }
    }
    adj
}

/// All maximal cliques (Bron-Kerbosch with Tomita pivoting). Members of each
/// clique are sorted ascending; the list itself is sorted lexicographically.
pub fn maximal_cliques(adj: &Adjacency) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut out = Vec::new();
    let mut r = Vec::new();
    bron_kerbosch(adj, &mut r, (0..n).collect(), Vec::new(), &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn bron_kerbosch(
    adj: &Adjacency,
    r: &mut Vec<usize>,
    p: Vec<usize>,
    mut x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .expect("p or x is non-empty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    let mut p = p;
    for v in candidates {
        let np = p.iter().copied().filter(|&w| adj[v][w]).collect();
        let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
        r.push(v);
        bron_kerbosch(adj, r, np, nx, out);
        r.pop();
        p.retain(|&w| w != v);
        x.push(v);
    }
}

/// Maximum cardinality search; returns vertices in visit order. Ties go to
/// the smallest index.
pub fn mcs_order(adj: &Adjacency) -> Vec<usize> {
    let n = adj.len();
    let mut weight = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !visited[v])
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .expect("unvisited vertex remains");
        visited[v] = true;
        order.push(v);
        for w in 0..n {
            if adj[v][w] && !visited[w] {
                weight[w] += 1;
            }
        }
    }
    order
}

/// Chordality test: the reverse of an MCS order is a perfect elimination
/// ordering iff the graph is chordal.
pub fn is_chordal(adj: &Adjacency) -> bool {
    let order = mcs_order(adj);
    let n = adj.len();
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    for (i, &v) in order.iter().enumerate() {
        let earlier: Vec<usize> = order[..i].iter().copied().filter(|&u| adj[v][u]).collect();
        if let Some(&last) = earlier.iter().max_by_key(|&&u| pos[u]) {
            if earlier.iter().any(|&u| u != last && !adj[last][u]) {
                return false;
            }
        }
    }
    true
}

/// Maximal cliques of a chordal graph in an order with the running
/// intersection property, or `None` when the graph is not chordal.
pub fn perfect_clique_sequence(adj: &Adjacency) -> Option<Vec<Vec<usize>>> {
    if !is_chordal(adj) {
        return None;
    }
    let order = mcs_order(adj);
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let mut c: Vec<usize> = order[..i].iter().copied().filter(|&u| adj[v][u]).collect();
        c.push(v);
        c.sort_unstable();
        candidates.push(c);
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let contained = candidates
            .iter()
            .enumerate()
            .any(|(j, d)| j != i && d.len() >= c.len() && is_subset(c, d) && (d.len() > c.len() || j < i));
        if !contained {
            out.push(c.clone());
        }
    }
    Some(out)
}

pub(crate) fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}
