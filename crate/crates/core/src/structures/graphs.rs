//! Small named graphs over [`Signature::graph`](super::Signature::graph).

use super::Structure;

pub fn empty(n: usize) -> Structure {
    Structure::graph(n, &[]).expect("no edges")
}

pub fn complete(n: usize) -> Structure {
    let edges: Vec<_> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    Structure::graph(n, &edges).expect("valid edges")
}

/// Path on `n` vertices (`n - 1` edges).
pub fn path(n: usize) -> Structure {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Structure::graph(n, &edges).expect("valid edges")
}

/// Cycle `C_n` for `n >= 3`. Below that the closing edge would be a loop or
/// a repeated edge, so `C_0`, `C_1`, `C_2` are the paths on 0, 1, 2 vertices.
pub fn cycle(n: usize) -> Structure {
    let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    if n >= 3 {
        edges.push((n - 1, 0));
    }
    Structure::graph(n, &edges).expect("valid edges")
}

/// Star with `n` vertices: centre 0 joined to `1..n`.
pub fn star(n: usize) -> Structure {
    let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
    Structure::graph(n, &edges).expect("valid edges")
}

pub fn complete_bipartite(a: usize, b: usize) -> Structure {
    let edges: Vec<_> = (0..a)
        .flat_map(|i| (0..b).map(move |j| (i, a + j)))
        .collect();
    Structure::graph(a + b, &edges).expect("valid edges")
}

/// `K_{2,2,2}`.
pub fn octahedron() -> Structure {
    let edges: Vec<_> = (0..6)
        .flat_map(|i| (i + 1..6).map(move |j| (i, j)))
        .filter(|&(i, j)| i / 2 != j / 2)
        .collect();
    Structure::graph(6, &edges).expect("valid edges")
}

/// Number of undirected edges of a symmetric binary relation (loops count once).
pub fn edge_count(g: &Structure) -> usize {
    g.relation(0).iter().filter(|t| t[0] <= t[1]).count()
}
