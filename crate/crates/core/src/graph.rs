//! Simple undirected graphs stored as sorted adjacency lists.

use nalgebra::DMatrix;
use petgraph::unionfind::UnionFind;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Build from neighbour lists; lists are sorted and deduplicated.
    pub fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Self {
        for nb in adj.iter_mut() {
            nb.sort_unstable();
            nb.dedup();
        }
        Graph { adj }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        Graph::from_adjacency(adj)
    }

    pub fn complete(n: usize) -> Self {
        Graph::from_adjacency(
            (0..n)
                .map(|u| (0..n).filter(|&v| v != u).collect())
                .collect(),
        )
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// The common degree, if every vertex has the same one.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|nb| nb.len() == d).then_some(d)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n()).all(|u| self.adj[u].iter().all(|&v| self.has_edge(v, u)))
    }

    pub fn has_loops(&self) -> bool {
        (0..self.n()).any(|u| self.has_edge(u, u))
    }

    /// Edges `u < v` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, nb) in self.adj.iter().enumerate() {
            out.extend(nb.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn to_dense<T: Scalar>(&self) -> DMatrix<T> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for (u, nb) in self.adj.iter().enumerate() {
            for &v in nb {
                m[(u, v)] = T::one();
            }
        }
        m
    }

    pub fn component_count(&self) -> usize {
        let mut uf = UnionFind::<usize>::new(self.n());
        for (u, nb) in self.adj.iter().enumerate() {
            for &v in nb {
                uf.union(u, v);
            }
        }
        let mut roots: Vec<usize> = (0..self.n()).map(|v| uf.find(v)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.component_count() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graphs() {
        let c4 = Graph::cycle(4);
        assert_eq!(c4.regular_degree(), Some(2));
        assert_eq!(c4.edges(), vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert!(c4.is_symmetric() && !c4.has_loops() && c4.is_connected());
        let two_k2 = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        assert_eq!(two_k2.component_count(), 2);
        assert_eq!(Graph::complete(5).edge_count(), 10);
        assert_eq!(Graph::path(3).regular_degree(), None);
        let m = Graph::path(3).to_dense::<f64>();
        assert_eq!(m[(0, 1)], 1.0);
        assert_eq!(m[(0, 2)], 0.0);
    }
}
