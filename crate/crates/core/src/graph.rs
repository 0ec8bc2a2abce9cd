//! Bipartite multigraph `G = (U, V, E)` with one edge per stored name.
//!
//! Adjacency is kept as intrusive singly linked lists threaded through the
//! edge records, so a vertex costs one `u32` head and an edge a fixed record.
//! Edge ids are recycled after removal.

use std::collections::HashSet;

pub type EdgeId = u32;

const NIL: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    U(u32),
    V(u32),
}

#[derive(Clone, Debug)]
struct Edge<T> {
    u: u32,
    v: u32,
    next_u: u32,
    next_v: u32,
    payload: Option<T>,
}

#[derive(Clone, Debug)]
pub struct BipartiteGraph<T> {
    head_u: Vec<u32>,
    head_v: Vec<u32>,
    edges: Vec<Edge<T>>,
    free: Vec<u32>,
    live: usize,
}

/// Edge of a DFS forest, in discovery order. `child` is the endpoint first
/// reached through this edge; the other endpoint was reached earlier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct TreeEdge {
    pub edge: EdgeId,
    pub child: Vertex,
}

/// Outcome of probing whether a new edge `(u, v)` would close a cycle.
#[derive(Debug, PartialEq, Eq)]
pub(crate) enum Link {
    /// `u` and `v` already share a component.
    Connected,
    /// Distinct components; `recolor` is the smaller one (ties pick `v`'s).
    Separate { recolor: Vec<Vertex> },
}

impl<T> BipartiteGraph<T> {
    pub fn new(m_a: usize, m_b: usize) -> Self {
        Self::with_capacity(m_a, m_b, 0)
    }

    pub fn with_capacity(m_a: usize, m_b: usize, edges: usize) -> Self {
        assert!(
            m_a < NIL as usize && m_b < NIL as usize,
            "vertex count exceeds u32 range"
        );
        BipartiteGraph {
            head_u: vec![NIL; m_a],
            head_v: vec![NIL; m_b],
            edges: Vec::with_capacity(edges),
            free: Vec::new(),
            live: 0,
        }
    }

    pub fn m_a(&self) -> usize {
        self.head_u.len()
    }

    pub fn m_b(&self) -> usize {
        self.head_v.len()
    }

    pub fn edge_count(&self) -> usize {
        self.live
    }

    pub fn insert(&mut self, u: u32, v: u32, payload: T) -> EdgeId {
        let record = Edge {
            u,
            v,
            next_u: self.head_u[u as usize],
            next_v: self.head_v[v as usize],
            payload: Some(payload),
        };
        let id = match self.free.pop() {
            Some(id) => {
                self.edges[id as usize] = record;
                id
            }
            None => {
                self.edges.push(record);
                (self.edges.len() - 1) as EdgeId
            }
        };
        self.head_u[u as usize] = id;
        self.head_v[v as usize] = id;
        self.live += 1;
        id
    }

    pub fn remove(&mut self, id: EdgeId) -> Option<T> {
        let edge = self.edges.get_mut(id as usize)?;
        let payload = edge.payload.take()?;
        let (u, v) = (edge.u, edge.v);

        let mut cur = self.head_u[u as usize];
        let mut prev = NIL;
        while cur != id {
            prev = cur;
            cur = self.edges[cur as usize].next_u;
        }
        let next = self.edges[id as usize].next_u;
        if prev == NIL {
            self.head_u[u as usize] = next;
        } else {
            self.edges[prev as usize].next_u = next;
        }

        let mut cur = self.head_v[v as usize];
        let mut prev = NIL;
        while cur != id {
            prev = cur;
            cur = self.edges[cur as usize].next_v;
        }
        let next = self.edges[id as usize].next_v;
        if prev == NIL {
            self.head_v[v as usize] = next;
        } else {
            self.edges[prev as usize].next_v = next;
        }

        self.free.push(id);
        self.live -= 1;
        Some(payload)
    }

    /// `(U index, V index)` of a live edge.
    pub fn endpoints(&self, id: EdgeId) -> Option<(u32, u32)> {
        let e = self.edges.get(id as usize)?;
        e.payload.as_ref().map(|_| (e.u, e.v))
    }

    pub fn payload(&self, id: EdgeId) -> Option<&T> {
        self.edges.get(id as usize)?.payload.as_ref()
    }

    pub fn payload_mut(&mut self, id: EdgeId) -> Option<&mut T> {
        self.edges.get_mut(id as usize)?.payload.as_mut()
    }

    /// Incident `(edge, opposite vertex)` pairs.
    pub fn neighbors(&self, x: Vertex) -> Neighbors<'_, T> {
        let next = match x {
            Vertex::U(i) => self.head_u[i as usize],
            Vertex::V(j) => self.head_v[j as usize],
        };
        Neighbors {
            graph: self,
            from_u: matches!(x, Vertex::U(_)),
            next,
        }
    }

    pub fn degree(&self, x: Vertex) -> usize {
        self.neighbors(x).count()
    }

    fn flat(&self, x: Vertex) -> usize {
        match x {
            Vertex::U(i) => i as usize,
            Vertex::V(j) => self.head_u.len() + j as usize,
        }
    }

    /// Depth-first edge order of the whole forest, or `None` if the graph has
    /// a cycle. Parallel edges count as a cycle. Trees are rooted at their
    /// lowest-indexed `U` vertex.
    pub(crate) fn dfs_forest(&self) -> Option<Vec<TreeEdge>> {
        let mut visited = vec![false; self.head_u.len() + self.head_v.len()];
        let mut parent_edge = vec![NIL; visited.len()];
        let mut order = Vec::with_capacity(self.live);
        let mut stack = Vec::new();

        for root in 0..self.head_u.len() {
            if visited[root] || self.head_u[root] == NIL {
                continue;
            }
            visited[root] = true;
            stack.push(Vertex::U(root as u32));
            while let Some(x) = stack.pop() {
                let via = parent_edge[self.flat(x)];
                for (e, y) in self.neighbors(x) {
                    if e == via {
                        continue;
                    }
                    let fy = self.flat(y);
                    if visited[fy] {
                        return None;
                    }
                    visited[fy] = true;
                    parent_edge[fy] = e;
                    order.push(TreeEdge { edge: e, child: y });
                    stack.push(y);
                }
            }
        }
        Some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.dfs_forest().is_some()
    }

    /// Vertices reachable from `start` without traversing edge `skip`.
    pub fn component(&self, start: Vertex, skip: Option<EdgeId>) -> Vec<Vertex> {
        let mut seen = HashSet::new();
        seen.insert(start);
        let mut out = vec![start];
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for (e, y) in self.neighbors(x) {
                if Some(e) != skip && seen.insert(y) {
                    out.push(y);
                    stack.push(y);
                }
            }
        }
        out
    }

    /// Size of every connected component, isolated vertices included.
    pub fn component_sizes(&self) -> Vec<usize> {
        let total = self.head_u.len() + self.head_v.len();
        let mut visited = vec![false; total];
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        let vertices = (0..self.head_u.len() as u32)
            .map(Vertex::U)
            .chain((0..self.head_v.len() as u32).map(Vertex::V));
        for start in vertices {
            let fs = self.flat(start);
            if visited[fs] {
                continue;
            }
            visited[fs] = true;
            stack.push(start);
            let mut size = 0;
            while let Some(x) = stack.pop() {
                size += 1;
                for (_, y) in self.neighbors(x) {
                    let fy = self.flat(y);
                    if !visited[fy] {
                        visited[fy] = true;
                        stack.push(y);
                    }
                }
            }
            sizes.push(size);
        }
        sizes
    }

    /// Expands from `U(u)` and `V(v)` one vertex at a time, alternating, so
    /// the cost is bounded by about twice the smaller component.
    pub(crate) fn link(&self, u: u32, v: u32) -> Link {
        let (ua, vb) = (Vertex::U(u), Vertex::V(v));
        let mut a = Explore::new(ua);
        let mut b = Explore::new(vb);
        loop {
            let a_live = a.step(self);
            if a.seen.contains(&vb) {
                return Link::Connected;
            }
            let b_live = b.step(self);
            if b.seen.contains(&ua) {
                return Link::Connected;
            }
            match (a_live, b_live) {
                (true, true) => continue,
                (false, _) => {
                    // a's component is complete and does not hold v.
                    let limit = a.seen.len();
                    while b.seen.len() <= limit && b.step(self) {}
                    let recolor = if b.seen.len() <= limit { b } else { a };
                    return Link::Separate {
                        recolor: recolor.into_vertices(),
                    };
                }
                (true, false) => {
                    let limit = b.seen.len();
                    while a.seen.len() < limit && a.step(self) {}
                    let recolor = if a.seen.len() < limit { a } else { b };
                    return Link::Separate {
                        recolor: recolor.into_vertices(),
                    };
                }
            }
        }
    }
}

struct Explore {
    seen: HashSet<Vertex>,
    stack: Vec<Vertex>,
}

impl Explore {
    fn new(start: Vertex) -> Self {
        Explore {
            seen: HashSet::from([start]),
            stack: vec![start],
        }
    }

    /// Expands one vertex. Returns `false` once the component is exhausted.
    fn step<T>(&mut self, g: &BipartiteGraph<T>) -> bool {
        let Some(x) = self.stack.pop() else {
            return false;
        };
        for (_, y) in g.neighbors(x) {
            if self.seen.insert(y) {
                self.stack.push(y);
            }
        }
        !self.stack.is_empty()
    }

    fn into_vertices(self) -> Vec<Vertex> {
        let mut v: Vec<_> = self.seen.into_iter().collect();
        v.sort_unstable();
        v
    }
}

pub struct Neighbors<'g, T> {
    graph: &'g BipartiteGraph<T>,
    from_u: bool,
    next: u32,
}

impl<T> Iterator for Neighbors<'_, T> {
    type Item = (EdgeId, Vertex);

    #[inline]
    fn next(&mut self) -> Option<Self::Item> {
        if self.next == NIL {
            return None;
        }
        let id = self.next;
        let e = &self.graph.edges[id as usize];
        if self.from_u {
            self.next = e.next_u;
            Some((id, Vertex::V(e.v)))
        } else {
            self.next = e.next_v;
            Some((id, Vertex::U(e.u)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Union-find cycle check, independent of the DFS.
    fn has_cycle_uf(m_a: usize, edges: &[(u32, u32)]) -> bool {
        let mut parent: Vec<usize> = (0..m_a + 64).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(u, v) in edges {
            let (ru, rv) = (
                find(&mut parent, u as usize),
                find(&mut parent, m_a + v as usize),
            );
            if ru == rv {
                return true;
            }
            parent[ru] = rv;
        }
        false
    }

    fn graph(m_a: usize, m_b: usize, edges: &[(u32, u32)]) -> BipartiteGraph<()> {
        let mut g = BipartiteGraph::new(m_a, m_b);
        for &(u, v) in edges {
            g.insert(u, v, ());
        }
        g
    }

    #[test]
    fn parallel_edges_are_a_cycle() {
        let g = graph(4, 4, &[(1, 2), (1, 2)]);
        assert!(!g.is_acyclic());
    }

    #[test]
    fn four_cycle_detected_path_accepted() {
        assert!(!graph(4, 4, &[(0, 0), (0, 1), (1, 1), (1, 0)]).is_acyclic());
        assert!(graph(4, 4, &[(0, 0), (0, 1), (1, 1)]).is_acyclic());
    }

    #[test]
    fn dfs_agrees_with_union_find() {
        let mut state = 0x243f_6a88_85a3_08d3u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for trial in 0..400 {
            let n = 1 + trial % 24;
            let edges: Vec<(u32, u32)> = (0..n)
                .map(|_| ((next() % 32) as u32, (next() % 16) as u32))
                .collect();
            let g = graph(32, 16, &edges);
            assert_eq!(g.is_acyclic(), !has_cycle_uf(32, &edges), "{edges:?}");
            if let Some(order) = g.dfs_forest() {
                assert_eq!(order.len(), n);
            }
        }
    }

    #[test]
    fn remove_relinks_lists() {
        let mut g = graph(4, 4, &[(0, 0), (0, 1), (0, 2), (1, 2)]);
        assert_eq!(g.degree(Vertex::U(0)), 3);
        assert_eq!(g.remove(1), Some(()));
        assert_eq!(g.remove(1), None);
        assert_eq!(g.degree(Vertex::U(0)), 2);
        assert_eq!(g.degree(Vertex::V(1)), 0);
        assert_eq!(g.edge_count(), 3);
        let id = g.insert(3, 3, ());
        assert_eq!(id, 1);
        assert_eq!(g.endpoints(1), Some((3, 3)));
    }

    #[test]
    fn component_skips_edge() {
        // U0 - V0 - U1 - V1
        let g = graph(4, 4, &[(0, 0), (1, 0), (1, 1)]);
        let mut side = g.component(Vertex::V(0), Some(1));
        side.sort();
        assert_eq!(side, vec![Vertex::U(0), Vertex::V(0)]);
        assert_eq!(g.component(Vertex::U(3), None), vec![Vertex::U(3)]);
    }

    #[test]
    fn link_picks_smaller_component() {
        // Component X = {U0, V0, U1}, component Y = {U2, V2}.
        let g = graph(4, 4, &[(0, 0), (1, 0), (2, 2)]);
        assert_eq!(g.link(1, 0), Link::Connected);
        assert_eq!(g.link(0, 0), Link::Connected);
        match g.link(0, 2) {
            Link::Separate { recolor } => assert_eq!(recolor, vec![Vertex::U(2), Vertex::V(2)]),
            other => panic!("{other:?}"),
        }
        match g.link(2, 0) {
            Link::Separate { recolor } => assert_eq!(recolor, vec![Vertex::U(2), Vertex::V(2)]),
            other => panic!("{other:?}"),
        }
        // Tie between two isolated vertices goes to the V side.
        match g.link(3, 3) {
            Link::Separate { recolor } => assert_eq!(recolor, vec![Vertex::V(3)]),
            other => panic!("{other:?}"),
        }
        // Tie between two 2-vertex components.
        let g = graph(4, 4, &[(0, 0), (1, 1)]);
        match g.link(0, 1) {
            Link::Separate { recolor } => assert_eq!(recolor, vec![Vertex::U(1), Vertex::V(1)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn component_sizes_cover_all_vertices() {
        let g = graph(4, 2, &[(0, 0), (1, 0), (2, 1)]);
        let mut sizes = g.component_sizes();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 3]);
        assert_eq!(sizes.iter().sum::<usize>(), 6);
    }
}
