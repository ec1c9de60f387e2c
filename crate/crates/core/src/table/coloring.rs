//! Proper edge coloring of bipartite graphs with exactly Δ colors.
//!
//! Edges are colored one at a time in the order they are stored. When the
//! endpoints `u` (left) and `v` (right) share a free color, the smallest
//! one is used. Otherwise let `α` be the smallest color free at `v` and `β`
//! the smallest free at `u`; the α/β alternating path starting at `u` is
//! swapped, which frees `α` at `u` without touching `v`.

use std::io::Write;

const NONE: u32 = u32::MAX;

/// Simple bipartite graph with nodes `0..left` and `0..right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    edges: Vec<(u32, u32)>,
}

impl BipartiteGraph {
    /// Edges are sorted lexicographically and deduplicated.
    pub fn new(left: usize, right: usize, mut edges: Vec<(u32, u32)>) -> Self {
        assert!(left < NONE as usize && right < NONE as usize, "graph too large");
        edges.sort_unstable();
        edges.dedup();
        assert!(
            edges
                .iter()
                .all(|&(u, v)| (u as usize) < left && (v as usize) < right),
            "edge endpoint out of range"
        );
        BipartiteGraph { left, right, edges }
    }

    /// `C_{m,d}`: left node `i` joined to right nodes `i, i+1, …, i+d-1 (mod m)`.
    pub fn circulant(m: usize, d: usize) -> Self {
        assert!(d <= m, "degree exceeds node count");
        let edges = (0..m)
            .flat_map(|i| (0..d).map(move |k| (i as u32, ((i + k) % m) as u32)))
            .collect();
        BipartiteGraph::new(m, m, edges)
    }

    pub fn complete(left: usize, right: usize) -> Self {
        let edges = (0..left as u32)
            .flat_map(|u| (0..right as u32).map(move |v| (u, v)))
            .collect();
        BipartiteGraph::new(left, right, edges)
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn left_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.left];
        for &(u, _) in &self.edges {
            d[u as usize] += 1;
        }
        d
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.right];
        for &(_, v) in &self.edges {
            d[v as usize] += 1;
        }
        d
    }

    pub fn max_degree(&self) -> usize {
        let l = self.left_degrees().into_iter().max().unwrap_or(0);
        let r = self.right_degrees().into_iter().max().unwrap_or(0);
        l.max(r)
    }
}

/// A proper edge coloring together with per-node color slots.
///
/// `left_slots[u * k + c]` is the right neighbour joined to `u` by an edge
/// of color `c` (or empty); `right_slots` likewise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoring {
    num_colors: usize,
    left_slots: Vec<u32>,
    right_slots: Vec<u32>,
}

impl EdgeColoring {
    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    /// Right neighbour of `u` along color `c`.
    #[inline]
    pub fn right_of(&self, u: usize, c: usize) -> Option<u32> {
        if c >= self.num_colors {
            return None;
        }
        let v = self.left_slots[u * self.num_colors + c];
        (v != NONE).then_some(v)
    }

    /// Left neighbour of `v` along color `c`.
    #[inline]
    pub fn left_of(&self, v: usize, c: usize) -> Option<u32> {
        if c >= self.num_colors {
            return None;
        }
        let u = self.right_slots[v * self.num_colors + c];
        (u != NONE).then_some(u)
    }

    /// Color of edge `(u, v)` by scanning the slots of `u`.
    pub fn color_of(&self, u: usize, v: u32) -> Option<u32> {
        let k = self.num_colors;
        self.left_slots[u * k..(u + 1) * k]
            .iter()
            .position(|&w| w == v)
            .map(|c| c as u32)
    }

    /// Checks properness and that every edge of `g` is colored.
    pub fn is_proper_for(&self, g: &BipartiteGraph) -> bool {
        let k = self.num_colors;
        let mut seen = 0usize;
        for u in 0..g.left {
            for c in 0..k {
                let v = self.left_slots[u * k + c];
                if v == NONE {
                    continue;
                }
                if self.right_slots[v as usize * k + c] != u as u32 {
                    return false;
                }
                seen += 1;
            }
        }
        let right_seen = self.right_slots.iter().filter(|&&u| u != NONE).count();
        seen == g.edges.len()
            && right_seen == seen
            && g.edges.iter().all(|&(u, v)| self.color_of(u as usize, v).is_some())
    }

    /// Writes the graph as a `left × right` grid of colors, blank where
    /// there is no edge.
    pub fn write_grid<W: Write>(&self, g: &BipartiteGraph, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![String::new()];
        header.extend((0..g.right).map(|v| v.to_string()));
        w.write_record(&header)?;
        let mut row = vec![String::new(); g.right + 1];
        for u in 0..g.left {
            row.iter_mut().for_each(String::clear);
            row[0] = u.to_string();
            for c in 0..self.num_colors {
                if let Some(v) = self.right_of(u, c) {
                    row[v as usize + 1] = c.to_string();
                }
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Colors `g` with exactly `max_degree(g)` colors.
pub fn edge_color(g: &BipartiteGraph) -> EdgeColoring {
    let k = g.max_degree();
    let mut col = EdgeColoring {
        num_colors: k,
        left_slots: vec![NONE; g.left * k],
        right_slots: vec![NONE; g.right * k],
    };
    let mut path = Vec::new();
    for &(u, v) in &g.edges {
        let (u, v) = (u as usize, v as usize);
        let lu = &col.left_slots[u * k..(u + 1) * k];
        let rv = &col.right_slots[v * k..(v + 1) * k];
        let c = match (0..k).find(|&c| lu[c] == NONE && rv[c] == NONE) {
            Some(c) => c,
            None => {
                let alpha = rv.iter().position(|&w| w == NONE).expect("right degree below Δ");
                let beta = lu.iter().position(|&w| w == NONE).expect("left degree below Δ");
                swap_path(&mut col, u, alpha, beta, &mut path);
                alpha
            }
        };
        debug_assert!(col.left_slots[u * k + c] == NONE && col.right_slots[v * k + c] == NONE);
        col.left_slots[u * k + c] = v as u32;
        col.right_slots[v * k + c] = u as u32;
    }
    col
}

/// Swaps colors `a` and `b` along the alternating path that leaves left
/// node `start` through its `a`-edge. `b` must be free at `start`.
fn swap_path(col: &mut EdgeColoring, start: usize, a: usize, b: usize, path: &mut Vec<(u32, u32, bool)>) {
    let k = col.num_colors;
    path.clear();
    // Collect edges first: (left, right, colored a before the swap).
    let mut u = start;
    loop {
        let v = col.left_slots[u * k + a];
        if v == NONE {
            break;
        }
        path.push((u as u32, v, true));
        let w = col.right_slots[v as usize * k + b];
        if w == NONE {
            break;
        }
        path.push((w, v, false));
        u = w as usize;
    }
    for &(u, v, _) in path.iter() {
        col.left_slots[u as usize * k + a] = NONE;
        col.left_slots[u as usize * k + b] = NONE;
        col.right_slots[v as usize * k + a] = NONE;
        col.right_slots[v as usize * k + b] = NONE;
    }
    // Clearing both slots above is safe: every a/b slot touched belongs to
    // a path edge, and each is rewritten below.
    for &(u, v, was_a) in path.iter() {
        let c = if was_a { b } else { a };
        col.left_slots[u as usize * k + c] = v;
        col.right_slots[v as usize * k + c] = u;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(g: &BipartiteGraph) -> EdgeColoring {
        let c = edge_color(g);
        assert_eq!(c.num_colors(), g.max_degree());
        assert!(c.is_proper_for(g));
        c
    }

    #[test]
    fn perfect_matching_uses_one_color() {
        let g = BipartiteGraph::new(4, 4, (0..4).map(|i| (i, 3 - i)).collect());
        assert_eq!(check(&g).num_colors(), 1);
    }

    #[test]
    fn k33_is_a_latin_square() {
        let g = BipartiteGraph::complete(3, 3);
        let c = check(&g);
        assert_eq!(c.num_colors(), 3);
        for u in 0..3 {
            let mut row: Vec<u32> = (0..3).map(|v| c.color_of(u, v).unwrap()).collect();
            row.sort();
            assert_eq!(row, vec![0, 1, 2]);
        }
        for v in 0..3u32 {
            let mut column: Vec<u32> = (0..3).map(|u| c.color_of(u, v).unwrap()).collect();
            column.sort();
            assert_eq!(column, vec![0, 1, 2]);
        }
    }

    #[test]
    fn circulant_five_by_five_degree_three() {
        let g = BipartiteGraph::circulant(5, 3);
        assert_eq!(g.edges().len(), 15);
        assert!(g.left_degrees().iter().all(|&d| d == 3));
        assert!(g.right_degrees().iter().all(|&d| d == 3));
        let c = check(&g);
        assert_eq!(c.num_colors(), 3);
    }

    #[test]
    fn irregular_graphs_need_only_max_degree() {
        // star plus a path: forces Kempe swaps on a lexicographic order
        let edges = vec![(0, 0), (0, 1), (0, 2), (1, 0), (1, 3), (2, 1), (2, 3), (3, 2), (3, 3)];
        let g = BipartiteGraph::new(4, 4, edges);
        check(&g);
    }

    #[test]
    fn pseudo_random_graphs() {
        // fixed LCG so the test is reproducible without extra dependencies
        let mut s: u64 = 0x9e3779b97f4a7c15;
        for trial in 0..200 {
            let (l, r) = (1 + trial % 9, 1 + (trial / 3) % 11);
            let mut edges = Vec::new();
            for u in 0..l as u32 {
                for v in 0..r as u32 {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    if (s >> 61) < 3 {
                        edges.push((u, v));
                    }
                }
            }
            check(&BipartiteGraph::new(l, r, edges));
        }
    }

    #[test]
    fn coloring_is_deterministic() {
        let g = BipartiteGraph::circulant(7, 4);
        assert_eq!(edge_color(&g), edge_color(&g));
    }

    #[test]
    fn grid_dump() {
        let g = BipartiteGraph::complete(2, 2);
        let c = edge_color(&g);
        let mut buf = Vec::new();
        c.write_grid(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), ",0,1\n0,0,1\n1,1,0\n");
    }
}
