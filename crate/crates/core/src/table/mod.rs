//! Per-joint-type coding tables.
//!
//! Rows are the sequences of the x-marginal type, columns those of the
//! y-marginal type, both indexed by lexicographic rank. The marked cells are
//! the pairs of the joint type class; they form a bipartite graph whose
//! left nodes all have degree `|T_V|` and right nodes degree `|T_W|`. A
//! proper edge coloring with `max(|T_V|, |T_W|)` colors assigns the symbols,
//! so a symbol plus either sequence identifies the other.

mod coloring;

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, RwLock};

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::types::{
    multinomial, rank_small, type_class_size, unrank_small, v_shell_size, w_shell_size, JointType, Sequence,
};

pub use coloring::{edge_color, BipartiteGraph, EdgeColoring};

/// Limits on table construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableBudget {
    /// Largest number of marked cells (edges) a table may have.
    pub max_edges: u64,
    /// Above this many `rows × columns` cells the cell index is a hash map.
    pub dense_cells: u64,
}

impl Default for TableBudget {
    fn default() -> Self {
        TableBudget {
            max_edges: 1 << 24,
            dense_cells: 1 << 26,
        }
    }
}

/// The marked cells of one joint type as a bipartite graph.
#[derive(Clone, Debug)]
pub struct BipartiteTypeGraph {
    jt: JointType,
    graph: BipartiteGraph,
    left_degree: usize,
    right_degree: usize,
}

impl BipartiteTypeGraph {
    pub fn build(jt: &JointType) -> Result<Self> {
        Self::build_with_budget(jt, TableBudget::default())
    }

    pub fn build_with_budget(jt: &JointType, budget: TableBudget) -> Result<Self> {
        let left = type_class_size(&jt.x_marginal());
        let right = type_class_size(&jt.y_marginal());
        let nv = v_shell_size(jt);
        let nw = w_shell_size(jt);
        let needed = &left * &nv;
        let too_big = || Error::ResourceLimit {
            jt: jt.clone(),
            needed: needed.to_string(),
            budget: budget.max_edges,
        };
        let edges_total = needed.to_u64().filter(|&e| e <= budget.max_edges).ok_or_else(too_big)?;
        let left = left.to_usize().filter(|&l| l < u32::MAX as usize).ok_or_else(too_big)?;
        let right = right.to_usize().filter(|&r| r < u32::MAX as usize).ok_or_else(too_big)?;
        let nv = nv.to_usize().ok_or_else(too_big)?;
        let nw = nw.to_usize().ok_or_else(too_big)?;

        let xq = jt.x_marginal();
        let yq = jt.y_marginal();
        let ay = jt.ay().size();
        // Every V-shell is the product, over x-letters a, of the sequences
        // of type row(a) placed on the positions where x = a.
        let parts: Vec<Vec<Vec<u8>>> = (0..jt.ax().size())
            .map(|a| {
                let row = jt.row(a);
                if row.iter().all(|&c| c == 0) {
                    return vec![Vec::new()];
                }
                let size = multinomial(row).to_u128().expect("bounded by shell size");
                (0..size)
                    .map(|r| unrank_small(row, r).expect("row class fits"))
                    .collect()
            })
            .collect();
        let radices: Vec<usize> = parts.iter().map(Vec::len).collect();
        debug_assert_eq!(radices.iter().product::<usize>(), nv);

        let mut edges = Vec::with_capacity(edges_total as usize);
        let mut y = vec![0u8; jt.n()];
        let mut positions: Vec<Vec<usize>> = vec![Vec::new(); jt.ax().size()];
        let mut digits = vec![0usize; radices.len()];
        for r in 0..left {
            let x = unrank_small(xq.counts(), r as u128).expect("class fits");
            positions.iter_mut().for_each(Vec::clear);
            for (i, &a) in x.iter().enumerate() {
                positions[a as usize].push(i);
            }
            digits.iter_mut().for_each(|d| *d = 0);
            for _ in 0..nv {
                for (a, &d) in digits.iter().enumerate() {
                    for (&pos, &b) in positions[a].iter().zip(&parts[a][d]) {
                        y[pos] = b;
                    }
                }
                debug_assert!(y.iter().all(|&b| (b as usize) < ay));
                let c = rank_small(&y, yq.counts()).expect("class fits") as u32;
                edges.push((r as u32, c));
                // odometer over the per-letter choices
                for a in (0..digits.len()).rev() {
                    digits[a] += 1;
                    if digits[a] < radices[a] {
                        break;
                    }
                    digits[a] = 0;
                }
            }
        }
        Ok(BipartiteTypeGraph {
            jt: jt.clone(),
            graph: BipartiteGraph::new(left, right, edges),
            left_degree: nv,
            right_degree: nw,
        })
    }

    pub fn joint_type(&self) -> &JointType {
        &self.jt
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn left_size(&self) -> usize {
        self.graph.left()
    }

    pub fn right_size(&self) -> usize {
        self.graph.right()
    }

    /// Degree of every row, `|T_V|`.
    pub fn left_degree(&self) -> usize {
        self.left_degree
    }

    /// Degree of every column, `|T_W|`.
    pub fn right_degree(&self) -> usize {
        self.right_degree
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum CellIndex {
    Dense { cols: usize, cells: Vec<u32> },
    Sparse(HashMap<(u32, u32), u32>),
}

const BLANK: u32 = u32::MAX;

/// An edge-colored [`BipartiteTypeGraph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodingTable {
    jt: JointType,
    left_size: usize,
    right_size: usize,
    coloring: EdgeColoring,
    cells: CellIndex,
}

impl CodingTable {
    pub fn build(jt: &JointType) -> Result<Self> {
        Self::build_with_budget(jt, TableBudget::default())
    }

    pub fn build_with_budget(jt: &JointType, budget: TableBudget) -> Result<Self> {
        let g = BipartiteTypeGraph::build_with_budget(jt, budget)?;
        Ok(Self::from_graph(&g, budget))
    }

    pub fn from_graph(g: &BipartiteTypeGraph, budget: TableBudget) -> Self {
        let coloring = edge_color(g.graph());
        let (left, right) = (g.left_size(), g.right_size());
        let cells = if (left as u64).saturating_mul(right as u64) <= budget.dense_cells {
            let mut cells = vec![BLANK; left * right];
            for u in 0..left {
                for c in 0..coloring.num_colors() {
                    if let Some(v) = coloring.right_of(u, c) {
                        cells[u * right + v as usize] = c as u32;
                    }
                }
            }
            CellIndex::Dense { cols: right, cells }
        } else {
            let mut map = HashMap::with_capacity(g.graph().edges().len());
            for u in 0..left {
                for c in 0..coloring.num_colors() {
                    if let Some(v) = coloring.right_of(u, c) {
                        map.insert((u as u32, v), c as u32);
                    }
                }
            }
            CellIndex::Sparse(map)
        };
        CodingTable {
            jt: g.joint_type().clone(),
            left_size: left,
            right_size: right,
            coloring,
            cells,
        }
    }

    pub fn joint_type(&self) -> &JointType {
        &self.jt
    }

    pub fn num_symbols(&self) -> usize {
        self.coloring.num_colors()
    }

    pub fn left_size(&self) -> usize {
        self.left_size
    }

    pub fn right_size(&self) -> usize {
        self.right_size
    }

    pub fn coloring(&self) -> &EdgeColoring {
        &self.coloring
    }

    /// Symbol in cell `(row, col)`, `None` for an unmarked cell.
    pub fn symbol_at(&self, row: usize, col: usize) -> Option<u32> {
        if row >= self.left_size || col >= self.right_size {
            return None;
        }
        let s = match &self.cells {
            CellIndex::Dense { cols, cells } => cells[row * cols + col],
            CellIndex::Sparse(map) => *map.get(&(row as u32, col as u32)).unwrap_or(&BLANK),
        };
        (s != BLANK).then_some(s)
    }

    fn row_rank(&self, x: &Sequence) -> Result<usize> {
        let q = self.jt.x_marginal();
        if x.len() != self.jt.n() || x.type_vector().counts() != q.counts() {
            return Err(Error::WrongMarginalType(self.jt.clone()));
        }
        Ok(rank_small(x.letters(), q.counts()).expect("class fits") as usize)
    }

    fn col_rank(&self, y: &Sequence) -> Result<usize> {
        let q = self.jt.y_marginal();
        if y.len() != self.jt.n() || y.type_vector().counts() != q.counts() {
            return Err(Error::WrongMarginalType(self.jt.clone()));
        }
        Ok(rank_small(y.letters(), q.counts()).expect("class fits") as usize)
    }

    pub fn lookup_symbol(&self, x: &Sequence, y: &Sequence) -> Result<u32> {
        if x.alphabet() != self.jt.ax() || y.alphabet() != self.jt.ay() {
            return Err(Error::PairNotInTable(self.jt.clone()));
        }
        let not_here = || Error::PairNotInTable(self.jt.clone());
        let row = self.row_rank(x).map_err(|_| not_here())?;
        let col = self.col_rank(y).map_err(|_| not_here())?;
        self.symbol_at(row, col).ok_or_else(not_here)
    }

    /// Row whose cell in the column of `y` carries `symbol`.
    pub fn lookup_row(&self, y: &Sequence, symbol: u32) -> Result<usize> {
        let col = self.col_rank(y)?;
        self.coloring
            .left_of(col, symbol as usize)
            .map(|u| u as usize)
            .ok_or(Error::SymbolNotFound {
                jt: self.jt.clone(),
                side: "column",
                index: col,
                symbol: symbol as u64,
            })
    }

    /// Column whose cell in the row of `x` carries `symbol`.
    pub fn lookup_col(&self, x: &Sequence, symbol: u32) -> Result<usize> {
        let row = self.row_rank(x)?;
        self.coloring
            .right_of(row, symbol as usize)
            .map(|v| v as usize)
            .ok_or(Error::SymbolNotFound {
                jt: self.jt.clone(),
                side: "row",
                index: row,
                symbol: symbol as u64,
            })
    }

    pub fn row_sequence(&self, row: usize) -> Sequence {
        let q = self.jt.x_marginal();
        let letters = unrank_small(q.counts(), row as u128).expect("row in range");
        Sequence::from_trusted(letters, self.jt.ax())
    }

    pub fn col_sequence(&self, col: usize) -> Sequence {
        let q = self.jt.y_marginal();
        let letters = unrank_small(q.counts(), col as u128).expect("column in range");
        Sequence::from_trusted(letters, self.jt.ay())
    }

    /// Recovers x from the side information `y` and a symbol.
    pub fn decode_x(&self, y: &Sequence, symbol: u32) -> Result<Sequence> {
        self.lookup_row(y, symbol).map(|r| self.row_sequence(r))
    }

    /// Recovers y from the side information `x` and a symbol.
    pub fn decode_y(&self, x: &Sequence, symbol: u32) -> Result<Sequence> {
        self.lookup_col(x, symbol).map(|c| self.col_sequence(c))
    }

    /// Writes the table as CSV: a header of column sequences, then one line
    /// per row sequence with the symbol in each marked cell.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![String::new()];
        header.extend((0..self.right_size).map(|c| self.col_sequence(c).to_string()));
        w.write_record(&header)?;
        let mut rec = vec![String::new(); self.right_size + 1];
        for r in 0..self.left_size {
            rec[0] = self.row_sequence(r).to_string();
            for (c, cell) in rec[1..].iter_mut().enumerate() {
                cell.clear();
                if let Some(s) = self.symbol_at(r, c) {
                    cell.push_str(&s.to_string());
                }
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shared, lazily filled set of tables keyed by joint type.
///
/// Builds happen outside the lock; concurrent builds of the same type
/// produce identical tables, so whichever insert lands first is kept.
#[derive(Debug, Default)]
pub struct TableCache {
    budget: TableBudget,
    tables: RwLock<HashMap<JointType, Arc<CodingTable>>>,
}

impl TableCache {
    pub fn new(budget: TableBudget) -> Self {
        TableCache {
            budget,
            tables: RwLock::new(HashMap::new()),
        }
    }

    pub fn budget(&self) -> TableBudget {
        self.budget
    }

    pub fn get(&self, jt: &JointType) -> Result<Arc<CodingTable>> {
        if let Some(t) = self.tables.read().expect("cache lock").get(jt) {
            return Ok(Arc::clone(t));
        }
        let built = Arc::new(CodingTable::build_with_budget(jt, self.budget)?);
        let mut map = self.tables.write().expect("cache lock");
        Ok(Arc::clone(map.entry(jt.clone()).or_insert(built)))
    }

    pub fn len(&self) -> usize {
        self.tables.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{rank_in_type_class, Alphabet};
    use num_bigint::BigUint;

    fn jt(rows: &[[u32; 2]]) -> JointType {
        JointType::from_rows(rows).unwrap()
    }

    fn pairs_of(j: &JointType) -> Vec<(Sequence, Sequence)> {
        let n = j.n();
        let b = Alphabet::BINARY;
        let mut out = Vec::new();
        for xs in 0..1u32 << n {
            for ys in 0..1u32 << n {
                let x: Vec<u8> = (0..n).map(|i| (xs >> (n - 1 - i) & 1) as u8).collect();
                let y: Vec<u8> = (0..n).map(|i| (ys >> (n - 1 - i) & 1) as u8).collect();
                let (x, y) = (Sequence::new(x, b).unwrap(), Sequence::new(y, b).unwrap());
                if JointType::of(&x, &y).unwrap() == *j {
                    out.push((x, y));
                }
            }
        }
        out
    }

    #[test]
    fn deterministic_type_is_a_matching() {
        let g = BipartiteTypeGraph::build(&jt(&[[2, 0], [0, 2]])).unwrap();
        assert_eq!((g.left_size(), g.right_size()), (6, 6));
        assert_eq!((g.left_degree(), g.right_degree()), (1, 1));
        assert_eq!(CodingTable::from_graph(&g, TableBudget::default()).num_symbols(), 1);
    }

    #[test]
    fn balanced_type_graph_shape() {
        let g = BipartiteTypeGraph::build(&jt(&[[1, 1], [1, 1]])).unwrap();
        assert_eq!((g.left_size(), g.right_size()), (6, 6));
        assert!(g.graph().left_degrees().iter().all(|&d| d == 4));
        assert!(g.graph().right_degrees().iter().all(|&d| d == 4));
    }

    #[test]
    fn edges_are_exactly_the_type_class() {
        for j in JointType::enumerate(4, Alphabet::BINARY, Alphabet::BINARY) {
            let g = BipartiteTypeGraph::build(&j).unwrap();
            let mut expect: Vec<(u32, u32)> = pairs_of(&j)
                .iter()
                .map(|(x, y)| {
                    let r: BigUint = rank_in_type_class(x);
                    let c: BigUint = rank_in_type_class(y);
                    (r.to_u32().unwrap(), c.to_u32().unwrap())
                })
                .collect();
            expect.sort();
            assert_eq!(g.graph().edges(), &expect[..], "{j}");
        }
    }

    #[test]
    fn lookups_round_trip() {
        for n in 1..=6 {
            for j in JointType::enumerate(n, Alphabet::BINARY, Alphabet::BINARY) {
                let t = CodingTable::build(&j).unwrap();
                for (x, y) in pairs_of(&j) {
                    let s = t.lookup_symbol(&x, &y).unwrap();
                    assert!((s as usize) < t.num_symbols());
                    assert_eq!(t.decode_x(&y, s).unwrap(), x);
                    assert_eq!(t.decode_y(&x, s).unwrap(), y);
                }
            }
        }
    }

    #[test]
    fn pair_of_other_type_is_rejected() {
        let t = CodingTable::build(&jt(&[[2, 0], [0, 2]])).unwrap();
        let x = Sequence::from_digits("0011", Alphabet::BINARY).unwrap();
        let y = Sequence::from_digits("0101", Alphabet::BINARY).unwrap();
        assert!(matches!(t.lookup_symbol(&x, &y), Err(Error::PairNotInTable(_))));
        let z = Sequence::from_digits("0001", Alphabet::BINARY).unwrap();
        assert!(matches!(t.lookup_row(&z, 0), Err(Error::WrongMarginalType(_))));
    }

    #[test]
    fn missing_symbol_is_reported() {
        let t = CodingTable::build(&jt(&[[1, 1], [1, 1]])).unwrap();
        let y = Sequence::from_digits("0011", Alphabet::BINARY).unwrap();
        assert!(matches!(t.lookup_row(&y, 7), Err(Error::SymbolNotFound { .. })));
    }

    #[test]
    fn sparse_and_dense_agree() {
        let j = jt(&[[2, 1], [1, 2]]);
        let dense = CodingTable::build(&j).unwrap();
        let sparse = CodingTable::build_with_budget(
            &j,
            TableBudget {
                dense_cells: 0,
                ..TableBudget::default()
            },
        )
        .unwrap();
        assert!(matches!(sparse.cells, CellIndex::Sparse(_)));
        for r in 0..dense.left_size() {
            for c in 0..dense.right_size() {
                assert_eq!(dense.symbol_at(r, c), sparse.symbol_at(r, c));
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let j = jt(&[[3, 3], [3, 3]]);
        let err = CodingTable::build_with_budget(
            &j,
            TableBudget {
                max_edges: 10,
                dense_cells: 1 << 20,
            },
        )
        .unwrap_err();
        match err {
            Error::ResourceLimit { jt, .. } => assert_eq!(jt, j),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn independent_builds_are_identical() {
        let j = jt(&[[2, 2], [1, 3]]);
        assert_eq!(CodingTable::build(&j).unwrap(), CodingTable::build(&j).unwrap());
    }

    #[test]
    fn cache_returns_shared_table() {
        let cache = TableCache::default();
        let j = jt(&[[1, 1], [1, 1]]);
        let a = cache.get(&j).unwrap();
        let b = cache.get(&j).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn csv_dump_of_small_table() {
        let t = CodingTable::build(&jt(&[[1, 0], [0, 1]])).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), ",01,10\n01,0,\n10,,0\n");
    }
}
