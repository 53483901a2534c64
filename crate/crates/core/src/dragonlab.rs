//! Lattice verification of the dragon curve: no edge is traversed twice, and
//! four quarter-turned copies sharing the start vertex are edge-disjoint and
//! cover ever larger squares of the grid.

use std::collections::HashMap;

use serde::{Serialize, Serializer};

use crate::curves::{dragon_polyline, IPoint, LatticePath};
use crate::error::{Error, Result};

pub const NON_OVERLAP_MAX_ITER: u32 = 22;
pub const FOUR_COPY_MAX_ITER: u32 = 18;

/// Unit lattice edge with endpoints in ascending order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Edge(pub IPoint, pub IPoint);

impl Edge {
    /// Fails unless `a` and `b` are lattice neighbours.
    pub fn new(a: IPoint, b: IPoint) -> Result<Edge> {
        if (a.x - b.x).abs() + (a.y - b.y).abs() != 1 {
            return Err(Error::domain(format!(
                "not a unit axis-aligned step: ({}, {}) -> ({}, {})",
                a.x, a.y, b.x, b.y
            )));
        }
        Ok(if a <= b { Edge(a, b) } else { Edge(b, a) })
    }
}

/// Multiplicity of each traversed lattice edge.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeMultiset {
    counts: HashMap<Edge, u32>,
}

impl EdgeMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, e: Edge) {
        *self.counts.entry(e).or_insert(0) += 1;
    }

    pub fn add_path(&mut self, p: &LatticePath) -> Result<()> {
        for w in p.points.windows(2) {
            self.insert(Edge::new(w[0], w[1])?);
        }
        Ok(())
    }

    pub fn count(&self, e: &Edge) -> u32 {
        self.counts.get(e).copied().unwrap_or(0)
    }

    pub fn contains(&self, a: IPoint, b: IPoint) -> bool {
        Edge::new(a, b).is_ok_and(|e| self.counts.contains_key(&e))
    }

    /// Number of distinct edges.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Sum of multiplicities.
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.counts.values().copied().max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Entries sorted by edge.
    pub fn sorted(&self) -> Vec<(Edge, u32)> {
        let mut v: Vec<(Edge, u32)> = self.counts.iter().map(|(e, c)| (*e, *c)).collect();
        v.sort_unstable();
        v
    }

    fn bounds(&self) -> Option<(IPoint, IPoint)> {
        let mut it = self.counts.keys().flat_map(|e| [e.0, e.1]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), p| {
            (
                IPoint::new(lo.x.min(p.x), lo.y.min(p.y)),
                IPoint::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        }))
    }
}

impl Serialize for EdgeMultiset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            a: [i64; 2],
            b: [i64; 2],
            count: u32,
        }
        let entries: Vec<Entry> = self
            .sorted()
            .into_iter()
            .map(|(e, count)| Entry {
                a: [e.0.x, e.0.y],
                b: [e.1.x, e.1.y],
                count,
            })
            .collect();
        entries.serialize(serializer)
    }
}

pub fn edge_multiset(p: &LatticePath) -> Result<EdgeMultiset> {
    let mut m = EdgeMultiset::new();
    m.add_path(p)?;
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlapReport {
    pub iteration: u32,
    pub ok: bool,
    pub segments: u64,
    pub max_edge_multiplicity: u32,
    pub max_vertex_visits: u32,
}

/// On the unit lattice a crossing or overlap of axis-aligned unit edges is
/// exactly a repeated edge; revisited vertices ("touching") are allowed.
pub fn check_non_overlap(n: u32) -> Result<OverlapReport> {
    if n > NON_OVERLAP_MAX_ITER {
        return Err(Error::Resource {
            what: "non-overlap iteration",
            value: n as u64,
            cap: NON_OVERLAP_MAX_ITER as u64,
        });
    }
    let path = dragon_polyline(n)?;
    let edges = edge_multiset(&path)?;
    let mut visits: HashMap<IPoint, u32> = HashMap::with_capacity(path.points.len());
    for p in &path.points {
        *visits.entry(*p).or_insert(0) += 1;
    }
    let max_edge_multiplicity = edges.max_multiplicity();
    Ok(OverlapReport {
        iteration: n,
        ok: max_edge_multiplicity == 1,
        segments: edges.total(),
        max_edge_multiplicity,
        max_vertex_visits: visits.values().copied().max().unwrap_or(0),
    })
}

/// Union of the iteration-`n` dragon rotated by 0°, 90°, 180° and 270° about
/// the origin.
pub fn four_copy_union(n: u32) -> Result<EdgeMultiset> {
    if n > FOUR_COPY_MAX_ITER {
        return Err(Error::Resource {
            what: "four-copy iteration",
            value: n as u64,
            cap: FOUR_COPY_MAX_ITER as u64,
        });
    }
    let path = dragon_polyline(n)?;
    let mut m = EdgeMultiset::new();
    for q in 0..4 {
        let rotated = LatticePath {
            points: path.points.iter().map(|p| p.rotate_quarter(q)).collect(),
        };
        m.add_path(&rotated)?;
    }
    Ok(m)
}

/// Largest fully covered square window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FilledSquare {
    /// Side length in lattice units; 0 when nothing is covered.
    pub side: u32,
    /// Lower-left corner of the first (row-major from the bottom) window found.
    pub corner: IPoint,
}

/// Largest axis-parallel `L×L` window `[x0, x0+L]×[y0, y0+L]`, over all
/// integer positions, whose every interior grid edge is present. Edges on
/// the window boundary are not required, so any nonempty multiset has
/// `L ≥ 1`.
pub fn max_filled_square(e: &EdgeMultiset) -> FilledSquare {
    let Some((lo, hi)) = e.bounds() else {
        return FilledSquare {
            side: 0,
            corner: IPoint::ORIGIN,
        };
    };
    // one unit of margin so windows may overhang the covered region
    let lo = IPoint::new(lo.x - 1, lo.y - 1);
    let hi = IPoint::new(hi.x + 1, hi.y + 1);
    let w = (hi.x - lo.x) as usize;
    let h = (hi.y - lo.y) as usize;
    let at = |x: usize, y: usize| IPoint::new(lo.x + x as i64, lo.y + y as i64);
    // horiz[y][x]: edge (x,y)-(x+1,y); vert[y][x]: edge (x,y)-(x,y+1)
    let mut horiz = vec![vec![false; w]; h + 1];
    let mut vert = vec![vec![false; w + 1]; h];
    for edge in e.counts.keys() {
        let (a, b) = (edge.0, edge.1);
        let (x, y) = ((a.x - lo.x) as usize, (a.y - lo.y) as usize);
        if a.y == b.y {
            horiz[y][x] = true;
        } else {
            vert[y][x] = true;
        }
    }
    let (hs, vs) = (prefix_sums(&horiz), prefix_sums(&vert));
    let full = |x0: usize, y0: usize, l: usize| -> bool {
        if x0 + l > w || y0 + l > h {
            return false;
        }
        let need = ((l - 1) * l) as u32;
        // horizontal edges on rows y0+1 ..= y0+l-1, vertical on columns x0+1 ..= x0+l-1
        rect_sum(&hs, x0, y0 + 1, x0 + l, y0 + l) == need
            && rect_sum(&vs, x0 + 1, y0, x0 + l, y0 + l) == need
    };
    let mut best = FilledSquare {
        side: 0,
        corner: at(0, 0),
    };
    for y0 in 0..=h {
        for x0 in 0..=w {
            while full(x0, y0, best.side as usize + 1) {
                best = FilledSquare {
                    side: best.side + 1,
                    corner: at(x0, y0),
                };
            }
        }
    }
    best
}

fn prefix_sums(grid: &[Vec<bool>]) -> Vec<Vec<u32>> {
    let cols = grid.first().map_or(0, Vec::len);
    let mut s = vec![vec![0u32; cols + 1]; grid.len() + 1];
    for (y, row) in grid.iter().enumerate() {
        for (x, &cell) in row.iter().enumerate() {
            s[y + 1][x + 1] = s[y][x + 1] + s[y + 1][x] - s[y][x] + cell as u32;
        }
    }
    s
}

/// Number of set cells with `x0 <= x < x1`, `y0 <= y < y1`.
fn rect_sum(s: &[Vec<u32>], x0: usize, y0: usize, x1: usize, y1: usize) -> u32 {
    if x1 <= x0 || y1 <= y0 {
        return 0;
    }
    s[y1][x1] + s[y0][x0] - s[y0][x1] - s[y1][x0]
}
