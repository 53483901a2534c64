//! Generators and exact measures for the dragon curve, Koch curve and
//! snowflake, Sierpiński carpet, and Cantor set.
//!
//! Iteration indexing: dragon iteration `n` has `2ⁿ` unit segments (iteration
//! 0 is one segment); Koch and snowflake iteration 1 is the initial figure.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rationals::{geom_sum_finite, geom_sum_infinite, Rat};

pub const DRAGON_MAX_ITER: u32 = 24;
pub const CARPET_MAX_DEPTH: u32 = 8;
pub const CANTOR_MAX_DEPTH: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Turn {
    L,
    R,
}

impl Turn {
    pub fn flip(self) -> Turn {
        match self {
            Turn::L => Turn::R,
            Turn::R => Turn::L,
        }
    }
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Turn::L => "L",
            Turn::R => "R",
        })
    }
}

/// Paperfolding turn sequence `S_{n+1} = S_n · R · reverse(flip(S_n))`.
pub fn dragon_turns(n: u32) -> Vec<Turn> {
    let mut seq = Vec::with_capacity((1usize << n.min(30)).saturating_sub(1));
    for _ in 0..n {
        let tail: Vec<Turn> = seq.iter().rev().map(|t: &Turn| t.flip()).collect();
        seq.push(Turn::R);
        seq.extend(tail);
    }
    seq
}

/// Integer lattice point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IPoint {
    pub x: i64,
    pub y: i64,
}

impl IPoint {
    pub const ORIGIN: IPoint = IPoint { x: 0, y: 0 };

    pub fn new(x: i64, y: i64) -> Self {
        IPoint { x, y }
    }

    /// Counter-clockwise quarter turn about the origin, applied `quarters` times.
    pub fn rotate_quarter(self, quarters: u32) -> IPoint {
        (0..quarters % 4).fold(self, |p, _| IPoint::new(-p.y, p.x))
    }
}

/// Polyline on the integer lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticePath {
    pub points: Vec<IPoint>,
}

impl LatticePath {
    pub fn segment_count(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    pub fn end(&self) -> IPoint {
        *self.points.last().expect("nonempty path")
    }

    pub fn to_polyline(&self) -> Polyline {
        Polyline {
            points: self.points.iter().map(|p| [p.x as f64, p.y as f64]).collect(),
        }
    }
}

/// Dragon curve as a unit-step lattice path starting at the origin heading
/// +x. `R` turns clockwise with y up.
pub fn dragon_polyline(n: u32) -> Result<LatticePath> {
    if n > DRAGON_MAX_ITER {
        return Err(Error::Resource {
            what: "dragon iteration",
            value: n as u64,
            cap: DRAGON_MAX_ITER as u64,
        });
    }
    let turns = dragon_turns(n);
    let mut points = Vec::with_capacity(turns.len() + 2);
    let (mut x, mut y) = (0i64, 0i64);
    let (mut dx, mut dy) = (1i64, 0i64);
    points.push(IPoint::new(x, y));
    x += dx;
    y += dy;
    points.push(IPoint::new(x, y));
    for t in turns {
        (dx, dy) = match t {
            Turn::R => (dy, -dx),
            Turn::L => (-dy, dx),
        };
        x += dx;
        y += dy;
        points.push(IPoint::new(x, y));
    }
    Ok(LatticePath { points })
}

/// Polyline with floating-point vertices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
}

impl Polyline {
    pub fn segment_count(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    pub fn arc_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
            .sum()
    }
}

/// Replaces every segment by four of one-third length, with an equilateral
/// bump on the left of the travel direction.
fn koch_refine(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let (sin60, cos60) = (3f64.sqrt() / 2.0, 0.5);
    let mut out = Vec::with_capacity(points.len() * 4);
    out.push(points[0]);
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let d = [(b[0] - a[0]) / 3.0, (b[1] - a[1]) / 3.0];
        let p1 = [a[0] + d[0], a[1] + d[1]];
        let bump = [d[0] * cos60 - d[1] * sin60, d[0] * sin60 + d[1] * cos60];
        let p2 = [p1[0] + bump[0], p1[1] + bump[1]];
        let p3 = [a[0] + 2.0 * d[0], a[1] + 2.0 * d[1]];
        out.extend([p1, p2, p3, b]);
    }
    out
}

fn check_koch_iter(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("Koch iterations start at 1"));
    }
    if n > 12 {
        return Err(Error::Resource {
            what: "Koch iteration",
            value: n as u64,
            cap: 12,
        });
    }
    Ok(())
}

/// Koch curve over the unit segment `(0,0)→(1,0)`, bumps pointing up.
pub fn koch_polyline(n: u32) -> Result<Polyline> {
    check_koch_iter(n)?;
    let mut points = vec![[0.0, 0.0], [1.0, 0.0]];
    for _ in 1..n {
        points = koch_refine(&points);
    }
    Ok(Polyline { points })
}

/// `(4/3)^{n−1}`.
pub fn koch_length(n: u32) -> Result<Rat> {
    if n == 0 {
        return Err(Error::domain("Koch iterations start at 1"));
    }
    Ok(Rat::new(4, 3).pow(n as i32 - 1))
}

/// Closed snowflake on the unit equilateral triangle `(0,0), (1,0),
/// (1/2, √3/2)`, traversed clockwise so that bumps point outward. The first
/// point is repeated at the end.
pub fn snowflake_polyline(n: u32) -> Result<Polyline> {
    check_koch_iter(n)?;
    let mut points = vec![[0.0, 0.0], [0.5, 3f64.sqrt() / 2.0], [1.0, 0.0], [0.0, 0.0]];
    for _ in 1..n {
        points = koch_refine(&points);
    }
    Ok(Polyline { points })
}

/// Snowflake area in units of the initial triangle:
/// `1 + 3·Σ_{i=0}^{n−2} (1/9)(4/9)ⁱ`.
pub fn snowflake_area(n: u32) -> Result<Rat> {
    if n == 0 {
        return Err(Error::domain("snowflake iterations start at 1"));
    }
    Ok(Rat::one() + geom_sum_finite(&Rat::new(1, 3), &Rat::new(4, 9), n - 1))
}

/// `1 + (1/3)/(1 − 4/9) = 8/5`.
pub fn snowflake_area_limit() -> Rat {
    Rat::one() + geom_sum_infinite(&Rat::new(1, 3), &Rat::new(4, 9)).expect("4/9 < 1")
}

/// Self-similar decomposition of one corner of the snowflake (triangle area
/// `T = 1`): `t` is the corner triangle, `U` its part inside the snowflake,
/// `u` each of the two similar pieces outside.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SnowflakeDecomposition {
    pub t: Rat,
    pub u: Rat,
    pub big_u: Rat,
    pub area: Rat,
}

/// Solves `t/3 = T/9`, `U = 3u` (similarity 1:3 in area) and `t = U + 2u`,
/// then `A = 1 + 3U`.
pub fn snowflake_decomposition() -> SnowflakeDecomposition {
    let big_t = Rat::one();
    let t = &(&big_t / &Rat::from_int(9)) * &Rat::from_int(3);
    // t = 3u + 2u
    let u = &t / &Rat::from_int(5);
    let big_u = &u * &Rat::from_int(3);
    let area = &big_t + &(&big_u * &Rat::from_int(3));
    SnowflakeDecomposition { t, u, big_u, area }
}

/// Surviving cells of the Sierpiński carpet at a given depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellSet {
    pub depth: u32,
    /// Sorted by `(x, y)`.
    pub cells: Vec<(u32, u32)>,
}

/// A cell survives iff no ternary digit position has digit 1 in both
/// coordinates.
pub fn in_carpet(mut x: u32, mut y: u32, depth: u32) -> bool {
    for _ in 0..depth {
        if x % 3 == 1 && y % 3 == 1 {
            return false;
        }
        x /= 3;
        y /= 3;
    }
    true
}

pub fn carpet_cells(d: u32) -> Result<CellSet> {
    if d > CARPET_MAX_DEPTH {
        return Err(Error::Resource {
            what: "carpet depth",
            value: d as u64,
            cap: CARPET_MAX_DEPTH as u64,
        });
    }
    let mut cells = vec![(0u32, 0u32)];
    for _ in 0..d {
        let mut next = Vec::with_capacity(cells.len() * 8);
        for &(x, y) in &cells {
            for dx in 0..3 {
                for dy in 0..3 {
                    if dx != 1 || dy != 1 {
                        next.push((3 * x + dx, 3 * y + dy));
                    }
                }
            }
        }
        cells = next;
    }
    cells.sort_unstable();
    Ok(CellSet { depth: d, cells })
}

/// `(8/9)^d`.
pub fn carpet_area(d: u32) -> Rat {
    Rat::new(8, 9).pow(d as i32)
}

/// Area removed by the first `d` steps: `Σ_{i<d} 8ⁱ·(1/3^{i+1})²`.
pub fn carpet_removed_area(d: u32) -> Rat {
    geom_sum_finite(&Rat::new(1, 9), &Rat::new(8, 9), d)
}

/// Closed intervals of the depth-`d` Cantor construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalSet {
    pub depth: u32,
    pub intervals: Vec<(Rat, Rat)>,
}

impl IntervalSet {
    pub fn contains(&self, q: &Rat) -> bool {
        let idx = self.intervals.partition_point(|(_, hi)| hi < q);
        self.intervals
            .get(idx)
            .is_some_and(|(lo, hi)| lo <= q && q <= hi)
    }
}

pub fn cantor_intervals(d: u32) -> Result<IntervalSet> {
    if d > CANTOR_MAX_DEPTH {
        return Err(Error::Resource {
            what: "Cantor depth",
            value: d as u64,
            cap: CANTOR_MAX_DEPTH as u64,
        });
    }
    let mut intervals = vec![(Rat::zero(), Rat::one())];
    for _ in 0..d {
        let mut next = Vec::with_capacity(intervals.len() * 2);
        for (lo, hi) in &intervals {
            let third = &(hi - lo) / &Rat::from_int(3);
            next.push((lo.clone(), lo + &third));
            next.push((hi - &third, hi.clone()));
        }
        intervals = next;
    }
    Ok(IntervalSet { depth: d, intervals })
}

/// `(2/3)^d`.
pub fn cantor_measure(d: u32) -> Rat {
    Rat::new(2, 3).pow(d as i32)
}

/// `Σ_{i<d} 2ⁱ/3^{i+1} = 1 − (2/3)^d`.
pub fn cantor_removed_length(d: u32) -> Rat {
    geom_sum_finite(&Rat::new(1, 3), &Rat::new(2, 3), d)
}

/// Exact Cantor-set membership. Follows `x ← 3x` (digit 0) or `x ← 3x − 2`
/// (digit 2); a state strictly between 1/3 and 2/3 forces digit 1 and the
/// point is removed. Rational states recur, so the walk ends.
pub fn in_cantor(q: &Rat) -> Result<bool> {
    if q.is_negative() || *q > Rat::one() {
        return Err(Error::domain(format!("Cantor membership needs 0 <= q <= 1, got {q}")));
    }
    let (third, two_thirds) = (Rat::new(1, 3), Rat::new(2, 3));
    let (three, two) = (Rat::from_int(3), Rat::from_int(2));
    let mut seen = HashSet::new();
    let mut x = q.clone();
    loop {
        if !seen.insert(x.clone()) {
            return Ok(true);
        }
        x = if x <= third {
            &x * &three
        } else if x >= two_thirds {
            &(&x * &three) - &two
        } else {
            return Ok(false);
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Turn::{L, R};

    #[test]
    fn dragon_turn_sequences() {
        assert!(dragon_turns(0).is_empty());
        assert_eq!(dragon_turns(1), vec![R]);
        assert_eq!(dragon_turns(2), vec![R, R, L]);
        assert_eq!(dragon_turns(3), vec![R, R, L, R, R, L, L]);
        for n in 0..12 {
            assert_eq!(dragon_turns(n).len(), (1 << n) - 1);
        }
    }

    #[test]
    fn dragon_paths() {
        let p = dragon_polyline(0).unwrap();
        assert_eq!(p.points, vec![IPoint::new(0, 0), IPoint::new(1, 0)]);
        let p = dragon_polyline(2).unwrap();
        let expect = [(0, 0), (1, 0), (1, -1), (0, -1), (0, -2)].map(|(x, y)| IPoint::new(x, y));
        assert_eq!(p.points, expect);
        assert_eq!(dragon_polyline(7).unwrap().segment_count(), 128);
        assert!(matches!(dragon_polyline(25), Err(Error::Resource { .. })));
    }

    #[test]
    fn dragon_endpoint_law() {
        // endpoint(n+1) = endpoint(n)·(1 − i)
        let mut prev = dragon_polyline(0).unwrap().end();
        for n in 1..=20 {
            let end = dragon_polyline(n).unwrap().end();
            let expect = IPoint::new(prev.x + prev.y, prev.y - prev.x);
            assert_eq!(end, expect, "n = {n}");
            assert_eq!(end.x * end.x + end.y * end.y, 1i64 << n);
            prev = end;
        }
    }

    #[test]
    fn dragon_prefix_property() {
        let a = dragon_polyline(9).unwrap();
        let b = dragon_polyline(10).unwrap();
        assert_eq!(&b.points[..a.points.len()], &a.points[..]);
    }

    #[test]
    fn koch_lengths() {
        assert_eq!(koch_length(1).unwrap(), Rat::one());
        assert_eq!(koch_length(2).unwrap(), Rat::new(4, 3));
        assert_eq!(koch_length(3).unwrap(), Rat::new(16, 9));
        for n in 1..=12 {
            let ratio = koch_length(n + 1).unwrap() / koch_length(n).unwrap();
            assert_eq!(ratio, Rat::new(4, 3));
        }
        assert!(koch_length(0).is_err());
    }

    #[test]
    fn koch_polylines() {
        assert_eq!(koch_polyline(2).unwrap().points.len(), 5);
        for n in 1..=8 {
            let p = koch_polyline(n).unwrap();
            assert_eq!(p.points.len(), 4usize.pow(n - 1) + 1);
            let exact = koch_length(n).unwrap().to_f64();
            assert!((p.arc_length() - exact).abs() <= 1e-9 * exact);
        }
        let p = koch_polyline(2).unwrap();
        assert!((p.points[2][1] - 3f64.sqrt() / 6.0).abs() < 1e-15);
    }

    #[test]
    fn snowflake_areas() {
        assert_eq!(snowflake_area(1).unwrap(), Rat::one());
        assert_eq!(snowflake_area(2).unwrap(), Rat::new(4, 3));
        assert_eq!(snowflake_area_limit(), Rat::new(8, 5));
        for n in 1..=20 {
            let closed = Rat::new(8, 5) - Rat::new(3, 5) * Rat::new(4, 9).pow(n as i32 - 1);
            assert_eq!(snowflake_area(n).unwrap(), closed);
        }
    }

    #[test]
    fn snowflake_alternative_derivation() {
        let d = snowflake_decomposition();
        assert_eq!(d.t, Rat::new(1, 3));
        assert_eq!(d.u, Rat::new(1, 15));
        assert_eq!(d.big_u, Rat::new(1, 5));
        assert_eq!(d.area, Rat::new(8, 5));
        assert_eq!(d.t, &d.big_u + &(&d.u * &Rat::from_int(2)));
    }

    #[test]
    fn snowflake_polyline_shape() {
        let p = snowflake_polyline(1).unwrap();
        assert_eq!(p.points.len(), 4);
        let p = snowflake_polyline(3).unwrap();
        assert_eq!(p.points.len(), 3 * 16 + 1);
        assert_eq!(p.points.first(), p.points.last());
    }

    #[test]
    fn carpet() {
        let c = carpet_cells(0).unwrap();
        assert_eq!(c.cells, vec![(0, 0)]);
        assert_eq!(carpet_cells(1).unwrap().cells.len(), 8);
        assert_eq!(carpet_area(1), Rat::new(8, 9));
        let c3 = carpet_cells(3).unwrap();
        assert_eq!(c3.cells.len(), 512);
        assert_eq!(carpet_area(3), Rat::new(512, 729));
        // address-rule enumeration oracle
        let brute: Vec<(u32, u32)> = (0..27)
            .flat_map(|x| (0..27).map(move |y| (x, y)))
            .filter(|&(x, y)| in_carpet(x, y, 3))
            .collect();
        assert_eq!(c3.cells, brute);
        for d in 0..=8 {
            assert_eq!(carpet_area(d), Rat::one() - carpet_removed_area(d));
        }
        assert!(carpet_cells(9).is_err());
    }

    #[test]
    fn cantor() {
        let c0 = cantor_intervals(0).unwrap();
        assert_eq!(c0.intervals, vec![(Rat::zero(), Rat::one())]);
        let c1 = cantor_intervals(1).unwrap();
        assert_eq!(
            c1.intervals,
            vec![(Rat::zero(), Rat::new(1, 3)), (Rat::new(2, 3), Rat::one())]
        );
        assert_eq!(cantor_measure(1), Rat::new(2, 3));
        let c5 = cantor_intervals(5).unwrap();
        assert_eq!(c5.intervals.len(), 32);
        assert!(c5.intervals.iter().all(|(lo, hi)| hi - lo == Rat::new(1, 243)));
        let total: Rat = c5.intervals.iter().map(|(lo, hi)| hi - lo).sum();
        assert_eq!(total, cantor_measure(5));
        assert_eq!(cantor_removed_length(5), Rat::one() - cantor_measure(5));
        assert_eq!(geom_sum_infinite(&Rat::new(1, 3), &Rat::new(2, 3)).unwrap(), Rat::one());
        assert!(cantor_intervals(21).is_err());
    }

    #[test]
    fn cantor_membership() {
        assert!(in_cantor(&Rat::new(1, 4)).unwrap());
        assert!(!in_cantor(&Rat::new(1, 2)).unwrap());
        assert!(in_cantor(&Rat::zero()).unwrap());
        assert!(in_cantor(&Rat::one()).unwrap());
        assert!(in_cantor(&Rat::new(1, 3)).unwrap());
        assert!(in_cantor(&Rat::new(3, 4)).unwrap());
        assert!(!in_cantor(&Rat::new(4, 9)).unwrap());
        assert!(in_cantor(&Rat::new(3, 2)).is_err());
        let c = cantor_intervals(6).unwrap();
        assert!(c.contains(&Rat::new(1, 4)));
        assert!(!c.contains(&Rat::new(1, 2)));
    }
}
