//! Generalized Heron iteration for k-th roots, Newton basin classification
//! and rendering, and the tree of knots (points whose orbit hits 0).

use rayon::prelude::*;
use serde::Serialize;

use crate::complexes::{nth_roots, poly_roots, CPoly, Cpx};
use crate::error::{Error, Result};
use crate::mandel::RenderParams;
use crate::raster::Image;

/// An iterate with modulus below this counts as an exact hit on 0.
pub const HIT_ZERO_EPS: f64 = 1e-14;
/// Nearest-root snap distance for declaring convergence.
pub const ROOT_SNAP: f64 = 1e-6;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_BUDGET: u32 = 200;
/// Leaf count cap for knot trees (3⁷).
pub const KNOT_MAX_LEAVES: u64 = 2187;

pub const PALETTE: [[u8; 3]; 6] = [
    [255, 0, 0],
    [0, 255, 0],
    [0, 0, 255],
    [255, 255, 0],
    [0, 255, 255],
    [255, 0, 255],
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeronParams {
    pub k: u32,
    pub a: Cpx,
    pub z0: Cpx,
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::domain(format!("root degree k must be >= 2, got {k}")));
    }
    Ok(())
}

/// `((k−1)·x + a/x^{k−1}) / k`, the mean of k−1 copies of x and a/x^{k−1}.
/// A zero input reports `DivisionByZero { step: 0 }`.
pub fn heron_step(x: Cpx, k: u32, a: Cpx) -> Result<Cpx> {
    check_k(k)?;
    if x == Cpx::new(0.0, 0.0) {
        return Err(Error::DivisionByZero { step: 0 });
    }
    let kf = k as f64;
    Ok(((kf - 1.0) * x + a / x.powu(k - 1)) / kf)
}

/// `x₁ = z0, …, x_n`. A zero iterate `x_i` with `i < n` fails with
/// `DivisionByZero { step: i }` since `x_{i+1}` is undefined.
pub fn heron_sequence(p: &HeronParams, n: usize) -> Result<Vec<Cpx>> {
    check_k(p.k)?;
    let mut out = Vec::with_capacity(n);
    let mut x = p.z0;
    for i in 1..=n {
        out.push(x);
        if i < n {
            x = heron_step(x, p.k, p.a).map_err(|_| Error::DivisionByZero { step: i })?;
        }
    }
    Ok(out)
}

/// `(x + a/x²)/2`: averages only two numbers instead of three. Convergence is
/// observed empirically, not proven.
pub fn student_variant_step(x: Cpx, a: Cpx) -> Result<Cpx> {
    if x == Cpx::new(0.0, 0.0) {
        return Err(Error::DivisionByZero { step: 0 });
    }
    Ok((x + a / (x * x)) / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    /// `iters` counts the steps taken before the step that was below `tol`.
    Converged { root_index: usize, iters: u32 },
    /// 1-based index of the iterate that hit 0 (`x₁ = z0`).
    HitZero { step: u32 },
    Unresolved,
}

/// Classifies the start point against the canonical root order of
/// `nth_roots(a, k)`.
pub fn newton_classify(z0: Cpx, k: u32, a: Cpx, max_iter: u32, tol: f64) -> Result<Classification> {
    check_k(k)?;
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let roots = nth_roots(a, k)?;
    Ok(classify_with(&roots, z0, k, a, max_iter, tol))
}

fn classify_with(roots: &[Cpx], z0: Cpx, k: u32, a: Cpx, max_iter: u32, tol: f64) -> Classification {
    let kf = k as f64;
    let mut x = z0;
    for n in 0..max_iter {
        if x.norm() < HIT_ZERO_EPS {
            return Classification::HitZero { step: n + 1 };
        }
        let next = ((kf - 1.0) * x + a / x.powu(k - 1)) / kf;
        if (next - x).norm() < tol {
            let (idx, dist) = roots
                .iter()
                .enumerate()
                .map(|(i, r)| (i, (next - r).norm()))
                .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
            if dist < ROOT_SNAP {
                return Classification::Converged {
                    root_index: idx,
                    iters: n,
                };
            }
        }
        if !next.re.is_finite() || !next.im.is_finite() {
            return Classification::Unresolved;
        }
        x = next;
    }
    Classification::Unresolved
}

/// Roots of `(k−1)x^k − k·c·x^{k−1} + a`, the points one Heron step sends
/// to `c`. Multiple roots are repeated, so the result always has k entries.
pub fn knot_children(c: Cpx, k: u32, a: Cpx) -> Result<Vec<Cpx>> {
    Ok(knot_children_mult(c, k, a)?
        .into_iter()
        .flat_map(|(z, m)| std::iter::repeat(z).take(m))
        .collect())
}

/// Distinct children with multiplicities, in canonical order.
pub fn knot_children_mult(c: Cpx, k: u32, a: Cpx) -> Result<Vec<(Cpx, usize)>> {
    check_k(k)?;
    if a == Cpx::new(0.0, 0.0) {
        return Err(Error::domain("radicand a must be nonzero"));
    }
    let mut coeffs = vec![Cpx::new(0.0, 0.0); k as usize + 1];
    coeffs[0] = a;
    coeffs[k as usize - 1] = -c * k as f64;
    coeffs[k as usize] = Cpx::new(k as f64 - 1.0, 0.0);
    let roots = poly_roots(&CPoly::new(coeffs)?)?;
    Ok(roots.into_iter().map(|r| (r.root, r.multiplicity)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KnotTree {
    pub value: Cpx,
    pub depth: u32,
    /// Multiplicity of `value` as a root of the parent's knot polynomial.
    pub multiplicity: usize,
    pub children: Vec<KnotTree>,
}

impl KnotTree {
    /// Node counts per level, with multiplicity. A repeated child stands for
    /// several identical subtrees, so weights multiply down the path.
    pub fn level_counts(&self) -> Vec<usize> {
        fn go(t: &KnotTree, weight: usize, counts: &mut Vec<usize>) {
            let d = t.depth as usize;
            if counts.len() <= d {
                counts.resize(d + 1, 0);
            }
            counts[d] += weight;
            for c in &t.children {
                go(c, weight * c.multiplicity, counts);
            }
        }
        let mut counts = Vec::new();
        go(self, self.multiplicity, &mut counts);
        counts
    }

    /// Preorder walk passing each node with its parent's value.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a KnotTree, Option<Cpx>)) {
        fn go<'a>(t: &'a KnotTree, parent: Option<Cpx>, f: &mut impl FnMut(&'a KnotTree, Option<Cpx>)) {
            f(t, parent);
            for c in &t.children {
                go(c, Some(t.value), f);
            }
        }
        go(self, None, f)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(KnotTree::node_count).sum::<usize>()
    }
}

fn build(value: Cpx, depth: u32, multiplicity: usize, max_depth: u32, k: u32, a: Cpx) -> Result<KnotTree> {
    let children = if depth == max_depth {
        Vec::new()
    } else {
        knot_children_mult(value, k, a)?
            .into_par_iter()
            .map(|(z, m)| build(z, depth + 1, m, max_depth, k, a))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(KnotTree {
        value,
        depth,
        multiplicity,
        children,
    })
}

/// Knot tree rooted at 0, `depth` generations deep. Capped at
/// `k^depth ≤ 2187` leaves.
pub fn knot_tree(depth: u32, k: u32, a: Cpx) -> Result<KnotTree> {
    check_k(k)?;
    if a == Cpx::new(0.0, 0.0) {
        return Err(Error::domain("radicand a must be nonzero"));
    }
    let leaves = (k as u64).checked_pow(depth).unwrap_or(u64::MAX);
    if leaves > KNOT_MAX_LEAVES {
        return Err(Error::Resource {
            what: "knot tree leaves",
            value: leaves,
            cap: KNOT_MAX_LEAVES,
        });
    }
    build(Cpx::new(0.0, 0.0), 0, 1, depth, k, a)
}

/// `round(base · max(0.25, 1 − iters/64))` per channel.
pub fn shade(root_index: usize, iters: u32) -> [u8; 3] {
    let f = (1.0 - iters as f64 / 64.0).max(0.25);
    PALETTE[root_index % PALETTE.len()].map(|b| (b as f64 * f).round() as u8)
}

/// Basin image: each pixel colored by the root its Newton orbit reaches,
/// dimmed by iteration count. `p.max_iter` is the iteration budget.
pub fn render_newton(p: &RenderParams, k: u32, a: Cpx) -> Result<Image> {
    p.validate()?;
    if !(2..=6).contains(&k) {
        return Err(Error::domain(format!("render needs k in 2..=6, got {k}")));
    }
    let roots = nth_roots(a, k)?;
    let mut img = Image::new(p.width, p.height, 3)?;
    img.pixels
        .par_chunks_mut(3 * p.width as usize)
        .enumerate()
        .for_each(|(j, row)| {
            for (i, px) in row.chunks_exact_mut(3).enumerate() {
                let z = p.pixel_to_complex(i as u32, j as u32);
                let rgb = match classify_with(&roots, z, k, a, p.max_iter, DEFAULT_TOL) {
                    Classification::Converged { root_index, iters } => shade(root_index, iters),
                    _ => [0, 0, 0],
                };
                px.copy_from_slice(&rgb);
            }
        });
    Ok(img)
}
