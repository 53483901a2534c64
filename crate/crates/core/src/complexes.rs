//! Complex arithmetic, root extraction, and a simultaneous-iteration
//! polynomial root finder.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};

/// Complex number in double precision. Serializes as `[re, im]`.
pub type Cpx = num_complex::Complex64;

/// Residual tolerance factor: `|p(root)| <= ROOT_RESIDUAL_TOL * max|coeff|`.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-9;
/// Roots closer than this are reported as one root with summed multiplicity.
pub const ROOT_MERGE_DIST: f64 = 1e-6;
pub const MAX_SWEEPS: usize = 500;
/// Angular offset of the initial guesses on the Cauchy-bound circle.
const GUESS_PHASE: f64 = 0.4;
/// Radius (relative) within which approximations are tested as one multiple root.
const CLUSTER_RADIUS: f64 = 1e-3;
/// Derivative residual (relative to evaluation scale) accepted for a multiple root.
const MULTIPLE_ROOT_TOL: f64 = 1e-12;

pub fn cpx_mul(u: Cpx, v: Cpx) -> Cpx {
    u * v
}

/// True when a component is no longer finite.
pub fn is_overflowed(z: Cpx) -> bool {
    !z.re.is_finite() || !z.im.is_finite()
}

/// Argument normalized into `[0, 2π)`.
pub fn arg_2pi(z: Cpx) -> f64 {
    let a = z.im.atan2(z.re);
    let a = if a < 0.0 { a + TAU } else { a };
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Canonical sort key: argument (snapped so values a hair below 2π count as
/// 0) quantized to 1e-9 rad, then modulus.
fn canonical_cmp(a: &Cpx, b: &Cpx) -> Ordering {
    fn key(z: &Cpx) -> i64 {
        let mut arg = arg_2pi(*z);
        if TAU - arg < 1e-9 {
            arg = 0.0;
        }
        (arg * 1e9).round() as i64
    }
    key(a).cmp(&key(b)).then(a.norm().total_cmp(&b.norm()))
}

pub fn sort_canonical(roots: &mut [Cpx]) {
    roots.sort_by(canonical_cmp);
}

/// The `k` solutions of `zᵏ = a`, ordered by ascending argument in `[0, 2π)`.
/// For `a = 0` the single (k-fold) root `[0]` is returned.
pub fn nth_roots(a: Cpx, k: u32) -> Result<Vec<Cpx>> {
    if k == 0 {
        return Err(Error::domain("root degree k must be >= 1"));
    }
    if a == Cpx::new(0.0, 0.0) {
        return Ok(vec![Cpx::new(0.0, 0.0)]);
    }
    let r = a.norm().powf(1.0 / k as f64);
    let theta = arg_2pi(a);
    let mut roots: Vec<Cpx> = (0..k)
        .map(|j| Cpx::from_polar(r, (theta + TAU * j as f64) / k as f64))
        .collect();
    sort_canonical(&mut roots);
    Ok(roots)
}

/// Complex-coefficient polynomial, constant term first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CPoly {
    coeffs: Vec<Cpx>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Root {
    pub root: Cpx,
    pub multiplicity: usize,
}

impl CPoly {
    /// Trailing zero coefficients are trimmed so the leading one is nonzero.
    pub fn new(mut coeffs: Vec<Cpx>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| *c == Cpx::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::domain("zero polynomial"));
        }
        if coeffs.iter().any(|c| is_overflowed(*c)) {
            return Err(Error::domain("non-finite coefficient"));
        }
        Ok(CPoly { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        CPoly::new(coeffs.iter().map(|&c| Cpx::new(c, 0.0)).collect())
    }

    /// Expands `lead · Π (z − rᵢ)`.
    pub fn from_roots(lead: Cpx, roots: &[Cpx]) -> Result<Self> {
        let mut coeffs = vec![lead];
        for &r in roots {
            let mut next = vec![Cpx::new(0.0, 0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        CPoly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Cpx] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Cpx {
        *self.coeffs.last().expect("nonempty")
    }

    pub fn eval(&self, z: Cpx) -> Cpx {
        self.coeffs
            .iter()
            .rev()
            .fold(Cpx::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `Σ |cᵢ|·|z|ⁱ`, the magnitude scale of rounding in `eval(z)`.
    fn eval_scale(&self, z: Cpx) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> CPoly {
        if self.coeffs.len() == 1 {
            return CPoly {
                coeffs: vec![Cpx::new(0.0, 0.0)],
            };
        }
        CPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        }
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// All roots of `p` with multiplicities, in canonical (argument, modulus)
/// order. Weierstrass/Durand–Kerner simultaneous iteration from fixed
/// initial guesses, followed by multiple-root consolidation.
pub fn poly_roots(p: &CPoly) -> Result<Vec<Root>> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::domain("root finding needs degree >= 1"));
    }
    let lead = p.leading();
    if n == 1 {
        let root = -p.coeffs[0] / lead;
        return Ok(vec![Root {
            root,
            multiplicity: 1,
        }]);
    }
    let monic: Vec<Cpx> = p.coeffs.iter().map(|c| c / lead).collect();
    let monic = CPoly { coeffs: monic };

    let radius = 1.0
        + p.coeffs[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            / lead.norm();
    let mut z: Vec<Cpx> = (0..n)
        .map(|j| Cpx::from_polar(radius, TAU * j as f64 / n as f64 + GUESS_PHASE))
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut max_rel_step: f64 = 0.0;
        for j in 0..n {
            let mut denom = Cpx::new(1.0, 0.0);
            for (l, &zl) in z.iter().enumerate() {
                if l != j {
                    denom *= z[j] - zl;
                }
            }
            if denom == Cpx::new(0.0, 0.0) {
                // coincident iterates: nudge deterministically
                let nudge = Cpx::new(1e-12, 1e-12) * (1.0 + z[j].norm());
                z[j] += nudge;
                max_rel_step = f64::INFINITY;
                continue;
            }
            let step = monic.eval(z[j]) / denom;
            if is_overflowed(step) {
                max_rel_step = f64::INFINITY;
                continue;
            }
            z[j] -= step;
            max_rel_step = max_rel_step.max(step.norm() / (1.0 + z[j].norm()));
        }
        if max_rel_step <= 1e-15 {
            break;
        }
    }

    let tol = ROOT_RESIDUAL_TOL * p.max_coeff_norm();
    if z.iter().any(|&r| is_overflowed(r) || p.eval(r).norm() > tol) {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            best: z,
        });
    }

    let mut roots = consolidate(p, z);
    roots.sort_by(|a, b| canonical_cmp(&a.root, &b.root));
    Ok(roots)
}

/// Groups approximations of the same multiple root. A cluster of size `m`
/// becomes one root of multiplicity `m` when a zero of `p^(m−1)` near its
/// centroid also annihilates every lower derivative; otherwise only pairs
/// closer than [`ROOT_MERGE_DIST`] are merged.
fn consolidate(p: &CPoly, z: Vec<Cpx>) -> Vec<Root> {
    let n = z.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let reach = CLUSTER_RADIUS * (1.0 + z[i].norm().max(z[j].norm()));
            if (z[i] - z[j]).norm() <= reach {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }

    let mut out = Vec::new();
    for group in groups {
        if group.len() == 1 {
            out.push(Root {
                root: z[group[0]],
                multiplicity: 1,
            });
            continue;
        }
        let members: Vec<Cpx> = group.iter().map(|&i| z[i]).collect();
        match multiple_root(p, &members) {
            Some(root) => out.push(Root {
                root,
                multiplicity: members.len(),
            }),
            None => out.extend(merge_close(&members)),
        }
    }
    out
}

fn multiple_root(p: &CPoly, members: &[Cpx]) -> Option<Cpx> {
    let m = members.len();
    let centroid = members.iter().sum::<Cpx>() / m as f64;
    let mut derivs = vec![p.clone()];
    for _ in 0..m {
        let d = derivs.last().expect("nonempty").derivative();
        derivs.push(d);
    }
    let (target, slope) = (&derivs[m - 1], &derivs[m]);
    let mut c = centroid;
    for _ in 0..60 {
        let d = slope.eval(c);
        if d == Cpx::new(0.0, 0.0) {
            break;
        }
        let step = target.eval(c) / d;
        c -= step;
        if step.norm() <= 1e-16 * (1.0 + c.norm()) {
            break;
        }
    }
    if is_overflowed(c) {
        return None;
    }
    let reach = CLUSTER_RADIUS * (1.0 + centroid.norm());
    if members.iter().any(|&r| (r - c).norm() > reach) {
        return None;
    }
    let vanishes = derivs[..m]
        .iter()
        .all(|d| d.eval(c).norm() <= MULTIPLE_ROOT_TOL * d.eval_scale(c).max(f64::MIN_POSITIVE));
    vanishes.then_some(c)
}

fn merge_close(members: &[Cpx]) -> Vec<Root> {
    let mut out: Vec<(Cpx, usize)> = Vec::new();
    for &r in members {
        match out.iter_mut().find(|(c, _)| (*c - r).norm() <= ROOT_MERGE_DIST) {
            Some((c, m)) => {
                *c = (*c * *m as f64 + r) / (*m as f64 + 1.0);
                *m += 1;
            }
            None => out.push((r, 1)),
        }
    }
    out.into_iter()
        .map(|(root, multiplicity)| Root { root, multiplicity })
        .collect()
}
