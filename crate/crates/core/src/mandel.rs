//! Mandelbrot orbits with the radius-2 bailout, real-axis fixed points,
//! exact boundary polynomials to the left of −2, and grayscale rendering.
//!
//! Orbits use the indexing `x₁ = c, x_{n+1} = x_n² + c`; escape iterations
//! are reported as that 1-based index.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::complexes::Cpx;
use crate::error::{Error, Result};
use crate::raster::Image;

pub const BAILOUT: f64 = 2.0;
/// Post-escape iteration stops once the modulus passes this value.
pub const MAGNITUDE_CAP: f64 = 1e100;
pub const BOUNDARY_MAX_M: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitStatus {
    /// `|x_at| > 2` and every earlier element is within the disc.
    Escaped { at: u32 },
    BoundedSoFar,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Orbit {
    pub start: Cpx,
    /// `points[i]` is `x_{i+1}`; truncated at escape.
    pub points: Vec<Cpx>,
    pub status: OrbitStatus,
}

fn escaped(z: Cpx) -> bool {
    z.norm_sqr() > BAILOUT * BAILOUT
}

/// Computes at most `max_iter` orbit elements, stopping at the first one
/// outside the radius-2 disc.
pub fn mandel_orbit(c: Cpx, max_iter: u32) -> Orbit {
    let max_iter = max_iter.max(1);
    let mut points = Vec::with_capacity(max_iter.min(4096) as usize);
    let mut z = c;
    points.push(z);
    let mut status = OrbitStatus::BoundedSoFar;
    if escaped(z) {
        status = OrbitStatus::Escaped { at: 1 };
    } else {
        for n in 2..=max_iter {
            z = z * z + c;
            points.push(z);
            if escaped(z) {
                status = OrbitStatus::Escaped { at: n };
                break;
            }
        }
    }
    Orbit {
        start: c,
        points,
        status,
    }
}

/// 1-based escape index, or `None` if the first `max_iter` elements stay in
/// the disc. Allocation-free twin of [`mandel_orbit`].
pub fn escape_iter(c: Cpx, max_iter: u32) -> Option<u32> {
    let mut z = c;
    for n in 1..=max_iter.max(1) {
        if n > 1 {
            z = z * z + c;
        }
        if escaped(z) {
            return Some(n);
        }
    }
    None
}

/// Orbit continued past escape until `|x| > MAGNITUDE_CAP` or `max_iter`
/// elements, for studying post-escape growth.
pub fn orbit_to_cap(c: Cpx, max_iter: u32) -> Vec<Cpx> {
    let mut out = Vec::new();
    let mut z = c;
    for n in 1..=max_iter.max(1) {
        if n > 1 {
            z = z * z + c;
        }
        out.push(z);
        if z.norm() > MAGNITUDE_CAP {
            break;
        }
    }
    out
}

/// Real solutions of `c² + x = c`, i.e. `c = (1 ± √(1−4x))/2`, ascending.
pub fn real_fixed_points(x: f64) -> Vec<f64> {
    let disc = 1.0 - 4.0 * x;
    if disc < 0.0 {
        vec![]
    } else if disc == 0.0 {
        vec![0.5]
    } else {
        let s = disc.sqrt();
        vec![(1.0 - s) / 2.0, (1.0 + s) / 2.0]
    }
}

/// Polynomial in `r` with exact integer coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPoly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn square(&self) -> IntPoly {
        if self.coeffs.is_empty() {
            return IntPoly::default();
        }
        let n = self.coeffs.len();
        let mut out = vec![BigInt::zero(); 2 * n - 1];
        for i in 0..n {
            out[2 * i] += &self.coeffs[i] * &self.coeffs[i];
            for j in i + 1..n {
                let prod = &self.coeffs[i] * &self.coeffs[j];
                out[i + j] += &prod + &prod;
            }
        }
        IntPoly::new(out)
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn eval(&self, r: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * r + c)
    }
}

/// Descending human-readable form, e.g. `r^2 + 3r + 2`.
impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let show_mag = i == 0 || !mag.is_one();
            if show_mag {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("r")?,
                _ => write!(f, "r^{i}")?,
            }
        }
        Ok(())
    }
}

/// Serializes as an ascending list of decimal integers (arbitrarily large
/// values stay exact as JSON numbers).
impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&serde_json_number(c))?;
        }
        seq.end()
    }
}

/// Big integers serialize as strings when they do not fit in `i64`.
#[derive(Serialize)]
#[serde(untagged)]
enum IntOrString {
    Int(i64),
    Str(String),
}

fn serde_json_number(c: &BigInt) -> IntOrString {
    match i64::try_from(c) {
        Ok(v) => IntOrString::Int(v),
        Err(_) => IntOrString::Str(c.to_string()),
    }
}

/// `p₁ = −2 − r`, `p_{k+1} = p_k² − 2 − r`, returned as `[p₁, …, p_m]`.
/// The orbit of `c = −2 − r` is `x_k = p_k(r)`.
pub fn boundary_polys(m: u32) -> Result<Vec<IntPoly>> {
    if m > BOUNDARY_MAX_M {
        return Err(Error::Resource {
            what: "boundary polynomial count",
            value: m as u64,
            cap: BOUNDARY_MAX_M as u64,
        });
    }
    let shift = IntPoly::from_i64(&[-2, -1]);
    let mut out: Vec<IntPoly> = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let next = match out.last() {
            None => shift.clone(),
            Some(p) => p.square().add(&shift),
        };
        out.push(next);
    }
    Ok(out)
}

/// Linear coefficients `a_n` of `p_{n+1}` for `n = 1 .. len−1`
/// (`3, 11, 43, 171, …`).
pub fn linear_coeffs(polys: &[IntPoly]) -> Vec<BigInt> {
    polys.iter().skip(1).map(|p| p.coeff(1)).collect()
}

/// Checks `a_{n+1} = 4a_n − 1` and `a_n ≥ 3ⁿ` for every `a_n` obtainable
/// from `p₁ … p_m`.
pub fn linear_coeff_recurrence_check(m: u32) -> Result<bool> {
    if m < 2 {
        return Err(Error::domain("recurrence check needs m >= 2"));
    }
    let a = linear_coeffs(&boundary_polys(m)?);
    let four = BigInt::from(4);
    let recurrence = a.windows(2).all(|w| w[1] == &four * &w[0] - 1);
    let mut pow3 = BigInt::one();
    let bound = a.iter().all(|an| {
        pow3 *= 3;
        *an >= pow3
    });
    Ok(recurrence && bound)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RenderParams {
    pub center: Cpx,
    /// Complex-plane width of one pixel.
    pub scale: f64,
    pub width: u32,
    pub height: u32,
    pub max_iter: u32,
}

impl RenderParams {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::domain("width and height must be >= 1"));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::domain("scale must be positive and finite"));
        }
        if !(self.center.re.is_finite() && self.center.im.is_finite()) {
            return Err(Error::domain("center must be finite"));
        }
        if self.max_iter == 0 {
            return Err(Error::domain("max_iter must be >= 1"));
        }
        Ok(())
    }

    /// `center + ((i − w/2) + (h/2 − j)·i)·scale`.
    pub fn pixel_to_complex(&self, i: u32, j: u32) -> Cpx {
        let dx = i as f64 - self.width as f64 / 2.0;
        let dy = self.height as f64 / 2.0 - j as f64;
        Cpx::new(self.center.re + dx * self.scale, self.center.im + dy * self.scale)
    }

    /// Inverse of [`pixel_to_complex`](Self::pixel_to_complex), rounded to
    /// the nearest pixel; `None` if outside the image.
    pub fn complex_to_pixel(&self, z: Cpx) -> Option<(u32, u32)> {
        let i = ((z.re - self.center.re) / self.scale + self.width as f64 / 2.0).round();
        let j = (self.height as f64 / 2.0 - (z.im - self.center.im) / self.scale).round();
        let inside = i >= 0.0 && j >= 0.0 && i < self.width as f64 && j < self.height as f64;
        inside.then_some((i as u32, j as u32))
    }
}

/// `0` if bounded, else `255 − min(254, ⌊254·escape/max_iter⌋)`.
pub fn gray_level(escape: Option<u32>, max_iter: u32) -> u8 {
    match escape {
        None => 0,
        Some(e) => {
            let shade = (254u64 * e as u64 / max_iter as u64).min(254);
            (255 - shade) as u8
        }
    }
}

/// Grayscale escape-time image. Rows are computed in parallel and written
/// into fixed slots, so output is identical for any scheduling.
pub fn render_mandel(p: &RenderParams) -> Result<Image> {
    p.validate()?;
    let mut img = Image::new(p.width, p.height, 1)?;
    img.pixels
        .par_chunks_mut(p.width as usize)
        .enumerate()
        .for_each(|(j, row)| {
            for (i, px) in row.iter_mut().enumerate() {
                let c = p.pixel_to_complex(i as u32, j as u32);
                *px = gray_level(escape_iter(c, p.max_iter), p.max_iter);
            }
        });
    Ok(img)
}
