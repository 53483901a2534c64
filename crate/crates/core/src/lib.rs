//! Fractal-mathematics workbench.
//!
//! Exact rational series and measures, iterated curves (dragon, Koch,
//! carpet, Cantor), Mandelbrot escape-time analysis, the generalized Heron /
//! Newton fractal with its knot tree, lattice verification of the dragon
//! curve's tiling properties, and watertight extrusion of dragon curves into
//! printable meshes.

pub mod complexes;
pub mod curves;
pub mod dragonlab;
mod error;
pub mod mandel;
pub mod meshforge;
pub mod newtonlab;
pub mod raster;
pub mod rationals;

pub use complexes::{CPoly, Cpx};
pub use error::{Error, Result};
pub use rationals::Rat;
