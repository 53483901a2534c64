//! HTTP front end for the fractal explorer. Every handler is a pure function
//! of its query string, so responses are byte-identical for identical
//! requests.
//!
//! Endpoints (all `GET`):
//! - `/api/v1/render`: PGM (mandelbrot) or PPM (newton) bytes
//! - `/api/v1/orbit`: orbit points and classification as JSON
//! - `/api/v1/knots`: knot tree as nested JSON
//! - `/api/v1/meta`: version, fractal kinds and limits

use std::collections::HashMap;
use std::net::SocketAddr;

use axum::extract::Query;
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use fractal_core::mandel::{self, OrbitStatus, RenderParams};
use fractal_core::newtonlab::{self, Classification, KnotTree};
use fractal_core::raster::{write_pgm, write_ppm};
use fractal_core::{Cpx, Error};
use serde::Serialize;
use serde_json::json;
use tower_http::cors::CorsLayer;

pub const DEFAULT_PORT: u16 = 8642;
pub const MAX_PIXELS: u64 = 4_000_000;
pub const MAX_ITER: u32 = 100_000;
pub const MAX_DEPTH: u32 = 7;
pub const MAX_ORBIT_POINTS: usize = 500;
pub const DEFAULT_MANDEL_ITER: u32 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Fractal {
    Mandelbrot,
    Newton,
}

impl Fractal {
    pub fn default_max_iter(self) -> u32 {
        match self {
            Fractal::Mandelbrot => DEFAULT_MANDEL_ITER,
            Fractal::Newton => newtonlab::DEFAULT_BUDGET,
        }
    }
}

/// Validated `/render` request. Shared with the CLI so both produce the
/// same bytes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderRequest {
    pub fractal: Fractal,
    pub params: RenderParams,
    pub k: u32,
    pub a: Cpx,
}

pub enum ApiError {
    BadRequest(String),
    Internal(String),
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Resource { .. } | Error::DivisionByZero { .. } => {
                ApiError::BadRequest(e.to_string())
            }
            _ => ApiError::Internal(e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, msg) = match self {
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, m),
        };
        (status, Json(json!({ "ok": false, "error": msg }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn bad(msg: impl Into<String>) -> ApiError {
    ApiError::BadRequest(msg.into())
}

/// Typed access to a query map that rejects unknown keys.
struct Params<'a> {
    map: &'a HashMap<String, String>,
}

impl<'a> Params<'a> {
    fn new(map: &'a HashMap<String, String>, allowed: &[&str]) -> ApiResult<Self> {
        let mut unknown: Vec<&str> = map
            .keys()
            .map(String::as_str)
            .filter(|k| !allowed.contains(k))
            .collect();
        unknown.sort_unstable();
        if let Some(k) = unknown.first() {
            return Err(bad(format!("unknown parameter {k:?}")));
        }
        Ok(Params { map })
    }

    fn opt<T: std::str::FromStr>(&self, key: &str) -> ApiResult<Option<T>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(s) => s
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| bad(format!("parameter {key:?} has invalid value {s:?}"))),
        }
    }

    fn req<T: std::str::FromStr>(&self, key: &str) -> ApiResult<T> {
        self.opt(key)?
            .ok_or_else(|| bad(format!("missing parameter {key:?}")))
    }

    fn finite(&self, key: &str, default: Option<f64>) -> ApiResult<f64> {
        let v = match default {
            Some(d) => self.opt(key)?.unwrap_or(d),
            None => self.req(key)?,
        };
        if !v.is_finite() {
            return Err(bad(format!("parameter {key:?} must be finite")));
        }
        Ok(v)
    }

    fn fractal(&self) -> ApiResult<Fractal> {
        match self.req::<String>("fractal")?.as_str() {
            "mandelbrot" => Ok(Fractal::Mandelbrot),
            "newton" => Ok(Fractal::Newton),
            other => Err(bad(format!("unknown fractal {other:?}"))),
        }
    }

    fn max_iter(&self, fractal: Fractal) -> ApiResult<u32> {
        let n: u32 = self.opt("max_iter")?.unwrap_or(fractal.default_max_iter());
        if n == 0 || n > MAX_ITER {
            return Err(bad(format!("max_iter must be in 1..={MAX_ITER}")));
        }
        Ok(n)
    }

    fn newton(&self) -> ApiResult<(u32, Cpx)> {
        let k: u32 = self.opt("k")?.unwrap_or(3);
        let a = Cpx::new(self.finite("a_re", Some(8.0))?, self.finite("a_im", Some(0.0))?);
        if !(2..=6).contains(&k) {
            return Err(bad("k must be in 2..=6"));
        }
        if a == Cpx::new(0.0, 0.0) {
            return Err(bad("a must be nonzero"));
        }
        Ok((k, a))
    }
}

const RENDER_KEYS: &[&str] = &["fractal", "cx", "cy", "scale", "w", "h", "max_iter", "k", "a_re", "a_im"];
const ORBIT_KEYS: &[&str] = &["fractal", "x", "y", "max_iter", "k", "a_re", "a_im"];
const KNOT_KEYS: &[&str] = &["depth", "k", "a_re", "a_im"];

pub fn parse_render(query: &HashMap<String, String>) -> ApiResult<RenderRequest> {
    let p = Params::new(query, RENDER_KEYS)?;
    let fractal = p.fractal()?;
    let w: u32 = p.req("w")?;
    let h: u32 = p.req("h")?;
    if w == 0 || h == 0 {
        return Err(bad("w and h must be >= 1"));
    }
    if w as u64 * h as u64 > MAX_PIXELS {
        return Err(bad(format!("w*h must be <= {MAX_PIXELS}")));
    }
    let scale = p.finite("scale", None)?;
    if scale <= 0.0 {
        return Err(bad("scale must be positive"));
    }
    let params = RenderParams {
        center: Cpx::new(p.finite("cx", Some(0.0))?, p.finite("cy", Some(0.0))?),
        scale,
        width: w,
        height: h,
        max_iter: p.max_iter(fractal)?,
    };
    let (k, a) = match fractal {
        Fractal::Newton => p.newton()?,
        Fractal::Mandelbrot => (3, Cpx::new(8.0, 0.0)),
    };
    Ok(RenderRequest { fractal, params, k, a })
}

/// Image bytes plus format tag (`pgm` or `ppm`).
pub fn render_bytes(r: &RenderRequest) -> fractal_core::Result<(Vec<u8>, &'static str)> {
    match r.fractal {
        Fractal::Mandelbrot => Ok((write_pgm(&mandel::render_mandel(&r.params)?)?, "pgm")),
        Fractal::Newton => Ok((write_ppm(&newtonlab::render_newton(&r.params, r.k, r.a)?)?, "ppm")),
    }
}

async fn render(Query(q): Query<HashMap<String, String>>) -> ApiResult<Response> {
    let req = parse_render(&q)?;
    let (bytes, format) = tokio::task::spawn_blocking(move || render_bytes(&req))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok((
        [
            (header::CONTENT_TYPE, HeaderValue::from_static("application/octet-stream")),
            (header::HeaderName::from_static("x-image-format"), HeaderValue::from_static(format)),
        ],
        bytes,
    )
        .into_response())
}

#[derive(Debug, Serialize)]
pub struct OrbitResponse {
    pub ok: bool,
    pub fractal: Fractal,
    pub points: Vec<Cpx>,
    pub classification: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escape_iter: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iters: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_step: Option<u32>,
}

pub fn orbit(query: &HashMap<String, String>) -> ApiResult<OrbitResponse> {
    let p = Params::new(query, ORBIT_KEYS)?;
    let fractal = p.fractal()?;
    let z = Cpx::new(p.finite("x", None)?, p.finite("y", None)?);
    let max_iter = p.max_iter(fractal)?;
    let mut resp = OrbitResponse {
        ok: true,
        fractal,
        points: Vec::new(),
        classification: "",
        escape_iter: None,
        root_index: None,
        iters: None,
        zero_step: None,
    };
    match fractal {
        Fractal::Mandelbrot => {
            let o = mandel::mandel_orbit(z, max_iter);
            resp.points = o.points.into_iter().take(MAX_ORBIT_POINTS).collect();
            match o.status {
                OrbitStatus::Escaped { at } => {
                    resp.classification = "escaped";
                    resp.escape_iter = Some(at);
                }
                OrbitStatus::BoundedSoFar => resp.classification = "bounded",
            }
        }
        Fractal::Newton => {
            let (k, a) = p.newton()?;
            let class = newtonlab::newton_classify(z, k, a, max_iter, newtonlab::DEFAULT_TOL)?;
            // iterates examined by the classifier, including the confirming step
            let shown = match class {
                Classification::Converged { root_index, iters } => {
                    resp.classification = "converged";
                    resp.root_index = Some(root_index);
                    resp.iters = Some(iters);
                    iters as usize + 2
                }
                Classification::HitZero { step } => {
                    resp.classification = "hit_zero";
                    resp.zero_step = Some(step);
                    step as usize
                }
                Classification::Unresolved => {
                    resp.classification = "unresolved";
                    max_iter as usize
                }
            };
            let mut x = z;
            for _ in 0..shown.min(MAX_ORBIT_POINTS) {
                resp.points.push(x);
                match newtonlab::heron_step(x, k, a) {
                    Ok(next) => x = next,
                    Err(_) => break,
                }
            }
        }
    }
    Ok(resp)
}

#[derive(Debug, Serialize)]
pub struct KnotResponse {
    pub ok: bool,
    #[serde(flatten)]
    pub tree: KnotTree,
}

pub fn knots(query: &HashMap<String, String>) -> ApiResult<KnotResponse> {
    let p = Params::new(query, KNOT_KEYS)?;
    let depth: u32 = p.req("depth")?;
    if depth > MAX_DEPTH {
        return Err(bad(format!("depth must be <= {MAX_DEPTH}")));
    }
    let (k, a) = p.newton()?;
    Ok(KnotResponse {
        ok: true,
        tree: newtonlab::knot_tree(depth, k, a)?,
    })
}

pub fn meta() -> serde_json::Value {
    json!({
        "ok": true,
        "version": env!("CARGO_PKG_VERSION"),
        "fractals": ["mandelbrot", "newton"],
        "limits": {
            "max_pixels": MAX_PIXELS,
            "max_iter": MAX_ITER,
            "max_depth": MAX_DEPTH,
            "max_knot_leaves": newtonlab::KNOT_MAX_LEAVES,
            "max_orbit_points": MAX_ORBIT_POINTS,
            "newton_k": [2, 6],
        },
    })
}

pub fn router() -> Router {
    Router::new()
        .route("/api/v1/render", get(render))
        .route(
            "/api/v1/orbit",
            get(|Query(q): Query<HashMap<String, String>>| async move { orbit(&q).map(Json) }),
        )
        .route(
            "/api/v1/knots",
            get(|Query(q): Query<HashMap<String, String>>| async move {
                tokio::task::spawn_blocking(move || knots(&q).map(Json))
                    .await
                    .map_err(|e| ApiError::Internal(e.to_string()))?
            }),
        )
        .route("/api/v1/meta", get(|| async { Json(meta()) }))
        .layer(CorsLayer::permissive())
}

/// Serves until Ctrl-C.
pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("explorerd listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router())
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Blocking entry point for binaries.
pub fn run(port: u16) -> std::io::Result<()> {
    tokio::runtime::Runtime::new()?.block_on(serve(SocketAddr::from(([127, 0, 0, 1], port))))
}
