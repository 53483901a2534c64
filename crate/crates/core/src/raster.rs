//! Image container and the file emitters: binary PGM/PPM, SVG polylines and
//! DOT knot graphs.

use std::fmt::Write as _;

use serde::Serialize;

use crate::curves::Polyline;
use crate::error::{Error, Result};
use crate::newtonlab::KnotTree;

/// Row-major 8-bit image with 1 (gray) or 3 (RGB) channels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Image {
    pub width: u32,
    pub height: u32,
    pub channels: u8,
    pub pixels: Vec<u8>,
}

impl Image {
    pub fn new(width: u32, height: u32, channels: u8) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::domain(format!("unsupported channel count {channels}")));
        }
        let len = width as usize * height as usize * channels as usize;
        Ok(Image {
            width,
            height,
            channels,
            pixels: vec![0; len],
        })
    }

    pub fn from_pixels(width: u32, height: u32, channels: u8, pixels: Vec<u8>) -> Result<Self> {
        let img = Image::new(width, height, channels)?;
        if pixels.len() != img.pixels.len() {
            return Err(Error::domain(format!(
                "buffer length {} does not match {width}x{height}x{channels}",
                pixels.len()
            )));
        }
        Ok(Image { pixels, ..img })
    }

    pub fn pixel(&self, x: u32, y: u32) -> &[u8] {
        let c = self.channels as usize;
        let i = (y as usize * self.width as usize + x as usize) * c;
        &self.pixels[i..i + c]
    }

    pub fn row(&self, y: u32) -> &[u8] {
        let stride = self.width as usize * self.channels as usize;
        &self.pixels[y as usize * stride..(y as usize + 1) * stride]
    }
}

fn write_pnm(img: &Image, magic: &str, channels: u8) -> Result<Vec<u8>> {
    if img.channels != channels {
        return Err(Error::domain(format!(
            "{magic} needs {channels} channel(s), image has {}",
            img.channels
        )));
    }
    let header = format!("{magic}\n{} {}\n255\n", img.width, img.height);
    let mut out = Vec::with_capacity(header.len() + img.pixels.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&img.pixels);
    Ok(out)
}

/// Binary P5: `P5\n{w} {h}\n255\n` followed by the raw buffer.
pub fn write_pgm(img: &Image) -> Result<Vec<u8>> {
    write_pnm(img, "P5", 1)
}

/// Binary P6, same header discipline as [`write_pgm`].
pub fn write_ppm(img: &Image) -> Result<Vec<u8>> {
    write_pnm(img, "P6", 3)
}

/// Picks P5 or P6 from the channel count.
pub fn write_pnm_auto(img: &Image) -> Result<Vec<u8>> {
    match img.channels {
        1 => write_pgm(img),
        _ => write_ppm(img),
    }
}

/// Parses binary P5/P6 with maxval 255 in the exact header layout emitted
/// above (single whitespace separators, no comments).
pub fn parse_pnm(bytes: &[u8]) -> Result<Image> {
    let bad = |what: &str| Error::domain(format!("malformed PNM: {what}"));
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() || pos == start {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header encoding"))?);
        pos += 1;
    }
    let channels = match fields[0] {
        "P5" => 1,
        "P6" => 3,
        other => return Err(bad(&format!("magic {other:?}"))),
    };
    let width: u32 = fields[1].parse().map_err(|_| bad("width"))?;
    let height: u32 = fields[2].parse().map_err(|_| bad("height"))?;
    if fields[3] != "255" {
        return Err(bad("maxval"));
    }
    Image::from_pixels(width, height, channels, bytes[pos..].to_vec())
}

/// Shortest round-trip float text, with negative zero printed as `0`.
fn num(v: f64) -> String {
    format!("{}", v + 0.0)
}

/// One `<path>` through every point. The y axis is flipped so the picture
/// has mathematical orientation on screen; the viewBox is the bounding box
/// padded by the stroke width.
pub fn polyline_to_svg(p: &Polyline, stroke_width: f64) -> Result<String> {
    if p.points.len() < 2 {
        return Err(Error::domain("SVG path needs at least 2 points"));
    }
    if !(stroke_width > 0.0 && stroke_width.is_finite()) {
        return Err(Error::domain("stroke width must be positive"));
    }
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for &[x, y] in &p.points {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(-y);
        max_y = max_y.max(-y);
    }
    let mut d = String::new();
    for (i, &[x, y]) in p.points.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        if i > 0 {
            d.push(' ');
        }
        let _ = write!(d, "{cmd}{} {}", num(x), num(-y));
    }
    let vb = [
        min_x - stroke_width,
        min_y - stroke_width,
        max_x - min_x + 2.0 * stroke_width,
        max_y - min_y + 2.0 * stroke_width,
    ];
    Ok(format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n\
         <path d=\"{d}\" fill=\"none\" stroke=\"black\" stroke-width=\"{}\" \
         stroke-linecap=\"square\" stroke-linejoin=\"miter\"/>\n</svg>\n",
        num(vb[0]),
        num(vb[1]),
        num(vb[2]),
        num(vb[3]),
        num(stroke_width)
    ))
}

fn fixed4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".to_owned()
    } else {
        s
    }
}

/// `re±imi` with both parts rounded to 4 decimals, e.g. `-1.5874+0.0000i`.
pub fn knot_label(z: crate::Cpx) -> String {
    let (re, im) = (fixed4(z.re), fixed4(z.im));
    if im.starts_with('-') {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

/// Directed parent→child graph; nodes numbered breadth-first with siblings
/// in canonical argument order.
pub fn knots_to_dot(t: &KnotTree) -> String {
    let mut nodes = String::new();
    let mut edges = String::new();
    let mut queue = std::collections::VecDeque::from([(t, 0usize)]);
    let mut next_id = 1usize;
    while let Some((node, id)) = queue.pop_front() {
        let _ = writeln!(
            nodes,
            "  n{id} [label=\"{}\", depth={}];",
            knot_label(node.value),
            node.depth
        );
        for child in &node.children {
            let _ = writeln!(edges, "  n{id} -> n{next_id};");
            queue.push_back((child, next_id));
            next_id += 1;
        }
    }
    format!("digraph knots {{\n{nodes}{edges}}}\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{dragon_polyline, koch_polyline};
    use crate::newtonlab::knot_tree;
    use crate::Cpx;

    #[test]
    fn pgm_bytes() {
        let img = Image::new(1, 1, 1).unwrap();
        assert_eq!(write_pgm(&img).unwrap(), b"P5\n1 1\n255\n\x00");
        let img = Image::from_pixels(2, 1, 1, vec![0, 255]).unwrap();
        assert_eq!(write_pgm(&img).unwrap(), b"P5\n2 1\n255\n\x00\xff");
        assert!(write_ppm(&img).is_err());
    }

    #[test]
    fn ppm_bytes() {
        let img = Image::new(1, 1, 3).unwrap();
        assert_eq!(write_ppm(&img).unwrap(), b"P6\n1 1\n255\n\x00\x00\x00");
        let img = Image::from_pixels(2, 1, 3, vec![255, 0, 0, 0, 0, 255]).unwrap();
        assert_eq!(write_ppm(&img).unwrap(), b"P6\n2 1\n255\n\xff\x00\x00\x00\x00\xff");
        assert!(write_pgm(&img).is_err());
    }

    #[test]
    fn pnm_parse_back() {
        let img = Image::from_pixels(3, 2, 1, vec![1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(parse_pnm(&write_pgm(&img).unwrap()).unwrap(), img);
        let img = Image::from_pixels(1, 2, 3, vec![9, 8, 7, 6, 5, 4]).unwrap();
        assert_eq!(parse_pnm(&write_ppm(&img).unwrap()).unwrap(), img);
        assert!(parse_pnm(b"P5\n2 2\n255\n\x00").is_err());
        assert!(parse_pnm(b"P4\n1 1\n255\n\x00").is_err());
    }

    #[test]
    fn image_validation() {
        assert!(Image::new(1, 1, 2).is_err());
        assert!(Image::from_pixels(2, 2, 1, vec![0; 3]).is_err());
    }

    #[test]
    fn svg_dragon() {
        let svg = polyline_to_svg(&dragon_polyline(0).unwrap().to_polyline(), 0.1).unwrap();
        assert!(svg.contains("d=\"M0 0 L1 0\""));
        let svg = polyline_to_svg(&dragon_polyline(2).unwrap().to_polyline(), 0.25).unwrap();
        // points (0,0) (1,0) (1,-1) (0,-1) (0,-2), y flipped
        assert!(svg.contains("d=\"M0 0 L1 0 L1 1 L0 1 L0 2\""));
        assert!(svg.contains("viewBox=\"-0.25 -0.25 1.5 2.5\""));
        assert_eq!(svg.matches("<path").count(), 1);
    }

    #[test]
    fn svg_koch_and_errors() {
        let svg = polyline_to_svg(&koch_polyline(2).unwrap(), 0.01).unwrap();
        let d = svg.split("d=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(d.matches('L').count(), 4);
        let one = Polyline {
            points: vec![[0.0, 0.0]],
        };
        assert!(polyline_to_svg(&one, 1.0).is_err());
    }

    #[test]
    fn dot_graphs() {
        let a = Cpx::new(8.0, 0.0);
        let dot = knots_to_dot(&knot_tree(0, 3, a).unwrap());
        assert!(dot.contains("n0 [label=\"0.0000+0.0000i\""));
        assert!(!dot.contains("->"));

        let dot = knots_to_dot(&knot_tree(1, 3, a).unwrap());
        assert_eq!(dot.matches("n0 -> ").count(), 3);
        assert!(dot.contains("\"-1.5874+0.0000i\""));
        assert!(dot.contains("\"0.7937-1.3747i\""));

        for d in 0..=3u32 {
            let dot = knots_to_dot(&knot_tree(d, 3, a).unwrap());
            assert_eq!(dot.matches("[label=").count(), (3usize.pow(d + 1) - 1) / 2);
        }
    }

    #[test]
    fn labels() {
        assert_eq!(knot_label(Cpx::new(-0.00001, -0.0)), "0.0000+0.0000i");
        assert_eq!(knot_label(Cpx::new(1.23456, -2.0)), "1.2346-2.0000i");
    }
}
