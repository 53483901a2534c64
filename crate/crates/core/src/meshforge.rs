//! Printable dragon-curve solids: the thickened path is rasterized on a
//! quarter-unit voxel grid and the mesh is the boundary of the voxel union,
//! so touching passes merge and the surface is closed by construction.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::curves::{dragon_polyline, IPoint};
use crate::error::{Error, Result};

pub const EXTRUDE_MAX_ITER: u32 = 14;
pub const STACK_MAX_ITER: u32 = 12;
pub const STL_HEADER_LEN: usize = 80;

/// Occupancy on a grid with 4 cells per lattice unit. For `wall = 2` cell
/// `c` spans `[c, c+1]` quarter-units; for `wall = 1` the grid is shifted by
/// half a cell so cell `c` is centered on `c` quarter-units. Either way the
/// band edges fall on grid lines.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VoxelSlab {
    pub wall: u32,
    /// mm per lattice unit.
    pub unit: f64,
    pub layer_height: f64,
    /// `layers[z]` is the set of occupied `(x, y)` cells at height `z`.
    pub layers: Vec<BTreeSet<(i64, i64)>>,
}

impl VoxelSlab {
    pub fn cell_count(&self) -> u64 {
        self.layers.iter().map(|l| l.len() as u64).sum()
    }

    pub fn cell_size(&self) -> f64 {
        self.unit / 4.0
    }

    /// `cells · (unit/4)² · layer_height`.
    pub fn expected_volume(&self) -> f64 {
        self.cell_count() as f64 * self.cell_size() * self.cell_size() * self.layer_height
    }

    fn grid_offset(&self) -> f64 {
        if self.wall == 1 {
            0.5
        } else {
            0.0
        }
    }

    fn occupied(&self, x: i64, y: i64, z: i64) -> bool {
        z >= 0 && (z as usize) < self.layers.len() && self.layers[z as usize].contains(&(x, y))
    }

    /// Face-connected components of the voxel set (flood fill).
    pub fn components(&self) -> usize {
        let mut seen: BTreeSet<(i64, i64, i64)> = BTreeSet::new();
        let mut count = 0;
        for (z, layer) in self.layers.iter().enumerate() {
            for &(x, y) in layer {
                let start = (x, y, z as i64);
                if !seen.insert(start) {
                    continue;
                }
                count += 1;
                let mut stack = vec![start];
                while let Some((x, y, z)) = stack.pop() {
                    for (dx, dy, dz) in NEIGHBORS {
                        let q = (x + dx, y + dy, z + dz);
                        if self.occupied(q.0, q.1, q.2) && seen.insert(q) {
                            stack.push(q);
                        }
                    }
                }
            }
        }
        count
    }
}

const NEIGHBORS: [(i64, i64, i64); 6] = [
    (1, 0, 0),
    (-1, 0, 0),
    (0, 1, 0),
    (0, -1, 0),
    (0, 0, 1),
    (0, 0, -1),
];

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 3]>,
    /// Counter-clockwise seen from outside.
    pub triangles: Vec<[u32; 3]>,
}

fn check_params(wall: u32, height: f64, unit: f64) -> Result<()> {
    if wall != 1 && wall != 2 {
        return Err(Error::domain(format!("wall must be 1 or 2 quarter-units, got {wall}")));
    }
    if !(height > 0.0 && height.is_finite()) {
        return Err(Error::domain("height must be positive"));
    }
    if !(unit > 0.0 && unit.is_finite()) {
        return Err(Error::domain("unit must be positive"));
    }
    Ok(())
}

/// Cells covered by the band of one unit segment, including the square caps.
fn segment_cells(a: IPoint, b: IPoint, wall: u32, out: &mut BTreeSet<(i64, i64)>) {
    let w = wall as i64 - 1;
    let (lo, hi) = if (a.x, a.y) <= (b.x, b.y) { (a, b) } else { (b, a) };
    if lo.y == hi.y {
        for x in 4 * lo.x - w..=4 * hi.x {
            for y in 4 * lo.y - w..=4 * lo.y {
                out.insert((x, y));
            }
        }
    } else {
        for y in 4 * lo.y - w..=4 * hi.y {
            for x in 4 * lo.x - w..=4 * lo.x {
                out.insert((x, y));
            }
        }
    }
}

/// Occupied cells of the thickened iteration-`n` dragon path.
pub fn rasterize_dragon(n: u32, wall: u32) -> Result<BTreeSet<(i64, i64)>> {
    if wall != 1 && wall != 2 {
        return Err(Error::domain(format!("wall must be 1 or 2 quarter-units, got {wall}")));
    }
    let path = dragon_polyline(n)?;
    let mut cells = BTreeSet::new();
    for w in path.points.windows(2) {
        segment_cells(w[0], w[1], wall, &mut cells);
    }
    Ok(cells)
}

pub fn dragon_slab(n: u32, wall: u32, height: f64, unit: f64) -> Result<VoxelSlab> {
    if n > EXTRUDE_MAX_ITER {
        return Err(Error::Resource {
            what: "extrusion iteration",
            value: n as u64,
            cap: EXTRUDE_MAX_ITER as u64,
        });
    }
    check_params(wall, height, unit)?;
    Ok(VoxelSlab {
        wall,
        unit,
        layer_height: height,
        layers: vec![rasterize_dragon(n, wall)?],
    })
}

/// One layer per iteration `n_lo ..= n_hi`, bottom to top.
pub fn stack_slab(n_lo: u32, n_hi: u32, wall: u32, layer_height: f64, unit: f64) -> Result<VoxelSlab> {
    if n_hi > STACK_MAX_ITER {
        return Err(Error::Resource {
            what: "stacked iteration",
            value: n_hi as u64,
            cap: STACK_MAX_ITER as u64,
        });
    }
    if n_lo > n_hi {
        return Err(Error::domain("need n_lo <= n_hi"));
    }
    check_params(wall, layer_height, unit)?;
    let layers = (n_lo..=n_hi)
        .map(|n| rasterize_dragon(n, wall))
        .collect::<Result<Vec<_>>>()?;
    Ok(VoxelSlab {
        wall,
        unit,
        layer_height,
        layers,
    })
}

/// Boundary of the voxel union: one quad (two triangles) per exposed cell
/// face, vertices shared on the integer grid.
pub fn slab_mesh(slab: &VoxelSlab) -> TriMesh {
    let mut index: HashMap<(i64, i64, i64), u32> = HashMap::new();
    let mut mesh = TriMesh::default();
    let off = slab.grid_offset();
    let cs = slab.cell_size();
    let mut vid = |g: (i64, i64, i64), mesh: &mut TriMesh| -> u32 {
        *index.entry(g).or_insert_with(|| {
            mesh.vertices.push([
                (g.0 as f64 - off) * cs,
                (g.1 as f64 - off) * cs,
                g.2 as f64 * slab.layer_height,
            ]);
            (mesh.vertices.len() - 1) as u32
        })
    };
    for (l, layer) in slab.layers.iter().enumerate() {
        let z = l as i64;
        for &(x, y) in layer {
            let mut quads: Vec<[(i64, i64, i64); 4]> = Vec::new();
            if !slab.occupied(x + 1, y, z) {
                quads.push([(x + 1, y, z), (x + 1, y + 1, z), (x + 1, y + 1, z + 1), (x + 1, y, z + 1)]);
            }
            if !slab.occupied(x - 1, y, z) {
                quads.push([(x, y, z), (x, y, z + 1), (x, y + 1, z + 1), (x, y + 1, z)]);
            }
            if !slab.occupied(x, y + 1, z) {
                quads.push([(x, y + 1, z), (x, y + 1, z + 1), (x + 1, y + 1, z + 1), (x + 1, y + 1, z)]);
            }
            if !slab.occupied(x, y - 1, z) {
                quads.push([(x, y, z), (x + 1, y, z), (x + 1, y, z + 1), (x, y, z + 1)]);
            }
            if !slab.occupied(x, y, z + 1) {
                quads.push([(x, y, z + 1), (x + 1, y, z + 1), (x + 1, y + 1, z + 1), (x, y + 1, z + 1)]);
            }
            if !slab.occupied(x, y, z - 1) {
                quads.push([(x, y, z), (x, y + 1, z), (x + 1, y + 1, z), (x + 1, y, z)]);
            }
            for q in quads {
                let v = q.map(|g| vid(g, &mut mesh));
                mesh.triangles.push([v[0], v[1], v[2]]);
                mesh.triangles.push([v[0], v[2], v[3]]);
            }
        }
    }
    mesh
}

/// Mesh of the iteration-`n` dragon extruded to `height` mm.
pub fn extrude_dragon(n: u32, wall: u32, height: f64, unit: f64) -> Result<TriMesh> {
    Ok(slab_mesh(&dragon_slab(n, wall, height, unit)?))
}

/// Iterations `n_lo ..= n_hi` stacked as layers of one connected solid.
pub fn stack_iterations(n_lo: u32, n_hi: u32, wall: u32, layer_height: f64, unit: f64) -> Result<TriMesh> {
    let slab = stack_slab(n_lo, n_hi, wall, layer_height, unit)?;
    let parts = slab.components();
    if parts != 1 {
        return Err(Error::InvalidMesh(format!("stacked solid has {parts} components")));
    }
    Ok(slab_mesh(&slab))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshReport {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub euler: i64,
    pub components: usize,
    /// Total genus `(2·components − χ)/2`.
    pub genus: i64,
    pub volume: f64,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn find(parent: &mut [u32], mut i: u32) -> u32 {
    while parent[i as usize] != i {
        parent[i as usize] = parent[parent[i as usize] as usize];
        i = parent[i as usize];
    }
    i
}

/// Divergence-theorem volume, positive for outward winding.
pub fn signed_volume(m: &TriMesh) -> f64 {
    m.triangles
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| m.vertices[i as usize]);
            dot(a, cross(b, c))
        })
        .sum::<f64>()
        / 6.0
}

/// Checks the closed-manifold invariants: every directed edge used once and
/// matched by its reverse, manifold vertex links, no degenerate triangles,
/// positive volume.
pub fn validate(m: &TriMesh) -> Result<MeshReport> {
    let bad = |msg: String| Err(Error::InvalidMesh(msg));
    if m.triangles.is_empty() {
        return bad("no triangles".into());
    }
    let nv = m.vertices.len();
    let mut directed: HashMap<(u32, u32), u32> = HashMap::with_capacity(3 * m.triangles.len());
    for (ti, t) in m.triangles.iter().enumerate() {
        if t.iter().any(|&i| i as usize >= nv) {
            return bad(format!("triangle {ti} has an out-of-range index"));
        }
        let [a, b, c] = t.map(|i| m.vertices[i as usize]);
        let e1 = sub(b, a);
        let e2 = sub(c, a);
        let n = cross(e1, e2);
        let scale = dot(e1, e1).max(dot(e2, e2));
        if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] || dot(n, n).sqrt() <= 1e-12 * scale {
            return bad(format!("triangle {ti} is degenerate"));
        }
        for (u, v) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            if directed.insert((u, v), ti as u32).is_some() {
                return bad(format!("directed edge {u}->{v} used twice"));
            }
        }
    }
    for &(u, v) in directed.keys() {
        if !directed.contains_key(&(v, u)) {
            return bad(format!("edge {u}-{v} has only one adjacent triangle"));
        }
    }

    // vertex links must be single cycles
    let mut link: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
    for t in &m.triangles {
        for r in 0..3 {
            link.entry(t[r]).or_default().push((t[(r + 1) % 3], t[(r + 2) % 3]));
        }
    }
    for (&v, fan) in &link {
        let next: HashMap<u32, u32> = fan.iter().copied().collect();
        let start = fan[0].0;
        let mut cur = start;
        let mut len = 0;
        loop {
            cur = match next.get(&cur) {
                Some(&c) => c,
                None => return bad(format!("vertex {v} has an open link")),
            };
            len += 1;
            if cur == start || len > fan.len() {
                break;
            }
        }
        if len != fan.len() {
            return bad(format!("vertex {v} is non-manifold"));
        }
    }

    let volume = signed_volume(m);
    if !(volume > 0.0) {
        return bad(format!("signed volume {volume} is not positive"));
    }

    let mut parent: Vec<u32> = (0..nv as u32).collect();
    for t in &m.triangles {
        for (u, v) in [(t[0], t[1]), (t[1], t[2])] {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru as usize] = rv;
            }
        }
    }
    let used: BTreeSet<u32> = link.keys().copied().collect();
    let components = used
        .iter()
        .map(|&v| find(&mut parent, v))
        .collect::<BTreeSet<_>>()
        .len();
    let (vertices, edges, triangles) = (used.len(), directed.len() / 2, m.triangles.len());
    let euler = vertices as i64 - edges as i64 + triangles as i64;
    Ok(MeshReport {
        vertices,
        edges,
        triangles,
        euler,
        components,
        genus: (2 * components as i64 - euler) / 2,
        volume,
    })
}

fn stl_header() -> [u8; STL_HEADER_LEN] {
    let mut h = [b' '; STL_HEADER_LEN];
    let text = concat!("fractal-core meshforge ", env!("CARGO_PKG_VERSION"), " binary STL");
    h[..text.len()].copy_from_slice(text.as_bytes());
    h
}

/// Little-endian binary STL. The mesh is validated first and refused if
/// any invariant fails.
pub fn write_stl_binary(m: &TriMesh) -> Result<Vec<u8>> {
    validate(m)?;
    let mut out = Vec::with_capacity(84 + 50 * m.triangles.len());
    out.extend_from_slice(&stl_header());
    out.extend_from_slice(&(m.triangles.len() as u32).to_le_bytes());
    for t in &m.triangles {
        let [a, b, c] = t.map(|i| m.vertices[i as usize]);
        let n = cross(sub(b, a), sub(c, a));
        let len = dot(n, n).sqrt();
        for v in [n.map(|x| x / len), a, b, c] {
            for x in v {
                out.extend_from_slice(&(x as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StlTriangle {
    pub normal: [f32; 3],
    pub vertices: [[f32; 3]; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct StlFile {
    pub header: Vec<u8>,
    pub triangles: Vec<StlTriangle>,
}

pub fn read_stl_binary(bytes: &[u8]) -> Result<StlFile> {
    if bytes.len() < 84 {
        return Err(Error::domain("STL shorter than its header"));
    }
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    if bytes.len() != 84 + 50 * count {
        return Err(Error::domain(format!(
            "STL length {} does not match {count} triangles",
            bytes.len()
        )));
    }
    let f = |o: usize| f32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let v3 = |o: usize| [f(o), f(o + 4), f(o + 8)];
    let triangles = (0..count)
        .map(|i| {
            let o = 84 + 50 * i;
            StlTriangle {
                normal: v3(o),
                vertices: [v3(o + 12), v3(o + 24), v3(o + 36)],
            }
        })
        .collect();
    Ok(StlFile {
        header: bytes[..80].to_vec(),
        triangles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> TriMesh {
        let slab = VoxelSlab {
            wall: 2,
            unit: 4.0,
            layer_height: 1.0,
            layers: vec![BTreeSet::from([(0, 0)])],
        };
        slab_mesh(&slab)
    }

    #[test]
    fn unit_cube() {
        let m = cube();
        assert_eq!(m.triangles.len(), 12);
        assert_eq!(m.vertices.len(), 8);
        let r = validate(&m).unwrap();
        assert_eq!((r.euler, r.genus, r.components), (2, 0, 1));
        assert!((r.volume - 1.0).abs() < 1e-15);
        let stl = write_stl_binary(&m).unwrap();
        assert_eq!(stl.len(), 684);
        assert_eq!(u32::from_le_bytes(stl[80..84].try_into().unwrap()), 12);
        assert!(stl[..80].starts_with(b"fractal-core meshforge"));
        assert_eq!(stl[79], b' ');
    }

    #[test]
    fn face_normals_point_out() {
        let m = cube();
        let center = [0.5, 0.5, 0.5];
        for t in &m.triangles {
            let [a, b, c] = t.map(|i| m.vertices[i as usize]);
            let n = cross(sub(b, a), sub(c, a));
            assert!(dot(n, sub(a, center)) > 0.0);
        }
    }

    #[test]
    fn validator_rejects_defects() {
        let mut m = cube();
        m.triangles.pop();
        assert!(validate(&m).is_err());

        let mut m = cube();
        m.triangles[0].swap(1, 2);
        assert!(validate(&m).is_err());

        let mut m = cube();
        for t in &mut m.triangles {
            t.swap(1, 2);
        }
        assert!(matches!(validate(&m), Err(Error::InvalidMesh(s)) if s.contains("volume")));
        assert!(write_stl_binary(&m).is_err());

        let mut m = cube();
        m.triangles.push([0, 0, 1]);
        assert!(validate(&m).is_err());
        assert!(validate(&TriMesh::default()).is_err());
    }

    #[test]
    fn validator_rejects_pinched_vertex() {
        // two cubes sharing one corner: edges fine, vertex link is two cycles
        let slab = VoxelSlab {
            wall: 2,
            unit: 4.0,
            layer_height: 1.0,
            layers: vec![BTreeSet::from([(0, 0)]), BTreeSet::from([(1, 1)])],
        };
        let err = validate(&slab_mesh(&slab)).unwrap_err();
        assert!(err.to_string().contains("non-manifold"), "{err}");
    }

    #[test]
    fn segment_bands() {
        let cells = rasterize_dragon(0, 2).unwrap();
        let want: BTreeSet<_> = (-1..=4).flat_map(|x| [(x, -1), (x, 0)]).collect();
        assert_eq!(cells, want);
        let cells = rasterize_dragon(0, 1).unwrap();
        let want: BTreeSet<_> = (0..=4).map(|x| (x, 0)).collect();
        assert_eq!(cells, want);
    }

    #[test]
    fn slab_volume_n0() {
        let slab = dragon_slab(0, 2, 10.0, 10.0).unwrap();
        assert_eq!(slab.cell_count(), 12);
        let m = slab_mesh(&slab);
        let r = validate(&m).unwrap();
        assert!((r.volume - 12.0 * 2.5 * 2.5 * 10.0).abs() < 1e-9);
        assert_eq!((r.euler, r.genus), (2, 0));
    }

    #[test]
    fn wall_one_geometry() {
        // band of width unit/4 centred on y = 0, caps of unit/8
        let m = extrude_dragon(0, 1, 1.0, 8.0).unwrap();
        let xs: Vec<f64> = m.vertices.iter().map(|v| v[0]).collect();
        let ys: Vec<f64> = m.vertices.iter().map(|v| v[1]).collect();
        let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!((min(&xs), max(&xs)), (-1.0, 9.0));
        assert_eq!((min(&ys), max(&ys)), (-1.0, 1.0));
        assert!(validate(&m).is_ok());
    }

    #[test]
    fn small_iterations_are_valid() {
        for n in 0..=8 {
            for wall in [1, 2] {
                let slab = dragon_slab(n, wall, 10.0, 10.0).unwrap();
                assert_eq!(slab.components(), 1);
                let r = validate(&slab_mesh(&slab)).unwrap();
                assert_eq!(r.components, 1);
                let rel = (r.volume - slab.expected_volume()).abs() / slab.expected_volume();
                assert!(rel < 1e-9, "n={n} wall={wall}");
            }
        }
    }

    #[test]
    fn stacking() {
        let single = stack_iterations(3, 3, 2, 10.0, 10.0).unwrap();
        assert_eq!(single, extrude_dragon(3, 2, 10.0, 10.0).unwrap());
        let slab = stack_slab(1, 4, 2, 5.0, 10.0).unwrap();
        assert_eq!(slab.layers.len(), 4);
        assert_eq!(slab.components(), 1);
        let r = validate(&stack_iterations(1, 4, 2, 5.0, 10.0).unwrap()).unwrap();
        assert_eq!(r.components, 1);
        assert!((r.volume - slab.expected_volume()).abs() < 1e-6 * slab.expected_volume());
        assert!(stack_iterations(4, 1, 2, 5.0, 10.0).is_err());
        assert!(stack_iterations(0, 13, 2, 5.0, 10.0).is_err());
    }

    #[test]
    fn parameter_checks() {
        assert!(extrude_dragon(15, 2, 1.0, 1.0).is_err());
        assert!(extrude_dragon(1, 3, 1.0, 1.0).is_err());
        assert!(extrude_dragon(1, 2, 0.0, 1.0).is_err());
        assert!(extrude_dragon(1, 2, 1.0, -1.0).is_err());
    }

    #[test]
    fn stl_round_trip() {
        let m = extrude_dragon(3, 2, 10.0, 10.0).unwrap();
        let bytes = write_stl_binary(&m).unwrap();
        let f = read_stl_binary(&bytes).unwrap();
        assert_eq!(f.triangles.len(), m.triangles.len());
        for (t, s) in m.triangles.iter().zip(&f.triangles) {
            for k in 0..3 {
                assert_eq!(s.vertices[k], m.vertices[t[k] as usize].map(|x| x as f32));
            }
            let n = s.normal;
            assert!(((n[0] * n[0] + n[1] * n[1] + n[2] * n[2]) - 1.0).abs() < 1e-6);
        }
        assert!(read_stl_binary(&bytes[..bytes.len() - 1]).is_err());
    }
}
