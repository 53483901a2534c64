use fractal_core::meshforge::{dragon_slab, read_stl_binary, slab_mesh, stack_slab, validate, write_stl_binary, TriMesh};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extrusions_are_closed_solids(n in 0u32..=9, wall in 1u32..=2, height in 1.0f64..30.0, unit in 1.0f64..20.0) {
        let slab = dragon_slab(n, wall, height, unit).unwrap();
        let m = slab_mesh(&slab);
        let r = validate(&m).unwrap();
        prop_assert_eq!(r.components, 1);
        prop_assert_eq!(r.euler, 2 - 2 * r.genus);
        prop_assert!((r.volume - slab.expected_volume()).abs() <= 1e-9 * slab.expected_volume());
        let stl = write_stl_binary(&m).unwrap();
        prop_assert_eq!(stl.len(), 84 + 50 * m.triangles.len());
        prop_assert_eq!(read_stl_binary(&stl).unwrap().triangles.len(), m.triangles.len());
    }

    #[test]
    fn stacks_are_connected(lo in 0u32..=5, extra in 0u32..=3, wall in 1u32..=2) {
        let slab = stack_slab(lo, lo + extra, wall, 3.0, 5.0).unwrap();
        prop_assert_eq!(slab.components(), 1);
        let r = validate(&slab_mesh(&slab)).unwrap();
        prop_assert_eq!(r.components, 1);
    }
}

#[test]
fn inverted_mesh_is_rejected() {
    let m = slab_mesh(&dragon_slab(2, 2, 1.0, 1.0).unwrap());
    let flipped = TriMesh {
        vertices: m.vertices.clone(),
        triangles: m.triangles.iter().map(|t| [t[0], t[2], t[1]]).collect(),
    };
    assert!(validate(&flipped).is_err());
    assert!(write_stl_binary(&flipped).is_err());
}
