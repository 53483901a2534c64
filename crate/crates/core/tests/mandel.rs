use fractal_core::mandel::{escape_iter, mandel_orbit, orbit_to_cap, OrbitStatus, RenderParams};
use fractal_core::Cpx;
use proptest::prelude::*;

proptest! {
    #[test]
    fn escape_index_matches_orbit(re in -2.5f64..1.5, im in -1.5f64..1.5, max_iter in 1u32..400) {
        let c = Cpx::new(re, im);
        let o = mandel_orbit(c, max_iter);
        match (o.status, escape_iter(c, max_iter)) {
            (OrbitStatus::Escaped { at }, Some(e)) => {
                prop_assert_eq!(at, e);
                prop_assert_eq!(o.points.len() as u32, e);
                prop_assert!(o.points[e as usize - 1].norm() > 2.0);
                prop_assert!(o.points[..e as usize - 1].iter().all(|z| z.norm() <= 2.0));
            }
            (OrbitStatus::BoundedSoFar, None) => prop_assert!(o.points.iter().all(|z| z.norm() <= 2.0)),
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn escaped_orbits_never_return(re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let orbit = orbit_to_cap(Cpx::new(re, im), 2000);
        if let Some(n) = orbit.iter().position(|z| z.norm() > 2.0) {
            prop_assert!(orbit[n..].windows(2).all(|w| w[1].norm() > w[0].norm()));
        }
    }

    #[test]
    fn pixel_mapping_round_trips(i in 0u32..300, j in 0u32..200, scale in 1e-6f64..0.1) {
        let p = RenderParams { center: Cpx::new(-0.7, 0.2), scale, width: 300, height: 200, max_iter: 10 };
        prop_assert_eq!(p.complex_to_pixel(p.pixel_to_complex(i, j)), Some((i, j)));
    }
}
