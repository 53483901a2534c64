use fractal_core::mandel::RenderParams;
use fractal_core::newtonlab::{heron_sequence, newton_classify, render_newton, Classification, HeronParams};
use fractal_core::Cpx;
use proptest::prelude::*;

proptest! {
    #[test]
    fn heron_iterates_stay_above_the_root(k in 2u32..=5, a in 0.01f64..1e4, z0 in 0.01f64..1e3) {
        let p = HeronParams { k, a: Cpx::new(a, 0.0), z0: Cpx::new(z0, 0.0) };
        let xs = heron_sequence(&p, 60).unwrap();
        let root = a.powf(1.0 / k as f64);
        let slack = 1e-12 * root;
        for w in xs[1..].windows(2) {
            prop_assert!(w[0].re >= root - slack);
            prop_assert!(w[1].re <= w[0].re + slack);
            prop_assert_eq!(w[0].im, 0.0);
        }
    }

    #[test]
    fn classification_respects_conjugation(re in -3.0f64..3.0, im in 0.001f64..3.0, k in 2u32..=6, a in 0.5f64..20.0) {
        let a = Cpx::new(a, 0.0);
        let up = newton_classify(Cpx::new(re, im), k, a, 200, 1e-9).unwrap();
        let down = newton_classify(Cpx::new(re, -im), k, a, 200, 1e-9).unwrap();
        // canonical order is by argument, so conjugation maps index i to k−i
        let mirror = |c: Classification| match c {
            Classification::Converged { root_index, iters } => Classification::Converged {
                root_index: (k as usize - root_index) % k as usize,
                iters,
            },
            other => other,
        };
        prop_assert_eq!(mirror(up), down);
    }
}

#[test]
fn basin_image_is_mirror_symmetric_for_real_radicand() {
    let p = RenderParams { center: Cpx::new(0.1, 0.0), scale: 0.05, width: 40, height: 40, max_iter: 200 };
    let img = render_newton(&p, 2, Cpx::new(3.0, 0.0)).unwrap();
    // rows j and h−j sit at conjugate imaginary parts; both roots of a
    // square root are real so colors agree exactly
    for j in 1..p.height {
        assert_eq!(img.row(j), img.row(p.height - j), "row {j}");
    }
}
