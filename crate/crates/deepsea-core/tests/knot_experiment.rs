//! Scratch measurement (removed before ship): compares center-anchored vs
//! boundary-anchored depth knots against the fine-step oracle on the
//! acceptance rig.

use deepsea_core::backscatter::{backscatter_bruteforce, build_lut, slab_thicknesses};
use deepsea_core::math::Vec3;
use deepsea_core::scene::{
    validate_scene, CameraModel, RenderSettings, RidModel, Scene, SpotLight, WaterBody,
};
use deepsea_core::spectrum::Spectrum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fig6(width: u32, height: u32) -> Scene<f64> {
    validate_scene(
        CameraModel {
            width,
            height,
            fx: width as f64 * 0.75,
            fy: width as f64 * 0.75,
            cx: width as f64 / 2.0,
            cy: height as f64 / 2.0,
        },
        vec![SpotLight {
            position: Vec3::new(1.0, 1.0, 0.0),
            direction: Vec3::new(0.0, 0.0, 1.0),
            rid: RidModel::Gaussian {
                sigma: 35f64.to_radians(),
            },
            intensity: Spectrum::splat(1.0),
        }],
        WaterBody {
            eta: Spectrum::new(0.37, 0.044, 0.035),
            vsf: vec![
                (0.0, 10.0),
                (10f64.to_radians(), 0.02),
                (45f64.to_radians(), 8.0e-4),
                (90f64.to_radians(), 1.3e-4),
                (135f64.to_radians(), 8.5e-5),
                (std::f64::consts::PI, 9.5e-5),
            ],
        },
        RenderSettings::default(),
    )
    .unwrap()
}

#[test]
#[ignore]
fn measure_knot_anchoring_error() {
    let scene = fig6(64, 64);
    let sampling = slab_thicknesses(64, 10.0).unwrap();
    let lut = build_lut(&scene, &sampling).unwrap();
    let n = 64usize;

    let boundaries: Vec<f64> = sampling
        .thicknesses()
        .iter()
        .scan(0.0, |acc, dz| {
            *acc += dz;
            Some(*acc)
        })
        .collect();
    let centers = sampling.centers().to_vec();

    let lookup = |knots: &[f64], u: u32, v: u32, d: f64| -> Spectrum<f64> {
        let cell = |i: usize| lut.cell_value(u, v, i);
        if d >= knots[n - 1] {
            return cell(n - 1);
        }
        if d <= knots[0] {
            return cell(0) * (d / knots[0]);
        }
        let hi = knots.partition_point(|&c| c < d);
        let lo = hi - 1;
        let t = (d - knots[lo]) / (knots[hi] - knots[lo]);
        cell(lo) * (1.0 - t) + cell(hi) * t
    };

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst_center: f64 = 0.0;
    let mut worst_boundary: f64 = 0.0;
    let mut oracle_vals = Vec::new();
    let mut probes = Vec::new();
    for _ in 0..100 {
        let u = rng.gen_range(0..64u32);
        let v = rng.gen_range(0..64u32);
        let d = (1.0 - rng.gen::<f64>()) * 10.0;
        let oracle = backscatter_bruteforce(&scene, u, v, d, 0.005).unwrap();
        oracle_vals.push(oracle.max_component());
        probes.push((u, v, d, oracle));
    }
    let field_max = oracle_vals.iter().cloned().fold(0.0, f64::max);
    for (u, v, d, oracle) in probes {
        for (knots, worst) in [
            (&centers, &mut worst_center),
            (&boundaries, &mut worst_boundary),
        ] {
            let got = lookup(knots, u, v, d);
            for (g, o) in got.channels().into_iter().zip(oracle.channels()) {
                if o >= 1e-6 * field_max {
                    *worst = worst.max((g - o).abs() / o);
                }
            }
        }
    }
    println!("worst relative error, center-anchored:   {worst_center:.4}");
    println!("worst relative error, boundary-anchored: {worst_boundary:.4}");
}
