//! Frame-level composition: direct signal, depth-dependent forward
//! scattering, backscatter lookup, the fog baseline, tone mapping and
//! sequence rendering.
//!
//! The linear image is the sum of the three components; tone mapping is a
//! plain gain-clip-quantize with an overexposure report, leaving exposure
//! decisions to the caller.

use std::time::Instant;

use rayon::prelude::*;

use crate::backscatter::{backscatter_at, build_lut, BackscatterLut};
use crate::error::{Error, Result};
use crate::image::ImageBuf;
use crate::radiometry::{direct_signal, normals_from_depth, pixel_center_ray, SurfaceSample};
use crate::real::{real, to_f64, Real};
use crate::scene::{CameraModel, FrameInput, Scene, SlabSampling};
use crate::spectrum::Spectrum;

/// Per-component linear images kept for debugging.
#[derive(Clone, Debug)]
pub struct FrameComponents<T> {
    pub direct: ImageBuf<Spectrum<T>>,
    pub forward: ImageBuf<Spectrum<T>>,
    pub backscatter: ImageBuf<Spectrum<T>>,
}

/// A rendered frame: linear pre-tonemap image, optional components, and the
/// quantized 8-bit output.
#[derive(Clone, Debug)]
pub struct RenderedFrame<T> {
    pub linear: ImageBuf<Spectrum<T>>,
    pub components: Option<FrameComponents<T>>,
    pub output: ImageBuf<[u8; 3]>,
    /// Fraction of pixels with any channel driven past full scale by the
    /// gain.
    pub overexposed_fraction: f64,
}

fn check_dims<T: Real>(cam: &CameraModel<T>, got: (u32, u32), context: &str) -> Result<()> {
    if got != (cam.width, cam.height) {
        return Err(Error::DimensionMismatch {
            context: context.into(),
            expected_w: cam.width,
            expected_h: cam.height,
            got_w: got.0,
            got_h: got.1,
        });
    }
    Ok(())
}

/// Per-pixel ray length in meters (`0` where depth is invalid).
pub(crate) fn ray_length_image<T: Real>(
    cam: &CameraModel<T>,
    depth: &ImageBuf<T>,
) -> ImageBuf<T> {
    let (w, h) = depth.dims();
    let mut out = ImageBuf::filled(w, h, T::zero());
    out.as_mut_slice()
        .par_chunks_mut(w as usize)
        .zip(depth.as_slice().par_chunks(w as usize))
        .enumerate()
        .for_each(|(v, (row, depth_row))| {
            for (u, (slot, &z)) in row.iter_mut().zip(depth_row).enumerate() {
                if z > T::zero() {
                    let ray = pixel_center_ray(cam, u as u32, v as u32);
                    *slot = z / ray.z;
                }
            }
        });
    out
}

/// Attenuated, surface-reflected signal per pixel. Pixels with invalid depth
/// contribute nothing.
pub fn render_direct<T: Real>(
    frame: &FrameInput<T>,
    scene: &Scene<T>,
) -> Result<ImageBuf<Spectrum<T>>> {
    let cam = scene.camera();
    check_dims(cam, frame.dims(), "frame vs camera")?;
    let normals = normals_from_depth(cam, frame.depth());
    let (w, h) = frame.dims();
    let lights = scene.lights();
    let water = scene.water();
    let min_d = scene.settings().min_light_distance;

    let mut out = ImageBuf::filled(w, h, Spectrum::<T>::zero());
    out.as_mut_slice()
        .par_chunks_mut(w as usize)
        .enumerate()
        .for_each(|(v, row)| {
            for (u, slot) in row.iter_mut().enumerate() {
                let (u32u, u32v) = (u as u32, v as u32);
                let z = *frame.depth().get(u32u, u32v);
                if !(z > T::zero()) {
                    continue;
                }
                let ray = pixel_center_ray(cam, u32u, u32v);
                let ray_len = z / ray.z;
                let sample = SurfaceSample {
                    point: ray * ray_len,
                    normal: *normals.get(u32u, u32v),
                    albedo: *frame.albedo().get(u32u, u32v),
                };
                *slot = direct_signal(&sample, lights, water, ray_len, min_d);
            }
        });
    Ok(out)
}

/// Small-angle scattering of the direct signal: a Gaussian blur whose sigma
/// grows with the local path length (`sigma_px = fs_coeff * ray length`),
/// truncated at 3 sigma and renormalized over valid-depth pixels.
/// `fs_coeff == 0` disables the component and returns a zero image.
pub fn forward_scatter<T: Real>(
    direct: &ImageBuf<Spectrum<T>>,
    ray_len: &ImageBuf<T>,
    fs_coeff: T,
) -> ImageBuf<Spectrum<T>> {
    let (w, h) = direct.dims();
    let mut out = ImageBuf::filled(w, h, Spectrum::<T>::zero());
    if !(fs_coeff > T::zero()) {
        return out;
    }
    let three = real::<T>(3.0);
    let half = real::<T>(0.5);
    out.as_mut_slice()
        .par_chunks_mut(w as usize)
        .enumerate()
        .for_each(|(v, row)| {
            for (u, slot) in row.iter_mut().enumerate() {
                let d = *ray_len.get(u as u32, v as u32);
                if !(d > T::zero()) {
                    continue;
                }
                let sigma = fs_coeff * d;
                let radius = to_f64(sigma * three).ceil().max(1.0) as i64;
                let mut acc = Spectrum::<T>::zero();
                let mut wsum = T::zero();
                for dv in -radius..=radius {
                    let sv = v as i64 + dv;
                    if sv < 0 || sv >= h as i64 {
                        continue;
                    }
                    for du in -radius..=radius {
                        let su = u as i64 + du;
                        if su < 0 || su >= w as i64 {
                            continue;
                        }
                        if !(*ray_len.get(su as u32, sv as u32) > T::zero()) {
                            continue;
                        }
                        let r2 = real::<T>((du * du + dv * dv) as f64);
                        let weight = (-r2 / (sigma * sigma) * half).exp();
                        acc += *direct.get(su as u32, sv as u32) * weight;
                        wsum += weight;
                    }
                }
                if wsum > T::zero() {
                    *slot = acc / wsum;
                }
            }
        });
    out
}

/// Composes direct signal, forward scattering and LUT backscatter into the
/// final frame. The LUT must have been built for this scene (hash check) and
/// for the frame dimensions.
pub fn render_frame<T: Real>(
    frame: &FrameInput<T>,
    scene: &Scene<T>,
    lut: &BackscatterLut<T>,
    keep_components: bool,
) -> Result<RenderedFrame<T>> {
    let cam = scene.camera();
    check_dims(cam, frame.dims(), "frame vs camera")?;
    check_dims(cam, lut.image_dims(), "LUT vs camera")?;
    let scene_hash = scene.content_hash();
    if lut.scene_hash() != scene_hash {
        return Err(Error::StaleLut {
            lut_hash: lut.scene_hash(),
            scene_hash,
        });
    }

    let (w, h) = frame.dims();
    let ray_len = ray_length_image(cam, frame.depth());
    let direct = render_direct(frame, scene)?;
    let forward = forward_scatter(&direct, &ray_len, scene.settings().fs_coeff);

    let mut backscatter = ImageBuf::filled(w, h, Spectrum::<T>::zero());
    backscatter
        .as_mut_slice()
        .par_chunks_mut(w as usize)
        .enumerate()
        .for_each(|(v, row)| {
            for (u, slot) in row.iter_mut().enumerate() {
                // Invalid depth keeps ray length 0, the sentinel for "water
                // all the way": the lookup returns the full accumulation.
                let d = *ray_len.get(u as u32, v as u32);
                *slot = backscatter_at(lut, u as u32, v as u32, d)
                    .expect("pixel within LUT dims by construction");
            }
        });

    let mut linear = ImageBuf::filled(w, h, Spectrum::<T>::zero());
    linear
        .as_mut_slice()
        .par_iter_mut()
        .zip(direct.as_slice().par_iter())
        .zip(forward.as_slice().par_iter().zip(backscatter.as_slice().par_iter()))
        .for_each(|((l, d), (f, b))| *l = *d + *f + *b);

    let (output, overexposed_fraction) = tone_map(&linear, scene.settings().gain);
    Ok(RenderedFrame {
        linear,
        components: keep_components.then(|| FrameComponents {
            direct,
            forward,
            backscatter,
        }),
        output,
        overexposed_fraction,
    })
}

/// Fog-model color for one pixel: `J e^{-eta d} + B (1 - e^{-eta d})`.
/// At `d == 0` this is exactly `J`; as `d` grows it converges to `B`.
#[inline]
pub fn fog_color<T: Real>(j: Spectrum<T>, b: Spectrum<T>, eta: Spectrum<T>, d: T) -> Spectrum<T> {
    let tr = eta.transmittance(d);
    j * tr + b * (tr.map(|t| T::one() - t))
}

/// Shallow-water / atmospheric baseline: per-pixel fog model with `d` taken
/// as ray length; invalid depth means "background only".
pub fn render_fog<T: Real>(
    frame: &FrameInput<T>,
    cam: &CameraModel<T>,
    eta: Spectrum<T>,
    background: Spectrum<T>,
    gain: T,
) -> Result<RenderedFrame<T>> {
    check_dims(cam, frame.dims(), "frame vs camera")?;
    let (w, h) = frame.dims();
    let ray_len = ray_length_image(cam, frame.depth());
    let mut linear = ImageBuf::filled(w, h, Spectrum::<T>::zero());
    linear
        .as_mut_slice()
        .par_iter_mut()
        .zip(frame.albedo().as_slice().par_iter())
        .zip(ray_len.as_slice().par_iter())
        .for_each(|((l, j), &d)| {
            *l = if d > T::zero() {
                fog_color(*j, background, eta, d)
            } else {
                background
            };
        });
    let (output, overexposed_fraction) = tone_map(&linear, gain);
    Ok(RenderedFrame {
        linear,
        components: None,
        output,
        overexposed_fraction,
    })
}

/// Gain, clip and quantize to 8-bit; returns the output image and the
/// fraction of pixels clipped at the top end.
pub fn tone_map<T: Real>(linear: &ImageBuf<Spectrum<T>>, gain: T) -> (ImageBuf<[u8; 3]>, f64) {
    let (w, h) = linear.dims();
    let mut out = ImageBuf::filled(w, h, [0u8; 3]);
    let overexposed: u64 = out
        .as_mut_slice()
        .par_iter_mut()
        .zip(linear.as_slice().par_iter())
        .map(|(px, lin)| {
            let scaled = *lin * gain;
            let quantize = |v: T| -> u8 { (to_f64(v).clamp(0.0, 1.0) * 255.0).round() as u8 };
            *px = [quantize(scaled.r), quantize(scaled.g), quantize(scaled.b)];
            u64::from(scaled.max_component() > T::one())
        })
        .sum();
    let total = (w as u64 * h as u64).max(1);
    (out, overexposed as f64 / total as f64)
}

/// Timing record for one frame of a sequence.
#[derive(Clone, Debug)]
pub struct FrameRecord {
    pub index: usize,
    pub render_ms: f64,
    pub overexposed_fraction: Option<f64>,
    pub error: Option<String>,
}

/// Sequence timing report; the LUT is built exactly once per sequence.
#[derive(Clone, Debug)]
pub struct SequenceReport {
    pub precompute_ms: f64,
    pub frames: Vec<FrameRecord>,
}

/// Renders an ordered sequence of frames against one shared LUT (the rig is
/// rigid, so the backscatter field never changes). Per-frame failures are
/// recorded in the report and the sequence continues; only LUT construction
/// is fatal.
///
/// `sink` receives each rendered frame in order, e.g. to encode and write it.
pub fn render_sequence<T, I, S>(
    scene: &Scene<T>,
    sampling: &SlabSampling<T>,
    frames: I,
    mut sink: S,
) -> Result<SequenceReport>
where
    T: Real,
    I: IntoIterator<Item = Result<FrameInput<T>>>,
    S: FnMut(usize, &RenderedFrame<T>) -> Result<()>,
{
    let t0 = Instant::now();
    let lut = build_lut(scene, sampling)?;
    let precompute_ms = t0.elapsed().as_secs_f64() * 1e3;

    let mut records = Vec::new();
    for (index, item) in frames.into_iter().enumerate() {
        let t = Instant::now();
        let outcome = item.and_then(|frame| render_frame(&frame, scene, &lut, false));
        match outcome {
            Ok(rendered) => {
                let render_ms = t.elapsed().as_secs_f64() * 1e3;
                let error = sink(index, &rendered).err().map(|e| e.to_string());
                records.push(FrameRecord {
                    index,
                    render_ms,
                    overexposed_fraction: Some(rendered.overexposed_fraction),
                    error,
                });
            }
            Err(e) => records.push(FrameRecord {
                index,
                render_ms: t.elapsed().as_secs_f64() * 1e3,
                overexposed_fraction: None,
                error: Some(e.to_string()),
            }),
        }
    }
    Ok(SequenceReport {
        precompute_ms,
        frames: records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backscatter::slab_thicknesses;
    use crate::math::Vec3;
    use crate::scene::{validate_scene, RenderSettings, RidModel, SpotLight, WaterBody};

    fn camera(width: u32, height: u32) -> CameraModel<f64> {
        CameraModel {
            width,
            height,
            fx: 50.0,
            fy: 50.0,
            // Principal point on the center pixel's center so the on-axis
            // examples evaluate exactly.
            cx: (width / 2) as f64 + 0.5,
            cy: (height / 2) as f64 + 0.5,
        }
    }

    fn flat_rid() -> RidModel<f64> {
        RidModel::Table {
            samples: vec![(0.0, 1.0), (std::f64::consts::PI, 1.0)],
        }
    }

    fn zero_vsf() -> Vec<(f64, f64)> {
        vec![(0.0, 0.0), (std::f64::consts::PI, 0.0)]
    }

    fn analytic_scene(width: u32, height: u32) -> Scene<f64> {
        validate_scene(
            camera(width, height),
            vec![SpotLight {
                position: Vec3::zero(),
                direction: Vec3::new(0.0, 0.0, 1.0),
                rid: flat_rid(),
                intensity: Spectrum::splat(1.0),
            }],
            WaterBody {
                eta: Spectrum::zero(),
                vsf: zero_vsf(),
            },
            RenderSettings::default(),
        )
        .unwrap()
    }

    fn plane_frame(width: u32, height: u32, z: f64, albedo: f64) -> FrameInput<f64> {
        FrameInput::new(
            ImageBuf::filled(width, height, Spectrum::splat(albedo)),
            ImageBuf::filled(width, height, z),
        )
        .unwrap()
    }

    #[test]
    fn all_invalid_depth_renders_zero_direct() {
        let scene = analytic_scene(16, 12);
        let frame = plane_frame(16, 12, 0.0, 1.0);
        let direct = render_direct(&frame, &scene).unwrap();
        assert!(direct.as_slice().iter().all(|s| *s == Spectrum::zero()));
    }

    #[test]
    fn principal_pixel_sees_pure_inverse_square() {
        // eta = 0, light at origin, flat RID, fronto-parallel plane at 2 m:
        // the on-axis pixel evaluates to exactly 1/d^2 * cos(0) / ... = 0.25.
        let scene = analytic_scene(17, 17);
        let frame = plane_frame(17, 17, 2.0, 1.0);
        let direct = render_direct(&frame, &scene).unwrap();
        let center = direct.get(8, 8); // pixel (8,8) center = (8.5, 8.5) = principal point
        assert!((center.r - 0.25).abs() < 1e-12);
        // Neighboring pixels are close to 0.25 * cos(alpha) with cos from
        // the fronto-parallel normals.
        let off = direct.get(9, 8);
        assert!(off.r < 0.25 && off.r > 0.2);
    }

    #[test]
    fn direct_image_is_linear_in_albedo() {
        let scene = analytic_scene(8, 8);
        let single = render_direct(&plane_frame(8, 8, 2.0, 0.4), &scene).unwrap();
        let double = render_direct(&plane_frame(8, 8, 2.0, 0.8), &scene).unwrap();
        for (s, d) in single.as_slice().iter().zip(double.as_slice()) {
            assert_eq!(*s * 2.0, *d);
        }
    }

    #[test]
    fn forward_scatter_disabled_returns_zero_image() {
        let direct = ImageBuf::filled(8, 8, Spectrum::splat(1.0));
        let ray_len = ImageBuf::filled(8, 8, 2.0);
        let fwd = forward_scatter(&direct, &ray_len, 0.0);
        assert!(fwd.as_slice().iter().all(|s| *s == Spectrum::zero()));
    }

    #[test]
    fn forward_scatter_preserves_constant_images() {
        let direct = ImageBuf::filled(16, 16, Spectrum::<f64>::splat(0.7));
        let ray_len = ImageBuf::filled(16, 16, 3.0);
        let fwd = forward_scatter(&direct, &ray_len, 1.0);
        for s in fwd.as_slice() {
            assert!((s.r - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_scatter_impulse_keeps_mass_within_window() {
        // sigma = 2 px: an interior impulse spreads into a truncated discrete
        // Gaussian carrying at least 99% of the input mass.
        let mut direct = ImageBuf::filled(31, 31, Spectrum::<f64>::zero());
        *direct.get_mut(15, 15) = Spectrum::splat(1.0);
        let ray_len = ImageBuf::filled(31, 31, 2.0);
        let fwd = forward_scatter(&direct, &ray_len, 1.0);
        let mass: f64 = fwd.as_slice().iter().map(|s| s.r).sum();
        assert!(mass > 0.99, "mass {mass}");
        assert!(mass < 1.0 + 1e-9);
    }

    #[test]
    fn fog_color_limits() {
        let j = Spectrum::<f64>::splat(1.0);
        let b = Spectrum::new(0.1, 0.2, 0.3);
        let eta = Spectrum::new(0.37, 0.044, 0.035);
        assert_eq!(fog_color(j, b, eta, 0.0), j);
        let far = fog_color(j, b, eta, 1e6);
        for (f, want) in far.channels().into_iter().zip(b.channels()) {
            assert!((f - want).abs() < 1e-12);
        }
        let red = fog_color(Spectrum::splat(1.0), Spectrum::zero(), eta, 1.0);
        assert!((red.r - 0.69073433063735466).abs() < 1e-15);
    }

    #[test]
    fn fog_with_matching_background_is_a_fixed_point() {
        let j = Spectrum::<f64>::new(0.3, 0.5, 0.7);
        let eta = Spectrum::splat(0.2);
        for d in [0.0, 0.5, 2.0, 40.0] {
            let out = fog_color(j, j, eta, d);
            for (got, want) in out.channels().into_iter().zip(j.channels()) {
                assert!((got - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn render_fog_uses_background_for_invalid_depth() {
        let cam = camera(8, 8);
        let mut depth = ImageBuf::filled(8, 8, 2.0);
        *depth.get_mut(3, 3) = 0.0;
        let frame = FrameInput::new(ImageBuf::filled(8, 8, Spectrum::splat(1.0)), depth).unwrap();
        let b = Spectrum::new(0.0, 0.25, 0.5);
        let out = render_fog(&frame, &cam, Spectrum::zero(), b, 1.0).unwrap();
        assert_eq!(*out.linear.get(3, 3), b);
        // eta = 0 elsewhere: J passes through unchanged.
        assert_eq!(*out.linear.get(0, 0), Spectrum::splat(1.0));
    }

    #[test]
    fn tone_map_quantizes_and_reports_overexposure() {
        let mut linear = ImageBuf::filled(2, 2, Spectrum::<f64>::zero());
        *linear.get_mut(1, 0) = Spectrum::splat(1.0);
        *linear.get_mut(0, 1) = Spectrum::splat(2.0);
        *linear.get_mut(1, 1) = Spectrum::new(0.5, 0.0, 0.0);
        let (img, over) = tone_map(&linear, 1.0);
        assert_eq!(*img.get(0, 0), [0, 0, 0]);
        assert_eq!(*img.get(1, 0), [255, 255, 255]);
        assert_eq!(*img.get(0, 1), [255, 255, 255]);
        assert_eq!(*img.get(1, 1), [128, 0, 0]);
        assert!((over - 0.25).abs() < 1e-12);
    }

    #[test]
    fn tone_map_is_monotone_in_gain() {
        let mut linear = ImageBuf::filled(4, 1, Spectrum::<f64>::zero());
        for (i, s) in linear.as_mut_slice().iter_mut().enumerate() {
            *s = Spectrum::splat(i as f64 * 0.2);
        }
        let (lo, _) = tone_map(&linear, 1.0);
        let (hi, _) = tone_map(&linear, 1.7);
        for (a, b) in lo.as_slice().iter().zip(hi.as_slice()) {
            for (x, y) in a.iter().zip(b) {
                assert!(y >= x);
            }
        }
    }

    #[test]
    fn render_frame_reduces_to_direct_when_scatter_disabled() {
        let scene = analytic_scene(12, 10);
        let sampling = slab_thicknesses(4, 10.0).unwrap();
        let lut = build_lut(&scene, &sampling).unwrap();
        let frame = plane_frame(12, 10, 2.0, 0.8);
        let rendered = render_frame(&frame, &scene, &lut, true).unwrap();
        let direct = render_direct(&frame, &scene).unwrap();
        assert_eq!(rendered.linear, direct);
        let (direct_png, _) = tone_map(&direct, scene.settings().gain);
        assert_eq!(rendered.output, direct_png);
    }

    #[test]
    fn render_frame_components_sum_to_linear_exactly() {
        let mut settings = RenderSettings::default();
        settings.fs_coeff = 0.8;
        let scene = validate_scene(
            camera(12, 10),
            vec![SpotLight {
                position: Vec3::new(0.5, 0.0, 0.0),
                direction: Vec3::new(0.0, 0.0, 1.0),
                rid: RidModel::Gaussian {
                    sigma: 35f64.to_radians(),
                },
                intensity: Spectrum::splat(1.0),
            }],
            WaterBody {
                eta: Spectrum::new(0.37, 0.044, 0.035),
                vsf: vec![(0.0, 1.0), (std::f64::consts::PI, 0.01)],
            },
            settings,
        )
        .unwrap();
        let sampling = slab_thicknesses(8, 10.0).unwrap();
        let lut = build_lut(&scene, &sampling).unwrap();
        let mut depth = ImageBuf::filled(12, 10, 2.0);
        *depth.get_mut(5, 5) = 0.0; // one invalid pixel
        let frame =
            FrameInput::new(ImageBuf::filled(12, 10, Spectrum::splat(0.6)), depth).unwrap();
        let rendered = render_frame(&frame, &scene, &lut, true).unwrap();
        let c = rendered.components.as_ref().unwrap();
        for i in 0..rendered.linear.as_slice().len() {
            let sum = c.direct.as_slice()[i] + c.forward.as_slice()[i] + c.backscatter.as_slice()[i];
            assert_eq!(rendered.linear.as_slice()[i], sum);
        }
        // The invalid pixel carries pure (full-range) backscatter.
        assert_eq!(c.direct.as_slice()[5 * 12 + 5], Spectrum::zero());
        let bs = c.backscatter.as_slice()[5 * 12 + 5];
        let full = crate::backscatter::backscatter_at(&lut, 5, 5, 0.0).unwrap();
        assert_eq!(bs, full);
    }

    #[test]
    fn render_frame_rejects_stale_lut() {
        let scene = analytic_scene(8, 8);
        let sampling = slab_thicknesses(4, 10.0).unwrap();
        let lut = build_lut(&scene, &sampling).unwrap();
        // Same dims, different light position: different hash.
        let other = validate_scene(
            *scene.camera(),
            vec![SpotLight {
                position: Vec3::new(0.0, 1.0, 0.0),
                direction: Vec3::new(0.0, 0.0, 1.0),
                rid: flat_rid(),
                intensity: Spectrum::splat(1.0),
            }],
            scene.water().clone(),
            scene.settings().clone(),
        )
        .unwrap();
        let frame = plane_frame(8, 8, 2.0, 1.0);
        let err = render_frame(&frame, &other, &lut, false).unwrap_err();
        assert!(matches!(err, Error::StaleLut { .. }));
    }

    #[test]
    fn sequence_renders_identical_frames_identically() {
        let scene = analytic_scene(10, 8);
        let sampling = slab_thicknesses(4, 10.0).unwrap();
        let frame = plane_frame(10, 8, 2.0, 0.7);
        let frames = vec![Ok(frame.clone()), Ok(frame.clone()), Ok(frame)];
        let mut outputs: Vec<ImageBuf<[u8; 3]>> = Vec::new();
        let report = render_sequence(&scene, &sampling, frames, |_, rendered| {
            outputs.push(rendered.output.clone());
            Ok(())
        })
        .unwrap();
        assert_eq!(outputs.len(), 3);
        assert_eq!(outputs[0], outputs[1]);
        assert_eq!(outputs[1], outputs[2]);
        assert_eq!(report.frames.len(), 3);
        assert!(report.precompute_ms >= 0.0);
        assert!(report.frames.iter().all(|f| f.error.is_none()));
    }

    #[test]
    fn sequence_continues_past_bad_frames() {
        let scene = analytic_scene(10, 8);
        let sampling = slab_thicknesses(4, 10.0).unwrap();
        let frames = vec![
            Ok(plane_frame(10, 8, 2.0, 0.7)),
            Err(Error::Config("missing file".into())),
            Ok(plane_frame(10, 8, 1.0, 0.5)),
        ];
        let mut rendered = 0;
        let report = render_sequence(&scene, &sampling, frames, |_, _| {
            rendered += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(rendered, 2);
        assert_eq!(report.frames.len(), 3);
        assert!(report.frames[1].error.is_some());
        assert!(report.frames[0].error.is_none() && report.frames[2].error.is_none());
    }
}
