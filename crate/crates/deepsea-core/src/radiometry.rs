//! Pointwise radiometric evaluators: viewing-ray geometry, spotlight RID
//! lookup and the direct attenuation-plus-reflection signal.
//!
//! The direct signal per channel is
//! `J * I0 * rid(theta) * exp(-eta (d1 + d2)) / d1^2 * cos(alpha)`,
//! summed over all light sources. The denominator carries `d1` only: with
//! growing camera distance each pixel integrates light from a larger surface
//! patch, so there is no `d2^2` fall-off.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::ImageBuf;
use crate::math::Vec3;
use crate::real::{real, to_f64, Real};
use crate::scene::{CameraModel, RidModel, SpotLight, WaterBody};
use crate::spectrum::Spectrum;

/// A lit surface point in the camera frame.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceSample<T> {
    pub point: Vec3<T>,
    /// Unit normal oriented toward the camera.
    pub normal: Vec3<T>,
    pub albedo: Spectrum<T>,
}

#[inline]
pub(crate) fn ray_through<T: Real>(cam: &CameraModel<T>, u: T, v: T) -> Vec3<T> {
    let d = Vec3::new((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, T::one());
    d / d.norm()
}

/// Unit viewing ray through continuous image coordinates `(u, v)`.
///
/// Integer pixel `(i, j)` is sampled at its center `(i + 0.5, j + 0.5)`;
/// the principal point maps to the optical axis `(0, 0, 1)`.
pub fn pixel_ray<T: Real>(cam: &CameraModel<T>, u: T, v: T) -> Result<Vec3<T>> {
    let w = real::<T>(cam.width as f64);
    let h = real::<T>(cam.height as f64);
    if !(u.is_finite() && v.is_finite() && u >= T::zero() && u < w && v >= T::zero() && v < h) {
        return Err(Error::PixelOutOfRange {
            u: to_f64(u),
            v: to_f64(v),
            width: cam.width,
            height: cam.height,
        });
    }
    Ok(ray_through(cam, u, v))
}

/// Ray through the center of integer pixel `(u, v)`; caller guarantees the
/// pixel is inside the image.
#[inline]
pub(crate) fn pixel_center_ray<T: Real>(cam: &CameraModel<T>, u: u32, v: u32) -> Vec3<T> {
    let half = real::<T>(0.5);
    ray_through(
        cam,
        real::<T>(u as f64) + half,
        real::<T>(v as f64) + half,
    )
}

/// Back-projects `(u, v, z_depth)` to the 3D point on the viewing ray with
/// `point.z == z_depth`. The ray length `|point|` is >= `z_depth`.
pub fn unproject<T: Real>(cam: &CameraModel<T>, u: T, v: T, z_depth: T) -> Result<Vec3<T>> {
    if !(z_depth.is_finite() && z_depth > T::zero()) {
        return Err(Error::NonPositiveDepth(to_f64(z_depth)));
    }
    let ray = pixel_ray(cam, u, v)?;
    Ok(ray * (z_depth / ray.z))
}

/// Per-pixel unit normals from central differences of unprojected depth.
///
/// Normals are oriented toward the camera (`normal . ray < 0`). Pixels next
/// to the border or to invalid depth fall back to one-sided differences;
/// pixels where no difference can be formed, and invalid pixels themselves,
/// get the fronto-parallel `(0, 0, -1)`.
pub fn normals_from_depth<T: Real>(
    cam: &CameraModel<T>,
    depth: &ImageBuf<T>,
) -> ImageBuf<Vec3<T>> {
    let (w, h) = depth.dims();
    debug_assert_eq!((cam.width, cam.height), (w, h));
    let fallback = Vec3::new(T::zero(), T::zero(), -T::one());
    let half = real::<T>(0.5);

    let point_at = |u: u32, v: u32| -> Option<Vec3<T>> {
        let z = *depth.get(u, v);
        if z > T::zero() {
            let ray = pixel_center_ray(cam, u, v);
            Some(ray * (z / ray.z))
        } else {
            None
        }
    };

    let mut out = ImageBuf::filled(w, h, fallback);
    out.as_mut_slice()
        .par_chunks_mut(w as usize)
        .enumerate()
        .for_each(|(vy, row)| {
            let v = vy as u32;
            for (ux, slot) in row.iter_mut().enumerate() {
                let u = ux as u32;
                let center = match point_at(u, v) {
                    Some(p) => p,
                    None => continue,
                };
                let minus_u = (u > 0).then(|| point_at(u - 1, v)).flatten();
                let plus_u = (u + 1 < w).then(|| point_at(u + 1, v)).flatten();
                let minus_v = (v > 0).then(|| point_at(u, v - 1)).flatten();
                let plus_v = (v + 1 < h).then(|| point_at(u, v + 1)).flatten();

                let tangent_u = match (minus_u, plus_u) {
                    (Some(a), Some(b)) => b - a,
                    (None, Some(b)) => b - center,
                    (Some(a), None) => center - a,
                    (None, None) => continue,
                };
                let tangent_v = match (minus_v, plus_v) {
                    (Some(a), Some(b)) => b - a,
                    (None, Some(b)) => b - center,
                    (Some(a), None) => center - a,
                    (None, None) => continue,
                };
                let normal = match tangent_u.cross(tangent_v).normalized() {
                    Some(n) => n,
                    None => continue,
                };
                let ray = ray_through(
                    cam,
                    real::<T>(u as f64) + half,
                    real::<T>(v as f64) + half,
                );
                *slot = if normal.dot(ray) > T::zero() {
                    -normal
                } else {
                    normal
                };
            }
        });
    out
}

/// Relative spotlight intensity at emission angle `theta` (radians).
///
/// Gaussian RIDs evaluate `exp(-theta^2 / (2 sigma^2))`; table RIDs
/// interpolate linearly and emit nothing beyond their last sample.
pub fn evaluate_rid<T: Real>(rid: &RidModel<T>, theta: T) -> Result<T> {
    if !(theta.is_finite() && theta >= T::zero() && theta <= T::PI()) {
        return Err(Error::AngleOutOfRange {
            angle_rad: to_f64(theta),
        });
    }
    Ok(rid.eval(theta))
}

/// Attenuated, Lambertian-reflected irradiance arriving at the pixel that
/// observes `sample` from ray length `d2`, summed over all lights.
///
/// Back-facing lights (`cos(alpha) <= 0`) contribute nothing; `d1` in the
/// inverse-square denominator is clamped below by `min_d`.
pub fn direct_signal<T: Real>(
    sample: &SurfaceSample<T>,
    lights: &[SpotLight<T>],
    water: &WaterBody<T>,
    d2: T,
    min_d: T,
) -> Spectrum<T> {
    let mut e = Spectrum::zero();
    for light in lights {
        let to_surface = sample.point - light.position;
        let d1 = to_surface.norm();
        if !(d1 > T::zero()) {
            continue;
        }
        let dir = to_surface / d1;
        let cos_alpha = sample.normal.dot(-dir);
        if cos_alpha <= T::zero() {
            continue;
        }
        let theta = light.direction.angle_to(dir);
        let rid = light.rid.eval(theta);
        let d1_clamped = d1.max(min_d);
        let scale = rid * cos_alpha / (d1_clamped * d1_clamped);
        let trans = water.eta.transmittance(d1 + d2);
        e += sample.albedo * light.intensity * trans * scale;
    }
    e
}
