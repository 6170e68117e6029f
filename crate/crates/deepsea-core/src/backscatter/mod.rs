//! Volumetric backscatter: adaptive slab sampling, per-voxel scatter
//! irradiance, the cumulative 3D lookup table over the view frustum, and a
//! brute-force ray-marching oracle for validation.
//!
//! The frustum is sliced into `N` slabs whose thicknesses follow the Taylor
//! term law `dz_i = s * N^(i-1) / (i-1)!` with `s = 2.2 * d_max / e^N`,
//! giving dense sampling near the camera where scatter irradiance is
//! concentrated. Each LUT cell stores the backscatter accumulated along its
//! viewing ray through slab `i` inclusive:
//!
//! `E_b = sum_i beta(pi - psi) * (E' + E'_f) * dz_i * cos(phi)`
//!
//! with `E' = I0 * rid(theta) * exp(-eta (d1' + d2')) / d1'^2` evaluated at
//! the slab-center voxel, `E'_f` an optional Gaussian-blurred copy of the
//! slab's `E'` image, and `phi` the angle between the viewing ray and the
//! camera optical axis. While the camera-light rig stays rigid the table is
//! valid for every frame, so per-pixel backscatter collapses to an
//! interpolated lookup.

mod cache;

pub use cache::{load_lut, read_lut_info, save_lut, LutInfo};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::math::Vec3;
use crate::radiometry::{pixel_center_ray, ray_through};
use crate::real::{real, to_f64, Real};
use crate::scene::{Scene, SlabSampling, SpotLight, WaterBody};
use crate::spectrum::Spectrum;

/// Distances and angles tying one scatter voxel to one light and the camera.
#[derive(Clone, Copy, Debug)]
pub struct ScatterGeometry<T> {
    /// Voxel-to-light distance, meters.
    pub d1p: T,
    /// Voxel-to-camera distance along the viewing ray, meters.
    pub d2p: T,
    /// Angle at the voxel between the ray toward the light and the ray
    /// toward the camera; the scattering deflection is `pi - psi`.
    pub psi: T,
    /// Angle between the viewing ray and the camera optical axis.
    pub phi: T,
    /// Emission angle at the light.
    pub theta: T,
}

/// Precomputed cumulative backscatter over the camera frustum.
///
/// `cells` is indexed `[cell_v][cell_u][slab]`, each entry holding the
/// backscatter accumulated from the camera through that slab inclusive.
#[derive(Clone, Debug, PartialEq)]
pub struct BackscatterLut<T> {
    image_w: u32,
    image_h: u32,
    downsample: u32,
    cell_w: u32,
    cell_h: u32,
    sampling: SlabSampling<T>,
    scene_hash: u64,
    cells: Vec<Spectrum<T>>,
}

impl<T: Real> BackscatterLut<T> {
    pub fn image_dims(&self) -> (u32, u32) {
        (self.image_w, self.image_h)
    }

    pub fn cell_dims(&self) -> (u32, u32) {
        (self.cell_w, self.cell_h)
    }

    pub fn downsample(&self) -> u32 {
        self.downsample
    }

    pub fn sampling(&self) -> &SlabSampling<T> {
        &self.sampling
    }

    pub fn scene_hash(&self) -> u64 {
        self.scene_hash
    }

    /// Raw cell array, `[cell_v][cell_u][slab]` order.
    pub fn cells(&self) -> &[Spectrum<T>] {
        &self.cells
    }

    /// Stored cumulative value for one cell and slab index.
    pub fn cell_value(&self, cell_u: u32, cell_v: u32, slab: usize) -> Spectrum<T> {
        let n = self.sampling.thicknesses().len();
        self.cells[(cell_v as usize * self.cell_w as usize + cell_u as usize) * n + slab]
    }

    /// Cumulative backscatter at `depth` along the cell's ray, linearly
    /// interpolated between the bracketing slab knots. The stored value for
    /// slab `i` is the accumulation from the camera through the whole slab,
    /// i.e. up to its far edge, so the knots sit at the slab boundaries
    /// (anchoring them at the slab centers instead would shift the midpoint
    /// sums by half a slab and bias shallow lookups high). `depth == 0` is
    /// the invalid-depth sentinel and returns the full accumulation.
    fn depth_lookup(&self, cell_idx: usize, depth: T) -> Spectrum<T> {
        let n = self.sampling.thicknesses().len();
        let slabs = &self.cells[cell_idx * n..(cell_idx + 1) * n];
        let knots = self.sampling.boundaries();
        if depth == T::zero() || depth >= knots[n - 1] {
            return slabs[n - 1];
        }
        let first = knots[0];
        if depth <= first {
            return slabs[0] * (depth / first);
        }
        let hi = knots.partition_point(|&c| c < depth);
        let lo = hi - 1;
        let t = (depth - knots[lo]) / (knots[hi] - knots[lo]);
        slabs[lo] * (T::one() - t) + slabs[hi] * t
    }
}

/// Slab thicknesses and center distances for `n` slabs covering `d_max`.
///
/// Thicknesses grow by the factor `n / i` between consecutive slabs, so they
/// are strictly increasing, and their sum tracks `d_max` to within a few
/// percent for n > 3 (the Taylor partial sum tends to `e^n / 2`, so the
/// deviation grows toward 10% for very large `n`).
pub fn slab_thicknesses<T: Real>(n: u32, d_max: T) -> Result<SlabSampling<T>> {
    let err = || Error::InvalidSlabSampling {
        n,
        d_max: to_f64(d_max),
    };
    if n < 1 || !(d_max.is_finite() && d_max > T::zero()) {
        return Err(err());
    }
    let n_f = real::<T>(n as f64);
    let scale = real::<T>(2.2) * d_max / n_f.exp();
    if !(scale.is_finite() && scale > T::zero()) {
        // e^n overflowed the scalar type (e.g. n > 88 in f32).
        return Err(err());
    }
    let mut thicknesses = Vec::with_capacity(n as usize);
    let mut dz = scale;
    for i in 1..=n {
        thicknesses.push(dz);
        dz = dz * n_f / real::<T>(i as f64);
    }
    let half = real::<T>(0.5);
    let mut centers = Vec::with_capacity(n as usize);
    let mut boundaries = Vec::with_capacity(n as usize);
    let mut walked = T::zero();
    for &t in &thicknesses {
        centers.push(walked + t * half);
        walked += t;
        boundaries.push(walked);
    }
    Ok(SlabSampling {
        d_max,
        thicknesses,
        centers,
        boundaries,
    })
}

/// Volume scattering function value at `scatter_angle` (radians, `[0, pi]`),
/// linearly interpolated from the water's table. For backscatter the caller
/// passes `pi - psi`.
pub fn vsf_eval<T: Real>(water: &WaterBody<T>, scatter_angle: T) -> Result<T> {
    if !(scatter_angle.is_finite() && scatter_angle >= T::zero() && scatter_angle <= T::PI()) {
        return Err(Error::AngleOutOfRange {
            angle_rad: to_f64(scatter_angle),
        });
    }
    Ok(water.vsf_at(scatter_angle))
}

/// Direct irradiance from one light reaching a scatter voxel:
/// `I0 * rid(theta) * exp(-eta (d1' + d2')) / max(d1', min_d)^2`.
pub fn voxel_irradiance<T: Real>(
    geom: &ScatterGeometry<T>,
    light: &SpotLight<T>,
    water: &WaterBody<T>,
    min_d: T,
) -> Spectrum<T> {
    let rid = light.rid.eval(geom.theta);
    let d1 = geom.d1p.max(min_d);
    let trans = water.eta.transmittance(geom.d1p + geom.d2p);
    light.intensity * trans * (rid / (d1 * d1))
}

#[inline]
fn clamp_unit<T: Real>(v: T) -> T {
    v.max(-T::one()).min(T::one())
}

/// Scatter geometry for the voxel at `distance` along `ray`, lit by `light`.
/// Returns `None` when the voxel coincides with the light source.
#[inline]
fn scatter_geometry<T: Real>(
    ray: Vec3<T>,
    distance: T,
    phi: T,
    light: &SpotLight<T>,
) -> Option<ScatterGeometry<T>> {
    let voxel = ray * distance;
    let to_voxel = voxel - light.position;
    let d1p = to_voxel.norm();
    if !(d1p > T::zero()) {
        return None;
    }
    let theta = clamp_unit(light.direction.dot(to_voxel) / d1p).acos();
    let psi = clamp_unit(to_voxel.dot(ray) / d1p).acos();
    Some(ScatterGeometry {
        d1p,
        d2p: distance,
        psi,
        phi,
        theta,
    })
}

/// Builds the cumulative backscatter LUT for a scene. Frame dimensions and
/// the cell grid come from the scene's camera and `settings.lut_downsample`.
pub fn build_lut<T: Real>(scene: &Scene<T>, sampling: &SlabSampling<T>) -> Result<BackscatterLut<T>> {
    let cam = scene.camera();
    let settings = scene.settings();
    let water = scene.water();
    let k = settings.lut_downsample;
    let cell_w = cam.width.div_ceil(k);
    let cell_h = cam.height.div_ceil(k);
    let n = sampling.thicknesses().len();
    let cells = cell_w as usize * cell_h as usize;

    let needed = (cells * n * std::mem::size_of::<Spectrum<T>>()) as u64;
    if needed > settings.lut_mem_cap_bytes {
        return Err(Error::LutMemoryCapExceeded {
            needed,
            cap: settings.lut_mem_cap_bytes,
        });
    }

    // Central viewing ray of each cell; a cell covers k x k pixels and its
    // center sits at (cu + 0.5) * k in continuous pixel coordinates.
    let k_f = real::<T>(k as f64);
    let half = real::<T>(0.5);
    let rays: Vec<Vec3<T>> = (0..cells)
        .map(|idx| {
            let cu = (idx % cell_w as usize) as f64;
            let cv = (idx / cell_w as usize) as f64;
            ray_through(
                cam,
                (real::<T>(cu) + half) * k_f,
                (real::<T>(cv) + half) * k_f,
            )
        })
        .collect();
    let cos_phi: Vec<T> = rays.iter().map(|r| r.z).collect();
    let phi: Vec<T> = rays.iter().map(|r| clamp_unit(r.z).acos()).collect();

    let min_d = settings.min_light_distance;
    let fs = settings.fs_coeff;
    let mut cum = vec![Spectrum::<T>::zero(); cells * n];
    let mut eprime = vec![Spectrum::<T>::zero(); cells];
    let mut beta = vec![T::zero(); cells];
    let mut contrib = vec![Spectrum::<T>::zero(); cells];

    for (i, (&dz, &center)) in sampling
        .thicknesses()
        .iter()
        .zip(sampling.centers())
        .enumerate()
    {
        contrib.fill(Spectrum::zero());
        for light in scene.lights() {
            eprime
                .par_iter_mut()
                .zip(beta.par_iter_mut())
                .zip(rays.par_iter().zip(phi.par_iter()))
                .for_each(|((e, b), (&ray, &phi))| {
                    match scatter_geometry(ray, center, phi, light) {
                        Some(geom) => {
                            *e = voxel_irradiance(&geom, light, water, min_d);
                            *b = water.vsf_at(T::PI() - geom.psi);
                        }
                        None => {
                            *e = Spectrum::zero();
                            *b = T::zero();
                        }
                    }
                });

            // Per-slab forward scattering: a Gaussian-blurred copy of the
            // slab's E' image, kernel sigma growing with slab distance.
            // fs == 0 disables the component.
            let forward = if fs > T::zero() {
                Some(gaussian_blur(&eprime, cell_w as usize, cell_h as usize, fs * center))
            } else {
                None
            };

            match &forward {
                Some(fwd) => contrib
                    .par_iter_mut()
                    .zip(eprime.par_iter().zip(fwd.par_iter()))
                    .zip(beta.par_iter())
                    .for_each(|((c, (e, f)), &b)| *c += (*e + *f) * b),
                None => contrib
                    .par_iter_mut()
                    .zip(eprime.par_iter())
                    .zip(beta.par_iter())
                    .for_each(|((c, e), &b)| *c += *e * b),
            }
        }

        cum.par_chunks_mut(n)
            .zip(contrib.par_iter().zip(cos_phi.par_iter()))
            .for_each(|(cell_slabs, (c, &cp))| {
                let add = *c * (dz * cp);
                cell_slabs[i] = if i > 0 { cell_slabs[i - 1] + add } else { add };
            });
    }

    Ok(BackscatterLut {
        image_w: cam.width,
        image_h: cam.height,
        downsample: k,
        cell_w,
        cell_h,
        sampling: sampling.clone(),
        scene_hash: scene.content_hash(),
        cells: cum,
    })
}

/// Backscatter for pixel `(u, v)` at `depth_along_ray` meters, interpolated
/// from the LUT: bilinear over the cell grid when the LUT is downsampled,
/// then linear in depth between the two bracketing slab knots. Depth `0`
/// (invalid: no surface within range) yields the full accumulation.
pub fn backscatter_at<T: Real>(
    lut: &BackscatterLut<T>,
    u: u32,
    v: u32,
    depth_along_ray: T,
) -> Result<Spectrum<T>> {
    if u >= lut.image_w || v >= lut.image_h {
        return Err(Error::PixelOutOfRange {
            u: u as f64,
            v: v as f64,
            width: lut.image_w,
            height: lut.image_h,
        });
    }
    if !(depth_along_ray.is_finite() && depth_along_ray >= T::zero()) {
        return Err(Error::InvalidDepth(to_f64(depth_along_ray)));
    }
    let cw = lut.cell_w as usize;
    if lut.downsample == 1 {
        return Ok(lut.depth_lookup(v as usize * cw + u as usize, depth_along_ray));
    }
    // Continuous cell coordinate of the pixel center: cell cu's center lies
    // at pixel coordinate (cu + 0.5) * k.
    let k = lut.downsample as f64;
    let cc = |p: u32, max_cell: u32| -> (usize, usize, T) {
        let c = ((p as f64 + 0.5) / k - 0.5).clamp(0.0, (max_cell - 1) as f64);
        let lo = c.floor();
        let hi = (lo + 1.0).min((max_cell - 1) as f64);
        (lo as usize, hi as usize, real::<T>(c - lo))
    };
    let (x0, x1, tx) = cc(u, lut.cell_w);
    let (y0, y1, ty) = cc(v, lut.cell_h);
    let sample = |x: usize, y: usize| lut.depth_lookup(y * cw + x, depth_along_ray);
    let one = T::one();
    let top = sample(x0, y0) * (one - tx) + sample(x1, y0) * tx;
    let bottom = sample(x0, y1) * (one - tx) + sample(x1, y1) * tx;
    Ok(top * (one - ty) + bottom * ty)
}

/// Midpoint-rule ray-marching oracle for the same integrand as the LUT,
/// with uniform steps and no per-slab forward scattering. Integrates from
/// the camera to `min(depth_along_ray, d_max)`; depth `0` marches to
/// `d_max`.
pub fn backscatter_bruteforce<T: Real>(
    scene: &Scene<T>,
    u: u32,
    v: u32,
    depth_along_ray: T,
    step: T,
) -> Result<Spectrum<T>> {
    let cam = scene.camera();
    if u >= cam.width || v >= cam.height {
        return Err(Error::PixelOutOfRange {
            u: u as f64,
            v: v as f64,
            width: cam.width,
            height: cam.height,
        });
    }
    if !(step.is_finite() && step > T::zero()) {
        return Err(Error::InvalidStep(to_f64(step)));
    }
    if !(depth_along_ray.is_finite() && depth_along_ray >= T::zero()) {
        return Err(Error::InvalidDepth(to_f64(depth_along_ray)));
    }
    let d_max = scene.settings().d_max;
    let end = if depth_along_ray == T::zero() {
        d_max
    } else {
        depth_along_ray.min(d_max)
    };
    let ray = pixel_center_ray(cam, u, v);
    let cos_phi = ray.z;
    let phi = clamp_unit(cos_phi).acos();
    let min_d = scene.settings().min_light_distance;
    let water = scene.water();

    let segments = to_f64(end / step).ceil().max(1.0) as u64;
    let h = end / real::<T>(segments as f64);
    let half = real::<T>(0.5);
    let mut total = Spectrum::zero();
    for j in 0..segments {
        let mid = (real::<T>(j as f64) + half) * h;
        for light in scene.lights() {
            if let Some(geom) = scatter_geometry(ray, mid, phi, light) {
                let e = voxel_irradiance(&geom, light, water, min_d);
                let b = water.vsf_at(T::PI() - geom.psi);
                total += e * (b * h * cos_phi);
            }
        }
    }
    Ok(total)
}

/// One row of the optical-axis backscatter profile.
#[derive(Clone, Copy, Debug)]
pub struct ProfileRow<T> {
    /// Slab-center distance along the optical axis, meters.
    pub depth_m: T,
    /// Cumulative backscatter, normalized per channel by the deepest value.
    pub value: Spectrum<T>,
}

/// Cumulative backscatter along the principal-point ray sampled at each slab
/// center, normalized per channel by the accumulation at `d_max`. Useful for
/// choosing `d_max`: once the curve saturates, deeper slabs add nothing.
///
/// The per-slab forward-scatter layer is an image-space term and is omitted
/// here, matching the oracle.
pub fn backscatter_profile<T: Real>(
    scene: &Scene<T>,
    sampling: &SlabSampling<T>,
) -> Vec<ProfileRow<T>> {
    let axis = Vec3::new(T::zero(), T::zero(), T::one());
    let min_d = scene.settings().min_light_distance;
    let water = scene.water();
    let mut rows = Vec::with_capacity(sampling.thicknesses().len());
    let mut cum = Spectrum::<T>::zero();
    for (&dz, &center) in sampling.thicknesses().iter().zip(sampling.centers()) {
        for light in scene.lights() {
            if let Some(geom) = scatter_geometry(axis, center, T::zero(), light) {
                let e = voxel_irradiance(&geom, light, water, min_d);
                let b = water.vsf_at(T::PI() - geom.psi);
                cum += e * (b * dz);
            }
        }
        rows.push(ProfileRow {
            depth_m: center,
            value: cum,
        });
    }
    if let Some(last) = rows.last().map(|r| r.value) {
        let norm = last.map(|c| if c > T::zero() { c } else { T::one() });
        for row in &mut rows {
            row.value = Spectrum::new(
                row.value.r / norm.r,
                row.value.g / norm.g,
                row.value.b / norm.b,
            );
        }
    }
    rows
}

/// Renders a profile as CSV with the fixed header `depth_m,r,g,b`.
pub fn profile_to_csv<T: Real>(rows: &[ProfileRow<T>]) -> String {
    let mut out = String::from("depth_m,r,g,b\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.depth_m, row.value.r, row.value.g, row.value.b
        ));
    }
    out
}

/// Separable Gaussian blur with per-axis truncation at 3 sigma and border
/// renormalization, so a constant image stays constant.
fn gaussian_blur<T: Real>(
    src: &[Spectrum<T>],
    w: usize,
    h: usize,
    sigma: T,
) -> Vec<Spectrum<T>> {
    debug_assert!(sigma > T::zero());
    let radius = to_f64(sigma * real::<T>(3.0)).ceil() as i64;
    let radius = radius.max(1);
    let weights: Vec<T> = (-radius..=radius)
        .map(|d| {
            let t = real::<T>(d as f64) / sigma;
            (-t * t / real::<T>(2.0)).exp()
        })
        .collect();

    let pass = |input: &[Spectrum<T>], horizontal: bool| -> Vec<Spectrum<T>> {
        let mut out = vec![Spectrum::<T>::zero(); input.len()];
        out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
            for (x, slot) in row.iter_mut().enumerate() {
                let mut acc = Spectrum::<T>::zero();
                let mut wsum = T::zero();
                for (wi, &weight) in weights.iter().enumerate() {
                    let d = wi as i64 - radius;
                    let (sx, sy) = if horizontal {
                        (x as i64 + d, y as i64)
                    } else {
                        (x as i64, y as i64 + d)
                    };
                    if sx < 0 || sy < 0 || sx >= w as i64 || sy >= h as i64 {
                        continue;
                    }
                    acc += input[sy as usize * w + sx as usize] * weight;
                    wsum += weight;
                }
                *slot = acc / wsum;
            }
        });
        out
    };

    let tmp = pass(src, true);
    pass(&tmp, false)
}
