//! Domain types for the camera-light rig, the water body and render
//! settings, plus whole-scene validation.
//!
//! All angles are radians and all distances meters once a value lives in
//! these types; configuration files use degrees and convert on load. Light
//! poses are expressed in the camera frame: the rig is rigid, which is what
//! makes the precomputed backscatter field reusable across frames.

use crate::error::{Error, Result};
use crate::image::ImageBuf;
use crate::math::Vec3;
use crate::real::{real, to_f64, Real};
use crate::spectrum::Spectrum;

/// Pinhole camera intrinsics. `cx`/`cy` are continuous image coordinates in
/// the convention where pixel `(i, j)` covers `[i, i+1) x [j, j+1)` and has
/// its center at `(i + 0.5, j + 0.5)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraModel<T> {
    pub width: u32,
    pub height: u32,
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
}

/// Angular fall-off of a spotlight about its central axis.
#[derive(Clone, Debug, PartialEq)]
pub enum RidModel<T> {
    /// `exp(-theta^2 / (2 sigma^2))`; `sigma` in radians.
    Gaussian { sigma: T },
    /// Piecewise-linear `(angle rad, relative intensity)` samples starting at
    /// `(0, 1)`; emission is zero beyond the last sample.
    Table { samples: Vec<(T, T)> },
}

impl<T: Real> RidModel<T> {
    /// Relative intensity at emission angle `theta`, assumed in `[0, pi]`.
    pub(crate) fn eval(&self, theta: T) -> T {
        match self {
            RidModel::Gaussian { sigma } => {
                let t = theta / *sigma;
                (-t * t / real::<T>(2.0)).exp()
            }
            RidModel::Table { samples } => interp_table(samples, theta, T::zero()),
        }
    }
}

/// Piecewise-linear lookup; `beyond` is returned past the last knot.
pub(crate) fn interp_table<T: Real>(samples: &[(T, T)], x: T, beyond: T) -> T {
    let last = samples[samples.len() - 1];
    if x > last.0 {
        return beyond;
    }
    if x >= last.0 {
        return last.1;
    }
    // First knot with angle >= x.
    let hi = samples.partition_point(|&(a, _)| a < x);
    if hi == 0 {
        return samples[0].1;
    }
    let (x0, y0) = samples[hi - 1];
    let (x1, y1) = samples[hi];
    let t = (x - x0) / (x1 - x0);
    (T::one() - t) * y0 + t * y1
}

/// Spotlight rigidly mounted in the camera frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SpotLight<T> {
    /// Position in meters, camera frame.
    pub position: Vec3<T>,
    /// Unit central axis, camera frame.
    pub direction: Vec3<T>,
    pub rid: RidModel<T>,
    /// Source intensity `I0` per channel.
    pub intensity: Spectrum<T>,
}

/// Water optical properties shared by the whole scene.
#[derive(Clone, Debug, PartialEq)]
pub struct WaterBody<T> {
    /// Beam attenuation per channel, 1/m.
    pub eta: Spectrum<T>,
    /// Volume scattering function `(angle rad, value 1/(sr*m))`, one shape
    /// table shared by all channels, spanning exactly `[0, pi]`.
    pub vsf: Vec<(T, T)>,
}

impl<T: Real> WaterBody<T> {
    /// VSF value at `angle`, assumed in `[0, pi]`.
    #[inline]
    pub(crate) fn vsf_at(&self, angle: T) -> T {
        interp_table(&self.vsf, angle, self.vsf[self.vsf.len() - 1].1)
    }
}

/// Adaptive slab discretization of the view frustum along the viewing ray.
///
/// Built by [`crate::backscatter::slab_thicknesses`]; fields are read-only
/// afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct SlabSampling<T> {
    pub(crate) d_max: T,
    pub(crate) thicknesses: Vec<T>,
    pub(crate) centers: Vec<T>,
    pub(crate) boundaries: Vec<T>,
}

impl<T: Real> SlabSampling<T> {
    pub fn n_slabs(&self) -> u32 {
        self.thicknesses.len() as u32
    }

    pub fn d_max(&self) -> T {
        self.d_max
    }

    /// Slab thicknesses in meters, index 1..=N of the thickness law.
    pub fn thicknesses(&self) -> &[T] {
        &self.thicknesses
    }

    /// Slab-center distances along the viewing ray (cumulative midpoints);
    /// this is where scatter voxels are sampled.
    pub fn centers(&self) -> &[T] {
        &self.centers
    }

    /// Far edge of each slab (running sum of thicknesses). The cumulative
    /// backscatter through slab `i` is the integral from the camera to
    /// `boundaries[i]`, so these are the depth-interpolation knots.
    pub fn boundaries(&self) -> &[T] {
        &self.boundaries
    }
}

/// Scalars controlling rendering and precomputation.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderSettings<T> {
    /// Irradiance-to-pixel scale applied before quantization.
    pub gain: T,
    /// Forward-scatter kernel growth in pixels per meter of path length;
    /// `0` disables the forward-scatter component entirely.
    pub fs_coeff: T,
    /// Backscatter LUT cell size in pixels (1 = one cell per pixel).
    pub lut_downsample: u32,
    /// Lower clamp on light-to-point distances, bounding the inverse-square
    /// singularity.
    pub min_light_distance: T,
    /// Background color `B` of the fog baseline mode.
    pub fog_background: Spectrum<T>,
    /// Default slab count for LUT builds.
    pub n_slabs: u32,
    /// Default maximum scene distance covered by the LUT, meters.
    pub d_max: T,
    /// Hard cap on LUT memory; exceeding it is an error, not a silent
    /// downsample.
    pub lut_mem_cap_bytes: u64,
}

impl<T: Real> Default for RenderSettings<T> {
    fn default() -> Self {
        Self {
            gain: T::one(),
            fs_coeff: T::zero(),
            lut_downsample: 1,
            min_light_distance: real(0.05),
            fog_background: Spectrum::zero(),
            n_slabs: 16,
            d_max: real(10.0),
            lut_mem_cap_bytes: 1 << 30,
        }
    }
}

/// One in-air RGB-D frame: linear albedo in `[0, 1]` plus z-depth in meters,
/// with `0` encoding "no surface within range".
#[derive(Clone, Debug, PartialEq)]
pub struct FrameInput<T> {
    albedo: ImageBuf<Spectrum<T>>,
    depth: ImageBuf<T>,
}

impl<T: Real> FrameInput<T> {
    pub fn new(albedo: ImageBuf<Spectrum<T>>, depth: ImageBuf<T>) -> Result<Self> {
        if albedo.dims() != depth.dims() {
            return Err(Error::DimensionMismatch {
                context: "frame albedo vs depth".into(),
                expected_w: albedo.width(),
                expected_h: albedo.height(),
                got_w: depth.width(),
                got_h: depth.height(),
            });
        }
        for (i, px) in albedo.as_slice().iter().enumerate() {
            if !px.is_finite() || px.min_component() < T::zero() || px.max_component() > T::one() {
                return Err(Error::scene(
                    format!("frame.albedo[{i}]"),
                    "albedo components must be finite and in [0, 1]",
                ));
            }
        }
        for (i, d) in depth.as_slice().iter().enumerate() {
            if !d.is_finite() || *d < T::zero() {
                return Err(Error::scene(
                    format!("frame.depth[{i}]"),
                    "depth must be finite and >= 0 (0 = invalid)",
                ));
            }
        }
        Ok(Self { albedo, depth })
    }

    pub fn albedo(&self) -> &ImageBuf<Spectrum<T>> {
        &self.albedo
    }

    pub fn depth(&self) -> &ImageBuf<T> {
        &self.depth
    }

    pub fn dims(&self) -> (u32, u32) {
        self.albedo.dims()
    }
}

/// Validated, immutable scene aggregate. Construction goes through
/// [`validate_scene`]; any change requires building a new scene.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene<T> {
    camera: CameraModel<T>,
    lights: Vec<SpotLight<T>>,
    water: WaterBody<T>,
    settings: RenderSettings<T>,
}

impl<T: Real> Scene<T> {
    pub fn camera(&self) -> &CameraModel<T> {
        &self.camera
    }

    pub fn lights(&self) -> &[SpotLight<T>] {
        &self.lights
    }

    pub fn water(&self) -> &WaterBody<T> {
        &self.water
    }

    pub fn settings(&self) -> &RenderSettings<T> {
        &self.settings
    }

    /// Hash over every parameter that affects backscatter LUT cell values
    /// (camera geometry, lights, water, `min_light_distance`, `fs_coeff`,
    /// `lut_downsample`). Display-only settings such as `gain` are excluded,
    /// and the slab sampling is carried explicitly by the LUT itself.
    pub fn content_hash(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.u32(self.camera.width);
        h.u32(self.camera.height);
        for v in [
            self.camera.fx,
            self.camera.fy,
            self.camera.cx,
            self.camera.cy,
        ] {
            h.scalar(v);
        }
        h.u32(self.lights.len() as u32);
        for light in &self.lights {
            for v in [
                light.position.x,
                light.position.y,
                light.position.z,
                light.direction.x,
                light.direction.y,
                light.direction.z,
            ] {
                h.scalar(v);
            }
            match &light.rid {
                RidModel::Gaussian { sigma } => {
                    h.u32(0);
                    h.scalar(*sigma);
                }
                RidModel::Table { samples } => {
                    h.u32(1);
                    h.u32(samples.len() as u32);
                    for &(a, v) in samples {
                        h.scalar(a);
                        h.scalar(v);
                    }
                }
            }
            for v in light.intensity.channels() {
                h.scalar(v);
            }
        }
        for v in self.water.eta.channels() {
            h.scalar(v);
        }
        h.u32(self.water.vsf.len() as u32);
        for &(a, v) in &self.water.vsf {
            h.scalar(a);
            h.scalar(v);
        }
        h.scalar(self.settings.min_light_distance);
        h.scalar(self.settings.fs_coeff);
        h.u32(self.settings.lut_downsample);
        h.finish()
    }
}

/// Checks every type invariant and assembles the immutable scene aggregate.
/// The first violated invariant is reported with its field path.
pub fn validate_scene<T: Real>(
    camera: CameraModel<T>,
    lights: Vec<SpotLight<T>>,
    water: WaterBody<T>,
    settings: RenderSettings<T>,
) -> Result<Scene<T>> {
    validate_camera(&camera)?;
    for (i, light) in lights.iter().enumerate() {
        validate_light(light, &format!("lights[{i}]"))?;
    }
    validate_water(&water)?;
    validate_settings(&settings)?;
    Ok(Scene {
        camera,
        lights,
        water,
        settings,
    })
}

fn validate_camera<T: Real>(cam: &CameraModel<T>) -> Result<()> {
    if cam.width < 1 || cam.height < 1 {
        return Err(Error::scene("camera", "width and height must be >= 1"));
    }
    for (name, v) in [("camera.fx", cam.fx), ("camera.fy", cam.fy)] {
        if !(v.is_finite() && v > T::zero()) {
            return Err(Error::scene(name, "focal length must be finite and > 0"));
        }
    }
    let w = real::<T>(cam.width as f64);
    let h = real::<T>(cam.height as f64);
    if !(cam.cx.is_finite() && cam.cx >= T::zero() && cam.cx < w) {
        return Err(Error::scene("camera.cx", "principal point outside [0, width)"));
    }
    if !(cam.cy.is_finite() && cam.cy >= T::zero() && cam.cy < h) {
        return Err(Error::scene("camera.cy", "principal point outside [0, height)"));
    }
    Ok(())
}

fn validate_light<T: Real>(light: &SpotLight<T>, path: &str) -> Result<()> {
    if !light.position.is_finite() {
        return Err(Error::scene(format!("{path}.position"), "position not finite"));
    }
    let norm = light.direction.norm();
    if !norm.is_finite() || (norm - T::one()).abs() > real(1e-9) {
        return Err(Error::scene(format!("{path}.direction"), "direction not unit"));
    }
    match &light.rid {
        RidModel::Gaussian { sigma } => {
            if !(sigma.is_finite() && *sigma > T::zero()) {
                return Err(Error::scene(
                    format!("{path}.rid.sigma"),
                    "sigma must be finite and > 0",
                ));
            }
        }
        RidModel::Table { samples } => {
            let p = format!("{path}.rid.samples");
            if samples.is_empty() {
                return Err(Error::scene(p, "table must not be empty"));
            }
            if samples[0].0 != T::zero() || samples[0].1 != T::one() {
                return Err(Error::scene(p, "first sample must be (0, 1.0)"));
            }
            for w in samples.windows(2) {
                if !(w[1].0 > w[0].0) {
                    return Err(Error::scene(p, "angles not strictly increasing"));
                }
            }
            for &(a, v) in samples {
                if !(a.is_finite() && v.is_finite() && v >= T::zero() && v <= T::one()) {
                    return Err(Error::scene(p, "values must be finite and in [0, 1]"));
                }
            }
        }
    }
    if !light.intensity.is_finite() || light.intensity.min_component() < T::zero() {
        return Err(Error::scene(
            format!("{path}.intensity_i0"),
            "intensity must be finite and >= 0",
        ));
    }
    Ok(())
}

fn validate_water<T: Real>(water: &WaterBody<T>) -> Result<()> {
    if !water.eta.is_finite() || water.eta.min_component() < T::zero() {
        return Err(Error::scene(
            "water.eta_per_m",
            "attenuation must be finite and >= 0",
        ));
    }
    let vsf = &water.vsf;
    if vsf.len() < 2 {
        return Err(Error::scene("water.vsf", "needs at least two samples"));
    }
    if vsf[0].0 != T::zero() || vsf[vsf.len() - 1].0 != T::PI() {
        return Err(Error::scene("water.vsf", "angles must span [0, 180] degrees"));
    }
    for w in vsf.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::scene("water.vsf", "vsf angles not strictly increasing"));
        }
    }
    for &(a, v) in vsf {
        if !(a.is_finite() && v.is_finite() && v >= T::zero()) {
            return Err(Error::scene("water.vsf", "values must be finite and >= 0"));
        }
    }
    Ok(())
}

fn validate_settings<T: Real>(s: &RenderSettings<T>) -> Result<()> {
    if !(s.gain.is_finite() && s.gain > T::zero()) {
        return Err(Error::scene("settings.gain", "gain must be finite and > 0"));
    }
    if !(s.fs_coeff.is_finite() && s.fs_coeff >= T::zero()) {
        return Err(Error::scene(
            "settings.fs_coeff_px_per_m",
            "must be finite and >= 0",
        ));
    }
    if s.lut_downsample < 1 {
        return Err(Error::scene("settings.lut_downsample", "must be >= 1"));
    }
    if !(s.min_light_distance.is_finite() && s.min_light_distance > T::zero()) {
        return Err(Error::scene(
            "settings.min_light_distance_m",
            "must be finite and > 0",
        ));
    }
    if !s.fog_background.is_finite() || s.fog_background.min_component() < T::zero() {
        return Err(Error::scene(
            "settings.fog_background",
            "must be finite and >= 0",
        ));
    }
    if s.n_slabs < 1 {
        return Err(Error::scene("settings.n_slabs", "must be >= 1"));
    }
    if !(s.d_max.is_finite() && s.d_max > T::zero()) {
        return Err(Error::scene("settings.d_max_m", "must be finite and > 0"));
    }
    if s.lut_mem_cap_bytes == 0 {
        return Err(Error::scene("settings.lut_mem_cap_bytes", "must be > 0"));
    }
    Ok(())
}

/// FNV-1a over the low-level byte view of the scene parameters; a cheap,
/// stable fingerprint for LUT cache validation (no adversarial inputs here).
struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    fn byte(&mut self, b: u8) {
        self.0 ^= b as u64;
        self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
    }

    fn u32(&mut self, v: u32) {
        for b in v.to_le_bytes() {
            self.byte(b);
        }
    }

    fn scalar<T: Real>(&mut self, v: T) {
        for b in to_f64(v).to_le_bytes() {
            self.byte(b);
        }
    }

    fn finish(self) -> u64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_camera() -> CameraModel<f64> {
        CameraModel {
            width: 64,
            height: 48,
            fx: 50.0,
            fy: 50.0,
            cx: 32.0,
            cy: 24.0,
        }
    }

    fn test_water() -> WaterBody<f64> {
        WaterBody {
            eta: Spectrum::new(0.37, 0.044, 0.035),
            vsf: vec![(0.0, 1.0), (std::f64::consts::PI, 0.001)],
        }
    }

    fn test_light(position: Vec3<f64>) -> SpotLight<f64> {
        SpotLight {
            position,
            direction: Vec3::new(0.0, 0.0, 1.0),
            rid: RidModel::Gaussian {
                sigma: 35f64.to_radians(),
            },
            intensity: Spectrum::splat(1.0),
        }
    }

    #[test]
    fn two_light_rig_validates() {
        let lights = vec![
            test_light(Vec3::new(-1.0, 0.0, 0.0)),
            test_light(Vec3::new(1.0, 0.0, 0.0)),
        ];
        let scene = validate_scene(
            test_camera(),
            lights,
            test_water(),
            RenderSettings::default(),
        );
        assert!(scene.is_ok());
    }

    #[test]
    fn zero_direction_is_rejected() {
        let mut light = test_light(Vec3::zero());
        light.direction = Vec3::zero();
        let err = validate_scene(
            test_camera(),
            vec![light],
            test_water(),
            RenderSettings::default(),
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("direction not unit"), "{msg}");
        assert!(msg.contains("lights[0].direction"), "{msg}");
    }

    #[test]
    fn non_monotonic_vsf_is_rejected() {
        let mut water = test_water();
        let half_pi = std::f64::consts::FRAC_PI_2;
        water.vsf = vec![
            (0.0, 1.0),
            (half_pi, 0.5),
            (half_pi, 0.5),
            (std::f64::consts::PI, 0.1),
        ];
        let err = validate_scene(
            test_camera(),
            vec![test_light(Vec3::zero())],
            water,
            RenderSettings::default(),
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("not strictly increasing"), "{msg}");
        assert!(msg.contains("water.vsf"), "{msg}");
    }

    #[test]
    fn rid_table_must_start_at_unit_peak() {
        let mut light = test_light(Vec3::zero());
        light.rid = RidModel::Table {
            samples: vec![(0.1, 1.0), (1.0, 0.5)],
        };
        let err = validate_scene(
            test_camera(),
            vec![light],
            test_water(),
            RenderSettings::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("first sample must be (0, 1.0)"));
    }

    #[test]
    fn content_hash_tracks_lut_relevant_fields_only() {
        let scene = validate_scene(
            test_camera(),
            vec![test_light(Vec3::new(1.0, 1.0, 0.0))],
            test_water(),
            RenderSettings::default(),
        )
        .unwrap();
        let mut gain_changed = RenderSettings::default();
        gain_changed.gain = 7.5;
        let same = validate_scene(
            test_camera(),
            vec![test_light(Vec3::new(1.0, 1.0, 0.0))],
            test_water(),
            gain_changed,
        )
        .unwrap();
        assert_eq!(scene.content_hash(), same.content_hash());

        let moved = validate_scene(
            test_camera(),
            vec![test_light(Vec3::new(1.0, 1.0, 0.1))],
            test_water(),
            RenderSettings::default(),
        )
        .unwrap();
        assert_ne!(scene.content_hash(), moved.content_hash());
    }

    #[test]
    fn frame_input_checks_ranges() {
        let albedo = ImageBuf::filled(2, 2, Spectrum::splat(0.5));
        let depth = ImageBuf::filled(2, 2, 1.0);
        assert!(FrameInput::new(albedo.clone(), depth).is_ok());

        let bad_depth = ImageBuf::filled(2, 2, -1.0);
        assert!(FrameInput::new(albedo.clone(), bad_depth).is_err());

        let bad_albedo = ImageBuf::filled(2, 2, Spectrum::splat(1.5));
        let depth = ImageBuf::filled(2, 2, 1.0);
        assert!(FrameInput::new(bad_albedo, depth).is_err());

        let mismatched = ImageBuf::filled(3, 2, 1.0);
        assert!(FrameInput::new(albedo, mismatched).is_err());
    }
}
