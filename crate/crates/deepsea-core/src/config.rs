//! JSON scene configuration and job manifests.
//!
//! Configs use degrees and explicit units in key names (`sigma_deg`,
//! `eta_per_m`, `d_max_m`); everything converts to radians/meters on load.
//! Light poses may be given in the world frame when the camera carries a
//! pose; they are converted to the camera frame at load time, keeping the
//! runtime rig strictly camera-relative.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::Vec3;
use crate::real::{real, Real};
use crate::scene::{
    validate_scene, CameraModel, RenderSettings, RidModel, Scene, SpotLight, WaterBody,
};
use crate::spectrum::Spectrum;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub camera: CameraConfig,
    pub lights: Vec<LightConfig>,
    pub water: WaterConfig,
    #[serde(default)]
    pub settings: SettingsConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraConfig {
    pub width: u32,
    pub height: u32,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    /// Camera-to-world pose; only needed when lights are given in the world
    /// frame.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pose: Option<PoseConfig>,
}

/// Camera-to-world pose: position plus roll/pitch/yaw about x/y/z, applied
/// in Rz(yaw) * Ry(pitch) * Rx(roll) order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseConfig {
    pub position_m: [f64; 3],
    #[serde(default)]
    pub rotation_rpy_deg: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordFrame {
    Camera,
    World,
}

impl Default for CoordFrame {
    fn default() -> Self {
        CoordFrame::Camera
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightConfig {
    pub position_m: [f64; 3],
    /// Central axis; normalized on load, must be nonzero.
    pub direction: [f64; 3],
    pub rid: RidConfig,
    #[serde(default = "unit_rgb")]
    pub intensity_i0: [f64; 3],
    #[serde(default)]
    pub frame: CoordFrame,
}

fn unit_rgb() -> [f64; 3] {
    [1.0, 1.0, 1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum RidConfig {
    Gaussian {
        sigma_deg: f64,
    },
    /// `[angle_deg, relative_intensity]` rows, starting at `[0, 1.0]`.
    Table {
        samples: Vec<[f64; 2]>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaterConfig {
    /// Beam attenuation per channel, 1/m.
    pub eta_per_m: [f64; 3],
    /// Volume scattering function `[angle_deg, value_per_sr_m]` rows
    /// spanning 0..180 degrees.
    pub vsf: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SettingsConfig {
    pub gain: f64,
    pub fs_coeff_px_per_m: f64,
    pub lut_downsample: u32,
    pub min_light_distance_m: f64,
    pub fog_background: [f64; 3],
    pub n_slabs: u32,
    pub d_max_m: f64,
    pub lut_mem_cap_bytes: u64,
}

impl Default for SettingsConfig {
    fn default() -> Self {
        Self {
            gain: 1.0,
            fs_coeff_px_per_m: 0.0,
            lut_downsample: 1,
            min_light_distance_m: 0.05,
            fog_background: [0.0, 0.0, 0.0],
            n_slabs: 16,
            d_max_m: 10.0,
            lut_mem_cap_bytes: 1 << 30,
        }
    }
}

impl SceneConfig {
    /// Parses a config, reporting unknown/missing keys with their dotted
    /// path (e.g. `water.eta_per_m`).
    pub fn parse(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.inner().to_string();
            // Fold the section path into serde's "missing field `x`" text so
            // the message names the full key.
            let msg = if path == "." {
                inner
            } else if let Some((_, rest)) = inner.split_once("missing field `") {
                format!("missing field `{path}.{rest}")
            } else {
                format!("{path}: {inner}")
            };
            Error::Config(msg)
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Converts to the validated runtime scene: degrees to radians, light
    /// directions normalized, world-frame lights moved into the camera
    /// frame.
    pub fn into_scene<T: Real>(&self) -> Result<Scene<T>> {
        let camera = CameraModel {
            width: self.camera.width,
            height: self.camera.height,
            fx: real(self.camera.fx),
            fy: real(self.camera.fy),
            cx: real(self.camera.cx),
            cy: real(self.camera.cy),
        };

        let mut lights = Vec::with_capacity(self.lights.len());
        for (i, lc) in self.lights.iter().enumerate() {
            let (mut pos, mut dir) = (lc.position_m, lc.direction);
            if lc.frame == CoordFrame::World {
                let pose = self.camera.pose.as_ref().ok_or_else(|| {
                    Error::Config(format!(
                        "lights[{i}].frame is \"world\" but camera.pose is missing"
                    ))
                })?;
                pos = world_to_camera_point(pose, pos);
                dir = world_to_camera_dir(pose, dir);
            }
            let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
            let dir = if norm > 0.0 && norm.is_finite() {
                [dir[0] / norm, dir[1] / norm, dir[2] / norm]
            } else {
                dir // validate_scene reports "direction not unit"
            };
            let rid = match &lc.rid {
                RidConfig::Gaussian { sigma_deg } => RidModel::Gaussian {
                    sigma: real(sigma_deg.to_radians()),
                },
                RidConfig::Table { samples } => RidModel::Table {
                    samples: samples
                        .iter()
                        .map(|[deg, val]| (real(deg.to_radians()), real(*val)))
                        .collect(),
                },
            };
            lights.push(SpotLight {
                position: vec3(pos),
                direction: vec3(dir),
                rid,
                intensity: spectrum(lc.intensity_i0),
            });
        }

        let vsf = self
            .water
            .vsf
            .iter()
            .map(|[deg, val]| {
                // Snap the 180-degree endpoint to exactly pi so the table
                // span check is not at the mercy of rounding.
                let angle = if (*deg - 180.0).abs() < 1e-9 {
                    T::PI()
                } else {
                    real(deg.to_radians())
                };
                (angle, real(*val))
            })
            .collect();
        let water = WaterBody {
            eta: spectrum(self.water.eta_per_m),
            vsf,
        };

        let s = &self.settings;
        let settings = RenderSettings {
            gain: real(s.gain),
            fs_coeff: real(s.fs_coeff_px_per_m),
            lut_downsample: s.lut_downsample,
            min_light_distance: real(s.min_light_distance_m),
            fog_background: spectrum(s.fog_background),
            n_slabs: s.n_slabs,
            d_max: real(s.d_max_m),
            lut_mem_cap_bytes: s.lut_mem_cap_bytes,
        };

        validate_scene(camera, lights, water, settings)
    }
}

fn vec3<T: Real>(v: [f64; 3]) -> Vec3<T> {
    Vec3::new(real(v[0]), real(v[1]), real(v[2]))
}

fn spectrum<T: Real>(v: [f64; 3]) -> Spectrum<T> {
    Spectrum::new(real(v[0]), real(v[1]), real(v[2]))
}

fn rotation_matrix(rpy_deg: [f64; 3]) -> [[f64; 3]; 3] {
    let [roll, pitch, yaw] = rpy_deg.map(f64::to_radians);
    let (sr, cr) = roll.sin_cos();
    let (sp, cp) = pitch.sin_cos();
    let (sy, cy) = yaw.sin_cos();
    // Rz(yaw) * Ry(pitch) * Rx(roll)
    [
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ]
}

fn mat_t_mul(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    // Transpose multiply: world -> camera for a camera-to-world rotation.
    [
        m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
        m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
        m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
    ]
}

fn world_to_camera_point(pose: &PoseConfig, p: [f64; 3]) -> [f64; 3] {
    let r = rotation_matrix(pose.rotation_rpy_deg);
    let d = [
        p[0] - pose.position_m[0],
        p[1] - pose.position_m[1],
        p[2] - pose.position_m[2],
    ];
    mat_t_mul(&r, d)
}

fn world_to_camera_dir(pose: &PoseConfig, d: [f64; 3]) -> [f64; 3] {
    let r = rotation_matrix(pose.rotation_rpy_deg);
    mat_t_mul(&r, d)
}

/// Loads and validates a scene config file.
pub fn load_scene_config<T: Real>(path: &Path) -> Result<Scene<T>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::io(format!("read {}", path.display()), e))?;
    SceneConfig::parse(&text)?.into_scene()
}

/// Loads the raw config (for override editing before validation).
pub fn load_scene_config_raw(path: &Path) -> Result<SceneConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::io(format!("read {}", path.display()), e))?;
    SceneConfig::parse(&text)
}

/// Batch-render job description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobManifest {
    /// Scene config path, relative to the manifest file.
    pub scene: PathBuf,
    /// Explicit albedo/depth pairs; alternative to `input_dir`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<InputPair>,
    /// Directory scanned for `<stem>_albedo.png` plus `<stem>_depth.png`
    /// or `<stem>_depth.pfm` pairs, processed in stem order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
    #[serde(default = "default_depth_scale")]
    pub depth_scale_m_per_unit: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub overrides: Overrides,
}

fn default_depth_scale() -> f64 {
    0.001
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPair {
    pub albedo: PathBuf,
    pub depth: PathBuf,
}

/// Scene-setting overrides applied to the raw config before validation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Overrides {
    pub gain: Option<f64>,
    pub n_slabs: Option<u32>,
    pub d_max_m: Option<f64>,
    pub lut_downsample: Option<u32>,
    pub fs_coeff_px_per_m: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut SceneConfig) {
        if let Some(v) = self.gain {
            cfg.settings.gain = v;
        }
        if let Some(v) = self.n_slabs {
            cfg.settings.n_slabs = v;
        }
        if let Some(v) = self.d_max_m {
            cfg.settings.d_max_m = v;
        }
        if let Some(v) = self.lut_downsample {
            cfg.settings.lut_downsample = v;
        }
        if let Some(v) = self.fs_coeff_px_per_m {
            cfg.settings.fs_coeff_px_per_m = v;
        }
    }
}

impl JobManifest {
    /// Parses a manifest and resolves all paths relative to its location,
    /// requiring them to exist.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::io(format!("read {}", path.display()), e))?;
        let mut manifest: JobManifest =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("manifest: {e}")))?;
        let base = path.parent().unwrap_or(Path::new("."));
        manifest.scene = base.join(&manifest.scene);
        if !manifest.scene.is_file() {
            return Err(Error::Config(format!(
                "manifest scene not found: {}",
                manifest.scene.display()
            )));
        }
        for pair in &mut manifest.inputs {
            pair.albedo = base.join(&pair.albedo);
            pair.depth = base.join(&pair.depth);
            for p in [&pair.albedo, &pair.depth] {
                if !p.is_file() {
                    return Err(Error::Config(format!("input not found: {}", p.display())));
                }
            }
        }
        if let Some(dir) = &manifest.input_dir {
            manifest.input_dir = Some(base.join(dir));
        }
        manifest.output_dir = base.join(&manifest.output_dir);
        Ok(manifest)
    }

    /// Final ordered list of albedo/depth pairs.
    pub fn resolve_inputs(&self) -> Result<Vec<InputPair>> {
        let mut pairs = self.inputs.clone();
        if let Some(dir) = &self.input_dir {
            let entries = fs::read_dir(dir)
                .map_err(|e| Error::io(format!("read dir {}", dir.display()), e))?;
            let mut stems: Vec<String> = Vec::new();
            for entry in entries {
                let entry = entry.map_err(|e| Error::io("read dir entry", e))?;
                let name = entry.file_name().to_string_lossy().into_owned();
                if let Some(stem) = name.strip_suffix("_albedo.png") {
                    stems.push(stem.to_string());
                }
            }
            stems.sort();
            for stem in stems {
                let albedo = dir.join(format!("{stem}_albedo.png"));
                let png = dir.join(format!("{stem}_depth.png"));
                let pfm = dir.join(format!("{stem}_depth.pfm"));
                let depth = if png.is_file() {
                    png
                } else if pfm.is_file() {
                    pfm
                } else {
                    return Err(Error::Config(format!(
                        "no depth map for {}",
                        albedo.display()
                    )));
                };
                pairs.push(InputPair { albedo, depth });
            }
        }
        if pairs.is_empty() {
            return Err(Error::Config(
                "manifest has no inputs (set inputs or input_dir)".into(),
            ));
        }
        Ok(pairs)
    }
}
