//! Physically based deep-sea image formation.
//!
//! Converts in-air RGB-D frames into underwater images as seen by a camera
//! rig carrying its own spotlights in otherwise total darkness. The model
//! splits irradiance into three components:
//!
//! * **direct signal** - light to surface to camera, with per-channel beam
//!   attenuation, spotlight angular fall-off and Lambertian reflection
//!   ([`radiometry`]);
//! * **forward scattering** - small-angle scatter approximated by a
//!   depth-dependent Gaussian blur of the direct signal ([`pipeline`]);
//! * **backscatter** - the water column glowing back at the camera,
//!   integrated over frustum-aligned slabs and precomputed into a 3D lookup
//!   table that stays valid while the camera-light rig is rigid
//!   ([`backscatter`]).
//!
//! A fog-model baseline (`J e^{-eta d} + B (1 - e^{-eta d})`) is included
//! for comparison with shallow-water simulators.
//!
//! All core math is generic over the scalar type through [`Real`]
//! (`f32` or `f64`); the aliases below fix the common instantiations.

pub mod backscatter;
pub mod config;
pub mod error;
pub mod formats;
pub mod image;
pub mod math;
pub mod pipeline;
pub mod radiometry;
pub mod real;
pub mod scene;
pub mod spectrum;

pub use error::{Error, Result};
pub use real::{real, Real};

/// Working-precision aliases. The CLI and shipped tools use the `f64`
/// family; `f32` halves LUT memory when precision is less of a concern.
pub type Vec3f32 = math::Vec3<f32>;
pub type Vec3f64 = math::Vec3<f64>;
pub type Spectrum32 = spectrum::Spectrum<f32>;
pub type Spectrum64 = spectrum::Spectrum<f64>;
pub type Scene32 = scene::Scene<f32>;
pub type Scene64 = scene::Scene<f64>;
pub type FrameInput32 = scene::FrameInput<f32>;
pub type FrameInput64 = scene::FrameInput<f64>;
pub type BackscatterLut32 = backscatter::BackscatterLut<f32>;
pub type BackscatterLut64 = backscatter::BackscatterLut<f64>;
pub type RenderedFrame32 = pipeline::RenderedFrame<f32>;
pub type RenderedFrame64 = pipeline::RenderedFrame<f64>;
