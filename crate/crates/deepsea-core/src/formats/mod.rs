//! Image codecs and RGB-D loading: 8-bit sRGB albedo PNGs, 16-bit PNG or
//! PFM depth maps, PNG output and PFM debug components.

pub mod pfm;

use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageBuffer, Rgb};

use crate::error::{Error, Result};
use crate::image::ImageBuf;
use crate::pipeline::RenderedFrame;
use crate::real::{real, Real};
use crate::scene::FrameInput;
use crate::spectrum::Spectrum;

/// How depth maps are encoded on disk. The invalid-depth sentinel is `0` in
/// both encodings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DepthEncoding {
    /// Grayscale PFM carrying raw meters.
    Pfm,
    /// 16-bit grayscale PNG; `scale_m_per_unit` meters per integer step
    /// (e.g. 0.001 for millimeter depth).
    Png16 { scale_m_per_unit: f64 },
}

impl DepthEncoding {
    /// Picks the encoding from the file extension: `.pfm` is PFM, anything
    /// else is 16-bit PNG with the given scale.
    pub fn for_path(path: &Path, scale_m_per_unit: f64) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("pfm") => DepthEncoding::Pfm,
            _ => DepthEncoding::Png16 { scale_m_per_unit },
        }
    }
}

/// sRGB electro-optical transfer function for one 8-bit channel.
#[inline]
pub fn srgb8_to_linear(v: u8) -> f64 {
    let c = v as f64 / 255.0;
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

/// Loads an 8-bit albedo PNG and linearizes it (inputs are assumed
/// sRGB-encoded; gray images are replicated across channels, alpha dropped).
pub fn load_albedo<T: Real>(path: &Path) -> Result<ImageBuf<Spectrum<T>>> {
    let img = image::open(path).map_err(|e| {
        Error::UnsupportedImage(format!("{}: {e}", path.display()))
    })?;
    let rgb = match img {
        DynamicImage::ImageRgb8(i) => i,
        DynamicImage::ImageRgba8(i) => DynamicImage::ImageRgba8(i).to_rgb8(),
        DynamicImage::ImageLuma8(i) => DynamicImage::ImageLuma8(i).to_rgb8(),
        DynamicImage::ImageLumaA8(i) => DynamicImage::ImageLumaA8(i).to_rgb8(),
        other => {
            return Err(Error::UnsupportedImage(format!(
                "{}: albedo must be 8-bit (got {:?})",
                path.display(),
                other.color()
            )))
        }
    };
    let (w, h) = rgb.dimensions();
    let data = rgb
        .pixels()
        .map(|p| {
            Spectrum::new(
                real::<T>(srgb8_to_linear(p[0])),
                real::<T>(srgb8_to_linear(p[1])),
                real::<T>(srgb8_to_linear(p[2])),
            )
        })
        .collect();
    Ok(ImageBuf::from_raw(w, h, data))
}

/// Loads a depth map to meters; `0` stays the invalid sentinel.
pub fn load_depth<T: Real>(path: &Path, encoding: DepthEncoding) -> Result<ImageBuf<T>> {
    match encoding {
        DepthEncoding::Pfm => pfm::read_pfm_gray(path),
        DepthEncoding::Png16 { scale_m_per_unit } => {
            if !(scale_m_per_unit.is_finite() && scale_m_per_unit > 0.0) {
                return Err(Error::Config(format!(
                    "depth scale must be > 0, got {scale_m_per_unit}"
                )));
            }
            let img = image::open(path).map_err(|e| {
                Error::UnsupportedImage(format!("{}: {e}", path.display()))
            })?;
            let gray = match img {
                DynamicImage::ImageLuma16(i) => i,
                other => {
                    return Err(Error::UnsupportedImage(format!(
                        "{}: depth PNG must be 16-bit grayscale (got {:?})",
                        path.display(),
                        other.color()
                    )))
                }
            };
            let (w, h) = gray.dimensions();
            let data = gray
                .pixels()
                .map(|p| real::<T>(p[0] as f64 * scale_m_per_unit))
                .collect();
            Ok(ImageBuf::from_raw(w, h, data))
        }
    }
}

/// Loads an albedo/depth pair into a validated frame.
pub fn load_rgbd<T: Real>(
    albedo_path: &Path,
    depth_path: &Path,
    encoding: DepthEncoding,
) -> Result<FrameInput<T>> {
    let albedo = load_albedo(albedo_path)?;
    let depth = load_depth(depth_path, encoding)?;
    if albedo.dims() != depth.dims() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "{} vs {}",
                albedo_path.display(),
                depth_path.display()
            ),
            expected_w: albedo.width(),
            expected_h: albedo.height(),
            got_w: depth.width(),
            got_h: depth.height(),
        });
    }
    FrameInput::new(albedo, depth)
}

/// Writes an 8-bit RGB image as PNG.
pub fn save_png_rgb8(img: &ImageBuf<[u8; 3]>, path: &Path) -> Result<()> {
    let (w, h) = img.dims();
    let flat: Vec<u8> = img.as_slice().iter().flatten().copied().collect();
    let buf: ImageBuffer<Rgb<u8>, Vec<u8>> =
        ImageBuffer::from_raw(w, h, flat).expect("buffer sized from image dims");
    buf.save(path)
        .map_err(|e| Error::UnsupportedImage(format!("write {}: {e}", path.display())))
}

/// Path for a debug component next to the main output:
/// `out/frame.png` -> `out/frame_direct.pfm` and friends.
pub fn component_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("frame");
    out.with_file_name(format!("{stem}_{suffix}.pfm"))
}

/// Writes the tone-mapped output and, when the frame kept its components,
/// the linear direct/forward/backscatter images as PFM companions.
pub fn save_rendered_frame<T: Real>(frame: &RenderedFrame<T>, out: &Path) -> Result<()> {
    save_png_rgb8(&frame.output, out)?;
    if let Some(c) = &frame.components {
        pfm::write_pfm_rgb(&c.direct, &component_path(out, "direct"))?;
        pfm::write_pfm_rgb(&c.forward, &component_path(out, "forward"))?;
        pfm::write_pfm_rgb(&c.backscatter, &component_path(out, "backscatter"))?;
        pfm::write_pfm_rgb(&frame.linear, &component_path(out, "linear"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{GrayImage, Luma, RgbImage};
    use tempfile::tempdir;

    #[test]
    fn srgb_endpoints_and_midpoint() {
        assert_eq!(srgb8_to_linear(0), 0.0);
        assert_eq!(srgb8_to_linear(255), 1.0);
        assert!((srgb8_to_linear(128) - 0.215860500114).abs() < 1e-9);
        assert!((srgb8_to_linear(10) - 0.00303526983549).abs() < 1e-12);
    }

    #[test]
    fn png16_depth_scales_and_keeps_sentinel() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("d.png");
        let mut img = ImageBuffer::<Luma<u16>, Vec<u16>>::new(3, 1);
        img.put_pixel(0, 0, Luma([0]));
        img.put_pixel(1, 0, Luma([1000]));
        img.put_pixel(2, 0, Luma([65535]));
        img.save(&path).unwrap();
        let depth: ImageBuf<f64> = load_depth(
            &path,
            DepthEncoding::Png16 {
                scale_m_per_unit: 0.001,
            },
        )
        .unwrap();
        assert_eq!(*depth.get(0, 0), 0.0);
        assert!((*depth.get(1, 0) - 1.0).abs() < 1e-12);
        assert!((*depth.get(2, 0) - 65.535).abs() < 1e-12);
    }

    #[test]
    fn eight_bit_depth_png_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("d8.png");
        GrayImage::new(2, 2).save(&path).unwrap();
        let err = load_depth::<f64>(
            &path,
            DepthEncoding::Png16 {
                scale_m_per_unit: 0.001,
            },
        )
        .unwrap_err();
        assert!(err.to_string().contains("16-bit"), "{err}");
    }

    #[test]
    fn albedo_decodes_srgb_and_range() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("a.png");
        let mut img = RgbImage::new(2, 1);
        img.put_pixel(0, 0, image::Rgb([255, 0, 128]));
        img.put_pixel(1, 0, image::Rgb([1, 2, 3]));
        img.save(&path).unwrap();
        let albedo: ImageBuf<Spectrum<f64>> = load_albedo(&path).unwrap();
        let p = albedo.get(0, 0);
        assert_eq!(p.r, 1.0);
        assert_eq!(p.g, 0.0);
        assert!((p.b - srgb8_to_linear(128)).abs() < 1e-15);
    }

    #[test]
    fn rgbd_pair_dimensions_must_match() {
        let dir = tempdir().unwrap();
        let a = dir.path().join("a.png");
        let d = dir.path().join("d.png");
        RgbImage::new(4, 2).save(&a).unwrap();
        ImageBuffer::<Luma<u16>, Vec<u16>>::new(4, 3).save(&d).unwrap();
        let err = load_rgbd::<f64>(
            &a,
            &d,
            DepthEncoding::Png16 {
                scale_m_per_unit: 0.001,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn png_roundtrip_is_lossless() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("o.png");
        let mut img = ImageBuf::filled(3, 2, [0u8; 3]);
        for (i, p) in img.as_mut_slice().iter_mut().enumerate() {
            *p = [i as u8 * 40, 255 - i as u8 * 30, i as u8];
        }
        save_png_rgb8(&img, &path).unwrap();
        let back = image::open(&path).unwrap().to_rgb8();
        for v in 0..2 {
            for u in 0..3 {
                assert_eq!(back.get_pixel(u, v).0, *img.get(u, v));
            }
        }
    }

    #[test]
    fn component_paths_carry_suffixes() {
        let p = component_path(Path::new("/tmp/out/frame01.png"), "direct");
        assert_eq!(p, Path::new("/tmp/out/frame01_direct.pfm"));
    }

    #[test]
    fn write_to_unwritable_path_fails() {
        let img = ImageBuf::filled(1, 1, [0u8; 3]);
        let err = save_png_rgb8(&img, Path::new("/nonexistent-dir/x.png"));
        assert!(err.is_err());
    }

    #[test]
    fn depth_encoding_picked_from_extension() {
        assert_eq!(
            DepthEncoding::for_path(Path::new("x.PFM"), 0.001),
            DepthEncoding::Pfm
        );
        assert_eq!(
            DepthEncoding::for_path(Path::new("x.png"), 0.002),
            DepthEncoding::Png16 {
                scale_m_per_unit: 0.002
            }
        );
    }
}
