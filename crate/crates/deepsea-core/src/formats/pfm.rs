//! Portable FloatMap (PFM) reader/writer.
//!
//! `Pf` is single-channel, `PF` three-channel. The scale token's sign gives
//! the byte order (negative = little-endian); rows are stored bottom-up.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::ImageBuf;
use crate::real::{real, to_f64, Real};
use crate::spectrum::Spectrum;

fn read_token(r: &mut impl Read, path: &Path) -> Result<String> {
    let mut token = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        r.read_exact(&mut byte)
            .map_err(|e| Error::io(format!("read {}", path.display()), e))?;
        if byte[0].is_ascii_whitespace() {
            if token.is_empty() {
                continue;
            }
            break;
        }
        token.push(byte[0]);
    }
    String::from_utf8(token)
        .map_err(|_| Error::UnsupportedImage(format!("{}: non-ASCII PFM header", path.display())))
}

struct PfmHeader {
    color: bool,
    width: u32,
    height: u32,
    little_endian: bool,
}

fn read_header(r: &mut impl Read, path: &Path) -> Result<PfmHeader> {
    let magic = read_token(r, path)?;
    let color = match magic.as_str() {
        "PF" => true,
        "Pf" => false,
        other => {
            return Err(Error::UnsupportedImage(format!(
                "{}: not a PFM file (magic {other:?})",
                path.display()
            )))
        }
    };
    let parse = |tok: String, what: &str| -> Result<f64> {
        tok.parse::<f64>().map_err(|_| {
            Error::UnsupportedImage(format!("{}: bad PFM {what} {tok:?}", path.display()))
        })
    };
    let width = parse(read_token(r, path)?, "width")? as u32;
    let height = parse(read_token(r, path)?, "height")? as u32;
    let scale = parse(read_token(r, path)?, "scale")?;
    if width == 0 || height == 0 {
        return Err(Error::UnsupportedImage(format!(
            "{}: empty PFM image",
            path.display()
        )));
    }
    Ok(PfmHeader {
        color,
        width,
        height,
        little_endian: scale < 0.0,
    })
}

fn read_samples(
    r: &mut impl Read,
    header: &PfmHeader,
    channels: usize,
    path: &Path,
) -> Result<Vec<f32>> {
    let count = header.width as usize * header.height as usize * channels;
    let mut bytes = vec![0u8; count * 4];
    r.read_exact(&mut bytes)
        .map_err(|e| Error::io(format!("read {}", path.display()), e))?;
    Ok(bytes
        .chunks_exact(4)
        .map(|c| {
            let raw = [c[0], c[1], c[2], c[3]];
            if header.little_endian {
                f32::from_le_bytes(raw)
            } else {
                f32::from_be_bytes(raw)
            }
        })
        .collect())
}

/// Bottom-up source row for output row `v`.
#[inline]
fn src_row(height: u32, v: u32) -> usize {
    (height - 1 - v) as usize
}

/// Reads a single-channel PFM as a scalar image (e.g. depth in meters).
pub fn read_pfm_gray<T: Real>(path: &Path) -> Result<ImageBuf<T>> {
    let file = File::open(path).map_err(|e| Error::io(format!("open {}", path.display()), e))?;
    let mut r = BufReader::new(file);
    let header = read_header(&mut r, path)?;
    if header.color {
        return Err(Error::UnsupportedImage(format!(
            "{}: expected grayscale PFM, found color",
            path.display()
        )));
    }
    let samples = read_samples(&mut r, &header, 1, path)?;
    let w = header.width as usize;
    let mut data = Vec::with_capacity(samples.len());
    for v in 0..header.height {
        let row = src_row(header.height, v);
        for u in 0..w {
            data.push(real::<T>(samples[row * w + u] as f64));
        }
    }
    Ok(ImageBuf::from_raw(header.width, header.height, data))
}

/// Reads a three-channel PFM as a spectrum image.
pub fn read_pfm_rgb<T: Real>(path: &Path) -> Result<ImageBuf<Spectrum<T>>> {
    let file = File::open(path).map_err(|e| Error::io(format!("open {}", path.display()), e))?;
    let mut r = BufReader::new(file);
    let header = read_header(&mut r, path)?;
    if !header.color {
        return Err(Error::UnsupportedImage(format!(
            "{}: expected color PFM, found grayscale",
            path.display()
        )));
    }
    let samples = read_samples(&mut r, &header, 3, path)?;
    let w = header.width as usize;
    let mut data = Vec::with_capacity(w * header.height as usize);
    for v in 0..header.height {
        let row = src_row(header.height, v);
        for u in 0..w {
            let base = (row * w + u) * 3;
            data.push(Spectrum::new(
                real::<T>(samples[base] as f64),
                real::<T>(samples[base + 1] as f64),
                real::<T>(samples[base + 2] as f64),
            ));
        }
    }
    Ok(ImageBuf::from_raw(header.width, header.height, data))
}

fn write_pfm(
    path: &Path,
    magic: &str,
    width: u32,
    height: u32,
    rows: impl Fn(u32, &mut Vec<u8>),
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(format!("create {}", path.display()), e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(format!("write {}", path.display()), e);
    write!(w, "{magic}\n{width} {height}\n-1.0\n").map_err(io_err)?;
    let mut buf = Vec::new();
    // PFM stores rows bottom-up.
    for v in (0..height).rev() {
        buf.clear();
        rows(v, &mut buf);
        w.write_all(&buf).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Writes a scalar image as grayscale PFM (little-endian).
pub fn write_pfm_gray<T: Real>(img: &ImageBuf<T>, path: &Path) -> Result<()> {
    write_pfm(path, "Pf", img.width(), img.height(), |v, buf| {
        for u in 0..img.width() {
            buf.extend_from_slice(&(to_f64(*img.get(u, v)) as f32).to_le_bytes());
        }
    })
}

/// Writes a spectrum image as color PFM (little-endian).
pub fn write_pfm_rgb<T: Real>(img: &ImageBuf<Spectrum<T>>, path: &Path) -> Result<()> {
    write_pfm(path, "PF", img.width(), img.height(), |v, buf| {
        for u in 0..img.width() {
            for c in img.get(u, v).channels() {
                buf.extend_from_slice(&(to_f64(c) as f32).to_le_bytes());
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn gray_roundtrip_preserves_values_and_orientation() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("depth.pfm");
        let mut img = ImageBuf::filled(3, 2, 0.0f64);
        for (i, p) in img.as_mut_slice().iter_mut().enumerate() {
            *p = i as f64 * 0.5 + 0.25;
        }
        write_pfm_gray(&img, &path).unwrap();
        let back: ImageBuf<f64> = read_pfm_gray(&path).unwrap();
        assert_eq!(back.dims(), (3, 2));
        for (a, b) in img.as_slice().iter().zip(back.as_slice()) {
            assert_eq!(*a as f32, *b as f32);
            assert_eq!(*a, *b); // values chosen exactly representable in f32
        }
    }

    #[test]
    fn rgb_roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.pfm");
        let mut img = ImageBuf::filled(2, 2, Spectrum::<f64>::zero());
        *img.get_mut(0, 0) = Spectrum::new(1.0, 0.5, 0.25);
        *img.get_mut(1, 1) = Spectrum::new(0.125, 2.0, 4.0);
        write_pfm_rgb(&img, &path).unwrap();
        let back: ImageBuf<Spectrum<f64>> = read_pfm_rgb(&path).unwrap();
        assert_eq!(img, back);
    }

    #[test]
    fn rejects_wrong_magic() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.pfm");
        std::fs::write(&path, b"P6\n1 1\n255\n\x00\x00\x00").unwrap();
        assert!(read_pfm_gray::<f64>(&path).is_err());
    }

    #[test]
    fn gray_and_color_are_not_interchangeable() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.pfm");
        let img = ImageBuf::filled(2, 2, Spectrum::<f64>::splat(1.0));
        write_pfm_rgb(&img, &path).unwrap();
        assert!(read_pfm_gray::<f64>(&path).is_err());
    }
}
