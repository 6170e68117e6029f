//! Binary cache for precomputed backscatter LUTs.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic        6 bytes  "DSLUT1"
//! image_w      u32      frame width the LUT was built for
//! image_h      u32
//! downsample   u32
//! cell_w       u32
//! cell_h       u32
//! n_slabs      u32
//! d_max        f64      slab-sampling maximum distance, meters
//! scene_hash   u64      Scene::content_hash at build time
//! cells        cell_w * cell_h * n_slabs * 3 x f32   (r, g, b per cell,
//!              slab-major within each cell, row-major over cells)
//! ```
//!
//! A cache is only accepted when its scene hash matches the current scene.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{slab_thicknesses, BackscatterLut};
use crate::error::{Error, Result};
use crate::real::{real, to_f64, Real};
use crate::scene::Scene;
use crate::spectrum::Spectrum;

const MAGIC: &[u8; 6] = b"DSLUT1";

/// Parsed cache header.
#[derive(Clone, Copy, Debug)]
pub struct LutInfo {
    pub image_w: u32,
    pub image_h: u32,
    pub downsample: u32,
    pub cell_w: u32,
    pub cell_h: u32,
    pub n_slabs: u32,
    pub d_max: f64,
    pub scene_hash: u64,
}

pub fn save_lut<T: Real>(lut: &BackscatterLut<T>, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(format!("create {}", path.display()), e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(format!("write {}", path.display()), e);
    w.write_all(MAGIC).map_err(io_err)?;
    for v in [
        lut.image_w,
        lut.image_h,
        lut.downsample,
        lut.cell_w,
        lut.cell_h,
        lut.sampling.n_slabs(),
    ] {
        w.write_all(&v.to_le_bytes()).map_err(io_err)?;
    }
    w.write_all(&to_f64(lut.sampling.d_max()).to_le_bytes())
        .map_err(io_err)?;
    w.write_all(&lut.scene_hash.to_le_bytes()).map_err(io_err)?;
    let mut buf = Vec::with_capacity(lut.cells.len() * 12);
    for cell in &lut.cells {
        for c in cell.channels() {
            buf.extend_from_slice(&(to_f64(c) as f32).to_le_bytes());
        }
    }
    w.write_all(&buf).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Reads only the header, without validating against a scene.
pub fn read_lut_info(path: &Path) -> Result<LutInfo> {
    let file = File::open(path).map_err(|e| Error::io(format!("open {}", path.display()), e))?;
    let mut r = BufReader::new(file);
    read_header(&mut r, path)
}

fn read_header(r: &mut impl Read, path: &Path) -> Result<LutInfo> {
    let io_err = |e| Error::io(format!("read {}", path.display()), e);
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC {
        return Err(Error::CorruptLutCache(format!(
            "{}: bad magic {:?}",
            path.display(),
            magic
        )));
    }
    let mut u32s = [0u32; 6];
    for v in &mut u32s {
        let mut b = [0u8; 4];
        r.read_exact(&mut b).map_err(io_err)?;
        *v = u32::from_le_bytes(b);
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8).map_err(io_err)?;
    let d_max = f64::from_le_bytes(b8);
    r.read_exact(&mut b8).map_err(io_err)?;
    let scene_hash = u64::from_le_bytes(b8);
    Ok(LutInfo {
        image_w: u32s[0],
        image_h: u32s[1],
        downsample: u32s[2],
        cell_w: u32s[3],
        cell_h: u32s[4],
        n_slabs: u32s[5],
        d_max,
        scene_hash,
    })
}

/// Loads a cached LUT, accepting it only when its scene hash matches
/// `scene`'s current content hash.
pub fn load_lut<T: Real>(path: &Path, scene: &Scene<T>) -> Result<BackscatterLut<T>> {
    let file = File::open(path).map_err(|e| Error::io(format!("open {}", path.display()), e))?;
    let mut r = BufReader::new(file);
    let info = read_header(&mut r, path)?;
    let scene_hash = scene.content_hash();
    if info.scene_hash != scene_hash {
        return Err(Error::StaleLut {
            lut_hash: info.scene_hash,
            scene_hash,
        });
    }
    if info.n_slabs == 0 || info.cell_w == 0 || info.cell_h == 0 {
        return Err(Error::CorruptLutCache(format!(
            "{}: zero-sized table",
            path.display()
        )));
    }
    let sampling = slab_thicknesses(info.n_slabs, real::<T>(info.d_max))?;
    let count = info.cell_w as usize * info.cell_h as usize * info.n_slabs as usize;
    let mut bytes = vec![0u8; count * 12];
    r.read_exact(&mut bytes)
        .map_err(|e| Error::io(format!("read {}", path.display()), e))?;
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing).map_err(|e| Error::io(format!("read {}", path.display()), e))? != 0 {
        return Err(Error::CorruptLutCache(format!(
            "{}: trailing data",
            path.display()
        )));
    }
    let mut cells = Vec::with_capacity(count);
    for chunk in bytes.chunks_exact(12) {
        let ch = |i: usize| {
            let v = f32::from_le_bytes([chunk[i], chunk[i + 1], chunk[i + 2], chunk[i + 3]]);
            real::<T>(v as f64)
        };
        cells.push(Spectrum::new(ch(0), ch(4), ch(8)));
    }
    Ok(BackscatterLut {
        image_w: info.image_w,
        image_h: info.image_h,
        downsample: info.downsample,
        cell_w: info.cell_w,
        cell_h: info.cell_h,
        sampling,
        scene_hash: info.scene_hash,
        cells,
    })
}
