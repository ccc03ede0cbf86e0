//! File formats: sinograms, 16-bit PGM images and their JSON sidecars.
//!
//! # Sinogram, version 1
//!
//! Six UTF-8 header lines, each `key=value` and terminated by `\n`, in this order:
//!
//! ```text
//! format=sinogram-v1
//! family=<family name>
//! kind=plain | attenuated
//! ntheta=<angles>
//! ns=<transverse samples>
//! srange=<s_lo> <s_hi>
//! ```
//!
//! followed immediately by `ntheta·ns` IEEE-754 binary64 values, little-endian,
//! row-major (row `k` holds angle `θ_k = 2πk/ntheta`, column `j` the node
//! `s_j` of `ns` uniform nodes on `[s_lo, s_hi]`). Numbers in the header use
//! the shortest decimal form that reads back to the same binary64 value.
//!
//! # Images
//!
//! Binary PGM (`P5`) with maxval 65535, big-endian samples, top row (largest
//! `y`) first. Pixel `p` encodes `min + (max − min)·p/65535`; `min` and `max`
//! are recorded in the JSON sidecar next to the grid, the mask and, when a
//! reference density was given, the error metrics.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inversion::ReconImage;
use crate::phantom::ErrorMetrics;
use crate::scalar::Real;
use crate::transforms::{SGrid, Sinogram, SinogramKind};

pub const SINOGRAM_FORMAT: &str = "sinogram-v1";
const PGM_MAXVAL: u16 = u16::MAX;

/// Serializes a sinogram in the version-1 layout.
pub fn write_sinogram_to<T: Real, W: Write>(sino: &Sinogram<T>, mut out: W) -> Result<()> {
    let grid = sino.grid();
    write!(
        out,
        "format={SINOGRAM_FORMAT}\nfamily={}\nkind={}\nntheta={}\nns={}\nsrange={:?} {:?}\n",
        sino.family(),
        sino.kind().as_str(),
        grid.ntheta(),
        grid.ns(),
        grid.s_lo().as_f64(),
        grid.s_hi().as_f64()
    )?;
    for value in sino.values() {
        out.write_all(&value.as_f64().to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_sinogram<T: Real>(sino: &Sinogram<T>, path: &Path) -> Result<()> {
    write_sinogram_to(sino, BufWriter::new(File::create(path)?))
}

/// Grid data the file does not carry.
#[derive(Clone, Copy, Debug)]
pub struct SinogramContext<T> {
    pub cover_radius: T,
    pub t_intervals: usize,
}

fn header_line<R: BufRead>(input: &mut R, key: &str) -> Result<String> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    let line = line
        .strip_suffix('\n')
        .ok_or_else(|| Error::Format(format!("header line `{key}` is truncated")))?;
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .map(str::to_string)
        .ok_or_else(|| Error::Format(format!("expected header `{key}=`, found `{line}`")))
}

fn parse_number<N: std::str::FromStr>(key: &str, text: &str) -> Result<N> {
    text.trim()
        .parse()
        .map_err(|_| Error::Format(format!("header `{key}` has unreadable value `{text}`")))
}

/// Parses a version-1 sinogram.
///
/// # Errors
/// `Format` for a malformed header or a payload of the wrong length;
/// `InvalidGrid` if the header describes an invalid grid.
pub fn read_sinogram_from<T: Real, R: Read>(input: R, context: SinogramContext<T>) -> Result<Sinogram<T>> {
    let mut input = BufReader::new(input);
    let format = header_line(&mut input, "format")?;
    if format != SINOGRAM_FORMAT {
        return Err(Error::Format(format!("unsupported sinogram format `{format}`")));
    }
    let family = header_line(&mut input, "family")?;
    let kind = match header_line(&mut input, "kind")?.as_str() {
        "plain" => SinogramKind::Plain,
        "attenuated" => SinogramKind::Attenuated,
        other => return Err(Error::Format(format!("unknown sinogram kind `{other}`"))),
    };
    let ntheta: usize = parse_number("ntheta", &header_line(&mut input, "ntheta")?)?;
    let ns: usize = parse_number("ns", &header_line(&mut input, "ns")?)?;
    let range = header_line(&mut input, "srange")?;
    let (lo, hi) = range
        .split_once(' ')
        .ok_or_else(|| Error::Format(format!("srange `{range}` needs two values")))?;
    let (s_lo, s_hi): (f64, f64) = (parse_number("srange", lo)?, parse_number("srange", hi)?);
    let grid = SGrid::new(ntheta, ns, T::lit(s_lo), T::lit(s_hi), context.t_intervals, context.cover_radius)?;
    let mut payload = Vec::new();
    input.read_to_end(&mut payload)?;
    let expected = ntheta * ns * 8;
    if payload.len() != expected {
        return Err(Error::Format(format!(
            "sinogram payload has {} bytes, expected {expected}",
            payload.len()
        )));
    }
    let values = payload
        .chunks_exact(8)
        .map(|bytes| T::lit(f64::from_le_bytes(bytes.try_into().expect("chunks of eight bytes"))))
        .collect();
    Sinogram::new(grid, values, kind, &family)
}

pub fn read_sinogram<T: Real>(path: &Path, context: SinogramContext<T>) -> Result<Sinogram<T>> {
    read_sinogram_from(File::open(path)?, context)
}

/// Linear map between stored samples and image values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PgmMapping {
    pub min: f64,
    pub max: f64,
}

impl PgmMapping {
    fn of<T: Real>(image: &ReconImage<T>) -> Self {
        let (min, max) = image
            .values()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v.as_f64()), hi.max(v.as_f64()))
            });
        Self { min, max }
    }

    pub fn encode(&self, value: f64) -> u16 {
        if !(self.max > self.min) {
            return 0;
        }
        let scaled = (value - self.min) / (self.max - self.min) * f64::from(PGM_MAXVAL);
        scaled.round().clamp(0.0, f64::from(PGM_MAXVAL)) as u16
    }

    pub fn decode(&self, sample: u16) -> f64 {
        self.min + (self.max - self.min) * f64::from(sample) / f64::from(PGM_MAXVAL)
    }
}

/// Writes `image` as a 16-bit PGM and returns the value mapping used.
pub fn write_pgm_to<T: Real, W: Write>(image: &ReconImage<T>, mut out: W) -> Result<PgmMapping> {
    let n = image.n();
    let mapping = PgmMapping::of(image);
    write!(out, "P5\n{n} {n}\n{PGM_MAXVAL}\n")?;
    for row in (0..n).rev() {
        for value in &image.values()[row * n..(row + 1) * n] {
            out.write_all(&mapping.encode(value.as_f64()).to_be_bytes())?;
        }
    }
    out.flush()?;
    Ok(mapping)
}

pub fn write_pgm<T: Real>(image: &ReconImage<T>, path: &Path) -> Result<PgmMapping> {
    write_pgm_to(image, BufWriter::new(File::create(path)?))
}

/// Reads a 16-bit PGM written by [`write_pgm`]: width, height and samples in file order.
pub fn read_pgm_from<R: Read>(input: R) -> Result<(usize, usize, Vec<u16>)> {
    let mut input = BufReader::new(input);
    let mut header = Vec::new();
    // Magic, dimensions and maxval occupy three newline-terminated lines.
    for _ in 0..3 {
        let mut line = String::new();
        input.read_line(&mut line)?;
        header.push(line.trim().to_string());
    }
    if header[0] != "P5" {
        return Err(Error::Format(format!("not a binary PGM: magic `{}`", header[0])));
    }
    let (width, height) = header[1]
        .split_once(' ')
        .ok_or_else(|| Error::Format(format!("bad PGM dimensions `{}`", header[1])))?;
    let (width, height): (usize, usize) = (parse_number("width", width)?, parse_number("height", height)?);
    if parse_number::<u32>("maxval", &header[2])? != u32::from(PGM_MAXVAL) {
        return Err(Error::Format("only 16-bit PGM images are supported".into()));
    }
    let mut payload = Vec::new();
    input.read_to_end(&mut payload)?;
    if payload.len() != width * height * 2 {
        return Err(Error::Format(format!("PGM payload has {} bytes, expected {}", payload.len(), width * height * 2)));
    }
    let samples = payload.chunks_exact(2).map(|pair| u16::from_be_bytes([pair[0], pair[1]])).collect();
    Ok((width, height, samples))
}

pub fn read_pgm(path: &Path) -> Result<(usize, usize, Vec<u16>)> {
    read_pgm_from(File::open(path)?)
}

/// Metadata written next to an image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageSidecar {
    pub image: String,
    pub family: String,
    pub command: String,
    /// Pixels per side; centres at `−1 + (i + ½)·2/n`.
    pub n: usize,
    /// Pixels with `|z| > 1 − delta` are zero.
    pub delta: f64,
    pub masked_pixels: usize,
    pub mapping: PgmMapping,
    pub ntheta: usize,
    pub ns: usize,
    pub lambda_choice: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub metrics: Option<Metrics>,
}

/// Serializable copy of [`ErrorMetrics`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub l2_rel: f64,
    pub linf_rel: f64,
}

impl From<ErrorMetrics> for Metrics {
    fn from(metrics: ErrorMetrics) -> Self {
        Self {
            l2_rel: metrics.l2_rel,
            linf_rel: metrics.linf_rel,
        }
    }
}

pub fn write_json<S: Serialize>(value: &S, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HyperbolicGeodesics;
    use crate::phantom::Phantom;
    use crate::transforms::ray_transform;

    fn context() -> SinogramContext<f64> {
        SinogramContext {
            cover_radius: 0.975,
            t_intervals: 256,
        }
    }

    #[test]
    fn sinogram_round_trip_is_exact() {
        let grid = SGrid::for_family(&HyperbolicGeodesics, 8, 33, 0.05).unwrap().with_t_intervals(256).unwrap();
        let sino = ray_transform(&Phantom::<f64>::default_gaussian(), &HyperbolicGeodesics, &grid).unwrap();
        let mut bytes = Vec::new();
        write_sinogram_to(&sino, &mut bytes).unwrap();
        let back: Sinogram<f64> = read_sinogram_from(bytes.as_slice(), context()).unwrap();
        assert_eq!(back.values(), sino.values());
        assert_eq!(back.family(), "hyperbolic-geodesics");
        assert_eq!(back.grid().s_nodes(), sino.grid().s_nodes());
    }

    #[test]
    fn header_layout_is_fixed() {
        let grid = SGrid::new(4, 9, -0.5, 0.5, 16, 0.6).unwrap();
        let sino = Sinogram::new(grid, vec![0.0; 36], SinogramKind::Attenuated, "x").unwrap();
        let mut bytes = Vec::new();
        write_sinogram_to(&sino, &mut bytes).unwrap();
        let header = "format=sinogram-v1\nfamily=x\nkind=attenuated\nntheta=4\nns=9\nsrange=-0.5 0.5\n";
        assert!(bytes.starts_with(header.as_bytes()));
        assert_eq!(bytes.len(), header.len() + 36 * 8);
    }

    #[test]
    fn malformed_sinograms_are_format_errors() {
        let truncated = b"format=sinogram-v1\nfamily=x\nkind=plain\nntheta=4\nns=9\nsrange=-0.5 0.5\n\0\0";
        assert!(matches!(read_sinogram_from(&truncated[..], context()), Err(Error::Format(_))));
        let wrong = b"format=sinogram-v2\n";
        assert!(matches!(read_sinogram_from(&wrong[..], context()), Err(Error::Format(_))));
        let kind = b"format=sinogram-v1\nfamily=x\nkind=dense\n";
        assert!(matches!(read_sinogram_from(&kind[..], context()), Err(Error::Format(_))));
    }

    #[test]
    fn pgm_round_trip_within_one_quantum() {
        let phantom = Phantom::<f64>::default_gaussian();
        let image = phantom.rasterize(16, 0.05).unwrap();
        let mut bytes = Vec::new();
        let mapping = write_pgm_to(&image, &mut bytes).unwrap();
        let (width, height, samples) = read_pgm_from(bytes.as_slice()).unwrap();
        assert_eq!((width, height), (16, 16));
        let quantum = (mapping.max - mapping.min) / 65535.0;
        for row in 0..16 {
            for col in 0..16 {
                let stored = mapping.decode(samples[(15 - row) * 16 + col]);
                assert!((stored - image.values()[row * 16 + col]).abs() <= quantum);
            }
        }
    }

    #[test]
    fn constant_image_maps_to_zero() {
        let image = ReconImage::<f64>::empty(4, 0.05).unwrap();
        let mut bytes = Vec::new();
        let mapping = write_pgm_to(&image, &mut bytes).unwrap();
        assert_eq!(mapping, PgmMapping { min: 0.0, max: 0.0 });
        assert!(bytes.ends_with(&[0; 32]));
    }
}
