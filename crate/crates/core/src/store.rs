//! `HOPSSDS1` dataset container.
//!
//! Layout, little-endian throughout:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8 | magic `HOPSSDS1` |
//! | 4 | `u32` manifest length `m` |
//! | m | manifest, canonical JSON (sorted keys, no whitespace) |
//! | … | per sample: `u` frames, then `f` frames, `f64` row-major |
//! | 8 | `u64` sample count sentinel |
//!
//! `f` has one frame for static forcing and `frames − 1` frames for
//! per-interval forcing. There is no padding anywhere.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pair::{Forcing, ForcingLayout, Provenance, SolutionPair};
use crate::pipeline::Generation;
use crate::rng::RNG_SCHEME;
use crate::solver::{PdeSpec, Trajectory};
use crate::spectral::{Field, SpatialGrid};

pub const MAGIC: &[u8; 8] = b"HOPSSDS1";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_FIXED: u64 = 12;
const SENTINEL_LEN: u64 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub pde: PdeSpec,
    pub grid: SpatialGrid,
    pub dt_coarse: f64,
    pub t0: f64,
    pub frames: usize,
    pub forcing_layout: ForcingLayout,
    pub sample_count: usize,
    pub generation: Option<Generation>,
    pub provenance: Vec<Provenance>,
    pub rng_scheme: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_utc: Option<String>,
}

/// Shape shared by every pair of a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetShape {
    pub pde: PdeSpec,
    pub grid: SpatialGrid,
    pub dt: f64,
    pub t0: f64,
    pub frames: usize,
    pub forcing_layout: ForcingLayout,
}

impl DatasetShape {
    pub fn of(pair: &SolutionPair) -> Self {
        DatasetShape {
            pde: pair.pde,
            grid: pair.u.grid(),
            dt: pair.u.dt(),
            t0: pair.u.t0(),
            frames: pair.u.len(),
            forcing_layout: pair.f.layout(),
        }
    }
}

impl DatasetManifest {
    pub fn new(shape: DatasetShape, provenance: Vec<Provenance>, generation: Option<Generation>) -> Self {
        DatasetManifest {
            format_version: FORMAT_VERSION,
            pde: shape.pde,
            grid: shape.grid,
            dt_coarse: shape.dt,
            t0: shape.t0,
            frames: shape.frames,
            forcing_layout: shape.forcing_layout,
            sample_count: provenance.len(),
            generation,
            provenance,
            rng_scheme: RNG_SCHEME.to_string(),
            created_utc: None,
        }
    }

    /// Manifest describing `pairs`, which must be non-empty and homogeneous.
    pub fn describe(pairs: &[SolutionPair], generation: Option<Generation>) -> Result<Self> {
        let first = pairs
            .first()
            .ok_or_else(|| Error::shape("cannot infer a dataset shape from zero pairs"))?;
        let m = DatasetManifest::new(
            DatasetShape::of(first),
            pairs.iter().map(|p| p.provenance).collect(),
            generation,
        );
        for (k, p) in pairs.iter().enumerate() {
            m.check_pair(k, p)?;
        }
        Ok(m)
    }

    pub fn shape(&self) -> DatasetShape {
        DatasetShape {
            pde: self.pde,
            grid: self.grid,
            dt: self.dt_coarse,
            t0: self.t0,
            frames: self.frames,
            forcing_layout: self.forcing_layout,
        }
    }

    pub fn forcing_frames(&self) -> usize {
        match self.forcing_layout {
            ForcingLayout::Static => 1,
            ForcingLayout::PerInterval => self.frames.saturating_sub(1),
        }
    }

    /// Bytes of one stored sample.
    pub fn sample_bytes(&self) -> u64 {
        ((self.frames + self.forcing_frames()) * self.grid.len() * 8) as u64
    }

    /// Sorted keys, no insignificant whitespace.
    pub fn to_canonical_json(&self) -> Result<String> {
        // serde_json's Value map is ordered by key.
        let value = serde_json::to_value(self)?;
        Ok(serde_json::to_string(&value)?)
    }

    fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Format {
                offset: HEADER_FIXED,
                message: format!("unsupported format version {}", self.format_version),
            });
        }
        if self.provenance.len() != self.sample_count {
            return Err(Error::Format {
                offset: HEADER_FIXED,
                message: format!(
                    "manifest lists {} provenance entries for {} samples",
                    self.provenance.len(),
                    self.sample_count
                ),
            });
        }
        if self.frames < 2 || !(self.dt_coarse > 0.0) || self.pde.dims() != self.grid.dims() {
            return Err(Error::Format {
                offset: HEADER_FIXED,
                message: "manifest describes an invalid trajectory shape".into(),
            });
        }
        Ok(())
    }

    fn check_pair(&self, k: usize, pair: &SolutionPair) -> Result<()> {
        let shape = DatasetShape::of(pair);
        if shape != self.shape() {
            return Err(Error::shape(format!(
                "sample {k} has shape {shape:?}, manifest expects {:?}",
                self.shape()
            )));
        }
        if self.provenance.get(k) != Some(&pair.provenance) {
            return Err(Error::shape(format!("sample {k} provenance differs from the manifest")));
        }
        Ok(())
    }
}

/// Streaming writer; samples must be written in manifest order.
pub struct DatasetWriter {
    out: BufWriter<File>,
    manifest: DatasetManifest,
    written: usize,
    buf: Vec<u8>,
}

impl DatasetWriter {
    pub fn create(path: impl AsRef<Path>, manifest: DatasetManifest) -> Result<Self> {
        let json = manifest.to_canonical_json()?;
        let len = u32::try_from(json.len()).map_err(|_| Error::shape("manifest exceeds 4 GiB"))?;
        let mut out = BufWriter::with_capacity(1 << 20, File::create(path)?);
        out.write_all(MAGIC)?;
        out.write_all(&len.to_le_bytes())?;
        out.write_all(json.as_bytes())?;
        Ok(DatasetWriter {
            out,
            manifest,
            written: 0,
            buf: Vec::new(),
        })
    }

    pub fn manifest(&self) -> &DatasetManifest {
        &self.manifest
    }

    pub fn write_pair(&mut self, pair: &SolutionPair) -> Result<()> {
        if self.written >= self.manifest.sample_count {
            return Err(Error::shape(format!(
                "manifest declares {} samples; refusing to write more",
                self.manifest.sample_count
            )));
        }
        self.manifest.check_pair(self.written, pair)?;
        self.buf.clear();
        for field in pair.u.frames().iter().chain(pair.f.frames()) {
            for v in field.values() {
                self.buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        self.out.write_all(&self.buf)?;
        self.written += 1;
        Ok(())
    }

    /// Writes the sentinel and flushes.
    pub fn finish(mut self) -> Result<()> {
        if self.written != self.manifest.sample_count {
            return Err(Error::shape(format!(
                "wrote {} of {} declared samples",
                self.written, self.manifest.sample_count
            )));
        }
        self.out.write_all(&(self.written as u64).to_le_bytes())?;
        self.out.flush()?;
        Ok(())
    }
}

pub fn write_dataset(pairs: &[SolutionPair], manifest: &DatasetManifest, path: impl AsRef<Path>) -> Result<()> {
    if pairs.len() != manifest.sample_count {
        return Err(Error::shape(format!(
            "{} pairs for a manifest declaring {}",
            pairs.len(),
            manifest.sample_count
        )));
    }
    let mut w = DatasetWriter::create(path, manifest.clone())?;
    for p in pairs {
        w.write_pair(p)?;
    }
    w.finish()
}

/// Streaming reader. Opening validates magic, manifest, total length and
/// sentinel before any sample is returned.
pub struct DatasetReader {
    input: BufReader<File>,
    manifest: DatasetManifest,
    next: usize,
    offset: u64,
    buf: Vec<u8>,
}

fn read_exact_at(input: &mut impl Read, buf: &mut [u8], offset: u64, what: &str) -> Result<()> {
    input.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Truncated {
            offset,
            message: format!("file ends inside the {what}"),
        },
        _ => Error::Io(e),
    })
}

impl DatasetReader {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        let file_len = file.metadata()?.len();
        let mut input = BufReader::with_capacity(1 << 20, file);

        let mut magic = [0u8; 8];
        read_exact_at(&mut input, &mut magic, 0, "magic")?;
        if &magic != MAGIC {
            return Err(Error::Format {
                offset: 0,
                message: format!("bad magic {:?}, expected {:?}", String::from_utf8_lossy(&magic), "HOPSSDS1"),
            });
        }
        let mut len = [0u8; 4];
        read_exact_at(&mut input, &mut len, 8, "manifest length")?;
        let len = u32::from_le_bytes(len) as u64;
        let mut json = vec![0u8; len as usize];
        read_exact_at(&mut input, &mut json, HEADER_FIXED, "manifest")?;
        let manifest: DatasetManifest = serde_json::from_slice(&json).map_err(|e| Error::Format {
            offset: HEADER_FIXED,
            message: format!("manifest is not valid: {e}"),
        })?;
        manifest.validate()?;

        let data_start = HEADER_FIXED + len;
        let sentinel_at = data_start + manifest.sample_count as u64 * manifest.sample_bytes();
        let expected = sentinel_at + SENTINEL_LEN;
        if file_len < expected {
            return Err(Error::Truncated {
                offset: file_len,
                message: format!(
                    "file is {file_len} bytes but the sample-count sentinel should end at {expected}; \
                     sentinel check failed"
                ),
            });
        }
        if file_len > expected {
            return Err(Error::Format {
                offset: expected,
                message: format!("{} unexpected trailing bytes", file_len - expected),
            });
        }
        input.seek(SeekFrom::Start(sentinel_at))?;
        let mut sentinel = [0u8; 8];
        read_exact_at(&mut input, &mut sentinel, sentinel_at, "sentinel")?;
        let sentinel = u64::from_le_bytes(sentinel);
        if sentinel != manifest.sample_count as u64 {
            return Err(Error::Format {
                offset: sentinel_at,
                message: format!(
                    "sentinel says {sentinel} samples, manifest says {}",
                    manifest.sample_count
                ),
            });
        }
        input.seek(SeekFrom::Start(data_start))?;
        Ok(DatasetReader {
            input,
            manifest,
            next: 0,
            offset: data_start,
            buf: Vec::new(),
        })
    }

    pub fn manifest(&self) -> &DatasetManifest {
        &self.manifest
    }

    fn read_fields(&mut self, count: usize) -> Result<Vec<Field>> {
        let grid = self.manifest.grid;
        let bytes = grid.len() * 8;
        let mut fields = Vec::with_capacity(count);
        for _ in 0..count {
            self.buf.resize(bytes, 0);
            read_exact_at(&mut self.input, &mut self.buf, self.offset, "sample data")?;
            let values = self
                .buf
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect();
            let field = Field::new(grid, values).map_err(|e| Error::Format {
                offset: self.offset,
                message: format!("invalid field: {e}"),
            })?;
            self.offset += bytes as u64;
            fields.push(field);
        }
        Ok(fields)
    }

    fn read_pair(&mut self) -> Result<SolutionPair> {
        let m = &self.manifest;
        let (dt, t0, frames, nf, layout) = (m.dt_coarse, m.t0, m.frames, m.forcing_frames(), m.forcing_layout);
        let (pde, provenance) = (m.pde, m.provenance[self.next]);
        let u = Trajectory::new(self.read_fields(frames)?, dt, t0)?;
        let mut f = self.read_fields(nf)?;
        let f = match layout {
            ForcingLayout::Static => Forcing::Static(f.pop().expect("one static frame")),
            ForcingLayout::PerInterval => Forcing::PerInterval(Trajectory::new(f, dt, t0)?),
        };
        self.next += 1;
        SolutionPair::new(u, f, provenance, pde)
    }
}

impl Iterator for DatasetReader {
    type Item = Result<SolutionPair>;

    fn next(&mut self) -> Option<Self::Item> {
        (self.next < self.manifest.sample_count).then(|| self.read_pair())
    }
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<(Vec<SolutionPair>, DatasetManifest)> {
    let reader = DatasetReader::open(path)?;
    let manifest = reader.manifest().clone();
    let pairs = reader.collect::<Result<Vec<_>>>()?;
    Ok((pairs, manifest))
}

/// Writes `sample_NNNNN.csv` files into `dir` for a 1D dataset: one row per
/// stored frame, `field,frame,x0,…`. Returns the number of files written.
pub fn export_csv(path: impl AsRef<Path>, dir: impl AsRef<Path>) -> Result<usize> {
    let reader = DatasetReader::open(path)?;
    if reader.manifest().grid.dims() != 1 {
        return Err(Error::shape("CSV export is only available for 1D datasets"));
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let n = reader.manifest().grid.n();
    let header: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let mut written = 0;
    for (k, pair) in reader.enumerate() {
        let pair = pair?;
        let mut out = BufWriter::new(File::create(dir.join(format!("sample_{k:05}.csv")))?);
        writeln!(out, "field,frame,{}", header.join(","))?;
        let rows = pair
            .u
            .frames()
            .iter()
            .enumerate()
            .map(|(t, f)| ("u", t, f))
            .chain(pair.f.frames().iter().enumerate().map(|(t, f)| ("f", t, f)));
        for (name, t, field) in rows {
            let values: Vec<String> = field.values().iter().map(|v| format!("{v:e}")).collect();
            writeln!(out, "{name},{t},{}", values.join(","))?;
        }
        out.flush()?;
        written += 1;
    }
    Ok(written)
}
