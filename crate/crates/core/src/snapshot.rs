//! Field snapshots: a TOML header next to a raw little-endian `f64` payload.
//!
//! The header records the grid (shape and period lengths), an optional time
//! stamp, the payload file name and the list of fields in payload order. Each
//! field is stored row-major: a scalar as one plane, a complex field as its
//! real plane followed by its imaginary plane, a vector field as one plane
//! per component. Reading back what was written reproduces every bit.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, ScalarField, VectorField};
use crate::grid::Grid;

const FORMAT: &str = "geodens-snapshot";
const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Scalar,
    Complex,
    Vector,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldData {
    Scalar(ScalarField),
    Complex(ComplexField),
    Vector(VectorField),
}

impl FieldData {
    pub fn kind(&self) -> FieldKind {
        match self {
            FieldData::Scalar(_) => FieldKind::Scalar,
            FieldData::Complex(_) => FieldKind::Complex,
            FieldData::Vector(_) => FieldKind::Vector,
        }
    }

    fn grid(&self) -> &Grid {
        match self {
            FieldData::Scalar(f) => f.grid(),
            FieldData::Complex(f) => f.grid(),
            FieldData::Vector(f) => f.grid(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    version: u32,
    shape: Vec<usize>,
    lengths: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    time: Option<f64>,
    data: String,
    fields: Vec<FieldHeader>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldHeader {
    name: String,
    kind: FieldKind,
}

/// A set of named fields on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    grid: Grid,
    time: Option<f64>,
    fields: Vec<(String, FieldData)>,
}

impl Snapshot {
    pub fn new(grid: Grid) -> Self {
        Self {
            grid,
            time: None,
            fields: Vec::new(),
        }
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = Some(t);
        self
    }

    /// Appends a field; its grid must match the snapshot grid.
    pub fn push(&mut self, name: impl Into<String>, data: FieldData) -> Result<()> {
        self.grid.ensure_same(data.grid())?;
        let name = name.into();
        if self.fields.iter().any(|(n, _)| *n == name) {
            return Err(Error::Snapshot(format!("duplicate field name {name:?}")));
        }
        self.fields.push((name, data));
        Ok(())
    }

    pub fn with(mut self, name: impl Into<String>, data: FieldData) -> Result<Self> {
        self.push(name, data)?;
        Ok(self)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn time(&self) -> Option<f64> {
        self.time
    }

    pub fn fields(&self) -> &[(String, FieldData)] {
        &self.fields
    }

    pub fn get(&self, name: &str) -> Option<&FieldData> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    pub fn scalar(&self, name: &str) -> Result<&ScalarField> {
        match self.get(name) {
            Some(FieldData::Scalar(f)) => Ok(f),
            Some(_) => Err(Error::Snapshot(format!("field {name:?} is not scalar"))),
            None => Err(Error::Snapshot(format!("no field named {name:?}"))),
        }
    }

    pub fn complex(&self, name: &str) -> Result<&ComplexField> {
        match self.get(name) {
            Some(FieldData::Complex(f)) => Ok(f),
            Some(_) => Err(Error::Snapshot(format!("field {name:?} is not complex"))),
            None => Err(Error::Snapshot(format!("no field named {name:?}"))),
        }
    }

    pub fn vector(&self, name: &str) -> Result<&VectorField> {
        match self.get(name) {
            Some(FieldData::Vector(f)) => Ok(f),
            Some(_) => Err(Error::Snapshot(format!("field {name:?} is not a vector"))),
            None => Err(Error::Snapshot(format!("no field named {name:?}"))),
        }
    }

    /// Writes the header to `header_path` and the payload next to it with a
    /// `.bin` extension. Returns the payload path.
    pub fn write(&self, header_path: &Path) -> Result<PathBuf> {
        let data_path = header_path.with_extension("bin");
        let data_name = data_path
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| Error::Snapshot(format!("bad path {}", header_path.display())))?
            .to_string();

        let header = Header {
            format: FORMAT.into(),
            version: VERSION,
            shape: self.grid.shape().to_vec(),
            lengths: self.grid.lengths().to_vec(),
            time: self.time,
            data: data_name,
            fields: self
                .fields
                .iter()
                .map(|(name, d)| FieldHeader {
                    name: name.clone(),
                    kind: d.kind(),
                })
                .collect(),
        };
        let text = toml::to_string(&header).map_err(|e| Error::Snapshot(e.to_string()))?;

        let mut bytes = Vec::new();
        let mut put = |v: f64| bytes.extend_from_slice(&v.to_le_bytes());
        for (_, d) in &self.fields {
            match d {
                FieldData::Scalar(f) => f.values().iter().for_each(|&v| put(v)),
                FieldData::Complex(f) => {
                    f.values().iter().for_each(|c| put(c.re));
                    f.values().iter().for_each(|c| put(c.im));
                }
                FieldData::Vector(f) => f
                    .components()
                    .iter()
                    .for_each(|c| c.values().iter().for_each(|&v| put(v))),
            }
        }

        fs::write(header_path, text)?;
        fs::write(&data_path, bytes)?;
        Ok(data_path)
    }

    /// Reads a snapshot written by [`Snapshot::write`].
    pub fn read(header_path: &Path) -> Result<Self> {
        let text = fs::read_to_string(header_path)?;
        let header: Header = toml::from_str(&text).map_err(|e| Error::Snapshot(e.to_string()))?;
        if header.format != FORMAT {
            return Err(Error::Snapshot(format!(
                "unknown format {:?}",
                header.format
            )));
        }
        if header.version != VERSION {
            return Err(Error::Snapshot(format!(
                "unsupported version {}",
                header.version
            )));
        }
        let grid = Grid::new(&header.shape, &header.lengths)?;
        let data_path = header_path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(&header.data);
        let bytes = fs::read(&data_path)?;

        let planes: usize = header
            .fields
            .iter()
            .map(|f| match f.kind {
                FieldKind::Scalar => 1,
                FieldKind::Complex => 2,
                FieldKind::Vector => grid.dim(),
            })
            .sum();
        let n = grid.len();
        if bytes.len() != planes * n * 8 {
            return Err(Error::Snapshot(format!(
                "payload has {} bytes, header implies {}",
                bytes.len(),
                planes * n * 8
            )));
        }
        let values: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();

        let mut planes_iter = values.chunks_exact(n);
        let mut next_plane = || planes_iter.next().expect("plane count checked").to_vec();
        let mut snapshot = Snapshot {
            grid: grid.clone(),
            time: header.time,
            fields: Vec::new(),
        };
        for fh in header.fields {
            let data = match fh.kind {
                FieldKind::Scalar => {
                    FieldData::Scalar(ScalarField::new(grid.clone(), next_plane())?)
                }
                FieldKind::Complex => {
                    let re = next_plane();
                    let im = next_plane();
                    let data = re
                        .into_iter()
                        .zip(im)
                        .map(|(a, b)| Complex64::new(a, b))
                        .collect();
                    FieldData::Complex(ComplexField::new(grid.clone(), data)?)
                }
                FieldKind::Vector => {
                    let comps = (0..grid.dim())
                        .map(|_| ScalarField::new(grid.clone(), next_plane()))
                        .collect::<Result<Vec<_>>>()?;
                    FieldData::Vector(VectorField::from_components(comps)?)
                }
            };
            snapshot.push(fh.name, data)?;
        }
        Ok(snapshot)
    }
}
