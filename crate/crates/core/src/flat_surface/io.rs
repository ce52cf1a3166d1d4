use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FlatSurface;
use crate::{Result, C64};

/// On-disk JSON layout of a surface.
///
/// ```json
/// {"genus": 1, "triangles": [[0,1,2],[3,4,5]],
///  "pairing": [[0,3,1],[1,4,1],[2,5,1]],
///  "vectors": [[1,0],[0,1],[-1,-1],[-1,0],[0,-1],[1,1]]}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub genus: u32,
    pub triangles: Vec<[usize; 3]>,
    pub pairing: Vec<(usize, usize, i8)>,
    pub vectors: Vec<[f64; 2]>,
}

impl From<&FlatSurface> for SurfaceFile {
    fn from(s: &FlatSurface) -> Self {
        SurfaceFile {
            genus: s.genus,
            triangles: s.triangles.clone(),
            pairing: s.pairs(),
            vectors: s.vectors.iter().map(|v| [v.re, v.im]).collect(),
        }
    }
}

impl TryFrom<SurfaceFile> for FlatSurface {
    type Error = crate::Error;

    fn try_from(f: SurfaceFile) -> Result<Self> {
        let vectors = f.vectors.iter().map(|v| C64::new(v[0], v[1])).collect();
        FlatSurface::new(f.genus, f.triangles, &f.pairing, vectors)
    }
}

impl FlatSurface {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SurfaceFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SurfaceFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
