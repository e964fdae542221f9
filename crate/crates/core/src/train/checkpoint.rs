//! Binary model files.
//!
//! Layout, little endian: magic `AWECKPT1`, `u32` version, `u64` walk
//! length, η, d_a, d_g and graph count, then `W`, `U`, `b` and `D` as
//! `f64` arrays in row-major order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::model::{GraphVectors, ModelParams, WalkModel};
use crate::error::{Error, Result};
use crate::walk::WalkVocabulary;

const MAGIC: &[u8; 8] = b"AWECKPT1";
const VERSION: u32 = 1;

pub fn save_checkpoint(params: &ModelParams, length: usize, path: &Path) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    let w = &params.walk;
    let mut header = Vec::with_capacity(52);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&VERSION.to_le_bytes());
    for v in [length, w.eta(), w.walk_dim(), w.graph_dim(), params.graphs.len()] {
        header.extend_from_slice(&(v as u64).to_le_bytes());
    }
    out.write_all(&header).map_err(io)?;
    for tensor in [w.w(), w.u(), w.b(), params.graphs.data()] {
        for v in tensor {
            out.write_all(&v.to_le_bytes()).map_err(io)?;
        }
    }
    out.flush().map_err(io)
}

/// Read a checkpoint and check it against `vocab`.
pub fn load_checkpoint(path: &Path, vocab: &WalkVocabulary) -> Result<(ModelParams, usize)> {
    let io = |e| Error::io(path, e);
    let mut input = BufReader::new(File::open(path).map_err(io)?);
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(Error::Invalid(format!(
            "{} is not a model checkpoint",
            path.display()
        )));
    }
    let mut word = [0u8; 4];
    input.read_exact(&mut word).map_err(io)?;
    let version = u32::from_le_bytes(word);
    if version != VERSION {
        return Err(Error::Invalid(format!(
            "unsupported checkpoint version {version}"
        )));
    }
    let mut read_u64 = || -> Result<usize> {
        let mut b = [0u8; 8];
        input.read_exact(&mut b).map_err(io)?;
        Ok(u64::from_le_bytes(b) as usize)
    };
    let (length, eta, d_a, d_g, n) = (read_u64()?, read_u64()?, read_u64()?, read_u64()?, read_u64()?);
    if length != vocab.length() || eta != vocab.len() {
        return Err(Error::DimensionMismatch(format!(
            "checkpoint was trained for l={length} (η={eta}), active vocabulary has l={} (η={})",
            vocab.length(),
            vocab.len()
        )));
    }
    let mut read_tensor = |len: usize, name: &'static str| -> Result<Vec<f64>> {
        let mut bytes = vec![0u8; len * 8];
        input.read_exact(&mut bytes).map_err(io)?;
        let v: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { tensor: name });
        }
        Ok(v)
    };
    let w = read_tensor(eta * d_a, "W")?;
    let u = read_tensor(eta * (d_a + d_g), "U")?;
    let b = read_tensor(eta, "b")?;
    let d = read_tensor(n * d_g, "D")?;
    let rows: Vec<Vec<f64>> = d.chunks(d_g.max(1)).map(<[f64]>::to_vec).collect();
    Ok((
        ModelParams {
            walk: WalkModel::from_parts(eta, d_a, d_g, w, u, b)?,
            graphs: GraphVectors::from_rows(&rows, d_g)?,
        },
        length,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::walk::enumerate_vocabulary;

    #[test]
    fn round_trip_and_validation() {
        let mut rng = stream(1, &[]);
        let mut walk = WalkModel::init(5, 3, 2, &mut rng);
        walk.u_mut()[4] = 0.25;
        walk.b_mut()[1] = -1.5;
        let params = ModelParams {
            walk,
            graphs: GraphVectors::init(4, 2, &mut rng),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        save_checkpoint(&params, 3, &path).unwrap();
        let (back, l) = load_checkpoint(&path, &enumerate_vocabulary(3).unwrap()).unwrap();
        assert_eq!(l, 3);
        assert_eq!(back, params);
        assert!(matches!(
            load_checkpoint(&path, &enumerate_vocabulary(4).unwrap()),
            Err(Error::DimensionMismatch(_))
        ));
        std::fs::write(&path, b"garbage!garbage").unwrap();
        assert!(load_checkpoint(&path, &enumerate_vocabulary(3).unwrap()).is_err());
    }
}
