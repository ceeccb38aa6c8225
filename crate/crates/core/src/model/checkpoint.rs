//! Model checkpoints: magic `MWTM`, version byte, structural header, the
//! six filter-bank matrices, then every parameter tensor as little-endian
//! f64 with a shape header.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use super::{Activation, ConvSpec, ModelConfig, OperatorModel};
use crate::error::{Error, Result};
use crate::filterbank::FilterBank;
use crate::specfun::BasisKind;

const MAGIC: &[u8; 4] = b"MWTM";
const VERSION: u8 = 1;

fn write_matrix<W: Write>(w: &mut W, m: &Array2<f64>) -> Result<()> {
    w.write_all(&[2u8])?;
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for &v in m.iter() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_u8<R: Read>(r: &mut R) -> Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

fn read_u16<R: Read>(r: &mut R) -> Result<u16> {
    let mut b = [0u8; 2];
    r.read_exact(&mut b)?;
    Ok(u16::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn read_matrix<R: Read>(r: &mut R) -> Result<Array2<f64>> {
    let rank = read_u8(r)?;
    if rank != 2 {
        return Err(Error::Format(format!("expected rank-2 tensor, got {rank}")));
    }
    let rows = read_u64(r)? as usize;
    let cols = read_u64(r)? as usize;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        data.push(read_f64(r)?);
    }
    Array2::from_shape_vec((rows, cols), data).map_err(|e| Error::Format(e.to_string()))
}

/// Write a checkpoint.
pub fn save(model: &OperatorModel, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION])?;
    let cfg = &model.config;
    let kind_byte = match cfg.kind {
        BasisKind::Legendre => 0u8,
        BasisKind::Chebyshev => 1u8,
    };
    w.write_all(&[kind_byte, cfg.k as u8, cfg.layers as u8])?;
    w.write_all(&[u8::from(cfg.two_d)])?;
    match cfg.conv {
        ConvSpec::Conv { width } => {
            w.write_all(&[0u8])?;
            w.write_all(&(width as u16).to_le_bytes())?;
        }
        ConvSpec::Spectral { modes } => {
            w.write_all(&[1u8])?;
            w.write_all(&(modes as u16).to_le_bytes())?;
        }
    }
    w.write_all(&[cfg.coarsest as u8])?;
    w.write_all(&[match cfg.activation {
        Activation::None => 0u8,
        Activation::Relu => 1u8,
    }])?;

    let bank = model.bank();
    for m in [
        &bank.h0,
        &bank.h1,
        &bank.g0,
        &bank.g1,
        &bank.sigma0,
        &bank.sigma1,
    ] {
        write_matrix(&mut w, m)?;
    }

    let tensors = &model.layout.tensors;
    w.write_all(&(tensors.len() as u32).to_le_bytes())?;
    for spec in tensors {
        w.write_all(&[spec.shape.len() as u8])?;
        for &d in &spec.shape {
            w.write_all(&(d as u64).to_le_bytes())?;
        }
        for &v in &model.params()[spec.offset..spec.offset + spec.len()] {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a checkpoint back into a model.
pub fn load(path: &Path) -> Result<OperatorModel> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a model checkpoint (bad magic)".into()));
    }
    let version = read_u8(&mut r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let kind = match read_u8(&mut r)? {
        0 => BasisKind::Legendre,
        1 => BasisKind::Chebyshev,
        other => return Err(Error::Format(format!("unknown basis byte {other}"))),
    };
    let k = read_u8(&mut r)? as usize;
    let layers = read_u8(&mut r)? as usize;
    let two_d = read_u8(&mut r)? != 0;
    let conv = match read_u8(&mut r)? {
        0 => ConvSpec::Conv {
            width: read_u16(&mut r)? as usize,
        },
        1 => ConvSpec::Spectral {
            modes: read_u16(&mut r)? as usize,
        },
        other => return Err(Error::Format(format!("unknown conv byte {other}"))),
    };
    let coarsest = read_u8(&mut r)? as usize;
    let activation = match read_u8(&mut r)? {
        0 => Activation::None,
        1 => Activation::Relu,
        other => return Err(Error::Format(format!("unknown activation byte {other}"))),
    };
    let config = ModelConfig {
        kind,
        k,
        layers,
        coarsest,
        conv,
        activation,
        two_d,
    };

    let h0 = read_matrix(&mut r)?;
    let h1 = read_matrix(&mut r)?;
    let g0 = read_matrix(&mut r)?;
    let g1 = read_matrix(&mut r)?;
    let sigma0 = read_matrix(&mut r)?;
    let sigma1 = read_matrix(&mut r)?;
    let bank = FilterBank {
        kind,
        k,
        h0,
        h1,
        g0,
        g1,
        sigma0,
        sigma1,
    };

    let mut model = OperatorModel::with_bank(config, bank, 0)?;
    let count = {
        let mut b = [0u8; 4];
        r.read_exact(&mut b)?;
        u32::from_le_bytes(b) as usize
    };
    if count != model.layout.tensors.len() {
        return Err(Error::Format(format!(
            "checkpoint has {count} tensors, model expects {}",
            model.layout.tensors.len()
        )));
    }
    for t in 0..count {
        let spec = model.layout.tensors[t].clone();
        let rank = read_u8(&mut r)? as usize;
        if rank != spec.shape.len() {
            return Err(Error::Format(format!(
                "tensor {t} rank {rank} does not match expected {}",
                spec.shape.len()
            )));
        }
        for d in 0..rank {
            let dim = read_u64(&mut r)? as usize;
            if dim != spec.shape[d] {
                return Err(Error::Format(format!(
                    "tensor {t} dim {d} is {dim}, expected {}",
                    spec.shape[d]
                )));
            }
        }
        for i in 0..spec.len() {
            model.params_mut()[spec.offset + i] = read_f64(&mut r)?;
        }
    }
    Ok(model)
}
