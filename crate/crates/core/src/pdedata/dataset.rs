//! Paired input/output datasets on dyadic grids, their binary `MWTD` file
//! format, and the per-equation generation drivers.
//!
//! Sample generation is embarrassingly parallel: every sample draws from its
//! own stream (master seed, sample index), so results are bit-identical
//! regardless of worker count.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2, Array3, Axis};
use rayon::prelude::*;

use super::beam::{BeamOrder, BeamSolver};
use super::darcy::solve_darcy;
use super::grf::{sample_grf_1d_on, sample_grf_2d, sample_smooth_random, sample_sqexp_periodic, GrfSpec};
use super::spectral::{solve_burgers, solve_kdv, BURGERS_INTERNAL_RESOLUTION, KDV_INTERNAL_RESOLUTION};
use crate::error::{Error, Result};
use crate::model::train::SamplePairs;

const MAGIC: &[u8; 4] = b"MWTD";
const VERSION: u8 = 1;

/// Sample stacks: (n, len) in one dimension, (n, r, r) in two.
#[derive(Debug, Clone)]
pub enum FieldData {
    One(Array2<f64>),
    Two(Array3<f64>),
}

impl FieldData {
    pub fn n_samples(&self) -> usize {
        match self {
            FieldData::One(a) => a.nrows(),
            FieldData::Two(a) => a.dim().0,
        }
    }

    pub fn resolution(&self) -> usize {
        match self {
            FieldData::One(a) => a.ncols(),
            FieldData::Two(a) => a.dim().1,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            FieldData::One(a) => a.iter().all(|v| v.is_finite()),
            FieldData::Two(a) => a.iter().all(|v| v.is_finite()),
        }
    }
}

/// A generated dataset plus the metadata needed to regenerate it.
#[derive(Debug, Clone)]
pub struct PdeDataset {
    pub equation: String,
    pub inputs: FieldData,
    pub outputs: FieldData,
    pub metadata: BTreeMap<String, String>,
}

impl PdeDataset {
    /// Borrow a contiguous range of samples as training pairs.
    pub fn pairs(&self, start: usize, count: usize) -> Result<SamplePairs<'_>> {
        let n = self.inputs.n_samples();
        if start + count > n {
            return Err(Error::Shape(format!(
                "requested samples {start}..{} from a set of {n}",
                start + count
            )));
        }
        Ok(match (&self.inputs, &self.outputs) {
            (FieldData::One(x), FieldData::One(y)) => SamplePairs::One {
                inputs: x.slice(ndarray::s![start..start + count, ..]),
                outputs: y.slice(ndarray::s![start..start + count, ..]),
            },
            (FieldData::Two(x), FieldData::Two(y)) => SamplePairs::Two {
                inputs: x.slice(ndarray::s![start..start + count, .., ..]),
                outputs: y.slice(ndarray::s![start..start + count, .., ..]),
            },
            _ => return Err(Error::Format("mixed-dimension dataset".into())),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&[VERSION])?;
        let name = self.equation.as_bytes();
        w.write_all(&(name.len() as u16).to_le_bytes())?;
        w.write_all(name)?;
        w.write_all(&(self.metadata.len() as u16).to_le_bytes())?;
        for (k, v) in &self.metadata {
            w.write_all(&(k.len() as u16).to_le_bytes())?;
            w.write_all(k.as_bytes())?;
            w.write_all(&(v.len() as u16).to_le_bytes())?;
            w.write_all(v.as_bytes())?;
        }
        let (ndim, n, r) = match &self.inputs {
            FieldData::One(a) => (1u8, a.nrows(), a.ncols()),
            FieldData::Two(a) => (2u8, a.dim().0, a.dim().1),
        };
        w.write_all(&[ndim])?;
        w.write_all(&(n as u64).to_le_bytes())?;
        w.write_all(&(r as u64).to_le_bytes())?;
        let dump = |w: &mut BufWriter<File>, data: &FieldData| -> Result<()> {
            match data {
                FieldData::One(a) => {
                    for &v in a.iter() {
                        w.write_all(&v.to_le_bytes())?;
                    }
                }
                FieldData::Two(a) => {
                    for &v in a.iter() {
                        w.write_all(&v.to_le_bytes())?;
                    }
                }
            }
            Ok(())
        };
        dump(&mut w, &self.inputs)?;
        dump(&mut w, &self.outputs)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a dataset file (bad magic)".into()));
        }
        let mut byte = [0u8; 1];
        r.read_exact(&mut byte)?;
        if byte[0] != VERSION {
            return Err(Error::Format(format!("unsupported version {}", byte[0])));
        }
        let read_u16 = |r: &mut BufReader<File>| -> Result<usize> {
            let mut b = [0u8; 2];
            r.read_exact(&mut b)?;
            Ok(u16::from_le_bytes(b) as usize)
        };
        let read_string = |r: &mut BufReader<File>, len: usize| -> Result<String> {
            let mut buf = vec![0u8; len];
            r.read_exact(&mut buf)?;
            String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
        };
        let name_len = read_u16(&mut r)?;
        let equation = read_string(&mut r, name_len)?;
        let meta_count = read_u16(&mut r)?;
        let mut metadata = BTreeMap::new();
        for _ in 0..meta_count {
            let klen = read_u16(&mut r)?;
            let key = read_string(&mut r, klen)?;
            let vlen = read_u16(&mut r)?;
            let value = read_string(&mut r, vlen)?;
            metadata.insert(key, value);
        }
        r.read_exact(&mut byte)?;
        let ndim = byte[0];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let res = u64::from_le_bytes(b8) as usize;
        let count = match ndim {
            1 => n * res,
            2 => n * res * res,
            other => return Err(Error::Format(format!("bad dimension byte {other}"))),
        };
        let mut slurp = |count: usize| -> Result<Vec<f64>> {
            let mut data = Vec::with_capacity(count);
            for _ in 0..count {
                r.read_exact(&mut b8)?;
                data.push(f64::from_le_bytes(b8));
            }
            Ok(data)
        };
        let raw_in = slurp(count)?;
        let raw_out = slurp(count)?;
        let wrap = |raw: Vec<f64>| -> Result<FieldData> {
            Ok(match ndim {
                1 => FieldData::One(
                    Array2::from_shape_vec((n, res), raw)
                        .map_err(|e| Error::Format(e.to_string()))?,
                ),
                _ => FieldData::Two(
                    Array3::from_shape_vec((n, res, res), raw)
                        .map_err(|e| Error::Format(e.to_string()))?,
                ),
            })
        };
        Ok(PdeDataset {
            equation,
            inputs: wrap(raw_in)?,
            outputs: wrap(raw_out)?,
            metadata,
        })
    }
}

/// Strided point selection starting at index 0.
pub fn subsample_1d(field: &Array1<f64>, factor: usize) -> Result<Array1<f64>> {
    if factor == 0 || field.len() % factor != 0 {
        return Err(Error::Shape(format!(
            "factor {factor} does not divide length {}",
            field.len()
        )));
    }
    Ok(Array1::from_iter(
        (0..field.len() / factor).map(|i| field[i * factor]),
    ))
}

/// Strided selection per dimension.
pub fn subsample_2d(field: &Array2<f64>, factor: usize) -> Result<Array2<f64>> {
    let (h, w) = field.dim();
    if factor == 0 || h % factor != 0 || w % factor != 0 {
        return Err(Error::Shape(format!(
            "factor {factor} does not divide grid {h}×{w}"
        )));
    }
    Ok(Array2::from_shape_fn((h / factor, w / factor), |(i, j)| {
        field[[i * factor, j * factor]]
    }))
}

/// Equations with generation drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equation {
    Kdv,
    Burgers,
    Beam4,
    Beam3,
    Darcy,
    /// u = a; sanity task for the training loop
    Identity,
}

impl Equation {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kdv" => Ok(Equation::Kdv),
            "burgers" => Ok(Equation::Burgers),
            "beam4" | "beam" => Ok(Equation::Beam4),
            "beam3" => Ok(Equation::Beam3),
            "darcy" => Ok(Equation::Darcy),
            "identity" => Ok(Equation::Identity),
            other => Err(Error::InvalidSpec(format!("unknown equation `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Equation::Kdv => "kdv",
            Equation::Burgers => "burgers",
            Equation::Beam4 => "beam4",
            Equation::Beam3 => "beam3",
            Equation::Darcy => "darcy",
            Equation::Identity => "identity",
        }
    }
}

/// Input sampling rule for the 1-D equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputRule {
    /// the equation's default Gaussian random field
    Grf,
    /// periodic squared-exponential kernel with smoothing L and period P
    SqExp { smoothing: f64, period: f64 },
    /// band-limited smooth random function with fluctuation parameter λ
    Smooth { lambda: f64 },
}

/// Everything needed to regenerate a dataset bit-identically.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub equation: Equation,
    pub n_samples: usize,
    pub resolution: usize,
    pub seed: u64,
    pub input_rule: InputRule,
    /// Burgers viscosity
    pub nu: f64,
    /// beam forcing frequency
    pub omega: f64,
    /// KdV/Burgers final time
    pub t_end: f64,
    /// beam/Darcy solver grid refinement over the output resolution
    pub solver_factor: usize,
    /// Darcy coefficient threshold values
    pub darcy_high: f64,
    pub darcy_low: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            equation: Equation::Burgers,
            n_samples: 1,
            resolution: 256,
            seed: 0,
            input_rule: InputRule::Grf,
            nu: 0.1,
            omega: 215.0,
            t_end: 1.0,
            solver_factor: 4,
            darcy_high: 12.0,
            darcy_low: 3.0,
        }
    }
}

fn sample_seed(master: u64, index: usize) -> u64 {
    // splitmix64 over (master, index) keeps per-sample streams independent
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn input_1d(cfg: &GenConfig, resolution: usize, domain_len: f64, spec: &GrfSpec, seed: u64) -> Result<Array1<f64>> {
    match cfg.input_rule {
        InputRule::Grf => sample_grf_1d_on(spec, resolution, domain_len, seed),
        InputRule::SqExp { smoothing, period } => {
            sample_sqexp_periodic(smoothing, period, resolution, seed)
        }
        InputRule::Smooth { lambda } => sample_smooth_random(lambda, resolution, seed),
    }
}

/// Generate a dataset per the paper's experiment protocol for the equation.
pub fn generate(cfg: &GenConfig) -> Result<PdeDataset> {
    if cfg.n_samples == 0 {
        return Err(Error::InvalidSpec("n_samples must be positive".into()));
    }
    if !cfg.resolution.is_power_of_two() {
        return Err(Error::InvalidSpec(format!(
            "resolution {} is not a power of two",
            cfg.resolution
        )));
    }
    let mut metadata = BTreeMap::new();
    metadata.insert("equation".into(), cfg.equation.name().to_string());
    metadata.insert("n_samples".into(), cfg.n_samples.to_string());
    metadata.insert("resolution".into(), cfg.resolution.to_string());
    metadata.insert("seed".into(), cfg.seed.to_string());
    metadata.insert(
        "input_rule".into(),
        match cfg.input_rule {
            InputRule::Grf => "grf".to_string(),
            InputRule::SqExp { smoothing, period } => format!("sqexp(L={smoothing},P={period})"),
            InputRule::Smooth { lambda } => format!("smooth(lambda={lambda})"),
        },
    );
    metadata.insert(
        "grf_convention".into(),
        "periodic spectral Laplacian, eigenvalue (2πm/ℓ)²; Neumann via even reflection".into(),
    );

    match cfg.equation {
        Equation::Kdv | Equation::Burgers | Equation::Identity => {
            let (spec, domain_len, internal) = match cfg.equation {
                Equation::Kdv => (
                    GrfSpec {
                        sigma_sq: 7f64.powi(4),
                        tau: 7.0,
                        alpha: 2.5,
                        dims: 1,
                        periodic: true,
                    },
                    1.0,
                    KDV_INTERNAL_RESOLUTION.max(cfg.resolution),
                ),
                Equation::Burgers => (
                    GrfSpec {
                        sigma_sq: 5f64.powi(4),
                        tau: 5.0,
                        alpha: 2.0,
                        dims: 1,
                        periodic: true,
                    },
                    2.0 * std::f64::consts::PI,
                    BURGERS_INTERNAL_RESOLUTION.max(cfg.resolution),
                ),
                _ => (
                    GrfSpec {
                        sigma_sq: 5f64.powi(4),
                        tau: 5.0,
                        alpha: 2.0,
                        dims: 1,
                        periodic: true,
                    },
                    1.0,
                    cfg.resolution,
                ),
            };
            metadata.insert("internal_resolution".into(), internal.to_string());
            metadata.insert("t_end".into(), cfg.t_end.to_string());
            if cfg.equation == Equation::Burgers {
                metadata.insert("nu".into(), cfg.nu.to_string());
            }
            let factor = internal / cfg.resolution;
            let rows: Result<Vec<(Array1<f64>, Array1<f64>)>> = (0..cfg.n_samples)
                .into_par_iter()
                .map(|i| {
                    let seed = sample_seed(cfg.seed, i);
                    let u0 = input_1d(cfg, internal, domain_len, &spec, seed)?;
                    let u1 = match cfg.equation {
                        Equation::Kdv => solve_kdv(&u0, cfg.t_end)?,
                        Equation::Burgers => solve_burgers(&u0, cfg.nu, cfg.t_end)?,
                        _ => u0.clone(),
                    };
                    Ok((subsample_1d(&u0, factor)?, subsample_1d(&u1, factor)?))
                })
                .collect();
            let rows = rows?;
            let mut inputs = Array2::zeros((cfg.n_samples, cfg.resolution));
            let mut outputs = Array2::zeros((cfg.n_samples, cfg.resolution));
            for (i, (a, u)) in rows.into_iter().enumerate() {
                inputs.row_mut(i).assign(&a);
                outputs.row_mut(i).assign(&u);
            }
            Ok(PdeDataset {
                equation: cfg.equation.name().into(),
                inputs: FieldData::One(inputs),
                outputs: FieldData::One(outputs),
                metadata,
            })
        }
        Equation::Beam4 | Equation::Beam3 => {
            let order = if cfg.equation == Equation::Beam4 {
                BeamOrder::Fourth
            } else {
                BeamOrder::Third
            };
            let intervals = cfg.resolution * cfg.solver_factor.max(4);
            let solver = BeamSolver::new(order, cfg.omega, intervals)?;
            metadata.insert("omega".into(), cfg.omega.to_string());
            metadata.insert("solver_intervals".into(), intervals.to_string());
            let spec = GrfSpec {
                sigma_sq: 5f64.powi(4),
                tau: 5.0,
                alpha: 2.0,
                dims: 1,
                periodic: true,
            };
            let factor = intervals / cfg.resolution;
            let rows: Result<Vec<(Array1<f64>, Array1<f64>)>> = (0..cfg.n_samples)
                .into_par_iter()
                .map(|i| {
                    let seed = sample_seed(cfg.seed, i);
                    let f_per = input_1d(cfg, intervals, 1.0, &spec, seed)?;
                    // extend periodically onto the inclusive node grid
                    let mut f_nodes = Array1::zeros(intervals + 1);
                    for j in 0..intervals {
                        f_nodes[j] = f_per[j];
                    }
                    f_nodes[intervals] = f_per[0];
                    let u = solver.solve(&f_nodes)?;
                    let f_out = subsample_1d(&f_per, factor)?;
                    let u_out = Array1::from_iter((0..cfg.resolution).map(|j| u[j * factor]));
                    Ok((f_out, u_out))
                })
                .collect();
            let rows = rows?;
            let mut inputs = Array2::zeros((cfg.n_samples, cfg.resolution));
            let mut outputs = Array2::zeros((cfg.n_samples, cfg.resolution));
            for (i, (a, u)) in rows.into_iter().enumerate() {
                inputs.row_mut(i).assign(&a);
                outputs.row_mut(i).assign(&u);
            }
            Ok(PdeDataset {
                equation: cfg.equation.name().into(),
                inputs: FieldData::One(inputs),
                outputs: FieldData::One(outputs),
                metadata,
            })
        }
        Equation::Darcy => {
            let intervals = cfg.resolution * cfg.solver_factor.max(1);
            metadata.insert("solver_intervals".into(), intervals.to_string());
            metadata.insert("darcy_high".into(), cfg.darcy_high.to_string());
            metadata.insert("darcy_low".into(), cfg.darcy_low.to_string());
            metadata.insert("forcing".into(), "1".into());
            let spec = GrfSpec {
                sigma_sq: 1.0,
                tau: 3.0,
                alpha: 2.0,
                dims: 2,
                periodic: false,
            };
            let factor = intervals / cfg.resolution;
            let ones = Array2::from_elem((intervals + 1, intervals + 1), 1.0);
            let rows: Result<Vec<(Array2<f64>, Array2<f64>)>> = (0..cfg.n_samples)
                .into_par_iter()
                .map(|i| {
                    let seed = sample_seed(cfg.seed, i);
                    let g = sample_grf_2d(&spec, intervals, seed)?;
                    let a = g.mapv(|v| if v >= 0.0 { cfg.darcy_high } else { cfg.darcy_low });
                    let u = solve_darcy(&a, &ones, 1e-10)?;
                    let a_out = Array2::from_shape_fn(
                        (cfg.resolution, cfg.resolution),
                        |(p, q)| a[[p * factor, q * factor]],
                    );
                    let u_out = Array2::from_shape_fn(
                        (cfg.resolution, cfg.resolution),
                        |(p, q)| u[[p * factor, q * factor]],
                    );
                    Ok((a_out, u_out))
                })
                .collect();
            let rows = rows?;
            let mut inputs = Array3::zeros((cfg.n_samples, cfg.resolution, cfg.resolution));
            let mut outputs = Array3::zeros((cfg.n_samples, cfg.resolution, cfg.resolution));
            for (i, (a, u)) in rows.into_iter().enumerate() {
                inputs.index_axis_mut(Axis(0), i).assign(&a);
                outputs.index_axis_mut(Axis(0), i).assign(&u);
            }
            Ok(PdeDataset {
                equation: cfg.equation.name().into(),
                inputs: FieldData::Two(inputs),
                outputs: FieldData::Two(outputs),
                metadata,
            })
        }
    }
}
