//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mwt_core::model::checkpoint;
use mwt_core::model::train::evaluate;
use mwt_core::pdedata::{generate, subsample_1d, subsample_2d, FieldData, PdeDataset};
use mwt_core::transform::{decompose, project_kernel, reconstruct, NamedKernel};
use mwt_core::{
    build_filters, derive_psi, train, validate_filters, BasisKind, Error, OperatorModel, Result,
};

use crate::config::RunConfig;

fn fmt12(v: f64) -> String {
    format!("{v:.12}")
}

fn write_matrix_csv(path: &Path, m: &Array2<f64>) -> Result<()> {
    let mut out = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|&v| fmt12(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// `filters`: derive the bank, export CSV matrices and the constraint
/// residual; optionally dump the φ/ψ coefficient tables.
pub fn cmd_filters(kind: BasisKind, k: usize, out_dir: &Path, dump_basis: bool) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    let bank = build_filters(kind, k)?;
    for (name, m) in [
        ("h0", &bank.h0),
        ("h1", &bank.h1),
        ("g0", &bank.g0),
        ("g1", &bank.g1),
        ("sigma0", &bank.sigma0),
        ("sigma1", &bank.sigma1),
    ] {
        write_matrix_csv(&out_dir.join(format!("{name}.csv")), m)?;
    }
    let residual = validate_filters(&bank);
    fs::write(
        out_dir.join("residual.txt"),
        format!("constraint_residual={residual:.3e}\n"),
    )?;
    if dump_basis {
        let basis = mwt_core::make_basis(kind, k)?;
        let mut out = String::new();
        for coeffs in &basis.coeffs {
            let cells: Vec<String> = coeffs.iter().map(|&v| fmt12(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        fs::write(out_dir.join("phi.csv"), out)?;
        let psi = derive_psi(kind, k)?;
        for (name, pieces) in [("psi_left", &psi.left), ("psi_right", &psi.right)] {
            let mut out = String::new();
            for coeffs in pieces {
                let cells: Vec<String> = coeffs.iter().map(|&v| fmt12(v)).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            fs::write(out_dir.join(format!("{name}.csv")), out)?;
        }
    }
    println!(
        "{} k={k}: wrote filter matrices to {}, constraint residual {residual:.3e}",
        kind.name(),
        out_dir.display()
    );
    if residual > 1e-8 {
        return Err(Error::FilterValidation { residual });
    }
    Ok(())
}

/// `transform selftest`: decompose/reconstruct round trips on random data.
pub fn cmd_transform_selftest(
    kind: BasisKind,
    k: usize,
    levels: usize,
    samples: usize,
    seed: u64,
) -> Result<()> {
    let bank = build_filters(kind, k)?;
    let len = 1usize << levels;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let fine = Array2::from_shape_fn((k, len), |_| rng.gen_range(-1.0..1.0));
        let coeffs = decompose(&bank, &fine, 0)?;
        let back = reconstruct(&bank, &coeffs)?;
        let diff = (&back - &fine).mapv(|v| v * v).sum().sqrt();
        let norm = fine.mapv(|v| v * v).sum().sqrt();
        worst = worst.max(diff / norm);
    }
    println!(
        "round-trip {} k={k} N={levels}: max relative residual {worst:.3e} over {samples} samples",
        kind.name()
    );
    if worst > 1e-9 {
        return Err(Error::SolverFailure(format!(
            "round-trip residual {worst:.3e} exceeds 1e-9"
        )));
    }
    Ok(())
}

fn projection_csvs(
    kernel: NamedKernel,
    kind: BasisKind,
    k: usize,
    levels: usize,
    threshold: f64,
    out: &Path,
) -> Result<f64> {
    let bank = build_filters(kind, k)?;
    let proj = project_kernel(|x, y| kernel.eval(x, y), &bank, levels, 0, threshold)?;
    let mut mask = String::from("block,scale,row,col,value\n");
    for (block, scale, row, col, value) in proj.mask_entries() {
        mask.push_str(&format!("{block},{scale},{row},{col},{}\n", fmt12(value)));
    }
    fs::write(out, mask)?;
    let mut frac = String::from("block,scale,fraction\n");
    for (block, scale, fraction) in proj.sparsity_fractions() {
        frac.push_str(&format!("{block},{scale},{fraction:.6}\n"));
    }
    let frac_path = sibling(out, "_sparsity");
    fs::write(&frac_path, frac)?;
    // aggregate fraction over the wavelet-wavelet blocks
    let total: usize = proj.a_blocks.iter().map(|a| a.len()).sum();
    let above: usize = proj
        .a_blocks
        .iter()
        .map(|a| a.iter().filter(|v| v.abs() > threshold).count())
        .sum();
    Ok(above as f64 / total as f64)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let ext = path
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}{ext}"))
}

/// `transform kernel`: full non-standard mask dump.
pub fn cmd_transform_kernel(
    kernel: NamedKernel,
    kind: BasisKind,
    k: usize,
    levels: usize,
    threshold: f64,
    out: &Path,
) -> Result<()> {
    let frac = projection_csvs(kernel, kind, k, levels, threshold, out)?;
    println!(
        "{} kernel, {} k={k} N={levels}: wrote mask to {}, A-block fraction {frac:.4}",
        kernel.name(),
        kind.name(),
        out.display()
    );
    Ok(())
}

/// `kernelviz`: per-block sparsity fractions plus mask coordinates.
pub fn cmd_kernelviz(
    kernel: NamedKernel,
    kind: BasisKind,
    k: usize,
    levels: usize,
    threshold: f64,
    out: &Path,
) -> Result<()> {
    let frac = projection_csvs(kernel, kind, k, levels, threshold, out)?;
    println!(
        "{} kernel, {} k={k} N={levels}: A-block fraction above {threshold:.1e} = {frac:.4}",
        kernel.name(),
        kind.name()
    );
    Ok(())
}

/// `datagen`: generate a dataset per the config and write it with a
/// canonical config copy.
pub fn cmd_datagen(config_path: &Path, out_override: Option<&Path>) -> Result<PathBuf> {
    let cfg = RunConfig::load(config_path)?;
    let gen = cfg.gen_config()?;
    let dataset = generate(&gen)?;
    let out = match out_override {
        Some(p) => p.to_path_buf(),
        None => {
            let dir = cfg.out_dir();
            fs::create_dir_all(&dir)?;
            dir.join(format!(
                "{}_s{}_n{}_seed{}.mwtd",
                gen.equation.name(),
                gen.resolution,
                gen.n_samples,
                gen.seed
            ))
        }
    };
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    dataset.save(&out)?;
    fs::write(sibling(&out, "_config"), cfg.canonical())?;
    println!(
        "wrote {} samples of `{}` at resolution {} to {}",
        dataset.inputs.n_samples(),
        dataset.equation,
        dataset.inputs.resolution(),
        out.display()
    );
    Ok(out)
}

/// `train`: fit a model on the dataset's leading n_train samples, test on
/// the next n_test, write checkpoint + metrics CSV.
pub fn cmd_train(
    config_path: &Path,
    data_override: Option<&Path>,
    out_override: Option<&Path>,
) -> Result<f64> {
    let cfg = RunConfig::load(config_path)?;
    let data_path = match data_override {
        Some(p) => p.to_path_buf(),
        None => cfg
            .data_path()
            .ok_or_else(|| Error::Format("no data_path in config and no --data flag".into()))?,
    };
    let dataset = PdeDataset::load(&data_path)?;
    let two_d = matches!(dataset.inputs, FieldData::Two(_));
    let model_cfg = cfg.model_config(two_d)?;
    let train_cfg = cfg.train_config()?;
    let n_train = cfg.n_train()?;
    let n_test = cfg.n_test()?;
    let train_pairs = dataset.pairs(0, n_train)?;
    let test_pairs = dataset.pairs(n_train, n_test)?;

    let mut model = OperatorModel::new(model_cfg, train_cfg.seed)?;
    let history = train(&mut model, train_pairs, test_pairs, &train_cfg)?;

    let out_dir = out_override
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| cfg.out_dir());
    fs::create_dir_all(&out_dir)?;
    checkpoint::save(&model, &out_dir.join("model.mwtm"))?;
    let mut csv = String::from("epoch,train_rel_l2,test_rel_l2,lr,wall_seconds\n");
    for row in &history {
        csv.push_str(&format!(
            "{},{:.9},{:.9},{:.9},{:.3}\n",
            row.epoch, row.train_rel_l2, row.test_rel_l2, row.lr, row.wall_seconds
        ));
    }
    fs::write(out_dir.join("metrics.csv"), csv)?;
    fs::write(out_dir.join("config_used.txt"), cfg.canonical())?;
    let final_test = evaluate(&model, &dataset.pairs(n_train, n_test)?)?;
    println!("final test relative L2: {final_test:.6}");
    Ok(final_test)
}

/// `eval`: mean relative L2 of a checkpoint over a dataset, optionally at a
/// subsampled resolution.
pub fn cmd_eval(
    checkpoint_path: &Path,
    data_path: &Path,
    resolution: Option<usize>,
) -> Result<f64> {
    let model = checkpoint::load(checkpoint_path)?;
    let dataset = PdeDataset::load(data_path)?;
    let two_d = matches!(dataset.inputs, FieldData::Two(_));
    if two_d != model.config.two_d {
        return Err(Error::Incompatible(
            "checkpoint dimensionality does not match the dataset".into(),
        ));
    }
    let native = dataset.inputs.resolution();
    let target = resolution.unwrap_or(native);
    if target > native || native % target != 0 || !target.is_power_of_two() {
        return Err(Error::Incompatible(format!(
            "cannot evaluate a resolution-{native} dataset at {target}"
        )));
    }
    let factor = native / target;
    let reduced: PdeDataset;
    let ds = if factor == 1 {
        &dataset
    } else {
        let shrink = |data: &FieldData| -> Result<FieldData> {
            Ok(match data {
                FieldData::One(a) => {
                    let mut out = Array2::zeros((a.nrows(), target));
                    for (i, row) in a.outer_iter().enumerate() {
                        out.row_mut(i).assign(&subsample_1d(&row.to_owned(), factor)?);
                    }
                    FieldData::One(out)
                }
                FieldData::Two(a) => {
                    let n = a.dim().0;
                    let mut out = ndarray::Array3::zeros((n, target, target));
                    for i in 0..n {
                        let field = a.index_axis(ndarray::Axis(0), i).to_owned();
                        out.index_axis_mut(ndarray::Axis(0), i)
                            .assign(&subsample_2d(&field, factor)?);
                    }
                    FieldData::Two(out)
                }
            })
        };
        reduced = PdeDataset {
            equation: dataset.equation.clone(),
            inputs: shrink(&dataset.inputs)?,
            outputs: shrink(&dataset.outputs)?,
            metadata: dataset.metadata.clone(),
        };
        &reduced
    };
    let n = ds.inputs.n_samples();
    let score = evaluate(&model, &ds.pairs(0, n)?)?;
    println!("mean relative L2 over {n} samples at resolution {target}: {score:.6}");
    Ok(score)
}
