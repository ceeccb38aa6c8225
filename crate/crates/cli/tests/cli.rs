//! End-to-end checks of the `mwt` binary: exit codes, file formats,
//! determinism, and the identity-task training sanity run.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mwt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mwt"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mwt_cli_{name}_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn parse_csv_row(line: &str) -> Vec<f64> {
    line.split(',').map(|v| v.parse().unwrap()).collect()
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn filters_legendre_k3_first_row() {
    let dir = tmp("filters_k3");
    let out = mwt()
        .args(["filters", "--kind", "legendre", "--k", "3"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_success(&out);
    let h0 = std::fs::read_to_string(dir.join("h0.csv")).unwrap();
    let row = parse_csv_row(h0.lines().next().unwrap());
    assert!((row[0] - 0.5f64.sqrt()).abs() < 1e-10);
    assert_eq!(row[1], 0.0);
    assert_eq!(row[2], 0.0);
    let residual = std::fs::read_to_string(dir.join("residual.txt")).unwrap();
    assert!(residual.starts_with("constraint_residual="));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn filters_order_one_is_haar_like() {
    let dir = tmp("filters_k1");
    let out = mwt()
        .args(["filters", "--kind", "legendre", "--k", "1", "--dump-basis"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_success(&out);
    for name in ["h0", "h1", "g0", "g1"] {
        let text = std::fs::read_to_string(dir.join(format!("{name}.csv"))).unwrap();
        let row = parse_csv_row(text.lines().next().unwrap());
        assert_eq!(row.len(), 1);
        assert!((row[0].abs() - 0.5f64.sqrt()).abs() < 1e-10, "{name}");
    }
    assert!(dir.join("phi.csv").exists());
    assert!(dir.join("psi_left.csv").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn filters_rejects_unsupported_order() {
    let out = mwt()
        .args(["filters", "--kind", "legendre", "--k", "9", "--out", "/tmp/never"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("1..=6"), "stderr: {stderr}");
}

#[test]
fn transform_selftest_passes() {
    let out = mwt()
        .args(["transform", "selftest", "--kind", "chebyshev", "--k", "3", "--levels", "6"])
        .output()
        .unwrap();
    assert_success(&out);
}

#[test]
fn datagen_is_deterministic_and_well_formed() {
    let dir = tmp("datagen");
    let config = write_config(
        &dir,
        "burgers.cfg",
        "equation=burgers\nn_train=2\nn_test=0\nresolution=256\nseed=0\nt_end=0.05\n",
    );
    let out1 = dir.join("a.mwtd");
    let out2 = dir.join("b.mwtd");
    for out in [&out1, &out2] {
        let result = mwt()
            .arg("datagen")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        assert_success(&result);
    }
    let bytes1 = std::fs::read(&out1).unwrap();
    let bytes2 = std::fs::read(&out2).unwrap();
    assert_eq!(bytes1, bytes2, "same seed must give byte-identical files");
    assert!(dir.join("a_config.mwtd").exists() || dir.join("a_config").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn datagen_kdv_file_length_matches_header_arithmetic() {
    let dir = tmp("kdvlen");
    let config = write_config(
        &dir,
        "kdv.cfg",
        "equation=kdv\nn_train=1\nn_test=0\nresolution=1024\nseed=1\nt_end=0.01\n",
    );
    let path = dir.join("kdv.mwtd");
    let out = mwt()
        .arg("datagen")
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert_success(&out);
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..4], b"MWTD");
    // walk the header to compute the expected length
    let mut pos = 5; // magic + version
    let name_len = u16::from_le_bytes([bytes[pos], bytes[pos + 1]]) as usize;
    pos += 2 + name_len;
    let meta_count = u16::from_le_bytes([bytes[pos], bytes[pos + 1]]) as usize;
    pos += 2;
    for _ in 0..meta_count {
        let klen = u16::from_le_bytes([bytes[pos], bytes[pos + 1]]) as usize;
        pos += 2 + klen;
        let vlen = u16::from_le_bytes([bytes[pos], bytes[pos + 1]]) as usize;
        pos += 2 + vlen;
    }
    let ndim = bytes[pos];
    pos += 1;
    let n = u64::from_le_bytes(bytes[pos..pos + 8].try_into().unwrap()) as usize;
    pos += 8;
    let res = u64::from_le_bytes(bytes[pos..pos + 8].try_into().unwrap()) as usize;
    pos += 8;
    assert_eq!(ndim, 1);
    assert_eq!((n, res), (1, 1024));
    assert_eq!(bytes.len(), pos + 2 * n * res * 8);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn datagen_darcy_coefficients_stay_positive() {
    let dir = tmp("darcygen");
    let config = write_config(
        &dir,
        "darcy.cfg",
        "equation=darcy\nn_train=2\nn_test=0\nresolution=16\nseed=2\nsolver_factor=2\n",
    );
    let path = dir.join("darcy.mwtd");
    let out = mwt()
        .arg("datagen")
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert_success(&out);
    let ds = mwt_core::pdedata::PdeDataset::load(&path).unwrap();
    match ds.inputs {
        mwt_core::pdedata::FieldData::Two(a) => {
            assert!(a.iter().all(|&v| v > 0.0));
        }
        _ => panic!("darcy data should be 2-D"),
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn datagen_rejects_unknown_config_keys() {
    let dir = tmp("badkey");
    let config = write_config(&dir, "bad.cfg", "equation=burgers\nbogus_key=1\n");
    let out = mwt()
        .arg("datagen")
        .arg("--config")
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn mwt_seed_env_overrides_config() {
    let dir = tmp("envseed");
    let config = write_config(
        &dir,
        "id.cfg",
        "equation=identity\nn_train=2\nn_test=0\nresolution=64\nseed=0\n",
    );
    let base = dir.join("seed0.mwtd");
    let overridden = dir.join("seed9.mwtd");
    assert_success(
        &mwt()
            .arg("datagen")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&base)
            .output()
            .unwrap(),
    );
    assert_success(
        &mwt()
            .arg("datagen")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&overridden)
            .env("MWT_SEED", "9")
            .output()
            .unwrap(),
    );
    assert_ne!(
        std::fs::read(&base).unwrap(),
        std::fs::read(&overridden).unwrap()
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn train_zero_epochs_writes_initialization_and_empty_metrics() {
    let dir = tmp("train0");
    let data_cfg = write_config(
        &dir,
        "data.cfg",
        "equation=identity\nn_train=4\nn_test=2\nresolution=32\nseed=3\n",
    );
    let data = dir.join("id.mwtd");
    assert_success(
        &mwt()
            .arg("datagen")
            .arg("--config")
            .arg(&data_cfg)
            .arg("--out")
            .arg(&data)
            .output()
            .unwrap(),
    );
    let train_cfg = write_config(
        &dir,
        "train.cfg",
        "equation=identity\nn_train=4\nn_test=2\nk=2\nlayers=1\nepochs=0\nseed=3\n",
    );
    let out_dir = dir.join("run");
    assert_success(
        &mwt()
            .arg("train")
            .arg("--config")
            .arg(&train_cfg)
            .arg("--data")
            .arg(&data)
            .arg("--out")
            .arg(&out_dir)
            .output()
            .unwrap(),
    );
    let metrics = std::fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 1, "expected header-only CSV");
    // checkpoint equals the deterministic initialization
    let loaded = mwt_core::model::checkpoint::load(&out_dir.join("model.mwtm")).unwrap();
    let fresh = mwt_core::OperatorModel::new(loaded.config, 3).unwrap();
    assert_eq!(loaded.params(), fresh.params());
    assert!(out_dir.join("config_used.txt").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn train_rerun_same_seed_gives_identical_metrics() {
    let dir = tmp("trainrerun");
    let data_cfg = write_config(
        &dir,
        "data.cfg",
        "equation=identity\nn_train=6\nn_test=2\nresolution=32\nseed=4\n",
    );
    let data = dir.join("id.mwtd");
    assert_success(
        &mwt()
            .arg("datagen")
            .arg("--config")
            .arg(&data_cfg)
            .arg("--out")
            .arg(&data)
            .output()
            .unwrap(),
    );
    let train_cfg = write_config(
        &dir,
        "train.cfg",
        "equation=identity\nn_train=6\nn_test=2\nk=2\nlayers=1\nepochs=2\nbatch_size=3\nseed=4\n",
    );
    let run = |out_dir: &Path| {
        assert_success(
            &mwt()
                .arg("train")
                .arg("--config")
                .arg(&train_cfg)
                .arg("--data")
                .arg(&data)
                .arg("--out")
                .arg(out_dir)
                .output()
                .unwrap(),
        );
        std::fs::read_to_string(out_dir.join("metrics.csv")).unwrap()
    };
    let m1 = run(&dir.join("run1"));
    let m2 = run(&dir.join("run2"));
    // wall-clock column differs; compare the numeric columns
    let strip = |csv: &str| -> Vec<String> {
        csv.lines()
            .map(|l| l.rsplitn(2, ',').nth(1).unwrap_or(l).to_string())
            .collect()
    };
    assert_eq!(strip(&m1), strip(&m2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn identity_task_trains_below_one_percent() {
    let dir = tmp("identity_task");
    let data_cfg = write_config(
        &dir,
        "data.cfg",
        "equation=identity\nn_train=200\nn_test=20\nresolution=64\nseed=5\n",
    );
    let data = dir.join("id.mwtd");
    assert_success(
        &mwt()
            .arg("datagen")
            .arg("--config")
            .arg(&data_cfg)
            .arg("--out")
            .arg(&data)
            .output()
            .unwrap(),
    );
    let train_cfg = write_config(
        &dir,
        "train.cfg",
        "equation=identity\nn_train=200\nn_test=20\nbasis=legendre\nk=4\nlayers=2\nepochs=50\nseed=5\n",
    );
    let out_dir = dir.join("run");
    let out = mwt()
        .arg("train")
        .arg("--config")
        .arg(&train_cfg)
        .arg("--data")
        .arg(&data)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_success(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let final_err: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("final test relative L2: "))
        .expect("final error line")
        .trim()
        .parse()
        .unwrap();
    assert!(final_err < 0.01, "identity task stalled at {final_err}");

    // eval on the training file reproduces a sub-1% error and the
    // resolution override equal to native matches exactly
    let eval = |args: &[&str]| -> f64 {
        let mut cmd = mwt();
        cmd.arg("eval")
            .arg("--checkpoint")
            .arg(out_dir.join("model.mwtm"))
            .arg("--data")
            .arg(&data);
        for a in args {
            cmd.arg(a);
        }
        let out = cmd.output().unwrap();
        assert_success(&out);
        String::from_utf8_lossy(&out.stdout)
            .lines()
            .last()
            .unwrap()
            .rsplit(' ')
            .next()
            .unwrap()
            .parse()
            .unwrap()
    };
    let native = eval(&[]);
    let with_override = eval(&["--resolution", "64"]);
    assert_eq!(native, with_override);
    assert!(native < 0.02, "eval on train data gave {native}");

    // cross-resolution: same checkpoint applied to a resolution-128 set
    let hi_cfg = write_config(
        &dir,
        "hi.cfg",
        "equation=identity\nn_train=4\nn_test=0\nresolution=128\nseed=6\n",
    );
    let hi_data = dir.join("hi.mwtd");
    assert_success(
        &mwt()
            .arg("datagen")
            .arg("--config")
            .arg(&hi_cfg)
            .arg("--out")
            .arg(&hi_data)
            .output()
            .unwrap(),
    );
    let out = mwt()
        .arg("eval")
        .arg("--checkpoint")
        .arg(out_dir.join("model.mwtm"))
        .arg("--data")
        .arg(&hi_data)
        .output()
        .unwrap();
    assert_success(&out);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eval_rejects_upsampling_requests() {
    let dir = tmp("evalbad");
    let data_cfg = write_config(
        &dir,
        "data.cfg",
        "equation=identity\nn_train=2\nn_test=0\nresolution=32\nseed=7\n",
    );
    let data = dir.join("id.mwtd");
    assert_success(
        &mwt()
            .arg("datagen")
            .arg("--config")
            .arg(&data_cfg)
            .arg("--out")
            .arg(&data)
            .output()
            .unwrap(),
    );
    let train_cfg = write_config(
        &dir,
        "train.cfg",
        "equation=identity\nn_train=1\nn_test=1\nk=1\nlayers=1\nepochs=0\nseed=7\n",
    );
    let out_dir = dir.join("run");
    assert_success(
        &mwt()
            .arg("train")
            .arg("--config")
            .arg(&train_cfg)
            .arg("--data")
            .arg(&data)
            .arg("--out")
            .arg(&out_dir)
            .output()
            .unwrap(),
    );
    let out = mwt()
        .arg("eval")
        .arg("--checkpoint")
        .arg(out_dir.join("model.mwtm"))
        .arg("--data")
        .arg(&data)
        .args(["--resolution", "64"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn kernelviz_polynomial_kernel_is_empty() {
    let dir = tmp("kviz");
    let out_file = dir.join("mask.csv");
    let out = mwt()
        .args(["kernelviz", "--kernel", "polynomial", "--kind", "legendre", "--k", "4", "--levels", "5"])
        .arg("--out")
        .arg(&out_file)
        .output()
        .unwrap();
    assert_success(&out);
    let sparsity = std::fs::read_to_string(dir.join("mask_sparsity.csv")).unwrap();
    for line in sparsity.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let fraction: f64 = fields[2].parse().unwrap();
        if fields[0] != "T" {
            assert_eq!(fraction, 0.0, "block {} scale {}", fields[0], fields[1]);
        }
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn kernelviz_rejects_unknown_kernels() {
    let out = mwt()
        .args(["kernelviz", "--kernel", "sombrero", "--out", "/tmp/never.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn kernelviz_gaussian_band_fraction_below_threshold() {
    let dir = tmp("kvizgauss");
    let out_file = dir.join("mask.csv");
    let out = mwt()
        .args(["kernelviz", "--kernel", "gaussian", "--kind", "legendre", "--k", "4", "--levels", "6"])
        .arg("--out")
        .arg(&out_file)
        .output()
        .unwrap();
    assert_success(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let fraction: f64 = stdout
        .trim()
        .rsplit(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(fraction < 0.3, "reported fraction {fraction}");
    std::fs::remove_dir_all(&dir).ok();
}
