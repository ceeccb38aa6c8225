use mwt_core::pdedata::{generate, Equation, GenConfig};

fn main() {
    let dir = std::path::PathBuf::from("/tmp/mwt_probe");
    std::fs::create_dir_all(&dir).unwrap();
    let t0 = std::time::Instant::now();
    let gen = GenConfig {
        equation: Equation::Burgers,
        n_samples: 250,
        resolution: 512,
        seed: 0,
        ..GenConfig::default()
    };
    let ds = generate(&gen).unwrap();
    ds.save(&dir.join("burgers512.mwtd")).unwrap();
    println!("burgers: {:.0} s", t0.elapsed().as_secs_f64());
    let t0 = std::time::Instant::now();
    let gen = GenConfig {
        equation: Equation::Beam4,
        n_samples: 250,
        resolution: 256,
        seed: 0,
        ..GenConfig::default()
    };
    let ds = generate(&gen).unwrap();
    ds.save(&dir.join("beam256.mwtd")).unwrap();
    println!("beam: {:.0} s", t0.elapsed().as_secs_f64());
}
