use mwt_core::pdedata::{grf, solve_burgers, GrfSpec};

fn main() {
    let spec = GrfSpec { sigma_sq: 5f64.powi(4), tau: 5.0, alpha: 2.0, dims: 1, periodic: true };
    let u0 = grf::sample_grf_1d_on(&spec, 8192, 2.0 * std::f64::consts::PI, 99).unwrap();
    let t = std::time::Instant::now();
    let _ = solve_burgers(&u0, 0.1, 1.0).unwrap();
    println!("one burgers solve: {:.2} s", t.elapsed().as_secs_f64());
}
