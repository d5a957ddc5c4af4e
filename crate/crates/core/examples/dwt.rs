// Decompose a simulated long-memory series and read off its wavelet variances.

use fracconn::simulate::{simulate_arfima, ArfimaSpec, SimulationOptions};
use fracconn::wavelet::{default_levels, dwt, wavelet_variance, FilterKind};

fn main() {
    let spec = ArfimaSpec::white(&[0.3], 11).expect("valid spec");
    let sim = simulate_arfima(&spec, 4096, SimulationOptions::default()).expect("simulation");
    let x = &sim.series[0];

    let filter = FilterKind::La8.filter();
    let levels = default_levels(x.len());
    let decomp = dwt(x, &filter, levels).expect("decomposition");

    let energy_in: f64 = x.iter().map(|v| v * v).sum();
    let energy_out: f64 = (1..=levels)
        .flat_map(|j| decomp.detail(j).iter())
        .chain(decomp.scaling())
        .map(|v| v * v)
        .sum();
    println!("energy ratio {:.12}", energy_out / energy_in);

    let back = decomp.reconstruct();
    let err = x.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("max reconstruction error {err:.3e}");

    // log2 nu(j) grows with slope close to 2d
    let mut prev = None;
    for j in 1..=levels {
        let nu = wavelet_variance(&decomp, j, true).expect("variance");
        let slope = prev.map(|p: f64| nu.log2() - p.log2());
        println!(
            "j={j} coeffs={:4} nu={nu:.4} slope={}",
            decomp.interior_detail(j).len(),
            slope.map_or("-".into(), |s| format!("{s:+.3}"))
        );
        prev = Some(nu);
    }
    assert!((energy_out / energy_in - 1.0).abs() < 1e-9);
}
