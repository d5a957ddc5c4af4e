// Compare the exact wavelet covariance of a bivariate FIN with its
// large-scale power law, and show the Upsilon attenuation.

use fracconn::model::{
    asymptotic_wavelet_covariance, numerical_wavelet_covariance, theoretical_connectivity, upsilon, FinSpec,
};

fn main() {
    let spec = FinSpec::from_parts(&[-0.1, 0.35], &[vec![1.0, 0.6], vec![0.6, 1.0]]).expect("valid spec");
    for j in 1..=10 {
        let exact = numerical_wavelet_covariance(&spec, 0, 1, j).expect("quadrature");
        let asym = asymptotic_wavelet_covariance(&spec, 0, 1, j).expect("asymptote");
        println!("j={j:2} exact={exact:+.6e} power-law={asym:+.6e} ratio-1={:+.2e}", exact / asym - 1.0);
    }
    let (d, rho_inf) = theoretical_connectivity(&spec).expect("connectivity");
    println!("D = {:.4}  rho_inf = {:.4}  Upsilon = {:.4}", d[(0, 1)], rho_inf[(0, 1)], upsilon(-0.1, 0.35));
    assert!((rho_inf[(0, 1)] - d[(0, 1)] * upsilon(-0.1, 0.35)).abs() < 1e-12);
}
