// Tabulate the fractal-to-nonfractal attenuation Upsilon over Hurst exponents.

use fracconn::cli::cmd_grid;
use fracconn::model::upsilon;

fn main() {
    let out = cmd_grid().expect("grid");
    let table = String::from_utf8(out.get("upsilon_grid.csv").expect("grid file").to_vec()).expect("utf-8");
    println!("{} grid cells", table.lines().count() - 1);
    for (h1, h2) in [(0.5, 0.5), (0.5, 0.9), (0.1, 0.9), (0.3, 0.7)] {
        println!("H=({h1}, {h2}) Upsilon {:.4}", upsilon(h1 - 0.5, h2 - 0.5));
    }
}
