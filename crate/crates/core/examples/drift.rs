//! Numerical conservation of the computed integrals along RK4 trajectories.

use qfi_core::cli::{discover, parse_families};
use qfi_core::constraints::Potential;
use qfi_core::dynamics::{drift_table, rk4_order_check, DriftConfig};
use qfi_core::geometry::GeometryConfig;

fn main() -> qfi_core::Result<()> {
    let (d1, d2, ratio) = rk4_order_check(0.01, 5.0)?;
    println!("RK4 global error {d1:.2e} at h, {d2:.2e} at h/2, ratio {ratio:.1}");

    let cfg = DriftConfig { t_end: 5.0, seeds: 4, ..DriftConfig::default() };
    for src in ["-1/r", "1/2*r^2", "-1/r^2"] {
        let g = GeometryConfig::new(3)?;
        let v = Potential::parse(3, src)?;
        let qfis = discover(&g, &v, &parse_families("all")?)?.all_qfis();
        let table = drift_table(&v, &qfis, &cfg)?;
        println!("V = {src}: {} integrals, max drift {:.2e}", qfis.len(), table.max_drift());
    }
    Ok(())
}
