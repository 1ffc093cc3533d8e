//! Time-exponential integrals of the repulsive oscillator `V = -k r^2`.

use qfi_core::constraints::Potential;
use qfi_core::exponential::{build_pencil, critical_rates, solve_integral3};
use qfi_core::geometry::GeometryConfig;
use qfi_core::phase::is_first_integral;
use qfi_core::ring::format_rational;

fn main() -> qfi_core::Result<()> {
    let g = GeometryConfig::new(3)?;
    for src in ["-r^2", "-3*r^2", "-1/r"] {
        let v = Potential::parse(3, src)?;
        let pencil = build_pencil(&g, &v)?;
        let rates = critical_rates(&pencil);
        println!("V = {src}: pencil with {} unknowns, generic rank {}", pencil.ncols(), rates.generic_rank);

        let result = solve_integral3(&g, &v)?;
        for s in &result.solutions {
            println!("  mu = {}: {} vectors", format_rational(&s.mu), s.l_params.len());
        }
        if let Some(first) = result.solutions.first() {
            let q = &first.qfis[0];
            println!("  example: {}", q.canonical_display());
            println!("  conserved: {}", is_first_integral(q, v.expr())?);
        }
    }
    Ok(())
}
