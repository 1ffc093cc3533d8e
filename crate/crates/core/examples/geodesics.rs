//! Free motion: the QFIs are exactly the quadratic forms in the Killing tensors.

use qfi_core::constraints::{solve_integral1, solve_integral2, Potential};
use qfi_core::geometry::GeometryConfig;

fn main() -> qfi_core::Result<()> {
    for dim in [2, 3] {
        let g = GeometryConfig::new(dim)?;
        let v = Potential::parse(dim, "0")?;
        let i1 = solve_integral1(&g, &v)?;
        let i2 = solve_integral2(&g, &v)?;
        println!(
            "E{dim}: {} autonomous QFIs, {} time-linear QFIs, {} linear integrals",
            i1.dimension(),
            i2.dimension(),
            i2.lfis.len()
        );
        for q in i2.basis.iter().take(3) {
            println!("  {}", q.canonical_display());
        }
    }
    Ok(())
}
