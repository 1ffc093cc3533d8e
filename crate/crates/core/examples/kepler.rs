//! Every autonomous QFI of the Kepler problem, and the names they reduce to.

use qfi_core::constraints::{solve_integral1, solve_integral2, Potential};
use qfi_core::geometry::GeometryConfig;
use qfi_core::named::reference_set;
use qfi_core::phase::{in_span, is_first_integral, PhaseFunction};

fn main() -> qfi_core::Result<()> {
    let g = GeometryConfig::new(3)?;
    let v = Potential::parse(3, "-1/r")?;

    let i1 = solve_integral1(&g, &v)?;
    println!("Integral 1: dimension {}", i1.dimension());
    for q in &i1.basis {
        println!("  {}", q.canonical_display());
    }
    let i2 = solve_integral2(&g, &v)?;
    println!("Integral 2: dimension {}, linear integrals {}", i2.dimension(), i2.lfis.len());
    for q in &i2.lfis {
        println!("  {}", q.canonical_display());
    }

    let span: Vec<PhaseFunction> = i1.all_qfis().iter().chain(&i2.all_qfis()).map(PhaseFunction::from_qfi).collect::<Result<_, _>>()?;
    for named in reference_set(&v) {
        let inside = in_span(&span, &PhaseFunction::from_qfi(&named.qfi)?)?;
        let conserved = is_first_integral(&named.qfi, v.expr())?;
        println!("{:>4}: conserved {conserved}, in the computed span {inside}", named.name);
    }
    Ok(())
}
