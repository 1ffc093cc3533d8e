//! Gauged Noether generators of QFIs and the round trip back to the integral.

use qfi_core::constraints::Potential;
use qfi_core::named::reference_set;
use qfi_core::phase::PhaseFunction;

fn main() -> qfi_core::Result<()> {
    let v = Potential::parse(3, "-1/r")?;
    for named in reference_set(&v).into_iter().take(5) {
        let gen = named.qfi.noether_generator();
        println!("{}:", named.name);
        for line in gen.display_lines() {
            println!("  {line}");
        }
        let back = PhaseFunction::from_qfi(&gen.to_qfi())?;
        let same = back.sub(&PhaseFunction::from_qfi(&named.qfi)?)?.is_zero();
        println!("  recovers the integral: {same}");
    }
    Ok(())
}
