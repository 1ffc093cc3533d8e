//! Poisson brackets between the classical integrals of central potentials.

use qfi_core::constraints::Potential;
use qfi_core::named::{bracket_identities, involution_matrix, reference_set};
use qfi_core::phase::{functional_rank, PhaseFunction};

fn main() -> qfi_core::Result<()> {
    for src in ["-1/r", "1/2*r^2", "-1/r^2"] {
        let v = Potential::parse(3, src)?;
        println!("V = {src}");
        for check in bracket_identities(&v)? {
            println!("  {:5} {}", check.holds, check.name);
        }
        let set = reference_set(&v);
        let fs: Vec<PhaseFunction> = set.iter().map(|n| PhaseFunction::from_qfi(&n.qfi)).collect::<Result<_, _>>()?;
        let names: Vec<&str> = set.iter().map(|n| n.name.as_str()).collect();
        println!("  {}", names.join(" "));
        for (name, row) in names.iter().zip(involution_matrix(&fs)?) {
            let cells: String = row.iter().map(|&c| if c { '0' } else { '*' }).collect();
            println!("  {name:>4} {cells}");
        }
        println!("  functional rank {} of {}", functional_rank(&fs, 20, 7)?, fs.len());
    }
    Ok(())
}
