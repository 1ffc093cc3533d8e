//! The Killing tensor and L-family bases, and the Killing equation itself.

use qfi_core::geometry::{kt_basis, kt_condition, kt_param_names, l_family_basis, symm_deriv, GeometryConfig};

fn main() -> qfi_core::Result<()> {
    for dim in [2, 3] {
        let g = GeometryConfig::new(dim)?;
        let kts = kt_basis(&g);
        let ls = l_family_basis(&g);
        let killing_vectors = ls.iter().filter(|l| symm_deriv(l).is_zero()).count();
        println!(
            "E{dim}: {} Killing tensor parameters ({}), {} L-family vectors, {} of them Killing vectors",
            kts.len(),
            kt_param_names(&g).join(" "),
            ls.len(),
            killing_vectors
        );
        let ok = kts.iter().all(|k| kt_condition(k).iter().all(|e| e.is_zero()));
        println!("  every basis tensor satisfies C_(ab;c) = 0: {ok}");
    }

    let g = GeometryConfig::new(3)?;
    let l = &l_family_basis(&g)[1];
    let c = symm_deriv(l);
    println!("L = ({})", l.components().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "));
    for a in 0..3 {
        let row: Vec<String> = (0..3).map(|b| c.get(a, b).to_string()).collect();
        println!("  L_(a;b)[{a}] = [{}]", row.join(", "));
    }
    Ok(())
}
