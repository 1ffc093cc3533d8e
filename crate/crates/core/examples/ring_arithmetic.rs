//! Arithmetic in the radial ring `Q[x, y, z, r, 1/r]` with `r^2 = x^2 + y^2 + z^2`.

use qfi_core::parse::parse_ring_elem;
use qfi_core::ring::{rat, RingElem};

fn main() -> qfi_core::Result<()> {
    let r = RingElem::radial_pow(3, 1);
    println!("r * r        = {}", &r * &r);

    let a = parse_ring_elem(3, "x/r^3 + 2*y")?;
    let b = parse_ring_elem(3, "r^2 - z")?;
    println!("a            = {a}");
    println!("b            = {b}");
    println!("a * b        = {}", &a * &b);
    println!("d/dx (1/r)   = {}", RingElem::radial_pow(3, -1).partial(0));
    println!("grad a       = [{}]", a.gradient().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "));
    println!("a(1, 2, 2)   = {}", a.evaluate(&[1.0, 2.0, 2.0])?);
    println!("3/4 * b      = {}", b.scale(&rat(3, 4)));
    Ok(())
}
