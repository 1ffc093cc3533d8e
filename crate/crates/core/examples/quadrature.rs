//! Closed-form trajectories of `V = -k r^2` from the time-exponential integrals,
//! compared with a numerical solution.

use qfi_core::constraints::Potential;
use qfi_core::dynamics::{integrate, quadrature_solution};
use qfi_core::ring::rat;

fn main() -> qfi_core::Result<()> {
    let q0 = [1.0, 0.2, -0.3];
    let v0 = [0.1, 0.9, 0.4];
    for k in [rat(1, 1), rat(-1, 2)] {
        let sol = quadrature_solution(3, &k, &q0, &v0)?;
        let v = Potential::power_law(3, -k.clone(), -2);
        let traj = integrate(&v, &q0, &v0, 3.0, 1e-3)?;
        let q = sol.position(3.0);
        println!(
            "k = {k}: lambda = {}, q(3) = ({:.6}, {:.6}, {:.6}), sup |q - q_rk4| = {:.2e}",
            sol.lambda,
            q[0],
            q[1],
            q[2],
            sol.sup_error(&traj)
        );
    }
    Ok(())
}
