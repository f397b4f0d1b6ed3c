use nalgebra::Matrix3;

use crate::error::Result;

use super::model::rotation_matrix;
use super::types::{Equilibrium, InputMatrix, LinearModel, OutputMatrix, QuadrotorParams, StateMatrix};

/// Measured outputs: inertial position and attitude (GNSS + attitude sensing).
pub fn output_matrix() -> OutputMatrix {
    let mut c = OutputMatrix::zeros();
    for i in 0..3 {
        c[(i, i)] = 1.0;
        c[(i + 3, i + 6)] = 1.0;
    }
    c
}

/// Jacobians of the nonlinear model at a hover equilibrium.
///
/// All blocks are exact there: with zero velocities and rates every
/// state-coupling term vanishes, the velocity/attitude block reduces to
/// −(g e_z)×, and the position-kinematics block is the equilibrium rotation
/// itself (which collapses to I₃ at zero yaw).
pub fn linearize(p: &QuadrotorParams, equilibrium: &Equilibrium) -> Result<LinearModel> {
    p.validate()?;
    let mut a = StateMatrix::zeros();

    // ∂ξ̇/∂v = R(η_e)
    let r_e = rotation_matrix(&equilibrium.state.attitude);
    a.fixed_view_mut::<3, 3>(0, 3).copy_from(&r_e);

    // ∂v̇/∂η = −(g e_z)×
    let g = p.gravity;
    a[(3, 7)] = g;
    a[(4, 6)] = -g;

    // ∂η̇/∂ω = W_η(0, 0) = I₃
    a.fixed_view_mut::<3, 3>(6, 9).copy_from(&Matrix3::identity());

    let mut b = InputMatrix::zeros();
    b[(5, 0)] = 1.0 / p.mass;
    let j_inv = p
        .inertia
        .try_inverse()
        .ok_or(crate::Error::InvalidParameter("inertia tensor is singular".into()))?;
    b.fixed_view_mut::<3, 3>(9, 1).copy_from(&j_inv);

    Ok(LinearModel { a, b, c: output_matrix(), equilibrium: *equilibrium })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{hover_equilibrium, StateMatrix};
    use nalgebra::Vector3;

    #[test]
    fn position_block_is_identity_at_zero_yaw() {
        let p = QuadrotorParams::default();
        let eq = hover_equilibrium(&p, Vector3::zeros(), 0.0).unwrap();
        let m = linearize(&p, &eq).unwrap();
        let block = m.a.fixed_view::<3, 3>(0, 3);
        assert_eq!(block, Matrix3::identity().fixed_view::<3, 3>(0, 0));
    }

    #[test]
    fn gravity_block_is_minus_gravity_cross() {
        let p = QuadrotorParams { gravity: 9.2, ..Default::default() };
        let eq = hover_equilibrium(&p, Vector3::new(0.3, 0.0, 1.0), 0.9).unwrap();
        let m = linearize(&p, &eq).unwrap();
        let block = m.a.fixed_view::<3, 3>(3, 6);
        let expected = Matrix3::new(0.0, 9.2, 0.0, -9.2, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(block.clone_owned(), expected);
    }

    #[test]
    fn structural_zero_pattern_holds() {
        let p = QuadrotorParams::default();
        let eq = hover_equilibrium(&p, Vector3::zeros(), 0.3).unwrap();
        let m = linearize(&p, &eq).unwrap();

        // Last block-row of A is zero.
        assert_eq!(m.a.view((9, 0), (3, 12)).amax(), 0.0);

        // B vanishes outside the velocity/thrust and rate/torque blocks.
        let mut masked = m.b;
        masked.view_mut((3, 0), (3, 1)).fill(0.0);
        masked.view_mut((9, 1), (3, 3)).fill(0.0);
        assert_eq!(masked.amax(), 0.0);
    }

    #[test]
    fn output_matrix_selects_position_and_attitude() {
        let c = output_matrix();
        let mut x = crate::dynamics::StateVector::zeros();
        for (i, v) in x.iter_mut().enumerate() {
            *v = (i + 1) as f64;
        }
        let y = c * x;
        assert_eq!(y.as_slice(), &[1.0, 2.0, 3.0, 7.0, 8.0, 9.0]);
    }

    #[test]
    fn a_is_nilpotent_at_zero_yaw() {
        // Chains position ← velocity ← attitude ← rates: A⁴ = 0.
        let p = QuadrotorParams::default();
        let eq = hover_equilibrium(&p, Vector3::zeros(), 0.0).unwrap();
        let m = linearize(&p, &eq).unwrap();
        let a2: StateMatrix = m.a * m.a;
        let a4 = a2 * a2;
        assert!(a4.amax() <= 1e-12);
    }
}
