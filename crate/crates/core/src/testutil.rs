//! Shared fixtures for unit tests: small tensors with hand-checked entries.

use crate::symtensor::SymTensor;
use crate::C64;

fn real_uptri(n_vars: usize, order: u32, vals: &[f64]) -> SymTensor {
    let vals: Vec<C64> = vals.iter().map(|&v| C64::new(v, 0.0)).collect();
    SymTensor::from_uptri(n_vars, order, &vals).unwrap()
}

/// S³(ℂ³) tensor of rank 3 used throughout the worked examples. Its degree-2
/// annihilator relations and generating matrix are known in closed form.
pub fn small_cubic() -> SymTensor {
    real_uptri(
        2,
        3,
        &[7.0, -3.0, 9.0, 13.0, 20.0, 19.0, -27.0, 6.0, 6.0, 45.0],
    )
}

/// S³(ℂ³) tensor of rank 4: the degree-2 commutator system is inconsistent,
/// so solving needs the two-parameter affine family (gap ℓ = 2).
pub fn gap2_cubic() -> SymTensor {
    real_uptri(
        2,
        3,
        &[-8.0, 2.0, 15.0, -7.0, 17.0, 7.0, 17.0, 4.0, 3.0, 18.0],
    )
}

/// S⁴(ℂ³) tensor of rank 6 (the generic rank): parameter gap ℓ = 3.
pub fn quartic_gap3() -> SymTensor {
    real_uptri(
        2,
        4,
        &[
            -7.0, -2.0, 11.0, 18.0, -7.0, -1.0, 3.0, -2.0, -15.0, -9.0, -13.0, -14.0, -11.0, -13.0,
            18.0,
        ],
    )
}
