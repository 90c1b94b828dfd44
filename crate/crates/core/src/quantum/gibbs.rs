use super::linalg;
use super::operator::{DensityMatrix, HermitianOperator};

/// The normalised exponential `exp(k) / Tr exp(k)`.
///
/// The spectrum is shifted by its maximum before exponentiating, so any finite
/// input is evaluated without overflow and the output is strictly positive up
/// to floating-point underflow.
pub fn gibbs_state(k: &HermitianOperator) -> DensityMatrix {
    let e = k.eigh();
    let lse = linalg::log_sum_exp(&e.values);
    let m = e.map(|x| (x - lse).exp());
    DensityMatrix::from_operator_unchecked(HermitianOperator::from_parts_unchecked(
        k.system().clone(),
        m,
    ))
}

/// Thermal state `2^{−H/T} / Z`, the minimiser of `Tr[Hρ] − T S(ρ)` with the
/// entropy in bits.
pub fn thermal_state(h: &HermitianOperator, temperature: f64) -> DensityMatrix {
    gibbs_state(&h.scaled(-std::f64::consts::LN_2 / temperature))
}

/// Free energy in bits, `min_ρ Tr[Hρ] − T S(ρ) = −T log₂ Tr 2^{−H/T}`; at
/// `T = 0` this is the smallest eigenvalue.
pub fn free_energy(h: &HermitianOperator, temperature: f64) -> f64 {
    let values = h.eigenvalues();
    if temperature == 0.0 {
        return values[0];
    }
    let scaled: Vec<f64> = values
        .iter()
        .map(|&x| -x * std::f64::consts::LN_2 / temperature)
        .collect();
    -temperature * linalg::log_sum_exp(&scaled) / std::f64::consts::LN_2
}
