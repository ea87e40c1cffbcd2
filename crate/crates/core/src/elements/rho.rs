use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ElementError, ElementSet};

/// Placement of L_AA and L_BB on the inner diagonal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum InnerDiagonal {
    /// L_AA at (2,2), L_BB at (3,3).
    #[default]
    AsPrinted,
    /// L_BB at (2,2), L_AA at (3,3): the |g_A e_B⟩ ↔ L_BB assignment.
    Swapped,
}

/// Two-detector X-state in the basis |g_A g_B⟩, |g_A e_B⟩, |e_A g_B⟩, |e_A e_B⟩.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(pub Matrix4<Complex64>);

impl DensityMatrix {
    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }
}

pub fn assemble_rho(elements: &ElementSet) -> Result<DensityMatrix, ElementError> {
    assemble_rho_with(elements, InnerDiagonal::AsPrinted)
}

pub fn assemble_rho_with(
    elements: &ElementSet,
    inner: InnerDiagonal,
) -> Result<DensityMatrix, ElementError> {
    let laa = elements.l_aa();
    let lbb = elements.l_bb();
    if laa + lbb > 1.0 {
        return Err(ElementError::Perturbativity(laa + lbb));
    }
    let (d2, d3) = match inner {
        InnerDiagonal::AsPrinted => (laa, lbb),
        InnerDiagonal::Swapped => (lbb, laa),
    };
    let c = |x: f64| Complex64::new(x, 0.0);
    let lab = elements.l_ab();
    let m = elements.m();
    let mut rho = Matrix4::from_element(c(0.0));
    rho[(0, 0)] = c(1.0 - laa - lbb);
    rho[(1, 1)] = c(d2);
    rho[(2, 2)] = c(d3);
    rho[(0, 3)] = m.conj();
    rho[(3, 0)] = m;
    rho[(1, 2)] = lab;
    rho[(2, 1)] = lab.conj();
    Ok(DensityMatrix(rho))
}
