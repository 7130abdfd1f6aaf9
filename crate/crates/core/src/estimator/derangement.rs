//! Explicit n-copy check of the cyclic-shift identities.

use super::{check_copies, Mode, PurifiedRegister};
use crate::densop::{partial_trace, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{c64, kron};
use crate::pauli::PauliString;

/// Largest n-copy register the check will build.
pub const DERANGEMENT_MAX_QUBITS: usize = 12;

/// `|Tr[ρ^{⊗n} 𝕊 (P ⊗ I^{⊗(n−1)})] − Tr[ρ̃ⁿ P]|`, where 𝕊 cyclically shifts
/// all qubits (FVP, ρ̃ = ρ) or only those in A∪B (LVP, ρ̃ = ρ^{A+B}).
pub fn derangement_check(rho: &DensityMatrix, p: &PauliString, n: u32, mode: Mode<'_>) -> Result<f64> {
    check_copies(n)?;
    let big_n = rho.n_sites();
    let copies = n as usize;
    let total = big_n * copies;
    if total > DERANGEMENT_MAX_QUBITS {
        return Err(Error::DimensionLimit { sites: total, limit: DERANGEMENT_MAX_QUBITS });
    }
    let shifted: Vec<usize> = match mode {
        Mode::Fvp => rho.sites().to_vec(),
        Mode::Lvp(partition) => partition.window(),
    };
    let mut shift_mask = 0usize;
    for (pos, s) in rho.sites().iter().enumerate() {
        if shifted.contains(s) {
            shift_mask |= 1 << (big_n - 1 - pos);
        }
    }
    let act = p.action_on(rho.sites())?;

    // ρ^{⊗n}, copy 0 in the most significant block.
    let mut tensor = rho.matrix().to_owned();
    for _ in 1..copies {
        tensor = kron(tensor.as_ref(), rho.matrix());
    }

    let block = (1usize << big_n) - 1;
    let copy_of = |c: usize, k: usize| (c >> (big_n * (copies - 1 - k))) & block;
    let mut lhs = c64::new(0.0, 0.0);
    for c in 0..1usize << total {
        // P on copy 0, then copy k's shifted qubits move into copy k+1.
        let mut regs: Vec<usize> = (0..copies).map(|k| copy_of(c, k)).collect();
        let phase = act.phase_of(regs[0]);
        regs[0] ^= act.flip;
        let mut image = 0usize;
        for k in 0..copies {
            let from = regs[(k + copies - 1) % copies];
            let word = (regs[k] & !shift_mask) | (from & shift_mask);
            image = (image << big_n) | word;
        }
        lhs += tensor[(c, image)] * phase;
    }

    let powered = match mode {
        Mode::Fvp => PurifiedRegister::new(rho, n)?,
        Mode::Lvp(partition) => PurifiedRegister::new(&partial_trace(rho, &partition.window())?, n)?,
    };
    let rhs = p.trace_against(powered.matrix(), &powered.sites)?;
    Ok((lhs - rhs).norm())
}
