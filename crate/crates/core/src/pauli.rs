//! Pauli strings as signed permutations of the computational basis.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{c64, zeros, CMat};
use faer::MatRef;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn signs(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// One letter per site; site 0 is the most significant tensor factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { letters }
    }

    pub fn identity(n: usize) -> Self {
        Self { letters: vec![Pauli::I; n] }
    }

    /// Identity everywhere except the listed `(site, letter)` pairs.
    pub fn sparse(n: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut letters = vec![Pauli::I; n];
        for &(site, p) in ops {
            if site >= n {
                return Err(Error::SiteNotPresent(site));
            }
            letters[site] = p;
        }
        Ok(Self { letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn get(&self, site: usize) -> Pauli {
        self.letters[site]
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.letters[i] != Pauli::I).collect()
    }

    /// Bit masks of this string acting on the register `sites` (ascending
    /// global labels, sites[0] the most significant bit).
    pub fn action_on(&self, sites: &[usize]) -> Result<PauliAction> {
        let m = sites.len();
        let mut flip = 0usize;
        let mut sign = 0usize;
        let mut n_y = 0u32;
        let mut covered = 0usize;
        for (pos, &site) in sites.iter().enumerate() {
            if site >= self.len() {
                continue;
            }
            let p = self.letters[site];
            let bit = 1usize << (m - 1 - pos);
            if p.flips() {
                flip |= bit;
            }
            if p.signs() {
                sign |= bit;
            }
            if p == Pauli::Y {
                n_y += 1;
            }
            if p != Pauli::I {
                covered += 1;
            }
        }
        if covered != self.support().len() {
            let missing = self.support().into_iter().find(|s| !sites.contains(s)).unwrap_or(0);
            return Err(Error::SiteNotPresent(missing));
        }
        let phase = match n_y % 4 {
            0 => c64::new(1.0, 0.0),
            1 => c64::new(0.0, 1.0),
            2 => c64::new(-1.0, 0.0),
            _ => c64::new(0.0, -1.0),
        };
        Ok(PauliAction { flip, sign, phase, dim: 1 << m })
    }

    /// Dense matrix on `sites`.
    pub fn to_dense_on(&self, sites: &[usize]) -> Result<CMat> {
        let act = self.action_on(sites)?;
        let mut m = zeros(act.dim, act.dim);
        for b in 0..act.dim {
            m[(b ^ act.flip, b)] = act.phase_of(b);
        }
        Ok(m)
    }

    /// Dense matrix on all of its sites.
    pub fn to_dense(&self) -> Result<CMat> {
        let sites: Vec<usize> = (0..self.len()).collect();
        self.to_dense_on(&sites)
    }

    /// `Tr[R P]` for `R` living on `sites`.
    pub fn trace_against(&self, r: MatRef<'_, c64>, sites: &[usize]) -> Result<c64> {
        let act = self.action_on(sites)?;
        if r.nrows() != act.dim {
            return Err(Error::DimensionMismatch { expected: act.dim, got: r.nrows() });
        }
        Ok((0..act.dim).map(|b| r[(b, b ^ act.flip)] * act.phase_of(b)).sum())
    }
}

/// `P|b⟩ = phase_of(b) |b ⊕ flip⟩`.
#[derive(Debug, Clone, Copy)]
pub struct PauliAction {
    pub flip: usize,
    pub sign: usize,
    pub phase: c64,
    pub dim: usize,
}

impl PauliAction {
    pub fn phase_of(&self, b: usize) -> c64 {
        if (b & self.sign).count_ones() % 2 == 1 {
            -self.phase
        } else {
            self.phase
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Dense form, one letter per site: `"IXZY"`. Surrounding whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::PauliParse { position: 0, reason: "empty string".into() });
        }
        let letters = s
            .chars()
            .enumerate()
            .map(|(position, c)| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::PauliParse { position, reason: format!("unexpected {other:?}") }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { letters })
    }
}
