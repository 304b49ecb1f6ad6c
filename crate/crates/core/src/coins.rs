//! 4x4 unitary coin operators.
//!
//! Rows index the outgoing coin `(j, k)`, columns the incoming coin
//! `(j', k')`, both flattened as `2j + k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CoinState, C64};

pub type CoinMatrix = [[C64; 4]; 4];

pub const UNITARITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoinKind {
    Hadamard,
    Grover,
    Fourier,
    Custom,
}

impl CoinKind {
    pub fn name(self) -> &'static str {
        match self {
            CoinKind::Hadamard => "hadamard",
            CoinKind::Grover => "grover",
            CoinKind::Fourier => "fourier",
            CoinKind::Custom => "custom",
        }
    }
}

impl std::str::FromStr for CoinKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "hadamard" => Ok(CoinKind::Hadamard),
            "grover" => Ok(CoinKind::Grover),
            "fourier" => Ok(CoinKind::Fourier),
            "custom" => Ok(CoinKind::Custom),
            other => Err(format!(
                "unknown coin `{other}` (expected hadamard, grover, fourier or custom)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinOperator {
    entries: CoinMatrix,
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl CoinOperator {
    /// `H ⊗ H` with `H = [[1, 1], [1, -1]] / sqrt(2)`.
    pub fn hadamard() -> Self {
        let h = [[1.0, 1.0], [1.0, -1.0]];
        let mut entries = [[re(0.0); 4]; 4];
        for (r, row) in entries.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = re(0.5 * h[r >> 1][c >> 1] * h[r & 1][c & 1]);
            }
        }
        CoinOperator { entries }
    }

    /// Grover diffusion `2|s><s| - I` over the four coin states.
    pub fn grover() -> Self {
        let mut entries = [[re(0.5); 4]; 4];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = re(-0.5);
        }
        CoinOperator { entries }
    }

    /// Four-point DFT, `F[r][c] = i^(r c) / 2`.
    pub fn fourier() -> Self {
        const POWERS: [(f64, f64); 4] = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        let mut entries = [[re(0.0); 4]; 4];
        for (r, row) in entries.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                let (a, b) = POWERS[(r * c) % 4];
                *e = C64::new(0.5 * a, 0.5 * b);
            }
        }
        CoinOperator { entries }
    }

    pub fn custom(entries: CoinMatrix) -> Result<Self> {
        let residual = unitarity_residual(&entries);
        if residual.is_nan() || residual > UNITARITY_TOLERANCE {
            return Err(Error::NonUnitary { residual });
        }
        Ok(CoinOperator { entries })
    }

    /// Built-in coin for a named kind; `None` for [`CoinKind::Custom`].
    pub fn of_kind(kind: CoinKind) -> Option<Self> {
        match kind {
            CoinKind::Hadamard => Some(Self::hadamard()),
            CoinKind::Grover => Some(Self::grover()),
            CoinKind::Fourier => Some(Self::fourier()),
            CoinKind::Custom => None,
        }
    }

    pub fn entries(&self) -> &CoinMatrix {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[row][col]
    }

    /// Row `row` of `C · state`.
    #[inline]
    pub fn apply_row(&self, row: usize, state: &CoinState) -> C64 {
        let r = &self.entries[row];
        r[0] * state[0] + r[1] * state[1] + r[2] * state[2] + r[3] * state[3]
    }

    pub fn apply(&self, state: &CoinState) -> CoinState {
        std::array::from_fn(|row| self.apply_row(row, state))
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.entries)
    }

    pub fn compose(&self, other: &CoinOperator) -> CoinMatrix {
        matmul(&self.entries, &other.entries)
    }
}

fn matmul(a: &CoinMatrix, b: &CoinMatrix) -> CoinMatrix {
    std::array::from_fn(|r| std::array::from_fn(|c| (0..4).map(|i| a[r][i] * b[i][c]).sum()))
}

/// `max |(C^† C - I)_{rc}|`
pub fn unitarity_residual(entries: &CoinMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            let mut acc: C64 = (0..4).map(|i| entries[i][r].conj() * entries[i][c]).sum();
            if r == c {
                acc -= 1.0;
            }
            let v = acc.norm();
            if v.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(v);
        }
    }
    worst
}
