//! Orthonormal DCT-II by matrix multiplication.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Row-major `n x n` orthonormal DCT-II basis: `basis[u * n + x]`.
pub fn dct_matrix(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for u in 0..n {
        let alpha = if u == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        for x in 0..n {
            m[u * n + x] = alpha * (((2 * x + 1) as f64 * u as f64 * PI) / (2 * n) as f64).cos();
        }
    }
    m
}

/// 8x8 block transform used by the QIM channel and the JPEG simulator.
pub struct Dct8 {
    basis: [[f64; 8]; 8],
}

impl Dct8 {
    pub fn get() -> &'static Dct8 {
        static DCT: OnceLock<Dct8> = OnceLock::new();
        DCT.get_or_init(|| {
            let m = dct_matrix(8);
            let mut basis = [[0.0; 8]; 8];
            for u in 0..8 {
                basis[u].copy_from_slice(&m[u * 8..u * 8 + 8]);
            }
            Dct8 { basis }
        })
    }

    /// Forward 2D DCT; `block[y][x]` in, `coef[u][v]` out (u vertical).
    pub fn forward(&self, block: &[[f64; 8]; 8]) -> [[f64; 8]; 8] {
        let b = &self.basis;
        let mut tmp = [[0.0; 8]; 8];
        for y in 0..8 {
            for v in 0..8 {
                tmp[y][v] = (0..8).map(|x| block[y][x] * b[v][x]).sum();
            }
        }
        let mut out = [[0.0; 8]; 8];
        for u in 0..8 {
            for v in 0..8 {
                out[u][v] = (0..8).map(|y| b[u][y] * tmp[y][v]).sum();
            }
        }
        out
    }

    pub fn inverse(&self, coef: &[[f64; 8]; 8]) -> [[f64; 8]; 8] {
        let b = &self.basis;
        let mut tmp = [[0.0; 8]; 8];
        for u in 0..8 {
            for x in 0..8 {
                tmp[u][x] = (0..8).map(|v| coef[u][v] * b[v][x]).sum();
            }
        }
        let mut out = [[0.0; 8]; 8];
        for y in 0..8 {
            for x in 0..8 {
                out[y][x] = (0..8).map(|u| b[u][y] * tmp[u][x]).sum();
            }
        }
        out
    }

    /// Spatial pattern added to a block when coefficient `(u, v)` grows by one.
    pub fn basis_pattern(&self, u: usize, v: usize) -> [[f64; 8]; 8] {
        let b = &self.basis;
        let mut out = [[0.0; 8]; 8];
        for y in 0..8 {
            for x in 0..8 {
                out[y][x] = b[u][y] * b[v][x];
            }
        }
        out
    }
}
