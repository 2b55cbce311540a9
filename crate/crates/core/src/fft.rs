//! Separable n-dimensional FFT on cubic arrays, built from `rustfft` 1-D plans.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

const TILE: usize = 16;

/// In-place n-D transform of a row-major cube with `len` points per axis.
#[derive(Clone)]
pub struct NdFft {
    n: usize,
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for NdFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NdFft").field("n", &self.n).field("len", &self.len).finish()
    }
}

impl NdFft {
    pub fn new(n: usize, len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, len, forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len) }
    }

    pub fn total(&self) -> usize {
        self.len.pow(self.n as u32)
    }

    /// Unnormalised forward transform.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Inverse transform, scaled so that `inverse(forward(x)) = x`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let scale = 1.0 / self.total() as f64;
        data.par_iter_mut().for_each(|z| *z *= scale);
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.total(), "array size does not match the plan");
        let len = self.len;
        let zero = Complex64::new(0.0, 0.0);
        for axis in 0..self.n {
            let stride = len.pow((self.n - 1 - axis) as u32);
            let block = len * stride;
            if stride == 1 {
                // contiguous lines: batch them so each task handles many
                data.par_chunks_mut(len * TILE).for_each(|lines| {
                    let mut scratch = vec![zero; fft.get_inplace_scratch_len()];
                    fft.process_with_scratch(lines, &mut scratch);
                });
                continue;
            }
            data.par_chunks_mut(block).for_each(|blk| {
                let mut scratch = vec![zero; fft.get_inplace_scratch_len()];
                // gather TILE interleaved lines at a time so reads stay contiguous
                let mut buf = vec![zero; TILE * len];
                for o0 in (0..stride).step_by(TILE) {
                    let t = TILE.min(stride - o0);
                    for i in 0..len {
                        let row = &blk[i * stride + o0..i * stride + o0 + t];
                        for (q, z) in row.iter().enumerate() {
                            buf[q * len + i] = *z;
                        }
                    }
                    fft.process_with_scratch(&mut buf[..t * len], &mut scratch);
                    for i in 0..len {
                        let row = &mut blk[i * stride + o0..i * stride + o0 + t];
                        for (q, z) in row.iter_mut().enumerate() {
                            *z = buf[q * len + i];
                        }
                    }
                }
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_dft(n: usize, len: usize, data: &[Complex64]) -> Vec<Complex64> {
        let total = len.pow(n as u32);
        let idx = |mut f: usize| {
            let mut v = vec![0; n];
            for k in (0..n).rev() {
                v[k] = f % len;
                f /= len;
            }
            v
        };
        (0..total)
            .map(|k| {
                let kv = idx(k);
                (0..total)
                    .map(|x| {
                        let xv = idx(x);
                        let phase: usize = kv.iter().zip(&xv).map(|(a, b)| a * b).sum();
                        data[x] * Complex64::from_polar(1.0, -2.0 * PI * (phase % len) as f64 / len as f64)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_and_roundtrips() {
        for (n, len) in [(1, 12), (2, 6), (3, 4)] {
            let plan = NdFft::new(n, len);
            let data: Vec<Complex64> =
                (0..plan.total()).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
            let mut out = data.clone();
            plan.forward(&mut out);
            let reference = naive_dft(n, len, &data);
            for (a, b) in out.iter().zip(&reference) {
                assert!((a - b).norm() < 1e-10, "n={n}, len={len}");
            }
            plan.inverse(&mut out);
            for (a, b) in out.iter().zip(&data) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }
}
