//! Compensated summation with a fixed chunking, so parallel reductions give
//! the same bits regardless of thread count.

use num_complex::Complex64;
use rayon::prelude::*;

/// Chunk length for parallel reductions.
pub const CHUNK: usize = 4096;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn sum_f64<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// `Σ_{i<len} f(i)`, chunks evaluated in parallel and combined in order.
pub fn chunked_sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partials: Vec<f64> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = CompensatedSum::new();
            for i in c * CHUNK..((c + 1) * CHUNK).min(len) {
                acc.add(f(i));
            }
            acc.value()
        })
        .collect();
    sum_f64(partials)
}

/// Complex counterpart of [`chunked_sum`].
pub fn chunked_sum_complex<F>(len: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let partials: Vec<(f64, f64)> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
            for i in c * CHUNK..((c + 1) * CHUNK).min(len) {
                let z = f(i);
                re.add(z.re);
                im.add(z.im);
            }
            (re.value(), im.value())
        })
        .collect();
    Complex64::new(sum_f64(partials.iter().map(|p| p.0)), sum_f64(partials.iter().map(|p| p.1)))
}

/// `max_{i<len} f(i)`, or 0 for an empty range.
pub fn chunked_max<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    (0..len).into_par_iter().map(f).reduce(|| 0.0, f64::max)
}
