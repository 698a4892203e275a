//! Banded Cholesky factorization for symmetric positive-definite systems.

/// Lower band of a symmetric matrix; `at(i, d)` holds entry `(i, i - d)`.
#[derive(Clone, Debug)]
pub(crate) struct SymBand {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl SymBand {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, d: usize, v: f64) {
        debug_assert!(d <= self.bw && d <= i);
        self.data[i * (self.bw + 1) + d] = v;
    }

    #[cfg(test)]
    pub fn get(&self, i: usize, d: usize) -> f64 {
        self.data[i * (self.bw + 1) + d]
    }

    /// In-place `A = L Lᵀ`. Returns `None` if a pivot is not positive.
    pub fn factor(mut self) -> Option<BandCholesky> {
        let w = self.bw + 1;
        let n = self.n;
        for i in 0..n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..=i {
                // L(i,k) L(j,k) for k in [max(lo, j - bw), j)
                let klo = lo.max(j.saturating_sub(self.bw));
                let mut sum = self.data[i * w + (i - j)];
                for k in klo..j {
                    sum -= self.data[i * w + (i - k)] * self.data[j * w + (j - k)];
                }
                if i == j {
                    if !(sum > 0.0) {
                        return None;
                    }
                    self.data[i * w] = sum.sqrt();
                } else {
                    self.data[i * w + (i - j)] = sum / self.data[j * w];
                }
            }
        }
        Some(BandCholesky { l: self })
    }
}

#[derive(Clone, Debug)]
pub(crate) struct BandCholesky {
    l: SymBand,
}

impl BandCholesky {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.l.n;
        let bw = self.l.bw;
        let w = bw + 1;
        let d = &self.l.data;
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = b[i];
            for k in lo..i {
                s -= d[i * w + (i - k)] * b[k];
            }
            b[i] = s / d[i * w];
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut s = b[i];
            for k in i + 1..=hi {
                s -= d[k * w + (k - i)] * b[k];
            }
            b[i] = s / d[i * w];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(n: usize, bw: usize, a: &SymBand, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; n];
        for i in 0..n {
            for d in 0..=bw.min(i) {
                let v = a.get(i, d);
                y[i] += v * x[i - d];
                if d > 0 {
                    y[i - d] += v * x[i];
                }
            }
        }
        y
    }

    #[test]
    fn solves_tridiagonal_and_wider_bands() {
        for &(n, bw) in &[(1usize, 0usize), (10, 1), (37, 4), (60, 9)] {
            let mut a = SymBand::zeros(n, bw);
            for i in 0..n {
                a.set(i, 0, 2.0 * bw as f64 + 1.5 + (i % 3) as f64);
                for d in 1..=bw.min(i) {
                    a.set(i, d, -1.0 / d as f64);
                }
            }
            let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin() + 0.1).collect();
            let b = dense_mul(n, bw, &a, &x);
            let mut sol = b.clone();
            a.factor().unwrap().solve_in_place(&mut sol);
            for i in 0..n {
                assert!((sol[i] - x[i]).abs() < 1e-12, "n={n} bw={bw} i={i}");
            }
        }
    }

    #[test]
    fn rejects_indefinite() {
        let mut a = SymBand::zeros(2, 1);
        a.set(0, 0, 1.0);
        a.set(1, 0, 1.0);
        a.set(1, 1, 2.0);
        assert!(a.factor().is_none());
    }
}
