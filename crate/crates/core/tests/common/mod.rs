#![allow(dead_code)]

//! Independent reference computations for the integration tests: a dense
//! grid search followed by derivative-free compass polishing, central finite
//! differences, and a seeded cube sampler.

use qbnb::{Cube, Domain};

/// Global minimum estimate of `f` over `domain`: evaluate about `budget`
/// grid points, then polish the best `starts` of them by compass search.
pub fn grid_polish<F: Fn(&[f64]) -> f64>(
    f: F,
    domain: &Domain,
    budget: usize,
    starts: usize,
) -> (f64, Vec<f64>) {
    let d = domain.dim();
    let n = ((budget as f64).powf(1.0 / d as f64).floor() as usize).max(2);
    let lo = domain.lower().to_vec();
    let hi = domain.upper().to_vec();
    let mut best: Vec<(f64, Vec<f64>)> = Vec::with_capacity(starts + 1);
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    loop {
        for i in 0..d {
            x[i] = (lo[i] + (hi[i] - lo[i]) * idx[i] as f64 / (n - 1) as f64).min(hi[i]);
        }
        let v = f(&x);
        if best.len() < starts || v < best[best.len() - 1].0 {
            let pos = best.partition_point(|(b, _)| *b <= v);
            best.insert(pos, (v, x.clone()));
            best.truncate(starts);
        }
        let mut k = 0;
        loop {
            if k == d {
                return finish(&f, &lo, &hi, best);
            }
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn finish<F: Fn(&[f64]) -> f64>(
    f: &F,
    lo: &[f64],
    hi: &[f64],
    starts: Vec<(f64, Vec<f64>)>,
) -> (f64, Vec<f64>) {
    let step0 = lo
        .iter()
        .zip(hi)
        .map(|(a, b)| b - a)
        .fold(0.0f64, f64::max)
        / 64.0;
    starts
        .into_iter()
        .map(|(_, x)| compass(f, lo, hi, x, step0))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one start")
}

/// Coordinate pattern search, projected onto the box.
pub fn compass<F: Fn(&[f64]) -> f64>(
    f: &F,
    lo: &[f64],
    hi: &[f64],
    mut x: Vec<f64>,
    mut step: f64,
) -> (f64, Vec<f64>) {
    let mut fx = f(&x);
    while step > 1e-13 {
        let mut improved = false;
        for i in 0..x.len() {
            for s in [step, -step] {
                let mut y = x.clone();
                y[i] = (y[i] + s).clamp(lo[i], hi[i]);
                let fy = f(&y);
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (fx, x)
}

/// Central-difference gradient with step `h`.
pub fn fd_gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[i] += h;
            b[i] -= h;
            (f(&a) - f(&b)) / (2.0 * h)
        })
        .collect()
}

/// Relative error with a unit floor on the scale.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

/// Small deterministic generator for test inputs (xorshift64*).
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg(seed.wrapping_mul(0x2545_F491_4F6C_DD1D) | 1)
    }

    pub fn next(&mut self) -> f64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        (self.0.wrapping_mul(0x2545_F491_4F6C_DD1D) >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next()
    }

    pub fn point(&mut self, domain: &Domain) -> Vec<f64> {
        (0..domain.dim())
            .map(|i| self.uniform(domain.lower()[i], domain.upper()[i]))
            .collect()
    }

    /// Random sub-cube of `domain`, obtained by descending a random number
    /// of bisection steps along random branches.
    pub fn subcube(&mut self, domain: &Domain, max_depth: usize) -> Cube {
        let mut c = Cube::from_domain(domain).expect("nondegenerate domain");
        let depth = (self.next() * (max_depth + 1) as f64) as usize;
        for _ in 0..depth {
            let (a, b) = c.bisect_longest();
            c = if self.next() < 0.5 { a } else { b };
        }
        c
    }
}
