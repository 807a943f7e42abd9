//! Deterministic random number streams and the random matrix generators used
//! by the Monte Carlo experiments.
//!
//! The generator is a SplitMix64 walk whose starting state is derived from a
//! `(seed, stream_id)` pair, so trial `i` of an experiment can use stream `i`
//! of a master seed and produce the same values on any platform, in any
//! order, on any number of threads.

use crate::error::Result;
use crate::lu::LuFactors;
use crate::matrix::{CMatrix, Complex};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A reproducible random stream keyed by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    state: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        // Decorrelate the stream id from the seed with two mixing rounds
        // before the walk starts.
        let mut s = seed;
        let a = splitmix64(&mut s);
        let mut t = a ^ stream_id.wrapping_mul(GOLDEN_GAMMA);
        let state = splitmix64(&mut t) ^ splitmix64(&mut t);
        RngStream {
            seed,
            stream_id,
            state,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        splitmix64(&mut self.state)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform complex with independent re, im on `[0, 1)`.
    pub fn uniform_complex(&mut self) -> Complex {
        let re = self.uniform();
        let im = self.uniform();
        Complex::new(re, im)
    }

    /// Uniform integer on `{1, …, m}` (rejection sampling, no modulo bias).
    pub fn randint(&mut self, m: u64) -> u64 {
        assert!(m >= 1);
        let zone = u64::MAX - (u64::MAX % m);
        loop {
            let v = self.next_u64();
            if v < zone {
                return 1 + v % m;
            }
        }
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform point on the unit circle.
    pub fn unit_complex(&mut self) -> Complex {
        Complex::from_polar(1.0, self.uniform_range(0.0, std::f64::consts::TAU))
    }
}

/// n×n matrix with entries `re + i·im`, re and im independent uniform [0,1).
/// Entries are drawn in row-major order, re before im.
pub fn random_uniform_complex(n: usize, rng: &mut RngStream) -> CMatrix {
    assert!(n >= 1);
    let mut entries = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        entries.push(rng.uniform_complex());
    }
    CMatrix::new(n, n, entries).expect("uniform entries are finite")
}

/// Integer random matrix with a trial-dependent diagonal shift:
/// `R1 + (i·ln i / 5)·I + 𝔦·(R2 + (i·ln i / 5)·I)`, where R1 and R2 have
/// independent integer entries uniform on `{1, …, m}`. R1 is drawn first,
/// then R2, each row-major.
pub fn random_shifted_integer(n: usize, trial_index: u64, m: u64, rng: &mut RngStream) -> CMatrix {
    assert!(n >= 1 && trial_index >= 1 && m >= 1);
    let i = trial_index as f64;
    let shift = i * i.ln() / 5.0; // ln(1) = 0, so trial 1 is unshifted
    let r1: Vec<f64> = (0..n * n).map(|_| rng.randint(m) as f64).collect();
    let r2: Vec<f64> = (0..n * n).map(|_| rng.randint(m) as f64).collect();
    let mut entries = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            let d = if row == col { shift } else { 0.0 };
            entries.push(Complex::new(r1[row * n + col] + d, r2[row * n + col] + d));
        }
    }
    CMatrix::new(n, n, entries).expect("shifted entries are finite")
}

/// Apply the Hermitian unitary reflector `I - (2/v^*v)·v v^*` to `a` from the
/// left, acting on all rows.
fn apply_reflector_left(a: &mut CMatrix, v: &[Complex]) {
    let n = a.rows();
    let m = a.cols();
    debug_assert_eq!(v.len(), n);
    let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if vv == 0.0 {
        return;
    }
    let tau = 2.0 / vv;
    for j in 0..m {
        let mut dot = Complex::new(0.0, 0.0);
        for i in 0..n {
            dot += v[i].conj() * a[(i, j)];
        }
        dot *= tau;
        for i in 0..n {
            let viw = v[i] * dot;
            a[(i, j)] -= viw;
        }
    }
}

/// Random invertible matrix with 2-norm condition number at most
/// `cond_bound`, built as `Q1 · D · Q2` with Householder products `Q1`, `Q2`
/// and a diagonal whose moduli lie in `[1/√cond_bound, √cond_bound]`.
pub fn random_congruence(n: usize, rng: &mut RngStream, cond_bound: f64) -> Result<CMatrix> {
    assert!(n >= 1);
    assert!(cond_bound >= 1.0, "cond_bound must be at least 1");
    let hi = cond_bound.sqrt();
    let lo = 1.0 / hi;

    let mut d = CMatrix::zeros(n, n);
    for i in 0..n {
        // Log-uniform moduli in [lo, hi] with random phases; pin the first
        // two entries to the extremes so the bound is attained.
        let r = match i {
            0 => hi,
            1 => lo,
            _ => (rng.uniform_range(lo.ln(), hi.ln())).exp(),
        };
        d[(i, i)] = Complex::from_polar(r, rng.uniform_range(0.0, std::f64::consts::TAU));
    }

    let reflect = |m: &mut CMatrix, rng: &mut RngStream, transpose_side: bool| {
        // A few reflectors from dense random directions give a well-mixed
        // unitary factor; exact Haar measure is not needed here.
        for _ in 0..n.clamp(2, 4) {
            let v: Vec<Complex> = (0..n)
                .map(|_| {
                    Complex::new(rng.uniform_range(-1.0, 1.0), rng.uniform_range(-1.0, 1.0))
                })
                .collect();
            if transpose_side {
                // Right multiplication by a Hermitian reflector equals left
                // multiplication on the conjugate transpose.
                let mut t = m.conj_transpose();
                apply_reflector_left(&mut t, &v);
                *m = t.conj_transpose();
            } else {
                apply_reflector_left(m, &v);
            }
        }
    };

    let mut p = d;
    reflect(&mut p, rng, false);
    reflect(&mut p, rng, true);
    // Invertibility by construction; make sure numerically too.
    let f = LuFactors::factor(&p)?;
    debug_assert!(!f.is_near_singular());
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let mut a = RngStream::new(42, 7);
        let mut b = RngStream::new(42, 7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = RngStream::new(42, 8);
        assert_ne!(RngStream::new(42, 7).next_u64(), c.next_u64());
    }

    #[test]
    fn uniform_matrix_in_range_and_deterministic() {
        let mut rng = RngStream::new(1, 1);
        let a = random_uniform_complex(6, &mut rng);
        for z in a.entries() {
            assert!(z.re >= 0.0 && z.re < 1.0);
            assert!(z.im >= 0.0 && z.im < 1.0);
        }
        let mut rng2 = RngStream::new(1, 1);
        let b = random_uniform_complex(6, &mut rng2);
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_mean_near_half() {
        // Law of large numbers at 10^5 samples.
        let mut rng = RngStream::new(9, 0);
        let mut sum = Complex::new(0.0, 0.0);
        let count = 100_000;
        for _ in 0..count {
            sum += rng.uniform_complex();
        }
        let mean = sum / count as f64;
        assert!((mean.re - 0.5).abs() < 0.01, "re mean {}", mean.re);
        assert!((mean.im - 0.5).abs() < 0.01, "im mean {}", mean.im);
    }

    #[test]
    fn shifted_integer_trial_one_has_no_shift() {
        let mut rng = RngStream::new(3, 1);
        let a = random_shifted_integer(4, 1, 10, &mut rng);
        for z in a.entries() {
            assert_eq!(z.re.fract(), 0.0);
            assert_eq!(z.im.fract(), 0.0);
            assert!(z.re >= 1.0 && z.re <= 10.0);
            assert!(z.im >= 1.0 && z.im <= 10.0);
        }
    }

    #[test]
    fn shifted_integer_diagonal_shift_value() {
        // i=3: shift is 3·ln 3/5 ≈ 0.6592 added to both parts of the diagonal.
        let mut rng = RngStream::new(3, 3);
        let a = random_shifted_integer(4, 3, 10, &mut rng);
        let shift = 3.0 * 3f64.ln() / 5.0;
        assert!((shift - 0.659_167_373_200_866_3).abs() < 1e-12);
        for i in 0..4 {
            let z = a[(i, i)];
            assert!(((z.re - shift).fract()).abs() < 1e-12);
            assert!(((z.im - shift).fract()).abs() < 1e-12);
        }
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    let z = a[(i, j)];
                    assert_eq!(z.re.fract(), 0.0);
                    assert!(z.re >= 1.0 && z.re <= 10.0);
                }
            }
        }
    }

    #[test]
    fn randint_covers_range() {
        let mut rng = RngStream::new(5, 5);
        let mut seen = [false; 6];
        for _ in 0..1000 {
            let v = rng.randint(6);
            assert!((1..=6).contains(&v));
            seen[(v - 1) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn random_congruence_is_invertible_and_conditioned() {
        let mut rng = RngStream::new(11, 2);
        let p = random_congruence(8, &mut rng, 100.0).unwrap();
        let f = LuFactors::factor(&p).unwrap();
        assert!(!f.is_near_singular());

        // cond_bound = 1 forces all singular values equal: P^*P ∝ I.
        let mut rng = RngStream::new(11, 3);
        let q = random_congruence(5, &mut rng, 1.0).unwrap();
        let g = q.conj_transpose().mul(&q).unwrap();
        let scale = g[(0, 0)].re;
        let id = CMatrix::identity(5).scale(Complex::new(scale, 0.0));
        assert!(g.max_abs_diff(&id) < 1e-10 * scale.max(1.0));
    }
}
