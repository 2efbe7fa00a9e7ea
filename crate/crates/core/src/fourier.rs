//! Periodic regularized least squares in the Fourier domain.
//!
//! Data `z_j = μ†(j/n) + ε_j`, `j = 0..n`, are fitted by a 1-periodic `μ`
//! minimizing `a_n Σ_j |z_j − μ(t_j)|² + b_n ∫₀¹ (μ″)²` with `a_n = 1/n`
//! and `b_n = λ nᵖ`. With the unnormalized transform
//! `ẑ_l = Σ_j z_j e^{−2πilj/n}` and `μ(t) = (1/n) Σ_l μ̂_l e^{2πilt}`, the
//! minimizer shrinks each coefficient by `(1 + γ_n l⁴/n)⁻¹` where
//! `γ_n = 16π⁴ b_n / a_n`, and `∫(μ″)² = (16π⁴/n²) Σ_l l⁴ |μ̂_l|²`.
//!
//! Spectra are stored in standard DFT order: index `i` holds frequency
//! [`signed_frequency`]`(i, n)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};

use crate::energy::McEstimate;
use crate::error::{invalid, Error, Result};
use crate::{par, rng, stats};

const PI4: f64 = PI * PI * PI * PI;

/// Frequency `l ∈ [−(n−1)/2, (n−1)/2]` stored at DFT index `index` (odd `n`).
pub fn signed_frequency(index: usize, n: usize) -> i64 {
    if index <= (n - 1) / 2 {
        index as i64
    } else {
        index as i64 - n as i64
    }
}

/// Direct `O(n²)` forward transform, `ẑ_l = Σ_j z_j e^{−2πilj/n}`.
pub fn dft(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let twiddle: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
        .collect();
    (0..n)
        .map(|l| {
            values
                .iter()
                .enumerate()
                .map(|(j, &z)| twiddle[(l * j) % n] * z)
                .sum()
        })
        .collect()
}

/// Direct inverse transform, `z_j = (1/n) Σ_l ẑ_l e^{2πilj/n}`.
pub fn inverse_dft(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let twiddle: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
        .collect();
    (0..n)
        .map(|j| {
            coeffs
                .iter()
                .enumerate()
                .map(|(l, &c)| twiddle[(l * j) % n] * c)
                .sum::<Complex64>()
                / n as f64
        })
        .collect()
}

/// Shrink `ẑ_l` by `(1 + γ_n l⁴/n)⁻¹`; `n` is the spectrum length.
pub fn periodic_minimizer(z_hat: &[Complex64], gamma_n: f64) -> Vec<Complex64> {
    let n = z_hat.len();
    z_hat
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let l4 = (signed_frequency(i, n) as f64).powi(4);
            z / (1.0 + gamma_n * l4 / n as f64)
        })
        .collect()
}

/// `∫₀¹ (μ″)² = (16π⁴/n²) Σ_l l⁴ |μ̂_l|²`.
pub fn second_deriv_norm_fourier(mu_hat: &[Complex64]) -> f64 {
    let n = mu_hat.len();
    let sum: f64 = mu_hat
        .iter()
        .enumerate()
        .map(|(i, c)| (signed_frequency(i, n) as f64).powi(4) * c.norm_sqr())
        .sum();
    16.0 * PI4 * sum / (n as f64 * n as f64)
}

/// Expected penalty of the minimizer for pure noise,
/// `S(n) = (16π⁴σ²/n) Σ_l l⁴ / (1 + 16π⁴ λ nᵖ l⁴)²`.
pub fn closed_form_s(n: usize, lambda: f64, p: f64, sigma2: f64) -> Result<f64> {
    check_odd(n)?;
    if !(lambda > 0.0) {
        return Err(invalid("lambda", "must be positive"));
    }
    let c = 16.0 * PI4 * lambda * (n as f64).powf(p);
    let half = (n as i64 - 1) / 2;
    let sum: f64 = (1..=half)
        .map(|l| {
            let l4 = (l as f64).powi(4);
            l4 / (1.0 + c * l4).powi(2)
        })
        .sum();
    Ok(16.0 * PI4 * sigma2 / n as f64 * 2.0 * sum)
}

fn check_odd(n: usize) -> Result<()> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenSampleSize(n));
    }
    Ok(())
}

/// The periodic toy problem.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicProblem {
    pub n: usize,
    pub lambda: f64,
    pub p: f64,
    pub sigma2: f64,
    /// DFT coefficients of the true signal at the sample points.
    pub mu_dagger_hat: Vec<Complex64>,
}

impl PeriodicProblem {
    /// Problem with a zero true signal.
    pub fn noise_only(n: usize, lambda: f64, p: f64, sigma2: f64) -> Result<Self> {
        Self::new(n, lambda, p, sigma2, vec![Complex64::new(0.0, 0.0); n])
    }

    /// Problem with `μ†(t) = 2 cos(2πt)`, i.e. `μ̂†_{±1} = n`.
    pub fn cosine(n: usize, lambda: f64, p: f64, sigma2: f64) -> Result<Self> {
        check_odd(n)?;
        let mut hat = vec![Complex64::new(0.0, 0.0); n];
        if n >= 3 {
            hat[1] = Complex64::new(n as f64, 0.0);
            hat[n - 1] = Complex64::new(n as f64, 0.0);
        }
        Self::new(n, lambda, p, sigma2, hat)
    }

    pub fn new(
        n: usize,
        lambda: f64,
        p: f64,
        sigma2: f64,
        mu_dagger_hat: Vec<Complex64>,
    ) -> Result<Self> {
        check_odd(n)?;
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(invalid("lambda", "must be positive"));
        }
        if !(sigma2 >= 0.0) || !sigma2.is_finite() {
            return Err(invalid("sigma2", "must be non-negative"));
        }
        if !p.is_finite() {
            return Err(invalid("p", "must be finite"));
        }
        if mu_dagger_hat.len() != n {
            return Err(invalid("mu_dagger_hat", "length must equal n"));
        }
        Ok(Self {
            n,
            lambda,
            p,
            sigma2,
            mu_dagger_hat,
        })
    }

    pub fn a_n(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn b_n(&self) -> f64 {
        self.lambda * (self.n as f64).powf(self.p)
    }

    pub fn gamma_n(&self) -> f64 {
        16.0 * PI4 * self.b_n() / self.a_n()
    }

    /// True signal sampled at `t_j = j/n`.
    pub fn signal(&self) -> Vec<f64> {
        inverse_dft(&self.mu_dagger_hat)
            .iter()
            .map(|c| c.re)
            .collect()
    }
}

/// `E ∫(μ″)²` of the minimizer: the shrunk signal's penalty plus the
/// noise term [`closed_form_s`]. The cross term has zero mean.
pub fn expected_penalty(problem: &PeriodicProblem) -> Result<f64> {
    let signal = second_deriv_norm_fourier(&periodic_minimizer(
        &problem.mu_dagger_hat,
        problem.gamma_n(),
    ));
    Ok(signal + closed_form_s(problem.n, problem.lambda, problem.p, problem.sigma2)?)
}

/// Monte Carlo mean (and standard error) of `∫(μ″)²` for the minimizer,
/// over `trials` independent Gaussian noise draws. Trial `i` uses stream
/// `(seed, i)`. Transforms use an FFT, which follows the same unnormalized
/// convention as [`dft`].
pub fn empirical_penalty_mc(
    problem: &PeriodicProblem,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    if trials < 2 {
        return Err(invalid("trials", "need at least two trials"));
    }
    let n = problem.n;
    let signal = problem.signal();
    let sigma = problem.sigma2.sqrt();
    let gamma_n = problem.gamma_n();
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_forward(n);
    let values = par::map_range(trials, |i| {
        let mut rng = rng::stream(seed, &[i as u64]);
        let mut buf: Vec<Complex64> = signal
            .iter()
            .map(|&s| {
                let e: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(s + sigma * e, 0.0)
            })
            .collect();
        fft.process(&mut buf);
        second_deriv_norm_fourier(&periodic_minimizer(&buf, gamma_n))
    });
    let (value, std_error) = stats::mean_se(&values);
    Ok(McEstimate { value, std_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn expected_penalty_of_pure_noise_is_the_closed_form() {
        let noise = PeriodicProblem::noise_only(101, 1.0, 0.0, 2.0).unwrap();
        assert_eq!(
            expected_penalty(&noise).unwrap(),
            closed_form_s(101, 1.0, 0.0, 2.0).unwrap()
        );
        let quiet = PeriodicProblem::cosine(101, 1.0, 0.0, 0.0).unwrap();
        let g = 16.0 * PI4;
        let shrunk = 2.0 / (1.0 + g);
        // μ = shrunk · cos(2πt), so ∫(μ″)² = shrunk² (2π)⁴ / 2.
        let expect = shrunk * shrunk * g / 2.0;
        assert!((expected_penalty(&quiet).unwrap() - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn dft_of_a_constant() {
        let z = dft(&[2.5; 7]);
        assert!(close(z[0], Complex64::new(17.5, 0.0), 1e-12));
        assert!(z[1..].iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn dft_of_a_cosine() {
        let n = 9;
        let v: Vec<f64> = (0..n)
            .map(|j| (2.0 * PI * j as f64 / n as f64).cos())
            .collect();
        let z = dft(&v);
        for (i, c) in z.iter().enumerate() {
            let expect = if signed_frequency(i, n).abs() == 1 {
                n as f64 / 2.0
            } else {
                0.0
            };
            assert!(close(*c, Complex64::new(expect, 0.0), 1e-12), "{i}: {c}");
        }
    }

    #[test]
    fn minimizer_examples() {
        let one = Complex64::new(1.0, 0.0);
        let z = vec![one; 3];
        assert_eq!(periodic_minimizer(&z, 0.0), z);
        // standard order: l = 0, 1, −1
        let mu = periodic_minimizer(&z, 3.0);
        assert_eq!(mu, vec![one, one * 0.5, one * 0.5]);
    }

    #[test]
    fn penalty_of_two_cosine() {
        let n = 11;
        let mut hat = vec![Complex64::new(0.0, 0.0); n];
        assert_eq!(second_deriv_norm_fourier(&hat), 0.0);
        hat[1] = Complex64::new(n as f64, 0.0);
        hat[n - 1] = Complex64::new(n as f64, 0.0);
        assert!((second_deriv_norm_fourier(&hat) - 32.0 * PI4).abs() < 1e-9);
    }

    #[test]
    fn closed_form_small_cases() {
        assert_eq!(closed_form_s(101, 1.0, 0.0, 0.0).unwrap(), 0.0);
        let expect = 16.0 * PI4 / 3.0 * 2.0 / (1.0 + 16.0 * PI4).powi(2);
        let got = closed_form_s(3, 1.0, 0.0, 1.0).unwrap();
        assert!((got - expect).abs() < 1e-15 * expect.max(1.0));
        assert_eq!(
            closed_form_s(4, 1.0, 0.0, 1.0),
            Err(Error::EvenSampleSize(4))
        );
    }

    #[test]
    fn zero_noise_penalty_is_zero() {
        let p = PeriodicProblem::noise_only(11, 1.0, 0.0, 0.0).unwrap();
        let est = empirical_penalty_mc(&p, 5, 1).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn problem_scalings() {
        let p = PeriodicProblem::noise_only(101, 2.0, -0.5, 1.0).unwrap();
        let expect = 16.0 * PI4 * 2.0 * 101f64.powf(0.5);
        assert!((p.gamma_n() - expect).abs() < 1e-9 * expect);
    }
}
