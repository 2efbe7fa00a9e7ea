//! Scalar trajectories `t ↦ μ(t)` and their bending energy.

/// Anything that can be evaluated at a time.
pub trait Trajectory {
    fn eval(&self, t: f64) -> f64;
}

/// A trajectory with a roughness penalty `∫(μ″)²`.
pub trait Penalized: Trajectory {
    fn bending_energy(&self) -> f64;
}

impl<F: Fn(f64) -> f64> Trajectory for F {
    fn eval(&self, t: f64) -> f64 {
        self(t)
    }
}

/// Composite Simpson rule on `nodes` equally spaced nodes over `[a, b]`.
///
/// `nodes` must be odd and at least 3.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, nodes: usize) -> crate::Result<f64> {
    if nodes < 3 || nodes.is_multiple_of(2) {
        return Err(crate::Error::SimpsonNodes(nodes));
    }
    let panels = nodes - 1;
    let h = (b - a) / panels as f64;
    let mut sum = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    Ok(sum * h / 3.0)
}

/// Polynomial with ascending coefficients, `c[0] + c[1] t + c[2] t² + …`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| i as f64 * c)
            .collect();
        Self { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or(0.0)
                    - other.coeffs.get(i).copied().unwrap_or(0.0)
            })
            .collect();
        Self { coeffs }
    }

    fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::new(Vec::new());
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self { coeffs }
    }

    /// Exact `∫_a^b p(t) dt`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let anti = |t: f64| {
            self.coeffs
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (i, c)| acc * t + c / (i + 1) as f64)
                * t
        };
        anti(b) - anti(a)
    }

    /// Exact `∫_a^b (p″)²`.
    pub fn bending_energy_on(&self, a: f64, b: f64) -> f64 {
        let d2 = self.derivative().derivative();
        d2.mul(&d2).integral(a, b)
    }

    /// Degree ignoring trailing zero coefficients; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }

    /// Smallest root in `[a, b]`: closed form up to degree two, otherwise a
    /// sign-change scan refined by bisection.
    pub fn first_root_in(&self, a: f64, b: f64) -> Option<f64> {
        let inside = |t: f64| t >= a && t <= b;
        let c = |i: usize| self.coeffs.get(i).copied().unwrap_or(0.0);
        match self.degree() {
            None => Some(a),
            Some(0) => None,
            Some(1) => Some(-c(0) / c(1)).filter(|&t| inside(t)),
            Some(2) => {
                let (p0, p1, p2) = (c(0), c(1), c(2));
                let disc = p1 * p1 - 4.0 * p2 * p0;
                if disc < 0.0 {
                    return None;
                }
                let sign = if p1 >= 0.0 { 1.0 } else { -1.0 };
                let q = -0.5 * (p1 + sign * disc.sqrt());
                let mut roots = [q / p2, if q != 0.0 { p0 / q } else { q / p2 }];
                roots.sort_by(f64::total_cmp);
                roots.into_iter().find(|&t| inside(t))
            }
            Some(_) => {
                const SCAN: usize = 4096;
                let step = (b - a) / SCAN as f64;
                let mut lo = a;
                let mut flo = self.eval(lo);
                if flo == 0.0 {
                    return Some(lo);
                }
                for i in 1..=SCAN {
                    let hi = a + i as f64 * step;
                    let fhi = self.eval(hi);
                    if fhi == 0.0 {
                        return Some(hi);
                    }
                    if flo.signum() != fhi.signum() {
                        let (mut l, mut h) = (lo, hi);
                        for _ in 0..200 {
                            let mid = 0.5 * (l + h);
                            if self.eval(mid).signum() == flo.signum() {
                                l = mid;
                            } else {
                                h = mid;
                            }
                        }
                        return Some(0.5 * (l + h));
                    }
                    lo = hi;
                    flo = fhi;
                }
                None
            }
        }
    }
}

impl Trajectory for Polynomial {
    fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

/// A polynomial whose bending energy is measured over a fixed window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedPolynomial {
    pub poly: Polynomial,
    pub start: f64,
    pub end: f64,
}

impl Trajectory for WindowedPolynomial {
    fn eval(&self, t: f64) -> f64 {
        self.poly.eval(t)
    }
}

impl Penalized for WindowedPolynomial {
    fn bending_energy(&self) -> f64 {
        self.poly.bending_energy_on(self.start, self.end)
    }
}
