//! Holomorphic functions as truncated homogeneous expansions, the diagonal
//! radial calculus (I+R)^s, and radial quadrature grids for the unit
//! interval.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{PotlabError, Result};
use crate::sphere::{QuadratureGrid, SpherePoint};

/// Exponent tuple (m_1, ..., m_n); the degree is the sum.
pub type MultiIndex = Vec<u32>;

/// A holomorphic function given by finitely many monomial coefficients.
///
/// f = sum_k f_k with f_k the degree-k homogeneous part; (I+R)^s acts
/// diagonally as (1+k)^s on f_k, so fractional radial derivatives are exact
/// on this representation.
#[derive(Debug, Clone)]
pub struct HoloFunction {
    dim: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl HoloFunction {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut f = Self::zero(dim);
        if c != Complex64::new(0.0, 0.0) {
            f.terms.insert(vec![0; dim], c);
        }
        f
    }

    pub fn monomial(dim: usize, index: MultiIndex, c: Complex64) -> Result<Self> {
        if index.len() != dim {
            return Err(PotlabError::InvalidParameter(format!(
                "multi-index length {} does not match dimension {dim}",
                index.len()
            )));
        }
        let mut f = Self::zero(dim);
        if c != Complex64::new(0.0, 0.0) {
            f.terms.insert(index, c);
        }
        Ok(f)
    }

    pub fn from_terms(dim: usize, terms: Vec<(MultiIndex, Complex64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, c) in terms {
            if idx.len() != dim {
                return Err(PotlabError::InvalidParameter(
                    "multi-index length mismatch".into(),
                ));
            }
            if c != Complex64::new(0.0, 0.0) {
                *map.entry(idx).or_insert(Complex64::new(0.0, 0.0)) += c;
            }
        }
        Ok(Self { dim, terms: map })
    }

    /// Random polynomial with coefficients uniform in the unit square,
    /// all multi-indices up to the given degree.
    pub fn random<R: Rng>(dim: usize, max_degree: u32, rng: &mut R) -> Self {
        let mut terms = BTreeMap::new();
        let mut push = |idx: MultiIndex, rng: &mut R| {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            terms.insert(idx, c);
        };
        match dim {
            1 => {
                for k in 0..=max_degree {
                    push(vec![k], rng);
                }
            }
            _ => {
                for k in 0..=max_degree {
                    for m in 0..=k {
                        push(vec![m, k - m], rng);
                    }
                }
            }
        }
        Self { dim, terms }
    }

    /// Truncation of the fractional Cauchy kernel (1 - z·conj(zeta0))^{-(n-s)}
    /// to degrees <= max_degree.
    pub fn cauchy_kernel(
        dim: usize,
        s: f64,
        zeta0: &SpherePoint,
        max_degree: u32,
    ) -> Result<Self> {
        let beta = dim as f64 - s;
        Self::binomial_kernel(dim, beta, 1.0, zeta0, max_degree)
    }

    /// Truncation of (1 - a·z·conj(zeta0))^{-exponent} for 0 < a <= 1.
    pub fn binomial_kernel(
        dim: usize,
        exponent: f64,
        a: f64,
        zeta0: &SpherePoint,
        max_degree: u32,
    ) -> Result<Self> {
        if zeta0.dim() != dim {
            return Err(PotlabError::InvalidParameter(
                "kernel base point dimension mismatch".into(),
            ));
        }
        if exponent <= 0.0 {
            return Err(PotlabError::InvalidParameter(
                "kernel exponent must be positive".into(),
            ));
        }
        let mut terms = BTreeMap::new();
        // (1-w)^{-b} = sum_k Gamma(k+b)/(Gamma(b) k!) w^k with w = a z·conj(zeta0)
        let lg_b = ln_gamma(exponent);
        for k in 0..=max_degree {
            let kf = k as f64;
            let c_k =
                (ln_gamma(kf + exponent) - lg_b - ln_gamma(kf + 1.0)).exp() * a.powi(k as i32);
            match dim {
                1 => {
                    let coeff = zeta0.coords()[0].conj().powu(k) * c_k;
                    if coeff.norm() > 0.0 {
                        terms.insert(vec![k], coeff);
                    }
                }
                _ => {
                    // (z1 c1 + z2 c2)^k expanded by binomials
                    let c1 = zeta0.coords()[0].conj();
                    let c2 = zeta0.coords()[1].conj();
                    let mut binom = 1.0f64;
                    for m in 0..=k {
                        if m > 0 {
                            binom = binom * (k - m + 1) as f64 / m as f64;
                        }
                        let coeff = c1.powu(m) * c2.powu(k - m) * (c_k * binom);
                        if coeff.norm() > 1e-300 {
                            terms.insert(vec![m, k - m], coeff);
                        }
                    }
                }
            }
        }
        Ok(Self { dim, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|idx| idx.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(PotlabError::InvalidParameter("dimension mismatch".into()));
        }
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            *terms.entry(k.clone()).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        Ok(Self {
            dim: self.dim,
            terms,
        })
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, c) in &self.terms {
            let mut mono = *c;
            for (i, &m) in idx.iter().enumerate() {
                if m > 0 {
                    mono *= z[i].powu(m);
                }
            }
            acc += mono;
        }
        acc
    }

    /// Values of the homogeneous parts f_k at every grid node:
    /// result[k][j] = f_k(node_j).
    pub fn homogeneous_values(&self, grid: &QuadratureGrid) -> Vec<Vec<Complex64>> {
        let kmax = self.max_degree() as usize;
        let mut out = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; kmax + 1];
        for (idx, c) in &self.terms {
            let deg = idx.iter().sum::<u32>() as usize;
            for (j, node) in grid.nodes().iter().enumerate() {
                let mut mono = *c;
                for (i, &m) in idx.iter().enumerate() {
                    if m > 0 {
                        mono *= node.coords()[i].powu(m);
                    }
                }
                out[deg][j] += mono;
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = HoloJson {
            max_degree: self.max_degree(),
            terms: self
                .terms
                .iter()
                .map(|(idx, c)| TermJson {
                    multi_index: idx.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("holo serialization cannot fail")
    }

    pub fn from_json(dim: usize, text: &str) -> Result<Self> {
        let doc: HoloJson =
            serde_json::from_str(text).map_err(|e| PotlabError::Serialization(e.to_string()))?;
        Self::from_terms(
            dim,
            doc.terms
                .into_iter()
                .map(|t| (t.multi_index, Complex64::new(t.re, t.im)))
                .collect(),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct HoloJson {
    max_degree: u32,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    multi_index: MultiIndex,
    re: f64,
    im: f64,
}

/// (I+R)^s: each degree-k part picks up the factor (1+k)^s. Exact on the
/// truncated expansion; s may be negative.
pub fn radial_power(f: &HoloFunction, s: f64) -> HoloFunction {
    if s == 0.0 {
        return f.clone();
    }
    HoloFunction {
        dim: f.dim,
        terms: f
            .terms
            .iter()
            .map(|(idx, c)| {
                let k = idx.iter().sum::<u32>() as f64;
                (idx.clone(), c * (1.0 + k).powf(s))
            })
            .collect(),
    }
}

/// Radii in (0, 1) with cell weights for integrating over [0, 1].
///
/// The default grid clusters geometrically toward r = 1, where all the
/// boundary-norm integrands concentrate.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    radii: Vec<f64>,
    weights: Vec<f64>,
}

impl RadialGrid {
    /// r_m = 1 - 2^{-m/stride}, m = 1..=points, with midpoint-cell weights
    /// covering [0, 1]. The rule is exact for constants.
    pub fn geometric(points: usize, stride: f64) -> Result<Self> {
        if points < 4 || stride <= 0.0 {
            return Err(PotlabError::InvalidParameter(
                "radial grid needs at least 4 points and a positive stride".into(),
            ));
        }
        let radii: Vec<f64> = (1..=points)
            .map(|m| 1.0 - 2f64.powf(-(m as f64) / stride))
            .collect();
        let weights = cell_weights(&radii);
        Ok(Self { radii, weights })
    }

    /// Default grid for boundary norms: 200 points, stride 12.
    pub fn default_norms() -> Self {
        Self::geometric(200, 12.0).expect("static parameters are valid")
    }

    pub fn custom(radii: Vec<f64>) -> Result<Self> {
        if radii.len() < 2
            || radii.windows(2).any(|w| w[0] >= w[1])
            || radii.iter().any(|&r| !(0.0 < r && r < 1.0))
        {
            return Err(PotlabError::InvalidParameter(
                "radii must be strictly increasing inside (0, 1)".into(),
            ));
        }
        let weights = cell_weights(&radii);
        Ok(Self { radii, weights })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

fn cell_weights(radii: &[f64]) -> Vec<f64> {
    let m = radii.len();
    let mut w = vec![0.0; m];
    for i in 0..m {
        let lo = if i == 0 {
            0.0
        } else {
            0.5 * (radii[i - 1] + radii[i])
        };
        let hi = if i == m - 1 {
            1.0
        } else {
            0.5 * (radii[i] + radii[i + 1])
        };
        w[i] = hi - lo;
    }
    w
}

/// Lower incomplete gamma for small arguments via the alternating series
/// x^m sum_j (-x)^j / (j! (m+j)).
fn lower_incomplete_gamma_small(m: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0 / m;
    for j in 1..64 {
        term *= -x / j as f64;
        let add = term / (m + j as f64);
        sum += add;
        if add.abs() < 1e-16 * sum.abs() {
            break;
        }
    }
    x.powf(m) * sum
}

/// The inverse of (I+R)^m as a radial integral:
/// g(y) = (1/Gamma(m)) int_0^1 (log 1/r)^{m-1} f(r y) dr,
/// which must agree with radial_power(f, -m).
///
/// The substitution u = log(1/r) turns this into
/// (1/Gamma(m)) int_0^inf u^{m-1} e^{-u} f(e^{-u} y) du, which is integrated
/// by two-point Gauss quadrature on cells induced by the radial grid
/// (geometric toward u = 0 where the kernel is singular for m < 1, extended
/// geometrically toward large u where e^{-u} dies), plus an analytic core on
/// [0, u_min] where f is frozen at its boundary value.
pub fn inverse_radial_integral(
    f: &HoloFunction,
    m: f64,
    radial: &RadialGrid,
    targets: &[Vec<Complex64>],
) -> Result<Vec<Complex64>> {
    if m <= 0.0 {
        return Err(PotlabError::InvalidParameter(format!(
            "radial integral order must be positive, got {m}"
        )));
    }
    // geometric cell boundaries in u from u(r_max) up to where e^{-u} is
    // negligible, at the ratio set by the radial grid's finest step
    let u0 = -radial.radii()[radial.len() - 1].ln();
    let u1 = -radial.radii()[radial.len() - 2].ln();
    let ratio = (u1 / u0).clamp(1.01, 1.2);
    let mut bounds = vec![u0];
    let mut top = u0;
    while top < 60.0 {
        top *= ratio;
        bounds.push(top);
    }
    let g = gamma(m);
    let gl = 1.0 / 3f64.sqrt();
    let u_min = bounds[0];
    let core_factor = lower_incomplete_gamma_small(m, u_min) / g;
    let mut out = Vec::with_capacity(targets.len());
    for y in targets {
        let mut acc = Complex64::new(0.0, 0.0);
        for w in bounds.windows(2) {
            let half = 0.5 * (w[1] - w[0]);
            let mid = 0.5 * (w[0] + w[1]);
            for sign in [-1.0, 1.0] {
                let u = mid + sign * gl * half;
                let r = (-u).exp();
                let ry: Vec<Complex64> = y.iter().map(|c| c * r).collect();
                acc += f.evaluate(&ry) * (u.powf(m - 1.0) * r * half);
            }
        }
        acc /= g;
        // analytic core over [0, u_min]: f is continuous up to the boundary
        acc += f.evaluate(y) * core_factor;
        out.push(acc);
    }
    Ok(out)
}
