//! A_p weight fields on the grid: masses and ball averages, Muckenhoupt
//! constants estimated over ball families, doubling orders, dual weights and
//! dyadic tail estimates for doubling weights.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PotlabError, Result};
use crate::sphere::{QuadratureGrid, SpherePoint};

/// Closed-form descriptor of a weight, kept so the field can be rebuilt
/// exactly on a refined grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightDescriptor {
    Constant(f64),
    /// w(zeta) = (1 - |zeta'|^2)^eps with zeta' the first n-1 coordinates.
    /// Only defined for n = 2.
    Power(f64),
    Custom,
}

/// A positive density against sigma, stored by its node values.
#[derive(Debug, Clone)]
pub struct WeightField {
    descriptor: WeightDescriptor,
    values: Vec<f64>,
}

impl WeightField {
    pub fn constant(grid: &QuadratureGrid, c: f64) -> Result<Self> {
        if c <= 0.0 {
            return Err(PotlabError::InvalidParameter(format!(
                "weight must be positive, got {c}"
            )));
        }
        Ok(Self {
            descriptor: WeightDescriptor::Constant(c),
            values: vec![c; grid.len()],
        })
    }

    /// The power weight (1 - |zeta_1|^2)^eps on an n = 2 grid.
    pub fn power(grid: &QuadratureGrid, eps: f64) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(PotlabError::InvalidParameter(
                "power weights need the first n-1 coordinates; only defined for n = 2".into(),
            ));
        }
        let values = grid
            .nodes()
            .iter()
            .map(|p| (1.0 - p.coords()[0].norm_sqr()).powf(eps))
            .collect();
        Ok(Self {
            descriptor: WeightDescriptor::Power(eps),
            values,
        })
    }

    pub fn custom(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(PotlabError::InvalidParameter(
                "custom weight values must be positive and finite".into(),
            ));
        }
        Ok(Self {
            descriptor: WeightDescriptor::Custom,
            values,
        })
    }

    /// Rebuilds the field on another grid; only possible for closed-form
    /// descriptors.
    pub fn rebuild(&self, grid: &QuadratureGrid) -> Result<Self> {
        match self.descriptor {
            WeightDescriptor::Constant(c) => Self::constant(grid, c),
            WeightDescriptor::Power(eps) => Self::power(grid, eps),
            WeightDescriptor::Custom => Err(PotlabError::InvalidParameter(
                "custom weights carry no closed form and cannot be rebuilt".into(),
            )),
        }
    }

    pub fn descriptor(&self) -> &WeightDescriptor {
        &self.descriptor
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            descriptor: &'a WeightDescriptor,
            values: &'a [f64],
        }
        serde_json::to_string(&Doc {
            descriptor: &self.descriptor,
            values: &self.values,
        })
        .expect("weight serialization cannot fail")
    }
}

/// W(E) = integral of w over the node set E.
pub fn weighted_mass(w: &WeightField, set: &[usize], grid: &QuadratureGrid) -> f64 {
    let q = grid.weights();
    set.iter().map(|&j| q[j] * w.values[j]).sum()
}

/// Average of w over E against sigma. Errors on an empty set.
pub fn ball_average(w: &WeightField, set: &[usize], grid: &QuadratureGrid) -> Result<f64> {
    if set.is_empty() {
        return Err(PotlabError::EmptyBall);
    }
    Ok(weighted_mass(w, set, grid) / grid.sigma(set))
}

/// The dual weight w^{-(p'-1)}, p' = p/(p-1). Dualizing again with p'
/// recovers w.
pub fn dual_weight(w: &WeightField, p: f64) -> Result<WeightField> {
    if p <= 1.0 {
        return Err(PotlabError::InvalidParameter(format!(
            "dual weight needs p > 1, got {p}"
        )));
    }
    let e = 1.0 / (p - 1.0); // p' - 1
    let descriptor = match w.descriptor {
        WeightDescriptor::Constant(c) => WeightDescriptor::Constant(c.powf(-e)),
        WeightDescriptor::Power(eps) => WeightDescriptor::Power(-eps * e),
        WeightDescriptor::Custom => WeightDescriptor::Custom,
    };
    Ok(WeightField {
        descriptor,
        values: w.values.iter().map(|v| v.powf(-e)).collect(),
    })
}

/// An explicit family of balls over which sup-type quantities are estimated.
#[derive(Debug, Clone)]
pub struct BallFamily {
    pub balls: Vec<(SpherePoint, f64)>,
}

impl BallFamily {
    pub fn new(balls: Vec<(SpherePoint, f64)>) -> Result<Self> {
        if balls.iter().any(|(_, r)| !(*r > 0.0 && *r <= 2.0)) {
            return Err(PotlabError::InvalidParameter(
                "ball radii must lie in (0, 2]".into(),
            ));
        }
        Ok(Self { balls })
    }

    /// Every grid node as a center, dyadic radii 2^-k for k in the range.
    pub fn all_nodes_dyadic(grid: &QuadratureGrid, k_range: std::ops::RangeInclusive<u32>) -> Self {
        let mut balls = Vec::new();
        for node in grid.nodes() {
            for k in k_range.clone() {
                balls.push((node.clone(), 2f64.powi(-(k as i32))));
            }
        }
        Self { balls }
    }

    /// A resolution-independent family: centers from a coarse companion grid
    /// of the same dimension, dyadic radii 2^-k.
    pub fn coarse_dyadic(
        dim: usize,
        coarse_resolution: usize,
        k_range: std::ops::RangeInclusive<u32>,
    ) -> Result<Self> {
        let coarse = QuadratureGrid::build(dim, coarse_resolution)?;
        let mut balls = Vec::new();
        for node in coarse.nodes() {
            for k in k_range.clone() {
                balls.push((node.clone(), 2f64.powi(-(k as i32))));
            }
        }
        Ok(Self { balls })
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }
}

/// Result of an A_p estimation: the sup over the family plus how many balls
/// were skipped for containing no nodes.
#[derive(Debug, Clone)]
pub struct ApEstimate {
    pub value: f64,
    pub skipped: usize,
}

/// Estimates the A_p constant
/// sup_B (avg_B w) (avg_B w^{-1/(p-1)})^{p-1}
/// over the family. Always >= 1; balls without nodes are skipped.
pub fn ap_constant(
    w: &WeightField,
    p: f64,
    grid: &QuadratureGrid,
    family: &BallFamily,
) -> Result<ApEstimate> {
    if p <= 1.0 {
        return Err(PotlabError::InvalidParameter(format!(
            "A_p needs p > 1, got {p}"
        )));
    }
    if family.is_empty() {
        return Err(PotlabError::InvalidParameter("empty ball family".into()));
    }
    let dual = dual_weight(w, p)?;
    let per_ball: Vec<Option<f64>> = family
        .balls
        .par_iter()
        .map(|(center, r)| {
            let mut sig = 0.0;
            let mut mw = 0.0;
            let mut md = 0.0;
            for (j, node) in grid.nodes().iter().enumerate() {
                if crate::sphere::gauge_sphere(center, node) < *r {
                    let q = grid.weights()[j];
                    sig += q;
                    mw += q * w.values[j];
                    md += q * dual.values[j];
                }
            }
            if sig == 0.0 {
                None
            } else {
                Some((mw / sig) * (md / sig).powf(p - 1.0))
            }
        })
        .collect();
    let skipped = per_ball.iter().filter(|v| v.is_none()).count();
    let value = per_ball
        .iter()
        .flatten()
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    if skipped == family.len() {
        return Err(PotlabError::ResolutionTooCoarse(
            "every ball in the family is empty on this grid".into(),
        ));
    }
    Ok(ApEstimate { value, skipped })
}

/// Least-squares doubling order: for each ball, fit
/// log W(2^k B) - log W(B) = tau * k log 2 over k = 0..3 (through the
/// origin), then take the sup over the family.
pub fn doubling_order(
    w: &WeightField,
    grid: &QuadratureGrid,
    family: &BallFamily,
) -> Result<DoublingFit> {
    if family.is_empty() {
        return Err(PotlabError::InvalidParameter("empty ball family".into()));
    }
    let fits: Vec<Option<f64>> = family
        .balls
        .par_iter()
        .map(|(center, r)| {
            if 8.0 * r > 2.0 {
                return None; // 2^3 B must stay within the gauge diameter
            }
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            let base = weighted_mass(w, &grid.ball(center, *r), grid);
            if base <= 0.0 {
                return None;
            }
            for k in 0..=3u32 {
                let mass = weighted_mass(w, &grid.ball(center, 2f64.powi(k as i32) * r), grid);
                if mass <= 0.0 {
                    return None;
                }
                xs.push(k as f64 * std::f64::consts::LN_2);
                ys.push((mass / base).ln());
            }
            let num: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
            let den: f64 = xs.iter().map(|x| x * x).sum();
            if den == 0.0 {
                None
            } else {
                Some(num / den)
            }
        })
        .collect();
    let degenerate = fits.iter().filter(|f| f.is_none()).count();
    let tau_hat = fits
        .iter()
        .flatten()
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    if degenerate == family.len() {
        return Err(PotlabError::ResolutionTooCoarse(
            "no ball in the family admits a doubling fit".into(),
        ));
    }
    Ok(DoublingFit {
        tau_hat,
        degenerate,
    })
}

#[derive(Debug, Clone)]
pub struct DoublingFit {
    pub tau_hat: f64,
    /// Balls skipped because a mass vanished or the radius range left the sphere.
    pub degenerate: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    Upper,
    Lower,
}

/// Dyadic tail estimates for a doubling weight.
///
/// Upper: (int_r^2 x^-t avg_{B(zeta,x)} w dx/x) / (r^-t avg_{B(zeta,r)} w).
/// Lower: (int_0^r x^t (avg_{B(zeta,x)} w^{-(p'-1)})^{p-1} dx/x) /
///        (r^t (avg_{B(zeta,r)} w^{-(p'-1)})^{p-1}).
/// Both integrals are discretized on the log-midpoints x = 2^{±(m+1/2)} r
/// with mass log 2 per level; the lower sum stops when balls run out of
/// nodes.
pub fn tail_bound_ratio(
    w: &WeightField,
    p: f64,
    t: f64,
    zeta: &SpherePoint,
    r: f64,
    grid: &QuadratureGrid,
    side: TailSide,
) -> Result<f64> {
    if !(r > 0.0 && r <= 0.5) {
        return Err(PotlabError::InvalidParameter(format!(
            "tail ratios need r in (0, 1/2], got {r}"
        )));
    }
    match side {
        TailSide::Upper => {
            let denom_ball = grid.ball(zeta, r);
            let denom = r.powf(-t) * ball_average(w, &denom_ball, grid)?;
            let mut sum = 0.0;
            let mut m = 0u32;
            loop {
                let x = 2f64.powf(m as f64 + 0.5) * r;
                if x > 2.0 {
                    break;
                }
                let ball = grid.ball(zeta, x);
                sum += x.powf(-t) * ball_average(w, &ball, grid)? * std::f64::consts::LN_2;
                m += 1;
            }
            Ok(sum / denom)
        }
        TailSide::Lower => {
            let dual = dual_weight(w, p)?;
            let denom_ball = grid.ball(zeta, r);
            let denom = r.powf(t) * ball_average(&dual, &denom_ball, grid)?.powf(p - 1.0);
            let mut sum = 0.0;
            for m in 0..24u32 {
                let x = 2f64.powf(-(m as f64 + 0.5)) * r;
                let ball = grid.ball(zeta, x);
                if ball.is_empty() {
                    break;
                }
                let avg = ball_average(&dual, &ball, grid)?;
                sum += x.powf(t) * avg.powf(p - 1.0) * std::f64::consts::LN_2;
            }
            Ok(sum / denom)
        }
    }
}
