//! Geometry of the unit sphere in C^n: the gauge |1 - z·conj(zeta)|,
//! quadrature grids for the normalized surface measure, nonisotropic balls,
//! admissible approach regions and tents.

use arrayvec::ArrayVec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PotlabError, Result};

/// Two points closer than this (in gauge) are treated as coincident.
pub const COINCIDENCE_EPS: f64 = 1e-12;

/// Coordinates are stored inline; only n = 1 and n = 2 occur.
pub type Coords = ArrayVec<Complex64, 2>;

fn to_coords(coords: &[Complex64]) -> Result<Coords> {
    if coords.is_empty() || coords.len() > 2 {
        return Err(PotlabError::InvalidParameter(format!(
            "points live in C^1 or C^2, got {} coordinates",
            coords.len()
        )));
    }
    Ok(coords.iter().copied().collect())
}

/// A point on the unit sphere of C^n.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: Coords,
}

impl SpherePoint {
    /// Builds a sphere point, checking |zeta| = 1 within 1e-12.
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        Self::from_slice(&coords)
    }

    pub fn from_slice(coords: &[Complex64]) -> Result<Self> {
        let norm2: f64 = coords.iter().map(|c| c.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(PotlabError::InvalidParameter(format!(
                "sphere point must have unit norm, got |z|^2 = {norm2}"
            )));
        }
        Ok(Self {
            coords: to_coords(coords)?,
        })
    }

    /// Rescales an arbitrary nonzero vector onto the sphere.
    pub fn normalized(coords: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(PotlabError::InvalidParameter(
                "cannot project the origin onto the sphere".into(),
            ));
        }
        let scaled: Vec<Complex64> = coords.into_iter().map(|c| c / norm).collect();
        Ok(Self {
            coords: to_coords(&scaled)?,
        })
    }

    /// The point (1, 0, ..., 0).
    pub fn pole(dim: usize) -> Self {
        let mut coords = Coords::new();
        coords.push(Complex64::new(1.0, 0.0));
        for _ in 1..dim {
            coords.push(Complex64::new(0.0, 0.0));
        }
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// Complex inner product zeta·conj(eta).
    pub fn inner(&self, other: &SpherePoint) -> Complex64 {
        inner(&self.coords, &other.coords)
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// The gauge |1 - z·conj(zeta)| between a point of the closed ball and a
/// sphere point. Symmetric on sphere x sphere and bounded by 2.
pub fn gauge(z: &[Complex64], zeta: &SpherePoint) -> f64 {
    (Complex64::new(1.0, 0.0) - inner(z, zeta.coords())).norm()
}

/// Gauge between two sphere points.
pub fn gauge_sphere(a: &SpherePoint, b: &SpherePoint) -> f64 {
    (Complex64::new(1.0, 0.0) - a.inner(b)).norm()
}

/// A point strictly inside the unit ball of C^n.
#[derive(Debug, Clone)]
pub struct BallPoint {
    coords: Coords,
    radius: f64,
}

impl BallPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        let radius: f64 = coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if radius >= 1.0 {
            return Err(PotlabError::InvalidParameter(format!(
                "ball point must satisfy |z| < 1, got {radius}"
            )));
        }
        Ok(Self {
            coords: to_coords(&coords)?,
            radius,
        })
    }

    /// r·zeta for a sphere point zeta and 0 <= r < 1.
    pub fn radial(r: f64, zeta: &SpherePoint) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(PotlabError::InvalidParameter(format!(
                "radial part must lie in [0,1), got {r}"
            )));
        }
        Ok(Self {
            coords: zeta.coords().iter().map(|c| c * r).collect(),
            radius: r,
        })
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// |z|.
    pub fn modulus(&self) -> f64 {
        self.radius
    }

    /// z / |z|, undefined at the origin.
    pub fn projection(&self) -> Option<SpherePoint> {
        if self.radius < COINCIDENCE_EPS {
            None
        } else {
            SpherePoint::normalized(self.coords.to_vec()).ok()
        }
    }
}

/// Quadrature grid on S^n (n = 1 or 2) with positive weights summing to 1,
/// discretizing the normalized surface measure sigma.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    dim: usize,
    resolution: usize,
    nodes: Vec<SpherePoint>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    /// Builds a grid at the given resolution.
    ///
    /// n = 1: `resolution` equispaced points on the circle, each of weight
    /// 1/N. n = 2: product grid in the coordinates
    /// (cos t · e^{i a}, sin t · e^{i b}) with `resolution` points in each
    /// angle, `resolution/2` midpoint values of t in (0, pi/2), and cell
    /// weights proportional to sin t · cos t, normalized to total mass 1.
    pub fn build(n: usize, resolution: usize) -> Result<Self> {
        if resolution < 4 {
            return Err(PotlabError::InvalidParameter(format!(
                "resolution must be at least 4, got {resolution}"
            )));
        }
        match n {
            1 => Ok(Self::build_circle(resolution)),
            2 => Ok(Self::build_s3(resolution)),
            _ => Err(PotlabError::InvalidParameter(format!(
                "grids are only generated for n in {{1, 2}}, got {n}"
            ))),
        }
    }

    fn build_circle(n_points: usize) -> Self {
        let mut nodes = Vec::with_capacity(n_points);
        let w = 1.0 / n_points as f64;
        for j in 0..n_points {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_points as f64;
            let mut coords = Coords::new();
            coords.push(Complex64::from_polar(1.0, theta));
            nodes.push(SpherePoint { coords });
        }
        Self {
            dim: 1,
            resolution: n_points,
            weights: vec![w; n_points],
            nodes,
        }
    }

    fn build_s3(resolution: usize) -> Self {
        let n_theta = resolution;
        let n_t = (resolution / 2).max(2);
        let dt = std::f64::consts::FRAC_PI_2 / n_t as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_theta * n_t);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for jt in 0..n_t {
            let t = (jt as f64 + 0.5) * dt;
            let (st, ct) = t.sin_cos();
            let cell = st * ct;
            for j1 in 0..n_theta {
                let a = 2.0 * std::f64::consts::PI * j1 as f64 / n_theta as f64;
                let z1 = Complex64::from_polar(ct, a);
                for j2 in 0..n_theta {
                    let b = 2.0 * std::f64::consts::PI * j2 as f64 / n_theta as f64;
                    let mut coords = Coords::new();
                    coords.push(z1);
                    coords.push(Complex64::from_polar(st, b));
                    nodes.push(SpherePoint { coords });
                    weights.push(cell);
                }
            }
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Self {
            dim: 2,
            resolution,
            nodes,
            weights,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The resolution parameter the grid was built with.
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, j: usize) -> &SpherePoint {
        &self.nodes[j]
    }

    pub fn nodes(&self) -> &[SpherePoint] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// sigma-mass of a node set.
    pub fn sigma(&self, idx: &[usize]) -> f64 {
        idx.iter().map(|&j| self.weights[j]).sum()
    }

    /// Gauge from an arbitrary point of the closed ball to every node.
    pub fn gauges_from(&self, z: &[Complex64]) -> Vec<f64> {
        self.nodes.iter().map(|node| gauge(z, node)).collect()
    }

    /// Indices of the nonisotropic ball B(zeta, r) = { gauge < r }.
    pub fn ball(&self, center: &SpherePoint, r: f64) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, node)| gauge_sphere(center, node) < r)
            .map(|(j, _)| j)
            .collect()
    }

    /// Quadrature of a function given by its node values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(values)
            .map(|(q, v)| q * v)
            .sum()
    }

    pub fn to_json(&self) -> String {
        let nodes: Vec<Vec<f64>> = self
            .nodes
            .iter()
            .map(|p| {
                p.coords()
                    .iter()
                    .flat_map(|c| [c.re, c.im])
                    .collect::<Vec<f64>>()
            })
            .collect();
        let doc = GridJson {
            dim: self.dim,
            resolution: self.resolution,
            nodes,
            weights: self.weights.clone(),
        };
        serde_json::to_string(&doc).expect("grid serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GridJson =
            serde_json::from_str(text).map_err(|e| PotlabError::Serialization(e.to_string()))?;
        if doc.nodes.len() != doc.weights.len() {
            return Err(PotlabError::Serialization(
                "node and weight counts differ".into(),
            ));
        }
        let mut nodes = Vec::with_capacity(doc.nodes.len());
        for flat in &doc.nodes {
            if flat.len() != 2 * doc.dim {
                return Err(PotlabError::Serialization(format!(
                    "node entry has {} floats, expected {}",
                    flat.len(),
                    2 * doc.dim
                )));
            }
            let coords: Vec<Complex64> = flat
                .chunks(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect();
            nodes.push(SpherePoint::new(coords)?);
        }
        Ok(Self {
            dim: doc.dim,
            resolution: doc.resolution,
            nodes,
            weights: doc.weights,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    dim: usize,
    #[serde(default)]
    resolution: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

/// Whether z lies in the admissible region
/// D_alpha(zeta) = { |1 - z·conj(zeta)| < alpha (1 - |z|) }, alpha > 1.
pub fn admissible_contains(z: &BallPoint, zeta: &SpherePoint, alpha: f64) -> bool {
    debug_assert!(alpha > 1.0);
    gauge(z.coords(), zeta) < alpha * (1.0 - z.modulus())
}

/// Whether z lies in the admissible tent over an open set G, where G is given
/// through the node set of its complement: the tent is the complement of the
/// union of D_alpha(zeta) over zeta outside G, so z is in it exactly when z
/// avoids every such region.
pub fn tent_contains(
    z: &BallPoint,
    outside_nodes: &[usize],
    alpha: f64,
    grid: &QuadratureGrid,
) -> bool {
    outside_nodes
        .iter()
        .all(|&j| !admissible_contains(z, grid.node(j), alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gauge_identity_and_origin() {
        let grid = QuadratureGrid::build(1, 16).unwrap();
        for node in grid.nodes() {
            assert!(gauge_sphere(node, node) < 1e-14);
            assert_abs_diff_eq!(gauge(&[c(0.0, 0.0)], node), 1.0, epsilon = 1e-15);
        }
        // n = 1: gauge(1, i) = |1 + i| = sqrt(2)
        let one = SpherePoint::new(vec![c(1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(
            gauge(&[c(0.0, 1.0)], &one),
            std::f64::consts::SQRT_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(QuadratureGrid::build(1, 3).is_err());
        assert!(QuadratureGrid::build(3, 16).is_err());
        assert!(QuadratureGrid::build(0, 16).is_err());
    }

    #[test]
    fn circle_grid_is_uniform() {
        let grid = QuadratureGrid::build(1, 8).unwrap();
        assert_eq!(grid.len(), 8);
        for &w in grid.weights() {
            assert_abs_diff_eq!(w, 0.125, epsilon = 1e-15);
        }
        let total: f64 = grid.weights().iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn grids_are_normalized_and_odd_exact() {
        for (n, res) in [(1usize, 64usize), (2, 12)] {
            let grid = QuadratureGrid::build(n, res).unwrap();
            let total: f64 = grid.weights().iter().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
            // odd symmetry: integral of zeta_1 vanishes
            let mean: Complex64 = grid
                .nodes()
                .iter()
                .zip(grid.weights())
                .map(|(p, &q)| p.coords()[0] * q)
                .sum();
            assert!(mean.norm() < 1e-10, "got {mean}");
        }
    }

    #[test]
    fn s3_coordinate_second_moment() {
        // By symmetry and |z1|^2 + |z2|^2 = 1, each coordinate carries mass 1/2.
        let grid = QuadratureGrid::build(2, 16).unwrap();
        let m: f64 = grid
            .nodes()
            .iter()
            .zip(grid.weights())
            .map(|(p, &q)| q * p.coords()[0].norm_sqr())
            .sum();
        assert_abs_diff_eq!(m, 0.5, epsilon = 1e-3);
    }

    #[test]
    fn ball_edge_cases() {
        let grid = QuadratureGrid::build(1, 32).unwrap();
        let zeta = grid.node(5).clone();
        // radius larger than the gauge diameter captures everything
        assert_eq!(grid.ball(&zeta, 2.5).len(), grid.len());
        // a tiny ball around a node captures exactly that node
        assert_eq!(grid.ball(&zeta, 1e-9), vec![5]);
    }

    /// Closed-form arc length of {|1 - e^{i t}| < r} by bisection on the
    /// gauge; independent of the grid code path.
    fn circle_ball_sigma_oracle(r: f64) -> f64 {
        let f = |t: f64| (c(1.0, 0.0) - Complex64::from_polar(1.0, t)).norm() - r;
        let (mut lo, mut hi) = (0.0f64, std::f64::consts::PI);
        assert!(f(lo) < 0.0 && f(hi) > 0.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        2.0 * lo / (2.0 * std::f64::consts::PI)
    }

    #[test]
    fn circle_ball_mass_matches_arc_length() {
        // sigma(B(zeta, r))/r tends to 1/pi on the circle; compare discrete
        // mass against the root-solved arc length at 10x the base resolution.
        let grid = QuadratureGrid::build(1, 2560).unwrap();
        for k in 4..=6 {
            let r = 2f64.powi(-k);
            let ball = grid.ball(&grid.node(0).clone(), r);
            let mass = grid.sigma(&ball);
            let oracle = circle_ball_sigma_oracle(r);
            // quantization is one node out of ~13 at the smallest radius
            assert!(
                (mass - oracle).abs() / oracle < 0.03,
                "r = {r}: {mass} vs {oracle}"
            );
            assert!((mass / r - std::f64::consts::FRAC_1_PI).abs() < 0.02);
        }
    }

    #[test]
    fn sigma_ball_scaling_exponent_circle() {
        let grid = QuadratureGrid::build(1, 2048).unwrap();
        let zeta = grid.node(0).clone();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for k in 2..=6 {
            let r = 2f64.powi(-k);
            xs.push(r.ln());
            ys.push(grid.sigma(&grid.ball(&zeta, r)).ln());
        }
        let slope = least_squares_slope(&xs, &ys);
        assert!((slope - 1.0).abs() < 0.1, "slope {slope}");
    }

    fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        num / den
    }

    #[test]
    fn admissible_region_examples() {
        let grid = QuadratureGrid::build(1, 64).unwrap();
        let zeta = grid.node(3).clone();
        let origin = BallPoint::new(vec![c(0.0, 0.0)]).unwrap();
        assert!(admissible_contains(&origin, &zeta, 2.0));
        for r in [0.1, 0.5, 0.9, 0.99] {
            let z = BallPoint::radial(r, &zeta).unwrap();
            assert!(admissible_contains(&z, &zeta, 2.0));
        }
        // the antipodal ray is far from the approach region
        let anti = SpherePoint::new(vec![-zeta.coords()[0]]).unwrap();
        let z = BallPoint::radial(0.9, &anti).unwrap();
        assert!(!admissible_contains(&z, &zeta, 2.0));
    }

    #[test]
    fn tent_examples() {
        let grid = QuadratureGrid::build(1, 128).unwrap();
        // G = S^n: empty union, every point is in the tent
        let z = BallPoint::new(vec![c(0.3, 0.4)]).unwrap();
        assert!(tent_contains(&z, &[], 2.0, &grid));
        // the origin lies in every admissible region
        let origin = BallPoint::new(vec![c(0.0, 0.0)]).unwrap();
        assert!(!tent_contains(&origin, &[0], 2.0, &grid));
    }

    #[test]
    fn tent_over_ball_membership() {
        // G = B(zeta0, r): the point (1 - r/4) zeta0 lies in the tent for
        // alpha = 2, and a 4x finer scan of the outside set agrees.
        let zeta0_angle = 0.7f64;
        for r in [0.25, 0.0625] {
            let mut verdicts = Vec::new();
            for res in [256usize, 1024] {
                let grid = QuadratureGrid::build(1, res).unwrap();
                let zeta0 = SpherePoint::new(vec![Complex64::from_polar(1.0, zeta0_angle)]).unwrap();
                let inside = grid.ball(&zeta0, r);
                let inside_set: std::collections::HashSet<usize> = inside.into_iter().collect();
                let outside: Vec<usize> =
                    (0..grid.len()).filter(|j| !inside_set.contains(j)).collect();
                let z = BallPoint::radial(1.0 - r / 4.0, &zeta0).unwrap();
                verdicts.push(tent_contains(&z, &outside, 2.0, &grid));
            }
            assert_eq!(verdicts, vec![true, true], "r = {r}");
        }
    }

    proptest! {
        #[test]
        fn gauge_is_bounded(theta in 0.0..(2.0 * std::f64::consts::PI),
                            rho in 0.0..1.0f64,
                            phi in 0.0..(2.0 * std::f64::consts::PI)) {
            let zeta = SpherePoint::new(vec![Complex64::from_polar(1.0, theta)]).unwrap();
            let z = [Complex64::from_polar(rho, phi)];
            let g = gauge(&z, &zeta);
            prop_assert!((0.0..=2.0 + 1e-12).contains(&g));
        }

        #[test]
        fn balls_are_monotone_in_radius(center_idx in 0usize..64,
                                        r1 in 0.01f64..1.0,
                                        scale in 1.0f64..3.0) {
            let grid = QuadratureGrid::build(1, 64).unwrap();
            let zeta = grid.node(center_idx).clone();
            let small = grid.ball(&zeta, r1);
            let large = grid.ball(&zeta, r1 * scale);
            let large_set: std::collections::HashSet<usize> = large.into_iter().collect();
            prop_assert!(small.iter().all(|j| large_set.contains(j)));
        }

        #[test]
        fn tents_are_monotone_in_the_set(rho in 0.1f64..0.95,
                                         phi in 0.0..(2.0 * std::f64::consts::PI),
                                         r in 0.05f64..0.5) {
            // G1 = B(zeta0, r) subset of G2 = B(zeta0, 2r): tent membership
            // must be preserved when the set grows (outside set shrinks).
            let grid = QuadratureGrid::build(1, 64).unwrap();
            let zeta0 = grid.node(0).clone();
            let z = BallPoint::new(vec![Complex64::from_polar(rho, phi)]).unwrap();
            let outside = |radius: f64| -> Vec<usize> {
                let inside: std::collections::HashSet<usize> =
                    grid.ball(&zeta0, radius).into_iter().collect();
                (0..grid.len()).filter(|j| !inside.contains(j)).collect()
            };
            let in_small = tent_contains(&z, &outside(r), 2.0, &grid);
            let in_large = tent_contains(&z, &outside(2.0 * r), 2.0, &grid);
            prop_assert!(!in_small || in_large);
        }
    }

    #[test]
    fn grid_json_round_trip() {
        let grid = QuadratureGrid::build(2, 8).unwrap();
        let text = grid.to_json();
        let back = QuadratureGrid::from_json(&text).unwrap();
        assert_eq!(back.dim(), 2);
        assert_eq!(back.len(), grid.len());
        for (a, b) in grid.weights().iter().zip(back.weights()) {
            assert_abs_diff_eq!(a, b, epsilon = 0.0);
        }
        for (p, q) in grid.nodes().iter().zip(back.nodes()) {
            assert_abs_diff_eq!(gauge_sphere(p, q), 0.0, epsilon = 1e-15);
        }
    }
}
