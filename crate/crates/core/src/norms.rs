//! Boundary norms for holomorphic functions: Hardy-Sobolev sup-norms,
//! Littlewood-Paley radial functionals, admissible area functions, the
//! admissible maximal operator and the mixed Triebel-Lizorkin norms built
//! from them.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{PotlabError, Result};
use crate::holo::{radial_power, HoloFunction, RadialGrid};
use crate::sphere::{QuadratureGrid, SpherePoint};
use crate::weights::WeightField;

/// [s]^+ : the integer part of s plus one. This is the derivative order the
/// mixed norms use by default.
pub fn int_part_plus_one(s: f64) -> u32 {
    debug_assert!(s >= 0.0);
    s.floor() as u32 + 1
}

/// L^p(w) norm of a nonnegative pointwise function given by node values.
pub fn lp_norm(values: &[f64], w: &WeightField, grid: &QuadratureGrid, p: f64) -> f64 {
    let q = grid.weights();
    values
        .iter()
        .enumerate()
        .map(|(j, v)| q[j] * w.values()[j] * v.abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Values of g at every lattice point r_m * node_j; result[j][m].
fn value_lattice(
    g: &HoloFunction,
    grid: &QuadratureGrid,
    radial: &RadialGrid,
) -> Vec<Vec<Complex64>> {
    let homog = g.homogeneous_values(grid);
    let radii = radial.radii();
    (0..grid.len())
        .into_par_iter()
        .map(|j| {
            radii
                .iter()
                .map(|&r| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut rk = 1.0;
                    for h in &homog {
                        acc += h[j] * rk;
                        rk *= r;
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// sup_{0<r<1} of the L^p(w) norm of (I+R)^s f on the sphere of radius r,
/// taken over the radial grid augmented with r = 1 - 1e-6. For truncated
/// expansions the sup is attained in the limit r -> 1, so the augmented
/// radius is the usual maximizer.
pub fn hs_norm(
    f: &HoloFunction,
    p: f64,
    s: f64,
    w: &WeightField,
    grid: &QuadratureGrid,
    radial: &RadialGrid,
) -> f64 {
    let g = radial_power(f, s);
    let homog = g.homogeneous_values(grid);
    let q = grid.weights();
    let mut radii: Vec<f64> = radial.radii().to_vec();
    radii.push(1.0 - 1e-6);
    radii
        .par_iter()
        .map(|&r| {
            let mut acc = 0.0;
            for j in 0..grid.len() {
                let mut v = Complex64::new(0.0, 0.0);
                let mut rk = 1.0;
                for h in &homog {
                    v += h[j] * rk;
                    rk *= r;
                }
                acc += q[j] * w.values()[j] * v.norm().powf(p);
            }
            acc.powf(1.0 / p)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

fn radial_functional(
    values: &[Complex64],
    radial: &RadialGrid,
    k: u32,
    q: f64,
    s: f64,
) -> f64 {
    if q.is_infinite() {
        values
            .iter()
            .zip(radial.radii())
            .map(|(v, &r)| v.norm() * (1.0 - r * r).powf(k as f64 - s))
            .fold(0.0, f64::max)
    } else {
        let e = (k as f64 - s) * q - 1.0;
        values
            .iter()
            .zip(radial.radii().iter().zip(radial.weights()))
            .map(|(v, (&r, &wr))| wr * v.norm().powf(q) * (1.0 - r * r).powf(e))
            .sum::<f64>()
            .powf(1.0 / q)
    }
}

/// The Littlewood-Paley radial functional at one boundary point:
/// ( int_0^1 |(I+R)^k f(r zeta)|^q (1-r^2)^{(k-s)q-1} dr )^{1/q},
/// or the weighted sup over the radial grid when q is infinite.
pub fn littlewood_paley(
    f: &HoloFunction,
    zeta: &SpherePoint,
    k: u32,
    q: f64,
    s: f64,
    radial: &RadialGrid,
) -> Result<f64> {
    check_kqs(k, q, s)?;
    let g = radial_power(f, k as f64);
    let values: Vec<Complex64> = radial
        .radii()
        .iter()
        .map(|&r| {
            let z: Vec<Complex64> = zeta.coords().iter().map(|c| c * r).collect();
            g.evaluate(&z)
        })
        .collect();
    Ok(radial_functional(&values, radial, k, q, s))
}

fn check_kqs(k: u32, q: f64, s: f64) -> Result<()> {
    if (k as f64) <= s {
        return Err(PotlabError::InvalidParameter(format!(
            "derivative order k = {k} must exceed the smoothness s = {s}"
        )));
    }
    if !(q >= 1.0) {
        return Err(PotlabError::InvalidParameter(format!(
            "exponent q must lie in [1, inf], got {q}"
        )));
    }
    Ok(())
}

/// Littlewood-Paley functional at every grid node.
pub fn littlewood_paley_all_nodes(
    f: &HoloFunction,
    k: u32,
    q: f64,
    s: f64,
    grid: &QuadratureGrid,
    radial: &RadialGrid,
) -> Result<Vec<f64>> {
    check_kqs(k, q, s)?;
    let g = radial_power(f, k as f64);
    let lattice = value_lattice(&g, grid, radial);
    Ok(lattice
        .par_iter()
        .map(|values| radial_functional(values, radial, k, q, s))
        .collect())
}

/// Shared cone walk: applies `accum` to every lattice point r_m * node_j
/// inside the admissible region of `center`.
fn cone_fold<A: Fn(usize, usize, f64) -> f64>(
    center: &SpherePoint,
    alpha: f64,
    grid: &QuadratureGrid,
    radial: &RadialGrid,
    init: f64,
    combine: impl Fn(f64, f64) -> f64,
    accum: A,
) -> (f64, usize) {
    let mut acc = init;
    let mut count = 0usize;
    for (j, node) in grid.nodes().iter().enumerate() {
        let u = node.inner(center);
        for (m, &r) in radial.radii().iter().enumerate() {
            let gauge = (Complex64::new(1.0, 0.0) - u * r).norm();
            if gauge < alpha * (1.0 - r) {
                acc = combine(acc, accum(j, m, r));
                count += 1;
            }
        }
    }
    (acc, count)
}

/// The admissible area function at one boundary point: the cone
/// D_alpha(zeta) is discretized by the lattice {r_m node_j} with volume
/// element q_j * dr_m * r^{2n-1} (the constant 2n of the polar volume is
/// absorbed into the two-sided constants).
pub fn area_fn(
    f: &HoloFunction,
    center: &SpherePoint,
    alpha: f64,
    k: u32,
    q: f64,
    s: f64,
    grid: &QuadratureGrid,
    radial: &RadialGrid,
) -> Result<f64> {
    check_kqs(k, q, s)?;
    check_alpha(alpha)?;
    let g = radial_power(f, k as f64);
    let lattice = value_lattice(&g, grid, radial);
    area_from_lattice(&lattice, center, alpha, k, q, s, grid, radial)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0) {
        return Err(PotlabError::InvalidParameter(format!(
            "admissible aperture must satisfy alpha > 1, got {alpha}"
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn area_from_lattice(
    lattice: &[Vec<Complex64>],
    center: &SpherePoint,
    alpha: f64,
    k: u32,
    q: f64,
    s: f64,
    grid: &QuadratureGrid,
    radial: &RadialGrid,
) -> Result<f64> {
    let n = grid.dim() as f64;
    let qw = grid.weights();
    let rw = radial.weights();
    let (value, count) = if q.is_infinite() {
        cone_fold(
            center,
            alpha,
            grid,
            radial,
            0.0,
            f64::max,
            |j, m, r| lattice[j][m].norm() * (1.0 - r * r).powf(k as f64 - s),
        )
    } else {
        let e = (k as f64 - s) * q - n - 1.0;
        let (sum, count) = cone_fold(
            center,
            alpha,
            grid,
            radial,
            0.0,
            |a, b| a + b,
            |j, m, r| {
                qw[j] * rw[m]
                    * r.powi(2 * grid.dim() as i32 - 1)
                    * lattice[j][m].norm().powf(q)
                    * (1.0 - r * r).powf(e)
            },
        );
        (sum.powf(1.0 / q), count)
    };
    if count == 0 {
        return Err(PotlabError::ResolutionTooCoarse(format!(
            "resolution too coarse for alpha = {alpha}"
        )));
    }
    Ok(value)
}

/// Area function at every grid node, sharing one value lattice.
#[allow(clippy::too_many_arguments)]
pub fn area_fn_all_nodes(
    f: &HoloFunction,
    alpha: f64,
    k: u32,
    q: f64,
    s: f64,
    grid: &QuadratureGrid,
    radial: &RadialGrid,
) -> Result<Vec<f64>> {
    check_kqs(k, q, s)?;
    check_alpha(alpha)?;
    let g = radial_power(f, k as f64);
    let lattice = value_lattice(&g, grid, radial);
    (0..grid.len())
        .into_par_iter()
        .map(|i| area_from_lattice(&lattice, grid.node(i), alpha, k, q, s, grid, radial))
        .collect()
}

/// The alpha-admissible maximal function: sup of |f| over the discrete cone.
pub fn admissible_max(
    f: &HoloFunction,
    center: &SpherePoint,
    alpha: f64,
    grid: &QuadratureGrid,
    radial: &RadialGrid,
) -> Result<f64> {
    check_alpha(alpha)?;
    let lattice = value_lattice(f, grid, radial);
    max_from_lattice(&lattice, center, alpha, grid, radial)
}

fn max_from_lattice(
    lattice: &[Vec<Complex64>],
    center: &SpherePoint,
    alpha: f64,
    grid: &QuadratureGrid,
    radial: &RadialGrid,
) -> Result<f64> {
    let (value, count) = cone_fold(center, alpha, grid, radial, 0.0, f64::max, |j, m, _| {
        lattice[j][m].norm()
    });
    if count == 0 {
        return Err(PotlabError::ResolutionTooCoarse(format!(
            "resolution too coarse for alpha = {alpha}"
        )));
    }
    Ok(value)
}

/// Admissible maximal function at every node.
pub fn admissible_max_all_nodes(
    f: &HoloFunction,
    alpha: f64,
    grid: &QuadratureGrid,
    radial: &RadialGrid,
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let lattice = value_lattice(f, grid, radial);
    (0..grid.len())
        .into_par_iter()
        .map(|i| max_from_lattice(&lattice, grid.node(i), alpha, grid, radial))
        .collect()
}

/// Which pointwise functional the mixed norm integrates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TlVariant {
    /// Radial Littlewood-Paley functional.
    Radial,
    /// Admissible area function with the given aperture.
    Area { alpha: f64 },
}

/// Mixed Triebel-Lizorkin norm: the L^p(w) norm over the sphere of the
/// chosen pointwise functional, at derivative order k = [s]^+.
#[allow(clippy::too_many_arguments)]
pub fn tl_norm(
    f: &HoloFunction,
    p: f64,
    q: f64,
    s: f64,
    w: &WeightField,
    grid: &QuadratureGrid,
    radial: &RadialGrid,
    variant: TlVariant,
) -> Result<f64> {
    if !(p > 1.0) {
        return Err(PotlabError::InvalidParameter(format!(
            "mixed norms need p > 1, got {p}"
        )));
    }
    let k = int_part_plus_one(s);
    let pointwise = match variant {
        TlVariant::Radial => littlewood_paley_all_nodes(f, k, q, s, grid, radial)?,
        TlVariant::Area { alpha } => area_fn_all_nodes(f, alpha, k, q, s, grid, radial)?,
    };
    Ok(lp_norm(&pointwise, w, grid, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn setup() -> (QuadratureGrid, RadialGrid, WeightField) {
        let grid = QuadratureGrid::build(1, 128).unwrap();
        let radial = RadialGrid::default_norms();
        let w = WeightField::constant(&grid, 1.0).unwrap();
        (grid, radial, w)
    }

    #[test]
    fn hs_norm_of_constant() {
        let (grid, radial, w) = setup();
        let f = HoloFunction::constant(1, c(3.0, 0.0));
        let got = hs_norm(&f, 2.0, 0.0, &w, &grid, &radial);
        // |c| W(S^n)^{1/p} with W(S^n) = 1
        assert!((got - 3.0).abs() < 1e-12);
    }

    #[test]
    fn hs_norm_monomial_diagonal_scaling() {
        let (grid, radial, w) = setup();
        let f = HoloFunction::monomial(1, vec![4], c(1.0, 0.0)).unwrap();
        let base = hs_norm(&f, 2.0, 0.0, &w, &grid, &radial);
        let shifted = hs_norm(&f, 2.0, 0.7, &w, &grid, &radial);
        assert!((shifted / base - 5f64.powf(0.7)).abs() < 1e-10);
    }

    #[test]
    fn hs_norm_homogeneity() {
        let (grid, radial, w) = setup();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
        let f = HoloFunction::random(1, 6, &mut rng);
        let a = hs_norm(&f, 2.5, 0.3, &w, &grid, &radial);
        let b = hs_norm(&f.scale(c(4.0, 0.0)), 2.5, 0.3, &w, &grid, &radial);
        assert!((b / a - 4.0).abs() < 1e-10);
    }

    #[test]
    fn littlewood_paley_constant_oracle() {
        // For f = 1 and k = 1 the radial integrand is (1-r^2)^{(1-s)q-1};
        // int_0^1 (1-r^2)^beta dr = B(1/2, beta+1)/2 by substitution.
        let radial = RadialGrid::geometric(600, 36.0).unwrap();
        let zeta = SpherePoint::new(vec![c(1.0, 0.0)]).unwrap();
        let f = HoloFunction::constant(1, c(1.0, 0.0));
        for (q, s) in [(2.0, 0.5), (2.0, 0.25), (1.0, 0.5)] {
            let beta = (1.0 - s) * q - 1.0;
            let oracle =
                (0.5 * gamma(0.5) * gamma(beta + 1.0) / gamma(beta + 1.5)).powf(1.0 / q);
            let got = littlewood_paley(&f, &zeta, 1, q, s, &radial).unwrap();
            assert!(
                (got - oracle).abs() / oracle < 5e-3,
                "q={q}, s={s}: {got} vs {oracle}"
            );
        }
    }

    #[test]
    fn littlewood_paley_sup_variant() {
        // q = inf, f = 1, k = 1, s = 0.5: sup_r (1-r^2)^{1/2} = 1 at r -> 0
        let (_, radial, _) = setup();
        let zeta = SpherePoint::new(vec![c(1.0, 0.0)]).unwrap();
        let f = HoloFunction::constant(1, c(1.0, 0.0));
        let got = littlewood_paley(&f, &zeta, 1, f64::INFINITY, 0.5, &radial).unwrap();
        // the first radial node sits at 1 - 2^{-1/12}
        let r0 = radial.radii()[0];
        assert!((got - (1.0 - r0 * r0).sqrt()).abs() < 1e-12);
        // zero function gives zero
        let z = HoloFunction::zero(1);
        assert_eq!(
            littlewood_paley(&z, &zeta, 1, 2.0, 0.5, &radial).unwrap(),
            0.0
        );
    }

    #[test]
    fn rejects_k_not_above_s() {
        let (_, radial, _) = setup();
        let zeta = SpherePoint::new(vec![c(1.0, 0.0)]).unwrap();
        let f = HoloFunction::constant(1, c(1.0, 0.0));
        assert!(littlewood_paley(&f, &zeta, 1, 2.0, 1.0, &radial).is_err());
        assert!(littlewood_paley(&f, &zeta, 1, 2.0, 1.5, &radial).is_err());
    }

    #[test]
    fn area_fn_finite_and_homogeneous() {
        let (grid, radial, _) = setup();
        let zeta = grid.node(0).clone();
        let f = HoloFunction::constant(1, c(1.0, 0.0));
        let a = area_fn(&f, &zeta, 2.0, 1, 2.0, 0.5, &grid, &radial).unwrap();
        assert!(a.is_finite() && a > 0.0);
        let a3 = area_fn(&f.scale(c(0.0, 3.0)), &zeta, 2.0, 1, 2.0, 0.5, &grid, &radial).unwrap();
        assert!((a3 / a - 3.0).abs() < 1e-10);
        let z = HoloFunction::zero(1);
        assert_eq!(
            area_fn(&z, &zeta, 2.0, 1, 2.0, 0.5, &grid, &radial).unwrap(),
            0.0
        );
    }

    #[test]
    fn area_fn_refinement_oracle() {
        // f = 1, n = 1, k = 1, q = 2, s = 0.5, alpha = 2: the discrete cone
        // quadrature at 4x spherical resolution agrees within 5%.
        let radial = RadialGrid::default_norms();
        let f = HoloFunction::constant(1, c(1.0, 0.0));
        let mut vals = Vec::new();
        for res in [128usize, 512] {
            let grid = QuadratureGrid::build(1, res).unwrap();
            let zeta = grid.node(0).clone();
            vals.push(area_fn(&f, &zeta, 2.0, 1, 2.0, 0.5, &grid, &radial).unwrap());
        }
        assert!(
            (vals[0] - vals[1]).abs() / vals[1] < 0.05,
            "{vals:?}"
        );
    }

    #[test]
    fn admissible_max_examples() {
        let (grid, radial, _) = setup();
        let zeta = grid.node(7).clone();
        let f = HoloFunction::constant(1, c(0.0, -2.5));
        let got = admissible_max(&f, &zeta, 2.0, &grid, &radial).unwrap();
        assert!((got - 2.5).abs() < 1e-12);
        // f = z along its own axis: modulus is maximal at the largest radius
        let f = HoloFunction::monomial(1, vec![1], c(1.0, 0.0)).unwrap();
        let got = admissible_max(&f, &zeta, 2.0, &grid, &radial).unwrap();
        assert!(got > 0.999 && got <= 1.0, "got {got}");
    }

    #[test]
    fn tl_norm_interpolation_inequality_is_exact() {
        // || . ||_{q1} <= || . ||_{q0}^{q0/q1} || . ||_{inf}^{1-q0/q1}
        // holds with constant 1 in the shared discretization.
        let (grid, radial, w) = setup();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
        for _ in 0..5 {
            let f = HoloFunction::random(1, 8, &mut rng);
            let s = 0.4;
            let (q0, q1) = (1.5, 4.0);
            let n0 = tl_norm(&f, 2.0, q0, s, &w, &grid, &radial, TlVariant::Radial).unwrap();
            let n1 = tl_norm(&f, 2.0, q1, s, &w, &grid, &radial, TlVariant::Radial).unwrap();
            let ninf =
                tl_norm(&f, 2.0, f64::INFINITY, s, &w, &grid, &radial, TlVariant::Radial)
                    .unwrap();
            let bound = n0.powf(q0 / q1) * ninf.powf(1.0 - q0 / q1);
            assert!(
                n1 <= bound * (1.0 + 1e-12),
                "interpolation violated: {n1} > {bound}"
            );
        }
    }

    #[test]
    fn tl_norm_zero_function() {
        let (grid, radial, w) = setup();
        let z = HoloFunction::zero(1);
        assert_eq!(
            tl_norm(&z, 2.0, 2.0, 0.5, &w, &grid, &radial, TlVariant::Radial).unwrap(),
            0.0
        );
    }
}
