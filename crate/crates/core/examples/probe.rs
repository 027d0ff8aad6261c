//! Scratch numerics probe used while calibrating test tolerances.

use num_complex::Complex64;
use potlab::sphere::{QuadratureGrid, SpherePoint};
use potlab::weights::{ball_average, doubling_order, weighted_mass, BallFamily, WeightField};

fn main() {
    let pole = SpherePoint::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
    println!("== power(0.5) cap masses, center = (0,1) ==");
    for r in [0.1, 0.2, 0.4] {
        for res in [16usize, 32, 48, 64, 96, 128, 192] {
            let grid = QuadratureGrid::build(2, res).unwrap();
            let w = WeightField::power(&grid, 0.5).unwrap();
            let ball = grid.ball(&pole, r);
            let m = weighted_mass(&w, &ball, &grid);
            print!("r={r} res={res}: {m:.6e}  ");
        }
        println!();
    }

    println!("== ball averages for the same cap ==");
    for r in [0.1, 0.2, 0.4] {
        for res in [32usize, 128] {
            let grid = QuadratureGrid::build(2, res).unwrap();
            let w = WeightField::power(&grid, 0.5).unwrap();
            let ball = grid.ball(&pole, r);
            let m = ball_average(&w, &ball, &grid).unwrap();
            print!("r={r} res={res}: {m:.6e}  ");
        }
        println!();
    }

    println!("== doubling fits on singular-circle family ==");
    let mk_family = |base: f64| {
        let mut balls = Vec::new();
        for m in 0..8u32 {
            let phi = 2.0 * std::f64::consts::PI * m as f64 / 8.0;
            let center = SpherePoint::new(vec![
                Complex64::from_polar(1.0, phi),
                Complex64::new(0.0, 0.0),
            ])
            .unwrap();
            balls.push((center, base));
        }
        BallFamily::new(balls).unwrap()
    };
    for res in [48usize, 64, 96] {
        let grid = QuadratureGrid::build(2, res).unwrap();
        for base in [0.0625, 0.125, 0.25] {
            let family = mk_family(base);
            for eps in [-0.5f64, 0.0, 0.5] {
                let w = WeightField::power(&grid, eps).unwrap();
                let fit = doubling_order(&w, &grid, &family).unwrap();
                print!("res={res} r0={base} eps={eps}: tau={:.3}  ", fit.tau_hat);
            }
            println!();
        }
    }

    println!("== circle doubling, w = 1 ==");
    for res in [512usize, 1024] {
        let grid = QuadratureGrid::build(1, res).unwrap();
        let one = WeightField::constant(&grid, 1.0).unwrap();
        for k in [4u32, 5, 6] {
            let family = BallFamily::coarse_dyadic(1, 16, k..=k).unwrap();
            let fit = doubling_order(&one, &grid, &family).unwrap();
            print!("res={res} k={k}: tau={:.3}  ", fit.tau_hat);
        }
        println!();
    }
}
