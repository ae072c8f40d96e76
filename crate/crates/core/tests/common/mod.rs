#![allow(dead_code)]

use gifs_core::chaos::RngSpec;
use gifs_core::{AffineMap, GifsSystem, Matrix, Point};
use rand::Rng;
use rand_pcg::Pcg32;

pub fn rng(seed: u64) -> Pcg32 {
    RngSpec::new(seed).generator()
}

/// Affine system with matrix entries uniform in `[-s, s]` and translations in `[-1, 1]`.
pub fn random_system(rng: &mut Pcg32, n: usize, m: usize, d: usize, s: f64) -> GifsSystem {
    let maps = (0..n)
        .map(|_| {
            let mats = (0..m)
                .map(|_| {
                    let v: Vec<f64> = (0..d * d).map(|_| rng.random_range(-s..=s)).collect();
                    Matrix::from_row_major(d, &v).unwrap()
                })
                .collect();
            let b = (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect();
            AffineMap::new(mats, b).unwrap()
        })
        .collect();
    GifsSystem::affine(maps).unwrap()
}

pub fn random_point(rng: &mut Pcg32, d: usize) -> Point {
    Point::new((0..d).map(|_| rng.random_range(-2.0..=2.0)).collect()).unwrap()
}

fn m2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
    Matrix::from_rows(&[vec![a, b], vec![c, d]]).unwrap()
}

pub fn f_pair() -> GifsSystem {
    GifsSystem::affine(vec![
        AffineMap::new(vec![m2(0.1, 0.0, 0.0, 0.16), m2(0.15, 0.04, -0.04, 0.15)], vec![0.0, 1.6]).unwrap(),
        AffineMap::new(vec![m2(0.1, -0.15, 0.15, 0.15), m2(-0.1, 0.15, 0.15, 0.0)], vec![1.6, 0.07]).unwrap(),
    ])
    .unwrap()
}

pub fn h_triple() -> GifsSystem {
    let q = Matrix::diagonal(&[0.25, 0.25]);
    GifsSystem::affine(vec![
        AffineMap::new(vec![q.clone(), m2(0.0, 0.2, 0.0, 0.2)], vec![0.0, 0.0]).unwrap(),
        AffineMap::new(vec![q.clone(), m2(0.2, 0.0, 0.0, 0.1)], vec![0.0, 0.5]).unwrap(),
        AffineMap::new(vec![q, m2(0.1, 0.0, 0.0, 0.2)], vec![0.5, 0.0]).unwrap(),
    ])
    .unwrap()
}

/// Classical order-1 gasket: three maps of ratio 1/2.
pub fn gasket() -> GifsSystem {
    let h = Matrix::diagonal(&[0.5, 0.5]);
    GifsSystem::affine(vec![
        AffineMap::new(vec![h.clone()], vec![0.0, 0.0]).unwrap(),
        AffineMap::new(vec![h.clone()], vec![0.5, 0.0]).unwrap(),
        AffineMap::new(vec![h], vec![0.25, 0.5]).unwrap(),
    ])
    .unwrap()
}
