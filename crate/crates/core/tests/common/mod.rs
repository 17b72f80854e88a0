#![allow(dead_code)]

use msbhide::{Bits, GrayImage, KeySpec};
use rand::Rng;

pub fn uniform_image<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> GrayImage {
    let v = rng.gen();
    GrayImage::filled(rows, cols, v).unwrap()
}

/// Planar gradient; `noise` adds up to that many grey levels of jitter.
pub fn gradient_image<R: Rng>(rng: &mut R, rows: usize, cols: usize, noise: u8) -> GrayImage {
    let base = rng.gen_range(20.0..200.0f64);
    let di = rng.gen_range(-1.5..1.5f64) * 32.0 / rows as f64;
    let dj = rng.gen_range(-1.5..1.5f64) * 32.0 / cols as f64;
    GrayImage::from_fn(rows, cols, |i, j| {
        let v = base + di * i as f64 + dj * j as f64;
        let jitter = if noise == 0 {
            0
        } else {
            rng.gen_range(0..=noise)
        };
        (v.clamp(0.0, 240.0) as u8).saturating_add(jitter)
    })
    .unwrap()
}

/// Low-frequency sinusoidal surface plus mild noise.
pub fn smooth_image<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> GrayImage {
    let (fa, fb) = (rng.gen_range(0.5..2.0f64), rng.gen_range(0.5..2.0f64));
    let (pa, pb) = (
        rng.gen_range(0.0..std::f64::consts::TAU),
        rng.gen_range(0.0..std::f64::consts::TAU),
    );
    let base = rng.gen_range(80.0..170.0f64);
    GrayImage::from_fn(rows, cols, |i, j| {
        let u = i as f64 / rows as f64 * std::f64::consts::TAU;
        let v = j as f64 / cols as f64 * std::f64::consts::TAU;
        let s = base + 40.0 * (fa * u + pa).sin() + 30.0 * (fb * v + pb).cos();
        (s + rng.gen_range(-1.0..1.0)).round().clamp(0.0, 255.0) as u8
    })
    .unwrap()
}

/// High-variance noise around mid grey.
pub fn rough_image<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> GrayImage {
    GrayImage::from_fn(rows, cols, |_, _| rng.gen()).unwrap()
}

pub fn random_key<R: Rng>(rng: &mut R) -> KeySpec {
    let len = rng.gen_range(1..=16);
    let hex: String = (0..len)
        .map(|_| format!("{:02x}", rng.gen::<u8>()))
        .collect();
    KeySpec::from_hex(&hex).unwrap()
}

pub fn random_bits<R: Rng>(rng: &mut R, len: usize) -> Bits {
    (0..len).map(|_| rng.gen::<bool>()).collect()
}

pub fn fixture(name: &str) -> GrayImage {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    msbhide::read_pgm(&std::fs::read(path).unwrap()).unwrap()
}
