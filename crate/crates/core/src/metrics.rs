//! PSNR, SSIM and embedding rate, generic over the floating-point type.

use std::fmt;

use num_traits::{Float, FromPrimitive};

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Floating-point scalar used by the metrics: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}
impl Scalar for f32 {}
impl Scalar for f64 {}

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;
const PEAK: f64 = 255.0;

#[inline]
fn lit<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("finite literal")
}

fn check_shapes(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if !a.same_shape(b) {
        return Err(Error::SizeMismatch(a.rows(), a.cols(), b.rows(), b.cols()));
    }
    Ok(())
}

pub fn mse<T: Scalar>(a: &GrayImage, b: &GrayImage) -> Result<T> {
    check_shapes(a, b)?;
    // exact integer accumulation; u64 holds 255^2 * 2^40 pixels
    let sum: u64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    Ok(T::from_u64(sum).expect("finite") / T::from_usize(a.len()).expect("finite"))
}

/// Peak signal-to-noise ratio in dB; `+inf` for identical images.
pub fn psnr<T: Scalar>(a: &GrayImage, b: &GrayImage) -> Result<T> {
    let err: T = mse(a, b)?;
    if err == T::zero() {
        return Ok(T::infinity());
    }
    Ok(lit::<T>(10.0) * (lit::<T>(PEAK * PEAK) / err).log10())
}

fn gaussian_kernel<T: Scalar>() -> [T; SSIM_WINDOW] {
    let half = (SSIM_WINDOW / 2) as f64;
    let mut w = [0.0f64; SSIM_WINDOW];
    for (k, v) in w.iter_mut().enumerate() {
        let d = k as f64 - half;
        *v = (-(d * d) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let total: f64 = w.iter().sum();
    w.map(|v| lit(v / total))
}

/// Valid-mode separable filtering of `src` (rows x cols) with `kernel`.
fn filter_valid<T: Scalar>(
    src: &[T],
    rows: usize,
    cols: usize,
    kernel: &[T; SSIM_WINDOW],
) -> Vec<T> {
    let out_cols = cols - SSIM_WINDOW + 1;
    let out_rows = rows - SSIM_WINDOW + 1;
    let mut horiz = vec![T::zero(); rows * out_cols];
    for i in 0..rows {
        let row = &src[i * cols..(i + 1) * cols];
        for j in 0..out_cols {
            horiz[i * out_cols + j] = kernel
                .iter()
                .zip(&row[j..j + SSIM_WINDOW])
                .fold(T::zero(), |acc, (&w, &v)| acc + w * v);
        }
    }
    let mut out = vec![T::zero(); out_rows * out_cols];
    for i in 0..out_rows {
        for j in 0..out_cols {
            out[i * out_cols + j] = kernel.iter().enumerate().fold(T::zero(), |acc, (k, &w)| {
                acc + w * horiz[(i + k) * out_cols + j]
            });
        }
    }
    out
}

/// Single-scale SSIM with an 11x11 Gaussian window (sigma 1.5), averaged over all
/// fully contained window positions.
pub fn ssim<T: Scalar>(a: &GrayImage, b: &GrayImage) -> Result<T> {
    check_shapes(a, b)?;
    let (m, n) = (a.rows(), a.cols());
    if m < SSIM_WINDOW || n < SSIM_WINDOW {
        return Err(Error::WindowTooLarge(SSIM_WINDOW));
    }
    let kernel = gaussian_kernel::<T>();
    let fa: Vec<T> = a
        .pixels()
        .iter()
        .map(|&v| T::from_u8(v).expect("u8"))
        .collect();
    let fb: Vec<T> = b
        .pixels()
        .iter()
        .map(|&v| T::from_u8(v).expect("u8"))
        .collect();
    let sq = |v: &[T]| v.iter().map(|&x| x * x).collect::<Vec<T>>();
    let cross: Vec<T> = fa.iter().zip(&fb).map(|(&x, &y)| x * y).collect();

    let mu_a = filter_valid(&fa, m, n, &kernel);
    let mu_b = filter_valid(&fb, m, n, &kernel);
    let e_aa = filter_valid(&sq(&fa), m, n, &kernel);
    let e_bb = filter_valid(&sq(&fb), m, n, &kernel);
    let e_ab = filter_valid(&cross, m, n, &kernel);

    let c1 = lit::<T>((K1 * PEAK) * (K1 * PEAK));
    let c2 = lit::<T>((K2 * PEAK) * (K2 * PEAK));
    let two = lit::<T>(2.0);
    let mut total = T::zero();
    for k in 0..mu_a.len() {
        let (ma, mb) = (mu_a[k], mu_b[k]);
        let var_a = e_aa[k] - ma * ma;
        let var_b = e_bb[k] - mb * mb;
        let cov = e_ab[k] - ma * mb;
        let num = (two * ma * mb + c1) * (two * cov + c2);
        let den = (ma * ma + mb * mb + c1) * (var_a + var_b + c2);
        total = total + num / den;
    }
    Ok(total / T::from_usize(mu_a.len()).expect("finite"))
}

/// Payload bits per pixel over the whole image.
pub fn embedding_rate<T: Scalar>(payload_bits: u64, rows: usize, cols: usize) -> T {
    assert!(rows * cols > 0, "image has no pixels");
    T::from_u64(payload_bits).expect("finite") / T::from_usize(rows * cols).expect("finite")
}

/// PSNR rendered as the literal `+inf` when infinite, otherwise with two decimals.
pub fn format_psnr<T: Scalar>(value: T) -> String {
    if value.is_infinite() && value > T::zero() {
        "+inf".to_string()
    } else {
        format!("{:.2}", value.to_f64().unwrap_or(f64::NAN))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QualityReport<T> {
    pub psnr: T,
    pub ssim: T,
    pub er: T,
}

impl<T: Scalar> QualityReport<T> {
    pub fn compare(original: &GrayImage, other: &GrayImage, payload_bits: u64) -> Result<Self> {
        Ok(Self {
            psnr: psnr(original, other)?,
            ssim: ssim(original, other)?,
            er: embedding_rate(payload_bits, original.rows(), original.cols()),
        })
    }
}

impl<T: Scalar> fmt::Display for QualityReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PSNR = {} dB, SSIM = {:.3}, ER = {:.3} bpp",
            format_psnr(self.psnr),
            self.ssim.to_f64().unwrap_or(f64::NAN),
            self.er.to_f64().unwrap_or(f64::NAN)
        )
    }
}
