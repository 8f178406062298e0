//! Image preprocessing.
//!
//! Training: uniform-random 224x224 crop from the 512x512 source, scale to
//! [0, 1], then per-channel standardization. Evaluation: bilinear resize of
//! the full image to 224x224 followed by the same standardization.

use image::RgbImage;
use ndarray::{Array3, Axis};
use rand::Rng;

use crate::{DatasetError, Result};

pub const CROP_SIZE: usize = 224;
pub const SOURCE_SIZE: usize = 512;
/// 512 - 224: the largest valid crop offset on each axis.
pub const MAX_CROP_OFFSET: usize = SOURCE_SIZE - CROP_SIZE;

/// Per-channel standardization parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationSpec {
    pub mean: [f32; 3],
    pub std: [f32; 3],
}

impl NormalizationSpec {
    /// The ImageNet channel statistics used by the pretrained backbones.
    pub const IMAGENET: NormalizationSpec = NormalizationSpec {
        mean: [0.485, 0.456, 0.406],
        std: [0.229, 0.224, 0.225],
    };

    pub fn validate(&self) -> Result<()> {
        if self.std.iter().any(|&s| s <= 0.0) {
            return Err(DatasetError::Validation("std components must be positive".into()));
        }
        Ok(())
    }
}

impl Default for NormalizationSpec {
    fn default() -> Self {
        Self::IMAGENET
    }
}

/// Converts an RGB image to a CHW float array scaled to [0, 1].
pub fn to_unit_array(img: &RgbImage) -> Array3<f32> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut out = Array3::zeros((3, h, w));
    for (x, y, pixel) in img.enumerate_pixels() {
        for c in 0..3 {
            out[[c, y as usize, x as usize]] = f32::from(pixel[c]) / 255.0;
        }
    }
    out
}

/// `(x - mean) / std` per channel on a [0, 1]-scaled CHW array.
pub fn normalize(mut unit: Array3<f32>, spec: &NormalizationSpec) -> Array3<f32> {
    for (c, mut channel) in unit.axis_iter_mut(Axis(0)).enumerate() {
        channel.mapv_inplace(|v| (v - spec.mean[c]) / spec.std[c]);
    }
    unit
}

/// Inverse of [`normalize`].
pub fn denormalize(mut normalized: Array3<f32>, spec: &NormalizationSpec) -> Array3<f32> {
    for (c, mut channel) in normalized.axis_iter_mut(Axis(0)).enumerate() {
        channel.mapv_inplace(|v| v * spec.std[c] + spec.mean[c]);
    }
    normalized
}

/// Training preprocessing with an explicit crop offset (row, column).
pub fn preprocess_train_at(
    img: &RgbImage,
    offset_y: usize,
    offset_x: usize,
    spec: &NormalizationSpec,
) -> Result<Array3<f32>> {
    spec.validate()?;
    if img.width() as usize != SOURCE_SIZE || img.height() as usize != SOURCE_SIZE {
        return Err(DatasetError::Validation(format!(
            "train input must be {SOURCE_SIZE}x{SOURCE_SIZE}, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    if offset_y > MAX_CROP_OFFSET || offset_x > MAX_CROP_OFFSET {
        return Err(DatasetError::Validation(format!(
            "crop offset ({offset_y}, {offset_x}) exceeds {MAX_CROP_OFFSET}"
        )));
    }
    let mut out = Array3::zeros((3, CROP_SIZE, CROP_SIZE));
    for y in 0..CROP_SIZE {
        for x in 0..CROP_SIZE {
            let pixel = img.get_pixel((offset_x + x) as u32, (offset_y + y) as u32);
            for c in 0..3 {
                out[[c, y, x]] = f32::from(pixel[c]) / 255.0;
            }
        }
    }
    Ok(normalize(out, spec))
}

/// Training preprocessing with a uniform-random crop position.
pub fn preprocess_train<R: Rng>(
    img: &RgbImage,
    rng: &mut R,
    spec: &NormalizationSpec,
) -> Result<Array3<f32>> {
    let offset_y = rng.random_range(0..=MAX_CROP_OFFSET);
    let offset_x = rng.random_range(0..=MAX_CROP_OFFSET);
    preprocess_train_at(img, offset_y, offset_x, spec)
}

/// Bilinear resize of a [0, 1] CHW array to the given square side.
/// Sampling positions align with pixel centers, so a same-size resize is the
/// identity and constant images stay constant.
pub fn bilinear_resize(input: &Array3<f32>, side: usize) -> Array3<f32> {
    let (channels, in_h, in_w) = input.dim();
    let mut out = Array3::zeros((channels, side, side));
    let scale_y = in_h as f32 / side as f32;
    let scale_x = in_w as f32 / side as f32;
    for y in 0..side {
        let sy = ((y as f32 + 0.5) * scale_y - 0.5).clamp(0.0, (in_h - 1) as f32);
        let y0 = sy.floor() as usize;
        let y1 = (y0 + 1).min(in_h - 1);
        let wy = sy - y0 as f32;
        for x in 0..side {
            let sx = ((x as f32 + 0.5) * scale_x - 0.5).clamp(0.0, (in_w - 1) as f32);
            let x0 = sx.floor() as usize;
            let x1 = (x0 + 1).min(in_w - 1);
            let wx = sx - x0 as f32;
            for c in 0..channels {
                let top = input[[c, y0, x0]] * (1.0 - wx) + input[[c, y0, x1]] * wx;
                let bottom = input[[c, y1, x0]] * (1.0 - wx) + input[[c, y1, x1]] * wx;
                out[[c, y, x]] = top * (1.0 - wy) + bottom * wy;
            }
        }
    }
    out
}

/// Evaluation preprocessing: full-image bilinear resize then normalization.
/// Accepts any size; the channel count is fixed at 3 by the input type.
pub fn preprocess_eval(img: &RgbImage, spec: &NormalizationSpec) -> Result<Array3<f32>> {
    spec.validate()?;
    if img.width() == 0 || img.height() == 0 {
        return Err(DatasetError::Validation("empty image".into()));
    }
    let unit = to_unit_array(img);
    let resized = if img.width() as usize == CROP_SIZE && img.height() as usize == CROP_SIZE {
        unit
    } else {
        bilinear_resize(&unit, CROP_SIZE)
    };
    Ok(normalize(resized, spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn constant_image(size: u32, rgb: [u8; 3]) -> RgbImage {
        RgbImage::from_pixel(size, size, image::Rgb(rgb))
    }

    #[test]
    fn normalizing_the_channel_mean_gives_zero() {
        let spec = NormalizationSpec::IMAGENET;
        let mut unit = Array3::zeros((3, 8, 8));
        for c in 0..3 {
            unit.index_axis_mut(Axis(0), c).fill(spec.mean[c]);
        }
        let out = normalize(unit, &spec);
        assert!(out.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn all_white_normalizes_to_reference_values() {
        // (1 - mean) / std per channel, computed independently:
        // 0.515/0.229, 0.544/0.224, 0.594/0.225.
        let expected = [2.2489f32, 2.4286, 2.6400];
        let spec = NormalizationSpec::IMAGENET;
        let out = normalize(Array3::ones((3, 4, 4)), &spec);
        for c in 0..3 {
            let v = out[[c, 0, 0]];
            assert!((v - expected[c]).abs() < 1e-3, "channel {c}: {v}");
        }
    }

    #[test]
    fn denormalize_inverts_normalize() {
        let spec = NormalizationSpec::IMAGENET;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let unit = Array3::from_shape_fn((3, 16, 16), |_| rng.random_range(0.0f32..1.0));
        let back = denormalize(normalize(unit.clone(), &spec), &spec);
        for (a, b) in unit.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn crop_requires_exact_source_size() {
        let img = constant_image(256, [10, 20, 30]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(preprocess_train(&img, &mut rng, &NormalizationSpec::IMAGENET).is_err());
    }

    #[test]
    fn crop_offsets_are_reproducible_and_in_range() {
        let mut a = ChaCha8Rng::seed_from_u64(77);
        let mut b = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let (ya, xa) = (a.random_range(0..=MAX_CROP_OFFSET), a.random_range(0..=MAX_CROP_OFFSET));
            let (yb, xb) = (b.random_range(0..=MAX_CROP_OFFSET), b.random_range(0..=MAX_CROP_OFFSET));
            assert_eq!((ya, xa), (yb, xb));
            assert!(ya <= 288 && xa <= 288);
        }
    }

    #[test]
    fn crop_reads_the_right_window() {
        // Mark one pixel and crop exactly onto it.
        let mut img = constant_image(512, [0, 0, 0]);
        img.put_pixel(250, 200, image::Rgb([255, 255, 255]));
        let out = preprocess_train_at(&img, 200, 250, &NormalizationSpec::IMAGENET).unwrap();
        let spec = NormalizationSpec::IMAGENET;
        let expect_white = (1.0 - spec.mean[0]) / spec.std[0];
        assert!((out[[0, 0, 0]] - expect_white).abs() < 1e-4);
        let shape = out.shape();
        assert_eq!(shape, [3, 224, 224]);
    }

    #[test]
    fn crop_coverage_hits_every_offset_bin() {
        // 10,000 seeded draws over [0, 288]: every bin of width 32 on both
        // axes must be hit, or crop randomness is degenerate.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let bins = MAX_CROP_OFFSET / 32 + 1;
        let mut hit_y = vec![false; bins];
        let mut hit_x = vec![false; bins];
        for _ in 0..10_000 {
            hit_y[rng.random_range(0..=MAX_CROP_OFFSET) / 32] = true;
            hit_x[rng.random_range(0..=MAX_CROP_OFFSET) / 32] = true;
        }
        assert!(hit_y.iter().all(|&h| h), "y bins: {hit_y:?}");
        assert!(hit_x.iter().all(|&h| h), "x bins: {hit_x:?}");
    }

    #[test]
    fn eval_resize_preserves_constant_images() {
        let img = constant_image(512, [128, 64, 32]);
        let out = preprocess_eval(&img, &NormalizationSpec::IMAGENET).unwrap();
        assert_eq!(out.shape(), [3, 224, 224]);
        for c in 0..3 {
            let channel = out.index_axis(Axis(0), c);
            let first = channel[[0, 0]];
            assert!(channel.iter().all(|v| (v - first).abs() < 1e-6));
        }
    }

    #[test]
    fn eval_resize_of_224_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut img = RgbImage::new(224, 224);
        for pixel in img.pixels_mut() {
            *pixel = image::Rgb([rng.random(), rng.random(), rng.random()]);
        }
        let direct = normalize(to_unit_array(&img), &NormalizationSpec::IMAGENET);
        let via_eval = preprocess_eval(&img, &NormalizationSpec::IMAGENET).unwrap();
        let max_diff = direct
            .iter()
            .zip(via_eval.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f32, f32::max);
        assert_eq!(max_diff, 0.0);
    }

    #[test]
    fn checkerboard_mean_is_preserved_by_resize() {
        let mut img = RgbImage::new(448, 448);
        for (x, y, pixel) in img.enumerate_pixels_mut() {
            let v = if (x + y) % 2 == 0 { 255 } else { 0 };
            *pixel = image::Rgb([v, v, v]);
        }
        let spec = NormalizationSpec::IMAGENET;
        let input_mean = to_unit_array(&img).mean().unwrap();
        let out = denormalize(preprocess_eval(&img, &spec).unwrap(), &spec);
        let output_mean = out.mean().unwrap();
        assert!(
            (input_mean - output_mean).abs() < 1e-2,
            "input {input_mean}, output {output_mean}"
        );
    }
}
