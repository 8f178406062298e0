//! Synthetic labeled images for desk-scale tests.
//!
//! Each class gets a distinct base color; per-image noise keeps the task
//! non-trivial while leaving the classes linearly separable from channel
//! statistics.

use image::RgbImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Base colors per class, chosen to be well separated in RGB space.
const CLASS_COLORS: [[u8; 3]; 4] = [
    [40, 190, 80],
    [150, 170, 60],
    [180, 110, 90],
    [120, 70, 150],
];

/// Renders one synthetic image for the given class.
pub fn synthetic_image(label: usize, seed: u64, size: u32) -> RgbImage {
    let base = CLASS_COLORS[label % 4];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (label as u64).wrapping_mul(0x9e37_79b9));
    let mut img = RgbImage::new(size, size);
    for y in 0..size {
        let row_noise: i16 = rng.random_range(-25..=25);
        for x in 0..size {
            let px_noise: i16 = ((x.wrapping_mul(40503) >> 12) % 17) as i16 - 8;
            let mut p = [0u8; 3];
            for c in 0..3 {
                p[c] = (i16::from(base[c]) + row_noise + px_noise).clamp(0, 255) as u8;
            }
            img.put_pixel(x, y, image::Rgb(p));
        }
    }
    img
}

/// A balanced labeled set: `per_class` images for each of the four classes.
pub fn synthetic_image_set(per_class: usize, seed: u64, size: u32) -> Vec<(RgbImage, usize)> {
    let mut out = Vec::with_capacity(per_class * 4);
    for label in 0..4 {
        for i in 0..per_class {
            out.push((synthetic_image(label, seed.wrapping_add(i as u64 * 4 + 1), size), label));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_have_distinct_color_statistics() {
        let mean_rgb = |img: &RgbImage| {
            let mut acc = [0.0f64; 3];
            for p in img.pixels() {
                for c in 0..3 {
                    acc[c] += f64::from(p[c]);
                }
            }
            let n = f64::from(img.width() * img.height());
            acc.map(|v| v / n)
        };
        let means: Vec<[f64; 3]> = (0..4).map(|l| mean_rgb(&synthetic_image(l, 3, 64))).collect();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let dist: f64 = (0..3).map(|c| (means[i][c] - means[j][c]).powi(2)).sum::<f64>().sqrt();
                assert!(dist > 40.0, "classes {i} and {j} too close: {dist}");
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = synthetic_image(2, 9, 32);
        let b = synthetic_image(2, 9, 32);
        assert_eq!(a.as_raw(), b.as_raw());
    }

    #[test]
    fn set_is_balanced() {
        let set = synthetic_image_set(8, 1, 32);
        assert_eq!(set.len(), 32);
        for label in 0..4 {
            assert_eq!(set.iter().filter(|(_, l)| *l == label).count(), 8);
        }
    }
}
