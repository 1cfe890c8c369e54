//! Binary masks and depth buffers shared by detection, mapping, and the
//! simulator. Masks are word-packed so intersection/union counts reduce to
//! popcounts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("mask dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("run-length data does not fit {0}x{1}")]
    BadRunLength(usize, usize),
}

/// Binary H x W bitmap backed by u64 words, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    words: Vec<u64>,
}

impl Mask {
    pub fn new(width: usize, height: usize) -> Self {
        let n = width * height;
        Mask { width, height, words: vec![0; n.div_ceil(64)] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize) {
        debug_assert!(x < self.width && y < self.height);
        let i = y * self.width + x;
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        let i = y * self.width + x;
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersection_count(&self, other: &Mask) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Fill a disc of radius `r` centered at `(cx, cy)`, clipped to bounds.
    /// Center coordinates may lie outside the image.
    pub fn fill_disc(&mut self, cx: i64, cy: i64, r: i64) {
        let r = r.max(0);
        let y0 = (cy - r).max(0);
        let y1 = (cy + r).min(self.height as i64 - 1);
        for y in y0..=y1 {
            let dy = y - cy;
            let half = ((r * r - dy * dy) as f64).sqrt().floor() as i64;
            let x0 = (cx - half).max(0);
            let x1 = (cx + half).min(self.width as i64 - 1);
            for x in x0..=x1 {
                self.set(x as usize, y as usize);
            }
        }
    }

    pub fn iter_set(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        (0..self.height)
            .flat_map(move |y| (0..w).map(move |x| (x, y)))
            .filter(|&(x, y)| self.get(x, y))
    }

    /// Run-length encode as alternating zero/one run lengths, starting with
    /// a zero run (possibly 0), scanning row-major.
    pub fn to_rle(&self) -> Vec<u32> {
        let mut runs = Vec::new();
        let mut current = false;
        let mut len: u32 = 0;
        for y in 0..self.height {
            for x in 0..self.width {
                let bit = self.get(x, y);
                if bit == current {
                    len += 1;
                } else {
                    runs.push(len);
                    current = bit;
                    len = 1;
                }
            }
        }
        runs.push(len);
        runs
    }

    pub fn from_rle(width: usize, height: usize, runs: &[u32]) -> Result<Self, RasterError> {
        let total: u64 = runs.iter().map(|&r| r as u64).sum();
        if total != (width * height) as u64 {
            return Err(RasterError::BadRunLength(width, height));
        }
        let mut m = Mask::new(width, height);
        let mut idx = 0usize;
        let mut value = false;
        for &run in runs {
            if value {
                for i in idx..idx + run as usize {
                    m.words[i / 64] |= 1u64 << (i % 64);
                }
            }
            idx += run as usize;
            value = !value;
        }
        Ok(m)
    }
}

/// Intersection over union of two same-sized masks; 0 when the union is
/// empty.
pub fn mask_iou(a: &Mask, b: &Mask) -> Result<f64, RasterError> {
    if a.width != b.width || a.height != b.height {
        return Err(RasterError::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    let inter = a.intersection_count(b);
    let union = a.count() + b.count() - inter;
    if union == 0 {
        Ok(0.0)
    } else {
        Ok(inter as f64 / union as f64)
    }
}

/// Dense depth image in meters; entries <= 0 are invalid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DepthMap {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f32>,
}

impl DepthMap {
    pub fn new(width: usize, height: usize) -> Self {
        DepthMap { width, height, data: vec![0.0; width * height] }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Option<f32> {
        let d = self.data[y * self.width + x];
        if d > 0.0 {
            Some(d)
        } else {
            None
        }
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, depth: f32) {
        self.data[y * self.width + x] = depth;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn block(w: usize, h: usize, x0: usize, y0: usize, x1: usize, y1: usize) -> Mask {
        let mut m = Mask::new(w, h);
        for y in y0..y1 {
            for x in x0..x1 {
                m.set(x, y);
            }
        }
        m
    }

    #[test]
    fn identical_masks_have_iou_one() {
        let m = block(8, 8, 1, 1, 4, 4);
        assert_eq!(mask_iou(&m, &m).unwrap(), 1.0);
    }

    #[test]
    fn disjoint_masks_have_iou_zero() {
        let a = block(8, 8, 0, 0, 2, 2);
        let b = block(8, 8, 4, 4, 6, 6);
        assert_eq!(mask_iou(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn one_pixel_overlap_of_two_2x2_blocks() {
        // union 7 pixels, intersection 1
        let a = block(8, 8, 0, 0, 2, 2);
        let b = block(8, 8, 1, 1, 3, 3);
        assert_eq!(mask_iou(&a, &b).unwrap(), 1.0 / 7.0);
    }

    #[test]
    fn empty_union_is_zero() {
        let a = Mask::new(4, 4);
        assert_eq!(mask_iou(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = Mask::new(4, 4);
        let b = Mask::new(5, 4);
        assert!(mask_iou(&a, &b).is_err());
    }

    #[test]
    fn disc_is_clipped_to_bounds() {
        let mut m = Mask::new(10, 10);
        m.fill_disc(0, 0, 3);
        assert!(m.get(0, 0));
        assert!(m.count() > 0);
        m.fill_disc(-20, -20, 3); // fully outside, no panic
    }

    #[test]
    fn rle_known_pattern() {
        let m = block(4, 1, 1, 0, 3, 1);
        assert_eq!(m.to_rle(), vec![1, 2, 1]);
        let back = Mask::from_rle(4, 1, &[1, 2, 1]).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn bad_rle_is_rejected() {
        assert!(Mask::from_rle(4, 4, &[3]).is_err());
    }

    proptest! {
        #[test]
        fn rle_round_trip(seed in 0u64..200) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let w = rng.gen_range(1..40);
            let h = rng.gen_range(1..40);
            let mut m = Mask::new(w, h);
            for _ in 0..rng.gen_range(0..200) {
                m.set(rng.gen_range(0..w), rng.gen_range(0..h));
            }
            let back = Mask::from_rle(w, h, &m.to_rle()).unwrap();
            prop_assert_eq!(back, m);
        }

        #[test]
        fn iou_is_symmetric_and_bounded(seed in 0u64..200) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let w = 16;
            let h = 16;
            let mut a = Mask::new(w, h);
            let mut b = Mask::new(w, h);
            for _ in 0..60 {
                a.set(rng.gen_range(0..w), rng.gen_range(0..h));
                b.set(rng.gen_range(0..w), rng.gen_range(0..h));
            }
            let ab = mask_iou(&a, &b).unwrap();
            let ba = mask_iou(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=1.0).contains(&ab));
        }
    }
}
