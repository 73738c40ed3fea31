//! Grad-CAM over exported tensors.
//!
//! Activations and gradients are rank-3 `(H, W, K)` tensors in row-major
//! order, so channel `k` of pixel `(i, j)` sits at `(i * W + j) * K + k`.
//! All arithmetic is done in f64 with correctly rounded sums.

use std::path::Path;

use image::{Rgb, RgbImage};
use rayon::prelude::*;
use thiserror::Error;

use crate::data::{FeatureMapTensor, TensorError};
use crate::ensemble::exact_sum;

pub const OVERLAY_BETA: f64 = 0.4;

#[derive(Debug, Error)]
pub enum GradcamError {
    #[error("expected a rank-3 (H, W, K) tensor, got dims {0:?}")]
    Rank(Vec<usize>),
    #[error("{weights} channel weights for {channels} activation channels")]
    ChannelMismatch { channels: usize, weights: usize },
    #[error("activations are {activations:?} but gradients are {gradients:?}")]
    SpatialMismatch {
        activations: Vec<usize>,
        gradients: Vec<usize>,
    },
    #[error("cannot upsample {from:?} to {to:?}")]
    Downsample { from: (usize, usize), to: (usize, usize) },
    #[error("heatmap is {heatmap:?} but image is {image:?}")]
    ImageMismatch {
        heatmap: (usize, usize),
        image: (usize, usize),
    },
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("{path}: {source}")]
    Image {
        path: String,
        source: image::ImageError,
    },
}

/// Row-major `height x width` map.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl Heatmap {
    pub fn new(height: usize, width: usize, values: Vec<f64>) -> Option<Self> {
        (height > 0 && width > 0 && values.len() == height * width).then_some(Self {
            height,
            width,
            values,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.width + j]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(H, W, 1)` tensor, narrowing to f32.
    pub fn to_tensor(&self) -> FeatureMapTensor {
        let data = self.values.iter().map(|&v| v as f32).collect();
        FeatureMapTensor::new(vec![self.height, self.width, 1], data)
            .expect("heatmap values are finite")
    }
}

fn hwk(t: &FeatureMapTensor) -> Result<(usize, usize, usize), GradcamError> {
    match *t.dims() {
        [h, w, k] => Ok((h, w, k)),
        _ => Err(GradcamError::Rank(t.dims().to_vec())),
    }
}

/// Per-channel mean of the gradients over all spatial positions.
pub fn channel_weights(grads: &FeatureMapTensor) -> Result<Vec<f64>, GradcamError> {
    let (h, w, k) = hwk(grads)?;
    let data = grads.data();
    let n = (h * w) as f64;
    Ok((0..k)
        .map(|c| exact_sum(data[c..].iter().step_by(k).map(|&g| g as f64)) / n)
        .collect())
}

/// Rectified weighted channel sum.
pub fn cam(activations: &FeatureMapTensor, weights: &[f64]) -> Result<Heatmap, GradcamError> {
    let (h, w, k) = hwk(activations)?;
    if weights.len() != k {
        return Err(GradcamError::ChannelMismatch {
            channels: k,
            weights: weights.len(),
        });
    }
    let values = activations
        .data()
        .par_chunks(k)
        .map(|px| {
            let s = exact_sum(px.iter().zip(weights).map(|(&a, &wt)| a as f64 * wt));
            s.max(0.0)
        })
        .collect();
    Ok(Heatmap {
        height: h,
        width: w,
        values,
    })
}

/// Heatmap of `activations` for the class whose gradients are `grads`.
pub fn gradcam(
    activations: &FeatureMapTensor,
    grads: &FeatureMapTensor,
) -> Result<Heatmap, GradcamError> {
    let (ah, aw, _) = hwk(activations)?;
    let (gh, gw, _) = hwk(grads)?;
    if (ah, aw) != (gh, gw) {
        return Err(GradcamError::SpatialMismatch {
            activations: activations.dims().to_vec(),
            gradients: grads.dims().to_vec(),
        });
    }
    cam(activations, &channel_weights(grads)?)
}

/// Scales so the maximum is 1. An all-zero map is returned unchanged.
pub fn normalize(hm: &Heatmap) -> Heatmap {
    let m = hm.max();
    if m <= 0.0 {
        return hm.clone();
    }
    Heatmap {
        values: hm.values.iter().map(|&v| v / m).collect(),
        ..hm.clone()
    }
}

// Corner-aligned sample position of target index `t` as (index, frac).
fn source_pos(t: usize, src: usize, dst: usize) -> (usize, f64) {
    if dst == 1 || src == 1 {
        return (0, 0.0);
    }
    let num = t * (src - 1);
    let den = dst - 1;
    (num / den, (num % den) as f64 / den as f64)
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if t == 0.0 {
        a
    } else {
        a + t * (b - a)
    }
}

/// Bilinear resampling with the four corners of source and target aligned.
pub fn upsample(hm: &Heatmap, height: usize, width: usize) -> Result<Heatmap, GradcamError> {
    if height < hm.height || width < hm.width {
        return Err(GradcamError::Downsample {
            from: (hm.height, hm.width),
            to: (height, width),
        });
    }
    let cols: Vec<(usize, f64)> = (0..width).map(|x| source_pos(x, hm.width, width)).collect();
    let mut values = vec![0.0; height * width];
    values.par_chunks_mut(width).enumerate().for_each(|(y, row)| {
        let (i, fy) = source_pos(y, hm.height, height);
        let i1 = (i + 1).min(hm.height - 1);
        for (out, &(j, fx)) in row.iter_mut().zip(&cols) {
            let j1 = (j + 1).min(hm.width - 1);
            let top = lerp(hm.get(i, j), hm.get(i, j1), fx);
            let bottom = lerp(hm.get(i1, j), hm.get(i1, j1), fx);
            *out = lerp(top, bottom, fy);
        }
    });
    Ok(Heatmap {
        height,
        width,
        values,
    })
}

/// [`normalize`] then [`upsample`], clamped to [0, 1].
pub fn normalize_upsample(hm: &Heatmap, height: usize, width: usize) -> Result<Heatmap, GradcamError> {
    let mut out = upsample(&normalize(hm), height, width)?;
    for v in &mut out.values {
        *v = v.clamp(0.0, 1.0);
    }
    Ok(out)
}

/// Linear blue-to-red ramp: entry `i` of 256 is `(i, 0, 255 - i)`.
pub fn colormap(v: f64) -> [u8; 3] {
    let i = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    [i, 0, 255 - i]
}

pub fn colorize(hm: &Heatmap) -> RgbImage {
    RgbImage::from_fn(hm.width as u32, hm.height as u32, |x, y| {
        Rgb(colormap(hm.get(y as usize, x as usize)))
    })
}

/// `(1 - beta) * image + beta * colormap(hm)` per channel, rounded.
pub fn overlay(hm: &Heatmap, image: &RgbImage) -> Result<RgbImage, GradcamError> {
    let dims = (image.height() as usize, image.width() as usize);
    if (hm.height, hm.width) != dims {
        return Err(GradcamError::ImageMismatch {
            heatmap: (hm.height, hm.width),
            image: dims,
        });
    }
    Ok(RgbImage::from_fn(image.width(), image.height(), |x, y| {
        let src = image.get_pixel(x, y).0;
        let cm = colormap(hm.get(y as usize, x as usize));
        Rgb(std::array::from_fn(|c| {
            let v = (1.0 - OVERLAY_BETA) * src[c] as f64 + OVERLAY_BETA * cm[c] as f64;
            v.round().clamp(0.0, 255.0) as u8
        }))
    }))
}

pub fn load_image(path: &Path) -> Result<RgbImage, GradcamError> {
    image::open(path)
        .map(|img| img.to_rgb8())
        .map_err(|source| GradcamError::Image {
            path: path.display().to_string(),
            source,
        })
}

/// PNG bytes of `img`.
pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>, GradcamError> {
    let mut out = std::io::Cursor::new(Vec::new());
    img.write_to(&mut out, image::ImageFormat::Png)
        .map_err(|source| GradcamError::Image {
            path: "<png>".into(),
            source,
        })?;
    Ok(out.into_inner())
}
