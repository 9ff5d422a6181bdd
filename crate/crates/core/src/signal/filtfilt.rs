use ndarray::Array2;

use super::butterworth::{Biquad, SosCascade};
use crate::error::{Error, Result};
use crate::featio::FeatureTrajectory;

/// Edge padding length used by [`filtfilt`] for a filter of `order`.
pub fn pad_len(order: usize) -> usize {
    3 * (order + 1)
}

/// Zero-phase filtering: the cascade runs forward, then backward, over each
/// channel independently.
///
/// Each channel is extended at both ends by odd reflection of length
/// [`pad_len`], and every section starts from its steady-state response to
/// the first sample, so a constant signal passes through unchanged.
pub fn filtfilt(sos: &SosCascade, traj: &FeatureTrajectory) -> Result<FeatureTrajectory> {
    let padlen = pad_len(sos.order);
    let frames = traj.frames();
    if frames <= padlen {
        return Err(Error::TooShort {
            frames,
            required: padlen,
        });
    }
    let zi = steady_state(&sos.sections);
    let mut out = Array2::zeros(traj.data().dim());
    let mut column = vec![0.0; frames];
    for (c, src) in traj.data().columns().into_iter().enumerate() {
        for (dst, v) in column.iter_mut().zip(src.iter()) {
            *dst = *v;
        }
        let filtered = filtfilt_1d(&sos.sections, &zi, &column, padlen);
        for (t, v) in filtered.into_iter().enumerate() {
            out[[t, c]] = v;
        }
    }
    traj.map_data(out)
}

/// Single-channel form of [`filtfilt`].
pub fn filtfilt_slice(sos: &SosCascade, x: &[f64]) -> Result<Vec<f64>> {
    let padlen = pad_len(sos.order);
    if x.len() <= padlen {
        return Err(Error::TooShort {
            frames: x.len(),
            required: padlen,
        });
    }
    Ok(filtfilt_1d(
        &sos.sections,
        &steady_state(&sos.sections),
        x,
        padlen,
    ))
}

fn filtfilt_1d(sections: &[Biquad], zi: &[[f64; 2]], x: &[f64], padlen: usize) -> Vec<f64> {
    let n = x.len();
    let first = x[0];
    let last = x[n - 1];
    let mut ext = Vec::with_capacity(n + 2 * padlen);
    ext.extend((1..=padlen).rev().map(|k| 2.0 * first - x[k]));
    ext.extend_from_slice(x);
    ext.extend((1..=padlen).map(|k| 2.0 * last - x[n - 1 - k]));

    run_cascade(sections, zi, &mut ext);
    ext.reverse();
    run_cascade(sections, zi, &mut ext);
    ext.reverse();
    ext[padlen..padlen + n].to_vec()
}

/// Transposed direct form II, in place, with each section's state seeded
/// from `zi` scaled by the section's first input.
fn run_cascade(sections: &[Biquad], zi: &[[f64; 2]], signal: &mut [f64]) {
    for (s, z0) in sections.iter().zip(zi) {
        let x0 = signal[0];
        let mut z1 = z0[0] * x0;
        let mut z2 = z0[1] * x0;
        let [b0, b1, b2] = s.b;
        let [a1, a2] = s.a;
        for v in signal.iter_mut() {
            let x = *v;
            let y = b0 * x + z1;
            z1 = b1 * x - a1 * y + z2;
            z2 = b2 * x - a2 * y;
            *v = y;
        }
    }
}

/// Per-section state that holds a unit step in steady state.
fn steady_state(sections: &[Biquad]) -> Vec<[f64; 2]> {
    sections
        .iter()
        .map(|s| {
            let g = s.dc_gain();
            [s.b[1] + s.b[2] - (s.a[0] + s.a[1]) * g, s.b[2] - s.a[1] * g]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{design_butterworth_lowpass, FilterSpec};
    use std::f64::consts::PI;

    fn paper_filter() -> SosCascade {
        design_butterworth_lowpass(&FilterSpec::new(5, 10.0, 200.0).unwrap()).unwrap()
    }

    fn sine(freq: f64, fs: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|t| (2.0 * PI * freq * t as f64 / fs).sin())
            .collect()
    }

    fn rms(x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    #[test]
    fn constant_passes_unchanged() {
        let y = filtfilt_slice(&paper_filter(), &[7.0; 64]).unwrap();
        assert!(y.iter().all(|v| (v - 7.0).abs() <= 1e-6), "{y:?}");
    }

    #[test]
    fn passband_sine_keeps_amplitude() {
        let x = sine(1.0, 200.0, 2001);
        let y = filtfilt_slice(&paper_filter(), &x).unwrap();
        let ratio = rms(&y) / rms(&x);
        assert!((ratio - 1.0).abs() < 0.01, "{ratio}");
    }

    #[test]
    fn stopband_sine_is_removed() {
        // 2001 samples: both ends fall on zero crossings, where odd
        // reflection continues the waveform without a DC jump.
        let x = sine(50.0, 200.0, 2001);
        let y = filtfilt_slice(&paper_filter(), &x).unwrap();
        assert!(rms(&y) < 0.01 * rms(&x), "{}", rms(&y) / rms(&x));
    }

    #[test]
    fn zero_group_delay() {
        // Band-limited pulse: a slow Gaussian bump.
        let x: Vec<f64> = (0..400)
            .map(|t| (-((t as f64 - 200.0) / 15.0).powi(2)).exp())
            .collect();
        let y = filtfilt_slice(&paper_filter(), &x).unwrap();
        let xcorr = |lag: i64| -> f64 {
            (0..x.len() as i64)
                .filter_map(|t| {
                    let u = t + lag;
                    (u >= 0 && u < y.len() as i64).then(|| x[t as usize] * y[u as usize])
                })
                .sum()
        };
        let best = (-20..=20)
            .max_by(|a, b| xcorr(*a).total_cmp(&xcorr(*b)))
            .unwrap();
        assert_eq!(best, 0);
    }

    #[test]
    fn too_short_is_an_error() {
        let sos = paper_filter();
        assert!(matches!(
            filtfilt_slice(&sos, &[1.0; 18]),
            Err(Error::TooShort {
                frames: 18,
                required: 18
            })
        ));
        assert!(filtfilt_slice(&sos, &[1.0; 19]).is_ok());
    }

    #[test]
    fn stopband_interior_is_clean_even_when_edges_ring() {
        // Ending on a peak makes the reflected padding carry a DC step;
        // the resulting transient stays near the edges.
        let x = sine(50.0, 200.0, 2000);
        let y = filtfilt_slice(&paper_filter(), &x).unwrap();
        assert!(rms(&y[200..1800]) < 1e-6);
    }

    #[test]
    fn preserves_shape_and_rate() {
        let data = Array2::from_shape_fn((50, 3), |(t, c)| (t as f64 * 0.1 + c as f64).sin());
        let traj = FeatureTrajectory::new(data, 200.0).unwrap();
        let out = filtfilt(&paper_filter(), &traj).unwrap();
        assert_eq!(out.data().dim(), (50, 3));
        assert_eq!(out.frame_rate_hz(), 200.0);
        // Channels are filtered independently.
        let col1: Vec<f64> = traj.data().column(1).to_vec();
        let alone = filtfilt_slice(&paper_filter(), &col1).unwrap();
        for (a, b) in alone.iter().zip(out.data().column(1)) {
            assert_eq!(a, b);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn linear(
                x in prop::collection::vec(-10.0f64..10.0, 40),
                y in prop::collection::vec(-10.0f64..10.0, 40),
                a in -3.0f64..3.0,
                b in -3.0f64..3.0,
            ) {
                let sos = paper_filter();
                let mix: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
                let lhs = filtfilt_slice(&sos, &mix).unwrap();
                let fx = filtfilt_slice(&sos, &x).unwrap();
                let fy = filtfilt_slice(&sos, &y).unwrap();
                let scale = lhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                for k in 0..lhs.len() {
                    let rhs = a * fx[k] + b * fy[k];
                    prop_assert!((lhs[k] - rhs).abs() <= 1e-6 * scale);
                }
            }
        }
    }
}
