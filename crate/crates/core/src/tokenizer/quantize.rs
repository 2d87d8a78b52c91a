//! Velocity, time-shift and duration binning.
//!
//! Time is measured in 10 ms grid steps. A TIME_SHIFT token advances the
//! clock by 1–100 steps. DURATION bins 1–100 are 10 ms apart (10 ms–1.0 s);
//! bins 101–140 are 100 ms apart (1.1 s–5.0 s) and longer notes clamp to 140.

/// Grid steps per second.
pub const STEPS_PER_SECOND: f64 = 100.0;
pub const MAX_TIME_SHIFT: u8 = 100;
pub const MAX_DURATION_BIN: u8 = 140;
pub const VELOCITY_BINS: u8 = 32;
/// Velocity bin assumed by the decoder before any VELOCITY token.
pub const DEFAULT_VELOCITY_BIN: u8 = 20;

const FINE_DURATION_BINS: u8 = 100;
const COARSE_STEP: u64 = 10;

pub fn quantize_velocity(velocity: u8) -> u8 {
    velocity.clamp(1, 127) / 4
}

/// Nominal velocity of a bin (its midpoint).
pub fn dequantize_velocity(bin: u8) -> u8 {
    (u16::from(bin) * 4 + 2).clamp(1, 127) as u8
}

/// Nearest grid step for a time in seconds.
pub fn seconds_to_steps(seconds: f64) -> u64 {
    (seconds.max(0.0) * STEPS_PER_SECOND).round() as u64
}

pub fn steps_to_seconds(steps: u64) -> f64 {
    steps as f64 / STEPS_PER_SECOND
}

/// TIME_SHIFT indices realizing a gap of `steps` grid steps.
pub fn time_shift_steps(steps: u64) -> Vec<u8> {
    let full = steps / u64::from(MAX_TIME_SHIFT);
    let rest = (steps % u64::from(MAX_TIME_SHIFT)) as u8;
    let mut out = vec![MAX_TIME_SHIFT; full as usize];
    if rest > 0 {
        out.push(rest);
    }
    out
}

/// TIME_SHIFT indices for a gap in seconds, rounded to the nearest step.
pub fn quantize_time_shift(gap_s: f64) -> Vec<u8> {
    time_shift_steps(seconds_to_steps(gap_s))
}

/// Nearest DURATION bin for a positive duration.
pub fn quantize_duration(duration_s: f64) -> u8 {
    // The midpoint between the last fine bin (1.00 s) and the first coarse
    // bin (1.10 s).
    if duration_s < 1.05 {
        (duration_s * STEPS_PER_SECOND)
            .round()
            .clamp(1.0, f64::from(FINE_DURATION_BINS)) as u8
    } else {
        ((duration_s * 10.0).round() + 90.0)
            .clamp(f64::from(FINE_DURATION_BINS + 1), f64::from(MAX_DURATION_BIN)) as u8
    }
}

/// Length of a DURATION bin in grid steps.
pub fn duration_bin_steps(bin: u8) -> u64 {
    let bin = bin.clamp(1, MAX_DURATION_BIN);
    if bin <= FINE_DURATION_BINS {
        u64::from(bin)
    } else {
        u64::from(FINE_DURATION_BINS) + u64::from(bin - FINE_DURATION_BINS) * COARSE_STEP
    }
}

pub fn duration_bin_seconds(bin: u8) -> f64 {
    steps_to_seconds(duration_bin_steps(bin))
}

/// Half the spacing of the bins around `duration_s`: the worst-case decode
/// error for durations inside the table.
pub fn duration_half_width(duration_s: f64) -> f64 {
    if duration_s < 1.0 {
        0.005
    } else {
        0.05
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Nominal value of every bin, written out independently of the
    /// step arithmetic above.
    fn bin_table() -> Vec<(u8, f64)> {
        let mut t: Vec<(u8, f64)> = (1..=100u8).map(|i| (i, f64::from(i) / 100.0)).collect();
        for (k, i) in (101..=140u8).enumerate() {
            t.push((i, 1.1 + k as f64 * 0.1));
        }
        t
    }

    #[test]
    fn velocity_bins() {
        assert_eq!(quantize_velocity(1), 0);
        assert_eq!(quantize_velocity(80), 20);
        assert_eq!(quantize_velocity(127), 31);
        assert_eq!(dequantize_velocity(0), 2);
        assert_eq!(dequantize_velocity(31), 126);
        for bin in 0..VELOCITY_BINS {
            assert_eq!(quantize_velocity(dequantize_velocity(bin)), bin);
        }
    }

    #[test]
    fn time_shift_examples() {
        assert!(quantize_time_shift(0.0).is_empty());
        assert!(quantize_time_shift(0.004).is_empty());
        assert_eq!(quantize_time_shift(0.5), vec![50]);
        assert_eq!(quantize_time_shift(2.5), vec![100, 100, 50]);
        assert_eq!(quantize_time_shift(1.0), vec![100]);
    }

    #[test]
    fn duration_examples() {
        assert_eq!(quantize_duration(0.5), 50);
        assert_eq!(quantize_duration(2.0), 110);
        assert_eq!(quantize_duration(60.0), 140);
        assert_eq!(quantize_duration(0.001), 1);
        assert_eq!(quantize_duration(1.04), 100);
        assert_eq!(quantize_duration(1.06), 101);
    }

    #[test]
    fn two_seconds_against_bin_edge_table() {
        let table = bin_table();
        let (bin, nominal) = table
            .iter()
            .copied()
            .min_by(|a, b| (a.1 - 2.0).abs().total_cmp(&(b.1 - 2.0).abs()))
            .unwrap();
        assert_eq!(bin, 110);
        assert!((nominal - 2.0).abs() < 1e-12);
        assert_eq!(quantize_duration(2.0), bin);
    }

    #[test]
    fn nominal_values_match_table() {
        for (bin, nominal) in bin_table() {
            assert!((duration_bin_seconds(bin) - nominal).abs() < 1e-9, "bin {bin}");
            assert_eq!(quantize_duration(duration_bin_seconds(bin)), bin);
        }
    }

    proptest! {
        #[test]
        fn quantized_duration_is_a_nearest_bin(d in 0.005f64..5.05) {
            let table = bin_table();
            let best = table
                .iter()
                .map(|&(_, v)| (v - d).abs())
                .fold(f64::INFINITY, f64::min);
            let got = (duration_bin_seconds(quantize_duration(d)) - d).abs();
            prop_assert!(got <= best + 1e-9, "d={} got err {} best {}", d, got, best);
            prop_assert!(got <= duration_half_width(d) + 1e-9);
        }

        #[test]
        fn time_shift_sums_to_rounded_gap(gap in 0.0f64..30.0) {
            let total: u64 = quantize_time_shift(gap).iter().map(|&i| u64::from(i)).sum();
            prop_assert_eq!(total, seconds_to_steps(gap));
            prop_assert!(quantize_time_shift(gap).iter().all(|&i| (1..=100).contains(&i)));
        }
    }
}
