//! Grayscale erosion, dilation and opening over a row-major grid with a
//! square structuring element of side `2 * window + 1`, clipped at the borders.

use std::collections::VecDeque;

use super::grid::ElevationGrid;

fn sliding_1d(input: &[f64], window: usize, out: &mut [f64], keep: fn(f64, f64) -> bool) {
    let n = input.len();
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for (i, slot) in out.iter_mut().enumerate() {
        let hi = (i + window).min(n - 1);
        while next <= hi {
            while dq.back().is_some_and(|&j| !keep(input[j], input[next])) {
                dq.pop_back();
            }
            dq.push_back(next);
            next += 1;
        }
        let lo = i.saturating_sub(window);
        while dq.front().is_some_and(|&j| j < lo) {
            dq.pop_front();
        }
        *slot = input[*dq.front().expect("window is never empty")];
    }
}

fn separable(values: &[f64], cols: usize, rows: usize, window: usize, keep: fn(f64, f64) -> bool) -> Vec<f64> {
    assert_eq!(values.len(), cols * rows, "grid shape mismatch");
    let mut tmp = vec![0.0; values.len()];
    for r in 0..rows {
        sliding_1d(&values[r * cols..(r + 1) * cols], window, &mut tmp[r * cols..(r + 1) * cols], keep);
    }
    let mut out = vec![0.0; values.len()];
    let mut col_in = vec![0.0; rows];
    let mut col_out = vec![0.0; rows];
    for c in 0..cols {
        for r in 0..rows {
            col_in[r] = tmp[r * cols + c];
        }
        sliding_1d(&col_in, window, &mut col_out, keep);
        for r in 0..rows {
            out[r * cols + c] = col_out[r];
        }
    }
    out
}

pub fn erode(values: &[f64], cols: usize, rows: usize, window: usize) -> Vec<f64> {
    separable(values, cols, rows, window, |kept, new| kept < new)
}

pub fn dilate(values: &[f64], cols: usize, rows: usize, window: usize) -> Vec<f64> {
    separable(values, cols, rows, window, |kept, new| kept > new)
}

/// Erosion followed by dilation on raw row-major values.
pub fn open_values(values: &[f64], cols: usize, rows: usize, window: usize) -> Vec<f64> {
    dilate(&erode(values, cols, rows, window), cols, rows, window)
}

/// Opening of the grid's elevation channel; shape and point bookkeeping are kept.
pub fn opening(grid: &ElevationGrid, window: usize) -> ElevationGrid {
    let opened = open_values(&grid.elevations(), grid.cols(), grid.rows(), window);
    grid.with_elevations(opened)
}
