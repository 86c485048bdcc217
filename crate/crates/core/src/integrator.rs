//! Gragg–Bulirsch–Stoer extrapolation for linear matrix ODEs `Y' = F(t) Y`.
//!
//! Each step runs the modified midpoint rule with 2, 4, 6, 8 and 10
//! substeps and extrapolates the results in `h²` (Aitken–Neville), giving an
//! explicit one-step method of order 10.

use nalgebra::Matrix4;

const SUBSTEPS: [usize; 5] = [2, 4, 6, 8, 10];

/// Advances `y` from `t` to `t + h` with one extrapolated step.
pub(crate) fn gbs_step<F>(f: &F, t: f64, y: &Matrix4<f64>, h: f64) -> Matrix4<f64>
where
    F: Fn(f64) -> Matrix4<f64>,
{
    let f0 = f(t) * y;
    let f_end = f(t + h);
    // prev[k] / cur[k]: k-th extrapolant of the previous / current row
    let mut prev: Vec<Matrix4<f64>> = Vec::with_capacity(SUBSTEPS.len());

    for (row, &n) in SUBSTEPS.iter().enumerate() {
        let hs = h / n as f64;
        let mut z_prev = *y;
        let mut z = y + f0 * hs;
        for m in 1..n {
            let z_next = z_prev + f(t + m as f64 * hs) * z * (2.0 * hs);
            z_prev = z;
            z = z_next;
        }
        // Gragg's smoothing step
        let mut cur = Vec::with_capacity(row + 1);
        cur.push((z_prev + z + f_end * z * hs) * 0.5);

        for k in 1..=row {
            let ratio = (n as f64 / SUBSTEPS[row - k] as f64).powi(2);
            let next = cur[k - 1] + (cur[k - 1] - prev[k - 1]) / (ratio - 1.0);
            cur.push(next);
        }
        prev = cur;
    }
    prev[SUBSTEPS.len() - 1]
}

/// Integrates `Y' = F(t) Y` over `[t0, t1]` with `steps` equal GBS steps.
pub(crate) fn integrate<F>(f: &F, y0: Matrix4<f64>, t0: f64, t1: f64, steps: usize) -> Matrix4<f64>
where
    F: Fn(f64) -> Matrix4<f64>,
{
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    for i in 0..steps {
        y = gbs_step(f, t0 + i as f64 * h, &y, h);
    }
    y
}
