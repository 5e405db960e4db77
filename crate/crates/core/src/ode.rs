//! Adaptive embedded Runge-Kutta 4(5) (Dormand-Prince) for complex state
//! vectors. Used for the linear second-moment systems in `cavity`.

use num_complex::Complex64;

/// Integrate y' = f(t, y) from `t0` to `t1`, returning y(t1).
///
/// Error control is per component: |e_i| <= atol + rtol·|y_i|.
pub fn integrate<F>(f: &F, t0: f64, t1: f64, y0: Vec<Complex64>, rtol: f64, atol: f64) -> Vec<Complex64>
where
    F: Fn(f64, &[Complex64]) -> Vec<Complex64>,
{
    // Dormand-Prince coefficients.
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

    let dim = y0.len();
    let mut t = t0;
    let mut y = y0;
    let span = t1 - t0;
    if span <= 0.0 {
        return y;
    }
    let mut h = span / 100.0;
    let h_min = span * 1e-14;

    while t < t1 {
        if t + h > t1 {
            h = t1 - t;
        }
        let mut k: Vec<Vec<Complex64>> = Vec::with_capacity(7);
        k.push(f(t, &y));
        for s in 0..6 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..dim {
                        ys[i] += kj[i] * (h * a);
                    }
                }
            }
            k.push(f(t + C[s] * h, &ys));
        }

        let mut y5 = y.clone();
        let mut err: f64 = 0.0;
        for i in 0..dim {
            let mut d5 = Complex64::default();
            let mut d4 = Complex64::default();
            for (j, kj) in k.iter().enumerate() {
                d5 += kj[i] * B5[j];
                d4 += kj[i] * B4[j];
            }
            y5[i] += d5 * h;
            let e = (d5 - d4).norm() * h;
            let tol = atol + rtol * y5[i].norm().max(y[i].norm());
            err = err.max(e / tol);
        }

        if err <= 1.0 || h <= h_min {
            t += h;
            y = y5;
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h = (h * factor.clamp(0.2, 5.0)).max(h_min);
    }
    y
}
