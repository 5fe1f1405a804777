//! Quasi-Newton minimization with finite-difference gradients.

#[derive(Clone, Copy, Debug)]
pub(crate) struct BfgsOptions {
    pub max_iter: usize,
    pub fd_step: f64,
    pub gtol: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self { max_iter: 200, fd_step: 1e-6, gtol: 1e-14 }
    }
}

pub(crate) struct BfgsResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub converged: bool,
}

fn gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            let xi = x[i];
            xp[i] = xi + h;
            let fp = f(&xp);
            xp[i] = xi - h;
            let fm = f(&xp);
            xp[i] = xi;
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// BFGS with Armijo backtracking. Returns the best point seen.
pub(crate) fn bfgs<F: Fn(&[f64]) -> f64>(f: F, x0: Vec<f64>, opts: &BfgsOptions) -> BfgsResult {
    let d = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    if !fx.is_finite() {
        return BfgsResult { x, fx, converged: false };
    }
    let mut g = gradient(&f, &x, opts.fd_step);
    let identity = |h: &mut Vec<f64>| {
        h.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..d {
            h[i * d + i] = 1.0;
        }
    };
    let mut h = vec![0.0; d * d];
    identity(&mut h);
    for _ in 0..opts.max_iter {
        let gnorm = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if gnorm <= opts.gtol * (1.0 + fx.abs()) || fx == 0.0 {
            return BfgsResult { x, fx, converged: true };
        }
        let mut dir: Vec<f64> = (0..d).map(|i| -dot(&h[i * d..(i + 1) * d], &g)).collect();
        if dot(&dir, &g) >= 0.0 {
            identity(&mut h);
            dir = g.iter().map(|v| -v).collect();
        }
        let slope = dot(&dir, &g);
        let mut t = 1.0;
        let mut next = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + t * b).collect();
            let ft = f(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * t * slope {
                next = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fnew)) = next else {
            return BfgsResult { x, fx, converged: true };
        };
        let gn = gradient(&f, &xn, opts.fd_step);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            let hy: Vec<f64> = (0..d).map(|i| dot(&h[i * d..(i + 1) * d], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..d {
                for j in 0..d {
                    h[i * d + j] += ((sy + yhy) * s[i] * s[j]) / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        let stalled = fx - fnew <= 1e-16 * fx.abs();
        x = xn;
        fx = fnew;
        g = gn;
        if stalled {
            return BfgsResult { x, fx, converged: true };
        }
    }
    BfgsResult { x, fx, converged: false }
}
