//! Downhill simplex minimisation with dimension-adapted coefficients
//! (Gao and Han, 2012).

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Initial edge length along every coordinate.
    pub scale: f64,
    /// Stop when `f_max − f_min < rel_tol·|f_min|`.
    pub rel_tol: f64,
    pub max_evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub converged: bool,
}

pub fn minimize(f: impl Fn(&[f64]) -> f64, x0: &[f64], opts: &SimplexOptions) -> SimplexResult {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) =
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.scale;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();
    let mut order: Vec<usize> = (0..=n).collect();

    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut converged = false;

    loop {
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let best = order[0];
        let worst = order[n];
        let second = order[n - 1];
        let (fb, fw) = (vals[best], vals[worst]);
        if (fw - fb).abs() < opts.rel_tol * fb.abs() {
            converged = true;
            break;
        }
        if evals.get() >= opts.max_evaluations {
            break;
        }

        centroid.fill(0.0);
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&pts[i]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= nf);

        let along = |coef: f64, out: &mut Vec<f64>| {
            for ((o, c), w) in out.iter_mut().zip(&centroid).zip(&pts[worst]) {
                *o = c + coef * (c - w);
            }
        };

        along(alpha, &mut trial);
        let fr = eval(&trial);
        if fr < fb {
            let mut expanded = vec![0.0; n];
            along(alpha * beta, &mut expanded);
            let fe = eval(&expanded);
            if fe < fr {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst].copy_from_slice(&trial);
                vals[worst] = fr;
            }
            continue;
        }
        if fr < vals[second] {
            pts[worst].copy_from_slice(&trial);
            vals[worst] = fr;
            continue;
        }
        let (coef, reference) = if fr < fw {
            (alpha * gamma, fr)
        } else {
            (-gamma, fw)
        };
        let mut contracted = vec![0.0; n];
        along(coef, &mut contracted);
        let fc = eval(&contracted);
        if fc < reference {
            pts[worst] = contracted;
            vals[worst] = fc;
            continue;
        }
        let anchor = pts[best].clone();
        for &i in &order[1..] {
            for (x, a) in pts[i].iter_mut().zip(&anchor) {
                *x = a + delta * (*x - a);
            }
            vals[i] = eval(&pts[i]);
        }
    }

    let best = order[0];
    SimplexResult {
        x: pts[best].clone(),
        f: vals[best],
        evaluations: evals.get(),
        converged,
    }
}
