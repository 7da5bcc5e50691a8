//! Nelder–Mead simplex search for small unconstrained problems.

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Minimizes `f` from `start`, with initial simplex edges `steps` along each axis.
///
/// Stops once every vertex lies within `tol` (Euclidean) of the best vertex or
/// after `max_evals` evaluations. The returned value never exceeds `f(start)`.
pub fn nelder_mead<F>(mut f: F, start: &[f64], steps: &[f64], tol: f64, max_evals: usize) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    assert_eq!(steps.len(), n);
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(start, &mut evals);
    simplex.push((start.to_vec(), f0));
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += steps[i];
        let fv = eval(&v, &mut evals);
        simplex.push((v, fv));
    }

    loop {
        // stable sort keeps the earlier vertex first on ties
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| dist(v, &simplex[0].0))
            .fold(0.0, f64::max);
        if diameter < tol || evals >= max_evals {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (w - c)).collect()
        };

        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < worst.1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let v: Vec<f64> = best.iter().zip(&vertex.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
            let fv = eval(&v, &mut evals);
            *vertex = (v, fv);
        }
    }

    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, evaluations: evals }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let m = nelder_mead(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2), &[0.0, 0.0], &[0.5, 0.5], 1e-9, 5000);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock() {
        let rosen = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let m = nelder_mead(rosen, &[-1.2, 1.0], &[0.1, 0.1], 1e-10, 10_000);
        assert!(m.value < 1e-12, "{m:?}");
    }

    #[test]
    fn flat_objective_terminates() {
        let m = nelder_mead(|_| 0.0, &[0.0; 4], &[0.1; 4], 1e-7, 2000);
        assert!(m.evaluations < 2000);
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn respects_budget_and_never_worse_than_start() {
        let f = |x: &[f64]| (x[0] * 3.0).sin() + (x[1] * 5.0).cos() + x[2].powi(2);
        let start = [0.3, 0.2, 1.0];
        let m = nelder_mead(f, &start, &[0.2; 3], 1e-12, 50);
        assert!(m.evaluations <= 50 + 3);
        assert!(m.value <= f(&start));
    }
}
