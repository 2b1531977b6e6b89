//! Derivative-free local search and the shared optimizer configuration.

use serde::{Deserialize, Serialize};

/// Settings shared by the automorphism and rescaling searches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub seed: u64,
    pub random_restarts: usize,
    pub local_search_iters: usize,
    pub tolerance: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            seed: 0,
            random_restarts: 64,
            local_search_iters: 200,
            tolerance: 1e-8,
        }
    }
}

/// Result of a local minimization.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
}

/// Nelder–Mead simplex search with dimension-adaptive coefficients
/// (reflection 1, expansion 1 + 2/n, contraction 3/4 - 1/(2n), shrink 1 - 1/n).
#[derive(Debug, Clone)]
pub struct NelderMead {
    pub max_iters: usize,
    /// Stop once the spread of simplex values falls below this.
    pub f_tol: f64,
    pub initial_step: f64,
}

impl NelderMead {
    pub fn new(max_iters: usize, f_tol: f64, initial_step: f64) -> Self {
        NelderMead {
            max_iters,
            f_tol,
            initial_step,
        }
    }

    pub fn minimize(&self, mut f: impl FnMut(&[f64]) -> f64, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let mut eval = |x: &[f64], count: &mut usize| {
            *count += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let mut evals = 0;
        if n == 0 {
            let v = eval(x0, &mut evals);
            return Minimum {
                x: Vec::new(),
                f: v,
                evals,
            };
        }
        let nf = n as f64;
        let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
        let gamma = if n == 1 { 0.5 } else { gamma };
        let delta = if n == 1 { 0.5 } else { delta };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let v0 = eval(x0, &mut evals);
        simplex.push((x0.to_vec(), v0));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += self.initial_step;
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }

        let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(ai, bi)| ai + t * (bi - ai)).collect()
        };

        for _ in 0..self.max_iters {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            let worst = simplex[n].1;
            if (worst - best).abs() <= self.f_tol {
                break;
            }
            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let worst_x = simplex[n].0.clone();
            let reflected = lerp(&centroid, &worst_x, -alpha);
            let fr = eval(&reflected, &mut evals);
            if fr < best {
                let expanded = lerp(&centroid, &worst_x, -beta);
                let fe = eval(&expanded, &mut evals);
                simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (reflected, fr);
            } else {
                let (cand, fc) = if fr < worst {
                    let outside = lerp(&centroid, &worst_x, -gamma);
                    let fo = eval(&outside, &mut evals);
                    (outside, fo)
                } else {
                    let inside = lerp(&centroid, &worst_x, gamma);
                    let fi = eval(&inside, &mut evals);
                    (inside, fi)
                };
                if fc < worst.min(fr) {
                    simplex[n] = (cand, fc);
                } else {
                    let best_x = simplex[0].0.clone();
                    for k in 1..=n {
                        let x = lerp(&best_x, &simplex[k].0, delta);
                        let v = eval(&x, &mut evals);
                        simplex[k] = (x, v);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, f) = simplex.swap_remove(0);
        Minimum { x, f, evals }
    }
}
