//! Registered experiments. Each returns its rows together with the
//! assertions it makes about them; `--check` turns failed assertions into a
//! nonzero exit status.

use std::collections::BTreeMap;

use ballspace_core::multiplier::{mult_bm_bracket, mult_discrepancy, two_point_mult_lower};
use ballspace_core::rkhs::rk_bm_distance;
use ballspace_core::set_metrics::{
    hausdorff, invariant_symmetric, symmetric, two_point_lower_bound, BaseMetric,
};
use ballspace_core::{Certificate, OptimizerConfig, PointSet, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{CliError, Result};
use crate::report::{sort_rows, ResultRow};

pub const EXPERIMENTS: [&str; 5] = [
    "blaschke",
    "counterexample_s_vs_h",
    "hartz",
    "main_theorem",
    "nonuniform",
];

/// Largest truncation index for the sequences accumulating at the boundary.
pub const MAX_BLASCHKE_K: i32 = 40;
pub const MAX_HARTZ_K: i32 = 38;
/// Radial clamp for perturbed points.
pub const CLAMP_RADIUS: f64 = 0.98;
pub const MAX_RESAMPLES: usize = 100;
pub const MIN_SPEARMAN: f64 = 0.9;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub rows: Vec<ResultRow>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn extend(&mut self, other: Outcome) {
        self.rows.extend(other.rows);
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn sorted(mut self) -> Self {
        sort_rows(&mut self.rows);
        self
    }
}

/// A named experiment with raw `key=value` parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub output_path: Option<String>,
}

impl ExperimentSpec {
    pub fn new(name: &str) -> Result<Self> {
        if !EXPERIMENTS.contains(&name) {
            return Err(CliError::Validation(format!(
                "unknown experiment {name:?}; expected one of {}",
                EXPERIMENTS.join(", ")
            )));
        }
        Ok(ExperimentSpec {
            name: name.to_string(),
            params: BTreeMap::new(),
            output_path: None,
        })
    }

    pub fn with_param(mut self, key: &str, value: &str) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    fn real(&self, key: &str, default: f64) -> Result<f64> {
        self.raw(key).map_or(Ok(default), |v| parse_num(key, v))
    }

    fn int(&self, key: &str, default: i64) -> Result<i64> {
        self.raw(key).map_or(Ok(default), |v| parse_num(key, v))
    }

    fn list<T: std::str::FromStr + Clone>(&self, key: &str, default: &[T]) -> Result<Vec<T>> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(v) => v.split(',').map(|s| parse_num(key, s.trim())).collect(),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.params.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(CliError::Validation(format!(
                    "experiment {} has no parameter {k:?}; expected one of {}",
                    self.name,
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| CliError::Parse(format!("parameter {key}: cannot parse {v:?}")))
}

/// Runs a registered experiment. `x` overrides the base set of `main_theorem`.
pub fn run(spec: &ExperimentSpec, cfg: &OptimizerConfig, x: Option<&PointSet>) -> Result<Outcome> {
    let out = match spec.name.as_str() {
        "counterexample_s_vs_h" => {
            spec.check_keys(&["delta", "t"])?;
            counterexample_s_vs_h(spec.real("delta", 0.005)?, spec.real("t", 0.1)?)?
        }
        "blaschke" => {
            spec.check_keys(&["eps", "k"])?;
            let k = spec.int("k", 20)?;
            let k = i32::try_from(k).map_err(|_| CliError::Validation(format!("k = {k} is out of range")))?;
            blaschke(spec.real("eps", 0.1)?, k)?
        }
        "nonuniform" => {
            spec.check_keys(&["x", "y"])?;
            nonuniform(spec.real("x", 0.1)?, &spec.list("y", &[0.05, 0.01, 0.002])?, cfg)?
        }
        "hartz" => {
            spec.check_keys(&["r", "k"])?;
            hartz(spec.real("r", 0.1)?, &spec.list("k", &[4, 8, 12])?)?
        }
        "main_theorem" => {
            spec.check_keys(&["scales", "seed"])?;
            let seed = spec.int("seed", cfg.seed as i64)? as u64;
            let base = match x {
                Some(x) => x.clone(),
                None => main_theorem_base(),
            };
            let scales = spec.list("scales", &[0.0, 0.1, 0.05, 0.01, 0.001])?;
            main_theorem(&base, &scales, seed, cfg)?
        }
        other => unreachable!("unregistered experiment {other}"),
    };
    Ok(out.sorted())
}

fn range_error(msg: String) -> CliError {
    CliError::Validation(msg)
}

fn close(name: &str, got: f64, want: f64, tol: f64) -> Check {
    Check::new(
        name,
        (got - want).abs() <= tol,
        format!("got {got:.15e}, expected {want:.15e}, tol {tol:e}"),
    )
}

/// `X = {0, δ, t + δ/2}`, `Y = {δ/2, t, t + δ}` on the real line.
pub fn counterexample_s_vs_h(delta: f64, t: f64) -> Result<Outcome> {
    if !(0.0 < delta && delta < t / 10.0 && t / 10.0 < 0.1) {
        return Err(range_error(format!(
            "need 0 < delta < t/10 < 1/10, got delta = {delta}, t = {t}"
        )));
    }
    let x = PointSet::from_reals(&[0.0, delta, t + delta / 2.0])?;
    let y = PointSet::from_reals(&[delta / 2.0, t, t + delta])?;
    let es = symmetric(&x, &y, BaseMetric::Euclidean)?.0;
    let eh = hausdorff(&x, &y, BaseMetric::Euclidean)?;
    let ps = symmetric(&x, &y, BaseMetric::Pseudohyperbolic)?.0;
    let ph = hausdorff(&x, &y, BaseMetric::Pseudohyperbolic)?;

    let name = "counterexample_s_vs_h";
    let mut row = ResultRow::new(name).param("delta", delta).param("t", t);
    row.metric("euclidean_symmetric", es, Certificate::Exact)?;
    row.metric("euclidean_hausdorff", eh, Certificate::Exact)?;
    row.metric("ph_symmetric", ps, Certificate::Exact)?;
    row.metric("ph_hausdorff", ph, Certificate::Exact)?;
    row.metric("ph_hausdorff_ratio", ph / (delta / 2.0), Certificate::Exact)?;

    let tag = format!("{name}[delta={delta},t={t}]");
    let mut checks = vec![
        close(&format!("{tag} symmetric = t - delta"), es, t - delta, 1e-12),
        close(&format!("{tag} hausdorff = delta/2"), eh, delta / 2.0, 1e-12),
        Check::new(
            format!("{tag} ph hausdorff <= ph symmetric"),
            ph <= ps,
            format!("{ph:e} vs {ps:e}"),
        ),
    ];
    if t <= 0.01 {
        let ratio = ph / (delta / 2.0);
        checks.push(Check::new(
            format!("{tag} ph hausdorff within 5% of delta/2"),
            (ratio - 1.0).abs() <= 0.05,
            format!("ratio {ratio:.12}"),
        ));
    }
    Ok(Outcome {
        rows: vec![row],
        checks,
    })
}

/// `x_k = 1 - 2^{-k}`, `y_k = 1 - (1 - eps^k) 2^{-k}` for `k = 1..=K`, computed
/// through the complements `1 - x_k`, `1 - y_k` to avoid cancellation.
pub fn blaschke(eps: f64, k_max: i32) -> Result<Outcome> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(range_error(format!("eps = {eps} is outside (0, 1)")));
    }
    if !(1..=MAX_BLASCHKE_K).contains(&k_max) {
        return Err(range_error(format!(
            "K = {k_max} is outside 1..={MAX_BLASCHKE_K}: complements would fall below 1e-12"
        )));
    }
    let ks = 1..=k_max;
    let a: Vec<f64> = ks.clone().map(|k| 2f64.powi(-k)).collect();
    let b: Vec<f64> = ks.clone().map(|k| (1.0 - eps.powi(k)) * 2f64.powi(-k)).collect();
    let ph: Vec<f64> = ks
        .clone()
        .zip(a.iter().zip(&b))
        .map(|(k, (&a, &b))| eps.powi(k) * a / (a + b - a * b))
        .collect();
    let sup_ph = ph.iter().copied().fold(0.0, f64::max);

    let v_ratios: Vec<f64> = a.windows(2).map(|w| w[1] / w[0]).collect();
    let mut w_comp: Vec<f64> = a.iter().chain(&b).copied().collect();
    w_comp.sort_by(|p, q| q.total_cmp(p));
    let w_ratios: Vec<f64> = w_comp.windows(2).map(|w| w[1] / w[0]).collect();
    let pair_ratios: Vec<f64> = a.iter().zip(&b).map(|(a, b)| b / a).collect();
    let fold = |v: &[f64], f: fn(f64, f64) -> f64, init| v.iter().copied().fold(init, f);

    let name = "blaschke";
    let mut row = ResultRow::new(name).param("eps", eps).param("k", k_max as i64);
    row.metric("sup_ph", sup_ph, Certificate::Exact)?;
    row.metric("v_ratio_min", fold(&v_ratios, f64::min, f64::INFINITY), Certificate::Exact)?;
    row.metric("v_ratio_max", fold(&v_ratios, f64::max, 0.0), Certificate::Exact)?;
    row.metric("w_ratio_max", fold(&w_ratios, f64::max, 0.0), Certificate::Exact)?;
    row.metric("pair_ratio_last", pair_ratios[pair_ratios.len() - 1], Certificate::Exact)?;

    let tag = format!("{name}[eps={eps},K={k_max}]");
    let checks = vec![
        Check::new(
            format!("{tag} sup ph(x_k, y_k) <= eps"),
            sup_ph <= eps,
            format!("sup {sup_ph:e}"),
        ),
        Check::new(
            format!("{tag} V ratios equal 1/2"),
            v_ratios.iter().all(|&r| r == 0.5),
            format!("{} ratios", v_ratios.len()),
        ),
        Check::new(
            format!("{tag} W pair ratios nondecreasing towards 1"),
            pair_ratios.windows(2).all(|w| w[0] <= w[1]) && pair_ratios.iter().all(|&r| r < 1.0 + 1e-15),
            format!("last {:.15}", pair_ratios[pair_ratios.len() - 1]),
        ),
    ];
    Ok(Outcome {
        rows: vec![row],
        checks,
    })
}

/// `X = {0, x}` against `Y = {0, y}` for each `y`.
pub fn nonuniform(x: f64, ys: &[f64], cfg: &OptimizerConfig) -> Result<Outcome> {
    if !(x > 0.0 && x < 0.5) {
        return Err(range_error(format!("x = {x} is outside (0, 1/2)")));
    }
    if let Some(&y) = ys.iter().find(|&&y| !(y > 0.0 && y <= x)) {
        return Err(range_error(format!("y = {y} is outside (0, x]")));
    }
    let name = "nonuniform";
    let set_x = PointSet::from_reals(&[0.0, x])?;
    let mut rows = Vec::new();
    let mut deltas = Vec::new();
    let mut checks = Vec::new();
    for &y in ys {
        let set_y = PointSet::from_reals(&[0.0, y])?;
        let rk = rk_bm_distance(&set_x, &set_y, cfg)?;
        let bound = 2.0 * x.max(y);
        let mut row = ResultRow::new(name).param("x", x).param("y", y);
        row.metric("delta_rk", rk.delta, rk.certificate)?;
        row.metric("symmetric_bound", bound, Certificate::UpperBound)?;
        row.metric("exceeds_alpha", f64::from(u8::from(rk.delta >= 1.01)), rk.certificate)?;
        rows.push(row);
        let tag = format!("{name}[x={x},y={y}]");
        checks.push(Check::new(
            format!("{tag} symmetric bound <= 2x"),
            bound <= 2.0 * x,
            format!("{bound}"),
        ));
        checks.push(Check::new(
            format!("{tag} delta >= 1"),
            rk.delta >= 1.0 - 1e-12,
            format!("{:.12}", rk.delta),
        ));
        if y == x {
            checks.push(close(&format!("{tag} delta = 1 for equal sets"), rk.delta, 1.0, 1e-9));
        }
        deltas.push(rk.delta);
    }
    checks.push(Check::new(
        format!("{name}[x={x}] delta increasing along the list"),
        deltas.windows(2).all(|w| w[0] < w[1]),
        format!("{deltas:?}"),
    ));
    Ok(Outcome { rows, checks })
}

fn hartz_y(k: i32) -> Result<PointSet> {
    Ok(PointSet::from_reals(&[1.0 - 2f64.powi(-k), 1.0 - 2f64.powi(-k - 1)])?)
}

/// `ρ(y_k, y_{k+1})` from the complements `2^{-k}`, `2^{-k-1}`.
pub fn hartz_consecutive_ph(k: i32) -> f64 {
    let (a, b) = (2f64.powi(-k), 2f64.powi(-k - 1));
    (a - b) / (a + b - a * b)
}

/// `X = {0, r}` against `Y = {y_k, y_{k+1}}`, `y_k = 1 - 2^{-k}`.
pub fn hartz(r: f64, ks: &[i32]) -> Result<Outcome> {
    if !(r > 0.0 && r < 1.0 / 6.0) {
        return Err(range_error(format!("r = {r} is outside (0, 1/6)")));
    }
    if let Some(&k) = ks.iter().find(|&&k| !(1..=MAX_HARTZ_K).contains(&k)) {
        return Err(range_error(format!("k = {k} is outside 1..={MAX_HARTZ_K}")));
    }
    let name = "hartz";
    let x = PointSet::from_reals(&[0.0, r])?;
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let mut rows = Vec::new();
    let mut cols: [Vec<f64>; 4] = Default::default();
    for &k in &ks {
        let y = hartz_y(k)?;
        let md = mult_discrepancy(&x, &y)?;
        let lower_s = two_point_lower_bound(&x, &y)?;
        let lower_m = two_point_mult_lower(&x, &y)?;
        let ph = hartz_consecutive_ph(k);
        let mut row = ResultRow::new(name).param("r", r).param("k", k as i64);
        row.metric("mult_discrepancy", md.value, md.certificate)?;
        row.metric("symmetric_lower", lower_s, Certificate::LowerBound)?;
        row.metric("mult_bm_lower", lower_m, Certificate::LowerBound)?;
        row.metric("ph_consecutive", ph, Certificate::Exact)?;
        rows.push(row);
        for (c, v) in cols.iter_mut().zip([md.value, lower_s, lower_m, ph]) {
            c.push(v);
        }
    }
    let tag = format!("{name}[r={r},k={ks:?}]");
    let towards = |v: &[f64], limit: f64| v.windows(2).all(|w| (w[1] - limit).abs() <= (w[0] - limit).abs());
    let checks = vec![
        Check::new(
            format!("{tag} multiplier discrepancy strictly decreasing"),
            cols[0].windows(2).all(|w| w[1] < w[0]),
            format!("{:?}", cols[0]),
        ),
        Check::new(
            format!("{tag} symmetric lower bound trends to (1/3 - r)/2"),
            towards(&cols[1], (1.0 / 3.0 - r) / 2.0),
            format!("{:?}", cols[1]),
        ),
        Check::new(
            format!("{tag} multiplier lower bound trends to 1/(6r)"),
            towards(&cols[2], 1.0 / (6.0 * r)),
            format!("{:?}", cols[2]),
        ),
        Check::new(
            format!("{tag} consecutive ph trends to 1/3"),
            towards(&cols[3], 1.0 / 3.0),
            format!("{:?}", cols[3]),
        ),
    ];
    Ok(Outcome { rows, checks })
}

/// `{0, 0.3, 0.5i}` in the disc.
pub fn main_theorem_base() -> PointSet {
    PointSet::from_scalars(&[C64::new(0.0, 0.0), C64::new(0.3, 0.0), C64::new(0.0, 0.5)])
        .expect("valid base set")
}

fn clamp(mut v: Vec<C64>) -> Vec<C64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > CLAMP_RADIUS {
        let s = CLAMP_RADIUS / norm;
        v.iter_mut().for_each(|z| *z *= s);
    }
    v
}

/// `Y_s = X + s g` for one complex Gaussian direction `g` shared by all
/// scales, radially clamped. `g` is redrawn when some `Y_s` is degenerate.
pub fn perturbation_sweep(x: &PointSet, scales: &[f64], seed: u64) -> Result<Vec<PointSet>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = x.dim();
    for _ in 0..MAX_RESAMPLES {
        let g: Vec<Vec<C64>> = (0..x.len())
            .map(|_| {
                (0..d)
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        C64::new(re, im) / 2f64.sqrt()
                    })
                    .collect()
            })
            .collect();
        let sets: std::result::Result<Vec<PointSet>, _> = scales
            .iter()
            .map(|&s| {
                let coords = x
                    .coords()
                    .zip(&g)
                    .map(|(p, gi)| clamp(p.iter().zip(gi).map(|(z, w)| z + w * s).collect()))
                    .collect();
                PointSet::from_coords(coords)
            })
            .collect();
        if let Ok(sets) = sets {
            return Ok(sets);
        }
    }
    Err(CliError::DegenerateSample(format!(
        "perturbations collided points in {MAX_RESAMPLES} draws"
    )))
}

/// Spearman rank correlation, ties receiving their average rank.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - mean) * (y - mean);
        saa += (x - mean) * (x - mean);
        sbb += (y - mean) * (y - mean);
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    sab / (saa * sbb).sqrt()
}

pub const MAIN_THEOREM_COLUMNS: [&str; 4] = [
    "inv_symmetric",
    "log_delta_rk",
    "log_mult_lower",
    "log_mult_upper",
];

pub fn main_theorem(x: &PointSet, scales: &[f64], seed: u64, cfg: &OptimizerConfig) -> Result<Outcome> {
    if x.len() > 6 {
        return Err(range_error(format!("n = {} exceeds 6", x.len())));
    }
    if let Some(&s) = scales.iter().find(|&&s| !(s >= 0.0 && s.is_finite())) {
        return Err(range_error(format!("scale {s} is not a nonnegative real")));
    }
    let name = "main_theorem";
    let sets = perturbation_sweep(x, scales, seed)?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (&s, y) in scales.iter().zip(&sets) {
        let inv = invariant_symmetric(x, y, cfg)?;
        let bracket = mult_bm_bracket(x, y, cfg)?;
        let rk = &bracket.upper_source;
        let lower_cert = match bracket.lower_witness.certificate {
            Certificate::Exact => Certificate::LowerBound,
            _ => Certificate::Bracket,
        };
        let mut row = ResultRow::new(name)
            .param("s", s)
            .param("seed", seed as i64)
            .param("n", x.len())
            .param("d", x.dim());
        row.metric("inv_symmetric", inv.value, inv.certificate)?;
        row.metric("log_delta_rk", rk.rho, rk.certificate)?;
        row.metric("log_mult_lower", bracket.lower.ln(), lower_cert)?;
        row.metric("log_mult_upper", bracket.upper.ln(), Certificate::UpperBound)?;
        let tag = format!("{name}[s={s},seed={seed}]");
        checks.push(Check::new(
            format!("{tag} bracket lower <= upper"),
            bracket.lower <= bracket.upper + 1e-9,
            format!("{:.12} <= {:.12}", bracket.lower, bracket.upper),
        ));
        if s == 0.0 {
            let worst = MAIN_THEOREM_COLUMNS
                .iter()
                .map(|c| row.get(c).abs())
                .fold(0.0, f64::max);
            checks.push(Check::new(
                format!("{tag} unperturbed row vanishes"),
                worst <= 1e-6,
                format!("max |metric| {worst:e}"),
            ));
        }
        rows.push(row);
    }
    let nonzero: Vec<usize> = (0..scales.len()).filter(|&i| scales[i] > 0.0).collect();
    if nonzero.len() >= 3 {
        let s: Vec<f64> = nonzero.iter().map(|&i| scales[i]).collect();
        for col in MAIN_THEOREM_COLUMNS {
            let v: Vec<f64> = nonzero.iter().map(|&i| rows[i].get(col)).collect();
            let rho = spearman(&s, &v);
            checks.push(Check::new(
                format!("{name}[seed={seed}] spearman(s, {col}) >= {MIN_SPEARMAN}"),
                rho >= MIN_SPEARMAN,
                format!("{rho:.6} on {v:?}"),
            ));
        }
    }
    Ok(Outcome { rows, checks })
}

/// Every experiment at the parameters whose outcomes are asserted.
pub fn check_suite(cfg: &OptimizerConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    for (delta, t) in [(0.005, 0.1), (0.001, 0.05), (0.0005, 0.01)] {
        out.extend(counterexample_s_vs_h(delta, t)?);
    }
    let first = counterexample_s_vs_h(0.005, 0.1)?;
    out.checks.push(close("counterexample example symmetric", first.rows[0].get("euclidean_symmetric"), 0.095, 1e-12));
    out.checks.push(close("counterexample example hausdorff", first.rows[0].get("euclidean_hausdorff"), 0.0025, 1e-12));

    out.extend(blaschke(0.1, 20)?);
    out.extend(nonuniform(0.1, &[0.1, 0.05, 0.01, 0.002], cfg)?);

    let h = hartz(0.1, &[4, 8, 10, 12, 20])?;
    let at = |k: i64| {
        h.rows
            .iter()
            .find(|r| r.inputs["k"] == crate::report::Param::Int(k))
            .expect("row present")
    };
    out.checks.push(close(
        "hartz ph(y_10, y_11) = 1/(3 - 2^-10)",
        at(10).get("ph_consecutive"),
        1.0 / (3.0 - 2f64.powi(-10)),
        1e-12,
    ));
    out.checks.push(close(
        "hartz multiplier lower bound at k = 20 near 5/3",
        at(20).get("mult_bm_lower"),
        5.0 / 3.0,
        0.01,
    ));
    out.extend(h);

    out.extend(main_theorem(
        &main_theorem_base(),
        &[0.0, 0.1, 0.05, 0.01, 0.001],
        cfg.seed,
        cfg,
    )?);
    Ok(out.sorted())
}
