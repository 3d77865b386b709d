//! Soft-margin RBF support vector machines trained by sequential minimal
//! optimization, and a one-vs-one multiclass wrapper.
//!
//! The binary solver works on the dual
//!
//! ```text
//! min_α  ½ αᵀQα − Σα    s.t.  0 ≤ α_i ≤ C,  Σ y_i α_i = 0,   Q_ij = y_i y_j K(x_i, x_j)
//! ```
//!
//! choosing at each step the pair with the largest first-order KKT violation
//! for the first index and the best second-order gain for the second, and stops
//! once the maximal violation drops below `tol`.

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Above this many training points the Gram matrix is not cached.
pub const GRAM_CACHE_LIMIT: usize = 4096;

const TAU: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SvmError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("training set is empty")]
    Empty,
    #[error("binary training needs both classes")]
    SingleClass,
    #[error("labels must be -1 or +1, found {0}")]
    BadLabel(f64),
    #[error("{rows} rows but {labels} labels")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("invalid parameter: {0}")]
    BadParam(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gamma {
    /// `1 / (d · mean per-feature variance)`, or `1/d` for constant features.
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c_slack: f64,
    pub gamma: Gamma,
    /// KKT tolerance.
    pub tol: f64,
    /// Scales the iteration cap: `max(100_000, 10 · max_passes · n)`.
    pub max_passes: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c_slack: 1.0,
            gamma: Gamma::Auto,
            tol: 1e-3,
            max_passes: 100,
        }
    }
}

impl SvmParams {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn validate(&self) -> Result<(), SvmError> {
        if !(self.c_slack > 0.0 && self.c_slack.is_finite()) {
            return Err(SvmError::BadParam("C must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(SvmError::BadParam("tol must be positive"));
        }
        if let Gamma::Value(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(SvmError::BadParam("gamma must be positive"));
            }
        }
        if self.max_passes == 0 {
            return Err(SvmError::BadParam("max_passes must be positive"));
        }
        Ok(())
    }

    /// Resolves [`Gamma::Auto`] against the training features.
    pub fn resolve_gamma<R: AsRef<[f64]>>(&self, x: &[R]) -> f64 {
        match self.gamma {
            Gamma::Value(g) => g,
            Gamma::Auto => auto_gamma(x),
        }
    }
}

fn auto_gamma<R: AsRef<[f64]>>(x: &[R]) -> f64 {
    let d = x.first().map_or(1, |r| r.as_ref().len()).max(1);
    let n = x.len() as f64;
    if x.is_empty() {
        return 1.0 / d as f64;
    }
    let mut var_sum = 0.0;
    for j in 0..d {
        let mean = x.iter().map(|r| r.as_ref()[j]).sum::<f64>() / n;
        var_sum += x
            .iter()
            .map(|r| (r.as_ref()[j] - mean).powi(2))
            .sum::<f64>()
            / n;
    }
    let var = var_sum / d as f64;
    if var > 0.0 {
        1.0 / (d as f64 * var)
    } else {
        1.0 / d as f64
    }
}

/// `exp(−γ‖x − y‖²)`.
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64, SvmError> {
    if x.len() != y.len() {
        return Err(SvmError::DimMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(rbf(x, y, gamma))
}

#[inline]
fn rbf(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (-gamma * d2).exp()
}

fn check_dims<R: AsRef<[f64]>>(x: &[R]) -> Result<usize, SvmError> {
    let d = x.first().map(|r| r.as_ref().len()).ok_or(SvmError::Empty)?;
    for r in x {
        if r.as_ref().len() != d {
            return Err(SvmError::DimMismatch {
                expected: d,
                found: r.as_ref().len(),
            });
        }
    }
    Ok(d)
}

/// Kernel rows, cached in full for small problems.
enum Gram<'a, R> {
    Full { n: usize, k: Vec<f64> },
    OnDemand { x: &'a [R], gamma: f64 },
}

impl<'a, R: AsRef<[f64]>> Gram<'a, R> {
    fn new(x: &'a [R], gamma: f64) -> Self {
        let n = x.len();
        if n > GRAM_CACHE_LIMIT {
            return Gram::OnDemand { x, gamma };
        }
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            k[i * n + i] = 1.0;
            for j in 0..i {
                let v = rbf(x[i].as_ref(), x[j].as_ref(), gamma);
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        Gram::Full { n, k }
    }

    fn row_into(&self, i: usize, out: &mut Vec<f64>) {
        match self {
            Gram::Full { n, k } => {
                out.clear();
                out.extend_from_slice(&k[i * n..(i + 1) * n]);
            }
            Gram::OnDemand { x, gamma } => {
                out.clear();
                let xi = x[i].as_ref();
                out.extend(x.iter().map(|xj| rbf(xi, xj.as_ref(), *gamma)));
            }
        }
    }
}

/// Raw dual solution over the full training set.
#[derive(Debug, Clone)]
pub struct DualSolution {
    /// Unsigned multipliers, `0 ≤ α_i ≤ C`.
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solves the soft-margin dual for labels in `{−1, +1}`.
pub fn solve_dual<R: AsRef<[f64]>>(
    x: &[R],
    y: &[f64],
    params: &SvmParams,
) -> Result<DualSolution, SvmError> {
    params.validate()?;
    if x.len() != y.len() {
        return Err(SvmError::LengthMismatch {
            rows: x.len(),
            labels: y.len(),
        });
    }
    check_dims(x)?;
    if let Some(&bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(SvmError::BadLabel(bad));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(SvmError::SingleClass);
    }

    let n = x.len();
    let c = params.c_slack;
    let gamma = params.resolve_gamma(x);
    let gram = Gram::new(x, gamma);
    let max_iter = (10 * params.max_passes * n).max(100_000);

    let mut alpha = vec![0.0; n];
    // gradient of the dual objective: Qα − 1
    let mut grad = vec![-1.0; n];
    let mut ki = Vec::with_capacity(n);
    let mut kj = Vec::with_capacity(n);
    let mut iterations = 0;
    let mut converged = false;

    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    while iterations < max_iter {
        // first index: maximal violation over the "up" set
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if in_up(alpha[t], y[t]) {
                let v = -y[t] * grad[t];
                if v >= gmax {
                    gmax = v;
                    i_sel = Some(t);
                }
            }
        }
        let Some(i) = i_sel else {
            converged = true;
            break;
        };
        gram.row_into(i, &mut ki);

        // second index: best second-order decrease over the "low" set
        let mut gmax2 = f64::NEG_INFINITY;
        let mut best = f64::INFINITY;
        let mut j_sel = None;
        for t in 0..n {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            let v = y[t] * grad[t];
            gmax2 = gmax2.max(v);
            let diff = gmax + v;
            if diff > 0.0 {
                // K(x_i,x_i) = K(x_t,x_t) = 1 for the RBF kernel
                let quad = (2.0 - 2.0 * ki[t]).max(TAU);
                let obj = -(diff * diff) / quad;
                if obj <= best {
                    best = obj;
                    j_sel = Some(t);
                }
            }
        }
        let j = match j_sel {
            Some(j) if gmax + gmax2 >= params.tol => j,
            _ => {
                converged = true;
                break;
            }
        };
        iterations += 1;
        gram.row_into(j, &mut kj);

        let (ai_old, aj_old) = (alpha[i], alpha[j]);
        let (yi, yj) = (y[i], y[j]);
        let quad = (2.0 - 2.0 * ki[j]).max(TAU);
        let (mut ai, mut aj);
        if yi != yj {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai_old - aj_old;
            ai = ai_old + delta;
            aj = aj_old + delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai_old + aj_old;
            ai = ai_old - delta;
            aj = aj_old + delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        alpha[i] = ai.clamp(0.0, c);
        alpha[j] = aj.clamp(0.0, c);

        let di = alpha[i] - ai_old;
        let dj = alpha[j] - aj_old;
        // Q_it = y_i y_t K_it
        for t in 0..n {
            grad[t] += y[t] * (yi * ki[t] * di + yj * kj[t] * dj);
        }
    }

    if !converged {
        warn!("SMO hit the iteration cap ({max_iter}) before reaching tol");
    }

    let bias = -compute_rho(&alpha, &grad, y, c);
    Ok(DualSolution {
        alpha,
        bias,
        gamma,
        iterations,
        converged,
    })
}

/// Offset `ρ` with `f(x) = Σ α_i y_i K(x_i, x) − ρ`: the mean of `y_i ∇_i` over
/// free multipliers, else the midpoint of the feasible interval.
fn compute_rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    if free > 0 {
        free_sum / free as f64
    } else if ub.is_finite() && lb.is_finite() {
        (ub + lb) / 2.0
    } else if ub.is_finite() {
        ub
    } else {
        lb
    }
}

/// Dual objective `Σα − ½ αᵀQα` (to be maximized).
pub fn dual_objective<R: AsRef<[f64]>>(x: &[R], y: &[f64], alpha: &[f64], gamma: f64) -> f64 {
    let n = x.len();
    let mut quad = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            if alpha[j] == 0.0 {
                continue;
            }
            quad += alpha[i] * alpha[j] * y[i] * y[j] * rbf(x[i].as_ref(), x[j].as_ref(), gamma);
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySvm {
    pub support_vectors: Vec<Vec<f64>>,
    /// `y_i · α_i` for each support vector.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
}

impl BinarySvm {
    pub fn dim(&self) -> usize {
        self.support_vectors.first().map_or(0, Vec::len)
    }

    /// `Σ coef_i · K(sv_i, x) + bias`.
    pub fn decision(&self, x: &[f64]) -> Result<f64, SvmError> {
        let d = self.dim();
        if x.len() != d {
            return Err(SvmError::DimMismatch {
                expected: d,
                found: x.len(),
            });
        }
        Ok(self.decision_unchecked(x))
    }

    fn decision_unchecked(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coefs)
            .map(|(sv, &a)| a * rbf(sv, x, self.gamma))
            .sum::<f64>()
            + self.bias
    }

    fn from_solution<R: AsRef<[f64]>>(x: &[R], y: &[f64], sol: &DualSolution) -> Self {
        let mut support_vectors = Vec::new();
        let mut dual_coefs = Vec::new();
        for ((xi, &yi), &a) in x.iter().zip(y).zip(&sol.alpha) {
            if a > 0.0 {
                support_vectors.push(xi.as_ref().to_vec());
                dual_coefs.push(yi * a);
            }
        }
        Self {
            support_vectors,
            dual_coefs,
            bias: sol.bias,
            gamma: sol.gamma,
        }
    }
}

/// Trains a binary machine on labels in `{−1, +1}`.
pub fn train_binary<R: AsRef<[f64]>>(
    x: &[R],
    y: &[f64],
    params: &SvmParams,
) -> Result<BinarySvm, SvmError> {
    let sol = solve_dual(x, y, params)?;
    Ok(BinarySvm::from_solution(x, y, &sol))
}

/// Machine separating `positive` (decision > 0) from `negative`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMachine {
    pub positive: u8,
    pub negative: u8,
    pub machine: BinarySvm,
}

/// One-vs-one multiclass SVM. A single-class training set yields a constant
/// model with no machines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassSvm {
    pub classes: Vec<u8>,
    pub dim: usize,
    pub gamma: f64,
    pub c_slack: f64,
    pub machines: Vec<PairMachine>,
}

impl MulticlassSvm {
    pub fn is_constant(&self) -> bool {
        self.classes.len() == 1
    }

    /// Majority vote over pairwise machines; ties go to the lowest class id.
    pub fn predict_class(&self, x: &[f64]) -> Result<u8, SvmError> {
        if x.len() != self.dim {
            return Err(SvmError::DimMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        if self.is_constant() {
            return Ok(self.classes[0]);
        }
        let mut votes = vec![0usize; self.classes.len()];
        let pos = |c: u8| self.classes.binary_search(&c).expect("class in model");
        for pm in &self.machines {
            let winner = if pm.machine.decision_unchecked(x) > 0.0 {
                pm.positive
            } else {
                pm.negative
            };
            votes[pos(winner)] += 1;
        }
        let mut best = 0;
        for k in 1..votes.len() {
            if votes[k] > votes[best] {
                best = k;
            }
        }
        Ok(self.classes[best])
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// Trains one binary machine per pair of classes present in `labels`.
/// `gamma` is resolved once on the full feature set and shared by all pairs.
pub fn train_multiclass<R: AsRef<[f64]>>(
    x: &[R],
    labels: &[u8],
    params: &SvmParams,
) -> Result<MulticlassSvm, SvmError> {
    params.validate()?;
    if x.is_empty() {
        return Err(SvmError::Empty);
    }
    if x.len() != labels.len() {
        return Err(SvmError::LengthMismatch {
            rows: x.len(),
            labels: labels.len(),
        });
    }
    let dim = check_dims(x)?;
    let gamma = params.resolve_gamma(x);
    let pair_params = SvmParams {
        gamma: Gamma::Value(gamma),
        ..*params
    };

    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();

    let mut machines = Vec::with_capacity(classes.len() * classes.len().saturating_sub(1) / 2);
    for (a_idx, &a) in classes.iter().enumerate() {
        for &b in &classes[a_idx + 1..] {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (row, &l) in x.iter().zip(labels) {
                if l == a || l == b {
                    xs.push(row.as_ref());
                    ys.push(if l == a { 1.0 } else { -1.0 });
                }
            }
            let machine = train_binary(&xs, &ys, &pair_params)?;
            machines.push(PairMachine {
                positive: a,
                negative: b,
                machine,
            });
        }
    }

    Ok(MulticlassSvm {
        classes,
        dim,
        gamma,
        c_slack: params.c_slack,
        machines,
    })
}

/// Largest KKT residual of a dual solution, measured on freshly computed
/// decision values.
pub fn kkt_violation<R: AsRef<[f64]>>(x: &[R], y: &[f64], sol: &DualSolution, c: f64) -> f64 {
    let n = x.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let f: f64 = (0..n)
            .filter(|&j| sol.alpha[j] > 0.0)
            .map(|j| sol.alpha[j] * y[j] * rbf(x[j].as_ref(), x[i].as_ref(), sol.gamma))
            .sum::<f64>()
            + sol.bias;
        let m = y[i] * f;
        let v = if sol.alpha[i] <= 0.0 {
            (1.0 - m).max(0.0)
        } else if sol.alpha[i] >= c {
            (m - 1.0).max(0.0)
        } else {
            (m - 1.0).abs()
        };
        worst = worst.max(v);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernel_values() {
        assert_eq!(rbf_kernel(&[1.0, 2.0], &[1.0, 2.0], 0.7).unwrap(), 1.0);
        let v = rbf_kernel(&[0.0, 0.0], &[1.0, 0.0], 1.0).unwrap();
        assert!((v - 0.367_879_441_171_442_3).abs() < 1e-12);
        assert!((rbf_kernel(&[0.0], &[5.0], 1e-12).unwrap() - 1.0).abs() < 1e-9);
        assert!(rbf_kernel(&[0.0], &[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn symmetric_pair() {
        let x = [[1.0, 0.5], [-1.0, -0.5]];
        let y = [1.0, -1.0];
        let p = SvmParams {
            gamma: Gamma::Value(0.5),
            ..Default::default()
        };
        let sol = solve_dual(&x, &y, &p).unwrap();
        assert!((sol.alpha[0] - sol.alpha[1]).abs() < 1e-12);
        let m = train_binary(&x, &y, &p).unwrap();
        assert!(m.decision(&x[0]).unwrap() > 0.0);
        assert!(m.decision(&x[1]).unwrap() < 0.0);
        assert!(m.decision(&[0.0, 0.0]).unwrap().abs() < p.tol);
    }

    #[test]
    fn xor_is_learned() {
        let x = [[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]];
        let y = [1.0, 1.0, -1.0, -1.0];
        let p = SvmParams {
            gamma: Gamma::Value(1.0),
            c_slack: 1.0,
            ..Default::default()
        };
        let m = train_binary(&x, &y, &p).unwrap();
        for (xi, yi) in x.iter().zip(y) {
            assert!(m.decision(xi).unwrap() * yi > 0.0);
        }
        // every multiplier sits at C
        assert_eq!(m.dual_coefs.len(), 4);
        for a in &m.dual_coefs {
            assert!((a.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = SvmParams::default();
        assert_eq!(
            train_binary(&[[0.0], [1.0]], &[1.0, 1.0], &p),
            Err(SvmError::SingleClass)
        );
        assert!(matches!(
            train_binary(&[vec![0.0], vec![1.0, 2.0]], &[1.0, -1.0], &p),
            Err(SvmError::DimMismatch { .. })
        ));
        assert_eq!(
            train_binary(&[[0.0], [1.0]], &[1.0, 0.0], &p),
            Err(SvmError::BadLabel(0.0))
        );
        assert_eq!(
            train_multiclass::<Vec<f64>>(&[], &[], &p),
            Err(SvmError::Empty)
        );
        let bad = SvmParams { c_slack: 0.0, ..p };
        assert!(matches!(
            train_binary(&[[0.0], [1.0]], &[1.0, -1.0], &bad),
            Err(SvmError::BadParam(_))
        ));
    }

    #[test]
    fn auto_gamma_rule() {
        // per-feature variances 1 and 0 → mean 0.5, d = 2 → gamma = 1
        let x = [[1.0, 3.0], [-1.0, 3.0]];
        assert!((auto_gamma(&x) - 1.0).abs() < 1e-12);
        let flat = [[2.0, 2.0, 2.0]];
        assert!((auto_gamma(&flat) - 1.0 / 3.0).abs() < 1e-12);
    }

    fn blobs(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<u8>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers = [(-3.0, 0.0), (3.0, 0.0), (0.0, 4.0)];
        let mut x = Vec::new();
        let mut l = Vec::new();
        for i in 0..n {
            let k = i % 3;
            let (cx, cy) = centers[k];
            x.push(vec![
                cx + rng.gen_range(-1.0..1.0),
                cy + rng.gen_range(-1.0..1.0),
            ]);
            l.push(k as u8 + 1);
        }
        (x, l)
    }

    #[test]
    fn multiclass_shapes() {
        let p = SvmParams::default();
        let m = train_multiclass(&[[0.0], [1.0]], &[3, 3], &p).unwrap();
        assert!(m.is_constant());
        assert_eq!(m.predict_class(&[42.0]).unwrap(), 3);

        let m = train_multiclass(&[[0.0], [1.0], [5.0]], &[2, 4, 4], &p).unwrap();
        assert_eq!(m.machines.len(), 1);

        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let l: Vec<u8> = (0..10).map(|i| (i % 5) as u8 + 1).collect();
        let m = train_multiclass(&x, &l, &p).unwrap();
        assert_eq!(m.classes, vec![1, 2, 3, 4, 5]);
        assert_eq!(m.machines.len(), 10);
    }

    #[test]
    fn two_class_model_follows_decision_sign() {
        let (x, l) = blobs(30, 1);
        let keep: Vec<usize> = (0..30).filter(|&i| l[i] != 3).collect();
        let xs: Vec<&Vec<f64>> = keep.iter().map(|&i| &x[i]).collect();
        let ls: Vec<u8> = keep.iter().map(|&i| l[i]).collect();
        let m = train_multiclass(&xs, &ls, &SvmParams::default()).unwrap();
        for probe in [[-2.0, 0.5], [2.5, -0.5], [0.1, 0.0]] {
            let d = m.machines[0].machine.decision(&probe).unwrap();
            let expect = if d > 0.0 { 1 } else { 2 };
            assert_eq!(m.predict_class(&probe).unwrap(), expect);
        }
    }

    #[test]
    fn three_way_vote_cycle_breaks_to_lowest() {
        // Hand-built machines: 1 beats 2, 2 beats 3, 3 beats 1 for every input.
        let constant = |sign: f64| BinarySvm {
            support_vectors: vec![vec![0.0]],
            dual_coefs: vec![0.0],
            bias: sign,
            gamma: 1.0,
        };
        let m = MulticlassSvm {
            classes: vec![1, 2, 3],
            dim: 1,
            gamma: 1.0,
            c_slack: 1.0,
            machines: vec![
                PairMachine {
                    positive: 1,
                    negative: 2,
                    machine: constant(1.0),
                },
                PairMachine {
                    positive: 1,
                    negative: 3,
                    machine: constant(-1.0),
                },
                PairMachine {
                    positive: 2,
                    negative: 3,
                    machine: constant(1.0),
                },
            ],
        };
        // enumerate: every class collects exactly one vote
        assert_eq!(m.predict_class(&[0.3]).unwrap(), 1);
        let m2 = MulticlassSvm {
            classes: vec![2, 3, 5],
            ..m.clone()
        };
        let m2 = MulticlassSvm {
            machines: vec![
                PairMachine {
                    positive: 2,
                    negative: 3,
                    machine: constant(-1.0),
                },
                PairMachine {
                    positive: 2,
                    negative: 5,
                    machine: constant(1.0),
                },
                PairMachine {
                    positive: 3,
                    negative: 5,
                    machine: constant(-1.0),
                },
            ],
            ..m2
        };
        assert_eq!(m2.predict_class(&[0.3]).unwrap(), 2);
    }

    #[test]
    fn blobs_are_separated_and_kkt_holds() {
        let (x, l) = blobs(60, 5);
        let p = SvmParams::default();
        let m = train_multiclass(&x, &l, &p).unwrap();
        for (xi, &li) in x.iter().zip(&l) {
            assert_eq!(m.predict_class(xi).unwrap(), li);
        }
        let y: Vec<f64> = l.iter().map(|&c| if c == 1 { 1.0 } else { -1.0 }).collect();
        let sol = solve_dual(&x, &y, &p).unwrap();
        assert!(sol.converged);
        assert!(sol.alpha.iter().all(|&a| (0.0..=p.c_slack).contains(&a)));
        assert!(kkt_violation(&x, &y, &sol, p.c_slack) <= p.tol);
    }

    #[test]
    fn on_demand_gram_matches_cached() {
        let (x, l) = blobs(12, 9);
        let gram = Gram::new(&x, 0.3);
        let lazy: Gram<'_, Vec<f64>> = Gram::OnDemand { x: &x, gamma: 0.3 };
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for i in 0..x.len() {
            gram.row_into(i, &mut a);
            lazy.row_into(i, &mut b);
            assert_eq!(a, b);
        }
        let _ = l;
    }

    #[test]
    fn json_round_trip_is_exact() {
        let (x, l) = blobs(30, 2);
        let m = train_multiclass(&x, &l, &SvmParams::default()).unwrap();
        let back = MulticlassSvm::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
