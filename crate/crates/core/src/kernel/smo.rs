//! Simplified sequential minimal optimization for the soft-margin SVM dual.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{GlcError, Result};
use crate::kernel::{eval_unchecked, KernelConfig, SupportVectorSet};
use crate::linear::{ClassRoles, Role};

/// Multipliers at or below this are treated as zero.
pub const ALPHA_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub kernel: KernelConfig,
    /// Box constraint `C`.
    pub c: f64,
    pub tol: f64,
    /// Consecutive sweeps without an update before stopping.
    pub max_passes: usize,
    /// Hard cap on sweeps; hitting it clears `converged`.
    pub max_sweeps: usize,
    pub seed: u64,
}

impl SvmConfig {
    pub fn new(kernel: KernelConfig) -> Self {
        SvmConfig {
            kernel,
            c: 1.0,
            tol: 1e-3,
            max_passes: 200,
            max_sweeps: 20_000,
            seed: 0,
        }
    }
}

/// Trains the dual with class 1 as `y = −1` and class 2 as `y = +1`, and
/// keeps the points with `α > 1e-8` as support vectors.
pub fn fit_svm(d: &Dataset, roles: &ClassRoles, cfg: &SvmConfig) -> Result<SupportVectorSet> {
    if !(cfg.c > 0.0) || !(cfg.tol > 0.0) {
        return Err(GlcError::InvalidParameter("SVM C and tol must be positive".into()));
    }
    let y: Vec<f64> = d
        .labels()
        .iter()
        .map(|l| match roles.role_of(l) {
            Some(Role::Class1) => Ok(-1.0),
            Some(Role::Class2) => Ok(1.0),
            None => Err(GlcError::InvalidParameter(format!("label {l:?} has no class role"))),
        })
        .collect::<Result<_>>()?;
    if y.iter().all(|&v| v == y[0]) {
        return Err(GlcError::SingleClass);
    }
    let gamma = cfg.kernel.validate(d.n_attributes())?;
    let m = d.len();
    let k = &cfg.kernel;
    let mut gram = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let v = eval_unchecked(k.kind, gamma, k.degree, k.coef, d.point(i), d.point(j));
            gram[i * m + j] = v;
            gram[j * m + i] = v;
        }
    }

    let c = cfg.c;
    let mut alpha = vec![0.0; m];
    let mut b = 0.0;
    // errors E_i = f(x_i) − y_i with f = Σ α_j y_j K_ij + b
    let mut err: Vec<f64> = y.iter().map(|v| -v).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut passes = 0;
    let mut sweeps = 0;
    while passes < cfg.max_passes && sweeps < cfg.max_sweeps {
        sweeps += 1;
        let mut changed = 0;
        for i in 0..m {
            let ei = err[i];
            let r = y[i] * ei;
            if !((r < -cfg.tol && alpha[i] < c) || (r > cfg.tol && alpha[i] > 0.0)) {
                continue;
            }
            let mut j = rng.gen_range(0..m - 1);
            if j >= i {
                j += 1;
            }
            let ej = err[j];
            let (ai_old, aj_old) = (alpha[i], alpha[j]);
            let (lo, hi) = if y[i] != y[j] {
                ((aj_old - ai_old).max(0.0), (c + aj_old - ai_old).min(c))
            } else {
                ((ai_old + aj_old - c).max(0.0), (ai_old + aj_old).min(c))
            };
            if lo >= hi {
                continue;
            }
            let (kii, kjj, kij) = (gram[i * m + i], gram[j * m + j], gram[i * m + j]);
            let eta = 2.0 * kij - kii - kjj;
            if eta >= 0.0 {
                continue;
            }
            let aj = (aj_old - y[j] * (ei - ej) / eta).clamp(lo, hi);
            if (aj - aj_old).abs() < 1e-5 {
                continue;
            }
            let ai = ai_old + y[i] * y[j] * (aj_old - aj);
            let b1 = b - ei - y[i] * (ai - ai_old) * kii - y[j] * (aj - aj_old) * kij;
            let b2 = b - ej - y[i] * (ai - ai_old) * kij - y[j] * (aj - aj_old) * kjj;
            let b_new = if ai > 0.0 && ai < c {
                b1
            } else if aj > 0.0 && aj < c {
                b2
            } else {
                0.5 * (b1 + b2)
            };
            let (di, dj, db) = (y[i] * (ai - ai_old), y[j] * (aj - aj_old), b_new - b);
            for (t, e) in err.iter_mut().enumerate() {
                *e += di * gram[i * m + t] + dj * gram[j * m + t] + db;
            }
            alpha[i] = ai;
            alpha[j] = aj;
            b = b_new;
            changed += 1;
        }
        if changed == 0 {
            passes += 1;
        } else {
            passes = 0;
        }
    }

    let keep: Vec<usize> = (0..m).filter(|&i| alpha[i] > ALPHA_EPS).collect();
    if keep.is_empty() {
        return Err(GlcError::EmptySupportVectors);
    }
    Ok(SupportVectorSet {
        vectors: keep.iter().map(|&i| d.point(i).to_vec()).collect(),
        alphas: keep.iter().map(|&i| alpha[i]).collect(),
        signs: keep.iter().map(|&i| y[i]).collect(),
        kernel: cfg.kernel,
        gamma,
        bias: b,
        converged: passes >= cfg.max_passes,
    })
}
