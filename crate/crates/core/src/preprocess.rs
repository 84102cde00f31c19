//! Per-fold Yeo-Johnson power transformation followed by standardization.
//!
//! Parameters are fit on training data only and then applied unchanged to
//! held-out data. Each feature gets its own power parameter, estimated by
//! profile maximum likelihood over λ ∈ [−5, 5] with a golden-section search.
//! Standardization uses the biased (denominator-N) standard deviation; a
//! zero-variance feature is marked with std = 0 and transforms to an
//! all-zero column so downstream training can proceed.

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::{Error, Result};

/// Search interval for the power parameter.
pub const LAMBDA_MIN: f64 = -5.0;
pub const LAMBDA_MAX: f64 = 5.0;

/// Golden-section tolerance on λ.
const LAMBDA_TOL: f64 = 1e-6;

/// Exponent cap: beyond this, (x+1)^λ is replaced by a large finite value so
/// the likelihood search stays well-defined at the interval edges.
const EXP_CAP: f64 = 700.0;

/// Standard deviations below this are recorded as exactly zero, marking a
/// degenerate feature.
const DEGENERATE_STD: f64 = 1e-12;

/// Fitted per-feature transform parameters: power λ, then post-transform
/// training mean and (biased) standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformParams {
    pub lambdas: Vec<f64>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl TransformParams {
    pub fn n_features(&self) -> usize {
        self.lambdas.len()
    }
}

/// (exp(l·u) − 1) / l with the exponent capped, where u = ln(1+|x|) ≥ 0.
/// `exp_m1` keeps the expression accurate as l → 0.
fn scaled_power(l: f64, u: f64) -> f64 {
    let t = l * u;
    if t > EXP_CAP {
        EXP_CAP.exp() / l
    } else {
        t.exp_m1() / l
    }
}

/// The Yeo-Johnson transform ψ(x, λ), monotone increasing in x:
///
/// - x ≥ 0, λ ≠ 0: ((x+1)^λ − 1)/λ
/// - x ≥ 0, λ = 0: ln(x+1)
/// - x < 0, λ ≠ 2: −((−x+1)^(2−λ) − 1)/(2−λ)
/// - x < 0, λ = 2: −ln(−x+1)
pub fn yeo_johnson(x: f64, lambda: f64) -> f64 {
    if lambda == 1.0 {
        // both branches reduce to the identity
        return x;
    }
    if x >= 0.0 {
        if lambda == 0.0 {
            x.ln_1p()
        } else {
            scaled_power(lambda, x.ln_1p())
        }
    } else if lambda == 2.0 {
        -(-x).ln_1p()
    } else {
        -scaled_power(2.0 - lambda, (-x).ln_1p())
    }
}

/// Inverts ψ(·, λ) by bisection. The transform is strictly monotone, so a
/// bracket found by doubling always contains the preimage.
pub fn yeo_johnson_inverse(y: f64, lambda: f64) -> f64 {
    let (mut lo, mut hi) = (-1.0, 1.0);
    while yeo_johnson(lo, lambda) > y {
        lo *= 2.0;
    }
    while yeo_johnson(hi, lambda) < y {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-12 * hi.abs().max(lo.abs()).max(1.0) {
            break;
        }
        if yeo_johnson(mid, lambda) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Profile log-likelihood of λ for one column:
/// LL(λ) = −(N/2)·ln σ̂²(λ) + (λ−1)·Σ sign(xᵢ)·ln(|xᵢ|+1)
/// where σ̂² is the biased variance of the transformed column.
fn profile_log_likelihood(column: &[f64], lambda: f64) -> f64 {
    let n = column.len() as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &x in column {
        let t = yeo_johnson(x, lambda);
        sum += t;
        sum_sq += t * t;
    }
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    if var <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let jacobian: f64 = column
        .iter()
        .map(|&x| x.signum() * x.abs().ln_1p())
        .sum();
    -0.5 * n * var.ln() + (lambda - 1.0) * jacobian
}

/// Maximizes the profile log-likelihood over [−5, 5] by golden-section
/// search to a tolerance of 1e-6 in λ. A constant column returns λ = 1:
/// the transform is irrelevant there and standardization flags the
/// degeneracy.
pub fn fit_lambda(column: &[f64]) -> Result<f64> {
    if column.len() < 2 {
        return Err(Error::Invalid(
            "fit_lambda needs at least 2 values".into(),
        ));
    }
    if let Some(bad) = column.iter().find(|v| !v.is_finite()) {
        return Err(Error::Invalid(format!("non-finite value {bad}")));
    }
    let first = column[0];
    if column.iter().all(|&v| v == first) {
        return Ok(1.0);
    }

    // golden-section maximization
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (LAMBDA_MIN, LAMBDA_MAX);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = profile_log_likelihood(column, c);
    let mut fd = profile_log_likelihood(column, d);
    while b - a > LAMBDA_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = profile_log_likelihood(column, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = profile_log_likelihood(column, d);
        }
    }
    Ok(0.5 * (a + b))
}

fn fit_column(column: &[f64]) -> Result<(f64, f64, f64)> {
    let lambda = fit_lambda(column)?;
    let n = column.len() as f64;
    let transformed: Vec<f64> = column.iter().map(|&x| yeo_johnson(x, lambda)).collect();
    let mean = transformed.iter().sum::<f64>() / n;
    let var = transformed.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
    let std = if var.sqrt() < DEGENERATE_STD {
        0.0
    } else {
        var.sqrt()
    };
    Ok((lambda, mean, std))
}

/// Fits one λ/mean/std triple per column of the training matrix.
pub fn fit(train: ArrayView2<'_, f64>) -> Result<TransformParams> {
    if train.nrows() < 2 {
        return Err(Error::Invalid("fit needs at least 2 rows".into()));
    }
    let columns: Vec<Vec<f64>> = (0..train.ncols())
        .map(|j| train.column(j).to_vec())
        .collect();

    #[cfg(feature = "parallel")]
    let fitted: Result<Vec<(f64, f64, f64)>> = {
        use rayon::prelude::*;
        columns.par_iter().map(|c| fit_column(c)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let fitted: Result<Vec<(f64, f64, f64)>> =
        columns.iter().map(|c| fit_column(c)).collect();

    let fitted = fitted?;
    Ok(TransformParams {
        lambdas: fitted.iter().map(|t| t.0).collect(),
        means: fitted.iter().map(|t| t.1).collect(),
        stds: fitted.iter().map(|t| t.2).collect(),
    })
}

/// Applies the fitted transform: ψ(x, λⱼ) standardized by the training
/// mean/std. Degenerate features (std = 0) map to an all-zero column.
pub fn transform(data: ArrayView2<'_, f64>, params: &TransformParams) -> Result<Array2<f64>> {
    if data.ncols() != params.n_features() {
        return Err(Error::Dimension(format!(
            "data has {} columns, params expect {}",
            data.ncols(),
            params.n_features()
        )));
    }
    let mut out = Array2::zeros(data.raw_dim());
    for j in 0..data.ncols() {
        let (lambda, mean, std) = (params.lambdas[j], params.means[j], params.stds[j]);
        if std == 0.0 {
            continue;
        }
        for i in 0..data.nrows() {
            out[[i, j]] = (yeo_johnson(data[[i, j]], lambda) - mean) / std;
        }
    }
    Ok(out)
}

/// Convenience: transform a single column vector viewed as one feature.
pub fn transform_column(column: ArrayView1<'_, f64>, lambda: f64) -> Vec<f64> {
    column.iter().map(|&x| yeo_johnson(x, lambda)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr2, Array2};
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn identity_at_lambda_one() {
        for x in [-3.5, -1.0, 0.0, 0.25, 3.0, 1234.5] {
            assert_eq!(yeo_johnson(x, 1.0), x);
        }
    }

    #[test]
    fn zero_is_a_fixed_point() {
        for lambda in [-5.0, -0.7, 0.0, 1.0, 2.0, 4.9] {
            assert_eq!(yeo_johnson(0.0, lambda), 0.0);
        }
    }

    #[test]
    fn negative_branch_hand_value() {
        let got = yeo_johnson(-1.0, 2.0);
        assert!((got - (-std::f64::consts::LN_2)).abs() < 1e-12, "{got}");
    }

    #[test]
    fn branch_continuity() {
        for x in [0.0, 0.3, 2.0, 50.0, 900.0] {
            let limit = yeo_johnson(x, 0.0);
            assert!((yeo_johnson(x, 1e-8) - limit).abs() < 1e-6);
            assert!((yeo_johnson(x, -1e-8) - limit).abs() < 1e-6);
        }
        for x in [-0.3, -2.0, -50.0, -900.0] {
            let limit = yeo_johnson(x, 2.0);
            assert!((yeo_johnson(x, 2.0 + 1e-8) - limit).abs() < 1e-6);
            assert!((yeo_johnson(x, 2.0 - 1e-8) - limit).abs() < 1e-6);
        }
    }

    #[test]
    fn capped_exponent_stays_finite() {
        let v = yeo_johnson(1e300, 5.0);
        assert!(v.is_finite());
        let w = yeo_johnson(-1e300, -5.0);
        assert!(w.is_finite());
    }

    #[test]
    fn inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let x: f64 = rng.random_range(-100.0..100.0);
            let lambda: f64 = rng.random_range(-5.0..5.0);
            let y = yeo_johnson(x, lambda);
            let back = yeo_johnson_inverse(y, lambda);
            assert!(
                (back - x).abs() < 1e-9,
                "x={x} lambda={lambda} back={back}"
            );
        }
    }

    proptest! {
        #[test]
        fn monotone_in_x(
            x1 in -20.0f64..20.0,
            dx in 1e-6f64..10.0,
            lambda in -2.0f64..2.0,
        ) {
            let x2 = x1 + dx;
            prop_assert!(yeo_johnson(x1, lambda) < yeo_johnson(x2, lambda));
        }
    }

    #[test]
    fn lambda_near_one_for_normal_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let column: Vec<f64> = (0..1000)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let lambda = fit_lambda(&column).unwrap();
        assert!((0.7..=1.3).contains(&lambda), "lambda = {lambda}");
    }

    #[test]
    fn constant_column_returns_one() {
        assert_eq!(fit_lambda(&[5.0, 5.0, 5.0, 5.0]).unwrap(), 1.0);
    }

    #[test]
    fn skewed_column_shrinks_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let column: Vec<f64> = (0..800)
            .map(|_| rng.sample::<f64, _>(StandardNormal).exp() + 0.1)
            .collect();
        let lambda = fit_lambda(&column).unwrap();
        assert!(lambda < 0.5, "lambda = {lambda}");
        assert!(
            profile_log_likelihood(&column, lambda)
                >= profile_log_likelihood(&column, 1.0)
        );
    }

    #[test]
    fn fit_then_transform_standardizes_training_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data = Array2::from_shape_fn((200, 4), |(_, j)| {
            let z: f64 = rng.sample(StandardNormal);
            (z + j as f64).exp() * 0.3 + j as f64
        });
        let params = fit(data.view()).unwrap();
        let t = transform(data.view(), &params).unwrap();
        for j in 0..4 {
            let col = t.column(j);
            let mean = col.sum() / 200.0;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 200.0;
            assert!(mean.abs() < 1e-10, "mean {mean}");
            assert!((var.sqrt() - 1.0).abs() < 1e-8, "std {}", var.sqrt());
        }
    }

    #[test]
    fn identical_rows_are_degenerate() {
        let data = arr2(&[[2.0, -1.0, 0.5], [2.0, -1.0, 0.5]]);
        let params = fit(data.view()).unwrap();
        assert_eq!(params.stds, vec![0.0, 0.0, 0.0]);
        assert_eq!(params.lambdas, vec![1.0, 1.0, 1.0]);
        let t = transform(data.view(), &params).unwrap();
        assert!(t.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn held_out_cell_at_training_mean_maps_near_zero() {
        let data = arr2(&[[1.0], [2.0], [3.0], [4.0], [10.0]]);
        let params = fit(data.view()).unwrap();
        // invert the standardization: the raw value whose transform equals
        // the training mean must map to ~0
        let raw = yeo_johnson_inverse(params.means[0], params.lambdas[0]);
        let test = arr2(&[[raw]]);
        let t = transform(test.view(), &params).unwrap();
        assert!(t[[0, 0]].abs() < 1e-6, "{}", t[[0, 0]]);
    }

    #[test]
    fn transform_checks_dimensions() {
        let data = arr2(&[[1.0, 2.0]]);
        let params = TransformParams {
            lambdas: vec![1.0],
            means: vec![0.0],
            stds: vec![1.0],
        };
        assert!(matches!(
            transform(data.view(), &params),
            Err(Error::Dimension(_))
        ));
    }
}
