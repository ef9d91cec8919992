//! Covariance estimators for noisy high-frequency panels.
//!
//! Pre-averaging splits the n one-step returns into m = floor(n / 2k)
//! non-overlapping windows of length 2k and averages within each half
//! window; the difference of half-window means is the pre-averaged return.
//! Averaging shrinks the microstructure noise by a factor ~ k while keeping
//! an order-one share of the diffusion signal, so sums of outer products of
//! pre-averaged returns estimate (a known multiple of) the integrated
//! covolatility matrix.

use crate::error::Error;
use crate::linalg::{jacobi_eigenvalues, Mat};
use crate::rng::{stream_rng, Stream};
use crate::simulate::{NoiseSpec, PricePanel};
use rand::Rng;
use rand_distr::StandardNormal;

/// Pre-averaged returns: column i (0-based) is the i-th window's vector
/// difference of half-window price means, p x m.
#[derive(Clone, Debug)]
pub struct PavReturns {
    values: Mat,
    k: usize,
}

impl PavReturns {
    /// Wrap an existing return matrix; used by tests and by estimators that
    /// post-process returns.
    pub fn from_parts(values: Mat, k: usize) -> Result<Self, Error> {
        if values.ncols() == 0 || values.nrows() == 0 {
            return Err(Error::EmptySpectrum);
        }
        if k < 1 {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: "window half-length must be at least 1".into(),
            });
        }
        Ok(PavReturns { values, k })
    }

    pub fn values(&self) -> &Mat {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.values.ncols()
    }

    pub fn p(&self) -> usize {
        self.values.nrows()
    }

    /// Squared Euclidean norm of each return column.
    pub fn column_norms_sq(&self) -> Vec<f64> {
        let mut norms = vec![0.0; self.m()];
        for j in 0..self.p() {
            let row = self.values.row(j);
            for (i, v) in row.iter().enumerate() {
                norms[i] += v * v;
            }
        }
        norms
    }
}

/// Window-length rule mapping n to the half-window k.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KRule {
    /// k = floor(theta * sqrt(n)); signal and averaged noise balance.
    Sqrt { theta: f64 },
    /// k = floor(theta * n^alpha) with alpha in (1/2, 1); averaged noise
    /// becomes negligible relative to the signal.
    Power { theta: f64, alpha: f64 },
}

/// Panel geometry plus window rule; resolves and validates k, m, y = p/m.
#[derive(Clone, Copy, Debug)]
pub struct EstimatorConfig {
    p: usize,
    n: usize,
    k: usize,
    m: usize,
}

impl EstimatorConfig {
    pub fn new(p: usize, n: usize, rule: KRule) -> Result<Self, Error> {
        if p == 0 {
            return Err(Error::InvalidParameter {
                name: "p",
                reason: "dimension must be positive".into(),
            });
        }
        let k = match rule {
            KRule::Sqrt { theta } => {
                if !(theta > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "theta",
                        reason: format!("window scale {theta} must be positive"),
                    });
                }
                (theta * (n as f64).sqrt()).floor() as usize
            }
            KRule::Power { theta, alpha } => {
                if !(theta > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "theta",
                        reason: format!("window scale {theta} must be positive"),
                    });
                }
                if !(alpha > 0.5 && alpha < 1.0) {
                    return Err(Error::InvalidParameter {
                        name: "alpha",
                        reason: format!("window exponent {alpha} must lie in (1/2, 1)"),
                    });
                }
                (theta * (n as f64).powf(alpha)).floor() as usize
            }
        };
        if k < 2 {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: format!("resolved window half-length {k} < 2"),
            });
        }
        if 2 * k > n {
            return Err(Error::WindowTooLong { two_k: 2 * k, n });
        }
        let m = n / (2 * k);
        if m < 2 {
            return Err(Error::InvalidParameter {
                name: "m",
                reason: format!("resolved window count {m} < 2"),
            });
        }
        Ok(EstimatorConfig { p, n, k, m })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Aspect ratio p / m of the pre-averaged panel.
    pub fn y(&self) -> f64 {
        self.p as f64 / self.m as f64
    }
}

fn check_window(observed: &Mat, k: usize) -> Result<(usize, usize, usize), Error> {
    let p = observed.nrows();
    let n = observed.ncols().saturating_sub(1);
    if p == 0 || n == 0 {
        return Err(Error::EmptySpectrum);
    }
    if k < 1 || 2 * k > n {
        return Err(Error::WindowTooLong { two_k: 2 * k, n });
    }
    Ok((p, n, n / (2 * k)))
}

/// Pre-averaged returns via half-window block means. Observations beyond
/// 2 k m steps are discarded.
pub fn pav_returns(observed: &Mat, k: usize) -> Result<PavReturns, Error> {
    let (p, _, m) = check_window(observed, k)?;
    let inv_k = 1.0 / k as f64;
    let mut values = Mat::zeros(p, m);
    for j in 0..p {
        let prices = observed.row(j);
        for i in 1..=m {
            // Half windows i' = 2i-1 and 2i cover price indices
            // (i'-1)k .. i'k - 1.
            let lo1 = (2 * i - 2) * k;
            let lo2 = (2 * i - 1) * k;
            let mean1: f64 = prices[lo1..lo1 + k].iter().sum::<f64>() * inv_k;
            let mean2: f64 = prices[lo2..lo2 + k].iter().sum::<f64>() * inv_k;
            values.set(j, i - 1, mean2 - mean1);
        }
    }
    PavReturns::from_parts(values, k)
}

/// The same pre-averaged returns written as a triangular kernel over
/// one-step returns: sum over |j| < k of (1 - |j|/k) * one-step return at
/// offset j from the window center. Agrees with `pav_returns` to roundoff;
/// kept as an independent implementation for cross-checking.
pub fn pav_returns_kernel(observed: &Mat, k: usize) -> Result<PavReturns, Error> {
    let (p, _, m) = check_window(observed, k)?;
    let mut values = Mat::zeros(p, m);
    for j in 0..p {
        let prices = observed.row(j);
        for i in 1..=m {
            let center = (2 * i - 1) * k;
            let mut acc = 0.0;
            for off in -(k as i64 - 1)..=(k as i64 - 1) {
                let weight = 1.0 - off.unsigned_abs() as f64 / k as f64;
                let l = (center as i64 + off) as usize;
                acc += weight * (prices[l] - prices[l - 1]);
            }
            values.set(j, i - 1, acc);
        }
    }
    PavReturns::from_parts(values, k)
}

/// Sum of outer products of pre-averaged returns, p x p symmetric PSD.
pub fn pav_matrix(observed: &Mat, k: usize) -> Result<Mat, Error> {
    let returns = pav_returns(observed, k)?;
    Ok(returns.values().matmul_transb(returns.values()))
}

/// Time-variation-adjusted estimator from pre-averaged returns:
/// 3 * (average squared return norm) * sum of self-normalized outer
/// products. The self-normalization cancels the common volatility factor;
/// the leading scalar restores the integrated scale.
pub fn tva_from_returns(
    returns: &PavReturns,
    drop_degenerate: bool,
) -> Result<(Mat, usize), Error> {
    let p = returns.p();
    let m = returns.m();
    let norms = returns.column_norms_sq();
    let mut dropped = 0usize;
    for (i, nm) in norms.iter().enumerate() {
        if *nm == 0.0 {
            if drop_degenerate {
                dropped += 1;
            } else {
                return Err(Error::DegenerateReturn { index: i });
            }
        }
    }
    let kept = m - dropped;
    if kept == 0 {
        return Err(Error::DegenerateReturn { index: 0 });
    }

    let mut normalized = Mat::zeros(p, kept);
    let mut total_norm = 0.0;
    let mut col = 0usize;
    for i in 0..m {
        if norms[i] == 0.0 {
            continue;
        }
        total_norm += norms[i];
        let inv = 1.0 / norms[i].sqrt();
        for j in 0..p {
            normalized.set(j, col, returns.values().at(j, i) * inv);
        }
        col += 1;
    }
    let shape = normalized.matmul_transb(&normalized);
    let scale = 3.0 * total_norm / kept as f64;
    Ok((shape.scaled(scale), dropped))
}

/// Time-variation-adjusted covariance estimator from a price panel.
pub fn tva_matrix(observed: &Mat, k: usize) -> Result<Mat, Error> {
    let returns = pav_returns(observed, k)?;
    tva_from_returns(&returns, false).map(|(m, _)| m)
}

/// Plain realized covariance: sum of outer products of one-step returns.
pub fn realized_covariance(observed: &Mat) -> Result<Mat, Error> {
    let p = observed.nrows();
    let n = observed.ncols().saturating_sub(1);
    if p == 0 || n == 0 {
        return Err(Error::EmptySpectrum);
    }
    let mut diffs = Mat::zeros(p, n);
    for j in 0..p {
        let prices = observed.row(j);
        let drow = diffs.row_mut(j);
        for i in 0..n {
            drow[i] = prices[i + 1] - prices[i];
        }
    }
    Ok(diffs.matmul_transb(&diffs))
}

/// Per-asset noise variance estimate: sum of squared one-step returns over
/// 2n. One-step returns are noise-dominated at high frequency, and each
/// noise increment contributes twice its variance.
pub fn estimate_noise_variance(observed: &Mat) -> Result<Vec<f64>, Error> {
    let p = observed.nrows();
    let n = observed.ncols().saturating_sub(1);
    if p == 0 || n == 0 {
        return Err(Error::EmptySpectrum);
    }
    let mut out = Vec::with_capacity(p);
    for j in 0..p {
        let prices = observed.row(j);
        let mut acc = 0.0;
        for i in 0..n {
            let d = prices[i + 1] - prices[i];
            acc += d * d;
        }
        out.push(acc / (2.0 * n as f64));
    }
    Ok(out)
}

/// Top up noisier assets so every asset reaches the largest noise variance:
/// adds independent N(0, d_max^2 - d_j^2) to asset j's observations. Assets
/// already at the maximum (gap <= 0 within -1e-12) are left untouched.
pub fn equalize_noise(
    panel: &PricePanel,
    variances: &[f64],
    seed: u64,
) -> Result<PricePanel, Error> {
    let p = panel.p();
    if variances.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "{} variances for p = {p}",
            variances.len()
        )));
    }
    if variances.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParameter {
            name: "variances",
            reason: "noise variances must be finite and nonnegative".into(),
        });
    }
    let d_max = variances.iter().cloned().fold(0.0f64, f64::max);
    let mut observed = panel.observed().clone();
    let cols = observed.ncols();
    for j in 0..p {
        let gap = d_max - variances[j];
        if gap < -1e-12 {
            return Err(Error::NegativeVarianceGap { gap, index: j });
        }
        if gap <= 0.0 {
            continue;
        }
        let sd = gap.sqrt();
        let mut rng = stream_rng(seed, Stream::EqualizeNoise, j as u64);
        let row = observed.row_mut(j);
        for v in row.iter_mut().take(cols) {
            *v += sd * rng.sample::<f64, _>(StandardNormal);
        }
    }
    let spec = NoiseSpec::new(vec![d_max; p], panel.noise_model().temporal())?;
    Ok(PricePanel::from_parts(
        panel.latent().clone(),
        observed,
        spec,
    ))
}

/// Eigenvalues of a symmetric matrix, ascending. Rejects matrices whose
/// asymmetry exceeds roundoff scale, symmetrizes the rest, and checks the
/// eigenvalue sum against the trace.
pub fn symmetric_eigenvalues(a: &Mat) -> Result<Vec<f64>, Error> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix is not square",
            a.nrows(),
            a.ncols()
        )));
    }
    if let Some((i, j)) = a.first_non_finite() {
        return Err(Error::NonFiniteEntry { row: i, col: j });
    }
    let scale = a.max_abs();
    let asym = a.max_asymmetry();
    if asym > 1e-8 * scale {
        return Err(Error::NotSymmetric {
            asym,
            tol: 1e-8 * scale,
        });
    }
    let sym = a.symmetrized();
    let eig = jacobi_eigenvalues(&sym, 1e-12)?;
    let sum: f64 = eig.iter().sum();
    let fro = sym.frobenius_norm();
    let gap = (sum - sym.trace()).abs();
    if gap > 1e-9 * fro.max(f64::MIN_POSITIVE) {
        return Err(Error::NonConvergence {
            iterations: 0,
            residual: gap,
        });
    }
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{esd_from_eigenvalues, kolmogorov_distance};
    use crate::simulate::{
        add_noise, build_covol_factor, simulate_prices, SpectrumSpec, VolPath,
    };

    fn ramp_panel() -> Mat {
        Mat::from_fn(1, 9, |_, i| i as f64)
    }

    #[test]
    fn pav_ramp_both_forms() {
        // Price = time index, k = 2: every pre-averaged return is 2.
        let y = ramp_panel();
        let block = pav_returns(&y, 2).unwrap();
        let kernel = pav_returns_kernel(&y, 2).unwrap();
        assert_eq!(block.m(), 2);
        for i in 0..2 {
            assert!((block.values().at(0, i) - 2.0).abs() < 1e-14);
            assert!((kernel.values().at(0, i) - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pav_constant_is_zero() {
        let y = Mat::from_fn(2, 20, |_, _| 5.0);
        let r = pav_returns(&y, 3).unwrap();
        assert_eq!(r.values().max_abs(), 0.0);
    }

    #[test]
    fn pav_window_too_long() {
        let y = ramp_panel();
        assert!(matches!(
            pav_returns(&y, 5),
            Err(Error::WindowTooLong { .. })
        ));
    }

    #[test]
    fn pav_forms_agree_on_random_panel() {
        let f = build_covol_factor(5, &SpectrumSpec::Beta13, false, 21).unwrap();
        let vol = VolPath::constant(1.0, 400);
        let x = simulate_prices(&f, &vol, &[0.0; 5], 21).unwrap();
        for k in [2usize, 7, 40] {
            let a = pav_returns(&x, k).unwrap();
            let b = pav_returns_kernel(&x, k).unwrap();
            let scale = a.values().max_abs().max(1e-300);
            for j in 0..5 {
                for i in 0..a.m() {
                    let rel = (a.values().at(j, i) - b.values().at(j, i)).abs() / scale;
                    assert!(rel < 1e-10, "forms disagree at ({j},{i}): {rel}");
                }
            }
        }
    }

    #[test]
    fn pav_matrix_is_outer_product_sum() {
        let f = build_covol_factor(4, &SpectrumSpec::Beta13, false, 22).unwrap();
        let vol = VolPath::constant(1.0, 200);
        let x = simulate_prices(&f, &vol, &[0.0; 4], 22).unwrap();
        let r = pav_returns(&x, 5).unwrap();
        let direct = pav_matrix(&x, 5).unwrap();
        let mut manual = Mat::zeros(4, 4);
        for i in 0..r.m() {
            for a in 0..4 {
                for b in 0..4 {
                    manual.add_at(a, b, r.values().at(a, i) * r.values().at(b, i));
                }
            }
        }
        for a in 0..4 {
            for b in 0..4 {
                assert!((direct.at(a, b) - manual.at(a, b)).abs() < 1e-12);
            }
        }
        assert!(direct.max_asymmetry() < 1e-12 * direct.max_abs());
    }

    #[test]
    fn pav_matrix_rank_one_panel() {
        // Only asset 0 moves, linearly: every pre-averaged return is c e_0,
        // so the estimator is m c^2 at (0,0) and zero elsewhere.
        let p = 3;
        let n = 24;
        let k = 3;
        let y = Mat::from_fn(p, n + 1, |j, i| if j == 0 { 0.5 * i as f64 } else { 1.0 });
        let m = n / (2 * k);
        let pav = pav_matrix(&y, k).unwrap();
        let c = 0.5 * k as f64;
        assert!((pav.at(0, 0) - m as f64 * c * c).abs() < 1e-12);
        for a in 0..p {
            for b in 0..p {
                if (a, b) != (0, 0) {
                    assert_eq!(pav.at(a, b), 0.0);
                }
            }
        }
    }

    #[test]
    fn tva_rank_one_panel() {
        let p = 3;
        let n = 24;
        let k = 3;
        let y = Mat::from_fn(p, n + 1, |j, i| if j == 0 { 0.5 * i as f64 } else { 1.0 });
        let m = n / (2 * k);
        let c = 0.5 * k as f64;
        let tva = tva_matrix(&y, k).unwrap();
        // 3 * (m c^2 / m) * (m e00) = 3 m c^2 e00.
        assert!((tva.at(0, 0) - 3.0 * m as f64 * c * c).abs() < 1e-10);
        assert!(tva.at(1, 1).abs() < 1e-12);
    }

    #[test]
    fn tva_trace_identity() {
        let f = build_covol_factor(6, &SpectrumSpec::Beta13, false, 23).unwrap();
        let vol = VolPath::constant(0.5, 600);
        let x = simulate_prices(&f, &vol, &[0.0; 6], 23).unwrap();
        let r = pav_returns(&x, 10).unwrap();
        let (tva, dropped) = tva_from_returns(&r, false).unwrap();
        assert_eq!(dropped, 0);
        let total: f64 = r.column_norms_sq().iter().sum();
        assert!((tva.trace() - 3.0 * total).abs() < 1e-10 * tva.trace().abs());
    }

    #[test]
    fn tva_degenerate_column_detected_and_droppable() {
        // k = 1 gives returns (Y1-Y0), (Y3-Y2), (Y5-Y4), (Y7-Y6); flattening
        // Y3 onto Y2 for every asset zeroes the second window only.
        let mut y = Mat::from_fn(2, 9, |j, i| (1 + j) as f64 * i as f64);
        for j in 0..2 {
            let v = y.at(j, 2);
            y.set(j, 3, v);
        }
        let r = pav_returns(&y, 1).unwrap();
        assert_eq!(r.column_norms_sq()[1], 0.0);
        assert!(matches!(
            tva_from_returns(&r, false),
            Err(Error::DegenerateReturn { index: 1 })
        ));
        let (_, dropped) = tva_from_returns(&r, true).unwrap();
        assert_eq!(dropped, 1);
    }

    #[test]
    fn tva_self_normalization_invariant_to_column_scale() {
        // Rescaling one return column changes the norm factor but not the
        // self-normalized shape sum; check the shape part via trace ratio.
        let f = build_covol_factor(4, &SpectrumSpec::Beta13, false, 24).unwrap();
        let vol = VolPath::constant(1.0, 160);
        let x = simulate_prices(&f, &vol, &[0.0; 4], 24).unwrap();
        let r = pav_returns(&x, 4).unwrap();
        let (b1, _) = tva_from_returns(&r, false).unwrap();
        let mut scaled = r.values().clone();
        for j in 0..4 {
            let v = scaled.at(j, 0) * 7.0;
            scaled.set(j, 0, v);
        }
        let r2 = PavReturns::from_parts(scaled, 4).unwrap();
        let (b2, _) = tva_from_returns(&r2, false).unwrap();
        let norms1: f64 = r.column_norms_sq().iter().sum();
        let norms2: f64 = r2.column_norms_sq().iter().sum();
        // shape = B / (3 mean norm); shapes must agree exactly.
        let m = r.m() as f64;
        for a in 0..4 {
            for b in 0..4 {
                let s1 = b1.at(a, b) / (3.0 * norms1 / m);
                let s2 = b2.at(a, b) / (3.0 * norms2 / m);
                assert!((s1 - s2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rcv_pure_signal_and_pure_noise() {
        let f = build_covol_factor(1, &SpectrumSpec::Explicit(vec![1.0]), false, 25).unwrap();
        let n = 20_000;
        let vol = VolPath::constant(1.0, n);
        let x = simulate_prices(&f, &vol, &[0.0], 25).unwrap();
        let rcv = realized_covariance(&x).unwrap();
        assert!((rcv.at(0, 0) - 1.0).abs() < 0.05);

        let latent = Mat::zeros(1, n + 1);
        let panel = add_noise(&latent, &NoiseSpec::iid(2e-4, 1).unwrap(), 25).unwrap();
        let rcv_noise = realized_covariance(panel.observed()).unwrap();
        let expect = 2.0 * n as f64 * 2e-4;
        assert!((rcv_noise.at(0, 0) - expect).abs() < 0.05 * expect);
    }

    #[test]
    fn noise_variance_alternating_exact() {
        // epsilon alternates +c/-c: every one-step return is +-2c, so the
        // estimator returns 4c^2 n / 2n = 2c^2 exactly.
        let c = 0.3;
        let y = Mat::from_fn(1, 101, |_, i| if i % 2 == 0 { c } else { -c });
        let est = estimate_noise_variance(&y).unwrap();
        assert!((est[0] - 2.0 * c * c).abs() < 1e-15);
    }

    #[test]
    fn noise_variance_monte_carlo() {
        let latent = Mat::zeros(2, 23_401);
        let panel = add_noise(&latent, &NoiseSpec::iid(2e-4, 2).unwrap(), 26).unwrap();
        let est = estimate_noise_variance(panel.observed()).unwrap();
        for d in est {
            assert!((d - 2e-4).abs() < 0.05 * 2e-4, "estimate {d}");
        }
    }

    #[test]
    fn noise_variance_shift_invariant() {
        let f = build_covol_factor(2, &SpectrumSpec::Beta13, false, 27).unwrap();
        let vol = VolPath::constant(1.0, 300);
        let x = simulate_prices(&f, &vol, &[0.0; 2], 27).unwrap();
        let base = estimate_noise_variance(&x).unwrap();
        let mut shifted = x.clone();
        for i in 0..shifted.ncols() {
            let v = shifted.at(0, i) + 17.0;
            shifted.set(0, i, v);
        }
        let est = estimate_noise_variance(&shifted).unwrap();
        assert_eq!(base, est);
    }

    #[test]
    fn equalize_noise_tops_up() {
        let n = 40_000;
        let latent = Mat::zeros(2, n + 1);
        let spec = NoiseSpec::new(vec![1.0, 0.0], crate::simulate::NoiseTemporal::Iid).unwrap();
        let panel = add_noise(&latent, &spec, 28).unwrap();
        let eq = equalize_noise(&panel, &[1.0, 0.0], 28).unwrap();
        let est = estimate_noise_variance(eq.observed()).unwrap();
        assert!((est[0] - 1.0).abs() < 0.05, "asset 0: {}", est[0]);
        assert!((est[1] - 1.0).abs() < 0.05, "asset 1: {}", est[1]);
        // The already-max asset is untouched.
        for i in 0..=n {
            assert_eq!(eq.observed().at(0, i), panel.observed().at(0, i));
        }
    }

    #[test]
    fn equalize_noise_equal_variances_noop() {
        let latent = Mat::from_fn(2, 51, |j, i| (j + i) as f64);
        let panel = add_noise(&latent, &NoiseSpec::iid(0.5, 2).unwrap(), 29).unwrap();
        let eq = equalize_noise(&panel, &[0.5, 0.5], 29).unwrap();
        assert_eq!(eq.observed(), panel.observed());
    }

    #[test]
    fn equalize_noise_rejects_bad_gap() {
        let latent = Mat::zeros(2, 11);
        let panel = add_noise(&latent, &NoiseSpec::iid(0.0, 2).unwrap(), 30).unwrap();
        // No gap can be negative against the max, so craft one via direct
        // call with an inconsistent variance list is impossible; the guard
        // protects against NaN-induced orderings instead.
        let res = equalize_noise(&panel, &[f64::NAN, 1.0], 30);
        assert!(res.is_err());
    }

    #[test]
    fn config_resolves_paper_scale_windows() {
        let c = EstimatorConfig::new(100, 23_400, KRule::Sqrt { theta: 0.5 }).unwrap();
        assert_eq!(c.k(), 76);
        assert_eq!(c.m(), 153);
        assert!((c.y() - 100.0 / 153.0).abs() < 1e-15);

        let c2 = EstimatorConfig::new(
            100,
            23_400,
            KRule::Power {
                theta: 1.5,
                alpha: 0.6,
            },
        )
        .unwrap();
        assert_eq!(c2.k(), 627);
        assert_eq!(c2.m(), 18);
        assert!((c2.y() - 100.0 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn config_rejects_bad_parameters() {
        assert!(EstimatorConfig::new(10, 100, KRule::Sqrt { theta: 0.0 }).is_err());
        assert!(EstimatorConfig::new(
            10,
            100,
            KRule::Power {
                theta: 1.0,
                alpha: 0.5
            }
        )
        .is_err());
        assert!(EstimatorConfig::new(
            10,
            100,
            KRule::Power {
                theta: 1.0,
                alpha: 1.0
            }
        )
        .is_err());
        // k resolves below 2
        assert!(EstimatorConfig::new(10, 100, KRule::Sqrt { theta: 0.1 }).is_err());
        // m resolves below 2
        assert!(EstimatorConfig::new(10, 100, KRule::Sqrt { theta: 4.0 }).is_err());
    }

    #[test]
    fn symmetric_eigenvalues_guards() {
        let asym = Mat::from_vec(2, 2, vec![1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            symmetric_eigenvalues(&asym),
            Err(Error::NotSymmetric { .. })
        ));
        let nan = Mat::from_vec(1, 1, vec![f64::NAN]);
        assert!(symmetric_eigenvalues(&nan).is_err());
        let rect = Mat::zeros(2, 3);
        assert!(symmetric_eigenvalues(&rect).is_err());
    }

    #[test]
    fn symmetric_eigenvalues_tolerates_roundoff_asymmetry() {
        let mut a = Mat::from_vec(2, 2, vec![2.0, 1.0, 1.0, 2.0]);
        a.set(0, 1, 1.0 + 1e-12);
        let eig = symmetric_eigenvalues(&a).unwrap();
        assert!((eig[0] - 1.0).abs() < 1e-9);
        assert!((eig[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn pav_vs_latent_distance_grows_with_noise() {
        let p = 40;
        let n = 10_000;
        let k = 50;
        let f = build_covol_factor(p, &SpectrumSpec::Beta13, false, 31).unwrap();
        let vol = simulate_vol_for_test(n, 31);
        let latent = simulate_prices(&f, &vol, &vec![0.0; p], 31).unwrap();
        let base = esd_from_eigenvalues(
            &symmetric_eigenvalues(&pav_matrix(&latent, k).unwrap()).unwrap(),
        )
        .unwrap();

        let mut prev = -1.0;
        for (idx, d2) in [0.0, 5e-5, 2e-4].into_iter().enumerate() {
            let panel = if d2 == 0.0 {
                PricePanel::noiseless(latent.clone())
            } else {
                add_noise(&latent, &NoiseSpec::iid(d2, p).unwrap(), 31).unwrap()
            };
            let esd = esd_from_eigenvalues(
                &symmetric_eigenvalues(&pav_matrix(panel.observed(), k).unwrap()).unwrap(),
            )
            .unwrap();
            let dist = kolmogorov_distance(&esd, &base);
            if idx == 0 {
                assert_eq!(dist, 0.0);
            } else {
                assert!(dist > prev, "distance not increasing: {dist} vs {prev}");
            }
            prev = dist;
        }
    }

    fn simulate_vol_for_test(n: usize, seed: u64) -> VolPath {
        crate::simulate::simulate_vol_factor(n, 10.0, 0.05, seed)
    }
}
