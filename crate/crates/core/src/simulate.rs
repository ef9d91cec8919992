//! Synthetic high-frequency price panels.
//!
//! The data-generating process is a p-dimensional diffusion observed on a
//! uniform grid of [0, 1] with n steps:
//!
//!   X_{t_i} = X_{t_{i-1}} + mu/n + gamma_{t_{i-1}} * Lambda Z_i / sqrt(n),
//!
//! contaminated additively by microstructure noise. The scalar factor
//! gamma_t follows a mean-reverting diffusion around a seasonal (U-shaped)
//! intraday level, and Lambda is a fixed symmetric square root of the
//! covolatility shape matrix. The integrated covolatility matrix is then
//! ICV = zeta * Sigma with zeta = int_0^1 gamma_t^2 dt.

use crate::error::Error;
use crate::linalg::{haar_orthogonal, Mat};
use crate::measures::{esd_from_eigenvalues, scale_measure, DiscreteMeasure};
use crate::rng::{stream_rng, Stream};
use rand::Rng;
use rand_distr::{Beta, StandardNormal};

/// Scalar volatility path sampled on the observation grid t_i = i/n.
#[derive(Clone, Debug)]
pub struct VolPath {
    values: Vec<f64>,
    zeta: f64,
}

impl VolPath {
    /// Wrap grid values; `values[i]` is gamma at t = i/n with n = len - 1.
    /// The squared integral zeta is the trapezoid rule on the same grid.
    pub fn new(values: Vec<f64>) -> Self {
        assert!(values.len() >= 2, "need at least two grid values");
        assert!(
            values.iter().all(|v| v.is_finite()),
            "volatility path must be finite"
        );
        let n = values.len() - 1;
        let mut acc = 0.0;
        for i in 0..n {
            acc += 0.5 * (values[i] * values[i] + values[i + 1] * values[i + 1]);
        }
        VolPath {
            values,
            zeta: acc / n as f64,
        }
    }

    pub fn constant(level: f64, n: usize) -> Self {
        VolPath::new(vec![level; n + 1])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// Integral of gamma^2 over [0, 1].
    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Path with every value multiplied by c (zeta scales by c^2).
    pub fn scaled(&self, c: f64) -> VolPath {
        VolPath::new(self.values.iter().map(|v| v * c).collect())
    }
}

/// Covolatility shape: symmetric square root Lambda, the matrix
/// Sigma = Lambda Lambda^T it generates, and the spectral distribution of
/// Sigma.
#[derive(Clone, Debug)]
pub struct CovolFactor {
    lambda: Mat,
    sigma: Mat,
    esd: DiscreteMeasure,
}

impl CovolFactor {
    pub fn lambda(&self) -> &Mat {
        &self.lambda
    }

    pub fn sigma(&self) -> &Mat {
        &self.sigma
    }

    pub fn esd(&self) -> &DiscreteMeasure {
        &self.esd
    }

    pub fn dim(&self) -> usize {
        self.lambda.nrows()
    }
}

/// How to draw the population eigenvalues of Sigma.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumSpec {
    /// Independent Beta(1, 3) eigenvalues.
    Beta13,
    /// Explicit nonnegative eigenvalue list (length p).
    Explicit(Vec<f64>),
}

/// Temporal structure of the noise sequence per asset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseTemporal {
    Iid,
    /// Stationary AR(1) with the given pole; marginal variance stays d_j^2.
    Ar1 { phi: f64 },
}

/// Additive observation noise: per-asset variances d_j^2 plus temporal model.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSpec {
    variances: Vec<f64>,
    temporal: NoiseTemporal,
}

impl NoiseSpec {
    pub fn new(variances: Vec<f64>, temporal: NoiseTemporal) -> Result<Self, Error> {
        if variances.is_empty() {
            return Err(Error::InvalidParameter {
                name: "variances",
                reason: "need at least one noise variance".into(),
            });
        }
        if variances.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter {
                name: "variances",
                reason: "noise variances must be finite and nonnegative".into(),
            });
        }
        if let NoiseTemporal::Ar1 { phi } = temporal {
            if !(phi.abs() < 1.0) {
                return Err(Error::InvalidParameter {
                    name: "phi",
                    reason: format!("AR(1) pole {phi} must satisfy |phi| < 1"),
                });
            }
        }
        Ok(NoiseSpec {
            variances,
            temporal,
        })
    }

    pub fn iid(variance: f64, p: usize) -> Result<Self, Error> {
        NoiseSpec::new(vec![variance; p], NoiseTemporal::Iid)
    }

    pub fn none(p: usize) -> Self {
        NoiseSpec::new(vec![0.0; p], NoiseTemporal::Iid).expect("zero noise is valid")
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn temporal(&self) -> NoiseTemporal {
        self.temporal
    }

    pub fn is_silent(&self) -> bool {
        self.variances.iter().all(|v| *v == 0.0)
    }
}

/// Latent and observed log-price panels, both p x (n+1) with column 0 at
/// time 0. `observed = latent + noise` by construction.
#[derive(Clone, Debug)]
pub struct PricePanel {
    latent: Mat,
    observed: Mat,
    noise: NoiseSpec,
}

impl PricePanel {
    /// Assemble a panel from parts; latent and observed must be the same
    /// shape and the noise spec must cover every asset.
    pub fn from_parts(latent: Mat, observed: Mat, noise: NoiseSpec) -> Self {
        assert_eq!(latent.nrows(), observed.nrows());
        assert_eq!(latent.ncols(), observed.ncols());
        assert_eq!(noise.variances().len(), latent.nrows());
        PricePanel {
            latent,
            observed,
            noise,
        }
    }

    pub fn noiseless(latent: Mat) -> Self {
        let p = latent.nrows();
        PricePanel {
            observed: latent.clone(),
            latent,
            noise: NoiseSpec::none(p),
        }
    }

    pub fn latent(&self) -> &Mat {
        &self.latent
    }

    pub fn observed(&self) -> &Mat {
        &self.observed
    }

    pub fn noise_model(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn p(&self) -> usize {
        self.latent.nrows()
    }

    pub fn n(&self) -> usize {
        self.latent.ncols() - 1
    }
}

/// Seasonal intraday volatility level: high at the open, dipping mid-day,
/// recovering at the close.
pub fn seasonal_vol_mean(t: f64) -> f64 {
    2.0 * (0.0009 + 0.0008 * (2.0 * std::f64::consts::PI * t).cos()).sqrt()
}

/// Euler scheme for the mean-reverting factor
/// d gamma = -rho (gamma - mu_t) dt + sigma_ou dW, started at the seasonal
/// level. With sigma_ou = 0 the path is deterministic regardless of seed.
pub fn simulate_vol_factor(n: usize, rho: f64, sigma_ou: f64, seed: u64) -> VolPath {
    assert!(n >= 1);
    let mut rng = stream_rng(seed, Stream::VolPath, 0);
    let dt = 1.0 / n as f64;
    let sqrt_dt = dt.sqrt();
    let mut values = Vec::with_capacity(n + 1);
    let mut g = seasonal_vol_mean(0.0);
    values.push(g);
    for i in 0..n {
        let t = i as f64 * dt;
        let drift = -rho * (g - seasonal_vol_mean(t)) * dt;
        let diff = if sigma_ou == 0.0 {
            0.0
        } else {
            sigma_ou * sqrt_dt * rng.sample::<f64, _>(StandardNormal)
        };
        g += drift + diff;
        values.push(g);
    }
    VolPath::new(values)
}

/// Draw the covolatility shape. Eigenvalues come from `spectrum`; the
/// eigenbasis is Haar orthogonal; Lambda = U D^{1/2} U^T is the symmetric
/// root. With `normalize_trace` the eigenvalues are rescaled so
/// tr(Sigma) = p.
pub fn build_covol_factor(
    p: usize,
    spectrum: &SpectrumSpec,
    normalize_trace: bool,
    seed: u64,
) -> Result<CovolFactor, Error> {
    if p == 0 {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: "dimension must be positive".into(),
        });
    }
    let mut d: Vec<f64> = match spectrum {
        SpectrumSpec::Beta13 => {
            let mut rng = stream_rng(seed, Stream::Spectrum, 0);
            let beta = Beta::new(1.0, 3.0).expect("valid shape parameters");
            (0..p).map(|_| rng.sample(beta)).collect()
        }
        SpectrumSpec::Explicit(list) => {
            if list.len() != p {
                return Err(Error::DimensionMismatch(format!(
                    "spectrum has {} entries for p = {p}",
                    list.len()
                )));
            }
            if list.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidParameter {
                    name: "spectrum",
                    reason: "eigenvalues must be finite and nonnegative".into(),
                });
            }
            list.clone()
        }
    };
    if normalize_trace {
        let tr: f64 = d.iter().sum();
        if !(tr > 0.0) {
            return Err(Error::InvalidParameter {
                name: "spectrum",
                reason: "cannot normalize a zero trace".into(),
            });
        }
        let c = p as f64 / tr;
        for v in &mut d {
            *v *= c;
        }
    }

    let mut rng = stream_rng(seed, Stream::Orthogonal, 0);
    let u = haar_orthogonal(p, &mut rng);

    // U diag(f(d)) U^T without forming the diagonal matrix.
    let weighted = |f: &dyn Fn(f64) -> f64| -> Mat {
        let mut ud = u.clone();
        for i in 0..p {
            for j in 0..p {
                ud.set(i, j, u.at(i, j) * f(d[j]));
            }
        }
        ud.matmul_transb(&u).symmetrized()
    };
    let lambda = weighted(&|x: f64| x.sqrt());
    let sigma = weighted(&|x: f64| x);
    let esd = esd_from_eigenvalues(&d)?;
    Ok(CovolFactor { lambda, sigma, esd })
}

/// Latent log-price panel: p x (n+1), X_0 = 0, per-asset constant drift.
/// Price shocks use one stream per asset so the panel is reproducible
/// asset-by-asset.
pub fn simulate_prices(
    factor: &CovolFactor,
    vol: &VolPath,
    drift: &[f64],
    seed: u64,
) -> Result<Mat, Error> {
    let p = factor.dim();
    let n = vol.n();
    if drift.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "drift has {} entries for p = {p}",
            drift.len()
        )));
    }
    let mut z = Mat::zeros(p, n);
    for j in 0..p {
        let mut rng = stream_rng(seed, Stream::PriceShock, j as u64);
        let row = z.row_mut(j);
        for v in row.iter_mut() {
            *v = rng.sample::<f64, _>(StandardNormal);
        }
    }
    let shocks = factor.lambda().matmul(&z);

    let sqrt_n = (n as f64).sqrt();
    let inv_n = 1.0 / n as f64;
    let gamma = vol.values();
    let mut x = Mat::zeros(p, n + 1);
    for j in 0..p {
        let mut level = 0.0;
        let srow = shocks.row(j);
        let xrow = x.row_mut(j);
        for i in 1..=n {
            level += drift[j] * inv_n + gamma[i - 1] * srow[i - 1] / sqrt_n;
            xrow[i] = level;
        }
    }
    Ok(x)
}

/// Contaminate a latent panel: observed = latent + epsilon with epsilon iid
/// or stationary AR(1) per asset, independent across assets.
pub fn add_noise(latent: &Mat, spec: &NoiseSpec, seed: u64) -> Result<PricePanel, Error> {
    let p = latent.nrows();
    if spec.variances().len() != p {
        return Err(Error::DimensionMismatch(format!(
            "{} noise variances for p = {p}",
            spec.variances().len()
        )));
    }
    let cols = latent.ncols();
    let mut observed = latent.clone();
    for j in 0..p {
        let d = spec.variances()[j].sqrt();
        if d == 0.0 {
            continue;
        }
        let mut rng = stream_rng(seed, Stream::Noise, j as u64);
        let row = observed.row_mut(j);
        match spec.temporal() {
            NoiseTemporal::Iid => {
                for v in row.iter_mut().take(cols) {
                    *v += d * rng.sample::<f64, _>(StandardNormal);
                }
            }
            NoiseTemporal::Ar1 { phi } => {
                let innov = d * (1.0 - phi * phi).sqrt();
                let mut e = d * rng.sample::<f64, _>(StandardNormal);
                row[0] += e;
                for v in row.iter_mut().take(cols).skip(1) {
                    e = phi * e + innov * rng.sample::<f64, _>(StandardNormal);
                    *v += e;
                }
            }
        }
    }
    Ok(PricePanel {
        latent: latent.clone(),
        observed,
        noise: spec.clone(),
    })
}

/// Ground-truth integrated covolatility ICV = zeta * Sigma and its spectral
/// distribution (the shape spectrum scaled by zeta).
pub fn integrated_covariance(
    factor: &CovolFactor,
    vol: &VolPath,
) -> Result<(Mat, DiscreteMeasure), Error> {
    let zeta = vol.zeta();
    let icv = factor.sigma().scaled(zeta);
    let esd = scale_measure(factor.esd(), zeta)?;
    Ok((icv, esd))
}

/// Variance weight of the i-th (1-based) pre-averaged return under the given
/// volatility path, for unit covolatility shape:
/// w_i = sum_{|j| < k} (1 - |j|/k)^2 * int gamma_t^2 dt over the j-th
/// one-step interval of the window, trapezoid rule on the stored grid.
pub fn preaveraged_return_variance(
    vol: &VolPath,
    k: usize,
    i: usize,
) -> Result<f64, Error> {
    let n = vol.n();
    if k < 1 || 2 * k > n {
        return Err(Error::WindowTooLong { two_k: 2 * k, n });
    }
    let m = n / (2 * k);
    if i < 1 || i > m {
        return Err(Error::InvalidParameter {
            name: "i",
            reason: format!("window index {i} outside 1..={m}"),
        });
    }
    let g = vol.values();
    let center = (2 * i - 1) * k;
    let mut acc = 0.0;
    for j in -(k as i64 - 1)..=(k as i64 - 1) {
        let frac = 1.0 - (j.unsigned_abs() as f64) / k as f64;
        let l = (center as i64 + j) as usize;
        let seg = 0.5 * (g[l - 1] * g[l - 1] + g[l] * g[l]) / n as f64;
        acc += frac * frac * seg;
    }
    Ok(acc)
}
