//! Complex-analytic equation solvers.
//!
//! Four related inversions, all posed on the upper half-plane:
//!
//! * `solve_signal_stieltjes` removes additive observation noise from a
//!   sample-covariance spectrum: given the Stieltjes transform data of the
//!   noisy matrix, it solves for the transform of the noise-free one.
//! * `mp_forward` is the classical Marchenko-Pastur fixed point mapping a
//!   population spectrum to the sample-covariance transform at ratio y.
//! * `solve_vol_kernel` solves the scalar kernel equation that links the
//!   noise-free pre-averaged spectrum to the integrated covolatility
//!   spectrum when volatility varies in time.
//! * `solve_resolvent_shift` computes the finite-sample shift that aligns
//!   the noisy and noise-free resolvent traces; it powers a self-test of
//!   the whole theory on synthetic matrices.
//!
//! Every solver returns a report with the achieved residual and a domain
//! flag; callers drop points whose flag is false rather than trusting a
//! root on the wrong branch.

use crate::error::Error;
use crate::estimators::symmetric_eigenvalues;
use crate::linalg::Mat;
use crate::measures::{esd_from_eigenvalues, stieltjes, DiscreteMeasure};
use crate::rng::{stream_rng, Stream};
use crate::simulate::VolPath;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Solvers for the noisy inversion and the volatility kernel are trusted
/// only here; the recovery grids respect the same bound.
pub const TRUSTED_IM: f64 = 1.0;
/// The Marchenko-Pastur forward map tolerates a lower imaginary part.
pub const MP_TRUSTED_IM: f64 = 0.5;

const FP_DAMPING: f64 = 0.5;
const FP_MAX_ITER: usize = 10_000;
const NEWTON_MAX_ITER: usize = 80;

/// Evaluation points for inversion, all in the trusted half-plane.
#[derive(Clone, Debug)]
pub struct ComplexGrid {
    points: Vec<Complex64>,
}

impl ComplexGrid {
    pub fn new(points: Vec<Complex64>) -> Result<Self, Error> {
        if points.is_empty() {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: "grid must be nonempty".into(),
            });
        }
        for z in &points {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "points",
                    reason: "grid points must be finite".into(),
                });
            }
            if z.im < TRUSTED_IM {
                return Err(Error::BelowTrustedRegion(z.im, TRUSTED_IM));
            }
        }
        Ok(ComplexGrid { points })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Effective noise scale and aspect ratio for the noisy inversion. For
/// pre-averaged panels the effective scale absorbs the window: with m
/// windows of half-length k and per-observation noise deviation d, the
/// averaged noise enters as sigma = d * sqrt(2 m / k).
#[derive(Clone, Copy, Debug)]
pub struct NoisyInversionParams {
    sigma: f64,
    y: f64,
}

impl NoisyInversionParams {
    pub fn new(sigma: f64, y: f64) -> Result<Self, Error> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: format!("noise scale {sigma} must be finite and nonnegative"),
            });
        }
        if !y.is_finite() || y <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "y",
                reason: format!("aspect ratio {y} must be finite and positive"),
            });
        }
        Ok(NoisyInversionParams { sigma, y })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// Outcome of one solver call. `Ok` reports always meet the advertised
/// residual tolerance; `in_domain` records whether the root lies on the
/// branch the theory singles out.
#[derive(Clone, Copy, Debug)]
pub struct SolverReport {
    pub value: Complex64,
    pub iterations: usize,
    pub residual: f64,
    pub in_domain: bool,
}

struct IterOutcome {
    value: Complex64,
    iterations: usize,
    residual: f64,
}

fn finite(v: Complex64) -> bool {
    v.re.is_finite() && v.im.is_finite()
}

/// Damped fixed-point iteration followed by a guarded complex Newton
/// polish on g(x) = psi(x) - x. Returns the best point seen.
fn damped_then_newton<P, D>(psi: P, dpsi: D, start: Complex64, tol: f64) -> IterOutcome
where
    P: Fn(Complex64) -> Complex64,
    D: Fn(Complex64) -> Complex64,
{
    let residual_at = |x: Complex64| -> f64 {
        let v = psi(x);
        if finite(v) {
            (v - x).norm()
        } else {
            f64::INFINITY
        }
    };

    let mut x = start;
    let mut best = x;
    let mut best_res = residual_at(x);
    let mut iters = 0usize;

    if best_res.is_finite() {
        for _ in 0..FP_MAX_ITER {
            iters += 1;
            let v = psi(x);
            if !finite(v) {
                break;
            }
            let res = (v - x).norm();
            if res < best_res {
                best_res = res;
                best = x;
            }
            if res <= tol * 0.1 {
                break;
            }
            // Give up on a clearly diverging orbit; Newton may still save it.
            if res > 1e8 && iters > 50 {
                break;
            }
            x = (1.0 - FP_DAMPING) * x + FP_DAMPING * v;
        }
    }

    // Newton polish from the best point of the orbit.
    let mut xn = best;
    let mut fn_res = best_res;
    for _ in 0..NEWTON_MAX_ITER {
        if fn_res <= tol * 1e-3 {
            break;
        }
        let g = psi(xn) - xn;
        let dg = dpsi(xn) - Complex64::new(1.0, 0.0);
        if !finite(g) || !finite(dg) || dg.norm() < 1e-300 {
            break;
        }
        let mut step = -g / dg;
        let mut improved = false;
        for _ in 0..40 {
            let cand = xn + step;
            let cres = residual_at(cand);
            if cres < fn_res {
                xn = cand;
                fn_res = cres;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        iters += 1;
        if !improved {
            break;
        }
    }
    if fn_res < best_res {
        best = xn;
        best_res = fn_res;
    }
    IterOutcome {
        value: best,
        iterations: iters,
        residual: best_res,
    }
}

/// Membership in the inversion domain: the denominator path
/// z (1 - y sigma^2 xi)^2 - sigma^2 (y-1)(1 - y sigma^2 xi) must land in
/// the upper half-plane.
fn noisy_domain_ok(xi: Complex64, z: Complex64, params: &NoisyInversionParams) -> bool {
    let s2 = params.sigma * params.sigma;
    let w = Complex64::new(1.0, 0.0) - params.y * s2 * xi;
    let d = z * w * w - s2 * (params.y - 1.0) * w;
    d.im > 0.0
}

/// Solve the noisy-inversion equation for the Stieltjes transform of the
/// noise-free sample covariance spectrum:
///
///   xi = int dF(tau) / ( tau/(1 - y s^2 xi) - z (1 - y s^2 xi) + s^2 (y-1) ).
///
/// `f` is the observed (noisy) spectral measure. With sigma = 0 this
/// degenerates to xi = stieltjes(f, z) and returns exactly that.
pub fn solve_signal_stieltjes(
    f: &DiscreteMeasure,
    z: Complex64,
    params: &NoisyInversionParams,
) -> Result<SolverReport, Error> {
    if !(z.im >= TRUSTED_IM) {
        return Err(Error::BelowTrustedRegion(z.im, TRUSTED_IM));
    }
    let y = params.y;
    let s2 = params.sigma * params.sigma;
    let atoms = f.atoms();

    let psi = |xi: Complex64| -> Complex64 {
        let w = Complex64::new(1.0, 0.0) - y * s2 * xi;
        if w.norm() < 1e-300 {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        let shift = -z * w + s2 * (y - 1.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(tau, wgt) in atoms {
            acc += wgt / (tau / w + shift);
        }
        acc
    };
    let dpsi = |xi: Complex64| -> Complex64 {
        let w = Complex64::new(1.0, 0.0) - y * s2 * xi;
        if w.norm() < 1e-300 {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        let shift = -z * w + s2 * (y - 1.0);
        let w2 = w * w;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(tau, wgt) in atoms {
            let denom = tau / w + shift;
            let ddenom = tau * y * s2 / w2 + z * y * s2;
            acc -= wgt * ddenom / (denom * denom);
        }
        acc
    };

    let m0 = stieltjes(f, z)?;
    let starts = [
        m0,
        -z.inv(),
        0.5 * m0,
        m0 + Complex64::new(0.0, 0.2 / z.im),
        m0 - Complex64::new(0.2 / z.im, 0.0),
        -0.5 * z.inv(),
    ];

    let mut fallback: Option<SolverReport> = None;
    let mut best_res = f64::INFINITY;
    let mut total_iters = 0usize;
    for start in starts {
        let out = damped_then_newton(&psi, &dpsi, start, 1e-10);
        total_iters += out.iterations;
        best_res = best_res.min(out.residual);
        if out.residual <= 1e-10 {
            let report = SolverReport {
                value: out.value,
                iterations: total_iters,
                residual: out.residual,
                in_domain: noisy_domain_ok(out.value, z, params),
            };
            if report.in_domain {
                return Ok(report);
            }
            fallback.get_or_insert(report);
        }
    }
    if let Some(report) = fallback {
        return Ok(report);
    }
    Err(Error::NonConvergence {
        iterations: total_iters,
        residual: best_res,
    })
}

/// Spread of converged solutions from `count` random starts inside the
/// inversion domain; small spread certifies numerical uniqueness.
pub fn probe_uniqueness(
    f: &DiscreteMeasure,
    z: Complex64,
    params: &NoisyInversionParams,
    count: usize,
    seed: u64,
) -> Result<f64, Error> {
    let mut rng = stream_rng(seed, Stream::Probe, 0);
    let mut values: Vec<Complex64> = Vec::new();
    let scale = 1.0 / z.im;
    let mut attempts = 0usize;
    while values.len() < count && attempts < count * 50 {
        attempts += 1;
        let cand = Complex64::new(
            2.0 * scale * rng.sample::<f64, _>(StandardNormal),
            scale * rng.sample::<f64, _>(StandardNormal).abs(),
        );
        if !noisy_domain_ok(cand, z, params) {
            continue;
        }
        let y = params.y;
        let s2 = params.sigma * params.sigma;
        let atoms = f.atoms();
        let psi = |xi: Complex64| -> Complex64 {
            let w = Complex64::new(1.0, 0.0) - y * s2 * xi;
            if w.norm() < 1e-300 {
                return Complex64::new(f64::INFINITY, 0.0);
            }
            let shift = -z * w + s2 * (y - 1.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for &(tau, wgt) in atoms {
                acc += wgt / (tau / w + shift);
            }
            acc
        };
        let dpsi = |xi: Complex64| -> Complex64 {
            let w = Complex64::new(1.0, 0.0) - y * s2 * xi;
            if w.norm() < 1e-300 {
                return Complex64::new(f64::INFINITY, 0.0);
            }
            let shift = -z * w + s2 * (y - 1.0);
            let w2 = w * w;
            let mut acc = Complex64::new(0.0, 0.0);
            for &(tau, wgt) in atoms {
                let denom = tau / w + shift;
                let ddenom = tau * y * s2 / w2 + z * y * s2;
                acc -= wgt * ddenom / (denom * denom);
            }
            acc
        };
        let out = damped_then_newton(&psi, &dpsi, cand, 1e-10);
        if out.residual <= 1e-10 && noisy_domain_ok(out.value, z, params) {
            values.push(out.value);
        }
    }
    if values.len() < 2 {
        return Err(Error::NonConvergence {
            iterations: attempts,
            residual: f64::INFINITY,
        });
    }
    let mut spread = 0.0f64;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            spread = spread.max((values[i] - values[j]).norm());
        }
    }
    Ok(spread)
}

/// Marchenko-Pastur forward map: solve
/// m = int dH(tau) / ( tau (1 - y (1 + z m)) - z ) for the sample-spectrum
/// transform given population spectrum H and aspect ratio y.
pub fn mp_forward(h: &DiscreteMeasure, z: Complex64, y: f64) -> Result<SolverReport, Error> {
    if !(z.im >= MP_TRUSTED_IM) {
        return Err(Error::BelowTrustedRegion(z.im, MP_TRUSTED_IM));
    }
    if !y.is_finite() || y <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "y",
            reason: format!("aspect ratio {y} must be finite and positive"),
        });
    }
    let atoms = h.atoms();
    let phi = |m: Complex64| -> Complex64 {
        let factor = Complex64::new(1.0 - y, 0.0) - y * z * m;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(tau, wgt) in atoms {
            acc += wgt / (tau * factor - z);
        }
        acc
    };
    let dphi = |m: Complex64| -> Complex64 {
        let factor = Complex64::new(1.0 - y, 0.0) - y * z * m;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(tau, wgt) in atoms {
            let denom = tau * factor - z;
            acc += wgt * tau * y * z / (denom * denom);
        }
        acc
    };

    let starts = [-z.inv(), stieltjes(h, z)?, -0.5 * z.inv(), -2.0 * z.inv()];
    let mut total_iters = 0usize;
    let mut best_res = f64::INFINITY;
    for start in starts {
        let out = damped_then_newton(&phi, &dphi, start, 1e-12);
        total_iters += out.iterations;
        best_res = best_res.min(out.residual);
        if out.residual <= 1e-12 && out.value.im > 0.0 {
            return Ok(SolverReport {
                value: out.value,
                iterations: total_iters,
                residual: out.residual,
                in_domain: true,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: total_iters,
        residual: best_res,
    })
}

/// Closed-form reference for `mp_forward` when H is a point mass at c:
/// the root of c y z m^2 + (z - c(1-y)) m + 1 = 0 with positive imaginary
/// part.
pub fn mp_point_mass_reference(c: f64, y: f64, z: Complex64) -> Complex64 {
    let a = c * y * z;
    let b = z - Complex64::new(c * (1.0 - y), 0.0);
    let disc = (b * b - 4.0 * a).sqrt();
    let r1 = (-b + disc) / (2.0 * a);
    let r2 = (-b - disc) / (2.0 * a);
    if r1.im > 0.0 {
        r1
    } else {
        r2
    }
}

/// Solve the volatility kernel equation
///
///   int_0^1 M / ( M - (1/3) gamma*_s^2 y (1/z + m_A) ) ds = 1 - y - y z m_A
///
/// by complex Newton with restarts; the path integral is the trapezoid
/// rule on the stored gamma* grid. The constant-path closed form
/// M = a r / (r - 1) seeds the iteration and is exact when gamma* is flat.
pub fn solve_vol_kernel(
    z: Complex64,
    m_a: Complex64,
    gamma_star: &VolPath,
    y: f64,
) -> Result<SolverReport, Error> {
    if !(z.im >= TRUSTED_IM) {
        return Err(Error::BelowTrustedRegion(z.im, TRUSTED_IM));
    }
    let zeta = gamma_star.zeta();
    if !(zeta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma_star",
            reason: "volatility path integrates to zero".into(),
        });
    }
    let n = gamma_star.n();
    let gsq: Vec<f64> = gamma_star.values().iter().map(|g| g * g).collect();
    let c = y * (z.inv() + m_a) / 3.0;
    let r = Complex64::new(1.0 - y, 0.0) - y * z * m_a;

    // Trapezoid integral of f(s) = M / (M - c g_s^2).
    let trapz = |f: &dyn Fn(f64) -> Complex64| -> Complex64 {
        let mut acc = 0.5 * (f(gsq[0]) + f(gsq[n]));
        for g in &gsq[1..n] {
            acc += f(*g);
        }
        acc / n as f64
    };
    let integral = |m: Complex64| -> Complex64 { trapz(&|g2| m / (m - c * g2)) };
    let dintegral = |m: Complex64| -> Complex64 {
        trapz(&|g2| {
            let d = m - c * g2;
            -c * g2 / (d * d)
        })
    };
    let g = |m: Complex64| integral(m) - r;

    let mut starts: Vec<Complex64> = Vec::new();
    let rm1 = r - Complex64::new(1.0, 0.0);
    if rm1.norm() > 1e-12 {
        // Exact solution for a constant path at the mean squared level.
        starts.push(c * zeta * r / rm1);
    }
    let base = -zeta / (3.0 * z);
    starts.extend_from_slice(&[
        base,
        0.5 * base,
        2.0 * base,
        base * Complex64::new(1.0, 0.7),
        base * Complex64::new(1.0, -0.7),
        c * zeta * Complex64::new(0.0, 1.0),
    ]);

    let tol = 1e-10;
    let mut total_iters = 0usize;
    let mut best_res = f64::INFINITY;
    for start in starts {
        if !finite(start) {
            continue;
        }
        let mut m = start;
        let mut res = {
            let v = g(m);
            if finite(v) {
                v.norm()
            } else {
                f64::INFINITY
            }
        };
        if !res.is_finite() {
            continue;
        }
        for _ in 0..NEWTON_MAX_ITER {
            total_iters += 1;
            if res <= tol * 1e-2 {
                break;
            }
            let gv = g(m);
            let dg = dintegral(m);
            if !finite(gv) || !finite(dg) || dg.norm() < 1e-300 {
                break;
            }
            let mut step = -gv / dg;
            let mut improved = false;
            for _ in 0..40 {
                let cand = m + step;
                let cv = g(cand);
                let cres = if finite(cv) { cv.norm() } else { f64::INFINITY };
                if cres < res {
                    m = cand;
                    res = cres;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        best_res = best_res.min(res);
        if res <= tol {
            return Ok(SolverReport {
                value: m,
                iterations: total_iters,
                residual: res,
                in_domain: m.im > 0.0,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: total_iters,
        residual: best_res,
    })
}

/// Forward map from a population spectrum H and kernel value M to the
/// signal transform: -(1/z) int zeta / (tau M + zeta) dH(tau).
pub fn signal_stieltjes_from_population(
    h: &DiscreteMeasure,
    m_kernel: Complex64,
    zeta: f64,
    z: Complex64,
) -> Result<Complex64, Error> {
    if !(z.im > 0.0) {
        return Err(Error::LowerHalfPlane(z.im));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for &(tau, wgt) in h.atoms() {
        let denom = tau * m_kernel + Complex64::new(zeta, 0.0);
        if denom.norm() == 0.0 {
            return Err(Error::InvalidParameter {
                name: "kernel",
                reason: format!("denominator tau*M + zeta vanished at tau = {tau}"),
            });
        }
        acc += wgt * zeta / denom;
    }
    Ok(-acc / z)
}

/// Contraction threshold for the resolvent-shift equation:
/// 2 (sigma + 1) sqrt((y + 1)(b + 1)) with b the largest atom of the
/// sample spectrum. Above this imaginary part the shift map is a proven
/// contraction.
pub fn contraction_threshold(f_s: &DiscreteMeasure, sigma: f64, y: f64) -> f64 {
    let b = f_s.support_max();
    2.0 * (sigma + 1.0) * ((y + 1.0) * (b + 1.0)).sqrt()
}

fn resolvent_shift_impl(
    f_s: &DiscreteMeasure,
    z: Complex64,
    sigma: f64,
    y: f64,
) -> Result<SolverReport, Error> {
    let s2 = sigma * sigma;
    let atoms = f_s.atoms();
    let map = |t: Complex64| -> Complex64 {
        let gamma = z - t * s2;
        if gamma.im <= 0.0 {
            return Complex64::new(f64::NAN, f64::NAN);
        }
        let mut m = Complex64::new(0.0, 0.0);
        for &(lam, wgt) in atoms {
            m += wgt / (Complex64::new(lam, 0.0) - gamma);
        }
        Complex64::new(y - 1.0, 0.0) + y * gamma * m
    };
    let dmap = |t: Complex64| -> Complex64 {
        let gamma = z - t * s2;
        if gamma.im <= 0.0 {
            return Complex64::new(f64::NAN, f64::NAN);
        }
        let mut m = Complex64::new(0.0, 0.0);
        let mut mp = Complex64::new(0.0, 0.0);
        for &(lam, wgt) in atoms {
            let d = Complex64::new(lam, 0.0) - gamma;
            m += wgt / d;
            mp += wgt / (d * d);
        }
        -y * s2 * (m + gamma * mp)
    };

    let tol = 1e-12;
    // Plain (undamped) iteration: the map is a contraction above the
    // threshold and empirically far below it.
    let mut t = Complex64::new(0.0, 0.0);
    let mut best = t;
    let mut best_res = f64::INFINITY;
    let mut iters = 0usize;
    for _ in 0..FP_MAX_ITER {
        iters += 1;
        let v = map(t);
        if !finite(v) {
            break;
        }
        let res = (v - t).norm();
        if res < best_res {
            best_res = res;
            best = t;
        }
        if res <= tol {
            break;
        }
        if res > 1e10 {
            break;
        }
        t = v;
    }
    if best_res > tol {
        let out = damped_then_newton(&map, &dmap, best, tol);
        iters += out.iterations;
        if out.residual < best_res {
            best = out.value;
            best_res = out.residual;
        }
    }
    if best_res > tol {
        return Err(Error::NonConvergence {
            iterations: iters,
            residual: best_res,
        });
    }
    let bound = z.im / (2.0 * (sigma + 1.0) * (sigma + 1.0));
    let in_domain = best.im >= -1e-12 && best.im <= bound + 1e-9;
    Ok(SolverReport {
        value: best,
        iterations: iters,
        residual: best_res,
        in_domain,
    })
}

/// Solve t = y - 1 + y (z - t sigma^2) m_S(z - t sigma^2) inside the strip
/// 0 <= Im t <= Im z / (2 (sigma+1)^2). Requires Im z above the proven
/// contraction threshold; use the `_unchecked` variant to rely on the
/// fixed-point certificate instead.
pub fn solve_resolvent_shift(
    f_s: &DiscreteMeasure,
    z: Complex64,
    sigma: f64,
    y: f64,
) -> Result<SolverReport, Error> {
    let threshold = contraction_threshold(f_s, sigma, y);
    if z.im < threshold {
        return Err(Error::OutsideContractionRegion {
            im_z: z.im,
            threshold,
        });
    }
    resolvent_shift_impl(f_s, z, sigma, y)
}

/// Same equation without the sufficient-condition gate. The returned
/// report still certifies the answer: residual <= 1e-12 and the domain
/// flag verify it is a genuine fixed point in the strip.
pub fn solve_resolvent_shift_unchecked(
    f_s: &DiscreteMeasure,
    z: Complex64,
    sigma: f64,
    y: f64,
) -> Result<SolverReport, Error> {
    resolvent_shift_impl(f_s, z, sigma, y)
}

/// End-to-end consistency residual between the noise-free and noisy
/// resolvent traces: with t solving the shift equation for
/// S = (1/n)(A + sigma E)(A + sigma E)^T and
/// delta = y sigma^2 m_S(z - t sigma^2), the traces
/// (1/p) tr((AA^T/n / (1+delta)) - z I)^{-1} and m_S(z - t sigma^2)
/// should agree asymptotically. Returns their absolute difference.
pub fn resolvent_matching_residual(
    a: &Mat,
    s: &Mat,
    z: Complex64,
    sigma: f64,
) -> Result<f64, Error> {
    let p = a.nrows();
    let n = a.ncols();
    if p == 0 || n == 0 {
        return Err(Error::EmptySpectrum);
    }
    let y = p as f64 / n as f64;
    let s2 = sigma * sigma;

    let eig_s = symmetric_eigenvalues(s)?;
    let f_s = esd_from_eigenvalues(&eig_s)?;
    let shift = solve_resolvent_shift_unchecked(&f_s, z, sigma, y)?;
    let gamma = z - shift.value * s2;
    let m_shift = stieltjes(&f_s, gamma)?;
    let delta = y * s2 * m_shift;

    let gram = a.matmul_transb(a).scaled(1.0 / n as f64);
    let eig_a = symmetric_eigenvalues(&gram)?;
    let one_plus = Complex64::new(1.0, 0.0) + delta;
    let mut lhs = Complex64::new(0.0, 0.0);
    for lam in &eig_a {
        lhs += ((lam / one_plus) - z).inv();
    }
    lhs /= p as f64;
    Ok((lhs - m_shift).norm())
}

/// Synthetic information-plus-noise instance: A and E iid standard normal
/// p x n, S = (1/n)(A + sigma E)(A + sigma E)^T. Returns (A, S).
pub fn information_plus_noise_sample(p: usize, n: usize, sigma: f64, seed: u64) -> (Mat, Mat) {
    let mut rng_a = stream_rng(seed, Stream::Probe, 1);
    let mut rng_e = stream_rng(seed, Stream::Probe, 2);
    let a = Mat::from_fn(p, n, |_, _| rng_a.sample::<f64, _>(StandardNormal));
    let contaminated = if sigma == 0.0 {
        a.clone()
    } else {
        let mut c = a.clone();
        for i in 0..p {
            let row = c.row_mut(i);
            for v in row.iter_mut() {
                *v += sigma * rng_e.sample::<f64, _>(StandardNormal);
            }
        }
        c
    };
    let s = contaminated
        .matmul_transb(&contaminated)
        .scaled(1.0 / n as f64);
    (a, s)
}
