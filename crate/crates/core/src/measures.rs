//! Discrete spectral measures on the nonnegative half-line.
//!
//! Empirical spectral distributions, their Stieltjes transforms
//! m(z) = sum w_i / (lambda_i - z), and the distances used to compare a
//! recovered spectrum against the truth. All measures are probability
//! measures; constructors enforce that.

use crate::error::Error;
use num_complex::Complex64;

/// Relative gap under which two atom locations are considered identical.
const MERGE_REL_TOL: f64 = 1e-12;
/// Allowed deviation of the total mass from 1.
const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Eigenvalues at least this far below zero (relative to the spectral radius)
/// are errors rather than roundoff.
const EIGEN_CLAMP_REL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    /// (location, weight), locations strictly increasing, weights positive.
    atoms: Vec<(f64, f64)>,
}

impl DiscreteMeasure {
    /// Build a probability measure from explicit atoms. Locations must be
    /// nonnegative and finite; atoms closer than `1e-12` in relative terms are
    /// merged (weight-averaged location, summed weight); weights must total 1
    /// within `1e-12`. Zero-weight atoms are dropped.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self, Error> {
        let mut kept: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            if !x.is_finite() || !w.is_finite() {
                return Err(Error::Parse(format!("non-finite atom ({x}, {w})")));
            }
            if x < 0.0 {
                return Err(Error::NegativeLocation(x));
            }
            if w < 0.0 {
                return Err(Error::Parse(format!("negative weight {w}")));
            }
            if w > 0.0 {
                kept.push((x, w));
            }
        }
        if kept.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        kept.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(kept.len());
        for (x, w) in kept {
            match merged.last_mut() {
                Some((mx, mw)) if close(*mx, x) => {
                    let total = *mw + w;
                    *mx = (*mx * *mw + x * w) / total;
                    *mw = total;
                }
                _ => merged.push((x, w)),
            }
        }

        let total: f64 = merged.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::UnnormalizedWeights(total));
        }
        Ok(DiscreteMeasure { atoms: merged })
    }

    /// Point mass at `x`.
    pub fn dirac(x: f64) -> Self {
        DiscreteMeasure::new(vec![(x, 1.0)]).expect("point mass is always valid")
    }

    /// Build from weights that need not sum to one: nonpositive weights are
    /// dropped and the rest renormalized. Used for fitted weight vectors.
    pub fn from_weighted_locations(locations: &[f64], weights: &[f64]) -> Result<Self, Error> {
        if locations.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} locations vs {} weights",
                locations.len(),
                weights.len()
            )));
        }
        let total: f64 = weights.iter().filter(|w| **w > 0.0).sum();
        if !(total > 0.0) {
            return Err(Error::EmptySpectrum);
        }
        let atoms: Vec<(f64, f64)> = locations
            .iter()
            .zip(weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(x, w)| (*x, *w / total))
            .collect();
        DiscreteMeasure::new(atoms)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn support_min(&self) -> f64 {
        self.atoms[0].0
    }

    pub fn support_max(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].0
    }

    /// Mass within the closed interval [lo, hi].
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|(x, _)| *x >= lo && *x <= hi)
            .map(|(_, w)| w)
            .sum()
    }
}

#[inline]
fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= MERGE_REL_TOL * a.abs().max(b.abs())
}

/// Empirical spectral distribution of an eigenvalue list: equal weight per
/// entry, multiplicities merged. Small negative eigenvalues (within
/// `1e-10 * max|lambda|` of zero, the Jacobi roundoff scale) clamp to zero;
/// anything more negative is an error.
pub fn esd_from_eigenvalues(eigenvalues: &[f64]) -> Result<DiscreteMeasure, Error> {
    if eigenvalues.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let scale = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = EIGEN_CLAMP_REL * scale;
    let w = 1.0 / eigenvalues.len() as f64;
    let mut atoms = Vec::with_capacity(eigenvalues.len());
    for &lam in eigenvalues {
        if lam < -tol {
            return Err(Error::NegativeEigenvalue { value: lam, tol });
        }
        atoms.push((lam.max(0.0), w));
    }
    DiscreteMeasure::new(atoms)
}

/// Stieltjes transform m(z) = sum w_i / (lambda_i - z), upper half-plane only.
pub fn stieltjes(measure: &DiscreteMeasure, z: Complex64) -> Result<Complex64, Error> {
    if !(z.im > 0.0) {
        return Err(Error::LowerHalfPlane(z.im));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, w) in measure.atoms() {
        acc += w / (Complex64::new(x, 0.0) - z);
    }
    Ok(acc)
}

/// Right-continuous distribution function F(x).
pub fn cdf_eval(measure: &DiscreteMeasure, x: f64) -> f64 {
    measure
        .atoms()
        .iter()
        .take_while(|(loc, _)| *loc <= x)
        .map(|(_, w)| w)
        .sum()
}

/// Walk the merged atom locations of two measures, reporting the CDF values
/// of each just before and just after every jump point.
fn cdf_walk<F: FnMut(f64, f64, f64, f64, f64)>(
    a: &DiscreteMeasure,
    b: &DiscreteMeasure,
    mut visit: F,
) {
    // visit(prev_x, x, fa_before, fb_before, ...) is called per event with the
    // plateau values on (prev_x, x); jump handling happens here.
    let (aa, bb) = (a.atoms(), b.atoms());
    let (mut i, mut j) = (0usize, 0usize);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut prev_x = f64::NEG_INFINITY;
    while i < aa.len() || j < bb.len() {
        let xa = if i < aa.len() { aa[i].0 } else { f64::INFINITY };
        let xb = if j < bb.len() { bb[j].0 } else { f64::INFINITY };
        let x = xa.min(xb);
        visit(prev_x, x, fa, fb, (fa - fb).abs());
        if xa <= x {
            fa += aa[i].1;
            i += 1;
        }
        if xb <= x {
            fb += bb[j].1;
            j += 1;
        }
        prev_x = x;
    }
}

/// Kolmogorov (sup) distance between the CDFs. Exact for discrete measures:
/// the supremum is attained on a plateau or at a jump, both of which the
/// merged walk enumerates.
pub fn kolmogorov_distance(a: &DiscreteMeasure, b: &DiscreteMeasure) -> f64 {
    let mut sup = 0.0f64;
    cdf_walk(a, b, |_, _, _, _, gap| sup = sup.max(gap));
    // Include the plateau after the last jump, where both CDFs equal their
    // totals; the gap there is the mass-sum mismatch, bounded by the
    // constructor tolerance.
    let tail = (cdf_eval(a, a.support_max().max(b.support_max()))
        - cdf_eval(b, a.support_max().max(b.support_max())))
    .abs();
    sup.max(tail)
}

/// Wasserstein-1 distance: the area between the two CDFs, summed exactly
/// over plateaus.
pub fn wasserstein1_distance(a: &DiscreteMeasure, b: &DiscreteMeasure) -> f64 {
    let mut area = 0.0f64;
    cdf_walk(a, b, |prev_x, x, fa, fb, _| {
        if prev_x.is_finite() && x > prev_x {
            area += (fa - fb).abs() * (x - prev_x);
        }
    });
    area
}

/// Push the measure through x -> c x for c > 0.
pub fn scale_measure(measure: &DiscreteMeasure, c: f64) -> Result<DiscreteMeasure, Error> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::NonPositiveScale(c));
    }
    DiscreteMeasure::new(
        measure
            .atoms()
            .iter()
            .map(|&(x, w)| (x * c, w))
            .collect::<Vec<_>>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_atom() -> DiscreteMeasure {
        DiscreteMeasure::new(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap()
    }

    #[test]
    fn esd_collapses_multiplicity() {
        let m = esd_from_eigenvalues(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(m.atoms().len(), 1);
        assert_eq!(m.atoms()[0].0, 1.0);
        assert!((m.atoms()[0].1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn esd_two_values() {
        let m = esd_from_eigenvalues(&[0.0, 2.0]).unwrap();
        assert_eq!(m.atoms(), &[(0.0, 0.5), (2.0, 0.5)]);
    }

    #[test]
    fn esd_empty_errors() {
        assert!(matches!(
            esd_from_eigenvalues(&[]),
            Err(Error::EmptySpectrum)
        ));
    }

    #[test]
    fn esd_clamps_roundoff_negatives() {
        let m = esd_from_eigenvalues(&[-1e-12, 1.0]).unwrap();
        assert_eq!(m.atoms()[0].0, 0.0);
    }

    #[test]
    fn esd_rejects_genuine_negatives() {
        assert!(matches!(
            esd_from_eigenvalues(&[-1e-3, 1.0]),
            Err(Error::NegativeEigenvalue { .. })
        ));
    }

    #[test]
    fn nearby_atoms_merge() {
        let m = DiscreteMeasure::new(vec![(1.0, 0.5), (1.0 + 1e-14, 0.5)]).unwrap();
        assert_eq!(m.atoms().len(), 1);
        assert!((m.atoms()[0].1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_weights_rejected() {
        assert!(matches!(
            DiscreteMeasure::new(vec![(1.0, 0.4), (2.0, 0.4)]),
            Err(Error::UnnormalizedWeights(_))
        ));
    }

    #[test]
    fn stieltjes_point_mass_at_one() {
        // m(i) for a unit mass at 1: 1/(1 - i) = (1 + i)/2.
        let m = DiscreteMeasure::dirac(1.0);
        let v = stieltjes(&m, Complex64::new(0.0, 1.0)).unwrap();
        assert!((v - Complex64::new(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn stieltjes_point_mass_at_zero() {
        let m = DiscreteMeasure::dirac(0.0);
        let v = stieltjes(&m, Complex64::new(0.0, 1.0)).unwrap();
        assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn stieltjes_point_mass_at_two() {
        // 1/(2 - i) = (2 + i)/5.
        let m = DiscreteMeasure::dirac(2.0);
        let v = stieltjes(&m, Complex64::new(0.0, 1.0)).unwrap();
        assert!((v - Complex64::new(0.4, 0.2)).norm() < 1e-15);
    }

    #[test]
    fn stieltjes_rejects_lower_half_plane() {
        let m = DiscreteMeasure::dirac(1.0);
        assert!(matches!(
            stieltjes(&m, Complex64::new(0.0, -1.0)),
            Err(Error::LowerHalfPlane(_))
        ));
        assert!(stieltjes(&m, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn cdf_values() {
        let m = DiscreteMeasure::dirac(1.0);
        assert_eq!(cdf_eval(&m, 0.5), 0.0);
        assert_eq!(cdf_eval(&m, 1.0), 1.0);
        let t = two_atom();
        assert_eq!(cdf_eval(&t, 1.0), 0.5);
        assert_eq!(cdf_eval(&t, -0.1), 0.0);
        assert_eq!(cdf_eval(&t, 2.0), 1.0);
    }

    #[test]
    fn kolmogorov_known_values() {
        let d0 = DiscreteMeasure::dirac(0.0);
        let d1 = DiscreteMeasure::dirac(1.0);
        assert_eq!(kolmogorov_distance(&d1, &d1), 0.0);
        // CDFs differ by 1 on [0, 1).
        assert!((kolmogorov_distance(&d0, &d1) - 1.0).abs() < 1e-15);
        // Against the half-half measure the largest gap is 0.5, e.g. at 0.
        assert!((kolmogorov_distance(&d1, &two_atom()) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn wasserstein_known_values() {
        let d0 = DiscreteMeasure::dirac(0.0);
        let d1 = DiscreteMeasure::dirac(1.0);
        assert!((wasserstein1_distance(&d0, &d1) - 1.0).abs() < 1e-15);
        // Half the mass moves distance 2 at best: area = 0.5 * 2... but from
        // dirac(1): move 0.5 mass from 1 to 0 and 0.5 from 1 to 2: cost 1.
        assert!((wasserstein1_distance(&d1, &two_atom()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scale_shifts_atoms() {
        let m = scale_measure(&DiscreteMeasure::dirac(1.0), 2.0).unwrap();
        assert_eq!(m.atoms(), &[(2.0, 1.0)]);
        assert!(scale_measure(&m, 0.0).is_err());
        assert!(scale_measure(&m, -1.0).is_err());
    }

    #[test]
    fn from_weighted_locations_drops_and_renormalizes() {
        let m =
            DiscreteMeasure::from_weighted_locations(&[0.0, 1.0, 2.0], &[0.0, 0.3, 0.3]).unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert!((m.atoms()[0].1 - 0.5).abs() < 1e-15);
    }
}
