//! Continuous-time quantum walks U(t) = exp(-itA) through the spectral
//! decomposition of a real symmetric adjacency matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Eigenvalues within this distance of an integer get an integer shadow.
pub const INTEGRALITY_TOL: f64 = 1e-8;
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
pub const FIDELITY_TOL: f64 = 1e-9;
/// Eigenvalues closer than this share an eigenspace.
const CLUSTER_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct WalkSystem<T: Scalar> {
    adjacency: DMatrix<T>,
    /// ascending
    eigenvalues: DVector<T>,
    /// columns are orthonormal eigenvectors in the order of `eigenvalues`
    eigenvectors: DMatrix<T>,
    shadow: Vec<Option<i64>>,
}

/// |U(t)[b,a]| together with the phase U(t)[b,a]/|U(t)[b,a]|.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FidelityReport {
    pub a: usize,
    pub b: usize,
    pub time: f64,
    pub fidelity: f64,
    pub phase: (f64, f64),
}

impl<T: Scalar> WalkSystem<T> {
    pub fn new(adjacency: DMatrix<T>) -> Result<Self> {
        let n = adjacency.nrows();
        if adjacency.ncols() != n {
            return Err(Error::Unsupported("adjacency matrix is not square".into()));
        }
        if (0..n).any(|i| (0..i).any(|j| adjacency[(i, j)] != adjacency[(j, i)])) {
            return Err(Error::Unsupported(
                "adjacency matrix is not symmetric".into(),
            ));
        }
        let eig = SymmetricEigen::new(adjacency.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[i]
                .partial_cmp(&eig.eigenvalues[j])
                .expect("finite eigenvalues")
        });
        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
        let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        let tol = INTEGRALITY_TOL.max(T::EPS.sqrt());
        let shadow = eigenvalues
            .iter()
            .map(|&x| {
                let x = x.as_f64();
                let r = x.round();
                ((x - r).abs() < tol).then_some(r as i64)
            })
            .collect();
        Ok(WalkSystem {
            adjacency,
            eigenvalues,
            eigenvectors,
            shadow,
        })
    }

    pub fn from_graph(g: &Graph) -> Result<Self> {
        Self::new(g.to_dense())
    }

    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &DMatrix<T> {
        &self.adjacency
    }

    pub fn eigenvalues(&self) -> &DVector<T> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<T> {
        &self.eigenvectors
    }

    /// The rounded spectrum, ascending, when every eigenvalue is integral.
    pub fn integer_spectrum(&self) -> Option<Vec<i64>> {
        self.shadow.iter().copied().collect()
    }

    /// max |A - VΛVᵀ|.
    pub fn reconstruction_error(&self) -> f64 {
        let v = &self.eigenvectors;
        let rebuilt = v * DMatrix::from_diagonal(&self.eigenvalues) * v.transpose();
        (rebuilt - &self.adjacency)
            .iter()
            .map(|x| x.abs().as_f64())
            .fold(0.0, f64::max)
    }

    /// U(t) = V exp(-itΛ) Vᵀ.
    pub fn evolve(&self, t: f64) -> DMatrix<Complex<T>> {
        let v = self.eigenvectors.map(|x| Complex::new(x, T::zero()));
        let phases = DMatrix::from_diagonal(&self.eigenvalues.map(|l| phase::<T>(-l.as_f64() * t)));
        &v * phases * v.transpose()
    }

    /// U(t)[b,a] without forming the whole matrix.
    pub fn amplitude(&self, a: usize, b: usize, t: f64) -> Complex<T> {
        let v = &self.eigenvectors;
        let mut acc = Complex::new(T::zero(), T::zero());
        for k in 0..self.n() {
            let w = v[(b, k)] * v[(a, k)];
            acc += phase::<T>(-self.eigenvalues[k].as_f64() * t) * w;
        }
        acc
    }

    pub fn fidelity(&self, a: usize, b: usize, t: f64) -> FidelityReport {
        let z = self.amplitude(a, b, t);
        let (re, im) = (z.re.as_f64(), z.im.as_f64());
        let f = re.hypot(im);
        let phase = if f > 0.0 {
            (re / f, im / f)
        } else {
            (1.0, 0.0)
        };
        FidelityReport {
            a,
            b,
            time: t,
            fidelity: f,
            phase,
        }
    }

    /// max |U(t)U(t)* - I|.
    pub fn unitarity_error(&self, t: f64) -> f64 {
        let u = self.evolve(t);
        let prod = &u * u.adjoint();
        let id = DMatrix::<Complex<T>>::identity(self.n(), self.n());
        (prod - id)
            .iter()
            .map(|z| (z.re * z.re + z.im * z.im).sqrt().as_f64())
            .fold(0.0, f64::max)
    }

    /// g = gcd(θ_max - θ) over the integer spectrum.
    pub fn spectral_gcd(&self) -> Result<i64> {
        let spec = self.integer_spectrum().ok_or_else(|| {
            let bad = self
                .eigenvalues
                .iter()
                .map(|x| x.as_f64())
                .find(|x| (x - x.round()).abs() >= INTEGRALITY_TOL);
            Error::NonIntegral {
                re: bad.unwrap_or(f64::NAN),
                im: 0.0,
            }
        })?;
        let top = *spec
            .last()
            .ok_or(Error::Unsupported("empty graph".into()))?;
        Ok(spec.iter().fold(0i64, |g, &t| g.gcd(&(top - t))))
    }

    /// Distinct eigenvalues, ascending, each with the sign s of the
    /// involution x -> partner[x] on its eigenspace (T E = s E), read off
    /// tr(T E)/tr(E). The sign is 0 when T fixes some vectors of the
    /// eigenspace and negates others; no transfer x -> partner[x] is then
    /// possible.
    pub fn signed_eigensystem(&self, partner: &[usize]) -> Result<Vec<(f64, i64)>> {
        let n = self.n();
        if partner.len() != n || (0..n).any(|x| partner[x] >= n || partner[partner[x]] != x) {
            return Err(Error::Unsupported(
                "partner map is not an involution of the vertices".into(),
            ));
        }
        let v = &self.eigenvectors;
        let mut out = Vec::new();
        let mut k = 0;
        while k < n {
            let start = k;
            let first = self.eigenvalues[k].as_f64();
            while k < n && (self.eigenvalues[k].as_f64() - first).abs() < CLUSTER_TOL {
                k += 1;
            }
            let mut tr = 0.0;
            for c in start..k {
                tr += (0..n)
                    .map(|x| (v[(partner[x], c)] * v[(x, c)]).as_f64())
                    .sum::<f64>();
            }
            let s = tr / (k - start) as f64;
            let sign = if (s - 1.0).abs() < CLUSTER_TOL {
                1
            } else if (s + 1.0).abs() < CLUSTER_TOL {
                -1
            } else {
                0
            };
            let mean = (start..k)
                .map(|c| self.eigenvalues[c].as_f64())
                .sum::<f64>()
                / (k - start) as f64;
            out.push((mean, sign));
        }
        Ok(out)
    }

    /// π/g from the integer spectrum.
    pub fn default_time(&self) -> Result<f64> {
        let g = self.spectral_gcd()?;
        if g == 0 {
            return Err(Error::Unsupported("graph has a single eigenvalue".into()));
        }
        Ok(std::f64::consts::PI / g as f64)
    }
}

fn phase<T: Scalar>(x: f64) -> Complex<T> {
    Complex::new(T::of(x.cos()), T::of(x.sin()))
}

/// Fidelities at τ and 3τ for every pair. Without an explicit time, τ is
/// π/g from the integer spectrum, and a non-integral spectrum is refused.
pub fn pst_scan<T: Scalar>(
    ws: &WalkSystem<T>,
    pairs: &[(usize, usize)],
    tau: Option<f64>,
) -> Result<Vec<FidelityReport>> {
    let tau = match tau {
        Some(t) => t,
        None => ws.default_time()?,
    };
    let mut out = Vec::with_capacity(2 * pairs.len());
    for &(a, b) in pairs {
        out.push(ws.fidelity(a, b, tau));
        out.push(ws.fidelity(a, b, 3.0 * tau));
    }
    Ok(out)
}

/// Summary of a transfer check at τ: worst deviation at odd multiples,
/// the best fidelity at τ/2 and the worst return at 2τ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransferCheck {
    pub tau: f64,
    pub pairs: usize,
    pub max_deviation: f64,
    pub max_half_time_fidelity: f64,
    pub min_return_fidelity: f64,
}

impl TransferCheck {
    pub fn passes(&self) -> bool {
        self.max_deviation < FIDELITY_TOL
            && self.max_half_time_fidelity < 1.0 - 1e-3
            && self.min_return_fidelity > 1.0 - FIDELITY_TOL
    }
}

pub fn transfer_check<T: Scalar>(
    ws: &WalkSystem<T>,
    pairs: &[(usize, usize)],
    tau: f64,
) -> Result<TransferCheck> {
    let reports = pst_scan(ws, pairs, Some(tau))?;
    let max_deviation = reports
        .iter()
        .map(|r| (1.0 - r.fidelity).abs())
        .fold(0.0, f64::max);
    let max_half_time_fidelity = pairs
        .iter()
        .map(|&(a, b)| ws.fidelity(a, b, tau / 2.0).fidelity)
        .fold(0.0, f64::max);
    let min_return_fidelity = pairs
        .iter()
        .map(|&(a, _)| ws.fidelity(a, a, 2.0 * tau).fidelity)
        .fold(1.0, f64::min);
    Ok(TransferCheck {
        tau,
        pairs: pairs.len(),
        max_deviation,
        max_half_time_fidelity,
        min_return_fidelity,
    })
}

/// (x, partner(x)) for every vertex when n ≤ `full`, otherwise for
/// `base` and 16 evenly spaced vertices.
pub fn sample_pairs(partner: &[usize], base: usize, full: usize) -> Vec<(usize, usize)> {
    let n = partner.len();
    if n <= full {
        return (0..n).map(|x| (x, partner[x])).collect();
    }
    let mut xs: Vec<usize> = (0..16).map(|i| i * n / 16).collect();
    xs.push(base);
    xs.sort_unstable();
    xs.dedup();
    xs.into_iter().map(|x| (x, partner[x])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn identity_at_zero() {
        let ws = WalkSystem::<f64>::from_graph(&Graph::cycle(5)).unwrap();
        let u = ws.evolve(0.0);
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(u[(i, j)].re, want, epsilon = 1e-12);
                assert_abs_diff_eq!(u[(i, j)].im, 0.0, epsilon = 1e-12);
            }
        }
        assert!(ws.reconstruction_error() < RECONSTRUCTION_TOL);
        assert!(ws.unitarity_error(1.3) < RECONSTRUCTION_TOL);
    }

    #[test]
    fn k2_transfers_at_half_pi() {
        let ws = WalkSystem::<f64>::from_graph(&Graph::complete(2)).unwrap();
        assert_eq!(ws.default_time().unwrap(), PI / 2.0);
        let r = ws.fidelity(0, 1, PI / 2.0);
        assert!((1.0 - r.fidelity).abs() < FIDELITY_TOL);
        // U(π/2) = -i·X
        assert_abs_diff_eq!(r.phase.1, -1.0, epsilon = 1e-12);
        let chk = transfer_check(&ws, &[(0, 1)], PI / 2.0).unwrap();
        assert!(chk.passes());
    }

    #[test]
    fn c4_antipodes() {
        let ws = WalkSystem::<f64>::from_graph(&Graph::cycle(4)).unwrap();
        assert_eq!(ws.integer_spectrum().unwrap(), vec![-2, 0, 0, 2]);
        let pairs = [(0, 2), (1, 3)];
        let reports = pst_scan(&ws, &pairs, None).unwrap();
        assert_eq!(reports.len(), 4);
        assert!(reports
            .iter()
            .all(|r| (1.0 - r.fidelity).abs() < FIDELITY_TOL));
        assert!(transfer_check(&ws, &pairs, PI / 2.0).unwrap().passes());
        // adjacent vertices never see full transfer at π/2
        assert!(ws.fidelity(0, 1, PI / 2.0).fidelity < 1e-9);
        let signed = ws.signed_eigensystem(&[2, 3, 0, 1]).unwrap();
        let rounded: Vec<(i64, i64)> = signed.iter().map(|&(t, s)| (t.round() as i64, s)).collect();
        assert_eq!(rounded, vec![(-2, 1), (0, -1), (2, 1)]);
        // a reflection of the square fixes some eigenvectors and flips others in the 0-eigenspace
        let mixed = ws.signed_eigensystem(&[0, 3, 2, 1]).unwrap();
        assert_eq!(
            mixed.iter().map(|&(_, s)| s).collect::<Vec<_>>(),
            vec![1, 0, 1]
        );
        assert!(ws.signed_eigensystem(&[1, 2, 3, 0]).is_err());
    }

    #[test]
    fn p3_needs_explicit_time() {
        let ws = WalkSystem::<f64>::from_graph(&Graph::path(3)).unwrap();
        assert!(ws.integer_spectrum().is_none());
        assert!(pst_scan(&ws, &[(0, 2)], None).is_err());
        let t = PI / 2f64.sqrt();
        let r = pst_scan(&ws, &[(0, 2)], Some(t)).unwrap();
        assert!(r.iter().all(|r| (1.0 - r.fidelity).abs() < FIDELITY_TOL));
    }

    #[test]
    fn single_precision() {
        let ws = WalkSystem::<f32>::from_graph(&Graph::cycle(4)).unwrap();
        assert!(ws.reconstruction_error() < 1e-5);
        assert!((1.0 - ws.fidelity(0, 2, PI / 2.0).fidelity).abs() < 1e-5);
    }

    #[test]
    fn rejects_asymmetric() {
        let mut m = DMatrix::<f64>::zeros(2, 2);
        m[(0, 1)] = 1.0;
        assert!(WalkSystem::new(m).is_err());
    }

    #[test]
    fn sampling() {
        let partner: Vec<usize> = (0..10).map(|x| x ^ 1).collect();
        assert_eq!(sample_pairs(&partner, 0, 150).len(), 10);
        let partner: Vec<usize> = (0..480).map(|x| x ^ 1).collect();
        let s = sample_pairs(&partner, 7, 150);
        assert_eq!(s.len(), 17);
        assert!(s.contains(&(7, 6)));
    }
}
