//! First and centered second moments of the collective modes, their
//! initialization for the two spin conventions, and their propagation
//! through a Bogoliubov transform.

use crate::bogoliubov::BogoliubovTransform;
use crate::error::{Error, Result};
use crate::model::ModeId;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// How the initial spin-wave fluctuations enter the moment table.
///
/// The atomic ensemble starts in the balanced product superposition
/// `⊗_i (|1⟩_i + |2⟩_i)/sqrt(2)`. Its collective spin operator
/// `S = (1/sqrt(N)) Σ_i |1⟩⟨2|_i` then has the exact moments
/// `⟨S⟩ = sqrt(N)/2`, centered `⟨S†S⟩c = 1/4` and `⟨S²⟩c = -1/4`
/// (`ProductState`). Treating the spin wave instead as a bosonized mode in
/// vacuum gives `⟨S⟩ = 0`, `⟨S†S⟩c = 0`, `⟨S²⟩c = 0` (`BosonicVacuum`).
/// Both conventions are provided; physicality assertions (uncertainty
/// products) hold only under `BosonicVacuum`, since `⟨S²⟩c = -1/4` is not
/// realizable by any single bosonic state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinConvention {
    ProductState,
    BosonicVacuum,
}

impl SpinConvention {
    /// Stable lower-case name used by configuration files and reports.
    pub fn name(self) -> &'static str {
        match self {
            SpinConvention::ProductState => "product",
            SpinConvention::BosonicVacuum => "bosonic",
        }
    }

    /// Inverse of [`SpinConvention::name`]; accepts the long forms too.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "product" | "product-state" | "ProductState" => Some(SpinConvention::ProductState),
            "bosonic" | "bosonic-vacuum" | "BosonicVacuum" => Some(SpinConvention::BosonicVacuum),
            _ => None,
        }
    }
}

/// First moments and centered second moments of `n` modes.
///
/// Internally the table stores the mean vector `⟨a_i⟩` and the full
/// `2n x 2n` centered ordered-moment matrix `G_ij = ⟨ξ_i ξ_j⟩ - ⟨ξ_i⟩⟨ξ_j⟩`
/// over the stacked vector `ξ = (a_0, ..., a_{n-1}, a_0†, ..., a_{n-1}†)`.
/// The full matrix is required (rather than the `cov_nn`/`cov_aa` pair
/// alone) because the `ProductState` spin mode is not bosonic: its
/// `⟨SS†⟩c = ⟨S†S⟩c = 1/4` breaks the canonical relation that would let
/// `⟨a a†⟩` be reconstructed from `⟨a† a⟩ + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    n_modes: usize,
    mean: DVector<Complex64>,
    second: DMatrix<Complex64>,
}

impl MomentTable {
    /// Build a table from raw parts. `second` must be `2n x 2n`.
    pub fn from_raw(mean: DVector<Complex64>, second: DMatrix<Complex64>) -> Result<Self> {
        let n = mean.len();
        if second.nrows() != 2 * n || second.ncols() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                got: second.nrows().max(second.ncols()),
            });
        }
        Ok(MomentTable {
            n_modes: n,
            mean,
            second,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Mean vector `⟨a_i⟩`.
    pub fn mean(&self) -> &DVector<Complex64> {
        &self.mean
    }

    /// The full centered ordered-moment matrix over `(a_0..a_{n-1}, a_0†..a_{n-1}†)`.
    pub fn second_moments(&self) -> &DMatrix<Complex64> {
        &self.second
    }

    /// Centered normal-ordered block: entry `(i, j)` is `⟨a_i† a_j⟩c`.
    pub fn cov_nn(&self) -> DMatrix<Complex64> {
        let n = self.n_modes;
        DMatrix::from_fn(n, n, |i, j| self.second[(n + i, j)])
    }

    /// Centered annihilation block: entry `(i, j)` is `⟨a_i a_j⟩c`.
    pub fn cov_aa(&self) -> DMatrix<Complex64> {
        let n = self.n_modes;
        DMatrix::from_fn(n, n, |i, j| self.second[(i, j)])
    }

    /// Max deviation from conjugation closure: ordered second moments of
    /// any state satisfy `⟨ξ_i ξ_j⟩c* = ⟨ξ_j̄ ξ_ī⟩c`, where the bar swaps
    /// the annihilation and creation halves of the index range. This
    /// invariant makes no assumption about commutators (the product-state
    /// spin is deliberately non-bosonic) and is preserved exactly by
    /// moment propagation through any conjugate-structured transform.
    pub fn structure_defect(&self) -> f64 {
        let n = self.n_modes;
        let bar = |i: usize| if i < n { i + n } else { i - n };
        let mut worst = 0.0f64;
        for i in 0..2 * n {
            for j in 0..2 * n {
                let d = (self.second[(i, j)].conj() - self.second[(bar(j), bar(i))]).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Copy of the table with `shift[i]` added to each mean. Centered
    /// moments are untouched; used to check displacement invariance of the
    /// entanglement criteria.
    pub fn displaced(&self, shifts: &[Complex64]) -> Result<Self> {
        if shifts.len() != self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                got: shifts.len(),
            });
        }
        let mut out = self.clone();
        for (i, s) in shifts.iter().enumerate() {
            out.mean[i] += s;
        }
        Ok(out)
    }

    /// Variance of the Hermitian combination `u = Σ_k w_k ξ_k`
    /// (the caller guarantees hermiticity; the imaginary part, which is
    /// pure roundoff in that case, is discarded).
    pub(crate) fn variance_of(&self, w: &DVector<Complex64>) -> f64 {
        let gw = &self.second * w;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..w.len() {
            acc += w[i] * gw[i];
        }
        acc.re
    }

    /// Weight vector (length `2n`) of the quadrature `x = a + a†` of `mode`.
    pub(crate) fn x_weights(&self, mode: usize) -> DVector<Complex64> {
        let n = self.n_modes;
        let mut w = DVector::zeros(2 * n);
        w[mode] = Complex64::new(1.0, 0.0);
        w[n + mode] = Complex64::new(1.0, 0.0);
        w
    }

    /// Weight vector of the quadrature `p = -i (a - a†)` of `mode`.
    pub(crate) fn p_weights(&self, mode: usize) -> DVector<Complex64> {
        let n = self.n_modes;
        let mut w = DVector::zeros(2 * n);
        w[mode] = Complex64::new(0.0, -1.0);
        w[n + mode] = Complex64::new(0.0, 1.0);
        w
    }
}

/// Initial moment table for `n_modes` (3 bipartite, 4 tripartite) under
/// the given spin convention.
///
/// All photonic modes start in vacuum: zero mean, `⟨a a†⟩c = 1`, all other
/// centered second moments zero. The spin mode follows the convention;
/// `n_atoms` only enters the `ProductState` mean `⟨S⟩ = sqrt(n_atoms)/2`
/// (the centered spin moments are N-independent).
pub fn initial_moments(
    convention: SpinConvention,
    n_modes: usize,
    n_atoms: u64,
) -> Result<MomentTable> {
    if n_modes != 3 && n_modes != 4 {
        return Err(Error::InvalidParameter(format!(
            "n_modes must be 3 or 4, got {n_modes}"
        )));
    }
    let n = n_modes;
    let mut mean = DVector::<Complex64>::zeros(n);
    let mut second = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for m in 1..n {
        second[(m, n + m)] = Complex64::new(1.0, 0.0); // ⟨a a†⟩c photonic vacuum
    }
    match convention {
        SpinConvention::BosonicVacuum => {
            second[(0, n)] = Complex64::new(1.0, 0.0);
        }
        SpinConvention::ProductState => {
            if n_atoms < 2 {
                return Err(Error::AtomCountOutOfRange {
                    got: n_atoms,
                    min: 2,
                    max: u64::MAX,
                });
            }
            second[(0, 0)] = Complex64::new(-0.25, 0.0); // ⟨S²⟩c
            second[(n, n)] = Complex64::new(-0.25, 0.0); // ⟨S†²⟩c
            second[(0, n)] = Complex64::new(0.25, 0.0); // ⟨SS†⟩c
            second[(n, 0)] = Complex64::new(0.25, 0.0); // ⟨S†S⟩c
            mean[0] = Complex64::new((n_atoms as f64).sqrt() / 2.0, 0.0);
        }
    }
    MomentTable::from_raw(mean, second)
}

/// Push a moment table through a Bogoliubov transform:
/// stacked means map by `M`, the centered ordered-moment matrix by
/// `M G Mᵀ` (transpose, not adjoint — the second index of `G` transforms
/// with the same coefficients as the first).
pub fn evolve_moments(
    transform: &BogoliubovTransform,
    initial: &MomentTable,
) -> Result<MomentTable> {
    let n = initial.n_modes();
    if transform.n_modes() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: transform.n_modes(),
        });
    }
    let m = transform.matrix();
    let mut stacked = DVector::<Complex64>::zeros(2 * n);
    for i in 0..n {
        stacked[i] = initial.mean[i];
        stacked[n + i] = initial.mean[i].conj();
    }
    let evolved = m * stacked;
    let mean = DVector::from_fn(n, |i, _| evolved[i]);
    let second = m * &initial.second * m.transpose();
    MomentTable::from_raw(mean, second)
}

/// Look up a mode's index within a table, checking arity.
pub(crate) fn mode_index(table: &MomentTable, mode: ModeId) -> Result<usize> {
    let idx = mode.index();
    if idx >= table.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: table.n_modes(),
            got: idx,
        });
    }
    Ok(idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CouplingParams;
    use approx::assert_relative_eq;

    #[test]
    fn bosonic_vacuum_initial_moments() {
        let t = initial_moments(SpinConvention::BosonicVacuum, 3, 1).unwrap();
        assert_eq!(t.n_modes(), 3);
        for i in 0..3 {
            assert_eq!(t.mean()[i], Complex64::new(0.0, 0.0));
        }
        // all centered normal-ordered and anomalous moments vanish
        assert!(t.cov_nn().iter().all(|z| z.norm() == 0.0));
        assert!(t.cov_aa().iter().all(|z| z.norm() == 0.0));
        // but ⟨a a†⟩c = 1 on every mode
        for m in 0..3 {
            assert_eq!(t.second_moments()[(m, 3 + m)], Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn product_state_initial_moments() {
        for n_atoms in [6u64, 10] {
            let t = initial_moments(SpinConvention::ProductState, 3, n_atoms).unwrap();
            assert_relative_eq!(t.mean()[0].re, (n_atoms as f64).sqrt() / 2.0);
            // centered values are n_atoms-independent
            assert_eq!(t.second_moments()[(3, 0)], Complex64::new(0.25, 0.0));
            assert_eq!(t.second_moments()[(0, 0)], Complex64::new(-0.25, 0.0));
            assert_eq!(t.cov_nn()[(0, 0)], Complex64::new(0.25, 0.0));
            assert_eq!(t.cov_aa()[(0, 0)], Complex64::new(-0.25, 0.0));
        }
    }

    #[test]
    fn product_state_requires_two_atoms() {
        assert!(matches!(
            initial_moments(SpinConvention::ProductState, 3, 1),
            Err(Error::AtomCountOutOfRange { .. })
        ));
    }

    #[test]
    fn mode_count_validated() {
        assert!(initial_moments(SpinConvention::BosonicVacuum, 2, 1).is_err());
        assert!(initial_moments(SpinConvention::BosonicVacuum, 5, 1).is_err());
    }

    #[test]
    fn identity_evolution_is_noop() {
        let t0 = initial_moments(SpinConvention::ProductState, 4, 100).unwrap();
        let id = BogoliubovTransform::identity(4);
        let t1 = evolve_moments(&id, &t0).unwrap();
        assert_eq!(t0, t1);
    }

    #[test]
    fn two_mode_squeezing_photon_number() {
        // c = 0, k2 = 0, k1 t = r: Field1 centered ⟨a†a⟩ = sinh²(r)
        let p = CouplingParams::bipartite(1.0, 0.0, 0.0).unwrap();
        let r = 1.0;
        let m = BogoliubovTransform::bipartite(&p, r).unwrap();
        let t0 = initial_moments(SpinConvention::BosonicVacuum, 3, 1).unwrap();
        let t1 = evolve_moments(&m, &t0).unwrap();
        assert_relative_eq!(t1.cov_nn()[(1, 1)].re, 1.381_097_845_5, max_relative = 1e-9);
        assert!(t1.cov_nn()[(1, 1)].im.abs() < 1e-12);
    }

    #[test]
    fn evolution_preserves_structure() {
        let p = CouplingParams::tripartite(1.0, 1.0, 0.6, 30.0).unwrap();
        let m = BogoliubovTransform::tripartite(&p, 7.3).unwrap();
        for conv in [SpinConvention::BosonicVacuum, SpinConvention::ProductState] {
            let t0 = initial_moments(conv, 4, 1000).unwrap();
            let t1 = evolve_moments(&m, &t0).unwrap();
            assert!(t1.structure_defect() < 1e-12);
        }
        // bosonic-only invariants: the symplectic transform preserves the
        // commutators, so ⟨a_i a_j⟩ stays symmetric and ⟨a_i†a_j⟩ Hermitian
        let t0 = initial_moments(SpinConvention::BosonicVacuum, 4, 1).unwrap();
        let t1 = evolve_moments(&m, &t0).unwrap();
        let aa = t1.cov_aa();
        let nn = t1.cov_nn();
        let asym = (&aa - aa.transpose())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let nonherm = (&nn - nn.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(asym < 1e-12, "aa asymmetry {asym:.3e}");
        assert!(nonherm < 1e-12, "nn non-hermiticity {nonherm:.3e}");
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let t0 = initial_moments(SpinConvention::BosonicVacuum, 3, 1).unwrap();
        let id4 = BogoliubovTransform::identity(4);
        assert!(matches!(
            evolve_moments(&id4, &t0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn convention_names_roundtrip() {
        for conv in [SpinConvention::ProductState, SpinConvention::BosonicVacuum] {
            assert_eq!(SpinConvention::parse(conv.name()), Some(conv));
        }
        assert_eq!(SpinConvention::parse("nonsense"), None);
    }
}
