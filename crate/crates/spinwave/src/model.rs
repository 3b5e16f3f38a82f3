//! Model parameters and the scalar quantities derived from them:
//! coupling rates, the collective-mode identifiers, beta, and the
//! oscillation period of the slow envelope.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;

/// Nondegeneracy guard for the coupling gap, in units of `k1^2`.
///
/// Parameter sets with `|k1^2 - k2^2| <= EPS_DEG * k1^2` (bipartite) or
/// `|k1^2 + k3^2 - k2^2| <= EPS_DEG * k1^2` (tripartite) are rejected: on
/// that resonance the closed-form solutions degenerate and the regime
/// needs a different treatment.
pub const EPS_DEG: f64 = 1e-6;

/// Default atom count used for `ProductState` means when none is given.
pub const DEFAULT_N_ATOMS: u64 = 1_000_000;

/// Identifies one of the collective modes.
///
/// `Spin` is the collective atomic spin wave S; `Field1` and `Field3` are
/// the Stokes fields coupled through squeezing-type interactions; `Field2`
/// is the anti-Stokes field coupled through a beam-splitter-type
/// interaction. `Field3` only exists in tripartite contexts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeId {
    Spin,
    Field1,
    Field2,
    Field3,
}

impl ModeId {
    /// Position of the mode in the ordered basis (S, a1, a2, a3).
    pub fn index(self) -> usize {
        match self {
            ModeId::Spin => 0,
            ModeId::Field1 => 1,
            ModeId::Field2 => 2,
            ModeId::Field3 => 3,
        }
    }

    /// Inverse of [`ModeId::index`].
    pub fn from_index(index: usize) -> Option<ModeId> {
        match index {
            0 => Some(ModeId::Spin),
            1 => Some(ModeId::Field1),
            2 => Some(ModeId::Field2),
            3 => Some(ModeId::Field3),
            _ => None,
        }
    }

    /// True for the optical field modes, false for the spin wave.
    pub fn is_photonic(self) -> bool {
        !matches!(self, ModeId::Spin)
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ModeId::Spin => "Spin",
            ModeId::Field1 => "Field1",
            ModeId::Field2 => "Field2",
            ModeId::Field3 => "Field3",
        };
        f.write_str(name)
    }
}

/// The c-number constants of the effective model.
///
/// `k1` couples the spin wave and Stokes field a1 (squeezing type,
/// `k1(a1† S† + a1 S)`), `k2` couples the spin wave and anti-Stokes field
/// a2 (beam-splitter type, `k2(a2† S + a2 S†)`), and the optional `k3`
/// couples a second Stokes field a3 (squeezing type). `c` is the exchange
/// constant of motion treated as a real c-number; time is dimensionless,
/// expressed as `k1 t`, so `k1 = 1` is the natural normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    k1: f64,
    k2: f64,
    k3: Option<f64>,
    c: f64,
}

impl CouplingParams {
    /// Bipartite parameter set (spin wave + fields a1, a2).
    pub fn bipartite(k1: f64, k2: f64, c: f64) -> Result<Self> {
        Self::new(k1, k2, None, c)
    }

    /// Tripartite parameter set (spin wave + fields a1, a2, a3).
    pub fn tripartite(k1: f64, k2: f64, k3: f64, c: f64) -> Result<Self> {
        Self::new(k1, k2, Some(k3), c)
    }

    fn new(k1: f64, k2: f64, k3: Option<f64>, c: f64) -> Result<Self> {
        if !k1.is_finite() || k1 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "k1 must be finite and > 0, got {k1}"
            )));
        }
        if !k2.is_finite() || k2 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "k2 must be finite and >= 0, got {k2}"
            )));
        }
        if let Some(k3) = k3 {
            if !k3.is_finite() || k3 < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "k3 must be finite and >= 0, got {k3}"
                )));
            }
        }
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "c must be finite, got {c}"
            )));
        }
        let params = CouplingParams { k1, k2, k3, c };
        let gap = params.coupling_gap();
        let threshold = EPS_DEG * k1 * k1;
        if gap.abs() <= threshold {
            return Err(Error::DegenerateCouplings {
                gap,
                threshold,
                tri: if k3.is_some() { " + k3^2" } else { "" },
            });
        }
        Ok(params)
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    /// `Some(k3)` for tripartite parameter sets, `None` for bipartite.
    pub fn k3(&self) -> Option<f64> {
        self.k3
    }

    /// The exchange constant of motion.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn is_tripartite(&self) -> bool {
        self.k3.is_some()
    }

    /// Mode count including the spin wave: 3 (bipartite) or 4 (tripartite).
    pub fn n_modes(&self) -> usize {
        if self.is_tripartite() {
            4
        } else {
            3
        }
    }

    /// The coupling gap `k1^2 - k2^2` (bipartite) or `k1^2 + k3^2 - k2^2`
    /// (tripartite) appearing under the square root in beta and as the
    /// restoring coefficient of the spin equation of motion.
    pub fn coupling_gap(&self) -> f64 {
        match self.k3 {
            None => self.k1 * self.k1 - self.k2 * self.k2,
            Some(k3) => self.k1 * self.k1 + k3 * k3 - self.k2 * self.k2,
        }
    }

    /// beta = principal square root of `c^2 - gap`.
    ///
    /// Purely imaginary values are permitted and meaningful: they realize
    /// the analytic continuation used by the squeezing limit (`c = 0`,
    /// `k2 = 0`), where the closed forms turn trigonometric functions into
    /// hyperbolic ones.
    pub fn beta(&self) -> Complex64 {
        Complex64::new(self.c * self.c - self.coupling_gap(), 0.0).sqrt()
    }
}

/// Oscillation period of the slow envelope, with the large-`c`
/// approximation alongside the exact value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Period {
    /// `2*pi / | |c| - beta |`.
    pub exact: f64,
    /// `4*pi*|c| / |gap|`.
    pub approx: f64,
}

/// Period of the slow envelope of the closed-form coefficients (and hence
/// of every moment-derived time series such as the Duan V).
///
/// Defined for both arities whenever beta is real (`c^2 > gap`); the
/// tripartite case uses the tripartite beta and gap. Errors with
/// [`Error::ComplexBeta`] in the squeezing-dominated regime where no
/// oscillation exists.
pub fn oscillation_period(params: &CouplingParams) -> Result<Period> {
    let gap = params.coupling_gap();
    let disc = params.c * params.c - gap;
    if disc <= 0.0 {
        return Err(Error::ComplexBeta { discriminant: disc });
    }
    let beta = disc.sqrt();
    let exact = 2.0 * std::f64::consts::PI / (params.c.abs() - beta).abs();
    let approx = 4.0 * std::f64::consts::PI * params.c.abs() / gap.abs();
    Ok(Period { exact, approx })
}

/// Microscopic quantities determining an effective coupling rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalCouplings {
    /// Atom-field coupling coefficient (rate units).
    pub g: f64,
    /// Rabi frequency of the scattering drive field (rate units).
    pub omega_rabi: f64,
    /// Atom count.
    pub n_atoms: u64,
    /// Detuning from the excited state (rate units, nonzero).
    pub delta: f64,
}

impl PhysicalCouplings {
    pub fn new(g: f64, omega_rabi: f64, n_atoms: u64, delta: f64) -> Result<Self> {
        if !g.is_finite() || !omega_rabi.is_finite() || !delta.is_finite() {
            return Err(Error::InvalidParameter(
                "physical couplings must be finite".into(),
            ));
        }
        if n_atoms < 1 {
            return Err(Error::InvalidParameter("n_atoms must be >= 1".into()));
        }
        if delta == 0.0 {
            return Err(Error::ZeroDetuning);
        }
        Ok(PhysicalCouplings {
            g,
            omega_rabi,
            n_atoms,
            delta,
        })
    }
}

/// Effective coupling rate `g * omega_rabi * sqrt(n_atoms) / delta`
/// produced by the collective enhancement of the ensemble.
pub fn coupling_from_physical(phys: &PhysicalCouplings) -> Result<f64> {
    if phys.delta == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    Ok(phys.g * phys.omega_rabi * (phys.n_atoms as f64).sqrt() / phys.delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn beta_bipartite_reference_value() {
        let p = CouplingParams::bipartite(1.0, 0.3, 30.0).unwrap();
        let b = p.beta();
        assert_relative_eq!(b.re, 29.984_829_497_6, max_relative = 1e-10);
        assert_eq!(b.im, 0.0);
    }

    #[test]
    fn beta_tripartite_reference_value() {
        let p = CouplingParams::tripartite(1.0, 1.0, 1.0, 30.0).unwrap();
        assert_relative_eq!(p.beta().re, 29.983_328_701_1, max_relative = 1e-10);
    }

    #[test]
    fn beta_pure_squeezing_is_imaginary_unit() {
        let p = CouplingParams::bipartite(1.0, 0.0, 0.0).unwrap();
        let b = p.beta();
        assert_eq!(b.re, 0.0);
        assert_relative_eq!(b.im, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn period_reference_values() {
        let p = CouplingParams::bipartite(1.0, 0.3, 30.0).unwrap();
        let period = oscillation_period(&p).unwrap();
        assert_relative_eq!(period.exact, 414.171_208, max_relative = 1e-8);
        assert_relative_eq!(period.approx, 414.275_954, max_relative = 1e-8);

        let p = CouplingParams::bipartite(1.0, 3.0, 30.0).unwrap();
        let period = oscillation_period(&p).unwrap();
        assert_relative_eq!(period.exact, 47.228_378, max_relative = 1e-7);
        assert_relative_eq!(period.approx, 47.123_890, max_relative = 1e-7);

        // approximation quality at the two reference sets
        let p = CouplingParams::bipartite(1.0, 0.3, 30.0).unwrap();
        let period = oscillation_period(&p).unwrap();
        assert!((period.approx / period.exact - 1.0).abs() < 5e-3);
    }

    #[test]
    fn period_tripartite_reference_value() {
        let p = CouplingParams::tripartite(1.0, 1.0, 1.0, 30.0).unwrap();
        let period = oscillation_period(&p).unwrap();
        assert_relative_eq!(period.exact, 376.886_370, max_relative = 1e-8);
    }

    #[test]
    fn period_rejects_imaginary_beta() {
        let p = CouplingParams::bipartite(1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            oscillation_period(&p),
            Err(Error::ComplexBeta { .. })
        ));
    }

    #[test]
    fn degenerate_couplings_rejected() {
        assert!(matches!(
            CouplingParams::bipartite(1.0, 1.0, 30.0),
            Err(Error::DegenerateCouplings { .. })
        ));
        // tripartite resonance k2^2 = k1^2 + k3^2
        let k2 = (1.0f64 + 0.25).sqrt();
        assert!(matches!(
            CouplingParams::tripartite(1.0, k2, 0.5, 30.0),
            Err(Error::DegenerateCouplings { .. })
        ));
        // just outside the guard is accepted
        assert!(CouplingParams::bipartite(1.0, 1.001, 30.0).is_ok());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(CouplingParams::bipartite(0.0, 0.3, 30.0).is_err());
        assert!(CouplingParams::bipartite(-1.0, 0.3, 30.0).is_err());
        assert!(CouplingParams::bipartite(1.0, -0.1, 30.0).is_err());
        assert!(CouplingParams::bipartite(1.0, 0.3, f64::NAN).is_err());
        assert!(CouplingParams::tripartite(1.0, 0.3, -2.0, 30.0).is_err());
    }

    #[test]
    fn coupling_from_physical_examples() {
        let phys = PhysicalCouplings::new(1.0, 1.0, 1, 1.0).unwrap();
        assert_eq!(coupling_from_physical(&phys).unwrap(), 1.0);

        let phys = PhysicalCouplings::new(0.5, 2.0, 10_000, 100.0).unwrap();
        assert_relative_eq!(coupling_from_physical(&phys).unwrap(), 1.0);

        assert!(matches!(
            PhysicalCouplings::new(1.0, 1.0, 4, 0.0),
            Err(Error::ZeroDetuning)
        ));
    }

    #[test]
    fn mode_id_roundtrip() {
        for (i, mode) in [ModeId::Spin, ModeId::Field1, ModeId::Field2, ModeId::Field3]
            .iter()
            .enumerate()
        {
            assert_eq!(mode.index(), i);
            assert_eq!(ModeId::from_index(i), Some(*mode));
        }
        assert_eq!(ModeId::from_index(4), None);
        assert!(!ModeId::Spin.is_photonic());
        assert!(ModeId::Field3.is_photonic());
    }
}
