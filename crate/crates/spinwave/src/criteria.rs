//! Entanglement criteria on moment tables: the Duan two-mode
//! inseparability test, the van Loock–Furusawa (VLF) tripartite
//! inequalities with their closed-form gains, and photon numbers.
//!
//! Quadrature convention: `x = a + a†`, `p = -i (a - a†)`, so a vacuum
//! mode has `Var(x) = Var(p) = 1` and both criteria use the bound 4.

use crate::error::{Error, Result};
use crate::model::ModeId;
use crate::moments::{mode_index, MomentTable};
use num_complex::Complex64;

/// Guard for the gain denominators: a p-variance below this is treated as
/// zero and the corresponding gain is set to 0 (reported via the flag).
pub const EPS_VAR: f64 = 1e-12;

/// Numerical floor: computed variances may round slightly below zero;
/// anything beyond this is a bug, anything within is clamped to 0.
pub const VAR_FLOOR: f64 = -1e-10;

fn clamp_var(v: f64) -> f64 {
    debug_assert!(v >= VAR_FLOOR, "variance {v} below numerical floor");
    v.max(0.0)
}

/// Duan inseparability combination
/// `V = Var(x_1 + x_2) + Var(p_1 - p_2)` over the fields a1 and a2.
/// Entanglement is certified when `V < 4`.
pub fn duan_v(moments: &MomentTable) -> Result<f64> {
    let i1 = mode_index(moments, ModeId::Field1)?;
    let i2 = mode_index(moments, ModeId::Field2)?;
    let u = moments.x_weights(i1) + moments.x_weights(i2);
    let v = moments.p_weights(i1) - moments.p_weights(i2);
    Ok(clamp_var(moments.variance_of(&u)) + clamp_var(moments.variance_of(&v)))
}

/// The three VLF gains with their guard flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VlfGains {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    /// `guarded[i]` is true when `g_{i+1}`'s denominator fell below
    /// [`EPS_VAR`] and the gain was forced to 0.
    pub guarded: [bool; 3],
}

impl VlfGains {
    pub fn as_tuple(&self) -> (f64, f64, f64) {
        (self.g1, self.g2, self.g3)
    }
}

/// Symmetrized centered p-quadrature moment
/// `½⟨p_i p_j + p_j p_i⟩ - ⟨p_i⟩⟨p_j⟩`.
fn p_moment(moments: &MomentTable, i: usize, j: usize) -> f64 {
    let wi = moments.p_weights(i);
    let wj = moments.p_weights(j);
    let gwj = moments.second_moments() * &wj;
    let gwi = moments.second_moments() * &wi;
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for k in 0..wi.len() {
        acc += wi[k] * gwj[k] + wj[k] * gwi[k];
    }
    0.5 * acc.re
}

/// Optimal VLF gains from the centered p-moments:
/// `g1 = -(P12 - P13)/P11`, `g2 = -(P12 + P23)/P22`,
/// `g3 = -(P13 - P23)/P33`, where `P_ij` is the symmetrized centered
/// `⟨p_i p_j⟩` of fields i and j. These are exactly the least-squares
/// gains minimizing the three VLF p-combinations.
pub fn vlf_gains(moments: &MomentTable) -> Result<VlfGains> {
    let i1 = mode_index(moments, ModeId::Field1)?;
    let i2 = mode_index(moments, ModeId::Field2)?;
    let i3 = mode_index(moments, ModeId::Field3)?;
    let p11 = p_moment(moments, i1, i1);
    let p22 = p_moment(moments, i2, i2);
    let p33 = p_moment(moments, i3, i3);
    let p12 = p_moment(moments, i1, i2);
    let p13 = p_moment(moments, i1, i3);
    let p23 = p_moment(moments, i2, i3);

    let mut guarded = [false; 3];
    let mut guard = |num: f64, den: f64, slot: usize| -> f64 {
        if den.abs() < EPS_VAR {
            guarded[slot] = true;
            0.0
        } else {
            -num / den
        }
    };
    let g1 = guard(p12 - p13, p11, 0);
    let g2 = guard(p12 + p23, p22, 1);
    let g3 = guard(p13 - p23, p33, 2);
    Ok(VlfGains {
        g1,
        g2,
        g3,
        guarded,
    })
}

/// The three VLF combination variances with the supplied gains:
/// `V12 = Var(x1 + x2) + Var(p1 - p2 + g3 p3)`,
/// `V13 = Var(x1 - x3) + Var(p1 + g2 p2 + p3)`,
/// `V23 = Var(x2 + x3) + Var(g1 p1 + p2 - p3)`.
/// Tripartite entanglement is certified when at least two are below 4.
pub fn vlf_correlations(moments: &MomentTable, gains: &VlfGains) -> Result<(f64, f64, f64)> {
    let i1 = mode_index(moments, ModeId::Field1)?;
    let i2 = mode_index(moments, ModeId::Field2)?;
    let i3 = mode_index(moments, ModeId::Field3)?;
    let x1 = moments.x_weights(i1);
    let x2 = moments.x_weights(i2);
    let x3 = moments.x_weights(i3);
    let p1 = moments.p_weights(i1);
    let p2 = moments.p_weights(i2);
    let p3 = moments.p_weights(i3);

    let c = |g: f64| Complex64::new(g, 0.0);
    let v12 = clamp_var(moments.variance_of(&(&x1 + &x2)))
        + clamp_var(moments.variance_of(&(&p1 - &p2 + &p3 * c(gains.g3))));
    let v13 = clamp_var(moments.variance_of(&(&x1 - &x3)))
        + clamp_var(moments.variance_of(&(&p1 + &p2 * c(gains.g2) + &p3)));
    let v23 = clamp_var(moments.variance_of(&(&x2 + &x3)))
        + clamp_var(moments.variance_of(&(&p1 * c(gains.g1) + &p2 - &p3)));
    Ok((v12, v13, v23))
}

/// At least two of the three VLF inequalities strictly below 4.
pub fn tripartite_verdict(v: (f64, f64, f64)) -> bool {
    let below = [v.0, v.1, v.2].iter().filter(|&&x| x < 4.0).count();
    below >= 2
}

/// Total and fluctuation photon number of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonNumbers {
    /// `⟨a†a⟩ = fluctuation + |⟨a⟩|²`.
    pub total: f64,
    /// Centered `⟨a†a⟩c`.
    pub fluctuation: f64,
}

/// Photon numbers of a photonic mode. The spin mode is rejected: its
/// `ProductState` moments are not photon numbers.
pub fn mean_photon(moments: &MomentTable, mode: ModeId) -> Result<PhotonNumbers> {
    if !mode.is_photonic() {
        return Err(Error::NotPhotonic(mode));
    }
    let idx = mode_index(moments, mode)?;
    let n = moments.n_modes();
    let fluctuation = clamp_var(moments.second_moments()[(n + idx, idx)].re);
    let total = fluctuation + moments.mean()[idx].norm_sqr();
    Ok(PhotonNumbers { total, fluctuation })
}

/// Evaluation of one entanglement criterion on a moment table, with the
/// photon numbers of the participating fields.
#[derive(Debug, Clone, PartialEq)]
pub enum EntanglementReport {
    DuanBipartite {
        v: f64,
        /// True iff `v < 4`.
        verdict: bool,
        /// Photon numbers of (Field1, Field2).
        photon_numbers: [PhotonNumbers; 2],
    },
    VlfTripartite {
        v: (f64, f64, f64),
        gains: VlfGains,
        /// True iff at least two of the three values are below 4.
        verdict: bool,
        /// Photon numbers of (Field1, Field2, Field3).
        photon_numbers: [PhotonNumbers; 3],
    },
}

impl EntanglementReport {
    /// Duan report over fields a1 and a2.
    pub fn bipartite(moments: &MomentTable) -> Result<Self> {
        let v = duan_v(moments)?;
        Ok(EntanglementReport::DuanBipartite {
            v,
            verdict: v < 4.0,
            photon_numbers: [
                mean_photon(moments, ModeId::Field1)?,
                mean_photon(moments, ModeId::Field2)?,
            ],
        })
    }

    /// VLF report over fields a1, a2, a3 with the closed-form gains.
    pub fn tripartite(moments: &MomentTable) -> Result<Self> {
        let gains = vlf_gains(moments)?;
        let v = vlf_correlations(moments, &gains)?;
        Ok(EntanglementReport::VlfTripartite {
            v,
            gains,
            verdict: tripartite_verdict(v),
            photon_numbers: [
                mean_photon(moments, ModeId::Field1)?,
                mean_photon(moments, ModeId::Field2)?,
                mean_photon(moments, ModeId::Field3)?,
            ],
        })
    }
}
