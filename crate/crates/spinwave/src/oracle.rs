//! Independent brute-force verification machinery: exact truncated
//! Fock-space evolution under the quadratic Hamiltonians, exact spin
//! moments of the finite-N product state, and the end-to-end comparison
//! of the closed-form transforms against the exact dynamics at `c = 0`.

use crate::bogoliubov::BogoliubovTransform;
use crate::error::{Error, Result};
use crate::model::{CouplingParams, ModeId};
use crate::moments::{evolve_moments, initial_moments, MomentTable, SpinConvention};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Edge-population threshold: if the final state holds more than this in
/// the last retained Fock level of any mode, results are biased and the
/// evolution errors out.
pub const TRUNCATION_EDGE_TOL: f64 = 1e-6;

/// Allowed deviation of the state norm from 1 after time evolution.
pub const NORM_DRIFT_TOL: f64 = 1e-8;

/// Largest total dimension evolved by dense eigendecomposition; larger
/// problems use the fixed-step integrator.
pub const EIGEN_MAX_DIM: usize = 4096;

/// Interaction type of one field mode with the spin wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingKind {
    /// `k (a† S† + a S)` — pair creation, the Stokes-type coupling.
    Squeezing,
    /// `k (a† S + a S†)` — excitation exchange, the anti-Stokes-type coupling.
    BeamSplitter,
}

/// A quadratic spin-field Hamiltonian, assembled as a sum of two-mode
/// couplings between the spin wave and individual field modes. Hermitian
/// by construction (each term is added together with its conjugate).
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    couplings: Vec<(ModeId, f64, CouplingKind)>,
}

impl HamiltonianSpec {
    pub fn new(couplings: Vec<(ModeId, f64, CouplingKind)>) -> Result<Self> {
        for &(mode, k, _) in &couplings {
            if !mode.is_photonic() {
                return Err(Error::NotPhotonic(mode));
            }
            if !k.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "coupling strength must be finite, got {k}"
                )));
            }
        }
        Ok(HamiltonianSpec { couplings })
    }

    /// The model Hamiltonian for a parameter set: `k1` squeezing on
    /// Field1, `k2` beam-splitter on Field2, and (tripartite) `k3`
    /// squeezing on Field3. The exchange constant `c` has no counterpart
    /// here — in the exact dynamics that quantity is an operator — which
    /// is why closed-form/exact comparisons are made at `c = 0` only.
    pub fn from_params(params: &CouplingParams) -> Self {
        let mut couplings = vec![
            (ModeId::Field1, params.k1(), CouplingKind::Squeezing),
            (ModeId::Field2, params.k2(), CouplingKind::BeamSplitter),
        ];
        if let Some(k3) = params.k3() {
            couplings.push((ModeId::Field3, k3, CouplingKind::Squeezing));
        }
        HamiltonianSpec { couplings }
    }

    pub fn couplings(&self) -> &[(ModeId, f64, CouplingKind)] {
        &self.couplings
    }

    /// Highest mode index appearing in the couplings, plus one.
    fn min_modes(&self) -> usize {
        self.couplings
            .iter()
            .map(|&(m, _, _)| m.index() + 1)
            .max()
            .unwrap_or(1)
    }
}

/// A pure state on the truncated product Fock basis.
///
/// Basis ordering: the spin wave is mode 0 and the slowest-varying index;
/// the amplitude of occupations `(n_0, n_1, ..)` sits at flat index
/// `((n_0 * d_1 + n_1) * d_2 + n_2) ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

fn validate_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.len() > 4 {
        return Err(Error::InvalidState(format!(
            "mode count must be 1..=4, got {}",
            dims.len()
        )));
    }
    for &d in dims {
        if d < 2 {
            return Err(Error::InvalidState(format!(
                "every mode dimension must be >= 2, got {d}"
            )));
        }
    }
    Ok(())
}

fn strides_of(dims: &[usize]) -> Vec<usize> {
    let n = dims.len();
    let mut s = vec![1usize; n];
    for m in (0..n.saturating_sub(1)).rev() {
        s[m] = s[m + 1] * dims[m + 1];
    }
    s
}

impl FockState {
    /// All modes in their ground level.
    pub fn vacuum(dims: &[usize]) -> Result<Self> {
        validate_dims(dims)?;
        let dim: usize = dims.iter().product();
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(FockState {
            dims: dims.to_vec(),
            amps,
        })
    }

    /// Product number state with the given occupations.
    pub fn number_state(dims: &[usize], occupations: &[usize]) -> Result<Self> {
        validate_dims(dims)?;
        if occupations.len() != dims.len() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                got: occupations.len(),
            });
        }
        let strides = strides_of(dims);
        let mut idx = 0usize;
        for (m, (&occ, &d)) in occupations.iter().zip(dims).enumerate() {
            if occ >= d {
                return Err(Error::InvalidState(format!(
                    "occupation {occ} exceeds dimension {d} of mode {m}"
                )));
            }
            idx += occ * strides[m];
        }
        let dim: usize = dims.iter().product();
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(FockState {
            dims: dims.to_vec(),
            amps,
        })
    }

    /// Product of truncated coherent states with the given complex
    /// amplitudes, renormalized on the truncated basis.
    pub fn coherent(dims: &[usize], alphas: &[Complex64]) -> Result<Self> {
        validate_dims(dims)?;
        if alphas.len() != dims.len() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                got: alphas.len(),
            });
        }
        let per_mode: Vec<Vec<Complex64>> = dims
            .iter()
            .zip(alphas)
            .map(|(&d, &alpha)| {
                let mut v = Vec::with_capacity(d);
                let mut term = Complex64::new(1.0, 0.0); // alpha^n / sqrt(n!)
                for n in 0..d {
                    if n > 0 {
                        term *= alpha / (n as f64).sqrt();
                    }
                    v.push(term);
                }
                v
            })
            .collect();
        let dim: usize = dims.iter().product();
        let strides = strides_of(dims);
        let mut amps = vec![Complex64::new(1.0, 0.0); dim];
        for (m, factors) in per_mode.iter().enumerate() {
            for (idx, amp) in amps.iter_mut().enumerate() {
                let occ = (idx / strides[m]) % dims[m];
                *amp *= factors[occ];
            }
        }
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("coherent state has zero norm".into()));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(FockState {
            dims: dims.to_vec(),
            amps,
        })
    }

    /// Wrap raw amplitudes; the norm must be within 1e-10 of 1.
    pub fn from_amplitudes(dims: &[usize], amps: Vec<Complex64>) -> Result<Self> {
        validate_dims(dims)?;
        let dim: usize = dims.iter().product();
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: amps.len(),
            });
        }
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "state norm {norm} deviates from 1 by more than 1e-10"
            )));
        }
        Ok(FockState {
            dims: dims.to_vec(),
            amps,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Population of the last retained Fock level, per mode.
    pub fn edge_populations(&self) -> Vec<f64> {
        let strides = strides_of(&self.dims);
        self.dims
            .iter()
            .enumerate()
            .map(|(m, &d)| {
                let mut pop = 0.0;
                for (idx, amp) in self.amps.iter().enumerate() {
                    if (idx / strides[m]) % d == d - 1 {
                        pop += amp.norm_sqr();
                    }
                }
                pop
            })
            .collect()
    }
}

/// One resolved coupling term plus the lattice data needed to apply it.
struct Term {
    field: usize,
    kind: CouplingKind,
    /// Flat offsets of all occupation combinations of the modes other
    /// than spin and `field`.
    rest_offsets: Vec<usize>,
    /// `strength * sqrt(arg_s) * sqrt(arg_f)` lookup indexed by
    /// `(n_s, n_f)` of the *source* state, one entry per valid source.
    amps: Vec<f64>,
    /// Valid source digit ranges (inclusive start, exclusive end).
    s_range: (usize, usize),
    f_range: (usize, usize),
}

fn rest_offsets(dims: &[usize], strides: &[usize], skip_a: usize, skip_b: usize) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for (m, (&d, &s)) in dims.iter().zip(strides).enumerate() {
        if m == skip_a || m == skip_b {
            continue;
        }
        let mut next = Vec::with_capacity(offsets.len() * d);
        for occ in 0..d {
            for &o in &offsets {
                next.push(o + occ * s);
            }
        }
        offsets = next;
    }
    offsets
}

fn build_terms(spec: &HamiltonianSpec, dims: &[usize], strides: &[usize]) -> Vec<Term> {
    let d0 = dims[0];
    spec.couplings
        .iter()
        .filter(|&&(_, k, _)| k != 0.0)
        .map(|&(mode, k, kind)| {
            let j = mode.index();
            let dj = dims[j];
            let (s_range, f_range) = match kind {
                // a† S†: source needs headroom in both modes
                CouplingKind::Squeezing => ((0, d0 - 1), (0, dj - 1)),
                // a† S: source needs spin excitation and field headroom
                CouplingKind::BeamSplitter => ((1, d0), (0, dj - 1)),
            };
            let mut amps = Vec::with_capacity((s_range.1 - s_range.0) * (f_range.1 - f_range.0));
            for ns in s_range.0..s_range.1 {
                for nf in f_range.0..f_range.1 {
                    let amp = match kind {
                        CouplingKind::Squeezing => k * (((ns + 1) * (nf + 1)) as f64).sqrt(),
                        CouplingKind::BeamSplitter => k * ((ns * (nf + 1)) as f64).sqrt(),
                    };
                    amps.push(amp);
                }
            }
            Term {
                field: j,
                kind,
                rest_offsets: rest_offsets(dims, strides, 0, j),
                amps,
                s_range,
                f_range,
            }
        })
        .collect()
}

/// `out += H * psi` for the assembled terms (`out` must be zeroed by the
/// caller). Each term contributes its raising move and, symmetrically,
/// the conjugate lowering move.
fn apply_h(terms: &[Term], strides: &[usize], psi: &[Complex64], out: &mut [Complex64]) {
    for term in terms {
        let s0 = strides[0];
        let sj = strides[term.field];
        // raising target offset relative to the source index
        let up = match term.kind {
            CouplingKind::Squeezing => s0 + sj,
            CouplingKind::BeamSplitter => sj.wrapping_sub(s0),
        };
        let f_count = term.f_range.1 - term.f_range.0;
        let mut amp_at = 0usize;
        for ns in term.s_range.0..term.s_range.1 {
            for nf in term.f_range.0..term.f_range.1 {
                let amp = term.amps[amp_at];
                amp_at += 1;
                let base = ns * s0 + nf * sj;
                for &ro in &term.rest_offsets {
                    let src = base + ro;
                    let tgt = src.wrapping_add(up);
                    let a = amp;
                    out[tgt] += a * psi[src];
                    out[src] += a * psi[tgt];
                }
            }
        }
        debug_assert_eq!(amp_at, (term.s_range.1 - term.s_range.0) * f_count);
    }
}

/// Dense Hamiltonian matrix (used by the eigendecomposition path and by
/// the Hermiticity test).
fn dense_h(terms: &[Term], strides: &[usize], dim: usize) -> DMatrix<Complex64> {
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for term in terms {
        let s0 = strides[0];
        let sj = strides[term.field];
        let up = match term.kind {
            CouplingKind::Squeezing => s0 + sj,
            CouplingKind::BeamSplitter => sj.wrapping_sub(s0),
        };
        let mut amp_at = 0usize;
        for ns in term.s_range.0..term.s_range.1 {
            for nf in term.f_range.0..term.f_range.1 {
                let amp = Complex64::new(term.amps[amp_at], 0.0);
                amp_at += 1;
                let base = ns * s0 + nf * sj;
                for &ro in &term.rest_offsets {
                    let src = base + ro;
                    let tgt = src.wrapping_add(up);
                    h[(tgt, src)] += amp;
                    h[(src, tgt)] += amp;
                }
            }
        }
    }
    h
}

enum Method {
    Eigen,
    Rk4,
}

fn evolve_with(
    spec: &HamiltonianSpec,
    initial: &FockState,
    t: f64,
    method: Method,
) -> Result<FockState> {
    let dims = initial.dims();
    let strides = strides_of(dims);
    let terms = build_terms(spec, dims, &strides);
    let dim = initial.total_dim();

    let mut amps: Vec<Complex64> = match method {
        Method::Eigen => {
            let h = dense_h(&terms, &strides, dim);
            let eig = h.symmetric_eigen();
            let psi0 = DVector::from_column_slice(initial.amplitudes());
            let mut coeff = eig.eigenvectors.adjoint() * psi0;
            for (i, c) in coeff.iter_mut().enumerate() {
                *c *= Complex64::new(0.0, -eig.eigenvalues[i] * t).exp();
            }
            let psi = &eig.eigenvectors * coeff;
            psi.iter().cloned().collect()
        }
        Method::Rk4 => {
            // step bound: ||H|| <= 2 sum_j |k_j| sqrt(d_s d_j), so this
            // keeps ||H|| dt well below 1 (RK4 stability and accuracy)
            let rate: f64 = spec
                .couplings
                .iter()
                .map(|&(m, k, _)| k.abs() * ((dims[0] * dims[m.index()]) as f64).sqrt())
                .sum();
            let mut nsteps = if rate > 0.0 {
                ((t * rate) / 0.2).ceil().max(1.0) as usize
            } else {
                1
            };
            let mut attempt = 0;
            loop {
                let psi = rk4_run(&terms, &strides, initial.amplitudes(), t, nsteps);
                let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let drift = (norm - 1.0).abs();
                if drift < NORM_DRIFT_TOL {
                    break psi;
                }
                attempt += 1;
                if attempt > 3 {
                    return Err(Error::NormDrift {
                        drift,
                        tolerance: NORM_DRIFT_TOL,
                    });
                }
                nsteps *= 2;
            }
        }
    };

    // the evolution is unitary: rescale the residual drift away so the
    // result satisfies the FockState norm invariant
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    let out = FockState {
        dims: dims.to_vec(),
        amps,
    };
    let edges = out.edge_populations();
    for (m, &pop) in edges.iter().enumerate() {
        if pop > TRUNCATION_EDGE_TOL {
            return Err(Error::TruncationOverflow {
                mode: ModeId::from_index(m).expect("mode count validated"),
                population: pop,
                threshold: TRUNCATION_EDGE_TOL,
            });
        }
    }
    Ok(out)
}

fn rk4_run(
    terms: &[Term],
    strides: &[usize],
    initial: &[Complex64],
    t: f64,
    nsteps: usize,
) -> Vec<Complex64> {
    let dim = initial.len();
    let dt = t / nsteps as f64;
    let zero = Complex64::new(0.0, 0.0);
    let mut psi = initial.to_vec();
    let mut h1 = vec![zero; dim];
    let mut h2 = vec![zero; dim];
    let mut h3 = vec![zero; dim];
    let mut h4 = vec![zero; dim];
    let mut stage = vec![zero; dim];
    let half = Complex64::new(0.0, -0.5 * dt); // -i dt/2
    let full = Complex64::new(0.0, -dt);
    let sixth = Complex64::new(0.0, -dt / 6.0);
    for _ in 0..nsteps {
        h1.fill(zero);
        apply_h(terms, strides, &psi, &mut h1);
        for i in 0..dim {
            stage[i] = psi[i] + half * h1[i];
        }
        h2.fill(zero);
        apply_h(terms, strides, &stage, &mut h2);
        for i in 0..dim {
            stage[i] = psi[i] + half * h2[i];
        }
        h3.fill(zero);
        apply_h(terms, strides, &stage, &mut h3);
        for i in 0..dim {
            stage[i] = psi[i] + full * h3[i];
        }
        h4.fill(zero);
        apply_h(terms, strides, &stage, &mut h4);
        for i in 0..dim {
            psi[i] += sixth * (h1[i] + 2.0 * (h2[i] + h3[i]) + h4[i]);
        }
    }
    psi
}

/// Evolve `initial` for time `t` under the Hamiltonian.
///
/// Dense eigendecomposition is used up to a total dimension of
/// [`EIGEN_MAX_DIM`]; beyond that, a fixed-step fourth-order integrator
/// whose step is chosen (and, on drift, refined) to keep the norm within
/// [`NORM_DRIFT_TOL`]. Population reaching the truncation edge of any
/// mode raises [`Error::TruncationOverflow`] naming that mode.
pub fn fock_evolve(spec: &HamiltonianSpec, initial: &FockState, t: f64) -> Result<FockState> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "time must be finite and >= 0, got {t}"
        )));
    }
    if spec.min_modes() > initial.dims().len() {
        return Err(Error::DimensionMismatch {
            expected: spec.min_modes(),
            got: initial.dims().len(),
        });
    }
    if t == 0.0 {
        return Ok(initial.clone());
    }
    let method = if initial.total_dim() <= EIGEN_MAX_DIM {
        Method::Eigen
    } else {
        Method::Rk4
    };
    evolve_with(spec, initial, t, method)
}

/// Apply the annihilation operator of `mode` to the amplitudes.
fn lower(dims: &[usize], strides: &[usize], mode: usize, psi: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    let s = strides[mode];
    let d = dims[mode];
    for (idx, o) in out.iter_mut().enumerate() {
        let occ = (idx / s) % d;
        if occ + 1 < d {
            *o = ((occ + 1) as f64).sqrt() * psi[idx + s];
        }
    }
    out
}

/// Apply the creation operator of `mode` (truncated at the top level).
fn raise(dims: &[usize], strides: &[usize], mode: usize, psi: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    let s = strides[mode];
    let d = dims[mode];
    for (idx, o) in out.iter_mut().enumerate() {
        let occ = (idx / s) % d;
        if occ >= 1 {
            *o = (occ as f64).sqrt() * psi[idx - s];
        }
    }
    out
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Means and centered second moments of every mode, computed exactly on
/// the truncated basis.
pub fn exact_moments(state: &FockState) -> Result<MomentTable> {
    let dims = state.dims();
    let strides = strides_of(dims);
    let n = dims.len();
    let psi = state.amplitudes();

    let lowered: Vec<Vec<Complex64>> = (0..n).map(|m| lower(dims, &strides, m, psi)).collect();
    let raised: Vec<Vec<Complex64>> = (0..n).map(|m| raise(dims, &strides, m, psi)).collect();

    let mean = DVector::from_fn(n, |m, _| inner(psi, &lowered[m]));
    // stacked means over (a_0.., a_0†..)
    let mut mu = vec![Complex64::new(0.0, 0.0); 2 * n];
    for m in 0..n {
        mu[m] = mean[m];
        mu[n + m] = mean[m].conj();
    }
    // ⟨ξ_i ξ_j⟩ = (ξ_i† ψ)† (ξ_j ψ): ξ_m = a_m has ξ† ψ = raised, ξ ψ = lowered
    let left = |i: usize| -> &[Complex64] {
        if i < n {
            &raised[i]
        } else {
            &lowered[i - n]
        }
    };
    let right = |j: usize| -> &[Complex64] {
        if j < n {
            &lowered[j]
        } else {
            &raised[j - n]
        }
    };
    let second = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        inner(left(i), right(j)) - mu[i] * mu[j]
    });
    MomentTable::from_raw(mean, second)
}

/// Exact moments of the collective spin operator
/// `S = (1/sqrt(N)) Σ_i |1⟩⟨2|_i` on the balanced product superposition
/// `⊗_i (|1⟩_i + |2⟩_i)/sqrt(2)`, by direct enumeration of all 2^N basis
/// states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMoments {
    /// `⟨S⟩` (real on this state).
    pub mean: f64,
    /// `⟨S²⟩`.
    pub s_squared: f64,
    /// `⟨S†S⟩`.
    pub sdag_s: f64,
    /// `⟨SS†⟩`.
    pub s_sdag: f64,
}

impl SpinMoments {
    /// Centered `⟨S²⟩c = ⟨S²⟩ - ⟨S⟩²`.
    pub fn s_squared_centered(&self) -> f64 {
        self.s_squared - self.mean * self.mean
    }

    /// Centered `⟨S†S⟩c = ⟨S†S⟩ - |⟨S⟩|²`.
    pub fn sdag_s_centered(&self) -> f64 {
        self.sdag_s - self.mean * self.mean
    }

    /// Centered `⟨SS†⟩c`.
    pub fn s_sdag_centered(&self) -> f64 {
        self.s_sdag - self.mean * self.mean
    }
}

/// Brute-force spin moments for `2 <= n_atoms <= 14`.
///
/// Convention: bit i clear = atom i in |1⟩, set = atom i in |2⟩; `S`
/// lowers |2⟩ to |1⟩ with weight `1/sqrt(N)`.
pub fn spin_moments_bruteforce(n_atoms: u64) -> Result<SpinMoments> {
    if !(2..=14).contains(&n_atoms) {
        return Err(Error::AtomCountOutOfRange {
            got: n_atoms,
            min: 2,
            max: 14,
        });
    }
    let n = n_atoms as usize;
    let dim = 1usize << n;
    let amp0 = 1.0 / (dim as f64).sqrt();
    let w = 1.0 / (n as f64).sqrt();

    // S ψ and S² ψ (all amplitudes stay real)
    let apply_s = |src: &[f64]| {
        let mut out = vec![0.0f64; dim];
        for (b, &a) in src.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for i in 0..n {
                let bit = 1usize << i;
                if b & bit != 0 {
                    out[b & !bit] += w * a;
                }
            }
        }
        out
    };
    let apply_sdag = |src: &[f64]| {
        let mut out = vec![0.0f64; dim];
        for (b, &a) in src.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for i in 0..n {
                let bit = 1usize << i;
                if b & bit == 0 {
                    out[b | bit] += w * a;
                }
            }
        }
        out
    };

    let psi = vec![amp0; dim];
    let s_psi = apply_s(&psi);
    let ss_psi = apply_s(&s_psi);
    let sdag_psi = apply_sdag(&psi);

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    Ok(SpinMoments {
        mean: dot(&psi, &s_psi),
        s_squared: dot(&psi, &ss_psi),
        sdag_s: dot(&s_psi, &s_psi),
        s_sdag: dot(&sdag_psi, &sdag_psi),
    })
}

/// End-to-end comparison of the closed-form route (transform +
/// moment propagation) against the exact route (Fock evolution + exact
/// moments), from the bosonic vacuum, at `c = 0` where the closed form
/// solves the true Heisenberg equations of the quadratic Hamiltonian.
///
/// Returns the maximum absolute discrepancy over all means and all
/// centered second moments. `dims` gives the per-mode truncations
/// (spin first), and must match the arity of `params`.
pub fn closed_form_vs_exact(params: &CouplingParams, t: f64, dims: &[usize]) -> Result<f64> {
    if params.c() != 0.0 {
        return Err(Error::Unsupported(
            "closed_form_vs_exact requires c = 0: at nonzero c the closed form's \
             exchange constant is a c-number stand-in with no exact counterpart"
                .into(),
        ));
    }
    let n = params.n_modes();
    if dims.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: dims.len(),
        });
    }

    let transform = BogoliubovTransform::for_params(params, t);
    let closed = evolve_moments(
        &transform,
        &initial_moments(SpinConvention::BosonicVacuum, n, 1)?,
    )?;

    let spec = HamiltonianSpec::from_params(params);
    let exact = exact_moments(&fock_evolve(&spec, &FockState::vacuum(dims)?, t)?)?;

    let mut disc = 0.0f64;
    for i in 0..n {
        disc = disc.max((closed.mean()[i] - exact.mean()[i]).norm());
    }
    let gc = closed.second_moments();
    let ge = exact.second_moments();
    for i in 0..2 * n {
        for j in 0..2 * n {
            disc = disc.max((gc[(i, j)] - ge[(i, j)]).norm());
        }
    }
    Ok(disc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_strength_evolution_is_identity() {
        let spec =
            HamiltonianSpec::new(vec![(ModeId::Field1, 0.0, CouplingKind::Squeezing)]).unwrap();
        let psi0 = FockState::vacuum(&[4, 4]).unwrap();
        let psi1 = fock_evolve(&spec, &psi0, 2.0).unwrap();
        let diff = psi0
            .amplitudes()
            .iter()
            .zip(psi1.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-14);
    }

    #[test]
    fn squeezing_photon_number_matches_sinh() {
        let k = 0.75;
        let t = 0.9;
        let spec =
            HamiltonianSpec::new(vec![(ModeId::Field1, k, CouplingKind::Squeezing)]).unwrap();
        let psi0 = FockState::vacuum(&[20, 20]).unwrap();
        let psi1 = fock_evolve(&spec, &psi0, t).unwrap();
        let m = exact_moments(&psi1).unwrap();
        let expected = (k * t).sinh().powi(2);
        assert_relative_eq!(m.cov_nn()[(1, 1)].re, expected, max_relative = 1e-7);
        assert_relative_eq!(m.cov_nn()[(0, 0)].re, expected, max_relative = 1e-7);
        assert!((psi1.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn beam_splitter_full_transfer_at_half_rabi_period() {
        let k = 0.8;
        let spec =
            HamiltonianSpec::new(vec![(ModeId::Field1, k, CouplingKind::BeamSplitter)]).unwrap();
        let psi0 = FockState::number_state(&[3, 3], &[1, 0]).unwrap();
        let t = std::f64::consts::FRAC_PI_2 / k;
        let psi1 = fock_evolve(&spec, &psi0, t).unwrap();
        let m = exact_moments(&psi1).unwrap();
        // photon fully transferred from the spin mode to the field mode
        assert_relative_eq!(m.cov_nn()[(1, 1)].re, 1.0, max_relative = 1e-9);
        assert!(m.cov_nn()[(0, 0)].re.abs() < 1e-9);
    }

    #[test]
    fn single_photon_moments() {
        let state = FockState::number_state(&[3], &[1]).unwrap();
        let m = exact_moments(&state).unwrap();
        assert_eq!(m.mean()[0], Complex64::new(0.0, 0.0));
        assert_relative_eq!(m.cov_nn()[(0, 0)].re, 1.0);
        assert!(m.cov_aa()[(0, 0)].norm() < 1e-14);
    }

    #[test]
    fn coherent_state_moments() {
        let alpha = Complex64::new(1.0, 0.0);
        let state = FockState::coherent(&[40], &[alpha]).unwrap();
        let m = exact_moments(&state).unwrap();
        assert!((m.mean()[0] - alpha).norm() < 1e-6);
        assert!(m.cov_nn()[(0, 0)].norm() < 1e-6);
    }

    #[test]
    fn hamiltonian_is_exactly_hermitian() {
        let spec = HamiltonianSpec::new(vec![
            (ModeId::Field1, 1.0, CouplingKind::Squeezing),
            (ModeId::Field2, 0.5, CouplingKind::BeamSplitter),
        ])
        .unwrap();
        let dims = [4usize, 3, 3];
        let strides = strides_of(&dims);
        let terms = build_terms(&spec, &dims, &strides);
        let h = dense_h(&terms, &strides, dims.iter().product());
        assert_eq!(h, h.adjoint());
    }

    #[test]
    fn eigen_and_rk4_paths_agree() {
        let spec =
            HamiltonianSpec::new(vec![(ModeId::Field1, 0.7, CouplingKind::Squeezing)]).unwrap();
        let psi0 = FockState::vacuum(&[10, 10]).unwrap();
        let a = evolve_with(&spec, &psi0, 0.6, Method::Eigen).unwrap();
        let b = evolve_with(&spec, &psi0, 0.6, Method::Rk4).unwrap();
        let diff = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-7, "paths differ by {diff:.3e}");
    }

    #[test]
    fn truncation_overflow_detected() {
        let spec =
            HamiltonianSpec::new(vec![(ModeId::Field1, 1.0, CouplingKind::Squeezing)]).unwrap();
        let psi0 = FockState::vacuum(&[8, 8]).unwrap();
        match fock_evolve(&spec, &psi0, 2.5) {
            Err(Error::TruncationOverflow { population, .. }) => {
                assert!(population > TRUNCATION_EDGE_TOL);
            }
            other => panic!("expected truncation overflow, got {other:?}"),
        }
    }

    #[test]
    fn bruteforce_spin_moment_examples() {
        let m = spin_moments_bruteforce(2).unwrap();
        assert_relative_eq!(m.mean, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_relative_eq!(m.s_squared, 0.25, epsilon = 1e-14);
        assert_relative_eq!(m.sdag_s, 0.75, epsilon = 1e-14);
        assert_relative_eq!(m.s_sdag, 0.75, epsilon = 1e-14);

        let m = spin_moments_bruteforce(10).unwrap();
        assert_relative_eq!(m.sdag_s_centered(), 0.25, epsilon = 1e-13);
        assert_relative_eq!(m.s_squared_centered(), -0.25, epsilon = 1e-13);

        assert!(spin_moments_bruteforce(1).is_err());
        assert!(spin_moments_bruteforce(15).is_err());
    }

    #[test]
    fn closed_form_vs_exact_zero_at_t_zero() {
        let p = CouplingParams::bipartite(1.0, 0.5, 0.0).unwrap();
        let d = closed_form_vs_exact(&p, 0.0, &[8, 8, 8]).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn closed_form_vs_exact_requires_zero_c() {
        let p = CouplingParams::bipartite(1.0, 0.5, 30.0).unwrap();
        assert!(matches!(
            closed_form_vs_exact(&p, 1.0, &[8, 8, 8]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn closed_form_vs_exact_converged_small_case() {
        // moderate time, comfortably converged truncation: tight agreement
        let p = CouplingParams::bipartite(1.0, 0.5, 0.0).unwrap();
        let d = closed_form_vs_exact(&p, 0.5, &[18, 18, 14]).unwrap();
        assert!(d < 1e-6, "discrepancy {d:.3e}");
    }

    #[test]
    fn state_constructors_validate() {
        assert!(FockState::vacuum(&[1, 4]).is_err());
        assert!(FockState::vacuum(&[]).is_err());
        assert!(FockState::vacuum(&[4, 4, 4, 4, 4]).is_err());
        assert!(FockState::number_state(&[3, 3], &[3, 0]).is_err());
        assert!(FockState::number_state(&[3, 3], &[1]).is_err());
        let bad = vec![Complex64::new(1.0, 0.0); 4];
        assert!(FockState::from_amplitudes(&[2, 2], bad).is_err());
        assert!(HamiltonianSpec::new(vec![(ModeId::Spin, 1.0, CouplingKind::Squeezing)]).is_err());
    }
}
