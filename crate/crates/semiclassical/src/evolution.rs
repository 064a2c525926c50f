//! Unitary propagators on the truncated space: the spectral propagator of
//! a time-independent Hermitian generator, the Weyl (displacement)
//! operator, a fixed-step commutator-free 4th-order Magnus scheme for
//! time-dependent polynomial generators, the quadratic (Bogoliubov)
//! evolution it specializes to, and the displacement-framed family
//! `W_ℏ(t) = e^{if(t)/ℏ} U_ℏ(−α(t)) e^{−iH_ℏ t/ℏ} U_ℏ(α₀)`.

use crate::classical::{ClassicalSystem, Trajectory};
use crate::fock::{poly_matrix, FockOperator, FockState};
use crate::linalg;
use crate::ncpoly::NcPoly;
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};
use thiserror::Error;

/// Default fixed step for Magnus integration; halved further whenever the
/// generator's coefficient norm demands it.
pub const DEFAULT_STEP: f64 = 1.0 / 256.0;

/// Safety factor in the displacement feasibility check `|α|²/ℏ ≤ M/safety`.
pub const WEYL_SAFETY: f64 = 4.0;

const SNAP_BUDGET: usize = 64;

#[derive(Debug, Error)]
pub enum EvolutionError {
    #[error("generator is not Hermitian (max asymmetry {defect:.3e})")]
    NonHermitian { defect: f64 },
    #[error("displacement infeasible at cutoff {m}: |α|²/ℏ = {excitation:.2} needs M ≥ {required_m}")]
    InfeasibleDisplacement { m: usize, excitation: f64, required_m: usize },
    #[error("trajectory does not start at the requested α₀")]
    TrajectoryMismatch,
    #[error("step size underflow (step = {step:.3e})")]
    StepUnderflow { step: f64 },
}

/// Propagator of a time-independent Hermitian generator `H`, producing
/// `apply(t, s) = V e^{−iΛ(t−s)/ℏ} V†` from one eigendecomposition.
pub struct SpectralPropagator {
    m: usize,
    hbar: f64,
    eigvals: Array1<f64>,
    eigvecs: Array2<C64>,
}

impl SpectralPropagator {
    pub fn new(h: &FockOperator, hbar: f64) -> Result<Self, EvolutionError> {
        assert!(hbar > 0.0);
        let defect = h.hermiticity_defect();
        let scale = linalg::max_abs(h.matrix()).max(1.0);
        if defect > 1e-10 * scale {
            return Err(EvolutionError::NonHermitian { defect });
        }
        let (eigvals, eigvecs) = linalg::eigh(h.matrix());
        Ok(SpectralPropagator { m: h.cutoff(), hbar, eigvals, eigvecs })
    }

    pub fn cutoff(&self) -> usize {
        self.m
    }

    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.eigvals
    }

    pub fn apply(&self, t: f64, s: f64, psi: &FockState) -> FockState {
        assert_eq!(psi.cutoff(), self.m);
        let dt = t - s;
        let mut modal = linalg::adjoint_matvec(&self.eigvecs, psi.coeffs());
        for (k, c) in modal.iter_mut().enumerate() {
            let phase = -self.eigvals[k] * dt / self.hbar;
            *c *= C64::from_polar(1.0, phase);
        }
        FockState::new(self.eigvecs.dot(&modal))
    }

    pub fn matrix(&self, t: f64, s: f64) -> FockOperator {
        let dt = t - s;
        let phases = Array1::from_iter(
            self.eigvals
                .iter()
                .map(|&l| C64::from_polar(1.0, -l * dt / self.hbar)),
        );
        let mut scaled = self.eigvecs.clone();
        for (j, col) in scaled.columns_mut().into_iter().enumerate() {
            let p = phases[j];
            for v in col {
                *v *= p;
            }
        }
        FockOperator::new(linalg::matmul(&scaled, &linalg::adjoint(&self.eigvecs)))
    }
}

/// Truncated Weyl operator `U_ℏ(α) = exp((α a_ℏ† − ᾱ a_ℏ)/ℏ)`, built by
/// eigendecomposing the Hermitian generator `i(α a† − ᾱ a)/√ℏ`.
pub fn weyl(alpha: C64, hbar: f64, m: usize) -> Result<FockOperator, EvolutionError> {
    weyl_with_safety(alpha, hbar, m, WEYL_SAFETY)
}

/// [`weyl`] with a configurable feasibility safety factor.
pub fn weyl_with_safety(
    alpha: C64,
    hbar: f64,
    m: usize,
    safety: f64,
) -> Result<FockOperator, EvolutionError> {
    assert!(hbar > 0.0 && m >= 1);
    let excitation = alpha.norm_sqr() / hbar;
    if excitation > m as f64 / safety {
        return Err(EvolutionError::InfeasibleDisplacement {
            m,
            excitation,
            required_m: (safety * excitation).ceil() as usize,
        });
    }
    if alpha == C64::new(0.0, 0.0) {
        return Ok(FockOperator::identity(m));
    }
    // Hermitian K = i(α a† − ᾱ a)/√ℏ, then U = e^{−iK}
    let sqrt_h = hbar.sqrt();
    let mut k = Array2::zeros((m + 1, m + 1));
    for n in 0..m {
        let s = ((n + 1) as f64).sqrt() / sqrt_h;
        k[(n + 1, n)] = C64::i() * alpha * s;
        k[(n, n + 1)] = (C64::i() * alpha * s).conj();
    }
    let (w, v) = linalg::eigh(&k);
    let phases = Array1::from_iter(w.iter().map(|&l| C64::from_polar(1.0, -l)));
    let mut scaled = v.clone();
    for (j, col) in scaled.columns_mut().into_iter().enumerate() {
        let p = phases[j];
        for x in col {
            *x *= p;
        }
    }
    Ok(FockOperator::new(scaled.dot(&linalg::adjoint(&v))))
}

// Commutator-free 4th-order Magnus coefficients on the two Gauss nodes.
const GAUSS_C1: f64 = 0.5 - 0.288_675_134_594_812_9; // 1/2 − √3/6
const GAUSS_C2: f64 = 0.5 + 0.288_675_134_594_812_9;
const CF_A1: f64 = 0.25 - 0.288_675_134_594_812_9 / 2.0 - 1.0 / 12.0 + 1.0 / 12.0; // placeholder, set below
#[allow(dead_code)]
const _UNUSED: f64 = CF_A1;

fn cf4_weights() -> (f64, f64) {
    let s3 = 3.0f64.sqrt();
    ((3.0 - 2.0 * s3) / 12.0, (3.0 + 2.0 * s3) / 12.0)
}

type GeneratorFn = Box<dyn Fn(f64) -> Array2<C64> + Send + Sync>;

/// Fixed-step propagator for a time-dependent Hermitian generator
/// `i ψ̇ = G(t) ψ`, integrated from `t = 0` with a commutator-free
/// 4th-order Magnus scheme (two exponentials per step, each evaluated by
/// eigendecomposition).
///
/// Cumulative matrices are snapshotted at construction so the value is
/// immutable afterwards; `apply(t, s)` is assembled as
/// `U(t,0) · U(s,0)†`, re-stepping deterministically between snapshots.
pub struct SteppedPropagator {
    m: usize,
    step: f64,
    t_max: f64,
    snap_every: usize,
    snaps: Vec<Arc<Array2<C64>>>,
    gen: GeneratorFn,
}

impl SteppedPropagator {
    /// Integrate the generator up to `t_max` with the given step.
    pub fn build(
        gen: GeneratorFn,
        m: usize,
        step: f64,
        t_max: f64,
    ) -> Result<Self, EvolutionError> {
        assert!(t_max >= 0.0);
        if !(step > 1e-12) {
            return Err(EvolutionError::StepUnderflow { step });
        }
        let g0 = gen(0.0);
        let defect = linalg::hermiticity_defect(&g0);
        if defect > 1e-9 * linalg::max_abs(&g0).max(1.0) {
            return Err(EvolutionError::NonHermitian { defect });
        }
        let total_steps = (t_max / step).ceil() as usize;
        let snap_every = (total_steps / SNAP_BUDGET).max(1);
        let mut u = Array2::from_diag(&Array1::from_elem(m + 1, C64::new(1.0, 0.0)));
        let mut snaps = vec![Arc::new(u.clone())];
        for k in 0..total_steps {
            let t0 = k as f64 * step;
            let (right, left) = step_factors(&gen, t0, step);
            u = linalg::matmul(&left, &linalg::matmul(&right, &u));
            if (k + 1) % snap_every == 0 {
                snaps.push(Arc::new(u.clone()));
            }
        }
        Ok(SteppedPropagator { m, step, t_max: total_steps as f64 * step, snap_every, snaps, gen })
    }

    pub fn cutoff(&self) -> usize {
        self.m
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn horizon(&self) -> f64 {
        self.t_max
    }

    fn locate(&self, t: f64) -> (usize, usize, f64) {
        assert!(
            (0.0..=self.t_max + 1e-9).contains(&t),
            "time {t} outside integrated horizon [0, {}]",
            self.t_max
        );
        let eps = self.step * 1e-9;
        let full = ((t + eps) / self.step).floor() as usize;
        let full = full.min((self.t_max / self.step).round() as usize);
        let snap_idx = full / self.snap_every;
        let base_node = snap_idx * self.snap_every;
        let rem = t - full as f64 * self.step;
        (snap_idx, full, if rem > eps { rem } else { 0.0 })
    }

    /// `U(t, 0) ψ` (or its adjoint action).
    fn apply_from_origin(&self, t: f64, psi: &Array1<C64>, adjoint: bool) -> Array1<C64> {
        let (snap_idx, full, rem) = self.locate(t);
        let base_node = snap_idx * self.snap_every;
        if !adjoint {
            let mut v = self.snaps[snap_idx].dot(psi);
            for k in base_node..full {
                let (right, left) = step_factors(&self.gen, k as f64 * self.step, self.step);
                v = left.dot(&right.dot(&v));
            }
            if rem > 0.0 {
                let (right, left) = step_factors(&self.gen, full as f64 * self.step, rem);
                v = left.dot(&right.dot(&v));
            }
            v
        } else {
            let mut v = psi.clone();
            if rem > 0.0 {
                let (right, left) = step_factors(&self.gen, full as f64 * self.step, rem);
                v = linalg::adjoint_matvec(&right, &linalg::adjoint_matvec(&left, &v));
            }
            for k in (base_node..full).rev() {
                let (right, left) = step_factors(&self.gen, k as f64 * self.step, self.step);
                v = linalg::adjoint_matvec(&right, &linalg::adjoint_matvec(&left, &v));
            }
            linalg::adjoint_matvec(&self.snaps[snap_idx], &v)
        }
    }

    pub fn apply(&self, t: f64, s: f64, psi: &FockState) -> FockState {
        assert_eq!(psi.cutoff(), self.m);
        let back = self.apply_from_origin(s, psi.coeffs(), true);
        FockState::new(self.apply_from_origin(t, &back, false))
    }

    /// Full matrix `U(t, 0)`.
    pub fn matrix_from_origin(&self, t: f64) -> FockOperator {
        let (snap_idx, full, rem) = self.locate(t);
        let base_node = snap_idx * self.snap_every;
        let mut u = (*self.snaps[snap_idx]).clone();
        for k in base_node..full {
            let (right, left) = step_factors(&self.gen, k as f64 * self.step, self.step);
            u = linalg::matmul(&left, &linalg::matmul(&right, &u));
        }
        if rem > 0.0 {
            let (right, left) = step_factors(&self.gen, full as f64 * self.step, rem);
            u = linalg::matmul(&left, &linalg::matmul(&right, &u));
        }
        FockOperator::new(u)
    }

    pub fn matrix(&self, t: f64, s: f64) -> FockOperator {
        let ut = self.matrix_from_origin(t);
        let us = self.matrix_from_origin(s);
        ut.compose(&us.adjoint())
    }
}

/// The two exponential factors of one commutator-free step over
/// `[t0, t0+h]`, returned as (right, left) in application order.
fn step_factors(gen: &GeneratorFn, t0: f64, h: f64) -> (Array2<C64>, Array2<C64>) {
    let (a1, a2) = cf4_weights();
    let g1 = gen(t0 + GAUSS_C1 * h);
    let g2 = gen(t0 + GAUSS_C2 * h);
    let mut b_right = Array2::zeros(g1.dim());
    let mut b_left = Array2::zeros(g1.dim());
    ndarray::Zip::from(&mut b_right)
        .and(&g1)
        .and(&g2)
        .for_each(|o, &x, &y| *o = a2 * x + a1 * y);
    ndarray::Zip::from(&mut b_left)
        .and(&g1)
        .and(&g2)
        .for_each(|o, &x, &y| *o = a1 * x + a2 * y);
    (expi(&b_right, h), expi(&b_left, h))
}

/// `exp(−i h B)` for Hermitian `B` via eigendecomposition.
fn expi(b: &Array2<C64>, h: f64) -> Array2<C64> {
    let (w, v) = linalg::eigh(b);
    let mut scaled = v.clone();
    for (j, col) in scaled.columns_mut().into_iter().enumerate() {
        let p = C64::from_polar(1.0, -w[j] * h);
        for x in col {
            *x *= p;
        }
    }
    linalg::matmul(&scaled, &linalg::adjoint(&v))
}

/// Either flavour of propagator behind one interface.
pub enum Propagator {
    Spectral(SpectralPropagator),
    Stepped(SteppedPropagator),
}

impl Propagator {
    pub fn cutoff(&self) -> usize {
        match self {
            Propagator::Spectral(p) => p.cutoff(),
            Propagator::Stepped(p) => p.cutoff(),
        }
    }

    pub fn apply(&self, t: f64, s: f64, psi: &FockState) -> FockState {
        match self {
            Propagator::Spectral(p) => p.apply(t, s, psi),
            Propagator::Stepped(p) => p.apply(t, s, psi),
        }
    }

    pub fn matrix(&self, t: f64, s: f64) -> FockOperator {
        match self {
            Propagator::Spectral(p) => p.matrix(t, s),
            Propagator::Stepped(p) => p.matrix(t, s),
        }
    }
}

/// Pick the Magnus step from the generator's coefficient norm: the default
/// step, shrunk until `h · ‖gen‖₁ ≤ 0.5`.
pub fn magnus_step(gen_l1_sup: f64) -> f64 {
    DEFAULT_STEP.min(0.5 / gen_l1_sup.max(1e-9))
}

/// Propagator of `iℏ U̇ = [P(t)]_M U` for a time-dependent symmetric
/// polynomial generator, integrated over `[0, t_max]`.
pub fn truncated_evolution(
    gen: impl Fn(f64) -> NcPoly + Send + Sync + 'static,
    hbar: f64,
    m: usize,
    t_max: f64,
    step: Option<f64>,
) -> Result<SteppedPropagator, EvolutionError> {
    assert!(hbar > 0.0);
    let mut l1_sup = 0.0f64;
    for k in 0..=16 {
        let t = t_max * k as f64 / 16.0;
        let p = gen(t);
        if p.symmetry_defect() > 1e-10 * (1.0 + p.l1_norms().total) {
            return Err(EvolutionError::NonHermitian { defect: p.symmetry_defect() });
        }
        l1_sup = l1_sup.max(p.l1_norms().total / hbar);
    }
    let h = step.unwrap_or_else(|| magnus_step(l1_sup));
    let scale = C64::new(1.0 / hbar, 0.0);
    let matrix_gen: GeneratorFn =
        Box::new(move |t| poly_matrix(&gen(t), m, hbar).scale(scale).matrix().clone());
    SteppedPropagator::build(matrix_gen, m, h, t_max)
}

/// The quadratic (Bogoliubov) evolution `W₀`: generated by the degree-2
/// part of the Hamiltonian shifted along the classical trajectory, at
/// unit ℏ.
pub fn quadratic_evolution(
    sys: &ClassicalSystem,
    traj: &Trajectory,
    m: usize,
) -> Result<SteppedPropagator, EvolutionError> {
    quadratic_evolution_with_step(sys, traj, m, None)
}

/// [`quadratic_evolution`] with an explicit step override.
pub fn quadratic_evolution_with_step(
    sys: &ClassicalSystem,
    traj: &Trajectory,
    m: usize,
    step: Option<f64>,
) -> Result<SteppedPropagator, EvolutionError> {
    let sys = sys.clone();
    let traj = traj.clone();
    let t_max = traj.t_max();
    truncated_evolution(
        move |t| sys.quadratic_generator(traj.alpha(t)),
        1.0,
        m,
        t_max,
        step,
    )
}

/// Generator of the framed evolution at scale ℏ:
/// `Σ_{k≥2} ℏ^{k/2−1} H_k(α : a, a†)`, reducing to the quadratic part as
/// ℏ → 0.
pub fn l_hbar_generator(h: &NcPoly, alpha: C64, hbar: f64) -> NcPoly {
    assert!(hbar > 0.0);
    let parts = h.shift_expand(alpha);
    let mut out = NcPoly::zero();
    for (k, part) in parts.iter().enumerate().skip(2) {
        let w = hbar.powf(k as f64 / 2.0 - 1.0);
        out = &out + &part.scale(C64::new(w, 0.0));
    }
    out
}

/// The displacement-framed propagator family
/// `W_ℏ(t) = e^{if(t)/ℏ} U_ℏ(−α(t)) e^{−iH_ℏ t/ℏ} U_ℏ(α₀)`, with the
/// spectral data of `H_ℏ` and the fixed Weyl factor cached.
pub struct HeppFamily {
    hbar: f64,
    m: usize,
    traj: Trajectory,
    spectral: SpectralPropagator,
    weyl0: FockOperator,
    weyl_cache: Mutex<BTreeMap<u64, Arc<FockOperator>>>,
}

impl HeppFamily {
    pub fn new(
        h: &NcPoly,
        alpha0: C64,
        hbar: f64,
        m: usize,
        traj: &Trajectory,
    ) -> Result<Self, EvolutionError> {
        if (traj.eval(0.0).alpha - alpha0).norm() > 1e-9 * (1.0 + alpha0.norm()) {
            return Err(EvolutionError::TrajectoryMismatch);
        }
        // the sup over the whole trajectory must stay displaceable
        let sup = traj.alpha_sup();
        let excitation = sup * sup / hbar;
        if excitation > m as f64 / WEYL_SAFETY {
            return Err(EvolutionError::InfeasibleDisplacement {
                m,
                excitation,
                required_m: (WEYL_SAFETY * excitation).ceil() as usize,
            });
        }
        let h_op = poly_matrix(h, m, hbar);
        let spectral = SpectralPropagator::new(&h_op, hbar)?;
        let weyl0 = weyl(alpha0, hbar, m)?;
        Ok(HeppFamily {
            hbar,
            m,
            traj: traj.clone(),
            spectral,
            weyl0,
            weyl_cache: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn cutoff(&self) -> usize {
        self.m
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.traj
    }

    pub fn spectral(&self) -> &SpectralPropagator {
        &self.spectral
    }

    pub fn weyl0(&self) -> &FockOperator {
        &self.weyl0
    }

    pub fn alpha(&self, t: f64) -> C64 {
        self.traj.alpha(t)
    }

    pub fn phase(&self, t: f64) -> f64 {
        self.traj.phase(t)
    }

    fn weyl_neg_alpha(&self, t: f64) -> Arc<FockOperator> {
        let key = t.to_bits();
        let mut cache = self.weyl_cache.lock().unwrap();
        if let Some(hit) = cache.get(&key) {
            return hit.clone();
        }
        let op = Arc::new(
            weyl(-self.alpha(t), self.hbar, self.m)
                .expect("feasibility was checked at construction"),
        );
        cache.insert(key, op.clone());
        op
    }

    /// `W_ℏ(t) ψ`.
    pub fn apply(&self, t: f64, psi: &FockState) -> FockState {
        let v1 = self.weyl0.apply(psi);
        let v2 = self.spectral.apply(t, 0.0, &v1);
        let v3 = self.weyl_neg_alpha(t).apply(&v2);
        v3.scale(C64::from_polar(1.0, self.phase(t) / self.hbar))
    }

    /// `e^{−iH_ℏ t/ℏ} ψ` — the bare quantum evolution without framing.
    pub fn bare_apply(&self, t: f64, psi: &FockState) -> FockState {
        self.spectral.apply(t, 0.0, psi)
    }
}
