//! Classical side of the correspondence: Hamilton's equation
//! `iα̇ = (∂H^cl/∂ᾱ)(α)`, the linearized flow `(γ, δ)` with
//! `iγ̇ = uδ̄ + vγ`, `iδ̇ = uγ̄ + vδ`, and the accumulated phase
//! `f(t) = ∫₀ᵗ (H^cl(α) − Im(α ᾱ̇)) dτ`.
//!
//! Everything is driven by the commutative symbol of a symmetric
//! noncommutative Hamiltonian; the joint system for `(α, γ, δ, f)` is
//! integrated as one real 7-dimensional ODE so the pieces stay
//! synchronized.

use crate::ncpoly::{CPoly, NcPoly, Word};
use crate::ode::{self, OdeError, OdeSolution};
use num_complex::Complex64 as C64;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassicalError {
    #[error("hamiltonian is not symmetric; offending word pairs: {}",
        .pairs.iter().map(|(a, b)| format!("({a}, {b})")).collect::<Vec<_>>().join(", "))]
    NotSymmetric { pairs: Vec<(Word, Word)> },
    #[error("hamiltonian degree {degree} is below 2")]
    DegreeTooLow { degree: usize },
    #[error("time grid must be sorted and contain 0")]
    BadTimeGrid,
    #[error("tolerance must be positive")]
    BadTolerance,
    #[error("integration failed: {0}")]
    Integration(#[from] OdeError),
}

/// Symbol data derived from a symmetric Hamiltonian.
#[derive(Clone, Debug)]
pub struct ClassicalSystem {
    hamiltonian: NcPoly,
    h_cl: CPoly,
    dh_dzbar: CPoly,
    u_poly: CPoly,
    v_poly: CPoly,
}

impl ClassicalSystem {
    pub fn hamiltonian(&self) -> &NcPoly {
        &self.hamiltonian
    }

    pub fn symbol(&self) -> &CPoly {
        &self.h_cl
    }

    pub fn degree(&self) -> usize {
        self.hamiltonian.degree()
    }

    /// Energy `H^cl(α)`.
    pub fn energy(&self, alpha: C64) -> f64 {
        self.h_cl.eval(alpha).re
    }

    /// Hamiltonian vector field `α̇ = −i (∂H^cl/∂ᾱ)(α)`.
    pub fn vector_field(&self, alpha: C64) -> C64 {
        -C64::i() * self.dh_dzbar.eval(alpha)
    }

    /// Second-derivative data `(u, v)` of the symbol at a point; `v` is
    /// real because the symbol is.
    pub fn linearization_coeffs(&self, alpha: C64) -> (C64, f64) {
        let u = self.u_poly.eval(alpha);
        let v = self.v_poly.eval(alpha);
        debug_assert!(v.im.abs() <= 1e-12 * (1.0 + v.re.abs()));
        (u, v.re)
    }

    /// Degree-2 part of the Hamiltonian shifted by `α` — the generator of
    /// the quadratic (Bogoliubov) evolution.
    pub fn quadratic_generator(&self, alpha: C64) -> NcPoly {
        let parts = self.hamiltonian.shift_expand(alpha);
        parts.into_iter().nth(2).unwrap_or_else(NcPoly::zero)
    }

    fn rhs(&self, y: &[f64; 7]) -> [f64; 7] {
        let alpha = C64::new(y[0], y[1]);
        let gamma = C64::new(y[2], y[3]);
        let delta = C64::new(y[4], y[5]);
        let adot = self.vector_field(alpha);
        let (u, v) = self.linearization_coeffs(alpha);
        let gdot = -C64::i() * (u * delta.conj() + v * gamma);
        let ddot = -C64::i() * (u * gamma.conj() + v * delta);
        let fdot = self.energy(alpha) - (alpha * adot.conj()).im;
        [adot.re, adot.im, gdot.re, gdot.im, ddot.re, ddot.im, fdot]
    }
}

/// Derive the classical system from a symmetric Hamiltonian of degree ≥ 2.
pub fn build_system(h: &NcPoly) -> Result<ClassicalSystem, ClassicalError> {
    if !h.is_symmetric() {
        return Err(ClassicalError::NotSymmetric { pairs: h.asymmetric_pairs() });
    }
    let degree = h.degree();
    if degree < 2 {
        return Err(ClassicalError::DegreeTooLow { degree });
    }
    let h_cl = h.symbol();
    let dh_dzbar = h_cl.derivative(0, 1);
    let u_poly = h_cl.derivative(0, 2);
    let v_poly = h_cl.derivative(1, 1);
    Ok(ClassicalSystem { hamiltonian: h.clone(), h_cl, dh_dzbar, u_poly, v_poly })
}

/// One sampled point of the joint classical solution.
#[derive(Clone, Copy, Debug)]
pub struct TrajPoint {
    pub t: f64,
    pub alpha: C64,
    pub gamma: C64,
    pub delta: C64,
    pub f: f64,
}

impl TrajPoint {
    /// Symplectic defect `|γ|² − |δ|² − 1`.
    pub fn symplectic_defect(&self) -> f64 {
        self.gamma.norm_sqr() - self.delta.norm_sqr() - 1.0
    }
}

fn unpack(t: f64, y: &[f64; 7]) -> TrajPoint {
    TrajPoint {
        t,
        alpha: C64::new(y[0], y[1]),
        gamma: C64::new(y[2], y[3]),
        delta: C64::new(y[4], y[5]),
        f: y[6],
    }
}

/// Sampled solution of the joint system with dense output between
/// samples.
#[derive(Clone, Debug)]
pub struct Trajectory {
    samples: Vec<TrajPoint>,
    forward: OdeSolution<7>,
    backward: Option<OdeSolution<7>>,
    energy0: f64,
    alpha_sup: f64,
}

impl Trajectory {
    pub fn samples(&self) -> &[TrajPoint] {
        &self.samples
    }

    pub fn t_max(&self) -> f64 {
        self.forward.t_end
    }

    pub fn t_min(&self) -> f64 {
        self.backward.as_ref().map(|b| -b.t_end).unwrap_or(0.0)
    }

    /// Dense evaluation anywhere inside the integrated span.
    pub fn eval(&self, t: f64) -> TrajPoint {
        if t >= 0.0 {
            unpack(t, &self.forward.eval(t))
        } else {
            // the backward leg integrates the negated field, so its state
            // at τ is exactly the solution at t = −τ, phase included
            let b = self.backward.as_ref().expect("negative time outside integrated span");
            unpack(t, &b.eval(-t))
        }
    }

    pub fn alpha(&self, t: f64) -> C64 {
        self.eval(t).alpha
    }

    pub fn phase(&self, t: f64) -> f64 {
        self.eval(t).f
    }

    pub fn energy0(&self) -> f64 {
        self.energy0
    }

    /// Largest `|α(t)|` seen while integrating (used for displacement
    /// feasibility checks).
    pub fn alpha_sup(&self) -> f64 {
        self.alpha_sup
    }

    /// CSV export: `t,re_alpha,im_alpha,re_gamma,im_gamma,re_delta,im_delta,f,energy`.
    pub fn export_csv<W: Write>(&self, sys: &ClassicalSystem, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "t,re_alpha,im_alpha,re_gamma,im_gamma,re_delta,im_delta,f,energy"
        )?;
        for p in &self.samples {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.t,
                p.alpha.re,
                p.alpha.im,
                p.gamma.re,
                p.gamma.im,
                p.delta.re,
                p.delta.im,
                p.f,
                sys.energy(p.alpha)
            )?;
        }
        Ok(())
    }
}

/// Integrate the joint system over a sorted time grid containing 0.
pub fn integrate(
    sys: &ClassicalSystem,
    alpha0: C64,
    t_grid: &[f64],
    tol: f64,
) -> Result<Trajectory, ClassicalError> {
    if tol <= 0.0 {
        return Err(ClassicalError::BadTolerance);
    }
    if t_grid.is_empty()
        || t_grid.windows(2).any(|w| w[0] > w[1])
        || !t_grid.iter().any(|&t| t == 0.0)
    {
        return Err(ClassicalError::BadTimeGrid);
    }
    let y0 = [alpha0.re, alpha0.im, 1.0, 0.0, 0.0, 0.0, 0.0];
    let t_end = t_grid.last().copied().unwrap().max(0.0);
    let t_begin = t_grid.first().copied().unwrap().min(0.0);

    let f_fwd = |_t: f64, y: &[f64; 7]| sys.rhs(y);
    let forward = ode::integrate(&f_fwd, y0, t_end, tol, tol)?;
    let backward = if t_begin < 0.0 {
        let f_bwd = |_t: f64, y: &[f64; 7]| {
            let mut d = sys.rhs(y);
            for v in &mut d {
                *v = -*v;
            }
            d
        };
        Some(ode::integrate(&f_bwd, y0, -t_begin, tol, tol)?)
    } else {
        None
    };

    let mut alpha_sup = alpha0.norm();
    for sol in std::iter::once(&forward).chain(backward.iter()) {
        for step in &sol.steps {
            for k in 0..=4 {
                let y = step.eval(step.t0 + step.h * k as f64 / 4.0);
                alpha_sup = alpha_sup.max(C64::new(y[0], y[1]).norm());
            }
        }
    }

    let mut traj = Trajectory {
        samples: Vec::new(),
        forward,
        backward,
        energy0: sys.energy(alpha0),
        alpha_sup,
    };
    traj.samples = t_grid.iter().map(|&t| traj.eval(t)).collect();
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncpoly::parse;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn harmonic() -> ClassicalSystem {
        build_system(&parse("a* a").unwrap()).unwrap()
    }

    fn anharmonic() -> ClassicalSystem {
        // symbol |z|² + ½|z|⁴
        build_system(&parse("a* a + (0.5) (a* a)(a* a)").unwrap()).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn build_system_symbol_data() {
        let sys = harmonic();
        assert_eq!(sys.symbol().coeff(1, 1), c(1.0, 0.0));
        let (u, v) = sys.linearization_coeffs(c(0.3, -0.8));
        assert_eq!(u, c(0.0, 0.0));
        assert!((v - 1.0).abs() < 1e-15);

        let sys = anharmonic();
        // ∂H^cl/∂z̄ = z + z²z̄
        let d = sys.vector_field(c(1.0, 0.0));
        assert!((d - c(0.0, -2.0)).norm() < 1e-14);
        let (u, v) = sys.linearization_coeffs(c(1.0, 0.0));
        assert!((u - c(1.0, 0.0)).norm() < 1e-14);
        assert!((v - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_hamiltonians() {
        let e = build_system(&parse("a a").unwrap());
        assert!(matches!(e, Err(ClassicalError::NotSymmetric { .. })));
        let e = build_system(&parse("a + a*").unwrap());
        assert!(matches!(e, Err(ClassicalError::DegreeTooLow { degree: 1 })));
    }

    #[test]
    fn vector_field_matches_finite_differences() {
        let sys = anharmonic();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let eps = 1e-6;
        for _ in 0..100 {
            let alpha = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            // −i ∂H/∂ᾱ via central differences in real coordinates:
            // ∂H/∂ᾱ = (∂_ξ + i∂_π)H / √2 with α = (ξ+iπ)/√2
            let h = |a: C64| sys.energy(a);
            let dxi = (h(alpha + c(eps, 0.0)) - h(alpha - c(eps, 0.0))) / (2.0 * eps);
            let dpi = (h(alpha + c(0.0, eps)) - h(alpha - c(0.0, eps))) / (2.0 * eps);
            // with z = re + i·im, ∂/∂z̄ = ½(∂_re + i ∂_im)
            let grad = 0.5 * c(dxi, dpi);
            let expect = -C64::i() * grad;
            assert!((sys.vector_field(alpha) - expect).norm() < 1e-6);
        }
    }

    #[test]
    fn harmonic_closed_form() {
        let sys = harmonic();
        let grid: Vec<f64> = (0..=40).map(|k| k as f64 * 0.25).collect();
        let traj = integrate(&sys, c(1.0, 0.0), &grid, 1e-10).unwrap();
        for p in traj.samples() {
            let expect = c(p.t.cos(), -p.t.sin());
            assert!((p.alpha - expect).norm() < 1e-9, "t = {}", p.t);
            assert!((p.gamma - expect).norm() < 1e-9);
            assert!(p.delta.norm() < 1e-9);
            assert!(p.f.abs() < 1e-9);
        }
    }

    #[test]
    fn anharmonic_phase_rotation() {
        // modulus conserved ⇒ α(t) = e^{−2it} for α₀ = 1
        let sys = anharmonic();
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
        let traj = integrate(&sys, c(1.0, 0.0), &grid, 1e-10).unwrap();
        for p in traj.samples() {
            let expect = c((2.0 * p.t).cos(), -(2.0 * p.t).sin());
            assert!((p.alpha - expect).norm() < 1e-7, "t = {}", p.t);
        }
    }

    #[test]
    fn fixed_point_accumulates_linear_phase() {
        // α₀ = 0 is a critical point of both example symbols
        let sys = anharmonic();
        let traj = integrate(&sys, c(0.0, 0.0), &[0.0, 1.0, 2.0], 1e-10).unwrap();
        for p in traj.samples() {
            assert!(p.alpha.norm() < 1e-12);
            assert!((p.f - p.t * sys.energy(c(0.0, 0.0))).abs() < 1e-12);
        }
    }

    #[test]
    fn conservation_laws_over_long_window() {
        let sys = anharmonic();
        let grid: Vec<f64> = (0..=100).map(|k| k as f64 * 0.1).collect();
        let traj = integrate(&sys, c(1.0, 0.0), &grid, 1e-10).unwrap();
        let e0 = traj.energy0();
        for p in traj.samples() {
            assert!(p.symplectic_defect().abs() < 1e-8, "t = {}", p.t);
            assert!((sys.energy(p.alpha) - e0).abs() < 1e-8 * (1.0 + e0.abs()));
        }
    }

    #[test]
    fn flow_differential_matches_linearization() {
        let sys = anharmonic();
        let grid = [0.0, 0.5, 1.0, 1.7];
        let alpha0 = c(1.0, 0.0);
        let traj = integrate(&sys, alpha0, &grid, 1e-10).unwrap();
        let eps = 1e-5;
        for z in [c(1.0, 0.0), c(0.0, 1.0)] {
            let plus = integrate(&sys, alpha0 + z * eps, &grid, 1e-12).unwrap();
            let minus = integrate(&sys, alpha0 - z * eps, &grid, 1e-12).unwrap();
            for (i, p) in traj.samples().iter().enumerate() {
                let fd = (plus.samples()[i].alpha - minus.samples()[i].alpha) / (2.0 * eps);
                let lin = p.gamma * z + p.delta * z.conj();
                assert!((fd - lin).norm() < 1e-4, "t = {}, z = {z}", p.t);
            }
        }
    }

    #[test]
    fn negative_times_supported() {
        let sys = anharmonic();
        let grid = [-1.0, 0.0, 1.0];
        let traj = integrate(&sys, c(1.0, 0.0), &grid, 1e-10).unwrap();
        let back = traj.samples()[0];
        let expect = c((2.0f64).cos(), (2.0f64).sin());
        assert!((back.alpha - expect).norm() < 1e-7);
        // reversing from t = −1 must return to the start
        assert!((traj.eval(0.0).alpha - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn csv_export_shape() {
        let sys = harmonic();
        let traj = integrate(&sys, c(1.0, 0.0), &[0.0, 1.0], 1e-10).unwrap();
        let mut buf = Vec::new();
        traj.export_csv(&sys, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,re_alpha,im_alpha,re_gamma,im_gamma,re_delta,im_delta,f,energy"
        );
        assert_eq!(lines.count(), 2);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn grid_validation() {
        let sys = harmonic();
        assert!(matches!(
            integrate(&sys, c(0.0, 0.0), &[0.5, 1.0], 1e-10),
            Err(ClassicalError::BadTimeGrid)
        ));
        assert!(matches!(
            integrate(&sys, c(0.0, 0.0), &[0.0, 1.0], -1.0),
            Err(ClassicalError::BadTolerance)
        ));
    }
}
