//! Truncated Fock-space realization of the algebra: ladder matrices,
//! monomial and polynomial operators with ℏ-scaling, level truncations,
//! weighted norms and exact operator norms between weighted spaces.
//!
//! A cutoff `M` keeps the basis `{Ω₀, …, Ω_M}`. Products of truncated
//! matrices differ from truncations of products near the edge; callers are
//! expected to compare on interior columns (see [`interior_cutoff`]) where
//! both agree with the untruncated operator.

use crate::linalg;
use crate::ncpoly::{Letter, NcPoly, Word};
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use std::io::Write;

/// State vector on the truncated basis.
#[derive(Clone, Debug)]
pub struct FockState {
    m: usize,
    coeffs: Array1<C64>,
}

impl FockState {
    pub fn new(coeffs: Array1<C64>) -> Self {
        assert!(!coeffs.is_empty());
        FockState { m: coeffs.len() - 1, coeffs }
    }

    pub fn vacuum(m: usize) -> Self {
        let mut c = Array1::zeros(m + 1);
        c[0] = C64::new(1.0, 0.0);
        FockState { m, coeffs: c }
    }

    /// Basis vector `Ω_n`.
    pub fn basis(m: usize, n: usize) -> Self {
        assert!(n <= m);
        let mut c = Array1::zeros(m + 1);
        c[n] = C64::new(1.0, 0.0);
        FockState { m, coeffs: c }
    }

    pub fn cutoff(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &Array1<C64> {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> FockState {
        let n = self.norm();
        assert!(n > 0.0);
        self.scale(C64::new(1.0 / n, 0.0))
    }

    pub fn scale(&self, c: C64) -> FockState {
        FockState { m: self.m, coeffs: self.coeffs.mapv(|z| z * c) }
    }

    pub fn add(&self, other: &FockState) -> FockState {
        assert_eq!(self.m, other.m);
        FockState { m: self.m, coeffs: &self.coeffs + &other.coeffs }
    }

    pub fn sub(&self, other: &FockState) -> FockState {
        assert_eq!(self.m, other.m);
        FockState { m: self.m, coeffs: &self.coeffs - &other.coeffs }
    }

    /// Inner product `⟨self, other⟩`, linear in the first slot.
    pub fn inner(&self, other: &FockState) -> C64 {
        assert_eq!(self.m, other.m);
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    /// Weighted norm `(Σ |⟨ψ,Ω_n⟩|² (n+1)^{2β})^{1/2}`; the plain norm at
    /// β = 0 and monotone in β.
    pub fn beta_norm(&self, beta: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, z)| z.norm_sqr() * ((n + 1) as f64).powf(2.0 * beta))
            .sum::<f64>()
            .sqrt()
    }

    /// Norm of the component at index `from` and above.
    pub fn tail_mass(&self, from: usize) -> f64 {
        self.coeffs
            .iter()
            .skip(from)
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Zero-pad (or drop the tail) into a space with cutoff `m`.
    pub fn embed(&self, m: usize) -> FockState {
        let mut c = Array1::zeros(m + 1);
        for n in 0..=self.m.min(m) {
            c[n] = self.coeffs[n];
        }
        FockState { m, coeffs: c }
    }

    /// Apply the lowering ladder `a` (ℏ = 1).
    pub fn lowered(&self) -> FockState {
        let mut c = Array1::zeros(self.m + 1);
        for n in 1..=self.m {
            c[n - 1] = (n as f64).sqrt() * self.coeffs[n];
        }
        FockState { m: self.m, coeffs: c }
    }

    /// Apply the raising ladder `a†` with the truncated-edge convention
    /// (the component raised past the cutoff is dropped).
    pub fn raised(&self) -> FockState {
        let mut c = Array1::zeros(self.m + 1);
        for n in 0..self.m {
            c[n + 1] = ((n + 1) as f64).sqrt() * self.coeffs[n];
        }
        FockState { m: self.m, coeffs: c }
    }
}

/// Dense operator on the truncated basis.
#[derive(Clone, Debug)]
pub struct FockOperator {
    m: usize,
    matrix: Array2<C64>,
}

impl FockOperator {
    pub fn new(matrix: Array2<C64>) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols());
        assert!(matrix.nrows() > 0);
        FockOperator { m: matrix.nrows() - 1, matrix }
    }

    pub fn identity(m: usize) -> Self {
        FockOperator::new(Array2::from_diag(&Array1::from_elem(m + 1, C64::new(1.0, 0.0))))
    }

    pub fn zero(m: usize) -> Self {
        FockOperator { m, matrix: Array2::zeros((m + 1, m + 1)) }
    }

    pub fn from_diagonal(values: &Array1<C64>) -> Self {
        FockOperator::new(Array2::from_diag(values))
    }

    pub fn cutoff(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn apply(&self, psi: &FockState) -> FockState {
        assert_eq!(self.m, psi.m);
        FockState { m: self.m, coeffs: self.matrix.dot(&psi.coeffs) }
    }

    pub fn compose(&self, rhs: &FockOperator) -> FockOperator {
        assert_eq!(self.m, rhs.m);
        FockOperator { m: self.m, matrix: linalg::matmul(&self.matrix, &rhs.matrix) }
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator { m: self.m, matrix: linalg::adjoint(&self.matrix) }
    }

    pub fn add(&self, rhs: &FockOperator) -> FockOperator {
        assert_eq!(self.m, rhs.m);
        FockOperator { m: self.m, matrix: &self.matrix + &rhs.matrix }
    }

    pub fn sub(&self, rhs: &FockOperator) -> FockOperator {
        assert_eq!(self.m, rhs.m);
        FockOperator { m: self.m, matrix: &self.matrix - &rhs.matrix }
    }

    pub fn scale(&self, c: C64) -> FockOperator {
        FockOperator { m: self.m, matrix: self.matrix.mapv(|z| z * c) }
    }

    pub fn commutator(&self, rhs: &FockOperator) -> FockOperator {
        self.compose(rhs).sub(&rhs.compose(self))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest entry magnitude restricted to rows and columns `0..=upper`.
    pub fn max_abs_block(&self, upper: usize) -> f64 {
        let upper = upper.min(self.m);
        let mut d = 0.0f64;
        for i in 0..=upper {
            for j in 0..=upper {
                d = d.max(self.matrix[(i, j)].norm());
            }
        }
        d
    }

    /// Largest leading block size `b` such that every column `j ≤ b` has
    /// tail mass below `eps` in the top `margin` rows — the columns on
    /// which the truncated computation still represents the untruncated
    /// operator.
    pub fn column_tail_block(&self, margin: usize, eps: f64) -> usize {
        let start = (self.m + 1).saturating_sub(margin);
        let mut block = 0;
        for j in 0..=self.m {
            let tail: f64 = (start..=self.m)
                .map(|i| self.matrix[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if tail > eps {
                break;
            }
            block = j;
        }
        block
    }

    /// Level truncation: zero all entries outside the leading block
    /// `0..=m_small`, keeping the ambient dimension. Idempotent.
    pub fn truncate(&self, m_small: usize) -> FockOperator {
        assert!(m_small <= self.m);
        let mut out = Array2::zeros((self.m + 1, self.m + 1));
        for i in 0..=m_small {
            for j in 0..=m_small {
                out[(i, j)] = self.matrix[(i, j)];
            }
        }
        FockOperator { m: self.m, matrix: out }
    }

    /// Exact operator norm from the β_in-weighted space to the
    /// β_out-weighted space: the largest singular value of
    /// `D_out · T · D_in⁻¹` with `D_β = diag((n+1)^β)`.
    pub fn op_norm(&self, beta_in: f64, beta_out: f64) -> f64 {
        let n = self.m + 1;
        let mut scaled = self.matrix.clone();
        for i in 0..n {
            let wr = ((i + 1) as f64).powf(beta_out);
            for j in 0..n {
                let wc = ((j + 1) as f64).powf(-beta_in);
                scaled[(i, j)] *= wr * wc;
            }
        }
        let s = linalg::singular_values(&scaled);
        if s.is_empty() {
            0.0
        } else {
            s[0]
        }
    }

    /// Operator dump: header `# fock M=<M> hbar=<h>` then `row,col,re,im`
    /// triplets of the nonzero entries.
    pub fn dump_csv<W: Write>(&self, hbar: f64, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# fock M={} hbar={}", self.m, hbar)?;
        writeln!(w, "row,col,re,im")?;
        for i in 0..=self.m {
            for j in 0..=self.m {
                let z = self.matrix[(i, j)];
                if z != C64::new(0.0, 0.0) {
                    writeln!(w, "{},{},{:.16e},{:.16e}", i, j, z.re, z.im)?;
                }
            }
        }
        Ok(())
    }
}

/// Ladder matrices `(a, a†)` at ℏ = 1: `a[n−1, n] = √n` and its adjoint.
pub fn ladder_matrices(m: usize) -> (FockOperator, FockOperator) {
    assert!(m >= 1);
    let mut a = Array2::zeros((m + 1, m + 1));
    for n in 1..=m {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let adag = linalg::adjoint(&a);
    (FockOperator::new(a), FockOperator::new(adag))
}

/// Diagonal coefficient function of a monomial word: the word sends `Ω_n`
/// to `c(n) · Ω_{n+ℓ}` with `ℓ` its net level shift.
#[derive(Clone, Debug)]
pub struct LadderCoeff {
    word: Word,
}

impl LadderCoeff {
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn level_shift(&self) -> i64 {
        self.word.level_shift()
    }

    /// `c(n) ≥ 0` by applying the ladder rules right to left; zero whenever
    /// an intermediate level would drop below the vacuum.
    pub fn value(&self, n: i64) -> f64 {
        if n < 0 {
            return 0.0;
        }
        let mut level = n;
        let mut amp = 1.0f64;
        for b in self.word.letters().iter().rev() {
            match b {
                Letter::A => {
                    if level == 0 {
                        return 0.0;
                    }
                    amp *= (level as f64).sqrt();
                    level -= 1;
                }
                Letter::AStar => {
                    level += 1;
                    amp *= (level as f64).sqrt();
                }
            }
        }
        amp
    }
}

/// Coefficient function of a monomial word.
pub fn monomial_coeff(word: &Word) -> LadderCoeff {
    LadderCoeff { word: word.clone() }
}

/// Matrix of one monomial word at scale ℏ: the product of truncated ladder
/// matrices in word order, carrying an overall `ℏ^{k/2}`.
///
/// On interior columns (walks that never leave the cutoff) the entries
/// agree with the single-diagonal form from [`monomial_coeff`].
pub fn monomial_matrix(word: &Word, m: usize, hbar: f64) -> FockOperator {
    assert!(hbar > 0.0);
    assert!(m >= word.len().max(1));
    let mut out = Array2::zeros((m + 1, m + 1));
    let scale = hbar.powf(word.len() as f64 / 2.0);
    'col: for n in 0..=m as i64 {
        let mut level = n;
        let mut amp = 1.0f64;
        for b in word.letters().iter().rev() {
            match b {
                Letter::A => {
                    if level == 0 {
                        continue 'col;
                    }
                    amp *= (level as f64).sqrt();
                    level -= 1;
                }
                Letter::AStar => {
                    level += 1;
                    if level > m as i64 {
                        continue 'col;
                    }
                    amp *= (level as f64).sqrt();
                }
            }
        }
        out[(level as usize, n as usize)] = C64::new(scale * amp, 0.0);
    }
    FockOperator::new(out)
}

/// Exact level-`m` truncation of the closed monomial operator: the
/// single-diagonal form `1_{n≤m} 1_{n+ℓ≤m} c(n)` scaled by `ℏ^{k/2}`.
pub fn monomial_matrix_exact(word: &Word, m: usize, hbar: f64) -> FockOperator {
    assert!(hbar > 0.0);
    let coeff = monomial_coeff(word);
    let ell = coeff.level_shift();
    let scale = hbar.powf(word.len() as f64 / 2.0);
    let mut out = Array2::zeros((m + 1, m + 1));
    for n in 0..=m as i64 {
        let row = n + ell;
        if row < 0 || row > m as i64 {
            continue;
        }
        let v = coeff.value(n);
        if v != 0.0 {
            out[(row as usize, n as usize)] = C64::new(scale * v, 0.0);
        }
    }
    FockOperator::new(out)
}

/// Matrix of a polynomial at scale ℏ: linear combination of
/// [`monomial_matrix`] terms; Hermitian when the polynomial is symmetric.
pub fn poly_matrix(p: &NcPoly, m: usize, hbar: f64) -> FockOperator {
    assert!(hbar > 0.0);
    assert!(m >= p.degree().max(1), "cutoff {m} below polynomial degree {}", p.degree());
    let mut out = Array2::<C64>::zeros((m + 1, m + 1));
    for (word, &c) in p.terms() {
        if word.is_empty() {
            for i in 0..=m {
                out[(i, i)] += c;
            }
            continue;
        }
        let mono = monomial_matrix(word, m, hbar);
        out.zip_mut_with(mono.matrix(), |acc, v| *acc += c * v);
    }
    FockOperator::new(out)
}

/// Largest column index on which every word of `p` stays inside the
/// cutoff during its ladder walk, so truncated products are exact there.
pub fn interior_cutoff(p: &NcPoly, m: usize) -> usize {
    let elevation = p
        .terms()
        .map(|(w, _)| w.max_elevation())
        .max()
        .unwrap_or(0);
    m.saturating_sub(elevation.max(p.degree()))
}

/// Diagonal weight operator `diag((n+1)^β)`.
pub fn weight_operator(m: usize, beta: f64) -> FockOperator {
    let d = Array1::from_iter((0..=m).map(|n| C64::new(((n + 1) as f64).powf(beta), 0.0)));
    FockOperator::from_diagonal(&d)
}

/// Norm constant `K(β, d) = β d^{1+d/2} (1+d)^{|β−1|}` controlling how fast
/// truncated evolutions can grow weighted norms.
pub fn bound_k(beta: f64, d: usize) -> f64 {
    assert!(d >= 1);
    let df = d as f64;
    beta * df.powf(1.0 + df / 2.0) * (1.0 + df).powf((beta - 1.0).abs())
}
