//! Combinatorial model for the `n`-framed solid-torus side of a splice:
//! the complexes `L(n)` and `M(n)` with differentials `l_n`, `m_n` and
//! the maps `Psi_1(n)`, `Psi_2(n)`, `Psi_3(n)`, `Phi(n)` between them.
//!
//! `L(n)` has `2n - 1` generators `r_1..r_{n-1}`, `s_1..s_{n-1}`, `p`;
//! `M(n)` has `3n - 2` generators `x_1..x_{n-1}`, `y_1..y_{n-1}`,
//! `z_1..z_n`. Everything is given by explicit generator rules:
//!
//! ```text
//! l_n: s_{i+1} -> r_i (i = 1..n-2),  p -> r_{n-1}
//! m_n: z_{i+1} -> y_i (i = 1..n-1)
//! Psi_1: s_i -> x_i,  p -> z_1
//! Psi_2: s_i -> z_i,  r_i -> y_i,  p -> z_n
//! Psi_3: s_i -> y_i
//! Phi:   x_i -> r_i
//! ```
//!
//! For `n = 1` every indexed family is empty and `l_1(p) = 0`: the only
//! consistent reading of the rules, and the one that gives `M(1)`
//! homology dimension 1. The homology dimensions are `(1, n)` for all n.

use thiserror::Error;

use crate::chain::UngradedComplex;
use crate::f2linalg::BitMatrix;
use crate::knotsys::{BorderedSystem, KnotSysError};

#[derive(Debug, Error)]
pub enum LensModelError {
    #[error("model index n must be >= 1, got {0}")]
    InvalidIndex(usize),
    #[error(transparent)]
    Invariant(#[from] KnotSysError),
}

/// The bordered system of the `n`-framed solid-torus model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSystem {
    n: usize,
    system: BorderedSystem,
}

impl ModelSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn system(&self) -> &BorderedSystem {
        &self.system
    }

    pub fn l(&self) -> &UngradedComplex {
        self.system.l()
    }

    pub fn m(&self) -> &UngradedComplex {
        self.system.m()
    }
}

/// `L(n)` generator order: `r_1..r_{n-1}`, `s_1..s_{n-1}`, `p`.
fn l_labels(n: usize) -> Vec<String> {
    let mut ls: Vec<String> = (1..n).map(|i| format!("r{i}")).collect();
    ls.extend((1..n).map(|i| format!("s{i}")));
    ls.push("p".to_string());
    ls
}

/// `M(n)` generator order: `x_1..x_{n-1}`, `y_1..y_{n-1}`, `z_1..z_n`.
fn m_labels(n: usize) -> Vec<String> {
    let mut ls: Vec<String> = (1..n).map(|i| format!("x{i}")).collect();
    ls.extend((1..n).map(|i| format!("y{i}")));
    ls.extend((1..=n).map(|i| format!("z{i}")));
    ls
}

/// Builds the model system for `n >= 1`; the result satisfies all
/// bordered-system invariants by construction (and their checks run).
pub fn build_model(n: usize) -> Result<ModelSystem, LensModelError> {
    if n == 0 {
        return Err(LensModelError::InvalidIndex(0));
    }
    // Index helpers into the label orders above (1-based generator
    // subscripts).
    let l_dim = 2 * n - 1;
    let m_dim = 3 * n - 2;
    let ri = |i: usize| i - 1;
    let si = |i: usize| (n - 1) + (i - 1);
    let pp = l_dim - 1;
    let xi = |i: usize| i - 1;
    let yi = |i: usize| (n - 1) + (i - 1);
    let zi = |i: usize| 2 * (n - 1) + (i - 1);

    let mut l_diff = BitMatrix::zeros(l_dim, l_dim);
    for i in 1..=n.saturating_sub(2) {
        l_diff.set(ri(i), si(i + 1), true);
    }
    if n >= 2 {
        l_diff.set(ri(n - 1), pp, true);
    }
    let l = UngradedComplex::new(l_labels(n), l_diff).expect("fresh labels, square matrix");

    let mut m_diff = BitMatrix::zeros(m_dim, m_dim);
    for i in 1..n {
        m_diff.set(yi(i), zi(i + 1), true);
    }
    let m = UngradedComplex::new(m_labels(n), m_diff).expect("fresh labels, square matrix");

    let mut psi1 = BitMatrix::zeros(m_dim, l_dim);
    for i in 1..n {
        psi1.set(xi(i), si(i), true);
    }
    psi1.set(zi(1), pp, true);

    let mut psi2 = BitMatrix::zeros(m_dim, l_dim);
    for i in 1..n {
        psi2.set(zi(i), si(i), true);
        psi2.set(yi(i), ri(i), true);
    }
    psi2.set(zi(n), pp, true);

    let mut psi3 = BitMatrix::zeros(m_dim, l_dim);
    for i in 1..n {
        psi3.set(yi(i), si(i), true);
    }

    let mut phi = BitMatrix::zeros(l_dim, m_dim);
    for i in 1..n {
        phi.set(ri(i), xi(i), true);
    }

    let system = BorderedSystem::new(l, m, psi1, psi2, psi3, phi)?;
    Ok(ModelSystem { n, system })
}

/// Homology dimensions `(dim H(L(n)), dim H(M(n)))`; computed, not
/// hard-coded, and equal to `(1, n)`.
pub fn model_homology(n: usize) -> Result<(usize, usize), LensModelError> {
    let model = build_model(n)?;
    let hl = model.l().homology_dim().expect("L(n) is a complex");
    let hm = model.m().homology_dim().expect("M(n) is a complex");
    Ok((hl, hm))
}
