//! The surgery-complex builders and the cross-check harness.
//!
//! Three routes to the same homology:
//!
//! - [`build_rational`] assembles the `p/q` complex directly from a
//!   homology-level knot system: `q` copies of `H_inf` in grade 2,
//!   `p + q` copies of `H_1` in grade 1, `p` copies of `H_0` in grade 0,
//!   with `phi`/`phibar` blocks feeding copy `i` and copy `i + p`, and
//!   `psi`/`psibar` blocks draining copies `j + q` and `j`.
//! - [`build_zigzag`] lays out the integer-surgery two-row diagram with
//!   `2n - 1` terms in its first row and reads the arrows off position
//!   by position; it must agree with `build_rational` at slope `n/1`.
//! - [`build_splice`] glues two bordered systems chain-level:
//!   `C = (L_1 (x) L_2) + (M_1 (x) M_2)` with differential
//!   `D = d + Phibar + Psibar`, `Phibar = Phi^1 (x) Phi^2`,
//!   `Psibar = Psi_1 (x) Psi_2 + Psi_2 (x) Psi_1 + Psi_3 (x) Psi_3`.
//!   `D^2 = 0` is checked at runtime — a failure falsifies an input
//!   relation and is reported with a witness generator.
//!
//! [`compare_methods`] runs the rational route against the splice route
//! (knot complement against the `n`-framed model) and records both
//! totals; agreement is data, not an assertion.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{ChainComplex, ChainError, Grade, GradedSpace, UngradedComplex};
use crate::f2linalg::BitMatrix;
use crate::knotsys::{BorderedSystem, KnotSysError, KnotSystem};
use crate::lensmodel::{build_model, LensModelError};

#[derive(Debug, Error)]
pub enum SurgeryError {
    #[error("invalid slope {p}/{q}: {reason}")]
    InvalidSlope { p: usize, q: usize, reason: String },
    #[error("knot system `{input}` fails validation: {failed}")]
    ValidationFailed { input: String, failed: String },
    #[error("`{input}` carries nonzero differentials; this builder takes homology-level systems (use the splice route for chain-level input)")]
    ChainLevelInput { input: String },
    #[error("splice differential does not square to zero: D^2({witness}) != 0")]
    SpliceNotAComplex { witness: String },
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    KnotSys(#[from] KnotSysError),
    #[error(transparent)]
    LensModel(#[from] LensModelError),
}

/// A positive rational surgery slope `p/q` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurgerySlope {
    p: usize,
    q: usize,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl SurgerySlope {
    pub fn new(p: usize, q: usize) -> Result<Self, SurgeryError> {
        let invalid = |reason: &str| SurgeryError::InvalidSlope {
            p,
            q,
            reason: reason.into(),
        };
        if p == 0 || q == 0 {
            return Err(invalid("p and q must be positive"));
        }
        if gcd(p, q) != 1 {
            return Err(invalid("p and q must be coprime"));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }
}

/// Convention note attached to every rational-builder report: the
/// fourth differential family is taken to be `psibar^j: H_1(j) -> H_0(j)`,
/// the unique type-correct choice for that slot.
pub const NOTE_PSIBAR_FAMILY: &str =
    "convention: fourth differential family is psibar^j: H_1(j) -> H_0(j), the unique map of the required shape for that slot";

/// Convention note attached to every zig-zag report: in the second row
/// `H_inf` is the source of both `phi` and `phibar`, matching their
/// definition as maps out of `H_inf`.
pub const NOTE_ZIGZAG_ORIENTATION: &str =
    "convention: zig-zag second row oriented with H_inf as the source of phi and phibar";

/// One computed homology answer with enough context to reproduce it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomologyReport {
    pub input: String,
    pub method: String,
    pub p: usize,
    pub q: usize,
    /// Per-grade dimensions of the built complex; the splice route is
    /// ungraded and reports a single `"ungraded"` entry.
    pub space_dims: BTreeMap<String, usize>,
    pub homology_dims: BTreeMap<String, usize>,
    pub total: usize,
    /// Differential ranks, ascending grade (`[rank d_1, rank d_2]` for
    /// the graded builders, `[rank D]` for the splice).
    pub ranks: Vec<usize>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

fn graded_report(
    input: &str,
    method: &str,
    p: usize,
    q: usize,
    complex: &ChainComplex,
    notes: Vec<String>,
    started: Instant,
) -> Result<HomologyReport, SurgeryError> {
    let homology = complex.homology_dims()?;
    let total = homology.values().sum();
    let grades: Vec<Grade> = complex.spaces().grades().collect();
    let mut ranks: Vec<usize> = grades
        .iter()
        .filter(|&&g| complex.dim(g - 1) > 0 && complex.dim(g) > 0)
        .map(|&g| complex.differential(g).rank())
        .collect();
    if ranks.is_empty() {
        ranks.push(0);
    }
    Ok(HomologyReport {
        input: input.to_string(),
        method: method.to_string(),
        p,
        q,
        space_dims: complex
            .dims()
            .iter()
            .map(|(g, &d)| (g.to_string(), d))
            .collect(),
        homology_dims: homology.iter().map(|(g, &d)| (g.to_string(), d)).collect(),
        total,
        ranks,
        notes,
        elapsed: started.elapsed(),
    })
}

fn require_valid_homology_level(ks: &KnotSystem) -> Result<(), SurgeryError> {
    let report = ks.validate();
    if !report.pass() {
        let failed: Vec<String> = report.failed().map(|c| c.name.clone()).collect();
        return Err(SurgeryError::ValidationFailed {
            input: ks.name().to_string(),
            failed: failed.join("; "),
        });
    }
    if !ks.is_homology_level() {
        return Err(SurgeryError::ChainLevelInput {
            input: ks.name().to_string(),
        });
    }
    Ok(())
}

fn copies(labels: &[String], copy: usize) -> Vec<String> {
    labels.iter().map(|l| format!("{l}@{copy}")).collect()
}

/// The rational surgery complex for slope `p/q`: grades `(2, 1, 0)` hold
/// `q` copies of `H_inf`, `p + q` copies of `H_1` and `p` copies of
/// `H_0`. The differential is the sum of the four block families
/// `phi^i: H_inf(i) -> H_1(i)`, `phibar^i: H_inf(i) -> H_1(i+p)`
/// (`i = 1..q`), `psi^j: H_1(j+q) -> H_0(j)` and
/// `psibar^j: H_1(j) -> H_0(j)` (`j = 1..p`).
pub fn build_rational(ks: &KnotSystem, slope: SurgerySlope) -> Result<ChainComplex, SurgeryError> {
    require_valid_homology_level(ks)?;
    let (p, q) = (slope.p, slope.q);
    let (a, b, c) = ks.dims();

    let mut labels: BTreeMap<Grade, Vec<String>> = BTreeMap::new();
    labels.insert(
        2,
        (1..=q)
            .flat_map(|i| copies(ks.c_inf().labels(), i))
            .collect(),
    );
    labels.insert(
        1,
        (1..=p + q)
            .flat_map(|i| copies(ks.c_one().labels(), i))
            .collect(),
    );
    labels.insert(
        0,
        (1..=p)
            .flat_map(|j| copies(ks.c_zero().labels(), j))
            .collect(),
    );

    // d_2: phi into copy i, phibar into copy i + p.
    let mut d2 = BitMatrix::zeros((p + q) * b, q * a);
    for i in 1..=q {
        d2.paste((i - 1) * b, (i - 1) * a, ks.phi());
        d2.paste((i + p - 1) * b, (i - 1) * a, ks.phibar());
    }
    // d_1: psi from copy j + q, psibar from copy j.
    let mut d1 = BitMatrix::zeros(p * c, (p + q) * b);
    for j in 1..=p {
        d1.paste((j - 1) * c, (j + q - 1) * b, ks.psi());
        d1.paste((j - 1) * c, (j - 1) * b, ks.psibar());
    }

    let complex = ChainComplex::new(
        GradedSpace::new(labels)?,
        BTreeMap::from([(2, d2), (1, d1)]),
    )?;
    complex.validate()?;
    Ok(complex)
}

pub fn rational_report(
    ks: &KnotSystem,
    slope: SurgerySlope,
) -> Result<HomologyReport, SurgeryError> {
    let started = Instant::now();
    let complex = build_rational(ks, slope)?;
    graded_report(
        ks.name(),
        "rational",
        slope.p,
        slope.q,
        &complex,
        vec![NOTE_PSIBAR_FAMILY.to_string()],
        started,
    )
}

/// The integer-surgery zig-zag complex for framing `n`, read off the
/// two-row diagram position by position.
///
/// First row, `2n - 1` terms: `H_0(1) <- H_1 -> H_0(2) <- ... -> H_0(n)`,
/// each interior `H_1` mapping by `psi` to its left and `psibar` to its
/// right neighbor. Second row: `H_1 <- H_inf -> H_1`, the left copy
/// closing the row with `psibar` into `H_0(1)` and the right copy with
/// `psi` into `H_0(n)`; `H_inf` maps by `phi` to the left copy and
/// `phibar` to the right copy.
pub fn build_zigzag(ks: &KnotSystem, n: usize) -> Result<ChainComplex, SurgeryError> {
    if n < 1 {
        return Err(SurgeryError::InvalidSlope {
            p: n,
            q: 1,
            reason: "zig-zag framing must be >= 1".into(),
        });
    }
    require_valid_homology_level(ks)?;
    let (a, b, c) = ks.dims();

    // Grade 1 layout: the second-row left H_1, the n - 1 interior first-row
    // copies, then the second-row right H_1.
    let mut one_labels = copies(ks.c_one().labels(), 1);
    one_labels.extend((1..n).flat_map(|t| {
        ks.c_one()
            .labels()
            .iter()
            .map(move |l| format!("{l}@row1.{t}"))
    }));
    one_labels.extend(ks.c_one().labels().iter().map(|l| format!("{l}@R")));
    let one_offset_left = 0;
    let one_offset_mid = |t: usize| t * b; // t = 1..n-1
    let one_offset_right = n * b;

    let mut labels: BTreeMap<Grade, Vec<String>> = BTreeMap::new();
    labels.insert(2, copies(ks.c_inf().labels(), 1));
    labels.insert(1, one_labels);
    labels.insert(
        0,
        (1..=n)
            .flat_map(|j| copies(ks.c_zero().labels(), j))
            .collect(),
    );
    let zero_offset = |j: usize| (j - 1) * c; // j = 1..n

    // d_2: phi into the left copy, phibar into the right copy.
    let mut d2 = BitMatrix::zeros((n + 1) * b, a);
    d2.paste(one_offset_left, 0, ks.phi());
    d2.paste(one_offset_right, 0, ks.phibar());

    // d_1 from the diagram arrows.
    let mut d1 = BitMatrix::zeros(n * c, (n + 1) * b);
    d1.paste(zero_offset(1), one_offset_left, ks.psibar());
    for t in 1..n {
        d1.paste(zero_offset(t), one_offset_mid(t), ks.psi());
        d1.paste(zero_offset(t + 1), one_offset_mid(t), ks.psibar());
    }
    d1.paste(zero_offset(n), one_offset_right, ks.psi());

    let complex = ChainComplex::new(
        GradedSpace::new(labels)?,
        BTreeMap::from([(2, d2), (1, d1)]),
    )?;
    complex.validate()?;
    Ok(complex)
}

pub fn zigzag_report(ks: &KnotSystem, n: usize) -> Result<HomologyReport, SurgeryError> {
    let started = Instant::now();
    let complex = build_zigzag(ks, n)?;
    graded_report(
        ks.name(),
        "zigzag",
        n,
        1,
        &complex,
        vec![NOTE_ZIGZAG_ORIENTATION.to_string()],
        started,
    )
}

/// Chain-level splice of two bordered systems:
/// `C = (L_1 (x) L_2) ⊕ (M_1 (x) M_2)` with
/// `D = d_C + Phibar + Psibar`. `D^2 = 0` is checked, not assumed.
pub fn build_splice(
    b1: &BorderedSystem,
    b2: &BorderedSystem,
) -> Result<UngradedComplex, SurgeryError> {
    let ll = b1.l().tensor(b2.l())?;
    let mm = b1.m().tensor(b2.m())?;
    let (nl, nm) = (ll.dim(), mm.dim());

    let mut labels = ll.labels().to_vec();
    labels.extend(mm.labels().iter().cloned());

    let phibar = b1.phi().kronecker(b2.phi());
    let psibar = &(&b1.psi1().kronecker(b2.psi2()) + &b1.psi2().kronecker(b2.psi1()))
        + &b1.psi3().kronecker(b2.psi3());

    let mut d = BitMatrix::zeros(nl + nm, nl + nm);
    d.paste(0, 0, ll.differential());
    d.paste(nl, nl, mm.differential());
    d.paste(0, nl, &phibar); // M block -> L block
    d.paste(nl, 0, &psibar); // L block -> M block

    let complex = UngradedComplex::new(labels, d)?;
    complex.validate().map_err(|e| match e {
        ChainError::NotAComplex { witness } => SurgeryError::SpliceNotAComplex { witness },
        other => SurgeryError::Chain(other),
    })?;
    Ok(complex)
}

/// Splice of a knot system with the `n`-framed solid-torus model; the
/// chain-level route to `n`-surgery.
pub fn splice_with_model(ks: &KnotSystem, n: usize) -> Result<UngradedComplex, SurgeryError> {
    let bordered = ks.bordered_system()?;
    let model = build_model(n)?;
    build_splice(&bordered, model.system())
}

pub fn splice_report(ks: &KnotSystem, n: usize) -> Result<HomologyReport, SurgeryError> {
    let started = Instant::now();
    let complex = splice_with_model(ks, n)?;
    let total = complex.homology_dim()?;
    Ok(HomologyReport {
        input: ks.name().to_string(),
        method: "splice".to_string(),
        p: n,
        q: 1,
        space_dims: BTreeMap::from([("ungraded".to_string(), complex.dim())]),
        homology_dims: BTreeMap::from([("ungraded".to_string(), total)]),
        total,
        ranks: vec![complex.differential().rank()],
        notes: Vec::new(),
        elapsed: started.elapsed(),
    })
}

/// Rational route vs. splice route for the same integer slope `n`.
/// Both totals are recorded together with the splice reduction trace;
/// nothing asserts they agree — the comparison exists to gather the
/// evidence.
#[derive(Clone, Debug, Serialize)]
pub struct MethodComparison {
    pub input: String,
    pub n: usize,
    pub rational_total: usize,
    pub splice_total: usize,
    /// `splice_total - rational_total`.
    pub difference: i64,
    pub agree: bool,
    pub rational: HomologyReport,
    pub splice: HomologyReport,
    /// Cancelled generator pairs from reducing the splice complex to its
    /// homology.
    pub splice_trace: Vec<(String, String)>,
}

pub fn compare_methods(ks: &KnotSystem, n: usize) -> Result<MethodComparison, SurgeryError> {
    let rational = rational_report(ks, SurgerySlope::new(n, 1)?)?;
    let splice = splice_report(ks, n)?;
    let complex = splice_with_model(ks, n)?;
    let (reduced, splice_trace) = complex.reduce();
    debug_assert_eq!(reduced.dim(), splice.total);
    Ok(MethodComparison {
        input: ks.name().to_string(),
        n,
        rational_total: rational.total,
        splice_total: splice.total,
        difference: splice.total as i64 - rational.total as i64,
        agree: rational.total == splice.total,
        rational,
        splice,
        splice_trace,
    })
}
