//! The knot-system data model: three homology spaces `H_inf`, `H_1`,
//! `H_0` with comparison maps `phi`, `phibar` (from `H_inf` to `H_1`)
//! and `psi`, `psibar` (from `H_1` to `H_0`), plus everything the
//! surgery builders demand of them — validation of the exactness, cone
//! and composite hypotheses, derivation of the bordered system
//! `(L, M, Psi_1, Psi_2, Psi_3, Phi)`, JSON (de)serialization, builtin
//! datasets, and seeded random generation of valid systems.
//!
//! The three spaces carry an optional square differential (absent means
//! zero); systems with zero differentials are *homology-level* and are
//! the admissible inputs for the rational and zig-zag builders.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{commutes, ungraded_cone, ChainError, UngradedComplex};
use crate::f2linalg::BitMatrix;

#[derive(Debug, Error)]
pub enum KnotSysError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },
    #[error("shape error in field `{field}`: {detail}")]
    Shape { field: String, detail: String },
    #[error("unknown builtin `{0}`; available: unknot-A, unknot-B")]
    UnknownBuiltin(String),
    #[error("infeasible dimensions ({a}, {b}, {c}): {violated}")]
    InfeasibleDims {
        a: usize,
        b: usize,
        c: usize,
        violated: String,
    },
    #[error("knot system fails validation: {0}")]
    ValidationFailed(String),
    #[error("bordered system invariant `{check}` fails: {detail}")]
    BorderedInvariant { check: String, detail: String },
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// The algebraic input package for every surgery computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnotSystem {
    name: String,
    c_inf: UngradedComplex,
    c_one: UngradedComplex,
    c_zero: UngradedComplex,
    /// `h_one x h_inf`
    phi: BitMatrix,
    phibar: BitMatrix,
    /// `h_zero x h_one`
    psi: BitMatrix,
    psibar: BitMatrix,
}

/// Outcome of one validation check; `detail` carries a witness when the
/// check fails.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// All validation verdicts for a knot system. Mathematical failures are
/// reported here, never raised as errors.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub input: String,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: Option<String>) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed,
            detail: if passed { None } else { detail },
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "validation of {}:", self.input)?;
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            write!(f, "  [{mark}] {}", c.name)?;
            if let Some(d) = &c.detail {
                write!(f, " — {d}")?;
            }
            writeln!(f)?;
        }
        write!(f, "overall: {}", if self.pass() { "pass" } else { "fail" })
    }
}

/// The gluing-theorem input `(L, M, Psi_1, Psi_2, Psi_3, Phi)`: two
/// complexes for the knot complement, three maps `L -> M`, one map
/// `M -> L`, satisfying `Psi_2 . Phi . Psi_1 = Psi_3` with all four
/// commuting with the differentials. Construction enforces all of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorderedSystem {
    l: UngradedComplex,
    m: UngradedComplex,
    psi1: BitMatrix,
    psi2: BitMatrix,
    psi3: BitMatrix,
    phi: BitMatrix,
}

impl BorderedSystem {
    pub fn new(
        l: UngradedComplex,
        m: UngradedComplex,
        psi1: BitMatrix,
        psi2: BitMatrix,
        psi3: BitMatrix,
        phi: BitMatrix,
    ) -> Result<Self, KnotSysError> {
        let fail = |check: &str, detail: String| KnotSysError::BorderedInvariant {
            check: check.to_string(),
            detail,
        };
        l.validate()
            .map_err(|e| fail("L is a complex", e.to_string()))?;
        m.validate()
            .map_err(|e| fail("M is a complex", e.to_string()))?;
        for (name, map, rows, cols) in [
            ("Psi1", &psi1, m.dim(), l.dim()),
            ("Psi2", &psi2, m.dim(), l.dim()),
            ("Psi3", &psi3, m.dim(), l.dim()),
            ("Phi", &phi, l.dim(), m.dim()),
        ] {
            if map.rows() != rows || map.cols() != cols {
                return Err(fail(
                    name,
                    format!("is {}x{}, expected {rows}x{cols}", map.rows(), map.cols()),
                ));
            }
        }
        for (name, map, src, tgt) in [
            ("Psi1 is a chain map", &psi1, &l, &m),
            ("Psi2 is a chain map", &psi2, &l, &m),
            ("Psi3 is a chain map", &psi3, &l, &m),
            ("Phi is a chain map", &phi, &m, &l),
        ] {
            if !commutes(map, src, tgt) {
                return Err(fail(name, "does not commute with the differentials".into()));
            }
        }
        let composite = &(&psi2 * &phi) * &psi1;
        if composite != psi3 {
            return Err(fail(
                "Psi2 . Phi . Psi1 = Psi3",
                format!("composite differs from Psi3:\n{composite}\nvs\n{psi3}"),
            ));
        }
        Ok(Self {
            l,
            m,
            psi1,
            psi2,
            psi3,
            phi,
        })
    }

    pub fn l(&self) -> &UngradedComplex {
        &self.l
    }

    pub fn m(&self) -> &UngradedComplex {
        &self.m
    }

    pub fn psi1(&self) -> &BitMatrix {
        &self.psi1
    }

    pub fn psi2(&self) -> &BitMatrix {
        &self.psi2
    }

    pub fn psi3(&self) -> &BitMatrix {
        &self.psi3
    }

    pub fn phi(&self) -> &BitMatrix {
        &self.phi
    }
}

fn gen_labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

impl KnotSystem {
    /// Shape-checks the package; generator labels are derived from the
    /// space names (`inf0`, `one0`, `zero0`, ...).
    pub fn new(
        name: impl Into<String>,
        dims: (usize, usize, usize),
        maps: Maps,
        differentials: Differentials,
    ) -> Result<Self, KnotSysError> {
        let (a, b, c) = dims;
        let shape = |field: &str, m: &BitMatrix, rows: usize, cols: usize| {
            if m.rows() != rows || m.cols() != cols {
                Err(KnotSysError::Shape {
                    field: field.to_string(),
                    detail: format!("is {}x{}, expected {rows}x{cols}", m.rows(), m.cols()),
                })
            } else {
                Ok(())
            }
        };
        shape("maps.phi", &maps.phi, b, a)?;
        shape("maps.phibar", &maps.phibar, b, a)?;
        shape("maps.psi", &maps.psi, c, b)?;
        shape("maps.psibar", &maps.psibar, c, b)?;
        let d_inf = differentials.inf.unwrap_or_else(|| BitMatrix::zeros(a, a));
        let d_one = differentials.one.unwrap_or_else(|| BitMatrix::zeros(b, b));
        let d_zero = differentials.zero.unwrap_or_else(|| BitMatrix::zeros(c, c));
        shape("differentials.h_inf", &d_inf, a, a)?;
        shape("differentials.h_one", &d_one, b, b)?;
        shape("differentials.h_zero", &d_zero, c, c)?;
        Ok(Self {
            name: name.into(),
            c_inf: UngradedComplex::new(gen_labels("inf", a), d_inf)?,
            c_one: UngradedComplex::new(gen_labels("one", b), d_one)?,
            c_zero: UngradedComplex::new(gen_labels("zero", c), d_zero)?,
            phi: maps.phi,
            phibar: maps.phibar,
            psi: maps.psi,
            psibar: maps.psibar,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.c_inf.dim(), self.c_one.dim(), self.c_zero.dim())
    }

    pub fn c_inf(&self) -> &UngradedComplex {
        &self.c_inf
    }

    pub fn c_one(&self) -> &UngradedComplex {
        &self.c_one
    }

    pub fn c_zero(&self) -> &UngradedComplex {
        &self.c_zero
    }

    pub fn phi(&self) -> &BitMatrix {
        &self.phi
    }

    pub fn phibar(&self) -> &BitMatrix {
        &self.phibar
    }

    pub fn psi(&self) -> &BitMatrix {
        &self.psi
    }

    pub fn psibar(&self) -> &BitMatrix {
        &self.psibar
    }

    /// True when all three spaces carry the zero differential.
    pub fn is_homology_level(&self) -> bool {
        self.c_inf.differential().is_zero()
            && self.c_one.differential().is_zero()
            && self.c_zero.differential().is_zero()
    }

    /// Runs every hypothesis check and reports the verdicts.
    ///
    /// Always checked: the four maps commute with the differentials,
    /// `psibar . phi = 0`, `psi . phibar = 0`, and the four cone
    /// conditions (total homology of `cone(phi)` and `cone(phibar)`
    /// equals `dim H_0`, of `cone(psi)` and `cone(psibar)` equals
    /// `dim H_inf`, homology taken of the space's own complex).
    /// Exactness (`im phi = ker psibar`, `im phibar = ker psi`) is an
    /// equality of column spaces and is only meaningful — and only
    /// checked — at homology level.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport {
            input: self.name.clone(),
            checks: Vec::new(),
        };

        if !self.is_homology_level() {
            for (name, space) in [
                ("H_inf differential squares to zero", &self.c_inf),
                ("H_1 differential squares to zero", &self.c_one),
                ("H_0 differential squares to zero", &self.c_zero),
            ] {
                let verdict = space.validate();
                report.push(name, verdict.is_ok(), verdict.err().map(|e| e.to_string()));
            }
        }

        for (name, map, src, tgt) in [
            ("phi is a chain map", &self.phi, &self.c_inf, &self.c_one),
            (
                "phibar is a chain map",
                &self.phibar,
                &self.c_inf,
                &self.c_one,
            ),
            ("psi is a chain map", &self.psi, &self.c_one, &self.c_zero),
            (
                "psibar is a chain map",
                &self.psibar,
                &self.c_one,
                &self.c_zero,
            ),
        ] {
            report.push(
                name,
                commutes(map, src, tgt),
                Some("does not commute".into()),
            );
        }

        for (name, outer, inner) in [
            ("psibar . phi = 0", &self.psibar, &self.phi),
            ("psi . phibar = 0", &self.psi, &self.phibar),
        ] {
            let comp = outer * inner;
            report.push(name, comp.is_zero(), Some(format!("composite is\n{comp}")));
        }

        if self.is_homology_level() {
            for (name, incoming, outgoing) in [
                ("exactness: im phi = ker psibar", &self.phi, &self.psibar),
                ("exactness: im phibar = ker psi", &self.phibar, &self.psi),
            ] {
                let ker = outgoing.kernel_basis();
                let ok = incoming.column_space_equal(&ker);
                report.push(
                    name,
                    ok,
                    Some(format!(
                        "image has rank {}, kernel has dimension {}",
                        incoming.rank(),
                        ker.cols()
                    )),
                );
            }
        }

        let h_inf = self.c_inf.homology_dim();
        let h_zero = self.c_zero.homology_dim();
        for (name, map, src, tgt, want) in [
            (
                "cone(phi) has homology dim H_0",
                &self.phi,
                &self.c_inf,
                &self.c_one,
                &h_zero,
            ),
            (
                "cone(phibar) has homology dim H_0",
                &self.phibar,
                &self.c_inf,
                &self.c_one,
                &h_zero,
            ),
            (
                "cone(psi) has homology dim H_inf",
                &self.psi,
                &self.c_one,
                &self.c_zero,
                &h_inf,
            ),
            (
                "cone(psibar) has homology dim H_inf",
                &self.psibar,
                &self.c_one,
                &self.c_zero,
                &h_inf,
            ),
        ] {
            let verdict = match (want, ungraded_cone(map, src, tgt).map(|c| c.homology_dim())) {
                (Ok(want), Ok(Ok(got))) => (
                    got == *want,
                    format!("cone homology {got}, expected {want}"),
                ),
                (_, Err(e)) | (_, Ok(Err(e))) => (false, e.to_string()),
                (Err(e), _) => (false, e.to_string()),
            };
            report.push(name, verdict.0, Some(verdict.1));
        }

        report
    }

    /// Realizes the bordered system of a validated knot system:
    /// `L = cone(phi)`, `M = cone(psi)`, `Phi` the identity of the `C_1`
    /// block, `Psi_1 = phibar`, `Psi_2 = psibar` on the matching blocks,
    /// and `Psi_3` their composite.
    pub fn bordered_system(&self) -> Result<BorderedSystem, KnotSysError> {
        let report = self.validate();
        if !report.pass() {
            let failed: Vec<String> = report.failed().map(|c| c.name.clone()).collect();
            return Err(KnotSysError::ValidationFailed(failed.join("; ")));
        }
        let (a, b, _c) = self.dims();
        // L = cone(phi): C_inf block at 0..a, C_1 block at a..a+b.
        let l = ungraded_cone(&self.phi, &self.c_inf, &self.c_one)?;
        // M = cone(psi): C_1 block at 0..b, C_0 block at b..b+c.
        let m = ungraded_cone(&self.psi, &self.c_one, &self.c_zero)?;

        // Phi: identity from M's C_1 block onto L's C_1 block.
        let mut phi = BitMatrix::zeros(l.dim(), m.dim());
        phi.paste(a, 0, &BitMatrix::identity(b));
        // Psi_1: phibar from L's C_inf block into M's C_1 block.
        let mut psi1 = BitMatrix::zeros(m.dim(), l.dim());
        psi1.paste(0, 0, &self.phibar);
        // Psi_2: psibar from L's C_1 block into M's C_0 block.
        let mut psi2 = BitMatrix::zeros(m.dim(), l.dim());
        psi2.paste(b, a, &self.psibar);
        let psi3 = &(&psi2 * &phi) * &psi1;

        BorderedSystem::new(l, m, psi1, psi2, psi3, phi)
    }

    /// Structural serialization to the knot-system JSON schema.
    pub fn to_json_string(&self) -> String {
        let file = KnotSystemFile::from(self);
        serde_json::to_string_pretty(&file).expect("serialization of plain data cannot fail") + "\n"
    }

    pub fn from_json_str(text: &str, origin: &str) -> Result<Self, KnotSysError> {
        let file: KnotSystemFile = serde_json::from_str(text).map_err(|e| KnotSysError::Parse {
            path: origin.to_string(),
            detail: e.to_string(),
        })?;
        file.into_system()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), KnotSysError> {
        let path = path.as_ref();
        fs::write(path, self.to_json_string()).map_err(|e| KnotSysError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, KnotSysError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| KnotSysError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_json_str(&text, &path.display().to_string())
    }
}

/// The four comparison maps, in file order.
#[derive(Clone, Debug)]
pub struct Maps {
    pub phi: BitMatrix,
    pub phibar: BitMatrix,
    pub psi: BitMatrix,
    pub psibar: BitMatrix,
}

/// Optional space differentials; `None` means zero.
#[derive(Clone, Debug, Default)]
pub struct Differentials {
    pub inf: Option<BitMatrix>,
    pub one: Option<BitMatrix>,
    pub zero: Option<BitMatrix>,
}

// ---------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct KnotSystemFile {
    name: String,
    spaces: SpacesFile,
    maps: MapsFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    differentials: Option<DifferentialsFile>,
}

#[derive(Serialize, Deserialize)]
struct SpacesFile {
    h_inf: usize,
    h_one: usize,
    h_zero: usize,
}

#[derive(Serialize, Deserialize)]
struct MapsFile {
    phi: Vec<Vec<u8>>,
    phibar: Vec<Vec<u8>>,
    psi: Vec<Vec<u8>>,
    psibar: Vec<Vec<u8>>,
}

#[derive(Serialize, Deserialize)]
struct DifferentialsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h_inf: Option<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h_one: Option<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h_zero: Option<Vec<Vec<u8>>>,
}

/// Checks a dense 0/1 row list against the expected shape and packs it.
/// Entry `[i][j]` is the coefficient of target generator `i` in the
/// image of source generator `j`.
fn matrix_from_file(
    field: &str,
    rows: &[Vec<u8>],
    want_rows: usize,
    want_cols: usize,
) -> Result<BitMatrix, KnotSysError> {
    if rows.len() != want_rows {
        return Err(KnotSysError::Shape {
            field: field.to_string(),
            detail: format!("has {} rows, expected {want_rows}", rows.len()),
        });
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != want_cols {
            return Err(KnotSysError::Shape {
                field: field.to_string(),
                detail: format!("row {i} has length {}, expected {want_cols}", row.len()),
            });
        }
        if let Some(j) = row.iter().position(|&e| e > 1) {
            return Err(KnotSysError::Shape {
                field: field.to_string(),
                detail: format!("entry ({i}, {j}) is {}, expected 0 or 1", row[j]),
            });
        }
    }
    Ok(BitMatrix::from_rows(rows, want_cols))
}

impl KnotSystemFile {
    fn into_system(self) -> Result<KnotSystem, KnotSysError> {
        let (a, b, c) = (self.spaces.h_inf, self.spaces.h_one, self.spaces.h_zero);
        let maps = Maps {
            phi: matrix_from_file("maps.phi", &self.maps.phi, b, a)?,
            phibar: matrix_from_file("maps.phibar", &self.maps.phibar, b, a)?,
            psi: matrix_from_file("maps.psi", &self.maps.psi, c, b)?,
            psibar: matrix_from_file("maps.psibar", &self.maps.psibar, c, b)?,
        };
        let d = self.differentials.unwrap_or(DifferentialsFile {
            h_inf: None,
            h_one: None,
            h_zero: None,
        });
        let unpack = |field: &str, m: &Option<Vec<Vec<u8>>>, n: usize| {
            m.as_ref()
                .map(|rows| matrix_from_file(field, rows, n, n))
                .transpose()
        };
        let differentials = Differentials {
            inf: unpack("differentials.h_inf", &d.h_inf, a)?,
            one: unpack("differentials.h_one", &d.h_one, b)?,
            zero: unpack("differentials.h_zero", &d.h_zero, c)?,
        };
        KnotSystem::new(self.name, (a, b, c), maps, differentials)
    }
}

impl From<&KnotSystem> for KnotSystemFile {
    fn from(ks: &KnotSystem) -> Self {
        let (a, b, c) = ks.dims();
        let diff = |m: &BitMatrix| (!m.is_zero()).then(|| m.to_rows());
        let differentials = DifferentialsFile {
            h_inf: diff(ks.c_inf.differential()),
            h_one: diff(ks.c_one.differential()),
            h_zero: diff(ks.c_zero.differential()),
        };
        let any_diff = differentials.h_inf.is_some()
            || differentials.h_one.is_some()
            || differentials.h_zero.is_some();
        Self {
            name: ks.name.clone(),
            spaces: SpacesFile {
                h_inf: a,
                h_one: b,
                h_zero: c,
            },
            maps: MapsFile {
                phi: ks.phi.to_rows(),
                phibar: ks.phibar.to_rows(),
                psi: ks.psi.to_rows(),
                psibar: ks.psibar.to_rows(),
            },
            differentials: any_diff.then_some(differentials),
        }
    }
}

// ---------------------------------------------------------------------
// Builtins and random generation
// ---------------------------------------------------------------------

pub fn builtin_names() -> Vec<&'static str> {
    vec!["unknot-A", "unknot-B"]
}

/// Builtin candidate datasets for the trivial knot. Both satisfy every
/// hypothesis; no worked example pins down which one is the true package
/// for the unknot, so both ship and the comparison tooling gathers
/// evidence.
pub fn builtin(name: &str) -> Result<KnotSystem, KnotSysError> {
    match name {
        // dims (1,1,0); phi = phibar = [1]; psi = psibar empty.
        "unknot-A" => KnotSystem::new(
            "unknot-A",
            (1, 1, 0),
            Maps {
                phi: BitMatrix::identity(1),
                phibar: BitMatrix::identity(1),
                psi: BitMatrix::zeros(0, 1),
                psibar: BitMatrix::zeros(0, 1),
            },
            Differentials::default(),
        ),
        // dims (1,1,2); phi = phibar = 0; psi = (1,0)^T, psibar = (0,1)^T.
        "unknot-B" => KnotSystem::new(
            "unknot-B",
            (1, 1, 2),
            Maps {
                phi: BitMatrix::zeros(1, 1),
                phibar: BitMatrix::zeros(1, 1),
                psi: BitMatrix::from_rows(&[vec![1], vec![0]], 1),
                psibar: BitMatrix::from_rows(&[vec![0], vec![1]], 1),
            },
            Differentials::default(),
        ),
        other => Err(KnotSysError::UnknownBuiltin(other.to_string())),
    }
}

/// Resolves `@name` to a builtin and anything else to a file path.
pub fn resolve(input: &str) -> Result<KnotSystem, KnotSysError> {
    match input.strip_prefix('@') {
        Some(name) => builtin(name),
        None => KnotSystem::load(input),
    }
}

/// Feasibility of `(a, b, c) = (dim H_inf, dim H_1, dim H_0)` for a
/// homology-level system: exactness plus the cone conditions force
/// `rank phi = rank phibar = r = (a + b - c) / 2` and
/// `rank psi = rank psibar = b - r`.
fn feasibility(a: usize, b: usize, c: usize) -> Result<usize, KnotSysError> {
    let infeasible = |violated: &str| KnotSysError::InfeasibleDims {
        a,
        b,
        c,
        violated: violated.to_string(),
    };
    if !(a + b).abs_diff(c).is_multiple_of(2) {
        return Err(infeasible("a + b - c must be even"));
    }
    if a + b < c {
        return Err(infeasible("rank phi = (a + b - c)/2 must be >= 0"));
    }
    let r = (a + b - c) / 2;
    if r > a.min(b) {
        return Err(infeasible("rank phi = (a + b - c)/2 must be <= min(a, b)"));
    }
    if b - r > c {
        return Err(infeasible("rank psibar = b - (a + b - c)/2 must be <= c"));
    }
    Ok(r)
}

/// Seeded random homology-level knot system with the given dimensions;
/// the output always passes [`KnotSystem::validate`].
///
/// Each exact pair is a fixed normal form conjugated by fresh random
/// invertible matrices: the two pairs `(phi, psibar)` and `(phibar, psi)`
/// are generated independently, sharing only the forced ranks.
pub fn random_valid(seed: u64, dims: (usize, usize, usize)) -> Result<KnotSystem, KnotSysError> {
    let (a, b, c) = dims;
    let r = feasibility(a, b, c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Normal forms: incl includes the first r coordinates of H_1;
    // proj kills exactly that image.
    let mut incl = BitMatrix::zeros(b, a);
    incl.paste(0, 0, &BitMatrix::identity(r));
    let mut proj = BitMatrix::zeros(c, b);
    proj.paste(0, r, &BitMatrix::identity(b - r));

    let pair = |rng: &mut ChaCha8Rng| {
        let u_a = BitMatrix::random_invertible(a, rng);
        let u_b = BitMatrix::random_invertible(b, rng);
        let u_c = BitMatrix::random_invertible(c, rng);
        let u_b_inv = u_b.inverse().expect("invertible");
        let first = &(&u_b * &incl) * &u_a;
        let second = &(&u_c * &proj) * &u_b_inv;
        (first, second)
    };
    let (phi, psibar) = pair(&mut rng);
    let (phibar, psi) = pair(&mut rng);

    KnotSystem::new(
        format!("random-{seed}-{a}x{b}x{c}"),
        dims,
        Maps {
            phi,
            phibar,
            psi,
            psibar,
        },
        Differentials::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_pass_validation() {
        for name in builtin_names() {
            let ks = builtin(name).unwrap();
            let report = ks.validate();
            assert!(report.pass(), "{name} failed:\n{report}");
        }
    }

    #[test]
    fn constructed_exactness_violation_fails() {
        // dims (1,1,2), phi = 0 and psibar = 0: ker psibar is all of H_1
        // but im phi is 0.
        let ks = KnotSystem::new(
            "broken",
            (1, 1, 2),
            Maps {
                phi: BitMatrix::zeros(1, 1),
                phibar: BitMatrix::zeros(1, 1),
                psi: BitMatrix::from_rows(&[vec![1], vec![0]], 1),
                psibar: BitMatrix::zeros(2, 1),
            },
            Differentials::default(),
        )
        .unwrap();
        let report = ks.validate();
        assert!(!report.pass());
        assert!(report
            .failed()
            .any(|c| c.name.contains("im phi = ker psibar")));
    }

    #[test]
    fn bordered_unknot_a() {
        let ks = builtin("unknot-A").unwrap();
        let b = ks.bordered_system().unwrap();
        assert_eq!(b.l().dim(), 2);
        assert_eq!(b.l().differential().rank(), 1);
        // M = cone(psi) with dim H_0 = 0, so only the C_1 block remains;
        // its homology is 1 = dim H_inf as the cone condition demands.
        assert_eq!(b.m().dim(), 1);
        assert_eq!(b.m().homology_dim().unwrap(), 1);
        assert!(
            b.psi3().is_zero(),
            "Psi3 = psibar . phibar = 0 since psibar = 0"
        );
    }

    #[test]
    fn bordered_unknot_b() {
        let ks = builtin("unknot-B").unwrap();
        let b = ks.bordered_system().unwrap();
        assert_eq!(b.l().dim(), 2);
        assert!(b.l().differential().is_zero());
        assert_eq!(b.m().dim(), 3);
        assert_eq!(b.m().differential().rank(), 1);
    }

    #[test]
    fn bordered_psi1_vanishes_with_phibar() {
        // Any system with phibar = 0 gives Psi1 = 0, hence Psi3 = 0.
        let ks = builtin("unknot-B").unwrap();
        assert!(ks.phibar().is_zero());
        let b = ks.bordered_system().unwrap();
        assert!(b.psi1().is_zero());
        assert!(b.psi3().is_zero());
    }

    #[test]
    fn cone_of_unknot_b_phi_keeps_both_generators() {
        // phi = 0 on dims 1 -> 1, so nothing cancels: total homology
        // 2 = dim H_0.
        let ks = builtin("unknot-B").unwrap();
        let cone = ungraded_cone(ks.phi(), ks.c_inf(), ks.c_one()).unwrap();
        assert_eq!(cone.homology_dim().unwrap(), 2);
    }

    #[test]
    fn cone_homology_two_routes_agree() {
        // For zero-differential systems the cone homology must equal
        // dim H_inf + dim H_1 - 2 rank phi.
        for seed in 0..10u64 {
            for dims in [(2, 3, 3), (3, 3, 2), (4, 4, 4)] {
                let ks = random_valid(seed, dims).unwrap();
                let cone = ungraded_cone(ks.phi(), ks.c_inf(), ks.c_one()).unwrap();
                let (a, b, _) = ks.dims();
                assert_eq!(
                    cone.homology_dim().unwrap(),
                    a + b - 2 * ks.phi().rank(),
                    "seed {seed} dims {dims:?}"
                );
            }
        }
    }

    #[test]
    fn json_round_trip() {
        for name in builtin_names() {
            let ks = builtin(name).unwrap();
            let text = ks.to_json_string();
            let back = KnotSystem::from_json_str(&text, "mem").unwrap();
            assert_eq!(ks, back);
        }
    }

    #[test]
    fn chain_level_round_trip() {
        let d_one = BitMatrix::from_rows(&[vec![0, 0], vec![1, 0]], 2);
        let ks = KnotSystem::new(
            "chain-level",
            (0, 2, 0),
            Maps {
                phi: BitMatrix::zeros(2, 0),
                phibar: BitMatrix::zeros(2, 0),
                psi: BitMatrix::zeros(0, 2),
                psibar: BitMatrix::zeros(0, 2),
            },
            Differentials {
                inf: None,
                one: Some(d_one),
                zero: None,
            },
        )
        .unwrap();
        assert!(!ks.is_homology_level());
        let back = KnotSystem::from_json_str(&ks.to_json_string(), "mem").unwrap();
        assert_eq!(ks, back);
    }

    #[test]
    fn wrong_row_length_is_a_shape_error() {
        let text = r#"{
            "name": "bad",
            "spaces": {"h_inf": 1, "h_one": 1, "h_zero": 2},
            "maps": {"phi": [[0]], "phibar": [[0]], "psi": [[1], [0]], "psibar": [[0, 1]]}
        }"#;
        let err = KnotSystem::from_json_str(text, "mem").unwrap_err();
        assert!(matches!(err, KnotSysError::Shape { ref field, .. } if field == "maps.psibar"));
    }

    #[test]
    fn wrong_map_shape_is_reported() {
        let text = r#"{
            "name": "bad",
            "spaces": {"h_inf": 2, "h_one": 1, "h_zero": 0},
            "maps": {"phi": [[1]], "phibar": [[0, 0]], "psi": [], "psibar": []}
        }"#;
        let err = KnotSystem::from_json_str(text, "mem").unwrap_err();
        assert!(matches!(err, KnotSysError::Shape { ref field, .. } if field == "maps.phi"));
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let err = KnotSystem::from_json_str("{not json", "mem").unwrap_err();
        assert!(matches!(err, KnotSysError::Parse { .. }));
    }

    #[test]
    fn random_forced_cases() {
        // dims (1,1,0): r = 1, phi must be an isomorphism, psibar = 0.
        let ks = random_valid(99, (1, 1, 0)).unwrap();
        assert_eq!(ks.phi().rank(), 1);
        assert_eq!(ks.psibar().rows(), 0);
        // dims (1,1,2): r = 0 forces phi = 0 and psibar injective.
        let ks = random_valid(7, (1, 1, 2)).unwrap();
        assert!(ks.phi().is_zero());
        assert_eq!(ks.psibar().rank(), 1);
    }

    #[test]
    fn random_valid_passes_validation() {
        let mut checked = 0;
        for seed in 0..20u64 {
            for dims in [
                (1, 1, 0),
                (1, 1, 2),
                (2, 3, 3),
                (3, 3, 2),
                (0, 2, 2),
                (4, 4, 4),
            ] {
                let ks = random_valid(seed, dims).unwrap();
                assert!(ks.validate().pass(), "seed {seed} dims {dims:?}");
                checked += 1;
            }
        }
        assert!(checked >= 100);
    }

    #[test]
    fn infeasible_dims_name_the_violated_inequality() {
        let err = random_valid(1, (1, 1, 1)).unwrap_err();
        assert!(err.to_string().contains("even"));
        let err = random_valid(1, (0, 0, 4)).unwrap_err();
        assert!(err.to_string().contains(">= 0"));
        let err = random_valid(1, (4, 1, 1)).unwrap_err();
        assert!(err.to_string().contains("min(a, b)"));
        // `b - r <= c` is implied by `r <= min(a, b)` for nonnegative
        // dims (b > a + c forces r > a), so it cannot be the first
        // violation; it stays in the code as a guard only.
    }

    #[test]
    fn unknown_builtin() {
        assert!(matches!(
            builtin("nope"),
            Err(KnotSysError::UnknownBuiltin(_))
        ));
    }
}
