//! Finite chain complexes over GF(2) and the operations the surgery
//! builders are made of: chain maps, mapping cones, direct sums, tensor
//! products, elementary cancellation, and homology dimensions.
//!
//! Two kinds of complex coexist. A [`ChainComplex`] is integer-graded
//! with differentials dropping the grade by one. An [`UngradedComplex`]
//! is a single space with a square differential `D`, `D^2 = 0`; splice
//! differentials mix summands and preserve no integer grading, so they
//! live here. Generators are addressed by unique string labels so that
//! cancellation traces stay readable.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::f2linalg::BitMatrix;

/// Homological grade.
pub type Grade = i32;

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("duplicate generator label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("d^2 != 0: {witness}")]
    NotAComplex { witness: String },
    #[error("not a chain map: {0}")]
    NotAChainMap(String),
    #[error("cannot cancel ({x}, {y}): the differential entry from {x} to {y} is not 1")]
    IllegalCancellation { x: String, y: String },
}

/// Graded vector space over GF(2) with labelled basis elements.
///
/// A grade may be present with dimension zero; builders use this to
/// report empty tiers explicitly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    grades: BTreeMap<Grade, Vec<String>>,
}

impl GradedSpace {
    pub fn new(labels: BTreeMap<Grade, Vec<String>>) -> Result<Self, ChainError> {
        let mut seen = BTreeSet::new();
        for l in labels.values().flatten() {
            if !seen.insert(l.clone()) {
                return Err(ChainError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { grades: labels })
    }

    /// Space concentrated in a single grade.
    pub fn concentrated(grade: Grade, labels: Vec<String>) -> Result<Self, ChainError> {
        Self::new(BTreeMap::from([(grade, labels)]))
    }

    pub fn dim(&self, grade: Grade) -> usize {
        self.grades.get(&grade).map_or(0, Vec::len)
    }

    pub fn labels(&self, grade: Grade) -> &[String] {
        self.grades.get(&grade).map_or(&[], Vec::as_slice)
    }

    pub fn total_dim(&self) -> usize {
        self.grades.values().map(Vec::len).sum()
    }

    /// Grades the space was built with, ascending (may have dimension 0).
    pub fn grades(&self) -> impl Iterator<Item = Grade> + '_ {
        self.grades.keys().copied()
    }

    pub fn dims(&self) -> BTreeMap<Grade, usize> {
        self.grades.iter().map(|(&g, l)| (g, l.len())).collect()
    }

    /// Locates a generator by label.
    pub fn find(&self, label: &str) -> Option<(Grade, usize)> {
        for (&g, ls) in &self.grades {
            if let Some(i) = ls.iter().position(|l| l == label) {
                return Some((g, i));
            }
        }
        None
    }
}

/// A finite chain complex: graded space plus differentials `d_k`
/// mapping grade `k` to grade `k - 1`. Absent differentials are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    spaces: GradedSpace,
    diffs: BTreeMap<Grade, BitMatrix>,
}

impl ChainComplex {
    /// Shape-checks the differentials (`d_k` must be `dim(k-1) x dim(k)`)
    /// and normalizes away zero blocks. `d^2 = 0` is *not* assumed here;
    /// see [`ChainComplex::validate`].
    pub fn new(spaces: GradedSpace, diffs: BTreeMap<Grade, BitMatrix>) -> Result<Self, ChainError> {
        for (&g, d) in &diffs {
            let (want_r, want_c) = (spaces.dim(g - 1), spaces.dim(g));
            if d.rows() != want_r || d.cols() != want_c {
                return Err(ChainError::ShapeMismatch(format!(
                    "differential at grade {g} is {}x{}, expected {want_r}x{want_c}",
                    d.rows(),
                    d.cols()
                )));
            }
        }
        let diffs = diffs.into_iter().filter(|(_, d)| !d.is_zero()).collect();
        Ok(Self { spaces, diffs })
    }

    pub fn with_zero_differential(spaces: GradedSpace) -> Self {
        Self {
            spaces,
            diffs: BTreeMap::new(),
        }
    }

    /// Complex concentrated in one grade with zero differential.
    pub fn concentrated(grade: Grade, labels: Vec<String>) -> Result<Self, ChainError> {
        Ok(Self::with_zero_differential(GradedSpace::concentrated(
            grade, labels,
        )?))
    }

    pub fn spaces(&self) -> &GradedSpace {
        &self.spaces
    }

    pub fn dim(&self, grade: Grade) -> usize {
        self.spaces.dim(grade)
    }

    pub fn dims(&self) -> BTreeMap<Grade, usize> {
        self.spaces.dims()
    }

    pub fn total_dim(&self) -> usize {
        self.spaces.total_dim()
    }

    /// The differential leaving grade `k`, materialized as a matrix.
    pub fn differential(&self, grade: Grade) -> BitMatrix {
        self.diffs
            .get(&grade)
            .cloned()
            .unwrap_or_else(|| BitMatrix::zeros(self.dim(grade - 1), self.dim(grade)))
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Checks `d_{k-1} . d_k = 0` for every grade; on failure names a
    /// generator whose square differential is nonzero.
    pub fn validate(&self) -> Result<(), ChainError> {
        for (&g, d) in &self.diffs {
            let dd = &self.differential(g - 1) * d;
            if !dd.is_zero() {
                let j = (0..dd.cols())
                    .find(|&j| (0..dd.rows()).any(|i| dd.get(i, j)))
                    .expect("nonzero matrix has a nonzero column");
                return Err(ChainError::NotAComplex {
                    witness: format!("d^2({}) != 0 (grade {g})", self.spaces.labels(g)[j]),
                });
            }
        }
        Ok(())
    }

    /// Per-grade homology dimensions: `dim ker d_k - rank d_{k+1}`.
    pub fn homology_dims(&self) -> Result<BTreeMap<Grade, usize>, ChainError> {
        self.validate()?;
        let mut out = BTreeMap::new();
        for g in self.spaces.grades() {
            let cycles = self.dim(g) - self.differential(g).rank();
            out.insert(g, cycles - self.differential(g + 1).rank());
        }
        Ok(out)
    }

    pub fn total_homology(&self) -> Result<usize, ChainError> {
        Ok(self.homology_dims()?.values().sum())
    }

    /// Alternating sum of space dimensions; equals the alternating sum
    /// of homology dimensions for any valid complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.spaces
            .grades()
            .map(|g| {
                let d = self.dim(g) as i64;
                if g.rem_euclid(2) == 0 {
                    d
                } else {
                    -d
                }
            })
            .sum()
    }

    /// Applies a relabelling to every generator.
    pub fn relabeled(&self, f: impl Fn(&str) -> String) -> Result<Self, ChainError> {
        let labels = self
            .spaces
            .grades
            .iter()
            .map(|(&g, ls)| (g, ls.iter().map(|l| f(l)).collect()))
            .collect();
        Self::new(GradedSpace::new(labels)?, self.diffs.clone())
    }

    pub fn direct_sum(parts: &[&ChainComplex]) -> Result<ChainComplex, ChainError> {
        let grades: BTreeSet<Grade> = parts.iter().flat_map(|c| c.spaces.grades()).collect();
        let mut labels: BTreeMap<Grade, Vec<String>> = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for &g in &grades {
            labels.insert(
                g,
                parts
                    .iter()
                    .flat_map(|c| c.spaces.labels(g).iter().cloned())
                    .collect(),
            );
        }
        for &g in &grades {
            let rows: usize = parts.iter().map(|c| c.dim(g - 1)).sum();
            let cols: usize = parts.iter().map(|c| c.dim(g)).sum();
            let mut d = BitMatrix::zeros(rows, cols);
            let (mut r0, mut c0) = (0, 0);
            for c in parts {
                d.paste(r0, c0, &c.differential(g));
                r0 += c.dim(g - 1);
                c0 += c.dim(g);
            }
            diffs.insert(g, d);
        }
        Self::new(GradedSpace::new(labels)?, diffs)
    }

    /// Offsets of the `(g1, g2 = g - g1)` blocks inside grade `g` of the
    /// tensor product, in ascending `g1` order.
    fn tensor_blocks(a: &Self, b: &Self, g: Grade) -> Vec<(Grade, usize)> {
        let mut out = Vec::new();
        let mut offset = 0;
        for g1 in a.spaces.grades() {
            out.push((g1, offset));
            offset += a.dim(g1) * b.dim(g - g1);
        }
        out
    }

    /// Tensor product of complexes; the differential is `d (x) 1 + 1 (x) d`
    /// (no signs over GF(2)), and basis labels are pairs `x⊗y`.
    pub fn tensor(&self, other: &Self) -> Result<ChainComplex, ChainError> {
        let grades: BTreeSet<Grade> = self
            .spaces
            .grades()
            .flat_map(|g1| other.spaces.grades().map(move |g2| g1 + g2))
            .collect();
        let mut labels: BTreeMap<Grade, Vec<String>> = BTreeMap::new();
        for &g in &grades {
            let mut ls = Vec::new();
            for g1 in self.spaces.grades() {
                for la in self.spaces.labels(g1) {
                    for lb in other.spaces.labels(g - g1) {
                        ls.push(format!("{la}⊗{lb}"));
                    }
                }
            }
            labels.insert(g, ls);
        }
        let space = GradedSpace::new(labels)?;
        let mut diffs = BTreeMap::new();
        for &g in &grades {
            let rows = space.dim(g - 1);
            let cols = space.dim(g);
            let mut d = BitMatrix::zeros(rows, cols);
            let src_blocks = Self::tensor_blocks(self, other, g);
            let tgt_blocks: BTreeMap<Grade, usize> = Self::tensor_blocks(self, other, g - 1)
                .into_iter()
                .collect();
            for &(g1, c0) in &src_blocks {
                let g2 = g - g1;
                if self.dim(g1) == 0 || other.dim(g2) == 0 {
                    continue;
                }
                // d_a (x) 1 : block (g1, g2) -> (g1 - 1, g2)
                if let Some(&r0) = tgt_blocks.get(&(g1 - 1)) {
                    d.paste(
                        r0,
                        c0,
                        &self
                            .differential(g1)
                            .kronecker(&BitMatrix::identity(other.dim(g2))),
                    );
                }
                // 1 (x) d_b : block (g1, g2) -> (g1, g2 - 1)
                if let Some(&r0) = tgt_blocks.get(&g1) {
                    d.paste(
                        r0,
                        c0,
                        &BitMatrix::identity(self.dim(g1)).kronecker(&other.differential(g2)),
                    );
                }
            }
            diffs.insert(g, d);
        }
        Self::new(space, diffs)
    }

    /// Removes the generator pair `(x, y)` with `<d x, y> = 1` and applies
    /// the zig-zag correction `d'(a) = d(a) + <d a, y> d(x)`; homology is
    /// unchanged.
    pub fn cancel_pair(&self, x: &str, y: &str) -> Result<ChainComplex, ChainError> {
        let (gx, ix) = self
            .spaces
            .find(x)
            .ok_or_else(|| ChainError::UnknownGenerator(x.to_string()))?;
        let (gy, iy) = self
            .spaces
            .find(y)
            .ok_or_else(|| ChainError::UnknownGenerator(y.to_string()))?;
        let illegal = || ChainError::IllegalCancellation {
            x: x.to_string(),
            y: y.to_string(),
        };
        if gy != gx - 1 {
            return Err(illegal());
        }
        let dk = self.differential(gx);
        if !dk.get(iy, ix) {
            return Err(illegal());
        }

        let keep_rows: Vec<usize> = (0..dk.rows()).filter(|&i| i != iy).collect();
        let keep_cols: Vec<usize> = (0..dk.cols()).filter(|&j| j != ix).collect();
        let mut corrected = dk.clone();
        for i in 0..dk.rows() {
            if dk.get(i, ix) {
                for j in 0..dk.cols() {
                    if dk.get(iy, j) {
                        corrected.flip(i, j);
                    }
                }
            }
        }

        let mut labels = self.spaces.grades.clone();
        labels.get_mut(&gx).expect("grade of x exists").remove(ix);
        labels.get_mut(&gy).expect("grade of y exists").remove(iy);

        let mut diffs = self.diffs.clone();
        diffs.insert(gx, corrected.submatrix(&keep_rows, &keep_cols));
        let up = self.differential(gx + 1);
        diffs.insert(
            gx + 1,
            up.submatrix(&all_but(up.rows(), ix), &all(up.cols())),
        );
        let down = self.differential(gy);
        diffs.insert(
            gy,
            down.submatrix(&all(down.rows()), &all_but(down.cols(), iy)),
        );

        Self::new(GradedSpace::new(labels)?, diffs)
    }

    /// Cancels unit differential entries until none remain; over GF(2)
    /// the survivor dimensions are the homology dimensions. Pairs are
    /// chosen deterministically (lowest grade, then source index, then
    /// target index) and the cancelled `(x, y)` pairs are returned as a
    /// trace.
    pub fn reduce(&self) -> (ChainComplex, Vec<(String, String)>) {
        let mut c = self.clone();
        let mut trace = Vec::new();
        'outer: loop {
            let grades: Vec<Grade> = c.diffs.keys().copied().collect();
            for g in grades {
                let d = c.differential(g);
                for j in 0..d.cols() {
                    for i in 0..d.rows() {
                        if d.get(i, j) {
                            let x = c.spaces.labels(g)[j].clone();
                            let y = c.spaces.labels(g - 1)[i].clone();
                            c = c.cancel_pair(&x, &y).expect("unit entry was just located");
                            trace.push((x, y));
                            continue 'outer;
                        }
                    }
                }
            }
            return (c, trace);
        }
    }

    /// True when every differential is the zero map.
    pub fn differentials_are_zero(&self) -> bool {
        self.diffs.is_empty()
    }

    /// Flattens the grading: one ungraded space over all generators (in
    /// grade order) with the block-diagonal differential.
    pub fn forget_grading(&self) -> UngradedComplex {
        let labels: Vec<String> = self
            .spaces
            .grades()
            .flat_map(|g| self.spaces.labels(g).iter().cloned())
            .collect();
        let offsets: BTreeMap<Grade, usize> = {
            let mut m = BTreeMap::new();
            let mut off = 0;
            for g in self.spaces.grades() {
                m.insert(g, off);
                off += self.dim(g);
            }
            m
        };
        let n = self.total_dim();
        let mut d = BitMatrix::zeros(n, n);
        for (&g, block) in &self.diffs {
            if let (Some(&r0), Some(&c0)) = (offsets.get(&(g - 1)), offsets.get(&g)) {
                d.paste(r0, c0, block);
            }
        }
        UngradedComplex { labels, d }
    }
}

fn all(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn all_but(n: usize, skip: usize) -> Vec<usize> {
    (0..n).filter(|&i| i != skip).collect()
}

/// A degree-homogeneous map of chain complexes. Blocks are indexed by
/// source grade: block `k` maps source grade `k` to target grade
/// `k + shift`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    shift: Grade,
    blocks: BTreeMap<Grade, BitMatrix>,
}

impl ChainMap {
    pub fn new(
        source: ChainComplex,
        target: ChainComplex,
        shift: Grade,
        blocks: BTreeMap<Grade, BitMatrix>,
    ) -> Result<Self, ChainError> {
        for (&g, b) in &blocks {
            let (want_r, want_c) = (target.dim(g + shift), source.dim(g));
            if b.rows() != want_r || b.cols() != want_c {
                return Err(ChainError::ShapeMismatch(format!(
                    "map block at grade {g} is {}x{}, expected {want_r}x{want_c}",
                    b.rows(),
                    b.cols()
                )));
            }
        }
        let blocks = blocks.into_iter().filter(|(_, b)| !b.is_zero()).collect();
        Ok(Self {
            source,
            target,
            shift,
            blocks,
        })
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let blocks = c
            .spaces()
            .grades()
            .map(|g| (g, BitMatrix::identity(c.dim(g))))
            .collect();
        Self::new(c.clone(), c.clone(), 0, blocks).expect("identity blocks are square")
    }

    pub fn zero(source: ChainComplex, target: ChainComplex, shift: Grade) -> Self {
        Self {
            source,
            target,
            shift,
            blocks: BTreeMap::new(),
        }
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn shift(&self) -> Grade {
        self.shift
    }

    pub fn block(&self, grade: Grade) -> BitMatrix {
        self.blocks.get(&grade).cloned().unwrap_or_else(|| {
            BitMatrix::zeros(self.target.dim(grade + self.shift), self.source.dim(grade))
        })
    }

    pub fn is_chain_map(&self) -> bool {
        self.validate().is_ok()
    }

    /// Checks `d_target . f = f . d_source` blockwise.
    pub fn validate(&self) -> Result<(), ChainError> {
        let grades: BTreeSet<Grade> = self
            .source
            .spaces()
            .grades()
            .chain(self.blocks.keys().copied())
            .collect();
        for &g in &grades {
            let lhs = &self.target.differential(g + self.shift) * &self.block(g);
            let rhs = &self.block(g - 1) * &self.source.differential(g);
            if lhs != rhs {
                return Err(ChainError::NotAChainMap(format!(
                    "fails to commute with differentials at source grade {g}"
                )));
            }
        }
        Ok(())
    }

    /// Mapping cone of a degree-zero chain map: the source sits shifted
    /// up one grade (labels wrapped in brackets) and the differential is
    /// `(a, b) -> (d a, f a + d b)`. Total homology measures the failure
    /// of `f` to be a quasi-isomorphism.
    pub fn mapping_cone(&self) -> Result<ChainComplex, ChainError> {
        if self.shift != 0 {
            return Err(ChainError::NotAChainMap(format!(
                "mapping cone expects a degree-0 map, got shift {}",
                self.shift
            )));
        }
        self.validate()?;
        let (a, b) = (&self.source, &self.target);
        let grades: BTreeSet<Grade> = a
            .spaces()
            .grades()
            .map(|g| g + 1)
            .chain(b.spaces().grades())
            .collect();
        let mut labels: BTreeMap<Grade, Vec<String>> = BTreeMap::new();
        for &g in &grades {
            let mut ls: Vec<String> = a
                .spaces()
                .labels(g - 1)
                .iter()
                .map(|l| format!("[{l}]"))
                .collect();
            ls.extend(b.spaces().labels(g).iter().cloned());
            labels.insert(g, ls);
        }
        let mut diffs = BTreeMap::new();
        for &g in &grades {
            let (sa, sb) = (a.dim(g - 1), b.dim(g));
            let (ta, tb) = (a.dim(g - 2), b.dim(g - 1));
            let mut d = BitMatrix::zeros(ta + tb, sa + sb);
            d.paste(0, 0, &a.differential(g - 1));
            d.paste(ta, 0, &self.block(g - 1));
            d.paste(ta, sa, &b.differential(g));
            diffs.insert(g, d);
        }
        ChainComplex::new(GradedSpace::new(labels)?, diffs)
    }

    /// Kronecker-product map between tensor-product complexes.
    pub fn tensor_map(&self, other: &ChainMap) -> Result<ChainMap, ChainError> {
        let source = self.source.tensor(&other.source)?;
        let target = self.target.tensor(&other.target)?;
        let shift = self.shift + other.shift;
        let mut blocks = BTreeMap::new();
        for g in source.spaces().grades() {
            let mut block = BitMatrix::zeros(target.dim(g + shift), source.dim(g));
            let src_blocks = ChainComplex::tensor_blocks(&self.source, &other.source, g);
            let tgt_blocks: BTreeMap<Grade, usize> =
                ChainComplex::tensor_blocks(&self.target, &other.target, g + shift)
                    .into_iter()
                    .collect();
            for &(g1, c0) in &src_blocks {
                let g2 = g - g1;
                if self.source.dim(g1) == 0 || other.source.dim(g2) == 0 {
                    continue;
                }
                if let Some(&r0) = tgt_blocks.get(&(g1 + self.shift)) {
                    block.paste(r0, c0, &self.block(g1).kronecker(&other.block(g2)));
                }
            }
            blocks.insert(g, block);
        }
        ChainMap::new(source, target, shift, blocks)
    }

    /// Entrywise (XOR) sum of maps with identical source, target and shift.
    pub fn sum(maps: &[&ChainMap]) -> Result<ChainMap, ChainError> {
        let first = maps.first().expect("sum of at least one map");
        for m in &maps[1..] {
            if m.source != first.source || m.target != first.target || m.shift != first.shift {
                return Err(ChainError::ShapeMismatch(
                    "map sum requires identical sources, targets and shifts".into(),
                ));
            }
        }
        let grades: BTreeSet<Grade> = maps.iter().flat_map(|m| m.blocks.keys().copied()).collect();
        let blocks = grades
            .into_iter()
            .map(|g| {
                let mut acc = first.block(g);
                for m in &maps[1..] {
                    acc = &acc + &m.block(g);
                }
                (g, acc)
            })
            .collect();
        ChainMap::new(
            first.source.clone(),
            first.target.clone(),
            first.shift,
            blocks,
        )
    }
}

/// A complex without a preserved integer grading: one space, one square
/// differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UngradedComplex {
    labels: Vec<String>,
    d: BitMatrix,
}

impl UngradedComplex {
    pub fn new(labels: Vec<String>, d: BitMatrix) -> Result<Self, ChainError> {
        if d.rows() != labels.len() || d.cols() != labels.len() {
            return Err(ChainError::ShapeMismatch(format!(
                "differential is {}x{}, expected {n}x{n}",
                d.rows(),
                d.cols(),
                n = labels.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(ChainError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels, d })
    }

    pub fn zero_differential(labels: Vec<String>) -> Result<Self, ChainError> {
        let n = labels.len();
        Self::new(labels, BitMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn differential(&self) -> &BitMatrix {
        &self.d
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Checks `D^2 = 0`; on failure reports a generator whose square
    /// differential is nonzero.
    pub fn validate(&self) -> Result<(), ChainError> {
        let dd = &self.d * &self.d;
        if dd.is_zero() {
            return Ok(());
        }
        let j = (0..dd.cols())
            .find(|&j| (0..dd.rows()).any(|i| dd.get(i, j)))
            .expect("nonzero matrix has a nonzero column");
        Err(ChainError::NotAComplex {
            witness: format!("D^2({}) != 0", self.labels[j]),
        })
    }

    /// Total homology dimension, `dim - 2 rank D`.
    pub fn homology_dim(&self) -> Result<usize, ChainError> {
        self.validate()?;
        Ok(self.dim() - 2 * self.d.rank())
    }

    /// Tensor product: labels are pairs `x⊗y`, `D = D_a (x) 1 + 1 (x) D_b`.
    pub fn tensor(&self, other: &Self) -> Result<Self, ChainError> {
        let labels = self
            .labels
            .iter()
            .flat_map(|a| other.labels.iter().map(move |b| format!("{a}⊗{b}")))
            .collect();
        let d = &self.d.kronecker(&BitMatrix::identity(other.dim()))
            + &BitMatrix::identity(self.dim()).kronecker(&other.d);
        Self::new(labels, d)
    }

    /// Elementary cancellation of `(x, y)` with `<D x, y> = 1`; same
    /// zig-zag correction as the graded case.
    pub fn cancel_pair(&self, x: &str, y: &str) -> Result<Self, ChainError> {
        let ix = self
            .index_of(x)
            .ok_or_else(|| ChainError::UnknownGenerator(x.to_string()))?;
        let iy = self
            .index_of(y)
            .ok_or_else(|| ChainError::UnknownGenerator(y.to_string()))?;
        if ix == iy || !self.d.get(iy, ix) {
            return Err(ChainError::IllegalCancellation {
                x: x.to_string(),
                y: y.to_string(),
            });
        }
        let mut corrected = self.d.clone();
        for i in 0..self.d.rows() {
            if self.d.get(i, ix) {
                for j in 0..self.d.cols() {
                    if self.d.get(iy, j) {
                        corrected.flip(i, j);
                    }
                }
            }
        }
        let keep: Vec<usize> = (0..self.dim()).filter(|&i| i != ix && i != iy).collect();
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        Self::new(labels, corrected.submatrix(&keep, &keep))
    }

    /// Cancels until the differential vanishes; the survivor count is the
    /// homology dimension. Deterministic pair order (source index, then
    /// target index); returns the trace of cancelled `(x, y)` pairs.
    ///
    /// Diagonal unit entries are skipped: a generator cannot cancel
    /// against itself, and whenever `D^2 = 0` and `D != 0` an
    /// off-diagonal unit entry exists.
    pub fn reduce(&self) -> (Self, Vec<(String, String)>) {
        let mut c = self.clone();
        let mut trace = Vec::new();
        'outer: loop {
            for j in 0..c.dim() {
                for i in 0..c.dim() {
                    if i != j && c.d.get(i, j) {
                        let x = c.labels[j].clone();
                        let y = c.labels[i].clone();
                        c = c.cancel_pair(&x, &y).expect("unit entry was just located");
                        trace.push((x, y));
                        continue 'outer;
                    }
                }
            }
            return (c, trace);
        }
    }
}

/// True iff `f` commutes with the differentials of the two complexes.
pub fn commutes(f: &BitMatrix, src: &UngradedComplex, tgt: &UngradedComplex) -> bool {
    f.rows() == tgt.dim()
        && f.cols() == src.dim()
        && &tgt.differential().clone() * f == f * &src.differential().clone()
}

/// Ungraded mapping cone of `f: src -> tgt`: source block first (labels
/// bracketed), `D = [[D_src, 0], [f, D_tgt]]`.
pub fn ungraded_cone(
    f: &BitMatrix,
    src: &UngradedComplex,
    tgt: &UngradedComplex,
) -> Result<UngradedComplex, ChainError> {
    if f.rows() != tgt.dim() || f.cols() != src.dim() {
        return Err(ChainError::ShapeMismatch(format!(
            "cone map is {}x{}, expected {}x{}",
            f.rows(),
            f.cols(),
            tgt.dim(),
            src.dim()
        )));
    }
    if !commutes(f, src, tgt) {
        return Err(ChainError::NotAChainMap(
            "cone map fails to commute with differentials".into(),
        ));
    }
    let (s, t) = (src.dim(), tgt.dim());
    let mut labels: Vec<String> = src.labels().iter().map(|l| format!("[{l}]")).collect();
    labels.extend(tgt.labels().iter().cloned());
    let mut d = BitMatrix::zeros(s + t, s + t);
    d.paste(0, 0, src.differential());
    d.paste(s, 0, f);
    d.paste(s, s, tgt.differential());
    UngradedComplex::new(labels, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzz;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn concentrated_pair(src: usize, tgt: usize, f: BitMatrix) -> ChainMap {
        let a = ChainComplex::concentrated(0, labels("a", src)).unwrap();
        let b = ChainComplex::concentrated(0, labels("b", tgt)).unwrap();
        ChainMap::new(a, b, 0, BTreeMap::from([(0, f)])).unwrap()
    }

    #[test]
    fn validate_zero_differentials() {
        let c = ChainComplex::with_zero_differential(
            GradedSpace::new(BTreeMap::from([(0, labels("a", 2)), (1, labels("b", 3))])).unwrap(),
        );
        assert!(c.is_valid());
    }

    #[test]
    fn validate_two_grade_identity() {
        let space =
            GradedSpace::new(BTreeMap::from([(0, labels("a", 2)), (1, labels("b", 2))])).unwrap();
        let c = ChainComplex::new(space, BTreeMap::from([(1, BitMatrix::identity(2))])).unwrap();
        assert!(c.is_valid());
    }

    #[test]
    fn validate_rejects_identity_squared() {
        let space = GradedSpace::new(BTreeMap::from([
            (0, labels("a", 2)),
            (1, labels("b", 2)),
            (2, labels("c", 2)),
        ]))
        .unwrap();
        let c = ChainComplex::new(
            space,
            BTreeMap::from([(1, BitMatrix::identity(2)), (2, BitMatrix::identity(2))]),
        )
        .unwrap();
        assert!(!c.is_valid());
        assert!(c.homology_dims().is_err());
    }

    #[test]
    fn homology_of_zero_differential_is_the_space() {
        let c = ChainComplex::with_zero_differential(
            GradedSpace::new(BTreeMap::from([(0, labels("a", 2)), (3, labels("b", 5))])).unwrap(),
        );
        assert_eq!(c.homology_dims().unwrap(), BTreeMap::from([(0, 2), (3, 5)]));
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let c = ChainComplex::concentrated(0, labels("a", 1)).unwrap();
        let cone = ChainMap::identity(&c).mapping_cone().unwrap();
        assert_eq!(cone.total_homology().unwrap(), 0);
        let (reduced, _) = cone.reduce();
        assert_eq!(reduced.total_dim(), 0);
    }

    #[test]
    fn cone_of_zero_map_keeps_everything() {
        let f = concentrated_pair(2, 3, BitMatrix::zeros(3, 2));
        let cone = f.mapping_cone().unwrap();
        assert_eq!(cone.total_homology().unwrap(), 5);
        assert_eq!(cone.dims(), BTreeMap::from([(0, 3), (1, 2)]));
    }

    #[test]
    fn cone_shift_convention_puts_source_above_target() {
        let f = concentrated_pair(1, 1, BitMatrix::identity(1));
        let cone = f.mapping_cone().unwrap();
        assert_eq!(cone.dim(1), 1);
        assert_eq!(cone.dim(0), 1);
        assert_eq!(cone.spaces().labels(1), ["[a0]"]);
    }

    #[test]
    fn cone_rejects_non_chain_map() {
        // Two-term complexes with identity differentials; a map hitting
        // only the top grade cannot commute.
        let space = |p: &str| {
            GradedSpace::new(BTreeMap::from([
                (0, vec![format!("{p}0")]),
                (1, vec![format!("{p}1")]),
            ]))
            .unwrap()
        };
        let c =
            ChainComplex::new(space("a"), BTreeMap::from([(1, BitMatrix::identity(1))])).unwrap();
        let d =
            ChainComplex::new(space("b"), BTreeMap::from([(1, BitMatrix::identity(1))])).unwrap();
        let f = ChainMap::new(c, d, 0, BTreeMap::from([(1, BitMatrix::identity(1))])).unwrap();
        assert!(!f.is_chain_map());
        assert!(matches!(f.mapping_cone(), Err(ChainError::NotAChainMap(_))));
    }

    #[test]
    fn ungraded_homology_examples() {
        let c = UngradedComplex::zero_differential(labels("g", 5)).unwrap();
        assert_eq!(c.homology_dim().unwrap(), 5);

        let d = BitMatrix::from_rows(&[vec![0, 0], vec![1, 0]], 2);
        let c = UngradedComplex::new(labels("g", 2), d).unwrap();
        assert_eq!(c.homology_dim().unwrap(), 0);
    }

    #[test]
    fn ungraded_validate_names_a_witness() {
        let d = BitMatrix::from_rows(&[vec![0, 1], vec![1, 0]], 2);
        let c = UngradedComplex::new(labels("g", 2), d).unwrap();
        let err = c.homology_dim().unwrap_err();
        assert!(matches!(err, ChainError::NotAComplex { .. }));
        assert!(err.to_string().contains("g0"));
    }

    #[test]
    fn tensor_dims_multiply() {
        let a = ChainComplex::concentrated(0, labels("a", 2)).unwrap();
        let b = ChainComplex::concentrated(0, labels("b", 3)).unwrap();
        let t = a.tensor(&b).unwrap();
        assert_eq!(t.total_dim(), 6);
        assert_eq!(t.spaces().labels(0)[0], "a0⊗b0");
    }

    #[test]
    fn tensor_with_unit_is_isomorphic_copy() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (c, hom) = fuzz::graded_complex(&mut rng, 12);
        let unit = ChainComplex::concentrated(0, vec!["u".into()]).unwrap();
        let t = c.tensor(&unit).unwrap();
        assert_eq!(t.dims(), c.dims());
        assert_eq!(t.homology_dims().unwrap(), hom);
    }

    #[test]
    fn tensor_preserves_d_squared_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..25 {
            let (a, _) = fuzz::graded_complex(&mut rng, 8);
            let (b, _) = fuzz::graded_complex(&mut rng, 8);
            assert!(a.tensor(&b).unwrap().is_valid());
            let (ua, _) = fuzz::ungraded_complex(&mut rng, 6);
            let (ub, _) = fuzz::ungraded_complex(&mut rng, 6);
            assert!(ua.tensor(&ub).unwrap().is_valid());
        }
    }

    #[test]
    fn tensor_map_of_identities_is_identity() {
        let a = ChainComplex::concentrated(0, labels("a", 2)).unwrap();
        let b = ChainComplex::concentrated(0, labels("b", 3)).unwrap();
        let t = ChainMap::identity(&a)
            .tensor_map(&ChainMap::identity(&b))
            .unwrap();
        assert_eq!(t.block(0), BitMatrix::identity(6));
        assert!(t.is_chain_map());
    }

    #[test]
    fn map_sum_in_characteristic_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = concentrated_pair(3, 2, BitMatrix::random(2, 3, &mut rng));
        let s = ChainMap::sum(&[&f, &f]).unwrap();
        assert!(s.block(0).is_zero());
    }

    #[test]
    fn tensor_map_is_bilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let f = concentrated_pair(3, 2, BitMatrix::random(2, 3, &mut rng));
            let f2 = concentrated_pair(3, 2, BitMatrix::random(2, 3, &mut rng));
            let g = concentrated_pair(2, 4, BitMatrix::random(4, 2, &mut rng));
            let lhs = ChainMap::sum(&[&f, &f2]).unwrap().tensor_map(&g).unwrap();
            let rhs =
                ChainMap::sum(&[&f.tensor_map(&g).unwrap(), &f2.tensor_map(&g).unwrap()]).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn cancel_two_generator_complex_to_nothing() {
        let space = GradedSpace::new(BTreeMap::from([
            (0, vec!["y".into()]),
            (1, vec!["x".into()]),
        ]))
        .unwrap();
        let c = ChainComplex::new(space, BTreeMap::from([(1, BitMatrix::identity(1))])).unwrap();
        let c2 = c.cancel_pair("x", "y").unwrap();
        assert_eq!(c2.total_dim(), 0);
    }

    #[test]
    fn cancel_requires_unit_entry() {
        let space = GradedSpace::new(BTreeMap::from([
            (0, vec!["y".into()]),
            (1, vec!["x".into()]),
        ]))
        .unwrap();
        let c = ChainComplex::with_zero_differential(space);
        assert!(matches!(
            c.cancel_pair("x", "y"),
            Err(ChainError::IllegalCancellation { .. })
        ));
    }

    #[test]
    fn cancellation_preserves_homology_dims() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..40 {
            let (c, hom) = fuzz::graded_complex(&mut rng, 16);
            let (reduced, _) = c.reduce();
            assert!(reduced.differentials_are_zero());
            assert_eq!(reduced.homology_dims().unwrap(), c.homology_dims().unwrap());
            assert_eq!(c.homology_dims().unwrap(), hom);
        }
    }

    #[test]
    fn reduce_leaves_zero_differential_complex_alone() {
        let c = ChainComplex::concentrated(2, labels("a", 4)).unwrap();
        let (r, trace) = c.reduce();
        assert_eq!(r, c);
        assert!(trace.is_empty());
    }

    #[test]
    fn ungraded_reduce_matches_rank_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..40 {
            let (c, hom) = fuzz::ungraded_complex(&mut rng, 14);
            assert_eq!(c.homology_dim().unwrap(), hom);
            let (reduced, trace) = c.reduce();
            assert!(reduced.differential().is_zero());
            assert_eq!(reduced.dim(), hom);
            assert_eq!(c.dim(), reduced.dim() + 2 * trace.len());
        }
    }

    #[test]
    fn euler_characteristic_is_conserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..30 {
            let (c, hom) = fuzz::graded_complex(&mut rng, 18);
            let hom_chi: i64 = hom
                .iter()
                .map(|(&g, &d)| {
                    if g.rem_euclid(2) == 0 {
                        d as i64
                    } else {
                        -(d as i64)
                    }
                })
                .sum();
            assert_eq!(c.euler_characteristic(), hom_chi);
        }
    }

    #[test]
    fn cone_homology_counts_induced_rank() {
        // On zero-differential complexes the induced map on homology is f
        // itself: h(cone f) = (dim src - r) + (dim tgt - r), r = rank f.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..40 {
            let (s, t) = (rng.random_range(0..6), rng.random_range(0..6));
            let f = concentrated_pair(s, t, BitMatrix::random(t, s, &mut rng));
            let r = f.block(0).rank();
            let cone = f.mapping_cone().unwrap();
            assert_eq!(cone.total_homology().unwrap(), (s - r) + (t - r));
        }
    }

    #[test]
    fn ungraded_cone_matches_graded_cone_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let f = BitMatrix::random(4, 3, &mut rng);
        let src = UngradedComplex::zero_differential(labels("s", 3)).unwrap();
        let tgt = UngradedComplex::zero_differential(labels("t", 4)).unwrap();
        let cone = ungraded_cone(&f, &src, &tgt).unwrap();
        assert_eq!(cone.dim(), 7);
        assert_eq!(cone.homology_dim().unwrap(), 7 - 2 * f.rank());
        assert_eq!(cone.labels()[0], "[s0]");
    }

    #[test]
    fn direct_sum_stacks_blocks() {
        let space = GradedSpace::new(BTreeMap::from([
            (0, vec!["y".into()]),
            (1, vec!["x".into()]),
        ]))
        .unwrap();
        let c = ChainComplex::new(space, BTreeMap::from([(1, BitMatrix::identity(1))])).unwrap();
        let c2 = c.relabeled(|l| format!("{l}@2")).unwrap();
        let s = ChainComplex::direct_sum(&[&c, &c2]).unwrap();
        assert_eq!(s.total_dim(), 4);
        assert!(s.is_valid());
        assert_eq!(s.total_homology().unwrap(), 0);
    }
}
