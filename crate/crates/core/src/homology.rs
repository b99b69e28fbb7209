//! Koszul complexes, derived reduction to the residue field, and the support
//! statements, over exact rational coefficients. The local ring here is the
//! polynomial ring localized at the origin; exact linear algebra makes every
//! test unconditional.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exact::{
    dimension, exact_div, matrix_columns, parse_poly, submodule_contains,
    syzygies, QPoly, VecPoly,
};

type PolyMatrix = Vec<Vec<QPoly>>;

/// Rank of a matrix over the rationals by Gaussian elimination.
pub fn rational_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < rows && col < cols {
        let pivot = (rank..rows).find(|&r| !m[r][col].is_zero());
        match pivot {
            None => {
                col += 1;
                continue;
            }
            Some(p) => {
                m.swap(rank, p);
                let inv = m[rank][col].recip();
                for j in col..cols {
                    let v = &m[rank][j] * &inv;
                    m[rank][j] = v;
                }
                for r in 0..rows {
                    if r != rank && !m[r][col].is_zero() {
                        let f = m[r][col].clone();
                        for j in col..cols {
                            let v = &m[r][j] - &f * &m[rank][j];
                            m[r][j] = v;
                        }
                    }
                }
                rank += 1;
                col += 1;
            }
        }
    }
    rank
}

/// Rank over the fraction field, by fraction-free Bareiss condensation; the
/// divisions below are exact by the Desnanot-Jacobi identity.
pub fn generic_rank(matrix: &PolyMatrix, nvars: usize) -> Result<usize> {
    let mut m = matrix.clone();
    let rows = m.len();
    if rows == 0 {
        return Ok(0);
    }
    let cols = m[0].len();
    let mut prev = QPoly::one(nvars);
    let mut rank = 0;
    loop {
        let mut pivot = None;
        'search: for r in rank..rows {
            for c in rank..cols {
                if !m[r][c].is_zero() {
                    pivot = Some((r, c));
                    break 'search;
                }
            }
        }
        let (pr, pc) = match pivot {
            None => return Ok(rank),
            Some(p) => p,
        };
        m.swap(rank, pr);
        for row in m.iter_mut() {
            row.swap(rank, pc);
        }
        for r in rank + 1..rows {
            for c in rank + 1..cols {
                let num = m[r][c].mul(&m[rank][rank]).sub(&m[r][rank].mul(&m[rank][c]));
                m[r][c] = exact_div(&num, &prev)?;
            }
        }
        prev = m[rank][rank].clone();
        rank += 1;
        if rank >= rows || rank >= cols {
            return Ok(rank);
        }
    }
}

fn determinant(m: &PolyMatrix, nvars: usize) -> QPoly {
    let n = m.len();
    match n {
        0 => QPoly::one(nvars),
        1 => m[0][0].clone(),
        _ => {
            let mut det = QPoly::zero(nvars);
            for (j, entry) in m[0].iter().enumerate() {
                if entry.is_zero() {
                    continue;
                }
                let minor: PolyMatrix = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let cof = entry.mul(&determinant(&minor, nvars));
                det = if j % 2 == 0 { det.add(&cof) } else { det.sub(&cof) };
            }
            det
        }
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, start: usize, n: usize, k: usize) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(out, cur, i + 1, n, k);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, 0, n, k);
    out
}

/// All `size x size` minors of the matrix.
fn minor_ideal(matrix: &PolyMatrix, nvars: usize, size: usize) -> Vec<QPoly> {
    if size == 0 {
        return vec![QPoly::one(nvars)];
    }
    let rows = matrix.len();
    let cols = if rows == 0 { 0 } else { matrix[0].len() };
    if size > rows || size > cols {
        return Vec::new();
    }
    let mut out = Vec::new();
    for ri in combinations(rows, size) {
        for ci in combinations(cols, size) {
            let sub: PolyMatrix = ri
                .iter()
                .map(|&r| ci.iter().map(|&c| matrix[r][c].clone()).collect())
                .collect();
            let d = determinant(&sub, nvars);
            if !d.is_zero() {
                out.push(d.primitive());
            }
        }
    }
    out
}

/// A bounded complex of free modules with polynomial differentials, carrying
/// its declared cohomology window `[a, b]`.
#[derive(Debug, Clone)]
pub struct FreeComplex {
    nvars: usize,
    first_degree: i64,
    ranks: Vec<usize>,
    /// `differentials[i]` maps degree `first_degree + i` to the next degree;
    /// shape `ranks[i+1] x ranks[i]`.
    differentials: Vec<PolyMatrix>,
    window: (i64, i64),
}

impl FreeComplex {
    pub fn new(
        nvars: usize,
        first_degree: i64,
        ranks: Vec<usize>,
        differentials: Vec<PolyMatrix>,
        window: (i64, i64),
    ) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::InvalidInput("a complex needs at least one degree".into()));
        }
        if differentials.len() + 1 != ranks.len() {
            return Err(Error::InvalidInput(
                "need exactly one differential between consecutive degrees".into(),
            ));
        }
        for (i, d) in differentials.iter().enumerate() {
            if d.len() != ranks[i + 1] || d.iter().any(|row| row.len() != ranks[i]) {
                return Err(Error::InvalidInput(format!(
                    "differential {i} has the wrong shape"
                )));
            }
        }
        let cx = FreeComplex { nvars, first_degree, ranks, differentials, window };
        if !cx.squares_to_zero() {
            return Err(Error::InvalidInput("differentials do not compose to zero".into()));
        }
        Ok(cx)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn first_degree(&self) -> i64 {
        self.first_degree
    }

    pub fn last_degree(&self) -> i64 {
        self.first_degree + self.ranks.len() as i64 - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank_at(&self, degree: i64) -> usize {
        let idx = degree - self.first_degree;
        if idx < 0 || idx as usize >= self.ranks.len() {
            0
        } else {
            self.ranks[idx as usize]
        }
    }

    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    pub fn differential(&self, i: usize) -> &PolyMatrix {
        &self.differentials[i]
    }

    pub fn squares_to_zero(&self) -> bool {
        for i in 0..self.differentials.len().saturating_sub(1) {
            let a = &self.differentials[i];
            let b = &self.differentials[i + 1];
            for r in 0..b.len() {
                for c in 0..self.ranks[i] {
                    let mut acc = QPoly::zero(self.nvars);
                    for k in 0..a.len() {
                        acc = acc.add(&b[r][k].mul(&a[k][c]));
                    }
                    if !acc.is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The exterior-algebra Koszul complex on the `n` variables, in degrees
    /// `-n..0`; the minimal free resolution of the residue field, so the
    /// declared cohomology window is `[0, 0]`.
    pub fn koszul(n: usize) -> Result<FreeComplex> {
        if n == 0 {
            return Err(Error::InvalidInput("koszul complex needs n >= 1".into()));
        }
        let mut bases: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n + 1);
        for k in (0..=n).rev() {
            bases.push(combinations(n, k));
        }
        // bases[i] is the basis of the module in degree first + i = -n + i,
        // i.e. exterior power n - i.
        let ranks: Vec<usize> = bases.iter().map(|b| b.len()).collect();
        let mut differentials = Vec::with_capacity(n);
        for i in 0..n {
            let src = &bases[i];
            let dst = &bases[i + 1];
            let index: BTreeMap<&Vec<usize>, usize> =
                dst.iter().enumerate().map(|(j, s)| (s, j)).collect();
            let mut matrix = vec![vec![QPoly::zero(n); src.len()]; dst.len()];
            for (c, subset) in src.iter().enumerate() {
                for (pos, &var) in subset.iter().enumerate() {
                    let mut smaller = subset.clone();
                    smaller.remove(pos);
                    let r = index[&smaller];
                    let sign = if pos % 2 == 0 { 1 } else { -1 };
                    let term = QPoly::variable(n, var).scale(&BigRational::from_integer(sign.into()));
                    matrix[r][c] = matrix[r][c].add(&term);
                }
            }
            differentials.push(matrix);
        }
        FreeComplex::new(n, -(n as i64), ranks, differentials, (0, 0))
    }

    /// Cohomological shift `Q[s]`: degree `k` of the result is degree `k + s`
    /// of the input; the declared window shifts along.
    pub fn shifted(&self, s: i64) -> FreeComplex {
        let sign = if s.rem_euclid(2) == 0 { 1 } else { -1 };
        let differentials = self
            .differentials
            .iter()
            .map(|m| {
                m.iter()
                    .map(|row| {
                        row.iter()
                            .map(|p| p.scale(&BigRational::from_integer(sign.into())))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        FreeComplex {
            nvars: self.nvars,
            first_degree: self.first_degree - s,
            ranks: self.ranks.clone(),
            differentials,
            window: (self.window.0 - s, self.window.1 - s),
        }
    }

    /// Direct sum; the windows merge.
    pub fn direct_sum(&self, other: &FreeComplex) -> Result<FreeComplex> {
        if self.nvars != other.nvars {
            return Err(Error::InvalidInput("summands over different rings".into()));
        }
        let first = self.first_degree.min(other.first_degree);
        let last = self.last_degree().max(other.last_degree());
        let len = (last - first + 1) as usize;
        let mut ranks = vec![0usize; len];
        for (i, r) in ranks.iter_mut().enumerate() {
            let deg = first + i as i64;
            *r = self.rank_at(deg) + other.rank_at(deg);
        }
        let mut differentials = Vec::with_capacity(len - 1);
        for i in 0..len - 1 {
            let deg = first + i as i64;
            let rows = ranks[i + 1];
            let cols = ranks[i];
            let mut m = vec![vec![QPoly::zero(self.nvars); cols]; rows];
            let a = self.block(deg);
            let b = other.block(deg);
            let (ar, ac) = (self.rank_at(deg + 1), self.rank_at(deg));
            for r in 0..ar {
                for c in 0..ac {
                    m[r][c] = a
                        .map(|d| d[r][c].clone())
                        .unwrap_or_else(|| QPoly::zero(self.nvars));
                }
            }
            if let Some(d) = b {
                for (r, row) in d.iter().enumerate() {
                    for (c, v) in row.iter().enumerate() {
                        m[ar + r][ac + c] = v.clone();
                    }
                }
            }
            differentials.push(m);
        }
        FreeComplex::new(
            self.nvars,
            first,
            ranks,
            differentials,
            (
                self.window.0.min(other.window.0),
                self.window.1.max(other.window.1),
            ),
        )
    }

    fn block(&self, degree: i64) -> Option<&PolyMatrix> {
        let idx = degree - self.first_degree;
        if idx < 0 || idx as usize >= self.differentials.len() {
            None
        } else {
            Some(&self.differentials[idx as usize])
        }
    }

    /// Mapping cone of multiplication by a polynomial `c` on this complex,
    /// with the declared window supplied by the caller (the long exact
    /// sequence determines it from `c`).
    pub fn cone_over_scalar(&self, c: &QPoly, window: (i64, i64)) -> Result<FreeComplex> {
        let first = self.first_degree - 1;
        let len = self.ranks.len() + 1;
        let mut ranks = vec![0usize; len];
        for (i, r) in ranks.iter_mut().enumerate() {
            let deg = first + i as i64;
            *r = self.rank_at(deg + 1) + self.rank_at(deg);
        }
        let mut differentials = Vec::with_capacity(len - 1);
        for i in 0..len - 1 {
            let deg = first + i as i64;
            let rows = ranks[i + 1];
            let cols = ranks[i];
            let mut m = vec![vec![QPoly::zero(self.nvars); cols]; rows];
            // Top-left: -d_A in shifted degrees; bottom-left: the chain map;
            // bottom-right: d_B.
            let (ar1, ac1) = (self.rank_at(deg + 2), self.rank_at(deg + 1));
            if let Some(d) = self.block(deg + 1) {
                for r in 0..ar1 {
                    for cc in 0..ac1 {
                        m[r][cc] = d[r][cc].neg();
                    }
                }
            }
            for j in 0..self.rank_at(deg + 1).min(ranks[i + 1].saturating_sub(ar1)) {
                m[ar1 + j][j] = c.clone();
            }
            if let Some(d) = self.block(deg) {
                for (r, row) in d.iter().enumerate() {
                    for (cc, v) in row.iter().enumerate() {
                        m[ar1 + r][ac1 + cc] = v.clone();
                    }
                }
            }
            differentials.push(m);
        }
        FreeComplex::new(self.nvars, first, ranks, differentials, window)
    }

    /// Evaluates every differential at the origin and computes cohomology
    /// dimensions by exact linear algebra.
    pub fn reduce_and_cohomology(&self) -> CohomologyProfile {
        let origin = vec![BigRational::zero(); self.nvars];
        self.fiber_cohomology(&origin)
    }

    /// Cohomology dimensions of the fiber at a rational point.
    pub fn fiber_cohomology(&self, point: &[BigRational]) -> CohomologyProfile {
        let eval: Vec<Vec<Vec<BigRational>>> = self
            .differentials
            .iter()
            .map(|m| {
                m.iter()
                    .map(|row| row.iter().map(|p| p.eval(point)).collect())
                    .collect()
            })
            .collect();
        let mut dims = BTreeMap::new();
        for (i, &rk) in self.ranks.iter().enumerate() {
            let out_rank = if i < eval.len() {
                rational_rank(eval[i].clone())
            } else {
                0
            };
            let in_rank = if i > 0 { rational_rank(eval[i - 1].clone()) } else { 0 };
            let h = rk - out_rank - in_rank;
            if h > 0 {
                dims.insert(self.first_degree + i as i64, h);
            }
        }
        CohomologyProfile { dims }
    }

    /// Module-level cohomology of the complex itself: `H^i = 0` iff every
    /// kernel generator lies in the image submodule.
    fn module_cohomology_nonzero(&self, idx: usize) -> bool {
        let nv = self.nvars;
        let rk = self.ranks[idx];
        if rk == 0 {
            return false;
        }
        let kernel_gens: Vec<VecPoly> = if idx < self.differentials.len() {
            let cols = matrix_columns(&self.differentials[idx]);
            syzygies(&cols, nv, self.ranks[idx + 1])
        } else {
            (0..rk)
                .map(|j| {
                    let mut v = VecPoly::zero(nv, rk);
                    v.comps[j] = QPoly::one(nv);
                    v
                })
                .collect()
        };
        if kernel_gens.is_empty() {
            return false;
        }
        let image_gens: Vec<VecPoly> = if idx > 0 {
            matrix_columns(&self.differentials[idx - 1])
        } else {
            Vec::new()
        };
        if image_gens.is_empty() {
            return kernel_gens.iter().any(|g| !g.is_zero());
        }
        kernel_gens
            .iter()
            .any(|g| !submodule_contains(&image_gens, g, nv, rk))
    }

    /// The auxiliary pass behind `check_window`: square-zero, finite-length
    /// cohomology (generic exactness plus zero-dimensional minor loci, which
    /// needs homogeneous entries), and the declared window pattern verified
    /// at module level.
    pub fn verify_finite_length_window(&self) -> Result<()> {
        if !self.squares_to_zero() {
            return Err(Error::PreconditionUnverified("d o d != 0".into()));
        }
        for m in &self.differentials {
            for row in m {
                for p in row {
                    if !p.is_homogeneous() {
                        return Err(Error::PreconditionUnverified(
                            "finite-length certificate needs homogeneous differentials".into(),
                        ));
                    }
                }
            }
        }
        // Generic exactness: over the fraction field the complex is exact.
        let generic: Vec<usize> = self
            .differentials
            .iter()
            .map(|m| generic_rank(m, self.nvars))
            .collect::<Result<Vec<usize>>>()?;
        for (i, &rk) in self.ranks.iter().enumerate() {
            let out_rank = if i < generic.len() { generic[i] } else { 0 };
            let in_rank = if i > 0 { generic[i - 1] } else { 0 };
            if out_rank + in_rank != rk {
                return Err(Error::PreconditionUnverified(format!(
                    "not generically exact at degree {}",
                    self.first_degree + i as i64
                )));
            }
        }
        // Rank can only drop at the origin: each minor locus is the origin or
        // empty.
        for (i, m) in self.differentials.iter().enumerate() {
            if generic[i] == 0 {
                continue;
            }
            let minors = minor_ideal(m, self.nvars, generic[i]);
            match dimension(&minors, self.nvars) {
                None | Some(0) => {}
                Some(d) => {
                    return Err(Error::PreconditionUnverified(format!(
                        "rank-drop locus of differential {i} has dimension {d}"
                    )))
                }
            }
        }
        // Declared window against module-level cohomology.
        let (a, b) = self.window;
        for (i, _) in self.ranks.iter().enumerate() {
            let deg = self.first_degree + i as i64;
            let nonzero = self.module_cohomology_nonzero(i);
            if (deg < a || deg > b) && nonzero {
                return Err(Error::PreconditionUnverified(format!(
                    "cohomology outside the declared window at degree {deg}"
                )));
            }
            if (deg == a || deg == b) && !nonzero {
                return Err(Error::PreconditionUnverified(format!(
                    "declared endpoint {deg} has vanishing cohomology"
                )));
            }
        }
        Ok(())
    }

    /// The support-bound check: after verifying the finite-length window
    /// preconditions, the reduced profile must be nonzero exactly at the
    /// shifted left endpoint `a - n` and at `b`, and vanish outside
    /// `[a - n, b]`.
    pub fn check_window(&self) -> Result<WindowReport> {
        self.verify_finite_length_window()?;
        let (a, b) = self.window;
        let n = self.nvars as i64;
        let profile = self.reduce_and_cohomology();
        let lo = a - n;
        let nonzero_ends =
            profile.dims.contains_key(&lo) && profile.dims.contains_key(&b);
        let inside_only = profile.dims.keys().all(|&d| d >= lo && d <= b);
        Ok(WindowReport { a, b, window_ok: nonzero_ends && inside_only, profile })
    }
}

/// Per-degree cohomology dimensions after reduction; zero entries are absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyProfile {
    pub dims: BTreeMap<i64, usize>,
}

impl CohomologyProfile {
    pub fn dim(&self, degree: i64) -> usize {
        self.dims.get(&degree).copied().unwrap_or(0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .map(|(&d, &h)| if d.rem_euclid(2) == 0 { h as i64 } else { -(h as i64) })
            .sum()
    }
}

/// Output of `check_window`.
#[derive(Debug, Clone)]
pub struct WindowReport {
    pub a: i64,
    pub b: i64,
    pub window_ok: bool,
    pub profile: CohomologyProfile,
}

/// A finitely presented module `coker(matrix)`, rows indexing generators.
#[derive(Debug, Clone)]
pub struct ModulePresentation {
    pub nvars: usize,
    pub rows: usize,
    pub matrix: PolyMatrix,
}

impl ModulePresentation {
    pub fn new(nvars: usize, rows: usize, matrix: PolyMatrix) -> Result<Self> {
        if matrix.len() != rows {
            return Err(Error::InvalidInput("presentation matrix has wrong row count".into()));
        }
        Ok(ModulePresentation { nvars, rows, matrix })
    }

    fn eval_matrix(m: &PolyMatrix, point: &[BigRational]) -> Vec<Vec<BigRational>> {
        m.iter()
            .map(|row| row.iter().map(|p| p.eval(point)).collect())
            .collect()
    }

    /// Localization test at a rational point: the module is nonzero there iff
    /// the evaluated presentation fails to be surjective (Nakayama on the
    /// translated origin).
    pub fn support_at(&self, point: &[BigRational]) -> bool {
        if self.matrix.is_empty() || self.matrix[0].is_empty() {
            return self.rows > 0;
        }
        rational_rank(Self::eval_matrix(&self.matrix, point)) < self.rows
    }

    /// Derived-fiber test: some `Tor_i` with `i` up to the ring dimension is
    /// nonzero, computed from a free resolution built by iterated syzygies.
    pub fn small_support_at(&self, point: &[BigRational]) -> bool {
        let (steps, complete) = self.resolution();
        let mut prev_rank_eval = 0usize;
        let mut prev_cols = self.rows;
        for d in &steps {
            let cols = if d.is_empty() { 0 } else { d[0].len() };
            let rank = if cols == 0 {
                0
            } else {
                rational_rank(Self::eval_matrix(d, point))
            };
            // Tor_i = dim ker(d_i at p) - rank(d_{i+1} at p); for i = 0 the
            // kernel is the whole fiber of rank `rows`.
            let ker = prev_cols - prev_rank_eval;
            if ker > rank {
                return true;
            }
            prev_rank_eval = rank;
            prev_cols = cols;
        }
        // When the last syzygy module was zero the resolution is finished and
        // the kernel of its evaluated final map is one more honest Tor. When
        // the resolution was merely truncated, everything beyond it vanishes
        // by the global dimension bound.
        complete && prev_cols > prev_rank_eval
    }

    /// Free resolution `F_k -> ... -> F_1 -> F_0`: the presentation matrix
    /// followed by syzygy matrices. Truncated after `ring dimension + 1`
    /// steps, which covers every Tor that can be nonzero; the flag reports
    /// whether the final kernel was actually zero.
    fn resolution(&self) -> (Vec<PolyMatrix>, bool) {
        let mut steps: Vec<PolyMatrix> = vec![self.matrix.clone()];
        let mut current_rows = self.rows;
        for _ in 0..self.nvars {
            let last = steps.last().unwrap();
            if last.is_empty() || last[0].is_empty() {
                return (steps, true);
            }
            let cols = matrix_columns(last);
            let syz = syzygies(&cols, self.nvars, current_rows);
            if syz.is_empty() {
                return (steps, true);
            }
            current_rows = last[0].len();
            let next: PolyMatrix = (0..current_rows)
                .map(|r| syz.iter().map(|v| v.comps[r].clone()).collect())
                .collect();
            steps.push(next);
        }
        (steps, false)
    }
}

/// The coincidence of supports: at every sampled rational point the
/// localization test and the derived-fiber test agree.
pub fn supp_equals_support(
    module: &ModulePresentation,
    points: &[Vec<BigRational>],
) -> bool {
    points
        .iter()
        .all(|p| module.support_at(p) == module.small_support_at(p))
}

/// Wire form of a complex: `{"n", "degrees": [a, b], "ranks",
/// "differentials"}` with the ranks listed for consecutive degrees ending at
/// the declared `b` (minimal complexes place their top cohomology there).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexJson {
    pub n: usize,
    pub degrees: [i64; 2],
    pub ranks: Vec<usize>,
    pub differentials: Vec<Vec<Vec<String>>>,
}

impl FreeComplex {
    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            n: self.nvars,
            degrees: [self.window.0, self.window.1],
            ranks: self.ranks.clone(),
            differentials: self
                .differentials
                .iter()
                .map(|m| {
                    m.iter()
                        .map(|row| row.iter().map(|p| p.to_string()).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(j: &ComplexJson) -> Result<Self> {
        let differentials: Result<Vec<PolyMatrix>> = j
            .differentials
            .iter()
            .map(|m| {
                m.iter()
                    .map(|row| {
                        row.iter()
                            .map(|s| parse_poly(s, j.n))
                            .collect::<Result<Vec<QPoly>>>()
                    })
                    .collect()
            })
            .collect();
        let first = j.degrees[1] - j.ranks.len() as i64 + 1;
        FreeComplex::new(j.n, first, j.ranks.clone(), differentials?, (j.degrees[0], j.degrees[1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn binomial(n: usize, k: usize) -> usize {
        combinations(n, k).len()
    }

    #[test]
    fn koszul_ranks_and_reduction() {
        for n in 1..=5 {
            let kos = FreeComplex::koszul(n).unwrap();
            assert!(kos.squares_to_zero());
            let profile = kos.reduce_and_cohomology();
            for i in 0..=n {
                assert_eq!(profile.dim(-(i as i64)), binomial(n, i), "n={n}, i={i}");
            }
            // Top Tor is one-dimensional.
            assert_eq!(profile.dim(-(n as i64)), 1);
            // Euler characteristic of the reduced profile vanishes.
            assert_eq!(profile.euler_characteristic(), 0);
        }
    }

    #[test]
    fn koszul_n1_is_multiplication_by_x() {
        let kos = FreeComplex::koszul(1).unwrap();
        assert_eq!(kos.ranks(), &[1, 1]);
        assert_eq!(kos.differential(0)[0][0], QPoly::variable(1, 0));
        let profile = kos.reduce_and_cohomology();
        assert_eq!(profile.dim(-1), 1);
        assert_eq!(profile.dim(0), 1);
    }

    #[test]
    fn zero_complex_profile_is_empty() {
        let cx = FreeComplex::new(2, 0, vec![0], vec![], (0, 0)).unwrap();
        assert!(cx.reduce_and_cohomology().dims.is_empty());
    }

    #[test]
    fn koszul_window_holds() {
        for n in 1..=3 {
            let kos = FreeComplex::koszul(n).unwrap();
            let report = kos.check_window().unwrap();
            assert_eq!((report.a, report.b), (0, 0));
            assert!(report.window_ok, "n={n}");
        }
    }

    #[test]
    fn shifted_window_shifts() {
        let kos = FreeComplex::koszul(2).unwrap().shifted(-3);
        assert_eq!(kos.window(), (3, 3));
        let report = kos.check_window().unwrap();
        assert!(report.window_ok);
        assert_eq!(report.profile.dim(1), 1);
        assert_eq!(report.profile.dim(3), 1);
    }

    #[test]
    fn cone_over_variable_multiplication() {
        // Multiplication by x1 on Kos(2): cohomology of the cone sits in
        // degrees [-1, 0].
        let kos = FreeComplex::koszul(2).unwrap();
        let cone = kos
            .cone_over_scalar(&QPoly::variable(2, 0), (-1, 0))
            .unwrap();
        assert!(cone.squares_to_zero());
        let report = cone.check_window().unwrap();
        assert!(report.window_ok);
        // Reduced profile spans [a - n, b] = [-3, 0].
        assert!(report.profile.dim(-3) > 0);
        assert!(report.profile.dim(0) > 0);
    }

    #[test]
    fn sum_of_shifts_window() {
        let kos = FreeComplex::koszul(2).unwrap();
        let sum = kos.shifted(1).direct_sum(&kos.shifted(-1)).unwrap();
        assert_eq!(sum.window(), (-1, 1));
        let report = sum.check_window().unwrap();
        assert!(report.window_ok);
        assert!(report.profile.dim(-3) > 0);
        assert!(report.profile.dim(1) > 0);
    }

    #[test]
    fn wrong_declared_window_is_caught() {
        let kos = FreeComplex::koszul(2).unwrap();
        let lied = FreeComplex::new(
            2,
            kos.first_degree(),
            kos.ranks().to_vec(),
            kos.differentials.clone(),
            (-1, 0),
        )
        .unwrap();
        assert!(matches!(
            lied.check_window(),
            Err(Error::PreconditionUnverified(_))
        ));
    }

    #[test]
    fn infinite_length_cohomology_is_rejected() {
        // 0 -> R ->x1 R -> 0 over two variables: H^0 = R/(x1) has positive
        // dimension, so the finite-length pass must fail.
        let d = vec![vec![QPoly::variable(2, 0)]];
        let cx = FreeComplex::new(2, -1, vec![1, 1], vec![d], (0, 0)).unwrap();
        assert!(matches!(
            cx.check_window(),
            Err(Error::PreconditionUnverified(_))
        ));
    }

    #[test]
    fn supp_matches_small_supp_for_hypersurface() {
        // M = R/(x1) over two variables.
        let m = ModulePresentation::new(2, 1, vec![vec![QPoly::variable(2, 0)]]).unwrap();
        let origin = vec![BigRational::zero(), BigRational::zero()];
        let on_axis = vec![BigRational::zero(), BigRational::one()];
        let off = vec![BigRational::one(), BigRational::zero()];
        assert!(m.support_at(&origin));
        assert!(m.small_support_at(&origin));
        assert!(m.support_at(&on_axis));
        assert!(m.small_support_at(&on_axis));
        assert!(!m.support_at(&off));
        assert!(!m.small_support_at(&off));
        assert!(supp_equals_support(&m, &[origin, on_axis, off]));
    }

    #[test]
    fn free_and_zero_modules() {
        // Free module: presentation with zero relations, nonzero everywhere.
        let free = ModulePresentation::new(2, 1, vec![vec![QPoly::zero(2)]]).unwrap();
        let pts = vec![
            vec![BigRational::zero(), BigRational::zero()],
            vec![BigRational::one(), BigRational::from_integer(2.into())],
        ];
        for p in &pts {
            assert!(free.support_at(p));
            assert!(free.small_support_at(p));
        }
        // Zero module: identity presentation, zero everywhere.
        let zero = ModulePresentation::new(2, 1, vec![vec![QPoly::one(2)]]).unwrap();
        for p in &pts {
            assert!(!zero.support_at(p));
            assert!(!zero.small_support_at(p));
        }
    }

    #[test]
    fn torsion_module_with_embedded_relation() {
        // M = coker [x1, x2]: the residue field at the origin.
        let m = ModulePresentation::new(
            2,
            1,
            vec![vec![QPoly::variable(2, 0), QPoly::variable(2, 1)]],
        )
        .unwrap();
        let origin = vec![BigRational::zero(), BigRational::zero()];
        let off = vec![BigRational::one(), BigRational::one()];
        assert!(m.support_at(&origin) && m.small_support_at(&origin));
        assert!(!m.support_at(&off) && !m.small_support_at(&off));
    }

    #[test]
    fn json_round_trip() {
        let kos = FreeComplex::koszul(2).unwrap();
        let j = kos.to_json();
        let back = FreeComplex::from_json(&j).unwrap();
        assert_eq!(back.ranks(), kos.ranks());
        assert_eq!(back.window(), kos.window());
        assert!(back.check_window().unwrap().window_ok);
    }
}
