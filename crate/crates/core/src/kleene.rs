//! Typed Kleene algebras, a law-checking harness, and the matrix
//! (biproduct) completion with block-recursive star.

use std::fmt;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::rel::{Carrier, FinRel};

/// A typed Kleene algebra: homsets are join-semilattices, composition is
/// diagrammatic (`seq(a, b)` is "a then b") and endomorphisms have a star.
/// An untyped Kleene algebra is an instance with a single object.
pub trait KleeneAlgebra {
    type Obj: Clone + PartialEq + fmt::Debug;
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self, dom: &Self::Obj, cod: &Self::Obj) -> Self::Elem;
    fn one(&self, x: &Self::Obj) -> Self::Elem;
    fn join(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn seq(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn star(&self, a: &Self::Elem) -> Self::Elem;

    /// The induced order: `a ≤ b ⇔ a ⊔ b = b`.
    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.join(a, b) == *b
    }
}

/// The two-element Kleene algebra.
#[derive(Clone, Copy, Debug, Default)]
pub struct BoolKa;

impl KleeneAlgebra for BoolKa {
    type Obj = ();
    type Elem = bool;

    fn zero(&self, _: &(), _: &()) -> bool {
        false
    }
    fn one(&self, _: &()) -> bool {
        true
    }
    fn join(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }
    fn seq(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }
    fn star(&self, _: &bool) -> bool {
        true
    }
}

/// Finite relations; objects are carriers. Operations panic on carrier
/// mismatch, which is a caller error here.
#[derive(Clone, Copy, Debug, Default)]
pub struct RelKa;

impl KleeneAlgebra for RelKa {
    type Obj = Carrier;
    type Elem = FinRel;

    fn zero(&self, dom: &Carrier, cod: &Carrier) -> FinRel {
        FinRel::empty(dom, cod)
    }
    fn one(&self, x: &Carrier) -> FinRel {
        FinRel::identity(x)
    }
    fn join(&self, a: &FinRel, b: &FinRel) -> FinRel {
        a.union(b).expect("join of relations with equal carriers")
    }
    fn seq(&self, a: &FinRel, b: &FinRel) -> FinRel {
        a.compose(b).expect("composable relations")
    }
    fn star(&self, a: &FinRel) -> FinRel {
        a.star().expect("star of an endorelation")
    }
    fn leq(&self, a: &FinRel, b: &FinRel) -> bool {
        a.is_subset(b).expect("comparable relations")
    }
}

/// Wraps an instance but replaces star by the identity map on elements;
/// used to show that the harness catches broken stars.
#[derive(Clone, Copy, Debug, Default)]
pub struct BrokenStar<K>(pub K);

impl<K: KleeneAlgebra> KleeneAlgebra for BrokenStar<K> {
    type Obj = K::Obj;
    type Elem = K::Elem;

    fn zero(&self, dom: &K::Obj, cod: &K::Obj) -> K::Elem {
        self.0.zero(dom, cod)
    }
    fn one(&self, x: &K::Obj) -> K::Elem {
        self.0.one(x)
    }
    fn join(&self, a: &K::Elem, b: &K::Elem) -> K::Elem {
        self.0.join(a, b)
    }
    fn seq(&self, a: &K::Elem, b: &K::Elem) -> K::Elem {
        self.0.seq(a, b)
    }
    fn star(&self, a: &K::Elem) -> K::Elem {
        a.clone()
    }
}

// ---------------------------------------------------------------------------
// matrices

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MatError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not square: {rows}×{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// A matrix over a Kleene algebra. Entry `(i, j)` is a morphism from the
/// `i`-th row object to the `j`-th column object, so a matrix is a morphism
/// from the sum of its row objects to the sum of its column objects and
/// composition is `(M;N)(i,k) = ⊔_j M(i,j);N(j,k)`.
pub struct Mat<K: KleeneAlgebra> {
    rows: Vec<K::Obj>,
    cols: Vec<K::Obj>,
    entries: Vec<K::Elem>,
}

impl<K: KleeneAlgebra> Clone for Mat<K> {
    fn clone(&self) -> Self {
        Mat { rows: self.rows.clone(), cols: self.cols.clone(), entries: self.entries.clone() }
    }
}

impl<K: KleeneAlgebra> PartialEq for Mat<K> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.entries == other.entries
    }
}

impl<K: KleeneAlgebra> fmt::Debug for Mat<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.nrows() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.debug_list().entries((0..self.ncols()).map(|j| self.get(i, j))).finish()?;
        }
        f.write_str("]")
    }
}

impl<K: KleeneAlgebra> Mat<K> {
    pub fn from_fn(rows: Vec<K::Obj>, cols: Vec<K::Obj>, mut f: impl FnMut(usize, usize) -> K::Elem) -> Mat<K> {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for i in 0..rows.len() {
            for j in 0..cols.len() {
                entries.push(f(i, j));
            }
        }
        Mat { rows, cols, entries }
    }

    pub fn zero(ka: &K, rows: &[K::Obj], cols: &[K::Obj]) -> Mat<K> {
        Mat::from_fn(rows.to_vec(), cols.to_vec(), |i, j| ka.zero(&rows[i], &cols[j]))
    }

    pub fn identity(ka: &K, objs: &[K::Obj]) -> Mat<K> {
        Mat::from_fn(
            objs.to_vec(),
            objs.to_vec(),
            |i, j| {
                if i == j {
                    ka.one(&objs[i])
                } else {
                    ka.zero(&objs[i], &objs[j])
                }
            },
        )
    }

    pub fn rows(&self) -> &[K::Obj] {
        &self.rows
    }

    pub fn cols(&self) -> &[K::Obj] {
        &self.cols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &K::Elem {
        &self.entries[i * self.cols.len() + j]
    }

    pub fn compose(&self, ka: &K, other: &Mat<K>) -> Result<Mat<K>, MatError> {
        if self.cols != other.rows {
            return Err(MatError::ShapeMismatch(format!(
                "{}×{} ; {}×{}",
                self.nrows(),
                self.ncols(),
                other.nrows(),
                other.ncols()
            )));
        }
        Ok(Mat::from_fn(self.rows.clone(), other.cols.clone(), |i, k| {
            (0..self.ncols()).fold(ka.zero(&self.rows[i], &other.cols[k]), |acc, j| {
                ka.join(&acc, &ka.seq(self.get(i, j), other.get(j, k)))
            })
        }))
    }

    pub fn join(&self, ka: &K, other: &Mat<K>) -> Result<Mat<K>, MatError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatError::ShapeMismatch("join of differently shaped matrices".into()));
        }
        Ok(Mat::from_fn(self.rows.clone(), self.cols.clone(), |i, j| ka.join(self.get(i, j), other.get(i, j))))
    }

    /// Sub-matrix of the given row and column ranges.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Mat<K> {
        let (r0, c0) = (rows.start, cols.start);
        Mat::from_fn(self.rows[rows].to_vec(), self.cols[cols].to_vec(), |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// `[self | other]`: same rows, columns concatenated (pairing).
    pub fn hstack(&self, other: &Mat<K>) -> Result<Mat<K>, MatError> {
        if self.rows != other.rows {
            return Err(MatError::ShapeMismatch("hstack with different row objects".into()));
        }
        let n = self.ncols();
        Ok(Mat::from_fn(self.rows.clone(), [self.cols.clone(), other.cols.clone()].concat(), |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else {
                other.get(i, j - n).clone()
            }
        }))
    }

    /// `[self / other]`: same columns, rows concatenated (copairing).
    pub fn vstack(&self, other: &Mat<K>) -> Result<Mat<K>, MatError> {
        if self.cols != other.cols {
            return Err(MatError::ShapeMismatch("vstack with different column objects".into()));
        }
        let n = self.nrows();
        Ok(Mat::from_fn([self.rows.clone(), other.rows.clone()].concat(), self.cols.clone(), |i, j| {
            if i < n {
                self.get(i, j).clone()
            } else {
                other.get(i - n, j).clone()
            }
        }))
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, ka: &K, other: &Mat<K>) -> Mat<K> {
        let (n, m) = (self.nrows(), self.ncols());
        let rows = [self.rows.clone(), other.rows.clone()].concat();
        let cols = [self.cols.clone(), other.cols.clone()].concat();
        Mat::from_fn(rows.clone(), cols.clone(), |i, j| match (i < n, j < m) {
            (true, true) => self.get(i, j).clone(),
            (false, false) => other.get(i - n, j - m).clone(),
            _ => ka.zero(&rows[i], &cols[j]),
        })
    }

    /// Star by 2×2 block recursion, splitting at `⌈n/2⌉`:
    /// with `F = (A ⊔ B;D*;C)*`,
    /// `[[A,B],[C,D]]* = [[F, F;B;D*], [D*;C;F, D* ⊔ D*;C;F;B;D*]]`.
    pub fn star(&self, ka: &K) -> Result<Mat<K>, MatError> {
        if self.rows != self.cols {
            return Err(MatError::NotSquare { rows: self.nrows(), cols: self.ncols() });
        }
        let n = self.nrows();
        match n {
            0 => return Ok(self.clone()),
            1 => return Ok(Mat::from_fn(self.rows.clone(), self.cols.clone(), |_, _| ka.star(self.get(0, 0)))),
            _ => {}
        }
        let k = n.div_ceil(2);
        let a = self.block(0..k, 0..k);
        let b = self.block(0..k, k..n);
        let c = self.block(k..n, 0..k);
        let d = self.block(k..n, k..n);
        let ds = d.star(ka)?;
        let f = a.join(ka, &b.compose(ka, &ds)?.compose(ka, &c)?)?.star(ka)?;
        let top_right = f.compose(ka, &b)?.compose(ka, &ds)?;
        let bottom_left = ds.compose(ka, &c)?.compose(ka, &f)?;
        let bottom_right = ds.join(ka, &bottom_left.compose(ka, &b)?.compose(ka, &ds)?)?;
        f.hstack(&top_right)?.vstack(&bottom_left.hstack(&bottom_right)?)
    }
}

/// `Mat(K)` as a typed Kleene algebra whose objects are lists of objects
/// of `K`. Shape errors panic.
#[derive(Clone, Copy, Debug, Default)]
pub struct MatKa<K>(pub K);

impl<K: KleeneAlgebra> KleeneAlgebra for MatKa<K> {
    type Obj = Vec<K::Obj>;
    type Elem = Mat<K>;

    fn zero(&self, dom: &Vec<K::Obj>, cod: &Vec<K::Obj>) -> Mat<K> {
        Mat::zero(&self.0, dom, cod)
    }
    fn one(&self, x: &Vec<K::Obj>) -> Mat<K> {
        Mat::identity(&self.0, x)
    }
    fn join(&self, a: &Mat<K>, b: &Mat<K>) -> Mat<K> {
        a.join(&self.0, b).expect("matrices of equal shape")
    }
    fn seq(&self, a: &Mat<K>, b: &Mat<K>) -> Mat<K> {
        a.compose(&self.0, b).expect("composable matrices")
    }
    fn star(&self, a: &Mat<K>) -> Mat<K> {
        a.star(&self.0).expect("square matrix")
    }
}

/// Boolean `n×n` matrix as a relation on `{0..n-1}`.
pub fn bool_mat_to_rel(m: &Mat<BoolKa>) -> FinRel {
    let dom = Carrier::of_sort("A", m.nrows());
    let cod = Carrier::of_sort("A", m.ncols());
    let mut r = FinRel::empty(&dom, &cod);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if *m.get(i, j) {
                r.insert(i, j);
            }
        }
    }
    r
}

/// Adjacency matrix of a relation.
pub fn rel_to_bool_mat(r: &FinRel) -> Mat<BoolKa> {
    Mat::from_fn(vec![(); r.dom().size()], vec![(); r.cod().size()], |i, j| r.contains(i, j))
}

// ---------------------------------------------------------------------------
// the law harness

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawFailure {
    pub law: String,
    pub witness: String,
}

/// Outcome of a law sweep: how many instances were checked and the first
/// failure of each failing law, in the order the laws are listed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub checked: usize,
    pub failures: Vec<LawFailure>,
}

impl LawReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first(&self) -> Option<&LawFailure> {
        self.failures.first()
    }

    /// Records a failure unless the law already failed.
    pub fn fail(&mut self, law: &str, witness: impl FnOnce() -> String) {
        if !self.failures.iter().any(|f| f.law == law) {
            self.failures.push(LawFailure { law: law.to_string(), witness: witness() });
        }
    }

    pub fn merge(&mut self, other: LawReport) {
        self.checked += other.checked;
        for f in other.failures {
            if !self.failures.iter().any(|g| g.law == f.law) {
                self.failures.push(f);
            }
        }
    }
}

/// Least `x` above `seed` with `f;x ≤ x` (left) or `x;f ≤ x` (right),
/// computed by iterating joins; `None` if it does not stabilise quickly.
fn closure<K: KleeneAlgebra>(ka: &K, f: &K::Elem, seed: &K::Elem, left: bool) -> Option<K::Elem> {
    let mut x = seed.clone();
    for _ in 0..256 {
        let step = if left { ka.seq(f, &x) } else { ka.seq(&x, f) };
        let next = ka.join(&x, &step);
        if next == x {
            return Some(x);
        }
        x = next;
    }
    None
}

/// Law names, in checking order.
pub const KA_LAWS: &[&str] = &[
    "f ⊔ (g ⊔ h) = (f ⊔ g) ⊔ h",
    "f ⊔ g = g ⊔ f",
    "f ⊔ 0 = f",
    "f ⊔ f = f",
    "f;(g;h) = (f;g);h",
    "id;f = f",
    "f;id = f",
    "f;(g ⊔ h) = f;g ⊔ f;h",
    "(f ⊔ g);h = f;h ⊔ g;h",
    "f;0 = 0",
    "0;f = 0",
    "id ⊔ f;f* ≤ f*",
    "id ⊔ f*;f ≤ f*",
    "f;r ≤ r ⇒ f*;r ≤ r",
    "l;f ≤ l ⇒ l;f* ≤ l",
    "id ⊔ f;f* = f*",
    "id ⊔ f*;f = f*",
    "(f ⊔ g)* = (f*;g)*;f*",
];

/// Checks the Kleene algebra laws on each triple of endomorphisms of `x`.
pub fn check_ka_laws_on<K: KleeneAlgebra>(
    ka: &K,
    x: &K::Obj,
    triples: impl IntoIterator<Item = (K::Elem, K::Elem, K::Elem)>,
) -> LawReport {
    let mut rep = LawReport::default();
    let id = ka.one(x);
    let zero = ka.zero(x, x);
    for (f, g, h) in triples {
        rep.checked += 1;
        let w1 = || format!("f = {f:?}");
        let w3 = || format!("f = {f:?}, g = {g:?}, h = {h:?}");
        let eqs: [(&str, K::Elem, K::Elem, bool); 11] = [
            (KA_LAWS[0], ka.join(&f, &ka.join(&g, &h)), ka.join(&ka.join(&f, &g), &h), true),
            (KA_LAWS[1], ka.join(&f, &g), ka.join(&g, &f), true),
            (KA_LAWS[2], ka.join(&f, &zero), f.clone(), false),
            (KA_LAWS[3], ka.join(&f, &f), f.clone(), false),
            (KA_LAWS[4], ka.seq(&f, &ka.seq(&g, &h)), ka.seq(&ka.seq(&f, &g), &h), true),
            (KA_LAWS[5], ka.seq(&id, &f), f.clone(), false),
            (KA_LAWS[6], ka.seq(&f, &id), f.clone(), false),
            (KA_LAWS[7], ka.seq(&f, &ka.join(&g, &h)), ka.join(&ka.seq(&f, &g), &ka.seq(&f, &h)), true),
            (KA_LAWS[8], ka.seq(&ka.join(&f, &g), &h), ka.join(&ka.seq(&f, &h), &ka.seq(&g, &h)), true),
            (KA_LAWS[9], ka.seq(&f, &zero), zero.clone(), false),
            (KA_LAWS[10], ka.seq(&zero, &f), zero.clone(), false),
        ];
        for (law, l, r, three) in eqs {
            if l != r {
                rep.fail(law, || if three { w3() } else { w1() });
            }
        }
        let fs = ka.star(&f);
        if !ka.leq(&ka.join(&id, &ka.seq(&f, &fs)), &fs) {
            rep.fail(KA_LAWS[11], w1);
        }
        if !ka.leq(&ka.join(&id, &ka.seq(&fs, &f)), &fs) {
            rep.fail(KA_LAWS[12], w1);
        }
        // implications: test both the raw sample and its closure so the
        // premise is actually exercised
        for r in [Some(g.clone()), closure(ka, &f, &g, true)].into_iter().flatten() {
            if ka.leq(&ka.seq(&f, &r), &r) && !ka.leq(&ka.seq(&fs, &r), &r) {
                rep.fail(KA_LAWS[13], || format!("f = {f:?}, r = {r:?}"));
            }
        }
        for l in [Some(h.clone()), closure(ka, &f, &h, false)].into_iter().flatten() {
            if ka.leq(&ka.seq(&l, &f), &l) && !ka.leq(&ka.seq(&l, &fs), &l) {
                rep.fail(KA_LAWS[14], || format!("f = {f:?}, l = {l:?}"));
            }
        }
        if ka.join(&id, &ka.seq(&f, &fs)) != fs {
            rep.fail(KA_LAWS[15], w1);
        }
        if ka.join(&id, &ka.seq(&fs, &f)) != fs {
            rep.fail(KA_LAWS[16], w1);
        }
        let lhs = ka.star(&ka.join(&f, &g));
        let rhs = ka.seq(&ka.star(&ka.seq(&fs, &g)), &fs);
        if lhs != rhs {
            rep.fail(KA_LAWS[17], || format!("f = {f:?}, g = {g:?}"));
        }
    }
    rep
}

/// Samples `samples` triples with `gen` and checks them.
pub fn check_ka_laws<K: KleeneAlgebra, R: Rng>(
    ka: &K,
    x: &K::Obj,
    samples: usize,
    rng: &mut R,
    mut gen: impl FnMut(&mut R) -> K::Elem,
) -> LawReport {
    let triples: Vec<_> = (0..samples).map(|_| (gen(rng), gen(rng), gen(rng))).collect();
    check_ka_laws_on(ka, x, triples)
}
