//! Finite carriers of polynomial shape and relations between them: the
//! kc-rig structure of `Rel`.
//!
//! A carrier of shape `⊕ᵢ ⊗ⱼ Aᵢⱼ` enumerates its elements branch-major, then
//! tuple-lexicographically (first factor most significant); branches are
//! numbered from 0. Relations are dense bit matrices indexed by that
//! enumeration, so iteration order is the canonical sorted pair order.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::RelError;
use crate::poly::{Monomial, Polynomial, Sort};

#[derive(PartialEq, Eq, Hash)]
struct CarrierInner {
    shape: Polynomial,
    dims: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    size: usize,
}

/// The finite set interpreting a polynomial.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Carrier(Arc<CarrierInner>);

impl Carrier {
    /// Builds a carrier from a shape and the sizes of its factors, branch by
    /// branch.
    pub fn from_dims(shape: Polynomial, dims: Vec<Vec<usize>>) -> Carrier {
        assert_eq!(shape.len(), dims.len(), "one dimension list per summand");
        let mut offsets = Vec::with_capacity(dims.len());
        let mut size = 0;
        for (u, d) in shape.summands().iter().zip(&dims) {
            assert_eq!(u.len(), d.len(), "one size per factor");
            offsets.push(size);
            size += d.iter().product::<usize>();
        }
        Carrier(Arc::new(CarrierInner { shape, dims, offsets, size }))
    }

    /// Interprets `shape` with the given sort sizes.
    pub fn new(shape: &Polynomial, size_of: impl Fn(&Sort) -> usize) -> Carrier {
        let dims = shape.summands().iter().map(|u| u.factors().iter().map(&size_of).collect()).collect();
        Carrier::from_dims(shape.clone(), dims)
    }

    /// A single sort with `n` elements.
    pub fn of_sort(name: &str, n: usize) -> Carrier {
        Carrier::from_dims(Sort::new(name).into(), vec![vec![n]])
    }

    pub fn zero() -> Carrier {
        Carrier::from_dims(Polynomial::zero(), vec![])
    }

    pub fn one() -> Carrier {
        Carrier::from_dims(Polynomial::one(), vec![vec![]])
    }

    pub fn shape(&self) -> &Polynomial {
        &self.0.shape
    }

    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn branches(&self) -> usize {
        self.0.dims.len()
    }

    pub fn branch_dims(&self, b: usize) -> &[usize] {
        &self.0.dims[b]
    }

    pub fn branch_size(&self, b: usize) -> usize {
        self.0.dims[b].iter().product()
    }

    pub fn offset(&self, b: usize) -> usize {
        self.0.offsets[b]
    }

    /// `X ⊕ Y`.
    pub fn sum(&self, other: &Carrier) -> Carrier {
        let mut dims = self.0.dims.clone();
        dims.extend(other.0.dims.iter().cloned());
        Carrier::from_dims(self.shape().sum(other.shape()), dims)
    }

    /// `X ⊗ Y` (i-major branches).
    pub fn tensor(&self, other: &Carrier) -> Carrier {
        let mut dims = Vec::new();
        for a in &self.0.dims {
            for b in &other.0.dims {
                let mut d = a.clone();
                d.extend(b.iter().copied());
                dims.push(d);
            }
        }
        Carrier::from_dims(self.shape().product(other.shape()), dims)
    }

    /// Splits after the first `k` branches.
    pub fn split_at(&self, k: usize) -> (Carrier, Carrier) {
        let (s1, s2) = self.shape().split_at(k);
        let (d1, d2) = self.0.dims.split_at(k);
        (Carrier::from_dims(s1, d1.to_vec()), Carrier::from_dims(s2, d2.to_vec()))
    }

    /// Index of the element `(branch, tuple)`.
    pub fn encode(&self, branch: usize, tuple: &[usize]) -> Result<usize, RelError> {
        let dims = self.0.dims.get(branch).ok_or_else(|| RelError::OutOfRange(format!("branch {branch}")))?;
        if dims.len() != tuple.len() || tuple.iter().zip(dims).any(|(v, d)| v >= d) {
            return Err(RelError::OutOfRange(format!("{tuple:?} in branch {branch}")));
        }
        let local = tuple.iter().zip(dims).fold(0, |acc, (v, d)| acc * d + v);
        Ok(self.0.offsets[branch] + local)
    }

    /// `(branch, tuple)` of an element index.
    pub fn decode(&self, idx: usize) -> (usize, Vec<usize>) {
        assert!(idx < self.size(), "element {idx} out of range");
        let b = self.0.offsets.partition_point(|&o| o <= idx) - 1;
        // empty branches share an offset with their successor; pick the nonempty one
        let b = (b..self.branches())
            .find(|&b| idx < self.offset(b) + self.branch_size(b))
            .expect("element lies in some branch");
        let mut local = idx - self.offset(b);
        let dims = &self.0.dims[b];
        let mut tuple = vec![0; dims.len()];
        for (slot, d) in tuple.iter_mut().zip(dims).rev() {
            *slot = local % d;
            local /= d;
        }
        (b, tuple)
    }

    /// Human-readable element: `•` for the empty tuple, `3` for a single
    /// factor, `(0,1)` otherwise, prefixed by `i:` on multi-branch carriers.
    pub fn show(&self, idx: usize) -> String {
        let (b, t) = self.decode(idx);
        let body = match t.as_slice() {
            [] => "•".to_string(),
            [x] => x.to_string(),
            xs => format!("({})", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
        };
        if self.branches() > 1 {
            format!("{b}:{body}")
        } else {
            body
        }
    }

    /// Table mapping `(x, y)` to the index of `x ⊗ y` in `self ⊗ other`.
    fn pairing(&self, other: &Carrier) -> Vec<usize> {
        let nb = other.branches();
        let mut table = vec![0; self.size() * other.size()];
        let mut prod_offset = 0;
        let mut offsets = vec![0; self.branches() * nb];
        for b1 in 0..self.branches() {
            for b2 in 0..nb {
                offsets[b1 * nb + b2] = prod_offset;
                prod_offset += self.branch_size(b1) * other.branch_size(b2);
            }
        }
        for b1 in 0..self.branches() {
            for l1 in 0..self.branch_size(b1) {
                let x = self.offset(b1) + l1;
                for b2 in 0..nb {
                    let s2 = other.branch_size(b2);
                    for l2 in 0..s2 {
                        let y = other.offset(b2) + l2;
                        table[x * other.size() + y] = offsets[b1 * nb + b2] + l1 * s2 + l2;
                    }
                }
            }
        }
        table
    }
}

impl fmt::Debug for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟦{}⟧{:?}", self.shape(), self.0.dims)
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (size {})", self.shape(), self.size())
    }
}

/// A relation between two carriers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinRel {
    dom: Carrier,
    cod: Carrier,
    stride: usize,
    bits: Vec<u64>,
}

/// The eight (co)monoid generators of `Rel`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Copier,
    Discharger,
    Cocopier,
    Codischarger,
    Diag,
    Bang,
    Codiag,
    Cobang,
}

/// Properties of arrows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArrowProperty {
    /// single valued
    Sv,
    /// total
    Tot,
    /// injective
    Inj,
    /// surjective
    Sur,
    /// reflexive
    Ref,
    /// transitive
    Trn,
    /// symmetric
    Sym,
    /// coreflexive
    Cor,
}

impl ArrowProperty {
    pub const ALL: [ArrowProperty; 8] = [
        ArrowProperty::Sv,
        ArrowProperty::Tot,
        ArrowProperty::Inj,
        ArrowProperty::Sur,
        ArrowProperty::Ref,
        ArrowProperty::Trn,
        ArrowProperty::Sym,
        ArrowProperty::Cor,
    ];

    pub fn needs_endo(self) -> bool {
        matches!(self, ArrowProperty::Ref | ArrowProperty::Trn | ArrowProperty::Sym | ArrowProperty::Cor)
    }
}

/// The four blocks of `f : S ⊕ X → T ⊕ Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocks {
    pub st: FinRel,
    pub sy: FinRel,
    pub xt: FinRel,
    pub xy: FinRel,
}

fn mismatch(a: &Carrier, b: &Carrier) -> RelError {
    RelError::CarrierMismatch { left: format!("{a:?}"), right: format!("{b:?}") }
}

impl FinRel {
    pub fn empty(dom: &Carrier, cod: &Carrier) -> FinRel {
        let stride = cod.size().div_ceil(64);
        FinRel { dom: dom.clone(), cod: cod.clone(), stride, bits: vec![0; stride * dom.size()] }
    }

    pub fn identity(x: &Carrier) -> FinRel {
        let mut r = FinRel::empty(x, x);
        for i in 0..x.size() {
            r.insert(i, i);
        }
        r
    }

    pub fn full(dom: &Carrier, cod: &Carrier) -> FinRel {
        let mut r = FinRel::empty(dom, cod);
        for i in 0..dom.size() {
            for j in 0..cod.size() {
                r.insert(i, j);
            }
        }
        r
    }

    pub fn from_pairs(
        dom: &Carrier,
        cod: &Carrier,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<FinRel, RelError> {
        let mut r = FinRel::empty(dom, cod);
        for (i, j) in pairs {
            if i >= dom.size() || j >= cod.size() {
                return Err(RelError::OutOfRange(format!("({i},{j})")));
            }
            r.insert(i, j);
        }
        Ok(r)
    }

    /// The relation whose pair `(i, j)` is present iff bit `i·|cod| + j` of
    /// `mask` is set.
    pub fn from_mask(dom: &Carrier, cod: &Carrier, mask: u128) -> FinRel {
        let m = cod.size();
        let mut r = FinRel::empty(dom, cod);
        for i in 0..dom.size() {
            for j in 0..m {
                if (mask >> (i * m + j)) & 1 == 1 {
                    r.insert(i, j);
                }
            }
        }
        r
    }

    /// Each pair present independently with probability `density`.
    pub fn random<R: Rng + ?Sized>(dom: &Carrier, cod: &Carrier, density: f64, rng: &mut R) -> FinRel {
        let mut r = FinRel::empty(dom, cod);
        for i in 0..dom.size() {
            for j in 0..cod.size() {
                if rng.gen_bool(density) {
                    r.insert(i, j);
                }
            }
        }
        r
    }

    /// The graph of a function given as a lookup table.
    pub fn graph(dom: &Carrier, cod: &Carrier, f: impl Fn(usize) -> usize) -> FinRel {
        let mut r = FinRel::empty(dom, cod);
        for i in 0..dom.size() {
            r.insert(i, f(i));
        }
        r
    }

    pub fn dom(&self) -> &Carrier {
        &self.dom
    }

    pub fn cod(&self) -> &Carrier {
        &self.cod
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        (self.bits[i * self.stride + j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.bits[i * self.stride + j / 64] |= 1 << (j % 64);
    }

    pub fn remove(&mut self, i: usize, j: usize) {
        self.bits[i * self.stride + j / 64] &= !(1 << (j % 64));
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    fn row_iter(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            })
        })
    }

    /// All pairs in canonical (row-major) order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dom.size()).flat_map(move |i| self.row_iter(i).map(move |j| (i, j)))
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    fn same_type(&self, other: &FinRel) -> Result<(), RelError> {
        if self.dom != other.dom {
            return Err(mismatch(&self.dom, &other.dom));
        }
        if self.cod != other.cod {
            return Err(mismatch(&self.cod, &other.cod));
        }
        Ok(())
    }

    /// `R ; S`.
    pub fn compose(&self, other: &FinRel) -> Result<FinRel, RelError> {
        if self.cod != other.dom {
            return Err(mismatch(&self.cod, &other.dom));
        }
        let mut out = FinRel::empty(&self.dom, &other.cod);
        for i in 0..self.dom.size() {
            for j in self.row_iter(i) {
                let src = other.row(j);
                let dst = &mut out.bits[i * out.stride..(i + 1) * out.stride];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d |= s;
                }
            }
        }
        Ok(out)
    }

    /// `R ∪ S`.
    pub fn union(&self, other: &FinRel) -> Result<FinRel, RelError> {
        self.same_type(other)?;
        let mut out = self.clone();
        out.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a |= b);
        Ok(out)
    }

    /// `R ∩ S`.
    pub fn intersection(&self, other: &FinRel) -> Result<FinRel, RelError> {
        self.same_type(other)?;
        let mut out = self.clone();
        out.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a &= b);
        Ok(out)
    }

    /// `R ⊆ S`.
    pub fn is_subset(&self, other: &FinRel) -> Result<bool, RelError> {
        self.same_type(other)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0))
    }

    /// Least pair of `self` missing from `other`, in canonical order.
    pub fn first_missing(&self, other: &FinRel) -> Result<Option<(usize, usize)>, RelError> {
        self.same_type(other)?;
        Ok(self.pairs().find(|&(i, j)| !other.contains(i, j)))
    }

    /// `R†`.
    pub fn converse(&self) -> FinRel {
        let mut out = FinRel::empty(&self.cod, &self.dom);
        for (i, j) in self.pairs() {
            out.insert(j, i);
        }
        out
    }

    /// `R ⊗ S` on the product carriers.
    pub fn tensor(&self, other: &FinRel) -> FinRel {
        let dom = self.dom.tensor(&other.dom);
        let cod = self.cod.tensor(&other.cod);
        let pd = self.dom.pairing(&other.dom);
        let pc = self.cod.pairing(&other.cod);
        let (n2, m2) = (other.dom.size(), other.cod.size());
        let mut out = FinRel::empty(&dom, &cod);
        for (x1, y1) in self.pairs() {
            for (x2, y2) in other.pairs() {
                out.insert(pd[x1 * n2 + x2], pc[y1 * m2 + y2]);
            }
        }
        out
    }

    /// `R ⊕ S`: left pairs keep their indices, right pairs are shifted past
    /// the left carriers.
    pub fn sum(&self, other: &FinRel) -> FinRel {
        let dom = self.dom.sum(&other.dom);
        let cod = self.cod.sum(&other.cod);
        let (dn, cn) = (self.dom.size(), self.cod.size());
        let mut out = FinRel::empty(&dom, &cod);
        for (i, j) in self.pairs() {
            out.insert(i, j);
        }
        for (i, j) in other.pairs() {
            out.insert(dn + i, cn + j);
        }
        out
    }

    /// One of the eight (co)monoid relations on `x`.
    pub fn generator(kind: GeneratorKind, x: &Carrier) -> FinRel {
        match kind {
            GeneratorKind::Copier => {
                let xx = x.tensor(x);
                let p = x.pairing(x);
                FinRel::graph(x, &xx, |i| p[i * x.size() + i])
            }
            GeneratorKind::Cocopier => FinRel::generator(GeneratorKind::Copier, x).converse(),
            GeneratorKind::Discharger => FinRel::full(x, &Carrier::one()),
            GeneratorKind::Codischarger => FinRel::full(&Carrier::one(), x),
            GeneratorKind::Diag => {
                let xx = x.sum(x);
                let mut r = FinRel::empty(x, &xx);
                for i in 0..x.size() {
                    r.insert(i, i);
                    r.insert(i, x.size() + i);
                }
                r
            }
            GeneratorKind::Codiag => FinRel::generator(GeneratorKind::Diag, x).converse(),
            GeneratorKind::Bang => FinRel::empty(x, &Carrier::zero()),
            GeneratorKind::Cobang => FinRel::empty(&Carrier::zero(), x),
        }
    }

    /// `σ⊗_{X,Y} : X⊗Y → Y⊗X`.
    pub fn symmetry_tensor(x: &Carrier, y: &Carrier) -> FinRel {
        let pxy = x.pairing(y);
        let pyx = y.pairing(x);
        let mut r = FinRel::empty(&x.tensor(y), &y.tensor(x));
        for a in 0..x.size() {
            for b in 0..y.size() {
                r.insert(pxy[a * y.size() + b], pyx[b * x.size() + a]);
            }
        }
        r
    }

    /// `σ⊕_{X,Y} : X⊕Y → Y⊕X`.
    pub fn symmetry_sum(x: &Carrier, y: &Carrier) -> FinRel {
        let (n, m) = (x.size(), y.size());
        let mut r = FinRel::empty(&x.sum(y), &y.sum(x));
        for a in 0..n {
            r.insert(a, m + a);
        }
        for b in 0..m {
            r.insert(n + b, b);
        }
        r
    }

    /// `δˡ_{X,Y,Z} : X⊗(Y⊕Z) → X⊗Y ⊕ X⊗Z`.
    pub fn distributor(x: &Carrier, y: &Carrier, z: &Carrier) -> FinRel {
        let yz = y.sum(z);
        let src = x.pairing(&yz);
        let py = x.pairing(y);
        let pz = x.pairing(z);
        let xy_size = x.size() * y.size();
        let cod = x.tensor(y).sum(&x.tensor(z));
        let mut r = FinRel::empty(&x.tensor(&yz), &cod);
        for a in 0..x.size() {
            for w in 0..yz.size() {
                let tgt = if w < y.size() { py[a * y.size() + w] } else { xy_size + pz[a * z.size() + (w - y.size())] };
                r.insert(src[a * yz.size() + w], tgt);
            }
        }
        r
    }

    fn endo(&self) -> Result<(), RelError> {
        if self.dom != self.cod {
            return Err(RelError::NotEndo { dom: format!("{:?}", self.dom), cod: format!("{:?}", self.cod) });
        }
        Ok(())
    }

    /// Reflexive-transitive closure, as the least fixpoint of `T ↦ id ∪ R;T`.
    pub fn star(&self) -> Result<FinRel, RelError> {
        self.endo()?;
        let id = FinRel::identity(&self.dom);
        let mut t = id.clone();
        loop {
            let next = id.union(&self.compose(&t)?)?;
            if next == t {
                return Ok(t);
            }
            t = next;
        }
    }

    /// Splits `f : S ⊕ X → T ⊕ Y` where `S`, `T` are the given prefixes of
    /// the domain and codomain shapes.
    pub fn blocks(&self, s: &Polynomial, t: &Polynomial) -> Result<Blocks, RelError> {
        if !self.dom.shape().starts_with(s) || !self.cod.shape().starts_with(t) {
            return Err(RelError::ShapeMismatch(format!(
                "{} → {} does not split as {s} ⊕ _ → {t} ⊕ _",
                self.dom.shape(),
                self.cod.shape()
            )));
        }
        let (sc, xc) = self.dom.split_at(s.len());
        let (tc, yc) = self.cod.split_at(t.len());
        let (ns, nt) = (sc.size(), tc.size());
        let mut b = Blocks {
            st: FinRel::empty(&sc, &tc),
            sy: FinRel::empty(&sc, &yc),
            xt: FinRel::empty(&xc, &tc),
            xy: FinRel::empty(&xc, &yc),
        };
        for (i, j) in self.pairs() {
            match (i < ns, j < nt) {
                (true, true) => b.st.insert(i, j),
                (true, false) => b.sy.insert(i, j - nt),
                (false, true) => b.xt.insert(i - ns, j),
                (false, false) => b.xy.insert(i - ns, j - nt),
            }
        }
        Ok(b)
    }

    /// Trace over the first summands `s` of both domain and codomain:
    /// `tr_S f = f_XS ; f_SS* ; f_SY ∪ f_XY`.
    pub fn trace(&self, s: &Polynomial) -> Result<FinRel, RelError> {
        let (ds, _) = self.dom.split_at(s.len().min(self.dom.branches()));
        let (cs, _) = self.cod.split_at(s.len().min(self.cod.branches()));
        if !self.dom.shape().starts_with(s) || !self.cod.shape().starts_with(s) || ds != cs {
            return Err(RelError::TraceShapeMismatch(format!(
                "cannot trace {s} out of {} → {}",
                self.dom.shape(),
                self.cod.shape()
            )));
        }
        let b = self.blocks(s, s)?;
        b.xt.compose(&b.st.star()?)?.compose(&b.sy)?.union(&b.xy)
    }

    /// Reassembles a relation from its four blocks.
    pub fn recompose(b: &Blocks) -> Result<FinRel, RelError> {
        if b.st.dom != b.sy.dom {
            return Err(mismatch(&b.st.dom, &b.sy.dom));
        }
        if b.xt.dom != b.xy.dom {
            return Err(mismatch(&b.xt.dom, &b.xy.dom));
        }
        if b.st.cod != b.xt.cod {
            return Err(mismatch(&b.st.cod, &b.xt.cod));
        }
        if b.sy.cod != b.xy.cod {
            return Err(mismatch(&b.sy.cod, &b.xy.cod));
        }
        let dom = b.st.dom.sum(&b.xt.dom);
        let cod = b.st.cod.sum(&b.sy.cod);
        let (ns, nt) = (b.st.dom.size(), b.st.cod.size());
        let mut f = FinRel::empty(&dom, &cod);
        b.st.pairs().for_each(|(i, j)| f.insert(i, j));
        b.sy.pairs().for_each(|(i, j)| f.insert(i, nt + j));
        b.xt.pairs().for_each(|(i, j)| f.insert(ns + i, j));
        b.xy.pairs().for_each(|(i, j)| f.insert(ns + i, nt + j));
        Ok(f)
    }

    /// Checks a property by its direct set-theoretic definition.
    pub fn has_property(&self, p: ArrowProperty) -> Result<bool, RelError> {
        if p.needs_endo() {
            self.endo()?;
        }
        let n = self.dom.size();
        Ok(match p {
            ArrowProperty::Sv => (0..n).all(|i| self.row_iter(i).count() <= 1),
            ArrowProperty::Tot => (0..n).all(|i| self.row_iter(i).next().is_some()),
            ArrowProperty::Inj => self.converse().has_property(ArrowProperty::Sv)?,
            ArrowProperty::Sur => self.converse().has_property(ArrowProperty::Tot)?,
            ArrowProperty::Ref => (0..n).all(|i| self.contains(i, i)),
            ArrowProperty::Trn => self.pairs().all(|(x, y)| self.row_iter(y).all(|z| self.contains(x, z))),
            ArrowProperty::Sym => self.pairs().all(|(x, y)| self.contains(y, x)),
            ArrowProperty::Cor => self.pairs().all(|(x, y)| x == y),
        })
    }

    /// Checks a property through its adjoint / inequational formulation
    /// (e.g. single-valued iff `f†;f ≤ id`).
    pub fn has_property_adjoint(&self, p: ArrowProperty) -> Result<bool, RelError> {
        if p.needs_endo() {
            self.endo()?;
        }
        let id_x = FinRel::identity(&self.dom);
        let id_y = FinRel::identity(&self.cod);
        let op = self.converse();
        match p {
            ArrowProperty::Sv => op.compose(self)?.is_subset(&id_y),
            ArrowProperty::Tot => id_x.is_subset(&self.compose(&op)?),
            ArrowProperty::Inj => self.compose(&op)?.is_subset(&id_x),
            ArrowProperty::Sur => id_y.is_subset(&op.compose(self)?),
            ArrowProperty::Ref => id_x.is_subset(self),
            ArrowProperty::Trn => self.compose(self)?.is_subset(self),
            ArrowProperty::Sym => op.is_subset(self),
            ArrowProperty::Cor => self.is_subset(&id_x),
        }
    }

    /// Pairs rendered with element names, e.g. `{(0,1),(1,2)}`.
    pub fn show(&self) -> String {
        let items: Vec<String> =
            self.pairs().map(|(i, j)| format!("({},{})", self.dom.show(i), self.cod.show(j))).collect();
        format!("{{{}}}", items.join(","))
    }
}

impl fmt::Debug for FinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {:?} → {:?}", self.show(), self.dom, self.cod)
    }
}

impl fmt::Display for FinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.show())
    }
}

/// Convenience: carrier of a monomial under given sizes.
pub fn monomial_carrier(u: &Monomial, size_of: impl Fn(&Sort) -> usize) -> Carrier {
    Carrier::new(&u.clone().into(), size_of)
}
