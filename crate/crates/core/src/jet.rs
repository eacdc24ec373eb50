//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] stores every Taylor coefficient of total degree `<= order` of a
//! function of `nvars` variables at a seed point, densely and in graded
//! order. Coefficients are `f(x) = sum_alpha c_alpha (x - x0)^alpha`, so the
//! mixed partial derivative at the seed point is `c_alpha * alpha!`.
//!
//! Real and complex jets share one representation; a real-kind jet keeps a
//! zero imaginary part in every coefficient.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Largest total order the kernel builds layouts for.
pub const MAX_ORDER: usize = 12;

/// Constant terms at or below this magnitude make a jet non-invertible.
pub const SINGULAR_THRESHOLD: f64 = 1e-13;

/// Distance from the negative real axis below which complex branch
/// functions refuse to pick a branch.
pub const BRANCH_CUT_THRESHOLD: f64 = 1e-12;

const MAX_VARS: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("unsupported jet shape: order {order} in {nvars} variables")]
    UnsupportedShape { order: usize, nvars: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    VarIndexOutOfRange { index: usize, nvars: usize },
    #[error("operands differ in order, variable count, kind or seed point")]
    ShapeMismatch,
    #[error("real-kind jet would acquire a complex value")]
    RealKindViolated,
    #[error("division by a jet with constant term {0}")]
    DivisionBySingularJet(C64),
    #[error("{func} at {at} violates its principal branch")]
    BranchCutViolation { func: &'static str, at: C64 },
    #[error("multi-index of order {requested} exceeds jet order {order}")]
    OrderExceeded { requested: usize, order: usize },
    #[error("seed point is not conjugate-paired")]
    PairingViolated,
}

pub type Result<T> = std::result::Result<T, JetError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    Real,
    Complex,
}

/// Exponents of a monomial, one per variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    parts: [u8; MAX_VARS],
    len: u8,
}

impl MultiIndex {
    /// Panics if more than four components are given or a component exceeds 255.
    pub fn new(parts: &[usize]) -> Self {
        assert!(parts.len() <= MAX_VARS, "at most {MAX_VARS} variables");
        let mut out = [0u8; MAX_VARS];
        for (slot, &p) in out.iter_mut().zip(parts) {
            *slot = u8::try_from(p).expect("multi-index component too large");
        }
        Self {
            parts: out,
            len: parts.len() as u8,
        }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::new(&vec![0; nvars])
    }

    /// The index of the linear monomial in variable `var`.
    pub fn unit(nvars: usize, var: usize) -> Self {
        let mut parts = vec![0; nvars];
        parts[var] = 1;
        Self::new(&parts)
    }

    pub fn nvars(&self) -> usize {
        self.len as usize
    }

    pub fn get(&self, var: usize) -> usize {
        self.parts[var] as usize
    }

    pub fn parts(&self) -> Vec<usize> {
        self.parts[..self.nvars()].iter().map(|&p| p as usize).collect()
    }

    /// Total degree `|alpha|`.
    pub fn order(&self) -> usize {
        self.parts[..self.nvars()].iter().map(|&p| p as usize).sum()
    }

    /// `alpha!` as a float.
    pub fn factorial(&self) -> f64 {
        self.parts[..self.nvars()]
            .iter()
            .map(|&p| factorial(p as usize))
            .product()
    }

    fn with(&self, var: usize, value: usize) -> Self {
        let mut out = *self;
        out.parts[var] = value as u8;
        out
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for v in 0..self.nvars() {
            out.parts[v] += other.parts[v];
        }
        out
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.parts[..self.nvars()])
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts().iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Index tables shared by every jet of one shape.
struct Layout {
    nvars: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    /// Mixed-radix position -> dense index.
    lookup: Vec<u32>,
    /// For each dense target `k`, the pairs `(i, j)` with `alpha_i + alpha_j = alpha_k`.
    conv_start: Vec<usize>,
    conv_pairs: Vec<(u32, u32)>,
}

impl Layout {
    fn build(nvars: usize, order: usize) -> Self {
        let radix = order + 1;
        let mut indices = Vec::new();
        let mut parts = vec![0usize; nvars];
        loop {
            if parts.iter().sum::<usize>() <= order {
                indices.push(MultiIndex::new(&parts));
            }
            // odometer increment
            let mut v = 0;
            loop {
                if v == nvars {
                    break;
                }
                parts[v] += 1;
                if parts[v] < radix {
                    break;
                }
                parts[v] = 0;
                v += 1;
            }
            if v == nvars {
                break;
            }
        }
        // graded, then lexicographically descending so x1 precedes x2
        indices.sort_by(|a, b| {
            a.order()
                .cmp(&b.order())
                .then_with(|| b.parts[..nvars].cmp(&a.parts[..nvars]))
        });

        let mut lookup = vec![u32::MAX; radix.pow(nvars as u32)];
        for (k, idx) in indices.iter().enumerate() {
            lookup[Self::position(radix, idx)] = k as u32;
        }

        let n = indices.len();
        let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        for i in 0..n {
            let di = indices[i].order();
            for j in 0..n {
                if di + indices[j].order() <= order {
                    let sum = indices[i].add(&indices[j]);
                    let k = lookup[Self::position(radix, &sum)] as usize;
                    buckets[k].push((i as u32, j as u32));
                }
            }
        }
        let mut conv_start = Vec::with_capacity(n + 1);
        let mut conv_pairs = Vec::new();
        for b in buckets {
            conv_start.push(conv_pairs.len());
            conv_pairs.extend(b);
        }
        conv_start.push(conv_pairs.len());

        Self {
            nvars,
            order,
            indices,
            lookup,
            conv_start,
            conv_pairs,
        }
    }

    fn position(radix: usize, idx: &MultiIndex) -> usize {
        (0..idx.nvars()).fold(0, |acc, v| acc * radix + idx.get(v))
    }

    fn index_of(&self, idx: &MultiIndex) -> Option<usize> {
        if idx.nvars() != self.nvars || idx.order() > self.order {
            return None;
        }
        Some(self.lookup[Self::position(self.order + 1, idx)] as usize)
    }

    fn len(&self) -> usize {
        self.indices.len()
    }

    fn pairs(&self, k: usize) -> &[(u32, u32)] {
        &self.conv_pairs[self.conv_start[k]..self.conv_start[k + 1]]
    }
}

fn layout(nvars: usize, order: usize) -> Result<Arc<Layout>> {
    if !matches!(nvars, 1 | 2 | 4) || order > MAX_ORDER {
        return Err(JetError::UnsupportedShape { order, nvars });
    }
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Layout>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("layout cache poisoned");
    Ok(guard
        .entry((nvars, order))
        .or_insert_with(|| Arc::new(Layout::build(nvars, order)))
        .clone())
}

/// Number of coefficients of a dense jet: `C(order + nvars, nvars)`.
pub fn coefficient_count(nvars: usize, order: usize) -> usize {
    let mut num = 1u128;
    let mut den = 1u128;
    for k in 1..=nvars as u128 {
        num *= order as u128 + k;
        den *= k;
    }
    (num / den) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elem {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sqrt,
    PowReal(f64),
    PowInt(i32),
}

/// A truncated Taylor expansion of a scalar function at a seed point.
#[derive(Clone)]
pub struct Jet {
    layout: Arc<Layout>,
    kind: ScalarKind,
    point: Arc<[C64]>,
    coeffs: Vec<C64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order())
            .field("kind", &self.kind)
            .field("point", &self.point)
            .field(
                "coeffs",
                &self
                    .layout
                    .indices
                    .iter()
                    .zip(&self.coeffs)
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl Jet {
    fn check_point(point: &[C64], kind: ScalarKind) -> Result<()> {
        if kind == ScalarKind::Real && point.iter().any(|z| z.im != 0.0) {
            return Err(JetError::RealKindViolated);
        }
        Ok(())
    }

    /// Jet of the coordinate function `x_var` at `point`.
    pub fn seed(point: &[C64], var: usize, order: usize, kind: ScalarKind) -> Result<Self> {
        let nvars = point.len();
        let layout = layout(nvars, order)?;
        if var >= nvars {
            return Err(JetError::VarIndexOutOfRange { index: var, nvars });
        }
        Self::check_point(point, kind)?;
        let mut coeffs = vec![C64::new(0.0, 0.0); layout.len()];
        coeffs[0] = point[var];
        if order >= 1 {
            let k = layout
                .index_of(&MultiIndex::unit(nvars, var))
                .expect("linear index present");
            coeffs[k] = C64::new(1.0, 0.0);
        }
        Ok(Self {
            layout,
            kind,
            point: point.into(),
            coeffs,
        })
    }

    /// Jets of every coordinate function at `point`.
    pub fn seed_all(point: &[C64], order: usize, kind: ScalarKind) -> Result<Vec<Self>> {
        (0..point.len())
            .map(|v| Self::seed(point, v, order, kind))
            .collect()
    }

    pub fn constant(point: &[C64], order: usize, kind: ScalarKind, value: C64) -> Result<Self> {
        let layout = layout(point.len(), order)?;
        Self::check_point(point, kind)?;
        if kind == ScalarKind::Real && value.im != 0.0 {
            return Err(JetError::RealKindViolated);
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); layout.len()];
        coeffs[0] = value;
        Ok(Self {
            layout,
            kind,
            point: point.into(),
            coeffs,
        })
    }

    /// A constant jet with this jet's shape.
    pub fn constant_like(&self, value: C64) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); self.coeffs.len()];
        coeffs[0] = if self.kind == ScalarKind::Real {
            C64::new(value.re, 0.0)
        } else {
            value
        };
        self.with_coeffs(coeffs)
    }

    /// Builds a jet from a coefficient function over multi-indices.
    pub fn from_fn(
        point: &[C64],
        order: usize,
        kind: ScalarKind,
        mut coeff: impl FnMut(&MultiIndex) -> C64,
    ) -> Result<Self> {
        let layout = layout(point.len(), order)?;
        Self::check_point(point, kind)?;
        let coeffs: Vec<C64> = layout.indices.iter().map(&mut coeff).collect();
        if kind == ScalarKind::Real && coeffs.iter().any(|c| c.im != 0.0) {
            return Err(JetError::RealKindViolated);
        }
        Ok(Self {
            layout,
            kind,
            point: point.into(),
            coeffs,
        })
    }

    fn with_coeffs(&self, coeffs: Vec<C64>) -> Self {
        Self {
            layout: self.layout.clone(),
            kind: self.kind,
            point: self.point.clone(),
            coeffs,
        }
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn nvars(&self) -> usize {
        self.layout.nvars
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn point(&self) -> &[C64] {
        &self.point
    }

    /// Function value at the seed point.
    pub fn value(&self) -> C64 {
        self.coeffs[0]
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(multi-index, coefficient)` pairs in storage order.
    pub fn coefficients(&self) -> impl Iterator<Item = (MultiIndex, C64)> + '_ {
        self.layout.indices.iter().copied().zip(self.coeffs.iter().copied())
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Result<C64> {
        self.layout
            .index_of(alpha)
            .map(|k| self.coeffs[k])
            .ok_or(JetError::OrderExceeded {
                requested: alpha.order(),
                order: self.order(),
            })
    }

    /// Mixed partial derivative `d^alpha f` at the seed point.
    pub fn partial(&self, alpha: &MultiIndex) -> Result<C64> {
        Ok(self.coeff(alpha)? * alpha.factorial())
    }

    /// Shorthand for [`Jet::partial`] with the exponents given as a slice.
    pub fn d(&self, parts: &[usize]) -> Result<C64> {
        self.partial(&MultiIndex::new(parts))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.layout, &other.layout)
            && self.kind == other.kind
            && self.point == other.point
        {
            Ok(())
        } else {
            Err(JetError::ShapeMismatch)
        }
    }

    /// Jet of `df/dx_var`, one order lower.
    pub fn diff(&self, var: usize) -> Result<Self> {
        let nvars = self.nvars();
        if var >= nvars {
            return Err(JetError::VarIndexOutOfRange { index: var, nvars });
        }
        let order = self.order();
        if order == 0 {
            return Err(JetError::OrderExceeded {
                requested: 1,
                order,
            });
        }
        let target = layout(nvars, order - 1)?;
        let coeffs = target
            .indices
            .iter()
            .map(|beta| {
                let raised = beta.with(var, beta.get(var) + 1);
                let k = self.layout.index_of(&raised).expect("raised index in range");
                self.coeffs[k] * (beta.get(var) + 1) as f64
            })
            .collect();
        Ok(Self {
            layout: target,
            kind: self.kind,
            point: self.point.clone(),
            coeffs,
        })
    }

    /// Repeated differentiation; `vars` lists one entry per derivative taken.
    pub fn diff_many(&self, vars: &[usize]) -> Result<Self> {
        vars.iter().try_fold(self.clone(), |acc, &v| acc.diff(v))
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(JetError::OrderExceeded {
                requested: order,
                order: self.order(),
            });
        }
        if order == self.order() {
            return Ok(self.clone());
        }
        let target = layout(self.nvars(), order)?;
        let coeffs = self.coeffs[..target.len()].to_vec();
        Ok(Self {
            layout: target,
            kind: self.kind,
            point: self.point.clone(),
            coeffs,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.with_coeffs(
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.with_coeffs(
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        ))
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let coeffs = (0..self.len())
            .map(|k| {
                self.layout
                    .pairs(k)
                    .iter()
                    .fold(C64::new(0.0, 0.0), |acc, &(i, j)| {
                        acc + self.coeffs[i as usize] * other.coeffs[j as usize]
                    })
            })
            .collect();
        self.with_coeffs(coeffs)
    }

    /// Series division, solving `q * b = a` coefficient by coefficient in
    /// graded order.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let b0 = other.coeffs[0];
        if b0.norm() <= SINGULAR_THRESHOLD {
            return Err(JetError::DivisionBySingularJet(b0));
        }
        let mut q = vec![C64::new(0.0, 0.0); self.len()];
        for k in 0..self.len() {
            let mut acc = self.coeffs[k];
            for &(i, j) in self.layout.pairs(k) {
                if j != 0 {
                    acc -= q[i as usize] * other.coeffs[j as usize];
                }
            }
            q[k] = acc / b0;
        }
        Ok(self.with_coeffs(q))
    }

    pub fn neg(&self) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Multiplies by a complex constant; fails on a real-kind jet unless the
    /// factor is real.
    pub fn scale_complex(&self, factor: C64) -> Result<Self> {
        if self.kind == ScalarKind::Real && factor.im != 0.0 {
            return Err(JetError::RealKindViolated);
        }
        Ok(self.with_coeffs(self.coeffs.iter().map(|c| c * factor).collect()))
    }

    pub fn add_const(&self, value: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += value;
        self.with_coeffs(coeffs)
    }

    pub fn recip(&self) -> Result<Self> {
        self.constant_like(C64::new(1.0, 0.0)).div(self)
    }

    /// Evaluates `sum_k series[k] * (self - center)^k` by Horner's rule.
    ///
    /// With `center` equal to the constant term this is exact composition of
    /// a univariate Taylor series with the jet.
    pub fn compose(&self, series: &[C64], center: C64) -> Result<Self> {
        if self.kind == ScalarKind::Real && (center.im != 0.0 || series.iter().any(|c| c.im != 0.0))
        {
            return Err(JetError::RealKindViolated);
        }
        let mut h = self.clone();
        h.coeffs[0] -= center;
        let mut acc = self.constant_like(C64::new(0.0, 0.0));
        // only order + 1 terms can contribute when h has no constant term
        let n = series.len();
        for k in (0..n).rev() {
            acc = acc.mul_unchecked(&h);
            acc.coeffs[0] += series[k];
        }
        Ok(acc)
    }

    fn check_branch(&self, func: &'static str) -> Result<C64> {
        let a0 = self.value();
        let bad = match self.kind {
            ScalarKind::Real => a0.re <= 0.0 || a0.norm() <= SINGULAR_THRESHOLD,
            ScalarKind::Complex => {
                a0.norm() <= SINGULAR_THRESHOLD
                    || (a0.im.abs() <= BRANCH_CUT_THRESHOLD && a0.re < 0.0)
            }
        };
        if bad {
            Err(JetError::BranchCutViolation { func, at: a0 })
        } else {
            Ok(a0)
        }
    }

    /// Applies an elementary function by univariate Taylor composition.
    pub fn elem(&self, f: Elem) -> Result<Self> {
        let n = self.order() + 1;
        let a0 = self.value();
        let series: Vec<C64> = match f {
            Elem::Exp => {
                let e = a0.exp();
                (0..n).map(|k| e / factorial(k)).collect()
            }
            Elem::Log => {
                let a0 = self.check_branch("log")?;
                let mut s = vec![a0.ln()];
                let mut p = C64::new(1.0, 0.0);
                for k in 1..n {
                    p *= a0;
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    s.push(sign / (p * k as f64));
                }
                s
            }
            Elem::Sin | Elem::Cos => {
                let (s0, c0) = (a0.sin(), a0.cos());
                let cycle = [s0, c0, -s0, -c0];
                let shift = if f == Elem::Sin { 0 } else { 1 };
                (0..n).map(|k| cycle[(k + shift) % 4] / factorial(k)).collect()
            }
            Elem::Tan => {
                let s = self.elem(Elem::Sin)?;
                let c = self.elem(Elem::Cos)?;
                return s.div(&c);
            }
            Elem::Sqrt => {
                self.check_branch("sqrt")?;
                return self.powf(0.5);
            }
            Elem::PowReal(alpha) => {
                let a0 = self.check_branch("pow")?;
                let mut s = vec![a0.powf(alpha)];
                for k in 1..n {
                    let prev = s[k - 1];
                    s.push(prev * ((alpha - (k - 1) as f64) / k as f64) / a0);
                }
                s
            }
            Elem::PowInt(m) => return self.powi(m),
        };
        let series = match self.kind {
            ScalarKind::Real => series.into_iter().map(|c| C64::new(c.re, 0.0)).collect(),
            ScalarKind::Complex => series,
        };
        self.compose(&series, a0)
    }

    pub fn exp(&self) -> Result<Self> {
        self.elem(Elem::Exp)
    }

    pub fn ln(&self) -> Result<Self> {
        self.elem(Elem::Log)
    }

    pub fn sin(&self) -> Result<Self> {
        self.elem(Elem::Sin)
    }

    pub fn cos(&self) -> Result<Self> {
        self.elem(Elem::Cos)
    }

    pub fn tan(&self) -> Result<Self> {
        self.elem(Elem::Tan)
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.elem(Elem::Sqrt)
    }

    /// Principal-branch real power.
    pub fn powf(&self, alpha: f64) -> Result<Self> {
        self.elem(Elem::PowReal(alpha))
    }

    /// Integer power by repeated squaring; negative exponents invert first.
    pub fn powi(&self, m: i32) -> Result<Self> {
        let mut base = if m < 0 { self.recip()? } else { self.clone() };
        let mut e = m.unsigned_abs();
        let mut acc = self.constant_like(C64::new(1.0, 0.0));
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        Ok(acc)
    }

    /// Jet of the complex-conjugate function on the paired variables
    /// `(z1, z1b, z2, z2b)`.
    pub fn conj_jet(&self) -> Result<Self> {
        if self.nvars() != 4 || !is_conjugate_paired(&self.point) {
            return Err(JetError::PairingViolated);
        }
        let coeffs = self
            .layout
            .indices
            .iter()
            .map(|a| {
                let swapped = MultiIndex::new(&[a.get(1), a.get(0), a.get(3), a.get(2)]);
                let k = self.layout.index_of(&swapped).expect("same order");
                self.coeffs[k].conj()
            })
            .collect();
        Ok(self.with_coeffs(coeffs))
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// `point[1] == conj(point[0])` and `point[3] == conj(point[2])`, to rounding.
pub fn is_conjugate_paired(point: &[C64]) -> bool {
    let close = |a: C64, b: C64| (a - b.conj()).norm() <= 1e-12 * (1.0 + b.norm());
    point.len() == 4 && close(point[1], point[0]) && close(point[3], point[2])
}

/// Binary operation on two jets of identical shape.
pub fn arith(a: &Jet, b: &Jet, op: ArithOp) -> Result<Jet> {
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => a.div(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn close(a: C64, b: f64) -> bool {
        (a - re(b)).norm() < 1e-14 * (1.0 + b.abs())
    }

    #[test]
    fn seed_real_two_vars() {
        let x = Jet::seed(&[re(0.3), re(0.0)], 0, 2, ScalarKind::Real).unwrap();
        assert_eq!(x.len(), 6);
        for (alpha, c) in x.coefficients() {
            let expected = match alpha.parts().as_slice() {
                [0, 0] => 0.3,
                [1, 0] => 1.0,
                _ => 0.0,
            };
            assert_eq!(c, re(expected), "{alpha}");
        }
    }

    #[test]
    fn seed_complex_four_vars() {
        let z = [re(0.0); 4];
        let x = Jet::seed(&z, 1, 1, ScalarKind::Complex).unwrap();
        assert_eq!(x.value(), re(0.0));
        assert_eq!(x.coeff(&MultiIndex::new(&[0, 1, 0, 0])).unwrap(), re(1.0));
        assert_eq!(x.coeff(&MultiIndex::new(&[1, 0, 0, 0])).unwrap(), re(0.0));
    }

    #[test]
    fn seed_rejects_bad_shapes() {
        let z = [re(0.0); 4];
        assert!(matches!(
            Jet::seed(&z, 5, 2, ScalarKind::Complex),
            Err(JetError::VarIndexOutOfRange { .. })
        ));
        assert!(matches!(
            Jet::seed(&[re(0.0); 3], 0, 2, ScalarKind::Real),
            Err(JetError::UnsupportedShape { .. })
        ));
        assert!(matches!(
            Jet::seed(&z, 0, MAX_ORDER + 1, ScalarKind::Complex),
            Err(JetError::UnsupportedShape { .. })
        ));
    }

    #[test]
    fn dense_storage_size() {
        for (nvars, order) in [(1, 8), (2, 6), (4, 6), (4, 8)] {
            let pt = vec![re(0.1); nvars];
            let j = Jet::seed(&pt, 0, order, ScalarKind::Real).unwrap();
            assert_eq!(j.len(), coefficient_count(nvars, order));
        }
        assert_eq!(coefficient_count(4, 8), 495);
    }

    #[test]
    fn square_of_one_plus_x() {
        let x = Jet::seed(&[re(0.0)], 0, 2, ScalarKind::Real).unwrap();
        let a = x.add_const(1.0);
        let sq = arith(&a, &a, ArithOp::Mul).unwrap();
        let c: Vec<C64> = sq.coefficients().map(|(_, c)| c).collect();
        assert_eq!(c, vec![re(1.0), re(2.0), re(1.0)]);
    }

    #[test]
    fn geometric_series() {
        let x = Jet::seed(&[re(0.0)], 0, 3, ScalarKind::Real).unwrap();
        let one = x.constant_like(re(1.0));
        let g = arith(&one, &one.sub(&x).unwrap(), ArithOp::Div).unwrap();
        for (_, c) in g.coefficients() {
            assert!(close(c, 1.0));
        }
    }

    #[test]
    fn singular_division() {
        let x = Jet::seed(&[re(0.0)], 0, 3, ScalarKind::Real).unwrap();
        assert!(matches!(
            x.constant_like(re(1.0)).div(&x),
            Err(JetError::DivisionBySingularJet(_))
        ));
    }

    #[test]
    fn exp_series() {
        let x = Jet::seed(&[re(0.0)], 0, 3, ScalarKind::Real).unwrap();
        let e = x.exp().unwrap();
        let c: Vec<C64> = e.coefficients().map(|(_, c)| c).collect();
        for (got, want) in c.iter().zip([1.0, 1.0, 0.5, 1.0 / 6.0]) {
            assert!(close(*got, want));
        }
        assert!(close(e.d(&[3]).unwrap(), 1.0));
    }

    #[test]
    fn pow_of_constant() {
        let x = Jet::constant(&[re(0.0)], 4, ScalarKind::Real, re(8.0)).unwrap();
        let p = x.powf(-2.0 / 3.0).unwrap();
        assert!(close(p.value(), 0.25));
        assert!(p.coefficients().skip(1).all(|(_, c)| c == re(0.0)));
    }

    #[test]
    fn log_branch_cut() {
        let x = Jet::seed(&[re(-1.0)], 0, 3, ScalarKind::Real).unwrap();
        assert!(matches!(x.ln(), Err(JetError::BranchCutViolation { .. })));
        let z = Jet::seed(&[re(-1.0), re(-1.0), re(0.0), re(0.0)], 0, 2, ScalarKind::Complex)
            .unwrap();
        assert!(matches!(z.sqrt(), Err(JetError::BranchCutViolation { .. })));
        let off = Jet::seed(&[C64::new(-1.0, 0.1)], 0, 2, ScalarKind::Complex).unwrap();
        assert!(off.ln().is_ok());
    }

    #[test]
    fn partial_of_square() {
        let x = Jet::seed(&[re(0.0)], 0, 3, ScalarKind::Real).unwrap();
        assert!(close(x.mul(&x).unwrap().d(&[2]).unwrap(), 2.0));
        assert!(matches!(x.d(&[4]), Err(JetError::OrderExceeded { .. })));
    }

    #[test]
    fn mixed_partial_of_rational() {
        // 2 t1^2 / (t2 + 1): d^2/dt1 dt2 = -4 t1 / (t2 + 1)^2
        let pt = [re(0.1), re(0.2)];
        let v = Jet::seed_all(&pt, 3, ScalarKind::Real).unwrap();
        let f = v[0]
            .mul(&v[0])
            .unwrap()
            .scale(2.0)
            .div(&v[1].add_const(1.0))
            .unwrap();
        let want = -4.0 * 0.1 / 1.2f64.powi(2);
        assert!((f.d(&[1, 1]).unwrap().re - want).abs() < 1e-14);
    }

    #[test]
    fn conj_jet_of_coordinates() {
        let z1 = C64::new(0.1, 0.05);
        let z2 = C64::new(0.0, 0.2);
        let pt = [z1, z1.conj(), z2, z2.conj()];
        let v = Jet::seed_all(&pt, 4, ScalarKind::Complex).unwrap();
        let c = v[0].conj_jet().unwrap();
        assert_eq!(c.max_abs_diff(&v[1]).unwrap(), 0.0);
        let w = v[0].mul(&v[1]).unwrap();
        let wc = w.conj_jet().unwrap();
        assert!(w.max_abs_diff(&wc).unwrap() < 1e-15);
        let f = v[2].mul(&v[0]).unwrap().exp().unwrap();
        assert_eq!(f.conj_jet().unwrap().conj_jet().unwrap().max_abs_diff(&f).unwrap(), 0.0);
    }

    #[test]
    fn conj_jet_requires_pairing() {
        let pt = [C64::new(0.1, 0.1), C64::new(0.1, 0.1), re(0.0), re(0.0)];
        let v = Jet::seed(&pt, 0, 2, ScalarKind::Complex).unwrap();
        assert_eq!(v.conj_jet().unwrap_err(), JetError::PairingViolated);
    }

    #[test]
    fn diff_lowers_order() {
        let pt = [re(0.5), re(-0.25)];
        let v = Jet::seed_all(&pt, 5, ScalarKind::Real).unwrap();
        let f = v[0].mul(&v[1]).unwrap().sin().unwrap();
        let fx = f.diff(0).unwrap();
        assert_eq!(fx.order(), 4);
        for (alpha, c) in fx.coefficients() {
            let raised = MultiIndex::new(&[alpha.get(0) + 1, alpha.get(1)]);
            let want = f.partial(&raised).unwrap();
            assert!((c * alpha.factorial() - want).norm() < 1e-13);
        }
    }

    #[test]
    fn mismatched_shapes_rejected() {
        let a = Jet::seed(&[re(0.0), re(0.0)], 0, 3, ScalarKind::Real).unwrap();
        let b = Jet::seed(&[re(0.0), re(0.0)], 0, 2, ScalarKind::Real).unwrap();
        assert_eq!(a.add(&b).unwrap_err(), JetError::ShapeMismatch);
        let c = Jet::seed(&[re(0.0), re(0.1)], 0, 3, ScalarKind::Real).unwrap();
        assert_eq!(a.mul(&c).unwrap_err(), JetError::ShapeMismatch);
    }

    #[test]
    fn real_kind_stays_real() {
        let pt = [re(0.3), re(0.7)];
        let v = Jet::seed_all(&pt, 6, ScalarKind::Real).unwrap();
        let f = v[0]
            .mul(&v[1])
            .unwrap()
            .add_const(1.0)
            .ln()
            .unwrap()
            .div(&v[1].cos().unwrap())
            .unwrap()
            .powf(1.5)
            .unwrap();
        assert!(f.coefficients().all(|(_, c)| c.im == 0.0));
    }

    #[test]
    fn negative_integer_power() {
        let x = Jet::seed(&[re(2.0)], 0, 4, ScalarKind::Real).unwrap();
        let a = x.powi(-3).unwrap();
        let b = x.powf(-3.0).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-15);
        assert!(x.powi(0).unwrap().max_abs_diff(&x.constant_like(re(1.0))).unwrap() == 0.0);
    }
}
