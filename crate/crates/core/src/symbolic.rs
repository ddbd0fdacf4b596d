//! Exact bivariate rational functions over ℚ(i).
//!
//! The kernel defect `F_w(z)` of a linear-fractional composition operator
//! is a rational function of `(w, z)` whose coefficients are polynomial in
//! the map coefficients and their conjugates. For a concrete Gaussian-rational
//! map it can be assembled exactly and tested for identical vanishing, which
//! settles 2-complex symmetry with `J` without any tolerance.
//!
//! No gcd is ever taken: equality is decided by cross-multiplication, which
//! is sound because the polynomial ring is an integral domain.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

use crate::moebius::{ExactMoebius, MoebiusError};
use crate::msym::Which;
use crate::scalar::{ComplexScalar, GaussianRational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymbolicError {
    #[error("division by the zero rational function")]
    DivisionByZeroFunction,
    #[error("degenerate map: {0}")]
    DegenerateMap(#[from] MoebiusError),
}

/// Sparse polynomial in `w` and `z`, keyed by `(deg_w, deg_z)`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BivariatePoly {
    terms: BTreeMap<(u32, u32), GaussianRational>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::monomial(c, 0, 0)
    }

    /// `c · w^i z^j`
    pub fn monomial(c: GaussianRational, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term((i, j), c);
        p
    }

    pub fn w() -> Self {
        Self::monomial(GaussianRational::one(), 1, 0)
    }

    pub fn z() -> Self {
        Self::monomial(GaussianRational::one(), 0, 1)
    }

    /// `lin · x + cst` where `x` is `w` or `z`.
    fn affine(lin: &GaussianRational, cst: &GaussianRational, x: Self) -> Self {
        &x.scale(lin) + &Self::constant(cst.clone())
    }

    fn add_term(&mut self, key: (u32, u32), c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_insert_with(GaussianRational::zero);
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, i: u32, j: u32) -> GaussianRational {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &GaussianRational)> {
        self.terms.iter()
    }

    /// `(max deg_w, max deg_z)`; `(0, 0)` for the zero polynomial.
    pub fn degrees(&self) -> (u32, u32) {
        self.terms.keys().fold((0, 0), |(a, b), &(i, j)| (a.max(i), b.max(j)))
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero();
        for (&k, v) in &self.terms {
            out.add_term(k, v * c);
        }
        out
    }

    pub fn eval(&self, w: &GaussianRational, z: &GaussianRational) -> GaussianRational {
        let (dw, dz) = self.degrees();
        let pw = powers(w, dw);
        let pz = powers(z, dz);
        self.terms
            .iter()
            .fold(GaussianRational::zero(), |acc, (&(i, j), c)| &acc + &(&(c * &pw[i as usize]) * &pz[j as usize]))
    }
}

fn powers(x: &GaussianRational, n: u32) -> Vec<GaussianRational> {
    let mut out = vec![GaussianRational::one()];
    for k in 1..=n as usize {
        out.push(&out[k - 1] * x);
    }
    out
}

impl Add for &BivariatePoly {
    type Output = BivariatePoly;
    fn add(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        for (&k, v) in &rhs.terms {
            out.add_term(k, v.clone());
        }
        out
    }
}

impl Sub for &BivariatePoly {
    type Output = BivariatePoly;
    fn sub(self, rhs: &BivariatePoly) -> BivariatePoly {
        self + &(-rhs)
    }
}

impl Neg for &BivariatePoly {
    type Output = BivariatePoly;
    fn neg(self) -> BivariatePoly {
        self.scale(&-GaussianRational::one())
    }
}

impl Mul for &BivariatePoly {
    type Output = BivariatePoly;
    fn mul(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = BivariatePoly::zero();
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &rhs.terms {
                out.add_term((i1 + i2, j1 + j2), a * b);
            }
        }
        out
    }
}

impl fmt::Debug for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(i, j), c)| {
                let mut s = format!("({c})");
                match i {
                    0 => {}
                    1 => s.push_str("·w"),
                    _ => s.push_str(&format!("·w^{i}")),
                }
                match j {
                    0 => {}
                    1 => s.push_str("·z"),
                    _ => s.push_str(&format!("·z^{j}")),
                }
                s
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `num / den` with `den ≢ 0`. Not kept in lowest terms.
#[derive(Clone, PartialEq)]
pub struct RationalFunction2 {
    num: BivariatePoly,
    den: BivariatePoly,
}

impl RationalFunction2 {
    pub fn new(num: BivariatePoly, den: BivariatePoly) -> Result<Self, SymbolicError> {
        if den.is_zero() {
            return Err(SymbolicError::DivisionByZeroFunction);
        }
        Ok(Self { num, den })
    }

    pub fn from_poly(p: BivariatePoly) -> Self {
        Self { num: p, den: BivariatePoly::constant(GaussianRational::one()) }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_poly(BivariatePoly::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(BivariatePoly::zero())
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn w() -> Self {
        Self::from_poly(BivariatePoly::w())
    }

    pub fn z() -> Self {
        Self::from_poly(BivariatePoly::z())
    }

    pub fn num(&self) -> &BivariatePoly {
        &self.num
    }

    pub fn den(&self) -> &BivariatePoly {
        &self.den
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, SymbolicError> {
        Self::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn inv(&self) -> Result<Self, SymbolicError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// `None` where the denominator vanishes.
    pub fn eval(&self, w: &GaussianRational, z: &GaussianRational) -> Option<GaussianRational> {
        self.num.eval(w, z).checked_div(&self.den.eval(w, z)).ok()
    }

    /// Exact evaluation at the binary values of `w`, `z`, rounded once.
    pub fn eval_float(&self, w: ComplexScalar, z: ComplexScalar) -> Option<ComplexScalar> {
        let w = GaussianRational::from_complex(w).ok()?;
        let z = GaussianRational::from_complex(z).ok()?;
        self.eval(&w, &z)?.to_complex().ok()
    }
}

impl fmt::Debug for RationalFunction2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den)
    }
}

impl Add for &RationalFunction2 {
    type Output = RationalFunction2;
    fn add(self, rhs: &RationalFunction2) -> RationalFunction2 {
        RationalFunction2 {
            num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
    }
}

impl Sub for &RationalFunction2 {
    type Output = RationalFunction2;
    fn sub(self, rhs: &RationalFunction2) -> RationalFunction2 {
        RationalFunction2 {
            num: &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
    }
}

impl Mul for &RationalFunction2 {
    type Output = RationalFunction2;
    fn mul(self, rhs: &RationalFunction2) -> RationalFunction2 {
        RationalFunction2 { num: &self.num * &rhs.num, den: &self.den * &rhs.den }
    }
}

impl Div for &RationalFunction2 {
    type Output = RationalFunction2;

    /// Panics when `rhs` is identically zero; see [`RationalFunction2::checked_div`].
    fn div(self, rhs: &RationalFunction2) -> RationalFunction2 {
        self.checked_div(rhs).expect("division by the zero rational function")
    }
}

impl Neg for &RationalFunction2 {
    type Output = RationalFunction2;
    fn neg(self) -> RationalFunction2 {
        RationalFunction2 { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for RationalFunction2 {
            type Output = RationalFunction2;
            fn $method(self, rhs: RationalFunction2) -> RationalFunction2 {
                (&self).$method(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn rf_arith(op: RfOp, x: &RationalFunction2, y: &RationalFunction2) -> Result<RationalFunction2, SymbolicError> {
    Ok(match op {
        RfOp::Add => x + y,
        RfOp::Sub => x - y,
        RfOp::Mul => x * y,
        RfOp::Div => x.checked_div(y)?,
    })
}

pub fn is_zero(x: &RationalFunction2) -> bool {
    x.num.is_zero()
}

/// `lhs ≡ rhs` as rational functions.
pub fn verify_identity(lhs: &RationalFunction2, rhs: &RationalFunction2) -> bool {
    (&(&lhs.num * &rhs.den) - &(&rhs.num * &lhs.den)).is_zero()
}

/// `1 / (1 − x·y)` written over a common denominator, where `x = (p1 u + p0)/(q1 u + q0)`
/// in the variable `u` and `y` is the other variable.
fn kernel_of_fraction(m: &ExactMoebius, u: BivariatePoly, other: BivariatePoly) -> RationalFunction2 {
    let den_m = BivariatePoly::affine(m.c(), m.d(), u.clone());
    let num_m = BivariatePoly::affine(m.a(), m.b(), u);
    RationalFunction2 { num: den_m.clone(), den: &den_m - &(&num_m * &other) }
}

/// Exact kernel actions of `C_φ` as rational functions of `(w, z)`.
pub struct ExactKernelTerms {
    phi: ExactMoebius,
    phi_bar: ExactMoebius,
    phi_bar2: ExactMoebius,
}

impl ExactKernelTerms {
    pub fn new(phi: &ExactMoebius) -> Result<Self, SymbolicError> {
        let phi_bar = phi.conj_reflect();
        let phi_bar2 = phi_bar.compose(&phi_bar)?;
        Ok(Self { phi: phi.clone(), phi_bar, phi_bar2 })
    }

    /// `(J C² K_w)(z) = 1 / (1 − w φ̄₂(z))`
    pub fn term_a(&self) -> RationalFunction2 {
        kernel_of_fraction(&self.phi_bar2, BivariatePoly::z(), BivariatePoly::w())
    }

    /// `(C* J C K_w)(z)` split at the pole of `1/(1 − w φ̄(·))`:
    /// `−c̄/(āw − c̄) · K_{φ(0)}(z) + (c̄/(āw − c̄) + d̄/(d̄ − b̄w)) · K_{φ(conj σ(w))}(z)`.
    pub fn term_b(&self) -> Result<RationalFunction2, SymbolicError> {
        let [ab, bb, cb, db] = self.phi.coefficients().map(|x| x.conj());
        let w = BivariatePoly::w();
        // d̄ / (d̄ − b̄ w)
        let tail = RationalFunction2::new(
            BivariatePoly::constant(db.clone()),
            BivariatePoly::affine(&-&bb, &db, w.clone()),
        )?;
        let sigma = self.phi.cowen_triple().sigma;
        let k_q = kernel_of_fraction(&self.phi_bar.compose(&sigma)?, w.clone(), BivariatePoly::z());
        if cb.is_zero() {
            return Ok(&tail * &k_q);
        }
        // c̄ / (ā w − c̄)
        let head = RationalFunction2::new(BivariatePoly::constant(cb.clone()), BivariatePoly::affine(&ab, &-&cb, w))?;
        // K_{φ(0)}(z) = d̄ / (d̄ − b̄ z)
        let k_p = RationalFunction2::new(
            BivariatePoly::constant(db.clone()),
            BivariatePoly::affine(&-&bb, &db, BivariatePoly::z()),
        )?;
        Ok(&(&(-&head) * &k_p) + &(&(&head + &tail) * &k_q))
    }

    /// `(C*² J K_w)(z) = 1 / (1 − φ̄₂(w) z)`
    pub fn term_c(&self) -> RationalFunction2 {
        kernel_of_fraction(&self.phi_bar2, BivariatePoly::w(), BivariatePoly::z())
    }

    /// `(J C J C* J K_w)(z) = 1 / (1 − φ̄(w) φ̄(z))`
    pub fn term_d(&self) -> RationalFunction2 {
        let m = &self.phi_bar;
        let (w, z) = (BivariatePoly::w(), BivariatePoly::z());
        let den_w = BivariatePoly::affine(m.c(), m.d(), w.clone());
        let den_z = BivariatePoly::affine(m.c(), m.d(), z.clone());
        let num_w = BivariatePoly::affine(m.a(), m.b(), w);
        let num_z = BivariatePoly::affine(m.a(), m.b(), z);
        let both = &den_w * &den_z;
        RationalFunction2 { num: both.clone(), den: &both - &(&num_w * &num_z) }
    }
}

/// The defect `F_w(z)` (direct) or `F*_w(z)` (adjoint) as one rational function.
pub fn defect_rational(phi: &ExactMoebius, which: Which) -> Result<RationalFunction2, SymbolicError> {
    let t = ExactKernelTerms::new(phi)?;
    let two = RationalFunction2::constant(GaussianRational::from_integer(2));
    let middle = match which {
        Which::Direct => t.term_b()?,
        Which::Adjoint => t.term_d(),
    };
    Ok(&(&t.term_a() - &(&two * &middle)) + &t.term_c())
}

/// One entry of the fixed Gaussian-rational test catalog.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub label: &'static str,
    pub family: &'static str,
    pub map: ExactMoebius,
    pub is_dilation: bool,
}

/// Twelve self-maps: three dilations, three affine maps with nonzero
/// translation, two of the form `z/(sz+t)`, two with `a = 0`, and two with
/// `a, c, φ(0)` all nonzero (one of them a disk automorphism).
pub fn catalog() -> Vec<CatalogEntry> {
    let q = |p, q, r, s| GaussianRational::from_fractions(p, q, r, s);
    let (zero, one) = (GaussianRational::zero(), GaussianRational::one());
    let entry = |label, family, a, b, c, d, is_dilation| CatalogEntry {
        label,
        family,
        map: ExactMoebius::new(a, b, c, d).expect("catalog maps are nondegenerate"),
        is_dilation,
    };
    vec![
        entry("((1+2i)/3) z", "dilation", q(1, 3, 2, 3), zero.clone(), zero.clone(), one.clone(), true),
        entry("z/2", "dilation", q(1, 2, 0, 1), zero.clone(), zero.clone(), one.clone(), true),
        entry("-(3/4)i z", "dilation", q(0, 1, -3, 4), zero.clone(), zero.clone(), one.clone(), true),
        entry("z/2 + 1/4", "affine", q(1, 2, 0, 1), q(1, 4, 0, 1), zero.clone(), one.clone(), false),
        entry("z/3 - i/2", "affine", q(1, 3, 0, 1), q(0, 1, -1, 2), zero.clone(), one.clone(), false),
        entry("((1+i)/4) z + 1/2", "affine", q(1, 4, 1, 4), q(1, 2, 0, 1), zero.clone(), one.clone(), false),
        entry("z/(z/3 + 3/2)", "fixes_origin", one.clone(), zero.clone(), q(1, 3, 0, 1), q(3, 2, 0, 1), false),
        entry("z/((i/2) z + 2)", "fixes_origin", one.clone(), zero.clone(), q(0, 1, 1, 2), q(2, 1, 0, 1), false),
        entry("1/(z/3 + 2)", "a_zero", zero.clone(), one.clone(), q(1, 3, 0, 1), q(2, 1, 0, 1), false),
        entry("1/((i/4) z + 3)", "a_zero", zero.clone(), one.clone(), q(0, 1, 1, 4), q(3, 1, 0, 1), false),
        entry("(3z/10 + 1/5)/(z/5 + 1)", "generic", q(3, 10, 0, 1), q(1, 5, 0, 1), q(1, 5, 0, 1), one.clone(), false),
        entry("(1/2 - z)/(1 - z/2)", "generic", -one.clone(), q(1, 2, 0, 1), q(-1, 2, 0, 1), one, false),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::msym::{defect_kernel_adjoint, defect_kernel_direct};

    fn gq(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn k(s: &str) -> RationalFunction2 {
        RationalFunction2::constant(gq(s))
    }

    fn map(s: &str) -> ExactMoebius {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let (w, z) = (RationalFunction2::w(), RationalFunction2::z());
        let kernel = &RationalFunction2::one() / &(&RationalFunction2::one() - &(&w * &z));
        assert!(is_zero(&rf_arith(RfOp::Sub, &kernel, &kernel).unwrap()));

        let prod = rf_arith(RfOp::Mul, &w, &z).unwrap();
        assert!(verify_identity(&prod, &RationalFunction2::from_poly(BivariatePoly::monomial(GaussianRational::one(), 1, 1))));

        let other = &RationalFunction2::one() / &(&RationalFunction2::one() - &(&k("1/2") * &(&w * &z)));
        assert!(!is_zero(&rf_arith(RfOp::Add, &kernel, &other).unwrap()));

        assert_eq!(rf_arith(RfOp::Div, &w, &RationalFunction2::zero()), Err(SymbolicError::DivisionByZeroFunction));
    }

    #[test]
    fn is_zero_examples() {
        assert!(is_zero(&RationalFunction2::zero()));
        assert!(!is_zero(&(&RationalFunction2::w() - &RationalFunction2::z())));
        let x = &RationalFunction2::w() + &RationalFunction2::z();
        assert!(!verify_identity(&x, &(&x + &RationalFunction2::one())));
        assert!(verify_identity(&x, &x));
    }

    #[test]
    fn defect_examples() {
        let dil = map("1/3+2/3i,0,0,1");
        assert!(is_zero(&defect_rational(&dil, Which::Direct).unwrap()));
        assert!(is_zero(&defect_rational(&dil, Which::Adjoint).unwrap()));

        let fixes = map("1,0,1/3,3/2");
        let f = defect_rational(&fixes, Which::Direct).unwrap();
        assert!(!is_zero(&f));

        let aff = map("1/2,1/4,0,1");
        let f = defect_rational(&aff, Which::Adjoint).unwrap();
        assert!(!is_zero(&f));
        let (w, z) = (ComplexScalar::new(0.0, 0.0), ComplexScalar::new(0.5, 0.0));
        let exact = f.eval_float(w, z).unwrap();
        let float = defect_kernel_adjoint(&aff.to_float().unwrap(), w, z).unwrap();
        assert!((exact - float).norm() < 1e-12);
    }

    #[test]
    fn direct_probe_is_exact() {
        let f = defect_rational(&map("1/2,1/4,0,1"), Which::Direct).unwrap();
        assert_eq!(f.eval(&GaussianRational::zero(), &gq("1/2")).unwrap(), gq("-5/91"));
    }

    #[test]
    fn exact_and_float_routes_agree_at_rational_points() {
        let pts = [("1/5+1/3i", "-1/2+1/7i"), ("-2/5", "1/4-1/4i"), ("1/10i", "3/5"), ("1/3-1/3i", "-1/6-1/2i")];
        for entry in catalog() {
            let fmap = entry.map.to_float().unwrap();
            for which in [Which::Direct, Which::Adjoint] {
                let f = defect_rational(&entry.map, which).unwrap();
                for (w, z) in pts {
                    let (w, z) = (gq(w), gq(z));
                    let (wf, zf) = (w.to_complex().unwrap(), z.to_complex().unwrap());
                    let float = match which {
                        Which::Direct => defect_kernel_direct(&fmap, wf, zf),
                        Which::Adjoint => defect_kernel_adjoint(&fmap, wf, zf),
                    };
                    let (Some(exact), Ok(float)) = (f.eval(&w, &z), float) else { continue };
                    let exact = exact.to_complex().unwrap();
                    assert!((exact - float).norm() < 1e-10, "{}: {exact} vs {float}", entry.label);
                }
            }
        }
    }

    #[test]
    fn catalog_shape() {
        let cat = catalog();
        assert_eq!(cat.len(), 12);
        assert_eq!(cat.iter().filter(|e| e.is_dilation).count(), 3);
        for e in &cat {
            assert!(e.map.to_float().unwrap().is_disk_self_map(), "{}", e.label);
        }
    }

    #[test]
    fn display_is_readable() {
        let p = &BivariatePoly::w() + &BivariatePoly::monomial(gq("1/2-i"), 2, 1);
        assert_eq!(p.to_string(), "(1)·w + (1/2-1i)·w^2·z");
        assert_eq!(BivariatePoly::zero().to_string(), "0");
    }
}
