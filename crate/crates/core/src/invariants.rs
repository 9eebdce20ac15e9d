//! Discriminant invariants of the six families.
//!
//! Normalizations, in lattice coordinates (see [`crate::forms`]):
//!
//! * W1: `−4A³ − 27B²`.
//! * F3, G2: the discriminant of the binary form.
//! * G3: the Macaulay resultant of the three partial derivatives divided by
//!   [`G3_RESULTANT_FACTOR`], which makes the invariant primitive.
//! * F4: the discriminant of the integral binary cubic `4·det(As + Bt)`,
//!   i.e. `256·disc(det(As + Bt))`. This is the normalization for which
//!   `g₂(v) = f₄(φ(v))` holds.
//! * G4: `disc(16·det(As + Bt)) / 256`, i.e. `65536·disc(det(As + Bt))`.
//!
//! All evaluation is exact. The closed forms are written once over the small
//! [`Ring`] abstraction and instantiated for big integers, overflow-checked
//! `i128`, and residues modulo `q`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{det_bareiss, det_multimodular, interpolate, int, rem_euclid_big, to_rational};
use crate::error::{Error, Result};
use crate::forms::{Family, FormVector, GroupElement, Matrix};

/// Ratio between the Macaulay resultant of the partials of a ternary cubic
/// and the primitive discriminant.
///
/// The gcd of the resultant over random integral cubics is 27. On the
/// Weierstrass family `y²z − x³ − Axz² − Bz³` the resultant is
/// `432·(4A³ + 27B²)`, so the normalized invariant there is `16·(4A³ + 27B²)`,
/// and the Fermat cubic gives `3⁹`.
pub const G3_RESULTANT_FACTOR: i64 = 27;

/// Minimal commutative-ring interface used by the closed-form invariants.
pub trait Ring: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, k: i64) -> Self;
    /// Division by a constant known to divide the value exactly.
    fn div_exact(&self, k: i64) -> Self;
    fn one_like(&self) -> Self;
    fn zero_like(&self) -> Self {
        self.scale(0)
    }
}

impl Ring for BigInt {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, k: i64) -> Self {
        self * k
    }
    fn div_exact(&self, k: i64) -> Self {
        debug_assert!((self % k).is_zero());
        self / k
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
}

impl Ring for BigRational {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, k: i64) -> Self {
        self * BigInt::from(k)
    }
    fn div_exact(&self, k: i64) -> Self {
        self / BigInt::from(k)
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
}

/// `i128` arithmetic that turns `None` on overflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checked(pub Option<i128>);

impl Ring for Checked {
    fn add(&self, o: &Self) -> Self {
        Checked(self.0.zip(o.0).and_then(|(a, b)| a.checked_add(b)))
    }
    fn sub(&self, o: &Self) -> Self {
        Checked(self.0.zip(o.0).and_then(|(a, b)| a.checked_sub(b)))
    }
    fn mul(&self, o: &Self) -> Self {
        Checked(self.0.zip(o.0).and_then(|(a, b)| a.checked_mul(b)))
    }
    fn scale(&self, k: i64) -> Self {
        Checked(self.0.and_then(|a| a.checked_mul(k as i128)))
    }
    fn div_exact(&self, k: i64) -> Self {
        Checked(self.0.map(|a| {
            debug_assert_eq!(a % k as i128, 0);
            a / k as i128
        }))
    }
    fn one_like(&self) -> Self {
        Checked(Some(1))
    }
}

/// Residue modulo `q` (`q < 2^63`), kept in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModQ {
    pub v: i128,
    pub q: i128,
}

impl ModQ {
    pub fn new(v: i128, q: i128) -> Self {
        ModQ { v: v.rem_euclid(q), q }
    }
}

impl Ring for ModQ {
    fn add(&self, o: &Self) -> Self {
        ModQ::new(self.v + o.v, self.q)
    }
    fn sub(&self, o: &Self) -> Self {
        ModQ::new(self.v - o.v, self.q)
    }
    fn mul(&self, o: &Self) -> Self {
        ModQ::new(self.v * o.v, self.q)
    }
    fn scale(&self, k: i64) -> Self {
        ModQ::new(self.v * (k as i128).rem_euclid(self.q), self.q)
    }
    /// Requires `k | q`; the result lives modulo `q / k`.
    fn div_exact(&self, k: i64) -> Self {
        let k = k as i128;
        debug_assert!(self.q % k == 0 && self.v % k == 0);
        ModQ { v: self.v / k, q: self.q / k }
    }
    fn one_like(&self) -> Self {
        ModQ::new(1, self.q)
    }
}

fn term<R: Ring>(k: i64, fs: &[&R]) -> R {
    let mut acc = fs[0].clone();
    for f in &fs[1..] {
        acc = acc.mul(f);
    }
    acc.scale(k)
}

/// Discriminant of `a s³ + b s²t + c st² + d t³`.
pub fn cubic_disc<R: Ring>(a: &R, b: &R, c: &R, d: &R) -> R {
    term(18, &[a, b, c, d])
        .add(&term(-4, &[b, b, b, d]))
        .add(&term(1, &[b, b, c, c]))
        .add(&term(-4, &[a, c, c, c]))
        .add(&term(-27, &[a, a, d, d]))
}

/// `∂/∂d` of [`cubic_disc`].
pub fn cubic_disc_dd<R: Ring>(a: &R, b: &R, c: &R, d: &R) -> R {
    term(18, &[a, b, c]).add(&term(-4, &[b, b, b])).add(&term(-54, &[a, a, d]))
}

/// Discriminant of `a s⁴ + b s³t + c s²t² + d st³ + e t⁴`.
pub fn quartic_disc<R: Ring>(a: &R, b: &R, c: &R, d: &R, e: &R) -> R {
    term(256, &[a, a, a, e, e, e])
        .add(&term(-192, &[a, a, b, d, e, e]))
        .add(&term(-128, &[a, a, c, c, e, e]))
        .add(&term(144, &[a, a, c, d, d, e]))
        .add(&term(-27, &[a, a, d, d, d, d]))
        .add(&term(144, &[a, b, b, c, e, e]))
        .add(&term(-6, &[a, b, b, d, d, e]))
        .add(&term(-80, &[a, b, c, c, d, e]))
        .add(&term(18, &[a, b, c, d, d, d]))
        .add(&term(16, &[a, c, c, c, c, e]))
        .add(&term(-4, &[a, c, c, c, d, d]))
        .add(&term(-27, &[b, b, b, b, e, e]))
        .add(&term(18, &[b, b, b, c, d, e]))
        .add(&term(-4, &[b, b, b, d, d, d]))
        .add(&term(-4, &[b, b, c, c, c, e]))
        .add(&term(1, &[b, b, c, c, d, d]))
}

/// `∂/∂e` of [`quartic_disc`].
pub fn quartic_disc_de<R: Ring>(a: &R, b: &R, c: &R, d: &R, e: &R) -> R {
    term(768, &[a, a, a, e, e])
        .add(&term(-384, &[a, a, b, d, e]))
        .add(&term(-256, &[a, a, c, c, e]))
        .add(&term(144, &[a, a, c, d, d]))
        .add(&term(288, &[a, b, b, c, e]))
        .add(&term(-6, &[a, b, b, d, d]))
        .add(&term(-80, &[a, b, c, c, d]))
        .add(&term(16, &[a, c, c, c, c]))
        .add(&term(-54, &[b, b, b, b, e]))
        .add(&term(18, &[b, b, b, c, d]))
        .add(&term(-4, &[b, b, c, c, c]))
}


/// Coefficients (`s^k` first) of `det(S·s + T·t)` for square matrices `S`, `T`.
pub fn pencil_det<R: Ring>(s: &[Vec<R>], t: &[Vec<R>]) -> Vec<R> {
    fn rec<R: Ring>(s: &[Vec<R>], t: &[Vec<R>], row: usize, used: u32) -> Vec<R> {
        let k = s.len();
        if row == k {
            return vec![s[0][0].one_like()];
        }
        let mut out = vec![s[0][0].zero_like(); k - row + 1];
        let mut sign = 1i64;
        for col in 0..k {
            if used & (1 << col) != 0 {
                continue;
            }
            let minor = rec(s, t, row + 1, used | (1 << col));
            let x = s[row][col].scale(sign);
            let y = t[row][col].scale(sign);
            for (j, m) in minor.iter().enumerate() {
                out[j] = out[j].add(&m.mul(&x));
                out[j + 1] = out[j + 1].add(&m.mul(&y));
            }
            sign = -sign;
        }
        out
    }
    rec(s, t, 0, 0)
}

/// Twice the Gram matrix of a quadratic form given by its lattice
/// coordinates (upper triangle, row-major): diagonal `2·x`, off-diagonal `x`.
fn doubled_gram<R: Ring>(k: usize, c: &[R]) -> Vec<Vec<R>> {
    let mut m = vec![vec![c[0].zero_like(); k]; k];
    let mut idx = 0;
    for i in 0..k {
        for j in i..k {
            if i == j {
                m[i][i] = c[idx].scale(2);
            } else {
                m[i][j] = c[idx].clone();
                m[j][i] = c[idx].clone();
            }
            idx += 1;
        }
    }
    m
}

/// The family discriminant on lattice coordinates over any ring (not G3).
pub fn disc_ring<R: Ring>(family: Family, c: &[R]) -> R {
    match family {
        Family::W1 => term(-4, &[&c[0], &c[0], &c[0]]).add(&term(-27, &[&c[1], &c[1]])),
        Family::F3 => cubic_disc(&c[0], &c[1], &c[2], &c[3]),
        Family::G2 => quartic_disc(&c[0], &c[1], &c[2], &c[3], &c[4]),
        Family::F4 => {
            let f = pencil_det(&doubled_gram(3, &c[..6]), &doubled_gram(3, &c[6..]));
            let f: Vec<R> = f.iter().map(|x| x.div_exact(2)).collect();
            cubic_disc(&f[0], &f[1], &f[2], &f[3])
        }
        Family::G4 => {
            let f = pencil_det(&doubled_gram(4, &c[..10]), &doubled_gram(4, &c[10..]));
            quartic_disc(&f[0], &f[1], &f[2], &f[3], &f[4]).div_exact(256)
        }
        Family::G3 => panic!("G3 has no closed form; use disc_lattice"),
    }
}

/// Exact family discriminant on integer lattice coordinates.
pub fn disc_lattice(family: Family, c: &[BigInt]) -> BigInt {
    match family {
        Family::G3 => {
            let res = macaulay_resultant(&ternary_cubic_partials(c));
            debug_assert!((&res % G3_RESULTANT_FACTOR).is_zero());
            res / G3_RESULTANT_FACTOR
        }
        _ => disc_ring(family, c),
    }
}

/// Overflow-checked `i128` evaluation; `None` for G3 or on overflow.
pub fn disc_i128(family: Family, c: &[i64]) -> Option<i128> {
    if family == Family::G3 {
        return None;
    }
    let v: Vec<Checked> = c.iter().map(|&x| Checked(Some(x as i128))).collect();
    disc_ring(family, &v).0
}

pub fn disc_lattice_i64(family: Family, c: &[i64]) -> BigInt {
    match disc_i128(family, c) {
        Some(v) => BigInt::from(v),
        None => disc_lattice(family, &c.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()),
    }
}

/// `f(c) mod q` without computing `f(c)` exactly (except for G3).
pub fn disc_mod(family: Family, c: &[i64], q: u64) -> u64 {
    let extra: i128 = match family {
        Family::F4 => 2,
        Family::G4 => 256,
        Family::G3 => return rem_euclid_big(&disc_lattice_i64(family, c), q),
        _ => 1,
    };
    let modulus = q as i128 * extra;
    let v: Vec<ModQ> = c.iter().map(|&x| ModQ::new(x as i128, modulus)).collect();
    let r = disc_ring(family, &v);
    debug_assert_eq!(r.q, q as i128);
    r.v as u64
}

/// Exact `∂f/∂x_m` (last lattice coordinate).
pub fn last_partial(family: Family, c: &[i64]) -> BigInt {
    if let Some(v) = last_partial_i128(family, c) {
        return BigInt::from(v);
    }
    let taylor = last_taylor(family, c);
    taylor.get(1).cloned().unwrap_or_else(BigInt::zero)
}

/// Closed-form `∂f/∂x_m` for W1, F3 and G2.
pub fn last_partial_i128(family: Family, c: &[i64]) -> Option<i128> {
    let v: Vec<Checked> = c.iter().map(|&x| Checked(Some(x as i128))).collect();
    match family {
        Family::W1 => v[1].scale(-54).0,
        Family::F3 => cubic_disc_dd(&v[0], &v[1], &v[2], &v[3]).0,
        Family::G2 => quartic_disc_de(&v[0], &v[1], &v[2], &v[3], &v[4]).0,
        _ => None,
    }
}

/// Degree of the family discriminant in the last lattice coordinate (an upper bound).
pub fn last_degree(family: Family) -> usize {
    match family {
        Family::W1 | Family::F3 => 2,
        Family::G2 => 3,
        f => f.disc_degree() as usize,
    }
}

/// Taylor coefficients `T_j` with `f(c + h·e_m) = Σ T_j h^j`; these are
/// integers and `∂^j f/∂x_m^j = j!·T_j`.
pub fn last_taylor(family: Family, c: &[i64]) -> Vec<BigInt> {
    let deg = last_degree(family);
    let m = c.len();
    let mut pt = c.to_vec();
    let xs: Vec<BigRational> = (0..=deg as i64).map(int).collect();
    let ys: Vec<BigRational> = (0..=deg as i64)
        .map(|h| {
            pt[m - 1] = c[m - 1] + h;
            to_rational(&disc_lattice_i64(family, &pt))
        })
        .collect();
    let poly = interpolate(&xs, &ys);
    let mut out: Vec<BigInt> = poly.iter().map(|x| x.to_integer()).collect();
    out.resize(deg + 1, BigInt::zero());
    out
}

/// Exponent vectors of the degree-`d` monomials in three variables, degree-lex.
pub fn ternary_monomials(d: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for i in (0..=d).rev() {
        for j in (0..=d - i).rev() {
            out.push([i, j, d - i - j]);
        }
    }
    out
}

/// The three partial derivatives of a ternary cubic, as quadrics in the
/// order `r², rs, rt, s², st, t²`.
pub fn ternary_cubic_partials(c: &[BigInt]) -> [Vec<BigInt>; 3] {
    let cubic = ternary_monomials(3);
    let quad = ternary_monomials(2);
    let mut out: [Vec<BigInt>; 3] = core::array::from_fn(|_| vec![BigInt::zero(); 6]);
    for (e, coef) in cubic.iter().zip(c) {
        for (v, part) in out.iter_mut().enumerate() {
            if e[v] == 0 {
                continue;
            }
            let mut f = *e;
            f[v] -= 1;
            let idx = quad.iter().position(|q| *q == f).expect("quadric monomial");
            part[idx] += coef * BigInt::from(e[v]);
        }
    }
    out
}

/// Macaulay resultant of three ternary quadrics, normalized so that
/// `Res(x², y², z²) = 1`. Uses the degree-4 Macaulay matrix divided by its
/// extraneous minor, falling back to the generalized characteristic
/// polynomial when that minor vanishes.
pub fn macaulay_resultant(q: &[Vec<BigInt>; 3]) -> BigInt {
    let (m, extraneous) = macaulay_matrix(q);
    let det_a = det_bareiss(shifted_minor(&m, &extraneous, 0));
    if det_a.is_zero() {
        return macaulay_gcp(&m, &extraneous);
    }
    let det_m = det_multimodular(&m);
    debug_assert!((&det_m % &det_a).is_zero());
    det_m / det_a
}

/// The 15×15 Macaulay matrix (rows and columns indexed by degree-4
/// monomials) and the indices of its extraneous minor.
fn macaulay_matrix(q: &[Vec<BigInt>; 3]) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let quad = ternary_monomials(2);
    let mons = ternary_monomials(4);
    let n = mons.len();
    let index = |e: [u32; 3]| mons.iter().position(|m| *m == e).expect("degree-4 monomial");
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (r, alpha) in mons.iter().enumerate() {
        let i = (0..3).find(|&i| alpha[i] >= 2).expect("some exponent is at least 2");
        let mut base = *alpha;
        base[i] -= 2;
        for (beta, coef) in quad.iter().zip(&q[i]) {
            if coef.is_zero() {
                continue;
            }
            let col = index([base[0] + beta[0], base[1] + beta[1], base[2] + beta[2]]);
            m[r][col] = coef.clone();
        }
    }
    let extraneous = (0..n).filter(|&k| mons[k].iter().filter(|&&e| e >= 2).count() >= 2).collect();
    (m, extraneous)
}

fn shifted_minor(m: &[Vec<BigInt>], idx: &[usize], shift: i64) -> Vec<Vec<BigInt>> {
    idx.iter()
        .map(|&i| idx.iter().map(|&j| if i == j { &m[i][j] - shift } else { m[i][j].clone() }).collect())
        .collect()
}

/// Constant term of `Res(F_i − λ x_i²)`, a polynomial in λ of degree
/// 15 − 3, recovered by interpolation.
fn macaulay_gcp(m: &[Vec<BigInt>], extraneous: &[usize]) -> BigInt {
    let degree = m.len() - extraneous.len();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut lambda = 1i64;
    while xs.len() <= degree {
        let da = det_bareiss(shifted_minor(m, extraneous, lambda));
        if !da.is_zero() {
            let mut shifted = m.to_vec();
            for (k, row) in shifted.iter_mut().enumerate() {
                row[k] -= lambda;
            }
            xs.push(int(lambda));
            ys.push(BigRational::new(det_multimodular(&shifted), da));
        }
        lambda += 1;
    }
    let poly = interpolate(&xs, &ys);
    poly.first().map(|c| c.to_integer()).unwrap_or_else(BigInt::zero)
}

fn lcm_denominators(xs: &[BigRational]) -> BigInt {
    xs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Discriminant of a ternary cubic with rational coefficients (layout order).
pub fn disc_ternary_cubic(coeffs: &[BigRational]) -> Result<BigRational> {
    if coeffs.len() != 10 {
        return Err(Error::ShapeMismatch(format!("ternary cubic needs 10 coefficients, got {}", coeffs.len())));
    }
    let l = lcm_denominators(coeffs);
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * &l).to_integer()).collect();
    Ok(BigRational::new(disc_lattice(Family::G3, &ints), num_traits::pow(l, 12)))
}

/// `disc(f) = (−1)^{n(n−1)/2} Res(f, f′) / lc(f)` for `f` given from the
/// leading coefficient down.
pub fn disc_univariate(coeffs: &[BigInt]) -> Result<BigInt> {
    if coeffs.iter().all(|c| c.is_zero()) {
        return Err(Error::ZeroPolynomial);
    }
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Err(Error::pre("polynomial must have degree at least 1"));
    }
    if coeffs[0].is_zero() {
        return Err(Error::pre("leading coefficient must be nonzero"));
    }
    let deriv: Vec<BigInt> = coeffs[..n].iter().enumerate().map(|(i, c)| c * BigInt::from(n - i)).collect();
    let res = resultant(coeffs, &deriv);
    let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
    debug_assert!((&res % &coeffs[0]).is_zero());
    Ok(res / &coeffs[0] * sign)
}

/// Sylvester resultant of two polynomials given leading coefficient first.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let n = f.len() - 1;
    let m = g.len() - 1;
    let size = n + m;
    if size == 0 {
        return BigInt::one();
    }
    let mut s = vec![vec![BigInt::zero(); size]; size];
    for i in 0..m {
        for (j, c) in f.iter().enumerate() {
            s[i][i + j] = c.clone();
        }
    }
    for i in 0..n {
        for (j, c) in g.iter().enumerate() {
            s[m + i][i + j] = c.clone();
        }
    }
    det_bareiss(s)
}

/// Discriminant of a binary form `Σ c_j s^{n−j} t^j` of degree `n = len − 1`.
/// A vanishing leading coefficient is handled by the substitution
/// `t ↦ t + λs` for the least `λ ≥ 1` that makes it nonzero.
pub fn disc_binary_form(coeffs: &[BigRational]) -> Result<BigRational> {
    if coeffs.iter().all(|c| c.is_zero()) {
        return Err(Error::ZeroPolynomial);
    }
    let n = coeffs.len() - 1;
    let l = lcm_denominators(coeffs);
    let mut c: Vec<BigInt> = coeffs.iter().map(|x| (x * &l).to_integer()).collect();
    if c[0].is_zero() {
        let lambda = (1..=n as i64 + 1)
            .map(BigInt::from)
            .find(|lam| {
                // F(1, λ)
                c.iter().rev().fold(BigInt::zero(), |acc, x| acc * lam + x) != BigInt::zero()
            })
            .expect("a nonzero form of degree n has at most n roots");
        c = shear(&c, &lambda);
    }
    let d = disc_univariate(&c)?;
    Ok(BigRational::new(d, num_traits::pow(l, 2 * n - 2)))
}

/// Coefficients of `F(s, t + λs)`.
fn shear(c: &[BigInt], lambda: &BigInt) -> Vec<BigInt> {
    let n = c.len() - 1;
    (0..=n)
        .map(|i| {
            (i..=n)
                .map(|j| &c[j] * crate::arith::binomial(j as u64, i as u64) * num_traits::pow(lambda.clone(), j - i))
                .sum()
        })
        .collect()
}

pub fn disc_w1(a: &BigInt, b: &BigInt) -> BigInt {
    disc_ring(Family::W1, &[a.clone(), b.clone()])
}

/// Discriminant of the pencil `det(As + Bt)` together with a degeneracy flag
/// for pencils whose determinant vanishes identically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PencilDisc {
    pub value: BigRational,
    pub degenerate: bool,
}

/// Coefficients of `det(As + Bt)`, `s^k` first.
pub fn pencil_form(a: &Matrix, b: &Matrix) -> Vec<BigRational> {
    pencil_det(a, b)
}

pub fn disc_pencil(a: &Matrix, b: &Matrix) -> Result<PencilDisc> {
    let k = a.len();
    let square_sym =
        |m: &Matrix| m.len() == k && m.iter().all(|r| r.len() == k) && (0..k).all(|i| (0..i).all(|j| m[i][j] == m[j][i]));
    if k == 0 || !square_sym(a) || !square_sym(b) {
        return Err(Error::ShapeMismatch("pencil needs two symmetric matrices of equal size".into()));
    }
    let form = pencil_form(a, b);
    if form.iter().all(|c| c.is_zero()) {
        return Ok(PencilDisc { value: BigRational::zero(), degenerate: true });
    }
    Ok(PencilDisc { value: disc_binary_form(&form)?, degenerate: false })
}

/// A discriminant value with its family; `degenerate` marks pencils with
/// identically vanishing determinant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscValue {
    pub family: Family,
    pub value: BigRational,
    pub degenerate: bool,
}

/// The family discriminant of any (possibly rational) form.
pub fn disc(v: &FormVector) -> BigRational {
    let family = v.family();
    match family {
        Family::W1 => disc_ring(family, v.coeffs()),
        Family::G3 => disc_ternary_cubic(v.coeffs()).expect("shape checked on construction"),
        _ => {
            let x = v.lattice_rational();
            let l = lcm_denominators(&x);
            let ints: Vec<BigInt> = x.iter().map(|c| (c * &l).to_integer()).collect();
            BigRational::new(disc_lattice(family, &ints), num_traits::pow(l, family.disc_degree() as usize))
        }
    }
}

pub fn evaluate(v: &FormVector) -> DiscValue {
    let degenerate = match v.gram_pair() {
        Some((a, b)) => pencil_form(&a, &b).iter().all(|c| c.is_zero()),
        None => false,
    };
    DiscValue { family: v.family(), value: disc(v), degenerate }
}

/// Integer discriminant of an integral form.
pub fn disc_int(v: &FormVector) -> Result<BigInt> {
    Ok(disc_lattice(v.family(), &v.lattice()?))
}

fn rat_pow(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// `λ(γ)` with `disc(γ·v) = λ(γ)·disc(v)`.
pub fn covariance_factor(family: Family, gamma: &GroupElement) -> Result<BigRational> {
    gamma.check_shape(family)?;
    let d = gamma.dets();
    if d.iter().any(|x| x.is_zero()) {
        return Err(Error::ZeroDeterminant);
    }
    let e = gamma.twist as i64;
    Ok(match family {
        Family::W1 => {
            if e != 0 {
                return Err(Error::Unsupported("W1 is not homogeneous under a twist".into()));
            }
            rat_pow(&d[0], 12)
        }
        Family::F3 => rat_pow(&d[0], 6 + 4 * e),
        Family::G2 => rat_pow(&d[0], 12 + 6 * e),
        Family::G3 => rat_pow(&d[0], 12 + 12 * e),
        Family::F4 => rat_pow(&d[0], 6 + 12 * e) * rat_pow(&d[1], 8),
        Family::G4 => rat_pow(&d[0], 12 + 24 * e) * rat_pow(&d[1], 12),
    })
}

/// `(disc(γ·v), λ(γ)·disc(v))`.
pub fn covariance_check(gamma: &GroupElement, v: &FormVector) -> Result<(BigRational, BigRational)> {
    let lambda = covariance_factor(v.family(), gamma)?;
    let moved = crate::forms::act(gamma, v)?;
    Ok((disc(&moved), lambda * disc(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::forms::{random_form, GroupElement};

    fn bi(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn ri(xs: &[i64]) -> Vec<BigRational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn diag(xs: &[i64]) -> Matrix {
        let n = xs.len();
        (0..n).map(|i| (0..n).map(|j| if i == j { int(xs[i]) } else { int(0) }).collect()).collect()
    }

    #[test]
    fn univariate_examples() {
        assert_eq!(disc_univariate(&bi(&[1, 0, 1])).unwrap(), BigInt::from(-4));
        assert_eq!(disc_univariate(&bi(&[1, 0, 0, 0, 1])).unwrap(), BigInt::from(256));
        assert_eq!(disc_univariate(&bi(&[1, -4, 5, -2])).unwrap(), BigInt::zero());
        assert_eq!(disc_univariate(&bi(&[0, 0])), Err(Error::ZeroPolynomial));
        assert!(disc_univariate(&bi(&[0, 1, 1])).is_err());
        // disc(x^n + c) = (−1)^{n(n−1)/2} n^n c^{n−1}
        for n in 2..7usize {
            for c in [-3i64, 2, 5] {
                let mut f = vec![BigInt::zero(); n + 1];
                f[0] = BigInt::one();
                f[n] = BigInt::from(c);
                let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
                let expect = BigInt::from(sign) * num_traits::pow(BigInt::from(n), n) * num_traits::pow(BigInt::from(c), n - 1);
                assert_eq!(disc_univariate(&f).unwrap(), expect);
            }
        }
    }

    #[test]
    fn binary_form_examples() {
        assert_eq!(disc_binary_form(&ri(&[0, 1, 1, 0])).unwrap(), int(1));
        assert_eq!(disc_binary_form(&ri(&[1, 0, 0, 1])).unwrap(), int(-27));
        assert_eq!(disc_binary_form(&ri(&[0, 0, 1, 0, 0])).unwrap(), int(0));
        assert_eq!(disc_binary_form(&ri(&[0, 0, 0])), Err(Error::ZeroPolynomial));
        // rational input: disc(x/2) scales by 2^{-(2n-2)}
        let half: Vec<BigRational> = [1, 0, 0, 1].iter().map(|&x| rat(x, 2)).collect();
        assert_eq!(disc_binary_form(&half).unwrap(), rat(-27, 16));
    }

    #[test]
    fn closed_forms_match_sylvester() {
        for seed in 0..200u64 {
            for family in [Family::F3, Family::G2] {
                let mut v = random_form(family, 6, seed);
                if seed % 3 == 0 {
                    // force a vanishing leading coefficient
                    let mut c = v.coeffs().to_vec();
                    c[0] = int(0);
                    v = FormVector::new(family, c).unwrap();
                }
                if v.is_zero() {
                    continue;
                }
                assert_eq!(disc(&v), disc_binary_form(v.coeffs()).unwrap(), "{v}");
            }
        }
    }

    #[test]
    fn weierstrass_examples() {
        assert_eq!(disc_w1(&BigInt::zero(), &BigInt::zero()), BigInt::zero());
        assert_eq!(disc_w1(&BigInt::from(-1), &BigInt::zero()), BigInt::from(4));
        assert_eq!(disc_w1(&BigInt::zero(), &BigInt::one()), BigInt::from(-27));
    }

    #[test]
    fn pencil_examples() {
        let r = disc_pencil(&diag(&[1, 1, 1]), &diag(&[1, 2, 3])).unwrap();
        assert_eq!(r, PencilDisc { value: int(4), degenerate: false });
        let r = disc_pencil(&diag(&[1, 1, 1]), &diag(&[1, 1, 1])).unwrap();
        assert_eq!(r, PencilDisc { value: int(0), degenerate: false });
        let r = disc_pencil(&diag(&[1, 0, 0]), &diag(&[2, 0, 0])).unwrap();
        assert!(r.degenerate);
        assert!(disc_pencil(&diag(&[1, 1]), &diag(&[1, 1, 1])).is_err());
    }

    #[test]
    fn pair_families_are_scaled_pencil_discriminants() {
        for seed in 0..50u64 {
            let v = random_form(Family::F4, 5, seed);
            let (a, b) = v.gram_pair().unwrap();
            assert_eq!(disc(&v), disc_pencil(&a, &b).unwrap().value * int(256));
            let w = random_form(Family::G4, 3, seed);
            let (a, b) = w.gram_pair().unwrap();
            assert_eq!(disc(&w), disc_pencil(&a, &b).unwrap().value * int(65536));
            assert!(disc(&w).denom().is_one() && disc(&v).denom().is_one());
        }
    }

    #[test]
    fn ternary_cubic_examples() {
        let xyz = ri(&[0, 0, 0, 0, 1, 0, 0, 0, 0, 0]);
        assert_eq!(disc_ternary_cubic(&xyz).unwrap(), int(0));
        let fermat = ri(&[1, 0, 0, 0, 0, 0, 1, 0, 0, 1]);
        assert_eq!(disc_ternary_cubic(&fermat).unwrap(), int(19683));
        // y²z − x³ − Axz² − Bz³ in (r, s, t) = (x, y, z)
        for (a, b) in [(1i64, 0i64), (0, 1), (2, 3), (-1, 5), (-3, 2)] {
            let c = ri(&[-1, 0, 0, 0, 0, -a, 0, 1, 0, -b]);
            assert_eq!(disc_ternary_cubic(&c).unwrap(), int(16 * (4 * a * a * a + 27 * b * b)));
        }
    }

    #[test]
    fn gcp_fallback_agrees_with_minor_division() {
        for seed in 0..40u64 {
            let v = random_form(Family::G3, 4, seed);
            let (m, ext) = macaulay_matrix(&ternary_cubic_partials(&v.lattice().unwrap()));
            let det_a = det_bareiss(shifted_minor(&m, &ext, 0));
            if det_a.is_zero() {
                continue;
            }
            assert_eq!(macaulay_gcp(&m, &ext), det_multimodular(&m) / det_a);
        }
    }

    #[test]
    fn covariance_examples() {
        for family in Family::ALL {
            let v = random_form(family, 4, 17);
            let (l, r) = covariance_check(&GroupElement::identity(family), &v).unwrap();
            assert_eq!(l, r);
        }
        let g = GroupElement::from_int_blocks(Family::F3, &[vec![vec![1, 1], vec![0, 1]]]);
        let v = random_form(Family::F3, 9, 3);
        let (l, r) = covariance_check(&g, &v).unwrap();
        assert_eq!(l, r);
        assert_eq!(l, disc(&v));
        let g = GroupElement::for_family(Family::F4, vec![diag(&[1, 1]), diag(&[1, 1, 2])]);
        assert_eq!(covariance_factor(Family::F4, &g).unwrap(), int(256));
        let v = random_form(Family::F4, 4, 8);
        let (l, r) = covariance_check(&g, &v).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn fast_paths_agree_with_exact() {
        for family in Family::ALL {
            for seed in 0..30u64 {
                let v = random_form(family, 7, seed);
                let c = v.lattice_i64().unwrap();
                let exact = disc_lattice(family, &v.lattice().unwrap());
                assert_eq!(disc_lattice_i64(family, &c), exact);
                for q in [4u64, 9, 25, 49, 121] {
                    assert_eq!(disc_mod(family, &c, q), rem_euclid_big(&exact, q), "{family} {q}");
                }
            }
        }
    }

    #[test]
    fn last_partials() {
        for family in [Family::W1, Family::F3, Family::G2] {
            for seed in 0..20u64 {
                let c = random_form(family, 9, seed).lattice_i64().unwrap();
                let t = last_taylor(family, &c);
                assert_eq!(BigInt::from(last_partial_i128(family, &c).unwrap()), t[1]);
                assert_eq!(t[0], disc_lattice_i64(family, &c));
            }
        }
        // (0,1,0,0): ∂f₃/∂d = −4
        assert_eq!(last_partial(Family::F3, &[0, 1, 0, 0]), BigInt::from(-4));
    }
}
