//! Representation families, their coefficient layouts, and group actions.
//!
//! Six families are registered:
//!
//! | id | space | m | disc degree |
//! |----|-------|---|-------------|
//! | W1 | Weierstrass pairs (A, B) of `y² = x³ + Ax + B` | 2 | 2 in B (weights 4, 6) |
//! | F3 | binary cubic forms | 4 | 4 |
//! | G2 | binary quartic forms | 5 | 6 |
//! | G3 | ternary cubic forms | 10 | 12 |
//! | F4 | pairs of ternary quadratic forms | 12 | 12 |
//! | G4 | pairs of quaternary quadratic forms | 20 | 24 |
//!
//! Coefficients are stored in a fixed layout. Binary and ternary forms store
//! monomial coefficients in degree-lex order (`s³, s²t, st², t³` for F3;
//! `r³, r²s, r²t, rs², rst, rt², s³, s²t, st², t³` for G3). Pairs of quadratic
//! forms store the two symmetric Gram matrices, each as its upper triangle in
//! row-major order (`a11, a12, a13, a22, a23, a33`, then the same for B).
//! Off-diagonal Gram entries are half the mixed coefficient of the form, so an
//! integer-valued quadratic form has half-integer off-diagonal entries.
//!
//! The *lattice coordinates* of a form are the coordinates in which sieving
//! and residue counting happen: the stored coefficients themselves, except
//! that Gram families use the form coefficients (diagonal entries and doubled
//! off-diagonal entries). A form is `integral` when its lattice coordinates are
//! all integers.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{det_rational, is_integer};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    W1,
    F3,
    G2,
    G3,
    F4,
    G4,
}

/// Immutable description of a registered family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyDescriptor {
    pub family: Family,
    /// Ambient dimension.
    pub m: usize,
    /// Degree of the discriminant polynomial. For W1 this is the degree in B;
    /// under the weights (4, 6) it is weighted-homogeneous of weight 12.
    pub d: u32,
    pub group_shape: &'static str,
    pub layout: &'static [&'static str],
}

const W1_LAYOUT: &[&str] = &["A", "B"];
const F3_LAYOUT: &[&str] = &["s^3", "s^2t", "st^2", "t^3"];
const G2_LAYOUT: &[&str] = &["s^4", "s^3t", "s^2t^2", "st^3", "t^4"];
const G3_LAYOUT: &[&str] =
    &["r^3", "r^2s", "r^2t", "rs^2", "rst", "rt^2", "s^3", "s^2t", "st^2", "t^3"];
const F4_LAYOUT: &[&str] = &[
    "A11", "A12", "A13", "A22", "A23", "A33", "B11", "B12", "B13", "B22", "B23", "B33",
];
const G4_LAYOUT: &[&str] = &[
    "A11", "A12", "A13", "A14", "A22", "A23", "A24", "A33", "A34", "A44", "B11", "B12", "B13",
    "B14", "B22", "B23", "B24", "B33", "B34", "B44",
];

impl Family {
    pub const ALL: [Family; 6] = [Family::W1, Family::F3, Family::G2, Family::G3, Family::F4, Family::G4];

    pub fn id(self) -> &'static str {
        match self {
            Family::W1 => "W1",
            Family::F3 => "F3",
            Family::G2 => "G2",
            Family::G3 => "G3",
            Family::F4 => "F4",
            Family::G4 => "G4",
        }
    }

    pub fn dim(self) -> usize {
        self.layout().len()
    }

    pub fn disc_degree(self) -> u32 {
        match self {
            Family::W1 => 2,
            Family::F3 => 4,
            Family::G2 => 6,
            Family::G3 | Family::F4 => 12,
            Family::G4 => 24,
        }
    }

    pub fn layout(self) -> &'static [&'static str] {
        match self {
            Family::W1 => W1_LAYOUT,
            Family::F3 => F3_LAYOUT,
            Family::G2 => G2_LAYOUT,
            Family::G3 => G3_LAYOUT,
            Family::F4 => F4_LAYOUT,
            Family::G4 => G4_LAYOUT,
        }
    }

    pub fn group_shape(self) -> &'static str {
        match self {
            Family::W1 => "Gm acting with weights (4, 6)",
            Family::F3 => "GL2, twisted by det^-1",
            Family::G2 => "GL2, twisted by det^-2",
            Family::G3 => "GL3, twisted by det^-1",
            Family::F4 => "GL2 x SL3 (GL3 accepted)",
            Family::G4 => "GL2 x SL4 (GL4 accepted)",
        }
    }

    /// Sizes of the square blocks of a group element acting on this family.
    pub fn block_sizes(self) -> &'static [usize] {
        match self {
            Family::W1 => &[1],
            Family::F3 | Family::G2 => &[2],
            Family::G3 => &[3],
            Family::F4 => &[2, 3],
            Family::G4 => &[2, 4],
        }
    }

    /// Power of the first block's determinant multiplying the substituted form.
    pub fn default_twist(self) -> i32 {
        match self {
            Family::F3 | Family::G3 => -1,
            Family::G2 => -2,
            Family::W1 | Family::F4 | Family::G4 => 0,
        }
    }

    /// Size of the Gram matrices for pair-of-quadrics families.
    pub fn gram_size(self) -> Option<usize> {
        match self {
            Family::F4 => Some(3),
            Family::G4 => Some(4),
            _ => None,
        }
    }

    /// Exponent vectors of the monomials for families that are single forms.
    pub(crate) fn monomials(self) -> Option<Vec<Vec<u32>>> {
        match self {
            Family::F3 => Some((0..=3).map(|j| vec![3 - j, j]).collect()),
            Family::G2 => Some((0..=4).map(|j| vec![4 - j, j]).collect()),
            Family::G3 => {
                let mut out = Vec::new();
                for i in (0..=3u32).rev() {
                    for j in (0..=3 - i).rev() {
                        out.push(vec![i, j, 3 - i - j]);
                    }
                }
                Some(out)
            }
            _ => None,
        }
    }

    pub fn descriptor(self) -> FamilyDescriptor {
        FamilyDescriptor {
            family: self,
            m: self.dim(),
            d: self.disc_degree(),
            group_shape: self.group_shape(),
            layout: self.layout(),
        }
    }
}

/// Descriptor lookup by textual id (`"F3"`, `"g2"`, ...).
pub fn family_info(id: &str) -> Result<FamilyDescriptor> {
    Ok(id.parse::<Family>()?.descriptor())
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown family '{s}'")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// A point of V(ℚ) for one of the families, in the fixed layout.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormVector {
    family: Family,
    coeffs: Vec<BigRational>,
    integral: bool,
}

/// Row-major symmetric matrix over ℚ.
pub type Matrix = Vec<Vec<BigRational>>;

impl FormVector {
    pub fn new(family: Family, coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.len() != family.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{family} expects {} coefficients, got {}",
                family.dim(),
                coeffs.len()
            )));
        }
        let integral = lattice_of(family, &coeffs).iter().all(is_integer);
        Ok(FormVector { family, coeffs, integral })
    }

    /// Stored coefficients given as integers (for Gram families: integer Gram entries).
    pub fn from_ints(family: Family, coeffs: &[i64]) -> Result<Self> {
        Self::new(family, coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    /// Builds a form from its lattice coordinates.
    pub fn from_lattice(family: Family, coords: &[BigInt]) -> Result<Self> {
        if coords.len() != family.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{family} expects {} lattice coordinates, got {}",
                family.dim(),
                coords.len()
            )));
        }
        let k = family.gram_size();
        let coeffs = coords
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let c = BigRational::from_integer(c.clone());
                match k {
                    Some(k) if !is_gram_diagonal(k, idx) => c / BigInt::from(2),
                    _ => c,
                }
            })
            .collect();
        Self::new(family, coeffs)
    }

    pub fn from_lattice_i64(family: Family, coords: &[i64]) -> Result<Self> {
        let big: Vec<BigInt> = coords.iter().map(|&c| BigInt::from(c)).collect();
        Self::from_lattice(family, &big)
    }

    pub fn zero(family: Family) -> Self {
        FormVector { family, coeffs: vec![BigRational::zero(); family.dim()], integral: true }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lattice coordinates over ℚ (see the module docs).
    pub fn lattice_rational(&self) -> Vec<BigRational> {
        lattice_of(self.family, &self.coeffs)
    }

    /// Integer lattice coordinates, or [`Error::NonIntegral`].
    pub fn lattice(&self) -> Result<Vec<BigInt>> {
        if !self.integral {
            return Err(Error::NonIntegral);
        }
        Ok(self.lattice_rational().into_iter().map(|c| c.to_integer()).collect())
    }

    /// Integer lattice coordinates as `i64`, when they fit.
    pub fn lattice_i64(&self) -> Result<Vec<i64>> {
        self.lattice()?
            .iter()
            .map(|c| c.to_i64().ok_or_else(|| Error::Unsupported("coordinate exceeds i64".into())))
            .collect()
    }

    pub fn scaled(&self, lambda: &BigRational) -> Self {
        Self::new(self.family, self.coeffs.iter().map(|c| c * lambda).collect()).expect("same shape")
    }

    /// The two Gram matrices of a pair-of-quadrics family.
    pub fn gram_pair(&self) -> Option<(Matrix, Matrix)> {
        let k = self.family.gram_size()?;
        let half = k * (k + 1) / 2;
        Some((unpack_sym(k, &self.coeffs[..half]), unpack_sym(k, &self.coeffs[half..])))
    }

    pub fn from_gram_pair(family: Family, a: &Matrix, b: &Matrix) -> Result<Self> {
        let k = family
            .gram_size()
            .ok_or_else(|| Error::ShapeMismatch(format!("{family} is not a pair-of-quadrics family")))?;
        for m in [a, b] {
            if m.len() != k || m.iter().any(|r| r.len() != k) {
                return Err(Error::ShapeMismatch(format!("{family} needs {k}x{k} Gram matrices")));
            }
            for i in 0..k {
                for j in 0..i {
                    if m[i][j] != m[j][i] {
                        return Err(Error::ShapeMismatch("Gram matrix is not symmetric".into()));
                    }
                }
            }
        }
        let mut coeffs = pack_sym(a);
        coeffs.extend(pack_sym(b));
        Self::new(family, coeffs)
    }
}

fn is_gram_diagonal(k: usize, idx: usize) -> bool {
    let half = k * (k + 1) / 2;
    let mut idx = idx % half;
    for i in 0..k {
        let row = k - i;
        if idx < row {
            return idx == 0;
        }
        idx -= row;
    }
    unreachable!()
}

fn lattice_of(family: Family, coeffs: &[BigRational]) -> Vec<BigRational> {
    match family.gram_size() {
        None => coeffs.to_vec(),
        Some(k) => coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| if is_gram_diagonal(k, idx) { c.clone() } else { c * BigInt::from(2) })
            .collect(),
    }
}

fn unpack_sym(k: usize, entries: &[BigRational]) -> Matrix {
    let mut m = vec![vec![BigRational::zero(); k]; k];
    let mut it = entries.iter();
    for i in 0..k {
        for j in i..k {
            let v = it.next().expect("upper triangle").clone();
            m[i][j] = v.clone();
            m[j][i] = v;
        }
    }
    m
}

fn pack_sym(m: &Matrix) -> Vec<BigRational> {
    let k = m.len();
    let mut out = Vec::with_capacity(k * (k + 1) / 2);
    for (i, row) in m.iter().enumerate() {
        out.extend(row[i..].iter().cloned());
    }
    out
}

fn fmt_rational(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Canonical textual encoding `family:c1,c2,...,cm` with rationals as `num/den`.
impl fmt::Display for FormVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.family)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&fmt_rational(c))?;
        }
        Ok(())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for FormVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (fam, rest) =
            s.split_once(':').ok_or_else(|| Error::Parse(format!("expected 'family:c1,...', got '{s}'")))?;
        let family: Family = fam.parse()?;
        let coeffs = rest.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        FormVector::new(family, coeffs)
    }
}

/// An element of the acting group: square rational blocks plus the exponent
/// `twist` of `det(blocks[0])` multiplying the result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    pub blocks: Vec<Matrix>,
    pub twist: i32,
}

fn identity_matrix(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![BigRational::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

pub fn transpose(a: &Matrix) -> Matrix {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect()
}

fn mat_inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, piv);
        let inv = aug[col][col].recip();
        for x in aug[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in 0..2 * n {
                    let v = &f * &aug[col][c];
                    aug[r][c] -= v;
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

impl GroupElement {
    pub fn new(blocks: Vec<Matrix>, twist: i32) -> Self {
        GroupElement { blocks, twist }
    }

    /// Blocks given as integer matrices, with the family's default twist.
    pub fn from_int_blocks(family: Family, blocks: &[Vec<Vec<i64>>]) -> Self {
        let blocks = blocks
            .iter()
            .map(|b| b.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect())
            .collect();
        GroupElement { blocks, twist: family.default_twist() }
    }

    pub fn for_family(family: Family, blocks: Vec<Matrix>) -> Self {
        GroupElement { blocks, twist: family.default_twist() }
    }

    pub fn identity(family: Family) -> Self {
        Self::for_family(family, family.block_sizes().iter().map(|&n| identity_matrix(n)).collect())
    }

    pub fn dets(&self) -> Vec<BigRational> {
        self.blocks.iter().map(|b| det_rational(b)).collect()
    }

    pub fn is_integral_unimodular(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().flatten().all(is_integer))
            && self.dets().iter().all(|d| d.abs().is_one())
    }

    pub fn check_shape(&self, family: Family) -> Result<()> {
        let sizes = family.block_sizes();
        let ok = self.blocks.len() == sizes.len()
            && self.blocks.iter().zip(sizes).all(|(b, &n)| b.len() == n && b.iter().all(|r| r.len() == n));
        if ok {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!("group element does not match {family} blocks {sizes:?}")))
        }
    }

    /// Blockwise product `self · other`; both must carry the same twist.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.blocks.len() != other.blocks.len() || self.twist != other.twist {
            return Err(Error::ShapeMismatch("cannot compose elements of different shape or twist".into()));
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| mat_mul(a, b)).collect();
        Ok(GroupElement { blocks, twist: self.twist })
    }

    pub fn inverse(&self) -> Result<Self> {
        let blocks = self.blocks.iter().map(|b| mat_inverse(b).ok_or(Error::ZeroDeterminant)).collect::<Result<_>>()?;
        Ok(GroupElement { blocks, twist: self.twist })
    }
}

/// Multivariate polynomial as (exponents, coefficient) terms.
type Terms = Vec<(Vec<u32>, BigRational)>;

fn terms_mul(a: &Terms, b: &Terms) -> Terms {
    let mut out: Terms = Vec::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let c = ca * cb;
            match out.iter_mut().find(|(oe, _)| *oe == e) {
                Some((_, oc)) => *oc += c,
                None => out.push((e, c)),
            }
        }
    }
    out
}

/// Coefficients of `x(u · γ)` for a form `x` with the given monomial basis.
fn substitute(monomials: &[Vec<u32>], coeffs: &[BigRational], gamma: &Matrix) -> Vec<BigRational> {
    let nvars = gamma.len();
    // y_j = sum_i u_i gamma[i][j]
    let linear: Vec<Terms> = (0..nvars)
        .map(|j| {
            (0..nvars)
                .filter(|&i| !gamma[i][j].is_zero())
                .map(|i| {
                    let mut e = vec![0u32; nvars];
                    e[i] = 1;
                    (e, gamma[i][j].clone())
                })
                .collect()
        })
        .collect();
    let mut out = vec![BigRational::zero(); monomials.len()];
    for (mono, c) in monomials.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        let mut prod: Terms = vec![(vec![0; nvars], c.clone())];
        for (j, &e) in mono.iter().enumerate() {
            for _ in 0..e {
                prod = terms_mul(&prod, &linear[j]);
            }
        }
        for (e, v) in prod {
            let idx = monomials.iter().position(|m| *m == e).expect("homogeneous of fixed degree");
            out[idx] += v;
        }
    }
    out
}

fn rational_pow(x: &BigRational, e: i32) -> BigRational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// `γ · v`.
///
/// * F3, G2, G3: `det(γ)^twist · v((s, t, …) · γ)` with row-vector substitution.
/// * F4, G4: blocks `(γ₂, γₖ)`; first `(A, B) ↦ (γ₁₁A + γ₁₂B, γ₂₁A + γ₂₂B)`,
///   then `M ↦ γₖ M γₖᵀ` on both matrices, then the twist scalar.
/// * W1: a 1×1 block λ acts by `(A, B) ↦ (λ⁴A, λ⁶B)` times the twist scalar.
///
/// These are left actions: `act(g, act(h, v)) = act(g·h, v)`.
pub fn act(gamma: &GroupElement, v: &FormVector) -> Result<FormVector> {
    let family = v.family();
    gamma.check_shape(family)?;
    let dets = gamma.dets();
    if dets.iter().any(|d| d.is_zero()) {
        return Err(Error::ZeroDeterminant);
    }
    let scalar = rational_pow(&dets[0], gamma.twist);
    let coeffs: Vec<BigRational> = match family {
        Family::W1 => {
            let l = &gamma.blocks[0][0][0];
            let l2 = l * l;
            let l4 = &l2 * &l2;
            let l6 = &l4 * &l2;
            vec![&v.coeffs[0] * l4, &v.coeffs[1] * l6]
        }
        Family::F3 | Family::G2 | Family::G3 => {
            let monos = family.monomials().expect("single form");
            substitute(&monos, &v.coeffs, &gamma.blocks[0])
        }
        Family::F4 | Family::G4 => {
            let (a, b) = v.gram_pair().expect("gram family");
            let g2 = &gamma.blocks[0];
            let gk = &gamma.blocks[1];
            let comb = |x: &BigRational, y: &BigRational| -> Matrix {
                a.iter()
                    .zip(&b)
                    .map(|(ra, rb)| ra.iter().zip(rb).map(|(ea, eb)| x * ea + y * eb).collect())
                    .collect()
            };
            let a1 = comb(&g2[0][0], &g2[0][1]);
            let b1 = comb(&g2[1][0], &g2[1][1]);
            let gkt = transpose(gk);
            let a2 = mat_mul(&mat_mul(gk, &a1), &gkt);
            let b2 = mat_mul(&mat_mul(gk, &b1), &gkt);
            let mut c = pack_sym(&a2);
            c.extend(pack_sym(&b2));
            c
        }
    };
    FormVector::new(family, coeffs.into_iter().map(|c| c * &scalar).collect())
}

/// Uniform integral form with lattice coordinates in `[-bound, bound]`,
/// deterministic in `seed`.
pub fn random_form(family: Family, bound: u64, seed: u64) -> FormVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_form_with(family, bound, &mut rng)
}

pub fn random_form_with<R: Rng>(family: Family, bound: u64, rng: &mut R) -> FormVector {
    let b = bound as i64;
    let coords: Vec<i64> = (0..family.dim()).map(|_| rng.gen_range(-b..=b)).collect();
    FormVector::from_lattice_i64(family, &coords).expect("dimension matches")
}

/// Canonical residues in `[0, q)` of the lattice coordinates.
pub fn reduce_mod(v: &FormVector, q: u64) -> Result<Vec<u64>> {
    if q < 2 {
        return Err(Error::pre("modulus must be at least 2"));
    }
    Ok(v.lattice()?.iter().map(|c| crate::arith::rem_euclid_big(c, q)).collect())
}

/// A random integral unimodular element (product of elementary moves, swaps and
/// sign flips) for the family, with determinant-one blocks where the family's
/// group requires SL.
pub fn random_unimodular<R: Rng>(family: Family, rng: &mut R, steps: usize) -> GroupElement {
    let sizes = family.block_sizes();
    let blocks = sizes
        .iter()
        .enumerate()
        .map(|(bi, &n)| {
            let special = matches!(family, Family::F4 | Family::G4) && bi == 1;
            random_unimodular_matrix(n, rng, steps, special)
        })
        .collect();
    GroupElement::for_family(family, blocks)
}

/// Random element of GL_n(ℤ) (or SL_n(ℤ) when `special`).
pub fn random_unimodular_matrix<R: Rng>(n: usize, rng: &mut R, steps: usize, special: bool) -> Matrix {
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    if n == 1 {
        let s = if special || rng.gen_bool(0.5) { 1 } else { -1 };
        return vec![vec![BigRational::from_integer(s.into())]];
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        match rng.gen_range(0..4) {
            0 | 1 => {
                let k: i64 = rng.gen_range(-2..=2);
                for c in 0..n {
                    m[i][c] += k * m[j][c];
                }
            }
            2 => {
                // swap with a sign so the determinant stays 1
                m.swap(i, j);
                for c in 0..n {
                    m[i][c] = -m[i][c];
                }
            }
            _ => {
                if !special {
                    for c in 0..n {
                        m[i][c] = -m[i][c];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r.into_iter().map(|x| BigRational::from_integer(x.into())).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn fv(family: Family, c: &[i64]) -> FormVector {
        FormVector::from_ints(family, c).unwrap()
    }

    #[test]
    fn descriptors() {
        let d = family_info("F3").unwrap();
        assert_eq!((d.m, d.d), (4, 4));
        let d = family_info("g4").unwrap();
        assert_eq!((d.m, d.d), (20, 24));
        assert_eq!(family_info("W1").unwrap().m, 2);
        assert_eq!(Family::G3.descriptor().m, 10);
        assert_eq!(Family::F4.descriptor().m, 12);
        assert_eq!(Family::G2.descriptor().d, 6);
        assert!(family_info("F5").is_err());
        for f in Family::ALL {
            assert_eq!(f.layout().len(), f.dim());
        }
    }

    #[test]
    fn g3_monomial_order_matches_layout() {
        let monos = Family::G3.monomials().unwrap();
        assert_eq!(monos[0], vec![3, 0, 0]);
        assert_eq!(monos[2], vec![2, 0, 1]);
        assert_eq!(monos[4], vec![1, 1, 1]);
        assert_eq!(monos[9], vec![0, 0, 3]);
    }

    #[test]
    fn identity_acts_trivially() {
        for f in Family::ALL {
            let v = random_form(f, 5, 3);
            assert_eq!(act(&GroupElement::identity(f), &v).unwrap(), v);
        }
    }

    #[test]
    fn f3_swap() {
        let g = GroupElement::from_int_blocks(Family::F3, &[vec![vec![0, 1], vec![1, 0]]]);
        let v = fv(Family::F3, &[1, 2, 3, 4]);
        assert_eq!(act(&g, &v).unwrap(), fv(Family::F3, &[-4, -3, -2, -1]));
    }

    #[test]
    fn g3_diagonal_scaling() {
        let p = 5i64;
        let g = GroupElement::for_family(
            Family::G3,
            vec![vec![
                vec![int(1), int(0), int(0)],
                vec![int(0), int(1), int(0)],
                vec![int(0), int(0), rat(1, p)],
            ]],
        );
        let v = random_form(Family::G3, 9, 11);
        let w = act(&g, &v).unwrap();
        let monos = Family::G3.monomials().unwrap();
        for ((mono, a), b) in monos.iter().zip(v.coeffs()).zip(w.coeffs()) {
            let k = mono[2] as i32;
            assert_eq!(b, &(a * rational_pow(&int(p), 1 - k)));
        }
    }

    #[test]
    fn gram_lattice_round_trip() {
        let v = random_form(Family::F4, 7, 1);
        let back = FormVector::from_lattice(Family::F4, &v.lattice().unwrap()).unwrap();
        assert_eq!(back, v);
        let (a, b) = v.gram_pair().unwrap();
        assert_eq!(FormVector::from_gram_pair(Family::F4, &a, &b).unwrap(), v);
        // odd mixed coefficient -> half-integer Gram entry, still integral as a form
        let w = FormVector::from_lattice_i64(Family::F4, &[1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(w.coeffs()[1], rat(1, 2));
        assert!(w.is_integral());
        let h = FormVector::new(Family::F4, {
            let mut c = vec![int(0); 12];
            c[1] = rat(1, 4);
            c
        })
        .unwrap();
        assert!(!h.is_integral());
    }

    #[test]
    fn textual_encoding() {
        let v: FormVector = "F4:0,0,1/2,-1,0,0,1,0,0,0,0,1".parse().unwrap();
        assert_eq!(v.to_string(), "F4:0,0,1/2,-1,0,0,1,0,0,0,0,1");
        assert!("F3:1,2,3".parse::<FormVector>().is_err());
        assert!("X9:1".parse::<FormVector>().is_err());
        assert!("F3:1,2,3,1/0".parse::<FormVector>().is_err());
    }

    #[test]
    fn random_form_contract() {
        assert!(random_form(Family::F3, 0, 42).is_zero());
        assert_eq!(random_form(Family::G3, 10, 7), random_form(Family::G3, 10, 7));
        let v = random_form(Family::G2, 10, 99);
        assert_eq!(v.coeffs().len(), 5);
        assert!(v.lattice_i64().unwrap().iter().all(|c| (-10..=10).contains(c)));
    }

    #[test]
    fn reduce_mod_examples() {
        assert_eq!(reduce_mod(&fv(Family::F3, &[3, 3, 3, 3]), 3).unwrap(), vec![0, 0, 0, 0]);
        assert_eq!(reduce_mod(&fv(Family::F3, &[-1, 0, 1, 2]), 4).unwrap(), vec![3, 0, 1, 2]);
        let p = 7;
        assert_eq!(reduce_mod(&fv(Family::F3, &[p * p, p, 1, 0]), (p * p) as u64).unwrap(), vec![0, 7, 1, 0]);
        let half: FormVector = "F3:1/2,0,0,0".parse().unwrap();
        assert_eq!(reduce_mod(&half, 3), Err(Error::NonIntegral));
    }

    #[test]
    fn shape_and_determinant_errors() {
        let v = fv(Family::F3, &[1, 0, 0, 1]);
        let bad = GroupElement::identity(Family::G3);
        assert!(matches!(act(&bad, &v), Err(Error::ShapeMismatch(_))));
        let sing = GroupElement::from_int_blocks(Family::F3, &[vec![vec![1, 2], vec![2, 4]]]);
        assert_eq!(act(&sing, &v), Err(Error::ZeroDeterminant));
    }

    #[test]
    fn unimodular_generator() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for f in Family::ALL {
            for _ in 0..20 {
                let g = random_unimodular(f, &mut rng, 12);
                assert!(g.is_integral_unimodular());
                if matches!(f, Family::F4 | Family::G4) {
                    assert!(g.dets()[1].is_one());
                }
            }
        }
    }
}
