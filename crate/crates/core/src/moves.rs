//! Rational group moves on weak multiples of p².
//!
//! A weak multiple of `p²` is moved by an element of `G(ℚ)` either to a form
//! whose discriminant is smaller by exactly `p²` (F3, F4) or to a form with
//! the same discriminant that is a strong multiple (G3). Moves act on
//! normalized representatives; the normalizers below find an integral
//! unimodular change of variables into that normal form. All moves require
//! `p > 2`.
//!
//! The embedding `φ` sends binary quartics into pairs of ternary quadratic
//! forms with `f₄(φ(v)) = g₂(v)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::arith::{int, is_prime_u64, rat, rem_euclid_big, valuation};
use crate::error::{Error, Result};
use crate::forms::{act, Family, FormVector, GroupElement, Matrix};
use crate::invariants::{covariance_factor, disc, pencil_form};
use crate::localdensity::{classify_point, PointClass};

/// One application of a move: `output = act(gamma, input.scaled(scale))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveRecord {
    pub family: Family,
    pub p: u64,
    pub input: FormVector,
    pub output: FormVector,
    pub gamma: GroupElement,
    pub scale: BigRational,
    /// `disc(output) / disc(input)`, determined by `gamma` and `scale`.
    pub disc_ratio: BigRational,
    pub target_class: PointClass,
}

fn check_p(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::Unsupported("moves need an odd prime".into()));
    }
    if !is_prime_u64(p) {
        return Err(Error::pre(format!("{p} is not prime")));
    }
    Ok(())
}

fn check_family(v: &FormVector, family: Family) -> Result<()> {
    if v.family() != family {
        return Err(Error::ShapeMismatch(format!("expected a {family} form, got {}", v.family())));
    }
    if !v.is_integral() {
        return Err(Error::NonIntegral);
    }
    Ok(())
}

/// `v_p(x) ≥ k` for a p-integral-or-better rational (zero counts as divisible).
fn divisible(x: &BigRational, p: u64, k: i64) -> bool {
    valuation(x, p).is_none_or(|v| v >= k)
}

fn is_unit(x: &BigRational, p: u64) -> bool {
    valuation(x, p) == Some(0)
}

fn diag(xs: &[BigRational]) -> Matrix {
    let n = xs.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { xs[i].clone() } else { BigRational::zero() }).collect()).collect()
}

fn to_matrix(m: &[Vec<i128>]) -> Matrix {
    m.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect()
}

/// Assembles the record, checking integrality and the discriminant law.
fn finish(family: Family, p: u64, input: &FormVector, gamma: GroupElement, scale: BigRational) -> Result<MoveRecord> {
    let output = act(&gamma, &input.scaled(&scale))?;
    if !output.is_integral() {
        return Err(Error::Inconsistent("move produced a non-integral form".into()));
    }
    let ratio = covariance_factor(family, &gamma)? * num_traits::pow(scale.clone(), family.disc_degree() as usize);
    if disc(&output) != &ratio * disc(input) {
        return Err(Error::Inconsistent("discriminant law failed".into()));
    }
    let target_class = classify_point(&output, p)?;
    Ok(MoveRecord { family, p, input: input.clone(), output, gamma, scale, disc_ratio: ratio, target_class })
}

/// Integral unimodular matrix whose first row is the primitive vector `v`.
pub fn complete_unimodular(v: &[i128]) -> Result<Vec<Vec<i128>>> {
    let n = v.len();
    let mut w = v.to_vec();
    // invariant: w = v · V, and `inv` holds V⁻¹
    let mut inv: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    loop {
        let Some(i) = (0..n).filter(|&k| w[k] != 0).min_by_key(|&k| w[k].unsigned_abs()) else {
            return Err(Error::pre("zero vector"));
        };
        let mut reduced = false;
        for j in 0..n {
            if j != i && w[j] != 0 {
                let q = w[j] / w[i];
                w[j] -= q * w[i];
                for c in 0..n {
                    inv[i][c] += q * inv[j][c];
                }
                reduced = true;
            }
        }
        if !reduced {
            if w[i].abs() != 1 {
                return Err(Error::pre("vector is not primitive"));
            }
            inv.swap(0, i);
            if w[i] == -1 {
                inv[0].iter_mut().for_each(|x| *x = -*x);
            }
            return Ok(inv);
        }
    }
}

fn mod_p(x: &BigRational, p: u64) -> u64 {
    let n = rem_euclid_big(x.numer(), p);
    let d = rem_euclid_big(x.denom(), p);
    crate::arith::mul_mod_u64(n, crate::arith::inv_mod_u64(d, p).expect("p-integral"), p)
}

/// Evaluates a form (given by monomial exponents and residues) and its
/// partial derivatives at a point of `𝔽_p^n`.
fn eval_with_gradient(monos: &[Vec<u32>], c: &[u64], x: &[u64], p: u64) -> (u64, Vec<u64>) {
    let pw = |b: u64, e: u32| crate::arith::pow_mod_u64(b, e as u64, p);
    let mul = |a: u64, b: u64| crate::arith::mul_mod_u64(a, b, p);
    let n = x.len();
    let mut val = 0;
    let mut grad = vec![0u64; n];
    for (e, &ci) in monos.iter().zip(c) {
        if ci == 0 {
            continue;
        }
        val = (val + (0..n).fold(ci, |acc, k| mul(acc, pw(x[k], e[k])))) % p;
        for i in 0..n {
            if e[i] == 0 {
                continue;
            }
            let t = (0..n).fold(mul(ci, e[i] as u64 % p), |acc, k| {
                mul(acc, if k == i { pw(x[k], e[k] - 1) } else { pw(x[k], e[k]) })
            });
            grad[i] = (grad[i] + t) % p;
        }
    }
    (val, grad)
}

/// Points of `ℙ^{n−1}(𝔽_p)` with first nonzero coordinate 1, as lifts in `[0, p)`.
fn projective_points(n: usize, p: u64) -> impl Iterator<Item = Vec<u64>> {
    (0..n).flat_map(move |lead| {
        let free = n - lead - 1;
        (0..p.pow(free as u32)).map(move |mut idx| {
            let mut x = vec![0u64; n];
            x[lead] = 1;
            for slot in x[lead + 1..].iter_mut().rev() {
                *slot = idx % p;
                idx /= p;
            }
            x
        })
    })
}

fn singular_points(family: Family, v: &FormVector, p: u64) -> Vec<Vec<u64>> {
    let monos = family.monomials().expect("single form");
    let c: Vec<u64> = v.coeffs().iter().map(|x| mod_p(x, p)).collect();
    projective_points(monos[0].len(), p)
        .filter(|x| {
            let (val, grad) = eval_with_gradient(&monos, &c, x, p);
            val == 0 && grad.iter().all(|&g| g == 0)
        })
        .collect()
}

/// Moves the double root of a weak binary cubic to `[0:1]`, so that
/// `c ≡ d ≡ 0 (mod p)` and `p ∤ b`.
pub fn f3_normalize(v: &FormVector, p: u64) -> Result<(GroupElement, FormVector)> {
    check_p(p)?;
    check_family(v, Family::F3)?;
    if classify_point(v, p)? != PointClass::WeakMultiple {
        return Err(Error::pre("form is not a weak multiple of p²"));
    }
    let roots = singular_points(Family::F3, v, p);
    let root = roots.first().ok_or_else(|| Error::Inconsistent("weak multiple without a double root".into()))?;
    // the new form is v((s, t)·γ); its value at [0:1] is v(second row of γ)
    let rows = if root[0] == 0 {
        vec![vec![1, 0], vec![0, 1]]
    } else {
        let m = complete_unimodular(&[1, root[1] as i128])?;
        vec![m[1].clone(), m[0].clone()]
    };
    let gamma = GroupElement::for_family(Family::F3, vec![to_matrix(&rows)]);
    let out = act(&gamma, v)?;
    let c = out.coeffs();
    if !(divisible(&c[2], p, 1) && divisible(&c[3], p, 2) && is_unit(&c[1], p)) {
        return Err(Error::Inconsistent("normalized cubic fails the normal-form congruences".into()));
    }
    Ok((gamma, out))
}

/// `(a, b, c, d) ↦ (pa, b, c/p, d/p²)`: multiply by `p` and substitute
/// `t ↦ t/p`. The discriminant drops by exactly `p²`.
pub fn f3_reduce(v: &FormVector, p: u64) -> Result<MoveRecord> {
    check_p(p)?;
    check_family(v, Family::F3)?;
    let c = v.coeffs();
    if !divisible(&c[2], p, 1) {
        return Err(Error::pre("c must be divisible by p"));
    }
    if !divisible(&c[3], p, 2) {
        return Err(Error::pre("d must be divisible by p²"));
    }
    if !is_unit(&c[1], p) {
        return Err(Error::pre("b must be prime to p"));
    }
    // det = 1/p with twist −1 supplies the factor p
    let gamma = GroupElement::for_family(Family::F3, vec![diag(&[int(1), rat(1, p as i64)])]);
    finish(Family::F3, p, v, gamma, int(1))
}

/// The `s²t` coefficient of `det(As + Bt)`.
fn pencil_c(a: &Matrix, b: &Matrix) -> BigRational {
    pencil_form(a, b)[1].clone()
}

/// Checks the F4 normal form, naming the first failing condition.
pub fn f4_normal_form_violation(v: &FormVector, p: u64) -> Option<&'static str> {
    let (a, b) = v.gram_pair()?;
    if !divisible(&a[0][0], p, 1) {
        return Some("a11 must be divisible by p");
    }
    if !divisible(&b[0][1], p, 1) || !divisible(&b[0][2], p, 1) {
        return Some("b12 and b13 must be divisible by p");
    }
    if !divisible(&b[0][0], p, 2) {
        return Some("b11 must be divisible by p²");
    }
    if !is_unit(&(&b[1][1] * &b[2][2] - &b[1][2] * &b[1][2]), p) {
        return Some("b22·b33 − b23² must be prime to p");
    }
    if !is_unit(&pencil_c(&a, &b), p) {
        return Some("the s²t coefficient of det(As + Bt) must be prime to p");
    }
    None
}

/// Multiply `A` by `p`, then divide the first row and column of both Gram
/// matrices by `p`. The discriminant drops by exactly `p²`.
pub fn f4_reduce(v: &FormVector, p: u64) -> Result<MoveRecord> {
    check_p(p)?;
    check_family(v, Family::F4)?;
    if let Some(msg) = f4_normal_form_violation(v, p) {
        return Err(Error::pre(msg));
    }
    let inv_p = rat(1, p as i64);
    let gamma = GroupElement::for_family(
        Family::F4,
        vec![diag(&[int(1), inv_p.clone()]), diag(&[inv_p, int(1), int(1)])],
    );
    finish(Family::F4, p, v, gamma, int(p as i64))
}

fn doubled_gram_mod(m: &Matrix, p: u64) -> Vec<Vec<u64>> {
    m.iter().map(|r| r.iter().map(|x| mod_p(&(x * BigInt::from(2)), p)).collect()).collect()
}

fn quad_mod(m: &[Vec<u64>], x: &[u64], p: u64) -> u64 {
    let mut s = 0u128;
    for i in 0..x.len() {
        for j in 0..x.len() {
            s += m[i][j] as u128 * x[i] as u128 % p as u128 * x[j] as u128;
        }
    }
    (s % p as u128) as u64
}

fn kernel_mod(m: &[Vec<u64>], x: &[u64], p: u64) -> bool {
    m.iter().all(|r| r.iter().zip(x).map(|(a, b)| *a as u128 * *b as u128).sum::<u128>() % p as u128 == 0)
}

/// Searches the `p + 1` pencil members and the base points in `ℙ²(𝔽_p)` for
/// a member singular at a base point, and moves that pair to the F4 normal
/// form. Fails when no candidate satisfies every normal-form condition.
pub fn f4_normalize(v: &FormVector, p: u64) -> Result<(GroupElement, FormVector)> {
    check_p(p)?;
    check_family(v, Family::F4)?;
    let (a, b) = v.gram_pair().expect("pair family");
    let am = doubled_gram_mod(&a, p);
    let bm = doubled_gram_mod(&b, p);
    let base: Vec<Vec<u64>> =
        projective_points(3, p).filter(|x| quad_mod(&am, x, p) == 0 && quad_mod(&bm, x, p) == 0).collect();
    for member in projective_points(2, p) {
        let mm: Vec<Vec<u64>> = (0..3)
            .map(|i| (0..3).map(|j| (member[0] * am[i][j] + member[1] * bm[i][j]) % p).collect())
            .collect();
        for pt in base.iter().filter(|x| kernel_mod(&mm, x, p)) {
            let g2 = complete_unimodular(&[member[0] as i128, member[1] as i128])?;
            let g2 = vec![g2[1].clone(), g2[0].clone()];
            let g3 = complete_unimodular(&pt.iter().map(|&x| x as i128).collect::<Vec<_>>())?;
            let gamma = GroupElement::for_family(Family::F4, vec![to_matrix(&g2), to_matrix(&g3)]);
            let out = act(&gamma, v)?;
            if f4_normal_form_violation(&out, p).is_none() {
                return Ok((gamma, out));
            }
        }
    }
    Err(Error::pre("no F4 normal form found"))
}

/// Moves a singular point of a ternary cubic mod p to `(0:0:1)`, so that the
/// `t³`, `rt²` and `st²` coefficients vanish mod p.
pub fn g3_normalize(v: &FormVector, p: u64) -> Result<(GroupElement, FormVector)> {
    check_p(p)?;
    check_family(v, Family::G3)?;
    let pts = singular_points(Family::G3, v, p);
    let pt = pts.first().ok_or_else(|| Error::pre("cubic is smooth mod p"))?;
    let m = complete_unimodular(&pt.iter().map(|&x| x as i128).collect::<Vec<_>>())?;
    // cyclic row shift keeps det = ±1 and puts the point in the third row
    let rows = vec![m[1].clone(), m[2].clone(), m[0].clone()];
    let gamma = GroupElement::for_family(Family::G3, vec![to_matrix(&rows)]);
    let out = act(&gamma, v)?;
    Ok((gamma, out))
}

/// `diag(1, 1, 1/p)` with the twist: the coefficient of `r^i s^j t^k` is
/// multiplied by `p^{1−k}`. The discriminant is unchanged.
pub fn g3_node_move(v: &FormVector, p: u64) -> Result<MoveRecord> {
    check_p(p)?;
    check_family(v, Family::G3)?;
    let c = v.coeffs();
    // layout indices: rt² = 5, st² = 8, t³ = 9
    if !divisible(&c[5], p, 1) || !divisible(&c[8], p, 1) {
        return Err(Error::pre("rt² and st² coefficients must be divisible by p"));
    }
    if !divisible(&c[9], p, 2) {
        return Err(Error::pre("t³ coefficient must be divisible by p²"));
    }
    let gamma = GroupElement::for_family(Family::G3, vec![diag(&[int(1), int(1), rat(1, p as i64)])]);
    finish(Family::G3, p, v, gamma, int(1))
}

/// `φ(a s⁴ + b s³t + c s²t² + d st³ + e t⁴) = (A, B)` with the fixed form
/// `A = x₁x₃ − x₂²` and `B = [[e, d/2, 0], [d/2, c, b/2], [0, b/2, a]]`.
pub fn phi_embed(v: &FormVector) -> Result<FormVector> {
    if v.family() != Family::G2 {
        return Err(Error::ShapeMismatch(format!("φ takes a G2 form, got {}", v.family())));
    }
    let [a, b, c, d, e] = v.coeffs() else { unreachable!("G2 has five coefficients") };
    let half = rat(1, 2);
    let z = BigRational::zero();
    let mut coeffs = vec![z.clone(), z.clone(), half.clone(), -BigRational::one(), z.clone(), z.clone()];
    coeffs.extend([e.clone(), d * &half, z, c.clone(), b * &half, a.clone()]);
    FormVector::new(Family::F4, coeffs)
}

/// Applies the candidate `diag(1, 1/p)` with the twist to a weak g₂ normal
/// form: `(a, b, c, d, e) ↦ (ap², bp, c, d/p, e/p²)`. The discriminant is
/// unchanged and the image is again a weak multiple whenever `p² | disc`.
pub fn g2_no_move_witness(v: &FormVector, p: u64) -> Result<MoveRecord> {
    check_p(p)?;
    check_family(v, Family::G2)?;
    let c = v.coeffs();
    if !divisible(&c[3], p, 1) {
        return Err(Error::pre("d must be divisible by p"));
    }
    if !divisible(&c[4], p, 2) {
        return Err(Error::pre("e must be divisible by p²"));
    }
    if !is_unit(&c[2], p) {
        return Err(Error::pre("c must be prime to p"));
    }
    if !is_unit(&(&c[1] * &c[1] - int(4) * &c[0] * &c[2]), p) {
        return Err(Error::pre("b² − 4ac must be prime to p"));
    }
    let gamma = GroupElement::for_family(Family::G2, vec![diag(&[int(1), rat(1, p as i64)])]);
    finish(Family::G2, p, v, gamma, int(1))
}

fn unit_mod<R: Rng>(p: u64, bound: i64, rng: &mut R) -> i64 {
    loop {
        let x = rng.gen_range(-bound..=bound);
        if x.rem_euclid(p as i64) != 0 {
            return x;
        }
    }
}

/// Random integral cubic in F3 normal form: `p ∤ b`, `p | c`, `p² | d`.
pub fn sample_f3_normal<R: Rng>(p: u64, bound: i64, rng: &mut R) -> FormVector {
    let pi = p as i64;
    let coords =
        [rng.gen_range(-bound..=bound), unit_mod(p, bound.max(pi), rng), pi * rng.gen_range(-bound..=bound), pi * pi * rng.gen_range(-bound..=bound)];
    FormVector::from_lattice_i64(Family::F3, &coords).expect("four coordinates")
}

/// Random integral pair in F4 normal form (rejection sampling on the two
/// unit conditions).
pub fn sample_f4_normal<R: Rng>(p: u64, bound: i64, rng: &mut R) -> FormVector {
    let pi = p as i64;
    loop {
        let mut r = || rng.gen_range(-bound..=bound);
        // lattice coordinates: A11 A12 A13 A22 A23 A33 B11 B12 B13 B22 B23 B33
        let coords = [pi * r(), r(), r(), r(), r(), r(), pi * pi * r(), pi * r(), pi * r(), r(), r(), r()];
        let v = FormVector::from_lattice_i64(Family::F4, &coords).expect("twelve coordinates");
        if f4_normal_form_violation(&v, p).is_none() {
            return v;
        }
    }
}

/// Random integral ternary cubic with a singular point at `(0:0:1)` mod p
/// and `p² | a₃₃₃`.
pub fn sample_g3_node<R: Rng>(p: u64, bound: i64, rng: &mut R) -> FormVector {
    let pi = p as i64;
    let mut coords: Vec<i64> = (0..10).map(|_| rng.gen_range(-bound..=bound)).collect();
    coords[5] *= pi;
    coords[8] *= pi;
    coords[9] *= pi * pi;
    FormVector::from_lattice_i64(Family::G3, &coords).expect("ten coordinates")
}

/// Random integral binary quartic in g₂ weak normal form.
pub fn sample_g2_normal<R: Rng>(p: u64, bound: i64, rng: &mut R) -> FormVector {
    let pi = p as i64;
    loop {
        let mut r = || rng.gen_range(-bound..=bound);
        let coords = [r(), r(), r(), pi * r(), pi * pi * r()];
        let disc_q = coords[1] * coords[1] - 4 * coords[0] * coords[2];
        if coords[2].rem_euclid(pi) != 0 && disc_q.rem_euclid(pi) != 0 {
            return FormVector::from_lattice_i64(Family::G2, &coords).expect("five coordinates");
        }
    }
}
