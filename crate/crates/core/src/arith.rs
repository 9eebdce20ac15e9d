//! Small number-theoretic and exact linear-algebra helpers shared by the
//! rest of the crate.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// All primes `<= n`, ascending.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Precomputed exact-divisibility test for an odd prime `p`: `n % p == 0` iff
/// `n * p^{-1} mod 2^64 <= (2^64 - 1) / p`.
#[derive(Debug, Clone, Copy)]
pub struct DivTest {
    pub p: u64,
    inv: u64,
    limit: u64,
}

impl DivTest {
    pub fn new(p: u64) -> Self {
        debug_assert!(p >= 2);
        if p % 2 == 0 {
            return DivTest { p, inv: 0, limit: 0 };
        }
        // Newton iteration for the inverse of p modulo 2^64.
        let mut inv: u64 = p;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        DivTest { p, inv, limit: u64::MAX / p }
    }

    #[inline]
    pub fn divides(&self, n: u64) -> bool {
        if self.p == 2 {
            n & 1 == 0
        } else {
            n.wrapping_mul(self.inv) <= self.limit
        }
    }
}

pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u64(r, b, m);
        }
        b = mul_mod_u64(b, b, m);
        e >>= 1;
    }
    r
}

/// `a * b mod m` for 128-bit operands, by doubling (no 256-bit product).
pub fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    let (mut a, mut b) = (a % m, b % m);
    if let Some(prod) = a.checked_mul(b) {
        return prod % m;
    }
    let mut r: u128 = 0;
    while b > 0 {
        if b & 1 == 1 {
            r = add_mod_u128(r, a, m);
        }
        a = add_mod_u128(a, a, m);
        b >>= 1;
    }
    r
}

fn add_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

pub fn pow_mod_u128(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u128(r, b, m);
        }
        b = mul_mod_u128(b, b, m);
        e >>= 1;
    }
    r
}

/// Largest n below which Miller–Rabin with the first 13 prime bases is a proof.
pub const MR_DETERMINISTIC_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

const MR_BASES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Deterministic primality for `n < MR_DETERMINISTIC_LIMIT`; `None` above it.
pub fn is_prime_u128(n: u128) -> Option<bool> {
    if n < 2 {
        return Some(false);
    }
    for &b in &MR_BASES {
        if n == b {
            return Some(true);
        }
        if n % b == 0 {
            return Some(false);
        }
    }
    if n >= MR_DETERMINISTIC_LIMIT {
        return None;
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u128(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return Some(false);
    }
    Some(true)
}

pub fn is_prime_u64(n: u64) -> bool {
    is_prime_u128(n as u128).unwrap_or(false)
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A nontrivial factor of the odd composite `n` (Pollard–Brent rho).
pub fn pollard_rho_u128(n: u128) -> u128 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c: u128 = 1;
    loop {
        let f = |x: u128| add_mod_u128(mul_mod_u128(x, x, n), c % n, n);
        let (mut x, mut y, mut d) = (2u128, 2u128, 1u128);
        let mut steps = 0u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u128(x.abs_diff(y), n);
            steps += 1;
            if steps > 5_000_000 {
                break;
            }
        }
        if d != 1 && d != n {
            return d;
        }
        c += 1;
    }
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = libm::sqrt(n as f64) as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

pub fn is_perfect_square_u128(n: u128) -> bool {
    let r = isqrt_u128(n);
    r * r == n
}

pub fn icbrt_u128(n: u128) -> u128 {
    let mut x = libm::cbrt(n as f64) as u128;
    while x > 0 && x.checked_pow(3).is_none_or(|c| c > n) {
        x -= 1;
    }
    while (x + 1).checked_pow(3).is_some_and(|c| c <= n) {
        x += 1;
    }
    x
}

pub fn is_perfect_square_big(n: &BigUint) -> bool {
    let r = n.sqrt();
    &r * &r == *n
}

/// Canonical residue of `x` modulo `m` in `[0, m)`.
pub fn rem_euclid_big(x: &BigInt, m: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(m));
    r.to_u64().expect("residue fits")
}

pub fn rem_euclid_i128(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

/// Legendre symbol-based square root modulo an odd prime (Tonelli–Shanks).
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod_u64(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod_u64(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod_u64(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod_u64(z, q, p);
    let mut t = pow_mod_u64(a, q, p);
    let mut r = pow_mod_u64(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod_u64(tt, tt, p);
            i += 1;
        }
        let b = pow_mod_u64(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod_u64(b, b, p);
        t = mul_mod_u64(t, c, p);
        r = mul_mod_u64(r, b, p);
    }
    Some(r)
}

pub fn inv_mod_u64(a: u64, p: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd(a as i128 % p as i128, p as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(p as i128) as u64)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// p-adic valuation of a nonzero rational; `None` for zero.
pub fn valuation(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let mut v = 0i64;
        while (&n % &pb).is_zero() {
            n /= &pb;
            v += 1;
        }
        v
    };
    Some(count(x.numer()) - count(x.denom()))
}

/// `v_p(x) >= k`, with zero divisible by everything.
pub fn divisible_by_power(x: &BigRational, p: u64, k: i64) -> bool {
    valuation(x, p).is_none_or(|v| v >= k)
}

/// Determinant of a square integer matrix by fraction-free Bareiss elimination.
pub fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Determinant over ℚ by clearing denominators row by row.
pub fn det_rational(m: &[Vec<BigRational>]) -> BigRational {
    let mut scale = BigInt::one();
    let rows: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale *= &l;
            row.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    BigRational::new(det_bareiss(rows), scale)
}

/// Primes just below 2^62 used for multi-modular determinants.
const CRT_PRIMES: [u64; 16] = [
    4611686018427387847,
    4611686018427387817,
    4611686018427387787,
    4611686018427387761,
    4611686018427387751,
    4611686018427387737,
    4611686018427387733,
    4611686018427387709,
    4611686018427387701,
    4611686018427387631,
    4611686018427387617,
    4611686018427387587,
    4611686018427387461,
    4611686018427387421,
    4611686018427387409,
    4611686018427387329,
];

/// Determinant modulo a prime by Gaussian elimination.
pub fn det_mod_prime(m: &[Vec<u64>], p: u64) -> u64 {
    let n = m.len();
    let mut a: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let mut det = 1u64;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| a[r][col] != 0) else {
            return 0;
        };
        if piv != col {
            a.swap(piv, col);
            det = (p - det) % p;
        }
        det = mul_mod_u64(det, a[col][col], p);
        let inv = pow_mod_u64(a[col][col], p - 2, p);
        for r in col + 1..n {
            if a[r][col] == 0 {
                continue;
            }
            let f = mul_mod_u64(a[r][col], inv, p);
            for c in col..n {
                let sub = mul_mod_u64(f, a[col][c], p);
                a[r][c] = (a[r][c] + p - sub) % p;
            }
        }
    }
    det
}

/// Exact determinant of an integer matrix, by Chinese remaindering over
/// 62-bit primes when the Hadamard bound allows and Bareiss otherwise.
pub fn det_multimodular(m: &[Vec<BigInt>]) -> BigInt {
    let mut bits = 0.0f64;
    for row in m {
        let norm2: f64 = row.iter().map(|x| { let f = x.to_f64().unwrap_or(f64::INFINITY); f * f }).sum();
        if norm2 == 0.0 {
            return BigInt::zero();
        }
        bits += 0.5 * libm::log2(norm2);
    }
    let needed = libm::ceil((bits + 2.0) / 61.9) as usize;
    if !bits.is_finite() || needed > CRT_PRIMES.len() {
        return det_bareiss(m.to_vec());
    }
    let mut x = BigInt::zero();
    let mut modulus = BigInt::one();
    for &p in &CRT_PRIMES[..needed.max(1)] {
        let red: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|e| rem_euclid_big(e, p)).collect()).collect();
        let r = det_mod_prime(&red, p);
        let xr = rem_euclid_big(&x, p);
        let mr = rem_euclid_big(&modulus, p);
        let t = mul_mod_u64((r + p - xr) % p, pow_mod_u64(mr, p - 2, p), p);
        x += &modulus * BigInt::from(t);
        modulus *= BigInt::from(p);
    }
    if &x * 2 > modulus {
        x -= &modulus;
    }
    x
}

/// Dense polynomial with rational coefficients, lowest degree first.
pub type RatPoly = Vec<BigRational>;

pub fn poly_trim(p: &mut RatPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn poly_mul(a: &[BigRational], b: &[BigRational]) -> RatPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn poly_add(a: &[BigRational], b: &[BigRational]) -> RatPoly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x + y
        })
        .collect()
}

pub fn poly_scale(a: &[BigRational], c: &BigRational) -> RatPoly {
    a.iter().map(|x| x * c).collect()
}

/// Interpolating polynomial through `(xs[i], ys[i])` (Newton divided differences).
pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> RatPoly {
    let n = xs.len();
    let mut coef: Vec<BigRational> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut poly: RatPoly = vec![coef[n - 1].clone()];
    for i in (0..n - 1).rev() {
        // poly = poly * (x - xs[i]) + coef[i]
        let mut next = vec![BigRational::zero(); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * &xs[i];
        }
        next[0] += &coef[i];
        poly = next;
    }
    poly_trim(&mut poly);
    poly
}

/// Exact quotient of `a` by a divisor `b` with nonzero leading coefficient;
/// returns `(quotient, remainder)`.
pub fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (RatPoly, RatPoly) {
    let mut r: RatPoly = a.to_vec();
    poly_trim(&mut r);
    let mut b = b.to_vec();
    poly_trim(&mut b);
    assert!(!b.is_empty(), "division by zero polynomial");
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = b.last().unwrap().clone();
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] -= &c * bc;
        }
        q[shift] = c;
        r.pop();
        poly_trim(&mut r);
    }
    (q, r)
}

pub fn to_rational(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn is_integer(x: &BigRational) -> bool {
    x.denom().is_one()
}

/// `|x|` as u128 when it fits.
pub fn abs_u128(x: &BigInt) -> Option<u128> {
    if x.sign() == Sign::Minus {
        (-x).to_u128()
    } else {
        x.to_u128()
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}
