//! Small exact-arithmetic helpers shared by the counting and density code.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Inverse of `c` modulo `m > 0`, in `[0, m)`. `None` when not coprime.
pub fn mod_inverse(c: i128, m: i128) -> Option<i128> {
    debug_assert!(m > 0);
    let (mut old_r, mut r) = (c.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 && m != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m))
}

pub fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

pub fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

/// Number of integers `x` in `[lo, hi]` with `x ≡ r (mod m)`, `m > 0`.
pub fn count_in_class(lo: i128, hi: i128, r: i128, m: i128) -> i128 {
    if lo > hi {
        return 0;
    }
    div_floor(hi - r, m) - div_floor(lo - 1 - r, m)
}

/// `base^exp`, or `None` on overflow. `0^0 = 1`.
pub fn checked_pow_u128(base: u128, exp: u32) -> Option<u128> {
    base.checked_pow(exp)
}

/// `x^ex * y^ey`, or `None` when the product does not fit. A zero factor wins
/// over an overflowing one.
pub fn checked_pow_product(x: u128, ex: u32, y: u128, ey: u32) -> Option<u128> {
    if (x == 0 && ex > 0) || (y == 0 && ey > 0) {
        return Some(0);
    }
    checked_pow_u128(x, ex)?.checked_mul(checked_pow_u128(y, ey)?)
}

/// Largest `t >= 0` with `t^exp <= bound`, by binary search. `exp >= 1`.
pub fn integer_root(bound: &BigUint, exp: u32) -> BigUint {
    assert!(exp >= 1, "integer_root needs a positive exponent");
    if bound.is_zero() {
        return BigUint::zero();
    }
    if exp == 1 {
        return bound.clone();
    }
    if let Some(b) = bound.to_u128() {
        return BigUint::from(integer_root_u128(b, exp));
    }
    let bits = bound.bits();
    let mut lo = BigUint::one();
    let mut hi = BigUint::one() << (bits / u64::from(exp) + 1);
    // invariant: lo^exp <= bound < hi^exp
    while &hi - &lo > BigUint::one() {
        let mid: BigUint = (&lo + &hi) >> 1;
        if num_traits::pow(mid.clone(), exp as usize) <= *bound {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

pub fn integer_root_u128(bound: u128, exp: u32) -> u128 {
    assert!(exp >= 1);
    if bound == 0 {
        return 0;
    }
    if exp == 1 {
        return bound;
    }
    let bits = 128 - bound.leading_zeros();
    let mut lo = 1u128;
    let mut hi = 1u128 << (bits / exp + 1).min(127);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match checked_pow_u128(mid, exp) {
            Some(v) if v <= bound => lo = mid,
            _ => hi = mid,
        }
    }
    lo
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Euler's totient for `0..=n` (entry 0 unused).
pub fn totients_up_to(n: usize) -> Vec<u32> {
    let mut phi: Vec<u32> = (0..=n as u32).collect();
    for i in 2..=n {
        if phi[i] == i as u32 {
            let mut j = i;
            while j <= n {
                phi[j] -= phi[j] / i as u32;
                j += i;
            }
        }
    }
    phi
}
