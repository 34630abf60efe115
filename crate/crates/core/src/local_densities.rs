//! Point counts over `F_p` and the p-adic density factors.
//!
//! Points of the smooth model are counted on the torsor
//! `ad - bc = z^(n+1) w`, `(a,c,z) != 0`, `(b,d,w) != 0`, and divided by the
//! `(p-1)^2` points of the torus acting on it.

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::{is_prime, primes_up_to};
use crate::error::{Error, Result};
use crate::invariants::{Boundary, Rational, Setup};

/// Largest prime for which the `O(p^4)` torsor loop runs by default.
pub const MAX_BRUTE_FORCE_PRIME: u64 = 97;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDensity {
    pub p: u64,
    pub u_count: u64,
    pub x_count: u64,
    /// Rank of the Picard group of the open variety; the exponent of the
    /// convergence factor `(1 - 1/p)`.
    pub lambda_exponent: u32,
    pub omega: Rational,
}

fn check(n: u32, p: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidSetup(format!("n must be at least 2, got {n}")));
    }
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    Ok(())
}

fn pow_mod(mut b: u64, mut e: u32, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Torsor points over `F_p` with `(z, w)` restricted by `keep`.
fn torsor_points(n: u32, p: u64, keep: impl Fn(u64, u64) -> bool) -> u64 {
    let mut total = 0;
    for z in 0..p {
        let zn = pow_mod(z, n + 1, p);
        for w in 0..p {
            if !keep(z, w) {
                continue;
            }
            let rhs = zn * w % p;
            for a in 0..p {
                for c in 0..p {
                    if a == 0 && c == 0 && z == 0 {
                        continue;
                    }
                    // solutions (b, d) of a·d - c·b = rhs
                    let mut sols = if a != 0 || c != 0 {
                        p
                    } else if rhs == 0 {
                        p * p
                    } else {
                        0
                    };
                    // drop (b, d, w) = 0 when it solves the equation
                    if w == 0 && rhs == 0 && sols > 0 {
                        sols -= 1;
                    }
                    total += sols;
                }
            }
        }
    }
    total
}

/// Number of `F_p`-points of the torsor.
pub fn torsor_count_fp(n: u32, p: u64) -> Result<u64> {
    check(n, p)?;
    Ok(torsor_points(n, p, |_, _| true))
}

fn torus_quotient(count: u64, p: u64) -> Result<u64> {
    let t = (p - 1) * (p - 1);
    if !count.is_multiple_of(t) {
        return Err(Error::Consistency(format!("torsor count {count} not divisible by (p-1)^2 = {t}")));
    }
    Ok(count / t)
}

fn x_closed_form(p: u64) -> u64 {
    p * p * p + 2 * p * p + 2 * p + 1
}

/// `#X(F_p)` from the torsor loop. Checked against `p^3 + 2p^2 + 2p + 1`.
pub fn x_count_fp(n: u32, p: u64) -> Result<u64> {
    let x = torus_quotient(torsor_count_fp(n, p)?, p)?;
    if x != x_closed_form(p) {
        return Err(Error::Consistency(format!("#X(F_{p}) = {x}, expected {}", x_closed_form(p))));
    }
    Ok(x)
}

/// `#U(F_p)` for the complement of the boundary, by two routes:
/// inclusion-exclusion over the boundary components (`D_w` and `D_z` are
/// each a `P^1`-bundle over `P^1`, meeting in a `P^1`), and the torsor loop
/// with the boundary coordinates forced nonzero.
pub fn u_count_fp(s: &Setup, p: u64) -> Result<u64> {
    let n = s.n();
    check(n, p)?;
    let boundary = s.boundary();
    let (x, direct) = if p <= MAX_BRUTE_FORCE_PRIME {
        let direct = match boundary {
            Boundary::Dw => torsor_points(n, p, |_, w| w != 0),
            Boundary::DwDz => torsor_points(n, p, |z, w| z != 0 && w != 0),
        };
        (x_count_fp(n, p)?, Some(torus_quotient(direct, p)?))
    } else {
        (x_closed_form(p), None)
    };
    let q = p + 1;
    let excl = match boundary {
        Boundary::Dw => x - q * q,
        Boundary::DwDz => x - 2 * q * q + q,
    };
    if let Some(d) = direct {
        if d != excl {
            return Err(Error::Consistency(format!(
                "#U(F_{p}): inclusion-exclusion gives {excl}, direct count {d}"
            )));
        }
    }
    Ok(excl)
}

pub fn lambda_exponent(boundary: Boundary) -> u32 {
    match boundary {
        Boundary::Dw => 1,
        Boundary::DwDz => 0,
    }
}

/// `omega_p = (1 - 1/p)^lambda · #U(F_p) / p^3`.
pub fn omega_p(s: &Setup, p: u64) -> Result<LocalDensity> {
    let u = u_count_fp(s, p)?;
    let x = if p <= MAX_BRUTE_FORCE_PRIME { x_count_fp(s.n(), p)? } else { x_closed_form(p) };
    let lambda = lambda_exponent(s.boundary());
    let pb = BigInt::from(p);
    let factor = Rational::one() - Rational::new(BigInt::one(), pb.clone());
    let mut omega = Rational::new(BigInt::from(u), pb.pow(3));
    for _ in 0..lambda {
        omega *= &factor;
    }
    Ok(LocalDensity { p, u_count: u, x_count: x, lambda_exponent: lambda, omega })
}

/// `prod_p (1 - p^-2) = 6/pi^2`, the same for every setup in the family.
pub fn euler_product(_s: &Setup) -> f64 {
    6.0 / (std::f64::consts::PI * std::f64::consts::PI)
}

/// `prod_{p <= P} omega_p`, from the closed form `1 - 1/p^2`.
pub fn truncated_euler(_s: &Setup, pmax: u64) -> Result<f64> {
    if pmax < 2 {
        return Err(Error::InvalidArgument(format!("prime bound must be at least 2, got {pmax}")));
    }
    Ok(primes_up_to(pmax).into_iter().map(|p| 1.0 - 1.0 / (p as f64 * p as f64)).product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::rational;
    use crate::invariants::Boundary::{Dw, DwDz};

    fn s(n: u32, b: Boundary) -> Setup {
        Setup::parse(n, b, "1", "1").unwrap()
    }

    /// Full enumeration of `F_p^6`, no shortcuts.
    fn torsor_by_hand(n: u32, p: u64) -> u64 {
        let mut count = 0;
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    for d in 0..p {
                        for z in 0..p {
                            for w in 0..p {
                                let lhs = (a * d + p * p - b * c % p) % p;
                                if lhs == pow_mod(z, n + 1, p) * w % p
                                    && (a, c, z) != (0, 0, 0)
                                    && (b, d, w) != (0, 0, 0)
                                {
                                    count += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn torsor_examples() {
        assert_eq!(torsor_count_fp(2, 2).unwrap(), 21);
        assert_eq!(torsor_count_fp(2, 3).unwrap(), 208);
        assert_eq!(torsor_count_fp(3, 2).unwrap(), 21);
        for (n, p) in [(2, 2), (2, 3), (3, 3), (2, 5), (4, 5)] {
            assert_eq!(torsor_count_fp(n, p).unwrap(), torsor_by_hand(n, p), "n={n} p={p}");
        }
    }

    #[test]
    fn x_examples() {
        assert_eq!(x_count_fp(2, 2).unwrap(), 21);
        assert_eq!(x_count_fp(2, 5).unwrap(), 186);
        assert_eq!(x_count_fp(4, 3).unwrap(), 52);
        assert!(torsor_count_fp(2, 4).is_err());
        assert!(torsor_count_fp(1, 3).is_err());
    }

    #[test]
    fn u_examples() {
        assert_eq!(u_count_fp(&s(2, Dw), 2).unwrap(), 12);
        assert_eq!(u_count_fp(&s(2, DwDz), 2).unwrap(), 6);
        assert_eq!(u_count_fp(&s(3, DwDz), 5).unwrap(), 120);
        assert_eq!(u_count_fp(&s(2, Dw), 101).unwrap(), 101u64.pow(3) + 101 * 101);
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega_p(&s(2, Dw), 2).unwrap().omega, rational(3, 4));
        assert_eq!(omega_p(&s(2, DwDz), 3).unwrap().omega, rational(8, 9));
        for b in [Dw, DwDz] {
            assert_eq!(omega_p(&s(3, b), 7).unwrap().omega, rational(48, 49));
        }
    }

    #[test]
    fn euler_values() {
        let st = s(2, Dw);
        assert!((euler_product(&st) - 0.607_927_101_8).abs() < 1e-10);
        assert_eq!(truncated_euler(&st, 2).unwrap(), 0.75);
        assert!((truncated_euler(&st, 10_000).unwrap() - euler_product(&st)).abs() < 1e-3);
        assert!(truncated_euler(&st, 1).is_err());
    }
}
