//! Small-integer number theory on machine words.

use num_integer::Integer;

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Prime-power decomposition `[(q, e)]` with `n = prod q^e`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for q in prime_factors(n) {
        let mut e = 0;
        while n % q == 0 {
            n /= q;
            e += 1;
        }
        out.push((q, e));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    out.sort_unstable();
    out
}

pub fn mod_pow(base: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u128;
    let mut b = (base % m) as u128;
    let m = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            result = result * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    result as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inv(a: i64, m: u64) -> Option<u64> {
    let m_i = m as i128;
    let g = (a as i128).rem_euclid(m_i).extended_gcd(&m_i);
    (g.gcd == 1).then(|| g.x.rem_euclid(m_i) as u64)
}

/// Multiplicative order of `a` modulo `m`; `None` unless `gcd(a, m) = 1`.
pub fn multiplicative_order(a: u64, m: u64) -> Option<u64> {
    let a = a % m;
    if m < 2 || a.gcd(&m) != 1 {
        return None;
    }
    let mut k = 1u64;
    let mut x = a;
    while x != 1 % m {
        x = ((x as u128 * a as u128) % m as u128) as u64;
        k += 1;
    }
    Some(k)
}

/// Least primitive root modulo an odd prime.
pub fn least_primitive_root(ell: u64) -> u64 {
    let factors = prime_factors(ell - 1);
    (2..ell)
        .find(|&g| factors.iter().all(|&q| mod_pow(g, (ell - 1) / q, ell) != 1))
        .unwrap_or(1)
}

/// Legendre symbol `(a / ell)` for an odd prime `ell`.
pub fn legendre(a: i64, ell: u64) -> i32 {
    let a = a.rem_euclid(ell as i64) as u64;
    if a == 0 {
        0
    } else if mod_pow(a, (ell - 1) / 2, ell) == 1 {
        1
    } else {
        -1
    }
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Odd primes in increasing order up to `limit`.
pub fn odd_primes_up_to(limit: u64) -> Vec<u64> {
    (3..=limit).filter(|&n| crate::fields::is_prime(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorizations() {
        assert_eq!(prime_factors(12), vec![2, 3]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(prime_factors(1), Vec::<u64>::new());
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(mod_inv(3, 7), Some(5));
        assert_eq!(mod_inv(-1, 7), Some(6));
        assert_eq!(mod_inv(2, 4), None);
        assert_eq!(multiplicative_order(4, 5), Some(2));
        assert_eq!(multiplicative_order(19, 5), Some(2));
        assert_eq!(least_primitive_root(7), 3);
        assert_eq!(least_primitive_root(5), 2);
        assert_eq!(least_primitive_root(13), 2);
        assert_eq!(legendre(3, 7), -1);
        assert_eq!(legendre(-11, 7), -1);
        assert_eq!(legendre(2, 7), 1);
        assert_eq!(isqrt(2000), 44);
        assert_eq!(odd_primes_up_to(13), vec![3, 5, 7, 11, 13]);
    }
}
