//! Integer helpers shared by the field tables and the closed-form counts.

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u128, b: u128) -> u128 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            while m % d == 0 {
                m /= d;
            }
            result -= result / d;
        }
        d += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// `base^exp`, or `None` on overflow.
pub fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

pub fn pow_u128(base: u128, exp: u32) -> u128 {
    checked_pow(base, exp).expect("integer power overflows u128")
}

pub fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let (a, b) = (a % m, b % m);
    match a.checked_mul(b) {
        Some(v) => v % m,
        None => {
            // double-and-add fallback for moduli above 2^64
            let mut acc = 0u128;
            let mut x = a;
            let mut y = b;
            while y > 0 {
                if y & 1 == 1 {
                    acc = (acc + x) % m;
                }
                x = (x + x) % m;
                y >>= 1;
            }
            acc
        }
    }
}

pub fn pow_mod(base: u128, mut exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u128;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totient_values() {
        let got: Vec<u64> = (1..=12).map(euler_phi).collect();
        assert_eq!(got, vec![1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
    }

    #[test]
    fn modular_power_matches_naive() {
        for base in 0..20u128 {
            for exp in 0..12u128 {
                let naive = (0..exp).fold(1u128, |acc, _| acc * base % 97);
                assert_eq!(pow_mod(base, exp, 97), naive);
            }
        }
    }

    #[test]
    fn large_modulus_multiplication() {
        let m = (1u128 << 100) + 277;
        let a = (1u128 << 99) + 12345;
        assert_eq!(mul_mod(a, 2, m), (2 * a) % m);
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
