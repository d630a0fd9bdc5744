// 64-bit modular integer helpers: deterministic Miller-Rabin and Pollard-Brent
// factorization of group orders.

pub(crate) fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    if q <= u32::MAX as u64 {
        a * b % q
    } else {
        ((a as u128 * b as u128) % q as u128) as u64
    }
}

/// Barrett reduction for moduli below 2^32, so any `x < 2^64` reduces with
/// one high multiply and at most one correction. Larger moduli fall back to
/// a wide remainder.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Reducer {
    q: u64,
    inv: u64,
}

impl Reducer {
    pub(crate) fn new(q: u64) -> Self {
        Self { q, inv: if q <= u32::MAX as u64 { u64::MAX / q } else { 0 } }
    }

    #[inline]
    pub(crate) fn reduce(&self, x: u64) -> u64 {
        let quot = ((x as u128 * self.inv as u128) >> 64) as u64;
        let r = x - quot * self.q;
        if r >= self.q {
            r - self.q
        } else {
            r
        }
    }

    /// `(x + a·b) mod q` for reduced `x, a, b`.
    #[inline]
    pub(crate) fn mul_add(&self, x: u64, a: u64, b: u64) -> u64 {
        if self.inv != 0 {
            // a·b < 2^64 - 2^33 and x < 2^32, so the sum cannot overflow
            self.reduce(a * b + x)
        } else {
            ((x as u128 + a as u128 * b as u128) % self.q as u128) as u64
        }
    }
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

// These witnesses are deterministic for every n < 3.3e24.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut ys = 2u64;
        let mut r = 1u64;
        let m = 128u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    for p in [2u64, 3, 5, 7, 11, 13] {
        if n.is_multiple_of(p) {
            out.push(p);
            factor_into(n / p, out);
            return;
        }
    }
    let d = pollard_brent(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Distinct prime factors of `n`, ascending.
pub(crate) fn distinct_prime_factors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    factor_into(n, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        for n in 0..5000u64 {
            assert_eq!(is_prime(n), trial_division_is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn known_large_primes() {
        assert!(is_prime((1u64 << 61) - 1));
        assert!(is_prime(4_611_686_018_427_387_847)); // largest prime below 2^62
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(!is_prime(((1u64 << 31) - 1) * ((1u64 << 31) - 1)));
    }

    #[test]
    fn barrett_matches_remainder() {
        for q in [2u64, 17, 8191, 65537, (1 << 31) - 1, 4_294_967_291, (1 << 61) - 1] {
            let red = Reducer::new(q);
            let mut x = 0x9e37_79b9_7f4a_7c15u64;
            for _ in 0..2000 {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let (a, b, c) = (x % q, (x >> 7) % q, (x >> 13) % q);
                assert_eq!(red.mul_add(c, a, b), ((c as u128 + a as u128 * b as u128) % q as u128) as u64);
                if q <= u32::MAX as u64 {
                    assert_eq!(red.reduce(x), x % q);
                }
            }
        }
    }

    #[test]
    fn factors_group_orders() {
        assert_eq!(distinct_prime_factors(16), vec![2]);
        assert_eq!(distinct_prime_factors(8190), vec![2, 3, 5, 7, 13]);
        let p = (1u64 << 31) - 1;
        let q = 4_294_967_291u64;
        assert_eq!(distinct_prime_factors(p * q), vec![p, q]);
        let n = (1u64 << 61) - 2;
        let f = distinct_prime_factors(n);
        assert!(f.iter().product::<u64>() <= n);
        for p in &f {
            assert!(is_prime(*p));
            assert_eq!(n % p, 0);
        }
    }
}
