/// Largest row computed exactly in integer arithmetic.
pub const MAX_EXACT_ROW: usize = 60;

/// Binomial coefficient C(n, k) as `f64`, exact in integers up to `MAX_EXACT_ROW`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= MAX_EXACT_ROW {
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
        }
        acc as f64
    } else {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::binomial;

    #[test]
    fn pascal_rows() {
        assert_eq!(binomial(0, 0), 1.0);
        assert_eq!(binomial(3, 1), 3.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(20, 10), 184_756.0);
        for n in 1..30 {
            for k in 1..n {
                assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
            }
        }
    }
}
