//! Truncated power series and generating-function coefficient extraction.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::binomial::{binomial_exact, log_binomial, BigCount};
use super::LogReal;

/// Coefficient ring for [`TruncatedPoly`]: exact integers or log-space reals.
pub trait Coefficient: Clone {
    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn is_zero_value(&self) -> bool;
    fn times(&self, other: &Self) -> Self;
    fn sum_of(terms: Vec<Self>) -> Self;
}

impl Coefficient for BigUint {
    fn zero_value() -> Self {
        BigUint::ZERO
    }
    fn one_value() -> Self {
        <BigUint as One>::one()
    }
    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn sum_of(terms: Vec<Self>) -> Self {
        terms.into_iter().sum()
    }
}

impl Coefficient for LogReal {
    fn zero_value() -> Self {
        LogReal::ZERO
    }
    fn one_value() -> Self {
        LogReal::ONE
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn times(&self, other: &Self) -> Self {
        *self * *other
    }
    fn sum_of(terms: Vec<Self>) -> Self {
        LogReal::sum(terms)
    }
}

/// Polynomial whose coefficients above `cap` are discarded.
///
/// `coeffs[s]` is the coefficient of `x^s`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedPoly<C> {
    coeffs: Vec<C>,
    cap: usize,
}

impl<C: Coefficient> TruncatedPoly<C> {
    pub fn new(mut coeffs: Vec<C>, cap: usize) -> Self {
        coeffs.truncate(cap + 1);
        TruncatedPoly { coeffs, cap }
    }

    pub fn one(cap: usize) -> Self {
        TruncatedPoly {
            coeffs: vec![C::one_value()],
            cap,
        }
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Index of the highest stored nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero_value())
    }

    pub fn coeff(&self, s: usize) -> C {
        self.coeffs.get(s).cloned().unwrap_or_else(C::zero_value)
    }

    /// Product truncated at `cap`.
    pub fn mul_capped(&self, other: &Self, cap: usize) -> Self {
        let (Some(da), Some(db)) = (self.degree(), other.degree()) else {
            return TruncatedPoly {
                coeffs: Vec::new(),
                cap,
            };
        };
        let top = (da + db).min(cap);
        let mut out = Vec::with_capacity(top + 1);
        for k in 0..=top {
            let lo = k.saturating_sub(db);
            let hi = k.min(da);
            let terms: Vec<C> = (lo..=hi)
                .filter_map(|i| {
                    let (a, b) = (&self.coeffs[i], &other.coeffs[k - i]);
                    (!a.is_zero_value() && !b.is_zero_value()).then(|| a.times(b))
                })
                .collect();
            out.push(C::sum_of(terms));
        }
        TruncatedPoly { coeffs: out, cap }
    }

    /// `self^m` truncated at `cap`, by binary exponentiation.
    pub fn pow_capped(&self, mut m: u64, cap: usize) -> Self {
        let mut result = Self::one(cap);
        let mut base = Self::new(self.coeffs.clone(), cap);
        while m > 0 {
            if m & 1 == 1 {
                result = result.mul_capped(&base, cap);
            }
            m >>= 1;
            if m > 0 {
                base = base.mul_capped(&base, cap);
            }
        }
        result
    }
}

/// The degree `R-1` initial segment of `(1+x)^S`, in log space.
pub fn truncated_binomial_poly(s: u64, r: u64) -> TruncatedPoly<LogReal> {
    assert!(r >= 1, "minimum hit count must be at least 1");
    let cap = (r - 1) as usize;
    TruncatedPoly::new(
        (0..r).map(|i| log_binomial(s, i as i64)).collect(),
        cap,
    )
}

/// Exact-integer counterpart of [`truncated_binomial_poly`].
pub fn truncated_binomial_poly_exact(s: u64, r: u64) -> TruncatedPoly<BigCount> {
    assert!(r >= 1, "minimum hit count must be at least 1");
    let cap = (r - 1) as usize;
    TruncatedPoly::new(
        (0..r).map(|i| binomial_exact(s, i as i64)).collect(),
        cap,
    )
}

/// Coefficient of `x^s` in `p^m`; convolutions are capped at degree `s`.
pub fn poly_pow_coeff<C: Coefficient>(p: &TruncatedPoly<C>, m: u64, s: usize) -> C {
    let Some(deg) = p.degree() else {
        return if s == 0 && m == 0 { C::one_value() } else { C::zero_value() };
    };
    if (s as u128) > m as u128 * deg as u128 {
        return C::zero_value();
    }
    p.pow_capped(m, s).coeff(s)
}

/// `sum over (i_1..i_m), sum = s, each i_j <= R-1, of prod C(S, i_j)`, exactly.
///
/// Enumerates multiplicity vectors (how many coordinates take each value)
/// instead of convolving, so it is independent of [`poly_pow_coeff`].
pub fn restricted_composition_weight_exact(s_len: u64, r: u64, m: u64, s: u64) -> BigCount {
    assert!(r >= 1, "minimum hit count must be at least 1");
    let weights: Vec<BigUint> = (0..r).map(|v| binomial_exact(s_len, v as i64)).collect();
    let mut total = BigUint::zero();
    multiplicity_walk(&weights, (r - 1) as usize, m, s, BigUint::one(), &mut total);
    total
}

fn multiplicity_walk(
    weights: &[BigUint],
    value: usize,
    parts_left: u64,
    sum_left: u64,
    acc: BigUint,
    total: &mut BigUint,
) {
    if value == 0 {
        if sum_left == 0 {
            *total += acc * weights[0].pow(parts_left as u32);
        }
        return;
    }
    let v = value as u64;
    // the remaining values are all < v, so they can absorb at most (v-1) each
    let need_min = sum_left.saturating_sub(parts_left * (v - 1));
    let lo = need_min.div_ceil(v);
    let hi = parts_left.min(sum_left / v);
    for count in lo..=hi {
        let term = &acc
            * binomial_exact(parts_left, count as i64)
            * weights[value].pow(count as u32);
        if term.is_zero() {
            continue;
        }
        multiplicity_walk(
            weights,
            value - 1,
            parts_left - count,
            sum_left - count * v,
            term,
            total,
        );
    }
}

/// Log-space value of [`restricted_composition_weight_exact`].
pub fn restricted_composition_weight(s_len: u64, r: u64, m: u64, s: u64) -> LogReal {
    LogReal::from_biguint(&restricted_composition_weight_exact(s_len, r, m, s))
}

/// Binomial (exponential-generating-function) convolution power.
///
/// `weights[j]` counts the ways one cell may hold `j` labelled items; the
/// result's entry `k` counts labelled assignments of `k` items to `n` cells.
pub fn egf_pow_exact(weights: &[BigUint], n: u64, cap: usize) -> Vec<BigUint> {
    let pascal = pascal_rows(cap);
    let mut result = vec![BigUint::one()];
    let mut base: Vec<BigUint> = weights.iter().take(cap + 1).cloned().collect();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = egf_mul_exact(&result, &base, cap, &pascal);
        }
        e >>= 1;
        if e > 0 {
            base = egf_mul_exact(&base, &base, cap, &pascal);
        }
    }
    result
}

/// `c_k = sum_i C(k, i) a_i b_{k-i}` for `k <= cap`; `pascal` must cover `cap`.
pub fn egf_mul_exact(a: &[BigUint], b: &[BigUint], cap: usize, pascal: &[Vec<BigUint>]) -> Vec<BigUint> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let top = (a.len() + b.len() - 2).min(cap);
    (0..=top)
        .map(|k| {
            let lo = k.saturating_sub(b.len() - 1);
            let hi = k.min(a.len() - 1);
            let mut acc = BigUint::zero();
            for i in lo..=hi {
                if a[i].is_zero() || b[k - i].is_zero() {
                    continue;
                }
                acc += &pascal[k][i] * &a[i] * &b[k - i];
            }
            acc
        })
        .collect()
}

/// Rows `0..=cap` of Pascal's triangle.
pub fn pascal_rows(cap: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(cap + 1);
    rows.push(vec![BigUint::one()]);
    for k in 1..=cap {
        let prev = &rows[k - 1];
        let mut row = Vec::with_capacity(k + 1);
        row.push(BigUint::one());
        for i in 1..k {
            row.push(&prev[i - 1] + &prev[i]);
        }
        row.push(BigUint::one());
        rows.push(row);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(p: &TruncatedPoly<BigUint>) -> Vec<u64> {
        p.coeffs()
            .iter()
            .map(|c| u64::try_from(c).unwrap())
            .collect()
    }

    #[test]
    fn truncated_segments() {
        assert_eq!(ints(&truncated_binomial_poly_exact(2, 1)), vec![1]);
        assert_eq!(ints(&truncated_binomial_poly_exact(2, 2)), vec![1, 2]);
        assert_eq!(ints(&truncated_binomial_poly_exact(5, 3)), vec![1, 5, 10]);
        let lp = truncated_binomial_poly(5, 3);
        assert_eq!(lp.cap(), 2);
        assert!((lp.coeff(2).to_f64() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn pow_coefficients() {
        let p = TruncatedPoly::new(vec![BigUint::from(1u32), BigUint::from(2u32)], 1);
        // (1+2x)^3 = 1 + 6x + 12x^2 + 8x^3
        assert_eq!(poly_pow_coeff(&p, 3, 3), BigUint::from(8u32));
        assert_eq!(poly_pow_coeff(&p, 3, 2), BigUint::from(12u32));
        let one = TruncatedPoly::new(vec![BigUint::one()], 0);
        assert_eq!(poly_pow_coeff(&one, 5, 0), BigUint::one());
        let q = truncated_binomial_poly_exact(5, 3);
        assert_eq!(poly_pow_coeff(&q, 2, 4), BigUint::from(100u32));
        assert!(poly_pow_coeff(&q, 2, 5).is_zero());
    }

    #[test]
    fn log_pow_matches_exact() {
        let pe = truncated_binomial_poly_exact(9, 4);
        let pl = truncated_binomial_poly(9, 4);
        for s in 0..=12 {
            let e = LogReal::from_biguint(&poly_pow_coeff(&pe, 4, s));
            let l = poly_pow_coeff(&pl, 4, s);
            assert!((e.ln() - l.ln()).abs() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn composition_weight_examples() {
        assert_eq!(restricted_composition_weight_exact(2, 1, 3, 0), BigUint::one());
        assert_eq!(restricted_composition_weight_exact(2, 2, 1, 1), BigUint::from(2u32));
        assert_eq!(restricted_composition_weight_exact(5, 3, 2, 4), BigUint::from(100u32));
        assert!(restricted_composition_weight_exact(5, 3, 2, 5).is_zero());
    }

    #[test]
    fn egf_power_counts_surjections() {
        // assignments of k labelled balls to 2 bins, each bin nonempty: 2^k - 2
        let w: Vec<BigUint> = (0..=6).map(|j| BigUint::from((j >= 1) as u32)).collect();
        let counts = egf_pow_exact(&w, 2, 6);
        for (k, c) in counts.iter().enumerate().skip(1) {
            assert_eq!(*c, BigUint::from((1u32 << k) - 2), "k={k}");
        }
    }
}
