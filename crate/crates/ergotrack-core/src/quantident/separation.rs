//! How many labeled steps distinguish two rotation angles.
//!
//! If two angles differ by at least `alpha2 - alpha1` and the faster one is
//! only known up to `epsilon`, then within `N = ceil(3 / (2 (alpha2 -
//! alpha1 - epsilon)))` steps the binary codings of any two start points
//! must disagree somewhere. `N` is computed in exact rational arithmetic
//! (the float ceiling rounds the wrong way on some inputs), and the claim is
//! checked exhaustively on a start-point/angle grid.

use crate::error::{Error, Result};
use num_rational::Ratio;
use num_traits::Signed;

/// The step bound together with its grid verification.
#[derive(Debug, Clone, Copy)]
pub struct SeparationCertificate {
    /// Steps within which some label must differ.
    pub n_steps: u64,
    /// Grid triples whose codings agreed on every step `k <= n_steps`.
    pub counterexamples: u64,
    /// The `(u, v, alpha)` grid sizes that were searched.
    pub grid: (usize, usize, usize),
}

/// Compute the separation step bound and verify it on a grid.
///
/// `alpha1 < alpha2` are the two angles, `epsilon` the uncertainty around
/// `alpha2`; the grid sweeps `u` and `v` over `[0, 1)` and the perturbed
/// angle over `[alpha2 - epsilon, alpha2 + epsilon]`, checking that every
/// pair of codings separates within `n_steps`.
pub fn separation_bound(
    alpha1: Ratio<i64>,
    alpha2: Ratio<i64>,
    epsilon: Ratio<i64>,
    grid: (usize, usize, usize),
) -> Result<SeparationCertificate> {
    let zero = Ratio::new(0, 1);
    let half = Ratio::new(1, 2);
    if alpha1 < zero || alpha2 > half || alpha1 >= alpha2 {
        return Err(Error::invalid(
            "angle pair",
            "need 0 <= alpha1 < alpha2 <= 1/2",
        ));
    }
    let gap = alpha2 - alpha1;
    if epsilon <= zero || epsilon >= gap / Ratio::new(2, 1) {
        return Err(Error::invalid(
            "uncertainty",
            "need 0 < epsilon < (alpha2 - alpha1) / 2",
        ));
    }
    if grid.0 == 0 || grid.1 == 0 || grid.2 == 0 {
        return Err(Error::invalid("verification grid", "sizes must be positive"));
    }
    let n_steps = {
        let q = Ratio::new(3, 1) / (Ratio::new(2, 1) * (gap - epsilon));
        let c = q.ceil();
        debug_assert!(!c.is_negative());
        *c.numer() as u64 / *c.denom() as u64
    };

    let to_f = |r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
    let a1 = to_f(alpha1);
    let a2 = to_f(alpha2);
    let eps = to_f(epsilon);
    let (nu, nv, na) = grid;
    let steps = n_steps as usize + 1; // k = 0..=n_steps

    let coding = |start: f64, angle: f64| -> u64 {
        let mut bits = 0u64;
        for k in 0..steps {
            let x = (start + (k as f64) * angle).rem_euclid(1.0);
            bits |= ((x >= 0.5) as u64) << k;
        }
        bits
    };
    if steps > 64 {
        return Err(Error::CapExceeded {
            what: "separation steps",
            needed: steps,
            cap: 64,
        });
    }

    let v_codings: Vec<u64> = (0..nv).map(|j| coding(j as f64 / nv as f64, a1)).collect();
    let mut counterexamples = 0u64;
    let a_div = (na.max(2) - 1) as f64;
    for ja in 0..na {
        let al = a2 - eps + (ja as f64 / a_div) * (2.0 * eps);
        for ju in 0..nu {
            let bits = coding(ju as f64 / nu as f64, al);
            counterexamples += v_codings.iter().filter(|&&v| v == bits).count() as u64;
        }
    }
    Ok(SeparationCertificate {
        n_steps,
        counterexamples,
        grid,
    })
}

/// Parse `"0.3"`, `"-1.25"`, `"7"`, or `"3/10"` into an exact rational.
pub fn parse_decimal_ratio(s: &str) -> Result<Ratio<i64>> {
    let s = s.trim();
    let bad = || Error::invalid("rational literal", format!("cannot parse {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().map_err(|_| bad())?;
        let d: i64 = den.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
        || frac_part.len() > 18
    {
        return Err(bad());
    }
    let int_val: i64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| bad())?
    };
    let mut num = int_val as i128;
    let mut den = 1i128;
    for c in frac_part.chars() {
        num = num * 10 + (c as u8 - b'0') as i128;
        den *= 10;
    }
    num *= sign as i128;
    if num > i64::MAX as i128 || num < i64::MIN as i128 {
        return Err(bad());
    }
    Ok(Ratio::new(num as i64, den as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stated_bound_is_twenty_five() {
        let c = separation_bound(
            parse_decimal_ratio("0.2").unwrap(),
            parse_decimal_ratio("0.3").unwrap(),
            parse_decimal_ratio("0.04").unwrap(),
            (20, 20, 5),
        )
        .unwrap();
        assert_eq!(c.n_steps, 25);
    }

    #[test]
    fn float_ceiling_would_round_wrong_here() {
        // 3 / (2 * 0.06) is exactly 25, but the float quotient lands just
        // above it; the rational path must not inherit that
        let float_n = (3.0f64 / (2.0 * (0.3 - 0.2 - 0.04))).ceil() as u64;
        assert_eq!(float_n, 26);
    }

    #[test]
    fn wide_gap_gives_four_steps() {
        let c = separation_bound(
            Ratio::new(0, 1),
            Ratio::new(1, 2),
            Ratio::new(1, 10),
            (10, 10, 3),
        )
        .unwrap();
        assert_eq!(c.n_steps, 4);
    }

    #[test]
    fn no_counterexamples_on_a_modest_grid() {
        let c = separation_bound(
            parse_decimal_ratio("0.2").unwrap(),
            parse_decimal_ratio("0.3").unwrap(),
            parse_decimal_ratio("0.04").unwrap(),
            (50, 50, 7),
        )
        .unwrap();
        assert_eq!(c.counterexamples, 0);
    }

    #[test]
    fn epsilon_out_of_range_is_rejected() {
        let a1 = Ratio::new(1, 5);
        let a2 = Ratio::new(3, 10);
        assert!(separation_bound(a1, a2, Ratio::new(1, 20), (5, 5, 3)).is_err());
        assert!(separation_bound(a1, a2, Ratio::new(0, 1), (5, 5, 3)).is_err());
        assert!(separation_bound(a2, a1, Ratio::new(1, 100), (5, 5, 3)).is_err());
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_decimal_ratio("0.3").unwrap(), Ratio::new(3, 10));
        assert_eq!(parse_decimal_ratio("-1.25").unwrap(), Ratio::new(-5, 4));
        assert_eq!(parse_decimal_ratio("7").unwrap(), Ratio::new(7, 1));
        assert_eq!(parse_decimal_ratio("3/10").unwrap(), Ratio::new(3, 10));
        assert_eq!(parse_decimal_ratio(".5").unwrap(), Ratio::new(1, 2));
        assert!(parse_decimal_ratio("").is_err());
        assert!(parse_decimal_ratio("1.2.3").is_err());
        assert!(parse_decimal_ratio("a/b").is_err());
        assert!(parse_decimal_ratio("1/0").is_err());
    }
}
