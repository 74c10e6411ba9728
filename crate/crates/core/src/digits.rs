//! Base-`p` expansions and the maximal-run decomposition of `l`.
//!
//! Write `l = p^m q` with `p` not dividing `q`, expand `q` in base `p`, and
//! cut out every maximal block of digits equal to `p - 1`. Each block
//! `a_j = ... = a_i = p - 1` is a [`Run`]; runs are listed most significant
//! first.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest base accepted from callers. Relevant primes never exceed `l + 1`.
pub const MAX_PRIME: u64 = 1_000_000;

/// A prime number, checked on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p > MAX_PRIME {
            return Err(Error::PrimeTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Deterministic trial division; adequate for `n <= MAX_PRIME` and far beyond.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes `<= bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<Prime> {
    if bound < 2 {
        return Vec::new();
    }
    let len = bound as usize + 1;
    let mut composite = vec![false; len];
    let mut out = Vec::new();
    for i in 2..len {
        if composite[i] {
            continue;
        }
        out.push(Prime(i as u64));
        let mut j = i * i;
        while j < len {
            composite[j] = true;
            j += i;
        }
    }
    out
}

pub(crate) fn checked_pow(base: u64, exp: u32, what: &'static str) -> Result<u64> {
    base.checked_pow(exp).ok_or(Error::Overflow(what))
}

/// `value = sum(digits[nu] * p^nu)`, least significant digit first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasePExpansion {
    pub p: Prime,
    pub value: u64,
    pub digits: Vec<u64>,
}

impl BasePExpansion {
    /// Number of digits; zero for `value == 0`.
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Recomputes the value from the digits, `None` on overflow.
    pub fn reconstruct(&self) -> Option<u64> {
        let p = self.p.get();
        self.digits
            .iter()
            .rev()
            .try_fold(0u64, |acc, &d| acc.checked_mul(p)?.checked_add(d))
    }

    /// `sum_{nu >= from} a_nu p^nu`.
    fn sum_from(&self, from: usize) -> u64 {
        let p = self.p.get();
        if from >= self.digits.len() {
            return 0;
        }
        self.digits[from..]
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * p + d)
            * p.pow(from as u32)
    }

    /// `sum_{nu < below} a_nu p^nu`.
    fn sum_below(&self, below: usize) -> u64 {
        let p = self.p.get();
        self.digits[..below.min(self.digits.len())]
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * p + d)
    }
}

pub fn expand(value: u64, p: Prime) -> BasePExpansion {
    let base = p.get();
    let mut digits = Vec::new();
    let mut rest = value;
    while rest > 0 {
        digits.push(rest % base);
        rest /= base;
    }
    BasePExpansion { p, value, digits }
}

/// Checked variant of [`expand`] taking a raw base.
pub fn expand_checked(value: u64, p: u64) -> Result<BasePExpansion> {
    Ok(expand(value, Prime::new(p)?))
}

/// One maximal block of `p - 1` digits, `a_low ..= a_high`, with the
/// partial sums of `q` that surround it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    /// Most significant position of the block (`i`).
    pub high: u32,
    /// Least significant position of the block (`j`).
    pub low: u32,
    /// Digits strictly above the block: `sum_{nu > high} a_nu p^nu`.
    pub above: u64,
    /// Digits from the bottom of the block upward: `sum_{nu >= low} a_nu p^nu`.
    pub from_low: u64,
    /// Digits strictly below the block: `sum_{nu < low} a_nu p^nu`.
    pub below: u64,
}

impl Run {
    /// `high - low + 2`, the exponent of the associated torsion summand.
    pub fn exponent(&self) -> u32 {
        self.high - self.low + 2
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunDecomposition {
    pub p: Prime,
    pub l: u64,
    /// `p`-adic valuation of `l`.
    pub m: u32,
    /// `l / p^m`.
    pub q: u64,
    pub q_digits: BasePExpansion,
    /// Most significant run first; `runs[a].low >= runs[a + 1].high + 2`.
    pub runs: Vec<Run>,
}

impl RunDecomposition {
    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    /// Run by 1-based index `alpha`.
    pub fn run(&self, alpha: usize) -> Result<&Run> {
        if alpha == 0 || alpha > self.runs.len() {
            return Err(Error::RunIndex {
                alpha,
                runs: self.runs.len(),
            });
        }
        Ok(&self.runs[alpha - 1])
    }

    /// `p^m`.
    pub fn p_pow_m(&self) -> u64 {
        self.p.get().pow(self.m)
    }
}

pub fn decompose(l: u64, p: Prime) -> Result<RunDecomposition> {
    if l == 0 {
        return Err(Error::Domain(
            "l must be at least 1 for the run decomposition".into(),
        ));
    }
    let base = p.get();
    let mut m = 0u32;
    let mut q = l;
    while q.is_multiple_of(base) {
        q /= base;
        m += 1;
    }
    let q_digits = expand(q, p);

    let digits = &q_digits.digits;
    let mut runs = Vec::new();
    let mut nu = digits.len();
    while nu > 0 {
        nu -= 1;
        if digits[nu] != base - 1 {
            continue;
        }
        let high = nu;
        while nu > 0 && digits[nu - 1] == base - 1 {
            nu -= 1;
        }
        let low = nu;
        runs.push(Run {
            high: high as u32,
            low: low as u32,
            above: q_digits.sum_from(high + 1),
            from_low: q_digits.sum_from(low),
            below: q_digits.sum_below(low),
        });
    }

    Ok(RunDecomposition {
        p,
        l,
        m,
        q,
        q_digits,
        runs,
    })
}

/// Checked variant of [`decompose`] taking a raw base.
pub fn decompose_checked(l: u64, p: u64) -> Result<RunDecomposition> {
    decompose(l, Prime::new(p)?)
}

/// Primes `p` for which `l` has at least one run. Any such prime satisfies
/// `p - 1 <= q <= l`, so the search stops at `l + 1`.
pub fn relevant_primes(l: u64) -> Vec<Prime> {
    primes_up_to(l.saturating_add(1))
        .into_iter()
        .filter(|&p| has_run(l, p))
        .collect()
}

fn has_run(l: u64, p: Prime) -> bool {
    let base = p.get();
    let mut q = l;
    while q > 0 && q.is_multiple_of(base) {
        q /= base;
    }
    while q > 0 {
        if q % base == base - 1 {
            return true;
        }
        q /= base;
    }
    false
}
