//! Higher `p`-torsion in `H_*(W^l(S^{2n-2}); Z)` and in `H_*(P_{k,n}^l; Z)`.
//!
//! Every run `(i, j)` of the decomposition of `l` at `p` yields a summand
//! `Z/p^(i-j+2)` in degree `2(n-1) p^m (u + p^(i+1)) - 2`, where `u` is the
//! part of `q` above the run. The summand first shows up in `P_{k,n}^l` at
//! `k = n (d + 2) / (2 (n - 1))`. When `p` does not divide `l` the least
//! significant run is dropped.

use serde::Serialize;

use crate::arnold;
use crate::digits::{checked_pow, decompose, relevant_primes, Prime, Run, RunDecomposition};
use crate::error::{Error, Result};
use crate::graded::{merge, FinAbGroup, GradedGroup, Stage, Status};

/// Why a run produces no reported summand. Only the least significant run
/// of a decomposition with `m = 0` is ever omitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Omission {
    /// The run reaches digit 0; its classes reduce the free generator of
    /// `H_{2l+1}` and the would-be degree lies in the vanishing range.
    FreeGenerator,
    /// The run starts above digit 0. The omission rule still applies, but
    /// the free-generator argument does not; see the verification report.
    DocumentedAmbiguity,
}

impl Omission {
    pub fn reason(self) -> &'static str {
        match self {
            Omission::FreeGenerator => {
                "m = 0 and the run reaches digit 0: the Bockstein source is the reduction of the free generator"
            }
            Omission::DocumentedAmbiguity => {
                "m = 0, last run starting above digit 0: omitted by rule, open question whether higher torsion survives"
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionSummand {
    pub p: Prime,
    pub n: u32,
    /// 1-based run index, most significant run first.
    pub alpha: usize,
    pub run_high: u32,
    pub run_low: u32,
    pub m: u32,
    pub degree: u64,
    pub exponent: u32,
    pub least_k: u64,
    pub omitted: Option<Omission>,
}

impl TorsionSummand {
    pub fn is_reported(&self) -> bool {
        self.omitted.is_none()
    }

    /// `p^exponent`.
    pub fn order(&self) -> u64 {
        self.p.get().pow(self.exponent)
    }
}

/// The two families of mod-`p` classes linked by an undetermined Bockstein.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClassFamily {
    /// `x^(p^m u) ⊗ Q_1^(m+i+1)(ι)`.
    Source,
    /// `x^(p^m v) ⊗ β Q_1^(m+j)(ι)`.
    Target,
}

/// A monomial `x^a ⊗ β^b Q_1^t(ι)` in the mod-`p` homology of `W^l`.
///
/// With `deg x = 2n-2`, `deg ι = 2n-3`, and both of weight `n`: `Q_1` sends an
/// odd class of degree `2s-1` to degree `2ps-1` and multiplies weight by `p`;
/// `β` lowers degree by one and keeps weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WeightedClass {
    pub family: ClassFamily,
    pub x_power: u64,
    pub q1_iterations: u32,
    pub bockstein: bool,
    pub degree: u64,
    pub weight: u64,
}

impl WeightedClass {
    fn build(
        family: ClassFamily,
        x_power: u64,
        q1_iterations: u32,
        bockstein: bool,
        n: u32,
        p: Prime,
    ) -> Result<Self> {
        let n = u64::from(n);
        let p_t = checked_pow(p.get(), q1_iterations, "p^t")?;
        let overflow = || Error::Overflow("class degree");
        // ι has degree 2(n-1) - 1; t applications of Q_1 give 2(n-1)p^t - 1.
        let iota_degree = (2 * (n - 1)).checked_mul(p_t).ok_or_else(overflow)? - 1;
        let x_degree = (2 * n - 2).checked_mul(x_power).ok_or_else(overflow)?;
        let degree = (x_degree + iota_degree) - u64::from(bockstein);
        let weight = n
            .checked_mul(x_power.checked_add(p_t).ok_or_else(overflow)?)
            .ok_or(Error::Overflow("class weight"))?;
        Ok(WeightedClass {
            family,
            x_power,
            q1_iterations,
            bockstein,
            degree,
            weight,
        })
    }

    /// `x^(p^m u_alpha) ⊗ Q_1^(m+i_alpha+1)(ι)`.
    pub fn source(decomp: &RunDecomposition, alpha: usize, n: u32) -> Result<Self> {
        let run = decomp.run(alpha)?;
        let x_power = decomp.p_pow_m() * run.above;
        Self::build(
            ClassFamily::Source,
            x_power,
            decomp.m + run.high + 1,
            false,
            n,
            decomp.p,
        )
    }

    /// `x^(p^m v_alpha) ⊗ β Q_1^(m+j_alpha)(ι)`.
    pub fn target(decomp: &RunDecomposition, alpha: usize, n: u32) -> Result<Self> {
        let run = decomp.run(alpha)?;
        let x_power = decomp.p_pow_m() * run.from_low;
        Self::build(
            ClassFamily::Target,
            x_power,
            decomp.m + run.low,
            true,
            n,
            decomp.p,
        )
    }
}

fn check_n(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}

/// `p^m (u + p^(i+1))`, the half-degree shift shared by all formulas.
fn scaled_top(decomp: &RunDecomposition, run: &Run) -> Result<u64> {
    let p_i = checked_pow(decomp.p.get(), run.high + 1, "p^(i+1)")?;
    decomp
        .p_pow_m()
        .checked_mul(run.above + p_i)
        .ok_or(Error::Overflow("p^m (u + p^(i+1))"))
}

/// Degree for `n = 2`: `2 (p^m u + p^(m+i+1) - 1)`.
pub fn degree_n2(decomp: &RunDecomposition, run: &Run) -> Result<u64> {
    let pm_u = decomp
        .p_pow_m()
        .checked_mul(run.above)
        .ok_or(Error::Overflow("p^m u"))?;
    let p_top = checked_pow(decomp.p.get(), decomp.m + run.high + 1, "p^(m+i+1)")?;
    pm_u.checked_add(p_top)
        .and_then(|s| (s - 1).checked_mul(2))
        .ok_or(Error::Overflow("n = 2 degree"))
}

/// Degree for general `n`: `2 (n-1) p^m (u + p^(i+1)) - 2`.
pub fn degree_general(decomp: &RunDecomposition, run: &Run, n: u32) -> Result<u64> {
    check_n(n)?;
    let top = scaled_top(decomp, run)?;
    (2 * u64::from(n - 1))
        .checked_mul(top)
        .map(|x| x - 2)
        .ok_or(Error::Overflow("degree"))
}

/// `n (d + 2) / (2 (n - 1))`, checked to divide exactly.
pub fn least_k_from_degree(degree: u64, n: u32) -> Result<u64> {
    check_n(n)?;
    let n = u64::from(n);
    let num = degree
        .checked_add(2)
        .and_then(|d| d.checked_mul(n))
        .ok_or(Error::Overflow("n (d + 2)"))?;
    let den = 2 * (n - 1);
    if num % den != 0 {
        return Err(Error::Domain(format!(
            "n (d + 2) = {num} is not divisible by 2 (n - 1) = {den}"
        )));
    }
    Ok(num / den)
}

/// Least `k` computed from the weight of the Bockstein target class:
/// `n (p^m v + p^(m+j))`.
pub fn least_k_via_weight(l: u64, n: u32, p: Prime, alpha: usize) -> Result<u64> {
    check_n(n)?;
    let decomp = decompose(l, p)?;
    Ok(WeightedClass::target(&decomp, alpha, n)?.weight)
}

fn summand_for(decomp: &RunDecomposition, alpha: usize, n: u32) -> Result<TorsionSummand> {
    let run = decomp.run(alpha)?;
    let degree = if n == 2 {
        degree_n2(decomp, run)?
    } else {
        degree_general(decomp, run, n)?
    };
    let least_k = least_k_from_degree(degree, n)?;
    let omitted = (decomp.m == 0 && alpha == decomp.run_count()).then_some({
        if run.low == 0 {
            Omission::FreeGenerator
        } else {
            Omission::DocumentedAmbiguity
        }
    });
    Ok(TorsionSummand {
        p: decomp.p,
        n,
        alpha,
        run_high: run.high,
        run_low: run.low,
        m: decomp.m,
        degree,
        exponent: run.exponent(),
        least_k,
        omitted,
    })
}

/// One entry per run, sorted by degree; omitted runs are kept and flagged.
pub fn higher_torsion(l: u64, n: u32, p: Prime) -> Result<Vec<TorsionSummand>> {
    check_n(n)?;
    let decomp = decompose(l, p)?;
    let mut out = (1..=decomp.run_count())
        .map(|alpha| summand_for(&decomp, alpha, n))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|s| (s.degree, s.alpha));
    Ok(out)
}

/// [`higher_torsion`] over every prime with a run, sorted by `(degree, p)`.
pub fn all_higher_torsion(l: u64, n: u32) -> Result<Vec<TorsionSummand>> {
    check_n(n)?;
    if l == 0 {
        return Err(Error::Domain("l must be at least 1".into()));
    }
    let mut out = Vec::new();
    for p in relevant_primes(l) {
        out.extend(higher_torsion(l, n, p)?);
    }
    out.sort_by_key(|s| (s.degree, s.p, s.alpha));
    Ok(out)
}

/// Reported summands present in `H_*(P_{k,n}^l; Z)`: those with `least_k <= k`.
pub fn summands_at(k: u64, n: u32, l: u64) -> Result<Vec<TorsionSummand>> {
    let mut v = all_higher_torsion(l, n)?;
    v.retain(|s| s.is_reported() && s.least_k <= k);
    Ok(v)
}

/// Degree of the free class `x^l ⊗ ι`: `(2n-2) l + (2n-3)`.
pub fn free_class_degree(l: u64, n: u32) -> Result<u64> {
    let n = u64::from(n);
    (2 * n - 2)
        .checked_mul(l)
        .and_then(|d| d.checked_add(2 * n - 3))
        .ok_or(Error::Overflow("free class degree"))
}

/// Shared skeleton of the stable and unstable computations: degree 0, the
/// vanishing range (for `n = 2`), the free class, and every reported summand
/// accepted by `keep`.
fn skeleton(
    l: u64,
    n: u32,
    k: Stage,
    max_degree: u64,
    keep: impl Fn(&TorsionSummand) -> bool,
    summands: &[TorsionSummand],
) -> Result<GradedGroup> {
    let free_degree = free_class_degree(l, n)?;
    let mut g = GradedGroup::empty(n, l, k);
    for d in 0..=max_degree {
        let (group, status) = if d == 0 {
            (FinAbGroup::free(1), Status::Complete)
        } else if n == 2 && d <= 2 * l {
            (FinAbGroup::trivial(), Status::Complete)
        } else if d < free_degree {
            (FinAbGroup::trivial(), Status::Unknown)
        } else if d == free_degree {
            (FinAbGroup::free(1), Status::PartialUpToOrderP)
        } else {
            (FinAbGroup::trivial(), Status::PartialUpToOrderP)
        };
        g.set(d, group, status);
    }
    for s in summands {
        if s.is_reported() && s.degree <= max_degree && keep(s) {
            g.add_summand(s.degree, s.p.get(), s.exponent);
        }
    }
    if n > 2 && max_degree >= free_degree.saturating_sub(1) {
        g.provenance.push("free-class-degree-derived".into());
    }
    Ok(g)
}

/// `H_*(W^l(S^{2n-2}); Z)` through `max_degree`, optionally restricted to the
/// summands of one prime.
pub fn homology_of_w(l: u64, n: u32, p: Option<Prime>, max_degree: u64) -> Result<GradedGroup> {
    check_n(n)?;
    let summands = match p {
        Some(p) => higher_torsion(l, n, p)?,
        None => all_higher_torsion(l, n)?,
    };
    let mut g = skeleton(l, n, Stage::Stable, max_degree, |_| true, &summands)?;
    g.provenance.push("higher-torsion".into());
    if let Some(p) = p {
        g.provenance.push(format!("prime-{p}-only"));
    }
    Ok(g)
}

/// `H_*(P_{k,n}^l; Z)` through `max_degree`.
///
/// Below `k = n(l+1)` the space is all of `C^k`. For `n = 2` the degrees
/// `2l+1..=2l+5` come from Arnol'd's table, checked against the summands.
pub fn homology_of_p(k: u64, n: u32, l: u64, max_degree: u64) -> Result<GradedGroup> {
    check_n(n)?;
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if l == 0 {
        return Err(Error::Domain("l must be at least 1".into()));
    }
    let threshold = u64::from(n)
        .checked_mul(l + 1)
        .ok_or(Error::Overflow("n (l + 1)"))?;
    if k < threshold {
        let mut g = GradedGroup::empty(n, l, Stage::Finite(k));
        g.set(0, FinAbGroup::free(1), Status::Complete);
        for d in 1..=max_degree {
            g.set(d, FinAbGroup::trivial(), Status::Complete);
        }
        g.provenance.push("contractible".into());
        return Ok(g);
    }

    let summands = summands_at(k, n, l)?;
    let mut g = skeleton(l, n, Stage::Finite(k), max_degree, |_| true, &summands)?;
    g.provenance.push("higher-torsion".into());
    if n != 2 {
        return Ok(g);
    }

    let row = arnold::table_orders(l, k)?;
    let mut table = GradedGroup::empty(2, l, Stage::Finite(k));
    for (degree, order) in row.columns().filter(|&(d, _)| d <= max_degree) {
        table.set(degree, order.group(), Status::Complete);
    }
    table.provenance.push("arnold-table".into());
    merge(&g, &table)
}
