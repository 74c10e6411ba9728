//! Parallel verification over ranges of `l` and `p`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use polytors_core::digits::{is_prime, Prime};
use polytors_core::oracle::{verify, Outcome, RunCheck, VerificationReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub l: u64,
    pub p: Prime,
    #[serde(flatten)]
    pub check: RunCheck,
}

impl Diagnostic {
    pub fn line(&self) -> String {
        format!(
            "l = {}, p = {}, alpha = {}, m = {}, run {}..{}, degree {}: {}",
            self.l,
            self.p,
            self.check.alpha,
            self.check.m,
            self.check.run_low,
            self.check.run_high,
            self.check.degree,
            self.check.note()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub l_range: (u64, u64),
    pub primes: Vec<Prime>,
    pub strict: bool,
    pub pairs: usize,
    pub runs: usize,
    /// Runs per outcome, keyed by the kebab-case outcome name.
    pub counts: BTreeMap<String, usize>,
    /// Runs with `m >= 1`, and how many of them agree.
    pub divisible_runs: usize,
    pub divisible_agree: usize,
    /// Everything that is neither an agreement nor a consistent omission,
    /// sorted by `(l, p, alpha)`.
    pub diagnostics: Vec<Diagnostic>,
}

impl SweepReport {
    pub fn hard_failures(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics
            .iter()
            .filter(|d| d.check.outcome.is_hard_failure())
    }

    pub fn ambiguities(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics
            .iter()
            .filter(|d| d.check.outcome.is_ambiguity())
    }

    pub fn exit_code(&self) -> i32 {
        if self.hard_failures().next().is_some() {
            crate::EXIT_CONSISTENCY
        } else if self.strict && self.ambiguities().next().is_some() {
            crate::EXIT_STRICT_DISCREPANCY
        } else {
            crate::EXIT_OK
        }
    }

    pub fn summary_line(&self) -> String {
        if self.divisible_agree == self.divisible_runs && self.hard_failures().next().is_none() {
            format!("all m>=1 runs agree ({} runs)", self.divisible_runs)
        } else {
            format!(
                "FAILED: {} of {} m>=1 runs agree, {} hard failures",
                self.divisible_agree,
                self.divisible_runs,
                self.hard_failures().count()
            )
        }
    }

    pub fn render_text(&self) -> String {
        let primes: Vec<String> = self.primes.iter().map(Prime::to_string).collect();
        let mut out = format!(
            "verify l = {}..{}, primes [{}], strict = {}\n",
            self.l_range.0,
            self.l_range.1,
            primes.join(", "),
            self.strict
        );
        out.push_str(&format!(
            "pairs with runs: {}, runs: {}\n",
            self.pairs, self.runs
        ));
        for (k, v) in &self.counts {
            out.push_str(&format!("  {k}: {v}\n"));
        }
        out.push_str(&self.summary_line());
        out.push('\n');
        let ambiguous = self.ambiguities().count();
        if ambiguous > 0 {
            out.push_str(&format!(
                "{ambiguous} open-question discrepancies (m = 0, last run starting above digit 0){}\n",
                if self.strict { ": strict mode fails" } else { ": reported only" }
            ));
        }
        if !self.diagnostics.is_empty() {
            out.push_str("diagnostics:\n");
            for d in &self.diagnostics {
                out.push_str("  ");
                out.push_str(&d.line());
                out.push('\n');
            }
        }
        out
    }
}

fn outcome_name(o: Outcome) -> String {
    serde_json::to_value(o)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_else(|| format!("{o:?}"))
}

/// Primes inside `range`.
pub fn primes_in(range: &RangeInclusive<u64>) -> Result<Vec<Prime>, CliError> {
    (*range.start()..=*range.end())
        .filter(|&p| is_prime(p))
        .map(|p| Prime::new(p).map_err(CliError::from))
        .collect()
}

/// Runs [`verify`] on every `(l, p)` pair with `jobs` workers (0 = all cores).
/// The result does not depend on `jobs`.
pub fn run_sweep(
    ls: RangeInclusive<u64>,
    primes: &[Prime],
    strict: bool,
    jobs: usize,
) -> Result<SweepReport, CliError> {
    let pairs: Vec<(u64, Prime)> = ls
        .clone()
        .flat_map(|l| primes.iter().map(move |&p| (l, p)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let mut reports: Vec<VerificationReport> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(l, p)| verify(l, p, strict))
            .collect::<Result<Vec<_>, _>>()
    })?;
    reports.sort_by_key(|r| (r.l, r.p));
    Ok(aggregate(&ls, primes, strict, &reports))
}

pub fn aggregate(
    ls: &RangeInclusive<u64>,
    primes: &[Prime],
    strict: bool,
    reports: &[VerificationReport],
) -> SweepReport {
    let mut counts = BTreeMap::new();
    let mut diagnostics = Vec::new();
    let (mut divisible_runs, mut divisible_agree, mut runs, mut pairs) = (0, 0, 0, 0);
    for r in reports {
        if !r.runs.is_empty() {
            pairs += 1;
        }
        for c in &r.runs {
            runs += 1;
            *counts.entry(outcome_name(c.outcome)).or_insert(0) += 1;
            if c.m >= 1 {
                divisible_runs += 1;
                divisible_agree += usize::from(c.outcome == Outcome::Agree);
            }
            if !matches!(c.outcome, Outcome::Agree | Outcome::OmissionConsistent) {
                diagnostics.push(Diagnostic {
                    l: r.l,
                    p: r.p,
                    check: c.clone(),
                });
            }
        }
    }
    diagnostics.sort_by_key(|d| (d.l, d.p, d.check.alpha));
    SweepReport {
        l_range: (*ls.start(), *ls.end()),
        primes: primes.to_vec(),
        strict,
        pairs,
        runs,
        counts,
        divisible_runs,
        divisible_agree,
        diagnostics,
    }
}
