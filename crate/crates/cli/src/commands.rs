use polytors_core::arnold::{self, Bracket};
use polytors_core::digits::{Prime, MAX_PRIME};
use polytors_core::graded::{self, render};
use polytors_core::torsion::{
    all_higher_torsion, free_class_degree, higher_torsion, homology_of_p, homology_of_w,
    TorsionSummand,
};
use serde::Serialize;

use crate::config::{
    check_l, check_n, max_l, Format, HomologyArgs, KArg, TableArgs, TorsionArgs, VerifyArgs,
    MAX_DEGREE_CAP,
};
use crate::sweep::{primes_in, run_sweep};
use crate::{CliError, Output};

fn graded_format(f: Format) -> graded::Format {
    match f {
        Format::Text => graded::Format::Text,
        Format::Md => graded::Format::Markdown,
        Format::Json => graded::Format::Json,
    }
}

fn prime_arg(p: u64) -> Result<Prime, CliError> {
    Prime::new(p).map_err(|e| CliError::Usage(e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

/// Highest degree worth showing by default: the free class plus the first
/// few degrees above it, or the top higher-torsion summand if that is later.
fn default_max_degree(l: u64, n: u32, summands: &[TorsionSummand]) -> Result<u64, CliError> {
    let free = free_class_degree(l, n)?;
    let top = summands
        .iter()
        .filter(|s| s.is_reported())
        .map(|s| s.degree)
        .max()
        .unwrap_or(0);
    let d = top.max(free + 4);
    if d > MAX_DEGREE_CAP {
        return Err(CliError::Usage(format!(
            "the highest interesting degree is {d}; pass --max-degree (at most {MAX_DEGREE_CAP})"
        )));
    }
    Ok(d)
}

pub fn cmd_homology(args: &HomologyArgs) -> Result<Output, CliError> {
    check_n(args.n)?;
    check_l(args.l)?;
    let p = args.p.map(prime_arg).transpose()?;
    let max_degree = match args.max_degree {
        Some(d) if d > MAX_DEGREE_CAP => {
            return Err(CliError::Usage(format!(
                "--max-degree {d} exceeds {MAX_DEGREE_CAP}"
            )))
        }
        Some(d) => d,
        None => default_max_degree(args.l, args.n, &all_higher_torsion(args.l, args.n)?)?,
    };
    let g = match args.k {
        KArg::Inf => homology_of_w(args.l, args.n, p, max_degree)?,
        KArg::Finite(k) => {
            if p.is_some() {
                return Err(CliError::Usage("--p is only supported with --k inf".into()));
            }
            if k == 0 {
                return Err(CliError::Usage("k must be at least 1".into()));
            }
            homology_of_p(k, args.n, args.l, max_degree)?
        }
    };
    Ok(Output::ok(render(&g, graded_format(args.common.format))))
}

#[derive(Serialize)]
struct TorsionJson<'a> {
    n: u32,
    l: u64,
    summands: &'a [TorsionSummand],
}

fn summand_text(s: &TorsionSummand) -> String {
    let head = format!(
        "H_{} ⊇ Z/{}  (p = {}, run {}: digits {}..{}, m = {}), least k = {}",
        s.degree,
        s.order(),
        s.p,
        s.alpha,
        s.run_low,
        s.run_high,
        s.m,
        s.least_k
    );
    match s.omitted {
        None => head,
        Some(why) => format!("[omitted] {head}: {}", why.reason()),
    }
}

pub fn cmd_torsion(args: &TorsionArgs) -> Result<Output, CliError> {
    check_n(args.n)?;
    check_l(args.l)?;
    let mut summands = match args.p {
        Some(p) => higher_torsion(args.l, args.n, prime_arg(p)?)?,
        None => all_higher_torsion(args.l, args.n)?,
    };
    if !args.show_omitted {
        summands.retain(TorsionSummand::is_reported);
    }
    let text = match args.common.format {
        Format::Json => to_json(&TorsionJson {
            n: args.n,
            l: args.l,
            summands: &summands,
        }),
        Format::Text => {
            let mut out = format!("# higher torsion, n = {}, l = {}\n", args.n, args.l);
            if summands.is_empty() {
                out.push_str("none\n");
            }
            for s in &summands {
                out.push_str(&summand_text(s));
                out.push('\n');
            }
            out
        }
        Format::Md => {
            let mut out = format!(
                "Higher torsion for n = {}, l = {}\n\n| degree | summand | p | run | digits | m | least k | omitted |\n|---:|---|---:|---:|---|---:|---:|---|\n",
                args.n, args.l
            );
            for s in &summands {
                out.push_str(&format!(
                    "| {} | Z/{} | {} | {} | {}..{} | {} | {} | {} |\n",
                    s.degree,
                    s.order(),
                    s.p,
                    s.alpha,
                    s.run_low,
                    s.run_high,
                    s.m,
                    s.least_k,
                    s.omitted.map_or("", |w| w.reason())
                ));
            }
            out
        }
    };
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct TableRowJson {
    k_from: u64,
    /// `None` for the stable row.
    k_to: Option<u64>,
    orders: [arnold::Order; 5],
}

#[derive(Serialize)]
struct TableJson {
    l: u64,
    degrees: Vec<u64>,
    rows: Vec<TableRowJson>,
}

fn bracket_label(l: u64, b: Bracket) -> String {
    let k = b.first_k(l);
    match b {
        Bracket::Stable => format!(">= {k} (stable)"),
        _ => format!("{k}, {}", k + 1),
    }
}

pub fn cmd_table(args: &TableArgs) -> Result<Output, CliError> {
    check_l(args.l)?;
    let l = args.l;
    let rows = arnold::table(l)?;
    let degrees: Vec<u64> = (2 * l + 1..=2 * l + 5).collect();
    let text = match args.common.format {
        Format::Json => to_json(&TableJson {
            l,
            degrees,
            rows: rows
                .iter()
                .map(|r| TableRowJson {
                    k_from: r.bracket.first_k(l),
                    k_to: (r.bracket != Bracket::Stable).then(|| r.bracket.first_k(l) + 1),
                    orders: r.orders,
                })
                .collect(),
        }),
        Format::Text => {
            let labels: Vec<String> = rows.iter().map(|r| bracket_label(l, r.bracket)).collect();
            let width = labels
                .iter()
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
                .max(5);
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| r.orders.iter().map(ToString::to_string).collect())
                .collect();
            let col = cells
                .iter()
                .flatten()
                .map(|s| s.chars().count())
                .chain(degrees.iter().map(|d| d.to_string().len()))
                .max()
                .unwrap_or(1)
                + 2;
            let mut out = format!(
                "orders of H_j(P_{{k,2}}^{l}; Z) for j = {}..{} (1 = trivial, ∞ = Z)\n",
                2 * l + 1,
                2 * l + 5
            );
            out.push_str(&format!("{:<width$}", "k \\ j"));
            for d in &degrees {
                out.push_str(&format!("{d:>col$}"));
            }
            out.push('\n');
            for (label, row) in labels.iter().zip(&cells) {
                out.push_str(&format!("{label:<width$}"));
                for c in row {
                    let pad = col.saturating_sub(c.chars().count());
                    out.push_str(&" ".repeat(pad));
                    out.push_str(c);
                }
                out.push('\n');
            }
            out
        }
        Format::Md => {
            let mut out = format!(
                "| k \\ j | {} |\n|---|{}\n",
                degrees
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(" | "),
                "---:|".repeat(5)
            );
            for r in &rows {
                out.push_str(&format!(
                    "| {} | {} |\n",
                    bracket_label(l, r.bracket),
                    r.orders
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(" | ")
                ));
            }
            out
        }
    };
    Ok(Output::ok(text))
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Output, CliError> {
    let ls = args.l.0.clone();
    if *ls.start() == 0 {
        return Err(CliError::Usage(
            "the l range must start at 1 or above".into(),
        ));
    }
    let cap = max_l()?;
    if *ls.end() > cap {
        return Err(CliError::Usage(format!(
            "l = {} exceeds the cap {cap}",
            ls.end()
        )));
    }
    if *args.p.0.end() > MAX_PRIME {
        return Err(CliError::Usage(format!(
            "primes above {MAX_PRIME} are not supported"
        )));
    }
    let primes = primes_in(&args.p.0)?;
    if primes.is_empty() {
        return Err(CliError::Usage(format!("no primes in {}", args.p)));
    }
    let report = run_sweep(ls, &primes, args.strict, args.jobs)?;
    let stdout = match args.common.format {
        Format::Json => to_json(&report),
        Format::Text => report.render_text(),
        Format::Md => format!("```\n{}```\n", report.render_text()),
    };
    let code = report.exit_code();
    let stderr = match code {
        crate::EXIT_OK => String::new(),
        crate::EXIT_STRICT_DISCREPANCY => format!(
            "strict mode: {} open-question discrepancies\n",
            report.ambiguities().count()
        ),
        _ => format!("{}\n", report.summary_line()),
    };
    Ok(Output {
        stdout,
        stderr,
        code,
    })
}
