//! Finitely generated abelian groups, graded by homological degree, with an
//! explicit record of how much of each group is actually known.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::digits::is_prime;
use crate::error::{Error, Result};

/// `Z^free_rank ⊕ ⊕ Z/p^e`, stored as prime-power summands sorted by `(p, e)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FinAbGroup {
    free_rank: u32,
    torsion: Vec<(u64, u32)>,
}

impl FinAbGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: u32) -> Self {
        FinAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// `Z/n`, split into its primary parts. `n = 1` gives the trivial group.
    pub fn cyclic(n: u64) -> Self {
        assert!(n >= 1, "Z/0 is not a finite cyclic group");
        let mut torsion = Vec::new();
        let mut rest = n;
        let mut d = 2u64;
        while d * d <= rest {
            let mut e = 0;
            while rest.is_multiple_of(d) {
                rest /= d;
                e += 1;
            }
            if e > 0 {
                torsion.push((d, e));
            }
            d += 1;
        }
        if rest > 1 {
            torsion.push((rest, 1));
        }
        FinAbGroup {
            free_rank: 0,
            torsion,
        }
    }

    pub fn new(free_rank: u32, mut torsion: Vec<(u64, u32)>) -> Result<Self> {
        for &(p, e) in &torsion {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if e == 0 {
                return Err(Error::Domain(format!("zero exponent on Z/{p}^0")));
            }
        }
        torsion.sort_unstable();
        Ok(FinAbGroup { free_rank, torsion })
    }

    pub fn free_rank(&self) -> u32 {
        self.free_rank
    }

    pub fn torsion(&self) -> &[(u64, u32)] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of a finite group, `None` when infinite or too large for `u64`.
    pub fn order(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        self.torsion
            .iter()
            .try_fold(1u64, |acc, &(p, e)| acc.checked_mul(p.checked_pow(e)?))
    }

    pub fn is_cyclic(&self) -> bool {
        match self.free_rank {
            0 => self.torsion.windows(2).all(|w| w[0].0 != w[1].0),
            1 => self.torsion.is_empty(),
            _ => false,
        }
    }

    /// Largest exponent of `p` among the summands, 0 when there is none.
    pub fn p_exponent(&self, p: u64) -> u32 {
        self.torsion
            .iter()
            .filter(|&&(q, _)| q == p)
            .map(|&(_, e)| e)
            .max()
            .unwrap_or(0)
    }

    pub fn add_summand(&mut self, p: u64, e: u32) {
        debug_assert!(e >= 1);
        let at = self.torsion.partition_point(|&s| s <= (p, e));
        self.torsion.insert(at, (p, e));
    }

    pub fn add_free(&mut self, rank: u32) {
        self.free_rank += rank;
    }

    /// Invariant factors `d_1 | d_2 | ... | d_s` of the torsion subgroup.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &(p, e) in &self.torsion {
            by_prime.entry(p).or_default().push(e);
        }
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; len];
        for (p, mut exps) in by_prime {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            for (slot, e) in exps.into_iter().enumerate() {
                factors[len - 1 - slot] *= p.pow(e);
            }
        }
        factors
    }

    /// Multiset inclusion of summands, with the free rank as a lower bound.
    pub fn is_subgroup_listing_of(&self, other: &FinAbGroup) -> bool {
        if self.free_rank > other.free_rank {
            return false;
        }
        let mut rest = other.torsion.clone();
        for s in &self.torsion {
            match rest.iter().position(|t| t == s) {
                Some(i) => {
                    rest.remove(i);
                }
                None => return false,
            }
        }
        true
    }

    /// Summand-wise maximum of multiplicities.
    fn union(&self, other: &FinAbGroup) -> FinAbGroup {
        let mut count: BTreeMap<(u64, u32), (usize, usize)> = BTreeMap::new();
        for &s in &self.torsion {
            count.entry(s).or_default().0 += 1;
        }
        for &s in &other.torsion {
            count.entry(s).or_default().1 += 1;
        }
        let torsion = count
            .into_iter()
            .flat_map(|(s, (a, b))| std::iter::repeat_n(s, a.max(b)))
            .collect();
        FinAbGroup {
            free_rank: self.free_rank.max(other.free_rank),
            torsion,
        }
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for &(p, e) in &self.torsion {
            parts.push(format!("Z/{}", p.pow(e)));
        }
        f.write_str(&parts.join(" ⊕ "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Nothing beyond the listed summands is asserted.
    Unknown,
    /// Listed summands are present; order-exactly-`p` torsion is not computed.
    #[serde(rename = "partial")]
    PartialUpToOrderP,
    Complete,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeEntry {
    pub group: FinAbGroup,
    pub status: Status,
}

/// Polynomial degree `k`, or the stable space for `k = ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Finite(u64),
    Stable,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Finite(k) => k.fmt(f),
            Stage::Stable => f.write_str("inf"),
        }
    }
}

impl Serialize for Stage {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Stage::Finite(k) => s.serialize_u64(*k),
            Stage::Stable => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Stage {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(k) => Ok(Stage::Finite(k)),
            Raw::Text(s) if s == "inf" => Ok(Stage::Stable),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "expected an integer or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// Homology of one space, degree by degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedGroup {
    pub n: u32,
    pub l: u64,
    pub k: Stage,
    pub degrees: BTreeMap<u64, DegreeEntry>,
    /// Free-form tags naming the sources merged into this value. Not serialized.
    pub provenance: Vec<String>,
}

impl GradedGroup {
    pub fn empty(n: u32, l: u64, k: Stage) -> Self {
        GradedGroup {
            n,
            l,
            k,
            degrees: BTreeMap::new(),
            provenance: Vec::new(),
        }
    }

    pub fn set(&mut self, degree: u64, group: FinAbGroup, status: Status) {
        self.degrees.insert(degree, DegreeEntry { group, status });
    }

    pub fn get(&self, degree: u64) -> Option<&DegreeEntry> {
        self.degrees.get(&degree)
    }

    /// Adds `Z/p^e` in `degree`, creating an `Unknown` entry if needed.
    pub fn add_summand(&mut self, degree: u64, p: u64, e: u32) {
        self.degrees
            .entry(degree)
            .or_insert_with(|| DegreeEntry {
                group: FinAbGroup::trivial(),
                status: Status::Unknown,
            })
            .group
            .add_summand(p, e);
    }

    /// Every listed summand, as `(degree, p, e)`.
    pub fn summands(&self) -> Vec<(u64, u64, u32)> {
        self.degrees
            .iter()
            .flat_map(|(&d, entry)| entry.group.torsion().iter().map(move |&(p, e)| (d, p, e)))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GradedJson::from(self)).expect("graded json is serializable")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&GradedJson::from(self)).expect("graded json is serializable")
    }

    pub fn from_json(text: &str) -> Result<GradedGroup> {
        let raw: GradedJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut g = GradedGroup::empty(raw.n, raw.l, raw.k);
        for entry in raw.groups {
            let group = FinAbGroup::new(entry.free_rank, entry.torsion)
                .map_err(|e| Error::Parse(format!("degree {}: {e}", entry.degree)))?;
            if g.degrees.contains_key(&entry.degree) {
                return Err(Error::Parse(format!(
                    "degree {} listed twice",
                    entry.degree
                )));
            }
            g.set(entry.degree, group, entry.status);
        }
        g.provenance.push("json".into());
        Ok(g)
    }
}

#[derive(Serialize, Deserialize)]
struct GradedJson {
    n: u32,
    l: u64,
    k: Stage,
    groups: Vec<DegreeJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DegreeJson {
    degree: u64,
    free_rank: u32,
    torsion: Vec<(u64, u32)>,
    status: Status,
}

impl From<&GradedGroup> for GradedJson {
    fn from(g: &GradedGroup) -> Self {
        GradedJson {
            n: g.n,
            l: g.l,
            k: g.k,
            groups: g
                .degrees
                .iter()
                .map(|(&degree, e)| DegreeJson {
                    degree,
                    free_rank: e.group.free_rank,
                    torsion: e.group.torsion.clone(),
                    status: e.status,
                })
                .collect(),
        }
    }
}

/// Combines two descriptions of the same homology.
///
/// Per degree: two complete entries must agree; a complete entry absorbs a
/// partial one whose summands it contains; partial or unknown entries are
/// united summand-wise. Anything else is an [`Error::Inconsistent`].
pub fn merge(a: &GradedGroup, b: &GradedGroup) -> Result<GradedGroup> {
    if (a.n, a.l, a.k) != (b.n, b.l, b.k) {
        return Err(Error::Incompatible(format!(
            "(n, l, k) = ({}, {}, {}) versus ({}, {}, {})",
            a.n, a.l, a.k, b.n, b.l, b.k
        )));
    }
    let mut out = a.clone();
    for (&degree, eb) in &b.degrees {
        let merged = match a.degrees.get(&degree) {
            None => eb.clone(),
            Some(ea) => merge_entry(degree, ea, eb)?,
        };
        out.degrees.insert(degree, merged);
    }
    for tag in &b.provenance {
        if !out.provenance.contains(tag) {
            out.provenance.push(tag.clone());
        }
    }
    out.provenance.sort();
    Ok(out)
}

fn merge_entry(degree: u64, a: &DegreeEntry, b: &DegreeEntry) -> Result<DegreeEntry> {
    let clash = || Error::Inconsistent {
        degree,
        left: describe(a),
        right: describe(b),
    };
    match (a.status, b.status) {
        (Status::Complete, Status::Complete) => {
            if a.group == b.group {
                Ok(a.clone())
            } else {
                Err(clash())
            }
        }
        (Status::Complete, _) => {
            if b.group.is_subgroup_listing_of(&a.group) {
                Ok(a.clone())
            } else {
                Err(clash())
            }
        }
        (_, Status::Complete) => {
            if a.group.is_subgroup_listing_of(&b.group) {
                Ok(b.clone())
            } else {
                Err(clash())
            }
        }
        (sa, sb) => Ok(DegreeEntry {
            group: a.group.union(&b.group),
            status: sa.max(sb),
        }),
    }
}

fn describe(e: &DegreeEntry) -> String {
    match e.status {
        Status::Complete => format!("{} (complete)", e.group),
        Status::PartialUpToOrderP => format!("⊇ {} (partial)", e.group),
        Status::Unknown => format!("⊇ {} (unknown)", e.group),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Markdown,
    Json,
}

/// Text for one degree entry, without the `H_d` prefix.
pub fn render_entry(e: &DegreeEntry) -> String {
    match e.status {
        Status::Complete => format!("{}", e.group),
        Status::PartialUpToOrderP if e.group.is_trivial() => {
            "undetermined elementary p-torsion only".to_string()
        }
        Status::PartialUpToOrderP => {
            format!("⊇ {}, plus undetermined elementary p-torsion", e.group)
        }
        Status::Unknown if e.group.is_trivial() => "undetermined".to_string(),
        Status::Unknown => format!("⊇ {}, otherwise undetermined", e.group),
    }
}

pub fn render(g: &GradedGroup, format: Format) -> String {
    match format {
        Format::Json => g.to_json() + "\n",
        Format::Text => {
            let mut out = format!("# n = {}, l = {}, k = {}\n", g.n, g.l, g.k);
            for (d, e) in &g.degrees {
                let body = render_entry(e);
                let sep = match e.status {
                    Status::Complete => " = ",
                    _ if body.starts_with('⊇') => " ",
                    _ => ": ",
                };
                out.push_str(&format!("H_{d}{sep}{body}\n"));
            }
            out
        }
        Format::Markdown => {
            let mut out = format!(
                "Homology for n = {}, l = {}, k = {}\n\n| degree | group | status |\n|---:|---|---|\n",
                g.n, g.l, g.k
            );
            for (d, e) in &g.degrees {
                let status = match e.status {
                    Status::Complete => "complete",
                    Status::PartialUpToOrderP => "partial",
                    Status::Unknown => "unknown",
                };
                out.push_str(&format!("| {d} | {} | {status} |\n", render_entry(e)));
            }
            out
        }
    }
}
