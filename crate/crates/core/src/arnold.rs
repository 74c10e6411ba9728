//! Arnol'd's table: the cyclic groups `H_j(P_{k,2}^l; Z)` for
//! `2l+1 <= j <= 2l+5`, as functions of `k` and `l`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graded::{FinAbGroup, Stage, Status};

/// Order of a cyclic group; `Cyclic(1)` is the trivial group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Infinite,
    Cyclic(u64),
}

impl Order {
    pub fn group(self) -> FinAbGroup {
        match self {
            Order::Infinite => FinAbGroup::free(1),
            Order::Cyclic(n) => FinAbGroup::cyclic(n),
        }
    }

    /// Exponent of `p` in a finite order, `None` for `Z`.
    pub fn p_exponent(self, p: u64) -> Option<u32> {
        match self {
            Order::Infinite => None,
            Order::Cyclic(mut n) => {
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                Some(e)
            }
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Infinite => f.write_str("∞"),
            Order::Cyclic(n) => n.fmt(f),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Order::Infinite => s.serialize_str("inf"),
            Order::Cyclic(n) => s.serialize_u64(*n),
        }
    }
}

/// Rows of the table. Each finite bracket covers two consecutive values of
/// `k`; from `2l+10` on the row no longer changes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bracket {
    From2lPlus2,
    From2lPlus4,
    From2lPlus6,
    From2lPlus8,
    Stable,
}

impl Bracket {
    pub const ALL: [Bracket; 5] = [
        Bracket::From2lPlus2,
        Bracket::From2lPlus4,
        Bracket::From2lPlus6,
        Bracket::From2lPlus8,
        Bracket::Stable,
    ];

    /// Bracket containing `k`.
    pub fn of(l: u64, k: u64) -> Result<Bracket> {
        let start = 2 * l + 2;
        if k < start {
            return Err(Error::Bracket { k, min: start });
        }
        Ok(match (k - start) / 2 {
            0 => Bracket::From2lPlus2,
            1 => Bracket::From2lPlus4,
            2 => Bracket::From2lPlus6,
            3 => Bracket::From2lPlus8,
            _ => Bracket::Stable,
        })
    }

    /// Smallest `k` in the bracket.
    pub fn first_k(self, l: u64) -> u64 {
        2 * l
            + match self {
                Bracket::From2lPlus2 => 2,
                Bracket::From2lPlus4 => 4,
                Bracket::From2lPlus6 => 6,
                Bracket::From2lPlus8 => 8,
                Bracket::Stable => 10,
            }
    }

    pub fn label(self) -> &'static str {
        match self {
            Bracket::From2lPlus2 => "2l+2, 2l+3",
            Bracket::From2lPlus4 => "2l+4, 2l+5",
            Bracket::From2lPlus6 => "2l+6, 2l+7",
            Bracket::From2lPlus8 => "2l+8, 2l+9",
            Bracket::Stable => ">= 2l+10",
        }
    }
}

/// `a / gcd(a, b)`.
pub fn a_over_b(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Err(Error::Domain(format!(
            "a/b needs positive arguments, got a = {a}, b = {b}"
        )));
    }
    Ok(a / gcd(a, b))
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArnoldRow {
    pub l: u64,
    pub bracket: Bracket,
    /// Orders of `H_j` for `j = 2l+1, ..., 2l+5`.
    pub orders: [Order; 5],
}

impl ArnoldRow {
    pub fn first_degree(&self) -> u64 {
        2 * self.l + 1
    }

    /// `(degree, order)` pairs.
    pub fn columns(&self) -> impl Iterator<Item = (u64, Order)> + '_ {
        let start = self.first_degree();
        self.orders
            .iter()
            .enumerate()
            .map(move |(c, &o)| (start + c as u64, o))
    }

    /// The row as a graded group that is complete in degrees `2l+1..=2l+5`
    /// and empty elsewhere.
    pub fn to_graded(&self, k: u64) -> crate::graded::GradedGroup {
        let mut g = crate::graded::GradedGroup::empty(2, self.l, Stage::Finite(k));
        for (degree, order) in self.columns() {
            g.set(degree, order.group(), Status::Complete);
        }
        g.provenance.push("arnold-table".into());
        g
    }
}

/// Row of the table for one bracket.
pub fn row(l: u64, bracket: Bracket) -> Result<ArnoldRow> {
    if l == 0 {
        return Err(Error::Domain("the table is stated for l >= 1".into()));
    }
    use Order::{Cyclic, Infinite};
    let l_plus_1 = l + 1;
    let two = a_over_b(2, l_plus_1)?;
    let half = a_over_b(l + 3, 2)?;
    let trivial = Cyclic(1);
    let orders = match bracket {
        Bracket::From2lPlus2 => [Infinite, trivial, trivial, trivial, trivial],
        Bracket::From2lPlus4 => [Infinite, Cyclic(l + 2), trivial, trivial, trivial],
        Bracket::From2lPlus6 => [Infinite, Cyclic(l + 2), Cyclic(two), Cyclic(half), trivial],
        Bracket::From2lPlus8 => [
            Infinite,
            Cyclic(l + 2),
            Cyclic(two),
            Cyclic(half * two),
            Cyclic(a_over_b(3, l_plus_1)?),
        ],
        Bracket::Stable => [
            Infinite,
            Cyclic(l + 2),
            Cyclic(two),
            Cyclic(half * two),
            Cyclic(a_over_b(6, l_plus_1)?),
        ],
    };
    Ok(ArnoldRow { l, bracket, orders })
}

pub fn table_orders(l: u64, k: u64) -> Result<ArnoldRow> {
    row(l, Bracket::of(l, k)?)
}

/// All five rows for `l`, in bracket order.
pub fn table(l: u64) -> Result<Vec<ArnoldRow>> {
    Bracket::ALL.iter().map(|&b| row(l, b)).collect()
}
