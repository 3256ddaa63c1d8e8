//! The bordered matrix `δ̃`, its X-diagram `(f, g, h)`, the local rules a
//! diagram of a cone point must obey, and the staircase construction of a
//! ray that is tight on a given set of facets.
//!
//! `δ̃` has rows `0..=n` and columns `1..=n+1`. Row `0` and column `n+1` are
//! all `1`, the diagonal `δ̃(i,i)` is `0`, and `δ̃(i,j) = δ(i,j)` above it.
//! Entries below the diagonal are undefined.
//!
//! * `f(k,l)`: the unit cell with corners `(k,l)` and `(k+1,l+1)` is tight,
//!   for the facet cells `k in [0,n-2]`, `l in [2,n]`, `k < l`, `(k,l) != (0,n)`.
//! * `g(i,j)`: `δ̃(i,j) = δ̃(i+1,j)` (vertical edge).
//! * `h(i,j)`: `δ̃(i,j) = δ̃(i,j+1)` (horizontal edge).
//!
//! `g` and `h` are defined wherever both entries are.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cone::{Facet, OrderedPartition};
use crate::metric::DissimilarityMatrix;
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum XDiagramError {
    #[error("{map}({k},{l}) is outside the domain for n = {n}")]
    OutOfDomain { map: Indicator, k: usize, l: usize, n: usize },
    #[error("an X-diagram needs n >= 2, got {0}")]
    TooSmall(usize),
    #[error("no staircase from column 0 to column n avoids every tight cell")]
    InvalidTightSet,
}

/// The partial matrix `δ̃`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorderedMatrix {
    n: usize,
    d: DissimilarityMatrix,
}

impl BorderedMatrix {
    pub fn new(d: &DissimilarityMatrix) -> Self {
        BorderedMatrix { n: d.n(), d: d.clone() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_defined(&self, i: usize, j: usize) -> bool {
        defined(self.n, i, j)
    }

    /// `None` below the diagonal and outside rows `0..=n`, columns `1..=n+1`.
    pub fn get(&self, i: usize, j: usize) -> Option<Rational> {
        if !self.is_defined(i, j) {
            None
        } else if i == 0 || j == self.n + 1 {
            Some(Rational::one())
        } else if i == j {
            Some(Rational::zero())
        } else {
            Some(self.d.get(i, j))
        }
    }
}

fn defined(n: usize, i: usize, j: usize) -> bool {
    (1..=n + 1).contains(&j) && i <= n && (i == 0 || j == n + 1 || i <= j)
}

/// `δ̃` for `d`.
pub fn tilde(d: &DissimilarityMatrix) -> BorderedMatrix {
    BorderedMatrix::new(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Indicator {
    F,
    G,
    H,
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Indicator::F => "f",
            Indicator::G => "g",
            Indicator::H => "h",
        })
    }
}

/// Facet cells in row-major order.
pub fn f_domain(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for k in 0..n.saturating_sub(1) {
        for l in (k + 1).max(2)..=n {
            if !(k == 0 && l == n) {
                out.push((k, l));
            }
        }
    }
    out
}

/// Vertical pairs `(i,j)-(i+1,j)` of defined entries, row-major.
pub fn g_domain(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (1..=n + 1).map(move |j| (i, j)))
        .filter(|&(i, j)| defined(n, i, j) && defined(n, i + 1, j))
        .collect()
}

/// Horizontal pairs `(i,j)-(i,j+1)` of defined entries, row-major.
pub fn h_domain(n: usize) -> Vec<(usize, usize)> {
    (0..=n)
        .flat_map(|i| (1..=n).map(move |j| (i, j)))
        .filter(|&(i, j)| defined(n, i, j) && defined(n, i, j + 1))
        .collect()
}

/// The indicator maps over their full domains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XDiagram {
    n: usize,
    f: BTreeMap<(usize, usize), bool>,
    g: BTreeMap<(usize, usize), bool>,
    h: BTreeMap<(usize, usize), bool>,
}

impl XDiagram {
    /// Positions listed in the `*_ones` sets are `1`, every other domain position is `0`.
    pub fn from_ones(
        n: usize,
        f_ones: &[(usize, usize)],
        g_ones: &[(usize, usize)],
        h_ones: &[(usize, usize)],
    ) -> Result<Self, XDiagramError> {
        if n < 2 {
            return Err(XDiagramError::TooSmall(n));
        }
        let build = |map: Indicator, domain: Vec<(usize, usize)>, ones: &[(usize, usize)]| {
            let mut m: BTreeMap<(usize, usize), bool> =
                domain.into_iter().map(|p| (p, false)).collect();
            for &(k, l) in ones {
                match m.get_mut(&(k, l)) {
                    Some(v) => *v = true,
                    None => return Err(XDiagramError::OutOfDomain { map, k, l, n }),
                }
            }
            Ok(m)
        };
        Ok(XDiagram {
            n,
            f: build(Indicator::F, f_domain(n), f_ones)?,
            g: build(Indicator::G, g_domain(n), g_ones)?,
            h: build(Indicator::H, h_domain(n), h_ones)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn map(&self, which: Indicator) -> &BTreeMap<(usize, usize), bool> {
        match which {
            Indicator::F => &self.f,
            Indicator::G => &self.g,
            Indicator::H => &self.h,
        }
    }

    /// Value at `(k,l)`, `None` outside the domain.
    pub fn value(&self, which: Indicator, k: usize, l: usize) -> Option<bool> {
        self.map(which).get(&(k, l)).copied()
    }

    pub fn f(&self, k: usize, l: usize) -> bool {
        self.f.get(&(k, l)).copied().unwrap_or(false)
    }

    pub fn g(&self, i: usize, j: usize) -> bool {
        self.g.get(&(i, j)).copied().unwrap_or(false)
    }

    pub fn h(&self, i: usize, j: usize) -> bool {
        self.h.get(&(i, j)).copied().unwrap_or(false)
    }

    /// Positions where `which` is `1`, row-major.
    pub fn ones(&self, which: Indicator) -> Vec<(usize, usize)> {
        self.map(which).iter().filter(|(_, v)| **v).map(|(p, _)| *p).collect()
    }

    /// Facets marked tight by `f`.
    pub fn tight_set(&self) -> Vec<Facet> {
        self.ones(Indicator::F)
            .into_iter()
            .map(|(k, l)| Facet::from_cell(k, l, self.n).expect("f lives on facet cells"))
            .collect()
    }
}

/// Evaluates `f`, `g` and `h` for `d`.
pub fn xdiagram_of(d: &DissimilarityMatrix) -> XDiagram {
    let n = d.n();
    let t = tilde(d);
    let at = |i, j| t.get(i, j).expect("domain positions are defined");
    let f = f_domain(n)
        .into_iter()
        .map(|(k, l)| ((k, l), at(k, l) + at(k + 1, l + 1) == at(k + 1, l) + at(k, l + 1)))
        .collect();
    let g = g_domain(n).into_iter().map(|(i, j)| ((i, j), at(i, j) == at(i + 1, j))).collect();
    let h = h_domain(n).into_iter().map(|(i, j)| ((i, j), at(i, j) == at(i, j + 1))).collect();
    XDiagram { n, f, g, h }
}

/// One broken instance of a local rule, with the entries involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleViolation {
    pub rule: u8,
    pub entries: Vec<(Indicator, (usize, usize), bool)>,
}

impl RuleViolation {
    pub fn involves(&self, which: Indicator, at: (usize, usize), value: bool) -> bool {
        self.entries.contains(&(which, at, value))
    }
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(w, (k, l), v)| format!("{w}({k},{l})={}", u8::from(*v)))
            .collect();
        write!(f, "rule {}: {}", self.rule, parts.join(", "))
    }
}

/// Every violation of the four local rules, by rule then cell. An empty list
/// means no violation was found, which is necessary but not sufficient for
/// the diagram to come from a cone point.
pub fn check_rules(x: &XDiagram) -> Vec<RuleViolation> {
    use Indicator::{F, G, H};
    let n = x.n;
    let cells = f_domain(n);
    let mut out = Vec::new();
    let mut push = |rule: u8, entries: Vec<(Indicator, (usize, usize), bool)>| {
        out.push(RuleViolation { rule, entries });
    };

    // rule 1: a tight cell has equal opposite sides
    for &(k, l) in &cells {
        if !x.f(k, l) {
            continue;
        }
        let (left, right) = (x.g(k, l), x.g(k, l + 1));
        if left != right {
            push(1, vec![(F, (k, l), true), (G, (k, l + 1), right), (G, (k, l), left)]);
        }
        let (top, bottom) = (x.h(k, l), x.h(k + 1, l));
        if top != bottom {
            push(1, vec![(F, (k, l), true), (H, (k, l), top), (H, (k + 1, l), bottom)]);
        }
    }

    // rule 2: two parallel unit sides make the cell tight
    for &(k, l) in &cells {
        if x.f(k, l) {
            continue;
        }
        if x.g(k, l) && x.g(k, l + 1) {
            push(2, vec![(G, (k, l), true), (G, (k, l + 1), true), (F, (k, l), false)]);
        }
        if x.h(k, l) && x.h(k + 1, l) {
            push(2, vec![(H, (k, l), true), (H, (k + 1, l), true), (F, (k, l), false)]);
        }
    }

    // rule 3: vertical equalities propagate right, horizontal ones propagate up;
    // comparisons against the border row or column carry no such implication
    for &(i, j) in &cells {
        if j > i && !(i == 0 && j < n) && x.g(i, j) && !x.g(i, j + 1) {
            push(3, vec![(G, (i, j), true), (G, (i, j + 1), false)]);
        }
        let (hi, hj) = (i + 1, j);
        if hj >= hi && !(hj == n && i >= 1) && x.h(hi, hj) && !x.h(i, hj) {
            push(3, vec![(H, (hi, hj), true), (H, (i, hj), false)]);
        }
    }

    // rule 4: three equal sides of a cell force the fourth
    for &(k, l) in &cells {
        let sides = [
            (G, (k, l), x.g(k, l)),
            (H, (k, l), x.h(k, l)),
            (H, (k + 1, l), x.h(k + 1, l)),
            (G, (k, l + 1), x.g(k, l + 1)),
        ];
        if sides.iter().filter(|s| s.2).count() == 3 {
            push(4, sides.to_vec());
        }
    }

    out.sort_by_key(|v| v.rule);
    out
}

/// Steps `a -> b` of the staircase: the end blocks `[1,1]` and `[n,n]` are
/// always available, any other block `[a+1, b]` only when its cell is not tight.
fn step_allowed(x: &XDiagram, a: usize, b: usize) -> bool {
    let n = x.n;
    if (a, b) == (0, n) {
        return false;
    }
    if (a, b) == (0, 1) || (a, b) == (n - 1, n) {
        return true;
    }
    x.value(Indicator::F, a, b) == Some(false)
}

/// A ray `r_τ` that is tight on every facet with `f = 1`.
///
/// The cut points of `τ` form a staircase `0 = c_0 < c_1 < … < c_m = n`
/// with `m >= 2` whose steps avoid tight cells; `r_τ` is then non-tight
/// exactly on the step cells. Among all staircases the lexicographically
/// smallest one is returned. `Ok(None)` means every facet is tight, so the
/// only compatible vector is zero.
pub fn ray_for_tight_set(x: &XDiagram) -> Result<Option<OrderedPartition>, XDiagramError> {
    let n = x.n;
    let mut reach = vec![false; n + 1];
    reach[n] = true;
    for a in (0..n).rev() {
        reach[a] = (a + 1..=n).any(|b| reach[b] && step_allowed(x, a, b));
    }
    if !reach[0] {
        return if x.f.values().all(|&v| v) {
            Ok(None)
        } else {
            Err(XDiagramError::InvalidTightSet)
        };
    }
    let mut cuts = Vec::new();
    let mut at = 0;
    while at != n {
        at = (at + 1..=n)
            .find(|&b| reach[b] && step_allowed(x, at, b))
            .expect("reachability guarantees a next step");
        cuts.push(at);
    }
    cuts.pop();
    Ok(Some(OrderedPartition::from_cuts(n, cuts).expect("staircase has an inner cut")))
}

/// Text drawing: `o` for defined entries, `---` and `|` for `h = 1` and
/// `g = 1`, and `X` or `.` in the middle of each facet cell for `f = 1` or `0`.
pub fn render_ascii(x: &XDiagram) -> String {
    let n = x.n;
    let mut lines = Vec::new();
    for i in 0..=n {
        let mut row = String::new();
        for j in 1..=n + 1 {
            row.push(if defined(n, i, j) { 'o' } else { ' ' });
            if j <= n {
                row.push_str(if x.h(i, j) { "---" } else { "   " });
            }
        }
        lines.push(row.trim_end().to_string());
        if i == n {
            break;
        }
        let mut between = String::new();
        for j in 1..=n + 1 {
            between.push(if x.g(i, j) { '|' } else { ' ' });
            if j <= n {
                let mark = match x.value(Indicator::F, i, j) {
                    Some(true) => 'X',
                    Some(false) => '.',
                    None => ' ',
                };
                between.push(' ');
                between.push(mark);
                between.push(' ');
            }
        }
        lines.push(between.trim_end().to_string());
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}
