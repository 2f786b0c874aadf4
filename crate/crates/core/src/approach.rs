//! Spaces presented by countable local gauge bases.
//!
//! A point `x` carries a list of basis gauges `phi_{x,0}, phi_{x,1}, ...`,
//! each vanishing at `x`. Sequences are presented by their eventual
//! behaviour so that "eventually inside a ball" is decidable.

use std::fmt;

use num::Signed;

use crate::cdf::Cdf;
use crate::distances::Gauge;
use crate::error::{Error, Result};
use crate::family::SequenceSpec;
use crate::rational::{int, one, zero, Rational};

/// A value in `[0, inf]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtValue {
    Finite(Rational),
    Infinite,
}

impl ExtValue {
    pub fn zero() -> Self {
        ExtValue::Finite(zero())
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtValue::Finite(v) => Some(v),
            ExtValue::Infinite => None,
        }
    }

    pub fn lt(&self, radius: &Rational) -> bool {
        matches!(self, ExtValue::Finite(v) if v < radius)
    }
}

impl From<Rational> for ExtValue {
    fn from(v: Rational) -> Self {
        ExtValue::Finite(v)
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Finite(v) => write!(f, "{v}"),
            ExtValue::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bracket<T = Rational> {
    pub lower: T,
    pub upper: T,
}

impl<T: Clone> Bracket<T> {
    pub fn exact(v: T) -> Self {
        Bracket {
            lower: v.clone(),
            upper: v,
        }
    }
}

pub trait ApproachSpace {
    type Point: Clone;
    type Gauge: Clone;
    type Sequence;

    /// The `index`-th basis gauge at `center`, if the basis is that long.
    fn basis_gauge(&self, center: &Self::Point, index: usize) -> Option<Self::Gauge>;

    fn gauge_value(&self, gauge: &Self::Gauge, y: &Self::Point) -> ExtValue;

    /// `limsup_n gauge(x_n)`.
    fn limsup(&self, seq: &Self::Sequence, gauge: &Self::Gauge) -> Result<ExtValue>;

    /// Whether `gauge(x_n) < radius` for all large `n`.
    fn eventually_below(&self, seq: &Self::Sequence, gauge: &Self::Gauge, radius: &Rational) -> Result<bool>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball<P, G> {
    pub center: P,
    pub gauge: G,
    pub radius: Rational,
}

impl<P, G> Ball<P, G> {
    pub fn new(center: P, gauge: G, radius: Rational) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::NonPositive {
                name: "radius",
                value: radius,
            });
        }
        Ok(Ball { center, gauge, radius })
    }
}

pub fn ball_contains<S: ApproachSpace>(space: &S, ball: &Ball<S::Point, S::Gauge>, y: &S::Point) -> bool {
    space.gauge_value(&ball.gauge, y).lt(&ball.radius)
}

/// Whether every ball of radius `eps` around `x`, drawn from the first
/// `basis_prefix` basis gauges, eventually contains the sequence.
pub fn eps_convergent<S: ApproachSpace>(
    space: &S,
    seq: &S::Sequence,
    x: &S::Point,
    eps: &Rational,
    basis_prefix: usize,
) -> Result<bool> {
    if !eps.is_positive() {
        return Err(Error::NonPositive {
            name: "eps",
            value: eps.clone(),
        });
    }
    for k in 0..basis_prefix {
        let Some(g) = space.basis_gauge(x, k) else { break };
        if !space.eventually_below(seq, &g, eps)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericLimit {
    /// `max_k limsup_n phi_{x,k}(x_n)` over the basis prefix.
    pub value: ExtValue,
    /// Largest grid radius without, and smallest with, eps-convergence.
    pub grid: Bracket<ExtValue>,
}

impl GenericLimit {
    pub fn bracket(&self) -> Bracket<ExtValue> {
        Bracket::exact(self.value.clone())
    }
}

/// Limit operator from eps-convergence, bisected over `alpha_grid` and
/// cross-checked against the exact value on the basis prefix.
pub fn limit_operator_generic<S: ApproachSpace>(
    space: &S,
    seq: &S::Sequence,
    x: &S::Point,
    alpha_grid: &[Rational],
    basis_prefix: usize,
) -> Result<GenericLimit> {
    if alpha_grid.is_empty() || alpha_grid.iter().any(|a| !a.is_positive()) {
        return Err(Error::EmptyGrid);
    }
    let mut grid = alpha_grid.to_vec();
    grid.sort();
    grid.dedup();

    // eps-convergence is monotone in eps, so the convergent radii form a
    // suffix of the sorted grid.
    let mut lo = 0;
    let mut hi = grid.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if eps_convergent(space, seq, x, &grid[mid], basis_prefix)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let grid_lower = if lo == 0 {
        ExtValue::zero()
    } else {
        ExtValue::Finite(grid[lo - 1].clone())
    };
    let grid_upper = grid.get(lo).cloned().map_or(ExtValue::Infinite, ExtValue::Finite);

    let mut value = ExtValue::zero();
    for k in 0..basis_prefix {
        let Some(g) = space.basis_gauge(x, k) else { break };
        value = value.max(space.limsup(seq, &g)?);
    }
    if value < grid_lower || value > grid_upper {
        return Err(Error::Contract(format!(
            "limit value {value} outside its grid bracket [{grid_lower}, {grid_upper}]"
        )));
    }
    Ok(GenericLimit {
        value,
        grid: Bracket {
            lower: grid_lower,
            upper: grid_upper,
        },
    })
}

/// Diagonal extraction: refine `initial` once per level through `keep`,
/// taking from each refinement the first index beyond the previous pick.
pub fn diagonal_subsequence(
    initial: &[usize],
    levels: usize,
    keep: impl Fn(usize, usize) -> bool,
) -> Result<Vec<usize>> {
    let mut current = initial.to_vec();
    let mut picks: Vec<usize> = Vec::with_capacity(levels);
    for level in 0..levels {
        current.retain(|&n| keep(level, n));
        let next = current
            .iter()
            .copied()
            .find(|&n| picks.last().is_none_or(|&p| n > p))
            .ok_or(Error::DiagonalExhausted(level))?;
        picks.push(next);
    }
    Ok(picks)
}

/// A sequence in a finite space: `prefix` followed by `cycle` repeated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventuallyPeriodic {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl EventuallyPeriodic {
    pub fn constant(x: usize) -> Self {
        EventuallyPeriodic {
            prefix: vec![],
            cycle: vec![x],
        }
    }

    pub fn at(&self, n: usize) -> usize {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.cycle[(n - self.prefix.len()) % self.cycle.len()]
        }
    }
}

/// A finite space with explicit gauge tables: `gauges[x][k][y]` is the
/// value of the `k`-th basis gauge at `x` on `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSpace {
    gauges: Vec<Vec<Vec<ExtValue>>>,
}

impl FiniteSpace {
    pub fn new(gauges: Vec<Vec<Vec<ExtValue>>>) -> Result<Self> {
        let n = gauges.len();
        if n == 0 {
            return Err(Error::InvalidSpace("no points".into()));
        }
        for (x, basis) in gauges.iter().enumerate() {
            if basis.is_empty() {
                return Err(Error::InvalidSpace(format!("point {x} has an empty basis")));
            }
            for (k, g) in basis.iter().enumerate() {
                if g.len() != n {
                    return Err(Error::InvalidSpace(format!("gauge {k} at {x} has {} values", g.len())));
                }
                if g[x] != ExtValue::zero() {
                    return Err(Error::InvalidSpace(format!(
                        "gauge {k} does not vanish at its center {x}"
                    )));
                }
                if g.iter().any(|v| v.finite().is_some_and(|v| v.is_negative())) {
                    return Err(Error::InvalidSpace(format!("gauge {k} at {x} takes a negative value")));
                }
            }
        }
        Ok(FiniteSpace { gauges })
    }

    /// One gauge per point: `d(x, .)`.
    pub fn metric(d: Vec<Vec<Rational>>) -> Result<Self> {
        Self::new(
            d.into_iter()
                .map(|row| vec![row.into_iter().map(ExtValue::Finite).collect()])
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.gauges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gauges.is_empty()
    }

    pub fn basis_len(&self, x: usize) -> usize {
        self.gauges[x].len()
    }

    fn value(&self, x: usize, k: usize, y: usize) -> &ExtValue {
        &self.gauges[x][k][y]
    }

    fn check_sequence(&self, seq: &EventuallyPeriodic) -> Result<()> {
        if seq.cycle.is_empty() {
            return Err(Error::InvalidSpace("sequence has an empty cycle".into()));
        }
        match seq.prefix.iter().chain(&seq.cycle).find(|&&p| p >= self.len()) {
            Some(p) => Err(Error::InvalidSpace(format!("sequence visits unknown point {p}"))),
            None => Ok(()),
        }
    }
}

impl ApproachSpace for FiniteSpace {
    type Point = usize;
    /// `(center, index)`.
    type Gauge = (usize, usize);
    type Sequence = EventuallyPeriodic;

    fn basis_gauge(&self, center: &usize, index: usize) -> Option<(usize, usize)> {
        (index < self.basis_len(*center)).then_some((*center, index))
    }

    fn gauge_value(&self, gauge: &(usize, usize), y: &usize) -> ExtValue {
        self.value(gauge.0, gauge.1, *y).clone()
    }

    fn limsup(&self, seq: &EventuallyPeriodic, gauge: &(usize, usize)) -> Result<ExtValue> {
        self.check_sequence(seq)?;
        Ok(seq
            .cycle
            .iter()
            .map(|y| self.gauge_value(gauge, y))
            .max()
            .expect("non-empty cycle"))
    }

    fn eventually_below(&self, seq: &EventuallyPeriodic, gauge: &(usize, usize), radius: &Rational) -> Result<bool> {
        self.check_sequence(seq)?;
        Ok(seq.cycle.iter().all(|y| self.gauge_value(gauge, y).lt(radius)))
    }
}

/// Exact indices of a subset of a finite space, with cover witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceIndices {
    pub chi_rsc: ExtValue,
    pub chi_rc: ExtValue,
    pub chi_l: ExtValue,
    /// For each point of the subset, the center chosen under the worst
    /// selection for `chi_rc`.
    pub rc_cover: Vec<usize>,
    /// The same for the whole space and `chi_l`.
    pub l_cover: Vec<usize>,
}

const MAX_SELECTIONS: u128 = 1 << 20;

/// `max_{a in A} min_x phi_x(a)` for one gauge selection, with the centers
/// realising each inner minimum.
fn cover_radius(space: &FiniteSpace, selection: &[usize], subset: &[usize]) -> (ExtValue, Vec<usize>) {
    let mut worst = ExtValue::zero();
    let mut centers = Vec::with_capacity(subset.len());
    for &a in subset {
        let (x, v) = (0..space.len())
            .map(|x| (x, space.value(x, selection[x], a).clone()))
            .min_by(|l, r| l.1.cmp(&r.1))
            .expect("non-empty space");
        centers.push(x);
        worst = worst.max(v);
    }
    (worst, centers)
}

/// Calls `visit` on every gauge selection, one basis index per point.
fn for_each_selection(space: &FiniteSpace, mut visit: impl FnMut(&[usize])) {
    let mut selection = vec![0usize; space.len()];
    loop {
        visit(&selection);
        // Odometer over the product of the basis lists.
        let mut i = 0;
        while i < selection.len() {
            selection[i] += 1;
            if selection[i] < space.basis_len(i) {
                break;
            }
            selection[i] = 0;
            i += 1;
        }
        if i == selection.len() {
            return;
        }
    }
}

/// Relative sequential compactness, relative compactness and Lindelöf
/// indices by exhaustive enumeration, cross-checked on `eps_grid`.
pub fn indices_bruteforce(space: &FiniteSpace, subset: &[usize], eps_grid: &[Rational]) -> Result<BruteForceIndices> {
    if let Some(a) = subset.iter().find(|&&a| a >= space.len()) {
        return Err(Error::InvalidSpace(format!("subset contains unknown point {a}")));
    }
    let selections: u128 = (0..space.len()).map(|x| space.basis_len(x) as u128).product();
    if selections > MAX_SELECTIONS {
        return Err(Error::EnumerationTooLarge(selections));
    }

    // A sequence in a finite set has a constant subsequence; a constant
    // sequence at `a` converges to `x` at level `max_k phi_{x,k}(a)`.
    let settle = |a: usize| {
        (0..space.len())
            .map(|x| {
                (0..space.basis_len(x))
                    .map(|k| space.value(x, k, a).clone())
                    .max()
                    .expect("non-empty basis")
            })
            .min()
            .expect("non-empty space")
    };
    let chi_rsc = subset.iter().map(|&a| settle(a)).max().unwrap_or_else(ExtValue::zero);
    let everything: Vec<usize> = (0..space.len()).collect();
    let mut rc: Option<(ExtValue, Vec<usize>)> = None;
    let mut l: Option<(ExtValue, Vec<usize>)> = None;
    // rc_fails[i]: some selection admits no radius-eps_grid[i] cover of A.
    let mut rc_fails = vec![false; eps_grid.len()];
    for_each_selection(space, |sel| {
        for (fails, alpha) in rc_fails.iter_mut().zip(eps_grid) {
            let covered = subset
                .iter()
                .all(|&a| (0..space.len()).any(|x| space.value(x, sel[x], a).lt(alpha)));
            *fails |= !covered;
        }
        for (best, set) in [(&mut rc, subset), (&mut l, &everything[..])] {
            let candidate = cover_radius(space, sel, set);
            if best.as_ref().is_none_or(|b| candidate.0 > b.0) {
                *best = Some(candidate);
            }
        }
    });
    let (chi_rc, rc_cover) = rc.expect("at least one selection");
    let (chi_l, l_cover) = l.expect("at least one selection");

    for (alpha, fails) in eps_grid.iter().zip(&rc_fails) {
        let rsc_holds = subset.iter().all(|&a| settle(a).lt(alpha));
        if rsc_holds != chi_rsc.lt(alpha) {
            return Err(Error::Contract(format!(
                "sequential compactness at {alpha} disagrees with index"
            )));
        }
        if !fails != chi_rc.lt(alpha) {
            return Err(Error::Contract(format!("ball covers at {alpha} disagree with index")));
        }
    }
    Ok(BruteForceIndices {
        chi_rsc,
        chi_rc,
        chi_l,
        rc_cover,
        l_cover,
    })
}

/// The CDF space with basis `phi_{F, 1/(k+1)}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CdfSpace;

impl ApproachSpace for CdfSpace {
    type Point = Cdf;
    type Gauge = Gauge;
    type Sequence = SequenceSpec;

    fn basis_gauge(&self, center: &Cdf, index: usize) -> Option<Gauge> {
        Gauge::phi(center.clone(), one() / int(index as i64 + 1)).ok()
    }

    fn gauge_value(&self, gauge: &Gauge, y: &Cdf) -> ExtValue {
        ExtValue::Finite(gauge.eval(y))
    }

    fn limsup(&self, seq: &SequenceSpec, gauge: &Gauge) -> Result<ExtValue> {
        Ok(ExtValue::Finite(seq.eventual(gauge)?.limit()))
    }

    fn eventually_below(&self, seq: &SequenceSpec, gauge: &Gauge, radius: &Rational) -> Result<bool> {
        Ok(seq.eventual(gauge)?.eventually_below(radius))
    }
}

/// Certified brackets for the three indices of one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexBrackets {
    pub rsc: Bracket<ExtValue>,
    pub rc: Bracket<ExtValue>,
    pub lindelof: Bracket<ExtValue>,
    pub witnesses: Vec<String>,
}

pub trait CompactnessInstance {
    fn index_brackets(&self) -> Result<IndexBrackets>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainReport {
    pub brackets: IndexBrackets,
    /// `chi_rsc <= chi_rc`, checked as `rsc.lower <= rc.upper`.
    pub lower_chain: bool,
    /// `chi_rc <= chi_rsc + chi_L`, checked as
    /// `rc.lower <= rsc.upper + lindelof.upper`.
    pub upper_chain: bool,
}

fn ext_add(a: &ExtValue, b: &ExtValue) -> ExtValue {
    match (a, b) {
        (ExtValue::Finite(x), ExtValue::Finite(y)) => ExtValue::Finite(x + y),
        _ => ExtValue::Infinite,
    }
}

/// Checks `chi_rsc(A) <= chi_rc(A) <= chi_rsc(A) + chi_L(X)` bracket-wise.
/// A violation is reported as an error.
pub fn theorem22_check(instance: &impl CompactnessInstance) -> Result<ChainReport> {
    let b = instance.index_brackets()?;
    let lower_chain = b.rsc.lower <= b.rc.upper;
    let upper_chain = b.rc.lower <= ext_add(&b.rsc.upper, &b.lindelof.upper);
    if !lower_chain || !upper_chain {
        return Err(Error::Contract(format!(
            "index chain fails: rsc [{}, {}], rc [{}, {}], L [{}, {}]",
            b.rsc.lower, b.rsc.upper, b.rc.lower, b.rc.upper, b.lindelof.lower, b.lindelof.upper
        )));
    }
    Ok(ChainReport {
        brackets: b,
        lower_chain,
        upper_chain,
    })
}

pub struct FiniteInstance<'a> {
    pub space: &'a FiniteSpace,
    pub subset: &'a [usize],
    pub eps_grid: &'a [Rational],
}

impl CompactnessInstance for FiniteInstance<'_> {
    fn index_brackets(&self) -> Result<IndexBrackets> {
        let idx = indices_bruteforce(self.space, self.subset, self.eps_grid)?;
        Ok(IndexBrackets {
            rsc: Bracket::exact(idx.chi_rsc),
            rc: Bracket::exact(idx.chi_rc),
            lindelof: Bracket::exact(idx.chi_l),
            witnesses: vec![
                format!("rc cover centers {:?}", idx.rc_cover),
                format!("L cover centers {:?}", idx.l_cover),
            ],
        })
    }
}
