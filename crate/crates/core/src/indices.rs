//! Compactness indices for families of CDFs.

use num::{Signed, ToPrimitive, Zero};

use crate::approach::{diagonal_subsequence, Bracket, CompactnessInstance, ExtValue, IndexBrackets};
use crate::cdf::{Cdf, Jump, SupportBound};
use crate::distances::{phi, Gauge};
use crate::error::{Error, Result};
use crate::family::{FamilySpec, SequenceSpec};
use crate::rational::{int, one, zero, Rational};

/// The escape index with the window realising it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EscapeIndex {
    pub value: Rational,
    /// Half-width `M` of a window `[-M, M]` on which the infimum is attained.
    pub window: Rational,
    pub attained_by: String,
}

/// `inf_M sup_F max{F(-M), 1 - F(M)}`.
///
/// The profile is non-increasing in `M` and constant once `M` exceeds every
/// knot of the family and every starting location of its tails, so the
/// infimum is the value there.
pub fn escape_index(family: &FamilySpec) -> Result<EscapeIndex> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let m = family.settling_radius();
    let window = SupportBound::symmetric(m.clone())?;
    for (i, tail) in family.tails.iter().enumerate() {
        if tail.finite_escape_profile(&window) != tail.escape_profile(&window) {
            return Err(Error::HorizonTooShort {
                tail: i,
                horizon: tail.horizon(),
                window: m,
            });
        }
    }
    let outside = |f: &Cdf| f.eval(&window.low).max(one() - f.eval(&window.high));
    let mut value = zero();
    let mut attained_by = String::from("every member");
    for (i, f) in family.explicit.iter().enumerate() {
        let v = outside(f);
        if v > value {
            value = v;
            attained_by = format!("explicit member {i}");
        }
    }
    for (i, t) in family.tails.iter().enumerate() {
        let v = t.escape_profile(&window);
        if v > value {
            value = v;
            attained_by = format!("tail {i} ({})", t.template().name());
        }
    }
    Ok(EscapeIndex {
        value,
        window: m,
        attained_by,
    })
}

pub fn is_tight(family: &FamilySpec) -> Result<bool> {
    Ok(escape_index(family)?.value.is_zero())
}

/// `1, 1/2, ..., 1/depth`.
pub fn default_alpha_grid(depth: usize) -> Vec<Rational> {
    (1..=depth.max(1)).map(|n| one() / int(n as i64)).collect()
}

/// Bracket for the limit operator of `F_n -> F` in the continuity
/// structure.
///
/// The lower end is `max_beta limsup_n phi(F, beta, F_n)` over the grid.
/// The upper end is the largest deviation between `F` and the pointwise
/// limit of the sequence at continuity points of `F`.
pub fn limit_operator(seq: &SequenceSpec, center: &Cdf, alpha_grid: &[Rational]) -> Result<Bracket> {
    if alpha_grid.is_empty() || alpha_grid.iter().any(|a| !a.is_positive()) {
        return Err(Error::EmptyGrid);
    }
    let mut lower = zero();
    for beta in alpha_grid {
        let v = seq.eventual(&Gauge::phi(center.clone(), beta.clone())?)?.limit();
        lower = lower.max(v);
    }
    let upper = seq.pointwise_limit().gap_on_continuity_points(center);
    if lower > upper {
        return Err(Error::Contract(format!("limit bracket inverted: [{lower}, {upper}]")));
    }
    Ok(Bracket { lower, upper })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HellyResult {
    /// Strictly increasing member indices (1-based).
    pub selector: Vec<usize>,
    /// The window completion of the pointwise limit.
    pub limit: Cdf,
    pub lambda_bound: Rational,
    pub truncation: SupportBound,
    /// Limit operator of the sequence at `limit`.
    pub lambda: Bracket,
}

/// Grid points `low, low + h, ...` strictly below `high`.
fn window_grid(window: &SupportBound, step: &Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    let mut x = window.low.clone();
    while x < window.high {
        out.push(x.clone());
        x += step;
    }
    out
}

/// Constructive Helly selection inside `window`.
///
/// On each grid point the members agree with the pointwise limit up to
/// `eps / 2` from some index on; the selector is the diagonal of the
/// successive tails. The returned limit is 0 below the window, 1 from its
/// right end on, and `lambda_bound` is the escape profile of the window.
pub fn helly_select(
    seq: &SequenceSpec,
    window: &SupportBound,
    grid_step: &Rational,
    eps: &Rational,
) -> Result<HellyResult> {
    for (name, v) in [("grid_step", grid_step), ("eps", eps)] {
        if !v.is_positive() {
            return Err(Error::NonPositive { name, value: v.clone() });
        }
    }
    let escape = seq.escape_profile(window);
    let admissible = seq.escape_value() + eps;
    if escape > admissible {
        return Err(Error::WindowTooNarrow {
            low: window.low.clone(),
            high: window.high.clone(),
            escape,
            admissible,
        });
    }

    let horizon = seq.horizon();
    let members = seq.members(horizon);
    let limit_fn = seq.pointwise_limit();
    let tol = eps / int(2);
    let grid = window_grid(window, grid_step);
    let mut settle = Vec::with_capacity(grid.len());
    for x in &grid {
        let target = limit_fn.eval(x);
        let close = |f: &Cdf| (f.eval(x) - &target).abs() <= tol;
        // Smallest n after which every member up to the horizon is close.
        let tail_len = members.iter().rev().take_while(|f| close(f)).count();
        if tail_len == 0 {
            return Err(Error::Unstabilised {
                point: x.clone(),
                horizon,
            });
        }
        settle.push(horizon - tail_len + 1);
    }

    let indices: Vec<usize> = (1..=horizon).collect();
    let selector = if settle.is_empty() {
        vec![1]
    } else {
        diagonal_subsequence(&indices, settle.len(), |level, n| n >= settle[level])?
    };

    let limit = limit_fn.window_completion(window)?;
    let lambda = limit_operator(seq, &limit, &default_alpha_grid(64))?;
    if lambda.upper > escape {
        return Err(Error::Contract(format!(
            "limit operator {} exceeds the window escape {}",
            lambda.upper, escape
        )));
    }
    Ok(HellyResult {
        selector,
        limit,
        lambda_bound: escape,
        truncation: window.clone(),
        lambda,
    })
}

/// Smallest `M = 2^k` such that every component sequence loses at most its
/// own escape value plus `eps` outside `[-M, M]`.
pub fn choose_window(family: &FamilySpec, eps: &Rational) -> Result<Rational> {
    if !eps.is_positive() {
        return Err(Error::NonPositive {
            name: "eps",
            value: eps.clone(),
        });
    }
    let cap = family.settling_radius();
    let sequences = family.sequences();
    let mut m = one();
    loop {
        let window = SupportBound::symmetric(m.clone())?;
        if m >= cap
            || sequences
                .iter()
                .all(|s| s.escape_profile(&window) <= s.escape_value() + eps)
        {
            return Ok(m);
        }
        m *= int(2);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProkhorovBracket {
    pub lower: Rational,
    pub upper: Rational,
    pub escape: EscapeIndex,
    pub window: SupportBound,
    /// One Helly selection per component sequence of the family.
    pub helly: Vec<HellyResult>,
}

/// Two-sided bracket for the sequential compactness index: the escape
/// index from below and Helly selections from above.
pub fn prokhorov_bracket(family: &FamilySpec, eps: &Rational) -> Result<ProkhorovBracket> {
    let escape = escape_index(family)?;
    let m = choose_window(family, eps)?;
    let window = SupportBound::symmetric(m)?;
    let mut helly = Vec::new();
    let mut upper = zero();
    for seq in family.sequences() {
        let h = helly_on_window(&seq, &window, eps)?;
        upper = upper.max(h.lambda_bound.clone());
        helly.push(h);
    }
    let lower = escape.value.clone();
    if lower > upper || upper > &lower + eps {
        return Err(Error::Contract(format!("bracket [{lower}, {upper}] not within {eps}")));
    }
    Ok(ProkhorovBracket {
        lower,
        upper,
        escape,
        window,
        helly,
    })
}

/// Decision at tolerance `eps`: the upper end of the bracket is at most `eps`.
pub fn weak_rsc_flag(family: &FamilySpec, eps: &Rational) -> Result<bool> {
    Ok(prokhorov_bracket(family, eps)?.upper <= *eps)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LindelofWitness {
    pub covers: Vec<Cdf>,
    pub alpha: Rational,
    /// `max_F min_C phi(C, alpha, F)`, strictly below `eps`.
    pub level: Rational,
}

/// Purely atomic approximation: jumps kept, continuous mass cut into
/// `ceil(m / eps)` cells of equal mass, each collapsed onto its median.
/// The uniform distance to `f` is at most `eps / 2`.
pub fn discretize(f: &Cdf, eps: &Rational) -> Result<Cdf> {
    if !eps.is_positive() {
        return Err(Error::NonPositive {
            name: "eps",
            value: eps.clone(),
        });
    }
    let mut jumps: Vec<Jump> = f.jumps().to_vec();
    let mass = f.continuous_mass();
    if mass.is_positive() {
        let cells = (&mass / eps).ceil().to_integer();
        let k = cells.to_i64().expect("cell count fits in i64");
        let cell = &mass / int(k);
        let start = f.support().low;
        for i in 0..k {
            let level = &cell * (int(i) + Rational::new(1.into(), 2.into()));
            let h = f
                .continuous_reach(&start, &level, false)
                .expect("level below the continuous mass");
            jumps.push(Jump {
                at: &start + h,
                mass: cell.clone(),
            });
        }
    }
    Cdf::new(jumps, vec![])
}

/// A finite set of atomic CDFs such that every member of `test_set` lies in
/// the `phi(., eps)`-ball of radius `eps` around one of them.
pub fn lindelof_witness(test_set: &[Cdf], eps: &Rational) -> Result<LindelofWitness> {
    let alpha = eps.clone();
    let mut covers: Vec<Cdf> = Vec::new();
    for f in test_set {
        let c = discretize(f, eps)?;
        if !covers.contains(&c) {
            covers.push(c);
        }
    }
    let mut level = zero();
    for f in test_set {
        let best = covers
            .iter()
            .map(|c| phi(c, &alpha, f))
            .min()
            .expect("one cover per member");
        level = level.max(best);
    }
    if level >= *eps {
        return Err(Error::Contract(format!("cover level {level} not below {eps}")));
    }
    Ok(LindelofWitness { covers, alpha, level })
}

/// The CDF space restricted to a template family.
pub struct CdfInstance<'a> {
    pub family: &'a FamilySpec,
    pub eps: Rational,
    /// Members taken from each tail for the Lindelöf test set.
    pub sample_per_tail: usize,
}

impl CompactnessInstance for CdfInstance<'_> {
    fn index_brackets(&self) -> Result<IndexBrackets> {
        let pb = prokhorov_bracket(self.family, &self.eps)?;
        let lw = lindelof_witness(&self.family.sample_members(self.sample_per_tail), &self.eps)?;
        let rsc = Bracket {
            lower: ExtValue::Finite(pb.lower.clone()),
            upper: ExtValue::Finite(pb.upper.clone()),
        };
        Ok(IndexBrackets {
            // The escape index bounds the covering index from below as well,
            // and the two sequential indices coincide.
            rc: rsc.clone(),
            rsc,
            lindelof: Bracket {
                lower: ExtValue::zero(),
                upper: ExtValue::Finite(lw.level.clone()),
            },
            witnesses: vec![
                format!(
                    "escape window M = {} attained by {}",
                    pb.escape.window, pb.escape.attained_by
                ),
                format!("Helly window [{}, {}]", pb.window.low, pb.window.high),
                format!("{} atomic covers at alpha = {}", lw.covers.len(), lw.alpha),
            ],
        })
    }
}

/// Number of Helly grid points used for a sequence: a quarter of the
/// horizon, between 1 and 16.
pub fn helly_levels(seq: &SequenceSpec) -> usize {
    (seq.horizon() / 4).clamp(1, 16)
}

/// [`helly_select`] with [`helly_levels`] equally spaced grid points.
/// Sequences whose horizon is too short for the diagonal (constant ones)
/// are extended first.
pub fn helly_on_window(seq: &SequenceSpec, window: &SupportBound, eps: &Rational) -> Result<HellyResult> {
    let levels = helly_levels(seq);
    let seq = if seq.horizon() <= levels {
        seq.clone().with_horizon(levels + 1)
    } else {
        seq.clone()
    };
    let width = &window.high - &window.low;
    helly_select(&seq, window, &(width / int(levels as i64)), eps)
}
