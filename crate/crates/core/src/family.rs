//! Finitely presented families and sequences of CDFs.
//!
//! A family is a finite list of explicit CDFs plus finitely many parametric
//! tails. Each tail is an infinite sequence `n -> F_n` (`n >= 1`) drawn from
//! a small set of templates whose limiting behaviour is known in closed
//! form, which is what makes suprema over `n` computable.

use num::Signed;

use crate::cdf::{Cdf, SupportBound};
use crate::distances::{affine_fit, levy, phi, phi_terms, psi, Gauge};
use crate::error::{Error, Result};
use crate::rational::{clamp_unit, int, one, zero, Rational};

/// Locations `t_n` of an escaping tail: strictly increasing and unbounded.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Locations {
    /// `t_n = step * n` with `step > 0`.
    Multiple(Rational),
    /// An explicit strictly increasing prefix `t_1, ..., t_k`, continued
    /// past its end with the last increment (or step 1 for a single entry).
    Explicit(Vec<Rational>),
}

impl Locations {
    pub fn multiple(step: Rational) -> Result<Self> {
        if !step.is_positive() {
            return Err(Error::NonPositive {
                name: "step",
                value: step,
            });
        }
        Ok(Locations::Multiple(step))
    }

    pub fn explicit(prefix: Vec<Rational>) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::LocationsNotIncreasing(0));
        }
        if let Some(i) = prefix.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::LocationsNotIncreasing(i + 1));
        }
        Ok(Locations::Explicit(prefix))
    }

    /// `t_n` for `n >= 1`.
    pub fn at(&self, n: usize) -> Rational {
        assert!(n >= 1, "tail members are indexed from 1");
        match self {
            Locations::Multiple(step) => step * int(n as i64),
            Locations::Explicit(prefix) => {
                if n <= prefix.len() {
                    return prefix[n - 1].clone();
                }
                let k = prefix.len();
                let last = &prefix[k - 1];
                let step = if k >= 2 { last - &prefix[k - 2] } else { one() };
                last + step * int((n - k) as i64)
            }
        }
    }

    /// Smallest `n` with `t_n > threshold`.
    pub fn first_beyond(&self, threshold: &Rational) -> usize {
        match self {
            Locations::Multiple(step) => {
                let q = (threshold / step).floor();
                let n = if q.is_negative() {
                    0
                } else {
                    q.to_integer().try_into().unwrap_or(usize::MAX - 1)
                };
                (n + 1).max(1)
            }
            Locations::Explicit(prefix) => {
                if let Some(i) = prefix.iter().position(|t| t > threshold) {
                    return i + 1;
                }
                let mut n = prefix.len() + 1;
                while self.at(n) <= *threshold {
                    n += 1;
                }
                n
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Template {
    /// `F_n = base`.
    Constant,
    /// `F_n = shift(base, t_n)`: all mass runs off to the right.
    ShiftEscape { locations: Locations },
    /// `F_n = (1 - weight) base + weight shift(base, t_n)`.
    MixtureEscape { weight: Rational, locations: Locations },
    /// `F_n = shift(base, scale / n)` with `scale > 0`: converges weakly to
    /// `base` from the right.
    ShiftConverge { scale: Rational },
}

impl Template {
    pub fn name(&self) -> &'static str {
        match self {
            Template::Constant => "constant",
            Template::ShiftEscape { .. } => "shift-escape",
            Template::MixtureEscape { .. } => "mixture-escape",
            Template::ShiftConverge { .. } => "shift-converge",
        }
    }
}

/// The pointwise limit `L(x) = lim_n F_n(x)` of a tail, a sub-distribution
/// `weight * part`, evaluated either right-continuously or (for tails that
/// approach from the right) as a left limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointwiseLimit {
    pub weight: Rational,
    pub part: Option<Cdf>,
    pub left_continuous: bool,
}

impl PointwiseLimit {
    pub fn eval(&self, x: &Rational) -> Rational {
        match &self.part {
            None => zero(),
            Some(p) if self.left_continuous => &self.weight * p.left_limit(x),
            Some(p) => &self.weight * p.eval(x),
        }
    }

    pub fn right_limit(&self, x: &Rational) -> Rational {
        self.part.as_ref().map_or_else(zero, |p| &self.weight * p.eval(x))
    }

    pub fn left_limit(&self, x: &Rational) -> Rational {
        self.part.as_ref().map_or_else(zero, |p| &self.weight * p.left_limit(x))
    }

    /// Right-continuous completion on a window, as in the Helly limit.
    pub fn window_completion(&self, window: &SupportBound) -> Result<Cdf> {
        Cdf::window_completion(self.part.as_ref(), &self.weight, window)
    }

    /// `sup |F(p) - L(p)|` over the continuity points `p` of `center`.
    pub fn gap_on_continuity_points(&self, center: &Cdf) -> Rational {
        let mut candidates: Vec<Rational> = center.knots().to_vec();
        if let Some(p) = &self.part {
            candidates.extend(p.knots().iter().cloned());
        }
        candidates.sort();
        candidates.dedup();

        // Far left everything vanishes; far right the gap is the lost mass.
        let mut best = (one() - &self.weight).abs();
        for c in &candidates {
            let mut values = vec![
                center.left_limit(c) - self.left_limit(c),
                center.eval(c) - self.right_limit(c),
            ];
            if center.is_continuity_point(c) {
                values.push(center.eval(c) - self.eval(c));
            }
            for v in values {
                let v = v.abs();
                if v > best {
                    best = v;
                }
            }
        }
        best
    }
}

/// Eventual behaviour of `gauge(F_n)` along a tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Eventual {
    /// Constant from some index on.
    Settled(Rational),
    /// `max(0, max_i p_i + q_i t_n)` with `t_n -> 0+`; pairs are `(p_i, q_i)`.
    Affine(Vec<(Rational, Rational)>),
}

impl Eventual {
    pub fn limit(&self) -> Rational {
        match self {
            Eventual::Settled(v) => v.clone(),
            Eventual::Affine(terms) => clamp_unit(terms.iter().map(|(p, _)| p.clone()).max().unwrap_or_else(zero)),
        }
    }

    /// Whether the gauge values are eventually strictly below `radius`.
    pub fn eventually_below(&self, radius: &Rational) -> bool {
        match self {
            Eventual::Settled(v) => v < radius,
            Eventual::Affine(terms) => {
                radius.is_positive()
                    && terms
                        .iter()
                        .all(|(p, q)| p < radius || (p == radius && q.is_negative()))
            }
        }
    }
}

/// An infinite sequence of CDFs given by a template.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParametricTail {
    template: Template,
    base: Cdf,
    horizon: usize,
}

/// Sequences are presented exactly like family tails.
pub type SequenceSpec = ParametricTail;

impl ParametricTail {
    pub fn new(template: Template, base: Cdf, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::NonPositive {
                name: "horizon",
                value: zero(),
            });
        }
        match &template {
            Template::MixtureEscape { weight, .. } if weight.is_negative() || *weight > one() => {
                return Err(Error::WeightOutOfRange(weight.clone()))
            }
            Template::ShiftConverge { scale } if !scale.is_positive() => {
                return Err(Error::TemplateMismatch {
                    template: "shift-converge",
                    reason: format!("scale must be positive, found {scale}"),
                })
            }
            _ => {}
        }
        Ok(ParametricTail {
            template,
            base,
            horizon,
        })
    }

    pub fn constant(base: Cdf) -> Self {
        ParametricTail {
            template: Template::Constant,
            base,
            horizon: 1,
        }
    }

    pub fn template(&self) -> &Template {
        &self.template
    }

    pub fn base(&self) -> &Cdf {
        &self.base
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon.max(1);
        self
    }

    /// Location `t_n`, if the template moves the base.
    pub fn location(&self, n: usize) -> Option<Rational> {
        match &self.template {
            Template::Constant => None,
            Template::ShiftEscape { locations } | Template::MixtureEscape { locations, .. } => Some(locations.at(n)),
            Template::ShiftConverge { scale } => Some(scale / int(n as i64)),
        }
    }

    /// The `n`-th member, `n >= 1`.
    pub fn member(&self, n: usize) -> Cdf {
        match &self.template {
            Template::Constant => self.base.clone(),
            Template::ShiftEscape { locations } => self.base.shift(&locations.at(n)),
            Template::ShiftConverge { scale } => self.base.shift(&(scale / int(n as i64))),
            Template::MixtureEscape { weight, locations } => Cdf::mixture(
                &[one() - weight, weight.clone()],
                &[self.base.clone(), self.base.shift(&locations.at(n))],
            )
            .expect("weight validated in [0, 1]"),
        }
    }

    pub fn members(&self, count: usize) -> Vec<Cdf> {
        (1..=count).map(|n| self.member(n)).collect()
    }

    /// Bound on `|x|` for every knot `x` of the first member.
    pub fn reach(&self) -> Rational {
        self.base.reach() + self.location(1).map_or_else(zero, |t| t.abs())
    }

    pub fn pointwise_limit(&self) -> PointwiseLimit {
        match &self.template {
            Template::Constant => PointwiseLimit {
                weight: one(),
                part: Some(self.base.clone()),
                left_continuous: false,
            },
            Template::ShiftEscape { .. } => PointwiseLimit {
                weight: zero(),
                part: None,
                left_continuous: false,
            },
            Template::MixtureEscape { weight, .. } => PointwiseLimit {
                weight: one() - weight,
                part: if *weight == one() {
                    None
                } else {
                    Some(self.base.clone())
                },
                left_continuous: false,
            },
            Template::ShiftConverge { .. } => PointwiseLimit {
                weight: one(),
                part: Some(self.base.clone()),
                left_continuous: true,
            },
        }
    }

    /// `sup_n max{F_n(low), 1 - F_n(high)}` over all `n >= 1`, exactly.
    pub fn escape_profile(&self, window: &SupportBound) -> Rational {
        let (low, high) = (&window.low, &window.high);
        let b = &self.base;
        let v = match &self.template {
            Template::Constant => b.eval(low).max(one() - b.eval(high)),
            Template::ShiftEscape { .. } => one(),
            Template::MixtureEscape { weight, locations } => {
                let keep = one() - weight;
                let below = &keep * b.eval(low) + weight * b.eval(&(low - locations.at(1)));
                let above = one() - keep * b.eval(high);
                below.max(above)
            }
            Template::ShiftConverge { scale } => {
                // t_n decreases to 0: F_n(low) increases to the left limit,
                // F_n(high) is smallest at n = 1.
                let below = b.left_limit(low);
                let above = one() - b.eval(&(high - scale));
                below.max(above)
            }
        };
        clamp_unit(v)
    }

    /// Same supremum restricted to `n <= horizon`.
    pub fn finite_escape_profile(&self, window: &SupportBound) -> Rational {
        (1..=self.horizon)
            .map(|n| {
                let f = self.member(n);
                f.eval(&window.low).max(one() - f.eval(&window.high))
            })
            .max()
            .unwrap_or_else(zero)
    }

    /// `lim_{M -> inf}` of the escape profile on `[-M, M]`.
    pub fn escape_value(&self) -> Rational {
        match &self.template {
            Template::Constant | Template::ShiftConverge { .. } => zero(),
            Template::ShiftEscape { .. } => one(),
            Template::MixtureEscape { weight, .. } => weight.clone(),
        }
    }

    /// Index from which escaping templates are frozen relative to anything
    /// within `radius` of the origin, up to a horizontal slack of `slack`.
    fn settled_index(&self, radius: &Rational, slack: &Rational) -> usize {
        let threshold = radius + self.base.reach() + slack + one();
        match &self.template {
            Template::ShiftEscape { locations } | Template::MixtureEscape { locations, .. } => {
                locations.first_beyond(&threshold)
            }
            Template::Constant | Template::ShiftConverge { .. } => 1,
        }
    }

    /// Eventual behaviour of `gauge(F_n)` as `n -> inf`.
    pub fn eventual(&self, gauge: &Gauge) -> Result<Eventual> {
        let center = gauge.center();
        match (&self.template, gauge) {
            (Template::ShiftConverge { .. }, Gauge::Phi { alpha, .. }) => {
                let mut fixed: Vec<Rational> = Vec::new();
                for a in center.knots() {
                    fixed.extend([a.clone(), a + alpha, a - alpha]);
                }
                let gap = collision_gap(&fixed, self.base.knots());
                Ok(affine_regime(&gap, |t| phi_terms(center, alpha, &self.base.shift(t))))
            }
            (Template::ShiftConverge { .. }, Gauge::Psi { net, .. }) => {
                let gap = collision_gap(net.points(), self.base.knots());
                Ok(affine_regime(&gap, |t| {
                    let mut terms = vec![zero()];
                    for p in net.points() {
                        let d = center.eval(p) - self.base.eval(&(p - t));
                        terms.push(-d.clone());
                        terms.push(d);
                    }
                    terms
                }))
            }
            (Template::ShiftConverge { .. }, Gauge::Levy { .. }) => Err(Error::Unsupported(
                "Lévy gauge along a converging shift has no affine eventual form".into(),
            )),
            (_, Gauge::Phi { alpha, .. }) => {
                let n = self.settled_index(&center.reach(), alpha);
                Ok(Eventual::Settled(phi(center, alpha, &self.member(n))))
            }
            (_, Gauge::Levy { gamma, .. }) => {
                let n = self.settled_index(&center.reach(), gamma);
                Ok(Eventual::Settled(levy(gamma, center, &self.member(n))))
            }
            (_, Gauge::Psi { net, .. }) => {
                let radius = net.points().iter().map(|p| p.abs()).max().unwrap_or_else(zero);
                let n = self.settled_index(&radius, &zero());
                Ok(Eventual::Settled(psi(center, net, &self.member(n))?))
            }
        }
    }
}

/// Smallest positive `s - b` with `s` fixed and `b` a base knot: below it a
/// right shift of the base by `t` crosses none of the fixed points.
fn collision_gap(fixed: &[Rational], moving: &[Rational]) -> Rational {
    fixed
        .iter()
        .flat_map(|s| moving.iter().map(move |b| s - b))
        .filter(|d| d.is_positive())
        .min()
        .unwrap_or_else(one)
        .min(one())
}

fn affine_regime(gap: &Rational, terms: impl Fn(&Rational) -> Vec<Rational>) -> Eventual {
    let t1 = gap / int(2);
    let t2 = gap / int(4);
    Eventual::Affine(affine_fit(&t1, &terms(&t1), &t2, &terms(&t2)))
}

/// A family `D`: explicit members plus parametric tails.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FamilySpec {
    pub explicit: Vec<Cdf>,
    pub tails: Vec<ParametricTail>,
}

impl FamilySpec {
    pub fn new(explicit: Vec<Cdf>, tails: Vec<ParametricTail>) -> Result<Self> {
        if explicit.is_empty() && tails.is_empty() {
            return Err(Error::EmptyFamily);
        }
        Ok(FamilySpec { explicit, tails })
    }

    pub fn is_empty(&self) -> bool {
        self.explicit.is_empty() && self.tails.is_empty()
    }

    pub fn union(&self, other: &FamilySpec) -> FamilySpec {
        FamilySpec {
            explicit: self.explicit.iter().chain(&other.explicit).cloned().collect(),
            tails: self.tails.iter().chain(&other.tails).cloned().collect(),
        }
    }

    /// Every component as a sequence: explicit members become constant
    /// sequences.
    pub fn sequences(&self) -> Vec<SequenceSpec> {
        self.explicit
            .iter()
            .cloned()
            .map(ParametricTail::constant)
            .chain(self.tails.iter().cloned())
            .collect()
    }

    /// Explicit members followed by the first `per_tail` members of each
    /// tail.
    pub fn sample_members(&self, per_tail: usize) -> Vec<Cdf> {
        let mut out = self.explicit.clone();
        for t in &self.tails {
            out.extend(t.members(per_tail.min(t.horizon())));
        }
        out
    }

    pub fn reach(&self) -> Rational {
        self.explicit
            .iter()
            .map(Cdf::reach)
            .chain(self.tails.iter().map(ParametricTail::reach))
            .max()
            .unwrap_or_else(zero)
    }

    /// `sup_{F in D} max{F(low), 1 - F(high)}`.
    pub fn escape_profile(&self, window: &SupportBound) -> Rational {
        self.explicit
            .iter()
            .map(|f| f.eval(&window.low).max(one() - f.eval(&window.high)))
            .chain(self.tails.iter().map(|t| t.escape_profile(window)))
            .max()
            .unwrap_or_else(zero)
    }

    /// A half-width beyond which the escape profile no longer changes.
    pub fn settling_radius(&self) -> Rational {
        self.reach() + one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn example_tail(weight: Rational) -> ParametricTail {
        ParametricTail::new(
            Template::MixtureEscape {
                weight,
                locations: Locations::multiple(one()).unwrap(),
            },
            Cdf::dirac(zero()),
            128,
        )
        .unwrap()
    }

    #[test]
    fn locations_continue_past_prefix() {
        let l = Locations::explicit(vec![int(1), int(3)]).unwrap();
        assert_eq!(l.at(2), int(3));
        assert_eq!(l.at(4), int(7));
        assert_eq!(l.first_beyond(&int(4)), 3);
        assert_eq!(
            Locations::explicit(vec![int(1), int(1)]),
            Err(Error::LocationsNotIncreasing(1))
        );
        let m = Locations::multiple(int(2)).unwrap();
        assert_eq!(m.at(3), int(6));
        assert_eq!(m.first_beyond(&int(6)), 4);
        assert_eq!(m.first_beyond(&int(-5)), 1);
    }

    #[test]
    fn members_follow_template() {
        let t = example_tail(ratio(3, 10));
        let f = t.member(4);
        assert_eq!(f.eval(&int(3)), ratio(7, 10));
        assert_eq!(f.eval(&int(4)), one());
    }

    #[test]
    fn escape_profiles() {
        let w = SupportBound::symmetric(int(10)).unwrap();
        assert_eq!(example_tail(ratio(3, 10)).escape_profile(&w), ratio(3, 10));
        let shift = ParametricTail::new(
            Template::ShiftEscape {
                locations: Locations::multiple(one()).unwrap(),
            },
            Cdf::dirac(zero()),
            64,
        )
        .unwrap();
        assert_eq!(shift.escape_profile(&w), one());
        let conv = ParametricTail::new(
            Template::ShiftConverge { scale: one() },
            Cdf::uniform(int(-1), int(1)).unwrap(),
            64,
        )
        .unwrap();
        let narrow = SupportBound::symmetric(ratio(1, 2)).unwrap();
        // F_1 = U[0, 2]: 1 - F_1(1/2) = 3/4; F_n(-1/2) tends to 1/4.
        assert_eq!(conv.escape_profile(&narrow), ratio(3, 4));
    }

    #[test]
    fn finite_profile_agrees_when_horizon_suffices() {
        let w = SupportBound::symmetric(int(3)).unwrap();
        let t = example_tail(ratio(1, 4));
        assert_eq!(t.finite_escape_profile(&w), t.escape_profile(&w));
        let short = t.clone().with_horizon(2);
        assert!(short.finite_escape_profile(&w) < t.escape_profile(&w) || short.finite_escape_profile(&w) == zero());
    }

    #[test]
    fn pointwise_limits() {
        let t = example_tail(ratio(3, 10));
        let l = t.pointwise_limit();
        assert_eq!(l.eval(&int(100)), ratio(7, 10));
        let conv = ParametricTail::new(Template::ShiftConverge { scale: one() }, Cdf::dirac(zero()), 8).unwrap();
        let l = conv.pointwise_limit();
        assert_eq!(l.eval(&zero()), zero());
        assert_eq!(l.eval(&ratio(1, 100)), one());
    }

    #[test]
    fn eventual_values() {
        let center = Cdf::dirac(zero());
        let conv = ParametricTail::new(Template::ShiftConverge { scale: one() }, center.clone(), 8).unwrap();
        let g = Gauge::phi(center.clone(), ratio(1, 8)).unwrap();
        let ev = conv.eventual(&g).unwrap();
        assert_eq!(ev.limit(), zero());
        assert!(ev.eventually_below(&ratio(1, 1000)));

        let t = example_tail(ratio(3, 10));
        let ev = t.eventual(&Gauge::phi(center, ratio(1, 2)).unwrap()).unwrap();
        assert_eq!(ev, Eventual::Settled(ratio(3, 10)));
        assert!(!ev.eventually_below(&ratio(3, 10)));
        assert!(ev.eventually_below(&ratio(31, 100)));
    }

    #[test]
    fn gap_on_continuity_points() {
        let g = Cdf::mixture(
            &[ratio(7, 10), ratio(3, 10)],
            &[Cdf::dirac(zero()), Cdf::dirac(int(10))],
        )
        .unwrap();
        let l = example_tail(ratio(3, 10)).pointwise_limit();
        assert_eq!(l.gap_on_continuity_points(&g), ratio(3, 10));
    }

    #[test]
    fn rejects_bad_templates() {
        assert!(matches!(
            ParametricTail::new(
                Template::MixtureEscape {
                    weight: ratio(3, 2),
                    locations: Locations::multiple(one()).unwrap()
                },
                Cdf::dirac(zero()),
                4
            ),
            Err(Error::WeightOutOfRange(_))
        ));
        assert!(ParametricTail::new(Template::Constant, Cdf::dirac(zero()), 0).is_err());
        assert!(Locations::multiple(zero()).is_err());
        assert_eq!(FamilySpec::new(vec![], vec![]), Err(Error::EmptyFamily));
    }
}
