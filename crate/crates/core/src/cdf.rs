//! Exact cumulative distribution functions with rational coordinates.
//!
//! A [`Cdf`] is a finite sum of point masses ("jumps") and uniform-density
//! pieces ("segments"). Every value it produces is an exact rational, so the
//! suprema computed elsewhere in the crate are exact as well.
//!
//! The representation is canonical: jumps are sorted with distinct
//! locations, segments are disjoint, sorted, and adjacent segments of equal
//! density are merged. Two CDFs that evaluate identically therefore compare
//! equal with `==`.

use std::fmt;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{one, zero, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Jump {
    pub at: Rational,
    pub mass: Rational,
}

/// Mass spread uniformly over `[left, right]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub left: Rational,
    pub right: Rational,
    pub mass: Rational,
}

impl Segment {
    pub fn density(&self) -> Rational {
        &self.mass / (&self.right - &self.left)
    }

    /// Mass of this segment lying in `(-inf, x]`.
    fn mass_up_to(&self, x: &Rational) -> Rational {
        if *x <= self.left {
            zero()
        } else if *x >= self.right {
            self.mass.clone()
        } else {
            &self.mass * (x - &self.left) / (&self.right - &self.left)
        }
    }
}

/// The interval outside of which a CDF is flat: `F(x) = 0` for `x < low`
/// and `F(x) = 1` for `x >= high`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportBound {
    pub low: Rational,
    pub high: Rational,
}

impl SupportBound {
    pub fn new(low: Rational, high: Rational) -> Result<Self> {
        if low > high {
            return Err(Error::EmptyInterval(low, high));
        }
        Ok(SupportBound { low, high })
    }

    /// The symmetric window `[-m, m]`.
    pub fn symmetric(m: Rational) -> Result<Self> {
        SupportBound::new(-m.clone(), m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cdf {
    jumps: Vec<Jump>,
    segments: Vec<Segment>,
    // Evaluation table: sorted knots with F(k) and F(k-) at each knot.
    // Between consecutive knots F is affine.
    knots: Vec<Rational>,
    at: Vec<Rational>,
    before: Vec<Rational>,
}

impl Cdf {
    /// Build a CDF from raw jumps `(location, mass)` and segments
    /// `(left, right, mass)`. Overlapping segments are split and their
    /// densities added; zero masses are dropped.
    pub fn from_parts(
        jumps: impl IntoIterator<Item = (Rational, Rational)>,
        segments: impl IntoIterator<Item = (Rational, Rational, Rational)>,
    ) -> Result<Self> {
        let jumps = jumps.into_iter().map(|(at, mass)| Jump { at, mass }).collect();
        let segments = segments
            .into_iter()
            .map(|(left, right, mass)| Segment { left, right, mass })
            .collect();
        Cdf::new(jumps, segments)
    }

    pub fn new(mut jumps: Vec<Jump>, segments: Vec<Segment>) -> Result<Self> {
        for m in jumps.iter().map(|j| &j.mass).chain(segments.iter().map(|s| &s.mass)) {
            if m.is_negative() {
                return Err(Error::NegativeMass(m.clone()));
            }
        }
        for s in &segments {
            if s.left >= s.right {
                return Err(Error::EmptyInterval(s.left.clone(), s.right.clone()));
            }
        }

        jumps.retain(|j| !j.mass.is_zero());
        jumps.sort_by(|a, b| a.at.cmp(&b.at));
        let mut merged: Vec<Jump> = Vec::with_capacity(jumps.len());
        for j in jumps {
            match merged.last_mut() {
                Some(last) if last.at == j.at => last.mass += j.mass,
                _ => merged.push(j),
            }
        }

        let segments = elementary_segments(segments);

        let total: Rational = merged
            .iter()
            .map(|j| j.mass.clone())
            .chain(segments.iter().map(|s| s.mass.clone()))
            .sum();
        if total != one() {
            return Err(Error::MassNotOne(total));
        }

        let mut knots: Vec<Rational> = merged
            .iter()
            .map(|j| j.at.clone())
            .chain(segments.iter().flat_map(|s| [s.left.clone(), s.right.clone()]))
            .collect();
        knots.sort();
        knots.dedup();

        let raw = |x: &Rational, inclusive: bool| -> Rational {
            let discrete: Rational = merged
                .iter()
                .filter(|j| if inclusive { j.at <= *x } else { j.at < *x })
                .map(|j| j.mass.clone())
                .sum();
            let continuous: Rational = segments.iter().map(|s| s.mass_up_to(x)).sum();
            discrete + continuous
        };
        let at = knots.iter().map(|k| raw(k, true)).collect();
        let before = knots.iter().map(|k| raw(k, false)).collect();

        Ok(Cdf {
            jumps: merged,
            segments,
            knots,
            at,
            before,
        })
    }

    /// Point mass at `a`.
    pub fn dirac(a: Rational) -> Self {
        Cdf::new(vec![Jump { at: a, mass: one() }], vec![]).expect("unit point mass is valid")
    }

    /// Uniform distribution on `[a, b]`.
    pub fn uniform(a: Rational, b: Rational) -> Result<Self> {
        if a >= b {
            return Err(Error::EmptyInterval(a, b));
        }
        Cdf::new(
            vec![],
            vec![Segment {
                left: a,
                right: b,
                mass: one(),
            }],
        )
    }

    /// Convex combination `sum_i weights[i] * parts[i]`. Weights must be
    /// non-negative and sum to exactly 1; zero weights are dropped.
    pub fn mixture(weights: &[Rational], parts: &[Cdf]) -> Result<Self> {
        if weights.len() != parts.len() || weights.is_empty() {
            return Err(Error::MixtureArity {
                weights: weights.len(),
                parts: parts.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::NegativeMass(w.clone()));
        }
        let sum: Rational = weights.iter().cloned().sum();
        if sum != one() {
            return Err(Error::MassNotOne(sum));
        }
        let mut jumps = Vec::new();
        let mut segments = Vec::new();
        for (w, part) in weights.iter().zip(parts).filter(|(w, _)| !w.is_zero()) {
            jumps.extend(part.jumps.iter().map(|j| Jump {
                at: j.at.clone(),
                mass: &j.mass * w,
            }));
            segments.extend(part.segments.iter().map(|s| Segment {
                left: s.left.clone(),
                right: s.right.clone(),
                mass: &s.mass * w,
            }));
        }
        Cdf::new(jumps, segments)
    }

    /// Translation: the result evaluates to `F(x - t)`.
    pub fn shift(&self, t: &Rational) -> Self {
        if t.is_zero() {
            return self.clone();
        }
        Cdf {
            jumps: self
                .jumps
                .iter()
                .map(|j| Jump {
                    at: &j.at + t,
                    mass: j.mass.clone(),
                })
                .collect(),
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    left: &s.left + t,
                    right: &s.right + t,
                    mass: s.mass.clone(),
                })
                .collect(),
            knots: self.knots.iter().map(|k| k + t).collect(),
            at: self.at.clone(),
            before: self.before.clone(),
        }
    }

    /// Convolution `F * G = int F(. - y) dG(y)`.
    ///
    /// Supported exactly when at least one factor is purely discrete; two
    /// continuous parts would produce piecewise-quadratic CDFs, which this
    /// representation does not hold.
    pub fn convolve(&self, other: &Cdf) -> Result<Self> {
        if !self.segments.is_empty() && !other.segments.is_empty() {
            return Err(Error::UnsupportedConvolution);
        }
        let mut jumps = Vec::new();
        let mut segments = Vec::new();
        for a in &self.jumps {
            for b in &other.jumps {
                jumps.push(Jump {
                    at: &a.at + &b.at,
                    mass: &a.mass * &b.mass,
                });
            }
        }
        for (discrete, continuous) in [(self, other), (other, self)] {
            for j in &discrete.jumps {
                for s in &continuous.segments {
                    segments.push(Segment {
                        left: &s.left + &j.at,
                        right: &s.right + &j.at,
                        mass: &s.mass * &j.mass,
                    });
                }
            }
        }
        Cdf::new(jumps, segments)
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Sorted, distinct locations where `F` is not affine: jump locations
    /// and segment endpoints.
    pub fn knots(&self) -> &[Rational] {
        &self.knots
    }

    pub fn support(&self) -> SupportBound {
        SupportBound {
            low: self.knots[0].clone(),
            high: self.knots[self.knots.len() - 1].clone(),
        }
    }

    /// Largest absolute value of any knot.
    pub fn reach(&self) -> Rational {
        self.knots.iter().map(|k| k.abs()).max().unwrap_or_else(zero)
    }

    pub fn is_discrete(&self) -> bool {
        self.segments.is_empty()
    }

    /// Member of the continuous class: no jumps.
    pub fn is_continuous(&self) -> bool {
        self.jumps.is_empty()
    }

    pub fn max_density(&self) -> Rational {
        self.segments.iter().map(Segment::density).max().unwrap_or_else(zero)
    }

    pub fn continuous_mass(&self) -> Rational {
        self.segments.iter().map(|s| s.mass.clone()).sum()
    }

    /// `F(x)`, right-continuous.
    pub fn eval(&self, x: &Rational) -> Rational {
        let idx = self.knots.partition_point(|k| k <= x);
        if idx == 0 {
            return zero();
        }
        let i = idx - 1;
        if self.knots[i] == *x || i + 1 == self.knots.len() {
            return self.at[i].clone();
        }
        self.interpolate(i, x)
    }

    /// `lim_{y -> x-} F(y)`.
    pub fn left_limit(&self, x: &Rational) -> Rational {
        let idx = self.knots.partition_point(|k| k < x);
        if idx == 0 {
            return zero();
        }
        let i = idx - 1;
        if i + 1 == self.knots.len() {
            return self.at[i].clone();
        }
        if self.knots[i + 1] == *x {
            return self.before[i + 1].clone();
        }
        self.interpolate(i, x)
    }

    fn interpolate(&self, i: usize, x: &Rational) -> Rational {
        let (k0, k1) = (&self.knots[i], &self.knots[i + 1]);
        let (v0, v1) = (&self.at[i], &self.before[i + 1]);
        v0 + (v1 - v0) * (x - k0) / (k1 - k0)
    }

    pub fn is_continuity_point(&self, x: &Rational) -> bool {
        self.jumps.binary_search_by(|j| j.at.cmp(x)).is_err()
    }

    /// Mass of the continuous part inside `(lo, hi]`.
    pub fn continuous_mass_between(&self, lo: &Rational, hi: &Rational) -> Rational {
        if hi <= lo {
            return zero();
        }
        self.segments.iter().map(|s| s.mass_up_to(hi) - s.mass_up_to(lo)).sum()
    }

    /// Smallest `h > 0` such that the continuous part puts mass `level`
    /// into `(x, x + h]` (or into `[x - h, x)` when `leftward`), or `None`
    /// if the continuous mass on that side never reaches `level`.
    pub fn continuous_reach(&self, x: &Rational, level: &Rational, leftward: bool) -> Option<Rational> {
        let mut acc = zero();
        let pieces: Box<dyn Iterator<Item = &Segment>> = if leftward {
            Box::new(self.segments.iter().rev())
        } else {
            Box::new(self.segments.iter())
        };
        for s in pieces {
            // Portion of the segment on the requested side of x, as a
            // distance interval [near, far] from x.
            let (near, far) = if leftward {
                if s.left >= *x {
                    continue;
                }
                let near = if s.right > *x { zero() } else { x - &s.right };
                (near, x - &s.left)
            } else {
                if s.right <= *x {
                    continue;
                }
                let near = if s.left < *x { zero() } else { &s.left - x };
                (near, &s.right - x)
            };
            let density = s.density();
            let available = &density * (&far - &near);
            if &acc + &available >= *level {
                return Some(near + (level - &acc) / density);
            }
            acc += available;
        }
        None
    }

    /// `inf { x : F(x) >= level }` (or `> level` when `strict`). Returns
    /// `None` when the set is empty, i.e. `level >= 1` in the strict case.
    pub fn first_reaching(&self, level: &Rational, strict: bool) -> Option<Rational> {
        let hits = |v: &Rational| if strict { v > level } else { v >= level };
        if hits(&zero()) {
            return None;
        }
        let mut prev: Option<(Rational, Rational)> = None;
        for (i, k) in self.knots.iter().enumerate() {
            if let Some((pk, pv)) = &prev {
                let end = &self.before[i];
                if hits(end) {
                    // Affine on (pk, k) from pv to end; pv misses the level.
                    return Some(pk + (level - pv) * (k - pk) / (end - pv));
                }
            }
            if hits(&self.at[i]) {
                return Some(k.clone());
            }
            prev = Some((k.clone(), self.at[i].clone()));
        }
        None
    }

    /// The proof-style window completion of a sub-distribution: given
    /// `weight * part` (total mass `weight <= 1`), keep what lies strictly
    /// inside `(low, high)`, pile the mass at or below `low` onto `low`, and
    /// put everything missing onto `high`. The result is 0 below `low` and
    /// 1 from `high` on.
    pub fn window_completion(part: Option<&Cdf>, weight: &Rational, window: &SupportBound) -> Result<Self> {
        let (low, high) = (&window.low, &window.high);
        if low >= high {
            return Err(Error::EmptyInterval(low.clone(), high.clone()));
        }
        let mut jumps = Vec::new();
        let mut segments = Vec::new();
        let mut inside_top = zero();
        if let Some(part) = part {
            let at_low = weight * part.eval(low);
            inside_top = weight * part.left_limit(high);
            jumps.push(Jump {
                at: low.clone(),
                mass: at_low,
            });
            jumps.extend(part.jumps.iter().filter(|j| j.at > *low && j.at < *high).map(|j| Jump {
                at: j.at.clone(),
                mass: &j.mass * weight,
            }));
            for s in &part.segments {
                let left = (&s.left).max(low).clone();
                let right = (&s.right).min(high).clone();
                if left < right {
                    segments.push(Segment {
                        mass: &s.density() * (&right - &left) * weight,
                        left,
                        right,
                    });
                }
            }
        }
        jumps.push(Jump {
            at: high.clone(),
            mass: one() - inside_top,
        });
        Cdf::new(jumps, segments)
    }
}

/// Split overlapping segments into disjoint pieces, add densities, drop
/// empty pieces and merge touching pieces of equal density.
fn elementary_segments(segments: Vec<Segment>) -> Vec<Segment> {
    let segments: Vec<Segment> = segments.into_iter().filter(|s| !s.mass.is_zero()).collect();
    if segments.is_empty() {
        return segments;
    }
    let mut points: Vec<Rational> = segments
        .iter()
        .flat_map(|s| [s.left.clone(), s.right.clone()])
        .collect();
    points.sort();
    points.dedup();
    let densities: Vec<Rational> = segments.iter().map(Segment::density).collect();

    let mut out: Vec<(Segment, Rational)> = Vec::new();
    for w in points.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        let density: Rational = segments
            .iter()
            .zip(&densities)
            .filter(|(s, _)| s.left <= *p && s.right >= *q)
            .map(|(_, d)| d.clone())
            .sum();
        if density.is_zero() {
            continue;
        }
        match out.last_mut() {
            Some((last, d)) if last.right == *p && *d == density => {
                last.right = q.clone();
                last.mass = &density * (&last.right - &last.left);
            }
            _ => out.push((
                Segment {
                    left: p.clone(),
                    right: q.clone(),
                    mass: &density * (q - p),
                },
                density,
            )),
        }
    }
    out.into_iter().map(|(s, _)| s).collect()
}

impl fmt::Display for Cdf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.jumps.iter().map(|j| format!("{}·δ({})", j.mass, j.at)).collect();
        parts.extend(
            self.segments
                .iter()
                .map(|s| format!("{}·U[{}, {}]", s.mass, s.left, s.right)),
        );
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn two_atoms() -> Cdf {
        Cdf::mixture(&[ratio(7, 10), ratio(3, 10)], &[Cdf::dirac(int(0)), Cdf::dirac(int(5))]).unwrap()
    }

    #[test]
    fn dirac_evaluation() {
        let d = Cdf::dirac(int(0));
        assert_eq!(d.eval(&int(-1)), zero());
        assert_eq!(d.eval(&int(0)), one());
        assert_eq!(d.left_limit(&int(0)), zero());
        assert_eq!(d.left_limit(&int(1)), one());
    }

    #[test]
    fn mixture_evaluation() {
        let f = two_atoms();
        assert_eq!(f.eval(&int(2)), ratio(7, 10));
        assert_eq!(f.jumps().len(), 2);
        assert_eq!(
            f.jumps()[1],
            Jump {
                at: int(5),
                mass: ratio(3, 10)
            }
        );
    }

    #[test]
    fn uniform_left_limit_interpolates() {
        let u = Cdf::uniform(int(0), int(1)).unwrap();
        assert_eq!(u.left_limit(&ratio(1, 2)), ratio(1, 2));
        assert_eq!(u.eval(&ratio(1, 4)), ratio(1, 4));
        assert_eq!(u.eval(&int(7)), one());
    }

    #[test]
    fn mixture_identity_and_merging() {
        let f = two_atoms();
        assert_eq!(Cdf::mixture(&[one()], std::slice::from_ref(&f)).unwrap(), f);
        let d = Cdf::dirac(int(0));
        let merged = Cdf::mixture(&[ratio(1, 2), ratio(1, 2)], &[d.clone(), d.clone()]).unwrap();
        assert_eq!(merged, d);
    }

    #[test]
    fn mixture_rejects_bad_weights() {
        let d = Cdf::dirac(int(0));
        assert_eq!(
            Cdf::mixture(&[ratio(1, 2), ratio(1, 3)], &[d.clone(), d.clone()]),
            Err(Error::MassNotOne(ratio(5, 6)))
        );
        assert!(matches!(
            Cdf::mixture(&[ratio(3, 2), ratio(-1, 2)], &[d.clone(), d.clone()]),
            Err(Error::NegativeMass(_))
        ));
        assert!(matches!(Cdf::mixture(&[one()], &[]), Err(Error::MixtureArity { .. })));
    }

    #[test]
    fn zero_weights_are_stripped() {
        let d = Cdf::dirac(int(0));
        let m = Cdf::mixture(&[one(), zero()], &[d.clone(), Cdf::dirac(int(9))]).unwrap();
        assert_eq!(m, d);
    }

    #[test]
    fn uniform_rejects_empty_interval() {
        assert!(Cdf::uniform(int(1), int(1)).is_err());
        assert!(Cdf::uniform(int(2), int(1)).is_err());
    }

    #[test]
    fn shift_translates() {
        let f = two_atoms();
        assert_eq!(f.shift(&zero()), f);
        assert_eq!(Cdf::dirac(int(0)).shift(&int(3)), Cdf::dirac(int(3)));
        assert_eq!(
            Cdf::uniform(int(0), int(1)).unwrap().shift(&int(2)),
            Cdf::uniform(int(2), int(3)).unwrap()
        );
    }

    #[test]
    fn overlapping_segments_are_split() {
        let a = Cdf::uniform(int(0), int(2)).unwrap();
        let b = Cdf::uniform(int(1), int(3)).unwrap();
        let m = Cdf::mixture(&[ratio(1, 2), ratio(1, 2)], &[a, b]).unwrap();
        assert_eq!(m.segments().len(), 3);
        assert_eq!(m.eval(&int(1)), ratio(1, 4));
        assert_eq!(m.eval(&int(2)), ratio(3, 4));
        // Touching equal-density pieces merge back into one.
        let c = Cdf::uniform(int(0), int(1)).unwrap();
        let d = Cdf::uniform(int(1), int(2)).unwrap();
        let joined = Cdf::mixture(&[ratio(1, 2), ratio(1, 2)], &[c, d]).unwrap();
        assert_eq!(joined, Cdf::uniform(int(0), int(2)).unwrap());
    }

    #[test]
    fn convolution_cases() {
        let a = Cdf::dirac(int(1));
        let b = Cdf::dirac(ratio(1, 2));
        assert_eq!(a.convolve(&b).unwrap(), Cdf::dirac(ratio(3, 2)));
        let f = two_atoms();
        assert_eq!(Cdf::dirac(int(0)).convolve(&f).unwrap(), f);
        let half = Cdf::mixture(&[ratio(1, 2), ratio(1, 2)], &[Cdf::dirac(int(0)), Cdf::dirac(int(1))]).unwrap();
        let expected = Cdf::mixture(&[ratio(1, 2), ratio(1, 2)], &[Cdf::dirac(int(2)), Cdf::dirac(int(3))]).unwrap();
        assert_eq!(half.convolve(&Cdf::dirac(int(2))).unwrap(), expected);

        let u = Cdf::uniform(int(0), int(1)).unwrap();
        let smeared = half.convolve(&u).unwrap();
        assert!(smeared.is_continuous());
        assert_eq!(smeared, Cdf::uniform(int(0), int(2)).unwrap());
        assert_eq!(u.convolve(&u), Err(Error::UnsupportedConvolution));
    }

    #[test]
    fn first_reaching_levels() {
        let u = Cdf::uniform(int(0), int(1)).unwrap();
        assert_eq!(u.first_reaching(&ratio(1, 10), true), Some(ratio(1, 10)));
        assert_eq!(u.first_reaching(&ratio(9, 10), false), Some(ratio(9, 10)));
        let f = two_atoms();
        assert_eq!(f.first_reaching(&ratio(1, 2), false), Some(int(0)));
        assert_eq!(f.first_reaching(&ratio(7, 10), true), Some(int(5)));
        assert_eq!(f.first_reaching(&one(), true), None);
    }

    #[test]
    fn continuous_reach_both_sides() {
        let u = Cdf::uniform(int(0), int(1)).unwrap();
        assert_eq!(
            u.continuous_reach(&ratio(1, 2), &ratio(1, 10), false),
            Some(ratio(1, 10))
        );
        assert_eq!(
            u.continuous_reach(&ratio(1, 2), &ratio(1, 10), true),
            Some(ratio(1, 10))
        );
        assert_eq!(u.continuous_reach(&int(-1), &ratio(1, 10), false), Some(ratio(11, 10)));
        assert_eq!(u.continuous_reach(&ratio(1, 2), &ratio(6, 10), false), None);
    }

    #[test]
    fn window_completion_piles_mass_on_the_edges() {
        let part = Cdf::dirac(int(0));
        let window = SupportBound::symmetric(int(10)).unwrap();
        let g = Cdf::window_completion(Some(&part), &ratio(7, 10), &window).unwrap();
        assert_eq!(
            g.jumps(),
            &[
                Jump {
                    at: int(0),
                    mass: ratio(7, 10)
                },
                Jump {
                    at: int(10),
                    mass: ratio(3, 10)
                }
            ]
        );
        let empty = Cdf::window_completion(None, &zero(), &window).unwrap();
        assert_eq!(empty, Cdf::dirac(int(10)));
        let u = Cdf::uniform(int(-20), int(20)).unwrap();
        let clipped = Cdf::window_completion(Some(&u), &one(), &window).unwrap();
        assert_eq!(clipped.eval(&int(-10)), ratio(1, 4));
        assert_eq!(clipped.left_limit(&int(10)), ratio(3, 4));
        assert_eq!(clipped.eval(&int(10)), one());
    }
}
