//! Gauges between CDFs: uniform distance, the local distances `phi` and
//! `psi`, the Lévy metric with parameter, and the distance functional
//! `delta` used to compare gauge bases.
//!
//! Every supremum over the real line is reduced to a finite scan. For two
//! piecewise-affine càdlàg functions `A` and `B`, `x -> A(x - s) - B(x)` is
//! affine between consecutive breakpoints, so its supremum is the largest
//! value or left limit taken at a breakpoint. The breakpoints are the knots
//! of `B` and the knots of `A` shifted by `s`.
//!
//! The scan is kept as a vector of *terms*, one per (breakpoint, side).
//! The length and meaning of that vector depend only on the knot lists, and
//! each term is affine in the shift `s` as long as `s` stays between two
//! consecutive critical values `|a - b|` (`a`, `b` knots). This is what
//! makes the Lévy metric and the small-shift limits exactly computable.

use num::Signed;

use crate::cdf::Cdf;
use crate::error::{Error, Result};
use crate::rational::{clamp_unit, int, one, zero, Rational};

/// Terms of `sup_x A(x - s) - B(x)`, appended to `out`.
fn lag_terms(a: &Cdf, s: &Rational, b: &Cdf, out: &mut Vec<Rational>) {
    // Far left both vanish, far right both are 1.
    out.push(zero());
    for k in b.knots() {
        let x = k - s;
        out.push(a.eval(&x) - b.eval(k));
        out.push(a.left_limit(&x) - b.left_limit(k));
    }
    for k in a.knots() {
        let x = k + s;
        out.push(a.eval(k) - b.eval(&x));
        out.push(a.left_limit(k) - b.left_limit(&x));
    }
}

/// Terms whose maximum is the unclamped `phi(f, s, g)`.
pub(crate) fn phi_terms(f: &Cdf, s: &Rational, g: &Cdf) -> Vec<Rational> {
    let mut out = Vec::with_capacity(4 * (f.knots().len() + g.knots().len()) + 2);
    lag_terms(f, s, g, &mut out);
    lag_terms(g, s, f, &mut out);
    out
}

fn max_term(terms: &[Rational]) -> Rational {
    terms.iter().max().cloned().unwrap_or_else(zero)
}

/// Smallest positive distance between a knot of `f` and a knot of `g`.
/// Below this shift every term of [`phi_terms`] is affine.
pub(crate) fn knot_gap(f: &Cdf, g: &Cdf) -> Option<Rational> {
    f.knots()
        .iter()
        .flat_map(|a| g.knots().iter().map(move |b| (a - b).abs()))
        .filter(|d| d.is_positive())
        .min()
}

/// Intercepts and slopes of terms known to be affine on an interval, from
/// samples at two distinct points of that interval.
pub(crate) fn affine_fit(x1: &Rational, t1: &[Rational], x2: &Rational, t2: &[Rational]) -> Vec<(Rational, Rational)> {
    debug_assert_eq!(t1.len(), t2.len());
    t1.iter()
        .zip(t2)
        .map(|(v1, v2)| {
            let slope = (v2 - v1) / (x2 - x1);
            (v1 - &slope * x1, slope)
        })
        .collect()
}

/// `D_u(F, G) = sup_x |F(x) - G(x)|`.
pub fn uniform_distance(f: &Cdf, g: &Cdf) -> Rational {
    max_term(&phi_terms(f, &zero(), g))
}

/// `phi_{F,alpha}(G) = sup_x max{F(x - alpha) - G(x), G(x) - F(x + alpha)}`,
/// clamped into `[0, 1]`. `alpha` is expected to be positive.
pub fn phi(f: &Cdf, alpha: &Rational, g: &Cdf) -> Rational {
    clamp_unit(max_term(&phi_terms(f, alpha, g)))
}

/// A finite set of continuity points of a center CDF.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FNet {
    points: Vec<Rational>,
}

impl FNet {
    pub fn new(center: &Cdf, points: Vec<Rational>) -> Result<Self> {
        if points.is_empty() || points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::MalformedNet);
        }
        if let Some(p) = points.iter().find(|p| !center.is_continuity_point(p)) {
            return Err(Error::NetAtJump(p.clone()));
        }
        Ok(FNet { points })
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    /// Spacing, endpoint and continuity constraints of the constructive
    /// net: `F(x_0) <= eps`, `x_{i+1} - x_i < alpha`, `F(x_n) >= 1 - eps`.
    pub fn satisfies_construction(&self, center: &Cdf, alpha: &Rational, eps: &Rational) -> bool {
        let first = &self.points[0];
        let last = &self.points[self.points.len() - 1];
        center.eval(first) <= *eps
            && center.eval(last) >= one() - eps
            && self.points.windows(2).all(|w| &w[1] - &w[0] < *alpha)
            && self.points.iter().all(|p| center.is_continuity_point(p))
    }
}

/// `psi_{F,N}(G) = max_{x in N} |F(x) - G(x)|`.
pub fn psi(f: &Cdf, net: &FNet, g: &Cdf) -> Result<Rational> {
    if let Some(p) = net.points.iter().find(|p| !f.is_continuity_point(p)) {
        return Err(Error::NetAtJump(p.clone()));
    }
    Ok(net
        .points
        .iter()
        .map(|p| (f.eval(p) - g.eval(p)).abs())
        .max()
        .unwrap_or_else(zero))
}

/// Whether `F(x - gamma*alpha) - alpha <= G(x) <= F(x + gamma*alpha) + alpha`
/// for every real `x`.
pub fn levy_feasible(gamma: &Rational, f: &Cdf, g: &Cdf, alpha: &Rational) -> bool {
    max_term(&phi_terms(f, &(gamma * alpha), g)) <= *alpha
}

/// Lévy metric with parameter `gamma`: the infimum of admissible `alpha`
/// in [`levy_feasible`].
///
/// Feasibility is monotone in `alpha`, and between consecutive critical
/// values `|a - b| / gamma` every scan term is affine in `alpha`, so the
/// infimum inside the first feasible interval solves finitely many linear
/// inequalities.
pub fn levy(gamma: &Rational, f: &Cdf, g: &Cdf) -> Rational {
    let mut critical = vec![zero(), one()];
    for a in f.knots() {
        for b in g.knots() {
            let c = (a - b).abs() / gamma;
            if c.is_positive() && c < one() {
                critical.push(c);
            }
        }
    }
    critical.sort();
    critical.dedup();

    let k = critical.partition_point(|c| !levy_feasible(gamma, f, g, c));
    if k == 0 {
        return zero();
    }
    let (lo, hi) = (&critical[k - 1], &critical[k]);
    let a1 = lo + (hi - lo) / int(3);
    let a2 = lo + (hi - lo) * int(2) / int(3);
    let t1 = phi_terms(f, &(gamma * &a1), g);
    let t2 = phi_terms(f, &(gamma * &a2), g);
    // Each term p + q*alpha has q <= 0; alpha is admissible for it iff
    // alpha >= p / (1 - q).
    let bound = affine_fit(&a1, &t1, &a2, &t2)
        .into_iter()
        .map(|(p, q)| p / (one() - q))
        .max()
        .unwrap_or_else(zero);
    bound.max(lo.clone()).min(hi.clone())
}

/// Modulus choice for the first half of the interchange lemma: an `alpha`
/// with `psi_{F,N}(G) <= phi_{F,alpha}(G) + eps` for every `G`.
///
/// Per net point, `alpha` stays below half the distance to the nearest jump
/// and below the width over which the continuous part gains `eps` on either
/// side. Without any such constraint the answer is 1.
pub fn alpha_for_net(f: &Cdf, net: &FNet, eps: &Rational) -> Result<Rational> {
    if !eps.is_positive() {
        return Err(Error::NonPositive {
            name: "eps",
            value: eps.clone(),
        });
    }
    let mut best: Option<Rational> = None;
    for p in &net.points {
        let nearest_jump = f.jumps().iter().map(|j| (&j.at - p).abs()).min();
        let candidates = [
            nearest_jump.map(|d| d / int(2)),
            f.continuous_reach(p, eps, false),
            f.continuous_reach(p, eps, true),
        ];
        if let Some(local) = candidates.into_iter().flatten().min() {
            best = Some(match best {
                Some(b) => b.min(local),
                None => local,
            });
        }
    }
    Ok(best.unwrap_or_else(one))
}

/// Net construction for the second half of the interchange lemma: points
/// `x_0 < ... < x_n` of continuity with `F(x_0) <= eps`, spacing below
/// `alpha` and `F(x_n) >= 1 - eps`, so that
/// `phi_{F,alpha}(G) <= psi_{F,N}(G) + eps` for every `G`.
///
/// The grid has step `alpha / 2`; a grid point sitting on a jump moves right
/// by `min(alpha / 4, half the gap to the next jump)`.
pub fn net_for_alpha(f: &Cdf, alpha: &Rational, eps: &Rational) -> Result<FNet> {
    for (name, value) in [("alpha", alpha), ("eps", eps)] {
        if !value.is_positive() {
            return Err(Error::NonPositive {
                name,
                value: value.clone(),
            });
        }
    }
    let half = alpha / int(2);
    let quarter = alpha / int(4);
    let low_edge = f.first_reaching(eps, true).unwrap_or_else(|| f.support().low);
    let start = &low_edge - &half;
    let stop = f.first_reaching(&(one() - eps), false).unwrap_or_else(|| start.clone());

    let mut points = Vec::new();
    let mut x = start;
    loop {
        let done = x >= stop;
        let point = match f.jumps().binary_search_by(|j| j.at.cmp(&x)) {
            Ok(i) => {
                let step = match f.jumps().get(i + 1) {
                    Some(next) => (&next.at - &x) / int(2),
                    None => quarter.clone(),
                };
                &x + step.min(quarter.clone())
            }
            Err(_) => x.clone(),
        };
        points.push(point);
        if done {
            break;
        }
        x += &half;
    }
    FNet::new(f, points)
}

/// A local distance at a center CDF.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gauge {
    Phi { center: Cdf, alpha: Rational },
    Psi { center: Cdf, net: FNet },
    Levy { center: Cdf, gamma: Rational },
}

impl Gauge {
    pub fn phi(center: Cdf, alpha: Rational) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::NonPositive {
                name: "alpha",
                value: alpha,
            });
        }
        Ok(Gauge::Phi { center, alpha })
    }

    pub fn psi(center: Cdf, net: FNet) -> Result<Self> {
        // Re-validate: the net may have been built for another center.
        let net = FNet::new(&center, net.points)?;
        Ok(Gauge::Psi { center, net })
    }

    pub fn levy(center: Cdf, gamma: Rational) -> Result<Self> {
        if !gamma.is_positive() {
            return Err(Error::NonPositive {
                name: "gamma",
                value: gamma,
            });
        }
        Ok(Gauge::Levy { center, gamma })
    }

    pub fn center(&self) -> &Cdf {
        match self {
            Gauge::Phi { center, .. } | Gauge::Psi { center, .. } | Gauge::Levy { center, .. } => center,
        }
    }

    pub fn eval(&self, g: &Cdf) -> Rational {
        match self {
            Gauge::Phi { center, alpha } => phi(center, alpha, g),
            Gauge::Psi { center, net } => psi(center, net, g).expect("net validated at construction"),
            Gauge::Levy { center, gamma } => levy(gamma, center, g),
        }
    }
}

/// One gauge per center, for the finitely many centers in play.
#[derive(Debug, Clone, Default)]
pub struct GaugeSelection {
    gauges: Vec<Gauge>,
}

impl GaugeSelection {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assign `gauge` to its own center, replacing any previous choice.
    pub fn assign(&mut self, gauge: Gauge) {
        match self.gauges.iter_mut().find(|g| g.center() == gauge.center()) {
            Some(slot) => *slot = gauge,
            None => self.gauges.push(gauge),
        }
    }

    pub fn get(&self, center: &Cdf) -> Option<&Gauge> {
        self.gauges.iter().find(|g| g.center() == center)
    }

    pub fn gauges(&self) -> &[Gauge] {
        &self.gauges
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Phi,
    Levy,
    Psi,
}

/// Result of [`delta_distance`]: an exact value attained along the basis
/// sequence and a certified upper bound for the supremum over the basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaBracket {
    pub lower: Rational,
    pub upper: Rational,
    /// `inf_G gauge_n(G)` for the `n`-th gauge of the canonical sequence.
    pub trace: Vec<Rational>,
}

/// `delta(F, D) = sup_{gauge at F} inf_{G in D} gauge(G)` over one of the
/// three bases, evaluated along `alpha = gamma = 1/n` for `n = 1..=depth`
/// (for the psi basis, along the nets `net_for_alpha(F, 1/n, 1/n)`).
///
/// The phi and Lévy gauges grow monotonically as the parameter shrinks.
/// Once `1/depth` is below the smallest knot gap between `F` and `G`, each
/// scan term is affine in the parameter with slope at most the largest
/// density in play, which bounds the remaining growth. Otherwise the bound
/// falls back to 1. The psi basis inherits the phi bound through the
/// interchange lemma.
pub fn delta_distance(f: &Cdf, family: &[Cdf], basis: Basis, depth: usize) -> Result<DeltaBracket> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let depth = depth.max(1);
    let step = |n: usize| Rational::new(1.into(), (n as i64).into());

    let infimum = |values: Vec<Rational>| values.into_iter().min().expect("family is non-empty");
    let trace: Vec<Rational> = match basis {
        Basis::Phi => (1..=depth)
            .map(|n| infimum(family.iter().map(|g| phi(f, &step(n), g)).collect()))
            .collect(),
        Basis::Levy => (1..=depth)
            .map(|n| infimum(family.iter().map(|g| levy(&step(n), f, g)).collect()))
            .collect(),
        Basis::Psi => {
            let mut out = Vec::with_capacity(depth);
            for n in 1..=depth {
                let net = net_for_alpha(f, &step(n), &step(n))?;
                let mut values = Vec::with_capacity(family.len());
                for g in family {
                    values.push(psi(f, &net, g)?);
                }
                out.push(infimum(values));
            }
            out
        }
    };
    let lower = trace.iter().max().cloned().unwrap_or_else(zero);

    let last = step(depth);
    let upper = family
        .iter()
        .map(|g| {
            let certified = knot_gap(f, g).is_none_or(|gap| last < gap);
            if !certified {
                return one();
            }
            let value = match basis {
                Basis::Levy => levy(&last, f, g),
                Basis::Phi | Basis::Psi => phi(f, &last, g),
            };
            let slope = f.max_density().max(g.max_density());
            clamp_unit(value + slope * &last)
        })
        .min()
        .expect("family is non-empty");

    Ok(DeltaBracket {
        upper: upper.max(lower.clone()),
        lower,
        trace,
    })
}

/// `lim_{s -> 0+}` of the unclamped `phi(f, s, g)`, computed exactly from
/// the affine regime below the smallest knot gap.
pub fn phi_small_shift_limit(f: &Cdf, g: &Cdf) -> Rational {
    let c = knot_gap(f, g).unwrap_or_else(one).min(one());
    let s1 = &c / int(2);
    let s2 = &c / int(4);
    let t1 = phi_terms(f, &s1, g);
    let t2 = phi_terms(f, &s2, g);
    let limit = affine_fit(&s1, &t1, &s2, &t2)
        .into_iter()
        .map(|(p, _)| p)
        .max()
        .unwrap_or_else(zero);
    clamp_unit(limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn dirac(n: i64, d: i64) -> Cdf {
        Cdf::dirac(ratio(n, d))
    }

    #[test]
    fn uniform_distance_examples() {
        let f = dirac(0, 1);
        assert_eq!(uniform_distance(&f, &f), zero());
        assert_eq!(uniform_distance(&f, &dirac(1, 1)), one());
        let g = Cdf::mixture(&[ratio(7, 10), ratio(3, 10)], &[dirac(0, 1), dirac(1, 1)]).unwrap();
        assert_eq!(uniform_distance(&f, &g), ratio(3, 10));
    }

    #[test]
    fn phi_examples() {
        let f = dirac(0, 1);
        assert_eq!(phi(&f, &ratio(1, 2), &f), zero());
        assert_eq!(phi(&f, &ratio(1, 2), &dirac(1, 4)), zero());
        assert_eq!(phi(&f, &ratio(1, 2), &dirac(1, 1)), one());
    }

    #[test]
    fn psi_examples() {
        let f = dirac(0, 1);
        let net = FNet::new(&f, vec![ratio(1, 2)]).unwrap();
        assert_eq!(psi(&f, &net, &f).unwrap(), zero());
        assert_eq!(psi(&f, &net, &dirac(1, 1)).unwrap(), one());
        let wide = FNet::new(&f, vec![int(-1), int(2)]).unwrap();
        let g = Cdf::mixture(&[ratio(1, 2), ratio(1, 2)], &[dirac(0, 1), dirac(1, 1)]).unwrap();
        assert_eq!(psi(&f, &wide, &g).unwrap(), zero());
    }

    #[test]
    fn nets_reject_jumps_and_disorder() {
        let f = dirac(0, 1);
        assert_eq!(FNet::new(&f, vec![zero()]), Err(Error::NetAtJump(zero())));
        assert_eq!(FNet::new(&f, vec![]), Err(Error::MalformedNet));
        assert_eq!(FNet::new(&f, vec![one(), zero()]), Err(Error::MalformedNet));
        let elsewhere = FNet::new(&dirac(5, 1), vec![zero()]).unwrap();
        assert_eq!(psi(&f, &elsewhere, &f), Err(Error::NetAtJump(zero())));
    }

    #[test]
    fn levy_examples() {
        let f = dirac(0, 1);
        assert_eq!(levy(&one(), &f, &f), zero());
        assert_eq!(levy(&one(), &f, &dirac(1, 2)), ratio(1, 2));
        assert_eq!(levy(&one(), &f, &dirac(2, 1)), one());
        assert_eq!(levy(&ratio(1, 4), &f, &dirac(1, 1)), one());
        assert_eq!(levy(&int(4), &f, &dirac(1, 1)), ratio(1, 4));
    }

    #[test]
    fn levy_with_continuous_parts() {
        // L_1(U[0,1], U[1/2, 3/2]): a shift of 1/2 costs alpha with
        // alpha + alpha = 1/2 for the slope-one ramps.
        let u = Cdf::uniform(int(0), int(1)).unwrap();
        let v = u.shift(&ratio(1, 2));
        assert_eq!(levy(&one(), &u, &v), ratio(1, 4));
        assert!(levy_feasible(&one(), &u, &v, &ratio(1, 4)));
        assert!(!levy_feasible(&one(), &u, &v, &ratio(24, 100)));
    }

    #[test]
    fn alpha_for_net_examples() {
        let f = dirac(0, 1);
        let net = FNet::new(&f, vec![one()]).unwrap();
        assert_eq!(alpha_for_net(&f, &net, &ratio(1, 10)).unwrap(), ratio(1, 2));
        let u = Cdf::uniform(int(0), int(1)).unwrap();
        let mid = FNet::new(&u, vec![ratio(1, 2)]).unwrap();
        assert_eq!(alpha_for_net(&u, &mid, &ratio(1, 10)).unwrap(), ratio(1, 10));
        assert!(alpha_for_net(&u, &mid, &zero()).is_err());
    }

    #[test]
    fn net_for_alpha_examples() {
        let f = dirac(0, 1);
        let net = net_for_alpha(&f, &one(), &ratio(1, 10)).unwrap();
        assert_eq!(net.points(), &[ratio(-1, 2), ratio(1, 4)]);
        assert!(net.satisfies_construction(&f, &one(), &ratio(1, 10)));

        let u = Cdf::uniform(int(0), int(1)).unwrap();
        let net = net_for_alpha(&u, &ratio(1, 2), &ratio(1, 10)).unwrap();
        assert!(net.satisfies_construction(&u, &ratio(1, 2), &ratio(1, 10)));
    }

    #[test]
    fn gauges_vanish_at_center() {
        let f = Cdf::mixture(
            &[ratio(1, 3), ratio(2, 3)],
            &[dirac(0, 1), Cdf::uniform(int(1), int(2)).unwrap()],
        )
        .unwrap();
        let net = net_for_alpha(&f, &ratio(1, 2), &ratio(1, 5)).unwrap();
        for g in [
            Gauge::phi(f.clone(), ratio(1, 3)).unwrap(),
            Gauge::psi(f.clone(), net).unwrap(),
            Gauge::levy(f.clone(), int(2)).unwrap(),
        ] {
            assert_eq!(g.eval(&f), zero());
        }
        assert!(Gauge::phi(f.clone(), zero()).is_err());
        assert!(Gauge::levy(f, ratio(-1, 2)).is_err());
    }

    #[test]
    fn selection_keeps_one_gauge_per_center() {
        let mut sel = GaugeSelection::new();
        sel.assign(Gauge::phi(dirac(0, 1), one()).unwrap());
        sel.assign(Gauge::phi(dirac(1, 1), one()).unwrap());
        sel.assign(Gauge::phi(dirac(0, 1), ratio(1, 2)).unwrap());
        assert_eq!(sel.gauges().len(), 2);
        assert_eq!(
            sel.get(&dirac(0, 1)),
            Some(&Gauge::Phi {
                center: dirac(0, 1),
                alpha: ratio(1, 2)
            })
        );
    }

    #[test]
    fn delta_examples() {
        let f = dirac(0, 1);
        for basis in [Basis::Phi, Basis::Levy, Basis::Psi] {
            let d = delta_distance(&f, std::slice::from_ref(&f), basis, 16).unwrap();
            assert_eq!((d.lower, d.upper), (zero(), zero()));
        }
        let d = delta_distance(&f, &[dirac(1, 1)], Basis::Phi, 8).unwrap();
        assert_eq!((d.lower, d.upper), (one(), one()));
        assert_eq!(delta_distance(&f, &[], Basis::Phi, 8), Err(Error::EmptyFamily));
    }

    #[test]
    fn small_shift_limit() {
        let f = dirac(0, 1);
        let g = Cdf::mixture(&[ratio(7, 10), ratio(3, 10)], &[dirac(0, 1), dirac(1, 1)]).unwrap();
        assert_eq!(phi_small_shift_limit(&f, &g), ratio(3, 10));
        let u = Cdf::uniform(int(0), int(1)).unwrap();
        assert_eq!(phi_small_shift_limit(&u, &u.shift(&ratio(1, 2))), ratio(1, 2));
    }
}
