//! Reference computations that only use the raw jump and segment lists.

#![allow(dead_code)]

use cdf_compact::rational::{int, one, zero};
use cdf_compact::{Cdf, Rational};
use num::Signed;

/// `F(x)` summed directly from the parts.
pub fn eval(f: &Cdf, x: &Rational) -> Rational {
    let mut v = zero();
    for j in f.jumps() {
        if j.at <= *x {
            v += &j.mass;
        }
    }
    for s in f.segments() {
        if *x >= s.right {
            v += &s.mass;
        } else if *x > s.left {
            v += &s.mass * (x - &s.left) / (&s.right - &s.left);
        }
    }
    v
}

/// `F(x-)` summed directly from the parts.
pub fn left(f: &Cdf, x: &Rational) -> Rational {
    let mut v = zero();
    for j in f.jumps() {
        if j.at < *x {
            v += &j.mass;
        }
    }
    for s in f.segments() {
        if *x >= s.right {
            v += &s.mass;
        } else if *x > s.left {
            v += &s.mass * (x - &s.left) / (&s.right - &s.left);
        }
    }
    v
}

fn breakpoints(f: &Cdf) -> Vec<Rational> {
    let mut out: Vec<Rational> = f.jumps().iter().map(|j| j.at.clone()).collect();
    for s in f.segments() {
        out.push(s.left.clone());
        out.push(s.right.clone());
    }
    out
}

/// `sup_x F(x - a) - G(x)` by scanning every point where either side can
/// change slope, from both sides.
pub fn lag_sup(f: &Cdf, a: &Rational, g: &Cdf) -> Rational {
    let mut xs: Vec<Rational> = breakpoints(g);
    xs.extend(breakpoints(f).into_iter().map(|p| p + a));
    let mut best = zero();
    for x in &xs {
        let xa = x - a;
        best = best.max(eval(f, &xa) - eval(g, x));
        best = best.max(left(f, &xa) - left(g, x));
    }
    best
}

/// Unclamped `sup_x max{F(x - s) - G(x), G(x) - F(x + s)}`, never below 0.
pub fn phi_raw(f: &Cdf, s: &Rational, g: &Cdf) -> Rational {
    lag_sup(f, s, g).max(lag_sup(g, s, f))
}

pub fn phi(f: &Cdf, s: &Rational, g: &Cdf) -> Rational {
    phi_raw(f, s, g).min(one())
}

pub fn uniform(f: &Cdf, g: &Cdf) -> Rational {
    phi_raw(f, &zero(), g)
}

pub fn levy_feasible(gamma: &Rational, f: &Cdf, g: &Cdf, alpha: &Rational) -> bool {
    phi_raw(f, &(gamma * alpha), g) <= *alpha
}

/// Bisection on `[0, 1]` down to width `2^-bits`; returns the feasible end.
pub fn levy_bisect(gamma: &Rational, f: &Cdf, g: &Cdf, bits: u32) -> Rational {
    let (mut lo, mut hi) = (zero(), one());
    if levy_feasible(gamma, f, g, &lo) {
        return lo;
    }
    for _ in 0..bits {
        let mid = (&lo + &hi) / int(2);
        if levy_feasible(gamma, f, g, &mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub fn pow2(bits: u32) -> Rational {
    Rational::new(1.into(), num::BigInt::from(1u64) << bits)
}

pub fn close(a: &Rational, b: &Rational, tol: &Rational) -> bool {
    (a - b).abs() <= *tol
}

pub fn total_mass(f: &Cdf) -> Rational {
    f.jumps().iter().map(|j| j.mass.clone()).sum::<Rational>()
        + f.segments().iter().map(|s| s.mass.clone()).sum::<Rational>()
}

use cdf_compact::family::{FamilySpec, Locations, ParametricTail, Template};
use cdf_compact::rational::ratio;
use cdf_compact::sample::{random_cdf, random_discrete};
use rand::Rng;

/// A random tail of any template. Converging shifts use atomic bases so
/// that their values settle on the Helly grid within the horizon.
pub fn random_tail<R: Rng>(rng: &mut R, horizon: usize) -> ParametricTail {
    let step = ratio(rng.gen_range(1..=4), 2);
    let locations = || Locations::multiple(step.clone()).unwrap();
    let template = match rng.gen_range(0..4) {
        0 => Template::Constant,
        1 => Template::ShiftEscape { locations: locations() },
        2 => Template::MixtureEscape {
            weight: ratio(rng.gen_range(0..=8), 8),
            locations: locations(),
        },
        _ => Template::ShiftConverge {
            scale: ratio(rng.gen_range(1..=4), 4),
        },
    };
    let base = match template {
        Template::ShiftConverge { .. } => random_discrete(rng, 3),
        _ => random_cdf(rng),
    };
    ParametricTail::new(template, base, horizon).unwrap()
}

pub fn random_family<R: Rng>(rng: &mut R) -> FamilySpec {
    let explicit: Vec<Cdf> = (0..rng.gen_range(0..=2)).map(|_| random_cdf(rng)).collect();
    let mut tails: Vec<ParametricTail> = (0..rng.gen_range(0..=2)).map(|_| random_tail(rng, 64)).collect();
    if explicit.is_empty() && tails.is_empty() {
        tails.push(random_tail(rng, 64));
    }
    FamilySpec::new(explicit, tails).unwrap()
}

pub fn example_family(alpha: Rational) -> FamilySpec {
    let tail = ParametricTail::new(
        Template::MixtureEscape {
            weight: alpha,
            locations: Locations::multiple(one()).unwrap(),
        },
        Cdf::dirac(zero()),
        128,
    )
    .unwrap();
    FamilySpec::new(vec![], vec![tail]).unwrap()
}

pub fn shift_family() -> FamilySpec {
    let tail = ParametricTail::new(
        Template::ShiftEscape {
            locations: Locations::multiple(one()).unwrap(),
        },
        Cdf::dirac(zero()),
        128,
    )
    .unwrap();
    FamilySpec::new(vec![], vec![tail]).unwrap()
}

/// Example, shift-escape, tight, converging and mixed families.
pub fn corpus() -> Vec<(&'static str, FamilySpec)> {
    let tight = FamilySpec::new(
        vec![
            Cdf::dirac(int(5)),
            Cdf::uniform(int(-2), int(3)).unwrap(),
            Cdf::dirac(ratio(-7, 2)),
        ],
        vec![],
    )
    .unwrap();
    let converge = FamilySpec::new(
        vec![],
        vec![ParametricTail::new(Template::ShiftConverge { scale: one() }, Cdf::dirac(zero()), 64).unwrap()],
    )
    .unwrap();
    let constant = FamilySpec::new(
        vec![],
        vec![ParametricTail::new(Template::Constant, Cdf::uniform(zero(), int(4)).unwrap(), 8).unwrap()],
    )
    .unwrap();
    let gapped = FamilySpec::new(
        vec![],
        vec![ParametricTail::new(
            Template::ShiftEscape {
                locations: Locations::explicit(vec![int(1), int(3), int(6)]).unwrap(),
            },
            Cdf::uniform(zero(), one()).unwrap(),
            64,
        )
        .unwrap()],
    )
    .unwrap();
    vec![
        ("example 1/4", example_family(ratio(1, 4))),
        ("example 3/10", example_family(ratio(3, 10))),
        ("example 9/10", example_family(ratio(9, 10))),
        ("example 0", example_family(zero())),
        ("shift escape", shift_family()),
        ("explicit tight", tight.clone()),
        ("converging shift", converge.clone()),
        ("constant tail", constant),
        ("explicit steps", gapped),
        ("tight union example", tight.union(&example_family(ratio(1, 2)))),
        ("converging union shift", converge.union(&shift_family())),
    ]
}
