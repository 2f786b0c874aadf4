//! Seeded random CDFs for property tests and reports.

use num::BigInt;
use rand::Rng;

use crate::cdf::{Cdf, Jump, Segment};
use crate::rational::{int, Rational};

fn grid_point<R: Rng>(rng: &mut R, den: i64, span: i64) -> Rational {
    Rational::new(BigInt::from(rng.gen_range(-span * den..=span * den)), BigInt::from(den))
}

/// Normalise positive integer weights into masses summing to 1.
fn masses(weights: &[u32]) -> Vec<Rational> {
    let total: u32 = weights.iter().sum();
    weights.iter().map(|&w| Rational::new(w.into(), total.into())).collect()
}

/// A purely atomic CDF with 1 to `max_atoms` atoms on the half-integers of
/// `[-4, 4]`.
pub fn random_discrete<R: Rng>(rng: &mut R, max_atoms: usize) -> Cdf {
    let k = rng.gen_range(1..=max_atoms.max(1));
    let weights: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=5)).collect();
    let jumps = masses(&weights)
        .into_iter()
        .map(|mass| Jump {
            at: grid_point(rng, 2, 4),
            mass,
        })
        .collect();
    Cdf::new(jumps, vec![]).expect("masses sum to one")
}

/// A CDF with up to three atoms and up to two uniform pieces, all
/// coordinates on the quarter grid of `[-4, 4]`.
pub fn random_cdf<R: Rng>(rng: &mut R) -> Cdf {
    let atoms = rng.gen_range(0..=3);
    let pieces = if atoms == 0 {
        rng.gen_range(1..=2)
    } else {
        rng.gen_range(0..=2)
    };
    let weights: Vec<u32> = (0..atoms + pieces).map(|_| rng.gen_range(1..=5)).collect();
    let mut m = masses(&weights).into_iter();
    let jumps = (0..atoms)
        .map(|_| Jump {
            at: grid_point(rng, 4, 4),
            mass: m.next().expect("one mass per part"),
        })
        .collect();
    let segments = (0..pieces)
        .map(|_| {
            let left = grid_point(rng, 4, 4);
            let width = Rational::new(BigInt::from(rng.gen_range(1..=12)), BigInt::from(4));
            Segment {
                right: &left + width,
                left,
                mass: m.next().expect("one mass per part"),
            }
        })
        .collect();
    Cdf::new(jumps, segments).expect("masses sum to one")
}

/// A strictly increasing list of 1 to `max_points` quarter-grid points in
/// `[-5, 5]` avoiding the jumps of `center`.
pub fn random_net_points<R: Rng>(rng: &mut R, center: &Cdf, max_points: usize) -> Vec<Rational> {
    let k = rng.gen_range(1..=max_points.max(1));
    let mut pts: Vec<Rational> = (0..4 * k)
        .map(|_| grid_point(rng, 8, 5))
        .filter(|p| center.is_continuity_point(p))
        .take(k)
        .collect();
    if pts.is_empty() {
        pts.push(int(6));
    }
    pts.sort();
    pts.dedup();
    pts
}

/// A positive rational `p / q` with `1 <= p <= q <= max_den`.
pub fn random_unit<R: Rng>(rng: &mut R, max_den: i64) -> Rational {
    let q = rng.gen_range(1..=max_den);
    let p = rng.gen_range(1..=q);
    Rational::new(BigInt::from(p), BigInt::from(q))
}
