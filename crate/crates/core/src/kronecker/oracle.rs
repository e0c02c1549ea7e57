//! Brute-force cross-examination of the interpolation engines.
//!
//! Nothing here consults a certificate or a character constructor: searches
//! run over explicit grids, cosets, or whole finite dual groups in exact
//! modular integer arithmetic, so a disagreement with an engine is a real
//! disagreement. u128 arithmetic is used when the common modulus permits it
//! and big integers otherwise; both paths are exact.

use super::KroneckerError;
use crate::exact::{circular_distance, denominator, frac, UnitAngle};
use crate::groups::{Coordinate, GroupElement};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub max_candidates: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_candidates: 4_000_000,
        }
    }
}

/// Result of a minimax scan over x = i/grid (plus optional extra candidates).
#[derive(Clone, Debug)]
pub struct GridScan {
    pub grid: u64,
    /// Lowest grid index attaining the grid minimum.
    pub grid_argmin: u64,
    /// min over grid points of max over elements of the turn distance.
    pub grid_min_max: BigRational,
    /// Best frequency among grid points and extra candidates.
    pub best_frequency: BigRational,
    pub best_min_max: BigRational,
}

/// max_j ‖n_j · x − t_j‖ at one exact frequency.
fn max_distance_at(elements: &[BigInt], targets: &[UnitAngle], x: &BigRational) -> BigRational {
    elements
        .iter()
        .zip(targets)
        .map(|(n, t)| {
            let v = UnitAngle::from_turns(&frac(&(BigRational::from(n.clone()) * x)));
            circular_distance(&v, t)
        })
        .max()
        .expect("nonempty")
}

/// Scans x = i/grid for i in [0, grid) minimizing the worst turn distance of
/// n_j·x to t_j, exactly. Extra candidate frequencies are folded into
/// `best_*` but never into the grid fields.
pub fn grid_minimax(
    elements: &[BigInt],
    targets: &[UnitAngle],
    grid: u64,
    extra: &[BigRational],
    budget: &SearchBudget,
) -> Result<GridScan, KroneckerError> {
    if elements.is_empty() {
        return Err(KroneckerError::Empty);
    }
    if elements.len() != targets.len() {
        return Err(KroneckerError::LengthMismatch {
            points: elements.len(),
            targets: targets.len(),
        });
    }
    assert!(grid >= 1);
    if grid > budget.max_candidates {
        return Err(KroneckerError::BudgetExceeded {
            needed: grid as u128,
            budget: budget.max_candidates,
        });
    }

    // Common modulus M = grid · lcm(target denominators): every quantity
    // ‖n·(i/grid) − t‖ becomes an integer distance mod M.
    let t_lcm = targets
        .iter()
        .fold(BigUint::one(), |acc, t| acc.lcm(&denominator(t.turns())));
    let modulus = BigUint::from(grid) * &t_lcm;
    let n_mod: Vec<BigUint> = elements
        .iter()
        .map(|n| n.mod_floor(&BigInt::from(modulus.clone())).to_biguint().unwrap())
        .collect();
    let t_scaled: Vec<BigUint> = targets
        .iter()
        .map(|t| {
            (t.turns() * BigRational::from(BigInt::from(modulus.clone())))
                .to_integer()
                .to_biguint()
                .unwrap()
        })
        .collect();

    let (grid_argmin, best_dist) = if let Some(m) = modulus.to_u64() {
        let n_small: Vec<u64> = n_mod.iter().map(|n| n.to_u64().unwrap()).collect();
        let t_small: Vec<u64> = t_scaled.iter().map(|t| t.to_u64().unwrap()).collect();
        let step = (&t_lcm).to_u64().expect("divides modulus");
        let mut best = u64::MAX;
        let mut arg = 0u64;
        for i in 0..grid {
            let it = ((i as u128 * step as u128) % m as u128) as u64;
            let mut cur = 0u64;
            for (n, t) in n_small.iter().zip(&t_small) {
                let pos = ((*n as u128 * it as u128) % m as u128) as u64;
                let d = pos.abs_diff(*t);
                let d = d.min(m - d);
                if d > cur {
                    cur = d;
                    if cur >= best {
                        break;
                    }
                }
            }
            if cur < best {
                best = cur;
                arg = i;
            }
        }
        (
            arg,
            BigRational::new(BigInt::from(best), BigInt::from(m)),
        )
    } else {
        let mut best: Option<BigUint> = None;
        let mut arg = 0u64;
        for i in 0..grid {
            let it = (BigUint::from(i) * &t_lcm) % &modulus;
            let mut cur = BigUint::zero();
            for (n, t) in n_mod.iter().zip(&t_scaled) {
                let pos = (n * &it) % &modulus;
                let d = if &pos >= t { &pos - t } else { t - &pos };
                let d = d.clone().min(&modulus - &d);
                if d > cur {
                    cur = d;
                    if best.as_ref().is_some_and(|b| &cur >= b) {
                        break;
                    }
                }
            }
            if best.as_ref().is_none_or(|b| &cur < b) {
                best = Some(cur);
                arg = i;
            }
        }
        (
            arg,
            BigRational::new(
                BigInt::from(best.expect("grid nonempty")),
                BigInt::from(modulus),
            ),
        )
    };

    let grid_min_max = best_dist;
    let mut best_frequency =
        BigRational::new(BigInt::from(grid_argmin), BigInt::from(grid));
    let mut best_min_max = grid_min_max.clone();
    for x in extra {
        let d = max_distance_at(elements, targets, x);
        if d < best_min_max {
            best_min_max = d;
            best_frequency = x.clone();
        }
    }
    Ok(GridScan {
        grid,
        grid_argmin,
        grid_min_max,
        best_frequency,
        best_min_max,
    })
}

/// Largest amount the minimax can drop between adjacent grid points:
/// max|n_j| / (2·grid) turns.
pub fn lipschitz_slack(elements: &[BigInt], grid: u64) -> BigRational {
    let n_max = elements
        .iter()
        .map(|n| n.magnitude().clone())
        .max()
        .expect("nonempty");
    BigRational::new(BigInt::from(n_max), BigInt::from(2) * BigInt::from(grid))
}

/// Exhaustive minimum of ‖base + j/m − desired‖ over j in [0, m); returns
/// the lowest optimal j and the distance.
pub fn coset_minimum(
    base: &UnitAngle,
    modulus: &BigUint,
    desired: &UnitAngle,
    budget: &SearchBudget,
) -> Result<(BigUint, BigRational), KroneckerError> {
    if let Some(needed) = modulus.to_u128() {
        if needed > budget.max_candidates as u128 {
            return Err(KroneckerError::BudgetExceeded {
                needed,
                budget: budget.max_candidates,
            });
        }
    } else {
        return Err(KroneckerError::BudgetExceeded {
            needed: u128::MAX,
            budget: budget.max_candidates,
        });
    }
    let m = BigInt::from(modulus.clone());
    let mut j = BigUint::zero();
    let mut best: Option<(BigUint, BigRational)> = None;
    while &j < modulus {
        let value = base
            + &UnitAngle::from_turns(&BigRational::new(BigInt::from(j.clone()), m.clone()));
        let d = circular_distance(&value, desired);
        if best.as_ref().is_none_or(|(_, bd)| &d < bd) {
            best = Some((j.clone(), d));
        }
        j += BigUint::one();
    }
    Ok(best.expect("modulus is positive"))
}

/// Best character of a finite product: exhaustive search over all
/// assignments k_α at the given (index, order) slots.
#[derive(Clone, Debug)]
pub struct DualScan {
    pub searched: u64,
    pub min_max_turns: BigRational,
    /// (factor index, numerator k): the value at the factor generator is
    /// k / order.
    pub best_assignment: Vec<(u64, u64)>,
}

pub fn enumerate_finite_dual(
    moduli: &[(u64, u64)],
    points: &[GroupElement],
    targets: &[UnitAngle],
    budget: &SearchBudget,
) -> Result<DualScan, KroneckerError> {
    if points.is_empty() {
        return Err(KroneckerError::Empty);
    }
    if points.len() != targets.len() {
        return Err(KroneckerError::LengthMismatch {
            points: points.len(),
            targets: targets.len(),
        });
    }
    for w in 0..moduli.len() {
        assert!(moduli[w].1 >= 2, "factor order must be at least 2");
        assert!(
            !moduli[..w].iter().any(|(i, _)| *i == moduli[w].0),
            "repeated factor index"
        );
    }
    let mut total: u128 = 1;
    for (_, n) in moduli {
        total = total.saturating_mul(*n as u128);
        if total > budget.max_candidates as u128 {
            return Err(KroneckerError::BudgetExceeded {
                needed: total,
                budget: budget.max_candidates,
            });
        }
    }

    // Common modulus for exact integer distances.
    let n_lcm = moduli.iter().fold(1u64, |acc, (_, n)| acc.lcm(n));
    let t_lcm = targets.iter().fold(BigUint::one(), |acc, t| {
        acc.lcm(&denominator(t.turns()))
    });
    let modulus_big = BigUint::from(n_lcm) * &t_lcm;
    let m = modulus_big
        .to_u64()
        .expect("finite dual scans use small moduli");

    // j[p][α]: the α-th coordinate of point p as a multiple of 1/n_α.
    let mut coords = vec![vec![0u64; moduli.len()]; points.len()];
    for (p, point) in points.iter().enumerate() {
        for (i, _) in point.support() {
            if !moduli.iter().any(|(idx, _)| idx == i) {
                return Err(KroneckerError::WrongFactor {
                    index: *i,
                    reason: "point supported outside the enumerated factors".into(),
                });
            }
        }
        for (a, (index, order)) in moduli.iter().enumerate() {
            match point.project(*index) {
                Coordinate::Angle(angle) => {
                    let scaled = angle.turns() * BigRational::from(BigInt::from(*order));
                    if !scaled.is_integer() {
                        return Err(KroneckerError::WrongFactor {
                            index: *index,
                            reason: "coordinate order exceeds the declared factor order".into(),
                        });
                    }
                    coords[p][a] = scaled.to_integer().to_u64().expect("below order");
                }
                Coordinate::Rational(r) => {
                    if !r.is_zero() {
                        return Err(KroneckerError::WrongFactor {
                            index: *index,
                            reason: "finite dual scan over a rational coordinate".into(),
                        });
                    }
                }
            }
        }
    }
    let t_scaled: Vec<u64> = targets
        .iter()
        .map(|t| {
            ((t.turns() * BigRational::from(BigInt::from(m))).to_integer())
                .to_u64()
                .expect("target below modulus")
        })
        .collect();
    // Contribution of one unit of k_α to a point value, mod m.
    let stride: Vec<u64> = moduli.iter().map(|(_, n)| m / n).collect();

    let mut assignment = vec![0u64; moduli.len()];
    let mut best: Option<(u64, Vec<u64>)> = None;
    let mut searched = 0u64;
    loop {
        searched += 1;
        let mut cur = 0u64;
        for (p, coord) in coords.iter().enumerate() {
            let mut val: u128 = 0;
            for a in 0..moduli.len() {
                val += coord[a] as u128 * assignment[a] as u128 * stride[a] as u128;
            }
            let pos = (val % m as u128) as u64;
            let d = pos.abs_diff(t_scaled[p]);
            let d = d.min(m - d);
            if d > cur {
                cur = d;
                if best.as_ref().is_some_and(|(b, _)| cur >= *b) {
                    break;
                }
            }
        }
        if best.as_ref().is_none_or(|(b, _)| cur < *b) {
            best = Some((cur, assignment.clone()));
        }
        // Mixed-radix increment.
        let mut pos = moduli.len();
        loop {
            if pos == 0 {
                let (dist, ks) = best.expect("at least one assignment");
                return Ok(DualScan {
                    searched,
                    min_max_turns: BigRational::new(BigInt::from(dist), BigInt::from(m)),
                    best_assignment: moduli
                        .iter()
                        .zip(ks)
                        .map(|((i, _), k)| (*i, k))
                        .collect(),
                });
            }
            pos -= 1;
            assignment[pos] += 1;
            if assignment[pos] < moduli[pos].1 {
                break;
            }
            assignment[pos] = 0;
        }
    }
}
