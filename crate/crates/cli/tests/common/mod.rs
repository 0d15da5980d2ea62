//! Shared helpers for the acceptance suite: an exact-arithmetic convex-hull
//! membership oracle over the 16 deterministic joints, plus random input
//! generators whose values are dyadic so the float and rational pipelines
//! see identical numbers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use friendliness_core::behavior::Behavior;
use friendliness_core::lp::{MarginalConstraint, MarginalConstraintSet};

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The pair order used by the Fine constraint set: (a,b), (a,d), (c,b), (c,d)
/// as index pairs into a joint assignment (a, b, c, d).
const PAIRS: [(usize, usize); 4] = [(0, 1), (0, 3), (2, 1), (2, 3)];

/// Coordinates of one deterministic joint: for each constrained pair, the
/// indicator table of its cell, concatenated in constraint order.
fn vertex_coordinates(assignment: [usize; 4]) -> Vec<BigRational> {
    let mut coords = Vec::with_capacity(16);
    for (i, j) in PAIRS {
        for u in 0..2 {
            for v in 0..2 {
                coords.push(if assignment[i] == u && assignment[j] == v {
                    BigRational::one()
                } else {
                    BigRational::zero()
                });
            }
        }
    }
    coords
}

/// Exact hull membership via a rational phase-1 simplex with Bland's rule:
/// is the target an affine-nonnegative combination of the points?
fn exact_hull_membership(points: &[Vec<BigRational>], target: &[BigRational]) -> bool {
    let m = target.len() + 1;
    let n = points.len();
    let width = n + m + 1;
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for r in 0..m {
        let mut row = Vec::with_capacity(width);
        for p in points {
            row.push(if r < target.len() {
                p[r].clone()
            } else {
                BigRational::one()
            });
        }
        for k in 0..m {
            row.push(if k == r {
                BigRational::one()
            } else {
                BigRational::zero()
            });
        }
        row.push(if r < target.len() {
            target[r].clone()
        } else {
            BigRational::one()
        });
        tab.push(row);
    }
    let mut basis: Vec<usize> = (0..m).map(|r| n + r).collect();
    // Reduced-cost row for "minimize artificial sum", canonicalized against
    // the artificial starting basis: the sum of all constraint rows.
    let mut obj: Vec<BigRational> = vec![BigRational::zero(); width];
    for row in &tab {
        for (o, cell) in obj.iter_mut().zip(row) {
            *o += cell;
        }
    }
    for k in 0..m {
        obj[n + k] = BigRational::zero();
    }
    loop {
        let entering = (0..n + m).find(|&j| obj[j] > BigRational::zero());
        let Some(col) = entering else {
            return obj[width - 1].is_zero();
        };
        let mut leave: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for r in 0..m {
            if tab[r][col] > BigRational::zero() {
                let t = &tab[r][width - 1] / &tab[r][col];
                let better = match &best {
                    None => true,
                    Some(b) => t < *b || (t == *b && basis[r] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(t);
                    leave = Some(r);
                }
            }
        }
        let Some(row) = leave else {
            // Unbounded cannot happen in a phase-1 problem; treat as failure.
            panic!("phase-1 oracle became unbounded");
        };
        let pivot = tab[row][col].clone();
        for cell in tab[row].iter_mut() {
            *cell /= &pivot;
        }
        for r in 0..m {
            if r != row && !tab[r][col].is_zero() {
                let factor = tab[r][col].clone();
                for j in 0..width {
                    let delta = &factor * &tab[row][j];
                    tab[r][j] -= delta;
                }
            }
        }
        if !obj[col].is_zero() {
            let factor = obj[col].clone();
            for j in 0..width {
                let delta = &factor * &tab[row][j];
                obj[j] -= delta;
            }
        }
        basis[row] = col;
    }
}

/// Exact feasibility of a four-pair marginal set over binary (a, b, c, d),
/// with targets given as numerators over `den`.
pub fn oracle_fine_feasible(targets: &[[i64; 4]; 4], den: i64) -> bool {
    let mut points = Vec::with_capacity(16);
    for idx in 0..16 {
        let assignment = [idx >> 3 & 1, idx >> 2 & 1, idx >> 1 & 1, idx & 1];
        points.push(vertex_coordinates(assignment));
    }
    let mut target = Vec::with_capacity(16);
    for table in targets {
        for &cell in table {
            target.push(ratio(cell, den));
        }
    }
    exact_hull_membership(&points, &target)
}

/// Builds the float-side constraint set for the same targets; dyadic cells
/// convert to f64 exactly, so both solvers see identical inputs.
pub fn float_fine_set(targets: &[[i64; 4]; 4], den: i64) -> MarginalConstraintSet {
    let subsets = [["a", "b"], ["a", "d"], ["c", "b"], ["c", "d"]];
    let constraints = subsets
        .iter()
        .zip(targets)
        .map(|(subset, table)| MarginalConstraint {
            subset: subset.iter().map(|s| s.to_string()).collect(),
            target: table.iter().map(|&c| c as f64 / den as f64).collect(),
        })
        .collect();
    MarginalConstraintSet::new(
        vec![
            ("a".into(), 2),
            ("b".into(), 2),
            ("c".into(), 2),
            ("d".into(), 2),
        ],
        constraints,
    )
    .expect("generated tables are valid")
}

/// Four nonnegative integers summing to `total`, uniform over compositions.
fn random_composition<const N: usize>(rng: &mut ChaCha8Rng, total: i64) -> [i64; N] {
    let mut cuts: Vec<i64> = (0..N - 1).map(|_| rng.gen_range(0..=total)).collect();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(total);
    let mut parts = [0i64; N];
    for (i, part) in parts.iter_mut().enumerate() {
        *part = cuts[i + 1] - cuts[i];
    }
    parts
}

/// A random marginal set with denominator-256 cells. Even draws marginalize
/// a random joint (feasible by construction); odd draws use four independent
/// tables, which are usually jointly unrealizable.
pub fn random_dyadic_targets(rng: &mut ChaCha8Rng, make_feasible: bool) -> [[i64; 4]; 4] {
    const DEN: i64 = 256;
    if make_feasible {
        let joint: [i64; 16] = random_composition(rng, DEN);
        let mut targets = [[0i64; 4]; 4];
        for (idx, &mass) in joint.iter().enumerate() {
            let assignment = [idx >> 3 & 1, idx >> 2 & 1, idx >> 1 & 1, idx & 1];
            for (k, (i, j)) in PAIRS.iter().enumerate() {
                targets[k][assignment[*i] * 2 + assignment[*j]] += mass;
            }
        }
        targets
    } else {
        let mut targets = [[0i64; 4]; 4];
        for table in targets.iter_mut() {
            *table = random_composition(rng, DEN);
        }
        targets
    }
}

/// Random no-signalling 2×2×2×2 behavior; half the draws sit on extremal
/// correlators so CHSH violations appear often.
pub fn random_no_signalling(rng: &mut ChaCha8Rng) -> Behavior {
    let extremal = rng.gen_bool(0.5);
    let span = if extremal { 0.2 } else { 1.0 };
    let alpha: Vec<f64> = (0..2).map(|_| rng.gen_range(-span..span)).collect();
    let beta: Vec<f64> = (0..2).map(|_| rng.gen_range(-span..span)).collect();
    let mut table = Vec::with_capacity(4);
    for x in 0..2 {
        for y in 0..2 {
            let lo = (alpha[x] + beta[y]).abs() - 1.0;
            let hi = 1.0 - (alpha[x] - beta[y]).abs();
            let e = if extremal {
                if rng.gen_bool(0.5) {
                    hi
                } else {
                    lo
                }
            } else {
                rng.gen_range(lo..=hi)
            };
            let mut row = Vec::with_capacity(4);
            for a in 0..2 {
                for b in 0..2 {
                    let sa = if a == 0 { 1.0 } else { -1.0 };
                    let sb = if b == 0 { 1.0 } else { -1.0 };
                    row.push((1.0 + sa * alpha[x] + sb * beta[y] + sa * sb * e) / 4.0);
                }
            }
            table.push(row);
        }
    }
    Behavior::new(
        vec![("x".into(), 2), ("y".into(), 2)],
        vec![("a".into(), 2), ("b".into(), 2)],
        table,
    )
    .expect("parametrization stays in the simplex")
}
