//! The closed-form intersection of two folds.
//!
//! A fold is the line `L_u(p) = {p + r*u : r real}` through `p` with
//! direction `u`. For directions `u != v` the unique intersection of
//! `L_u(p)` and `L_v(q)` is
//!
//! ```text
//! I_{u,v}(p,q) = ([u,p]/[u,v]) * v + ([v,q]/[v,u]) * u
//! ```
//!
//! where `[x,y]` is the [`bracket`] form. Both coefficients are plain
//! rationals, so the whole computation stays inside `Q(sqrt(m))`. The result
//! is invariant under real rescaling of `u` and `v`, which is why primitive
//! integer direction vectors suffice.

use thiserror::Error;

use crate::quadfield::{bracket, Direction, QuadElem};

/// Two distinct canonical [`Direction`]s never intersect as lines only when
/// they are equal; this error surfaces that (or a tampered direction pair).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parallel directions: {u} and {v}")]
pub struct ParallelDirections {
    pub u: Direction,
    pub v: Direction,
}

/// The fold `L_u(p)`: the line through `through` with direction `dir`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    through: QuadElem,
    dir: Direction,
}

impl Line {
    pub fn new(through: QuadElem, dir: Direction) -> Self {
        assert_eq!(through.tag(), dir.tag(), "line point and direction tags differ");
        Line { through, dir }
    }

    pub fn through(&self) -> &QuadElem {
        &self.through
    }

    pub fn dir(&self) -> &Direction {
        &self.dir
    }

    /// `bracket(dir, through)`, constant along the line; together with the
    /// direction it identifies the line as a set.
    pub fn offset(&self) -> crate::quadfield::Rational {
        bracket(self.dir.rep(), &self.through)
    }
}

/// Whether two folds are the same set of points: equal directions and
/// collinear through-points.
pub fn same_line(a: &Line, b: &Line) -> bool {
    assert_eq!(a.through.tag(), b.through.tag(), "line tags differ");
    a.dir == b.dir && a.offset() == b.offset()
}

/// The unique intersection point of `L_u(p)` and `L_v(q)`.
///
/// Errors with [`ParallelDirections`] iff `u == v` (for canonical directions
/// in `Q(sqrt(m))`, distinct directions are never parallel). The result `z`
/// satisfies `bracket(u, z - p) = 0` and `bracket(v, z - q) = 0`.
pub fn intersect(
    u: &Direction,
    v: &Direction,
    p: &QuadElem,
    q: &QuadElem,
) -> Result<QuadElem, ParallelDirections> {
    let buv = bracket(u.rep(), v.rep());
    if buv == crate::quadfield::rat_int(0) {
        return Err(ParallelDirections {
            u: u.clone(),
            v: v.clone(),
        });
    }
    let r1 = bracket(u.rep(), p) / &buv;
    let r2 = bracket(v.rep(), q) / -buv; // [v,u] = -[u,v]
    Ok(v.rep().scale(&r1) + u.rep().scale(&r2))
}

/// [`intersect`] applied to two [`Line`]s.
pub fn intersect_lines(a: &Line, b: &Line) -> Result<QuadElem, ParallelDirections> {
    intersect(&a.dir, &b.dir, &a.through, &b.through)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::{rat, rat_int, FieldTag};
    use proptest::prelude::*;

    fn tag(m: i64) -> FieldTag {
        FieldTag::new(m).unwrap()
    }

    fn dir(a: i64, b: i64, t: FieldTag) -> Direction {
        Direction::new(&QuadElem::from_ints(a, b, t)).unwrap()
    }

    #[test]
    fn lines_through_same_point_meet_there() {
        let t = tag(-3);
        let p = QuadElem::new(rat(5, 7), rat(-2, 3), t);
        let z = intersect(&dir(1, 0, t), &dir(0, 1, t), &p, &p).unwrap();
        assert_eq!(z, p);
    }

    #[test]
    fn gaussian_axis_example() {
        // m=-1, u=1, v=i: horizontal through p meets vertical through q
        let t = tag(-1);
        let p = QuadElem::from_ints(2, 3, t);
        let q = QuadElem::from_ints(5, 7, t);
        let z = intersect(&dir(1, 0, t), &dir(0, 1, t), &p, &q).unwrap();
        assert_eq!(z, QuadElem::from_ints(5, 3, t));
    }

    #[test]
    fn diagonal_through_zero_meets_vertical_through_one() {
        // m=-1: direction 1+i through 0, direction i through 1
        let t = tag(-1);
        let z = intersect(
            &dir(1, 1, t),
            &dir(0, 1, t),
            &QuadElem::zero(t),
            &QuadElem::one(t),
        )
        .unwrap();
        assert_eq!(z, QuadElem::from_ints(1, 1, t));
    }

    #[test]
    fn equal_directions_error() {
        let t = tag(-2);
        let err = intersect(
            &dir(2, 2, t),
            &dir(1, 1, t),
            &QuadElem::zero(t),
            &QuadElem::one(t),
        )
        .unwrap_err();
        assert_eq!(err.u, dir(1, 1, t));
    }

    #[test]
    fn same_line_examples() {
        let t = tag(-1);
        let horiz = dir(1, 0, t);
        let diag = dir(1, 1, t);
        let l0 = Line::new(QuadElem::zero(t), horiz.clone());
        let l1 = Line::new(QuadElem::one(t), horiz.clone());
        assert!(same_line(&l0, &l1)); // both are the real axis
        let l2 = Line::new(QuadElem::sqrt_m(t), horiz);
        assert!(!same_line(&l0, &l2)); // parallel but distinct
        let d0 = Line::new(QuadElem::zero(t), diag.clone());
        let d1 = Line::new(QuadElem::from_ints(1, 1, t), diag);
        assert!(same_line(&d0, &d1));
    }

    // Exact unit elements w with w*conj(w) = 1, a few per field; rotation by
    // such a w maps folds to folds.
    fn units(m: i64) -> Vec<QuadElem> {
        let t = tag(m);
        let halves: &[(i64, i64, i64)] = match m {
            -1 => &[(3, 4, 5), (5, 12, 13)],
            -2 => &[(1, 2, 3), (7, 4, 9)],
            -3 => &[(1, 1, 2), (11, 5, 14)],
            -5 => &[(2, 1, 3), (1, 4, 9)],
            -6 => &[(5, 2, 7), (1, 2, 5)],
            -7 => &[(3, 1, 4), (1, 3, 8)],
            -10 => &[(9, 2, 11)],
            -11 => &[(5, 1, 6)],
            -15 => &[(1, 1, 4), (7, 1, 8)],
            _ => &[],
        };
        let mut out = vec![QuadElem::one(t), QuadElem::from_ints(-1, 0, t)];
        for &(a, b, c) in halves {
            out.push(QuadElem::new(rat(a, c), rat(b, c), t));
        }
        out
    }

    #[test]
    fn unit_lists_have_norm_one() {
        for m in [-1, -2, -3, -5, -6, -7, -10, -11, -15] {
            for w in units(m) {
                assert_eq!(&w * &w.conj(), QuadElem::one(tag(m)), "m={m} w={w}");
            }
        }
    }

    const TEST_FIELDS: [i64; 8] = [-1, -2, -3, -5, -6, -7, -10, -11];

    fn arb_field() -> impl Strategy<Value = i64> {
        proptest::sample::select(TEST_FIELDS.to_vec())
    }

    #[test]
    fn result_lies_on_both_lines() {
        // 1000 random exact instances per field
        for &m in &TEST_FIELDS {
            random_cases_in(m, 1000, |u, v, p, q| {
                let z = intersect(&u, &v, &p, &q).unwrap();
                assert_eq!(bracket(u.rep(), &(&z - &p)), rat_int(0));
                assert_eq!(bracket(v.rep(), &(&z - &q)), rat_int(0));
            });
        }
    }

    proptest! {
        #[test]
        fn symmetry(m in arb_field(), a in -20i64..20, b in -20i64..20, c in -20i64..20, d in -20i64..20, pr in -100i64..100, pc in -100i64..100, qr in -100i64..100, qc in -100i64..100) {
            prop_assume!((a, b) != (0, 0) && (c, d) != (0, 0));
            let t = tag(m);
            let (u, v) = (dir(a, b, t), dir(c, d, t));
            prop_assume!(u != v);
            let p = QuadElem::from_ints(pr, pc, t);
            let q = QuadElem::from_ints(qr, qc, t);
            prop_assert_eq!(
                intersect(&u, &v, &p, &q).unwrap(),
                intersect(&v, &u, &q, &p).unwrap()
            );
        }
    }

    // Deterministic random exact inputs for one field.
    fn random_cases_in(m: i64, count: usize, mut f: impl FnMut(Direction, Direction, QuadElem, QuadElem)) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x0f01d ^ m.unsigned_abs());
        let t = tag(m);
        let mut done = 0;
        while done < count {
            let (a, b) = (rng.gen_range(-9..=9i64), rng.gen_range(-9..=9i64));
            let (c, d) = (rng.gen_range(-9..=9i64), rng.gen_range(-9..=9i64));
            if (a, b) == (0, 0) || (c, d) == (0, 0) {
                continue;
            }
            let (u, v) = (dir(a, b, t), dir(c, d, t));
            if u == v {
                continue;
            }
            let mut r = |den: i64| rat(rng.gen_range(-60..=60i64), rng.gen_range(1..=den));
            let p = QuadElem::new(r(12), r(12), t);
            let q = QuadElem::new(r(12), r(12), t);
            f(u, v, p, q);
            done += 1;
        }
    }

    // 1000 instances spread across the test fields.
    fn random_cases(mut f: impl FnMut(Direction, Direction, QuadElem, QuadElem)) {
        for &m in &TEST_FIELDS {
            random_cases_in(m, 125, &mut f);
        }
    }

    #[test]
    fn reduction_identity() {
        random_cases(|u, v, p, q| {
            let zero = QuadElem::zero(p.tag());
            let whole = intersect(&u, &v, &p, &q).unwrap();
            let first = intersect(&u, &v, &p, &zero).unwrap();
            let second = intersect(&v, &u, &q, &zero).unwrap();
            assert_eq!(whole, &first + &second);
        });
    }

    #[test]
    fn linearity_identity() {
        random_cases(|u, v, p, q| {
            let zero = QuadElem::zero(p.tag());
            let sum = intersect(&u, &v, &(&p + &q), &zero).unwrap();
            let parts = &intersect(&u, &v, &p, &zero).unwrap() + &intersect(&u, &v, &q, &zero).unwrap();
            assert_eq!(sum, parts);
            let r = rat(7, 3);
            assert_eq!(
                intersect(&u, &v, &p.scale(&r), &zero).unwrap(),
                intersect(&u, &v, &p, &zero).unwrap().scale(&r)
            );
        });
    }

    #[test]
    fn projection_identity() {
        random_cases(|u, v, p, _q| {
            let zero = QuadElem::zero(p.tag());
            let z = intersect(&u, &v, &p, &zero).unwrap();
            // z lies on the line {r*v}
            assert_eq!(bracket(v.rep(), &z), rat_int(0));
        });
    }

    #[test]
    fn rotation_identity() {
        random_cases(|u, v, p, q| {
            let m = p.tag().m();
            for w in units(m) {
                let wu = Direction::new(&(&w * u.rep())).unwrap();
                let wv = Direction::new(&(&w * v.rep())).unwrap();
                let lhs = &w * &intersect(&u, &v, &p, &q).unwrap();
                let rhs = intersect(&wu, &wv, &(&w * &p), &(&w * &q)).unwrap();
                assert_eq!(lhs, rhs, "m={m} w={w}");
            }
        });
    }

    #[test]
    fn real_rescaling_leaves_result_unchanged() {
        random_cases(|u, v, p, q| {
            let t = p.tag();
            let z = intersect(&u, &v, &p, &q).unwrap();
            for (rn, rd, sn, sd) in [(3, 1, 5, 1), (-7, 2, 1, 3), (11, 5, -2, 7)] {
                let su = Direction::new(&u.rep().scale(&rat(rn, rd))).unwrap();
                let sv = Direction::new(&v.rep().scale(&rat(sn, sd))).unwrap();
                assert_eq!(intersect(&su, &sv, &p, &q).unwrap(), z, "m={}", t.m());
            }
        });
    }
}
