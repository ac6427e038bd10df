//! What the construction must hit: the ring of integers of `Q(sqrt(m))`.
//!
//! For squarefree `m < 0` the algebraic integers are `{a + b*sqrt(m)}` with
//! integer `a, b` when `m ≡ 2, 3 (mod 4)`, and `{(a + b*sqrt(m))/2}` with
//! integer `a ≡ b (mod 2)` when `m ≡ 1 (mod 4)`. The congruence uses the
//! mathematical (non-negative) modulus, so e.g. `-5 ≡ 3` and `-3 ≡ 1`.
//!
//! [`direction_set`] returns the three fold directions that generate the
//! ring from the seeds `{0, 1}`, and [`case_formula`] tabulates the closed
//! form of each of the six ordered direction-pair intersections per class.
//! The table exists for cross-checking and planning; the closure engine goes
//! through the generic operator only.

use crate::quadfield::{rat, rat_int, Direction, FieldTag, QuadElem, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingClassKind {
    /// `m ≡ 2, 3 (mod 4)`: integer lattice `Z[sqrt(m)]`.
    TwoThreeMod4,
    /// `m ≡ 1 (mod 4)`: half-integer lattice with matching parities.
    OneMod4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RingClass {
    pub tag: FieldTag,
    pub kind: RingClassKind,
}

/// Classify `Q(sqrt(m))` by `m mod 4` (mathematical modulus; `m` squarefree
/// is never `0 mod 4`).
pub fn ring_class(tag: FieldTag) -> RingClass {
    let kind = match tag.m().rem_euclid(4) {
        1 => RingClassKind::OneMod4,
        2 | 3 => RingClassKind::TwoThreeMod4,
        r => unreachable!("squarefree m cannot be {r} mod 4"),
    };
    RingClass { tag, kind }
}

/// Is `z` an algebraic integer of its field?
pub fn is_integer(z: &QuadElem) -> bool {
    match ring_class(z.tag()).kind {
        RingClassKind::TwoThreeMod4 => z.re().is_integer() && z.co().is_integer(),
        RingClassKind::OneMod4 => {
            let a = z.re() * rat_int(2);
            let b = z.co() * rat_int(2);
            if !a.is_integer() || !b.is_integer() {
                return false;
            }
            // equal parity
            ((a - b) / rat_int(2)).is_integer()
        }
    }
}

/// The three fold directions that generate the ring of integers from
/// `{0, 1}`, in a fixed order.
///
/// For `m ≡ 2, 3 (mod 4)`: `[1, sqrt(m), 1 + sqrt(m)]` (the vertical
/// direction realizes `i` up to real scale, `1 + sqrt(m)` realizes the
/// diagonal `e^{i*theta}` with `theta = arg(1 + sqrt(m))`).
/// For `m ≡ 1 (mod 4)`: `[1, 1 + sqrt(m), -1 + sqrt(m)]` (the mirrored
/// diagonal realizes `e^{i*(pi - theta)}`).
pub fn direction_set(tag: FieldTag) -> Vec<Direction> {
    let gens: [QuadElem; 3] = match ring_class(tag).kind {
        RingClassKind::TwoThreeMod4 => [
            QuadElem::from_ints(1, 0, tag),
            QuadElem::from_ints(0, 1, tag),
            QuadElem::from_ints(1, 1, tag),
        ],
        RingClassKind::OneMod4 => [
            QuadElem::from_ints(1, 0, tag),
            QuadElem::from_ints(1, 1, tag),
            QuadElem::from_ints(-1, 1, tag),
        ],
    };
    gens.iter()
        .map(|g| Direction::new(g).expect("nonzero generator"))
        .collect()
}

/// Closed-form intersection for the ordered direction pair `(u, v)` indexed
/// into [`direction_set`], as a direct coefficient formula.
///
/// Writing `p = a + b*sqrt(m)`, `q = c + d*sqrt(m)` for the `2,3 mod 4`
/// class and `p = (a + b*sqrt(m))/2`, `q = (c + d*sqrt(m))/2` for the
/// `1 mod 4` class, the six cases per class are tabulated below. `None` for
/// `u == v` or out-of-range indices. The formulas are linear identities, so
/// they hold for arbitrary rational `a..d`, not just integral points.
pub fn case_formula(
    tag: FieldTag,
    u: usize,
    v: usize,
    p: &QuadElem,
    q: &QuadElem,
) -> Option<QuadElem> {
    if u == v || u > 2 || v > 2 {
        return None;
    }
    let two = rat_int(2);
    let make = |re: Rational, co: Rational| Some(QuadElem::new(re, co, tag));
    match ring_class(tag).kind {
        RingClassKind::TwoThreeMod4 => {
            // dirs: 0 = 1, 1 = sqrt(m), 2 = 1 + sqrt(m)
            let (a, b) = (p.re(), p.co());
            let (c, d) = (q.re(), q.co());
            match (u, v) {
                (0, 1) => make(c.clone(), b.clone()),
                (0, 2) => make(b + c - d, b.clone()),
                (1, 0) => make(a.clone(), d.clone()),
                (1, 2) => make(a.clone(), a - c + d),
                (2, 0) => make(a - b + d, d.clone()),
                (2, 1) => make(c.clone(), b + c - a),
                _ => unreachable!(),
            }
        }
        RingClassKind::OneMod4 => {
            // dirs: 0 = 1, 1 = 1 + sqrt(m), 2 = -1 + sqrt(m)
            let (a, b) = (p.re() * &two, p.co() * &two);
            let (c, d) = (q.re() * &two, q.co() * &two);
            match (u, v) {
                (0, 1) => make((&b + &c - &d) / &two, b / &two),
                (0, 2) => make((&c + &d - &b) / &two, b / &two),
                (1, 0) => make((&a - &b + &d) / &two, d / &two),
                (1, 2) => make(
                    (&a - &b + &c + &d) / (&two * &two),
                    (&b - &a + &c + &d) / (&two * &two),
                ),
                (2, 0) => make((&a + &b - &d) / &two, d / &two),
                (2, 1) => make(
                    (&a + &b + &c - &d) / (&two * &two),
                    (&a + &b - &c + &d) / (&two * &two),
                ),
                _ => unreachable!(),
            }
        }
    }
}

/// Draw a uniformly random algebraic integer of the field with coefficients
/// bounded by `bound` (on `a, b` in the class-appropriate parametrization).
pub fn random_integer<R: rand::Rng>(rng: &mut R, tag: FieldTag, bound: i64) -> QuadElem {
    match ring_class(tag).kind {
        RingClassKind::TwoThreeMod4 => QuadElem::from_ints(
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
            tag,
        ),
        RingClassKind::OneMod4 => loop {
            let a = rng.gen_range(-bound..=bound);
            let b = rng.gen_range(-bound..=bound);
            if (a - b) % 2 == 0 {
                return QuadElem::new(rat(a, 2), rat(b, 2), tag);
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersect::intersect;
    use rand::SeedableRng;

    fn tag(m: i64) -> FieldTag {
        FieldTag::new(m).unwrap()
    }

    #[test]
    fn classification_uses_mathematical_modulus() {
        assert_eq!(ring_class(tag(-1)).kind, RingClassKind::TwoThreeMod4); // -1 ≡ 3
        assert_eq!(ring_class(tag(-3)).kind, RingClassKind::OneMod4);
        assert_eq!(ring_class(tag(-6)).kind, RingClassKind::TwoThreeMod4); // -6 ≡ 2
        assert_eq!(ring_class(tag(-5)).kind, RingClassKind::TwoThreeMod4); // -5 ≡ 3
        assert_eq!(ring_class(tag(-7)).kind, RingClassKind::OneMod4);
        assert_eq!(ring_class(tag(-15)).kind, RingClassKind::OneMod4);
    }

    #[test]
    fn membership_examples() {
        let t5 = tag(-5);
        assert!(is_integer(&QuadElem::from_ints(2, 3, t5)));
        assert!(!is_integer(&QuadElem::new(rat(1, 2), rat_int(0), t5)));
        let t3 = tag(-3);
        assert!(is_integer(&QuadElem::from_half_ints(1, 1, t3)));
        assert!(!is_integer(&QuadElem::new(rat(1, 2), rat_int(0), t3)));
        assert!(is_integer(&QuadElem::from_ints(3, 2, t3)));
        assert!(!is_integer(&QuadElem::new(rat(1, 3), rat(1, 3), t3)));
    }

    #[test]
    fn direction_set_examples() {
        let t = tag(-1);
        let dirs = direction_set(t);
        assert_eq!(dirs[0].rep(), &QuadElem::from_ints(1, 0, t));
        assert_eq!(dirs[1].rep(), &QuadElem::from_ints(0, 1, t));
        assert_eq!(dirs[2].rep(), &QuadElem::from_ints(1, 1, t));

        let t = tag(-3);
        let dirs = direction_set(t);
        assert_eq!(dirs[0].rep(), &QuadElem::from_ints(1, 0, t));
        assert_eq!(dirs[1].rep(), &QuadElem::from_ints(1, 1, t));
        assert_eq!(dirs[2].rep(), &QuadElem::from_ints(-1, 1, t));

        for m in [-1, -2, -3, -5, -6, -7, -11, -15] {
            let dirs = direction_set(tag(m));
            assert_eq!(dirs.len(), 3);
            assert!(dirs[0] != dirs[1] && dirs[0] != dirs[2] && dirs[1] != dirs[2]);
        }
    }

    #[test]
    fn ring_closed_under_arithmetic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for m in [-1, -2, -5, -6, -3, -7, -11, -15] {
            let t = tag(m);
            for _ in 0..500 {
                let x = random_integer(&mut rng, t, 30);
                let y = random_integer(&mut rng, t, 30);
                assert!(is_integer(&(&x + &y)), "add m={m} x={x} y={y}");
                assert!(is_integer(&(&x - &y)), "sub m={m} x={x} y={y}");
                assert!(is_integer(&(&x * &y)), "mul m={m} x={x} y={y}");
            }
        }
    }

    #[test]
    fn case_formulas_match_generic_operator() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for m in [-1, -2, -5, -6, -3, -7, -11, -15] {
            let t = tag(m);
            let dirs = direction_set(t);
            for _ in 0..200 {
                let p = random_integer(&mut rng, t, 50);
                let q = random_integer(&mut rng, t, 50);
                for u in 0..3 {
                    for v in 0..3 {
                        if u == v {
                            assert!(case_formula(t, u, v, &p, &q).is_none());
                            continue;
                        }
                        let from_table = case_formula(t, u, v, &p, &q).unwrap();
                        let from_operator = intersect(&dirs[u], &dirs[v], &p, &q).unwrap();
                        assert_eq!(from_table, from_operator, "m={m} u={u} v={v} p={p} q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn intersections_of_integral_points_stay_integral() {
        // closure of the ring under every direction-pair intersection
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for m in [-1, -2, -5, -6, -3, -7, -11, -15] {
            let t = tag(m);
            let dirs = direction_set(t);
            for _ in 0..1000 {
                let p = random_integer(&mut rng, t, 100);
                let q = random_integer(&mut rng, t, 100);
                for u in 0..3 {
                    for v in 0..3 {
                        if u == v {
                            continue;
                        }
                        let z = intersect(&dirs[u], &dirs[v], &p, &q).unwrap();
                        assert!(is_integer(&z), "m={m} u={u} v={v} p={p} q={q} z={z}");
                    }
                }
            }
        }
    }

    #[test]
    fn directions_are_exact() {
        for m in [-1, -2, -5, -6, -3, -7, -11, -15] {
            for d in direction_set(tag(m)) {
                assert!(d.rep().re().is_integer() && d.rep().co().is_integer());
            }
        }
    }
}
