//! Generation-by-generation expansion of the constructed point set.
//!
//! One generation adds every intersection of two distinct folds through
//! points already in the set. A point's generation index is the first round
//! at which it becomes constructible — its construction distance from the
//! seeds. Expansion enumerates distinct folds (lines) rather than point
//! pairs; the two give identical results because every fold through a set
//! point is represented exactly once.
//!
//! The engine is deterministic: point sets iterate in canonical `(re, co)`
//! order, and the optional parallel path produces bit-identical results to
//! the sequential one.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::intersect::intersect;
use crate::quadfield::{bracket, parse_rational, Direction, FieldTag, QuadElem, Rational};

pub const DEFAULT_MAX_POINTS: usize = 200_000;
pub const DEFAULT_MAX_GENERATIONS: u32 = 6;

/// Minimum number of lines on one side of a direction pair before the
/// engine bothers to fan the row out across threads.
const PARALLEL_ROW_MIN: usize = 48;

#[derive(Debug, Error)]
pub enum ClosureError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("point budget exceeded: stopped at {} points", .partial.len())]
    BudgetExceeded {
        /// Everything constructed before the budget tripped.
        partial: PointSet,
    },
}

/// A closure run: field, fold directions, seeds and budgets.
#[derive(Debug, Clone)]
pub struct OrigamiConfig {
    pub tag: FieldTag,
    pub dirs: Vec<Direction>,
    pub seeds: Vec<QuadElem>,
    pub max_generations: u32,
    pub max_points: usize,
    /// Skip fold pairs whose intersections were all found in earlier rounds.
    /// Reaches identical point sets and generation indices (tested); off by
    /// default so the reference semantics is what runs.
    pub frontier_only: bool,
    /// Fan intersection rows out across threads. The merged result is
    /// bit-identical to the sequential path (tested).
    pub parallel: bool,
}

impl OrigamiConfig {
    /// Config with seeds `{0, 1}` and default budgets.
    pub fn new(tag: FieldTag, dirs: Vec<Direction>) -> Self {
        OrigamiConfig {
            tag,
            dirs,
            seeds: vec![QuadElem::zero(tag), QuadElem::one(tag)],
            max_generations: DEFAULT_MAX_GENERATIONS,
            max_points: DEFAULT_MAX_POINTS,
            frontier_only: false,
            parallel: true,
        }
    }

    pub fn validate(&self) -> Result<(), ClosureError> {
        let bad = |msg: String| Err(ClosureError::InvalidConfig(msg));
        if self.dirs.len() < 2 {
            return bad(format!("need at least 2 directions, got {}", self.dirs.len()));
        }
        for (i, d) in self.dirs.iter().enumerate() {
            if d.tag() != self.tag {
                return bad(format!("direction {d} belongs to a different field"));
            }
            if self.dirs[..i].contains(d) {
                return bad(format!("duplicate direction {d}"));
            }
        }
        if self.seeds.is_empty() {
            return bad("need at least one seed point".into());
        }
        for s in &self.seeds {
            if s.tag() != self.tag {
                return bad(format!("seed {s} belongs to a different field"));
            }
        }
        if self.max_points == 0 {
            return bad("max_points must be positive".into());
        }
        Ok(())
    }
}

/// A deduplicated set of constructed points with their generation indices.
///
/// Seeds are generation 0; every other point is the intersection of two
/// distinct folds through strictly earlier points. Iteration order is
/// canonical `(re, co)` order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PointSet {
    points: BTreeMap<QuadElem, u32>,
}

impl PointSet {
    /// Generation-0 set from (deduplicated) seeds.
    pub fn from_seeds(seeds: &[QuadElem]) -> Self {
        let mut points = BTreeMap::new();
        for s in seeds {
            points.insert(s.clone(), 0);
        }
        PointSet { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &QuadElem) -> bool {
        self.points.contains_key(p)
    }

    pub fn generation(&self, p: &QuadElem) -> Option<u32> {
        self.points.get(p).copied()
    }

    pub fn max_generation(&self) -> u32 {
        self.points.values().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&QuadElem, u32)> {
        self.points.iter().map(|(p, g)| (p, *g))
    }

    /// Count of points per generation index; the counts sum to `len()`.
    pub fn distance_histogram(&self) -> BTreeMap<u32, usize> {
        let mut h = BTreeMap::new();
        for g in self.points.values() {
            *h.entry(*g).or_insert(0usize) += 1;
        }
        h
    }

    /// One point per line: `re_num re_den co_num co_den generation`,
    /// tab-separated integers, LF line endings, canonical point order.
    pub fn write_tsv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (p, g) in self.iter() {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                p.re().numer(),
                p.re().denom(),
                p.co().numer(),
                p.co().denom(),
                g
            )?;
        }
        Ok(())
    }

    /// Parse the [`PointSet::write_tsv`] format. Lines starting with `#`
    /// (e.g. a truncation trailer) are ignored.
    pub fn parse_tsv(text: &str, tag: FieldTag) -> Result<Self, ClosureError> {
        let mut points = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let mut next = || {
                fields
                    .next()
                    .ok_or_else(|| ClosureError::InvalidConfig(format!("tsv line {}: too few fields", no + 1)))
            };
            let rn = next()?;
            let rd = next()?;
            let cn = next()?;
            let cd = next()?;
            let g = next()?;
            let rational = |n: &str, d: &str| {
                parse_rational(&format!("{n}/{d}"))
                    .map_err(|e| ClosureError::InvalidConfig(format!("tsv line {}: {e}", no + 1)))
            };
            let gen: u32 = g
                .parse()
                .map_err(|_| ClosureError::InvalidConfig(format!("tsv line {}: bad generation", no + 1)))?;
            points.insert(QuadElem::new(rational(rn, rd)?, rational(cn, cd)?, tag), gen);
        }
        Ok(PointSet { points })
    }

    fn insert(&mut self, p: QuadElem, g: u32) {
        self.points.insert(p, g);
    }
}

// One fold, keyed by (direction index, offset). The witness is any point on
// the line; the intersection value depends only on the line, not the
// witness. `birth` is the smallest generation of any point on the line.
struct FoldTable {
    by_dir: Vec<BTreeMap<Rational, (QuadElem, u32)>>,
}

impl FoldTable {
    fn build(ps: &PointSet, dirs: &[Direction]) -> Self {
        let mut by_dir = vec![BTreeMap::new(); dirs.len()];
        for (p, g) in ps.iter() {
            for (di, d) in dirs.iter().enumerate() {
                let off = bracket(d.rep(), p);
                by_dir[di]
                    .entry(off)
                    .and_modify(|e: &mut (QuadElem, u32)| e.1 = e.1.min(g))
                    .or_insert_with(|| (p.clone(), g));
            }
        }
        FoldTable { by_dir }
    }
}

/// One monotone step: everything in `ps` plus every intersection of two
/// distinct folds through points of `ps`. New points get generation
/// `ps.max_generation() + 1`. The result does not depend on enumeration
/// order; [`ClosureError::BudgetExceeded`] carries the partial set.
pub fn expand_generation(ps: &PointSet, cfg: &OrigamiConfig) -> Result<PointSet, ClosureError> {
    cfg.validate()?;
    if ps.is_empty() {
        return Err(ClosureError::InvalidConfig("point set is empty".into()));
    }
    let frontier = ps.max_generation();
    let next_gen = frontier + 1;
    let folds = FoldTable::build(ps, &cfg.dirs);

    let mut next = ps.clone();
    for i in 0..cfg.dirs.len() {
        for j in i + 1..cfg.dirs.len() {
            let (u, v) = (&cfg.dirs[i], &cfg.dirs[j]);
            let right: Vec<&(QuadElem, u32)> = folds.by_dir[j].values().collect();
            for (pw, pb) in folds.by_dir[i].values() {
                let keep = |qb: u32| !cfg.frontier_only || *pb == frontier || qb == frontier;
                // Distinct directions are never parallel, so intersections
                // always exist.
                let row: Vec<Option<QuadElem>> = if cfg.parallel && right.len() >= PARALLEL_ROW_MIN
                {
                    right
                        .par_iter()
                        .map(|(qw, qb)| {
                            keep(*qb).then(|| intersect(u, v, pw, qw).expect("distinct folds"))
                        })
                        .collect()
                } else {
                    right
                        .iter()
                        .map(|(qw, qb)| {
                            keep(*qb).then(|| intersect(u, v, pw, qw).expect("distinct folds"))
                        })
                        .collect()
                };
                for z in row.into_iter().flatten() {
                    if !next.contains(&z) {
                        if next.len() >= cfg.max_points {
                            return Err(ClosureError::BudgetExceeded { partial: next });
                        }
                        next.insert(z, next_gen);
                    }
                }
            }
        }
    }
    Ok(next)
}

/// Iterate [`expand_generation`] until a fixed point or `max_generations`.
/// Deterministic for a given config.
pub fn run_closure(cfg: &OrigamiConfig) -> Result<PointSet, ClosureError> {
    cfg.validate()?;
    let ps = PointSet::from_seeds(&cfg.seeds);
    if ps.len() > cfg.max_points {
        return Err(ClosureError::BudgetExceeded { partial: ps });
    }
    let mut ps = ps;
    for _ in 0..cfg.max_generations {
        let next = expand_generation(&ps, cfg)?;
        if next.len() == ps.len() {
            break; // fixed point
        }
        ps = next;
    }
    Ok(ps)
}

/// Free-function form of [`PointSet::distance_histogram`].
pub fn distance_histogram(ps: &PointSet) -> BTreeMap<u32, usize> {
    ps.distance_histogram()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::{direction_set, is_integer};

    fn tag(m: i64) -> FieldTag {
        FieldTag::new(m).unwrap()
    }

    fn gaussian_cfg() -> OrigamiConfig {
        let t = tag(-1);
        OrigamiConfig::new(t, direction_set(t))
    }

    #[test]
    fn gaussian_generation_one_is_the_hand_enumeration() {
        let cfg = gaussian_cfg();
        let t = cfg.tag;
        let ps = PointSet::from_seeds(&cfg.seeds);
        let g1 = expand_generation(&ps, &cfg).unwrap();
        let expect = [
            (QuadElem::from_ints(0, 0, t), 0),
            (QuadElem::from_ints(1, 0, t), 0),
            (QuadElem::from_ints(1, 1, t), 1),
            (QuadElem::from_ints(0, -1, t), 1),
        ];
        assert_eq!(g1.len(), 4);
        for (p, g) in &expect {
            assert_eq!(g1.generation(p), Some(*g), "{p}");
        }
        assert_eq!(
            g1.distance_histogram(),
            BTreeMap::from([(0u32, 2usize), (1, 2)])
        );
    }

    #[test]
    fn single_seed_is_a_fixed_point() {
        let t = tag(-1);
        let mut cfg = gaussian_cfg();
        cfg.seeds = vec![QuadElem::zero(t)];
        let ps = PointSet::from_seeds(&cfg.seeds);
        let next = expand_generation(&ps, &cfg).unwrap();
        assert_eq!(next.len(), 1);
        let full = run_closure(&cfg).unwrap();
        assert_eq!(full.len(), 1);
    }

    #[test]
    fn two_directions_from_seeds_add_nothing() {
        // With only horizontal and vertical folds, the line through 0 and 1
        // is a single horizontal line, so no intersection is new.
        let t = tag(-1);
        let mut cfg = gaussian_cfg();
        cfg.dirs = vec![
            Direction::new(&QuadElem::from_ints(1, 0, t)).unwrap(),
            Direction::new(&QuadElem::from_ints(0, 1, t)).unwrap(),
        ];
        let full = run_closure(&cfg).unwrap();
        assert_eq!(full.len(), 2);
        assert_eq!(full.max_generation(), 0);
    }

    #[test]
    fn zero_generations_returns_seeds_only() {
        let mut cfg = gaussian_cfg();
        cfg.max_generations = 0;
        let ps = run_closure(&cfg).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.distance_histogram(), BTreeMap::from([(0u32, 2usize)]));
    }

    #[test]
    fn expansion_is_monotone_and_order_independent() {
        let mut cfg = gaussian_cfg();
        cfg.max_generations = 3;
        let base = run_closure(&cfg).unwrap();
        for (p, _) in PointSet::from_seeds(&cfg.seeds).iter() {
            assert!(base.contains(p));
        }
        // permuting directions and seeds changes nothing
        let mut permuted = cfg.clone();
        permuted.dirs.rotate_left(1);
        permuted.seeds.rotate_left(1);
        assert_eq!(run_closure(&permuted).unwrap(), base);
        // expand is monotone
        let one = expand_generation(&PointSet::from_seeds(&cfg.seeds), &cfg).unwrap();
        let two = expand_generation(&one, &cfg).unwrap();
        for (p, _) in one.iter() {
            assert!(two.contains(p));
        }
    }

    #[test]
    fn parallel_and_frontier_variants_are_bit_identical() {
        for m in [-1, -3] {
            let t = tag(m);
            let mut cfg = OrigamiConfig::new(t, direction_set(t));
            cfg.max_generations = 4;
            cfg.parallel = false;
            cfg.frontier_only = false;
            let reference = run_closure(&cfg).unwrap();

            for (parallel, frontier) in [(true, false), (false, true), (true, true)] {
                let mut c = cfg.clone();
                c.parallel = parallel;
                c.frontier_only = frontier;
                assert_eq!(
                    run_closure(&c).unwrap(),
                    reference,
                    "m={m} parallel={parallel} frontier={frontier}"
                );
            }
        }
    }

    #[test]
    fn closure_output_is_integral() {
        for m in [-1, -3] {
            let t = tag(m);
            let mut cfg = OrigamiConfig::new(t, direction_set(t));
            cfg.max_generations = 4;
            let ps = run_closure(&cfg).unwrap();
            assert!(ps.len() > 2);
            for (p, _) in ps.iter() {
                assert!(is_integer(p), "m={m} point {p}");
            }
        }
    }

    #[test]
    fn budget_exceeded_carries_partial_set() {
        let mut cfg = gaussian_cfg();
        cfg.max_points = 5;
        cfg.max_generations = 5;
        match run_closure(&cfg) {
            Err(ClosureError::BudgetExceeded { partial }) => {
                assert_eq!(partial.len(), 5);
                for (p, _) in partial.iter() {
                    assert!(is_integer(p));
                }
            }
            other => panic!("expected BudgetExceeded, got {other:?}"),
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let t = tag(-1);
        let mut cfg = gaussian_cfg();
        cfg.dirs.truncate(1);
        assert!(matches!(
            run_closure(&cfg),
            Err(ClosureError::InvalidConfig(_))
        ));
        let mut cfg = gaussian_cfg();
        cfg.dirs.push(cfg.dirs[0].clone());
        assert!(matches!(
            run_closure(&cfg),
            Err(ClosureError::InvalidConfig(_))
        ));
        let mut cfg = gaussian_cfg();
        cfg.seeds = vec![QuadElem::zero(tag(-2))];
        assert!(matches!(
            run_closure(&cfg),
            Err(ClosureError::InvalidConfig(_))
        ));
        let _ = t;
    }

    #[test]
    fn tsv_round_trips() {
        let mut cfg = gaussian_cfg();
        cfg.max_generations = 2;
        let ps = run_closure(&cfg).unwrap();
        let mut buf = Vec::new();
        ps.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.ends_with('\n') && !text.contains('\r'));
        let back = PointSet::parse_tsv(&text, cfg.tag).unwrap();
        assert_eq!(back, ps);
        // trailer comments are ignored
        let with_trailer = format!("{text}# truncated: point budget exceeded\n");
        assert_eq!(PointSet::parse_tsv(&with_trailer, cfg.tag).unwrap(), ps);
    }
}
