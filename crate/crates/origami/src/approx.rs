//! Floating-point construction engine for arbitrary angle sets.
//!
//! The exact modules only represent directions that live inside
//! `Q(sqrt(m))`. Cyclotomic angle sets (and anything else) run here instead,
//! with the same generational semantics as the exact engine but
//! epsilon-based deduplication. This module is explicitly non-authoritative:
//! every claim that can be made exactly is made by the exact modules, and
//! the tolerances below are desk-scale heuristics, not robust geometry.

use std::collections::HashMap;
use std::io::{self, Write};

use thiserror::Error;

use crate::quadfield::FieldTag;

/// Default point/line deduplication radius.
pub const DEFAULT_DEDUP_EPSILON: f64 = 1e-8;
/// Default tolerance when matching constructed points against a lattice.
pub const DEFAULT_MATCH_EPSILON: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ApproxError {
    #[error("angles {a1} and {a2} are parallel within tolerance")]
    NearParallel { a1: f64, a2: f64 },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("point budget exceeded: stopped at {} points", .partial.len())]
    BudgetExceeded { partial: ApproxRun },
}

/// A point of the plane in floating-point coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxPoint {
    pub x: f64,
    pub y: f64,
}

impl ApproxPoint {
    pub fn new(x: f64, y: f64) -> Self {
        ApproxPoint { x, y }
    }

    pub fn dist(&self, other: &ApproxPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// An approximate closure run: angles (mod pi), seeds, budgets, tolerances.
#[derive(Debug, Clone)]
pub struct ApproxConfig {
    /// Fold angles, as representatives in `[0, pi)`.
    pub angles: Vec<f64>,
    pub seeds: Vec<ApproxPoint>,
    pub generations: u32,
    pub max_points: usize,
    pub dedup_epsilon: f64,
    pub match_epsilon: f64,
}

impl ApproxConfig {
    pub fn new(angles: Vec<f64>) -> Self {
        ApproxConfig {
            angles,
            seeds: vec![ApproxPoint::new(0.0, 0.0), ApproxPoint::new(1.0, 0.0)],
            generations: 4,
            max_points: crate::closure::DEFAULT_MAX_POINTS,
            dedup_epsilon: DEFAULT_DEDUP_EPSILON,
            match_epsilon: DEFAULT_MATCH_EPSILON,
        }
    }

    pub fn validate(&self) -> Result<(), ApproxError> {
        let bad = |msg: String| Err(ApproxError::InvalidConfig(msg));
        if self.angles.len() < 2 {
            return bad(format!("need at least 2 angles, got {}", self.angles.len()));
        }
        for &a in &self.angles {
            if !a.is_finite() || !(0.0..std::f64::consts::PI).contains(&a) {
                return bad(format!("angle {a} is not in [0, pi)"));
            }
        }
        for (i, &a) in self.angles.iter().enumerate() {
            for &b in &self.angles[..i] {
                if (a - b).sin().abs() <= self.dedup_epsilon {
                    return bad(format!("angles {b} and {a} coincide mod pi"));
                }
            }
        }
        if self.seeds.is_empty() {
            return bad("need at least one seed".into());
        }
        if self.seeds.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return bad("seeds must be finite".into());
        }
        if self.max_points == 0 || self.dedup_epsilon <= 0.0 || self.match_epsilon <= 0.0 {
            return bad("budgets and tolerances must be positive".into());
        }
        Ok(())
    }
}

/// Reduce an arbitrary angle to its fold representative in `[0, pi)`.
pub fn normalize_angle(a: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let mut r = a % pi;
    if r < 0.0 {
        r += pi;
    }
    // r == pi can survive rounding of tiny negatives
    if r >= pi {
        r = 0.0;
    }
    r
}

/// Fold angles of the exact theorem direction set for `Q(sqrt(m))`, for
/// exact/approx comparisons.
pub fn theorem_angles(tag: FieldTag) -> Vec<f64> {
    crate::targets::direction_set(tag)
        .iter()
        .map(|d| {
            let (x, y) = d.rep().to_xy();
            normalize_angle(y.atan2(x))
        })
        .collect()
}

/// Intersection of the folds through `p` at angle `a1` and through `q` at
/// angle `a2`, by the same closed form as the exact operator.
pub fn approx_intersect(
    a1: f64,
    a2: f64,
    p: ApproxPoint,
    q: ApproxPoint,
) -> Result<ApproxPoint, ApproxError> {
    if (a1 - a2).sin().abs() <= DEFAULT_DEDUP_EPSILON {
        return Err(ApproxError::NearParallel { a1, a2 });
    }
    let u = (a1.cos(), a1.sin());
    let v = (a2.cos(), a2.sin());
    let cross = |a: (f64, f64), b: (f64, f64)| a.0 * b.1 - a.1 * b.0;
    let cuv = cross(u, v);
    let r1 = cross(u, (p.x, p.y)) / cuv;
    let r2 = cross(v, (q.x, q.y)) / -cuv;
    Ok(ApproxPoint::new(r1 * v.0 + r2 * u.0, r1 * v.1 + r2 * u.1))
}

/// Result of [`run_approx`]: points in insertion order with their
/// generation indices.
#[derive(Debug, Clone, Default)]
pub struct ApproxRun {
    points: Vec<ApproxPoint>,
    gens: Vec<u32>,
}

impl ApproxRun {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ApproxPoint] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = (ApproxPoint, u32)> + '_ {
        self.points.iter().copied().zip(self.gens.iter().copied())
    }

    pub fn max_generation(&self) -> u32 {
        self.gens.iter().copied().max().unwrap_or(0)
    }

    /// `x y generation`, tab-separated, 17 significant digits, LF endings.
    pub fn write_tsv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (p, g) in self.iter() {
            writeln!(w, "{:.16e}\t{:.16e}\t{}", p.x, p.y, g)?;
        }
        Ok(())
    }
}

// Epsilon dedup via spatial hashing: cell size = epsilon, probe the 3x3
// neighborhood.
struct Grid {
    eps: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl Grid {
    fn new(eps: f64) -> Self {
        Grid {
            eps,
            cells: HashMap::new(),
        }
    }

    fn key(&self, p: &ApproxPoint) -> (i64, i64) {
        ((p.x / self.eps).floor() as i64, (p.y / self.eps).floor() as i64)
    }

    fn contains(&self, p: &ApproxPoint, pts: &[ApproxPoint]) -> bool {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = self.cells.get(&(kx + dx, ky + dy)) {
                    if bucket.iter().any(|&i| pts[i].dist(p) <= self.eps) {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn insert(&mut self, p: &ApproxPoint, idx: usize) {
        self.cells.entry(self.key(p)).or_default().push(idx);
    }
}

/// Generational closure over floating-point folds; same semantics as the
/// exact engine, with epsilon deduplication.
pub fn run_approx(cfg: &ApproxConfig) -> Result<ApproxRun, ApproxError> {
    cfg.validate()?;
    let mut run = ApproxRun::default();
    let mut grid = Grid::new(cfg.dedup_epsilon);
    for s in &cfg.seeds {
        if !grid.contains(s, &run.points) {
            grid.insert(s, run.points.len());
            run.points.push(*s);
            run.gens.push(0);
        }
    }
    for gen in 1..=cfg.generations {
        let n = run.points.len();
        let mut added = false;
        for i in 0..cfg.angles.len() {
            for j in i + 1..cfg.angles.len() {
                let (a1, a2) = (cfg.angles[i], cfg.angles[j]);
                for pi in 0..n {
                    for qi in 0..n {
                        let z = approx_intersect(a1, a2, run.points[pi], run.points[qi])
                            .expect("validated angles are pairwise non-parallel");
                        if !grid.contains(&z, &run.points) {
                            if run.points.len() >= cfg.max_points {
                                return Err(ApproxError::BudgetExceeded { partial: run });
                            }
                            grid.insert(&z, run.points.len());
                            run.points.push(z);
                            run.gens.push(gen);
                            added = true;
                        }
                    }
                }
            }
        }
        if !added {
            break; // fixed point
        }
    }
    Ok(run)
}
