//! Constructive planning: an explicit fold sequence for any algebraic
//! integer.
//!
//! Starting from an adjacent pair of constructed points (two points one unit
//! apart on the real axis of the integer lattice), a fixed handful of
//! two-to-three-step recipes produces the adjacent pair translated left,
//! right, up or down. Composing those moves — vertical climb first, then a
//! horizontal walk — reaches any target integer in `O(|a| + |b|)` steps.
//!
//! Each emitted step records the expected intersection, computed from the
//! per-direction-pair [`case_formula`] table. [`replay`] re-executes the
//! steps through the generic intersection operator instead and cross-checks
//! every hint, so a trace is an independently auditable constructibility
//! certificate for its target.

use std::fmt;

use thiserror::Error;

use crate::intersect::{intersect, ParallelDirections};
use crate::quadfield::{FieldTag, QuadElem};
use crate::targets::{case_formula, direction_set, is_integer, ring_class, RingClassKind};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("target {0} is not an algebraic integer of its field")]
    NotAnInteger(String),
    #[error("invalid pair: {0}")]
    InvalidPair(String),
    #[error("hint mismatch at step {step}: expected {expected}, operator produced {actual}")]
    HintMismatch {
        step: usize,
        expected: String,
        actual: String,
    },
    #[error(transparent)]
    Parallel(#[from] ParallelDirections),
    #[error("invalid trace: {0}")]
    Invalid(String),
    #[error("trace parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A point operand in a trace: a seed or the result of an earlier step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointRef {
    /// `Seed(0)` is the point 0, `Seed(1)` is the point 1.
    Seed(u8),
    /// Result of step `j` (0-based).
    Step(usize),
}

impl fmt::Display for PointRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointRef::Seed(i) => write!(f, "seed:{i}"),
            PointRef::Step(j) => write!(f, "step:{j}"),
        }
    }
}

/// One intersection step: fold directions by index, operands by reference,
/// and the expected result for auditing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub u: usize,
    pub v: usize,
    pub p: PointRef,
    pub q: PointRef,
    pub result_hint: QuadElem,
}

/// A replayable construction of `target` from the seeds `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub tag: FieldTag,
    pub dirs: Vec<crate::quadfield::Direction>,
    pub steps: Vec<TraceStep>,
    pub target: QuadElem,
}

/// The four pair translations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Right,
    Left,
    Up,
    Down,
}

// Operand selector inside a move recipe.
#[derive(Clone, Copy)]
enum Sel {
    Base,
    Partner,
    Emitted(usize),
}

// (u, v, p, q) per step; which emitted step becomes the new pair.
struct Recipe {
    steps: &'static [(usize, usize, Sel, Sel)],
    new_base: Sel,
    new_partner: Sel,
}

// Direction indices: 2,3 mod 4 -> [1, sqrt(m), 1+sqrt(m)];
// 1 mod 4 -> [1, 1+sqrt(m), -1+sqrt(m)].
fn recipe(kind: RingClassKind, mv: Move) -> Recipe {
    use Sel::*;
    match kind {
        RingClassKind::TwoThreeMod4 => match mv {
            // n+k√m, n+1+k√m  ->  n+1+k√m, n+2+k√m
            Move::Right => Recipe {
                steps: &[
                    (2, 1, Base, Partner),
                    (0, 2, Emitted(0), Partner),
                    (1, 0, Emitted(1), Partner),
                ],
                new_base: Partner,
                new_partner: Emitted(2),
            },
            Move::Left => Recipe {
                steps: &[
                    (1, 2, Base, Partner),
                    (0, 2, Emitted(0), Base),
                    (1, 0, Emitted(1), Base),
                ],
                new_base: Emitted(2),
                new_partner: Base,
            },
            Move::Up => Recipe {
                steps: &[(2, 1, Base, Partner), (1, 0, Base, Emitted(0))],
                new_base: Emitted(1),
                new_partner: Emitted(0),
            },
            Move::Down => Recipe {
                steps: &[(1, 2, Base, Partner), (1, 0, Partner, Emitted(0))],
                new_base: Emitted(0),
                new_partner: Emitted(1),
            },
        },
        RingClassKind::OneMod4 => match mv {
            // (n+k√m)/2, (n+2+k√m)/2  ->  translated by the move; up/down
            // are diagonal half-steps and also shift the pair right by one
            // numerator unit.
            Move::Right => Recipe {
                steps: &[
                    (1, 2, Base, Partner),
                    (0, 1, Emitted(0), Partner),
                    (2, 0, Emitted(1), Partner),
                ],
                new_base: Partner,
                new_partner: Emitted(2),
            },
            Move::Left => Recipe {
                steps: &[
                    (1, 2, Base, Partner),
                    (0, 2, Emitted(0), Base),
                    (1, 0, Emitted(1), Base),
                ],
                new_base: Emitted(2),
                new_partner: Base,
            },
            Move::Up => Recipe {
                steps: &[(1, 2, Base, Partner), (0, 1, Emitted(0), Partner)],
                new_base: Emitted(0),
                new_partner: Emitted(1),
            },
            Move::Down => Recipe {
                steps: &[(2, 1, Base, Partner), (0, 2, Emitted(0), Partner)],
                new_base: Emitted(0),
                new_partner: Emitted(1),
            },
        },
    }
}

/// Grows a trace by applying pair moves. The pair invariant — both points
/// integral, partner = base + 1 — is checked on every move.
pub struct TraceBuilder {
    tag: FieldTag,
    kind: RingClassKind,
    dirs: Vec<crate::quadfield::Direction>,
    steps: Vec<TraceStep>,
    base: (PointRef, QuadElem),
    partner: (PointRef, QuadElem),
}

impl TraceBuilder {
    /// Start at the seed pair `(0, 1)`.
    pub fn new(tag: FieldTag) -> Self {
        TraceBuilder {
            tag,
            kind: ring_class(tag).kind,
            dirs: direction_set(tag),
            steps: Vec::new(),
            base: (PointRef::Seed(0), QuadElem::zero(tag)),
            partner: (PointRef::Seed(1), QuadElem::one(tag)),
        }
    }

    pub fn current_pair(&self) -> (&QuadElem, &QuadElem) {
        (&self.base.1, &self.partner.1)
    }

    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    pub fn move_right(&mut self) -> Result<(), TraceError> {
        self.apply(Move::Right).map(|_| ())
    }

    pub fn move_left(&mut self) -> Result<(), TraceError> {
        self.apply(Move::Left).map(|_| ())
    }

    pub fn move_up(&mut self) -> Result<(), TraceError> {
        self.apply(Move::Up).map(|_| ())
    }

    pub fn move_down(&mut self) -> Result<(), TraceError> {
        self.apply(Move::Down).map(|_| ())
    }

    /// Apply one pair move; returns the indices of the emitted steps.
    pub fn apply(&mut self, mv: Move) -> Result<std::ops::Range<usize>, TraceError> {
        self.check_pair()?;
        let r = recipe(self.kind, mv);
        let first = self.steps.len();
        let mut emitted: Vec<(PointRef, QuadElem)> = Vec::with_capacity(r.steps.len());
        for &(u, v, psel, qsel) in r.steps {
            let (pref, pval) = self.resolve(psel, &emitted);
            let (qref, qval) = self.resolve(qsel, &emitted);
            let hint = case_formula(self.tag, u, v, &pval, &qval)
                .expect("recipes use distinct direction indices");
            let idx = self.steps.len();
            self.steps.push(TraceStep {
                u,
                v,
                p: pref,
                q: qref,
                result_hint: hint.clone(),
            });
            emitted.push((PointRef::Step(idx), hint));
        }
        self.base = {
            let (r_, v_) = self.resolve(r.new_base, &emitted);
            (r_, v_)
        };
        self.partner = {
            let (r_, v_) = self.resolve(r.new_partner, &emitted);
            (r_, v_)
        };
        Ok(first..self.steps.len())
    }

    fn resolve(&self, sel: Sel, emitted: &[(PointRef, QuadElem)]) -> (PointRef, QuadElem) {
        match sel {
            Sel::Base => (self.base.0, self.base.1.clone()),
            Sel::Partner => (self.partner.0, self.partner.1.clone()),
            Sel::Emitted(i) => (emitted[i].0, emitted[i].1.clone()),
        }
    }

    fn check_pair(&self) -> Result<(), TraceError> {
        let (b, p) = (&self.base.1, &self.partner.1);
        if !is_integer(b) || !is_integer(p) {
            return Err(TraceError::InvalidPair(format!(
                "pair ({b}, {p}) is not integral"
            )));
        }
        if &(b + &QuadElem::one(self.tag)) != p {
            return Err(TraceError::InvalidPair(format!(
                "pair ({b}, {p}) is not adjacent"
            )));
        }
        Ok(())
    }

    pub fn finish(self, target: QuadElem) -> Trace {
        Trace {
            tag: self.tag,
            dirs: self.dirs,
            steps: self.steps,
            target,
        }
    }
}

/// Plan a construction of `target` from the seeds.
///
/// Route: vertical moves to the target's `sqrt(m)` level (diagonal
/// half-steps in the `1 mod 4` class), then horizontal moves to the real
/// coordinate. The trace is truncated at the first step that produces the
/// target, so seed targets give an empty trace.
pub fn plan(tag: FieldTag, target: &QuadElem) -> Result<Trace, TraceError> {
    if target.tag() != tag {
        return Err(TraceError::Invalid(format!(
            "target {target} does not belong to Q(sqrt({}))",
            tag.m()
        )));
    }
    if !is_integer(target) {
        return Err(TraceError::NotAnInteger(target.to_string()));
    }
    let mut builder = TraceBuilder::new(tag);
    if target == &QuadElem::zero(tag) || target == &QuadElem::one(tag) {
        return Ok(builder.finish(target.clone()));
    }
    let kind = builder.kind;
    let two = crate::quadfield::rat_int(2);

    // Lattice coordinates of the target and of the pair base point.
    // 2,3 mod 4: (n, k) with base = n + k*sqrt(m); 1 mod 4: base =
    // (n + k*sqrt(m))/2 and horizontal moves step n by 2.
    let (goal_n, goal_k) = match kind {
        RingClassKind::TwoThreeMod4 => (target.re().clone(), target.co().clone()),
        RingClassKind::OneMod4 => (target.re() * &two, target.co() * &two),
    };

    let step_emitted_target = |steps: &[TraceStep], from: usize| -> Option<usize> {
        steps[from..]
            .iter()
            .position(|s| &s.result_hint == target)
            .map(|off| from + off)
    };

    let apply = |builder: &mut TraceBuilder, mv: Move| -> Result<Option<usize>, TraceError> {
        let range = builder.apply(mv)?;
        Ok(step_emitted_target(builder.steps(), range.start))
    };

    let truncate_and_finish = |builder: TraceBuilder, at: usize| -> Trace {
        let mut steps = builder.steps.clone();
        steps.truncate(at + 1);
        Trace {
            tag,
            dirs: builder.dirs,
            steps,
            target: target.clone(),
        }
    };

    // Vertical climb.
    loop {
        let k = match kind {
            RingClassKind::TwoThreeMod4 => builder.base.1.co().clone(),
            RingClassKind::OneMod4 => builder.base.1.co() * &two,
        };
        let mv = if k < goal_k {
            Move::Up
        } else if k > goal_k {
            Move::Down
        } else {
            break;
        };
        if let Some(at) = apply(&mut builder, mv)? {
            return Ok(truncate_and_finish(builder, at));
        }
    }

    // Horizontal walk.
    loop {
        let n = match kind {
            RingClassKind::TwoThreeMod4 => builder.base.1.re().clone(),
            RingClassKind::OneMod4 => builder.base.1.re() * &two,
        };
        let mv = if n < goal_n {
            Move::Right
        } else if n > goal_n {
            Move::Left
        } else {
            break;
        };
        if let Some(at) = apply(&mut builder, mv)? {
            return Ok(truncate_and_finish(builder, at));
        }
    }

    // The pair base is now the target (reachable because vertical moves fix
    // parity: after |k| diagonal half-steps, n and the goal differ by an
    // even amount).
    debug_assert_eq!(&builder.base.1, target);
    Ok(builder.finish(target.clone()))
}

/// Re-execute a trace through the generic intersection operator, checking
/// every step against its hint; returns the final constructed point.
pub fn replay(trace: &Trace) -> Result<QuadElem, TraceError> {
    if trace.dirs.len() < 2 {
        return Err(TraceError::Invalid("need at least 2 directions".into()));
    }
    for d in &trace.dirs {
        if d.tag() != trace.tag {
            return Err(TraceError::Invalid(format!(
                "direction {d} belongs to a different field"
            )));
        }
    }
    let seeds = [QuadElem::zero(trace.tag), QuadElem::one(trace.tag)];
    let mut values: Vec<QuadElem> = Vec::with_capacity(trace.steps.len());
    for (i, s) in trace.steps.iter().enumerate() {
        let resolve = |r: PointRef| -> Result<QuadElem, TraceError> {
            match r {
                PointRef::Seed(k @ (0 | 1)) => Ok(seeds[k as usize].clone()),
                PointRef::Seed(k) => Err(TraceError::Invalid(format!("seed:{k} out of range"))),
                PointRef::Step(j) if j < i => Ok(values[j].clone()),
                PointRef::Step(j) => Err(TraceError::Invalid(format!(
                    "step {i} references step:{j} which is not earlier"
                ))),
            }
        };
        let (u, v) = (s.u, s.v);
        if u >= trace.dirs.len() || v >= trace.dirs.len() {
            return Err(TraceError::Invalid(format!(
                "step {i} references direction out of range"
            )));
        }
        let p = resolve(s.p)?;
        let q = resolve(s.q)?;
        let z = intersect(&trace.dirs[u], &trace.dirs[v], &p, &q)?;
        if z != s.result_hint {
            return Err(TraceError::HintMismatch {
                step: i,
                expected: s.result_hint.to_string(),
                actual: z.to_string(),
            });
        }
        values.push(z);
    }
    match values.last() {
        Some(z) => Ok(z.clone()),
        None => {
            if seeds.contains(&trace.target) {
                Ok(trace.target.clone())
            } else {
                Err(TraceError::Invalid(
                    "empty trace whose target is not a seed".into(),
                ))
            }
        }
    }
}

impl Trace {
    /// Line-oriented text form:
    ///
    /// ```text
    /// m=<int>
    /// dirs=<elem>,<elem>,...
    /// target=<elem>
    /// step <i>: u=<idx> v=<idx> p=<ref> q=<ref> hint=<elem>
    /// ```
    ///
    /// where `<ref>` is `seed:0`, `seed:1` or `step:<j>`. Round-trips
    /// exactly through [`Trace::parse_text`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("m={}\n", self.tag.m()));
        let dirs: Vec<String> = self.dirs.iter().map(|d| d.to_string()).collect();
        out.push_str(&format!("dirs={}\n", dirs.join(",")));
        out.push_str(&format!("target={}\n", self.target));
        for (i, s) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "step {i}: u={} v={} p={} q={} hint={}\n",
                s.u, s.v, s.p, s.q, s.result_hint
            ));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Trace, TraceError> {
        let err = |line: usize, msg: &str| TraceError::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let (ln, first) = lines.next().ok_or_else(|| err(0, "empty trace file"))?;
        let m: i64 = first
            .strip_prefix("m=")
            .ok_or_else(|| err(ln, "expected m=<int>"))?
            .parse()
            .map_err(|_| err(ln, "invalid m"))?;
        let tag = FieldTag::new(m).map_err(|e| err(ln, &e.to_string()))?;

        let (ln, dline) = lines.next().ok_or_else(|| err(1, "missing dirs="))?;
        let dirs_str = dline
            .strip_prefix("dirs=")
            .ok_or_else(|| err(ln, "expected dirs=<list>"))?;
        let mut dirs = Vec::new();
        for part in dirs_str.split(',') {
            let e = QuadElem::parse(part, tag).map_err(|e| err(ln, &e.to_string()))?;
            dirs.push(
                crate::quadfield::Direction::new(&e).map_err(|e| err(ln, &e.to_string()))?,
            );
        }

        let (ln, tline) = lines.next().ok_or_else(|| err(2, "missing target="))?;
        let target = QuadElem::parse(
            tline
                .strip_prefix("target=")
                .ok_or_else(|| err(ln, "expected target=<elem>"))?,
            tag,
        )
        .map_err(|e| err(ln, &e.to_string()))?;

        let parse_ref = |s: &str, ln: usize| -> Result<PointRef, TraceError> {
            if let Some(k) = s.strip_prefix("seed:") {
                let k: u8 = k.parse().map_err(|_| err(ln, "invalid seed index"))?;
                Ok(PointRef::Seed(k))
            } else if let Some(j) = s.strip_prefix("step:") {
                let j: usize = j.parse().map_err(|_| err(ln, "invalid step index"))?;
                Ok(PointRef::Step(j))
            } else {
                Err(err(ln, "expected seed:<i> or step:<j>"))
            }
        };

        let mut steps = Vec::new();
        for (ln, line) in lines {
            if line.is_empty() {
                continue;
            }
            let rest = line
                .strip_prefix("step ")
                .ok_or_else(|| err(ln, "expected step line"))?;
            let (idx, rest) = rest
                .split_once(": ")
                .ok_or_else(|| err(ln, "expected 'step <i>: '"))?;
            let idx: usize = idx.parse().map_err(|_| err(ln, "invalid step number"))?;
            if idx != steps.len() {
                return Err(err(ln, "step numbers must be consecutive"));
            }
            let mut fields = rest.split(' ');
            let mut field = |prefix: &str| -> Result<String, TraceError> {
                let f = fields.next().ok_or_else(|| err(ln, "too few fields"))?;
                f.strip_prefix(prefix)
                    .map(str::to_string)
                    .ok_or_else(|| err(ln, &format!("expected {prefix}...")))
            };
            let u: usize = field("u=")?.parse().map_err(|_| err(ln, "invalid u"))?;
            let v: usize = field("v=")?.parse().map_err(|_| err(ln, "invalid v"))?;
            let p = parse_ref(&field("p=")?, ln)?;
            let q = parse_ref(&field("q=")?, ln)?;
            let hint =
                QuadElem::parse(&field("hint=")?, tag).map_err(|e| err(ln, &e.to_string()))?;
            steps.push(TraceStep {
                u,
                v,
                p,
                q,
                result_hint: hint,
            });
        }
        Ok(Trace {
            tag,
            dirs,
            steps,
            target,
        })
    }
}
