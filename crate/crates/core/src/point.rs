//! Exact bi-infinite points of the shift space: sequences that are
//! eventually periodic in both directions, stored as (left cycle, core,
//! right cycle, origin) and kept in a canonical form that makes equality,
//! the shift map, and the base metric decidable.
//!
//! Arbitrary points of the shift space are not representable; eventually
//! periodic points are exactly the closure of what periodic-orbit and
//! regular-part computations need.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// A bi-infinite admissible sequence, eventually periodic both ways.
///
/// Layout coordinates: `core` occupies positions `0..core.len()`, the left
/// cycle repeats into the past ending at position `-1`, the right cycle
/// repeats into the future starting at `core.len()`. `origin` is the layout
/// position of coordinate 0, so coordinate `n` reads layout `origin + n`.
///
/// Construction canonicalizes: cycles are primitive, the core is minimal
/// (periodicity extended greedily into it from both sides), and purely
/// periodic points are re-rooted at coordinate 0. Two points are equal as
/// sequences iff their canonical fields coincide, so `Eq`/`Hash` derive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeqPoint {
    left: Vec<VertexId>,
    core: Vec<VertexId>,
    right: Vec<VertexId>,
    origin: i64,
    graph_fp: u64,
}

/// Longest proper-power root of a word.
fn primitive_root(word: &[VertexId]) -> Vec<VertexId> {
    let n = word.len();
    for d in 1..=n {
        if n % d == 0 && (d..n).all(|i| word[i] == word[i - d]) {
            return word[..d].to_vec();
        }
    }
    unreachable!("every word has itself as a root")
}

impl SeqPoint {
    /// Build a point from raw parts. `left` and `right` must be nonempty;
    /// all seams (inside cycles, across wraps, and into the core) must be
    /// edges of `graph`; `origin` marks coordinate 0 in layout coordinates.
    pub fn new(
        graph: &Graph,
        left: &[VertexId],
        core: &[VertexId],
        right: &[VertexId],
        origin: i64,
    ) -> Result<SeqPoint> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::Parse("cycle words must be nonempty".into()));
        }
        for &v in left.iter().chain(core).chain(right) {
            if (v as usize) >= graph.vertex_count() {
                return Err(Error::UnknownEndpoint(format!("vertex id {v}")));
            }
        }
        let check_edge = |u: VertexId, v: VertexId| -> Result<()> {
            if graph.has_edge(u, v) {
                Ok(())
            } else {
                Err(Error::InadmissibleWord(
                    graph.label(u).to_string(),
                    graph.label(v).to_string(),
                ))
            }
        };
        for w in [left, core, right] {
            for pair in w.windows(2) {
                check_edge(pair[0], pair[1])?;
            }
        }
        check_edge(left[left.len() - 1], left[0])?; // left wrap
        check_edge(right[right.len() - 1], right[0])?; // right wrap
        let after_left = *core.first().unwrap_or(&right[0]);
        check_edge(left[left.len() - 1], after_left)?; // seam into core
        if !core.is_empty() {
            check_edge(core[core.len() - 1], right[0])?; // seam out of core
        }
        let mut p = SeqPoint {
            left: left.to_vec(),
            core: core.to_vec(),
            right: right.to_vec(),
            origin,
            graph_fp: graph.fingerprint(),
        };
        p.canonicalize();
        Ok(p)
    }

    /// The purely periodic point `word^infinity` with `word[0]` at
    /// coordinate 0. `word` must be a closed walk.
    pub fn periodic(graph: &Graph, word: &[VertexId]) -> Result<SeqPoint> {
        if !graph.is_closed_walk(word) {
            let lab = |i: usize| graph.label(word[i]).to_string();
            return Err(if word.is_empty() {
                Error::Parse("empty cycle word".into())
            } else {
                let k = word
                    .windows(2)
                    .position(|w| !graph.has_edge(w[0], w[1]))
                    .unwrap_or(word.len() - 1);
                Error::InadmissibleWord(lab(k), lab((k + 1) % word.len()))
            });
        }
        SeqPoint::new(graph, word, &[], word, 0)
    }

    /// Symbol at layout position `p`.
    fn at_layout(&self, p: i64) -> VertexId {
        let c = self.core.len() as i64;
        if p < 0 {
            let l = self.left.len() as i64;
            self.left[(((p % l) + l) % l) as usize]
        } else if p < c {
            self.core[p as usize]
        } else {
            let r = self.right.len() as i64;
            self.right[((p - c) % r) as usize]
        }
    }

    /// Coordinate `n` of the sequence.
    pub fn coord(&self, n: i64) -> VertexId {
        self.at_layout(self.origin + n)
    }

    /// The word at coordinates `start..start + len`.
    pub fn window(&self, start: i64, len: usize) -> Vec<VertexId> {
        (0..len as i64).map(|i| self.coord(start + i)).collect()
    }

    /// Fingerprint of the graph this point lives over.
    pub fn graph_fingerprint(&self) -> u64 {
        self.graph_fp
    }

    pub(crate) fn left_len(&self) -> usize {
        self.left.len()
    }

    pub(crate) fn origin_value(&self) -> i64 {
        self.origin
    }

    pub(crate) fn right_len(&self) -> usize {
        self.right.len()
    }

    /// First coordinate of the core region (coordinates below are in the
    /// left tail).
    pub(crate) fn core_start_coord(&self) -> i64 {
        -self.origin
    }

    /// First coordinate of the right tail.
    pub(crate) fn core_end_coord(&self) -> i64 {
        self.core.len() as i64 - self.origin
    }

    /// Rebuild the point over `target` by mapping every symbol.
    pub(crate) fn map_symbols(
        &self,
        target: &Graph,
        f: impl Fn(VertexId) -> VertexId,
    ) -> Result<SeqPoint> {
        let left: Vec<VertexId> = self.left.iter().map(|&v| f(v)).collect();
        let core: Vec<VertexId> = self.core.iter().map(|&v| f(v)).collect();
        let right: Vec<VertexId> = self.right.iter().map(|&v| f(v)).collect();
        SeqPoint::new(target, &left, &core, &right, self.origin)
    }

    /// Minimal period if the point is purely periodic.
    pub fn period(&self) -> Option<usize> {
        if self.core.is_empty() && self.left == self.right {
            Some(self.right.len())
        } else {
            None
        }
    }

    /// One period of a purely periodic point, starting at coordinate 0.
    pub fn period_word(&self) -> Option<Vec<VertexId>> {
        self.period().map(|p| self.window(0, p))
    }

    fn canonicalize(&mut self) {
        self.left = primitive_root(&self.left);
        self.right = primitive_root(&self.right);
        // Absorb periodic continuation into the cycles: shrink the core on
        // the right while its last symbol matches the right tail extended
        // one step left, and symmetrically on the left. The loops stop at
        // the sequence-intrinsic first break of each periodicity, so the
        // result does not depend on the input presentation.
        while let Some(&last) = self.core.last() {
            if last == *self.right.last().expect("nonempty") {
                self.core.pop();
                self.right.rotate_right(1);
            } else {
                break;
            }
        }
        while let Some(&first) = self.core.first() {
            if first == self.left[0] {
                self.core.remove(0);
                self.left.rotate_left(1);
                self.origin -= 1;
            } else {
                break;
            }
        }
        if self.core.is_empty() {
            // Detect the purely periodic case: the left tail continued by
            // the right cycle must agree with the left cycle over a full
            // lcm window.
            let l = self.left.len() as i64;
            let r = self.right.len() as i64;
            let lcm = num_integer::lcm(l, r);
            let pure = (1..=lcm).all(|k| {
                let left_val = self.left[((((-k) % l) + l) % l) as usize];
                let right_val = self.right[((((-k) % r) + r) % r) as usize];
                left_val == right_val
            });
            if pure {
                let word = self.window(0, self.right.len());
                self.left = word.clone();
                self.right = word;
                self.origin = 0;
            } else {
                // The left- and right-periodic zones may overlap around an
                // empty core, leaving the seam position ambiguous. Pin it
                // to the intrinsic start of right-periodicity by sliding
                // the seam left while the right period extends across it.
                // Terminates because the point is not purely periodic.
                while self.left.last() == self.right.last() {
                    self.left.rotate_right(1);
                    self.right.rotate_right(1);
                    self.origin += 1;
                }
            }
        }
    }

    /// The shifted point `y` with `y_n = x_{n+k}` for all `n`.
    pub fn shift(&self, k: i64) -> SeqPoint {
        let mut p = self.clone();
        p.origin += k;
        p.canonicalize();
        p
    }

    /// `exp(-min { |n| : x_n != y_n })`, and 0 when the points are equal.
    pub fn base_distance(&self, other: &SeqPoint) -> Result<f64> {
        Ok(match self.separation(other)? {
            None => 0.0,
            Some(m) => (-(m as f64)).exp(),
        })
    }

    /// `min { |n| : x_n != y_n }`, or `None` when equal. Decidable because
    /// canonical forms coincide exactly for equal sequences.
    pub fn separation(&self, other: &SeqPoint) -> Result<Option<u64>> {
        if self.graph_fp != other.graph_fp {
            return Err(Error::GraphMismatch);
        }
        if self == other {
            return Ok(None);
        }
        // Unequal points must differ within the window where at least one
        // of them is still non-cyclic, plus one lcm of all cycle lengths.
        let span = |p: &SeqPoint| {
            p.origin.unsigned_abs() + p.core.len() as u64 + p.left.len() as u64 + p.right.len() as u64
        };
        let lcm = [
            self.left.len(),
            self.right.len(),
            other.left.len(),
            other.right.len(),
        ]
        .iter()
        .fold(1u64, |acc, &l| num_integer::lcm(acc, l as u64));
        let bound = (span(self) + span(other) + 2 * lcm + 2) as i64;
        for n in 0..=bound {
            if self.coord(n) != other.coord(n) {
                return Ok(Some(n as u64));
            }
            if self.coord(-n) != other.coord(-n) {
                return Ok(Some(n as u64));
            }
        }
        unreachable!("distinct canonical points agree on the certainty window");
    }

    /// Whether some symbol recurs infinitely often in each tail. The
    /// eventually periodic representation forces this: every point stored
    /// by this crate is regular, and the method documents that fact.
    pub fn is_regular(&self) -> bool {
        // The tails repeat `left` and `right`, which are nonempty.
        debug_assert!(!self.left.is_empty() && !self.right.is_empty());
        true
    }

    /// Render in the CLI literal syntax `LEFT|CORE|RIGHT` with a `.`
    /// immediately before the symbol at coordinate 0.
    pub fn display(&self, graph: &Graph) -> String {
        // Unroll whole cycle periods into the core until the origin lies
        // inside it; unrolling a full period leaves the cycle words as-is.
        let left = self.left.clone();
        let mut core = self.core.clone();
        let right = self.right.clone();
        let mut origin = self.origin;
        while origin < 0 {
            for &v in left.iter().rev() {
                core.insert(0, v);
            }
            origin += left.len() as i64;
        }
        while origin > core.len() as i64 {
            core.extend_from_slice(&right);
        }
        let single = graph.labels().iter().all(|l| l.chars().count() == 1);
        let word = |w: &[VertexId], dot: Option<usize>| -> String {
            let mut parts: Vec<String> = w.iter().map(|&v| graph.label(v).to_string()).collect();
            if let Some(d) = dot {
                if d == parts.len() {
                    parts.push(".".into());
                } else {
                    parts[d] = format!(".{}", parts[d]);
                }
            }
            if single {
                parts.concat()
            } else {
                parts.join(",")
            }
        };
        format!(
            "{}|{}|{}",
            word(&left, None),
            word(&core, Some(origin as usize)),
            word(&right, None)
        )
    }

    /// Parse the CLI literal syntax. Symbols are single characters, or
    /// comma-separated when the literal contains a comma.
    pub fn parse(graph: &Graph, literal: &str) -> Result<SeqPoint> {
        let parts: Vec<&str> = literal.split('|').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "point literal needs LEFT|CORE|RIGHT, got {literal:?}"
            )));
        }
        let comma_mode = literal.contains(',');
        let tokens = |s: &str| -> Vec<String> {
            if comma_mode {
                s.split(',').filter(|t| !t.is_empty()).map(String::from).collect()
            } else {
                s.chars().map(|c| c.to_string()).collect()
            }
        };
        let lookup = |toks: &[String]| -> Result<Vec<VertexId>> {
            toks.iter()
                .map(|t| {
                    graph
                        .vertex(t)
                        .ok_or_else(|| Error::UnknownEndpoint(t.clone()))
                })
                .collect()
        };
        let left = lookup(&tokens(parts[0]))?;
        let right = lookup(&tokens(parts[2]))?;
        // The core carries exactly one '.' marking coordinate 0.
        let core_raw = parts[1];
        if core_raw.matches('.').count() != 1 {
            return Err(Error::Parse(format!(
                "core must contain exactly one '.', got {core_raw:?}"
            )));
        }
        let (before, after) = core_raw.split_once('.').expect("checked");
        let before_toks = tokens(before);
        let after_toks = tokens(after);
        let origin = before_toks.len() as i64;
        let mut core_toks = before_toks;
        core_toks.extend(after_toks);
        let core = lookup(&core_toks)?;
        SeqPoint::new(graph, &left, &core, &right, origin)
    }
}

impl fmt::Display for SeqPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Indices-only rendering; `display` gives the labelled form.
        write!(
            f,
            "{:?}|{:?}@{}|{:?}",
            self.left, self.core, self.origin, self.right
        )
    }
}

/// A primitive cyclic word up to rotation: one simple closed orbit class of
/// the base shift. The stored word is the lexicographically minimal
/// rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleClass {
    word: Vec<VertexId>,
}

impl CycleClass {
    /// Canonicalize an admissible closed walk into a cycle class.
    /// Fails if the word is not primitive or not a closed walk.
    pub fn new(graph: &Graph, word: &[VertexId]) -> Result<CycleClass> {
        if !graph.is_closed_walk(word) {
            return Err(Error::Parse("cycle word is not a closed walk".into()));
        }
        if primitive_root(word).len() != word.len() {
            return Err(Error::Parse("cycle word is a proper power".into()));
        }
        Ok(CycleClass {
            word: minimal_rotation(word),
        })
    }

    /// The representative word (lexicographically minimal rotation).
    pub fn word(&self) -> &[VertexId] {
        &self.word
    }

    /// Primitive period.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    /// Cycle classes are never empty.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The purely periodic point tracing this class.
    pub fn point(&self, graph: &Graph) -> SeqPoint {
        SeqPoint::periodic(graph, &self.word).expect("class word is admissible")
    }

    /// Labelled rendering, symbols joined as in graph labels.
    pub fn display(&self, graph: &Graph) -> String {
        crate::graph::join_block(graph.labels(), &self.word)
    }
}

/// Lexicographically minimal rotation of a word.
pub(crate) fn minimal_rotation(word: &[VertexId]) -> Vec<VertexId> {
    let n = word.len();
    let mut best = 0usize;
    for cand in 1..n {
        for i in 0..n {
            let a = word[(cand + i) % n];
            let b = word[(best + i) % n];
            if a < b {
                best = cand;
                break;
            }
            if a > b {
                break;
            }
        }
    }
    (0..n).map(|i| word[(best + i) % n]).collect()
}

/// True when the word equals its own minimal rotation and is primitive.
pub(crate) fn is_canonical_primitive(word: &[VertexId]) -> bool {
    primitive_root(word).len() == word.len() && minimal_rotation(word) == word
}

/// Primitive period of an arbitrary word (exposed for orbit multiplicity).
pub(crate) fn primitive_period(word: &[VertexId]) -> usize {
    primitive_root(word).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{g2, gm};

    fn pt(graph: &Graph, lit: &str) -> SeqPoint {
        SeqPoint::parse(graph, lit).unwrap()
    }

    #[test]
    fn canonical_form_of_pure_periodic_points() {
        let g = g2();
        // aa-cycle collapses to the fixed point a^inf.
        let x = SeqPoint::periodic(&g, &[0, 0]).unwrap();
        let y = SeqPoint::periodic(&g, &[0]).unwrap();
        assert_eq!(x, y);
        assert_eq!(x.period(), Some(1));
        // (ab)^inf and (ba)^inf are distinct points.
        let ab = SeqPoint::periodic(&g, &[0, 1]).unwrap();
        let ba = SeqPoint::periodic(&g, &[1, 0]).unwrap();
        assert_ne!(ab, ba);
        assert_eq!(ab.shift(1), ba);
        assert_eq!(ab.shift(2), ab);
    }

    #[test]
    fn core_absorption_is_intrinsic() {
        let g = g2();
        // "all a's except a b at coordinate 0" written redundantly.
        let x = SeqPoint::new(&g, &[0], &[0, 0, 1, 0], &[0], 2).unwrap();
        let y = pt(&g, "a|.b|a");
        assert_eq!(x, y);
        assert_eq!(y.coord(0), 1);
        assert_eq!(y.coord(1), 0);
        assert_eq!(y.coord(-1), 0);
    }

    #[test]
    fn seam_phases_matter() {
        let g = g2();
        // ...abab|baba... differs from ...abab|abab...
        let seam = SeqPoint::new(&g, &[0, 1], &[], &[1, 0], 0).unwrap();
        let pure = SeqPoint::new(&g, &[0, 1], &[], &[0, 1], 0).unwrap();
        assert_eq!(pure.period(), Some(2));
        assert_eq!(seam.period(), None);
        assert_ne!(seam, pure);
        assert_eq!(seam.coord(-1), 1);
        assert_eq!(seam.coord(0), 1);
    }

    #[test]
    fn shift_round_trips() {
        let g = gm();
        let x = pt(&g, "ab|a.ba|ab");
        for k in [-5i64, -1, 0, 1, 7] {
            assert_eq!(x.shift(k).shift(-k), x);
        }
        // y_n = x_{n+k}
        let y = x.shift(3);
        for n in -6..6 {
            assert_eq!(y.coord(n), x.coord(n + 3));
        }
    }

    #[test]
    fn base_distance_examples() {
        let g = g2();
        let a_inf = pt(&g, "a|.|a");
        assert_eq!(a_inf.base_distance(&a_inf).unwrap(), 0.0);
        let b_at_zero = pt(&g, "a|.b|a");
        assert_eq!(a_inf.base_distance(&b_at_zero).unwrap(), 1.0);
        // differ at n = 2 and n = -3: min |n| = 2
        let two = SeqPoint::new(&g, &[0], &[1, 0, 0, 0, 0, 1], &[0], 3).unwrap();
        let d = a_inf.base_distance(&two).unwrap();
        assert!((d - (-2.0f64).exp()).abs() < 1e-15);
        assert!((d - 0.135335).abs() < 1e-6);
    }

    #[test]
    fn distance_rejects_cross_graph_points() {
        let x = pt(&g2(), "a|.|a");
        let y = pt(&gm(), "a|.|a");
        assert!(matches!(
            x.base_distance(&y),
            Err(crate::error::Error::GraphMismatch)
        ));
    }

    #[test]
    fn shift_is_almost_isometric() {
        let g = g2();
        let x = pt(&g, "a|.b|a");
        let y = pt(&g, "a|.ba|b");
        let d = x.base_distance(&y).unwrap();
        for k in [-1i64, 1] {
            let dk = x.shift(k).base_distance(&y.shift(k)).unwrap();
            assert!(dk <= d * 1.0f64.exp() + 1e-15);
            assert!(dk >= d * (-1.0f64).exp() - 1e-15);
        }
    }

    #[test]
    fn parse_display_round_trip() {
        let g = g2();
        for lit in ["a|.b|a", "ab|.|ba", "b|ab.a|a", "a|.|a"] {
            let x = pt(&g, lit);
            let shown = x.display(&g);
            assert_eq!(pt(&g, &shown), x, "literal {lit} -> {shown}");
        }
    }

    #[test]
    fn parse_rejects_bad_literals() {
        let g = g2();
        assert!(SeqPoint::parse(&g, "a|b|a").is_err()); // no dot
        assert!(SeqPoint::parse(&g, "a|.c|a").is_err()); // unknown symbol
        assert!(SeqPoint::parse(&g, "|.|a").is_err()); // empty cycle
    }

    #[test]
    fn inadmissible_words_are_rejected() {
        let g = gm();
        assert!(SeqPoint::periodic(&g, &[1, 1]).is_err()); // bb forbidden
        assert!(SeqPoint::new(&g, &[0, 1], &[1], &[0], 0).is_err()); // seam bb
    }

    #[test]
    fn regularity_is_structural() {
        let g = g2();
        assert!(pt(&g, "a|.b|a").is_regular());
        assert!(pt(&g, "ab|ba.ab|ab").is_regular());
    }

    #[test]
    fn cycle_class_canonicalization() {
        let g = g2();
        let c1 = CycleClass::new(&g, &[1, 0]).unwrap();
        let c2 = CycleClass::new(&g, &[0, 1]).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(c1.word(), &[0, 1]);
        assert!(CycleClass::new(&g, &[0, 1, 0, 1]).is_err()); // proper power
    }

    #[test]
    fn minimal_rotation_examples() {
        assert_eq!(minimal_rotation(&[1, 0, 0]), vec![0, 0, 1]);
        assert_eq!(minimal_rotation(&[0, 1, 0]), vec![0, 0, 1]);
        assert_eq!(primitive_period(&[0, 1, 0, 1]), 2);
    }
}
