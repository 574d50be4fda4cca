//! Deterministic helpers for randomized test sweeps: a tiny seeded
//! generator plus admissible random points and walks. Not part of the
//! public contract.

use crate::graph::{Graph, VertexId};
use crate::point::SeqPoint;
use crate::rational::Rational;

/// SplitMix64: small, seedable, and stable across platforms.
#[derive(Debug, Clone)]
pub struct Rng64 {
    state: u64,
}

impl Rng64 {
    pub fn new(seed: u64) -> Rng64 {
        Rng64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }

    /// Uniform in `lo..=hi`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    /// Random rational `p/q` with `1 <= p <= max_num`, `1 <= q <= max_den`.
    pub fn ratio(&mut self, max_num: u64, max_den: u64) -> Rational {
        crate::rational::ratio(
            (1 + self.below(max_num)) as i64,
            (1 + self.below(max_den)) as i64,
        )
    }

    /// Random signed rational with |value| <= max_num, denominators <= max_den.
    pub fn signed_ratio(&mut self, max_num: u64, max_den: u64) -> Rational {
        let r = self.ratio(max_num, max_den);
        if self.below(2) == 0 {
            -r
        } else {
            r
        }
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }
}

/// Shortest path from `from` to `to` (inclusive) along edges; panics if
/// unreachable, so only call on transitive graphs.
pub fn bfs_path(graph: &Graph, from: VertexId, to: VertexId) -> Vec<VertexId> {
    use std::collections::VecDeque;
    let n = graph.vertex_count();
    let mut prev: Vec<Option<VertexId>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    seen[from as usize] = true;
    queue.push_back(from);
    // Allow from == to to mean "shortest closed walk".
    let mut found = false;
    'outer: while let Some(v) = queue.pop_front() {
        for &w in graph.out_neighbors(v) {
            if w == to {
                prev[to as usize] = Some(v);
                found = true;
                break 'outer;
            }
            if !seen[w as usize] {
                seen[w as usize] = true;
                prev[w as usize] = Some(v);
                queue.push_back(w);
            }
        }
    }
    assert!(found, "graph must be transitive for test walks");
    let mut path = vec![to];
    let mut cur = to;
    while cur != from || path.len() == 1 {
        cur = prev[cur as usize].expect("reached");
        path.push(cur);
        if cur == from {
            break;
        }
    }
    path.reverse();
    path
}

/// A closed walk starting (and implicitly ending) at `start`: a few random
/// steps, then the shortest way home. The returned word omits the final
/// repeat of `start`.
pub fn random_closed_walk_at(graph: &Graph, rng: &mut Rng64, start: VertexId) -> Vec<VertexId> {
    let mut word = vec![start];
    for _ in 0..rng.below(4) {
        let last = *word.last().unwrap();
        word.push(*rng.pick(graph.out_neighbors(last)));
    }
    let last = *word.last().unwrap();
    let home = bfs_path(graph, last, start);
    word.extend_from_slice(&home[1..home.len() - 1]);
    debug_assert!(graph.is_closed_walk(&word));
    word
}

/// A random eventually-periodic point: random left cycle, random core,
/// random right cycle, random origin.
pub fn random_point(graph: &Graph, rng: &mut Rng64) -> SeqPoint {
    let start = rng.below(graph.vertex_count() as u64) as VertexId;
    let left = random_closed_walk_at(graph, rng, start);
    let mut core = Vec::new();
    let mut last = *left.last().unwrap();
    for _ in 0..rng.below(6) {
        let next = *rng.pick(graph.out_neighbors(last));
        core.push(next);
        last = next;
    }
    let right_start = *rng.pick(graph.out_neighbors(last));
    let right = random_closed_walk_at(graph, rng, right_start);
    let origin = rng.range_i64(-5, 5);
    SeqPoint::new(graph, &left, &core, &right, origin).expect("constructed walks are admissible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::gm;

    #[test]
    fn random_points_are_valid_and_varied() {
        let g = gm();
        let mut rng = Rng64::new(1);
        let mut distinct = std::collections::HashSet::new();
        for _ in 0..100 {
            let p = random_point(&g, &mut rng);
            assert!(p.is_regular());
            distinct.insert(p);
        }
        assert!(distinct.len() > 10);
    }
}
