//! Exact enumeration over the shift: fixed points of powers of the shift,
//! primitive cycle classes, and a pruned walk visitor shared by the orbit
//! census. Everything enumerates in canonical order: vertex order lifts to
//! lexicographic order on words, and lengths sort before words.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::point::{is_canonical_primitive, CycleClass, SeqPoint};

/// Positional constraints for closed-walk enumeration: `req[i]` pins the
/// vertex at position `i` of the walk word.
pub(crate) type Constraints = Vec<Option<VertexId>>;

/// Visit every closed walk word of length `n` in lexicographic order,
/// subject to the positional constraints.
pub(crate) fn for_each_closed_walk<F>(graph: &Graph, n: usize, req: &Constraints, visit: &mut F)
where
    F: FnMut(&[VertexId]),
{
    debug_assert_eq!(req.len(), n);
    let mut word: Vec<VertexId> = Vec::with_capacity(n);
    for start in 0..graph.vertex_count() as VertexId {
        if let Some(v) = req[0] {
            if v != start {
                continue;
            }
        }
        word.push(start);
        walk_rec(graph, n, req, &mut word, visit);
        word.pop();
    }

    fn walk_rec<F>(graph: &Graph, n: usize, req: &Constraints, word: &mut Vec<VertexId>, visit: &mut F)
    where
        F: FnMut(&[VertexId]),
    {
        let depth = word.len();
        if depth == n {
            if graph.has_edge(word[n - 1], word[0]) {
                visit(word);
            }
            return;
        }
        let last = word[depth - 1];
        for &next in graph.out_neighbors(last) {
            if let Some(v) = req[depth] {
                if v != next {
                    continue;
                }
            }
            word.push(next);
            walk_rec(graph, n, req, word, visit);
            word.pop();
        }
    }
}

/// Unconstrained variant.
pub(crate) fn for_each_closed_walk_free<F>(graph: &Graph, n: usize, visit: &mut F)
where
    F: FnMut(&[VertexId]),
{
    let req = vec![None; n];
    for_each_closed_walk(graph, n, &req, visit);
}

/// All fixed points of `shift^n`: one purely periodic point per closed walk
/// word of length `n`, in lexicographic word order. The count equals
/// `trace(A^n)` for the adjacency matrix `A`.
pub fn periodic_points(graph: &Graph, n: usize) -> Result<Vec<SeqPoint>> {
    if n == 0 {
        return Err(Error::InvalidArgument("period must be >= 1".into()));
    }
    let mut points = Vec::new();
    for_each_closed_walk_free(graph, n, &mut |word| {
        points.push(SeqPoint::periodic(graph, word).expect("closed walk is admissible"));
    });
    Ok(points)
}

/// Closed walk words of length `n` in lexicographic order.
pub fn closed_walk_words(graph: &Graph, n: usize) -> Vec<Vec<VertexId>> {
    let mut words = Vec::new();
    for_each_closed_walk_free(graph, n, &mut |w| words.push(w.to_vec()));
    words
}

/// Primitive cycle classes of period exactly `n`, in lexicographic order of
/// their minimal-rotation representatives.
pub(crate) fn primitive_classes_of_period(graph: &Graph, n: usize) -> Vec<CycleClass> {
    let mut classes = Vec::new();
    // A primitive class appears once as its minimal rotation; restricting the
    // DFS to vertices >= the start vertex prunes most other rotations early.
    let mut word: Vec<VertexId> = Vec::with_capacity(n);
    for start in 0..graph.vertex_count() as VertexId {
        word.push(start);
        rec(graph, n, start, &mut word, &mut classes);
        word.pop();
    }
    return classes;

    fn rec(
        graph: &Graph,
        n: usize,
        start: VertexId,
        word: &mut Vec<VertexId>,
        classes: &mut Vec<CycleClass>,
    ) {
        if word.len() == n {
            if graph.has_edge(word[n - 1], word[0]) && is_canonical_primitive(word) {
                classes.push(
                    CycleClass::new(graph, word).expect("canonical primitive closed walk"),
                );
            }
            return;
        }
        let last = word[word.len() - 1];
        for &next in graph.out_neighbors(last) {
            if next < start {
                continue;
            }
            word.push(next);
            rec(graph, n, start, word, classes);
            word.pop();
        }
    }
}

/// One representative per rotation class of primitive admissible cyclic
/// words of length at most `n_max`, ordered by (length, word).
pub fn primitive_cycles(graph: &Graph, n_max: usize) -> Result<Vec<CycleClass>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    let per_n = crate::par::map_ordered((1..=n_max).collect(), |n| {
        primitive_classes_of_period(graph, n)
    });
    Ok(per_n.into_iter().flatten().collect())
}

/// Sequential reference implementation of [`primitive_cycles`].
pub fn primitive_cycles_serial(graph: &Graph, n_max: usize) -> Result<Vec<CycleClass>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    let per_n = crate::par::map_ordered_serial((1..=n_max).collect(), |n| {
        primitive_classes_of_period(graph, n)
    });
    Ok(per_n.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{g2, gm};
    use crate::rational::matrix_power;
    use num_bigint::BigUint;
    use num_traits::ToPrimitive;

    fn trace_pow(graph: &Graph, n: usize) -> u64 {
        let p = matrix_power(&graph.adjacency(), n);
        (0..p.len())
            .map(|i| p[i][i].clone())
            .sum::<BigUint>()
            .to_u64()
            .unwrap()
    }

    #[test]
    fn period_two_points_of_the_full_shift() {
        let g = g2();
        let pts = periodic_points(&g, 2).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(trace_pow(&g, 2), 4);
        // Distinct as points: a^inf, (ab), (ba), b^inf.
        let labels: Vec<String> = pts.iter().map(|p| p.display(&g)).collect();
        assert_eq!(labels, vec!["a|.|a", "ab|.|ab", "ba|.|ba", "b|.|b"]);
    }

    #[test]
    fn counts_match_matrix_power_oracle() {
        for g in [g2(), gm()] {
            for n in 1..=8 {
                assert_eq!(
                    periodic_points(&g, n).unwrap().len() as u64,
                    trace_pow(&g, n),
                    "n = {n}"
                );
            }
        }
    }

    #[test]
    fn golden_mean_small_periods() {
        let g = gm();
        assert_eq!(periodic_points(&g, 1).unwrap().len(), 1);
        assert_eq!(periodic_points(&g, 3).unwrap().len(), 4);
    }

    #[test]
    fn primitive_cycle_counts_follow_the_necklace_formula() {
        let g = g2();
        let classes = primitive_cycles(&g, 3).unwrap();
        let count = |n: usize| classes.iter().filter(|c| c.len() == n).count();
        assert_eq!(count(1), 2);
        assert_eq!(count(2), 1);
        assert_eq!(count(3), 2);
    }

    #[test]
    fn golden_mean_primitive_cycles() {
        let g = gm();
        let classes = primitive_cycles(&g, 2).unwrap();
        let words: Vec<&[VertexId]> = classes.iter().map(|c| c.word()).collect();
        assert_eq!(words, vec![&[0][..], &[0, 1][..]]);
    }

    #[test]
    fn self_loops_only_at_length_one() {
        let g = gm();
        let classes = primitive_cycles(&g, 1).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].word(), &[0]);
    }

    #[test]
    fn power_decomposition_identity() {
        // sum over p | n of p * (#primitive classes of period p) = trace(A^n)
        for g in [g2(), gm()] {
            let classes = primitive_cycles(&g, 10).unwrap();
            for n in 1..=10usize {
                let total: usize = classes
                    .iter()
                    .filter(|c| n % c.len() == 0)
                    .map(|c| c.len())
                    .sum();
                assert_eq!(total as u64, trace_pow(&g, n), "n = {n}");
            }
        }
    }

    #[test]
    fn serial_and_parallel_agree() {
        let g = g2();
        assert_eq!(
            primitive_cycles(&g, 9).unwrap(),
            primitive_cycles_serial(&g, 9).unwrap()
        );
    }
}
