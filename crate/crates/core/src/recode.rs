//! Higher-block recoding: replace symbols by sliding k-blocks so that
//! finite-range data becomes 1-block or edge data. The recoded shift is
//! topologically conjugate to the original; both point maps are exposed.
//!
//! Blocks are forward windows `(x_i, ..., x_{i+k-1})`. Centered windows are
//! conjugate to forward windows via a power of the shift, and forward
//! windows keep the index bookkeeping simple.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{join_block, Graph, VertexId};
use crate::point::SeqPoint;

/// The conjugacy data of one higher-block recoding.
#[derive(Debug, Clone)]
pub struct BlockConjugacy {
    k: usize,
    source: Graph,
    target: Graph,
    /// Target vertex -> source k-block.
    blocks: Vec<Vec<VertexId>>,
    /// Source k-block -> target vertex.
    block_index: HashMap<Vec<VertexId>, VertexId>,
}

/// Enumerate admissible k-walks of the graph in lexicographic order.
fn admissible_blocks(graph: &Graph, k: usize) -> Vec<Vec<VertexId>> {
    let mut blocks = Vec::new();
    let mut word = Vec::with_capacity(k);
    for v in 0..graph.vertex_count() as VertexId {
        word.push(v);
        rec(graph, k, &mut word, &mut blocks);
        word.pop();
    }
    return blocks;

    fn rec(graph: &Graph, k: usize, word: &mut Vec<VertexId>, out: &mut Vec<Vec<VertexId>>) {
        if word.len() == k {
            out.push(word.clone());
            return;
        }
        let last = word[word.len() - 1];
        for &next in graph.out_neighbors(last) {
            word.push(next);
            rec(graph, k, word, out);
            word.pop();
        }
    }
}

/// Build the k-block recoding of a graph. Vertices of the target are the
/// admissible k-blocks; edges are the admissible (k+1)-blocks, read as an
/// overlap of two k-blocks. For `k = 1` this is the identity recoding.
pub fn higher_block(graph: &Graph, k: usize) -> Result<BlockConjugacy> {
    if k == 0 {
        return Err(Error::InvalidArgument("block length must be >= 1".into()));
    }
    let blocks = admissible_blocks(graph, k);
    let labels: Vec<String> = blocks.iter().map(|b| join_block(graph.labels(), b)).collect();
    let mut block_index = HashMap::new();
    for (i, b) in blocks.iter().enumerate() {
        block_index.insert(b.clone(), i as VertexId);
    }
    let mut edges: Vec<(String, String)> = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        for &next in graph.out_neighbors(b[k - 1]) {
            let mut succ = b[1..].to_vec();
            succ.push(next);
            if let Some(&j) = block_index.get(&succ) {
                edges.push((labels[i].clone(), labels[j as usize].clone()));
            }
        }
    }
    let target = Graph::new(&labels, &edges)?;
    Ok(BlockConjugacy {
        k,
        source: graph.clone(),
        target,
        blocks,
        block_index,
    })
}

impl BlockConjugacy {
    /// Block length of the recoding.
    pub fn block_len(&self) -> usize {
        self.k
    }

    /// The source graph.
    pub fn source(&self) -> &Graph {
        &self.source
    }

    /// The recoded graph.
    pub fn target(&self) -> &Graph {
        &self.target
    }

    /// Source k-block carried by a target vertex.
    pub fn block(&self, v: VertexId) -> &[VertexId] {
        &self.blocks[v as usize]
    }

    /// Target vertex carrying a source k-block.
    pub fn block_vertex(&self, block: &[VertexId]) -> Option<VertexId> {
        self.block_index.get(block).copied()
    }

    /// Forward point map: `y_n = (x_n, ..., x_{n+k-1})`.
    pub fn map_point(&self, x: &SeqPoint) -> Result<SeqPoint> {
        if x.graph_fingerprint() != self.source.fingerprint() {
            return Err(Error::GraphMismatch);
        }
        // Blocks at coordinates n <= core_start - k read only the left tail,
        // blocks at n >= core_end read only the right tail; between those the
        // block sequence is the new core.
        let l = x.left_len() as i64;
        let r = x.right_len() as i64;
        let lo = x.core_start_coord() - self.k as i64;
        let hi = x.core_end_coord();
        let block_at = |n: i64| -> VertexId {
            let w = x.window(n, self.k);
            *self
                .block_index
                .get(&w)
                .expect("blocks of admissible points are admissible")
        };
        let left: Vec<VertexId> = (lo - l..lo).map(block_at).collect();
        let core: Vec<VertexId> = (lo..hi).map(block_at).collect();
        let right: Vec<VertexId> = (hi..hi + r).map(block_at).collect();
        SeqPoint::new(&self.target, &left, &core, &right, -lo)
    }

    /// Inverse point map: `x_n` is the first symbol of the block `y_n`.
    pub fn unmap_point(&self, y: &SeqPoint) -> Result<SeqPoint> {
        if y.graph_fingerprint() != self.target.fingerprint() {
            return Err(Error::GraphMismatch);
        }
        let first = |v: VertexId| self.blocks[v as usize][0];
        y.map_symbols(&self.source, first)
    }

    /// Map a cyclic word of the source to the target: block `i` reads the
    /// word cyclically starting at position `i`.
    pub fn map_cycle_word(&self, word: &[VertexId]) -> Vec<VertexId> {
        let n = word.len();
        (0..n)
            .map(|i| {
                let block: Vec<VertexId> = (0..self.k).map(|j| word[(i + j) % n]).collect();
                *self
                    .block_index
                    .get(&block)
                    .expect("cyclic blocks of closed walks are admissible")
            })
            .collect()
    }
}
