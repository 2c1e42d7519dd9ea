use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::Graph;

/// Random connected undirected graph: a uniformly shuffled spanning tree plus
/// each remaining pair independently with probability `extra_prob`. Weights
/// are drawn uniformly from `weights`.
pub fn random_connected<R: Rng + ?Sized>(
    n: usize,
    extra_prob: f64,
    weights: (f64, f64),
    rng: &mut R,
) -> Graph {
    assert!(n >= 2, "random_connected needs at least two nodes");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = BTreeSet::new();
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        let child = order[k];
        pairs.insert((parent.min(child), parent.max(child)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !pairs.contains(&(i, j)) && rng.gen::<f64>() < extra_prob {
                pairs.insert((i, j));
            }
        }
    }
    let (lo, hi) = weights;
    let edges: Vec<_> = pairs
        .into_iter()
        .map(|(i, j)| {
            let w = if hi > lo { rng.gen_range(lo..hi) } else { lo };
            (i, j, w)
        })
        .collect();
    Graph::undirected(n, edges).expect("generated edges are valid")
}
