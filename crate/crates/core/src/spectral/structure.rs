//! Zero-pattern structure: strong connectivity and full indecomposability.

use std::collections::VecDeque;

use crate::matrix::Matrix;

/// Adjacency lists of the digraph with an edge `i -> j` whenever `a_ij > 0`.
pub fn pattern_graph(a: &Matrix) -> Vec<Vec<usize>> {
    a.rows()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter(|(_, &v)| v > 0.0)
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

/// Strongly connected components, iterative Tarjan.
///
/// Components come out in reverse topological order: if some vertex of
/// component `c` has an edge into component `d`, then `d` appears before `c`.
pub fn strongly_connected_components(graph: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = graph.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    // (vertex, next edge offset)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge == 0 && index[v] == UNSEEN {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = graph[v].get(*edge) {
                *edge += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    comps
}

/// True iff the nonzero pattern of `a` is strongly connected.
///
/// A strictly positive matrix short-circuits. The 1x1 case is treated as
/// irreducible regardless of its entry.
pub fn is_irreducible(a: &Matrix) -> bool {
    if a.n() == 1 || a.is_positive() {
        return true;
    }
    strongly_connected_components(&pattern_graph(a)).len() == 1
}

/// Maximum bipartite matching by Hopcroft-Karp.
///
/// `adj[u]` lists the right vertices adjacent to left vertex `u`. Returns
/// `mate[u]` for every left vertex.
pub fn max_matching(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    const FREE: usize = usize::MAX;
    const INF: usize = usize::MAX;
    let left = adj.len();
    let mut mate_l = vec![FREE; left];
    let mut mate_r = vec![FREE; right];
    let mut dist = vec![INF; left];

    loop {
        let mut queue = VecDeque::new();
        for u in 0..left {
            if mate_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = INF;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = mate_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == INF {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut augmented = false;
        for u in 0..left {
            if mate_l[u] == FREE && augment(u, adj, &mut mate_l, &mut mate_r, &mut dist) {
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }
    mate_l
        .into_iter()
        .map(|m| (m != FREE).then_some(m))
        .collect()
}

fn augment(
    root: usize,
    adj: &[Vec<usize>],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [usize],
) -> bool {
    const FREE: usize = usize::MAX;
    const INF: usize = usize::MAX;
    // explicit stack of (left vertex, next edge) to stay safe on deep layers
    let mut path: Vec<(usize, usize)> = vec![(root, 0)];
    while let Some(&(u, e)) = path.last() {
        if let Some(&v) = adj[u].get(e) {
            path.last_mut().unwrap().1 += 1;
            let w = mate_r[v];
            if w == FREE {
                // flip the alternating path, innermost first
                let mut v = v;
                while let Some((u, _)) = path.pop() {
                    let prev = mate_l[u];
                    mate_l[u] = v;
                    mate_r[v] = u;
                    v = prev;
                }
                return true;
            }
            if dist[w] == dist[u] + 1 {
                path.push((w, 0));
            }
        } else {
            dist[u] = INF;
            path.pop();
        }
    }
    false
}

/// True iff `PAQ` is irreducible for all permutation matrices `P`, `Q`.
///
/// Uses the characterization that `A` (n >= 2) is fully indecomposable iff it
/// has a perfect matching `sigma` and the matrix with columns permuted so that
/// the matched entries sit on the diagonal is irreducible. For n = 1 the
/// matrix is fully indecomposable iff its single entry is positive.
pub fn is_fully_indecomposable(a: &Matrix) -> bool {
    let n = a.n();
    if n == 1 {
        return a.get(0, 0) > 0.0;
    }
    if a.is_positive() {
        return true;
    }
    let adj = pattern_graph(a);
    let mate = max_matching(&adj, n);
    let Some(sigma) = mate.into_iter().collect::<Option<Vec<usize>>>() else {
        return false;
    };
    // column sigma[i] moves to column i, putting the matching on the diagonal
    let mut col_to_row = vec![0; n];
    for (i, &c) in sigma.iter().enumerate() {
        col_to_row[c] = i;
    }
    let permuted: Vec<Vec<usize>> = adj
        .iter()
        .map(|cols| cols.iter().map(|&c| col_to_row[c]).collect())
        .collect();
    strongly_connected_components(&permuted).len() == 1
}

/// Full indecomposability by definition of total support: every
/// `(n-1) x (n-1)` minor pattern obtained by deleting one row and one column
/// admits a perfect matching. Costs `n^2` matching calls.
pub fn is_fully_indecomposable_by_minors(a: &Matrix) -> bool {
    let n = a.n();
    if n == 1 {
        return a.get(0, 0) > 0.0;
    }
    let adj = pattern_graph(a);
    for del_row in 0..n {
        for del_col in 0..n {
            let minor: Vec<Vec<usize>> = adj
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != del_row)
                .map(|(_, cols)| {
                    cols.iter()
                        .filter(|&&c| c != del_col)
                        .map(|&c| if c > del_col { c - 1 } else { c })
                        .collect()
                })
                .collect();
            if max_matching(&minor, n - 1).iter().any(Option::is_none) {
                return false;
            }
        }
    }
    true
}
