#![allow(dead_code)]

use std::collections::VecDeque;

use seedtree::{generate, ArrivalTree, RngHandle, SeedSpec, ShapeView};

/// `psi` by deleting each vertex and measuring every remaining component.
pub fn brute_psi(view: &ShapeView) -> Vec<usize> {
    let n = view.n();
    let mut psi = vec![0; n + 1];
    for (v, slot) in psi.iter_mut().enumerate().skip(1) {
        *slot = view
            .neighbors(v)
            .iter()
            .map(|&u| component_size(view, v, u))
            .max()
            .unwrap_or(0);
    }
    psi
}

/// Size of the component containing `start` once `removed` is deleted.
pub fn component_size(view: &ShapeView, removed: usize, start: usize) -> usize {
    let mut seen = vec![false; view.n() + 1];
    seen[removed] = true;
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut count = 0;
    while let Some(v) = queue.pop_front() {
        count += 1;
        for &u in view.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    count
}

/// URRT, path-seeded or star-seeded tree of size `n`, chosen by `rng`.
pub fn mixed_tree(n: usize, rng: &mut RngHandle) -> ArrivalTree {
    let l = rng.between(1, n.min(10));
    let spec = match rng.below(3) {
        0 => SeedSpec::Urrt { size: 1 },
        1 => SeedSpec::Path { size: l },
        _ => SeedSpec::Star { size: l },
    };
    generate(&spec, n, rng).unwrap()
}

/// Every tree reachable from `seed` by attaching arrivals up to `n`,
/// each equally likely under uniform attachment.
pub fn all_growths(seed: &ArrivalTree, n: usize) -> Vec<ArrivalTree> {
    let mut frontier = vec![seed.parents().to_vec()];
    for v in seed.n() + 1..=n {
        frontier = frontier
            .into_iter()
            .flat_map(|ps| {
                (1..v).map(move |p| {
                    let mut next = ps.clone();
                    next.push(p);
                    next
                })
            })
            .collect();
    }
    frontier
        .into_iter()
        .map(|ps| ArrivalTree::from_parents(seed.seed_size(), &ps).unwrap())
        .collect()
}

/// Every recursive tree on `n` vertices.
pub fn all_recursive_trees(n: usize) -> Vec<ArrivalTree> {
    all_growths(&ArrivalTree::singleton(), n)
}

fn rooted_code(view: &ShapeView, v: usize, parent: usize) -> String {
    let mut codes: Vec<String> = view
        .neighbors(v)
        .iter()
        .filter(|&&u| u != parent)
        .map(|&u| rooted_code(view, u, v))
        .collect();
    codes.sort();
    format!("({})", codes.concat())
}

/// AHU canonical form of an unrooted tree, rooted at its centroid(s).
pub fn canonical_form(view: &ShapeView) -> String {
    let psi = brute_psi(view);
    let best = (1..=view.n()).map(|v| psi[v]).min().unwrap();
    (1..=view.n())
        .filter(|&v| psi[v] == best)
        .map(|c| rooted_code(view, c, 0))
        .min()
        .unwrap()
}
