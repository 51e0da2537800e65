//! Zhang–Suen thinning followed by staircase removal.
//!
//! Plain Zhang–Suen leaves "staircase" pixels on diagonal runs, where a pixel
//! and both of two perpendicular 4-neighbours are set. Those pixels give the
//! skeleton spurious 3- and 4-neighbour junctions. After Zhang–Suen converges,
//! a sequential raster pass deletes such pixels when their neighbourhood stays
//! 8-connected without them. The two stages alternate until neither changes
//! anything, so the result is a fixed point and thinning is idempotent.
//!
//! Zhang–Suen alone erases a 2x2 block completely. A sub-iteration that would
//! clear every pixel of a component keeps that component's first pixel in
//! raster order, so the component count never changes.

use super::mask::Mask;

/// Thins `mask` to a 1-pixel-wide, 8-connected skeleton.
pub fn thin(mask: &Mask) -> Mask {
    let mut current = mask.clone();
    loop {
        let zs_changed = zhang_suen(&mut current);
        let stair_changed = remove_staircases(&mut current);
        if !zs_changed && !stair_changed {
            return current;
        }
    }
}

/// Runs both sub-iterations until convergence. Returns whether any pixel was
/// cleared.
fn zhang_suen(mask: &mut Mask) -> bool {
    let mut any = false;
    loop {
        let first = sub_iteration(mask, true);
        let second = sub_iteration(mask, false);
        if !first && !second {
            return any;
        }
        any = true;
    }
}

fn sub_iteration(mask: &mut Mask, first: bool) -> bool {
    let mut doomed: Vec<(u32, u32)> = mask
        .pixels()
        .filter(|&(x, y)| {
            let p = mask.ring(x, y);
            let [n, _, e, _, s, _, w, _] = p;
            let b = p.iter().filter(|v| **v).count();
            let a = (0..8).filter(|&i| !p[i] && p[(i + 1) % 8]).count();
            let directional = if first {
                !(n && e && s) && !(e && s && w)
            } else {
                !(n && e && w) && !(n && s && w)
            };
            (2..=6).contains(&b) && a == 1 && directional
        })
        .collect();
    spare_vanishing_components(mask, &mut doomed);
    for &(x, y) in &doomed {
        mask.set(x, y, false);
    }
    !doomed.is_empty()
}

fn spare_vanishing_components(mask: &Mask, doomed: &mut Vec<(u32, u32)>) {
    if doomed.is_empty() {
        return;
    }
    let doomed_set: std::collections::HashSet<(u32, u32)> = doomed.iter().copied().collect();
    let mut keep = Vec::new();
    for component in mask.components() {
        if component.iter().all(|p| doomed_set.contains(p)) {
            let first = *component.iter().min_by_key(|&&(x, y)| (y, x)).expect("non-empty");
            keep.push(first);
        }
    }
    doomed.retain(|p| !keep.contains(p));
}

fn remove_staircases(mask: &mut Mask) -> bool {
    let mut changed = false;
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if !mask.get(x as i64, y as i64) {
                continue;
            }
            let p = mask.ring(x, y);
            let [n, _, e, _, s, _, w, _] = p;
            let corner = (n && e) || (e && s) || (s && w) || (w && n);
            if corner && ring_components(&p) == 1 {
                mask.set(x, y, false);
                changed = true;
            }
        }
    }
    changed
}

/// Number of 8-connected groups among the set neighbours of a pixel, the
/// pixel itself excluded.
fn ring_components(p: &[bool; 8]) -> usize {
    let mut parent: [usize; 8] = std::array::from_fn(|i| i);
    fn find(parent: &mut [usize; 8], mut i: usize) -> usize {
        while parent[i] != i {
            i = parent[i];
        }
        i
    }
    for i in 0..8 {
        for j in 0..8 {
            if i == j || !p[i] || !p[j] {
                continue;
            }
            let gap = (j + 8 - i) % 8;
            // ring-consecutive, or two 4-neighbours diagonal to each other
            let adjacent = gap == 1 || gap == 7 || (i % 2 == 0 && j % 2 == 0 && (gap == 2 || gap == 6));
            if adjacent {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut roots: Vec<usize> = (0..8).filter(|&i| p[i]).map(|i| find(&mut parent, i)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}
