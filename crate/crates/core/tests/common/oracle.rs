//! Brute-force path distances: every monotone warping path is enumerated
//! explicitly and scored on its own.

/// All monotone paths from `(0, 0)` to `(n - 1, m - 1)` using unit steps
/// right, down or diagonal.
pub fn warping_paths(n: usize, m: usize) -> Vec<Vec<(usize, usize)>> {
    fn walk(i: usize, j: usize, n: usize, m: usize, path: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        path.push((i, j));
        if i == n - 1 && j == m - 1 {
            out.push(path.clone());
        } else {
            if i + 1 < n && j + 1 < m {
                walk(i + 1, j + 1, n, m, path, out);
            }
            if i + 1 < n {
                walk(i + 1, j, n, m, path, out);
            }
            if j + 1 < m {
                walk(i, j + 1, n, m, path, out);
            }
        }
        path.pop();
    }
    let mut out = Vec::new();
    walk(0, 0, n, m, &mut Vec::new(), &mut out);
    out
}

fn local(a: [f64; 2], b: [f64; 2], clamp: Option<f64>) -> (f64, bool) {
    let raw = (a[0] - b[0]).hypot(a[1] - b[1]);
    match clamp {
        Some(delta) if raw > delta => (delta, true),
        _ => (raw, false),
    }
}

/// Mean clamped cost of the cheapest warping path (ties: shorter path, then
/// unclamped path). Returns `(distance, clamped)`.
pub fn dtw(x: &[[f64; 2]], y: &[[f64; 2]], clamp: Option<f64>) -> (f64, bool) {
    let mut best: Option<(f64, usize, bool)> = None;
    for path in warping_paths(x.len(), y.len()) {
        let mut cost = 0.0;
        let mut clamped = false;
        for (k, &(i, j)) in path.iter().enumerate() {
            let (c, was) = local(x[i], y[j], clamp);
            cost = if k == 0 { c } else { cost + c };
            clamped |= was;
        }
        let key = (cost, path.len(), clamped);
        if best.is_none_or(|b| key < b) {
            best = Some(key);
        }
    }
    let (cost, len, clamped) = best.expect("at least one path");
    (cost / len as f64, clamped)
}

/// Smallest leash over all couplings, with local distances clamped first.
pub fn frechet(x: &[[f64; 2]], y: &[[f64; 2]], clamp: Option<f64>) -> (f64, bool) {
    let mut best: Option<(f64, bool)> = None;
    for path in warping_paths(x.len(), y.len()) {
        let mut leash = 0.0f64;
        let mut clamped = false;
        for &(i, j) in &path {
            let (c, was) = local(x[i], y[j], clamp);
            leash = leash.max(c);
            clamped |= was;
        }
        let key = (leash, clamped);
        if best.is_none_or(|b| key < b) {
            best = Some(key);
        }
    }
    best.expect("at least one path")
}
