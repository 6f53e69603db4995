//! Reference computations used as test oracles. None of these call into the
//! library's evaluators; they enumerate or use alternative closed forms.
#![allow(dead_code)]

/// Peak rate via the per-subset-size sum
/// `Σ_{s=1}^{K} C(K,s) q^{s-1} (1-q)^{K-s+1}`, capped by `N(1-q)`.
pub fn peak(m: f64, n: usize, k: usize) -> f64 {
    let nf = n as f64;
    if k == 0 || m >= nf {
        return 0.0;
    }
    if m == 0.0 {
        return nf.min(k as f64);
    }
    let q = m / nf;
    let mut total = 0.0;
    let mut binom = 1.0;
    for s in 1..=k {
        binom *= (k - s + 1) as f64 / s as f64;
        total += binom * q.powi(s as i32 - 1) * (1.0 - q).powi((k - s + 1) as i32);
    }
    total.min(nf * (1.0 - q))
}

/// The two-user, two-file expansion `q(1-q) + 2(1-q)^2`, `q = M/2`.
pub fn peak_two_by_two(m: f64) -> f64 {
    let q = m / 2.0;
    q * (1.0 - q) + 2.0 * (1.0 - q) * (1.0 - q)
}

/// Calls `f(demand, probability)` for every demand vector in `[N]^K`.
pub fn for_each_demand(probs: &[f64], users: usize, mut f: impl FnMut(&[usize], f64)) {
    let n = probs.len();
    let mut d = vec![0usize; users];
    loop {
        let w: f64 = d.iter().map(|&i| probs[i]).product();
        f(&d, w);
        let mut i = 0;
        loop {
            if i == users {
                return;
            }
            d[i] += 1;
            if d[i] < n {
                break;
            }
            d[i] = 0;
            i += 1;
        }
    }
}

fn group_of(boundaries: &[usize], file: usize) -> usize {
    boundaries.windows(2).position(|w| file < w[1]).unwrap()
}

/// `E[Σ_ℓ R(M_ℓ, N_ℓ, K_ℓ)]` by enumerating all demand vectors.
pub fn grouped_rate_by_enumeration(
    probs: &[f64],
    boundaries: &[usize],
    budgets: &[f64],
    users: usize,
) -> f64 {
    let l = boundaries.len() - 1;
    let mut total = 0.0;
    for_each_demand(probs, users, |d, w| {
        let mut counts = vec![0; l];
        for &f in d {
            counts[group_of(boundaries, f)] += 1;
        }
        let r: f64 = (0..l)
            .map(|g| peak(budgets[g], boundaries[g + 1] - boundaries[g], counts[g]))
            .sum();
        total += w * r;
    });
    total
}

/// Expected rate of an idealized realized delivery: per group the cheaper of
/// the XOR scheme (at its peak-rate cost) and sending each distinct requested
/// file's uncached fraction exactly once.
pub fn ideal_min_delivery_rate(
    probs: &[f64],
    boundaries: &[usize],
    budgets: &[f64],
    users: usize,
) -> f64 {
    let l = boundaries.len() - 1;
    let mut total = 0.0;
    for_each_demand(probs, users, |d, w| {
        let mut counts = vec![0; l];
        let mut distinct = vec![std::collections::BTreeSet::new(); l];
        for &f in d {
            let g = group_of(boundaries, f);
            counts[g] += 1;
            distinct[g].insert(f);
        }
        let r: f64 = (0..l)
            .map(|g| {
                let n = boundaries[g + 1] - boundaries[g];
                let xor = peak(budgets[g], n, counts[g]);
                let parity = distinct[g].len() as f64 * (1.0 - budgets[g] / n as f64);
                xor.min(parity)
            })
            .sum();
        total += w * r;
    });
    total
}

/// HPF rates by enumeration: (expected uncached requests, expected distinct uncached files).
pub fn hpf_by_enumeration(probs: &[f64], cached: usize, users: usize) -> (f64, f64) {
    let (mut uni, mut multi) = (0.0, 0.0);
    for_each_demand(probs, users, |d, w| {
        let missing: Vec<usize> = d.iter().copied().filter(|&f| f >= cached).collect();
        let mut distinct = missing.clone();
        distinct.sort_unstable();
        distinct.dedup();
        uni += w * missing.len() as f64;
        multi += w * distinct.len() as f64;
    });
    (uni, multi)
}

/// Number of vectors in `[N]^K` with exactly `j` distinct entries, for `j = 0..=K`.
pub fn distinct_counts_by_enumeration(n: usize, k: usize) -> Vec<u64> {
    let mut counts = vec![0u64; k + 1];
    let uniform = vec![1.0; n];
    for_each_demand(&uniform, k, |d, _| {
        let mut v = d.to_vec();
        v.sort_unstable();
        v.dedup();
        counts[v.len()] += 1;
    });
    counts
}

/// Cut-set bound straight from its definition.
pub fn cutset(m: f64, n: usize, k: usize) -> f64 {
    let mut best: f64 = 0.0;
    for s in 1..=n.min(k) {
        let per = (n / s) as f64;
        best = best.max(s as f64 * (1.0 - m / per).max(0.0));
    }
    best
}

/// Upper 0.1% point of the chi-square distribution with 7 degrees of freedom.
pub const CHI2_7_999: f64 = 24.322;
