//! Brute-force reference computations for combinatorial coverage.
//!
//! Nothing here depends on `combicov-core`. Rows are plain value-index vectors
//! and every count is obtained by walking the whole t-way universe and testing
//! each candidate combination against each row, the opposite direction from
//! the library's record-driven enumeration.

use rand::Rng;

/// Every size-`t` subset of `0..k`, in lexicographic order.
pub fn subsets(k: usize, t: usize) -> Vec<Vec<usize>> {
    fn walk(start: usize, k: usize, t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            walk(i + 1, k, t, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    walk(0, k, t, &mut Vec::new(), &mut out);
    out
}

/// Every t-way combination of the unconstrained universe, as (factor, value) lists.
pub fn universe(domains: &[usize], t: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for subset in subsets(domains.len(), t) {
        let mut values = vec![0usize; t];
        loop {
            out.push(subset.iter().copied().zip(values.iter().copied()).collect());
            let mut exhausted = true;
            for pos in (0..t).rev() {
                values[pos] += 1;
                if values[pos] < domains[subset[pos]] {
                    exhausted = false;
                    break;
                }
                values[pos] = 0;
            }
            if exhausted {
                break;
            }
        }
    }
    out
}

fn appears(combo: &[(usize, usize)], rows: &[Vec<usize>]) -> bool {
    rows.iter()
        .any(|row| combo.iter().all(|&(f, v)| row[f] == v))
}

/// (|D^t|, |U^t|) for an unconstrained schema.
pub fn cc_counts(domains: &[usize], rows: &[Vec<usize>], t: usize) -> (u64, u64) {
    let all = universe(domains, t);
    let covered = all.iter().filter(|c| appears(c, rows)).count();
    (covered as u64, all.len() as u64)
}

/// (|D_T^t \ D_S^t|, |D_T^t|).
pub fn sdcc_counts(
    domains: &[usize],
    target: &[Vec<usize>],
    source: &[Vec<usize>],
    t: usize,
) -> (u64, u64) {
    let mut missing = 0;
    let mut present = 0;
    for combo in universe(domains, t) {
        if appears(&combo, target) {
            present += 1;
            if !appears(&combo, source) {
                missing += 1;
            }
        }
    }
    (missing, present)
}

/// For each target row, how many of its t-way combinations no source row shares.
pub fn missing_per_row(target: &[Vec<usize>], source: &[Vec<usize>], t: usize) -> Vec<usize> {
    let Some(first) = target.first() else {
        return Vec::new();
    };
    let subsets = subsets(first.len(), t);
    target
        .iter()
        .map(|row| {
            subsets
                .iter()
                .filter(|subset| {
                    !source
                        .iter()
                        .any(|other| subset.iter().all(|&f| other[f] == row[f]))
                })
                .count()
        })
        .collect()
}

/// Binomial coefficient by the multiplicative formula.
pub fn choose(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// A random coverage problem over small domains.
#[derive(Debug, Clone)]
pub struct Instance {
    pub domains: Vec<usize>,
    pub target: Vec<Vec<usize>>,
    pub source: Vec<Vec<usize>>,
    pub t: usize,
}

/// Draws an instance with `k <= max_k` factors of 2..=`max_domain` values,
/// up to `max_rows` rows per side and `t <= min(3, k)`.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    max_k: usize,
    max_domain: usize,
    max_rows: usize,
) -> Instance {
    let k = rng.gen_range(1..=max_k);
    let domains: Vec<usize> = (0..k).map(|_| rng.gen_range(2..=max_domain)).collect();
    let t = rng.gen_range(1..=k.min(3));
    let target_len = rng.gen_range(1..=max_rows);
    let source_len = rng.gen_range(0..=max_rows);
    let target = random_rows(rng, &domains, target_len);
    let source = random_rows(rng, &domains, source_len);
    Instance {
        domains,
        target,
        source,
        t,
    }
}

pub fn random_rows<R: Rng>(rng: &mut R, domains: &[usize], n: usize) -> Vec<Vec<usize>> {
    // Skew toward low values so that overlaps and gaps both occur.
    (0..n)
        .map(|_| {
            domains
                .iter()
                .map(|&d| {
                    let a = rng.gen_range(0..d);
                    let b = rng.gen_range(0..d);
                    a.min(b)
                })
                .collect()
        })
        .collect()
}
