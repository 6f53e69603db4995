//! One PASS/FAIL line per acceptance criterion; exits nonzero on any failure.

mod oracles;

use std::process::Command;
use std::time::{Duration, Instant};

use coded_caching::allocator::{optimize_allocation, tradeoff_curve, CurveOptions, MemoryAllocation, Scheme, Strategy};
use coded_caching::analytic::{
    cutset_lower_bound, grouped_expected_rate_exact, grouped_rate_jensen, hpf_expected_rate,
    peak_rate, theorem2_lower_bound, HpfMode,
};
use coded_caching::bitsim::{place, simulate_expected_rate, Library, SimParams};
use coded_caching::popularity::{group_count_bound, partition_factor_two, FileGrouping, PopularityProfile};
use coded_caching::probability::{coupon_bound_check, distinct_count_distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXACT_TOL: f64 = 1e-12;
const JENSEN_TOL: f64 = 1e-9;
const SIM_REL_TOL: f64 = 0.05;
const SUBFILE_SIGMAS: f64 = 3.0;
const PMF_TOL: f64 = 1e-14;
const HEAD_GAIN: f64 = 0.10;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn within(elapsed: Duration, limit_secs: u64, v: Verdict) -> Verdict {
    let ok = v.ok && elapsed <= Duration::from_secs(limit_secs);
    verdict(ok, format!("{} [{:.2}s, limit {limit_secs}s]", v.detail, elapsed.as_secs_f64()))
}

fn peak_rate_point_check() -> Verdict {
    let at_one = peak_rate(1.0, 2, 2.0).unwrap();
    let mut worst: f64 = 0.0;
    for i in 1..=20 {
        let m = i as f64 / 10.0;
        let closed = (m / 2.0) * (1.0 - m / 2.0) + 2.0 * (1.0 - m / 2.0).powi(2);
        worst = worst.max((peak_rate(m, 2, 2.0).unwrap() - closed).abs());
    }
    verdict(at_one == 0.75 && worst <= EXACT_TOL, format!("R(1,2,2) = {at_one}, max grid error {worst:.2e}"))
}

fn hpf_example() -> Verdict {
    let p = PopularityProfile::new(vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
    let uni = hpf_expected_rate(&p, 1, 2, HpfMode::Unicast).unwrap();
    let multi = hpf_expected_rate(&p, 1, 2, HpfMode::Multicast).unwrap();
    let ok = (uni - 2.0 / 3.0).abs() <= EXACT_TOL && (multi - 5.0 / 9.0).abs() <= EXACT_TOL;
    verdict(ok, format!("unicast {uni:.15}, multicast {multi:.15}"))
}

fn zipf_grouping() -> Verdict {
    let p = PopularityProfile::zipf(500, 0.5).unwrap();
    let sizes = partition_factor_two(&p).sizes();
    let bound = group_count_bound(&p);
    verdict(sizes == [4, 12, 48, 192, 244] && bound == 5, format!("sizes {sizes:?}, log bound {bound}"))
}

fn simulation_vs_analytic() -> Verdict {
    let p = PopularityProfile::uniform(4).unwrap();
    let g = FileGrouping::single(&p);
    let a = MemoryAllocation::new(vec![2.0]).unwrap();
    let params = SimParams::new(1 << 17);
    match simulate_expected_rate(&params, &p, &g, &a, 4, 50, 2024) {
        Ok(s) => {
            let r = peak_rate(2.0, 4, 4.0).unwrap();
            let rel = (s.mean - r) / r;
            verdict(rel.abs() <= SIM_REL_TOL, format!("mean {:.5} vs {r}, relative {rel:+.4}, 50/50 decoded", s.mean))
        }
        Err(e) => verdict(false, format!("simulation failed: {e}")),
    }
}

fn subfile_concentration() -> Verdict {
    let f = 100_000;
    let p = PopularityProfile::uniform(2).unwrap();
    let g = FileGrouping::single(&p);
    let a = MemoryAllocation::new(vec![1.0]).unwrap();
    let lib = Library::generate(2, f, 0).unwrap();
    let cache = place(&lib, &g, &a, 2, 17).unwrap();
    let sd = (f as f64 * 0.25 * 0.75).sqrt();
    let mut worst: f64 = 0.0;
    for n in 0..2 {
        for (mask, &size) in cache.subfile_sizes(n).unwrap().iter().enumerate() {
            let s = (mask as u32).count_ones() as i32;
            let expected = f as f64 * 0.5f64.powi(s) * 0.5f64.powi(2 - s);
            worst = worst.max((size as f64 - expected).abs() / sd);
        }
    }
    verdict(worst <= SUBFILE_SIGMAS, format!("largest deviation {worst:.3} sd"))
}

struct Instance {
    grouping: FileGrouping,
    memory: f64,
    users: usize,
}

// Descending popularities drawn as powers of two times a jitter inside [1, 2),
// so every factor-two group is a contiguous run of one exponent.
fn random_instances() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    (0..100)
        .map(|_| {
            let n = rng.gen_range(2..=32);
            let levels = rng.gen_range(1..=5);
            let mut w: Vec<f64> = (0..n)
                .map(|_| 2f64.powi(-rng.gen_range(0..levels)) * rng.gen_range(1.0..1.999))
                .collect();
            w.sort_by(|a, b| b.total_cmp(a));
            let p = PopularityProfile::from_weights(w).unwrap();
            Instance {
                grouping: partition_factor_two(&p),
                memory: rng.gen_range(0.0..=n as f64),
                users: rng.gen_range(1..=16),
            }
        })
        .collect()
}

fn jensen_ordering(instances: &[Instance]) -> Verdict {
    let mut worst = f64::NEG_INFINITY;
    for inst in instances {
        for strategy in [Strategy::Uniform, Strategy::Optimized] {
            let a = optimize_allocation(&inst.grouping, inst.memory, inst.users, strategy).unwrap();
            let exact = grouped_expected_rate_exact(&inst.grouping, &a, inst.users).unwrap();
            let jensen = grouped_rate_jensen(&inst.grouping, &a, inst.users).unwrap();
            worst = worst.max(exact - jensen);
        }
    }
    verdict(worst <= JENSEN_TOL, format!("max(exact - jensen) = {worst:.3e} over {} instances", instances.len()))
}

// The upper side is read as the bicriteria guarantee: the grouped scheme with
// the full memory M in every group (total L·M) is within 864·L of the lower
// bound at memory M.
fn theorem_sandwich(instances: &[Instance]) -> Verdict {
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    for inst in instances {
        let (g, m, k) = (&inst.grouping, inst.memory, inst.users);
        let l = g.num_groups();
        let lower = theorem2_lower_bound(g, m, k).unwrap();
        let uniform = optimize_allocation(g, m, k, Strategy::Uniform).unwrap();
        let upper = grouped_expected_rate_exact(g, &uniform, k).unwrap();
        if lower > upper + EXACT_TOL {
            violations += 1;
        }
        let scaled = MemoryAllocation::new((0..l).map(|i| m.min(g.size(i) as f64)).collect()).unwrap();
        let upper_scaled = grouped_expected_rate_exact(g, &scaled, k).unwrap();
        if lower > 0.0 {
            let ratio = upper_scaled / lower / (864.0 * l as f64);
            worst_ratio = worst_ratio.max(ratio);
            if ratio > 1.0 + EXACT_TOL {
                violations += 1;
            }
        }
    }
    let mut cut_checked = 0;
    let mut cut_worst = f64::INFINITY;
    for n in 1..=32usize {
        for k in 1..=32usize {
            for half in 0..=2 * n {
                let m = half as f64 / 2.0;
                let r = peak_rate(m, n, k as f64).unwrap();
                let c = cutset_lower_bound(m, n, k);
                cut_checked += 1;
                if r > 0.0 {
                    cut_worst = cut_worst.min(12.0 * c / r);
                }
                if c < r / 12.0 - EXACT_TOL {
                    violations += 1;
                }
            }
        }
    }
    verdict(
        violations == 0,
        format!(
            "{violations} violations; max ratio/(864L) {worst_ratio:.3e}; min 12·cutset/R {cut_worst:.3} over {cut_checked} points"
        ),
    )
}

fn coupon_collector() -> Verdict {
    let mut failures = Vec::new();
    for n in 1..=16 {
        for k in 1..=16 {
            if !coupon_bound_check(n, k).unwrap().holds {
                failures.push((n, k));
            }
        }
    }
    let mut worst: f64 = 0.0;
    for n in 1..=6usize {
        for k in 1..=6usize {
            let counts = oracles::distinct_counts_by_enumeration(n, k);
            let total = (n as f64).powi(k as i32);
            let dist = distinct_count_distribution(n, k).unwrap();
            for (j, &c) in counts.iter().enumerate() {
                worst = worst.max((dist.prob(j) - c as f64 / total).abs());
            }
        }
    }
    verdict(
        failures.is_empty() && worst <= PMF_TOL,
        format!("bound fails at {failures:?}; max pmf error vs enumeration {worst:.2e}"),
    )
}

fn nonuniform_win() -> Verdict {
    let p = PopularityProfile::head_tail(1000, 60, 2.0).unwrap();
    let mut grid: Vec<f64> = (0..20).map(|i| i as f64 * 50.0).collect();
    grid.push(60.0);
    grid.sort_by(f64::total_cmp);
    let schemes = [Scheme::HpfUnicast, Scheme::GroupedOptimized];
    let curve = tradeoff_curve(&p, 300, &grid, &schemes, CurveOptions::default()).unwrap();
    let mut worse = Vec::new();
    let mut gain = 0.0;
    for pt in &curve.points {
        let (hpf, grouped) = (pt.rates[&Scheme::HpfUnicast], pt.rates[&Scheme::GroupedOptimized]);
        if grouped > hpf + EXACT_TOL {
            worse.push(pt.memory);
        }
        if pt.memory == 60.0 {
            gain = 1.0 - grouped / hpf;
        }
    }
    verdict(
        worse.is_empty() && gain > HEAD_GAIN,
        format!("grouped above hpf at {worse:?}; reduction at M=60 {:.1}%", 100.0 * gain),
    )
}

fn determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_coded-caching");
    let commands: [&[&str]; 3] = [
        &["simulate", "--files", "6", "--alpha", "0.8", "--grouping", "factor_two", "--M", "1.5",
          "--K", "3", "--trials", "8", "--file-bits", "2048", "--seed", "77", "--dump-transcript"],
        &["tradeoff", "--files", "40", "--alpha", "0.9", "--users", "10"],
        &["coupon", "--files", "9", "--users", "7"],
    ];
    let mut differing = Vec::new();
    for args in commands {
        let runs: Vec<Vec<u8>> = (0..2)
            .map(|_| {
                let out = Command::new(bin).args(args).output().expect("binary runs");
                assert!(out.status.success(), "{args:?}");
                out.stdout
            })
            .collect();
        if runs[0] != runs[1] || runs[0].is_empty() {
            differing.push(args[0]);
        }
    }
    verdict(differing.is_empty(), format!("3 commands x 2 runs, differing: {differing:?}"))
}

type Criterion<'a> = (&'static str, u64, Box<dyn Fn() -> Verdict + 'a>);

fn main() {
    let instances = random_instances();
    let criteria: Vec<Criterion> = vec![
        ("peak rate point check", 1, Box::new(peak_rate_point_check)),
        ("HPF example rates", 1, Box::new(hpf_example)),
        ("Zipf factor-two grouping", 1, Box::new(zipf_grouping)),
        ("simulation vs analytic", 60, Box::new(simulation_vs_analytic)),
        ("subfile concentration", 5, Box::new(subfile_concentration)),
        ("Jensen ordering", 30, Box::new(|| jensen_ordering(&instances))),
        ("lower/upper sandwich", 60, Box::new(|| theorem_sandwich(&instances))),
        ("coupon collector", 30, Box::new(coupon_collector)),
        ("nonuniform win over HPF", 120, Box::new(nonuniform_win)),
        ("determinism", 120, Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let v = within(start.elapsed(), *limit, v);
        let tag = if v.ok { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {}", i + 1, v.detail);
        failed += usize::from(!v.ok);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
