//! End-to-end reference checks.
//!
//! Each criterion recomputes a set of anchor numbers from scratch, compares
//! them against independent oracles or the published values, and records
//! the numbers it saw.  The rendered numeric output of a run depends only
//! on the options, never on timing or thread count.

use std::f64::consts::PI;
use std::time::Instant;

use serde::Serialize;

use crate::analytics::{
    enlarged_gmzi_mux_reduction, ghz_improvement_example, p_bsg, raster_rate, raster_yield_max, yield_max,
    RasterStrategy, BSG_LARGE,
};
use crate::gmzi::{
    build_gmzi, classify_gmzi_types, decompose_stages, max_orthogonal_set, pairwise_orthogonal,
    reduced_swing_examples, search_orthogonal_phase_sets, ternary_six_vectors,
};
use crate::gridmux::{default_config, simulate_grid_yield, GridRouter};
use crate::linalg::equal_up_to_global_phase;
use crate::logic::wildcard_reduce;
use crate::patterns::{
    bell_rail_rearrange_fraction, binning_probability, bsg_usable_patterns, ghz_best_layer, ghz_usable_patterns,
    replay_gmzi3_layer_six, replay_two_layer_four, route_gmzi3_layer_six, route_two_layer_four,
    search_single_mzi_layer, Fraction, PhotonPattern, RailBlocks,
};
use crate::simkit::derive_seed;
use crate::temporal::{
    de_bruijn, debruijn_pmux_exact, debruijn_pmux_mc, debruijn_pmux_single, raster_simulate, reduced_de_bruijn,
    replay_permutation, temporal_permutation, window_oracle, DelayNetwork,
};

pub const CRITERIA: usize = 16;
pub const DEFAULT_SEED: u64 = 20_210_301;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyOptions {
    /// Use 10⁴ instead of 10⁵ Monte-Carlo trials.
    pub quick: bool,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { quick: false, seed: DEFAULT_SEED }
    }
}

impl VerifyOptions {
    fn trials(&self) -> u64 {
        if self.quick {
            10_000
        } else {
            100_000
        }
    }

    fn seed_for(&self, id: u8) -> u64 {
        derive_seed(self.seed, id as u64)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Failed sub-checks, empty on success.
    pub failures: Vec<String>,
    /// Named numbers computed along the way.
    pub values: Vec<(String, f64)>,
    pub budget_secs: f64,
    pub elapsed_secs: f64,
}

impl CriterionResult {
    /// `[PASS] 07 yield-maxima` plus the first failure, if any.
    pub fn summary_line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("[{tag}] {:02} {}", self.id, self.name);
        if let Some(f) = self.failures.first() {
            s.push_str(&format!(" — {f}"));
            if self.failures.len() > 1 {
                s.push_str(&format!(" (+{} more)", self.failures.len() - 1));
            }
        }
        s
    }

    /// One `id name key=value` line per recorded number, 12 significant
    /// digits.
    pub fn numeric_lines(&self) -> Vec<String> {
        self.values.iter().map(|(k, v)| format!("{:02} {} {k}={}", self.id, self.name, format_sig(*v, 12))).collect()
    }
}

/// `x` in scientific notation with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), x)
}

/// Accumulates sub-checks and values for one criterion.
struct Check {
    failures: Vec<String>,
    values: Vec<(String, f64)>,
}

impl Check {
    fn new() -> Self {
        Self { failures: Vec::new(), values: Vec::new() }
    }

    fn ok(&mut self, cond: bool, what: impl FnOnce() -> String) {
        if !cond {
            self.failures.push(what());
        }
    }

    fn value(&mut self, name: impl Into<String>, v: f64) {
        self.values.push((name.into(), v));
    }

    /// Record `v` and check `|v − want| ≤ tol`.
    fn near(&mut self, name: &str, v: f64, want: f64, tol: f64) {
        self.value(name, v);
        self.ok((v - want).abs() <= tol, || format!("{name} = {v} not within {tol} of {want}"));
    }

    fn fraction(&mut self, name: &str, got: Fraction, num: u64, den: u64) {
        self.value(name, got.value());
        self.ok(got == Fraction::new(num, den), || format!("{name} = {got:?}, expected {num}/{den}"));
    }
}

type Body = fn(&VerifyOptions, &mut Check) -> crate::Result<()>;

const TABLE: [(&str, f64, Body); CRITERIA] = [
    ("gmzi-classification", 1.0, c01_classification),
    ("gmzi-correctness", 10.0, c02_gmzi_correctness),
    ("phase-offsets-and-ternary-set", 60.0, c03_swing_tables),
    ("swing-bound", 60.0, c04_swing_bound),
    ("pattern-searches", 600.0, c05_pattern_searches),
    ("two-layer-networks", 60.0, c06_two_layer),
    ("yield-maxima", 1.0, c07_yield_maxima),
    ("ghz-example", 60.0, c08_ghz),
    ("bsg-probability", 1.0, c09_bsg),
    ("enlarged-gmzi-reduction", 1.0, c10_enlarged),
    ("rastering", 120.0, c11_rastering),
    ("de-bruijn", 60.0, c12_de_bruijn),
    ("grid-mux", 300.0, c13_gridmux),
    ("temporal-permutations", 60.0, c14_permutations),
    ("logic-tables", 30.0, c15_logic),
    ("reproducibility", 600.0, c16_reproducibility),
];

/// Name of criterion `id` (1-based).
pub fn criterion_name(id: u8) -> Option<&'static str> {
    TABLE.get((id as usize).checked_sub(1)?).map(|t| t.0)
}

/// Run criterion `id` (1..=16).  Runtime over budget counts as a failure.
pub fn run_criterion(id: u8, opts: &VerifyOptions) -> crate::Result<CriterionResult> {
    let Some(&(name, budget, body)) = (id as usize).checked_sub(1).and_then(|i| TABLE.get(i)) else {
        return crate::error::invalid(format!("no criterion {id}; valid ids are 1..={CRITERIA}"));
    };
    let start = Instant::now();
    let mut c = Check::new();
    if let Err(e) = body(opts, &mut c) {
        c.failures.push(format!("error: {e}"));
    }
    let elapsed = start.elapsed().as_secs_f64();
    c.ok(elapsed <= budget, || format!("took {elapsed:.1} s, budget {budget} s"));
    Ok(CriterionResult { id, name, passed: c.failures.is_empty(), failures: c.failures, values: c.values, budget_secs: budget, elapsed_secs: elapsed })
}

pub fn run_all(opts: &VerifyOptions) -> Vec<CriterionResult> {
    (1..=CRITERIA as u8).map(|id| run_criterion(id, opts).expect("id in range")).collect()
}

/// Numeric output of a run: every recorded value, one per line.
pub fn render_numeric(results: &[CriterionResult]) -> String {
    results.iter().flat_map(|r| r.numeric_lines()).map(|l| l + "\n").collect()
}

// ---------------------------------------------------------------------------

/// Partitions of `e` into parts of size at most `max`, by listing them.
fn partitions(e: usize, max: usize) -> usize {
    if e == 0 {
        return 1;
    }
    (1..=max.min(e)).map(|first| partitions(e - first, first)).sum()
}

/// Number of abelian groups of order `n`: product over the prime
/// exponents of the partition counts.
fn abelian_group_count(mut n: usize) -> usize {
    let mut count = 1;
    let mut p = 2;
    while n > 1 {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        count *= partitions(e, e);
        p += 1;
    }
    count
}

fn c01_classification(_: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    let eight: Vec<Vec<usize>> = classify_gmzi_types(8).iter().map(|g| g.factors().to_vec()).collect();
    c.value("types(8)", eight.len() as f64);
    for want in [vec![8], vec![4, 2], vec![2, 2, 2]] {
        c.ok(eight.contains(&want), || format!("classify(8) lacks {want:?}: {eight:?}"));
    }
    c.ok(eight.len() == 3, || format!("classify(8) returned {} specs", eight.len()));
    for n in 2..=16 {
        let got = classify_gmzi_types(n);
        let want = abelian_group_count(n);
        c.value(format!("types({n})"), got.len() as f64);
        c.ok(got.len() == want, || format!("classify({n}) returned {} specs, expected {want}", got.len()));
        c.ok(got.iter().all(|g| g.order() == n), || format!("classify({n}) returned a spec of the wrong order"));
    }
    Ok(())
}

fn c02_gmzi_correctness(_: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    let tol = 1e-9;
    let mut worst_stage = 0.0f64;
    let mut specs = 0;
    for n in 2..=16 {
        for spec in classify_gmzi_types(n) {
            specs += 1;
            let dev = build_gmzi(&spec);
            for k in 0..dev.settings_count() {
                let m = dev.setting_matrix_index(k)?;
                let want = dev.expected_permutation(k);
                c.ok(m.as_monomial(tol).is_some(), || format!("{spec} setting {k} is not a permutation"));
                c.ok(equal_up_to_global_phase(&m, &want.to_matrix(), tol), || format!("{spec} setting {k} differs from the expected permutation"));
                // the routing map read off the matrix agrees with the group law
                c.ok((0..n).all(|t| want.apply(t) == dev.route(k, t)), || format!("{spec} setting {k}: route disagrees with matrix"));
            }
            // Latin square: each row and each column a permutation of 0..n
            let rows_ok = (0..n).all(|k| is_perm((0..n).map(|t| dev.route(k, t)), n));
            let cols_ok = (0..n).all(|t| is_perm((0..n).map(|k| dev.route(k, t)), n));
            c.ok(rows_ok && cols_ok, || format!("{spec}: routing map is not a Latin square"));
            c.ok((0..n).all(|t| (0..n).all(|o| dev.route(dev.setting_for(t, o), t) == o)), || format!("{spec}: setting_for inconsistent"));
            let err = decompose_stages(&spec).product().max_abs_diff(dev.passive());
            worst_stage = worst_stage.max(err);
        }
    }
    c.value("specs", specs as f64);
    c.value("stage_error_max", worst_stage);
    c.ok(worst_stage <= tol, || format!("stage product error {worst_stage:e}"));
    Ok(())
}

fn is_perm(it: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    it.into_iter().all(|x| x < n && !std::mem::replace(&mut seen[x], true))
}

fn c03_swing_tables(_: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    let ex = reduced_swing_examples();
    let find = |l: &str| ex.iter().find(|e| e.label == l);
    for (label, before, after) in [("hadamard-2", PI, PI / 2.0), ("dft-3", 4.0 * PI / 3.0, 2.0 * PI / 3.0)] {
        let Some(e) = find(label) else {
            c.ok(false, || format!("no {label} example"));
            continue;
        };
        c.near(&format!("{label}.swing_before"), e.swing_before, before, 1e-12);
        c.near(&format!("{label}.swing_after"), e.swing_after, after, 1e-12);
    }
    let six = ternary_six_vectors();
    c.value("ternary_vectors", six.len() as f64);
    c.ok(six.len() == 6 && pairwise_orthogonal(&six, 1e-9), || "ternary six-vector set is not pairwise orthogonal".into());
    let alphabet = [0.0, -2.0 * PI / 3.0, -4.0 * PI / 3.0];
    let found = search_orthogonal_phase_sets(&alphabet, 6, 6, Some(1))?;
    let size = found.first().map_or(0, |s| s.len());
    c.value("clique_size(6)", size as f64);
    c.ok(size >= 6 && found.first().is_some_and(|s| pairwise_orthogonal(s, 1e-9)), || format!("clique search found no orthogonal size-6 set (best {size})"));
    Ok(())
}

fn c04_swing_bound(_: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    let alphabet = [0.0, -PI / 2.0];
    for n in 1..=8 {
        let (size, witness) = max_orthogonal_set(&alphabet, n)?;
        let want = if n % 2 == 0 { 2 } else { 1 };
        c.value(format!("max_set({n})"), size as f64);
        c.ok(size == want, || format!("N={n}: largest orthogonal set {size}, expected {want}"));
        c.ok(pairwise_orthogonal(&witness, 1e-9), || format!("N={n}: witness not orthogonal"));
    }
    Ok(())
}

fn c05_pattern_searches(_: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    let t = Instant::now();
    let (_, bsg) = search_single_mzi_layer(8, 4, &bsg_usable_patterns())?;
    let bsg_secs = t.elapsed().as_secs_f64();
    c.value("bsg.routable", bsg.routable_patterns as f64);
    c.value("bsg.total", bsg.total_patterns as f64);
    c.ok((bsg.routable_patterns, bsg.total_patterns) == (66, 70), || format!("BSG layer covers {}/{}", bsg.routable_patterns, bsg.total_patterns));
    c.ok(bsg_secs < 5.0, || format!("66/70 search took {bsg_secs:.1} s"));

    let (_, ghz) = ghz_best_layer();
    c.value("ghz.routable", ghz.routable_patterns as f64);
    c.value("ghz.total", ghz.total_patterns as f64);
    c.ok((ghz.routable_patterns, ghz.total_patterns) == (666, 924), || format!("GHZ layer covers {}/{}", ghz.routable_patterns, ghz.total_patterns));
    c.value("ghz.usable", ghz_usable_patterns().len() as f64);

    let usable = bsg_usable_patterns().len();
    c.value("bsg.usable", usable as f64);
    c.ok(usable == 16, || format!("{usable} usable BSG patterns"));

    c.fraction("rails.asymptotic", bell_rail_rearrange_fraction(RailBlocks::Asymptotic)?, 45, 64);
    c.fraction("rails.finite1", bell_rail_rearrange_fraction(RailBlocks::Finite(1))?, 66, 70);
    c.fraction("binning", binning_probability(), 3, 32);
    Ok(())
}

fn c06_two_layer(_: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    let four = PhotonPattern::all_with(16, 4);
    let ok4 = four
        .iter()
        .filter(|p| {
            route_two_layer_four(16, p).is_ok_and(|r| {
                let mut l = r.labels.clone();
                l.sort_unstable();
                l == [1, 2, 3, 4] && replay_two_layer_four(16, p, &r.layer1, &r.layer2) == Some(r.labels)
            })
        })
        .count();
    c.value("four.routed", ok4 as f64);
    c.value("four.total", four.len() as f64);
    c.ok(ok4 == 1820 && four.len() == 1820, || format!("{ok4}/{} four-photon patterns routed", four.len()));

    let six = PhotonPattern::all_with(18, 6);
    let ok6 = six
        .iter()
        .filter(|p| {
            route_gmzi3_layer_six(18, p).is_ok_and(|r| {
                let mut l = r.labels.clone();
                l.sort_unstable();
                l == [1, 2, 3, 4, 5, 6] && replay_gmzi3_layer_six(p, &r.shifts, &r.layer2) == Some(r.labels)
            })
        })
        .count();
    c.value("six.routed", ok6 as f64);
    c.value("six.total", six.len() as f64);
    c.ok(ok6 == six.len(), || format!("{ok6}/{} six-photon patterns routed", six.len()));
    Ok(())
}

fn c07_yield_maxima(_: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    for (g, want) in [(1, 0.59), (2, 0.76), (3, 0.83)] {
        let (lambda, y) = yield_max(4, g, true)?;
        c.value(format!("lambda_opt(g={g})"), lambda);
        c.near(&format!("yield_max(g={g})"), y, want, 0.01);
    }
    Ok(())
}

fn c08_ghz(_: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    let g = ghz_improvement_example();
    c.value("baseline", g.baseline);
    c.near("factor_mzi", g.factor_mzi, 7.0, 0.2);
    c.near("factor_optimal", g.factor_optimal, 22.0, 1.0);
    c.near("factor_doubled", g.factor_doubled, 21.0, 1.0);
    Ok(())
}

fn c09_bsg(_: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    let p8 = p_bsg(8)?;
    c.value("p_bsg(8)", p8);
    c.ok(p8 == 3.0 / 16.0, || format!("P_BSG(8) = {p8}, expected 3/16"));
    let p512 = p_bsg(512)?;
    c.value("p_bsg(512)", p512);
    c.ok(BSG_LARGE == 3.0 / 32.0 && (p512 / (3.0 / 32.0) - 1.0).abs() <= 0.01, || format!("P_BSG(512) = {p512} not within 1% of 3/32"));
    Ok(())
}

fn c10_enlarged(_: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    c.near("reduction", enlarged_gmzi_mux_reduction(0.99)?, 1.555, 0.005);
    Ok(())
}

fn c11_rastering(o: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    let seed = o.seed_for(11);
    let trials = o.trials();
    let p = 0.05;
    for (i, strategy) in RasterStrategy::ALL.into_iter().enumerate() {
        for n in [16u64, 48, 96] {
            let sim = raster_simulate(strategy, n, p, false, trials, 1, derive_seed(seed, (i * 1000) as u64 + n))?;
            let want = raster_rate(strategy, n, p)?;
            let name = format!("rate({},{n})", strategy.label());
            c.value(name.clone(), sim.groups.mean);
            c.ok(sim.groups.within_sigma(want, 3.0), || format!("{name}: MC {} vs {want} (z = {:.2})", sim.groups.mean, sim.groups.z_score(want)));
        }
    }
    let (np, ymax) = raster_yield_max(RasterStrategy::I, p)?;
    c.value("raster_max.Np", np);
    c.near("raster_max.yield", ymax, 0.29, 0.01);
    let enh_trials = trials / 5;
    for n in (8..=128).step_by(8) {
        let s = derive_seed(seed, 10_000 + n);
        let reg = raster_simulate(RasterStrategy::I, n, p, false, enh_trials, 4, s)?;
        let enh = raster_simulate(RasterStrategy::I, n, p, true, enh_trials, 4, s)?;
        c.value(format!("regular({n})"), reg.yield_estimate.mean);
        c.value(format!("enhanced({n})"), enh.yield_estimate.mean);
        c.ok(enh.yield_estimate.mean >= reg.yield_estimate.mean, || format!("N={n}: enhanced below regular"));
        if n <= 48 {
            c.ok(enh.yield_estimate.mean > reg.yield_estimate.mean, || format!("N={n}: enhanced not strictly above regular"));
        }
    }
    Ok(())
}

fn c12_de_bruijn(o: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    let mut checked = 0;
    for k in 2..=64usize {
        for l in 1..=12usize {
            let words = k.pow(l as u32);
            if words > 4096 {
                break;
            }
            checked += 1;
            let s = de_bruijn(k, l)?;
            c.ok(s.len() == words && window_oracle(&s.symbols, k, l, false), || format!("de Bruijn ({k},{l}) fails the window oracle"));
            let r = reduced_de_bruijn(k, l)?;
            let want = words - (k - 1).pow(l as u32);
            c.ok(r.len() == want, || format!("reduced ({k},{l}) has length {}, expected {want}", r.len()));
            c.ok(window_oracle(&r.symbols, k, l, true), || format!("reduced ({k},{l}) fails the window oracle"));
        }
    }
    c.value("sequences_checked", checked as f64);

    let full = DelayNetwork::de_bruijn(4, 4, false)?;
    let reduced = DelayNetwork::de_bruijn(4, 4, true)?;
    let closed = debruijn_pmux_single(4, 4, 0.25);
    for (tag, net) in [("full", &full), ("reduced", &reduced)] {
        let plain = debruijn_pmux_exact(net, 0.25, false)?.p_mux;
        c.value(format!("p_mux.single.{tag}"), plain);
        c.ok((plain - closed).abs() <= 1e-12, || format!("{tag}: enumerated {plain} vs closed form {closed}"));
        c.ok(format!("{plain:.4}") == "0.2184", || format!("{tag}: single-configuration p_mux {plain:.6} does not round to 0.2184"));
        let tetris = debruijn_pmux_exact(net, 0.25, true)?.p_mux;
        c.near(&format!("p_mux.tetris.{tag}"), tetris, 0.56, 0.03);
    }
    // Monte-Carlo route to the same numbers
    let (mc_plain, mc_tetris) = debruijn_pmux_mc(&reduced, 0.25, o.trials(), o.seed_for(12))?;
    let exact_t = debruijn_pmux_exact(&reduced, 0.25, true)?.p_mux;
    c.value("p_mux.single.mc", mc_plain.mean);
    c.value("p_mux.tetris.mc", mc_tetris.mean);
    c.ok(mc_plain.within_sigma(closed, 4.0) && mc_tetris.within_sigma(exact_t, 4.0), || "Monte-Carlo p_mux disagrees with enumeration".into());
    Ok(())
}

fn c13_gridmux(o: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    let cfg = default_config();
    let router = GridRouter::new(&cfg, &crate::gmzi::GroupSpec::hadamard(4))?;
    for (i, p) in [0.05, 0.1, 0.15].into_iter().enumerate() {
        let pt = simulate_grid_yield(&router, p, o.trials(), derive_seed(o.seed_for(13), i as u64))?;
        let y = pt.yield_estimate;
        c.value(format!("yield({p})"), y.mean);
        c.value(format!("stderr({p})"), y.stderr);
        c.value(format!("bound({p})"), pt.bound);
        c.value(format!("naive({p})"), pt.naive);
        c.ok(y.mean <= pt.bound + 3.0 * y.stderr, || format!("p={p}: yield {} above bound {}", y.mean, pt.bound));
        c.ok(y.mean >= pt.naive, || format!("p={p}: yield {} below naive {}", y.mean, pt.naive));
    }
    Ok(())
}

fn permutations(r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(r - 1) {
        for pos in 0..r {
            let mut q = p.clone();
            q.insert(pos, r - 1);
            out.push(q);
        }
    }
    out
}

fn c14_permutations(_: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    for r in 1..=5 {
        let mut realised = 0;
        let mut times = std::collections::BTreeSet::new();
        let all = permutations(r);
        for perm in &all {
            let s = temporal_permutation(perm)?;
            match replay_permutation(&s, &vec![true; r]) {
                Ok(out) if out.len() == r && out.iter().all(|a| a.output == perm[a.input]) => {
                    realised += 1;
                    times.extend(out.iter().map(|a| a.time));
                }
                Ok(_) => c.ok(false, || format!("{perm:?} replays to the wrong outputs")),
                Err(e) => c.ok(false, || format!("{perm:?}: {e}")),
            }
        }
        c.value(format!("realised(R={r})"), realised as f64);
        c.ok(realised == all.len() && all.len() == (1..=r).product::<usize>(), || format!("R={r}: {realised}/{} permutations", all.len()));
        c.ok(times.len() == 1, || format!("R={r}: output times {times:?} depend on the permutation"));
        if let Some(&t) = times.iter().next() {
            c.value(format!("output_time(R={r})"), t as f64);
        }
    }
    Ok(())
}

fn c15_logic(_: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    let mut total_rows = 0u64;
    for b in 1..=12usize {
        for n in 0..=b {
            // outputs: one bit per port, set iff that port is selected
            let t = wildcard_reduce(b, n, |ones| Some((0..b).map(|i| ones.contains(&i)).collect()))?;
            let want = crate::analytics::choose(b as u64, n as u64);
            total_rows += t.rows.len() as u64;
            c.ok(t.rows.len() as u128 == want, || format!("B={b}, n={n}: {} rows, expected {want}", t.rows.len()));
            let mut ok = true;
            for x in 0u64..1 << b {
                let hits = t.matching_rows(x);
                if x.count_ones() < n as u32 {
                    ok &= hits == 0;
                    continue;
                }
                // exactly one row, selecting the first n photons, blocking the rest
                let mut first = x;
                for _ in n..x.count_ones() as usize {
                    first &= !(1u64 << (63 - first.leading_zeros()));
                }
                let out = t.lookup(x);
                ok &= hits == 1 && (0..b).all(|i| out[i] == (first >> i & 1 == 1));
            }
            c.ok(ok, || format!("B={b}, n={n}: table incomplete or selects the wrong ports"));
            let free = t.is_conflict_free()?;
            c.ok(free, || format!("B={b}, n={n}: conflicting rows"));
        }
    }
    c.value("rows_total", total_rows as f64);
    Ok(())
}

fn c16_reproducibility(o: &VerifyOptions, c: &mut Check) -> crate::Result<()> {
    // the stochastic criteria, twice on the global pool and once on a
    // single thread
    let run = || -> crate::Result<String> {
        let mut out = String::new();
        for (id, body) in [(11u8, c11_rastering as Body), (12, c12_de_bruijn), (13, c13_gridmux)] {
            let mut inner = Check::new();
            body(o, &mut inner)?;
            let r = CriterionResult { id, name: "", passed: true, failures: vec![], values: inner.values, budget_secs: 0.0, elapsed_secs: 0.0 };
            out.push_str(&render_numeric(std::slice::from_ref(&r)));
        }
        Ok(out)
    };
    let a = run()?;
    let b = run()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| crate::Error::Internal(e.to_string()))?;
    let single = pool.install(run)?;
    c.value("bytes", a.len() as f64);
    c.ok(a == b, || "repeated runs differ".into());
    c.ok(a == single, || "single-threaded run differs".into());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_oracle() {
        // p(0..=6) and the group counts of 16, 72
        let p: Vec<usize> = (0..=6).map(|e| partitions(e, e)).collect();
        assert_eq!(p, vec![1, 1, 2, 3, 5, 7, 11]);
        assert_eq!(abelian_group_count(16), 5);
        assert_eq!(abelian_group_count(72), 6);
    }

    #[test]
    fn formatting() {
        assert_eq!(format_sig(0.5, 12), "5.00000000000e-1");
        assert_eq!(format_sig(1820.0, 3), "1.82e3");
        assert_eq!(criterion_name(7), Some("yield-maxima"));
        assert_eq!(criterion_name(0), None);
        assert!(run_criterion(17, &VerifyOptions::default()).is_err());
    }

    #[test]
    fn fast_criteria_pass() {
        let o = VerifyOptions { quick: true, ..Default::default() };
        for id in [1, 7, 9, 10, 14] {
            let r = run_criterion(id, &o).unwrap();
            assert!(r.passed, "{}", r.summary_line());
        }
    }
}
