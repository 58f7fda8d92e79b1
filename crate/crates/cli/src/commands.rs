use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use muxkit::analytics::{
    naive_group_pmux, optimal_group_pmux, p4_ballistic, p4_blocking, p_bsg, raster_rate, raster_yield,
    required_sources_ratio, yield_max, yield_multi_generator, RasterStrategy,
};
use muxkit::gmzi::{build_gmzi, classify_gmzi_types, reduced_swing_examples, ternary_six_vectors, GroupSpec};
use muxkit::gridmux::{default_config, simulate_grid_yield, GridMuxConfig, GridRouter};
use muxkit::linalg::{equal_up_to_global_phase, DEFAULT_TOL};
use muxkit::logic::{layer_routing_table, wildcard_reduce, TruthTable};
use muxkit::patterns::{
    bell_rail_rearrange_fraction, binning_probability, bsg_usable_patterns, ghz_best_layer, ghz_usable_patterns,
    route_gmzi3_layer_six, route_two_layer_four, search_single_mzi_layer, CoverageReport, MziLayerConfig,
    PhotonPattern, RailBlocks,
};
use muxkit::temporal::{
    de_bruijn, debruijn_pmux_exact, debruijn_pmux_single, enhanced_raster_yield, raster_simulate, reduced_de_bruijn,
    replay_permutation, sort_to_top, spatiotemporal_group_probabilities, temporal_permutation, DelayNetwork,
};
use muxkit::verify::{render_numeric, run_criterion, VerifyOptions, CRITERIA};
use serde_json::json;

use crate::output::{num, Sink, Table};
use crate::{grid, row};
use crate::{AnalyzeArgs, Circuit, Curve, GmziArgs, GridmuxArgs, LogicArgs, NetArgs, SearchArgs, Study, TemporalArgs, VerifyArgs};

pub fn analyze(a: &AnalyzeArgs) -> Result<ExitCode> {
    let sink = Sink::new("analyze", a, None)?;
    let sharing = !a.no_sharing;
    let t = match a.curve {
        Curve::YieldMax => {
            let mut t = Table::new(&["m", "g", "sharing", "lambda", "yield"]);
            let (l, y) = yield_max(a.m, a.g, sharing)?;
            t.push(row![a.m, a.g, sharing.to_string(), l, y]);
            t
        }
        Curve::Yield => {
            let mut t = Table::new(&["lambda", "shared", "unshared"]);
            for l in grid::floats(&a.lambda_grid)? {
                t.push(row![l, yield_multi_generator(l, a.m, a.g, true)?, yield_multi_generator(l, a.m, a.g, false)?]);
            }
            t
        }
        Curve::Pmux => {
            let mut t = Table::new(&["p", "naive", "optimal", "naive_yield", "optimal_yield"]);
            for p in grid::probabilities(&a.p_grid)? {
                let (nv, op) = (naive_group_pmux(a.n, p, a.m)?, optimal_group_pmux(a.n, p, a.m)?);
                let per = a.m as f64 / (a.n as f64 * p);
                t.push(row![p, nv, op, nv * per, op * per]);
            }
            t
        }
        Curve::SourcesRatio => {
            let mut t = Table::new(&["p", "n_naive", "n_optimal", "ratio"]);
            for p in grid::probabilities(&a.p_grid)? {
                let r = required_sources_ratio(p, a.target, a.m)?;
                t.push(row![p, r.n_naive, r.n_optimal, r.ratio]);
            }
            t
        }
        Curve::Bell => {
            let mut t = Table::new(&["p", "ballistic", "blocking"]);
            for p in grid::probabilities(&a.p_grid)? {
                t.push(row![p, p4_ballistic(a.n, p)?, p4_blocking(a.n, p)?]);
            }
            t
        }
        Curve::Bsg => {
            let mut t = Table::new(&["n", "p_bsg"]);
            for n in grid::ints(&a.n_grid)? {
                t.push(row![n, p_bsg(n)?]);
            }
            t
        }
        Curve::Raster => {
            let mut t = Table::new(&["n", "strategy", "rate", "yield"]);
            for n in grid::ints(&a.n_grid)? {
                for s in RasterStrategy::ALL {
                    if n % s.muxes() == 0 {
                        t.push(row![n, s.label(), raster_rate(s, n, a.p)?, raster_yield(s, n, a.p)?]);
                    }
                }
            }
            t
        }
    };
    sink.emit_table(a.csv.as_deref(), &t)?;
    Ok(ExitCode::SUCCESS)
}

fn bits_string(p: &PhotonPattern) -> String {
    (0..p.modes()).map(|i| if p.contains(i) { '1' } else { '0' }).collect()
}

fn coverage_table(layer: &MziLayerConfig, r: &CoverageReport) -> Table {
    let mut t = Table::new(&["pattern", "routable", "swap_mask"]);
    let mut rows: Vec<(String, bool, String)> = r.witnesses.iter().map(|(p, m)| (bits_string(p), true, format!("{m:0w$b}", w = layer.mzis()))).collect();
    rows.extend(r.unroutable.iter().map(|p| (bits_string(p), false, String::new())));
    rows.sort();
    for (p, ok, m) in rows {
        t.push(row![p, ok.to_string(), m]);
    }
    t
}

pub fn search(a: &SearchArgs) -> Result<ExitCode> {
    let sink = Sink::new("search", a, None)?;
    match a.circuit {
        Circuit::Bsg8 | Circuit::Ghz12 => {
            let (layer, r, label) = match a.circuit {
                Circuit::Bsg8 => {
                    let (l, r) = search_single_mzi_layer(8, 4, &bsg_usable_patterns())?;
                    (l, r, "bsg8")
                }
                _ => {
                    let (l, r) = ghz_best_layer();
                    (l.clone(), r.clone(), "ghz12")
                }
            };
            let usable = if label == "bsg8" { bsg_usable_patterns().len() } else { ghz_usable_patterns().len() };
            println!("{label}: {}/{} {}-photon patterns routable by one MZI layer", r.routable_patterns, r.total_patterns, r.photons);
            println!("usable patterns: {usable}");
            println!("MZI pairs: {:?}", layer.pairs);
            if let Some(p) = &a.csv {
                sink.emit_table(Some(p), &coverage_table(&layer, &r))?;
            }
            if let Some(p) = &a.json {
                sink.emit_json(Some(p), &json!({"circuit": label, "layer": layer.pairs, "routable": r.routable_patterns, "total": r.total_patterns, "usable": usable, "unroutable": r.unroutable}))?;
            }
        }
        Circuit::Rails => {
            let asym = bell_rail_rearrange_fraction(RailBlocks::Asymptotic)?;
            let one = bell_rail_rearrange_fraction(RailBlocks::Finite(1))?;
            let bin = binning_probability();
            println!("rail rearrangement, asymptotic: {asym:?} = {}", num(asym.value()));
            println!("rail rearrangement, one block: {one:?} = {}", num(one.value()));
            println!("binning probability: {bin:?} = {}", num(bin.value()));
            if let Some(p) = &a.json {
                sink.emit_json(Some(p), &json!({"asymptotic": asym, "one_block": one, "binning": bin}))?;
            }
        }
        Circuit::FourPhoton | Circuit::SixPhoton => {
            let (modes, k) = if matches!(a.circuit, Circuit::FourPhoton) { (16, 4) } else { (18, 6) };
            let all = PhotonPattern::all_with(modes, k);
            let mut t = Table::new(&["pattern", "routed", "labels"]);
            let mut routed = 0;
            for p in &all {
                let labels = if k == 4 { route_two_layer_four(modes, p).map(|r| r.labels) } else { route_gmzi3_layer_six(modes, p).map(|r| r.labels) };
                let (ok, l) = match labels {
                    Ok(l) => (true, l.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")),
                    Err(_) => (false, String::new()),
                };
                routed += usize::from(ok);
                t.push(row![bits_string(p), ok.to_string(), l]);
            }
            println!("{k}-photon network on {modes} modes: {routed}/{} patterns routed", all.len());
            if let Some(p) = &a.csv {
                sink.emit_table(Some(p), &t)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn gridmux(a: &GridmuxArgs) -> Result<ExitCode> {
    let cfg: GridMuxConfig = match &a.config {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)
            .with_context(|| format!("parsing {}", p.display()))?,
        None => default_config(),
    };
    cfg.validate()?;
    if a.print_config {
        println!("{}", serde_json::to_string_pretty(&cfg)?);
        return Ok(ExitCode::SUCCESS);
    }
    let spec: GroupSpec = a.column_type.parse()?;
    let router = GridRouter::new(&cfg, &spec)?;
    let sink = Sink::new("gridmux", a, Some(a.seed))?;
    let mut t = Table::new(&["p", "yield", "stderr", "bound", "naive", "trials", "seed"]);
    for (i, p) in grid::probabilities(&a.p_grid)?.into_iter().enumerate() {
        let seed = muxkit::simkit::derive_seed(a.seed, i as u64);
        let pt = simulate_grid_yield(&router, p, a.trials, seed)?;
        t.push(row![p, pt.yield_estimate.mean, pt.yield_estimate.stderr, pt.bound, pt.naive, a.trials, seed]);
    }
    sink.emit_table(a.csv.as_deref(), &t)?;
    Ok(ExitCode::SUCCESS)
}

fn strategies(s: &str) -> Result<Vec<RasterStrategy>> {
    if s == "all" {
        return Ok(RasterStrategy::ALL.to_vec());
    }
    s.split(',').map(|x| x.trim().parse::<RasterStrategy>().map_err(Into::into)).collect()
}

pub fn temporal(a: &TemporalArgs) -> Result<ExitCode> {
    let sink = Sink::new("temporal", a, Some(a.seed))?;
    let derive = |i: u64| muxkit::simkit::derive_seed(a.seed, i);
    match a.study {
        Study::Raster => {
            let mut t = Table::new(&["n", "strategy", "yield_closed", "yield_mc", "stderr", "trials", "seed"]);
            for (i, n) in grid::ints(&a.n_grid)?.into_iter().enumerate() {
                for (j, s) in strategies(&a.strategy)?.into_iter().enumerate() {
                    if n % s.muxes() != 0 {
                        continue;
                    }
                    let seed = derive((i * 8 + j) as u64);
                    let sim = raster_simulate(s, n, a.p, false, a.trials, a.periods, seed)?;
                    t.push(row![n, s.label(), raster_yield(s, n, a.p)?, sim.yield_estimate.mean, sim.yield_estimate.stderr, a.trials, seed]);
                }
            }
            sink.emit_table(a.csv.as_deref(), &t)?;
        }
        Study::Enhanced => {
            let s = strategies(&a.strategy)?.first().copied().context("need a strategy")?;
            let mut t = Table::new(&["n", "regular", "regular_stderr", "enhanced", "enhanced_stderr", "enhanced_closed", "trials", "seed"]);
            for (i, n) in grid::ints(&a.n_grid)?.into_iter().enumerate() {
                let seed = derive(i as u64);
                let reg = raster_simulate(s, n, a.p, false, a.trials, a.periods, seed)?;
                let enh = raster_simulate(s, n, a.p, true, a.trials, a.periods, seed)?;
                t.push(row![
                    n,
                    reg.yield_estimate.mean,
                    reg.yield_estimate.stderr,
                    enh.yield_estimate.mean,
                    enh.yield_estimate.stderr,
                    enhanced_raster_yield(s, n, a.p)?,
                    a.trials,
                    seed
                ]);
            }
            sink.emit_table(a.csv.as_deref(), &t)?;
        }
        Study::Debruijn => {
            let net = DelayNetwork::de_bruijn(a.modes, a.bins, a.reduced)?;
            let mut t = Table::new(&["p", "single", "single_closed", "tetris", "gain"]);
            for p in grid::probabilities(&a.p_grid)? {
                let single = debruijn_pmux_exact(&net, p, false)?.p_mux;
                let tetris = debruijn_pmux_exact(&net, p, true)?.p_mux;
                let gain = if single > 0.0 { tetris / single } else { f64::NAN };
                t.push(row![p, single, debruijn_pmux_single(a.modes, a.bins, p), tetris, gain]);
            }
            sink.emit_table(a.csv.as_deref(), &t)?;
        }
        Study::Spatiotemporal => {
            let mut t = Table::new(&["p", "groups_at_least", "probability", "stderr", "trials", "seed"]);
            for (i, p) in grid::probabilities(&a.p_grid)?.into_iter().enumerate() {
                let seed = derive(i as u64);
                let est = spatiotemporal_group_probabilities(a.modes, a.bins, a.group, a.max_cross, a.max_delay, a.max_groups, p, a.trials, seed)?;
                for (k, e) in est.iter().enumerate() {
                    t.push(row![p, k + 1, e.mean, e.stderr, a.trials, seed]);
                }
            }
            sink.emit_table(a.csv.as_deref(), &t)?;
        }
        Study::Permutation => {
            let (schedule, occupied) = match (&a.perm, &a.occupied) {
                (Some(p), None) => {
                    let perm: Vec<usize> = p.split(',').map(|x| x.trim().parse().with_context(|| format!("bad permutation entry {x:?}"))).collect::<Result<_>>()?;
                    let r = perm.len();
                    (temporal_permutation(&perm)?, vec![true; r])
                }
                (None, Some(o)) => {
                    let occ: Vec<bool> = o
                        .chars()
                        .map(|c| match c {
                            '1' => Ok(true),
                            '0' => Ok(false),
                            _ => bail!("occupancy {o:?} must contain only 0 and 1"),
                        })
                        .collect::<Result<_>>()?;
                    (sort_to_top(&occ)?, occ)
                }
                _ => bail!("give exactly one of --perm or --occupied"),
            };
            let arrivals = replay_permutation(&schedule, &occupied)?;
            for x in &arrivals {
                println!("input {} -> output {} at bin {}", x.input, x.output, x.time);
            }
            if let Some(p) = &a.json {
                sink.emit_json(Some(p), &json!({"schedule": schedule, "arrivals": arrivals}))?;
            }
        }
        Study::Sequence => {
            let s = if a.reduced { reduced_de_bruijn(a.modes, a.bins)? } else { de_bruijn(a.modes, a.bins)? };
            let text: String = s.symbols.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(if a.modes > 10 { "," } else { "" });
            println!("{text}");
            if let Some(p) = &a.json {
                sink.emit_json(Some(p), &json!({"k": a.modes, "word_length": a.bins, "reduced": a.reduced, "symbols": s.symbols}))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn gmzi(a: &GmziArgs) -> Result<ExitCode> {
    let sink = Sink::new("gmzi", a, None)?;
    let mut did = false;
    if let Some(n) = a.classify {
        if n == 0 {
            bail!("GMZI size must be at least 1");
        }
        for s in classify_gmzi_types(n) {
            println!("{s}");
        }
        did = true;
    }
    if a.tables {
        for ex in reduced_swing_examples() {
            println!(
                "{}: spec {} offsets [{}] swing {} -> {}",
                ex.label,
                ex.spec,
                ex.offsets.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", "),
                num(ex.swing_before),
                num(ex.swing_after)
            );
        }
        println!("ternary orthogonal set (phases in units of -2π/3):");
        for v in ternary_six_vectors() {
            let idx: Vec<String> = v.angles.iter().map(|&x| format!("{}", (-x * 3.0 / (2.0 * std::f64::consts::PI)).round() as i64)).collect();
            println!("  {}", idx.join(" "));
        }
        did = true;
    }
    if let Some(s) = &a.spec {
        let spec: GroupSpec = s.parse()?;
        let dev = build_gmzi(&spec);
        if a.check {
            let mut bad = 0;
            for k in 0..dev.settings_count() {
                let ok = equal_up_to_global_phase(&dev.setting_matrix_index(k)?, &dev.expected_permutation(k).to_matrix(), DEFAULT_TOL);
                bad += usize::from(!ok);
                println!("setting {k} {:?}: {}", dev.setting_vector(k), if ok { "ok" } else { "MISMATCH" });
            }
            if bad > 0 {
                eprintln!("{bad} settings do not realise their permutation");
                return Ok(ExitCode::FAILURE);
            }
        }
        if a.json.is_some() || !a.check {
            sink.emit_json(a.json.as_deref(), &dev)?;
        }
        did = true;
    }
    if !did {
        bail!("nothing to do: give --spec, --classify or --tables");
    }
    Ok(ExitCode::SUCCESS)
}

fn emit_truth_table(sink: &Sink, path: Option<&Path>, t: &TruthTable) -> Result<()> {
    let (header, rows) = t.records();
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    sink.emit(path, &w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?)
}

pub fn logic(a: &LogicArgs) -> Result<ExitCode> {
    let sink = Sink::new("logic", a, None)?;
    let t = match a.circuit {
        Some(Circuit::Bsg8) => {
            let (layer, _) = search_single_mzi_layer(8, 4, &bsg_usable_patterns())?;
            layer_routing_table(&layer, 4, &bsg_usable_patterns())?
        }
        Some(Circuit::Ghz12) => layer_routing_table(&ghz_best_layer().0, 6, &ghz_usable_patterns())?,
        Some(c) => bail!("no routing table for circuit {c:?}; use bsg8 or ghz12"),
        None => {
            let w = a.width;
            wildcard_reduce(w, a.photons, |ones| Some((0..w).map(|i| ones.contains(&i)).collect()))?
        }
    };
    if t.width <= 20 && !t.is_conflict_free()? {
        bail!("internal error: generated table has conflicting rows");
    }
    eprintln!("{} rows over {} inputs", t.rows.len(), t.width);
    emit_truth_table(&sink, a.csv.as_deref(), &t)?;
    Ok(ExitCode::SUCCESS)
}

pub fn verify(a: &VerifyArgs) -> Result<ExitCode> {
    let ids: Vec<u8> = match &a.only {
        Some(s) => s.split(',').map(|x| x.trim().parse::<u8>().with_context(|| format!("bad criterion id {x:?}"))).collect::<Result<_>>()?,
        None => (1..=CRITERIA as u8).collect(),
    };
    let opts = VerifyOptions { quick: a.quick, seed: a.seed };
    let sink = Sink::new("verify", a, Some(a.seed))?;
    let mut results = Vec::new();
    for id in ids {
        let r = run_criterion(id, &opts)?;
        if a.timings {
            println!("{} ({:.2} s)", r.summary_line(), r.elapsed_secs);
        } else {
            println!("{}", r.summary_line());
        }
        results.push(r);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    if let Some(p) = &a.numeric {
        sink.emit(Some(p), render_numeric(&results).as_bytes())?;
    }
    if let Some(p) = &a.json {
        sink.emit_json(Some(p), &results)?;
    }
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

pub fn net(a: &NetArgs) -> Result<ExitCode> {
    let sink = Sink::new("net", a, None)?;
    let topology: muxkit::netbuilder::Topology = a.topology.parse()?;
    let net = muxkit::netbuilder::build(topology, a.size, a.n)?;
    let m = net.metrics()?;
    println!("{}", serde_json::to_string_pretty(&m)?);
    if let Some(p) = &a.json {
        sink.emit_json(Some(p), &json!({"metrics": m, "network": net.to_record()}))?;
    }
    Ok(ExitCode::SUCCESS)
}
