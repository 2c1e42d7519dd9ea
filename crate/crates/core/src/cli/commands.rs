use std::fs::File;
use std::io::{BufReader, Write};
use std::time::Instant;

use anyhow::{Context, Result};
use serde_json::json;

use consensus_lab::graph::{
    build_laplacian, mirror_graph, read_graph, structural_facts, Family, Graph, LaplacianKind,
};
use consensus_lab::scaling::{find_critical_n, SweepSpec};
use consensus_lab::sim::{
    classify_against_report, integrate, write_trace_binary, write_trace_csv, InitialCondition,
    SimConfig,
};
use consensus_lab::spectral::{algebraic_connectivity, connectivity_bound, spectrum, BoundKind};
use consensus_lab::stability::{assess, Gains, Mode};

use super::output::{num, OutDir};
use super::{
    Cli, Command, CriticalArgs, GraphArgs, ModeArgs, ModeFlag, SimulateArgs, SpectrumArgs,
    StabilityArgs,
};

/// Bad flag combinations; maps to exit code 1.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

/// Runs one subcommand and returns the process exit code.
pub fn run(cli: &Cli) -> Result<u8> {
    let start = Instant::now();
    let mut out = OutDir::create(&cli.out)?;
    let (code, seed, result) = match &cli.command {
        Command::Spectrum(a) => (
            cmd_spectrum(a, &mut out)?,
            a.graph.seed,
            serde_json::Value::Null,
        ),
        Command::Stability(a) => {
            let (code, json) = cmd_stability(a, &mut out)?;
            (code, a.graph.seed, json)
        }
        Command::CriticalN(a) => {
            let json = cmd_critical_n(a, &mut out)?;
            (0, a.graph.seed, json)
        }
        Command::Simulate(a) => {
            let json = cmd_simulate(a, &mut out)?;
            (0, a.graph.seed, json)
        }
        Command::Bounds(a) => {
            let g = load_graph(&a.graph)?;
            let kinds = bound_kinds(&a.bounds, &a.graph, a.c2, a.leader)?;
            write_bounds(&g, &a.graph, &kinds, &mut out)?;
            (0, a.graph.seed, serde_json::Value::Null)
        }
    };
    let name = match &cli.command {
        Command::Spectrum(_) => "spectrum",
        Command::Stability(_) => "stability",
        Command::CriticalN(_) => "critical-n",
        Command::Simulate(_) => "simulate",
        Command::Bounds(_) => "bounds",
    };
    out.finish(name, cli, seed, start.elapsed(), result)?;
    Ok(code)
}

fn single_q(args: &GraphArgs) -> Result<usize> {
    match args.q.as_slice() {
        [q] => Ok(*q),
        _ => usage("--q takes a single value here"),
    }
}

fn family(args: &GraphArgs, q: usize) -> Result<Family> {
    let Some(tag) = &args.family else {
        return usage("either --family or --file is required");
    };
    Ok(Family::from_tag(tag, q, args.r, args.d, args.seed, args.w)?)
}

fn load_graph(args: &GraphArgs) -> Result<Graph> {
    if let Some(path) = &args.file {
        let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        return read_graph(BufReader::new(f))
            .with_context(|| format!("reading {}", path.display()));
    }
    let fam = family(args, single_q(args)?)?;
    let Some(n) = args.nodes else {
        return usage("--N is required with --family");
    };
    Ok(fam.generate(n)?)
}

fn gains(values: &[f64], order: usize) -> Result<Gains> {
    if values.len() != order {
        return usage(format!(
            "--a has {} gains but --n is {}",
            values.len(),
            order
        ));
    }
    Ok(Gains::new(values.to_vec())?)
}

fn mode(args: &ModeArgs) -> Result<Mode> {
    match args.mode {
        ModeFlag::Leaderless => Ok(Mode::Leaderless),
        ModeFlag::Leader if args.leader == 0 => usage("--leader is 1-based"),
        ModeFlag::Leader => Ok(Mode::Leader {
            index: args.leader - 1,
        }),
    }
}

fn bound_kinds(
    names: &[String],
    g: &GraphArgs,
    c2: Option<f64>,
    leader: usize,
) -> Result<Vec<BoundKind>> {
    names
        .iter()
        .map(|name| match name.as_str() {
            "fuzz" => Ok(BoundKind::Fuzz { d: g.d, r: g.r }),
            "planar" => Ok(BoundKind::Planar),
            "genus" => match c2 {
                Some(c2) => Ok(BoundKind::Genus { c2 }),
                None => usage("the genus bound needs --c2"),
            },
            "tree" => Ok(BoundKind::Tree),
            "leader" => match leader {
                0 => usage("--leader is 1-based"),
                l => Ok(BoundKind::LeaderGrounded { leader: l - 1 }),
            },
            other => usage(format!("unknown bound '{}'", other)),
        })
        .collect()
}

/// `(family, q)` columns: the family tag or `file`, and the neighborhood size
/// when the family has a fixed one.
fn source_columns(args: &GraphArgs) -> Result<(String, String)> {
    if args.file.is_some() {
        return Ok(("file".into(), String::new()));
    }
    let fam = family(args, single_q(args)?)?;
    let q = fam.locality().map(|q| q.to_string()).unwrap_or_default();
    Ok((fam.tag().to_string(), q))
}

fn write_bounds(g: &Graph, args: &GraphArgs, kinds: &[BoundKind], out: &mut OutDir) -> Result<()> {
    let (fam, q) = source_columns(args)?;
    let certs = kinds
        .iter()
        .map(|&k| connectivity_bound(g, k))
        .collect::<consensus_lab::Result<Vec<_>>>()?;
    out.write_with("bounds.csv", |w| {
        writeln!(
            w,
            "family,N,q,lambda2_real,bound_kind,bound_value,satisfied"
        )?;
        for c in &certs {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                fam,
                g.node_count(),
                q,
                num(c.computed),
                c.kind.tag(),
                num(c.bound),
                c.satisfied
            )?;
            println!(
                "{}: computed {} <= bound {}: {}",
                c.kind.tag(),
                c.computed,
                c.bound,
                c.satisfied
            );
        }
        Ok(())
    })
}

fn cmd_spectrum(args: &SpectrumArgs, out: &mut OutDir) -> Result<u8> {
    let g = load_graph(&args.graph)?;
    let spec = spectrum(&build_laplacian(&g, LaplacianKind::Full)?)?;
    let facts = structural_facts(&g);
    let lambda2 = spec.lambda2_real();
    let mirror = if args.mirror {
        Some(algebraic_connectivity(&mirror_graph(&g))?)
    } else {
        None
    };

    out.write_with("spectrum.csv", |w| {
        writeln!(w, "k,re,im")?;
        for (k, z) in spec.eigenvalues.iter().enumerate() {
            writeln!(w, "{},{},{}", k + 1, num(z.re), num(z.im))?;
        }
        Ok(())
    })?;
    let edges = if g.is_directed() {
        g.edges().len()
    } else {
        g.unique_edges().count()
    };
    out.write_with("summary.csv", |w| {
        writeln!(
            w,
            "N,edges,directed,lambda2_real,mirror_lambda2,balanced,normal,strongly_connected,\
             has_spanning_tree,max_neighborhood,diameter"
        )?;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            g.node_count(),
            edges,
            g.is_directed(),
            num(lambda2),
            mirror.map(num).unwrap_or_default(),
            facts.balanced,
            facts.normal,
            facts.strongly_connected,
            facts.has_spanning_tree,
            facts.max_neighborhood,
            facts.diameter.map(|d| d.to_string()).unwrap_or_default()
        )?;
        Ok(())
    })?;
    println!("lambda2_real = {}", lambda2);
    if let Some(m) = mirror {
        println!("mirror lambda2 = {}", m);
    }

    if !args.bounds.is_empty() {
        let kinds = bound_kinds(&args.bounds, &args.graph, args.c2, args.leader)?;
        write_bounds(&g, &args.graph, &kinds, out)?;
    }
    Ok(0)
}

fn cmd_stability(args: &StabilityArgs, out: &mut OutDir) -> Result<(u8, serde_json::Value)> {
    let gains = gains(&args.gains, args.order)?;
    let mode = mode(&args.mode)?;
    let g = load_graph(&args.graph)?;
    let report = assess(&gains, &g, mode)?;
    let json = report.to_json();
    out.write_with("stability.json", |w| {
        serde_json::to_writer_pretty(&mut *w, &json)?;
        writeln!(w)?;
        Ok(())
    })?;
    let (verdict, code) = if report.marginal {
        ("marginal", 3)
    } else if report.system_stable {
        ("stable", 0)
    } else {
        ("unstable", 2)
    };
    println!("{}", verdict);
    Ok((code, json!({ "verdict": verdict })))
}

fn cmd_critical_n(args: &CriticalArgs, out: &mut OutDir) -> Result<serde_json::Value> {
    if args.graph.file.is_some() {
        return usage("critical-n sweeps a --family, not a file");
    }
    let max_order = *args.orders.iter().max().expect("clap requires --n");
    if args.orders.contains(&0) {
        return usage("--n must be at least 1");
    }
    let all_gains = gains(&args.gains, max_order)?;
    let mode = mode(&args.mode)?;
    let is_fuzz = args.graph.family.as_deref() == Some("path_fuzz");
    let qs: Vec<usize> = if is_fuzz {
        args.graph.q.clone()
    } else {
        vec![0]
    };

    let mut cells = Vec::new();
    for &q in &qs {
        let fam = family(&args.graph, q)?;
        for &n in &args.orders {
            let spec = SweepSpec::new(fam, all_gains.truncated(n)?, args.n_min, args.n_max)
                .with_step(args.step)
                .with_mode(mode)
                .with_jobs(args.jobs);
            cells.push((fam, n, spec.gains.clone(), find_critical_n(&spec)?));
        }
    }

    let gain_cols = max_order.max(5);
    out.write_with("critical_n_records.csv", |w| {
        let a_cols: Vec<String> = (0..gain_cols).map(|k| format!("a{}", k)).collect();
        writeln!(w, "family,q,n,{},N,lambda2_real,stable", a_cols.join(","))?;
        for (fam, n, gains, res) in &cells {
            let q = fam.locality().map(|q| q.to_string()).unwrap_or_default();
            let a: Vec<String> = (0..gain_cols)
                .map(|k| gains.a().get(k).map(|&v| num(v)).unwrap_or_default())
                .collect();
            for r in &res.records {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    fam.tag(),
                    q,
                    n,
                    a.join(","),
                    r.n,
                    num(r.lambda2_real),
                    r.system_stable
                )?;
            }
        }
        Ok(())
    })?;
    out.write_with("critical_n_summary.csv", |w| {
        writeln!(w, "q,n,critical_N")?;
        for (fam, n, _, res) in &cells {
            let q = fam.locality().map(|q| q.to_string()).unwrap_or_default();
            let c = res
                .critical_n
                .map(|c| c.to_string())
                .unwrap_or_else(|| "none".into());
            writeln!(w, "{},{},{}", q, n, c)?;
            println!("q={} n={} critical_N={}", q, n, c);
        }
        Ok(())
    })?;

    let cells_json: Vec<_> = cells
        .iter()
        .map(|(fam, n, _, res)| {
            json!({
                "q": fam.locality(),
                "n": n,
                "critical_N": res.critical_n,
                "monotone": res.monotone,
                "sustained_instability_N": res.sustained_instability_n,
            })
        })
        .collect();
    Ok(json!({ "sweeps": cells_json }))
}

fn cmd_simulate(args: &SimulateArgs, out: &mut OutDir) -> Result<serde_json::Value> {
    let gains = gains(&args.gains, args.order)?;
    let mode = mode(&args.mode)?;
    let g = load_graph(&args.graph)?;
    let cfg = SimConfig {
        mode,
        h: args.h,
        horizon: args.horizon,
        initial: InitialCondition::RandomAcceleration {
            seed: args.graph.seed,
            amplitude: args.amplitude,
        },
        record_stride: args.stride,
        ..SimConfig::new(gains, g, args.graph.seed)
    };
    let trace = integrate(&cfg)?;
    out.write_with("trace.csv", |w| Ok(write_trace_csv(&trace, w)?))?;
    if args.binary {
        out.write_with("trace.bin", |w| Ok(write_trace_binary(&trace, w)?))?;
    }
    println!("{}", trace.classification.tag());

    let mut result = json!({
        "classification": trace.classification,
        "final_metric": trace.final_metric(),
        "growth_rate": trace.growth_rate,
        "stopped_early": trace.stopped_early,
    });
    if args.compare_stability {
        let report = assess(&cfg.gains, &cfg.graph, cfg.mode)?;
        let agreement = classify_against_report(&trace, &report)?;
        result["agreement"] = serde_json::to_value(agreement)?;
    }
    Ok(result)
}
