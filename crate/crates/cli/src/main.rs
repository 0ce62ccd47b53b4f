use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};
use serde_json::json;

use resnet::experiments::{ExperimentConfig, ExperimentRegistry, Report};
use resnet::network::{network_from_resistance_with, ReconstructOptions};
use resnet::spaces::{
    alpha_interval_space, er_giant_component, gasket_graph, gw_tree, heavy_tailed_conductances,
    offspring_law, path_graph,
};
use resnet::walk::simulate;
use resnet::{io, Error, Network, RandomSeed, Result, VertexMeasure};

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
}

struct Globals {
    seed: u64,
    out: Option<PathBuf>,
    format: Format,
    samples: Option<usize>,
}

impl Globals {
    fn from(m: &ArgMatches) -> Self {
        Globals {
            seed: *m.get_one::<u64>("seed").expect("has default"),
            out: m.get_one::<PathBuf>("out").cloned(),
            format: match m.get_one::<String>("format").map(String::as_str) {
                Some("json") => Format::Json,
                _ => Format::Csv,
            },
            samples: m.get_one::<usize>("samples").copied(),
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn global_args() -> [Arg; 4] {
    [
        Arg::new("seed")
            .long("seed")
            .global(true)
            .value_parser(value_parser!(u64))
            .default_value("0")
            .help("master random seed"),
        Arg::new("out")
            .long("out")
            .global(true)
            .value_parser(value_parser!(PathBuf))
            .help("write output here instead of stdout"),
        Arg::new("format")
            .long("format")
            .global(true)
            .value_parser(["csv", "json"])
            .default_value("csv")
            .help("output format"),
        Arg::new("samples")
            .long("samples")
            .global(true)
            .value_parser(value_parser!(usize))
            .help("Monte Carlo sample count (experiments that take one)"),
    ]
}

fn file_arg(name: &'static str, help: &'static str) -> Arg {
    Arg::new(name)
        .long(name)
        .required(true)
        .value_parser(value_parser!(PathBuf))
        .help(help)
}

fn cli(registry: &ExperimentRegistry) -> Command {
    let mut cmd = Command::new("resnet")
        .about("Effective resistance, random walks and scaling experiments on weighted graphs")
        .version(resnet::experiments::VERSION)
        .subcommand_required(true)
        .args(global_args())
        .subcommand(
            Command::new("resistance")
                .about("All-pairs effective resistance of a network file")
                .arg(file_arg("network", "edge list `u v c`")),
        )
        .subcommand(
            Command::new("reconstruct")
                .about("Recover conductances from a resistance matrix CSV")
                .arg(file_arg("matrix", "CSV with a header row of labels"))
                .arg(
                    Arg::new("tolerance")
                        .long("tolerance")
                        .value_parser(value_parser!(f64))
                        .default_value("1e-9"),
                )
                .arg(Arg::new("base").long("base").help("label of the base vertex")),
        )
        .subcommand(
            Command::new("simulate")
                .about("Sample one walk trajectory")
                .arg(file_arg("network", "edge list `u v c`"))
                .arg(
                    Arg::new("measure")
                        .long("measure")
                        .value_parser(value_parser!(PathBuf))
                        .help("vertex measure file `v m` (overrides --walk)"),
                )
                .arg(
                    Arg::new("walk")
                        .long("walk")
                        .value_parser(["csrw", "vsrw"])
                        .default_value("vsrw"),
                )
                .arg(Arg::new("start").long("start").required(true).help("start vertex label"))
                .arg(
                    Arg::new("horizon")
                        .long("horizon")
                        .required(true)
                        .value_parser(value_parser!(f64)),
                )
                .arg(Arg::new("stop").long("stop").help("comma-separated stopping labels")),
        )
        .subcommand(
            Command::new("generate")
                .about("Write a generated network in the edge-list format")
                .arg(
                    Arg::new("kind")
                        .required(true)
                        .value_parser(["gasket", "path", "alpha-interval", "gw-tree", "er"]),
                )
                .arg(Arg::new("level").long("level").value_parser(value_parser!(u32)).default_value("3"))
                .arg(Arg::new("n").long("n").value_parser(value_parser!(usize)).default_value("10"))
                .arg(Arg::new("alpha").long("alpha").value_parser(value_parser!(f64)))
                .arg(Arg::new("p").long("p").value_parser(value_parser!(f64)))
                .arg(Arg::new("offspring").long("offspring").default_value("geometric"))
                .arg(
                    Arg::new("heavy")
                        .long("heavy")
                        .value_parser(value_parser!(f64))
                        .help("replace conductances by Pareto draws with this tail index"),
                )
                .arg(
                    Arg::new("coords")
                        .long("coords")
                        .value_parser(value_parser!(PathBuf))
                        .help("gasket only: also write vertex coordinates as CSV"),
                ),
        )
        .subcommand(Command::new("list").about("List registered experiments"));
    for exp in registry.iter() {
        let mut sub = Command::new(exp.name()).about(exp.about()).arg(
            Arg::new("plot")
                .long("plot")
                .value_parser(value_parser!(PathBuf))
                .help("also write gnuplot-ready data blocks here"),
        );
        for p in exp.params() {
            // --samples is global
            if p.key == "samples" {
                continue;
            }
            sub = sub.arg(
                Arg::new(p.key)
                    .long(p.key)
                    .action(ArgAction::Set)
                    .help(format!("{} [default: {}]", p.help, p.default)),
            );
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

fn read_network(path: &PathBuf) -> Result<Network> {
    io::read_network(fs::File::open(path)?)
}

fn cmd_resistance(g: &Globals, m: &ArgMatches) -> Result<()> {
    let net = read_network(m.get_one("network").expect("required"))?;
    let r = net.resistance_matrix();
    let text = match g.format {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_resistance_csv(&r, &mut buf)?;
            String::from_utf8_lossy(&buf).into_owned()
        }
        Format::Json => {
            let rows: Vec<Vec<f64>> = (0..r.len()).map(|i| (0..r.len()).map(|j| r.get(i, j)).collect()).collect();
            serde_json::to_string_pretty(&json!({ "labels": r.labels(), "resistance": rows }))? + "\n"
        }
    };
    g.emit(&text)
}

fn network_text(g: &Globals, net: &Network) -> Result<String> {
    Ok(match g.format {
        Format::Csv => io::format_network(net),
        Format::Json => {
            let edges: Vec<_> = net
                .edges()
                .iter()
                .map(|e| json!({ "u": net.label(e.u), "v": net.label(e.v), "conductance": e.conductance }))
                .collect();
            serde_json::to_string_pretty(&json!({ "labels": net.labels(), "edges": edges }))? + "\n"
        }
    })
}

fn cmd_reconstruct(g: &Globals, m: &ArgMatches) -> Result<()> {
    let path: &PathBuf = m.get_one("matrix").expect("required");
    let r = io::read_resistance_csv(fs::File::open(path)?)?;
    let base = match m.get_one::<String>("base") {
        Some(label) => r
            .labels()
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Domain(format!("unknown base vertex `{label}`")))?,
        None => 0,
    };
    let opts = ReconstructOptions {
        tolerance: *m.get_one::<f64>("tolerance").expect("has default"),
        base,
    };
    let net = network_from_resistance_with(&r, opts)?;
    g.emit(&network_text(g, &net)?)
}

fn lookup(net: &Network, label: &str) -> Result<usize> {
    net.vertex(label)
        .ok_or_else(|| Error::Domain(format!("unknown vertex `{label}`")))
}

fn cmd_simulate(g: &Globals, m: &ArgMatches) -> Result<()> {
    let net = read_network(m.get_one("network").expect("required"))?;
    let mu = match m.get_one::<PathBuf>("measure") {
        Some(path) => io::parse_measure(&fs::read_to_string(path)?, &net)?,
        None if m.get_one::<String>("walk").map(String::as_str) == Some("csrw") => VertexMeasure::csrw(&net),
        None => VertexMeasure::vsrw(&net),
    };
    let start = lookup(&net, m.get_one::<String>("start").expect("required"))?;
    let stop = m
        .get_one::<String>("stop")
        .map(|s| s.split(',').map(|l| lookup(&net, l.trim())).collect::<Result<Vec<_>>>())
        .transpose()?;
    let horizon = *m.get_one::<f64>("horizon").expect("required");
    let traj = simulate(&net, &mu, start, horizon, stop.as_deref(), RandomSeed(g.seed))?;
    let text = match g.format {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_trajectory_csv(&net, &traj, &mut buf)?;
            String::from_utf8_lossy(&buf).into_owned()
        }
        Format::Json => {
            let states: Vec<&str> = traj.states.iter().map(|&x| net.label(x)).collect();
            serde_json::to_string_pretty(&json!({
                "seed": g.seed,
                "horizon": traj.horizon,
                "stopped_at": traj.stopped_at,
                "jump_times": traj.jump_times,
                "states": states,
            }))? + "\n"
        }
    };
    g.emit(&text)
}

fn cmd_generate(g: &Globals, m: &ArgMatches) -> Result<()> {
    let seed = RandomSeed(g.seed);
    let n = *m.get_one::<usize>("n").expect("has default");
    let level = *m.get_one::<u32>("level").expect("has default");
    let need = |key: &str| {
        m.get_one::<f64>(key)
            .copied()
            .ok_or_else(|| Error::Domain(format!("--{key} is required for this generator")))
    };
    let mut net = match m.get_one::<String>("kind").expect("required").as_str() {
        "gasket" => {
            let gg = gasket_graph(level)?;
            if let Some(path) = m.get_one::<PathBuf>("coords") {
                io::write_gasket_coords_csv(&gg, fs::File::create(path)?)?;
            }
            gg.net
        }
        "path" => path_graph(n, 1.0)?,
        "alpha-interval" => alpha_interval_space(n, need("alpha")?)?,
        "gw-tree" => gw_tree(offspring_law(m.get_one::<String>("offspring").expect("has default"))?.as_ref(), n, seed)?.net,
        "er" => er_giant_component(n, m.get_one::<f64>("p").copied().unwrap_or(1.0 / n as f64), seed)?,
        _ => unreachable!("restricted by the value parser"),
    };
    if let Some(&alpha) = m.get_one::<f64>("heavy") {
        net = heavy_tailed_conductances(&net, alpha, seed.derive(1))?;
    }
    g.emit(&network_text(g, &net)?)
}

fn cmd_list(g: &Globals, registry: &ExperimentRegistry) -> Result<()> {
    let mut text = String::new();
    for e in registry.iter() {
        text.push_str(&format!("{:<16} {}\n", e.name(), e.about()));
    }
    g.emit(&text)
}

fn cmd_experiment(g: &Globals, registry: &ExperimentRegistry, name: &str, m: &ArgMatches) -> Result<()> {
    let exp = registry.get(name).expect("subcommands mirror the registry");
    let mut cfg = ExperimentConfig::new(g.seed);
    for p in exp.params() {
        if p.key == "samples" {
            if let Some(s) = g.samples {
                cfg = cfg.with("samples", s);
            }
        } else if let Some(v) = m.get_one::<String>(p.key) {
            cfg = cfg.with(p.key, v);
        }
    }
    let report: Report = registry.run(name, &cfg)?;
    if let Some(path) = m.get_one::<PathBuf>("plot") {
        fs::write(path, report.to_plot_data())?;
    }
    g.emit(&match g.format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json()?,
    })
}

fn run(registry: &ExperimentRegistry, matches: &ArgMatches) -> Result<()> {
    let g = Globals::from(matches);
    let (name, sub) = matches.subcommand().expect("subcommand required");
    match name {
        "resistance" => cmd_resistance(&g, sub),
        "reconstruct" => cmd_reconstruct(&g, sub),
        "simulate" => cmd_simulate(&g, sub),
        "generate" => cmd_generate(&g, sub),
        "list" => cmd_list(&g, registry),
        exp => cmd_experiment(&g, registry, exp, sub),
    }
}

fn main() -> ExitCode {
    let registry = ExperimentRegistry::builtin();
    let matches = cli(&registry).get_matches();
    match run(&registry, &matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
