//! Command-line front end: ends counting, component listing, divisor
//! enumeration, boundary-complex construction, certificate paths and
//! index walks, plus a self-check suite.
//!
//! Exit codes: 0 success, 1 invalid input, 2 internal inconsistency.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::process::ExitCode;
use strata::connectivity::{
    build_boundary_complex, genus1_index_walk, is_connected, node_key_string,
    path_vertical_to_dhirr, verify_certificate, Certificate, Mode,
};
use strata::doc::GraphDocument;
use strata::dot::{complex_to_dot, graph_to_dot};
use strata::ends::count_ends;
use strata::enumerate::{
    enumerate_horizontal_divisors, enumerate_vertical_divisors, Caps,
};
use strata::graph::DivisorKind;
use strata::stratum::{genus1_components, ComponentLabel, IndexClass, Signature};

#[derive(Parser)]
#[command(
    name = "strata",
    about = "Boundary divisors, connectivity certificates and ends of strata of meromorphic 1-forms",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SigArgs {
    /// Genus of the stratum
    #[arg(short, long)]
    genus: u32,
    /// Comma-separated zero/pole orders, e.g. 2,-1,-1
    #[arg(short = 'm', long, value_delimiter = ',', allow_hyphen_values = true)]
    orders: Vec<i64>,
}

impl SigArgs {
    fn signature(&self) -> Result<Signature, CliError> {
        Signature::new(self.genus, self.orders.clone()).map_err(|e| CliError::Input(e.to_string()))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Certified,
    Oracle,
}

#[derive(Subcommand)]
enum Command {
    /// Count the ends of a stratum component
    Ends {
        #[command(flatten)]
        sig: SigArgs,
        /// Component selector, e.g. r=1 (genus-1 rotation number)
        #[arg(long)]
        component: Option<String>,
        /// In dimension >= 2, also build and check the coarse
        /// certified boundary complex
        #[arg(long)]
        verify: bool,
    },
    /// List connected-component labels (g <= 1)
    Components {
        #[command(flatten)]
        sig: SigArgs,
    },
    /// Enumerate boundary divisors
    Divisors {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Enumeration caps as V,E
        #[arg(long, value_delimiter = ',')]
        caps: Option<Vec<usize>>,
    },
    /// Build the coarse boundary complex and report connectivity
    Complex {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long, value_enum, default_value = "certified")]
        mode: ModeArg,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, value_delimiter = ',')]
        caps: Option<Vec<usize>>,
    },
    /// Certificate path from a vertical divisor (JSON file) to the
    /// irreducible horizontal divisor
    Path {
        #[command(flatten)]
        sig: SigArgs,
        /// GraphDocument JSON file holding the starting divisor
        #[arg(long)]
        from: String,
    },
    /// Certificate walk between index classes of the irreducible
    /// horizontal divisor (genus 1)
    WalkIndex {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long)]
        from: i64,
        #[arg(long)]
        to: i64,
    },
    /// Run the invariant self-check suite
    Check {
        /// Also run the slower exhaustive checks
        #[arg(long)]
        deep: bool,
    },
}

enum CliError {
    Input(String),
    Internal(String),
}

fn caps_from(arg: &Option<Vec<usize>>) -> Result<Caps, CliError> {
    let from_pair = |v: &[usize]| -> Result<Caps, CliError> {
        if v.len() != 2 {
            return Err(CliError::Input("caps must be given as V,E".into()));
        }
        Ok(Caps { max_vertices: v[0], max_edges: v[1] })
    };
    if let Some(v) = arg {
        return from_pair(v);
    }
    if let Ok(env) = std::env::var("STRATA_CAPS") {
        let parsed: Result<Vec<usize>, _> =
            env.split(',').map(|p| p.trim().parse::<usize>()).collect();
        let v = parsed.map_err(|_| CliError::Input(format!("bad STRATA_CAPS value: {env}")))?;
        return from_pair(&v);
    }
    Ok(Caps::default())
}

fn component_from(sig: &Signature, arg: &Option<String>) -> Result<ComponentLabel, CliError> {
    match (sig.genus(), arg) {
        (0, None) => Ok(ComponentLabel::Genus0),
        (0, Some(_)) => Err(CliError::Input(
            "genus-0 strata are connected; no component flag applies".into(),
        )),
        (1, Some(s)) => {
            let r = s
                .strip_prefix("r=")
                .and_then(|v| v.parse::<i64>().ok())
                .ok_or_else(|| CliError::Input(format!("bad component selector: {s} (use r=R)")))?;
            Ok(ComponentLabel::Genus1Rotation(r))
        }
        (1, None) => {
            let comps =
                genus1_components(sig).map_err(|e| CliError::Input(e.to_string()))?;
            match comps.as_slice() {
                [only] => Ok(only.clone()),
                _ => Err(CliError::Input(
                    "genus-1 stratum has several components; pass --component r=R".into(),
                )),
            }
        }
        (_, Some(_)) => Err(CliError::Input(
            "component classification for genus >= 2 is out of scope; omit --component".into(),
        )),
        (_, None) => Ok(ComponentLabel::HigherGenusOpaque("unspecified".into())),
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Ends { sig, component, verify } => {
            let s = sig.signature()?;
            let comp = component_from(&s, &component)?;
            let report =
                count_ends(&s, &comp, verify).map_err(|e| CliError::Input(e.to_string()))?;
            println!("{}", report.count);
            println!("method: {}", report.method);
            if let Some(note) = &report.formula_note {
                println!("note: {note}");
            }
            match report.coarse_connectivity_confirmed {
                Some(true) => println!("coarse connectivity: confirmed"),
                Some(false) => {
                    return Err(CliError::Internal(
                        "coarse connectivity verification failed".into(),
                    ))
                }
                None => {}
            }
            Ok(())
        }
        Command::Components { sig } => {
            let s = sig.signature()?;
            match s.genus() {
                0 => println!("connected (genus 0)"),
                1 => {
                    let comps =
                        genus1_components(&s).map_err(|e| CliError::Input(e.to_string()))?;
                    if comps.is_empty() {
                        println!("empty stratum");
                    }
                    for c in comps {
                        match c {
                            ComponentLabel::Genus1Rotation(r) => println!("r={r}"),
                            other => println!("{other:?}"),
                        }
                    }
                }
                _ => {
                    return Err(CliError::Input(
                        "component classification for genus >= 2 is out of scope".into(),
                    ))
                }
            }
            Ok(())
        }
        Command::Divisors { sig, format, caps } => {
            let s = sig.signature()?;
            let caps = caps_from(&caps)?;
            let vert = enumerate_vertical_divisors(&s, &caps);
            let horiz = enumerate_horizontal_divisors(&s);
            let all: Vec<_> = vert.divisors.iter().chain(horiz.iter()).collect();
            match format {
                Some(Format::Dot) => {
                    for (i, d) in all.iter().enumerate() {
                        let kind = kind_name(d.kind);
                        print!("{}", graph_to_dot(&d.graph, &format!("{kind}_{i}")));
                    }
                }
                Some(Format::Json) => {
                    let docs: Vec<serde_json::Value> = all
                        .iter()
                        .map(|d| {
                            serde_json::to_value(GraphDocument::from_divisor(&s, d))
                                .map_err(|e| CliError::Internal(e.to_string()))
                        })
                        .collect::<Result<_, _>>()?;
                    let out = serde_json::json!({
                        "divisors": docs,
                        "exhaustive": vert.exhaustive,
                    });
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&out)
                            .map_err(|e| CliError::Internal(e.to_string()))?
                    );
                }
                None => {
                    for d in &all {
                        println!("{} {}", kind_name(d.kind), d.graph.canonical_form());
                    }
                    println!(
                        "total: {} ({} vertical, {} horizontal); exhaustive: {}",
                        all.len(),
                        vert.divisors.len(),
                        horiz.len(),
                        vert.exhaustive
                    );
                }
            }
            Ok(())
        }
        Command::Complex { sig, mode, format, caps } => {
            let s = sig.signature()?;
            let caps = caps_from(&caps)?;
            let mode = match mode {
                ModeArg::Certified => Mode::Certified,
                ModeArg::Oracle => Mode::Oracle,
            };
            let complex = build_boundary_complex(&s, &caps, mode)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            let report = is_connected(&complex);
            match format {
                Some(Format::Dot) => print!("{}", complex_to_dot(&complex, "boundary_complex")),
                Some(Format::Json) => {
                    let out = serde_json::json!({
                        "nodes": complex.nodes.keys().collect::<Vec<_>>(),
                        "edges": complex.edges.keys().collect::<Vec<_>>(),
                        "exhaustive": complex.exhaustive,
                        "coarse": complex.coarse,
                        "connectivity": report,
                    });
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&out)
                            .map_err(|e| CliError::Internal(e.to_string()))?
                    );
                }
                None => {
                    println!(
                        "nodes: {}, edges: {}, exhaustive: {}, coarse: true",
                        complex.nodes.len(),
                        complex.edges.len(),
                        complex.exhaustive
                    );
                    match report.note {
                        Some(note) => println!("connectivity: {note}"),
                        None => println!(
                            "connectivity: {} ({} component{})",
                            if report.connected { "connected" } else { "disconnected" },
                            report.components,
                            if report.components == 1 { "" } else { "s" }
                        ),
                    }
                }
            }
            Ok(())
        }
        Command::Path { sig, from } => {
            let s = sig.signature()?;
            let input = std::fs::read_to_string(&from)
                .map_err(|e| CliError::Input(format!("cannot read {from}: {e}")))?;
            let doc =
                GraphDocument::parse(&input).map_err(|e| CliError::Input(e.to_string()))?;
            let (doc_sig, divisor) =
                doc.to_divisor().map_err(|e| CliError::Input(e.to_string()))?;
            if doc_sig != s {
                return Err(CliError::Input(
                    "document signature does not match the command-line signature".into(),
                ));
            }
            let cert = path_vertical_to_dhirr(&s, &divisor)
                .map_err(|e| CliError::Input(e.to_string()))?;
            print_certificate(&s, &cert)
        }
        Command::WalkIndex { sig, from, to } => {
            let s = sig.signature()?;
            let d = s.order_gcd();
            let mk = |i: i64| {
                IndexClass::new(i, d).map_err(|e| CliError::Input(e.to_string()))
            };
            let cert = genus1_index_walk(&s, mk(from)?, mk(to)?)
                .map_err(|e| CliError::Input(e.to_string()))?;
            print_certificate(&s, &cert)
        }
        Command::Check { deep } => self_check(deep),
    }
}

fn kind_name(kind: DivisorKind) -> &'static str {
    match kind {
        DivisorKind::Vertical => "vertical",
        DivisorKind::HorizontalIrreducible => "horizontal-irreducible",
        DivisorKind::HorizontalSeparating => "horizontal-separating",
    }
}

fn print_certificate(s: &Signature, cert: &Certificate) -> Result<(), CliError> {
    let report = verify_certificate(s, cert);
    for (i, step) in cert.steps.iter().enumerate() {
        println!(
            "step {i}: [{}] {} ({} {})",
            kind_name(step.divisor.kind),
            node_key_string(&step.divisor),
            step.audit.name,
            step.audit.params
        );
        if let Some(w) = &step.witness {
            println!("  witness: {}", w.canonical_form());
        }
    }
    println!("moves: {}", cert.move_count());
    if !report.ok {
        return Err(CliError::Internal(format!(
            "certificate failed verification: {}",
            report.first_failure.unwrap_or_default()
        )));
    }
    println!("verified: ok");
    Ok(())
}

fn self_check(deep: bool) -> Result<(), CliError> {
    use strata::stratum::{cusp_count_formula, cusp_count_oracle, CuspQuery};
    let mut failures = 0;
    let mut check = |name: &str, ok: bool| {
        println!("{} {}", if ok { "PASS" } else { "FAIL" }, name);
        if !ok {
            failures += 1;
        }
    };

    // cusp formula vs oracle
    let limit = if deep { 48 } else { 20 };
    let mut ok = true;
    for n in 5..=limit {
        let f = cusp_count_formula(n, 1).map_err(|e| CliError::Internal(e.to_string()))?;
        let o = cusp_count_oracle(CuspQuery::new(n).unwrap());
        ok &= f.is_integer() && *f.numer() == o;
    }
    check("cusp formula matches orbit oracle for levels 5 and up", ok);

    // structural invariants over sample strata
    let samples: &[(u32, &[i64])] = &[
        (2, &[2]),
        (2, &[1, 1]),
        (1, &[2, -1, -1]),
        (1, &[3, -1, -2]),
        (0, &[2, -1, -1, -1, -1]),
    ];
    let mut ok = true;
    for &(g, m) in samples {
        let s = Signature::new(g, m.to_vec()).unwrap();
        let vert = enumerate_vertical_divisors(&s, &Caps::default());
        for d in &vert.divisors {
            ok &= d.graph.validate(&s).is_ok();
            ok &= d.graph.edges.iter().all(|e| e.order_a + e.order_b == -2);
        }
    }
    check("enumerated divisors validate with paired edge orders", ok);

    // certificate soundness on g >= 1 samples
    let mut ok = true;
    for &(g, m) in samples.iter().filter(|&&(g, _)| g >= 1) {
        let s = Signature::new(g, m.to_vec()).unwrap();
        for d in &enumerate_vertical_divisors(&s, &Caps::default()).divisors {
            match path_vertical_to_dhirr(&s, d) {
                Ok(cert) => {
                    ok &= cert.move_count() <= 4 && verify_certificate(&s, &cert).ok
                }
                Err(_) => ok = false,
            }
        }
    }
    check("vertical-to-irreducible certificates verify within 4 moves", ok);

    // connectivity of sample complexes
    let mut ok = true;
    for &(g, m) in samples {
        let s = Signature::new(g, m.to_vec()).unwrap();
        let c = build_boundary_complex(&s, &Caps::default(), Mode::Certified)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        ok &= is_connected(&c).connected;
    }
    check("certified boundary complexes of sample strata are connected", ok);

    if deep {
        let mut ok = true;
        for &(g, m) in &[(1u32, &[2i64, -1, -1][..]), (0, &[2, -1, -1, -1, -1])] {
            let s = Signature::new(g, m.to_vec()).unwrap();
            let cert = build_boundary_complex(&s, &Caps::default(), Mode::Certified)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            let oracle = build_boundary_complex(&s, &Caps::default(), Mode::Oracle)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            ok &= oracle.exhaustive;
            ok &= cert.edges.keys().all(|k| oracle.edges.contains_key(k));
        }
        check("certified edges are dominated by the exhaustive oracle", ok);
    }

    if failures > 0 {
        return Err(CliError::Internal(format!("{failures} self-check(s) failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
