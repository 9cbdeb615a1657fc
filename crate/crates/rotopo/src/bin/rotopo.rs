//! Command-line front end: generate loops, classify them with both
//! classifiers, contract trivial ones to a homotopy grid, export chart
//! coordinates, and run the verification suites.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 classifier
//! disagreement, 4 loop not null-homotopic, 5 chart domain violation.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rotopo::ball::crossing_parity_with;
use rotopo::homotopy::{classify_with, HomotopyError};
use rotopo::io::{read_path_json, write_grid_csv, write_path_json};
use rotopo::path::{axis_rotation_path, random_loop, random_rotation_quat, GeneratedPath};
use rotopo::torus::{random_in_domain_rotation, IDENTIFICATION_SIGN};
use rotopo::{
    boundary_limit_rotation, chart_forward, chart_inverse, classify, contract, from_ball, to_ball,
    to_solid_torus, verify_homotopy, BeltState, ContractOptions, HomotopyClass, Loop,
    RotationMatrix, Tolerances, Vec3,
};

const TAU: f64 = 2.0 * std::f64::consts::PI;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_DISAGREEMENT: u8 = 3;
const EXIT_NOT_NULL_HOMOTOPIC: u8 = 4;
const EXIT_CHART_DOMAIN: u8 = 5;

#[derive(Parser)]
#[command(name = "rotopo", about = "Topology of the rotation group, executable")]
struct Cli {
    /// Override a named tolerance, e.g. --tol grid_eps=0.05 (repeatable).
    #[arg(long = "tol", value_name = "NAME=VALUE", global = true)]
    tol: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a loop as path JSON.
    Generate(GenerateArgs),
    /// Read a loop and print its homotopy class from both classifiers.
    Classify(ClassifyArgs),
    /// Contract a trivial loop and write the homotopy grid as CSV.
    Contract(ContractArgs),
    /// Export per-sample chart coordinates as CSV.
    Chart(ChartArgs),
    /// Run the cross-module verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: GenerateKind,
    /// Rotation axis: x, y, z, or "ax,ay,az".
    #[arg(long, default_value = "z")]
    axis: String,
    /// Total rotation angle in radians (axis-loop and doubled).
    #[arg(long, default_value_t = TAU)]
    angle: f64,
    /// Sample count (axis-loop and doubled).
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Waypoint count (random).
    #[arg(long, default_value_t = 3)]
    waypoints: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenerateKind {
    /// Uniform rotation arc about one axis.
    AxisLoop,
    /// Seeded random loop through geodesic waypoints.
    Random,
    /// The axis loop traversed twice.
    Doubled,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// Refinement step applied before classification.
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
}

#[derive(Args)]
struct ContractArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Refinement step applied before contraction.
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
}

#[derive(Args)]
struct ChartArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    model: ChartModel,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChartModel {
    Torus,
    Ball,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Loops per randomized suite.
    #[arg(long, default_value_t = 200)]
    corpus: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut tol = Tolerances::default();
    for spec in &cli.tol {
        let Some((name, value)) = spec.split_once('=') else {
            eprintln!("error: --tol expects NAME=VALUE, got `{spec}`");
            return ExitCode::from(EXIT_BAD_INPUT);
        };
        let value: f64 = match value.parse() {
            Ok(v) if v > 0.0 => v,
            _ => {
                eprintln!("error: tolerance `{name}` needs a positive number, got `{value}`");
                return ExitCode::from(EXIT_BAD_INPUT);
            }
        };
        if let Err(e) = tol.set(name, value) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    }

    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Classify(args) => cmd_classify(args, &tol),
        Command::Contract(args) => cmd_contract(args, &tol),
        Command::Chart(args) => cmd_chart(args, &tol),
        Command::Verify(args) => cmd_verify(args, &tol),
    }
}

fn parse_axis(s: &str) -> Result<Vec3, String> {
    match s {
        "x" => return Ok(Vec3::EX),
        "y" => return Ok(Vec3::EY),
        "z" => return Ok(Vec3::EZ),
        _ => {}
    }
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("axis must be x, y, z, or ax,ay,az; got `{s}`"));
    }
    let mut c = [0.0f64; 3];
    for (slot, part) in c.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| format!("bad axis component `{part}`"))?;
    }
    let v = Vec3::new(c[0], c[1], c[2]);
    if v.norm() < 1e-9 {
        return Err("axis must be nonzero".to_string());
    }
    Ok(v.normalized())
}

fn cmd_generate(args: GenerateArgs) -> ExitCode {
    let loop_ = match args.kind {
        GenerateKind::AxisLoop | GenerateKind::Doubled => {
            let axis = match parse_axis(&args.axis) {
                Ok(a) => a,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_BAD_INPUT);
                }
            };
            if args.samples < 2 {
                eprintln!("error: need at least 2 samples");
                return ExitCode::from(EXIT_BAD_INPUT);
            }
            match axis_rotation_path(axis, args.angle, args.samples) {
                Ok(GeneratedPath::Closed(l)) => match args.kind {
                    GenerateKind::Doubled => l.doubled(),
                    _ => l,
                },
                Ok(GeneratedPath::Open(_)) => {
                    eprintln!(
                        "error: angle {} is not a whole number of turns; the path does not close",
                        args.angle
                    );
                    return ExitCode::from(EXIT_BAD_INPUT);
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_BAD_INPUT);
                }
            }
        }
        GenerateKind::Random => random_loop(args.seed, args.waypoints),
    };
    let file = match File::create(&args.out) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", args.out.display());
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    if let Err(e) = write_path_json(BufWriter::new(file), loop_.path(), Some(loop_.basepoint())) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_BAD_INPUT);
    }
    println!(
        "wrote {} ({} samples)",
        args.out.display(),
        loop_.samples().len()
    );
    ExitCode::SUCCESS
}

fn load_loop(input: &PathBuf, eps: f64) -> Result<Loop, (u8, String)> {
    let file = File::open(input).map_err(|e| (EXIT_BAD_INPUT, format!("{}: {e}", input.display())))?;
    let loaded =
        read_path_json(BufReader::new(file)).map_err(|e| (EXIT_BAD_INPUT, e.to_string()))?;
    let l = loaded
        .into_loop()
        .map_err(|e| (EXIT_BAD_INPUT, format!("input is not a closed loop: {e}")))?;
    l.refine(eps).map_err(|e| (EXIT_BAD_INPUT, e.to_string()))
}

fn cmd_classify(args: ClassifyArgs, tol: &Tolerances) -> ExitCode {
    let l = match load_loop(&args.input, args.eps) {
        Ok(l) => l,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(code);
        }
    };
    let lift_class = match classify_with(&l, tol.class_chord) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let parity_class = match crossing_parity_with(&l, tol.parity_max_step, tol.jump_threshold) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    println!("{lift_class}");
    println!("lift-sign classifier:       {lift_class}");
    println!("crossing-parity classifier: {parity_class}");
    if lift_class == parity_class {
        println!("classifiers agree");
        ExitCode::SUCCESS
    } else {
        println!("classifiers DISAGREE");
        ExitCode::from(EXIT_DISAGREEMENT)
    }
}

fn cmd_contract(args: ContractArgs, tol: &Tolerances) -> ExitCode {
    let l = match load_loop(&args.input, args.eps) {
        Ok(l) => l,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(code);
        }
    };
    let opts = ContractOptions {
        seed: args.seed,
        grid_eps: tol.grid_eps,
        pole_clearance: tol.pole_clearance,
        pole_attempts: tol.pole_attempts,
        refine_step: tol.contract_refine,
    };
    let grid = match contract(&l, &opts) {
        Ok(g) => g,
        Err(HomotopyError::NotNullHomotopic) => {
            eprintln!("error: loop has class -1 and cannot be contracted");
            return ExitCode::from(EXIT_NOT_NULL_HOMOTOPIC);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let file = match File::create(&args.out) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", args.out.display());
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    if let Err(e) = write_grid_csv(BufWriter::new(file), &grid) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_BAD_INPUT);
    }
    let (row_step, col_step) = grid.max_steps();
    println!(
        "grid {} stages x {} samples, worst step row {:.4} col {:.4} rad -> {}",
        grid.n_rows(),
        grid.n_cols(),
        row_step,
        col_step,
        args.out.display()
    );
    ExitCode::SUCCESS
}

fn cmd_chart(args: ChartArgs, _tol: &Tolerances) -> ExitCode {
    let file = match File::open(&args.input) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {}: {e}", args.input.display());
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let loaded = match read_path_json(BufReader::new(file)) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let out = match File::create(&args.out) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", args.out.display());
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let mut w = BufWriter::new(out);
    let samples = loaded.path.samples();

    let result = match args.model {
        ChartModel::Torus => {
            let mut rows = Vec::with_capacity(samples.len());
            for (i, q) in samples.iter().enumerate() {
                match chart_forward(&q.to_matrix()) {
                    Ok(c) => {
                        let st = to_solid_torus(&c);
                        rows.push((i, c, st));
                    }
                    Err(e) => {
                        eprintln!("error: sample {i} is outside the torus chart domain: {e}");
                        return ExitCode::from(EXIT_CHART_DOMAIN);
                    }
                }
            }
            match args.format {
                OutputFormat::Csv => {
                    let mut r = writeln!(w, "i,lambda,alpha,phi,disk_x,disk_y");
                    for (i, c, st) in &rows {
                        if r.is_err() {
                            break;
                        }
                        r = writeln!(
                            w,
                            "{i},{},{},{},{},{}",
                            c.lambda, c.alpha, c.phi, st.disk[0], st.disk[1]
                        );
                    }
                    r
                }
                OutputFormat::Json => {
                    let records: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|(i, c, st)| {
                            serde_json::json!({
                                "i": i, "lambda": c.lambda, "alpha": c.alpha,
                                "phi": c.phi, "disk": st.disk,
                            })
                        })
                        .collect();
                    serde_json::to_writer_pretty(&mut w, &records)
                        .map_err(std::io::Error::other)
                }
            }
        }
        ChartModel::Ball => {
            let points: Vec<(usize, Vec3)> = samples
                .iter()
                .enumerate()
                .map(|(i, q)| (i, to_ball(*q).v))
                .collect();
            match args.format {
                OutputFormat::Csv => {
                    let mut r = writeln!(w, "i,vx,vy,vz");
                    for (i, v) in &points {
                        if r.is_err() {
                            break;
                        }
                        r = writeln!(w, "{i},{},{},{}", v.x, v.y, v.z);
                    }
                    r
                }
                OutputFormat::Json => {
                    let records: Vec<serde_json::Value> = points
                        .iter()
                        .map(|(i, v)| serde_json::json!({"i": i, "v": [v.x, v.y, v.z]}))
                        .collect();
                    serde_json::to_writer_pretty(&mut w, &records)
                        .map_err(std::io::Error::other)
                }
            }
        }
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_BAD_INPUT);
    }
    println!("wrote {} ({} samples)", args.out.display(), samples.len());
    ExitCode::SUCCESS
}

struct Suite {
    name: &'static str,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn report(self) -> bool {
        if self.failures.is_empty() {
            println!("PASS {}", self.name);
            true
        } else {
            println!("FAIL {}", self.name);
            for f in &self.failures {
                println!("     {f}");
            }
            false
        }
    }
}

fn cmd_verify(args: VerifyArgs, tol: &Tolerances) -> ExitCode {
    let mut all_ok = true;
    let corpus = args.corpus.max(10);

    // chart round trips
    {
        let mut s = Suite::new("chart round trips (torus + ball)");
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        for _ in 0..2000 {
            let r = random_in_domain_rotation(&mut rng, 0.05);
            match chart_forward(&r) {
                Ok(c) => {
                    let back = chart_inverse(&c);
                    s.check(back.max_entry_diff(&r) <= tol.chart_roundtrip, || {
                        format!("torus round trip off by {:.3e}", back.max_entry_diff(&r))
                    });
                    let q = r.to_quaternion();
                    let via_ball = from_ball(to_ball(q)).expect("in-ball point").to_matrix();
                    s.check(via_ball.max_entry_diff(&back) <= tol.chart_roundtrip, || {
                        "torus and ball charts disagree on a rotation".to_string()
                    });
                }
                Err(e) => s.check(false, || format!("chart_forward failed in-domain: {e}")),
            }
        }
        all_ok &= s.report();
    }

    // winding-law scan
    {
        let mut s = Suite::new("boundary winding law (1,2)-identification");
        let sign = *IDENTIFICATION_SIGN;
        println!("     measured identification sign s = {sign:+.0}");
        for i in 0..24 {
            let lambda = TAU * i as f64 / 24.0;
            for j in 0..8 {
                let phi = TAU * j as f64 / 8.0;
                let lhs = boundary_limit_rotation(lambda, phi);
                let rhs = boundary_limit_rotation(0.0, (phi + 2.0 * sign * lambda).rem_euclid(TAU));
                match (lhs, rhs) {
                    (Ok(a), Ok(b)) => s.check(a.max_entry_diff(&b) <= tol.boundary_match, || {
                        format!("winding law off at lambda={lambda:.3}, phi={phi:.3}")
                    }),
                    _ => s.check(false, || "boundary limit unstable".to_string()),
                }
            }
        }
        all_ok &= s.report();
    }

    // classifier group laws
    {
        let mut s = Suite::new("classifier group laws");
        let constant = Loop::constant(RotationMatrix::IDENTITY, 4).expect("constant loop");
        s.check(
            matches!(classify(&constant), Ok(HomotopyClass::Trivial)),
            || "constant loop not trivial".to_string(),
        );
        for seed in 0..corpus as u64 / 2 {
            let a = random_loop(args.seed.wrapping_add(2 * seed), 2);
            let b = random_loop(args.seed.wrapping_add(2 * seed + 1), 2);
            let (ca, cb) = (classify(&a), classify(&b));
            let cab = classify(&a.concat(&b).expect("same basepoint"));
            let crev = classify(&a.reverse());
            match (ca, cb, cab, crev) {
                (Ok(ca), Ok(cb), Ok(cab), Ok(crev)) => {
                    s.check(cab == ca * cb, || format!("homomorphism broken at seed {seed}"));
                    s.check(crev == ca, || format!("reverse law broken at seed {seed}"));
                }
                _ => s.check(false, || format!("classification failed at seed {seed}")),
            }
        }
        all_ok &= s.report();
    }

    // oracle equivalence
    {
        let mut s = Suite::new("lift-sign vs crossing-parity oracle");
        for seed in 0..corpus as u64 {
            let l = random_loop(args.seed.wrapping_add(seed), 3);
            match (classify(&l), crossing_parity_with(&l, tol.parity_max_step, tol.jump_threshold))
            {
                (Ok(a), Ok(b)) => s.check(a == b, || format!("oracles disagree at seed {seed}")),
                _ => s.check(false, || format!("classifier error at seed {seed}")),
            }
        }
        all_ok &= s.report();
    }

    // contraction validity
    {
        let mut s = Suite::new("contraction of trivial loops");
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(99));
        let doubled = axis_rotation_path(Vec3::EZ, TAU, 200)
            .expect("valid axis loop")
            .into_loop()
            .expect("2 pi closes")
            .doubled();
        let mut trivial_corpus = vec![doubled];
        let mut nontrivial_corpus = vec![axis_rotation_path(Vec3::EZ, TAU, 200)
            .expect("valid axis loop")
            .into_loop()
            .expect("2 pi closes")];
        for seed in 0..8u64 {
            let l = random_loop(args.seed.wrapping_add(1000 + seed), 3);
            let full_turn = {
                let axis = random_rotation_quat(&mut rng).to_matrix().apply(Vec3::EZ);
                axis_rotation_path(axis.normalized(), TAU, 200)
                    .expect("valid axis loop")
                    .into_loop()
                    .expect("2 pi closes")
            };
            match classify(&l) {
                Ok(HomotopyClass::Trivial) => {
                    nontrivial_corpus.push(l.concat(&full_turn).expect("same basepoint"));
                    trivial_corpus.push(random_loop(args.seed.wrapping_add(1000 + seed), 3));
                }
                Ok(HomotopyClass::NonTrivial) => {
                    trivial_corpus.push(l.concat(&full_turn).expect("same basepoint"));
                    nontrivial_corpus.push(l);
                }
                Err(e) => s.check(false, || format!("classifier error: {e}")),
            }
        }
        let opts = ContractOptions {
            seed: args.seed,
            ..ContractOptions::default()
        };
        for (i, l) in trivial_corpus.iter().enumerate() {
            match contract(l, &opts) {
                Ok(g) => {
                    let report = verify_homotopy(&g, l);
                    s.check(report.pass(), || format!("invalid grid for loop {i}: {report}"));
                }
                Err(e) => s.check(false, || format!("contract failed on trivial loop {i}: {e}")),
            }
        }
        for (i, l) in nontrivial_corpus.iter().enumerate() {
            s.check(
                matches!(contract(l, &opts), Err(HomotopyError::NotNullHomotopic)),
                || format!("nontrivial loop {i} was not rejected"),
            );
        }
        all_ok &= s.report();
    }

    // belt trick
    {
        let mut s = Suite::new("belt trick parity");
        let belt = BeltState::new(2).expect("valid belt");
        let once = belt.rotate_object(Vec3::EZ, TAU).expect("unit axis");
        let twice = once.rotate_object(Vec3::EX, TAU).expect("unit axis");
        s.check(
            matches!(once.untwistable(), Ok(false)),
            || "2 pi belt reported untwistable".to_string(),
        );
        s.check(
            matches!(twice.untwistable(), Ok(true)),
            || "4 pi belt reported twisted".to_string(),
        );
        match twice.untwist(&ContractOptions::default()) {
            Ok(g) => {
                let wall_fixed = g.rows().iter().all(|row| {
                    row[0].rotation_angle_to(rotopo::UnitQuaternion::IDENTITY) < 1e-9
                });
                s.check(wall_fixed, || "wall end moved during untwist".to_string());
            }
            Err(e) => s.check(false, || format!("untwist failed: {e}")),
        }
        all_ok &= s.report();
    }

    if all_ok {
        println!("all suites passed");
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    }
}
