//! Command-line interface: `dirdep test`, `dirdep power`, `dirdep datasets`.
//!
//! Exit codes: 0 on success, 1 for statistical or data errors, 2 for usage
//! and configuration errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirdep::datasets;
use dirdep::error::{Error, Result};
use dirdep::geometry::{AngleVector, DirectionalSample};
use dirdep::harness::{self, emit_csv, emit_text};
use dirdep::inference::{self, TestResult};
use dirdep::statistics::{StatSpec, TestData};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Built-in power-study presets, addressable by name from `--config`.
const PRESETS: &[(&str, &str)] = &[
    ("table1", include_str!("../configs/table1.cfg")),
    ("table1_desk", include_str!("../configs/table1_desk.cfg")),
    ("table2", include_str!("../configs/table2.cfg")),
    ("table2_desk", include_str!("../configs/table2_desk.cfg")),
    ("table3", include_str!("../configs/table3.cfg")),
    ("table3_desk", include_str!("../configs/table3_desk.cfg")),
    ("table4", include_str!("../configs/table4.cfg")),
    ("table4_desk", include_str!("../configs/table4_desk.cfg")),
    ("table7", include_str!("../configs/table7.cfg")),
    ("table7_desk", include_str!("../configs/table7_desk.cfg")),
    ("table8", include_str!("../configs/table8.cfg")),
    ("table8_desk", include_str!("../configs/table8_desk.cfg")),
];

#[derive(Parser)]
#[command(
    name = "dirdep",
    version,
    about = "Independence tests for directional data",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "DIRDEP_JOBS", default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run an independence test on a data file or embedded dataset.
    Test(TestArgs),
    /// Run a Monte Carlo size/power study from a config file or preset.
    Power(PowerArgs),
    /// List or export the embedded datasets.
    Datasets(DatasetArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ColumnType {
    /// One angle column in degrees.
    CircularDeg,
    /// One angle column in radians.
    CircularRad,
    /// d+1 coordinate columns of unit vectors.
    Sphere,
    /// One unconstrained real column.
    Linear,
}

#[derive(Args)]
struct TestArgs {
    /// Delimited data file with one header row.
    file: Option<PathBuf>,
    /// Use an embedded dataset instead of a file (see `dirdep datasets`).
    #[arg(long, conflicts_with = "file")]
    dataset: Option<String>,
    /// Statistic: dcor, ccor, trig[:<lambda>], nk; kernel may be inlined as
    /// e.g. dcor:energy:0.5.
    #[arg(long, default_value = "dcor")]
    stat: String,
    /// Kernel spec (energy:<a> | ratio | log) for dcor/nk.
    #[arg(long)]
    kernel: Option<String>,
    /// Bootstrap cycles.
    #[arg(short = 'B', long = "bootstrap", default_value_t = 1000)]
    bootstrap: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ColumnType::CircularDeg)]
    x_type: ColumnType,
    #[arg(long, value_enum, default_value_t = ColumnType::CircularDeg)]
    y_type: ColumnType,
    /// Comma-separated column names or 0-based indices for X.
    #[arg(long)]
    x_cols: Option<String>,
    /// Comma-separated column names or 0-based indices for Y.
    #[arg(long)]
    y_cols: Option<String>,
    /// Renormalize sphere rows instead of rejecting off-sphere data.
    #[arg(long)]
    renormalize: bool,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PowerArgs {
    /// Config file path, or the name of a built-in preset
    /// (table1 .. table8, each also with a _desk variant).
    #[arg(long)]
    config: String,
    /// CSV output path (default: <study name>.csv); a .txt table is written
    /// alongside it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DatasetArgs {
    /// Write the named dataset to CSV.
    #[arg(long)]
    export: Option<String>,
    /// Output path for --export (default: <name>.csv).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = if cli.jobs > 0 {
        let pool = match rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build()
        {
            Ok(pool) => pool,
            Err(e) => {
                eprintln!("error: cannot build a {}-thread pool: {e}", cli.jobs);
                return 2;
            }
        };
        pool.install(|| dispatch(&cli.command))
    } else {
        dispatch(&cli.command)
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::Test(args) => cmd_test(args),
        Command::Power(args) => cmd_power(args),
        Command::Datasets(args) => cmd_datasets(args),
    }
}

fn cmd_test(args: &TestArgs) -> Result<()> {
    let data = load_test_data(args)?;
    let spec = resolve_stat_spec(&args.stat, args.kernel.as_deref())?;
    let result = inference::run_test(&data, &spec, args.bootstrap, args.seed)?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&result).map_err(|e| Error::Data(e.to_string()))?
        );
    } else {
        print!("{}", render_result(&spec, &result));
    }
    Ok(())
}

fn render_result(spec: &StatSpec, result: &TestResult) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "statistic : {} ({})",
        spec.column_label(),
        result.statistic_name
    );
    let _ = writeln!(out, "value     : {:.8}", result.statistic);
    let _ = writeln!(
        out,
        "p-value   : {:.4} (= {}/{})",
        result.p_value,
        1 + result.exceed_count,
        result.bootstrap + 1
    );
    let _ = writeln!(out, "B         : {}", result.bootstrap);
    let _ = writeln!(out, "n         : {}", result.n);
    let _ = writeln!(out, "seed      : {}", result.seed);
    out
}

/// Combines `--stat` and `--kernel` into one parsed statistic spec.
fn resolve_stat_spec(stat: &str, kernel: Option<&str>) -> Result<StatSpec> {
    match kernel {
        None => StatSpec::parse(stat),
        Some(k) => {
            if stat.contains(':') {
                return Err(Error::Config(format!(
                    "--kernel conflicts with the kernel already named in --stat {stat:?}"
                )));
            }
            match stat {
                "dcor" | "nk" => StatSpec::parse(&format!("{stat}:{k}")),
                other => Err(Error::Config(format!(
                    "--kernel does not apply to statistic {other:?}"
                ))),
            }
        }
    }
}

fn load_test_data(args: &TestArgs) -> Result<TestData> {
    if let Some(name) = &args.dataset {
        let ds = datasets::find(name).ok_or_else(|| unknown_dataset_error(name))?;
        let (theta, phi) = ds.to_angles();
        return Ok(TestData::Circular { theta, phi });
    }
    let path = args.file.as_ref().ok_or_else(|| {
        Error::Config("provide a data file or --dataset <name>".into())
    })?;
    let (headers, rows) = read_table(path)?;
    if rows.len() < 2 {
        return Err(Error::Data(format!(
            "{}: need at least 2 data rows, found {}",
            path.display(),
            rows.len()
        )));
    }
    let (x_cols, y_cols) = resolve_columns(args, &headers, path)?;
    let x = build_side(args.x_type, &x_cols, &rows, args.renormalize, path, "--x-cols")?;
    let y = build_side(args.y_type, &y_cols, &rows, args.renormalize, path, "--y-cols")?;
    Ok(match (x, y) {
        (SideData::Angles(theta), SideData::Angles(phi)) => TestData::Circular { theta, phi },
        (x, y) => TestData::General {
            x: x.into_sample(),
            y: y.into_sample(),
        },
    })
}

fn unknown_dataset_error(name: &str) -> Error {
    let known: Vec<&str> = datasets::all().iter().map(|d| d.name).collect();
    Error::Data(format!(
        "unknown dataset {name:?} (embedded: {}). Other data, including spherical \
         measurements, can be supplied as a CSV with one header row and coordinate \
         columns, e.g. `dirdep test data.csv --x-type sphere --x-cols x1,x2,x3 \
         --y-type sphere --y-cols y1,y2,y3`",
        known.join(", ")
    ))
}

enum SideData {
    Angles(AngleVector),
    Sample(DirectionalSample),
}

impl SideData {
    fn into_sample(self) -> DirectionalSample {
        match self {
            SideData::Angles(a) => a.to_sample(),
            SideData::Sample(s) => s,
        }
    }
}

fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?
        .iter()
        .map(|h| h.to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        let mut row = Vec::with_capacity(record.len());
        for (j, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                Error::Data(format!(
                    "{} row {}: column {:?} has non-numeric value {field:?}",
                    path.display(),
                    i + 2, // 1-based, counting the header row
                    headers.get(j).map(String::as_str).unwrap_or("?")
                ))
            })?;
            row.push(value);
        }
        if row.len() != headers.len() {
            return Err(Error::Data(format!(
                "{} row {}: expected {} columns, found {}",
                path.display(),
                i + 2,
                headers.len(),
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok((headers, rows))
}

fn columns_needed(t: ColumnType) -> Option<usize> {
    match t {
        ColumnType::CircularDeg | ColumnType::CircularRad | ColumnType::Linear => Some(1),
        ColumnType::Sphere => None, // any count >= 2
    }
}

fn resolve_columns(
    args: &TestArgs,
    headers: &[String],
    path: &Path,
) -> Result<(Vec<usize>, Vec<usize>)> {
    match (&args.x_cols, &args.y_cols) {
        (Some(x), Some(y)) => Ok((parse_cols(x, headers)?, parse_cols(y, headers)?)),
        (None, None) => {
            if headers.len() == 2
                && columns_needed(args.x_type) == Some(1)
                && columns_needed(args.y_type) == Some(1)
            {
                Ok((vec![0], vec![1]))
            } else {
                Err(Error::Config(format!(
                    "{} has {} columns; specify --x-cols and --y-cols",
                    path.display(),
                    headers.len()
                )))
            }
        }
        _ => Err(Error::Config(
            "--x-cols and --y-cols must be given together".into(),
        )),
    }
}

fn parse_cols(spec: &str, headers: &[String]) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in spec.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(Error::Config(format!("empty column in {spec:?}")));
        }
        let idx = if let Ok(i) = item.parse::<usize>() {
            i
        } else if let Some(i) = headers.iter().position(|h| h == item) {
            i
        } else {
            return Err(Error::Config(format!(
                "no column named {item:?} (headers: {})",
                headers.join(", ")
            )));
        };
        if idx >= headers.len() {
            return Err(Error::Config(format!(
                "column index {idx} out of range (file has {} columns)",
                headers.len()
            )));
        }
        out.push(idx);
    }
    Ok(out)
}

fn build_side(
    t: ColumnType,
    cols: &[usize],
    rows: &[Vec<f64>],
    renormalize: bool,
    path: &Path,
    flag: &str,
) -> Result<SideData> {
    if let Some(needed) = columns_needed(t) {
        if cols.len() != needed {
            return Err(Error::Config(format!(
                "{flag}: column type needs exactly {needed} column(s), got {}",
                cols.len()
            )));
        }
    } else if cols.len() < 2 {
        return Err(Error::Config(format!(
            "{flag}: sphere data needs at least 2 coordinate columns"
        )));
    }
    let column = |c: usize| rows.iter().map(move |r| r[c]);
    Ok(match t {
        ColumnType::CircularDeg => {
            let degrees: Vec<f64> = column(cols[0]).collect();
            SideData::Angles(AngleVector::from_degrees(&degrees)?)
        }
        ColumnType::CircularRad => {
            SideData::Angles(AngleVector::new(column(cols[0]).collect())?)
        }
        ColumnType::Linear => SideData::Sample(DirectionalSample::linear(
            column(cols[0]).collect(),
        )?),
        ColumnType::Sphere => {
            let mut coords = Vec::with_capacity(rows.len() * cols.len());
            for row in rows {
                for &c in cols {
                    coords.push(row[c]);
                }
            }
            let sample = if renormalize {
                DirectionalSample::sphere_renormalized(coords, cols.len())
            } else {
                DirectionalSample::sphere(coords, cols.len())
            };
            SideData::Sample(sample.map_err(|e| {
                Error::Data(format!("{} ({flag}): {e}", path.display()))
            })?)
        }
    })
}

fn resolve_config(config: &str) -> Result<String> {
    let path = Path::new(config);
    if path.exists() {
        return std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())));
    }
    let name = config.strip_suffix(".cfg").unwrap_or(config);
    if let Some((_, body)) = PRESETS.iter().find(|(n, _)| *n == name) {
        return Ok((*body).to_string());
    }
    Err(Error::Config(format!(
        "config not found: {config} (not a file, and no preset of that name; presets: {})",
        PRESETS
            .iter()
            .map(|(n, _)| *n)
            .collect::<Vec<_>>()
            .join(", ")
    )))
}

fn cmd_power(args: &PowerArgs) -> Result<()> {
    let started = Instant::now();
    let json = resolve_config(&args.config)?;
    let cfg = harness::parse_study_config(&json)?;
    let table = harness::run_study(&cfg)?;

    let csv_path = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", table.name)));
    let txt_path = csv_path.with_extension("txt");
    std::fs::write(&csv_path, emit_csv(&table)?)?;
    let text = emit_text(&table);
    std::fs::write(&txt_path, &text)?;

    print!("{text}");
    println!("wrote {} and {}", csv_path.display(), txt_path.display());
    println!(
        "seed = {}, runtime = {:.1}s",
        table.seed,
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

fn cmd_datasets(args: &DatasetArgs) -> Result<()> {
    match &args.export {
        None => {
            for ds in datasets::all() {
                println!("{:<14} n={:<3} {}", ds.name, ds.n(), ds.description);
            }
            println!();
            println!(
                "Other data (including spherical measurements) can be tested from CSV:\n\
                 one header row; circular data as one angle column (see --x-type), sphere\n\
                 data as d+1 coordinate columns, linear data as one column."
            );
            Ok(())
        }
        Some(name) => {
            let ds = datasets::find(name).ok_or_else(|| unknown_dataset_error(name))?;
            let path = args
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("{}.csv", ds.name)));
            std::fs::write(&path, ds.to_csv())?;
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}
