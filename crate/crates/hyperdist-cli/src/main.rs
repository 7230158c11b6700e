//! Command-line interface: distances, sensitivity sampling, streaming
//! sketches, trajectory tools, and the analysis subcommands, wired to the
//! CSV/JSON formats in `hyperdist::io`.
//!
//! Exit codes: 2 for usage errors, 3 for data errors (missing or malformed
//! inputs), 4 for numerical errors (degenerate configurations). Failures
//! print a machine-readable JSON payload on stderr. Every stochastic
//! subcommand takes an explicit `--seed` (default 0) and records it in the
//! output metadata together with the input digests. `HYPERDIST_THREADS`
//! caps internal parallelism; results do not depend on it.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use hyperdist::io::format_sig12;
use hyperdist::{analysis, io, metrics, sensitivity, streaming, trajectories};
use hyperdist::{Hyperplane, PointSet};

#[derive(Parser)]
#[command(name = "hyperdist", version, about = "Data-dependent distances between hyperplanes fit to a point set")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Signed,
    Unsigned,
    Frobenius,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Kcenter,
    Kmeans,
}

#[derive(Subcommand)]
enum Cmd {
    /// Distance between two hyperplanes with respect to a point set.
    Dist {
        points: PathBuf,
        h1: PathBuf,
        h2: PathBuf,
        #[arg(long, value_enum, default_value_t = Variant::Signed)]
        variant: Variant,
        /// Last CSV column holds per-point weights (signed variant only).
        #[arg(long)]
        weighted: bool,
        /// Keep coefficient signs instead of canonicalizing them.
        #[arg(long)]
        oriented: bool,
    },
    /// Per-point sensitivity scores as CSV.
    Sensitivity {
        points: PathBuf,
        #[arg(long)]
        weighted: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a sensitivity-sampling coreset (indices + weights CSV).
    Coreset {
        points: PathBuf,
        /// Explicit coreset size; alternatively derive it from --eps/--delta.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// Size the sample by the ambient dimension d instead of d+1.
        #[arg(long)]
        ambient_size: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        weighted: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Online row sampling over points read from standard input.
    StreamSample {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent runs for the median trick (one sketch file each).
        #[arg(long, default_value_t = streaming::DEFAULT_MEDIAN_RUNS)]
        runs: usize,
        /// Override the oversampling constant c.
        #[arg(long)]
        oversampling: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Interval bounds and the median estimate from sketch files.
    SketchDist {
        h1: PathBuf,
        h2: PathBuf,
        #[arg(required = true)]
        sketches: Vec<PathBuf>,
        /// Bound on the distance from the origin to any queried hyperplane.
        #[arg(long, default_value_t = 1.0)]
        origin_bound: f64,
        /// Total stream length; defaults to the 'seen' metadata.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Distance between two k-segment curves.
    TrajDist {
        points: PathBuf,
        curve1: PathBuf,
        curve2: PathBuf,
    },
    /// Flattened embedding vectors of curves, one CSV row per curve.
    TrajEmbed {
        points: PathBuf,
        curves: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simplify a polyline to exactly k segments.
    TrajSimplify {
        polyline: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean curve of a collection of k-segment curves.
    TrajMean {
        points: PathBuf,
        curves: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cluster vectors (CSV rows) or hyperplanes embedded over a point set.
    Cluster {
        input: PathBuf,
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Treat INPUT as a hyperplane list and embed it over these points.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Kernel density estimate of a query hyperplane over a hyperplane list.
    Kde {
        points: PathBuf,
        hyperplanes: PathBuf,
        query: PathBuf,
        /// The kernel exp(-d^2) carries no bandwidth; normalization is 1.
        #[arg(long)]
        bandwidth_free: bool,
    },
    /// Siegel repeated-median line fit of planar points.
    Siegel {
        points: PathBuf,
    },
    /// Sample the Siegel estimator distribution of an uncertain point set.
    UncertainSample {
        uncertain: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Kind {
    Usage,
    Data,
    Numerical,
}

#[derive(Debug)]
struct CliError {
    kind: Kind,
    message: String,
    path: Option<PathBuf>,
}

type CliResult<T> = Result<T, CliError>;

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { kind: Kind::Usage, message: message.into(), path: None }
    }

    fn exit_code(&self) -> i32 {
        match self.kind {
            Kind::Usage => 2,
            Kind::Data => 3,
            Kind::Numerical => 4,
        }
    }

    fn payload(&self) -> Value {
        json!({
            "error": {
                "kind": match self.kind {
                    Kind::Usage => "usage",
                    Kind::Data => "data",
                    Kind::Numerical => "numerical",
                },
                "message": self.message,
                "path": self.path.as_ref().map(|p| p.display().to_string()),
            }
        })
    }
}

fn lib_err(e: hyperdist::Error) -> CliError {
    use hyperdist::Error as E;
    let kind = match e {
        E::BadParameter(_) | E::BadK { .. } => Kind::Usage,
        E::DegenerateNormal
        | E::NotFullRank
        | E::DegenerateTurn { .. }
        | E::ParallelLines { .. }
        | E::DegenerateX => Kind::Numerical,
        _ => Kind::Data,
    };
    CliError { kind, message: e.to_string(), path: None }
}

fn io_err(e: std::io::Error, path: &Path) -> CliError {
    CliError { kind: Kind::Data, message: e.to_string(), path: Some(path.to_path_buf()) }
}

fn at_path(mut e: CliError, path: &Path) -> CliError {
    if e.path.is_none() {
        e.path = Some(path.to_path_buf());
    }
    e
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("sha256:{:x}", hasher.finalize())
}

fn read_file(path: &Path) -> CliResult<(Vec<u8>, String)> {
    let bytes = fs::read(path).map_err(|e| io_err(e, path))?;
    let digest = sha256_hex(&bytes);
    Ok((bytes, digest))
}

fn load_points(path: &Path, weighted: bool) -> CliResult<(PointSet, String)> {
    let (bytes, digest) = read_file(path)?;
    let q = io::read_points(bytes.as_slice(), weighted)
        .map_err(lib_err)
        .map_err(|e| at_path(e, path))?;
    Ok((q, digest))
}

fn load_plane(path: &Path, oriented: bool) -> CliResult<(Hyperplane, String)> {
    let (bytes, digest) = read_file(path)?;
    let raw =
        io::read_hyperplane(bytes.as_slice()).map_err(lib_err).map_err(|e| at_path(e, path))?;
    let h = Hyperplane::new(&raw, oriented).map_err(lib_err).map_err(|e| at_path(e, path))?;
    Ok((h, digest))
}

fn load_curve(path: &Path) -> CliResult<(trajectories::CurveK, String)> {
    let (bytes, digest) = read_file(path)?;
    let verts = io::read_curve(bytes.as_slice()).map_err(lib_err).map_err(|e| at_path(e, path))?;
    let c = trajectories::CurveK::new(verts).map_err(lib_err).map_err(|e| at_path(e, path))?;
    Ok((c, digest))
}

fn write_output(out: Option<&Path>, content: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| io_err(e, path)),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn meta_lines(cmd: &str, params: &[(&str, String)], inputs: &[(&str, &str)]) -> String {
    let mut s = format!("# cmd={cmd}\n");
    for (k, v) in params {
        s.push_str(&format!("# {k}={v}\n"));
    }
    for (name, digest) in inputs {
        s.push_str(&format!("# input:{name}={digest}\n"));
    }
    s
}

fn meta_value(cmd: &str, params: Value, inputs: &[(&str, &str)]) -> Value {
    let mut input_map = serde_json::Map::new();
    for (name, digest) in inputs {
        input_map.insert(name.to_string(), Value::String(digest.to_string()));
    }
    json!({ "cmd": cmd, "params": params, "inputs": Value::Object(input_map) })
}

fn init_threads() {
    if let Ok(spec) = std::env::var("HYPERDIST_THREADS") {
        if let Ok(threads) = spec.parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
            }
        }
    }
}

fn main() {
    init_threads();
    let cli = Cli::parse();
    if let Err(e) = run(cli.cmd) {
        eprintln!("{}", e.payload());
        std::process::exit(e.exit_code());
    }
}

fn run(cmd: Cmd) -> CliResult<()> {
    match cmd {
        Cmd::Dist { points, h1, h2, variant, weighted, oriented } => {
            let (q, _) = load_points(&points, weighted)?;
            let (a, _) = load_plane(&h1, oriented)?;
            let (b, _) = load_plane(&h2, oriented)?;
            let value = match variant {
                Variant::Signed if weighted => metrics::dist_weighted(&q, &a, &b),
                Variant::Signed => metrics::dist(&q, &a, &b),
                Variant::Unsigned => metrics::dist_unsigned(&q, &a, &b),
                Variant::Frobenius => metrics::dist_frobenius(&q, &a, &b),
            }
            .map_err(lib_err)?;
            println!("{}", format_sig12(value));
            Ok(())
        }

        Cmd::Sensitivity { points, weighted, out } => {
            let (q, digest) = load_points(&points, weighted)?;
            let sigma = sensitivity::sensitivities(&q).map_err(lib_err)?;
            let mut content = meta_lines(
                "sensitivity",
                &[("n", q.n().to_string()), ("dim", q.dim().to_string())],
                &[("points", &digest)],
            );
            content.push_str("sigma\n");
            for s in sigma {
                content.push_str(&format!("{s}\n"));
            }
            write_output(out.as_deref(), &content)
        }

        Cmd::Coreset { points, n, eps, delta, ambient_size, seed, weighted, out } => {
            let (q, digest) = load_points(&points, weighted)?;
            let size = match (n, eps, delta) {
                (Some(n), _, _) => n,
                (None, Some(e), Some(d)) => {
                    let func_dim = if ambient_size { q.dim() } else { q.dim() + 1 };
                    sensitivity::recommended_sample_size(func_dim, e, d).map_err(lib_err)?
                }
                _ => {
                    return Err(CliError::usage(
                        "pass --n, or both --eps and --delta to derive the size",
                    ))
                }
            };
            let coreset = sensitivity::sensitivity_sample(&q, size, seed).map_err(lib_err)?;
            let mut params = vec![("seed", seed.to_string()), ("n", size.to_string())];
            if let (Some(e), Some(d)) = (eps, delta) {
                params.push(("eps", e.to_string()));
                params.push(("delta", d.to_string()));
            }
            let mut content = meta_lines("coreset", &params, &[("points", &digest)]);
            content.push_str("index,weight\n");
            for (i, w) in coreset.indices.iter().zip(coreset.weights.iter()) {
                content.push_str(&format!("{i},{w}\n"));
            }
            write_output(out.as_deref(), &content)
        }

        Cmd::StreamSample { eps, delta, seed, runs, oversampling, out } => {
            if runs == 0 {
                return Err(CliError::usage("--runs must be at least 1"));
            }
            let mut bytes = Vec::new();
            std::io::stdin()
                .read_to_end(&mut bytes)
                .map_err(|e| io_err(e, Path::new("<stdin>")))?;
            let digest = sha256_hex(&bytes);
            let q = io::read_points(bytes.as_slice(), false).map_err(lib_err)?;
            let dim = q.dim() + 1;

            let mut files = Vec::new();
            let mut accepted = Vec::new();
            for run in 0..runs {
                let mut sketch = match oversampling {
                    Some(c) => {
                        streaming::Sketch::with_options(dim, eps, delta, seed, run as u64, c)
                    }
                    None => streaming::Sketch::new_run(dim, eps, delta, seed, run as u64),
                }
                .map_err(lib_err)?;
                let mut row = vec![0.0; dim];
                for i in 0..q.n() {
                    for (j, cell) in row[..dim - 1].iter_mut().enumerate() {
                        *cell = q.coords()[(i, j)];
                    }
                    row[dim - 1] = 1.0;
                    sketch.offer(&row).map_err(lib_err)?;
                }
                let path = run_path(&out, run, runs);
                let mut buf = Vec::new();
                io::write_sketch(
                    &mut buf,
                    &sketch,
                    &[
                        ("cmd".into(), "stream-sample".into()),
                        ("seed".into(), seed.to_string()),
                        ("run".into(), run.to_string()),
                        ("oversampling".into(), sketch.oversampling().to_string()),
                        ("input:points".into(), digest.clone()),
                    ],
                )
                .map_err(|e| io_err(e, &path))?;
                fs::write(&path, buf).map_err(|e| io_err(e, &path))?;
                files.push(path.display().to_string());
                accepted.push(sketch.accepted_count());
            }
            let meta = meta_value(
                "stream-sample",
                json!({"eps": eps, "delta": delta, "seed": seed, "runs": runs}),
                &[("points", &digest)],
            );
            println!(
                "{}",
                json!({"meta": meta, "files": files, "accepted": accepted, "seen": q.n()})
            );
            Ok(())
        }

        Cmd::SketchDist { h1, h2, sketches, origin_bound, n } => {
            let (a, da) = load_plane(&h1, false)?;
            let (b, db) = load_plane(&h2, false)?;
            let mut loaded = Vec::new();
            let mut seen_values = Vec::new();
            let mut digests = Vec::new();
            for path in &sketches {
                let (bytes, digest) = read_file(path)?;
                let (sketch, _meta) = io::read_sketch(bytes.as_slice())
                    .map_err(lib_err)
                    .map_err(|e| at_path(e, path))?;
                seen_values.push(sketch.seen_count());
                loaded.push(sketch);
                digests.push(digest);
            }
            let total = match n {
                Some(n) => n,
                None => {
                    let first = seen_values[0];
                    if seen_values.iter().any(|&s| s != first) {
                        return Err(CliError::usage(
                            "sketch files disagree on stream length; pass --n",
                        ));
                    }
                    first
                }
            };
            let per_sketch: Vec<Value> = loaded
                .iter()
                .map(|s| {
                    let sq = s.sq_norm(&a, &b).map_err(lib_err)?;
                    let (lo, hi) = s.bounds(total, &a, &b, origin_bound).map_err(lib_err)?;
                    Ok(json!({"sq_norm": sq, "lower": lo, "upper": hi}))
                })
                .collect::<CliResult<_>>()?;
            let median_sq = streaming::median_estimate(&loaded, &a, &b).map_err(lib_err)?;
            let mut inputs: Vec<(&str, &str)> = vec![("h1", da.as_str()), ("h2", db.as_str())];
            let names: Vec<String> =
                (0..digests.len()).map(|i| format!("sketch{i}")).collect();
            for (name, digest) in names.iter().zip(digests.iter()) {
                inputs.push((name.as_str(), digest.as_str()));
            }
            let meta = meta_value(
                "sketch-dist",
                json!({"origin_bound": origin_bound, "n": total}),
                &inputs,
            );
            println!(
                "{}",
                json!({
                    "meta": meta,
                    "per_sketch": per_sketch,
                    "median_sq_norm": median_sq,
                    "median_dist_estimate": (median_sq / total as f64).sqrt(),
                })
            );
            Ok(())
        }

        Cmd::TrajDist { points, curve1, curve2 } => {
            let (q, _) = load_points(&points, false)?;
            let (c1, _) = load_curve(&curve1)?;
            let (c2, _) = load_curve(&curve2)?;
            let d = trajectories::dist_curves(&q, &c1, &c2).map_err(lib_err)?;
            println!("{}", format_sig12(d));
            Ok(())
        }

        Cmd::TrajEmbed { points, curves, out } => {
            let (q, dq) = load_points(&points, false)?;
            let (bytes, dc) = read_file(&curves)?;
            let list =
                io::read_curves(bytes.as_slice()).map_err(lib_err).map_err(|e| at_path(e, &curves))?;
            let mut content = meta_lines(
                "traj-embed",
                &[("n", q.n().to_string()), ("curves", list.len().to_string())],
                &[("points", &dq), ("curves", &dc)],
            );
            for verts in list {
                let c = trajectories::CurveK::new(verts).map_err(lib_err)?;
                let e = trajectories::curve_embed(&q, &c).map_err(lib_err)?;
                let cells: Vec<String> = e.iter().map(|x| format!("{x}")).collect();
                content.push_str(&cells.join(","));
                content.push('\n');
            }
            write_output(out.as_deref(), &content)
        }

        Cmd::TrajSimplify { polyline, k, out } => {
            let (bytes, digest) = read_file(&polyline)?;
            let verts = io::read_curve(bytes.as_slice())
                .map_err(lib_err)
                .map_err(|e| at_path(e, &polyline))?;
            let c = trajectories::simplify_to_k(&verts, k).map_err(lib_err)?;
            let meta = meta_value(
                "traj-simplify",
                json!({"k": k}),
                &[("polyline", &digest)],
            );
            let doc = json!({"meta": meta, "vertices": c.vertices()});
            write_output(out.as_deref(), &format!("{doc}\n"))
        }

        Cmd::TrajMean { points, curves, out } => {
            let (q, dq) = load_points(&points, false)?;
            let (bytes, dc) = read_file(&curves)?;
            let list =
                io::read_curves(bytes.as_slice()).map_err(lib_err).map_err(|e| at_path(e, &curves))?;
            let parsed: Vec<trajectories::CurveK> = list
                .into_iter()
                .map(|v| trajectories::CurveK::new(v).map_err(lib_err))
                .collect::<CliResult<_>>()?;
            let mean = trajectories::mean_curve(&parsed, &q).map_err(lib_err)?;
            let meta = meta_value(
                "traj-mean",
                json!({"curves": parsed.len()}),
                &[("points", &dq), ("curves", &dc)],
            );
            let doc = json!({"meta": meta, "vertices": mean.vertices()});
            write_output(out.as_deref(), &format!("{doc}\n"))
        }

        Cmd::Cluster { input, algo, k, seed, points } => {
            let (vectors, inputs): (Vec<DVector<f64>>, Vec<(String, String)>) = match &points {
                None => {
                    let (bytes, digest) = read_file(&input)?;
                    let table = io::read_points(bytes.as_slice(), false)
                        .map_err(lib_err)
                        .map_err(|e| at_path(e, &input))?;
                    let vs = (0..table.n())
                        .map(|i| DVector::from_vec(table.point(i)))
                        .collect();
                    (vs, vec![("vectors".into(), digest)])
                }
                Some(points_path) => {
                    let (q, dq) = load_points(points_path, false)?;
                    let (bytes, dh) = read_file(&input)?;
                    let raws = io::read_hyperplanes(bytes.as_slice())
                        .map_err(lib_err)
                        .map_err(|e| at_path(e, &input))?;
                    let mut vs = Vec::with_capacity(raws.len());
                    for raw in raws {
                        let h = Hyperplane::new(&raw, false).map_err(lib_err)?;
                        let e = q.embed(&h).map_err(lib_err)?;
                        vs.push(e.values().clone());
                    }
                    (vs, vec![("hyperplanes".into(), dh), ("points".into(), dq)])
                }
            };
            let input_refs: Vec<(&str, &str)> =
                inputs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            match algo {
                Algo::Kcenter => {
                    let res = analysis::gonzalez_k_center(
                        &vectors,
                        |a: &DVector<f64>, b: &DVector<f64>| (a - b).norm(),
                        k,
                    )
                    .map_err(lib_err)?;
                    let meta =
                        meta_value("cluster", json!({"algo": "kcenter", "k": k}), &input_refs);
                    println!(
                        "{}",
                        json!({
                            "meta": meta,
                            "centers": res.centers,
                            "assignment": res.assignment,
                            "radii": res.radii,
                        })
                    );
                }
                Algo::Kmeans => {
                    let res = analysis::lloyds_k_means(&vectors, k, seed).map_err(lib_err)?;
                    let centers: Vec<Vec<f64>> =
                        res.centers.iter().map(|c| c.iter().copied().collect()).collect();
                    let meta = meta_value(
                        "cluster",
                        json!({"algo": "kmeans", "k": k, "seed": seed}),
                        &input_refs,
                    );
                    println!(
                        "{}",
                        json!({
                            "meta": meta,
                            "centers": centers,
                            "assignment": res.assignment,
                            "wcss": res.wcss,
                            "wcss_history": res.wcss_history,
                        })
                    );
                }
            }
            Ok(())
        }

        Cmd::Kde { points, hyperplanes, query, bandwidth_free: _ } => {
            let (q, _) = load_points(&points, false)?;
            let (bytes, _) = read_file(&hyperplanes)?;
            let raws = io::read_hyperplanes(bytes.as_slice())
                .map_err(lib_err)
                .map_err(|e| at_path(e, &hyperplanes))?;
            let hs: Vec<Hyperplane> = raws
                .into_iter()
                .map(|r| Hyperplane::new(&r, false).map_err(lib_err))
                .collect::<CliResult<_>>()?;
            let (query, _) = load_plane(&query, false)?;
            let value = analysis::kde(&q, &hs, &query).map_err(lib_err)?;
            println!("{}", format_sig12(value));
            Ok(())
        }

        Cmd::Siegel { points } => {
            let (q, digest) = load_points(&points, false)?;
            if q.dim() != 2 {
                return Err(CliError {
                    kind: Kind::Data,
                    message: format!("siegel needs planar points, got dimension {}", q.dim()),
                    path: Some(points),
                });
            }
            let pts: Vec<[f64; 2]> =
                (0..q.n()).map(|i| [q.coords()[(i, 0)], q.coords()[(i, 1)]]).collect();
            let line = analysis::siegel_estimator(&pts).map_err(lib_err)?;
            let (slope, intercept) = line
                .slope_intercept()
                .expect("repeated-median line is never vertical");
            let meta = meta_value("siegel", json!({"n": q.n()}), &[("points", &digest)]);
            println!(
                "{}",
                json!({
                    "meta": meta,
                    "slope": slope,
                    "intercept": intercept,
                    "coeffs": line.coeffs().as_slice(),
                })
            );
            Ok(())
        }

        Cmd::UncertainSample { uncertain, n, eps, delta, seed, out } => {
            let (bytes, digest) = read_file(&uncertain)?;
            let locations = io::read_uncertain(bytes.as_slice())
                .map_err(lib_err)
                .map_err(|e| at_path(e, &uncertain))?;
            let p = analysis::UncertainPointSet::new(locations).map_err(lib_err)?;
            let count = match (n, eps, delta) {
                (Some(n), _, _) => n,
                (None, Some(e), Some(d)) => {
                    analysis::distribution_sample_count(e, d).map_err(lib_err)?
                }
                _ => {
                    return Err(CliError::usage(
                        "pass --n, or both --eps and --delta to derive the sample count",
                    ))
                }
            };
            let sample =
                analysis::uncertain_siegel_distribution(&p, count, seed).map_err(lib_err)?;
            let lines: Vec<Vec<f64>> =
                sample.lines().iter().map(|l| l.coeffs().iter().copied().collect()).collect();
            let meta = meta_value(
                "uncertain-sample",
                json!({"n": count, "seed": seed}),
                &[("uncertain", &digest)],
            );
            let doc = json!({"meta": meta, "lines": lines});
            write_output(out.as_deref(), &format!("{doc}\n"))
        }
    }
}

fn run_path(base: &Path, run: usize, runs: usize) -> PathBuf {
    if runs == 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().to_string()).unwrap_or_default();
    let ext = base.extension().map(|s| s.to_string_lossy().to_string());
    let name = match ext {
        Some(ext) => format!("{stem}-{run}.{ext}"),
        None => format!("{stem}-{run}"),
    };
    base.with_file_name(name)
}
