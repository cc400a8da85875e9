//! Command-line surface for the lattice and period-domain toolkit.
//!
//! Every command reads JSON files (or inline JSON for vectors), writes a
//! single JSON document to stdout on success, and reports domain failures as
//! a JSON error object on stderr with exit code 1. Usage errors exit 2.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use k3period::grassmann::{chart_dimension, PositivePlane};
use k3period::io;
use k3period::isometry::{certify_generators, fixed_plane, orbit, Isometry};
use k3period::lattice::{Lattice, LatticeVector};
use k3period::period::{enumerate_norm_with, period_check_with};
use k3period::{Error, Int, Result};

#[derive(Parser)]
#[command(
    name = "k3period",
    version,
    about = "Exact lattice computations for the K3 period domain",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Lattice selection shared by every command; defaults to the built-in
/// rank-22 lattice.
#[derive(Args)]
struct LatticeArgs {
    /// Built-in lattice: k3, e8, -e8, u, a1, -a1
    #[arg(long, conflicts_with = "gram")]
    name: Option<String>,
    /// JSON file {"gram": [[...]]} with a custom symmetric Gram matrix
    #[arg(long)]
    gram: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, signature, determinant, evenness and unimodularity of a lattice
    LatticeInfo {
        #[command(flatten)]
        lattice: LatticeArgs,
    },
    /// All vectors of minimal reflection norm (+2 or -2 by definiteness) in a
    /// definite lattice
    RootsEnum {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Worker threads for the enumeration
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Apply the reflection in a +/-2-vector to a lattice vector
    Reflect {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Reflection vector: inline JSON array or a file containing one
        #[arg(long)]
        root: String,
        /// Vector to reflect: inline JSON array or a file containing one
        #[arg(long)]
        vector: String,
    },
    /// Determinant sign and positive-orientation behaviour of an isometry
    IsometryClassify {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// JSON file {"matrix": [[...]]}
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Validate a positive 3-plane
    PlaneCheck {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Plane file {"basis": [[...]], "oriented": bool}, or "p0"
        #[arg(long)]
        plane: String,
    },
    /// Decide smooth vs orbifold for a period point and classify its roots
    PeriodCheck {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Plane file {"basis": [[...]], "oriented": bool}, or "p0"
        #[arg(long)]
        plane: String,
        /// Accept decimal plane entries, replacing each by its best rational
        /// approximation with denominator at most this bound (heuristic mode)
        #[arg(long)]
        heuristic_denominator: Option<u64>,
        /// Worker threads for the enumeration
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Fixed-plane certificate for the reflection in one +/-2-vector
    FixedPlane {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Reflection vector: inline JSON array or a file containing one
        #[arg(long)]
        root: String,
        /// Residual tolerance for the certificate
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Fixed-plane certificates for a list of +/-2-vectors
    Certify {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// JSON file with an array of coordinate arrays
        #[arg(long)]
        roots: PathBuf,
        /// Residual tolerance for the certificates
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Invariant distance between two positive 3-planes
    Distance {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// First plane file, or "p0"
        #[arg(long)]
        plane: String,
        /// Second plane file, or "p0"
        #[arg(long)]
        plane2: String,
    },
    /// Orbit of a vector under a finite set of isometries (and inverses)
    Orbit {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Seed vector: inline JSON array or a file containing one
        #[arg(long)]
        vector: String,
        /// JSON file with an array of {"matrix": [[...]]} generators
        #[arg(long)]
        gens: Option<PathBuf>,
        /// JSON file with an array of +/-2-vectors used as reflections
        #[arg(long)]
        reflections: Option<PathBuf>,
        /// Maximum number of orbit elements before truncation
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(doc) => {
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable output"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::to_string(&io::error_to_json(&e)).expect("serializable error")
            );
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<Value> {
    match command {
        Command::LatticeInfo { lattice } => {
            let lat = load_lattice(&lattice)?;
            Ok(io::lattice_info_json(&lat))
        }
        Command::RootsEnum { lattice, jobs } => roots_enum(&lattice, jobs),
        Command::Reflect {
            lattice,
            root,
            vector,
        } => {
            let lat = load_lattice(&lattice)?;
            let root = load_vector(&lat, &root)?;
            let vector = load_vector(&lat, &vector)?;
            let image = Isometry::reflection(&root)?.apply(&vector)?;
            Ok(json!({ "vector": io::coords_to_json(image.coords()) }))
        }
        Command::IsometryClassify { lattice, matrix } => {
            let lat = load_lattice(&lattice)?;
            let g = io::isometry_from_json(&lat, &read_json(&matrix)?)?;
            Ok(io::component_class_to_json(&g.classify()))
        }
        Command::PlaneCheck { lattice, plane } => {
            let lat = load_lattice(&lattice)?;
            let plane = load_plane(&lat, &plane)?;
            Ok(json!({
                "valid": true,
                "rank": 3,
                "oriented": plane.oriented(),
                "restricted_gram": io::rat_matrix_to_json(&plane.restricted_gram()),
                "chart_dimension": chart_dimension(&lat),
            }))
        }
        Command::PeriodCheck {
            lattice,
            plane,
            heuristic_denominator,
            jobs,
        } => {
            let lat = load_lattice(&lattice)?;
            let (plane, heuristic) = match heuristic_denominator {
                Some(bound) => {
                    let value = read_plane_value(&plane)?;
                    io::plane_from_json_heuristic(&lat, &value, &Int::from(bound))?
                }
                None => (load_plane(&lat, &plane)?, false),
            };
            let verdict = period_check_with(&plane, jobs.max(1))?;
            let mut doc = io::verdict_to_json(&verdict);
            if heuristic {
                let obj = doc.as_object_mut().expect("verdict is an object");
                obj.insert("heuristic".into(), json!(true));
                obj.insert(
                    "denominator_bound".into(),
                    json!(heuristic_denominator.expect("heuristic implies a bound")),
                );
            }
            Ok(doc)
        }
        Command::FixedPlane { lattice, root, tol } => {
            let lat = load_lattice(&lattice)?;
            let root = load_vector(&lat, &root)?;
            let cert = fixed_plane(&root)?;
            if !(cert.residual <= tol) {
                return Err(Error::CertificateResidual {
                    index: 0,
                    residual: cert.residual,
                });
            }
            Ok(io::certificate_to_json(&cert))
        }
        Command::Certify {
            lattice,
            roots,
            tol: _tol,
        } => {
            let lat = load_lattice(&lattice)?;
            let value = read_json(&roots)?;
            let list = value
                .as_array()
                .ok_or_else(|| Error::Json("roots file must be a JSON array".into()))?;
            let roots: Vec<LatticeVector> = list
                .iter()
                .map(|v| io::vector_from_json(&lat, v))
                .collect::<Result<_>>()?;
            let certs = certify_generators(&roots)?;
            Ok(json!({
                "count": certs.len(),
                "certificates": certs.iter().map(io::certificate_to_json).collect::<Vec<_>>(),
            }))
        }
        Command::Distance {
            lattice,
            plane,
            plane2,
        } => {
            let lat = load_lattice(&lattice)?;
            let p = load_plane(&lat, &plane)?;
            let q = load_plane(&lat, &plane2)?;
            Ok(io::distance_to_json(&p.distance(&q)?))
        }
        Command::Orbit {
            lattice,
            vector,
            gens,
            reflections,
            cap,
        } => {
            let lat = load_lattice(&lattice)?;
            let seed = load_vector(&lat, &vector)?;
            let mut generators = Vec::new();
            if let Some(path) = gens {
                let value = read_json(&path)?;
                let list = value
                    .as_array()
                    .ok_or_else(|| Error::Json("gens file must be a JSON array".into()))?;
                for item in list {
                    generators.push(io::isometry_from_json(&lat, item)?);
                }
            }
            if let Some(path) = reflections {
                let value = read_json(&path)?;
                let list = value
                    .as_array()
                    .ok_or_else(|| Error::Json("reflections file must be a JSON array".into()))?;
                for item in list {
                    generators.push(Isometry::reflection(&io::vector_from_json(&lat, item)?)?);
                }
            }
            let orbit = orbit(&seed, &generators, cap)?;
            Ok(json!({
                "size": orbit.vectors.len(),
                "truncated": orbit.truncated,
                "vectors": orbit
                    .vectors
                    .iter()
                    .map(|v| io::coords_to_json(v.coords()))
                    .collect::<Vec<_>>(),
            }))
        }
    }
}

/// Enumerates the shortest reflection-norm vectors of a definite lattice:
/// self-pairing +2 when positive definite, -2 when negative definite.
fn roots_enum(lattice: &LatticeArgs, jobs: usize) -> Result<Value> {
    let lat = load_lattice(lattice)?;
    let (p, n, z) = lat.signature();
    let (gram, norm) = if n == 0 && z == 0 {
        (lat.gram().clone(), 2i64)
    } else if p == 0 && z == 0 {
        (lat.gram().map(|x| -x.clone()), -2i64)
    } else {
        return Err(Error::NotDefinite(format!(
            "root enumeration needs a definite lattice, signature is ({p},{n},{z})"
        )));
    };
    let (vectors, _) = enumerate_norm_with(&gram, &Int::from(2), jobs.max(1))?;
    Ok(json!({
        "count": vectors.len(),
        "norm": norm,
        "vectors": vectors
            .iter()
            .map(|v| io::coords_to_json(v))
            .collect::<Vec<_>>(),
    }))
}

fn load_lattice(args: &LatticeArgs) -> Result<Arc<Lattice>> {
    match (&args.name, &args.gram) {
        (Some(name), None) => Lattice::builtin(name).ok_or_else(|| {
            Error::Precondition(format!(
                "unknown built-in lattice {name:?}; expected one of k3, e8, -e8, u, a1, -a1"
            ))
        }),
        (None, Some(path)) => io::lattice_from_json(&read_json(path)?, None),
        (None, None) => Ok(Lattice::k3()),
        (Some(_), Some(_)) => unreachable!("clap rejects conflicting lattice flags"),
    }
}

/// Inline JSON array or a path to a file containing one.
fn load_vector(lattice: &Arc<Lattice>, spec: &str) -> Result<LatticeVector> {
    let value = if spec.trim_start().starts_with('[') {
        Value::from_str(spec).map_err(|e| Error::Json(format!("bad inline vector: {e}")))?
    } else {
        read_json(&PathBuf::from(spec))?
    };
    io::vector_from_json(lattice, &value)
}

/// Plane file path, or the built-in reference plane "p0".
fn load_plane(lattice: &Arc<Lattice>, spec: &str) -> Result<PositivePlane> {
    if spec == "p0" {
        return PositivePlane::reference(lattice);
    }
    io::plane_from_json(lattice, &read_json(&PathBuf::from(spec))?)
}

fn read_plane_value(spec: &str) -> Result<Value> {
    if spec == "p0" {
        return Ok(io::plane_to_json(&PositivePlane::reference(&Lattice::k3())?));
    }
    read_json(&PathBuf::from(spec))
}

fn read_json(path: &PathBuf) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Json(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Json(format!("{}: {e}", path.display())))
}
