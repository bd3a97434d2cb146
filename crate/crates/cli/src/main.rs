use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use corrbench::datagen::{GenerationConfig, Split};
use corrbench::degrade::{self, Clustering, ReduceMode};
use corrbench::evaluation;
use corrbench::io;
use corrbench::stats::{self, Alternative};

#[derive(Parser)]
#[command(
    name = "corrbench",
    about = "Benchmark generator and evaluation toolkit for correlation-structure discovery in multivariate time series",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled split tree (all 12 data variants per subject).
    Generate {
        /// Flat key-value config file; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_parser = parse_split)]
        split: Split,
        #[arg(long)]
        out: PathBuf,
        /// Override the number of subjects.
        #[arg(long)]
        subjects: Option<usize>,
        /// Override the main seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Simulate degraded clusterings and reduced variants for every subject
    /// in a variant directory.
    Degrade {
        /// A variant directory, e.g. <out>/exploratory/correlated_100.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Also write reduced-cluster and reduced-segment dataset versions.
        #[arg(long, default_value_t = false)]
        reduced: bool,
    },
    /// Emit a per-variant summary of a split tree.
    Validate {
        /// Split root, e.g. <out>/exploratory.
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score candidate clusterings against ground truth.
    Evaluate {
        /// Subject variant directory containing data.csv and labels.csv.
        #[arg(long)]
        data: PathBuf,
        /// Ground-truth labels CSV; defaults to <data>/labels.csv.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Candidate labels CSV, or a directory of them.
        #[arg(long)]
        candidate: PathBuf,
        /// Minkowski exponent for the internal indices.
        #[arg(long = "p-index", default_value_t = 5.0)]
        p_index: f64,
        /// Minkowski exponent for cluster-to-ground-truth mapping.
        #[arg(long = "p-map", default_value_t = 1.0)]
        p_map: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Wilcoxon signed-rank test between two single-column CSV files.
    Wilcoxon {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value = "two-sided", value_parser = parse_alternative)]
        alternative: Alternative,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Number of tests for the Bonferroni correction.
        #[arg(long, default_value_t = 1)]
        bonferroni: usize,
    },
    /// Write the full report bundle for a split tree.
    Report {
        /// Split root, e.g. <out>/exploratory.
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_split(s: &str) -> Result<Split, String> {
    Split::parse(s).ok_or_else(|| format!("expected exploratory or confirmatory, got {s}"))
}

fn parse_alternative(s: &str) -> Result<Alternative, String> {
    Alternative::parse(s).ok_or_else(|| format!("expected two-sided, greater or less, got {s}"))
}

fn read_column(path: &Path) -> Result<Vec<f64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            // Tolerate a header line.
            Err(_) if i == 0 => continue,
            Err(_) => bail!("{}:{}: not a number: {field}", path.display(), i + 1),
        }
    }
    Ok(values)
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Generate {
            config,
            split,
            out,
            subjects,
            seed,
        } => {
            let mut cfg = match config {
                Some(path) => io::load_config(&path, split)?,
                None => GenerationConfig::for_split(split),
            };
            if let Some(s) = seed {
                cfg.main_seed = s;
            }
            let manifest = io::generate_split(&cfg, split, &out, subjects)?;
            println!(
                "wrote {} files under {} (manifest.txt has the digests)",
                manifest.digests.len(),
                out.display()
            );
        }
        Command::Degrade {
            input,
            out,
            seed,
            reduced,
        } => {
            let (stage, completeness) = input
                .file_name()
                .and_then(|n| io::parse_variant_dir_name(&n.to_string_lossy()))
                .with_context(|| format!("{} is not a variant directory", input.display()))?;
            let split_root = input.parent().context("variant directory has no parent")?;
            let subjects = io::list_subjects(split_root, stage, completeness);
            if subjects.is_empty() {
                bail!("no subjects under {}", input.display());
            }
            let mut total = 0usize;
            for (idx, subject) in subjects.iter().enumerate() {
                let ds = io::read_dataset(split_root, subject, stage, completeness)?;
                let gt = Clustering::ground_truth(&ds);
                let suite =
                    degrade::build_suite(&gt, &ds.timestamps, seed.wrapping_add(idx as u64))?;
                let subject_dir = out.join(subject);
                io::write_clustering(
                    &suite.ground_truth,
                    &ds,
                    &subject_dir.join("degraded").join("ground_truth.csv"),
                )?;
                for (i, c) in suite.degraded.iter().enumerate() {
                    io::write_clustering(
                        c,
                        &ds,
                        &subject_dir.join("degraded").join(format!("{i:02}.csv")),
                    )?;
                    total += 1;
                }
                if reduced {
                    for (mode, tag) in [
                        (ReduceMode::Clusters, "clusters"),
                        (ReduceMode::Segments, "segments"),
                    ] {
                        for fraction in [0.5, 0.25] {
                            let r = degrade::reduce(
                                &ds,
                                mode,
                                fraction,
                                seed.wrapping_add(idx as u64),
                            )?;
                            let name = format!("{tag}{}", (fraction * 100.0) as u32);
                            io::write_dataset(&r, &subject_dir.join("reduced").join(name))?;
                        }
                    }
                }
            }
            println!(
                "wrote {total} degraded clusterings for {} subjects under {}",
                subjects.len(),
                out.display()
            );
        }
        Command::Validate { data, out } => {
            let (summary, warnings) = io::variant_summary(&data)?;
            std::fs::write(&out, summary).with_context(|| format!("writing {}", out.display()))?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            println!("wrote {}", out.display());
        }
        Command::Evaluate {
            data,
            labels,
            candidate,
            p_index,
            p_map,
            out,
        } => {
            if p_index < 1.0 || p_map < 1.0 {
                bail!("Minkowski exponents must be >= 1");
            }
            if p_index != 5.0 || p_map != 1.0 {
                // The shipped reference tables are calibrated at p=5 / p=1.
                eprintln!(
                    "note: non-default Minkowski exponents (p-index={p_index}, p-map={p_map}) \
are not comparable with the reference tables"
                );
            }
            let opts = evaluation::EvalOptions {
                index_spec: evaluation::DistanceSpec { p: p_index },
                mapping_spec: evaluation::DistanceSpec { p: p_map },
            };
            let variant_dir = data.parent().context("data directory has no parent")?;
            let (stage, completeness) = variant_dir
                .file_name()
                .and_then(|n| io::parse_variant_dir_name(&n.to_string_lossy()))
                .with_context(|| format!("{} is not inside a variant directory", data.display()))?;
            let split_root = variant_dir.parent().context("no split root")?;
            let subject = data
                .file_name()
                .context("no subject directory")?
                .to_string_lossy()
                .into_owned();
            let ds = io::read_dataset(split_root, &subject, stage, completeness)?;
            let gt = match labels {
                Some(path) => {
                    let (_, gt_labels) = io::read_labels(&path)?;
                    let mut tmp = ds.clone();
                    tmp.labels = gt_labels;
                    Clustering::ground_truth(&tmp)
                }
                None => Clustering::ground_truth(&ds),
            };

            let mut candidates: Vec<PathBuf> = if candidate.is_dir() {
                let mut files: Vec<PathBuf> = std::fs::read_dir(&candidate)
                    .with_context(|| format!("reading {}", candidate.display()))?
                    .filter_map(|e| e.ok())
                    .map(|e| e.path())
                    .filter(|p| p.extension().is_some_and(|e| e == "csv"))
                    .collect();
                files.sort();
                files
            } else {
                vec![candidate.clone()]
            };
            if candidates.is_empty() {
                bail!("no candidate CSV files found under {}", candidate.display());
            }
            let mut rows = Vec::new();
            for path in candidates.drain(..) {
                let clustering = io::read_clustering(&path)?;
                let report = evaluation::evaluate_with(&clustering, &ds, &gt, opts)?;
                rows.push((
                    path.file_name().unwrap().to_string_lossy().into_owned(),
                    report,
                ));
            }
            std::fs::write(&out, io::reports_csv(&rows))
                .with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} report rows to {}", rows.len(), out.display());
        }
        Command::Wilcoxon {
            a,
            b,
            alternative,
            alpha,
            bonferroni,
        } => {
            let xa = read_column(&a)?;
            let xb = read_column(&b)?;
            let res = stats::wilcoxon_signed_rank(&xa, &xb, alternative)?;
            let adjusted_alpha = stats::bonferroni_alpha(alpha, bonferroni);
            let significant = res.p_value < adjusted_alpha;
            println!("statistic(W+)={}", res.statistic);
            println!("p_value={}", res.p_value);
            println!(
                "method={}",
                match res.method {
                    stats::PValueMethod::Exact => "exact",
                    stats::PValueMethod::NormalApprox => "normal-approximation",
                }
            );
            println!("n_used={}", res.n_used);
            println!("effect_rank_biserial={}", res.rank_biserial);
            println!("effect_r_from_z={}", res.r_from_z);
            println!("effect_cohen_d={}", res.cohen_d);
            println!("alpha_bonferroni={adjusted_alpha}");
            println!("significant={significant}");
        }
        Command::Report { data, out } => {
            let written = io::write_reports(&data, &out)?;
            println!("wrote {} report files to {}", written.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
