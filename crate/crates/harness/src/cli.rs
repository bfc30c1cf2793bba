use std::path::PathBuf;

use clap::{Parser, Subcommand};

/// Memorization analysis toolkit: exact information decompositions, privacy
/// bounds on finite mechanisms, linear-model memorization dynamics, and
/// corruption-based QA audits.
#[derive(Debug, Parser)]
#[command(name = "relmem", version)]
pub struct Cli {
    /// TOML config file; command-line flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Root seed; every randomized step derives its own named sub-stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for data files and the run manifest.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Information measures on joint distribution tables.
    #[command(subcommand)]
    Info(InfoCmd),
    /// Finite mechanisms: privacy epsilons, factorization, decomposition.
    #[command(subcommand)]
    Mech(MechCmd),
    /// Linear-model training, recovery attacks, memorization curves.
    #[command(subcommand)]
    Linsim(LinsimCmd),
    /// Corruption-based QA memorization audits.
    #[command(subcommand)]
    Qa(QaCmd),
    /// Batch verification of the privacy-memorization bounds on random
    /// instances; exits nonzero if any bound is violated.
    VerifyTheorems {
        /// Random instances per suite.
        #[arg(long)]
        trials: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum InfoCmd {
    /// Shannon entropy of a subset of variables.
    Entropy {
        /// Joint distribution table (JSON).
        #[arg(long)]
        dist: PathBuf,
        /// Comma-separated variable names.
        #[arg(long, value_delimiter = ',', required = true)]
        vars: Vec<String>,
        #[arg(long, default_value = "bits")]
        unit: String,
    },
    /// Mutual information I(A;B), optionally conditioned on more variables.
    Mi {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<String>,
        /// Conditioning variables.
        #[arg(long, value_delimiter = ',')]
        given: Option<Vec<String>>,
        #[arg(long, default_value = "bits")]
        unit: String,
    },
    /// Splits I(W;X|Y) into marginal and relational memorization.
    Decompose {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, default_value = "X")]
        x: String,
        #[arg(long, default_value = "Y")]
        y: String,
        #[arg(long, default_value = "W")]
        w: String,
        #[arg(long, default_value = "bits")]
        unit: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum MechCmd {
    /// Writes a built-in or randomly sampled mechanism kernel to JSON.
    Make {
        /// One of: xor, noisy-xor, rr, random, factorized.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        ny: Option<usize>,
        #[arg(long)]
        nw: Option<usize>,
        /// Factorized kind: output alphabet of the x-only factor.
        #[arg(long)]
        nw_x: Option<usize>,
        /// Factorized kind: output alphabet of the y-only factor.
        #[arg(long)]
        nw_y: Option<usize>,
        /// Randomized-response flip probability (rr kind).
        #[arg(long)]
        flip_prob: Option<f64>,
        /// Noise level of the noisy-xor kind.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Worst-case log-likelihood ratio over adjacent inputs.
    Epsilon {
        #[arg(long)]
        mech: PathBuf,
        /// One of: full, selective-x, selective-y.
        #[arg(long, default_value = "full")]
        adjacency: String,
    },
    /// Tests whether the kernel splits into an x-only and a y-only factor.
    Factorize {
        #[arg(long)]
        mech: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Tightest bound against factored reference models (alternating
    /// descent or a budgeted brute-force oracle).
    Drp {
        #[arg(long)]
        mech: PathBuf,
        /// One of: alternating, brute-force.
        #[arg(long, default_value = "alternating")]
        method: String,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Searches for the prior maximizing relational memorization.
    Adversarial {
        #[arg(long)]
        mech: PathBuf,
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Memorization decomposition of a mechanism under a prior.
    Decompose {
        #[arg(long)]
        mech: PathBuf,
        /// Prior over inputs (JSON table); uniform when omitted.
        #[arg(long)]
        prior: Option<PathBuf>,
        #[arg(long, default_value = "bits")]
        unit: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum LinsimCmd {
    /// Trains with gradient descent, recording train/held-out scores and
    /// the reconstruction-attack memorization at each checkpoint.
    Curve {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        record_every: Option<usize>,
    },
    /// Runs gradient descent to convergence and compares against the
    /// closed-form minimizer and the recovery attack.
    Converge {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Eigenvalue spectrum governing the training dynamics (d >= n).
    Spectrum {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum QaCmd {
    /// Deletes every digit from each context; writes corrupted JSONL.
    Corrupt {
        #[arg(long)]
        dataset: PathBuf,
        /// One of: squad_json, drop_json, simple_jsonl.
        #[arg(long)]
        format: Option<String>,
        /// Split tag for formats that do not carry one.
        #[arg(long, default_value = "train")]
        split: String,
    },
    /// Train/validation recovery comparison from prediction files or an
    /// HTTP endpoint.
    Report {
        #[arg(long)]
        dataset: PathBuf,
        /// Separate validation dataset file (otherwise split tags are used).
        #[arg(long)]
        val_dataset: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
        /// Predictions on the corrupted training split (TSV id<TAB>answer).
        #[arg(long)]
        train_preds: Option<PathBuf>,
        /// Predictions on the corrupted validation split.
        #[arg(long)]
        val_preds: Option<PathBuf>,
        /// Fetch predictions for both splits from this endpoint instead.
        #[arg(long)]
        endpoint: Option<String>,
        /// em, f1, or both (default).
        #[arg(long)]
        metric: Option<String>,
        /// Audit only samples whose gold answers contain digits.
        #[arg(long)]
        numerical_only: bool,
        /// Answer-entropy estimator for scaled reporting: equiprobable,
        /// plugin, or none.
        #[arg(long, default_value = "equiprobable")]
        entropy: String,
    },
    /// Scans per-epoch prediction files (epoch-N.train.tsv /
    /// epoch-N.val.tsv) into a rate table across epochs.
    Epochs {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        val_dataset: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        preds_dir: PathBuf,
        #[arg(long)]
        metric: Option<String>,
        #[arg(long)]
        numerical_only: bool,
    },
}
