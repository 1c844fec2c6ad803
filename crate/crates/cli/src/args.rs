use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qnetlab", version, about = "Exact simulations of quantum network protocols")]
pub struct Cli {
    /// Master seed for every sampled quantity.
    #[arg(long, global = true, env = "QNETLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies and random-access-code bounds.
    #[command(subcommand)]
    Info(InfoCmd),
    /// Classical-to-quantum data encodings.
    #[command(subcommand)]
    Encodings(EncodingsCmd),
    /// Quantum secure direct communication.
    #[command(subcommand)]
    Qsdc(QsdcCmd),
    /// State transfer protocols and entanglement swapping.
    #[command(subcommand)]
    Transfer(TransferCmd),
    /// BB84 and key-backed authentication.
    #[command(subcommand)]
    Qkd(QkdCmd),
    /// Traveling-ballot election and photonic encodings.
    #[command(subcommand)]
    Vote(VoteCmd),
    /// Phase estimation and distributed QFT costs.
    #[command(subcommand)]
    Dqc(DqcCmd),
    /// Blind computing demonstrations.
    #[command(subcommand)]
    Blind(BlindCmd),
}

#[derive(Debug, Subcommand)]
pub enum InfoCmd {
    /// Shannon entropy of a distribution.
    Entropy {
        #[arg(long, value_delimiter = ',', required = true)]
        probs: Vec<f64>,
    },
    /// Nayak bound ratio m/n for success probability p.
    Nayak {
        #[arg(long)]
        p: f64,
    },
    /// m/n against p over (1/2, 1].
    Curve {
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Largest m allowed by the multi-bit reconstruction bound.
    Multibit {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    X,
    Y,
    Z,
}

#[derive(Debug, Subcommand)]
pub enum EncodingsCmd {
    /// `|b⟩` for a bit string.
    Basis {
        #[arg(long)]
        bits: String,
    },
    /// Uniform superposition of distinct bit strings.
    Superposition {
        #[arg(long, value_delimiter = ',', required = true)]
        strings: Vec<String>,
    },
    /// Amplitude encoding of non-negative values.
    Amplitude {
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Product of single-qubit rotations.
    Angle {
        #[arg(long, value_enum, default_value_t = AxisArg::Y)]
        axis: AxisArg,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        angles: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Ghz,
    W,
}

#[derive(Debug, Subcommand)]
pub enum QsdcCmd {
    /// Two-party dense-coding exchange.
    Bipartite {
        /// Two message bits.
        #[arg(long, default_value = "00")]
        message: String,
        /// Eve measure-resends the traveling qubit.
        #[arg(long)]
        attack: bool,
        /// Decoy rounds for the attack statistics.
        #[arg(long, default_value_t = 20)]
        rounds: usize,
    },
    /// Alice and Bob send to Charlie over a shared three-qubit state.
    Tripartite {
        #[arg(long, value_enum, default_value_t = ClassArg::Ghz)]
        class: ClassArg,
        #[arg(long, default_value = "00")]
        a: String,
        #[arg(long, default_value = "00")]
        b: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum TransferCmd {
    /// Resource counts and fidelities of the three transfer protocols.
    Compare {
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Haar-random inputs per protocol.
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Entanglement swapping along a repeater chain.
    Swap {
        #[arg(long, default_value_t = 1)]
        hops: usize,
        /// Depolarizing probability per link.
        #[arg(long, default_value_t = 0.0)]
        p_err: f64,
        /// Sample measurement outcomes instead of averaging exactly.
        #[arg(long)]
        sampled: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EveArg {
    None,
    MeasureResend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdversaryArg {
    None,
    Replay,
}

#[derive(Debug, Subcommand)]
pub enum QkdCmd {
    /// BB84 sessions. One session aborts with exit code 1.
    Bb84 {
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, value_enum, default_value_t = EveArg::None)]
        eve: EveArg,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Fixed test-set size; default is a quarter of the sifted set.
        #[arg(long)]
        test_size: Option<usize>,
        /// Run this many sessions and report statistics.
        #[arg(long, default_value_t = 1)]
        sessions: usize,
    },
    /// Three-step authentication from BB84-derived identification strings.
    Auth {
        #[arg(long, value_enum, default_value_t = AdversaryArg::None)]
        adversary: AdversaryArg,
        /// Bits per identification string.
        #[arg(long, default_value_t = 8)]
        bits: usize,
        /// BB84 qubits used to replenish the stash.
        #[arg(long, default_value_t = 512)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum VoteCmd {
    /// Traveling-ballot election.
    Run {
        #[arg(long, default_value_t = 3)]
        d: usize,
        /// One letter per voter, Y or N.
        #[arg(long, default_value = "YNY")]
        votes: String,
        /// Voter (0-based) who applies YES twice.
        #[arg(long)]
        double_vote_by: Option<usize>,
    },
    /// Cat, coherent and squeezed states in truncated Fock space.
    Photonics(PhotonicsArgs),
}

#[derive(Debug, Args)]
pub struct PhotonicsArgs {
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2)]
    pub legs: usize,
    #[arg(long, default_value_t = 40)]
    pub truncation: usize,
    #[arg(long, default_value_t = 0.05)]
    pub tau: f64,
    /// Two-mode squeezing parameter.
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
}

#[derive(Debug, Subcommand)]
pub enum DqcCmd {
    /// Phase estimation of diag(1, e^{2πiθ}).
    Qpe {
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Non-local gate counts of the inverse QFT.
    QftCost {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        nodes: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum BlindCmd {
    /// Blind two-qubit Grover search.
    Grover {
        #[arg(long, default_value_t = 3)]
        oracle: u8,
        /// Hidden parameters i,j,k,l in {1,3}; random when omitted.
        #[arg(long, value_delimiter = ',')]
        params: Option<Vec<u8>>,
        #[arg(long, value_enum)]
        axis: Option<AxisArg>,
    },
    /// Pauli twirl and the hidden-H identity.
    Twirl {
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}
