use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Default server for `bot`; overridden by `--server`.
pub const SERVER_ENV: &str = "CRYPTOPATH_SERVER";

#[derive(Debug, Parser)]
#[command(name = "cryptopath", version, about = "Classroom cryptography: ciphers, attacks, key exchange and the public-chat channel")]
pub struct Cli {
    /// Seed for every random choice a command makes (0 when absent; `serve`
    /// keeps the config's seed unless given)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Print machine-readable JSON instead of a report
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Shift cipher
    #[command(subcommand)]
    Caesar(CaesarCmd),
    /// Rail-fence transposition
    #[command(subcommand)]
    Rail(RailCmd),
    /// One-time pad over letters
    #[command(subcommand)]
    Otp(OtpCmd),
    /// Toy substitution-permutation block cipher on bytes
    #[command(subcommand)]
    Toyblock(ToyblockCmd),
    /// Characters to 8-bit strings and back
    #[command(subcommand)]
    Bits(BitsCmd),
    /// Letter frequencies
    #[command(subcommand)]
    Freq(FreqCmd),
    /// Diffie-Hellman with colors
    #[command(subcommand)]
    Dh(DhCmd),
    /// Textbook RSA with small primes
    #[command(subcommand)]
    Rsa(RsaCmd),
    /// Multiplying is easy, factoring is hard
    #[command(subcommand)]
    Oneway(OnewayCmd),
    /// Public-key wrapped toy block cipher with a signature
    #[command(subcommand)]
    Hybrid(HybridCmd),
    /// Host rooms for the public-chat activities
    Serve(ServeArgs),
    /// Join a running server as an automated participant
    #[command(subcommand)]
    Bot(BotCmd),
    /// Scenario playgrounds
    #[command(subcommand)]
    Scenario(ScenarioCmd),
}

#[derive(Debug, Args)]
pub struct Input {
    /// Input text
    #[arg(long, conflicts_with = "file")]
    pub text: Option<String>,
    /// Read the input from a UTF-8 file (stdin when neither is given)
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LetterInput {
    #[command(flatten)]
    pub input: Input,
    /// Reject characters outside A-Z instead of passing them through
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
pub enum CaesarCmd {
    Enc {
        #[arg(long, allow_hyphen_values = true)]
        shift: i64,
        #[command(flatten)]
        input: LetterInput,
    },
    Dec {
        #[arg(long, allow_hyphen_values = true)]
        shift: i64,
        #[command(flatten)]
        input: LetterInput,
    },
    /// All 26 decryptions
    Brute {
        #[command(flatten)]
        input: Input,
    },
    /// Rank shifts by letter frequencies, or show histograms to compare by eye
    Crack {
        /// Rank every shift automatically (chi-squared)
        #[arg(long)]
        freq: bool,
        /// How many ranked shifts to show
        #[arg(long, default_value_t = 5)]
        top: usize,
        /// Reference frequency table (`LETTER VALUE` lines); English by default
        #[arg(long)]
        reference: Option<PathBuf>,
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Debug, Subcommand)]
pub enum RailCmd {
    Enc {
        #[arg(long)]
        rails: usize,
        #[command(flatten)]
        input: Input,
    },
    Dec {
        #[arg(long)]
        rails: usize,
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Debug, Subcommand)]
pub enum OtpCmd {
    Enc {
        #[arg(long)]
        key: String,
        #[command(flatten)]
        input: LetterInput,
    },
    Dec {
        #[arg(long)]
        key: String,
        #[command(flatten)]
        input: LetterInput,
    },
    /// Which key turns a ciphertext into a chosen plaintext; without
    /// `--plain`, how many plaintexts a ciphertext could be
    Explore {
        #[arg(long)]
        cipher: String,
        #[arg(long)]
        plain: Option<String>,
        /// Show this many candidates of the exhaustive search
        #[arg(long, default_value_t = 0)]
        show: usize,
    },
}

#[derive(Debug, Args)]
pub struct BlockKeyArgs {
    /// Round keys, comma-separated bytes; drawn from --seed when absent
    #[arg(long, value_delimiter = ',')]
    pub keys: Vec<u8>,
    /// Rounds when the keys come from the seed
    #[arg(long, default_value_t = 2)]
    pub rounds: usize,
    /// Bit permutation: eight comma-separated source positions (nibble swap by default)
    #[arg(long, value_delimiter = ',')]
    pub perm: Vec<u8>,
}

#[derive(Debug, Subcommand)]
pub enum ToyblockCmd {
    /// Text in, hex out; `--block` takes one 8-bit block instead
    Enc {
        #[command(flatten)]
        key: BlockKeyArgs,
        #[arg(long, conflicts_with_all = ["text", "file"])]
        block: Option<String>,
        #[command(flatten)]
        input: Input,
    },
    /// Hex in, text out; `--block` takes one 8-bit block instead
    Dec {
        #[command(flatten)]
        key: BlockKeyArgs,
        #[arg(long, conflicts_with_all = ["text", "file"])]
        block: Option<String>,
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Debug, Subcommand)]
pub enum BitsCmd {
    Encode {
        #[command(flatten)]
        input: Input,
    },
    Decode {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Debug, Subcommand)]
pub enum FreqCmd {
    /// Letter frequencies, most frequent first, with the distance to English
    Analyze {
        #[command(flatten)]
        input: Input,
    },
    /// Text histogram, one bar per letter
    Hist {
        #[arg(long, default_value_t = 40)]
        width: usize,
        /// Show the English reference table instead of the input
        #[arg(long)]
        english: bool,
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Debug, Args)]
pub struct DhArgs {
    #[arg(long, default_value_t = 97)]
    pub p: u64,
    #[arg(long, default_value_t = 5)]
    pub g: u64,
    /// First secret; drawn from --seed when absent
    #[arg(long)]
    pub a: Option<u64>,
    /// Second secret; drawn from --seed when absent
    #[arg(long)]
    pub b: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum DhCmd {
    /// Run an exchange and show every value with its color
    Demo(DhArgs),
    /// Reveal the calculation behind each color
    Explain {
        #[arg(long, default_value_t = 97)]
        p: u64,
        #[arg(long, default_value_t = 5)]
        g: u64,
        #[arg(long)]
        a: Option<u64>,
        #[arg(long)]
        b: Option<u64>,
        /// First public value, for when the first secret is not known
        #[arg(long = "public-a")]
        public_a: Option<u64>,
        /// Second public value, for when the second secret is not known
        #[arg(long = "public-b")]
        public_b: Option<u64>,
        #[arg(long, default_value = "Alice")]
        first: String,
        #[arg(long, default_value = "Bob")]
        second: String,
    },
}

#[derive(Debug, Args)]
pub struct RsaPair {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub e: u64,
}

#[derive(Debug, Args)]
pub struct RsaPublic {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub e: u64,
}

#[derive(Debug, Subcommand)]
pub enum RsaCmd {
    Keygen(RsaPair),
    /// Lock with the public key: m^e mod n
    Lock {
        #[command(flatten)]
        key: RsaPublic,
        #[arg(long)]
        m: u64,
    },
    /// Unlock with the private key: c^d mod n
    Unlock {
        #[command(flatten)]
        key: RsaPair,
        #[arg(long)]
        c: u64,
    },
    /// Sign with the private key: m^d mod n
    Sign {
        #[command(flatten)]
        key: RsaPair,
        #[arg(long)]
        m: u64,
    },
    /// Check that sig^e mod n gives back m
    Verify {
        #[command(flatten)]
        key: RsaPublic,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        sig: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum OnewayCmd {
    Demo {
        #[arg(long, default_value_t = 101)]
        a: u64,
        #[arg(long, default_value_t = 103)]
        b: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum HybridCmd {
    Seal {
        /// Recipient's public modulus
        #[arg(long = "to-n")]
        to_n: u64,
        #[arg(long = "to-e")]
        to_e: u64,
        /// Sender's private key, to sign the body
        #[arg(long = "from-p", requires_all = ["from_q", "from_e"])]
        from_p: Option<u64>,
        #[arg(long = "from-q")]
        from_q: Option<u64>,
        #[arg(long = "from-e")]
        from_e: Option<u64>,
        /// Symmetric key seed; drawn from --seed when absent
        #[arg(long = "key-seed")]
        key_seed: Option<u64>,
        #[command(flatten)]
        input: Input,
    },
    Open {
        #[command(flatten)]
        key: RsaPair,
        /// Sender's public key, to check the signature
        #[arg(long = "from-n", requires = "from_e")]
        from_n: Option<u64>,
        #[arg(long = "from-e")]
        from_e: Option<u64>,
        /// The envelope line (or --file)
        #[arg(long, conflicts_with = "file")]
        envelope: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Server configuration (JSON)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// TCP address; CRYPTOPATH_PORT overrides the port
    #[arg(long)]
    pub listen: Option<String>,
    /// WebSocket address for browser clients
    #[arg(long)]
    pub ws: Option<String>,
    #[arg(long)]
    pub transcripts: Option<PathBuf>,
    /// Broadcast rooms to host when no config is given
    #[arg(long = "room", default_value = "classroom")]
    pub rooms: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Side {
    Initiator,
    Responder,
}

#[derive(Debug, Args)]
pub struct Connection {
    #[arg(long, env = SERVER_ENV, default_value = cryptopath_server::config::DEFAULT_LISTEN)]
    pub server: String,
    #[arg(long)]
    pub room: String,
    #[arg(long)]
    pub name: String,
}

#[derive(Debug, Subcommand)]
pub enum BotCmd {
    /// Ask the server to run the person-in-the-middle under this name, and
    /// watch what it intercepts
    Attacker {
        #[command(flatten)]
        conn: Connection,
        /// Stop after this many messages (0: until the server closes)
        #[arg(long, default_value_t = 0)]
        count: usize,
    },
    /// Play one side of an honest exchange
    Peer {
        #[command(flatten)]
        conn: Connection,
        /// Whom to exchange with
        #[arg(long)]
        peer: Option<String>,
        #[arg(long, value_enum, default_value_t = Side::Responder)]
        side: Side,
        #[arg(long, default_value_t = 97)]
        p: u64,
        #[arg(long, default_value_t = 5)]
        g: u64,
    },
}

#[derive(Debug, Args)]
pub struct ScenarioSource {
    /// A bundled scenario: caesar, otp, toyblock, dh, mitm, rsa, hybrid
    #[arg(long, conflicts_with = "file")]
    pub name: Option<String>,
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ScenarioCmd {
    /// Show a scenario, call playground operations, optionally answer
    Run {
        #[command(flatten)]
        source: ScenarioSource,
        /// An operation call as JSON, e.g. '{"op":"caesar_decrypt","text":"KHOOR","shift":3}'
        #[arg(long = "op")]
        ops: Vec<String>,
        #[arg(long)]
        answer: Option<String>,
    },
    /// Judge an answer
    Check {
        #[command(flatten)]
        source: ScenarioSource,
        #[arg(long, default_value = "")]
        answer: String,
        /// Operations used to get the answer, comma-separated
        #[arg(long, value_delimiter = ',')]
        ops: Vec<String>,
    },
}
