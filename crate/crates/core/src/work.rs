//! Machine-independent operation counting.
//!
//! Attacks and arithmetic report how many elementary steps they took, so
//! "this is slow" can be shown with exact numbers instead of wall time.

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::analysis;
use crate::error::AnalysisError;
use crate::modmath;

/// Elementary step tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkCount {
    pub substitutions: u64,
    pub multiplications: u64,
    pub trial_divisions: u64,
    pub key_trials: u64,
}

impl WorkCount {
    pub fn total(&self) -> u64 {
        self.substitutions + self.multiplications + self.trial_divisions + self.key_trials
    }
}

impl std::ops::AddAssign for WorkCount {
    fn add_assign(&mut self, rhs: Self) {
        self.substitutions += rhs.substitutions;
        self.multiplications += rhs.multiplications;
        self.trial_divisions += rhs.trial_divisions;
        self.key_trials += rhs.key_trials;
    }
}

/// An operation whose cost can be counted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountedOp {
    CaesarBruteforce { ciphertext: String },
    OtpBruteforce { length: usize },
    Modpow { base: u64, exponent: u64, modulus: u64 },
    DiscreteLog { generator: u64, target: u64, modulus: u64 },
    Factor { n: u64 },
    Multiply { a: u64, b: u64 },
}

/// Runs (or, for the exponential one-time-pad search, sizes) `op` and
/// returns its step count.
///
/// The one-time-pad count is `26^L` key trials and is refused above
/// [`OTP_BRUTEFORCE_LIMIT`](analysis::OTP_BRUTEFORCE_LIMIT) like the enumeration itself.
pub fn work_counter(op: &CountedOp) -> Result<WorkCount, AnalysisError> {
    let mut work = WorkCount::default();
    match op {
        CountedOp::CaesarBruteforce { ciphertext } => {
            analysis::caesar_bruteforce_counted(ciphertext, &Alphabet::latin(), &mut work)?;
        }
        CountedOp::OtpBruteforce { length } => {
            work.key_trials = analysis::otp_trial_count(*length, &Alphabet::latin())?;
        }
        CountedOp::Modpow {
            base,
            exponent,
            modulus,
        } => {
            modmath::modpow_counted(*base, *exponent, *modulus, &mut work)?;
        }
        CountedOp::DiscreteLog {
            generator,
            target,
            modulus,
        } => {
            modmath::discrete_log_bruteforce(*generator, *target, *modulus, &mut work)?;
        }
        CountedOp::Factor { n } => {
            modmath::smallest_factor(*n, &mut work);
        }
        CountedOp::Multiply { a, b } => {
            modmath::multiply(*a, *b, &mut work);
        }
    }
    Ok(work)
}
