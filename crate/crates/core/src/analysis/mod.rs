//! Attacks on the classical ciphers and the statistics behind them.

mod attack;
mod frequency;

pub use attack::{
    caesar_bruteforce, caesar_bruteforce_counted, caesar_frequency_attack, chi_squared,
    otp_bruteforce, otp_key_for, otp_trial_count, CandidateKey, CandidatePlaintext, Keyspace,
    RankedShift, RankedShifts, OTP_BRUTEFORCE_LIMIT,
};
pub use frequency::{
    english_corpus, histogram_rows, letter_frequencies, render_histogram, sort_by_frequency,
    FrequencyTable, HistogramRow,
};
