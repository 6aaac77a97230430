//! Process exit codes and the mapping from library errors.

use qatpg::atpg::AtpgError;
use qatpg::detection::DetectionError;
use qatpg::discrim::DiscrimError;
use qatpg::sampler::SamplerError;
use qatpg::spd::SpdError;

pub const OK: u8 = 0;
/// Bad arguments, unreadable or malformed input.
pub const USAGE: u8 = 1;
/// The request has no answer, e.g. an undetectable fault.
pub const INFEASIBLE: u8 = 2;
/// A solver or simulator failed.
pub const NUMERIC: u8 = 3;

fn atpg(e: &AtpgError) -> u8 {
    match e {
        AtpgError::Undetectable(_) => INFEASIBLE,
        AtpgError::Circuit(_) => USAGE,
        AtpgError::Discrim(d) => discrim(d),
        _ => NUMERIC,
    }
}

fn discrim(e: &DiscrimError) -> u8 {
    match e {
        DiscrimError::Undetectable(_) => INFEASIBLE,
        DiscrimError::Circuit(_) | DiscrimError::TooManyWires(_) => USAGE,
        _ => NUMERIC,
    }
}

fn sampler(e: &SamplerError) -> u8 {
    match e {
        SamplerError::BadParameters { .. } | SamplerError::QubitMismatch { .. } => USAGE,
        SamplerError::EmptySpd => INFEASIBLE,
        _ => NUMERIC,
    }
}

/// Exit code for an error returned by a subcommand.
pub fn classify(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<AtpgError>() {
        return atpg(e);
    }
    if let Some(e) = err.downcast_ref::<DiscrimError>() {
        return discrim(e);
    }
    if let Some(e) = err.downcast_ref::<SamplerError>() {
        return sampler(e);
    }
    if err.downcast_ref::<SpdError>().is_some() {
        return NUMERIC;
    }
    if let Some(e) = err.downcast_ref::<DetectionError>() {
        return match e {
            DetectionError::TooFewCandidates { .. } => INFEASIBLE,
            DetectionError::BadTau(_) | DetectionError::ZeroCandidates | DetectionError::Circuit(_) => USAGE,
            DetectionError::Atpg(a) => atpg(a),
            DetectionError::Sampler(s) => sampler(s),
            DetectionError::Discrim(d) => discrim(d),
        };
    }
    USAGE
}
