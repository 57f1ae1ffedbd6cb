//! Exit codes, policy selection and argument parsing shared by commands.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use schreier_core::policy::{boost_policy, shift_policy, validate_policy};
use schreier_core::{Error, FinSet, FundSeqPolicy, GrowthFn, Ordinal};
use serde::de::DeserializeOwned;

pub const EXIT_OK: u8 = 0;
pub const EXIT_DOMAIN: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BOUND: u8 = 3;
pub const EXIT_CHECKS: u8 = 4;

pub const POLICY_ENV: &str = "SCHREIER_POLICY_FILE";

#[derive(Debug)]
pub struct Fail {
    pub code: u8,
    pub message: String,
}

impl Fail {
    pub fn usage(message: impl Into<String>) -> Self {
        Fail { code: EXIT_USAGE, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Fail { code: EXIT_DOMAIN, message: message.into() }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BoundExceeded { .. } => EXIT_BOUND,
            Error::NotMember { .. } => EXIT_DOMAIN,
            Error::Syntax { .. }
            | Error::NotLimit(_)
            | Error::NotIncreasing { .. }
            | Error::NotMonotone { .. }
            | Error::BadPolicy(_)
            | Error::ZeroVector
            | Error::OutsideWindow { .. }
            | Error::Invalid(_) => EXIT_USAGE,
        };
        Fail { code, message: e.to_string() }
    }
}

pub fn ordinal(text: &str) -> Result<Ordinal, Fail> {
    text.parse::<Ordinal>().map_err(|e| Fail::usage(format!("ordinal {text:?}: {e}")))
}

pub fn ordinals(list: &[String]) -> Result<Vec<Ordinal>, Fail> {
    list.iter().map(|s| ordinal(s.trim())).collect()
}

pub fn finset(text: &str) -> Result<FinSet, Fail> {
    text.parse::<FinSet>().map_err(|e| Fail::usage(format!("set {text:?}: {e}")))
}

/// `a..b` or `a..=b` (both inclusive) or a single `n`; `a > b` is empty.
pub fn n_range(text: &str) -> Result<Vec<u64>, Fail> {
    let bad = || Fail::usage(format!("range {text:?}: expected a..b or n"));
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let n = num(text)?;
            (n, n)
        }
    };
    if lo == 0 && hi > 0 {
        return Err(Fail::usage("n starts at 1"));
    }
    Ok((lo..=hi).filter(|&n| n > 0).collect())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

/// Resolves `--policy`, then the environment, then the default.
pub fn policy(selector: Option<&str>) -> Result<FundSeqPolicy, Fail> {
    let policy = match selector {
        None => match std::env::var(POLICY_ENV) {
            Ok(path) if !path.trim().is_empty() => read_json::<FundSeqPolicy>(Path::new(path.trim()))?,
            _ => FundSeqPolicy::Default,
        },
        Some("default") => FundSeqPolicy::Default,
        Some(sel) => {
            if let Some(path) = sel.strip_prefix("shift:") {
                let g: GrowthFn = read_json(Path::new(path))?;
                shift_policy(FundSeqPolicy::Default, g)
            } else if let Some(path) = sel.strip_prefix("boost:") {
                let raw: BTreeMap<String, GrowthFn> = read_json(Path::new(path))?;
                let mut h = BTreeMap::new();
                for (k, g) in raw {
                    h.insert(ordinal(&k)?, g);
                }
                boost_policy(FundSeqPolicy::Default, h)?
            } else {
                return Err(Fail::usage(format!("policy {sel:?}: expected default, shift:FILE or boost:FILE")));
            }
        }
    };
    check_policy(&policy)?;
    Ok(policy)
}

/// Rejects a policy breaking the approximating-sequence contract at the
/// limits it touches, before any command runs.
fn check_policy(policy: &FundSeqPolicy) -> Result<(), Fail> {
    let mut limits: Vec<Ordinal> = ["w", "w*2", "w^2", "w^3"].iter().map(|s| s.parse().expect("literal")).collect();
    let mut p = policy;
    loop {
        match p {
            FundSeqPolicy::Default => break,
            FundSeqPolicy::Shift { base, .. } => p = base,
            FundSeqPolicy::Boost { base, h } => {
                limits.extend(h.keys().cloned());
                p = base;
            }
        }
    }
    for beta in &limits {
        validate_policy(policy, beta, 20).map_err(|e| Fail::usage(format!("policy rejected: {e}")))?;
    }
    Ok(())
}
