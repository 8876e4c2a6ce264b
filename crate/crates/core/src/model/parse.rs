//! Text-format ingestion for graphs, campaigns, and attention constraints.
//!
//! Graph file: optional first line `users=<n> ads=<m>`, then one edge per
//! line as `src dst ad prob`, whitespace-separated. `#` starts a comment;
//! blank lines are ignored. Without a header, counts are inferred as
//! 1 + the largest referenced index.
//!
//! Campaign file: one line per ad, `ad alpha budget`; every ad index in
//! 0..m must appear exactly once.
//!
//! Constraints file: lines `user kappa` covering every user exactly once,
//! plus exactly one line `K <value>`.

use super::{Advertiser, AttentionConstraints, Campaign, Edge, HyperSocialGraph, ModelError};
use std::collections::BTreeSet;

fn malformed(line: usize, reason: impl Into<String>) -> ModelError {
    ModelError::Malformed {
        line,
        reason: reason.into(),
    }
}

fn parse_index(tok: &str, line: usize, what: &'static str) -> Result<usize, ModelError> {
    tok.parse::<usize>()
        .map_err(|_| malformed(line, format!("invalid {} index {:?}", what, tok)))
}

fn parse_number(tok: &str, line: usize, what: &str) -> Result<f64, ModelError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| malformed(line, format!("invalid {} {:?}", what, tok)))?;
    if v.is_nan() {
        return Err(malformed(line, format!("{} is NaN", what)));
    }
    Ok(v)
}

/// Lines of `text` that carry content, with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parse the graph edge-list format into a validated [`HyperSocialGraph`].
pub fn parse_graph(text: &str) -> Result<HyperSocialGraph, ModelError> {
    let mut lines = content_lines(text).peekable();

    let mut header: Option<(usize, usize)> = None;
    if let Some(&(line_no, line)) = lines.peek() {
        if line.starts_with("users=") {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 || !toks[1].starts_with("ads=") {
                return Err(malformed(line_no, "header must be `users=<n> ads=<m>`"));
            }
            let users = parse_index(&toks[0]["users=".len()..], line_no, "user")?;
            let ads = parse_index(&toks[1]["ads=".len()..], line_no, "ad")?;
            if users == 0 || ads == 0 {
                return Err(malformed(line_no, "header counts must be >= 1"));
            }
            header = Some((users, ads));
            lines.next();
        }
    }

    let mut raw: Vec<(usize, usize, usize, usize, f64)> = Vec::new();
    let mut max_user = 0usize;
    let mut max_ad = 0usize;
    for (line_no, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(malformed(
                line_no,
                format!("expected `src dst ad prob`, got {} fields", toks.len()),
            ));
        }
        let src = parse_index(toks[0], line_no, "user")?;
        let dst = parse_index(toks[1], line_no, "user")?;
        let ad = parse_index(toks[2], line_no, "ad")?;
        let prob = parse_number(toks[3], line_no, "probability")?;
        if !(0.0..=1.0).contains(&prob) {
            return Err(ModelError::ProbabilityOutOfRange {
                line: line_no,
                value: prob,
            });
        }
        max_user = max_user.max(src).max(dst);
        max_ad = max_ad.max(ad);
        raw.push((line_no, src, dst, ad, prob));
    }

    let (num_users, num_ads) = match header {
        Some(h) => h,
        None if raw.is_empty() => return Err(ModelError::MissingHeader),
        None => (max_user + 1, max_ad + 1),
    };

    let mut per_ad_edges: Vec<Vec<Edge>> = vec![Vec::new(); num_ads];
    let mut seen: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); num_ads];
    for (line_no, src, dst, ad, prob) in raw {
        if ad >= num_ads {
            return Err(ModelError::IndexOutOfRange {
                line: line_no,
                what: "ad",
                index: ad,
                limit: num_ads,
            });
        }
        for &u in &[src, dst] {
            if u >= num_users {
                return Err(ModelError::IndexOutOfRange {
                    line: line_no,
                    what: "user",
                    index: u,
                    limit: num_users,
                });
            }
        }
        if !seen[ad].insert((src, dst)) {
            return Err(ModelError::DuplicateEdge {
                line: line_no,
                src,
                dst,
                ad,
            });
        }
        per_ad_edges[ad].push(Edge { src, dst, prob });
    }

    HyperSocialGraph::new(num_users, per_ad_edges)
}

/// Parse a campaign file: lines `ad alpha budget`.
pub fn parse_campaign(text: &str) -> Result<Campaign, ModelError> {
    let mut entries: Vec<(usize, usize, Advertiser)> = Vec::new();
    let mut max_ad = 0usize;
    for (line_no, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(malformed(
                line_no,
                format!("expected `ad alpha budget`, got {} fields", toks.len()),
            ));
        }
        let ad = parse_index(toks[0], line_no, "ad")?;
        let alpha = parse_number(toks[1], line_no, "alpha")?;
        let budget = parse_number(toks[2], line_no, "budget")?;
        if alpha <= 0.0 {
            return Err(malformed(
                line_no,
                format!("alpha must be > 0, got {}", alpha),
            ));
        }
        if budget < 0.0 {
            return Err(malformed(
                line_no,
                format!("budget must be >= 0, got {}", budget),
            ));
        }
        max_ad = max_ad.max(ad);
        entries.push((line_no, ad, Advertiser { alpha, budget }));
    }
    if entries.is_empty() {
        return Err(ModelError::Invalid(
            "campaign file has no advertisers".into(),
        ));
    }

    let num_ads = max_ad + 1;
    let mut slots: Vec<Option<Advertiser>> = vec![None; num_ads];
    for (line_no, ad, adv) in entries {
        if slots[ad].replace(adv).is_some() {
            return Err(malformed(line_no, format!("duplicate entry for ad {}", ad)));
        }
    }
    let advertisers = slots
        .into_iter()
        .enumerate()
        .map(|(ad, slot)| {
            slot.ok_or_else(|| ModelError::Invalid(format!("missing entry for ad {}", ad)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Campaign::new(advertisers)
}

/// Parse a constraints file: lines `user kappa` plus one line `K <value>`.
/// Every user in `0..num_users` must appear exactly once.
pub fn parse_constraints(text: &str, num_users: usize) -> Result<AttentionConstraints, ModelError> {
    let mut kappa: Vec<Option<usize>> = vec![None; num_users];
    let mut overall: Option<usize> = None;
    for (line_no, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(malformed(
                line_no,
                format!(
                    "expected `user kappa` or `K <value>`, got {} fields",
                    toks.len()
                ),
            ));
        }
        if toks[0] == "K" {
            let v = parse_index(toks[1], line_no, "overall limit")?;
            if overall.replace(v).is_some() {
                return Err(malformed(line_no, "duplicate K line"));
            }
            continue;
        }
        let user = parse_index(toks[0], line_no, "user")?;
        if user >= num_users {
            return Err(ModelError::IndexOutOfRange {
                line: line_no,
                what: "user",
                index: user,
                limit: num_users,
            });
        }
        let k = parse_index(toks[1], line_no, "kappa")?;
        if kappa[user].replace(k).is_some() {
            return Err(malformed(
                line_no,
                format!("duplicate entry for user {}", user),
            ));
        }
    }
    let overall = overall
        .ok_or_else(|| ModelError::Invalid("constraints file is missing a K line".into()))?;
    let kappa = kappa
        .into_iter()
        .enumerate()
        .map(|(u, slot)| {
            slot.ok_or_else(|| ModelError::Invalid(format!("missing kappa for user {}", u)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AttentionConstraints::new(kappa, overall))
}
