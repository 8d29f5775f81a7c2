//! Scenario files.
//!
//! A file is a sequence of sections, each one scenario:
//!
//! ```text
//! [reproduce]
//! id setwise_small
//! example setwise
//! n 1 2 5
//!
//! [single_stage]
//! id erasure_bounds
//! family erasure_pair
//! n 10 100
//! checks tv mismatch
//!
//! [single_stage]
//! id custom
//! prior p
//!   atom 0 0.5
//!   atom 1 0.5
//! end
//! prior p_prime
//!   atom 0.1 0.5
//!   atom 1 0.5
//! end
//! channel
//!   component 0.5 identity
//!   component 0.5 constant 0
//! end
//! cost quadratic
//!
//! [empirical]
//! id triangular
//! prior
//!   domain 0 1
//!   piece 0 1 1
//! end
//! channel
//!   component 1 additive triangular 0.25
//! end
//! cost quadratic
//! sizes 100 10000
//! seed_count 20
//!
//! [belief_mdp]
//! id two_state
//! model
//!   dims 2 1 2
//!   ...
//! end
//! resolution 20
//! tol 1e-6
//! prior 1 0
//! prior_prime 0.6 0.4
//! horizon 8
//! ```
//!
//! Costs are `quadratic` or `truncated`, with an optional `actions <lo> <hi>`
//! line (default: the prior's domain, or `[-1, 1]` for `truncated`).

use std::collections::HashSet;

use priorlab::belief_mdp::{text::parse_model, Belief, FiniteModel};
use priorlab::channels::{text::parse_channel, Channel};
use priorlab::families::Family;
use priorlab::measures::{text::parse_measure, Interval, MixedMeasure};
use priorlab::single_stage::CostFunction;

use crate::error::{lift, CliError, Result};

#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: String,
    /// Line of the section header.
    pub line: usize,
    pub kind: Kind,
    /// Section text without comments or blank lines, for plan hashing.
    pub canonical: String,
}

#[derive(Clone, Debug)]
pub enum Kind {
    Reproduce { example: String, ns: Vec<usize> },
    SingleStage(SingleStage),
    Empirical(Empirical),
    BeliefMdp(BeliefMdp),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundCheck {
    Tv,
    Mismatch,
    Wasserstein,
}

#[derive(Clone, Debug)]
pub enum Pair {
    Family { family: Family, ns: Vec<usize> },
    Explicit {
        p: MixedMeasure,
        p_prime: MixedMeasure,
        channel: Channel,
        cost: CostFunction,
    },
}

#[derive(Clone, Debug)]
pub struct SingleStage {
    pub pair: Pair,
    pub checks: Vec<BoundCheck>,
    pub alpha: Option<f64>,
}

#[derive(Clone, Debug)]
pub enum Seeds {
    List(Vec<u64>),
    /// `count` consecutive seeds from the global base seed.
    Count(usize),
}

#[derive(Clone, Debug)]
pub struct Empirical {
    pub prior: MixedMeasure,
    pub channel: Channel,
    pub cost: CostFunction,
    pub sizes: Vec<usize>,
    pub seeds: Seeds,
}

#[derive(Clone, Debug)]
pub struct BeliefMdp {
    pub model: FiniteModel,
    pub resolution: Option<u32>,
    pub tol: Option<f64>,
    pub prior: Option<Belief>,
    pub prior_prime: Option<Belief>,
    pub horizon: Option<usize>,
}

fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn reals(words: &[&str], line: usize) -> Result<Vec<f64>> {
    words
        .iter()
        .map(|w| {
            w.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::parse(line, format!("`{w}` is not a finite number")))
        })
        .collect()
}

fn counts(words: &[&str], line: usize) -> Result<Vec<usize>> {
    words
        .iter()
        .map(|w| w.parse::<usize>().map_err(|_| CliError::parse(line, format!("`{w}` is not a count"))))
        .collect()
}

/// One `key value…` line or a block body.
#[derive(Debug)]
enum Item {
    Line { line: usize, key: String, args: Vec<String> },
    Block { line: usize, key: String, name: Option<String>, body: String, body_line: usize },
}

impl Item {
    fn line(&self) -> usize {
        match self {
            Item::Line { line, .. } | Item::Block { line, .. } => *line,
        }
    }
}

struct Section {
    name: String,
    line: usize,
    items: Vec<Item>,
    canonical: String,
}

const BLOCKS: [&str; 3] = ["prior", "channel", "model"];

fn split_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
    while let Some((no, raw)) = lines.next() {
        let line = strip(raw);
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            let name = line
                .strip_prefix('[')
                .and_then(|l| l.strip_suffix(']'))
                .ok_or_else(|| CliError::parse(no, format!("malformed section header `{line}`")))?;
            sections.push(Section {
                name: name.trim().to_string(),
                line: no,
                items: Vec::new(),
                canonical: format!("[{}]\n", name.trim()),
            });
            continue;
        }
        let section = sections
            .last_mut()
            .ok_or_else(|| CliError::parse(no, "content before the first section header"))?;
        section.canonical += line;
        section.canonical.push('\n');
        let words: Vec<&str> = line.split_whitespace().collect();
        let key = words[0].to_string();
        // `prior 1 0` in a belief_mdp section is a vector, not a block
        let is_block = BLOCKS.contains(&words[0]) && words.len() <= 2 && words[1..].iter().all(|w| w.parse::<f64>().is_err());
        if is_block {
            let mut body = String::new();
            let body_line = no + 1;
            let mut closed = false;
            for (bno, braw) in lines.by_ref() {
                let b = strip(braw);
                if b == "end" {
                    closed = true;
                    section.canonical += "end\n";
                    break;
                }
                if b.starts_with('[') {
                    return Err(CliError::parse(bno, format!("`{key}` block opened on line {no} is not closed by `end`")));
                }
                if !b.is_empty() {
                    section.canonical += b;
                    section.canonical.push('\n');
                }
                // keep blank lines so offsets stay aligned
                body += braw;
                body.push('\n');
            }
            if !closed {
                return Err(CliError::parse(no, format!("`{key}` block is not closed by `end`")));
            }
            section.items.push(Item::Block {
                line: no,
                key,
                name: words.get(1).map(|s| s.to_string()),
                body,
                body_line,
            });
        } else {
            section.items.push(Item::Line {
                line: no,
                key,
                args: words[1..].iter().map(|s| s.to_string()).collect(),
            });
        }
    }
    Ok(sections)
}

/// Collected items of one section with "used exactly once" bookkeeping.
struct Fields {
    items: Vec<Option<Item>>,
    header: usize,
}

impl Fields {
    fn take_line(&mut self, key: &str) -> Result<Option<(usize, Vec<String>)>> {
        let mut found = None;
        for slot in self.items.iter_mut() {
            if matches!(slot, Some(Item::Line { key: k, .. }) if k == key) {
                if let Some(Item::Line { line, args, .. }) = slot.take() {
                    if found.is_some() {
                        return Err(CliError::parse(line, format!("`{key}` given twice")));
                    }
                    found = Some((line, args));
                }
            }
        }
        Ok(found)
    }

    fn require_line(&mut self, key: &str) -> Result<(usize, Vec<String>)> {
        self.take_line(key)?
            .ok_or_else(|| CliError::parse(self.header, format!("section needs a `{key}` line")))
    }

    fn take_block(&mut self, key: &str, name: Option<&str>) -> Result<Option<(usize, String)>> {
        let mut found = None;
        for slot in self.items.iter_mut() {
            let hit = matches!(slot, Some(Item::Block { key: k, name: nm, .. }) if k == key && nm.as_deref() == name);
            if hit {
                if let Some(Item::Block { line, body, body_line, .. }) = slot.take() {
                    if found.is_some() {
                        return Err(CliError::parse(line, format!("`{key}` block given twice")));
                    }
                    found = Some((body_line, body));
                }
            }
        }
        Ok(found)
    }

    fn require_block(&mut self, key: &str, name: Option<&str>) -> Result<(usize, String)> {
        let label = match name {
            Some(n) => format!("{key} {n}"),
            None => key.to_string(),
        };
        self.take_block(key, name)?
            .ok_or_else(|| CliError::parse(self.header, format!("section needs a `{label}` block")))
    }

    fn finish(self) -> Result<()> {
        match self.items.into_iter().flatten().next() {
            None => Ok(()),
            Some(item) => {
                let what = match &item {
                    Item::Line { key, .. } => format!("unexpected `{key}` line"),
                    Item::Block { key, .. } => format!("unexpected `{key}` block"),
                };
                Err(CliError::parse(item.line(), what))
            }
        }
    }
}

fn single<'a>(line: usize, key: &str, args: &'a [String]) -> Result<&'a str> {
    match args {
        [v] => Ok(v),
        _ => Err(CliError::parse(line, format!("`{key}` takes one value"))),
    }
}

fn as_strs(args: &[String]) -> Vec<&str> {
    args.iter().map(|s| s.as_str()).collect()
}

fn parse_cost(f: &mut Fields, domain: Interval) -> Result<CostFunction> {
    let (line, args) = f.require_line("cost")?;
    let kind = single(line, "cost", &args)?.to_string();
    let actions = match f.take_line("actions")? {
        Some((l, a)) => {
            let v = reals(&as_strs(&a), l)?;
            if v.len() != 2 {
                return Err(CliError::parse(l, "`actions` takes <lo> <hi>"));
            }
            Some(Interval::new(v[0], v[1]).map_err(|e| CliError::parse(l, e.to_string()))?)
        }
        None => None,
    };
    let built = match kind.as_str() {
        "quadratic" => CostFunction::quadratic(domain, actions.unwrap_or(domain)),
        "truncated" => CostFunction::truncated_quadratic(actions.unwrap_or(Interval { lo: -1.0, hi: 1.0 })),
        other => return Err(CliError::parse(line, format!("unknown cost `{other}` (quadratic | truncated)"))),
    };
    built.map_err(|e| CliError::parse(line, e.to_string()))
}

fn measure_block(f: &mut Fields, name: Option<&str>) -> Result<MixedMeasure> {
    let (line, body) = f.require_block("prior", name)?;
    parse_measure(&body, line).map_err(lift)
}

fn channel_block(f: &mut Fields, domain: Interval) -> Result<Channel> {
    let (line, body) = f.require_block("channel", None)?;
    parse_channel(&body, line, Some(domain)).map_err(lift)
}

fn belief_line(f: &mut Fields, key: &str, states: usize) -> Result<Option<Belief>> {
    match f.take_line(key)? {
        None => Ok(None),
        Some((line, args)) => {
            let w = reals(&as_strs(&args), line)?;
            if w.len() != states {
                return Err(CliError::parse(line, format!("`{key}` needs {states} weights")));
            }
            Belief::new(w).map(Some).map_err(|e| CliError::parse(line, e.to_string()))
        }
    }
}

fn build(section: Section) -> Result<Scenario> {
    let header = section.line;
    let mut f = Fields {
        items: section.items.into_iter().map(Some).collect(),
        header,
    };
    let (id_line, id_args) = f.require_line("id")?;
    let id = single(id_line, "id", &id_args)?.to_string();
    let kind = match section.name.as_str() {
        "reproduce" => {
            let (l, a) = f.require_line("example")?;
            let example = single(l, "example", &a)?.to_string();
            if !crate::reproduce::EXAMPLES.iter().any(|(e, _)| *e == example) {
                return Err(CliError::parse(l, format!("unknown example `{example}`")));
            }
            let ns = match f.take_line("n")? {
                Some((l, a)) => counts(&as_strs(&a), l)?,
                None => Vec::new(),
            };
            Kind::Reproduce { example, ns }
        }
        "single_stage" => {
            let pair = match f.take_line("family")? {
                Some((l, a)) => {
                    let family: Family = single(l, "family", &a)?.parse().map_err(|e: priorlab::Error| CliError::parse(l, e.to_string()))?;
                    let (nl, na) = f.require_line("n")?;
                    let ns = counts(&as_strs(&na), nl)?;
                    if let Some(bad) = ns.iter().find(|&&n| n < family.min_n()) {
                        return Err(CliError::parse(nl, format!("{family} needs n ≥ {}, got {bad}", family.min_n())));
                    }
                    Pair::Family { family, ns }
                }
                None => {
                    let p = measure_block(&mut f, Some("p"))?;
                    let p_prime = measure_block(&mut f, Some("p_prime"))?;
                    let channel = channel_block(&mut f, p.domain())?;
                    let cost = parse_cost(&mut f, p.domain())?;
                    Pair::Explicit { p, p_prime, channel, cost }
                }
            };
            let checks = match f.take_line("checks")? {
                None => vec![BoundCheck::Tv, BoundCheck::Mismatch],
                Some((l, a)) => a
                    .iter()
                    .map(|c| match c.as_str() {
                        "tv" => Ok(BoundCheck::Tv),
                        "mismatch" => Ok(BoundCheck::Mismatch),
                        "wasserstein" => Ok(BoundCheck::Wasserstein),
                        other => Err(CliError::parse(l, format!("unknown check `{other}` (tv | mismatch | wasserstein)"))),
                    })
                    .collect::<Result<Vec<_>>>()?,
            };
            let alpha = match f.take_line("alpha")? {
                Some((l, a)) => Some(reals(&[single(l, "alpha", &a)?], l)?[0]),
                None => None,
            };
            Kind::SingleStage(SingleStage { pair, checks, alpha })
        }
        "empirical" => {
            let prior = measure_block(&mut f, None)?;
            let channel = channel_block(&mut f, prior.domain())?;
            let cost = parse_cost(&mut f, prior.domain())?;
            let (sl, sa) = f.require_line("sizes")?;
            let sizes = counts(&as_strs(&sa), sl)?;
            let seeds = match (f.take_line("seeds")?, f.take_line("seed_count")?) {
                (Some((l, a)), None) => Seeds::List(
                    a.iter()
                        .map(|w| w.parse::<u64>().map_err(|_| CliError::parse(l, format!("`{w}` is not a seed"))))
                        .collect::<Result<_>>()?,
                ),
                (None, Some((l, a))) => Seeds::Count(counts(&[single(l, "seed_count", &a)?], l)?[0]),
                (Some((l, _)), Some(_)) => return Err(CliError::parse(l, "give either `seeds` or `seed_count`")),
                (None, None) => return Err(CliError::parse(header, "section needs `seeds` or `seed_count`")),
            };
            Kind::Empirical(Empirical { prior, channel, cost, sizes, seeds })
        }
        "belief_mdp" => {
            let (ml, body) = f.require_block("model", None)?;
            let model = parse_model(&body, ml).map_err(lift)?;
            let resolution = match f.take_line("resolution")? {
                Some((l, a)) => Some(counts(&[single(l, "resolution", &a)?], l)?[0] as u32),
                None => None,
            };
            let tol = match f.take_line("tol")? {
                Some((l, a)) => Some(reals(&[single(l, "tol", &a)?], l)?[0]),
                None => None,
            };
            let prior = belief_line(&mut f, "prior", model.n_states())?;
            let prior_prime = belief_line(&mut f, "prior_prime", model.n_states())?;
            let horizon = match f.take_line("horizon")? {
                Some((l, a)) => Some(counts(&[single(l, "horizon", &a)?], l)?[0]),
                None => None,
            };
            if prior.is_some() != prior_prime.is_some() {
                return Err(CliError::parse(header, "`prior` and `prior_prime` go together"));
            }
            Kind::BeliefMdp(BeliefMdp { model, resolution, tol, prior, prior_prime, horizon })
        }
        other => return Err(CliError::parse(header, format!("unknown section `[{other}]`"))),
    };
    f.finish()?;
    Ok(Scenario {
        id,
        line: header,
        kind,
        canonical: section.canonical,
    })
}

/// Parses and validates every scenario; ids must be unique.
pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for section in split_sections(text)? {
        let s = build(section)?;
        if !seen.insert(s.id.clone()) {
            return Err(CliError::parse(s.line, format!("duplicate scenario id `{}`", s.id)));
        }
        out.push(s);
    }
    Ok(out)
}
