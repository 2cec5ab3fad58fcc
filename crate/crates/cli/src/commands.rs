use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use zerosum::davenport::SearchResultJson;
use zerosum::extremal::{
    check_cyclic_structure, check_minimal_zero_sum_order, check_weighted_lemma, enumerate_extremal, verify_theorem,
};
use zerosum::report::ReportJson;
use zerosum::{
    max_free_length, quaternion_names, reachable_products, EngineError, GSequence, Group, GroupError, GroupSpec,
    SearchError, SearchOptions, SearchResult, SequenceError, Target, Verdict, VerificationReport,
};

use crate::args::{Command, Format, FreeCommand, GroupCommand, RunConfig};
use crate::cache::{Cache, CacheRecord, Kind};
use crate::render;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Budget(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Budget(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SequenceError> for CliError {
    fn from(e: SequenceError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::BudgetExhausted { .. } => CliError::Budget(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub struct Outcome {
    pub stdout: String,
    /// Some verification produced a `failure` verdict.
    pub failed: bool,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome { stdout, failed: false }
    }
}

struct Ctx {
    config: RunConfig,
    cache: Option<Cache>,
}

impl Ctx {
    fn opts(&self) -> SearchOptions {
        SearchOptions {
            budget: self.config.budget,
            parallelism: self.config.parallelism as usize,
        }
    }

    fn build(&self, spec: &GroupSpec) -> Result<Group, CliError> {
        Ok(Group::build_seeded(spec, self.config.rng_seed)?)
    }

    /// Cached payload for `key`, or the result of `compute` (then stored).
    fn cached<T, F>(&self, kind: Kind, spec: &GroupSpec, key: &str, compute: F) -> Result<(T, bool), CliError>
    where
        T: Serialize + for<'de> Deserialize<'de>,
        F: FnOnce() -> Result<T, CliError>,
    {
        if let Some(cache) = &self.cache {
            if let Some(record) = cache.lookup(kind, key) {
                match serde_json::from_str(&record.payload) {
                    Ok(value) => return Ok((value, true)),
                    Err(e) => eprintln!("warning: cached {key} does not decode ({e}); recomputing"),
                }
            }
        }
        let value = compute()?;
        if let Some(cache) = &self.cache {
            let payload = serde_json::to_string(&value).map_err(|e| CliError::Runtime(e.to_string()))?;
            cache.store(key, &CacheRecord::new(kind, &spec.to_string(), payload))?;
        }
        Ok((value, false))
    }
}

fn default_cache_dir() -> PathBuf {
    match std::env::var_os("HOME") {
        Some(home) => PathBuf::from(home).join(".cache").join("zerosum"),
        None => PathBuf::from(".zerosum-cache"),
    }
}

pub fn run(config: RunConfig, command: Command) -> Result<Outcome, CliError> {
    let uses_cache = matches!(
        command,
        Command::Davenport { .. } | Command::Extremal { .. } | Command::Verify { .. } | Command::Report
    );
    let cache = if uses_cache && !config.no_cache {
        let dir = config.cache_dir.clone().unwrap_or_else(default_cache_dir);
        let cache = Cache::open(&dir)
            .map_err(|e| CliError::Usage(format!("cannot create cache directory {}: {e}", dir.display())))?;
        Some(cache)
    } else {
        None
    };
    let ctx = Ctx { config, cache };
    match command {
        Command::Group(GroupCommand::Info { group, quaternion }) => group_info(&ctx, &group, quaternion),
        Command::Free(FreeCommand::Check { group, seq, seq_file }) => free_check(&ctx, &group, seq, seq_file),
        Command::Reach { group, seq } => reach(&ctx, &group, &seq),
        Command::Davenport { group } => davenport(&ctx, &group),
        Command::Extremal { group } => extremal(&ctx, &group),
        Command::Verify { target, param } => verify(&ctx, target, &param),
        Command::Report => report(&ctx),
    }
}

#[derive(Serialize)]
struct ElementInfo {
    name: String,
    order: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    quaternion: Option<String>,
}

#[derive(Serialize)]
struct GroupInfo {
    group: GroupSpec,
    order: usize,
    abelian: bool,
    exponent: u64,
    center: Vec<String>,
    elements: Vec<ElementInfo>,
}

fn group_info(ctx: &Ctx, spec: &GroupSpec, quaternion: bool) -> Result<Outcome, CliError> {
    let g = ctx.build(spec)?;
    let quat = if quaternion { Some(quaternion_names(&g)?) } else { None };
    let info = GroupInfo {
        group: spec.clone(),
        order: g.order(),
        abelian: g.is_abelian(),
        exponent: g.exponent(),
        center: g.center().into_iter().map(|e| g.name(e).to_string()).collect(),
        elements: g
            .elements()
            .map(|e| ElementInfo {
                name: g.name(e).to_string(),
                order: g.element_order(e),
                quaternion: quat.as_ref().map(|q| q[e.index()].clone()),
            })
            .collect(),
    };
    let mut headers = vec!["element", "order"];
    if quaternion {
        headers.push("quaternion");
    }
    let rows: Vec<Vec<String>> = info
        .elements
        .iter()
        .map(|e| {
            let mut row = vec![e.name.clone(), e.order.to_string()];
            row.extend(e.quaternion.clone());
            row
        })
        .collect();
    let text = match ctx.config.format {
        Format::Json => render::json("group-info", &info),
        Format::Csv => render::csv(&headers, &rows),
        Format::Table => format!(
            "group: {}\norder: {}\nabelian: {}\nexponent: {}\ncenter: {}\n\n{}",
            info.group,
            info.order,
            info.abelian,
            info.exponent,
            info.center.join(", "),
            render::table(&headers, &rows)
        ),
    };
    Ok(Outcome::ok(text))
}

#[derive(Serialize)]
struct FreeResult {
    sequence: String,
    free: bool,
}

fn free_check(
    ctx: &Ctx,
    spec: &GroupSpec,
    seq: Option<String>,
    seq_file: Option<PathBuf>,
) -> Result<Outcome, CliError> {
    let g = ctx.build(spec)?;
    let from_file = seq_file.is_some();
    let lines: Vec<String> = match (seq, seq_file) {
        (Some(s), _) => vec![s],
        (None, Some(path)) => fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect(),
        (None, None) => return Err(CliError::Usage("one of --seq or --seq-file is required".into())),
    };
    let mut results = Vec::new();
    for line in &lines {
        let s = GSequence::parse(&g, line)?;
        let free = zerosum::is_product1_free(&g, &s)?;
        results.push(FreeResult {
            sequence: s.to_string(),
            free,
        });
    }
    #[derive(Serialize)]
    struct Body<'a> {
        group: &'a GroupSpec,
        results: &'a [FreeResult],
    }
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| vec![r.sequence.clone(), r.free.to_string()])
        .collect();
    let text = match ctx.config.format {
        Format::Json => render::json(
            "free-check",
            Body {
                group: spec,
                results: &results,
            },
        ),
        Format::Csv => render::csv(&["sequence", "free"], &rows),
        Format::Table if !from_file => format!("free: {}\n", results[0].free),
        Format::Table => results
            .iter()
            .map(|r| format!("{}  free: {}\n", r.sequence, r.free))
            .collect(),
    };
    Ok(Outcome::ok(text))
}

fn reach(ctx: &Ctx, spec: &GroupSpec, text: &str) -> Result<Outcome, CliError> {
    let g = ctx.build(spec)?;
    let s = GSequence::parse(&g, text)?;
    let set = reachable_products(&g, &s)?;
    let names: Vec<String> = set.names();
    let identity = set.contains(g.identity());
    #[derive(Serialize)]
    struct Body<'a> {
        group: &'a GroupSpec,
        sequence: String,
        reachable: &'a [String],
        free: bool,
    }
    let out = match ctx.config.format {
        Format::Json => render::json(
            "reach",
            Body {
                group: spec,
                sequence: s.to_string(),
                reachable: &names,
                free: !identity,
            },
        ),
        Format::Csv => render::csv(&["element"], &names.iter().map(|n| vec![n.clone()]).collect::<Vec<_>>()),
        Format::Table => format!(
            "sequence: {s}\nreachable ({}): {}\nfree: {}\n",
            names.len(),
            names.join(", "),
            !identity
        ),
    };
    Ok(Outcome::ok(out))
}

fn davenport(ctx: &Ctx, spec: &GroupSpec) -> Result<Outcome, CliError> {
    let g = ctx.build(spec)?;
    let (mut result, hit): (SearchResult, bool) = ctx.cached(Kind::Davenport, spec, &spec.key(), || {
        Ok(max_free_length(&g, &ctx.opts())?)
    })?;
    if hit {
        result.nodes_expanded = 0;
    }
    let j = SearchResultJson::from(result);
    #[derive(Serialize)]
    struct Body {
        cached: bool,
        result: SearchResultJson,
    }
    let row = vec![
        j.group.to_string(),
        j.davenport.to_string(),
        j.max_free_length.to_string(),
        j.witness.clone(),
        j.nodes.to_string(),
        j.millis.to_string(),
    ];
    let text = match ctx.config.format {
        Format::Json => render::json("davenport", Body { cached: hit, result: j }),
        Format::Csv => render::csv(
            &["group", "davenport", "max_free_length", "witness", "nodes", "millis"],
            &[row],
        ),
        Format::Table => format!(
            "group: {}\ndavenport: {}\nmax_free_length: {}\nwitness: {}\nnodes: {}\ncache: {}\n",
            j.group,
            j.davenport,
            j.max_free_length,
            j.witness,
            j.nodes,
            if hit { "hit" } else { "miss" }
        ),
    };
    Ok(Outcome::ok(text))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremalPayload {
    pub group: GroupSpec,
    pub davenport: usize,
    pub count: usize,
    pub sequences: Vec<String>,
    pub nodes: u64,
}

fn extremal(ctx: &Ctx, spec: &GroupSpec) -> Result<Outcome, CliError> {
    let g = ctx.build(spec)?;
    let (mut payload, hit): (ExtremalPayload, bool) = ctx.cached(Kind::Extremal, spec, &spec.key(), || {
        let ext = enumerate_extremal(&g, &ctx.opts())?;
        Ok(ExtremalPayload {
            group: spec.clone(),
            davenport: ext.davenport,
            count: ext.sequences.len(),
            sequences: ext.sequences.iter().map(ToString::to_string).collect(),
            nodes: ext.nodes,
        })
    })?;
    if hit {
        payload.nodes = 0;
    }
    #[derive(Serialize)]
    struct Body {
        cached: bool,
        result: ExtremalPayload,
    }
    let rows: Vec<Vec<String>> = payload.sequences.iter().map(|s| vec![s.clone()]).collect();
    let text = match ctx.config.format {
        Format::Json => render::json(
            "extremal",
            Body {
                cached: hit,
                result: payload,
            },
        ),
        Format::Csv => render::csv(&["sequence"], &rows),
        Format::Table => {
            let mut t = format!(
                "group: {}\ndavenport: {}\nextremal sequences: {}\nnodes: {}\n",
                payload.group, payload.davenport, payload.count, payload.nodes
            );
            for s in &payload.sequences {
                t.push_str(s);
                t.push('\n');
            }
            t
        }
    };
    Ok(Outcome::ok(text))
}

/// `7`, `4..8` (inclusive), `4..=8` or `2,4,5`.
fn parse_numbers(param: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Usage(format!("invalid --param `{param}`: expected n, a..b or a list"));
    let num = |s: &str| s.trim().parse::<u32>().map_err(|_| bad());
    if let Some((a, b)) = param.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    param.split(',').map(num).collect()
}

/// Groups or moduli named by the `--param` values of a target.
fn verify_inputs(target: Target, params: &[String]) -> Result<Vec<GroupSpec>, CliError> {
    let mut specs = Vec::new();
    for p in params {
        match target {
            Target::Metacyclic => {
                let v = parse_numbers(p)?;
                let [q, m, s] = v[..] else {
                    return Err(CliError::Usage(format!("metacyclic --param `{p}` must be q,m,s")));
                };
                specs.push(GroupSpec::Metacyclic { q, m, s });
            }
            Target::Minzero => {
                let spec = match p.parse::<u32>() {
                    Ok(n) => GroupSpec::Cyclic(n),
                    Err(_) => p.parse::<GroupSpec>()?,
                };
                specs.push(spec);
            }
            _ => {
                for n in parse_numbers(p)? {
                    specs.push(match target {
                        Target::Dihedral => GroupSpec::Dihedral(n),
                        Target::Dicyclic => GroupSpec::Dicyclic(n),
                        _ => GroupSpec::Cyclic(n),
                    });
                }
            }
        }
    }
    for s in &specs {
        s.validate()?;
    }
    Ok(specs)
}

fn run_check(ctx: &Ctx, target: Target, spec: &GroupSpec) -> Result<VerificationReport, CliError> {
    let opts = ctx.opts();
    let n = match spec {
        GroupSpec::Cyclic(n) => *n,
        _ => 0,
    };
    Ok(match target {
        Target::Weighted => check_weighted_lemma(n)?,
        Target::CyclicStructure => check_cyclic_structure(n, &opts)?,
        Target::Minzero => check_minimal_zero_sum_order(&ctx.build(spec)?, &opts)?,
        _ => verify_theorem(&ctx.build(spec)?, &opts)?,
    })
}

fn csv_row(r: &VerificationReport) -> Vec<String> {
    vec![
        r.group.to_string(),
        r.davenport.map(|d| d.to_string()).unwrap_or_default(),
        r.enumerated_count.to_string(),
        r.verdict.to_string(),
        r.missing.len().to_string(),
        r.extra.len().to_string(),
        r.nodes.to_string(),
        r.millis.to_string(),
    ]
}

pub const CSV_HEADER: [&str; 8] = [
    "group",
    "davenport",
    "extremal_count",
    "verdict",
    "missing",
    "extra",
    "nodes",
    "millis",
];

fn verify(ctx: &Ctx, target: Target, params: &[String]) -> Result<Outcome, CliError> {
    let specs = verify_inputs(target, params)?;
    let mut reports = Vec::new();
    for spec in &specs {
        let key = format!("{}_{}", target.as_str().replace('-', "_"), spec.key());
        let (mut r, hit): (VerificationReport, bool) =
            ctx.cached(Kind::Verify, spec, &key, || run_check(ctx, target, spec))?;
        if hit {
            r.nodes = 0;
        }
        reports.push(r);
    }
    let failed = reports.iter().any(|r| r.verdict == Verdict::Failure);
    #[derive(Serialize)]
    struct Body {
        target: Target,
        reports: Vec<ReportJson>,
    }
    let text = match ctx.config.format {
        Format::Json => render::json(
            "verify",
            Body {
                target,
                reports: reports.iter().cloned().map(ReportJson::from).collect(),
            },
        ),
        Format::Csv => render::csv(&CSV_HEADER, &reports.iter().map(csv_row).collect::<Vec<_>>()),
        Format::Table => verify_table(&reports),
    };
    Ok(Outcome { stdout: text, failed })
}

fn verify_table(reports: &[VerificationReport]) -> String {
    let headers = [
        "group",
        "target",
        "D",
        "enumerated",
        "predicted",
        "missing",
        "extra",
        "verdict",
        "nodes",
        "ms",
    ];
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.group.to_string(),
                r.target.to_string(),
                r.davenport.map(|d| d.to_string()).unwrap_or_else(|| "-".into()),
                r.enumerated_count.to_string(),
                r.predicted_count.to_string(),
                r.missing.len().to_string(),
                r.extra.len().to_string(),
                r.verdict.to_string(),
                r.nodes.to_string(),
                r.millis.to_string(),
            ]
        })
        .collect();
    let mut out = render::table(&headers, &rows);
    for r in reports {
        for s in &r.missing {
            out.push_str(&format!("{} missing: {s}\n", r.group));
        }
        for s in &r.extra {
            out.push_str(&format!("{} extra: {s}\n", r.group));
        }
        for n in &r.notes {
            out.push_str(&format!("{} note: {n}\n", r.group));
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportRow {
    pub group: String,
    pub target: Option<String>,
    pub davenport: Option<usize>,
    pub extremal_count: Option<usize>,
    pub verdict: Option<String>,
    pub missing: usize,
    pub extra: usize,
    pub nodes: u64,
    pub millis: u64,
}

fn report(ctx: &Ctx) -> Result<Outcome, CliError> {
    let records = match &ctx.cache {
        Some(cache) => cache.records()?,
        None => Vec::new(),
    };
    let mut rows: Vec<ReportRow> = Vec::new();
    // davenport and extremal results for groups with no verification row
    let mut plain: BTreeMap<String, ReportRow> = BTreeMap::new();
    for rec in &records {
        let decode = |e: serde_json::Error| CliError::Runtime(format!("cached {} record: {e}", rec.group_spec));
        match rec.kind {
            Kind::Verify => {
                let r: VerificationReport = serde_json::from_str(&rec.payload).map_err(decode)?;
                rows.push(ReportRow {
                    group: r.group.to_string(),
                    target: Some(r.target.to_string()),
                    davenport: r.davenport,
                    extremal_count: Some(r.enumerated_count),
                    verdict: Some(r.verdict.to_string()),
                    missing: r.missing.len(),
                    extra: r.extra.len(),
                    nodes: r.nodes,
                    millis: r.millis,
                });
            }
            Kind::Davenport => {
                let r: SearchResult = serde_json::from_str(&rec.payload).map_err(decode)?;
                let row = plain.entry(rec.group_spec.clone()).or_default();
                row.group = rec.group_spec.clone();
                row.davenport = Some(r.davenport);
                row.nodes += r.nodes_expanded;
                row.millis += r.elapsed.as_millis() as u64;
            }
            Kind::Extremal => {
                let r: ExtremalPayload = serde_json::from_str(&rec.payload).map_err(decode)?;
                let row = plain.entry(rec.group_spec.clone()).or_default();
                row.group = rec.group_spec.clone();
                row.davenport = Some(r.davenport);
                row.extremal_count = Some(r.count);
                row.nodes += r.nodes;
            }
        }
    }
    rows.extend(plain.into_values());
    if rows.is_empty() {
        let text = match ctx.config.format {
            Format::Json => render::json("report", ReportBody { rows }),
            Format::Csv => render::csv(&CSV_HEADER, &[]),
            Format::Table => "no results\n".to_string(),
        };
        return Ok(Outcome::ok(text));
    }
    let opt = |v: &Option<String>| v.clone().unwrap_or_else(|| "-".into());
    let num = |v: Option<usize>| v.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
    let text = match ctx.config.format {
        Format::Json => render::json("report", ReportBody { rows }),
        Format::Csv => render::csv(
            &CSV_HEADER,
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.group.clone(),
                        r.davenport.map(|d| d.to_string()).unwrap_or_default(),
                        r.extremal_count.map(|d| d.to_string()).unwrap_or_default(),
                        r.verdict.clone().unwrap_or_default(),
                        r.missing.to_string(),
                        r.extra.to_string(),
                        r.nodes.to_string(),
                        r.millis.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Table => render::table(
            &["group", "target", "D", "extremal", "verdict", "missing", "extra"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.group.clone(),
                        opt(&r.target),
                        num(r.davenport),
                        num(r.extremal_count),
                        opt(&r.verdict),
                        r.missing.to_string(),
                        r.extra.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    };
    Ok(Outcome::ok(text))
}

#[derive(Serialize)]
struct ReportBody {
    rows: Vec<ReportRow>,
}
