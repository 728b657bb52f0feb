//! Declarative network description and its section/key-value text format.
//!
//! A document is a sequence of sections:
//!
//! ```text
//! [network]
//! initial_inventory = uniform(0,4)
//!
//! [node.S]
//! kind = supplier
//! production = const(10)
//! capacity = 100
//! spillage_cost = 10
//!
//! [node.R1..R3]
//! kind = retailer
//! demand = normal(2,10)
//! price = 50
//! holding_cost = [1,2,4]
//! capacity = 50
//!
//! [link.S.R1..R3]
//! lead_time = [1,2,3]
//! fixed_cost = 50
//! max_order = 50
//! ```
//!
//! A section name may use a numeric range (`R1..R10`) to declare several
//! nodes or links at once. A bracketed list value is handed out to the
//! expanded items in order and repeated cyclically when it is shorter.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use super::dist::Distribution;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl ConfigError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ConfigError { line, message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Supplier,
    Warehouse,
    Retailer,
}

impl NodeKind {
    fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "supplier" => Some(NodeKind::Supplier),
            "warehouse" => Some(NodeKind::Warehouse),
            "retailer" => Some(NodeKind::Retailer),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            NodeKind::Supplier => "supplier",
            NodeKind::Warehouse => "warehouse",
            NodeKind::Retailer => "retailer",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DemandType {
    #[default]
    LostSales,
    Backorder,
}

impl DemandType {
    fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "lost-sales" | "lost" => Some(DemandType::LostSales),
            "backorder" | "backlog" => Some(DemandType::Backorder),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DemandType::LostSales => "lost-sales",
            DemandType::Backorder => "backorder",
        }
    }
}

/// Stored for nodes with unlimited capacity (infinite-supply suppliers).
pub const UNBOUNDED: i64 = i64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub id: String,
    pub kind: NodeKind,
    pub holding_cost: f64,
    pub capacity: i64,
    pub spillage_cost: f64,
    pub price: f64,
    pub demand: Option<Distribution>,
    pub production: Option<Distribution>,
    pub infinite_supply: bool,
    pub demand_type: DemandType,
    /// Per-unit, per-period penalty on the end-of-period backlog.
    pub backorder_cost: f64,
    /// Upper end of the backlog range used when boxing the value network input.
    pub backlog_cap: i64,
    pub initial_inventory: Option<Distribution>,
}

impl NodeSpec {
    pub fn new(id: impl Into<String>, kind: NodeKind) -> Self {
        NodeSpec {
            id: id.into(),
            kind,
            holding_cost: 0.0,
            capacity: UNBOUNDED,
            spillage_cost: 0.0,
            price: 0.0,
            demand: None,
            production: None,
            infinite_supply: false,
            demand_type: DemandType::LostSales,
            backorder_cost: 0.0,
            backlog_cap: 100,
            initial_inventory: None,
        }
    }

    pub fn is_backorder(&self) -> bool {
        self.demand.is_some() && self.demand_type == DemandType::Backorder
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkSpec {
    pub from: String,
    pub to: String,
    pub lead_time: usize,
    pub fixed_cost: f64,
    pub variable_cost: f64,
    pub max_order: i64,
    pub min_order: i64,
}

impl LinkSpec {
    pub fn new(from: impl Into<String>, to: impl Into<String>, lead_time: usize, max_order: i64) -> Self {
        LinkSpec {
            from: from.into(),
            to: to.into(),
            lead_time,
            fixed_cost: 0.0,
            variable_cost: 0.0,
            max_order,
            min_order: 0,
        }
    }

    pub fn name(&self) -> String {
        format!("{}->{}", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub nodes: Vec<NodeSpec>,
    pub links: Vec<LinkSpec>,
    /// Default for every pipeline slot of nodes without their own override.
    pub initial_inventory: Distribution,
}

impl NetworkConfig {
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Checks the structural invariants. `line` is attached to errors that
    /// are not tied to a specific source line.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let line = 0;
        if self.nodes.is_empty() {
            return Err(ConfigError::new(line, "no nodes declared"));
        }
        let mut ids = HashSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id.as_str()) {
                return Err(ConfigError::new(line, format!("duplicate node `{}`", n.id)));
            }
            validate_node(n).map_err(|m| ConfigError::new(line, m))?;
        }
        let mut seen = HashSet::new();
        for l in &self.links {
            validate_link(l, self).map_err(|m| ConfigError::new(line, m))?;
            if !seen.insert((l.from.as_str(), l.to.as_str())) {
                return Err(ConfigError::new(line, format!("duplicate link `{}`", l.name())));
            }
        }
        self.initial_inventory
            .validate()
            .map_err(|m| ConfigError::new(line, m))?;
        // every retailer must be reachable from some supplier
        let idx: HashMap<&str, usize> =
            self.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
        let mut reach = vec![false; self.nodes.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if n.kind == NodeKind::Supplier {
                reach[i] = true;
                queue.push_back(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            for l in self.links.iter().filter(|l| idx[l.from.as_str()] == i) {
                let j = idx[l.to.as_str()];
                if !reach[j] {
                    reach[j] = true;
                    queue.push_back(j);
                }
            }
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if n.kind == NodeKind::Retailer && !reach[i] {
                return Err(ConfigError::new(
                    line,
                    format!("retailer `{}` is not reachable from any supplier", n.id),
                ));
            }
        }
        Ok(())
    }

    /// Canonical text form; parses back to an equal config.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[network]\ninitial_inventory = {}\n", self.initial_inventory);
        for n in &self.nodes {
            let _ = writeln!(out, "[node.{}]", n.id);
            let _ = writeln!(out, "kind = {}", n.kind.as_str());
            if n.infinite_supply {
                let _ = writeln!(out, "infinite_supply = true");
            } else {
                let _ = writeln!(out, "capacity = {}", n.capacity);
            }
            let _ = writeln!(out, "holding_cost = {}", n.holding_cost);
            let _ = writeln!(out, "spillage_cost = {}", n.spillage_cost);
            if let Some(p) = n.production {
                let _ = writeln!(out, "production = {p}");
            }
            if let Some(d) = n.demand {
                let _ = writeln!(out, "demand = {d}");
                let _ = writeln!(out, "price = {}", n.price);
                let _ = writeln!(out, "demand_type = {}", n.demand_type.as_str());
                if n.demand_type == DemandType::Backorder {
                    let _ = writeln!(out, "backorder_cost = {}", n.backorder_cost);
                    let _ = writeln!(out, "backlog_cap = {}", n.backlog_cap);
                }
            }
            if let Some(d) = n.initial_inventory {
                let _ = writeln!(out, "initial_inventory = {d}");
            }
            out.push('\n');
        }
        for l in &self.links {
            let _ = writeln!(out, "[link.{}.{}]", l.from, l.to);
            let _ = writeln!(out, "lead_time = {}", l.lead_time);
            let _ = writeln!(out, "fixed_cost = {}", l.fixed_cost);
            let _ = writeln!(out, "variable_cost = {}", l.variable_cost);
            let _ = writeln!(out, "max_order = {}", l.max_order);
            let _ = writeln!(out, "min_order = {}\n", l.min_order);
        }
        out
    }
}

fn nonneg(name: &str, v: f64) -> Result<(), String> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(format!("{name} must be finite and nonnegative, got {v}"))
    }
}

fn validate_node(n: &NodeSpec) -> Result<(), String> {
    nonneg("holding_cost", n.holding_cost)?;
    nonneg("spillage_cost", n.spillage_cost)?;
    nonneg("price", n.price)?;
    nonneg("backorder_cost", n.backorder_cost)?;
    if n.capacity < 0 {
        return Err(format!("node `{}`: capacity must be nonnegative", n.id));
    }
    if n.backlog_cap < 0 {
        return Err(format!("node `{}`: backlog_cap must be nonnegative", n.id));
    }
    match n.kind {
        NodeKind::Retailer => {
            if n.demand.is_none() {
                return Err(format!("retailer `{}` is missing `demand`", n.id));
            }
            if n.production.is_some() || n.infinite_supply {
                return Err(format!("retailer `{}` cannot produce", n.id));
            }
        }
        NodeKind::Supplier => {
            if n.demand.is_some() || n.price != 0.0 {
                return Err(format!("supplier `{}` cannot carry demand or price", n.id));
            }
            if n.production.is_none() && !n.infinite_supply {
                return Err(format!("supplier `{}` is missing `production`", n.id));
            }
        }
        NodeKind::Warehouse => {
            if n.demand.is_some() || n.production.is_some() || n.infinite_supply || n.price != 0.0 {
                return Err(format!(
                    "warehouse `{}` cannot carry demand, price or production",
                    n.id
                ));
            }
        }
    }
    if !n.infinite_supply && n.capacity == UNBOUNDED {
        return Err(format!("node `{}` is missing `capacity`", n.id));
    }
    if n.demand_type == DemandType::Backorder && n.demand.is_none() {
        return Err(format!("node `{}`: only demand nodes can backorder", n.id));
    }
    for d in [n.demand, n.production, n.initial_inventory].into_iter().flatten() {
        d.validate()?;
    }
    Ok(())
}

fn validate_link(l: &LinkSpec, cfg: &NetworkConfig) -> Result<(), String> {
    let from = cfg
        .nodes
        .iter()
        .find(|n| n.id == l.from)
        .ok_or_else(|| format!("link `{}` references undeclared node `{}`", l.name(), l.from))?;
    let to = cfg
        .nodes
        .iter()
        .find(|n| n.id == l.to)
        .ok_or_else(|| format!("link `{}` references undeclared node `{}`", l.name(), l.to))?;
    if l.from == l.to {
        return Err(format!("self-link on `{}`", l.from));
    }
    if to.infinite_supply {
        return Err(format!("infinite-supply node `{}` cannot receive shipments", to.id));
    }
    if from.kind == NodeKind::Retailer {
        return Err(format!("retailer `{}` cannot ship downstream", from.id));
    }
    nonneg("fixed_cost", l.fixed_cost)?;
    nonneg("variable_cost", l.variable_cost)?;
    if l.min_order < 0 || l.min_order > l.max_order {
        return Err(format!(
            "link `{}`: need 0 <= min_order <= max_order, got {}..{}",
            l.name(),
            l.min_order,
            l.max_order
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// parser

#[derive(Debug, Clone)]
enum Value {
    Scalar(String),
    List(Vec<String>),
}

impl Value {
    fn pick(&self, i: usize) -> &str {
        match self {
            Value::Scalar(s) => s,
            Value::List(v) => &v[i % v.len()],
        }
    }
}

#[derive(Debug)]
enum SectionKind {
    Network,
    Nodes(Vec<String>),
    Links(Vec<(String, String)>),
}

#[derive(Debug)]
struct Section {
    line: usize,
    kind: SectionKind,
    entries: Vec<(usize, String, Value)>,
}

/// Splits on top-level commas, ignoring those inside parentheses.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// `R1..R10` -> R1, R2, ..., R10. Plain ids expand to themselves.
fn expand_ids(spec: &str) -> Result<Vec<String>, String> {
    let Some((a, b)) = spec.split_once("..") else {
        if spec.is_empty() || !spec.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(format!("invalid identifier `{spec}`"));
        }
        return Ok(vec![spec.to_string()]);
    };
    let split = |s: &str| -> Result<(String, u64), String> {
        let pos = s
            .find(|c: char| c.is_ascii_digit())
            .ok_or_else(|| format!("range endpoint `{s}` has no numeric suffix"))?;
        let num = s[pos..]
            .parse::<u64>()
            .map_err(|_| format!("range endpoint `{s}` has a malformed numeric suffix"))?;
        Ok((s[..pos].to_string(), num))
    };
    let (pa, na) = split(a)?;
    let (pb, nb) = split(b)?;
    if pa != pb || na > nb {
        return Err(format!("invalid range `{spec}`"));
    }
    Ok((na..=nb).map(|k| format!("{pa}{k}")).collect())
}

fn parse_header(body: &str) -> Result<SectionKind, String> {
    if body == "network" {
        return Ok(SectionKind::Network);
    }
    if let Some(rest) = body.strip_prefix("node.") {
        return Ok(SectionKind::Nodes(expand_ids(rest)?));
    }
    if let Some(rest) = body.strip_prefix("link.") {
        // The endpoints themselves may contain `..`, so split on the first
        // dot that is not part of a range.
        let bytes = rest.as_bytes();
        let mut cut = None;
        for i in 0..bytes.len() {
            if bytes[i] == b'.'
                && (i + 1 >= bytes.len() || bytes[i + 1] != b'.')
                && (i == 0 || bytes[i - 1] != b'.')
            {
                cut = Some(i);
                break;
            }
        }
        let cut = cut.ok_or_else(|| format!("link section `{body}` needs `link.<from>.<to>`"))?;
        let froms = expand_ids(&rest[..cut])?;
        let tos = expand_ids(&rest[cut + 1..])?;
        let mut pairs = Vec::new();
        for f in &froms {
            for t in &tos {
                pairs.push((f.clone(), t.clone()));
            }
        }
        return Ok(SectionKind::Links(pairs));
    }
    Err(format!("unknown section `[{body}]`"))
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v
        .parse()
        .map_err(|_| ConfigError::new(line, format!("`{key}`: expected a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(ConfigError::new(line, format!("`{key}` must be finite")));
    }
    if x < 0.0 {
        return Err(ConfigError::new(line, format!("`{key}` must be nonnegative, got {x}")));
    }
    Ok(x)
}

fn parse_int(line: usize, key: &str, v: &str) -> Result<i64, ConfigError> {
    let x: i64 = v
        .parse()
        .map_err(|_| ConfigError::new(line, format!("`{key}`: expected an integer, got `{v}`")))?;
    if x < 0 {
        return Err(ConfigError::new(line, format!("`{key}` must be nonnegative, got {x}")));
    }
    Ok(x)
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::new(line, format!("`{key}`: expected true/false, got `{v}`"))),
    }
}

fn parse_dist(line: usize, v: &str) -> Result<Distribution, ConfigError> {
    Distribution::parse(v).map_err(|m| ConfigError::new(line, m))
}

fn apply_node_key(n: &mut NodeSpec, line: usize, key: &str, v: &str) -> Result<(), ConfigError> {
    match key {
        "kind" => {
            n.kind = NodeKind::parse(v)
                .ok_or_else(|| ConfigError::new(line, format!("unknown node kind `{v}`")))?
        }
        "holding_cost" => n.holding_cost = parse_f64(line, key, v)?,
        "capacity" => {
            n.capacity = if v == "inf" { UNBOUNDED } else { parse_int(line, key, v)? };
        }
        "spillage_cost" => n.spillage_cost = parse_f64(line, key, v)?,
        "price" => n.price = parse_f64(line, key, v)?,
        "demand" => n.demand = Some(parse_dist(line, v)?),
        "production" => n.production = Some(parse_dist(line, v)?),
        "infinite_supply" => n.infinite_supply = parse_bool(line, key, v)?,
        "demand_type" => {
            n.demand_type = DemandType::parse(v)
                .ok_or_else(|| ConfigError::new(line, format!("unknown demand_type `{v}`")))?
        }
        "backorder_cost" => n.backorder_cost = parse_f64(line, key, v)?,
        "backlog_cap" => n.backlog_cap = parse_int(line, key, v)?,
        "initial_inventory" => n.initial_inventory = Some(parse_dist(line, v)?),
        _ => return Err(ConfigError::new(line, format!("unknown node key `{key}`"))),
    }
    Ok(())
}

fn apply_link_key(l: &mut LinkSpec, line: usize, key: &str, v: &str) -> Result<(), ConfigError> {
    match key {
        "lead_time" => l.lead_time = parse_int(line, key, v)? as usize,
        "fixed_cost" => l.fixed_cost = parse_f64(line, key, v)?,
        "variable_cost" => l.variable_cost = parse_f64(line, key, v)?,
        "max_order" => l.max_order = parse_int(line, key, v)?,
        "min_order" => l.min_order = parse_int(line, key, v)?,
        _ => return Err(ConfigError::new(line, format!("unknown link key `{key}`"))),
    }
    Ok(())
}

/// Parses a configuration document and validates the resulting network.
pub fn parse_config(text: &str) -> Result<NetworkConfig, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(body) = content.strip_prefix('[') {
            let body = body
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::new(line, "unterminated section header"))?;
            let kind = parse_header(body.trim()).map_err(|m| ConfigError::new(line, m))?;
            sections.push(Section { line, kind, entries: Vec::new() });
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::new(line, format!("expected `key = value`, got `{content}`")))?;
        let key = k.trim().to_string();
        let v = v.trim();
        let value = if let Some(inner) = v.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::new(line, "unterminated list value"))?;
            let items = split_top_level(inner);
            if items.is_empty() || items.iter().any(|s| s.is_empty()) {
                return Err(ConfigError::new(line, format!("empty element in list for `{key}`")));
            }
            Value::List(items)
        } else {
            Value::Scalar(v.to_string())
        };
        let section = sections
            .last_mut()
            .ok_or_else(|| ConfigError::new(line, "key outside of any section"))?;
        section.entries.push((line, key, value));
    }

    let mut cfg = NetworkConfig {
        nodes: Vec::new(),
        links: Vec::new(),
        initial_inventory: Distribution::Const(0.0),
    };
    let mut link_sections: Vec<&Section> = Vec::new();
    for s in &sections {
        match &s.kind {
            SectionKind::Network => {
                for (line, key, value) in &s.entries {
                    match key.as_str() {
                        "initial_inventory" => {
                            cfg.initial_inventory = parse_dist(*line, value.pick(0))?
                        }
                        _ => {
                            return Err(ConfigError::new(*line, format!("unknown network key `{key}`")))
                        }
                    }
                }
            }
            SectionKind::Nodes(ids) => {
                for (i, id) in ids.iter().enumerate() {
                    if cfg.node_index(id).is_some() {
                        return Err(ConfigError::new(s.line, format!("duplicate node `{id}`")));
                    }
                    let mut node = NodeSpec::new(id.clone(), NodeKind::Warehouse);
                    let mut has_kind = false;
                    for (line, key, value) in &s.entries {
                        has_kind |= key == "kind";
                        apply_node_key(&mut node, *line, key, value.pick(i))?;
                    }
                    if !has_kind {
                        return Err(ConfigError::new(s.line, format!("node `{id}` is missing `kind`")));
                    }
                    if node.infinite_supply && node.capacity != UNBOUNDED {
                        // capacity is meaningless for an unlimited source
                        node.capacity = UNBOUNDED;
                    }
                    validate_node(&node).map_err(|m| ConfigError::new(s.line, m))?;
                    cfg.nodes.push(node);
                }
            }
            SectionKind::Links(_) => link_sections.push(s),
        }
    }
    if cfg.nodes.is_empty() {
        return Err(ConfigError::new(0, "no nodes declared"));
    }
    for s in link_sections {
        let SectionKind::Links(pairs) = &s.kind else { unreachable!() };
        for (i, (from, to)) in pairs.iter().enumerate() {
            let mut link = LinkSpec::new(from.clone(), to.clone(), 0, 0);
            let mut seen = HashSet::new();
            for (line, key, value) in &s.entries {
                seen.insert(key.as_str());
                apply_link_key(&mut link, *line, key, value.pick(i))?;
            }
            for required in ["lead_time", "max_order"] {
                if !seen.contains(required) {
                    return Err(ConfigError::new(
                        s.line,
                        format!("link `{}` is missing `{required}`", link.name()),
                    ));
                }
            }
            validate_link(&link, &cfg).map_err(|m| ConfigError::new(s.line, m))?;
            if cfg.links.iter().any(|l| l.from == link.from && l.to == link.to) {
                return Err(ConfigError::new(s.line, format!("duplicate link `{}`", link.name())));
            }
            cfg.links.push(link);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_S_THREE_R: &str = "
[network]
initial_inventory = uniform(0,4)

[node.S]
kind = supplier
production = const(10)
capacity = 100
spillage_cost = 10

[node.R1..R3]
kind = retailer
demand = normal(2,10)
price = 50
holding_cost = [1,2,4]
capacity = 50
spillage_cost = 10

[link.S.R1..R3]
lead_time = [1,2,3]
fixed_cost = 50
max_order = 50
";

    #[test]
    fn lead_times_cycle_over_links() {
        let cfg = parse_config(ONE_S_THREE_R).unwrap();
        assert_eq!(cfg.links.len(), 3);
        let leads: Vec<usize> = cfg.links.iter().map(|l| l.lead_time).collect();
        assert_eq!(leads, vec![1, 2, 3]);
        let h: Vec<f64> = cfg.nodes[1..].iter().map(|n| n.holding_cost).collect();
        assert_eq!(h, vec![1.0, 2.0, 4.0]);
    }

    #[test]
    fn ten_retailers_repeat_the_lead_time_list() {
        let doc = ONE_S_THREE_R.replace("R1..R3", "R1..R10");
        let cfg = parse_config(&doc).unwrap();
        let leads: Vec<usize> = cfg.links.iter().map(|l| l.lead_time).collect();
        assert_eq!(leads, vec![1, 2, 3, 1, 2, 3, 1, 2, 3, 1]);
        assert_eq!(cfg.nodes[10].id, "R10");
        assert_eq!(cfg.nodes[10].holding_cost, 1.0);
    }

    #[test]
    fn empty_document_has_no_nodes() {
        let err = parse_config("").unwrap_err();
        assert!(err.message.contains("no nodes declared"));
        let err = parse_config("# only a comment\n\n").unwrap_err();
        assert!(err.message.contains("no nodes declared"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let doc = ONE_S_THREE_R.replace("fixed_cost = 50", "fixed_costs = 50");
        let err = parse_config(&doc).unwrap_err();
        assert!(err.message.contains("unknown link key"), "{err}");
        assert_eq!(err.line, 21);

        let doc = ONE_S_THREE_R.replace("spillage_cost = 10\n\n[node.R1", "spillage_cost = -10\n\n[node.R1");
        let err = parse_config(&doc).unwrap_err();
        assert!(err.message.contains("nonnegative"), "{err}");
        assert_eq!(err.line, 9);

        let doc = ONE_S_THREE_R.replace("[link.S.R1..R3]", "[link.S.R1..R4]");
        let err = parse_config(&doc).unwrap_err();
        assert!(err.message.contains("undeclared node `R4`"), "{err}");
        assert_eq!(err.line, 19);

        let doc = ONE_S_THREE_R.replace("demand = normal(2,10)\n", "");
        let err = parse_config(&doc).unwrap_err();
        assert!(err.message.contains("missing `demand`"), "{err}");
    }

    #[test]
    fn rejects_self_links_and_unreachable_retailers() {
        let doc = "[node.S]\nkind = supplier\nproduction = const(1)\ncapacity = 5\n\
                   [node.R]\nkind = retailer\ndemand = const(1)\ncapacity = 5\n\
                   [link.S.S]\nlead_time = 0\nmax_order = 1\n";
        assert!(parse_config(doc).unwrap_err().message.contains("self-link"));
        let doc = "[node.S]\nkind = supplier\nproduction = const(1)\ncapacity = 5\n\
                   [node.R]\nkind = retailer\ndemand = const(1)\ncapacity = 5\n";
        assert!(parse_config(doc).unwrap_err().message.contains("not reachable"));
    }

    #[test]
    fn document_round_trip() {
        let cfg = parse_config(ONE_S_THREE_R).unwrap();
        let again = parse_config(&cfg.to_document()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn cartesian_link_sections() {
        let doc = "
[node.S]
kind = supplier
infinite_supply = true
[node.W1..W2]
kind = warehouse
capacity = 150
[node.R1..R2]
kind = retailer
demand = normal(2,10)
capacity = 50
[link.S.W1..W2]
lead_time = 2
max_order = 50
[link.W1..W2.R1..R2]
lead_time = [1,5,2,6]
max_order = 50
";
        let cfg = parse_config(doc).unwrap();
        let names: Vec<String> = cfg.links.iter().map(|l| format!("{}{}", l.name(), l.lead_time)).collect();
        assert_eq!(names, ["S->W12", "S->W22", "W1->R11", "W1->R25", "W2->R12", "W2->R26"]);
        assert!(cfg.nodes[0].infinite_supply);
    }
}
