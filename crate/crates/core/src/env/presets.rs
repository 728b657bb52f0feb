//! The benchmark networks, written as configuration documents.

use std::fmt;
use std::str::FromStr;

use super::config::parse_config;
use super::network::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    OneSThreeRHigh,
    OneSThreeR,
    OneSTenR,
    OneSTwentyR,
    OneSTwoWThreeR,
    DualSourcing,
    InfTwoWThreeR,
    /// Single backorder retailer behind an unlimited supplier.
    InfOneR,
    /// Small lost-sales network used for quick end-to-end runs.
    Smoke,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scale {
    #[default]
    Desk,
    Paper,
}

impl Preset {
    pub const ALL: [Preset; 9] = [
        Preset::OneSThreeRHigh,
        Preset::OneSThreeR,
        Preset::OneSTenR,
        Preset::OneSTwentyR,
        Preset::OneSTwoWThreeR,
        Preset::DualSourcing,
        Preset::InfTwoWThreeR,
        Preset::InfOneR,
        Preset::Smoke,
    ];

    /// The seven multi-node benchmark networks.
    pub const TABLE: [Preset; 7] = [
        Preset::OneSThreeRHigh,
        Preset::OneSThreeR,
        Preset::OneSTenR,
        Preset::OneSTwentyR,
        Preset::OneSTwoWThreeR,
        Preset::DualSourcing,
        Preset::InfTwoWThreeR,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::OneSThreeRHigh => "1s-3r-high",
            Preset::OneSThreeR => "1s-3r",
            Preset::OneSTenR => "1s-10r",
            Preset::OneSTwentyR => "1s-20r",
            Preset::OneSTwoWThreeR => "1s-2w-3r",
            Preset::DualSourcing => "1s-2w-3r-ds",
            Preset::InfTwoWThreeR => "1sinf-2w-3r",
            Preset::InfOneR => "1sinf-1r",
            Preset::Smoke => "smoke",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                format!("unknown environment `{s}`; expected one of {}", names.join(", "))
            })
    }
}

impl FromStr for Scale {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            _ => Err(format!("unknown preset scale `{s}`; expected desk or paper")),
        }
    }
}

fn retailers(count: usize, holding: &str) -> String {
    format!(
        "[node.R1..R{count}]
kind = retailer
demand = normal(2,10)
price = 50
holding_cost = {holding}
capacity = 50
spillage_cost = 10

"
    )
}

fn supplier(production: u32, capacity: u32) -> String {
    format!(
        "[node.S]
kind = supplier
production = const({production})
capacity = {capacity}
spillage_cost = 10

"
    )
}

fn two_echelon(production: u32, capacity: u32, count: usize, holding: &str, max_order: i64) -> String {
    format!(
        "[network]\ninitial_inventory = uniform(0,4)\n\n{}{}[link.S.R1..R{count}]
lead_time = [1,2,3]
fixed_cost = 50
max_order = {max_order}
",
        supplier(production, capacity),
        retailers(count, holding)
    )
}

fn warehouses(holding: &str) -> String {
    format!(
        "[node.W1..W2]
kind = warehouse
holding_cost = {holding}
capacity = 150
spillage_cost = 10

"
    )
}

/// Configuration document for a preset.
pub fn preset_document(p: Preset, scale: Scale) -> String {
    let cap = match scale {
        Scale::Desk => 10,
        Scale::Paper => 50,
    };
    match p {
        Preset::OneSThreeRHigh => two_echelon(15, 100, 3, "[1,2,4]", cap),
        Preset::OneSThreeR => two_echelon(10, 100, 3, "[1,2,4]", cap),
        Preset::OneSTenR => two_echelon(25, 150, 10, "[1,2,4,8]", cap),
        Preset::OneSTwentyR => two_echelon(40, 300, 20, "[1,2,4,8]", cap),
        Preset::OneSTwoWThreeR => format!(
            "[network]\ninitial_inventory = uniform(0,4)\n\n{}{}{}[link.S.W1..W2]
lead_time = 2
fixed_cost = 0
max_order = {cap}

[link.W1.R1..R2]
lead_time = [1,2]
fixed_cost = 50
max_order = {cap}

[link.W2.R3]
lead_time = 3
fixed_cost = 50
max_order = {cap}
",
            supplier(10, 100),
            warehouses("0.5"),
            retailers(3, "[1,2,4]")
        ),
        Preset::DualSourcing => format!(
            "[network]\ninitial_inventory = uniform(0,4)\n\n{}{}{}[link.S.W1..W2]
lead_time = 2
fixed_cost = 0
max_order = {cap}

[link.W1.R1..R3]
lead_time = [1,2,3]
fixed_cost = 50
max_order = {cap}

[link.W2.R1..R3]
lead_time = [5,6,7]
fixed_cost = 50
max_order = {cap}
",
            supplier(10, 100),
            warehouses("[0.5,0.1]"),
            retailers(3, "[1,2,4]")
        ),
        Preset::InfTwoWThreeR => format!(
            "[network]\ninitial_inventory = uniform(0,4)\n\n[node.S]
kind = supplier
infinite_supply = true

{}{}[link.S.W1..W2]
lead_time = 2
fixed_cost = 0
variable_cost = 20
max_order = {cap}

[link.W1.R1..R2]
lead_time = [1,2]
fixed_cost = 50
max_order = {cap}

[link.W2.R3]
lead_time = 3
fixed_cost = 50
max_order = {cap}
",
            warehouses("0.5"),
            retailers(3, "[1,2,4]")
        ),
        Preset::InfOneR => format!(
            "[network]\ninitial_inventory = uniform(0,4)

[node.S]
kind = supplier
infinite_supply = true

[node.R1]
kind = retailer
demand = normal(5,0.8)
demand_type = backorder
backorder_cost = 7
backlog_cap = 100
holding_cost = 0.8
capacity = 100
spillage_cost = 0

[link.S.R1]
lead_time = 4
max_order = {}
",
            match scale {
                Scale::Desk => 20,
                Scale::Paper => 50,
            }
        ),
        Preset::Smoke => "[network]
initial_inventory = uniform(0,4)

[node.S]
kind = supplier
production = const(5)
capacity = 50
spillage_cost = 10

[node.R1]
kind = retailer
demand = normal(2,10)
price = 50
holding_cost = 1
capacity = 50
spillage_cost = 10

[link.S.R1]
lead_time = 1
fixed_cost = 50
max_order = 10
"
        .to_string(),
    }
}

pub fn preset(p: Preset, scale: Scale) -> Network {
    let cfg = parse_config(&preset_document(p, scale)).expect("preset documents are valid");
    Network::new(cfg).expect("preset documents are valid")
}
