//! The domain-definition language.
//!
//! A domain file declares parameter spaces, condition schemas, action schemas
//! with probabilistic outcomes, node templates, an initial assignment and a
//! goal. [`parse_domain`] turns text into a validated [`DomainSpec`];
//! [`ground`] expands the schemas over their parameter spaces.
//!
//! ```text
//! param place { table1 table2 }
//! condition at(place) values { S F }
//! action goto(place) {
//!     pre { }
//!     outcome 0.95 -> S { at(place) = S }
//!     outcome 0.05 -> F { }
//! }
//! ```

mod ground;
mod parse;
mod write;

pub use ground::{
    ground, ActionId, GroundedDomain, GroundedLiteral, GroundedTemplate, LiteralId, TemplateId,
};
pub use parse::{parse_domain, ParseError};
pub use write::write_domain;

use crate::tree::Control;
use crate::Status;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DomainSpec {
    pub params: Vec<ParamSpace>,
    pub conditions: Vec<ConditionSchema>,
    pub actions: Vec<ActionSchema>,
    pub templates: Vec<TemplateSchema>,
    pub initial: Option<Vec<Assignment>>,
    pub goal: Option<GoalSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpace {
    pub name: String,
    pub instances: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSchema {
    pub name: String,
    /// Parameter-space names, one per argument position.
    pub params: Vec<String>,
    pub values: Vec<Status>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<String>,
    pub pre: Vec<Assignment>,
    pub outcomes: Vec<OutcomeSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSpec {
    pub probability: f64,
    /// Status the action latches when this outcome is realized. When absent,
    /// `S` if some postcondition assigns `S`, else `F`.
    pub report: Option<Status>,
    pub post: Vec<Assignment>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateSchema {
    pub name: String,
    pub params: Vec<String>,
    pub pre: Vec<Assignment>,
    /// Advisory outcomes used only for resolver selection.
    pub declared: Vec<DeclaredOutcome>,
    pub body: BtExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeclaredOutcome {
    pub probability: f64,
    pub post: Vec<Assignment>,
}

/// `name(args) = value`. Arguments are parameter names of the enclosing
/// schema or instances of the matching parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub name: String,
    pub args: Vec<String>,
    pub value: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoalSpec {
    pub literals: Vec<Assignment>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BtExpr {
    Control(Control, Vec<BtExpr>),
    Act { name: String, args: Vec<String> },
    Cond { name: String, args: Vec<String> },
    Tmpl { name: String, args: Vec<String> },
}

impl DomainSpec {
    pub fn param(&self, name: &str) -> Option<&ParamSpace> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionSchema> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn template(&self, name: &str) -> Option<&TemplateSchema> {
        self.templates.iter().find(|t| t.name == name)
    }
}

/// Grounded name of a schema applied to instances, e.g. `at(table1)`.
pub fn instance_name(name: &str, args: &[String]) -> String {
    if args.is_empty() {
        name.to_string()
    } else {
        format!("{}({})", name, args.join(", "))
    }
}

/// The bundled "look for soda" domain with deterministic navigation.
pub const SODA_DOMAIN: &str = include_str!("../../domains/soda.bbt");

/// The same domain with navigation succeeding with probability 0.95.
pub const SODA_STOCHASTIC_DOMAIN: &str = include_str!("../../domains/soda_stochastic.bbt");
