use std::collections::{BTreeMap, HashMap};
use std::fmt;

use log::warn;
use serde::{Deserialize, Serialize};

use super::{instance_name, Assignment, BtExpr, DomainSpec};
use crate::belief::{ActionInstance, Outcome};
use crate::tree::{IdAllocator, Node};
use crate::{Error, Result, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LiteralId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActionId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TemplateId(pub u32);

impl fmt::Display for LiteralId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundedLiteral {
    pub name: String,
    pub schema: String,
    pub args: Vec<String>,
    pub values: Vec<Status>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundedTemplate {
    pub id: TemplateId,
    pub name: String,
    pub schema: String,
    pub bindings: BTreeMap<String, String>,
    pub pre: Vec<(LiteralId, Status)>,
    pub declared: Vec<Outcome>,
}

/// Literal-level view of a domain. Immutable once built.
#[derive(Debug, Clone)]
pub struct GroundedDomain {
    spec: DomainSpec,
    literals: Vec<GroundedLiteral>,
    literal_index: HashMap<String, LiteralId>,
    actions: Vec<ActionInstance>,
    action_index: HashMap<String, ActionId>,
    templates: Vec<GroundedTemplate>,
    initial: Vec<Status>,
    warnings: Vec<String>,
}

/// All argument tuples over the given spaces, last position varying fastest.
fn product(spaces: &[&[String]]) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for space in spaces {
        let mut next = Vec::with_capacity(out.len() * space.len());
        for prefix in &out {
            for inst in space.iter() {
                let mut row = prefix.clone();
                row.push(inst.clone());
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// Expands every schema over its parameter spaces. Expects a validated spec.
pub fn ground(spec: &DomainSpec) -> Result<GroundedDomain> {
    let mut warnings = Vec::new();
    let spaces_of = |params: &[String], owner: &str, warnings: &mut Vec<String>| -> Vec<Vec<String>> {
        let spaces: Vec<&[String]> = params
            .iter()
            .map(|p| spec.param(p).map(|s| s.instances.as_slice()).unwrap_or(&[]))
            .collect();
        if spaces.iter().any(|s| s.is_empty()) {
            let msg = format!("`{owner}` uses an empty parameter space and has no instances");
            warn!("{msg}");
            warnings.push(msg);
        }
        product(&spaces)
    };

    let mut literals = Vec::new();
    let mut literal_index = HashMap::new();
    for c in &spec.conditions {
        for args in spaces_of(&c.params, &c.name, &mut warnings) {
            let name = instance_name(&c.name, &args);
            literal_index.insert(name.clone(), LiteralId(literals.len() as u32));
            literals.push(GroundedLiteral {
                name,
                schema: c.name.clone(),
                args,
                values: c.values.clone(),
            });
        }
    }

    let mut domain = GroundedDomain {
        spec: spec.clone(),
        literals,
        literal_index,
        actions: Vec::new(),
        action_index: HashMap::new(),
        templates: Vec::new(),
        initial: Vec::new(),
        warnings: Vec::new(),
    };

    for a in &spec.actions {
        for args in spaces_of(&a.params, &a.name, &mut warnings) {
            let bindings: BTreeMap<String, String> =
                a.params.iter().cloned().zip(args.iter().cloned()).collect();
            let pre = domain.ground_set(&a.pre, &bindings)?;
            let mut outcomes = Vec::new();
            for o in &a.outcomes {
                let post = domain.ground_set(&o.post, &bindings)?;
                let report = o.report.unwrap_or(if post.iter().any(|(_, v)| *v == Status::Success) {
                    Status::Success
                } else {
                    Status::Failure
                });
                outcomes.push(Outcome {
                    probability: o.probability,
                    post,
                    report,
                });
            }
            let id = ActionId(domain.actions.len() as u32);
            let name = instance_name(&a.name, &args);
            domain.action_index.insert(name.clone(), id);
            domain.actions.push(ActionInstance {
                id,
                name,
                pre,
                outcomes,
            });
        }
    }

    for t in &spec.templates {
        for args in spaces_of(&t.params, &t.name, &mut warnings) {
            let bindings: BTreeMap<String, String> =
                t.params.iter().cloned().zip(args.iter().cloned()).collect();
            let pre = domain.ground_set(&t.pre, &bindings)?;
            let mut declared = Vec::new();
            for d in &t.declared {
                let post = domain.ground_set(&d.post, &bindings)?;
                declared.push(Outcome {
                    probability: d.probability,
                    post,
                    report: Status::Success,
                });
            }
            domain.templates.push(GroundedTemplate {
                id: TemplateId(domain.templates.len() as u32),
                name: instance_name(&t.name, &args),
                schema: t.name.clone(),
                bindings,
                pre,
                declared,
            });
        }
    }

    // Literals missing from `initial` start unknown when they may be, false otherwise.
    domain.initial = domain
        .literals
        .iter()
        .map(|l| {
            if l.values.contains(&Status::Running) {
                Status::Running
            } else {
                Status::Failure
            }
        })
        .collect();
    if let Some(initial) = &spec.initial {
        for (lit, value) in domain.ground_set(initial, &BTreeMap::new())? {
            domain.initial[lit.0 as usize] = value;
        }
    }
    domain.warnings = warnings;
    Ok(domain)
}

impl GroundedDomain {
    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn literals(&self) -> &[GroundedLiteral] {
        &self.literals
    }

    pub fn literal(&self, id: LiteralId) -> Option<&GroundedLiteral> {
        self.literals.get(id.0 as usize)
    }

    pub fn literal_name(&self, id: LiteralId) -> String {
        self.literal(id)
            .map(|l| l.name.clone())
            .unwrap_or_else(|| id.to_string())
    }

    pub fn literal_id(&self, name: &str) -> Result<LiteralId> {
        self.literal_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownLiteral(name.to_string()))
    }

    pub fn actions(&self) -> &[ActionInstance] {
        &self.actions
    }

    pub fn action(&self, id: ActionId) -> Result<&ActionInstance> {
        self.actions
            .get(id.0 as usize)
            .ok_or_else(|| Error::UnknownAction(format!("#{}", id.0)))
    }

    pub fn action_id(&self, name: &str) -> Result<ActionId> {
        self.action_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownAction(name.to_string()))
    }

    pub fn templates(&self) -> &[GroundedTemplate] {
        &self.templates
    }

    pub fn template(&self, id: TemplateId) -> &GroundedTemplate {
        &self.templates[id.0 as usize]
    }

    /// Initial assignment, one value per literal.
    pub fn initial(&self) -> &[Status] {
        &self.initial
    }

    /// Goal literals (all required `S`) and target probability, if declared.
    pub fn goal(&self) -> Result<Option<(Vec<LiteralId>, f64)>> {
        let Some(goal) = &self.spec.goal else {
            return Ok(None);
        };
        let lits = self
            .ground_set(&goal.literals, &BTreeMap::new())?
            .into_iter()
            .map(|(l, _)| l)
            .collect();
        Ok(Some((lits, goal.probability)))
    }

    /// Warnings raised while grounding, e.g. schemas with no instances.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    fn ground_args(&self, args: &[String], bindings: &BTreeMap<String, String>) -> Vec<String> {
        args.iter()
            .map(|a| bindings.get(a).cloned().unwrap_or_else(|| a.clone()))
            .collect()
    }

    fn ground_set(
        &self,
        set: &[Assignment],
        bindings: &BTreeMap<String, String>,
    ) -> Result<Vec<(LiteralId, Status)>> {
        set.iter()
            .map(|a| {
                let name = instance_name(&a.name, &self.ground_args(&a.args, bindings));
                Ok((self.literal_id(&name)?, a.value))
            })
            .collect()
    }

    /// Instantiates a grounded template into a fresh subtree.
    pub fn instantiate(&self, id: TemplateId, ids: &mut IdAllocator) -> Result<Node> {
        let t = self.template(id);
        self.instantiate_template(&t.schema, &t.bindings, ids)
    }

    /// Instantiates template `name` with explicit parameter bindings. Every
    /// call yields new node ids and fresh latches.
    pub fn instantiate_template(
        &self,
        name: &str,
        bindings: &BTreeMap<String, String>,
        ids: &mut IdAllocator,
    ) -> Result<Node> {
        let schema = self
            .spec
            .template(name)
            .ok_or_else(|| Error::InvalidRequest(format!("unknown template `{name}`")))?;
        for p in &schema.params {
            let Some(inst) = bindings.get(p) else {
                return Err(Error::UnboundParameter {
                    template: name.to_string(),
                    parameter: p.clone(),
                });
            };
            let space = self.spec.param(p).map(|s| &s.instances);
            if !space.is_some_and(|s| s.contains(inst)) {
                return Err(Error::InvalidRequest(format!(
                    "`{inst}` is not an instance of `{p}`"
                )));
            }
        }
        self.build_body(&schema.body, bindings, ids)
    }

    fn build_body(
        &self,
        expr: &BtExpr,
        bindings: &BTreeMap<String, String>,
        ids: &mut IdAllocator,
    ) -> Result<Node> {
        Ok(match expr {
            BtExpr::Control(control, children) => {
                let id = ids.next_id();
                let children = children
                    .iter()
                    .map(|c| self.build_body(c, bindings, ids))
                    .collect::<Result<Vec<_>>>()?;
                Node::control(id, *control, children)
            }
            BtExpr::Act { name, args } => {
                let action = self.action_id(&instance_name(name, &self.ground_args(args, bindings)))?;
                Node::action(ids.next_id(), action)
            }
            BtExpr::Cond { name, args } => {
                let lit = self.literal_id(&instance_name(name, &self.ground_args(args, bindings)))?;
                Node::condition(ids.next_id(), lit)
            }
            BtExpr::Tmpl { name, args } => {
                let schema = self
                    .spec
                    .template(name)
                    .ok_or_else(|| Error::InvalidRequest(format!("unknown template `{name}`")))?;
                let inner: BTreeMap<String, String> = schema
                    .params
                    .iter()
                    .cloned()
                    .zip(self.ground_args(args, bindings))
                    .collect();
                self.instantiate_template(name, &inner, ids)?
            }
        })
    }
}
