use std::fmt::Write;

use super::{Assignment, BtExpr, DomainSpec};

/// Renders a spec in the canonical text form accepted by [`super::parse_domain`].
pub fn write_domain(spec: &DomainSpec) -> String {
    let mut out = String::new();
    for p in &spec.params {
        let _ = writeln!(out, "param {} {{ {} }}", p.name, spaced(&p.instances));
    }
    if !spec.params.is_empty() {
        out.push('\n');
    }
    for c in &spec.conditions {
        let values: Vec<String> = c.values.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(
            out,
            "condition {}{} values {{ {} }}",
            c.name,
            signature(&c.params),
            values.join(" ")
        );
    }
    for a in &spec.actions {
        let _ = writeln!(out, "\naction {}{} {{", a.name, signature(&a.params));
        let _ = writeln!(out, "    pre {}", asgnset(&a.pre));
        for o in &a.outcomes {
            let report = o.report.map(|r| format!(" -> {r}")).unwrap_or_default();
            let _ = writeln!(out, "    outcome {}{} {}", o.probability, report, asgnset(&o.post));
        }
        out.push_str("}\n");
    }
    for t in &spec.templates {
        let _ = writeln!(out, "\ntemplate {}{} {{", t.name, signature(&t.params));
        let _ = writeln!(out, "    pre {}", asgnset(&t.pre));
        for d in &t.declared {
            let _ = writeln!(out, "    declared {} {}", d.probability, asgnset(&d.post));
        }
        let _ = writeln!(out, "    body {}", btexpr(&t.body));
        out.push_str("}\n");
    }
    if let Some(initial) = &spec.initial {
        let _ = writeln!(out, "\ninitial {}", asgnset(initial));
    }
    if let Some(goal) = &spec.goal {
        let _ = writeln!(out, "\ngoal {} prob {}", asgnset(&goal.literals), goal.probability);
    }
    out
}

fn spaced(names: &[String]) -> String {
    names.join(" ")
}

fn signature(params: &[String]) -> String {
    if params.is_empty() {
        String::new()
    } else {
        format!("({})", params.join(", "))
    }
}

fn asgnset(set: &[Assignment]) -> String {
    if set.is_empty() {
        return "{ }".into();
    }
    let items: Vec<String> = set
        .iter()
        .map(|a| format!("{}{} = {}", a.name, signature(&a.args), a.value))
        .collect();
    format!("{{ {} }}", items.join("; "))
}

fn btexpr(e: &BtExpr) -> String {
    match e {
        BtExpr::Control(control, children) => {
            let kw = match control {
                crate::tree::Control::Sequence => "seq",
                crate::tree::Control::Fallback => "fb",
                crate::tree::Control::Skipper => "skip",
            };
            let inner: Vec<String> = children.iter().map(btexpr).collect();
            format!("{kw} {{ {} }}", inner.join(" "))
        }
        BtExpr::Act { name, args } => format!("act {name}{}", signature(args)),
        BtExpr::Cond { name, args } => format!("cond {name}{}", signature(args)),
        BtExpr::Tmpl { name, args } => format!("tmpl {name}{}", signature(args)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{parse_domain, SODA_DOMAIN, SODA_STOCHASTIC_DOMAIN};

    #[test]
    fn bundled_domains_round_trip() {
        for text in [SODA_DOMAIN, SODA_STOCHASTIC_DOMAIN] {
            let spec = parse_domain(text).unwrap();
            let written = write_domain(&spec);
            let reparsed = parse_domain(&written).unwrap();
            assert_eq!(reparsed, spec);
            assert_eq!(write_domain(&reparsed), written);
        }
    }
}
