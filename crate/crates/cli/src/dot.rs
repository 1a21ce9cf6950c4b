//! Graphviz output.

use std::collections::BTreeMap;
use std::fmt::Write;

use ontomerge::{ClosureResult, Ontology, Poset};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn display<'a>(label: &'a Option<String>, tag: &'a Option<String>, id: &'a str) -> &'a str {
    label.as_deref().or(tag.as_deref()).unwrap_or(id)
}

/// An ontology as a digraph. Nodes and edges show label, else tag, else id.
pub fn ontology_dot(name: &str, o: &Ontology) -> String {
    let mut s = String::new();
    writeln!(s, "digraph {} {{", quote(name)).unwrap();
    for c in o.concepts() {
        writeln!(s, "  {} [label={}];", quote(&c.id), quote(display(&c.label, &c.tag, &c.id))).unwrap();
    }
    for (i, r) in o.relations().iter().enumerate() {
        let (src, dst) = (&o.concept(o.src(i)).id, &o.concept(o.dst(i)).id);
        writeln!(s, "  {} -> {} [label={}];", quote(src), quote(dst), quote(display(&r.label, &r.tag, &r.id))).unwrap();
    }
    s.push_str("}\n");
    s
}

/// Hasse diagram of the closure poset, one node per hom-equivalence class,
/// ranked by the least layer in the class. Edges point upwards.
pub fn hasse_dot(closure: &ClosureResult, poset: &Poset) -> String {
    let mut s = String::from("digraph hasse {\n  rankdir=BT;\n");
    let mut ranks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (c, members) in poset.classes().iter().enumerate() {
        let label = members.iter().map(|&m| closure.member(m).display_name()).collect::<Vec<_>>().join(" ≡ ");
        let layer = members.iter().map(|&m| poset.layer(m)).min().unwrap_or(0);
        ranks.entry(layer).or_default().push(c);
        writeln!(s, "  c{c} [label={}];", quote(&label)).unwrap();
    }
    for (layer, classes) in &ranks {
        let nodes = classes.iter().map(|c| format!("c{c}")).collect::<Vec<_>>().join("; ");
        writeln!(s, "  {{ rank=same; {nodes}; }} // layer {layer}").unwrap();
    }
    for &(a, b) in poset.hasse() {
        writeln!(s, "  c{a} -> c{b};").unwrap();
    }
    s.push_str("}\n");
    s
}
