//! Renderings of terms: an indented text tree and Graphviz DOT.
//!
//! The DOT output draws every tape as a cluster. Thick edges carry whole
//! monomials between tapes (the ⊕ layer); thin edges inside a tape carry
//! single sorts between generator nodes (the ⊗ layer). A trace is a cluster
//! around its body with a dashed feedback edge.

use std::fmt::Write;

use kctape::{Circuit, CircuitKind, Tape, TapeKind, Term};

// ---------------------------------------------------------------------------
// text

pub fn text(term: &Term) -> String {
    let mut out = String::new();
    match term {
        Term::Circuit(c) => text_circuit(&mut out, c, 0),
        Term::Tape(t) => text_tape(&mut out, t, 0),
    }
    out
}

fn line(out: &mut String, depth: usize, label: &str, ty: String) {
    writeln!(out, "{:indent$}{label} : {ty}", "", indent = 2 * depth).unwrap();
}

fn text_circuit(out: &mut String, c: &Circuit, depth: usize) {
    let ty = format!("{} → {}", c.dom(), c.cod());
    match c.kind() {
        CircuitKind::Seq(a, b) | CircuitKind::Tensor(a, b) => {
            line(out, depth, if matches!(c.kind(), CircuitKind::Seq(..)) { ";" } else { "⊗" }, ty);
            text_circuit(out, a, depth + 1);
            text_circuit(out, b, depth + 1);
        }
        _ => line(out, depth, &circuit_label(c), ty),
    }
}

fn text_tape(out: &mut String, t: &Tape, depth: usize) {
    let ty = format!("{} → {}", t.dom(), t.cod());
    match t.kind() {
        TapeKind::Embed(c) => {
            line(out, depth, "tape", ty);
            text_circuit(out, c, depth + 1);
        }
        TapeKind::Seq(a, b) | TapeKind::Sum(a, b) => {
            line(out, depth, if matches!(t.kind(), TapeKind::Seq(..)) { ";" } else { "⊕" }, ty);
            text_tape(out, a, depth + 1);
            text_tape(out, b, depth + 1);
        }
        TapeKind::Trace(u, body) => {
            line(out, depth, &format!("trace {u}"), ty);
            text_tape(out, body, depth + 1);
        }
        _ => line(out, depth, &tape_label(t), ty),
    }
}

fn circuit_label(c: &Circuit) -> String {
    match c.kind() {
        CircuitKind::IdSort(a) => format!("id {a}"),
        CircuitKind::IdUnit => "id 1".into(),
        CircuitKind::Generator(g) => g.clone(),
        CircuitKind::Symmetry(a, b) => format!("σ {a} {b}"),
        CircuitKind::Discharger(a) => format!("! {a}"),
        CircuitKind::Copier(a) => format!("copy {a}"),
        CircuitKind::Codischarger(a) => format!("¡ {a}"),
        CircuitKind::Cocopier(a) => format!("cocopy {a}"),
        CircuitKind::Seq(..) => ";".into(),
        CircuitKind::Tensor(..) => "⊗".into(),
    }
}

fn tape_label(t: &Tape) -> String {
    match t.kind() {
        TapeKind::IdMonomial(u) => format!("id {u}"),
        TapeKind::IdZero => "id 0".into(),
        TapeKind::SymmetryPlus(u, v) => format!("σ⊕ {u} {v}"),
        TapeKind::Bang(u) => format!("bang {u}"),
        TapeKind::Diag(u) => format!("diag {u}"),
        TapeKind::Cobang(u) => format!("cobang {u}"),
        TapeKind::Codiag(u) => format!("codiag {u}"),
        TapeKind::Embed(_) => "tape".into(),
        TapeKind::Seq(..) => ";".into(),
        TapeKind::Sum(..) => "⊕".into(),
        TapeKind::Trace(u, _) => format!("trace {u}"),
    }
}

// ---------------------------------------------------------------------------
// dot

/// Builds the graph bottom-up. Every sub-diagram returns its dangling input
/// and output ends (node names), in wire order; composition joins them.
struct Dot {
    body: String,
    nodes: usize,
    clusters: usize,
    depth: usize,
}

type Ends = (Vec<String>, Vec<String>);

impl Dot {
    fn indent(&self) -> String {
        "  ".repeat(self.depth + 1)
    }

    fn node(&mut self, label: &str, shape: &str) -> String {
        let id = format!("n{}", self.nodes);
        self.nodes += 1;
        let ind = self.indent();
        writeln!(self.body, "{ind}{id} [label={label:?}, shape={shape}];").unwrap();
        id
    }

    fn point(&mut self) -> String {
        let id = format!("n{}", self.nodes);
        self.nodes += 1;
        let ind = self.indent();
        writeln!(self.body, "{ind}{id} [shape=point];").unwrap();
        id
    }

    fn edge(&mut self, from: &str, to: &str, label: &str, attrs: &str) {
        let ind = self.indent();
        writeln!(self.body, "{ind}{from} -> {to} [label={label:?}{attrs}];").unwrap();
    }

    fn open(&mut self, label: &str, style: &str) {
        let ind = self.indent();
        writeln!(self.body, "{ind}subgraph cluster_{} {{", self.clusters).unwrap();
        writeln!(self.body, "{ind}  label={label:?}; style={style};").unwrap();
        self.clusters += 1;
        self.depth += 1;
    }

    fn close(&mut self) {
        self.depth -= 1;
        let ind = self.indent();
        writeln!(self.body, "{ind}}}").unwrap();
    }

    fn circuit(&mut self, c: &Circuit) -> Ends {
        let wires = |n: &str, k: usize| vec![n.to_string(); k];
        match c.kind() {
            CircuitKind::IdUnit => (vec![], vec![]),
            CircuitKind::IdSort(_) => {
                let p = self.point();
                (vec![p.clone()], vec![p])
            }
            CircuitKind::Symmetry(..) => {
                let (a, b) = (self.point(), self.point());
                (vec![a.clone(), b.clone()], vec![b, a])
            }
            CircuitKind::Generator(g) => {
                let n = self.node(g, "box");
                (wires(&n, c.dom().len()), wires(&n, c.cod().len()))
            }
            CircuitKind::Discharger(_) => (vec![self.node("!", "circle")], vec![]),
            CircuitKind::Codischarger(_) => (vec![], vec![self.node("¡", "circle")]),
            CircuitKind::Copier(_) => {
                let n = self.node("copy", "circle");
                (vec![n.clone()], wires(&n, 2))
            }
            CircuitKind::Cocopier(_) => {
                let n = self.node("cocopy", "circle");
                (wires(&n, 2), vec![n])
            }
            CircuitKind::Seq(a, b) => {
                let (ia, oa) = self.circuit(a);
                let (ib, ob) = self.circuit(b);
                for ((from, to), s) in oa.iter().zip(&ib).zip(a.cod().factors()) {
                    self.edge(from, to, s.name(), "");
                }
                (ia, ob)
            }
            CircuitKind::Tensor(a, b) => {
                let (mut ia, mut oa) = self.circuit(a);
                let (ib, ob) = self.circuit(b);
                ia.extend(ib);
                oa.extend(ob);
                (ia, oa)
            }
        }
    }

    fn tape(&mut self, t: &Tape) -> Ends {
        let branches = |n: &str, k: usize| vec![n.to_string(); k];
        match t.kind() {
            TapeKind::IdZero => (vec![], vec![]),
            TapeKind::IdMonomial(_) => {
                let p = self.point();
                (vec![p.clone()], vec![p])
            }
            TapeKind::SymmetryPlus(..) => {
                let (a, b) = (self.point(), self.point());
                (vec![a.clone(), b.clone()], vec![b, a])
            }
            TapeKind::Bang(_) => (vec![self.node("bang", "diamond")], vec![]),
            TapeKind::Cobang(_) => (vec![], vec![self.node("cobang", "diamond")]),
            TapeKind::Diag(_) => {
                let n = self.node("diag", "diamond");
                (vec![n.clone()], branches(&n, 2))
            }
            TapeKind::Codiag(_) => {
                let n = self.node("codiag", "diamond");
                (branches(&n, 2), vec![n])
            }
            TapeKind::Embed(c) => {
                self.open(&format!("{} → {}", c.dom(), c.cod()), "rounded");
                let (ins, outs) = (self.point(), self.point());
                let (ic, oc) = self.circuit(c);
                for (to, s) in ic.iter().zip(c.dom().factors()) {
                    self.edge(&ins, to, s.name(), "");
                }
                for (from, s) in oc.iter().zip(c.cod().factors()) {
                    self.edge(from, &outs, s.name(), "");
                }
                self.close();
                (vec![ins], vec![outs])
            }
            TapeKind::Seq(a, b) => {
                let (ia, oa) = self.tape(a);
                let (ib, ob) = self.tape(b);
                for ((from, to), u) in oa.iter().zip(&ib).zip(a.cod().summands()) {
                    self.edge(from, to, &u.to_string(), ", penwidth=3");
                }
                (ia, ob)
            }
            TapeKind::Sum(a, b) => {
                let (mut ia, mut oa) = self.tape(a);
                let (ib, ob) = self.tape(b);
                ia.extend(ib);
                oa.extend(ob);
                (ia, oa)
            }
            TapeKind::Trace(u, body) => {
                self.open(&format!("trace {u}"), "dashed");
                let (mut ib, mut ob) = self.tape(body);
                let (back_in, back_out) = (ib.remove(0), ob.remove(0));
                self.edge(&back_out, &back_in, &u.to_string(), ", penwidth=3, style=dashed, constraint=false");
                self.close();
                (ib, ob)
            }
        }
    }
}

pub fn dot(term: &Term) -> String {
    let mut d = Dot { body: String::new(), nodes: 0, clusters: 0, depth: 0 };
    let (ins, outs, dom, cod): (_, _, Vec<String>, Vec<String>) = match term {
        Term::Tape(t) => {
            let (i, o) = d.tape(t);
            (
                i,
                o,
                t.dom().summands().iter().map(|u| u.to_string()).collect(),
                t.cod().summands().iter().map(|u| u.to_string()).collect(),
            )
        }
        Term::Circuit(c) => {
            let (i, o) = d.circuit(c);
            (
                i,
                o,
                c.dom().factors().iter().map(|s| s.to_string()).collect(),
                c.cod().factors().iter().map(|s| s.to_string()).collect(),
            )
        }
    };
    let mut out = String::from("digraph term {\n  rankdir=LR;\n  node [fontsize=10];\n  edge [fontsize=9];\n");
    out.push_str(&d.body);
    for (k, (to, label)) in ins.iter().zip(&dom).enumerate() {
        writeln!(out, "  in{k} [label={label:?}, shape=plaintext];").unwrap();
        writeln!(out, "  in{k} -> {to};").unwrap();
    }
    for (k, (from, label)) in outs.iter().zip(&cod).enumerate() {
        writeln!(out, "  out{k} [label={label:?}, shape=plaintext];").unwrap();
        writeln!(out, "  {from} -> out{k};").unwrap();
    }
    out.push_str("}\n");
    out
}
