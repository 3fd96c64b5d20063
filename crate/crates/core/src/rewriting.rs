//! Rewriting trees: eager term-matching against clause heads, lazy
//! unification through tree transitions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formula::{Atom, HornClause, Program};
use crate::subst::{anti_unify_atoms, match_atom, unify_atoms, Substitution};
use crate::term::{fresh_name, Term};

pub const DEFAULT_TREE_DEPTH: usize = 64;
pub const DEFAULT_TRANSITIONS: usize = 8;
/// Node budget per tree; wide programs are cut here like deep ones.
const NODE_LIMIT: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewritingError {
    #[error("the rewriting tree was truncated at the depth budget")]
    TruncatedTree,
    #[error("the rewriting tree is not irregular")]
    NotIrregular,
    #[error("no critical leaf shares the root's predicate")]
    NoGeneralisation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Label {
    Atom(Atom),
    Box,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Atom(a) => write!(f, "{}", a),
            Label::Box => write!(f, "□"),
        }
    }
}

/// Children contributed by one matching clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub clause: usize,
    pub matcher: Substitution,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub path: Vec<usize>,
    pub label: Label,
    pub expansions: Vec<Expansion>,
    /// Set when the node would be expanded but the budget ran out.
    pub truncated: bool,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.expansions.is_empty()
    }

    pub fn atom(&self) -> Option<&Atom> {
        match &self.label {
            Label::Atom(a) => Some(a),
            Label::Box => None,
        }
    }

    pub fn children(&self) -> impl Iterator<Item = usize> + '_ {
        self.expansions.iter().flat_map(|e| e.children.iter().copied())
    }
}

/// A rewriting tree stored in pre-order; `nodes[0]` is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewritingTree {
    pub nodes: Vec<Node>,
}

pub fn path_string(p: &[usize]) -> String {
    if p.is_empty() {
        "ε".to_string()
    } else {
        p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// Renames every variable of `c` apart from `taken`, recording new names.
pub fn rename_apart(c: &HornClause, taken: &mut BTreeSet<String>) -> HornClause {
    c.rename(|v| {
        let n = fresh_name(v, |n| taken.contains(n));
        taken.insert(n.clone());
        n
    })
}

fn atom_names(a: &Atom, out: &mut BTreeSet<String>) {
    for t in &a.args {
        t.all_names(out);
    }
}

struct Builder<'a> {
    program: &'a Program,
    depth: usize,
    cuts: &'a [Vec<usize>],
    taken: BTreeSet<String>,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn build(&mut self, label: Label, path: Vec<usize>) -> usize {
        let idx = self.nodes.len();
        self.nodes.push(Node {
            path: path.clone(),
            label: label.clone(),
            expansions: Vec::new(),
            truncated: false,
        });
        let atom = match label {
            Label::Atom(a) => a,
            Label::Box => return idx,
        };
        if self.cuts.contains(&path) {
            return idx;
        }
        let mut matching: Vec<(usize, HornClause, Substitution)> = Vec::new();
        for (i, nc) in self.program.clauses.iter().enumerate() {
            let mut taken = self.taken.clone();
            let c = rename_apart(&nc.clause, &mut taken);
            if let Some(s) = match_atom(&c.head, &atom) {
                self.taken = taken;
                matching.push((i, c, s));
            }
        }
        if matching.is_empty() {
            return idx;
        }
        if path.len() >= self.depth || self.nodes.len() >= NODE_LIMIT {
            self.nodes[idx].truncated = true;
            return idx;
        }
        let mut next_child = 0;
        for (clause, c, sigma) in matching {
            let labels: Vec<Label> = if c.body.is_empty() {
                vec![Label::Box]
            } else {
                c.body.iter().map(|b| Label::Atom(sigma.apply_atom(b))).collect()
            };
            let mut children = Vec::new();
            for l in labels {
                let mut p = path.clone();
                p.push(next_child);
                next_child += 1;
                children.push(self.build(l, p));
            }
            self.nodes[idx].expansions.push(Expansion {
                clause,
                matcher: sigma,
                children,
            });
        }
        idx
    }
}

fn program_names(p: &Program) -> BTreeSet<String> {
    p.names()
}

/// Expands `root` by matching clause heads, up to `depth`.
pub fn build_tree(program: &Program, root: &Atom, depth: usize) -> RewritingTree {
    build_tree_with_cuts(program, root, depth, &[])
}

/// As [`build_tree`], but nodes at the given paths are left unexpanded.
pub fn build_tree_with_cuts(program: &Program, root: &Atom, depth: usize, cuts: &[Vec<usize>]) -> RewritingTree {
    let mut taken = program_names(program);
    atom_names(root, &mut taken);
    let mut b = Builder {
        program,
        depth,
        cuts,
        taken,
        nodes: Vec::new(),
    };
    b.build(Label::Atom(root.clone()), Vec::new());
    RewritingTree { nodes: b.nodes }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub leaf: usize,
    pub clause: usize,
    pub unifier: Substitution,
    pub target: RewritingTree,
}

impl RewritingTree {
    pub fn root(&self) -> &Atom {
        self.nodes[0].atom().expect("root is an atom")
    }

    pub fn is_truncated(&self) -> bool {
        self.nodes.iter().any(|n| n.truncated)
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].is_leaf())
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.path.len()).max().unwrap_or(0)
    }

    pub fn node_at(&self, path: &[usize]) -> Option<&Node> {
        self.nodes.iter().find(|n| n.path == path)
    }

    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for n in &self.nodes {
            if let Some(a) = n.atom() {
                atom_names(a, &mut out);
            }
        }
        out
    }

    /// One transition per (atom leaf, clause) whose head unifies with the
    /// leaf, in leaf pre-order and clause order.
    pub fn transitions(&self, program: &Program, depth: usize) -> Vec<Transition> {
        let root_vars = self.root().free_vars();
        let mut out = Vec::new();
        for leaf in self.leaves() {
            let node = &self.nodes[leaf];
            let atom = match node.atom() {
                Some(a) if !node.truncated => a,
                _ => continue,
            };
            for (ci, nc) in program.clauses.iter().enumerate() {
                let mut taken = program_names(program);
                taken.extend(self.names());
                let c = rename_apart(&nc.clause, &mut taken);
                if let Some(theta) = unify_atoms(atom, &c.head) {
                    let unifier = theta.restrict(root_vars.iter());
                    let root = unifier.apply_atom(self.root());
                    out.push(Transition {
                        leaf,
                        clause: ci,
                        unifier,
                        target: build_tree(program, &root, depth),
                    });
                }
            }
        }
        out
    }

    /// Whether `⟨root, leaf⟩` is a critical pair for a non-root atom leaf.
    pub fn is_critical_leaf(&self, leaf: usize) -> bool {
        let n = &self.nodes[leaf];
        match n.atom() {
            Some(a) if !n.path.is_empty() && n.is_leaf() => critical_pair(self.root(), a),
            _ => false,
        }
    }

    pub fn critical_leaves(&self) -> Vec<usize> {
        self.leaves().filter(|&l| self.is_critical_leaf(l)).collect()
    }

    /// Every leaf is `□` or critical with the root, and at least one leaf
    /// is critical.
    pub fn is_irregular(&self) -> Result<bool, RewritingError> {
        if self.is_truncated() {
            return Err(RewritingError::TruncatedTree);
        }
        let mut critical = 0;
        for l in self.leaves() {
            match self.nodes[l].label {
                Label::Box => {}
                Label::Atom(_) => {
                    if self.is_critical_leaf(l) {
                        critical += 1;
                    } else {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(critical > 0)
    }

    /// Anti-unifies the root with the critical leaves of its predicate and
    /// re-expands the result, leaving the images of those leaves unexpanded.
    pub fn abstract_representation(&self, program: &Program, depth: usize) -> Result<RewritingTree, RewritingError> {
        if !self.is_irregular()? {
            return Err(RewritingError::NotIrregular);
        }
        let pred = &self.root().pred;
        let leaves: Vec<usize> = self
            .critical_leaves()
            .into_iter()
            .filter(|&l| self.nodes[l].atom().is_some_and(|a| &a.pred == pred))
            .collect();
        if leaves.is_empty() {
            return Err(RewritingError::NoGeneralisation);
        }
        let mut atoms: Vec<&Atom> = vec![self.root()];
        atoms.extend(leaves.iter().filter_map(|&l| self.nodes[l].atom()));
        let root = anti_unify_atoms(&atoms).map_err(|_| RewritingError::NoGeneralisation)?;
        let cuts: Vec<Vec<usize>> = leaves.iter().map(|&l| self.nodes[l].path.clone()).collect();
        Ok(build_tree_with_cuts(program, &root, depth, &cuts))
    }

    /// Indented rendering, one node per line, critical pairs tagged.
    pub fn render(&self) -> String {
        let critical: BTreeSet<usize> = self.critical_leaves().into_iter().collect();
        let root_critical = !critical.is_empty();
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let indent = "  ".repeat(n.path.len());
            out.push_str(&format!("{}{}  {}", indent, path_string(&n.path), n.label));
            if (i == 0 && root_critical) || critical.contains(&i) {
                out.push_str("  <critical>");
            }
            if n.truncated {
                out.push_str("  <truncated>");
            }
            out.push('\n');
        }
        out
    }

    /// Graph description: `id parent label`, with parent `-` for the root.
    pub fn to_graph(&self) -> String {
        let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            for c in n.children() {
                parent.insert(c, i);
            }
        }
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let p = parent.get(&i).map_or("-".to_string(), |p| p.to_string());
            out.push_str(&format!("{} {} {}\n", i, p, n.label));
        }
        out
    }
}

/// Multiset of term symbols and variable occurrences of an atom.
pub fn symbol_multiset(a: &Atom) -> BTreeMap<String, usize> {
    fn go(t: &Term, m: &mut BTreeMap<String, usize>) {
        match t {
            Term::Var(x) => *m.entry(format!("var:{}", x)).or_default() += 1,
            Term::Const(c) => *m.entry(format!("sym:{}", c)).or_default() += 1,
            Term::App(f, a) => {
                go(f, m);
                go(a, m);
            }
            Term::Lam(_, _, b) | Term::Fix(_, _, b) => go(b, m),
        }
    }
    let mut m = BTreeMap::new();
    for t in &a.args {
        go(t, &mut m);
    }
    m
}

fn strict_submultiset(a: &BTreeMap<String, usize>, b: &BTreeMap<String, usize>) -> bool {
    a.iter().all(|(k, n)| b.get(k).is_some_and(|m| n <= m)) && a != b
}

/// Every body atom's symbols and variables form a strict sub-multiset of
/// the head's.
pub fn paterson(c: &HornClause) -> bool {
    let head = symbol_multiset(&c.head);
    c.body.iter().all(|b| strict_submultiset(&symbol_multiset(b), &head))
}

/// `⟨a, b⟩` is critical when `b → a` violates the Paterson condition.
pub fn critical_pair(a: &Atom, b: &Atom) -> bool {
    !paterson(&HornClause::new(a.clone(), vec![b.clone()]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Productivity {
    /// No probe tree reached the depth budget within the transition fuel.
    Productive,
    NotProductive,
    Unknown,
}

/// The most general atom `p(X1, ..., Xn)` of every predicate.
pub fn default_probes(program: &Program) -> Vec<Atom> {
    let taken = program_names(program);
    program
        .signature
        .preds
        .iter()
        .map(|(p, ty)| {
            let n = ty.uncurry().0.len();
            let mut local = taken.clone();
            let args = (0..n)
                .map(|i| {
                    let v = fresh_name(&format!("V{}", i + 1), |x| local.contains(x));
                    local.insert(v.clone());
                    Term::var(&v)
                })
                .collect::<Vec<_>>();
            Atom::new(p, args)
        })
        .collect()
}

/// Semi-decision of productivity: explores the trees of the probes and
/// up to `fuel` transitions from them, breadth first.
pub fn is_productive(program: &Program, probes: &[Atom], depth: usize, fuel: usize) -> Productivity {
    let mut queue: std::collections::VecDeque<RewritingTree> =
        probes.iter().map(|a| build_tree(program, a, depth)).collect();
    let mut used = 0;
    let mut saturated = false;
    while let Some(t) = queue.pop_front() {
        if t.is_truncated() {
            if t.depth() >= depth {
                return Productivity::NotProductive;
            }
            saturated = true;
            continue;
        }
        for tr in t.transitions(program, depth) {
            if used >= fuel {
                break;
            }
            used += 1;
            queue.push_back(tr.target);
        }
    }
    if saturated {
        Productivity::Unknown
    } else {
        Productivity::Productive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_atom, parse_program};

    fn stream0() -> Program {
        parse_program("stream(cons(0, X)) :- stream(X).").unwrap()
    }

    fn from() -> Program {
        parse_program("from(X, cons(X, Y)) :- from(s(X), Y).").unwrap()
    }

    fn gamma_t() -> Program {
        parse_program("type a : i.\np(X) :- p(f(X)).").unwrap()
    }

    fn atom(p: &Program, s: &str) -> Atom {
        parse_atom(s, &p.signature).unwrap().0
    }

    #[test]
    fn stream_transitions() {
        let p = stream0();
        let t0 = build_tree(&p, &atom(&p, "stream(x)"), 8);
        assert_eq!(t0.nodes.len(), 1);
        let trs = t0.transitions(&p, 8);
        assert_eq!(trs.len(), 1);
        assert_eq!(trs[0].unifier.to_string(), "[cons(0, X')/x]");
        let t1 = &trs[0].target;
        assert_eq!(t1.render(), "ε  stream(cons(0, X'))\n  0  stream(X')\n");
        let t2 = &t1.transitions(&p, 8)[0];
        assert_eq!(t2.unifier.to_string(), "[cons(0, X'')/X']");
        assert_eq!(t2.target.root().to_string(), "stream(cons(0, cons(0, X'')))");
        assert_eq!(t2.target.nodes.len(), 3);
        assert!(!t1.is_irregular().unwrap());
    }

    #[test]
    fn from_tree_is_irregular() {
        let p = from();
        let t = build_tree(&p, &atom(&p, "from(0, cons(0, y'))"), 8);
        assert_eq!(t.nodes.len(), 2);
        assert_eq!(t.nodes[1].label.to_string(), "from(s(0), y')");
        assert!(t.is_irregular().unwrap());
        let abs = t.abstract_representation(&p, 8).unwrap();
        assert_eq!(abs.nodes.len(), 1);
        let r = abs.root();
        assert!(r.args.iter().all(|a| a.as_var().is_some()));
        assert_ne!(r.args[0], r.args[1]);
        let tr = &abs.transitions(&p, 8)[0];
        assert!(tr.target.is_irregular().unwrap());
        let root = tr.target.root().to_string();
        let (x, z) = (r.args[0].to_string(), r.args[1].to_string());
        assert_eq!(tr.unifier.to_string(), format!("[cons({}, Y')/{}]", x, z));
        assert_eq!(root, format!("from({}, cons({}, Y'))", x, x));
    }

    #[test]
    fn gamma_t_tree_is_infinite() {
        let p = gamma_t();
        let t = build_tree(&p, &atom(&p, "p(a)"), 10);
        assert!(t.is_truncated());
        assert_eq!(t.depth(), 10);
        assert_eq!(t.is_irregular(), Err(RewritingError::TruncatedTree));
    }

    #[test]
    fn productivity() {
        let p = stream0();
        assert_eq!(is_productive(&p, &default_probes(&p), 16, 8), Productivity::Productive);
        let g = gamma_t();
        let probe = atom(&g, "p(a)");
        assert_eq!(is_productive(&g, &[probe], 16, 8), Productivity::NotProductive);
        let empty = Program::default();
        assert_eq!(is_productive(&empty, &[], 16, 8), Productivity::Productive);
    }

    #[test]
    fn paterson_condition() {
        assert!(paterson(stream0().clause(0)));
        assert!(!paterson(gamma_t().clause(0)));
        assert!(!paterson(from().clause(0)));
        let g = gamma_t();
        assert!(critical_pair(&atom(&g, "p(x)"), &atom(&g, "p(f(x))")));
    }

    #[test]
    fn fact_children_are_boxes() {
        let p = parse_program("q(a).\nq(X) :- r(X).\nr(a).").unwrap();
        let t = build_tree(&p, &atom(&p, "q(a)"), 8);
        assert_eq!(t.nodes.len(), 4);
        assert_eq!(t.nodes[1].label, Label::Box);
        assert_eq!(t.nodes[2].path, vec![1]);
        assert_eq!(t.nodes[3].path, vec![1, 0]);
        assert!(!t.is_irregular().unwrap());
        assert!(t.transitions(&p, 8).is_empty());
    }

    #[test]
    fn single_node_root_is_not_irregular() {
        let p = stream0();
        let t = build_tree(&p, &atom(&p, "stream(x)"), 8);
        assert!(!t.is_irregular().unwrap());
        assert_eq!(t.abstract_representation(&p, 8), Err(RewritingError::NotIrregular));
    }

    #[test]
    fn fib_abstraction() {
        let p = parse_program("fib(X, Y, cons(X, Z)) :- fib(Y, X + Y, Z).").unwrap();
        let t = build_tree(&p, &atom(&p, "fib(0, 1, cons(0, z))"), 8);
        assert!(t.is_irregular().unwrap());
        let abs = t.abstract_representation(&p, 8).unwrap();
        assert!(abs.root().args.iter().all(|a| a.as_var().is_some()));
        let tr = &abs.transitions(&p, 8)[0];
        let r = &tr.target;
        assert!(r.is_irregular().unwrap());
        let leaf = r.nodes[1].atom().unwrap();
        let root = r.root();
        assert_eq!(leaf.args[0], root.args[1]);
        assert_eq!(
            leaf.args[1],
            Term::func("plus", [root.args[0].clone(), root.args[1].clone()])
        );
    }
}
