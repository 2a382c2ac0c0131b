//! Bounded search for a serial Kripke model of a modal formula.
//!
//! All 2^(k·n) valuations of n worlds over k propositions are evaluated at
//! once: bit `v` of a truth vector is the formula's value under valuation
//! number `v`. Only relations are enumerated explicitly, and only world 0 is
//! inspected, since relabelling worlds moves any pointed model there.

use super::OracleError;
use crate::syntax::ModalFormula;
use std::collections::HashMap;

pub const MAX_WORLDS: usize = 4;
pub const MAX_KRIPKE_PROPOSITIONS: usize = 2;

/// Enough for 2^(2·4) valuations.
type Bits = [u64; 4];

#[derive(Clone, Copy)]
enum Node {
    Atom(usize),
    Not(usize),
    And(usize, usize),
    Box(usize),
}

fn flatten(f: &ModalFormula, props: &[String], nodes: &mut Vec<Node>, seen: &mut HashMap<ModalFormula, usize>) -> usize {
    if let Some(&i) = seen.get(f) {
        return i;
    }
    let node = match f {
        ModalFormula::Atom(p) => Node::Atom(props.iter().position(|q| q == p).expect("listed")),
        ModalFormula::Not(a) => Node::Not(flatten(a, props, nodes, seen)),
        ModalFormula::And(a, b) => {
            let i = flatten(a, props, nodes, seen);
            Node::And(i, flatten(b, props, nodes, seen))
        }
        ModalFormula::Box(a) => Node::Box(flatten(a, props, nodes, seen)),
    };
    nodes.push(node);
    seen.insert(f.clone(), nodes.len() - 1);
    nodes.len() - 1
}

fn and(a: &Bits, b: &Bits) -> Bits {
    std::array::from_fn(|i| a[i] & b[i])
}

/// Whether `a` holds at some world of some serial model with at most
/// `max_worlds` worlds. Sizes are tried in increasing order.
pub fn d_sat_bruteforce(a: &ModalFormula, max_worlds: usize) -> Result<bool, OracleError> {
    let props = a.propositions();
    if max_worlds > MAX_WORLDS || props.len() > MAX_KRIPKE_PROPOSITIONS {
        return Err(OracleError::TooLarge(format!(
            "{max_worlds} worlds over {} propositions, at most {MAX_WORLDS} over {MAX_KRIPKE_PROPOSITIONS}",
            props.len()
        )));
    }
    let mut nodes = Vec::new();
    let root = flatten(a, &props, &mut nodes, &mut HashMap::new());
    let k = props.len();
    for n in 1..=max_worlds {
        if search(&nodes, root, k, n) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn search(nodes: &[Node], root: usize, k: usize, n: usize) -> bool {
    let valuations = 1usize << (k * n);
    let mut full: Bits = [0; 4];
    for v in 0..valuations {
        full[v / 64] |= 1 << (v % 64);
    }
    // atoms[w][j]: proposition j at world w, over every valuation.
    let atoms: Vec<Vec<Bits>> = (0..n)
        .map(|w| {
            (0..k)
                .map(|j| {
                    let mut b: Bits = [0; 4];
                    for v in (0..valuations).filter(|v| v >> (w * k + j) & 1 == 1) {
                        b[v / 64] |= 1 << (v % 64);
                    }
                    b
                })
                .collect()
        })
        .collect();

    let nonempty = (1usize << n) - 1;
    let mut succ = vec![1usize; n];
    let mut table: Vec<Vec<Bits>> = vec![vec![[0; 4]; n]; nodes.len()];
    loop {
        for (i, node) in nodes.iter().enumerate() {
            for w in 0..n {
                table[i][w] = match *node {
                    Node::Atom(j) => atoms[w][j],
                    Node::Not(a) => std::array::from_fn(|x| !table[a][w][x] & full[x]),
                    Node::And(a, b) => and(&table[a][w], &table[b][w]),
                    Node::Box(a) => (0..n)
                        .filter(|u| succ[w] >> u & 1 == 1)
                        .fold(full, |acc, u| and(&acc, &table[a][u])),
                };
            }
        }
        if table[root][0].iter().any(|&x| x != 0) {
            return true;
        }
        // Next relation: each R[w] runs over the non-empty subsets.
        let mut w = 0;
        loop {
            if w == n {
                return false;
            }
            if succ[w] < nonempty {
                succ[w] += 1;
                break;
            }
            succ[w] = 1;
            w += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_modal;

    fn sat(s: &str, worlds: usize) -> bool {
        d_sat_bruteforce(&parse_modal(s).unwrap(), worlds).unwrap()
    }

    #[test]
    fn examples() {
        assert!(!sat("[]p & ~[]p", 4));
        assert!(!sat("[](p & ~p)", 4));
        assert!(sat("~[]p & ~[]~p", 2));
        assert!(!sat("~[]p & ~[]~p", 1));
        assert!(sat("[]p", 1));
    }

    #[test]
    fn seriality_axiom_holds() {
        assert!(!sat("~([]p -> <>p)", 4));
        assert!(!sat("~<>(p | ~p)", 3));
        assert!(sat("~([]p -> p)", 2));
        assert!(sat("~([]p -> [][]p)", 3));
    }

    #[test]
    fn guard() {
        assert!(d_sat_bruteforce(&parse_modal("p").unwrap(), 5).is_err());
        assert!(d_sat_bruteforce(&parse_modal("p & q & r").unwrap(), 2).is_err());
    }
}
