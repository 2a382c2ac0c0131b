//! Finite models and exact model checking.
//!
//! Every model here is finite and its event algebra is the full powerset of
//! its worlds, so a measure is fixed by its point masses:
//! `μ(V) = Σ_{w∈V} μ({w})`.
//!
//! Propositions missing from an [`Evaluation`] are read as false.

use crate::rat::{parse_rat, to_fraction_string, Rat};
use crate::syntax::{eval_base, Formula, Fragment, ModalFormula};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

pub type Evaluation = BTreeMap<String, bool>;

fn lookup(v: &Evaluation) -> impl Fn(&str) -> Option<bool> + '_ {
    |name| Some(v.get(name).copied().unwrap_or(false))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("formula must be a base formula")]
    NotBase,
    #[error("nested probability operators are outside the non-iterated language")]
    Nested,
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("malformed model: {0}")]
    Malformed(String),
}

/// A world of a non-iterated model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlWorld {
    pub id: String,
    pub measure: Rat,
    pub valuation: Evaluation,
}

/// `⟨W, 2^W, μ, v⟩`
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlModel {
    pub worlds: Vec<PlWorld>,
}

impl PlModel {
    /// Indices of the worlds where base formula `alpha` is true.
    pub fn extension(&self, alpha: &Formula) -> Result<Vec<usize>, SemanticsError> {
        if alpha.has_prob() {
            return Err(SemanticsError::NotBase);
        }
        Ok(self
            .worlds
            .iter()
            .enumerate()
            .filter(|(_, w)| eval_base(alpha, &lookup(&w.valuation)).unwrap_or(false))
            .map(|(i, _)| i)
            .collect())
    }

    pub fn measure_of(&self, worlds: &[usize]) -> Rat {
        worlds
            .iter()
            .fold(Rat::zero(), |acc, &i| acc + &self.worlds[i].measure)
    }
}

/// Ids of the worlds of `m` where `alpha` holds.
pub fn extension_pl(m: &PlModel, alpha: &Formula) -> Result<Vec<String>, SemanticsError> {
    Ok(m.extension(alpha)?
        .into_iter()
        .map(|i| m.worlds[i].id.clone())
        .collect())
}

/// Truth of a base or non-iterated formula. A base formula holds when it is
/// true in every world; `P≥s α` holds when `μ([α]) ≥ s`.
pub fn holds_pl(m: &PlModel, a: &Formula) -> Result<bool, SemanticsError> {
    match a.fragment() {
        Fragment::Base => Ok(m.extension(a)?.len() == m.worlds.len()),
        Fragment::PlPrime => holds_pl_prime(m, a),
        Fragment::Ppl => Err(SemanticsError::Nested),
    }
}

fn holds_pl_prime(m: &PlModel, a: &Formula) -> Result<bool, SemanticsError> {
    match a {
        Formula::Not(b) => Ok(!holds_pl_prime(m, b)?),
        Formula::And(b, c) => Ok(holds_pl_prime(m, b)? && holds_pl_prime(m, c)?),
        Formula::Prob(s, alpha) => Ok(m.measure_of(&m.extension(alpha)?) >= *s),
        Formula::Atom(_) => Err(SemanticsError::Nested),
    }
}

/// A world of an iterated model together with its measure row over the
/// whole universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PplWorld {
    pub id: String,
    pub valuation: Evaluation,
    /// `measure[u]` is `μ_w({u})`, indexed like [`PplModel::worlds`].
    pub measure: Vec<Rat>,
}

/// `⟨U, W, H, μ, v⟩` with `W_w = U` and `H_w = 2^U` for every world.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PplModel {
    pub worlds: Vec<PplWorld>,
}

impl PplModel {
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w.id == id)
    }

    /// Truth value of `a` at every world, indexed like `worlds`.
    pub fn truth_set(&self, a: &Formula) -> Vec<bool> {
        match a {
            Formula::Atom(p) => self
                .worlds
                .iter()
                .map(|w| w.valuation.get(p).copied().unwrap_or(false))
                .collect(),
            Formula::Not(b) => self.truth_set(b).into_iter().map(|v| !v).collect(),
            Formula::And(b, c) => self
                .truth_set(b)
                .into_iter()
                .zip(self.truth_set(c))
                .map(|(x, y)| x && y)
                .collect(),
            Formula::Prob(s, b) => {
                let inner = self.truth_set(b);
                self.worlds
                    .iter()
                    .map(|w| {
                        let mass = w
                            .measure
                            .iter()
                            .zip(inner.iter())
                            .filter(|(_, &t)| t)
                            .fold(Rat::zero(), |acc, (m, _)| acc + m);
                        mass >= *s
                    })
                    .collect()
            }
        }
    }
}

/// `M, w ⊨ A`; `P≥s B` holds at `w` when `μ_w([B]) ≥ s`.
pub fn holds_ppl(m: &PplModel, world: &str, a: &Formula) -> Result<bool, SemanticsError> {
    let w = m
        .index_of(world)
        .ok_or_else(|| SemanticsError::UnknownWorld(world.to_string()))?;
    Ok(m.truth_set(a)[w])
}

/// `⟨W, R, v⟩`
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KripkeModel {
    pub worlds: Vec<String>,
    /// `successors[w]` is `R[w]`, sorted and duplicate-free.
    pub successors: Vec<Vec<usize>>,
    pub valuation: Vec<Evaluation>,
}

impl KripkeModel {
    pub fn new(worlds: Vec<String>, valuation: Vec<Evaluation>) -> Self {
        let n = worlds.len();
        assert_eq!(valuation.len(), n);
        Self {
            worlds,
            successors: vec![Vec::new(); n],
            valuation,
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        let succ = &mut self.successors[from];
        if let Err(pos) = succ.binary_search(&to) {
            succ.insert(pos, to);
        }
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == id)
    }

    pub fn is_serial(&self) -> bool {
        self.successors.iter().all(|s| !s.is_empty())
    }

    pub fn truth_set(&self, a: &ModalFormula) -> Vec<bool> {
        match a {
            ModalFormula::Atom(p) => self
                .valuation
                .iter()
                .map(|v| v.get(p).copied().unwrap_or(false))
                .collect(),
            ModalFormula::Not(b) => self.truth_set(b).into_iter().map(|v| !v).collect(),
            ModalFormula::And(b, c) => self
                .truth_set(b)
                .into_iter()
                .zip(self.truth_set(c))
                .map(|(x, y)| x && y)
                .collect(),
            ModalFormula::Box(b) => {
                let inner = self.truth_set(b);
                self.successors
                    .iter()
                    .map(|succ| succ.iter().all(|&u| inner[u]))
                    .collect()
            }
        }
    }
}

/// `M, w ⊨ A`; `□B` holds at `w` when `B` holds at every `u ∈ R[w]`.
pub fn holds_kripke(m: &KripkeModel, world: &str, a: &ModalFormula) -> Result<bool, SemanticsError> {
    let w = m
        .index_of(world)
        .ok_or_else(|| SemanticsError::UnknownWorld(world.to_string()))?;
    Ok(m.truth_set(a)[w])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoWorlds,
    DuplicateWorld(String),
    NegativeMeasure { world: String, toward: Option<String> },
    /// Total mass of a measure (the model's, or row `world` of an iterated
    /// model) differs from 1.
    MassNotOne { world: Option<String>, total: Rat },
    RowLength { world: String, len: usize, expected: usize },
    NoSuccessor(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoWorlds => write!(f, "model has no worlds"),
            Violation::DuplicateWorld(w) => write!(f, "duplicate world id `{w}`"),
            Violation::NegativeMeasure { world, toward: None } => {
                write!(f, "negative measure on world `{world}`")
            }
            Violation::NegativeMeasure {
                world,
                toward: Some(u),
            } => write!(f, "negative measure from `{world}` toward `{u}`"),
            Violation::MassNotOne { world: None, total } => {
                write!(f, "measures sum to {} instead of 1", to_fraction_string(total))
            }
            Violation::MassNotOne {
                world: Some(w),
                total,
            } => write!(
                f,
                "measure of world `{w}` sums to {} instead of 1",
                to_fraction_string(total)
            ),
            Violation::RowLength { world, len, expected } => write!(
                f,
                "measure row of `{world}` has {len} entries, universe has {expected}"
            ),
            Violation::NoSuccessor(w) => write!(f, "world `{w}` has no successor (R[w] is empty)"),
        }
    }
}

fn duplicate_ids<'a>(ids: impl Iterator<Item = &'a String>) -> Vec<Violation> {
    let mut seen = HashSet::new();
    ids.filter(|id| !seen.insert(*id))
        .map(|id| Violation::DuplicateWorld(id.clone()))
        .collect()
}

pub fn validate_pl(m: &PlModel) -> Vec<Violation> {
    let mut out = Vec::new();
    if m.worlds.is_empty() {
        out.push(Violation::NoWorlds);
    }
    out.extend(duplicate_ids(m.worlds.iter().map(|w| &w.id)));
    for w in &m.worlds {
        if w.measure.is_negative() {
            out.push(Violation::NegativeMeasure {
                world: w.id.clone(),
                toward: None,
            });
        }
    }
    let total = m.worlds.iter().fold(Rat::zero(), |acc, w| acc + &w.measure);
    if !total.is_one() {
        out.push(Violation::MassNotOne { world: None, total });
    }
    out
}

pub fn validate_ppl(m: &PplModel) -> Vec<Violation> {
    let mut out = Vec::new();
    if m.worlds.is_empty() {
        out.push(Violation::NoWorlds);
    }
    out.extend(duplicate_ids(m.worlds.iter().map(|w| &w.id)));
    let n = m.worlds.len();
    for w in &m.worlds {
        if w.measure.len() != n {
            out.push(Violation::RowLength {
                world: w.id.clone(),
                len: w.measure.len(),
                expected: n,
            });
            continue;
        }
        for (u, mu) in w.measure.iter().enumerate() {
            if mu.is_negative() {
                out.push(Violation::NegativeMeasure {
                    world: w.id.clone(),
                    toward: Some(m.worlds[u].id.clone()),
                });
            }
        }
        let total = w.measure.iter().fold(Rat::zero(), |acc, x| acc + x);
        if !total.is_one() {
            out.push(Violation::MassNotOne {
                world: Some(w.id.clone()),
                total,
            });
        }
    }
    out
}

/// Structural checks, plus `R[w] ≠ ∅` for every world when `serial` is set.
pub fn validate_kripke(m: &KripkeModel, serial: bool) -> Vec<Violation> {
    let mut out = Vec::new();
    if m.worlds.is_empty() {
        out.push(Violation::NoWorlds);
    }
    out.extend(duplicate_ids(m.worlds.iter()));
    if serial {
        for (w, succ) in m.worlds.iter().zip(m.successors.iter()) {
            if succ.is_empty() {
                out.push(Violation::NoSuccessor(w.clone()));
            }
        }
    }
    out
}

/// Any of the three model kinds, as read from or written to a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Model {
    Pl(PlModel),
    Ppl(PplModel),
    Kripke(KripkeModel),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Pl(_) => "pl",
            Model::Ppl(_) => "ppl",
            Model::Kripke(_) => "kripke",
        }
    }

    /// Kripke models are validated as serial.
    pub fn validate(&self) -> Vec<Violation> {
        match self {
            Model::Pl(m) => validate_pl(m),
            Model::Ppl(m) => validate_ppl(m),
            Model::Kripke(m) => validate_kripke(m, true),
        }
    }

    pub fn to_json(&self) -> String {
        let record = match self {
            Model::Pl(m) => ModelRecord::Pl {
                worlds: m
                    .worlds
                    .iter()
                    .map(|w| PlWorldRecord {
                        id: w.id.clone(),
                        measure: to_fraction_string(&w.measure),
                        valuation: w.valuation.clone(),
                    })
                    .collect(),
            },
            Model::Ppl(m) => ModelRecord::Ppl {
                worlds: m
                    .worlds
                    .iter()
                    .map(|w| PplWorldRecord {
                        id: w.id.clone(),
                        valuation: w.valuation.clone(),
                        measure: m
                            .worlds
                            .iter()
                            .zip(w.measure.iter())
                            .filter(|(_, mu)| !mu.is_zero())
                            .map(|(u, mu)| (u.id.clone(), to_fraction_string(mu)))
                            .collect(),
                    })
                    .collect(),
            },
            Model::Kripke(m) => ModelRecord::Kripke {
                worlds: m.worlds.clone(),
                edges: m
                    .successors
                    .iter()
                    .enumerate()
                    .flat_map(|(w, succ)| {
                        succ.iter()
                            .map(move |&u| (m.worlds[w].clone(), m.worlds[u].clone()))
                    })
                    .collect(),
                valuation: m
                    .worlds
                    .iter()
                    .cloned()
                    .zip(m.valuation.iter().cloned())
                    .collect(),
            },
        };
        serde_json::to_string_pretty(&record).expect("model records always serialize")
    }

    pub fn from_json(text: &str) -> Result<Model, SemanticsError> {
        let record: ModelRecord =
            serde_json::from_str(text).map_err(|e| SemanticsError::Malformed(e.to_string()))?;
        let rational = |s: &str| {
            parse_rat(s).map_err(|e| SemanticsError::Malformed(format!("measure `{s}`: {e}")))
        };
        match record {
            ModelRecord::Pl { worlds } => {
                let worlds = worlds
                    .into_iter()
                    .map(|w| {
                        Ok(PlWorld {
                            measure: rational(&w.measure)?,
                            id: w.id,
                            valuation: w.valuation,
                        })
                    })
                    .collect::<Result<_, SemanticsError>>()?;
                Ok(Model::Pl(PlModel { worlds }))
            }
            ModelRecord::Ppl { worlds } => {
                let index: HashMap<&str, usize> = worlds
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (w.id.as_str(), i))
                    .collect();
                let n = worlds.len();
                let mut out = Vec::with_capacity(n);
                for w in &worlds {
                    let mut row = vec![Rat::zero(); n];
                    for (u, mu) in &w.measure {
                        let &j = index.get(u.as_str()).ok_or_else(|| {
                            SemanticsError::Malformed(format!(
                                "world `{}` assigns measure to unknown world `{u}`",
                                w.id
                            ))
                        })?;
                        row[j] = rational(mu)?;
                    }
                    out.push(PplWorld {
                        id: w.id.clone(),
                        valuation: w.valuation.clone(),
                        measure: row,
                    });
                }
                Ok(Model::Ppl(PplModel { worlds: out }))
            }
            ModelRecord::Kripke {
                worlds,
                edges,
                mut valuation,
            } => {
                let vals = worlds
                    .iter()
                    .map(|w| valuation.remove(w).unwrap_or_default())
                    .collect();
                if let Some(extra) = valuation.keys().next() {
                    return Err(SemanticsError::Malformed(format!(
                        "valuation for unknown world `{extra}`"
                    )));
                }
                let mut m = KripkeModel::new(worlds, vals);
                for (a, b) in edges {
                    let from = m.index_of(&a);
                    let to = m.index_of(&b);
                    match (from, to) {
                        (Some(f), Some(t)) => m.add_edge(f, t),
                        _ => {
                            return Err(SemanticsError::Malformed(format!(
                                "edge ({a}, {b}) mentions an unknown world"
                            )))
                        }
                    }
                }
                Ok(Model::Kripke(m))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ModelRecord {
    Pl {
        worlds: Vec<PlWorldRecord>,
    },
    Ppl {
        worlds: Vec<PplWorldRecord>,
    },
    Kripke {
        worlds: Vec<String>,
        edges: Vec<(String, String)>,
        #[serde(default)]
        valuation: BTreeMap<String, Evaluation>,
    },
}

#[derive(Serialize, Deserialize)]
struct PlWorldRecord {
    id: String,
    measure: String,
    #[serde(default)]
    valuation: Evaluation,
}

#[derive(Serialize, Deserialize)]
struct PplWorldRecord {
    id: String,
    #[serde(default)]
    valuation: Evaluation,
    #[serde(default)]
    measure: BTreeMap<String, String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_modal};
    use crate::rat::{int, rat};

    fn eval(pairs: &[(&str, bool)]) -> Evaluation {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn two_worlds() -> PlModel {
        PlModel {
            worlds: vec![
                PlWorld {
                    id: "w1".into(),
                    measure: rat(1, 2),
                    valuation: eval(&[("p", true)]),
                },
                PlWorld {
                    id: "w2".into(),
                    measure: rat(1, 2),
                    valuation: eval(&[("p", false)]),
                },
            ],
        }
    }

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn extensions() {
        let m = two_worlds();
        assert_eq!(extension_pl(&m, &f("p")).unwrap(), vec!["w1"]);
        assert_eq!(extension_pl(&m, &f("p | ~p")).unwrap().len(), 2);
        assert!(extension_pl(&m, &f("p & ~p")).unwrap().is_empty());
        assert_eq!(extension_pl(&m, &f("P>=1/2 p")), Err(SemanticsError::NotBase));
    }

    #[test]
    fn pl_truth() {
        let m = two_worlds();
        assert!(holds_pl(&m, &f("P>=1/2 p")).unwrap());
        assert!(!holds_pl(&m, &f("P>=3/5 p")).unwrap());
        assert!(holds_pl(&m, &f("P>=0 q")).unwrap());
        assert!(!holds_pl(&m, &f("p")).unwrap());
        assert!(holds_pl(&m, &f("p | ~p")).unwrap());
        assert_eq!(holds_pl(&m, &f("P>=1 P>=1 p")), Err(SemanticsError::Nested));
    }

    #[test]
    fn ppl_truth() {
        let single = PplModel {
            worlds: vec![PplWorld {
                id: "u".into(),
                valuation: eval(&[("p", true)]),
                measure: vec![int(1)],
            }],
        };
        assert!(holds_ppl(&single, "u", &f("P>=1 p")).unwrap());
        let pair = PplModel {
            worlds: vec![
                PplWorld {
                    id: "u".into(),
                    valuation: eval(&[("p", false)]),
                    measure: vec![rat(1, 2), rat(1, 2)],
                },
                PplWorld {
                    id: "v".into(),
                    valuation: eval(&[("p", true)]),
                    measure: vec![int(0), int(1)],
                },
            ],
        };
        assert!(holds_ppl(&pair, "u", &f("P>=1/2 p")).unwrap());
        assert!(!holds_ppl(&pair, "u", &f("P>1/2 p")).unwrap());
        assert!(holds_ppl(&pair, "v", &f("P>=1 P>=1 p")).unwrap());
        assert!(holds_ppl(&pair, "x", &f("p")).is_err());
    }

    #[test]
    fn kripke_truth() {
        let mut m = KripkeModel::new(
            vec!["w".into(), "u".into(), "v".into()],
            vec![eval(&[]), eval(&[("p", true)]), eval(&[])],
        );
        let bp = parse_modal("[]p").unwrap();
        assert!(holds_kripke(&m, "w", &bp).unwrap());
        m.add_edge(0, 1);
        assert!(holds_kripke(&m, "w", &bp).unwrap());
        m.add_edge(0, 2);
        assert!(!holds_kripke(&m, "w", &bp).unwrap());
    }

    #[test]
    fn validation() {
        assert!(validate_pl(&two_worlds()).is_empty());
        let mut bad = two_worlds();
        bad.worlds[1].measure = rat(1, 4);
        assert_eq!(
            validate_pl(&bad),
            vec![Violation::MassNotOne {
                world: None,
                total: rat(3, 4)
            }]
        );
        let mut m = KripkeModel::new(vec!["w".into(), "sink".into()], vec![eval(&[]), eval(&[])]);
        m.add_edge(0, 1);
        assert_eq!(
            validate_kripke(&m, true),
            vec![Violation::NoSuccessor("sink".into())]
        );
        assert!(validate_kripke(&m, false).is_empty());
    }

    #[test]
    fn json_round_trip() {
        let pl = Model::Pl(two_worlds());
        assert_eq!(Model::from_json(&pl.to_json()).unwrap(), pl);
        let text = r#"{"kind":"ppl","worlds":[{"id":"0","valuation":{"p":true},"measure":{"0":"1/2","1":"1/2"}},{"id":"1","valuation":{},"measure":{"1":"1"}}]}"#;
        let ppl = Model::from_json(text).unwrap();
        assert!(ppl.validate().is_empty());
        assert_eq!(Model::from_json(&ppl.to_json()).unwrap(), ppl);
        let text = r#"{"kind":"kripke","worlds":["w1","w2"],"edges":[["w1","w2"],["w2","w2"]],"valuation":{"w2":{"p":true}}}"#;
        let k = Model::from_json(text).unwrap();
        assert!(k.validate().is_empty());
        assert_eq!(Model::from_json(&k.to_json()).unwrap(), k);
    }

    #[test]
    fn json_errors() {
        assert!(Model::from_json(r#"{"kind":"pl","worlds":[{"id":"a","measure":"x"}]}"#).is_err());
        assert!(Model::from_json(r#"{"kind":"kripke","worlds":["a"],"edges":[["a","b"]]}"#).is_err());
        assert!(Model::from_json(r#"{"kind":"ppl","worlds":[{"id":"a","measure":{"z":"1"}}]}"#).is_err());
        assert!(Model::from_json(r#"{"kind":"other"}"#).is_err());
    }
}
