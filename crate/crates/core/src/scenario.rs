//! JSON scenario files.
//!
//! ```json
//! {
//!   "agents": ["a"],
//!   "ap": ["p"],
//!   "model": {
//!     "worlds": [{"id": "w1", "val": ["p"]}, {"id": "w2", "val": []}],
//!     "relations": {"a": [["w1", "w1"], ["w1", "w2"]]},
//!     "point": "w1"
//!   },
//!   "events": {
//!     "events": [{"id": "e1", "pre": "true", "post": {"p": "true"}}],
//!     "relations": {"a": [["e1", "e1"]]}
//!   },
//!   "allowed": ["e1"],
//!   "goal": "K[a] p"
//! }
//! ```
//!
//! Missing `pre` means `true`, missing postconditions are the identity,
//! missing relations are empty. Formulas use the syntax of
//! [`crate::formula`]; pre- and postconditions must be propositional.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::del::{EpistemicModel, EventModel};
use crate::error::{Error, Result};
use crate::formula::{Formula, GoalFormula, Signature};
use crate::planner::PlanningInstance;

fn default_pre() -> String {
    "true".to_string()
}

fn is_default_pre(s: &str) -> bool {
    s == "true"
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldEntry {
    pub id: String,
    #[serde(default)]
    pub val: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub worlds: Vec<WorldEntry>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventEntry {
    pub id: String,
    #[serde(default = "default_pre", skip_serializing_if = "is_default_pre")]
    pub pre: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub post: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventSection {
    #[serde(default)]
    pub events: Vec<EventEntry>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<(String, String)>>,
}

/// The file as written, before cross-reference checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub agents: Vec<String>,
    pub ap: Vec<String>,
    pub model: ModelSection,
    #[serde(default)]
    pub events: EventSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<String>,
}

/// A validated scenario. Declaration order from the file is preserved and
/// drives every tie-break downstream.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub signature: Signature,
    pub model: EpistemicModel,
    pub events: EventModel,
    pub allowed: Vec<String>,
}

fn valid_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_ids<'a>(section: &str, ids: impl IntoIterator<Item = &'a String>) -> Result<()> {
    for (k, id) in ids.into_iter().enumerate() {
        if !valid_ident(id) {
            return Err(Error::schema(
                format!("{section}[{k}]"),
                format!("invalid identifier `{id}` (letters, digits and `_` only)"),
            ));
        }
    }
    Ok(())
}

fn at(path: String) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::Schema { .. } => e,
        other => Error::schema(path, other.to_string()),
    }
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| Error::schema("<json>", e.to_string()))?;
        Self::from_file(file)
    }

    pub fn from_file(file: ScenarioFile) -> Result<Self> {
        check_ids("agents", &file.agents)?;
        check_ids("ap", &file.ap)?;
        let signature =
            Signature::new(file.agents.clone(), file.ap.clone()).map_err(at("signature".into()))?;

        let worlds: Vec<String> = file.model.worlds.iter().map(|w| w.id.clone()).collect();
        check_ids("model.worlds", &worlds)?;
        let mut model = EpistemicModel::new(signature.clone(), worlds.clone())
            .map_err(at("model.worlds".into()))?;
        for (k, w) in file.model.worlds.iter().enumerate() {
            for (j, p) in w.val.iter().enumerate() {
                model
                    .set_true(&w.id, p)
                    .map_err(at(format!("model.worlds[{k}].val[{j}]")))?;
            }
        }
        for (agent, pairs) in &file.model.relations {
            signature
                .agent_index(agent)
                .map_err(at(format!("model.relations.{agent}")))?;
            for (k, (a, b)) in pairs.iter().enumerate() {
                model
                    .world_index(a)
                    .map_err(at(format!("model.relations.{agent}[{k}][0]")))?;
                model
                    .world_index(b)
                    .map_err(at(format!("model.relations.{agent}[{k}][1]")))?;
                model.add_edge(agent, a, b).expect("checked");
            }
        }
        if let Some(p) = &file.model.point {
            model.set_point(p).map_err(at("model.point".into()))?;
        }

        let events: Vec<String> = file.events.events.iter().map(|e| e.id.clone()).collect();
        check_ids("events.events", &events)?;
        if let Some(clash) = events.iter().find(|e| worlds.contains(e)) {
            return Err(Error::schema(
                "events.events",
                format!("`{clash}` is both a world and an event"),
            ));
        }
        let mut ev = EventModel::new(signature.clone(), events.clone())
            .map_err(at("events.events".into()))?;
        for (k, e) in file.events.events.iter().enumerate() {
            let path = format!("events.events[{k}].pre");
            let pre: Formula =
                crate::formula::parse_formula(&e.pre, &signature).map_err(at(path.clone()))?;
            if !pre.is_propositional() {
                return Err(Error::schema(
                    path,
                    format!("non-propositional precondition `{pre}`"),
                ));
            }
            ev.set_pre(&e.id, pre).expect("validated");
            for (p, text) in &e.post {
                let path = format!("events.events[{k}].post.{p}");
                signature.prop_index(p).map_err(at(path.clone()))?;
                let post =
                    crate::formula::parse_formula(text, &signature).map_err(at(path.clone()))?;
                if !post.is_propositional() {
                    return Err(Error::schema(
                        path,
                        format!("non-propositional postcondition `{post}`"),
                    ));
                }
                ev.set_post(&e.id, p, post).expect("validated");
            }
        }
        for (agent, pairs) in &file.events.relations {
            signature
                .agent_index(agent)
                .map_err(at(format!("events.relations.{agent}")))?;
            for (k, (a, b)) in pairs.iter().enumerate() {
                ev.event_index(a)
                    .map_err(at(format!("events.relations.{agent}[{k}][0]")))?;
                ev.event_index(b)
                    .map_err(at(format!("events.relations.{agent}[{k}][1]")))?;
                ev.add_edge(agent, a, b).expect("checked");
            }
        }

        let allowed = match &file.allowed {
            Some(list) => {
                for (k, e) in list.iter().enumerate() {
                    ev.event_index(e).map_err(at(format!("allowed[{k}]")))?;
                }
                list.clone()
            }
            None => events,
        };

        Ok(Scenario {
            file,
            signature,
            model,
            events: ev,
            allowed,
        })
    }

    /// Scenario file describing existing models, e.g. generated ones.
    pub fn from_models(m: &EpistemicModel, ev: &EventModel) -> Result<Self> {
        let sig = m.signature();
        let pairs = |succ: &dyn Fn(usize, usize) -> Vec<usize>, names: &[String], i: usize| {
            (0..names.len())
                .flat_map(|x| succ(i, x).into_iter().map(move |y| (x, y)))
                .map(|(x, y)| (names[x].clone(), names[y].clone()))
                .collect::<Vec<_>>()
        };
        let msucc = |i: usize, x: usize| m.successors(i, x).to_vec();
        let esucc = |i: usize, x: usize| ev.successors(i, x).to_vec();
        let file = ScenarioFile {
            agents: sig.agents().to_vec(),
            ap: sig.props().to_vec(),
            model: ModelSection {
                worlds: (0..m.num_worlds())
                    .map(|w| WorldEntry {
                        id: m.worlds()[w].clone(),
                        val: m
                            .valuation(w)
                            .iter()
                            .map(|&p| sig.props()[p].clone())
                            .collect(),
                    })
                    .collect(),
                relations: (0..sig.agents().len())
                    .map(|i| (sig.agents()[i].clone(), pairs(&msucc, m.worlds(), i)))
                    .collect(),
                point: m.point().map(|w| m.worlds()[w].clone()),
            },
            events: EventSection {
                events: (0..ev.num_events())
                    .map(|e| EventEntry {
                        id: ev.events()[e].clone(),
                        pre: ev.pre(e).to_string(),
                        post: (0..sig.props().len())
                            .filter(|&p| *ev.post(e, p) != Formula::atom(sig.props()[p].clone()))
                            .map(|p| (sig.props()[p].clone(), ev.post(e, p).to_string()))
                            .collect(),
                    })
                    .collect(),
                relations: (0..sig.agents().len())
                    .map(|i| (sig.agents()[i].clone(), pairs(&esucc, ev.events(), i)))
                    .collect(),
            },
            allowed: None,
            goal: None,
        };
        Self::from_file(file)
    }

    /// Canonical pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.file).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn point_name(&self) -> Result<&str> {
        self.file
            .model
            .point
            .as_deref()
            .ok_or_else(|| Error::schema("model.point", "a designated world is required"))
    }

    pub fn parse_formula(&self, text: &str) -> Result<Formula> {
        crate::formula::parse_formula(text, &self.signature)
    }

    pub fn parse_goal(&self, text: &str) -> Result<GoalFormula> {
        crate::formula::parse_goal(text, &self.signature)
    }

    /// Goal text from the argument, falling back to the file's `goal`.
    pub fn goal_text<'a>(&'a self, given: Option<&'a str>) -> Result<&'a str> {
        given.or(self.file.goal.as_deref()).ok_or_else(|| {
            Error::schema("goal", "no goal given on the command line or in the file")
        })
    }

    pub fn planning_instance(&self, goal: &Formula) -> Result<PlanningInstance> {
        let allowed: Vec<&str> = self.allowed.iter().map(String::as_str).collect();
        PlanningInstance::new(
            self.model.clone(),
            self.point_name()?,
            self.events.clone(),
            &allowed,
            goal.clone(),
        )
    }
}
