use std::collections::BTreeMap;

use glc_core::hyperblock::{rule_from_selection, rules_export, Hyperblock, Rect};
use glc_core::pipeline::{fit, induce, to_json, BlockSpec, FitSpec, FittedModel, RulesDocument, WorstCaseDocument};
use glc_core::worst_case::{manual_split, wcl_split, worst_case_report, WorstCaseReport, WorstCaseSplit};
use glc_core::{Dataset, GlcError, Result};
use serde::{Deserialize, Serialize};

pub const IRL_TAG: &str = "IRL";
const NO_MODEL: &str = "no model has been fitted in this session";

/// One state-changing request, as recorded in the undo log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum LogEntry {
    Fit(FitSpec),
    Threshold { t: f64 },
    Angle { index: usize, degrees: f64 },
    Selection { rect: Rect },
    Blocks(BlockSpec),
    Worstcase { cap: f64 },
    ManualSplit { indices: Vec<usize> },
}

/// Everything derived from the dataset by the logged edits.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SessionState {
    pub fitted: Option<FittedModel>,
    pub blocks: BTreeMap<String, Vec<Hyperblock>>,
    pub last_tag: Option<String>,
    pub split: Option<WorstCaseSplit>,
    pub report: Option<WorstCaseReport>,
}

impl SessionState {
    pub fn fitted(&self) -> Result<&FittedModel> {
        self.fitted
            .as_ref()
            .ok_or_else(|| GlcError::InvalidParameter(NO_MODEL.into()))
    }

    /// Applies `entry` and returns the JSON response for it. On error the
    /// state is left untouched.
    pub fn apply(&mut self, base: &Dataset, entry: &LogEntry) -> Result<String> {
        match entry {
            LogEntry::Fit(spec) => {
                let fitted = fit(base, spec)?;
                let doc = fitted.document(base)?;
                *self = SessionState {
                    fitted: Some(fitted),
                    ..Default::default()
                };
                to_json(&doc)
            }
            LogEntry::Threshold { t } => {
                let f = self.fitted()?;
                self.replace_model(f.with_model(f.model.with_threshold(*t)), base)
            }
            LogEntry::Angle { index, degrees } => {
                let f = self.fitted()?;
                let m = f.model.with_angle(*index, degrees.to_radians())?;
                self.replace_model(f.with_model(m), base)
            }
            LogEntry::Selection { rect } => {
                let f = self.fitted.as_ref().ok_or(GlcError::InvalidParameter(NO_MODEL.into()))?;
                let d = f.space(base);
                let (block, _) = rule_from_selection(d, &f.model, *rect)?;
                let list = self.blocks.entry(IRL_TAG.into()).or_default();
                list.push(block);
                let rule = rules_export(list, d).pop().expect("just pushed");
                self.last_tag = Some(IRL_TAG.into());
                to_json(&rule)
            }
            LogEntry::Blocks(spec) => {
                let (d, m) = match &self.fitted {
                    Some(f) => (f.space(base), Some(&f.model)),
                    None => (base, None),
                };
                let blocks = induce(d, m, spec)?;
                let doc = RulesDocument::new(spec.algo.tag(), d, &blocks);
                self.blocks.insert(spec.algo.tag().into(), blocks);
                self.last_tag = Some(spec.algo.tag().into());
                to_json(&doc)
            }
            LogEntry::Worstcase { cap } => {
                let f = self.fitted()?;
                let split = wcl_split(f.space(base), &f.model, *cap)?;
                self.set_split(split, base)
            }
            LogEntry::ManualSplit { indices } => {
                let f = self.fitted()?;
                let split = manual_split(f.space(base), &f.model, indices)?;
                self.set_split(split, base)
            }
        }
    }

    fn replace_model(&mut self, fitted: FittedModel, base: &Dataset) -> Result<String> {
        let doc = fitted.document(base)?;
        self.fitted = Some(fitted);
        self.split = None;
        self.report = None;
        to_json(&doc)
    }

    fn set_split(&mut self, split: WorstCaseSplit, base: &Dataset) -> Result<String> {
        let f = self.fitted()?;
        let report = worst_case_report(f.space(base), &f.model, &split)?;
        let doc = WorstCaseDocument { split, report };
        self.split = Some(doc.split.clone());
        self.report = Some(doc.report.clone());
        to_json(&doc)
    }

    pub fn worst_case_document(&self) -> Option<WorstCaseDocument> {
        Some(WorstCaseDocument {
            split: self.split.clone()?,
            report: self.report.clone()?,
        })
    }

    pub fn rules_document(&self, tag: &str, base: &Dataset) -> Option<RulesDocument> {
        let blocks = self.blocks.get(tag)?;
        let d = self.fitted.as_ref().map_or(base, |f| f.space(base));
        Some(RulesDocument::new(tag, d, blocks))
    }
}

/// Rebuilds a state from the dataset by applying every entry in order.
pub fn replay_log(base: &Dataset, log: &[LogEntry]) -> Result<SessionState> {
    let mut state = SessionState::default();
    for entry in log {
        let mut next = state.clone();
        next.apply(base, entry)?;
        state = next;
    }
    Ok(state)
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    /// The uploaded dataset after preprocessing.
    pub dataset: Dataset,
    pub state: SessionState,
    pub log: Vec<LogEntry>,
}

impl Session {
    pub fn new(id: String, dataset: Dataset) -> Self {
        Session {
            id,
            dataset,
            state: SessionState::default(),
            log: Vec::new(),
        }
    }

    /// Applies and logs `entry`; failed edits are neither applied nor logged.
    pub fn edit(&mut self, entry: LogEntry) -> Result<String> {
        let mut next = self.state.clone();
        let body = next.apply(&self.dataset, &entry)?;
        self.state = next;
        self.log.push(entry);
        Ok(body)
    }

    /// Drops the last edit and rebuilds the state without it.
    pub fn undo(&mut self) -> Result<Option<LogEntry>> {
        let Some(last) = self.log.pop() else {
            return Ok(None);
        };
        match replay_log(&self.dataset, &self.log) {
            Ok(state) => {
                self.state = state;
                Ok(Some(last))
            }
            Err(e) => {
                self.log.push(last);
                Err(e)
            }
        }
    }
}

/// A session serialized for later restoration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub dataset: Dataset,
    pub log: Vec<LogEntry>,
}
