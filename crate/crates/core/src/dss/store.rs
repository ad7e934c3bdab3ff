use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use super::{valid_case_id, DssError, Event, Observation, PatientCase, Suggestions};
use crate::kb::KnowledgeBase;
use crate::rules::{explain, Bindings, ExplainError, InferenceResult};
use crate::store::Triple;

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> DssError + '_ {
    move |source| DssError::Io { path: path.display().to_string(), source }
}

fn encode(events: &[Event]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("events serialize"));
        out.push('\n');
    }
    out
}

/// A case read back from disk, with notes about a discarded partial tail.
#[derive(Debug, Clone)]
pub struct LoadedCase {
    pub case: PatientCase,
    pub warnings: Vec<String>,
}

/// One append-only JSON-lines log per case, named `<case id>.log`.
#[derive(Debug, Clone)]
pub struct CaseStore {
    root: PathBuf,
}

impl CaseStore {
    pub fn open(root: &Path) -> Result<CaseStore, DssError> {
        fs::create_dir_all(root).map_err(io(root))?;
        Ok(CaseStore { root: root.to_path_buf() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, id: &str) -> Result<PathBuf, DssError> {
        if !valid_case_id(id) {
            return Err(DssError::InvalidId(id.to_string()));
        }
        Ok(self.root.join(format!("{id}.log")))
    }

    pub fn exists(&self, id: &str) -> bool {
        self.path(id).is_ok_and(|p| p.is_file())
    }

    /// Writes a new case's log; fails if the case already exists.
    pub fn create(&self, case: &PatientCase) -> Result<(), DssError> {
        let path = self.path(&case.id)?;
        let mut file = match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(file) => file,
            Err(e) if e.kind() == ErrorKind::AlreadyExists => return Err(DssError::DuplicateCase(case.id.clone())),
            Err(e) => return Err(io(&path)(e)),
        };
        file.write_all(encode(case.events()).as_bytes()).map_err(io(&path))?;
        file.sync_data().map_err(io(&path))
    }

    /// Appends events to an existing log.
    pub fn append(&self, id: &str, events: &[Event]) -> Result<(), DssError> {
        let path = self.path(id)?;
        let mut file = match OpenOptions::new().append(true).open(&path) {
            Ok(file) => file,
            Err(e) if e.kind() == ErrorKind::NotFound => return Err(DssError::NotFound(id.to_string())),
            Err(e) => return Err(io(&path)(e)),
        };
        file.write_all(encode(events).as_bytes()).map_err(io(&path))?;
        file.sync_data().map_err(io(&path))
    }

    /// Replaces a case's log with its full event list.
    pub fn save(&self, case: &PatientCase) -> Result<(), DssError> {
        let path = self.path(&case.id)?;
        let tmp = path.with_extension("log.tmp");
        {
            let mut file = File::create(&tmp).map_err(io(&tmp))?;
            file.write_all(encode(case.events()).as_bytes()).map_err(io(&tmp))?;
            file.sync_data().map_err(io(&tmp))?;
        }
        fs::rename(&tmp, &path).map_err(io(&path))
    }

    /// Reads and replays a case. A final line without its newline that does
    /// not parse is an interrupted append: it is dropped with a warning. Any
    /// other unreadable line is reported by its sequence number.
    pub fn load(&self, id: &str) -> Result<LoadedCase, DssError> {
        let path = self.path(id)?;
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == ErrorKind::NotFound => return Err(DssError::NotFound(id.to_string())),
            Err(e) => return Err(io(&path)(e)),
        };
        let complete_tail = text.ends_with('\n');
        let lines: Vec<&str> = text.lines().collect();
        let mut events = Vec::with_capacity(lines.len());
        let mut warnings = Vec::new();
        for (i, line) in lines.iter().enumerate() {
            match serde_json::from_str::<Event>(line) {
                Ok(e) => events.push(e),
                Err(_) if i + 1 == lines.len() && !complete_tail => {
                    warnings.push(format!("dropped a partial final record after event {}", events.len()));
                }
                Err(e) => {
                    return Err(DssError::Corrupt { case: id.to_string(), seq: i as u64 + 1, message: e.to_string() })
                }
            }
        }
        Ok(LoadedCase { case: PatientCase::replay(id, events)?, warnings })
    }

    /// Ids of every stored case, sorted.
    pub fn list(&self) -> Result<Vec<String>, DssError> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(&self.root).map_err(io(&self.root))? {
            let path = entry.map_err(io(&self.root))?.path();
            if path.extension().is_some_and(|e| e == "log") {
                if let Some(stem) = path.file_stem() {
                    ids.push(stem.to_string_lossy().into_owned());
                }
            }
        }
        ids.sort();
        Ok(ids)
    }
}

/// Rule id, rule text and bindings for each derivation of a fact.
pub type Derivations = Vec<(String, String, Bindings)>;

/// Serializes commands per case over a shared read-only knowledge base.
/// Each command works on a copy and commits it only once its new events are
/// on disk, so a failed write leaves the in-memory case unchanged.
#[derive(Debug)]
pub struct CaseManager {
    kb: Arc<KnowledgeBase>,
    store: CaseStore,
    cases: Mutex<HashMap<String, Arc<Mutex<PatientCase>>>>,
}

impl CaseManager {
    pub fn new(kb: Arc<KnowledgeBase>, store: CaseStore) -> CaseManager {
        CaseManager { kb, store, cases: Mutex::new(HashMap::new()) }
    }

    pub fn kb(&self) -> &Arc<KnowledgeBase> {
        &self.kb
    }

    pub fn store(&self) -> &CaseStore {
        &self.store
    }

    fn handle(&self, id: &str) -> Result<Arc<Mutex<PatientCase>>, DssError> {
        let mut cases = self.cases.lock().expect("case table lock");
        if let Some(h) = cases.get(id) {
            return Ok(h.clone());
        }
        let loaded = self.store.load(id)?;
        let h = Arc::new(Mutex::new(loaded.case));
        cases.insert(id.to_string(), h.clone());
        Ok(h)
    }

    pub fn create(
        &self,
        id: &str,
        patient: Option<&str>,
        demographics: &[Observation],
    ) -> Result<PatientCase, DssError> {
        let case = PatientCase::create(&self.kb, id, patient, demographics)?;
        let mut cases = self.cases.lock().expect("case table lock");
        if cases.contains_key(id) {
            return Err(DssError::DuplicateCase(id.to_string()));
        }
        self.store.create(&case)?;
        cases.insert(id.to_string(), Arc::new(Mutex::new(case.clone())));
        Ok(case)
    }

    /// Runs `command` on a copy of the case, persists the events it added,
    /// then commits the copy.
    fn update<R>(
        &self,
        id: &str,
        command: impl FnOnce(&mut PatientCase) -> Result<R, DssError>,
    ) -> Result<R, DssError> {
        let h = self.handle(id)?;
        let mut guard = h.lock().expect("case lock");
        let mut next = guard.clone();
        let before = next.events().len();
        let out = command(&mut next)?;
        self.store.append(id, &next.events()[before..])?;
        *guard = next;
        Ok(out)
    }

    pub fn assert(&self, id: &str, observation: &Observation) -> Result<Event, DssError> {
        let kb = self.kb.clone();
        self.update(id, |c| c.assert_observation(&kb, observation).cloned())
    }

    pub fn retract(&self, id: &str, seq: u64) -> Result<Event, DssError> {
        self.update(id, |c| c.retract(seq).cloned())
    }

    /// Runs inference and returns the suggestions with the full result.
    pub fn infer(&self, id: &str) -> Result<(Suggestions, Arc<InferenceResult>), DssError> {
        let kb = self.kb.clone();
        self.update(id, |c| {
            let suggestions = c.run_inference(&kb).clone();
            Ok((suggestions, c.last_inference().expect("just inferred").clone()))
        })
    }

    /// A snapshot of the case.
    pub fn get(&self, id: &str) -> Result<PatientCase, DssError> {
        let h = self.handle(id)?;
        let case = h.lock().expect("case lock").clone();
        Ok(case)
    }

    /// Rules and bindings deriving `fact`, from the latest inference, or from
    /// a fresh one that is not logged when the case has not been inferred.
    pub fn explain(&self, id: &str, fact: &Triple) -> Result<Result<Derivations, ExplainError>, DssError> {
        let case = self.get(id)?;
        let result = match case.last_inference() {
            Some(r) => r.clone(),
            None => Arc::new(case.infer(&self.kb)),
        };
        Ok(explain(&result, fact).map(|pairs| {
            pairs.into_iter().map(|(rule, bindings)| (rule.id.clone(), rule.text.clone(), bindings.clone())).collect()
        }))
    }

    pub fn list(&self) -> Result<Vec<String>, DssError> {
        self.store.list()
    }
}
