//! Loaded curves and cycle sets, keyed by content hash.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use periodlab::algcurve::{genus_from, BranchPointSet, MonodromyData};
use periodlab::homology::{validate_cycle, CycleValidation, LiftedBasis};
use periodlab::klein::ModelId;
use periodlab::{CycleFile, PlaneCurve};
use sha2::{Digest, Sha256};

use crate::error::ApiError;

fn digest(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    h.finalize()[..12].iter().map(|b| format!("{b:02x}")).collect()
}

fn point_key(c: periodlab::Complex64) -> String {
    format!("{:e},{:e}", c.re, c.im)
}

/// Content hash of a curve: term map, base point and sheet labels.
pub fn curve_id(curve: &PlaneCurve) -> String {
    let labels: Vec<String> = curve.labels().iter().map(|&l| point_key(l)).collect();
    let id =
        digest(&[curve.polynomial().canonical_string().as_str(), &point_key(curve.base_point()), &labels.join(";")]);
    format!("c-{id}")
}

pub struct CurveEntry {
    pub id: String,
    /// Klein model name or polynomial text as supplied.
    pub source: String,
    pub model: Option<ModelId>,
    pub curve: PlaneCurve,
    monodromy: OnceLock<Result<MonodromyData, ApiError>>,
    branch_points: OnceLock<Result<BranchPointSet, ApiError>>,
}

impl CurveEntry {
    pub fn new(source: &str, curve: PlaneCurve) -> Self {
        Self {
            id: curve_id(&curve),
            source: source.to_string(),
            model: source.parse().ok(),
            curve,
            monodromy: OnceLock::new(),
            branch_points: OnceLock::new(),
        }
    }

    pub fn monodromy(&self) -> Result<&MonodromyData, ApiError> {
        self.monodromy
            .get_or_init(|| self.curve.monodromy_data().map_err(ApiError::from))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn branch_points(&self) -> Result<&BranchPointSet, ApiError> {
        self.branch_points
            .get_or_init(|| self.curve.branch_points().map_err(ApiError::from))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Genus from the cached monodromy.
    pub fn genus(&self) -> Result<usize, ApiError> {
        Ok(genus_from(self.monodromy()?, self.curve.sheet_count())?)
    }
}

pub struct CycleSetEntry {
    pub id: String,
    pub curve: Arc<CurveEntry>,
    pub file: CycleFile,
    lifted: OnceLock<Result<LiftedBasis, ApiError>>,
}

impl CycleSetEntry {
    pub fn validations(&self) -> Vec<CycleValidation> {
        self.file.cycles.iter().map(|c| validate_cycle(&self.curve.curve, c)).collect()
    }

    /// Every cycle must validate; the first failure is reported.
    pub fn ensure_valid(&self) -> Result<(), ApiError> {
        match self.validations().iter().find(|v| !v.valid) {
            Some(v) => Err(ApiError::invalid_cycle(v)),
            None => Ok(()),
        }
    }

    pub fn cycle(&self, name: &str) -> Result<&periodlab::homology::SurfaceCycle, ApiError> {
        self.file.cycle(name).ok_or_else(|| {
            ApiError::bad_request("unknown_cycle", format!("no cycle named {name:?} in set {}", self.id))
        })
    }

    /// The set as a lifted `a`/`b` basis.
    pub fn lifted(&self) -> Result<&LiftedBasis, ApiError> {
        self.lifted
            .get_or_init(|| {
                self.ensure_valid()?;
                let basis = self.file.basis()?;
                Ok(LiftedBasis::lift(&self.curve.curve, &basis)?)
            })
            .as_ref()
            .map_err(Clone::clone)
    }
}

/// Everything the service has loaded. Reads run concurrently; inserts take
/// the write lock only to swap in a finished entry.
#[derive(Default)]
pub struct Session {
    curves: RwLock<HashMap<String, Arc<CurveEntry>>>,
    cycle_sets: RwLock<HashMap<String, Arc<CycleSetEntry>>>,
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    /// Load or reload a curve. Reloading replaces the entry and its caches.
    pub fn load_curve(&self, source: &str, curve: PlaneCurve) -> Arc<CurveEntry> {
        let entry = Arc::new(CurveEntry::new(source, curve));
        self.curves.write().expect("curve map").insert(entry.id.clone(), entry.clone());
        entry
    }

    /// Existing entry with the same content, or a new one.
    pub fn intern_curve(&self, source: &str, curve: PlaneCurve) -> Arc<CurveEntry> {
        let id = curve_id(&curve);
        if let Some(e) = self.curves.read().expect("curve map").get(&id) {
            return e.clone();
        }
        let entry = Arc::new(CurveEntry::new(source, curve));
        self.curves.write().expect("curve map").entry(id).or_insert(entry).clone()
    }

    pub fn curve(&self, id: &str) -> Result<Arc<CurveEntry>, ApiError> {
        self.curves
            .read()
            .expect("curve map")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::bad_request("unknown_curve", format!("no curve with id {id:?}")))
    }

    pub fn load_cycles(&self, file: CycleFile) -> Result<Arc<CycleSetEntry>, ApiError> {
        let curve = self.intern_curve(&file.curve, file.plane_curve()?);
        let cycles = serde_json::to_string(&file.cycles).map_err(|e| ApiError::internal(e.to_string()))?;
        let id = format!("s-{}", digest(&[curve.id.as_str(), &cycles]));
        if let Some(e) = self.cycle_sets.read().expect("cycle map").get(&id) {
            return Ok(e.clone());
        }
        let entry = Arc::new(CycleSetEntry { id: id.clone(), curve, file, lifted: OnceLock::new() });
        Ok(self.cycle_sets.write().expect("cycle map").entry(id).or_insert(entry).clone())
    }

    pub fn cycles(&self, id: &str) -> Result<Arc<CycleSetEntry>, ApiError> {
        self.cycle_sets
            .read()
            .expect("cycle map")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::bad_request("unknown_cycle_set", format!("no cycle set with id {id:?}")))
    }
}
