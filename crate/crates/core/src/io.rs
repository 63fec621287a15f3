//! JSON formats for instances, partitions and oracle results.
//!
//! Euclidean instances: `{"k":…,"r":…,"dim":…,"colors":[[[x,…],…],…]}`.
//! Hyperboloid instances add `"model":"hyperboloid"`; `dim` is then the
//! hyperbolic dimension and each point carries `dim + 1` raw coordinates.

use serde::{Deserialize, Serialize};

use crate::config::{ColoredConfig, TransversalPartition};
use crate::error::{Error, Result};
use crate::hyperbolic::HyperConfig;
use crate::point::Point;

pub const HYPERBOLOID_MODEL: &str = "hyperboloid";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    pub k: usize,
    pub r: usize,
    pub dim: usize,
    pub colors: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Euclid(ColoredConfig),
    Hyper(HyperConfig),
}

impl Instance {
    /// The raw coordinates, on the hyperboloid for hyperbolic instances.
    pub fn raw(&self) -> &ColoredConfig {
        match self {
            Instance::Euclid(c) => c,
            Instance::Hyper(h) => h.raw(),
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, Instance::Hyper(_))
    }

    pub fn to_file(&self) -> InstanceFile {
        let raw = self.raw();
        let colors = raw.colors().iter().map(|c| c.iter().map(|p| p.coords().to_vec()).collect()).collect();
        match self {
            Instance::Euclid(c) => InstanceFile { model: None, k: c.k(), r: c.r(), dim: c.dim(), colors },
            Instance::Hyper(h) => {
                InstanceFile { model: Some(HYPERBOLOID_MODEL.into()), k: h.k(), r: h.r(), dim: h.dim(), colors }
            }
        }
    }

    pub fn from_file(file: InstanceFile) -> Result<Self> {
        let hyper = match file.model.as_deref() {
            None | Some("euclidean") => false,
            Some(HYPERBOLOID_MODEL) => true,
            Some(other) => return Err(Error::Parse(format!("unknown model '{other}'"))),
        };
        let colors = file
            .colors
            .into_iter()
            .map(|c| c.into_iter().map(Point::new).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let cfg = ColoredConfig::new(colors)?;
        let coord_dim = if hyper { file.dim + 1 } else { file.dim };
        if cfg.k() != file.k || cfg.r() != file.r || cfg.dim() != coord_dim {
            return Err(Error::Parse(format!(
                "header says k={}, r={}, dim={} but colors have k={}, r={}, {} coordinates",
                file.k,
                file.r,
                file.dim,
                cfg.k(),
                cfg.r(),
                cfg.dim()
            )));
        }
        if hyper {
            Ok(Instance::Hyper(HyperConfig::from_config(&cfg)?))
        } else {
            Ok(Instance::Euclid(cfg))
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PartitionFile {
    assignment: Vec<Vec<usize>>,
}

pub fn partition_from_json(s: &str) -> Result<TransversalPartition> {
    let file: PartitionFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    TransversalPartition::new(file.assignment)
}

pub fn partition_to_json(p: &TransversalPartition) -> String {
    serde_json::to_string_pretty(&PartitionFile { assignment: p.assignment.clone() }).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gen_gaussian, gen_hyperbolic};

    #[test]
    fn euclid_roundtrip() {
        let cfg = gen_gaussian(3, 2, 4, 9).unwrap();
        let inst = Instance::Euclid(cfg);
        let back = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
        assert!(!inst.to_json().contains("model"));
    }

    #[test]
    fn hyper_roundtrip() {
        let cfg = gen_hyperbolic(2, 3, 2, 1.0, 3).unwrap();
        let inst = Instance::Hyper(cfg);
        let json = inst.to_json();
        assert!(json.contains("\"hyperboloid\""));
        let back = Instance::from_json(&json).unwrap();
        assert_eq!(back.raw(), inst.raw());
        assert!(back.is_hyperbolic());
    }

    #[test]
    fn parses_documented_format() {
        let s = r#"{"k":2,"r":2,"dim":2,"colors":[[[0,0],[1,1]],[[1,0],[0,1]]]}"#;
        let inst = Instance::from_json(s).unwrap();
        assert_eq!(inst.raw().k(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        let wrong_dim = r#"{"k":2,"r":2,"dim":3,"colors":[[[0,0],[1,1]],[[1,0],[0,1]]]}"#;
        assert!(matches!(Instance::from_json(wrong_dim), Err(Error::Parse(_))));
        let off_sheet = r#"{"model":"hyperboloid","k":2,"r":2,"dim":1,"colors":[[[1,0],[2,0]],[[1,1],[1,2]]]}"#;
        assert!(matches!(Instance::from_json(off_sheet), Err(Error::NotOnHyperboloid(_))));
        assert!(Instance::from_json("{").is_err());
        let shared = r#"{"k":2,"r":2,"dim":1,"colors":[[[0],[1]],[[1],[2]]]}"#;
        assert!(matches!(Instance::from_json(shared), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn partition_roundtrip() {
        let p = TransversalPartition::new(vec![vec![0, 1, 2], vec![2, 0, 1]]).unwrap();
        assert_eq!(partition_from_json(&partition_to_json(&p)).unwrap(), p);
        assert!(partition_from_json(r#"{"assignment":[[0,0],[1,0]]}"#).is_err());
    }
}
