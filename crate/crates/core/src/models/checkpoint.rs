use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::Vocabularies;
use crate::numcore::ParamStore;
use crate::pruning::DistanceTupleTable;

use super::{Labels, ModelConfig, ModelError, SrlModel};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sidecar {
    config: ModelConfig,
    vocabs: Vocabularies,
    labels: Labels,
    rule: Option<DistanceTupleTable>,
}

/// `<checkpoint>.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

impl SrlModel {
    /// Writes the parameters to `path` and config, vocabularies, labels and
    /// rule table to the JSON sidecar next to it.
    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.store.write_checkpoint(&mut w)?;
        w.flush()?;
        let side = Sidecar {
            config: self.cfg.clone(),
            vocabs: self.vocabs.clone(),
            labels: self.labels.clone(),
            rule: self.rule.clone(),
        };
        std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&side)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let side: Sidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;
        let mut model = SrlModel::from_parts(side.config, side.vocabs, side.labels, side.rule, None)?;
        let tensors = ParamStore::read_checkpoint(BufReader::new(File::open(path)?))?;
        model.store.load_values(tensors)?;
        Ok(model)
    }
}
