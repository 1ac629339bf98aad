use std::collections::BTreeMap;

use super::{baseline_elm, baseline_im, train_ae, train_dae, train_edae, EdaeVariant, ModelKind, TrainConfig, TrainedModel};
use crate::error::{Error, Result};
use crate::series::{CorruptedSeries, TimeSeries};

/// What a method may learn from: a clean training series and a corrupted
/// copy of it. Each method reads the part its training procedure needs.
#[derive(Debug, Clone, Copy)]
pub struct TrainingData<'a> {
    pub clean: &'a TimeSeries,
    pub corrupted: &'a CorruptedSeries,
}

pub trait Method: Send + Sync {
    fn kind(&self) -> ModelKind;

    fn name(&self) -> &str {
        self.kind().name()
    }

    fn fit(&self, data: TrainingData<'_>, cfg: &TrainConfig) -> Result<TrainedModel>;
}

struct Ae;
struct Dae;
struct Edae(EdaeVariant);
struct Im;
struct Elm;

impl Method for Ae {
    fn kind(&self) -> ModelKind {
        ModelKind::Ae
    }

    fn fit(&self, data: TrainingData<'_>, cfg: &TrainConfig) -> Result<TrainedModel> {
        train_ae(data.corrupted, cfg)
    }
}

impl Method for Dae {
    fn kind(&self) -> ModelKind {
        ModelKind::Dae
    }

    fn fit(&self, data: TrainingData<'_>, cfg: &TrainConfig) -> Result<TrainedModel> {
        train_dae(data.clean, cfg)
    }
}

impl Method for Edae {
    fn kind(&self) -> ModelKind {
        match self.0 {
            EdaeVariant::Nn => ModelKind::EdaeNn,
            EdaeVariant::Lstm => ModelKind::EdaeLstm,
        }
    }

    fn fit(&self, data: TrainingData<'_>, cfg: &TrainConfig) -> Result<TrainedModel> {
        train_edae(data.clean, cfg, self.0)
    }
}

impl Method for Im {
    fn kind(&self) -> ModelKind {
        ModelKind::Im
    }

    fn fit(&self, data: TrainingData<'_>, _cfg: &TrainConfig) -> Result<TrainedModel> {
        baseline_im(data.corrupted)
    }
}

impl Method for Elm {
    fn kind(&self) -> ModelKind {
        ModelKind::Elm
    }

    fn fit(&self, data: TrainingData<'_>, cfg: &TrainConfig) -> Result<TrainedModel> {
        baseline_elm(data.clean, cfg)
    }
}

/// Methods looked up by name at run time.
#[derive(Default)]
pub struct MethodRegistry {
    methods: BTreeMap<String, Box<dyn Method>>,
}

impl MethodRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every built-in method under its canonical name.
    pub fn builtin() -> Self {
        let mut r = Self::new();
        let all: [Box<dyn Method>; 6] = [
            Box::new(Ae),
            Box::new(Dae),
            Box::new(Edae(EdaeVariant::Nn)),
            Box::new(Edae(EdaeVariant::Lstm)),
            Box::new(Im),
            Box::new(Elm),
        ];
        for m in all {
            r.register(m).expect("builtin names are distinct");
        }
        r
    }

    pub fn register(&mut self, method: Box<dyn Method>) -> Result<()> {
        let key = method.name().to_ascii_uppercase();
        if self.methods.contains_key(&key) {
            return Err(Error::InvalidArgument(format!("method {key} is already registered")));
        }
        self.methods.insert(key, method);
        Ok(())
    }

    /// Case-insensitive lookup.
    pub fn get(&self, name: &str) -> Result<&dyn Method> {
        self.methods
            .get(&name.to_ascii_uppercase())
            .map(|m| m.as_ref())
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown method {name:?}; registered: {}",
                    self.names().collect::<Vec<_>>().join(", ")
                ))
            })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.methods.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_covers_every_kind() {
        let r = MethodRegistry::builtin();
        for k in ModelKind::ALL {
            assert_eq!(r.get(k.name()).unwrap().kind(), k);
        }
        assert_eq!(r.get("edae_lstm").unwrap().kind(), ModelKind::EdaeLstm);
        assert!(r.get("PCA").is_err());
    }

    #[test]
    fn duplicate_registration_rejected() {
        let mut r = MethodRegistry::builtin();
        assert!(r.register(Box::new(Im)).is_err());
    }
}
