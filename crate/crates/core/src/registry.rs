//! Named registries of interchangeable strategies.
//!
//! Three algorithm families have more than one implementation: real-root
//! finders for the closest-product quintic, closest-product solvers and
//! geometric-discord evaluators. Each family is a trait; implementations
//! register under their [`Strategy::name`] and are picked at runtime by the
//! CLI (`--root-finder`) and by the oracle cross-checks.

use crate::closest::{ClosestProductSolver, MultiStartSimplex, QuinticSolver};
use crate::error::{Error, Result};
use crate::poly::{Bracketing, CompanionMatrix, RealRootFinder};
use crate::quantifiers::{
    DiscordEvaluator, KMatrixDiscord, MeasurementDiscord, XClosedFormDiscord,
};

/// Common surface of every registrable algorithm.
pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;
}

pub struct Registry<T: ?Sized + Strategy> {
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Strategy> Default for Registry<T> {
    fn default() -> Self {
        Self {
            entries: Vec::new(),
        }
    }
}

impl<T: ?Sized + Strategy> Registry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `strategy`, replacing any entry with the same name.
    pub fn register(&mut self, strategy: Box<T>) -> &mut Self {
        let name = strategy.name();
        match self.entries.iter().position(|e| e.name() == name) {
            Some(i) => self.entries[i] = strategy,
            None => self.entries.push(strategy),
        }
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|b| b.as_ref())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn root_finders() -> Registry<dyn RealRootFinder> {
    let mut r: Registry<dyn RealRootFinder> = Registry::new();
    r.register(Box::new(CompanionMatrix))
        .register(Box::new(Bracketing));
    r
}

/// Closest-product solvers; the analytic solver uses `finder`.
pub fn product_solvers(
    finder: Box<dyn RealRootFinder>,
    seed: u64,
) -> Registry<dyn ClosestProductSolver> {
    let mut r: Registry<dyn ClosestProductSolver> = Registry::new();
    r.register(Box::new(QuinticSolver::new(finder)))
        .register(Box::new(MultiStartSimplex::new(seed)));
    r
}

pub fn discord_evaluators() -> Registry<dyn DiscordEvaluator> {
    let mut r: Registry<dyn DiscordEvaluator> = Registry::new();
    r.register(Box::new(KMatrixDiscord))
        .register(Box::new(XClosedFormDiscord))
        .register(Box::new(MeasurementDiscord::default()));
    r
}

/// Looks up a root finder by name in the default registry.
pub fn root_finder(name: &str) -> Result<Box<dyn RealRootFinder>> {
    match name {
        "companion" => Ok(Box::new(CompanionMatrix)),
        "bracketing" => Ok(Box::new(Bracketing)),
        other => Err(Error::UnknownStrategy {
            name: other.to_string(),
            available: root_finders().names().join(", "),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_registries() {
        assert_eq!(root_finders().names(), vec!["companion", "bracketing"]);
        assert_eq!(
            product_solvers(Box::new(CompanionMatrix), 1).names(),
            vec!["quintic", "simplex"]
        );
        assert_eq!(
            discord_evaluators().names(),
            vec!["k-matrix", "x-closed-form", "measurement"]
        );
    }

    #[test]
    fn lookup_and_replace() {
        let mut r = root_finders();
        assert_eq!(r.get("bracketing").unwrap().name(), "bracketing");
        match r.get("newton") {
            Err(Error::UnknownStrategy { available, .. }) => {
                assert_eq!(available, "companion, bracketing")
            }
            _ => panic!("expected UnknownStrategy"),
        }
        r.register(Box::new(CompanionMatrix));
        assert_eq!(r.len(), 2);
        assert!(root_finder("companion").is_ok());
        assert!(root_finder("secant").is_err());
    }
}
