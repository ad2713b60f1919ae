//! Benchmark instances and their JSON documents.

use mpai_core::problems::rng::{RNG_NAME, RNG_VERSION};
use mpai_core::problems::{
    FtsOracle, FtsProblem, FtsVariant, GameOracle, MatrixGame, PayoffDistribution,
};
use mpai_core::{Oracle, ProxSetup};
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    /// Zero-mean normal `n × m` matrix game on `Δₙ × Δₘ`.
    Game,
    /// FTS with distances to unit balls, `‖A_k‖ ∈ [1, 2]`.
    Fts,
    /// FTS with distances to integer points in `[−10, 10]ⁿ`.
    FtsPoints,
    /// FTS with distances to points in the unit ball.
    FtsUnitball,
}

impl ProblemKind {
    pub fn generator(self) -> &'static str {
        match self {
            ProblemKind::Game => "matrix_game_standard_normal",
            ProblemKind::Fts => "fts_ball_distances",
            ProblemKind::FtsPoints => "fts_point_distances",
            ProblemKind::FtsUnitball => "fts_unit_ball_points",
        }
    }

    pub fn from_generator(name: &str) -> Option<Self> {
        [
            ProblemKind::Game,
            ProblemKind::Fts,
            ProblemKind::FtsPoints,
            ProblemKind::FtsUnitball,
        ]
        .into_iter()
        .find(|k| k.generator() == name)
    }

    fn fts_variant(self) -> Option<FtsVariant> {
        match self {
            ProblemKind::Game => None,
            ProblemKind::Fts => Some(FtsVariant::BallDistances),
            ProblemKind::FtsPoints => Some(FtsVariant::PointDistances),
            ProblemKind::FtsUnitball => Some(FtsVariant::UnitBallPoints),
        }
    }
}

/// Generator used for instances given by explicit data rather than a seed.
pub const EXPLICIT_GAME: &str = "matrix_game";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngInfo {
    pub name: String,
    pub version: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceParams {
    /// Rows of `A` for games, number of variables for FTS.
    pub n: usize,
    /// Columns of `A` for games, number of constraints for FTS.
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Matrices {
    Game {
        payoff: Vec<f64>,
    },
    Fts {
        variant: FtsVariant,
        centers: Vec<f64>,
        radii: Vec<f64>,
        alpha: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub generator: String,
    pub rng: RngInfo,
    pub params: InstanceParams,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Matrices>,
}

impl InstanceDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Game(MatrixGame),
    Fts(FtsProblem),
}

impl Instance {
    pub fn generate(
        kind: ProblemKind,
        n: usize,
        m: usize,
        centers: usize,
        seed: u64,
    ) -> Result<Self> {
        Ok(match kind.fts_variant() {
            None => Instance::Game(MatrixGame::generate(
                n,
                m,
                PayoffDistribution::StandardNormal,
                seed,
            )?),
            Some(variant) => Instance::Fts(FtsProblem::generate(variant, n, m, centers, seed)?),
        })
    }

    /// Rebuilds the instance, preferring materialized matrices over the seed.
    pub fn from_document(doc: &InstanceDocument) -> Result<Self> {
        if doc.rng.name != RNG_NAME || doc.rng.version != RNG_VERSION {
            return Err(HarnessError::Invalid(format!(
                "instance was generated with {} v{}, this build has {RNG_NAME} v{RNG_VERSION}",
                doc.rng.name, doc.rng.version
            )));
        }
        let p = &doc.params;
        match &doc.matrices {
            Some(Matrices::Game { payoff }) => {
                Ok(Instance::Game(MatrixGame::new(p.n, p.m, payoff.clone())?))
            }
            Some(Matrices::Fts {
                variant,
                centers,
                radii,
                alpha,
            }) => {
                let fts =
                    FtsProblem::new(*variant, p.n, centers.clone(), radii.clone(), alpha.clone())?;
                if fts.num_constraints() != p.m {
                    return Err(HarnessError::Invalid(
                        "constraint matrix does not have m rows".into(),
                    ));
                }
                Ok(Instance::Fts(fts))
            }
            None => {
                let kind = ProblemKind::from_generator(&doc.generator).ok_or_else(|| {
                    HarnessError::Invalid(format!("unknown generator `{}`", doc.generator))
                })?;
                let seed = doc.seed.ok_or_else(|| {
                    HarnessError::Invalid("instance has neither matrices nor a seed".into())
                })?;
                let centers = match kind {
                    ProblemKind::Game => 0,
                    _ => p.centers.ok_or_else(|| {
                        HarnessError::Invalid("FTS instance needs `centers`".into())
                    })?,
                };
                Instance::generate(kind, p.n, p.m, centers, seed)
            }
        }
    }

    pub fn to_document(&self, materialize: bool) -> InstanceDocument {
        let (generator, params, seed, matrices) = match self {
            Instance::Game(g) => (
                if g.seed().is_some() {
                    ProblemKind::Game.generator()
                } else {
                    EXPLICIT_GAME
                },
                InstanceParams {
                    n: g.rows(),
                    m: g.cols(),
                    centers: None,
                },
                g.seed(),
                Matrices::Game {
                    payoff: g.payoff().to_vec(),
                },
            ),
            Instance::Fts(f) => {
                let kind = match f.variant() {
                    FtsVariant::BallDistances => ProblemKind::Fts,
                    FtsVariant::PointDistances => ProblemKind::FtsPoints,
                    FtsVariant::UnitBallPoints => ProblemKind::FtsUnitball,
                };
                (
                    kind.generator(),
                    InstanceParams {
                        n: f.dim(),
                        m: f.num_constraints(),
                        centers: Some(f.num_centers()),
                    },
                    f.seed(),
                    Matrices::Fts {
                        variant: f.variant(),
                        centers: f.centers().to_vec(),
                        radii: f.radii().to_vec(),
                        alpha: f.constraint_matrix().to_vec(),
                    },
                )
            }
        };
        InstanceDocument {
            generator: generator.to_string(),
            rng: RngInfo {
                name: RNG_NAME.to_string(),
                version: RNG_VERSION,
            },
            params,
            seed,
            matrices: (materialize || seed.is_none()).then_some(matrices),
        }
    }

    pub fn setup(&self) -> ProxSetup {
        match self {
            Instance::Game(g) => g.setup(),
            Instance::Fts(f) => f.setup(),
        }
    }

    pub fn oracle(&self) -> InstanceOracle<'_> {
        match self {
            Instance::Game(g) => InstanceOracle::Game(g.oracle()),
            Instance::Fts(f) => InstanceOracle::Fts(f.oracle()),
        }
    }

    /// Duality gap of a stacked `(x, y)`; games only.
    pub fn exact_gap(&self, u: &[f64]) -> Option<f64> {
        match self {
            Instance::Game(g) => Some(g.exact_gap_stacked(u)),
            Instance::Fts(_) => None,
        }
    }

    /// `max|A_ij|`; games only.
    pub fn payoff_scale(&self) -> Option<f64> {
        match self {
            Instance::Game(g) => Some(g.max_abs_entry()),
            Instance::Fts(_) => None,
        }
    }

    pub fn sphere_start(&self) -> Option<Vec<f64>> {
        match self {
            Instance::Game(_) => None,
            Instance::Fts(f) => Some(f.sphere_start()),
        }
    }
}

#[derive(Debug)]
pub enum InstanceOracle<'a> {
    Game(GameOracle<'a>),
    Fts(FtsOracle<'a>),
}

impl Oracle for InstanceOracle<'_> {
    fn dim(&self) -> usize {
        match self {
            InstanceOracle::Game(o) => o.dim(),
            InstanceOracle::Fts(o) => o.dim(),
        }
    }

    fn eval(&mut self, u: &[f64], out: &mut [f64]) -> mpai_core::Result<()> {
        match self {
            InstanceOracle::Game(o) => o.eval(u, out),
            InstanceOracle::Fts(o) => o.eval(u, out),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_documents_round_trip() {
        for kind in [
            ProblemKind::Game,
            ProblemKind::Fts,
            ProblemKind::FtsPoints,
            ProblemKind::FtsUnitball,
        ] {
            let inst = Instance::generate(kind, 6, 3, 4, u64::MAX - 7).unwrap();
            for materialize in [false, true] {
                let doc = inst.to_document(materialize);
                let back = InstanceDocument::from_json(&doc.to_json().unwrap()).unwrap();
                assert_eq!(back, doc);
                let rebuilt = Instance::from_document(&back).unwrap();
                assert_eq!(rebuilt.setup(), inst.setup());
                assert_eq!(
                    rebuilt.to_document(true).matrices,
                    inst.to_document(true).matrices
                );
            }
        }
    }

    #[test]
    fn explicit_game_keeps_its_matrix() {
        let inst = Instance::Game(MatrixGame::new(2, 2, vec![1.0, -1.0, -1.0, 1.0]).unwrap());
        let doc = inst.to_document(false);
        assert_eq!(doc.generator, EXPLICIT_GAME);
        assert!(doc.matrices.is_some());
        assert_eq!(Instance::from_document(&doc).unwrap(), inst);
    }

    #[test]
    fn foreign_rng_is_refused() {
        let mut doc = Instance::generate(ProblemKind::Game, 2, 2, 0, 1)
            .unwrap()
            .to_document(false);
        doc.rng.version += 1;
        assert!(Instance::from_document(&doc).is_err());
    }
}
