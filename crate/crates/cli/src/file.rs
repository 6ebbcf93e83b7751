//! JSON instance files.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use schelling_core::instances::{no_equilibrium_tree_game, poa_lb_game, pos_game, seven_type_grid_example, NamedInstance};
use schelling_core::rational::{format_rational, parse_rational};
use schelling_core::topology::{build_graph, grid, standard_graph, GraphKind};
use schelling_core::{standard_tolerance, Assignment, GameInstance, NodeId, Rational, Topology, ToleranceKind, ToleranceVector};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    pub topology: TopologySource,
    pub game: GameSection,
    #[serde(default)]
    pub assignments: BTreeMap<String, Vec<(NodeId, u8)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TopologySource {
    Explicit { node_count: usize, edges: Vec<(NodeId, NodeId)> },
    Grid { rows: usize, cols: usize },
    Path { nodes: usize },
    Cycle { nodes: usize },
    Clique { nodes: usize },
    Star { nodes: usize },
    /// The graph of a generated instance.
    Named { instance: String, #[serde(default)] params: NamedParams },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NamedParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<RationalText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<Vec<RationalText>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSection {
    pub lambda: usize,
    pub agents_per_type: usize,
    pub tolerance: ToleranceSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ToleranceSource {
    Values(Vec<RationalText>),
    Family { kind: String, #[serde(default, skip_serializing_if = "Option::is_none")] alpha: Option<usize> },
}

/// A rational written as `"p/q"`, or a bare integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Text(String),
    Int(i64),
}

impl RationalText {
    pub fn value(&self) -> Result<Rational, CliError> {
        match self {
            RationalText::Text(s) => Ok(parse_rational(s)?),
            RationalText::Int(i) => Ok(Rational::from_integer(*i as i128)),
        }
    }
}

impl From<Rational> for RationalText {
    fn from(r: Rational) -> Self {
        RationalText::Text(format_rational(&r))
    }
}

pub fn parse_tolerance_kind(kind: &str) -> Result<ToleranceKind, CliError> {
    match kind.replace('_', "-").as_str() {
        "zero" => Ok(ToleranceKind::Zero),
        "alpha-binary" | "binary" => Ok(ToleranceKind::AlphaBinary),
        "proportional" => Ok(ToleranceKind::Proportional),
        "inverse-proportional" | "inverse" => Ok(ToleranceKind::InverseProportional),
        other => Err(CliError::Usage(format!("unknown tolerance kind {other:?}"))),
    }
}

/// Parses a comma-separated list such as `1,1/2,0`.
pub fn parse_tolerance_list(text: &str) -> Result<ToleranceVector, CliError> {
    let values = text.split(',').map(parse_rational).collect::<Result<Vec<_>, _>>()?;
    Ok(ToleranceVector::new(values)?)
}

impl ToleranceSource {
    pub fn resolve(&self, lambda: usize) -> Result<ToleranceVector, CliError> {
        match self {
            ToleranceSource::Values(values) => {
                let values = values.iter().map(RationalText::value).collect::<Result<Vec<_>, _>>()?;
                Ok(ToleranceVector::new(values)?)
            }
            ToleranceSource::Family { kind, alpha } => Ok(standard_tolerance(parse_tolerance_kind(kind)?, lambda, *alpha)?),
        }
    }

    pub fn explicit(tv: &ToleranceVector) -> Self {
        ToleranceSource::Values(tv.values().iter().map(|&r| r.into()).collect())
    }
}

impl NamedParams {
    fn tolerance(&self) -> Result<Option<ToleranceVector>, CliError> {
        self.tolerance
            .as_ref()
            .map(|values| {
                let values = values.iter().map(RationalText::value).collect::<Result<Vec<_>, _>>()?;
                Ok(ToleranceVector::new(values)?)
            })
            .transpose()
    }
}

/// Builds one of the generated instances by name.
pub fn named_instance(name: &str, params: &NamedParams) -> Result<NamedInstance, CliError> {
    let need = |value: Option<usize>, what: &str| value.ok_or_else(|| CliError::Usage(format!("{name} needs --{what}")));
    let tolerance = params.tolerance()?;
    let inst = match name {
        "no-eq-tree" => {
            let lambda = params.lambda.unwrap_or(2);
            let tv = match tolerance {
                Some(tv) => tv,
                None => standard_tolerance(ToleranceKind::Zero, lambda, None)?,
            };
            no_equilibrium_tree_game(lambda, tv)?
        }
        "poa-lb" => {
            let lambda = need(params.lambda, "lambda")?;
            let tv = match tolerance {
                Some(tv) => tv,
                None => standard_tolerance(ToleranceKind::Zero, lambda, None)?,
            };
            poa_lb_game(lambda, params.mu.unwrap_or(1), tv)?
        }
        "pos" => {
            let t1 = match (&params.t1, tolerance) {
                (Some(t1), _) => t1.value()?,
                (None, Some(tv)) if tv.lambda() == 2 => tv.values()[1],
                (None, Some(_)) => return Err(CliError::Usage("pos takes a two-entry tolerance".into())),
                (None, None) => Rational::from_integer(0),
            };
            pos_game(need(params.b, "b")?, t1)?
        }
        "seven-type-grid" => seven_type_grid_example()?,
        other => return Err(CliError::Usage(format!("unknown instance {other:?}"))),
    };
    Ok(inst)
}

impl TopologySource {
    pub fn build(&self) -> Result<Topology, CliError> {
        Ok(match self {
            TopologySource::Explicit { node_count, edges } => build_graph(*node_count, edges)?,
            TopologySource::Grid { rows, cols } => grid(*rows, *cols)?,
            TopologySource::Path { nodes } => standard_graph(GraphKind::Path, *nodes)?,
            TopologySource::Cycle { nodes } => standard_graph(GraphKind::Cycle, *nodes)?,
            TopologySource::Clique { nodes } => standard_graph(GraphKind::Clique, *nodes)?,
            TopologySource::Star { nodes } => standard_graph(GraphKind::Star, *nodes)?,
            TopologySource::Named { instance, params } => named_instance(instance, params)?.game.topology().clone(),
        })
    }

    /// Grids keep their shape, everything else is written as an edge list.
    pub fn describe(topology: &Topology) -> Self {
        match topology.grid_shape() {
            Some(shape) => TopologySource::Grid { rows: shape.rows, cols: shape.cols },
            None => TopologySource::Explicit { node_count: topology.node_count(), edges: topology.edges().collect() },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            TopologySource::Explicit { .. } => "explicit",
            TopologySource::Grid { .. } => "grid",
            TopologySource::Path { .. } => "path",
            TopologySource::Cycle { .. } => "cycle",
            TopologySource::Clique { .. } => "clique",
            TopologySource::Star { .. } => "star",
            TopologySource::Named { .. } => "named",
        }
    }
}

/// A parsed file: the game and its labelled assignments.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub name: String,
    pub game: GameInstance,
    pub assignments: BTreeMap<String, Assignment>,
}

impl LoadedInstance {
    pub fn assignment(&self, label: &str) -> Result<&Assignment, CliError> {
        self.assignments.get(label).ok_or_else(|| CliError::Usage(format!("no assignment labelled {label:?}")))
    }
}

impl InstanceFile {
    pub fn load(&self) -> Result<LoadedInstance, CliError> {
        let topology = self.topology.build()?;
        let tv = self.game.tolerance.resolve(self.game.lambda)?;
        let game = GameInstance::new(self.game.lambda, self.game.agents_per_type, Arc::new(topology), tv)?;
        let assignments = self
            .assignments
            .iter()
            .map(|(label, pairs)| Ok((label.clone(), Assignment::from_pairs(&game, pairs)?)))
            .collect::<Result<_, CliError>>()?;
        Ok(LoadedInstance { name: self.name.clone(), game, assignments })
    }

    pub fn from_game(name: &str, game: &GameInstance, assignments: &BTreeMap<String, Assignment>) -> Self {
        InstanceFile {
            name: name.to_string(),
            topology: TopologySource::describe(game.topology()),
            game: GameSection {
                lambda: game.lambda(),
                agents_per_type: game.agents_per_type(),
                tolerance: ToleranceSource::explicit(game.tolerance()),
            },
            assignments: assignments.iter().map(|(label, a)| (label.clone(), a.pairs().collect())).collect(),
        }
    }

    pub fn from_named(inst: &NamedInstance) -> Self {
        Self::from_game(&inst.name, &inst.game, &inst.assignments)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("instance files serialise");
        text.push('\n');
        text
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}
