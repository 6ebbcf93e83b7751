//! CSV summaries over families of small graphs.

use std::sync::Arc;

use serde::Serialize;

use schelling_core::rational::format_rational;
use schelling_core::topology::{grid, standard_graph, GraphKind};
use schelling_core::{enumerate_equilibria, optimal_welfare, social_welfare, EnumerationConfig, GameInstance, Rational, Topology};

use crate::commands::SweepArgs;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub instance: String,
    pub lambda: usize,
    pub n: usize,
    pub topology: String,
    pub eq_count: usize,
    pub opt: String,
    pub poa: String,
    pub pos: String,
}

/// Every topology of the requested kinds with room for `agents` agents and at
/// least one empty node, up to `max_nodes` nodes.
pub fn sweep_topologies(kinds: &[&str], agents: usize, max_nodes: usize) -> Result<Vec<(String, String, Topology)>, CliError> {
    let mut out = Vec::new();
    for &kind in kinds {
        let graph_kind = match kind {
            "path" => Some(GraphKind::Path),
            "cycle" => Some(GraphKind::Cycle),
            "star" => Some(GraphKind::Star),
            "clique" => Some(GraphKind::Clique),
            "grid" => None,
            other => return Err(CliError::Usage(format!("unknown sweep kind {other:?}"))),
        };
        for nodes in agents + 1..=max_nodes {
            match graph_kind {
                Some(g) => out.push((format!("{kind}-{nodes}"), kind.to_string(), standard_graph(g, nodes)?)),
                None => {
                    for rows in (2..=nodes).filter(|r| nodes % r == 0 && r * r <= nodes) {
                        let cols = nodes / rows;
                        out.push((format!("grid-{rows}x{cols}"), "grid".to_string(), grid(rows, cols)?));
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn sweep_row(id: &str, kind: &str, game: &GameInstance, config: &EnumerationConfig) -> Result<SweepRow, CliError> {
    let equilibria = enumerate_equilibria(game, config)?;
    let (_, opt) = optimal_welfare(game, config)?;
    let welfare: Vec<Rational> = equilibria.iter().map(|a| social_welfare(game, a)).collect();
    let ratio = |w: Option<&Rational>| match w {
        None => "none".to_string(),
        Some(w) if *w == Rational::from_integer(0) => "inf".to_string(),
        Some(w) => format_rational(&(opt / w)),
    };
    Ok(SweepRow {
        instance: id.to_string(),
        lambda: game.lambda(),
        n: game.agent_count(),
        topology: kind.to_string(),
        eq_count: equilibria.len(),
        opt: format_rational(&opt),
        poa: ratio(welfare.iter().min()),
        pos: ratio(welfare.iter().max()),
    })
}

pub fn run_sweep(args: &SweepArgs) -> Result<String, CliError> {
    let tv = match args.tolerance.resolve(args.lambda)? {
        Some(tv) => tv,
        None => schelling_core::standard_tolerance(schelling_core::ToleranceKind::Zero, args.lambda, None)?,
    };
    let config = EnumerationConfig { budget: args.budget, workers: args.workers.max(1) };
    let kinds: Vec<&str> = args.kinds.split(',').map(str::trim).filter(|k| !k.is_empty()).collect();
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut rows = 0;
    for (id, kind, topology) in sweep_topologies(&kinds, args.lambda * args.agents_per_type, args.max_nodes)? {
        let game = GameInstance::new(args.lambda, args.agents_per_type, Arc::new(topology), tv.clone())?;
        writer.serialize(sweep_row(&id, &kind, &game, &config)?).map_err(|e| CliError::Io(e.to_string()))?;
        rows += 1;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    let csv_text = String::from_utf8(bytes).expect("csv output is utf-8");
    match &args.output {
        Some(path) => {
            std::fs::write(path, csv_text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(format!("wrote {rows} rows to {}\n", path.display()))
        }
        None => Ok(csv_text),
    }
}
