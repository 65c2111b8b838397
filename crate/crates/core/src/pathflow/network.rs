use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::num::NonZeroU32;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::transition::PathflowError;
use crate::ingest::{CourseStructure, LearnerPath, StepId, StepIdError, Theme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    /// One node per step.
    FishEye,
    /// One node per group of steps.
    BirdEye,
}

impl Granularity {
    pub const fn as_str(self) -> &'static str {
        match self {
            Granularity::FishEye => "fisheye",
            Granularity::BirdEye => "birdeye",
        }
    }
}

/// How steps are mapped onto network nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeUnit {
    Step,
    Week,
    /// Consecutive runs of `k` steps in designed order.
    Block(NonZeroU32),
}

impl NodeUnit {
    pub const fn granularity(self) -> Granularity {
        match self {
            NodeUnit::Step => Granularity::FishEye,
            NodeUnit::Week | NodeUnit::Block(_) => Granularity::BirdEye,
        }
    }

    pub fn blocks(k: u32) -> Result<NodeUnit, PathflowError> {
        NonZeroU32::new(k)
            .map(NodeUnit::Block)
            .ok_or(PathflowError::ZeroBlockSize)
    }

    /// Node for `step`, or `None` when the step is not part of `structure`.
    pub fn node_of(self, step: StepId, structure: &CourseStructure) -> Option<NodeId> {
        let index = structure.index_of(step)?;
        Some(match self {
            NodeUnit::Step => NodeId::Step(step),
            NodeUnit::Week => NodeId::Week(step.week()),
            NodeUnit::Block(k) => NodeId::Block(index as u32 / k.get() + 1),
        })
    }
}

impl From<Granularity> for NodeUnit {
    fn from(g: Granularity) -> Self {
        match g {
            Granularity::FishEye => NodeUnit::Step,
            Granularity::BirdEye => NodeUnit::Week,
        }
    }
}

/// Node identifier, rendered as `1.2` (step), `W1` (week) or `B1` (block).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeId {
    Step(StepId),
    Week(u32),
    Block(u32),
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Step(s) => write!(f, "{s}"),
            NodeId::Week(w) => write!(f, "W{w}"),
            NodeId::Block(b) => write!(f, "B{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NodeIdError {
    #[error(transparent)]
    Step(#[from] StepIdError),
    #[error("malformed node id {0:?}")]
    Malformed(String),
}

impl FromStr for NodeId {
    type Err = NodeIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let number = |rest: &str| -> Result<u32, NodeIdError> {
            rest.parse::<u32>()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| NodeIdError::Malformed(String::from(s)))
        };
        if let Some(rest) = s.strip_prefix('W') {
            Ok(NodeId::Week(number(rest)?))
        } else if let Some(rest) = s.strip_prefix('B') {
            Ok(NodeId::Block(number(rest)?))
        } else {
            Ok(NodeId::Step(s.parse()?))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowNode {
    pub id: NodeId,
    /// Distinct learners that visited the node.
    pub access_count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowEdge {
    pub src: NodeId,
    pub dst: NodeId,
    /// Hops from `src` to `dst`; one per learner at step level.
    pub learner_count: u64,
    /// `100 * learner_count / access_count(src)`.
    pub percentage: f64,
}

/// Weighted digraph of learner movements. Nodes and edges are sorted by id.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowNetwork {
    pub granularity: Granularity,
    pub nodes: Vec<FlowNode>,
    pub edges: Vec<FlowEdge>,
}

pub fn edge_percentage(learner_count: u64, src_access: u64) -> f64 {
    100.0 * learner_count as f64 / src_access as f64
}

impl FlowNetwork {
    pub fn node(&self, id: NodeId) -> Option<&FlowNode> {
        self.nodes
            .binary_search_by(|n| n.id.cmp(&id))
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn edge(&self, src: NodeId, dst: NodeId) -> Option<&FlowEdge> {
        self.edges
            .binary_search_by(|e| (e.src, e.dst).cmp(&(src, dst)))
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn outgoing(&self, src: NodeId) -> impl Iterator<Item = &FlowEdge> {
        self.edges.iter().filter(move |e| e.src == src)
    }

    /// Most frequent theme among the course steps each node spans; ties
    /// resolve to the earlier theme in [`Theme::ALL`].
    pub fn node_themes(&self, structure: &CourseStructure, unit: NodeUnit) -> BTreeMap<NodeId, Theme> {
        let mut tallies: BTreeMap<NodeId, [usize; Theme::COUNT]> = BTreeMap::new();
        for s in structure.steps() {
            if let Some(id) = unit.node_of(s.id, structure) {
                tallies.entry(id).or_insert([0; Theme::COUNT])[s.theme.index()] += 1;
            }
        }
        self.nodes
            .iter()
            .filter_map(|n| {
                let counts = tallies.get(&n.id)?;
                let best = Theme::ALL.into_iter().fold(Theme::Video, |best, t| {
                    if counts[t.index()] > counts[best.index()] {
                        t
                    } else {
                        best
                    }
                });
                Some((n.id, best))
            })
            .collect()
    }
}

/// Aggregates paths into a step-level or week-level network.
pub fn build_flow_network<'a, I>(
    paths: I,
    structure: &CourseStructure,
    granularity: Granularity,
) -> Result<FlowNetwork, PathflowError>
where
    I: IntoIterator<Item = &'a LearnerPath>,
{
    build_flow_network_by(paths, structure, granularity.into())
}

/// Aggregates paths with an explicit step-to-node mapping.
///
/// Node access counts are distinct learners per node. Edge counts are
/// hops between mapped nodes, so a hop inside one node becomes a self-loop.
pub fn build_flow_network_by<'a, I>(
    paths: I,
    structure: &CourseStructure,
    unit: NodeUnit,
) -> Result<FlowNetwork, PathflowError>
where
    I: IntoIterator<Item = &'a LearnerPath>,
{
    let mut access: BTreeMap<NodeId, u64> = BTreeMap::new();
    let mut hops: BTreeMap<(NodeId, NodeId), u64> = BTreeMap::new();
    let mut any = false;

    for path in paths {
        any = true;
        let mapped = path
            .steps()
            .map(|s| unit.node_of(s, structure).ok_or(PathflowError::UnknownStep(s)))
            .collect::<Result<Vec<_>, _>>()?;
        let distinct: BTreeSet<NodeId> = mapped.iter().copied().collect();
        for id in distinct {
            *access.entry(id).or_insert(0) += 1;
        }
        for pair in mapped.windows(2) {
            *hops.entry((pair[0], pair[1])).or_insert(0) += 1;
        }
    }
    if !any {
        return Err(PathflowError::EmptyPathSet);
    }

    let edges = hops
        .into_iter()
        .map(|((src, dst), learner_count)| FlowEdge {
            src,
            dst,
            learner_count,
            percentage: edge_percentage(learner_count, access[&src]),
        })
        .collect();
    let nodes = access
        .into_iter()
        .map(|(id, access_count)| FlowNode { id, access_count })
        .collect();
    Ok(FlowNetwork {
        granularity: unit.granularity(),
        nodes,
        edges,
    })
}
