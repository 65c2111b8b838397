//! Linear and catch-up transitions, and the flow networks built from them.

mod network;
mod rates;
mod transition;

pub use network::{
    build_flow_network, build_flow_network_by, edge_percentage, FlowEdge, FlowNetwork, FlowNode, Granularity, NodeId,
    NodeIdError, NodeUnit,
};
pub use rates::{per_step_rates, CohortStepRates, StepRate};
pub use transition::{classify_transition, extract_transitions, PathflowError, Transition, TransitionKind};
