"""Stationary random rooted graphs: generators, exact walk engine, entropy and
speed estimators, stationarity/reversibility/mass-transport tests and the
Radon-Nikodym cocycle."""

from _ergolab import (  # noqa: F401
    BallSignature,
    ConfigError,
    Ensemble,
    HorizonExceeded,
    RootedMultigraph,
    UnknownClassError,
    __version__,
    augmented_galton_watson,
    bias_by_degree,
    canopy_ball_size,
    canopy_infinite_ensemble,
    canopy_tree,
    canopy_tree_infinite,
    cocycle,
    entropy_series,
    epsilon_sequence,
    finite_graph_ensemble,
    fundamental_inequality,
    grandfather_ensemble,
    grandfather_graph,
    growth,
    joint_entropy,
    lattice,
    lattice_ensemble,
    lrp_cluster_ensemble,
    mass_transport,
    regular_tree,
    regular_tree_ensemble,
    reinforce_edges,
    reversibility,
    root_depth_distribution,
    run,
    run_suite,
    simulate_walk,
    speed,
    spine_resistance,
    stationarity,
    step_entropy,
    unbias_by_degree,
    varopoulos_carne_check,
    walk_range,
)
