"""Roadway directionality decision support.

Pipeline: parse TNTP data, extract a subnetwork, enumerate feasible
one-way/two-way configurations, evaluate each with betweenness metrics and
stochastic user-equilibrium assignment, rank by system travel time, fit a
linear configuration score, and explore constrained scenarios.
"""
from .netmodel import (Arc, ArcAttrs, Configuration, ConfigurationError, DirectedNetwork,
                       FeasibilityDiagnostics, InfeasibleNetworkError, Link, Orientation,
                       decode, directed_view, encode, enumerate_feasible,
                       feasibility_diagnostics, is_feasible)
from .tntp import (ArcRecord, DemandMatrix, NetworkDataset, TntpError, extract_subnetwork,
                   load_network, load_sioux_falls, load_trips, parse_network, parse_trips,
                   serialize_network, serialize_trips)
from .topo import edge_betweenness, hop_distances, network_tbc, tbc
from .sue import AssignmentResult, SueParams, bpr_time, mix64, stt, sue_assign, tltf
from .sweep import (SweepDataset, SweepRecord, load_csv, rank_by_stt, run_sweep, save_csv)
from .mcda import (DEFAULT_ALPHA_GRID, ModelError, ScalingParams, ScoreModel, assign_dcs,
                   cross_validate, minmax_scale, model_from_json, model_to_json,
                   reference_model, ridge_fit, score, score_scaled, train_model)
from .scenario import (AddedArc, Comparison, Scenario, ScenarioError, ScenarioMetrics,
                       best_under_constraints, case_study_preset, compare,
                       evaluate_scenario)

__version__ = "0.1.0"
