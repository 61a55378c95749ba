"""Robust UAV trajectory and transmit power design.

Thin wrapper over the C++ library. Lengths are in meters, powers in watts and
coordinates are relative to the legitimate receiver at the origin.
"""

from ._uavsec import (
    Affine,
    ConvexProgram,
    EveRegion,
    IterationRecord,
    NormBound,
    PlanResult,
    PowerDual,
    PowerSchedule,
    RotatedCone,
    Scenario,
    SolverResult,
    StepResult,
    Trajectory,
    assemble,
    avg_worst_case_secrecy_rate,
    best_effort_trajectory,
    db_to_linear,
    dbm_to_watt,
    equal_power,
    exact_c,
    linearized_c,
    load_scenario,
    optimize_power,
    parse_scenario,
    power_for_dual,
    psd_check,
    rate_bob,
    reference_scenario,
    run,
    slot_count,
    smoothed_objective,
    solve_program,
    solve_step,
    sweep,
    validate,
    verify,
    with_duration,
    worst_case_dist_sq,
    worst_case_dist_sq_oracle,
    worst_case_rate_eves,
)

__all__ = [name for name in dir() if not name.startswith("_")]
