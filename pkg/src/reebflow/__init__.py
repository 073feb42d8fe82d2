"""Numerics for leaf-preserving maps of Reeb-foliated planar domains.

The package decides, for a concrete map preserving the Reeb foliation of a
planar quadrant, whether it can sit inside a foliation-preserving flow, and
when it can, synthesizes the flow:

  * homeo1d      -- one-dimensional homeomorphism utilities;
  * flowable     -- equivalence relations that generate flows on the line,
                    square roots of maps, halving sequences, dyadic flows;
  * reeb         -- the quadrant model, its hyperbolic builtin and the
                    distorted counterexample;
  * matching     -- witness limits across the foliation and the four- and
                    eight-point matching checks;
  * synthesis    -- boundary and planar flow construction from a map that
                    passes the checks;
  * reports, svgplot, cli -- deterministic reporting, plotting, entry point.
"""

from .errors import (
    ClosedFormError,
    ConfigError,
    DyadicDepthError,
    FlowResolutionError,
    InversionBracketError,
    LimitDivergenceError,
    NumericalFailure,
    ReebflowError,
    RelationError,
    SectorError,
    TimeBudgetError,
    WitnessBracketError,
)
from .homeo1d import (
    Homeo1D,
    PiecewiseMonotoneInterpolant,
    dist_k,
    evaluate,
    invert,
    iterate,
    tabulate,
)
from .flowable import (
    EquivClassMap,
    FlowablePair,
    HalvingSequence,
    cubic_pair,
    halving_sequence,
    square_root,
    square_root_table,
    translation_pair,
)
from .reeb import (
    BoundaryPoint,
    BumpProfile,
    EightPointConfig,
    QuadrantPoint,
    ReebHomeo,
    Scenario,
    composite_model,
    counterexample_model,
    hyperbolic_model,
    iterate_closed_form,
    scenario_from_dict,
    strip_leaf,
)
from .matching import (
    MatchingReport,
    Transversal,
    check_eight_point,
    check_four_point,
    counterexample_limit_table,
    eight_point_case,
    solve_witness,
    transfer_across,
    transfer_back,
    transfer_within,
)
from .synthesis import (
    BoundaryFlow,
    MatchingGate,
    PlanarFlow,
    SynthesisReport,
    approx_relation_as_phi,
    boundary_flow,
    check_additivity,
    check_boundary_consistency,
    check_planar_continuity,
    planar_flow,
    synthesize,
    verify_matching,
)
from .reports import (
    emit_report,
    format_float,
    render_csv,
    render_json,
)
from .svgplot import (
    render_figure1,
    render_leaves,
    render_orbit,
    save_svg,
)

__version__ = "0.1.0"
