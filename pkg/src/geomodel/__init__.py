"""Convex geometric models for existential-rule knowledge bases.

The library materializes finite models of rule bases (restricted chase),
builds exact convex geometric models for quasi-chained ontologies (one-hot
points plus instance hulls), decides geometric rule satisfaction by exact
rational linear programming, and mechanizes the expressivity limits of the
standard embedding families (translation, bilinear, head/tail split).
"""

from ._rat import rat, rat_str
from .polytope import (
    CapExceededError,
    DimensionMismatchError,
    HRep,
    Point,
    Polytope,
    concat_points,
    facet_enumeration,
    point,
    vertex_enumeration,
)
from .rules import (
    Atom,
    ArityMismatchError,
    BodyTooLargeError,
    ExistentialRule,
    HeadVariableError,
    KnowledgeBase,
    NegativeConstraint,
    Ontology,
    ParseError,
    RuleError,
    Term,
    atom,
    const,
    is_quasi_chained,
    is_weakly_acyclic,
    knowledge_base,
    normalize_ontology,
    normalize_single_head,
    null,
    parse_program,
    quasi_chained_offender,
    quasi_chained_order,
    render_program,
    var,
)
from .chase import (
    ChaseResult,
    NotDatalogError,
    NotGuaranteedTerminatingError,
    chase,
    datalog_fixpoint,
    dumps_model,
    is_model,
    loads_model,
    models_equal_up_to_nulls,
    objects_of,
)
from .geometry import (
    ExtendedGeometricInterpretation,
    GeometricInterpretation,
    NameCollisionError,
    NotOneHotBaseError,
    NotQuasiChainedError,
    RoundsExceededError,
    UnknownObjectError,
    compact_one_hot_model,
    concat,
    dumps_geometry,
    extend_with_points,
    indicator_extended_model,
    loads_geometry,
    one_hot_model,
    synthesize_witnesses,
)
from .rule_check import (
    CheckOptions,
    HellyBreakResult,
    MinimumNError,
    PreconditionViolatedError,
    ProbeReport,
    RuleVerdict,
    atoms_polytope,
    body_polytope,
    check_ontology_geometric,
    check_rule_geometric,
    dumps_probe_report,
    helly_break,
    helly_intersection_point,
    helly_lower_bound_kb,
    loads_probe_report,
    probe_extensions,
    verify_violation,
)
from .embedding import (
    BilinearDecision,
    BilinearRelation,
    CompositionDecision,
    PremiseViolatedError,
    SimplERelation,
    TranslationRelation,
    bilinear_hierarchy,
    bilinear_subsumption,
    complex_relation,
    distmult_relation,
    falsify_bilinear,
    in_region,
    score,
    separates,
    simple_composition_counterexample,
    translation_containment_chain,
    translation_graph_properties,
)

__version__ = "0.1.0"
