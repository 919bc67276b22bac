"""Finite observers: feedback loops, equivalence, metrics, and CA embeddings."""

from .ca import (
    CARule,
    EmbeddedSystem,
    ca_evolution,
    ca_step,
    damping_observer,
    embed,
    pbm_bytes,
    render_text,
    rule_table,
    run_embedded,
    transparent_observer,
)
from .composition import (
    FactEntry,
    FactLedger,
    LabScriptRun,
    MetaRegistry,
    RuleFamily,
    RuleTable,
    WellFoundedReport,
    Wiring,
    check_well_founded,
    default_registry,
    facts_relative_to,
    known_spin_values,
    record_fact,
    run_lab_script,
    second_order_wrap,
    stack,
)
from .core import (
    CoupledSystem,
    Environment,
    MinimalityReport,
    Observer,
    Trace,
    TraceRecord,
    validate_minimal,
)
from .documents import (
    parse_environment,
    parse_observer,
    serialize_environment,
    serialize_observer,
)
from .errors import (
    CapExceededError,
    DefinitionError,
    DocumentCompletenessError,
    DocumentError,
    DocumentParseError,
    DocumentReferenceError,
    EncodingError,
    IdentifierError,
    IncompatibleAlphabetsError,
    LedgerOrderError,
    MetaCycleError,
    MorphismShapeError,
    NumericalError,
    ObskitError,
    WiringError,
)
from .metrics import (
    GOAL_REACHED,
    GOAL_UNREACHABLE,
    TRANSIENT_TO_CYCLE,
    AdaptationResult,
    ComplexityReport,
    adaptation_time,
    complexity,
    expected_hitting_time,
)
from .morphism import (
    BehavioralPartition,
    MorphismCheck,
    ObserverMorphism,
    canonical_invariants,
    check_homomorphism,
    equivalence_partition,
    equivalent,
    find_isomorphism,
    identity_morphism,
    minimize,
)

__version__ = "0.1.0"
