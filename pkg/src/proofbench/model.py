"""Core domain types for the proof workbench.

Everything here is an immutable value object: construction, validation and
serialization only. Behaviour lives in the codegen / diagnosis / session
modules, which all share these types.

Conventions:
  - Symbol paths use the canonical dotted form ``obj.field.subfield`` with
    array indices written ``[k]``, regardless of how the C source spells the
    access. One canonical key makes trace matching independent of surface
    syntax.
  - Loop identifiers use the checker's ``<function>.<N>`` convention verbatim
    so they can be passed straight into unwindset flags.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Optional, Union

SCHEMA_VERSION = 1

DEFAULT_STRING_MAX = 20

_LOOP_ID_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*\.\d+$")
_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


# ---------------------------------------------------------------------------
# Target function and unit scope
# ---------------------------------------------------------------------------


class ParamKind(str, Enum):
    PRIMITIVE_SCALAR = "primitive_scalar"
    PRIMITIVE_POINTER = "primitive_pointer"
    AGGREGATE_POINTER = "aggregate_pointer"
    FUNCTION_POINTER = "function_pointer"


@dataclass(frozen=True)
class CTypeRef:
    """A C type as spelled in source, with what the front-end resolved.

    ``text`` is the abstract spelling (``char *``, ``struct ctx *``,
    ``int (*)(int)``).  For pointers, ``pointee`` names the pointed-to type
    and ``byte_size`` is the pointee's size when the symbol table knows it.
    """

    text: str
    pointee: str = ""
    byte_size: Optional[int] = None


@dataclass(frozen=True)
class Parameter:
    name: str
    kind: ParamKind
    ctype: CTypeRef
    byte_size_hint: Optional[int] = None


@dataclass(frozen=True)
class LoopRef:
    """One reachable loop, identified the way the checker identifies it.

    The extra fields carry the front-end's syntactic dump of the loop header
    so the bound adviser can classify the exit condition without a C parser.
    """

    id: str
    line: int = 0
    condition: str = ""
    step: str = ""
    body_hint: str = ""
    memcmp_size: Optional[int] = None

    @property
    def function(self) -> str:
        return self.id.rsplit(".", 1)[0]


@dataclass(frozen=True)
class GlobalRef:
    """A global the unit reads; the defining file feeds the link line."""

    name: str
    ctype: str = "int"
    defining_file: str = ""


@dataclass(frozen=True)
class StructHackHint:
    """A harness symbol whose type ends in a flexible/zero-length array."""

    subject: str
    member: str
    parent_byte_size: int


@dataclass(frozen=True)
class BufferHint:
    """A fixed-capacity sink the unit writes through, with the capacity the
    front-end resolved from the member/array declaration (bytes for byte
    sinks, element slots for indexed arrays). ``root`` names the harness
    symbol or undefined function the sink is reached through; empty means
    the sink is a deterministic file-scope array."""

    expr: str
    capacity: int
    root: str = ""



@dataclass(frozen=True)
class TargetFunction:
    name: str
    source_file: str
    parameters: tuple[Parameter, ...] = ()
    return_type: CTypeRef = CTypeRef("void")
    reachable_loops: tuple[LoopRef, ...] = ()
    globals_read: tuple[GlobalRef, ...] = ()
    struct_hacks: tuple[StructHackHint, ...] = ()
    buffer_hints: tuple[BufferHint, ...] = ()

    def parameter(self, name: str) -> Optional[Parameter]:
        for p in self.parameters:
            if p.name == name:
                return p
        return None

    def loop(self, loop_id: str) -> Optional[LoopRef]:
        for lp in self.reachable_loops:
            if lp.id == loop_id:
                return lp
        return None


@dataclass(frozen=True)
class UnitScope:
    """Source files compiled with the harness; functions outside stay undefined."""

    linked_sources: tuple[str, ...]
    include_dirs: tuple[str, ...] = ()
    config_defines: Mapping[str, str] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Variable models (preconditions) and function models (stubs)
# ---------------------------------------------------------------------------


class ModelKind(str, Enum):
    POINTER_NOT_NULL = "pointer_not_null"
    POINTER_AND_OFFSET = "pointer_and_offset"
    ALLOCATION_SIZE = "allocation_size"
    INTEGER_RANGE = "integer_range"
    INTEGER_RELATIONSHIP = "integer_relationship"
    CONDITIONAL = "conditional"


@dataclass(frozen=True)
class PointerOffsetDetail:
    base: str
    offset_bound: str


@dataclass(frozen=True)
class AllocationSizeDetail:
    lower: Optional[str] = None
    upper: Optional[str] = None


@dataclass(frozen=True)
class IntegerRangeDetail:
    lower: Optional[str] = None
    upper: Optional[str] = None


@dataclass(frozen=True)
class IntegerRelationshipDetail:
    comparator: str
    other: str


@dataclass(frozen=True)
class ConditionalDetail:
    guard: str
    inner: "ModelSpec"


ModelDetail = Union[
    None,
    PointerOffsetDetail,
    AllocationSizeDetail,
    IntegerRangeDetail,
    IntegerRelationshipDetail,
    ConditionalDetail,
]

COMPARATORS = ("<", "<=", "==", "!=", ">=", ">")


@dataclass(frozen=True)
class ModelSpec:
    """One precondition on a nondeterministic harness symbol."""

    kind: ModelKind
    subject: str
    detail: ModelDetail = None

    def conditional_depth(self) -> int:
        if self.kind is not ModelKind.CONDITIONAL:
            return 0
        assert isinstance(self.detail, ConditionalDetail)
        return 1 + self.detail.inner.conditional_depth()


class FunctionModelKind(str, Enum):
    TYPE1_RETURN_ONLY = "type1_return_only"
    TYPE2_RETURN_SEMANTIC = "type2_return_semantic"
    TYPE3_INPUTS_AND_RETURN = "type3_inputs_and_return"


@dataclass(frozen=True)
class NondetByType:
    ctype: str = "int"


@dataclass(frozen=True)
class FreshAllocationNotNull:
    """Return a fresh allocation, assumed non-null, of a bounded size."""

    pointee: str = ""
    size_lower: Optional[str] = None
    size_upper: Optional[str] = None


@dataclass(frozen=True)
class ConstrainedExpression:
    """Return a value constrained by a boolean expression over ``ret``."""

    constraint: str
    ctype: str = "int"


ReturnStrategy = Union[NondetByType, FreshAllocationNotNull, ConstrainedExpression]


@dataclass(frozen=True)
class OutputAssignment:
    symbol: str
    strategy: ReturnStrategy


@dataclass(frozen=True)
class FunctionModel:
    """A stub replacing an undefined or overly complex callee.

    ``signature`` is the C parameter list text (empty means ``void``); the
    renderer needs it to emit a definition the compiler accepts.
    """

    target: str
    kind: FunctionModelKind
    return_strategy: ReturnStrategy
    output_assignments: tuple[OutputAssignment, ...] = ()
    signature: str = ""


class BoundRationale(str, Enum):
    DEFAULT = "default"
    FULL_UNROLL = "full_unroll"
    DATA_LENGTH = "data_length"
    LINKED_LIST = "linked_list"
    STRING_MAX = "string_max"
    MEMCMP_SIZE = "memcmp_size"
    MANUAL = "manual"


@dataclass(frozen=True)
class LoopBoundSpec:
    loop: str
    bound: int
    rationale: BoundRationale = BoundRationale.MANUAL


# ---------------------------------------------------------------------------
# Harness input strategies and the harness spec itself
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NondetScalarInput:
    """Declare the symbol uninitialized; the checker havocs it."""


@dataclass(frozen=True)
class SizedAllocationInput:
    """Allocate ``size_symbol`` bytes; declare that symbol first if fresh."""

    size_symbol: str
    declares_size: bool = False


@dataclass(frozen=True)
class AggregateAllocationInput:
    """Allocate a fixed number of bytes for an aggregate pointee."""

    byte_size: int
    aggregate: str = ""


InputStrategy = Union[NondetScalarInput, SizedAllocationInput, AggregateAllocationInput]


@dataclass(frozen=True)
class HarnessSpec:
    """Declarative description of a unit proof, rendered to C + makefile."""

    target: TargetFunction
    scope: UnitScope
    input_strategies: Mapping[str, InputStrategy] = field(default_factory=dict)
    global_models: tuple[ModelSpec, ...] = ()
    preconditions: tuple[ModelSpec, ...] = ()
    stubs: tuple[FunctionModel, ...] = ()
    loop_bounds: tuple[LoopBoundSpec, ...] = ()
    string_max: int = DEFAULT_STRING_MAX
    extra_checker_flags: tuple[str, ...] = ()

    def bound_for(self, loop_id: str) -> Optional[LoopBoundSpec]:
        for lb in self.loop_bounds:
            if lb.loop == loop_id:
                return lb
        return None

    def stub_for(self, target: str) -> Optional[FunctionModel]:
        for st in self.stubs:
            if st.target == target:
                return st
        return None


# ---------------------------------------------------------------------------
# Verification reports
# ---------------------------------------------------------------------------


class RunStatusKind(str, Enum):
    COMPLETED = "completed"
    BUILD_FAILED = "build_failed"
    TIMEOUT = "timeout"
    MEMORY_EXHAUSTED = "memory_exhausted"
    CRASHED_AT_POSTPROCESSING = "crashed_at_postprocessing"


@dataclass(frozen=True)
class RunStatus:
    kind: RunStatusKind
    message: str = ""
    elapsed_seconds: float = 0.0

    @classmethod
    def completed(cls) -> "RunStatus":
        return cls(RunStatusKind.COMPLETED)

    @classmethod
    def build_failed(cls, message: str) -> "RunStatus":
        return cls(RunStatusKind.BUILD_FAILED, message=message)

    @classmethod
    def timeout(cls, elapsed: float) -> "RunStatus":
        return cls(RunStatusKind.TIMEOUT, elapsed_seconds=elapsed)


class PropertyClass(str, Enum):
    POINTER_DEREFERENCE = "pointer_dereference"
    ARRAY_BOUNDS = "array_bounds"
    ARITHMETIC_OVERFLOW = "arithmetic_overflow"
    USER_ASSERTION = "user_assertion"
    UNWINDING_ASSERTION = "unwinding_assertion"


MEMORY_SAFETY_CLASSES = (
    PropertyClass.POINTER_DEREFERENCE,
    PropertyClass.ARRAY_BOUNDS,
    PropertyClass.ARITHMETIC_OVERFLOW,
)


class PropertyStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    UNREACHABLE = "unreachable"


@dataclass(frozen=True)
class SourceLocation:
    file: str = ""
    line: int = 0
    function: str = ""


@dataclass(frozen=True)
class PropertyResult:
    id: str
    klass: PropertyClass
    status: PropertyStatus
    location: SourceLocation = SourceLocation()
    description: str = ""
    raw_class: str = ""


class CoverageStatus(str, Enum):
    COVERED = "covered"
    UNCOVERED = "uncovered"
    UNREACHABLE = "unreachable"


@dataclass(frozen=True)
class LineCoverage:
    file: str
    line: int
    function: str
    status: CoverageStatus


@dataclass(frozen=True)
class TraceStep:
    """One step of a counterexample trace.

    Values stay verbatim text; checker value syntax (bitvectors, pointer
    offsets) is open-ended and parsing it buys nothing here.
    """

    index: int
    location: SourceLocation = SourceLocation()
    lhs: str = ""
    value: str = ""
    call: str = ""


@dataclass(frozen=True)
class Trace:
    steps: tuple[TraceStep, ...] = ()


@dataclass(frozen=True)
class SolverStats:
    variable_count: int = 0
    clause_count: int = 0
    solve_seconds: float = 0.0


@dataclass(frozen=True)
class VerificationReport:
    """Normalized checker output for one run.

    ``diagnostics`` is a side channel of normalized log records: stage
    sentinels (``stage: sat-solving``), structural observations
    (``recursion: f->g->f``) and any raw records the parser did not
    recognize (``unknown-record: ...``). Nothing is dropped silently.
    """

    run_status: RunStatus
    properties: tuple[PropertyResult, ...] = ()
    coverage: tuple[LineCoverage, ...] = ()
    traces: Mapping[str, Trace] = field(default_factory=dict)
    solver_stats: SolverStats = SolverStats()
    wall_seconds: float = 0.0
    diagnostics: tuple[str, ...] = ()

    def property(self, pid: str) -> Optional[PropertyResult]:
        for p in self.properties:
            if p.id == pid:
                return p
        return None

    def failed_properties(self) -> tuple[PropertyResult, ...]:
        return tuple(p for p in self.properties if p.status is PropertyStatus.FAIL)


# ---------------------------------------------------------------------------
# Diagnoses and interventions
# ---------------------------------------------------------------------------


class FindingKind(str, Enum):
    COVERAGE_GAP = "coverage_gap"
    VIOLATION = "violation"
    NON_TERMINATION = "non_termination"


class CoverageGapCause(str, Enum):
    INCOMPLETE_LOOP_UNWINDING = "incomplete_loop_unwinding"
    STRUCT_HACK_UNDER_ALLOCATION = "struct_hack_under_allocation"
    CONFIG_GATED = "config_gated"
    DEAD_CODE = "dead_code"


class ViolationRoot(str, Enum):
    UNKNOWN_INPUT = "unknown_input"
    UNKNOWN_GLOBAL = "unknown_global"
    UNDEFINED_FUNCTION_RETURN = "undefined_function_return"
    LOCAL_UNVALIDATED_FIELD = "local_unvalidated_field"
    UNRESOLVED = "unresolved"


class NonTerminationCause(str, Enum):
    FUNCTION_POINTER = "function_pointer"
    RECURSION = "recursion"
    COMPLEX_CALLEE = "complex_callee"
    MEMMOVE_UNSUPPORTED = "memmove_unsupported"
    UNKNOWN = "unknown"


_CAUSE_ENUM_BY_KIND = {
    FindingKind.COVERAGE_GAP: CoverageGapCause,
    FindingKind.VIOLATION: ViolationRoot,
    FindingKind.NON_TERMINATION: NonTerminationCause,
}


@dataclass(frozen=True)
class Finding:
    """What a diagnosis concluded: a gap cause, a violation root, or a
    non-termination cause. ``subject`` carries the loop id / symbol /
    config define / callee the cause points at; ``cycle`` is only used for
    recursion findings."""

    kind: FindingKind
    cause: str
    subject: str = ""
    cycle: tuple[str, ...] = ()


@dataclass(frozen=True)
class Evidence:
    locations: tuple[SourceLocation, ...] = ()
    trace_steps: tuple[int, ...] = ()
    property_id: str = ""
    notes: str = ""


class InterventionKind(str, Enum):
    ADD_MODEL = "add_model"
    ADD_STUB = "add_stub"
    SET_LOOP_BOUND = "set_loop_bound"
    EXPAND_SCOPE = "expand_scope"
    SET_CONFIG = "set_config"
    RAISE_STRING_MAX = "raise_string_max"
    MARK_REAL_DEFECT = "mark_real_defect"
    MARK_DEAD_CODE = "mark_dead_code"


class Confidence(str, Enum):
    EXACT = "exact"
    HEURISTIC = "heuristic"


@dataclass(frozen=True)
class Intervention:
    """One concrete change a human (or the auto policy) can accept.

    Only the payload fields matching ``kind`` are meaningful; the rest stay
    at their defaults so one flat record serializes cleanly.
    """

    kind: InterventionKind
    rationale: str = ""
    confidence: Confidence = Confidence.HEURISTIC
    model: Optional[ModelSpec] = None
    stub: Optional[FunctionModel] = None
    loop_bound: Optional[LoopBoundSpec] = None
    path: str = ""
    define: str = ""
    value: str = ""
    string_max: int = 0
    property_id: str = ""
    note: str = ""
    location: Optional[SourceLocation] = None

    @classmethod
    def add_model(cls, model: ModelSpec, rationale: str = "",
                  confidence: Confidence = Confidence.HEURISTIC) -> "Intervention":
        return cls(InterventionKind.ADD_MODEL, rationale, confidence, model=model)

    @classmethod
    def add_stub(cls, stub: FunctionModel, rationale: str = "",
                 confidence: Confidence = Confidence.HEURISTIC) -> "Intervention":
        return cls(InterventionKind.ADD_STUB, rationale, confidence, stub=stub)

    @classmethod
    def set_loop_bound(cls, bound: LoopBoundSpec, rationale: str = "",
                       confidence: Confidence = Confidence.HEURISTIC) -> "Intervention":
        return cls(InterventionKind.SET_LOOP_BOUND, rationale, confidence, loop_bound=bound)

    @classmethod
    def expand_scope(cls, path: str, rationale: str = "") -> "Intervention":
        return cls(InterventionKind.EXPAND_SCOPE, rationale, path=path)

    @classmethod
    def set_config(cls, define: str, value: str, rationale: str = "") -> "Intervention":
        return cls(InterventionKind.SET_CONFIG, rationale, define=define, value=value)

    @classmethod
    def raise_string_max(cls, new_max: int, rationale: str = "") -> "Intervention":
        return cls(InterventionKind.RAISE_STRING_MAX, rationale, string_max=new_max)

    @classmethod
    def mark_real_defect(cls, property_id: str, note: str = "",
                         rationale: str = "") -> "Intervention":
        return cls(InterventionKind.MARK_REAL_DEFECT, rationale,
                   property_id=property_id, note=note)

    @classmethod
    def mark_dead_code(cls, location: SourceLocation, rationale: str = "") -> "Intervention":
        return cls(InterventionKind.MARK_DEAD_CODE, rationale, location=location)


@dataclass(frozen=True)
class Diagnosis:
    finding: Finding
    evidence: Evidence = Evidence()
    suggestions: tuple[Intervention, ...] = ()


# ---------------------------------------------------------------------------
# Sessions
# ---------------------------------------------------------------------------


class Acceptor(str, Enum):
    HUMAN = "human"
    AUTO = "auto"


class ReviewStatus(str, Enum):
    PENDING_CALLER_REVIEW = "pending_caller_review"
    VALIDATED_ASSUMPTION = "validated_assumption"
    VIOLATED_ASSUMPTION = "violated_assumption"


@dataclass(frozen=True)
class ReviewItem:
    """A derived model assumption awaiting caller analysis."""

    model: ModelSpec
    status: ReviewStatus = ReviewStatus.PENDING_CALLER_REVIEW
    origin_property: str = ""
    suggestion: Optional[Intervention] = None


@dataclass(frozen=True)
class AppliedIntervention:
    """Accept-log entry. ``revision`` is the revision whose diagnoses
    produced the suggestion; ``applied_in`` is the revision created by
    applying it (-1 while still queued)."""

    revision: int
    intervention: Intervention
    accepted_by: Acceptor
    applied_in: int = -1


@dataclass(frozen=True)
class Revision:
    spec: HarnessSpec
    report: Optional[VerificationReport] = None
    diagnoses: tuple[Diagnosis, ...] = ()


@dataclass(frozen=True)
class CompletenessStatus:
    """The three exit criteria: the run terminates gracefully, every
    reachable line is covered, and every violation is resolved or
    acknowledged as a real defect. The verdict is derived, so it can never
    disagree with the booleans."""

    graceful_termination: bool = False
    full_coverage: bool = False
    violations_resolved: bool = False

    @property
    def unmet(self) -> tuple[str, ...]:
        out = []
        if not self.graceful_termination:
            out.append("graceful_termination")
        if not self.full_coverage:
            out.append("full_coverage")
        if not self.violations_resolved:
            out.append("violations_resolved")
        return tuple(out)

    @property
    def complete(self) -> bool:
        return not self.unmet

    @property
    def verdict(self) -> str:
        return "complete" if self.complete else "incomplete"


STEP_KEYS = ("step1", "step2", "step3", "step4")


@dataclass(frozen=True)
class CostMetrics:
    step_seconds: Mapping[str, float] = field(
        default_factory=lambda: {k: 0.0 for k in STEP_KEYS})
    iteration_count: int = 0
    harness_loc: int = 0
    variable_model_counts: Mapping[str, int] = field(default_factory=dict)
    function_model_counts: Mapping[str, int] = field(default_factory=dict)
    loop_bound_histogram: Mapping[int, int] = field(default_factory=dict)
    last_execution_seconds: float = 0.0
    last_solver_stats: SolverStats = SolverStats()


@dataclass(frozen=True)
class ProofSession:
    id: str
    target: TargetFunction
    revisions: tuple[Revision, ...] = ()
    applied: tuple[AppliedIntervention, ...] = ()
    completeness: CompletenessStatus = CompletenessStatus()
    metrics: CostMetrics = CostMetrics()
    review_items: tuple[ReviewItem, ...] = ()
    version: int = 0
    project: str = ""

    @property
    def latest_revision(self) -> Revision:
        return self.revisions[-1]

    @property
    def latest_diagnosed_index(self) -> int:
        """Index of the newest revision that has a report (and diagnoses)."""
        for i in range(len(self.revisions) - 1, -1, -1):
            if self.revisions[i].report is not None:
                return i
        return -1

    def pending_interventions(self) -> tuple[AppliedIntervention, ...]:
        return tuple(a for a in self.applied if a.applied_in < 0)

    def acknowledged_defects(self) -> frozenset[str]:
        return frozenset(
            a.intervention.property_id for a in self.applied
            if a.intervention.kind is InterventionKind.MARK_REAL_DEFECT)

    def acknowledged_dead_code(self) -> tuple[SourceLocation, ...]:
        return tuple(
            a.intervention.location for a in self.applied
            if a.intervention.kind is InterventionKind.MARK_DEAD_CODE
            and a.intervention.location is not None)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def model_subjects(spec: HarnessSpec) -> frozenset[str]:
    """Root symbols a model's subject may legally start from."""
    roots = set()
    for p in spec.target.parameters:
        roots.add(p.name)
    for name, strat in spec.input_strategies.items():
        roots.add(name)
        if isinstance(strat, SizedAllocationInput):
            roots.add(strat.size_symbol)
    for g in spec.target.globals_read:
        roots.add(g.name)
    for st in spec.stubs:
        roots.add(st.target)
    return frozenset(roots)


def _subject_root(subject: str) -> str:
    return re.split(r"[.\[]", subject, maxsplit=1)[0]


def _int_or_none(text: Optional[str]) -> Optional[int]:
    if text is None:
        return None
    try:
        return int(text, 0)
    except ValueError:
        return None


def _check_model(model: ModelSpec, roots: frozenset[str], out: list[str]) -> None:
    if not model.subject:
        out.append(f"model {model.kind.value} has an empty subject")
    elif _subject_root(model.subject) not in roots:
        out.append(f"model subject {model.subject} is not visible in the harness")
    if model.kind is ModelKind.INTEGER_RANGE and isinstance(model.detail, IntegerRangeDetail):
        lo = _int_or_none(model.detail.lower)
        hi = _int_or_none(model.detail.upper)
        if lo is not None and hi is not None and lo > hi:
            out.append(f"integer range on {model.subject}: lower {lo} > upper {hi}")
    if model.kind is ModelKind.ALLOCATION_SIZE and isinstance(model.detail, AllocationSizeDetail):
        lo = _int_or_none(model.detail.lower)
        hi = _int_or_none(model.detail.upper)
        if lo is not None and hi is not None and lo > hi:
            out.append(f"allocation size on {model.subject}: lower {lo} > upper {hi}")
    if model.kind is ModelKind.INTEGER_RELATIONSHIP:
        if not isinstance(model.detail, IntegerRelationshipDetail):
            out.append(f"integer relationship on {model.subject} lacks its detail record")
        elif model.detail.comparator not in COMPARATORS:
            out.append(f"integer relationship on {model.subject}: "
                       f"bad comparator {model.detail.comparator!r}")
    if model.kind is ModelKind.CONDITIONAL:
        if not isinstance(model.detail, ConditionalDetail):
            out.append(f"conditional model on {model.subject} lacks its detail record")
        else:
            if model.conditional_depth() > 2:
                out.append(f"conditional model on {model.subject} nests deeper than 2")
            _check_model(model.detail.inner, roots, out)
    if model.kind is ModelKind.POINTER_AND_OFFSET and not isinstance(
            model.detail, PointerOffsetDetail):
        out.append(f"pointer-and-offset model on {model.subject} lacks its detail record")


def validate(spec: HarnessSpec) -> list[str]:
    """Check every structural invariant; one message per violation.

    Total function: never raises, returns [] iff the spec is well-formed.
    Message order is deterministic (target, scope, inputs, models, stubs,
    bounds, misc) so callers can golden-test against it.
    """
    out: list[str] = []
    target = spec.target

    if not target.name or not _IDENT_RE.match(target.name):
        out.append(f"target function name {target.name!r} is not an identifier")
    for lp in target.reachable_loops:
        if not _LOOP_ID_RE.match(lp.id):
            out.append(f"loop id {lp.id!r} is not of the form <function>.<index>")

    if target.source_file and target.source_file not in spec.scope.linked_sources:
        out.append(f"scope does not link the target's source file {target.source_file}")
    seen: set[str] = set()
    for path in spec.scope.linked_sources:
        if path in seen:
            out.append(f"scope links {path} twice")
        seen.add(path)

    for p in target.parameters:
        if p.kind in (ParamKind.PRIMITIVE_POINTER, ParamKind.AGGREGATE_POINTER):
            if not p.ctype.pointee and p.byte_size_hint is None and p.ctype.byte_size is None:
                out.append(f"pointer parameter {p.name} has no resolvable pointee type")

    roots = model_subjects(spec)
    for model in spec.global_models:
        _check_model(model, roots, out)
    for model in spec.preconditions:
        _check_model(model, roots, out)

    stub_targets: set[str] = set()
    for st in spec.stubs:
        if st.target in stub_targets:
            out.append(f"two stubs target {st.target}")
        stub_targets.add(st.target)
        if st.kind is FunctionModelKind.TYPE1_RETURN_ONLY:
            if st.output_assignments:
                out.append(f"type-1 stub {st.target} must not assign outputs")
            if isinstance(st.return_strategy, ConstrainedExpression):
                out.append(f"type-1 stub {st.target} cannot use a constrained expression")
        if st.kind is FunctionModelKind.TYPE2_RETURN_SEMANTIC and not isinstance(
                st.return_strategy, ConstrainedExpression):
            out.append(f"type-2 stub {st.target} must use a constrained expression")

    bounded: dict[str, int] = {}
    for lb in spec.loop_bounds:
        bounded[lb.loop] = bounded.get(lb.loop, 0) + 1
        if lb.bound < 1:
            out.append(f"loop {lb.loop} bound {lb.bound} is below 1")
        if lb.rationale is BoundRationale.DEFAULT and lb.bound != 1:
            out.append(f"loop {lb.loop} has the default rationale but bound {lb.bound}")
    for lp in target.reachable_loops:
        n = bounded.get(lp.id, 0)
        if n == 0:
            out.append(f"loop {lp.id} has no bound")
        elif n > 1:
            out.append(f"loop {lp.id} has {n} bounds")

    if spec.string_max < 1:
        out.append(f"string_max {spec.string_max} is below 1")

    return out


def validate_finding(finding: Finding) -> list[str]:
    """Check a finding's cause string belongs to its kind's cause enum."""
    enum = _CAUSE_ENUM_BY_KIND[finding.kind]
    try:
        enum(finding.cause)
    except ValueError:
        return [f"finding {finding.kind.value} has unknown cause {finding.cause!r}"]
    return []


# ---------------------------------------------------------------------------
# Metric tallies (recomputable from a spec; stored copies must match)
# ---------------------------------------------------------------------------


def tally_variable_models(spec: HarnessSpec) -> dict[str, int]:
    counts = {kind.value: 0 for kind in ModelKind}

    def visit(model: ModelSpec) -> None:
        counts[model.kind.value] += 1
        if isinstance(model.detail, ConditionalDetail):
            visit(model.detail.inner)

    for model in spec.global_models:
        visit(model)
    for model in spec.preconditions:
        visit(model)
    return counts


def tally_function_models(spec: HarnessSpec) -> dict[str, int]:
    counts = {kind.value: 0 for kind in FunctionModelKind}
    for st in spec.stubs:
        counts[st.kind.value] += 1
    return counts


def tally_loop_bounds(spec: HarnessSpec) -> dict[int, int]:
    hist: dict[int, int] = {}
    for lb in spec.loop_bounds:
        hist[lb.bound] = hist.get(lb.bound, 0) + 1
    return hist


def count_harness_loc(harness_source: str) -> int:
    """Non-blank, non-comment lines; block comments tracked line-wise."""
    loc = 0
    in_block = False
    for raw in harness_source.splitlines():
        line = raw.strip()
        if in_block:
            if "*/" in line:
                in_block = False
                line = line.split("*/", 1)[1].strip()
            else:
                continue
        if line.startswith("/*"):
            if "*/" in line:
                line = line.split("*/", 1)[1].strip()
            else:
                in_block = True
                continue
        if not line or line.startswith("//"):
            continue
        loc += 1
    return loc


__all__ = [name for name in dir() if not name.startswith("_")]


def with_replaced(obj, **changes):
    """dataclasses.replace re-exported under a name that reads better here."""
    return replace(obj, **changes)
