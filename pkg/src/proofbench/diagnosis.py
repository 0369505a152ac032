"""Turn a verification report plus the current harness spec into findings
with ranked intervention suggestions.

The three entry points mirror how a proof engineer reads checker output:
``diagnose_nontermination`` for runs that never finished,
``diagnose_coverage`` for gaps in line coverage (including failed unwinding
assertions), and ``diagnose_violation`` for one failed property at a time,
walking its counterexample trace back to the unknown input, global or
undefined function that caused it.

Suggestions inside one diagnosis are ranked model-adding first, then
scope-expanding, then bound-raising: small scopes verify faster, so growing
the unit is the last resort.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

from . import model as m
from .errors import NotApplicable, TraceMissing

_ALLOCATORS = ("malloc", "calloc", "realloc")

_SUGGESTION_RANK = {
    m.InterventionKind.ADD_MODEL: 0,
    m.InterventionKind.ADD_STUB: 0,
    m.InterventionKind.SET_CONFIG: 1,
    m.InterventionKind.EXPAND_SCOPE: 2,
    m.InterventionKind.SET_LOOP_BOUND: 3,
    m.InterventionKind.RAISE_STRING_MAX: 4,
    m.InterventionKind.MARK_REAL_DEFECT: 5,
    m.InterventionKind.MARK_DEAD_CODE: 6,
}


def rank_suggestions(suggestions: Iterable[m.Intervention]) -> tuple[m.Intervention, ...]:
    return tuple(sorted(suggestions, key=lambda iv: _SUGGESTION_RANK[iv.kind]))


# ---------------------------------------------------------------------------
# Loop classification and bound advice
# ---------------------------------------------------------------------------


class LoopClass(str, Enum):
    CONSTANT = "constant"
    DATA_LENGTH = "data_length"
    LINKED_LIST = "linked_list"
    STRING_OR_MEMCMP = "string_or_memcmp"
    OTHER = "other"


@dataclass(frozen=True)
class LoopClassification:
    loop: str
    klass: LoopClass
    count: int = 0
    evidence: str = ""
    memcmp_size: Optional[int] = None


_CONST_COND_RE = re.compile(
    r"^\s*(\w+)\s*(<=|<|!=)\s*(0[xX][0-9a-fA-F]+|\d+)\s*$")
_CHASE_STEP_RE = re.compile(r"^\s*(\w+)\s*=\s*\1\s*->\s*\w+\s*$")
_STRINGY_RE = re.compile(r"\b(memcmp|strlen|strcpy|strncpy|strcmp|strncmp|strchr)\b")
_NUL_SCAN_RE = re.compile(r"!=\s*'\\0'")
_SIZE_IDENT_RE = re.compile(r"\b([A-Za-z_]\w*)\b")


def _looks_like_size_name(name: str) -> bool:
    low = name.lower()
    if low in ("len", "length", "size", "sz", "count", "n", "num", "nbytes",
               "remaining", "left", "total"):
        return True
    return any(low.endswith(sfx) for sfx in ("_len", "_size", "_count", "len", "size"))


def classify_loop(loop: m.LoopRef) -> LoopClassification:
    """Classify a loop by its exit condition, deterministically.

    Resolution order: a comparison against an integer literal is constant;
    a ``p = p->next`` style step is linked-list chasing; a null-terminator
    scan or a string/memcmp body is string-like; a comparison against a
    length/size variable is data-length; anything else is other.
    """
    cond = loop.condition.strip()
    step = loop.step.strip()
    body = loop.body_hint.strip()

    const = _CONST_COND_RE.match(cond)
    if const:
        literal = int(const.group(3), 0)
        op = const.group(2)
        count = literal + 1 if op == "<=" else literal
        if count >= 1:
            return LoopClassification(loop.id, LoopClass.CONSTANT, count=count,
                                      evidence=cond)

    if _CHASE_STEP_RE.match(step):
        return LoopClassification(loop.id, LoopClass.LINKED_LIST,
                                  evidence=f"{cond}; {step}")

    if _NUL_SCAN_RE.search(cond) or _STRINGY_RE.search(cond) or _STRINGY_RE.search(body):
        return LoopClassification(loop.id, LoopClass.STRING_OR_MEMCMP,
                                  evidence=cond or body,
                                  memcmp_size=loop.memcmp_size)

    for ident in _SIZE_IDENT_RE.findall(cond):
        if _looks_like_size_name(ident):
            return LoopClassification(loop.id, LoopClass.DATA_LENGTH, evidence=cond)

    return LoopClassification(loop.id, LoopClass.OTHER, evidence=cond)


def advise_bound(cls: LoopClassification, spec: m.HarnessSpec) -> m.LoopBoundSpec:
    """Minimal unwinding bound for a classified loop.

    Constant loops need full unrolling plus one so the exit check runs;
    data-length and linked-list loops exit after one real iteration under a
    minimal environment, bound 2; string-like loops follow the string bound
    (or the statically known memcmp size); everything else gets 2 and a
    manual-review rationale.
    """
    if cls.klass is LoopClass.CONSTANT:
        return m.LoopBoundSpec(cls.loop, cls.count + 1, m.BoundRationale.FULL_UNROLL)
    if cls.klass is LoopClass.DATA_LENGTH:
        return m.LoopBoundSpec(cls.loop, 2, m.BoundRationale.DATA_LENGTH)
    if cls.klass is LoopClass.LINKED_LIST:
        return m.LoopBoundSpec(cls.loop, 2, m.BoundRationale.LINKED_LIST)
    if cls.klass is LoopClass.STRING_OR_MEMCMP:
        if cls.memcmp_size is not None:
            return m.LoopBoundSpec(cls.loop, cls.memcmp_size, m.BoundRationale.MEMCMP_SIZE)
        return m.LoopBoundSpec(cls.loop, spec.string_max + 1, m.BoundRationale.STRING_MAX)
    return m.LoopBoundSpec(cls.loop, 2, m.BoundRationale.MANUAL)


def _bound_suggestion(loop: m.LoopRef, spec: m.HarnessSpec) -> m.Intervention:
    advised = advise_bound(classify_loop(loop), spec)
    confidence = (m.Confidence.EXACT
                  if advised.rationale is m.BoundRationale.FULL_UNROLL
                  else m.Confidence.HEURISTIC)
    return m.Intervention.set_loop_bound(
        advised, rationale=f"loop {loop.id} needs bound {advised.bound} "
                           f"({advised.rationale.value})",
        confidence=confidence)


# ---------------------------------------------------------------------------
# Source text lookups (shared by coverage and violation diagnosis)
# ---------------------------------------------------------------------------


class _SourceIndex:
    """Resolves report file names against the unit scope and caches lines."""

    def __init__(self, spec: m.HarnessSpec):
        self.spec = spec
        self._cache: dict[str, Optional[list[str]]] = {}

    def _resolve(self, file: str) -> Optional[Path]:
        p = Path(file)
        if p.exists():
            return p
        base = p.name
        for src in self.spec.scope.linked_sources:
            if Path(src).name == base and Path(src).exists():
                return Path(src)
        return None

    def lines(self, file: str) -> Optional[list[str]]:
        if file not in self._cache:
            path = self._resolve(file)
            try:
                self._cache[file] = path.read_text().splitlines() if path else None
            except OSError:
                self._cache[file] = None
        return self._cache[file]

    def line(self, file: str, lineno: int) -> str:
        lines = self.lines(file)
        if lines is None or not 1 <= lineno <= len(lines):
            return ""
        return lines[lineno - 1]


# ---------------------------------------------------------------------------
# Non-termination
# ---------------------------------------------------------------------------

_RECURSION_DIAG_RE = re.compile(r"^recursion:\s*(.+)$")
_FNPTR_DIAG_RE = re.compile(r"^function-pointer:\s*(\w+)$")
_COMPLEX_DIAG_RE = re.compile(r"^complex-callee:\s*(\w+)\s+size=(\d+)$")

_NONTERMINAL_STATUSES = (
    m.RunStatusKind.TIMEOUT,
    m.RunStatusKind.MEMORY_EXHAUSTED,
    m.RunStatusKind.CRASHED_AT_POSTPROCESSING,
)


def diagnose_nontermination(report: m.VerificationReport,
                            spec: m.HarnessSpec) -> list[m.Diagnosis]:
    """Explain a run that did not terminate gracefully.

    The cause comes from the normalized diagnostics channel: an
    uninitialized function pointer or unsupported memmove stalls
    post-processing, recursion and overly complex callees stall solving.
    """
    if report.run_status.kind not in _NONTERMINAL_STATUSES:
        raise NotApplicable(f"run status is {report.run_status.kind.value}")

    recursion_cycle: tuple[str, ...] = ()
    fnptr = ""
    memmove = False
    complex_callees: list[tuple[str, int]] = []
    for record in report.diagnostics:
        rec_match = _RECURSION_DIAG_RE.match(record)
        if rec_match:
            chain = [x.strip() for x in rec_match.group(1).split("->") if x.strip()]
            if len(chain) > 1 and chain[0] == chain[-1]:
                chain = chain[:-1]
            recursion_cycle = tuple(chain)
        fn_match = _FNPTR_DIAG_RE.match(record)
        if fn_match:
            fnptr = fn_match.group(1)
        if record.strip() == "memmove":
            memmove = True
        cx_match = _COMPLEX_DIAG_RE.match(record)
        if cx_match:
            complex_callees.append((cx_match.group(1), int(cx_match.group(2))))

    if not fnptr:
        # A post-processing stall with an unstubbed function-pointer input
        # names its own cause even without an explicit diagnostic record.
        stalled = (report.run_status.kind is m.RunStatusKind.CRASHED_AT_POSTPROCESSING
                   or "stage: post-processing" in report.diagnostics)
        if stalled:
            for p in spec.target.parameters:
                if (p.kind is m.ParamKind.FUNCTION_POINTER
                        and spec.stub_for(p.name) is None):
                    fnptr = p.name
                    break

    if fnptr:
        param = spec.target.parameter(fnptr)
        ctype = param.ctype.text if param else "void (*)(void)"
        ret = ctype.split("(*)")[0].strip() if "(*)" in ctype else "void"
        stub = m.FunctionModel(fnptr, m.FunctionModelKind.TYPE1_RETURN_ONLY,
                               m.NondetByType(ret or "void"))
        finding = m.Finding(m.FindingKind.NON_TERMINATION,
                            m.NonTerminationCause.FUNCTION_POINTER.value, subject=fnptr)
        suggestion = m.Intervention.add_stub(
            stub, rationale=f"initialize function pointer {fnptr} with an empty stub")
        return [m.Diagnosis(finding, m.Evidence(notes="post-processing stalled"),
                            (suggestion,))]

    if recursion_cycle:
        breaker = recursion_cycle[-1]
        stub = m.FunctionModel(breaker, m.FunctionModelKind.TYPE1_RETURN_ONLY,
                               m.NondetByType("int"))
        finding = m.Finding(m.FindingKind.NON_TERMINATION,
                            m.NonTerminationCause.RECURSION.value,
                            subject=breaker, cycle=recursion_cycle)
        suggestion = m.Intervention.add_stub(
            stub, rationale="break the recursion chain at its last edge "
                            f"({'->'.join(recursion_cycle)})")
        return [m.Diagnosis(finding, m.Evidence(notes="recursive call chain"),
                            (suggestion,))]

    if memmove:
        finding = m.Finding(m.FindingKind.NON_TERMINATION,
                            m.NonTerminationCause.MEMMOVE_UNSUPPORTED.value)
        return [m.Diagnosis(finding, m.Evidence(notes="memmove is unsupported; "
                                                      "no automatic fix"), ())]

    if complex_callees:
        name, size = max(complex_callees, key=lambda x: (x[1], x[0]))
        stub = m.FunctionModel(name, m.FunctionModelKind.TYPE1_RETURN_ONLY,
                               m.NondetByType("int"))
        finding = m.Finding(m.FindingKind.NON_TERMINATION,
                            m.NonTerminationCause.COMPLEX_CALLEE.value, subject=name)
        suggestion = m.Intervention.add_stub(
            stub, rationale=f"replace {name} (rendered size {size}) with a simple model")
        return [m.Diagnosis(finding, m.Evidence(notes="solver stalled"), (suggestion,))]

    finding = m.Finding(m.FindingKind.NON_TERMINATION,
                        m.NonTerminationCause.UNKNOWN.value)
    return [m.Diagnosis(finding, m.Evidence(notes="no known blocker matched"), ())]


# ---------------------------------------------------------------------------
# Coverage gaps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Region:
    file: str
    start: int
    end: int
    function: str


def uncovered_regions(coverage: Iterable[m.LineCoverage]) -> list[_Region]:
    by_file: dict[str, list[m.LineCoverage]] = {}
    for line in coverage:
        if line.status is m.CoverageStatus.UNCOVERED:
            by_file.setdefault(line.file, []).append(line)
    regions: list[_Region] = []
    for file in sorted(by_file):
        run: list[m.LineCoverage] = []
        for entry in sorted(by_file[file], key=lambda c: c.line):
            if run and entry.line == run[-1].line + 1:
                run.append(entry)
            else:
                if run:
                    regions.append(_Region(file, run[0].line, run[-1].line,
                                           run[0].function))
                run = [entry]
        if run:
            regions.append(_Region(file, run[0].line, run[-1].line, run[0].function))
    return regions


_GUARD_IF_RE = re.compile(r"\bif\s*\((.*)\)")
_CONFIG_GUARD_RE = re.compile(r"^\s*#\s*(?:if|ifdef|elif)\b(.*)$")
_ENDIF_RE = re.compile(r"^\s*#\s*endif\b")
# Checker spellings: "<fn>.unwind.<n>" and "<fn>.<n>.unwind".
_UNWIND_PROP_RES = (re.compile(r"^(?P<fn>\w+)\.unwind\.(?P<idx>\d+)$"),
                    re.compile(r"^(?P<fn>\w+)\.(?P<idx>\d+)\.unwind"))


def _unwind_loop_id(property_id: str) -> str:
    for pattern in _UNWIND_PROP_RES:
        match = pattern.match(property_id)
        if match:
            return f"{match.group('fn')}.{match.group('idx')}"
    return ""


def diagnose_coverage(report: m.VerificationReport,
                      spec: m.HarnessSpec) -> list[m.Diagnosis]:
    """One diagnosis per maximal contiguous uncovered region, plus one per
    failed unwinding assertion. Cause resolution order: insufficient loop
    bound, under-allocated flexible-array struct, config-gated region, dead
    code."""
    if report.run_status.kind is not m.RunStatusKind.COMPLETED:
        return []
    src = _SourceIndex(spec)
    out: list[m.Diagnosis] = []
    flagged_loops: set[str] = set()

    for region in uncovered_regions(report.coverage):
        diag = _diagnose_region(region, report, spec, src)
        out.append(diag)
        if diag.finding.cause == m.CoverageGapCause.INCOMPLETE_LOOP_UNWINDING.value:
            flagged_loops.add(diag.finding.subject)

    for prop in report.failed_properties():
        if prop.klass is not m.PropertyClass.UNWINDING_ASSERTION:
            continue
        loop_id = _unwind_loop_id(prop.id)
        loop = spec.target.loop(loop_id) if loop_id else None
        if loop is None or loop.id in flagged_loops:
            continue
        flagged_loops.add(loop.id)
        out.append(m.Diagnosis(
            m.Finding(m.FindingKind.COVERAGE_GAP,
                      m.CoverageGapCause.INCOMPLETE_LOOP_UNWINDING.value,
                      subject=loop.id),
            m.Evidence(locations=(prop.location,), property_id=prop.id,
                       notes="unwinding assertion failed"),
            (_bound_suggestion(loop, spec),)))
    return out


def _diagnose_region(region: _Region, report: m.VerificationReport,
                     spec: m.HarnessSpec, src: _SourceIndex) -> m.Diagnosis:
    loc = m.SourceLocation(region.file, region.start, region.function)
    evidence = m.Evidence(locations=(loc,),
                          notes=f"lines {region.start}-{region.end} uncovered")

    # (1) A loop above the region whose bound is below the classified need.
    candidates = []
    for loop in spec.target.reachable_loops:
        if loop.line <= 0 or loop.line >= region.start:
            continue
        if region.file and Path(region.file).name != Path(
                spec.target.source_file).name:
            continue
        current = spec.bound_for(loop.id)
        advised = advise_bound(classify_loop(loop), spec)
        if current is not None and current.bound < advised.bound:
            candidates.append(loop)
    if candidates:
        loop = max(candidates, key=lambda lp: lp.line)
        return m.Diagnosis(
            m.Finding(m.FindingKind.COVERAGE_GAP,
                      m.CoverageGapCause.INCOMPLETE_LOOP_UNWINDING.value,
                      subject=loop.id),
            evidence, (_bound_suggestion(loop, spec),))

    # (2) The region starts at (or right after) a flexible-array-member
    # dereference: the under-allocated access is what cut coverage.
    head_lines = " ".join(src.line(region.file, n)
                          for n in (region.start, region.start - 1))
    for hint in spec.target.struct_hacks:
        if re.search(rf"(->|\.){re.escape(hint.member)}\b", head_lines):
            model = m.ModelSpec(
                m.ModelKind.ALLOCATION_SIZE, hint.subject,
                m.AllocationSizeDetail(lower=str(hint.parent_byte_size)))
            suggestion = m.Intervention.add_model(
                model, rationale=f"{hint.subject} carries a flexible array member "
                                 f"{hint.member}; allocate at least the "
                                 f"{hint.parent_byte_size}-byte parent struct")
            return m.Diagnosis(
                m.Finding(m.FindingKind.COVERAGE_GAP,
                          m.CoverageGapCause.STRUCT_HACK_UNDER_ALLOCATION.value,
                          subject=hint.subject),
                evidence, (suggestion,))

    # (3) The region sits behind a preprocessor guard on an unset define.
    define = _config_guard(region, src)
    if define and define not in spec.scope.config_defines:
        suggestion = m.Intervention.set_config(
            define, "1", rationale=f"region is compiled only under {define}")
        return m.Diagnosis(
            m.Finding(m.FindingKind.COVERAGE_GAP,
                      m.CoverageGapCause.CONFIG_GATED.value, subject=define),
            evidence, (suggestion,))

    # (4) Dead under current bounds. A guard comparing a symbol against a
    # constant at or beyond the string bound is the one case worth a
    # distinct escalation: raising the bound may reveal real behaviour.
    suggestions: list[m.Intervention] = []
    guard_const = _string_guard_constant(region, spec, src)
    if guard_const is not None:
        suggestions.append(m.Intervention.raise_string_max(
            guard_const + 1,
            rationale=f"region is guarded by a length check against {guard_const}, "
                      f"beyond the current string bound {spec.string_max}"))
    suggestions.append(m.Intervention.mark_dead_code(
        loc, rationale="no reachable path under the current harness"))
    return m.Diagnosis(
        m.Finding(m.FindingKind.COVERAGE_GAP, m.CoverageGapCause.DEAD_CODE.value,
                  subject=f"{region.file}:{region.start}"),
        evidence, rank_suggestions(suggestions))


def _config_guard(region: _Region, src: _SourceIndex) -> str:
    lines = src.lines(region.file)
    if lines is None:
        return ""
    depth = 0
    for lineno in range(region.start - 1, 0, -1):
        text = lines[lineno - 1]
        if _ENDIF_RE.match(text):
            depth += 1
            continue
        guard = _CONFIG_GUARD_RE.match(text)
        if guard:
            if depth:
                depth -= 1
                continue
            rest = guard.group(1)
            ident = re.search(r"\b([A-Z_][A-Z0-9_]{2,})\b", rest)
            return ident.group(1) if ident else ""
    return ""


def _string_guard_constant(region: _Region, spec: m.HarnessSpec,
                           src: _SourceIndex) -> Optional[int]:
    if not any(classify_loop(lp).klass is LoopClass.STRING_OR_MEMCMP
               for lp in spec.target.reachable_loops):
        return None
    for lineno in range(region.start, max(region.start - 3, 0), -1):
        guard = _GUARD_IF_RE.search(src.line(region.file, lineno))
        if not guard:
            continue
        comp = re.search(r"\b\w+\s*>=?\s*(\d+)", guard.group(1))
        if comp and int(comp.group(1)) >= spec.string_max:
            return int(comp.group(1))
    return None


# ---------------------------------------------------------------------------
# Violations: trace walk and model synthesis
# ---------------------------------------------------------------------------

_IDENTS_RE = re.compile(r"[A-Za-z_]\w*")
_FIELD_PATH_RE = re.compile(r"\b([A-Za-z_]\w*(?:\.[A-Za-z_]\w*)+)\b")
_DEREF_RE = re.compile(r"\b([A-Za-z_]\w*)\s*(?:->|\[)|\*\s*([A-Za-z_]\w*)")
_BRACKET_RE = re.compile(r"\[([^\]]*)\]")
_MEM_CALL_RE = re.compile(r"\b(?:memcpy|memmove|memset|memcmp|strcpy|strncpy)"
                          r"\s*\(([^;]*)\)")
_CHASE_FIELD_RE = re.compile(r"^\s*\w+\s*=\s*\w+\s*->\s*(\w+)\s*$")


def _root(symbol: str) -> str:
    return re.split(r"[.\[]", symbol, maxsplit=1)[0]


@dataclass(frozen=True)
class _RootCandidate:
    index: int
    root: m.ViolationRoot
    symbol: str
    via: str = ""  # the assigned lhs that surfaced this candidate


def diagnose_violation(report: m.VerificationReport, spec: m.HarnessSpec,
                       property_id: str) -> m.Diagnosis:
    """Walk a failed property's trace back to the unknown component that
    caused it, then synthesize the weakest model that would resolve it.

    The walk prefers the earliest unknown source (the unit boundary) over
    the assignment nearest to the violation: the point is the minimal
    precondition on the unit's inputs, not a mid-trace patch.
    """
    prop = report.property(property_id)
    if prop is None or prop.status is not m.PropertyStatus.FAIL:
        raise NotApplicable(f"property {property_id} did not fail")
    trace = report.traces.get(property_id)
    if trace is None or not trace.steps:
        raise TraceMissing(property_id)

    src = _SourceIndex(spec)
    line = src.line(prop.location.file, prop.location.line)
    seed = _seed_symbols(prop, line, trace, spec)
    candidates = _walk_trace(trace, spec, seed)
    if candidates:
        chosen = min(candidates, key=lambda c: _candidate_rank(c, seed))
        finding = m.Finding(m.FindingKind.VIOLATION, chosen.root.value,
                            subject=chosen.symbol)
        steps = tuple(sorted({c.index for c in candidates}))
    else:
        chosen = _RootCandidate(0, m.ViolationRoot.UNRESOLVED, "")
        finding = m.Finding(m.FindingKind.VIOLATION, m.ViolationRoot.UNRESOLVED.value)
        steps = ()

    suggestions = _suggest_for_violation(prop, chosen, spec, src, line)
    evidence = m.Evidence(locations=(prop.location,), trace_steps=steps,
                          property_id=property_id)
    return m.Diagnosis(finding, evidence, rank_suggestions(suggestions))


def _seed_symbols(prop: m.PropertyResult, line: str, trace: m.Trace,
                  spec: m.HarnessSpec) -> set[str]:
    """Symbols the violating access actually involves: dereferenced bases,
    index expressions, and the arguments of a violating mem/str call. For a
    mem-call failure the description says which side failed, so only that
    buffer (plus the size) seeds the walk. Loop conditions join in when the
    access depends on an induction variable, so the data-length symbol
    steering the loop is reachable too."""
    seed: set[str] = set()
    mem_call = _MEM_CALL_RE.search(line)
    if mem_call and prop.klass in (m.PropertyClass.ARRAY_BOUNDS,
                                   m.PropertyClass.ARITHMETIC_OVERFLOW):
        args = [a.strip() for a in mem_call.group(1).split(",")]
        desc = prop.description.lower()
        picked = args
        if len(args) >= 3:
            if "destination" in desc or "upper bound" in desc:
                picked = [args[0], args[2]]
            elif "source" in desc:
                picked = [args[1], args[2]]
        for arg in picked:
            seed.update(_IDENTS_RE.findall(arg))
    else:
        for a, b in _DEREF_RE.findall(line):
            seed.add(a or b)
        if prop.klass in (m.PropertyClass.ARRAY_BOUNDS,
                          m.PropertyClass.ARITHMETIC_OVERFLOW):
            for inner in _BRACKET_RE.findall(line):
                seed.update(_IDENTS_RE.findall(inner))
    if not seed:
        last = trace.steps[-1]
        seed.update(_IDENTS_RE.findall(last.lhs))
        seed.update(_IDENTS_RE.findall(last.value))
    for loop in spec.target.reachable_loops:
        cond_idents = set(_IDENTS_RE.findall(loop.condition))
        if cond_idents & seed:
            seed.update(cond_idents)
    seed.discard("")
    return seed


def _candidate_rank(candidate: _RootCandidate, seed: set[str]) -> tuple[int, int]:
    """Prefer field paths the access names directly, then plain symbols the
    access names (for a callee return, the variable that received it), then
    anything reached by taint; earliest wins inside a tier (the unit
    boundary, not the nearest assignment)."""
    symbol = candidate.symbol
    if "." in symbol and symbol.rsplit(".", 1)[-1] in seed:
        tier = 0
    elif symbol in seed or (candidate.via and candidate.via in seed):
        tier = 1
    else:
        tier = 2
    return (tier, candidate.index)


def _walk_trace(trace: m.Trace, spec: m.HarnessSpec,
                seed: set[str]) -> list[_RootCandidate]:
    params = {p.name for p in spec.target.parameters}
    harness_locals = set()
    for name, strat in spec.input_strategies.items():
        harness_locals.add(name)
        if isinstance(strat, m.SizedAllocationInput):
            harness_locals.add(strat.size_symbol)
    global_names = {g.name for g in spec.target.globals_read}
    undefined_callees = {st.target for st in spec.stubs}
    prev_call: dict[int, str] = {}
    previous: Optional[m.TraceStep] = None
    for step in trace.steps:
        if step.call and not step.location.file:
            undefined_callees.add(step.call)
        if previous is not None and previous.call:
            prev_call[step.index] = previous.call
        previous = step

    tainted: set[str] = set(seed)
    candidates: list[_RootCandidate] = []

    for step in reversed(trace.steps):
        if not step.lhs:
            continue
        root = _root(step.lhs)
        relevant = (root in tainted
                    or any(t == step.lhs or t.startswith(step.lhs + ".")
                           or step.lhs.startswith(t + ".") for t in tainted))
        if not relevant:
            continue
        tainted.add(root)
        tainted.update(_IDENTS_RE.findall(step.value))

        fn = step.location.function
        candidate: Optional[_RootCandidate] = None
        caller = prev_call.get(step.index, "")
        if fn == "harness":
            if root in params or root in harness_locals:
                candidate = _RootCandidate(step.index, m.ViolationRoot.UNKNOWN_INPUT,
                                           step.lhs if "." in step.lhs else root,
                                           via=root)
            elif root in global_names:
                candidate = _RootCandidate(step.index, m.ViolationRoot.UNKNOWN_GLOBAL,
                                           root, via=root)
        elif fn in undefined_callees:
            candidate = _RootCandidate(step.index,
                                       m.ViolationRoot.UNDEFINED_FUNCTION_RETURN, fn,
                                       via=root)
        elif caller and caller in undefined_callees:
            candidate = _RootCandidate(step.index,
                                       m.ViolationRoot.UNDEFINED_FUNCTION_RETURN,
                                       caller, via=root)
        elif root in global_names:
            candidate = _RootCandidate(step.index, m.ViolationRoot.UNKNOWN_GLOBAL,
                                       root, via=root)
        else:
            field = _FIELD_PATH_RE.search(step.value)
            if field and _root(field.group(1)) in params:
                candidate = _RootCandidate(
                    step.index, m.ViolationRoot.LOCAL_UNVALIDATED_FIELD,
                    field.group(1))
            elif any(f"{alloc}(" in step.value for alloc in _ALLOCATORS):
                candidate = _RootCandidate(
                    step.index, m.ViolationRoot.LOCAL_UNVALIDATED_FIELD, step.lhs)
        if candidate:
            candidates.append(candidate)
    return candidates


def _suggest_for_violation(prop: m.PropertyResult, chosen: _RootCandidate,
                           spec: m.HarnessSpec, src: _SourceIndex,
                           line: str) -> list[m.Intervention]:
    if chosen.root is m.ViolationRoot.LOCAL_UNVALIDATED_FIELD:
        return [m.Intervention.mark_real_defect(
            prop.id, note=chosen.symbol,
            rationale=f"{chosen.symbol} flows into the violating access with no "
                      "validation on any path; report to maintainers")]
    if chosen.root is m.ViolationRoot.UNRESOLVED:
        return []
    if chosen.root is m.ViolationRoot.UNDEFINED_FUNCTION_RETURN:
        return _suggest_for_stub_return(prop, chosen.symbol, spec, line)

    if prop.klass is m.PropertyClass.POINTER_DEREFERENCE:
        return _suggest_for_deref(prop, chosen.symbol, spec)

    if prop.klass in (m.PropertyClass.ARRAY_BOUNDS,
                      m.PropertyClass.ARITHMETIC_OVERFLOW):
        return _suggest_for_bounds(prop, chosen.symbol, spec, src, line)

    return []


def _suggest_for_deref(prop: m.PropertyResult, culprit: str,
                       spec: m.HarnessSpec) -> list[m.Intervention]:
    strat = spec.input_strategies.get(culprit)
    allocated = isinstance(strat, (m.SizedAllocationInput,
                                   m.AggregateAllocationInput))

    # An allocated aggregate dereferenced inside a pointer-chasing loop:
    # the wild pointer is the chased link field, not the input itself.
    # The weakest fix terminates the chain at the one allocated node.
    if allocated:
        for loop in spec.target.reachable_loops:
            chase = _CHASE_FIELD_RE.match(loop.step.strip())
            if (chase and loop.line < prop.location.line
                    and loop.function == prop.location.function):
                field = chase.group(1)
                model = m.ModelSpec(
                    m.ModelKind.INTEGER_RELATIONSHIP, f"{culprit}.{field}",
                    m.IntegerRelationshipDetail("==", "NULL"))
                return [m.Intervention.add_model(
                    model, rationale=f"the loop chases {culprit}.{field}; bound "
                                     "the list to the one allocated node")]

    model = m.ModelSpec(m.ModelKind.POINTER_NOT_NULL, culprit)
    return [m.Intervention.add_model(
        model, rationale=f"{culprit} may be null at the dereference",
        confidence=m.Confidence.EXACT if allocated else m.Confidence.HEURISTIC)]


def _suggest_for_stub_return(prop: m.PropertyResult, callee: str,
                             spec: m.HarnessSpec, line: str) -> list[m.Intervention]:
    out: list[m.Intervention] = []
    existing = spec.stub_for(callee)
    if prop.klass is m.PropertyClass.POINTER_DEREFERENCE:
        if existing is None or isinstance(existing.return_strategy, m.NondetByType):
            ctype = (existing.return_strategy.ctype
                     if existing is not None
                     and isinstance(existing.return_strategy, m.NondetByType)
                     else "void *")
            pointee = ctype.rstrip("* ").strip() or "void"
            stub = m.FunctionModel(
                callee, m.FunctionModelKind.TYPE1_RETURN_ONLY,
                m.FreshAllocationNotNull(pointee=pointee),
                signature=existing.signature if existing else "")
            out.append(m.Intervention.add_stub(
                stub, rationale=f"{callee} returns a pointer the unit dereferences; "
                                "return a fresh non-null allocation"))
    elif existing is None or isinstance(existing.return_strategy, m.NondetByType):
        # A scalar-returning callee feeding a bounds violation: constrain
        # the return semantically below the sink's capacity.
        capacity = _capacity_at(line, spec)
        if capacity:
            stub = m.FunctionModel(
                callee, m.FunctionModelKind.TYPE2_RETURN_SEMANTIC,
                m.ConstrainedExpression(f"ret <= {capacity}"),
                signature=existing.signature if existing else "")
            out.append(m.Intervention.add_stub(
                stub, rationale=f"constrain {callee}'s return below the "
                                f"{capacity}-byte sink"))
    defining = _find_defining_file(callee, spec)
    if defining:
        out.append(m.Intervention.expand_scope(
            defining, rationale=f"{callee} is defined in {defining}; linking it "
                                "verifies the real behaviour"))
    return out


def _capacity_at(line: str, spec: m.HarnessSpec) -> str:
    for hint in spec.target.buffer_hints:
        if hint.expr in line:
            return str(hint.capacity)
    return ""


def _find_defining_file(callee: str, spec: m.HarnessSpec) -> str:
    base = Path(spec.target.source_file)
    folder = base.parent
    try:
        siblings = sorted(folder.glob("*.c"))
    except OSError:
        return ""
    pattern = re.compile(rf"^\s*[\w\s\*]*\b{re.escape(callee)}\s*\([^;]*$",
                         re.MULTILINE)
    for path in siblings:
        rel = str(path)
        if rel in spec.scope.linked_sources or path.name == base.name:
            continue
        try:
            text = path.read_text()
        except OSError:
            continue
        if pattern.search(text):
            return rel
    return ""


def _sized_param_for(symbol: str, spec: m.HarnessSpec) -> Optional[str]:
    """The pointer parameter ``symbol`` sizes (or is), when sized."""
    strat = spec.input_strategies.get(symbol)
    if isinstance(strat, m.SizedAllocationInput):
        return symbol
    for name, candidate in spec.input_strategies.items():
        if (isinstance(candidate, m.SizedAllocationInput)
                and candidate.size_symbol == symbol):
            return name
    return None


def _suggest_for_bounds(prop: m.PropertyResult, culprit: str, spec: m.HarnessSpec,
                        src: _SourceIndex, line: str) -> list[m.Intervention]:
    params = {p.name: p for p in spec.target.parameters}

    # When the culprit is a sized pointer input, constraints belong on the
    # symbol that sizes it.
    effective = culprit
    strat = spec.input_strategies.get(culprit)
    if isinstance(strat, m.SizedAllocationInput):
        effective = strat.size_symbol

    # (a) Pointer arithmetic on a harness input: bound the offset by the
    # base pointer's allocation.
    arith = re.search(r"\b([A-Za-z_]\w*)\s*\+\s*" + re.escape(culprit) + r"\b", line)
    if arith and arith.group(1) in params:
        base = arith.group(1)
        base_strat = spec.input_strategies.get(base)
        if isinstance(base_strat, m.SizedAllocationInput):
            model = m.ModelSpec(
                m.ModelKind.POINTER_AND_OFFSET, culprit,
                m.PointerOffsetDetail(base=base, offset_bound=base_strat.size_symbol))
            return [m.Intervention.add_model(
                model, rationale=f"{culprit} offsets {base}; keep it inside the "
                                 "allocation")]

    # (b) A flexible-array access at a constant index: the allocation must
    # reach past the parent struct by that much.
    for hint in spec.target.struct_hacks:
        flex = re.search(rf"(?:->|\.){re.escape(hint.member)}\s*\[\s*(\d+)\s*\]",
                         line)
        if flex:
            minimum = hint.parent_byte_size + int(flex.group(1)) + 1
            model = m.ModelSpec(m.ModelKind.ALLOCATION_SIZE, hint.subject,
                                m.AllocationSizeDetail(lower=str(minimum)))
            return [m.Intervention.add_model(
                model, rationale=f"{hint.member} trails the "
                                 f"{hint.parent_byte_size}-byte parent struct; "
                                 f"allocate at least {minimum} bytes")]

    # (c) A fixed-capacity sink: relate the culprit to the capacity. A sink
    # reached through another nondeterministic symbol makes it a two-symbol
    # relationship; a static sink only needs a range.
    for hint in spec.target.buffer_hints:
        if hint.expr not in line:
            continue
        bound = hint.capacity - 1 if "[" in line else hint.capacity
        guard = _conditional_guard(prop, effective, spec, src)
        root_nondet = bool(hint.root)
        if root_nondet:
            inner = m.ModelSpec(
                m.ModelKind.INTEGER_RELATIONSHIP, effective,
                m.IntegerRelationshipDetail("<=", str(bound)))
            rationale = (f"{effective} runs past the {hint.capacity}-entry "
                         f"{hint.expr}, reached through nondeterministic "
                         f"{hint.root}")
        else:
            inner = m.ModelSpec(
                m.ModelKind.INTEGER_RANGE, effective,
                m.IntegerRangeDetail(upper=str(bound)))
            rationale = (f"{effective} indexes the fixed {hint.capacity}-entry "
                         f"{hint.expr}")
        if guard:
            model = m.ModelSpec(m.ModelKind.CONDITIONAL, effective,
                                m.ConditionalDetail(guard=guard, inner=inner))
            rationale += f"; only on the `{guard}` path"
        else:
            model = inner
        return [m.Intervention.add_model(model, rationale=rationale)]

    # (d) A fixed index into a sized allocation: raise its minimum size.
    sized = _sized_param_for(culprit, spec)
    if sized is not None:
        fixed = re.search(rf"\b{re.escape(sized)}\s*\[\s*(\d+)\s*\]", line)
        if fixed:
            minimum = int(fixed.group(1)) + 1
            model = m.ModelSpec(m.ModelKind.ALLOCATION_SIZE, sized,
                                m.AllocationSizeDetail(lower=str(minimum)))
            return [m.Intervention.add_model(
                model, rationale=f"the unit reads {sized} at fixed offset "
                                 f"{minimum - 1}; allocate at least "
                                 f"{minimum} bytes")]
        # (e) An offset-plus-induction index under a constant loop: the
        # maximum index is the offset plus the final iteration.
        shifted = re.search(rf"\b{re.escape(sized)}\s*\[\s*(\d+)\s*\+\s*(\w+)\s*\]",
                            line)
        if shifted:
            offset, ident = int(shifted.group(1)), shifted.group(2)
            for loop in spec.target.reachable_loops:
                cls = classify_loop(loop)
                if (cls.klass is LoopClass.CONSTANT
                        and ident in _IDENTS_RE.findall(loop.condition)):
                    minimum = offset + cls.count
                    model = m.ModelSpec(
                        m.ModelKind.ALLOCATION_SIZE, sized,
                        m.AllocationSizeDetail(lower=str(minimum)))
                    return [m.Intervention.add_model(
                        model, rationale=f"the loop writes {sized} up to offset "
                                         f"{minimum - 1}; allocate at least "
                                         f"{minimum} bytes")]

    # (f) Another sized input indexed by the culprit: relate the two.
    for name, other_strat in spec.input_strategies.items():
        if not isinstance(other_strat, m.SizedAllocationInput):
            continue
        if other_strat.size_symbol == effective or name == culprit:
            continue
        if re.search(rf"\b{re.escape(name)}\s*\[", line):
            model = m.ModelSpec(
                m.ModelKind.INTEGER_RELATIONSHIP, effective,
                m.IntegerRelationshipDetail("<=", other_strat.size_symbol))
            return [m.Intervention.add_model(
                model, rationale=f"{effective} drives accesses into {name}, "
                                 f"which holds {other_strat.size_symbol} bytes")]

    # (g) Two scalar inputs interact on the violating line.
    others = [ident for ident in _IDENTS_RE.findall(line)
              if ident in params and ident != culprit
              and params[ident].kind is m.ParamKind.PRIMITIVE_SCALAR]
    if others:
        model = m.ModelSpec(m.ModelKind.INTEGER_RELATIONSHIP, effective,
                            m.IntegerRelationshipDetail("<=", others[0]))
        return [m.Intervention.add_model(
            model, rationale=f"{effective} and {others[0]} interact at the "
                             "violating access")]
    return []


def _conditional_guard(prop: m.PropertyResult, culprit: str, spec: m.HarnessSpec,
                       src: _SourceIndex) -> str:
    """A branch on a different input directly enclosing the violation makes
    the constraint conditional: the paths expect different preconditions.
    Brace counting skips sibling blocks that closed before the violation."""
    params = {p.name for p in spec.target.parameters}
    # Only the culprit's own field name disqualifies a guard; a guard on a
    # sibling field of the same input is exactly the conditional case.
    culprit_idents = {culprit.rsplit(".", 1)[-1]}
    depth = 0
    for lineno in range(prop.location.line - 1,
                        max(prop.location.line - 9, 0), -1):
        text = src.line(prop.location.file, lineno)
        if text.strip().startswith("}") or text.strip() == "}":
            depth += 1
            continue
        guard = _GUARD_IF_RE.search(text)
        if not guard:
            continue
        if depth > 0:
            depth -= 1
            continue
        cond = guard.group(1).strip()
        idents = set(_IDENTS_RE.findall(cond))
        if not (idents & culprit_idents) and idents & params:
            return cond
    return ""


# ---------------------------------------------------------------------------
# Completeness
# ---------------------------------------------------------------------------


def evaluate_completeness(report: m.VerificationReport,
                          dead_code_acks: Iterable[m.SourceLocation] = (),
                          defect_acks: Iterable[str] = (),
                          ) -> m.CompletenessStatus:
    """Score the latest run against the three exit criteria. Acknowledging a
    dead region or a real defect can only move a criterion toward met."""
    graceful = report.run_status.kind is m.RunStatusKind.COMPLETED

    acked_defects = set(defect_acks)
    unresolved = [p for p in report.failed_properties() if p.id not in acked_defects]
    violations_resolved = graceful and not unresolved

    regions = uncovered_regions(report.coverage)
    acks = list(dead_code_acks)
    remaining = [
        region for region in regions
        if not any(ack.file == region.file and region.start <= ack.line <= region.end
                   for ack in acks)]
    full_coverage = graceful and not remaining

    return m.CompletenessStatus(
        graceful_termination=graceful,
        full_coverage=full_coverage,
        violations_resolved=violations_resolved,
    )
