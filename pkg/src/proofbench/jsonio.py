"""Canonical JSON encoding for every core type.

``encode`` maps a value object to plain JSON-able data; ``decode_*`` inverts
it. The encoding is canonical: keys are emitted sorted, mappings are sorted
by key, and ``canonical_bytes`` fixes whitespace, so equal values always
produce identical bytes. Top-level documents carry ``"schema": 1``.

The schemas are documented in docs/schemas.md; tests enforce
``decode(encode(x)) == x`` for arbitrary valid values.
"""

from __future__ import annotations

import json
from typing import Any, Optional

from . import model as m

SCHEMA_KEY = "schema"


def canonical_bytes(doc: Any) -> bytes:
    """The one serialization used for files, CLI --json and API bodies."""
    return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode()


def as_document(payload: dict) -> dict:
    doc = dict(payload)
    doc[SCHEMA_KEY] = m.SCHEMA_VERSION
    return doc


# ---------------------------------------------------------------------------
# Encoders
# ---------------------------------------------------------------------------


def _enc_ctype(t: m.CTypeRef) -> dict:
    return {"text": t.text, "pointee": t.pointee, "byte_size": t.byte_size}


def _enc_parameter(p: m.Parameter) -> dict:
    return {"name": p.name, "kind": p.kind.value, "ctype": _enc_ctype(p.ctype),
            "byte_size_hint": p.byte_size_hint}


def _enc_loop(lp: m.LoopRef) -> dict:
    return {"id": lp.id, "line": lp.line, "condition": lp.condition,
            "step": lp.step, "body_hint": lp.body_hint, "memcmp_size": lp.memcmp_size}


def _enc_global(g: m.GlobalRef) -> dict:
    return {"name": g.name, "ctype": g.ctype, "defining_file": g.defining_file}


def _enc_struct_hack(h: m.StructHackHint) -> dict:
    return {"subject": h.subject, "member": h.member,
            "parent_byte_size": h.parent_byte_size}


def _enc_buffer_hint(h: m.BufferHint) -> dict:
    return {"expr": h.expr, "capacity": h.capacity, "root": h.root}


def encode_target(t: m.TargetFunction) -> dict:
    return {
        "name": t.name,
        "source_file": t.source_file,
        "parameters": [_enc_parameter(p) for p in t.parameters],
        "return_type": _enc_ctype(t.return_type),
        "reachable_loops": [_enc_loop(lp) for lp in t.reachable_loops],
        "globals_read": [_enc_global(g) for g in t.globals_read],
        "struct_hacks": [_enc_struct_hack(h) for h in t.struct_hacks],
        "buffer_hints": [_enc_buffer_hint(h) for h in t.buffer_hints],
    }


def encode_scope(s: m.UnitScope) -> dict:
    return {
        "linked_sources": list(s.linked_sources),
        "include_dirs": list(s.include_dirs),
        "config_defines": {k: s.config_defines[k] for k in sorted(s.config_defines)},
    }


def encode_model(spec: m.ModelSpec) -> dict:
    detail: Optional[dict]
    d = spec.detail
    if d is None:
        detail = None
    elif isinstance(d, m.PointerOffsetDetail):
        detail = {"base": d.base, "offset_bound": d.offset_bound}
    elif isinstance(d, m.AllocationSizeDetail):
        detail = {"lower": d.lower, "upper": d.upper}
    elif isinstance(d, m.IntegerRangeDetail):
        detail = {"lower": d.lower, "upper": d.upper}
    elif isinstance(d, m.IntegerRelationshipDetail):
        detail = {"comparator": d.comparator, "other": d.other}
    elif isinstance(d, m.ConditionalDetail):
        detail = {"guard": d.guard, "inner": encode_model(d.inner)}
    else:  # pragma: no cover - exhaustive above
        raise TypeError(f"unknown model detail {d!r}")
    return {"kind": spec.kind.value, "subject": spec.subject, "detail": detail}


def encode_return_strategy(st: m.ReturnStrategy) -> dict:
    if isinstance(st, m.NondetByType):
        return {"strategy": "nondet_by_type", "ctype": st.ctype}
    if isinstance(st, m.FreshAllocationNotNull):
        return {"strategy": "fresh_allocation_not_null", "pointee": st.pointee,
                "size_lower": st.size_lower, "size_upper": st.size_upper}
    if isinstance(st, m.ConstrainedExpression):
        return {"strategy": "constrained_expression", "constraint": st.constraint,
                "ctype": st.ctype}
    raise TypeError(f"unknown return strategy {st!r}")


def encode_stub(st: m.FunctionModel) -> dict:
    return {
        "target": st.target,
        "kind": st.kind.value,
        "return_strategy": encode_return_strategy(st.return_strategy),
        "output_assignments": [
            {"symbol": oa.symbol, "strategy": encode_return_strategy(oa.strategy)}
            for oa in st.output_assignments],
        "signature": st.signature,
    }


def encode_loop_bound(lb: m.LoopBoundSpec) -> dict:
    return {"loop": lb.loop, "bound": lb.bound, "rationale": lb.rationale.value}


def encode_input_strategy(st: m.InputStrategy) -> dict:
    if isinstance(st, m.NondetScalarInput):
        return {"strategy": "nondet_scalar"}
    if isinstance(st, m.SizedAllocationInput):
        return {"strategy": "sized_allocation", "size_symbol": st.size_symbol,
                "declares_size": st.declares_size}
    if isinstance(st, m.AggregateAllocationInput):
        return {"strategy": "aggregate_allocation", "byte_size": st.byte_size,
                "aggregate": st.aggregate}
    raise TypeError(f"unknown input strategy {st!r}")


def encode_harness_spec(spec: m.HarnessSpec) -> dict:
    return {
        "target": encode_target(spec.target),
        "scope": encode_scope(spec.scope),
        "input_strategies": {
            name: encode_input_strategy(spec.input_strategies[name])
            for name in sorted(spec.input_strategies)},
        "global_models": [encode_model(x) for x in spec.global_models],
        "preconditions": [encode_model(x) for x in spec.preconditions],
        "stubs": [encode_stub(x) for x in spec.stubs],
        "loop_bounds": [encode_loop_bound(x) for x in spec.loop_bounds],
        "string_max": spec.string_max,
        "extra_checker_flags": list(spec.extra_checker_flags),
    }


def _enc_location(loc: m.SourceLocation) -> dict:
    return {"file": loc.file, "line": loc.line, "function": loc.function}


def encode_run_status(rs: m.RunStatus) -> dict:
    return {"kind": rs.kind.value, "message": rs.message,
            "elapsed_seconds": rs.elapsed_seconds}


def encode_property(p: m.PropertyResult) -> dict:
    return {"id": p.id, "class": p.klass.value, "status": p.status.value,
            "location": _enc_location(p.location), "description": p.description,
            "raw_class": p.raw_class}


def encode_coverage_line(c: m.LineCoverage) -> dict:
    return {"file": c.file, "line": c.line, "function": c.function,
            "status": c.status.value}


def encode_trace(t: m.Trace) -> dict:
    return {"steps": [
        {"index": s.index, "location": _enc_location(s.location),
         "lhs": s.lhs, "value": s.value, "call": s.call}
        for s in t.steps]}


def encode_solver_stats(s: m.SolverStats) -> dict:
    return {"variable_count": s.variable_count, "clause_count": s.clause_count,
            "solve_seconds": s.solve_seconds}


def encode_report(r: m.VerificationReport) -> dict:
    return {
        "run_status": encode_run_status(r.run_status),
        "properties": [encode_property(p) for p in r.properties],
        "coverage": [encode_coverage_line(c) for c in r.coverage],
        "traces": {pid: encode_trace(r.traces[pid]) for pid in sorted(r.traces)},
        "solver_stats": encode_solver_stats(r.solver_stats),
        "wall_seconds": r.wall_seconds,
        "diagnostics": list(r.diagnostics),
    }


def encode_finding(f: m.Finding) -> dict:
    return {"kind": f.kind.value, "cause": f.cause, "subject": f.subject,
            "cycle": list(f.cycle)}


def encode_evidence(e: m.Evidence) -> dict:
    return {"locations": [_enc_location(loc) for loc in e.locations],
            "trace_steps": list(e.trace_steps), "property_id": e.property_id,
            "notes": e.notes}


def encode_intervention(iv: m.Intervention) -> dict:
    return {
        "kind": iv.kind.value,
        "rationale": iv.rationale,
        "confidence": iv.confidence.value,
        "model": encode_model(iv.model) if iv.model else None,
        "stub": encode_stub(iv.stub) if iv.stub else None,
        "loop_bound": encode_loop_bound(iv.loop_bound) if iv.loop_bound else None,
        "path": iv.path,
        "define": iv.define,
        "value": iv.value,
        "string_max": iv.string_max,
        "property_id": iv.property_id,
        "note": iv.note,
        "location": _enc_location(iv.location) if iv.location else None,
    }


def encode_diagnosis(d: m.Diagnosis) -> dict:
    return {"finding": encode_finding(d.finding),
            "evidence": encode_evidence(d.evidence),
            "suggestions": [encode_intervention(s) for s in d.suggestions]}


def encode_review_item(item: m.ReviewItem) -> dict:
    return {"model": encode_model(item.model), "status": item.status.value,
            "origin_property": item.origin_property,
            "suggestion": encode_intervention(item.suggestion) if item.suggestion else None}


def encode_applied(a: m.AppliedIntervention) -> dict:
    return {"revision": a.revision, "intervention": encode_intervention(a.intervention),
            "accepted_by": a.accepted_by.value, "applied_in": a.applied_in}


def encode_completeness(c: m.CompletenessStatus) -> dict:
    return {"graceful_termination": c.graceful_termination,
            "full_coverage": c.full_coverage,
            "violations_resolved": c.violations_resolved,
            "verdict": c.verdict, "unmet": list(c.unmet)}


def encode_metrics(mt: m.CostMetrics) -> dict:
    return {
        "step_seconds": {k: mt.step_seconds.get(k, 0.0) for k in m.STEP_KEYS},
        "iteration_count": mt.iteration_count,
        "harness_loc": mt.harness_loc,
        "variable_model_counts": {k: mt.variable_model_counts[k]
                                  for k in sorted(mt.variable_model_counts)},
        "function_model_counts": {k: mt.function_model_counts[k]
                                  for k in sorted(mt.function_model_counts)},
        "loop_bound_histogram": {str(k): mt.loop_bound_histogram[k]
                                 for k in sorted(mt.loop_bound_histogram)},
        "last_execution_seconds": mt.last_execution_seconds,
        "last_solver_stats": encode_solver_stats(mt.last_solver_stats),
    }


def encode_revision(rev: m.Revision) -> dict:
    return {"spec": encode_harness_spec(rev.spec),
            "report": encode_report(rev.report) if rev.report else None,
            "diagnoses": [encode_diagnosis(d) for d in rev.diagnoses]}


def encode_session(s: m.ProofSession) -> dict:
    return {
        "id": s.id,
        "target": encode_target(s.target),
        "revisions": [encode_revision(rev) for rev in s.revisions],
        "applied": [encode_applied(a) for a in s.applied],
        "completeness": encode_completeness(s.completeness),
        "metrics": encode_metrics(s.metrics),
        "review_items": [encode_review_item(i) for i in s.review_items],
        "version": s.version,
        "project": s.project,
    }


# ---------------------------------------------------------------------------
# Decoders
# ---------------------------------------------------------------------------


def _dec_ctype(d: dict) -> m.CTypeRef:
    return m.CTypeRef(d["text"], d.get("pointee", ""), d.get("byte_size"))


def _dec_parameter(d: dict) -> m.Parameter:
    return m.Parameter(d["name"], m.ParamKind(d["kind"]), _dec_ctype(d["ctype"]),
                       d.get("byte_size_hint"))


def _dec_loop(d: dict) -> m.LoopRef:
    return m.LoopRef(d["id"], d.get("line", 0), d.get("condition", ""),
                     d.get("step", ""), d.get("body_hint", ""), d.get("memcmp_size"))


def decode_target(d: dict) -> m.TargetFunction:
    return m.TargetFunction(
        name=d["name"],
        source_file=d["source_file"],
        parameters=tuple(_dec_parameter(p) for p in d.get("parameters", [])),
        return_type=_dec_ctype(d.get("return_type", {"text": "void"})),
        reachable_loops=tuple(_dec_loop(lp) for lp in d.get("reachable_loops", [])),
        globals_read=tuple(
            m.GlobalRef(g["name"], g.get("ctype", "int"), g.get("defining_file", ""))
            for g in d.get("globals_read", [])),
        struct_hacks=tuple(
            m.StructHackHint(h["subject"], h["member"], h["parent_byte_size"])
            for h in d.get("struct_hacks", [])),
        buffer_hints=tuple(
            m.BufferHint(h["expr"], h["capacity"], h.get("root", ""))
            for h in d.get("buffer_hints", [])),
    )


def decode_scope(d: dict) -> m.UnitScope:
    return m.UnitScope(
        linked_sources=tuple(d.get("linked_sources", [])),
        include_dirs=tuple(d.get("include_dirs", [])),
        config_defines=dict(d.get("config_defines", {})),
    )


def decode_model(d: dict) -> m.ModelSpec:
    kind = m.ModelKind(d["kind"])
    raw = d.get("detail")
    detail: m.ModelDetail = None
    if raw is not None:
        if kind is m.ModelKind.POINTER_AND_OFFSET:
            detail = m.PointerOffsetDetail(raw["base"], raw["offset_bound"])
        elif kind is m.ModelKind.ALLOCATION_SIZE:
            detail = m.AllocationSizeDetail(raw.get("lower"), raw.get("upper"))
        elif kind is m.ModelKind.INTEGER_RANGE:
            detail = m.IntegerRangeDetail(raw.get("lower"), raw.get("upper"))
        elif kind is m.ModelKind.INTEGER_RELATIONSHIP:
            detail = m.IntegerRelationshipDetail(raw["comparator"], raw["other"])
        elif kind is m.ModelKind.CONDITIONAL:
            detail = m.ConditionalDetail(raw["guard"], decode_model(raw["inner"]))
    return m.ModelSpec(kind, d["subject"], detail)


def decode_return_strategy(d: dict) -> m.ReturnStrategy:
    tag = d["strategy"]
    if tag == "nondet_by_type":
        return m.NondetByType(d.get("ctype", "int"))
    if tag == "fresh_allocation_not_null":
        return m.FreshAllocationNotNull(d.get("pointee", ""), d.get("size_lower"),
                                        d.get("size_upper"))
    if tag == "constrained_expression":
        return m.ConstrainedExpression(d["constraint"], d.get("ctype", "int"))
    raise ValueError(f"unknown return strategy tag {tag!r}")


def decode_stub(d: dict) -> m.FunctionModel:
    return m.FunctionModel(
        target=d["target"],
        kind=m.FunctionModelKind(d["kind"]),
        return_strategy=decode_return_strategy(d["return_strategy"]),
        output_assignments=tuple(
            m.OutputAssignment(oa["symbol"], decode_return_strategy(oa["strategy"]))
            for oa in d.get("output_assignments", [])),
        signature=d.get("signature", ""),
    )


def decode_loop_bound(d: dict) -> m.LoopBoundSpec:
    return m.LoopBoundSpec(d["loop"], d["bound"], m.BoundRationale(d["rationale"]))


def decode_input_strategy(d: dict) -> m.InputStrategy:
    tag = d["strategy"]
    if tag == "nondet_scalar":
        return m.NondetScalarInput()
    if tag == "sized_allocation":
        return m.SizedAllocationInput(d["size_symbol"], d.get("declares_size", False))
    if tag == "aggregate_allocation":
        return m.AggregateAllocationInput(d["byte_size"], d.get("aggregate", ""))
    raise ValueError(f"unknown input strategy tag {tag!r}")


def decode_harness_spec(d: dict) -> m.HarnessSpec:
    return m.HarnessSpec(
        target=decode_target(d["target"]),
        scope=decode_scope(d["scope"]),
        input_strategies={name: decode_input_strategy(sd)
                          for name, sd in d.get("input_strategies", {}).items()},
        global_models=tuple(decode_model(x) for x in d.get("global_models", [])),
        preconditions=tuple(decode_model(x) for x in d.get("preconditions", [])),
        stubs=tuple(decode_stub(x) for x in d.get("stubs", [])),
        loop_bounds=tuple(decode_loop_bound(x) for x in d.get("loop_bounds", [])),
        string_max=d.get("string_max", m.DEFAULT_STRING_MAX),
        extra_checker_flags=tuple(d.get("extra_checker_flags", [])),
    )


def _dec_location(d: Optional[dict]) -> m.SourceLocation:
    if not d:
        return m.SourceLocation()
    return m.SourceLocation(d.get("file", ""), d.get("line", 0), d.get("function", ""))


def decode_run_status(d: dict) -> m.RunStatus:
    return m.RunStatus(m.RunStatusKind(d["kind"]), d.get("message", ""),
                       d.get("elapsed_seconds", 0.0))


def decode_property(d: dict) -> m.PropertyResult:
    return m.PropertyResult(d["id"], m.PropertyClass(d["class"]),
                            m.PropertyStatus(d["status"]),
                            _dec_location(d.get("location")),
                            d.get("description", ""), d.get("raw_class", ""))


def decode_trace(d: dict) -> m.Trace:
    return m.Trace(tuple(
        m.TraceStep(s["index"], _dec_location(s.get("location")),
                    s.get("lhs", ""), s.get("value", ""), s.get("call", ""))
        for s in d.get("steps", [])))


def decode_report(d: dict) -> m.VerificationReport:
    stats = d.get("solver_stats", {})
    return m.VerificationReport(
        run_status=decode_run_status(d["run_status"]),
        properties=tuple(decode_property(p) for p in d.get("properties", [])),
        coverage=tuple(
            m.LineCoverage(c["file"], c["line"], c.get("function", ""),
                           m.CoverageStatus(c["status"]))
            for c in d.get("coverage", [])),
        traces={pid: decode_trace(td) for pid, td in d.get("traces", {}).items()},
        solver_stats=m.SolverStats(stats.get("variable_count", 0),
                                   stats.get("clause_count", 0),
                                   stats.get("solve_seconds", 0.0)),
        wall_seconds=d.get("wall_seconds", 0.0),
        diagnostics=tuple(d.get("diagnostics", [])),
    )


def decode_finding(d: dict) -> m.Finding:
    return m.Finding(m.FindingKind(d["kind"]), d["cause"], d.get("subject", ""),
                     tuple(d.get("cycle", [])))


def decode_intervention(d: dict) -> m.Intervention:
    return m.Intervention(
        kind=m.InterventionKind(d["kind"]),
        rationale=d.get("rationale", ""),
        confidence=m.Confidence(d.get("confidence", "heuristic")),
        model=decode_model(d["model"]) if d.get("model") else None,
        stub=decode_stub(d["stub"]) if d.get("stub") else None,
        loop_bound=decode_loop_bound(d["loop_bound"]) if d.get("loop_bound") else None,
        path=d.get("path", ""),
        define=d.get("define", ""),
        value=d.get("value", ""),
        string_max=d.get("string_max", 0),
        property_id=d.get("property_id", ""),
        note=d.get("note", ""),
        location=_dec_location(d["location"]) if d.get("location") else None,
    )


def decode_diagnosis(d: dict) -> m.Diagnosis:
    ev = d.get("evidence", {})
    return m.Diagnosis(
        finding=decode_finding(d["finding"]),
        evidence=m.Evidence(
            locations=tuple(_dec_location(x) for x in ev.get("locations", [])),
            trace_steps=tuple(ev.get("trace_steps", [])),
            property_id=ev.get("property_id", ""),
            notes=ev.get("notes", "")),
        suggestions=tuple(decode_intervention(s) for s in d.get("suggestions", [])),
    )


def decode_review_item(d: dict) -> m.ReviewItem:
    return m.ReviewItem(
        model=decode_model(d["model"]),
        status=m.ReviewStatus(d["status"]),
        origin_property=d.get("origin_property", ""),
        suggestion=decode_intervention(d["suggestion"]) if d.get("suggestion") else None,
    )


def decode_applied(d: dict) -> m.AppliedIntervention:
    return m.AppliedIntervention(d["revision"], decode_intervention(d["intervention"]),
                                 m.Acceptor(d["accepted_by"]), d.get("applied_in", -1))


def decode_completeness(d: dict) -> m.CompletenessStatus:
    return m.CompletenessStatus(d.get("graceful_termination", False),
                                d.get("full_coverage", False),
                                d.get("violations_resolved", False))


def decode_metrics(d: dict) -> m.CostMetrics:
    stats = d.get("last_solver_stats", {})
    return m.CostMetrics(
        step_seconds={k: d.get("step_seconds", {}).get(k, 0.0) for k in m.STEP_KEYS},
        iteration_count=d.get("iteration_count", 0),
        harness_loc=d.get("harness_loc", 0),
        variable_model_counts=dict(d.get("variable_model_counts", {})),
        function_model_counts=dict(d.get("function_model_counts", {})),
        loop_bound_histogram={int(k): v
                              for k, v in d.get("loop_bound_histogram", {}).items()},
        last_execution_seconds=d.get("last_execution_seconds", 0.0),
        last_solver_stats=m.SolverStats(stats.get("variable_count", 0),
                                        stats.get("clause_count", 0),
                                        stats.get("solve_seconds", 0.0)),
    )


def decode_revision(d: dict) -> m.Revision:
    return m.Revision(
        spec=decode_harness_spec(d["spec"]),
        report=decode_report(d["report"]) if d.get("report") else None,
        diagnoses=tuple(decode_diagnosis(x) for x in d.get("diagnoses", [])),
    )


def decode_session(d: dict) -> m.ProofSession:
    return m.ProofSession(
        id=d["id"],
        target=decode_target(d["target"]),
        revisions=tuple(decode_revision(r) for r in d.get("revisions", [])),
        applied=tuple(decode_applied(a) for a in d.get("applied", [])),
        completeness=decode_completeness(d.get("completeness", {})),
        metrics=decode_metrics(d.get("metrics", {})),
        review_items=tuple(decode_review_item(i) for i in d.get("review_items", [])),
        version=d.get("version", 0),
        project=d.get("project", ""),
    )
