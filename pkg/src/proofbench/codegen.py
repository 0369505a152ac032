"""Render a harness spec into a compilable proof harness and makefile.

Rendering is a pure function of the spec: the same spec always produces
byte-identical output, which the golden tests pin. Generated code targets
C11 and reaches the checker's intrinsics through the thin macro header in
``data/proof_intrinsics.h``, so a plain compiler can syntax-check the
output without the checker installed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from importlib import resources

from . import model as m
from .errors import Inapplicable, RenderRejected, UnresolvableType

INTRINSICS_HEADER = "proof_intrinsics.h"
ASSUME = "PROOF_ASSUME"
OBJECT_SIZE = "PROOF_OBJECT_SIZE"

_SIZE_NAMES = {"len", "length", "size", "sz", "count", "n", "num", "nbytes"}
_BYTE_POINTEES = {"char", "signed char", "unsigned char", "uint8_t", "int8_t", "void"}

_FNPTR_RE = re.compile(r"^(?P<ret>.+?)\s*\(\s*\*\s*\)\s*\((?P<args>.*)\)$")


def intrinsics_header_text() -> str:
    return resources.files("proofbench.data").joinpath(INTRINSICS_HEADER).read_text()


@dataclass(frozen=True)
class RenderedHarness:
    harness_source: str
    makefile: str
    file_layout: dict[str, str]


# ---------------------------------------------------------------------------
# Step 1: initial harness spec from the extracted signature
# ---------------------------------------------------------------------------


def scaffold_initial(target: m.TargetFunction, scope: m.UnitScope) -> m.HarnessSpec:
    """Build the first-cut spec: declare inputs, allocate pointers, call the
    target, and start every loop at bound 1. No preconditions, no stubs."""
    strategies: dict[str, m.InputStrategy] = {}
    size_candidates = [
        p.name for p in target.parameters
        if p.kind is m.ParamKind.PRIMITIVE_SCALAR and _looks_like_size(p.name)]
    taken: set[str] = set()

    for p in target.parameters:
        if p.kind is m.ParamKind.PRIMITIVE_SCALAR:
            strategies[p.name] = m.NondetScalarInput()
        elif p.kind is m.ParamKind.FUNCTION_POINTER:
            # Left nondeterministic until a non-termination diagnosis asks
            # for an empty stub.
            strategies[p.name] = m.NondetScalarInput()
        elif p.kind is m.ParamKind.PRIMITIVE_POINTER:
            sym = next((c for c in size_candidates if c not in taken), None)
            if sym is None:
                strategies[p.name] = m.SizedAllocationInput(
                    size_symbol=f"{p.name}_size", declares_size=True)
            else:
                taken.add(sym)
                strategies[p.name] = m.SizedAllocationInput(size_symbol=sym)
        elif p.kind is m.ParamKind.AGGREGATE_POINTER:
            byte_size = p.ctype.byte_size or p.byte_size_hint
            if byte_size is None:
                raise UnresolvableType(p.name)
            strategies[p.name] = m.AggregateAllocationInput(
                byte_size=byte_size, aggregate=p.ctype.pointee)

    bounds = tuple(
        m.LoopBoundSpec(lp.id, 1, m.BoundRationale.DEFAULT)
        for lp in target.reachable_loops)
    return m.HarnessSpec(
        target=target, scope=scope, input_strategies=strategies,
        loop_bounds=bounds, string_max=m.DEFAULT_STRING_MAX)


def _looks_like_size(name: str) -> bool:
    low = name.lower()
    if low in _SIZE_NAMES:
        return True
    return any(low.endswith(suffix) for suffix in ("_len", "_size", "_count", "len", "size"))


# ---------------------------------------------------------------------------
# C text helpers
# ---------------------------------------------------------------------------


def declare(ctype_text: str, name: str) -> str:
    """Turn an abstract type spelling into a declaration of ``name``."""
    if "(*)" in ctype_text:
        return ctype_text.replace("(*)", f"(*{name})", 1)
    if ctype_text.endswith("*"):
        return f"{ctype_text}{name}"
    return f"{ctype_text} {name}"


def fnptr_signature(ctype_text: str) -> tuple[str, list[str]]:
    """Split ``int (*)(int, char *)`` into return type and argument types."""
    match = _FNPTR_RE.match(ctype_text.strip())
    if not match:
        return "void", []
    args_text = match.group("args").strip()
    if args_text in ("", "void"):
        return match.group("ret").strip(), []
    return match.group("ret").strip(), [a.strip() for a in args_text.split(",")]


def subject_to_c(subject: str, spec: m.HarnessSpec) -> str:
    """Canonical dotted symbol paths spell field access through a pointer
    input as ``->`` in C. Field-path assumptions need the unit's struct
    definitions in scope (via H_INC) to compile outside the checker."""
    if "." not in subject:
        return subject
    root, rest = subject.split(".", 1)
    strat = spec.input_strategies.get(root)
    pointerish = isinstance(strat, (m.SizedAllocationInput, m.AggregateAllocationInput))
    if not pointerish:
        param = spec.target.parameter(root)
        pointerish = param is not None and param.ctype.text.rstrip().endswith("*")
    return f"{root}->{rest}" if pointerish else subject


def assumption_expr(model: m.ModelSpec, spec: m.HarnessSpec) -> str:
    """The boolean expression a model contributes; one model, one statement."""
    kind, detail = model.kind, model.detail
    subject = subject_to_c(model.subject, spec)
    if kind is m.ModelKind.POINTER_NOT_NULL:
        return f"{subject} != NULL"
    if kind is m.ModelKind.POINTER_AND_OFFSET:
        # subject is the offset applied to detail.base; keep it inside the
        # base pointer's allocation.
        assert isinstance(detail, m.PointerOffsetDetail)
        return f"{subject} <= {detail.offset_bound}"
    if kind is m.ModelKind.ALLOCATION_SIZE:
        assert isinstance(detail, m.AllocationSizeDetail)
        strat = spec.input_strategies.get(model.subject)
        if isinstance(strat, m.SizedAllocationInput):
            sized = strat.size_symbol
        else:
            sized = f"{OBJECT_SIZE}({subject})"
        parts = []
        if detail.lower is not None:
            parts.append(f"{sized} >= {detail.lower}")
        if detail.upper is not None:
            parts.append(f"{sized} <= {detail.upper}")
        return " && ".join(parts) if parts else "1"
    if kind is m.ModelKind.INTEGER_RANGE:
        assert isinstance(detail, m.IntegerRangeDetail)
        parts = []
        if detail.lower is not None:
            parts.append(f"{subject} >= {detail.lower}")
        if detail.upper is not None:
            parts.append(f"{subject} <= {detail.upper}")
        return " && ".join(parts) if parts else "1"
    if kind is m.ModelKind.INTEGER_RELATIONSHIP:
        assert isinstance(detail, m.IntegerRelationshipDetail)
        return f"{subject} {detail.comparator} {detail.other}"
    if kind is m.ModelKind.CONDITIONAL:
        assert isinstance(detail, m.ConditionalDetail)
        return f"!({detail.guard}) || ({assumption_expr(detail.inner, spec)})"
    raise TypeError(f"unknown model kind {kind}")  # pragma: no cover


def _struct_forward_decls(spec: m.HarnessSpec) -> list[str]:
    tags: set[str] = set()
    texts = [spec.target.return_type.text]
    for p in spec.target.parameters:
        texts.append(p.ctype.text)
        texts.append(p.ctype.pointee)
    for st in spec.stubs:
        if isinstance(st.return_strategy, m.FreshAllocationNotNull):
            texts.append(st.return_strategy.pointee)
        texts.append(st.signature)
    for g in spec.target.globals_read:
        texts.append(g.ctype)
    for text in texts:
        for kw, tag in re.findall(r"\b(struct|union)\s+([A-Za-z_]\w*)", text or ""):
            tags.add(f"{kw} {tag}")
    return [f"{tag};" for tag in sorted(tags)]


def _stub_return_ctype(st: m.FunctionModel) -> str:
    rs = st.return_strategy
    if isinstance(rs, m.NondetByType):
        return rs.ctype
    if isinstance(rs, m.FreshAllocationNotNull):
        pointee = rs.pointee or "void"
        return f"{pointee} *"
    return rs.ctype


def _render_stub(st: m.FunctionModel, spec: m.HarnessSpec) -> list[str]:
    ret_ct = _stub_return_ctype(st)
    params = st.signature.strip() or "void"
    lines = [f"{declare(ret_ct, st.target)}({params})", "{"]
    rs = st.return_strategy
    body: list[str] = []

    for oa in st.output_assignments:
        tmp = f"{oa.symbol}_out"
        if isinstance(oa.strategy, m.NondetByType):
            body.append(f"    {declare(oa.strategy.ctype, tmp)};")
            body.append(f"    *{oa.symbol} = {tmp};")
        elif isinstance(oa.strategy, m.FreshAllocationNotNull):
            size = oa.strategy.size_lower or "1"
            body.append(f"    *{oa.symbol} = malloc({size});")
            body.append(f"    {ASSUME}(*{oa.symbol} != NULL);")
        else:
            body.append(f"    {declare(oa.strategy.ctype, tmp)};")
            body.append(f"    {ASSUME}({oa.strategy.constraint});")
            body.append(f"    *{oa.symbol} = {tmp};")

    if isinstance(rs, m.NondetByType):
        if rs.ctype.strip() != "void":
            body.append(f"    {declare(rs.ctype, 'ret')};")
            body.append("    return ret;")
    elif isinstance(rs, m.FreshAllocationNotNull):
        guards = ["ret != NULL"]
        if rs.size_lower is not None and rs.size_lower == rs.size_upper:
            body.append(f"    {declare(ret_ct, 'ret')} = malloc({rs.size_lower});")
        else:
            body.append("    size_t ret_size;")
            if rs.size_lower is not None:
                guards.append(f"ret_size >= {rs.size_lower}")
            if rs.size_upper is not None:
                guards.append(f"ret_size <= {rs.size_upper}")
            body.append(f"    {declare(ret_ct, 'ret')} = malloc(ret_size);")
        body.append(f"    {ASSUME}({' && '.join(guards)});")
        body.append("    return ret;")
    else:
        body.append(f"    {declare(rs.ctype, 'ret')};")
        body.append(f"    {ASSUME}({rs.constraint});")
        body.append("    return ret;")

    lines.extend(body)
    lines.append("}")
    return lines


def _render_fnptr_stub(param: m.Parameter) -> tuple[list[str], str]:
    """Empty-function stub for a function-pointer input; returns the
    definition lines and the initializing declaration for the harness body."""
    ret_ct, arg_types = fnptr_signature(param.ctype.text)
    stub_name = f"{param.name}_stub"
    args = ", ".join(declare(t, f"a{i}") for i, t in enumerate(arg_types)) or "void"
    lines = [f"static {declare(ret_ct, stub_name)}({args})", "{"]
    for i in range(len(arg_types)):
        lines.append(f"    (void)a{i};")
    if ret_ct.strip() != "void":
        lines.append(f"    {declare(ret_ct, 'ret')};")
        lines.append("    return ret;")
    lines.append("}")
    init = f"{declare(param.ctype.text, param.name)} = {stub_name};"
    return lines, init


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def render(spec: m.HarnessSpec) -> RenderedHarness:
    violations = m.validate(spec)
    if violations:
        raise RenderRejected(violations)

    fn = spec.target.name
    harness_source = _render_harness_source(spec)
    makefile = _render_makefile(spec)
    layout = {
        f"proofs/{fn}/{fn}_harness.c": harness_source,
        f"proofs/{fn}/Makefile": makefile,
        f"proofs/{fn}/{INTRINSICS_HEADER}": intrinsics_header_text(),
        f"proofs/{fn}/cbmc-proof.txt": f"# Proof directory marker for {fn}\n",
    }
    return RenderedHarness(harness_source, makefile, layout)


def _render_harness_source(spec: m.HarnessSpec) -> str:
    target = spec.target
    out: list[str] = []
    out.append("/*")
    out.append(f" * Proof harness for {target.name}.")
    out.append(" * Generated from a harness spec; edit the spec, not this file.")
    out.append(" */")
    out.append("#include <stddef.h>")
    out.append("#include <stdint.h>")
    out.append("#include <stdlib.h>")
    out.append("")
    out.append(f'#include "{INTRINSICS_HEADER}"')
    out.append("")

    fwd = _struct_forward_decls(spec)
    if fwd:
        out.extend(fwd)
        out.append("")

    proto_params = ", ".join(
        declare(p.ctype.text, p.name) for p in target.parameters) or "void"
    out.append(f"extern {declare(target.return_type.text, target.name)}({proto_params});")
    out.append("")

    if target.globals_read:
        for g in target.globals_read:
            out.append(f"extern {declare(g.ctype, g.name)};")
        out.append("")

    fnptr_inits: dict[str, str] = {}
    stub_param_names = {st.target for st in spec.stubs}
    for st in spec.stubs:
        param = target.parameter(st.target)
        if param is not None and param.kind is m.ParamKind.FUNCTION_POINTER:
            lines, init = _render_fnptr_stub(param)
            fnptr_inits[param.name] = init
            out.extend(lines)
            out.append("")
        else:
            out.extend(_render_stub(st, spec))
            out.append("")

    out.append("void harness(void)")
    out.append("{")
    body: list[str] = []

    # Scalar inputs first: allocations below may use them as sizes.
    for p in target.parameters:
        strat = spec.input_strategies.get(p.name)
        if not isinstance(strat, m.NondetScalarInput):
            continue
        if p.name in fnptr_inits:
            body.append(f"    {fnptr_inits[p.name]}")
        else:
            body.append(f"    {declare(p.ctype.text, p.name)};")

    # Allocations in parameter order, each immediately followed by its
    # not-null assumption (the checker lets malloc fail by default) and any
    # explicit not-null preconditions on the same symbol.
    attached: set[int] = set()
    for p in target.parameters:
        strat = spec.input_strategies.get(p.name)
        if isinstance(strat, m.SizedAllocationInput):
            if strat.declares_size:
                body.append(f"    size_t {strat.size_symbol};")
            pointee = p.ctype.pointee or "void"
            if pointee in _BYTE_POINTEES:
                size_expr = strat.size_symbol
            else:
                size_expr = f"sizeof({pointee}) * {strat.size_symbol}"
            body.append(f"    {declare(p.ctype.text, p.name)} = malloc({size_expr});")
            body.append(f"    {ASSUME}({p.name} != NULL);")
        elif isinstance(strat, m.AggregateAllocationInput):
            note = f" /* sizeof({strat.aggregate}) */" if strat.aggregate else ""
            body.append(f"    {declare(p.ctype.text, p.name)} = "
                        f"malloc({strat.byte_size}){note};")
            body.append(f"    {ASSUME}({p.name} != NULL);")
        else:
            continue
        for i, model in enumerate(spec.preconditions):
            if (model.kind is m.ModelKind.POINTER_NOT_NULL
                    and model.subject == p.name and i not in attached):
                body.append(f"    {ASSUME}({assumption_expr(model, spec)});")
                attached.add(i)

    for model in spec.global_models:
        body.append(f"    {ASSUME}({assumption_expr(model, spec)});")

    for i, model in enumerate(spec.preconditions):
        if i in attached:
            continue
        body.append(f"    {ASSUME}({assumption_expr(model, spec)});")

    args = ", ".join(p.name for p in target.parameters)
    body.append(f"    {target.name}({args});")

    out.extend(body)
    out.append("}")
    out.append("")
    # Loop bounds live in the makefile; keep a summary here for readers.
    del stub_param_names
    return "\n".join(out)


def _render_makefile(spec: m.HarnessSpec) -> str:
    target = spec.target
    link_paths = list(spec.scope.linked_sources)
    for g in target.globals_read:
        if g.defining_file and g.defining_file not in link_paths:
            link_paths.append(g.defining_file)

    def rooted(path: str) -> str:
        return path if path.startswith("/") else f"$(ROOT)/{path}"

    flags = ["--nondet-static"]
    if spec.loop_bounds:
        entries = ",".join(f"{lb.loop}:{lb.bound}" for lb in spec.loop_bounds)
        flags.append(f"--unwindset {entries}")
    flags.extend(spec.extra_checker_flags)

    defines = " ".join(
        f"-D{k}={spec.scope.config_defines[k]}"
        for k in sorted(spec.scope.config_defines))
    includes = " ".join(
        (f"-I{d}" if d.startswith("/") else f"-I$(ROOT)/{d}")
        for d in spec.scope.include_dirs)

    out = [
        f"# Proof makefile for {target.name}.",
        "",
        "# Defines the root of the project.",
        "ROOT = ../..",
        "",
        "# Defines file(s) to link to harness, MUST be a full path!",
        f"LINK = {' '.join(rooted(p) for p in link_paths)}",
        "",
        "# Harness to utilize, omit the extension!",
        f"H_ENTRY = {target.name}_harness",
        "",
        "# Extra CBMC flags to be passed during CBMC analysis",
        f"H_CBMCFLAGS = {' '.join(flags)}",
        "",
        "# Extra header definitions to be passed during compilation",
        f"H_DEF = {defines}".rstrip(),
        "",
        "# Extra CBMC includes to be passed during compilation",
        f"H_INC = {includes}".rstrip(),
        "",
        "# Include our special build file",
        "include $(ROOT)/Makefile.include",
        "",
    ]
    return "\n".join(out)


# ---------------------------------------------------------------------------
# Interventions
# ---------------------------------------------------------------------------


def apply(spec: m.HarnessSpec, iv: m.Intervention) -> m.HarnessSpec:
    """Apply one intervention, returning a new spec.

    Pure and, for model/bound payloads, idempotent: re-applying an identical
    intervention returns an equal spec.
    """
    kind = iv.kind
    if kind is m.InterventionKind.ADD_MODEL:
        if iv.model is None:
            raise Inapplicable("add_model carries no model")
        return _apply_add_model(spec, iv.model)
    if kind is m.InterventionKind.ADD_STUB:
        if iv.stub is None:
            raise Inapplicable("add_stub carries no stub")
        existing = spec.stub_for(iv.stub.target)
        if existing == iv.stub:
            return spec
        if existing is not None:
            stubs = tuple(iv.stub if st.target == iv.stub.target else st
                          for st in spec.stubs)
        else:
            stubs = spec.stubs + (iv.stub,)
        return replace(spec, stubs=stubs)
    if kind is m.InterventionKind.SET_LOOP_BOUND:
        if iv.loop_bound is None:
            raise Inapplicable("set_loop_bound carries no bound")
        if spec.target.loop(iv.loop_bound.loop) is None:
            raise Inapplicable(f"no reachable loop {iv.loop_bound.loop}")
        if spec.bound_for(iv.loop_bound.loop) == iv.loop_bound:
            return spec
        replaced = False
        bounds = []
        for lb in spec.loop_bounds:
            if lb.loop == iv.loop_bound.loop:
                bounds.append(iv.loop_bound)
                replaced = True
            else:
                bounds.append(lb)
        if not replaced:
            bounds.append(iv.loop_bound)
        return replace(spec, loop_bounds=tuple(bounds))
    if kind is m.InterventionKind.EXPAND_SCOPE:
        if not iv.path:
            raise Inapplicable("expand_scope carries no path")
        if iv.path in spec.scope.linked_sources:
            return spec
        scope = replace(spec.scope,
                        linked_sources=spec.scope.linked_sources + (iv.path,))
        return replace(spec, scope=scope)
    if kind is m.InterventionKind.SET_CONFIG:
        if not iv.define:
            raise Inapplicable("set_config carries no define")
        defines = dict(spec.scope.config_defines)
        if defines.get(iv.define) == iv.value:
            return spec
        defines[iv.define] = iv.value
        return replace(spec, scope=replace(spec.scope, config_defines=defines))
    if kind is m.InterventionKind.RAISE_STRING_MAX:
        if iv.string_max == spec.string_max:
            return spec
        if iv.string_max < spec.string_max:
            raise Inapplicable(
                f"string bound {iv.string_max} is below the current {spec.string_max}")
        return replace(spec, string_max=iv.string_max)
    if kind in (m.InterventionKind.MARK_REAL_DEFECT, m.InterventionKind.MARK_DEAD_CODE):
        # Acknowledgments live in the session log, not in the spec.
        return spec
    raise Inapplicable(f"unknown intervention kind {kind}")  # pragma: no cover


def _apply_add_model(spec: m.HarnessSpec, model: m.ModelSpec) -> m.HarnessSpec:
    root = re.split(r"[.\[]", model.subject, maxsplit=1)[0]
    if root not in m.model_subjects(spec):
        raise Inapplicable(f"model subject {model.subject} is not visible in the harness")
    global_names = {g.name for g in spec.target.globals_read}
    if root in global_names:
        if model in spec.global_models:
            return spec
        return replace(spec, global_models=spec.global_models + (model,))
    if model in spec.preconditions:
        return spec
    return replace(spec, preconditions=spec.preconditions + (model,))
