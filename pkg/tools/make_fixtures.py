#!/usr/bin/env python3
"""Regenerate the checked-in test fixtures.

Produces, under tests/fixtures/:
  units/<name>/      seeded-defect C units with mock scenarios and patched
                     twins (expected roots/kinds in meta.json are hand-picked
                     constants; the generator only assembles files and sanity
                     checks that the scripted stage keys appear in real
                     rendered output)
  golden/<case>/     harness/makefile golden files plus the spec they render
  reports/           captured checker outputs (JSON/XML) with metadata
  loops.json         hand-labeled loop classification set

Run from the repository root: python tools/make_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from proofbench import codegen, jsonio  # noqa: E402
from proofbench import model as m  # noqa: E402

FIXTURES = REPO / "tests" / "fixtures"
UNITS = FIXTURES / "units"


# ---------------------------------------------------------------------------
# Small builders
# ---------------------------------------------------------------------------


def L(text: str, needle: str) -> int:
    """1-based line number of the unique line containing needle."""
    hits = [i + 1 for i, line in enumerate(text.splitlines()) if needle in line]
    if len(hits) != 1:
        raise SystemExit(f"needle {needle!r} matched lines {hits}")
    return hits[0]


def stmt_lines(text: str, fn_needle: str) -> list[int]:
    """Executable-ish lines of one function: statements and branch/loop
    heads between the function's opening line and its closing brace."""
    lines = text.splitlines()
    start = L(text, fn_needle)
    depth = 0
    out = []
    for i in range(start - 1, len(lines)):
        line = lines[i]
        depth += line.count("{") - line.count("}")
        if i >= start:
            stripped = line.strip()
            if not stripped or stripped.startswith(("#", "/*", "*", "//", "}")):
                if depth <= 0 and i > start:
                    break
                continue
            if (";" in stripped
                    or stripped.startswith(("if ", "for ", "while ", "switch "))):
                out.append(i + 1)
        if depth <= 0 and i > start:
            break
    return out


def loc(file: str, line: int, fn: str) -> dict:
    return {"file": file, "line": line, "function": fn}


def prop(pid: str, klass: str, status: str, file: str, line: int, fn: str,
         desc: str = "") -> dict:
    return {"id": pid, "class": klass, "status": status,
            "location": loc(file, line, fn), "description": desc, "raw_class": ""}


def steps(*entries: dict) -> dict:
    out = []
    for i, e in enumerate(entries, start=1):
        out.append({"index": i,
                    "location": e.get("loc", {"file": "", "line": 0, "function": ""}),
                    "lhs": e.get("lhs", ""), "value": e.get("value", ""),
                    "call": e.get("call", "")})
    return {"steps": out}


def coverage(file: str, fn: str, all_lines: list[int],
             uncovered: list[int] = (), unreachable: list[int] = ()) -> list[dict]:
    out = []
    for line in all_lines:
        if line in uncovered:
            status = "uncovered"
        elif line in unreachable:
            status = "unreachable"
        else:
            status = "covered"
        out.append({"file": file, "line": line, "function": fn, "status": status})
    return out


def report(properties=(), cov=(), traces=None, status="completed",
           solver=(4000, 16000, 0.3), wall=0.8, diagnostics=(),
           elapsed=0.0) -> dict:
    return {
        "run_status": {"kind": status, "message": "",
                       "elapsed_seconds": elapsed},
        "properties": list(properties),
        "coverage": list(cov),
        "traces": traces or {},
        "solver_stats": {"variable_count": solver[0], "clause_count": solver[1],
                         "solve_seconds": solver[2]},
        "wall_seconds": wall,
        "diagnostics": list(diagnostics),
    }


def stage(name: str, rep: dict, harness_contains=(), harness_lacks=(),
          makefile_contains=(), makefile_lacks=()) -> dict:
    return {"name": name,
            "when": {"harness_contains": list(harness_contains),
                     "harness_lacks": list(harness_lacks),
                     "makefile_contains": list(makefile_contains),
                     "makefile_lacks": list(makefile_lacks)},
            "report": rep}


def ptr(name: str, pointee: str = "char", text: str = "") -> m.Parameter:
    return m.Parameter(name, m.ParamKind.PRIMITIVE_POINTER,
                       m.CTypeRef(text or f"{pointee} *", pointee=pointee))


def cptr(name: str, pointee: str) -> m.Parameter:
    return m.Parameter(name, m.ParamKind.PRIMITIVE_POINTER,
                       m.CTypeRef(f"const {pointee} *", pointee=pointee))


def scalar(name: str, ctype: str = "size_t") -> m.Parameter:
    return m.Parameter(name, m.ParamKind.PRIMITIVE_SCALAR, m.CTypeRef(ctype))


def agg(name: str, tag: str, size: int, const: bool = False) -> m.Parameter:
    prefix = "const " if const else ""
    return m.Parameter(name, m.ParamKind.AGGREGATE_POINTER,
                       m.CTypeRef(f"{prefix}struct {tag} *",
                                  pointee=f"struct {tag}", byte_size=size))


def write_json(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(jsonio.canonical_bytes(doc))


def unit_dir(name: str) -> Path:
    return UNITS / name


class Unit:
    """Collects one seeded-defect unit and emits its fixture files."""

    def __init__(self, name: str, function: str, category: str):
        self.name = name
        self.function = function
        self.category = category
        self.sources: dict[str, str] = {}
        self.patched: dict[str, str] = {}
        self.scope_files: list[str] | None = None  # default: every source
        self.defect: dict = {}
        self.target: m.TargetFunction | None = None
        self.patched_target: m.TargetFunction | None = None
        self.stages: list[dict] = []
        self.patched_stages: list[dict] = []
        self.traces_meta: list[dict] = []
        self.notes = ""

    def rel(self, filename: str) -> str:
        return f"tests/fixtures/units/{self.name}/{filename}"

    def rel_patched(self, filename: str) -> str:
        return f"tests/fixtures/units/{self.name}/patched/{filename}"

    def scope_sources(self) -> list[str]:
        return [self.rel(fn) for fn in (self.scope_files or self.sources)]

    def scope_patched(self) -> list[str]:
        return [self.rel_patched(fn) for fn in (self.scope_files or self.patched)]

    def emit(self) -> None:
        folder = unit_dir(self.name)
        folder.mkdir(parents=True, exist_ok=True)
        for filename, text in self.sources.items():
            (folder / filename).write_text(text)
        for filename, text in self.patched.items():
            patched_path = folder / "patched" / filename
            patched_path.parent.mkdir(parents=True, exist_ok=True)
            patched_path.write_text(text)
        assert self.target is not None and self.patched_target is not None
        write_json(folder / "scenario.json", {
            "schema": 1, "id": self.name,
            "symbols": {self.function: jsonio.encode_target(self.target)},
            "stages": self.stages,
        })
        write_json(folder / "scenario_patched.json", {
            "schema": 1, "id": f"{self.name}-patched",
            "symbols": {self.function: jsonio.encode_target(self.patched_target)},
            "stages": self.patched_stages,
        })
        write_json(folder / "meta.json", {
            "schema": 1, "name": self.name, "function": self.function,
            "category": self.category,
            "defect": self.defect,
            "scope": self.scope_sources(),
            "scope_patched": self.scope_patched(),
            "scenario": "scenario.json",
            "scenario_patched": "scenario_patched.json",
            "traces": self.traces_meta,
            "notes": self.notes,
        })
        self._sanity_check()

    def _sanity_check(self) -> None:
        """The scripted stage keys must be producible by the real renderer:
        the initial scaffold must match exactly one stage (the last)."""
        scope = m.UnitScope(linked_sources=tuple(self.scope_sources()))
        spec = codegen.scaffold_initial(self.target, scope)
        problems = m.validate(spec)
        if problems:
            raise SystemExit(f"{self.name}: scaffold invalid: {problems}")
        codegen.render(spec)


UNITS_BUILT: list[Unit] = []


def build_unit(unit: Unit) -> None:
    UNITS_BUILT.append(unit)
    unit.emit()


# ---------------------------------------------------------------------------
# Unit 1: out-of-bounds write through an unchecked length (memcpy pattern)
# ---------------------------------------------------------------------------


def unit_oob_write_len() -> None:
    u = Unit("oob_write_len", "frame_store", "oob_write_unchecked_length")
    src = """\
#include <stddef.h>
#include <stdint.h>
#include <string.h>

struct frame_ctx {
    uint32_t seq[3];
    uint8_t payload[64];
};

struct frame_ctx *get_current_ctx(void);

int frame_store(char *data, size_t len)
{
    struct frame_ctx *ctx = get_current_ctx();
    uint32_t acc = 0;
    for (int i = 0; i < 3; i++) {
        acc += ctx->seq[i];
    }
    memcpy(ctx->payload, data, len);
    return (int)acc;
}
"""
    patched = src.replace(
        "    memcpy(ctx->payload, data, len);",
        "    if (len > sizeof(ctx->payload)) {\n"
        "        return -1;\n"
        "    }\n"
        "    memcpy(ctx->payload, data, len);")
    u.sources["unit.c"] = src
    u.patched["unit.c"] = patched
    file, pfile = u.rel("unit.c"), u.rel_patched("unit.c")
    fn = "frame_store"

    def target_for(text: str, path: str) -> m.TargetFunction:
        return m.TargetFunction(
            name=fn, source_file=path,
            parameters=(ptr("data"), scalar("len")),
            return_type=m.CTypeRef("int"),
            reachable_loops=(m.LoopRef(f"{fn}.0", line=L(text, "for (int i = 0"),
                                       condition="i < 3", step="i++"),),
            buffer_hints=(m.BufferHint("ctx->payload", 64,
                                       root="get_current_ctx"),),
        )

    u.target = target_for(src, file)
    u.patched_target = target_for(patched, pfile)
    defect_line = L(src, "memcpy(ctx->payload, data, len);")
    deref_line = L(src, "acc += ctx->seq[i];")
    u.defect = {"file": "unit.c", "line": defect_line,
                "property_class": "array_bounds"}

    all_lines = stmt_lines(src, "int frame_store")
    below_loop = [n for n in all_lines if n >= defect_line]
    trace_bounds = steps(
        {"lhs": "len", "value": "4096", "loc": loc(file, 0, "harness")},
        {"lhs": "data", "value": "malloc(len)", "loc": loc(file, 0, "harness")},
        {"call": fn, "loc": loc(file, L(src, "int frame_store"), "harness")},
        {"call": "get_current_ctx", "loc": loc("", 0, fn)},
        {"lhs": "ctx", "value": "(struct frame_ctx *)nondet_ptr",
         "loc": loc(file, L(src, "ctx = get_current_ctx"), fn)},
        {"lhs": "acc", "value": "0", "loc": loc(file, L(src, "uint32_t acc"), fn)},
        {"lhs": "ctx.payload", "value": "nondet",
         "loc": loc(file, defect_line, fn)},
    )
    trace_deref = steps(
        {"lhs": "len", "value": "0", "loc": loc(file, 0, "harness")},
        {"lhs": "data", "value": "malloc(len)", "loc": loc(file, 0, "harness")},
        {"call": "get_current_ctx", "loc": loc("", 0, fn)},
        {"lhs": "ctx", "value": "NULL", "loc": loc(file, L(src, "ctx = get_current_ctx"), fn)},
        {"lhs": "acc", "value": "0", "loc": loc(file, L(src, "uint32_t acc"), fn)},
    )
    p_bounds = prop(f"{fn}.array_bounds.1", "array_bounds", "fail", file,
                    defect_line, fn, "memcpy destination upper bound")
    p_deref = prop(f"{fn}.pointer_dereference.1", "pointer_dereference", "fail",
                   file, deref_line, fn, "dereference failure: pointer NULL")
    p_unwind = prop(f"{fn}.unwind.0", "unwinding_assertion", "fail", file,
                    L(src, "for (int i = 0"), fn, "unwinding assertion loop 0")

    u.stages = [
        stage("resolved", report(
            properties=[p_bounds | {"status": "pass"},
                        p_deref | {"status": "pass"}],
            cov=coverage(file, fn, all_lines),
            solver=(5200, 20400, 0.21), wall=0.62),
            harness_contains=["len <= 64"]),
        stage("stubbed", report(
            properties=[p_deref | {"status": "pass"}, p_bounds],
            cov=coverage(file, fn, all_lines),
            traces={p_bounds["id"]: trace_bounds},
            solver=(5100, 19800, 0.19), wall=0.58),
            harness_contains=["get_current_ctx(void)"],
            makefile_contains=["frame_store.0:4"]),
        stage("bounded", report(
            properties=[p_deref, p_bounds],
            cov=coverage(file, fn, all_lines),
            traces={p_deref["id"]: trace_deref, p_bounds["id"]: trace_bounds},
            solver=(5050, 19500, 0.18), wall=0.55),
            makefile_contains=["frame_store.0:4"]),
        stage("initial", report(
            properties=[p_unwind],
            cov=coverage(file, fn, all_lines, uncovered=below_loop),
            solver=(1800, 7000, 0.05), wall=0.31)),
    ]

    pall = stmt_lines(patched, "int frame_store")
    p_defect_line = L(patched, "memcpy(ctx->payload, data, len);")
    pp_deref = prop(f"{fn}.pointer_dereference.1", "pointer_dereference", "fail",
                    pfile, L(patched, "acc += ctx->seq[i];"), fn,
                    "dereference failure: pointer NULL")
    pp_unwind = prop(f"{fn}.unwind.0", "unwinding_assertion", "fail", pfile,
                     L(patched, "for (int i = 0"), fn, "unwinding assertion loop 0")
    ptrace = steps(
        {"lhs": "len", "value": "0", "loc": loc(pfile, 0, "harness")},
        {"lhs": "data", "value": "malloc(len)", "loc": loc(pfile, 0, "harness")},
        {"call": "get_current_ctx", "loc": loc("", 0, fn)},
        {"lhs": "ctx", "value": "NULL",
         "loc": loc(pfile, L(patched, "ctx = get_current_ctx"), fn)},
    )
    u.patched_stages = [
        stage("resolved", report(
            properties=[pp_deref | {"status": "pass"}],
            cov=coverage(pfile, fn, pall),
            solver=(5000, 19000, 0.2), wall=0.6),
            harness_contains=["get_current_ctx(void)"],
            makefile_contains=["frame_store.0:4"]),
        stage("bounded", report(
            properties=[pp_deref],
            cov=coverage(pfile, fn, pall),
            traces={pp_deref["id"]: ptrace},
            solver=(4900, 18700, 0.18), wall=0.52),
            makefile_contains=["frame_store.0:4"]),
        stage("initial", report(
            properties=[pp_unwind],
            cov=coverage(pfile, fn, pall,
                         uncovered=[n for n in pall if n >= p_defect_line - 2]),
            solver=(1700, 6800, 0.05), wall=0.3)),
    ]
    u.traces_meta = [
        {"stage": "bounded", "property": p_deref["id"],
         "root": "undefined_function_return", "subject": "get_current_ctx",
         "intervention": "add_stub", "model_kind": None},
        {"stage": "stubbed", "property": p_bounds["id"],
         "root": "unknown_input", "subject": "len",
         "intervention": "add_model", "model_kind": "integer_relationship"},
    ]
    u.notes = "memcpy into a fixed payload with the length never checked"
    build_unit(u)


# ---------------------------------------------------------------------------
# Unit 2: out-of-bounds read driven by a loop count
# ---------------------------------------------------------------------------


def unit_oob_read_loop() -> None:
    u = Unit("oob_read_loop", "block_checksum", "oob_read_via_loop")
    src = """\
#include <stddef.h>
#include <stdint.h>

uint32_t block_checksum(const uint8_t *buf, size_t buf_len, size_t count)
{
    uint32_t sum = 0;
    for (size_t i = 0; i < count; i++) {
        sum += buf[i];
    }
    return sum;
}
"""
    patched = src.replace(
        "    uint32_t sum = 0;",
        "    uint32_t sum = 0;\n"
        "    if (count > buf_len) {\n"
        "        return 0;\n"
        "    }")
    u.sources["unit.c"] = src
    u.patched["unit.c"] = patched
    file, pfile = u.rel("unit.c"), u.rel_patched("unit.c")
    fn = "block_checksum"

    def target_for(text: str, path: str) -> m.TargetFunction:
        return m.TargetFunction(
            name=fn, source_file=path,
            parameters=(cptr("buf", "uint8_t"), scalar("buf_len"),
                        scalar("count")),
            return_type=m.CTypeRef("uint32_t"),
            reachable_loops=(m.LoopRef(f"{fn}.0",
                                       line=L(text, "for (size_t i = 0"),
                                       condition="i < count", step="i++"),),
        )

    u.target = target_for(src, file)
    u.patched_target = target_for(patched, pfile)
    defect_line = L(src, "sum += buf[i];")
    u.defect = {"file": "unit.c", "line": defect_line,
                "property_class": "array_bounds"}

    all_lines = stmt_lines(src, "uint32_t block_checksum")
    p_bounds = prop(f"{fn}.array_bounds.1", "array_bounds", "fail", file,
                    defect_line, fn, "array `buf' upper bound")
    p_unwind = prop(f"{fn}.unwind.0", "unwinding_assertion", "fail", file,
                    L(src, "for (size_t i = 0"), fn, "unwinding assertion loop 0")
    trace = steps(
        {"lhs": "count", "value": "1", "loc": loc(file, 0, "harness")},
        {"lhs": "buf_len", "value": "0", "loc": loc(file, 0, "harness")},
        {"lhs": "buf", "value": "malloc(buf_len)", "loc": loc(file, 0, "harness")},
        {"lhs": "sum", "value": "0", "loc": loc(file, L(src, "uint32_t sum"), fn)},
        {"lhs": "i", "value": "0", "loc": loc(file, L(src, "for (size_t i = 0"), fn)},
        {"lhs": "sum", "value": "buf[i]", "loc": loc(file, defect_line, fn)},
    )
    u.stages = [
        stage("resolved", report(
            properties=[p_bounds | {"status": "pass"},
                        p_unwind | {"status": "pass"}],
            cov=coverage(file, fn, all_lines),
            solver=(2400, 9400, 0.11), wall=0.4),
            harness_contains=["count <= buf_len"]),
        stage("bounded", report(
            properties=[p_bounds, p_unwind | {"status": "pass"}],
            cov=coverage(file, fn, all_lines),
            traces={p_bounds["id"]: trace},
            solver=(2300, 9100, 0.1), wall=0.38),
            makefile_contains=["block_checksum.0:2"]),
        stage("initial", report(
            properties=[p_bounds, p_unwind],
            cov=coverage(file, fn, all_lines),
            traces={p_bounds["id"]: trace},
            solver=(1500, 6100, 0.06), wall=0.3)),
    ]
    pall = stmt_lines(patched, "uint32_t block_checksum")
    pp_unwind = prop(f"{fn}.unwind.0", "unwinding_assertion", "fail", pfile,
                     L(patched, "for (size_t i = 0"), fn,
                     "unwinding assertion loop 0")
    u.patched_stages = [
        stage("resolved", report(
            properties=[pp_unwind | {"status": "pass"}],
            cov=coverage(pfile, fn, pall),
            solver=(2300, 9000, 0.1), wall=0.36),
            makefile_contains=["block_checksum.0:2"]),
        stage("initial", report(
            properties=[pp_unwind],
            cov=coverage(pfile, fn, pall),
            solver=(1500, 6000, 0.06), wall=0.28)),
    ]
    u.traces_meta = [
        {"stage": "bounded", "property": p_bounds["id"],
         "root": "unknown_input", "subject": "count",
         "intervention": "add_model", "model_kind": "integer_relationship"},
    ]
    u.notes = "loop reads count entries from a buffer sized by buf_len"
    build_unit(u)


# ---------------------------------------------------------------------------
# Unit 3: null dereference of an unchecked allocation
# ---------------------------------------------------------------------------


def unit_null_deref_alloc() -> None:
    u = Unit("null_deref_alloc", "conn_open", "null_deref_unchecked_allocation")
    src = """\
#include <stdlib.h>
#include <string.h>

struct conn_state {
    int fd;
    char tag[8];
};

struct conn_state *conn_open(int fd, const char *tag, size_t tag_len)
{
    struct conn_state *st = malloc(sizeof(struct conn_state));
    st->fd = fd;
    if (tag_len > sizeof(st->tag)) {
        tag_len = sizeof(st->tag);
    }
    memcpy(st->tag, tag, tag_len);
    return st;
}
"""
    patched = src.replace(
        "    st->fd = fd;",
        "    if (st == NULL) {\n"
        "        return NULL;\n"
        "    }\n"
        "    st->fd = fd;")
    u.sources["unit.c"] = src
    u.patched["unit.c"] = patched
    file, pfile = u.rel("unit.c"), u.rel_patched("unit.c")
    fn = "conn_open"

    def target_for(text: str, path: str) -> m.TargetFunction:
        return m.TargetFunction(
            name=fn, source_file=path,
            parameters=(scalar("fd", "int"), cptr("tag", "char"),
                        scalar("tag_len")),
            return_type=m.CTypeRef("struct conn_state *",
                                   pointee="struct conn_state"),
        )

    u.target = target_for(src, file)
    u.patched_target = target_for(patched, pfile)
    defect_line = L(src, "st->fd = fd;")
    u.defect = {"file": "unit.c", "line": defect_line,
                "property_class": "pointer_dereference"}

    all_lines = stmt_lines(src, "struct conn_state *conn_open")
    p_deref = prop(f"{fn}.pointer_dereference.1", "pointer_dereference", "fail",
                   file, defect_line, fn, "dereference failure: pointer NULL")
    trace = steps(
        {"lhs": "fd", "value": "3", "loc": loc(file, 0, "harness")},
        {"lhs": "tag_len", "value": "2", "loc": loc(file, 0, "harness")},
        {"lhs": "tag", "value": "malloc(tag_len)", "loc": loc(file, 0, "harness")},
        {"call": fn, "loc": loc(file, L(src, "struct conn_state *conn_open"),
                                "harness")},
        {"lhs": "st", "value": "(struct conn_state *)malloc(16)",
         "loc": loc(file, L(src, "st = malloc"), fn)},
        {"lhs": "st.fd", "value": "3", "loc": loc(file, defect_line, fn)},
    )
    u.stages = [
        stage("exposed", report(
            properties=[p_deref],
            cov=coverage(file, fn, all_lines),
            traces={p_deref["id"]: trace},
            solver=(900, 3500, 0.03), wall=0.22)),
    ]
    pall = stmt_lines(patched, "struct conn_state *conn_open")
    u.patched_stages = [
        stage("clean", report(
            properties=[p_deref | {"status": "pass",
                                   "location": loc(pfile, L(patched, "st->fd = fd;"),
                                                   fn)}],
            cov=coverage(pfile, fn, pall),
            solver=(950, 3600, 0.03), wall=0.23)),
    ]
    u.traces_meta = [
        {"stage": "exposed", "property": p_deref["id"],
         "root": "local_unvalidated_field", "subject": "st",
         "intervention": "mark_real_defect", "model_kind": None},
    ]
    u.notes = "malloc result used before the null check that never comes"
    build_unit(u)


# ---------------------------------------------------------------------------
# Unit 4: offset + size wraps around a 16-bit check (pointer arithmetic)
# ---------------------------------------------------------------------------


def unit_int_overflow_offset() -> None:
    u = Unit("int_overflow_offset", "rbuf_add", "integer_relationship_overflow")
    src = """\
#include <stddef.h>
#include <stdint.h>
#include <string.h>

int rbuf_add(uint8_t *rbuf, size_t rbuf_len, const uint8_t *frag,
             uint16_t offset, uint16_t frag_size)
{
    if ((uint16_t)(offset + frag_size) > rbuf_len) {
        return -1;
    }
    memcpy(rbuf + offset, frag, frag_size);
    return 0;
}
"""
    patched = src.replace(
        "    if ((uint16_t)(offset + frag_size) > rbuf_len) {",
        "    if ((size_t)offset + (size_t)frag_size > rbuf_len) {")
    u.sources["unit.c"] = src
    u.patched["unit.c"] = patched
    file, pfile = u.rel("unit.c"), u.rel_patched("unit.c")
    fn = "rbuf_add"

    def target_for(text: str, path: str) -> m.TargetFunction:
        return m.TargetFunction(
            name=fn, source_file=path,
            parameters=(ptr("rbuf", "uint8_t"), scalar("rbuf_len"),
                        cptr("frag", "uint8_t"), scalar("offset", "uint16_t"),
                        scalar("frag_size", "uint16_t")),
            return_type=m.CTypeRef("int"),
        )

    u.target = target_for(src, file)
    u.patched_target = target_for(patched, pfile)
    defect_line = L(src, "memcpy(rbuf + offset, frag, frag_size);")
    u.defect = {"file": "unit.c", "line": defect_line,
                "property_class": "array_bounds"}

    all_lines = stmt_lines(src, "int rbuf_add")
    p_bounds = prop(f"{fn}.array_bounds.1", "array_bounds", "fail", file,
                    defect_line, fn, "memcpy destination region writeable")
    trace = steps(
        {"lhs": "offset", "value": "65535", "loc": loc(file, 0, "harness")},
        {"lhs": "frag_size", "value": "1", "loc": loc(file, 0, "harness")},
        {"lhs": "rbuf_len", "value": "16", "loc": loc(file, 0, "harness")},
        {"lhs": "rbuf", "value": "malloc(rbuf_len)", "loc": loc(file, 0, "harness")},
        {"lhs": "frag", "value": "malloc(frag_size)", "loc": loc(file, 0, "harness")},
        {"call": fn, "loc": loc(file, L(src, "int rbuf_add"), "harness")},
    )
    u.stages = [
        stage("resolved", report(
            properties=[p_bounds | {"status": "pass"}],
            cov=coverage(file, fn, all_lines),
            solver=(3100, 12200, 0.14), wall=0.4),
            harness_contains=["offset <= rbuf_len"]),
        stage("exposed", report(
            properties=[p_bounds],
            cov=coverage(file, fn, all_lines),
            traces={p_bounds["id"]: trace},
            solver=(3000, 12000, 0.13), wall=0.38)),
    ]
    pall = stmt_lines(patched, "int rbuf_add")
    u.patched_stages = [
        stage("clean", report(
            properties=[p_bounds | {"status": "pass",
                                    "location": loc(pfile,
                                                    L(patched, "memcpy(rbuf + offset"),
                                                    fn)}],
            cov=coverage(pfile, fn, pall),
            solver=(3050, 12100, 0.13), wall=0.37)),
    ]
    u.traces_meta = [
        {"stage": "exposed", "property": p_bounds["id"],
         "root": "unknown_input", "subject": "offset",
         "intervention": "add_model", "model_kind": "pointer_and_offset"},
    ]
    u.notes = "16-bit offset+size wraps past the guard, memcpy lands outside"
    build_unit(u)


# ---------------------------------------------------------------------------
# Unit 5: string copy overflowing a 32-byte field (needs a raised bound)
# ---------------------------------------------------------------------------


def unit_strcpy_bound_raise() -> None:
    u = Unit("strcpy_bound_raise", "set_name", "string_copy_needs_bound_raise")
    src = """\
#include <stddef.h>

struct name_cfg {
    char name[32];
    int used;
};

int set_name(struct name_cfg *cfg, const char *src)
{
    size_t n = 0;
    while (src[n] != '\\0') {
        cfg->name[n] = src[n];
        n++;
    }
    cfg->name[n] = '\\0';
    if (n >= 32) {
        return -1;
    }
    cfg->used = 1;
    return 0;
}
"""
    patched = """\
#include <stddef.h>

struct name_cfg {
    char name[32];
    int used;
};

int set_name(struct name_cfg *cfg, const char *src)
{
    size_t n = 0;
    while (src[n] != '\\0') {
        if (n >= 31) {
            return -1;
        }
        cfg->name[n] = src[n];
        n++;
    }
    cfg->name[n] = '\\0';
    cfg->used = 1;
    return 0;
}
"""
    u.sources["unit.c"] = src
    u.patched["unit.c"] = patched
    file, pfile = u.rel("unit.c"), u.rel_patched("unit.c")
    fn = "set_name"

    def target_for(text: str, path: str) -> m.TargetFunction:
        return m.TargetFunction(
            name=fn, source_file=path,
            parameters=(agg("cfg", "name_cfg", 40), cptr("src", "char")),
            return_type=m.CTypeRef("int"),
            reachable_loops=(m.LoopRef(f"{fn}.0", line=L(text, "while (src[n]"),
                                       condition="src[n] != '\\0'", step="n++"),),
            buffer_hints=(m.BufferHint("cfg->name", 32, root="cfg"),),
        )

    u.target = target_for(src, file)
    u.patched_target = target_for(patched, pfile)
    defect_line = L(src, "cfg->name[n] = src[n];")
    u.defect = {"file": "unit.c", "line": defect_line,
                "property_class": "array_bounds"}

    all_lines = stmt_lines(src, "int set_name")
    guard_line = L(src, "if (n >= 32) {")
    guard_region = [n for n in all_lines
                    if guard_line <= n <= L(src, "return -1;")]
    p_bounds = prop(f"{fn}.array_bounds.1", "array_bounds", "fail", file,
                    defect_line, fn, "array `name' upper bound")
    p_unwind = prop(f"{fn}.unwind.0", "unwinding_assertion", "fail", file,
                    L(src, "while (src[n]"), fn, "unwinding assertion loop 0")
    trace = steps(
        {"lhs": "src_size", "value": "34", "loc": loc(file, 0, "harness")},
        {"lhs": "src", "value": "malloc(src_size)", "loc": loc(file, 0, "harness")},
        {"lhs": "cfg", "value": "malloc(40)", "loc": loc(file, 0, "harness")},
        {"lhs": "n", "value": "32", "loc": loc(file, L(src, "size_t n = 0;"), fn)},
        {"lhs": "cfg.name", "value": "src[32]", "loc": loc(file, defect_line, fn)},
    )
    u.stages = [
        stage("resolved", report(
            properties=[p_bounds | {"status": "pass"},
                        p_unwind | {"status": "pass"}],
            cov=coverage(file, fn, all_lines, uncovered=guard_region),
            solver=(8100, 31000, 0.5), wall=1.1),
            harness_contains=["src_size <= 31"]),
        stage("violating", report(
            properties=[p_bounds, p_unwind | {"status": "pass"}],
            cov=coverage(file, fn, all_lines),
            traces={p_bounds["id"]: trace},
            solver=(8050, 30800, 0.46), wall=1.05),
            makefile_contains=["set_name.0:34"],
            harness_lacks=["src_size <= 31"]),
        stage("gap21", report(
            properties=[p_bounds | {"status": "pass"},
                        p_unwind | {"status": "pass"}],
            cov=coverage(file, fn, all_lines, uncovered=guard_region),
            solver=(5200, 20100, 0.3), wall=0.8),
            makefile_contains=["set_name.0:21"]),
        stage("initial", report(
            properties=[p_unwind],
            cov=coverage(file, fn, all_lines,
                         uncovered=[n for n in all_lines
                                    if n >= L(src, "cfg->name[n] = '\\0';")]),
            solver=(1900, 7400, 0.07), wall=0.35)),
    ]
    pall = stmt_lines(patched, "int set_name")
    pguard = [L(patched, "return -1;")]
    pp_unwind = prop(f"{fn}.unwind.0", "unwinding_assertion", "fail", pfile,
                     L(patched, "while (src[n]"), fn, "unwinding assertion loop 0")
    u.patched_stages = [
        stage("resolved", report(
            properties=[pp_unwind | {"status": "pass"}],
            cov=coverage(pfile, fn, pall),
            solver=(8200, 31400, 0.5), wall=1.1),
            makefile_contains=["set_name.0:33"]),
        stage("gap21", report(
            properties=[pp_unwind | {"status": "pass"}],
            cov=coverage(pfile, fn, pall, uncovered=pguard),
            solver=(5100, 19900, 0.3), wall=0.8),
            makefile_contains=["set_name.0:21"]),
        stage("initial", report(
            properties=[pp_unwind],
            cov=coverage(pfile, fn, pall,
                         uncovered=[n for n in pall
                                    if n >= L(patched, "cfg->name[n] = '\\0';")]),
            solver=(1900, 7300, 0.07), wall=0.34)),
    ]
    u.traces_meta = [
        {"stage": "violating", "property": p_bounds["id"],
         "root": "unknown_input", "subject": "src",
         "intervention": "add_model", "model_kind": "integer_relationship"},
    ]
    u.notes = ("copy validated only after the fact; the overflow needs strings "
               "longer than the default bound")
    build_unit(u)


# ---------------------------------------------------------------------------
# Unit 6: defect in a callee that lives in another file (scope expansion)
# ---------------------------------------------------------------------------


def unit_cross_file_scope() -> None:
    u = Unit("cross_file_scope", "route_frame", "cross_file_requires_scope")
    src = """\
#include <stddef.h>
#include <stdint.h>
#include <string.h>

struct frame_entry {
    uint16_t len;
    uint16_t off;
    uint8_t body[48];
};

struct frame_entry *table_lookup(uint16_t id);

int route_frame(uint16_t id, const uint8_t *payload, size_t payload_len)
{
    struct frame_entry *e = table_lookup(id);
    if (e->len > sizeof(e->body)) {
        return -1;
    }
    size_t n = payload_len > e->len ? e->len : payload_len;
    memcpy(e->body + e->off, payload, n);
    return 0;
}
"""
    table = """\
#include <stddef.h>
#include <stdint.h>

struct frame_entry {
    uint16_t len;
    uint16_t off;
    uint8_t body[48];
};

static struct frame_entry table[8];

struct frame_entry *table_lookup(uint16_t id)
{
    table[id].len &= 0x3f;
    return &table[id];
}
"""
    table_patched = table.replace(
        "    table[id].len &= 0x3f;",
        "    id &= 7;\n    table[id].len &= 0x3f;")
    u.sources["unit.c"] = src
    u.sources["frame_table.c"] = table
    u.patched["unit.c"] = src
    u.patched["frame_table.c"] = table_patched
    u.scope_files = ["unit.c"]  # the helper file joins only via expand-scope
    file = u.rel("unit.c")
    tfile, ptfile = u.rel("frame_table.c"), u.rel_patched("frame_table.c")
    pfile = u.rel_patched("unit.c")
    fn = "route_frame"

    def target_for(path: str) -> m.TargetFunction:
        return m.TargetFunction(
            name=fn, source_file=path,
            parameters=(scalar("id", "uint16_t"), cptr("payload", "uint8_t"),
                        scalar("payload_len")),
            return_type=m.CTypeRef("int"),
            buffer_hints=(m.BufferHint("e->body", 48, root="table_lookup"),
                          m.BufferHint("table", 8, root="")),
        )

    u.target = target_for(file)
    u.patched_target = target_for(pfile)
    defect_line = L(table, "table[id].len &= 0x3f;")
    u.defect = {"file": "frame_table.c", "line": defect_line,
                "property_class": "array_bounds"}

    unit_lines = stmt_lines(src, "int route_frame")
    table_lines = stmt_lines(table, "struct frame_entry *table_lookup")
    deref_line = L(src, "if (e->len > sizeof(e->body))")
    off_line = L(src, "memcpy(e->body + e->off, payload, n);")

    p_deref = prop(f"{fn}.pointer_dereference.1", "pointer_dereference", "fail",
                   file, deref_line, fn, "dereference failure: pointer NULL")
    p_off = prop(f"{fn}.array_bounds.2", "array_bounds", "fail", file,
                 off_line, fn, "memcpy destination region writeable")
    p_table = prop("table_lookup.array_bounds.1", "array_bounds", "fail", tfile,
                   defect_line, "table_lookup", "array `table' upper bound")

    trace_deref = steps(
        {"lhs": "id", "value": "9", "loc": loc(file, 0, "harness")},
        {"lhs": "payload_len", "value": "4", "loc": loc(file, 0, "harness")},
        {"lhs": "payload", "value": "malloc(payload_len)",
         "loc": loc(file, 0, "harness")},
        {"call": "table_lookup", "loc": loc("", 0, fn)},
        {"lhs": "e", "value": "(struct frame_entry *)nondet_ptr",
         "loc": loc(file, L(src, "e = table_lookup(id);"), fn)},
    )
    trace_off = steps(
        {"lhs": "id", "value": "0", "loc": loc(file, 0, "harness")},
        {"lhs": "payload_len", "value": "4", "loc": loc(file, 0, "harness")},
        {"lhs": "payload", "value": "malloc(payload_len)",
         "loc": loc(file, 0, "harness")},
        {"call": "table_lookup", "loc": loc("", 0, fn)},
        {"lhs": "e", "value": "fresh_object", "loc": loc(file, L(src, "e = table_lookup(id);"), fn)},
        {"lhs": "n", "value": "4", "loc": loc(file, L(src, "size_t n = payload_len"), fn)},
    )
    trace_table = steps(
        {"lhs": "id", "value": "9", "loc": loc(file, 0, "harness")},
        {"lhs": "payload_len", "value": "0", "loc": loc(file, 0, "harness")},
        {"lhs": "payload", "value": "malloc(payload_len)",
         "loc": loc(file, 0, "harness")},
        {"call": "table_lookup", "loc": loc(tfile, L(table, "struct frame_entry *table_lookup"), fn)},
        {"lhs": "table[9].len", "value": "nondet",
         "loc": loc(tfile, defect_line, "table_lookup")},
    )
    u.stages = [
        stage("resolved", report(
            properties=[p_table | {"status": "pass"},
                        p_off | {"status": "pass"}],
            cov=coverage(file, fn, unit_lines)
                + coverage(tfile, "table_lookup", table_lines),
            solver=(10400, 40100, 0.8), wall=1.6),
            harness_contains=["id <= 7"],
            makefile_contains=["frame_table.c"]),
        stage("scoped", report(
            properties=[p_off | {"status": "pass"}, p_table],
            cov=coverage(file, fn, unit_lines)
                + coverage(tfile, "table_lookup", table_lines),
            traces={p_table["id"]: trace_table},
            solver=(10100, 39500, 0.75), wall=1.5),
            makefile_contains=["frame_table.c"]),
        stage("stubbed", report(
            properties=[p_deref | {"status": "pass"}, p_off],
            cov=coverage(file, fn, unit_lines),
            traces={p_off["id"]: trace_off},
            solver=(6300, 24500, 0.35), wall=0.9),
            harness_contains=["table_lookup"]),
        stage("initial", report(
            properties=[p_deref],
            cov=coverage(file, fn, unit_lines),
            traces={p_deref["id"]: trace_deref},
            solver=(4100, 16200, 0.2), wall=0.6)),
    ]
    ptable_lines = stmt_lines(table_patched, "struct frame_entry *table_lookup")
    u.patched_stages = [
        stage("resolved", report(
            properties=[p_off | {"status": "pass",
                                 "location": loc(pfile, off_line, fn)}],
            cov=coverage(pfile, fn, unit_lines)
                + coverage(ptfile, "table_lookup", ptable_lines),
            solver=(10300, 40000, 0.78), wall=1.55),
            makefile_contains=["frame_table.c"]),
        stage("stubbed", report(
            properties=[p_deref | {"status": "pass",
                                   "location": loc(pfile, deref_line, fn)},
                        p_off | {"location": loc(pfile, off_line, fn)}],
            cov=coverage(pfile, fn, unit_lines),
            traces={p_off["id"]: steps(
                {"lhs": "id", "value": "0", "loc": loc(pfile, 0, "harness")},
                {"lhs": "payload_len", "value": "4", "loc": loc(pfile, 0, "harness")},
                {"lhs": "payload", "value": "malloc(payload_len)",
                 "loc": loc(pfile, 0, "harness")},
                {"call": "table_lookup", "loc": loc("", 0, fn)},
                {"lhs": "e", "value": "fresh_object",
                 "loc": loc(pfile, L(src, "e = table_lookup(id);"), fn)},
            )},
            solver=(6200, 24300, 0.34), wall=0.88),
            harness_contains=["table_lookup"]),
        stage("initial", report(
            properties=[p_deref | {"location": loc(pfile, deref_line, fn)}],
            cov=coverage(pfile, fn, unit_lines),
            traces={p_deref["id"]: steps(
                {"lhs": "id", "value": "9", "loc": loc(pfile, 0, "harness")},
                {"lhs": "payload_len", "value": "4", "loc": loc(pfile, 0, "harness")},
                {"lhs": "payload", "value": "malloc(payload_len)",
                 "loc": loc(pfile, 0, "harness")},
                {"call": "table_lookup", "loc": loc("", 0, fn)},
                {"lhs": "e", "value": "(struct frame_entry *)nondet_ptr",
                 "loc": loc(pfile, L(src, "e = table_lookup(id);"), fn)},
            )},
            solver=(4000, 16000, 0.2), wall=0.58)),
    ]
    u.traces_meta = [
        {"stage": "initial", "property": p_deref["id"],
         "root": "undefined_function_return", "subject": "table_lookup",
         "intervention": "add_stub", "model_kind": None},
        {"stage": "stubbed", "property": p_off["id"],
         "root": "undefined_function_return", "subject": "table_lookup",
         "intervention": "expand_scope", "model_kind": None},
        {"stage": "scoped", "property": p_table["id"],
         "root": "unknown_input", "subject": "id",
         "intervention": "add_model", "model_kind": "integer_range"},
    ]
    u.notes = "the invalid index lives in the lookup helper one file over"
    build_unit(u)


# ---------------------------------------------------------------------------
# Unit 7: constant loop fully unrolled, then a tail read past the window
# ---------------------------------------------------------------------------


def unit_const_loop_tail() -> None:
    u = Unit("const_loop_tail", "crc_block", "constant_loop_tail_read")
    src = """\
#include <stddef.h>
#include <stdint.h>

uint32_t crc_block(const uint8_t *data, size_t data_len)
{
    uint32_t acc = 0xffffffffu;
    for (int round = 0; round < 8; round++) {
        acc = (acc << 1) ^ (uint32_t)round;
    }
    acc ^= data[8];
    return acc;
}
"""
    patched = src.replace(
        "    acc ^= data[8];",
        "    if (data_len > 8) {\n"
        "        acc ^= data[8];\n"
        "    }")
    u.sources["unit.c"] = src
    u.patched["unit.c"] = patched
    file, pfile = u.rel("unit.c"), u.rel_patched("unit.c")
    fn = "crc_block"

    def target_for(text: str, path: str) -> m.TargetFunction:
        return m.TargetFunction(
            name=fn, source_file=path,
            parameters=(cptr("data", "uint8_t"), scalar("data_len")),
            return_type=m.CTypeRef("uint32_t"),
            reachable_loops=(m.LoopRef(f"{fn}.0",
                                       line=L(text, "for (int round = 0"),
                                       condition="round < 8", step="round++"),),
        )

    u.target = target_for(src, file)
    u.patched_target = target_for(patched, pfile)
    defect_line = L(src, "acc ^= data[8];")
    u.defect = {"file": "unit.c", "line": defect_line,
                "property_class": "array_bounds"}

    all_lines = stmt_lines(src, "uint32_t crc_block")
    tail = [n for n in all_lines if n >= defect_line]
    p_bounds = prop(f"{fn}.array_bounds.1", "array_bounds", "fail", file,
                    defect_line, fn, "array `data' upper bound")
    p_unwind = prop(f"{fn}.unwind.0", "unwinding_assertion", "fail", file,
                    L(src, "for (int round = 0"), fn, "unwinding assertion loop 0")
    trace = steps(
        {"lhs": "data_len", "value": "2", "loc": loc(file, 0, "harness")},
        {"lhs": "data", "value": "malloc(data_len)", "loc": loc(file, 0, "harness")},
        {"lhs": "acc", "value": "4294967295",
         "loc": loc(file, L(src, "uint32_t acc = 0xffffffffu;"), fn)},
        {"lhs": "acc", "value": "data[8]", "loc": loc(file, defect_line, fn)},
    )
    u.stages = [
        stage("resolved", report(
            properties=[p_bounds | {"status": "pass"},
                        p_unwind | {"status": "pass"}],
            cov=coverage(file, fn, all_lines),
            solver=(2700, 10600, 0.12), wall=0.42),
            harness_contains=["data_len >= 9"]),
        stage("unrolled", report(
            properties=[p_bounds, p_unwind | {"status": "pass"}],
            cov=coverage(file, fn, all_lines),
            traces={p_bounds["id"]: trace},
            solver=(2600, 10300, 0.11), wall=0.4),
            makefile_contains=["crc_block.0:9"]),
        stage("initial", report(
            properties=[p_unwind],
            cov=coverage(file, fn, all_lines, uncovered=tail),
            solver=(1200, 4700, 0.04), wall=0.26)),
    ]
    pall = stmt_lines(patched, "uint32_t crc_block")
    pp_unwind = prop(f"{fn}.unwind.0", "unwinding_assertion", "fail", pfile,
                     L(patched, "for (int round = 0"), fn,
                     "unwinding assertion loop 0")
    u.patched_stages = [
        stage("resolved", report(
            properties=[pp_unwind | {"status": "pass"}],
            cov=coverage(pfile, fn, pall),
            solver=(2650, 10400, 0.11), wall=0.4),
            makefile_contains=["crc_block.0:9"]),
        stage("initial", report(
            properties=[pp_unwind],
            cov=coverage(pfile, fn, pall,
                         uncovered=[n for n in pall
                                    if n >= L(patched, "if (data_len > 8)")]),
            solver=(1200, 4600, 0.04), wall=0.25)),
    ]
    u.traces_meta = [
        {"stage": "unrolled", "property": p_bounds["id"],
         "root": "unknown_input", "subject": "data",
         "intervention": "add_model", "model_kind": "allocation_size"},
    ]
    u.notes = "code below the 8-round loop reads a ninth byte unconditionally"
    build_unit(u)


# ---------------------------------------------------------------------------
# Unit 8: config-gated block hides an unchecked output write
# ---------------------------------------------------------------------------


def unit_config_gated() -> None:
    u = Unit("config_gated", "parse_header", "config_gated_defect")
    src = """\
#include <stddef.h>
#include <stdint.h>

int parse_header(const uint8_t *pkt, size_t pkt_len, uint8_t *out,
                 size_t out_len)
{
    if (pkt_len < 4) {
        return -1;
    }
    out[0] = pkt[0];
#if PKT_AUTH_MODE
    for (size_t i = 0; i < 16; i++) {
        out[1 + i] = (uint8_t)(i + 0x5a);
    }
#endif
    return (int)pkt[1];
}
"""
    patched = src.replace(
        "#if PKT_AUTH_MODE\n",
        "#if PKT_AUTH_MODE\n"
        "    if (out_len < 17) {\n"
        "        return -1;\n"
        "    }\n")
    u.sources["unit.c"] = src
    u.patched["unit.c"] = patched
    file, pfile = u.rel("unit.c"), u.rel_patched("unit.c")
    fn = "parse_header"

    def target_for(text: str, path: str) -> m.TargetFunction:
        return m.TargetFunction(
            name=fn, source_file=path,
            parameters=(cptr("pkt", "uint8_t"), scalar("pkt_len"),
                        ptr("out", "uint8_t"), scalar("out_len")),
            return_type=m.CTypeRef("int"),
            reachable_loops=(m.LoopRef(f"{fn}.0",
                                       line=L(text, "for (size_t i = 0"),
                                       condition="i < 16", step="i++"),),
        )

    u.target = target_for(src, file)
    u.patched_target = target_for(patched, pfile)
    defect_line = L(src, "out[1 + i] = (uint8_t)(i + 0x5a);")
    u.defect = {"file": "unit.c", "line": defect_line,
                "property_class": "array_bounds"}

    all_lines = stmt_lines(src, "int parse_header")
    gated = [n for n in all_lines
             if L(src, "#if PKT_AUTH_MODE") < n < L(src, "#endif")]
    p_bounds = prop(f"{fn}.array_bounds.1", "array_bounds", "fail", file,
                    defect_line, fn, "array `out' upper bound")
    p_unwind = prop(f"{fn}.unwind.0", "unwinding_assertion", "fail", file,
                    L(src, "for (size_t i = 0"), fn, "unwinding assertion loop 0")
    trace = steps(
        {"lhs": "pkt_len", "value": "4", "loc": loc(file, 0, "harness")},
        {"lhs": "pkt", "value": "malloc(pkt_len)", "loc": loc(file, 0, "harness")},
        {"lhs": "out_len", "value": "2", "loc": loc(file, 0, "harness")},
        {"lhs": "out", "value": "malloc(out_len)", "loc": loc(file, 0, "harness")},
        {"lhs": "i", "value": "1",
         "loc": loc(file, L(src, "for (size_t i = 0"), fn)},
        {"lhs": "out[1]", "value": "91", "loc": loc(file, defect_line, fn)},
    )
    u.stages = [
        stage("resolved", report(
            properties=[p_bounds | {"status": "pass"},
                        p_unwind | {"status": "pass"}],
            cov=coverage(file, fn, all_lines),
            solver=(4400, 17200, 0.22), wall=0.62),
            harness_contains=["out_len >= 17"]),
        stage("unrolled", report(
            properties=[p_bounds, p_unwind | {"status": "pass"}],
            cov=coverage(file, fn, all_lines),
            traces={p_bounds["id"]: trace},
            solver=(4300, 16900, 0.2), wall=0.6),
            makefile_contains=["parse_header.0:17", "-DPKT_AUTH_MODE=1"]),
        stage("configured", report(
            properties=[p_unwind],
            cov=coverage(file, fn, all_lines),
            solver=(2900, 11400, 0.1), wall=0.44),
            makefile_contains=["-DPKT_AUTH_MODE=1"]),
        stage("initial", report(
            properties=[],
            cov=coverage(file, fn, all_lines, uncovered=gated),
            solver=(1600, 6300, 0.05), wall=0.3)),
    ]
    pall = stmt_lines(patched, "int parse_header")
    pgated = [n for n in pall
              if L(patched, "#if PKT_AUTH_MODE") < n < L(patched, "#endif")]
    pp_unwind = prop(f"{fn}.unwind.0", "unwinding_assertion", "fail", pfile,
                     L(patched, "for (size_t i = 0"), fn,
                     "unwinding assertion loop 0")
    u.patched_stages = [
        stage("resolved", report(
            properties=[pp_unwind | {"status": "pass"}],
            cov=coverage(pfile, fn, pall),
            solver=(4350, 17000, 0.21), wall=0.6),
            makefile_contains=["parse_header.0:17", "-DPKT_AUTH_MODE=1"]),
        stage("configured", report(
            properties=[pp_unwind],
            cov=coverage(pfile, fn, pall),
            solver=(2850, 11200, 0.1), wall=0.42),
            makefile_contains=["-DPKT_AUTH_MODE=1"]),
        stage("initial", report(
            properties=[],
            cov=coverage(pfile, fn, pall, uncovered=pgated),
            solver=(1600, 6200, 0.05), wall=0.3)),
    ]
    u.traces_meta = [
        {"stage": "unrolled", "property": p_bounds["id"],
         "root": "unknown_input", "subject": "out",
         "intervention": "add_model", "model_kind": "allocation_size"},
    ]
    u.notes = "auth padding writes 17 bytes but only behind a build flag"
    build_unit(u)


# ---------------------------------------------------------------------------
# Unit 9: flexible-array payload used before its length is validated
# ---------------------------------------------------------------------------


def unit_struct_hack() -> None:
    u = Unit("struct_hack", "msg_digest", "struct_hack_under_allocation")
    src = """\
#include <stddef.h>
#include <stdint.h>

struct msg_head {
    uint16_t kind;
    uint16_t payload_len;
    uint8_t payload[];
};

int msg_digest(const uint8_t *raw, size_t raw_len)
{
    const struct msg_head *m = (const struct msg_head *)raw;
    uint32_t acc = 0;
    if (raw_len < 4) {
        return -1;
    }
    acc = m->kind;
    acc ^= m->payload[0];
    if (m->payload_len == 0 || m->payload_len > raw_len - 4) {
        return -2;
    }
    acc ^= m->payload[m->payload_len - 1];
    return (int)acc;
}
"""
    patched = src.replace(
        "    acc = m->kind;\n"
        "    acc ^= m->payload[0];\n"
        "    if (m->payload_len == 0 || m->payload_len > raw_len - 4) {\n"
        "        return -2;\n"
        "    }\n",
        "    if (raw_len < 5 || m->payload_len == 0\n"
        "            || m->payload_len > raw_len - 4) {\n"
        "        return -2;\n"
        "    }\n"
        "    acc = m->kind;\n"
        "    acc ^= m->payload[0];\n")
    u.sources["unit.c"] = src
    u.patched["unit.c"] = patched
    file, pfile = u.rel("unit.c"), u.rel_patched("unit.c")
    fn = "msg_digest"

    def target_for(path: str) -> m.TargetFunction:
        return m.TargetFunction(
            name=fn, source_file=path,
            parameters=(cptr("raw", "uint8_t"), scalar("raw_len")),
            return_type=m.CTypeRef("int"),
            struct_hacks=(m.StructHackHint(subject="raw", member="payload",
                                           parent_byte_size=4),),
        )

    u.target = target_for(file)
    u.patched_target = target_for(pfile)
    defect_line = L(src, "acc ^= m->payload[0];")
    u.defect = {"file": "unit.c", "line": defect_line,
                "property_class": "array_bounds"}

    all_lines = stmt_lines(src, "int msg_digest")
    below = [n for n in all_lines if n > defect_line]
    p_bounds = prop(f"{fn}.array_bounds.1", "array_bounds", "fail", file,
                    defect_line, fn, "array `payload' lower/upper bound")
    trace = steps(
        {"lhs": "raw_len", "value": "4", "loc": loc(file, 0, "harness")},
        {"lhs": "raw", "value": "malloc(raw_len)", "loc": loc(file, 0, "harness")},
        {"lhs": "m", "value": "(const struct msg_head *)raw",
         "loc": loc(file, L(src, "const struct msg_head *m"), fn)},
        {"lhs": "acc", "value": "0", "loc": loc(file, L(src, "uint32_t acc = 0;"), fn)},
        {"lhs": "acc", "value": "m.kind", "loc": loc(file, L(src, "acc = m->kind;"), fn)},
    )
    u.stages = [
        stage("resolved", report(
            properties=[p_bounds | {"status": "pass"}],
            cov=coverage(file, fn, all_lines),
            solver=(3300, 12900, 0.16), wall=0.46),
            harness_contains=["raw_len >= 5"]),
        stage("parent_only", report(
            properties=[p_bounds],
            cov=coverage(file, fn, all_lines, uncovered=below),
            traces={p_bounds["id"]: trace},
            solver=(3200, 12600, 0.15), wall=0.44),
            harness_contains=["raw_len >= 4"],
            harness_lacks=["raw_len >= 5"]),
        stage("initial", report(
            properties=[p_bounds],
            cov=coverage(file, fn, all_lines, uncovered=below),
            traces={p_bounds["id"]: trace},
            solver=(3100, 12300, 0.14), wall=0.42)),
    ]
    pall = stmt_lines(patched, "int msg_digest")
    u.patched_stages = [
        stage("clean", report(
            properties=[p_bounds | {
                "status": "pass",
                "location": loc(pfile, L(patched, "acc ^= m->payload[0];"), fn)}],
            cov=coverage(pfile, fn, pall),
            solver=(3250, 12700, 0.15), wall=0.44)),
    ]
    u.traces_meta = [
        {"stage": "parent_only", "property": p_bounds["id"],
         "root": "unknown_input", "subject": "raw_len",
         "intervention": "add_model", "model_kind": "allocation_size"},
    ]
    u.notes = "flexible payload byte read before the length check"
    build_unit(u)


# ---------------------------------------------------------------------------
# Unit 10: function-pointer input stalls the checker, then a table overflow
# ---------------------------------------------------------------------------


def unit_fnptr_dispatch() -> None:
    u = Unit("fnptr_dispatch", "dispatch_op", "function_pointer_nontermination")
    src = """\
#include <stddef.h>
#include <stdint.h>

typedef int (*op_handler)(uint8_t arg);

static int default_op(uint8_t arg)
{
    return (int)arg;
}

static op_handler handlers[4] = {
    default_op, default_op, default_op, default_op
};

int dispatch_op(uint8_t op, uint8_t arg, op_handler trace_hook)
{
    if (trace_hook != 0) {
        trace_hook(arg);
    }
    handlers[op & 0x07] = default_op;
    return handlers[op & 0x07](arg);
}
"""
    patched = src.replace("op & 0x07", "op & 0x03")
    u.sources["unit.c"] = src
    u.patched["unit.c"] = patched
    file, pfile = u.rel("unit.c"), u.rel_patched("unit.c")
    fn = "dispatch_op"

    def target_for(path: str) -> m.TargetFunction:
        return m.TargetFunction(
            name=fn, source_file=path,
            parameters=(scalar("op", "uint8_t"), scalar("arg", "uint8_t"),
                        m.Parameter("trace_hook", m.ParamKind.FUNCTION_POINTER,
                                    m.CTypeRef("int (*)(uint8_t)")),),
            return_type=m.CTypeRef("int"),
            buffer_hints=(m.BufferHint("handlers", 4, root=""),),
        )

    u.target = target_for(file)
    u.patched_target = target_for(pfile)
    defect_line = L(src, "handlers[op & 0x07] = default_op;")
    u.defect = {"file": "unit.c", "line": defect_line,
                "property_class": "array_bounds"}

    all_lines = stmt_lines(src, "int dispatch_op")
    p_bounds = prop(f"{fn}.array_bounds.1", "array_bounds", "fail", file,
                    defect_line, fn, "array `handlers' upper bound")
    trace = steps(
        {"lhs": "op", "value": "7", "loc": loc(file, 0, "harness")},
        {"lhs": "arg", "value": "0", "loc": loc(file, 0, "harness")},
        {"call": fn, "loc": loc(file, L(src, "int dispatch_op"), "harness")},
        {"lhs": "handlers[7]", "value": "default_op",
         "loc": loc(file, defect_line, fn)},
    )
    u.stages = [
        stage("resolved", report(
            properties=[p_bounds | {"status": "pass"}],
            cov=coverage(file, fn, all_lines),
            solver=(2100, 8300, 0.09), wall=0.36),
            harness_contains=["op <= 3"]),
        stage("stubbed", report(
            properties=[p_bounds],
            cov=coverage(file, fn, all_lines),
            traces={p_bounds["id"]: trace},
            solver=(2000, 8100, 0.08), wall=0.34),
            harness_contains=["trace_hook_stub"]),
        stage("initial", report(
            status="crashed_at_postprocessing",
            diagnostics=["stage: post-processing"],
            solver=(0, 0, 0.0), wall=31.0)),
    ]
    pall = stmt_lines(patched, "int dispatch_op")
    u.patched_stages = [
        stage("resolved", report(
            properties=[p_bounds | {
                "status": "pass",
                "location": loc(pfile, L(patched, "handlers[op & 0x03] = default_op;"),
                                fn)}],
            cov=coverage(pfile, fn, pall),
            solver=(2050, 8200, 0.08), wall=0.34),
            harness_contains=["trace_hook_stub"]),
        stage("initial", report(
            status="crashed_at_postprocessing",
            diagnostics=["stage: post-processing"],
            solver=(0, 0, 0.0), wall=30.0)),
    ]
    u.traces_meta = [
        {"stage": "stubbed", "property": p_bounds["id"],
         "root": "unknown_input", "subject": "op",
         "intervention": "add_model", "model_kind": "integer_range"},
    ]
    u.notes = "an unconstrained hook stalls post-processing; the mask then " \
              "lets four slots overflow"
    build_unit(u)


# ---------------------------------------------------------------------------
# Unit 11: recursion stalls solving; the guard off-by-one stays honest
# ---------------------------------------------------------------------------


def unit_recursion_pair() -> None:
    u = Unit("recursion_pair", "tree_depth", "recursion_nontermination")
    src = """\
#include <stddef.h>
#include <stdint.h>

static size_t depth_of(const uint8_t *, size_t, size_t);

static size_t child_depth(const uint8_t *tree, size_t tree_len, size_t node)
{
    return depth_of(tree, tree_len, node + 1);
}

static size_t depth_of(const uint8_t *tree, size_t tree_len, size_t node)
{
    if (node > tree_len) {
        return 0;
    }
    if (tree[node] == 0) {
        return 1;
    }
    return 1 + child_depth(tree, tree_len, node);
}

size_t tree_depth(const uint8_t *tree, size_t tree_len)
{
    return depth_of(tree, tree_len, 0);
}
"""
    patched = src.replace("    if (node > tree_len) {",
                          "    if (node >= tree_len) {")
    u.sources["unit.c"] = src
    u.patched["unit.c"] = patched
    file, pfile = u.rel("unit.c"), u.rel_patched("unit.c")
    fn = "tree_depth"

    def target_for(path: str) -> m.TargetFunction:
        return m.TargetFunction(
            name=fn, source_file=path,
            parameters=(cptr("tree", "uint8_t"), scalar("tree_len")),
            return_type=m.CTypeRef("size_t"),
        )

    u.target = target_for(file)
    u.patched_target = target_for(pfile)
    defect_line = L(src, "if (tree[node] == 0) {")
    u.defect = {"file": "unit.c", "line": defect_line,
                "property_class": "array_bounds"}

    helper_lines = stmt_lines(src, "static size_t depth_of(const uint8_t *tree")
    target_lines = stmt_lines(src, "size_t tree_depth")
    p_bounds = prop("depth_of.array_bounds.1", "array_bounds", "fail", file,
                    defect_line, "depth_of", "array `tree' upper bound")
    trace = steps(
        {"lhs": "tree_len", "value": "0", "loc": loc(file, 0, "harness")},
        {"lhs": "tree", "value": "malloc(tree_len)", "loc": loc(file, 0, "harness")},
        {"call": "depth_of", "loc": loc(file, L(src, "return depth_of(tree, tree_len, 0);"), fn)},
        {"lhs": "node", "value": "0", "loc": loc(file, L(src, "static size_t depth_of(const uint8_t *tree"), "depth_of")},
    )
    u.stages = [
        stage("stubbed", report(
            properties=[p_bounds],
            cov=coverage(file, "depth_of", helper_lines)
                + coverage(file, fn, target_lines),
            traces={p_bounds["id"]: trace},
            solver=(3900, 15400, 0.19), wall=0.55),
            harness_contains=["child_depth"]),
        stage("initial", report(
            status="timeout", elapsed=901.0,
            diagnostics=["stage: sat-solving",
                         "recursion: depth_of->child_depth->depth_of"],
            solver=(0, 0, 0.0), wall=901.0)),
    ]
    phelper = stmt_lines(patched, "static size_t depth_of(const uint8_t *tree")
    ptarget = stmt_lines(patched, "size_t tree_depth")
    u.patched_stages = [
        stage("stubbed", report(
            properties=[p_bounds | {
                "status": "pass",
                "location": loc(pfile, L(patched, "if (tree[node] == 0) {"),
                                "depth_of")}],
            cov=coverage(pfile, "depth_of", phelper)
                + coverage(pfile, fn, ptarget),
            solver=(3850, 15300, 0.18), wall=0.54),
            harness_contains=["child_depth"]),
        stage("initial", report(
            status="timeout", elapsed=901.0,
            diagnostics=["stage: sat-solving",
                         "recursion: depth_of->child_depth->depth_of"],
            solver=(0, 0, 0.0), wall=900.5)),
    ]
    u.traces_meta = [
        {"stage": "stubbed", "property": p_bounds["id"],
         "root": "unknown_input", "subject": "tree",
         "intervention": None, "model_kind": None},
    ]
    u.notes = "recursion broken by stubbing the cycle's last edge; the " \
              "off-by-one guard is a genuine defect with no model to hide it"
    build_unit(u)


# ---------------------------------------------------------------------------
# Unit 12: linked-list walk with an unchecked length field
# ---------------------------------------------------------------------------


def unit_list_walk() -> None:
    u = Unit("list_walk", "chain_sum", "linked_list_unchecked_field")
    src = """\
#include <stddef.h>
#include <stdint.h>

struct pkt_node {
    struct pkt_node *next;
    uint16_t len;
    uint8_t data[32];
};

uint32_t chain_sum(const struct pkt_node *head)
{
    uint32_t total = 0;
    const struct pkt_node *p = head;
    while (p != NULL) {
        total += p->data[p->len];
        p = p->next;
    }
    return total;
}
"""
    patched = src.replace(
        "        total += p->data[p->len];",
        "        if (p->len < sizeof(p->data)) {\n"
        "            total += p->data[p->len];\n"
        "        }")
    u.sources["unit.c"] = src
    u.patched["unit.c"] = patched
    file, pfile = u.rel("unit.c"), u.rel_patched("unit.c")
    fn = "chain_sum"

    def target_for(text: str, path: str) -> m.TargetFunction:
        return m.TargetFunction(
            name=fn, source_file=path,
            parameters=(agg("head", "pkt_node", 48, const=True),),
            return_type=m.CTypeRef("uint32_t"),
            reachable_loops=(m.LoopRef(f"{fn}.0", line=L(text, "while (p != NULL)"),
                                       condition="p != NULL", step="p = p->next"),),
            buffer_hints=(m.BufferHint("p->data", 32, root="head"),),
        )

    u.target = target_for(src, file)
    u.patched_target = target_for(patched, pfile)
    defect_line = L(src, "total += p->data[p->len];")
    u.defect = {"file": "unit.c", "line": defect_line,
                "property_class": "array_bounds"}

    all_lines = stmt_lines(src, "uint32_t chain_sum")
    p_deref = prop(f"{fn}.pointer_dereference.1", "pointer_dereference", "fail",
                   file, defect_line, fn, "dereference failure: pointer invalid")
    p_bounds = prop(f"{fn}.array_bounds.1", "array_bounds", "fail", file,
                    defect_line, fn, "array `data' upper bound")
    p_unwind = prop(f"{fn}.unwind.0", "unwinding_assertion", "fail", file,
                    L(src, "while (p != NULL)"), fn, "unwinding assertion loop 0")
    trace_deref = steps(
        {"lhs": "head", "value": "malloc(48)", "loc": loc(file, 0, "harness")},
        {"lhs": "head.next", "value": "invalid-pointer", "loc": loc(file, 0, "harness")},
        {"lhs": "total", "value": "0", "loc": loc(file, L(src, "uint32_t total = 0;"), fn)},
        {"lhs": "p", "value": "head", "loc": loc(file, L(src, "const struct pkt_node *p = head;"), fn)},
        {"lhs": "p", "value": "head.next", "loc": loc(file, L(src, "p = p->next;"), fn)},
    )
    trace_bounds = steps(
        {"lhs": "head", "value": "malloc(48)", "loc": loc(file, 0, "harness")},
        {"lhs": "head.len", "value": "65535", "loc": loc(file, 0, "harness")},
        {"lhs": "total", "value": "0", "loc": loc(file, L(src, "uint32_t total = 0;"), fn)},
        {"lhs": "p", "value": "head", "loc": loc(file, L(src, "const struct pkt_node *p = head;"), fn)},
    )
    u.stages = [
        stage("resolved", report(
            properties=[p_deref | {"status": "pass"},
                        p_bounds | {"status": "pass"},
                        p_unwind | {"status": "pass"}],
            cov=coverage(file, fn, all_lines),
            solver=(3600, 14100, 0.17), wall=0.5),
            harness_contains=["head->len <= 31"]),
        stage("one_node", report(
            properties=[p_deref | {"status": "pass"}, p_bounds,
                        p_unwind | {"status": "pass"}],
            cov=coverage(file, fn, all_lines),
            traces={p_bounds["id"]: trace_bounds},
            solver=(3500, 13800, 0.16), wall=0.48),
            harness_contains=["head->next == NULL"],
            harness_lacks=["head->len <= 31"]),
        stage("bounded", report(
            properties=[p_deref, p_bounds | {"status": "pass"},
                        p_unwind | {"status": "pass"}],
            cov=coverage(file, fn, all_lines),
            traces={p_deref["id"]: trace_deref},
            solver=(3400, 13500, 0.15), wall=0.46),
            makefile_contains=["chain_sum.0:2"]),
        stage("initial", report(
            properties=[p_unwind],
            cov=coverage(file, fn, all_lines,
                         uncovered=[L(src, "return total;")]),
            solver=(1300, 5100, 0.05), wall=0.27)),
    ]
    pall = stmt_lines(patched, "uint32_t chain_sum")
    pp_deref = prop(f"{fn}.pointer_dereference.1", "pointer_dereference", "fail",
                    pfile, L(patched, "if (p->len < sizeof(p->data)) {"), fn,
                    "dereference failure: pointer invalid")
    pp_unwind = prop(f"{fn}.unwind.0", "unwinding_assertion", "fail", pfile,
                     L(patched, "while (p != NULL)"), fn,
                     "unwinding assertion loop 0")
    u.patched_stages = [
        stage("resolved", report(
            properties=[pp_deref | {"status": "pass"},
                        pp_unwind | {"status": "pass"}],
            cov=coverage(pfile, fn, pall),
            solver=(3550, 13900, 0.16), wall=0.48),
            harness_contains=["head->next == NULL"]),
        stage("bounded", report(
            properties=[pp_deref, pp_unwind | {"status": "pass"}],
            cov=coverage(pfile, fn, pall),
            traces={pp_deref["id"]: steps(
                {"lhs": "head", "value": "malloc(48)", "loc": loc(pfile, 0, "harness")},
                {"lhs": "head.next", "value": "invalid-pointer",
                 "loc": loc(pfile, 0, "harness")},
                {"lhs": "total", "value": "0",
                 "loc": loc(pfile, L(patched, "uint32_t total = 0;"), fn)},
                {"lhs": "p", "value": "head",
                 "loc": loc(pfile, L(patched, "const struct pkt_node *p = head;"), fn)},
                {"lhs": "p", "value": "head.next",
                 "loc": loc(pfile, L(patched, "p = p->next;"), fn)},
            )},
            solver=(3450, 13600, 0.15), wall=0.46),
            makefile_contains=["chain_sum.0:2"]),
        stage("initial", report(
            properties=[pp_unwind],
            cov=coverage(pfile, fn, pall,
                         uncovered=[L(patched, "return total;")]),
            solver=(1300, 5000, 0.05), wall=0.27)),
    ]
    u.traces_meta = [
        {"stage": "bounded", "property": p_deref["id"],
         "root": "unknown_input", "subject": "head",
         "intervention": "add_model", "model_kind": "integer_relationship"},
        {"stage": "one_node", "property": p_bounds["id"],
         "root": "unknown_input", "subject": "head.len",
         "intervention": "add_model", "model_kind": "integer_relationship"},
    ]
    u.notes = "node length indexes the node buffer without a check"
    build_unit(u)


# ---------------------------------------------------------------------------
# Unit 13: flag-gated extension length (conditional model)
# ---------------------------------------------------------------------------


def unit_opt_field() -> None:
    u = Unit("opt_field", "read_options", "conditional_field_bound")
    src = """\
#include <stddef.h>
#include <stdint.h>

struct opt_hdr {
    uint8_t flags;
    uint8_t ext_len;
    uint8_t ext[24];
};

int read_options(const struct opt_hdr *hdr, uint8_t *out, size_t out_len)
{
    if (out_len < 1) {
        return -1;
    }
    out[0] = hdr->flags;
    if (hdr->flags & 0x01) {
        out[0] = hdr->ext[hdr->ext_len];
    }
    return 0;
}
"""
    patched = src.replace(
        "    if (hdr->flags & 0x01) {",
        "    if ((hdr->flags & 0x01) && hdr->ext_len < sizeof(hdr->ext)) {")
    u.sources["unit.c"] = src
    u.patched["unit.c"] = patched
    file, pfile = u.rel("unit.c"), u.rel_patched("unit.c")
    fn = "read_options"

    def target_for(path: str) -> m.TargetFunction:
        return m.TargetFunction(
            name=fn, source_file=path,
            parameters=(agg("hdr", "opt_hdr", 26, const=True),
                        ptr("out", "uint8_t"), scalar("out_len")),
            return_type=m.CTypeRef("int"),
            buffer_hints=(m.BufferHint("hdr->ext", 24, root="hdr"),),
        )

    u.target = target_for(file)
    u.patched_target = target_for(pfile)
    defect_line = L(src, "out[0] = hdr->ext[hdr->ext_len];")
    u.defect = {"file": "unit.c", "line": defect_line,
                "property_class": "array_bounds"}

    all_lines = stmt_lines(src, "int read_options")
    p_bounds = prop(f"{fn}.array_bounds.1", "array_bounds", "fail", file,
                    defect_line, fn, "array `ext' upper bound")
    trace = steps(
        {"lhs": "hdr", "value": "malloc(26)", "loc": loc(file, 0, "harness")},
        {"lhs": "hdr.ext_len", "value": "255", "loc": loc(file, 0, "harness")},
        {"lhs": "out_len", "value": "1", "loc": loc(file, 0, "harness")},
        {"lhs": "out", "value": "malloc(out_len)", "loc": loc(file, 0, "harness")},
        {"lhs": "out[0]", "value": "hdr.ext[255]", "loc": loc(file, defect_line, fn)},
    )
    u.stages = [
        stage("resolved", report(
            properties=[p_bounds | {"status": "pass"}],
            cov=coverage(file, fn, all_lines),
            solver=(2200, 8700, 0.09), wall=0.34),
            harness_contains=["hdr->ext_len <= 23"]),
        stage("exposed", report(
            properties=[p_bounds],
            cov=coverage(file, fn, all_lines),
            traces={p_bounds["id"]: trace},
            solver=(2150, 8500, 0.09), wall=0.33)),
    ]
    pall = stmt_lines(patched, "int read_options")
    u.patched_stages = [
        stage("clean", report(
            properties=[p_bounds | {
                "status": "pass",
                "location": loc(pfile, L(patched, "out[0] = hdr->ext[hdr->ext_len];"),
                                fn)}],
            cov=coverage(pfile, fn, pall),
            solver=(2180, 8600, 0.09), wall=0.33)),
    ]
    u.traces_meta = [
        {"stage": "exposed", "property": p_bounds["id"],
         "root": "unknown_input", "subject": "hdr.ext_len",
         "intervention": "add_model", "model_kind": "conditional"},
    ]
    u.notes = "ext_len only matters on the flag path; the bound is conditional"
    build_unit(u)


# ---------------------------------------------------------------------------
# Golden scaffolding/render fixtures
# ---------------------------------------------------------------------------


def golden(name: str, spec: m.HarnessSpec) -> None:
    problems = m.validate(spec)
    if problems:
        raise SystemExit(f"golden {name}: invalid spec: {problems}")
    rendered = codegen.render(spec)
    folder = FIXTURES / "golden" / name
    folder.mkdir(parents=True, exist_ok=True)
    write_json(folder / "spec.json",
               jsonio.as_document(jsonio.encode_harness_spec(spec)))
    (folder / "harness.c").write_text(rendered.harness_source)
    (folder / "Makefile").write_text(rendered.makefile)


def make_goldens() -> None:
    def scaffold(target: m.TargetFunction, *sources: str,
                 defines: dict | None = None,
                 includes: tuple[str, ...] = ()) -> m.HarnessSpec:
        scope = m.UnitScope(linked_sources=sources or (target.source_file,),
                            include_dirs=includes,
                            config_defines=defines or {})
        return codegen.scaffold_initial(target, scope)

    golden("g01_no_params", scaffold(m.TargetFunction(
        name="tick", source_file="os/timer.c")))

    golden("g02_scalars", scaffold(m.TargetFunction(
        name="clamp", source_file="lib/clamp.c",
        parameters=(scalar("v", "int"), scalar("limit", "unsigned int")),
        return_type=m.CTypeRef("int"))))

    golden("g03_sized_pair", scaffold(m.TargetFunction(
        name="targetFunc", source_file="net/target.c",
        parameters=(ptr("data"), scalar("len")),
        return_type=m.CTypeRef("int"),
        reachable_loops=(m.LoopRef("targetFunc.0", line=7, condition="i < 3",
                                   step="i++"),))))

    golden("g04_struct_ptr", scaffold(m.TargetFunction(
        name="ctx_reset", source_file="os/ctx.c",
        parameters=(agg("c", "ctx", 24),),
        return_type=m.CTypeRef("int"))))

    golden("g05_fnptr", scaffold(m.TargetFunction(
        name="dispatch", source_file="os/dispatch.c",
        parameters=(m.Parameter("cb", m.ParamKind.FUNCTION_POINTER,
                                m.CTypeRef("int (*)(int, char *)")),
                    scalar("op", "uint8_t")),
        return_type=m.CTypeRef("int"))))

    g6 = scaffold(m.TargetFunction(
        name="mode_step", source_file="os/mode.c",
        parameters=(scalar("n", "uint16_t"),),
        return_type=m.CTypeRef("int"),
        globals_read=(m.GlobalRef("g_mode", "uint32_t", "os/globals.c"),)))
    g6 = codegen.apply(g6, m.Intervention.add_model(m.ModelSpec(
        m.ModelKind.INTEGER_RANGE, "g_mode",
        m.IntegerRangeDetail(lower="0", upper="3"))))
    golden("g06_globals", g6)

    golden("g07_two_pointers", scaffold(m.TargetFunction(
        name="copy_into", source_file="lib/copy.c",
        parameters=(ptr("dst", "uint8_t"), cptr("src", "uint8_t"),
                    scalar("len")),
        return_type=m.CTypeRef("int"))))

    g8_target = m.TargetFunction(
        name="ingest_frame", source_file="net/ingest.c",
        parameters=(ptr("data"), scalar("len"), scalar("off", "uint16_t"),
                    agg("cfg", "net_cfg", 40)),
        return_type=m.CTypeRef("int"),
        reachable_loops=(
            m.LoopRef("ingest_frame.0", line=12, condition="i < 3", step="i++"),
            m.LoopRef("ingest_frame.1", line=20, condition="s[i] != '\\0'",
                      step="i++"),),
        globals_read=(m.GlobalRef("g_ready", "int", "net/state.c"),))
    g8 = scaffold(g8_target, "net/ingest.c", "net/helpers.c",
                  defines={"CFG_NET": "1"}, includes=("include",))
    for iv in (
        m.Intervention.add_stub(m.FunctionModel(
            "get_ctx", m.FunctionModelKind.TYPE1_RETURN_ONLY,
            m.FreshAllocationNotNull(pointee="struct net_ctx", size_lower="64",
                                     size_upper="64"))),
        m.Intervention.add_stub(m.FunctionModel(
            "peek_mtu", m.FunctionModelKind.TYPE2_RETURN_SEMANTIC,
            m.ConstrainedExpression("ret > 0 && ret <= 1500", ctype="int"))),
        m.Intervention.add_stub(m.FunctionModel(
            "read_pair", m.FunctionModelKind.TYPE3_INPUTS_AND_RETURN,
            m.NondetByType("int"),
            output_assignments=(m.OutputAssignment("out", m.NondetByType("int")),),
            signature="int *out")),
        m.Intervention.add_model(m.ModelSpec(
            m.ModelKind.POINTER_NOT_NULL, "data")),
        m.Intervention.add_model(m.ModelSpec(
            m.ModelKind.INTEGER_RANGE, "len", m.IntegerRangeDetail(upper="128"))),
        m.Intervention.add_model(m.ModelSpec(
            m.ModelKind.INTEGER_RELATIONSHIP, "len",
            m.IntegerRelationshipDetail("<=", "64"))),
        m.Intervention.add_model(m.ModelSpec(
            m.ModelKind.POINTER_AND_OFFSET, "off",
            m.PointerOffsetDetail(base="data", offset_bound="len"))),
        m.Intervention.add_model(m.ModelSpec(
            m.ModelKind.ALLOCATION_SIZE, "data",
            m.AllocationSizeDetail(lower="9", upper="256"))),
        m.Intervention.add_model(m.ModelSpec(
            m.ModelKind.CONDITIONAL, "off",
            m.ConditionalDetail("len > 0", m.ModelSpec(
                m.ModelKind.INTEGER_RANGE, "off",
                m.IntegerRangeDetail(upper="32"))))),
        m.Intervention.add_model(m.ModelSpec(
            m.ModelKind.INTEGER_RANGE, "g_ready",
            m.IntegerRangeDetail(lower="0", upper="1"))),
        m.Intervention.set_loop_bound(m.LoopBoundSpec(
            "ingest_frame.0", 4, m.BoundRationale.FULL_UNROLL)),
        m.Intervention.set_loop_bound(m.LoopBoundSpec(
            "ingest_frame.1", 21, m.BoundRationale.STRING_MAX)),
    ):
        g8 = codegen.apply(g8, iv)
    g8 = m.with_replaced(g8, extra_checker_flags=("--object-bits 10",))
    golden("g08_full", g8)

    g9_target = m.TargetFunction(
        name="tag_equal", source_file="lib/tag.c",
        parameters=(cptr("a", "uint8_t"), cptr("b", "uint8_t")),
        return_type=m.CTypeRef("int"),
        reachable_loops=(m.LoopRef("tag_equal.0", line=9, condition="i < n",
                                   step="i++", body_hint="memcmp",
                                   memcmp_size=16),))
    g9 = scaffold(g9_target)
    from proofbench import diagnosis as diag
    advised = diag.advise_bound(diag.classify_loop(g9_target.reachable_loops[0]), g9)
    g9 = codegen.apply(g9, m.Intervention.set_loop_bound(advised))
    golden("g09_memcmp_loop", g9)


# ---------------------------------------------------------------------------
# Captured checker-output corpus
# ---------------------------------------------------------------------------


def write_report_fixture(name: str, payload, meta: dict, xml: bool = False) -> None:
    folder = FIXTURES / "reports"
    folder.mkdir(parents=True, exist_ok=True)
    if xml:
        (folder / f"{name}.xml").write_text(payload.strip())
        meta = meta | {"file": f"{name}.xml", "dialect": "xml_ui"}
    else:
        (folder / f"{name}.json").write_text(
            json.dumps(payload, indent=1).strip())
        meta = meta | {"file": f"{name}.json", "dialect": "json_ui"}
    write_json(folder / f"{name}.meta.json", {"schema": 1, **meta})


def make_reports() -> None:
    def msg(text):
        return {"messageText": text, "messageType": "STATUS-MESSAGE"}

    def src_loc(file, line, fn):
        return {"file": file, "function": fn, "line": str(line)}

    write_report_fixture("clean_pass", [
        {"program": "CBMC 6.3.1"},
        msg("Parsing proofs/targetFunc/targetFunc_harness.c"),
        msg("Generated 4 VCC(s), 3 remaining after simplification"),
        msg("Running SAT checker"),
        msg("5986 variables, 19827 clauses"),
        msg("Runtime Solver: 0.412s"),
        {"result": [
            {"property": "targetFunc.pointer_dereference.1",
             "description": "dereference failure: pointer NULL",
             "status": "SUCCESS",
             "sourceLocation": src_loc("target.c", 12, "targetFunc")},
            {"property": "targetFunc.array_bounds.1",
             "description": "array `payload' upper bound", "status": "SUCCESS",
             "sourceLocation": src_loc("target.c", 14, "targetFunc")},
            {"property": "targetFunc.unwind.0",
             "description": "unwinding assertion loop 0", "status": "SUCCESS",
             "sourceLocation": src_loc("target.c", 10, "targetFunc")},
        ]},
        {"goals": [
            {"status": "satisfied", "description": "block 1",
             "sourceLocation": src_loc("target.c", 11, "targetFunc")},
            {"status": "satisfied", "description": "block 2",
             "sourceLocation": src_loc("target.c", 12, "targetFunc")},
            {"status": "satisfied", "description": "block 3",
             "sourceLocation": src_loc("target.c", 14, "targetFunc")},
            {"status": "satisfied", "description": "block 4",
             "sourceLocation": src_loc("target.c", 15, "targetFunc")},
        ], "goalsCovered": 4, "totalGoals": 4},
        {"cProverStatus": "success"},
    ], {"properties": 3, "failed": 0, "traces": 0,
        "coverage": {"covered": 4, "uncovered": 0, "unreachable": 0},
        "variables": 5986, "clauses": 19827, "solve_seconds": 0.412})

    write_report_fixture("one_failure", [
        {"program": "CBMC 6.3.1"},
        msg("Running SAT checker"),
        msg("29841 variables, 118236 clauses"),
        msg("Runtime Solver: 1.273s"),
        {"result": [
            {"property": "frame_store.pointer_dereference.1",
             "description": "dereference failure: pointer NULL",
             "status": "SUCCESS",
             "sourceLocation": src_loc("unit.c", 16, "frame_store")},
            {"property": "frame_store.array_bounds.1",
             "description": "memcpy destination upper bound",
             "status": "FAILURE",
             "sourceLocation": src_loc("unit.c", 19, "frame_store"),
             "trace": [
                 {"stepType": "assignment", "lhs": "len",
                  "value": {"data": "4096"},
                  "sourceLocation": src_loc("harness.c", 15, "harness")},
                 {"stepType": "assignment", "lhs": "data",
                  "value": {"data": "&dynamic_object"},
                  "sourceLocation": src_loc("harness.c", 16, "harness")},
                 {"stepType": "function-call",
                  "function": {"displayName": "frame_store",
                               "identifier": "frame_store"},
                  "sourceLocation": src_loc("harness.c", 18, "harness")},
                 {"stepType": "location-only",
                  "sourceLocation": src_loc("unit.c", 14, "frame_store")},
                 {"stepType": "assignment", "lhs": "ctx->payload",
                  "value": {"data": "nondet"},
                  "sourceLocation": src_loc("unit.c", 19, "frame_store")},
             ]},
            {"property": "frame_store.unwind.0",
             "description": "unwinding assertion loop 0", "status": "SUCCESS",
             "sourceLocation": src_loc("unit.c", 16, "frame_store")},
        ]},
        {"goals": [
            {"status": "satisfied", "description": "block 1",
             "sourceLocation": src_loc("unit.c", 14, "frame_store")},
            {"status": "failed", "description": "block 2",
             "sourceLocation": src_loc("unit.c", 21, "frame_store")},
            {"status": "unreachable", "description": "block 3",
             "sourceLocation": src_loc("unit.c", 23, "frame_store")},
        ], "goalsCovered": 1, "totalGoals": 3},
        {"cProverStatus": "failure"},
    ], {"properties": 3, "failed": 1, "traces": 1, "trace_steps": 5,
        "coverage": {"covered": 1, "uncovered": 1, "unreachable": 1},
        "variables": 29841, "clauses": 118236, "solve_seconds": 1.273})

    write_report_fixture("empty_result", [
        {"program": "CBMC 6.3.1"},
        msg("Runtime Solver: 0.001s"),
        {"result": []},
    ], {"properties": 0, "failed": 0, "traces": 0,
        "coverage": {"covered": 0, "uncovered": 0, "unreachable": 0},
        "variables": 0, "clauses": 0, "solve_seconds": 0.001})

    write_report_fixture("big_formula", [
        {"program": "CBMC 6.3.1"},
        msg("Solving with MiniSAT 2.2.1"),
        msg("1200000 variables, 4800000 clauses"),
        msg("Runtime Solver: 57.31s"),
        {"result": [
            {"property": "big.array_bounds.1", "description": "upper bound",
             "status": "SUCCESS",
             "sourceLocation": src_loc("big.c", 99, "big")},
        ]},
    ], {"properties": 1, "failed": 0, "traces": 0,
        "coverage": {"covered": 0, "uncovered": 0, "unreachable": 0},
        "variables": 1200000, "clauses": 4800000, "solve_seconds": 57.31})

    write_report_fixture("unknown_records", [
        {"program": "CBMC 6.3.1"},
        {"instrumentationPass": "value-set-analysis"},
        msg("912 variables, 3310 clauses"),
        {"result": [
            {"property": "f.frobnication.1", "description": "frobnication check",
             "status": "FAILURE",
             "sourceLocation": src_loc("f.c", 3, "f"),
             "trace": [
                 {"stepType": "assignment", "lhs": "x", "value": {"data": "1"},
                  "sourceLocation": src_loc("harness.c", 4, "harness")},
             ]},
        ]},
        {"telemetry": {"peakMemoryMb": 412}},
    ], {"properties": 1, "failed": 1, "traces": 1, "trace_steps": 1,
        "coverage": {"covered": 0, "uncovered": 0, "unreachable": 0},
        "variables": 912, "clauses": 3310, "solve_seconds": 0.0,
        "unknown_records": 2, "unknown_class": "frobnication"})

    write_report_fixture("xml_dialect", """\
<cprover>
<program>CBMC 6.3.1</program>
<message type="STATUS-MESSAGE"><text>742 variables, 2511 clauses</text></message>
<message type="STATUS-MESSAGE"><text>Runtime Solver: 0.09s</text></message>
<result property="g.pointer_dereference.1" status="FAILURE">
<description>dereference failure: pointer NULL</description>
<location file="g.c" line="7" function="g"/>
<goto_trace>
<assignment lhs="p"><location file="harness.c" line="5" function="harness"/><full_lhs_value>NULL</full_lhs_value></assignment>
<function_call identifier="g"><location file="harness.c" line="6" function="harness"/></function_call>
</goto_trace>
</result>
<result property="g.array_bounds.1" status="SUCCESS">
<description>array bounds</description>
<location file="g.c" line="9" function="g"/>
</result>
<goal id="goal1" status="satisfied"><location file="g.c" line="7" function="g"/></goal>
<goal id="goal2" status="failed"><location file="g.c" line="9" function="g"/></goal>
</cprover>""", {"properties": 2, "failed": 1, "traces": 1, "trace_steps": 2,
                "coverage": {"covered": 1, "uncovered": 1, "unreachable": 0},
                "variables": 742, "clauses": 2511, "solve_seconds": 0.09},
        xml=True)


# ---------------------------------------------------------------------------
# Hand-labeled loop classification set
# ---------------------------------------------------------------------------


def make_loops() -> None:
    def entry(lid, condition, label, step="", body="", count=0, memcmp=None):
        return {"id": lid, "condition": condition, "step": step,
                "body_hint": body, "memcmp_size": memcmp,
                "label": label, "count": count}

    loops = [
        entry("f.0", "i < 3", "constant", step="i++", count=3),
        entry("f.1", "i < 8", "constant", step="i++", count=8),
        entry("f.2", "i <= 7", "constant", step="i++", count=8),
        entry("f.3", "round < 16", "constant", step="round++", count=16),
        entry("f.4", "k != 4", "constant", step="k++", count=4),
        entry("f.5", "i < 0x10", "constant", step="i++", count=16),
        entry("g.0", "i < count", "data_length", step="i++"),
        entry("g.1", "i < buf_len", "data_length", step="i++"),
        entry("g.2", "offset < total", "data_length", step="offset += 4"),
        entry("g.3", "n < nbytes", "data_length", step="n++"),
        entry("g.4", "i < remaining", "data_length", step="i++"),
        entry("h.0", "p != NULL", "linked_list", step="p = p->next"),
        entry("h.1", "node != 0", "linked_list", step="node = node->link"),
        entry("h.2", "cur != tail", "linked_list", step="cur = cur->next"),
        entry("h.3", "it != NULL", "linked_list", step="it = it->prev"),
        entry("s.0", "src[n] != '\\0'", "string_or_memcmp", step="n++"),
        entry("s.1", "*s != '\\0'", "string_or_memcmp", step="s++"),
        entry("s.2", "name[i] != '\\0'", "string_or_memcmp", step="i++"),
        entry("s.3", "data[j] != '\\0'", "string_or_memcmp", step="j++"),
        entry("s.4", "i < n", "string_or_memcmp", step="i++",
              body="memcmp word compare", memcmp=16),
        entry("o.0", "rc == 0", "other", step="rc = poll_once()"),
        entry("o.1", "!done", "other", step="done = advance()"),
        entry("o.2", "q->head != q->tail", "other", step="drain(q)"),
        entry("o.3", "retries < max_retries && !ok", "other", step="retries++"),
        entry("o.4", "tmp > 1", "other", step="tmp = collatz(tmp)"),
    ]
    write_json(FIXTURES / "loops.json", {"schema": 1, "loops": loops})


def main() -> None:
    UNITS.mkdir(parents=True, exist_ok=True)
    unit_oob_write_len()
    unit_oob_read_loop()
    unit_null_deref_alloc()
    unit_int_overflow_offset()
    unit_strcpy_bound_raise()
    unit_cross_file_scope()
    unit_const_loop_tail()
    unit_config_gated()
    unit_struct_hack()
    unit_fnptr_dispatch()
    unit_recursion_pair()
    unit_list_walk()
    unit_opt_field()
    make_goldens()
    make_reports()
    make_loops()
    print(f"built {len(UNITS_BUILT)} units, goldens, reports and loops under "
          f"{FIXTURES}")


if __name__ == "__main__":
    main()
