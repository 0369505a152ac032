"""Scaffolding, rendering and intervention application, with the golden
byte-for-byte suite and the compile-check under the stub intrinsic header."""

from __future__ import annotations

import json
import re
import shutil
import subprocess

import pytest

from proofbench import codegen, jsonio
from proofbench import model as m
from proofbench.errors import Inapplicable, RenderRejected, UnresolvableType

from .conftest import FIXTURES

GOLDEN = FIXTURES / "golden"


def listing_target() -> m.TargetFunction:
    return m.TargetFunction(
        name="targetFunc", source_file="net/target.c",
        parameters=(
            m.Parameter("data", m.ParamKind.PRIMITIVE_POINTER,
                        m.CTypeRef("char *", pointee="char")),
            m.Parameter("len", m.ParamKind.PRIMITIVE_SCALAR,
                        m.CTypeRef("size_t")),
        ),
        return_type=m.CTypeRef("int"),
        reachable_loops=(m.LoopRef("targetFunc.0", line=7, condition="i < 3",
                                   step="i++"),),
    )


def listing_scope() -> m.UnitScope:
    return m.UnitScope(linked_sources=("net/target.c",))


class TestScaffold:
    def test_sized_pair_strategies_and_default_bounds(self):
        spec = codegen.scaffold_initial(listing_target(), listing_scope())
        data = spec.input_strategies["data"]
        assert isinstance(data, m.SizedAllocationInput)
        assert data.size_symbol == "len" and not data.declares_size
        assert isinstance(spec.input_strategies["len"], m.NondetScalarInput)
        assert spec.loop_bounds == (
            m.LoopBoundSpec("targetFunc.0", 1, m.BoundRationale.DEFAULT),)
        assert spec.preconditions == () and spec.stubs == ()
        assert spec.string_max == 20

    def test_zero_parameters_zero_loops(self):
        target = m.TargetFunction(name="tick", source_file="t.c")
        spec = codegen.scaffold_initial(
            target, m.UnitScope(linked_sources=("t.c",)))
        assert spec.input_strategies == {}
        assert spec.loop_bounds == ()

    def test_aggregate_allocation_uses_resolved_size(self):
        target = m.TargetFunction(
            name="f", source_file="f.c",
            parameters=(m.Parameter(
                "c", m.ParamKind.AGGREGATE_POINTER,
                m.CTypeRef("struct ctx *", pointee="struct ctx", byte_size=24)),))
        spec = codegen.scaffold_initial(
            target, m.UnitScope(linked_sources=("f.c",)))
        strat = spec.input_strategies["c"]
        assert isinstance(strat, m.AggregateAllocationInput)
        assert strat.byte_size == 24

    def test_unresolvable_pointee_raises(self):
        target = m.TargetFunction(
            name="f", source_file="f.c",
            parameters=(m.Parameter(
                "c", m.ParamKind.AGGREGATE_POINTER,
                m.CTypeRef("struct ctx *", pointee="struct ctx")),))
        with pytest.raises(UnresolvableType):
            codegen.scaffold_initial(target, m.UnitScope(linked_sources=("f.c",)))


class TestRender:
    def test_upper_bound_assumption_before_the_call(self):
        spec = codegen.scaffold_initial(listing_target(), listing_scope())
        spec = codegen.apply(spec, m.Intervention.add_model(m.ModelSpec(
            m.ModelKind.INTEGER_RANGE, "len", m.IntegerRangeDetail(upper="64"))))
        body = codegen.render(spec).harness_source
        assume_at = body.index("PROOF_ASSUME(len <= 64);")
        call_at = body.index("targetFunc(data, len);")
        assert assume_at < call_at

    def test_unwindset_entry(self):
        spec = codegen.scaffold_initial(listing_target(), listing_scope())
        spec = codegen.apply(spec, m.Intervention.set_loop_bound(
            m.LoopBoundSpec("targetFunc.0", 2, m.BoundRationale.LINKED_LIST)))
        assert "--unwindset targetFunc.0:2" in codegen.render(spec).makefile

    def test_empty_parameter_body_is_a_single_call(self):
        target = m.TargetFunction(name="tick", source_file="t.c")
        spec = codegen.scaffold_initial(
            target, m.UnitScope(linked_sources=("t.c",)))
        source = codegen.render(spec).harness_source
        body = source.split("void harness(void)")[1]
        statements = [line.strip() for line in body.splitlines()
                      if line.strip().endswith(";")]
        assert statements == ["tick();"]

    def test_render_is_deterministic(self):
        spec = codegen.scaffold_initial(listing_target(), listing_scope())
        first = codegen.render(spec)
        second = codegen.render(spec)
        assert first.harness_source == second.harness_source
        assert first.makefile == second.makefile
        assert first.file_layout == second.file_layout

    def test_render_rejects_invalid_spec(self):
        target = listing_target()
        spec = m.HarnessSpec(target=target, scope=listing_scope())  # no bounds
        with pytest.raises(RenderRejected) as err:
            codegen.render(spec)
        assert "loop targetFunc.0 has no bound" in err.value.violations

    def test_layout_paths(self):
        spec = codegen.scaffold_initial(listing_target(), listing_scope())
        layout = codegen.render(spec).file_layout
        assert "proofs/targetFunc/targetFunc_harness.c" in layout
        assert "proofs/targetFunc/Makefile" in layout
        assert "proofs/targetFunc/cbmc-proof.txt" in layout

    def test_exactly_one_harness_entry(self):
        spec = codegen.scaffold_initial(listing_target(), listing_scope())
        source = codegen.render(spec).harness_source
        assert source.count("void harness(void)") == 1

    def test_assumption_count_matches_models(self):
        spec = codegen.scaffold_initial(listing_target(), listing_scope())
        for iv in (
            m.Intervention.add_model(m.ModelSpec(
                m.ModelKind.INTEGER_RANGE, "len",
                m.IntegerRangeDetail(upper="64"))),
            m.Intervention.add_model(m.ModelSpec(
                m.ModelKind.POINTER_NOT_NULL, "data")),
            m.Intervention.add_stub(m.FunctionModel(
                "get_ctx", m.FunctionModelKind.TYPE1_RETURN_ONLY,
                m.FreshAllocationNotNull(pointee="struct ctx", size_lower="24",
                                         size_upper="24"))),
            m.Intervention.add_stub(m.FunctionModel(
                "peek", m.FunctionModelKind.TYPE2_RETURN_SEMANTIC,
                m.ConstrainedExpression("ret <= 1500"))),
        ):
            spec = codegen.apply(spec, iv)
        source = codegen.render(spec).harness_source
        rendered_assumes = source.count("PROOF_ASSUME(")
        explicit = len(spec.preconditions) + len(spec.global_models)
        implied = 0
        for strat in spec.input_strategies.values():
            if isinstance(strat, (m.SizedAllocationInput,
                                  m.AggregateAllocationInput)):
                implied += 1
        for stub in spec.stubs:
            if isinstance(stub.return_strategy,
                          (m.FreshAllocationNotNull, m.ConstrainedExpression)):
                implied += 1
        assert rendered_assumes == explicit + implied


class TestApply:
    def test_set_loop_bound_then_render(self):
        spec = codegen.scaffold_initial(listing_target(), listing_scope())
        out = codegen.apply(spec, m.Intervention.set_loop_bound(
            m.LoopBoundSpec("targetFunc.0", 3, m.BoundRationale.FULL_UNROLL)))
        assert "targetFunc.0:3" in codegen.render(out).makefile
        assert spec.bound_for("targetFunc.0").bound == 1  # original untouched

    def test_add_model_idempotent(self):
        spec = codegen.scaffold_initial(listing_target(), listing_scope())
        iv = m.Intervention.add_model(m.ModelSpec(
            m.ModelKind.INTEGER_RANGE, "len", m.IntegerRangeDetail(upper="8")))
        once = codegen.apply(spec, iv)
        twice = codegen.apply(once, iv)
        assert once == twice

    def test_set_loop_bound_idempotent(self):
        spec = codegen.scaffold_initial(listing_target(), listing_scope())
        iv = m.Intervention.set_loop_bound(
            m.LoopBoundSpec("targetFunc.0", 5, m.BoundRationale.MANUAL))
        assert codegen.apply(codegen.apply(spec, iv), iv) == codegen.apply(spec, iv)

    def test_stub_upgrade_replaces(self):
        spec = codegen.scaffold_initial(listing_target(), listing_scope())
        first = m.FunctionModel("g", m.FunctionModelKind.TYPE1_RETURN_ONLY,
                                m.NondetByType("void *"))
        second = m.FunctionModel("g", m.FunctionModelKind.TYPE1_RETURN_ONLY,
                                 m.FreshAllocationNotNull(pointee="struct g"))
        spec = codegen.apply(spec, m.Intervention.add_stub(first))
        spec = codegen.apply(spec, m.Intervention.add_stub(second))
        assert spec.stubs == (second,)

    def test_expand_scope_appends_once(self):
        spec = codegen.scaffold_initial(listing_target(), listing_scope())
        iv = m.Intervention.expand_scope("net/other.c")
        spec = codegen.apply(codegen.apply(spec, iv), iv)
        assert spec.scope.linked_sources == ("net/target.c", "net/other.c")

    def test_unknown_loop_is_inapplicable(self):
        spec = codegen.scaffold_initial(listing_target(), listing_scope())
        with pytest.raises(Inapplicable):
            codegen.apply(spec, m.Intervention.set_loop_bound(
                m.LoopBoundSpec("other.0", 2, m.BoundRationale.MANUAL)))

    def test_lowering_string_max_is_inapplicable(self):
        spec = codegen.scaffold_initial(listing_target(), listing_scope())
        with pytest.raises(Inapplicable):
            codegen.apply(spec, m.Intervention.raise_string_max(3))

    def test_acknowledgments_leave_spec_unchanged(self):
        spec = codegen.scaffold_initial(listing_target(), listing_scope())
        for iv in (m.Intervention.mark_real_defect("f.array_bounds.1"),
                   m.Intervention.mark_dead_code(m.SourceLocation("f.c", 3, "f"))):
            assert codegen.apply(spec, iv) == spec


def golden_cases() -> list[str]:
    return sorted(p.name for p in GOLDEN.iterdir() if p.is_dir())


class TestGoldens:
    def test_enough_signature_fixtures(self):
        assert len(golden_cases()) >= 8

    @pytest.mark.parametrize("case", golden_cases())
    def test_byte_identical(self, case):
        folder = GOLDEN / case
        spec = jsonio.decode_harness_spec(
            json.loads((folder / "spec.json").read_text()))
        rendered = codegen.render(spec)
        assert rendered.harness_source == (folder / "harness.c").read_text()
        assert rendered.makefile == (folder / "Makefile").read_text()

    @pytest.mark.parametrize("case", golden_cases())
    def test_compiles_under_stub_header(self, case, tmp_path):
        gcc = shutil.which("gcc") or shutil.which("cc")
        if gcc is None:
            pytest.skip("no C compiler available")
        shutil.copy(GOLDEN / case / "harness.c", tmp_path / "harness.c")
        (tmp_path / codegen.INTRINSICS_HEADER).write_text(
            codegen.intrinsics_header_text())
        proc = subprocess.run(
            [gcc, "-std=c11", "-fsyntax-only", f"-I{tmp_path}",
             str(tmp_path / "harness.c")], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr

    @pytest.mark.parametrize("case", golden_cases())
    def test_makefile_template_variables(self, case):
        makefile = (GOLDEN / case / "Makefile").read_text()
        for var in ("ROOT =", "LINK =", "H_ENTRY =", "H_CBMCFLAGS =",
                    "H_DEF", "H_INC", "include $(ROOT)/Makefile.include"):
            assert var in makefile

    def test_globals_defining_file_joins_link_line(self):
        makefile = (GOLDEN / "g06_globals" / "Makefile").read_text()
        link = re.search(r"^LINK = (.+)$", makefile, re.MULTILINE).group(1)
        assert "$(ROOT)/os/globals.c" in link


class TestScaffoldProperty:
    from hypothesis import given, settings

    from . import strategies as gen

    @given(gen.targets)
    @settings(max_examples=80)
    def test_scaffold_of_any_resolvable_target_validates_clean(self, target):
        from hypothesis import assume

        # Quantify over targets that satisfy the parameter invariant:
        # pointer parameters carry a resolvable pointee (aggregates also
        # need its size so the allocation can be emitted).
        for p in target.parameters:
            if p.kind is m.ParamKind.AGGREGATE_POINTER:
                assume(p.ctype.byte_size is not None
                       or p.byte_size_hint is not None)
            if p.kind in (m.ParamKind.PRIMITIVE_POINTER,
                          m.ParamKind.AGGREGATE_POINTER):
                assume(p.ctype.pointee or p.ctype.byte_size is not None
                       or p.byte_size_hint is not None)
        scope = m.UnitScope(linked_sources=(target.source_file,))
        spec = codegen.scaffold_initial(target, scope)
        assert m.validate(spec) == []
