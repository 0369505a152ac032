"""Core type validation and metric tallies."""

from __future__ import annotations

import pytest

from proofbench import model as m


def minimal_spec(**overrides) -> m.HarnessSpec:
    target = m.TargetFunction(name="f", source_file="f.c")
    scope = m.UnitScope(linked_sources=("f.c",))
    base = dict(target=target, scope=scope)
    base.update(overrides)
    return m.HarnessSpec(**base)


def spec_with_loop(bounds=()) -> m.HarnessSpec:
    target = m.TargetFunction(
        name="f", source_file="f.c",
        reachable_loops=(m.LoopRef("f.0", line=3, condition="i < 3"),))
    scope = m.UnitScope(linked_sources=("f.c",))
    return m.HarnessSpec(target=target, scope=scope, loop_bounds=tuple(bounds))


class TestValidate:
    def test_minimal_spec_is_clean(self):
        assert m.validate(minimal_spec()) == []

    def test_missing_loop_bound_message(self):
        assert m.validate(spec_with_loop()) == ["loop f.0 has no bound"]

    def test_bounded_loop_is_clean(self):
        spec = spec_with_loop([m.LoopBoundSpec("f.0", 1, m.BoundRationale.DEFAULT)])
        assert m.validate(spec) == []

    def test_integer_range_lower_above_upper_names_subject(self):
        target = m.TargetFunction(
            name="f", source_file="f.c",
            parameters=(m.Parameter("len", m.ParamKind.PRIMITIVE_SCALAR,
                                    m.CTypeRef("size_t")),))
        spec = m.HarnessSpec(
            target=target, scope=m.UnitScope(linked_sources=("f.c",)),
            preconditions=(m.ModelSpec(
                m.ModelKind.INTEGER_RANGE, "len",
                m.IntegerRangeDetail(lower="5", upper="2")),))
        messages = m.validate(spec)
        assert len(messages) == 1
        assert "len" in messages[0]

    def test_duplicate_scope_entry(self):
        spec = minimal_spec(scope=m.UnitScope(linked_sources=("f.c", "f.c")))
        assert any("twice" in msg for msg in m.validate(spec))

    def test_unresolvable_subject(self):
        spec = minimal_spec(preconditions=(
            m.ModelSpec(m.ModelKind.POINTER_NOT_NULL, "ghost"),))
        assert any("ghost" in msg for msg in m.validate(spec))

    def test_duplicate_stub_targets(self):
        stub = m.FunctionModel("g", m.FunctionModelKind.TYPE1_RETURN_ONLY,
                               m.NondetByType("int"))
        spec = minimal_spec(stubs=(stub, stub))
        assert any("two stubs" in msg for msg in m.validate(spec))

    def test_type1_stub_cannot_constrain_expression(self):
        stub = m.FunctionModel("g", m.FunctionModelKind.TYPE1_RETURN_ONLY,
                               m.ConstrainedExpression("ret > 0"))
        assert any("type-1" in msg for msg in m.validate(minimal_spec(stubs=(stub,))))

    def test_type2_stub_requires_constrained_expression(self):
        stub = m.FunctionModel("g", m.FunctionModelKind.TYPE2_RETURN_SEMANTIC,
                               m.NondetByType("int"))
        assert any("type-2" in msg for msg in m.validate(minimal_spec(stubs=(stub,))))

    def test_default_rationale_requires_bound_one(self):
        spec = spec_with_loop([m.LoopBoundSpec("f.0", 2, m.BoundRationale.DEFAULT)])
        assert any("default" in msg for msg in m.validate(spec))

    def test_string_max_floor(self):
        assert any("string_max" in msg
                   for msg in m.validate(minimal_spec(string_max=0)))

    def test_conditional_nesting_depth(self):
        target = m.TargetFunction(
            name="f", source_file="f.c",
            parameters=(m.Parameter("x", m.ParamKind.PRIMITIVE_SCALAR,
                                    m.CTypeRef("int")),))
        inner = m.ModelSpec(m.ModelKind.INTEGER_RANGE, "x",
                            m.IntegerRangeDetail(upper="3"))
        depth2 = m.ModelSpec(m.ModelKind.CONDITIONAL, "x",
                             m.ConditionalDetail("a", inner))
        depth3 = m.ModelSpec(m.ModelKind.CONDITIONAL, "x",
                             m.ConditionalDetail("b", m.ModelSpec(
                                 m.ModelKind.CONDITIONAL, "x",
                                 m.ConditionalDetail("c", depth2))))
        ok = m.HarnessSpec(target=target,
                           scope=m.UnitScope(linked_sources=("f.c",)),
                           preconditions=(depth2,))
        bad = m.HarnessSpec(target=target,
                            scope=m.UnitScope(linked_sources=("f.c",)),
                            preconditions=(depth3,))
        assert m.validate(ok) == []
        assert any("nests deeper" in msg for msg in m.validate(bad))

    def test_loop_id_format(self):
        target = m.TargetFunction(name="f", source_file="f.c",
                                  reachable_loops=(m.LoopRef("weird"),))
        spec = m.HarnessSpec(
            target=target, scope=m.UnitScope(linked_sources=("f.c",)),
            loop_bounds=(m.LoopBoundSpec("weird", 1, m.BoundRationale.DEFAULT),))
        assert any("form" in msg for msg in m.validate(spec))


class TestCompleteness:
    def test_verdict_follows_booleans(self):
        for a in (False, True):
            for b in (False, True):
                for c in (False, True):
                    status = m.CompletenessStatus(a, b, c)
                    assert status.complete == (a and b and c)
                    assert (status.verdict == "complete") == status.complete
                    assert len(status.unmet) == [a, b, c].count(False)


class TestTallies:
    def test_variable_models_count_nested_conditionals(self):
        target = m.TargetFunction(
            name="f", source_file="f.c",
            parameters=(m.Parameter("x", m.ParamKind.PRIMITIVE_SCALAR,
                                    m.CTypeRef("int")),))
        inner = m.ModelSpec(m.ModelKind.INTEGER_RANGE, "x",
                            m.IntegerRangeDetail(upper="3"))
        cond = m.ModelSpec(m.ModelKind.CONDITIONAL, "x",
                           m.ConditionalDetail("a", inner))
        spec = m.HarnessSpec(target=target,
                             scope=m.UnitScope(linked_sources=("f.c",)),
                             preconditions=(cond,))
        counts = m.tally_variable_models(spec)
        assert counts[m.ModelKind.CONDITIONAL.value] == 1
        assert counts[m.ModelKind.INTEGER_RANGE.value] == 1

    def test_loop_bound_histogram(self):
        spec = spec_with_loop([m.LoopBoundSpec("f.0", 2, m.BoundRationale.DATA_LENGTH)])
        assert m.tally_loop_bounds(spec) == {2: 1}

    @pytest.mark.parametrize("source,expected", [
        ("", 0),
        ("int x;\n", 1),
        ("/* banner */\nint x;\n\n// note\nint y;\n", 2),
        ("/* multi\n line\n comment */\nint x;\n", 1),
        ("int x; /* trailing */\n", 1),
    ])
    def test_count_harness_loc(self, source, expected):
        assert m.count_harness_loc(source) == expected
