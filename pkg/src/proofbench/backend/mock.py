"""Deterministic mock backend driven by scenario files.

A scenario file scripts the reports a unit's verification runs would
produce. Each stage carries a ``when`` predicate over the rendered harness
and makefile text; the first matching stage wins, so a scenario encodes a
whole refine-and-rerun trajectory keyed on harness content. Scenarios also
carry the symbol table the front-end would have extracted, which lets
sessions start without the external checker installed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .. import jsonio
from .. import model as m
from ..codegen import RenderedHarness
from ..errors import FrontEndFailure, FunctionNotFound, ScenarioMissing
from .config import BackendConfig
from .report_parse import validate_report


@dataclass(frozen=True)
class ScenarioStage:
    name: str
    harness_contains: tuple[str, ...]
    harness_lacks: tuple[str, ...]
    makefile_contains: tuple[str, ...]
    makefile_lacks: tuple[str, ...]
    report: m.VerificationReport

    def matches(self, rendered: RenderedHarness) -> bool:
        h, mk = rendered.harness_source, rendered.makefile
        return (all(s in h for s in self.harness_contains)
                and all(s not in h for s in self.harness_lacks)
                and all(s in mk for s in self.makefile_contains)
                and all(s not in mk for s in self.makefile_lacks))


@dataclass(frozen=True)
class MockScenario:
    id: str
    symbols: dict[str, m.TargetFunction]
    stages: tuple[ScenarioStage, ...]
    front_end_failures: dict[str, list[str]]

    @classmethod
    def load(cls, path: str | Path) -> "MockScenario":
        doc = json.loads(Path(path).read_text())
        stages = []
        for raw in doc.get("stages", []):
            when = raw.get("when", {})
            report = jsonio.decode_report(raw["report"])
            problems = validate_report(report)
            if problems:
                raise ValueError(
                    f"scenario {doc.get('id')!r} stage {raw.get('name')!r}: "
                    + "; ".join(problems))
            stages.append(ScenarioStage(
                name=raw.get("name", ""),
                harness_contains=tuple(when.get("harness_contains", [])),
                harness_lacks=tuple(when.get("harness_lacks", [])),
                makefile_contains=tuple(when.get("makefile_contains", [])),
                makefile_lacks=tuple(when.get("makefile_lacks", [])),
                report=report,
            ))
        symbols = {name: jsonio.decode_target(t)
                   for name, t in doc.get("symbols", {}).items()}
        return cls(id=doc.get("id", ""), symbols=symbols, stages=tuple(stages),
                   front_end_failures={
                       name: list(messages) for name, messages
                       in doc.get("front_end_failures", {}).items()})

    def stage_for(self, rendered: RenderedHarness) -> ScenarioStage:
        for stage in self.stages:
            if stage.matches(rendered):
                return stage
        raise ScenarioMissing(
            f"scenario {self.id!r} has no stage matching the rendered harness")


class MockBackend:
    """Replays scripted reports; same rendered harness, same report."""

    def __init__(self, cfg: BackendConfig):
        if not cfg.scenario:
            raise ScenarioMissing("mock backend configured without a scenario file")
        self.cfg = cfg
        self.scenario = MockScenario.load(cfg.scenario)

    def run(self, rendered: RenderedHarness) -> m.VerificationReport:
        stage = self.scenario.stage_for(rendered)
        return stage.report

    def extract_symbols(self, scope: m.UnitScope, function: str) -> m.TargetFunction:
        del scope
        if function in self.scenario.front_end_failures:
            raise FrontEndFailure(self.scenario.front_end_failures[function])
        try:
            return self.scenario.symbols[function]
        except KeyError:
            raise FunctionNotFound(function) from None
