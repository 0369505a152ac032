"""Pluggable verifier backends: one external-checker adapter, one mock."""

from __future__ import annotations

from .. import model as m
from ..codegen import RenderedHarness
from .config import BackendConfig, BackendKind, DEFAULT_TIMEOUT_SECONDS
from .mock import MockBackend, MockScenario
from .report_parse import ReportDialect, parse_report, validate_report


def make_backend(cfg: BackendConfig):
    if cfg.kind is BackendKind.MOCK:
        return MockBackend(cfg)
    from .cbmc import CbmcBackend

    return CbmcBackend(cfg)


def run(rendered: RenderedHarness, cfg: BackendConfig) -> m.VerificationReport:
    return make_backend(cfg).run(rendered)


def extract_symbols(scope: m.UnitScope, function: str,
                    cfg: BackendConfig) -> m.TargetFunction:
    return make_backend(cfg).extract_symbols(scope, function)


__all__ = [
    "BackendConfig", "BackendKind", "DEFAULT_TIMEOUT_SECONDS",
    "MockBackend", "MockScenario", "ReportDialect",
    "extract_symbols", "make_backend", "parse_report", "run", "validate_report",
]
