"""Adapter for a CBMC-compatible external checker.

All checker flag strings live in the table below; nothing else in the
workbench spells a checker flag. The adapter materializes the rendered
proof directory, runs one property pass and one location-coverage pass,
and normalizes both through the report parser. Timeout and memory
exhaustion are told apart by exit conventions plus a log sentinel scan.
"""

from __future__ import annotations

import re
import shutil
import subprocess
import time
from pathlib import Path

from .. import model as m
from ..codegen import RenderedHarness
from ..errors import BackendUnavailable, FrontEndFailure, FunctionNotFound
from .config import BackendConfig
from .report_parse import ReportDialect, parse_report

CHECKER_FLAGS = {
    "entry": "--function",
    "unwindset": "--unwindset",
    "json_ui": "--json-ui",
    "cover_location": ("--cover", "location"),
    "bounds_check": "--bounds-check",
    "pointer_check": "--pointer-check",
    "overflow_check": "--signed-overflow-check",
    "unwinding_assertions": "--unwinding-assertions",
    "nondet_static": "--nondet-static",
    "show_loops": "--show-loops",
    "show_symbol_table": "--show-symbol-table",
}

ENTRY_FUNCTION = "harness"

_MAKEFILE_VAR_RE = re.compile(r"^(\w+)\s*=\s*(.*)$", re.MULTILINE)
_OOM_SENTINELS = ("out of memory", "bad_alloc", "cannot allocate")
_POSTPROCESSING_SENTINELS = ("post-processing", "postprocessing")


def makefile_vars(makefile: str) -> dict[str, str]:
    return {k: v.strip() for k, v in _MAKEFILE_VAR_RE.findall(makefile)}


class CbmcBackend:
    def __init__(self, cfg: BackendConfig):
        self.cfg = cfg
        exe = cfg.require_executable()
        if shutil.which(exe) is None and not Path(exe).exists():
            raise BackendUnavailable(exe)
        self.exe = exe

    # -- running ------------------------------------------------------------

    def run(self, rendered: RenderedHarness) -> m.VerificationReport:
        workdir = Path(self.cfg.workdir)
        self._materialize(rendered, workdir)
        harness_dir, sources, flags = self._build_command_parts(rendered, workdir)

        start = time.monotonic()
        checks = [CHECKER_FLAGS["bounds_check"], CHECKER_FLAGS["pointer_check"],
                  CHECKER_FLAGS["unwinding_assertions"]]
        base = [self.exe, *sources, CHECKER_FLAGS["entry"], ENTRY_FUNCTION,
                CHECKER_FLAGS["json_ui"], *flags]
        try:
            main = subprocess.run(
                base + checks, cwd=harness_dir, capture_output=True,
                timeout=self.cfg.timeout_seconds)
        except subprocess.TimeoutExpired as exc:
            elapsed = time.monotonic() - start
            return m.VerificationReport(
                run_status=m.RunStatus.timeout(elapsed),
                wall_seconds=elapsed,
                diagnostics=self._tail_diagnostics(exc.stdout, exc.stderr))

        status = self._classify_exit(main)
        if status is not None:
            elapsed = time.monotonic() - start
            return m.VerificationReport(
                run_status=status, wall_seconds=elapsed,
                diagnostics=self._tail_diagnostics(main.stdout, main.stderr))

        cover = subprocess.run(
            base + list(CHECKER_FLAGS["cover_location"]), cwd=harness_dir,
            capture_output=True, timeout=self.cfg.timeout_seconds)
        elapsed = time.monotonic() - start

        combined = self._combine_outputs(main.stdout, cover.stdout)
        report = parse_report(combined, ReportDialect.JSON_UI)
        return m.VerificationReport(
            run_status=report.run_status,
            properties=report.properties,
            coverage=report.coverage,
            traces=dict(report.traces),
            solver_stats=report.solver_stats,
            wall_seconds=elapsed,
            diagnostics=report.diagnostics,
        )

    def _materialize(self, rendered: RenderedHarness, workdir: Path) -> None:
        for rel, text in rendered.file_layout.items():
            path = workdir / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)

    def _build_command_parts(self, rendered: RenderedHarness, workdir: Path,
                             ) -> tuple[Path, list[str], list[str]]:
        vars_ = makefile_vars(rendered.makefile)
        entry = vars_.get("H_ENTRY", "")
        harness_dir = next(
            (workdir / rel).parent for rel in rendered.file_layout
            if rel.endswith("_harness.c"))
        root = str(workdir)
        sources = [f"{entry}.c"]
        for link in vars_.get("LINK", "").split():
            sources.append(link.replace("$(ROOT)", root))
        flags: list[str] = []
        flags.extend(vars_.get("H_CBMCFLAGS", "").split())
        flags.extend(vars_.get("H_DEF", "").split())
        for inc in vars_.get("H_INC", "").split():
            flags.append(inc.replace("$(ROOT)", root))
        return harness_dir, sources, flags

    def _classify_exit(self, proc: subprocess.CompletedProcess,
                       ) -> m.RunStatus | None:
        """None means the run completed (verified or found violations)."""
        if proc.returncode in (0, 10):
            return None
        text = ((proc.stdout or b"") + (proc.stderr or b"")).decode(
            "utf-8", errors="replace").lower()
        if proc.returncode == -9 or any(s in text for s in _OOM_SENTINELS):
            return m.RunStatus(m.RunStatusKind.MEMORY_EXHAUSTED)
        if any(s in text for s in _POSTPROCESSING_SENTINELS):
            return m.RunStatus(m.RunStatusKind.CRASHED_AT_POSTPROCESSING)
        return m.RunStatus.build_failed(
            (proc.stderr or b"").decode("utf-8", errors="replace")[-2000:])

    def _tail_diagnostics(self, stdout: bytes | None, stderr: bytes | None,
                          ) -> tuple[str, ...]:
        text = ((stdout or b"") + (stderr or b"")).decode("utf-8", errors="replace")
        tail = [line for line in text.splitlines() if line.strip()][-20:]
        out = []
        for line in tail:
            low = line.lower()
            if any(s in low for s in _POSTPROCESSING_SENTINELS):
                out.append("stage: post-processing")
            elif "solving with" in low or "sat solving" in low:
                out.append("stage: sat-solving")
            if "memmove" in low:
                out.append("memmove")
        return tuple(dict.fromkeys(out))

    def _combine_outputs(self, properties_out: bytes, coverage_out: bytes) -> bytes:
        import json as _json
        try:
            main = _json.loads(properties_out.decode("utf-8"))
            cover = _json.loads(coverage_out.decode("utf-8"))
        except (UnicodeDecodeError, _json.JSONDecodeError):
            return properties_out
        if isinstance(main, list) and isinstance(cover, list):
            return _json.dumps(main + [r for r in cover if "goals" in r]).encode()
        return properties_out

    # -- symbol extraction ----------------------------------------------------

    def extract_symbols(self, scope: m.UnitScope, function: str) -> m.TargetFunction:
        """Best-effort extraction through the checker front-end's loop and
        symbol dumps; exact shapes vary by checker version, so anything the
        dump does not resolve stays empty for a human to fill in."""
        source = scope.linked_sources[0] if scope.linked_sources else ""
        cmd = [self.exe, *scope.linked_sources, CHECKER_FLAGS["json_ui"],
               CHECKER_FLAGS["show_loops"]]
        for d in scope.include_dirs:
            cmd.append(f"-I{d}")
        for k in sorted(scope.config_defines):
            cmd.append(f"-D{k}={scope.config_defines[k]}")
        proc = subprocess.run(cmd, capture_output=True,
                              timeout=self.cfg.timeout_seconds)
        if proc.returncode not in (0, 10):
            raise FrontEndFailure(
                (proc.stderr or b"").decode("utf-8", errors="replace").splitlines()[-5:])
        loops = []
        try:
            import json as _json
            for record in _json.loads(proc.stdout.decode("utf-8")):
                for loop in record.get("loops", []) if isinstance(record, dict) else []:
                    name = loop.get("name", "")
                    if name.startswith(f"{function}."):
                        loc = loop.get("sourceLocation", {})
                        loops.append(m.LoopRef(
                            id=name, line=int(loc.get("line", 0) or 0)))
        except Exception:
            pass
        if not self._function_declared(scope, function):
            raise FunctionNotFound(function)
        return m.TargetFunction(
            name=function, source_file=source, parameters=(),
            return_type=m.CTypeRef("int"), reachable_loops=tuple(loops))

    def _function_declared(self, scope: m.UnitScope, function: str) -> bool:
        for path in scope.linked_sources:
            try:
                if re.search(rf"\b{re.escape(function)}\s*\(", Path(path).read_text()):
                    return True
            except OSError:
                continue
        return False
