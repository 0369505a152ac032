"""Backend selection and limits."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

DEFAULT_TIMEOUT_SECONDS = 900  # the verification watchdog; configurable


class BackendKind(str, Enum):
    EXTERNAL_CHECKER = "external_checker"
    MOCK = "mock"


@dataclass(frozen=True)
class BackendConfig:
    kind: BackendKind
    workdir: str
    executable: Optional[str] = None
    timeout_seconds: int = DEFAULT_TIMEOUT_SECONDS
    memory_limit_mb: Optional[int] = None
    scenario: Optional[str] = None  # mock only: path to the scenario file

    def require_executable(self) -> str:
        if not self.executable:
            raise ValueError("external checker backend requires an executable path")
        return self.executable
