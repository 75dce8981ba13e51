"""Global precision knob.

All default tolerances in the package are read from the active
:class:`Precision` instance.  It can be replaced wholesale with
:func:`set_precision` or loaded from a JSON file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict, replace
from pathlib import Path


@dataclass(frozen=True)
class Precision:
    tol: float = 1e-12  # absolute, per elementary evaluation
    bessel_tol: float = 1e-13
    series_tol: float = 1e-11
    pole_guard: float = 1e-6
    max_refine: int = 8

    @classmethod
    def from_json(cls, path: str | Path) -> "Precision":
        data = json.loads(Path(path).read_text())
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown precision keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def with_(self, **kw) -> "Precision":
        return replace(self, **kw)


_active = Precision()


def get_precision() -> Precision:
    return _active


def set_precision(p: Precision) -> Precision:
    """Install ``p`` as the active precision and return the previous one."""
    global _active
    old, _active = _active, p
    return old
