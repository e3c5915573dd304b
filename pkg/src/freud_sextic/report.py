"""Verification reports.

A report names a check, echoes the parameters it ran with, and lists
per-item residuals.  Residuals are already normalized by the item's scale,
so a single tolerance applies: ``passed`` is ``max_residual <= tolerance``.

Composite reports (several sub-checks under one name) express residuals in
units of each sub-check's tolerance and use tolerance 1.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

import mpmath
from mpmath import mpf


@dataclass
class VerificationReport:
    check: str
    params: dict
    items: list
    max_residual: Any
    tolerance: Any
    passed: bool
    runtime: float = 0.0
    gating: bool = True
    notes: list = field(default_factory=list)
    subreports: list = field(default_factory=list)

    def to_dict(self, digits: int, include_runtime: bool = False) -> dict:
        out = {
            "check": self.check,
            "params": dict(self.params),
            "gating": self.gating,
            "pass": self.passed,
            "max_residual": fmt(self.max_residual, digits),
            "tolerance": fmt(self.tolerance, digits),
            "items": [{k: _jsonable(v, digits) for k, v in item.items()} for item in self.items],
            "notes": list(self.notes),
        }
        if self.subreports:
            out["subreports"] = [r.to_dict(digits, include_runtime) for r in self.subreports]
        if include_runtime:
            out["runtime_seconds"] = round(self.runtime, 3)
        return out

    def summary(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        if not self.gating:
            flag = "INFO"
        return (f"[{flag}] {self.check}: max residual {mpmath.nstr(self.max_residual, 5)}"
                f" (tolerance {mpmath.nstr(self.tolerance, 5)})")


def make_report(check, params, items, tolerance, *, gating=True, notes=(), started=None) -> VerificationReport:
    residuals = [it["residual"] for it in items if it.get("residual") is not None]
    max_res = max(residuals) if residuals else mpf(0)
    runtime = time.perf_counter() - started if started is not None else 0.0
    return VerificationReport(check, dict(params), list(items), max_res, tolerance,
                              bool(max_res <= tolerance), runtime, gating, list(notes))


def combine_reports(check, params, reports, *, gating=True, notes=()) -> VerificationReport:
    """Roll sub-reports into one; residuals become multiples of each sub-tolerance."""
    items = []
    for r in reports:
        ratio = r.max_residual / r.tolerance if r.tolerance else (mpf(0) if r.max_residual == 0 else mpf("inf"))
        items.append({"label": r.check, "residual": ratio, "pass": r.passed})
    rep = make_report(check, params, items, mpf(1), gating=gating, notes=notes)
    rep.passed = all(r.passed for r in reports if r.gating)
    rep.runtime = sum(r.runtime for r in reports)
    rep.subreports = list(reports)
    return rep


def fmt(x, digits: int) -> str:
    """Fixed-significance decimal string; locale independent and deterministic."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    with mpmath.mp.workdps(digits + 10):
        return mpmath.nstr(mpf(x), digits)


def _jsonable(v, digits):
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, (list, tuple)):
        return [_jsonable(x, digits) for x in v]
    return fmt(v, digits)
