"""Exponential growth envelopes, uniform and binned-by-s.

An envelope certifies ||Phi(t,t0,x)v|| <= M e^{omega (t-s)} ||Phi(s,t0,x)v||
over a probe set.  omega comes from a fixed ladder so estimates are
reproducible; M is the smallest constant making the inequality hold on the
probes (clamped to >= 1).  When even the top ladder rung needs M above the
cap, the envelope is flagged dubious: criteria whose hypotheses require
genuine uniform growth refuse to run on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import System
from .errors import DegenerateProbe
from .probes import RatioData, ratio_data

OMEGA_LADDER = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0)

M_CAP_UNIFORM = 1e3
M_CAP_NONUNIFORM = 1e6


@dataclass(frozen=True)
class GrowthEnvelope:
    kind: str                      # "uniform" | "nonuniform"
    M: float | None = None
    omega: float | None = None
    M_by_s: dict | None = None
    omega_by_s: dict | None = None
    dubious: bool = False
    skipped: int = 0

    def as_dict(self) -> dict:
        d = {"kind": self.kind, "dubious": self.dubious, "skipped": self.skipped}
        if self.kind == "uniform":
            d["M"] = self.M
            d["omega"] = self.omega
        else:
            d["M_by_s"] = [[s, m] for s, m in sorted(self.M_by_s.items())]
            d["omega_by_s"] = [[s, w] for s, w in sorted(self.omega_by_s.items())]
        return d


def _fit_bin(entries, cap: float):
    """Least ladder omega whose M stays under the cap; falls back to the top rung."""
    for omega in OMEGA_LADDER:
        log_m = max(lr - omega * h for lr, h in entries)
        if log_m <= math.log(cap):
            return omega, max(1.0, math.exp(log_m)), False
    omega = OMEGA_LADDER[-1]
    log_m = max(lr - omega * h for lr, h in entries)
    return omega, max(1.0, math.exp(min(log_m, 700.0))), True


def estimate_growth(
    system: System,
    setting: str = "uniform",
    grid_h: float = 10.0,
    data: RatioData | None = None,
    omega_const: bool = False,
    s_step: float = 0.5,
) -> GrowthEnvelope:
    if data is None:
        data = ratio_data(system, lag_max=grid_h, s_step=s_step)
    entries = [(p.log_ratio, p.lag) for p in data.probes if p.lag <= grid_h]
    if not entries:
        raise DegenerateProbe("no usable growth probes")
    if setting == "uniform":
        omega, m, dubious = _fit_bin(entries, M_CAP_UNIFORM)
        return GrowthEnvelope("uniform", M=m, omega=omega, dubious=dubious, skipped=data.skipped)

    bins: dict = {}
    for p in data.probes:
        if p.lag <= grid_h:
            bins.setdefault(p.s, []).append((p.log_ratio, p.lag))
    m_by_s = {}
    w_by_s = {}
    dubious = False
    for s, ent in sorted(bins.items()):
        omega, m, bad = _fit_bin(ent, M_CAP_NONUNIFORM)
        m_by_s[s] = m
        w_by_s[s] = omega
        dubious = dubious or bad
    if omega_const:
        top = max(w_by_s.values())
        w_by_s = {s: top for s in w_by_s}
        # refit the constants under the collapsed rate
        for s, ent in sorted(bins.items()):
            log_m = max(lr - top * h for lr, h in ent)
            m_by_s[s] = max(1.0, math.exp(min(log_m, 700.0)))
    return GrowthEnvelope(
        "nonuniform", M_by_s=m_by_s, omega_by_s=w_by_s, dubious=dubious, skipped=data.skipped
    )


def verify_growth(system: System, env: GrowthEnvelope, data: RatioData | None = None):
    """Check the envelope inequality on probes (relative slack 1e-9).

    Returns None when every probe satisfies it, otherwise the first
    violating probe.
    """
    if data is None:
        data = ratio_data(system, lag_max=10.0)
    slack = 1e-9
    for p in data.probes:
        if env.kind == "uniform":
            bound = math.log(env.M) + env.omega * p.lag
        else:
            key = p.s if p.s in env.M_by_s else min(env.M_by_s, key=lambda s: abs(s - p.s))
            bound = math.log(env.M_by_s[key]) + env.omega_by_s[key] * p.lag
        if p.log_ratio > bound + slack:
            return p
    return None
