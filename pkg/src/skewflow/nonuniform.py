"""Nonuniform-setting criteria: s-dependent constants and shifted-weight tests.

The nonuniform cap (1e6) is deliberately larger than the uniform one, since
constants like e^{2 t0} legitimately reach large values at probed starting
times.  Recorded constant tables N(t0) are reported per starting time and
are NOT required to be bounded; requiring that would collapse the setting
to the uniform one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import System, evolve, log_adjoint_dual_norm, log_operator_norm, log_vector_norm, vec_norm
from .errors import BudgetExceeded, DegenerateProbe, NonFinite
from .gauges import Gauge
from .probes import RatioData, backward_pairs, discrete_pairs, ratio_data, tail_probes
from .quadrature import integrate_finite, sum_tail
from .reports import (
    ES_NOT_UES,
    FAIL,
    INCONCLUSIVE,
    INCONCLUSIVE_VERDICT,
    PASS,
    STABLE_ONLY,
    UES,
    UNSTABLE,
    US_NOT_UES,
    CriterionReport,
    StabilityVerdict,
    witness_dict,
)
from .uniform import NU_LADDER, UniformPanel, _tail_with_retry, run_uniform_panel

N_CAP_NONUNIFORM = 1e6

MAJORANT_FACTOR = 1e-3
MAJORANT_MIN_LAG = 10.0


@dataclass(frozen=True)
class NonuniformDecayFit:
    nu: float
    N_of_s: dict
    residual: float
    probes_used: int

    def as_dict(self) -> dict:
        return {
            "nu": self.nu,
            "N_of_s": [[s, n] for s, n in sorted(self.N_of_s.items())],
            "residual": self.residual,
            "probes_used": self.probes_used,
        }


def fit_nonuniform_decay(
    system: System,
    data: RatioData | None = None,
    nu_ladder=NU_LADDER,
    cap: float = N_CAP_NONUNIFORM,
) -> NonuniformDecayFit | None:
    """Largest ladder rate for which every s-bin admits a finite constant.

    N(s) is the per-bin maximum of e^{nu (t-s)} ||Phi(t,t0,x)v|| / ||Phi(s,t0,x)v||;
    all bins must stay under the nonuniform cap.
    """
    if data is None:
        data = ratio_data(system)
    bins: dict = {}
    for p in data.probes:
        bins.setdefault(p.s, []).append(p)
    if not bins:
        raise DegenerateProbe("no usable decay probes")
    log_cap = math.log(cap)
    for nu in sorted(nu_ladder, reverse=True):
        table = {}
        ok = True
        for s, plist in sorted(bins.items()):
            log_n = max(p.log_ratio + nu * p.lag for p in plist)
            if log_n > log_cap:
                ok = False
                break
            table[s] = max(1.0, math.exp(log_n))
        if ok:
            return NonuniformDecayFit(nu, table, 0.0, len(data.probes))
    return None


def test_decaying_majorant(
    system: System,
    data: RatioData | None = None,
    factor: float = MAJORANT_FACTOR,
    min_lag: float = MAJORANT_MIN_LAG,
    echo: dict | None = None,
) -> CriterionReport:
    """Existence of a decaying majorant g with ratio <= M(s) g(t-s).

    Per s-bin ratio curves are normalized by their short-lag value and
    enveloped across bins; the test passes when the envelope decays by the
    required factor over the window.
    """
    if data is None:
        data = ratio_data(system)
    bins: dict = {}
    for p in data.probes:
        bins.setdefault(p.s, {})
        cur = bins[p.s].get(p.lag)
        if cur is None or p.log_ratio > cur.log_ratio:
            bins[p.s][p.lag] = p
    lags = data.lags()
    if len(lags) < 2 or max(lags) < min_lag:
        return CriterionReport(
            "majorant",
            INCONCLUSIVE,
            {"reason": "window grid too short", "max_lag": max(lags) if lags else 0.0},
            config_echo=echo or {},
        )
    g_star: dict = {}
    arg: dict = {}
    for s, curve in bins.items():
        h0 = min(curve)
        norm = curve[h0].log_ratio
        for h, p in curve.items():
            val = p.log_ratio - norm
            if h not in g_star or val > g_star[h]:
                g_star[h] = val
                arg[h] = p
    hs = sorted(g_star)
    vals = [g_star[h] for h in hs]
    # suffix maximum: the smallest non-increasing majorant of g*
    cleaned = list(vals)
    for i in range(len(cleaned) - 2, -1, -1):
        cleaned[i] = max(cleaned[i], cleaned[i + 1])
    drop = cleaned[-1] - cleaned[0]
    evidence = {
        "drop": math.exp(max(min(drop, 700.0), -700.0)),
        "required_factor": factor,
        "g_star": [[h, math.exp(max(min(cleaned[i], 700.0), -700.0))] for i, h in enumerate(hs)],
    }
    if drop <= math.log(factor):
        return CriterionReport("majorant", PASS, evidence, config_echo=echo or {})
    worst = arg[hs[-1]]
    return CriterionReport(
        "majorant",
        FAIL,
        evidence,
        witness=witness_dict(t=worst.t, s=worst.s, t0=worst.t0, x=worst.x, v=worst.v),
        config_echo=echo or {},
    )


_DATKO_NU_IDS = {
    ("vector", "continuous"): "datko-v-nu",
    ("operator", "continuous"): "datko-op-nu",
    ("vector", "discrete"): "datko-d-nu",
}


def test_datko_nonuniform(
    system: System, form: str, time: str, gauge: Gauge, alpha: float, config
) -> CriterionReport:
    """Shifted-weight forward tail test.

    Computes tails of R(e^{alpha (s - t0)} ||Phi(s,t0,x)v||) per starting
    time; the per-t0 suprema are recorded as a function of t0.  The
    operator form compares each tail against R(t0) literally, which is
    dimensionally odd; its report carries a flag and the panel records it
    without counting it toward the verdict.
    """
    if not alpha > 0.0:
        raise ValueError("alpha must be positive")
    cid = _DATKO_NU_IDS[(form, time)]
    cap = min(config.tmax, system.horizons.tail_cap)
    tol = config.tol
    n_cap = config.ncap_nonuniform
    echo = {"gauge": gauge.describe(), "alpha": alpha, "t_max": cap, "n_cap": n_cap}
    literal_threshold = form == "operator"
    if literal_threshold:
        echo["flag"] = "literal-threshold R(t0)"

    per_t0: dict = {}
    worst = None
    sup_ratio = 0.0
    any_skipped = False
    for t0, x, v in tail_probes(system):
        if form == "vector":
            def integrand(sigma, t0=t0, x=x, v=v):
                ln = alpha * (sigma - t0) + log_vector_norm(system, sigma, t0, x, v)
                return gauge(math.exp(ln))
            denom = gauge(vec_norm(v, system.norm_choice))
        else:
            def integrand(sigma, t0=t0, x=x):
                ln = alpha * (sigma - t0) + log_operator_norm(system, sigma, t0, x)
                return gauge(math.exp(ln))
            denom = 1.0
        if time == "continuous":
            result = _tail_with_retry(integrand, t0, tol, cap, config.eval_cap)
        else:
            result = sum_tail(lambda k: integrand(float(k)), int(math.floor(t0)), tol, int(cap))
        if result is None:
            any_skipped = True
            continue
        if not result.converged:
            return CriterionReport(
                cid,
                FAIL,
                {"per_t0": sorted(per_t0.items()), "divergence": True, "n_cap": n_cap},
                witness=witness_dict(
                    t0=t0, x=x, v=v, partial=result.value,
                    truncation_horizon=result.truncation_horizon, converged=False,
                ),
                config_echo=echo,
            )
        ratio = result.value / denom
        per_t0[t0] = max(per_t0.get(t0, 0.0), ratio)
        if ratio > sup_ratio:
            sup_ratio = ratio
            worst = (t0, x, v, result)

    evidence = {"per_t0": sorted(per_t0.items()), "divergence": False, "n_cap": n_cap}
    if literal_threshold:
        bad = [(t0, r) for t0, r in sorted(per_t0.items()) if r >= gauge(t0) or gauge(t0) == 0.0]
        evidence["literal_violations"] = bad
        if bad:
            t0 = bad[0][0]
            return CriterionReport(
                cid, FAIL, evidence,
                witness=witness_dict(t0=t0, ratio=bad[0][1], threshold=gauge(t0)),
                config_echo=echo,
            )
        return CriterionReport(cid, PASS, evidence, config_echo=echo)
    if worst is not None and sup_ratio > n_cap:
        t0, x, v, result = worst
        return CriterionReport(
            cid, FAIL, evidence,
            witness=witness_dict(t0=t0, x=x, v=v, ratio=sup_ratio),
            config_echo=echo,
        )
    if any_skipped:
        evidence["band"] = "overflow-limited probe"
        return CriterionReport(cid, INCONCLUSIVE, evidence, config_echo=echo)
    return CriterionReport(cid, PASS, evidence, config_echo=echo)


def test_barbashin_nonuniform(
    system: System, time: str, gauge: Gauge, alpha_or_gamma: float, config
) -> CriterionReport:
    """Shifted-weight backward adjoint test with per-t0 constants."""
    if not alpha_or_gamma > 0.0:
        raise ValueError("the shift weight must be positive")
    cid = "barbashin-nu" if time == "continuous" else "barbashin-d-nu"
    n_cap = config.ncap_nonuniform
    tol = config.tol
    a = alpha_or_gamma
    echo = {"gauge": gauge.describe(), "alpha": a, "n_cap": n_cap}

    per_t0: dict = {}
    worst = None
    sup_val = 0.0
    any_skipped = False

    def fail_report(t, t0, x, vstar, val):
        evidence = {"per_t0": sorted(per_t0.items()), "n_cap": n_cap, "early_exit": True}
        return CriterionReport(
            cid, FAIL, evidence,
            witness=witness_dict(t=t, t0=t0, x=x, vstar=list(vstar), value=val),
            config_echo=echo,
        )

    if time == "continuous":
        for t, t0 in backward_pairs(system):
            for x in system.state_samples:
                for vstar in system.dual_samples:
                    def integrand(s, t=t, t0=t0, x=x, vstar=vstar):
                        y = evolve(system, s, t0, x)
                        ln = a * (t - s) + log_adjoint_dual_norm(system, t, s, y, vstar)
                        return gauge(math.exp(ln))
                    try:
                        r = integrate_finite(integrand, t0, t, tol, eval_cap=config.eval_cap)
                    except (NonFinite, BudgetExceeded):
                        any_skipped = True
                        continue
                    per_t0[t0] = max(per_t0.get(t0, 0.0), r.value)
                    if r.value > n_cap:
                        return fail_report(t, t0, x, vstar, r.value)
                    if r.value > sup_val:
                        sup_val = r.value
                        worst = (t, t0, x, vstar, r.value)
    else:
        for n, n0 in discrete_pairs(system):
            for x in system.state_samples:
                for vstar in system.dual_samples:
                    total = 0.0
                    bad = False
                    for k in range(n0, n + 1):
                        y = evolve(system, float(k), float(n0), x)
                        ln = a * (n - k) + log_adjoint_dual_norm(
                            system, float(n), float(k), y, vstar
                        )
                        try:
                            total += gauge(math.exp(ln))
                        except (OverflowError, NonFinite):
                            bad = True
                            break
                    if bad:
                        any_skipped = True
                        continue
                    per_t0[float(n0)] = max(per_t0.get(float(n0), 0.0), total)
                    if total > n_cap:
                        return fail_report(n, n0, x, vstar, total)
                    if total > sup_val:
                        sup_val = total
                        worst = (n, n0, x, vstar, total)

    evidence = {"per_t0": sorted(per_t0.items()), "n_cap": n_cap}
    if any_skipped:
        evidence["band"] = "overflow-limited probe"
        return CriterionReport(cid, INCONCLUSIVE, evidence, config_echo=echo)
    if worst is None:
        return CriterionReport(cid, INCONCLUSIVE, {"reason": "no probes"}, config_echo=echo)
    return CriterionReport(cid, PASS, evidence, config_echo=echo)


# ---------------------------------------------------------------------------
# the combined panel

# criteria counted toward the nonuniform verdict (datko-op-nu is recorded
# only: its literal threshold is flagged in its report)
_COUNTED = ("fit-exp-nu", "majorant", "datko-v-nu", "datko-d-nu", "barbashin-nu", "barbashin-d-nu")


def _fit_nu_report(fit: NonuniformDecayFit | None, cap: float, echo: dict) -> CriterionReport:
    if fit is not None:
        table = sorted(fit.N_of_s.items())
        ev = {
            "nu": fit.nu,
            "max_N_of_s": max(fit.N_of_s.values()),
            "N_of_s": [[s, n] for s, n in table],
            "n_cap": cap,
        }
        return CriterionReport("fit-exp-nu", PASS, ev, config_echo=echo)
    return CriterionReport(
        "fit-exp-nu",
        INCONCLUSIVE,
        {"reason": "no ladder rate keeps every s-bin under the cap", "n_cap": cap},
        config_echo=echo,
    )


def run_nonuniform_panel(
    system: System, config, uniform: UniformPanel | None = None, selected=None
) -> StabilityVerdict:
    """Run both panels and combine them into one classification.

    The uniform verdict dominates when it is UES; otherwise a clean
    nonuniform panel yields ES-not-UES.  Inconsistencies (uniform UES with
    nonuniform fail witnesses) are reported, never silently resolved.
    """
    from .gauges import make_gauge

    data = ratio_data(system, s_step=config.grid_step)
    if uniform is None:
        uniform = run_uniform_panel(system, config, data=data, selected=selected)
    gauge = make_gauge(config.gauge)
    cap = config.ncap_nonuniform
    echo = {"gauge": gauge.describe(), "n_cap": cap}

    def want(cid):
        return selected is None or cid in selected

    nfit = fit_nonuniform_decay(system, data, NU_LADDER, cap)
    alpha = uniform.fit.nu / 2.0 if uniform.fit is not None else 0.5

    reports = []
    if want("fit-exp-nu"):
        reports.append(_fit_nu_report(nfit, cap, echo))
    if want("majorant"):
        reports.append(test_decaying_majorant(system, data, echo=echo))
    if want("datko-v-nu"):
        reports.append(test_datko_nonuniform(system, "vector", "continuous", gauge, alpha, config))
    if want("datko-op-nu"):
        reports.append(test_datko_nonuniform(system, "operator", "continuous", gauge, alpha, config))
    if want("datko-d-nu"):
        reports.append(test_datko_nonuniform(system, "vector", "discrete", gauge, alpha, config))
    if want("barbashin-nu"):
        reports.append(test_barbashin_nonuniform(system, "continuous", gauge, alpha, config))
    if want("barbashin-d-nu"):
        reports.append(test_barbashin_nonuniform(system, "discrete", gauge, alpha, config))

    all_reports = list(uniform.reports) + reports
    discrepancies = list(uniform.discrepancies)

    if selected is not None:
        return StabilityVerdict(INCONCLUSIVE_VERDICT, all_reports, discrepancies,
                                uniform.growth.as_dict())

    by_id = {r.criterion_id: r for r in reports}
    counted_fails = [cid for cid in _COUNTED if cid in by_id and by_id[cid].verdict == FAIL]
    nfit_ok = by_id["fit-exp-nu"].verdict == PASS
    nonuniform_ok = nfit_ok and not counted_fails

    if uniform.verdict == UES:
        if counted_fails:
            label = INCONCLUSIVE_VERDICT
            discrepancies.append(
                "uniform panel certified UES but nonuniform criteria failed: "
                + ", ".join(counted_fails)
            )
        else:
            label = UES
    elif nonuniform_ok:
        label = ES_NOT_UES
    elif uniform.verdict == US_NOT_UES:
        label = US_NOT_UES
    elif uniform.verdict == UNSTABLE:
        # nonuniform stability without exponential decay: bounded s-bins
        label = STABLE_ONLY if _bins_bounded(data, cap) else UNSTABLE
    else:
        label = INCONCLUSIVE_VERDICT
    return StabilityVerdict(label, all_reports, discrepancies, uniform.growth.as_dict())


def _bins_bounded(data: RatioData, cap: float) -> bool:
    bins: dict = {}
    for p in data.probes:
        bins[p.s] = max(bins.get(p.s, 0.0), p.log_ratio)
    return bool(bins) and max(bins.values()) <= math.log(cap)
