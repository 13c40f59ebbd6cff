"""Uniform-setting stability criteria and their panel.

Every "for all" quantifier is discharged over finite probe grids with the
cap N_cap (default 1e3) and an explicit inconclusive band, so pass/fail is
reproducible and every fail carries a falsifiable witness.  Forward tail
integrals that hit the horizon cap without settling are treated as
divergence witnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    System,
    dual_norm,
    evolve,
    log_adjoint_dual_norm,
    log_operator_norm,
    log_vector_norm,
    vec_norm,
)
from .errors import BudgetExceeded, DegenerateProbe, MissingGrowthEnvelope, NonFinite
from .gauges import Gauge
from .growth import GrowthEnvelope
from .probes import (
    RatioData,
    backward_pairs,
    discrete_pairs,
    ratio_data,
    s_grid,
    tail_probes,
)
from .quadrature import integrate_finite, integrate_tail, sum_tail
from .reports import (
    FAIL,
    INCONCLUSIVE,
    INCONCLUSIVE_VERDICT,
    PASS,
    UES,
    UNSTABLE,
    US_NOT_UES,
    CriterionReport,
    witness_dict,
)

NU_LADDER = tuple(2.0 ** k for k in range(-4, 4))

HALF_DECAY_THRESHOLD = 0.5  # fixed by the half-decay characterization
MINORANT_FACTOR = 1e3
MINORANT_MIN_LAG = 10.0


@dataclass(frozen=True)
class DecayFit:
    N: float
    nu: float
    residual: float
    probes_used: int
    skipped: int

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "nu": self.nu,
            "residual": self.residual,
            "probes_used": self.probes_used,
            "skipped": self.skipped,
        }


def fit_exponential_decay(
    system: System,
    data: RatioData | None = None,
    n_cap: float = 1e3,
    ladder=NU_LADDER,
) -> DecayFit | None:
    """Largest ladder rate nu admitting ||Phi(t,t0,x)v|| <= N e^{-nu(t-s)} ||Phi(s,t0,x)v||
    with N <= n_cap on the probes.  Returns None when even the smallest rate
    would need a constant above the cap.
    """
    if data is None:
        data = ratio_data(system)
    if not data.probes:
        raise DegenerateProbe("no usable decay probes")
    log_cap = math.log(n_cap)
    for nu in sorted(ladder, reverse=True):
        log_n = max(p.log_ratio + nu * p.lag for p in data.probes)
        if log_n <= log_cap:
            n = max(1.0, math.exp(log_n))
            # residual of the certified inequality; zero by construction up
            # to rounding, recomputed honestly from the probe logs
            resid = max(
                0.0,
                max(math.exp(min(p.log_ratio + nu * p.lag, 700.0)) - n for p in data.probes),
            )
            return DecayFit(n, nu, resid, len(data.probes), data.skipped)
    return None


def test_uniform_stability(
    system: System, data: RatioData | None = None, n_cap: float = 1e3, echo: dict | None = None
) -> CriterionReport:
    """Bounded trajectory-norm ratios: ||Phi(t,t0,x)v|| <= N ||Phi(s,t0,x)v||."""
    if data is None:
        data = ratio_data(system)
    worst = max(data.probes, key=lambda p: p.log_ratio)
    n = max(1.0, math.exp(min(worst.log_ratio, 700.0)))
    evidence = {"N": n, "n_cap": n_cap, "probes": len(data.probes)}
    if n <= n_cap:
        return CriterionReport("unif-stab", PASS, evidence, config_echo=echo or {})
    return CriterionReport(
        "unif-stab",
        FAIL,
        evidence,
        witness=witness_dict(t=worst.t, s=worst.s, t0=worst.t0, x=worst.x, v=worst.v, ratio=n),
        config_echo=echo or {},
    )


def test_divergent_minorant(
    system: System,
    data: RatioData | None = None,
    factor: float = MINORANT_FACTOR,
    min_lag: float = MINORANT_MIN_LAG,
    echo: dict | None = None,
) -> CriterionReport:
    """Existence of a divergent nondecreasing minorant of the inverse ratios.

    f_hat(h) = min over probes at lag h of ||Phi(s,...)v|| / ||Phi(t,...)v||
    is cleaned to its largest nondecreasing minorant (suffix minimum); the
    test passes when the cleaned curve grows by the divergence factor over
    the window.
    """
    if data is None:
        data = ratio_data(system)
    lags = data.lags()
    by_lag: dict = {}
    for p in data.probes:
        cur = by_lag.get(p.lag)
        if cur is None or p.log_ratio > cur.log_ratio:
            by_lag[p.lag] = p  # max ratio = min inverse ratio
    if len(lags) < 2 or max(lags) < min_lag:
        return CriterionReport(
            "minorant",
            INCONCLUSIVE,
            {"reason": "window grid too short", "max_lag": max(lags) if lags else 0.0},
            config_echo=echo or {},
        )
    log_fhat = [-by_lag[h].log_ratio for h in lags]
    # suffix minimum: the largest nondecreasing function below f_hat
    cleaned = list(log_fhat)
    for i in range(len(cleaned) - 2, -1, -1):
        cleaned[i] = min(cleaned[i], cleaned[i + 1])
    gain = cleaned[-1] - cleaned[0]
    table = [[lags[i], math.exp(min(cleaned[i], 700.0))] for i in range(len(lags))]
    evidence = {
        "gain": math.exp(min(gain, 700.0)),
        "required_factor": factor,
        "f_hat": table,
    }
    if gain >= math.log(factor):
        return CriterionReport("minorant", PASS, evidence, config_echo=echo or {})
    worst = by_lag[lags[-1]]
    return CriterionReport(
        "minorant",
        FAIL,
        evidence,
        witness=witness_dict(t=worst.t, s=worst.s, t0=worst.t0, x=worst.x, v=worst.v),
        config_echo=echo or {},
    )


def test_half_decay(
    system: System,
    growth_env: GrowthEnvelope | None,
    mode: str = "continuous",
    delta_max: float = 6.0,
    echo: dict | None = None,
) -> CriterionReport:
    """Search for a uniform lag at which every unit trajectory halves.

    Requires an established (non-dubious) growth envelope, since the
    conclusion only follows under that hypothesis.
    """
    if delta_max < 2.0:
        raise ValueError("delta_max must be at least 2")
    if growth_env is None or growth_env.dubious:
        raise MissingGrowthEnvelope("half-decay requires a verified growth envelope")
    cid = "half-decay" if mode == "continuous" else "half-decay-d"
    if mode == "continuous":
        deltas = [round(1.1 + 0.1 * k, 10) for k in range(int(round((delta_max - 1.1) / 0.1)) + 1)]
    else:
        deltas = [float(k) for k in range(1, int(delta_max) + 1)]
    svals = s_grid(system.horizons.s_max)
    log_half = math.log(HALF_DECAY_THRESHOLD)

    def sup_at(delta):
        worst_val = -math.inf
        worst = None
        for s in svals:
            for x in system.state_samples:
                if mode == "continuous":
                    for v in system.vector_samples:
                        ln = log_vector_norm(system, s + delta, s, x, v)
                        if ln > worst_val:
                            worst_val, worst = ln, (s, x, v)
                else:
                    ln = log_operator_norm(system, s + delta, s, x)
                    if ln > worst_val:
                        worst_val, worst = ln, (s, x, None)
        return worst_val, worst

    for delta in deltas:
        val, _ = sup_at(delta)
        if val <= log_half:
            return CriterionReport(
                cid,
                PASS,
                {"delta": delta, "sup_norm": math.exp(val), "threshold": HALF_DECAY_THRESHOLD},
                config_echo=echo or {},
            )
    val, worst = sup_at(deltas[-1])
    s, x, v = worst
    w = witness_dict(s=s, x=x, v=v) if v is not None else witness_dict(s=s, x=x)
    w["norm_at_delta_max"] = math.exp(min(val, 700.0))
    return CriterionReport(
        cid,
        FAIL,
        {"delta_max": deltas[-1], "sup_norm": math.exp(min(val, 700.0)), "threshold": HALF_DECAY_THRESHOLD},
        witness=w,
        config_echo=echo or {},
    )


# ---------------------------------------------------------------------------
# forward (tail) and backward (adjoint) integral criteria

_DATKO_IDS = {
    ("vector", "continuous"): "datko-v",
    ("operator", "continuous"): "datko-op",
    ("vector", "discrete"): "datko-d",
}

_BARBASHIN_IDS = {
    ("vector-dual", "continuous"): "barbashin-v",
    ("operator-dual", "continuous"): "barbashin-op",
    ("operator-dual", "discrete"): "barbashin-d",
    ("vector-dual", "discrete"): "barbashin-d",
}


def _tail_with_retry(integrand, a: float, tol: float, cap: float, eval_cap: int = 1_000_000):
    """Integrate a tail, halving the horizon on overflow.

    Overflow (or an exhausted evaluation budget) means the horizon was too
    long for the integrand's range, so the divergence signal is recovered
    at the largest finite horizon.
    """
    horizon = cap
    while horizon > a + 2.0:
        try:
            return integrate_tail(integrand, a, tol, horizon, eval_cap=eval_cap)
        except (NonFinite, BudgetExceeded):
            horizon = a + (horizon - a) / 2.0
    return None


def test_datko(system: System, form: str, time: str, gauge: Gauge, config) -> CriterionReport:
    """Forward tail test: gauged trajectory norms must have bounded tails.

    vector: integral (or series) of R(||Phi(s,t0,x)v||) from t0, compared to
    N_cap * R(||v||).  operator: same with the induced norm, compared to
    N_cap * R(1).  A tail that fails to settle before the horizon cap is a
    divergence witness; a settled tail lands in pass / inconclusive / fail
    bands at N_cap and 10*N_cap.
    """
    cid = _DATKO_IDS[(form, time)]
    n_cap = config.ncap
    tol = config.tol
    cap = min(config.tmax, system.horizons.tail_cap)
    echo = {"gauge": gauge.describe(), "t_max": cap, "n_cap": n_cap, "tol": tol}

    probes = tail_probes(system)
    if form == "operator":
        # the induced norm does not depend on v; keep one probe per (t0, x)
        lead = system.vector_samples[0]
        probes = [(t0, x, v) for t0, x, v in probes if v is lead]

    sup_ratio = 0.0
    worst = None
    any_inconclusive = False
    per_t0: dict = {}
    for t0, x, v in probes:
        if form == "vector":
            def integrand(sigma, t0=t0, x=x, v=v):
                return gauge(math.exp(log_vector_norm(system, sigma, t0, x, v)))
            denom = gauge(vec_norm(v, system.norm_choice))
        else:
            def integrand(sigma, t0=t0, x=x):
                return gauge(math.exp(log_operator_norm(system, sigma, t0, x)))
            denom = gauge(1.0)
        if denom == 0.0:
            raise DegenerateProbe("gauge vanished on a unit probe vector")
        if time == "continuous":
            result = _tail_with_retry(integrand, t0, tol, cap, config.eval_cap)
        else:
            result = sum_tail(lambda k: integrand(float(k)), int(math.floor(t0)) + 1, tol, int(cap))
        if result is None:
            any_inconclusive = True
            continue
        ratio = result.value / denom
        per_t0[t0] = max(per_t0.get(t0, 0.0), ratio)
        if not result.converged:
            report = CriterionReport(
                cid,
                FAIL,
                {
                    "sup_ratio": ratio,
                    "n_cap": n_cap,
                    "per_t0": sorted(per_t0.items()),
                    "divergence": True,
                },
                witness=witness_dict(
                    t0=t0, x=x, v=v, partial=result.value,
                    truncation_horizon=result.truncation_horizon, converged=False,
                ),
                config_echo=echo,
            )
            return report
        if ratio > sup_ratio:
            sup_ratio = ratio
            worst = (t0, x, v, result)

    evidence = {
        "sup_ratio": sup_ratio,
        "n_cap": n_cap,
        "per_t0": sorted(per_t0.items()),
        "divergence": False,
    }
    if worst is not None and sup_ratio >= 10.0 * n_cap:
        t0, x, v, result = worst
        return CriterionReport(
            cid,
            FAIL,
            evidence,
            witness=witness_dict(t0=t0, x=x, v=v, partial=result.value, ratio=sup_ratio),
            config_echo=echo,
        )
    if any_inconclusive or sup_ratio > n_cap:
        evidence["band"] = "ratio above cap" if sup_ratio > n_cap else "overflow-limited probe"
        return CriterionReport(cid, INCONCLUSIVE, evidence, config_echo=echo)
    return CriterionReport(cid, PASS, evidence, config_echo=echo)


def test_barbashin(
    system: System, form: str, time: str, gauge: Gauge, config, hypothesis: str = "none"
) -> CriterionReport:
    """Backward adjoint test: gauged dual-trajectory integrals stay bounded.

    vector-dual: integral over [t0, t] of R(||Phi(t,s,phi(s,t0,x))* v*||)
    against R(N_cap ||v*||).  operator-dual / discrete: plain constant cap.
    The report records which hypothesis (uniform stability or growth) was
    established before running, since the two variants of this test differ
    only there.
    """
    cid = _BARBASHIN_IDS[(form, time)]
    n_cap = config.ncap
    tol = config.tol
    echo = {"gauge": gauge.describe(), "n_cap": n_cap, "hypothesis": hypothesis, "tol": tol}

    sup_val = 0.0
    worst = None
    any_skipped = False

    def fail_report(t, t0, x, vstar, val, bound):
        evidence = {"sup_integral": val, "bound": bound, "overflow_skipped": any_skipped,
                    "early_exit": True}
        w = witness_dict(t=t, t0=t0, x=x, value=val)
        if vstar is not None:
            w["vstar"] = list(vstar)
        return CriterionReport(cid, FAIL, evidence, witness=w, config_echo=echo)

    if time == "continuous":
        for t, t0 in backward_pairs(system):
            for x in system.state_samples:
                for vstar in system.dual_samples:
                    def integrand(s, t=t, t0=t0, x=x, vstar=vstar):
                        y = evolve(system, s, t0, x)
                        return gauge(math.exp(log_adjoint_dual_norm(system, t, s, y, vstar)))
                    try:
                        r = integrate_finite(integrand, t0, t, tol, eval_cap=config.eval_cap)
                    except (NonFinite, BudgetExceeded):
                        any_skipped = True
                        continue
                    if form == "vector-dual":
                        bound = gauge(n_cap * dual_norm(vstar, system.norm_choice))
                    else:
                        bound = n_cap
                    if r.value > bound:
                        return fail_report(t, t0, x, vstar, r.value, bound)
                    if worst is None or r.value > sup_val:
                        sup_val = r.value
                        worst = (t, t0, x, vstar, r.value, bound)
    else:
        for n, n0 in discrete_pairs(system):
            for x in system.state_samples:
                total = 0.0
                try:
                    for k in range(n0, n + 1):
                        total += gauge(math.exp(log_operator_norm(system, float(n), float(k), x)))
                except (NonFinite, OverflowError):
                    any_skipped = True
                    continue
                if total > n_cap:
                    return fail_report(n, n0, x, None, total, n_cap)
                if worst is None or total > sup_val:
                    sup_val = total
                    worst = (n, n0, x, None, total, n_cap)

    if worst is None:
        return CriterionReport(
            cid, INCONCLUSIVE, {"reason": "no finite probes"}, config_echo=echo
        )
    bound = worst[5]
    evidence = {"sup_integral": sup_val, "bound": bound, "overflow_skipped": any_skipped}
    return CriterionReport(cid, PASS, evidence, config_echo=echo)


def test_discrete_decay(
    system: System,
    growth_env: GrowthEnvelope | None,
    int_data: RatioData | None = None,
    n_cap: float = 1e3,
    echo: dict | None = None,
) -> CriterionReport:
    """Integer-time exponential decay fit (hypothesis: uniform growth)."""
    if growth_env is None or growth_env.dubious:
        raise MissingGrowthEnvelope("discrete decay test requires a verified growth envelope")
    if int_data is None:
        int_data = ratio_data(system, integer_only=True)
    fit = fit_exponential_decay(system, int_data, n_cap)
    max_lag = max((p.lag for p in int_data.probes), default=0.0)
    thin = max_lag < 5.0
    evidence = {"thin_grid": thin, "max_lag": max_lag}
    if fit is None:
        evidence["reason"] = "no ladder rate admits a constant under the cap"
        return CriterionReport("decay-d", INCONCLUSIVE, evidence, config_echo=echo or {})
    evidence.update({"N": fit.N, "nu": fit.nu})
    return CriterionReport("decay-d", PASS, evidence, config_echo=echo or {})


# ---------------------------------------------------------------------------
# the panel

@dataclass
class UniformPanel:
    verdict: str
    reports: list
    growth: GrowthEnvelope
    fit: DecayFit | None
    discrepancies: list

    def report(self, cid: str) -> CriterionReport | None:
        for r in self.reports:
            if r.criterion_id == cid:
                return r
        return None


_UES_CRITERIA = (
    "fit-exp", "minorant", "half-decay", "half-decay-d",
    "datko-v", "datko-op", "datko-d",
    "barbashin-v", "barbashin-op", "barbashin-d", "decay-d",
)


def _fit_report(fit: DecayFit | None, data: RatioData, n_cap: float, echo: dict) -> CriterionReport:
    if fit is not None:
        return CriterionReport("fit-exp", PASS, dict(fit.as_dict(), n_cap=n_cap), config_echo=echo)
    worst = max(data.probes, key=lambda p: p.log_ratio)
    return CriterionReport(
        "fit-exp",
        INCONCLUSIVE,
        {
            "reason": "no ladder rate admits a constant under the cap",
            "max_ratio": math.exp(min(worst.log_ratio, 700.0)),
            "n_cap": n_cap,
        },
        config_echo=echo,
    )


def run_uniform_panel(system: System, config, data: RatioData | None = None, selected=None) -> UniformPanel:
    """Run the uniform criteria in fixed order and aggregate a verdict.

    Fail witnesses are decisive against uniform exponential stability;
    passes are supporting evidence.  A successful decay fit coexisting with
    a fail witness is a panel inconsistency and yields ``inconclusive``
    rather than being silently resolved.
    """
    from .gauges import make_gauge
    from .growth import estimate_growth

    if data is None:
        data = ratio_data(system, s_step=config.grid_step)
    int_data = ratio_data(system, integer_only=True)
    gauge = make_gauge(config.gauge)
    env = estimate_growth(system, "uniform", grid_h=config.grid_h, data=None)
    echo = {"gauge": gauge.describe(), "n_cap": config.ncap, "grid_h": config.grid_h}

    def want(cid):
        return selected is None or cid in selected

    reports = []
    fit = fit_exponential_decay(system, data, config.ncap)
    if want("fit-exp"):
        reports.append(_fit_report(fit, data, config.ncap, echo))
    if want("unif-stab"):
        reports.append(test_uniform_stability(system, data, config.ncap, echo))
    if want("minorant"):
        reports.append(test_divergent_minorant(system, data, echo=echo))
    for cid, mode in (("half-decay", "continuous"), ("half-decay-d", "discrete")):
        if want(cid):
            try:
                reports.append(test_half_decay(system, env, mode, config.delta_max, echo))
            except MissingGrowthEnvelope as exc:
                reports.append(
                    CriterionReport(cid, INCONCLUSIVE, {"reason": str(exc)}, config_echo=echo)
                )
    for form, time in (("vector", "continuous"), ("operator", "continuous"), ("vector", "discrete")):
        cid = _DATKO_IDS[(form, time)]
        if want(cid):
            reports.append(test_datko(system, form, time, gauge, config))
    stab = next((r for r in reports if r.criterion_id == "unif-stab"), None)
    if stab is not None and stab.verdict == PASS:
        hypothesis = "uniform-stability"
    elif not env.dubious:
        hypothesis = "uniform-growth"
    else:
        hypothesis = "none"
    for form, time in (
        ("vector-dual", "continuous"),
        ("operator-dual", "continuous"),
        ("operator-dual", "discrete"),
    ):
        cid = _BARBASHIN_IDS[(form, time)]
        if want(cid):
            reports.append(test_barbashin(system, form, time, gauge, config, hypothesis))
    if want("decay-d"):
        try:
            reports.append(test_discrete_decay(system, env, int_data, config.ncap, echo))
        except MissingGrowthEnvelope as exc:
            reports.append(
                CriterionReport("decay-d", INCONCLUSIVE, {"reason": str(exc)}, config_echo=echo)
            )

    by_id = {r.criterion_id: r for r in reports}
    discrepancies = []
    if selected is not None:
        return UniformPanel("inconclusive", reports, env, fit, discrepancies)

    fails = [cid for cid in _UES_CRITERIA if cid in by_id and by_id[cid].verdict == FAIL]
    fit_ok = by_id["fit-exp"].verdict == PASS
    stab_ok = by_id["unif-stab"].verdict == PASS

    if fit_ok and not fails:
        verdict = UES
    elif fit_ok:
        verdict = INCONCLUSIVE_VERDICT
        discrepancies.append(
            "decay fit succeeded but criteria failed with witnesses: " + ", ".join(fails)
        )
    elif fails:
        verdict = US_NOT_UES if stab_ok else UNSTABLE
    elif stab_ok:
        verdict = INCONCLUSIVE_VERDICT
        discrepancies.append("no criterion failed but no decay fit was found")
    else:
        verdict = UNSTABLE
    return UniformPanel(verdict, reports, env, fit, discrepancies)
