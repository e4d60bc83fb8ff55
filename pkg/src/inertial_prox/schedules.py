"""Closed-form parameter sequences and checks of their admissibility.

A :class:`Schedule` maps an iteration index ``n >= 1`` to a real number.  The
asymptotic hypotheses the convergence theory places on the sequences (limits,
liminf/limsup bounds, divergent series) cannot be checked from finitely many
samples, so :func:`validate_role` decides them per family from the closed
form.  Tabulated schedules are only checked over their horizon and the report
says so.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import InvalidArgument, InvalidSchedule

__all__ = [
    "Schedule",
    "ValidationReport",
    "GibaliRule",
    "parse_schedule",
    "evaluate",
    "validate_role",
    "require_role",
    "gibali_alpha",
    "sample_indices",
    "ROLES",
]

FAMILIES = ("constant", "paper_quintic", "paper_alpha", "harmonic", "scaled",
            "inverse_power", "tabulated")
ROLES = ("theta", "theta_case_I", "theta_case_II", "theta_case_III",
         "alpha", "beta", "tau")


@dataclass(frozen=True)
class Schedule:
    """A parameter sequence indexed from ``n = 1``.

    ``family`` is one of ``constant``, ``paper_quintic`` (0.5 - 1/(n+1)^5),
    ``paper_alpha`` (0.5 - 1/(10n+2)), ``harmonic`` (1/(n+1)), ``scaled``
    (s/(n+1)), ``inverse_power`` (c/n^p) or ``tabulated``.
    """

    family: str
    params: Tuple[float, ...] = ()
    declared_limits: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidArgument(f"unknown schedule family '{self.family}'")
        p = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", p)
        need = {"constant": 1, "paper_quintic": 0, "paper_alpha": 0,
                "harmonic": 0, "scaled": 1, "inverse_power": 2}
        if self.family in need and len(p) != need[self.family]:
            raise InvalidArgument(
                f"family '{self.family}' takes {need[self.family]} parameter(s)")
        if self.family == "tabulated" and not p:
            raise InvalidArgument("tabulated schedule needs at least one value")
        if not all(math.isfinite(v) for v in p):
            raise InvalidArgument("schedule parameters must be finite")
        if self.family == "scaled" and not p[0] > 0:
            raise InvalidArgument("scaled schedule needs s > 0")
        if self.family == "inverse_power" and not (p[0] > 0 and p[1] > 0):
            raise InvalidArgument("inverse_power needs c > 0 and p > 0")

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, c):
        return cls("constant", (c,))

    @classmethod
    def paper_quintic(cls):
        return cls("paper_quintic")

    @classmethod
    def paper_alpha(cls):
        return cls("paper_alpha")

    @classmethod
    def harmonic(cls):
        return cls("harmonic")

    @classmethod
    def scaled(cls, s):
        return cls("scaled", (s,))

    @classmethod
    def inverse_power(cls, p=2.0, c=1.0):
        return cls("inverse_power", (c, p))

    @classmethod
    def tabulated(cls, values, declared_limits=None):
        return cls("tabulated", tuple(values), declared_limits)

    # evaluation ---------------------------------------------------------
    def __call__(self, n: int) -> float:
        if n < 1:
            raise InvalidArgument(f"schedules are indexed from n = 1, got {n}")
        f, p = self.family, self.params
        if f == "constant":
            return p[0]
        if f == "paper_quintic":
            return 0.5 - 1.0 / (n + 1) ** 5
        if f == "paper_alpha":
            return 0.5 - 1.0 / (10 * n + 2)
        if f == "harmonic":
            return 1.0 / (n + 1)
        if f == "scaled":
            return p[0] / (n + 1)
        if f == "inverse_power":
            return p[0] / float(n) ** p[1]
        if n > len(p):
            raise IndexError(f"tabulated schedule has {len(p)} values, asked for n={n}")
        return p[n - 1]

    @property
    def horizon(self) -> Optional[int]:
        return len(self.params) if self.family == "tabulated" else None

    def to_string(self) -> str:
        f, p = self.family, self.params
        if f == "constant":
            return f"const:{p[0]!r}"
        if f in ("paper_quintic", "paper_alpha", "harmonic"):
            return f
        if f == "scaled":
            return f"scaled:{p[0]!r}"
        if f == "inverse_power":
            return f"inverse_power:{p[1]!r}:{p[0]!r}"
        return "table:" + ",".join(repr(v) for v in p)

    def __str__(self):
        return self.to_string()

    # symbolic facts -----------------------------------------------------
    def _facts(self):
        """(inf, inf_attained, sup, sup_attained, limit, series_diverges)."""
        f, p = self.family, self.params
        if f == "constant":
            return p[0], True, p[0], True, p[0], p[0] != 0
        if f == "paper_quintic":
            return 0.5 - 1 / 32, True, 0.5, False, 0.5, True
        if f == "paper_alpha":
            return 0.5 - 1 / 12, True, 0.5, False, 0.5, True
        if f == "harmonic":
            return 0.0, False, 0.5, True, 0.0, True
        if f == "scaled":
            return 0.0, False, p[0] / 2, True, 0.0, True
        if f == "inverse_power":
            return 0.0, False, p[0], True, 0.0, p[1] <= 1
        return min(p), True, max(p), True, None, None


_PAPER_NAMES = {"paper_quintic": "paper_quintic", "theta_paper": "paper_quintic",
                "paper_alpha": "paper_alpha", "alpha_paper": "paper_alpha",
                "harmonic": "harmonic", "beta_harmonic": "harmonic"}


def parse_schedule(text: str) -> Schedule:
    """Parse the string form used in configuration files.

    Accepted forms: ``paper_quintic``, ``paper_alpha``, ``harmonic``,
    ``scaled:S``, ``const:C`` (or a bare number), ``inverse_power:P[:C]`` and
    ``table:v1,v2,...``.
    """
    s = text.strip().strip('"').strip("'").strip()
    if s in _PAPER_NAMES:
        return Schedule(_PAPER_NAMES[s])
    head, _, rest = s.partition(":")
    try:
        if head in ("const", "constant"):
            return Schedule.constant(float(rest))
        if head == "scaled":
            return Schedule.scaled(float(rest))
        if head == "inverse_power":
            parts = rest.split(":")
            c = float(parts[1]) if len(parts) > 1 else 1.0
            return Schedule.inverse_power(float(parts[0]), c)
        if head in ("table", "tabulated"):
            return Schedule.tabulated([float(v) for v in rest.split(",")])
        return Schedule.constant(float(s))
    except ValueError as exc:
        raise InvalidArgument(f"cannot parse schedule '{text}': {exc}") from None


def evaluate(s: Schedule, n: int) -> float:
    return s(n)


def sample_indices(n_max: int = 10**6, dense: int = 1000, per_decade: int = 50):
    """All of ``1..dense`` plus logarithmically spaced indices up to ``n_max``."""
    head = np.arange(1, min(dense, n_max) + 1)
    if n_max <= dense:
        return head
    tail = np.unique(np.logspace(math.log10(dense), math.log10(n_max),
                                 per_decade * 4).astype(np.int64))
    return np.unique(np.concatenate([head, tail, [n_max]]))


@dataclass
class ValidationReport:
    role: str
    valid: bool
    failures: list = field(default_factory=list)
    finite_horizon: bool = False
    # certified lower bound on theta_n (1 - theta_n) over n >= 1 (case I only)
    theta_product_lower_bound: Optional[float] = None

    def __bool__(self):
        return self.valid


def _within(inf, inf_att, sup, sup_att, lo, hi, lo_open=True, hi_open=True):
    """Whether every value lies in the interval (lo, hi) / [lo, hi]."""
    if lo_open:
        ok_lo = inf > lo or (inf == lo and not inf_att)
    else:
        ok_lo = inf >= lo
    if hi_open:
        ok_hi = sup < hi or (sup == hi and not sup_att)
    else:
        ok_hi = sup <= hi
    return ok_lo and ok_hi


def validate_role(s: Schedule, role: str, gamma: float | None = None,
                  eps: float = 0.0) -> ValidationReport:
    """Check ``s`` against the hypotheses attached to ``role``.

    Roles are ``theta`` (values in [0, 1]), ``theta_case_I``,
    ``theta_case_II``, ``theta_case_III``, ``alpha``, ``beta`` and ``tau``
    (values in ``(eps, 2*gamma - eps)``; needs ``gamma``).
    """
    if role not in ROLES:
        raise InvalidArgument(f"unknown role '{role}'")
    inf, inf_att, sup, sup_att, lim, diverges = s._facts()
    tab = s.family == "tabulated"
    rep = ValidationReport(role=role, valid=True, finite_horizon=tab)
    fail = rep.failures.append
    liminf = limsup = lim
    if tab:
        if s.declared_limits is not None:
            liminf, limsup = s.declared_limits
        else:
            # finite horizon: the tail is represented by the table itself
            liminf, limsup = inf, sup

    if role == "theta":
        if not _within(inf, inf_att, sup, sup_att, 0.0, 1.0, False, False):
            fail(f"values must lie in [0, 1]; range is [{inf}, {sup}]")
    elif role == "theta_case_I":
        if not _within(inf, inf_att, sup, sup_att, 0.0, 1.0):
            fail(f"values must lie in (0, 1); range is [{inf}, {sup}]")
        if not (liminf > 0 and limsup < 1):
            fail("liminf theta_n (1 - theta_n) must be positive")
        if not rep.failures:
            # theta (1 - theta) is concave, so its minimum over the range sits
            # at an endpoint
            rep.theta_product_lower_bound = min(inf * (1 - inf), sup * (1 - sup))
    elif role == "theta_case_II":
        if not (inf == 0.0 and sup == 0.0):
            fail("case II needs theta_n = 0 for every n")
    elif role == "theta_case_III":
        if not (inf == 1.0 and sup == 1.0):
            fail("case III needs theta_n = 1 for every n")
    elif role == "alpha":
        if not _within(inf, inf_att, sup, sup_att, 0.0, 1.0):
            fail(f"values must lie in (0, 1); range is [{inf}, {sup}]")
        if not liminf > 0:
            fail("liminf alpha_n must be positive")
        if not limsup < 1:
            fail("limsup alpha_n must be below 1")
    elif role == "beta":
        if not _within(inf, inf_att, sup, sup_att, 0.0, 1.0):
            fail(f"values must lie in (0, 1); range is [{inf}, {sup}]")
        if tab:
            if s.declared_limits is not None and s.declared_limits != (0.0, 0.0):
                fail("beta_n must tend to 0")
        else:
            if lim != 0:
                fail("beta_n must tend to 0")
            if not diverges:
                fail("sum of beta_n must diverge")
    elif role == "tau":
        if gamma is None or not gamma > 0:
            raise InvalidArgument("tau validation needs a positive gamma")
        hi = 2.0 * gamma - eps
        if not _within(inf, inf_att, sup, sup_att, eps, hi):
            fail(f"step sizes must lie in ({eps}, {hi}); range is [{inf}, {sup}]")
    rep.valid = not rep.failures
    return rep


def require_role(s: Schedule, role: str, name: str | None = None, **kw):
    rep = validate_role(s, role, **kw)
    if not rep.valid:
        raise InvalidSchedule(f"{name or role} schedule '{s}': "
                              + "; ".join(rep.failures))
    return rep


@dataclass(frozen=True)
class GibaliRule:
    """Inertial cap ``min(cap, eps_n / ||x_n - x_{n-1}||^2)``.

    ``eps`` must be summable; the default is ``1/n^2``.
    """

    cap: float = 0.5
    eps: Schedule = field(default_factory=lambda: Schedule.inverse_power(2.0))

    def __post_init__(self):
        if not 0.0 <= self.cap < 1.0:
            raise InvalidSchedule(f"inertial cap must lie in [0, 1), got {self.cap}")
        inf, _, _, _, lim, diverges = self.eps._facts()
        if inf < 0:
            raise InvalidSchedule("eps_n must be nonnegative")
        if self.eps.family != "tabulated" and diverges:
            raise InvalidSchedule(f"eps schedule '{self.eps}' is not summable")

    def eps_partial_sum(self, n: int) -> float:
        return float(sum(self.eps(k) for k in range(1, n + 1)))


def gibali_alpha(rule: GibaliRule, n: int, delta_norm_sq: float) -> float:
    if delta_norm_sq > 0:
        return min(rule.cap, rule.eps(n) / delta_norm_sq)
    return rule.cap
