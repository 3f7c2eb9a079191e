"""Named constants and the inequality chain tying them together.

Everything is exact integer arithmetic.  Quantities such as ``2^((R-2)/delta)``
and ``delta * log2(delta)`` are never evaluated in floating point: comparisons
are raised to the ``delta``-th power, and the one derived value that must be an
integer (``R``) is rounded down and then re-validated.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .errors import ParameterError
from .reports import Report


def integer_root(n: int, k: int) -> int:
    """``floor(n ** (1/k))`` for ``n >= 0``."""
    if n < 0 or k < 1:
        raise ValueError("integer_root needs n >= 0 and k >= 1")
    if n < 2 or k == 1:
        return n
    x = 1 << -(-n.bit_length() // k)  # upper bound
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def pow2_at_most(num: int, den: int, value) -> bool:
    """``2^(num/den) <= value`` exactly (``value`` may be ``inf``)."""
    if value == float("inf"):
        return True
    value = int(value)
    if value <= 0:
        return False
    if num < 0:
        return 2 ** (-num) * value ** den >= 1
    return 2 ** num <= value ** den


def pow2_greater(num: int, den: int, value) -> bool:
    """``2^(num/den) > value`` exactly."""
    return not pow2_at_most(num, den, value)


def floor_pow2(num: int, den: int) -> int:
    """``floor(2^(num/den))`` for ``num >= 0``."""
    return integer_root(2 ** num, den)


def floor_log2_pow(delta: int) -> int:
    """``floor(delta * log2(delta))`` via the bit length of ``delta^delta``."""
    return (delta ** delta).bit_length() - 1


def exact_log_term(delta: int) -> bool:
    return delta & (delta - 1) == 0


def spin_angle_bound(R: int, delta: int) -> int:
    """``floor(2^((R-2)/delta)) - 4 - 6 delta``."""
    return floor_pow2(R - 2, delta) - 4 - 6 * delta


def spinning_constant(R: int, delta: int) -> int:
    """``floor(2^((R-2)/delta)) - 4 - 248 delta``."""
    return floor_pow2(R - 2, delta) - 4 - 248 * delta


def rho_bound_holds(rho: int, delta: int) -> bool:
    """``rho >= 2 delta log2(delta) + 38 delta`` exactly."""
    slack = rho - 38 * delta
    if slack < 0:
        return False
    # 2 delta log2 delta <= slack  <=>  delta^(2 delta) <= 2^slack
    return delta ** (2 * delta) <= 2 ** slack


def min_rho(delta: int) -> int:
    rho = 38 * delta
    while not rho_bound_holds(rho, delta):
        rho += 1
    return rho


@dataclass
class ParameterSet:
    delta_op: int
    rho: int
    R: int
    theta: int
    K: int
    L: int
    M: int
    C: int
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Inequality:
    name: str
    lhs: object
    relation: str
    rhs: object
    holds: bool
    required: bool = True

    def line(self) -> str:
        mark = "ok  " if self.holds else ("FAIL" if self.required else "no  ")
        return f"{mark} {self.name}: {self.lhs} {self.relation} {self.rhs}"


def inequality_ledger(p: ParameterSet) -> list:
    d = p.delta_op
    four_m_k = 4 * p.M + p.K
    out = [
        Inequality("2 + 2 delta <= R", 2 + 2 * d, "<=", p.R, 2 + 2 * d <= p.R),
        Inequality("R <= rho/2 - 3 delta", 2 * p.R, "<= (rho - 6 delta) =", p.rho - 6 * d,
                   2 * p.R <= p.rho - 6 * d),
        Inequality("rho >= 2 delta log2(delta) + 38 delta", p.rho, ">=", f"min integer {min_rho(d)}",
                   rho_bound_holds(p.rho, d)),
        Inequality("theta >= 121 delta", p.theta, ">=", 121 * d, p.theta >= 121 * d),
        Inequality("K >= 3 theta", p.K, ">=", 3 * p.theta, p.K >= 3 * p.theta),
        Inequality("M = 8K + 2 theta", p.M, "==", 8 * p.K + 2 * p.theta, p.M == 8 * p.K + 2 * p.theta),
        Inequality("L = 2^((R-2)/delta) - 4 - 248 delta", p.L, "==", spinning_constant(p.R, d),
                   p.L == spinning_constant(p.R, d)),
        Inequality("L > 4M + K", p.L, ">", four_m_k,
                   pow2_greater(p.R - 2, d, four_m_k + 4 + 248 * d) and p.L > four_m_k),
        Inequality("2^((R-2)/delta) > 13195 delta + 4", f"2^({p.R - 2}/{d})", ">", 13195 * d + 4,
                   pow2_greater(p.R - 2, d, 13195 * d + 4)),
        Inequality("2^(R/delta) > 4 (13199 delta)", f"2^({p.R}/{d}) = {_pow2_text(p.R, d)}", ">",
                   4 * 13199 * d, pow2_greater(p.R, d, 4 * 13199 * d), required=False),
        Inequality("C > 4M + K", p.C, ">", four_m_k, p.C > four_m_k),
    ]
    return out


def _pow2_text(num: int, den: int) -> str:
    if num % den == 0:
        return str(2 ** (num // den))
    return f"~{floor_pow2(num, den)}"


def derive_parameters(delta_op: int, rho: int) -> ParameterSet:
    """The full parameter set for a ``rho``-separated family at hyperbolicity ``delta_op``."""
    if delta_op < 1:
        raise ParameterError("delta_op must be >= 1", [{"inequality": "delta >= 1", "delta": delta_op}])
    if not rho_bound_holds(rho, delta_op):
        raise ParameterError(
            f"rho = {rho} is below the bound 2 delta log2(delta) + 38 delta "
            f"(smallest admissible integer: {min_rho(delta_op)})",
            [{"inequality": "rho >= 2 delta log2(delta) + 38 delta", "rho": rho,
              "min_rho": min_rho(delta_op)}],
        )
    d = delta_op
    notes = []
    R = floor_log2_pow(d) + 16 * d
    if not exact_log_term(d):
        notes.append(f"delta*log2(delta) rounded down to {floor_log2_pow(d)}; inequalities re-validated")
    theta = 121 * d
    K = 3 * theta
    M = 8 * K + 2 * theta
    L = spinning_constant(R, d)
    C = 4 * M + K + 1
    p = ParameterSet(d, rho, R, theta, K, L, M, C, notes)
    failures = [q for q in inequality_ledger(p) if q.required and not q.holds]
    if failures:
        raise ParameterError("derived parameters violate: " + "; ".join(q.name for q in failures),
                             [asdict(q) for q in failures])
    return p


def validate_parameters(p: ParameterSet) -> Report:
    rep = Report("parameter set", stats={k: v for k, v in p.to_dict().items() if k != "notes"})
    for q in inequality_ledger(p):
        if q.required and not q.holds:
            rep.fail(asdict(q))
        elif not q.holds:
            rep.notes.append(f"sufficient check not met (not required): {q.name}")
    rep.notes.extend(p.notes)
    return rep.finish()
