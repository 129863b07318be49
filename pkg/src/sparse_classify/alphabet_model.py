"""Distributions over a finite alphabet ``[m]`` and the two-source model class.

Symbols are 0-based indices ``0 .. m-1`` throughout the package.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

SUM_TOL = 1e-12


@dataclass(frozen=True)
class Distribution:
    """Probability vector over ``m`` symbols.

    ``probs`` is stored as a read-only float64 array.  ``name`` is free-form
    metadata (``"uniform"``, ``"bi_uniform(eps=0.5)"``...) used in reports.
    """

    probs: np.ndarray
    name: str = ""

    def __post_init__(self):
        p = np.array(self.probs, dtype=np.float64).ravel()
        if p.size == 0:
            raise ValueError("distribution needs at least one symbol")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise ValueError("probabilities must be finite and nonnegative")
        total = float(np.sum(p))  # pairwise summation
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1 (tol {SUM_TOL})")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def m(self) -> int:
        return self.probs.size

    def __len__(self):
        return self.m

    def max_prob(self) -> float:
        return float(self.probs.max())

    def to_text(self) -> str:
        return f"{self.m}\n" + " ".join(repr(float(x)) for x in self.probs) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "") -> "Distribution":
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if len(lines) < 2:
            raise ValueError("distribution text needs a size line and a probability line")
        try:
            m = int(lines[0])
        except ValueError:
            raise ValueError(f"first line must be the alphabet size, got {lines[0]!r}") from None
        probs = np.array(" ".join(lines[1:]).split(), dtype=np.float64)
        if probs.size != m:
            raise ValueError(f"declared m={m} but read {probs.size} probabilities")
        return cls(probs, name=name)


def read_distribution(path: str | os.PathLike) -> Distribution:
    with open(path) as fh:
        return Distribution.from_text(fh.read(), name=os.path.basename(str(path)))


def write_distribution(dist: Distribution, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(dist.to_text())


@dataclass(frozen=True)
class ModelClassParams:
    """Separation ``epsilon`` and rarity constant ``c_bar`` of the model class."""

    epsilon: float
    c_bar: float
    m: int

    def __post_init__(self):
        if not 0 < self.epsilon <= 2:
            raise ValueError(f"epsilon must lie in (0, 2], got {self.epsilon}")
        if self.c_bar < 1:
            raise ValueError(f"c_bar must be >= 1, got {self.c_bar}")
        if self.m < 1:
            raise ValueError(f"m must be positive, got {self.m}")


@dataclass(frozen=True)
class BiUniformSpec:
    """Half-heavy / half-light distribution parameters.

    ``omega`` holds the m/2 heavy symbols; ``None`` selects the canonical
    set ``{0, ..., m/2 - 1}``.
    """

    m: int
    epsilon: float
    omega: frozenset | None = field(default=None)

    def __post_init__(self):
        if self.m < 2 or self.m % 2:
            raise ValueError(f"bi-uniform distributions need an even alphabet size m, got m={self.m}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        omega = frozenset(range(self.m // 2)) if self.omega is None else frozenset(int(j) for j in self.omega)
        if len(omega) != self.m // 2:
            raise ValueError(f"omega must contain exactly m/2={self.m // 2} symbols, got {len(omega)}")
        if min(omega) < 0 or max(omega) >= self.m:
            raise ValueError("omega must be a subset of the alphabet 0..m-1")
        object.__setattr__(self, "omega", omega)


def uniform(m: int) -> Distribution:
    if m < 1:
        raise ValueError(f"alphabet size must be positive, got {m}")
    return Distribution(np.full(m, 1.0 / m), name="uniform")


def bi_uniform(spec: BiUniformSpec | int, epsilon: float | None = None, omega=None) -> Distribution:
    """``(1+eps)/m`` on ``omega``, ``(1-eps)/m`` elsewhere.

    Accepts either a :class:`BiUniformSpec` or ``(m, epsilon[, omega])``.
    """
    if not isinstance(spec, BiUniformSpec):
        spec = BiUniformSpec(int(spec), float(epsilon), omega)
    m, eps = spec.m, spec.epsilon
    probs = np.full(m, (1.0 - eps) / m)
    probs[sorted(spec.omega)] = (1.0 + eps) / m
    return Distribution(probs, name=f"bi_uniform(eps={eps:g})")


def l1_distance(p: Distribution, q: Distribution) -> float:
    if p.m != q.m:
        raise ValueError(f"alphabet sizes differ: {p.m} vs {q.m}")
    return float(np.sum(np.abs(p.probs - q.probs)))


@dataclass
class MembershipReport:
    ok: bool
    violations: list[str]
    l1: float
    max_pi: float
    max_mu: float

    def __bool__(self):
        return self.ok


def check_class_membership(pi: Distribution, mu: Distribution, params: ModelClassParams) -> MembershipReport:
    """Test ``||mu - pi||_1 >= eps`` and ``max_j p_j <= c_bar/m`` for both sources."""
    if pi.m != mu.m:
        raise ValueError(f"alphabet sizes differ: {pi.m} vs {mu.m}")
    m = pi.m
    cap = params.c_bar / m
    dist = l1_distance(pi, mu)
    violations = []
    # slack absorbs rounding in the constructed distributions
    if dist < params.epsilon - SUM_TOL:
        violations.append(f"l1 separation: ||mu - pi||_1 = {dist:.6g} < epsilon = {params.epsilon:g}")
    for label, d in (("pi", pi), ("mu", mu)):
        top = d.max_prob()
        if top > cap * (1 + SUM_TOL):
            j = int(np.argmax(d.probs))
            violations.append(f"rarity bound on {label}: {label}[{j}] = {top:.6g} > c_bar/m = {cap:.6g}")
    return MembershipReport(not violations, violations, dist, pi.max_prob(), mu.max_prob())
