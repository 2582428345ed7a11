"""Independent checks that alpha maximizes f(x) = sum 1/x_i over P."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polytope import DEFAULT_GUARD, PointQ, Vertex, enumerate_vertices, epsilon
from .rational import fmt_rational, reciprocal_sum
from .sequence import build_table


def evaluate_f(point: Sequence[Fraction | int]) -> Fraction:
    """Exact sum of reciprocals of the coordinates."""
    total = Fraction(0)
    for k, x in enumerate(point, 1):
        if x == 0:
            raise ValueError(f"coordinate {k} is zero; f is undefined")
        total += 1 / Fraction(x)
    return total


@dataclass(frozen=True)
class BruteForceResult:
    n: int
    alpha: PointQ
    best_vertex: PointQ
    best_value: Fraction
    unique: bool
    vertex_count: int
    all_values: tuple[tuple[PointQ, Fraction], ...] | None = None

    @property
    def alpha_is_unique_max(self) -> bool:
        return self.unique and self.best_vertex == self.alpha

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "best_vertex": [fmt_rational(x) for x in self.best_vertex],
            "best_value": fmt_rational(self.best_value),
            "unique": self.unique,
            "alpha_is_unique_max": self.alpha_is_unique_max,
            "vertex_count": self.vertex_count,
        }
        if self.all_values is not None:
            out["all_values"] = [
                {"vertex": [fmt_rational(x) for x in v], "f": fmt_rational(f)} for v, f in self.all_values
            ]
        return out


def global_max_bruteforce(
    n: int,
    guard: int = DEFAULT_GUARD,
    threads: int = 1,
    keep_values: bool = False,
    vertices: list[Vertex] | None = None,
) -> BruteForceResult:
    """Evaluate f at every vertex of P; ties are exact rational ties."""
    if vertices is None:
        vertices = enumerate_vertices(n, guard=guard, threads=threads)
    values = [(v.point, evaluate_f(v.point)) for v in vertices]
    best_value = max(f for _, f in values)
    winners = [p for p, f in values if f == best_value]
    alpha = tuple(Fraction(a) for a in build_table(n).alpha())
    return BruteForceResult(
        n=n,
        alpha=alpha,
        best_vertex=winners[0],
        best_value=best_value,
        unique=len(winners) == 1,
        vertex_count=len(values),
        all_values=tuple(values) if keep_values else None,
    )


@dataclass(frozen=True)
class ProbeReport:
    n: int
    samples: int
    radius: Fraction
    seed: int
    signed: bool
    grid: int
    accepted: int
    discarded: int
    max_f_observed: Fraction | None
    f_alpha: Fraction

    @property
    def exceeded(self) -> bool:
        return self.max_f_observed is not None and self.max_f_observed > self.f_alpha

    @property
    def discard_rate(self) -> float:
        return self.discarded / self.samples

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "samples": self.samples,
            "radius": fmt_rational(self.radius),
            "seed": self.seed,
            "signed": self.signed,
            "grid": self.grid,
            "accepted": self.accepted,
            "discarded": self.discarded,
            "discard_rate": self.discard_rate,
            "max_f_observed": None if self.max_f_observed is None else fmt_rational(self.max_f_observed),
            "f_alpha": fmt_rational(self.f_alpha),
            "exceeded": self.exceeded,
        }


def local_probe(
    n: int,
    radius: Fraction | int | str,
    samples: int,
    seed: int,
    signed: bool = False,
    grid: int = 1000,
) -> ProbeReport:
    """Sample perturbations of alpha on a rational grid and keep those inside P.

    Each coordinate moves by radius * u / grid with integer u drawn from
    [0, grid] (or [-grid, grid] when ``signed``).  Draws come from
    ``random.Random(seed).random()``, whose output stream CPython keeps fixed.
    """
    radius = Fraction(radius)
    if radius <= 0:
        raise ValueError("radius must be positive")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    alpha = build_table(n).alpha()
    rng = random.Random(seed)
    lo = -grid if signed else 0
    span = grid - lo + 1
    u = np.array(
        [[lo + int(rng.random() * span) for _ in range(n)] for _ in range(samples)],
        dtype=object,
    )
    # scale so that every perturbed coordinate is an integer: X = scale * x
    scale = radius.denominator * grid
    X = scale * np.array(alpha, dtype=object)[None, :] + radius.numerator * u
    ok = np.ones(samples, dtype=bool)
    for i in range(1, n + 1):
        for j in range(1, i + 1):
            lhs = (j + 1) * X[:, j - 1] + X[:, i - 1] if i != j else (j + 2) * X[:, i - 1]
            ok &= (lhs >= scale * ((j + 1) * i + epsilon(i, j))).astype(bool)
    best = None
    for row in X[ok]:
        f = scale * reciprocal_sum([int(v) for v in row])
        if best is None or f > best:
            best = f
    accepted = int(ok.sum())
    return ProbeReport(
        n=n,
        samples=samples,
        radius=radius,
        seed=seed,
        signed=signed,
        grid=grid,
        accepted=accepted,
        discarded=samples - accepted,
        max_f_observed=best,
        f_alpha=evaluate_f(alpha),
    )
