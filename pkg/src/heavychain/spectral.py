"""Eigenvalue reports and resolvent-norm sweeps for the discrete generator.

All norms here are taken in the energy inner product: with the Cholesky
factor M_H = C^T C the similarity C A C^{-1} turns the weighted operator
norm of the resolvent into an ordinary smallest-singular-value problem,

    |(i tau - A)^{-1}|_H = 1 / sigma_min(C (i tau I - A) C^{-1}).

A finite sweep cannot certify a supremum over the whole axis, so the
verdict helper only ever reports "consistent-with-exponential-stability"
or "inconclusive".
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve, solve_triangular, svdvals

from heavychain.discretization import GeneratorSystem

__all__ = [
    "VERDICT_CONSISTENT",
    "VERDICT_INCONCLUSIVE",
    "SpectrumReport",
    "ResolventSample",
    "HuangReport",
    "spectrum",
    "spectrum_of_matrix",
    "resolvent_norm_discrete",
    "resolvent_sweep",
    "resolvent_apply_discrete",
    "huang_verdict",
]

VERDICT_CONSISTENT = "consistent-with-exponential-stability"
VERDICT_INCONCLUSIVE = "inconclusive"

# a log-log slope of the last sweep decade at or below this counts as flat
TAIL_SLOPE_TOLERANCE = 0.05


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    abscissa: float
    rightmost: np.ndarray  # eigenvalue(s) attaining the abscissa

    @classmethod
    def from_eigenvalues(cls, lam: np.ndarray) -> "SpectrumReport":
        lam = np.asarray(lam, dtype=complex)
        abscissa = float(lam.real.max())
        attain = lam[np.abs(lam.real - abscissa) <= 1e-12 * max(1.0, abs(abscissa))]
        return cls(eigenvalues=lam, abscissa=abscissa, rightmost=attain)

    @property
    def stable(self) -> bool:
        return self.abscissa < 0.0


def spectrum_of_matrix(a: np.ndarray) -> SpectrumReport:
    try:
        lam = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise RuntimeError("dense eigensolver failed: %s" % exc) from exc
    return SpectrumReport.from_eigenvalues(lam)


def spectrum(sys: GeneratorSystem) -> SpectrumReport:
    """Dense spectrum of the semi-discrete generator."""
    return spectrum_of_matrix(sys.A)


@dataclass(frozen=True)
class ResolventSample:
    tau: float
    norm: float
    source: str  # "discrete" or "continuous"


def _similarity(sys: GeneratorSystem) -> np.ndarray:
    c = sys.chol_H
    # C A C^{-1} via one triangular solve on the right
    return solve_triangular(c.T, (c @ sys.A).T, lower=True).T


def resolvent_norm_discrete(sys: GeneratorSystem, tau: float,
                            similarity: np.ndarray | None = None) -> ResolventSample:
    """Weighted resolvent norm at i*tau via the Cholesky similarity."""
    a_sim = _similarity(sys) if similarity is None else similarity
    shifted = 1j * tau * np.eye(a_sim.shape[0]) - a_sim
    smin = svdvals(shifted)[-1]
    norm = float(1.0 / smin) if smin > 0.0 else float("inf")
    return ResolventSample(tau=float(tau), norm=norm, source="discrete")


def resolvent_sweep(sys: GeneratorSystem, tau_min: float = 0.1,
                    tau_max: float = 1e3, points: int = 200) -> list[ResolventSample]:
    """Log-spaced sweep of the weighted resolvent norm along i*tau."""
    if not (0 < tau_min < tau_max):
        raise ValueError("need 0 < tau_min < tau_max")
    a_sim = _similarity(sys)
    taus = np.geomspace(tau_min, tau_max, points)
    return [resolvent_norm_discrete(sys, t, similarity=a_sim) for t in taus]


def resolvent_apply_discrete(sys: GeneratorSystem, tau: float,
                             rhs: np.ndarray) -> np.ndarray:
    """Solve (i*tau*I - A_h) z = rhs; the discrete side of cross checks."""
    n = sys.grid.size
    lu = lu_factor(1j * tau * np.eye(n) - sys.A)
    return lu_solve(lu, np.asarray(rhs, dtype=complex))


@dataclass(frozen=True)
class HuangReport:
    verdict: str
    abscissa: float
    max_norm: float
    tau_at_max: float
    tail_slope: float
    reasons: tuple[str, ...] = field(default_factory=tuple)


def huang_verdict(samples: list[ResolventSample], report: SpectrumReport) -> HuangReport:
    """Shape test of a sweep against the uniform-boundedness criterion.

    Consistency requires a negative abscissa, the sampled maximum attained
    strictly inside the sweep range, and a flat-or-decreasing final decade
    of the norm curve.  Anything else is inconclusive; a finite sweep can
    never prove the supremum bound, so no stronger wording is offered.
    """
    if not samples:
        raise ValueError("empty sweep")
    taus = np.array([s.tau for s in samples])
    norms = np.array([s.norm for s in samples])
    order = np.argsort(taus)
    taus, norms = taus[order], norms[order]

    reasons = []
    if not np.all(np.isfinite(norms)):
        reasons.append("non-finite resolvent sample")
    if report.abscissa >= 0.0:
        reasons.append("abscissa is not negative")
    k = int(np.argmax(norms))
    if k in (0, len(norms) - 1):
        reasons.append("sampled maximum sits on the sweep boundary")
    tail = taus >= taus[-1] / 10.0
    if np.count_nonzero(tail) >= 2 and np.all(norms[tail] > 0):
        slope = np.polyfit(np.log(taus[tail]), np.log(norms[tail]), 1)[0]
    else:
        slope = float("nan")
        reasons.append("tail decade has too few usable samples")
    if np.isfinite(slope) and slope > TAIL_SLOPE_TOLERANCE:
        reasons.append("resolvent norm still grows in the last decade")

    return HuangReport(
        verdict=VERDICT_INCONCLUSIVE if reasons else VERDICT_CONSISTENT,
        abscissa=report.abscissa,
        max_norm=float(norms[k]),
        tau_at_max=float(taus[k]),
        tail_slope=float(slope) if np.isfinite(slope) else float("nan"),
        reasons=tuple(reasons),
    )
