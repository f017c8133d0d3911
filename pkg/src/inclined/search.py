"""Certified inclined-vector search and sphere-capacity arithmetic.

Given a family of directions in C^d, an inclined vector is a unit vector
whose normalized inner product against every family member stays below a
target c.  Existence is a volume-counting fact once the family is smaller
than an exponential capacity in d; this module supplies the constructive
side: a multi-start projected-subgradient search whose output is wrapped in
a self-contained certificate that anyone can re-verify from the inputs
alone, independent of how the candidate was found.

The capacity arithmetic (powers of 100/91, the d >= 2^7 threshold) is done
in exact rational arithmetic and only rounded toward zero at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .hilbert import as_vector
from .serialize import digest_vectors

# A certificate must clear its bound by this margin, so that independent
# re-verification in double precision cannot flip the verdict.
CERT_MARGIN = 1e-9

# Step sizes tried per descent step; 1.0 annihilates the active constraint.
_STEP_SCHEDULE = (1.0, 0.5, 0.25, 0.125, 0.0625)

CAPACITY_BASE = Fraction(100, 91)
MIN_CAPACITY_DIMENSION = 2 ** 7


class BudgetExhausted(RuntimeError):
    """Search budget ran out before the target was met.

    Explicitly NOT a disproof of existence: it reports the best value seen.
    """

    def __init__(self, message: str, best_achieved: float, best_candidate: np.ndarray,
                 iterations_used: int, level: int | None = None):
        super().__init__(message)
        self.best_achieved = best_achieved
        self.best_candidate = best_candidate
        self.iterations_used = iterations_used
        self.level = level


@dataclass(frozen=True)
class InclinationCertificate:
    """A candidate unit vector plus its verified worst normalized inner product."""

    dimension: int
    family_digest: str
    candidate: np.ndarray
    achieved: float
    bound: float
    seed: int
    iterations_used: int

    def __post_init__(self):
        if self.achieved > self.bound:
            raise ValueError(f"achieved {self.achieved} exceeds bound {self.bound}")
        if abs(np.linalg.norm(self.candidate) - 1.0) > 1e-12:
            raise ValueError("certificate candidate is not a unit vector")


@dataclass(frozen=True)
class CapacityReport:
    """Exponential capacities governing how many directions can be avoided."""

    d: int
    net_lower_bound: float
    inclined_capacity: float
    net_lower_bound_exact: Fraction
    inclined_capacity_exact: Fraction


def realify(x) -> np.ndarray:
    """C^d -> R^(2d), x_k = z_{2k} + i z_{2k+1}.  Norm-preserving."""
    xv = as_vector(x)
    out = np.empty(2 * xv.size, dtype=np.float64)
    out[0::2] = xv.real
    out[1::2] = xv.imag
    return out


def complexify(z) -> np.ndarray:
    """Inverse of realify."""
    zv = np.asarray(z, dtype=np.float64)
    if zv.ndim != 1 or zv.size % 2 != 0 or zv.size == 0:
        raise ValueError(f"expected an even-length 1-D real vector, got shape {zv.shape}")
    return zv[0::2] + 1j * zv[1::2]


def four_copies(x) -> list[np.ndarray]:
    """Realifications of x, -x, ix, -ix; all four share the norm of x."""
    xv = as_vector(x)
    return [realify(xv), realify(-xv), realify(1j * xv), realify(-1j * xv)]


def inclination_bound(eps: float) -> float:
    """Upper bound sqrt(2) * (1 - eps^2 / 2) on |<x, y>| for unit vectors
    whose four distances ||x +- y||, ||x +- iy|| are all at least eps.

    Monotone decreasing on [0, sqrt(2)], from sqrt(2) down to 0.
    """
    if not 0.0 <= eps <= math.sqrt(2.0) + 1e-15:
        raise ValueError(f"eps must lie in [0, sqrt(2)], got {eps}")
    return math.sqrt(2.0) * (1.0 - eps * eps / 2.0)


def _float_lower(frac: Fraction) -> float:
    """Largest double <= frac (float() rounds to nearest, possibly up)."""
    f = float(frac)
    while Fraction(f) > frac:
        f = math.nextafter(f, -math.inf)
    return f


def capacity(d: int) -> CapacityReport:
    """Net-size lower bound (100/91)^d / 2 and inclined capacity (100/91)^d / 8.

    Evaluated exactly; the float fields are guaranteed lower bounds (rounded
    toward zero).  The inclined capacity is exactly a quarter of the net
    bound.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    power = CAPACITY_BASE ** d
    net = power / 2
    inclined = power / 8
    return CapacityReport(
        d=d,
        net_lower_bound=_float_lower(net),
        inclined_capacity=_float_lower(inclined),
        net_lower_bound_exact=net,
        inclined_capacity_exact=inclined,
    )


def _group_scores(rows: np.ndarray, group_ids: np.ndarray, n_groups: int, v: np.ndarray) -> np.ndarray:
    """Per-group energies q_k(v) = sum_{j in group k} |inner(v, rows_j)|^2."""
    s = rows @ v.conj()
    return np.bincount(group_ids, weights=np.abs(s) ** 2, minlength=n_groups)


def minimize_max_group_norm(rows: np.ndarray, group_ids: np.ndarray, n_groups: int,
                            dim: int, target: float, budget: int, seed: int,
                            ) -> tuple[np.ndarray, float, int, bool]:
    """Search for a unit v with max_k sqrt(q_k(v)) <= target.

    Multi-start random sampling on the unit sphere refined by projected
    subgradient descent on the active group: step along -M_k v (M_k the
    group's Gram operator), renormalize, accept the first strictly improving
    step size.  Restarts are evaluated in order, and the first one reaching
    the target wins, so the output is deterministic given the seed even if
    restarts were to run in parallel.

    Returns (candidate, achieved, evaluations_used, success).  ``budget``
    caps the number of objective evaluations.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    rng = np.random.default_rng(seed)
    if rows.shape[0] == 0:
        # No constraints: any unit vector qualifies; pick a deterministic one.
        v = np.zeros(dim, dtype=np.complex128)
        v[0] = 1.0
        return v, 0.0, 0, True

    def evaluate(v: np.ndarray) -> tuple[float, np.ndarray]:
        q = _group_scores(rows, group_ids, n_groups, v)
        return float(np.sqrt(q.max())), q

    evals = 0
    best_f = math.inf
    best_v = None
    while evals < budget:
        z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        v = z / np.linalg.norm(z)
        f, q = evaluate(v)
        evals += 1
        while f > target and evals < budget:
            k = int(np.argmax(q))
            members = group_ids == k
            s = rows[members].conj() @ v  # inner(v, r_j) per member
            grad = rows[members].T @ s  # sum_j inner(v, r_j) r_j = M_k v
            improved = False
            for eta in _STEP_SCHEDULE:
                if evals >= budget:
                    break
                w = v - eta * grad
                wn = np.linalg.norm(w)
                if wn == 0.0:
                    continue
                w /= wn
                fw, qw = evaluate(w)
                evals += 1
                if fw < f:
                    v, f, q = w, fw, qw
                    improved = True
                    break
            if not improved:
                break  # local minimax point for this restart
        if f < best_f:
            best_f, best_v = f, v
        if f <= target:
            return v, f, evals, True
    return best_v, best_f, evals, False


def _clean_family(vectors) -> tuple[list[np.ndarray], int]:
    vs = [as_vector(v) for v in vectors]
    if not vs:
        raise ValueError("vector family is empty")
    d = vs[0].size
    for v in vs[1:]:
        if v.size != d:
            raise ValueError(f"dimension mismatch in family: {v.size} != {d}")
    return vs, d


def recompute_achieved(candidate, vectors) -> float:
    """max_j |inner(candidate, x_j)| / ||x_j|| over the nonzero family members."""
    vs, d = _clean_family(vectors)
    cand = as_vector(candidate, dim=d)
    worst = 0.0
    for v in vs:
        nv = np.linalg.norm(v)
        if nv == 0.0:
            continue  # zero vectors impose no constraint
        worst = max(worst, abs(np.vdot(v, cand)) / nv)
    return worst


def find_inclined_vector(vectors, c: float, budget: int, seed: int) -> InclinationCertificate:
    """Search for a unit vector inclined against the whole family.

    On success the certificate's ``achieved`` is recomputed in a single full
    pass over the raw inputs and satisfies achieved <= c - 1e-9, so the
    margin absorbs any re-verification rounding.  Raises BudgetExhausted
    with the best value seen otherwise.
    """
    if not 0.0 < c < 1.0:
        raise ValueError(f"bound c must lie in (0, 1), got {c}")
    vs, d = _clean_family(vectors)
    digest = digest_vectors(vs)
    nonzero = [v for v in vs if np.linalg.norm(v) > 0.0]
    if nonzero:
        rows = np.stack([v / np.linalg.norm(v) for v in nonzero])
    else:
        rows = np.zeros((0, d), dtype=np.complex128)
    group_ids = np.arange(rows.shape[0])
    target = c - CERT_MARGIN
    cand, achieved, evals, ok = minimize_max_group_norm(
        rows, group_ids, rows.shape[0], d, target, budget, seed)
    achieved = recompute_achieved(cand, vs)
    if not ok or achieved > target:
        raise BudgetExhausted(
            f"no inclined vector found within budget {budget}: best achieved {achieved:.6g} > {c}",
            best_achieved=achieved, best_candidate=cand, iterations_used=evals)
    return InclinationCertificate(
        dimension=d, family_digest=digest, candidate=cand,
        achieved=achieved, bound=c, seed=seed, iterations_used=evals)


def verify_inclination(cert: InclinationCertificate, vectors) -> float:
    """Re-verify a certificate against the family it claims to cover.

    Recomputes the family digest and the achieved value from scratch;
    raises ValueError on digest mismatch, on disagreement with the stored
    achieved beyond 1e-10, or if the bound is violated.
    """
    vs, _ = _clean_family(vectors)
    digest = digest_vectors(vs)
    if digest != cert.family_digest:
        raise ValueError("family digest mismatch: certificate does not belong to these vectors")
    achieved = recompute_achieved(cert.candidate, vs)
    if abs(achieved - cert.achieved) > 1e-10:
        raise ValueError(f"stored achieved {cert.achieved} differs from recomputed {achieved}")
    if achieved > cert.bound:
        raise ValueError(f"recomputed achieved {achieved} exceeds bound {cert.bound}")
    return achieved


def cover_witness(points, radius: float, trials: int, seed: int) -> np.ndarray | None:
    """Search for a unit vector farther than ``radius`` from every point.

    Complex points are realified first (a norm-preserving identification).
    Returns the first witness in trial order, re-verified by direct distance
    computation, or None if the budget runs out (which is NOT a covering
    proof).
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    pts = [np.asarray(p) for p in points]
    if not pts:
        raise ValueError("points must be nonempty")
    if any(np.iscomplexobj(p) for p in pts):
        pts = [realify(p) for p in pts]
    mat = np.stack([np.asarray(p, dtype=np.float64) for p in pts])
    if mat.ndim != 2:
        raise ValueError("points must be 1-D vectors of a common dimension")
    dim = mat.shape[1]
    rng = np.random.default_rng(seed)
    pts_sq = (mat ** 2).sum(axis=1)
    batch = 1024
    done = 0
    while done < trials:
        take = min(batch, trials - done)
        ys = rng.standard_normal((take, dim))
        ys /= np.linalg.norm(ys, axis=1, keepdims=True)
        # ||y - p||^2 = 1 - 2 y.p + ||p||^2 for unit y
        dist_sq = 1.0 - 2.0 * (ys @ mat.T) + pts_sq[None, :]
        min_dist = np.sqrt(np.maximum(dist_sq.min(axis=1), 0.0))
        hits = np.nonzero(min_dist > radius)[0]
        for i in hits:
            y = ys[i]
            if min(np.linalg.norm(y - p) for p in mat) > radius:  # re-verify directly
                return y
        done += take
    return None
