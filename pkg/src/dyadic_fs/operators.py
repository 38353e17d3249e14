"""Dyadic fractional maximal operator on the truncated lattice."""

from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .grid import DyadicCube, GridFunction, GridSpec, upsample


def check_alpha(alpha: float, n: int) -> float:
    alpha = float(alpha)
    if not (0.0 <= alpha < n):
        raise ParameterError(f"alpha must satisfy 0 <= alpha < n={n}, got {alpha}")
    return alpha


def side_power(level: int, alpha: float) -> float:
    """l(Q)^alpha for a cube at ``level``, as exp2(-level*alpha)."""
    return float(np.exp2(-level * alpha))


def scaled_averages(f: GridFunction, alpha: float) -> list[np.ndarray]:
    """Per level k, the n-d array of average(f, Q) * l(Q)^alpha."""
    return [f.level_averages(k) * side_power(k, alpha) for k in range(f.spec.L + 1)]


def fractional_maximal(f: GridFunction, alpha: float = 0.0) -> GridFunction:
    """M_alpha f: cellwise max of average(f,Q) l(Q)^alpha over cubes Q containing the cell.

    One top-down sweep carrying the running maximum, O(N L).
    """
    check_alpha(alpha, f.spec.n)
    vals = scaled_averages(f, alpha)
    run = vals[0]
    for k in range(1, f.spec.L + 1):
        run = np.maximum(upsample(run), vals[k])
    return GridFunction.from_array(f.spec, run)


def shell_coefficients(Q: DyadicCube, alpha: float) -> list[float]:
    """a_j = |Q|/|pi^j(Q)| * l(pi^j(Q))^alpha for j = 0..level(Q).

    Equal to l(Q)^alpha * 2^((alpha-n) j); evaluated through the first form so
    the numbers agree bit for bit with the operator sweep.
    """
    n, k = Q.n, Q.level
    return [float(np.ldexp(side_power(k - j, alpha), -n * j)) for j in range(k + 1)]


def maximal_on_indicator_closed_form(Q: DyadicCube, alpha: float, spec: GridSpec) -> GridFunction:
    """M_alpha[1_Q] from its shell decomposition a_0 1_Q + sum_j a_j 1_{pi^j Q \\ pi^{j-1} Q}."""
    spec.validate(Q)
    check_alpha(alpha, spec.n)
    a = shell_coefficients(Q, alpha)
    out = np.empty(spec.shape)
    for j in range(Q.level, -1, -1):
        out[Q.ancestor(Q.level - j).slices(spec)] = a[j]
    return GridFunction.from_array(spec, out)
