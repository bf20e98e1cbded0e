"""
Per-dimension attention functions k(d) and the Gaussian/Laplacian crossing.
"""

import math
from typing import Iterable, Tuple, Union

import numpy as np
import pandas as pd

from ecoattn.attention.schemas import ScoreKind, parse_kind
from ecoattn.exceptions import ParameterError

# L1 lambda that held up across every benchmark task in grid searches
ROBUST_L1_LAMBDA = 3.0

Number = Union[float, np.ndarray]


def _check_dk(d_k: int) -> None:
    if d_k < 1:
        raise ParameterError(f"d_k must be >= 1, got {d_k}")


def kernel_weight(kind, lam: float, d_k: int, d: Number) -> Number:
    """Weight contributed by one feature whose query and key differ by ``d``.

    Dot-product and squared-L2 kinds share the Gaussian exp(-d^2 / (2 sqrt(Dk)));
    L1 and Lp use the Laplacian exp(-lam |d| / sqrt(Dk)).
    """
    kind = parse_kind(kind)
    _check_dk(d_k)
    d = np.asarray(d, dtype=np.float64)
    root = math.sqrt(d_k)

    if kind in (ScoreKind.DOT_PRODUCT, ScoreKind.SQUARED_L2):
        weight = np.exp(-d * d / (2.0 * root))
    else:
        # one feature: the Lp distance is |d| for every p
        weight = np.exp(-lam * np.abs(d) / root)

    return float(weight) if weight.ndim == 0 else weight


def squared_l2_weight(lam: float, d_k: int, d: Number) -> Number:
    """Per-feature weight of squared-L2 scores at bandwidth ``lam``: exp(-lam d^2 / sqrt(Dk)).

    Equals the Gaussian kernel at ``lam = 0.5``.
    """
    _check_dk(d_k)
    if not lam >= 0:
        raise ParameterError(f"lambda must be >= 0, got {lam}")
    d = np.asarray(d, dtype=np.float64)
    weight = np.exp(-lam * d * d / math.sqrt(d_k))
    return float(weight) if weight.ndim == 0 else weight


def kernel_crossing_lambda(d_k: int) -> float:
    """lambda at which the Laplacian meets the Gaussian at its inflection point."""
    _check_dk(d_k)
    return 0.5 * d_k ** 0.25


def kernel_crossing_point(d_k: int) -> Tuple[float, float]:
    """``(lambda*, d*)`` with ``d* = Dk^(1/4)``."""
    return kernel_crossing_lambda(d_k), float(d_k ** 0.25)


def gaussian_second_derivative(d_k: int, d: float, h: float = 1e-4) -> float:
    """Central second difference of the Gaussian kernel at ``d``."""
    left, centre, right = (
        kernel_weight(ScoreKind.DOT_PRODUCT, 0.0, d_k, x) for x in (d - h, d, d + h)
    )
    return (left - 2.0 * centre + right) / (h * h)


def gaussian_inflection_check(d_k: int, offset: float = 0.05) -> Tuple[float, float]:
    """Second differences just below and just above ``d* = Dk^(1/4)``."""
    _, d_star = kernel_crossing_point(d_k)
    h = 1e-4 * d_star
    below = gaussian_second_derivative(d_k, d_star * (1.0 - offset), h)
    above = gaussian_second_derivative(d_k, d_star * (1.0 + offset), h)
    return below, above


def lambda_column(lam: float) -> str:
    return f"laplacian_lambda_{lam:g}"


def kernel_curves(d_k: int, lambdas: Iterable[float], d_max: float, steps: int) -> pd.DataFrame:
    """Gaussian and Laplacian weights on ``steps`` evenly spaced points of [0, d_max]."""
    _check_dk(d_k)
    if steps < 2:
        raise ParameterError(f"steps must be >= 2, got {steps}")
    if not d_max > 0:
        raise ParameterError(f"d_max must be positive, got {d_max}")

    d = np.linspace(0.0, d_max, steps)
    frame = pd.DataFrame({
        "d": d,
        "gaussian": kernel_weight(ScoreKind.DOT_PRODUCT, 0.0, d_k, d),
    })
    for lam in lambdas:
        if lam < 0:
            raise ParameterError(f"lambda must be >= 0, got {lam}")
        frame[lambda_column(lam)] = kernel_weight(ScoreKind.L1, lam, d_k, d)
    return frame
