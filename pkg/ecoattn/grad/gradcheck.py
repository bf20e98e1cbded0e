"""
Central finite-difference oracle.
"""

import math
from typing import Callable, Dict, Mapping, Optional, Tuple

import numpy as np

from ecoattn.attention.kernels import attend
from ecoattn.attention.schemas import AttentionSpec, ScoreKind
from ecoattn.exceptions import OracleError, ParameterError
from ecoattn.grad.backward import attention_backward
from ecoattn.grad.schemas import Coordinate, FdReport, GradcheckReport
from ecoattn.tensor.core import rand_matrix
from ecoattn.tensor.rng import Rng
from ecoattn.utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_STEP = 1e-5
DEFAULT_KINK_GAP = 1e-3
MIN_STEP, MAX_STEP = 1e-7, 1e-3

ScalarFn = Callable[[Dict[str, np.ndarray]], float]


def _as_grid(array: np.ndarray) -> np.ndarray:
    # reports address every tensor as (row, col)
    if array.ndim == 0:
        return array.reshape(1, 1)
    if array.ndim == 1:
        return array.reshape(1, -1)
    return array.reshape(-1, array.shape[-1])


def _evaluate(f: ScalarFn, inputs: Dict[str, np.ndarray], name: str, row: int, col: int) -> float:
    value = float(f(inputs))
    if not math.isfinite(value):
        raise OracleError(f"f is not finite after perturbing {name}[{row}, {col}]")
    return value


def finite_difference_check(
    f: ScalarFn,
    inputs: Mapping[str, np.ndarray],
    analytic: Mapping[str, np.ndarray],
    step: float = DEFAULT_STEP,
    skip: Optional[Mapping[str, np.ndarray]] = None
) -> FdReport:
    """Compare ``analytic`` against (f(x + h) - f(x - h)) / 2h coordinate by coordinate.

    The relative error uses max(1, |analytic|) as denominator. Coordinates
    flagged in ``skip`` are counted but not compared.
    """
    if not MIN_STEP <= step <= MAX_STEP:
        raise ParameterError(f"step must lie in [{MIN_STEP}, {MAX_STEP}], got {step}")

    # private copies; f sees the perturbed arrays through this dict
    work = {name: np.array(value, dtype=np.float64) for name, value in inputs.items()}
    skip = skip or {}

    max_rel_err = 0.0
    worst = None
    checked = skipped = 0

    for name, tensor in work.items():
        if name not in analytic:
            continue
        grid = _as_grid(tensor)
        expected = _as_grid(np.asarray(analytic[name], dtype=np.float64))
        if expected.shape != grid.shape:
            raise OracleError(f"analytic gradient for {name} has shape {expected.shape}, expected {grid.shape}")
        mask = _as_grid(np.asarray(skip[name], dtype=bool)) if name in skip else None

        for row, col in np.ndindex(*grid.shape):
            if mask is not None and mask[row, col]:
                skipped += 1
                continue

            original = grid[row, col]
            grid[row, col] = original + step
            upper = _evaluate(f, work, name, row, col)
            grid[row, col] = original - step
            lower = _evaluate(f, work, name, row, col)
            grid[row, col] = original

            numeric = (upper - lower) / (2.0 * step)
            exact = expected[row, col]
            rel_err = abs(numeric - exact) / max(1.0, abs(exact))
            checked += 1
            if worst is None or rel_err > max_rel_err:
                max_rel_err = rel_err
                worst = Coordinate(tensor=name, row=row, col=col)

    report = FdReport(
        max_rel_err=max_rel_err,
        worst_coordinate=worst,
        step=step,
        checked_coordinates=checked,
        skipped_coordinates=skipped
    )
    logger.debug(f"FD check: {checked} checked, {skipped} skipped, max_rel_err={max_rel_err:.3e}")
    return report


def l1_kink_coordinates(q: np.ndarray, k: np.ndarray, gap: float = DEFAULT_KINK_GAP) -> Tuple[np.ndarray, np.ndarray]:
    """Masks of q and k coordinates lying within ``gap`` of a matching coordinate."""
    close = np.abs(q[:, np.newaxis, :] - k[np.newaxis, :, :]) < gap
    return close.any(axis=1), close.any(axis=0)


def jitter_from_kinks(q: np.ndarray, k: np.ndarray, rng: Rng, gap: float = DEFAULT_KINK_GAP,
                      max_rounds: int = 100) -> np.ndarray:
    """Shift offending q coordinates until every |q_im - k_jm| >= gap."""
    q = np.array(q, dtype=np.float64)
    for _ in range(max_rounds):
        near_q, _ = l1_kink_coordinates(q, k, gap)
        if not near_q.any():
            return q
        shift = gap * (2.0 + 2.0 * rng.uniform(q.size).reshape(q.shape))
        q = np.where(near_q, q + shift, q)
    raise OracleError(f"could not separate q from k by {gap} after {max_rounds} rounds")


def attention_loss(spec: AttentionSpec, q: np.ndarray, k: np.ndarray, v: np.ndarray,
                   upstream: np.ndarray) -> float:
    """Scalar loss sum(upstream * O) whose gradient is attention_backward."""
    output, _ = attend(spec, q, k, v)
    return float(np.sum(output * upstream))


def gradcheck_attention(spec: AttentionSpec, n: int, seed: int, step: float = DEFAULT_STEP,
                        gap: float = DEFAULT_KINK_GAP) -> GradcheckReport:
    """Random N x Dk instance checked against central differences."""
    rng = Rng(seed)
    q = rand_matrix(rng, n, spec.d_k, 1.0)
    k = rand_matrix(rng, n, spec.d_k, 1.0)
    v = rand_matrix(rng, n, spec.d_k, 1.0)
    upstream = rand_matrix(rng, n, spec.d_k, 1.0)

    skip = None
    if spec.kind in (ScoreKind.L1, ScoreKind.LP):
        q = jitter_from_kinks(q, k, rng, gap)
        skip_q, skip_k = l1_kink_coordinates(q, k, gap)
        skip = {"q": skip_q, "k": skip_k}

    grads = attention_backward(spec, q, k, v, upstream)
    report = finite_difference_check(
        lambda t: attention_loss(spec, t["q"], t["k"], t["v"], upstream),
        {"q": q, "k": k, "v": v},
        grads.as_dict(),
        step=step,
        skip=skip
    )
    return GradcheckReport(
        kind=spec.kind.value,
        lam=spec.lam,
        p=spec.p if spec.kind is ScoreKind.LP else None,
        n=n,
        d_k=spec.d_k,
        seed=seed,
        **report.model_dump()
    )
