"""
Closed-form operation counts and the energy comparison.
"""

from typing import Iterable, Optional

import pandas as pd

from ecoattn.accounting.models import EnergyModel, OpTally, ReductionReport
from ecoattn.attention.schemas import ScoreKind, parse_kind
from ecoattn.exceptions import DegenerateModelError, ParameterError
from ecoattn.utils.logging import get_logger

logger = get_logger(__name__)

# Attention share of GPT-2 inference energy.
GPT2_ATTENTION_SHARE = 0.3794


def _check_counts(**counts: int) -> None:
    for name, value in counts.items():
        if int(value) != value or value < 1:
            raise ParameterError(f"{name} must be a positive integer, got {value}")


def score_op_counts(kind, n_q: int, n_k: int, d_k: int) -> OpTally:
    """Operations needed for the pre-softmax score matrix only."""
    kind = parse_kind(kind)
    _check_counts(n_q=n_q, n_k=n_k, d_k=d_k)
    terms = n_q * n_k * d_k

    if kind is ScoreKind.DOT_PRODUCT:
        return OpTally(mults=terms, adds=terms)
    if kind is ScoreKind.L1:
        return OpTally(abs_diffs=terms, adds=terms)
    if kind is ScoreKind.SQUARED_L2:
        # subtract, square, accumulate
        return OpTally(mults=terms, adds=2 * terms)
    # Lp: |x|^p per term, then one root per entry
    return OpTally(abs_diffs=terms, adds=terms, exps=terms + n_q * n_k)


def attention_op_counts(
    kind,
    n_q: int,
    n_k: int,
    d_k: int,
    d_v: Optional[int] = None,
    full_layer: bool = False
) -> OpTally:
    """Score counts, optionally extended by scaling, softmax and the alpha V product."""
    tally = score_op_counts(kind, n_q, n_k, d_k)
    if not full_layer:
        return tally

    d_v = d_k if d_v is None else d_v
    _check_counts(d_v=d_v)
    entries = n_q * n_k
    return tally + OpTally(
        mults=entries + entries * d_v,
        adds=2 * entries + entries * d_v,
        exps=entries,
        divs=entries
    )


def model_score_op_counts(kind, n: int, d_model: int, heads: int, layers: int) -> OpTally:
    """Score counts summed over every head of every layer."""
    _check_counts(d_model=d_model, heads=heads, layers=layers)
    if d_model % heads:
        raise ParameterError(f"d_model={d_model} is not divisible by heads={heads}")
    return score_op_counts(kind, n, n, d_model // heads).scaled(heads * layers)


def energy_estimate(tally: OpTally, model: Optional[EnergyModel] = None) -> float:
    """Energy of ``tally`` in picojoules."""
    model = model or EnergyModel()
    return (
        tally.mults * model.pj_mult
        + tally.adds * model.pj_add
        + tally.abs_diffs * model.pj_abs_diff
        + tally.exps * model.pj_exp
        + tally.divs * model.pj_div
    )


def projected_model_saving(report: ReductionReport, attention_share: float = GPT2_ATTENTION_SHARE) -> float:
    """Whole-model saving if the attention block accounts for ``attention_share`` of energy."""
    if not 0 <= attention_share <= 1:
        raise ParameterError(f"attention_share must be in [0, 1], got {attention_share}")
    return report.reduction_fraction * attention_share


def reduction_report(
    n: int,
    d_k: int,
    model: Optional[EnergyModel] = None,
    full_layer: bool = False,
    heads: int = 1,
    layers: int = 1,
    attention_share: Optional[float] = None
) -> ReductionReport:
    """Compare dot-product and L1 score energy."""
    model = model or EnergyModel()
    _check_counts(n=n, d_k=d_k, heads=heads, layers=layers)

    repeat = heads * layers
    dot_tally = attention_op_counts(ScoreKind.DOT_PRODUCT, n, n, d_k, full_layer=full_layer).scaled(repeat)
    l1_tally = attention_op_counts(ScoreKind.L1, n, n, d_k, full_layer=full_layer).scaled(repeat)

    dot_pj = energy_estimate(dot_tally, model)
    l1_pj = energy_estimate(l1_tally, model)
    if dot_pj == 0:
        raise DegenerateModelError("Dot-product energy is zero; nothing to compare against")

    report = ReductionReport(
        n=n,
        d_k=d_k,
        scope="full-layer" if full_layer else "score",
        heads=heads,
        layers=layers,
        dot_tally=dot_tally,
        l1_tally=l1_tally,
        dot_pj=dot_pj,
        l1_pj=l1_pj,
        reduction_fraction=1.0 - l1_pj / dot_pj,
        mult_add_ratio=model.pj_mult / model.pj_add if model.pj_add > 0 else None
    )
    if attention_share is not None:
        report = report.model_copy(
            update={"projected_model_saving": projected_model_saving(report, attention_share)}
        )

    logger.debug(f"Reduction n={n} d_k={d_k} scope={report.scope}: {report.reduction_fraction:.6f}")
    return report


def reduction_sweep(
    ns: Iterable[int],
    d_ks: Iterable[int],
    model: Optional[EnergyModel] = None,
    full_layer: bool = False
) -> pd.DataFrame:
    """Reduction report over an (n, d_k) grid, one row per point."""
    rows = []
    for n in ns:
        for d_k in d_ks:
            report = reduction_report(n, d_k, model, full_layer=full_layer)
            rows.append({
                "n": n,
                "d_k": d_k,
                "scope": report.scope,
                "dot_mults": report.dot_tally.mults,
                "dot_adds": report.dot_tally.adds,
                "l1_abs_diffs": report.l1_tally.abs_diffs,
                "l1_adds": report.l1_tally.adds,
                "dot_pj": report.dot_pj,
                "l1_pj": report.l1_pj,
                "reduction_fraction": report.reduction_fraction
            })
    return pd.DataFrame(rows)
