"""Instantaneous accuracy: incremental, causal slot-level evaluation.

For a prediction/ground-truth slot pair consumed at instant ``t' = j*dt``
the engine maintains five integer counters and emits, in O(1) per slot:

    IA(t')  = (tp + tn) / K'
    wIA(t') = (w * tp + (1/w) * tn) / K'      with  w = N' / P'

where ``K' = floor(t'/dt)`` is the slots consumed so far, ``tp`` counts
correct action slots, ``tn`` correct background slots, and ``P'``/``N'``
the ground-truth action/background slots seen. While either ground-truth
count is still zero the ratio is undefined and ``w`` falls back to 1,
which keeps wIA bounded in [0, 1] and lets a perfect predictor score 1
at every instant.

Only the seen prefix ever enters a value: the metric is causal by
construction, and :func:`oracle_ia` re-derives every instant from scratch
(full prefix enumeration) to verify the incremental path bit-for-bit.
"""

from __future__ import annotations

import enum
from typing import Iterable, NamedTuple, Sequence

from .errors import DegenerateInputError, ValidationError
from .timeline import LabelVocabulary, SlotGrid, seconds_to_us


class MatchingMode(enum.Enum):
    """How a predicted action is credited against a ground-truth action.

    CLASS_AWARE requires the exact class; BINARY credits any action
    class on an action slot. Background is matched literally either way.
    """

    CLASS_AWARE = "class-aware"
    BINARY = "binary"


class MetricState(NamedTuple):
    """Running counters after consuming ``k_prime`` slots."""

    k_prime: int = 0
    tp_count: int = 0
    tn_count: int = 0
    gt_action_count: int = 0
    gt_background_count: int = 0


class IATracePoint(NamedTuple):
    """IA/wIA values at one evaluation instant ``t_s = j * delta_t``."""

    t_s: float
    ia: float
    wia: float
    weight_w: float


def update(state: MetricState, predicted: str, truth: str,
           vocab: LabelVocabulary, delta_t_s: float,
           mode: MatchingMode = MatchingMode.CLASS_AWARE,
           ) -> tuple[MetricState, IATracePoint]:
    """Consume one slot decision and return the new state plus trace point.

    ``tp`` increments when the truth is an action and the prediction
    matches it under ``mode``; ``tn`` increments when both sides are
    background. Unknown labels raise a vocabulary error.
    """
    truth_is_action = vocab.is_action(truth)
    pred_is_action = vocab.is_action(predicted)

    k = state.k_prime + 1
    tp = state.tp_count
    tn = state.tn_count
    p = state.gt_action_count
    n = state.gt_background_count
    if truth_is_action:
        p += 1
        if pred_is_action and (mode is MatchingMode.BINARY or predicted == truth):
            tp += 1
    else:
        n += 1
        if not pred_is_action:
            tn += 1

    new_state = MetricState(k, tp, tn, p, n)
    return new_state, _trace_point(new_state, delta_t_s)


def _trace_point(state: MetricState, delta_t_s: float) -> IATracePoint:
    # wIA is evaluated over a common integer denominator,
    #   (N'^2*tp + P'^2*tn) / (N'*P'*K')  ==  (w*tp + tn/w) / K',
    # so only one float rounding happens: a perfect prefix scores 1.0
    # exactly and the numerator can never exceed the denominator.
    k = state.k_prime
    tp, tn = state.tp_count, state.tn_count
    p, n = state.gt_action_count, state.gt_background_count
    ia = (tp + tn) / k
    if p > 0 and n > 0:
        w = n / p
        wia = (n * n * tp + p * p * tn) / (n * p * k)
    else:
        w = 1.0
        wia = ia
    return IATracePoint(t_s=k * delta_t_s, ia=ia, wia=wia, weight_w=w)


class StreamingEvaluator:
    """Single-writer per-video evaluator fed one decision at a time.

    Ground truth for the video is fixed up front; predictions arrive
    causally and each :meth:`consume` yields the trace point for the
    slot just decided.
    """

    def __init__(self, grid_gt: SlotGrid,
                 mode: MatchingMode = MatchingMode.CLASS_AWARE):
        self.grid_gt = grid_gt
        self.mode = mode
        self.state = MetricState()
        self.trace: list[IATracePoint] = []

    def consume(self, predicted: str) -> IATracePoint:
        j = self.state.k_prime
        if j >= len(self.grid_gt):
            raise ValidationError(
                f"all {len(self.grid_gt)} slots already evaluated")
        self.state, point = update(self.state, predicted, self.grid_gt.labels[j],
                                   self.grid_gt.vocab, self.grid_gt.delta_t_s,
                                   self.mode)
        self.trace.append(point)
        return point


def _check_grids(grid_pred: SlotGrid, grid_gt: SlotGrid) -> None:
    if grid_pred.vocab != grid_gt.vocab:
        raise ValidationError("prediction and ground-truth grids use "
                              "different vocabularies")
    if grid_pred.delta_t_us != grid_gt.delta_t_us:
        raise ValidationError(
            f"slot size mismatch: prediction {grid_pred.delta_t_s} s "
            f"vs ground truth {grid_gt.delta_t_s} s")
    if len(grid_pred) != len(grid_gt):
        raise ValidationError(
            f"slot count mismatch: prediction {len(grid_pred)} "
            f"vs ground truth {len(grid_gt)}")


def evaluate_grids(grid_pred: SlotGrid, grid_gt: SlotGrid,
                   mode: MatchingMode = MatchingMode.CLASS_AWARE,
                   ) -> list[IATracePoint]:
    """Replay the incremental update over two completed grids."""
    _check_grids(grid_pred, grid_gt)
    state = MetricState()
    trace = []
    vocab = grid_gt.vocab
    delta_t_s = grid_gt.delta_t_s
    for predicted, truth in zip(grid_pred.labels, grid_gt.labels):
        state, point = update(state, predicted, truth, vocab, delta_t_s, mode)
        trace.append(point)
    return trace


def _k_prime_at(grid: SlotGrid, t_prime_s: float) -> int:
    t_us = seconds_to_us(t_prime_s)
    if t_us <= 0:
        raise DegenerateInputError(f"evaluation instant {t_prime_s} s must be > 0")
    k = t_us // grid.delta_t_us
    if k == 0:
        raise DegenerateInputError(
            f"evaluation instant {t_prime_s} s precedes the first slot "
            f"boundary ({grid.delta_t_s} s)")
    if k > len(grid):
        raise ValidationError(
            f"evaluation instant {t_prime_s} s lies beyond the "
            f"{len(grid)}-slot grid")
    return k


def ia_at(grid_pred: SlotGrid, grid_gt: SlotGrid, t_prime_s: float,
          mode: MatchingMode = MatchingMode.CLASS_AWARE) -> float:
    """IA over slots ``1..floor(t'/dt)``; equals replaying the prefix."""
    _check_grids(grid_pred, grid_gt)
    k = _k_prime_at(grid_gt, t_prime_s)
    return evaluate_grids(grid_pred, grid_gt, mode)[k - 1].ia


def wia_at(grid_pred: SlotGrid, grid_gt: SlotGrid, t_prime_s: float,
           mode: MatchingMode = MatchingMode.CLASS_AWARE) -> float:
    """Weighted IA over slots ``1..floor(t'/dt)``."""
    _check_grids(grid_pred, grid_gt)
    k = _k_prime_at(grid_gt, t_prime_s)
    return evaluate_grids(grid_pred, grid_gt, mode)[k - 1].wia


def weight_trace(grid_gt: SlotGrid) -> list[tuple[float, float]]:
    """Per-instant dynamic weight ``w(t')`` over the ground-truth grid.

    ``w`` is the background/action ratio of the seen prefix, with the
    fallback to 1 while either count is zero. Depends on ground truth
    only, never on predictions.
    """
    vocab = grid_gt.vocab
    p = n = 0
    out = []
    for j, truth in enumerate(grid_gt.labels, start=1):
        if vocab.is_action(truth):
            p += 1
        else:
            n += 1
        w = n / p if p > 0 and n > 0 else 1.0
        out.append((j * grid_gt.delta_t_s, w))
    return out


def maia(per_video_traces: Iterable[tuple[float, Sequence[float]]],
         delta_t_s: float) -> float:
    """Mean average instantaneous accuracy over a corpus.

    Each entry pairs a video duration ``T_i`` with its per-instant value
    sequence (one value per slot, ``floor(T_i/dt)`` of them); the result
    is ``mean_i ( (dt / T_i) * sum_j values_i[j] )``. The ``dt/T_i``
    factor is applied as written, so a constant trace on a duration that
    is not a slot multiple averages slightly below the constant. Pass an
    IA trace for the unweighted aggregate, a wIA trace for the weighted
    one.
    """
    delta_us = seconds_to_us(delta_t_s)
    if delta_us <= 0:
        raise ValidationError(f"delta_t {delta_t_s} must be > 0")
    totals = []
    for duration_s, values in per_video_traces:
        expected = seconds_to_us(duration_s) // delta_us
        if len(values) != expected:
            raise ValidationError(
                f"trace holds {len(values)} values but a {duration_s} s video "
                f"at delta_t {delta_t_s} s has {expected} slots")
        totals.append((delta_t_s / duration_s) * sum(values))
    if not totals:
        raise DegenerateInputError("maia needs at least one video trace")
    return sum(totals) / len(totals)


def oracle_ia(grid_pred: SlotGrid, grid_gt: SlotGrid,
              mode: MatchingMode = MatchingMode.CLASS_AWARE,
              ) -> list[IATracePoint]:
    """Brute-force reference: recompute every instant from scratch.

    For each prefix length the counters are re-accumulated over all its
    slots (O(K^2) work overall) with no state carried between instants.
    Results must match :func:`evaluate_grids` bit for bit.
    """
    _check_grids(grid_pred, grid_gt)
    vocab = grid_gt.vocab
    delta_t_s = grid_gt.delta_t_s
    class_aware = mode is MatchingMode.CLASS_AWARE

    truth_action = [vocab.is_action(t) for t in grid_gt.labels]
    pred_action = [vocab.is_action(pr) for pr in grid_pred.labels]
    tp_flags = []
    tn_flags = []
    for pr, t, t_act, pr_act in zip(grid_pred.labels, grid_gt.labels,
                                    truth_action, pred_action):
        tp_flags.append(1 if t_act and pr_act and (pr == t or not class_aware) else 0)
        tn_flags.append(1 if not t_act and not pr_act else 0)

    trace = []
    for k in range(1, len(grid_gt) + 1):
        tp = sum(tp_flags[:k])
        tn = sum(tn_flags[:k])
        p = sum(truth_action[:k])
        n = k - p
        ia = (tp + tn) / k
        if p > 0 and n > 0:
            w = n / p
            wia = (n * n * tp + p * p * tn) / (n * p * k)
        else:
            w = 1.0
            wia = ia
        trace.append(IATracePoint(t_s=k * delta_t_s, ia=ia, wia=wia, weight_w=w))
    return trace
