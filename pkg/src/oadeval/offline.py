"""Legacy frame-level metrics: per-frame mAP and calibrated cAP.

Both metrics rank every frame in the dataset by its per-class confidence
and average a precision value over the ground-truth positive frames, so
neither can be produced from a growing prefix of a stream: adding frames
re-sorts the ranking and rewrites earlier values. They are provided for
comparison against the instantaneous-accuracy protocol.

Precision at a positive's rank is ``TP / (TP + FP)``; the calibrated
variant uses ``cPrec = w*TP / (w*TP + FP)`` where ``w`` is the
dataset-wide negative/positive frame ratio for the class, fixed a priori
over the whole test set. Average precision is the plain mean of the
precision at every positive's rank (all-points interpolation).
Background frames carry no score column; when a method scores them
highly for some class they surface as false positives only.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .timeline import AnnotationTrack, LabelVocabulary

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FrameScoreMatrix:
    """Per-frame confidence scores, one column per action class.

    Column order follows the vocabulary's class order. Row count must
    equal ``floor(duration * fps)`` of the matching video.
    """

    video_id: str
    fps: float
    scores: np.ndarray

    def __post_init__(self):
        if self.fps <= 0:
            raise ValidationError(f"fps {self.fps} must be > 0")
        scores = np.asarray(self.scores, dtype=float)
        if scores.ndim != 2:
            raise ValidationError("scores must be a 2-D frame x class array")
        if not np.all(np.isfinite(scores)):
            raise ValidationError(
                f"video {self.video_id!r}: scores must be finite")
        object.__setattr__(self, "scores", scores)

    @property
    def n_frames(self) -> int:
        return self.scores.shape[0]


@dataclass
class APResult:
    """Per-class average precision plus the mean over scored classes."""

    per_class: dict[str, float]
    mean: float
    skipped_classes: tuple[str, ...] = ()


def frame_count(duration_s: float, fps: float) -> int:
    return math.floor(duration_s * fps)


def rasterize_frames(track: AnnotationTrack, fps: float,
                     vocab: LabelVocabulary) -> list[str]:
    """Ground-truth label per frame, by the frame-midpoint rule.

    Frame ``i`` (1-indexed) covers ``[(i-1)/fps, i/fps)``; its label is
    the interval covering the midpoint ``(i - 1/2)/fps``, ties resolved
    as in the slot discretizer (earliest start, then label).
    """
    if fps <= 0:
        raise ValidationError(f"fps {fps} must be > 0")
    intervals = sorted(track.intervals, key=lambda iv: (iv.start_us, iv.label))
    for iv in intervals:
        vocab.require(iv.label)
    bounds = [(iv.start_us / 1e6, iv.end_us / 1e6, iv.label) for iv in intervals]
    labels = []
    for i in range(1, frame_count(track.duration_s, fps) + 1):
        mid = (i - 0.5) / fps
        label = vocab.background
        for start, end, name in bounds:
            if start > mid:
                break
            if mid < end:
                label = name
                break
        labels.append(label)
    return labels


def _collect(score_matrices, tracks, vocab):
    """Align matrices with tracks and flatten the dataset frame-major.

    Returns stacked scores, ground-truth labels, and the (video order,
    frame index) arrays used to break ranking ties deterministically.
    """
    by_id = {}
    for m in score_matrices:
        if m.video_id in by_id:
            raise ValidationError(f"duplicate score matrix for {m.video_id!r}")
        by_id[m.video_id] = m
    track_ids = {t.video_id for t in tracks}
    if set(by_id) - track_ids:
        missing = sorted(set(by_id) - track_ids)
        raise ValidationError(f"scores reference unknown videos: {missing}")
    if track_ids - set(by_id):
        missing = sorted(track_ids - set(by_id))
        raise ValidationError(f"missing scores for videos: {missing}")

    all_scores, all_labels, video_ord, frame_idx = [], [], [], []
    for ord_, track in enumerate(sorted(tracks, key=lambda t: t.video_id)):
        m = by_id[track.video_id]
        expected = frame_count(track.duration_s, m.fps)
        if m.n_frames != expected:
            raise ValidationError(
                f"video {track.video_id!r}: {m.n_frames} score rows but "
                f"{track.duration_s} s at {m.fps} fps has {expected} frames")
        if m.scores.shape[1] != len(vocab.classes):
            raise ValidationError(
                f"video {track.video_id!r}: {m.scores.shape[1]} score columns "
                f"for {len(vocab.classes)} classes")
        all_scores.append(m.scores)
        all_labels.extend(rasterize_frames(track, m.fps, vocab))
        video_ord.extend([ord_] * m.n_frames)
        frame_idx.extend(range(m.n_frames))

    return (np.concatenate(all_scores, axis=0) if all_scores else
            np.zeros((0, len(vocab.classes))),
            np.array(all_labels, dtype=object),
            np.array(video_ord), np.array(frame_idx))


def _ranked_average_precision(scores, gt_labels, video_ord, frame_idx,
                              vocab, calibrated):
    per_class: dict[str, float] = {}
    skipped = []
    for col, cls in enumerate(vocab.classes):
        positives = gt_labels == cls
        n_pos = int(positives.sum())
        if n_pos == 0:
            skipped.append(cls)
            logger.warning("class %r has no ground-truth frames; "
                           "excluded from the mean", cls)
            continue
        col_scores = scores[:, col]
        order = np.lexsort((frame_idx, video_ord, -col_scores))
        pos_sorted = positives[order]
        ranks = np.arange(1, len(pos_sorted) + 1)
        tp = np.cumsum(pos_sorted)
        fp = ranks - tp
        if calibrated:
            n_neg = len(pos_sorted) - n_pos
            # no negatives anywhere: FP is identically zero, so any
            # positive weight yields 1; avoid the 0/0 by using w = 1
            w = n_neg / n_pos if n_neg > 0 else 1.0
            prec = (w * tp) / (w * tp + fp)
        else:
            prec = tp / ranks
        per_class[cls] = float(np.mean(prec[pos_sorted]))

    if not per_class:
        raise ValidationError("no class has ground-truth frames")
    mean = sum(per_class.values()) / len(per_class)
    return APResult(per_class=per_class, mean=mean,
                    skipped_classes=tuple(skipped))


def frame_map(score_matrices, tracks, vocab: LabelVocabulary) -> APResult:
    """Per-frame mean average precision over the dataset ranking.

    Frames are ranked per class by descending score, ties broken by
    video id then frame index. Classes without ground-truth frames are
    excluded from the mean (and logged).
    """
    return _ranked_average_precision(*_collect(score_matrices, tracks, vocab),
                                     vocab=vocab, calibrated=False)


def frame_cap(score_matrices, tracks, vocab: LabelVocabulary) -> APResult:
    """Calibrated average precision on the same ranking as `frame_map`."""
    return _ranked_average_precision(*_collect(score_matrices, tracks, vocab),
                                     vocab=vocab, calibrated=True)
