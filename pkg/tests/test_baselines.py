"""All-Background and Perfect-Model baseline generators."""

import numpy as np
import pytest

from oadeval.baselines import all_bg, perfect_model, video_rng
from oadeval.errors import ValidationError
from oadeval.ia import evaluate_grids, maia, oracle_ia
from oadeval.offline import frame_map
from oadeval.synthetic import synthetic_corpus
from oadeval.timeline import (
    AnnotationTrack,
    LabelVocabulary,
    TimeInterval,
    discretize,
)


class TestAllBg:
    def test_every_decision_is_background(self, vocab, worked_track):
        stream, scores = all_bg(worked_track, 0.5, vocab)
        assert stream.decisions == ("background",) * 20
        assert scores is None

    def test_zero_scores_when_requested(self, vocab, worked_track):
        _, scores = all_bg(worked_track, 0.5, vocab, fps=2.0)
        assert scores.scores.shape == (20, 2)
        assert not scores.scores.any()

    def test_perfect_on_background_only_video(self, vocab):
        track = AnnotationTrack("empty", 5.0, ())
        stream, _ = all_bg(track, 0.5, vocab)
        gt = discretize((), 5.0, 0.5, vocab)
        assert all(p.ia == 1.0 for p in evaluate_grids(stream.as_grid(), gt))

    def test_worked_example_values(self, vocab, worked_track, worked_gt_grid):
        stream, _ = all_bg(worked_track, 0.5, vocab)
        trace = oracle_ia(stream.as_grid(), worked_gt_grid)
        assert trace[-1].ia == pytest.approx(14 / 20, abs=1e-12)
        assert trace[-1].wia == pytest.approx(6 / 20, abs=1e-12)

    def test_corpus_maia_equals_background_fraction_aggregate(self):
        manifest = synthetic_corpus(seed=11, n_videos=6)
        delta = 0.5
        traces, expected_terms = [], []
        for track in manifest.tracks:
            stream, _ = all_bg(track, delta, manifest.vocabulary)
            gt = discretize(track.intervals, track.duration_s, delta,
                            manifest.vocabulary)
            trace = evaluate_grids(stream.as_grid(), gt)
            traces.append((track.duration_s, [p.ia for p in trace]))
            # independent aggregation: per-prefix background fraction
            bg = 0
            fractions = []
            for j, lab in enumerate(gt.labels, start=1):
                bg += 1 if lab == manifest.vocabulary.background else 0
                fractions.append(bg / j)
            expected_terms.append((delta / track.duration_s) * sum(fractions))
        expected = sum(expected_terms) / len(expected_terms)
        assert maia(traces, delta) == pytest.approx(expected, abs=1e-12)


class TestPerfectModel:
    def test_stream_replays_ground_truth(self, vocab, worked_track,
                                         worked_gt_grid):
        stream, _ = perfect_model(worked_track, 0.5, vocab, seed=0)
        assert stream.decisions == worked_gt_grid.labels

    def test_saturates_both_metrics_at_every_instant(self, vocab, worked_track,
                                                     worked_gt_grid):
        stream, _ = perfect_model(worked_track, 0.5, vocab, seed=3)
        trace = evaluate_grids(stream.as_grid(), worked_gt_grid)
        assert all(p.ia == 1.0 and p.wia == 1.0 for p in trace)

    def test_all_action_video_sweeps_everything(self, vocab):
        track = AnnotationTrack("full", 4.0, (TimeInterval("run", 0.0, 4.0),))
        stream, scores = perfect_model(track, 0.5, vocab, seed=0, fps=2.0)
        assert set(stream.decisions) == {"run"}
        result = frame_map([scores], [track], vocab)
        assert result.per_class["run"] == pytest.approx(1.0)

    def test_scores_are_one_hot(self, vocab, worked_track):
        _, scores = perfect_model(worked_track, 0.5, vocab, seed=0, fps=2.0)
        assert scores.scores.shape == (20, 2)
        assert np.array_equal(np.sort(scores.scores, axis=1)[:, -1],
                              np.ones(20))
        assert scores.scores.sum() == 20

    def test_correct_class_scored_on_action_frames(self, vocab, worked_track,
                                                   worked_gt_grid):
        _, scores = perfect_model(worked_track, 0.5, vocab, seed=0, fps=2.0)
        jump = vocab.classes.index("jump")
        for i, lab in enumerate(worked_gt_grid.labels):
            if lab == "jump":
                assert scores.scores[i, jump] == 1.0

    def test_seeded_reproducibility(self, vocab, worked_track):
        _, a = perfect_model(worked_track, 0.5, vocab, seed=42, fps=2.0)
        _, b = perfect_model(worked_track, 0.5, vocab, seed=42, fps=2.0)
        _, c = perfect_model(worked_track, 0.5, vocab, seed=43, fps=2.0)
        assert np.array_equal(a.scores, b.scores)
        assert not np.array_equal(a.scores, c.scores)

    def test_map_below_one_with_background_present(self, vocab, worked_track):
        _, scores = perfect_model(worked_track, 0.5, vocab, seed=0, fps=2.0)
        result = frame_map([scores], [worked_track], vocab)
        assert result.mean < 1.0

    def test_empty_vocabulary_rejected(self, worked_track):
        vocab = LabelVocabulary(classes=())
        with pytest.raises(ValidationError):
            perfect_model(worked_track, 0.5, vocab, seed=0)

    def test_negative_seed_rejected(self):
        with pytest.raises(ValidationError):
            video_rng(-1, "v")


class TestSyntheticCorpus:
    def test_deterministic_and_in_density_band(self):
        a = synthetic_corpus(seed=5)
        b = synthetic_corpus(seed=5)
        assert a.vocabulary == b.vocabulary and a.tracks == b.tracks
        assert len(a.tracks) == 20
        for track in a.tracks:
            assert track.intervals
            grid = discretize(track.intervals, track.duration_s, 0.5,
                              a.vocabulary)
            action = sum(1 for lab in grid.labels
                         if lab != a.vocabulary.background)
            assert 0.0 < action / len(grid) < 0.5
