import copy
import dataclasses

import numpy as np
import pytest

from anchortrack import keypoints
from anchortrack.anchor_model import InitializationFailure
from anchortrack.bench import results_to_csv
from anchortrack.core import BoundingBox, Frame, TrackerConfig
from anchortrack.localization import vote_sigma
from anchortrack.pipeline import TrackStatus, initialize, run_sequence, step

from _oracles import brute_force_matches, naive_score_matrix
from conftest import checker_frame, uniform_frame


def translated(frame: Frame, dx: int, dy: int, index: int) -> Frame:
    rgb = np.roll(np.roll(frame.rgb, dy, axis=0), dx, axis=1)
    return Frame.from_rgb(rgb, index=index)


def noise_frame(width=96, height=96, index=1, seed=211):
    rng = np.random.default_rng(seed)
    rgb = rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)
    return Frame.from_rgb(rgb, index=index)


class TestInitialize:
    def test_textured_box(self, cfg):
        frame, box = checker_frame()
        state = initialize(frame, box, cfg)
        assert len(state.model.anchors) >= 1
        assert state.status is TrackStatus.TRACKING
        from anchortrack.global_models import update_gate

        assert update_gate(frame, box, state.refs, cfg)

    def test_uniform_region_fails(self, cfg):
        frame = uniform_frame()
        box = BoundingBox(center=np.array([32.0, 32.0]), width=24.0, height=24.0)
        with pytest.raises(InitializationFailure):
            initialize(frame, box, cfg)

    def test_repeated_initialize_is_identical(self, cfg):
        frame, box = checker_frame()
        a = initialize(frame, box, cfg)
        b = initialize(frame, box, cfg)
        assert len(a.model.anchors) == len(b.model.anchors)
        for x, y in zip(a.model.anchors, b.model.anchors):
            np.testing.assert_array_equal(x.descriptor, y.descriptor)
            np.testing.assert_array_equal(x.constraint, y.constraint)
            assert x.lt == y.lt and x.st == y.st
        np.testing.assert_array_equal(a.refs.lbsp_ref.codes, b.refs.lbsp_ref.codes)
        np.testing.assert_array_equal(a.refs.hist_ref.bins, b.refs.hist_ref.bins)


class TestStep:
    def test_identical_second_frame(self, cfg):
        frame, box = checker_frame()
        state = initialize(frame, box, cfg)
        anchor_count = len(state.model.anchors)
        result = step(state, Frame.from_rgb(frame.rgb, index=1))
        assert result.status is TrackStatus.TRACKING
        assert result.matched_count == anchor_count
        assert np.linalg.norm(result.box.center - box.center) <= 1.0
        assert result.box.width == box.width

    def test_translated_frame_moves_center(self, cfg):
        frame, box = checker_frame(width=128, height=128, box_center=(56.0, 60.0))
        state = initialize(frame, box, cfg)
        result = step(state, translated(frame, 7, 3, index=1))
        moved = result.box.center - box.center
        assert abs(moved[0] - 7.0) <= 1.0
        assert abs(moved[1] - 3.0) <= 1.0

    def test_score_matrix_against_independent_rederivation(self, cfg):
        """Replay detection/matching/voting with the module primitives and the
        naive per-pixel oracle; the traced matrix must agree to 1e-9."""
        frame, box = checker_frame(width=128, height=128, box_center=(56.0, 60.0))
        state = initialize(frame, box, cfg)
        snapshot = copy.deepcopy(state)
        next_frame = translated(frame, 7, 3, index=1)

        trace = {}
        step(state, next_frame, trace=trace)

        kps = keypoints.detect_and_describe(next_frame, cfg)
        model_desc = [a.descriptor for a in snapshot.model.anchors]
        frame_desc = [k.descriptor for k in kps]
        matches = brute_force_matches(model_desc, frame_desc, cfg.ratio_test)
        sigma = vote_sigma(snapshot.model.box, cfg)
        stamps = []
        for i, j, _ in matches:
            center = kps[j].position + snapshot.model.anchors[i].constraint
            a = snapshot.model.anchors[i]
            stamps.append((center, a.lt * a.st, sigma))
        oracle = naive_score_matrix(stamps, next_frame.width, next_frame.height,
                                    cfg.vote_truncation)
        np.testing.assert_allclose(trace["score_matrix"].values, oracle, atol=1e-9)

    def test_noise_frame_holds(self, cfg):
        frame, box = checker_frame()
        state = initialize(frame, box, cfg)
        result = step(state, noise_frame())
        assert result.status is TrackStatus.HOLDING
        assert result.matched_count == 0
        assert result.box is state.last_box
        assert not result.gate_passed and result.applied_scale == 1.0

    def test_hold_invariant_freezes_everything(self, cfg):
        frame, box = checker_frame()
        state = initialize(frame, box, cfg)
        step(state, Frame.from_rgb(frame.rgb, index=1))

        lts = [a.lt for a in state.model.anchors]
        sts = [a.st for a in state.model.anchors]
        constraints = [a.constraint.copy() for a in state.model.anchors]
        accumulator = state.scale.accumulator
        frames_since = state.scale.frames_since_apply
        refs = state.refs
        last_box = state.last_box
        anchors = list(state.model.anchors)

        result = step(state, noise_frame(index=2))
        assert result.status is TrackStatus.HOLDING
        assert state.last_box is last_box
        assert state.refs is refs
        assert state.scale.accumulator == accumulator
        assert state.scale.frames_since_apply == frames_since
        assert state.model.anchors == anchors
        for anchor, lt, st, constraint in zip(state.model.anchors, lts, sts, constraints):
            assert anchor.lt == lt and anchor.st == st
            np.testing.assert_array_equal(anchor.constraint, constraint)

    def test_anchor_set_shrinks_only_on_gate_pass(self, cfg):
        """Without a gate pass there is no addition and no pruning."""
        frame, box = checker_frame()
        state = initialize(frame, box, cfg)
        count = len(state.model.anchors)
        # A heavily gained frame still matches (descriptors are affine
        # invariant) but fails the binary-code gate.
        bright = np.clip(frame.rgb.astype(np.int64) * 2 + 40, 0, 255).astype(np.uint8)
        result = step(state, Frame.from_rgb(bright, index=1))
        assert result.matched_count > 0
        assert not result.gate_passed
        assert len(state.model.anchors) == count

    def test_references_never_change(self, cfg):
        frame, box = checker_frame()
        state = initialize(frame, box, cfg)
        codes = state.refs.lbsp_ref.codes.copy()
        bins = state.refs.hist_ref.bins.copy()
        for i in range(1, 6):
            step(state, translated(frame, i, 0, index=i))
        np.testing.assert_array_equal(state.refs.lbsp_ref.codes, codes)
        np.testing.assert_array_equal(state.refs.hist_ref.bins, bins)


class TestRunSequence:
    def test_single_frame_sequence(self, cfg):
        frame, box = checker_frame()
        results = run_sequence([frame], box, cfg)
        assert len(results) == 1
        assert results[0].box is box
        assert results[0].status is TrackStatus.TRACKING

    def test_empty_sequence_rejected(self, cfg):
        with pytest.raises(ValueError):
            run_sequence([], BoundingBox(center=np.zeros(2), width=1, height=1), cfg)

    def test_deterministic_repeat_runs(self, cfg):
        from anchortrack.bench import PRESETS, generate

        spec = dataclasses.replace(PRESETS["translation"](), translations=tuple(
            [(0.0, 0.0)] + [(2.0, 0.0)] * 29))
        spec = dataclasses.replace(spec, scales=spec.scales[:30],
                                   occluders=spec.occluders[:30], gains=spec.gains[:30])
        frames, gt = generate(spec)
        first = results_to_csv(run_sequence(frames, gt[0], cfg))
        second = results_to_csv(run_sequence(frames, gt[0], cfg))
        assert first == second

    def test_short_translation_sequence_stays_on_target(self, cfg):
        from anchortrack.bench import SynthSpec, generate
        from anchortrack.core import center_error

        n = 20
        spec = SynthSpec(
            frame_size=(160, 120), object_size=(40.0, 40.0), start_center=(40.0, 60.0),
            seed=3,
            translations=((0.0, 0.0),) + ((3.0, 0.0),) * (n - 1),
            scales=(1.0,) * n, occluders=(None,) * n, gains=(1.0,) * n,
            noise_sigma=1.0,
        )
        frames, gt = generate(spec)
        results = run_sequence(frames, gt[0], cfg)
        errors = [center_error(r.box, g) for r, g in zip(results, gt)]
        assert max(errors) <= 3.0
