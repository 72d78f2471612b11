"""Tests for benchmark sequence generation and CSV round-trips."""

import csv
import math

import numpy as np
import pytest

from convexmix.mixture import SignalSample
from convexmix.signals import (
    TRAJECTORY_COLUMNS,
    ParseError,
    SequenceSpec,
    TrajectoryFrame,
    clip_samples,
    generate,
    load_csv,
    read_trajectory,
    resolve,
    samples_from_frame,
    write_trajectory,
)


class TestResolve:
    def test_benchmark_caps(self):
        assert resolve(SequenceSpec("case1", n=10)).y_bound == 0.5
        assert resolve(SequenceSpec("case2", n=10)).y_bound == 0.54
        assert resolve(SequenceSpec("alternating", n=10)).y_bound == 1.0

    def test_amplitude_defaults_to_cap(self):
        spec = resolve(SequenceSpec("constant", n=5, y_bound=0.3))
        assert spec.amplitude == 0.3

    def test_square_wave_period_default(self):
        assert resolve(SequenceSpec("square_wave", n=5)).period == 100

    def test_switch_default_is_midpoint(self):
        assert resolve(SequenceSpec("piecewise_switch", n=9)).switch_at == 4

    def test_custom_file_allows_zero_horizon(self):
        spec = resolve(SequenceSpec("custom_file", path="x.csv"))
        assert spec.n == 0 and spec.y_bound == 1.0

    def test_errors(self):
        with pytest.raises(ValueError, match="unknown sequence kind"):
            resolve(SequenceSpec("sawtooth", n=5))
        with pytest.raises(ValueError, match="horizon"):
            resolve(SequenceSpec("case1", n=0))
        with pytest.raises(ValueError, match="amplitude"):
            resolve(SequenceSpec("alternating", n=5, y_bound=0.5, amplitude=0.7))
        with pytest.raises(ValueError, match="period"):
            resolve(SequenceSpec("square_wave", n=5, period=1))
        with pytest.raises(ValueError, match="switch step"):
            resolve(SequenceSpec("piecewise_switch", n=5, switch_at=6))
        with pytest.raises(ValueError, match="path"):
            resolve(SequenceSpec("custom_file"))
        with pytest.raises(ValueError, match="magnitude cap"):
            resolve(SequenceSpec("case1", n=5, y_bound=-1.0))


class TestGenerate:
    def test_first_benchmark_pattern(self):
        """Clean expert at the cap, second expert alternating, negative first."""
        got = generate(SequenceSpec("case1", n=4))
        assert got == [
            SignalSample(0.5, 0.5, -0.5),
            SignalSample(0.5, 0.5, 0.5),
            SignalSample(0.5, 0.5, -0.5),
            SignalSample(0.5, 0.5, 0.5),
        ]

    def test_second_benchmark_pattern(self):
        """Target pinned at 0.5 while expert 1 carries the 0.54 offset."""
        got = generate(SequenceSpec("case2", n=2))
        assert got == [SignalSample(0.5, 0.54, -0.5), SignalSample(0.5, 0.54, 0.5)]

    def test_second_benchmark_target_not_scaled(self):
        got = generate(SequenceSpec("case2", n=2, y_bound=0.6))
        assert got[0] == SignalSample(0.5, 0.6, -0.5)

    def test_second_benchmark_needs_room_for_target(self):
        with pytest.raises(ValueError, match="below the fixed target level"):
            generate(SequenceSpec("case2", n=2, y_bound=0.4))

    def test_constant_zero(self):
        got = generate(SequenceSpec("constant", n=3, amplitude=0.0))
        assert got == [SignalSample(0.0, 0.0, 0.0)] * 3

    def test_alternating_parity(self):
        got = generate(SequenceSpec("alternating", n=5, amplitude=0.2))
        signs = [s.yhat2 / 0.2 for s in got]
        assert signs == [-1.0, 1.0, -1.0, 1.0, -1.0]
        assert all(s.y == 0.2 and s.yhat1 == 0.2 for s in got)

    def test_square_wave_blocks(self):
        got = generate(SequenceSpec("square_wave", n=6, period=4, amplitude=1.0))
        assert [s.y for s in got] == [1.0, 1.0, -1.0, -1.0, 1.0, 1.0]
        assert all((s.yhat1, s.yhat2) == (1.0, -1.0) for s in got)

    def test_switch_swaps_expert_roles(self):
        got = generate(SequenceSpec("piecewise_switch", n=4, switch_at=2, amplitude=1.0))
        assert [(s.yhat1, s.yhat2) for s in got[:2]] == [(1.0, -1.0), (1.0, 1.0)]
        assert [(s.yhat1, s.yhat2) for s in got[2:]] == [(-1.0, 1.0), (1.0, 1.0)]
        assert all(s.y == 1.0 for s in got)


def _write_input_csv(path, rows, header=("y", "yhat1", "yhat2")):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


class TestLoadCsv:
    def test_plain_load(self, tmp_path):
        p = tmp_path / "seq.csv"
        _write_input_csv(p, [(0.1, 0.2, -0.3), (0.0, -1.0, 1.0)])
        samples, clipped = load_csv(str(p), 1.0)
        assert samples == [SignalSample(0.1, 0.2, -0.3), SignalSample(0.0, -1.0, 1.0)]
        assert clipped == 0

    def test_clipping_counts_fields(self):
        samples, clipped = clip_samples([SignalSample(0.7, 0.2, -0.1)], 0.5)
        assert samples == [SignalSample(0.5, 0.2, -0.1)]
        assert clipped == 1

    def test_clipping_from_file_both_signs(self, tmp_path):
        p = tmp_path / "seq.csv"
        _write_input_csv(p, [(0.7, -0.9, 0.1)])
        samples, clipped = load_csv(str(p), 0.5)
        assert samples == [SignalSample(0.5, -0.5, 0.1)]
        assert clipped == 2

    def test_accepts_trajectory_header(self, tmp_path):
        """A written run file can be replayed: the input echo columns feed back."""
        p = tmp_path / "traj.csv"
        frame = _tiny_frame()
        write_trajectory(frame, str(p))
        samples, clipped = load_csv(str(p), 1.0)
        assert samples == samples_from_frame(frame)
        assert clipped == 0

    def test_row_numbered_errors(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        with pytest.raises(ParseError, match="row 1: empty file"):
            load_csv(str(empty), 1.0)

        bad_header = tmp_path / "h.csv"
        bad_header.write_text("target,p1,p2\n0,0,0\n")
        with pytest.raises(ParseError, match="row 1: expected columns y,yhat1,yhat2"):
            load_csv(str(bad_header), 1.0)

        ragged = tmp_path / "r.csv"
        ragged.write_text("y,yhat1,yhat2\n0,0,0\n0,0\n")
        with pytest.raises(ParseError, match="row 3: expected 3 columns, found 2"):
            load_csv(str(ragged), 1.0)

        alpha = tmp_path / "a.csv"
        alpha.write_text("y,yhat1,yhat2\n0,zero,0\n")
        with pytest.raises(ParseError, match="row 2: non-numeric value 'zero'"):
            load_csv(str(alpha), 1.0)

        inf = tmp_path / "i.csv"
        inf.write_text("y,yhat1,yhat2\n0,inf,0\n")
        with pytest.raises(ParseError, match="row 2: non-finite value"):
            load_csv(str(inf), 1.0)

        headonly = tmp_path / "ho.csv"
        headonly.write_text("y,yhat1,yhat2\n")
        with pytest.raises(ParseError, match="row 2: no data rows"):
            load_csv(str(headonly), 1.0)

    def test_cap_validation(self, tmp_path):
        p = tmp_path / "seq.csv"
        _write_input_csv(p, [(0, 0, 0)])
        with pytest.raises(ValueError, match="magnitude cap"):
            load_csv(str(p), 0.0)


class TestCustomFileSequences:
    def test_truncates_and_warns_on_clip(self, tmp_path):
        p = tmp_path / "seq.csv"
        _write_input_csv(p, [(0.1, 0.2, 0.3), (2.0, 0.0, 0.0), (0.4, 0.4, 0.4)])
        with pytest.warns(UserWarning, match="clipped 1"):
            got = generate(SequenceSpec("custom_file", n=2, path=str(p)))
        assert got == [SignalSample(0.1, 0.2, 0.3), SignalSample(1.0, 0.0, 0.0)]

    def test_zero_horizon_takes_all_rows(self, tmp_path):
        p = tmp_path / "seq.csv"
        _write_input_csv(p, [(0.1, 0.1, 0.1)] * 5)
        assert len(generate(SequenceSpec("custom_file", path=str(p)))) == 5


def _tiny_frame() -> TrajectoryFrame:
    n = 3
    return TrajectoryFrame(
        t=np.arange(1, n + 1),
        y=np.array([1 / 3, -0.1, 5e-324]),
        yhat1=np.array([math.pi / 4, 0.0, 1e-17]),
        yhat2=np.array([-1.0, 0.54, 0.1 + 0.2]),
        lam=np.array([0.5, 0.502499979166875, 0.92]),
        rho=np.array([0.0, 0.01, 2.4423470353692044]),
        yhat=np.array([0.25, -0.05, 0.3]),
        e=np.array([1 / 3 - 0.25, -0.05, -0.3]),
        cum_loss=np.array([0.25, 0.5, 0.75]),
        best_beta_prefix=np.array([1.0, 0.9601181683899552, 0.5]),
        best_loss_prefix=np.array([0.0, 7.385524372234613, 1.0]),
        regret=np.array([0.25, 0.1, -0.2]),
        norm_regret=np.array([0.25, 0.05, -0.2 / 3]),
        bound_norm=np.array([152.0, 76.0, 152.0 / 3]),
        in_range=np.array([1, 1, 0]),
        projected=np.array([0, 1, 0]),
    )


class TestTrajectoryRoundTrip:
    def test_exact_roundtrip(self, tmp_path):
        """17 significant digits reproduce every double bit-for-bit."""
        p = tmp_path / "traj.csv"
        frame = _tiny_frame()
        write_trajectory(frame, str(p))
        back = read_trajectory(str(p))
        for name in TRAJECTORY_COLUMNS:
            np.testing.assert_array_equal(back.column(name), frame.column(name), err_msg=name)

    def test_header_row_order(self, tmp_path):
        p = tmp_path / "traj.csv"
        write_trajectory(_tiny_frame(), str(p))
        lines = p.read_text().splitlines()
        assert lines[0] == ",".join(TRAJECTORY_COLUMNS)
        assert len(lines) == 4
        assert lines[1].split(",")[0] == "1"

    def test_flags_written_as_integers(self, tmp_path):
        p = tmp_path / "traj.csv"
        write_trajectory(_tiny_frame(), str(p))
        row = p.read_text().splitlines()[1].split(",")
        assert row[-2] == "1" and row[-1] == "0"

    def test_refuses_empty(self, tmp_path):
        frame = _tiny_frame()
        empty = TrajectoryFrame(**{
            name: frame.column(col)[:0]
            for col, name in zip(
                TRAJECTORY_COLUMNS,
                [c if c != "lambda" else "lam" for c in TRAJECTORY_COLUMNS],
            )
        })
        with pytest.raises(ValueError, match="empty trajectory"):
            write_trajectory(empty, str(tmp_path / "x.csv"))

    def test_read_rejects_wrong_schema(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("t,y\n1,0\n")
        with pytest.raises(ParseError, match="row 1: expected the trajectory columns"):
            read_trajectory(str(p))

    def test_read_rejects_ragged_rows(self, tmp_path):
        p = tmp_path / "bad.csv"
        good = ",".join(TRAJECTORY_COLUMNS)
        p.write_text(good + "\n1,0,0\n")
        with pytest.raises(ParseError, match="row 2: expected 16 columns, found 3"):
            read_trajectory(str(p))

    def test_column_accessor(self):
        frame = _tiny_frame()
        assert frame.column("lambda") is frame.lam
        with pytest.raises(KeyError):
            frame.column("weights")
