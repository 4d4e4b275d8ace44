import numpy as np
import pytest

from tacbench.tacgen import (
    ORGANS,
    DatasetFormatError,
    FrameSchedule,
    SyntheticConfig,
    default_frame_schedule,
    generate_dataset,
    load_dataset,
    organ_template,
    save_dataset,
)


class TestFrameSchedule:
    def test_default_has_24_frames(self):
        sch = default_frame_schedule()
        assert sch.count == 24
        assert len(sch.durations) == 24
        assert len(sch.mid_times) == 24

    def test_durations_grid(self):
        sch = default_frame_schedule()
        assert list(sch.durations) == [5.0] * 14 + [10.0] * 3 + [20.0] * 3 + [30.0] * 4

    def test_cumulative_end_times(self):
        ends = default_frame_schedule().end_times
        assert ends[9] == 50.0  # frame 10
        assert ends[18] == 140.0  # frame 19
        assert ends[-1] == 280.0

    def test_mid_times_definition(self):
        sch = default_frame_schedule()
        cum = np.cumsum(sch.durations)
        expected = cum - np.asarray(sch.durations) / 2.0
        np.testing.assert_allclose(sch.mid_times, expected)
        assert np.all(np.diff(sch.mid_times) > 0)

    def test_invalid_durations_rejected(self):
        with pytest.raises(ValueError):
            FrameSchedule((5.0, 0.0))
        with pytest.raises(ValueError):
            FrameSchedule(())


class TestTemplates:
    def test_heart_peaks_before_kidney(self):
        times = default_frame_schedule().mid_times
        heart = organ_template("heart").evaluate(times)
        kidney = organ_template("kidney").evaluate(times)
        assert times[np.argmax(heart)] < times[np.argmax(kidney)]

    def test_bladder_monotone_nondecreasing(self):
        times = default_frame_schedule().mid_times
        bladder = organ_template("bladder").evaluate(times)
        assert np.all(np.diff(bladder) >= 0)

    def test_pairwise_distances_positive(self):
        times = default_frame_schedule().mid_times
        curves = [organ_template(o).evaluate(times) for o in ORGANS]
        for i in range(5):
            for j in range(i + 1, 5):
                assert np.linalg.norm(curves[i] - curves[j]) > 0

    def test_templates_nonnegative(self):
        times = default_frame_schedule().mid_times
        for organ in ORGANS:
            assert np.all(organ_template(organ).evaluate(times) >= 0)

    def test_unknown_organ(self):
        with pytest.raises(ValueError, match="unknown organ"):
            organ_template("spleen")


class TestGeneration:
    def test_counts_per_organ(self):
        cfg = SyntheticConfig(curves_per_organ=1000, seed=7)
        ds = generate_dataset(cfg, default_frame_schedule(), "p001")
        assert ds.curves.shape == (5000, 24)
        for organ in ORGANS:
            assert ds.labels.count(organ) == 1000

    def test_label_block_order(self):
        cfg = SyntheticConfig(curves_per_organ=3, seed=7)
        ds = generate_dataset(cfg, default_frame_schedule(), "p001")
        assert ds.labels == [o for o in ORGANS for _ in range(3)]

    def test_zero_noise_reproduces_templates(self):
        cfg = SyntheticConfig(curves_per_organ=4, noise_relative=0.0,
                              noise_floor=0.0, per_curve_jitter=0.0, seed=1)
        sch = default_frame_schedule()
        ds = generate_dataset(cfg, sch, "p001")
        for i, organ in enumerate(ORGANS):
            block = ds.curves[4 * i:4 * (i + 1)]
            tpl = organ_template(organ).evaluate(sch.mid_times)
            assert np.max(np.abs(block - tpl[None, :])) == 0.0

    def test_deterministic_given_inputs(self):
        cfg = SyntheticConfig(curves_per_organ=10, seed=5)
        sch = default_frame_schedule()
        a = generate_dataset(cfg, sch, "p002")
        b = generate_dataset(cfg, sch, "p002")
        assert np.array_equal(a.curves, b.curves)

    def test_different_seeds_differ(self):
        sch = default_frame_schedule()
        a = generate_dataset(SyntheticConfig(curves_per_organ=10, seed=5), sch, "p")
        b = generate_dataset(SyntheticConfig(curves_per_organ=10, seed=6), sch, "p")
        assert not np.array_equal(a.curves, b.curves)

    def test_different_patients_differ(self):
        cfg = SyntheticConfig(curves_per_organ=10, seed=5)
        sch = default_frame_schedule()
        a = generate_dataset(cfg, sch, "p001")
        b = generate_dataset(cfg, sch, "p002")
        assert not np.array_equal(a.curves, b.curves)

    def test_values_nonnegative_finite(self):
        ds = generate_dataset(SyntheticConfig(curves_per_organ=50, seed=3),
                              default_frame_schedule(), "p001")
        assert np.all(np.isfinite(ds.curves))
        assert np.all(ds.curves >= 0.0)

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            generate_dataset(SyntheticConfig(curves_per_organ=0),
                             default_frame_schedule(), "p")
        with pytest.raises(ValueError):
            generate_dataset(SyntheticConfig(noise_relative=-0.1),
                             default_frame_schedule(), "p")


class TestSaveLoad:
    def test_round_trip(self, tmp_path):
        ds = generate_dataset(SyntheticConfig(curves_per_organ=7, seed=2),
                              default_frame_schedule(), "p009")
        path = tmp_path / "p009.csv"
        save_dataset(ds, path)
        loaded = load_dataset(path)
        assert loaded.labels == ds.labels
        assert np.array_equal(loaded.curves, ds.curves)
        assert loaded.schedule.durations == ds.schedule.durations
        assert loaded.patient_id == "p009"

    def test_schedule_sidecar_format(self, tmp_path):
        import json

        ds = generate_dataset(SyntheticConfig(curves_per_organ=2, seed=2),
                              default_frame_schedule(), "p001")
        save_dataset(ds, tmp_path / "p001.csv")
        with (tmp_path / "p001.schedule.json").open() as fh:
            meta = json.load(fh)
        assert meta["unit"] == "s"
        assert meta["durations"] == list(ds.schedule.durations)

    def test_wrong_column_count(self, tmp_path):
        ds = generate_dataset(SyntheticConfig(curves_per_organ=2, seed=2),
                              default_frame_schedule(), "p001")
        path = tmp_path / "p001.csv"
        save_dataset(ds, path)
        lines = path.read_text().splitlines()
        lines[1] = ",".join(lines[1].split(",")[:-1])  # drop one activity column
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(DatasetFormatError, match="line 2"):
            load_dataset(path)

    def test_unknown_label(self, tmp_path):
        ds = generate_dataset(SyntheticConfig(curves_per_organ=2, seed=2),
                              default_frame_schedule(), "p001")
        path = tmp_path / "p001.csv"
        save_dataset(ds, path)
        text = path.read_text().replace("brain", "liver")
        path.write_text(text)
        with pytest.raises(DatasetFormatError, match="unknown label"):
            load_dataset(path)

    def test_non_numeric_value(self, tmp_path):
        ds = generate_dataset(SyntheticConfig(curves_per_organ=2, seed=2),
                              default_frame_schedule(), "p001")
        path = tmp_path / "p001.csv"
        save_dataset(ds, path)
        lines = path.read_text().splitlines()
        parts = lines[3].split(",")
        parts[5] = "abc"
        lines[3] = ",".join(parts)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(DatasetFormatError, match="line 4.*non-numeric"):
            load_dataset(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(DatasetFormatError, match="no header"):
            load_dataset(path)

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("id,organ,f00\n")
        with pytest.raises(DatasetFormatError, match="malformed header"):
            load_dataset(path)
