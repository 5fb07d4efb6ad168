import json
import shutil
import subprocess
import sys

import pytest

from plotkit import cli
from plotkit.render import JobError, plot


def write(path, text):
    path.write_text(text)
    return path


REGION_CSV = "x,y\n0.2,0.9\n0.5,0.7\n0.8,0.3\n"
SWEEP_CSV = (
    "rhat,success_rate,ci_lo,ci_hi\n"
    "0.3,0,0,0.05\n"
    "0.5,0.4,0.3,0.5\n"
    "0.7,1,0.95,1\n"
)


def region_job(tmp_path, inputs, **extra):
    job = {
        "version": 1,
        "kind": "region2d",
        "inputs": inputs,
        "output": "out.png",
    }
    job.update(extra)
    return job


class TestRender:
    def test_region_overlay_identical_inputs_share_hash(self, tmp_path):
        write(tmp_path / "a.csv", REGION_CSV)
        write(tmp_path / "b.csv", REGION_CSV)
        job = region_job(tmp_path, [
            {"path": "a.csv", "label": "left"},
            {"path": "b.csv", "label": "right"},
        ])
        meta = plot(job, tmp_path)
        assert (tmp_path / "out.png").exists()
        assert len(meta["curves"]) == 2
        assert meta["curves"][0]["hash"] == meta["curves"][1]["hash"]

    def test_sweep_threshold_recorded(self, tmp_path):
        write(tmp_path / "sweep.csv", SWEEP_CSV)
        job = {
            "version": 1, "kind": "sweep",
            "inputs": [{"path": "sweep.csv", "label": "covering"}],
            "output": "sweep.png", "threshold": 0.49981,
        }
        meta = plot(job, tmp_path)
        assert meta["threshold"] == 0.49981
        assert meta["curves"][0]["points"] == 3
        assert (tmp_path / "sweep.png").exists()

    def test_metadata_deterministic(self, tmp_path):
        write(tmp_path / "sweep.csv", SWEEP_CSV)
        job = {
            "version": 1, "kind": "sweep",
            "inputs": [{"path": "sweep.csv"}],
            "output": "sweep.png", "threshold": 0.5,
        }
        plot(job, tmp_path)
        first = (tmp_path / "sweep.png.meta.json").read_bytes()
        plot(job, tmp_path)
        assert (tmp_path / "sweep.png.meta.json").read_bytes() == first


class TestRefusals:
    def refuse(self, tmp_path, job):
        with pytest.raises(JobError):
            plot(job, tmp_path)
        assert not (tmp_path / job.get("output", "out.png")).exists()

    def test_empty_csv(self, tmp_path):
        write(tmp_path / "a.csv", "x,y\n")
        self.refuse(tmp_path, region_job(tmp_path, [{"path": "a.csv"}]))

    def test_wrong_header(self, tmp_path):
        write(tmp_path / "a.csv", "u,v\n1,2\n")
        self.refuse(tmp_path, region_job(tmp_path, [{"path": "a.csv"}]))

    def test_missing_file(self, tmp_path):
        self.refuse(tmp_path, region_job(tmp_path, [{"path": "nope.csv"}]))

    def test_ragged_row(self, tmp_path):
        write(tmp_path / "a.csv", "x,y\n1,2\n3\n")
        self.refuse(tmp_path, region_job(tmp_path, [{"path": "a.csv"}]))

    def test_non_numeric(self, tmp_path):
        write(tmp_path / "a.csv", "x,y\n1,two\n")
        self.refuse(tmp_path, region_job(tmp_path, [{"path": "a.csv"}]))

    def test_unknown_field(self, tmp_path):
        write(tmp_path / "a.csv", REGION_CSV)
        self.refuse(
            tmp_path, region_job(tmp_path, [{"path": "a.csv"}], surprise=1)
        )

    def test_region_with_threshold(self, tmp_path):
        write(tmp_path / "a.csv", REGION_CSV)
        self.refuse(
            tmp_path, region_job(tmp_path, [{"path": "a.csv"}], threshold=0.5)
        )

    def test_sweep_needs_single_input(self, tmp_path):
        write(tmp_path / "a.csv", SWEEP_CSV)
        write(tmp_path / "b.csv", SWEEP_CSV)
        job = {
            "version": 1, "kind": "sweep",
            "inputs": [{"path": "a.csv"}, {"path": "b.csv"}],
            "output": "out.png",
        }
        self.refuse(tmp_path, job)


class TestCli:
    def test_success_exit_zero(self, tmp_path):
        write(tmp_path / "a.csv", REGION_CSV)
        job_path = tmp_path / "job.json"
        job_path.write_text(json.dumps(region_job(tmp_path, [{"path": "a.csv"}])))
        assert cli.main([str(job_path)]) == 0
        assert (tmp_path / "out.png").exists()

    def test_bad_job_exit_two(self, tmp_path):
        job_path = write(tmp_path / "job.json", "{broken")
        assert cli.main([str(job_path)]) == 2

    def test_missing_job_exit_two(self, tmp_path):
        assert cli.main([str(tmp_path / "absent.json")]) == 2

    def test_refusal_exit_two(self, tmp_path):
        write(tmp_path / "a.csv", "x,y\n")
        job_path = tmp_path / "job.json"
        job_path.write_text(json.dumps(region_job(tmp_path, [{"path": "a.csv"}])))
        assert cli.main([str(job_path)]) == 2
        assert not (tmp_path / "out.png").exists()

    def test_console_script(self, tmp_path):
        write(tmp_path / "a.csv", REGION_CSV)
        job_path = tmp_path / "job.json"
        job_path.write_text(json.dumps(region_job(tmp_path, [{"path": "a.csv"}])))
        proc = subprocess.run(
            [sys.executable, "-m", "plotkit.cli", str(job_path)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr


@pytest.mark.skipif(shutil.which("supbin") is None, reason="producer CLI not installed")
class TestAcceptanceA10:
    """Render real producer output: the covering sweep and the
    interference-region overlay, checking coincidence and determinism."""

    def run_producer(self, cfg, out_dir):
        cfg_path = out_dir.parent / (out_dir.name + ".json")
        cfg_path.write_text(json.dumps(cfg))
        proc = subprocess.run(
            ["supbin", "run", str(cfg_path), "--out", str(out_dir)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr

    def test_a10_sweep_and_overlay(self, tmp_path):
        # covering sweep around the annotated threshold
        self.run_producer({
            "version": 1, "kind": "sim-covering", "seed": 77,
            "p1": {"cardinalities": [2], "mass": [0.11, 0.89]},
            "q2": {"cardinalities": [2], "mass": [0.5, 0.5]},
            "n": 500, "epsilon": 0.05, "trials": 200,
            "rhat_grid": [0.3, 0.45, 0.49981, 0.55, 0.7],
        }, tmp_path / "sweep")
        sweep_job = {
            "version": 1, "kind": "sweep",
            "inputs": [{"path": "sweep/sweep.csv", "label": "covering"}],
            "output": "sweep.png", "threshold": 0.49981,
            "title": "covering success vs bin rate",
        }
        meta1 = plot(sweep_job, tmp_path)
        assert meta1["threshold"] == 0.49981
        assert meta1["curves"][0]["points"] == 5

        # two derivations of one interference region must overlay exactly
        import numpy as np

        rng = np.random.default_rng([23, 0])
        pw1 = rng.random((2, 2)) + 0.05
        pw1 /= pw1.sum()
        pw2 = rng.random((2, 2)) + 0.05
        pw2 /= pw2.sum()
        pe4 = np.einsum("ab,cd->abcd", pw1, pw2)
        kern = rng.random((16, 2, 2)) + 0.05
        kern /= kern.sum(axis=(1, 2), keepdims=True)
        for scheme in ("ifc", "hk"):
            self.run_producer({
                "version": 1, "kind": "region-boundary", "seed": 0,
                "source": {"scheme": scheme, "split": {"alpha": "1/2"}},
                "pe": {"cardinalities": [2, 2, 2, 2], "mass": pe4.tolist()},
                "pc": {"cardinalities": [2, 2, 2, 2], "mass": pe4.tolist()},
                "channel": kern.tolist(),
                "input_map": np.arange(16).reshape(2, 2, 2, 2).tolist(),
                "axes": ["Rp1", "Rp2"],
                "directions": 720,
            }, tmp_path / scheme)
        overlay_job = {
            "version": 1, "kind": "region2d",
            "inputs": [
                {"path": "ifc/boundary.csv", "label": "binned pair region"},
                {"path": "hk/boundary.csv", "label": "compact fixture"},
            ],
            "output": "overlay.png",
        }
        meta2 = plot(overlay_job, tmp_path)
        a = [r.split(",") for r in (tmp_path / "ifc/boundary.csv").read_text().splitlines()[1:]]
        b = [r.split(",") for r in (tmp_path / "hk/boundary.csv").read_text().splitlines()[1:]]
        assert len(a) == len(b) >= 1
        for ra, rb in zip(a, b):
            assert abs(float(ra[0]) - float(rb[0])) < 1e-6
            assert abs(float(ra[1]) - float(rb[1])) < 1e-6

        # deterministic metadata across two runs of each job
        m1 = (tmp_path / "sweep.png.meta.json").read_bytes()
        m2 = (tmp_path / "overlay.png.meta.json").read_bytes()
        plot(sweep_job, tmp_path)
        plot(overlay_job, tmp_path)
        assert (tmp_path / "sweep.png.meta.json").read_bytes() == m1
        assert (tmp_path / "overlay.png.meta.json").read_bytes() == m2
        print("A10: PASS")
