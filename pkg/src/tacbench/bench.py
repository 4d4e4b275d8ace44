"""Benchmark orchestration: dataset generation, the method x patient run
matrix, and Table-shaped reports (Markdown + CSV + figures)."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from tacbench import evaluate, stats
from tacbench.cluster import METHOD_IDS, MethodError, MethodSpec, run_method
from tacbench.tacgen import (
    ORGANS,
    SyntheticConfig,
    TacDataset,
    default_frame_schedule,
    generate_dataset,
    load_dataset,
    save_dataset,
)

RUN_FIELDS = (
    ["patient_id", "method", "status", "error", "k_found_raw", "accuracy"]
    + [f"precision_{o}" for o in ORGANS]
    + [f"recall_{o}" for o in ORGANS]
    + ["reduce_seconds", "fit_seconds"]  # timing columns stay last
)
TIMING_FIELDS = ("reduce_seconds", "fit_seconds")


@dataclass
class BenchConfig:
    methods: tuple = METHOD_IDS
    patients: int = 30
    seed: int = 0
    curves_per_organ: int = 1000
    output_dir: Path = Path("bench-out")
    standardize: bool = False
    parallel: bool = False
    ref_method: str = "GMM"
    overrides: dict = field(default_factory=dict)  # method -> {param: value}

    def __post_init__(self):
        if self.patients < 1:
            raise ValueError("patients must be >= 1")
        if not self.methods:
            raise ValueError("methods must be nonempty")
        unknown = [m for m in self.methods if m not in METHOD_IDS]
        if unknown:
            raise ValueError(f"unknown methods: {unknown}")
        self.output_dir = Path(self.output_dir)

    def patient_ids(self):
        return [f"p{i:03d}" for i in range(1, self.patients + 1)]

    def synthetic_config(self, patient_index: int) -> SyntheticConfig:
        # per-patient seeds derived deterministically from the master seed
        derived = int(np.random.SeedSequence(
            [self.seed, patient_index]).generate_state(1)[0])
        return SyntheticConfig(curves_per_organ=self.curves_per_organ,
                               seed=derived)

    def method_spec(self, method_id: str, patient_index: int) -> MethodSpec:
        derived = int(np.random.SeedSequence(
            [self.seed, patient_index, METHOD_IDS.index(method_id)]
        ).generate_state(1)[0])
        k = 5 if method_id in ("KMeans", "MBK", "PcaKMeans", "PcaMBK",
                               "IcaKMeans", "IcaMBK", "GMM", "AC",
                               "Spectral", "Birch", "FCM") else None
        return MethodSpec(method_id, k=k,
                          hyperparameters=dict(self.overrides.get(method_id, {})),
                          seed=derived)


@dataclass
class RunRecord:
    patient_id: str
    method: str
    status: str = "ok"  # "ok" | "failed"
    error: str = ""
    k_found_raw: int = 0
    accuracy: float = math.nan
    precision: dict = field(default_factory=dict)
    recall: dict = field(default_factory=dict)
    reduce_seconds: float | None = None
    fit_seconds: float = math.nan

    def row(self) -> dict:
        row = {
            "patient_id": self.patient_id,
            "method": self.method,
            "status": self.status,
            "error": self.error,
            "k_found_raw": self.k_found_raw,
            "accuracy": repr(float(self.accuracy)) if self.status == "ok" else "",
            "reduce_seconds": ("" if self.reduce_seconds is None
                               else repr(float(self.reduce_seconds))),
            "fit_seconds": ("" if math.isnan(self.fit_seconds)
                            else repr(float(self.fit_seconds))),
        }
        for organ in ORGANS:
            row[f"precision_{organ}"] = (repr(float(self.precision[organ]))
                                         if self.precision else "")
            row[f"recall_{organ}"] = (repr(float(self.recall[organ]))
                                      if self.recall else "")
        return row


def cmd_generate(config: BenchConfig) -> dict:
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    schedule = default_frame_schedule()
    manifest = {"seed": config.seed, "patients": []}
    for i, pid in enumerate(config.patient_ids()):
        syn = config.synthetic_config(i)
        ds = generate_dataset(syn, schedule, pid)
        path = out / f"{pid}.csv"
        save_dataset(ds, path)
        manifest["patients"].append(
            {"patient_id": pid, "file": path.name, "seed": syn.seed})
    with (out / "manifest.json").open("w") as fh:
        json.dump(manifest, fh, indent=2)
    return manifest


def _load_patients(config: BenchConfig) -> list[tuple[str, TacDataset]]:
    out = config.output_dir
    manifest_path = out / "manifest.json"
    if not manifest_path.exists():
        raise FileNotFoundError(f"no manifest at {manifest_path}; run generate first")
    with manifest_path.open() as fh:
        manifest = json.load(fh)
    datasets = []
    for entry in manifest["patients"]:
        path = out / entry["file"]
        if not path.exists():
            raise FileNotFoundError(f"missing dataset file {path}")
        datasets.append((entry["patient_id"], load_dataset(path)))
    return datasets


def _run_one(config: BenchConfig, pid: str, patient_index: int,
             method_id: str, ds: TacDataset) -> RunRecord:
    spec = config.method_spec(method_id, patient_index)
    try:
        assignment = run_method(spec, ds.curves, standardize=config.standardize)
    except MethodError as exc:
        return RunRecord(pid, method_id, status="failed", error=str(exc))
    canonical = evaluate.canonicalize(assignment)
    report = evaluate.best_matching(canonical, ds.labels)
    return RunRecord(
        patient_id=pid, method=method_id,
        k_found_raw=assignment.k_found,
        accuracy=report.accuracy,
        precision={o: report.per_organ[o]["precision"] for o in ORGANS},
        recall={o: report.per_organ[o]["recall"] for o in ORGANS},
        reduce_seconds=assignment.reduce_seconds,
        fit_seconds=assignment.fit_seconds,
    )


def cmd_run(config: BenchConfig, runs_path: Path | None = None) -> list[RunRecord]:
    patients = _load_patients(config)
    if len(patients) < config.patients:
        raise FileNotFoundError("fewer datasets than configured patients")
    patients = patients[: config.patients]

    tasks = [(i, pid, m) for i, (pid, _) in enumerate(patients)
             for m in config.methods]
    records: list[RunRecord] = []
    if config.parallel:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor() as pool:
            futures = [pool.submit(_run_one, config, pid, i, m, patients[i][1])
                       for i, pid, m in tasks]
            records = [f.result() for f in futures]
    else:
        for i, pid, m in tasks:
            records.append(_run_one(config, pid, i, m, patients[i][1]))

    if runs_path is None:
        runs_path = config.output_dir / "runs.csv"
    write_records(records, runs_path)
    return records


def write_records(records, path: Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RUN_FIELDS)
        writer.writeheader()
        for rec in records:
            writer.writerow(rec.row())


def read_records(path) -> list[RunRecord]:
    path = Path(path)
    records = []
    with path.open(newline="") as fh:
        for row in csv.DictReader(fh):
            rec = RunRecord(
                patient_id=row["patient_id"], method=row["method"],
                status=row["status"], error=row["error"],
                k_found_raw=int(row["k_found_raw"] or 0),
                accuracy=float(row["accuracy"]) if row["accuracy"] else math.nan,
                reduce_seconds=(float(row["reduce_seconds"])
                                if row["reduce_seconds"] else None),
                fit_seconds=(float(row["fit_seconds"])
                             if row["fit_seconds"] else math.nan),
            )
            if row["status"] == "ok":
                rec.precision = {o: float(row[f"precision_{o}"]) for o in ORGANS}
                rec.recall = {o: float(row[f"recall_{o}"]) for o in ORGANS}
            records.append(rec)
    return records


def _ok_by_method(records):
    by_method: dict[str, list[RunRecord]] = {}
    for rec in records:
        if rec.status == "ok":
            by_method.setdefault(rec.method, []).append(rec)
    return by_method


def _fmt_pct(value: float, bold_at: float = 75.0) -> str:
    pct = 100.0 * value
    text = f"{pct:.1f}"
    return f"**{text}**" if pct >= bold_at else text


def medians_table(records) -> tuple[list[dict], str]:
    """Per-method medians of accuracy and per-organ precision/recall."""
    by_method = _ok_by_method(records)
    failed = [r for r in records if r.status != "ok"]
    rows = []
    for method in [m for m in METHOD_IDS if m in by_method]:
        recs = by_method[method]
        row = {"method": method,
               "accuracy": float(np.median([r.accuracy for r in recs]))}
        for organ in ORGANS:
            row[f"precision_{organ}"] = float(
                np.median([r.precision[organ] for r in recs]))
            row[f"recall_{organ}"] = float(
                np.median([r.recall[organ] for r in recs]))
        rows.append(row)

    header = (["Method", "Accuracy"]
              + [f"P {o}" for o in ORGANS] + [f"R {o}" for o in ORGANS])
    lines = ["| " + " | ".join(header) + " |",
             "|" + "---|" * len(header)]
    for row in rows:
        cells = [row["method"], _fmt_pct(row["accuracy"])]
        cells += [_fmt_pct(row[f"precision_{o}"]) for o in ORGANS]
        cells += [_fmt_pct(row[f"recall_{o}"]) for o in ORGANS]
        lines.append("| " + " | ".join(cells) + " |")
    if failed:
        lines.append("")
        lines.append(f"Excluded {len(failed)} failed run(s) from the medians.")
    return rows, "\n".join(lines) + "\n"


def _paired_accuracies(by_method, a: str, b: str):
    ra = {r.patient_id: r.accuracy for r in by_method[a]}
    rb = {r.patient_id: r.accuracy for r in by_method[b]}
    common = sorted(set(ra) & set(rb))
    return [ra[p] for p in common], [rb[p] for p in common]


def significance_matrix(records) -> tuple[list[dict], str, int]:
    """Pairwise Wilcoxon tests on accuracy with Bonferroni stars."""
    by_method = _ok_by_method(records)
    methods = [m for m in METHOD_IDS if m in by_method]
    m_tests = len(methods) * (len(methods) - 1) // 2
    cells = []
    matrix = {a: {} for a in methods}
    for a, b in combinations(methods, 2):
        xs, ys = _paired_accuracies(by_method, a, b)
        if len(xs) < 1:
            continue
        result = stats.wilcoxon_signed_rank(xs, ys)
        star = stats.bonferroni_star(result.p_value, max(m_tests, 1))
        cells.append({"method_a": a, "method_b": b,
                      "p_value": result.p_value,
                      "direction": result.direction,
                      "stars": star.level})
        if star.level > 0:
            arrow = ("↑" if result.direction == "first-higher"
                     else "↓" if result.direction == "second-higher" else "")
            matrix[a][b] = f"{star.symbol} {arrow}".strip()
            inverse = ("↓" if arrow == "↑" else "↑" if arrow == "↓" else "")
            matrix[b][a] = f"{star.symbol} {inverse}".strip()

    header = ["Method"] + methods
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for a in methods:
        row = [a] + [("" if a == b else matrix[a].get(b, "")) for b in methods]
        lines.append("| " + " | ".join(row) + " |")
    lines.append("")
    lines.append(f"Wilcoxon signed-rank on paired accuracies; "
                 f"Bonferroni m = {m_tests}.")
    return cells, "\n".join(lines) + "\n", m_tests


def timing_table(records, ref_method: str = "GMM") -> tuple[list[dict], str, int]:
    """Mean fit times with t-tests against a reference method."""
    by_method = _ok_by_method(records)
    methods = [m for m in METHOD_IDS if m in by_method]
    m_tests = max(len(methods) - 1, 1)

    def total_times(method):
        return [(r.reduce_seconds or 0.0) + r.fit_seconds
                for r in by_method[method]]

    rows = []
    ref_times = total_times(ref_method) if ref_method in by_method else None
    for method in methods:
        recs = by_method[method]
        mean_fit = float(np.mean([r.fit_seconds for r in recs]))
        reduces = [r.reduce_seconds for r in recs if r.reduce_seconds is not None]
        mean_reduce = float(np.mean(reduces)) if reduces else None
        if mean_reduce is not None:
            shown = f"{mean_reduce:.3f}+{mean_fit:.3f}"
        else:
            shown = f"{mean_fit:.3f}"
        row = {"method": method, "mean_fit_seconds": mean_fit,
               "mean_reduce_seconds": mean_reduce, "display": shown,
               "p_value": math.nan, "stars": 0, "direction": ""}
        if ref_times is not None and method != ref_method and len(recs) >= 2:
            result = stats.two_sample_ttest(total_times(method), ref_times)
            star = stats.bonferroni_star(result.p_value, m_tests)
            row["p_value"] = result.p_value
            row["stars"] = star.level
            row["direction"] = result.direction
            if star.level > 0:
                arrow = "↓" if result.direction == "second-higher" else "↑"
                row["display"] += f" {star.symbol} {arrow}"
        rows.append(row)

    lines = ["| Method | Mean seconds |", "|---|---|"]
    for row in rows:
        lines.append(f"| {row['method']} | {row['display']} |")
    lines.append("")
    lines.append(f"t-tests vs {ref_method}; Bonferroni m = {m_tests}. "
                 "Reduce+cluster times shown split for the projection pipelines.")
    return rows, "\n".join(lines) + "\n", m_tests


def cmd_report(config: BenchConfig, records=None) -> dict:
    out = config.output_dir
    if records is None:
        records = read_records(out / "runs.csv")
    if not records:
        raise ValueError("no run records to report on")
    out.mkdir(parents=True, exist_ok=True)

    median_rows, medians_md = medians_table(records)
    sig_cells, sig_md, m_acc = significance_matrix(records)
    timing_rows, timing_md, m_time = timing_table(records, config.ref_method)

    (out / "report_medians.md").write_text(medians_md)
    (out / "report_significance.md").write_text(sig_md)
    (out / "report_timing.md").write_text(timing_md)

    with (out / "medians.csv").open("w", newline="") as fh:
        fields = (["method", "accuracy"]
                  + [f"precision_{o}" for o in ORGANS]
                  + [f"recall_{o}" for o in ORGANS])
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in median_rows:
            writer.writerow({k: row[k] for k in fields})
    with (out / "significance.csv").open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["method_a", "method_b",
                                                "p_value", "direction", "stars"])
        writer.writeheader()
        writer.writerows(sig_cells)
    with (out / "timing.csv").open("w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["method", "mean_reduce_seconds", "mean_fit_seconds",
                            "p_value", "direction", "stars"])
        writer.writeheader()
        for row in timing_rows:
            writer.writerow({k: row[k] for k in writer.fieldnames})

    from tacbench import plots

    figures = plots.render_report_figures(records, median_rows, timing_rows, out)
    return {"medians": median_rows, "significance": sig_cells,
            "timing": timing_rows, "m_accuracy": m_acc, "m_timing": m_time,
            "figures": figures}


def cmd_stats(records, method_a: str, method_b: str, m: int = 1) -> dict:
    by_method = _ok_by_method(records)
    for method in (method_a, method_b):
        if method not in by_method:
            raise ValueError(f"no successful records for method {method!r}")
    pa = sorted(r.patient_id for r in by_method[method_a])
    pb = sorted(r.patient_id for r in by_method[method_b])
    if pa != pb:
        raise ValueError("patient sets differ between the two methods")
    order = pa
    acc_a = {r.patient_id: r.accuracy for r in by_method[method_a]}
    acc_b = {r.patient_id: r.accuracy for r in by_method[method_b]}
    time_a = {r.patient_id: (r.reduce_seconds or 0.0) + r.fit_seconds
              for r in by_method[method_a]}
    time_b = {r.patient_id: (r.reduce_seconds or 0.0) + r.fit_seconds
              for r in by_method[method_b]}
    xs = [acc_a[p] for p in order]
    ys = [acc_b[p] for p in order]
    results = {
        "wilcoxon_accuracy": stats.wilcoxon_signed_rank(xs, ys),
        "ftest_accuracy": stats.f_test_variance_equality(xs, ys),
        "ttest_timing": stats.two_sample_ttest(
            [time_a[p] for p in order], [time_b[p] for p in order]),
    }
    return {name: {"result": res,
                   "stars": stats.bonferroni_star(res.p_value, m)}
            for name, res in results.items()}
