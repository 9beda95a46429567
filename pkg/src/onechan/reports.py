"""Deterministic report rendering (CSV + Markdown).

CSV cells carry full float precision (repr round-trip); Markdown tables
round to 2 decimals for reading. Rendering the same run directory twice
yields byte-identical files, so reports are safe to diff and archive.
Every file embeds the config hash, master seed, and software version.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .classify import CvReport
    from .pipeline import RunConfig


def _fmt_full(value: float) -> str:
    return repr(float(value))


def _fmt_2dp(value: float) -> str:
    return f"{float(value):.2f}"


def _provenance_line(prov: dict, comment: str) -> str:
    return (
        f"{comment} config_hash={prov['config_hash']} "
        f"seed={prov['seed']} version={prov['version']}"
    )


def _md_table(header: list[str], rows: list[list[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |"]
    lines.append("|" + "|".join(" --- " for _ in header) + "|")
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines)


def summary_rows(reports: "list[CvReport]") -> list[dict]:
    """Flatten reports into sortable summary rows."""
    rows = []
    for rep in reports:
        best = rep.per_n[rep.best_n]
        rows.append(
            {
                "subject_id": rep.subject_id,
                "accuracy_pct": best["mean_pct"],
                "std_pct": best["std_pct"],
                "selected_channel": rep.selected_channel,
                "best_n": rep.best_n,
            }
        )
    return sorted(rows, key=lambda r: r["subject_id"])


def render_summary_csv(rows: list[dict], prov: dict) -> str:
    lines = [_provenance_line(prov, "#")]
    lines.append("subject_id,accuracy_pct,std_pct,selected_channel,best_n")
    for row in rows:
        lines.append(
            f"{row['subject_id']},{_fmt_full(row['accuracy_pct'])},"
            f"{_fmt_full(row['std_pct'])},{row['selected_channel']},{row['best_n']}"
        )
    if rows:
        mean_acc = sum(r["accuracy_pct"] for r in rows) / len(rows)
        mean_std = sum(r["std_pct"] for r in rows) / len(rows)
        lines.append(f"Average,{_fmt_full(mean_acc)},{_fmt_full(mean_std)},,")
    return "\n".join(lines) + "\n"


def render_summary_md(rows: list[dict], prov: dict) -> str:
    body = [
        [
            r["subject_id"],
            _fmt_2dp(r["accuracy_pct"]),
            _fmt_2dp(r["std_pct"]),
            r["selected_channel"],
            str(r["best_n"]),
        ]
        for r in rows
    ]
    if rows:
        mean_acc = sum(r["accuracy_pct"] for r in rows) / len(rows)
        mean_std = sum(r["std_pct"] for r in rows) / len(rows)
        body.append(["Average", _fmt_2dp(mean_acc), _fmt_2dp(mean_std), "", ""])
    table = _md_table(
        ["Subject", "Accuracy (%)", "Std (%)", "Channel", "n"], body
    )
    return (
        "# Run summary\n\n"
        + table
        + "\n\n"
        + _provenance_line(prov, ">")
        + "\n"
    )


def render_pairs_csv(
    pair_names: list[str], cells: dict[str, dict[str, float]], prov: dict
) -> str:
    subjects = sorted({s for col in cells.values() for s in col})
    lines = [_provenance_line(prov, "#")]
    lines.append("subject_id," + ",".join(pair_names))
    for subject in subjects:
        vals = []
        for name in pair_names:
            v = cells.get(name, {}).get(subject)
            vals.append("" if v is None else _fmt_full(v))
        lines.append(f"{subject}," + ",".join(vals))
    averages = []
    for name in pair_names:
        col = cells.get(name, {})
        averages.append(
            _fmt_full(sum(col.values()) / len(col)) if col else ""
        )
    lines.append("Average," + ",".join(averages))
    return "\n".join(lines) + "\n"


def render_pairs_md(
    pair_names: list[str], cells: dict[str, dict[str, float]], prov: dict
) -> str:
    subjects = sorted({s for col in cells.values() for s in col})
    body = []
    for subject in subjects:
        row = [subject]
        for name in pair_names:
            v = cells.get(name, {}).get(subject)
            row.append("-" if v is None else _fmt_2dp(v))
        body.append(row)
    avg = ["Average"]
    for name in pair_names:
        col = cells.get(name, {})
        avg.append(_fmt_2dp(sum(col.values()) / len(col)) if col else "-")
    body.append(avg)
    table = _md_table(["Subject"] + pair_names, body)
    return (
        "# Pairwise accuracy (%)\n\n"
        + table
        + "\n\n"
        + _provenance_line(prov, ">")
        + "\n"
    )


def render_baseline_csv(rows: list[dict], prov: dict) -> str:
    lines = [_provenance_line(prov, "#")]
    lines.append("subject_id,accuracy_pct,std_pct")
    for row in rows:
        lines.append(
            f"{row['subject_id']},{_fmt_full(row['mean_pct'])},"
            f"{_fmt_full(row['std_pct'])}"
        )
    if rows:
        mean_acc = sum(r["mean_pct"] for r in rows) / len(rows)
        mean_std = sum(r["std_pct"] for r in rows) / len(rows)
        lines.append(f"Average,{_fmt_full(mean_acc)},{_fmt_full(mean_std)}")
    return "\n".join(lines) + "\n"


def render_baseline_md(rows: list[dict], prov: dict) -> str:
    body = [
        [r["subject_id"], _fmt_2dp(r["mean_pct"]), _fmt_2dp(r["std_pct"])]
        for r in rows
    ]
    if rows:
        mean_acc = sum(r["mean_pct"] for r in rows) / len(rows)
        mean_std = sum(r["std_pct"] for r in rows) / len(rows)
        body.append(["Average", _fmt_2dp(mean_acc), _fmt_2dp(mean_std)])
    table = _md_table(["Subject", "Accuracy (%)", "Std (%)"], body)
    return (
        "# ERD baseline summary\n\n"
        + table
        + "\n\n"
        + _provenance_line(prov, ">")
        + "\n"
    )


def _prov_from_cfg(cfg: "RunConfig") -> dict:
    from .pipeline import _provenance

    return _provenance(cfg)


def _write_failures(out: Path, failures: list[str]) -> None:
    if failures:
        (out / "errors.json").write_text(
            json.dumps({"failures": failures}, indent=2) + "\n"
        )


def write_run_outputs(
    out: Path, cfg: "RunConfig", reports: "list[CvReport]", failures: list[str]
) -> None:
    out.mkdir(parents=True, exist_ok=True)
    prov = _prov_from_cfg(cfg)
    rows = summary_rows(reports)
    (out / "summary.csv").write_text(render_summary_csv(rows, prov))
    (out / "summary.md").write_text(render_summary_md(rows, prov))
    _write_failures(out, failures)


def write_pairs_outputs(
    out: Path,
    cfg: "RunConfig",
    by_pair: "dict[str, list[CvReport]]",
    failures: list[str],
) -> None:
    out.mkdir(parents=True, exist_ok=True)
    prov = _prov_from_cfg(cfg)
    pair_names = list(by_pair)
    cells = {
        name: {
            rep.subject_id: rep.per_n[rep.best_n]["mean_pct"]
            for rep in reports
        }
        for name, reports in by_pair.items()
    }
    (out / "pairs.csv").write_text(render_pairs_csv(pair_names, cells, prov))
    (out / "pairs.md").write_text(render_pairs_md(pair_names, cells, prov))
    index = dict(prov)
    index["pairs"] = pair_names
    pairs_dir = out / "pairs"
    pairs_dir.mkdir(parents=True, exist_ok=True)
    (pairs_dir / "index.json").write_text(
        json.dumps(index, sort_keys=True, indent=2) + "\n"
    )
    _write_failures(out, failures)


def write_baseline_outputs(
    out: Path, cfg: "RunConfig", rows: list[dict], failures: list[str]
) -> None:
    out.mkdir(parents=True, exist_ok=True)
    prov = _prov_from_cfg(cfg)
    rows = sorted(rows, key=lambda r: r["subject_id"])
    (out / "baseline.csv").write_text(render_baseline_csv(rows, prov))
    (out / "baseline.md").write_text(render_baseline_md(rows, prov))
    _write_failures(out, failures)


def rerender(run_dir: str | Path) -> list[Path]:
    """Re-render every summary table in a run directory from stored
    per-subject JSON. Byte-identical to the original render.

    Returns:
        Paths written.

    Raises:
        FileNotFoundError: No recognizable outputs under run_dir.
    """
    out = Path(run_dir)
    written: list[Path] = []
    prov: dict | None = None

    subj_dir = out / "subjects"
    if subj_dir.is_dir():
        rows = []
        for path in sorted(subj_dir.glob("*.json")):
            payload = json.loads(path.read_text())
            prov = {k: payload[k] for k in ("config_hash", "seed", "version")}
            rep = payload["report"]
            best = rep["per_n"][str(rep["best_n"])]
            rows.append(
                {
                    "subject_id": rep["subject_id"],
                    "accuracy_pct": best["mean_pct"],
                    "std_pct": best["std_pct"],
                    "selected_channel": rep["selected_channel"],
                    "best_n": rep["best_n"],
                }
            )
        if prov is not None:
            rows.sort(key=lambda r: r["subject_id"])
            (out / "summary.csv").write_text(render_summary_csv(rows, prov))
            (out / "summary.md").write_text(render_summary_md(rows, prov))
            written += [out / "summary.csv", out / "summary.md"]

    pairs_dir = out / "pairs"
    index_path = pairs_dir / "index.json"
    if index_path.is_file():
        index = json.loads(index_path.read_text())
        prov = {k: index[k] for k in ("config_hash", "seed", "version")}
        pair_names = index["pairs"]
        cells: dict[str, dict[str, float]] = {}
        for name in pair_names:
            col: dict[str, float] = {}
            for path in sorted((pairs_dir / name / "subjects").glob("*.json")):
                payload = json.loads(path.read_text())
                rep = payload["report"]
                best = rep["per_n"][str(rep["best_n"])]
                col[rep["subject_id"]] = best["mean_pct"]
            cells[name] = col
        (out / "pairs.csv").write_text(render_pairs_csv(pair_names, cells, prov))
        (out / "pairs.md").write_text(render_pairs_md(pair_names, cells, prov))
        written += [out / "pairs.csv", out / "pairs.md"]

    base_dir = out / "baseline" / "subjects"
    if base_dir.is_dir():
        rows = []
        for path in sorted(base_dir.glob("*.json")):
            payload = json.loads(path.read_text())
            prov = {k: payload[k] for k in ("config_hash", "seed", "version")}
            rows.append(payload["result"])
        if prov is not None and rows:
            rows.sort(key=lambda r: r["subject_id"])
            (out / "baseline.csv").write_text(render_baseline_csv(rows, prov))
            (out / "baseline.md").write_text(render_baseline_md(rows, prov))
            written += [out / "baseline.csv", out / "baseline.md"]

    if not written:
        raise FileNotFoundError(
            f"no run outputs found under {out} "
            "(expected subjects/, pairs/, or baseline/)"
        )
    return written
