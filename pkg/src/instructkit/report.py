"""Report rendering: aligned text tables, machine-readable dumps, figures.

Every report path writes the delimited/structured artifact first and then
the matplotlib figures next to it; figure rendering is optional at call
sites that have no display data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .corpus import InstructionRecord, Language, Paradigm, TaskSpec
from .errors import ConfigError
from .evaluate import EvalReport

_PARADIGM_ORDER = [p.value for p in Paradigm]
_LANGUAGE_ORDER = [lang.value for lang in Language]


def _fmt(value: float | None, width: int = 7, digits: int = 4) -> str:
    if value is None:
        return " " * (width - 1) + "-"
    return f"{value:{width}.{digits}f}"


def format_report_table(report: EvalReport) -> str:
    """Aligned-column text table: one row per task, then the rollups."""
    header = (
        f"{'task':36} {'para':5} {'lang':4} {'n':>5} {'miss':>4} {'unpar':>5} "
        f"{'rougeL':>7} {'miP':>7} {'miR':>7} {'miF1':>7} {'maP':>7} {'maR':>7} {'maF1':>7}"
    )
    lines = [header, "-" * len(header)]
    for task_id in sorted(report.tasks):
        t = report.tasks[task_id]
        mi, ma = t.micro, t.macro
        lines.append(
            f"{task_id:36} {t.paradigm:5} {t.language:4} {t.n:>5} {t.n_missing:>4} "
            f"{t.n_unparsed:>5} {t.rouge_l:7.2f} "
            f"{_fmt(mi.precision if mi else None)} {_fmt(mi.recall if mi else None)} "
            f"{_fmt(mi.f1 if mi else None)} "
            f"{_fmt(ma.precision if ma else None)} {_fmt(ma.recall if ma else None)} "
            f"{_fmt(ma.f1 if ma else None)}"
        )
    for group in ("paradigm", "language", "generalization", "overall"):
        members = report.rollups.get(group, {})
        if not members:
            continue
        lines.append("")
        lines.append(f"[{group}]")
        for key in sorted(members):
            r = members[key]
            mi, ma = r.micro, r.macro
            lines.append(
                f"{key:36} {'':5} {'':4} {r.n_tasks:>5} {'':>4} {'':>5} {r.rouge_l:7.2f} "
                f"{_fmt(mi.precision if mi else None)} {_fmt(mi.recall if mi else None)} "
                f"{_fmt(mi.f1 if mi else None)} "
                f"{_fmt(ma.precision if ma else None)} {_fmt(ma.recall if ma else None)} "
                f"{_fmt(ma.f1 if ma else None)}"
            )
    return "\n".join(lines) + "\n"


def _bar_figure(path: Path, labels: Sequence[str], values: Sequence[float], title: str, ylabel: str, ylim: tuple[float, float]) -> None:
    fig, ax = plt.subplots(figsize=(max(4.0, 0.45 * len(labels) + 1.5), 3.6))
    ax.bar(range(len(labels)), values, color="#4878b0")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel(ylabel)
    ax.set_ylim(*ylim)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_eval_outputs(report: EvalReport, out_dir: str | Path, figures: bool = True) -> list[Path]:
    """Write report.json, report.txt and the summary figures."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    json_path = out / "report.json"
    json_path.write_text(
        json.dumps(report.to_dict(), ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    written.append(json_path)

    txt_path = out / "report.txt"
    txt_path.write_text(format_report_table(report), encoding="utf-8")
    written.append(txt_path)

    if figures and report.tasks:
        fig_dir = out / "figures"
        fig_dir.mkdir(exist_ok=True)
        task_ids = sorted(report.tasks)
        rouge_path = fig_dir / "rouge_by_task.png"
        _bar_figure(
            rouge_path,
            task_ids,
            [report.tasks[t].rouge_l for t in task_ids],
            "ROUGE-L by task",
            "ROUGE-L",
            (0.0, 100.0),
        )
        written.append(rouge_path)
        f1_tasks = [t for t in task_ids if report.tasks[t].micro is not None]
        if f1_tasks:
            f1_path = fig_dir / "f1_by_task.png"
            _bar_figure(
                f1_path,
                f1_tasks,
                [report.tasks[t].micro.f1 for t in f1_tasks],
                "Micro F1 by task",
                "micro F1",
                (0.0, 1.0),
            )
            written.append(f1_path)
        paradigm = report.rollups.get("paradigm", {})
        if paradigm:
            keys = sorted(paradigm)
            roll_path = fig_dir / "rouge_by_paradigm.png"
            _bar_figure(
                roll_path,
                keys,
                [paradigm[k].rouge_l for k in keys],
                "ROUGE-L by paradigm (unweighted task mean)",
                "ROUGE-L",
                (0.0, 100.0),
            )
            written.append(roll_path)
    return written


# --- corpus statistics ---


@dataclass
class StatsCell:
    tasks: int = 0
    train: int = 0
    test: int = 0


@dataclass
class StatsTable:
    """Task/instance counts per language x paradigm with an ALL row."""

    cells: dict[tuple[str, str], StatsCell]

    def totals(self) -> StatsCell:
        total = StatsCell()
        for cell in self.cells.values():
            total.tasks += cell.tasks
            total.train += cell.train
            total.test += cell.test
        return total

    def to_dict(self) -> dict:
        rows = {}
        for (lang, para), cell in sorted(self.cells.items()):
            rows[f"{lang}.{para}"] = {
                "tasks": cell.tasks,
                "train": cell.train,
                "test": cell.test,
            }
        total = self.totals()
        rows["ALL"] = {"tasks": total.tasks, "train": total.train, "test": total.test}
        return rows


def stats_from_records(
    train: list[InstructionRecord],
    test: list[InstructionRecord],
    registry: Mapping[str, TaskSpec],
) -> StatsTable:
    cells: dict[tuple[str, str], StatsCell] = {}
    seen_tasks: set[str] = set()

    def cell_for(task_id: str) -> StatsCell:
        spec = registry.get(task_id)
        if spec is None:
            raise ConfigError(f"no task spec for task {task_id}")
        return cells.setdefault((spec.language.value, spec.paradigm.value), StatsCell())

    for record in train + test:
        if record.task_id not in seen_tasks:
            seen_tasks.add(record.task_id)
            cell_for(record.task_id).tasks += 1
    for record in train:
        cell_for(record.task_id).train += 1
    for record in test:
        cell_for(record.task_id).test += 1
    return StatsTable(cells)


def stats_from_counts(counts: Mapping) -> StatsTable:
    """Build a table from a declarative counts document.

    The document maps "LANG.PARADIGM" to {tasks, train, test}; an optional
    "ALL" entry is checked against the cell sums.
    """
    cells: dict[tuple[str, str], StatsCell] = {}
    declared_all: StatsCell | None = None
    for key, value in counts.items():
        if key == "ALL":
            declared_all = StatsCell(**{k: int(v) for k, v in value.items()})
            continue
        lang, _, para = key.partition(".")
        if lang not in _LANGUAGE_ORDER or para not in _PARADIGM_ORDER:
            raise ConfigError(f"bad stats key {key!r} (expected LANG.PARADIGM)")
        cells[(lang, para)] = StatsCell(
            tasks=int(value.get("tasks", 0)),
            train=int(value.get("train", 0)),
            test=int(value.get("test", 0)),
        )
    table = StatsTable(cells)
    if declared_all is not None:
        total = table.totals()
        if (total.tasks, total.train, total.test) != (
            declared_all.tasks,
            declared_all.train,
            declared_all.test,
        ):
            raise ConfigError(
                "stats cells do not sum to the declared ALL row: "
                f"computed ({total.tasks}, {total.train}, {total.test}) vs "
                f"declared ({declared_all.tasks}, {declared_all.train}, {declared_all.test})"
            )
    return table


def format_stats_table(table: StatsTable) -> str:
    header = f"{'Lang.':6} {'Task Para.':10} {'# task':>8} {'# train inst.':>14} {'# test inst.':>13}"
    lines = [header, "-" * len(header)]
    for lang in _LANGUAGE_ORDER:
        for para in _PARADIGM_ORDER:
            cell = table.cells.get((lang, para))
            if cell is None:
                continue
            lines.append(
                f"{lang:6} {para:10} {cell.tasks:>8,} {cell.train:>14,} {cell.test:>13,}"
            )
    total = table.totals()
    lines.append("-" * len(header))
    lines.append(f"{'ALL':6} {'':10} {total.tasks:>8,} {total.train:>14,} {total.test:>13,}")
    return "\n".join(lines) + "\n"


def write_stats_outputs(table: StatsTable, out_dir: str | Path, figures: bool = True) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    json_path = out / "stats.json"
    json_path.write_text(
        json.dumps(table.to_dict(), ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    written.append(json_path)
    txt_path = out / "stats.txt"
    txt_path.write_text(format_stats_table(table), encoding="utf-8")
    written.append(txt_path)
    if figures and table.cells:
        labels = []
        train_values = []
        test_values = []
        for (lang, para), cell in sorted(table.cells.items()):
            labels.append(f"{lang}.{para}")
            train_values.append(cell.train)
            test_values.append(cell.test)
        fig, ax = plt.subplots(figsize=(max(4.0, 0.8 * len(labels) + 1.5), 3.6))
        xs = range(len(labels))
        width = 0.4
        ax.bar([x - width / 2 for x in xs], train_values, width, label="train", color="#4878b0")
        ax.bar([x + width / 2 for x in xs], test_values, width, label="test", color="#d1895c")
        ax.set_xticks(list(xs))
        ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
        ax.set_ylabel("instances")
        ax.set_title("Corpus size by language and paradigm")
        ax.legend()
        fig.tight_layout()
        fig_path = out / "stats.png"
        fig.savefig(fig_path, dpi=120)
        plt.close(fig)
        written.append(fig_path)
    return written
