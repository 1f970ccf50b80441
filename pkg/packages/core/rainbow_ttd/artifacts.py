"""CSV tables, generated plot scripts and summary.json for experiment runs.

Floats are written with repr(), the shortest text that reads back to the same
double, so re-running an experiment gives byte-identical files and a summary
recomputed from a CSV matches the one printed.
"""

import csv
import json
import logging
import math

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from pydantic import JsonValue


logger = logging.getLogger(__name__)

Row = Mapping[str, Any]


@dataclass(frozen=True)
class Table:
    """One CSV file: name is the file stem, columns fix the header order."""

    name: str
    columns: tuple[str, ...]
    rows: Sequence[Row]

    def column(self, name: str) -> list[Any]:
        return [row[name] for row in self.rows]


@dataclass(frozen=True)
class PlotSpec:
    """
    A matplotlib script drawing columns of one table.

    Attributes:
        table: Stem of the CSV the script reads
        x: Column on the horizontal axis
        y: Columns drawn against x, one series each
        group: Column(s) splitting the rows into separate series
        kind: "line" or "scatter"
        log_y: Logarithmic vertical axis
    """

    table: str
    x: str
    y: tuple[str, ...]
    title: str
    xlabel: str
    ylabel: str
    group: str | tuple[str, ...] | None = None
    kind: str = "line"
    log_y: bool = False


@dataclass(frozen=True)
class ExperimentResult:
    tables: tuple[Table, ...]
    plots: tuple[PlotSpec, ...] = ()
    summary: dict[str, JsonValue] = field(default_factory=dict)

    def table(self, name: str) -> Table:
        for table in self.tables:
            if table.name == name:
                return table
        msg = f"no table named {name!r}"
        raise KeyError(msg)


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool | np.bool_):
        return "true" if value else "false"
    if isinstance(value, int | np.integer):
        return str(int(value))
    if isinstance(value, float | np.floating):
        number = float(value)
        if math.isnan(number):
            return "nan"
        return repr(number)
    return str(value)


def write_csv(path: Path, table: Table) -> Path:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(table.columns))
        writer.writeheader()
        for row in table.rows:
            writer.writerow({key: format_cell(row[key]) for key in table.columns})
    return path


def read_csv(path: Path) -> list[dict[str, str]]:
    with path.open(encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))


_PLOT_TEMPLATE = '''\
"""Plot {table}.csv; writes {name}.png next to it."""

import csv

from collections import defaultdict
from pathlib import Path

import matplotlib.pyplot as plt


HERE = Path(__file__).resolve().parent
X = {x!r}
Y = {y!r}
GROUP = {group!r}

with (HERE / "{table}.csv").open(newline="") as handle:
    rows = list(csv.DictReader(handle))

series = defaultdict(lambda: ([], []))
for row in rows:
    for column in Y:
        if row[column] in ("", "nan"):
            continue
        label = column
        if GROUP:
            label = " ".join(f"{{g}}={{row[g]}}" for g in GROUP)
        if GROUP and len(Y) > 1:
            label = f"{{label}} {{column}}"
        xs, ys = series[label]
        xs.append(float(row[X]))
        ys.append(float(row[column]))

fig, ax = plt.subplots(figsize=(7, 4.5))
for label, (xs, ys) in series.items():
    if {scatter!r}:
        ax.scatter(xs, ys, s=6, label=label)
    else:
        ax.plot(xs, ys, label=label)
if {log_y!r}:
    ax.set_yscale("log")
ax.set_title({title!r})
ax.set_xlabel({xlabel!r})
ax.set_ylabel({ylabel!r})
ax.grid(visible=True, alpha=0.3)
if len(series) > 1:
    ax.legend(fontsize="small")
fig.tight_layout()
fig.savefig(HERE / "{name}.png", dpi=150)
'''


def render_plot_script(spec: PlotSpec, name: str) -> str:
    return _PLOT_TEMPLATE.format(
        table=spec.table,
        name=name,
        x=spec.x,
        y=spec.y,
        group=(spec.group,) if isinstance(spec.group, str) else spec.group,
        scatter=spec.kind == "scatter",
        log_y=spec.log_y,
        title=spec.title,
        xlabel=spec.xlabel,
        ylabel=spec.ylabel,
    )


def write_summary(path: Path, summary: Mapping[str, JsonValue]) -> Path:
    path.write_text(
        json.dumps(summary, indent=2, sort_keys=True, allow_nan=True) + "\n",
        encoding="utf-8",
    )
    return path


def write_artifacts(
    result: ExperimentResult, output_dir: Path, experiment: str
) -> list[Path]:
    """Write every table, plot script and the summary into output_dir."""
    output_dir.mkdir(parents=True, exist_ok=True)
    files = [write_csv(output_dir / f"{t.name}.csv", t) for t in result.tables]

    for index, spec in enumerate(result.plots):
        suffix = "" if index == 0 else f"_{spec.table}"
        name = f"plot_{experiment.replace('-', '_')}{suffix}"
        script = output_dir / f"{name}.py"
        script.write_text(render_plot_script(spec, name), encoding="utf-8")
        files.append(script)

    files.append(write_summary(output_dir / "summary.json", result.summary))
    logger.debug("Wrote %d artifacts to %s", len(files), output_dir)
    return files
