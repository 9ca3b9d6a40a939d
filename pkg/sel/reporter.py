"""CSV emission of bound tables and Markdown run reports."""

from __future__ import annotations

import csv
import io
import sys
from pathlib import Path

from sel.models import BoundTable, LabConfig, RunRecord

CSV_DIGITS = ".12g"


def format_value(v: float) -> str:
    return format(v, CSV_DIGITS)


def table_to_csv(table: BoundTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


class Reporter:
    def __init__(self, cfg: LabConfig | None = None):
        self.cfg = cfg or LabConfig()
        self.output_dir = Path(self.cfg.output_dir)

    def write_csv(self, table: BoundTable, path: str | Path | None = None) -> Path | None:
        """Write the table to `path`, or to stdout when no path is given."""
        text = table_to_csv(table)
        if path is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return None
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="") as f:
            f.write(text)
        return out

    def generate(self, record: RunRecord) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        out = self.output_dir / f"sel-report-{record.run_id}.md"
        cfg = record.config
        lines = [
            f"# sel run {record.run_id}\n\n",
            f"**Command:** {cfg.subcommand}\n\n",
            f"**Created:** {record.created_at.isoformat()}\n\n",
        ]
        if cfg.inputs:
            lines.append(f"**Inputs:** {', '.join(cfg.inputs)}\n\n")
        if cfg.seed is not None:
            lines.append(f"**Seed:** {cfg.seed}\n\n")
        if cfg.eps:
            lines.append("## Smoothing parameters\n\n| Name | Value |\n|------|-------|\n")
            lines.extend(f"| {k} | {v:g} |\n" for k, v in sorted(cfg.eps.items()))
            lines.append("\n")
        if cfg.params:
            lines.append("## Parameters\n\n| Name | Value |\n|------|-------|\n")
            lines.extend(f"| {k} | {v} |\n" for k, v in sorted(cfg.params.items()))
            lines.append("\n")
        lines.append("## Summary\n\n| Quantity | Value |\n|----------|-------|\n")
        lines.extend(f"| {k} | {v} |\n" for k, v in record.summary.items())
        if record.output_path:
            lines.append(f"\n**Output:** {record.output_path}\n")
        out.write_text("".join(lines))
        return out

    def load_latest(self, run_id: str = "") -> str:
        if run_id:
            p = self.output_dir / f"sel-report-{run_id}.md"
            if p.exists():
                return p.read_text()
            raise FileNotFoundError(run_id)
        reports = sorted(
            self.output_dir.glob("sel-report-*.md"),
            key=lambda p: p.stat().st_mtime,
            reverse=True,
        )
        if not reports:
            raise FileNotFoundError("no reports found")
        return reports[0].read_text()
