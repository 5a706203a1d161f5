"""Renderers for the simulator's CSV outputs.

Three figure kinds:

* ps_curve       decoding probability versus decoding ratio, error bars
                 from the ci95 column, one curve per (algorithm, n, k)
* estimate_hist  side-by-side histograms of the per-node n_hat and k_hat
                 columns, with the true values marked when the file
                 carries a "# truth n=... k=..." comment
* degree_overlay one curve per input file of degree,probability rows

Rendering is read-only over the CSVs. Every SVG embeds the exact rows it
was drawn from in a <desc id="data-table"> element, so a reviewer can diff
figure contents against the source file without eyeballing pixels.
"""

from __future__ import annotations

import csv
import io
import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

# keep text as text in SVG output so labels stay greppable
plt.rcParams["svg.fonttype"] = "none"

SVG_NS = "http://www.w3.org/2000/svg"
DATA_TABLE_ID = "data-table"


class PlotError(Exception):
    pass


@dataclass
class FigureSpec:
    inputs: list[str]
    kind: str  # ps_curve | estimate_hist | degree_overlay
    out_dir: str
    group_by: list[str] = field(default_factory=list)
    image_format: str = "svg"


@dataclass
class Table:
    header: list[str]
    rows: list[dict[str, str]]
    comments: list[str]

    def column(self, name: str) -> list[str]:
        if name not in self.header:
            raise PlotError(f"column '{name}' missing from header {self.header}")
        return [row[name] for row in self.rows]


def read_table(path: str, required: list[str]) -> Table:
    comments = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    data_lines = []
    for line in lines:
        if line.startswith("#"):
            comments.append(line)
        elif line.strip():
            data_lines.append(line)
    if not data_lines:
        raise PlotError(f"{path}: no header row found")
    reader = csv.reader(io.StringIO("\n".join(data_lines)))
    header = next(reader)
    for name in required:
        if name not in header:
            raise PlotError(f"{path}: column '{name}' missing from header {header}")
    rows = []
    for values in reader:
        if len(values) != len(header):
            raise PlotError(f"{path}: row has {len(values)} fields, header has {len(header)}")
        rows.append(dict(zip(header, values)))
    if not rows:
        raise PlotError(f"{path}: no data rows")
    return Table(header=header, rows=rows, comments=comments)


def parse_truth(comments: list[str]) -> dict[str, float]:
    """Pull n/k truth markers out of a '# truth n=... k=...' comment."""
    truth = {}
    for comment in comments:
        text = comment.lstrip("#").strip()
        if not text.startswith("truth"):
            continue
        for part in text.split()[1:]:
            if "=" in part:
                key, value = part.split("=", 1)
                try:
                    truth[key] = float(value)
                except ValueError:
                    pass
    return truth


def embed_data_table(svg_path: str, header: list[str], rows: list[dict[str, str]]) -> None:
    """Insert the plotted rows verbatim into the SVG as a <desc> element."""
    ET.register_namespace("", SVG_NS)
    tree = ET.parse(svg_path)
    desc = ET.SubElement(tree.getroot(), f"{{{SVG_NS}}}desc", {"id": DATA_TABLE_ID})
    lines = [",".join(header)]
    lines.extend(",".join(row[name] for name in header) for row in rows)
    desc.text = "\n".join(lines)
    tree.write(svg_path, xml_declaration=True, encoding="unicode")


def extract_data_table(svg_path: str) -> list[str]:
    """Read back the embedded table; inverse of embed_data_table."""
    root = ET.parse(svg_path).getroot()
    for desc in root.iter(f"{{{SVG_NS}}}desc"):
        if desc.get("id") == DATA_TABLE_ID:
            return (desc.text or "").splitlines()
    raise PlotError(f"{svg_path}: no embedded data table")


def _group_rows(table: Table, group_by: list[str], path: str):
    for name in group_by:
        if name not in table.header:
            raise PlotError(f"{path}: column '{name}' missing from header {table.header}")
    if not group_by:
        return {(): table.rows}
    groups: dict[tuple, list[dict[str, str]]] = {}
    for row in table.rows:
        groups.setdefault(tuple(row[name] for name in group_by), []).append(row)
    return groups


def _group_slug(group_by: list[str], key: tuple) -> str:
    if not key:
        return ""
    return "_" + "_".join(f"{name}-{value}" for name, value in zip(group_by, key))


def _save(fig, out_path: str, header: list[str], rows: list[dict[str, str]], fmt: str) -> str:
    fig.savefig(out_path, format=fmt)
    plt.close(fig)
    if fmt == "svg":
        embed_data_table(out_path, header, rows)
    return out_path


def render_ps_curves(spec: FigureSpec) -> list[str]:
    """Decoding probability versus decoding ratio, one image per group."""
    if len(spec.inputs) != 1:
        raise PlotError("ps_curve takes exactly one input CSV")
    path = spec.inputs[0]
    table = read_table(path, required=["n", "k", "eta", "ps", "ci95"])
    outputs = []
    os.makedirs(spec.out_dir, exist_ok=True)
    for key, rows in _group_rows(table, spec.group_by, path).items():
        fig, ax = plt.subplots(figsize=(6, 4))
        curves: dict[tuple, list[dict[str, str]]] = {}
        for row in rows:
            curve_key = (row.get("algorithm", ""), row["n"], row["k"])
            curves.setdefault(curve_key, []).append(row)
        for (algorithm, n, k), points in curves.items():
            points = sorted(points, key=lambda r: float(r["eta"]))
            etas = [float(r["eta"]) for r in points]
            ps = [float(r["ps"]) for r in points]
            ci = [float(r["ci95"]) for r in points]
            label = f"n={n} k={k}" + (f" ({algorithm})" if algorithm else "")
            ax.errorbar(etas, ps, yerr=ci, marker="o", capsize=3, label=label)
        ax.set_xlabel("decoding ratio")
        ax.set_ylabel("successful decoding probability")
        ax.set_ylim(-0.02, 1.05)
        ax.grid(True, alpha=0.3)
        ax.legend()
        title = " ".join(f"{n}={v}" for n, v in zip(spec.group_by, key))
        ax.set_title(title or "decoding performance")
        out_path = os.path.join(
            spec.out_dir, f"ps_curve{_group_slug(spec.group_by, key)}.{spec.image_format}"
        )
        outputs.append(_save(fig, out_path, table.header, rows, spec.image_format))
    return outputs


def render_estimate_hists(spec: FigureSpec) -> list[str]:
    """Two-panel histogram of the n_hat and k_hat columns."""
    if len(spec.inputs) != 1:
        raise PlotError("estimate_hist takes exactly one input CSV")
    path = spec.inputs[0]
    table = read_table(path, required=["node_id", "n_hat", "k_hat"])
    truth = parse_truth(table.comments)
    n_hat = [float(v) for v in table.column("n_hat")]
    k_hat = [float(v) for v in table.column("k_hat")]
    os.makedirs(spec.out_dir, exist_ok=True)
    fig, (ax_n, ax_k) = plt.subplots(1, 2, figsize=(10, 4))
    ax_n.hist(n_hat, bins=min(30, max(1, len(set(n_hat)))), color="tab:blue", alpha=0.8)
    ax_n.set_xlabel("estimated node count")
    ax_n.set_ylabel("nodes")
    if "n" in truth:
        ax_n.axvline(truth["n"], color="red", linestyle="--", label=f"true n = {truth['n']:g}")
        ax_n.legend()
    ax_k.hist(k_hat, bins=min(30, max(1, len(set(k_hat)))), color="tab:orange", alpha=0.8)
    ax_k.set_xlabel("estimated source count")
    ax_k.set_ylabel("nodes")
    if "k" in truth:
        ax_k.axvline(truth["k"], color="red", linestyle="--", label=f"true k = {truth['k']:g}")
        ax_k.legend()
    out_path = os.path.join(spec.out_dir, f"estimate_hist.{spec.image_format}")
    return [_save(fig, out_path, table.header, table.rows, spec.image_format)]


def render_degree_overlay(spec: FigureSpec) -> list[str]:
    """Overlay degree,probability curves from one or more dump-dist files."""
    if not spec.inputs:
        raise PlotError("degree_overlay needs at least one input CSV")
    os.makedirs(spec.out_dir, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    combined_header = ["source", "degree", "probability"]
    combined_rows: list[dict[str, str]] = []
    for path in spec.inputs:
        table = read_table(path, required=["degree", "probability"])
        degrees = [int(v) for v in table.column("degree")]
        probs = [float(v) for v in table.column("probability")]
        stem = os.path.splitext(os.path.basename(path))[0]
        ax.plot(degrees, probs, marker=".", label=stem)
        combined_rows.extend(
            {"source": stem, "degree": row["degree"], "probability": row["probability"]}
            for row in table.rows
        )
    ax.set_xlabel("code degree")
    ax.set_ylabel("probability")
    ax.grid(True, alpha=0.3)
    ax.legend()
    out_path = os.path.join(spec.out_dir, f"degree_overlay.{spec.image_format}")
    return [_save(fig, out_path, combined_header, combined_rows, spec.image_format)]


RENDERERS = {
    "ps_curve": render_ps_curves,
    "estimate_hist": render_estimate_hists,
    "degree_overlay": render_degree_overlay,
}
