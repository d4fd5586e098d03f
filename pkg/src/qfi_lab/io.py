"""CSV/JSON writers and gnuplot script emission.

Floats are written with 17 significant digits so that they round-trip.
"""

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from . import __version__


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def header_line(command, seed=None):
    line = f"# qfi-lab {__version__} command={command}"
    if seed is not None:
        line += f" seed={seed}"
    return line


def csv_text(columns, rows, command, seed=None):
    buf = io.StringIO()
    buf.write(header_line(command, seed) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # json has no inf/nan; keep them readable as strings
        return x if math.isfinite(x) else fmt(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def json_text(obj):
    # repr(float) is already the shortest round-tripping form
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def amplitudes_json(amps):
    return [[float(a.real), float(a.imag)] for a in np.asarray(amps).ravel()]


def gnuplot_script(data_path, columns, x, ys, title="", ylabel="", logy=False):
    """Minimal gnuplot script plotting ``ys`` against ``x`` from a CSV file."""
    idx = {c: i + 1 for i, c in enumerate(columns)}
    lines = [
        header_line("plot"),
        "set datafile separator ','",
        "set key top right",
        f"set xlabel '{x}'",
        f"set ylabel '{ylabel}'",
    ]
    if title:
        lines.append(f"set title '{title}'")
    if logy:
        lines.append("set logscale y")
    name = Path(data_path).name
    plots = [f"'{name}' every ::1 using {idx[x]}:{idx[y]} with lines title '{y}'" for y in ys]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def write_text(path, text):
    if path is None or str(path) == "-":
        return None
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path
