"""Deterministic CSV/JSON emission with atomic writes.

Floats are rendered with repr (shortest round-trip), so identical runs
produce byte-identical files; wall-clock time lives in a single
"runtime_s" key that consumers are expected to ignore when comparing.
"""

import json
import os
import tempfile

import numpy as np


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def atomic_write_text(path, text):
    """Write via a sibling temp file and rename, so readers never see halves."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, columns):
    """Render columns (list of equal-length sequences) under a header row."""
    ncols = len(header)
    rows = max((len(c) for c in columns), default=0)
    lines = [",".join(header)]
    for i in range(rows):
        cells = []
        for c in range(ncols):
            col = columns[c]
            cells.append(_fmt(col[i]) if i < len(col) else "")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def spectrum_csv(S):
    header = ["n", "lambda_plus", "residual_plus", "lambda_minus", "residual_minus"]
    npts = max(len(S.lambda_plus), len(S.lambda_minus))
    return csv_text(
        header,
        [
            list(range(1, npts + 1)),
            list(S.lambda_plus),
            list(S.residual_plus),
            list(S.lambda_minus),
            list(S.residual_minus),
        ],
    )


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, float) and obj != obj:  # NaN
        return None
    return obj


def json_text(obj):
    return json.dumps(_sanitize(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def report(payload, config, version, runtime_s=None):
    """Standard report envelope: config echo, version, optional runtime."""
    out = {"config": _sanitize(config), "version": version}
    out.update(_sanitize(payload))
    if runtime_s is not None:
        out["runtime_s"] = runtime_s
    return out
