"""JSON containers for splines and multilevel decompositions.

Floats are written with Python's shortest round-trip repr, so a
parse/serialize cycle is lossless.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .bspline import Spline
from .errors import ParseError, SplineWaveError
from .transform import DecompositionLevel, MultiscaleDecomposition, reconstruct
from .wavelets import MODES, WaveletParams, build_level

SPLINE_FORMAT = "splinewave-spline"
DECOMP_FORMAT = "splinewave-decomposition"
VERSION = 1


@dataclass(frozen=True)
class SplineFile:
    spline: Spline
    boundary_mode: str = "line"
    version: int = VERSION
    labels: tuple = field(default=())

    def channel_labels(self) -> list[str]:
        n = self.spline.channels
        if len(self.labels) == n:
            return list(self.labels)
        return [f"c{i}" for i in range(n)]


def _spline_dict(s: Spline, mode: str, labels) -> dict:
    return {
        "order": s.order,
        "boundary_mode": mode,
        "period": s.period,
        "knots": s.knots.tolist(),
        "coeffs": s.coeffs.tolist(),
        "labels": list(labels),
    }


def _get(d: dict, key: str, where: str):
    if key not in d:
        raise ParseError(f"{where}: missing field {key!r}")
    return d[key]


def _float_array(v, key: str, ndim: int) -> np.ndarray:
    try:
        a = np.array(v, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(f"field {key!r} is not numeric") from None
    if a.ndim != ndim and not (ndim == 2 and a.ndim == 1):
        raise ParseError(f"field {key!r} must be a {ndim}-D array")
    if not np.all(np.isfinite(a)):
        raise ParseError(f"field {key!r} contains non-finite values")
    return a


def _spline_from(d: dict, where: str) -> SplineFile:
    if not isinstance(d, dict):
        raise ParseError(f"{where}: expected an object")
    order = _get(d, "order", where)
    if not isinstance(order, int) or order < 1:
        raise ParseError(f"{where}: order must be a positive integer")
    mode = d.get("boundary_mode", "line")
    if mode not in MODES:
        raise ParseError(f"{where}: unknown boundary_mode {mode!r}")
    period = d.get("period")
    if period is not None:
        period = float(period)
    knots = _float_array(_get(d, "knots", where), "knots", 1)
    coeffs = _float_array(_get(d, "coeffs", where), "coeffs", 2)
    labels = tuple(str(x) for x in d.get("labels", []))
    s = Spline(order, knots, coeffs, period)
    return SplineFile(s, mode, labels=labels)


def dumps_spline(sf: SplineFile) -> str:
    d = {"format": SPLINE_FORMAT, "version": sf.version}
    d.update(_spline_dict(sf.spline, sf.boundary_mode, sf.labels))
    return json.dumps(d, indent=1) + "\n"


def loads_spline(text: str) -> SplineFile:
    d = _load_json(text)
    _check_header(d, SPLINE_FORMAT)
    return _spline_from(d, "spline file")


def _load_json(text: str) -> dict:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(d, dict):
        raise ParseError("top level must be an object")
    return d


def _check_header(d: dict, fmt: str):
    if d.get("format") != fmt:
        raise ParseError(f"expected format {fmt!r}, got {d.get('format')!r}")
    if d.get("version") != VERSION:
        raise ParseError(f"unsupported version {d.get('version')!r}")


def dumps_decomposition(md: MultiscaleDecomposition, params: WaveletParams, labels=()) -> str:
    d = {
        "format": DECOMP_FORMAT,
        "version": VERSION,
        "m": params.m,
        "m_tilde": params.m_tilde,
        "boundary_mode": params.boundary_mode,
        "base": _spline_dict(md.base, params.boundary_mode, labels),
        "levels": [{"fine_knots": dl.level.fine.tolist(),
                    "details": dl.detail_coeffs.tolist()} for dl in md.levels],
    }
    return json.dumps(d, indent=1) + "\n"


@dataclass(frozen=True)
class DecompositionFile:
    base: SplineFile
    params: WaveletParams
    fine_grids: list
    details: list

    def reconstruct(self) -> SplineFile:
        cur = self.base.spline
        for fine, det in zip(self.fine_grids, self.details):
            lv = build_level(cur.knots, fine, self.params, cur.period)
            dl = DecompositionLevel(lv, cur.coeffs, det)
            cur = reconstruct(dl, self.params)
        return SplineFile(cur, self.params.boundary_mode, labels=self.base.labels)


def loads_decomposition(text: str) -> DecompositionFile:
    d = _load_json(text)
    _check_header(d, DECOMP_FORMAT)
    try:
        params = WaveletParams(int(_get(d, "m", "decomposition")),
                               int(_get(d, "m_tilde", "decomposition")),
                               str(_get(d, "boundary_mode", "decomposition")))
    except SplineWaveError as exc:
        raise ParseError(f"bad wavelet parameters: {exc}") from None
    base = _spline_from(_get(d, "base", "decomposition"), "base spline")
    grids, details = [], []
    for i, lv in enumerate(_get(d, "levels", "decomposition")):
        where = f"level {i}"
        if not isinstance(lv, dict):
            raise ParseError(f"{where}: expected an object")
        grids.append(_float_array(_get(lv, "fine_knots", where), "fine_knots", 1))
        det = _float_array(_get(lv, "details", where), "details", 2)
        details.append(det.reshape(det.shape[0], -1) if det.size else
                       np.zeros((0, base.spline.channels)))
    return DecompositionFile(base, params, grids, details)
