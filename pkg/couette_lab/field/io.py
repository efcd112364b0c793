"""Field documents (`cspec-field/1`) and the physical-space CSV exporter."""

from __future__ import annotations

import csv
import logging
import math
from pathlib import Path

import numpy as np
import orjson

from couette_lab.constants import Defaults, Schema
from couette_lab.exceptions import FieldFormatError
from couette_lab.field.grid import FieldMode, GridSpec, SpectralField
from couette_lab.types import FieldDocument, ModeRecord

logger = logging.getLogger(__name__)

_MODE_KEYS = ("k", "j", "rho_re", "rho_im", "alpha_re", "alpha_im", "omega_re", "omega_im")


def field_to_document(field: SpectralField) -> FieldDocument:
    modes: list[ModeRecord] = [
        {
            "k": m.k,
            "j": m.j,
            "rho_re": m.R.real,
            "rho_im": m.R.imag,
            "alpha_re": m.A.real,
            "alpha_im": m.A.imag,
            "omega_re": m.Omega.real,
            "omega_im": m.Omega.imag,
        }
        for m in field.modes()
    ]
    return {"schema": Schema.FIELD, "time": field.time, "grid": field.grid.to_header(), "modes": modes}


def field_from_document(doc: object) -> SpectralField:
    """Validate a decoded document and build the field.

    Raises:
        FieldFormatError: Wrong schema, missing keys or non-numeric values.
        GridError: Mode off the declared grid.
    """
    if not isinstance(doc, dict):
        raise FieldFormatError("field document must be a JSON object", code="field")
    if doc.get("schema") != Schema.FIELD:
        raise FieldFormatError(f"expected schema {Schema.FIELD!r}, got {doc.get('schema')!r}", code="field")
    grid_header = doc.get("grid")
    if not isinstance(grid_header, dict):
        raise FieldFormatError("missing grid header", code="field")
    grid = GridSpec.from_header(grid_header)
    records = doc.get("modes")
    if not isinstance(records, list):
        raise FieldFormatError("missing modes list", code="field")

    modes = []
    for i, rec in enumerate(records):
        if not isinstance(rec, dict) or any(key not in rec for key in _MODE_KEYS):
            raise FieldFormatError(f"mode record {i} lacks one of {', '.join(_MODE_KEYS)}", code="field")
        try:
            modes.append(
                FieldMode(
                    int(rec["k"]),
                    int(rec["j"]),
                    complex(float(rec["rho_re"]), float(rec["rho_im"])),
                    complex(float(rec["alpha_re"]), float(rec["alpha_im"])),
                    complex(float(rec["omega_re"]), float(rec["omega_im"])),
                )
            )
        except (TypeError, ValueError) as e:
            raise FieldFormatError(f"mode record {i}: {e}", code="field") from e
    try:
        time = float(doc.get("time", 0.0))
    except (TypeError, ValueError) as e:
        raise FieldFormatError(f"invalid time: {e}", code="field") from e
    return SpectralField.from_modes(grid, modes, time)


def write_field(field: SpectralField, path: str | Path) -> Path:
    path = Path(path)
    path.write_bytes(orjson.dumps(field_to_document(field), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS))
    logger.debug("wrote %d modes to %s", len(field), path)
    return path


def read_field(path: str | Path) -> SpectralField:
    try:
        doc = orjson.loads(Path(path).read_bytes())
    except orjson.JSONDecodeError as e:
        raise FieldFormatError(f"{path}: not valid JSON ({e})", code="field") from e
    return field_from_document(doc)


def export_physical(
    field: SpectralField,
    path: str | Path,
    *,
    t: float | None = None,
    n_x: int = 64,
    n_y: int = 128,
    L_y: float = 20.0,
) -> Path:
    """Sample rho, alpha, omega in physical space on [0, 2pi) x [-L_y/2, L_y/2).

    A moving-frame coefficient at (k, eta) is the physical Fourier coefficient
    at (k, eta - k t), so f(x, y) = sum c(k, eta) e^(i(k x + (eta - k t) y)) d_eta.
    The finite lattice makes the result periodic in y with period 2pi / d_eta;
    the window is a truncation and carries no accuracy guarantee.
    """
    t = field.time if t is None else t
    x = np.linspace(0.0, 2.0 * math.pi, n_x, endpoint=False)
    y = np.linspace(-0.5 * L_y, 0.5 * L_y, n_y, endpoint=False)
    X, Y = np.meshgrid(x, y, indexing="ij")
    k = field.k
    shifted = field.eta - k * t
    phase = np.exp(1j * (k[:, None, None] * X[None] + shifted[:, None, None] * Y[None]))
    d = field.grid.d_eta
    values = {
        name: np.real(np.tensordot(coef, phase, axes=1)) * d
        for name, coef in (("rho", field.R), ("alpha", field.A), ("omega", field.Omega))
    }

    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "rho", "alpha", "omega"])
        for i in range(n_x):
            for jy in range(n_y):
                writer.writerow(
                    [
                        format(X[i, jy], Defaults.CSV_FLOAT),
                        format(Y[i, jy], Defaults.CSV_FLOAT),
                        format(values["rho"][i, jy], Defaults.CSV_FLOAT),
                        format(values["alpha"][i, jy], Defaults.CSV_FLOAT),
                        format(values["omega"][i, jy], Defaults.CSV_FLOAT),
                    ]
                )
    return path
