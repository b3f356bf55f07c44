"""JSON encodings for channels, path configurations, erasure pairs and reports.

Complex numbers are ``[re, im]`` pairs and matrices are row-major nested lists.
"""

from __future__ import annotations

import enum
import json
import math
from fractions import Fraction
from typing import Any

import numpy as np

from .channels import Channel, require_valid
from .ebcert import ErasurePair
from .linalg import ContractError
from .paths import PathConfig

# significant digits kept for floats in reports; last-bit noise never reaches the output
REPORT_DIGITS = 12


class SchemaError(ContractError):
    """Raised when a JSON document does not match the expected layout."""


def encode_complex_array(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [encode_complex_array(x) for x in a]


def decode_complex_array(data, ndim: int) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        raise SchemaError(f"expected a {ndim}-d array of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def channel_to_json(ch: Channel) -> dict:
    return {"dim_in": ch.dim_in, "dim_out": ch.dim_out, "kraus": [encode_complex_array(k) for k in ch.kraus]}


def channel_from_json(data: dict) -> Channel:
    try:
        din, dout, kraus = int(data["dim_in"]), int(data["dim_out"]), data["kraus"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"channel JSON needs dim_in, dim_out and kraus: {exc}") from exc
    ops = []
    for k in kraus:
        m = decode_complex_array(k, 2)
        if m.shape != (dout, din):
            raise SchemaError(f"Kraus operator of shape {m.shape}, expected {(dout, din)}")
        ops.append(m)
    return require_valid(Channel.from_kraus(ops))


def path_config_to_json(cfg: PathConfig) -> dict:
    return {
        "channels": [channel_to_json(c) for c in cfg.channels],
        "phi": encode_complex_array(cfg.phi),
        "alphas": [encode_complex_array(a) for a in cfg.alphas],
    }


def path_config_from_json(data: dict) -> PathConfig:
    try:
        chans = [channel_from_json(c) for c in data["channels"]]
        phi = decode_complex_array(data["phi"], 1)
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"path configuration needs channels and phi: {exc}") from exc
    alphas = data.get("alphas")
    if alphas is not None:
        alphas = tuple(decode_complex_array(a, 1) for a in alphas)
    return PathConfig(tuple(chans), phi, alphas)


def erasure_pair_to_json(pair: ErasurePair) -> dict:
    return {
        "d": pair.d,
        "phi": encode_complex_array(pair.phi),
        "psi": encode_complex_array(pair.psi),
        "omega": encode_complex_array(pair.omega),
    }


def erasure_pair_from_json(data: dict) -> ErasurePair:
    try:
        pair = ErasurePair(
            decode_complex_array(data["phi"], 1),
            decode_complex_array(data["psi"], 1),
            decode_complex_array(data["omega"], 2),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"erasure pair needs phi, psi and omega: {exc}") from exc
    if "d" in data and int(data["d"]) != pair.d:
        raise SchemaError(f"declared d={data['d']} but vectors have dimension {pair.d}")
    return pair


def _round(x: float) -> float:
    if x == 0:
        return 0.0
    if not math.isfinite(x):
        return x
    return float(f"{x:.{REPORT_DIGITS}g}") + 0.0


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy values, enums, fractions and complex numbers to JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return to_jsonable(encode_complex_array(obj))
        return to_jsonable(obj.tolist())
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [_round(obj.real), _round(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"
