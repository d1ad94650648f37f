"""Stable JSON formats for instances and certificates.

Instances carry exact integers only; certificates carry rationals as
"p/q" strings so nothing ever passes through floats. Integers of magnitude
at least 2^53 are serialized as decimal strings and the parser accepts
both forms. Serialization is canonical: serialize(parse(serialize(x)))
is byte-identical to serialize(x).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import intmat
from .intmat import RatMat
from .errors import PreconditionError
from .quadratic import make_order
from .reduction import PipelineReport
from .surface import PolarizedRMSurface

FORMAT_VERSION = 1
_BIG = 2**53


@dataclass(frozen=True)
class StepData:
    """One serialized certificate step; see the certificate schema."""

    kind: str
    prime: int
    kernel_overlattice: RatMat | None
    alpha: tuple[int, int] | None
    degree_before: int
    degree_after: int
    t: int | None
    branch: str | None


@dataclass(frozen=True)
class CertificateData:
    seed: int
    steps: tuple[StepData, ...]
    final: PolarizedRMSurface


def report_to_certificate(report: PipelineReport) -> CertificateData:
    steps = tuple(
        StepData(
            kind=s.kind,
            prime=s.prime,
            kernel_overlattice=s.kernel.overlattice if s.kernel is not None else None,
            alpha=s.alpha,
            degree_before=s.degree_before,
            degree_after=s.degree_after,
            t=s.t,
            branch=s.branch,
        )
        for s in report.steps
    )
    return CertificateData(seed=report.seed, steps=steps, final=report.final)


# ---------------------------------------------------------------------------
# integer and matrix codecs
# ---------------------------------------------------------------------------


def _encode_int(v: int):
    return v if abs(v) < _BIG else str(v)


def _decode_int(v) -> int:
    if isinstance(v, bool):
        raise ValueError("expected an integer, got a boolean")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        return int(v, 10)
    raise ValueError(f"expected an integer, got {type(v).__name__}")


def _encode_int_matrix(m):
    return [[_encode_int(x) for x in row] for row in m]


def _decode_int_matrix(obj) -> intmat.IntMat:
    if not isinstance(obj, list) or len(obj) != 4:
        raise ValueError("matrix must be a 4x4 array")
    rows = []
    for row in obj:
        if not isinstance(row, list) or len(row) != 4:
            raise ValueError("matrix must be a 4x4 array")
        rows.append(tuple(_decode_int(x) for x in row))
    return tuple(rows)


def _encode_rational_matrix(m):
    return [[str(Fraction(x)) for x in row] for row in m]


def _decode_rational_matrix(obj) -> RatMat:
    if not isinstance(obj, list) or len(obj) != 4:
        raise ValueError("rational matrix must be a 4x4 array")
    rows = []
    for row in obj:
        if not isinstance(row, list) or len(row) != 4:
            raise ValueError("rational matrix must be a 4x4 array")
        out = []
        for x in row:
            if not isinstance(x, str):
                raise ValueError("rational entries must be strings like 'p/q'")
            out.append(Fraction(x))
        rows.append(tuple(out))
    return tuple(rows)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# instances
# ---------------------------------------------------------------------------


def serialize_instance(surface: PolarizedRMSurface) -> str:
    obj = {
        "order": {
            "D": _encode_int(surface.order.D),
            "conductor": _encode_int(surface.order.conductor),
        },
        "omega_action": _encode_int_matrix(surface.action),
        "gram": _encode_int_matrix(surface.gram),
        "format_version": FORMAT_VERSION,
    }
    return _dump(obj)


def parse_instance(text: str) -> PolarizedRMSurface:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValueError("instance file must hold a JSON object")
    if obj.get("format_version") != FORMAT_VERSION:
        raise ValueError("unsupported or missing format_version")
    order_obj = obj.get("order")
    if not isinstance(order_obj, dict):
        raise ValueError("missing order object")
    try:
        order = make_order(
            _decode_int(order_obj.get("D")), _decode_int(order_obj.get("conductor"))
        )
    except PreconditionError as exc:
        raise ValueError(f"instance order is invalid: {exc}") from exc
    action = _decode_int_matrix(obj.get("omega_action"))
    gram = _decode_int_matrix(obj.get("gram"))
    return PolarizedRMSurface(order, action, gram)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


def serialize_certificate(cert: CertificateData | PipelineReport) -> str:
    if isinstance(cert, PipelineReport):
        cert = report_to_certificate(cert)
    steps = []
    for s in cert.steps:
        steps.append(
            {
                "kind": s.kind,
                "prime": _encode_int(s.prime),
                "kernel_overlattice": (
                    None
                    if s.kernel_overlattice is None
                    else _encode_rational_matrix(s.kernel_overlattice)
                ),
                "alpha": None if s.alpha is None else [_encode_int(s.alpha[0]), _encode_int(s.alpha[1])],
                "degree_before": _encode_int(s.degree_before),
                "degree_after": _encode_int(s.degree_after),
                "t": None if s.t is None else _encode_int(s.t),
                "branch": s.branch,
            }
        )
    obj = {
        "seed": _encode_int(cert.seed),
        "steps": steps,
        "final": json.loads(serialize_instance(cert.final)),
    }
    return _dump(obj)


def parse_certificate(text: str) -> CertificateData:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValueError("certificate file must hold a JSON object")
    steps_obj = obj.get("steps")
    if not isinstance(steps_obj, list):
        raise ValueError("missing steps array")
    steps = []
    for s in steps_obj:
        if not isinstance(s, dict):
            raise ValueError("each step must be an object")
        kind = s.get("kind")
        branch = s.get("branch")
        if not isinstance(kind, str):
            raise ValueError("step kind must be a string")
        if branch is not None and not isinstance(branch, str):
            raise ValueError("step branch must be a string or null")
        alpha_obj = s.get("alpha")
        if alpha_obj is not None:
            if not isinstance(alpha_obj, list) or len(alpha_obj) != 2:
                raise ValueError("alpha must be a two-element array")
            alpha = (_decode_int(alpha_obj[0]), _decode_int(alpha_obj[1]))
        else:
            alpha = None
        kernel_obj = s.get("kernel_overlattice")
        kernel = None if kernel_obj is None else _decode_rational_matrix(kernel_obj)
        t_obj = s.get("t")
        steps.append(
            StepData(
                kind=kind,
                prime=_decode_int(s.get("prime")),
                kernel_overlattice=kernel,
                alpha=alpha,
                degree_before=_decode_int(s.get("degree_before")),
                degree_after=_decode_int(s.get("degree_after")),
                t=None if t_obj is None else _decode_int(t_obj),
                branch=branch,
            )
        )
    final = parse_instance(_dump(obj.get("final")))
    return CertificateData(
        seed=_decode_int(obj.get("seed")), steps=tuple(steps), final=final
    )
