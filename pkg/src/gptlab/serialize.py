"""JSON forms of polytopes, state spaces and reports.

Output is deterministic: fixed key order, two-space indent, rationals as
``"p/q"`` strings, trailing newline. Loading a report and dumping it again
reproduces the bytes exactly.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import LoadError, UsageError
from .exact.lp import FarkasCertificate
from .exact.rational import format_rational, format_vec, parse_rational
from .model import Effect, Measurement, StateSpace
from .polytope import VPolytope, dim, from_points
from .postulates import (
    DimensionClash,
    Extended,
    Holds,
    NoCompletion,
    NoExtendingPureEffect,
    NoFaceMatch,
    NonPositive,
    OppositeFaceEmpty,
    PostulateReport,
    SubspaceVerdict,
    Violation,
)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _parse_entry(value, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise LoadError(f"{where}: rational entries must be \"p/q\" strings, got {value!r}")
    try:
        return parse_rational(str(value))
    except (UsageError, ValueError, ZeroDivisionError):
        raise LoadError(f"{where}: {value!r} is not a rational of the form p/q") from None


def _parse_points(raw, m: int, where: str) -> list[tuple[Fraction, ...]]:
    if not isinstance(raw, list) or not raw:
        raise LoadError(f"{where}: expected a nonempty list of points")
    pts = []
    for i, p in enumerate(raw):
        if not isinstance(p, list) or len(p) != m:
            raise LoadError(f"{where}[{i}]: point must be a list of {m} rationals")
        pts.append(tuple(_parse_entry(x, f"{where}[{i}]") for x in p))
    return pts


def _ambient(data: dict) -> int:
    m = data.get("ambient_dim")
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise LoadError("ambient_dim: must be a positive integer")
    return m


def polytope_to_json(p: VPolytope) -> dict:
    return {"ambient_dim": p.ambient_dim, "vertices": [format_vec(v) for v in p.vertices]}


def polytope_from_json(data: Any) -> VPolytope:
    if not isinstance(data, dict):
        raise LoadError("polytope file must contain a JSON object")
    m = _ambient(data)
    return from_points(m, _parse_points(data.get("vertices"), m, "vertices"))


def state_space_to_json(s: StateSpace) -> dict:
    out: dict = {}
    if s.descriptor:
        out["model"] = s.describe()
    out["ambient_dim"] = s.ambient_dim
    out["omega_vertices"] = [format_vec(v) for v in s.vertices]
    out["u"] = format_vec(s.u.covector)
    return out


def state_space_from_json(data: Any) -> StateSpace:
    """Validate and build a state space; errors name the failed invariant."""
    if not isinstance(data, dict):
        raise LoadError("state space file must contain a JSON object")
    m = _ambient(data)
    pts = _parse_points(data.get("omega_vertices"), m, "omega_vertices")
    u_raw = data.get("u")
    if not isinstance(u_raw, list) or len(u_raw) != m:
        raise LoadError(f"u: must be a list of {m} rationals")
    u = tuple(_parse_entry(x, "u") for x in u_raw)
    for i, p in enumerate(pts):
        if sum((a * b for a, b in zip(u, p)), Fraction(0)) != 1:
            raise LoadError(f"normalization u(omega)=1 fails at omega_vertices[{i}]")
    canonical = tuple(Fraction(int(k == m - 1)) for k in range(m))
    if u != canonical:
        raise LoadError("canonical order unit: u must be the last-coordinate covector")
    omega = from_points(m, pts)
    if dim(omega) != m - 1:
        raise LoadError(
            f"generating cone: states span dimension {dim(omega)} but ambient_dim - 1 = {m - 1}"
        )
    model = data.get("model", {})
    if not isinstance(model, dict):
        raise LoadError("model: descriptor must be an object")
    return StateSpace(m, omega, tuple((str(k), str(v)) for k, v in model.items()))


def load_state_space(path: str | Path) -> StateSpace:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise LoadError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LoadError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return state_space_from_json(data)


def save_state_space(s: StateSpace, path: str | Path) -> None:
    Path(path).write_text(dumps(state_space_to_json(s)))


def effect_to_json(e: Effect) -> list[str]:
    return format_vec(e.covector)


def measurement_to_json(meas: Measurement) -> list[list[str]]:
    return [effect_to_json(e) for e in meas.effects]


def certificate_to_json(cert: FarkasCertificate) -> dict:
    return cert.to_json()


def _outcome_to_json(outcome) -> dict:
    name = type(outcome).__name__
    if isinstance(outcome, Holds):
        return {"verdict": name, "transformation": [format_vec(r) for r in outcome.transformation]}
    if isinstance(outcome, DimensionClash):
        return {"verdict": name, "span_dims": list(outcome.span_dims)}
    if isinstance(outcome, NonPositive):
        return {
            "verdict": name,
            "vertex": outcome.vertex,
            "image": format_vec(outcome.image),
            "violated_facet": None if outcome.violated_facet is None else list(outcome.violated_facet),
            "reason": outcome.reason,
        }
    if isinstance(outcome, OppositeFaceEmpty):
        return {"verdict": name}
    raise TypeError(f"unexpected preservation outcome {outcome!r}")


def _subspace_outcome(outcome) -> dict:
    name = type(outcome).__name__
    if isinstance(outcome, Extended):
        return {"outcome": name, "measurement": measurement_to_json(outcome.measurement)}
    if isinstance(outcome, NoExtendingPureEffect):
        return {"outcome": name, "effect_index": outcome.effect_index}
    if isinstance(outcome, (NoCompletion, NoFaceMatch)):
        return {"outcome": name}
    raise TypeError(f"unexpected subspace outcome {outcome!r}")


def _vertex_indices(s: StateSpace, group) -> list[int]:
    index = {v: i for i, v in enumerate(s.vertices)}
    return [index[w] for w in group]


def violation_to_json(s: StateSpace, v: Violation) -> dict:
    return {
        "groups": [_vertex_indices(s, g) for g in v.groups],
        "first_premise": measurement_to_json(v.first_premise),
        "second_premise": measurement_to_json(v.second_premise),
        "conclusion_certificate": certificate_to_json(v.certificate),
    }


def report_to_json(s: StateSpace, r: PostulateReport) -> dict:
    out: dict = {"model": r.descriptor, "ambient_dim": s.ambient_dim, "vertex_count": len(s.vertices)}
    if r.classical is not None:
        c = r.classical
        out["classical"] = c.classical
        out["simplex"] = c.simplex
        out["uniformly_pyramidal"] = c.uniformly_pyramidal
        out["preservation"] = [
            {"facet": list(k), **_outcome_to_json(o)} for k, o in c.preservation.per_facet
        ]
    if "discrimination" in r.sections:
        if r.discrimination_skipped:
            out["discrimination"] = {"skipped": r.discrimination_skipped}
        elif r.discrimination is None:
            out["discrimination"] = {"violation": None}
        else:
            out["discrimination"] = {"violation": violation_to_json(s, r.discrimination)}
    if "subspace" in r.sections:
        rows = []
        for face, verdict in r.subspace:
            if isinstance(verdict, SubspaceVerdict):
                for meas, outcome in verdict.per_measurement:
                    rows.append(
                        {
                            "face": list(face),
                            "condition_a": verdict.condition_a,
                            "measurement": measurement_to_json(meas),
                            **_subspace_outcome(outcome),
                        }
                    )
            else:
                rows.append({"face": list(face), "skipped": verdict})
        out["subspace"] = rows
    if "effects" in r.sections:
        out["pure_effects"] = [effect_to_json(e) for e in r.pure_effects]
        out["pure_measurements"] = [measurement_to_json(m) for m in r.measurements]
    if "faces" in r.sections:
        out["faces"] = [list(f) for f in r.faces]
    return out


def report_to_text(s: StateSpace, r: PostulateReport) -> str:
    data = report_to_json(s, r)
    lines = [f"model: {', '.join(f'{k}={v}' for k, v in data['model'].items()) or 'custom'}"]
    lines.append(f"ambient dimension {data['ambient_dim']}, {data['vertex_count']} pure states")
    if "classical" in data:
        lines.append(f"classical: {data['classical']}")
        lines.append(f"simplex: {data['simplex']}")
        lines.append(f"uniformly pyramidal: {data['uniformly_pyramidal']}")
        for row in data["preservation"]:
            detail = ""
            if row["verdict"] == "Holds":
                detail = " T = " + "; ".join(" ".join(r) for r in row["transformation"])
            elif row["verdict"] == "DimensionClash":
                detail = f" span dims {row['span_dims'][0]} + {row['span_dims'][1]}"
            elif row["verdict"] == "NonPositive":
                detail = f" vertex {row['vertex']} -> ({', '.join(row['image'])}): {row['reason']}"
            lines.append(f"preservation facet {row['facet']}: {row['verdict']}{detail}")
    if "discrimination" in data:
        d = data["discrimination"]
        if "skipped" in d:
            lines.append(f"discrimination: skipped ({d['skipped']})")
        elif d["violation"] is None:
            lines.append("discrimination: no violation")
        else:
            v = d["violation"]
            lines.append(f"discrimination violation: groups {v['groups']}")
            lines.append("  first premise measurement: " + _fmt_meas(v["first_premise"]))
            lines.append("  second premise measurement: " + _fmt_meas(v["second_premise"]))
            lines.append(
                "  conclusion refuted, certificate rhs " + v["conclusion_certificate"]["contradiction_rhs"]
            )
    if "subspace" in data:
        for row in data["subspace"]:
            if "skipped" in row:
                lines.append(f"subspace face {row['face']}: skipped ({row['skipped']})")
            else:
                lines.append(
                    f"subspace face {row['face']}: {_fmt_meas(row['measurement'])} -> {row['outcome']}"
                )
    if "pure_effects" in data:
        lines.append(f"pure effects ({len(data['pure_effects'])}):")
        lines.extend("  (" + ", ".join(e) + ")" for e in data["pure_effects"])
        lines.append(f"pure measurements ({len(data['pure_measurements'])}):")
        lines.extend("  " + _fmt_meas(m) for m in data["pure_measurements"])
    if "faces" in data:
        lines.append(f"faces ({len(data['faces'])}): {data['faces']}")
    return "\n".join(lines) + "\n"


def _fmt_meas(meas: list[list[str]]) -> str:
    return "{" + ", ".join("(" + ", ".join(e) + ")" for e in meas) + "}"


def distinguish_to_json(s: StateSpace, groups: list[list[int]], result) -> dict:
    from .postulates import Distinguishable

    out: dict = {"groups": [[i + 1 for i in g] for g in groups]}
    if isinstance(result, Distinguishable):
        out["verdict"] = "Distinguishable"
        out["measurement"] = measurement_to_json(result.measurement)
    else:
        out["verdict"] = "NotDistinguishable"
        out["certificate"] = certificate_to_json(result.certificate)
    return out


__all__ = [
    "dumps",
    "format_rational",
    "load_state_space",
    "polytope_from_json",
    "polytope_to_json",
    "report_to_json",
    "report_to_text",
    "save_state_space",
    "state_space_from_json",
    "state_space_to_json",
]
