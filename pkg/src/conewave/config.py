"""Line-oriented experiment configuration.

    # comment
    command = strichartz
    seed = 7

    [geometry]
    cross_section = dipole
    dipole_a = 0.5

    [strichartz]
    q = 2
    r = 6

Top-level keys come before the first section. The estimate or solver block
is the section named after the command. Every value is typed by a schema;
unknown keys, duplicate keys and out-of-range values are rejected with the
offending line numbers.
"""
import json
import math
from dataclasses import dataclass, field

from .errors import ConstraintViolation, ParseError, UnknownKey

COMMANDS = ("modes", "specfun-table", "propagate", "dispersive-scan", "strichartz",
            "local-smoothing", "g-check", "hardy", "resolvent", "sobolev", "nls", "scatter")
ESTIMATE_COMMANDS = ("dispersive-scan", "strichartz", "local-smoothing", "g-check", "hardy",
                     "resolvent", "sobolev")
CROSS_SECTIONS = ("flat-sphere", "dipole", "custom")


# ---------------------------------------------------------------------------
# typed values


def _bool(text):
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _float(text):
    v = float(text)
    if math.isnan(v):
        raise ValueError("NaN is not allowed")
    return v


def _int(text):
    try:
        return int(text.strip())  # exact, so large seeds survive
    except ValueError:
        pass
    v = float(text)
    if v != int(v):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(v)


def _floats(text):
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    return [_float(p) for p in parts]


def _str(text):
    return text.strip()


_RENDER = {
    _bool: lambda v: "true" if v else "false",
    _float: repr,
    _int: str,
    _floats: lambda v: ", ".join(repr(float(x)) for x in v),
    _str: str,
}


@dataclass(frozen=True)
class Key:
    kind: object
    default: object
    check: object = None  # value -> error text or None


def _positive(v):
    return None if v > 0 else "must be positive"


def _choice(*options):
    return lambda v: None if v in options else f"must be one of {', '.join(options)}"


TOP = {
    "command": Key(_str, None, _choice(*COMMANDS)),
    "seed": Key(_int, 0, lambda v: None if 0 <= v < 2 ** 64 else "must be a 64-bit unsigned integer"),
    "output": Key(_str, "conewave-out"),
    "workers": Key(_int, 1, _positive),
}

GEOMETRY = {
    "n": Key(_int, 3, lambda v: None if 2 <= v <= 6 else "must lie in [2, 6]"),
    "cross_section": Key(_str, "flat-sphere", _choice(*CROSS_SECTIONS)),
    "dipole_a": Key(_float, 0.5),
    "lmax": Key(_int, 2, lambda v: None if 0 <= v <= 64 else "must lie in [0, 64]"),
    "spectrum_file": Key(_str, ""),
}

_DISC = {"R_max": 40.0, "N": 256}
DISCRETIZATION_DEFAULTS = {
    "propagate": {"R_max": 30.0, "N": 256},
    "dispersive-scan": {"R_max": 1500.0, "N": 5700},
    "strichartz": {"R_max": 128.0, "N": 192},
    "local-smoothing": {"R_max": 128.0, "N": 192},
    "hardy": {"R_max": 128.0, "N": 192},
    "resolvent": {"R_max": 40.0, "N": 512},
    "sobolev": {"R_max": 40.0, "N": 256},
    "nls": {"R_max": 20.0, "N": 160},
    "scatter": {"R_max": 200.0, "N": 512},
}


def discretization_schema(command):
    d = DISCRETIZATION_DEFAULTS.get(command, _DISC)
    return {
        "R_max": Key(_float, d["R_max"], _positive),
        "N": Key(_int, d["N"], lambda v: None if 1 <= v <= 10000 else "must lie in [1, 10000]"),
        "rho_cutoff": Key(_float, 0.0, lambda v: None if v >= 0 else "must be non-negative"),
    }


_ENSEMBLE = {
    "ensemble_size": Key(_int, 50, _positive),
    "band_lo": Key(_float, 1.0, _positive),
    "band_hi": Key(_float, 3.0, _positive),
}
_EVOLVE = {
    "gamma": Key(_float, 1.0, lambda v: None if v in (1.0, -1.0) else "must be +1 or -1"),
    "h1_norm": Key(_float, 0.5, _positive),
    "T": Key(_float, 1.0),
    "dt": Key(_float, 1e-3, _positive),
    "snapshots": Key(_floats, []),
    "width": Key(_float, 1.0, _positive),
}

PARAMS = {
    "modes": {},
    "specfun-table": {
        "nu_min": Key(_float, 0.5), "nu_max": Key(_float, 5.5), "nu_count": Key(_int, 6, _positive),
        "x_min": Key(_float, 0.5), "x_max": Key(_float, 50.0), "x_count": Key(_int, 10, _positive),
    },
    "propagate": {
        "preset": Key(_str, "gaussian", _choice("gaussian", "bump", "single-mode")),
        "times": Key(_floats, [0.0, 0.5, 1.0]),
        "width": Key(_float, 1.0, _positive),
        "mode": Key(_int, 0, lambda v: None if v >= 0 else "must be non-negative"),
        "radii": Key(_int, 32, _positive),
        "conjugate_time": Key(_bool, False),
    },
    "dispersive-scan": {
        "width": Key(_float, 0.5, _positive),
        "t_min": Key(_float, 1.0), "t_max": Key(_float, 100.0),
        "t_count": Key(_int, 13, lambda v: None if v >= 3 else "must be at least 3"),
        "points": Key(_int, 400, _positive),
    },
    "strichartz": {"q": Key(_float, 2.0), "r": Key(_float, 6.0), "T": Key(_float, 8.0, _positive),
                   **_ENSEMBLE},
    "local-smoothing": {
        "alpha": Key(_float, 0.0), "s": Key(_float, 0.0), "beta": Key(_float, 1.0),
        "weight": Key(_str, "power", _choice("power", "compact")),
        "T": Key(_float, 8.0, _positive), **_ENSEMBLE,
    },
    "g-check": {
        "nu": Key(_floats, [0.3, 0.4564, 0.5, 1.5, 2.5]),
        "R": Key(_floats, [0.125, 0.5, 2.0, 8.0, 64.0]),
        "M": Key(_floats, [0.25, 0.5, 1.0, 2.0, 4.0]),
    },
    "hardy": {"s": Key(_float, 1.0), "p": Key(_float, 2.0), **_ENSEMBLE},
    "resolvent": {
        "moduli": Key(_floats, [0.01, 0.1, 1.0, 10.0, 100.0]),
        "angles": Key(_floats, [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75]),
    },
    "sobolev": {"sigmas": Key(_floats, [-1.0, -4.0]), "widths": Key(_floats, [1.0, 0.5])},
    "nls": dict(_EVOLVE),
    "scatter": {**_EVOLVE, "h1_norm": Key(_float, 0.01, _positive), "T": Key(_float, 40.0),
                "dt": Key(_float, 0.01, _positive),
                "snapshots": Key(_floats, [0.0, 5.0, 10.0, 20.0, 30.0, 40.0])},
}


@dataclass
class ExperimentConfig:
    command: str
    seed: int = 0
    output: str = "conewave-out"
    workers: int = 1
    geometry: dict = field(default_factory=dict)
    discretization: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {"command": self.command, "seed": self.seed, "output": self.output,
                "workers": self.workers, "geometry": dict(self.geometry),
                "discretization": dict(self.discretization), "params": dict(self.params)}

    def echo_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self):
        """Canonical config text; parsing it gives an identical config."""
        lines = [f"{k} = {_RENDER[TOP[k].kind](getattr(self, k))}" for k in TOP]
        for name, schema, values in (("geometry", GEOMETRY, self.geometry),
                                     ("discretization", discretization_schema(self.command),
                                      self.discretization),
                                     (self.command, PARAMS[self.command], self.params)):
            if not values and name == self.command:
                continue
            lines.append("")
            lines.append(f"[{name}]")
            for k in sorted(values):
                lines.append(f"{k} = {_RENDER[schema[k].kind](values[k])}")
        return "\n".join(lines) + "\n"


def _strip_comment(line):
    s = line.strip()
    if s.startswith(("#", ";")):
        return ""
    for mark in (" #", "\t#"):
        i = s.find(mark)
        if i >= 0:
            s = s[:i].rstrip()
    return s


def parse_config_text(text):
    """Split text into {section: {key: (raw value, line number)}}; top level is ''."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"config is not valid UTF-8: {exc}") from None
    sections = {"": {}}
    header_line = {"": 0}
    current = ""
    for no, raw in enumerate(text.splitlines(), start=1):
        s = _strip_comment(raw)
        if not s:
            continue
        if s.startswith("["):
            if not s.endswith("]") or len(s) < 3:
                raise ParseError(f"line {no}: malformed section header {raw.strip()!r}")
            name = s[1:-1].strip()
            if name in sections:
                raise ParseError(f"duplicate section [{name}] at lines {header_line[name]} and {no}")
            sections[name] = {}
            header_line[name] = no
            current = name
            continue
        if "=" not in s:
            raise ParseError(f"line {no}: expected 'key = value', got {raw.strip()!r}")
        key, value = (p.strip() for p in s.split("=", 1))
        if not key:
            raise ParseError(f"line {no}: empty key")
        key = key.replace("-", "_") if key not in ("R_max",) else key
        if key in sections[current]:
            first = sections[current][key][1]
            where = f"[{current}]" if current else "the top level"
            raise ParseError(f"duplicate key {key!r} in {where} at lines {first} and {no}")
        sections[current][key] = (value, no)
    return sections


def _at(no):
    return f"line {no}" if isinstance(no, int) else str(no)


def _typed(schema, entries, where, errors):
    out = {}
    for key, (raw, no) in entries.items():
        if key not in schema:
            errors.append(UnknownKey(f"{_at(no)}: unknown key {key!r} in {where}"))
            continue
        spec = schema[key]
        try:
            value = spec.kind(raw)
        except (TypeError, ValueError) as exc:
            errors.append(ConstraintViolation(f"{_at(no)}: {key} = {raw!r}: {exc}"))
            continue
        problem = spec.check(value) if spec.check else None
        if problem:
            errors.append(ConstraintViolation(f"{_at(no)}: {key} = {raw!r} {problem}"))
            continue
        out[key] = value
    for key, spec in schema.items():
        if key not in out and spec.default is not None:
            out[key] = list(spec.default) if isinstance(spec.default, list) else spec.default
    return out


def _nu0_for(geometry):
    from .cli import build_geometry
    return build_geometry(geometry).cross_section.nu0


def _cross_checks(cfg, lines, errors):
    if cfg.command == "local-smoothing" and cfg.params.get("weight") == "power":
        beta = cfg.params["beta"]
        try:
            nu0 = _nu0_for(cfg.geometry)
        except Exception as exc:  # geometry errors surface at run time
            errors.append(ConstraintViolation(f"geometry: {exc}"))
            return
        if not 0.5 < beta < 1 + nu0:
            no = lines.get(("local-smoothing", "beta"), "default value")
            errors.append(ConstraintViolation(
                f"{_at(no)}: beta = {beta} outside the window 1/2 < beta < 1 + nu0 = {1 + nu0:.6g}"))
    if cfg.geometry.get("cross_section") == "custom" and not cfg.geometry.get("spectrum_file"):
        errors.append(ConstraintViolation("geometry: custom cross-section needs spectrum_file"))


def validate_config(text, overrides=None):
    """Parse and validate; raise the first error with `.errors` listing all."""
    sections = parse_config_text(text)
    overrides = overrides or {}
    for (sec, key), value in overrides.items():
        sections.setdefault(sec, {})[key] = (str(value), "command line")
    errors = []
    top = _typed(TOP, sections[""], "the top level", errors)
    command = top.get("command")
    if command is None:
        if not any(isinstance(e, ConstraintViolation) and "command" in str(e) for e in errors):
            errors.append(ParseError("missing top-level key 'command'"))
        _raise(errors)
    allowed = {"", "geometry", "discretization", command}
    for name in sections:
        if name not in allowed:
            no = min((v[1] for v in sections[name].values() if isinstance(v[1], int)), default="?")
            errors.append(UnknownKey(f"unknown section [{name}] (near line {no}) for command {command!r}"))
    cfg = ExperimentConfig(
        command=command, seed=top["seed"], output=top["output"], workers=top["workers"],
        geometry=_typed(GEOMETRY, sections.get("geometry", {}), "[geometry]", errors),
        discretization=_typed(discretization_schema(command), sections.get("discretization", {}),
                              "[discretization]", errors),
        params=_typed(PARAMS[command], sections.get(command, {}), f"[{command}]", errors),
    )
    lines = {(sec, k): v[1] for sec, entries in sections.items() for k, v in entries.items()}
    if not errors:
        _cross_checks(cfg, lines, errors)
    _raise(errors)
    return cfg


def _raise(errors):
    if errors:
        first = errors[0]
        first.errors = list(errors)
        raise first
