"""Command-line front end: a thin client over the compute service.

By default requests are served in-process (no network); pass --server URL to
talk to a running instance instead. Exit codes: 0 success, 2 input/domain
error, 3 rolling does not exist, 4 internal numerical failure.

Examples
--------
  rollkin curvature --surface sphere:R=1 --at 0.3,0.7
  rollkin roll --surface plane --at 0,0 --theta 0 --r 1 --length 0.5 -o family
  rollkin isotropy --surface cylinder:R=1,inward --at 0,0 --r 2 --dirs 0,1.0472,2.0944
  rollkin classify --surface cylinder:R=1,inward --r 2 -o classify.json
  rollkin scan --surface ellipsoid:a=1.5,b=1,c=0.75 --at 0.4,1.1 \\
      --r-range 0.5:3:11 --theta-range 0:3.14159:8 -o landscape.csv
  rollkin serve --port 8000
"""

import argparse
import json
import math
import os
import sys
import threading
from dataclasses import dataclass, fields

import numpy as np

from .export import format_float, motion_family_csv, speed_rows_csv
from .geometry.charts import _coerce, parse_config_text

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_ROLLING = 3
EXIT_NUMERICAL = 4


class ClientError(Exception):
    def __init__(self, exit_code, message):
        self.exit_code = exit_code
        super().__init__(message)


class ServiceClient:
    """HTTP client for the service; in-process ASGI when no server is given."""

    def __init__(self, server=None):
        self.server = server
        self._local = threading.local()

    def _client(self):
        client = getattr(self._local, "client", None)
        if client is None:
            if self.server:
                import httpx

                client = httpx.Client(base_url=self.server, timeout=600.0)
            else:
                import warnings

                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    from fastapi.testclient import TestClient

                from .service.app import create_app

                client = TestClient(create_app(), raise_server_exceptions=False)
            self._local.client = client
        return client

    def post(self, path, payload):
        resp = self._client().post(path, json=payload)
        if resp.status_code == 200:
            return resp.json()
        try:
            body = resp.json()
        except ValueError:
            body = {"error": f"HTTP {resp.status_code}", "message": resp.text}
        if resp.status_code in (400, 422):
            code = EXIT_INPUT
        elif resp.status_code == 409:
            code = EXIT_NOT_ROLLING
        else:
            code = EXIT_NUMERICAL
        name = body.get("error", "error")
        message = body.get("message") or body.get("detail") or ""
        if "t" in body:
            message = f"{message} (violation at t = {body['t']})"
        raise ClientError(code, f"{name}: {message}")


# --- run configuration -----------------------------------------------------------

_LIST_FIELDS = {"dirs", "r_values", "theta_values", "region"}
_INT_LIST_FIELDS = {"grid"}


@dataclass
class RunConfig:
    """One experiment invocation; round-trips through a canonical text form."""

    command: str = ""
    surface: str = "plane"
    u: float = 0.0
    v: float = 0.0
    theta: float = 0.0
    r: float = 1.0
    dirs: tuple = ()
    r_values: tuple = ()
    theta_values: tuple = ()
    grid: tuple = (12, 12)
    region: tuple = ()
    length: float = 0.01
    steps: int = 0
    arc: float = 0.01
    simulate: bool = False
    tol_iso: float = 1e-8
    output: str = ""
    format: str = "csv"
    seed: int = 0
    jobs: int = 1
    server: str = ""

    def canonical_text(self):
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            lines.append(f"{f.name} = {_config_value_text(value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        entries = parse_config_text(text)
        return cls.from_mapping(entries)

    @classmethod
    def from_mapping(cls, entries):
        cfg = cls()
        valid = {f.name for f in fields(cls)}
        for key, raw in entries.items():
            if key not in valid:
                raise ValueError(f"unknown config key {key!r}")
            setattr(cfg, key, _config_parse_value(key, raw, type(getattr(cfg, key))))
        return cfg

    def merged(self, overrides):
        for key, value in overrides.items():
            if value is not None:
                setattr(self, key, value)
        return self


def _config_value_text(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(
            str(x) if isinstance(x, int) else repr(float(x)) for x in value
        )
    return str(value)


def _config_parse_value(key, raw, target_type):
    if isinstance(raw, (tuple, list)):
        return tuple(raw)
    if not isinstance(raw, str):
        return raw
    if key in _LIST_FIELDS:
        return tuple(float(x) for x in raw.split(",")) if raw else ()
    if key in _INT_LIST_FIELDS:
        return tuple(int(x) for x in raw.split(",")) if raw else ()
    if target_type is bool:
        return raw.lower() == "true"
    if target_type is int:
        return int(raw)
    if target_type is float:
        return float(raw)
    return raw


# --- argument handling -------------------------------------------------------------


def parse_surface_arg(text):
    """Surface argument -> SurfaceSpec dict: built-in 'name:k=v,...' or a config file path."""
    if os.path.isfile(text):
        with open(text, "r", encoding="utf-8") as fh:
            entries = parse_config_text(fh.read())
        if "kind" not in entries:
            raise ValueError(f"surface config {text!r} needs a 'kind' entry")
        kind = entries.pop("kind")
        params = {}
        for axis in ("u", "v"):
            lo, hi = entries.pop(f"{axis}_min", None), entries.pop(f"{axis}_max", None)
            if lo is not None and hi is not None:
                params[f"{axis}_range"] = [float(lo), float(hi)]
        for key, value in entries.items():
            params[key] = _coerce(value)
        return {"kind": kind, "params": params}
    name, _, rest = text.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            if "=" in item:
                key, value = item.split("=", 1)
                params[key.strip()] = _coerce(value.strip())
            elif item.strip() in ("inward", "outward"):
                params["orientation"] = item.strip()
            elif item.strip():
                raise ValueError(f"cannot parse surface parameter {item!r}")
    return {"kind": name.strip(), "params": params}


def _parse_pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'u,v', got {text!r}")
    return float(parts[0]), float(parts[1])


def _parse_range(text):
    """'lo:hi:n' -> n evenly spaced values."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected 'lo:hi:n', got {text!r}")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    return [float(x) for x in np.linspace(lo, hi, n)]


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _print_json(payload):
    print(json.dumps(payload, indent=2, sort_keys=True))


def _pooled_map(jobs, fn, items):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# --- subcommands ---------------------------------------------------------------------


def cmd_curvature(cfg, client):
    u, v = cfg.u, cfg.v
    payload = {"surface": parse_surface_arg(cfg.surface), "u": u, "v": v}
    data = client.post("/curvature", payload)
    text = json.dumps(data, indent=2, sort_keys=True)
    if cfg.output:
        _write_text(cfg.output, text + "\n")
    print(text)
    return EXIT_OK


def cmd_roll(cfg, client):
    payload = {
        "surface": parse_surface_arg(cfg.surface),
        "u": cfg.u, "v": cfg.v, "theta": cfg.theta, "r": cfg.r,
        "length": cfg.length,
    }
    if cfg.steps:
        payload["steps"] = cfg.steps
    data = client.post("/roll", payload)
    res = data["residuals"]
    print(f"no_skid_max = {format_float(res['no_skid'])}")
    print(f"no_spin_max = {format_float(res['no_spin'])}")
    print(f"orthogonality_max = {format_float(res['orthogonality'])}")
    if cfg.output:
        base = cfg.output
        rotations = [np.array(A).reshape(3, 3) for A in data["rotations"]]
        if cfg.format in ("csv", "both"):
            path = base if base.endswith(".csv") else base + ".csv"
            _write_text(path, motion_family_csv(
                data["times"], rotations, data["translations"],
                data["omegas"], data["contacts"],
            ))
            print(f"wrote {path}")
        if cfg.format in ("json", "both"):
            path = base if base.endswith(".json") else base + ".json"
            _write_text(path, json.dumps(
                {"t": data["times"], "A": data["rotations"], "b": data["translations"],
                 "omega": data["omegas"], "contact": data["contacts"]},
                indent=2, sort_keys=True,
            ) + "\n")
            print(f"wrote {path}")
    return EXIT_OK


def _direction_list(cfg):
    if cfg.dirs:
        return list(cfg.dirs)
    rng = np.random.default_rng(cfg.seed)
    return sorted(float(x) for x in rng.uniform(0.0, math.pi, 8))


def cmd_isotropy(cfg, client):
    payload = {
        "surface": parse_surface_arg(cfg.surface),
        "u": cfg.u, "v": cfg.v, "r": cfg.r,
        "thetas": _direction_list(cfg),
        "simulate": cfg.simulate, "arc": cfg.arc,
        "tol_iso": cfg.tol_iso,
    }
    data = client.post("/isotropy", payload)
    print(f"verdict = {data['verdict']}")
    print(f"relation = {data['relation']}")
    print(f"spread_closed = {format_float(data['spread_closed'])}")
    if data["verdict_simulated"] is not None:
        print(f"verdict_simulated = {data['verdict_simulated']}")
        print(f"spread_simulated = {format_float(data['spread_simulated'])}")
    print(f"coefficient_fit = {format_float(data['coefficient_fit'])}")
    if cfg.output:
        rows = []
        for i, th in enumerate(data["thetas"]):
            sim = float("nan")
            if data["speeds_simulated"] is not None:
                sim = data["speeds_simulated"][i]
            rows.append((data["u"], data["v"], data["r"], th, data["speeds_closed"][i], sim))
        _write_text(cfg.output, speed_rows_csv(rows))
        print(f"wrote {cfg.output}")
    return EXIT_OK


def cmd_classify(cfg, client):
    payload = {
        "surface": parse_surface_arg(cfg.surface),
        "r": cfg.r, "grid": list(cfg.grid), "tol": cfg.tol_iso,
    }
    if cfg.region:
        payload["region"] = [[cfg.region[0], cfg.region[1]], [cfg.region[2], cfg.region[3]]]
    data = client.post("/classify", payload)
    print(f"verdict = {data['verdict']}")
    if data["radius"] is not None:
        print(f"radius = {format_float(data['radius'])}")
    if cfg.output:
        _write_text(cfg.output, json.dumps(data, indent=2, sort_keys=True) + "\n")
        print(f"wrote {cfg.output}")
    return EXIT_OK


def cmd_scan(cfg, client):
    surface = parse_surface_arg(cfg.surface)
    r_values = list(cfg.r_values)
    theta_values = list(cfg.theta_values)
    if not r_values or not theta_values:
        raise ValueError("scan needs --r-range and --theta-range")

    def one(r):
        return client.post("/scan", {
            "surface": surface, "u": cfg.u, "v": cfg.v,
            "r_values": [r], "theta_values": theta_values,
            "simulate": cfg.simulate, "arc": cfg.arc,
        })["samples"]

    chunks = _pooled_map(cfg.jobs, one, r_values)
    rows = []
    for chunk in chunks:
        for s in chunk:
            sim = float("nan") if s["speed_simulated"] is None else s["speed_simulated"]
            rows.append((s["u"], s["v"], s["r"], s["theta"], s["speed_closed"], sim))
    text = speed_rows_csv(rows)
    if cfg.output:
        _write_text(cfg.output, text)
        print(f"wrote {cfg.output} ({len(rows)} rows)")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_serve(args):
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


# --- parser ---------------------------------------------------------------------------


def _add_common(p, *, point=True):
    p.add_argument("--surface", help="built-in 'name:k=v,...' or a surface config file")
    if point:
        p.add_argument("--at", help="parameter point 'u,v'")
    p.add_argument("--config", help="run config file (key = value lines); flags override")
    p.add_argument("--output", "-o", help="output file path")
    p.add_argument("--server", help="service URL (default: run in-process)")
    p.add_argument("--seed", type=int, help="seed for any randomized sampling (default 0)")
    p.add_argument("--jobs", type=int, help="work-pool size for sweeps (default 1)")


def build_parser():
    parser = argparse.ArgumentParser(prog="rollkin", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curvature", help="print pointwise curvature data as JSON")
    _add_common(p)

    p = sub.add_parser("roll", help="roll a ball along a geodesic; write the motion family")
    _add_common(p)
    p.add_argument("--theta", type=float, help="direction angle from e1 (radians)")
    p.add_argument("--r", type=float, help="signed ball parameter")
    p.add_argument("--length", type=float, help="arclength to roll (default 0.01)")
    p.add_argument("--steps", type=int, help="output samples (default 2048 per unit length)")
    p.add_argument("--format", choices=("csv", "json", "both"), help="output format (default csv)")

    p = sub.add_parser("isotropy", help="initial-speed isotropy test at a point")
    _add_common(p)
    p.add_argument("--r", type=float, help="signed ball parameter")
    p.add_argument("--dirs", help="comma-separated direction angles (radians)")
    p.add_argument("--simulate", action="store_true", default=None,
                   help="also simulate speeds by rolling short arcs")
    p.add_argument("--arc", type=float, help="simulated arc length (default 0.01)")
    p.add_argument("--tol-iso", dest="tol_iso", type=float,
                   help="isotropy spread tolerance (default 1e-8)")

    p = sub.add_parser("classify", help="constant-speed classification over a grid")
    _add_common(p, point=False)
    p.add_argument("--r", type=float, help="signed ball parameter")
    p.add_argument("--grid", help="grid resolution 'NUxNV' (default 12x12)")
    p.add_argument("--region", help="parameter rectangle 'u0,u1,v0,v1'")
    p.add_argument("--tol-iso", dest="tol_iso", type=float,
                   help="constant-speed tolerance (default 1e-8)")

    p = sub.add_parser("scan", help="speed landscape over r x theta at a point")
    _add_common(p)
    p.add_argument("--r-range", dest="r_range", help="'lo:hi:n' ball parameters")
    p.add_argument("--theta-range", dest="theta_range", help="'lo:hi:n' directions")
    p.add_argument("--simulate", action="store_true", default=None)
    p.add_argument("--arc", type=float)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _config_from_args(args):
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = RunConfig.from_text(fh.read())
    else:
        cfg = RunConfig()
    cfg.command = args.command
    overrides = {}
    for key in ("surface", "output", "server", "seed", "jobs", "theta", "r",
                "length", "steps", "arc", "simulate", "format", "tol_iso"):
        if hasattr(args, key):
            overrides[key] = getattr(args, key)
    if getattr(args, "at", None):
        overrides["u"], overrides["v"] = _parse_pair(args.at)
    if getattr(args, "dirs", None):
        overrides["dirs"] = tuple(float(x) for x in args.dirs.split(","))
    if getattr(args, "grid", None):
        nu, nv = args.grid.lower().split("x")
        overrides["grid"] = (int(nu), int(nv))
    if getattr(args, "region", None):
        overrides["region"] = tuple(float(x) for x in args.region.split(","))
    if getattr(args, "r_range", None):
        overrides["r_values"] = tuple(_parse_range(args.r_range))
    if getattr(args, "theta_range", None):
        overrides["theta_values"] = tuple(_parse_range(args.theta_range))
    return cfg.merged(overrides)


_COMMANDS = {
    "curvature": cmd_curvature,
    "roll": cmd_roll,
    "isotropy": cmd_isotropy,
    "classify": cmd_classify,
    "scan": cmd_scan,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    try:
        cfg = _config_from_args(args)
        client = ServiceClient(cfg.server or None)
        return _COMMANDS[args.command](cfg, client)
    except ClientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
