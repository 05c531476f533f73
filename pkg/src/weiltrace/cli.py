"""Command-line interface.

Settings resolve as flags > config file > environment > defaults.  The config
file is flat ``key = value`` text; keys are the long flag names with dashes or
underscores (``tol``, ``zeros``, ``cache-dir``, ...).  ``APP_CACHE`` sets the
cache root and ``APP_PRECISION`` the default quadrature tolerance.

Exit codes: 0 success, 2 bad input, 3 quadrature or tail failure, 4 residual
above tolerance.
"""
import argparse
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import explicit, spectral, zeros as zmod
from .characters import character
from .errors import DomainError, IncompleteScanError, ParameterError, QuadratureError, WeilTraceError, ZeroFileError
from .special import digamma, gauss_weil_pv
from .testfn import bump, haar_convolve, mult_convolve

SCHEMA_VERSION = 1
EXIT_OK, EXIT_PARSE, EXIT_QUAD, EXIT_RESIDUAL = 0, 2, 3, 4

DEFAULTS = {
    "tol": None,
    "zeros": None,
    "conj_zeros": None,
    "cache_dir": None,
    "format": "json",
    "output": None,
    "g": "bump:1.0",
    "g0": "bump:0.3",
    "chi": "4.1",
    "variant": "thm_1_1_sign_resolved",
    "arch": "kernel",
    "s": "0.5,1,2,1+1j,0.5+3j",
    "t_grid": "log2/2,log2",
    "t_max": "100",
    "id": "zeta",
    "h": "1e-3,1e-4",
    "form": "maass_selberg",
    "T": "2",
    "T_grid": "1:100:log10",
}
ENV = {"cache_dir": "APP_CACHE", "tol": "APP_PRECISION"}
# per-command defaults (tolerance, zero source, sample points)
COMMAND_DEFAULTS = {
    "zeta-explicit": {"tol": 1e-6, "zeros": "compute:1000"},
    "hecke-explicit": {"tol": 1e-5, "zeros": "compute:200"},
    "gauss-weil": {"tol": 1e-8},
    "maass-selberg": {"tol": 0.2, "s": "0.3+2j,0.5+1j"},
    "bound-sweep": {"tol": 1e-6, "zeros": "compute:1000", "g": None},
    "weil-positivity": {"tol": 1e-9, "zeros": "compute:1000"},
}


class InputError(WeilTraceError):
    pass


# ---------------------------------------------------------------------------
# deterministic JSON


def _dump(obj):
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(obj, (complex, np.complexfloating)):
        return _dump({"re": obj.real, "im": obj.imag})
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ", ".join(f"{_dump(k)}: {_dump(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_dump(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def to_json(payload):
    """Sorted keys, 17 significant digits, ``schema_version`` included."""
    return _dump({"schema_version": SCHEMA_VERSION, **payload}) + "\n"


def _csv(rows):
    rows = list(rows)
    if not rows:
        return ""
    keys = list(rows[0])
    lines = [",".join(keys)]
    for r in rows:
        lines.append(",".join(format(r[k], ".17g") if isinstance(r[k], float) else str(r[k]) for k in keys))
    return "# schema_version=%d\n" % SCHEMA_VERSION + "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parsing helpers


_REAL = re.compile(r"^\s*([0-9.eE+-]+)?\s*\*?\s*(log2|pi)?\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def parse_real(text):
    """Numbers such as ``0.3``, ``log2``, ``log2/2``, ``2*log2``, ``pi/4``."""
    m = _REAL.match(str(text))
    if not m or not (m.group(1) or m.group(2)):
        raise InputError(f"cannot parse {text!r} as a real number")
    try:
        val = float(m.group(1)) if m.group(1) else 1.0
        if m.group(2):
            val *= math.log(2.0) if m.group(2) == "log2" else math.pi
        if m.group(3):
            val /= float(m.group(3))
    except ValueError:
        raise InputError(f"cannot parse {text!r} as a real number") from None
    return val


def parse_complex(text):
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise InputError(f"cannot parse {text!r} as a complex number") from None


def parse_list(text, item=parse_real):
    parts = [p for p in str(text).split(",") if p.strip()]
    if not parts:
        raise InputError("empty list")
    return [item(p) for p in parts]


def parse_grid(text):
    """``lo:hi:logN`` (N log-spaced points in ``(lo, hi]``), ``lo:hi:N`` (linear,
    endpoints included) or a comma list."""
    if ":" not in str(text):
        return parse_list(text)
    parts = str(text).split(":")
    if len(parts) != 3:
        raise InputError(f"grid {text!r} must be lo:hi:N or lo:hi:logN")
    lo, hi = parse_real(parts[0]), parse_real(parts[1])
    spec = parts[2].strip()
    try:
        n = int(spec[3:] if spec.startswith("log") else spec)
    except ValueError:
        raise InputError(f"bad point count in grid {text!r}") from None
    if n < 1 or not lo < hi:
        raise InputError(f"grid {text!r} is empty")
    if spec.startswith("log"):
        if lo <= 0:
            raise InputError("a log grid needs lo > 0")
        return [float(x) for x in np.exp(np.linspace(math.log(lo), math.log(hi), n + 1)[1:])]
    return [float(x) for x in np.linspace(lo, hi, n)]


def parse_testfn(text):
    """``bump:R[:C]`` or ``bump:logr=R,center=C``, optionally prefixed by
    ``conv:`` (dy square) or ``haar:`` (dy/y square)."""
    parts = str(text).split(":")
    wrap = None
    if parts[0] in ("conv", "haar"):
        wrap, parts = parts[0], parts[1:]
    usage = f"test function {text!r} must look like bump:R[:C], bump:logr=R,center=C or conv:bump:R"
    if not parts or parts[0] != "bump" or len(parts) not in (2, 3):
        raise InputError(usage)
    if "=" in parts[1]:
        if len(parts) != 2:
            raise InputError(usage)
        kv = {}
        for item in parts[1].split(","):
            key, _, val = item.partition("=")
            if key.strip() not in ("logr", "center") or not val:
                raise InputError(usage)
            kv[key.strip()] = parse_real(val)
        if "logr" not in kv:
            raise InputError(usage)
        radius, center = kv["logr"], kv.get("center", 0.0)
    else:
        radius, center = parse_real(parts[1]), parse_real(parts[2]) if len(parts) == 3 else 0.0
    g = bump(radius, center)
    if wrap == "conv":
        return mult_convolve(g)
    if wrap == "haar":
        return haar_convolve(g)
    return g


def load_config_file(path):
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"config line {lineno}: expected key = value")
        key, val = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise InputError(f"config line {lineno}: unknown key {key!r}")
        out[key] = val
    return out


def resolve(args, command):
    """Merge flags, config file, environment and defaults."""
    cfg = load_config_file(args.config) if args.config else {}
    defaults = {**DEFAULTS, **COMMAND_DEFAULTS.get(command, {})}
    out = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        if flag is not None:
            out[key] = flag
        elif key in cfg:
            out[key] = cfg[key]
        elif key in ENV and os.environ.get(ENV[key]):
            out[key] = os.environ[ENV[key]]
        else:
            out[key] = default
    try:
        out["tol"] = float(out["tol"]) if out["tol"] is not None else 1e-8
    except ValueError:
        raise InputError(f"tolerance {out['tol']!r} is not a number") from None
    if not out["tol"] > 0:
        raise InputError("tolerance must be positive")
    return out


def load_zero_source(source, lfunction_id, cache_dir):
    """``compute:T`` (cached) or a file path."""
    if source is None:
        raise InputError("no zero source given")
    if source.startswith("compute:"):
        t_max = parse_real(source.split(":", 1)[1])
        if not t_max > 0:
            raise InputError("compute height must be positive")
        return zmod.cached_zeros(lfunction_id, t_max, cache_dir)
    if not Path(source).is_file():
        raise InputError(f"zeros file {source} not found")
    return zmod.load_zeros(source, lfunction_id)


# ---------------------------------------------------------------------------
# commands


def cmd_verify_zeta_explicit(cfg):
    g = parse_testfn(cfg["g"])
    z = load_zero_source(cfg["zeros"], "zeta", cfg["cache_dir"])
    rep = explicit.weil_rhs_zeta(g, cfg["variant"], z)
    payload = {"command": "verify zeta-explicit", "tolerance": cfg["tol"], "report": rep.to_dict()}
    return payload, abs(rep.residual) <= cfg["tol"]


def cmd_verify_hecke_explicit(cfg):
    g = parse_testfn(cfg["g"])
    chi = character(cfg["chi"])
    lid = "zeta" if chi.modulus == 1 else f"dirichlet:{chi.label}"
    z = load_zero_source(cfg["zeros"], lid, cfg["cache_dir"])
    cz = None
    if chi.modulus > 1 and not chi.is_real:
        conj = chi.conjugate()
        src = cfg["conj_zeros"] or (cfg["zeros"] if cfg["zeros"].startswith("compute:") else None)
        cz = load_zero_source(src, f"dirichlet:{conj.label}", cfg["cache_dir"])
    rep = explicit.weil_rhs(g, chi if chi.modulus > 1 else None, z, cz, arch=cfg["arch"])
    payload = {"command": "verify hecke-explicit", "tolerance": cfg["tol"], "report": rep.to_dict()}
    return payload, abs(rep.residual) <= cfg["tol"]


def cmd_verify_gauss_weil(cfg):
    rows = []
    ok = True
    for s in parse_list(cfg["s"], parse_complex):
        pv = gauss_weil_pv(s)
        ref = -2.0 * complex(digamma(s))
        delta = abs(pv - ref)
        ok &= delta <= cfg["tol"]
        rows.append({"s": s, "pv": pv, "minus_two_psi": ref, "delta": delta})
    return {"command": "verify gauss-weil", "tolerance": cfg["tol"], "points": rows}, ok


def cmd_verify_maass_selberg(cfg):
    """First-order convergence of the closed form to its limit at ``s``."""
    T = parse_real(cfg["T"])
    hs = parse_list(cfg["h"])
    points = []
    ok = True
    for s in parse_list(cfg["s"], parse_complex):
        lim = spectral.msr_limit(s, T)
        ratios = [abs(spectral.msr_closed_form(spectral.MsrScalarState(s + h, -s, T=T)) - lim) / h for h in hs]
        C = ratios[0]
        within = all(abs(r - C) <= cfg["tol"] * C for r in ratios)
        ok &= within
        points.append({"s": s, "limit": lim, "h": hs, "ratio": ratios, "C": C, "first_order": within})
    return {"command": "verify maass-selberg", "T": T, "band": cfg["tol"], "points": points}, ok


def cmd_bound_sweep(cfg):
    g = parse_testfn(cfg["g"] or "conv:" + cfg["g0"])
    grid = parse_grid(cfg["T_grid"])
    z = load_zero_source(cfg["zeros"], "zeta", cfg["cache_dir"])
    rows = spectral.bound_sweep(g, z, grid, form=cfg["form"])
    table = [{"T": r.T, "g1_log_T": r.g1_log_T, "pv": r.pv, "explicit_terms": r.explicit_terms,
              "bound": r.bound, "zero_sum": r.zero_sum, "slack": r.slack, "truncated_term": r.truncated_term}
             for r in rows]
    summary = spectral.sweep_summary(rows)
    ok = summary["min_slack"] >= -cfg["tol"]
    return {"command": "bound-sweep", "g": g.label, "form": cfg["form"], "tolerance": cfg["tol"],
            "summary": summary, "rows": table}, ok


def cmd_weil_positivity(cfg):
    grid = parse_list(cfg["t_grid"])
    z = load_zero_source(cfg["zeros"], "zeta", cfg["cache_dir"])
    rows = spectral.positivity_scan(grid, z)
    table = [{"t": r.t, "shape": r.shape, "abs_square": r.abs_square, "generic": r.generic,
              "explicit_side": r.explicit_side, "tail_bound": r.tail_bound} for r in rows]
    ok = all(r.abs_square >= -r.tail_bound and abs(r.abs_square - r.generic) <= cfg["tol"] for r in rows)
    mins = spectral.scan_minimum(rows)
    return {"command": "weil-positivity", "tolerance": cfg["tol"],
            "minimum": [{"t": t, "min_value": v} for t, v in sorted(mins.items())], "rows": table}, ok


def cmd_zeros(cfg, action, path):
    lid = cfg["id"]
    if lid != "zeta" and not lid.startswith("dirichlet:"):
        raise InputError(f"unknown L-function id {lid!r}")
    cache = zmod.cache_path(lid, cfg["cache_dir"])
    if action == "compute":
        z = zmod.cached_zeros(lid, parse_real(cfg["t_max"]), cfg["cache_dir"])
    elif action == "import":
        if path is None or not Path(path).is_file():
            raise InputError(f"zeros file {path} not found")
        z = zmod.load_zeros(path, lid)
        zmod.save_zeros(z, cache)
    else:
        if path is None:
            raise InputError("export needs a destination path")
        z = zmod.cached_zeros(lid, parse_real(cfg["t_max"]), cfg["cache_dir"])
        zmod.save_zeros(z, path)
    payload = {"command": f"zeros {action}", "id": lid, "count": int(z.gammas.size), "height": z.height_limit,
               "first": float(z.gammas[0]) if z.gammas.size else None, "cache": str(cache),
               "summary": f"{z.gammas.size} zeros"}
    return payload, True


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--tol", type=float, help="pass/fail tolerance")
    common.add_argument("--zeros", help="zero source: compute:HEIGHT or a file of ordinates")
    common.add_argument("--conj-zeros", dest="conj_zeros", help="zeros of the conjugate L-function (file or compute:)")
    common.add_argument("--cache-dir", "--zeros-cache", dest="cache_dir", help="cache root (default APP_CACHE)")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--output", "-o", help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="weiltrace", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    verify = sub.add_parser("verify", help="check one identity")
    vsub = verify.add_subparsers(dest="what", required=True)
    v = vsub.add_parser("zeta-explicit", parents=[common], help="spectral identity for zeta")
    v.add_argument("--g", "--testfn", dest="g")
    v.add_argument("--variant", choices=explicit.VARIANTS[:3])
    v = vsub.add_parser("hecke-explicit", parents=[common], help="explicit formula for a Dirichlet character")
    v.add_argument("--g", "--testfn", dest="g")
    v.add_argument("--chi", help="character label q.index")
    v.add_argument("--arch", choices=["kernel", "line"])
    v = vsub.add_parser("gauss-weil", parents=[common], help="principal-value digamma identity")
    v.add_argument("--s", help="comma list of complex points")
    v = vsub.add_parser("maass-selberg", parents=[common], help="closed form vs its h -> 0 limit")
    v.add_argument("--s", help="comma list of complex points")
    v.add_argument("--T")
    v.add_argument("--h", help="comma list of increments")

    b = sub.add_parser("bound-sweep", parents=[common], help="lower bound for a zero sum over a T grid")
    b.add_argument("--g", "--testfn", dest="g", help="test function (default conv:G0)")
    b.add_argument("--g0")
    b.add_argument("--T", dest="T_grid", help="lo:hi:logN, lo:hi:N or a comma list")
    b.add_argument("--form", choices=spectral.FORMS)

    w = sub.add_parser("weil-positivity", parents=[common], help="Weil functional on convolution squares")
    w.add_argument("--t", dest="t_grid", help="comma list of additive half-lengths (log2/2 style allowed)")

    z = sub.add_parser("zeros", help="compute, import or export zero tables")
    zsub = z.add_subparsers(dest="action", required=True)
    for action in ("compute", "import", "export"):
        a = zsub.add_parser(action, parents=[common])
        a.add_argument("--id", help="zeta or dirichlet:q.index")
        a.add_argument("--t-max", dest="t_max")
        if action != "compute":
            a.add_argument("path")
    return p


def _emit(payload, fmt, output):
    if fmt == "csv" and "rows" in payload:
        text = _csv(payload["rows"])
    else:
        text = to_json(payload)
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.what if args.verb == "verify" else args.verb
    try:
        cfg = resolve(args, command)
        if args.verb == "verify":
            fn = {"zeta-explicit": cmd_verify_zeta_explicit, "hecke-explicit": cmd_verify_hecke_explicit,
                  "gauss-weil": cmd_verify_gauss_weil, "maass-selberg": cmd_verify_maass_selberg}[args.what]
            payload, ok = fn(cfg)
        elif args.verb == "bound-sweep":
            payload, ok = cmd_bound_sweep(cfg)
        elif args.verb == "weil-positivity":
            payload, ok = cmd_weil_positivity(cfg)
        else:
            payload, ok = cmd_zeros(cfg, args.action, getattr(args, "path", None))
    except (InputError, ParameterError, DomainError, ZeroFileError, OSError) as exc:
        print(f"weiltrace: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (QuadratureError, IncompleteScanError) as exc:
        print(f"weiltrace: numerical failure: {exc}", file=sys.stderr)
        return EXIT_QUAD
    payload["passed"] = bool(ok)
    _emit(payload, cfg["format"], cfg["output"])
    if not ok:
        print("weiltrace: residual above tolerance", file=sys.stderr)
        return EXIT_RESIDUAL
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
