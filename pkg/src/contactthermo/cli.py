"""Command-line front end.

Exit codes: 0 when every check is within tolerance, 2 when a check fails,
1 for usage, domain or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .chart import TpsPoint, random_points, volume_nondegeneracy
from .dynamics import hamiltonian, integrate, lt_generator, mrugala_hamiltonians
from .errors import ContactThermoError
from .gauge import default_grid, representation_change_demo
from .legendre import Potential, tlt_isometry_check
from .metric import (check_structure, default_bundle, eta_einstein_residual, nabla_xi_check,
                     signature)
from .models import (IdealGasModel, VdwModel, coexistence_locus, gibbs_phase_rule,
                     maxwell_oracle, spinodal)
from .processes import (EQUILIBRIUM_TOL, entropy_production, entropy_production_closed_form,
                        run_process)

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- output -----------------------------------------------------------------

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _cell(v) -> str:
    v = _plain(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def render(report, fmt: str, columns=None) -> str:
    """CSV (rows of dicts, 17 significant digits) or canonical JSON."""
    if fmt == "json":
        return json.dumps(_plain(report), sort_keys=True, indent=2, allow_nan=True) + "\n"
    if fmt == "text":
        return f"{report}\n"
    rows = report if isinstance(report, list) else [report]
    cols = list(columns) if columns else (list(rows[0].keys()) if rows else [])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_cell(r.get(c, "")) for c in cols])
    return buf.getvalue()


def emit(report, fmt: str, path=None, columns=None) -> None:
    text = render(report, fmt, columns)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    Path(path).write_text(text, encoding="utf-8")


# --- argument helpers -----------------------------------------------------------

def parse_point(text: str) -> TpsPoint:
    """``"w=-1,q=1,2,p=3,4"``: bare values extend the previous key."""
    parts: dict[str, list[float]] = {}
    key = None
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        if "=" in tok:
            key, val = tok.split("=", 1)
            if key not in ("w", "q", "p"):
                raise UsageError(f"unknown coordinate {key!r} in {text!r}")
            parts[key] = []
        elif key is None:
            raise UsageError(f"cannot parse point {text!r}")
        else:
            val = tok
        try:
            parts[key].append(float(val))
        except ValueError:
            raise UsageError(f"bad number {val!r} in {text!r}") from None
    if set(parts) != {"w", "q", "p"} or len(parts["w"]) != 1:
        raise UsageError(f"point needs w, q and p: {text!r}")
    if len(parts["q"]) != len(parts["p"]):
        raise UsageError(f"q and p lengths differ in {text!r}")
    return TpsPoint.make(parts["w"][0], parts["q"], parts["p"])


def parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def parse_indices(text, n: int) -> list[int]:
    if text is None or text == "all":
        return list(range(n))
    idx = sorted({int(t) - 1 for t in str(text).split(",") if t.strip()})
    if any(i < 0 or i >= n for i in idx):
        raise UsageError(f"indices {text!r} outside 1..{n}")
    return idx


# --- subcommands ------------------------------------------------------------------

def cmd_check_structure(args):
    n, tol = args.n, args.tol
    rng = np.random.default_rng(args.seed)
    pts = random_points(rng, n, args.points)
    report = check_structure(default_bundle(), pts, tol)
    fact = math.factorial(n)
    vol_ok = all(volume_nondegeneracy(p) == fact for p in pts) if n <= 3 else None
    sig_ok = all(signature(p) == (n + 1, n) for p in pts)
    sub = pts[: args.curvature_points]
    nabla = max((nabla_xi_check(default_bundle(), p) for p in sub), default=0.0)
    report["volume_exact"] = vol_ok
    report["signature_ok"] = sig_ok
    report["nabla_xi_residual"] = nabla
    ok = report["pass"] and vol_ok is not False and sig_ok and nabla < 1e-4
    if n <= 2:
        ein = max((eta_einstein_residual(p) for p in sub), default=0.0)
        report["eta_einstein_residual"] = ein
        ok = ok and ein < 1e-3
    report["n"] = n
    report["seed"] = args.seed
    report["pass"] = bool(ok)
    if args.format == "csv":
        rows = [{"check": k, "max": v["max"], "tolerance": tol, "pass": v["pass"]}
                for k, v in sorted(report["residuals"].items())]
        return rows, ok, ["check", "max", "tolerance", "pass"]
    return report, ok, None


def _model(name, args):
    if name == "ideal-gas":
        return IdealGasModel()
    if name == "vdw":
        return VdwModel(a=args.a, b=args.b, R=args.R)
    raise UsageError(f"unknown model {name!r}")


def cmd_gauge(args):
    model = _model(args.model, args)
    rep = representation_change_demo(model, default_grid(model, args.grid), args.tol)
    cols = ["S", "V", "T", "ratio_deviation", "conformal_residual", "reeb_residual",
            "metric_closed_form_residual", "entropy_hessian_residual"]
    if args.format == "json":
        return rep, rep["pass"], None
    return rep["rows"], rep["pass"], cols


def cmd_legendre(args):
    if args.potential == "quadratic":
        w = Potential(2, lambda x: -0.5 * (x[0] * x[0] + x[1] * x[1]), "quadratic")
        axes = [np.linspace(-1.0, 1.0, args.grid)] * 2
        dom = None
    elif args.potential == "ideal-gas":
        w = IdealGasModel().molar_entropy
        axes = [np.linspace(0.5, 2.0, args.grid)] * 2
        dom = lambda q: q[0] > 0 and q[1] > 0
    elif args.potential == "vdw":
        m = VdwModel(a=args.a, b=args.b, R=args.R)
        T = args.Tr * m.critical_closed_form()[2]
        w = m.isotherm_potential(T)
        v_minus, v_plus = spinodal(m, T)
        axes = [np.linspace(0.5 * (m.b + v_minus), 2 * v_plus, args.grid)]
        dom = lambda q: q[0] > m.b
    else:
        raise UsageError(f"unknown potential {args.potential!r}")
    grid = [np.array(c) for c in np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(axes), -1).T]
    I = parse_indices(args.indices, w.n)
    rep = tlt_isometry_check(w, grid, I, in_domain=dom)
    total = rep["total"]
    ok = not (args.convex and rep["flagged"])
    if total:
        ok = ok and rep["max_residual"] < args.tol
    rows = [{**{f"q{a + 1}": r["q"][a] for a in range(w.n)}, "residual": r["residual"],
             "residual_any_sign": r["residual_any_sign"]} for r in rep["points"]]
    for r in rows:
        r["flag"] = ""
    rows += [{**{f"q{a + 1}": fl["q"][a] for a in range(w.n)}, "residual": "",
              "residual_any_sign": "", "flag": fl["reason"]} for fl in rep["flagged"]]
    rows.sort(key=lambda r: [r[f"q{a + 1}"] for a in range(w.n)])
    cols = [f"q{a + 1}" for a in range(w.n)] + ["residual", "residual_any_sign", "flag"]
    if args.format == "json":
        return rep, ok, None
    return rows, ok, cols


def _flow_hamiltonian(name: str, n: int):
    if name == "reeb":
        return hamiltonian(n, lambda x: 1.0 + 0 * x[0], "1")
    if name == "neg-w":
        return hamiltonian(n, lambda x: -x[0], "-w")
    if name == "lt":
        return lt_generator(n)
    if name.startswith("mrugala:"):
        model = _model(name.split(":", 1)[1], None) if name.endswith("ideal-gas") else None
        if model is None or n != 2:
            raise UsageError("mrugala flows need mrugala:ideal-gas with n = 2")
        return mrugala_hamiltonians(model.molar_entropy)[0]
    raise UsageError(f"unknown Hamiltonian {name!r}")


def cmd_flow(args):
    x0 = parse_point(args.x0)
    h = _flow_hamiltonian(args.hamiltonian, x0.n)
    tr = integrate(h, x0, args.tf, args.dt)
    n = x0.n
    cols = ["t", "w"] + [f"q{a + 1}" for a in range(n)] + [f"p{a + 1}" for a in range(n)] + ["h"]
    rows = [dict(zip(cols, [t, *x, hv])) for t, x, hv in zip(tr.t, tr.x, tr.h)]
    return rows, True, cols


def cmd_process(args):
    x0 = parse_point(args.x0)
    tol = args.tol if args.tol is not None else EQUILIBRIUM_TOL
    res = run_process(x0, args.tf, args.dt, tol)
    report = {
        "class": res.orbit.kind.value,
        "H0": res.orbit.H0,
        "entropy_production": res.entropy_production,
        "q_drift_max": res.q_drift_max,
        "h_law_residual": res.h_law_residual,
    }
    return report, True, None


def cmd_entropy_production(args):
    tol = args.tol
    rows, ok = [], True
    for H0 in parse_floats(args.H0):
        for tf in parse_floats(args.tf):
            x0 = TpsPoint.make(-H0, [0.0], [1.0])
            num = entropy_production(x0, tf)
            closed = entropy_production_closed_form(H0, tf)
            res = abs(num - closed)
            admissible = H0 >= 0
            if admissible and res >= tol:
                ok = False
            rows.append({"H0": H0, "t_f": tf, "S_num": num, "S_closed": closed,
                         "residual": res, "admissible": admissible})
    return rows, ok, ["H0", "t_f", "S_num", "S_closed", "residual", "admissible"]


def cmd_maxwell(args):
    m = VdwModel(a=args.a, b=args.b, R=args.R)
    Tc = m.critical_closed_form()[2]
    if args.T is not None:
        temps = parse_floats(args.T)
    elif args.grid:
        temps = [float(t) * Tc for t in np.linspace(0.5, 0.98, args.grid)]
    else:
        temps = [t * Tc for t in parse_floats(args.Tr)]
    rows = coexistence_locus(m, temps)
    ok = all(r["equal_area_residual"] < args.tol and r["mu_residual"] < args.tol for r in rows)
    if args.oracle:
        for r in rows:
            o = maxwell_oracle(m, r["T"])
            r["p_oracle"] = o.p_coex
    cols = ["T", "p_coex", "v_liquid", "v_gas", "equal_area_residual", "mu_residual",
            "T_r", "p_r", "v_liquid_r", "v_gas_r", "clapeyron_slope", "method"]
    if args.oracle:
        cols.append("p_oracle")
    if args.format == "json":
        return rows, ok, None
    return rows, ok, cols


def cmd_phase_rule(args):
    N = gibbs_phase_rule(args.C, args.r)
    if args.format == "json":
        return {"C": args.C, "r": args.r, "N": N}, True, None
    if args.format == "csv":
        return [{"C": args.C, "r": args.r, "N": N}], True, ["C", "r", "N"]
    return N, True, None


COMMANDS = {
    "check-structure": (cmd_check_structure, "json"),
    "gauge": (cmd_gauge, "csv"),
    "legendre": (cmd_legendre, "csv"),
    "flow": (cmd_flow, "csv"),
    "process": (cmd_process, "json"),
    "entropy-production": (cmd_entropy_production, "csv"),
    "maxwell": (cmd_maxwell, "csv"),
    "phase-rule": (cmd_phase_rule, "text"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--out", default=None)
    common.add_argument("--config", default=None, help="JSON file with flag values")

    p = _Parser(prog="contactthermo", description="Contact-geometric thermodynamics toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check-structure", parents=[common])
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--points", type=int, default=100)
    s.add_argument("--curvature-points", type=int, default=5)

    s = sub.add_parser("gauge", parents=[common])
    s.add_argument("--model", choices=["ideal-gas", "vdw"], default="ideal-gas")
    s.add_argument("--grid", type=int, default=5)
    _vdw_args(s)

    s = sub.add_parser("legendre", parents=[common])
    s.add_argument("--potential", choices=["ideal-gas", "vdw", "quadratic"], default="ideal-gas")
    s.add_argument("--indices", default="all")
    s.add_argument("--grid", type=int, default=4)
    s.add_argument("--Tr", type=float, default=0.9)
    s.add_argument("--convex", action="store_true")
    _vdw_args(s)

    s = sub.add_parser("flow", parents=[common])
    s.add_argument("--hamiltonian", default="neg-w")
    s.add_argument("--x0", default="w=-1,q=1,p=1")
    s.add_argument("--tf", type=float, default=1.0)
    s.add_argument("--dt", type=float, default=1e-2)

    s = sub.add_parser("process", parents=[common])
    s.add_argument("--x0", default="w=-1,q=1,p=1")
    s.add_argument("--tf", type=float, default=50.0)
    s.add_argument("--dt", type=float, default=1e-2)

    s = sub.add_parser("entropy-production", parents=[common])
    s.add_argument("--H0", default="-1,0,0.5,1,2")
    s.add_argument("--tf", default="1,0.6931471805599453,5,50")

    s = sub.add_parser("maxwell", parents=[common])
    s.add_argument("--T", default=None)
    s.add_argument("--Tr", default="0.9")
    s.add_argument("--grid", type=int, default=0)
    s.add_argument("--oracle", action="store_true")
    _vdw_args(s)

    s = sub.add_parser("phase-rule", parents=[common])
    s.add_argument("--C", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    return p


def _vdw_args(s):
    s.add_argument("--a", type=float, default=1.0)
    s.add_argument("--b", type=float, default=1.0)
    s.add_argument("--R", type=float, default=1.0)


DEFAULT_TOL = {"check-structure": 1e-8, "gauge": 1e-8, "legendre": 1e-6,
               "entropy-production": 1e-8, "maxwell": 1e-8}


def _load_config(path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items() if k != "command"}


def parse_args(argv):
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if a in COMMANDS), None)
    if known.config and command is not None:
        cfg = _load_config(known.config)
        sub = parser._subparsers._group_actions[0].choices[command]
        actions = {a.dest: a for a in sub._actions}
        unknown = sorted(set(cfg) - set(actions))
        if unknown:
            raise UsageError(f"unknown config keys for {command}: {', '.join(unknown)}")
        # config values become defaults (also for required flags); explicit flags still win
        for k in cfg:
            actions[k].required = False
        sub.set_defaults(**cfg)
    args = parser.parse_args(argv)
    if args.tol is None and args.command != "process":
        args.tol = DEFAULT_TOL.get(args.command, 1e-8)
    if args.tol is not None and not args.tol > 0:
        raise UsageError("--tol must be positive")
    if args.format is None:
        args.format = COMMANDS[args.command][1]
    return args


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        func, _ = COMMANDS[args.command]
        report, ok, columns = func(args)
        fmt = args.format
        emit(report, fmt, args.out, columns)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ContactThermoError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
