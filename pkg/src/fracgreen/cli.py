"""Command-line front end: solve problems, verify identities, estimate the
universal interaction constant, and sweep parameters.

Exit codes: 0 all checks passed / run completed; 1 at least one identity
check failed; 2 invalid configuration (bad flags, config file, expression,
unknown identity, unsupported dimension); 3 numerical failure (convergence
or extrapolation breakdown).
"""

import argparse
import configparser
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import sympy

from . import reporting
from .domain import GeometryError, make_domain
from .fracop import CapabilityError, DEFAULT_PROFILE, SQUARED_PROFILE, a_constant
from .greenfn import NumericalError
from .identities import (
    PohozaevFunction,
    check_dedu,
    check_grad_green_l1,
    check_green_bounds,
    check_pohozaev,
    check_robin_grad,
    check_robin_symmetry,
    check_thm11_high,
    check_thm11_low,
    check_thm15,
)
from .solver import ConvergenceError, SourceTerm, solve_linear, solve_semilinear
from .specfun import FracParams


class ConfigError(ValueError):
    pass


# descriptive names first; compact tokens kept as quiet aliases
IDENTITY_ALIASES = {
    "deriv-const-source": "dedu",
    "dedu": "dedu",
    "deriv-volume-high": "thm11_high",
    "thm11-high": "thm11_high",
    "deriv-volume-low": "thm11_low",
    "thm11-low": "thm11_low",
    "green-pair-gradient": "thm15",
    "thm15": "thm15",
    "robin-grad": "robinGrad",
    "robin-gradient": "robinGrad",
    "robin-symmetry": "robinSymmetry",
    "pohozaev": "pohozaev",
    "green-bounds": "greenBounds",
    "grad-green-l1": "gradGreenL1",
}


def _parse_point(text, dim):
    vals = [float(t) for t in str(text).split(",")]
    if len(vals) == 1 and dim > 1:
        raise ConfigError("point needs %d comma-separated components" % dim)
    if len(vals) != dim:
        raise ConfigError("point has %d components, domain is %d-dimensional" % (len(vals), dim))
    return vals[0] if dim == 1 else np.array(vals)


def _parse_range(text):
    """'a:b:step' -> inclusive grid."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError("range must be start:stop:step")
    a, b, st = (float(t) for t in parts)
    if st <= 0:
        raise ConfigError("range step must be positive")
    n = int(np.floor((b - a) / st + 1e-9))
    return [a + st * k for k in range(n + 1)]


def _expr_functions():
    return {
        "exp": sympy.exp,
        "log": sympy.log,
        "sqrt": sympy.sqrt,
        "sin": sympy.sin,
        "cos": sympy.cos,
        "abs": sympy.Abs,
        "Abs": sympy.Abs,
        "pi": sympy.pi,
    }


def _broadcast1(fn):
    def g(z):
        z = np.asarray(z, dtype=float)
        out = np.asarray(fn(z), dtype=float)
        if out.shape != z.shape:
            out = np.broadcast_to(out, z.shape).astype(float)
        return out

    return g


def _broadcast2(fn):
    def g(z, q):
        z = np.asarray(z, dtype=float)
        out = np.asarray(fn(z, np.asarray(q, dtype=float)), dtype=float)
        if out.shape != z.shape:
            out = np.broadcast_to(out, z.shape).astype(float)
        return out

    return g


def parse_source_expression(text):
    """Small arithmetic language over x (space) and u (state): + - * / **,
    exp, log, sqrt, sin, cos.  Returns a SourceTerm; u-dependence makes it
    semilinear, and exact symbolic partials ride along for the identity
    checkers."""
    x, u = sympy.symbols("x u")
    ns = dict(_expr_functions())
    ns["x"] = x
    ns["u"] = u
    try:
        expr = sympy.sympify(str(text).replace("^", "**"), locals=ns)
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise ConfigError("cannot parse source expression %r: %s" % (text, exc))
    extra = expr.free_symbols - {x, u}
    if extra:
        raise ConfigError("unknown symbols in source expression: %s" % sorted(map(str, extra)))

    dh = sympy.diff(expr, x)
    dq = sympy.diff(expr, u)
    if u in expr.free_symbols:
        return SourceTerm(
            kind="semilinear",
            evaluator=_broadcast2(sympy.lambdify((x, u), expr, "numpy")),
            partial_h=_broadcast2(sympy.lambdify((x, u), dh, "numpy")),
            partial_q=_broadcast2(sympy.lambdify((x, u), dq, "numpy")),
        )
    fn = _broadcast1(sympy.lambdify(x, expr, "numpy"))
    dfn = _broadcast1(sympy.lambdify(x, dh, "numpy"))
    return SourceTerm(
        kind="pureSpace",
        evaluator=fn,
        partial_h=lambda z, q: dfn(z),
        partial_q=lambda z, q: np.zeros_like(np.asarray(z, dtype=float)),
    )


def _build_parser():
    top = argparse.ArgumentParser(
        prog="fracgreen",
        description="Fractional-Laplacian Green functions, solvers, and identity checks.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file; flags override its values")
    common.add_argument("--out", help="output directory (default fracgreen-out)")
    common.add_argument("--jobs", type=int, help="worker threads (default THREADS env or 1)")
    common.add_argument("--tol", type=float, help="tolerance override")
    common.add_argument("--domain", choices=["interval", "ball"], help="domain kind")
    common.add_argument("--a", type=float, help="interval left endpoint")
    common.add_argument("--b", type=float, help="interval right endpoint")
    common.add_argument("--center", help="ball center, comma-separated")
    common.add_argument("--radius", type=float, help="ball radius")
    common.add_argument("--dim", type=int, help="ball dimension")
    common.add_argument("--N", type=int, help="ambient dimension")
    common.add_argument("--s", help="fractional order in (0,1)")

    sub = top.add_subparsers(dest="command")

    ps = sub.add_parser("solve", parents=[common], help="solve a Dirichlet problem")
    ps.add_argument("--f", help="source expression in x (and u for semilinear)")
    ps.add_argument("--h", type=float, help="grid spacing (default 1/256)")
    ps.add_argument("--max-iter", type=int, dest="max_iter", help="semilinear iteration cap")

    pv = sub.add_parser("verify", parents=[common], help="run one identity checker")
    pv.add_argument("--identity", help="identity name")
    pv.add_argument("--x", help="evaluation point (comma-separated for balls)")
    pv.add_argument("--y", help="second point for the pair-gradient identity")
    pv.add_argument("--axis", type=int, help="component index (default 0)")
    pv.add_argument("--axis-i", type=int, dest="axis_i", help="second axis for mixed derivative")
    pv.add_argument("--sweep-x", dest="sweep_x", help="x sweep start:stop:step")
    pv.add_argument("--f", help="source expression for representation identities")
    pv.add_argument("--h", type=float, help="solver grid spacing")
    pv.add_argument("--samples", type=int, help="pair count for bound sampling")
    pv.add_argument("--seed", type=int, help="sampling seed")
    pv.add_argument("--levels", type=int, help="refinement levels for the L1 study")
    pv.add_argument("--order", type=int, help="boundary rule order for balls")

    pc = sub.add_parser("constant", parents=[common], help="estimate the interaction constant")
    pc.add_argument("--budget", type=int, help="refinement budget (default 2)")
    pc.add_argument("--profile", choices=["default", "squared"], help="cutoff profile")

    pw = sub.add_parser("sweep", parents=[common], help="identity checks over a parameter grid")
    pw.add_argument("--identity", help="identity name")
    pw.add_argument("--x", help="evaluation point")
    pw.add_argument("--y", help="second point for the pair-gradient identity")
    pw.add_argument("--axis", type=int, help="component index (default 0)")
    pw.add_argument("--axis-i", type=int, dest="axis_i")
    pw.add_argument("--sweep-x", dest="sweep_x", help="x grid start:stop:step")
    pw.add_argument("--sweep-s", dest="sweep_s", help="s grid start:stop:step")
    pw.add_argument("--f", help="source expression")
    pw.add_argument("--h", type=float)
    pw.add_argument("--samples", type=int)
    pw.add_argument("--seed", type=int)
    pw.add_argument("--levels", type=int)
    pw.add_argument("--order", type=int)
    return top


def _apply_config_file(ns):
    """Fill argparse namespace holes from the INI file; flags win."""
    if not ns.config:
        return
    if not os.path.exists(ns.config):
        raise ConfigError("config file not found: %s" % ns.config)
    cp = configparser.ConfigParser()
    try:
        cp.read(ns.config)
    except configparser.Error as exc:
        raise ConfigError("bad config file: %s" % exc)
    for section in cp.sections():
        if section not in ("global", "run", ns.command):
            continue
        for key, val in cp.items(section):
            dest = key.replace("-", "_")
            if not hasattr(ns, dest):
                raise ConfigError("unknown config key %r in [%s]" % (key, section))
            if getattr(ns, dest) is None:
                setattr(ns, dest, val)


def _coerce(ns):
    """Config-file values arrive as strings; coerce the typed ones."""
    for key in ("a", "b", "radius", "tol", "h"):
        v = getattr(ns, key, None)
        if isinstance(v, str):
            setattr(ns, key, float(v))
    for key in ("N", "dim", "jobs", "axis", "axis_i", "samples", "seed", "levels",
                "order", "budget", "max_iter"):
        v = getattr(ns, key, None)
        if isinstance(v, str):
            setattr(ns, key, int(v))


def _the_domain(ns):
    kind = ns.domain or "interval"
    if kind == "interval":
        a = -1.0 if ns.a is None else ns.a
        b = 1.0 if ns.b is None else ns.b
        return make_domain("interval", a=a, b=b)
    dim = ns.dim or 2
    center = np.zeros(dim)
    if ns.center:
        center = np.array([float(t) for t in str(ns.center).split(",")])
        if center.size != dim:
            raise ConfigError("center has %d components for dim %d" % (center.size, dim))
    radius = 1.0 if ns.radius is None else ns.radius
    return make_domain("ball", center=center, radius=radius, dim=dim)


def _the_params(ns, d, s=None):
    if s is None:
        if ns.s is None:
            raise ConfigError("--s is required")
        s = float(ns.s)
    N = ns.N if ns.N is not None else d.dim
    if N != d.dim:
        raise ConfigError("N=%d does not match the %d-dimensional domain" % (N, d.dim))
    try:
        return FracParams(N, s)
    except ValueError as exc:
        raise ConfigError(str(exc))


def _out_dir(ns):
    path = ns.out or "fracgreen-out"
    try:
        os.makedirs(path, exist_ok=True)
        probe = os.path.join(path, ".writable")
        with open(probe, "w") as fh:
            fh.write("ok")
        os.remove(probe)
    except OSError as exc:
        raise ConfigError("output directory not writable: %s" % exc)
    return path


def _jobs(ns):
    if ns.jobs is not None:
        return max(1, ns.jobs)
    env = os.environ.get("THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _run_one_identity(key, p, d, x, ns):
    tol = ns.tol
    h = ns.h or 1.0 / 256
    if key == "dedu":
        return check_dedu(p, d, x, order=ns.order, tol=tol)
    if key == "thm11_high":
        if ns.f is None:
            raise ConfigError("this identity needs --f")
        return check_thm11_high(p, d, parse_source_expression(ns.f), x, h=h, tol=tol or 1e-3)
    if key == "thm11_low":
        if ns.f is None:
            raise ConfigError("this identity needs --f")
        return check_thm11_low(p, d, parse_source_expression(ns.f), x, h=h, tol=tol or 5e-3)
    if key == "thm15":
        if ns.y is None:
            raise ConfigError("this identity needs --y")
        y = _parse_point(ns.y, d.dim)
        return check_thm15(p, d, x, y, ns.axis or 0, order=ns.order, tol=tol)
    if key == "robinGrad":
        return check_robin_grad(p, d, x, ns.axis or 0, tol=tol)
    if key == "robinSymmetry":
        return check_robin_symmetry(p, d, ns.axis or 0, i=ns.axis_i, tol=tol)
    if key == "pohozaev":
        v = PohozaevFunction.torsion(p, d)
        if ns.f is None:
            w = v
        else:
            src = parse_source_expression(ns.f)
            sol = (
                solve_linear(p, d, src, h)
                if src.kind == "pureSpace"
                else solve_semilinear(p, d, src, h)
            )
            w = PohozaevFunction.from_solution(sol)
        return check_pohozaev(p, d, v, w, ns.axis or 0, tol=tol or (1e-3 if ns.f is None else 5e-3))
    if key == "greenBounds":
        return check_green_bounds(p, d, ns.samples or 10000, seed=ns.seed or 0)
    if key == "gradGreenL1":
        return check_grad_green_l1(p, d, x, levels=ns.levels or 8)
    raise ConfigError("unhandled identity %r" % key)


def _identity_points(key, d, ns, s_values):
    """(s, x) evaluation grid; identities that take no point get x=None."""
    needs_x = key in ("dedu", "thm11_high", "thm11_low", "thm15", "robinGrad", "gradGreenL1")
    if not needs_x:
        return [(s, None) for s in s_values]
    if ns.sweep_x:
        xs = _parse_range(ns.sweep_x)
        if d.dim > 1:
            raise ConfigError("--sweep-x applies to interval domains")
    elif ns.x is not None:
        xs = [_parse_point(ns.x, d.dim)]
    else:
        raise ConfigError("this identity needs --x or --sweep-x")
    return [(s, x) for s in s_values for x in xs]


def _emit_reports(reports, out, tag):
    reporting.write_reports_json(reports, os.path.join(out, "%s.json" % tag))
    reporting.write_reports_csv(reports, os.path.join(out, "%s.csv" % tag))
    reporting.render_residual_figure(reports, os.path.join(out, "%s.png" % tag))


def _print_report(k, r):
    x = r.params.get("x", "")
    if isinstance(x, (list, tuple)):
        x = "(" + ",".join("%g" % t for t in x) + ")"
    elif x != "":
        x = "%g" % x
    print(
        "[%2d] %-13s s=%-5g %s residual=%.3e tol=%.1e %s (%.0f ms)"
        % (
            k,
            r.identity,
            r.params["s"],
            ("x=%s" % x) if x != "" else "",
            r.residual,
            r.tolerance,
            "PASS" if r.passed else "FAIL",
            r.runtime_ms,
        )
    )


def _cmd_verify(ns):
    if not ns.identity:
        raise ConfigError("--identity is required")
    key = IDENTITY_ALIASES.get(ns.identity)
    if key is None:
        raise ConfigError("unknown identity %r (known: %s)"
                          % (ns.identity, ", ".join(sorted(set(IDENTITY_ALIASES)))))
    d = _the_domain(ns)
    if ns.s is None:
        raise ConfigError("--s is required")
    points = _identity_points(key, d, ns, [float(ns.s)])
    out = _out_dir(ns)
    reports = []
    for s, x in points:
        p = _the_params(ns, d, s)
        reports.append(_run_one_identity(key, p, d, x, ns))
    _emit_reports(reports, out, "reports")
    for k, r in enumerate(reports):
        _print_report(k, r)
    n_fail = sum(1 for r in reports if not r.passed)
    print("%d/%d passed; reports in %s" % (len(reports) - n_fail, len(reports), out))
    return 0 if n_fail == 0 else 1


def _cmd_sweep(ns):
    if not ns.identity:
        raise ConfigError("--identity is required")
    key = IDENTITY_ALIASES.get(ns.identity)
    if key is None:
        raise ConfigError("unknown identity %r" % ns.identity)
    d = _the_domain(ns)
    if ns.sweep_s:
        s_values = _parse_range(ns.sweep_s)
    elif ns.s is not None:
        s_values = [float(ns.s)]
    else:
        raise ConfigError("sweep needs --s or --sweep-s")
    points = _identity_points(key, d, ns, s_values)
    out = _out_dir(ns)

    def work(item):
        s, x = item
        p = _the_params(ns, d, s)
        return _run_one_identity(key, p, d, x, ns)

    with ThreadPoolExecutor(max_workers=_jobs(ns)) as pool:
        # map preserves input order regardless of completion order
        reports = list(pool.map(work, points))
    _emit_reports(reports, out, "sweep")
    for k, r in enumerate(reports):
        _print_report(k, r)
    n_fail = sum(1 for r in reports if not r.passed)
    print("%d/%d passed; reports in %s" % (len(reports) - n_fail, len(reports), out))
    return 0 if n_fail == 0 else 1


def _cmd_constant(ns):
    if ns.N is None or ns.s is None:
        raise ConfigError("constant needs --N and --s")
    if ns.N not in (1, 2):
        raise ConfigError("constant is implemented for N in {1, 2}")
    p = FracParams(ns.N, float(ns.s))
    profile = SQUARED_PROFILE if ns.profile == "squared" else DEFAULT_PROFILE
    try:
        est = a_constant(p, profile=profile, budget=2 if ns.budget is None else ns.budget)
    except CapabilityError as exc:
        raise ConfigError(str(exc))
    out = _out_dir(ns)
    reporting.write_constant_json(est, p, os.path.join(out, "constant.json"))
    bar = max(est.error_bar, 1e-12)
    digits = max(2, int(np.ceil(-np.log10(bar))) + 1)
    print("a(N=%d, s=%g) = %.*f ± %.*f" % (p.N, p.s, digits, est.value, digits, bar))
    tol = 1e-2 if ns.tol is None else ns.tol
    return 0 if abs(est.value + 2.0) <= est.error_bar + tol else 1


def _cmd_solve(ns):
    if ns.f is None:
        raise ConfigError("solve needs --f")
    d = _the_domain(ns)
    if d.dim != 1:
        raise ConfigError("solve is implemented on intervals")
    p = _the_params(ns, d)
    src = parse_source_expression(ns.f)
    h = ns.h or 1.0 / 256
    if src.kind == "pureSpace":
        sol = solve_linear(p, d, src, h)
    else:
        sol = solve_semilinear(p, d, src, h, max_iter=ns.max_iter or 200)
    out = _out_dir(ns)
    reporting.write_solution_csv(sol, os.path.join(out, "solution.csv"))
    reporting.write_plot_data(sol, os.path.join(out, "solution.tsv"))
    reporting.write_solution_summary(sol, os.path.join(out, "summary.json"))
    reporting.render_solution_figure(sol, os.path.join(out, "solution.png"))
    print(
        "solved: %d grid points, %d iteration(s), residual %.2e; files in %s"
        % (sol.u.values.size, sol.iterations, sol.residual, out)
    )
    return 0


_NEGATIVE_VALUE_FLAGS = {
    "--x", "--y", "--s", "--a", "--b", "--center", "--sweep-x", "--sweep-s", "--tol",
}


def _preprocess_argv(argv):
    """Let value flags accept leading-minus values (sweeps like -0.9:0.9:0.1)
    by folding them into --flag=value form before argparse sees them."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _NEGATIVE_VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append("%s=%s" % (tok, nxt))
        else:
            out.append(tok)
    return out


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    parser = _build_parser()
    ns = parser.parse_args(_preprocess_argv(list(argv)))
    if not ns.command:
        parser.print_help()
        return 2
    try:
        _apply_config_file(ns)
        _coerce(ns)
        if ns.command == "verify":
            return _cmd_verify(ns)
        if ns.command == "sweep":
            return _cmd_sweep(ns)
        if ns.command == "constant":
            return _cmd_constant(ns)
        if ns.command == "solve":
            return _cmd_solve(ns)
        return 2
    except (ConfigError, GeometryError, CapabilityError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (NumericalError, ConvergenceError, FloatingPointError) as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
