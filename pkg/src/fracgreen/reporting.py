"""File emission for CLI runs: JSON report arrays, delimited tables, and
rendered figures.

Numeric formatting is fixed (repr-faithful %.17g) so identical numerics
reproduce identical bytes; runtimeMs is the only field expected to vary
between reruns of the same configuration.
"""

import csv
import json

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _fmt(v):
    return "%.17g" % float(v)


def write_reports_json(reports, path):
    payload = [r.to_json_dict() for r in reports]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_reports_csv(reports, path):
    """One row per report; vector lhs/rhs are reduced to their max-residual
    component so the table stays rectangular."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        # no runtime column: the CSV is byte-reproducible across reruns
        w.writerow(["index", "identity", "N", "s", "x", "residual", "tolerance", "passed"])
        for k, r in enumerate(reports):
            x = r.params.get("x", "")
            if isinstance(x, (list, tuple)):
                x = ";".join(_fmt(t) for t in x)
            elif x != "":
                x = _fmt(x)
            w.writerow(
                [
                    k,
                    r.identity,
                    r.params.get("N", ""),
                    _fmt(r.params["s"]),
                    x,
                    _fmt(r.residual),
                    _fmt(r.tolerance),
                    int(r.passed),
                ]
            )


def render_residual_figure(reports, path):
    fig, ax = plt.subplots(figsize=(7, 4))
    res = np.array([max(r.residual, 1e-18) for r in reports])
    tol = np.array([r.tolerance for r in reports])
    idx = np.arange(len(reports))
    colors = ["tab:blue" if r.passed else "tab:red" for r in reports]
    ax.scatter(idx, res, c=colors, zorder=3, label="residual")
    ax.plot(idx, np.maximum(tol, 1e-18), "k--", lw=1, label="tolerance")
    ax.set_yscale("log")
    ax.set_xlabel("report index")
    ax.set_ylabel("residual")
    names = sorted({r.identity for r in reports})
    ax.set_title("identity residuals: " + ", ".join(names))
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def write_solution_csv(sol, path):
    """Columns: x, u, delta^s, u/delta^s."""
    d = sol.domain
    s = sol.params.s
    xs = sol.u.points[:, 0]
    delta = np.minimum(xs - d.a, d.b - xs) ** s
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "u", "delta_s", "u_over_delta_s"])
        for x, u, ds in zip(xs, sol.u.values, delta):
            w.writerow([_fmt(x), _fmt(u), _fmt(ds), _fmt(u / ds)])


def write_plot_data(sol, path):
    """Two-column TSV (x, u) for external plotting."""
    xs = sol.u.points[:, 0]
    with open(path, "w") as fh:
        for x, u in zip(xs, sol.u.values):
            fh.write("%s\t%s\n" % (_fmt(x), _fmt(u)))


def write_solution_summary(sol, path):
    payload = {
        "N": sol.params.N,
        "s": sol.params.s,
        "domain": {"a": sol.domain.a, "b": sol.domain.b},
        "h": sol.h,
        "gridPoints": int(sol.u.values.size),
        "iterations": int(sol.iterations),
        "residual": float(sol.residual),
        "traceNodes": [float(t) for t in sol.trace.rule.nodes[:, 0]],
        "traceValues": [float(t) for t in sol.trace.values],
        "supNorm": float(np.max(np.abs(sol.u.values))),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def render_solution_figure(sol, path):
    d = sol.domain
    s = sol.params.s
    xs = sol.u.points[:, 0]
    delta = np.minimum(xs - d.a, d.b - xs) ** s
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    axes[0].plot(xs, sol.u.values, lw=1.2)
    axes[0].set_xlabel("x")
    axes[0].set_ylabel("u")
    axes[0].set_title("solution (s=%g)" % s)
    axes[1].plot(xs, sol.u.values / delta, lw=1.2, color="tab:orange")
    axes[1].set_xlabel("x")
    axes[1].set_ylabel("u / delta^s")
    axes[1].set_title("boundary-normalized profile")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def write_constant_json(estimate, p, path):
    payload = {
        "N": p.N,
        "s": p.s,
        "value": float(estimate.value),
        "errorBar": float(estimate.error_bar),
        "evaluations": int(estimate.evaluations),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
