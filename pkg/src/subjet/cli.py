"""Command-line entry point: ``subjet {check,transform,simulate,grad-check}``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration
error, 3 numeric failure (singular chart, domain violation, step failure,
sampling exhausted).
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import campaign
from .charts import (SectionJet, SplitChart, SubmanifoldJet, affine, identity_transition,
                     inverse_relation_residual, is_regular, lift, lift_relation_residual,
                     lorentz_boost, permutation, project, regular_chart,
                     transform_section_jet, transform_submanifold_jet)
from .dynamics import ParticleState, helix_oracle, integrate
from .errors import ConfigError, SubjetError
from .models import LAGRANGIANS, HAMILTONIANS, build_hamiltonian, build_lagrangian

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


def load_schema(name):
    text = resources.files("subjet").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(payload, name):
    try:
        jsonschema.validate(payload, load_schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{name} schema violation at {where}: {exc.message}") from None


def _read_json(path):
    try:
        if path in (None, "-"):
            return json.load(sys.stdin)
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read JSON from {path}: {exc}") from None


def load_scenario(path, args) -> dict:
    scenario = _read_json(path) if path else {}
    validate(scenario, "scenario")
    sampling = dict(scenario.get("sampling", {}))
    if getattr(args, "seed", None) is not None:
        sampling["seed"] = args.seed
    if getattr(args, "samples", None) is not None:
        sampling["count"] = args.samples
    if sampling:
        scenario["sampling"] = sampling
    if getattr(args, "tol", None) is not None:
        scenario["tolerances"] = {c: args.tol for c in scenario.get("checks", [])}
    output = dict(scenario.get("output", {}))
    if getattr(args, "out", None):
        output["path"] = args.out
    if getattr(args, "format", None):
        output["format"] = args.format
    if output:
        scenario["output"] = output
    validate(scenario, "scenario")
    return scenario


def _emit(text, path):
    if path:
        Path(path).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# -- check -----------------------------------------------------------------------

def cmd_check(args) -> int:
    scenario = load_scenario(args.config, args)
    report = campaign.run_checks(scenario)
    out = scenario.get("output", {}).get("path")
    if out:
        _emit(report.to_json(), out)
    print(report.table())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_grad_check(args) -> int:
    scenario = load_scenario(args.config, args) if args.config else {}
    if args.config is None:
        if args.seed is not None or args.samples is not None:
            scenario["sampling"] = {k: v for k, v in
                                    (("seed", args.seed), ("count", args.samples))
                                    if v is not None}
    sampling = scenario.get("sampling", {})
    sampling.setdefault("count", 100)
    scenario["sampling"] = sampling
    tol = args.tol if args.tol is not None else campaign.TOLERANCES["grad-audit"]
    if "model" in scenario or "hamiltonian" in scenario:
        names = [scenario[k] for k in ("model", "hamiltonian") if k in scenario]
    else:
        names = list(LAGRANGIANS) + list(HAMILTONIANS)
    report = campaign.Report(seed=int(sampling.get("seed", 0)),
                             config_hash=campaign.config_hash(scenario))
    spec = campaign.sampling_from_scenario(scenario)
    model_cfg = {k: scenario[k] for k in ("metric", "sign", "potential", "two_form")
                 if k in scenario}
    streams = np.random.SeedSequence(report.seed).spawn(len(names))
    for name, ss in zip(names, streams):
        subject = (build_lagrangian(name, model_cfg) if name in LAGRANGIANS
                   else build_hamiltonian(name, model_cfg))
        report.checks.append(campaign.run_grad_audit(subject, np.random.default_rng(ss),
                                                     spec, tol))
    out = scenario.get("output", {}).get("path")
    if out:
        _emit(report.to_json(), out)
    print(report.table())
    return EXIT_OK if report.passed else EXIT_FAIL


# -- transform ---------------------------------------------------------------

def jet_from_payload(payload):
    """Parse a jet payload into a SubmanifoldJet or SectionJet."""
    validate(payload, "jet")
    if "three_velocity" in payload:
        u = np.asarray(payload["three_velocity"], dtype=float)
        m = u.size + 1
        z = np.asarray(payload.get("z", np.zeros(m)), dtype=float)
        chart = SplitChart.leading(m, 1)
        return SubmanifoldJet(chart, z[:1], z[1:], u.reshape(-1, 1))
    if "base" in payload:
        chart = SplitChart(payload["m"], payload["n"], tuple(payload["base"]))
        return SubmanifoldJet(chart, payload["x"], payload["y"], payload["yx"])
    if "zq" in payload:
        if np.shape(payload["zq"]) != (payload["m"], payload["n"]):
            raise ConfigError(f"zq must be {payload['m']}x{payload['n']}")
        return SectionJet(payload["q"], payload["z"], payload["zq"])
    raise ConfigError("payload is not a jet")


def jet_to_payload(j, three_velocity=False):
    if isinstance(j, SubmanifoldJet):
        if three_velocity and j.chart.n == 1 and j.chart.base == (0,):
            return {"three_velocity": j.yx[:, 0].tolist(), "z": j.z.tolist()}
        return {"n": j.chart.n, "m": j.chart.m, "base": list(j.chart.base),
                "x": j.x.tolist(), "y": j.y.tolist(), "yx": j.yx.tolist()}
    return {"n": j.n, "m": j.m, "q": j.q.tolist(), "z": j.z.tolist(), "zq": j.zq.tolist()}


def transition_from_args(args, m):
    name = args.transition
    if name == "identity":
        return identity_transition()
    if name == "boost":
        alpha = -args.alpha if args.inverse else args.alpha
        return lorentz_boost(alpha, args.axis, m)
    if name == "permutation":
        if not args.perm:
            raise ConfigError("--perm is required for a permutation transition")
        perm = [int(p) for p in args.perm.split(",")]
        if len(perm) != m:
            raise ConfigError(f"--perm must list {m} indices")
        if args.inverse:
            perm = list(np.argsort(perm))
        return permutation(perm)
    if name == "affine":
        if not args.matrix:
            raise ConfigError("--matrix is required for an affine transition")
        A = np.asarray(json.loads(args.matrix), dtype=float)
        b = np.zeros(m) if not args.offset else np.asarray(json.loads(args.offset), dtype=float)
        if A.shape != (m, m) or b.shape != (m,):
            raise ConfigError(f"affine transition needs a {m}x{m} matrix and {m}-vector offset")
        if args.inverse:
            A = np.linalg.inv(A)
            b = -A @ b
        return affine(A, b)
    raise ConfigError(f"unknown transition {name!r}")


def cmd_transform(args) -> int:
    payload = _read_json(args.input)
    j = jet_from_payload(payload)
    three = "three_velocity" in payload
    m = j.chart.m if isinstance(j, SubmanifoldJet) else j.m
    t = transition_from_args(args, m)
    op = args.op
    if op in ("submanifold", "lift", "roundtrip") and not isinstance(j, SubmanifoldJet):
        raise ConfigError(f"--op {op} needs a submanifold jet")
    if op in ("section", "project") and not isinstance(j, SectionJet):
        raise ConfigError(f"--op {op} needs a section jet")

    xq = None if args.xq is None else np.asarray(json.loads(args.xq), dtype=float)
    if op == "submanifold":
        target = (j.chart if args.target_base is None else
                  SplitChart(j.chart.m, j.chart.n, tuple(int(i) for i in args.target_base.split(","))))
        out = transform_submanifold_jet(j, t, target)
        residual = inverse_relation_residual(j, out, t)
    elif op == "section":
        out = transform_section_jet(j, t)
        # the lift relation must survive the coordinate change
        before = project(j, regular_chart(j))
        after = project(out, regular_chart(out))
        moved = transform_submanifold_jet(before, t, after.chart)
        residual = float(np.max(np.abs(moved.yx - after.yx), initial=0.0))
    elif op == "lift":
        out = lift(j, xq)
        residual = lift_relation_residual(j, out)
    elif op == "project":
        if args.target_base is not None:
            chart = SplitChart(j.m, j.n, tuple(int(i) for i in args.target_base.split(",")))
        elif is_regular(j):
            chart = regular_chart(j)
        else:
            # report the failure against the leading chart
            chart = SplitChart.leading(j.m, j.n)
        out = project(j, chart)
        residual = lift_relation_residual(out, j)
    else:
        back = project(lift(j, xq), j.chart)
        out = back
        residual = float(max(np.max(np.abs(back.yx - j.yx), initial=0.0),
                             np.max(np.abs(back.z - j.z), initial=0.0)))
    result = {"op": op, "transition": t.name, "input": payload,
              "output": jet_to_payload(out, three_velocity=three),
              "relation_residual": residual}
    validate(result, "transform")
    _emit(json.dumps(result, indent=2), args.out)
    return EXIT_OK


# -- simulate ----------------------------------------------------------------

def default_integration(metric):
    """Particle at rest at the origin, 1000 steps of 0.01."""
    if metric.g[0, 0] <= 0:
        raise ConfigError("no default initial state: coordinate 0 is not timelike")
    v0 = np.zeros(metric.m)
    v0[0] = 1.0 / np.sqrt(metric.g[0, 0])
    return {"z0": [0.0] * metric.m, "v0": v0.tolist(), "step": 0.01, "steps": 1000}


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.config, args)
    name = scenario.get("model", "free-particle")
    if name not in ("free-particle", "charged-particle"):
        raise ConfigError(f"simulate needs a point-particle model, got {name!r}")
    model_cfg = {k: scenario[k] for k in ("metric", "sign", "potential") if k in scenario}
    model = build_lagrangian(name, model_cfg)
    metric = model.params["metric"]
    integ = scenario.get("integration") or default_integration(metric)
    z0 = np.asarray(integ["z0"], dtype=float)
    v0 = np.asarray(integ["v0"], dtype=float)
    if z0.size != metric.m or v0.size != metric.m:
        raise ConfigError(f"z0 and v0 need {metric.m} components")
    n2 = metric.inner(v0, v0)
    if n2 <= 0:
        raise ConfigError(f"initial velocity is not timelike: g(v0, v0) = {n2:g}")
    if abs(n2 - 1.0) > 1e-10:
        raise ConfigError(f"initial velocity is not normalised: g(v0, v0) = {n2!r}")
    tau0 = float(integ.get("tau0", 0.0))
    traj = integrate(model, ParticleState(tau0, z0, v0), integ["step"], integ["steps"],
                     integ.get("project_every", 1), integ.get("periods"))

    output = scenario.get("output", {})
    fmt = output.get("format", "csv")
    text = traj.to_csv() if fmt == "csv" else traj.to_json()
    if fmt == "json":
        validate(json.loads(text), "trajectory")
    _emit(text, output.get("path"))

    potential = model.params.get("potential")
    A0 = potential.value(z0) if potential is not None else np.zeros(metric.m)
    p0 = metric.g @ v0 - np.asarray(A0, dtype=float)
    pend_A = potential.value(traj.z[-1]) if potential is not None else np.zeros(metric.m)
    pend = metric.g @ traj.v[-1] - np.asarray(pend_A, dtype=float)
    summary = {"samples": len(traj), "drift": traj.drift,
               "energy_change": float(abs(pend[0] - p0[0])),
               "momentum_change": float(np.max(np.abs(pend - p0)))}
    pot = scenario.get("potential")
    if name == "charged-particle" and (pot is None or pot.get("kind") == "magnetic") \
            and np.array_equal(metric.g, np.diag(np.diag(metric.g))) and np.all(np.diag(metric.g)[1:] < 0):
        B = 1.0 if pot is None else pot["B"]
        plane = (1, 2) if pot is None else tuple(pot.get("plane", (1, 2)))
        zo, _ = helix_oracle(z0, v0, B, traj.tau - tau0, plane)
        summary["oracle_error"] = float(np.max(np.abs(zo - traj.z)))
        if B != 0:
            period = 2 * np.pi / abs(B)
            turns = (traj.tau[-1] - tau0) / period
            if abs(turns - round(turns)) < 1e-9 and round(turns) > 0:
                idx = list(plane)
                summary["closure_error"] = float(np.max(np.abs(traj.z[-1, idx] - z0[idx])))
    stream = sys.stderr if output.get("path") is None else sys.stdout
    for key, val in summary.items():
        print(f"{key:>16}: {val:.6g}" if isinstance(val, float) else f"{key:>16}: {val}",
              file=stream)
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="subjet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required):
        p.add_argument("--config", required=config_required, help="scenario JSON file")
        p.add_argument("--seed", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--out")
        p.add_argument("--format", choices=("csv", "json"))

    common(sub.add_parser("check", help="run residual campaigns"), True)
    common(sub.add_parser("simulate", help="integrate a particle worldline"), True)
    common(sub.add_parser("grad-check", help="hyper-dual vs finite-difference audit"), False)

    t = sub.add_parser("transform", help="transform, lift or project a jet")
    t.add_argument("--input", default="-", help="jet JSON file (default stdin)")
    t.add_argument("--op", choices=("submanifold", "section", "lift", "project", "roundtrip"),
                   default="submanifold")
    t.add_argument("--transition", choices=("identity", "boost", "permutation", "affine"),
                   default="identity")
    t.add_argument("--alpha", type=float, default=0.0, help="boost rapidity")
    t.add_argument("--axis", type=int, default=1, help="boost axis")
    t.add_argument("--perm", help="comma-separated permutation")
    t.add_argument("--matrix", help="affine matrix as JSON")
    t.add_argument("--offset", help="affine offset as JSON")
    t.add_argument("--inverse", action="store_true", help="apply the inverse transition")
    t.add_argument("--target-base", help="comma-separated base indices of the target chart")
    t.add_argument("--xq", help="n x n matrix x^a_mu for lift, as JSON")
    t.add_argument("--out")
    t.add_argument("--format", choices=("json",), default="json")
    return parser


COMMANDS = {"check": cmd_check, "transform": cmd_transform, "simulate": cmd_simulate,
            "grad-check": cmd_grad_check}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SubjetError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except np.linalg.LinAlgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
