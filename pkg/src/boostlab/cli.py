"""Command line front end.

Subcommands cover the package's reproduction scenarios: realignment
curves over the one-parameter family, a random simplex scan, the
activation run, separability certification of a boosted marginal, the
stored-ensemble check, and a witness report.

Exit codes: 0 on success, 2 when a reproduction check misses its
tolerance (certificate not reached, stored-ensemble mismatch, witness
calibration failure), 1 on operational errors (bad inputs, unreadable
files; anything raising LabError).

Every command accepts --config FILE with a flat JSON object that fills
in defaults; flags given explicitly always win.  Output files land in
--out when given, else in $BOOSTLAB_OUT (default: the working
directory) under a per-command name.  CSV cells carry repr() of Python
floats, so every value round-trips to the exact double.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .analysis import (
    PPT_TOL,
    SolverBudget,
    WitnessReport,
    boost_witness,
    calibrate_witness,
    classify,
    ppt_min_eigenvalue,
    realignment_curve,
    rlgmt,
    separable_bounds,
    spin_traced_witness,
    witness_expectation,
    witness_total,
)
from .errors import LabError, NoConvergence, OutOfRange
from .linalg import purity, realign, singular_values
from .relativity import (
    BoostParams,
    boost_two_particle,
    boosted_spin_marginal,
    build_rho0,
    four_momentum,
    momentum_spin_product,
    spin_marginal,
)
from .separability import certify_separable, verify_appendix_fixture
from .states import PHI_INTERPRETATIONS, simplex_state

CURVE_XIS = (0.0, 0.5, 0.8, 1.0)


# ---------------------------------------------------------------------------
# Shared plumbing


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise LabError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise LabError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise LabError(f"config {path} must hold a JSON object")
    return cfg


def _pick(flag_value, cfg, key, default):
    """Explicit flag > config entry > built-in default."""
    if flag_value is not None:
        return flag_value
    if key in cfg:
        return cfg[key]
    return default


def _number(token):
    """Float or fraction literal ('0.1', '1/300')."""
    try:
        return float(token)
    except ValueError:
        pass
    try:
        return float(Fraction(token))
    except (ValueError, ZeroDivisionError) as exc:
        raise LabError(f"cannot parse number {token!r}") from exc


def _parse_direction(text):
    parts = str(text).split(",")
    if len(parts) != 3:
        raise LabError(f"--direction needs three comma-separated components, got {text!r}")
    return tuple(_number(p) for p in parts)


def _parse_grid(text):
    parts = str(text).split(":")
    if len(parts) != 3:
        raise LabError(f"--x-grid needs start:stop:step, got {text!r}")
    start, stop, step = (_number(p) for p in parts)
    if step <= 0 or stop < start:
        raise LabError(f"bad grid {text!r}: need step > 0 and stop >= start")
    return np.arange(start, stop + step / 2.0, step)


def _out_path(explicit, default_name):
    if explicit is not None:
        return Path(explicit)
    return Path(os.environ.get("BOOSTLAB_OUT", ".")) / default_name


def _write_text(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise LabError(f"cannot write {path}: {exc}") from exc


def _csv(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) if not isinstance(v, str) else v for v in row))
    return "\n".join(lines) + "\n"


def _json_text(obj):
    return json.dumps(obj, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Commands


def cmd_realignment_curve(args):
    cfg = _load_config(args.config)
    grid = _parse_grid(_pick(args.x_grid, cfg, "x_grid", "0:1/3:1/300"))
    xis = _pick(args.xi, cfg, "xi", list(CURVE_XIS))
    energy = _pick(args.energy, cfg, "energy", 1.0)
    direction = _parse_direction(_pick(args.direction, cfg, "direction", "0,0,1"))
    rows = []
    for xi in xis:
        curve = realignment_curve(grid, BoostParams(direction, float(xi)), energy)
        rows.extend((x, float(xi), v) for x, v in curve)
    out = _out_path(args.out, "realignment_curve.csv")
    _write_text(out, _csv(("x", "xi", "rlgmt"), rows))
    print(f"realignment-curve: {len(rows)} rows ({len(grid)} grid points x {len(xis)} rapidities) -> {out}")
    return 0


def cmd_simplex_scan(args):
    cfg = _load_config(args.config)
    samples = int(_pick(args.samples, cfg, "samples", 5000))
    xi = float(_pick(args.xi, cfg, "xi", 0.8))
    energy = float(_pick(args.energy, cfg, "energy", 1.0))
    direction = _parse_direction(_pick(args.direction, cfg, "direction", "0,0,1"))
    seed = int(_pick(args.seed, cfg, "seed", 0))
    if samples < 1:
        raise OutOfRange(f"samples must be positive, got {samples}")
    rng = np.random.default_rng(seed)
    coeffs = rng.dirichlet(np.ones(9), size=samples)
    momenta = (four_momentum(energy, +1), four_momentum(energy, -1))
    boost = BoostParams(direction, xi)
    psi_mom = np.array([0.0, 1.0, 1.0, 0.0]) / np.sqrt(2.0)
    header = (
        "c00", "c01", "c02", "c10", "c11", "c12", "c20", "c21", "c22",
        "purity", "realign_sum_minus_1", "min_pt_eig", "label",
        "boosted_purity", "boosted_realign_sum_minus_1",
    )
    rows = []
    for c in coeffs:
        rho = simplex_state(c.reshape(3, 3))
        res = classify(rho)  # no solver budget: labels stay cheap
        rsum = float(singular_values(realign(rho)).sum() - 1.0)
        boosted = spin_marginal(
            boost_two_particle(momentum_spin_product(psi_mom, rho, momenta), boost)
        )
        brsum = float(singular_values(realign(boosted)).sum() - 1.0)
        rows.append(
            tuple(c)
            + (purity(rho), rsum, res.min_pt_eigenvalue, res.label, purity(boosted), brsum)
        )
    out = _out_path(args.out, "simplex_scan.csv")
    _write_text(out, _csv(header, rows))
    mean_p = float(np.mean([r[9] for r in rows]))
    mean_bp = float(np.mean([r[13] for r in rows]))
    print(
        f"simplex-scan: {samples} samples at rapidity {xi} -> {out} "
        f"(mean purity {mean_p:.6f}, boosted {mean_bp:.6f})"
    )
    return 0


def cmd_activate(args):
    cfg = _load_config(args.config)
    p = float(_pick(args.p, cfg, "p", 0.04))
    x = float(_pick(args.x, cfg, "x", 7.0 / 60.0))
    xi = float(_pick(args.xi, cfg, "xi", 0.95))
    energy = float(_pick(args.energy, cfg, "energy", 1.0))
    direction = _parse_direction(_pick(args.direction, cfg, "direction", "0,0,1"))
    interp = _pick(args.interpretation, cfg, "interpretation", "bell-mixture")
    if interp not in PHI_INTERPRETATIONS:
        raise LabError(f"unknown interpretation {interp!r}; choose from {PHI_INTERPRETATIONS}")
    state = build_rho0(p, x, energy, interp)
    before = spin_marginal(state)
    after = spin_marginal(boost_two_particle(state, BoostParams(direction, xi)))
    report = {
        "p": p,
        "x": x,
        "xi": xi,
        "energy": energy,
        "interpretation": interp,
        "unboosted": {"min_pt_eigenvalue": ppt_min_eigenvalue(before), "rlgmt": rlgmt(before)},
        "boosted": {"min_pt_eigenvalue": ppt_min_eigenvalue(after), "rlgmt": rlgmt(after)},
    }
    report["activated"] = bool(
        report["unboosted"]["min_pt_eigenvalue"] >= PPT_TOL
        and report["boosted"]["min_pt_eigenvalue"] < -1e-4
    )
    out = _out_path(args.out, "activate.json")
    _write_text(out, _json_text(report))
    print(
        "activate: min PT eig {0:+.6e} -> {1:+.6e}, rlgmt {2:.6f} -> {3:.6f}, activated={4} -> {5}".format(
            report["unboosted"]["min_pt_eigenvalue"],
            report["boosted"]["min_pt_eigenvalue"],
            report["unboosted"]["rlgmt"],
            report["boosted"]["rlgmt"],
            report["activated"],
            out,
        )
    )
    return 0


def cmd_certify(args):
    cfg = _load_config(args.config)
    x = float(_pick(args.x, cfg, "x", 1.0 / 15.0))
    xi = float(_pick(args.xi, cfg, "xi", 0.8))
    energy = float(_pick(args.energy, cfg, "energy", 1.0))
    direction = _parse_direction(_pick(args.direction, cfg, "direction", "0,0,1"))
    k = int(_pick(args.k_terms, cfg, "k_terms", 10))
    restarts = int(_pick(args.restarts, cfg, "restarts", 16))
    tol = float(_pick(args.tol, cfg, "tol", 1e-6))
    seed = int(_pick(args.seed, cfg, "seed", 0))
    rho = boosted_spin_marginal(x, xi, energy, direction)
    result = certify_separable(rho, k=k, restarts=restarts, tol=tol, seed=seed)
    payload = result.to_dict()
    payload["scenario"] = {"x": x, "xi": xi, "energy": energy, "direction": list(direction)}
    out = _out_path(args.out, "certify.json")
    _write_text(out, _json_text(payload))
    status = "certificate found" if result.success else "no certificate"
    print(
        f"certify: x={x} rapidity={xi} k={k}: {status}, gap {result.gap:.3e} "
        f"after {len(result.history)} restart(s) -> {out}"
    )
    return 0 if result.success else 2


def cmd_verify_appendix(args):
    cfg = _load_config(args.config)
    fixture = _pick(args.fixture, cfg, "fixture", None)
    report = verify_appendix_fixture(fixture)
    out = _out_path(args.out, "verify_appendix.json")
    _write_text(out, _json_text(report))
    for name, ok in report["checks"].items():
        print(f"verify-appendix: {name}: {'ok' if ok else 'FAIL'}")
    print(
        f"verify-appendix: gap {report['gap']:.3e}, weight sum {report['prob_sum']!r}, "
        f"max product defect {report['max_product_defect']:.3e} -> {out}"
    )
    return 0 if report["passed"] else 2


def cmd_witness_report(args):
    cfg = _load_config(args.config)
    x = float(_pick(args.x, cfg, "x", 2.0 / 15.0))
    xi = float(_pick(args.xi, cfg, "xi", 0.8))
    energy = float(_pick(args.energy, cfg, "energy", 1.0))
    direction = _parse_direction(_pick(args.direction, cfg, "direction", "0,0,1"))
    restarts = int(_pick(args.restarts, cfg, "restarts", 64))
    seed = int(_pick(args.seed, cfg, "seed", 0))
    from .analysis import affine_fit
    from .relativity import build_rho1
    from .states import rho_b

    try:
        convention, w_spin = calibrate_witness()
        momenta = (four_momentum(energy, +1), four_momentum(energy, -1))
        boost = BoostParams(direction, xi)
        w_total = witness_total(w_spin)
        w_boosted_total = boost_witness(w_total, boost, momenta)
        w_eff = spin_traced_witness(w_boosted_total)

        xs = np.linspace(0.0, 1.0 / 3.0, 9)
        total_vals = []
        spin_boosted = []
        for xv in xs:
            state = boost_two_particle(build_rho1(float(xv), energy), boost)
            total_vals.append(witness_expectation(w_boosted_total, state.rho))
            # what a spin-only observer measures after the boost
            spin_boosted.append(witness_expectation(w_eff, spin_marginal(state)))
        spin_unboosted = [witness_expectation(w_spin, rho_b(float(xv))) for xv in xs]

        value = witness_expectation(
            w_eff, boosted_spin_marginal(x, xi, energy, direction)
        )
        lower, upper = separable_bounds(w_eff, restarts=restarts, seed=seed)
        lo0, hi0 = separable_bounds(w_spin, restarts=restarts, seed=seed)
    except NoConvergence as exc:
        print(f"witness-report: calibration failed: {exc}", file=sys.stderr)
        return 2
    report = WitnessReport(
        value=value,
        lower=lower,
        upper=upper,
        convention_id=convention,
        direction=direction,
        rapidity=xi,
        tolerances={"calibration_fit": 1e-3, "seesaw_convergence": 1e-12},
    )

    def fit_dict(vals):
        slope, intercept = affine_fit(xs, vals)
        return {"slope": slope, "intercept": intercept}

    payload = report.to_dict()
    payload["x"] = x
    payload["fits"] = {
        "total_boosted": fit_dict(total_vals),
        "spin_unboosted": fit_dict(spin_unboosted),
        "spin_boosted": fit_dict(spin_boosted),
    }
    payload["windows"] = {
        "spin_unboosted": [lo0, hi0],
        "spin_boosted": [lower, upper],
    }
    out = _out_path(args.out, "witness_report.json")
    _write_text(out, _json_text(payload))
    verdict = "outside" if (value < lower or value > upper) else "inside"
    ft = payload["fits"]
    print(f"witness-report: convention {convention}")
    print(
        "witness-report: fits: total {0:.4f}+{1:.4f}x, spin unboosted {2:.4f}+{3:.4f}x, "
        "spin at xi={4}: {5:.4f}+{6:.4f}x".format(
            ft["total_boosted"]["intercept"], ft["total_boosted"]["slope"],
            ft["spin_unboosted"]["intercept"], ft["spin_unboosted"]["slope"],
            xi, ft["spin_boosted"]["intercept"], ft["spin_boosted"]["slope"],
        )
    )
    print(
        f"witness-report: value {value:.6f} at x={x:.6f} {verdict} separable window "
        f"({lower:.6f}, {upper:.6f}) at rapidity {xi} -> {out}"
    )
    return 0


# ---------------------------------------------------------------------------
# Parser


def _add_common(sp):
    sp.add_argument("--config", help="JSON file with default parameter values")
    sp.add_argument("--out", help="output file path")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="boostlab",
        description="Numerical lab for boosted two-qutrit states: build, boost, marginalise, classify.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("realignment-curve", help="realignment criterion over the one-parameter family")
    sp.add_argument("--x-grid", help="grid as start:stop:step (fractions allowed)")
    sp.add_argument("--xi", action="append", type=float, help="rapidity; repeat for several curves")
    sp.add_argument("--energy", type=float)
    sp.add_argument("--direction", help="boost direction as three comma-separated components")
    _add_common(sp)
    sp.set_defaults(func=cmd_realignment_curve)

    sp = sub.add_parser("simplex-scan", help="random Bell-diagonal states, before and after a boost")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--xi", type=float)
    sp.add_argument("--energy", type=float)
    sp.add_argument("--direction")
    sp.add_argument("--seed", type=int)
    _add_common(sp)
    sp.set_defaults(func=cmd_simplex_scan)

    sp = sub.add_parser("activate", help="PPT state whose boosted marginal turns NPT")
    sp.add_argument("--p", type=float)
    sp.add_argument("--x", type=float)
    sp.add_argument("--xi", type=float)
    sp.add_argument("--energy", type=float)
    sp.add_argument("--direction")
    sp.add_argument("--interpretation", help=f"one of {', '.join(PHI_INTERPRETATIONS)}")
    _add_common(sp)
    sp.set_defaults(func=cmd_activate)

    sp = sub.add_parser("certify", help="separable decomposition of a boosted marginal")
    sp.add_argument("--x", type=float)
    sp.add_argument("--xi", type=float)
    sp.add_argument("--energy", type=float)
    sp.add_argument("--direction")
    sp.add_argument("--k-terms", type=int)
    sp.add_argument("--restarts", type=int)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--seed", type=int)
    _add_common(sp)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("verify-appendix", help="check the stored ensemble against a fresh computation")
    sp.add_argument("--fixture", help="path to an ensemble JSON (default: packaged fixture)")
    _add_common(sp)
    sp.set_defaults(func=cmd_verify_appendix)

    sp = sub.add_parser("witness-report", help="witness expectation against its separable window")
    sp.add_argument("--x", type=float)
    sp.add_argument("--xi", type=float)
    sp.add_argument("--energy", type=float)
    sp.add_argument("--direction")
    sp.add_argument("--restarts", type=int)
    sp.add_argument("--seed", type=int)
    _add_common(sp)
    sp.set_defaults(func=cmd_witness_report)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
