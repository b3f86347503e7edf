"""Command-line front end.

Subcommands: tensor, check, prior, posterior, verify-all.  Every run is
fully determined by its flags (the only RNG use is demo-data generation
under an explicit --seed), and identical invocations produce byte-identical
output files.

Exit status: 0 success, 1 check failure (diagnostic JSON on stdout),
2 usage or configuration error.
"""

import argparse
import json
import sys

import numpy as np

from . import bayes, geometry, priors
from .errors import WeylPriorError
from .models import get_model
from .numerics import DiffSpec, Path, QuadratureSpec
from .tensors import amari_chentsov, fisher_metric

CHECK_TOLERANCES = {
    "closedness": 1e-6,
    "duality": 1e-6,
    "weyl-compat": 1e-6,
    "ricci-symmetry": 1e-6,
    "gauge": 1e-6,
    "trace-identity": 1e-6,
    "nabla-g": 1e-6,
    "theorem-ratio": 1e-8,
    "weyl-constancy": 1e-6,
    "reparam-covariance": 1e-6,
}


def _parse_theta(text):
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise WeylPriorError(f"cannot parse parameter vector {text!r}") from None


def _parse_grid(text, chart_name):
    axes = []
    for part in text.split(","):
        name, _, spec = part.partition("=")
        if not spec:
            raise WeylPriorError(f"bad grid axis {part!r}; use name=min:max:count[:log]")
        bits = spec.split(":")
        if len(bits) not in (3, 4):
            raise WeylPriorError(f"bad grid axis {part!r}; use name=min:max:count[:log]")
        spacing = "linear"
        if len(bits) == 4:
            if bits[3] != "log":
                raise WeylPriorError(f"unknown spacing {bits[3]!r} in {part!r}")
            spacing = "log"
        try:
            axes.append(priors.Axis(name.strip(), float(bits[0]), float(bits[1]),
                                    int(bits[2]), spacing))
        except ValueError as exc:
            raise WeylPriorError(f"bad grid axis {part!r}: {exc}") from None
    return priors.GridSpec(tuple(axes), chart=chart_name)


def _quad(args):
    if getattr(args, "quad_nodes", None):
        return QuadratureSpec(args.quad_nodes)
    return None


def _diff(args):
    if getattr(args, "fd_step", None):
        return DiffSpec(rel_step=args.fd_step)
    return None


def _emit(payload, out=None):
    text = json.dumps(payload, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    print(text)


# ---------------------------------------------------------------------------
# subcommands

def cmd_tensor(args):
    model = get_model(args.model)
    theta = _parse_theta(args.theta)
    quad = _quad(args)
    g = fisher_metric(model, theta, args.chart, quad)
    c = amari_chentsov(model, theta, args.chart, quad)
    _emit({"g": g.g.tolist(), "C": c.C.tolist(),
           "theta": theta.tolist(), "chart": g.chart}, args.out)
    return 0


def _gauge_endpoint(model, theta, chart):
    ch = model.chart(chart)
    for scale in (0.25, -0.25, 0.1, -0.1, 0.05, -0.05):
        q = theta + scale * (np.abs(theta) + 1.0)
        if ch.contains(q) and geometry._path_in_domain([theta, q], ch.contains):
            return q
    raise WeylPriorError("could not find an in-domain gauge-check path endpoint")


def run_check(model, what, theta, alpha=1.0, chart=None, quad=None, diff=None,
              path_steps=256):
    """Evaluate one named residual; returns (max_residual, tolerance)."""
    tol = CHECK_TOLERANCES[what]
    if what == "closedness":
        res = np.max(np.abs(geometry.closedness_residual(model, theta, chart, quad, diff)))
    elif what == "duality":
        res = np.max(np.abs(geometry.duality_residual(model, theta, alpha, chart, quad, diff)))
    elif what == "nabla-g":
        res = np.max(np.abs(geometry.nabla_g_identity_residual(model, theta, alpha,
                                                               chart, quad, diff)))
    elif what == "weyl-compat":
        res = np.max(np.abs(geometry.weyl_compatibility_residual(model, theta, chart,
                                                                 quad, diff)))
    elif what == "ricci-symmetry":
        ric = geometry.ricci_tensor(model, theta, "alpha", alpha, chart, quad, diff)
        res = np.max(np.abs(ric - ric.T))
    elif what == "trace-identity":
        res = np.max(np.abs(geometry.trace_identity_residual(model, theta, chart,
                                                             quad, diff)))
    elif what == "gauge":
        q = _gauge_endpoint(model, theta, chart)
        path = Path([theta, q], steps=path_steps)
        res = geometry.gauge_rescale_check(model, lambda t: float(t[0]), path,
                                           chart, quad, diff)
    else:
        raise WeylPriorError(f"unknown check {what!r}")
    return float(res), tol


def cmd_check(args):
    model = get_model(args.model)
    theta = _parse_theta(args.theta)
    res, tol = run_check(model, args.what, theta, alpha=args.alpha,
                         chart=args.chart, quad=_quad(args), diff=_diff(args),
                         path_steps=args.path_steps)
    ok = res < tol
    _emit({"check": args.what, "theta": theta.tolist(), "max_residual": res,
           "tolerance": tol, "pass": bool(ok)}, args.out)
    return 0 if ok else 1


def cmd_prior(args):
    model = get_model(args.model)
    chart = args.chart
    grid = _parse_grid(args.grid, chart)
    anchor = _parse_theta(args.anchor) if args.anchor else None
    quad = _quad(args)
    if args.kind == "jeffreys":
        field = priors.jeffreys_field(model, grid, quad, normalize=args.normalize)
    elif args.kind == "alpha":
        if args.alpha is None:
            raise WeylPriorError("--kind alpha requires --alpha")
        field = priors.alpha_prior_field(model, grid, args.alpha, anchor, quad,
                                         normalize=args.normalize)
    else:
        field = priors.weyl_prior_field(model, grid, anchor, quad,
                                        normalize=args.normalize)
    priors.write_csv(field, args.out)
    return 0


def _demo_observations(model, theta, n, seed):
    if model.id != "gaussian1d":
        raise WeylPriorError("demo data generation is implemented for gaussian1d")
    rng = np.random.default_rng(seed)
    mu, s2 = theta
    return bayes.Dataset(rng.normal(mu, np.sqrt(s2), size=n), source="demo")


def cmd_posterior(args):
    model = get_model(args.model)
    if args.prior_file:
        names, pts, values = priors.read_csv(args.prior_file)
        if args.grid is None:
            raise WeylPriorError("--prior-file also needs --grid to recover cell volumes")
        grid = _parse_grid(args.grid, args.chart)
        if not np.allclose(grid.points(), pts):
            raise WeylPriorError("--grid does not match the points in --prior-file")
        field = priors.PriorField(pts, values, "jeffreys",
                                  args.chart or model.reference, grid=grid)
    else:
        grid = _parse_grid(args.grid, args.chart)
        anchor = _parse_theta(args.anchor) if args.anchor else None
        if args.prior_kind == "jeffreys":
            field = priors.jeffreys_field(model, grid, _quad(args))
        elif args.prior_kind == "alpha":
            field = priors.alpha_prior_field(model, grid, args.alpha, anchor, _quad(args))
        else:
            field = priors.weyl_prior_field(model, grid, anchor, _quad(args))
    if args.data:
        data = bayes.load_observations(args.data, model)
    elif args.demo_n:
        if args.seed is None:
            raise WeylPriorError("demo data needs an explicit --seed")
        data = _demo_observations(model, _parse_theta(args.demo_theta),
                                  args.demo_n, args.seed)
    else:
        raise WeylPriorError("posterior needs --data or --demo-n")
    post = bayes.grid_posterior(model, field, data)
    with open(args.out, "w", newline="") as fh:
        fh.write(",".join(list(field.grid.names) + ["log_density", "mass"]) + "\n")
        for pt, lv, mass in zip(post.points, post.log_values, post.masses):
            row = [repr(float(c)) for c in pt] + [repr(float(lv)), repr(float(mass))]
            fh.write(",".join(row) + "\n")
    return 0


DEFAULT_TEST_POINTS = {
    "gaussian1d": ["0,1", "1,2", "-1,4"],
    "bernoulli": ["0.3", "0.5"],
    "poisson": ["1", "4"],
}


def _test_points(model):
    if model.id.startswith("gaussian_mv"):
        n = model.sample_space.dim
        eye = np.eye(n)
        pts = []
        for sig in (eye, eye + 0.5 * np.diag(np.arange(n))):
            from .models import vech_from_mat
            pts.append(np.concatenate([np.zeros(n), vech_from_mat(sig)]))
        return pts
    return [_parse_theta(t) for t in DEFAULT_TEST_POINTS[model.id]]


def cmd_verify_all(args):
    model = get_model(args.model)
    quad = _quad(args)
    failures = 0
    results = []

    def record(check, theta, res, tol):
        nonlocal failures
        ok = res < tol
        failures += 0 if ok else 1
        entry = {"check": check, "theta": np.asarray(theta).tolist(),
                 "max_residual": float(res), "tolerance": tol, "pass": bool(ok)}
        results.append(entry)
        print(json.dumps(entry))

    for theta in _test_points(model):
        for what in ("closedness", "weyl-compat", "trace-identity", "gauge"):
            res, tol = run_check(model, what, theta, chart=args.chart, quad=quad)
            record(what, theta, res, tol)
        for alpha in (-2.0, 0.0, 1.0):
            res, tol = run_check(model, "duality", theta, alpha=alpha,
                                 chart=args.chart, quad=quad)
            record(f"duality(alpha={alpha})", theta, res, tol)
            res, tol = run_check(model, "nabla-g", theta, alpha=alpha,
                                 chart=args.chart, quad=quad)
            record(f"nabla-g(alpha={alpha})", theta, res, tol)
        for alpha in (-2.0, 0.0, 1.0, 2.0):
            res, tol = run_check(model, "ricci-symmetry", theta, alpha=alpha,
                                 chart=args.chart, quad=quad)
            record(f"ricci-symmetry(alpha={alpha})", theta, res, tol)

    if model.id == "gaussian1d":
        grid = _parse_grid("mu=-2:2:11,s2=0.25:16:11:log", args.chart)
        anchor = np.array([0.0, 1.0])
        ratio = priors.theorem_ratio_check(model, grid, anchor, quad)
        record("theorem-ratio", anchor, ratio["max_rel_deviation"],
               CHECK_TOLERANCES["theorem-ratio"])
        wf = priors.weyl_prior_field(model, grid, anchor, quad)
        spread = (wf.values.max() - wf.values.min()) / wf.values.mean()
        record("weyl-constancy", anchor, spread, CHECK_TOLERANCES["weyl-constancy"])
        moved = priors.reparam_transform(wf, model, "mu_sigma")
        native = priors.prior_values(model, moved.points, "weyl",
                                     anchor=np.array([0.0, 1.0]),
                                     chart="mu_sigma", quad=quad)
        dev = np.max(np.abs(moved.values - native) / np.abs(native))
        record("reparam-covariance", anchor, dev,
               CHECK_TOLERANCES["reparam-covariance"])

    summary = {"model": model.id, "checks": len(results), "failures": failures}
    print(json.dumps(summary))
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="weylprior",
        description="Fisher/Amari-Chentsov tensors, alpha and Weyl connections, "
                    "and the resulting prior fields for parametric families.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--model", required=True,
                       help="gaussian1d | gaussian_mv:n | bernoulli | poisson")
        p.add_argument("--chart", default=None)
        p.add_argument("--quad-nodes", type=int, default=None)
        p.add_argument("--fd-step", type=float, default=None)
        p.add_argument("--out", default=None)

    p = sub.add_parser("tensor", help="metric and cubic tensor at a point, as JSON")
    common(p)
    p.add_argument("--theta", required=True)
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("check", help="evaluate one geometric identity residual")
    common(p)
    p.add_argument("--what", required=True,
                   choices=["closedness", "duality", "weyl-compat",
                            "ricci-symmetry", "gauge", "trace-identity", "nabla-g"])
    p.add_argument("--theta", required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--path-steps", type=int, default=256)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("prior", help="prior density field over a grid, as CSV")
    common(p)
    p.add_argument("--kind", required=True, choices=["jeffreys", "alpha", "weyl"])
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--anchor", default=None)
    p.add_argument("--grid", required=True,
                   help='e.g. "mu=-2:2:21,s2=0.25:16:21:log"')
    p.add_argument("--normalize", action="store_true")
    p.set_defaults(func=cmd_prior)

    p = sub.add_parser("posterior", help="grid posterior from a prior and data")
    common(p)
    p.add_argument("--prior-file", default=None)
    p.add_argument("--prior-kind", default="jeffreys",
                   choices=["jeffreys", "alpha", "weyl"])
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--anchor", default=None)
    p.add_argument("--grid", default=None)
    p.add_argument("--data", default=None)
    p.add_argument("--demo-n", type=int, default=None)
    p.add_argument("--demo-theta", default="1,2")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_posterior)

    p = sub.add_parser("verify-all", help="run the full invariant suite for a model")
    common(p)
    p.set_defaults(func=cmd_verify_all)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("prior", "posterior") and not args.out:
        parser.error(f"{args.command} requires --out")
    try:
        return args.func(args)
    except WeylPriorError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
