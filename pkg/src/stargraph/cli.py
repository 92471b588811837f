"""Command-line entry point: every experiment as a subcommand.

Library modules do the work; this layer parses flags, merges an
optional flat config file (flags win), routes to the producing module,
and writes the declared file formats into --out.  Subcommands:

    eigen           solve a spectrum window, write the spectrum CSV
    dist-z-k        uniform-k samples of Z/v with a Cauchy KS summary
    dist-z-lengths  fixed-k, random-lengths samples of Z/v, same summary
    dist-zprime     eigenvalue samples of Z'(k_n)/v^2 against the limit P
    dist-amp        eigenvalue samples of v^2 A_i against the limit Q
    limit-p         tabulate the limit density P on a grid
    limit-q         tabulate the limit density Q on a grid
    abel            eigenfunction value density from Q by Abel transform
    surface         one surface-measure Monte Carlo estimate
    seba-det        normalized rectangle-spectrum sums, Cauchy KS summary
    seba-coef       scaled squared coefficient samples and the constant c
    reproduce       run a named figure preset (CSVs + report + PNG)
    selfcheck       run the acceptance criteria, nonzero exit on failure

Invalid flags exit 2 (argparse); numerical failures raised by library
modules exit 1 with their diagnostic on stderr.
"""

import argparse
import json
import os
import sys

import numpy as np

from .errors import NumericalError
from .model import BondLengths, LengthBox, generate_lengths, load_config
from .reduction import reduce_mod_pi
from . import acceptance, densities, reproduce, seba, secular, stats, torus


def _comma_floats(text):
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma-separated "
                                         "list of numbers, got %r" % text)
    if not values:
        raise argparse.ArgumentTypeError("empty length list")
    return np.array(values, dtype=np.float64)


def _comma_ints(text):
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated "
                                         "integers, got %r" % text)


def _add_common(parser):
    parser.add_argument("--config", metavar="FILE",
                        help="flat key=value file; explicit flags override")
    parser.add_argument("--seed", type=int, default=None,
                        help="RNG seed (default 0, or the preset's)")
    parser.add_argument("--out", default=".", metavar="DIR",
                        help="output directory (default current)")
    parser.add_argument("--threads", type=int, default=os.cpu_count(),
                        help="worker threads (default all cores; results "
                             "do not depend on the count)")


def _add_graph(parser):
    parser.add_argument("--v", type=int, default=None,
                        help="bond count (default 7)")
    parser.add_argument("--l-bar", type=float, default=None,
                        help="box center L-bar (default 2)")
    parser.add_argument("--delta-l", type=float, default=None,
                        help="box width DeltaL (default 1)")
    parser.add_argument("--lengths", type=_comma_floats, default=None,
                        metavar="L1,L2,...",
                        help="explicit bond lengths, overriding generation")


def _add_samples(parser, default=100_000):
    parser.add_argument("--samples", type=int, default=None,
                        help="sample count (default %d)" % default)
    parser.set_defaults(samples_default=default)


def _pick(*candidates):
    for c in candidates:
        if c is not None:
            return c
    return None


def _settle(args):
    """Merge config-file values under explicit flags, then defaults."""
    cfg = load_config(args.config) if getattr(args, "config", None) else {}
    # reproduce keeps None so the preset's own seed applies
    default_seed = None if args.func is _cmd_reproduce else 0
    args.seed = _pick(args.seed, cfg.get("seed"), default_seed)
    if hasattr(args, "v"):
        args.v = _pick(args.v, cfg.get("v"), 7)
    if hasattr(args, "l_bar"):
        args.l_bar = _pick(args.l_bar, cfg.get("l_bar"), 2.0)
    if hasattr(args, "delta_l"):
        args.delta_l = _pick(args.delta_l, cfg.get("delta_l"), 1.0)
    if hasattr(args, "samples"):
        args.samples = _pick(args.samples, cfg.get("sample_count"),
                             args.samples_default)


def _graph(args):
    if args.lengths is not None:
        return BondLengths(args.lengths)
    return generate_lengths(LengthBox(args.l_bar, args.delta_l),
                            args.v, seed=args.seed)


def _path(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _write_json(payload, path):
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _eigen_points(args, lengths, n_eigs):
    if getattr(args, "k_start", 0.0):
        return secular.eigenvalue_window(lengths, args.k_start, n_eigs,
                                         threads=args.threads)
    return secular.eigenvalues(lengths, n_eigs, threads=args.threads)


# ---------------------------------------------------------------------------
# subcommand bodies


def _cmd_eigen(args):
    lengths = _graph(args)
    points = _eigen_points(args, lengths, args.n)
    path = _path(args, "spectrum.csv")
    secular.write_spectrum_csv(points, path)
    print("wrote %s (%d eigenvalues, k in [%.6g, %.6g])"
          % (path, len(points), points[0].k, points[-1].k))
    return 0


def _sample_summary(args, tag, emp, cdf):
    base = tag.replace("-", "_")
    stats.write_samples_csv(emp, _path(args, base + "_samples.csv"))
    stats.write_histogram_csv(stats.histogram(emp, clip=(-8.0, 8.0)),
                              _path(args, base + "_histogram.csv"))
    summary = stats.ks_summary(emp, cdf)
    stats.write_ks_json(summary, _path(args, base + "_ks.json"))
    print("n=%d  KS=%.4f  (99%% threshold %.4f)  -> %s_*.{csv,json} in %s"
          % (summary["n"], summary["ks"], summary["ks_99_threshold"],
             base, args.out))
    return 0


def _cmd_dist_z_k(args):
    lengths = _graph(args)
    k_max = args.k_max if args.k_max is not None else 1e4 * np.pi / args.l_bar
    emp = stats.sample_z_over_k(lengths, k_max, args.samples,
                                seed=args.seed, threads=args.threads)
    return _sample_summary(args, "dist-z-k", emp, densities.cauchy_cdf)


def _cmd_dist_z_lengths(args):
    box = LengthBox(args.l_bar, args.delta_l)
    emp = stats.sample_z_over_lengths(box, args.v, args.k_fixed, args.samples,
                                      seed=args.seed, threads=args.threads)
    return _sample_summary(args, "dist-z-lengths", emp, densities.cauchy_cdf)


def _eig_value_summary(args, tag, values, curve, clip_hi):
    base = tag.replace("-", "_")
    emp = stats.EmpiricalDistribution(values)
    sup = stats.ks_distance(emp, curve.cdf())
    stats.write_samples_csv(emp, _path(args, base + "_samples.csv"))
    stats.write_histogram_csv(stats.histogram(emp, clip=(0.0, clip_hi)),
                              _path(args, base + "_histogram.csv"))
    densities.write_curve_csv(curve, _path(args, base + "_curve.csv"))
    _write_json({"n": emp.n, "sup_distance": sup},
                _path(args, base + "_sup.json"))
    print("n=%d  sup-distance=%.4f  -> %s_*.{csv,json} in %s"
          % (emp.n, sup, base, args.out))
    return 0


def _cmd_dist_zprime(args):
    lengths = _graph(args)
    points = _eigen_points(args, lengths, args.samples)
    _, zp = secular.spectrum_arrays(points)
    curve = densities.p_curve(args.l_bar)
    return _eig_value_summary(args, "dist-zprime",
                              zp / lengths.v ** 2, curve, 30.0)


def _cmd_dist_amp(args):
    lengths = _graph(args)
    if not 1 <= args.bond <= lengths.v:
        raise NumericalError("bond %d outside [1, %d]" % (args.bond, lengths.v))
    points = _eigen_points(args, lengths, args.samples)
    k, zp = secular.spectrum_arrays(points)
    r = reduce_mod_pi(k, lengths.lengths[args.bond - 1])
    t = np.tan(r)
    eta = lengths.v ** 2 * 2.0 * (1.0 + t * t) / zp
    curve = densities.q_curve(args.l_bar)
    return _eig_value_summary(args, "dist-amp", eta, curve, 10.0)


def _cmd_limit_curve(args, maker, name):
    kwargs = {}
    if args.grid_min is not None:
        kwargs["grid_min"] = args.grid_min
    if args.grid_max is not None:
        kwargs["grid_max"] = args.grid_max
    if args.points is not None:
        kwargs["n_points"] = args.points
    curve = maker(args.l_bar, **kwargs)
    path = _path(args, name + ".csv")
    densities.write_curve_csv(curve, path)
    print("wrote %s (+.json sidecar), mass %.6f" % (path, curve.mass))
    return 0


def _cmd_abel(args):
    q = densities.q_curve(args.l_bar)
    # an even point count keeps r = 0 (where the density has a
    # logarithmic singularity) off the grid
    r = np.linspace(-args.r_max, args.r_max, args.points)
    values = densities.abel_value_distribution(q, r)
    path = _path(args, "abel.csv")
    rows = ["r,pdf"]
    rows.extend("%.17g,%.17g" % pair for pair in zip(r, values))
    with open(path, "w") as handle:
        handle.write("\n".join(rows) + "\n")
    print("wrote %s (%d points, l_bar %g)" % (path, args.points, args.l_bar))
    return 0


def _cmd_surface(args):
    lengths = _graph(args)
    if args.bond is not None:
        est = torus.finite_v_qv(lengths, args.bond, args.threshold,
                                args.samples, seed=args.seed,
                                threads=args.threads)
        label = "P(v^2 A_%d < %g)" % (args.bond, args.threshold)
    else:
        est = torus.finite_v_pv(lengths, args.threshold, args.samples,
                                seed=args.seed, threads=args.threads)
        label = "P(Z'/v^2 < %g)" % args.threshold
    path = _path(args, "surface.json")
    torus.write_estimate_json(est, path)
    print("%s = %.6f +- %.6f  (n=%d) -> %s"
          % (label, est.estimate, est.std_error, est.n_samples, path))
    return 0


def _rectangle(args):
    spectrum = seba.rectangle_levels(seba.DEFAULT_ALPHA, args.k_levels)
    window = seba.seba_window(spectrum, l_bar=2.0)
    return spectrum, window


def _cmd_seba_det(args):
    spectrum, window = _rectangle(args)
    seba.write_rectangle_csv(spectrum, _path(args, "rectangle_spectrum.csv"))
    emp = seba.seba_determinant_samples(spectrum, window, args.samples,
                                        seed=args.seed)
    return _sample_summary(args, "seba-det", emp, densities.cauchy_cdf)


def _cmd_seba_coef(args):
    spectrum, window = _rectangle(args)
    emp = seba.seba_coefficient_samples(spectrum, window, level=args.level,
                                        n_samples=args.samples,
                                        seed=args.seed)
    stats.write_samples_csv(emp, _path(args, "seba_coef_samples.csv"))
    med = float(np.median(emp.values))
    slope = reproduce.ccdf_slope(emp.values, med, 10.0 * med)
    payload = {"n": emp.n, "c": window.c, "ccdf_slope": slope,
               "max_over_c": float(np.max(emp.values)) / window.c}
    _write_json(payload, _path(args, "seba_coef.json"))
    print("n=%d  c=%.6g  CCDF slope %.3f -> seba_coef.json in %s"
          % (emp.n, window.c, slope, args.out))
    return 0


def _cmd_reproduce(args):
    report = reproduce.run_preset(args.preset, args.out, seed=args.seed,
                                  threads=args.threads)
    for check in report["checks"]:
        print("%s  %s: %s = %.6g" % ("ok " if check["passed"] else "FAIL",
                                     report["preset"], check["name"],
                                     check["value"]))
    print("report: %s  (%.1f s)"
          % (os.path.join(args.out, "%s_report.json" % args.preset),
             report["runtime_seconds"]))
    return 0 if report["passed"] else 1


def _cmd_selfcheck(args):
    numbers = set(args.criteria) if args.criteria else None
    results = acceptance.run_all(numbers=numbers, threads=args.threads)
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------
# parser assembly


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stargraph",
        description="Spectral statistics of quantum star graphs: "
                    "spectra, limit densities, and their comparison.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", help="solve and export a spectrum window")
    _add_common(p)
    _add_graph(p)
    p.add_argument("--n", type=int, default=100, help="eigenvalue count")
    p.add_argument("--k-start", type=float, default=0.0,
                   help="window base height (0 = from the bottom)")
    p.set_defaults(func=_cmd_eigen)

    p = sub.add_parser("dist-z-k", help="uniform-k Z/v vs Cauchy")
    _add_common(p)
    _add_graph(p)
    _add_samples(p)
    p.add_argument("--k-max", type=float, default=None,
                   help="upper end of the k draw (default 1e4*pi/l_bar)")
    p.set_defaults(func=_cmd_dist_z_k)

    p = sub.add_parser("dist-z-lengths", help="fixed-k random-lengths Z/v")
    _add_common(p)
    _add_graph(p)
    _add_samples(p)
    p.add_argument("--k-fixed", type=float, default=1e4,
                   help="fixed evaluation height k (default 1e4)")
    p.set_defaults(func=_cmd_dist_z_lengths)

    p = sub.add_parser("dist-zprime", help="eigenvalue Z'/v^2 vs the limit P")
    _add_common(p)
    _add_graph(p)
    _add_samples(p)
    p.add_argument("--k-start", type=float, default=0.0,
                   help="take the window above this height instead of "
                        "the first eigenvalues")
    p.set_defaults(func=_cmd_dist_zprime)

    p = sub.add_parser("dist-amp", help="eigenvalue v^2 A_i vs the limit Q")
    _add_common(p)
    _add_graph(p)
    _add_samples(p)
    p.add_argument("--k-start", type=float, default=0.0,
                   help="take the window above this height instead of "
                        "the first eigenvalues")
    p.add_argument("--bond", type=int, default=1, help="1-based bond index")
    p.set_defaults(func=_cmd_dist_amp)

    for name, maker in (("limit-p", densities.p_curve),
                        ("limit-q", densities.q_curve)):
        p = sub.add_parser(name, help="tabulate the limit density %s"
                                      % name[-1].upper())
        _add_common(p)
        p.add_argument("--l-bar", type=float, default=None)
        p.add_argument("--grid-min", type=float, default=None)
        p.add_argument("--grid-max", type=float, default=None)
        p.add_argument("--points", type=int, default=None)
        p.set_defaults(func=lambda a, m=maker, n=name.replace("-", "_"):
                       _cmd_limit_curve(a, m, n))

    p = sub.add_parser("abel", help="eigenfunction value density from Q")
    _add_common(p)
    p.add_argument("--l-bar", type=float, default=None)
    p.add_argument("--r-max", type=float, default=3.0)
    p.add_argument("--points", type=int, default=600,
                   help="grid size (even counts avoid the r = 0 "
                        "singularity)")
    p.set_defaults(func=_cmd_abel)

    p = sub.add_parser("surface", help="surface-measure Monte Carlo estimate")
    _add_common(p)
    _add_graph(p)
    _add_samples(p, default=1_000_000)
    p.add_argument("--threshold", type=float, required=True,
                   help="distribution-function threshold")
    p.add_argument("--bond", type=int, default=None,
                   help="estimate the amplitude law for this 1-based "
                        "bond instead of the derivative law")
    p.set_defaults(func=_cmd_surface)

    p = sub.add_parser("seba-det", help="rectangle spectral sums vs Cauchy")
    _add_common(p)
    _add_samples(p)
    p.add_argument("--k-levels", type=int, default=3000,
                   help="retained unperturbed levels (default 3000)")
    p.set_defaults(func=_cmd_seba_det)

    p = sub.add_parser("seba-coef", help="scaled squared coefficient samples")
    _add_common(p)
    _add_samples(p, default=10_000)
    p.add_argument("--k-levels", type=int, default=3000)
    p.add_argument("--level", type=int, default=1500,
                   help="1-based level index i (default 1500)")
    p.set_defaults(func=_cmd_seba_coef)

    p = sub.add_parser("reproduce", help="run a named figure preset")
    _add_common(p)
    p.add_argument("preset", choices=sorted(reproduce.PRESETS),
                   help="which figure preset to run")
    p.set_defaults(func=_cmd_reproduce)

    p = sub.add_parser("selfcheck", help="run the acceptance criteria")
    _add_common(p)
    p.add_argument("--criteria", type=_comma_ints, default=None,
                   metavar="N,M,...", help="run only these criteria numbers")
    p.set_defaults(func=_cmd_selfcheck)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _settle(args)
    try:
        return args.func(args)
    except NumericalError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
