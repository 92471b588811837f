"""Deterministic figure-reproduction presets with file outputs.

Each preset bundles the parameters of one published comparison — graph
size, length box, seeds, sample counts — together with the named
checks that decide whether the rerun succeeded (KS bounds, tail
slopes, constants).  Running a preset writes delimited outputs
(samples, histogram, analytic curve), a JSON report comparing the
empirical and analytic sides, and a rendered PNG of the density
comparison.

Presets:

    fig3  Z/v over uniform k at v = 7 against the standard Cauchy law
    fig4  Z'(k_n)/v^2 over eigenvalues at v = 70 against the limit P
    fig5  v^2 A_1 over eigenvalues at v = 50 against the limit Q
    fig6  normalized rectangle-spectrum sums against the Cauchy law
    fig7  scaled squared coefficients, tail slope and the constant c

Every random draw flows through the preset seed, so rerunning into
the same directory reproduces each CSV byte for byte.  The eigenvalue
ensembles for fig4/fig5 are stratified across well-separated high-k
windows: the torus orbit fills out its invariant measure at rate
k * DeltaL, so with the tiny boxes those presets need (v * DeltaL
<= 0.1) the low-lying spectrum is far from equidistributed, and any
single consecutive window is a thin slice of the secular surface
whose bias does not decay with height.
"""

import dataclasses
import json
import os
import time

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be fixed first)

from .model import LengthBox, generate_lengths
from .reduction import reduce_mod_pi
from . import densities, seba, secular, stats

#: sample count shared by the determinant-style presets.
N_SAMPLES = 100_000


@dataclasses.dataclass(frozen=True)
class ExperimentPreset:
    """Parameter bundle plus expected checks for one reproduction run.

    `checks` holds (metric, op, bound) triples evaluated against the
    metrics the runner reports: op "<" / "<=" compare against a scalar
    bound, "range" tests inclusion in a (lo, hi) pair.
    """

    name: str
    description: str
    parameters: dict
    checks: tuple


def _check_passed(op, value, bound):
    if op == "<":
        return bool(value < bound)
    if op == "<=":
        return bool(value <= bound)
    if op == "range":
        lo, hi = bound
        return bool(lo <= value <= hi)
    raise ValueError("unknown check op %r" % (op,))


PRESETS = {
    "fig3": ExperimentPreset(
        name="fig3",
        description="Z/v over uniform k, v = 7, against the Cauchy law",
        parameters={"v": 7, "l_bar": 2.0, "delta_l": 1.0, "seed": 7,
                    "n_samples": N_SAMPLES, "k_max": 1e4 * np.pi / 2.0},
        checks=(("ks", "<", 0.02),),
    ),
    "fig4": ExperimentPreset(
        name="fig4",
        description="Z'(k_n)/v^2 over stratified high-k eigenvalue "
                    "windows, v = 70, against the limit density P",
        parameters={"v": 70, "l_bar": 2.0, "delta_l": 0.0005, "seed": 70,
                    "n_eigs": N_SAMPLES, "k_start": 1.0e6,
                    "n_windows": 20, "spacing": 5.0e4},
        checks=(("sup_distance", "<", 0.03),),
    ),
    "fig5": ExperimentPreset(
        name="fig5",
        description="v^2 A_1 over stratified high-k eigenvalue windows, "
                    "v = 50, against the limit density Q",
        parameters={"v": 50, "l_bar": 2.0, "delta_l": 0.0005, "seed": 50,
                    "n_eigs": N_SAMPLES, "k_start": 5.0e5,
                    "n_windows": 20, "spacing": 5.0e4},
        checks=(("sup_distance", "<", 0.05),),
    ),
    "fig6": ExperimentPreset(
        name="fig6",
        description="normalized spectral sums of the rectangle spectrum "
                    "against the Cauchy law",
        parameters={"alpha": seba.DEFAULT_ALPHA, "K": 3000,
                    "n_min": 1000, "n_max": 2000, "l_bar": 2.0,
                    "seed": 6, "n_samples": N_SAMPLES},
        checks=(("ks", "<", 0.05),),
    ),
    "fig7": ExperimentPreset(
        name="fig7",
        description="scaled squared coefficients of the rectangle "
                    "spectrum: power-law tail and the constant c",
        parameters={"alpha": seba.DEFAULT_ALPHA, "K": 3000,
                    "n_min": 1000, "n_max": 2000, "l_bar": 2.0,
                    "level": 1500, "seed": 77, "n_samples": 10_000},
        checks=(("ccdf_slope", "range", (-0.7, -0.3)),
                ("max_over_c", "<=", 1.0),
                ("c_rel_err", "<", 0.05)),
    ),
}


# ---------------------------------------------------------------------------
# figure rendering


def _bar_axes(ax, hist, label="empirical"):
    width = hist.grid[1] - hist.grid[0]
    ax.bar(hist.grid, hist.pdf, width=width, color="#c9d9ea",
           edgecolor="#7d9dbd", linewidth=0.4, label=label)


def _render_density(path, hist, overlays, title, xlabel, logy=False):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    _bar_axes(ax, hist)
    for label, x, y in overlays:
        ax.plot(x, y, lw=1.6, label=label)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _render_ccdf(path, values, overlays, title, xlabel):
    xs = np.sort(values)
    ccdf = 1.0 - np.arange(1, xs.size + 1) / xs.size
    keep = ccdf > 0
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.loglog(xs[keep], ccdf[keep], drawstyle="steps-post", lw=1.0,
              label="empirical CCDF")
    for label, x, y in overlays:
        ax.loglog(x, y, lw=1.4, ls="--", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("P(value > x)")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def ccdf_slope(values, lo, hi):
    """Least-squares log-log slope of the empirical CCDF on [lo, hi]."""
    xs = np.sort(np.asarray(values, dtype=np.float64))
    ccdf = 1.0 - np.arange(1, xs.size + 1) / xs.size
    mask = (xs >= lo) & (xs <= hi) & (ccdf > 0)
    if mask.sum() < 10:
        raise ValueError("too few points in [%g, %g] for a slope fit" % (lo, hi))
    return float(np.polyfit(np.log10(xs[mask]), np.log10(ccdf[mask]), 1)[0])


# ---------------------------------------------------------------------------
# preset runners


def _run_fig3(par, out, threads):
    lengths = generate_lengths(LengthBox(par["l_bar"], par["delta_l"]),
                               par["v"], seed=par["seed"])
    emp = stats.sample_z_over_k(lengths, par["k_max"], par["n_samples"],
                                seed=par["seed"], threads=threads)
    summary = stats.ks_summary(emp, densities.cauchy_cdf)
    hist = stats.histogram(emp, bins=80, clip=(-8.0, 8.0))
    xs = np.linspace(-8.0, 8.0, 801)
    stats.write_samples_csv(emp, os.path.join(out, "fig3_samples.csv"))
    stats.write_histogram_csv(hist, os.path.join(out, "fig3_histogram.csv"))
    _render_density(os.path.join(out, "fig3.png"), hist,
                    [("Cauchy", xs, densities.cauchy_pdf(xs))],
                    "Z/v over uniform k, v = %d" % par["v"], "Z/v")
    return summary, ["fig3_samples.csv", "fig3_histogram.csv", "fig3.png"]


def _window_values(par, threads):
    lengths = generate_lengths(LengthBox(par["l_bar"], par["delta_l"]),
                               par["v"], seed=par["seed"])
    points = secular.eigenvalue_ensemble(lengths, par["k_start"],
                                         par["n_eigs"],
                                         n_windows=par["n_windows"],
                                         spacing=par["spacing"],
                                         threads=threads)
    k, zp = secular.spectrum_arrays(points)
    return lengths, k, zp


def _run_fig4(par, out, threads):
    _, k, zp = _window_values(par, threads)
    v = par["v"]
    emp = stats.EmpiricalDistribution(zp / v ** 2)
    curve = densities.p_curve(par["l_bar"])
    sup = stats.ks_distance(emp, curve.cdf())
    hist = stats.histogram(emp, bins=80, clip=(0.0, 30.0))
    grid_mask = curve.grid <= 30.0
    stats.write_samples_csv(emp, os.path.join(out, "fig4_values.csv"))
    stats.write_histogram_csv(hist, os.path.join(out, "fig4_histogram.csv"))
    densities.write_curve_csv(curve, os.path.join(out, "fig4_curve.csv"))
    _render_density(os.path.join(out, "fig4.png"), hist,
                    [("limit P", curve.grid[grid_mask], curve.pdf[grid_mask])],
                    "Z'(k_n)/v^2 over %d eigenvalues, v = %d"
                    % (par["n_eigs"], v), "Z'/v^2", logy=True)
    metrics = {"sup_distance": sup, "n": emp.n,
               "k_window": [float(k[0]), float(k[-1])]}
    return metrics, ["fig4_values.csv", "fig4_histogram.csv",
                     "fig4_curve.csv", "fig4_curve.json", "fig4.png"]


def _run_fig5(par, out, threads):
    lengths, k, zp = _window_values(par, threads)
    v = par["v"]
    r = reduce_mod_pi(k, lengths.lengths[0])
    t = np.tan(r)
    eta = v ** 2 * 2.0 * (1.0 + t * t) / zp
    emp = stats.EmpiricalDistribution(eta)
    curve = densities.q_curve(par["l_bar"])
    sup = stats.ks_distance(emp, curve.cdf())
    hist = stats.histogram(emp, bins=80, clip=(0.0, 10.0))
    grid_mask = (curve.grid <= 10.0) & (curve.grid >= 1e-3)
    stats.write_samples_csv(emp, os.path.join(out, "fig5_values.csv"))
    stats.write_histogram_csv(hist, os.path.join(out, "fig5_histogram.csv"))
    densities.write_curve_csv(curve, os.path.join(out, "fig5_curve.csv"))
    _render_density(os.path.join(out, "fig5.png"), hist,
                    [("limit Q", curve.grid[grid_mask], curve.pdf[grid_mask])],
                    "v^2 A_1 over %d eigenvalues, v = %d"
                    % (par["n_eigs"], v), "v^2 A_1", logy=True)
    metrics = {"sup_distance": sup, "n": emp.n,
               "k_window": [float(k[0]), float(k[-1])]}
    return metrics, ["fig5_values.csv", "fig5_histogram.csv",
                     "fig5_curve.csv", "fig5_curve.json", "fig5.png"]


def _seba_setup(par):
    spectrum = seba.rectangle_levels(par["alpha"], par["K"])
    window = seba.seba_window(spectrum, n_min=par["n_min"],
                              n_max=par["n_max"], l_bar=par["l_bar"])
    return spectrum, window


def _run_fig6(par, out, threads):
    spectrum, window = _seba_setup(par)
    emp = seba.seba_determinant_samples(spectrum, window,
                                        par["n_samples"], seed=par["seed"])
    summary = stats.ks_summary(emp, densities.cauchy_cdf)
    hist = stats.histogram(emp, bins=80, clip=(-8.0, 8.0))
    xs = np.linspace(-8.0, 8.0, 801)
    seba.write_rectangle_csv(spectrum, os.path.join(out, "fig6_spectrum.csv"))
    stats.write_samples_csv(emp, os.path.join(out, "fig6_samples.csv"))
    stats.write_histogram_csv(hist, os.path.join(out, "fig6_histogram.csv"))
    _render_density(os.path.join(out, "fig6.png"), hist,
                    [("Cauchy", xs, densities.cauchy_pdf(xs))],
                    "normalized spectral sums, K = %d" % par["K"], "value")
    metrics = dict(summary)
    metrics["mean_density"] = window.mean_density
    return metrics, ["fig6_spectrum.csv", "fig6_samples.csv",
                     "fig6_histogram.csv", "fig6.png"]


def _run_fig7(par, out, threads):
    spectrum, window = _seba_setup(par)
    emp = seba.seba_coefficient_samples(spectrum, window, level=par["level"],
                                        n_samples=par["n_samples"],
                                        seed=par["seed"])
    med = float(np.median(emp.values))
    slope = ccdf_slope(emp.values, med, 10.0 * med)
    b = densities.q_tail_coefficient(par["l_bar"])
    xs = np.geomspace(med, np.max(emp.values), 200)
    ref = 0.5 * np.sqrt(med) / np.sqrt(xs)
    stats.write_samples_csv(emp, os.path.join(out, "fig7_samples.csv"))
    _render_ccdf(os.path.join(out, "fig7.png"), emp.values,
                 [("slope -1/2 reference", xs, ref),
                  ("Q tail 2b/sqrt(x)", xs, 2.0 * b / np.sqrt(xs))],
                 "scaled squared coefficients, level %d" % par["level"],
                 "c (E_i - E)^{-2} / sum_k (E_k - E)^{-2}")
    metrics = {"ccdf_slope": slope,
               "slope_fit_range": [med, 10.0 * med],
               "c": window.c,
               "c_rel_err": abs(window.c / 9.75e5 - 1.0),
               "max_over_c": float(np.max(emp.values)) / window.c,
               "n": emp.n}
    return metrics, ["fig7_samples.csv", "fig7.png"]


_RUNNERS = {"fig3": _run_fig3, "fig4": _run_fig4, "fig5": _run_fig5,
            "fig6": _run_fig6, "fig7": _run_fig7}


def run_preset(name, out_dir, seed=None, threads=1):
    """Run one preset into `out_dir` and return its report dict.

    `seed` overrides the preset's built-in seed (changing the seed
    changes sample CSVs, so byte-identical reruns require equal seeds).
    The report is also written to `<name>_report.json`.
    """
    if name not in PRESETS:
        raise KeyError("unknown preset %r; have %s"
                       % (name, ", ".join(sorted(PRESETS))))
    preset = PRESETS[name]
    par = dict(preset.parameters)
    if seed is not None:
        par["seed"] = int(seed)
    os.makedirs(out_dir, exist_ok=True)
    t0 = time.perf_counter()
    metrics, artifacts = _RUNNERS[name](par, out_dir, threads)
    elapsed = time.perf_counter() - t0
    checks = []
    for metric, op, bound in preset.checks:
        value = metrics[metric]
        checks.append({"name": "%s %s %s" % (metric, op, bound),
                       "metric": metric, "value": value,
                       "passed": _check_passed(op, value, bound)})
    report = {
        "preset": preset.name,
        "description": preset.description,
        "parameters": {key: par[key] for key in sorted(par)},
        "metrics": metrics,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
        "runtime_seconds": round(elapsed, 3),
        "artifacts": artifacts,
    }
    path = os.path.join(out_dir, "%s_report.json" % name)
    with open(path, "w") as handle:
        json.dump(report, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return report
