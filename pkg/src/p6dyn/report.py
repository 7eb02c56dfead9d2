"""Report bundle: headline computations written as JSON/CSV plus rendered
figures.

The report runs the three benchmark words (eight-loop, commutator loop,
3-cycle) through the spectral pipeline, the exact count table, the numerical
fixed point oracle, a long bounded orbit, and the norm-root convergence
sequence, and renders a figure for each numeric artifact next to it.
"""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import cohomology, ergodic, serialize, surface, words

HEADLINE_WORDS = (
    ("eight_loop", "g1 g2^-1"),
    ("pochhammer", "g1 g2^-1 g1^-1 g2"),
    ("three_cycle", "s1 s2 s3"),
)


def _word(text):
    w = words.parse_word(text)
    if isinstance(w, words.LoopWord):
        w = words.loop_to_coxeter(w)
    return words.minimal_form(w)


def write_report(outdir, resolved, seed=0, starts=2000, threads=1,
                 count_max=8, orbit_steps=4000, sr_max=40):
    os.makedirs(outdir, exist_ok=True)
    paths = []

    def save(name, text):
        path = os.path.join(outdir, name)
        with open(path, "w") as fh:
            fh.write(text)
        paths.append(path)
        return path

    theta = resolved.theta

    # spectral reports
    spectral = {}
    for name, text in HEADLINE_WORDS:
        cw = _word(text)
        rep = cohomology.spectral_report(cw, counts_up_to=count_max)
        spectral[name] = rep.to_json_dict()
    save("spectral.json", serialize.dumps(spectral))

    # exact count table + figure
    rows = []
    for name, text in HEADLINE_WORDS:
        cw = _word(text)
        if words.classify(cw).is_elementary:
            continue
        for n, aff, proj in cohomology.count_table(cw, count_max):
            rows.append((name, n, aff, proj))
    counts_csv = os.path.join(outdir, "counts.csv")
    serialize.write_csv(counts_csv, ["word", "N", "affine", "projective"], rows)
    paths.append(counts_csv)

    fig, ax = plt.subplots(figsize=(6, 4))
    for name, _ in HEADLINE_WORDS:
        data = [(n, aff) for (w, n, aff, _) in rows if w == name]
        if data:
            ax.semilogy([n for n, _ in data], [max(a, 1) for _, a in data],
                        "o-", label=name)
    ax.set_xlabel("period N")
    ax.set_ylabel("affine periodic points")
    ax.legend()
    ax.set_title("exact periodic-point counts")
    fig.tight_layout()
    fig.savefig(os.path.join(outdir, "counts.png"), dpi=150)
    plt.close(fig)
    paths.append(os.path.join(outdir, "counts.png"))

    # oracle cross-check at period 1 for the eight-loop
    eight = _word("g1 g2^-1")
    fps = ergodic.find_fixed_points(eight, 1, theta, starts=starts, seed=seed,
                                    b=resolved.b, threads=threads)
    formula, _ = cohomology.periodic_count(eight, 1)
    payload = fps.to_json_dict()
    payload["formula_count"] = formula
    save("fixed_points.json", serialize.dumps(payload))

    # bounded orbit + scatter figure
    rng = np.random.default_rng(seed)
    x0 = None
    for _ in range(64):
        cand = surface.random_surface_point(theta, rng, real=True)
        rec = ergodic.iterate_orbit(eight, cand, theta, 200)
        if not rec.escaped:
            x0 = cand
            break
    if x0 is None:
        x0 = surface.random_surface_point(theta, rng)
    rec = ergodic.iterate_orbit(eight, x0, theta, orbit_steps)
    orbit_csv = os.path.join(outdir, "orbit.csv")
    orows = []
    for step, x in zip(rec.sample_steps, rec.samples):
        orows.append((int(step), float(x[0].real), float(x[0].imag),
                      float(x[1].real), float(x[1].imag),
                      float(x[2].real), float(x[2].imag),
                      float(abs(surface.f_eval(x, theta)))))
    serialize.write_csv(orbit_csv,
                        ["step", "re_x1", "im_x1", "re_x2", "im_x2",
                         "re_x3", "im_x3", "abs_f"],
                        orows,
                        trailer_comments=[f"escaped={str(rec.escaped).lower()}"])
    paths.append(orbit_csv)

    fig, ax = plt.subplots(figsize=(5, 5))
    pts = rec.samples
    ax.scatter(pts[:, 0].real, pts[:, 1].real, s=2, c=rec.sample_steps,
               cmap="viridis")
    ax.set_xlabel("Re x1")
    ax.set_ylabel("Re x2")
    ax.set_title(f"orbit of the eight-loop word ({rec.n_steps} steps)")
    fig.tight_layout()
    fig.savefig(os.path.join(outdir, "orbit.png"), dpi=150)
    plt.close(fig)
    paths.append(os.path.join(outdir, "orbit.png"))

    # norm-root convergence + figure
    conv_rows = []
    series = {}
    for name, text in HEADLINE_WORDS[:2]:
        cw = _word(text)
        rep = cohomology.spectral_report(cw)
        seq = cohomology.spectral_radius_limit_check(cw, sr_max)
        series[name] = (seq, rep.lambda_float)
        for n, full, vblock in seq:
            conv_rows.append((name, n, full, vblock, rep.lambda_float))
    conv_csv = os.path.join(outdir, "spectral_radius.csv")
    serialize.write_csv(conv_csv,
                        ["word", "N", "root_full", "root_V", "lambda1"],
                        conv_rows)
    paths.append(conv_csv)

    fig, ax = plt.subplots(figsize=(6, 4))
    for name, (seq, lam) in series.items():
        ns = [n for n, _, _ in seq]
        ax.plot(ns, [v for _, v, _ in seq], "--", label=f"{name} (full)")
        ax.plot(ns, [v for _, _, v in seq], "-", label=f"{name} (V-block)")
        ax.axhline(lam, color="gray", lw=0.6)
    ax.set_xlabel("N")
    ax.set_ylabel("||M^N||^(1/N)")
    ax.set_title("norm-root convergence to the dynamical degree")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(os.path.join(outdir, "spectral_radius.png"), dpi=150)
    plt.close(fig)
    paths.append(os.path.join(outdir, "spectral_radius.png"))

    # lyapunov diagnostics
    est = ergodic.lyapunov(eight, x0, theta, min(orbit_steps, 4000))
    lam = cohomology.spectral_report(eight).lambda_float
    save("lyapunov.json", serialize.dumps({
        "word": est.word.to_text(),
        "iterations": est.n_steps,
        "L_plus": est.L_plus,
        "L_minus": est.L_minus,
        "sum": est.L_plus + est.L_minus,
        "reliable": est.reliable,
        "eighth_log_lambda": math.log(lam) / 8,
        "log_lambda": math.log(lam),
    }))

    return paths
