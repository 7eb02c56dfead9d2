"""Command line interface.

One subcommand per operation, machine-readable output (JSON by default, CSV
for bulk trajectories), deterministic for a fixed --seed.  Exit codes:
0 success, 2 parse/config error, 3 precondition violation, 4 verification
failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import cohomology, ergodic, params, serialize, surface, words

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_VERIFY = 4


class PreconditionError(Exception):
    pass


def _add_param_flags(sub):
    sub.add_argument("--kappa", help="inline JSON array of 5 (complex) values, or @file")
    sub.add_argument("--theta", help="inline JSON array of 4 values, or @file")
    sub.add_argument("--b", help="inline JSON array of 4 nonzero values, or @file")


def _resolve_params(args, default_kappa_star=True):
    given = [(k, getattr(args, k)) for k in ("kappa", "theta", "b")
             if getattr(args, k, None)]
    if len(given) > 1:
        raise PreconditionError("give at most one of --kappa / --theta / --b")
    if not given:
        if not default_kappa_star:
            raise PreconditionError("a parameter source is required")
        kappa = params.KAPPA_STAR
        return params.ResolvedParams("kappa", params.rh(kappa), kappa=kappa,
                                     b=params.kappa_to_b(kappa))
    key, value = given[0]
    if value.startswith("@"):
        return params.load_parameters(value)
    import json

    return params.resolve_parameters({key: json.loads(value)})


def _parse_word_arg(text):
    w = words.parse_word(text)
    if isinstance(w, words.LoopWord):
        return words.loop_to_coxeter(w)
    return words.free_reduce(w)


def _emit(args, payload):
    text = serialize.dumps(payload)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)


def _complex_pairs(vec):
    return [[z.real, z.imag] for z in np.asarray(vec, dtype=complex)]


# --- subcommand handlers ---

def cmd_reduce(args):
    w = words.parse_word(args.word)
    if isinstance(w, words.LoopWord):
        cw = words.loop_to_coxeter(w)
    else:
        cw = words.free_reduce(w)
    minimal = words.minimal_form(cw)
    cls = words.classify(minimal)
    payload = {
        "input": args.word,
        "coxeter_reduced": cw.to_text(),
        "minimal": minimal.to_text(),
        "length_G": len(minimal),
        "length_pi1": len(minimal) // 2 if len(minimal) % 2 == 0 else None,
        "loop_form": (words.coxeter_to_loop(minimal).to_text()
                      if len(minimal) % 2 == 0 else None),
        "class": cls.tag,
    }
    if cls.exponent is not None:
        payload["exponent"] = cls.exponent
    _emit(args, payload)
    return EXIT_OK


def cmd_entropy(args):
    cw = _parse_word_arg(args.word)
    minimal = words.minimal_form(cw)
    if len(minimal) == 0:
        raise PreconditionError("trivial word: no spectral data")
    report = cohomology.spectral_report(minimal, counts_up_to=args.counts)
    payload = report.to_json_dict()
    if report.word_class.is_elementary:
        payload["notice"] = "elementary word: dynamical degree 1, entropy 0"
    _emit(args, payload)
    return EXIT_OK


def _parse_period_range(text):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def cmd_count(args):
    cw = words.minimal_form(_parse_word_arg(args.word))
    periods = _parse_period_range(args.N)
    try:
        rows = [(n, *cohomology.periodic_count(cw, n)) for n in periods]
    except (cohomology.ElementaryWordError,
            cohomology.NotAnalyticallyStableError) as exc:
        raise PreconditionError(str(exc))
    if args.format == "csv":
        dest = args.out or "/dev/stdout"
        serialize.write_csv(dest, ["N", "affine", "projective"], rows)
        if args.out:
            print(f"wrote {args.out}")
    else:
        _emit(args, {
            "word": cw.to_text(),
            "counts": [{"N": n, "affine": a, "projective": p} for n, a, p in rows],
        })
    return EXIT_OK


def _seed_point(args, theta):
    if getattr(args, "x0", None):
        import json

        vals = json.loads(args.x0)
        pt = [params._as_complex(v) for v in vals]
        if len(pt) != 3:
            raise PreconditionError("--x0 needs exactly 3 coordinates")
        return np.array(pt, dtype=complex)
    rng = np.random.default_rng(args.seed)
    return surface.random_surface_point(theta, rng, real=True)


def cmd_orbit(args):
    cw = _parse_word_arg(args.word)
    resolved = _resolve_params(args)
    x0 = _seed_point(args, resolved.theta)
    rec = ergodic.iterate_orbit(cw, x0, resolved.theta, args.N,
                                sample_stride=args.stride)
    rows = []
    for step, x in zip(rec.sample_steps, rec.samples):
        fabs = abs(surface.f_eval(x, resolved.theta))
        rows.append((int(step),
                     float(x[0].real), float(x[0].imag),
                     float(x[1].real), float(x[1].imag),
                     float(x[2].real), float(x[2].imag),
                     float(fabs)))
    trailer = [f"escaped={'true' if rec.escaped else 'false'}"]
    if rec.escaped:
        trailer.append(f"escape_step={rec.escape_step}")
    trailer.append(f"max_f_drift={serialize.format_float(rec.max_f_drift)}")
    dest = args.out or "/dev/stdout"
    serialize.write_csv(dest,
                        ["step", "re_x1", "im_x1", "re_x2", "im_x2",
                         "re_x3", "im_x3", "abs_f"],
                        rows, trailer_comments=trailer)
    if args.out:
        print(f"wrote {args.out} ({len(rows)} samples, "
              f"escaped={rec.escaped})")
    return EXIT_OK


def cmd_lyapunov(args):
    cw = _parse_word_arg(args.word)
    resolved = _resolve_params(args)
    x0 = _seed_point(args, resolved.theta)
    est = ergodic.lyapunov(cw, x0, resolved.theta, args.N,
                           renorm_stride=args.stride)
    payload = {
        "word": est.word.to_text(),
        "iterations": est.n_steps,
        "L_plus": est.L_plus,
        "L_minus": est.L_minus,
        "sum": est.L_plus + est.L_minus,
        "reliable": est.reliable,
        "x0": _complex_pairs(x0),
    }
    _emit(args, payload)
    return EXIT_OK


def cmd_fixed_points(args):
    cw = words.minimal_form(_parse_word_arg(args.word))
    resolved = _resolve_params(args)
    try:
        fps = ergodic.find_fixed_points(
            cw, args.N, resolved.theta, starts=args.starts,
            tol_resid=args.tol_resid, tol_dedupe=args.tol_dedupe,
            seed=args.seed, b=resolved.b, threads=args.threads)
        formula, _ = cohomology.periodic_count(cw, args.N)
    except (cohomology.ElementaryWordError,
            cohomology.NotAnalyticallyStableError, ValueError) as exc:
        raise PreconditionError(str(exc))
    payload = fps.to_json_dict()
    payload = {"word": payload["word"], "N": payload["N"],
               "formula_count": formula, **{k: v for k, v in payload.items()
                                            if k not in ("word", "N")}}
    _emit(args, payload)
    print(f"found {fps.count} / formula {formula}")
    return EXIT_OK


def cmd_lines(args):
    resolved = _resolve_params(args)
    try:
        b = resolved.require_b()
        catalog = surface.lines_catalog(b)
    except (surface.SingularSurfaceError, ValueError) as exc:
        raise PreconditionError(str(exc))
    _emit(args, catalog.to_json_dict())
    return EXIT_OK


# --- the verify suite ---

def _random_reduced_word(rng, length):
    letters = [int(rng.integers(1, 4))]
    while len(letters) < length:
        nxt = int(rng.integers(1, 4))
        if nxt != letters[-1]:
            letters.append(nxt)
    return tuple(letters)


def _verify_checks(resolved, seed, fault=None):
    """Yield (name, callable) pairs; callables raise on failure."""
    rng = np.random.default_rng(seed)
    theta = resolved.theta

    def matrix_identities():
        I3 = cohomology.identity(3)
        for i in (1, 2, 3):
            s, r = cohomology.S_MATS[i], cohomology.R_MATS[i]
            assert cohomology.mat_mul(s, s) == s, f"s{i}^2 != s{i}"
            assert cohomology.det3(s) == 0 and cohomology.trace(s) == 2
            assert cohomology.mat_mul(r, r) == I3, f"r{i}^2 != I"
            rt = cohomology.transpose(r)
            assert cohomology.mat_mul(cohomology.mat_mul(rt, cohomology.B_FORM), r) \
                == cohomology.B_FORM, f"r{i} does not preserve B"
            halved = tuple(tuple((I3[a][c] + r[a][c]) // 2 for c in range(3))
                           for a in range(3))
            assert halved == s, f"s{i} != (I + r{i})/2"
            assert cohomology.adjugate3(s) == cohomology.ADJ_S_MATS[i]

    def pinned_products():
        assert cohomology.s_product((1, 2)) == ((0, 1, 1), (0, 1, 2), (0, 0, 1))
        assert cohomology.s_product((1, 2, 3)) == ((0, 1, 1), (0, 1, 2), (0, 2, 3))
        assert cohomology.s_product((1, 2, 3, 2)) == ((0, 1, 1), (0, 3, 4), (0, 2, 3))
        assert cohomology.sigma_star_product((1, 2, 3)) == cohomology.C_STAR
        assert cohomology.alpha((1, 2, 3, 2)) == 6
        assert cohomology.alpha((1, 2, 3)) == 4

    def decompose():
        gens = dict(cohomology.SIGMA_STAR)
        if fault == "decompose":
            bad = [list(row) for row in gens[1]]
            bad[2][3] += 1
            gens[1] = tuple(tuple(row) for row in bad)
        for _ in range(50):
            word = _random_reduced_word(rng, int(rng.integers(1, 14)))
            m = cohomology.identity(7)
            for i in word:
                m = cohomology.mat_mul(gens[i], m)
            vblock, scalar = cohomology.decompose_check(m)
            assert vblock == cohomology.s_product(word)
            assert scalar == (-1) ** len(word)

    def char_poly():
        for _ in range(100):
            word = _random_reduced_word(rng, int(rng.integers(1, 16)))
            cohomology.char_poly_V(word)  # raises if the closed form fails

    def f_invariance():
        pts = rng.normal(size=(2000, 3)) + 1j * rng.normal(size=(2000, 3))
        base = surface.f_eval(pts, theta)
        tol = 1e-12 * (1 + np.abs(pts).max(axis=1) ** 3)
        for i in (1, 2, 3):
            moved = surface.f_eval(surface.sigma_apply(i, pts, theta), theta)
            assert (np.abs(moved - base) < tol).all(), f"f not sigma_{i}-invariant"

    def involution():
        pts = rng.normal(size=(500, 3)) + 1j * rng.normal(size=(500, 3))
        for i in (1, 2, 3):
            twice = surface.sigma_apply(i, surface.sigma_apply(i, pts, theta), theta)
            assert np.abs(twice - pts).max() < 1e-12

    def jacobian():
        pts = rng.normal(size=(200, 3)) + 1j * rng.normal(size=(200, 3))
        for i in (1, 2, 3):
            for x in pts[:50]:
                d = surface.sigma_jacobian(i, x)
                assert abs(np.linalg.det(d) + 1) < 1e-12
            g_before = surface.grad_f(pts, theta)[:, i - 1]
            g_after = surface.grad_f(surface.sigma_apply(i, pts, theta),
                                     theta)[:, i - 1]
            assert np.abs(g_after + g_before).max() < 1e-10

    def g_squared():
        for _ in range(200):
            x = surface.random_surface_point(theta, rng)
            for i in (1, 2, 3):
                y1, t1 = surface.g_apply(i, x, theta)
                y2, t2 = surface.g_apply(i, y1, t1)
                assert max(abs(a - b) for a, b in zip(t2, theta)) < 1e-12
                j = i % 3 + 1
                z = surface.word_apply((i, j), x, theta)
                scale = 1 + np.abs(z).max()
                assert np.abs(y2 - z).max() < 1e-10 * scale, \
                    f"g_{i}^2 != s{i} s{j} under the locked convention"

    def line_catalog():
        if resolved.b is None:
            raise SkipCheck("theta-only parameters: b not available")
        if resolved.kappa is not None and params.on_wall(resolved.kappa):
            raise SkipCheck("kappa lies on a wall: surface is singular")
        surface.lines_catalog(resolved.b)

    def line_exchanges():
        if resolved.b is None:
            raise SkipCheck("theta-only parameters: b not available")
        if resolved.kappa is not None and params.on_wall(resolved.kappa):
            raise SkipCheck("kappa lies on a wall: surface is singular")
        for i in (1, 2, 3):
            surface.line_exchange_check(i, resolved.b)

    return [
        ("matrix_identities", matrix_identities),
        ("pinned_products", pinned_products),
        ("decompose", decompose),
        ("char_poly", char_poly),
        ("f_invariance", f_invariance),
        ("involution", involution),
        ("jacobian", jacobian),
        ("g_squared", g_squared),
        ("line_catalog", line_catalog),
        ("line_exchanges", line_exchanges),
    ]


class SkipCheck(Exception):
    pass


def cmd_verify(args):
    resolved = _resolve_params(args)
    failures = []
    for name, check in _verify_checks(resolved, args.seed,
                                      fault=args.inject_fault):
        try:
            check()
        except SkipCheck as exc:
            print(f"SKIP {name}: {exc}")
            continue
        except Exception as exc:
            print(f"FAIL {name}: {exc}")
            failures.append(name)
            continue
        print(f"PASS {name}")
    if failures:
        print(f"verification failed: {', '.join(failures)}")
        return EXIT_VERIFY
    print("all checks passed")
    return EXIT_OK


def cmd_report(args):
    from . import report

    resolved = _resolve_params(args)
    paths = report.write_report(args.outdir, resolved, seed=args.seed,
                                starts=args.starts, threads=args.threads)
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="p6dyn",
        description="Entropy, periodic-point counts and surface dynamics of "
                    "the Poincare return maps on the cubic character variety.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(handler=handler)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="output path (default: stdout)")
        return p

    p = add("reduce", cmd_reduce, help="reduce and classify a word")
    p.add_argument("--word", required=True)

    p = add("entropy", cmd_entropy, help="alpha, dynamical degree, entropy")
    p.add_argument("--word", required=True)
    p.add_argument("--counts", type=int, default=0,
                   help="also include periodic counts up to this period")

    p = add("count", cmd_count, help="exact periodic-point counts")
    p.add_argument("--word", required=True)
    p.add_argument("--N", required=True, help="period or range lo..hi")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = add("verify", cmd_verify, help="run the invariant suites")
    _add_param_flags(p)
    p.add_argument("--inject-fault", choices=("decompose",),
                   help=argparse.SUPPRESS)

    p = add("fixed-points", cmd_fixed_points,
            help="multi-start numerical periodic point search")
    p.add_argument("--word", required=True)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--starts", type=int, default=2000)
    p.add_argument("--tol-resid", type=float, default=1e-10)
    p.add_argument("--tol-dedupe", type=float, default=1e-6)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    _add_param_flags(p)

    p = add("orbit", cmd_orbit, help="iterate an orbit, write CSV")
    p.add_argument("--word", required=True)
    p.add_argument("--N", type=int, default=1000)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--x0", help="JSON seed point [[re,im],...] (default: "
                                "seeded real surface point)")
    p.add_argument("--format", choices=("csv",), default="csv")
    _add_param_flags(p)

    p = add("lyapunov", cmd_lyapunov, help="Lyapunov exponents along an orbit")
    p.add_argument("--word", required=True)
    p.add_argument("--N", type=int, default=4000)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--x0")
    _add_param_flags(p)

    p = add("lines", cmd_lines, help="the 27-line catalogue as JSON")
    _add_param_flags(p)

    p = add("report", cmd_report,
            help="full report: JSON/CSV artifacts plus figures")
    p.add_argument("--outdir", default="p6dyn-report")
    p.add_argument("--starts", type=int, default=2000)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    _add_param_flags(p)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except words.WordParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (cohomology.ElementaryWordError,
            cohomology.NotAnalyticallyStableError,
            surface.SingularSurfaceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
