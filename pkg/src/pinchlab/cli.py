"""Command-line surface: threshold tables, verdicts, verification suites, searches.

Artifacts are deterministic given the seed: JSON reports carry a manifest
(command, config, seed, version, output hashes) and the results; CSV uses
'.' decimals and 12 significant digits; SVG is hand-rolled polyline emission.
Wall-clock time goes to stderr so artifact bytes stay reproducible.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, classify, harmonics, multilinear, pestov, sharpness, thresholds

LIT_EVEN = 0.8649        # classical even-dimensional pinching bound (n != 8)
LIT_78 = 0.9805          # classical bound in dimensions 7 and 8
CONJECTURE = 0.25


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _jsonify(obj):
    """JSON-safe conversion: Fractions -> {num, den}, floats -> 12-digit strings."""
    if isinstance(obj, Fraction):
        return {"num": str(obj.numerator), "den": str(obj.denominator)}
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, (np.floating,)):
        return _fmt(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_json_report(path: Path | None, command: str, config: dict, seed, results,
                       extra_outputs: list[Path] = ()) -> str:
    manifest = {
        "command": command,
        "config": _jsonify(config),
        "seed": seed,
        "version": __version__,
        "outputs": [{"path": str(p), "sha256": _sha256(p)} for p in extra_outputs],
    }
    text = json.dumps({"manifest": manifest, "results": _jsonify(results)},
                      indent=2, sort_keys=True) + "\n"
    if path is not None:
        path.write_text(text, encoding="utf-8")
    return text


# ---------------------------------------------------------------------------
# thresholds table
# ---------------------------------------------------------------------------


def _threshold_rows(n_min: int, n_max: int) -> list[dict]:
    rows = []
    for n in range(n_min, n_max + 1):
        value, case = thresholds.delta_master(n)
        row = {
            "n": n,
            "case": case if value > 0 else "unconditional",
            "delta": value,
            "binding_branch": _binding_branch(n),
            "conjecture": CONJECTURE,
        }
        if n % 2 == 0 and n != 8:
            row["lit_even"] = LIT_EVEN
        if n in (7, 8):
            row["lit_78"] = LIT_78
        rows.append(row)
    return rows


def _binding_branch(n: int) -> str:
    if n < 3:
        raise ValueError("n >= 3")
    if n % 2 == 1 and n != 7:
        return "none"
    if n == 7 or n == 8 or n == 134:
        d1 = thresholds.delta1(n, 3, {7: 2, 8: 3, 134: 3}[n])
        d2 = thresholds.delta2(n, 3, {7: 2, 8: 3, 134: 3}[n])
        return "delta1" if d1 >= d2 else "delta2"
    if n == 4 or n % 4 == 2:
        return "delta1" if thresholds.delta1(n, 3, 1) >= thresholds.delta2(n, 3, 1) else "delta2"
    return "delta2_sym(k=4)"


def cmd_thresholds(args) -> int:
    if not (3 <= args.n_min <= args.n_max):
        print("error: need 3 <= n-min <= n-max", file=sys.stderr)
        return 2
    rows = _threshold_rows(args.n_min, args.n_max)
    if args.format == "csv":
        cols = ["n", "case", "delta", "binding_branch", "conjecture", "lit_even", "lit_78"]
        lines = [",".join(cols)]
        for row in rows:
            lines.append(",".join(
                _fmt(row[c]) if isinstance(row.get(c), float) else str(row.get(c, ""))
                for c in cols
            ))
        text = "\n".join(lines) + "\n"
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    else:
        text = _write_json_report(Path(args.out) if args.out else None,
                                  "thresholds", vars(args), args.seed, rows)
        if not args.out:
            sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# figure
# ---------------------------------------------------------------------------


def _figure_series(n_max: int = 20) -> dict[str, list[tuple[int, float]]]:
    dims = list(range(3, n_max + 1)) + [134]
    new_bound, lit_even, lit_78, conj = [], [], [], []
    for n in dims:
        value, _ = thresholds.delta_master(n)
        new_bound.append((n, value))
        conj.append((n, CONJECTURE))
        if n % 2 == 0 and n != 8:
            lit_even.append((n, LIT_EVEN))
        if n in (7, 8):
            lit_78.append((n, LIT_78))
    return {
        "new_bound": new_bound,
        "literature_even": lit_even,
        "literature_7_8": lit_78,
        "conjecture": conj,
    }


def _render_svg(series: dict, width: int = 640, height: int = 400) -> str:
    xs = [n for pts in series.values() for n, _ in pts]
    x0, x1 = min(xs), max(xs)
    pad = 50

    def sx(n):
        return pad + (width - 2 * pad) * (n - x0) / (x1 - x0)

    def sy(v):
        return height - pad - (height - 2 * pad) * v  # thresholds live in [0, 1]

    colors = {"new_bound": "#e08214", "literature_even": "#1b7837",
              "literature_7_8": "#5aae61", "conjecture": "#2166ac"}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
    ]
    for name, pts in series.items():
        if not pts:
            continue
        coords = " ".join(f"{sx(n):.2f},{sy(v):.2f}" for n, v in sorted(pts))
        parts.append(
            f'<polyline id="{name}" fill="none" stroke="{colors[name]}" '
            f'stroke-width="1.5" points="{coords}"/>'
        )
        for n, v in pts:
            parts.append(f'<circle cx="{sx(n):.2f}" cy="{sy(v):.2f}" r="2.5" fill="{colors[name]}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_figure(args) -> int:
    out = Path(args.out)
    series = _figure_series()
    csv_path = out.with_suffix(".csv")
    lines = ["series,n,value"]
    for name, pts in series.items():
        for n, v in pts:
            lines.append(f"{name},{n},{_fmt(v)}")
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    svg_path = out if out.suffix == ".svg" else out.with_suffix(".svg")
    svg_path.write_text(_render_svg(series), encoding="utf-8")
    manifest_path = out.with_suffix(".manifest.json")
    _write_json_report(manifest_path, "figure", {"out": str(out)}, args.seed,
                       {"series": {k: len(v) for k, v in series.items()}},
                       extra_outputs=[csv_path, svg_path])
    print(f"wrote {svg_path} and {csv_path}")
    return 0


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------


def _suite_identities(seed: int) -> list[dict]:
    checks = []
    rng = np.random.default_rng(seed)
    for n in (3, 4, 5, 6):
        for k in (0, 1, 2, 3, 4):
            basis = harmonics.harmonic_basis(n, k)
            ok = len(basis) == harmonics.dim_harmonics(n, k)
            ok = ok and all(p.laplacian().is_zero() for p in basis)
            checks.append({"name": f"harmonic-basis n={n} k={k}", "passed": bool(ok)})
    for n in (3, 4, 5):
        for k in (1, 2, 3):
            basis = harmonics.harmonic_basis(n, k)
            u = harmonics.HarmonicField(n, k, harmonics.Bundle.scalar(),
                                        {(): basis[int(rng.integers(len(basis)))]})
            checks.append({
                "name": f"vertical-laplacian n={n} k={k}",
                "passed": bool(harmonics.vertical_laplacian_eigencheck(u)),
            })
    for (n, k, p) in [(4, 2, 1), (4, 3, 1), (5, 2, 2), (6, 2, 1)]:
        sample = harmonics.normal_subspace_sample(n, k, harmonics.Bundle.form(p), seed + n + k + p)
        rep = pestov.g_term_forms(sample)
        checks.append({"name": f"g-term forms n={n} k={k} p={p}", "passed": rep.match})
    for (n, k) in [(4, 2), (4, 3), (6, 2)]:
        sample = harmonics.normal_subspace_sample(n, k, harmonics.Bundle.sym2(), seed + 7 * n + k)
        rep = pestov.g_term_sym2(sample)
        checks.append({"name": f"g-term sym2 n={n} k={k}", "passed": rep.match})
    for m, expect in [(2, Fraction(1, 12)), (3, Fraction(1, 30))]:
        _, ratio = pestov.rank1_fixture(m)
        checks.append({"name": f"rank1 ratio m={m}", "passed": ratio == expect})
    checks.append({"name": "projector relation n=3 k=2",
                   "passed": pestov.projector_relation_check(3, 2, seed=seed)})
    for (p, n) in [(1, 3), (2, 4), (3, 7)]:
        checks.append({"name": f"wedge-contract p={p} n={n}",
                       "passed": multilinear.wedge_contract_identity_check(p, n)})
    return checks


def _suite_curvature(seed: int) -> list[dict]:
    checks = []
    R = multilinear.ch_model(2)
    checks.append({"name": "ch(2) symmetries", "passed": R.symmetry_defect() < 1e-12})
    checks.append({"name": "ch(2) pinching", "passed": R.check_pinching(seed=seed, samples=100000)})
    checks.append({"name": "ch(3) pinching",
                   "passed": multilinear.ch_model(3).check_pinching(seed=seed + 1, samples=50000)})
    best, _ = multilinear.r0_sharpness_search(R, frames=100000, seed=seed)
    bound = 2 * (1 - R.delta) / 3
    checks.append({
        "name": "ch(2) centered-curvature sharpness",
        "passed": 0.49 <= best <= bound + 1e-9,
        "detail": {"max_abs_R0": best, "bound": bound},
    })
    G = multilinear.constant_curvature_tensor(4, delta=1.0)
    R0 = multilinear.r0_split(G)
    checks.append({"name": "R0(G, delta=1) = 0",
                   "passed": float(np.abs(R0.values).max()) == 0.0})
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((5, 5))
    A = A - A.T
    norm_a = multilinear.operator_norm_power(A)
    ok = True
    for p in (1, 2, 3):
        norm_p = multilinear.operator_norm_power(multilinear.extend_to_forms(A, p).matrix())
        ok = ok and norm_p <= p * norm_a + 1e-8
    checks.append({"name": "derivation norm bound", "passed": ok})
    norm_c = multilinear.operator_norm_power(multilinear.extend_to_sym2(A).matrix())
    checks.append({"name": "commutator norm bound", "passed": norm_c <= 2 * norm_a + 1e-8})
    return checks


def _suite_monotonicity(seed: int) -> list[dict]:
    checks = []
    report = thresholds.monotonicity_scan()
    checks.append({
        "name": "growth-lemma grid",
        "passed": report.ok,
        "detail": {"checked": report.checked, "violations": report.violations[:10]},
    })
    seq_up = [thresholds.delta_master(4 * l + 2)[0] for l in range(2, 201)]
    seq_down = [thresholds.delta_master(4 * l)[0] for l in range(3, 201)]
    checks.append({"name": "delta(4l+2) increasing",
                   "passed": all(b > a for a, b in zip(seq_up, seq_up[1:]))})
    checks.append({"name": "delta(4l) decreasing",
                   "passed": all(b < a for a, b in zip(seq_down, seq_down[1:]))})
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(1000):
        n = int(rng.integers(3, 60))
        k = int(rng.integers(2, 12))
        p = int(rng.integers(1, 4))
        d = float(rng.uniform(0.01, 1.0))
        bundle = thresholds.constants(n, k, p, d)
        if abs(bundle.B_forms) > 1e-12 and (bundle.B_forms > 0) != (d > thresholds.delta1(n, k, p)):
            bad += 1
        bc = bundle.B_forms + bundle.C_forms
        if abs(bc) > 1e-12 and (bc > 0) != (d > thresholds.delta2(n, k, p)):
            bad += 1
    checks.append({"name": "sign equivalences", "passed": bad == 0, "detail": {"mismatches": bad}})
    return checks


_SUITES = {
    "identities": _suite_identities,
    "curvature": _suite_curvature,
    "monotonicity": _suite_monotonicity,
}


def cmd_verify(args) -> int:
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    if any(s not in _SUITES for s in names):
        print(f"error: unknown suite {args.suite!r}", file=sys.stderr)
        return 2
    t0 = time.monotonic()
    results = {}
    all_passed = True
    for name in names:
        checks = _SUITES[name](args.seed)
        results[name] = checks
        all_passed = all_passed and all(c["passed"] for c in checks)
        for c in checks:
            status = "pass" if c["passed"] else "FAIL"
            print(f"[{status}] {name}: {c['name']}")
    print(f"verify wall-clock: {time.monotonic() - t0:.1f}s", file=sys.stderr)
    text = _write_json_report(Path(args.out) if args.out else None, "verify",
                              {"suite": args.suite}, args.seed,
                              {"passed": all_passed, "suites": results})
    if not args.out:
        sys.stdout.write(text)
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# sharpness
# ---------------------------------------------------------------------------


def cmd_sharpness(args) -> int:
    try:
        config = sharpness.SearchConfig(
            n=args.n, k=args.k, restarts=args.restarts, iterations=args.iters,
            mc_samples=args.mc_samples, seed=args.seed, weights=args.weights,
            constrained=args.constrained,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    t0 = time.monotonic()
    result = sharpness.sharpness_search(config)
    print(f"sharpness wall-clock: {time.monotonic() - t0:.1f}s", file=sys.stderr)
    print(f"c_estimate = {result.c_estimate:.6f} +- {result.stderr:.6f}")
    print(f"quotient   = {result.quotient:.6f}")
    print(f"delta_new  = {result.delta_new:.6f}")
    payload = {
        "c_estimate": result.c_estimate,
        "stderr": result.stderr,
        "quotient": result.quotient,
        "delta_new": result.delta_new,
        "trace": result.trace,
        "best_so_far": result.best_so_far,
        "best_coefficients": result.best_coefficients,
    }
    cfg_dict = {k: v for k, v in vars(config).items()}
    if args.out:
        _write_json_report(Path(args.out), "sharpness", cfg_dict, args.seed, payload)
    if args.trace_out:
        lines = ["restart,best_value,best_so_far"]
        for i, (a, b) in enumerate(zip(result.trace, result.best_so_far)):
            lines.append(f"{i},{_fmt(a)},{_fmt(b)}")
        Path(args.trace_out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


# ---------------------------------------------------------------------------
# classify / eval
# ---------------------------------------------------------------------------


def _case_dict(case) -> dict:
    out = {"label": case.label, "threshold": case.threshold}
    if case.max_rank is not None:
        out["max_rank"] = case.max_rank
    if case.min_degree is not None:
        out["min_degree"] = case.min_degree
    if case.note:
        out["note"] = case.note
    return out


def cmd_classify(args) -> int:
    try:
        menu = classify.structure_menu(args.n)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        text = _write_json_report(Path(args.out) if args.out else None, "classify",
                                  {"n": args.n}, args.seed,
                                  {"cases": [_case_dict(c) for c in menu]})
        if not args.out:
            sys.stdout.write(text)
    else:
        print(f"possible invariant structures at n={args.n}:")
        for case in menu:
            extra = f" (rank <= {case.max_rank})" if case.max_rank is not None else ""
            extra += f" (degree >= {case.min_degree})" if case.min_degree is not None else ""
            print(f"  {case.label}{extra}: threshold delta > {case.threshold:.6f}")
    return 0


def cmd_eval(args) -> int:
    try:
        v = classify.verdict(args.n, args.delta)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        payload = {
            "status": v.status,
            "n": v.n,
            "delta": v.delta,
            "cases": [_case_dict(c) for c in v.cases],
            "notes": v.notes,
        }
        text = _write_json_report(Path(args.out) if args.out else None, "eval",
                                  {"n": args.n, "delta": args.delta}, args.seed, payload)
        if not args.out:
            sys.stdout.write(text)
    else:
        print(f"n={args.n}, delta={args.delta}: {v.status}")
        for case in v.cases:
            cmp = ">" if args.delta > case.threshold else "<="
            print(f"  {case.label}: delta {cmp} {case.threshold:.6f}")
        for note in v.notes:
            print(f"  note: {note}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pinchlab",
        description="Pinching thresholds, fiberwise identities, and sharpness searches.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thresholds", help="emit the delta(n) table")
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("figure", help="emit threshold-vs-dimension SVG + CSV")
    p.add_argument("--out", type=str, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=("identities", "curvature", "monotonicity", "all"),
                   default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sharpness", help="run the C(n) sharpness search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--restarts", type=int, default=500)
    p.add_argument("--iters", type=int, default=2)
    p.add_argument("--mc-samples", type=int, default=None)
    p.add_argument("--weights", choices=("one", "half"), default="one")
    p.add_argument("--constrained", action="store_true")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--trace-out", type=str, default=None)
    p.set_defaults(func=cmd_sharpness)

    p = sub.add_parser("classify", help="list possible invariant structures at n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("eval", help="ergodicity verdict at (n, delta)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
