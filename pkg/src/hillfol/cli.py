"""Command-line front end.

Every subcommand prints a single JSON document to stdout (sorted keys,
so fixed inputs and seeds give byte-identical output) and writes any
bulk artifacts (CSV trajectories, SVG plots, transcripts) under --out.
Exit codes: 0 success, 2 domain error (singular locus, poles, bad
descriptors), 3 non-convergence.
"""

from __future__ import annotations

import argparse
import cmath
import hashlib
import json
import math
import os
import random
import sys
from dataclasses import dataclass, field

from . import algebra, blowup, floquet, integrability, models, ode
from .errors import ConvergenceError, DomainError, HillfolError


@dataclass
class RunConfig:
    command: str
    model: dict
    tol: float = 1e-10
    seed: int = 0
    out: str | None = None
    options: dict = field(default_factory=dict)


def _parse_complex(s: str) -> complex:
    parts = str(s).split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise DomainError(f"cannot parse complex number from {s!r}")


def _parse_point(s: str):
    return tuple(_parse_complex(c) for c in str(s).split(";"))


def _c2(w: complex):
    return [w.real, w.imag]


def _load_model(arg: str | None) -> dict:
    if arg is None:
        return {"kind": "hill", "p": {"type": "exp"}}
    text = arg
    if not arg.lstrip().startswith("{"):
        with open(arg) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DomainError(f"bad model descriptor: {e}") from None


def _named_form(name: str) -> algebra.PolyOneForm:
    x = algebra.Poly.var(algebra.VARS2, "x")
    y = algebra.Poly.var(algebra.VARS2, "y")
    if name == "omega2":
        return models.fundamental_form()
    if name == "radial":
        return algebra.PolyOneForm((-y, x))
    if name == "dx":
        return algebra.PolyOneForm(
            (algebra.Poly.const(algebra.VARS2, 1), algebra.Poly.zero(algebra.VARS2))
        )
    raise DomainError(f"unknown form {name!r}; use omega2, radial or dx")


def _emit(doc: dict):
    sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _outpath(cfg: RunConfig, name: str) -> str:
    base = cfg.out or "."
    os.makedirs(base, exist_ok=True)
    return os.path.join(base, name)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_integrability(cfg: RunConfig) -> dict:
    m = models.model_from_descriptor(cfg.model)
    if m.sym_p is not None:
        form = m.sym_form
        fld = m.sym_field
        defect = algebra.integrability_defect(form)
        contracted = algebra.contract(form, fld)
        return {
            "mode": "symbolic",
            "p": m.p.descriptor,
            "contract_is_zero": contracted.is_zero(),
            "defect_is_zero": defect.is_zero(),
        }
    rng = random.Random(cfg.seed)
    n = int(cfg.options.get("samples", 100))
    worst_c = worst_d = 0.0
    for _ in range(n):
        pt = (
            complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
            complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
            complex(rng.uniform(-1, 1), rng.uniform(-1, 1)),
        )
        worst_c = max(worst_c, abs(m.contract_residual(pt)))
        worst_d = max(worst_d, abs(m.numeric_defect(pt)))
    return {
        "mode": "numeric",
        "p": m.p.descriptor,
        "samples": n,
        "max_contract_residual": worst_c,
        "max_defect_residual": worst_d,
    }


def _cmd_bessel(cfg: RunConfig) -> dict:
    from . import special

    kind = cfg.options["kind"]
    nu = _parse_complex(cfg.options["order"])
    z = _parse_complex(cfg.options["z"])
    if cfg.options.get("deriv"):
        val = special.bessel_deriv(kind, nu, z)
    else:
        f = special.bessel_j if kind == "J" else special.bessel_y
        val = f(nu, z)
    return {
        "kind": kind,
        "order": _c2(nu),
        "z": _c2(z),
        "derivative": bool(cfg.options.get("deriv")),
        "value": _c2(val),
    }


def _build_integral(cfg: RunConfig):
    """(first integral, trajectory builder) for the audit subcommand."""
    name = cfg.options["integral"]
    tol = ode.ToleranceSpec.of(cfg.tol)
    arc = float(cfg.options.get("arc", 3.0))

    def hill_traj(p, start3):
        return ode.flow_hill(p, start3, arc, tol=tol)

    if name == "bessel2d":
        F = models.bessel_first_integral_2d()
        start = _parse_point(cfg.options.get("start", "1;1"))
        traj = ode.flow_plane_model(
            models.PlaneModel.fundamental(), start, "arc", arc_length=arc, tol=tol
        )
        return F, traj
    if name == "bessel3d":
        F = models.bessel_first_integral_3d()
        start = _parse_point(cfg.options.get("start", "1;0;0"))
        return F, hill_traj(models.exp_coeff(), start)
    if name == "p0-rational":
        F = models.rational_first_integral_p0()
        start = _parse_point(cfg.options.get("start", "1;1;0"))
        return F, hill_traj(models.const_coeff(0), start)
    if name == "lf":
        p = models.model_from_descriptor(cfg.model).p
        K = int(cfg.options.get("K", 8))
        F = floquet.laurent_fourier_first_integral(p, K, tol=tol)
        start = _parse_point(cfg.options.get("start", "1;0.3;0"))
        direction = complex(0.2, math.sqrt(1 - 0.04))
        return F, ode.flow_hill(p, start, arc, direction=direction, tol=tol)
    if name == "model-n":
        n = int(cfg.options.get("n", 1))
        F = models.blowup_model_integral(n)
        start = _parse_point(cfg.options.get("start", "1;0.5"))
        traj = ode.flow_plane_model(
            blowup.divisor_model_form(n), start, "arc", arc_length=arc, tol=tol
        )
        return F, traj
    if name == "model-j":
        j = int(cfg.options.get("j", 1))
        F = models.blowup_corner_integral(j)
        start = _parse_point(cfg.options.get("start", "0.7;0.6"))
        traj = ode.flow_plane_model(
            blowup.corner_model_form(j), start, "arc", arc_length=arc, tol=tol
        )
        return F, traj
    if name == "bessel-hill":
        r = _parse_complex(cfg.options.get("r", "0.5"))
        k = _parse_complex(cfg.options.get("k", "1.2"))
        F = models.bessel_hill_first_integral(r, k)
        m = models.bessel_hill_model(r, k)
        start = _parse_point(cfg.options.get("start", "1;0.2;0"))
        return F, hill_traj(m.p, start)
    raise DomainError(f"unknown integral {name!r}")


def _cmd_audit(cfg: RunConfig) -> dict:
    F, traj = _build_integral(cfg)
    drift = ode.audit_first_integral(F, traj)
    doc = {
        "integral": F.name,
        "arity": F.arity,
        "drift": drift,
        "samples": len(traj.states),
        "accepted_steps": traj.n_accepted,
        "rejected_steps": traj.n_rejected,
        "status": traj.status,
    }
    if cfg.out:
        path = _outpath(cfg, f"audit_{F.name}.csv")
        traj.to_csv(path)
        doc["trajectory_csv"] = path
    return doc


def _cmd_floquet(cfg: RunConfig) -> dict:
    p = models.model_from_descriptor(cfg.model).p
    z0 = _parse_complex(cfg.options.get("z0", "0"))
    M = floquet.monodromy(p, z0, ode.ToleranceSpec.of(cfg.tol))
    fd = floquet.floquet_decompose(M)
    doc = {"monodromy": M.to_json(), "floquet": fd.to_json()}
    if not fd.degenerate:
        K = int(cfg.options.get("K", 8))
        n = max(4 * K + 4, 64)
        part = floquet.periodic_part(p, fd, z0, n, ode.ToleranceSpec.of(cfg.tol))
        fs = floquet.fourier_coefficients(part, K)
        doc["fourier"] = fs.to_json()
        doc["periodicity_residual"] = part.periodicity_residual
    return doc


def _cmd_lf_integral(cfg: RunConfig) -> dict:
    p = models.model_from_descriptor(cfg.model).p
    K = int(cfg.options.get("K", 8))
    tol = ode.ToleranceSpec.of(cfg.tol)
    F = floquet.laurent_fourier_first_integral(p, K, tol=tol)
    arc = float(cfg.options.get("arc", 1.0))
    start = _parse_point(cfg.options.get("start", "1;0.3;0"))
    direction = complex(0.2, math.sqrt(1 - 0.04))
    traj = ode.flow_hill(p, start, arc, direction=direction, tol=tol)
    drift = ode.audit_first_integral(F, traj)
    return {
        "K": K,
        "drift": drift,
        "mu": F.meta["mu"],
        "multipliers": F.meta["multipliers"],
        "coeffs_growing": F.meta["coeffs_growing"],
        "coeffs_second": F.meta["coeffs_second"],
    }


def _cmd_darboux(cfg: RunConfig) -> dict:
    form = _named_form(cfg.options["form"])
    dmax = int(cfg.options.get("dmax", 4))
    res = integrability.darboux_search(form, dmax)
    doc = res.to_json()
    doc["verified"] = res.verify()
    return doc


def _cmd_singer(cfg: RunConfig) -> dict:
    form = _named_form(cfg.options["form"])
    dmax = int(cfg.options.get("dmax", 4))
    nmax = int(cfg.options.get("nmax", 5))
    qmax = int(cfg.options.get("qmax", 8))
    dres = integrability.darboux_search(form, dmax)
    cert = integrability.singer_search(form, dres, nmax, qmax)
    doc = cert.to_json()
    doc["transcript"] = cert.transcript
    if cfg.out:
        path = _outpath(cfg, "singer_transcript.txt")
        with open(path, "w") as fh:
            fh.write(cert.transcript + "\n")
        doc["transcript_file"] = path
    return doc


def _cmd_blowup(cfg: RunConfig) -> dict:
    n = int(cfg.options.get("n", 1))
    seq = blowup.desing_sequence(n)
    doc = seq.to_json()
    doc["transcript"] = seq.transcript()
    golden = []
    for s in seq.steps:
        expect_div = blowup.divisor_model_form(s.index)
        expect_cor = (
            blowup.first_siegel_form()
            if s.index == 1
            else blowup.corner_model_form(s.index - 1)
        )
        golden.append(
            {
                "index": s.index,
                "divisor_matches": all(
                    (a - b).is_zero()
                    for a, b in zip(s.divisor_form.coeffs, expect_div.coeffs)
                ),
                "corner_matches": all(
                    (a - b).is_zero()
                    for a, b in zip(s.corner_form.coeffs, expect_cor.coeffs)
                ),
            }
        )
    doc["golden"] = golden
    if cfg.out:
        path = _outpath(cfg, "blowup_transcript.txt")
        with open(path, "w") as fh:
            fh.write(seq.transcript() + "\n")
        doc["transcript_file"] = path
    return doc


def _cmd_holonomy(cfg: RunConfig) -> dict:
    r0 = float(cfg.options.get("r0", 1.0))
    y0 = _parse_complex(cfg.options.get("y0", "0.05"))
    tol = ode.ToleranceSpec.of(cfg.tol)
    h = ode.holonomy(r0, y0, tol)
    F = models.bessel_first_integral_2d()
    doc = {"r0": r0, "y0": _c2(y0), "h": _c2(h)}
    if y0 != 0:
        doc["conjugation_residual"] = abs(F(r0, h) - F(r0, y0))
    eps = 1e-4
    doc["derivative_at_0"] = _c2(
        (ode.holonomy(r0, eps, tol) - ode.holonomy(r0, -eps, tol)) / (2 * eps)
    )
    return doc


def _cmd_porbit(cfg: RunConfig) -> dict:
    r = float(cfg.options.get("r", 1.0))
    guess = cfg.options.get("guess")
    guess = _parse_complex(guess) if guess is not None else None
    res = ode.periodic_orbit(r, guess=guess, tol=ode.ToleranceSpec.of(cfg.tol))
    return {
        "r": r,
        "x_star": _c2(res.x_star),
        "residual": res.residual,
        "iterations": res.iterations,
        "multiplier": _c2(res.multiplier),
    }


# ---------------------------------------------------------------------------
# plotting (pure presentation; hand-written SVG)
# ---------------------------------------------------------------------------

def _marching_squares(values, xs, ys, level):
    """Contour segments of a scalar grid at one level."""
    segs = []
    nx, ny = len(xs), len(ys)
    for i in range(nx - 1):
        for j in range(ny - 1):
            corners = [
                (xs[i], ys[j], values[i][j]),
                (xs[i + 1], ys[j], values[i + 1][j]),
                (xs[i + 1], ys[j + 1], values[i + 1][j + 1]),
                (xs[i], ys[j + 1], values[i][j + 1]),
            ]
            if any(v != v for _, _, v in corners):  # NaN cell
                continue
            pts = []
            for k in range(4):
                x1, y1, v1 = corners[k]
                x2, y2, v2 = corners[(k + 1) % 4]
                if (v1 - level) * (v2 - level) < 0:
                    t = (level - v1) / (v2 - v1)
                    pts.append((x1 + t * (x2 - x1), y1 + t * (y2 - y1)))
            if len(pts) >= 2:
                segs.append((pts[0], pts[1]))
    return segs


def _svg_document(width, height, body):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        + body
        + "</svg>\n"
    )


def _cmd_plot(cfg: RunConfig) -> dict:
    what = cfg.options.get("what", "levels")
    path = _outpath(cfg, cfg.options.get("file", "plot.svg"))
    W = H = 480
    body = []
    if what == "levels":
        F = models.bessel_first_integral_2d()
        n = int(cfg.options.get("grid", 60))
        x0, x1 = 0.2, 3.0
        y0, y1 = 0.2, 3.0
        xs = [x0 + (x1 - x0) * i / (n - 1) for i in range(n)]
        ys = [y0 + (y1 - y0) * j / (n - 1) for j in range(n)]
        vals = []
        for xv in xs:
            row = []
            for yv in ys:
                if F.singular_locus((xv, yv), 1e-6):
                    row.append(float("nan"))
                else:
                    row.append(abs(F(xv, yv)))
            vals.append(row)
        levels = [float(v) for v in str(cfg.options.get("levels", "0.5,1,2,4")).split(",")]

        def to_px(x, y):
            return (
                (x - x0) / (x1 - x0) * (W - 40) + 20,
                H - 20 - (y - y0) / (y1 - y0) * (H - 40),
            )

        palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"]
        for li, lv in enumerate(levels):
            col = palette[li % len(palette)]
            for (xa, ya), (xb, yb) in _marching_squares(vals, xs, ys, lv):
                pa, pb = to_px(xa, ya), to_px(xb, yb)
                body.append(
                    f'<line x1="{pa[0]:.2f}" y1="{pa[1]:.2f}" '
                    f'x2="{pb[0]:.2f}" y2="{pb[1]:.2f}" '
                    f'stroke="{col}" stroke-width="1"/>'
                )
        body.append(
            '<text x="24" y="24" font-size="13" fill="#333">'
            f"|F| level curves at {levels}</text>"
        )
    elif what == "trajectory":
        start = _parse_point(cfg.options.get("start", "1;1"))
        arc = float(cfg.options.get("arc", 5.0))
        traj = ode.flow_plane_model(
            models.PlaneModel.fundamental(), start, "arc", arc_length=arc,
            tol=ode.ToleranceSpec.of(cfg.tol),
        )
        pts = [(st[0].real, st[1].real) for st in traj.states]
        xsv = [p[0] for p in pts]
        ysv = [p[1] for p in pts]
        x0, x1 = min(xsv), max(xsv)
        y0, y1 = min(ysv), max(ysv)

        def to_px(x, y):
            return (
                (x - x0) / max(x1 - x0, 1e-9) * (W - 40) + 20,
                H - 20 - (y - y0) / max(y1 - y0, 1e-9) * (H - 40),
            )

        d = " ".join(
            ("M" if i == 0 else "L") + f"{to_px(x, y)[0]:.2f},{to_px(x, y)[1]:.2f}"
            for i, (x, y) in enumerate(pts)
        )
        body.append(f'<path d="{d}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>')
        body.append(
            '<text x="24" y="24" font-size="13" fill="#333">'
            "plane-model trajectory (Re x, Re y)</text>"
        )
    else:
        raise DomainError(f"unknown plot kind {what!r}")
    svg = _svg_document(W, H, "\n".join(body) + "\n")
    with open(path, "w") as fh:
        fh.write(svg)
    digest = hashlib.sha256(svg.encode()).hexdigest()
    return {"written": path, "sha256": digest, "what": what}


_COMMANDS = {
    "integrability": _cmd_integrability,
    "bessel": _cmd_bessel,
    "audit": _cmd_audit,
    "floquet": _cmd_floquet,
    "lf-integral": _cmd_lf_integral,
    "darboux": _cmd_darboux,
    "singer": _cmd_singer,
    "blowup": _cmd_blowup,
    "holonomy": _cmd_holonomy,
    "porbit": _cmd_porbit,
    "plot": _cmd_plot,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hillfol",
        description="integrable 1-forms and first integrals of complex "
        "Hill equations u'' + p(z) u = 0",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--model", help="model descriptor file or inline JSON")
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="directory for bulk artifacts")

    p = sub.add_parser("integrability", help="contract/defect checks of the 3-form model")
    common(p)
    p.add_argument("--samples", type=int, default=100)

    p = sub.add_parser("bessel", help="evaluate J/Y and derivatives")
    common(p)
    p.add_argument("--kind", choices=["J", "Y"], required=True)
    p.add_argument("--order", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--deriv", action="store_true")

    p = sub.add_parser("audit", help="first-integral drift along a trajectory")
    common(p)
    p.add_argument("--integral", required=True)
    p.add_argument("--start")
    p.add_argument("--arc", type=float, default=3.0)
    p.add_argument("--K", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--r")
    p.add_argument("--k")

    p = sub.add_parser("floquet", help="monodromy, multipliers, Fourier data")
    common(p)
    p.add_argument("--z0", default="0")
    p.add_argument("--K", type=int, default=8)

    p = sub.add_parser("lf-integral", help="Laurent-Fourier integral audit")
    common(p)
    p.add_argument("--K", type=int, default=8)
    p.add_argument("--arc", type=float, default=1.0)
    p.add_argument("--start")

    p = sub.add_parser("darboux", help="invariant algebraic curves")
    common(p)
    p.add_argument("--form", required=True)
    p.add_argument("--dmax", type=int, default=4)

    p = sub.add_parser("singer", help="Liouvillian integrating-factor search")
    common(p)
    p.add_argument("--form", required=True)
    p.add_argument("--dmax", type=int, default=4)
    p.add_argument("--nmax", type=int, default=5)
    p.add_argument("--qmax", type=int, default=8)

    p = sub.add_parser("blowup", help="iterated blow-up transcript and goldens")
    common(p)
    p.add_argument("--n", type=int, default=1)

    p = sub.add_parser("holonomy", help="first-return map of the separatrix loop")
    common(p)
    p.add_argument("--r0", type=float, default=1.0)
    p.add_argument("--y0", default="0.05")

    p = sub.add_parser("porbit", help="periodic-orbit shooting on the cylinder")
    common(p)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--guess")

    p = sub.add_parser("plot", help="SVG level curves or trajectory traces")
    common(p)
    p.add_argument("--what", choices=["levels", "trajectory"], default="levels")
    p.add_argument("--file", default="plot.svg")
    p.add_argument("--grid", type=int, default=60)
    p.add_argument("--levels", default="0.5,1,2,4")
    p.add_argument("--start")
    p.add_argument("--arc", type=float, default=5.0)

    return ap


def run(argv) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    opts = {
        k: v
        for k, v in vars(ns).items()
        if k not in ("command", "model", "tol", "seed", "out") and v is not None
    }
    cfg = RunConfig(
        command=ns.command,
        model=_load_model(ns.model),
        tol=ns.tol,
        seed=ns.seed,
        out=ns.out,
        options=opts,
    )
    try:
        doc = _COMMANDS[cfg.command](cfg)
    except DomainError as e:
        _emit({"error": {"type": type(e).__name__, "message": str(e)}})
        return 2
    except ConvergenceError as e:
        _emit({"error": {"type": type(e).__name__, "message": str(e)}})
        return 3
    except HillfolError as e:
        _emit({"error": {"type": type(e).__name__, "message": str(e)}})
        return 2
    _emit(doc)
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
