"""``cntbloch`` command line: geometry, lattice export, zone data, bands, checks, tables."""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import asdict, dataclass, fields

from . import checks
from .geometry import DEFAULT_A, ChiralSpec, GeometryError, SymmetryClass, characteristic_vectors, compute_geometry
from .reciprocal import brillouin_zone, k_domain, reciprocal_tube
from .tightbinding import ParamsError, SecularError, TBParams, band_gap, band_structure
from .transforms import atom_positions

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_IO, EXIT_PARAMS = 0, 1, 2, 3, 4


class CLIError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class GeometryReport:
    n: int
    m: int
    a: float
    symmetry: str
    r_t: float
    ch_len: float
    theta_plus: float
    theta_minus: float
    alpha_plus: float
    alpha_minus: float
    c_plus: float
    c_minus: float
    chord_plus: float
    chord_minus: float
    a_star_plus: float
    a_star_minus: float
    t1: int
    t2: int
    d: int
    d_R: int
    t_len: float
    a_hat_plus: tuple[float, float, float]
    a_hat_minus: tuple[float, float, float]
    r_tilde: float
    b_tilde_plus: tuple[float, float, float]
    b_tilde_minus: tuple[float, float, float]
    b_prime_plus: float
    b_prime_minus: float
    b_dprime_plus: float
    b_dprime_minus: float
    a_tilde: float | None

    @classmethod
    def build(cls, spec: ChiralSpec) -> "GeometryReport":
        g = compute_geometry(spec)
        cv = characteristic_vectors(g)
        rt = reciprocal_tube(g)
        ratio_p, ratio_m = g.chord_ratios
        vec = lambda v: tuple(float(x) for x in v)  # noqa: E731
        return cls(
            n=g.n, m=g.m, a=g.a, symmetry=g.symmetry.value, r_t=g.r_t, ch_len=g.ch_len,
            theta_plus=g.theta_plus, theta_minus=g.theta_minus,
            alpha_plus=g.alpha_plus, alpha_minus=g.alpha_minus, c_plus=g.c_plus, c_minus=g.c_minus,
            chord_plus=g.chord_plus, chord_minus=g.chord_minus, a_star_plus=ratio_p, a_star_minus=ratio_m,
            t1=g.t1, t2=g.t2, d=g.d, d_R=g.d_R, t_len=g.t_len,
            a_hat_plus=vec(cv.a_hat_plus), a_hat_minus=vec(cv.a_hat_minus),
            r_tilde=rt.r_tilde, b_tilde_plus=vec(rt.b_tilde_plus), b_tilde_minus=vec(rt.b_tilde_minus),
            b_prime_plus=rt.b_prime_plus, b_prime_minus=rt.b_prime_minus,
            b_dprime_plus=rt.b_dprime_plus, b_dprime_minus=rt.b_dprime_minus, a_tilde=rt.a_tilde,
        )

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "GeometryReport":
        data = json.loads(text)
        for f in fields(cls):
            if isinstance(data.get(f.name), list):
                data[f.name] = tuple(data[f.name])
        return cls(**data)

    def to_text(self) -> str:
        lines = [f"SWCNT ({self.n},{self.m})  {self.symmetry}  a = {self.a:.6f} A"]
        if self.symmetry == SymmetryClass.ARMCHAIR.value:
            lines.append(f"a*: {self.a_star_plus:.6f}")
        else:
            lines.append(f"a+*: {self.a_star_plus:.6f}")
            lines.append(f"a-*: {self.a_star_minus:.6f}")
        for f in fields(self):
            if f.name in ("n", "m", "a", "symmetry"):
                continue
            v = getattr(self, f.name)
            if v is None:
                text = "n/a"
            elif isinstance(v, tuple):
                text = "(" + ", ".join(f"{x:.6f}" for x in v) + ")"
            elif isinstance(v, int):
                text = str(v)
            else:
                text = f"{v:.6f}"
            lines.append(f"{f.name}: {text}")
        return "\n".join(lines) + "\n"


# -- helpers -------------------------------------------------------------------------

def _spec(args) -> ChiralSpec:
    try:
        return ChiralSpec(args.n, args.m, args.a)
    except GeometryError as exc:
        raise CLIError(EXIT_INPUT, str(exc)) from None


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot write {out}: {exc.strerror}") from None


def _params(path: str | None) -> TBParams:
    if path is None:
        return TBParams()
    try:
        return TBParams.from_json(path)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot read {path}: {exc.strerror}") from None
    except ParamsError as exc:
        raise CLIError(EXIT_PARAMS, f"bad parameter field '{exc.field}': {exc}") from None
    except TypeError as exc:
        raise CLIError(EXIT_PARAMS, f"bad parameter file: {exc}") from None


# -- commands -----------------------------------------------------------------------------

def cmd_geom(args) -> int:
    report = GeometryReport.build(_spec(args))
    _emit(report.to_json() + "\n" if args.json else report.to_text(), None)
    return EXIT_OK


def cmd_lattice(args) -> int:
    spec = _spec(args)
    try:
        geom = compute_geometry(spec, args.cells)
    except GeometryError as exc:
        raise CLIError(EXIT_INPUT, str(exc)) from None
    atoms = atom_positions(geom)
    buf = io.StringIO()
    buf.write(f"{len(atoms)}\n")
    buf.write(f"SWCNT ({spec.n},{spec.m}) N={geom.n_cells}\n")
    for atom in atoms:
        x, y, z = atom.position
        buf.write(f"C {_f6(x)} {_f6(y)} {_f6(z)}\n")
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _f6(v: float) -> str:
    """Six decimals, without a stray minus sign on values that round to zero."""
    return f"{0.0 if abs(v) < 5e-7 else v:.6f}"


def _fmt_bound(v: float | None) -> str:
    return "" if v is None else _f6(v)


def cmd_bz(args) -> int:
    geom = compute_geometry(_spec(args))
    rt = reciprocal_tube(geom)
    bz = brillouin_zone(rt)
    domains = []
    for branch in ("+", "-"):
        dom = k_domain(geom, branch)
        label = "rotation-only" if dom.rotation_only else dom.branch
        domains.append(dict(branch=branch, label=label, kappa_min=dom.kappa_min, kappa_max=dom.kappa_max,
                            tau_min=dom.tau_min, tau_max=dom.tau_max))
    if args.json:
        payload = dict(n=geom.n, m=geom.m, vertices=[[float(x), float(z)] for x, z in bz.vertices],
                       area=bz.area, parallelogram_area=rt.parallelogram_area, domains=domains)
        _emit(json.dumps(payload, indent=2) + "\n", None)
        return EXIT_OK
    buf = io.StringIO()
    buf.write("vertex,x_tilde,z_tilde\n")
    for i, (x, z) in enumerate(bz.vertices):
        buf.write(f"{i},{_f6(x)},{_f6(z)}\n")
    buf.write(f"# area={bz.area:.6f}\n# parallelogram_area={rt.parallelogram_area:.6f}\n")
    buf.write("branch,label,kappa_min,kappa_max,tau_min,tau_max\n")
    for d in domains:
        buf.write(f"{d['branch']},{d['label']},{_fmt_bound(d['kappa_min'])},{_fmt_bound(d['kappa_max'])},"
                  f"{_f6(d['tau_min'])},{_f6(d['tau_max'])}\n")
    _emit(buf.getvalue(), None)
    return EXIT_OK


def cmd_bands(args) -> int:
    spec = _spec(args)
    params = _params(args.params)
    if args.L < 2:
        raise CLIError(EXIT_INPUT, "--L must be >= 2")
    geom = compute_geometry(spec, args.L * spec.cell_multiple)
    try:
        bands = band_structure(geom, params, args.L, args.order, dense=args.dense)
    except SecularError as exc:
        raise CLIError(EXIT_INPUT, str(exc)) from None
    gap, kind = band_gap(bands)
    buf = io.StringIO()
    buf.write("nu,kappa,eps_minus,eps_plus\n")
    for nu, k, em, ep in zip(bands.nus, bands.kappas, bands.eps_minus, bands.eps_plus):
        buf.write(f"{int(nu)},{k:.12g},{em:.12g},{ep:.12g}\n")
    buf.write(f"# gap={gap:.12g}\n# gap_kappa={bands.gap_kappa:.12g}\n# classification={kind}\n")
    if not bands.cyclic:
        buf.write("# dense sweep: kappa values are off the quantized grid (non-cyclic)\n")
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = _spec(args)
    results = checks.verify_suite(spec)
    failed = [r for r in results if r.status == "FAIL"]
    buf = io.StringIO()
    buf.write(f"verify ({spec.n},{spec.m})\n")
    for r in results:
        buf.write(r.line() + "\n")
    buf.write(f"{len(results)} checks, {len(failed)} failed\n")
    _emit(buf.getvalue(), None)
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_tables(args) -> int:
    rows = checks.table_rows()
    buf = io.StringIO()
    labels = {"armchair": ("a*",), "chiral": ("a+*", "a-*"), "zigzag": ("a+*", "a-*")}
    current = None
    for row in rows:
        if row.table != current:
            current = row.table
            buf.write(f"{current} tubes\n")
        parts = [
            f"{label}={c:.6f} ref={r:.4f} delta={d:+.1e}"
            for label, c, r, d in zip(labels[row.table], row.computed, row.reference, row.deltas)
        ]
        flag = "ok" if row.ok else "MISMATCH"
        buf.write(f"  ({row.n},{row.m})  " + "  ".join(parts) + f"  {flag}\n")
    bad = sum(not r.ok for r in rows)
    buf.write(f"{len(rows)} rows, {bad} outside {checks.TABLE_TOL:g}\n")
    _emit(buf.getvalue(), None)
    return EXIT_VERIFY if bad else EXIT_OK


# -- entry point ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cntbloch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def tube(p):
        p.add_argument("n", type=int)
        p.add_argument("m", type=int)
        p.add_argument("--a", type=float, default=DEFAULT_A, help="lattice constant in angstrom")

    p = sub.add_parser("geom", help="geometry report")
    tube(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_geom)

    p = sub.add_parser("lattice", help="write atom positions as XYZ")
    tube(p)
    p.add_argument("--cells", type=int, default=None, help="number of cells N (default: smallest allowed)")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("bz", help="Brillouin hexagon and wave-vector domains")
    tube(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bz)

    p = sub.add_parser("bands", help="tight-binding bands over the quantized kappa grid")
    tube(p)
    p.add_argument("--L", type=int, default=6)
    p.add_argument("--order", type=int, choices=(1, 2), default=1)
    p.add_argument("--params", default=None, help="JSON file with tight-binding parameters")
    p.add_argument("--dense", type=int, default=None, help="sample this many evenly spaced kappa instead")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("verify", help="run the invariant checks for one tube")
    tube(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("tables", help="compare chord ratios with the reference tables")
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv: list[str] | None = None) -> int:
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8", newline="\n")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
