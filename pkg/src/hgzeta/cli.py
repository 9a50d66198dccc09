"""Command line front end: ``hgzeta <analyze|count|zeta|unitroot|verify> --config FILE``.

The config is a JSON object with the keys of :class:`RunConfig`.  Reports are
written as ``report.json`` and ``report.txt`` (same data) into ``--out``.

Exit codes: 0 ok, 2 config error, 3 assumption violation, 4 verification
mismatch, 5 budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import gmpy2

from . import __version__, intlin
from .chargauss import ensure_context, set_precision
from .count import brute_count, delsarte_full_count
from .errors import (
    AssumptionViolation,
    BudgetExceeded,
    CapExceeded,
    ConfigError,
    HgZetaError,
    InvalidFamilyError,
)
from .family import FamilySpec, assumption_report, compute_C, smoothness_scan
from .ffield import DEFAULT_CAP, is_prime
from .padic import (
    fgl_log_coefficient,
    height_one_test,
    padic_ring,
    unit_root,
    unit_root_count,
)
from .zetafac import (
    P_from_counts,
    assemble_P,
    build_pieces,
    classify_weights,
    compute_u,
    predicted_count,
    star_identity_check,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ASSUMPTION = 3
EXIT_MISMATCH = 4
EXIT_BUDGET = 5

ORACLES = ("brute", "delsarte", "hgf")
STAR_TOL = 1e-30
COMMANDS = ("analyze", "count", "zeta", "unitroot", "verify")


@dataclass
class RunConfig:
    p: int
    q: int
    n: int
    A: list
    c: list
    lam: object = "all"
    r_max: int = 2
    precision_bits: int = 256
    padic_precision: int = 6
    oracles: tuple = ORACLES
    budget: dict = field(default_factory=dict)

    @property
    def f(self) -> int:
        return round(math.log(self.q, self.p))

    @property
    def point_budget(self) -> int:
        return int(self.budget.get("points", 10**8))

    @property
    def field_cap(self) -> int:
        return int(self.budget.get("field_elements", DEFAULT_CAP))

    def spec(self) -> FamilySpec:
        return FamilySpec(tuple(map(tuple, self.A)), tuple(self.c), self.p, self.f)

    def lambdas(self) -> list[int]:
        if self.lam == "all":
            return list(range(1, self.q))
        return [int(self.lam)]


_KEYS = {"p", "q", "n", "A", "c", "lambda", "r_max", "precision_bits", "padic_precision", "oracles", "budget"}


def load_config(path) -> RunConfig:
    """Read and validate a JSON config; every problem becomes a ConfigError."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - _KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("p", "n"):
        if not isinstance(raw.get(key), int):
            raise ConfigError(f"'{key}' must be an integer")
    p, n = raw["p"], raw["n"]
    if not is_prime(p):
        raise ConfigError(f"p={p} is not prime")
    if n < 2:
        raise ConfigError("n must be at least 2")
    q = raw.get("q", p)
    if not isinstance(q, int) or q < p:
        raise ConfigError("'q' must be a power of p")
    f = round(math.log(q, p))
    if p**f != q:
        raise ConfigError(f"q={q} is not a power of p={p}")
    A = raw.get("A", [[(n + 1) * int(i == j) for j in range(n + 1)] for i in range(n + 1)])
    if (
        not isinstance(A, list)
        or len(A) != n + 1
        or any(not isinstance(row, list) or len(row) != n + 1 for row in A)
        or any(not isinstance(v, int) for row in A for v in row)
    ):
        raise ConfigError(f"'A' must be an integer matrix of shape {n + 1}x{n + 1}")
    c = raw.get("c", [1] * (n + 1))
    if not isinstance(c, list) or len(c) != n + 1 or any(not isinstance(v, int) for v in c):
        raise ConfigError(f"'c' must be a list of {n + 1} integers")
    if any(v % p == 0 for v in c) or any(not 0 <= v < q for v in c if f > 1):
        raise ConfigError("'c' entries must be nonzero field elements")
    lam = raw.get("lambda", "all")
    if lam != "all" and (not isinstance(lam, int) or lam % q == 0 or (f > 1 and not 0 < lam < q)):
        raise ConfigError("'lambda' must be a nonzero field element or \"all\"")
    oracles = raw.get("oracles", list(ORACLES))
    if not isinstance(oracles, list) or not set(oracles) <= set(ORACLES) or not oracles:
        raise ConfigError(f"'oracles' must be a nonempty subset of {list(ORACLES)}")
    budget = raw.get("budget", {})
    if not isinstance(budget, dict) or not set(budget) <= {"points", "field_elements"}:
        raise ConfigError("'budget' accepts the keys 'points' and 'field_elements'")
    cfg = RunConfig(
        p=p, q=q, n=n, A=A, c=c, lam=lam if lam == "all" else lam % q,
        r_max=raw.get("r_max", 2),
        precision_bits=raw.get("precision_bits", 256),
        padic_precision=raw.get("padic_precision", 6),
        oracles=tuple(o for o in ORACLES if o in oracles),
        budget=budget,
    )
    for key in ("r_max", "precision_bits", "padic_precision"):
        v = getattr(cfg, key)
        if not isinstance(v, int) or v < 1:
            raise ConfigError(f"'{key}' must be a positive integer")
    if cfg.precision_bits < 64:
        raise ConfigError("'precision_bits' must be at least 64")
    try:
        cfg.spec()
    except InvalidFamilyError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


# --- report pieces ------------------------------------------------------------------


def _num(z) -> str:
    """Stable short rendering of a multiprecision scalar."""
    z = gmpy2.mpc(z)
    if z.imag == 0:
        return f"{float(z.real):.6e}"
    return f"{float(z.real):.6e}{float(z.imag):+.6e}i"


def structural(spec: FamilySpec) -> dict:
    al = spec.alpha
    snf = intlin.smith_normal_form(intlin.shifted_matrix(spec.A))
    rep = assumption_report(spec)
    out = {
        "n": spec.n,
        "p": spec.p,
        "q": spec.q,
        "A": [list(r) for r in spec.A],
        "c": list(spec.c),
        "alpha": list(al.alphas),
        "alpha_total": al.alpha_total,
        "elementary_divisors": [int(d) for d in snf.divisors],
        "D": intlin.compute_D(spec.A),
        "assumptions": {
            "coprime": rep.coprime,
            "divisibility": rep.asm1,
            "divisors": rep.asm2,
            "divisor_failures": [[list(J), list(d)] for J, d in rep.asm2_failures],
            "ok": rep.ok,
        },
        "divisor_sets": [
            {"J": list(e.J), "divisors": list(e.divisors), "ok": e.ok}
            for e in intlin.check_asm2(spec.A, spec.q).entries
        ],
    }
    alt = intlin.compute_D_theorem_reading(spec.A)
    if alt != out["D"]:
        out["D_alternative_reading"] = alt
    if rep.coprime:
        out["C"] = compute_C(spec)
        C_rat = Fraction(al.alpha_total**al.alpha_total)
        for ci, ai in zip(spec.c, al.alphas):
            C_rat *= Fraction(ci**ai, ai**ai)
        out["C_rational"] = str(C_rat)
    if rep.asm1:
        reps = intlin.kernel_reps(spec.A, spec.q, al)
        out["d"] = len(reps)
        out["s_table"] = [
            {"j": j, "s": [int(v) for v in s], "t_ij": [int(v) for v in tij], "t": int(t), "delta": int(dl)}
            for j, (s, tij, t, dl) in enumerate(zip(reps.s, reps.t_ij, reps.t, reps.delta))
        ]
    return out


@dataclass
class LambdaJob:
    cfg: RunConfig
    spec: FamilySpec
    command: str
    levels: list
    timings: bool = False

    def degenerate(self, lam: int) -> bool:
        ctx = self.spec.ctx
        return int(ctx.power(lam, self.spec.alpha.alpha_total)) == compute_C(self.spec)

    def __call__(self, lam: int) -> dict:
        ensure_context()
        out: dict = {"lambda": lam}
        clock: dict = {}
        degenerate = self.degenerate(lam)
        out["degenerate"] = degenerate
        cmd = self.command
        if cmd in ("count", "verify"):
            t0 = time.perf_counter()
            out["counts"] = self.counts(lam, degenerate)
            clock["count"] = time.perf_counter() - t0
        if cmd in ("zeta", "verify") and not degenerate:
            t0 = time.perf_counter()
            out["zeta"] = self.zeta(lam)
            clock["zeta"] = time.perf_counter() - t0
        if cmd in ("unitroot", "verify") and not degenerate:
            t0 = time.perf_counter()
            out["unit_root"] = self.unit(lam)
            clock["unitroot"] = time.perf_counter() - t0
        if cmd == "verify" and not degenerate:
            t0 = time.perf_counter()
            out["star_residuals"] = {
                str(r): _num(star_identity_check(self.spec, lam, r)) for r in self.levels
            }
            clock["star"] = time.perf_counter() - t0
        if self.timings:
            out["timings"] = {k: round(v, 3) for k, v in clock.items()}
        return out

    def counts(self, lam: int, degenerate: bool) -> dict:
        res: dict = {}
        pieces = u = None
        if "hgf" in self.cfg.oracles and not degenerate:
            pieces = build_pieces(self.spec, lam)
            u = compute_u(self.spec)
        for r in self.levels:
            row = {}
            if "brute" in self.cfg.oracles:
                row["brute"] = brute_count(self.spec, lam, r, self.cfg.point_budget).total
            if "delsarte" in self.cfg.oracles:
                row["delsarte"] = delsarte_full_count(self.spec, lam, r).total
            if pieces is not None:
                row["hgf"] = predicted_count(pieces, u, r)
            res[str(r)] = row
        return res

    def zeta(self, lam: int) -> dict:
        pieces = build_pieces(self.spec, lam)
        need = max([2 * pc.arity + 2 for pc in pieces if pc.arity] + [1])
        if self.spec.q**need > self.cfg.field_cap:
            raise BudgetExceeded(
                f"P(T) needs the field with {self.spec.q}^{need} elements, above the cap {self.cfg.field_cap}"
            )
        fac = assemble_P(self.spec, lam, pieces=pieces)
        weights = classify_weights(fac.P, self.spec.q)
        return {
            "P": list(fac.P_int),
            "degree": fac.P.degree,
            "weights": {str(k): v for k, v in sorted(weights.items())},
            "horizon": {str(k): v for k, v in sorted(fac.horizon.items())},
        }

    def unit(self, lam: int) -> dict:
        m = self.cfg.padic_precision
        res = unit_root(self.spec, lam, m)
        ring = padic_ring(self.spec.p, self.spec.f, m)
        lam_t = ring.teichmuller(lam)
        a1, a1_alt = fgl_log_coefficient(self.spec, lam_t, self.spec.p - 1)
        out = {
            "ordinary": res.ordinary,
            "F11": res.F11,
            "height_one": height_one_test(a1),
            "fgl_forms_agree": a1 == a1_alt,
            "precision": m,
        }
        if res.value is not None:
            v = res.value.coeffs
            out["value"] = v[0] if self.spec.f == 1 else list(v)
        return out


def _check_verify(item: dict, cfg: RunConfig, spec: FamilySpec) -> list[str]:
    """Cross-oracle comparisons for one lambda; returns a list of failures."""
    bad = []
    lam = item["lambda"]
    counts = item.get("counts", {})
    for r, row in counts.items():
        if len(set(row.values())) > 1:
            bad.append(f"lambda={lam} r={r}: counts disagree {row}")
    if item["degenerate"]:
        return bad
    for r, res in item.get("star_residuals", {}).items():
        if float(res) > STAR_TOL:
            bad.append(f"lambda={lam} r={r}: star identity residual {res}")
    z = item.get("zeta")
    if z is not None and counts:
        raw = [next(iter(counts[str(r)].values())) for r in sorted(map(int, counts))]
        series = P_from_counts(raw, spec.n, spec.q)
        P = z["P"] + [0] * len(series)
        for k, coef in enumerate(series):
            if abs(coef - P[k]) > 1e-10:
                bad.append(f"lambda={lam}: T^{k} coefficient {_num(coef)} from counts vs {P[k]} from P(T)")
                break
    ur = item.get("unit_root")
    if ur is not None:
        if ur["height_one"] != ur["ordinary"] or not ur["fgl_forms_agree"]:
            bad.append(f"lambda={lam}: height-one test disagrees with the unit-root criterion")
        if z is not None:
            has = unit_root_count(z["P"], spec.p) > 0
            if has != ur["ordinary"]:
                bad.append(f"lambda={lam}: unit root presence disagrees with P(T)")
            if ur["ordinary"] and spec.f == 1:
                g = ur["value"]
                pm = spec.p ** ur["precision"]
                val = 0
                for cf in z["P"]:
                    val = (val * g + cf) % pm
                if val:
                    bad.append(f"lambda={lam}: unit root is not a root of reversed P(T) mod p^m")
    return bad


# --- rendering ------------------------------------------------------------------------


def render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, list) and not any(isinstance(x, (dict, list)) for x in v):
                lines.append(f"{pad}- {json.dumps(v)}")
            elif isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {json.dumps(v)}")
    else:
        lines.append(f"{pad}{json.dumps(obj)}")
    return "\n".join(lines)


def write_reports(report: dict, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(json.dumps(report, indent=2, sort_keys=False) + "\n")
    (out_dir / "report.txt").write_text(render_text(report) + "\n")


# --- driver ----------------------------------------------------------------------------


def run(command: str, config_path, r: int | None = None, threads: int = 1,
        out: str | Path = ".", fmt: str = "json", timings: bool = False, stream=None) -> int:
    """Run one subcommand; returns the exit status after writing the reports."""
    stream = sys.stdout if stream is None else stream
    report: dict = {"command": command, "version": __version__}
    status = EXIT_OK
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        report["error"] = {"kind": "config", "message": str(exc)}
        return _finish(report, EXIT_CONFIG, out, fmt, stream)
    set_precision(cfg.precision_bits)
    spec = cfg.spec()
    if r is not None:
        if r < 1:
            report["error"] = {"kind": "config", "message": "--r must be positive"}
            return _finish(report, EXIT_CONFIG, out, fmt, stream)
        cfg.r_max = r
    try:
        report["structure"] = structural(spec)
    except AssumptionViolation as exc:
        report["error"] = {"kind": "assumption", "message": str(exc)}
        return _finish(report, EXIT_ASSUMPTION, out, fmt, stream)
    if not report["structure"]["assumptions"]["ok"]:
        report["error"] = {"kind": "assumption", "message": "assumption check failed; see structure.assumptions"}
        return _finish(report, EXIT_ASSUMPTION, out, fmt, stream)
    if command == "analyze":
        return _finish(report, EXIT_OK, out, fmt, stream)

    levels = list(range(1, cfg.r_max + 1))
    job = LambdaJob(cfg, spec, command, levels, timings)
    lams = cfg.lambdas()
    try:
        if spec.q**cfg.r_max > cfg.field_cap and command in ("count", "verify"):
            raise BudgetExceeded(f"level {cfg.r_max} exceeds the field cap {cfg.field_cap}")
        report["smoothness"] = {}
        for lam in lams:
            v = smoothness_scan(spec, lam, r_bound=1, budget=cfg.point_budget)
            report["smoothness"][str(lam)] = {"singular": v.singular, "scanned_up_to": v.scanned_up_to}
        if threads > 1 and len(lams) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(job, lams))
        else:
            results = [job(lam) for lam in lams]
    except (BudgetExceeded, CapExceeded) as exc:
        report["error"] = {"kind": "budget", "message": str(exc)}
        return _finish(report, EXIT_BUDGET, out, fmt, stream)
    except AssumptionViolation as exc:
        report["error"] = {"kind": "assumption", "message": str(exc)}
        return _finish(report, EXIT_ASSUMPTION, out, fmt, stream)
    except HgZetaError as exc:
        report["error"] = {"kind": "mismatch", "message": f"{type(exc).__name__}: {exc}"}
        return _finish(report, EXIT_MISMATCH, out, fmt, stream)
    report["lambdas"] = results
    if command == "verify":
        failures = [msg for item in results for msg in _check_verify(item, cfg, spec)]
        report["verification"] = {"ok": not failures, "failures": failures}
        if failures:
            status = EXIT_MISMATCH
    return _finish(report, status, out, fmt, stream)


def _finish(report: dict, status: int, out, fmt: str, stream) -> int:
    report["exit_status"] = status
    write_reports(report, Path(out))
    if fmt == "json":
        stream.write(json.dumps(report, indent=2) + "\n")
    else:
        stream.write(render_text(report) + "\n")
    return status


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hgzeta",
        description="Zeta functions of monomial deformations via finite-field hypergeometric sums.",
    )
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--r", type=int, default=None, help="override r_max")
    ap.add_argument("--threads", type=int, default=1, help="worker threads for lambda sweeps")
    ap.add_argument("--out", default=".", help="directory for report.json and report.txt")
    ap.add_argument("--format", choices=("json", "text"), default="json", help="stdout format")
    ap.add_argument("--timings", action="store_true", help="include wall-clock timings (reports stop being byte-stable)")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.threads < 1:
        print("--threads must be positive", file=sys.stderr)
        return EXIT_CONFIG
    return run(args.command, args.config, args.r, args.threads, args.out, args.format, args.timings)


if __name__ == "__main__":
    sys.exit(main())
