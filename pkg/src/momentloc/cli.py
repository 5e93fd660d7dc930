"""Command-line surface: dh, verify, ym, flow, induce, normsq.

Every run resolves a RunConfig (flags, then an optional key=value config
file on top), writes its artifacts under the output directory, and records
a manifest with sha256 hashes.  Exit codes: 0 pass, 1 check failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .liecore import build_root_system, dim_irrep, orbit_volumes, vol_poly
from .localization import (
    KInvariantMeasure,
    abelian_to_nonabelian,
    coadjoint_dh_T,
    g2_fixtures,
    induce,
    normsq_strata_p1,
    stratum_sum,
    weighted_p1_dh,
)
from .measure import (
    GaussianSpec,
    antisymmetrize,
    density_at,
    density_csv_rows,
    equal,
    measure_from_json,
    measure_to_json,
    scale,
)
from .rational import frac_str, vec
from .yangmills import (
    PartitionSpec,
    hn_types,
    migdal_partition,
    sawtooth_identity,
    su2_genus1_strata,
    witten_volume,
)

USAGE_ERROR = 2
CHECK_FAILURE = 1

GLOBAL_KEYS = {"seed", "output_dir", "format", "tol_rel", "rtol", "atol", "jobs"}


class CliError(Exception):
    def __init__(self, msg: str, code: int = USAGE_ERROR):
        super().__init__(msg)
        self.code = code


def _parse_vec(s: str):
    return vec([Fraction(part.strip()) for part in s.split(",")])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="momentloc")
    p.add_argument("--output-dir", default=None, help="artifact directory "
                   "(default: MOMENTLOC_OUTPUT_DIR or ./momentloc-out)")
    p.add_argument("--seed", type=int, default=20240511)
    p.add_argument("--format", choices=["json", "csv", "both"], default="both")
    p.add_argument("--config", default=None, help="key = value overrides, applied over flags")
    p.add_argument("--tol-rel", type=float, default=1e-6)
    p.add_argument("--rtol", type=float, default=1e-9)
    p.add_argument("--atol", type=float, default=1e-12)
    p.add_argument("--jobs", type=int, default=1)
    sub = p.add_subparsers(dest="command", required=True)

    dh = sub.add_parser("dh", help="Duistermaat-Heckman measures")
    dh.add_argument("--p1", nargs=2, metavar=("A", "B"), default=None)
    dh.add_argument("--chamber", default="+")
    dh.add_argument("--orbit", choices=["A1", "A2", "G2"], default=None)
    dh.add_argument("--lambda", dest="lam", default=None, help="comma-separated rationals")
    dh.add_argument("--normalization", default="basic")
    dh.add_argument("--chamber-vec", default=None)
    dh.add_argument("--window", nargs=2, type=float, default=None)
    dh.add_argument("--points", type=int, default=41)

    ver = sub.add_parser("verify", help="run an acceptance suite")
    ver.add_argument("suite", choices=["p1", "g2", "sawtooth", "volumes", "flow-rates"])

    ym = sub.add_parser("ym", help="2d Yang-Mills sums")
    ysub = ym.add_subparsers(dest="ym_command", required=True)
    mig = ysub.add_parser("migdal")
    mig.add_argument("--group", choices=["A1", "A2", "G2"], required=True)
    mig.add_argument("--normalization", default=None)
    mig.add_argument("--genus", type=int, required=True)
    mig.add_argument("--epsilon", required=True)
    mig.add_argument("--cutoff", type=float, required=True)
    wit = ysub.add_parser("wittenvol")
    wit.add_argument("--group", choices=["A1", "A2", "G2"], required=True)
    wit.add_argument("--genus", type=int, required=True)
    wit.add_argument("--cutoff", type=float, required=True)
    wit.add_argument("--literal-constant", action="store_true")
    saw = ysub.add_parser("sawtooth")
    saw.add_argument("--cutoff", type=int, required=True)
    saw.add_argument("--epsilon", required=True)
    hn = ysub.add_parser("hn")
    hn.add_argument("--rank", type=int, required=True)
    hn.add_argument("--degree", type=int, required=True)
    hn.add_argument("--bound", required=True)

    fl = sub.add_parser("flow", help="moment-map gradient flow experiments")
    fl.add_argument("--quartic", action="store_true")
    fl.add_argument("--shifted", type=float, default=None, metavar="C")
    fl.add_argument("--homogeneous", nargs=2, type=int, default=None, metavar=("D", "M"))
    fl.add_argument("--p1", nargs=2, default=None, metavar=("A", "B"))
    fl.add_argument("--weights", default=None, help="rows like '1 0;0 1'")
    fl.add_argument("--shift", default=None)
    fl.add_argument("--start", default=None, help="comma-separated floats")
    fl.add_argument("--t-end", type=float, default=100.0)
    fl.add_argument("--ensemble", type=int, default=None)

    ind = sub.add_parser("induce", help="wrap a Cartan-side measure")
    ind.add_argument("--group", choices=["A1", "A2", "G2"], required=True)
    ind.add_argument("--normalization", default="basic")
    ind.add_argument("--measure", required=True, help="measure JSON file")

    ns = sub.add_parser("normsq", help="norm-square stratum decompositions")
    ns.add_argument("--p1", nargs=2, metavar=("A", "B"), required=True)
    return p


def _apply_config_file(args: argparse.Namespace, parser: argparse.ArgumentParser):
    if not args.config:
        return
    path = Path(args.config)
    if not path.exists():
        raise CliError(f"config file {path} not found")
    known = {a for a in vars(args)}
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in known:
            raise CliError(f"{path}:{lineno}: unknown key {key!r}")
        cur = getattr(args, key)
        if isinstance(cur, bool):
            setattr(args, key, value.lower() in ("1", "true", "yes"))
        elif isinstance(cur, int):
            setattr(args, key, int(value))
        elif isinstance(cur, float):
            setattr(args, key, float(value))
        else:
            setattr(args, key, value)


class Run:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        out = args.output_dir or os.environ.get("MOMENTLOC_OUTPUT_DIR") or "momentloc-out"
        self.outdir = Path(out)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.artifacts: dict[str, str] = {}

    def write_text(self, name: str, text: str) -> Path:
        path = self.outdir / name
        path.write_text(text)
        self.artifacts[name] = hashlib.sha256(text.encode()).hexdigest()
        return path

    def write_json(self, name: str, payload) -> Path:
        return self.write_text(name, json.dumps(payload, sort_keys=True, indent=1))

    def write_csv(self, name: str, rows) -> Path:
        import io

        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return self.write_text(name, buf.getvalue())

    def manifest(self, command: str):
        cfg = {k: v for k, v in sorted(vars(self.args).items())
               if k not in ("config",) and not k.startswith("_")}
        payload = {"command": command,
                   "config": {k: repr(v) for k, v in cfg.items()},
                   "artifacts": self.artifacts}
        path = self.outdir / "manifest.json"
        path.write_text(json.dumps(payload, sort_keys=True, indent=1))


# -- commands ----------------------------------------------------------------


def cmd_dh(run: Run) -> int:
    a = run.args
    if (a.p1 is None) == (a.orbit is None):
        raise CliError("dh needs exactly one of --p1 A B or --orbit KIND --lambda ...")
    if a.p1 is not None:
        lo, hi = Fraction(a.p1[0]), Fraction(a.p1[1])
        if lo >= hi:
            raise CliError("--p1 needs a < b")
        mu = weighted_p1_dh(lo, hi, a.chamber)
        window = a.window or (float(lo) - 1.0, float(hi) + 1.0)
    else:
        if a.lam is None:
            raise CliError("--orbit requires --lambda")
        rs = build_root_system(a.orbit, a.normalization)
        lam = _parse_vec(a.lam)
        if len(lam) != rs.rank:
            raise CliError("lambda has the wrong rank")
        if a.chamber_vec is not None:
            zeta = _parse_vec(a.chamber_vec)
        else:
            zeta = vec([Fraction(10 + 7 * i, 10) for i in range(rs.rank)])
        mu = coadjoint_dh_T(rs, lam, zeta)
        span = 1 + max(float(abs(x)) for x in lam)
        window = a.window or (-span, span)
    run.write_text("measure.json", measure_to_json(mu))
    if a.format in ("csv", "both") and mu.rank == 1:
        pts = []
        for i in range(a.points):
            x = Fraction(int(window[0] * 1024 + (window[1] - window[0]) * 1024 * i /
                             max(a.points - 1, 1)), 1024)
            pts.append((x + Fraction(1, 2048),))  # nudge off integer walls
        run.write_csv("density.csv", density_csv_rows(mu, pts))
    run.manifest("dh")
    print(f"wrote {len(mu.terms)}-term measure to {run.outdir}")
    return 0


def _suite_p1():
    checks = []
    pairs = [(-1, 2), (-1, 1), (-3, 5), (0, 3), (2, 7), (-4, -1 + 5)]
    for a, b in pairs:
        ok = equal(weighted_p1_dh(a, b, "+"), weighted_p1_dh(a, b, "-"))
        checks.append((f"chamber-independence ({a},{b})", ok, ""))
    for a, b in [(-1, 2), (-1, 1), (-3, 5)]:
        st = normsq_strata_p1(a, b)
        ok = equal(stratum_sum(st), weighted_p1_dh(a, b, "+"))
        checks.append((f"norm-square sum ({a},{b})", ok, ""))
    return checks


def _suite_g2():
    fx = g2_fixtures()
    lhs = antisymmetrize(scale(Fraction(1, 6), fx.abelian_terms), fx.rs)
    rhs = antisymmetrize(fx.expected.base, fx.rs)
    checks = [("abelian six-term identity", equal(lhs, rhs), "")]
    checks.append(("norm-square contributions sum",
                   equal(stratum_sum(fx.normsq), fx.expected.base), ""))
    deriv = abelian_to_nonabelian(fx.rs, fx.mu_T)
    checks.append(("Euler-derivative route", deriv.equal(fx.expected), ""))
    return checks


def _suite_sawtooth(tol: float):
    rep = sawtooth_identity(50, 1)
    rel = abs(rep.gap) / abs(rep.rhs)
    checks = [("sawtooth vs lattice sum", rel <= tol, f"rel gap {rel:.2e}")]
    strata = su2_genus1_strata(8)
    tot = strata.total()
    ok = all(density_at(tot, (Fraction(p, 4),)) == density_at(tot, (Fraction(p, 4) + 1,))
             for p in (-7, -3, 1, 5))
    checks.append(("translation invariance", ok, ""))
    ok2 = all(density_at(tot, (Fraction(p, 4),)) == -density_at(tot, (-Fraction(p, 4),))
              for p in (1, 3, 5, 9))
    checks.append(("Weyl antisymmetry", ok2, ""))
    return checks


def _suite_volumes():
    rng = np.random.default_rng(11)
    checks = []
    for kind in ("A1", "A2", "G2"):
        rs = build_root_system(kind)
        ok = True
        for _ in range(20):
            coeffs = [Fraction(int(rng.integers(0, 7)), int(rng.integers(1, 4))) for _ in
                      range(rs.rank)]
            lam = vec([sum(c * w[i] for c, w in zip(coeffs, rs.fundamental_weights))
                       for i in range(rs.rank)])
            ov = orbit_volumes(rs, lam)
            ratio = ov.riemannian.scaled(1 / ov.symplectic) if ov.symplectic else None
            active = [a for a in rs.positive_roots if rs.ip(a, lam) != 0]
            prod = Fraction(1)
            for al in active:
                prod *= rs.ip(al, lam)
            expect_mantissa = abs(prod)
            if ratio is None or ratio.two_pi_exp != len(active) \
                    or ratio.mantissa != expect_mantissa:
                ok = False
        checks.append((f"volume ratio identity {kind}", ok, ""))
    return checks


def _suite_flow_rates(rtol: float, atol: float):
    from .gradflow import (IntegratorConfig, build_local_model, integrate,
                           lojasiewicz_fit, radial_gamma_samples,
                           radial_power_system, rate_classify)

    checks = []
    sys_q = build_local_model([[1]], [0])
    tr = integrate(sys_q, [1.0, 0.0], 1e4)
    rq = rate_classify(tr)
    gq = lojasiewicz_fit(sys_q, tr)
    checks.append(("quartic power exponent", rq.kind == "power" and -0.55 <= rq.rate <= -0.45,
                   f"{rq.kind} {rq.rate:.3f}"))
    checks.append(("quartic gamma", 0.70 <= gq.gamma <= 0.80, f"{gq.gamma:.3f}"))
    sys_s = build_local_model([[1]], [1])
    tr2 = integrate(sys_s, [1.0, 0.0], 50.0)
    rs_ = rate_classify(tr2)
    gs = lojasiewicz_fit(sys_s, tr2)
    checks.append(("shifted exponential rate", rs_.kind == "exponential"
                   and abs(rs_.rate - 2.0) <= 0.2, f"{rs_.kind} {rs_.rate:.3f}"))
    checks.append(("shifted gamma", 0.45 <= gs.gamma <= 0.55, f"{gs.gamma:.3f}"))
    sys_r = radial_power_system(6, 2)
    gr = lojasiewicz_fit(sys_r, samples=radial_gamma_samples(sys_r))
    checks.append(("degree-6 gamma", abs(gr.gamma - 5.0 / 6.0) <= 0.05, f"{gr.gamma:.4f}"))
    return checks


def cmd_verify(run: Run) -> int:
    suite = run.args.suite
    if suite == "p1":
        checks = _suite_p1()
    elif suite == "g2":
        checks = _suite_g2()
    elif suite == "sawtooth":
        checks = _suite_sawtooth(run.args.tol_rel)
    elif suite == "volumes":
        checks = _suite_volumes()
    else:
        checks = _suite_flow_rates(run.args.rtol, run.args.atol)
    all_ok = True
    lines = []
    for name, ok, detail in checks:
        tag = "PASS" if ok else "FAIL"
        all_ok &= ok
        line = f"{tag} {name}" + (f" ({detail})" if detail else "")
        print(line)
        lines.append(line)
    run.write_json("verify.json", {"suite": suite, "passed": all_ok,
                                   "checks": [{"name": n, "ok": o, "detail": d}
                                              for n, o, d in checks]})
    if not all_ok:
        run.write_json("verify_diff.json",
                       {"suite": suite,
                        "failing": [n for n, o, _ in checks if not o]})
    run.manifest("verify")
    return 0 if all_ok else CHECK_FAILURE


def cmd_ym(run: Run) -> int:
    a = run.args
    if a.ym_command == "migdal":
        norm = a.normalization or ("paper_su2" if a.group == "A1" else "basic")
        rs = build_root_system(a.group, norm)
        res = migdal_partition(PartitionSpec(rs, a.genus, Fraction(a.epsilon), a.cutoff))
        payload = {"value": res.value, "tail_bound": res.tail_bound,
                   "terms_used": res.terms_used, "sum_part": res.sum_part,
                   "vol_factor": res.vol_factor}
        run.write_json("migdal.json", payload)
        print(json.dumps(payload, sort_keys=True))
    elif a.ym_command == "wittenvol":
        rs = build_root_system(a.group, "basic")
        res = witten_volume(rs, a.genus, a.cutoff,
                            literal_printed_constant=a.literal_constant)
        payload = {"value": res.value, "tail_bound": res.tail_bound,
                   "terms_used": res.terms_used, "sum_part": res.sum_part,
                   "sum_tail_bound": res.sum_tail_bound,
                   "vol_factor": res.vol_factor}
        run.write_json("wittenvol.json", payload)
        print(json.dumps(payload, sort_keys=True))
    elif a.ym_command == "sawtooth":
        rep = sawtooth_identity(a.cutoff, Fraction(a.epsilon))
        payload = {"lhs": rep.lhs, "rhs": rep.rhs, "gap": rep.gap,
                   "sigma": rep.sigma, "pair_scale": rep.pair_scale}
        run.write_json("sawtooth.json", payload)
        print(json.dumps(payload, sort_keys=True))
        if abs(rep.gap) > run.args.tol_rel * abs(rep.rhs):
            run.manifest("ym")
            return CHECK_FAILURE
    else:
        types = hn_types(a.rank, a.degree, Fraction(a.bound))
        payload = {"count": len(types),
                   "types": [[[r, d] for r, d in t.blocks] for t in types]}
        run.write_json("hn.json", payload)
        print(json.dumps(payload, sort_keys=True))
    run.manifest("ym")
    return 0


def cmd_flow(run: Run) -> int:
    from .gradflow import (IntegratorConfig, basin_classify, build_local_model,
                           integrate, lojasiewicz_fit, p1_system,
                           radial_gamma_samples, radial_power_system,
                           rate_classify)

    a = run.args
    chosen = sum(bool(x) for x in
                 (a.quartic, a.shifted is not None, a.homogeneous, a.p1, a.weights))
    if chosen != 1:
        raise CliError("flow needs exactly one of --quartic/--shifted/--homogeneous/"
                       "--p1/--weights")
    cfg = IntegratorConfig(rtol=a.rtol, atol=a.atol)

    if a.p1:
        sys_ = p1_system(Fraction(a.p1[0]), Fraction(a.p1[1]))
        if a.ensemble:
            rep = basin_classify(sys_, a.ensemble, seed=a.seed, t_end=a.t_end)
            payload = {
                "fractions": {str(k): v for k, v in rep.fractions.items()},
                "counts": {str(k): v for k, v in rep.counts.items()},
                "unconverged": rep.unconverged,
                "max_abs_phi_generic": rep.max_abs_phi_generic,
                "continuity": [list(x) for x in rep.continuity],
            }
            run.write_json("ensemble.json", payload)
            print(json.dumps(payload, sort_keys=True))
            run.manifest("flow")
            return 0
        start = [float(Fraction(x)) for x in (a.start or "0.4,0.3").split(",")]
        tr = integrate(sys_, start, a.t_end, config=IntegratorConfig(
            rtol=a.rtol, atol=a.atol, stop_grad=1e-8))
    elif a.homogeneous:
        d, m = a.homogeneous
        sys_ = radial_power_system(d, m)
        gr = lojasiewicz_fit(sys_, samples=radial_gamma_samples(sys_))
        payload = {"gamma": gr.gamma, "ci_halfwidth": gr.ci_halfwidth,
                   "npoints": gr.npoints}
        run.write_json("gamma.json", payload)
        print(json.dumps(payload, sort_keys=True))
        run.manifest("flow")
        return 0
    else:
        if a.quartic:
            sys_ = build_local_model([[1]], [0])
        elif a.shifted is not None:
            sys_ = build_local_model([[1]], [Fraction(a.shifted).limit_denominator(10**9)])
        else:
            rows = [[int(x) for x in row.split()] for row in a.weights.split(";")]
            shift = [Fraction(x) for x in (a.shift or "0").split(",")]
            sys_ = build_local_model(rows, shift)
        start = [float(Fraction(x)) for x in
                 (a.start or ",".join(["1.0", "0.0"] * len(sys_.weights))).split(",")]
        tr = integrate(sys_, start, a.t_end, config=cfg)

    rate = rate_classify(tr)
    gamma = None
    try:
        gamma = lojasiewicz_fit(sys_, tr).gamma
    except ValueError:
        pass
    payload = {"status": tr.status, "t_final": float(tr.times[-1]),
               "f_final": float(tr.f_values[-1]),
               "grad_final": float(tr.grad_norms[-1]),
               "rate_kind": rate.kind,
               "rate": None if math.isnan(rate.rate) else rate.rate,
               "gamma": gamma}
    run.write_json("flow.json", payload)
    if run.args.format in ("csv", "both"):
        run.write_csv("trajectory.csv", tr.csv_rows())
    print(json.dumps(payload, sort_keys=True))
    run.manifest("flow")
    return 0


def cmd_induce(run: Run) -> int:
    a = run.args
    rs = build_root_system(a.group, a.normalization)
    path = Path(a.measure)
    if not path.exists():
        raise CliError(f"measure file {path} not found")
    mu = measure_from_json(path.read_text())
    if mu.rank != rs.rank:
        raise CliError("measure rank does not match the group rank")
    k = induce(rs, mu)
    payload = {
        "root_system": json.loads(rs.to_json()),
        "base": json.loads(measure_to_json(k.base)),
        "antisymmetrized": json.loads(measure_to_json(antisymmetrize(k.base, rs))),
    }
    run.write_json("induced.json", payload)
    print(f"induced measure with {len(k.base.terms)} base terms")
    run.manifest("induce")
    return 0


def cmd_normsq(run: Run) -> int:
    a = run.args
    lo, hi = Fraction(a.p1[0]), Fraction(a.p1[1])
    strata = normsq_strata_p1(lo, hi)
    ok = equal(stratum_sum(strata), weighted_p1_dh(lo, hi, "+"))
    payload = {
        "xi": [frac_str(s.xi[0]) for s in strata],
        "measures": [json.loads(measure_to_json(s.measure)) for s in strata],
        "sum_matches_dh": ok,
    }
    run.write_json("normsq.json", payload)
    print(json.dumps({"xi": payload["xi"], "sum_matches_dh": ok}, sort_keys=True))
    run.manifest("normsq")
    return 0 if ok else CHECK_FAILURE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config_file(args, parser)
        run = Run(args)
        if args.command == "dh":
            return cmd_dh(run)
        if args.command == "verify":
            return cmd_verify(run)
        if args.command == "ym":
            return cmd_ym(run)
        if args.command == "flow":
            return cmd_flow(run)
        if args.command == "induce":
            return cmd_induce(run)
        if args.command == "normsq":
            return cmd_normsq(run)
        raise CliError(f"unknown command {args.command!r}")
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
