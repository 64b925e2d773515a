"""Command-line entry point: run certificate suites and reproduce tables and constants."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__, reference as ref, zfr
from .certificate import Certificate, Status, encode_value, lower_decimal, upper_decimal
from .exactnum import Interval, iv
from .smoothing import ProofParams, SmoothingSpec, w0
from .store import CertificateStore
from .suite import REGISTRY, SuiteContext, UnknownCertificate, resolve
from .trigpoly import PRIMES_BELOW_100, TrigPoly

REPORT_SCHEMA = "zfcert-report/1"
DEFAULT_CACHE = Path(".zfcert-cache")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    A0: Optional[Fraction] = None
    theta: Fraction = ref.THETA
    kappa: tuple[Fraction, ...] = ref.KAPPA
    precision: int = 128
    log_t_max: Optional[Fraction] = None
    variant: str = "4.896"
    format: str = "json"
    route: str = "printed"

    @property
    def target_A0(self) -> Fraction:
        return self.A0 if self.A0 is not None else ref.VARIANT_A0[self.variant]

    @property
    def endpoint(self) -> Fraction:
        return self.log_t_max if self.log_t_max is not None else ref.LOG_T_MAX[self.variant]

    def params(self) -> ProofParams:
        """Parameters for the upstream certificates; a target outside their range keeps the variant default."""
        try:
            return ProofParams(A0=self.target_A0)
        except ValueError:
            return ProofParams(A0=ref.VARIANT_A0[self.variant])

    def spec(self) -> SmoothingSpec:
        return SmoothingSpec(theta=self.theta, kappa=self.kappa)

    def context(self, store=None) -> SuiteContext:
        return SuiteContext(params=self.params(), spec=self.spec(), precision=self.precision,
                            log_t_max=self.endpoint, route=self.route, store=store)

    def as_dict(self) -> dict:
        return {"A0": self.target_A0, "theta": self.theta, "kappa": list(self.kappa), "precision": self.precision,
                "log_t_max": self.endpoint, "variant": self.variant, "route": self.route}


_KEYS = {"a0": "A0", "theta": "theta", "kappa": "kappa", "precision": "precision", "t_max": "log_t_max",
         "log_t_max": "log_t_max", "variant": "variant", "format": "format", "route": "route"}


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a rational: {text!r}") from exc


def parse_config(text: str, base: Optional[RunConfig] = None) -> RunConfig:
    """Flat ``key = value`` lines; rationals as p/q or decimals, kappa comma separated."""
    cfg = base or RunConfig()
    updates = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        name = _KEYS.get(key.lower())
        if name is None:
            raise ConfigError(f"line {n}: unknown key {key!r}")
        if name == "kappa":
            updates[name] = tuple(_rational(v) for v in value.split(","))
        elif name in ("A0", "theta", "log_t_max"):
            updates[name] = _rational(value)
        elif name == "precision":
            try:
                updates[name] = int(value)
            except ValueError as exc:
                raise ConfigError(f"line {n}: precision must be an integer") from exc
        else:
            updates[name] = value
    cfg = replace(cfg, **updates)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.variant not in ref.LOG_T_MAX:
        raise ConfigError(f"variant must be one of {sorted(ref.LOG_T_MAX)}")
    if cfg.format not in ("json", "md", "csv"):
        raise ConfigError("format must be json, md or csv")
    if cfg.route not in zfr.ROUTES:
        raise ConfigError(f"route must be one of {zfr.ROUTES}")
    if not 16 <= cfg.precision <= 2048:
        raise ConfigError("precision must lie in [16, 2048]")
    try:
        cfg.spec()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# number rendering -------------------------------------------------------------------

def show_interval(x: Interval, digits: int = 12) -> str:
    return f"∈[{lower_decimal(x, digits)}, {upper_decimal(x, digits)}]"


def show_rational(q: Fraction) -> str:
    return str(q) if q.denominator == 1 or q.denominator < 10**6 else f"{float(q):.12g}"


# certificate runs -------------------------------------------------------------------

def _build_remote(payload):
    cfg_dict, cert_id = payload
    cfg = RunConfig(**cfg_dict)
    return cert_id, cfg.context().get(cert_id).to_dict()


def run_certificates(ids, cfg: RunConfig, *, jobs: int = 1, cache: bool = True,
                     cache_dir: Path = DEFAULT_CACHE) -> dict[str, Certificate]:
    store = CertificateStore(cache_dir) if cache else None
    ctx = cfg.context(store)
    if jobs > 1:
        # per-prime table entries are independent leaves; fan them out first
        leaves = [i for i in ids if REGISTRY[i].group == "table"
                  and (store is None or store.load(i, ctx.digest()) is None)]
        if leaves:
            plain = {k: v for k, v in cfg.__dict__.items()}
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for cert_id, data in pool.map(_build_remote, [(plain, i) for i in leaves]):
                    cert = Certificate.from_dict(data)
                    ctx.results[cert_id] = cert
                    if store is not None:
                        store.save(cert, cert_id, ctx.digest())
    return {i: ctx.get(i) for i in ids}


def _summary(certs: dict[str, Certificate]) -> dict:
    counts = {s.value: 0 for s in Status}
    for c in certs.values():
        counts[c.status.value] += 1
    return {"total": len(certs), **counts, "all_pass": counts["PASS"] == len(certs)}


# reports ----------------------------------------------------------------------------

def _envelope(command: str, cfg: RunConfig, body: dict, deterministic: bool) -> dict:
    out = {"schema": REPORT_SCHEMA, "version": __version__, "command": command, "config": encode_value(cfg.as_dict())}
    if not deterministic:
        out["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    out.update(body)
    return out


def _md_table(headers, rows) -> str:
    lines = ["| " + " | ".join(headers) + " |", "|" + "---|" * len(headers)]
    lines += ["| " + " | ".join(str(c).replace("|", "\\|") for c in row) + " |" for row in rows]
    return "\n".join(lines)


def _csv(headers, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(headers)
    w.writerows(rows)
    return buf.getvalue()


def render_verify(certs: dict[str, Certificate], cfg: RunConfig, fmt: str, deterministic: bool) -> str:
    if fmt == "json":
        body = {"summary": _summary(certs), "certificates": [c.to_dict(deterministic) for c in certs.values()]}
        return json.dumps(_envelope("verify", cfg, body, deterministic), indent=2, sort_keys=False)
    if fmt == "csv":
        raise ConfigError("csv output is available for mp-table and constants only")
    rows = [(c.id, c.status.value, c.claim) for c in certs.values()]
    parts = ["# Certificate report", "", _md_table(("id", "status", "claim"), rows), ""]
    s = _summary(certs)
    parts.append(f"{s['PASS']} of {s['total']} certificates PASS.")
    for c in certs.values():
        if c.findings or not c.passed:
            parts += ["", f"## {c.id}: {c.status.value}"]
            parts += [f"- {f}" for f in c.findings]
            parts += [f"- check `{k.name}` {k.label}: {k.claim}" for k in c.checks if k.required and k.verdict is not True]
    return "\n".join(parts) + "\n"


def constants_rows(cfg: RunConfig) -> list[dict]:
    ctx = cfg.context()
    params, spec, prec = ctx.params, ctx.spec, cfg.precision
    poly = TrigPoly.from_spectral()
    moments = ctx.get("main-term-moments")
    W0 = w0(spec, prec)
    rows = []

    def row(name, value, printed=None):
        if isinstance(value, Interval):
            shown = show_interval(value)
            match = None if printed is None else zfr._matches(value, printed)
        else:
            shown = show_rational(Fraction(value))
            match = None if printed is None else Fraction(value) == printed
        rows.append({"name": name, "printed": None if printed is None else show_rational(printed),
                     "value": shown, "agrees": match})

    row("w(0)", W0, ref.W0_DIGITS)
    row("2 theta cot theta", spec.support_end(prec), ref.TWO_THETA_COT_DIGITS)
    row("S1", moments.enclosures["S1"], ref.S1_DIGITS)
    row("S2", moments.enclosures["S2"], ref.S2_DIGITS)
    for key in ("c0", "c1", "c2", "c3", "c*"):
        row(key, moments.enclosures[key], ref.MOMENT_DIGITS[key])
    row("a0", poly.a[0], Fraction(1))
    row("a1", poly.a[1], ref.A1)
    row("a", poly.a_sum, ref.A_SUM)
    row("kappa", spec.kappa_sum, ref.KAPPA_SUM)
    row("sum |kappa_m|", spec.kappa_abs_sum)
    row("efficiency", 1 / spec.kappa_sum, ref.EFFICIENCY)
    row("eta0", params.eta0(prec))
    row("sigma0", params.sigma0(prec))
    row("mu0", params.mu0(prec), ref.MU0)
    row("a kappa w(0)/2", W0 * poly.a_sum * spec.kappa_sum / 2)
    return rows


def render_constants(rows, cfg, fmt, deterministic) -> str:
    if fmt == "json":
        return json.dumps(_envelope("constants", cfg, {"constants": rows}, deterministic), indent=2)
    headers = ("name", "printed", "certified", "agrees")
    table = [(r["name"], r["printed"] or "", r["value"], "" if r["agrees"] is None else r["agrees"]) for r in rows]
    if fmt == "csv":
        return _csv(headers, table)
    return "# Constants\n\n" + _md_table(headers, table) + "\n"


def mp_rows(certs: dict[str, Certificate]) -> list[dict]:
    out = []
    for p in PRIMES_BELOW_100:
        c = certs[f"mp-{p}"]
        out.append({"p": p, "printed_m_p": show_rational(c.witness["m_p"]),
                    "certified_minimum": show_interval(c.enclosures["own_minimum"]),
                    "own_lower_bound": show_rational(c.witness["own_lower_bound"]), "status": c.status.value})
    return out


def render_mp(rows, cfg, fmt, deterministic) -> str:
    if fmt == "json":
        return json.dumps(_envelope("mp-table", cfg, {"table": rows}, deterministic), indent=2)
    headers = ("p", "printed m_p", "certified minimum", "own lower bound", "status")
    table = [(r["p"], r["printed_m_p"], r["certified_minimum"], r["own_lower_bound"], r["status"]) for r in rows]
    if fmt == "csv":
        return _csv(headers, table)
    return "# Table of per-prime lower bounds\n\n" + _md_table(headers, table) + "\n"


def final_report(cfg: RunConfig, certs: dict[str, Certificate], improved: bool = False) -> dict:
    ctx = cfg.context()
    result = zfr.iteration_assembly(ctx.params, certs, log_t_max=cfg.endpoint, spec=ctx.spec, route=cfg.route,
                                    target_A0=cfg.target_A0, precision=cfg.precision)
    c_L, c_C = ref.LITTLEWOOD[cfg.variant]
    crossover = zfr.crossover_height(c_L, c_C, cfg.precision)
    thresholds = zfr.theorem_thresholds(cfg.variant, result, cfg.precision)
    report = {
        "verdict": result.verdict.value,
        "target_A0": result.A0,
        "log_t_max": cfg.endpoint,
        "route": result.route,
        "value_at_endpoint": result.value_at_endpoint,
        "final_constant": result.final_constant,
        "direct_final_constant": result.direct_final_constant,
        "margin": result.margin,
        "margin_decimal_places": result.margin_digits,
        "first_failure": result.first_failure,
        "missing": list(result.missing),
        "crossover_log_t": crossover,
        "thresholds": thresholds,
        "certificate": result.certificate.to_dict(True) if result.certificate else None,
    }
    if improved:
        extra = zfr.improved_iteration(ctx.params, certs, log_t_max=cfg.endpoint, spec=ctx.spec,
                                       precision=cfg.precision)
        report["improved_final_constant"] = extra["improved"].final_constant
        report["improved_gain"] = extra["gain"]
    return report


def render_final(report: dict, cfg: RunConfig, fmt: str, deterministic: bool) -> str:
    if fmt == "json":
        return json.dumps(_envelope("final", cfg, encode_value(report), deterministic), indent=2)
    if fmt == "csv":
        raise ConfigError("csv output is available for mp-table and constants only")
    th = report["thresholds"]
    fc = report["final_constant"]
    lines = ["# Zero-free region constant", "",
             f"- verdict: {report['verdict']} ({report['route']} route)",
             f"- target A0: {show_rational(report['target_A0'])} = 1/{float(1 / report['target_A0']):.6g}"]
    if fc is not None:
        lines += [f"- value at log t = {float(report['log_t_max']):g}: {show_interval(report['value_at_endpoint'])}",
                  f"- eta log t > {show_interval(fc)}",
                  f"- exact-expression route: {show_interval(report['direct_final_constant'])}",
                  f"- decimals needed to separate from A0 + eps: {report['margin_decimal_places']}"]
    if report["first_failure"]:
        lines.append(f"- first broken link: {report['first_failure']}")
    if report["missing"]:
        lines.append(f"- missing certificates: {', '.join(report['missing'])}")
    if "improved_gain" in report and report["improved_gain"] is not None:
        lines.append(f"- with eta > A0/log t: {show_interval(report['improved_final_constant'])} "
                     f"(gain {show_interval(report['improved_gain'], 4)})")
    cx = report["crossover_log_t"]
    lines += ["", "## Coverage", "",
              "```",
              f"t <= H = 3e12          {th['below_H']}",
              f"H <= t <= exp({float(report['log_t_max']):g})   {th['region']}",
              f"t >= exp({float(cx.mid()):.3f})       log log t region is wider (crossover {show_interval(cx, 8)})",
              "```",
              f"Handoff below the endpoint: {th['handoff_below_endpoint']}"]
    return "\n".join(lines) + "\n"


def search_report(M: int, budget: int, cfg: RunConfig) -> dict:
    from .kappasearch import search
    lb = search(M, budget, params=cfg.params(), precision=cfg.precision)
    rows = [{"label": c.label, "coefficients": [str(k) for k in c.coefficients],
             "linf_error": show_interval(c.linf_error, 8),
             "efficiency": show_rational(c.efficiency) if c.efficiency is not None else None,
             "feasible": c.feasible.value} for c in lb.candidates]
    return {"degree": M, "partial": lb.partial, "hypothetical_limit": str(lb.hypothetical_limit), "leaderboard": rows}


def render_search(report, cfg, fmt, deterministic) -> str:
    if fmt == "json":
        return json.dumps(_envelope("search", cfg, report, deterministic), indent=2)
    headers = ("label", "efficiency", "feasible", "linf error", "coefficients")
    table = [(r["label"], r["efficiency"], r["feasible"], r["linf_error"], ", ".join(r["coefficients"]))
             for r in report["leaderboard"]]
    if fmt == "csv":
        return _csv(headers, table)
    note = " (partial: budget exhausted)" if report["partial"] else ""
    return (f"# Candidates of degree {report['degree']}{note}\n\nLimit efficiency: {report['hypothetical_limit']}\n\n"
            + _md_table(headers, table) + "\n")


# argument parsing -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key = value config file")
    common.add_argument("--precision", type=int, help="starting working precision in bits")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for independent certificates")
    common.add_argument("--out", type=Path, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "md", "csv"), help="report format")
    common.add_argument("--deterministic", action="store_true", help="omit timestamps and timings")
    common.add_argument("--no-cache", action="store_true", help="ignore and do not write cached certificates")
    common.add_argument("--cache-dir", type=Path, default=DEFAULT_CACHE, help="certificate cache directory")

    parser = argparse.ArgumentParser(prog="zfcert", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run certificates")
    g = v.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true", help="every certificate in the registry")
    g.add_argument("--lemma", action="append", metavar="ID", help="certificate id or alias; repeatable")
    v.add_argument("--list", action="store_true", help=argparse.SUPPRESS)
    sub.add_parser("constants", parents=[common], help="named constants with certified enclosures")
    f = sub.add_parser("final", parents=[common], help="final constant, crossover and coverage")
    f.add_argument("--variant", choices=sorted(ref.LOG_T_MAX))
    f.add_argument("--route", choices=zfr.ROUTES)
    f.add_argument("--A0", dest="A0", help="target constant as p/q or decimal")
    f.add_argument("--improved", action="store_true", help="also re-run with eta > A0/log t")
    sub.add_parser("mp-table", parents=[common], help="per-prime lower bounds of the trigonometric sums")
    s = sub.add_parser("search", parents=[common], help="rank kappa candidates of one degree")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--budget", type=int, default=8, help="maximum number of candidates to score")
    sub.add_parser("list", parents=[common], help="list certificate ids")
    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        cfg = parse_config(text, cfg)
    updates = {}
    if args.precision is not None:
        updates["precision"] = args.precision
    if args.format is not None:
        updates["format"] = args.format
    for name in ("variant", "route"):
        if getattr(args, name, None) is not None:
            updates[name] = getattr(args, name)
    if getattr(args, "A0", None) is not None:
        updates["A0"] = _rational(args.A0)
    cfg = replace(cfg, **updates)
    _validate(cfg)
    return cfg


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = out.with_name(out.name + ".tmp")
    tmp.write_text(text)
    tmp.replace(out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        fmt = cfg.format
        cache = not args.no_cache
        if args.command == "list":
            _emit("".join(f"{k}\t{e.description}\n" for k, e in REGISTRY.items()), args.out)
            return 0
        if args.command == "verify":
            if args.all:
                ids = list(REGISTRY)
            else:
                ids = []
                for target in args.lemma:
                    ids += [i for i in resolve(target) if i not in ids]
            certs = run_certificates(ids, cfg, jobs=args.jobs, cache=cache, cache_dir=args.cache_dir)
            _emit(render_verify(certs, cfg, fmt, args.deterministic), args.out)
            return 0 if all(c.passed for c in certs.values()) else 1
        if args.command == "constants":
            _emit(render_constants(constants_rows(cfg), cfg, fmt, args.deterministic), args.out)
            return 0
        if args.command == "mp-table":
            ids = [f"mp-{p}" for p in PRIMES_BELOW_100]
            certs = run_certificates(ids, cfg, jobs=args.jobs, cache=cache, cache_dir=args.cache_dir)
            _emit(render_mp(mp_rows(certs), cfg, fmt, args.deterministic), args.out)
            return 0 if all(c.passed for c in certs.values()) else 1
        if args.command == "final":
            from .suite import ITERATION_INPUTS
            certs = run_certificates(list(ITERATION_INPUTS), cfg, jobs=args.jobs, cache=cache,
                                     cache_dir=args.cache_dir)
            report = final_report(cfg, certs, improved=args.improved)
            _emit(render_final(report, cfg, fmt, args.deterministic), args.out)
            return 0 if report["verdict"] == Status.PASS.value else 1
        if args.command == "search":
            if args.degree < 0 or args.degree > 12:
                raise ConfigError("degree must lie in [0, 12]")
            _emit(render_search(search_report(args.degree, args.budget, cfg), cfg, fmt, args.deterministic),
                  args.out)
            return 0
    except UnknownCertificate as exc:
        print(f"zfcert: error: {exc.args[0]}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"zfcert: error: {exc}", file=sys.stderr)
        return 2
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
