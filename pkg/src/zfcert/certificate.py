"""Certificates: the unit of verified output.

A certificate bundles a claim, a list of checks, named enclosures, a witness
payload and free-text findings. Its status is derived from the required
checks: any False makes it FAIL, any undecided check (with no False) makes it
INDETERMINATE, otherwise PASS. Advisory checks record how a published
intermediate step fares without affecting the status.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Iterator, Optional

from gmpy2 import mpfr, mpz

from .exactnum import Interval, decode_mpfr, encode_mpfr, iv

_MPFR = type(mpfr())
_MPZ = type(mpz())


class Status(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INDETERMINATE = "INDETERMINATE"
    INCOMPLETE = "INCOMPLETE"


@dataclass
class Check:
    name: str
    claim: str
    verdict: Optional[bool]
    required: bool = True
    detail: str = ""

    @property
    def label(self) -> str:
        if self.verdict is None:
            return "UNDECIDED"
        return "TRUE" if self.verdict else "FALSE"


@dataclass
class Certificate:
    id: str
    claim: str
    status: Status
    checks: list[Check] = field(default_factory=list)
    enclosures: dict[str, Interval] = field(default_factory=dict)
    witness: dict[str, Any] = field(default_factory=dict)
    findings: list[str] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self, deterministic: bool = False) -> dict:
        out = {
            "id": self.id,
            "claim": self.claim,
            "status": self.status.value,
            "checks": [
                {"name": c.name, "claim": c.claim, "verdict": c.label, "required": c.required, "detail": c.detail}
                for c in self.checks
            ],
            "enclosures": {k: encode_value(v) for k, v in self.enclosures.items()},
            "witness": encode_value(self.witness),
            "findings": list(self.findings),
        }
        if not deterministic:
            out["wall_time"] = round(self.wall_time, 6)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Certificate":
        verdicts = {"TRUE": True, "FALSE": False, "UNDECIDED": None}
        return cls(
            id=data["id"],
            claim=data["claim"],
            status=Status(data["status"]),
            checks=[Check(c["name"], c["claim"], verdicts[c["verdict"]], c["required"], c["detail"]) for c in data["checks"]],
            enclosures={k: decode_value(v) for k, v in data["enclosures"].items()},
            witness=decode_value(data["witness"]),
            findings=list(data["findings"]),
            wall_time=data.get("wall_time", 0.0),
        )


def derive_status(checks: list[Check]) -> Status:
    required = [c for c in checks if c.required]
    if any(c.verdict is False for c in required):
        return Status.FAIL
    if any(c.verdict is None for c in required):
        return Status.INDETERMINATE
    return Status.PASS


class CertificateBuilder:
    """Accumulates checks and enclosures, then freezes them into a Certificate."""

    def __init__(self, cert_id: str, claim: str):
        self.id = cert_id
        self.claim = claim
        self.checks: list[Check] = []
        self.enclosures: dict[str, Interval] = {}
        self.witness: dict[str, Any] = {}
        self.findings: list[str] = []
        self._start = time.perf_counter()

    def add(self, name: str, claim: str, verdict: Optional[bool], *, required: bool = True,
            detail: str = "") -> Optional[bool]:
        self.checks.append(Check(name, claim, verdict, required, detail))
        return verdict

    def less(self, name: str, value: Interval, bound, *, claim: str = "", required: bool = True,
             strict: bool = True) -> Optional[bool]:
        """Record ``value < bound`` (or <= with strict=False), deciding from the enclosure."""
        self.enclosures[name] = value
        verdict = decide_below(value, bound, strict)
        return self.add(name, claim or f"{name} {'<' if strict else '<='} {_show(bound)}", verdict,
                        required=required, detail=f"enclosure {value!r}")

    def greater(self, name: str, value: Interval, bound, *, claim: str = "", required: bool = True,
                strict: bool = True) -> Optional[bool]:
        self.enclosures[name] = value
        verdict = decide_above(value, bound, strict)
        return self.add(name, claim or f"{name} {'>' if strict else '>='} {_show(bound)}", verdict,
                        required=required, detail=f"enclosure {value!r}")

    def include(self, name: str, cert: Certificate, *, required: bool = True) -> Optional[bool]:
        verdict = {Status.PASS: True, Status.FAIL: False}.get(cert.status)
        return self.add(name, cert.claim, verdict, required=required, detail=f"sub-certificate {cert.id}: {cert.status.value}")

    def note(self, text: str) -> None:
        self.findings.append(text)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def build(self) -> Certificate:
        return Certificate(
            id=self.id,
            claim=self.claim,
            status=derive_status(self.checks),
            checks=self.checks,
            enclosures=self.enclosures,
            witness=self.witness,
            findings=self.findings,
            wall_time=time.perf_counter() - self._start,
        )


def _show(x) -> str:
    if isinstance(x, Fraction):
        return str(x) if x.denominator == 1 else f"{float(x):.12g}"
    return repr(x)


def _bound_hi(bound):
    return bound.hi if isinstance(bound, Interval) else iv(bound).hi


def _bound_lo(bound):
    return bound.lo if isinstance(bound, Interval) else iv(bound).lo


def decide_below(value: Interval, bound, strict: bool = True) -> Optional[bool]:
    """True if value < bound surely, False if surely not, None if the enclosures overlap."""
    b_lo, b_hi = _bound_lo(bound), _bound_hi(bound)
    if strict:
        if value.hi < b_lo:
            return True
        if value.lo >= b_hi:
            return False
    else:
        if value.hi <= b_lo:
            return True
        if value.lo > b_hi:
            return False
    return None


def decide_above(value: Interval, bound, strict: bool = True) -> Optional[bool]:
    b_lo, b_hi = _bound_lo(bound), _bound_hi(bound)
    if strict:
        if value.lo > b_hi:
            return True
        if value.hi <= b_lo:
            return False
    else:
        if value.lo >= b_hi:
            return True
        if value.hi < b_lo:
            return False
    return None


# lossless JSON encoding ---------------------------------------------------------

def encode_value(v: Any) -> Any:
    if isinstance(v, Interval):
        return {"$interval": {"lo": encode_mpfr(v.lo), "hi": encode_mpfr(v.hi), "prec": v.prec,
                              "display": f"in [{_dec(v, 'lo')}, {_dec(v, 'hi')}]"}}
    if isinstance(v, Fraction):
        return {"$rational": f"{v.numerator}/{v.denominator}"}
    if isinstance(v, _MPFR):
        return {"$mpfr": encode_mpfr(v), "prec": v.precision}
    if isinstance(v, _MPZ):
        return int(v)
    if isinstance(v, Status):
        return v.value
    if isinstance(v, dict):
        return {str(k): encode_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [encode_value(x) for x in v]
    if isinstance(v, bool) or v is None or isinstance(v, (int, float, str)):
        return v
    return str(v)


def decode_value(v: Any) -> Any:
    if isinstance(v, dict):
        if "$interval" in v:
            d = v["$interval"]
            return Interval(decode_mpfr(d["lo"], d["prec"]), decode_mpfr(d["hi"], d["prec"]), d["prec"])
        if "$rational" in v:
            return Fraction(v["$rational"])
        if "$mpfr" in v:
            return decode_mpfr(v["$mpfr"], v["prec"])
        return {k: decode_value(x) for k, x in v.items()}
    if isinstance(v, list):
        return [decode_value(x) for x in v]
    return v


def _dec(x: Interval, side: str, digits: int = 15) -> str:
    from .exactnum import ceil_decimal, floor_decimal
    q = x.lower_fraction() if side == "lo" else x.upper_fraction()
    if q == 0:
        return "0"
    mag = abs(q)
    exponent = 0
    while mag >= 10:
        mag /= 10
        exponent += 1
    while mag < 1:
        mag *= 10
        exponent -= 1
    shift = digits - 1 - exponent
    r = floor_decimal(x, shift) if side == "lo" else ceil_decimal(x, shift)
    return format_fraction(r, max(shift, 0))


def format_fraction(q: Fraction, places: int) -> str:
    sign = "-" if q < 0 else ""
    q = abs(q)
    whole = q.numerator // q.denominator
    frac = q - whole
    digits = frac * 10 ** places
    if places == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{int(digits):0{places}d}"


def lower_decimal(x: Interval, digits: int = 15) -> str:
    return _dec(x, "lo", digits)


def upper_decimal(x: Interval, digits: int = 15) -> str:
    return _dec(x, "hi", digits)


@contextmanager
def timed() -> Iterator[dict]:
    box = {}
    start = time.perf_counter()
    yield box
    box["seconds"] = time.perf_counter() - start


def with_escalation(build, start: int = 128, ceiling: int = 2048) -> Certificate:
    """Rebuild a certificate at doubling precision while it is INDETERMINATE.

    ``build(prec)`` returns a Certificate; the precision used is recorded in the witness.
    """
    prec = start
    while True:
        cert = build(prec)
        if cert.status is not Status.INDETERMINATE or prec * 2 > ceiling:
            cert.witness.setdefault("precision_bits", prec)
            return cert
        prec *= 2
