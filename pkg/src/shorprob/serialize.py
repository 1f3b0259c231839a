"""JSON documents and CSV rows for the command-line tool.

Integers and rational parts are written as decimal strings so nothing is
lost to floating point; each rational also carries a 12-significant-digit
``approx`` for human readers.
"""

from __future__ import annotations

import csv
import io
import re
from decimal import ROUND_HALF_EVEN, Context
from fractions import Fraction

from . import closedform
from .errors import InvalidInput, UnsupportedCase
from .numtheory import Factorization
from .oracle import OracleCensus
from .simulator import SimulationReport

SCHEMA_VERSION = "1"
APPROX_DIGITS = 12
CSV_HEADER = (
    "n",
    "factorization",
    "step1",
    "step2",
    "step3",
    "overall",
    "overall_approx",
    "failure_class",
)

_APPROX_CTX = Context(prec=APPROX_DIGITS, rounding=ROUND_HALF_EVEN)
_TERM = re.compile(r"(\d+)(?:\^(\d+))?")


def approx(q: Fraction) -> float:
    """q correctly rounded to 12 significant digits."""
    d = _APPROX_CTX.divide(q.numerator, q.denominator)
    return float(d)


def rational_to_json(q: Fraction) -> dict:
    return {"num": str(q.numerator), "den": str(q.denominator), "approx": approx(q)}


def rational_from_json(obj: dict) -> Fraction:
    num, den = int(obj["num"]), int(obj["den"])
    q = Fraction(num, den)
    if (q.numerator, q.denominator) != (num, den):
        raise InvalidInput(f"rational {num}/{den} is not in lowest terms")
    return q


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_factor_expression(text: str) -> Factorization:
    """Parse ``term ("*" term)*`` with ``term = prime ("^" exp)?``; spaces are ignored."""
    compact = re.sub(r"\s+", "", text)
    if not compact:
        raise InvalidInput("empty factor expression")
    pairs = []
    for term in compact.split("*"):
        m = _TERM.fullmatch(term)
        if m is None:
            raise InvalidInput(f"bad factor term {term!r} in {text!r}")
        pairs.append((int(m.group(1)), int(m.group(2) or 1)))
    return Factorization.from_prime_powers(pairs)


def factorization_to_json(f: Factorization) -> list[dict]:
    out = []
    if f.k0:
        out.append({"p": "2", "k": f.k0})
    for o in f.odd_factors:
        out.append({"p": str(o.p), "k": o.k, "s": o.s, "m": str(o.m)})
    return out


def census_to_json(c: OracleCensus) -> dict:
    return {name: str(v) for name, v in c.counts().items()}


def output_document(f: Factorization, census: OracleCensus | None = None) -> dict:
    probs = closedform.overall_probability(f)
    try:
        printed = rational_to_json(closedform.printed_overall_probability(f))
    except UnsupportedCase:
        printed = None
    fc = closedform.classify_failure(f)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "n": str(f.n),
        "factorization": factorization_to_json(f),
        "probabilities": {
            "step1": rational_to_json(probs.p_coprime),
            "step2": rational_to_json(probs.p_even_given_coprime),
            "step3": rational_to_json(probs.p_good_given_even),
            "overall": rational_to_json(probs.p_overall),
        },
        "printed_overall": printed,
        "failure_class": {
            "tag": fc.tag,
            "witness": None if fc.witness is None else {"p": str(fc.witness[0]), "k": fc.witness[1]},
        },
    }
    if census is not None:
        doc["census"] = census_to_json(census)
    return doc


def probabilities_from_document(doc: dict) -> closedform.StepProbabilities:
    p = doc["probabilities"]
    return closedform.StepProbabilities(
        *(rational_from_json(p[k]) for k in ("step1", "step2", "step3", "overall"))
    )


def report_to_json(r: SimulationReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "n": str(r.n),
        "trials": r.trials,
        "successes": r.successes,
        "estimate": rational_to_json(r.estimate),
        "exact_reference": rational_to_json(r.exact_reference),
        "abs_error": r.abs_error,
        "z_score": r.z_score,
        "seed": r.seed,
        "mode": r.mode.value,
        "range": r.range_mode.value,
        "engine": r.engine,
    }


def sweep_row(f: Factorization) -> list[str]:
    probs = closedform.overall_probability(f)
    return [
        str(f.n),
        str(f),
        format_rational(probs.p_coprime),
        format_rational(probs.p_even_given_coprime),
        format_rational(probs.p_good_given_even),
        format_rational(probs.p_overall),
        repr(approx(probs.p_overall)),
        closedform.classify_failure(f).tag,
    ]


def sweep_csv(factorizations) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for f in factorizations:
        w.writerow(sweep_row(f))
    return buf.getvalue()
