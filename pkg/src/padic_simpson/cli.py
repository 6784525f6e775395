"""Batch driver: JSON jobs in, JSON reports (or aligned tables) out.

Exit status is 0 when every job succeeded, 1 when some job hit a domain
error, and 2 when some job was malformed (schema or parse failure).
Reports contain no timing unless ``--timing`` is passed, so identical
(job, seed) pairs give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import jsonschema

from .cohomology import (character_blocks, cohomology, comparison_higgs, comparison_map, higgs_complex,
                         koszul_complex, lift_rep)
from .correspondence import (CocycleBasis, DescentConfig, HiggsField, cocycle_from_hom_and_gauge,
                             descend_cocycle, higgs_to_rep, rep_to_higgs)
from .errors import MalformedJob, PadicSimpsonError
from .hitchin import betti_hitchin, hitchin_map
from .matfun import Mat, mat_exp, trim
from .rings import LaurentRing, PrecisionContext, ScalarRing
from .sampling import random_small_images
from .smallrep import TwistedCocycle, find_conjugator, validate_rep
from .smallrep import rep_equivalent as _rep_equivalent

log = logging.getLogger("padic_simpson")

GUARD_ENV = "PADIC_SIMPSON_GUARD"
EXIT_OK, EXIT_DOMAIN, EXIT_MALFORMED = 0, 1, 2


@lru_cache(maxsize=1)
def job_schema() -> dict:
    text = resources.files("padic_simpson").joinpath("schemas/job.schema.json").read_text()
    return json.loads(text)


def validate_job(job) -> None:
    try:
        jsonschema.validate(job, job_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise MalformedJob(f"{where}: {exc.message}") from None


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------


def make_context(spec: dict) -> tuple[PrecisionContext, str | None]:
    override = os.environ.get(GUARD_ENV)
    guard = spec.get("guard")
    if override is not None:
        guard = int(override)
    ctx = PrecisionContext(p=spec["p"], N=spec["N"], m=spec.get("m", 0), guard=guard)
    return ctx, override


def _fraction(x) -> Fraction:
    if isinstance(x, list):
        return Fraction(int(x[0]), int(x[1]))
    return Fraction(str(x))


def _matrices(ring, objs) -> list:
    return [Mat(ring, rows) for rows in objs]


def _cohom_json(rep) -> list:
    return rep.to_json()


# ---------------------------------------------------------------------------
# Tasks
# ---------------------------------------------------------------------------


def task_correspondence(ctx, payload, seed):
    ring = ScalarRing(ctx)
    if payload["direction"] == "rep-to-higgs":
        rho = validate_rep(_matrices(ring, payload["rep"]))
        theta = rep_to_higgs(rho)
        back = higgs_to_rep(theta)
        return {"theta": [A.to_json() for A in theta.coefficients], "roundtrip": back == rho}, None
    theta = HiggsField(tuple(_matrices(ring, payload["theta"])))
    basis = CocycleBasis(tuple(tuple(ring.coerce(x) for x in row) for row in payload["basis"])) \
        if "basis" in payload else None
    rho = higgs_to_rep(theta, basis)
    result = {"rep": [g.to_json() for g in rho.images]}
    if basis is None:
        result["roundtrip"] = rep_to_higgs(rho) == theta
    return result, None


def _compare_one(rho) -> dict:
    group = koszul_complex(rho)
    theta = comparison_higgs(rho)
    higgs = higgs_complex(theta)
    u = comparison_map(rho)
    hg, hh = cohomology(group), cohomology(higgs)
    return {
        "group": _cohom_json(hg),
        "higgs": _cohom_json(hh),
        "chain_map": {"commutes": u.commutes(group, higgs), "invertible": u.is_invertible()},
        "verdict": "match" if hg.divisor_lists() == hh.divisor_lists() else "mismatch",
    }


def task_cohomology_compare(ctx, payload, seed):
    ring = ScalarRing(ctx)
    if "rep" in payload:
        return _compare_one(validate_rep(_matrices(ring, payload["rep"]))), None
    spec = payload["random"]
    rng = random.Random(seed)
    cases = []
    for _ in range(spec["count"]):
        rho = validate_rep(random_small_images(ctx, spec["n"], spec["d"], rng))
        out = _compare_one(rho)
        out["rep"] = rho.to_json()["images"]
        cases.append(out)
    verdict = "match" if all(c["verdict"] == "match" for c in cases) else "mismatch"
    return {"cases": cases, "verdict": verdict}, None


def task_character_blocks(ctx, payload, seed):
    ring = ScalarRing(ctx)
    rho = validate_rep(_matrices(ring, payload["rep"]))
    level = payload["level"]
    rho = lift_rep(rho, level)
    blocks = []
    for index, cplx in character_blocks(rho, level):
        rep = cohomology(cplx)
        killed = all(r.annihilator <= 1 for r in rep.degrees)
        blocks.append({
            "character": [str(i) for i in index],
            "cohomology": _cohom_json(rep),
            "killed_by_p": killed,
        })
    nonzero_ok = all(b["killed_by_p"] for b in blocks if any(c != "0" for c in b["character"]))
    return {"blocks": blocks, "nonzero_blocks_killed_by_p": nonzero_ok}, None


def task_descent(ctx, payload, seed):
    spec = payload["ring"]
    ring = LaurentRing(ctx, spec["d"], spec["bound"])
    cfg = payload.get("config", {})
    config = DescentConfig(t=cfg.get("t", 3), gamma_tors=cfg.get("gamma_tors", 1),
                           c_min=_fraction(cfg.get("c_min", 1)), max_iter=cfg.get("max_iter", 40))
    if "cocycle" in payload:
        c = TwistedCocycle(tuple(_matrices(ring, payload["cocycle"])), action="toric")
    else:
        planted = payload["planted"]
        psi = _matrices(ring, planted["hom"])
        X = Mat(ring, planted["gauge_log"])
        c = cocycle_from_hom_and_gauge(psi, trim(mat_exp(X)), trim(mat_exp(-X)))
    res = descend_cocycle(c, config)
    result = res.to_json()
    result["rep"] = [g.to_json() for g in res.rep.images]
    return result, res.trace


def task_hitchin(ctx, payload, seed):
    ring = ScalarRing(ctx)
    if "theta" in payload:
        point = hitchin_map(HiggsField(tuple(_matrices(ring, payload["theta"]))))
    else:
        point = betti_hitchin(validate_rep(_matrices(ring, payload["rep"])))
    out = point.to_json()
    out["zero"] = point.is_zero()
    return out, None


def task_oracle_conjugacy(ctx, payload, seed):
    ring = ScalarRing(ctx)
    rho1 = validate_rep(_matrices(ring, payload["rep1"]))
    rho2 = validate_rep(_matrices(ring, payload["rep2"]))
    mode = payload.get("mode", "exact-search")
    cap = payload.get("cap", 10 ** 5)
    C = _rep_equivalent(rho1, rho2, mode=mode, cap=cap, seed=seed or 0)
    th1, th2 = rep_to_higgs(rho1), rep_to_higgs(rho2)
    if th1 == th2:
        D = Mat.identity(ring, rho1.n)
    else:
        D = find_conjugator(th1.coefficients, th2.coefficients, mode=mode, cap=cap, seed=seed or 0)
    return {
        "equivalent": C is not None,
        "conjugator": None if C is None else C.to_json(),
        "higgs_equivalent": D is not None,
        "agree": (C is None) == (D is None),
    }, None


TASKS = {
    "correspondence": task_correspondence,
    "cohomology-compare": task_cohomology_compare,
    "character-blocks": task_character_blocks,
    "descent": task_descent,
    "hitchin": task_hitchin,
    "oracle-conjugacy": task_oracle_conjugacy,
}


def run_job(job, seed: int | None = None, timing: bool = False) -> tuple[dict, int]:
    """Run one job and return (report, exit code); never raises on bad input or domain errors."""
    report = {"job": job, "status": "ok"}
    if isinstance(job, dict) and "id" in job:
        report = {"id": job["id"], **report}
    start = time.perf_counter()
    try:
        validate_job(job)
    except MalformedJob as exc:
        report.update(status="error", error={"type": "MalformedJob", "message": str(exc)})
        return report, EXIT_MALFORMED
    seed = job.get("seed", seed)
    try:
        ctx, override = make_context(job["context"])
    except (ValueError, TypeError) as exc:
        report.update(status="error", error={"type": "MalformedJob", "message": str(exc)})
        return report, EXIT_MALFORMED
    report["context"] = ctx.to_json()
    if override is not None:
        report["guard_override"] = override
        log.warning("%s=%s overrides the guard-digit formula", GUARD_ENV, override)
    code = EXIT_OK
    try:
        result, trace = TASKS[job["task"]](ctx, job["payload"], seed)
        report["result"] = result
        if trace is not None:
            report["trace"] = trace
    except (PadicSimpsonError, ArithmeticError, ValueError) as exc:
        report.update(status="error", error={"type": type(exc).__name__, "message": str(exc)})
        code = EXIT_DOMAIN
    except Exception as exc:  # surfaced as a report, never a crash
        log.exception("unexpected failure in job %s", job.get("id", job["task"]))
        report.update(status="error", error={"type": type(exc).__name__, "message": str(exc)})
        code = EXIT_DOMAIN
    if timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    return report, code


def _run_packed(args):
    return run_job(*args)


def run_batch(jobs: list, seed: int | None = None, parallel: int = 1, timing: bool = False):
    args = [(job, seed, timing) for job in jobs]
    if parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(_run_packed, args))
    else:
        results = [_run_packed(a) for a in args]
    reports = [r for r, _ in results]
    codes = [c for _, c in results]
    return reports, max(codes, default=EXIT_OK)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def _summary(report: dict) -> str:
    if report["status"] != "ok":
        err = report.get("error", {})
        return f"{err.get('type')}: {err.get('message')}"
    res = report.get("result", {})
    for key in ("verdict", "agree", "roundtrip", "zero", "nonzero_blocks_killed_by_p", "loss"):
        if key in res:
            return f"{key}={json.dumps(res[key])}"
    return "ok"


def format_table(reports: list) -> str:
    rows = [("#", "id", "task", "status", "summary")]
    for i, r in enumerate(reports, start=1):
        job = r.get("job") if isinstance(r.get("job"), dict) else {}
        rows.append((str(i), str(r.get("id", "-")), str(job.get("task", "?")), r["status"], _summary(r)))
    widths = [max(len(row[k]) for row in rows) for k in range(4)]
    lines = []
    for row in rows:
        lines.append("  ".join(row[k].ljust(widths[k]) for k in range(4)) + "  " + row[4])
    return "\n".join(line.rstrip() for line in lines) + "\n"


def _load(text: str):
    data = json.loads(text)
    if isinstance(data, list):
        return data, True
    if isinstance(data, dict) and "jobs" in data and "task" not in data:
        return data["jobs"], True
    return [data], False


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="padic-simpson", description=__doc__.splitlines()[0])
    ap.add_argument("--job", required=True, help="job or batch JSON file, or - for stdin")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--format", choices=("json", "table"), default="json")
    ap.add_argument("--seed", type=int, default=None, help="seed for jobs that do not set one")
    ap.add_argument("--parallel", type=int, default=1, help="number of worker processes")
    ap.add_argument("--timing", action="store_true", help="include wall-clock timing (not reproducible)")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")

    try:
        text = sys.stdin.read() if args.job == "-" else open(args.job, encoding="utf-8").read()
        jobs, batch = _load(text)
    except (OSError, json.JSONDecodeError) as exc:
        report = {"status": "error", "error": {"type": "MalformedJob", "message": str(exc)}}
        sys.stdout.write(dumps(report))
        return EXIT_MALFORMED

    reports, code = run_batch(jobs, seed=args.seed, parallel=args.parallel, timing=args.timing)
    if args.format == "table":
        out = format_table(reports)
    else:
        out = dumps({"reports": reports} if batch else reports[0])
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
