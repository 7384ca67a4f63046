"""FastAPI service wrapping the word-problem workbench."""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from ..config import Limits, load_limits
from ..constsolve import decide_const
from ..constv import build_c_signature, lambda_of, normalize_c
from ..fb import (
    build_countermodel_slice, build_signature, decide_fb, forward_derive,
    normalize_space_time, presentation_from_tape,
)
from ..fb.base import parse_base_table
from ..infv import (
    build_inf_signature, builtin_listing, decide_inf, listing_from_values,
    parse_inf_term,
)
from ..samples import sample_machine
from ..terms import (
    Presentation, TermError, evans_solve, format_presentation, format_term,
    parse_presentation, parse_term,
)
from ..turing import MachineError, adjust, parse_machine, parse_tape, render_trace, run
from .models import (
    CheckLawsRequest, CheckLawsResponse, DemoRequest, DemoResponse,
    NormalizeRequest, NormalizeResponse, SimulateRequest, SimulateResponse,
    SolveRequest, SolveResponse, TapePresentationRequest,
    TapePresentationResponse,
)

app = FastAPI(title="varietas", version="0.1.0")


class RequestFault(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
        self.message = message


@app.exception_handler(RequestFault)
async def fault_handler(request, exc: RequestFault):
    return JSONResponse(status_code=400,
                        content={"error": exc.kind, "message": exc.message})


@app.exception_handler(TermError)
async def term_error_handler(request, exc: TermError):
    return JSONResponse(status_code=400,
                        content={"error": "parse", "message": str(exc)})


@app.exception_handler(MachineError)
async def machine_error_handler(request, exc: MachineError):
    return JSONResponse(status_code=400,
                        content={"error": "machine", "message": str(exc)})


@app.get("/health")
def health():
    return {"status": "ok"}


def _adjusted(text: str):
    try:
        return adjust(parse_machine(text))
    except MachineError:
        raise
    except Exception as exc:
        raise MachineError(str(exc))


def _limits(req: SolveRequest) -> Limits:
    base = load_limits()
    kw = {}
    if req.time_window is not None:
        kw["time_window"] = req.time_window
    if req.space_window is not None:
        kw["space_window"] = req.space_window
    if req.stage_bound is not None:
        kw["stage_bound"] = req.stage_bound
    from dataclasses import replace
    return replace(base, **kw)


def _split_query(query: str) -> tuple[str, str]:
    if "=" not in query:
        raise RequestFault("parse", "query must be '<term> = <term>'")
    left, right = query.split("=", 1)
    return left.strip(), right.strip()


@app.post("/solve", response_model=SolveResponse)
def solve(req: SolveRequest) -> SolveResponse:
    left, right = _split_query(req.query)
    limits = _limits(req)

    if req.variety == "inf":
        if req.x_listing and req.x_listing.startswith("builtin:"):
            xl = builtin_listing(req.x_listing.split(":", 1)[1])
        elif req.x_listing:
            xl = listing_from_values(int(v) for v in req.x_listing.split())
        else:
            xl = builtin_listing("primes")
        sig = build_inf_signature()
        gens: list[str] = []
        relations = []
        for raw in req.presentation.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("gen "):
                gens.extend(line.split()[1:])
            elif line.startswith("rel "):
                body = line[4:]
                if "=" not in body:
                    raise RequestFault("parse", "relation needs '='")
                a, b = body.split("=", 1)
                from ..terms import Equation
                relations.append(Equation(parse_inf_term(a, gens),
                                          parse_inf_term(b, gens)))
            else:
                raise RequestFault("parse", f"bad presentation line {line!r}")
        pres = Presentation(tuple(gens), tuple(relations), sig)
        equal = decide_inf(pres, parse_inf_term(left, gens),
                           parse_inf_term(right, gens), xl)
        return SolveResponse(verdict="EQUAL" if equal else "UNEQUAL",
                             case="quotient", table_mode="none")

    if req.variety == "free":
        from ..terms import Signature, OperationSymbol
        sig = _free_signature(req.presentation)
        pres = parse_presentation(req.presentation, sig)
        lhs = parse_term(left, sig, pres.generators)
        rhs = parse_term(right, sig, pres.generators)
        equal = evans_solve(pres, lhs, rhs)
        return SolveResponse(verdict="EQUAL" if equal else "UNEQUAL",
                             case="free", table_mode="none")

    if req.machine is None:
        raise RequestFault("machine", f"variety {req.variety!r} needs a machine")
    m = _adjusted(req.machine)

    if req.variety == "fb":
        fbsig = build_signature(m)
        pres = parse_presentation(req.presentation, fbsig.signature)
        lhs = parse_term(left, fbsig.signature, pres.generators)
        rhs = parse_term(right, fbsig.signature, pres.generators)
        bt = None
        if req.base_table and req.base_table != "derive":
            bt = parse_base_table(req.base_table, fbsig, pres.generators)
        outcome = decide_fb(pres, m, lhs, rhs, case=req.case, limits=limits,
                            base_table=bt, fbsig=fbsig)
        trace = []
        if req.trace and outcome.certificate is not None:
            trace = outcome.certificate.lines()
        return SolveResponse(
            verdict=outcome.verdict.upper() if outcome.verdict != "unknown"
            else "UNKNOWN",
            reason=outcome.reason, case=outcome.case,
            table_mode=outcome.table_mode, stage_used=outcome.stage_used,
            trace=trace,
        )

    if req.variety == "const":
        csig = build_c_signature(m)
        pres = parse_presentation(req.presentation, csig.signature)
        lhs = parse_term(left, csig.signature, pres.generators)
        rhs = parse_term(right, csig.signature, pres.generators)
        bt = None
        if req.base_table and req.base_table != "derive":
            from ..fb.signature import FBSignature
            bt = parse_base_table(
                req.base_table,
                type("Shim", (), {"signature": csig.signature})(), pres.generators)
        outcome = decide_const(pres, m, lhs, rhs, case=req.case,
                               limits=limits, base_table=bt, csig=csig)
        return SolveResponse(
            verdict=outcome.verdict.upper() if outcome.verdict != "unknown"
            else "UNKNOWN",
            reason=outcome.reason, case=outcome.case,
            table_mode=outcome.table_mode,
        )

    raise RequestFault("parse", f"unknown variety {req.variety!r}")


def _free_signature(presentation_text: str):
    """Infer a free signature: every applied head becomes an operation."""
    from ..terms import Signature, OperationSymbol
    import re as _re

    arities: dict[str, int] = {}
    gens: set[str] = set()
    for raw in presentation_text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line.startswith("gen "):
            gens.update(line.split()[1:])
    body = "\n".join(l.split("#", 1)[0] for l in presentation_text.splitlines())
    for match in _re.finditer(r"([A-Za-z0-9_]+)\(", body):
        name = match.group(1)
        tail = body[match.end():]
        depth, args = 1, 1
        for ch in tail:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    break
            elif ch == "," and depth == 1:
                args += 1
        arities.setdefault(name, args)
    consts = set()
    for match in _re.finditer(r"[A-Za-z0-9_]+", body):
        name = match.group(0)
        if name not in arities and name not in gens \
                and name not in ("gen", "rel"):
            consts.add(name)
    symbols = [OperationSymbol(n, a) for n, a in arities.items()]
    symbols += [OperationSymbol(n, 0) for n in consts]
    return Signature(symbols)


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    m = _adjusted(req.machine)
    tape = parse_tape(req.tape, m)
    tr = run(m, tape, req.steps)
    return SimulateResponse(lines=render_trace(tr, m).splitlines(),
                            halted_at=tr.halted_at, steps_run=len(tr.rows) - 1)


@app.post("/presentation/from-tape", response_model=TapePresentationResponse)
def tape_presentation(req: TapePresentationRequest) -> TapePresentationResponse:
    m = _adjusted(req.machine)
    tape = parse_tape(req.tape, m)
    fbsig = build_signature(m)
    pres = presentation_from_tape(m, tape, fbsig)
    return TapePresentationResponse(
        presentation=format_presentation(pres, fbsig.signature))


@app.post("/normalize", response_model=NormalizeResponse)
def normalize(req: NormalizeRequest) -> NormalizeResponse:
    gens = tuple(req.generators)
    if req.variety == "const":
        if req.machine is None:
            raise RequestFault("machine", "const normalization needs a machine")
        csig = build_c_signature(_adjusted(req.machine))
        t = parse_term(req.term, csig.signature, gens)
        lam = normalize_c(t)
        return NormalizeResponse(
            normal_form=format_term(lam.term(), csig.signature),
            shape="SnTmHk", time=lam.time, space=lam.space, seed="c",
        )
    if req.machine is None:
        raise RequestFault("machine", "fb normalization needs a machine")
    fbsig = build_signature(_adjusted(req.machine))
    t = parse_term(req.term, fbsig.signature, gens)
    nf = normalize_space_time(t, gens)
    return NormalizeResponse(
        normal_form=format_term(nf.term(), fbsig.signature),
        shape=nf.shape, time=nf.time, space=nf.space,
        seed=format_term(nf.seed, fbsig.signature),
    )


@app.post("/check-laws", response_model=CheckLawsResponse)
def check_laws(req: CheckLawsRequest) -> CheckLawsResponse:
    m = _adjusted(req.machine)
    tape = parse_tape(req.tape, m)
    fbsig = build_signature(m)
    slc, report = build_countermodel_slice(
        m, tape, req.time_window, req.space_window, fbsig)
    pres = presentation_from_tape(m, tape, fbsig)
    holds = not slc.check_presentation(pres)
    return CheckLawsResponse(
        checked=report.checked,
        skipped_outside_window=report.skipped_outside_window,
        violations=report.violations[:50],
        zero_one_separated=slc.separates_zero_one(),
        presentation_holds=holds,
    )


@app.post("/demo", response_model=DemoResponse)
def demo(req: DemoRequest) -> DemoResponse:
    if req.scenario == "halting":
        m, tape = sample_machine("halting")
        fbsig = build_signature(m)
        pres = presentation_from_tape(m, tape, fbsig)
        table = forward_derive(pres, m, 50, fbsig)
        lines = ["halting run: the collapse chain derived from the presentation"]
        assert table.certificate is not None
        lines += table.certificate.lines()
        outcome = decide_fb(pres, m,
                            parse_term("0", fbsig.signature),
                            parse_term("1", fbsig.signature),
                            case="degenerate", certificate=table.certificate)
        lines.append(f"solve 0 = 1: {outcome.verdict.upper()}")
        return DemoResponse(lines=lines, verdict=outcome.verdict.upper())
    if req.scenario == "looping":
        m, tape = sample_machine("looping")
        fbsig = build_signature(m)
        slc, report = build_countermodel_slice(
            m, tape, req.time_window, req.space_window, fbsig)
        lines = [
            f"looping run: separating slice on a {req.time_window}x"
            f"{req.space_window} window",
            f"law instances checked: {report.checked}",
            f"law violations: {len(report.violations)}",
            f"0 != 1 witnessed: {slc.separates_zero_one()}",
        ]
        verdict = "UNEQUAL" if slc.separates_zero_one() and report.ok else "UNKNOWN"
        lines.append(f"solve 0 = 1: {verdict}")
        return DemoResponse(lines=lines, verdict=verdict)
    raise RequestFault("parse", f"unknown scenario {req.scenario!r}")
