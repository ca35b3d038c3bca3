from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field
from typing import Dict, List, Optional
import logging

from .config import get_settings
from .constructions import FAMILIES, c4_arrow, generate
from .discrepancy import bfree_fas, prefix_cut_witness
from .errors import BudgetExceededError, FasLabError, GraphFormatError, PreconditionError
from .exact_oracle import beta_exact, tau_exact, tau_partition_exact, tau_star_exact
from .graph_core import FasResult, format_edge_list, parse_edge_list, verify_fas, witness_from_sets
from .greedy_fas import randomized_fas
from .quasirandom import QuasirandomReport, balance_partition, quasirandom_report

settings = get_settings()

# Configure logging early so debug/info messages are visible during request handling
logging.basicConfig(level=settings.log_level)
logger = logging.getLogger(__name__)

app = FastAPI(title="FAS Lab API", version="1.0.0")

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# Pydantic models
class FasRequest(BaseModel):
    edge_list: str
    algo: str = "greedy"
    trials: int = settings.default_trials
    seed: int = settings.default_seed
    refine: bool = False


class FasResponse(BaseModel):
    algo: str
    size: int
    beta: Optional[int] = None
    surplus: float
    ordering: List[int]
    deleted: List[List[int]]
    notes: Dict[str, str] = Field(default_factory=dict)


class DiscrepancyRequest(BaseModel):
    edge_list: str
    which: str = "tau"
    mode: str = "exact"
    trials: int = settings.default_trials
    seed: int = settings.default_seed


class DiscrepancyResponse(BaseModel):
    which: str
    value: int
    exact: bool
    sources: Optional[List[int]] = None
    targets: Optional[List[int]] = None


class QuasiRequest(BaseModel):
    edge_list: str
    delta: float = 0.5
    ks: List[int] = Field(default_factory=lambda: [4, 6])
    trials: int = 20
    seed: int = settings.default_seed


def _http_error(exc: FasLabError) -> HTTPException:
    """Map library errors to status codes: 413 for budget refusals, 400 for bad input"""
    if isinstance(exc, BudgetExceededError):
        return HTTPException(status_code=413, detail=str(exc))
    if isinstance(exc, (GraphFormatError, PreconditionError)):
        return HTTPException(status_code=400, detail=str(exc))
    logger.error(f"Internal check failed: {exc}")
    return HTTPException(status_code=500, detail=str(exc))


@app.get("/")
def read_root():
    return {"message": "Welcome to FAS Lab API", "families": sorted(FAMILIES)}


@app.get("/gen/{family}", response_class=PlainTextResponse)
def gen(family: str, params: List[int] = Query(default=[]), seed: int = 0):
    """Edge list of a generator family; `params` are positional as in the CLI"""
    if family not in FAMILIES:
        raise HTTPException(status_code=404, detail=f"Unknown family {family!r}")
    names = FAMILIES[family].params
    if len(params) != len(names):
        raise HTTPException(status_code=400, detail=f"Family {family!r} takes parameters {list(names)}")
    try:
        return format_edge_list(generate(family, dict(zip(names, params)), seed=seed))
    except FasLabError as e:
        raise _http_error(e)


@app.post("/fas", response_model=FasResponse)
def fas(request: FasRequest):
    try:
        G = parse_edge_list(request.edge_list)
        beta = None
        if request.algo == "exact":
            exact = beta_exact(G)
            result: FasResult = exact.fas
            beta = exact.beta
        elif request.algo == "greedy":
            result = randomized_fas(G, trials=request.trials, seed=request.seed, refine=request.refine)
        elif request.algo == "bfree":
            result = bfree_fas(G, c4_arrow(), trials=request.trials, seed=request.seed)
        else:
            raise HTTPException(status_code=400, detail="algo must be greedy, exact or bfree")
        # Never hand out an unchecked FAS
        verify_fas(G, result)
    except FasLabError as e:
        raise _http_error(e)

    logger.info(f"/fas {request.algo}: n={G.n}, m={G.m}, size {result.size}")
    return FasResponse(
        algo=request.algo,
        size=result.size,
        beta=beta,
        surplus=float(result.surplus),
        ordering=list(result.ordering),
        deleted=[list(e) for e in sorted(result.deleted)],
        notes={k: str(v) for k, v in result.notes.items()},
    )


@app.post("/discrepancy", response_model=DiscrepancyResponse)
def discrepancy(request: DiscrepancyRequest):
    if request.which not in ("tau", "tau-star", "tau-part"):
        raise HTTPException(status_code=400, detail="which must be tau, tau-star or tau-part")
    try:
        G = parse_edge_list(request.edge_list)
        if request.mode == "exact":
            if request.which == "tau":
                value, witness = tau_exact(G)
            elif request.which == "tau-star":
                value, witness = tau_star_exact(G)
            else:
                return DiscrepancyResponse(which=request.which, value=tau_partition_exact(G), exact=True)
        elif request.which == "tau-part":
            balance = balance_partition(G)
            witness = witness_from_sets(G, balance.sources, balance.sinks)
            value = balance.tau_part
        else:
            ordering = randomized_fas(G, trials=request.trials, seed=request.seed).ordering
            witness = prefix_cut_witness(G, ordering)
            value = witness.difference
    except FasLabError as e:
        raise _http_error(e)

    return DiscrepancyResponse(
        which=request.which,
        value=value,
        exact=request.mode == "exact",
        sources=sorted(witness.sources),
        targets=sorted(witness.targets),
    )


@app.post("/quasi", response_model=QuasirandomReport)
def quasi(request: QuasiRequest):
    try:
        G = parse_edge_list(request.edge_list)
        return quasirandom_report(G, delta=request.delta, ks=request.ks, trials=request.trials, seed=request.seed)
    except FasLabError as e:
        raise _http_error(e)

