"""Progressive-threshold contagion over the household network.

Adoption is irreversible: each step, a non-adopter first passes a Bernoulli
gate with its policy-dependent node probability, then adopts if its utility
u = w1*benefit + w2*county_rate + w3*neighbor_rate strictly exceeds its
barrier threshold.  Updates are synchronous; county and neighbor rates come
from the state at the start of the step, and every node draws from a
per-step vector of uniforms indexed by node id, so results are independent
of evaluation order.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .records import Graph, HouseholdTable
from .seeds import rng_for

CASES = ("1a", "1b", "2a", "2b", "3", "4", "5")
BASE_PROB = 0.1
CASE3_LMI_SEQUENCE = (0.30, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50)
THRESHOLD_MIN = 0.10
THRESHOLD_MAX = 0.95
N_BARRIERS = 8
N_REBATE_BINS = 10
HOURS_PER_YEAR = 8760


@dataclass(frozen=True)
class DiffusionConfig:
    case: str = "1a"
    weights: tuple = (0.4, 0.3, 0.3)
    time_steps: int = 10
    iterations: int = 1
    seed: int = 0
    cost_per_watt: float = 3.04
    credit_rate: float = 0.30
    lmi_extra_credit: float = 0.20
    capacity_factor: float = 0.15

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"unknown case {self.case!r}; expected one of {CASES}")
        if len(self.weights) != 3 or any(not 0 <= w <= 1 for w in self.weights):
            raise ValueError("need three weights in [0, 1]")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        if self.time_steps < 0:
            raise ValueError("time_steps must be >= 0")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.cost_per_watt <= 0 or self.capacity_factor <= 0:
            raise ValueError("cost_per_watt and capacity_factor must be > 0")
        if self.credit_rate < 0 or self.lmi_extra_credit < 0:
            raise ValueError("credit rates must be >= 0")


def threshold_from_barriers(barriers) -> float:
    """Linear step function: 0.1 with no barriers up to 0.95 with all 8."""
    flags = [bool(b) for b in barriers]
    if len(flags) != N_BARRIERS:
        raise ValueError(f"need exactly {N_BARRIERS} barrier flags, got {len(flags)}")
    return THRESHOLD_MIN + (THRESHOLD_MAX - THRESHOLD_MIN) * sum(flags) / N_BARRIERS


def barriers_from_record(rec) -> tuple:
    """Toy mapping of the eight adoption barriers onto household fields.

    In order: internet access, language, race/socioeconomic, rental,
    education, income, house age, member age.
    """
    f = rec.features
    return (
        f["BA_climate"] in (7, 8),
        f["NHSLDMEM"] >= 6,
        f["MONEYPY"] <= 2,
        f["KOWNRENT"] == 2,
        f["TYPEHUQ"] in (4, 5),
        bool(rec.lmi),
        f["YEARMADERANGE"] <= 2,
        f["FUELHEAT"] in (5, 7),
    )


def utility(p: float, c: float, n: float, w) -> float:
    """u = w1*p + w2*c + w3*n, a convex combination inside [0, 1]."""
    for name, value in (("p", p), ("c", c), ("n", n)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {value}")
    if len(w) != 3 or abs(sum(w) - 1.0) > 1e-9:
        raise ValueError("weights must be three values summing to 1")
    return w[0] * p + w[1] * c + w[2] * n


def node_probability(case: str, lmi: bool, step: int, rebate_bin: int | None = None) -> float:
    """Per-step Bernoulli gate for one node under a policy case.

    Cases 4 and 5 need the node's rebate bin (1..10, highest rebate = 10);
    case 3's LMI sequence is indexed by step (1-based) and clamps to its
    last value beyond step 10.
    """
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}")
    if case == "1a":
        return BASE_PROB
    if case == "1b":
        return 0.2
    if case == "2a":
        return 0.2 if lmi else BASE_PROB
    if case == "2b":
        return 0.5 if lmi else BASE_PROB
    if case == "3":
        if not lmi:
            return BASE_PROB
        if step < 1:
            raise ValueError(f"step must be >= 1, got {step}")
        return CASE3_LMI_SEQUENCE[min(step, len(CASE3_LMI_SEQUENCE)) - 1]
    if rebate_bin is None:
        raise ValueError(f"case {case} needs a rebate bin")
    if not 1 <= rebate_bin <= N_REBATE_BINS:
        raise ValueError(f"rebate bin must be in [1, {N_REBATE_BINS}]")
    return rebate_bin / N_REBATE_BINS * BASE_PROB


def rebate_value(
    annual_kwh: float,
    cost_per_watt: float,
    credit_rate: float,
    capacity_factor: float = 0.15,
) -> float:
    """Dollar rebate: credit on the install cost of a system sized to the
    household's annual generation at the given capacity factor."""
    if annual_kwh <= 0 or cost_per_watt <= 0 or capacity_factor <= 0:
        raise ValueError("annual_kwh, cost_per_watt, capacity_factor must be > 0")
    if credit_rate < 0:
        raise ValueError("credit_rate must be >= 0")
    watts = annual_kwh * 1000.0 / (capacity_factor * HOURS_PER_YEAR)
    return credit_rate * cost_per_watt * watts


def rebate_bins(rebates) -> np.ndarray:
    """Equal-population bins 1..10 by ascending rebate (ties by index)."""
    values = np.asarray(rebates, dtype=float)
    n = values.size
    if n == 0:
        raise ValueError("no rebates to bin")
    order = np.argsort(values, kind="stable")
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(n)
    return (ranks * N_REBATE_BINS) // n + 1


@dataclass
class NodeData:
    """Static per-node inputs shared by every state of one simulation."""

    thresholds: np.ndarray
    benefit: np.ndarray
    county_index: np.ndarray
    county_size: np.ndarray
    lmi: np.ndarray
    rural: np.ndarray
    edge_u: np.ndarray
    edge_v: np.ndarray
    degree: np.ndarray
    rebate_bin: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.thresholds.size


@dataclass
class DiffusionState:
    """Adopter set after `step` synchronous updates."""

    step: int
    adopted: np.ndarray
    nodes: NodeData = field(repr=False)

    @property
    def total(self) -> int:
        return int(np.count_nonzero(self.adopted))

    def county_rates(self) -> np.ndarray:
        per_county = np.bincount(
            self.nodes.county_index,
            weights=self.adopted.astype(float),
            minlength=self.nodes.county_size.size,
        )
        return per_county / self.nodes.county_size


def normalize_benefit(values) -> np.ndarray:
    """Min-max normalize raw generation values into [0, 1]."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("no benefit values")
    lo = float(arr.min())
    hi = float(arr.max())
    if hi == lo:
        return np.zeros(arr.size)
    return (arr - lo) / (hi - lo)


def build_nodes(
    pop: HouseholdTable,
    graph: Graph,
    config: DiffusionConfig,
    benefit_values,
    annual_kwh=None,
) -> NodeData:
    """Assemble static node arrays; node i is row i of the table.

    benefit_values are raw per-household daily generation figures,
    normalized here.  Cases 4 and 5 additionally need annual_kwh per
    household to rank rebates; case 5 uprates the credit rate for LMI
    households by the extra credit before ranking.
    """
    n = len(pop)
    if graph.node_count != n:
        raise ValueError(
            f"graph has {graph.node_count} nodes but population has {n}"
        )
    thresholds = np.array(
        [threshold_from_barriers(barriers_from_record(rec)) for rec in pop]
    )
    benefit = normalize_benefit(benefit_values)
    if benefit.size != n:
        raise ValueError("need one benefit value per household")
    counties = sorted({rec.county for rec in pop})
    county_lookup = {c: i for i, c in enumerate(counties)}
    county_index = np.array([county_lookup[rec.county] for rec in pop], dtype=np.int64)
    county_size = np.bincount(county_index, minlength=len(counties)).astype(float)
    lmi = np.array([bool(rec.lmi) for rec in pop])
    rural = np.array([bool(rec.rural) for rec in pop])
    if graph.edges:
        edge_u = np.array([u for u, _ in graph.edges], dtype=np.int64)
        edge_v = np.array([v for _, v in graph.edges], dtype=np.int64)
    else:
        edge_u = np.zeros(0, dtype=np.int64)
        edge_v = np.zeros(0, dtype=np.int64)
    degree = (
        np.bincount(edge_u, minlength=n) + np.bincount(edge_v, minlength=n)
    ).astype(float)
    bins = None
    if config.case in ("4", "5"):
        if annual_kwh is None:
            raise ValueError(f"case {config.case} needs annual_kwh per household")
        kwh = np.asarray(annual_kwh, dtype=float)
        if kwh.size != n:
            raise ValueError("need one annual_kwh value per household")
        rates = np.full(n, config.credit_rate)
        if config.case == "5":
            rates[lmi] = config.credit_rate + config.lmi_extra_credit
        rebates = np.array(
            [
                rebate_value(
                    float(kwh[i]),
                    config.cost_per_watt,
                    float(rates[i]),
                    config.capacity_factor,
                )
                for i in range(n)
            ]
        )
        bins = rebate_bins(rebates)
    return NodeData(
        thresholds=thresholds,
        benefit=benefit,
        county_index=county_index,
        county_size=county_size,
        lmi=lmi,
        rural=rural,
        edge_u=edge_u,
        edge_v=edge_v,
        degree=degree,
        rebate_bin=bins,
    )


def _prob_vector(config: DiffusionConfig, nodes: NodeData, step_number: int) -> np.ndarray:
    case = config.case
    if case == "1a":
        return np.full(nodes.n, BASE_PROB)
    if case == "1b":
        return np.full(nodes.n, 0.2)
    if case == "2a":
        return np.where(nodes.lmi, 0.2, BASE_PROB)
    if case == "2b":
        return np.where(nodes.lmi, 0.5, BASE_PROB)
    if case == "3":
        lmi_prob = CASE3_LMI_SEQUENCE[min(step_number, len(CASE3_LMI_SEQUENCE)) - 1]
        return np.where(nodes.lmi, lmi_prob, BASE_PROB)
    return nodes.rebate_bin / N_REBATE_BINS * BASE_PROB


def step(state: DiffusionState, graph: Graph, config: DiffusionConfig, rng) -> DiffusionState:
    """One synchronous update; returns the successor state.

    rng supplies one uniform per node (a single vectorized draw), so the
    outcome does not depend on node evaluation order.
    """
    nodes = state.nodes
    if graph.node_count != nodes.n:
        raise ValueError("graph does not match the simulation's node data")
    adopted = state.adopted
    county_rate = state.county_rates()[nodes.county_index]
    if nodes.edge_u.size:
        adopted_f = adopted.astype(float)
        neighbor_adopters = np.bincount(
            nodes.edge_u, weights=adopted_f[nodes.edge_v], minlength=nodes.n
        ) + np.bincount(
            nodes.edge_v, weights=adopted_f[nodes.edge_u], minlength=nodes.n
        )
    else:
        neighbor_adopters = np.zeros(nodes.n)
    neighbor_rate = neighbor_adopters / np.maximum(nodes.degree, 1.0)
    step_number = state.step + 1
    probs = _prob_vector(config, nodes, step_number)
    draws = rng.random(nodes.n)
    w1, w2, w3 = config.weights
    u = w1 * nodes.benefit + w2 * county_rate + w3 * neighbor_rate
    newly = (~adopted) & (draws < probs) & (u > nodes.thresholds)
    return DiffusionState(step=step_number, adopted=adopted | newly, nodes=nodes)


@dataclass
class SimulationResult:
    config: DiffusionConfig
    timelines: list
    rows: list

    def final_totals(self) -> list:
        return [timeline[-1].total for timeline in self.timelines]


def simulate(
    pop: HouseholdTable,
    graph: Graph,
    config: DiffusionConfig,
    initial_adopters,
    benefit_values,
    annual_kwh=None,
) -> SimulationResult:
    """Run config.iterations contagion runs of config.time_steps steps each.

    initial_adopters holds node indices (row positions) adopted at step 0.
    rows holds the plot-ready timeline averaged over iterations: one row per
    step with totals split by (lmi, rural).
    """
    nodes = build_nodes(pop, graph, config, benefit_values, annual_kwh)
    initial = np.zeros(nodes.n, dtype=bool)
    for idx in initial_adopters:
        if not 0 <= int(idx) < nodes.n:
            raise ValueError(f"initial adopter index {idx} out of range")
        initial[int(idx)] = True
    timelines = []
    for iteration in range(config.iterations):
        rng = rng_for(config.seed, "diffusion", config.case, iteration)
        states = [DiffusionState(step=0, adopted=initial.copy(), nodes=nodes)]
        for _ in range(config.time_steps):
            states.append(step(states[-1], graph, config, rng))
        timelines.append(states)
    rows = []
    quadrants = (
        ("lmi_rural", nodes.lmi & nodes.rural),
        ("lmi_urban", nodes.lmi & ~nodes.rural),
        ("nonlmi_rural", ~nodes.lmi & nodes.rural),
        ("nonlmi_urban", ~nodes.lmi & ~nodes.rural),
    )
    for t in range(config.time_steps + 1):
        row = {"case": config.case, "step": t}
        adopted_stack = [timeline[t].adopted for timeline in timelines]
        row["total_adopters"] = float(
            np.mean([np.count_nonzero(a) for a in adopted_stack])
        )
        for name, mask in quadrants:
            row[name] = float(
                np.mean([np.count_nonzero(a & mask) for a in adopted_stack])
            )
        rows.append(row)
    return SimulationResult(config=config, timelines=timelines, rows=rows)


def _format_count(value: float) -> str:
    return str(int(value)) if value == int(value) else repr(value)


def save_timeline(results, path):
    """Write adoption_timeline.csv for one or more simulation results."""
    if isinstance(results, SimulationResult):
        results = [results]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["case", "step", "total_adopters", "lmi_rural", "lmi_urban",
             "nonlmi_rural", "nonlmi_urban"]
        )
        for result in results:
            for row in result.rows:
                writer.writerow(
                    [
                        row["case"],
                        row["step"],
                        _format_count(row["total_adopters"]),
                        _format_count(row["lmi_rural"]),
                        _format_count(row["lmi_urban"]),
                        _format_count(row["nonlmi_rural"]),
                        _format_count(row["nonlmi_urban"]),
                    ]
                )
