"""Command line front end.

Stages communicate only through files in one output directory, so any
stage can be re-run in isolation and the full pipeline is reproducible
byte-for-byte from (config, seed):

    toygen -> preprocess -> classify-sqft -> estimate-sqft -> calibrate
           -> generate -> validate -> simulate

``solartwin pipeline`` runs them all in order.  Errors print a single
``error: <stage>: <message>`` line on stderr and exit nonzero; set
SOLARTWIN_LOG=info (or debug) for progress on stderr.
"""

import argparse
import calendar
import csv
import logging
import os
import sys
from dataclasses import replace
from datetime import date, timedelta

import numpy as np

from .boosting import (
    GbtParams,
    MajorityBaseline,
    apply_threshold,
    ensemble_vote,
    predict_proba,
    save_model,
    train_ovr,
)
from .calibrate import calibrate, save_trace
from .config import RunConfig, load_config
from .diffusion import DiffusionConfig, save_timeline, simulate
from .metrics import (
    DiscreteDistribution,
    jsd_histogram,
    jsd_kde,
    kld,
    pearson_monthly,
    relative_pct_diff,
)
from .preprocess import (
    LabeledDataset,
    correlation_matrix,
    dataset_from_households,
    smoten_oversample,
)
from .pv import generate_profiles, load_daily, load_profile_rows, save_daily, save_profiles
from .records import (
    FEATURE_DOMAINS,
    FEATURE_NAMES,
    AdopterTarget,
    copy_record,
    load_households,
    load_irradiance,
    load_network,
    load_targets,
    save_households,
    save_irradiance,
    save_network,
    save_targets,
    sqft_class_range,
)
from .seeds import rng_for
from .sqft import estimate_sqft, subclass_weights
from .toygen import ToyConfig, gen_irradiance, gen_network, gen_population, gen_survey, tract_ids

log = logging.getLogger("solartwin")


def parse_period(text: str):
    """Turn ``kind:value`` into (label, [dates]).

    Kinds: ``date:2018-01-03``, ``week:2018-W01`` (ISO week),
    ``month:2018-01``, ``year:2018``.
    """
    kind, _, value = text.partition(":")
    if not value:
        raise ValueError(f"period must look like kind:value, got {text!r}")
    if kind == "date":
        return value, [date.fromisoformat(value)]
    if kind == "week":
        year_s, _, week_s = value.partition("-W")
        if not week_s:
            raise ValueError(f"week periods look like 2018-W01, got {value!r}")
        start = date.fromisocalendar(int(year_s), int(week_s), 1)
        return value, [start + timedelta(days=i) for i in range(7)]
    if kind == "month":
        year_s, _, month_s = value.partition("-")
        if not month_s:
            raise ValueError(f"month periods look like 2018-01, got {value!r}")
        year, month = int(year_s), int(month_s)
        n_days = calendar.monthrange(year, month)[1]
        return value, [date(year, month, d) for d in range(1, n_days + 1)]
    if kind == "year":
        year = int(value)
        start = date(year, 1, 1)
        n_days = (date(year + 1, 1, 1) - start).days
        return value, [start + timedelta(days=i) for i in range(n_days)]
    raise ValueError(f"unknown period kind {kind!r}")


def resolve_period(cfg: RunConfig, args):
    """The --period flag, or the config's start_date/days span."""
    if getattr(args, "period", None):
        return parse_period(args.period)
    label = f"{cfg.start_date.isoformat()}_{cfg.days}d"
    return label, [cfg.start_date + timedelta(days=i) for i in range(cfg.days)]


def _path(cfg: RunConfig, *parts) -> str:
    return os.path.join(cfg.out_dir, *parts)


def _require(path: str, hint: str) -> str:
    if not os.path.exists(path):
        raise ValueError(f"missing {path}; run {hint} first")
    return path


def _save_survey(values, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sqft"])
        for v in values:
            writer.writerow([repr(float(v))])


def _load_survey(path) -> list:
    values = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if "sqft" not in (reader.fieldnames or []):
            raise ValueError(f"{path} is missing the sqft column")
        for row in reader:
            values.append(float(row["sqft"]))
    return values


def _save_dataset(data: LabeledDataset, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(FEATURE_NAMES) + ["label"])
        for row, label in zip(data.X, data.y):
            writer.writerow([int(c) for c in row] + [int(label)])


def _load_dataset(path) -> LabeledDataset:
    X = []
    y = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in list(FEATURE_NAMES) + ["label"]:
            if column not in header:
                raise ValueError(f"{path} is missing column {column}")
        for row in reader:
            X.append([int(row[f]) for f in FEATURE_NAMES])
            y.append(int(row["label"]))
    domains = tuple(tuple(FEATURE_DOMAINS[name]) for name in FEATURE_NAMES)
    return LabeledDataset(np.array(X, dtype=np.int64), np.array(y, dtype=np.int64), domains)


def _save_matrix(matrix: np.ndarray, names, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature"] + list(names))
        for name, row in zip(names, matrix):
            writer.writerow([name] + [repr(float(v)) for v in row])


def _load_irradiance_map(cfg: RunConfig, tracts) -> dict:
    series = {}
    for tract in sorted(set(tracts)):
        path = _require(_path(cfg, f"irradiance_{tract}.csv"), "toygen")
        series[tract] = load_irradiance(path, tract)
    return series


def _gbt_params(cfg: RunConfig) -> GbtParams:
    return GbtParams(
        rounds=cfg.rounds,
        depth=cfg.depth,
        learning_rate=cfg.learning_rate,
        reg_lambda=cfg.reg_lambda,
        min_child_hess=cfg.min_child_hess,
    )


def cmd_toygen(cfg: RunConfig, args):
    toy = ToyConfig(
        n_households=cfg.n_households,
        n_tracts=cfg.n_tracts,
        adopter_fraction=cfg.adopter_fraction,
        lmi_fraction=cfg.lmi_fraction,
        seed=cfg.seed,
        days=cfg.days,
        start_date=cfg.start_date,
        signal_shift=cfg.signal_shift,
    )
    os.makedirs(cfg.out_dir, exist_ok=True)
    pop = gen_population(toy)
    save_households(pop, _path(cfg, "households.csv"))
    for tract in tract_ids(toy):
        save_irradiance(gen_irradiance(toy, tract), _path(cfg, f"irradiance_{tract}.csv"))
    n_adopters = len(pop.adopters())
    save_targets([AdopterTarget(toy.state, n_adopters)], _path(cfg, "targets.csv"))
    save_network(
        gen_network(len(pop), cfg.edge_prob, cfg.network_groups, cfg.seed),
        _path(cfg, "network.edges"),
    )
    _save_survey(gen_survey(toy, cfg.survey_size), _path(cfg, "survey.csv"))
    log.info("toygen: %d households, %d adopters, %d tracts", len(pop), n_adopters, toy.n_tracts)


def cmd_preprocess(cfg: RunConfig, args):
    pop = load_households(_require(_path(cfg, "households.csv"), "toygen"))
    data = dataset_from_households(pop, "solar")
    names = list(FEATURE_NAMES) + ["label"]
    _save_matrix(correlation_matrix(data, include_label=True), names, _path(cfg, "corr_before.csv"))
    balanced = smoten_oversample(data, k=cfg.smoten_k, seed=cfg.seed)
    _save_matrix(correlation_matrix(balanced, include_label=True), names, _path(cfg, "corr_after.csv"))
    _save_dataset(balanced, _path(cfg, "train_solar.csv"))
    log.info(
        "preprocess: %d rows balanced to %d (classes %s)",
        len(data), len(balanced), balanced.class_counts(),
    )


def cmd_classify_sqft(cfg: RunConfig, args):
    pop = load_households(_require(_path(cfg, "households.csv"), "toygen"))
    data = dataset_from_households(pop, "sqft_class")
    ovr = train_ovr(data, _gbt_params(cfg), cfg.seed)
    position = {cls: i for i, cls in enumerate(ovr.classes)}
    majority = MajorityBaseline.fit(
        np.array([position[int(label)] for label in data.y]), len(ovr.classes)
    )
    ovr_probs = ovr.predict_probs(data.X)
    ovr_class = ovr.predict_class(data.X)
    base_probs = majority.predict_probs()
    base_class = majority.predict_class()
    records = []
    agree = 0
    for i, rec in enumerate(pop):
        vote = ensemble_vote(
            [position[int(ovr_class[i])], base_class],
            [ovr_probs[i], base_probs],
        )
        predicted = int(ovr.classes[vote])
        agree += predicted == rec.sqft_class
        records.append(copy_record(rec, sqft_class=predicted))
    save_households(pop.with_records(records), _path(cfg, "households_classified.csv"))
    log.info("classify-sqft: %d/%d match the planted class", agree, len(pop))


def cmd_estimate_sqft(cfg: RunConfig, args):
    pop = load_households(_require(_path(cfg, "households_classified.csv"), "classify-sqft"))
    survey = _load_survey(_require(_path(cfg, "survey.csv"), "toygen"))
    weights = {}
    records = []
    for rec in pop:
        k = rec.sqft_class
        if k not in weights:
            weights[k] = subclass_weights(
                survey, sqft_class_range(k), cfg.sqft_k, uniform_fallback=True
            )
        value = estimate_sqft(
            weights[k], cfg.sqft_m, cfg.sqft_l, rng_for(cfg.seed, "sqft", rec.id)
        )
        records.append(copy_record(rec, sqft_value=value))
    save_households(pop.with_records(records), _path(cfg, "households_sqft.csv"))
    log.info("estimate-sqft: filled sqft_value for %d households", len(records))


def cmd_calibrate(cfg: RunConfig, args):
    train = _load_dataset(_require(_path(cfg, "train_solar.csv"), "preprocess"))
    pop = load_households(_require(_path(cfg, "households_sqft.csv"), "estimate-sqft"))
    targets = load_targets(_require(_path(cfg, "targets.csv"), "toygen"))
    if not targets:
        raise ValueError("targets.csv has no rows")
    total = AdopterTarget("total", sum(t.count for t in targets))
    result = calibrate(
        train, pop, total,
        budget=cfg.budget, init=cfg.init_points, seed=cfg.seed,
        gbt_params=_gbt_params(cfg),
    )
    save_trace(result, _path(cfg, "calibration_trace.csv"))
    save_model(result.model, _path(cfg, "model.txt"))
    probs = predict_proba(result.model, pop.feature_matrix())
    decisions = apply_threshold(probs, result.tau_star)
    records = [copy_record(rec, solar=bool(d)) for rec, d in zip(pop, decisions)]
    save_households(pop.with_records(records), _path(cfg, "households_twin.csv"))
    log.info(
        "calibrate: beta=%.2f tau=%.2f predicted=%d target=%d diff=%d rounds=%d%s",
        result.beta_star, result.tau_star, int(np.count_nonzero(decisions)),
        total.count, result.discrepancy, result.rounds_used,
        "" if result.converged else " (budget exhausted)",
    )


def _generate_variant(cfg: RunConfig, variant: str, label: str, dates):
    source = {
        "real": ("households_sqft.csv", "estimate-sqft"),
        "twin": ("households_twin.csv", "calibrate"),
    }[variant]
    pop = load_households(_require(_path(cfg, source[0]), source[1]))
    irradiance = _load_irradiance_map(cfg, [rec.tract for rec in pop if rec.solar])
    profiles = generate_profiles(
        pop, irradiance, dates,
        workers=cfg.workers, seed=cfg.seed, n_samples=cfg.pv_samples,
    )
    out_dir = _path(cfg, variant)
    os.makedirs(out_dir, exist_ok=True)
    save_profiles(profiles, out_dir)
    save_daily(profiles, os.path.join(out_dir, f"daily_{label}.csv"))
    log.info("generate: %s side has %d household-days", variant, len(profiles))


def cmd_generate(cfg: RunConfig, args):
    label, dates = resolve_period(cfg, args)
    variants = ("real", "twin") if args.variant == "both" else (args.variant,)
    for variant in variants:
        _generate_variant(cfg, variant, label, dates)


def cmd_validate(cfg: RunConfig, args):
    label, dates = resolve_period(cfg, args)
    real_rows = load_daily(_require(_path(cfg, "real", f"daily_{label}.csv"), "generate"))
    twin_rows = load_daily(_require(_path(cfg, "twin", f"daily_{label}.csv"), "generate"))
    if len(real_rows) < 2 or len(twin_rows) < 2:
        raise ValueError("not enough household-days on one side to validate")
    real_daily = np.array([r[2] for r in real_rows])
    twin_daily = np.array([r[2] for r in twin_rows])
    rows = [("jsd_histogram", "daily_kwh", jsd_histogram(real_daily, twin_daily, cfg.hist_bins))]
    real_stds = np.array([r[3] for r in real_rows])
    bandwidth = real_stds if np.all(real_stds > 0) else None
    rows.append(("jsd_kde", "daily_kwh", jsd_kde(real_daily, twin_daily, bandwidth, cfg.kde_grid)))
    lo = min(real_daily.min(), twin_daily.min())
    hi = max(real_daily.max(), twin_daily.max())
    edges = np.linspace(lo, hi, cfg.hist_bins + 1) if hi > lo else np.array([lo, lo + 1.0])
    p = DiscreteDistribution.from_counts(edges, np.histogram(real_daily, edges)[0])
    q = DiscreteDistribution.from_counts(edges, np.histogram(twin_daily, edges)[0])
    rows.append(("kld", "daily_kwh", kld(p, q)))
    real_hourly = []
    twin_hourly = []
    for side, sink in (("real", real_hourly), ("twin", twin_hourly)):
        for d in dates:
            path = _require(_path(cfg, side, f"profiles_{d.isoformat()}.csv"), "generate")
            for hid, day, hour, mean, _ in load_profile_rows(path):
                sink.append((day.isoformat()[:7], hour, mean))
    for month, r in pearson_monthly(real_hourly, twin_hourly).items():
        rows.append(("pearson", month, r))
    n_real = len({r[0] for r in real_rows})
    n_twin = len({r[0] for r in twin_rows})
    rows.append(("adopter_pct_diff", "count", relative_pct_diff(n_real, n_twin)))
    with open(_path(cfg, "metrics_report.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "scope", "value"])
        for metric, scope, value in rows:
            writer.writerow([metric, scope, "" if value is None else repr(float(value))])
    log.info("validate: wrote %d metric rows", len(rows))


def cmd_simulate(cfg: RunConfig, args):
    label, dates = resolve_period(cfg, args)
    pop = load_households(_require(_path(cfg, "households_twin.csv"), "calibrate"))
    graph = load_network(_require(_path(cfg, "network.edges"), "toygen"), len(pop))
    irradiance = _load_irradiance_map(cfg, [rec.tract for rec in pop])
    # personal benefit needs generation for every household, adopter or not
    everyone = pop.with_records([copy_record(rec, solar=True) for rec in pop])
    profiles = generate_profiles(
        everyone, irradiance, dates,
        workers=cfg.workers, seed=cfg.seed, n_samples=cfg.pv_samples,
    )
    daily_by_household = {}
    for prof in profiles:
        daily_by_household.setdefault(prof.household, []).append(prof.daily_mean)
    mean_daily = np.array([float(np.mean(daily_by_household[rec.id])) for rec in pop])
    annual_kwh = mean_daily * 365.0
    initial = [i for i, rec in enumerate(pop) if rec.solar]
    cases = tuple(args.cases.split(",")) if args.cases else cfg.cases
    results = []
    for case in cases:
        dcfg = DiffusionConfig(
            case=case.strip(),
            weights=cfg.diffusion_weights,
            time_steps=cfg.time_steps,
            iterations=cfg.iterations,
            seed=cfg.seed,
            cost_per_watt=cfg.cost_per_watt,
            credit_rate=cfg.credit_rate,
            lmi_extra_credit=cfg.lmi_extra_credit,
            capacity_factor=cfg.capacity_factor,
        )
        result = simulate(pop, graph, dcfg, initial, mean_daily, annual_kwh)
        results.append(result)
        log.info(
            "simulate: case %s ended with %s adopters",
            case, result.rows[-1]["total_adopters"],
        )
    save_timeline(results, _path(cfg, "adoption_timeline.csv"))


def cmd_pipeline(cfg: RunConfig, args):
    cmd_toygen(cfg, args)
    cmd_preprocess(cfg, args)
    cmd_classify_sqft(cfg, args)
    cmd_estimate_sqft(cfg, args)
    cmd_calibrate(cfg, args)
    generate_args = argparse.Namespace(**vars(args))
    generate_args.variant = "both"
    cmd_generate(cfg, generate_args)
    cmd_validate(cfg, args)
    cmd_simulate(cfg, args)


STAGES = {
    "toygen": cmd_toygen,
    "preprocess": cmd_preprocess,
    "classify-sqft": cmd_classify_sqft,
    "estimate-sqft": cmd_estimate_sqft,
    "calibrate": cmd_calibrate,
    "generate": cmd_generate,
    "validate": cmd_validate,
    "simulate": cmd_simulate,
    "pipeline": cmd_pipeline,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file")
    common.add_argument("--seed", type=int, help="override the run seed")
    common.add_argument("--workers", type=int, help="process count for profile generation")
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument(
        "--period",
        help="date:YYYY-MM-DD | week:YYYY-Wnn | month:YYYY-MM | year:YYYY "
        "(default: the config's start_date/days span)",
    )
    parser = argparse.ArgumentParser(
        prog="solartwin",
        description="Rooftop-solar digital twin pipeline on synthetic data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "toygen": "write synthetic households, irradiance, targets, network, survey",
        "preprocess": "balance the adopter training data and report associations",
        "classify-sqft": "predict square-footage classes with the boosted ensemble",
        "estimate-sqft": "turn classes into square footage via survey sub-interval draws",
        "calibrate": "search (beta, tau) until predicted adopters match the target",
        "generate": "sample hourly PV energy profiles for adopters",
        "validate": "compare real and twin generation distributions",
        "simulate": "run policy-case adoption contagion on the network",
        "pipeline": "run every stage in order",
    }
    for name in STAGES:
        p = sub.add_parser(name, parents=[common], help=helps[name])
        if name == "generate":
            p.add_argument("--variant", choices=("real", "twin", "both"), default="both")
        if name in ("simulate", "pipeline"):
            p.add_argument("--cases", help="comma list of policy cases (default: all)")
    return parser


def _setup_logging():
    level_name = os.environ.get("SOLARTWIN_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if level_name not in levels:
        level_name = "error"
    logging.basicConfig(
        stream=sys.stderr, level=levels[level_name], format="%(levelname)s %(message)s"
    )


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    stage = args.command
    try:
        cfg = load_config(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.workers is not None:
            overrides["workers"] = args.workers
        if args.out is not None:
            overrides["out_dir"] = args.out
        if overrides:
            cfg = replace(cfg, **overrides).validate()
        STAGES[stage](cfg, args)
    except Exception as exc:  # single-line error contract
        print(f"error: {stage}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
