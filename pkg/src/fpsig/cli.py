"""Command-line front end.

Subcommands: solve, verify, compare, oracle, simulate, sweep. Scenario files
in, schema-tagged JSON (or CSV for sweeps) out; optional matplotlib figures
are rendered next to the delimited output on the report paths (compare,
sweep).

Exit codes: 0 success / obedient, 1 verification failure, 2 usage or config
error, 3 internal solver failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fixed_price as fp
from . import obedience as ob
from . import oracle as orc
from .fixed_price import EX_INTERIM, EX_POST, FixedPrice
from .scenario import (
    SCHEMA,
    Scenario,
    ScenarioError,
    load_mechanism,
    load_scenario,
    write_json,
)
from .signaling import (
    SchemeError,
    SignalingMechanism,
    revenue_sig,
    scheme_exinterim_multi,
    scheme_exinterim_single,
    scheme_expost_multi_restricted,
    solve_expost_single,
)
from .simulate import DECIDE, FOLLOW, run_trials

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_INTERNAL = 3

SPACE_FIXED = "fixed"
SPACE_SIGNALING = "signaling"

MODE_AUTO = "auto"
MODE_PER_BUYER = "per-buyer"
MODE_AGGREGATE = "aggregate"


def solve_space(scn: Scenario, space: str) -> dict:
    """Optimal mechanism for the scenario in the requested design space.

    Returns a dict with the mechanism object under "mechanism_obj" plus the
    JSON-ready fields.
    """
    d, profile, rat = scn.distribution, scn.profile, scn.rationality
    if space == SPACE_FIXED:
        sol = fp.optimize_ex_post(profile, d) if rat == EX_POST else fp.optimize_ex_interim(profile, d)
        mech = sol.mechanism()
        return {
            "mechanism_obj": mech,
            "mechanism": mech.to_dict(),
            "price": sol.price,
            "revenue": sol.revenue,
        }

    if rat == EX_POST:
        if scn.n_buyers == 1:
            mech, revenue = solve_expost_single(profile[0], d)
            return {
                "mechanism_obj": mech,
                "mechanism": mech.to_dict(),
                "price": mech.price,
                "revenue": revenue,
            }
        mech, revenue = scheme_expost_multi_restricted(profile, d)
        existence = ob.check_expost_multi(profile, d, mech.price)
        mech_dict = mech.to_dict()
        mech_dict["restricted"] = True
        return {
            "mechanism_obj": mech,
            "mechanism": mech_dict,
            "price": mech.price,
            "revenue": revenue,
            "no_obedient_mechanism": existence.verdict == ob.NO_OBEDIENT_MECHANISM,
            "restricted": True,
            "existence_note": existence.note,
            "witness": list(existence.witness) if existence.witness else None,
        }

    if scn.n_buyers == 1:
        mech = scheme_exinterim_single(profile[0], d)
    else:
        mech = scheme_exinterim_multi(profile, d)
    mech_dict = mech.to_dict()
    if scn.n_buyers > 1:
        # the argmax construction is obedient in the summed sense only
        mech_dict["obedience_mode"] = "aggregate"
    return {
        "mechanism_obj": mech,
        "mechanism": mech_dict,
        "price": mech.price,
        "revenue": revenue_sig(mech, d),
    }


def cmd_solve(args) -> int:
    scn = load_scenario(args.scenario)
    result = solve_space(scn, args.space)
    result.pop("mechanism_obj")
    payload = {
        "schema": SCHEMA,
        "command": "solve",
        "space": args.space,
        "rationality": scn.rationality,
        "n_buyers": scn.n_buyers,
        **result,
    }
    sys.stdout.write(write_json(payload, args.out))
    return EXIT_OK


def _verify_report(scn: Scenario, mech, mech_data: dict, mode: str):
    d, profile, rat = scn.distribution, scn.profile, scn.rationality
    if isinstance(mech, FixedPrice):
        raise ScenarioError("obedience verification applies to signaling mechanisms")
    if mech.scheme.n_buyers != scn.n_buyers:
        raise ScenarioError(
            f"mechanism is for {mech.scheme.n_buyers} buyers, scenario has {scn.n_buyers}"
        )
    if rat == EX_POST:
        if scn.n_buyers == 1:
            return ob.check_expost_single(mech, profile[0], d)
        if mech_data.get("restricted"):
            return ob.check_expost_multi_restricted(mech, profile, d)
        return ob.check_expost_multi(profile, d, mech.price, scheme=mech.scheme)
    if scn.n_buyers == 1:
        return ob.check_exinterim_single(mech, profile[0], d)
    if mode == MODE_AUTO:
        mode = MODE_AGGREGATE if mech_data.get("obedience_mode") == "aggregate" else MODE_PER_BUYER
    return ob.check_exinterim_multi(mech, profile, d, aggregate=(mode == MODE_AGGREGATE))


def cmd_verify(args) -> int:
    scn = load_scenario(args.scenario)
    mech, mech_data = load_mechanism(args.mechanism)
    report = _verify_report(scn, mech, mech_data, args.obedience_mode)
    payload = {
        "schema": SCHEMA,
        "command": "verify",
        "rationality": scn.rationality,
        "price": getattr(mech, "price", None),
        **report.to_dict(),
    }
    sys.stdout.write(write_json(payload, args.out))
    return EXIT_OK if report.verdict == ob.OBEDIENT else EXIT_VERIFY_FAILED


def _oracle_for(scn: Scenario, grid_m: int, price_steps: int):
    """Rationality-matched oracle result for compare/oracle commands."""
    d, profile = scn.distribution, scn.profile
    hi = max(v(d.q2) for v in profile)
    if scn.rationality == EX_INTERIM:
        prices = orc.candidate_prices(profile, d, grid_m, price_steps)
        res = orc.oracle_exinterim(profile, d, grid_m, price_grid=prices)
    else:
        res = orc.oracle_expost_restricted(
            profile, d, price_grid=np.linspace(0.0, hi, price_steps), m=grid_m
        )
    return res


def cmd_compare(args) -> int:
    scn = load_scenario(args.scenario)
    grid_m = int(scn.overrides.get("grid_m", args.grid_m))
    price_steps = int(scn.overrides.get("price_steps", args.price_steps))

    fixed = solve_space(scn, SPACE_FIXED)
    sig = solve_space(scn, SPACE_SIGNALING)
    oracle_res = _oracle_for(scn, grid_m, price_steps)

    result = {
        "schema": SCHEMA,
        "command": "compare",
        "rationality": scn.rationality,
        "n_buyers": scn.n_buyers,
        "fixed": {"price": fixed["price"], "revenue": fixed["revenue"]},
        "signaling": {
            "price": sig["price"],
            "revenue": sig["revenue"],
            "no_obedient_mechanism": sig.get("no_obedient_mechanism", False),
            "restricted": sig.get("restricted", False),
        },
        "oracle": {
            "price": oracle_res.price,
            "objective": oracle_res.objective,
            "status": oracle_res.status,
            "grid_m": grid_m,
            "price_candidates": len(oracle_res.evaluations),
        },
        "delta_signaling_minus_fixed": sig["revenue"] - fixed["revenue"],
    }

    # dominance direction by market structure: one buyer -> the spaces tie;
    # several ex-interim buyers -> signaling weakly wins; several ex-post
    # buyers -> the restricted scheme cannot beat the fixed price
    if scn.n_buyers == 1:
        result["dominance"] = "equal"
        result["dominance_ok"] = abs(sig["revenue"] - fixed["revenue"]) <= 1e-6
    elif scn.rationality == EX_INTERIM:
        result["dominance"] = "signaling_at_least_fixed"
        result["dominance_ok"] = sig["revenue"] >= fixed["revenue"] - 1e-9
    else:
        result["dominance"] = "fixed_at_least_restricted_signaling"
        result["dominance_ok"] = fixed["revenue"] >= sig["revenue"] - 1e-9
        probe = orc.oracle_expost_full_infeasible(
            scn.profile, scn.distribution, grid_m, fixed["price"]
        )
        result["full_signaling_probe"] = {
            "price": fixed["price"],
            "status": probe.status,
            "certificate": probe.certificate,
        }

    if args.plot:
        from .plotting import plot_compare

        plot_compare(result, args.plot)
        result["figure"] = args.plot
    sys.stdout.write(write_json(result, args.out))
    return EXIT_OK


def cmd_oracle(args) -> int:
    scn = load_scenario(args.scenario)
    grid_m = int(scn.overrides.get("grid_m", args.grid_m))
    price_steps = int(scn.overrides.get("price_steps", args.price_steps))
    payload = {
        "schema": SCHEMA,
        "command": "oracle",
        "rationality": scn.rationality,
        "grid_m": grid_m,
    }
    if args.probe_price is not None:
        if scn.n_buyers < 2:
            raise ScenarioError("--probe-price needs a multi-buyer scenario")
        res = orc.oracle_expost_full_infeasible(
            scn.profile, scn.distribution, grid_m, args.probe_price
        )
        payload.update(
            {
                "price": args.probe_price,
                "objective": None if res.status != orc.STATUS_OPTIMAL else res.objective,
                "status": res.status,
                "certificate": res.certificate,
            }
        )
    else:
        res = _oracle_for(scn, grid_m, price_steps)
        payload.update(
            {"price": res.price, "objective": res.objective, "status": res.status}
        )
    sys.stdout.write(write_json(payload, args.out))
    return EXIT_OK


def cmd_simulate(args) -> int:
    scn = load_scenario(args.scenario)
    if args.mechanism:
        mech, _ = load_mechanism(args.mechanism)
    else:
        mech = solve_space(scn, args.space)["mechanism_obj"]
    seed = int(scn.overrides.get("seed", args.seed))
    trials = int(scn.overrides.get("trials", args.trials))
    out = run_trials(
        scn.distribution,
        scn.profile,
        mech,
        scn.rationality,
        trials=trials,
        seed=seed,
        behavior=args.behavior,
        shards=args.shards,
        record=bool(args.trace),
    )
    estimate, outcomes = out if args.trace else (out, None)
    if args.trace:
        _write_trace(args.trace, outcomes, scn.n_buyers)
    payload = {
        "schema": SCHEMA,
        "command": "simulate",
        "rationality": scn.rationality,
        "behavior": args.behavior,
        "price": mech.price,
        "estimate": estimate.to_dict(),
    }
    sys.stdout.write(write_json(payload, args.out))
    return EXIT_OK


def _write_trace(path: str, outcomes, n_buyers: int) -> None:
    with open(path, "w") as fh:
        bit_cols = ",".join(f"bit_{i + 1}" for i in range(n_buyers))
        fh.write(f"trial,quality,{bit_cols},willing,winner,revenue\n")
        for t, o in enumerate(outcomes):
            bits = o.bits if o.bits else (0,) * n_buyers
            fh.write(
                "{},{:.12g},{},{},{},{:.12g}\n".format(
                    t,
                    o.quality,
                    ",".join(str(b) for b in bits),
                    "|".join(str(w) for w in o.willing),
                    o.winner if o.winner is not None else "",
                    o.revenue,
                )
            )


def cmd_sweep(args) -> int:
    scn = load_scenario(args.scenario)
    lo, hi = args.price_range
    if not hi > lo:
        raise ScenarioError(f"empty price range [{lo}, {hi}]")
    if args.steps < 2:
        raise ScenarioError("sweep needs at least 2 steps")
    d, profile = scn.distribution, scn.profile
    p0 = max(profile.expected_valuations(d))
    rows = []
    for p in np.linspace(lo, hi, args.steps):
        p = float(p)
        rows.append(
            {
                "price": p,
                "rev_fixed_expost": fp.revenue_ex_post(profile, d, p),
                "rev_fixed_exinterim_indicator": p if p <= p0 + 1e-12 else 0.0,
                "rev_sig_restricted": (1.0 - d.cdf(profile.min_inverse(p))) * p,
            }
        )
    header = "price,rev_fixed_expost,rev_fixed_exinterim_indicator,rev_sig_restricted"
    lines = [header] + [
        "{:.12g},{:.12g},{:.12g},{:.12g}".format(
            r["price"],
            r["rev_fixed_expost"],
            r["rev_fixed_exinterim_indicator"],
            r["rev_sig_restricted"],
        )
        for r in rows
    ]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    if args.plot:
        from .plotting import plot_sweep

        plot_sweep(rows, args.plot)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpsig",
        description="Fixed-price mechanisms with and without quality signaling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--out", help="write the report to this path (also printed)")

    p_solve = sub.add_parser("solve", help="optimal mechanism for a design space")
    add_common(p_solve)
    p_solve.add_argument("--space", choices=[SPACE_FIXED, SPACE_SIGNALING], default=SPACE_FIXED)
    p_solve.set_defaults(handler=cmd_solve)

    p_verify = sub.add_parser("verify", help="check a mechanism's obedience constraints")
    add_common(p_verify)
    p_verify.add_argument("--mechanism", required=True, help="mechanism JSON file")
    p_verify.add_argument(
        "--obedience-mode",
        choices=[MODE_AUTO, MODE_PER_BUYER, MODE_AGGREGATE],
        default=MODE_AUTO,
        help="verdict basis for multi-buyer ex-interim checks",
    )
    p_verify.set_defaults(handler=cmd_verify)

    p_compare = sub.add_parser("compare", help="fixed vs signaling revenue, with oracle")
    add_common(p_compare)
    p_compare.add_argument("--grid-m", type=int, default=201, help="oracle quality grid size")
    p_compare.add_argument("--price-steps", type=int, default=41, help="oracle price candidates")
    p_compare.add_argument("--plot", help="render a revenue bar chart to this file")
    p_compare.set_defaults(handler=cmd_compare)

    p_oracle = sub.add_parser("oracle", help="brute-force LP oracle")
    add_common(p_oracle)
    p_oracle.add_argument("--grid-m", type=int, default=201)
    p_oracle.add_argument("--price-steps", type=int, default=101)
    p_oracle.add_argument(
        "--probe-price",
        type=float,
        help="run the full ex-post obedience feasibility probe at this price",
    )
    p_oracle.set_defaults(handler=cmd_oracle)

    p_sim = sub.add_parser("simulate", help="Monte-Carlo revenue estimate")
    add_common(p_sim)
    p_sim.add_argument("--mechanism", help="mechanism JSON file (defaults to solving --space)")
    p_sim.add_argument("--space", choices=[SPACE_FIXED, SPACE_SIGNALING], default=SPACE_FIXED)
    p_sim.add_argument("--trials", type=int, default=10000)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--shards", type=int, default=1)
    p_sim.add_argument("--behavior", choices=[DECIDE, FOLLOW], default=DECIDE)
    p_sim.add_argument("--trace", help="write per-trial outcomes to this CSV")
    p_sim.set_defaults(handler=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="revenue curves over a price range (CSV)")
    add_common(p_sweep)
    p_sweep.add_argument("--price-range", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    p_sweep.add_argument("--steps", type=int, default=101)
    p_sweep.add_argument("--plot", help="render the revenue curves to this file")
    p_sweep.set_defaults(handler=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ScenarioError, SchemeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
