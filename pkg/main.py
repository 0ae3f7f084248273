import math
import sys
import time
import logging
import argparse
from dataclasses import replace

from vha_toolbox import seconds_to_humantime

from cli_io import DEFAULT_SCENARIO_PATH, Table, emit_csv, load_scenario_file, rows_table
from experiments import (COMPARISON_HEADER, FIGURE5_MAX_ST, FIGURE5_METADATA_HEADER, TAU_SWEEP_HEADER, run_figure4a,
                         run_figure4b, run_figure5, run_tau_sweep)
from model_core import ChannelGains, build_schedule, evaluate, watts_to_dbm
from optimizer import brute_force, solve
from phy_backscatter import ber_curve
from scenario_error import InfeasibleScenarioError, ScenarioError
from services import *

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s',
    handlers=[
        logging.StreamHandler()
    ],
)

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_VALIDATION = 3
EXIT_IO = 4

ALLOCATION_HEADER = ("st", "alpha", "beta", "backscatter", "active", "total", "harvested_energy", "tx_power", "mode")
SCHEDULE_HEADER = ("phase", "st", "start", "end")
TRACE_HEADER = ("rho", "value")
BER_HEADER = ("snr_db", "ber", "errors", "n_bits")
ORACLE_HEADER = ("method", "value", "rho", "status", "iterations")


def parse_arguments(argv=None):
    """Parses command-line arguments."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--scenario', type=str, default=DEFAULT_SCENARIO_PATH, help="Path to a scenario JSON file.")
    common.add_argument('--out', type=str, default=".", help="Directory receiving the CSV results.")
    common.add_argument('--grid', type=int, help="Grid resolution: surface size for figure4a/4b, "
                                                 "oracle grid for oracle, rho grid otherwise.")
    common.add_argument('--seed', type=int, default=0, help="Random seed for the BER simulation.")
    common.add_argument('--tau', type=float, help="Override the busy fraction of the period.")
    common.add_argument('--no-bt-qos', action='store_true', help="Drop the per-ST QoS floor from the BT baseline.")
    common.add_argument('--verbose', action='store_true', help="Log at DEBUG level.")
    common.add_argument('--webhook', type=str, help="Discord webhook URL for run notifications.")
    common.add_argument('--mention-users', type=str, help="Comma-separated list of Discord user IDs to ping.")

    parser = argparse.ArgumentParser(description="Ambient backscatter assisted wireless powered multiple access")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser('solve', parents=[common], help="Optimal time allocation of one scenario.")
    commands.add_parser('figure4a', parents=[common], help="Sum throughput over (rho, beta1) at alpha1 = 0.5.")
    commands.add_parser('figure4b', parents=[common], help="Sum throughput over (alpha1, beta1) at rho = 0.5.")
    commands.add_parser('figure5', parents=[common], help="HT / WPT / BT comparison for 1..8 STs.")
    commands.add_parser('tau-sweep', parents=[common], help="HT / WPT / BT against the busy fraction.")
    commands.add_parser('ber', parents=[common], help="Monte-Carlo BER of the envelope detector.")
    commands.add_parser('oracle', parents=[common], help="Cross-check the solver against brute force.")
    return parser.parse_args(argv)


def create_notification_service(webhook_url, mention_users):
    if not webhook_url:
        return None
    return NotificationService(webhook_url, mention_users, footer="Backscatter MAC solver")


def load_inputs():
    """Scenario file with the command-line overrides applied."""
    scenario = load_scenario_file(config_service.get_config("scenario_path"))
    tau = config_service.get_config("tau")
    if tau is not None:
        scenario = replace(scenario, config=replace(scenario.config, tau=tau))
    return scenario


def command_solve(scenario, out):
    cfg = scenario.config
    opts = scenario.solver
    if config_service.get_config("grid"):
        opts = replace(opts, rho_grid=config_service.get_config("grid"))
    gains = ChannelGains.from_config(cfg)
    result = solve(cfg, gains, opts)
    emit_csv(Table(TRACE_HEADER, result.outer_trace), f"{out}/outer_trace.csv")
    if not result.feasible:
        raise InfeasibleScenarioError(f"'{config_service.get_config('scenario_path')}'", result.min_qos_slack)

    alloc = result.allocation
    report = evaluate(cfg, gains, alloc)
    peak = max((p for p in report.tx_power if 0.0 < p < math.inf), default=None)
    rows = [(n, alloc.alpha[n], alloc.beta[n], report.per_st_backscatter[n], report.per_st_active[n],
             report.per_st_total[n], report.harvested_energy[n], report.tx_power[n], report.modes[n])
            for n in range(cfg.n_st)]
    emit_csv(Table(ALLOCATION_HEADER, rows), f"{out}/allocation.csv")
    slots = [(s.phase, "" if s.st is None else s.st, s.start, s.end) for s in build_schedule(cfg, alloc)]
    emit_csv(Table(SCHEDULE_HEADER, slots), f"{out}/schedule.csv")
    FileService(out).save_json("solve_summary.json", {
        "sum_throughput": result.value,
        "status": result.status.value,
        "rho": alloc.rho,
        "alpha": list(alloc.alpha),
        "beta": list(alloc.beta),
        "iterations": result.iterations,
        "rho_refined": result.rho_refined,
        "peak_tx_power_dbm": None if peak is None else watts_to_dbm(peak),
    })
    logging.info(f"Sum throughput {result.value:.6f} bits per period ({result.status.value})")
    return {"Sum throughput": f"{result.value:.6f} bits", "rho": f"{alloc.rho:.6g}"}


def command_figure4(scenario, out, which):
    grid = config_service.get_config("grid") or scenario.experiments.surface_grid
    if which == "figure4a":
        rows = run_figure4a(scenario.config, grid)
        header = ("rho", "beta1", "sum_throughput", "feasible")
    else:
        rows = run_figure4b(scenario.config, grid)
        header = ("alpha1", "beta1", "sum_throughput", "feasible")
    emit_csv(rows_table(header, rows), f"{out}/{which}.csv")
    return {"Cells": str(len(rows))}


def _experiment_options(scenario):
    opts = scenario.solver
    if config_service.get_config("grid"):
        opts = replace(opts, rho_grid=config_service.get_config("grid"))
    return opts, config_service.get_config("bt_qos") and scenario.experiments.bt_qos


def command_figure5(scenario, out):
    opts, bt_qos = _experiment_options(scenario)
    rows = run_figure5(scenario.config, range(1, scenario.experiments.figure5_n_max + 1), opts, bt_qos)
    emit_csv(rows_table(COMPARISON_HEADER, rows), f"{out}/figure5.csv")
    emit_csv(Table(FIGURE5_METADATA_HEADER, [row.metadata_row() for row in rows]), f"{out}/figure5_metadata.csv")
    infeasible = [str(row.n_st) for row in rows if row.bt is None]
    return {"BT infeasible for N": ", ".join(infeasible) or "none"}


def command_tau_sweep(scenario, out):
    opts, bt_qos = _experiment_options(scenario)
    n_st = min(scenario.config.n_st, FIGURE5_MAX_ST)
    rows = run_tau_sweep(scenario.config, n_st, scenario.experiments.tau_list, opts, bt_qos)
    emit_csv(rows_table(TAU_SWEEP_HEADER, rows), f"{out}/tau_sweep.csv")
    return {"Points": str(len(rows))}


def command_ber(scenario, out):
    points = ber_curve(scenario.phy.link, scenario.phy.snr_db, scenario.phy.n_bits, config_service.get_config("seed"))
    emit_csv(rows_table(BER_HEADER, points), f"{out}/ber.csv")
    return {"SNR points": str(len(points))}


def command_oracle(scenario, out):
    cfg = scenario.config
    grid = config_service.get_config("grid") or scenario.solver.oracle_grid
    gains = ChannelGains.from_config(cfg)
    exact = brute_force(cfg, gains, grid)
    solved = solve(cfg, gains, scenario.solver)
    rows = [(name, r.value if r.feasible else None, r.allocation.rho if r.feasible else None, r.status.value,
             r.iterations) for name, r in (("solve", solved), ("brute_force", exact))]
    emit_csv(Table(ORACLE_HEADER, rows), f"{out}/oracle.csv")
    if solved.feasible and exact.feasible and solved.value < exact.value * (1.0 - 1e-6):
        logging.warning(f"Solver value {solved.value:.6f} is below the brute-force value {exact.value:.6f}")
    return {"Solver": f"{solved.value:.6f}", "Brute force": f"{exact.value:.6f}"}


COMMANDS = {
    "solve": command_solve,
    "figure4a": lambda scenario, out: command_figure4(scenario, out, "figure4a"),
    "figure4b": lambda scenario, out: command_figure4(scenario, out, "figure4b"),
    "figure5": command_figure5,
    "tau-sweep": command_tau_sweep,
    "ber": command_ber,
    "oracle": command_oracle,
}


def run(args):
    """Runs one subcommand and maps failures to exit codes."""
    start = time.monotonic()
    notif_service = create_notification_service(args.webhook, config_service.get_config("mention_users"))
    notif_manager = NotificationManager(notif_service)
    try:
        scenario = load_inputs()
        notif_manager.send("run_start", args={
            "command": args.command,
            "scenario": config_service.get_config("scenario_path"),
            "n_st": scenario.config.n_st,
        })
        fields = COMMANDS[args.command](scenario, config_service.get_config("out_dir"))
    except InfeasibleScenarioError as e:
        logging.error(e.message)
        notif_manager.send("scenario_infeasible", args={"command": args.command, "detail": e.message})
        return EXIT_INFEASIBLE
    except ScenarioError as e:
        logging.error(str(e))
        return EXIT_VALIDATION
    except OSError as e:
        logging.error(f"I/O error: {e}")
        return EXIT_IO

    elapsed = seconds_to_humantime(max(1, int(round(time.monotonic() - start))))
    logging.info(f"Finished {args.command} in {elapsed}")
    notif_manager.send("run_complete", fields=fields, args={"command": args.command, "elapsed": elapsed})
    return EXIT_OK


def main(argv=None):
    args = parse_arguments(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    logging.info(f"Starting {args.command}")
    try:
        config_service.load_from_parser(args)
    except ScenarioError as e:
        logging.error(str(e))
        return EXIT_VALIDATION
    logging.debug(f"[config] Settings: {config_service.get_all_configs()}")
    return run(args)


config_service = ConfigurationService()

if __name__ == "__main__":
    sys.exit(main())
