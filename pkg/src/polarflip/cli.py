"""Command-line front end: ``simulate``, ``pmf`` and ``cost``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from polarflip.construction import nr_code
from polarflip.cost import (
    CostParams,
    lrt_saving,
    memory_estimate,
    restart_saving,
    restoration_cycles,
    sc_restart_saving,
    trial_cost,
)
from polarflip.schedule import build_schedule
from polarflip.sim import SimConfig, emit_report, load_manifest, run_pmf, run_sweep

log = logging.getLogger("polarflip")


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.replace(",", " ").split()]


def read_config(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment, dashes equal underscores."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value
    return values


def _add_code_flags(p: argparse.ArgumentParser):
    p.add_argument("--n", dest="N", type=int, default=1024, help="block length N (power of two)")
    p.add_argument("--k", type=int, default=512, help="information bits, CRC excluded")
    p.add_argument("--crc", type=int, default=11, help="CRC degree (0 disables)")
    p.add_argument("--omega", type=int, default=3, help="max flips per trial")
    p.add_argument("--tmax", dest="t_max", type=int, default=301,
                   help="max trials including the initial one")
    p.add_argument("--pe", dest="P", type=int, default=64, help="processing elements")
    p.add_argument("--config", help="key = value file; explicit flags win")


def _add_sim_flags(p: argparse.ArgumentParser, single_point: bool):
    p.add_argument("--baseline", choices=("sc", "sclrt", "fssc"), default="sc")
    p.add_argument("--mechanism", choices=("none", "lrt", "srm", "grm"), default="grm")
    axis = p.add_mutually_exclusive_group()
    point_help = "channel point in dB" if single_point else "channel points in dB"
    axis.add_argument("--ebn0", type=_float_list, help=f"{point_help} (Eb/N0)")
    axis.add_argument("--snr", type=_float_list, help=f"{point_help} (Es/N0)")
    p.add_argument("--min-frames", type=int, default=20_000)
    p.add_argument("--target-errors", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output directory for CSV and manifest")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polarflip",
                                     description="Polar flip decoding with restart mechanisms.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="FER and average cycle sweep")
    _add_code_flags(sim)
    _add_sim_flags(sim, single_point=False)
    sim.add_argument("--manifest", help="rerun the configuration stored in a manifest")

    pmf = sub.add_parser("pmf", help="distribution of the first flipped bit")
    _add_code_flags(pmf)
    _add_sim_flags(pmf, single_point=True)

    cost = sub.add_parser("cost", help="analytic cycle and memory model")
    _add_code_flags(cost)
    cost.add_argument("--psi", type=_int_list, help="restart indices for the savings table")
    return parser


_CONFIG_TYPES = {"ebn0": _float_list, "snr": _float_list, "psi": _int_list}


def _apply_config(parser: argparse.ArgumentParser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = read_config(known.config)
    renames = {"n": "N", "tmax": "t_max", "pe": "P"}
    defaults = {}
    for key, value in values.items():
        dest = renames.get(key, key)
        convert = _CONFIG_TYPES.get(key)
        if convert is None:
            convert = str if dest in ("baseline", "mechanism", "out") else int
        defaults[dest] = convert(value)
    for action in parser._subparsers._group_actions:
        for sub in action.choices.values():
            sub.set_defaults(**defaults)


def _sim_config(args, single_point: bool) -> SimConfig:
    axis = "snr" if args.snr is not None else "ebn0"
    points = args.snr if args.snr is not None else args.ebn0
    if points is None:
        raise SystemExit("give the channel point(s) with --ebn0 or --snr")
    if single_point and len(points) != 1:
        raise SystemExit("pmf takes exactly one channel point")
    return SimConfig(N=args.N, k=args.k, crc=args.crc, omega=args.omega, t_max=args.t_max,
                     baseline=args.baseline, mechanism=args.mechanism, points=tuple(points),
                     axis=axis, min_frames=args.min_frames, target_errors=args.target_errors,
                     seed=args.seed, workers=args.workers,
                     P=args.P, out=args.out)


def _progress(point_idx, frames, errors):
    log.info("point %d: %d frames, %d errors", point_idx, frames, errors)


def cmd_simulate(args) -> int:
    cfg = load_manifest(args.manifest) if args.manifest else _sim_config(args, False)
    if args.manifest and args.out:
        cfg = SimConfig.from_dict({**cfg.to_dict(), "out": args.out})
    points = run_sweep(cfg, _progress)
    print("ebn0_db,frames,errors,fer,avg_cc,avg_cc_mech,reduction_pct" if cfg.axis == "ebn0"
          else "snr_db,frames,errors,fer,avg_cc,avg_cc_mech,reduction_pct")
    for p in points:
        print(f"{p.ebn0_db:g},{p.frames},{p.errors},{p.fer:.4g},{p.avg_cc:.2f},"
              f"{p.avg_cc_mech:.2f},{p.reduction_pct:.2f}")
    if cfg.out:
        for path in emit_report(cfg, points):
            log.info("wrote %s", path)
    return 0


def cmd_pmf(args) -> int:
    cfg = _sim_config(args, True)
    report = run_pmf(cfg, 0, _progress)
    if not report.sufficient:
        print("no failed initial trials: PMF is empty (insufficient data)")
    else:
        print(f"frames={report.frames} failed={report.failed_frames} j_rhs={report.j_rhs}")
        print(f"P_LHS={report.p_lhs:.4f} P_RHS={report.p_rhs:.4f}")
    if cfg.out:
        for path in emit_report(cfg, report):
            log.info("wrote %s", path)
    return 0


def cmd_cost(args) -> int:
    code = nr_code(args.N, args.k, args.crc or None)
    params = CostParams(P=args.P)
    schedule = build_schedule(code, min(args.omega, 3))
    l_sc = trial_cost("sc", code, params)
    l_lrt = trial_cost("sclrt", code, params)
    l_fssc = trial_cost("fssc", code, params, schedule)
    print(f"code N={code.N} k={code.k} r={code.r} a0={code.a0} j_rhs={code.j_rhs} P={params.P}")
    print(f"L_SC={l_sc} L_SC_LRT={l_lrt} L_FSSC={l_fssc} special_nodes={schedule.q}")
    print(f"LRT saving={lrt_saving(code, params.P)}")

    psis = args.psi
    if psis is None:
        picks = sorted({0, code.j_rhs, code.k_tot // 2, code.k_tot - 1})
        psis = [int(code.info_set[j]) for j in picks if j < code.k_tot]
    print("psi,theta,dL_SC,dL_SC_LRT,dL_FSSC")
    for psi in psis:
        print(f"{psi},{restoration_cycles(psi, code.N, params.P)},"
              f"{sc_restart_saving(psi, code.N, params.P)},"
              f"{restart_saving('sclrt', psi, code, params)},"
              f"{restart_saving('fssc', psi, code, params, schedule)}")

    mem = memory_estimate(args.omega, args.t_max, params, code.N, with_grm=True)
    print("memory_bits: sc,flip,restart,without_grm,with_grm,overhead_pct")
    print(f"{mem.sc_bits},{mem.flip_bits},{mem.restart_bits},{mem.without_restart},"
          f"{mem.total},{mem.overhead_pct:.2f}")
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        handler = {"simulate": cmd_simulate, "pmf": cmd_pmf, "cost": cmd_cost}[args.command]
        return handler(args)
    except ValueError as exc:
        parser.error(str(exc))
    return 2


if __name__ == "__main__":
    sys.exit(main())
