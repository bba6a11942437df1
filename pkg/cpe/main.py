"""
``cpe-lab`` subcommands and the mapping from failures to exit codes
"""

# license: Public domain

from __future__ import print_function
from os import path as fp
import csv
import logging
import sys

from .cli import (ArgumentParser, CliConfig, add_subcommand, ensure_dir,
                  load_config, print_summary, read_level_sets,
                  setup_logging)
from .config import galerkin_params, run_params
from .degiorgi import DecayParams, empirical_vanishing_level
from .diagnostics import compute_record, with_mass_residuals, write_csv
from .errors import (ConfigError, CpeError, EXIT_IO, EXIT_NUMERICAL,
                     EXIT_OK, SnapshotError)
from .galerkin import (demo_coefficients, energy_budgets,
                       galerkin_energy_audit, mk_system, run_galerkin)
from .initial import (approximate_initial_data, approximation_functional,
                      approximation_gap, build_initial_data, c0_bound,
                      density_bounds)
from .snapshot import read_series
from .sweep import mk_sweep_plan, report_lines, run_sweep
from .torpor import Torpor
from .trajectory import (DIAGNOSTICS_CSV, diagnostics_params,
                         run_trajectory)

_LOG = logging.getLogger(__name__)

RECOMPUTED_CSV = 'diagnostics-recomputed.csv'
TRACE_CSV = 'trace.csv'
ENERGY_CSV = 'energy.csv'

# ---------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------


def cmd_run(args):
    "single trajectory"
    cfg = load_config(args)
    params = run_params(cfg, args.epsilon)
    with Torpor("run epsilon = {:g}".format(params.init.epsilon)):
        traj = run_trajectory(params, ensure_dir(args.output))
    print_summary([("records", len(traj.records)),
                   ("final t", repr(traj.records[-1].t)),
                   ("C_audit", repr(traj.c_audit)),
                   ("audit violations", len(traj.audit.violations)),
                   ("max excess", repr(traj.audit.max_excess)),
                   ("csv", fp.join(traj.outdir, DIAGNOSTICS_CSV))])
    return EXIT_OK


def cmd_sweep(args):
    "the ε ladder"
    cfg = load_config(args)
    plan = mk_sweep_plan(cfg, ensure_dir(args.output), jobs=args.jobs)
    report = run_sweep(plan)
    for line in report_lines(report):
        print(line)
    return EXIT_NUMERICAL if report.failures else EXIT_OK


def recompute_records(rundir):
    """
    Diagnostics records rebuilt from a run's snapshots
    """
    snaps = read_series(rundir)
    if not snaps:
        raise SnapshotError("no snapshots in {}".format(rundir))
    first = snaps[0]
    dparams = diagnostics_params(first)
    records = [compute_record(s.eta, s.v, s.grid, dparams, s.t)
               for s in snaps]
    return with_mass_residuals(records, first.epsilon)


def cmd_diagnose(args):
    "recompute a run's CSV from its snapshots"
    with Torpor("recomputing diagnostics in {}".format(args.rundir)):
        records = recompute_records(args.rundir)
    out = args.output or fp.join(args.rundir, RECOMPUTED_CSV)
    write_csv(out, records)
    print_summary([("records", len(records)), ("csv", out)])
    return EXIT_OK


def write_trace(path, windows):
    "iteration,residual,ratio,T_n over every window"
    with open(path, 'w') as ofile:
        writer = csv.writer(ofile, lineterminator='\n')
        writer.writerow(['iteration', 'residual', 'ratio', 'T_n'])
        for state in windows:
            for row in state.trace:
                writer.writerow([row[0]] +
                                [repr(float(x)) for x in row[1:]])


def write_energy(path, times, budgets, audit):
    """
    t,kinetic,power,residual with the residual of the step ending at t
    (0 on the first row)
    """
    residuals = [0.0] + [float(r) for r in audit.residuals]
    with open(path, 'w') as ofile:
        writer = csv.writer(ofile, lineterminator='\n')
        writer.writerow(['t', 'kinetic', 'power', 'residual'])
        for t, bgt, res in zip(times, budgets, residuals):
            writer.writerow([repr(float(t)), repr(bgt.kinetic),
                             repr(bgt.power), repr(res)])


def cmd_galerkin_demo(args):
    "fixed point windows on a small Galerkin system"
    cfg = load_config(args)
    gcfg = cfg.galerkin
    outdir = ensure_dir(args.output)
    with Torpor("galerkin system n = {} m = {}".format(gcfg.modes,
                                                        gcfg.eta_modes)):
        system = mk_system(gcfg.modes, gcfg.eta_modes, galerkin_params(cfg))
    a0, b0 = demo_coefficients(system, gcfg.amplitude)
    with Torpor("fixed point over {} window(s)".format(gcfg.windows)):
        traj = run_galerkin(a0, b0, gcfg.windows * gcfg.T_n, system)
    budgets = energy_budgets(traj, system)
    audit = galerkin_energy_audit(traj.times, budgets)
    write_trace(fp.join(outdir, TRACE_CSV), traj.windows)
    write_energy(fp.join(outdir, ENERGY_CSV), traj.times, budgets, audit)
    print_summary([("windows", len(traj.windows)),
                   ("final t", repr(float(traj.times[-1]))),
                   ("contraction", repr(max(w.contraction
                                            for w in traj.windows))),
                   ("weak residual", repr(max(w.weak_residual
                                              for w in traj.windows))),
                   ("energy residual", repr(audit.max_residual)),
                   ("energy flagged", len(audit.flagged))])
    return EXIT_OK


def cmd_degiorgi(args):
    "vanishing level certificate from a level set CSV"
    samples = read_level_sets(args.levelsets)
    given = [args.C, args.alpha, args.beta]
    if all(x is None for x in given):
        params = None
    elif any(x is None for x in given):
        raise ConfigError("--C, --alpha and --beta go together")
    else:
        params = DecayParams(C=args.C, alpha=args.alpha, beta=args.beta)
        try:
            params.validate()
        except ValueError as err:
            raise ConfigError(str(err))
    report = empirical_vanishing_level(samples, params)
    pairs = [("C", repr(report.params.C)),
             ("alpha", repr(report.params.alpha)),
             ("beta", repr(report.params.beta)),
             ("pairs checked", report.hypothesis.n_pairs),
             ("violations", len(report.hypothesis.violations)),
             ("observed level", repr(report.l_observed))]
    if report.certificate is None:
        print_summary(pairs)
        _LOG.error("decay hypothesis fails on %d pair(s); no certificate",
                   len(report.hypothesis.violations))
        return EXIT_NUMERICAL
    cert = report.certificate
    pairs += [("kappa", repr(cert.kappa)),
              ("L", repr(cert.L)),
              ("C'", repr(cert.c_prime)),
              ("consistent", report.consistent)]
    print_summary(pairs)
    return EXIT_OK


def cmd_init_check(args):
    "admissibility of the initial data and the bounds they give"
    cfg = load_config(args)
    init, grid = cfg.init, cfg.grid
    data = build_initial_data(init, grid)
    eta, v = approximate_initial_data(data, init.epsilon, init, grid)
    lower, upper = density_bounds(init.epsilon, init.p0)
    print_summary([("E0", repr(data.e0_bound)),
                   ("C0", repr(c0_bound(data, init, grid))),
                   ("C0 functional", repr(approximation_functional(
                       eta ** 2, v, init.epsilon, init, grid))),
                   ("rho lower", repr(lower)),
                   ("rho upper", repr(upper)),
                   ("approx L1 gap", repr(approximation_gap(
                       data, init.epsilon, init.p0)))])
    return EXIT_OK

# ---------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------


def mk_parser():
    "the cpe-lab argument parser"
    psr = ArgumentParser(prog='cpe-lab',
                         description='epsilon-regularized compressible '
                         'primitive equations laboratory')
    psr.add_argument('--verbose', '-v', action='store_true',
                     help='debug logging')
    subs = psr.add_subparsers(dest='command', parser_class=ArgumentParser)
    subs.required = True

    sub = add_subcommand(subs, CliConfig('run', 'run one trajectory',
                                         True, 'output directory'))
    sub.add_argument('--epsilon', type=float,
                     help='override [init] epsilon')
    sub.set_defaults(func=cmd_run)

    sub = add_subcommand(subs, CliConfig('sweep', 'run the epsilon ladder',
                                         True, 'output directory'))
    sub.add_argument('--jobs', type=int, help='override [sweep] jobs')
    sub.set_defaults(func=cmd_sweep)

    sub = add_subcommand(subs, CliConfig('diagnose',
                                         'recompute diagnostics from '
                                         'snapshots', False, None))
    sub.add_argument('rundir', metavar='DIR', help='run directory')
    sub.add_argument('--output', metavar='FILE',
                     help='csv to write (default: DIR/{})'
                     .format(RECOMPUTED_CSV))
    sub.set_defaults(func=cmd_diagnose)

    sub = add_subcommand(subs, CliConfig('galerkin-demo',
                                         'Galerkin fixed point trace',
                                         True, 'output directory'))
    sub.set_defaults(func=cmd_galerkin_demo)

    sub = add_subcommand(subs, CliConfig('degiorgi',
                                         'certify a vanishing level',
                                         False, None))
    sub.add_argument('levelsets', metavar='FILE', help='k,a_k csv')
    sub.add_argument('--C', type=float, help='decay constant')
    sub.add_argument('--alpha', type=float, help='decay exponent alpha')
    sub.add_argument('--beta', type=float, help='decay exponent beta')
    sub.set_defaults(func=cmd_degiorgi)

    sub = add_subcommand(subs, CliConfig('init-check',
                                         'validate initial data, print '
                                         'E0', True, None))
    sub.set_defaults(func=cmd_init_check)
    return psr


def main(argv=None):
    """
    Run a subcommand; returns the exit code ::

        Maybe [String] -> Int
    """
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = mk_parser().parse_args(argv)
    except CpeError as err:
        print(err, file=sys.stderr)
        return err.exit_code
    except SystemExit as err:
        # --help
        return err.code or EXIT_OK
    setup_logging(args.verbose)
    try:
        return args.func(args)
    except CpeError as err:
        _LOG.error("%s", err)
        return err.exit_code
    except (IOError, OSError) as err:
        _LOG.error("%s", err)
        return EXIT_IO
