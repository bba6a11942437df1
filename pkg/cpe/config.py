"""
Run configuration: sectioned ``key = value`` files

Every key has a type and a default in `SCHEMA`; a file only needs the
keys it changes. Unknown sections or keys are errors.
"""

# license: Public domain

from collections import OrderedDict, namedtuple
import configparser

from .domain import mk_grid
from .errors import ConfigError, GridError
from .galerkin import DEFAULT_PARAMS as GALERKIN_DEFAULTS, MAX_MODES
from .initial import InitConfig
from .momentum import mk_momentum_params, stable_dt as momentum_stable_dt
from .trajectory import DEFAULT_THRESHOLDS, RunParams, whole_steps


def float_list(text):
    "comma separated floats"
    return [float(x) for x in text.split(',') if x.strip()]


def _show(value):
    "config file rendering of a default"
    if isinstance(value, list):
        return ', '.join(repr(x) for x in value)
    return str(value)


# section -> key -> (type, default)
SCHEMA = OrderedDict([
    ('init', OrderedDict([
        ('gamma', (float, 2.0)),
        ('p0', (float, 25.0)),
        ('varpi', (float, 1.0)),
        ('epsilon', (float, 1e-2)),
        ('rho_profile', (str, 'sine')),
        ('rho_mean', (float, 1.0)),
        ('rho_amp', (float, 0.1)),
        ('v_profile', (str, 'swirl')),
        ('v_amp', (float, 0.2))])),
    ('grid', OrderedDict([
        ('nx', (int, 64)),
        ('ny', (int, 64)),
        ('nz', (int, 16))])),
    ('time', OrderedDict([
        ('dt', (float, 1e-4)),
        ('T', (float, 0.25)),
        ('snapshot_interval', (float, 0.01)),
        ('cfl', (float, 0.5))])),
    ('density', OrderedDict([
        ('delta', (float, 0.0)),
        ('rho_floor', (float, 0.0))])),
    ('audit', OrderedDict([
        ('c_audit', (float, 0.0)),
        ('uniformity_factor', (float, 3.0)),
        ('thresholds', (float_list, DEFAULT_THRESHOLDS))])),
    ('sweep', OrderedDict([
        ('epsilons', (float_list, [1e-1, 3e-2, 1e-2, 3e-3, 1e-3])),
        ('jobs', (int, 1))])),
    ('galerkin', OrderedDict([
        ('modes', (int, 8)),
        ('eta_modes', (int, 5)),
        ('epsilon', (float, GALERKIN_DEFAULTS.epsilon)),
        ('delta', (float, GALERKIN_DEFAULTS.delta)),
        ('amplitude', (float, 0.05)),
        ('T_n', (float, GALERKIN_DEFAULTS.T_n)),
        ('tol', (float, GALERKIN_DEFAULTS.tol)),
        ('max_iter', (int, GALERKIN_DEFAULTS.max_iter)),
        ('inner_steps', (int, GALERKIN_DEFAULTS.inner_steps)),
        ('rk4_substeps', (int, GALERKIN_DEFAULTS.rk4_substeps)),
        ('max_halvings', (int, GALERKIN_DEFAULTS.max_halvings)),
        ('oversample', (int, GALERKIN_DEFAULTS.oversample)),
        ('windows', (int, 1))]))])


class GalerkinConfig(namedtuple('GalerkinConfig',
                                list(SCHEMA['galerkin'].keys()))):
    """
    The ``[galerkin]`` section

    :param modes: velocity modes n
    :param eta_modes: density modes
    :param max_halvings: how often T_n may be halved (0 allowed)
    :param windows: number of T_n windows the demo chains

    The other keys are the `GalerkinParams` fields of the same name.
    """


class RunConfig(namedtuple('RunConfig',
                           ['init', 'grid', 'dt', 'T', 'snapshot_interval',
                            'cfl', 'delta', 'rho_floor', 'c_audit',
                            'uniformity_factor', 'thresholds', 'epsilons',
                            'jobs', 'galerkin'])):
    """
    A whole configuration file, typed

    :param init: `InitConfig`
    :param grid: `Grid`
    :param galerkin: `GalerkinConfig`

    The remaining fields are the keys of the ``[time]``, ``[density]``,
    ``[audit]`` and ``[sweep]`` sections.
    """

# ---------------------------------------------------------------------
# reading
# ---------------------------------------------------------------------


def _typed(section, key, text):
    "convert one value by the schema"
    kind = SCHEMA[section][key][0]
    try:
        return kind(text.strip())
    except ValueError:
        raise ConfigError("{}.{}: cannot read {!r} as {}"
                          .format(section, key, text, kind.__name__))


def parse_config(text, source='<config>'):
    """
    Typed values of a config file's text, defaults filled in ::

        (String, String) -> Dict String (Dict String a)
    """
    psr = configparser.ConfigParser(interpolation=None)
    psr.optionxform = str
    try:
        psr.read_string(text, source=source)
    except configparser.Error as err:
        raise ConfigError("{}: {}".format(source, err))
    values = OrderedDict((sec, OrderedDict((k, d) for k, (_, d) in
                                           keys.items()))
                         for sec, keys in SCHEMA.items())
    for section in psr.sections():
        if section not in SCHEMA:
            raise ConfigError("{}: unknown section [{}]"
                              .format(source, section))
        for key, text_value in psr.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError("{}: unknown key {}.{}"
                                  .format(source, section, key))
            values[section][key] = _typed(section, key, text_value)
    return values


def build_config(values):
    """
    RunConfig from typed section values (not yet validated)
    """
    try:
        grid = mk_grid(**values['grid'])
    except GridError as err:
        raise ConfigError("grid: {}".format(err))
    time, dens, audit, sweep = (values['time'], values['density'],
                                values['audit'], values['sweep'])
    return RunConfig(init=InitConfig(**values['init']),
                     grid=grid,
                     dt=time['dt'],
                     T=time['T'],
                     snapshot_interval=time['snapshot_interval'],
                     cfl=time['cfl'],
                     delta=dens['delta'],
                     rho_floor=dens['rho_floor'],
                     c_audit=audit['c_audit'],
                     uniformity_factor=audit['uniformity_factor'],
                     thresholds=list(audit['thresholds']),
                     epsilons=list(sweep['epsilons']),
                     jobs=sweep['jobs'],
                     galerkin=GalerkinConfig(**values['galerkin']))


def read_config(path):
    """
    Read, type and validate a config file ::

        FilePath -> RunConfig
    """
    try:
        with open(path) as ifile:
            text = ifile.read()
    except (IOError, OSError) as err:
        raise ConfigError("cannot read config {}: {}".format(path, err))
    return validate_config(build_config(parse_config(text, source=path)))


def default_config():
    "the in-code defaults, validated"
    return validate_config(build_config(parse_config('')))


def render_config(values):
    """
    Config file text for typed section values (what
    ``configs/default.ini`` holds for the defaults)
    """
    lines = []
    for section, keys in values.items():
        lines.append('[{}]'.format(section))
        lines.extend('{} = {}'.format(k, _show(v)) for k, v in keys.items())
        lines.append('')
    return '\n'.join(lines)

# ---------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------


def check_ladder(epsilons):
    "strictly decreasing, all in (0, 1)"
    if not epsilons:
        raise ConfigError("sweep.epsilons is empty")
    if any(not 0 < e < 1 for e in epsilons):
        raise ConfigError("sweep.epsilons must lie in (0, 1) (got {})"
                          .format(epsilons))
    if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise ConfigError("sweep.epsilons must be strictly decreasing "
                          "(got {})".format(epsilons))


def cfl_precheck(cfg):
    """
    Reject dt above the linear viscous bound (safety factor 1) for the
    largest ε the config can run with
    """
    eps = max([cfg.init.epsilon] + list(cfg.epsilons))
    params = mk_momentum_params(eps, cfg.init.p0, cfg.init.gamma, cfg.dt,
                                cfl=1.0)
    bound = momentum_stable_dt(cfg.grid, params)
    if cfg.dt > bound:
        raise ConfigError("time.dt = {} exceeds the stability bound {:.4g} "
                          "of a {}x{}x{} grid at epsilon = {}"
                          .format(cfg.dt, bound, cfg.grid.nx, cfg.grid.ny,
                                  cfg.grid.nz, eps))


def _check_galerkin(gcfg):
    "ranges of the [galerkin] knobs"
    for key in ['modes', 'eta_modes', 'epsilon', 'delta', 'T_n', 'tol',
                'max_iter', 'inner_steps', 'rk4_substeps',
                'oversample', 'windows']:
        if not getattr(gcfg, key) > 0:
            raise ConfigError("galerkin.{} must be positive (got {})"
                              .format(key, getattr(gcfg, key)))
    if gcfg.max_halvings < 0:
        raise ConfigError("galerkin.max_halvings must be non-negative "
                          "(got {})".format(gcfg.max_halvings))
    for key in ['modes', 'eta_modes']:
        if getattr(gcfg, key) > MAX_MODES:
            raise ConfigError("galerkin.{} must be at most {} (got {})"
                              .format(key, MAX_MODES, getattr(gcfg, key)))


def validate_config(cfg):
    """
    Everything that can be checked before a run starts; returns the
    config unchanged
    """
    cfg.init.validate()
    if not cfg.T > 0:
        raise ConfigError("time.T must be positive (got {})".format(cfg.T))
    if not cfg.dt > 0:
        raise ConfigError("time.dt must be positive (got {})"
                          .format(cfg.dt))
    if not cfg.cfl > 0:
        raise ConfigError("time.cfl must be positive (got {})"
                          .format(cfg.cfl))
    if cfg.delta < 0 or cfg.rho_floor < 0 or cfg.c_audit < 0:
        raise ConfigError("delta, rho_floor and c_audit must be "
                          "non-negative")
    whole_steps(cfg.T, cfg.dt, 'time.T')
    whole_steps(cfg.snapshot_interval, cfg.dt, 'time.snapshot_interval')
    if not cfg.uniformity_factor >= 1:
        raise ConfigError("audit.uniformity_factor must be at least 1 "
                          "(got {})".format(cfg.uniformity_factor))
    ths = cfg.thresholds
    if not ths or any(b <= a for a, b in zip(ths, ths[1:])):
        raise ConfigError("audit.thresholds must be strictly increasing "
                          "(got {})".format(ths))
    check_ladder(cfg.epsilons)
    if cfg.jobs < 1:
        raise ConfigError("sweep.jobs must be at least 1 (got {})"
                          .format(cfg.jobs))
    _check_galerkin(cfg.galerkin)
    cfl_precheck(cfg)
    return cfg

# ---------------------------------------------------------------------
# views
# ---------------------------------------------------------------------


def run_params(cfg, epsilon=None):
    """
    Parameters of a single trajectory, optionally at another ε ::

        (RunConfig, Maybe Float) -> RunParams
    """
    init = cfg.init
    if epsilon is not None:
        init = init._replace(epsilon=epsilon).validate()
    return RunParams(grid=cfg.grid, init=init, dt=cfg.dt, T=cfg.T,
                     snapshot_interval=cfg.snapshot_interval,
                     delta=cfg.delta, rho_floor=cfg.rho_floor,
                     cfl=cfg.cfl, thresholds=list(cfg.thresholds),
                     c_audit=cfg.c_audit)


def galerkin_params(cfg):
    """
    `GalerkinParams` from the ``[galerkin]`` section, with γ and p0
    taken from ``[init]``
    """
    gcfg = cfg.galerkin
    return GALERKIN_DEFAULTS._replace(
        epsilon=gcfg.epsilon, p0=cfg.init.p0, gamma=cfg.init.gamma,
        delta=gcfg.delta, T_n=gcfg.T_n, tol=gcfg.tol,
        max_iter=gcfg.max_iter, inner_steps=gcfg.inner_steps,
        rk4_substeps=gcfg.rk4_substeps, max_halvings=gcfg.max_halvings,
        oversample=gcfg.oversample)
