"""
Helper functions for the command-line tool
"""

# license: Public domain

from __future__ import print_function
from collections import namedtuple
from os import path as fp
import argparse
import csv
import logging
import os
import sys

from .config import default_config, read_config
from .errors import ConfigError


class CliConfig(namedtuple('CliConfig',
                           ['name', 'help', 'needs_config', 'output'])):
    """
    How a subcommand is wired up

    :param name: subcommand name
    :param help: one line description
    :param needs_config: whether it takes ``--config``
    :param output: description of its positional output dir (or None)
    """


class ArgumentParser(argparse.ArgumentParser):
    """
    argparse, but usage errors become `ConfigError` so that they map
    to our own exit code instead of argparse's
    """

    def error(self, message):
        raise ConfigError("{}: {}".format(self.prog, message))


def add_subcommand(subparsers, cfg):
    """
    Register a subcommand with the arguments it shares with others;
    returns its parser for any extras
    """
    psr = subparsers.add_parser(cfg.name, help=cfg.help,
                                description=cfg.help)
    if cfg.needs_config:
        psr.add_argument('--config', metavar='FILE',
                         help='INI config (in-code defaults if omitted)')
    if cfg.output is not None:
        psr.add_argument('output', metavar='DIR', help=cfg.output)
    return psr


def load_config(args):
    """
    The validated config named by ``--config``, or the defaults
    """
    path = getattr(args, 'config', None)
    if path is None:
        return default_config()
    return read_config(path)


def ensure_dir(path):
    "create an output directory if it is missing"
    if not fp.exists(path):
        os.makedirs(path)
    return path


def setup_logging(verbose):
    "one logging configuration for the whole process"
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format='%(levelname)s %(name)s: %(message)s',
                        stream=sys.stderr)


def print_summary(pairs, file=None):
    """
    ``key: value`` lines, aligned (on stdout by default)
    """
    file = sys.stdout if file is None else file
    for key, val in pairs:
        print(u"{: <20}: {}".format(key, val), file=file)

# ---------------------------------------------------------------------
# csv inputs
# ---------------------------------------------------------------------


def read_level_sets(path):
    """
    (k, a_k) pairs from a level set CSV (``k,a_k`` header) ::

        FilePath -> [(Float, Float)]
    """
    with open(path) as ifile:
        reader = csv.DictReader(ifile)
        if reader.fieldnames is None or \
                not {'k', 'a_k'} <= set(reader.fieldnames):
            raise ConfigError("{}: expected a k,a_k header".format(path))
        try:
            return [(float(row['k']), float(row['a_k'])) for row in reader]
        except (TypeError, ValueError) as err:
            raise ConfigError("{}: {}".format(path, err))
