"""
Plain ``key=value`` configuration files for the command line.

Example::

    # shared settings for the unit square runs
    quad-points = 32
    threshold = 1e-3
    seed = 20240601
    no_progress = true

Blank lines and ``#`` comments are ignored; dashes in keys are read as
underscores, so keys match command line flags. Values stay strings here;
commands convert them with the types of their own arguments, and flags given
on the command line take precedence.
"""

import logging
import os
from typing import Union

from holofem.base import HolofemDict, ImproperConfiguration

logger = logging.getLogger(__name__)

#: accepted spellings of boolean values
TRUE_VALUES = ("1", "true", "yes", "on")
FALSE_VALUES = ("0", "false", "no", "off")


def parse_bool(value: str) -> bool:
    """Interpret a configuration value as a boolean.

    Raises:
        ImproperConfiguration: if the value is not a recognized boolean.
    """
    lowered = value.strip().lower()
    if lowered in TRUE_VALUES:
        return True
    if lowered in FALSE_VALUES:
        return False
    raise ImproperConfiguration("expected a boolean value, got %r" % value)


def load_config(path: Union[str, os.PathLike]) -> HolofemDict:
    """Read a configuration file into a :class:`~holofem.base.HolofemDict`
    of strings.

    Raises:
        ImproperConfiguration: if the file cannot be read or a line is
            malformed (the message names the line).
    """
    try:
        with open(path) as infile:
            lines = infile.read().splitlines()
    except OSError as err:
        raise ImproperConfiguration("cannot read config file %s: %s" % (path, err))

    config = HolofemDict()
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key or not key.isidentifier():
            raise ImproperConfiguration(
                "%s line %d: expected key=value, got %r" % (path, lineno, line)
            )
        if key in config:
            logger.warning("%s line %d: %s set more than once", path, lineno, key)
        config[key] = value.strip()
    logger.debug("Loaded %d settings from %s", len(config), path)
    return config
