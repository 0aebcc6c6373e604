#coding: utf8

import logging

logger = logging.getLogger(__name__)

__version__ = '0.1'

registry = {}

def register(family, **kwargs):
    """Called by the families module: adds a root-system family to the list
    consulted when invariant degrees and block layouts are derived."""
    kwargs.setdefault('pfaffian_degree', None)
    kwargs.setdefault('min_rank', 1)
    registry[family.upper()] = kwargs
    logger.debug('Registered root system family %s.' % family)

def lookup(family):
    """Return the registration for a family letter, loading the built-in
    families on first use."""
    if not registry:
        from hitchin_sov import families  # noqa: F401
    return registry.get(str(family).upper())

def consecutive_degrees(first):
    """Degrees first, first + 1, ..., rank + 1 (the A series)."""
    return lambda n: list(range(first, n + 2))

def even_degrees(count):
    """Degrees 2, 4, ..., 2 * count(rank)."""
    return lambda n: [2 * i for i in range(1, count(n) + 1)]
