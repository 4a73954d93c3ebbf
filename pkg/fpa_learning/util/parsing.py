import re

__all__ = ["parse_int_list", "parse_int_lists"]

_SEPARATORS = re.compile(r"[,\s]+")


def parse_int_list(value):
    """Parse "4,4,4", "4 4 4" or an iterable of ints into a tuple of ints"""

    if value is None:
        return ()

    if isinstance(value, str):
        parts = [part for part in _SEPARATORS.split(value.strip()) if part]
        return tuple(int(part) for part in parts)

    return tuple(int(part) for part in value)


def parse_int_lists(value):
    """Parse "6,1,1;1,6,1" into ((6, 1, 1), (1, 6, 1))"""

    if isinstance(value, str):
        return tuple(parse_int_list(chunk) for chunk in value.split(";") if chunk.strip())

    return tuple(parse_int_list(chunk) for chunk in value)
