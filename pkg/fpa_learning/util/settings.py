from django.conf import settings

__all__ = ["get_setting"]


def get_setting(key, default=None):
    """Read a library setting from Django settings, falling back to `default` when Django is not configured"""

    if not settings.configured:
        return default

    return getattr(settings, key, default)
