import logging
from django.apps import AppConfig

from django.conf import settings
from django.utils.functional import SimpleLazyObject

log = logging.getLogger(__name__)

DEFAULTS = {
    "LMLAB_SAMPLER_SEED": 42,
    "LMLAB_SAMPLER_COUNT": 64,
    "LMLAB_GUARD_TOL": 1e-6,
    "LMLAB_TOLERANCE": 1e-9,
    "LMLAB_MAX_WORKERS": 1,
    "VERBOSE_LMLAB_DEBUGGING": False,
}


def get_setting(name):
    """Settings lookup that falls back to DEFAULTS when Django is not configured."""
    if not settings.configured:
        return DEFAULTS[name]
    return getattr(settings, name, DEFAULTS[name])


class LMLabConfig(AppConfig):
    name = "lmlab"
    verbose_name = "Last Multiplier Lab"


class LMLabConfigApp:
    name = "lmlab"

    # Note this can be a callable to get data (print)
    VERBOSE_LOGGING = get_setting("VERBOSE_LMLAB_DEBUGGING")

    @property
    def sampler_defaults(self) -> dict:
        return {
            "seed": get_setting("LMLAB_SAMPLER_SEED"),
            "count": get_setting("LMLAB_SAMPLER_COUNT"),
            "guard_tol": get_setting("LMLAB_GUARD_TOL"),
        }

    @property
    def tolerance(self) -> float:
        return get_setting("LMLAB_TOLERANCE")

    @property
    def max_workers(self) -> int:
        return get_setting("LMLAB_MAX_WORKERS")

    @property
    def get_verbose_logging(self) -> tuple:
        should_log = self.VERBOSE_LOGGING
        log_method = log.debug
        if not isinstance(should_log, bool) and callable(should_log):
            log_method = should_log
            should_log = True
        return (should_log, log_method)


app = SimpleLazyObject(LMLabConfigApp)
