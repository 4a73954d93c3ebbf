SECRET_KEY = "fpa-learning"
DEBUG = False

INSTALLED_APPS = [
    "fpa_learning",
]

FPA_LEARNING_MAX_PROFILES = 10**7
FPA_LEARNING_CLASSIFICATION_THRESHOLD = 0.9
FPA_LEARNING_WORKERS = 1
FPA_LEARNING_MWU_AUDIT_SCALE = 5.0
FPA_LEARNING_OUTPUT_DIR = "."

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {"format": "%(asctime)s %(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "simple"},
    },
    "loggers": {
        "fpa_learning": {"handlers": ["console"], "level": "INFO", "propagate": False},
    },
}
