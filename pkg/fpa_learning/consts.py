LEARNER_FTL = "ftl"
LEARNER_EPS_GREEDY = "eps-greedy"
LEARNER_MWU = "mwu"
LEARNER_MWU_STANDARD = "mwu-standard"
LEARNER_COUNTEREXAMPLE = "counterexample"
LEARNER_SCRIPTED = "scripted"

TIEBREAK_EXAMPLE1 = "example1"

MAX_PROFILES_SETTINGS_KEY = "FPA_LEARNING_MAX_PROFILES"
CLASSIFICATION_THRESHOLD_SETTINGS_KEY = "FPA_LEARNING_CLASSIFICATION_THRESHOLD"
WORKERS_SETTINGS_KEY = "FPA_LEARNING_WORKERS"
MWU_AUDIT_SCALE_SETTINGS_KEY = "FPA_LEARNING_MWU_AUDIT_SCALE"
OUTPUT_DIR_SETTINGS_KEY = "FPA_LEARNING_OUTPUT_DIR"

DEFAULT_MAX_PROFILES = 10**7
DEFAULT_CLASSIFICATION_THRESHOLD = 0.9
DEFAULT_MWU_AUDIT_SCALE = 5.0

# Mixed strategies are recorded every round up to this horizon, every 10th round beyond it.
DENSE_CHECKPOINT_HORIZON = 5000
SPARSE_CHECKPOINT_STRIDE = 10

PROBABILITY_TOLERANCE = 1e-12

# Rounds a HistoryStats is sized for when the caller does not say.
EXACT_HORIZON = 10**9

EXIT_CONFIG_ERROR = 2
EXIT_CAPACITY_ERROR = 3
EXIT_AUDIT_VIOLATIONS = 4

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
UINT64_MASK = 0xFFFFFFFFFFFFFFFF
