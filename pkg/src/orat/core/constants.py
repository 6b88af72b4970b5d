# --- NUMERIC TOLERANCES ---
IDENTITY_TOLERANCE = 1e-9  # combinatorial ranking identities
DUAL_FD_TOLERANCE = 1e-6  # finite differences of the inner objective in (λ, λ̂)
THETA_FD_TOLERANCE = 1e-4  # finite differences of network losses in θ
FEASIBILITY_SLACK = 1e-12  # ‖x̃ − x‖∞ ≤ ε + slack
KINK_MARGIN = 1e-3  # FD audits skip points this close to a hinge threshold
TIE_TOLERANCE = 1e-12  # relative slack when collecting optimal scan candidates

# --- INPUT BOX ---
INPUT_LOW = 0.0
INPUT_HIGH = 1.0

# --- TRAINING DEFAULTS ---
DEFAULT_LAMBDA_INIT = 0.0
DEFAULT_LAMBDA_HAT_INIT = 1.0
DEFAULT_MOMENTUM = 0.9
DEFAULT_WEIGHT_DECAY = 2e-4
DEFAULT_BATCH_SIZE = 128
DEFAULT_TRAIN_PGD_STEPS = 10

# --- EVALUATION DEFAULTS ---
DEFAULT_EVAL_PGD_STEPS = 20
DEFAULT_HOLDOUT_FRACTION = 0.1

# --- LABEL FLIP MAPS ---
MNIST_FLIP_MAP: dict[int, int] = {2: 7, 3: 8, 5: 6, 6: 5, 7: 1}
# airplane=0 automobile=1 bird=2 cat=3 deer=4 dog=5 horse=7 truck=9
CIFAR10_FLIP_MAP: dict[int, int] = {9: 1, 2: 0, 4: 7, 3: 5, 5: 3}

# --- FILE FORMATS ---
IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801
PIXEL_SCALE = 255.0
CHECKPOINT_FORMAT_VERSION = 1

HISTORY_CSV_HEADER = (
    "epoch", "objective", "lambda", "lambda_hat", "train_acc", "robust_acc", "lr",
)
REPORT_CSV_HEADER = ("defense", "noise_kind", "gamma", "epsilon", "attack", "accuracy")
GRID_CSV_HEADER = ("k", "m", "val_accuracy", "val_robust_accuracy")
ORACLE_CSV_HEADER = (
    "check",
    "trials",
    "failures",
    "max_deviation",
    "tolerance",
    "worst",
)
