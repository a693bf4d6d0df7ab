from .activations import ACTIVATION_KINDS, activation, activation_backward, softmax
from .network import (
    BATCH_SIZES,
    Architecture,
    TrainedModel,
    TrainingDiverged,
    TrainingPlan,
    evaluate,
    forward,
    init_model,
    loss_and_gradients,
    train,
)
from .optimizers import OPTIMIZER_KINDS, Optimizer, make_optimizer, optimizer_step
from .weights_io import (
    WeightsFormatError,
    load_weights,
    save_weights,
    weights_from_bytes,
    weights_to_bytes,
)
