from .client import BASIC, HC, FederatedClient
from .messages import (
    HcBroadcastEntry,
    HcBroadcastMsg,
    HcUploadEntry,
    HcUploadMsg,
    ParamBroadcastMsg,
    ParamUploadMsg,
)
from .protocol import (
    RoundMetrics,
    run_basic_propagation,
    run_federated_training,
    run_hc_pretraining,
    run_isolated_training,
)
from .server import FederatedServer, fedavg_aggregate, fedavg_weights, hc_server_aggregate
from .wire import InProcessTransport, WireTransport, decode_message, encode_message, make_transport
