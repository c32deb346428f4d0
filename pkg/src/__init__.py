"""FedChain: federated failure detection with on-chain anchoring and incentives."""

__version__ = "1.0.0"
__author__ = "Sparticle"
