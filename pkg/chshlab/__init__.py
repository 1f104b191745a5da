"""
chshlab: CHSH rigidity, sequential CHSH games, state and process tomography and verified
teleported computation, simulated end to end.
"""

__version__ = "0.1.0"
