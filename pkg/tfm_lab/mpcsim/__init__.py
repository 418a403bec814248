"""
Protocol simulator for the MPC-assisted model.

Shamir and additive sharing over a prime field, simulated commitments,
a synchronous network with a broadcast channel, identity agreement, the
sharing protocol with its ideal functionality, the corrupt-majority
abort variant, a commit-reveal coin toss, the efficient broadcast
instantiation and transcript replay.
"""
