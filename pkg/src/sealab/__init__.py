"""Remote series-elastic-actuator laboratory with a simulated testbed."""

__version__ = "0.1.0"
