"""Precompiled interaction operators; importing the package registers them with the SFL function table."""

from sflsim.interactions import dem, gravity, social, sph  # noqa: F401
