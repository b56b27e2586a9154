"""sflsim package."""
