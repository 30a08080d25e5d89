"""Configuration module for nhqsim."""

# Empty init file to avoid circular imports
