# Utility modules for the superradiance pipeline