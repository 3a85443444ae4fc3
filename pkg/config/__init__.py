# Configuration module for the superradiance pipeline