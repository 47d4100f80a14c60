from . import catalog, curve, moments, simulate, verify

SUBCOMMANDS = (catalog, moments, simulate, curve, verify)
