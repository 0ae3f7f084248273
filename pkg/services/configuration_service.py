import logging
import os

from scenario_error import ScenarioValidationError


class ConfigurationService:
    _instance = None  # Singleton instance

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(ConfigurationService, cls).__new__(cls)
            cls._instance._settings = {}  # Storage for settings
        return cls._instance

    def set_config(self, key, value):
        """Sets a configuration value."""
        self._settings[key] = value

    def get_config(self, key, default=None):
        """Retrieves a configuration value."""
        return self._settings.get(key, default)

    def get_all_configs(self):
        """Returns all configuration settings."""
        return self._settings

    def reset(self):
        """Drops every setting (used between independent runs)."""
        self._settings.clear()

    def load_from_parser(self, args, environ=None):
        """Loads configurations from parsed arguments and the environment."""
        environ = os.environ if environ is None else environ

        grid = getattr(args, "grid", None)
        if grid is not None and grid < 2:
            logging.error("[config] Grid resolution must be at least 2.")
            raise ScenarioValidationError("grid", "must be at least 2")
        tau = getattr(args, "tau", None)
        if tau is not None and not 0.0 < tau < 1.0:
            logging.error("[config] tau must lie in (0, 1).")
            raise ScenarioValidationError("tau", "must lie in (0, 1)")

        raw_threads = environ.get("BSMAC_THREADS", "1")
        try:
            threads = int(raw_threads)
        except ValueError:
            raise ScenarioValidationError("BSMAC_THREADS", f"not an integer: '{raw_threads}'")
        if threads < 0:
            raise ScenarioValidationError("BSMAC_THREADS", "must be >= 0")
        if threads == 0:
            threads = os.cpu_count() or 1

        mention_users = getattr(args, "mention_users", None)
        self.set_config("scenario_path", getattr(args, "scenario", None))
        self.set_config("out_dir", getattr(args, "out", "."))
        self.set_config("grid", grid)
        self.set_config("seed", getattr(args, "seed", 0))
        self.set_config("tau", tau)
        self.set_config("bt_qos", not getattr(args, "no_bt_qos", False))
        self.set_config("threads", threads)
        self.set_config("webhook", getattr(args, "webhook", None))
        self.set_config("mention_users", mention_users.split(",") if mention_users else None)
        logging.info(f"[config] Worker processes: {threads}")
