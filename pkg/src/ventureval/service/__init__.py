from .app import Engine, create_app
from .config import ServiceConfig, load_config
from .store import Store

__all__ = ["Engine", "create_app", "ServiceConfig", "load_config", "Store"]
