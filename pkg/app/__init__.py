import logging
from typing import Optional

from flask import Flask

from app.config import RegistryConfig, load_registry_config
from app.utils.cache_utils import configure_cache


def create_app(config: Optional[RegistryConfig] = None):
    """
    Cria e configura a aplicação Flask do registry com blueprints, cache e store.
    """
    app = Flask(__name__)

    config = config or load_registry_config()
    app.config['PIDINST'] = config
    app.config['DEBUG'] = False
    app.config['MAX_CONTENT_LENGTH'] = 1 * 1024 * 1024  # 1MB
    app.logger.setLevel(logging.INFO)

    # Registro do serviço, do cache e dos Blueprints
    try:
        from app.routes.instrument_routes import instrument_bp
        from app.routes.resolver_routes import resolver_bp
        from app.routes.route_helpers import REGISTRY_EXTENSION
        from app.services.registry_service import RegistryService

        registry = RegistryService(config)
        app.extensions[REGISTRY_EXTENSION] = registry

        # O prefixo do cache depende do store_id, conhecido só depois de abrir o store
        configure_cache(app, config, registry.repository.store_id)

        blueprints = [instrument_bp, resolver_bp]
        for bp in blueprints:
            app.register_blueprint(bp)

    except Exception as e:
        app.logger.error(f"Erro ao inicializar o registry: {e}")
        raise e

    app.logger.info(f"Registry PIDINST pronto: prefixo {config.prefix}, store {config.store_path}")
    return app
