from kolflow.gateway.app import GatewayConfig, build_engine, create_app, serve

__all__ = ["GatewayConfig", "build_engine", "create_app", "serve"]
