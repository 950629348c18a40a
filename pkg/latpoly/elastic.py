import logging
from typing import Any, Dict, List, Optional
from urllib.parse import urlparse

from elasticsearch import AsyncElasticsearch
from elasticsearch.helpers import async_bulk

from .core.config import Settings
from .models import DiscrepancyRecord

logger = logging.getLogger("latpoly.elastic")

_ELASTIC_INDEX_SETTINGS = {
    "mappings": {
        "properties": {
            "run_id": {"type": "keyword"},
            "polytope": {"type": "keyword"},
            "d": {"type": "integer"},
            "t": {"type": "keyword"},
            "t_value": {"type": "double"},
            "count": {"type": "long"},
            "main_term": {"type": "double"},
            "delta": {"type": "double"},
            "certified": {"type": "boolean"},
        }
    }
}


def compose_record_doc(run_id: str, polytope: str, d: int, record: DiscrepancyRecord) -> Dict[str, Any]:
    return {
        "run_id": run_id,
        "polytope": polytope,
        "d": d,
        "t": record.t,
        "t_value": record.t_float,
        "count": record.count,
        "main_term": record.main_term,
        "delta": record.delta,
        "certified": record.certified,
    }


def record_update_action(settings: Settings, run_id: str, polytope: str, d: int,
                         record: DiscrepancyRecord) -> Dict[str, Any]:
    return {
        "_op_type": "update",
        "_index": settings.elasticsearch_index,
        "_id": "%s:%s" % (run_id, record.t),
        "doc": compose_record_doc(run_id, polytope, d, record),
        "doc_as_upsert": True,
    }


def client_kwargs(settings: Settings) -> Optional[Dict[str, Any]]:
    """Argumentos del cliente o None si la URL no es aceptable."""
    parsed = urlparse(settings.elasticsearch_url)
    if parsed.scheme not in {"https", "http"}:
        logger.error("ELASTICSEARCH_URL esquema no soportado (usar http(s))")
        return None
    if parsed.scheme != "https" and not settings.elasticsearch_allow_insecure:
        logger.error(
            "Conexion insegura a Elasticsearch bloqueada (use https o ELASTICSEARCH_ALLOW_INSECURE=true bajo su responsabilidad)"
        )
        return None
    kwargs: Dict[str, Any] = {
        "hosts": [settings.elasticsearch_url],
        "request_timeout": settings.elasticsearch_request_timeout,
        "max_retries": settings.elasticsearch_max_retries,
        "retry_on_timeout": settings.elasticsearch_retry_on_timeout,
        "verify_certs": settings.elasticsearch_verify_certs,
    }
    if settings.elasticsearch_ca_certs:
        kwargs["ca_certs"] = settings.elasticsearch_ca_certs
    if settings.elasticsearch_api_key:
        kwargs["api_key"] = settings.elasticsearch_api_key
    elif settings.elasticsearch_username and settings.elasticsearch_password:
        kwargs["basic_auth"] = (settings.elasticsearch_username, settings.elasticsearch_password)
    return kwargs


async def init_elasticsearch_client(settings: Settings) -> Optional[AsyncElasticsearch]:
    if not settings.elasticsearch_enabled:
        logger.info("Elasticsearch desactivado (ELASTICSEARCH_URL vacio)")
        return None
    kwargs = client_kwargs(settings)
    if kwargs is None:
        return None
    client = AsyncElasticsearch(**kwargs)
    try:
        if not await client.ping():
            raise RuntimeError("Ping a Elasticsearch fallido")
        logger.info("Conexion a Elasticsearch establecida")
        await ensure_elasticsearch_index(client, settings)
        return client
    except Exception as exc:
        logger.error("Error inicializando Elasticsearch: %s", exc)
        await client.close()
        return None


async def ensure_elasticsearch_index(client: AsyncElasticsearch, settings: Settings) -> None:
    try:
        exists = await client.indices.exists(index=settings.elasticsearch_index)
        if not exists:
            await client.indices.create(index=settings.elasticsearch_index, **_ELASTIC_INDEX_SETTINGS)
            logger.info("Indice Elasticsearch creado: %s", settings.elasticsearch_index)
        else:
            logger.info("Indice Elasticsearch disponible: %s", settings.elasticsearch_index)
    except Exception as exc:
        logger.error("No se pudo asegurar el índice de Elasticsearch: %s", exc)


async def persist_records_to_elastic(
    client: Optional[AsyncElasticsearch],
    settings: Settings,
    run_id: str,
    polytope: str,
    d: int,
    records: List[DiscrepancyRecord],
) -> bool:
    """Upsert masivo de los registros; los fallos solo se registran."""
    if not settings.elasticsearch_enabled or client is None or not records:
        return False
    actions = [record_update_action(settings, run_id, polytope, d, r) for r in records]
    try:
        success, errors = await async_bulk(
            client,
            actions,
            raise_on_error=False,
            stats_only=True,
        )
        if errors:
            logger.warning(
                "Errores al persistir registros en Elasticsearch (errores=%s, acciones=%s)",
                errors,
                len(actions),
            )
        logger.info("Persistidos en Elasticsearch (bulk): %s acciones", success)
        return not errors
    except Exception as exc:
        logger.warning("No se pudo persistir registros en Elasticsearch: %s", exc)
        return False


async def persist_sweep(settings: Settings, run_id: str, polytope: str, d: int,
                        records: List[DiscrepancyRecord]) -> bool:
    """Abre un cliente efímero (uso desde la CLI), persiste y lo cierra."""
    client = await init_elasticsearch_client(settings)
    try:
        return await persist_records_to_elastic(client, settings, run_id, polytope, d, records)
    finally:
        await close_elasticsearch_client(client)


async def close_elasticsearch_client(client: Optional[AsyncElasticsearch]) -> None:
    if client:
        await client.close()
