import requests

from ..config import Config
from ..logging_config import get_logger

logger = get_logger("alerts")


def _post(message: str, cfg: Config) -> None:
    if not cfg.alerts.enabled or not cfg.alerts.webhook_url:
        return
    try:
        requests.post(cfg.alerts.webhook_url, json={"content": message}, timeout=10)
    except requests.RequestException as e:
        logger.warning(f"Webhook alert failed: {e}")


def send_anomaly(kind: str, anomalies: list, cfg: Config, config_hash: str = "") -> None:
    """
    Notify the configured webhook that an experiment flagged anomalies.

    Args:
        kind: Experiment kind.
        anomalies: Anomaly messages; the first five are sent.
        cfg: Configuration with the alerts section.
        config_hash: Hash identifying the run.
    """
    message = f"[cocycle-forge] {kind} flagged {len(anomalies)} anomalies ({config_hash[:12]})"
    for line in anomalies[:5]:
        message += f"\n- {line}"
    _post(message, cfg)


def send_failure(reason: str, cfg: Config, details: str = "") -> None:
    """
    Tell the webhook that a run errored out.

    Args:
        reason: Short reason such as "drift failed".
        cfg: Configuration whose alerts section decides whether anything is sent.
        details: Exception text, appended on its own line.
    """
    message = f"[cocycle-forge] FAIL: {reason}"
    if details:
        message += f"\n{details}"
    _post(message, cfg)
