import logging

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def resolve_level(level: int | str) -> int:
    """
    Translate a level given either as a number or as a name (e.g. "debug") into a logging level.

    :param level: Numeric level or case-insensitive level name.
    :return: The numeric logging level.
    """
    if isinstance(level, int):
        return level
    resolved = logging.getLevelNamesMapping().get(level.strip().upper())
    if resolved is None:
        raise ValueError(f"Unknown logging level: {level}")
    return resolved


def setup_logging(level: int | str) -> logging.Logger:
    """
    Set up the root logger used by every laboratory module.

    :param level: The logging level to set, numeric or by name.
    :return: The configured root logger.
    """
    numeric_level = resolve_level(level)
    for handler in logging.root.handlers[:]:
        logging.root.removeHandler(handler)

    new_logger = logging.getLogger()
    new_logger.setLevel(numeric_level)
    stream_handler = logging.StreamHandler()
    stream_handler.setLevel(numeric_level)
    stream_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    new_logger.addHandler(stream_handler)
    new_logger.propagate = False
    return new_logger
