from pydantic import BaseModel, ConfigDict


class FrozenModel(BaseModel):
    """
    Base of every laboratory value object: immutable, hashable and strict about unknown fields.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)
