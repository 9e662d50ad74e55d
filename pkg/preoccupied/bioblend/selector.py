# This library is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This library is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this library; if not, see <http://www.gnu.org/licenses/>.

"""
preoccupied.bioblend.selector
Kind-dispatched façade models.

A façade declares a single :func:`Discriminator` field. Each concrete
subclass pins that field with :func:`Match`. Validating a plain mapping
against the façade returns the matching subclass, which is how equipment
kinds, model variants and solver backends are read from tabular data and
configuration files.

Example:

```python
class EquipmentNode(KindSelector):
    kind: str = Discriminator()

class Grinder(EquipmentNode):
    kind: str = Match("grinder")
    dry_matter_loss: float

node = EquipmentNode(kind="grinder", dry_matter_loss=0.015)
assert isinstance(node, Grinder)
```

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple, Type

from pydantic import BaseModel, Field
from pydantic.fields import FieldInfo


__all__ = (
    "Discriminator",
    "DiscriminatorConfig",
    "KindRegistry",
    "KindSelector",
    "Match",
    "MatchConfig",
)


@dataclass(frozen=True)
class DiscriminatorConfig:
    """
    Marker metadata identifying the dispatch field of a façade.
    """

    default_value: Any


def Discriminator(  # noqa: N802 - factory function intentionally PascalCase
        default: Any = ...,
        **field_kwargs: Any) -> FieldInfo:
    """
    Create a FieldInfo configured as the dispatch field of a façade. When
    a default is given, payloads omitting the field dispatch to that kind.
    """

    info = Field(default, **field_kwargs)
    info.metadata.append(DiscriminatorConfig(default_value=default))
    return info


@dataclass(frozen=True)
class MatchConfig:
    """
    Marker metadata identifying the kind value of a concrete subclass.
    """

    value: Any


def Match(value: Any) -> FieldInfo:  # noqa: N802 - PascalCase factory
    """
    Declare the kind value for a concrete subclass.
    """

    info = Field(default=value)
    metadata = list(info.metadata)
    metadata.append(MatchConfig(value=value))

    # FieldInfo guards its metadata list once built
    object.__setattr__(info, "metadata", metadata)

    return info


class KindRegistry:
    """
    Maps kind values to the concrete subclasses of one façade.
    """

    def __init__(self, facade: Type[BaseModel]) -> None:
        self.facade = facade
        self._entries: Dict[Any, Type[BaseModel]] = {}

        found = _markers(facade, DiscriminatorConfig)
        if len(found) != 1:
            raise ValueError(
                f"{facade.__name__} must declare exactly one Discriminator field.")

        self.field, self.config = found[0]


    def register(self, subclass: Type[BaseModel]) -> None:
        """
        Register a subclass under the kind value declared by its Match field.
        """

        found = _markers(subclass, MatchConfig)
        if len(found) != 1:
            raise ValueError(
                f"{subclass.__name__} must declare exactly one Match field.")

        value = found[0][1].value
        existing = self._entries.get(value)
        if existing is not None:
            raise ValueError(
                f"Duplicate kind '{value}' for {subclass.__name__}; "
                f"already registered to {existing.__name__}.")

        self._entries[value] = subclass


    def kinds(self) -> Tuple[Any, ...]:
        """
        Registered kind values, in registration order.
        """

        return tuple(self._entries)


    def normalize(self, payload: Any) -> Dict[str, Any]:
        """
        Copy the payload into a dict and fill a defaulted kind value.
        """

        if isinstance(payload, BaseModel):
            payload = payload.model_dump()
        elif not isinstance(payload, dict):
            raise TypeError(
                f"{self.facade.__name__} expects a mapping, got"
                f" {type(payload).__name__}.")

        payload = dict(payload)
        if self.field not in payload:
            if self.config.default_value is ...:
                raise ValueError(
                    f"{self.facade.__name__} requires field '{self.field}'.")
            payload[self.field] = self.config.default_value

        return payload


    def resolve(self, payload: Dict[str, Any]) -> Type[BaseModel]:
        """
        Find the subclass registered for the payload's kind value.
        """

        value = payload[self.field]
        subclass = self._entries.get(value)
        if subclass is None:
            known = ", ".join(str(k) for k in self._entries)
            raise ValueError(
                f"Unknown {self.field} '{value}' for {self.facade.__name__};"
                f" expected one of: {known}.")
        return subclass


def _markers(
        model_cls: Type[BaseModel],
        marker: type) -> List[Tuple[str, Any]]:

    found = []
    for name, field_info in model_cls.model_fields.items():
        for item in field_info.metadata:
            if isinstance(item, marker):
                found.append((name, item))
    return found


class SelectorMeta(type(BaseModel)):
    """
    Metaclass that registers façades and their concrete subclasses.
    """

    def __call__(cls, *args: Any, **kwargs: Any) -> BaseModel:
        """
        Route façade instantiation through validation to return the
        concrete subclass.
        """

        if cls.__dict__.get("__kind_facade__", False):
            if args and kwargs:
                raise TypeError(
                    "Mixing positional and keyword arguments is not"
                    " supported for façades.")
            if kwargs:
                payload: Any = kwargs
            elif len(args) == 1:
                payload = args[0]
            elif not args:
                payload = {}
            else:
                raise TypeError(
                    "Unexpected positional arguments for façade"
                    " instantiation.")

            return cls.model_validate(payload)
        return super().__call__(*args, **kwargs)


    def __new__(  # type: ignore[override]
            mcls,
            name: str,
            bases: Tuple[type, ...],
            namespace: Dict[str, Any],
            **kwargs: Any) -> type:

        model_cls = super().__new__(mcls, name, bases, namespace, **kwargs)

        if namespace.get("__kind_root__", False):
            # the KindSelector base itself; nothing to register
            return model_cls

        registry: Optional[KindRegistry] = getattr(
            model_cls, "__kind_registry__", None)

        if registry is None:
            model_cls.__kind_facade__ = True
            model_cls.__kind_registry__ = KindRegistry(model_cls)
        else:
            model_cls.__kind_facade__ = False
            registry.register(model_cls)

        return model_cls


class KindSelector(BaseModel, metaclass=SelectorMeta):
    """
    Base model class for kind-dispatched façades.

    Direct subclasses become façades and must declare a single
    `Discriminator` field. Their subclasses are concrete kinds and must
    pin that field with `Match`.
    """

    __kind_root__ = True


    @classmethod
    def model_validate(
            cls,
            obj: Any,
            *,
            strict: Optional[bool] = None,
            from_attributes: Optional[bool] = None,
            context: Optional[Dict[str, Any]] = None) -> BaseModel:
        """
        Validate a payload. On a façade, dispatch to the subclass named by
        the payload's kind value.
        """

        if cls.__dict__.get("__kind_facade__", False) and not isinstance(obj, cls):
            registry: KindRegistry = cls.__kind_registry__
            obj = registry.normalize(obj)
            subclass = registry.resolve(obj)
            return subclass.model_validate(
                obj,
                strict=strict,
                from_attributes=from_attributes,
                context=context)

        return super().model_validate(
            obj,
            strict=strict,
            from_attributes=from_attributes,
            context=context)


    @classmethod
    def kinds(cls) -> Tuple[Any, ...]:
        """
        Kind values registered beneath this façade.
        """

        return cls.__kind_registry__.kinds()


# The end.
