import dataclasses
import importlib
from enum import StrEnum

from dependency_injector.containers import DynamicContainer
from dependency_injector.providers import Provider, Singleton

from nematiclab.services.fft import SpectralBackend
from nematiclab.services.sweeps import FixedPointSweeper


class ServiceName(StrEnum):
    SPECTRAL_BACKEND = "SpectralBackend"
    FIXED_POINT_SWEEPER = "FixedPointSweeper"


@dataclasses.dataclass(kw_only=True)
class WiringDictionaryEntry:
    """
    Class representing a wiring dictionary entry for dependency injection.

    :ivar service_class: The service class to be wired.
    :ivar provider_class: The provider class to be used for the service.
    :ivar modules: The modules that require this service.
    """

    service_class: type
    provider_class: type[Provider]
    modules: set[str]


WIRING: dict[str, WiringDictionaryEntry] = {
    ServiceName.SPECTRAL_BACKEND: WiringDictionaryEntry(
        service_class=SpectralBackend,
        provider_class=Singleton,
        modules={"nematiclab.spectral.field"},
    ),
    ServiceName.FIXED_POINT_SWEEPER: WiringDictionaryEntry(
        service_class=FixedPointSweeper,
        provider_class=Singleton,
        modules={"nematiclab.solver.steps"},
    ),
}


LAB_SERVICES_CONTAINER: DynamicContainer = DynamicContainer()


def populate_container(container: DynamicContainer, providers_config: dict[str, WiringDictionaryEntry]) -> set[str]:
    """
    Populate the dependency injection container with the provided services.

    :param container: The dependency injection container to populate.
    :param providers_config: The configuration dictionary containing service providers.
    :return: A set of module names that the container will be wired to.
    """
    modules_to_wire = set()
    for provider_name, provider_info in providers_config.items():
        provider_instance = provider_info.provider_class(provider_info.service_class)  # type: ignore[call-arg]
        setattr(container, provider_name, provider_instance)
        modules_to_wire.update(provider_info.modules)
    return modules_to_wire


def wire_lab_dependencies() -> None:
    """
    Wire the laboratory services into the modules that consume them.
    Rewiring resets singletons so that changed EL_* variables take effect.
    """
    modules = populate_container(LAB_SERVICES_CONTAINER, WIRING)
    for module in modules:
        importlib.import_module(module)
    LAB_SERVICES_CONTAINER.wire(modules=[*modules])
    LAB_SERVICES_CONTAINER.init_resources()
