"""JSON input schemas: manifold descriptions, automorphisms and matrices."""

import json
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator
from sympy import ImmutableMatrix

from src.automorphism import GradedAutomorphism, from_degree_matrices, induce
from src.errors import SpecFormatError
from src.graded_ring import Generator, GradedRingDescription
from src.math_tools import to_integer_matrix
from src.sphere_products import SphereFactor, SphereProductSpec, product_automorphism


class Hypotheses(BaseModel):
    """Topological inputs that cohomology rings cannot supply."""

    model_config = ConfigDict(extra="forbid")

    has_nonzero_exponential_char_class: bool = Field(
        False, description="Some characteristic class with the exponential property is nonzero on TM"
    )
    codimension_hint: Optional[int] = Field(None, ge=1, description="Codimension k of the Anosov map")
    simply_connected: bool = Field(False, description="The manifold is simply connected")


def _require_valid(build) -> None:
    try:
        build()
    except ValidationError as e:
        raise ValueError(describe_validation_error(e))


class _Manifold(BaseModel):
    model_config = ConfigDict(extra="forbid")

    hypotheses: Hypotheses = Field(default_factory=Hypotheses)


class SphereProductManifold(_Manifold):
    kind: Literal["sphere_product"]
    factors: Tuple[SphereFactor, ...] = Field(..., min_length=1)
    generator_blocks: Optional[Dict[int, List[List[int]]]] = Field(
        None, description="Generator blocks A_p keyed by sphere dimension"
    )

    @model_validator(mode="after")
    def _valid_product(self) -> "SphereProductManifold":
        _require_valid(lambda: SphereProductSpec(factors=self.factors))
        return self

    @property
    def product(self) -> SphereProductSpec:
        return SphereProductSpec(factors=self.factors)


class RingManifold(_Manifold):
    kind: Literal["ring"]
    name: Optional[str] = None
    generators: Tuple[Generator, ...] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _valid_ring(self) -> "RingManifold":
        _require_valid(lambda: self.ring)
        return self

    @property
    def ring(self) -> GradedRingDescription:
        return GradedRingDescription(generators=self.generators)


class SphereBundleManifold(_Manifold):
    """S^m -> E -> M."""

    kind: Literal["sphere_bundle"]
    fiber_dim: int = Field(..., ge=1)
    base: "ManifoldSpec"
    fiber_orientable: bool = True
    self_intersection: Optional[int] = Field(
        None, description="q with x.x = q w in the middle cohomology, when the fiber is 2n over a 2n-manifold"
    )
    euler_number: int = Field(0, description="Euler class for a sphere bundle over S^(m+1)")


class FiberOverSphereManifold(_Manifold):
    """M -> E -> S^m."""

    kind: Literal["fiber_over_sphere"]
    fiber: "ManifoldSpec"
    base_sphere_dim: int = Field(..., ge=1)


class FormManifold(_Manifold):
    """Closed (2n-1)-connected 4n-manifold given by its middle intersection form."""

    kind: Literal["form_manifold"]
    n: int = Field(..., ge=1, description="Half the middle degree; the manifold has dimension 4n")
    form: List[List[int]] = Field(..., min_length=1)
    connected_below_middle: bool = True
    entry_bound: Optional[int] = Field(None, ge=1)


ManifoldSpec = Annotated[
    Union[
        SphereProductManifold,
        RingManifold,
        SphereBundleManifold,
        FiberOverSphereManifold,
        FormManifold,
    ],
    Field(discriminator="kind"),
]

SphereBundleManifold.model_rebuild()
FiberOverSphereManifold.model_rebuild()

manifold_adapter = TypeAdapter(ManifoldSpec)


class AutomorphismDocument(BaseModel):
    """A ring (generators or sphere factors) with one way of giving f*."""

    model_config = ConfigDict(extra="forbid")

    generators: Optional[Tuple[Generator, ...]] = None
    factors: Optional[Tuple[SphereFactor, ...]] = None
    images: Optional[Dict[str, List[int]]] = None
    degree_matrices: Optional[Dict[str, List[List[int]]]] = None
    generator_blocks: Optional[Dict[int, List[List[int]]]] = None

    @model_validator(mode="after")
    def _one_of_each(self) -> "AutomorphismDocument":
        if (self.generators is None) == (self.factors is None):
            raise ValueError("give exactly one of 'generators' or 'factors'")
        given = [k for k in ("images", "degree_matrices", "generator_blocks") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError("give exactly one of 'images', 'degree_matrices' or 'generator_blocks'")
        if self.generator_blocks is not None and self.factors is None:
            raise ValueError("'generator_blocks' needs 'factors'")
        _require_valid(lambda: self.ring)
        return self

    @property
    def ring(self) -> GradedRingDescription:
        if self.generators is not None:
            return GradedRingDescription(generators=self.generators)
        return SphereProductSpec(factors=self.factors).ring

    def build(self) -> GradedAutomorphism:
        if self.generator_blocks is not None:
            return product_automorphism(SphereProductSpec(factors=self.factors), self.generator_blocks)
        if self.images is not None:
            return induce(self.ring, self.images)
        return from_degree_matrices(self.ring, self.degree_matrices)


class RingDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    generators: Optional[Tuple[Generator, ...]] = None
    factors: Optional[Tuple[SphereFactor, ...]] = None

    @model_validator(mode="after")
    def _one_ring(self) -> "RingDocument":
        if (self.generators is None) == (self.factors is None):
            raise ValueError("give exactly one of 'generators' or 'factors'")
        _require_valid(lambda: self.ring)
        return self

    @property
    def ring(self) -> GradedRingDescription:
        if self.generators is not None:
            return GradedRingDescription(generators=self.generators)
        return SphereProductSpec(factors=self.factors).ring


def describe_validation_error(error: ValidationError) -> str:
    """One 'field a.b.c: message' line per failed field."""
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"field {location}: {item['msg']}")
    return "\n".join(lines)


def read_json(path: Union[str, Path]) -> Any:
    """Parse a JSON file, reporting line and column on syntax errors.

    Raises:
        SpecFormatError: If the file is missing or not valid JSON
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecFormatError(f"{path}: cannot read file ({e.strerror})")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecFormatError(f"{path}:{e.lineno}:{e.colno}: {e.msg}")


def parse_manifold(data: Any, source: str = "<input>") -> ManifoldSpec:
    try:
        return manifold_adapter.validate_python(data)
    except ValidationError as e:
        raise SpecFormatError(f"{source}: invalid manifold description\n{describe_validation_error(e)}")


def load_manifold_spec(path: Union[str, Path]) -> ManifoldSpec:
    return parse_manifold(read_json(path), str(path))


def load_automorphism(path: Union[str, Path]) -> AutomorphismDocument:
    try:
        return AutomorphismDocument.model_validate(read_json(path))
    except ValidationError as e:
        raise SpecFormatError(f"{path}: invalid automorphism\n{describe_validation_error(e)}")


def load_ring(path: Union[str, Path]) -> RingDocument:
    try:
        return RingDocument.model_validate(read_json(path))
    except ValidationError as e:
        raise SpecFormatError(f"{path}: invalid ring\n{describe_validation_error(e)}")


def load_matrix(path: Union[str, Path], name: str = "matrix") -> ImmutableMatrix:
    """Read a matrix given as a bare nested list or as {"matrix": [...]}."""
    data = read_json(path)
    if isinstance(data, dict):
        if "matrix" not in data:
            raise SpecFormatError(f"{path}: field matrix: missing")
        data = data["matrix"]
    try:
        return to_integer_matrix(data, name)
    except ValueError as e:
        raise SpecFormatError(f"{path}: {e}")
