# Copyright 2026 The qexpect Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Quantum-probability expectation formation and market simulation."""

from ._core import (
    Hamiltonian,
    ImpossibleEvidence,
    ImpossibleOutcome,
    InvalidInput,
    Observable,
    ParseError,
    Projector,
    StateVector,
    ValidationError,
    __version__,
    bayes_update,
    born_distribution,
    born_probability,
    collapse,
    commutator_norm,
    evolve,
    inner_product,
    interference_term,
    order_effect,
    order_effect_tables,
    run_cli,
    run_ensemble,
    run_sequential_ensemble,
    sequential_joint,
    simulate_market,
    total_probability,
    transition_matrix,
    transition_probability,
    uncertainty_product,
)

__all__ = [
    "Hamiltonian",
    "ImpossibleEvidence",
    "ImpossibleOutcome",
    "InvalidInput",
    "Observable",
    "ParseError",
    "Projector",
    "StateVector",
    "ValidationError",
    "__version__",
    "bayes_update",
    "born_distribution",
    "born_probability",
    "collapse",
    "commutator_norm",
    "evolve",
    "inner_product",
    "interference_term",
    "order_effect",
    "order_effect_tables",
    "run_cli",
    "run_ensemble",
    "run_sequential_ensemble",
    "sequential_joint",
    "simulate_market",
    "total_probability",
    "transition_matrix",
    "transition_probability",
    "uncertainty_product",
]
