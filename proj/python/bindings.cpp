// Copyright 2026 The qexpect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "qexpect/classical.hpp"
#include "qexpect/cli.hpp"
#include "qexpect/error.hpp"
#include "qexpect/hilbert.hpp"
#include "qexpect/market.hpp"
#include "qexpect/measurement.hpp"
#include "qexpect/scenario.hpp"

namespace py = pybind11;
using namespace qexpect;

namespace {

py::list distribution_list(const OutcomeDistribution& d) {
  py::list out;
  for (const auto& e : d.entries) out.append(py::make_tuple(e.outcome, e.probability));
  return out;
}

py::dict joint_dict(const JointTable& t) {
  py::list rows;
  for (const auto& r : t.rows) rows.append(py::make_tuple(r.first, r.second, r.probability));
  py::dict out;
  out["first"] = t.first_name;
  out["second"] = t.second_name;
  out["rows"] = rows;
  return out;
}

JointTable joint_from(const py::dict& d) {
  JointTable t;
  t.first_name = d["first"].cast<std::string>();
  t.second_name = d["second"].cast<std::string>();
  for (const auto& r : d["rows"]) {
    auto row = r.cast<std::tuple<double, double, double>>();
    t.rows.push_back({std::get<0>(row), std::get<1>(row), std::get<2>(row)});
  }
  return t;
}

py::dict path_dict(const PricePath& path) {
  py::list periods;
  for (const auto& p : path.periods) {
    py::dict row;
    row["price_open"] = p.price_open;
    row["up_fraction"] = p.up_fraction;
    row["down_fraction"] = p.down_fraction;
    row["price_close"] = p.price_close;
    periods.append(row);
  }
  py::list classical;
  for (const auto& c : path.classical) {
    py::dict row;
    row["up_fraction"] = c.up_fraction;
    row["down_fraction"] = c.down_fraction;
    row["expected_direction"] = c.expected_direction;
    row["price_close"] = c.price_close;
    classical.append(row);
  }
  py::dict out;
  out["initial_price"] = path.initial_price;
  out["periods"] = periods;
  out["classical"] = classical;
  return out;
}

AgentPopulation quantum_population(const StateVector& psi, std::size_t count) {
  AgentPopulation p;
  p.name = "agents";
  p.count = count;
  p.initial_state = psi;
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantum-probability expectation formation and market simulation";
  m.attr("__version__") = std::string(kLibraryVersion);

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<ImpossibleOutcome>(m, "ImpossibleOutcome", PyExc_ArithmeticError);
  py::register_exception<ImpossibleEvidence>(m, "ImpossibleEvidence", PyExc_ArithmeticError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::class_<StateVector>(m, "StateVector")
      .def(py::init([](const std::vector<Complex>& amps) { return StateVector::from_amplitudes(amps); }),
           py::arg("amplitudes"))
      .def_static("basis", &StateVector::basis, py::arg("dim"), py::arg("k"))
      .def_property_readonly("dim", &StateVector::dim)
      .def_property_readonly("amplitudes", [](const StateVector& s) { return CVector(s.amplitudes()); })
      .def("same_ray", &StateVector::same_ray, py::arg("other"), py::arg("tol") = kInvariantTol)
      .def("with_global_phase", &StateVector::with_global_phase, py::arg("phase"))
      .def("__len__", &StateVector::dim)
      .def("__getitem__",
           [](const StateVector& s, std::size_t k) {
             if (k >= s.dim()) throw py::index_error();
             return s[k];
           })
      .def("__repr__", [](const StateVector& s) {
        std::ostringstream os;
        os << "StateVector(dim=" << s.dim() << ")";
        return os.str();
      });

  py::class_<Projector>(m, "Projector")
      .def(py::init<CMatrix>(), py::arg("matrix"))
      .def_static("onto", &Projector::onto, py::arg("state"))
      .def_property_readonly("dim", &Projector::dim)
      .def_property_readonly("rank", &Projector::rank)
      .def_property_readonly("matrix", [](const Projector& p) { return CMatrix(p.matrix()); });

  py::class_<Observable>(m, "Observable")
      .def(py::init(&make_observable), py::arg("eigenvectors"), py::arg("eigenvalues"), py::arg("name") = "")
      .def_static("price", &price_observable, py::arg("name") = "P")
      .def_static("rotated", &rotated_observable, py::arg("theta"), py::arg("phase") = 0.0, py::arg("name") = "")
      .def_property_readonly("dim", &Observable::dim)
      .def_property_readonly("name", &Observable::name)
      .def_property_readonly("eigenvalues", &Observable::eigenvalues)
      .def_property_readonly("eigenvectors", &Observable::eigenvectors)
      .def_property_readonly("outcomes", &Observable::outcome_values)
      .def_property_readonly("matrix", [](const Observable& o) { return CMatrix(o.matrix()); })
      .def("projector", &projector_for, py::arg("outcome"))
      .def("renamed", &Observable::renamed, py::arg("name"));

  py::class_<Hamiltonian>(m, "Hamiltonian")
      .def(py::init<CMatrix>(), py::arg("matrix"))
      .def_static("zero", &Hamiltonian::zero, py::arg("dim"))
      .def_static("rabi", &Hamiltonian::rabi, py::arg("omega"))
      .def_static("pauli", &Hamiltonian::pauli, py::arg("x"), py::arg("y"), py::arg("z"))
      .def_property_readonly("dim", &Hamiltonian::dim)
      .def_property_readonly("matrix", [](const Hamiltonian& h) { return CMatrix(h.matrix()); })
      .def_property_readonly("energies", [](const Hamiltonian& h) { return Eigen::VectorXd(h.energies()); })
      .def("propagator", &Hamiltonian::propagator, py::arg("t"));

  m.def("inner_product", &inner_product, py::arg("a"), py::arg("b"));
  m.def("evolve", &evolve, py::arg("psi"), py::arg("hamiltonian"), py::arg("t"));
  m.def("commutator_norm", &commutator_norm, py::arg("a"), py::arg("b"));

  m.def("born_probability", &born_probability, py::arg("psi"), py::arg("projector"));
  m.def(
      "born_distribution",
      [](const StateVector& psi, const Observable& obs) { return distribution_list(born_distribution(psi, obs)); },
      py::arg("psi"), py::arg("observable"));
  m.def("collapse", &collapse, py::arg("psi"), py::arg("projector"));
  m.def("transition_probability", &transition_probability, py::arg("a"), py::arg("b"));
  m.def("transition_matrix", &transition_matrix, py::arg("a"), py::arg("b"));
  m.def(
      "sequential_joint",
      [](const StateVector& psi, const Observable& first, const Observable& second) {
        return joint_dict(sequential_joint(psi, first, second));
      },
      py::arg("psi"), py::arg("first"), py::arg("second"));
  m.def(
      "order_effect",
      [](const StateVector& psi, const Observable& i, const Observable& j) { return order_effect(psi, i, j); },
      py::arg("psi"), py::arg("obs_i"), py::arg("obs_j"));
  m.def(
      "order_effect_tables",
      [](const py::dict& ij, const py::dict& ji) { return order_effect(joint_from(ij), joint_from(ji)); },
      py::arg("ij"), py::arg("ji"));
  m.def(
      "interference_term",
      [](const StateVector& psi, const Projector& target, const Observable& partition) {
        const auto r = interference_term(psi, target, partition);
        return py::dict(py::arg("p_direct") = r.p_direct, py::arg("p_classical_sum") = r.p_classical_sum,
                        py::arg("interference") = r.interference);
      },
      py::arg("psi"), py::arg("target"), py::arg("partition"));
  m.def(
      "uncertainty_product",
      [](const StateVector& psi, const Observable& a, const Observable& b) {
        const auto r = uncertainty_product(psi, a, b);
        return py::dict(py::arg("delta_a") = r.delta_a, py::arg("delta_b") = r.delta_b,
                        py::arg("product") = r.product, py::arg("robertson_bound") = r.robertson_bound);
      },
      py::arg("psi"), py::arg("a"), py::arg("b"));

  m.def(
      "total_probability",
      [](const std::vector<double>& partition, const std::vector<double>& conditionals) {
        return total_probability(ClassicalConditionalModel{partition, conditionals});
      },
      py::arg("partition_probs"), py::arg("conditionals"));
  m.def(
      "bayes_update",
      [](const std::vector<double>& prior, const std::vector<double>& likelihoods) {
        return bayes_update(prior, likelihoods);
      },
      py::arg("prior"), py::arg("likelihoods"));

  m.def(
      "run_ensemble",
      [](const StateVector& psi, const Observable& obs, std::size_t count, std::uint64_t seed, unsigned threads) {
        OutcomeDistribution d;
        {
          py::gil_scoped_release release;
          d = run_ensemble(quantum_population(psi, count), obs, seed, RunOptions{threads});
        }
        return distribution_list(d);
      },
      py::arg("psi"), py::arg("observable"), py::arg("count"), py::arg("seed"), py::arg("threads") = 1);
  m.def(
      "run_sequential_ensemble",
      [](const StateVector& psi, const Observable& i, const Observable& j, std::size_t count, std::uint64_t seed,
         bool reverse, unsigned threads) {
        const auto order = reverse ? MeasurementOrder::j_then_i : MeasurementOrder::i_then_j;
        JointTable t;
        {
          py::gil_scoped_release release;
          t = run_sequential_ensemble(quantum_population(psi, count), i, j, order, seed, RunOptions{threads});
        }
        return joint_dict(t);
      },
      py::arg("psi"), py::arg("obs_i"), py::arg("obs_j"), py::arg("count"), py::arg("seed"),
      py::arg("reverse") = false, py::arg("threads") = 1);

  m.def(
      "simulate_market",
      [](const std::string& config_path, py::object seed, unsigned threads) {
        Scenario s = load_scenario(config_path);
        if (!seed.is_none()) s.seed = seed.cast<std::uint64_t>();
        PricePath path;
        {
          py::gil_scoped_release release;
          path = run_market(s, RunOptions{threads});
        }
        return path_dict(path);
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("threads") = 1);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
